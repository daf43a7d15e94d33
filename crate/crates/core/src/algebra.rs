//! Dynamical Lie algebras spanned by Pauli strings.
//!
//! The bracket of two Pauli strings is either zero or proportional to their
//! product, so a real span of Pauli strings closed under pairwise commutation
//! is a Lie algebra. Bases are stored phase-stripped.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::pauli::{full_mask, qubit_bit, Pauli, PauliString};

/// A Lie algebra given by a basis of canonical Pauli strings.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OperatorAlgebra {
    n: usize,
    basis: BTreeSet<(u64, u64)>,
    generators: Vec<PauliString>,
}

/// Which explicit basis [`named_dla`] builds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DlaKind {
    Matchgate,
    Heisenberg,
    Haldane,
}

impl OperatorAlgebra {
    pub fn from_strings(n: usize, strings: impl IntoIterator<Item = PauliString>) -> Self {
        let basis = strings
            .into_iter()
            .filter(|p| !p.is_identity())
            .map(|p| {
                assert_eq!(p.n(), n);
                (p.x_mask(), p.z_mask())
            })
            .collect();
        OperatorAlgebra {
            n,
            basis,
            generators: Vec::new(),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn is_empty(&self) -> bool {
        self.basis.is_empty()
    }

    /// Generators the algebra was built from (empty for explicit bases).
    pub fn generators(&self) -> &[PauliString] {
        &self.generators
    }

    pub fn contains(&self, p: &PauliString) -> bool {
        p.n() == self.n && self.basis.contains(&(p.x_mask(), p.z_mask()))
    }

    /// Basis strings in canonical (mask) order.
    pub fn basis(&self) -> impl Iterator<Item = PauliString> + '_ {
        let n = self.n;
        self.basis
            .iter()
            .map(move |&(x, z)| PauliString::from_masks(n, x, z, Default::default()).expect("stored masks are valid"))
    }

    /// Checks that every anticommuting pair multiplies back into the basis.
    pub fn is_closed(&self) -> bool {
        let elems: Vec<PauliString> = self.basis().collect();
        elems.iter().enumerate().all(|(i, a)| {
            elems[..i]
                .iter()
                .all(|b| a.commutes_with(b) || self.contains(&a.mul_unchecked(b)))
        })
    }

    /// Newline-delimited labels, e.g. `XZIY`, in sorted label order.
    pub fn export_labels(&self) -> String {
        let mut labels: Vec<String> = self.basis().map(|p| p.label()).collect();
        labels.sort();
        let mut out = labels.join("\n");
        out.push('\n');
        out
    }
}

/// Smallest commutator-closed Pauli basis containing `generators`.
///
/// Fails with [`Error::ClosureTruncated`] (carrying the partial basis) once the
/// basis would grow past `max_dim`.
pub fn lie_closure(generators: &[PauliString], max_dim: usize) -> Result<OperatorAlgebra> {
    let Some(first) = generators.first() else {
        return Err(Error::Domain("lie_closure needs at least one generator".into()));
    };
    if max_dim == 0 {
        return Err(Error::Domain("max_dim must be at least 1".into()));
    }
    let n = first.n();
    for g in generators {
        crate::error::check_dim(n, g.n())?;
    }

    let mut elems: Vec<PauliString> = Vec::new();
    let mut seen = BTreeSet::new();
    let truncated = |elems: &[PauliString]| {
        let mut partial = OperatorAlgebra::from_strings(n, elems.iter().copied());
        partial.generators = generators.to_vec();
        Err(Error::ClosureTruncated {
            max_dim,
            partial: Box::new(partial),
        })
    };
    for g in generators.iter().filter(|g| !g.is_identity()) {
        if seen.insert((g.x_mask(), g.z_mask())) {
            if elems.len() == max_dim {
                return truncated(&elems);
            }
            elems.push(g.canonical());
        }
    }

    let mut i = 0;
    while i < elems.len() {
        for j in 0..i {
            let (a, b) = (elems[i], elems[j]);
            if a.commutes_with(&b) {
                continue;
            }
            let c = a.mul_unchecked(&b).canonical();
            if seen.insert((c.x_mask(), c.z_mask())) {
                if elems.len() == max_dim {
                    return truncated(&elems);
                }
                elems.push(c);
            }
        }
        i += 1;
    }

    let mut alg = OperatorAlgebra::from_strings(n, elems);
    alg.generators = generators.to_vec();
    Ok(alg)
}

/// Default closure guard: the full Pauli group size `4^n`.
pub fn default_max_dim(n: usize) -> usize {
    1usize.checked_shl(2 * n as u32).unwrap_or(usize::MAX)
}

/// Generators `{X_i X_{i+1}} ∪ {Z_i}`.
pub fn matchgate_generators(n: usize) -> Vec<PauliString> {
    let mut g: Vec<PauliString> = (0..n.saturating_sub(1))
        .map(|i| PauliString::from_sparse(n, &[(i, Pauli::X), (i + 1, Pauli::X)]))
        .collect();
    g.extend((0..n).map(|i| PauliString::single(n, i, Pauli::Z)));
    g
}

/// Nearest-neighbour `XX`, `YY`, `ZZ` on an open chain.
pub fn heisenberg_generators(n: usize) -> Vec<PauliString> {
    let mut g = Vec::new();
    for i in 0..n.saturating_sub(1) {
        for p in [Pauli::X, Pauli::Y, Pauli::Z] {
            g.push(PauliString::from_sparse(n, &[(i, p), (i + 1, p)]));
        }
    }
    g
}

/// `Z_i X_{i+1} Z_{i+2}`, `X_i` and `X_i X_{i+1}` terms of the 1D Haldane chain.
pub fn haldane_generators(n: usize) -> Vec<PauliString> {
    let mut g: Vec<PauliString> = (0..n.saturating_sub(2))
        .map(|i| PauliString::from_sparse(n, &[(i, Pauli::Z), (i + 1, Pauli::X), (i + 2, Pauli::Z)]))
        .collect();
    g.extend((0..n).map(|i| PauliString::single(n, i, Pauli::X)));
    g.extend((0..n.saturating_sub(1)).map(|i| PauliString::from_sparse(n, &[(i, Pauli::X), (i + 1, Pauli::X)])));
    g
}

/// Generator list matching `kind`.
pub fn generators_for(kind: DlaKind, n: usize) -> Vec<PauliString> {
    match kind {
        DlaKind::Matchgate => matchgate_generators(n),
        DlaKind::Heisenberg => heisenberg_generators(n),
        DlaKind::Haldane => haldane_generators(n),
    }
}

/// Builds the named algebra from its explicit basis description.
pub fn named_dla(kind: DlaKind, n: usize) -> Result<OperatorAlgebra> {
    let min = if kind == DlaKind::Haldane { 3 } else { 2 };
    if n < min {
        return Err(Error::Domain(format!("{kind:?} algebra needs n >= {min}, got {n}")));
    }
    let strings = match kind {
        DlaKind::Matchgate => matchgate_basis(n),
        DlaKind::Heisenberg => heisenberg_basis(n),
        DlaKind::Haldane => haldane_basis(n),
    };
    let mut alg = OperatorAlgebra::from_strings(n, strings);
    alg.generators = generators_for(kind, n);
    Ok(alg)
}

/// `Z_i` and the Jordan-Wigner strings `A_i Z_{i+1} ⋯ Z_{j-1} B_j` for
/// `A, B ∈ {X, Y}`, `i < j`.
fn matchgate_basis(n: usize) -> Vec<PauliString> {
    let mut out: Vec<PauliString> = (0..n).map(|i| PauliString::single(n, i, Pauli::Z)).collect();
    for i in 0..n {
        for j in i + 1..n {
            for a in [Pauli::X, Pauli::Y] {
                for b in [Pauli::X, Pauli::Y] {
                    let mut ops = vec![(i, a), (j, b)];
                    ops.extend((i + 1..j).map(|k| (k, Pauli::Z)));
                    out.push(PauliString::from_sparse(n, &ops));
                }
            }
        }
    }
    out
}

/// Every string whose `X`, `Y`, `Z` counts share a parity, minus the three
/// uniform strings.
fn heisenberg_basis(n: usize) -> Vec<PauliString> {
    let full = full_mask(n);
    let mut out = Vec::new();
    for x in 0..=full {
        for z in 0..=full {
            let ny = (x & z).count_ones();
            let nx = (x & !z).count_ones();
            let nz = (z & !x).count_ones();
            if nx % 2 == ny % 2 && ny % 2 == nz % 2 {
                out.push(PauliString::from_masks(n, x, z, Default::default()).unwrap());
            }
        }
    }
    let uniform = [(full, 0), (full, full), (0, full)];
    out.retain(|p| !uniform.contains(&(p.x_mask(), p.z_mask())));
    out
}

/// `Y`/`Z` letters on an even number of odd sites and an even number of even
/// sites, `X`/`I` elsewhere, minus `X_o`, `X_e` and `X^{⊗n}`.
fn haldane_basis(n: usize) -> Vec<PauliString> {
    let full = full_mask(n);
    // One-based odd sites are zero-based even qubits.
    let odd_sites: u64 = (0..n).step_by(2).fold(0, |m, q| m | qubit_bit(n, q));
    let even_sites = full & !odd_sites;
    let mut out = Vec::new();
    for x in 0..=full {
        for z in 0..=full {
            // A letter is Y or Z exactly when its z bit is set.
            if (z & odd_sites).count_ones().is_multiple_of(2) && (z & even_sites).count_ones().is_multiple_of(2) {
                out.push(PauliString::from_masks(n, x, z, Default::default()).unwrap());
            }
        }
    }
    // X_o = (I X)^{⌊n/2⌋} I^{n mod 2}, X_e = (X I)^{⌊n/2⌋} X^{n mod 2}.
    let excluded = [(even_sites, 0), (odd_sites, 0), (full, 0)];
    out.retain(|p| !excluded.contains(&(p.x_mask(), p.z_mask())));
    out
}

/// Basis-set intersection of two algebras on the same register.
pub fn algebra_intersection(a: &OperatorAlgebra, b: &OperatorAlgebra) -> Result<OperatorAlgebra> {
    crate::error::check_dim(a.n, b.n)?;
    Ok(OperatorAlgebra {
        n: a.n,
        basis: a.basis.intersection(&b.basis).copied().collect(),
        generators: Vec::new(),
    })
}
