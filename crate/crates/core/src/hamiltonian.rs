//! Spin Hamiltonians, exact ground states and binary datasets.

use std::path::Path;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use crate::error::{check_dim, Error, Result};
use crate::pauli::{Pauli, PauliString};
use crate::rng::seeded;
use crate::statevector::StateVector;

/// Largest register [`ground_state`] accepts.
pub const MAX_GROUND_STATE_QUBITS: usize = 14;
/// Registers up to this size are diagonalized densely.
pub const DENSE_CUTOFF: usize = 8;
/// Eigenvalue gap below which the ground space is flagged degenerate.
pub const DEGENERACY_TOL: f64 = 1e-9;

/// `Σ_i α_i P_i` with real coefficients on Hermitian Pauli words.
#[derive(Debug, Clone, PartialEq)]
pub struct Hamiltonian {
    n: usize,
    terms: Vec<(f64, PauliString)>,
}

impl Hamiltonian {
    pub fn new(n: usize, terms: Vec<(f64, PauliString)>) -> Result<Self> {
        for (c, p) in &terms {
            check_dim(n, p.n())?;
            if !c.is_finite() {
                return Err(Error::Domain(format!("non-finite coefficient {c}")));
            }
            if !p.phase().is_real() {
                return Err(Error::Domain(format!("term {p} is not Hermitian")));
            }
        }
        Ok(Hamiltonian { n, terms })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn terms(&self) -> &[(f64, PauliString)] {
        &self.terms
    }

    /// Matrix-free `H|ψ⟩`, parallel over output amplitudes.
    pub fn apply(&self, psi: &[Complex64]) -> Vec<Complex64> {
        let mut out = vec![Complex64::new(0.0, 0.0); psi.len()];
        out.par_chunks_mut(1024).enumerate().for_each(|(chunk, block)| {
            let base = chunk * 1024;
            for (k, o) in block.iter_mut().enumerate() {
                let t = (base + k) as u64;
                let mut acc = Complex64::new(0.0, 0.0);
                for (c, p) in &self.terms {
                    let src = t ^ p.x_mask();
                    let (ph, _) = p.apply_to_basis(src);
                    acc += ph.to_complex() * psi[src as usize] * *c;
                }
                *o = acc;
            }
        });
        out
    }

    /// Dense matrix `⟨x|H|y⟩`.
    pub fn to_dense(&self) -> DMatrix<Complex64> {
        let dim = 1usize << self.n;
        let mut m = DMatrix::from_element(dim, dim, Complex64::new(0.0, 0.0));
        for (c, p) in &self.terms {
            for y in 0..dim as u64 {
                let (ph, x) = p.apply_to_basis(y);
                m[(x as usize, y as usize)] += ph.to_complex() * *c;
            }
        }
        m
    }

    /// `⟨ψ|H|ψ⟩ / ⟨ψ|ψ⟩`.
    pub fn rayleigh_quotient(&self, psi: &[Complex64]) -> f64 {
        let hpsi = self.apply(psi);
        let num: Complex64 = psi.iter().zip(&hpsi).map(|(a, b)| a.conj() * b).sum();
        let den: f64 = psi.iter().map(|a| a.norm_sqr()).sum();
        num.re / den
    }
}

/// Lattice geometry for the Haldane models.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LatticeSpec {
    Chain(usize),
    /// `nx × ny` sites, open along x, periodic along y; site `(ix, iy)` is qubit `ix·ny + iy`.
    YPeriodic {
        nx: usize,
        ny: usize,
    },
}

/// Nearest-neighbour pairs and `Z X Z` triplets (middle site listed second).
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Adjacency {
    pub pairs: Vec<(usize, usize)>,
    pub triplets: Vec<(usize, usize, usize)>,
}

impl LatticeSpec {
    pub fn sites(&self) -> usize {
        match *self {
            LatticeSpec::Chain(n) => n,
            LatticeSpec::YPeriodic { nx, ny } => nx * ny,
        }
    }

    /// Pairs of adjacent sites and straight-line triplets along either axis,
    /// with y-wraparound identified and duplicates removed.
    pub fn adjacency(&self) -> Result<Adjacency> {
        let mut adj = Adjacency::default();
        match *self {
            LatticeSpec::Chain(n) => {
                adj.pairs = (0..n.saturating_sub(1)).map(|i| (i, i + 1)).collect();
                adj.triplets = (0..n.saturating_sub(2)).map(|i| (i, i + 1, i + 2)).collect();
            }
            LatticeSpec::YPeriodic { nx, ny } => {
                if nx == 0 || ny < 2 {
                    return Err(Error::Domain(format!(
                        "y-periodic lattice needs nx >= 1 and ny >= 2, got {nx}x{ny}"
                    )));
                }
                let site = |ix: usize, iy: usize| ix * ny + iy;
                let push_pair = |a: usize, b: usize, pairs: &mut Vec<(usize, usize)>| {
                    let p = (a.min(b), a.max(b));
                    if a != b && !pairs.contains(&p) {
                        pairs.push(p);
                    }
                };
                for ix in 0..nx {
                    for iy in 0..ny {
                        if ix + 1 < nx {
                            push_pair(site(ix, iy), site(ix + 1, iy), &mut adj.pairs);
                        }
                        push_pair(site(ix, iy), site(ix, (iy + 1) % ny), &mut adj.pairs);
                    }
                }
                let push_triplet = |a: usize, m: usize, b: usize, t: &mut Vec<(usize, usize, usize)>| {
                    let key = (a.min(b), m, a.max(b));
                    if a != b && a != m && b != m && !t.contains(&key) {
                        t.push(key);
                    }
                };
                for ix in 0..nx {
                    for iy in 0..ny {
                        if ix >= 1 && ix + 1 < nx {
                            push_triplet(site(ix - 1, iy), site(ix, iy), site(ix + 1, iy), &mut adj.triplets);
                        }
                        push_triplet(
                            site(ix, (iy + ny - 1) % ny),
                            site(ix, iy),
                            site(ix, (iy + 1) % ny),
                            &mut adj.triplets,
                        );
                    }
                }
                adj.pairs.sort_unstable();
                adj.triplets.sort_unstable();
            }
        }
        Ok(adj)
    }
}

/// Hamiltonians studied as data sources.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Model {
    /// `-J Σ X_i X_{i+1} - h Σ Z_i`.
    Tfim { n: usize, j: f64, h: f64 },
    /// `Σ J_i (XX + YY + ZZ)` with `J_i` alternating, first bond `J_odd`.
    HeisenbergAlt { n: usize, j_even: f64, j_odd: f64 },
    /// `-J Σ Z_i X_{i+1} Z_{i+2} - h1 Σ X_i - h2 Σ X_i X_{i+1}`.
    Haldane1d { n: usize, j: f64, h1: f64, h2: f64 },
    /// Haldane terms on a y-periodic `nx × ny` lattice.
    Haldane2d {
        nx: usize,
        ny: usize,
        j: f64,
        h1: f64,
        h2: f64,
    },
}

fn check_finite(vals: &[f64]) -> Result<()> {
    match vals.iter().find(|v| !v.is_finite()) {
        Some(v) => Err(Error::Domain(format!("non-finite model parameter {v}"))),
        None => Ok(()),
    }
}

fn haldane_terms(n: usize, adj: &Adjacency, j: f64, h1: f64, h2: f64) -> Vec<(f64, PauliString)> {
    let mut terms = Vec::new();
    for &(a, m, b) in &adj.triplets {
        terms.push((
            -j,
            PauliString::from_sparse(n, &[(a, Pauli::Z), (m, Pauli::X), (b, Pauli::Z)]),
        ));
    }
    for q in 0..n {
        terms.push((-h1, PauliString::single(n, q, Pauli::X)));
    }
    for &(a, b) in &adj.pairs {
        terms.push((-h2, PauliString::from_sparse(n, &[(a, Pauli::X), (b, Pauli::X)])));
    }
    terms
}

/// Term list of `model`.
pub fn build_hamiltonian(model: Model) -> Result<Hamiltonian> {
    match model {
        Model::Tfim { n, j, h } => {
            check_finite(&[j, h])?;
            if n < 2 {
                return Err(Error::Domain("TFIM needs n >= 2".into()));
            }
            let mut terms = Vec::new();
            if j != 0.0 {
                for i in 0..n - 1 {
                    terms.push((-j, PauliString::from_sparse(n, &[(i, Pauli::X), (i + 1, Pauli::X)])));
                }
            }
            if h != 0.0 {
                for i in 0..n {
                    terms.push((-h, PauliString::single(n, i, Pauli::Z)));
                }
            }
            Hamiltonian::new(n, terms)
        }
        Model::HeisenbergAlt { n, j_even, j_odd } => {
            check_finite(&[j_even, j_odd])?;
            if n < 2 {
                return Err(Error::Domain("Heisenberg chain needs n >= 2".into()));
            }
            let mut terms = Vec::new();
            for i in 0..n - 1 {
                // One-based bond i+1: odd bonds get J_odd.
                let jb = if i % 2 == 0 { j_odd } else { j_even };
                for p in [Pauli::X, Pauli::Y, Pauli::Z] {
                    terms.push((jb, PauliString::from_sparse(n, &[(i, p), (i + 1, p)])));
                }
            }
            Hamiltonian::new(n, terms)
        }
        Model::Haldane1d { n, j, h1, h2 } => {
            check_finite(&[j, h1, h2])?;
            if n < 3 {
                return Err(Error::Domain("Haldane chain needs n >= 3".into()));
            }
            let adj = LatticeSpec::Chain(n).adjacency()?;
            Hamiltonian::new(n, haldane_terms(n, &adj, j, h1, h2))
        }
        Model::Haldane2d { nx, ny, j, h1, h2 } => {
            check_finite(&[j, h1, h2])?;
            let lat = LatticeSpec::YPeriodic { nx, ny };
            let adj = lat.adjacency()?;
            let n = lat.sites();
            Hamiltonian::new(n, haldane_terms(n, &adj, j, h1, h2))
        }
    }
}

/// Lowest eigenpair with the gap to the next level.
#[derive(Debug, Clone)]
pub struct GroundStateResult {
    pub energy: f64,
    pub state: StateVector,
    pub degenerate: bool,
    pub gap: f64,
}

/// Fixes the global phase so the largest-magnitude amplitude is real positive.
fn canonical_phase(v: &mut [Complex64]) {
    let (mut best, mut idx) = (0.0, 0);
    for (i, a) in v.iter().enumerate() {
        // Strict comparison keeps the first index among near-ties.
        if a.norm_sqr() > best + 1e-12 {
            best = a.norm_sqr();
            idx = i;
        }
    }
    let ph = v[idx] / v[idx].norm();
    let norm = v.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    v.iter_mut().for_each(|a| *a = *a / ph / norm);
}

fn finish(h: &Hamiltonian, energy: f64, e1: f64, mut v: Vec<Complex64>) -> Result<GroundStateResult> {
    canonical_phase(&mut v);
    let hv = h.apply(&v);
    let resid = hv
        .iter()
        .zip(&v)
        .map(|(a, b)| (a - b * energy).norm_sqr())
        .sum::<f64>()
        .sqrt();
    if resid > 1e-8 {
        return Err(Error::NoConvergence(0));
    }
    let gap = e1 - energy;
    Ok(GroundStateResult {
        energy,
        state: StateVector::from_amplitudes(v)?,
        degenerate: gap < DEGENERACY_TOL,
        gap,
    })
}

/// Dense Hermitian diagonalization (any `n` the caller can afford).
pub fn ground_state_dense(h: &Hamiltonian) -> Result<GroundStateResult> {
    let eig = h.to_dense().symmetric_eigen();
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let e0 = eig.eigenvalues[order[0]];
    let e1 = order.get(1).map_or(f64::INFINITY, |&i| eig.eigenvalues[i]);
    let v: Vec<Complex64> = eig.eigenvectors.column(order[0]).iter().copied().collect();
    finish(h, e0, e1, v)
}

/// Lanczos with full reorthogonalization for the lowest eigenpair of `h`
/// restricted to the orthogonal complement of `deflate`.
fn lanczos_lowest(
    h: &Hamiltonian,
    deflate: &[Vec<Complex64>],
    seed: u64,
    max_iter: usize,
) -> Result<(f64, Vec<Complex64>)> {
    let dim = 1usize << h.n();
    let mut rng = seeded(seed, 0x1a2c);
    let project = |v: &mut Vec<Complex64>, basis: &[Vec<Complex64>]| {
        for b in basis {
            let ov: Complex64 = b.iter().zip(v.iter()).map(|(x, y)| x.conj() * y).sum();
            v.iter_mut().zip(b).for_each(|(y, x)| *y -= ov * x);
        }
    };
    let normalize = |v: &mut Vec<Complex64>| -> f64 {
        let nrm = v.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        v.iter_mut().for_each(|a| *a /= nrm);
        nrm
    };

    let mut v0: Vec<Complex64> = (0..dim)
        .map(|_| {
            let re: f64 = StandardNormal.sample(&mut rng);
            Complex64::new(re, 0.0)
        })
        .collect();
    project(&mut v0, deflate);
    normalize(&mut v0);

    let max_iter = max_iter.min(dim - deflate.len());
    let mut basis: Vec<Vec<Complex64>> = vec![v0];
    let mut alpha: Vec<f64> = Vec::new();
    let mut beta: Vec<f64> = Vec::new();
    let tol = 1e-11;

    loop {
        let j = basis.len() - 1;
        let mut w = h.apply(&basis[j]);
        let a: f64 = basis[j].iter().zip(&w).map(|(x, y)| (x.conj() * y).re).sum();
        alpha.push(a);
        // Two passes of classical Gram-Schmidt keep the basis orthogonal.
        for _ in 0..2 {
            project(&mut w, deflate);
            project(&mut w, &basis);
        }
        let b = w.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();

        let m = alpha.len();
        let t = DMatrix::from_fn(m, m, |r, c| {
            if r == c {
                alpha[r]
            } else if r + 1 == c || c + 1 == r {
                beta[r.min(c)]
            } else {
                0.0
            }
        });
        let eig = t.symmetric_eigen();
        let k = (0..m)
            .min_by(|&x, &y| eig.eigenvalues[x].total_cmp(&eig.eigenvalues[y]))
            .expect("non-empty tridiagonal");
        let ritz = eig.eigenvalues[k];
        let s = eig.eigenvectors.column(k);
        let converged = b * s[m - 1].abs() < tol || b < tol || m >= max_iter;
        if converged {
            if b * s[m - 1].abs() > 1e-8 && b >= tol {
                return Err(Error::NoConvergence(m));
            }
            let mut v = vec![Complex64::new(0.0, 0.0); dim];
            for (coef, bv) in s.iter().zip(&basis) {
                v.iter_mut().zip(bv).for_each(|(y, x)| *y += x * *coef);
            }
            return Ok((ritz, v));
        }
        beta.push(b);
        w.iter_mut().for_each(|x| *x /= b);
        basis.push(w);
    }
}

/// Iterative ground state; a second deflated run supplies the gap.
pub fn ground_state_lanczos(h: &Hamiltonian) -> Result<GroundStateResult> {
    let max_iter = 400;
    let (e0, mut v0) = lanczos_lowest(h, &[], 17, max_iter)?;
    let nrm = v0.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    v0.iter_mut().for_each(|a| *a /= nrm);
    let e1 = if (1usize << h.n()) > 1 {
        lanczos_lowest(h, std::slice::from_ref(&v0), 29, max_iter)?.0
    } else {
        f64::INFINITY
    };
    finish(h, e0, e1, v0)
}

/// Lowest eigenpair: dense up to [`DENSE_CUTOFF`] qubits, Lanczos beyond.
pub fn ground_state(h: &Hamiltonian) -> Result<GroundStateResult> {
    if h.n() > MAX_GROUND_STATE_QUBITS {
        return Err(Error::Domain(format!(
            "ground state solver is capped at {MAX_GROUND_STATE_QUBITS} qubits, got {}",
            h.n()
        )));
    }
    if h.n() <= DENSE_CUTOFF {
        ground_state_dense(h)
    } else {
        ground_state_lanczos(h)
    }
}

/// Rows of bits; column `j` of the file is qubit `j`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinaryDataset {
    n: usize,
    rows: Vec<u64>,
}

impl BinaryDataset {
    pub fn new(n: usize, rows: Vec<u64>) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::Dataset("dataset has no rows".into()));
        }
        if rows.iter().any(|&r| r >> n != 0) {
            return Err(Error::Dataset(format!("row wider than {n} bits")));
        }
        Ok(BinaryDataset { n, rows })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn rows(&self) -> &[u64] {
        &self.rows
    }

    /// Normalized histogram over `2^n` bitstrings.
    pub fn distribution(&self) -> Vec<f64> {
        let mut p = vec![0.0; 1 << self.n];
        for &r in &self.rows {
            p[r as usize] += 1.0;
        }
        let m = self.rows.len() as f64;
        p.iter_mut().for_each(|v| *v /= m);
        p
    }
}

/// Reads a comma-separated 0/1 matrix.
///
/// The first record is treated as a header when any cell is not `0` or `1`.
/// `columns` selects and orders features; `None` keeps all of them.
pub fn load_binary_csv(path: impl AsRef<Path>, columns: Option<&[usize]>) -> Result<BinaryDataset> {
    let file = std::fs::File::open(path.as_ref())?;
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(file);
    let mut width: Option<usize> = None;
    let mut rows: Vec<Vec<bool>> = Vec::new();
    for (line, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| Error::Dataset(e.to_string()))?;
        if rec.iter().all(|c| c.is_empty()) {
            continue;
        }
        let binary = rec.iter().all(|c| c == "0" || c == "1");
        if line == 0 && !binary {
            width = Some(rec.len());
            continue;
        }
        if !binary {
            let bad = rec.iter().find(|c| *c != "0" && *c != "1").unwrap_or("");
            return Err(Error::Dataset(format!("non-binary cell {bad:?} on line {}", line + 1)));
        }
        match width {
            Some(w) if w != rec.len() => {
                return Err(Error::Dataset(format!(
                    "ragged row on line {}: {} cells, expected {w}",
                    line + 1,
                    rec.len()
                )))
            }
            _ => width = Some(rec.len()),
        }
        rows.push(rec.iter().map(|c| c == "1").collect());
    }
    let width = match width {
        Some(w) if !rows.is_empty() => w,
        _ => return Err(Error::Dataset("file holds no data rows".into())),
    };
    let cols: Vec<usize> = match columns {
        Some(c) => c.to_vec(),
        None => (0..width).collect(),
    };
    if cols.is_empty() || cols.len() > 63 {
        return Err(Error::Dataset(format!("cannot select {} columns", cols.len())));
    }
    if let Some(&bad) = cols.iter().find(|&&c| c >= width) {
        return Err(Error::Dataset(format!("column {bad} out of range (width {width})")));
    }
    let n = cols.len();
    let packed = rows
        .iter()
        .map(|r| {
            cols.iter()
                .enumerate()
                .fold(0u64, |acc, (q, &c)| if r[c] { acc | 1 << (n - 1 - q) } else { acc })
        })
        .collect();
    BinaryDataset::new(n, packed)
}

/// Exact dense ground state of a real-symmetric build, for oracle use.
pub fn dense_spectrum(h: &Hamiltonian) -> DVector<f64> {
    let mut ev = h.to_dense().symmetric_eigen().eigenvalues;
    ev.as_mut_slice().sort_by(|a, b| a.total_cmp(b));
    ev
}
