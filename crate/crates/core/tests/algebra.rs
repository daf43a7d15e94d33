use bornlab_core::algebra::{default_max_dim, generators_for, matchgate_generators};
use bornlab_core::{algebra_intersection, lie_closure, named_dla, DlaKind, Error, PauliString};
use proptest::prelude::*;

fn closure(kind: DlaKind, n: usize) -> bornlab_core::OperatorAlgebra {
    lie_closure(&generators_for(kind, n), default_max_dim(n)).unwrap()
}

#[test]
fn matchgate_dimension_is_so_2n() {
    for n in 2..=7 {
        let c = closure(DlaKind::Matchgate, n);
        assert_eq!(c.dim(), n * (2 * n - 1));
        assert!(c.is_closed());
        let named = named_dla(DlaKind::Matchgate, n).unwrap();
        assert_eq!(algebra_intersection(&c, &named).unwrap().dim(), c.dim());
        assert_eq!(named.dim(), c.dim());
    }
}

#[test]
fn heisenberg_closure_equals_parity_class() {
    for n in 3..=6 {
        let c = closure(DlaKind::Heisenberg, n);
        let named = named_dla(DlaKind::Heisenberg, n).unwrap();
        assert_eq!(c.dim(), named.dim());
        assert_eq!(algebra_intersection(&c, &named).unwrap().dim(), c.dim());
        // The uniform strings only share the letter-count parity for even n.
        let removed = if n % 2 == 0 { 4 } else { 1 };
        assert_eq!(c.dim(), 4usize.pow(n as u32 - 1) - removed, "n = {n}");
    }
}

#[test]
fn haldane_closure_matches_named_basis_from_four_sites() {
    for (n, dim) in [(4, 60), (5, 252), (6, 1020)] {
        let c = closure(DlaKind::Haldane, n);
        let named = named_dla(DlaKind::Haldane, n).unwrap();
        assert_eq!(c.dim(), dim);
        assert_eq!(named.dim(), dim);
        assert_eq!(algebra_intersection(&c, &named).unwrap().dim(), dim);
    }
}

#[test]
fn haldane_three_sites_keeps_middle_field() {
    let c = closure(DlaKind::Haldane, 3);
    let named = named_dla(DlaKind::Haldane, 3).unwrap();
    let ixi = PauliString::from_label("IXI").unwrap();
    // IXI is itself a generator, so the closure cannot drop it.
    assert!(c.contains(&ixi));
    assert!(!named.contains(&ixi));
    assert_eq!(c.dim(), 13);
    assert_eq!(named.dim(), 12);
    assert_eq!(algebra_intersection(&c, &named).unwrap().dim(), 12);
}

#[test]
fn truncated_closure_reports_partial_basis() {
    match lie_closure(&matchgate_generators(5), 10) {
        Err(Error::ClosureTruncated { max_dim, partial }) => {
            assert_eq!(max_dim, 10);
            assert!(partial.dim() >= 10);
        }
        other => panic!("expected truncation, got {other:?}"),
    }
}

proptest! {
    #[test]
    fn closure_is_closed_and_contains_generators(labels in prop::collection::vec("[IXYZ]{3}", 1..4)) {
        let gens: Vec<PauliString> = labels
            .iter()
            .map(|l| PauliString::from_label(l).unwrap())
            .filter(|p| !p.is_identity())
            .collect();
        prop_assume!(!gens.is_empty());
        let c = lie_closure(&gens, 64).unwrap();
        prop_assert!(c.is_closed());
        for g in &gens {
            prop_assert!(c.contains(g));
        }
        prop_assert!(c.dim() <= 63);
    }
}
