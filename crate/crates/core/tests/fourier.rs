mod common;

use bornlab_core::fourier::{fwht, order, truncate_distribution, walsh_coefficients};
use bornlab_core::{decompose, reconstruct, simulate, Circuit, Pauli, PauliString, TruncationSpec};
use common::{random_circuit, random_distribution, rng};
use proptest::prelude::*;

/// Rows of the ordered 8×8 Hadamard matrix, columns `∅, Z1, Z2, Z3, Z1Z2, Z1Z3, Z2Z3, Z1Z2Z3`.
const H8: [[i8; 8]; 8] = [
    [1, 1, 1, 1, 1, 1, 1, 1],
    [1, -1, 1, 1, -1, -1, 1, -1],
    [1, 1, -1, 1, -1, 1, -1, -1],
    [1, 1, 1, -1, 1, -1, -1, -1],
    [1, -1, -1, 1, 1, -1, -1, 1],
    [1, -1, 1, -1, -1, 1, -1, 1],
    [1, 1, -1, -1, -1, -1, 1, 1],
    [1, -1, -1, -1, 1, 1, 1, -1],
];
/// Subset masks of the columns (qubit 1 is bit 2).
const H8_COLUMNS: [u64; 8] = [0b000, 0b100, 0b010, 0b001, 0b110, 0b101, 0b011, 0b111];

/// Bitstring of a row, read off the signs of its single-qubit columns.
fn row_bitstring(row: &[i8; 8]) -> usize {
    (1..=3).fold(0, |x, j| if row[j] < 0 { x | H8_COLUMNS[j] as usize } else { x })
}

#[test]
fn round_trip_on_random_circuits() {
    let mut r = rng(1);
    let mut worst = 0.0f64;
    for i in 0..100 {
        let n = 1 + i % 8;
        let (c, theta) = random_circuit(n, 4 * n, &mut r);
        let p = simulate(&c, &theta).unwrap().born_distribution();
        let back = reconstruct(&decompose(&p).unwrap(), &TruncationSpec::Full).unwrap();
        for (a, b) in p.iter().zip(back.values()) {
            worst = worst.max((a - b).abs());
        }
    }
    assert!(worst <= 1e-12, "max deviation {worst}");
}

#[test]
fn explicit_hadamard_matrix() {
    let rows: Vec<usize> = H8.iter().map(row_bitstring).collect();
    let mut sorted = rows.clone();
    sorted.sort_unstable();
    assert_eq!(sorted, (0..8).collect::<Vec<_>>());
    // Every entry is the parity character of its row and column.
    for (row, &x) in H8.iter().zip(&rows) {
        for (j, &s) in H8_COLUMNS.iter().enumerate() {
            let want = if (x as u64 & s).count_ones().is_multiple_of(2) {
                1
            } else {
                -1
            };
            assert_eq!(row[j], want);
        }
    }
    let mut r = rng(2);
    for _ in 0..10 {
        let p = random_distribution(3, &mut r);
        let c = decompose(&p).unwrap();
        let col: Vec<f64> = H8_COLUMNS.iter().map(|&s| c.get(s).unwrap()).collect();
        let back = reconstruct(&c, &TruncationSpec::Full).unwrap();
        for (row, &x) in H8.iter().zip(&rows) {
            let v: f64 = row.iter().zip(&col).map(|(h, c)| f64::from(*h) * c).sum::<f64>() / 8.0;
            assert!((v - p[x]).abs() < 1e-15);
            assert!((v - back.values()[x]).abs() < 1e-15);
        }
        // Forward direction: c = H8ᵀ p.
        for (j, &s) in H8_COLUMNS.iter().enumerate() {
            let v: f64 = H8.iter().zip(&rows).map(|(row, &x)| f64::from(row[j]) * p[x]).sum();
            assert!((v - c.get(s).unwrap()).abs() < 1e-15);
        }
    }
}

#[test]
fn ghz_worked_example() {
    let mut c = Circuit::new(3);
    c.hadamard(0).cnot(0, 1).cnot(1, 2);
    let p = simulate(&c, &[]).unwrap().born_distribution();
    let corr = decompose(&p).unwrap();
    for s in 1..8u64 {
        let want = if order(s) == 2 { 1.0 } else { 0.0 };
        assert!((corr.get(s).unwrap() - want).abs() < 1e-15);
    }
    let first = reconstruct(&corr, &TruncationSpec::KOrder(1)).unwrap();
    assert!(first.values().iter().all(|v| (v - 0.125).abs() < 1e-15));
    let second = reconstruct(&corr, &TruncationSpec::KOrder(2)).unwrap();
    for (x, v) in second.values().iter().enumerate() {
        let want = if x == 0 || x == 7 { 0.5 } else { 0.0 };
        assert!((v - want).abs() < 1e-15);
    }
}

#[test]
fn product_circuit_correlators() {
    // RY(a) on qubit 0, RY(b) on qubit 1, CNOT 0→1, CNOT 1→0.
    let mut c = Circuit::new(2);
    c.rotation(PauliString::single(2, 0, Pauli::Y));
    c.rotation(PauliString::single(2, 1, Pauli::Y));
    c.cnot(0, 1).cnot(1, 0);
    for i in 0..20 {
        let a = -3.0 + 0.31 * i as f64;
        let b = 2.5 - 0.27 * i as f64;
        let corr = decompose(&simulate(&c, &[a, b]).unwrap().born_distribution()).unwrap();
        let (z1, z2, z12) = (
            corr.get(0b10).unwrap(),
            corr.get(0b01).unwrap(),
            corr.get(0b11).unwrap(),
        );
        assert!((z1 - b.cos()).abs() < 1e-12);
        assert!((z2 - a.cos() * b.cos()).abs() < 1e-12);
        assert!((z12 - a.cos()).abs() < 1e-12);
        assert!((z2 - z1 * z12).abs() < 1e-12);
    }
}

proptest! {
    #[test]
    fn fwht_is_an_involution_up_to_scale(v in prop::collection::vec(-1.0f64..1.0, 16)) {
        let mut w = v.clone();
        fwht(&mut w);
        fwht(&mut w);
        for (a, b) in v.iter().zip(&w) {
            prop_assert!((a * 16.0 - b).abs() < 1e-12);
        }
    }

    #[test]
    fn truncation_keeps_normalization(seed in 0u64..1000, n in 1usize..7, k in 0usize..7) {
        let p = random_distribution(n, &mut rng(seed));
        let t = truncate_distribution(&p, &TruncationSpec::KOrder(k)).unwrap();
        prop_assert!((t.sum() - 1.0).abs() < 1e-12);
        if k >= n {
            for (a, b) in p.iter().zip(t.values()) {
                prop_assert!((a - b).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn correlators_bounded_and_parseval(seed in 0u64..1000, n in 1usize..7) {
        let p = random_distribution(n, &mut rng(seed));
        let c = walsh_coefficients(&p).unwrap();
        prop_assert!(c.iter().all(|v| v.abs() <= 1.0 + 1e-12));
        let lhs: f64 = p.iter().map(|v| v * v).sum::<f64>() * (1u64 << n) as f64;
        let rhs: f64 = c.iter().map(|v| v * v).sum();
        prop_assert!((lhs - rhs).abs() < 1e-12);
    }

    #[test]
    fn truncation_is_a_projection(seed in 0u64..1000, n in 2usize..7, k in 0usize..6) {
        let p = random_distribution(n, &mut rng(seed));
        let spec = TruncationSpec::KOrder(k);
        let once = truncate_distribution(&p, &spec).unwrap();
        let twice = truncate_distribution(once.values(), &spec).unwrap();
        for (a, b) in once.values().iter().zip(twice.values()) {
            prop_assert!((a - b).abs() < 1e-13);
        }
    }
}
