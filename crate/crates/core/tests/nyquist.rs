use nalgebra::Schur;
use num_complex::Complex64 as C;
use proptest::prelude::*;
use srg_cert::linalg::CMatrix;
use srg_cert::nyquist::{det_locus, gnc, loop_det, sufficient_gnc, NyquistConfig};
use srg_cert::oracle::{is_closed_loop_stable, Ensemble};
use srg_cert::ratfun::FrequencyGrid;

fn rel(a: C, b: C) -> f64 {
    (a - b).norm() / b.norm().max(1e-300)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn determinant_identities(index in 0usize..1000, m in 2usize..=3, log_w in -3.0..3.0f64, tau in 0.01..1.0f64) {
        let (h1, h2) = Ensemble::new(21, 1000, m, 6).pair(index);
        let w = 10f64.powf(log_w);
        let (r1, r2) = (h1.response(w).unwrap(), h2.response(w).unwrap());
        let d = loop_det(&r1, &r2, tau);
        let id = CMatrix::identity(m, m);
        if let Some(inv) = r1.clone().try_inverse() {
            let lhs = inv.determinant() * d;
            let rhs = (&inv + &r2 * C::new(tau, 0.0)).determinant();
            prop_assert!(rel(lhs, rhs) <= 1e-8, "{} vs {}", lhs, rhs);
        }
        let product: C = Schur::new(&id + &r1 * &r2 * C::new(tau, 0.0)).eigenvalues().unwrap().iter().product();
        prop_assert!(rel(product, d) <= 1e-8);
    }
}

#[test]
fn locus_is_conjugate_symmetric_at_every_grid_point() {
    let grid = FrequencyGrid::log(1e-3, 1e3, 40).unwrap();
    for i in 0..10 {
        let (h1, h2) = Ensemble::new(22, 10, 2, 6).pair(i);
        for tau in [0.1, 1.0] {
            let locus = det_locus(&h1, &h2, tau, &grid).unwrap();
            for &w in grid.omegas() {
                let pos = locus.samples.iter().find(|(v, _)| *v == w).unwrap().1;
                let neg = locus.samples.iter().find(|(v, _)| *v == -w).unwrap().1;
                assert!((neg - pos.conj()).norm() <= 1e-9);
                let direct = loop_det(&h1.response(-w).unwrap(), &h2.response(-w).unwrap(), tau);
                assert!((direct - pos.conj()).norm() <= 1e-9 * pos.norm().max(1.0));
            }
        }
    }
}

#[test]
fn gnc_matches_the_eigenvalue_oracle() {
    let grid = FrequencyGrid::log(1e-3, 1e3, 400).unwrap();
    let cfg = NyquistConfig::default();
    let (mut mismatches, mut flagged, mut unstable) = (Vec::new(), 0, 0);
    for (m, seed) in [(2, 23), (3, 24)] {
        let gen = Ensemble::new(seed, 100, m, 6);
        for i in 0..gen.count {
            let (h1, h2) = gen.pair(i);
            let oracle = is_closed_loop_stable(&h1, &h2).unwrap();
            unstable += !oracle.stable as usize;
            match gnc(&h1, &h2, &grid, &cfg) {
                Ok(v) if v.min_abs <= 1e-6 => flagged += 1,
                Ok(v) if v.stable != oracle.stable => mismatches.push((m, i)),
                Ok(_) => {}
                Err(_) => flagged += 1,
            }
            let suff = sufficient_gnc(&h1, &h2, &grid, &cfg).unwrap();
            assert!(!suff.pass || oracle.stable, "sufficient test passed an unstable loop (m={m}, pair {i})");
        }
    }
    assert!(mismatches.is_empty(), "{mismatches:?}");
    assert!(flagged <= 4, "{flagged} pairs in the dead band");
    assert!(unstable > 0, "ensemble has no unstable loops");
}
