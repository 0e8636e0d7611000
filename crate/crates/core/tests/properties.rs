use num_complex::Complex;
use proptest::prelude::*;

use dkg_core::dkg_state::{charge, random_sobolev_field, DataSpec};
use dkg_core::estimates::{check_algebraic_inequality, InequalityCase, Region};
use dkg_core::nonlinearity::{projected_nullform, projected_nullform_spectral};
use dkg_core::{to_diagonal, to_physical, DiracMatrices, Field, Grid, Multiplier, PhysicalState, Sign, SignPair};

fn sign(b: bool) -> Sign {
    if b {
        Sign::Plus
    } else {
        Sign::Minus
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn transform_round_trip_and_parseval(seed in any::<u64>(), log_n in 3usize..8, s in -1.0f64..2.0) {
        let grid = Grid::periodic(1 << log_n).unwrap();
        let f = random_sobolev_field(&grid, s, 1, seed, false);
        let values = grid.inverse(f.coeffs(0));
        let back = grid.forward(&values);
        let err = back.iter().zip(f.coeffs(0)).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        prop_assert!(err <= 1e-13 * f.max_abs_coeff().max(1.0));
        let rel = (f.physical_l2_norm() - f.l2_norm()).abs() / f.l2_norm();
        prop_assert!(rel <= 1e-12);
    }

    #[test]
    fn diagonal_round_trip_and_charge_split(seed in any::<u64>(), l in -0.5f64..0.24, k in 0.05f64..1.0) {
        let grid = Grid::periodic(64).unwrap();
        let spec = DataSpec { l, k, seed, psi_size: 1.0, phi_size: 1.0 };
        let p = PhysicalState::random(&grid, &spec);
        let d = to_diagonal(&p).unwrap();
        let (back, _) = to_physical(&d).unwrap();
        prop_assert!(back.distance(&p).unwrap() <= 1e-12);
        let q = charge(&p.psi);
        prop_assert!((charge(&d.psi_plus) + charge(&d.psi_minus) - q).abs() <= 1e-12 * q);
        prop_assert!(d.projection_residue() <= 1e-13);
    }

    #[test]
    fn sobolev_norm_is_monotone_in_s(seed in any::<u64>(), s in -1.0f64..1.0, ds in 0.01f64..1.0) {
        let grid = Grid::periodic(32).unwrap();
        let f = random_sobolev_field(&grid, 0.0, 2, seed, false);
        prop_assert!(f.sobolev_norm(s) <= f.sobolev_norm(s + ds) * (1.0 + 1e-14));
    }

    #[test]
    fn multipliers_compose(s in -2.0f64..2.0, t in -2.0f64..2.0) {
        let grid = Grid::periodic(32).unwrap();
        let both = Multiplier::bracket_power(&grid, s).compose(&Multiplier::bracket_power(&grid, t)).unwrap();
        let direct = Multiplier::bracket_power(&grid, s + t);
        for (a, b) in both.symbol().iter().zip(direct.symbol()) {
            prop_assert!((a - b).norm() <= 1e-12 * b.norm());
        }
    }

    #[test]
    fn symbol_and_physical_nullforms_agree(seed in any::<u64>(), p in 0usize..4) {
        let grid = Grid::periodic(32).unwrap();
        let d = DiracMatrices::standard();
        let a = random_sobolev_field(&grid, 0.0, 2, seed, false);
        let b = random_sobolev_field(&grid, 0.5, 2, seed.wrapping_add(1), false);
        let pair = SignPair::ALL[p];
        let x = projected_nullform(&d, &a, &b, pair).unwrap();
        let y = projected_nullform_spectral(&d, &a, &b, pair).unwrap();
        prop_assert!(x.distance(&y).unwrap() <= 1e-12 * a.l2_norm() * b.l2_norm());
    }

    #[test]
    fn zero_cells_kill_plane_waves(k1 in 1i64..10, eta in 1i64..10, p in 0usize..4) {
        let grid = Grid::periodic(64).unwrap();
        let d = DiracMatrices::<f64>::standard();
        let pair = SignPair::ALL[p];
        for (zp, s1, s2) in d.gamma_table().zero_cells() {
            if zp != pair {
                continue;
            }
            let x1 = s1.value() as f64 * k1 as f64;
            let x2 = -(s2.value() as f64) * eta as f64;
            let wave = |w: f64, v: [Complex<f64>; 2]| {
                Field::from_fn(&grid, 2, move |x| {
                    let e = Complex::new((w * x).cos(), (w * x).sin());
                    vec![e * v[0], e * v[1]]
                })
                .unwrap()
            };
            let a = wave(x1, [Complex::new(1.0, 0.5), Complex::new(-0.3, 0.2)]);
            let b = wave(x2, [Complex::new(0.7, -0.1), Complex::new(0.4, 0.9)]);
            let out = projected_nullform(&d, &a, &b, pair).unwrap();
            prop_assert!(out.max_abs_coeff() <= 1e-12);
        }
    }

    #[test]
    fn modulation_inequality_in_region(
        s1 in any::<bool>(), s2 in any::<bool>(), sp in any::<bool>(),
        a in 0.0f64..50.0, b in 0.0f64..50.0,
        t1 in -100.0f64..100.0, t2 in -100.0f64..100.0,
    ) {
        let (s1, s2, sp) = (sign(s1), sign(s2), sign(sp));
        let pair = SignPair::ALL.into_iter().find(|p| p.first == s1 && p.second == s2).unwrap();
        let (x1, x2) = if pair.is_equal() { (a, b) } else { (a, -b) };
        let case = InequalityCase::new(pair, sp);
        let c = check_algebraic_inequality(case, x1, x2, t1, t2).unwrap();
        prop_assert!(c.holds, "{c:?}");
        if a > 0.0 && b > 0.0 {
            // Mirroring ξ₂ leaves the region, where the inequality need not hold.
            prop_assert!(check_algebraic_inequality(case, x1, -x2, t1, t2).is_err());
        }
    }
}

#[test]
fn region_of_each_case() {
    for pair in SignPair::ALL {
        let r = InequalityCase::new(pair, Sign::Plus).region();
        assert_eq!(r == Region::Same, pair.is_equal());
    }
}
