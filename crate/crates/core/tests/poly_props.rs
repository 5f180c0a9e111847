mod common;

use num_complex::Complex64;
use proptest::prelude::*;
use radii_lab::poly::{random_poly, SupNormOptions, sup_norm_torus_with};
use radii_lab::rng::{stream, unimodular};
use radii_lab::{MultiIndex, SparsePoly};

fn poly(seed: u64, dim: usize, deg: u32, n: usize) -> SparsePoly {
    random_poly(&mut stream(seed, 0), dim, deg, n)
}

fn disk_point(seed: u64, dim: usize, r: f64) -> Vec<Complex64> {
    let mut rng = stream(seed, 1);
    (0..dim).map(|_| unimodular(&mut rng) * r).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn l1_is_a_norm(seed in any::<u64>(), dim in 1usize..4) {
        let f = poly(seed, dim, 4, 6);
        let g = poly(seed ^ 0x9e37, dim, 4, 6);
        let s = &f + &g;
        prop_assert!(s.l1_norm() <= f.l1_norm() + g.l1_norm() + 1e-12);
        let c = Complex64::new(0.3, -1.2);
        prop_assert!((f.scale(c).l1_norm() - c.norm() * f.l1_norm()).abs() <= 1e-12 * f.l1_norm().max(1.0));
    }

    #[test]
    fn product_evaluates_pointwise(seed in any::<u64>(), dim in 1usize..4, r in 0.0f64..1.0) {
        let f = poly(seed, dim, 3, 5);
        let g = poly(seed.wrapping_add(1), dim, 3, 5);
        let z = disk_point(seed, dim, r);
        let lhs = (&f * &g).eval(&z);
        let rhs = f.eval(&z) * g.eval(&z);
        prop_assert!((lhs - rhs).norm() <= 1e-10 * (1.0 + f.l1_norm() * g.l1_norm()));
    }

    #[test]
    fn dilation_scales_each_degree(seed in any::<u64>(), dim in 1usize..4, r in 0.0f64..1.0) {
        let f = poly(seed, dim, 5, 8);
        let fr = f.dilate(r);
        let expected: f64 = f.terms().map(|(a, c)| c.norm() * r.powi(a.degree() as i32)).sum();
        prop_assert!((fr.l1_norm() - expected).abs() <= 1e-12 * expected.max(1.0));
        let prof = f.l1_profile();
        prop_assert!((prof.iter().sum::<f64>() - f.l1_norm()).abs() <= 1e-12 * f.l1_norm().max(1.0));
    }

    #[test]
    fn homogeneous_parts_sum_back(seed in any::<u64>(), dim in 1usize..4) {
        let f = poly(seed, dim, 5, 8);
        let mut acc = SparsePoly::zero(dim);
        for k in 0..=f.degree().unwrap_or(0) {
            let h = f.homogeneous_part(k);
            prop_assert!(h.terms().all(|(a, _)| a.degree() == k));
            acc = &acc + &h;
        }
        for (a, c) in f.terms() {
            prop_assert!((acc.coeff(a) - c).norm() <= 1e-15);
        }
        prop_assert_eq!(acc.len(), f.len());
    }

    #[test]
    fn sup_lower_is_bracketed(seed in any::<u64>(), dim in 1usize..3) {
        let f = poly(seed, dim, 4, 5);
        let est = sup_norm_torus_with(&f, &SupNormOptions::default()).unwrap();
        // a 16-point grid is a subset of the default 32-point grid
        let coarse = common::dense_grid_sup(&f, 16);
        prop_assert!(est.lower >= coarse - 1e-12);
        prop_assert!(est.lower <= est.l1_upper + 1e-12);
        let z: Vec<Complex64> = est.phases.iter().map(|&t| Complex64::from_polar(1.0, t)).collect();
        prop_assert!((f.eval(&z).norm() - est.lower).abs() <= 1e-9 * est.lower.max(1.0));
    }

    #[test]
    fn bohr_radius_is_a_root(seed in any::<u64>(), dim in 1usize..4) {
        let raw = poly(seed, dim, 4, 6);
        // replace the constant term so that |f_0| < 1
        let f0 = raw.coeff(&MultiIndex::zero(dim));
        let shift = SparsePoly::constant(dim, Complex64::new(0.3, 0.0) - f0);
        let f = &(&raw + &shift) + &SparsePoly::variable(dim, 0).scale(Complex64::new(0.1, 0.0));
        let b = f.bohr_radius(1e-12).unwrap();
        if b.capped {
            prop_assert!(f.l1_norm() <= 1.0);
            prop_assert_eq!(b.radius, 1.0);
        } else {
            prop_assert!((f.dilate(b.radius).l1_norm() - 1.0).abs() <= 1e-9);
        }
    }

    #[test]
    fn json_round_trip(seed in any::<u64>(), dim in 1usize..5) {
        let f = poly(seed, dim, 6, 10);
        let back = SparsePoly::from_json(&f.to_json()).unwrap();
        prop_assert_eq!(back, f);
    }

    #[test]
    fn lattice_below_counts(exps in proptest::collection::vec(0u32..4, 1..5)) {
        let a = MultiIndex(exps.clone());
        let lat = a.lattice_below();
        let expected: usize = exps.iter().map(|&e| e as usize + 1).product();
        prop_assert_eq!(lat.len(), expected);
        prop_assert!(lat.iter().all(|b| b.le(&a)));
    }
}
