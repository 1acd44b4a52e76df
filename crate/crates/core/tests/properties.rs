use std::f64::consts::{FRAC_PI_2, PI};

use proptest::prelude::*;

use sphereflow::functionals::{
    af_slack, applicable_inequalities, ball_mixed_volume, odd_quermass_explicit, FunctionalRecord,
};
use sphereflow::geometry::{enclosed_volume, off_centre_sphere, Chart, GraphField, ShapeData};
use sphereflow::numerics::{sin_power_integral, sphere_area};
use sphereflow::profile::{parse_profile, write_profile};
use sphereflow::stereo::{certify, project_radius, unproject_radius};
use sphereflow::symfunc::{
    binomial, cone_membership, elementary_all, elementary_partial, inverse_concavity_form, CurvatureSpec, Family,
    KappaVector, SymmetricMatrix,
};

fn family(n: usize) -> impl Strategy<Value = Family> {
    prop_oneof![
        Just(Family::Mean),
        (1..=n).prop_map(Family::NormalizedRoot),
        prop_oneof![Just(1.0), Just(0.5), Just(-0.5), Just(-1.0)].prop_map(Family::PowerMean),
        (1..=n).prop_flat_map(|k| (Just(k), 0..k)).prop_map(|(k, l)| Family::Quotient(k, l)),
    ]
}

fn spec_and_kappa() -> impl Strategy<Value = (CurvatureSpec, Vec<f64>)> {
    (1usize..=6).prop_flat_map(|n| {
        (family(n), prop::collection::vec(-1.0f64..1.0, n)).prop_map(move |(f, e)| {
            (CurvatureSpec::new(n, f, 1.0).unwrap(), e.iter().map(|x| 10f64.powf(*x)).collect())
        })
    })
}

fn ball_case() -> impl Strategy<Value = (usize, f64)> {
    (1usize..=4, 0.1f64..1.5)
}

fn chart_for(n: usize) -> Chart {
    if n == 1 {
        Chart::Circle
    } else {
        Chart::Axisym
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn permutation_symmetry_is_exact((spec, k) in spec_and_kappa(), seed in any::<u64>()) {
        let mut p = k.clone();
        let len = p.len();
        for i in 0..len {
            p.swap(i, (seed as usize).wrapping_add(i * 7) % len);
        }
        let a = spec.value(&KappaVector::positive(k).unwrap()).unwrap();
        let b = spec.value(&KappaVector::positive(p).unwrap()).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn homogeneity((spec, k) in spec_and_kappa(), lambda in 0.1f64..10.0) {
        let f = spec.value(&KappaVector::positive(k.clone()).unwrap()).unwrap();
        let g = spec.value(&KappaVector::positive(k.iter().map(|x| lambda * x).collect()).unwrap()).unwrap();
        prop_assert!((g - lambda * f).abs() <= 1e-12 * lambda * f);
    }

    #[test]
    fn euler_identity_and_positive_gradient((spec, k) in spec_and_kappa()) {
        let kv = KappaVector::positive(k.clone()).unwrap();
        let (f, g) = spec.value_and_gradient(&kv).unwrap();
        let euler: f64 = g.iter().zip(&k).map(|(a, b)| a * b).sum();
        prop_assert!((euler - f).abs() <= 1e-10 * f);
        prop_assert!(g.iter().all(|&x| x > 0.0));
    }

    #[test]
    fn hessian_annihilates_kappa((spec, k) in spec_and_kappa()) {
        let kv = KappaVector::positive(k.clone()).unwrap();
        let h = spec.hessian(&kv).unwrap();
        let g = spec.gradient(&kv).unwrap().into_inner();
        let scale = g.iter().map(|x| x * x).sum::<f64>().sqrt();
        for i in 0..k.len() {
            let row: f64 = (0..k.len()).map(|j| h.get(i, j) * k[j]).sum();
            prop_assert!(row.abs() <= 1e-9 * scale, "row {} gives {}", i, row);
        }
    }

    #[test]
    fn inverse_concavity_form_vanishes_along_h((spec, k) in spec_and_kappa()) {
        let h = SymmetricMatrix::from_diagonal(&k);
        let q = inverse_concavity_form(&spec, &h, &h).unwrap();
        let f = spec.value(&KappaVector::positive(k).unwrap()).unwrap();
        prop_assert!(q.abs() <= 1e-10 * f.max(1.0));
    }

    #[test]
    fn derivative_identity(k in prop::collection::vec(-2.0f64..3.0, 1..=7)) {
        let n = k.len();
        let kv = KappaVector::new(k.clone()).unwrap();
        let e = elementary_all(&k);
        for order in 0..n {
            for i in 0..n {
                let rhs = elementary_partial(&kv, order + 1, i).unwrap() + k[i] * elementary_partial(&kv, order, i).unwrap();
                prop_assert!((e[order] - rhs).abs() <= 1e-10 * (1.0 + e[order].abs()));
            }
        }
    }

    #[test]
    fn maclaurin_chain(k in prop::collection::vec(-1.0f64..3.0, 1..=7)) {
        let n = k.len();
        let kv = KappaVector::new(k.clone()).unwrap();
        let e = elementary_all(&k);
        let top = (1..=n).take_while(|&t| cone_membership(&kv, t)).last().unwrap_or(0);
        for t in 2..=top {
            let lo = (e[t] / binomial(n, t)).powf(1.0 / t as f64);
            let hi = (e[t - 1] / binomial(n, t - 1)).powf(1.0 / (t - 1) as f64);
            prop_assert!(lo <= hi * (1.0 + 1e-12));
        }
    }

    #[test]
    fn constant_profiles_are_geodesic_spheres((n, rho) in ball_case()) {
        let field = GraphField::ball(chart_for(n), n, 256, rho).unwrap();
        let shape = ShapeData::compute(&field).unwrap();
        let cot = rho.cos() / rho.sin();
        for k in &shape.kappa {
            prop_assert!(k.values().iter().all(|x| (x - cot).abs() <= 1e-10 * cot.max(1.0)));
        }
        let area = sphere_area(n) * rho.sin().powi(n as i32);
        prop_assert!((shape.area - area).abs() <= 1e-10 * area);
        let vol = sphere_area(n) * sin_power_integral(n, rho);
        prop_assert!((enclosed_volume(&field) - vol).abs() <= 1e-10 * vol);
    }

    #[test]
    fn ball_functionals((n, rho) in ball_case()) {
        let field = GraphField::ball(chart_for(n), n, 64, rho).unwrap();
        let shape = ShapeData::compute(&field).unwrap();
        let rec = FunctionalRecord::geometric(0.0, &field, &shape, &[]).unwrap();
        for k in 0..=n {
            let exact = ball_mixed_volume(n, k, rho).unwrap();
            prop_assert!((rec.v[k] - exact).abs() <= 1e-10 * exact.max(1e-3));
        }
        let omega = sphere_area(n);
        if let Some(phi1) = rec.phi1 {
            prop_assert!((phi1 - omega.powf(2.0 / n as f64)).abs() <= 1e-10 * phi1);
        }
        if let Some(phi2) = rec.phi2 {
            prop_assert!((phi2 - omega.powf(2.0 / n as f64)).abs() <= 1e-10 * phi2);
        }
        for k in (0..).take_while(|k| 2 * k + 1 <= n + 1) {
            let explicit = odd_quermass_explicit(&rec.v, n, k).unwrap();
            prop_assert!((explicit - rec.w[2 * k + 1]).abs() <= 1e-10 * explicit.abs());
        }
        for which in applicable_inequalities(n) {
            let s = af_slack(&rec, which).unwrap();
            prop_assert!(s.equality, "{} slack {:e}", which.name(), s.relative());
        }
    }

    #[test]
    fn gradient_factor_at_least_one(n in 1usize..=4, b in 0.4f64..1.2, a in prop::collection::vec(-0.1f64..0.1, 3)) {
        let field = GraphField::from_fn(chart_for(n), n, 64, |t| b + a[0] * t.cos() + a[1] * (2.0 * t).cos() + a[2] * (3.0 * t).cos()).unwrap();
        let shape = ShapeData::compute(&field).unwrap();
        prop_assert!(shape.v.iter().all(|&v| v >= 1.0));
    }

    #[test]
    fn convex_spheres_are_certified(n in 1usize..=4, alpha in 0.0f64..0.5, extra in 0.2f64..1.0) {
        // umbilic with kappa = cot(rho) > 0.05
        let rho = (alpha + extra).min(1.5);
        let field = GraphField::from_fn(chart_for(n), n, 128, off_centre_sphere(alpha, rho)).unwrap();
        prop_assert!(ShapeData::compute(&field).unwrap().strictly_convex());
    }

    #[test]
    fn slacks_nonnegative_on_convex_profiles(n in 2usize..=5, b in 0.4f64..1.1, a in prop::collection::vec(-0.03f64..0.03, 2)) {
        let field = GraphField::from_fn(Chart::Axisym, n, 128, |t| b + a[0] * t.cos() + a[1] * (2.0 * t).cos()).unwrap();
        let shape = ShapeData::compute(&field).unwrap();
        prop_assume!(shape.strictly_convex());
        let rec = FunctionalRecord::geometric(0.0, &field, &shape, &[]).unwrap();
        for which in applicable_inequalities(n) {
            let s = af_slack(&rec, which).unwrap();
            prop_assert!(s.value >= -1e-8 * s.scale, "{} slack {:e}", which.name(), s.relative());
        }
    }

    #[test]
    fn projection_round_trip(r in 0.0f64..3.0, dr in 1e-6f64..0.1) {
        let rho = project_radius(r).unwrap();
        prop_assert!((unproject_radius(rho) - r).abs() <= 1e-14);
        prop_assume!(r + dr < PI);
        prop_assert!(project_radius(r + dr).unwrap() > rho);
    }

    #[test]
    fn ball_inball_is_projected_radius(n in 1usize..=4, rho in 0.1f64..1.5) {
        let c = certify(&GraphField::ball(chart_for(n), n, 128, rho).unwrap()).unwrap();
        prop_assert!(c.strictly_convex);
        prop_assert!(c.hemisphere_contained == (rho < FRAC_PI_2));
        prop_assert!((c.inball_radius - project_radius(rho).unwrap()).abs() <= 1e-8);
    }

    #[test]
    fn profile_text_round_trip(n in 1usize..=4, b in 0.2f64..1.4, a in -0.1f64..0.1, nodes in 16usize..80) {
        let field = GraphField::from_fn(chart_for(n), n, nodes, |t| b + a * t.cos()).unwrap();
        let mut buf = Vec::new();
        write_profile(&field, &mut buf).unwrap();
        prop_assert_eq!(parse_profile(std::str::from_utf8(&buf).unwrap()).unwrap(), field);
    }
}
