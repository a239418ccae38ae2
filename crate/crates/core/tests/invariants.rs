use proptest::prelude::*;

use prodherz::norms::{bmo_norm, herz_norm, morrey_herz_norm, ExponentParams, RectangleFamily};
use prodherz::operators::{cz_apply, strong_maximal, MaximalVariant, SeparableKernel};
use prodherz::verify::{InequalityReport, Suite, SuiteRun, Trial};
use prodherz::weights::{ap_star_characteristic, WeightFunction};
use prodherz::{make_grid, GridFunction, GridSpec};

fn grid() -> GridSpec {
    make_grid(2, 1).unwrap()
}

fn values(lo: f64, hi: f64) -> impl Strategy<Value = GridFunction> {
    let g = grid();
    prop::collection::vec(lo..hi, g.n() * g.n()).prop_map(move |v| GridFunction::from_values(g, v).unwrap())
}

fn exponents() -> impl Strategy<Value = ExponentParams> {
    (-0.4f64..0.4, 1.2f64..4.0, 1.0f64..4.0, 0.05f64..0.3).prop_filter_map("admissible", |(a, p, q, l)| {
        let prm = ExponentParams::new(a, p, q, l).ok()?;
        (prm.holds(prodherz::norms::Predicate::Char) && prm.beta(1) > l).then_some(prm)
    })
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1e-300)
}

fn le(a: &GridFunction, b: &GridFunction) -> bool {
    a.values().iter().zip(b.values()).all(|(x, y)| *x <= y + 1e-12 * y.abs())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn norms_are_homogeneous_and_subadditive(f in values(-2.0, 2.0), g in values(-2.0, 2.0), c in -3.0f64..3.0, prm in exponents()) {
        for norm in [herz_norm, morrey_herz_norm] {
            let nf = norm(&f, &prm).unwrap();
            prop_assert!(close(norm(&f.scale(c).unwrap(), &prm).unwrap(), c.abs() * nf, 1e-12));
            let sum = norm(&f.add(&g).unwrap(), &prm).unwrap();
            prop_assert!(sum <= (nf + norm(&g, &prm).unwrap()) * (1.0 + 1e-12));
        }
    }

    #[test]
    fn norms_are_lattice_monotone(f in values(-2.0, 2.0), shrink in values(0.0, 1.0), prm in exponents()) {
        let small = f.mul(&shrink).unwrap();
        prop_assert!(morrey_herz_norm(&small, &prm).unwrap() <= morrey_herz_norm(&f, &prm).unwrap() * (1.0 + 1e-12));
        prop_assert!(herz_norm(&small, &prm).unwrap() <= herz_norm(&f, &prm).unwrap() * (1.0 + 1e-12));
    }

    #[test]
    fn morrey_herz_with_zero_lambda_is_herz(f in values(-2.0, 2.0), prm in exponents()) {
        let flat = prm.with_lambda(0.0);
        prop_assert!(close(morrey_herz_norm(&f, &flat).unwrap(), herz_norm(&f, &flat).unwrap(), 1e-12));
    }

    #[test]
    fn maximal_operator_is_sublinear_and_dominates(f in values(-2.0, 2.0), g in values(-2.0, 2.0), c in -3.0f64..3.0) {
        for variant in [MaximalVariant::DyadicSides, MaximalVariant::exact(), MaximalVariant::Iterated1d] {
            let mf = strong_maximal(&f, variant).unwrap();
            let mg = strong_maximal(&g, variant).unwrap();
            prop_assert!(le(&f.abs(), &mf));
            prop_assert!(le(&strong_maximal(&f.add(&g).unwrap(), variant).unwrap(), &mf.add(&mg).unwrap()));
            let scaled = strong_maximal(&f.scale(c).unwrap(), variant).unwrap();
            for (a, b) in scaled.values().iter().zip(mf.values()) {
                prop_assert!(close(*a, c.abs() * b, 1e-12));
            }
        }
    }

    #[test]
    fn singular_integral_is_linear(f in values(-2.0, 2.0), g in values(-2.0, 2.0), c in -3.0f64..3.0) {
        let k = SeparableKernel::double_hilbert();
        let lhs = cz_apply(&f.scale(c).unwrap().add(&g).unwrap(), &k).unwrap();
        let rhs = cz_apply(&f, &k).unwrap().scale(c).unwrap().add(&cz_apply(&g, &k).unwrap()).unwrap();
        let scale = rhs.max_abs().max(1.0);
        for (a, b) in lhs.values().iter().zip(rhs.values()) {
            prop_assert!((a - b).abs() <= 1e-12 * scale);
        }
    }

    #[test]
    fn strong_weight_characteristics(w in values(0.1, 5.0), p in 1.0f64..4.0) {
        let w = WeightFunction::new(w).unwrap();
        for family in [RectangleFamily::DyadicSides { aligned: false }, RectangleFamily::DyadicCentered] {
            let a = ap_star_characteristic(&w, p, &family).unwrap();
            let b = ap_star_characteristic(&w, p + 0.5, &family).unwrap();
            prop_assert!(a >= 1.0 - 1e-12);
            prop_assert!(b <= a * (1.0 + 1e-12));
        }
    }

    #[test]
    fn bmo_ignores_constants(f in values(-2.0, 2.0), c in -3.0f64..3.0, shift in -5.0f64..5.0) {
        let family = RectangleFamily::DyadicSides { aligned: true };
        let base = bmo_norm(&f, &family).unwrap();
        let moved = f.scale(c).unwrap().map(|v| v + shift).unwrap();
        prop_assert!(close(bmo_norm(&moved, &family).unwrap(), c.abs() * base, 1e-9));
    }

    #[test]
    fn reports_round_trip(rows in prop::collection::vec((-1e3f64..1e3, -1e3f64..1e3, any::<bool>()), 0..12)) {
        let run = SuiteRun::new(grid(), ExponentParams::new(0.25, 2.0, 2.0, 0.5).unwrap(), Suite::default_for("cz_comm").unwrap());
        let trials: Vec<Trial> = rows
            .iter()
            .enumerate()
            .map(|(i, (l, r, curve))| {
                let t = Trial::new(i, format!("t{i}"), *l, if i % 5 == 4 { 0.0 } else { *r });
                if *curve { t.at(*l, f64::NEG_INFINITY) } else { t }
            })
            .collect();
        let rep = InequalityReport::new(run, trials, vec![], vec![], vec![], vec!["note".into()]);
        let back = InequalityReport::from_json(&rep.to_json()).unwrap();
        prop_assert_eq!(back.to_json(), rep.to_json());
    }
}
