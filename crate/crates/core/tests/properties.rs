//! Property tests for the operators and the harmonicity classifier.

use almansi_core::almansi::{classify, radial_harmonic, Classification};
use almansi_core::expr::{
    evaluate, is_zero, parse, rational_from_f64, simplify, Assignment, Expr, Rational, ZeroTestConfig, ZeroVerdict,
};
use almansi_core::geometry::{catalog, Geometry};
use almansi_core::operators::{
    cartesian_laplacian, euler_pairing, iterated_laplacian, laplacian, laplacian_product_rule, radial_laplacian,
};
use almansi_core::verify::total_degree;
use proptest::prelude::*;

fn zero(e: &Expr, g: &Geometry) -> ZeroVerdict {
    is_zero(e, &g.zero_config(&ZeroTestConfig::default())).unwrap()
}

fn lap(e: &Expr, g: &Geometry) -> Expr {
    laplacian(&e.clone().into(), g).unwrap()
}

fn radial_families() -> Vec<Geometry> {
    vec![
        catalog("euclidean", &[3]).unwrap(),
        catalog("sphere", &[3]).unwrap(),
        catalog("hyperbolic", &[4]).unwrap(),
        catalog("spherical-join", &[3, 3]).unwrap(),
        catalog("hyperbolic-join", &[2, 3]).unwrap(),
    ]
}

fn flat_families() -> Vec<Geometry> {
    vec![Geometry::semi_euclidean(2, 0).unwrap(), Geometry::semi_euclidean(2, 1).unwrap()]
}

/// Radial functions built from a few smooth atoms with small integer weights.
fn radial_fn() -> impl Strategy<Value = Expr> {
    let atoms = ["1", "r", "r^2", "r^3", "sin(r)", "cos(2*r)", "exp(-r)", "r*cosh(r)", "ln(1 + r)"];
    prop::collection::vec((-3i64..=3, 0..atoms.len()), 1..4).prop_map(move |terms| {
        let text: Vec<String> = terms.iter().map(|(c, a)| format!("({c})*{}", atoms[*a])).collect();
        parse(&text.join(" + ")).unwrap()
    })
}

const MONOMIALS: [&str; 12] =
    ["1", "x1", "x2", "y1", "x1*x2", "x1^2", "y1^2", "x1*y1", "x2^3", "x1^2*y1", "x1*x2*y1^2", "x1^4*x2"];

/// Polynomials on `R^{2,1}`.
fn polynomial() -> impl Strategy<Value = Expr> {
    prop::collection::vec((-4i64..=4, 0..MONOMIALS.len()), 1..6).prop_map(|terms| {
        let text: Vec<String> = terms.iter().map(|(c, m)| format!("({c})*{}", MONOMIALS[*m])).collect();
        parse(&text.join(" + ")).unwrap()
    })
}

fn to_plane(e: &Expr) -> Expr {
    e.substitute("y1", &Expr::var("x2"))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    #[test]
    fn laplacian_is_linear_on_radial_families(f in radial_fn(), h in radial_fn(), a in -5i64..=5, b in -5i64..=5) {
        for g in radial_families() {
            let (a, b) = (Expr::int(a), Expr::int(b));
            let combined = lap(&(a.clone() * f.clone() + b.clone() * h.clone()), &g);
            let residual = combined - a * lap(&f, &g) - b * lap(&h, &g);
            let v = zero(&residual, &g);
            prop_assert!(v.is_zero(), "{g}: {v:?}");
        }
    }

    #[test]
    fn laplacian_is_linear_on_flat_families(f in polynomial(), h in polynomial(), a in -5i64..=5, b in -5i64..=5) {
        let g = Geometry::semi_euclidean(2, 1).unwrap();
        let (a, b) = (Expr::int(a), Expr::int(b));
        let combined = lap(&(a.clone() * f.clone() + b.clone() * h.clone()), &g);
        let residual = combined - a * lap(&f, &g) - b * lap(&h, &g);
        prop_assert_eq!(zero(&residual, &g), ZeroVerdict::ProvenZero);
    }

    #[test]
    fn product_rule_on_radial_families(f in radial_fn(), h in radial_fn()) {
        for g in radial_families() {
            let residual = lap(&(f.clone() * h.clone()), &g) - laplacian_product_rule(&f, &h, &g).unwrap();
            let v = zero(&residual, &g);
            prop_assert!(v.is_zero(), "{g}: {v:?}");
        }
    }

    #[test]
    fn product_rule_on_flat_families(f in polynomial(), h in polynomial()) {
        for g in flat_families() {
            let (f, h) = if g.coordinates().len() == 2 { (to_plane(&f), to_plane(&h)) } else { (f.clone(), h.clone()) };
            let residual = lap(&(f.clone() * h.clone()), &g) - laplacian_product_rule(&f, &h, &g).unwrap();
            prop_assert_eq!(zero(&residual, &g), ZeroVerdict::ProvenZero, "{}", g);
        }
    }

    #[test]
    fn degree_bound(f in polynomial()) {
        let g = Geometry::semi_euclidean(2, 1).unwrap();
        let d = total_degree(&f) as usize;
        let s = d / 2 + 1;
        let result = iterated_laplacian(&f.into(), &g, s).unwrap();
        prop_assert_eq!(zero(&result, &g), ZeroVerdict::ProvenZero);
    }

    #[test]
    fn euler_commutator_first_order(f in polynomial()) {
        let g = Geometry::semi_euclidean(2, 1).unwrap();
        let lf = lap(&f, &g);
        let residual = lap(&euler_pairing(&f, &g).unwrap(), &g) - Expr::int(2) * lf.clone() - euler_pairing(&lf, &g).unwrap();
        prop_assert_eq!(zero(&residual, &g), ZeroVerdict::ProvenZero);
    }

    #[test]
    fn classification_is_monotone(f in polynomial()) {
        let g = Geometry::semi_euclidean(2, 1).unwrap();
        let report = classify(&f.clone().into(), &g, 4, &ZeroTestConfig::default()).unwrap();
        if let Classification::ProperSHarmonic(s) = report.classification {
            prop_assert!(s <= total_degree(&f) as usize / 2 + 1);
            for k in 0..s {
                prop_assert_eq!(report.verdict(k).unwrap().kind(), "NonZero");
            }
        }
    }

    #[test]
    fn positive_expressions_are_never_zero(f in polynomial(), h in radial_fn(), c in 1i64..20) {
        let e = simplify(&(f.clone() * f + Expr::ratio(c, 10) + (h.substitute("r", &Expr::var("x1")) / Expr::int(10)).exp()));
        let g = Geometry::semi_euclidean(2, 1).unwrap();
        match zero(&e, &g) {
            ZeroVerdict::NonZero { witness, value } => {
                let v = evaluate(&e, &witness).unwrap();
                prop_assert_eq!(v, value);
                prop_assert!(v.abs() > ZeroTestConfig::default().tolerance);
            }
            other => prop_assert!(false, "{e}: {other:?}"),
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10))]

    #[test]
    fn flat_models_match_cartesian_laplacian(f in radial_fn(), r in 0.2f64..2.0, dir in prop::collection::vec(-1.0f64..1.0, 4)) {
        for m in 2..=4u32 {
            let model = catalog("euclidean", &[m]).unwrap();
            let flat = Geometry::semi_euclidean(m, 0).unwrap();
            let coords = flat.coordinates();
            let norm2 = Expr::sum(coords.iter().map(|v| Expr::var(v).powi(2)).collect());
            let lifted = f.substitute("r", &norm2.pow(Rational::new(1.into(), 2.into())));
            let cart = cartesian_laplacian(&lifted, &flat).unwrap();

            let u: Vec<f64> = dir[..m as usize].iter().map(|t| t + 1e-3).collect();
            let len = u.iter().map(|t| t * t).sum::<f64>().sqrt();
            let point: Assignment = coords.iter().zip(&u).map(|(v, t)| (v.clone(), r * t / len)).collect();
            let at_r: Assignment = [("r".to_string(), r)].into_iter().collect();
            let radial = evaluate(&radial_laplacian(&f, &model).unwrap(), &at_r).unwrap();
            let cartesian = evaluate(&cart, &point).unwrap();
            prop_assert!((radial - cartesian).abs() <= 1e-6 * radial.abs().max(1.0), "m={m} {radial} vs {cartesian}");
        }
    }

    #[test]
    fn euler_commutator_higher_orders(f in polynomial()) {
        let g = Geometry::semi_euclidean(2, 1).unwrap();
        for s in [2usize, 3] {
            let ls = iterated_laplacian(&f.clone().into(), &g, s).unwrap();
            let lhs = iterated_laplacian(&euler_pairing(&f, &g).unwrap().into(), &g, s).unwrap();
            let residual = lhs - Expr::int(2 * s as i64) * ls.clone() - euler_pairing(&ls, &g).unwrap();
            prop_assert_eq!(zero(&residual, &g), ZeroVerdict::ProvenZero);
        }
    }

    #[test]
    fn radial_harmonics_back_substitute(c in prop_oneof![-3.0f64..-0.25, 0.25f64..3.0]) {
        for g in radial_families() {
            let h = radial_harmonic(&g, c).unwrap();
            let residual = g.radial_weight().unwrap() * h.derivative() - Expr::constant(rational_from_f64(c).unwrap());
            let v = zero(&residual, &g);
            prop_assert!(v.is_zero(), "{g} c={c}: {v:?}");
        }
    }
}
