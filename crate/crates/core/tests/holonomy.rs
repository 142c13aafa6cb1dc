//! Properties of loops, holonomy and transgression over random data.

use gerbe_core::form::parse_expr;
use gerbe_core::group::FiniteGroup;
use gerbe_core::groupoid::Groupoid;
use gerbe_core::loopspace::{
    compose_loop_arrows, integrate_along, inverse_loop_arrow, is_identity, loop_distance, refine_loop, validate_loop,
    validate_tangent, Carrier, Quadrature,
};
use gerbe_core::random::*;
use gerbe_core::sectors::{constant_loop_agreement, h2_finite_group, restrict_to_inertia};
use gerbe_core::transgression::{tau2_build, HolonomyMap};
use gerbe_core::Scalar;
use num_rational::Rational64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn backends() -> Vec<Groupoid> {
    vec![point_backend(), circle_backend(), torus_backend()]
}

fn quad() -> Quadrature {
    Quadrature::default()
}

/// Path `p + q·T + c·sin(πT)` in each coordinate, with `T` a reparametrization of `t`.
fn path(coeffs: &[(f64, f64, f64)], reparam: &str) -> Carrier {
    Carrier::Param(
        coeffs
            .iter()
            .map(|(p, q, c)| parse_expr(&format!("({:.17}) + ({:.17})*{t} + ({:.17})*sin(pi*{t})", p, q, c, t = reparam)).unwrap())
            .collect(),
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn refinement_keeps_loops_valid_and_holonomy_fixed(seed in any::<u64>(), segments in 1usize..=3) {
        let mut r = rng(seed);
        for g in backends() {
            let lp = random_loop(&mut r, &g, segments).unwrap();
            prop_assert!(validate_loop(&g, &lp).is_ok());
            // odd multiples of 1/32 never collide with the generated break points
            let mut extra: Vec<i64> = (0..r.gen_range(1..=3)).map(|_| 2 * r.gen_range(0..16) + 1).collect();
            extra.sort();
            extra.dedup();
            let pts: Vec<Rational64> = extra.into_iter().map(|p| Rational64::new(p, 32)).collect();
            let fine = refine_loop(&g, &lp, &pts).unwrap();
            prop_assert!(validate_loop(&g, &fine).is_ok());
            prop_assert_eq!(fine.len(), lp.len() + pts.len());

            let hol = HolonomyMap { data: random_line_cocycle(&mut r, &g), quad: quad() };
            let (a, b) = (hol.eval(&lp).unwrap(), hol.eval(&fine).unwrap());
            prop_assert!(a.ratio_residual(&b) < 1e-8, "{:?} vs {:?}", a, b);
        }
    }

    #[test]
    fn composition_and_inverse_keep_arrows_valid(seed in any::<u64>(), segments in 1usize..=3) {
        let mut r = rng(seed);
        for g in backends() {
            let (l, o) = random_composable_pair(&mut r, &g, segments).unwrap();
            let lo = compose_loop_arrows(&g, &l, &o).unwrap();
            prop_assert!(validate_loop(&g, &lo.target).is_ok());
            prop_assert!(loop_distance(&g, &lo.source, &l.source) < 1e-10);
            prop_assert!(loop_distance(&g, &lo.target, &o.target) < 1e-9);
            let back = inverse_loop_arrow(&g, &l).unwrap();
            prop_assert!(validate_loop(&g, &back.target).is_ok());
            prop_assert!(is_identity(&g, &compose_loop_arrows(&g, &l, &back).unwrap()));
        }
    }

    #[test]
    fn integrals_are_additive_and_reparametrization_invariant(seed in any::<u64>(), cut in 0.05f64..0.95) {
        let mut r = rng(seed);
        let w = random_one_form(&mut r, 2);
        let coeffs: Vec<(f64, f64, f64)> = (0..2).map(|_| (r.gen_range(0.0..1.0), r.gen_range(-1.0..1.0), r.gen_range(-0.3..0.3))).collect();
        let straight = path(&coeffs, "t");
        let whole = integrate_along(&w, &straight, (0.0, 1.0), quad()).unwrap();
        let split = integrate_along(&w, &straight, (0.0, cut), quad()).unwrap() + integrate_along(&w, &straight, (cut, 1.0), quad()).unwrap();
        prop_assert!((whole - split).norm() < 1e-8 * (1.0 + whole.norm()));
        for reparam in ["(t*t)", "(t + (0.1)*sin(2*pi*t))"] {
            let slow = integrate_along(&w, &path(&coeffs, reparam), (0.0, 1.0), quad()).unwrap();
            prop_assert!((whole - slow).norm() < 1e-7 * (1.0 + whole.norm()), "{} vs {} ({})", whole, slow, reparam);
        }
    }

    #[test]
    fn family_slices_are_loop_arrows(seed in any::<u64>(), segments in 2usize..=3, s in -1.0f64..=1.0) {
        let mut r = rng(seed);
        let g = torus_backend();
        let radius = 0.1;
        let fam = random_family(&mut r, &g, segments, radius).unwrap();
        let slice = fam.slice(&g, &[s * radius]).unwrap();
        prop_assert!(validate_loop(&g, &slice.source).is_ok());
        prop_assert!(validate_loop(&g, &slice.target).is_ok());
        let base = fam.source_at(&g, &[0.0]).unwrap();
        prop_assert!(validate_tangent(&g, &base, &fam.source_tangent(0)).is_ok());
    }

    #[test]
    fn holonomy_is_a_homomorphism(seed in any::<u64>(), segments in 1usize..=3) {
        let mut r = rng(seed);
        for g in backends() {
            let (a, b) = (random_line_cochain(&mut r, &g), random_line_cochain(&mut r, &g));
            let lp = random_loop(&mut r, &g, segments).unwrap();
            let h = |data| HolonomyMap { data, quad: quad() }.eval(&lp).unwrap();
            let ab = h(a.mul(&b));
            let prod = h(a).mul(h(b));
            prop_assert!(ab.ratio_residual(&prod) < 1e-8);
            if g.dim() == 0 {
                prop_assert!(ab.is_exact());
                prop_assert_eq!(ab.ratio_residual(&prod), 0.0);
            }
        }
    }

    #[test]
    fn transgression_is_multiplicative(seed in any::<u64>(), segments in 1usize..=2) {
        let mut r = rng(seed);
        let group = FiniteGroup::parse("Z/2xZ/2").unwrap();
        let data = h2_finite_group(&group).unwrap();
        let eps = data.class_representative(&group, &[r.gen_range(0..2)]);
        for g in backends() {
            let gerbe = random_gerbe_cocycle(&mut r, &g, if g.dim() == 0 { Some(&eps) } else { None });
            let bundle = tau2_build(&gerbe, quad());
            let (l, o) = random_composable_pair(&mut r, &g, segments).unwrap();
            let defect = bundle.multiplicativity_defect(&g, &l, &o).unwrap();
            if g.dim() == 0 {
                prop_assert!(defect.is_exact());
                prop_assert_eq!(defect.distance_to_one(), 0.0);
            } else {
                prop_assert!(defect.distance_to_one() < 1e-7, "{:?}", defect);
            }
        }
    }

    #[test]
    fn restriction_matches_constant_loops(seed in any::<u64>()) {
        let mut r = rng(seed);
        let group = FiniteGroup::parse("Z/2xZ/2").unwrap();
        let eps = h2_finite_group(&group).unwrap().class_representative(&group, &[r.gen_range(0..2)]);
        for g in [point_backend(), circle_backend(), torus_backend()] {
            let x = g.as_action().unwrap().clone();
            let gerbe = random_gerbe_cocycle(&mut r, &g, if g.dim() == 0 { Some(&eps) } else { None });
            let bundle = tau2_build(&gerbe, quad());
            let ls = restrict_to_inertia(&x, &bundle).unwrap();
            let check = constant_loop_agreement(&ls, &bundle, 1e-8).unwrap();
            prop_assert!(check.pass, "{:?}", check);
        }
    }

    #[test]
    fn commutator_phase_is_an_alternating_bicharacter(seed in any::<u64>(), which in 0usize..3) {
        let mut r = rng(seed);
        let spec = ["Z/2xZ/2", "Z/4xZ/2", "Z/3xZ/3"][which];
        let group = FiniteGroup::parse(spec).unwrap();
        let data = h2_finite_group(&group).unwrap();
        let coords: Vec<u64> = data.factors.iter().map(|&n| r.gen_range(0..n)).collect();
        let eps = data.class_representative(&group, &coords);
        let n = group.order();
        let (a, b, k) = (r.gen_range(0..n), r.gen_range(0..n), r.gen_range(0..n));
        let c = |g, h| eps.commutator_phase(g, h);
        prop_assert_eq!(c(group.mul(a, b), k), c(a, k).mul(c(b, k)));
        prop_assert_eq!(c(k, group.mul(a, b)), c(k, a).mul(c(k, b)));
        prop_assert_eq!(c(a, a), Scalar::one());
        prop_assert_eq!(c(a, k).mul(c(k, a)), Scalar::one());
        // the class is read back from any representative
        prop_assert_eq!(data.class_of(&eps), coords);
    }
}

#[test]
fn z4_squared_has_multiplier_z4() {
    let group = FiniteGroup::parse("Z/4xZ/4").unwrap();
    let data = h2_finite_group(&group).unwrap();
    assert_eq!(data.factors, vec![4]);
    let eps = data.class_representative(&group, &[1]);
    assert!(eps.is_cocycle());
    assert_eq!(data.class_of(&eps), vec![1]);
    // class of order exactly four
    assert!(!eps.is_coboundary());
    assert!(!eps.mul(&eps).is_coboundary());
    assert!(eps.mul(&eps).mul(&eps).mul(&eps).is_coboundary());
    // the generator pairs the two factors through a primitive fourth root of unity
    let (x, y) = (group.element_by_name("(1,0)").unwrap(), group.element_by_name("(0,1)").unwrap());
    let c = eps.commutator_phase(x, y);
    assert!(c == Scalar::root(1, 4) || c == Scalar::root(3, 4), "{:?}", c);
}
