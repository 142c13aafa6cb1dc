//! Properties of groupoids, forms and Čech–de Rham cochains over random data.

use gerbe_core::deligne::{
    cech_delta, coboundary_triviality, total_coboundary_gerbe, total_coboundary_line, verify_gerbe, verify_line,
    VerifyOptions,
};
use gerbe_core::form::{parse_expr, AffineMap, Env, PForm, Var};
use gerbe_core::group::{small_groups, FiniteGroup};
use gerbe_core::groupoid::inertia::{fixed_set, inertia, is_fixed};
use gerbe_core::groupoid::{ActionGroupoid, Arrow, FixedSet, Groupoid};
use gerbe_core::random::*;
use gerbe_core::sectors::h2_finite_group;
use num_complex::Complex64;
use num_rational::Rational64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn point(rng: &mut ChaCha8Rng, dim: usize) -> Vec<f64> {
    (0..dim).map(|_| rng.gen::<f64>()).collect()
}

fn vector(rng: &mut ChaCha8Rng, dim: usize) -> Vec<f64> {
    (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect()
}

fn mat_mul(a: &[Vec<i64>], b: &[Vec<i64>]) -> Vec<Vec<i64>> {
    (0..a.len())
        .map(|i| (0..b[0].len()).map(|j| (0..b.len()).map(|k| a[i][k] * b[k][j]).sum()).collect())
        .collect()
}

/// `D₄` acting on `T²` from the right: `r^a s^b` acts by `(R^a S^b)⁻¹ = S^b R^{−a}`.
fn dihedral_torus() -> ActionGroupoid {
    let group = FiniteGroup::dihedral(4, "D4");
    let r_inv = vec![vec![0, 1], vec![-1, 0]];
    let s = vec![vec![1, 0], vec![0, -1]];
    let mut maps = Vec::new();
    for k in 0..8 {
        let (a, b) = (k / 2, k % 2);
        let mut m = vec![vec![1, 0], vec![0, 1]];
        if b == 1 {
            m = mat_mul(&m, &s);
        }
        for _ in 0..a {
            m = mat_mul(&m, &r_inv);
        }
        maps.push(AffineMap::linear(m).unwrap());
    }
    ActionGroupoid::on_torus(group, 2, maps).unwrap()
}

/// `ℤ/4` rotating `T²` about `(1/2, 0)`.
fn rotation_torus() -> ActionGroupoid {
    let rot = vec![vec![0, -1], vec![1, 0]];
    let half = Rational64::new(1, 2);
    let mut maps = vec![AffineMap::identity(2)];
    let step = AffineMap::new(rot, vec![half, half]).unwrap();
    for k in 1..4 {
        let prev: &AffineMap = &maps[k - 1];
        maps.push(prev.then(&step));
    }
    ActionGroupoid::on_torus(FiniteGroup::cyclic(4), 2, maps).unwrap()
}

/// `S₃` permuting three points from the right, plus a fixed fourth point.
fn s3_points() -> ActionGroupoid {
    let g = FiniteGroup::s3();
    // left action of r^a s^b on ℤ/3 is y ↦ ±y + a; the right action uses g⁻¹
    let left = |k: usize, y: usize| {
        let (a, b) = (k / 2, k % 2);
        let y = if b == 1 { (3 - y) % 3 } else { y };
        (y + a) % 3
    };
    let perms = (0..6)
        .map(|k| (0..4).map(|x| if x == 3 { 3 } else { left(g.inv(k), x) }).collect())
        .collect();
    let pts = (0..4).map(|i| format!("p{}", i)).collect();
    ActionGroupoid::on_points(g, pts, perms).unwrap()
}

fn action_backends() -> Vec<ActionGroupoid> {
    vec![
        ActionGroupoid::reflection_torus(2),
        rotation_torus(),
        dihedral_torus(),
        s3_points(),
        ActionGroupoid::trivial_on_points(FiniteGroup::parse("Z/2xZ/2").unwrap(), 2),
    ]
}

fn random_arrow(rng: &mut ChaCha8Rng, g: &Groupoid, comp: usize, x: Vec<f64>) -> Arrow {
    let labels = g.labels(comp);
    Arrow {
        comp,
        x,
        label: labels[rng.gen_range(0..labels.len())],
    }
}

fn same_arrow(g: &Groupoid, a: &Arrow, b: &Arrow) -> bool {
    a.comp == b.comp && a.label == b.label && g.point_distance(&a.x, &b.x) < 1e-9
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn groupoid_axioms_on_sampled_triples(seed in any::<u64>()) {
        let mut r = rng(seed);
        for x in action_backends() {
            let g = Groupoid::Action(x);
            let comp = r.gen_range(0..g.components());
            let p = point(&mut r, g.dim());
            let a = random_arrow(&mut r, &g, comp, p);
            let (c1, x1) = g.target(&a);
            let b = random_arrow(&mut r, &g, c1, x1);
            let (c2, x2) = g.target(&b);
            let c = random_arrow(&mut r, &g, c2, x2);

            let left = g.compose_arrows(&g.compose_arrows(&a, &b).unwrap(), &c).unwrap();
            let right = g.compose_arrows(&a, &g.compose_arrows(&b, &c).unwrap()).unwrap();
            prop_assert!(same_arrow(&g, &left, &right));

            let id = g.identity_arrow(a.comp, &a.x);
            prop_assert!(same_arrow(&g, &g.compose_arrows(&id, &a).unwrap(), &a));
            let (tc, tx) = g.target(&a);
            prop_assert!(same_arrow(&g, &g.compose_arrows(&a, &g.identity_arrow(tc, &tx)).unwrap(), &a));

            let loop_back = g.compose_arrows(&a, &g.inverse_arrow(&a)).unwrap();
            prop_assert!(g.is_identity_label(loop_back.comp, loop_back.label));
            prop_assert!(g.point_distance(&loop_back.x, &a.x) < 1e-9);
        }
    }

    #[test]
    fn fixed_sets_are_fixed(seed in any::<u64>()) {
        let mut r = rng(seed);
        for x in action_backends() {
            for h in x.group().elements() {
                match fixed_set(&x, h) {
                    FixedSet::Points(ps) => {
                        for p in ps {
                            prop_assert_eq!(x.perms()[h][p], p);
                        }
                    }
                    FixedSet::Torus { components, .. } => {
                        for c in &components {
                            let y = c.sample(&mut r);
                            prop_assert!(is_fixed(&x, h, &y), "{:?} not fixed by {}", y, h);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn inertia_arrows_land_in_conjugate_fixed_sets(seed in any::<u64>()) {
        let mut r = rng(seed);
        for x in action_backends() {
            let ig = inertia(&x).unwrap();
            let group = x.group();
            for (i, o) in ig.objects.iter().enumerate() {
                prop_assert_eq!(ig.arrows_from(i).count(), group.order());
                for a in ig.arrows_from(i) {
                    let t = &ig.objects[a.target];
                    prop_assert_eq!(t.g, group.conj(o.g, a.alpha));
                    if let FixedSet::Torus { components, .. } = &ig.fixed_sets[o.g] {
                        let y = x.map(a.alpha).apply(&components[o.part].sample(&mut r));
                        prop_assert!(is_fixed(&x, t.g, &y));
                        let FixedSet::Torus { components: tc, .. } = &ig.fixed_sets[t.g] else { unreachable!() };
                        let y: Vec<f64> = y.iter().map(|v| v.rem_euclid(1.0)).collect();
                        prop_assert_eq!(ig.fixed_sets[t.g].component_of(&y), Some(t.part));
                        prop_assert!(t.part < tc.len());
                    } else {
                        prop_assert_eq!(t.part, x.target_comp(o.part, a.alpha));
                    }
                }
            }
        }
    }

    #[test]
    fn exterior_derivative_squares_to_zero(seed in any::<u64>(), dim in 1usize..=3) {
        let mut r = rng(seed);
        let f = PForm::scalar(parse_expr(&random_trig(&mut r, dim, 3, 1.0)).unwrap(), dim);
        let w = random_one_form(&mut r, dim);
        let x = point(&mut r, dim);
        if dim >= 2 {
            let vs: Vec<Vec<f64>> = (0..2).map(|_| vector(&mut r, dim)).collect();
            let dd = f.exterior_d().exterior_d();
            prop_assert!(dd.eval(&x, &vs).unwrap().norm() < 1e-8);
        }
        if dim >= 3 {
            let vs: Vec<Vec<f64>> = (0..3).map(|_| vector(&mut r, dim)).collect();
            let dd = w.exterior_d().exterior_d();
            prop_assert!(dd.eval(&x, &vs).unwrap().norm() < 1e-8);
        }
    }

    #[test]
    fn pullback_commutes_with_d(seed in any::<u64>(), k in -2i64..=2, p in 0i64..4) {
        let mut r = rng(seed);
        let map = AffineMap::new(vec![vec![1, k], vec![0, -1]], vec![Rational64::new(p, 4), Rational64::new(1, 3)]).unwrap();
        let w = random_one_form(&mut r, 2);
        let lhs = w.pullback(&map).unwrap().exterior_d();
        let rhs = w.exterior_d().pullback(&map).unwrap();
        let x = point(&mut r, 2);
        let vs = vec![vector(&mut r, 2), vector(&mut r, 2)];
        let diff = lhs.eval(&x, &vs).unwrap() - rhs.eval(&x, &vs).unwrap();
        prop_assert!(diff.norm() < 1e-9, "{}", diff);

        // f*w at x pairs v with w(f(x)) on the linear image of v
        let v = vector(&mut r, 2);
        let direct = w.eval(&map.apply(&x), &[map.apply_linear(&v)]).unwrap();
        let pulled = w.pullback(&map).unwrap().eval(&x, &[v]).unwrap();
        prop_assert!((direct - pulled).norm() < 1e-9);
    }

    #[test]
    fn symbolic_partials_match_central_differences(seed in any::<u64>(), dim in 1usize..=3) {
        let mut r = rng(seed);
        let e = parse_expr(&random_trig(&mut r, dim, 3, 1.0)).unwrap();
        let u = random_unit_expr(&mut r, dim);
        let x = point(&mut r, dim);
        let h = 1e-5;
        for f in [&e, &u] {
            for i in 0..dim {
                let mut xp = x.clone();
                let mut xm = x.clone();
                xp[i] += h;
                xm[i] -= h;
                let fd = (f.eval(&Env::at(&xp)) - f.eval(&Env::at(&xm))) / (2.0 * h);
                let sym = f.diff(Var::X(i)).eval(&Env::at(&x));
                prop_assert!((fd - sym).norm() < 1e-5 * (1.0 + sym.norm()), "{} vs {}", fd, sym);
            }
        }
    }

    #[test]
    fn form_evaluation_alternates(seed in any::<u64>()) {
        let mut r = rng(seed);
        let a = random_one_form(&mut r, 3);
        let b = random_one_form(&mut r, 3);
        let c = random_one_form(&mut r, 3);
        let two = a.wedge(&b).unwrap();
        let three = two.wedge(&c).unwrap();
        let x = point(&mut r, 3);
        let (u, v, w) = (vector(&mut r, 3), vector(&mut r, 3), vector(&mut r, 3));
        let ev = |f: &PForm, vs: &[Vec<f64>]| f.eval(&x, vs).unwrap();
        let close = |p: Complex64, q: Complex64| (p - q).norm() < 1e-9 * (1.0 + p.norm());
        prop_assert!(close(ev(&two, &[u.clone(), v.clone()]), -ev(&two, &[v.clone(), u.clone()])));
        prop_assert!(ev(&two, &[u.clone(), u.clone()]).norm() < 1e-12);
        let uvw = ev(&three, &[u.clone(), v.clone(), w.clone()]);
        prop_assert!(close(uvw, -ev(&three, &[v.clone(), u.clone(), w.clone()])));
        prop_assert!(close(uvw, -ev(&three, &[u.clone(), w.clone(), v.clone()])));
        prop_assert!(close(uvw, ev(&three, &[v, w, u])));
    }

    #[test]
    fn cech_delta_squares_to_one_exactly(seed in any::<u64>(), level in 0usize..=2) {
        let mut r = rng(seed);
        for x in [ActionGroupoid::trivial_on_points(FiniteGroup::parse("Z/2xZ/2").unwrap(), 1), s3_points()] {
            let g = Groupoid::Action(x);
            let f = random_function(&mut r, &g, level);
            let dd = cech_delta(&g, &cech_delta(&g, &f));
            for key in g.nerve_keys(level + 2) {
                let v = dd.eval(&key, &[]);
                prop_assert!(v.is_exact());
                prop_assert_eq!(v.distance_to_one(), 0.0, "{}", g.describe_key(&key));
            }
        }
    }

    #[test]
    fn cech_delta_squares_to_one_on_tori(seed in any::<u64>(), level in 0usize..=1) {
        let mut r = rng(seed);
        let g = circle_backend();
        let f = random_function(&mut r, &g, level);
        let dd = cech_delta(&g, &cech_delta(&g, &f));
        for key in g.nerve_keys(level + 2) {
            let x = g.sample_base(&key, &mut r, 1e-3).unwrap();
            prop_assert!(dd.eval(&key, &x).distance_to_one() < 1e-10);
        }
    }

    #[test]
    fn total_coboundary_twice_is_trivial(seed in any::<u64>()) {
        let mut r = rng(seed);
        for g in [point_backend(), circle_backend(), torus_backend()] {
            let c = random_line_cochain(&mut r, &g);
            let dd = total_coboundary_gerbe(&g, &total_coboundary_line(&g, &c));
            let opts = VerifyOptions { seed: r.gen(), ..VerifyOptions::default() };
            let rep = coboundary_triviality(&g, &dd, &opts);
            prop_assert!(rep.pass(), "{:?}", rep.failures().collect::<Vec<_>>());
        }
    }

    #[test]
    fn generated_cocycles_verify(seed in any::<u64>(), class in 0u64..2) {
        let mut r = rng(seed);
        let opts = VerifyOptions { seed: r.gen(), ..VerifyOptions::default() };
        for g in [point_backend(), circle_backend(), torus_backend()] {
            let line = random_line_cocycle(&mut r, &g);
            prop_assert!(verify_line(&g, &line, &opts).unwrap().pass());
            let gerbe = random_gerbe_cocycle(&mut r, &g, None);
            prop_assert!(verify_gerbe(&g, &gerbe, &opts).unwrap().pass());
        }
        let group = FiniteGroup::parse("Z/2xZ/2").unwrap();
        let eps = h2_finite_group(&group).unwrap().class_representative(&group, &[class]);
        let g = point_backend();
        let gerbe = random_gerbe_cocycle(&mut r, &g, Some(&eps));
        let rep = verify_gerbe(&g, &gerbe, &opts).unwrap();
        prop_assert!(rep.pass());
        prop_assert!(rep.checks.iter().all(|c| c.exact));
    }

    #[test]
    fn nerve_has_m_times_g_to_the_k_points(k in 0usize..=3, n in 1usize..=3, which in 0usize..8) {
        let groups = small_groups();
        let group = groups[which % groups.len()].clone();
        let order = group.order();
        let g = Groupoid::Action(ActionGroupoid::trivial_on_points(group, n));
        let count = g.enumerate_nerve(k, 1 << 20).unwrap().len();
        prop_assert_eq!(count, n * order.pow(k as u32));
    }
}

#[test]
fn permuted_points_nerve_count() {
    let g = Groupoid::Action(s3_points());
    for k in 0..=3 {
        assert_eq!(g.enumerate_nerve(k, 1 << 20).unwrap().len(), 4 * 6usize.pow(k as u32));
    }
}
