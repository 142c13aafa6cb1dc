//! The acceptance suites: seeded, self-contained checks of the cocycle,
//! holonomy, transgression, sector and quadrature identities.

use num_complex::Complex64;
use num_rational::Rational64;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::deligne::{gauge_coboundary, DeligneError, GerbeData};
use crate::form::{parse_expr, PForm};
use crate::group::{small_groups, FiniteGroup};
use crate::groupoid::{ActionGroupoid, Groupoid};
use crate::loopspace::quadrature::simpson;
use crate::loopspace::{
    build_loop_arrow, compose_loop_arrows, constant_loop, integrate_along, refine_loop, refine_loop_arrow, twisted_loop,
    Carrier, LoopArrow, LoopError, LoopTangent, Partition, Quadrature, SegmentedLoop,
};
use crate::random::*;
use crate::report::{Check, Report, Worst};
use crate::scalar::Scalar;
use crate::sectors::schur::brute_force_order_four;
use crate::sectors::{
    check_inner_local_system, constant_loop_agreement, h2_finite_group, restrict_to_inertia, schur_oracle, torsion_gerbe,
    LocalOptions, SectorError, TorsionCocycle,
};
use crate::transgression::{
    check_commutation_square, connection_mismatch, delta_eval, f_eval, tau2_build, tau_n_flat_eval, HolonomyMap,
    SquareOptions, SquareSamples, TransgressionError,
};

#[derive(Debug, Error)]
pub enum SuiteError {
    #[error("no criterion {0}")]
    Unknown(usize),
    #[error(transparent)]
    Deligne(#[from] DeligneError),
    #[error(transparent)]
    Loop(#[from] LoopError),
    #[error(transparent)]
    Transgression(#[from] TransgressionError),
    #[error(transparent)]
    Sector(#[from] SectorError),
}

/// Identifier, title and runtime budget in seconds.
pub struct Criterion {
    pub id: usize,
    pub title: &'static str,
    pub budget: f64,
}

pub const CRITERIA: [Criterion; 11] = [
    Criterion { id: 1, title: "holonomy is invariant under loop arrows", budget: 10.0 },
    Criterion { id: 2, title: "holonomy of a gauge coboundary is 1", budget: 5.0 },
    Criterion { id: 3, title: "refinement invariance of H and F", budget: 5.0 },
    Criterion { id: 4, title: "F is multiplicative", budget: 20.0 },
    Criterion { id: 5, title: "connection identity by finite differences", budget: 30.0 },
    Criterion { id: 6, title: "transgression commutes with the coboundary", budget: 30.0 },
    Criterion { id: 7, title: "discrete torsion end to end", budget: 1.0 },
    Criterion { id: 8, title: "restricted systems are inner local systems", budget: 30.0 },
    Criterion { id: 9, title: "Schur multipliers match enumeration", budget: 60.0 },
    Criterion { id: 10, title: "flat transgression in higher degree", budget: 30.0 },
    Criterion { id: 11, title: "Simpson quadrature accuracy and order", budget: 5.0 },
];

pub const DEFAULT_SEED: u64 = 20_240_601;

pub fn run_criterion(id: usize, seed: u64) -> Result<Report, SuiteError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (id as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15));
    match id {
        1 => holonomy_invariance(&mut rng),
        2 => gauge_annihilation(&mut rng),
        3 => refinement(&mut rng),
        4 => multiplicativity(&mut rng),
        5 => connection_identity(&mut rng),
        6 => commutation_square(&mut rng),
        7 => discrete_torsion(),
        8 => inner_local_systems(&mut rng),
        9 => schur_multipliers(),
        10 => flat_higher(&mut rng),
        11 => quadrature_order(),
        _ => Err(SuiteError::Unknown(id)),
    }
}

fn backend_name(g: &Groupoid) -> &'static str {
    match g.dim() {
        0 => "pt/Z2xZ2",
        1 => "T1/Z2",
        _ => "T2/Z2",
    }
}

fn segments<R: Rng>(rng: &mut R) -> usize {
    rng.gen_range(1..=3)
}

fn holonomy_invariance(rng: &mut ChaCha8Rng) -> Result<Report, SuiteError> {
    let mut report = Report::new();
    for g in [point_backend(), circle_backend()] {
        let mut arrows = Vec::new();
        for _ in 0..50 {
            let n = segments(rng);
            let lp = random_loop(rng, &g, n)?;
            arrows.push(random_loop_arrow(rng, &g, &lp)?);
        }
        let mut w = Worst::new();
        for d in 0..50 {
            let h = HolonomyMap {
                data: random_line_cocycle(rng, &g),
                quad: Quadrature::default(),
            };
            for (a, l) in arrows.iter().enumerate() {
                let r = h.delta(l)?;
                w.record(r.distance_to_one(), r.is_exact(), || format!("line data #{}, loop arrow #{}", d, a));
            }
        }
        report.push(w.into_check(&format!("delta H = 1 on {}", backend_name(&g)), 1e-8));
    }
    Ok(report)
}

fn gauge_annihilation(rng: &mut ChaCha8Rng) -> Result<Report, SuiteError> {
    let mut report = Report::new();
    for g in [point_backend(), circle_backend()] {
        let mut w = Worst::new();
        for d in 0..20 {
            let f = random_function(rng, &g, 0);
            let h = HolonomyMap {
                data: gauge_coboundary(&g, &f)?,
                quad: Quadrature::default(),
            };
            for j in 0..5 {
                let n = segments(rng);
                let lp = random_loop(rng, &g, n)?;
                let v = h.eval(&lp)?;
                w.record(v.distance_to_one(), v.is_exact(), || format!("gauge #{}, loop #{}", d, j));
            }
        }
        report.push(w.into_check(&format!("tau1(D f) = 1 on {}", backend_name(&g)), 1e-8));
    }
    Ok(report)
}

/// Five random break points in `(1/97)ℤ` not already in the partition.
fn new_points<R: Rng>(rng: &mut R, p: &Partition) -> Vec<Rational64> {
    let mut cand: Vec<Rational64> = (1..97)
        .map(|k| Rational64::new(k, 97))
        .filter(|r| !p.points().contains(r))
        .collect();
    cand.shuffle(rng);
    cand.truncate(5);
    cand
}

fn refinement(rng: &mut ChaCha8Rng) -> Result<Report, SuiteError> {
    let quad = Quadrature::Adaptive { n0: 256, target: 1e-12 };
    let mut report = Report::new();
    for g in [point_backend(), circle_backend()] {
        let mut wh = Worst::new();
        let mut wf = Worst::new();
        for j in 0..20 {
            let n = segments(rng);
            let lp = random_loop(rng, &g, n)?;
            let pts = new_points(rng, &lp.partition);
            let h = HolonomyMap {
                data: random_line_cocycle(rng, &g),
                quad,
            };
            let before = h.eval(&lp)?;
            let after = h.eval(&refine_loop(&g, &lp, &pts)?)?;
            wh.record(after.ratio_residual(&before), after.is_exact() && before.is_exact(), || format!("loop #{}", j));
            let b = tau2_build(&random_gerbe_cocycle(rng, &g, None), quad);
            let l = random_loop_arrow(rng, &g, &lp)?;
            let before = b.f(&l)?;
            let after = b.f(&refine_loop_arrow(&g, &l, &pts)?)?;
            wf.record(after.ratio_residual(&before), after.is_exact() && before.is_exact(), || format!("loop arrow #{}", j));
        }
        report.push(wh.into_check(&format!("H refinement invariant on {}", backend_name(&g)), 1e-9));
        report.push(wf.into_check(&format!("F refinement invariant on {}", backend_name(&g)), 1e-9));
    }
    Ok(report)
}

fn klein_torsion() -> TorsionCocycle {
    let g = FiniteGroup::parse("Z/2xZ/2").expect("group spec");
    let angles = g
        .elements()
        .map(|a| {
            let ca = g.coords(a).expect("product group");
            g.elements()
                .map(|b| Rational64::new((ca[0] * g.coords(b).expect("product group")[1]) as i64, 2))
                .collect()
        })
        .collect();
    TorsionCocycle::from_angles(&g, angles).expect("bilinear form is a cocycle")
}

fn multiplicativity(rng: &mut ChaCha8Rng) -> Result<Report, SuiteError> {
    let quad = Quadrature::Adaptive { n0: 256, target: 1e-11 };
    let eps = klein_torsion();
    let mut report = Report::new();
    for (g, torsion) in [(point_backend(), Some(&eps)), (torus_backend(), None)] {
        let mut w = Worst::new();
        for j in 0..50 {
            let b = tau2_build(&random_gerbe_cocycle(rng, &g, torsion), quad);
            let n = segments(rng);
            let (l, o) = random_composable_pair(rng, &g, n)?;
            let d = b.multiplicativity_defect(&g, &l, &o)?;
            w.record(d.distance_to_one(), d.is_exact(), || format!("pair #{}", j));
        }
        report.push(w.into_check(&format!("delta F = 1 on {}", backend_name(&g)), 1e-8));
    }
    Ok(report)
}

/// Steps of the connection test and the required improvement.
pub const FD_STEPS: (f64, f64) = (1e-3, 5e-4);
pub const FD_TOL: f64 = 1e-4;
pub const FD_RATIO: f64 = 4.0;
/// Allowed shortfall of the observed ratio below the asymptotic value 4.
pub const FD_RATIO_SLACK: f64 = 0.05;
/// Mismatches below this are at the quadrature floor and carry no rate.
pub const FD_FLOOR: f64 = 1e-10;

fn connection_identity(rng: &mut ChaCha8Rng) -> Result<Report, SuiteError> {
    let quad = Quadrature::Fixed(2048);
    let mut coarse = Worst::new();
    let mut rate = Worst::new();
    let mut strict = 0;
    let mut measured = 0;
    let mut min_ratio = f64::INFINITY;
    for j in 0..20 {
        let g = if j % 2 == 0 { circle_backend() } else { torus_backend() };
        let b = tau2_build(&random_gerbe_cocycle(rng, &g, None), quad);
        let n = rng.gen_range(2..=3);
        let fam = random_family(rng, &g, n, 0.01)?;
        let m1 = connection_mismatch(&g, &b, &fam, FD_STEPS.0)?;
        let m2 = connection_mismatch(&g, &b, &fam, FD_STEPS.1)?;
        coarse.record(m1, false, || format!("family #{} on {}", j, backend_name(&g)));
        if m2 < FD_FLOOR {
            rate.record(0.0, false, String::new);
            continue;
        }
        let ratio = m1 / m2;
        measured += 1;
        min_ratio = min_ratio.min(ratio);
        if ratio >= FD_RATIO {
            strict += 1;
        }
        rate.record((FD_RATIO - ratio).max(0.0), false, || {
            format!("family #{} on {}: ratio {:.6}", j, backend_name(&g), ratio)
        });
    }
    let mut report = Report::new();
    report.push(coarse.into_check("|dlog F + delta Delta| at step 1e-3", FD_TOL));
    let mut c = rate.into_check("improvement at step 5e-4 (4 - ratio)", FD_RATIO_SLACK);
    c.witness = Some(format!(
        "{}; min ratio {:.6}, ratio >= 4 in {}/{} measured families",
        c.witness.unwrap_or_else(|| "no shortfall".into()),
        min_ratio,
        strict,
        measured
    ));
    report.push(c);
    Ok(report)
}

fn commutation_square(rng: &mut ChaCha8Rng) -> Result<Report, SuiteError> {
    let mut report = Report::new();
    let g = point_backend();
    let line = random_line_cochain(rng, &g);
    let mut arrows = Vec::new();
    for _ in 0..30 {
        let n = segments(rng);
        let lp = random_loop(rng, &g, n)?;
        arrows.push(random_loop_arrow(rng, &g, &lp)?);
    }
    let r = check_commutation_square(&g, &line, &SquareSamples { arrows, families: Vec::new() }, &SquareOptions::default())?;
    for mut c in r.checks {
        c.name = format!("{} on {}", c.name, backend_name(&g));
        report.push(c);
    }
    for g in [circle_backend(), torus_backend()] {
        let line = random_line_cochain(rng, &g);
        let mut arrows = Vec::new();
        let mut families = Vec::new();
        for _ in 0..10 {
            let n = segments(rng);
            let lp = random_loop(rng, &g, n)?;
            arrows.push(random_loop_arrow(rng, &g, &lp)?);
            let n = segments(rng);
            families.push(random_family(rng, &g, n, 0.01)?);
        }
        let r = check_commutation_square(&g, &line, &SquareSamples { arrows, families }, &SquareOptions::default())?;
        for mut c in r.checks {
            c.name = format!("{} on {}", c.name, backend_name(&g));
            report.push(c);
        }
    }
    Ok(report)
}

fn discrete_torsion() -> Result<Report, SuiteError> {
    let eps = klein_torsion();
    let group = eps.group().clone();
    let pt = Groupoid::Action(ActionGroupoid::trivial_on_points(group.clone(), 1));
    let torus = Groupoid::Action(ActionGroupoid::trivial_on_torus(group.clone(), 1));
    let quad = Quadrature::default();
    let mut report = Report::new();
    for (x, carrier) in [(&pt, Carrier::Param(Vec::new())), (&torus, Carrier::Param(vec![parse_expr("t + 0.2 + 0.1*sin(2*pi*t)").expect("parses")]))] {
        let gerbe = torsion_gerbe(&eps, x)?;
        let mut w = Worst::new();
        let mut zero = Worst::new();
        for a in group.elements() {
            let lp = twisted_loop(x, carrier.clone(), a)?;
            for k in group.elements() {
                let l = build_loop_arrow(x, &lp, vec![k])?;
                let f = f_eval(&gerbe, &l, quad)?;
                let expected = eps.value(a, k).div(eps.value(k, a));
                let ok = f == expected;
                w.record(if ok { 0.0 } else { f.ratio_residual(&expected).max(f64::MIN_POSITIVE) }, true, || {
                    format!("g = {}, k = {}: {} vs {}", group.name(a), group.name(k), f, expected)
                });
            }
            if x.dim() > 0 {
                let xi = LoopTangent {
                    fields: vec![Carrier::Param(vec![parse_expr("0.3 + cos(2*pi*t)").expect("parses")])],
                };
                let d = delta_eval(x, &gerbe, &lp, &xi, quad)?;
                zero.record(d.norm(), d == Complex64::new(0.0, 0.0), || format!("g = {}", group.name(a)));
            }
        }
        let name = if x.dim() == 0 { "pt/Z2xZ2" } else { "T1 with trivial Z2xZ2 action" };
        report.push(w.into_check(&format!("F = eps(g,k)/eps(k,g) on {}", name), 0.0));
        if x.dim() > 0 {
            report.push(zero.into_check(&format!("Delta = 0 on {}", name), 0.0));
        }
    }
    Ok(report)
}

fn inner_local_systems(rng: &mut ChaCha8Rng) -> Result<Report, SuiteError> {
    let mut merged: Vec<(String, Worst)> = Vec::new();
    let mut absorb = |c: Check, context: &str| {
        let slot = match merged.iter_mut().position(|(n, _)| *n == c.name) {
            Some(i) => &mut merged[i].1,
            None => {
                merged.push((c.name.clone(), Worst::new()));
                &mut merged.last_mut().expect("just pushed").1
            }
        };
        let witness = format!("{}: {}", context, c.witness.clone().unwrap_or_default());
        slot.record(if c.pass { c.residual } else { c.residual.max(f64::MIN_POSITIVE) }, c.exact, || witness);
    };
    for group in small_groups() {
        let schur = h2_finite_group(&group)?;
        let mut classes = vec![TorsionCocycle::trivial(&group)];
        classes.extend(schur.representatives.iter().cloned());
        for (ci, eps) in classes.iter().enumerate() {
            let x = ActionGroupoid::trivial_on_points(group.clone(), 1);
            let b = tau2_build(&torsion_gerbe(eps, &Groupoid::Action(x.clone()))?, Quadrature::default());
            let ls = restrict_to_inertia(&x, &b)?;
            let ctx = format!("{} class #{}", group.label(), ci);
            for c in check_inner_local_system(&ls, &LocalOptions::default()).checks {
                absorb(c, &ctx);
            }
            absorb(constant_loop_agreement(&ls, &b, 0.0)?, &ctx);
        }
    }
    let mut report = Report::new();
    for (name, w) in merged {
        let mut c = w.into_check(&format!("{} (groups of order <= 8)", name), 0.0);
        // axioms on finite models are decided exactly
        if !c.exact {
            c.pass = false;
        }
        report.push(c);
    }
    let x = ActionGroupoid::reflection_torus(2);
    let g = Groupoid::Action(x.clone());
    let b = tau2_build(&random_gerbe_cocycle(rng, &g, None), Quadrature::default());
    let ls = restrict_to_inertia(&x, &b)?;
    let fixed = ls.inertia.fixed_sets[1].len();
    for mut c in check_inner_local_system(&ls, &LocalOptions::default()).checks {
        c.name = format!("{} on T2/Z2 ({} fixed points)", c.name, fixed);
        report.push(c);
    }
    Ok(report)
}

fn schur_multipliers() -> Result<Report, SuiteError> {
    let mut report = Report::new();
    let groups: Vec<FiniteGroup> = small_groups()
        .into_iter()
        .filter(|g| g.is_abelian() || g.label() == "S3")
        .collect();
    for g in &groups {
        let snf = h2_finite_group(g)?;
        let oracle = schur_oracle(g);
        let ok = snf.factors == oracle;
        report.push(Check::flag(
            &format!("H2({}) = {:?}", g.label(), snf.factors),
            ok,
            (!ok).then(|| format!("enumeration gives {:?}", oracle)),
        ));
    }
    for spec in ["Z/2xZ/2", "Z/4"] {
        let g = FiniteGroup::parse(spec).expect("group spec");
        let (cocycles, boundaries) = brute_force_order_four(&g);
        // universal coefficients for abelian G: |H²(G; ℤ/2)| = |G/2G| · |Hom(H₂, ℤ/2)|
        let squares: std::collections::BTreeSet<usize> = g.elements().map(|a| g.mul(a, a)).collect();
        let two_torsion: u64 = h2_finite_group(&g)?.factors.iter().map(|&s| if s % 2 == 0 { 2 } else { 1 }).product();
        let expected = (g.order() / squares.len()) as u64 * two_torsion;
        let ok = cocycles / boundaries == expected;
        report.push(Check::flag(
            &format!("brute force over all Z/2 cochains of {}: {} / {}", spec, cocycles, boundaries),
            ok,
            (!ok).then(|| format!("Smith form predicts {}", expected)),
        ));
    }
    Ok(report)
}

/// `δF₃ = F(Λ₂,Λ₃) F(Λ₁Λ₂,Λ₃)⁻¹ F(Λ₁,Λ₂Λ₃) F(Λ₁,Λ₂)⁻¹`.
fn delta_f3(g: &Groupoid, data: &crate::deligne::FlatNData, c: &[LoopArrow; 3], quad: Quadrature) -> Result<Scalar, SuiteError> {
    let l12 = compose_loop_arrows(g, &c[0], &c[1])?;
    let l23 = compose_loop_arrows(g, &c[1], &c[2])?;
    let f = |a: &LoopArrow, b: &LoopArrow| tau_n_flat_eval(g, data, &[a.clone(), b.clone()], quad);
    Ok(f(&c[1], &c[2])?
        .mul(f(&l12, &c[2])?.inv())
        .mul(f(&c[0], &l23)?)
        .mul(f(&c[0], &c[1])?.inv()))
}

/// Every loop on `[pt/G]` with one or two segments and every chain of three
/// loop arrows out of it.
fn exhaustive_chains(g: &Groupoid) -> Result<Vec<[LoopArrow; 3]>, SuiteError> {
    let n = g.group().expect("global quotient").order();
    let mut loops: Vec<SegmentedLoop> = (0..n).map(|c| constant_loop(g, 0, &[], c)).collect::<Result<_, _>>()?;
    let half = Partition::uniform(2);
    for c1 in 0..n {
        for c2 in 0..n {
            loops.push(crate::loopspace::build_loop(
                g,
                half.clone(),
                vec![
                    crate::loopspace::PathSegment::new(0, Carrier::Param(Vec::new())),
                    crate::loopspace::PathSegment::new(0, Carrier::Param(Vec::new())),
                ],
                vec![c1, c2],
            )?);
        }
    }
    let labelings = |len: usize| -> Vec<Vec<usize>> {
        (0..n.pow(len as u32))
            .map(|mut code| {
                (0..len)
                    .map(|_| {
                        let d = code % n;
                        code /= n;
                        d
                    })
                    .collect()
            })
            .collect()
    };
    let mut out = Vec::new();
    for lp in &loops {
        for k1 in labelings(lp.len()) {
            let a = build_loop_arrow(g, lp, k1)?;
            for k2 in labelings(lp.len()) {
                let b = build_loop_arrow(g, &a.target, k2)?;
                for k3 in labelings(lp.len()) {
                    let c = build_loop_arrow(g, &b.target, k3)?;
                    out.push([a.clone(), b.clone(), c]);
                }
            }
        }
    }
    Ok(out)
}

fn flat_higher(rng: &mut ChaCha8Rng) -> Result<Report, SuiteError> {
    let quad = Quadrature::default();
    let mut report = Report::new();
    let eps = klein_torsion();
    let pt = point_backend();
    let gerbe: GerbeData = torsion_gerbe(&eps, &pt)?.mul(&random_gerbe_cocycle(rng, &pt, None));
    let flat = gerbe.as_flat();
    let mut w = Worst::new();
    for j in 0..40 {
        let n = segments(rng);
        let lp = random_loop(rng, &pt, n)?;
        let l = random_loop_arrow(rng, &pt, &lp)?;
        let f = f_eval(&gerbe, &l, quad)?;
        let t = tau_n_flat_eval(&pt, &flat, std::slice::from_ref(&l), quad)?;
        let ok = f == t;
        w.record(if ok { 0.0 } else { f.ratio_residual(&t).max(f64::MIN_POSITIVE) }, true, || format!("loop arrow #{}", j));
    }
    report.push(w.into_check("tau_n at n = 2 equals F on torsion data", 0.0));

    let z2 = Groupoid::Action(ActionGroupoid::trivial_on_points(FiniteGroup::cyclic(2), 1));
    let chains = exhaustive_chains(&z2)?;
    let mut w = Worst::new();
    for d in 0..20 {
        let data = random_flat_cocycle(rng, &z2, 3);
        for (j, c) in chains.iter().enumerate() {
            let v = delta_f3(&z2, &data, c, quad)?;
            w.record(v.distance_to_one(), v.is_exact(), || format!("cocycle #{}, chain #{}", d, j));
        }
    }
    report.push(w.into_check(&format!("delta F3 = 1 on pt/Z2 ({} chains each)", chains.len()), 0.0));
    Ok(report)
}

fn quadrature_order() -> Result<Report, SuiteError> {
    let mut report = Report::new();
    let mut w = Worst::new();
    let paths = [
        Carrier::Param(vec![parse_expr("t").expect("parses")]),
        Carrier::Param(vec![parse_expr("t + 0.3*sin(2*pi*t)").expect("parses")]),
        Carrier::Param(vec![parse_expr("t^3").expect("parses")]),
    ];
    for c in [Complex64::new(1.0, 0.0), Complex64::new(-2.5, 0.75), Complex64::new(0.0, 3.0), Complex64::new(1e3, -1e-3)] {
        let form = PForm::constant_one_form(&[c]);
        for (pi, p) in paths.iter().enumerate() {
            let v = integrate_along(&form, p, (0.0, 1.0), Quadrature::default())?;
            w.record((v - c).norm(), false, || format!("c = {}, path #{}", c, pi));
        }
    }
    report.push(w.into_check("integral of c dx along paths from 0 to 1 equals c", 1e-9));
    let exact = 1f64.exp() - 1.0;
    let errors: Vec<f64> = [4, 8, 16, 32, 64]
        .iter()
        .map(|&n| (simpson(|t| Complex64::new(t.exp(), 0.0), 0.0, 1.0, n).expect("even count").re - exact).abs())
        .collect();
    let min_ratio = errors.windows(2).map(|e| e[0] / e[1]).fold(f64::INFINITY, f64::min);
    report.push(Check::new(
        "Simpson error ratio on halving (8 - min ratio)",
        (8.0 - min_ratio).max(0.0),
        0.0,
        false,
        errors.len(),
        Some(format!("errors {:?}, min ratio {:.3}", errors, min_ratio)),
    ));
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_criterion_is_an_error() {
        assert!(matches!(run_criterion(12, 0), Err(SuiteError::Unknown(12))));
    }

    #[test]
    fn torsion_suite_is_exact() {
        let r = run_criterion(7, DEFAULT_SEED).unwrap();
        assert!(r.pass(), "{}", r);
        assert!(r.checks.iter().all(|c| c.exact));
    }
}
