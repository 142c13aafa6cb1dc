//! Seeded generators of cocycles, loops, loop arrows and families on
//! action-groupoid backends.

use num_rational::Rational64;
use rand::seq::SliceRandom;
use rand::Rng;

use crate::deligne::{cech_delta, gauge_coboundary, total_coboundary_line, Cell, CochainFunction, FlatNData, FormCochain, GerbeData, LineData};
use crate::form::{parse_expr, Expr, PForm};
use crate::group::FiniteGroup;
use crate::groupoid::{ActionGroupoid, Groupoid, NerveKey};
use crate::loopspace::{build_loop, build_loop_arrow, Carrier, LoopArrow, LoopError, LoopFamily, PathSegment, Partition, SegmentedLoop};
use crate::scalar::Scalar;
use crate::sectors::{torsion_gerbe, TorsionCocycle};

/// Denominator of random exact phases.
pub const PHASE_DENOMINATOR: i64 = 12;

pub fn random_phase<R: Rng>(rng: &mut R) -> Scalar {
    Scalar::root(rng.gen_range(0..PHASE_DENOMINATOR), PHASE_DENOMINATOR)
}

fn num(v: f64) -> String {
    format!("({:.17})", v)
}

/// A real trigonometric polynomial in `x1 … xd` with small frequencies.
pub fn random_trig<R: Rng>(rng: &mut R, dim: usize, terms: usize, amp: f64) -> String {
    let mut out = vec![num(rng.gen_range(-amp..amp))];
    for _ in 0..terms {
        let mut arg = Vec::new();
        for i in 0..dim {
            let n: i32 = rng.gen_range(-1..=2);
            if n != 0 {
                arg.push(format!("{}*x{}", n, i + 1));
            }
        }
        if arg.is_empty() {
            arg.push(format!("x{}", rng.gen_range(1..=dim.max(1))));
        }
        let f = if rng.gen_bool(0.5) { "sin" } else { "cos" };
        out.push(format!("{}*{}(2*pi*({}) + {})", num(rng.gen_range(-amp..amp)), f, arg.join(" + "), num(rng.gen_range(0.0..1.0))));
    }
    out.join(" + ")
}

/// A nowhere-vanishing periodic function `exp(r + 2πi·θ)`.
pub fn random_unit_expr<R: Rng>(rng: &mut R, dim: usize) -> Expr {
    let r = random_trig(rng, dim, 1, 0.1);
    let theta = random_trig(rng, dim, 2, 0.3);
    parse_expr(&format!("exp({} + 2*pi*i*({}))", r, theta)).expect("generated expression parses")
}

/// A normalized cochain function of the given level (1 wherever a label is an
/// identity): exact phases on finite bases, periodic expressions on tori.
pub fn random_function<R: Rng>(rng: &mut R, g: &Groupoid, level: usize) -> CochainFunction {
    let mut f = CochainFunction::one(level);
    for key in g.nerve_keys(level) {
        if key.labels.iter().any(|&l| g.is_identity_label(key.comp, l)) {
            continue;
        }
        let cell = if g.dim() == 0 {
            Cell::Exact(random_phase(rng))
        } else {
            Cell::Expr(random_unit_expr(rng, g.dim()))
        };
        f.set(key, cell);
    }
    f
}

/// A periodic 1-form with complex coefficients.
pub fn random_one_form<R: Rng>(rng: &mut R, dim: usize) -> PForm {
    let terms = (0..dim).map(|i| {
        let re = random_trig(rng, dim, 1, 0.3);
        let im = random_trig(rng, dim, 2, 0.5);
        (vec![i], parse_expr(&format!("{} + i*({})", re, im)).expect("generated expression parses"))
    });
    PForm::from_terms(1, dim, terms).expect("indices in range")
}

/// `Σ_{i<j} c_ij dxᵢ∧dxⱼ` with constant coefficients.
pub fn random_constant_two_form<R: Rng>(rng: &mut R, dim: usize) -> PForm {
    let mut terms = Vec::new();
    for i in 0..dim {
        for j in i + 1..dim {
            let c = parse_expr(&format!("i*{}", num(rng.gen_range(-1.0..1.0)))).expect("parses");
            terms.push((vec![i, j], c));
        }
    }
    PForm::from_terms(2, dim, terms).expect("indices in range")
}

/// A random homomorphism `G → U(1)` (trivial unless `G` is a product of cyclic groups).
pub fn random_character<R: Rng>(rng: &mut R, group: &FiniteGroup) -> Vec<Scalar> {
    let Some(factors) = group.cyclic_factors().map(|f| f.to_vec()) else {
        return vec![Scalar::one(); group.order()];
    };
    let r: Vec<i64> = factors.iter().map(|&n| rng.gen_range(0..n as i64)).collect();
    group
        .elements()
        .map(|a| {
            let c = group.coords(a).expect("product of cyclic groups");
            let angle = c
                .iter()
                .zip(&factors)
                .zip(&r)
                .fold(Rational64::from_integer(0), |acc, ((&ci, &n), &ri)| acc + Rational64::new(ri * ci as i64, n as i64));
            Scalar::phase(angle)
        })
        .collect()
}

/// A line-bundle cocycle `D(f) · (χ, 0)` for a random 0-cochain `f` and character `χ`.
pub fn random_line_cocycle<R: Rng>(rng: &mut R, g: &Groupoid) -> LineData {
    let f = random_function(rng, g, 0);
    let mut line = gauge_coboundary(g, &f).expect("exponential cells do not vanish");
    if let Some(group) = g.group() {
        let chi = random_character(rng, group);
        let mut c = CochainFunction::one(1);
        for key in g.nerve_keys(1) {
            c.set(key.clone(), Cell::Exact(chi[key.labels[0]]));
        }
        line.h = line.h.mul(&c);
    }
    line
}

/// A random 1-cochain `(f, G)` of line type: `f` on arrows, `G` a 1-form on objects.
pub fn random_line_cochain<R: Rng>(rng: &mut R, g: &Groupoid) -> LineData {
    let h = random_function(rng, g, 1);
    let mut a = FormCochain::zero(0, 1, g.dim());
    if g.dim() > 0 {
        for comp in 0..g.components() {
            a.set(NerveKey::object(comp), random_one_form(rng, g.dim()));
        }
    }
    LineData { h, a }
}

/// Whether every arrow map preserves the volume form, so constant 2-forms are invariant.
fn preserves_two_forms(x: &ActionGroupoid) -> bool {
    x.maps().iter().all(|m| m.det() == 1)
}

/// A gerbe cocycle `D(f, G) · ε · (1, 0, B₀)`.
pub fn random_gerbe_cocycle<R: Rng>(rng: &mut R, g: &Groupoid, eps: Option<&TorsionCocycle>) -> GerbeData {
    let mut data = total_coboundary_line(g, &random_line_cochain(rng, g));
    if let Some(eps) = eps {
        data = data.mul(&torsion_gerbe(eps, g).expect("torsion cocycle matches the groupoid"));
    }
    if let Some(x) = g.as_action() {
        if g.dim() >= 2 && preserves_two_forms(x) {
            data.b.set(NerveKey::object(0), data.b.get(&NerveKey::object(0)).add(&random_constant_two_form(rng, g.dim())).expect("same dimension"));
        }
    }
    data
}

/// Generator of `H³(ℤ/m, ℂ×)`: `ω(a, b, c) = exp(2πi·a(b + c − [b + c])/m²)`.
pub fn cyclic_three_cocycle(group: &FiniteGroup, a: usize, b: usize, c: usize) -> Rational64 {
    let m = group.order() as i64;
    let (a, b, c) = (a as i64, b as i64, c as i64);
    let carry = b + c - (b + c) % m;
    Rational64::new(a * carry, m * m)
}

/// A flat `n`-cocycle on a finite quotient: `δβ` for random `β`, times a power
/// of the cyclic generator when `n = 3` and `G` is cyclic.
pub fn random_flat_cocycle<R: Rng>(rng: &mut R, g: &Groupoid, n: usize) -> FlatNData {
    let beta = random_function(rng, g, n - 1);
    let mut omega = cech_delta(g, &beta);
    if let (3, Some(group)) = (n, g.group()) {
        if group.cyclic_factors().is_some_and(|f| f.len() == 1) {
            let p = rng.gen_range(0..group.order() as i64);
            let mut gen = CochainFunction::one(3);
            for key in g.nerve_keys(3) {
                let r = cyclic_three_cocycle(group, key.labels[0], key.labels[1], key.labels[2]);
                gen.set(key.clone(), Cell::Exact(Scalar::phase(r * p)));
            }
            omega = omega.mul(&gen);
        }
    }
    FlatNData::flat(n, omega, g.dim())
}

/// Random partition with break points in `(1/16)ℤ`.
pub fn random_partition<R: Rng>(rng: &mut R, segments: usize) -> Partition {
    let mut pts: Vec<i64> = (1..16).collect();
    pts.shuffle(rng);
    let mut pts: Vec<i64> = pts.into_iter().take(segments - 1).collect();
    pts.sort();
    let mut all = vec![Rational64::from_integer(0)];
    all.extend(pts.into_iter().map(|p| Rational64::new(p, 16)));
    all.push(Rational64::from_integer(1));
    Partition::new(all).expect("increasing break points")
}

fn random_vector<R: Rng>(rng: &mut R, dim: usize, scale: f64) -> Vec<f64> {
    (0..dim).map(|_| rng.gen_range(-scale..scale)).collect()
}

/// Segment from `p` to `q` over `[a, b]` with a bump vanishing at both ends,
/// plus `s·((1−u)·v + u·w)` and an `s²` bump for families.
fn segment_expr<R: Rng>(rng: &mut R, (a, b): (f64, f64), p: &[f64], q: &[f64], vary: Option<(&[f64], &[f64])>) -> Carrier {
    let u = format!("((t - {})/{})", num(a), num(b - a));
    let coords = (0..p.len())
        .map(|i| {
            let mut e = format!("{} + {}*{} + {}*sin(pi*{})", num(p[i]), num(q[i] - p[i]), u, num(rng.gen_range(-0.15..0.15)), u);
            if let Some((v, w)) = vary {
                e.push_str(&format!(
                    " + s*({}*(1 - {}) + {}*{}) + s^2*{}*sin(pi*{})",
                    num(v[i]),
                    u,
                    num(w[i]),
                    u,
                    num(rng.gen_range(-FAMILY_SCALE..FAMILY_SCALE)),
                    u
                ));
            }
            parse_expr(&e).expect("generated expression parses")
        })
        .collect();
    Carrier::Param(coords)
}

fn reduce(x: Vec<f64>) -> Vec<f64> {
    x.into_iter().map(|v| v.rem_euclid(1.0)).collect()
}

/// Raw pieces of a random loop: component sequence, arrows and segment endpoints.
struct Skeleton {
    partition: Partition,
    comps: Vec<usize>,
    arrows: Vec<usize>,
    ends: Vec<(Vec<f64>, Vec<f64>)>,
}

fn skeleton<R: Rng>(rng: &mut R, g: &Groupoid, segments: usize) -> Skeleton {
    let x = g.as_action().expect("action groupoid backend");
    let group = x.group();
    let partition = random_partition(rng, segments);
    loop {
        let mut comps = vec![rng.gen_range(0..g.components())];
        let mut arrows = Vec::new();
        for i in 0..segments {
            let c = rng.gen_range(0..group.order());
            arrows.push(c);
            if i + 1 < segments {
                comps.push(g.target_comp(comps[i], c));
            }
        }
        if g.target_comp(comps[segments - 1], arrows[segments - 1]) != comps[0] {
            continue;
        }
        let dim = g.dim();
        let mut ends = Vec::new();
        let start0 = reduce(random_vector(rng, dim, 1.0).into_iter().map(|v| v.abs()).collect());
        let mut start = start0.clone();
        for i in 0..segments {
            let end = if i + 1 < segments {
                start.iter().zip(random_vector(rng, dim, 0.6)).map(|(a, b)| a + b).collect::<Vec<f64>>()
            } else {
                // end at c⁻¹(start0) up to a lattice translate
                let back = x.map(group.inv(arrows[i])).apply(&start0);
                back.iter()
                    .zip(&start)
                    .map(|(b, s)| b + (s - b).round() + rng.gen_range(-1..=1) as f64)
                    .collect()
            };
            let next = reduce(x.map(arrows[i]).apply(&end));
            ends.push((start.clone(), end));
            start = next;
        }
        return Skeleton {
            partition,
            comps,
            arrows,
            ends,
        };
    }
}

/// A random loop with the given number of segments on an action groupoid.
pub fn random_loop<R: Rng>(rng: &mut R, g: &Groupoid, segments: usize) -> Result<SegmentedLoop, LoopError> {
    let sk = skeleton(rng, g, segments);
    let segs = (0..segments)
        .map(|i| {
            let carrier = if g.dim() == 0 {
                Carrier::Param(Vec::new())
            } else {
                segment_expr(rng, sk.partition.interval(i), &sk.ends[i].0, &sk.ends[i].1, None)
            };
            PathSegment::new(sk.comps[i], carrier)
        })
        .collect();
    build_loop(g, sk.partition, segs, sk.arrows)
}

pub fn random_labels<R: Rng>(rng: &mut R, g: &Groupoid, lp: &SegmentedLoop) -> Vec<usize> {
    lp.segments
        .iter()
        .map(|s| *g.labels(s.comp).choose(rng).expect("every component has arrows"))
        .collect()
}

pub fn random_loop_arrow<R: Rng>(rng: &mut R, g: &Groupoid, lp: &SegmentedLoop) -> Result<LoopArrow, LoopError> {
    let labels = random_labels(rng, g, lp);
    build_loop_arrow(g, lp, labels)
}

/// A composable pair `Λ, Ω` with `t(Λ) = s(Ω)`.
pub fn random_composable_pair<R: Rng>(rng: &mut R, g: &Groupoid, segments: usize) -> Result<(LoopArrow, LoopArrow), LoopError> {
    let lp = random_loop(rng, g, segments)?;
    let l = random_loop_arrow(rng, g, &lp)?;
    let o = random_loop_arrow(rng, g, &l.target)?;
    Ok((l, o))
}

/// A composable chain of `len` loop arrows.
pub fn random_chain<R: Rng>(rng: &mut R, g: &Groupoid, segments: usize, len: usize) -> Result<Vec<LoopArrow>, LoopError> {
    let mut lp = random_loop(rng, g, segments)?;
    let mut out = Vec::new();
    for _ in 0..len {
        let l = random_loop_arrow(rng, g, &lp)?;
        lp = l.target.clone();
        out.push(l);
    }
    Ok(out)
}

/// Size of the first-order variation in [`random_family`].
pub const FAMILY_SCALE: f64 = 0.25;

/// A one-parameter family of loop arrows on a torus backend whose variation
/// is nonzero at the break points and compatible with the connecting arrows.
pub fn random_family<R: Rng>(rng: &mut R, g: &Groupoid, segments: usize, radius: f64) -> Result<LoopFamily, LoopError> {
    let x = g.as_action().expect("action groupoid backend");
    let sk = skeleton(rng, g, segments);
    let dim = g.dim();
    let v0 = random_vector(rng, dim, FAMILY_SCALE);
    let mut starts = vec![v0.clone()];
    let mut ends = Vec::new();
    for i in 0..segments {
        let w = if i + 1 < segments {
            random_vector(rng, dim, FAMILY_SCALE)
        } else {
            let inv = x.map(x.group().inv(sk.arrows[i]));
            inv.apply_linear(&v0)
        };
        starts.push(x.map(sk.arrows[i]).apply_linear(&w));
        ends.push(w);
    }
    let segs = (0..segments)
        .map(|i| {
            let carrier = segment_expr(
                rng,
                sk.partition.interval(i),
                &sk.ends[i].0,
                &sk.ends[i].1,
                Some((&starts[i], &ends[i])),
            );
            PathSegment::new(sk.comps[i], carrier)
        })
        .collect();
    let labels: Vec<usize> = (0..segments).map(|_| rng.gen_range(0..x.group().order())).collect();
    LoopFamily::new(g, sk.partition, segs, sk.arrows, labels, 1, radius)
}

/// The backends of the property suites.
pub fn point_backend() -> Groupoid {
    Groupoid::Action(ActionGroupoid::trivial_on_points(FiniteGroup::parse("Z/2xZ/2").expect("group spec"), 1))
}

/// `T¹` with `x ↦ −x`.
pub fn circle_backend() -> Groupoid {
    Groupoid::Action(ActionGroupoid::reflection_torus(1))
}

/// `T²` with `x ↦ −x`.
pub fn torus_backend() -> Groupoid {
    Groupoid::Action(ActionGroupoid::reflection_torus(2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::deligne::{verify_flat, verify_gerbe, verify_line, VerifyOptions};
    use crate::loopspace::validate_tangent;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn generated_cocycles_verify() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let opts = VerifyOptions::default();
        for g in [point_backend(), circle_backend(), torus_backend()] {
            let line = random_line_cocycle(&mut rng, &g);
            assert!(verify_line(&g, &line, &opts).unwrap().pass());
            let gerbe = random_gerbe_cocycle(&mut rng, &g, None);
            let r = verify_gerbe(&g, &gerbe, &opts).unwrap();
            assert!(r.pass(), "{}", r);
        }
        let z2 = Groupoid::Action(ActionGroupoid::trivial_on_points(FiniteGroup::cyclic(2), 1));
        let flat = random_flat_cocycle(&mut rng, &z2, 3);
        let r = verify_flat(&z2, &flat, &opts).unwrap();
        assert!(r.pass() && r.checks.iter().all(|c| c.exact), "{}", r);
    }

    #[test]
    fn cyclic_generator_is_a_cocycle() {
        for m in 2..6 {
            let group = FiniteGroup::cyclic(m);
            let g = Groupoid::Action(ActionGroupoid::trivial_on_points(group.clone(), 1));
            let mut gen = CochainFunction::one(3);
            for key in g.nerve_keys(3) {
                let r = cyclic_three_cocycle(&group, key.labels[0], key.labels[1], key.labels[2]);
                gen.set(key.clone(), Cell::Exact(Scalar::phase(r)));
            }
            let r = verify_flat(&g, &FlatNData::flat(3, gen, 0), &VerifyOptions::default()).unwrap();
            assert!(r.pass(), "{}", r);
        }
    }

    #[test]
    fn loops_and_families_are_valid() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for g in [point_backend(), circle_backend(), torus_backend()] {
            for n in 1..4 {
                let (l, o) = random_composable_pair(&mut rng, &g, n).unwrap();
                assert_eq!(l.target.len(), o.source.len());
            }
        }
        for g in [circle_backend(), torus_backend()] {
            for n in 1..4 {
                let fam = random_family(&mut rng, &g, n, 0.01).unwrap();
                let base = fam.base(&g).unwrap();
                validate_tangent(&g, &base.source, &fam.source_tangent(0)).unwrap();
            }
        }
    }
}
