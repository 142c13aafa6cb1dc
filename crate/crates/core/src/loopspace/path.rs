//! Partitions, path segments and segmented loops.

use num_rational::Rational64;
use num_traits::{One, Zero};

use super::LoopError;
use crate::form::{AffineMap, Env, Expr, Var};
use crate::groupoid::{rational_to_f64, Groupoid};

/// Endpoint tolerance for loop and loop-arrow validation.
pub const ENDPOINT_TOL: f64 = 1e-10;
/// Interior points checked against chart membership per segment.
const CHART_SAMPLES: usize = 32;

/// Break points `0 = α₀ < … < αₙ = 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Partition(Vec<Rational64>);

impl Partition {
    pub fn new(points: Vec<Rational64>) -> Result<Partition, LoopError> {
        let ok = points.len() >= 2
            && points[0].is_zero()
            && points[points.len() - 1].is_one()
            && points.windows(2).all(|w| w[0] < w[1]);
        if ok {
            Ok(Partition(points))
        } else {
            Err(LoopError::BadPartition(points.iter().map(|p| p.to_string()).collect()))
        }
    }

    pub fn trivial() -> Partition {
        Partition(vec![Rational64::zero(), Rational64::one()])
    }

    /// `n` equal pieces.
    pub fn uniform(n: usize) -> Partition {
        Partition((0..=n).map(|i| Rational64::new(i as i64, n as i64)).collect())
    }

    pub fn points(&self) -> &[Rational64] {
        &self.0
    }

    pub fn segments(&self) -> usize {
        self.0.len() - 1
    }

    /// Domain `[αᵢ₋₁, αᵢ]` of segment `i` (0-based).
    pub fn interval(&self, i: usize) -> (f64, f64) {
        (rational_to_f64(self.0[i]), rational_to_f64(self.0[i + 1]))
    }

    /// Right end `αᵢ` of segment `i`, where its connecting arrow sits.
    pub fn break_point(&self, i: usize) -> f64 {
        rational_to_f64(self.0[i + 1])
    }
}

/// Velocity field of a [`Carrier`].
pub enum Tangent<'a> {
    Param(Vec<Expr>),
    Carrier(&'a Carrier),
}

impl Tangent<'_> {
    pub fn eval(&self, t: f64) -> Vec<f64> {
        match self {
            Tangent::Param(d) => {
                let env = Env::with_t(&[], t);
                d.iter().map(|c| c.eval(&env).re).collect()
            }
            Tangent::Carrier(c) => c.velocity(t),
        }
    }
}

/// Coordinates of a path as a function of the loop parameter `t`.
#[derive(Clone, Debug, PartialEq)]
pub enum Carrier {
    /// One expression in `t` (and family parameters `s`) per coordinate.
    Param(Vec<Expr>),
    /// Samples `(t, point)` with increasing `t`, linearly interpolated.
    Polyline(Vec<(f64, Vec<f64>)>),
}

impl Carrier {
    pub fn constant(x: &[f64]) -> Carrier {
        Carrier::Param(x.iter().map(|&v| Expr::num(v)).collect())
    }

    pub fn dim(&self) -> usize {
        match self {
            Carrier::Param(e) => e.len(),
            Carrier::Polyline(p) => p.first().map_or(0, |(_, x)| x.len()),
        }
    }

    fn polyline_piece(p: &[(f64, Vec<f64>)], t: f64) -> usize {
        let k = p.partition_point(|(s, _)| *s <= t);
        k.clamp(1, p.len() - 1) - 1
    }

    pub fn eval_at(&self, t: f64, s: &[f64]) -> Vec<f64> {
        match self {
            Carrier::Param(e) => {
                let env = Env { x: &[], t, s };
                e.iter().map(|c| c.eval(&env).re).collect()
            }
            Carrier::Polyline(p) => {
                if p.len() == 1 {
                    return p[0].1.clone();
                }
                let k = Self::polyline_piece(p, t);
                let ((t0, a), (t1, b)) = (&p[k], &p[k + 1]);
                let u = (t - t0) / (t1 - t0);
                a.iter().zip(b).map(|(x, y)| x + u * (y - x)).collect()
            }
        }
    }

    pub fn eval(&self, t: f64) -> Vec<f64> {
        self.eval_at(t, &[])
    }

    /// `dψ/dt` with the symbolic derivative taken once, for repeated evaluation.
    pub fn tangent(&self) -> Tangent<'_> {
        match self {
            Carrier::Param(e) => Tangent::Param(e.iter().map(|c| c.diff(Var::T)).collect()),
            Carrier::Polyline(_) => Tangent::Carrier(self),
        }
    }

    /// `dψ/dt`.
    pub fn velocity(&self, t: f64) -> Vec<f64> {
        match self {
            Carrier::Param(e) => {
                let env = Env::with_t(&[], t);
                e.iter().map(|c| c.diff(Var::T).eval(&env).re).collect()
            }
            Carrier::Polyline(p) => {
                if p.len() == 1 {
                    return vec![0.0; p[0].1.len()];
                }
                let k = Self::polyline_piece(p, t);
                let ((t0, a), (t1, b)) = (&p[k], &p[k + 1]);
                a.iter().zip(b).map(|(x, y)| (y - x) / (t1 - t0)).collect()
            }
        }
    }

    /// Image under an affine map of the coordinates.
    pub fn transform(&self, map: &AffineMap) -> Carrier {
        match self {
            Carrier::Param(e) => Carrier::Param(
                (0..map.dim())
                    .map(|i| {
                        map.image_expr(i).substitute(&|v| match v {
                            Var::X(j) => e.get(j).cloned(),
                            _ => None,
                        })
                    })
                    .collect(),
            ),
            Carrier::Polyline(p) => Carrier::Polyline(p.iter().map(|(t, x)| (*t, map.apply(x))).collect()),
        }
    }

    /// Fix the family parameters.
    pub fn slice(&self, s: &[f64]) -> Carrier {
        match self {
            Carrier::Param(e) => Carrier::Param(
                e.iter()
                    .map(|c| c.substitute(&|v| match v {
                        Var::S(j) => s.get(j).map(|&x| Expr::num(x)),
                        _ => None,
                    }))
                    .collect(),
            ),
            Carrier::Polyline(_) => self.clone(),
        }
    }

    /// Derivative in the family parameter `s_j` at `s = 0`.
    pub fn family_derivative(&self, j: usize, k: usize) -> Carrier {
        match self {
            Carrier::Param(e) => {
                let zero = vec![0.0; k];
                Carrier::Param(e.iter().map(|c| c.diff(Var::S(j))).collect()).slice(&zero)
            }
            Carrier::Polyline(p) => Carrier::Polyline(p.iter().map(|(t, x)| (*t, vec![0.0; x.len()])).collect()),
        }
    }

    pub fn uses_symbol(&self, var: Var) -> bool {
        match self {
            Carrier::Param(e) => e.iter().any(|c| c.mentions(var)),
            Carrier::Polyline(_) => false,
        }
    }
}

/// `ψᵢ : [αᵢ₋₁, αᵢ] → G₀`, landing in component (or chart) `comp`.
#[derive(Clone, Debug, PartialEq)]
pub struct PathSegment {
    pub comp: usize,
    pub carrier: Carrier,
}

impl PathSegment {
    pub fn new(comp: usize, carrier: Carrier) -> PathSegment {
        PathSegment { comp, carrier }
    }

    pub fn eval(&self, t: f64) -> Vec<f64> {
        self.carrier.eval(t)
    }
}

/// Objects of the loop groupoid: segments glued by arrows. `arrows[i]` is the
/// label of `ψ(αᵢ₊₁)`, from `ψᵢ(αᵢ₊₁)` to `ψᵢ₊₁(αᵢ₊₁)`, the last one closing up to `ψ₀(0)`.
#[derive(Clone, Debug, PartialEq)]
pub struct SegmentedLoop {
    pub partition: Partition,
    pub segments: Vec<PathSegment>,
    pub arrows: Vec<usize>,
}

impl SegmentedLoop {
    pub fn len(&self) -> usize {
        self.segments.len()
    }

    pub fn is_empty(&self) -> bool {
        self.segments.is_empty()
    }

    pub fn interval(&self, i: usize) -> (f64, f64) {
        self.partition.interval(i)
    }

    /// Start of segment `i + 1` (cyclically) and its parameter.
    pub fn next_start(&self, i: usize) -> (usize, f64) {
        let j = (i + 1) % self.len();
        (j, self.interval(j).0)
    }

    /// Source point of the connecting arrow at `αᵢ₊₁`.
    pub fn arrow_point(&self, i: usize) -> Vec<f64> {
        self.segments[i].eval(self.partition.break_point(i))
    }
}

fn check_endpoints(g: &Groupoid, lp: &SegmentedLoop) -> Result<(), LoopError> {
    let n = lp.len();
    for i in 0..n {
        let seg = &lp.segments[i];
        let (j, t_next) = lp.next_start(i);
        let label = lp.arrows[i];
        if !g.labels(seg.comp).contains(&label) {
            return Err(LoopError::NoArrow { index: i + 1 });
        }
        let x = lp.arrow_point(i);
        if !g.arrow_defined(seg.comp, &x, label) {
            return Err(LoopError::OutsideChart { index: i, t: lp.partition.break_point(i) });
        }
        let target_comp = g.target_comp(seg.comp, label);
        let y = g.apply(seg.comp, label, &x);
        let next = lp.segments[j].eval(t_next);
        let distance = if target_comp == lp.segments[j].comp {
            g.point_distance(&y, &next)
        } else {
            f64::INFINITY
        };
        if distance > ENDPOINT_TOL {
            return Err(LoopError::EndpointMismatch { index: i + 1, distance });
        }
    }
    Ok(())
}

fn check_segments(g: &Groupoid, lp: &SegmentedLoop) -> Result<(), LoopError> {
    for (i, seg) in lp.segments.iter().enumerate() {
        if seg.carrier.dim() != g.dim() {
            return Err(LoopError::DimensionMismatch {
                expected: g.dim(),
                found: seg.carrier.dim(),
            });
        }
        if seg.comp >= g.components() {
            return Err(LoopError::NoComponent(seg.comp));
        }
        if seg.carrier.uses_symbol(Var::S(0)) {
            return Err(LoopError::UnresolvedFamily);
        }
        let (a, b) = lp.interval(i);
        for k in 0..=CHART_SAMPLES {
            let t = a + (b - a) * k as f64 / CHART_SAMPLES as f64;
            let x = seg.eval(t);
            if x.iter().any(|v| !v.is_finite()) {
                return Err(LoopError::NotFinite { index: i, t });
            }
            if !g.contains(seg.comp, &x) {
                return Err(LoopError::OutsideChart { index: i, t });
            }
        }
    }
    Ok(())
}

pub fn validate_loop(g: &Groupoid, lp: &SegmentedLoop) -> Result<(), LoopError> {
    if lp.segments.len() != lp.partition.segments() || lp.arrows.len() != lp.segments.len() {
        return Err(LoopError::CountMismatch {
            segments: lp.segments.len(),
            arrows: lp.arrows.len(),
            intervals: lp.partition.segments(),
        });
    }
    check_segments(g, lp)?;
    check_endpoints(g, lp)
}

pub fn build_loop(
    g: &Groupoid,
    partition: Partition,
    segments: Vec<PathSegment>,
    arrows: Vec<usize>,
) -> Result<SegmentedLoop, LoopError> {
    let lp = SegmentedLoop {
        partition,
        segments,
        arrows,
    };
    validate_loop(g, &lp)?;
    Ok(lp)
}

/// One-segment loop `(φ, g)` in a global quotient: `φ(1)·g = φ(0)`.
pub fn twisted_loop(g: &Groupoid, carrier: Carrier, element: usize) -> Result<SegmentedLoop, LoopError> {
    build_loop(g, Partition::trivial(), vec![PathSegment::new(0, carrier)], vec![element])
}

/// Constant loop at `x` closed by the arrow `label` (which must fix `x`).
pub fn constant_loop(g: &Groupoid, comp: usize, x: &[f64], label: usize) -> Result<SegmentedLoop, LoopError> {
    build_loop(
        g,
        Partition::trivial(),
        vec![PathSegment::new(comp, Carrier::constant(x))],
        vec![label],
    )
}

/// Split segments at the new break points, inserting identity arrows.
pub fn refine_loop(g: &Groupoid, lp: &SegmentedLoop, new_points: &[Rational64]) -> Result<SegmentedLoop, LoopError> {
    let old = lp.partition.points();
    let mut pts = new_points.to_vec();
    pts.sort();
    for w in pts.windows(2) {
        if w[0] == w[1] {
            return Err(LoopError::DuplicateBreakpoint(w[0].to_string()));
        }
    }
    for p in &pts {
        if old.contains(p) {
            return Err(LoopError::DuplicateBreakpoint(p.to_string()));
        }
        if *p <= Rational64::zero() || *p >= Rational64::one() {
            return Err(LoopError::BadPartition(vec![p.to_string()]));
        }
    }
    let mut points = vec![old[0]];
    let mut segments = Vec::new();
    let mut arrows = Vec::new();
    for i in 0..lp.len() {
        let seg = &lp.segments[i];
        for p in pts.iter().filter(|p| **p > old[i] && **p < old[i + 1]) {
            points.push(*p);
            segments.push(seg.clone());
            arrows.push(g.identity_label(seg.comp));
        }
        points.push(old[i + 1]);
        segments.push(seg.clone());
        arrows.push(lp.arrows[i]);
    }
    build_loop(g, Partition::new(points)?, segments, arrows)
}

/// Sampled absolute difference between two loops with the same partition.
pub fn loop_distance(g: &Groupoid, a: &SegmentedLoop, b: &SegmentedLoop) -> f64 {
    if a.partition != b.partition || a.arrows != b.arrows {
        return f64::INFINITY;
    }
    let mut worst: f64 = 0.0;
    for (i, (sa, sb)) in a.segments.iter().zip(&b.segments).enumerate() {
        if sa.comp != sb.comp {
            return f64::INFINITY;
        }
        let (lo, hi) = a.interval(i);
        for k in 0..=8 {
            let t = lo + (hi - lo) * k as f64 / 8.0;
            worst = worst.max(g.point_distance(&sa.eval(t), &sb.eval(t)));
        }
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::form::parse_expr;
    use crate::group::FiniteGroup;
    use crate::groupoid::{ActionGroupoid, CoverGroupoid};

    fn shift_circle() -> Groupoid {
        Groupoid::Action(ActionGroupoid::translation_torus(FiniteGroup::cyclic(2), 1))
    }

    fn param(s: &str) -> Carrier {
        Carrier::Param(vec![parse_expr(s).unwrap()])
    }

    #[test]
    fn point_loop_is_valid() {
        let g = Groupoid::Action(ActionGroupoid::trivial_on_points(FiniteGroup::cyclic(2), 1));
        let lp = twisted_loop(&g, Carrier::Param(vec![]), 1).unwrap();
        assert_eq!(lp.len(), 1);
    }

    #[test]
    fn half_shift_closes_a_half_path() {
        let g = shift_circle();
        assert!(twisted_loop(&g, param("t/2"), 1).is_ok());
        match twisted_loop(&g, param("t/3"), 1) {
            Err(LoopError::EndpointMismatch { index: 1, distance }) => assert!((distance - 1.0 / 6.0).abs() < 1e-12),
            other => panic!("{:?}", other),
        }
    }

    #[test]
    fn bad_partitions() {
        assert!(Partition::new(vec![Rational64::zero(), Rational64::new(1, 2)]).is_err());
        let half = Rational64::new(1, 2);
        assert!(Partition::new(vec![Rational64::zero(), half, half, Rational64::one()]).is_err());
    }

    #[test]
    fn refinement_inserts_identities() {
        let g = shift_circle();
        let lp = twisted_loop(&g, param("t/2 + 0.1*sin(2*pi*t)"), 1).unwrap();
        let r = refine_loop(&g, &lp, &[Rational64::new(1, 3)]).unwrap();
        assert_eq!(r.len(), 2);
        assert_eq!(r.arrows, vec![0, 1]);
        let again = refine_loop(&g, &r, &[Rational64::new(1, 3)]);
        assert!(matches!(again, Err(LoopError::DuplicateBreakpoint(_))));
    }

    #[test]
    fn cover_loop_winds_through_charts() {
        let g = Groupoid::Cover(CoverGroupoid::circle(3));
        let segs = (0..3).map(|i| PathSegment::new(i, param("t"))).collect();
        let lp = build_loop(&g, Partition::uniform(3), segs, vec![1, 2, 0]).unwrap();
        assert_eq!(lp.len(), 3);
        let segs = (0..3).map(|i| PathSegment::new(i, param("t"))).collect();
        assert!(build_loop(&g, Partition::uniform(3), segs, vec![1, 2, 2]).is_err());
    }

    #[test]
    fn polyline_interpolates() {
        let c = Carrier::Polyline(vec![(0.0, vec![0.0]), (0.5, vec![1.0]), (1.0, vec![1.0])]);
        assert_eq!(c.eval(0.25), vec![0.5]);
        assert_eq!(c.velocity(0.25), vec![2.0]);
        assert_eq!(c.velocity(0.75), vec![0.0]);
    }
}
