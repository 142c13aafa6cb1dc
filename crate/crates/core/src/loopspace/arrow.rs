//! Arrows of the loop groupoid: segmentwise constant labels over a source loop.

use num_rational::Rational64;

use super::path::{loop_distance, refine_loop, validate_loop, PathSegment, SegmentedLoop, ENDPOINT_TOL};
use super::LoopError;
use crate::groupoid::Groupoid;

/// Interior points checked against overlap membership per segment.
const OVERLAP_SAMPLES: usize = 32;

/// `Λ : ψ → φ` with `Λᵢ(t) = (ψᵢ(t), kᵢ)` and `φᵢ = kᵢ ∘ ψᵢ`.
#[derive(Clone, Debug, PartialEq)]
pub struct LoopArrow {
    pub source: SegmentedLoop,
    pub labels: Vec<usize>,
    pub target: SegmentedLoop,
}

/// Connecting label of the target loop: `kᵢ · c′ᵢ = cᵢ · kᵢ₊₁`.
fn target_arrow(g: &Groupoid, source: &SegmentedLoop, labels: &[usize], i: usize) -> usize {
    let n = source.len();
    let comp = source.segments[i].comp;
    let back = g.inverse_label(comp, labels[i]);
    let target_comp = g.target_comp(comp, labels[i]);
    let around = g.compose_label(comp, source.arrows[i], labels[(i + 1) % n]);
    g.compose_label(target_comp, back, around)
}

pub fn build_loop_arrow(g: &Groupoid, source: &SegmentedLoop, labels: Vec<usize>) -> Result<LoopArrow, LoopError> {
    if labels.len() != source.len() {
        return Err(LoopError::CountMismatch {
            segments: source.len(),
            arrows: labels.len(),
            intervals: source.partition.segments(),
        });
    }
    for (i, (seg, &k)) in source.segments.iter().zip(&labels).enumerate() {
        if !g.labels(seg.comp).contains(&k) {
            return Err(LoopError::NoArrow { index: i });
        }
        let (a, b) = source.interval(i);
        for s in 0..=OVERLAP_SAMPLES {
            let t = a + (b - a) * s as f64 / OVERLAP_SAMPLES as f64;
            if !g.arrow_defined(seg.comp, &seg.eval(t), k) {
                return Err(LoopError::OutsideChart { index: i, t });
            }
        }
    }
    let segments = source
        .segments
        .iter()
        .zip(&labels)
        .map(|(seg, &k)| PathSegment::new(g.target_comp(seg.comp, k), seg.carrier.transform(&g.arrow_map(seg.comp, k))))
        .collect();
    let arrows = (0..source.len()).map(|i| target_arrow(g, source, &labels, i)).collect();
    let target = SegmentedLoop {
        partition: source.partition.clone(),
        segments,
        arrows,
    };
    validate_loop(g, &target)?;
    Ok(LoopArrow {
        source: source.clone(),
        labels,
        target,
    })
}

/// `Λ` followed by `Ω`, segmentwise.
pub fn compose_loop_arrows(g: &Groupoid, l: &LoopArrow, o: &LoopArrow) -> Result<LoopArrow, LoopError> {
    if l.target.partition != o.source.partition {
        return Err(LoopError::PartitionMismatch);
    }
    let d = loop_distance(g, &l.target, &o.source);
    if d > ENDPOINT_TOL {
        return Err(LoopError::NotComposable { distance: d });
    }
    let labels = l
        .source
        .segments
        .iter()
        .zip(l.labels.iter().zip(&o.labels))
        .map(|(seg, (&a, &b))| g.compose_label(seg.comp, a, b))
        .collect();
    build_loop_arrow(g, &l.source, labels)
}

pub fn inverse_loop_arrow(g: &Groupoid, l: &LoopArrow) -> Result<LoopArrow, LoopError> {
    let labels = l
        .source
        .segments
        .iter()
        .zip(&l.labels)
        .map(|(seg, &k)| g.inverse_label(seg.comp, k))
        .collect();
    build_loop_arrow(g, &l.target, labels)
}

pub fn identity_loop_arrow(g: &Groupoid, lp: &SegmentedLoop) -> LoopArrow {
    let labels = lp.segments.iter().map(|s| g.identity_label(s.comp)).collect();
    build_loop_arrow(g, lp, labels).expect("identity arrows are defined everywhere")
}

pub fn is_identity(g: &Groupoid, l: &LoopArrow) -> bool {
    l.source
        .segments
        .iter()
        .zip(&l.labels)
        .all(|(s, &k)| g.is_identity_label(s.comp, k))
}

/// Refine the source loop, repeating each segment's label on its pieces.
pub fn refine_loop_arrow(g: &Groupoid, l: &LoopArrow, new_points: &[Rational64]) -> Result<LoopArrow, LoopError> {
    let source = refine_loop(g, &l.source, new_points)?;
    let old = l.source.partition.points();
    let labels = source
        .partition
        .points()
        .windows(2)
        .map(|w| {
            let i = old.partition_point(|p| *p <= w[0]) - 1;
            l.labels[i]
        })
        .collect();
    build_loop_arrow(g, &source, labels)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::form::parse_expr;
    use crate::group::FiniteGroup;
    use crate::groupoid::{ActionGroupoid, CoverGroupoid};
    use crate::loopspace::path::{build_loop, twisted_loop, Carrier, Partition};

    fn klein_point() -> Groupoid {
        Groupoid::Action(ActionGroupoid::trivial_on_points(FiniteGroup::parse("Z/2xZ/2").unwrap(), 1))
    }

    #[test]
    fn point_arrows_compose_pointwise() {
        let g = Groupoid::Action(ActionGroupoid::trivial_on_points(FiniteGroup::s3(), 1));
        let lp = twisted_loop(&g, Carrier::Param(vec![]), 4).unwrap();
        let a = build_loop_arrow(&g, &lp, vec![1]).unwrap();
        let group = g.group().unwrap();
        assert_eq!(a.target.arrows, vec![group.conj(4, 1)]);
        let b = build_loop_arrow(&g, &a.target, vec![2]).unwrap();
        let ab = compose_loop_arrows(&g, &a, &b).unwrap();
        assert_eq!(ab.labels, vec![group.mul(1, 2)]);
        assert_eq!(ab.target.arrows, b.target.arrows);
    }

    #[test]
    fn inverse_composes_to_identity() {
        let g = Groupoid::Action(ActionGroupoid::reflection_torus(1));
        let lp = twisted_loop(&g, Carrier::Param(vec![parse_expr("0.2*sin(2*pi*t)").unwrap()]), 0).unwrap();
        let a = build_loop_arrow(&g, &lp, vec![1]).unwrap();
        let inv = inverse_loop_arrow(&g, &a).unwrap();
        let id = compose_loop_arrows(&g, &a, &inv).unwrap();
        assert!(is_identity(&g, &id));
        assert!(loop_distance(&g, &id.target, &lp) < 1e-12);
    }

    #[test]
    fn partitions_must_match() {
        let g = klein_point();
        let lp = twisted_loop(&g, Carrier::Param(vec![]), 1).unwrap();
        let a = build_loop_arrow(&g, &lp, vec![2]).unwrap();
        let fine = refine_loop_arrow(&g, &identity_loop_arrow(&g, &a.target), &[Rational64::new(1, 2)]).unwrap();
        assert_eq!(compose_loop_arrows(&g, &a, &fine), Err(LoopError::PartitionMismatch));
    }

    #[test]
    fn cover_arrow_changes_charts() {
        let g = Groupoid::Cover(CoverGroupoid::circle(3));
        let c = || Carrier::Param(vec![parse_expr("0.02").unwrap()]);
        let lp = build_loop(&g, Partition::trivial(), vec![PathSegment::new(0, c())], vec![0]).unwrap();
        let a = build_loop_arrow(&g, &lp, vec![2]).unwrap();
        assert_eq!(a.target.segments[0].comp, 2);
        assert!((a.target.segments[0].eval(0.5)[0] - 1.02).abs() < 1e-12);
        assert_eq!(a.target.arrows, vec![2]);
        assert!(build_loop_arrow(&g, &lp, vec![1]).is_err());
    }
}
