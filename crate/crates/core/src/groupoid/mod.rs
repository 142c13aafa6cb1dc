//! Finite-model étale groupoids.
//!
//! Both models share one presentation: an object is a component index plus
//! coordinates, and an arrow out of component `c` is named by a *label*
//! (a group element for a quotient, the target chart for a cover) that acts
//! on coordinates by an affine map.

pub mod action;
pub mod cover;
pub mod inertia;

use std::fmt;

use num_rational::Rational64;
use rand::Rng;
use thiserror::Error;

pub use action::{ActionGroupoid, Space};
pub use cover::{Chart, CoverGroupoid};
pub use inertia::{FixedComponent, FixedSet, InertiaArrow, InertiaGroupoid, InertiaObject};

use crate::form::{AffineMap, Domain};
use crate::group::{FiniteGroup, GroupError};

pub const POINT_TOL: f64 = 1e-12;
pub const DEFAULT_NERVE_CAP: usize = 10_000_000;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GroupoidError {
    #[error("action not compatible: (x·{g})·{h} != x·({g}{h}) at x = {point:?}")]
    ActionNotCompatible { g: String, h: String, point: Vec<f64> },
    #[error("identity element does not act trivially")]
    IdentityActsNontrivially,
    #[error("linear part of element {g} is not invertible over Z")]
    NonInvertibleLinearPart { g: String },
    #[error("permutation for element {g} is not a bijection of the point set")]
    BadPermutation { g: String },
    #[error("expected {expected} entries, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("arrows not composable: first ends at {first_target}, second starts at {second_source}")]
    NotComposable { first_target: String, second_source: String },
    #[error("the nerve of a groupoid over a continuous space is infinite")]
    InfiniteNerve,
    #[error("nerve level has {count} tuples, above the cap {cap}")]
    LevelTooLarge { count: u128, cap: usize },
    #[error("charts {i} and {j} overlap in more than one component")]
    NotLeray { i: usize, j: usize },
    #[error("chart {0} is empty")]
    EmptyChart(usize),
    #[error("no arrow with label {label} at component {comp}")]
    NoArrow { comp: usize, label: usize },
    #[error("point {point:?} lies outside component {comp}")]
    OutsideDomain { comp: usize, point: Vec<f64> },
    #[error(transparent)]
    Group(#[from] GroupError),
}

/// A composable tuple of labels based at `comp`; the base coordinates are the
/// source of the first arrow.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NerveKey {
    pub comp: usize,
    pub labels: Vec<usize>,
}

impl NerveKey {
    pub fn new(comp: usize, labels: Vec<usize>) -> NerveKey {
        NerveKey { comp, labels }
    }

    pub fn object(comp: usize) -> NerveKey {
        NerveKey::new(comp, Vec::new())
    }

    pub fn level(&self) -> usize {
        self.labels.len()
    }
}

impl fmt::Display for NerveKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}[", self.comp)?;
        for (i, l) in self.labels.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{}", l)?;
        }
        write!(f, "]")
    }
}

/// A single arrow: source object plus label.
#[derive(Clone, Debug, PartialEq)]
pub struct Arrow {
    pub comp: usize,
    pub x: Vec<f64>,
    pub label: usize,
}

/// A point of nerve level `k`.
#[derive(Clone, Debug, PartialEq)]
pub struct NerveTuple {
    pub key: NerveKey,
    pub x: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Groupoid {
    Action(ActionGroupoid),
    Cover(CoverGroupoid),
}

fn reduce(v: f64) -> f64 {
    let r = v - v.floor();
    if r >= 1.0 {
        0.0
    } else {
        r
    }
}

/// Distance on ℝ/ℤ.
pub fn circle_distance(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(1.0);
    d.min(1.0 - d)
}

impl Groupoid {
    pub fn dim(&self) -> usize {
        match self {
            Groupoid::Action(a) => a.dim(),
            Groupoid::Cover(c) => c.dim(),
        }
    }

    pub fn components(&self) -> usize {
        match self {
            Groupoid::Action(a) => a.components(),
            Groupoid::Cover(c) => c.charts().len(),
        }
    }

    /// Coordinates are taken mod 1 (torus base).
    pub fn is_periodic(&self) -> bool {
        match self {
            Groupoid::Action(a) => matches!(a.space(), Space::Torus(_)),
            Groupoid::Cover(c) => c.is_periodic(),
        }
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, Groupoid::Action(a) if matches!(a.space(), Space::Points(_)))
    }

    pub fn as_action(&self) -> Option<&ActionGroupoid> {
        match self {
            Groupoid::Action(a) => Some(a),
            Groupoid::Cover(_) => None,
        }
    }

    pub fn group(&self) -> Option<&FiniteGroup> {
        self.as_action().map(ActionGroupoid::group)
    }

    /// Labels of arrows leaving component `comp`.
    pub fn labels(&self, comp: usize) -> Vec<usize> {
        match self {
            Groupoid::Action(a) => a.group().elements().collect(),
            Groupoid::Cover(c) => c.neighbours(comp),
        }
    }

    pub fn target_comp(&self, comp: usize, label: usize) -> usize {
        match self {
            Groupoid::Action(a) => a.target_comp(comp, label),
            Groupoid::Cover(_) => label,
        }
    }

    /// Coordinate change along the arrow `label` out of `comp`.
    pub fn arrow_map(&self, comp: usize, label: usize) -> AffineMap {
        match self {
            Groupoid::Action(a) => a.map(label).clone(),
            Groupoid::Cover(c) => c.shift_map(comp, label),
        }
    }

    /// Label of the composite of `a` (out of `comp`) followed by `b`.
    pub fn compose_label(&self, _comp: usize, a: usize, b: usize) -> usize {
        match self {
            Groupoid::Action(g) => g.group().mul(a, b),
            Groupoid::Cover(_) => b,
        }
    }

    /// Label of the inverse of arrow `a` out of `comp`.
    pub fn inverse_label(&self, comp: usize, a: usize) -> usize {
        match self {
            Groupoid::Action(g) => g.group().inv(a),
            Groupoid::Cover(_) => comp,
        }
    }

    pub fn identity_label(&self, comp: usize) -> usize {
        match self {
            Groupoid::Action(g) => g.group().id(),
            Groupoid::Cover(_) => comp,
        }
    }

    pub fn is_identity_label(&self, comp: usize, label: usize) -> bool {
        self.identity_label(comp) == label
    }

    pub fn label_name(&self, label: usize) -> String {
        match self {
            Groupoid::Action(a) => a.group().name(label).to_string(),
            Groupoid::Cover(_) => format!("U{}", label),
        }
    }

    pub fn contains(&self, comp: usize, x: &[f64]) -> bool {
        match self {
            Groupoid::Action(_) => true,
            Groupoid::Cover(c) => c.charts()[comp].contains(x),
        }
    }

    pub fn apply(&self, comp: usize, label: usize, x: &[f64]) -> Vec<f64> {
        self.arrow_map(comp, label).apply(x)
    }

    /// Whether the arrow `label` is defined at `(comp, x)`.
    pub fn arrow_defined(&self, comp: usize, x: &[f64], label: usize) -> bool {
        match self {
            Groupoid::Action(_) => true,
            Groupoid::Cover(c) => c.overlap_contains(comp, label, x),
        }
    }

    /// Object equality (mod 1 on periodic bases), returning the coordinate distance.
    pub fn point_distance(&self, x: &[f64], y: &[f64]) -> f64 {
        x.iter()
            .zip(y)
            .map(|(&a, &b)| {
                if self.is_periodic() {
                    circle_distance(a, b)
                } else {
                    (a - b).abs()
                }
            })
            .fold(0.0, f64::max)
    }

    pub fn normalize_point(&self, x: &[f64]) -> Vec<f64> {
        if self.is_periodic() {
            x.iter().map(|&v| reduce(v)).collect()
        } else {
            x.to_vec()
        }
    }

    pub fn target(&self, a: &Arrow) -> (usize, Vec<f64>) {
        (self.target_comp(a.comp, a.label), self.apply(a.comp, a.label, &a.x))
    }

    /// `a` followed by `b`.
    pub fn compose_arrows(&self, a: &Arrow, b: &Arrow) -> Result<Arrow, GroupoidError> {
        let (tc, tx) = self.target(a);
        if tc != b.comp || self.point_distance(&tx, &b.x) > POINT_TOL {
            return Err(GroupoidError::NotComposable {
                first_target: format!("{} @ {:?}", tc, self.normalize_point(&tx)),
                second_source: format!("{} @ {:?}", b.comp, self.normalize_point(&b.x)),
            });
        }
        Ok(Arrow {
            comp: a.comp,
            x: a.x.clone(),
            label: self.compose_label(a.comp, a.label, b.label),
        })
    }

    pub fn inverse_arrow(&self, a: &Arrow) -> Arrow {
        let (tc, tx) = self.target(a);
        Arrow {
            comp: tc,
            x: self.normalize_point(&tx),
            label: self.inverse_label(a.comp, a.label),
        }
    }

    pub fn identity_arrow(&self, comp: usize, x: &[f64]) -> Arrow {
        Arrow {
            comp,
            x: x.to_vec(),
            label: self.identity_label(comp),
        }
    }

    /// Components visited by the arrows of `key`, starting at `key.comp`.
    pub fn comps_along(&self, key: &NerveKey) -> Vec<usize> {
        let mut out = vec![key.comp];
        for &l in &key.labels {
            let c = *out.last().unwrap();
            out.push(self.target_comp(c, l));
        }
        out
    }

    /// Maps taking base coordinates of `key` to the source of each arrow,
    /// plus a final one to the end object.
    pub fn maps_along(&self, key: &NerveKey) -> Vec<AffineMap> {
        let comps = self.comps_along(key);
        let mut out = vec![AffineMap::identity(self.dim())];
        for (i, &l) in key.labels.iter().enumerate() {
            let next = out[i].then(&self.arrow_map(comps[i], l));
            out.push(next);
        }
        out
    }

    /// The `i`-th face of a level-`k` key: the new key and the map from the old
    /// base coordinates to the new ones.
    pub fn face(&self, key: &NerveKey, i: usize) -> (NerveKey, AffineMap) {
        let k = key.level();
        assert!(i <= k && k >= 1);
        let id = AffineMap::identity(self.dim());
        if i == 0 {
            let comp = self.target_comp(key.comp, key.labels[0]);
            let map = self.arrow_map(key.comp, key.labels[0]);
            return (NerveKey::new(comp, key.labels[1..].to_vec()), map);
        }
        if i == k {
            return (NerveKey::new(key.comp, key.labels[..k - 1].to_vec()), id);
        }
        let comps = self.comps_along(key);
        let mut labels = key.labels[..i - 1].to_vec();
        labels.push(self.compose_label(comps[i - 1], key.labels[i - 1], key.labels[i]));
        labels.extend_from_slice(&key.labels[i + 1..]);
        (NerveKey::new(key.comp, labels), id)
    }

    /// Degenerate key `(comp, [e, …, e])`.
    pub fn unit_key(&self, comp: usize, level: usize) -> NerveKey {
        NerveKey::new(comp, vec![self.identity_label(comp); level])
    }

    /// All label tuples at level `k` with nonempty domain, in lexicographic order.
    pub fn nerve_keys(&self, k: usize) -> Vec<NerveKey> {
        let mut out = Vec::new();
        for comp in 0..self.components() {
            let mut stack = vec![NerveKey::object(comp)];
            while let Some(key) = stack.pop() {
                if key.level() == k {
                    out.push(key);
                    continue;
                }
                let here = *self.comps_along(&key).last().unwrap();
                for &l in self.labels(here).iter().rev() {
                    let mut labels = key.labels.clone();
                    labels.push(l);
                    let next = NerveKey::new(comp, labels);
                    if self.key_domain(&next).is_some() {
                        stack.push(next);
                    }
                }
            }
        }
        out.sort();
        out
    }

    /// Box of base coordinates on which every arrow of `key` is defined.
    pub fn key_domain(&self, key: &NerveKey) -> Option<Vec<(f64, f64)>> {
        match self {
            Groupoid::Action(a) => Some(vec![(0.0, 1.0); a.dim()]),
            Groupoid::Cover(c) => {
                let comps = self.comps_along(key);
                let maps = self.maps_along(key);
                let mut bx: Vec<(f64, f64)> = c.charts()[key.comp].bounds();
                for (m, &ci) in maps.iter().zip(&comps).skip(1) {
                    let off = m.offset();
                    for (d, b) in bx.iter_mut().enumerate() {
                        let (lo, hi) = c.charts()[ci].bounds()[d];
                        let shift = *off[d].numer() as f64 / *off[d].denom() as f64;
                        b.0 = b.0.max(lo - shift);
                        b.1 = b.1.min(hi - shift);
                    }
                }
                if bx.iter().all(|(lo, hi)| lo < hi) {
                    Some(bx)
                } else {
                    None
                }
            }
        }
    }

    pub fn key_interval_domain(&self, key: &NerveKey) -> Option<Domain> {
        self.key_domain(key).map(Domain::boxed)
    }

    /// Random base point for `key`, inside its domain (shrunk by `margin`).
    pub fn sample_base<R: Rng>(&self, key: &NerveKey, rng: &mut R, margin: f64) -> Option<Vec<f64>> {
        let bx = self.key_domain(key)?;
        Some(
            bx.iter()
                .map(|&(lo, hi)| {
                    let m = margin.min(0.25 * (hi - lo));
                    rng.gen_range(lo + m..hi - m)
                })
                .collect(),
        )
    }

    /// Human-readable key, e.g. `*[(1,0),(0,1)]`.
    pub fn describe_key(&self, key: &NerveKey) -> String {
        let base = match self {
            Groupoid::Action(a) => a.point_label(key.comp),
            Groupoid::Cover(_) => format!("U{}", key.comp),
        };
        let labels: Vec<String> = key.labels.iter().map(|&l| self.label_name(l)).collect();
        format!("{}[{}]", base, labels.join(","))
    }

    pub fn describe_point(&self, key: &NerveKey, x: &[f64]) -> String {
        if x.is_empty() {
            self.describe_key(key)
        } else {
            let pts: Vec<String> = x.iter().map(|v| format!("{:.6}", v)).collect();
            format!("{} @ ({})", self.describe_key(key), pts.join(", "))
        }
    }

    /// Exhaustive nerve enumeration for finite spaces.
    pub fn enumerate_nerve(&self, k: usize, cap: usize) -> Result<Vec<NerveTuple>, GroupoidError> {
        let a = match self {
            Groupoid::Action(a) if matches!(a.space(), Space::Points(_)) => a,
            _ => return Err(GroupoidError::InfiniteNerve),
        };
        let count = (a.components() as u128) * (a.group().order() as u128).pow(k as u32);
        if count > cap as u128 {
            return Err(GroupoidError::LevelTooLarge { count, cap });
        }
        Ok(self
            .nerve_keys(k)
            .into_iter()
            .map(|key| NerveTuple { key, x: Vec::new() })
            .collect())
    }

    /// Arrows of the nerve tuple, in order.
    pub fn tuple_arrows(&self, t: &NerveTuple) -> Vec<Arrow> {
        let comps = self.comps_along(&t.key);
        let maps = self.maps_along(&t.key);
        t.key
            .labels
            .iter()
            .enumerate()
            .map(|(i, &l)| Arrow {
                comp: comps[i],
                x: self.normalize_point(&maps[i].apply(&t.x)),
                label: l,
            })
            .collect()
    }
}

pub(crate) fn rational_to_f64(r: Rational64) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::FiniteGroup;

    fn klein_point() -> Groupoid {
        Groupoid::Action(ActionGroupoid::trivial_on_points(FiniteGroup::parse("Z/2xZ/2").unwrap(), 1))
    }

    #[test]
    fn point_quotient_arrows() {
        let g = klein_point();
        let arrows = g.enumerate_nerve(1, DEFAULT_NERVE_CAP).unwrap();
        assert_eq!(arrows.len(), 4);
        let a = Arrow { comp: 0, x: vec![], label: 2 };
        let b = Arrow { comp: 0, x: vec![], label: 1 };
        assert_eq!(g.compose_arrows(&a, &b).unwrap().label, 3);
        assert_eq!(g.inverse_arrow(&a).label, 2);
    }

    #[test]
    fn faces_of_pairs() {
        let g = klein_point();
        let key = NerveKey::new(0, vec![2, 1]);
        assert_eq!(g.face(&key, 0).0, NerveKey::new(0, vec![1]));
        assert_eq!(g.face(&key, 1).0, NerveKey::new(0, vec![3]));
        assert_eq!(g.face(&key, 2).0, NerveKey::new(0, vec![2]));
    }

    #[test]
    fn nerve_counts() {
        let g = Groupoid::Action(ActionGroupoid::trivial_on_points(FiniteGroup::cyclic(2), 1));
        assert_eq!(g.enumerate_nerve(2, DEFAULT_NERVE_CAP).unwrap().len(), 4);
        let swap = ActionGroupoid::on_points(
            FiniteGroup::cyclic(2),
            vec!["a".into(), "b".into()],
            vec![vec![0, 1], vec![1, 0]],
        )
        .unwrap();
        let g = Groupoid::Action(swap);
        assert_eq!(g.enumerate_nerve(1, DEFAULT_NERVE_CAP).unwrap().len(), 4);
        assert_eq!(g.enumerate_nerve(3, DEFAULT_NERVE_CAP).unwrap().len(), 16);
        assert!(matches!(
            g.enumerate_nerve(30, DEFAULT_NERVE_CAP),
            Err(GroupoidError::LevelTooLarge { .. })
        ));
    }

    #[test]
    fn torus_nerve_is_infinite() {
        let g = Groupoid::Action(ActionGroupoid::translation_torus(FiniteGroup::cyclic(2), 1));
        assert_eq!(g.enumerate_nerve(1, DEFAULT_NERVE_CAP), Err(GroupoidError::InfiniteNerve));
    }

    #[test]
    fn not_composable_reports_endpoints() {
        let g = Groupoid::Action(ActionGroupoid::translation_torus(FiniteGroup::cyclic(2), 1));
        let a = Arrow { comp: 0, x: vec![0.1], label: 1 };
        let b = Arrow { comp: 0, x: vec![0.3], label: 1 };
        assert!(matches!(g.compose_arrows(&a, &b), Err(GroupoidError::NotComposable { .. })));
        let c = Arrow { comp: 0, x: vec![0.6], label: 1 };
        assert_eq!(g.compose_arrows(&a, &c).unwrap().label, 0);
    }
}
