//! Tangent vectors along loops and families of loop arrows.

use super::arrow::{build_loop_arrow, LoopArrow};
use super::path::{validate_loop, Carrier, PathSegment, Partition, SegmentedLoop};
use super::LoopError;
use crate::form::Var;
use crate::groupoid::Groupoid;

pub const TANGENT_TOL: f64 = 1e-8;

/// Vector fields `ξᵢ` along the segments of a loop.
#[derive(Clone, Debug, PartialEq)]
pub struct LoopTangent {
    pub fields: Vec<Carrier>,
}

impl LoopTangent {
    pub fn zero(lp: &SegmentedLoop, dim: usize) -> LoopTangent {
        LoopTangent {
            fields: vec![Carrier::constant(&vec![0.0; dim]); lp.len()],
        }
    }

    /// `c·ξ` for a real scalar.
    pub fn scale(&self, c: f64) -> LoopTangent {
        let m = crate::form::Expr::num(c);
        LoopTangent {
            fields: self
                .fields
                .iter()
                .map(|f| match f {
                    Carrier::Param(e) => Carrier::Param(e.iter().map(|x| crate::form::Expr::mul(m.clone(), x.clone())).collect()),
                    Carrier::Polyline(p) => {
                        Carrier::Polyline(p.iter().map(|(t, x)| (*t, x.iter().map(|v| c * v).collect())).collect())
                    }
                })
                .collect(),
        }
    }
}

/// Boundary compatibility: `dc(ξᵢ(αᵢ)) = ξᵢ₊₁(αᵢ)` through each connecting arrow.
pub fn validate_tangent(g: &Groupoid, lp: &SegmentedLoop, xi: &LoopTangent) -> Result<(), LoopError> {
    if xi.fields.len() != lp.len() {
        return Err(LoopError::CountMismatch {
            segments: lp.len(),
            arrows: xi.fields.len(),
            intervals: lp.partition.segments(),
        });
    }
    for (i, f) in xi.fields.iter().enumerate() {
        if f.dim() != g.dim() {
            return Err(LoopError::DimensionMismatch {
                expected: g.dim(),
                found: f.dim(),
            });
        }
        let map = g.arrow_map(lp.segments[i].comp, lp.arrows[i]);
        let pushed = map.apply_linear(&f.eval(lp.partition.break_point(i)));
        let (j, t) = lp.next_start(i);
        let next = xi.fields[j].eval(t);
        let distance = pushed.iter().zip(&next).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        if distance > TANGENT_TOL {
            return Err(LoopError::TangentMismatch { index: i + 1, distance });
        }
    }
    Ok(())
}

/// Transport of a source tangent to the target of `Λ`: `ζᵢ = dkᵢ(ξᵢ)`.
pub fn push_tangent(g: &Groupoid, l: &LoopArrow, xi: &LoopTangent) -> LoopTangent {
    let fields = l
        .source
        .segments
        .iter()
        .zip(&l.labels)
        .zip(&xi.fields)
        .map(|((seg, &k), f)| {
            let m = g.arrow_map(seg.comp, k);
            let linear = crate::form::AffineMap::linear(m.matrix().to_vec()).expect("square linear part");
            f.transform(&linear)
        })
        .collect();
    LoopTangent { fields }
}

/// Family `Λ(s)`, `s ∈ [−ε, ε]^k`, of loop arrows with fixed labels; the
/// source carriers depend on `s0 … s{k-1}`.
#[derive(Clone, Debug, PartialEq)]
pub struct LoopFamily {
    pub partition: Partition,
    pub segments: Vec<PathSegment>,
    pub arrows: Vec<usize>,
    pub labels: Vec<usize>,
    pub params: usize,
    pub radius: f64,
}

impl LoopFamily {
    pub fn new(
        g: &Groupoid,
        partition: Partition,
        segments: Vec<PathSegment>,
        arrows: Vec<usize>,
        labels: Vec<usize>,
        params: usize,
        radius: f64,
    ) -> Result<LoopFamily, LoopError> {
        let fam = LoopFamily {
            partition,
            segments,
            arrows,
            labels,
            params,
            radius,
        };
        if fam.segments.iter().any(|s| s.carrier.uses_symbol(Var::S(params))) {
            return Err(LoopError::UnresolvedFamily);
        }
        fam.slice(g, &vec![0.0; params])?;
        for j in 0..params {
            for sign in [-1.0, 1.0] {
                let mut s = vec![0.0; params];
                s[j] = sign * radius;
                fam.slice(g, &s)?;
            }
        }
        Ok(fam)
    }

    pub fn source_at(&self, g: &Groupoid, s: &[f64]) -> Result<SegmentedLoop, LoopError> {
        let lp = SegmentedLoop {
            partition: self.partition.clone(),
            segments: self
                .segments
                .iter()
                .map(|seg| PathSegment::new(seg.comp, seg.carrier.slice(s)))
                .collect(),
            arrows: self.arrows.clone(),
        };
        validate_loop(g, &lp)?;
        Ok(lp)
    }

    pub fn slice(&self, g: &Groupoid, s: &[f64]) -> Result<LoopArrow, LoopError> {
        build_loop_arrow(g, &self.source_at(g, s)?, self.labels.clone())
    }

    pub fn base(&self, g: &Groupoid) -> Result<LoopArrow, LoopError> {
        self.slice(g, &vec![0.0; self.params])
    }

    /// `∂ψ/∂sⱼ` at `s = 0`, a tangent to the base source loop.
    pub fn source_tangent(&self, j: usize) -> LoopTangent {
        LoopTangent {
            fields: self
                .segments
                .iter()
                .map(|seg| seg.carrier.family_derivative(j, self.params))
                .collect(),
        }
    }

    /// Tangent to the target loop induced by `∂/∂sⱼ`.
    pub fn target_tangent(&self, g: &Groupoid, j: usize) -> Result<LoopTangent, LoopError> {
        Ok(push_tangent(g, &self.base(g)?, &self.source_tangent(j)))
    }
}
