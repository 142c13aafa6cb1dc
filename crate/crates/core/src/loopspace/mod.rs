//! Piecewise loops in groupoids, loop arrows, tangents and loop families,
//! with the path integrals that enter the holonomy formulas.

pub mod arrow;
pub mod path;
pub mod quadrature;
pub mod tangent;

use num_complex::Complex64;
use thiserror::Error;

pub use arrow::{
    build_loop_arrow, compose_loop_arrows, identity_loop_arrow, inverse_loop_arrow, is_identity, refine_loop_arrow,
    LoopArrow,
};
pub use path::{
    build_loop, constant_loop, loop_distance, refine_loop, twisted_loop, validate_loop, Carrier, PathSegment,
    Partition, SegmentedLoop,
};
pub use tangent::{push_tangent, validate_tangent, LoopFamily, LoopTangent};

use crate::form::{FormError, PForm};
use quadrature::{adaptive, simpson, QuadratureError, DEFAULT_N, DEFAULT_TARGET};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LoopError {
    #[error("partition must run strictly from 0 to 1: {0:?}")]
    BadPartition(Vec<String>),
    #[error("endpoint mismatch at break point {index}: distance {distance:e}")]
    EndpointMismatch { index: usize, distance: f64 },
    #[error("{segments} segments, {arrows} arrows or labels, {intervals} intervals")]
    CountMismatch { segments: usize, arrows: usize, intervals: usize },
    #[error("no such arrow at break point / segment {index}")]
    NoArrow { index: usize },
    #[error("segment {index} leaves its chart or overlap at t = {t}")]
    OutsideChart { index: usize, t: f64 },
    #[error("segment {index} is not finite at t = {t}")]
    NotFinite { index: usize, t: f64 },
    #[error("expected {expected} coordinates, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("no component {0}")]
    NoComponent(usize),
    #[error("segment still depends on a family parameter")]
    UnresolvedFamily,
    #[error("break point {0} already present")]
    DuplicateBreakpoint(String),
    #[error("loop arrows have different partitions; refine first")]
    PartitionMismatch,
    #[error("loop arrows not composable: target and source differ by {distance:e}")]
    NotComposable { distance: f64 },
    #[error("tangent incompatible at break point {index}: distance {distance:e}")]
    TangentMismatch { index: usize, distance: f64 },
    #[error(transparent)]
    Quadrature(#[from] QuadratureError),
    #[error(transparent)]
    Form(#[from] FormError),
}

/// Quadrature rule for path integrals.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Quadrature {
    /// Composite Simpson with a fixed subinterval count per segment; smooth in
    /// the data, as finite differences need.
    Fixed(usize),
    /// Doubling from `n0` until the Richardson estimate meets `target`.
    Adaptive { n0: usize, target: f64 },
}

impl Default for Quadrature {
    fn default() -> Self {
        Quadrature::Adaptive {
            n0: DEFAULT_N,
            target: DEFAULT_TARGET,
        }
    }
}

impl Quadrature {
    pub fn integrate<F: FnMut(f64) -> Complex64>(self, f: F, a: f64, b: f64) -> Result<Complex64, QuadratureError> {
        if a == b {
            return Ok(Complex64::new(0.0, 0.0));
        }
        match self {
            Quadrature::Fixed(n) => simpson(f, a, b, n),
            Quadrature::Adaptive { n0, target } => adaptive(f, a, b, n0, target).map(|e| e.value),
        }
    }
}

/// `∫_{[a,b]} ψ*w` for a 1-form `w`.
pub fn integrate_along(w: &PForm, path: &Carrier, (a, b): (f64, f64), quad: Quadrature) -> Result<Complex64, LoopError> {
    if w.is_zero() {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let mut err = None;
    let tangent = path.tangent();
    let v = quad.integrate(
        |t| {
            let x = path.eval(t);
            let v = tangent.eval(t);
            w.eval(&x, &[v]).unwrap_or_else(|e| {
                err = Some(e);
                Complex64::new(0.0, 0.0)
            })
        },
        a,
        b,
    )?;
    match err {
        Some(e) => Err(e.into()),
        None => Ok(v),
    }
}

/// `∫_{[a,b]} B(dψ/dt, ξ(t)) dt` for a 2-form `B`.
pub fn integrate_paired(
    bform: &PForm,
    path: &Carrier,
    xi: &Carrier,
    (a, b): (f64, f64),
    quad: Quadrature,
) -> Result<Complex64, LoopError> {
    if bform.is_zero() {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let mut err = None;
    let tangent = path.tangent();
    let v = quad.integrate(
        |t| {
            let x = path.eval(t);
            bform.eval(&x, &[tangent.eval(t), xi.eval(t)]).unwrap_or_else(|e| {
                err = Some(e);
                Complex64::new(0.0, 0.0)
            })
        },
        a,
        b,
    )?;
    match err {
        Some(e) => Err(e.into()),
        None => Ok(v),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::form::parse_expr;

    fn one_form(c: &str) -> PForm {
        PForm::from_terms(1, 1, [(vec![0], parse_expr(c).unwrap())]).unwrap()
    }

    #[test]
    fn constant_form_along_unit_path() {
        let path = Carrier::Param(vec![parse_expr("t").unwrap()]);
        let v = integrate_along(&one_form("2.5"), &path, (0.0, 1.0), Quadrature::default()).unwrap();
        assert!((v.re - 2.5).abs() < 1e-12);
        let z = integrate_along(&PForm::zero(1, 1), &path, (0.0, 1.0), Quadrature::default()).unwrap();
        assert_eq!(z, Complex64::new(0.0, 0.0));
    }

    #[test]
    fn splitting_is_additive() {
        let path = Carrier::Param(vec![parse_expr("t + 0.2*sin(2*pi*t)").unwrap()]);
        let w = one_form("cos(2*pi*x1) + 0.5*i");
        let q = Quadrature::Fixed(512);
        let whole = integrate_along(&w, &path, (0.0, 1.0), q).unwrap();
        let parts = integrate_along(&w, &path, (0.0, 0.37), q).unwrap() + integrate_along(&w, &path, (0.37, 1.0), q).unwrap();
        assert!((whole - parts).norm() < 1e-10);
    }

    #[test]
    fn paired_mode_integrates_b() {
        let b = PForm::from_terms(2, 2, [(vec![0, 1], parse_expr("3").unwrap())]).unwrap();
        let path = Carrier::Param(vec![parse_expr("t").unwrap(), parse_expr("0").unwrap()]);
        let xi = Carrier::constant(&[0.0, 1.0]);
        let v = integrate_paired(&b, &path, &xi, (0.0, 1.0), Quadrature::default()).unwrap();
        assert!((v.re - 3.0).abs() < 1e-12);
    }
}
