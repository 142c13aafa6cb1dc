//! Holonomy over loops: `τ₁` (a function on loops), `τ₂` (the pair `F`, `Δ`
//! on the loop groupoid) and the flat `τₙ`, with the consistency checks
//! relating them to the coboundary operators.

use num_complex::Complex64;
use thiserror::Error;

use crate::deligne::{total_coboundary_line, FlatNData, GerbeData, LineData};
use crate::groupoid::{Groupoid, NerveKey};
use crate::loopspace::{
    integrate_along, integrate_paired, loop_distance, LoopArrow, LoopError, LoopFamily, LoopTangent, Quadrature,
    SegmentedLoop,
};
use crate::report::{Report, Worst};
use crate::scalar::Scalar;

/// Largest `|F(Λ₊)/F(Λ₋) − 1|` accepted by the finite-difference derivative.
pub const MAX_FD_RATIO_DEVIATION: f64 = 0.5;
pub const DEFAULT_STEP: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TransgressionError {
    #[error("step {step} too large: F ratio {ratio} is far from 1")]
    StepTooLarge { step: f64, ratio: String },
    #[error("loop arrows {index} and {next} are not composable")]
    NotComposable { index: usize, next: usize },
    #[error("expected {expected} loop arrows, found {found}")]
    WrongArity { expected: usize, found: usize },
    #[error("family has {0} parameters, expected 1")]
    FamilyArity(usize),
    #[error(transparent)]
    Loop(#[from] LoopError),
}

/// Multiply `acc` by `exp(z)`, keeping exact values exact when `z = 0`.
fn times_exp(acc: Scalar, z: Complex64) -> Scalar {
    if z == Complex64::new(0.0, 0.0) {
        acc
    } else {
        acc.mul(Scalar::num(z.exp()))
    }
}

/// `H(ψ) = exp(Σ ∫ ψᵢ*A) · ∏ h(ψ(αᵢ))⁻¹`.
pub fn tau1_eval(data: &LineData, lp: &SegmentedLoop, quad: Quadrature) -> Result<Scalar, TransgressionError> {
    let mut integral = Complex64::new(0.0, 0.0);
    let mut acc = Scalar::one();
    for (i, seg) in lp.segments.iter().enumerate() {
        let w = data.a.get(&NerveKey::object(seg.comp));
        integral += integrate_along(&w, &seg.carrier, lp.interval(i), quad)?;
        let key = NerveKey::new(seg.comp, vec![lp.arrows[i]]);
        acc = acc.mul(data.h.eval(&key, &lp.arrow_point(i)).inv());
    }
    Ok(times_exp(acc, integral))
}

/// `F(Λ) = exp(Σ ∫ ψᵢ*A_{kᵢ}) · ∏ h(cᵢ, kᵢ₊₁) / h(kᵢ, c′ᵢ)` at `ψᵢ(αᵢ)`.
pub fn f_eval(data: &GerbeData, l: &LoopArrow, quad: Quadrature) -> Result<Scalar, TransgressionError> {
    let src = &l.source;
    let n = src.len();
    let mut integral = Complex64::new(0.0, 0.0);
    let mut acc = Scalar::one();
    for (i, seg) in src.segments.iter().enumerate() {
        let w = data.a.get(&NerveKey::new(seg.comp, vec![l.labels[i]]));
        integral += integrate_along(&w, &seg.carrier, src.interval(i), quad)?;
        let x = src.arrow_point(i);
        let up = NerveKey::new(seg.comp, vec![src.arrows[i], l.labels[(i + 1) % n]]);
        let down = NerveKey::new(seg.comp, vec![l.labels[i], l.target.arrows[i]]);
        acc = acc.mul(data.h.eval(&up, &x)).mul(data.h.eval(&down, &x).inv());
    }
    Ok(times_exp(acc, integral))
}

/// `⟨Δ_ψ, ξ⟩ = Σ ∫ B(dψᵢ/dt, ξᵢ) dt + Σ ⟨A_{ψ(αᵢ)}, ξᵢ(αᵢ)⟩`.
pub fn delta_eval(
    g: &Groupoid,
    data: &GerbeData,
    lp: &SegmentedLoop,
    xi: &LoopTangent,
    quad: Quadrature,
) -> Result<Complex64, TransgressionError> {
    crate::loopspace::validate_tangent(g, lp, xi)?;
    let mut total = Complex64::new(0.0, 0.0);
    for (i, seg) in lp.segments.iter().enumerate() {
        let b = data.b.get(&NerveKey::object(seg.comp));
        total += integrate_paired(&b, &seg.carrier, &xi.fields[i], lp.interval(i), quad)?;
        let key = NerveKey::new(seg.comp, vec![lp.arrows[i]]);
        let t = lp.partition.break_point(i);
        total += data.a.eval(&key, &lp.arrow_point(i), &[xi.fields[i].eval(t)]);
    }
    Ok(total)
}

/// One-segment global-quotient formula for `Λ = (φ, g) → (φ·k, k⁻¹gk)`:
/// `exp(∫ φ*A_k) · h(g, k)/h(k, k⁻¹gk)` at `φ(1)`.
pub fn f_global_quotient(
    g: &Groupoid,
    data: &GerbeData,
    phi: &crate::loopspace::Carrier,
    element: usize,
    k: usize,
    quad: Quadrature,
) -> Result<Scalar, TransgressionError> {
    let group = g.group().expect("global quotient");
    let conj = group.conj(element, k);
    let x = phi.eval(1.0);
    let w = data.a.get(&NerveKey::new(0, vec![k]));
    let integral = integrate_along(&w, phi, (0.0, 1.0), quad)?;
    let ratio = data
        .h
        .eval(&NerveKey::new(0, vec![element, k]), &x)
        .div(data.h.eval(&NerveKey::new(0, vec![k, conj]), &x));
    Ok(times_exp(ratio, integral))
}

/// `τ₁` for fixed line data.
#[derive(Clone, Debug, PartialEq)]
pub struct HolonomyMap {
    pub data: LineData,
    pub quad: Quadrature,
}

impl HolonomyMap {
    pub fn eval(&self, lp: &SegmentedLoop) -> Result<Scalar, TransgressionError> {
        tau1_eval(&self.data, lp, self.quad)
    }

    /// `H(target)/H(source)`.
    pub fn delta(&self, l: &LoopArrow) -> Result<Scalar, TransgressionError> {
        Ok(self.eval(&l.target)?.div(self.eval(&l.source)?))
    }
}

/// `τ₂` of gerbe data: the line bundle with connection `(F, Δ)`.
#[derive(Clone, Debug, PartialEq)]
pub struct TransgressedBundle {
    pub data: GerbeData,
    pub quad: Quadrature,
}

pub fn tau2_build(data: &GerbeData, quad: Quadrature) -> TransgressedBundle {
    TransgressedBundle {
        data: data.clone(),
        quad,
    }
}

impl TransgressedBundle {
    pub fn f(&self, l: &LoopArrow) -> Result<Scalar, TransgressionError> {
        f_eval(&self.data, l, self.quad)
    }

    pub fn delta(&self, g: &Groupoid, lp: &SegmentedLoop, xi: &LoopTangent) -> Result<Complex64, TransgressionError> {
        delta_eval(g, &self.data, lp, xi, self.quad)
    }

    /// `F(Λ∘Ω) / (F(Λ) F(Ω))`.
    pub fn multiplicativity_defect(&self, g: &Groupoid, l: &LoopArrow, o: &LoopArrow) -> Result<Scalar, TransgressionError> {
        let lo = crate::loopspace::compose_loop_arrows(g, l, o)?;
        Ok(self.f(&lo)?.div(self.f(l)?.mul(self.f(o)?)))
    }
}

fn composable(g: &Groupoid, arrows: &[LoopArrow]) -> Result<(), TransgressionError> {
    for (j, w) in arrows.windows(2).enumerate() {
        if w[0].target.partition != w[1].source.partition || loop_distance(g, &w[0].target, &w[1].source) > 1e-10 {
            return Err(TransgressionError::NotComposable { index: j, next: j + 1 });
        }
    }
    Ok(())
}

/// Flat `τₙ` on a chain `Λ¹ … Λⁿ⁻¹` of composable loop arrows:
/// `exp(Σ ∫ ψ⁰ᵢ*θ) · ∏ᵢ ∏ⱼ ω(k¹ᵢ … kʲᵢ, cʲᵢ, kʲ⁺¹ᵢ₊₁ … kⁿ⁻¹ᵢ₊₁)^{(−1)^{j+n}}`,
/// each factor evaluated at `ψ⁰ᵢ(αᵢ)`; `ψʲ` is the source of `Λʲ⁺¹`, `cʲ` its arrows.
pub fn tau_n_flat_eval(
    g: &Groupoid,
    data: &FlatNData,
    arrows: &[LoopArrow],
    quad: Quadrature,
) -> Result<Scalar, TransgressionError> {
    let n = data.n;
    if arrows.len() + 1 != n {
        return Err(TransgressionError::WrongArity {
            expected: n - 1,
            found: arrows.len(),
        });
    }
    composable(g, arrows)?;
    let base = &arrows[0].source;
    let segs = base.len();
    let loops: Vec<&SegmentedLoop> = std::iter::once(base).chain(arrows.iter().map(|a| &a.target)).collect();
    let mut integral = Complex64::new(0.0, 0.0);
    let mut acc = Scalar::one();
    for i in 0..segs {
        let comp = base.segments[i].comp;
        let next = (i + 1) % segs;
        if !data.theta.is_zero() {
            let key = NerveKey::new(comp, arrows.iter().map(|a| a.labels[i]).collect());
            integral += integrate_along(&data.theta.get(&key), &base.segments[i].carrier, base.interval(i), quad)?;
        }
        let x = base.arrow_point(i);
        for (j, lp) in loops.iter().enumerate() {
            let mut labels: Vec<usize> = arrows[..j].iter().map(|a| a.labels[i]).collect();
            labels.push(lp.arrows[i]);
            labels.extend(arrows[j..].iter().map(|a| a.labels[next]));
            let v = data.omega.eval(&NerveKey::new(comp, labels), &x);
            acc = acc.mul(if (j + n).is_multiple_of(2) { v } else { v.inv() });
        }
    }
    Ok(times_exp(acc, integral))
}

/// `d log F` along a one-parameter family by a central, branch-free difference.
pub fn dlog_f_fd(
    g: &Groupoid,
    b: &TransgressedBundle,
    fam: &LoopFamily,
    step: f64,
) -> Result<Complex64, TransgressionError> {
    if fam.params != 1 {
        return Err(TransgressionError::FamilyArity(fam.params));
    }
    let plus = b.f(&fam.slice(g, &[step])?)?;
    let minus = b.f(&fam.slice(g, &[-step])?)?;
    let r = plus.div(minus).to_c64();
    if (r - 1.0).norm() > MAX_FD_RATIO_DEVIATION {
        return Err(TransgressionError::StepTooLarge {
            step,
            ratio: format!("{}", r),
        });
    }
    Ok(r.ln() / (2.0 * step))
}

/// `|d log F(ν) + Δ_φ(ζ) − Δ_ψ(ξ)|` for the family direction `ν`.
pub fn connection_mismatch(
    g: &Groupoid,
    b: &TransgressedBundle,
    fam: &LoopFamily,
    step: f64,
) -> Result<f64, TransgressionError> {
    let dlog = dlog_f_fd(g, b, fam, step)?;
    let base = fam.base(g)?;
    let xi = fam.source_tangent(0);
    let zeta = fam.target_tangent(g, 0)?;
    let delta = b.delta(g, &base.target, &zeta)? - b.delta(g, &base.source, &xi)?;
    Ok((dlog + delta).norm())
}

/// `−d log H` along the source loops of a one-parameter family.
pub fn dlog_h_fd(g: &Groupoid, h: &HolonomyMap, fam: &LoopFamily, step: f64) -> Result<Complex64, TransgressionError> {
    if fam.params != 1 {
        return Err(TransgressionError::FamilyArity(fam.params));
    }
    let plus = h.eval(&fam.source_at(g, &[step])?)?;
    let minus = h.eval(&fam.source_at(g, &[-step])?)?;
    let r = plus.div(minus).to_c64();
    if (r - 1.0).norm() > MAX_FD_RATIO_DEVIATION {
        return Err(TransgressionError::StepTooLarge {
            step,
            ratio: format!("{}", r),
        });
    }
    Ok(-r.ln() / (2.0 * step))
}

/// Samples on which to compare both sides of `τ₂ ∘ D = (δ − d) ∘ τ₁`.
#[derive(Clone, Debug, Default)]
pub struct SquareSamples {
    pub arrows: Vec<LoopArrow>,
    pub families: Vec<LoopFamily>,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SquareOptions {
    pub tol_function: f64,
    pub tol_form: f64,
    pub step: f64,
    /// Quadrature for the function part.
    pub quad: Quadrature,
    /// Quadrature for the form part; fixed, so that finite differences are smooth.
    pub quad_fd: Quadrature,
}

impl Default for SquareOptions {
    fn default() -> Self {
        SquareOptions {
            tol_function: 1e-9,
            tol_form: 1e-4,
            step: DEFAULT_STEP,
            quad: Quadrature::Adaptive { n0: 256, target: 1e-12 },
            quad_fd: Quadrature::Fixed(2048),
        }
    }
}

/// Function part `F(Λ) = H(φ)/H(ψ)` and form part `Δ = −d log H`, for `F`, `Δ`
/// built from `D(f, G)` and `H` from `(f, G)`.
pub fn check_commutation_square(
    g: &Groupoid,
    line: &LineData,
    samples: &SquareSamples,
    opts: &SquareOptions,
) -> Result<Report, TransgressionError> {
    let gerbe = total_coboundary_line(g, line);
    let bundle = tau2_build(&gerbe, opts.quad);
    let hol = HolonomyMap {
        data: line.clone(),
        quad: opts.quad,
    };
    let mut r = Report::new();
    let mut w = Worst::new();
    for (idx, l) in samples.arrows.iter().enumerate() {
        let lhs = bundle.f(l)?;
        let rhs = hol.delta(l)?;
        w.record(lhs.ratio_residual(&rhs), lhs.is_exact() && rhs.is_exact(), || format!("loop arrow #{}", idx));
    }
    r.push(w.into_check("square: F = delta H", opts.tol_function));
    let hol = HolonomyMap {
        quad: opts.quad_fd,
        ..hol
    };
    let mut w = Worst::new();
    for (idx, fam) in samples.families.iter().enumerate() {
        let base = fam.source_at(g, &[0.0])?;
        let xi = fam.source_tangent(0);
        let lhs = delta_eval(g, &gerbe, &base, &xi, opts.quad_fd)?;
        let exact = g.dim() == 0;
        let residual = if exact {
            lhs.norm()
        } else {
            (lhs - dlog_h_fd(g, &hol, fam, opts.step)?).norm()
        };
        w.record(residual, exact, || format!("family #{}", idx));
    }
    if samples.families.is_empty() {
        w.record(0.0, true, String::new);
    }
    r.push(w.into_check("square: Delta = -dlog H", opts.tol_form));
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::deligne::{cech_delta, Cell, CochainFunction, FormCochain};
    use crate::form::{parse_expr, PForm};
    use crate::group::FiniteGroup;
    use crate::groupoid::ActionGroupoid;
    use crate::loopspace::{build_loop_arrow, twisted_loop, Carrier, PathSegment, Partition};
    use num_rational::Rational64;

    fn epsilon_gerbe(x: &Groupoid) -> GerbeData {
        let g = x.group().unwrap().clone();
        let mut h = CochainFunction::one(2);
        for a in g.elements() {
            for b in g.elements() {
                let p = (g.coords(a).unwrap()[0] * g.coords(b).unwrap()[1]) as i64;
                h.set(NerveKey::new(0, vec![a, b]), Cell::Exact(Scalar::phase(Rational64::new(p, 2))));
            }
        }
        GerbeData {
            h,
            ..GerbeData::trivial(x)
        }
    }

    fn param(s: &str) -> Carrier {
        Carrier::Param(vec![parse_expr(s).unwrap()])
    }

    #[test]
    fn exp_of_constant_form() {
        let x = Groupoid::Action(ActionGroupoid::trivial_on_torus(FiniteGroup::trivial(), 1));
        let a = FormCochain::zero(0, 1, 1).with(
            NerveKey::object(0),
            PForm::from_terms(1, 1, [(vec![0], parse_expr("0.7*i").unwrap())]).unwrap(),
        );
        let line = LineData {
            h: CochainFunction::one(1),
            a,
        };
        let lp = twisted_loop(&x, param("t"), 0).unwrap();
        let h = tau1_eval(&line, &lp, Quadrature::default()).unwrap();
        assert!((h.to_c64() - Complex64::new(0.0, 0.7).exp()).norm() < 1e-12);
    }

    #[test]
    fn torsion_ratio_is_minus_one() {
        let x = Groupoid::Action(ActionGroupoid::trivial_on_points(FiniteGroup::parse("Z/2xZ/2").unwrap(), 1));
        let gerbe = epsilon_gerbe(&x);
        let g = x.group().unwrap();
        let (e1, e2) = (g.element_by_name("(1,0)").unwrap(), g.element_by_name("(0,1)").unwrap());
        let lp = twisted_loop(&x, Carrier::Param(vec![]), e1).unwrap();
        let l = build_loop_arrow(&x, &lp, vec![e2]).unwrap();
        let f = f_eval(&gerbe, &l, Quadrature::default()).unwrap();
        assert_eq!(f, Scalar::phase(Rational64::new(1, 2)));
        let direct = f_global_quotient(&x, &gerbe, &Carrier::Param(vec![]), e1, e2, Quadrature::default()).unwrap();
        assert_eq!(direct, f);
    }

    #[test]
    fn n_equals_two_reduces_to_f() {
        let x = Groupoid::Action(ActionGroupoid::trivial_on_points(FiniteGroup::parse("Z/2xZ/2").unwrap(), 1));
        let gerbe = epsilon_gerbe(&x);
        let flat = gerbe.as_flat();
        for c in 0..4 {
            let lp = twisted_loop(&x, Carrier::Param(vec![]), c).unwrap();
            for k in 0..4 {
                let l = build_loop_arrow(&x, &lp, vec![k]).unwrap();
                let f = f_eval(&gerbe, &l, Quadrature::default()).unwrap();
                let t = tau_n_flat_eval(&x, &flat, std::slice::from_ref(&l), Quadrature::default()).unwrap();
                assert_eq!(f, t);
            }
        }
    }

    #[test]
    fn b_only_connection() {
        let x = Groupoid::Action(ActionGroupoid::trivial_on_torus(FiniteGroup::trivial(), 2));
        let b = FormCochain::zero(0, 2, 2).with(
            NerveKey::object(0),
            PForm::from_terms(2, 2, [(vec![0, 1], parse_expr("1.5").unwrap())]).unwrap(),
        );
        let gerbe = GerbeData {
            b,
            ..GerbeData::trivial(&x)
        };
        let lp = twisted_loop(&x, Carrier::Param(vec![parse_expr("t").unwrap(), parse_expr("0").unwrap()]), 0).unwrap();
        let xi = LoopTangent {
            fields: vec![Carrier::constant(&[0.0, 1.0])],
        };
        let d = delta_eval(&x, &gerbe, &lp, &xi, Quadrature::default()).unwrap();
        assert!((d - Complex64::new(1.5, 0.0)).norm() < 1e-12);
        let scaled = delta_eval(&x, &gerbe, &lp, &xi.scale(-2.0), Quadrature::default()).unwrap();
        assert!((scaled + 2.0 * d).norm() < 1e-12);
    }

    fn smooth_line(x: &Groupoid) -> LineData {
        // f(x, g) depends on the arrow through the action; G a periodic 1-form
        let mut f = CochainFunction::one(1);
        for key in x.nerve_keys(1) {
            let e = parse_expr(&format!("exp(i*(0.3*sin(2*pi*x1) + 0.1*{}*cos(2*pi*x1)))", key.labels[0] + 1)).unwrap();
            f.set(key, Cell::Expr(e));
        }
        let a = FormCochain::zero(0, 1, 1).with(
            NerveKey::object(0),
            PForm::from_terms(1, 1, [(vec![0], parse_expr("i*(0.4 + 0.2*cos(2*pi*x1))").unwrap())]).unwrap(),
        );
        LineData { h: f, a }
    }

    #[test]
    fn square_on_the_circle_quotient() {
        let x = Groupoid::Action(ActionGroupoid::translation_torus(FiniteGroup::cyclic(2), 1));
        let line = smooth_line(&x);
        let lp = twisted_loop(&x, param("t/2 + 0.1*sin(2*pi*t)"), 1).unwrap();
        let arrows = vec![build_loop_arrow(&x, &lp, vec![1]).unwrap(), build_loop_arrow(&x, &lp, vec![0]).unwrap()];
        let fam = LoopFamily::new(
            &x,
            Partition::trivial(),
            vec![PathSegment::new(0, param("t/2 + 0.1*sin(2*pi*t) + s*(0.3 + 0.2*cos(2*pi*t))"))],
            vec![1],
            vec![1],
            1,
            0.01,
        )
        .unwrap();
        let samples = SquareSamples {
            arrows,
            families: vec![fam.clone()],
        };
        let r = check_commutation_square(&x, &line, &samples, &SquareOptions::default()).unwrap();
        assert!(r.pass(), "{}", r);

        let bundle = tau2_build(&total_coboundary_line(&x, &line), Quadrature::Fixed(1024));
        let m = connection_mismatch(&x, &bundle, &fam, 1e-3).unwrap();
        assert!(m < 1e-4, "{}", m);
    }

    #[test]
    fn composite_of_gauge_is_multiplicative() {
        let x = Groupoid::Action(ActionGroupoid::translation_torus(FiniteGroup::cyclic(2), 1));
        let line = smooth_line(&x);
        let gerbe = total_coboundary_line(&x, &line);
        assert_eq!(cech_delta(&x, &gerbe.h).level, 3);
        let bundle = tau2_build(&gerbe, Quadrature::default());
        let lp = twisted_loop(&x, param("t/2 + 0.1*sin(2*pi*t)"), 1).unwrap();
        let a = build_loop_arrow(&x, &lp, vec![1]).unwrap();
        let b = build_loop_arrow(&x, &a.target, vec![1]).unwrap();
        let d = bundle.multiplicativity_defect(&x, &a, &b).unwrap();
        assert!(d.distance_to_one() < 1e-9);
    }
}
