//! Čech–Deligne cochains on a groupoid nerve: function parts valued in ℂ×,
//! form parts as symbolic p-forms, and their coboundaries.
//!
//! No logarithm of a cochain value is ever taken. Conditions involving
//! `d log h` are checked in exponentiated form along paths.

use std::collections::BTreeMap;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::form::{AffineMap, Domain, Env, Expr, FormError, PForm};
use crate::groupoid::{Groupoid, NerveKey};
use crate::loopspace::quadrature::{adaptive, QuadratureError, DEFAULT_N, DEFAULT_TARGET};
use crate::report::{Report, Worst};
use crate::scalar::Scalar;

pub const DEFAULT_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DeligneError {
    #[error("cannot certify that `{expr}` is nonvanishing on component {comp}")]
    PossibleZero { comp: usize, expr: String },
    #[error("cochain level {found} where {expected} was expected")]
    LevelUnsupported { expected: usize, found: usize },
    #[error("expression `{expr}` is not periodic in x{axis}")]
    NotPeriodic { expr: String, axis: usize },
    #[error("expression `{expr}` uses a symbol unavailable on the base")]
    BadSymbol { expr: String },
    #[error(transparent)]
    Form(#[from] FormError),
    #[error(transparent)]
    Quadrature(#[from] QuadratureError),
}

/// One value of a ℂ×-valued cochain: an exact scalar or a function of the
/// base coordinates.
#[derive(Clone, Debug, PartialEq)]
pub enum Cell {
    Exact(Scalar),
    Expr(Expr),
}

impl Cell {
    pub fn one() -> Cell {
        Cell::Exact(Scalar::one())
    }

    pub fn eval(&self, x: &[f64]) -> Scalar {
        match self {
            Cell::Exact(s) => *s,
            Cell::Expr(e) => Scalar::num(e.eval(&Env::at(x))),
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Cell::Exact(s) if s.is_exact())
    }

    pub fn to_expr(&self) -> Expr {
        match self {
            Cell::Exact(s) => Expr::complex(s.to_c64()),
            Cell::Expr(e) => e.clone(),
        }
    }

    pub fn compose(&self, map: &AffineMap) -> Cell {
        match self {
            Cell::Exact(_) => self.clone(),
            Cell::Expr(e) => Cell::Expr(e.compose_affine(map)),
        }
    }

    pub fn mul(&self, o: &Cell) -> Cell {
        match (self, o) {
            (Cell::Exact(a), Cell::Exact(b)) => Cell::Exact(a.mul(*b)),
            _ => Cell::Expr(Expr::mul(self.to_expr(), o.to_expr())),
        }
    }

    pub fn inv(&self) -> Cell {
        match self {
            Cell::Exact(a) => Cell::Exact(a.inv()),
            Cell::Expr(e) => Cell::Expr(Expr::pow(e.clone(), -1)),
        }
    }

    pub fn powi(&self, n: i64) -> Cell {
        match n {
            1 => self.clone(),
            -1 => self.inv(),
            _ => match self {
                Cell::Exact(a) => Cell::Exact(a.powi(n)),
                Cell::Expr(e) => Cell::Expr(Expr::pow(e.clone(), n as i32)),
            },
        }
    }

    /// `d log` of the cell as a 1-form (zero for constants).
    pub fn dlog(&self, dim: usize) -> PForm {
        match self {
            Cell::Exact(_) => PForm::zero(1, dim),
            Cell::Expr(e) => PForm::dlog(e, dim),
        }
    }
}

/// ℂ×-valued function on nerve level `level`; missing keys take `default`.
#[derive(Clone, Debug, PartialEq)]
pub struct CochainFunction {
    pub level: usize,
    pub cells: BTreeMap<NerveKey, Cell>,
    pub default: Cell,
}

impl CochainFunction {
    pub fn one(level: usize) -> CochainFunction {
        CochainFunction {
            level,
            cells: BTreeMap::new(),
            default: Cell::one(),
        }
    }

    pub fn with(mut self, key: NerveKey, cell: Cell) -> CochainFunction {
        assert_eq!(key.level(), self.level);
        self.cells.insert(key, cell);
        self
    }

    pub fn set(&mut self, key: NerveKey, cell: Cell) {
        assert_eq!(key.level(), self.level);
        self.cells.insert(key, cell);
    }

    pub fn get(&self, key: &NerveKey) -> &Cell {
        self.cells.get(key).unwrap_or(&self.default)
    }

    pub fn eval(&self, key: &NerveKey, x: &[f64]) -> Scalar {
        self.get(key).eval(x)
    }

    pub fn is_exact(&self) -> bool {
        self.default.is_exact() && self.cells.values().all(Cell::is_exact)
    }

    pub fn mul(&self, o: &CochainFunction) -> CochainFunction {
        assert_eq!(self.level, o.level);
        let mut out = CochainFunction {
            level: self.level,
            cells: BTreeMap::new(),
            default: self.default.mul(&o.default),
        };
        for k in self.cells.keys().chain(o.cells.keys()) {
            out.cells.insert(k.clone(), self.get(k).mul(o.get(k)));
        }
        out
    }

    pub fn inv(&self) -> CochainFunction {
        CochainFunction {
            level: self.level,
            cells: self.cells.iter().map(|(k, c)| (k.clone(), c.inv())).collect(),
            default: self.default.inv(),
        }
    }

    pub fn exprs(&self) -> impl Iterator<Item = (&NerveKey, &Expr)> {
        self.cells.iter().filter_map(|(k, c)| match c {
            Cell::Expr(e) => Some((k, e)),
            Cell::Exact(_) => None,
        })
    }

    /// `d log` of every cell.
    pub fn dlog(&self, g: &Groupoid) -> FormCochain {
        let mut out = FormCochain::zero(self.level, 1, g.dim());
        for (k, c) in &self.cells {
            out.set(k.clone(), c.dlog(g.dim()));
        }
        out
    }
}

/// Form-valued cochain: a `degree`-form on each key's base coordinates.
#[derive(Clone, Debug, PartialEq)]
pub struct FormCochain {
    pub level: usize,
    pub degree: usize,
    pub dim: usize,
    pub cells: BTreeMap<NerveKey, PForm>,
}

impl FormCochain {
    pub fn zero(level: usize, degree: usize, dim: usize) -> FormCochain {
        FormCochain {
            level,
            degree,
            dim,
            cells: BTreeMap::new(),
        }
    }

    pub fn with(mut self, key: NerveKey, w: PForm) -> FormCochain {
        self.set(key, w);
        self
    }

    pub fn set(&mut self, key: NerveKey, w: PForm) {
        assert_eq!(key.level(), self.level);
        assert_eq!(w.degree(), self.degree);
        if w.is_zero() {
            self.cells.remove(&key);
        } else {
            self.cells.insert(key, w);
        }
    }

    pub fn get(&self, key: &NerveKey) -> PForm {
        self.cells
            .get(key)
            .cloned()
            .unwrap_or_else(|| PForm::zero(self.degree, self.dim))
    }

    pub fn is_zero(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn add(&self, o: &FormCochain) -> FormCochain {
        assert_eq!((self.level, self.degree), (o.level, o.degree));
        let mut out = self.clone();
        for (k, w) in &o.cells {
            let sum = out.get(k).add(w).expect("same shape");
            out.set(k.clone(), sum);
        }
        out
    }

    pub fn neg(&self) -> FormCochain {
        FormCochain {
            cells: self.cells.iter().map(|(k, w)| (k.clone(), w.neg())).collect(),
            ..self.clone()
        }
    }

    pub fn sub(&self, o: &FormCochain) -> FormCochain {
        self.add(&o.neg())
    }

    pub fn d(&self) -> FormCochain {
        let mut out = FormCochain::zero(self.level, self.degree + 1, self.dim);
        for (k, w) in &self.cells {
            out.set(k.clone(), w.exterior_d());
        }
        out
    }

    /// Čech coboundary `Σ (-1)^i δᵢ*`.
    pub fn delta(&self, g: &Groupoid) -> FormCochain {
        let mut out = FormCochain::zero(self.level + 1, self.degree, self.dim);
        for key in g.nerve_keys(self.level + 1) {
            let mut acc = PForm::zero(self.degree, self.dim);
            for i in 0..=key.level() {
                let (face, map) = g.face(&key, i);
                let Some(w) = self.cells.get(&face) else { continue };
                let pulled = w.pullback(&map).expect("maps match the base dimension");
                acc = if i % 2 == 0 { acc.add(&pulled) } else { acc.sub(&pulled) }.expect("same shape");
            }
            out.set(key, acc.pruned());
        }
        out
    }

    pub fn eval(&self, key: &NerveKey, x: &[f64], vectors: &[Vec<f64>]) -> Complex64 {
        match self.cells.get(key) {
            Some(w) => w.eval(x, vectors).expect("shape checked on construction"),
            None => Complex64::new(0.0, 0.0),
        }
    }
}

/// Čech coboundary of a ℂ×-valued cochain, multiplicatively.
pub fn cech_delta(g: &Groupoid, s: &CochainFunction) -> CochainFunction {
    let mut out = CochainFunction::one(s.level + 1);
    for key in g.nerve_keys(s.level + 1) {
        let mut acc = Cell::one();
        for i in 0..=key.level() {
            let (face, map) = g.face(&key, i);
            let c = s.get(&face).compose(&map);
            acc = acc.mul(&c.powi(if i % 2 == 0 { 1 } else { -1 }));
        }
        out.set(key, acc);
    }
    out
}

/// `(h, A)`: `h` on arrows, `A` a 1-form on objects.
#[derive(Clone, Debug, PartialEq)]
pub struct LineData {
    pub h: CochainFunction,
    pub a: FormCochain,
}

/// `(h, A, B)`: `h` on composable pairs, `A` a 1-form on arrows, `B` a 2-form on objects.
#[derive(Clone, Debug, PartialEq)]
pub struct GerbeData {
    pub h: CochainFunction,
    pub a: FormCochain,
    pub b: FormCochain,
}

/// Image of gerbe data under the total coboundary.
#[derive(Clone, Debug, PartialEq)]
pub struct GerbeCoboundary {
    pub h: CochainFunction,
    pub a: FormCochain,
    pub b: FormCochain,
}

/// `(ω, θ¹)` with `ω` on level `n`; `θ¹` on level `n − 1` (zero when flat).
#[derive(Clone, Debug, PartialEq)]
pub struct FlatNData {
    pub n: usize,
    pub omega: CochainFunction,
    pub theta: FormCochain,
}

impl LineData {
    pub fn trivial(g: &Groupoid) -> LineData {
        LineData {
            h: CochainFunction::one(1),
            a: FormCochain::zero(0, 1, g.dim()),
        }
    }

    /// Pointwise product (sum of forms).
    pub fn mul(&self, o: &LineData) -> LineData {
        LineData {
            h: self.h.mul(&o.h),
            a: self.a.add(&o.a),
        }
    }
}

impl GerbeData {
    pub fn trivial(g: &Groupoid) -> GerbeData {
        GerbeData {
            h: CochainFunction::one(2),
            a: FormCochain::zero(1, 1, g.dim()),
            b: FormCochain::zero(0, 2, g.dim()),
        }
    }

    pub fn mul(&self, o: &GerbeData) -> GerbeData {
        GerbeData {
            h: self.h.mul(&o.h),
            a: self.a.add(&o.a),
            b: self.b.add(&o.b),
        }
    }

    pub fn is_flat(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    pub fn as_flat(&self) -> FlatNData {
        FlatNData {
            n: 2,
            omega: self.h.clone(),
            theta: self.a.clone(),
        }
    }
}

impl FlatNData {
    pub fn flat(n: usize, omega: CochainFunction, dim: usize) -> FlatNData {
        FlatNData {
            n,
            theta: FormCochain::zero(n - 1, 1, dim),
            omega,
        }
    }
}

/// `D(h, A) = (δh, δA + d log h, dA)`.
pub fn total_coboundary_line(g: &Groupoid, c: &LineData) -> GerbeData {
    GerbeData {
        h: cech_delta(g, &c.h),
        a: c.a.delta(g).add(&c.h.dlog(g)),
        b: c.a.d(),
    }
}

/// `D(h, A, B) = (δh, δA − d log h, δB − dA)`.
pub fn total_coboundary_gerbe(g: &Groupoid, c: &GerbeData) -> GerbeCoboundary {
    GerbeCoboundary {
        h: cech_delta(g, &c.h),
        a: c.a.delta(g).sub(&c.h.dlog(g)),
        b: c.b.delta(g).sub(&c.a.d()),
    }
}

/// `D(ω, θ¹) = (δω, δθ¹ + (−1)^{n+1} d log ω, dθ¹)`.
pub fn total_coboundary_flat(g: &Groupoid, c: &FlatNData) -> (CochainFunction, FormCochain, FormCochain) {
    let dl = c.omega.dlog(g);
    let form = if c.n.is_multiple_of(2) {
        c.theta.delta(g).sub(&dl)
    } else {
        c.theta.delta(g).add(&dl)
    };
    (cech_delta(g, &c.omega), form, c.theta.d())
}

/// `(δf, −d log f)`, after certifying that `f` never vanishes.
pub fn gauge_coboundary(g: &Groupoid, f: &CochainFunction) -> Result<LineData, DeligneError> {
    if f.level != 0 {
        return Err(DeligneError::LevelUnsupported {
            expected: 0,
            found: f.level,
        });
    }
    for comp in 0..g.components() {
        let key = NerveKey::object(comp);
        let cell = f.get(&key);
        let ok = match cell {
            Cell::Exact(s) => !s.is_zero(),
            Cell::Expr(e) => {
                let dom = g.key_interval_domain(&key).unwrap_or_else(|| Domain::boxed(Vec::new()));
                crate::form::certify_nonvanishing(e, &dom)
            }
        };
        if !ok {
            return Err(DeligneError::PossibleZero {
                comp,
                expr: cell.to_expr().to_string(),
            });
        }
    }
    Ok(LineData {
        h: cech_delta(g, f),
        a: f.dlog(g).neg(),
    })
}

/// Check expression cells: only coordinate symbols within the base
/// dimension, certified `log` arguments, and periodicity on tori.
pub fn validate_expr(g: &Groupoid, key: &NerveKey, e: &Expr) -> Result<(), DeligneError> {
    let bad = || DeligneError::BadSymbol { expr: e.to_string() };
    if e.coord_arity() > g.dim() || e.family_arity() > 0 || e.mentions(crate::form::Var::T) {
        return Err(bad());
    }
    if let Some(dom) = g.key_interval_domain(key) {
        crate::form::validate_logs(e, &dom)?;
    }
    if g.is_periodic() && g.as_action().is_some() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for axis in 0..g.dim() {
            for _ in 0..8 {
                let x: Vec<f64> = (0..g.dim()).map(|_| rng.gen::<f64>()).collect();
                let mut y = x.clone();
                y[axis] += 1.0;
                let (a, b) = (e.eval(&Env::at(&x)), e.eval(&Env::at(&y)));
                if (a - b).norm() > 1e-9 * (1.0 + a.norm()) {
                    return Err(DeligneError::NotPeriodic {
                        expr: e.to_string(),
                        axis: axis + 1,
                    });
                }
            }
        }
    }
    Ok(())
}

pub fn validate_function(g: &Groupoid, f: &CochainFunction) -> Result<(), DeligneError> {
    for (k, e) in f.exprs() {
        validate_expr(g, k, e)?;
    }
    if let Cell::Expr(e) = &f.default {
        for k in g.nerve_keys(f.level) {
            validate_expr(g, &k, e)?;
        }
    }
    Ok(())
}

pub fn validate_forms(g: &Groupoid, w: &FormCochain) -> Result<(), DeligneError> {
    if w.dim != g.dim() {
        return Err(FormError::DimensionMismatch {
            expected: g.dim(),
            found: w.dim,
        }
        .into());
    }
    for (k, form) in &w.cells {
        for (_, c) in form.terms() {
            validate_expr(g, k, c)?;
        }
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct VerifyOptions {
    pub tol: f64,
    /// Paths per exponentiated-integral test.
    pub paths: usize,
    /// Point samples per pointwise test.
    pub samples: usize,
    pub seed: u64,
    /// Points per key for function tests on continuous bases.
    pub points_per_key: usize,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            tol: DEFAULT_TOL,
            paths: 24,
            samples: 120,
            seed: 0,
            points_per_key: 3,
        }
    }
}

const MARGIN: f64 = 1e-3;

/// `|c − 1|` over every key of level `c.level` (and sampled points on continuous bases).
pub fn function_residual(g: &Groupoid, c: &CochainFunction, opts: &VerifyOptions, rng: &mut ChaCha8Rng) -> Worst {
    let mut worst = Worst::new();
    for key in g.nerve_keys(c.level) {
        let cell = c.get(&key);
        if g.dim() == 0 || matches!(cell, Cell::Exact(_)) {
            let v = cell.eval(&[]);
            worst.record(v.distance_to_one(), cell.is_exact(), || g.describe_key(&key));
            continue;
        }
        for _ in 0..opts.points_per_key {
            let Some(x) = g.sample_base(&key, rng, MARGIN) else { break };
            let v = cell.eval(&x);
            worst.record(v.distance_to_one(), false, || g.describe_point(&key, &x));
        }
    }
    worst
}

fn random_vector(rng: &mut ChaCha8Rng, d: usize) -> Vec<f64> {
    (0..d).map(|_| rng.gen_range(-1.0..1.0)).collect()
}

/// |w| evaluated on random tangent vectors at sampled (key, point) pairs.
pub fn form_residual(
    g: &Groupoid,
    w: &FormCochain,
    opts: &VerifyOptions,
    rng: &mut ChaCha8Rng,
) -> Worst {
    let mut worst = Worst::new();
    let keys = g.nerve_keys(w.level);
    if g.dim() == 0 || w.degree > g.dim() || keys.is_empty() {
        worst.record(0.0, true, String::new);
        return worst;
    }
    for s in 0..opts.samples {
        let key = &keys[s % keys.len()];
        let Some(x) = g.sample_base(key, rng, MARGIN) else { continue };
        let vs: Vec<Vec<f64>> = (0..w.degree).map(|_| random_vector(rng, g.dim())).collect();
        let v = w.eval(key, &x, &vs);
        worst.record(v.norm(), false, || g.describe_point(key, &x));
    }
    worst
}

/// `∫_γ w` along the straight path from `x0` to `x1`.
pub fn line_integral(w: &PForm, x0: &[f64], x1: &[f64]) -> Result<Complex64, DeligneError> {
    let v: Vec<f64> = x0.iter().zip(x1).map(|(a, b)| b - a).collect();
    let est = adaptive(
        |t| {
            let x: Vec<f64> = x0.iter().zip(&v).map(|(a, d)| a + t * d).collect();
            w.eval(&x, std::slice::from_ref(&v)).expect("1-form on matching dimension")
        },
        0.0,
        1.0,
        DEFAULT_N / 8,
        DEFAULT_TARGET * 1e-2,
    )?;
    Ok(est.value)
}

/// Branch-free test of `δw = ± d log c`: `exp(∫_γ w) · (c(γ₁)/c(γ₀))^sign = 1`
/// along straight paths in the domain of each key.
fn exponentiated_path_residual(
    g: &Groupoid,
    w: &FormCochain,
    c: &CochainFunction,
    sign: i64,
    opts: &VerifyOptions,
    rng: &mut ChaCha8Rng,
) -> Result<Worst, DeligneError> {
    let mut worst = Worst::new();
    let keys = g.nerve_keys(w.level);
    if g.dim() == 0 || keys.is_empty() {
        worst.record(0.0, true, String::new);
        return Ok(worst);
    }
    for p in 0..opts.paths {
        let key = &keys[p % keys.len()];
        let (Some(x0), Some(x1)) = (g.sample_base(key, rng, MARGIN), g.sample_base(key, rng, MARGIN)) else {
            continue;
        };
        let integral = line_integral(&w.get(key), &x0, &x1)?;
        let ratio = c.eval(key, &x1).div(c.eval(key, &x0)).powi(sign);
        let v = Scalar::num(integral.exp()).mul(ratio);
        worst.record(v.distance_to_one(), false, || g.describe_point(key, &x0));
    }
    Ok(worst)
}

/// Cocycle conditions for line data: `δh = 1` and `δA + d log h = 0`.
pub fn verify_line(g: &Groupoid, c: &LineData, opts: &VerifyOptions) -> Result<Report, DeligneError> {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut r = Report::new();
    r.push(function_residual(g, &cech_delta(g, &c.h), opts, &mut rng).into_check("line: delta h = 1", opts.tol));
    let da = c.a.delta(g);
    r.push(exponentiated_path_residual(g, &da, &c.h, 1, opts, &mut rng)?.into_check("line: delta A + dlog h = 0", opts.tol));
    Ok(r)
}

/// Cocycle conditions for gerbe data: `δh = 1`, `δA = d log h`, `δB = dA`.
pub fn verify_gerbe(g: &Groupoid, c: &GerbeData, opts: &VerifyOptions) -> Result<Report, DeligneError> {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut r = Report::new();
    r.push(function_residual(g, &cech_delta(g, &c.h), opts, &mut rng).into_check("gerbe: delta h = 1", opts.tol));
    let da = c.a.delta(g);
    r.push(exponentiated_path_residual(g, &da, &c.h, -1, opts, &mut rng)?.into_check("gerbe: delta A = dlog h", opts.tol));
    let db = c.b.delta(g).sub(&c.a.d());
    r.push(form_residual(g, &db, opts, &mut rng).into_check("gerbe: delta B = dA", opts.tol));
    Ok(r)
}

/// Cocycle conditions for flat / semi-flat degree-`n` data.
pub fn verify_flat(g: &Groupoid, c: &FlatNData, opts: &VerifyOptions) -> Result<Report, DeligneError> {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut r = Report::new();
    r.push(function_residual(g, &cech_delta(g, &c.omega), opts, &mut rng).into_check("flat: delta omega = 1", opts.tol));
    let sign = if c.n.is_multiple_of(2) { -1 } else { 1 };
    let dt = c.theta.delta(g);
    r.push(exponentiated_path_residual(g, &dt, &c.omega, sign, opts, &mut rng)?.into_check("flat: delta theta = dlog omega", opts.tol));
    r.push(form_residual(g, &c.theta.d(), opts, &mut rng).into_check("flat: d theta = 0", opts.tol));
    Ok(r)
}

/// Largest deviation of gerbe-shaped data from the trivial tuple.
pub fn triviality_residual(g: &Groupoid, c: &GerbeData, opts: &VerifyOptions) -> Report {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut r = Report::new();
    r.push(function_residual(g, &c.h, opts, &mut rng).into_check("h trivial", opts.tol));
    r.push(form_residual(g, &c.a, opts, &mut rng).into_check("A trivial", opts.tol));
    r.push(form_residual(g, &c.b, opts, &mut rng).into_check("B trivial", opts.tol));
    r
}

pub fn coboundary_triviality(g: &Groupoid, c: &GerbeCoboundary, opts: &VerifyOptions) -> Report {
    triviality_residual(
        g,
        &GerbeData {
            h: c.h.clone(),
            a: c.a.clone(),
            b: c.b.clone(),
        },
        opts,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::form::parse_expr;
    use crate::group::FiniteGroup;
    use crate::groupoid::ActionGroupoid;
    use num_rational::Rational64;

    fn klein() -> (Groupoid, FiniteGroup) {
        let g = FiniteGroup::parse("Z/2xZ/2").unwrap();
        (Groupoid::Action(ActionGroupoid::trivial_on_points(g.clone(), 1)), g)
    }

    /// `(−1)^{a₁b₂}` on `Z/2×Z/2`.
    fn epsilon(g: &FiniteGroup) -> CochainFunction {
        let mut h = CochainFunction::one(2);
        for a in g.elements() {
            for b in g.elements() {
                let (ca, cb) = (g.coords(a).unwrap(), g.coords(b).unwrap());
                let p = (ca[0] * cb[1]) as i64;
                h.set(NerveKey::new(0, vec![a, b]), Cell::Exact(Scalar::phase(Rational64::new(p, 2))));
            }
        }
        h
    }

    #[test]
    fn constant_function_has_trivial_delta() {
        let (x, _) = klein();
        let f = CochainFunction {
            level: 0,
            cells: BTreeMap::new(),
            default: Cell::Exact(Scalar::num(Complex64::new(2.0, 1.0))),
        };
        let d = cech_delta(&x, &f);
        for k in x.nerve_keys(1) {
            assert!(d.eval(&k, &[]).distance_to_one() < 1e-15);
        }
    }

    #[test]
    fn discrete_torsion_is_a_cocycle_exactly() {
        let (x, g) = klein();
        let h = epsilon(&g);
        let d = cech_delta(&x, &h);
        assert_eq!(d.cells.len(), 64);
        assert!(d.cells.values().all(|c| c.eval(&[]) == Scalar::one()));
        let gerbe = GerbeData {
            h,
            ..GerbeData::trivial(&x)
        };
        let r = verify_gerbe(&x, &gerbe, &VerifyOptions::default()).unwrap();
        assert!(r.pass(), "{}", r);
        assert!(r.checks.iter().all(|c| c.exact && c.residual == 0.0));
    }

    #[test]
    fn perturbed_torsion_names_the_tuple() {
        let (x, g) = klein();
        let mut h = epsilon(&g);
        h.set(NerveKey::new(0, vec![1, 2]), Cell::Exact(Scalar::phase(Rational64::new(1, 4))));
        let gerbe = GerbeData {
            h,
            ..GerbeData::trivial(&x)
        };
        let r = verify_gerbe(&x, &gerbe, &VerifyOptions::default()).unwrap();
        let c = r.get("gerbe: delta h = 1").unwrap();
        assert!(!c.pass);
        assert!(c.witness.as_ref().unwrap().contains("(0,1)"));
    }

    #[test]
    fn gauge_of_exponential_on_circle() {
        let x = Groupoid::Action(ActionGroupoid::trivial_on_torus(FiniteGroup::trivial(), 1));
        let f = CochainFunction {
            level: 0,
            cells: BTreeMap::new(),
            default: Cell::one(),
        }
        .with(NerveKey::object(0), Cell::Expr(parse_expr("exp(2*pi*i*x1)").unwrap()));
        let line = gauge_coboundary(&x, &f).unwrap();
        let a = line.a.get(&NerveKey::object(0));
        let v = a.eval(&[0.3], &[vec![1.0]]).unwrap();
        assert!((v - Complex64::new(0.0, -2.0 * std::f64::consts::PI)).norm() < 1e-12);
        let r = verify_line(&x, &line, &VerifyOptions::default()).unwrap();
        assert!(r.pass(), "{}", r);
        let h = line.h.eval(&NerveKey::new(0, vec![0]), &[0.4]);
        assert!(h.distance_to_one() < 1e-12);
    }

    #[test]
    fn possible_zero_is_rejected() {
        let x = Groupoid::Action(ActionGroupoid::trivial_on_torus(FiniteGroup::trivial(), 1));
        let f = CochainFunction::one(0).with(NerveKey::object(0), Cell::Expr(parse_expr("x1").unwrap()));
        assert!(matches!(gauge_coboundary(&x, &f), Err(DeligneError::PossibleZero { .. })));
    }

    #[test]
    fn double_coboundary_is_trivial() {
        let x = Groupoid::Action(ActionGroupoid::translation_torus(FiniteGroup::cyclic(2), 1));
        let f = parse_expr("exp(0.3*i*sin(2*pi*x1))").unwrap();
        let mut h = CochainFunction::one(1);
        for l in 0..2 {
            h.set(NerveKey::new(0, vec![l]), Cell::Expr(f.compose_affine(&x.arrow_map(0, l))));
        }
        let a = FormCochain::zero(0, 1, 1).with(
            NerveKey::object(0),
            PForm::from_terms(1, 1, [(vec![0], parse_expr("cos(2*pi*x1)").unwrap())]).unwrap(),
        );
        let line = LineData { h, a };
        let dd = total_coboundary_gerbe(&x, &total_coboundary_line(&x, &line));
        let r = coboundary_triviality(&x, &dd, &VerifyOptions::default());
        assert!(r.pass(), "{}", r);
    }

    #[test]
    fn non_periodic_torus_expression_is_rejected() {
        let x = Groupoid::Action(ActionGroupoid::trivial_on_torus(FiniteGroup::trivial(), 1));
        let e = parse_expr("x1").unwrap();
        assert!(matches!(
            validate_expr(&x, &NerveKey::object(0), &e),
            Err(DeligneError::NotPeriodic { .. })
        ));
    }
}
