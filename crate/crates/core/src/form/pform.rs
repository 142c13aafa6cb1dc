use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;
use num_traits::Zero;

use super::affine::AffineMap;
use super::canon::is_identically_zero;
use super::expr::{Env, Expr, Func, Var};
use super::FormError;

/// A differential p-form on a d-dimensional coordinate patch.
/// Multi-indices are 0-based and strictly increasing.
#[derive(Clone, Debug, PartialEq)]
pub struct PForm {
    degree: usize,
    dim: usize,
    terms: BTreeMap<Vec<usize>, Expr>,
}

/// Sign of the permutation sorting `idx`, or `None` if an index repeats.
fn sort_sign(idx: &mut [usize]) -> Option<f64> {
    let mut sign = 1.0;
    for i in 0..idx.len() {
        for j in 0..idx.len() - 1 - i {
            if idx[j] == idx[j + 1] {
                return None;
            }
            if idx[j] > idx[j + 1] {
                idx.swap(j, j + 1);
                sign = -sign;
            }
        }
    }
    if idx.windows(2).any(|w| w[0] == w[1]) {
        return None;
    }
    Some(sign)
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            go(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, k, &mut Vec::new(), &mut out);
    out
}

/// Determinant of a small complex matrix (Gaussian elimination, partial pivoting).
fn cdet(mut m: Vec<Vec<Complex64>>) -> Complex64 {
    let n = m.len();
    let mut det = Complex64::new(1.0, 0.0);
    for k in 0..n {
        let p = (k..n)
            .max_by(|&a, &b| m[a][k].norm().total_cmp(&m[b][k].norm()))
            .unwrap();
        if m[p][k].is_zero() {
            return Complex64::zero();
        }
        if p != k {
            m.swap(p, k);
            det = -det;
        }
        det *= m[k][k];
        for i in k + 1..n {
            let f = m[i][k] / m[k][k];
            for j in k..n {
                let v = m[k][j];
                m[i][j] -= f * v;
            }
        }
    }
    det
}

impl PForm {
    pub fn zero(degree: usize, dim: usize) -> PForm {
        PForm {
            degree,
            dim,
            terms: BTreeMap::new(),
        }
    }

    pub fn scalar(f: Expr, dim: usize) -> PForm {
        let mut w = PForm::zero(0, dim);
        w.insert(Vec::new(), f);
        w
    }

    /// `dxᵢ` (0-based).
    pub fn dx(i: usize, dim: usize) -> PForm {
        let mut w = PForm::zero(1, dim);
        w.insert(vec![i], Expr::one());
        w
    }

    /// Build from (multi-index, coefficient) pairs; indices in any order,
    /// reordered with the appropriate sign.
    pub fn from_terms(
        degree: usize,
        dim: usize,
        terms: impl IntoIterator<Item = (Vec<usize>, Expr)>,
    ) -> Result<PForm, FormError> {
        let mut w = PForm::zero(degree, dim);
        for (mut idx, c) in terms {
            if idx.len() != degree {
                return Err(FormError::ArityMismatch {
                    expected: degree,
                    found: idx.len(),
                });
            }
            if let Some(&bad) = idx.iter().find(|&&i| i >= dim) {
                return Err(FormError::IndexOutOfRange { index: bad, dim });
            }
            match sort_sign(&mut idx) {
                None => {}
                Some(sign) => {
                    let c = if sign < 0.0 { Expr::neg(c) } else { c };
                    w.accumulate(idx, c);
                }
            }
        }
        Ok(w)
    }

    /// Constant-coefficient 1-form `Σ cᵢ dxᵢ`.
    pub fn constant_one_form(c: &[Complex64]) -> PForm {
        let mut w = PForm::zero(1, c.len());
        for (i, &ci) in c.iter().enumerate() {
            w.insert(vec![i], Expr::Num(ci));
        }
        w
    }

    fn insert(&mut self, idx: Vec<usize>, c: Expr) {
        if self.degree <= self.dim && !c.is_zero() {
            self.terms.insert(idx, c);
        }
    }

    fn accumulate(&mut self, idx: Vec<usize>, c: Expr) {
        let next = match self.terms.remove(&idx) {
            Some(prev) => Expr::add(prev, c),
            None => c,
        };
        self.insert(idx, next);
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<usize>, &Expr)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, idx: &[usize]) -> Option<&Expr> {
        self.terms.get(idx)
    }

    /// No stored terms (a sufficient, structural zero test).
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Drop coefficients certified to vanish identically.
    pub fn pruned(mut self) -> PForm {
        self.terms.retain(|_, c| !is_identically_zero(c));
        self
    }

    fn check_same(&self, o: &PForm) -> Result<(), FormError> {
        if self.dim != o.dim {
            return Err(FormError::DimensionMismatch {
                expected: self.dim,
                found: o.dim,
            });
        }
        if self.degree != o.degree {
            return Err(FormError::ArityMismatch {
                expected: self.degree,
                found: o.degree,
            });
        }
        Ok(())
    }

    pub fn add(&self, o: &PForm) -> Result<PForm, FormError> {
        self.check_same(o)?;
        let mut w = self.clone();
        for (idx, c) in &o.terms {
            w.accumulate(idx.clone(), c.clone());
        }
        Ok(w)
    }

    pub fn sub(&self, o: &PForm) -> Result<PForm, FormError> {
        self.add(&o.neg())
    }

    pub fn neg(&self) -> PForm {
        self.map_coefficients(|c| Expr::neg(c.clone()))
    }

    pub fn scale(&self, f: &Expr) -> PForm {
        self.map_coefficients(|c| Expr::mul(f.clone(), c.clone()))
    }

    pub fn map_coefficients(&self, f: impl Fn(&Expr) -> Expr) -> PForm {
        let mut w = PForm::zero(self.degree, self.dim);
        for (idx, c) in &self.terms {
            w.insert(idx.clone(), f(c));
        }
        w
    }

    pub fn wedge(&self, o: &PForm) -> Result<PForm, FormError> {
        if self.dim != o.dim {
            return Err(FormError::DimensionMismatch {
                expected: self.dim,
                found: o.dim,
            });
        }
        let mut w = PForm::zero(self.degree + o.degree, self.dim);
        for (i, a) in &self.terms {
            for (j, b) in &o.terms {
                let mut idx: Vec<usize> = i.iter().chain(j).cloned().collect();
                if let Some(sign) = sort_sign(&mut idx) {
                    let c = Expr::mul(a.clone(), b.clone());
                    w.accumulate(idx, if sign < 0.0 { Expr::neg(c) } else { c });
                }
            }
        }
        Ok(w)
    }

    /// Exterior derivative; mixed partials are recognised as cancelling.
    pub fn exterior_d(&self) -> PForm {
        let mut w = PForm::zero(self.degree + 1, self.dim);
        for (idx, c) in &self.terms {
            for j in 0..self.dim {
                if idx.contains(&j) {
                    continue;
                }
                let dc = c.diff(Var::X(j));
                if dc.is_zero() {
                    continue;
                }
                let mut full = vec![j];
                full.extend(idx.iter().cloned());
                if let Some(sign) = sort_sign(&mut full) {
                    w.accumulate(full, if sign < 0.0 { Expr::neg(dc) } else { dc });
                }
            }
        }
        w.pruned()
    }

    /// `d log f = df / f` for a function `f`, taken factor by factor through
    /// products, quotients, powers and exponentials.
    pub fn dlog(f: &Expr, dim: usize) -> PForm {
        let split = |a: &Expr, b: &Expr, sub: bool| {
            let (u, v) = (PForm::dlog(a, dim), PForm::dlog(b, dim));
            if sub { u.sub(&v) } else { u.add(&v) }.expect("same shape")
        };
        match f {
            Expr::Call(Func::Exp, u) => PForm::scalar((**u).clone(), dim).exterior_d(),
            Expr::Mul(a, b) => split(a, b, false),
            Expr::Div(a, b) => split(a, b, true),
            Expr::Pow(a, n) => PForm::dlog(a, dim).scale(&Expr::num(*n as f64)),
            Expr::Neg(a) => PForm::dlog(a, dim),
            _ => {
                let df = PForm::scalar(f.clone(), dim).exterior_d();
                df.map_coefficients(|c| Expr::div(c.clone(), f.clone()))
            }
        }
    }

    /// Alternating pairing with `p` tangent vectors at `x`.
    pub fn eval(&self, x: &[f64], vectors: &[Vec<f64>]) -> Result<Complex64, FormError> {
        self.eval_env(&Env::at(x), vectors)
    }

    pub fn eval_env(&self, env: &Env, vectors: &[Vec<f64>]) -> Result<Complex64, FormError> {
        if vectors.len() != self.degree {
            return Err(FormError::ArityMismatch {
                expected: self.degree,
                found: vectors.len(),
            });
        }
        if env.x.len() != self.dim || vectors.iter().any(|v| v.len() != self.dim) {
            return Err(FormError::DimensionMismatch {
                expected: self.dim,
                found: env.x.len(),
            });
        }
        let mut total = Complex64::zero();
        for (idx, c) in &self.terms {
            let det = match self.degree {
                0 => Complex64::new(1.0, 0.0),
                1 => Complex64::new(vectors[0][idx[0]], 0.0),
                2 => {
                    let (u, v) = (&vectors[0], &vectors[1]);
                    Complex64::new(u[idx[0]] * v[idx[1]] - u[idx[1]] * v[idx[0]], 0.0)
                }
                _ => cdet(
                    idx.iter()
                        .map(|&i| vectors.iter().map(|v| Complex64::new(v[i], 0.0)).collect())
                        .collect(),
                ),
            };
            if !det.is_zero() {
                total += c.eval(env) * det;
            }
        }
        Ok(total)
    }

    /// Pullback along `x ↦ Rx + t`: coefficients precomposed, `dx_I` mapped to
    /// `Σ_J det R[I,J] dx_J`.
    pub fn pullback(&self, f: &AffineMap) -> Result<PForm, FormError> {
        if f.dim() != self.dim {
            return Err(FormError::DimensionMismatch {
                expected: self.dim,
                found: f.dim(),
            });
        }
        let mut w = PForm::zero(self.degree, self.dim);
        let cols = subsets(self.dim, self.degree);
        for (idx, c) in &self.terms {
            let moved = c.compose_affine(f);
            for j in &cols {
                let m = f.minor(idx, j);
                if m != 0 {
                    w.accumulate(j.clone(), Expr::mul(Expr::num(m as f64), moved.clone()));
                }
            }
        }
        Ok(w.pruned())
    }

    /// Substitute a value for a non-coordinate symbol in every coefficient.
    pub fn set_var(&self, v: Var, value: f64) -> PForm {
        self.map_coefficients(|c| c.set_var(v, value))
    }

    pub fn coord_arity(&self) -> usize {
        self.terms.values().map(Expr::coord_arity).max().unwrap_or(0)
    }
}

impl fmt::Display for PForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (idx, c)) in self.terms.iter().enumerate() {
            if k > 0 {
                write!(f, " + ")?;
            }
            write!(f, "({})", c)?;
            for (n, i) in idx.iter().enumerate() {
                write!(f, "{}dx{}", if n == 0 { " " } else { "^" }, i + 1)?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::form::parse::parse_expr;
    use num_rational::Rational64;

    fn p(text: &str) -> Expr {
        parse_expr(text).unwrap()
    }

    fn e(i: usize, d: usize) -> Vec<f64> {
        (0..d).map(|j| if i == j { 1.0 } else { 0.0 }).collect()
    }

    #[test]
    fn d_of_x1_dx2() {
        let w = PForm::from_terms(1, 2, [(vec![1], p("x1"))]).unwrap();
        let dw = w.exterior_d();
        assert_eq!(dw.coefficient(&[0, 1]), Some(&Expr::one()));
        assert_eq!(dw.terms().count(), 1);
    }

    #[test]
    fn d_squared_vanishes_symbolically() {
        let f = PForm::scalar(p("x1*x2"), 2);
        assert!(f.exterior_d().exterior_d().is_zero());
        let c = PForm::from_terms(1, 1, [(vec![0], p("3 + 2*i"))]).unwrap();
        assert!(c.exterior_d().is_zero());
        let g = PForm::scalar(p("sin(x1*x2)*exp(x3) + x1^2*cos(x3)"), 3);
        assert!(g.exterior_d().exterior_d().is_zero());
    }

    #[test]
    fn evaluation_alternates() {
        let w = PForm::from_terms(2, 2, [(vec![0, 1], Expr::one())]).unwrap();
        assert_eq!(w.eval(&[0.2, 0.3], &[e(0, 2), e(1, 2)]).unwrap(), Complex64::new(1.0, 0.0));
        assert_eq!(w.eval(&[0.2, 0.3], &[e(1, 2), e(0, 2)]).unwrap(), Complex64::new(-1.0, 0.0));
        assert!(matches!(
            w.eval(&[0.2, 0.3], &[e(0, 2)]),
            Err(FormError::ArityMismatch { .. })
        ));
    }

    #[test]
    fn reversed_indices_pick_up_sign() {
        let w = PForm::from_terms(2, 2, [(vec![1, 0], Expr::one())]).unwrap();
        assert_eq!(w.coefficient(&[0, 1]), Some(&Expr::num(-1.0)));
        let z = PForm::from_terms(2, 2, [(vec![1, 1], Expr::one())]).unwrap();
        assert!(z.is_zero());
    }

    #[test]
    fn pullback_examples() {
        let half = AffineMap::translation(vec![Rational64::new(1, 2)]);
        assert_eq!(PForm::dx(0, 1).pullback(&half).unwrap(), PForm::dx(0, 1));
        let flip = AffineMap::linear(vec![vec![-1]]).unwrap();
        let w = PForm::from_terms(1, 1, [(vec![0], p("2"))]).unwrap();
        let pulled = w.pullback(&flip).unwrap();
        assert_eq!(pulled.coefficient(&[0]).unwrap().as_num().unwrap().re, -2.0);
        let flip2 = AffineMap::linear(vec![vec![-1, 0], vec![0, -1]]).unwrap();
        let area = PForm::dx(0, 2).wedge(&PForm::dx(1, 2)).unwrap();
        assert_eq!(area.pullback(&flip2).unwrap(), area);
    }

    #[test]
    fn degree_above_dimension_is_zero() {
        let w = PForm::from_terms(1, 1, [(vec![0], p("x1"))]).unwrap();
        assert!(w.wedge(&w).unwrap().is_zero());
        assert!(PForm::scalar(p("x1"), 1).exterior_d().exterior_d().is_zero());
    }

    #[test]
    fn dlog_of_exponential() {
        let w = PForm::dlog(&p("exp(2*pi*i*x1)"), 1);
        let v = w.eval(&[0.37], &[vec![1.0]]).unwrap();
        assert!((v - Complex64::new(0.0, 2.0 * std::f64::consts::PI)).norm() < 1e-12);
    }
}
