use num_rational::Rational64;
use num_traits::{ToPrimitive, Zero};

use super::expr::Expr;
use super::FormError;

/// `x ↦ Rx + t` with integer linear part and rational translation.
#[derive(Clone, Debug, PartialEq)]
pub struct AffineMap {
    r: Vec<Vec<i64>>,
    t: Vec<Rational64>,
}

/// Determinant of a small integer matrix by fraction-free elimination.
pub fn int_det(m: &[Vec<i64>]) -> i64 {
    let n = m.len();
    if n == 0 {
        return 1;
    }
    let mut a: Vec<Vec<i128>> = m
        .iter()
        .map(|row| row.iter().map(|&v| v as i128).collect())
        .collect();
    let mut sign = 1i128;
    let mut prev = 1i128;
    for k in 0..n {
        if a[k][k] == 0 {
            match (k + 1..n).find(|&i| a[i][k] != 0) {
                Some(p) => {
                    a.swap(k, p);
                    sign = -sign;
                }
                None => return 0,
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) / prev;
            }
        }
        prev = a[k][k];
    }
    (sign * a[n - 1][n - 1]) as i64
}

impl AffineMap {
    pub fn new(r: Vec<Vec<i64>>, t: Vec<Rational64>) -> Result<Self, FormError> {
        let d = t.len();
        if r.len() != d || r.iter().any(|row| row.len() != d) {
            return Err(FormError::DimensionMismatch {
                expected: d,
                found: r.len(),
            });
        }
        Ok(AffineMap { r, t })
    }

    pub fn identity(d: usize) -> Self {
        let r = (0..d)
            .map(|i| (0..d).map(|j| i64::from(i == j)).collect())
            .collect();
        AffineMap {
            r,
            t: vec![Rational64::zero(); d],
        }
    }

    pub fn translation(t: Vec<Rational64>) -> Self {
        let mut m = AffineMap::identity(t.len());
        m.t = t;
        m
    }

    pub fn linear(r: Vec<Vec<i64>>) -> Result<Self, FormError> {
        let d = r.len();
        AffineMap::new(r, vec![Rational64::zero(); d])
    }

    pub fn dim(&self) -> usize {
        self.t.len()
    }

    pub fn matrix(&self) -> &[Vec<i64>] {
        &self.r
    }

    pub fn offset(&self) -> &[Rational64] {
        &self.t
    }

    pub fn det(&self) -> i64 {
        int_det(&self.r)
    }

    pub fn is_unimodular(&self) -> bool {
        self.det().abs() == 1
    }

    pub fn is_identity_linear(&self) -> bool {
        self.r == AffineMap::identity(self.dim()).r
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let mut y = self.apply_linear(x);
        for (yi, ti) in y.iter_mut().zip(&self.t) {
            *yi += ti.to_f64().unwrap_or(0.0);
        }
        y
    }

    pub fn apply_linear(&self, v: &[f64]) -> Vec<f64> {
        self.r
            .iter()
            .map(|row| row.iter().zip(v).map(|(&a, &b)| a as f64 * b).sum())
            .collect()
    }

    pub fn apply_rational(&self, x: &[Rational64]) -> Vec<Rational64> {
        self.r
            .iter()
            .zip(&self.t)
            .map(|(row, ti)| {
                row.iter()
                    .zip(x)
                    .fold(*ti, |acc, (&a, b)| acc + Rational64::from_integer(a) * b)
            })
            .collect()
    }

    /// `self` followed by `next`: `(R₂R₁, R₂t₁ + t₂)`.
    pub fn then(&self, next: &AffineMap) -> AffineMap {
        let d = self.dim();
        let r = (0..d)
            .map(|i| {
                (0..d)
                    .map(|j| (0..d).map(|k| next.r[i][k] * self.r[k][j]).sum())
                    .collect()
            })
            .collect();
        let t = next.apply_rational(&self.t);
        AffineMap { r, t }
    }

    /// Inverse over ℤ; `None` unless the linear part is unimodular.
    pub fn inverse(&self) -> Option<AffineMap> {
        let d = self.dim();
        let det = self.det();
        if det.abs() != 1 {
            return None;
        }
        let mut inv = vec![vec![0i64; d]; d];
        for i in 0..d {
            for j in 0..d {
                let minor: Vec<Vec<i64>> = (0..d)
                    .filter(|&r| r != j)
                    .map(|r| {
                        (0..d)
                            .filter(|&c| c != i)
                            .map(|c| self.r[r][c])
                            .collect()
                    })
                    .collect();
                let cof = if (i + j) % 2 == 0 { 1 } else { -1 } * int_det(&minor);
                inv[i][j] = cof * det;
            }
        }
        let lin = AffineMap::linear(inv).ok()?;
        let t: Vec<Rational64> = lin.apply_rational(&self.t).into_iter().map(|v| -v).collect();
        Some(AffineMap { r: lin.r, t })
    }

    /// Determinant of the submatrix with the given rows and columns.
    pub fn minor(&self, rows: &[usize], cols: &[usize]) -> i64 {
        let m: Vec<Vec<i64>> = rows
            .iter()
            .map(|&i| cols.iter().map(|&j| self.r[i][j]).collect())
            .collect();
        int_det(&m)
    }

    /// The `i`-th image coordinate `Σⱼ Rᵢⱼ xⱼ + tᵢ` as an expression.
    pub fn image_expr(&self, i: usize) -> Expr {
        let mut e = Expr::num(self.t[i].to_f64().unwrap_or(0.0));
        for (j, &a) in self.r[i].iter().enumerate() {
            if a != 0 {
                e = Expr::add(e, Expr::mul(Expr::num(a as f64), Expr::x(j)));
            }
        }
        e
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(p: i64, d: i64) -> Rational64 {
        Rational64::new(p, d)
    }

    #[test]
    fn determinant_small() {
        assert_eq!(int_det(&[vec![2, 1], vec![1, 1]]), 1);
        assert_eq!(int_det(&[vec![0, 1], vec![1, 0]]), -1);
        assert_eq!(int_det(&[vec![1, 2, 3], vec![4, 5, 6], vec![7, 8, 10]]), -3);
    }

    #[test]
    fn composition_law() {
        let f1 = AffineMap::new(vec![vec![0, -1], vec![1, 0]], vec![q(1, 2), q(0, 1)]).unwrap();
        let f2 = AffineMap::new(vec![vec![1, 1], vec![0, 1]], vec![q(1, 3), q(1, 4)]).unwrap();
        let c = f1.then(&f2);
        let x = [0.3, -0.7];
        let direct = f2.apply(&f1.apply(&x));
        let composed = c.apply(&x);
        for (a, b) in direct.iter().zip(&composed) {
            assert!((a - b).abs() < 1e-14);
        }
    }

    #[test]
    fn inverse_roundtrip() {
        let f = AffineMap::new(vec![vec![2, 1], vec![1, 1]], vec![q(1, 2), q(1, 3)]).unwrap();
        let g = f.inverse().unwrap();
        assert_eq!(f.then(&g), AffineMap::identity(2));
        let bad = AffineMap::linear(vec![vec![2, 0], vec![0, 1]]).unwrap();
        assert!(bad.inverse().is_none());
    }
}
