//! Smith normal form over ℤ. Runs on checked `i128` and restarts on
//! `BigInt` if any intermediate overflows.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

trait Ring: Clone + PartialEq + std::fmt::Debug {
    fn zero() -> Self;
    fn one() -> Self;
    fn from_i64(v: i64) -> Self;
    fn is_zero(&self) -> bool;
    fn abs_lt(&self, o: &Self) -> bool;
    fn is_negative(&self) -> bool;
    fn negated(&self) -> Option<Self>;
    /// `self - q * o`
    fn sub_mul(&self, q: &Self, o: &Self) -> Option<Self>;
    fn add(&self, o: &Self) -> Option<Self>;
    /// Floor quotient.
    fn quot(&self, d: &Self) -> Self;
    fn divides(&self, o: &Self) -> bool;
    fn to_big(&self) -> BigInt;
}

impl Ring for i128 {
    fn zero() -> Self {
        0
    }
    fn one() -> Self {
        1
    }
    fn from_i64(v: i64) -> Self {
        v as i128
    }
    fn is_zero(&self) -> bool {
        *self == 0
    }
    fn abs_lt(&self, o: &Self) -> bool {
        self.unsigned_abs() < o.unsigned_abs()
    }
    fn is_negative(&self) -> bool {
        *self < 0
    }
    fn negated(&self) -> Option<Self> {
        self.checked_neg()
    }
    fn sub_mul(&self, q: &Self, o: &Self) -> Option<Self> {
        self.checked_sub(q.checked_mul(*o)?)
    }
    fn add(&self, o: &Self) -> Option<Self> {
        self.checked_add(*o)
    }
    fn quot(&self, d: &Self) -> Self {
        self.div_floor(d)
    }
    fn divides(&self, o: &Self) -> bool {
        o % self == 0
    }
    fn to_big(&self) -> BigInt {
        BigInt::from(*self)
    }
}

impl Ring for BigInt {
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn from_i64(v: i64) -> Self {
        BigInt::from(v)
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn abs_lt(&self, o: &Self) -> bool {
        self.abs() < o.abs()
    }
    fn is_negative(&self) -> bool {
        Signed::is_negative(self)
    }
    fn negated(&self) -> Option<Self> {
        Some(-self)
    }
    fn sub_mul(&self, q: &Self, o: &Self) -> Option<Self> {
        Some(self - q * o)
    }
    fn add(&self, o: &Self) -> Option<Self> {
        Some(self + o)
    }
    fn quot(&self, d: &Self) -> Self {
        self.div_floor(d)
    }
    fn divides(&self, o: &Self) -> bool {
        Zero::is_zero(&(o % self))
    }
    fn to_big(&self) -> BigInt {
        self.clone()
    }
}

/// `M V = U⁻¹ D` with `D = diag(d₁ | d₂ | …)`, `dᵢ > 0`, then zeros.
/// The column transform `V` and its inverse are always recorded; `U` on request.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Smith {
    pub diagonal: Vec<BigInt>,
    pub v: Vec<Vec<BigInt>>,
    pub v_inv: Vec<Vec<BigInt>>,
    /// Row transform `U` (`U M V = D`), when requested.
    pub u: Option<Vec<Vec<BigInt>>>,
    pub rows: usize,
    pub cols: usize,
}

impl Smith {
    pub fn rank(&self) -> usize {
        self.diagonal.len()
    }

    /// Diagonal entries greater than one.
    pub fn torsion(&self) -> Vec<BigInt> {
        self.diagonal.iter().filter(|d| !d.is_one()).cloned().collect()
    }
}

struct Work<T> {
    a: Vec<Vec<T>>,
    v: Vec<Vec<T>>,
    v_inv: Vec<Vec<T>>,
    u: Option<Vec<Vec<T>>>,
}

impl<T: Ring> Work<T> {
    fn swap_rows(&mut self, i: usize, j: usize) {
        self.a.swap(i, j);
        if let Some(u) = self.u.as_mut() {
            u.swap(i, j);
        }
    }

    fn swap_cols(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        for row in self.a.iter_mut().chain(self.v.iter_mut()) {
            row.swap(i, j);
        }
        self.v_inv.swap(i, j);
    }

    /// `col_j -= q * col_k`
    fn col_sub(&mut self, j: usize, k: usize, q: &T, from_row: usize) -> Option<()> {
        for row in self.a[from_row..].iter_mut() {
            if !row[k].is_zero() {
                row[j] = row[j].sub_mul(q, &row[k])?;
            }
        }
        for row in self.v.iter_mut() {
            if !row[k].is_zero() {
                row[j] = row[j].sub_mul(q, &row[k])?;
            }
        }
        // inverse: row_k(V⁻¹) += q * row_j(V⁻¹)
        let (rj, rk) = two_rows(&mut self.v_inv, j, k);
        for (x, y) in rk.iter_mut().zip(rj.iter()) {
            if !y.is_zero() {
                let neg_q = q.negated()?;
                *x = x.sub_mul(&neg_q, y)?;
            }
        }
        Some(())
    }

    /// `row_i -= q * row_k`
    fn row_sub(&mut self, i: usize, k: usize, q: &T, from_col: usize) -> Option<()> {
        let (ri, rk) = two_rows(&mut self.a, i, k);
        for c in from_col..ri.len() {
            if !rk[c].is_zero() {
                ri[c] = ri[c].sub_mul(q, &rk[c])?;
            }
        }
        if let Some(u) = self.u.as_mut() {
            let (ui, uk) = two_rows(u, i, k);
            for (x, y) in ui.iter_mut().zip(uk.iter()) {
                if !y.is_zero() {
                    *x = x.sub_mul(q, y)?;
                }
            }
        }
        Some(())
    }
}

fn two_rows<T>(m: &mut [Vec<T>], i: usize, k: usize) -> (&mut Vec<T>, &mut Vec<T>) {
    assert_ne!(i, k);
    if i < k {
        let (lo, hi) = m.split_at_mut(k);
        (&mut lo[i], &mut hi[0])
    } else {
        let (lo, hi) = m.split_at_mut(i);
        (&mut hi[0], &mut lo[k])
    }
}

fn identity<T: Ring>(n: usize) -> Vec<Vec<T>> {
    (0..n)
        .map(|i| (0..n).map(|j| if i == j { T::one() } else { T::zero() }).collect())
        .collect()
}

fn run<T: Ring>(m: &[Vec<i64>], cols: usize, track_u: bool) -> Option<Smith> {
    let rows = m.len();
    let mut w = Work {
        a: m.iter().map(|r| r.iter().map(|&x| T::from_i64(x)).collect()).collect(),
        v: identity(cols),
        v_inv: identity(cols),
        u: track_u.then(|| identity(rows)),
    };
    let mut diagonal = Vec::new();
    for k in 0..rows.min(cols) {
        loop {
            // smallest nonzero entry of the trailing block
            let mut best: Option<(usize, usize)> = None;
            for i in k..rows {
                for j in k..cols {
                    let x = &w.a[i][j];
                    if !x.is_zero() && best.is_none_or(|(bi, bj)| x.abs_lt(&w.a[bi][bj])) {
                        best = Some((i, j));
                    }
                }
            }
            let Some((p, q)) = best else {
                return Some(finish(w, diagonal, rows, cols));
            };
            w.swap_rows(k, p);
            w.swap_cols(k, q);
            let pivot = w.a[k][k].clone();
            let mut clean = true;
            for i in k + 1..rows {
                if !w.a[i][k].is_zero() {
                    let qt = w.a[i][k].quot(&pivot);
                    w.row_sub(i, k, &qt, k)?;
                    clean &= w.a[i][k].is_zero();
                }
            }
            for j in k + 1..cols {
                if !w.a[k][j].is_zero() {
                    let qt = w.a[k][j].quot(&pivot);
                    w.col_sub(j, k, &qt, k)?;
                    clean &= w.a[k][j].is_zero();
                }
            }
            if !clean {
                continue;
            }
            let unit = pivot == T::one() || pivot.negated()? == T::one();
            let offender = if unit {
                None
            } else {
                (k + 1..rows).find(|&i| w.a[i][k + 1..].iter().any(|x| !pivot.divides(x)))
            };
            match offender {
                Some(i) => {
                    let (rk, ri) = two_rows(&mut w.a, k, i);
                    for c in k..cols {
                        rk[c] = rk[c].add(&ri[c])?;
                    }
                    if let Some(u) = w.u.as_mut() {
                        let (uk, ui) = two_rows(u, k, i);
                        for (x, y) in uk.iter_mut().zip(ui.iter()) {
                            *x = x.add(y)?;
                        }
                    }
                }
                None => break,
            }
        }
        if w.a[k][k].is_negative() {
            for x in w.a[k].iter_mut() {
                *x = x.negated()?;
            }
            if let Some(u) = w.u.as_mut() {
                for x in u[k].iter_mut() {
                    *x = x.negated()?;
                }
            }
        }
        diagonal.push(w.a[k][k].clone());
    }
    Some(finish(w, diagonal, rows, cols))
}

fn finish<T: Ring>(w: Work<T>, diagonal: Vec<T>, rows: usize, cols: usize) -> Smith {
    let big = |m: Vec<Vec<T>>| -> Vec<Vec<BigInt>> {
        m.into_iter().map(|r| r.iter().map(Ring::to_big).collect()).collect()
    };
    Smith {
        diagonal: diagonal.iter().map(Ring::to_big).collect(),
        v: big(w.v),
        v_inv: big(w.v_inv),
        u: w.u.map(big),
        rows,
        cols,
    }
}

/// Smith normal form of an integer `rows × cols` matrix.
pub fn smith(m: &[Vec<i64>], cols: usize) -> Smith {
    smith_impl(m, cols, false)
}

/// As [`smith`], also recording the row transform.
pub fn smith_with_u(m: &[Vec<i64>], cols: usize) -> Smith {
    smith_impl(m, cols, true)
}

fn smith_impl(m: &[Vec<i64>], cols: usize, track_u: bool) -> Smith {
    assert!(m.iter().all(|r| r.len() == cols));
    run::<i128>(m, cols, track_u)
        .unwrap_or_else(|| run::<BigInt>(m, cols, track_u).expect("BigInt arithmetic does not overflow"))
}

/// Invariant factors (> 1) as machine integers, when they fit.
pub fn torsion_u64(s: &Smith) -> Vec<u64> {
    s.torsion().iter().map(|d| d.to_u64().expect("invariant factor fits in u64")).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mul(a: &[Vec<i64>], v: &[Vec<BigInt>]) -> Vec<Vec<BigInt>> {
        a.iter()
            .map(|r| {
                (0..v[0].len())
                    .map(|j| r.iter().zip(v).map(|(&x, vr)| BigInt::from(x) * &vr[j]).sum())
                    .collect()
            })
            .collect()
    }

    #[test]
    fn textbook_example() {
        let m = vec![vec![2, 4, 4], vec![-6, 6, 12], vec![10, -4, -16]];
        let s = smith(&m, 3);
        let d: Vec<i64> = s.diagonal.iter().map(|x| x.to_i64().unwrap()).collect();
        assert_eq!(d, vec![2, 6, 12]);
    }

    #[test]
    fn v_is_unimodular_inverse_pair() {
        let m = vec![vec![4, 6, 0, 2], vec![2, 8, 10, 0], vec![6, 0, 4, 8]];
        let s = smith(&m, 4);
        let n = 4;
        for i in 0..n {
            for j in 0..n {
                let e: BigInt = (0..n).map(|k| &s.v[i][k] * &s.v_inv[k][j]).sum();
                assert_eq!(e, BigInt::from((i == j) as i64));
            }
        }
        // columns of M V beyond the rank vanish
        let mv = mul(&m, &s.v);
        for row in &mv {
            for x in &row[s.rank()..] {
                assert!(Zero::is_zero(x));
            }
        }
        for w in s.diagonal.windows(2) {
            assert!(Zero::is_zero(&(&w[1] % &w[0])));
        }
    }

    #[test]
    fn u_m_v_is_diagonal() {
        let m = vec![vec![-2, 1], vec![3, -4], vec![1, 1]];
        let s = smith_with_u(&m, 2);
        let u = s.u.as_ref().unwrap();
        let mv = mul(&m, &s.v);
        for i in 0..3 {
            for j in 0..2 {
                let e: BigInt = (0..3).map(|k| &u[i][k] * &mv[k][j]).sum();
                let d = if i == j && i < s.rank() { s.diagonal[i].clone() } else { BigInt::from(0) };
                assert_eq!(e, d, "entry {} {}", i, j);
            }
        }
    }

    #[test]
    fn zero_and_rank_deficient() {
        let s = smith(&[vec![0, 0], vec![0, 0]], 2);
        assert_eq!(s.rank(), 0);
        let s = smith(&[vec![3, 6], vec![1, 2]], 2);
        assert_eq!(s.diagonal, vec![BigInt::from(1)]);
    }

    #[test]
    fn overflow_falls_back_to_bigint() {
        let big = i64::MAX / 3;
        let m = vec![vec![big, big - 1, 7], vec![big - 2, big, 11], vec![5, big - 7, big]];
        let s = smith(&m, 3);
        assert_eq!(s.rank(), 3);
        let det: BigInt = s.diagonal.iter().product();
        let b = |x: i64| BigInt::from(x);
        let expect = b(m[0][0]) * (b(m[1][1]) * b(m[2][2]) - b(m[1][2]) * b(m[2][1]))
            - b(m[0][1]) * (b(m[1][0]) * b(m[2][2]) - b(m[1][2]) * b(m[2][0]))
            + b(m[0][2]) * (b(m[1][0]) * b(m[2][1]) - b(m[1][1]) * b(m[2][0]));
        assert_eq!(det, expect.abs());
    }
}
