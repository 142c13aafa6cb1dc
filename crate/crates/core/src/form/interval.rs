//! Rectangular complex interval arithmetic, used to certify that an expression
//! has no zero on a coordinate box.

use std::f64::consts::PI;

use super::expr::{Expr, Func, Var};

#[derive(Clone, Copy, Debug, PartialEq)]
struct Iv {
    lo: f64,
    hi: f64,
}

const WIDEN: f64 = 1e-12;

impl Iv {
    fn new(lo: f64, hi: f64) -> Iv {
        let pad = WIDEN * (lo.abs().max(hi.abs()) + 1e-300);
        Iv {
            lo: lo - pad,
            hi: hi + pad,
        }
    }

    fn point(v: f64) -> Iv {
        Iv { lo: v, hi: v }
    }

    fn add(self, o: Iv) -> Iv {
        Iv::new(self.lo + o.lo, self.hi + o.hi)
    }

    fn neg(self) -> Iv {
        Iv {
            lo: -self.hi,
            hi: -self.lo,
        }
    }

    fn mul(self, o: Iv) -> Iv {
        let c = [self.lo * o.lo, self.lo * o.hi, self.hi * o.lo, self.hi * o.hi];
        let lo = c.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = c.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        Iv::new(lo, hi)
    }

    fn contains_zero(self) -> bool {
        self.lo <= 0.0 && self.hi >= 0.0
    }

    fn recip(self) -> Option<Iv> {
        if self.contains_zero() {
            None
        } else {
            Some(Iv::new(1.0 / self.hi, 1.0 / self.lo))
        }
    }

    fn sqr(self) -> Iv {
        if self.contains_zero() {
            Iv::new(0.0, self.lo.powi(2).max(self.hi.powi(2)))
        } else {
            let a = self.lo.powi(2);
            let b = self.hi.powi(2);
            Iv::new(a.min(b), a.max(b))
        }
    }

    fn exp(self) -> Iv {
        Iv::new(self.lo.exp(), self.hi.exp())
    }

    fn cosh(self) -> Iv {
        let a = self.lo.cosh();
        let b = self.hi.cosh();
        let lo = if self.contains_zero() { 1.0 } else { a.min(b) };
        Iv::new(lo, a.max(b))
    }

    fn sinh(self) -> Iv {
        Iv::new(self.lo.sinh(), self.hi.sinh())
    }

    /// Range of `sin` over the interval, using critical points `π/2 + kπ`.
    fn sin(self) -> Iv {
        if !(self.hi - self.lo).is_finite() || self.hi - self.lo >= 2.0 * PI {
            return Iv::new(-1.0, 1.0);
        }
        let mut lo = self.lo.sin().min(self.hi.sin());
        let mut hi = self.lo.sin().max(self.hi.sin());
        let k0 = ((self.lo - PI / 2.0) / PI).ceil() as i64;
        let k1 = ((self.hi - PI / 2.0) / PI).floor() as i64;
        for k in k0..=k1 {
            if k.rem_euclid(2) == 0 {
                hi = 1.0;
            } else {
                lo = -1.0;
            }
        }
        Iv::new(lo, hi)
    }

    fn cos(self) -> Iv {
        Iv::new(self.lo + PI / 2.0, self.hi + PI / 2.0).sin()
    }
}

#[derive(Clone, Copy, Debug)]
struct Ci {
    re: Iv,
    im: Iv,
}

impl Ci {
    fn real(v: Iv) -> Ci {
        Ci {
            re: v,
            im: Iv::point(0.0),
        }
    }

    fn add(self, o: Ci) -> Ci {
        Ci {
            re: self.re.add(o.re),
            im: self.im.add(o.im),
        }
    }

    fn neg(self) -> Ci {
        Ci {
            re: self.re.neg(),
            im: self.im.neg(),
        }
    }

    fn mul(self, o: Ci) -> Ci {
        Ci {
            re: self.re.mul(o.re).add(self.im.mul(o.im).neg()),
            im: self.re.mul(o.im).add(self.im.mul(o.re)),
        }
    }

    fn norm_sqr(self) -> Iv {
        self.re.sqr().add(self.im.sqr())
    }

    fn excludes_zero(self) -> bool {
        !(self.re.contains_zero() && self.im.contains_zero())
    }

    fn recip(self) -> Option<Ci> {
        let inv = self.norm_sqr().recip()?;
        Some(Ci {
            re: self.re.mul(inv),
            im: self.im.neg().mul(inv),
        })
    }

    fn powi(self, n: i32) -> Option<Ci> {
        let base = if n < 0 { self.recip()? } else { self };
        let mut acc = Ci::real(Iv::point(1.0));
        for _ in 0..n.unsigned_abs() {
            acc = acc.mul(base);
        }
        Some(acc)
    }

    fn exp(self) -> Ci {
        let m = self.re.exp();
        Ci {
            re: m.mul(self.im.cos()),
            im: m.mul(self.im.sin()),
        }
    }

    fn sin(self) -> Ci {
        Ci {
            re: self.re.sin().mul(self.im.cosh()),
            im: self.re.cos().mul(self.im.sinh()),
        }
    }

    fn cos(self) -> Ci {
        Ci {
            re: self.re.cos().mul(self.im.cosh()),
            im: self.re.sin().mul(self.im.sinh()).neg(),
        }
    }

    fn log(self) -> Option<Ci> {
        let n = self.norm_sqr();
        if n.lo <= 0.0 {
            return None;
        }
        Some(Ci {
            re: Iv::new(0.5 * n.lo.ln(), 0.5 * n.hi.ln()),
            im: Iv::new(-PI, PI),
        })
    }
}

/// Ranges for every free symbol.
#[derive(Clone, Debug, Default)]
pub struct Domain {
    pub x: Vec<(f64, f64)>,
    pub t: (f64, f64),
    pub s: Vec<(f64, f64)>,
}

impl Domain {
    pub fn boxed(x: Vec<(f64, f64)>) -> Domain {
        Domain {
            x,
            t: (0.0, 1.0),
            s: Vec::new(),
        }
    }

    fn ranges(&self) -> Vec<(f64, f64)> {
        let mut r = self.x.clone();
        r.push(self.t);
        r.extend(self.s.iter().cloned());
        r
    }

    fn from_ranges(&self, r: &[(f64, f64)]) -> Domain {
        let d = self.x.len();
        Domain {
            x: r[..d].to_vec(),
            t: r[d],
            s: r[d + 1..].to_vec(),
        }
    }
}

fn enclose(e: &Expr, dom: &Domain) -> Option<Ci> {
    let var = |r: (f64, f64)| Ci::real(Iv { lo: r.0, hi: r.1 });
    Some(match e {
        Expr::Num(z) => Ci {
            re: Iv::point(z.re),
            im: Iv::point(z.im),
        },
        Expr::Var(Var::X(i)) => var(*dom.x.get(*i)?),
        Expr::Var(Var::T) => var(dom.t),
        Expr::Var(Var::S(i)) => var(*dom.s.get(*i)?),
        Expr::Neg(a) => enclose(a, dom)?.neg(),
        Expr::Add(a, b) => enclose(a, dom)?.add(enclose(b, dom)?),
        Expr::Sub(a, b) => enclose(a, dom)?.add(enclose(b, dom)?.neg()),
        Expr::Mul(a, b) => enclose(a, dom)?.mul(enclose(b, dom)?),
        Expr::Div(a, b) => enclose(a, dom)?.mul(enclose(b, dom)?.recip()?),
        Expr::Pow(a, n) => enclose(a, dom)?.powi(*n)?,
        Expr::Call(Func::Exp, a) => enclose(a, dom)?.exp(),
        Expr::Call(Func::Sin, a) => enclose(a, dom)?.sin(),
        Expr::Call(Func::Cos, a) => enclose(a, dom)?.cos(),
        Expr::Call(Func::Log, a) => enclose(a, dom)?.log()?,
    })
}

/// Structural certificate: constants, exponentials and products/quotients/powers
/// of nonvanishing factors never vanish.
fn structurally_nonzero(e: &Expr) -> bool {
    match e {
        Expr::Num(z) => z.norm() > 0.0,
        Expr::Call(Func::Exp, _) => true,
        Expr::Neg(a) | Expr::Pow(a, _) => structurally_nonzero(a),
        Expr::Mul(a, b) | Expr::Div(a, b) => structurally_nonzero(a) && structurally_nonzero(b),
        _ => false,
    }
}

const MAX_BOXES: usize = 1 << 14;

fn split_axes(e: &Expr, dom: &Domain) -> Vec<usize> {
    let d = dom.x.len();
    let mut axes = Vec::new();
    e.visit_vars(&mut |v| {
        let a = match v {
            Var::X(i) => i,
            Var::T => d,
            Var::S(i) => d + 1 + i,
        };
        if !axes.contains(&a) {
            axes.push(a);
        }
    });
    axes
}

fn certify_box(e: &Expr, dom: &Domain) -> bool {
    let axes = split_axes(e, dom);
    let mut budget = MAX_BOXES;
    let mut pending = vec![dom.ranges()];
    while let Some(ranges) = pending.pop() {
        if let Some(ci) = enclose(e, &dom.from_ranges(&ranges)) {
            if ci.excludes_zero() {
                continue;
            }
        }
        if budget == 0 {
            return false;
        }
        budget -= 1;
        let Some(&axis) = axes
            .iter()
            .max_by(|&&a, &&b| (ranges[a].1 - ranges[a].0).total_cmp(&(ranges[b].1 - ranges[b].0)))
        else {
            return false;
        };
        if ranges[axis].1 - ranges[axis].0 <= 0.0 {
            return false;
        }
        let mid = 0.5 * (ranges[axis].0 + ranges[axis].1);
        let mut left = ranges.clone();
        left[axis].1 = mid;
        let mut right = ranges;
        right[axis].0 = mid;
        pending.push(right);
        pending.push(left);
    }
    true
}

/// Whether `e` is certified to have no zero anywhere on `dom`.
pub fn certify_nonvanishing(e: &Expr, dom: &Domain) -> bool {
    if structurally_nonzero(e) {
        return true;
    }
    certify_box(e, dom)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::form::parse::parse_expr;

    fn unit_box(d: usize) -> Domain {
        Domain::boxed(vec![(0.0, 1.0); d])
    }

    #[test]
    fn exponentials_are_nonzero() {
        let e = parse_expr("exp(2*pi*i*x1)").unwrap();
        assert!(certify_nonvanishing(&e, &unit_box(1)));
    }

    #[test]
    fn shifted_trig_is_nonzero() {
        let e = parse_expr("2 + cos(2*pi*x1) + i*sin(2*pi*x2)").unwrap();
        assert!(certify_nonvanishing(&e, &unit_box(2)));
        let e = parse_expr("1.1 + cos(2*pi*x1)").unwrap();
        assert!(certify_nonvanishing(&e, &unit_box(1)));
    }

    #[test]
    fn coordinate_through_zero_is_rejected() {
        let e = parse_expr("x1").unwrap();
        assert!(!certify_nonvanishing(&e, &Domain::boxed(vec![(-0.5, 0.5)])));
        assert!(certify_nonvanishing(&e, &Domain::boxed(vec![(0.25, 0.5)])));
        let e = parse_expr("1 + cos(2*pi*x1)").unwrap();
        assert!(!certify_nonvanishing(&e, &unit_box(1)));
    }
}
