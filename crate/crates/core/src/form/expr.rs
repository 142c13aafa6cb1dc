use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;
use num_traits::Zero;

use super::affine::AffineMap;

/// Free symbols of the expression language. Coordinates are 0-based internally
/// (`X(0)` is written `x1`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Var {
    X(usize),
    T,
    S(usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Func {
    Exp,
    Log,
    Sin,
    Cos,
}

impl Func {
    pub fn name(self) -> &'static str {
        match self {
            Func::Exp => "exp",
            Func::Log => "log",
            Func::Sin => "sin",
            Func::Cos => "cos",
        }
    }

    pub fn apply(self, z: Complex64) -> Complex64 {
        if z.im == 0.0 {
            match self {
                Func::Exp => return Complex64::new(z.re.exp(), 0.0),
                Func::Sin => return Complex64::new(z.re.sin(), 0.0),
                Func::Cos => return Complex64::new(z.re.cos(), 0.0),
                Func::Log if z.re > 0.0 => return Complex64::new(z.re.ln(), 0.0),
                Func::Log => {}
            }
        }
        match self {
            Func::Exp => z.exp(),
            Func::Log => z.ln(),
            Func::Sin => z.sin(),
            Func::Cos => z.cos(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Num(Complex64),
    Var(Var),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, i32),
    Call(Func, Box<Expr>),
}

/// Values for the free symbols during evaluation.
#[derive(Clone, Copy, Debug, Default)]
pub struct Env<'a> {
    pub x: &'a [f64],
    pub t: f64,
    pub s: &'a [f64],
}

impl<'a> Env<'a> {
    pub fn at(x: &'a [f64]) -> Self {
        Env { x, t: 0.0, s: &[] }
    }

    pub fn with_t(x: &'a [f64], t: f64) -> Self {
        Env { x, t, s: &[] }
    }
}

fn is_num(e: &Expr, v: f64) -> bool {
    matches!(e, Expr::Num(z) if z.re == v && z.im == 0.0)
}

impl Expr {
    pub fn num(v: f64) -> Expr {
        Expr::Num(Complex64::new(v, 0.0))
    }

    pub fn complex(z: Complex64) -> Expr {
        Expr::Num(z)
    }

    pub fn zero() -> Expr {
        Expr::num(0.0)
    }

    pub fn one() -> Expr {
        Expr::num(1.0)
    }

    pub fn pi() -> Expr {
        Expr::num(PI)
    }

    pub fn i() -> Expr {
        Expr::Num(Complex64::new(0.0, 1.0))
    }

    pub fn x(i: usize) -> Expr {
        Expr::Var(Var::X(i))
    }

    pub fn t() -> Expr {
        Expr::Var(Var::T)
    }

    pub fn s(i: usize) -> Expr {
        Expr::Var(Var::S(i))
    }

    pub fn is_zero(&self) -> bool {
        is_num(self, 0.0)
    }

    pub fn is_one(&self) -> bool {
        is_num(self, 1.0)
    }

    pub fn as_num(&self) -> Option<Complex64> {
        match self {
            Expr::Num(z) => Some(*z),
            _ => None,
        }
    }

    pub fn neg(a: Expr) -> Expr {
        match a {
            Expr::Num(z) => Expr::Num(-z),
            Expr::Neg(b) => *b,
            other => Expr::Neg(Box::new(other)),
        }
    }

    pub fn add(a: Expr, b: Expr) -> Expr {
        match (a, b) {
            (Expr::Num(x), Expr::Num(y)) => Expr::Num(x + y),
            (a, b) if a.is_zero() => b,
            (a, b) if b.is_zero() => a,
            (a, Expr::Neg(b)) => Expr::sub(a, *b),
            (a, b) => Expr::Add(Box::new(a), Box::new(b)),
        }
    }

    pub fn sub(a: Expr, b: Expr) -> Expr {
        match (a, b) {
            (Expr::Num(x), Expr::Num(y)) => Expr::Num(x - y),
            (a, b) if b.is_zero() => a,
            (a, b) if a.is_zero() => Expr::neg(b),
            (a, b) if a == b => Expr::zero(),
            (a, b) => Expr::Sub(Box::new(a), Box::new(b)),
        }
    }

    pub fn mul(a: Expr, b: Expr) -> Expr {
        match (a, b) {
            (Expr::Num(x), Expr::Num(y)) => Expr::Num(x * y),
            (a, _) if a.is_zero() => Expr::zero(),
            (_, b) if b.is_zero() => Expr::zero(),
            (a, b) if a.is_one() => b,
            (a, b) if b.is_one() => a,
            (a, b) if is_num(&a, -1.0) => Expr::neg(b),
            (a, b) if is_num(&b, -1.0) => Expr::neg(a),
            (a, b) => Expr::Mul(Box::new(a), Box::new(b)),
        }
    }

    pub fn div(a: Expr, b: Expr) -> Expr {
        match (a, b) {
            (Expr::Num(x), Expr::Num(y)) if !y.is_zero() => Expr::Num(x / y),
            (a, _) if a.is_zero() => Expr::zero(),
            (a, b) if b.is_one() => a,
            (a, b) => Expr::Div(Box::new(a), Box::new(b)),
        }
    }

    pub fn pow(a: Expr, n: i32) -> Expr {
        match (a, n) {
            (_, 0) => Expr::one(),
            (a, 1) => a,
            (Expr::Num(z), n) if !(z.is_zero() && n < 0) => Expr::Num(z.powi(n)),
            (a, n) => Expr::Pow(Box::new(a), n),
        }
    }

    pub fn call(f: Func, a: Expr) -> Expr {
        match (f, a) {
            (Func::Exp, a) if a.is_zero() => Expr::one(),
            (Func::Sin, a) if a.is_zero() => Expr::zero(),
            (Func::Cos, a) if a.is_zero() => Expr::one(),
            (Func::Log, a) if a.is_one() => Expr::zero(),
            (f, Expr::Num(z)) if f != Func::Log || !z.is_zero() => Expr::Num(f.apply(z)),
            (f, a) => Expr::Call(f, Box::new(a)),
        }
    }

    pub fn exp(a: Expr) -> Expr {
        Expr::call(Func::Exp, a)
    }

    pub fn sin(a: Expr) -> Expr {
        Expr::call(Func::Sin, a)
    }

    pub fn cos(a: Expr) -> Expr {
        Expr::call(Func::Cos, a)
    }

    pub fn eval(&self, env: &Env) -> Complex64 {
        match self {
            Expr::Num(z) => *z,
            Expr::Var(Var::X(i)) => Complex64::new(env.x[*i], 0.0),
            Expr::Var(Var::T) => Complex64::new(env.t, 0.0),
            Expr::Var(Var::S(i)) => Complex64::new(env.s[*i], 0.0),
            Expr::Neg(a) => -a.eval(env),
            Expr::Add(a, b) => a.eval(env) + b.eval(env),
            Expr::Sub(a, b) => a.eval(env) - b.eval(env),
            Expr::Mul(a, b) => a.eval(env) * b.eval(env),
            Expr::Div(a, b) => a.eval(env) / b.eval(env),
            Expr::Pow(a, n) => a.eval(env).powi(*n),
            Expr::Call(f, a) => f.apply(a.eval(env)),
        }
    }

    /// Exact partial derivative with respect to `v`.
    pub fn diff(&self, v: Var) -> Expr {
        match self {
            Expr::Num(_) => Expr::zero(),
            Expr::Var(w) => {
                if *w == v {
                    Expr::one()
                } else {
                    Expr::zero()
                }
            }
            Expr::Neg(a) => Expr::neg(a.diff(v)),
            Expr::Add(a, b) => Expr::add(a.diff(v), b.diff(v)),
            Expr::Sub(a, b) => Expr::sub(a.diff(v), b.diff(v)),
            Expr::Mul(a, b) => Expr::add(
                Expr::mul(a.diff(v), (**b).clone()),
                Expr::mul((**a).clone(), b.diff(v)),
            ),
            Expr::Div(a, b) => {
                let da = a.diff(v);
                let db = b.diff(v);
                if db.is_zero() {
                    Expr::div(da, (**b).clone())
                } else {
                    Expr::div(
                        Expr::sub(
                            Expr::mul(da, (**b).clone()),
                            Expr::mul((**a).clone(), db),
                        ),
                        Expr::pow((**b).clone(), 2),
                    )
                }
            }
            Expr::Pow(a, n) => Expr::mul(
                Expr::mul(Expr::num(*n as f64), Expr::pow((**a).clone(), n - 1)),
                a.diff(v),
            ),
            Expr::Call(f, a) => {
                let da = a.diff(v);
                let outer = match f {
                    Func::Exp => Expr::exp((**a).clone()),
                    Func::Log => return Expr::div(da, (**a).clone()),
                    Func::Sin => Expr::cos((**a).clone()),
                    Func::Cos => Expr::neg(Expr::sin((**a).clone())),
                };
                Expr::mul(outer, da)
            }
        }
    }

    /// Replace every occurrence of a symbol by an expression.
    pub fn substitute(&self, f: &dyn Fn(Var) -> Option<Expr>) -> Expr {
        match self {
            Expr::Num(_) => self.clone(),
            Expr::Var(v) => f(*v).unwrap_or_else(|| self.clone()),
            Expr::Neg(a) => Expr::neg(a.substitute(f)),
            Expr::Add(a, b) => Expr::add(a.substitute(f), b.substitute(f)),
            Expr::Sub(a, b) => Expr::sub(a.substitute(f), b.substitute(f)),
            Expr::Mul(a, b) => Expr::mul(a.substitute(f), b.substitute(f)),
            Expr::Div(a, b) => Expr::div(a.substitute(f), b.substitute(f)),
            Expr::Pow(a, n) => Expr::pow(a.substitute(f), *n),
            Expr::Call(g, a) => Expr::call(*g, a.substitute(f)),
        }
    }

    /// Precompose with an affine map of the coordinates: `x ↦ Rx + t`.
    pub fn compose_affine(&self, map: &AffineMap) -> Expr {
        let images: Vec<Expr> = (0..map.dim()).map(|i| map.image_expr(i)).collect();
        self.substitute(&|v| match v {
            Var::X(i) => images.get(i).cloned(),
            _ => None,
        })
    }

    pub fn set_var(&self, var: Var, value: f64) -> Expr {
        self.substitute(&|v| if v == var { Some(Expr::num(value)) } else { None })
    }

    pub fn visit_vars(&self, out: &mut dyn FnMut(Var)) {
        match self {
            Expr::Num(_) => {}
            Expr::Var(v) => out(*v),
            Expr::Neg(a) | Expr::Pow(a, _) | Expr::Call(_, a) => a.visit_vars(out),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => {
                a.visit_vars(out);
                b.visit_vars(out);
            }
        }
    }

    pub fn mentions(&self, var: Var) -> bool {
        let mut hit = false;
        self.visit_vars(&mut |v| hit |= v == var);
        hit
    }

    /// Number of coordinates the expression needs (largest `xk` index).
    pub fn coord_arity(&self) -> usize {
        let mut n = 0;
        self.visit_vars(&mut |v| {
            if let Var::X(i) = v {
                n = n.max(i + 1);
            }
        });
        n
    }

    pub fn family_arity(&self) -> usize {
        let mut n = 0;
        self.visit_vars(&mut |v| {
            if let Var::S(i) = v {
                n = n.max(i + 1);
            }
        });
        n
    }

    /// Arguments of every `log` call, outermost first.
    pub fn log_arguments(&self) -> Vec<&Expr> {
        let mut out = Vec::new();
        self.collect_logs(&mut out);
        out
    }

    fn collect_logs<'a>(&'a self, out: &mut Vec<&'a Expr>) {
        match self {
            Expr::Num(_) | Expr::Var(_) => {}
            Expr::Call(Func::Log, a) => {
                out.push(a);
                a.collect_logs(out);
            }
            Expr::Neg(a) | Expr::Pow(a, _) | Expr::Call(_, a) => a.collect_logs(out),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => {
                a.collect_logs(out);
                b.collect_logs(out);
            }
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            Expr::Add(..) | Expr::Sub(..) => 1,
            Expr::Mul(..) | Expr::Div(..) => 2,
            Expr::Neg(_) => 3,
            Expr::Pow(..) => 4,
            Expr::Num(z) if z.im != 0.0 && z.re != 0.0 => 1,
            Expr::Num(z) if z.im != 0.0 && z.im.abs() != 1.0 => 2,
            Expr::Num(z) if z.re < 0.0 || z.im < 0.0 => 3,
            _ => 5,
        }
    }
}

fn fmt_real(v: f64, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    if v == PI {
        write!(f, "pi")
    } else if v != 0.0 && (v.abs() < 1e-4 || v.abs() >= 1e15) {
        write!(f, "{:e}", v)
    } else {
        write!(f, "{}", v)
    }
}

fn fmt_num(z: Complex64, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    if z.im == 0.0 {
        return fmt_real(z.re, f);
    }
    if z.re != 0.0 {
        fmt_real(z.re, f)?;
        write!(f, "{}", if z.im < 0.0 { " - " } else { " + " })?;
    } else if z.im < 0.0 {
        write!(f, "-")?;
    }
    if z.im.abs() != 1.0 {
        fmt_real(z.im.abs(), f)?;
        write!(f, "*")?;
    }
    write!(f, "i")
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let wrap = |e: &Expr, min: u8, f: &mut fmt::Formatter<'_>| -> fmt::Result {
            if e.precedence() < min {
                write!(f, "({})", e)
            } else {
                write!(f, "{}", e)
            }
        };
        match self {
            Expr::Num(z) => fmt_num(*z, f),
            Expr::Var(Var::X(i)) => write!(f, "x{}", i + 1),
            Expr::Var(Var::T) => write!(f, "t"),
            Expr::Var(Var::S(0)) => write!(f, "s"),
            Expr::Var(Var::S(i)) => write!(f, "s{}", i + 1),
            Expr::Neg(a) => {
                write!(f, "-")?;
                wrap(a, 4, f)
            }
            Expr::Add(a, b) => {
                wrap(a, 1, f)?;
                write!(f, " + ")?;
                wrap(b, 2, f)
            }
            Expr::Sub(a, b) => {
                wrap(a, 1, f)?;
                write!(f, " - ")?;
                wrap(b, 2, f)
            }
            Expr::Mul(a, b) => {
                wrap(a, 2, f)?;
                write!(f, "*")?;
                wrap(b, 3, f)
            }
            Expr::Div(a, b) => {
                wrap(a, 2, f)?;
                write!(f, "/")?;
                wrap(b, 4, f)
            }
            Expr::Pow(a, n) => {
                wrap(a, 5, f)?;
                if *n < 0 {
                    write!(f, "^({})", n)
                } else {
                    write!(f, "^{}", n)
                }
            }
            Expr::Call(g, a) => write!(f, "{}({})", g.name(), a),
        }
    }
}

impl From<f64> for Expr {
    fn from(v: f64) -> Self {
        Expr::num(v)
    }
}

impl std::ops::Add for Expr {
    type Output = Expr;
    fn add(self, rhs: Expr) -> Expr {
        Expr::add(self, rhs)
    }
}

impl std::ops::Sub for Expr {
    type Output = Expr;
    fn sub(self, rhs: Expr) -> Expr {
        Expr::sub(self, rhs)
    }
}

impl std::ops::Mul for Expr {
    type Output = Expr;
    fn mul(self, rhs: Expr) -> Expr {
        Expr::mul(self, rhs)
    }
}

impl std::ops::Div for Expr {
    type Output = Expr;
    fn div(self, rhs: Expr) -> Expr {
        Expr::div(self, rhs)
    }
}

impl std::ops::Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        Expr::neg(self)
    }
}

/// `exp(2πi·e)`, the workhorse for periodic unit-modulus data.
pub fn exp_2pi_i(e: Expr) -> Expr {
    Expr::exp(Expr::mul(Expr::Num(Complex64::new(0.0, 2.0 * PI)), e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constructors_fold_constants() {
        assert_eq!(Expr::add(Expr::num(2.0), Expr::num(3.0)), Expr::num(5.0));
        assert_eq!(Expr::mul(Expr::x(0), Expr::one()), Expr::x(0));
        assert_eq!(Expr::mul(Expr::x(0), Expr::zero()), Expr::zero());
        assert_eq!(Expr::sub(Expr::x(1), Expr::x(1)), Expr::zero());
        assert_eq!(Expr::pow(Expr::x(0), 0), Expr::one());
    }

    #[test]
    fn derivative_rules() {
        let e = Expr::pow(Expr::x(0), 2);
        let d = e.diff(Var::X(0));
        assert_eq!(d.eval(&Env::at(&[3.0])), Complex64::new(6.0, 0.0));
        assert!(Expr::x(0).diff(Var::X(1)).is_zero());
    }

    #[test]
    fn affine_composition() {
        let map = AffineMap::new(vec![vec![-1]], vec![num_rational::Rational64::new(1, 2)]).unwrap();
        let e = Expr::x(0).compose_affine(&map);
        assert!((e.eval(&Env::at(&[0.25])).re - 0.25).abs() < 1e-15);
    }
}
