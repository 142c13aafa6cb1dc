//! Sound (but incomplete) zero test: expressions are expanded into polynomials
//! over "atoms" (variables, function applications, reciprocals of sums). Equal
//! normal forms imply equal functions, so a vanishing normal form certifies an
//! identically zero expression.

use std::collections::BTreeMap;

use num_complex::Complex64;
use num_traits::Zero;

use super::expr::{Expr, Var};

type Mono = Vec<(String, i32)>;
type Poly = BTreeMap<Mono, Complex64>;

const TERM_CAP: usize = 4096;
const CANCEL: f64 = 1e-12;

fn var_key(v: Var) -> String {
    match v {
        Var::X(i) => format!("x{}", i + 1),
        Var::T => "t".into(),
        Var::S(i) => format!("s{}", i + 1),
    }
}

fn poly_key(p: &Poly) -> String {
    let mut out = String::new();
    for (m, c) in p {
        out.push_str(&format!("{:.15e},{:.15e}", c.re, c.im));
        for (a, n) in m {
            out.push_str(&format!("·{}^{}", a, n));
        }
        out.push(';');
    }
    out
}

fn constant(z: Complex64) -> Poly {
    let mut p = Poly::new();
    if !z.is_zero() {
        p.insert(Vec::new(), z);
    }
    p
}

fn atom(key: String, power: i32) -> Poly {
    let mut p = Poly::new();
    p.insert(vec![(key, power)], Complex64::new(1.0, 0.0));
    p
}

fn add_into(acc: &mut Poly, m: Mono, c: Complex64) {
    let slot = acc.entry(m.clone()).or_insert_with(Complex64::zero);
    let before = *slot;
    *slot += c;
    if slot.norm() <= CANCEL * before.norm().max(c.norm()) {
        acc.remove(&m);
    }
}

fn scale(p: Poly, k: Complex64) -> Poly {
    p.into_iter()
        .map(|(m, c)| (m, c * k))
        .filter(|(_, c)| !c.is_zero())
        .collect()
}

fn sum(mut a: Poly, b: Poly, sign: f64) -> Poly {
    for (m, c) in b {
        add_into(&mut a, m, c * sign);
    }
    a
}

fn mono_mul(a: &Mono, b: &Mono) -> Mono {
    let mut powers: BTreeMap<String, i32> = a.iter().cloned().collect();
    for (k, n) in b {
        *powers.entry(k.clone()).or_insert(0) += n;
    }
    powers.into_iter().filter(|(_, n)| *n != 0).collect()
}

fn product(a: &Poly, b: &Poly) -> Option<Poly> {
    if a.len() * b.len() > TERM_CAP {
        return None;
    }
    let mut out = Poly::new();
    for (ma, ca) in a {
        for (mb, cb) in b {
            add_into(&mut out, mono_mul(ma, mb), ca * cb);
        }
    }
    Some(out)
}

fn reciprocal(p: &Poly, power: i32) -> Poly {
    if p.len() == 1 {
        let (m, c) = p.iter().next().unwrap();
        let inv: Mono = m.iter().map(|(k, n)| (k.clone(), -n * power)).collect();
        let mut out = Poly::new();
        out.insert(inv, c.powi(-power));
        return out;
    }
    atom(format!("inv[{}]", poly_key(p)), power)
}

fn normal_form(e: &Expr) -> Option<Poly> {
    Some(match e {
        Expr::Num(z) => constant(*z),
        Expr::Var(v) => atom(var_key(*v), 1),
        Expr::Neg(a) => scale(normal_form(a)?, Complex64::new(-1.0, 0.0)),
        Expr::Add(a, b) => sum(normal_form(a)?, normal_form(b)?, 1.0),
        Expr::Sub(a, b) => sum(normal_form(a)?, normal_form(b)?, -1.0),
        Expr::Mul(a, b) => product(&normal_form(a)?, &normal_form(b)?)?,
        Expr::Div(a, b) => {
            let den = normal_form(b)?;
            if den.is_empty() {
                return None;
            }
            product(&normal_form(a)?, &reciprocal(&den, 1))?
        }
        Expr::Pow(a, n) => {
            let base = normal_form(a)?;
            if *n >= 0 {
                let mut acc = constant(Complex64::new(1.0, 0.0));
                for _ in 0..*n {
                    acc = product(&acc, &base)?;
                }
                acc
            } else {
                if base.is_empty() {
                    return None;
                }
                reciprocal(&base, -n)
            }
        }
        Expr::Call(f, a) => {
            let arg = normal_form(a)?;
            atom(format!("{}[{}]", f.name(), poly_key(&arg)), 1)
        }
    })
}

/// `true` only when the expression is certified to vanish identically.
pub fn is_identically_zero(e: &Expr) -> bool {
    if e.is_zero() {
        return true;
    }
    matches!(normal_form(e), Some(p) if p.is_empty())
}
