//! Composite Simpson quadrature for complex integrands.

use num_complex::Complex64;
use thiserror::Error;

pub const DEFAULT_N: usize = 256;
pub const DEFAULT_TARGET: f64 = 1e-9;
pub const MAX_N: usize = 1 << 16;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum QuadratureError {
    #[error("non-finite integrand value at t = {t}")]
    Diverged { t: f64 },
    #[error("subinterval count {0} must be even and positive")]
    BadCount(usize),
}

/// Composite Simpson rule with `n` (even) subintervals on `[a, b]`.
pub fn simpson<F: FnMut(f64) -> Complex64>(mut f: F, a: f64, b: f64, n: usize) -> Result<Complex64, QuadratureError> {
    if n == 0 || n % 2 == 1 {
        return Err(QuadratureError::BadCount(n));
    }
    let h = (b - a) / n as f64;
    let mut sum = Complex64::new(0.0, 0.0);
    for k in 0..=n {
        let t = if k == n { b } else { a + k as f64 * h };
        let v = f(t);
        if !(v.re.is_finite() && v.im.is_finite()) {
            return Err(QuadratureError::Diverged { t });
        }
        let w = if k == 0 || k == n {
            1.0
        } else if k % 2 == 1 {
            4.0
        } else {
            2.0
        };
        sum += v * w;
    }
    Ok(sum * (h / 3.0))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Estimate {
    pub value: Complex64,
    pub n: usize,
    /// Richardson estimate `|S_n - S_{n/2}| / 15`.
    pub error: f64,
}

/// Doubles `n` from `n0` until the Richardson estimate meets `target` (or `MAX_N`).
pub fn adaptive<F: FnMut(f64) -> Complex64>(
    mut f: F,
    a: f64,
    b: f64,
    n0: usize,
    target: f64,
) -> Result<Estimate, QuadratureError> {
    let mut n = n0.max(2);
    let mut prev = simpson(&mut f, a, b, n)?;
    loop {
        let next = simpson(&mut f, a, b, 2 * n)?;
        let error = (next - prev).norm() / 15.0;
        n *= 2;
        if error <= target || n >= MAX_N {
            return Ok(Estimate { value: next, n, error });
        }
        prev = next;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_on_cubics() {
        let v = simpson(|t| Complex64::new(t * t * t - t, 0.0), 0.0, 2.0, 2).unwrap();
        assert!((v.re - 2.0).abs() < 1e-14);
    }

    #[test]
    fn fourth_order_convergence() {
        let exact = (std::f64::consts::FRAC_PI_2).sin();
        let f = |t: f64| Complex64::new(t.cos(), 0.0);
        let e1 = (simpson(f, 0.0, std::f64::consts::FRAC_PI_2, 8).unwrap().re - exact).abs();
        let e2 = (simpson(f, 0.0, std::f64::consts::FRAC_PI_2, 16).unwrap().re - exact).abs();
        assert!(e1 / e2 > 15.0, "{}", e1 / e2);
    }

    #[test]
    fn divergence_is_reported() {
        let r = simpson(|t| Complex64::new(1.0 / t, 0.0), 0.0, 1.0, 4);
        assert_eq!(r, Err(QuadratureError::Diverged { t: 0.0 }));
        assert_eq!(simpson(|_| Complex64::new(1.0, 0.0), 0.0, 1.0, 3), Err(QuadratureError::BadCount(3)));
    }

    #[test]
    fn adaptive_meets_target() {
        let est = adaptive(|t| Complex64::new(0.0, (5.0 * t).sin()), 0.0, 1.0, 4, 1e-12).unwrap();
        let exact = (1.0 - 5f64.cos()) / 5.0;
        assert!((est.value.im - exact).abs() < 1e-11);
    }
}
