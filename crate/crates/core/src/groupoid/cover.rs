//! Čech groupoids of box covers, on ℝ^d or on the torus ℝ^d/ℤ^d.

use num_rational::Rational64;

use super::GroupoidError;
use crate::form::AffineMap;

/// Open box `∏ (loᵢ, hiᵢ)` in chart coordinates.
#[derive(Clone, Debug, PartialEq)]
pub struct Chart {
    lo: Vec<f64>,
    hi: Vec<f64>,
}

impl Chart {
    pub fn new(lo: Vec<f64>, hi: Vec<f64>) -> Result<Chart, GroupoidError> {
        if lo.len() != hi.len() {
            return Err(GroupoidError::DimensionMismatch {
                expected: lo.len(),
                found: hi.len(),
            });
        }
        Ok(Chart { lo, hi })
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.len() == self.lo.len() && x.iter().zip(self.lo.iter().zip(&self.hi)).all(|(&v, (&l, &h))| l < v && v < h)
    }

    pub fn bounds(&self) -> Vec<(f64, f64)> {
        self.lo.iter().cloned().zip(self.hi.iter().cloned()).collect()
    }

    fn is_empty(&self) -> bool {
        self.lo.iter().zip(&self.hi).any(|(l, h)| l >= h)
    }
}

/// Objects `⨿ Uᵢ`, arrows `⨿ U_{ij}`. Coordinates in chart `j` of a point of `U_{ij}`
/// are `x + n_{ij}` for a unique integer vector `n_{ij}` (zero off the torus).
#[derive(Clone, Debug, PartialEq)]
pub struct CoverGroupoid {
    dim: usize,
    charts: Vec<Chart>,
    periodic: bool,
    shifts: Vec<Vec<Option<Vec<i64>>>>,
}

fn candidate_shifts(a: &Chart, b: &Chart, periodic: bool) -> Vec<Vec<i64>> {
    let mut per_axis: Vec<Vec<i64>> = Vec::new();
    for d in 0..a.lo.len() {
        // n with (b.lo - n, b.hi - n) meeting (a.lo, a.hi)
        let lo = b.lo[d] - a.hi[d];
        let hi = b.hi[d] - a.lo[d];
        let axis: Vec<i64> = if periodic {
            let mut n = lo.floor() as i64;
            let mut v = Vec::new();
            while (n as f64) < hi {
                if (n as f64) > lo {
                    v.push(n);
                }
                n += 1;
            }
            v
        } else if lo < 0.0 && 0.0 < hi {
            vec![0]
        } else {
            Vec::new()
        };
        per_axis.push(axis);
    }
    let mut out = vec![Vec::new()];
    for axis in per_axis {
        out = out
            .into_iter()
            .flat_map(|p: Vec<i64>| {
                axis.iter().map(move |&n| {
                    let mut q = p.clone();
                    q.push(n);
                    q
                })
            })
            .collect();
    }
    out
}

impl CoverGroupoid {
    pub fn new(dim: usize, charts: Vec<Chart>, periodic: bool) -> Result<CoverGroupoid, GroupoidError> {
        for (i, c) in charts.iter().enumerate() {
            if c.lo.len() != dim {
                return Err(GroupoidError::DimensionMismatch {
                    expected: dim,
                    found: c.lo.len(),
                });
            }
            if c.is_empty() {
                return Err(GroupoidError::EmptyChart(i));
            }
        }
        let mut shifts = vec![vec![None; charts.len()]; charts.len()];
        for i in 0..charts.len() {
            for j in 0..charts.len() {
                let cands = candidate_shifts(&charts[i], &charts[j], periodic);
                if cands.len() > 1 {
                    return Err(GroupoidError::NotLeray { i, j });
                }
                shifts[i][j] = cands.into_iter().next();
            }
        }
        Ok(CoverGroupoid {
            dim,
            charts,
            periodic,
            shifts,
        })
    }

    /// `k ≥ 3` arcs covering ℝ/ℤ, each overlapping its neighbours.
    pub fn circle(k: usize) -> CoverGroupoid {
        assert!(k >= 3);
        let pad = 0.15 / k as f64;
        let charts = (0..k)
            .map(|i| {
                Chart::new(
                    vec![i as f64 / k as f64 - pad],
                    vec![(i + 1) as f64 / k as f64 + pad],
                )
                .expect("one-dimensional chart")
            })
            .collect();
        CoverGroupoid::new(1, charts, true).expect("arcs shorter than a third of the circle")
    }

    /// Product grid of `k^d` boxes covering the `d`-torus.
    pub fn torus_grid(dim: usize, k: usize) -> CoverGroupoid {
        assert!(k >= 3);
        let pad = 0.15 / k as f64;
        let mut charts = Vec::new();
        for idx in 0..k.pow(dim as u32) {
            let mut rest = idx;
            let mut lo = vec![0.0; dim];
            let mut hi = vec![0.0; dim];
            for d in (0..dim).rev() {
                let i = rest % k;
                rest /= k;
                lo[d] = i as f64 / k as f64 - pad;
                hi[d] = (i + 1) as f64 / k as f64 + pad;
            }
            charts.push(Chart::new(lo, hi).expect("matching lengths"));
        }
        CoverGroupoid::new(dim, charts, true).expect("grid boxes shorter than a third of the torus")
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn charts(&self) -> &[Chart] {
        &self.charts
    }

    pub fn is_periodic(&self) -> bool {
        self.periodic
    }

    pub fn shift(&self, i: usize, j: usize) -> Option<&[i64]> {
        self.shifts[i][j].as_deref()
    }

    pub fn neighbours(&self, i: usize) -> Vec<usize> {
        (0..self.charts.len()).filter(|&j| self.shifts[i][j].is_some()).collect()
    }

    pub fn shift_map(&self, i: usize, j: usize) -> AffineMap {
        let n = self.shifts[i][j]
            .as_ref()
            .unwrap_or_else(|| panic!("charts {} and {} do not overlap", i, j));
        AffineMap::translation(n.iter().map(|&v| Rational64::from_integer(v)).collect())
    }

    pub fn overlap_contains(&self, i: usize, j: usize, x: &[f64]) -> bool {
        match &self.shifts[i][j] {
            None => false,
            Some(n) => {
                let y: Vec<f64> = x.iter().zip(n).map(|(&v, &s)| v + s as f64).collect();
                self.charts[i].contains(x) && self.charts[j].contains(&y)
            }
        }
    }

    /// A chart containing `x` (mod 1 when periodic), with its coordinates there.
    pub fn locate(&self, x: &[f64]) -> Option<(usize, Vec<f64>)> {
        for (i, c) in self.charts.iter().enumerate() {
            if self.periodic {
                let base: Vec<f64> = x.iter().map(|v| v - v.floor()).collect();
                for shift in [-1.0, 0.0, 1.0] {
                    let y: Vec<f64> = base.iter().map(|v| v + shift).collect();
                    if c.contains(&y) {
                        return Some((i, y));
                    }
                }
            } else if c.contains(x) {
                return Some((i, x.to_vec()));
            }
        }
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn circle_overlaps() {
        let c = CoverGroupoid::circle(3);
        assert_eq!(c.shift(0, 1), Some(&[0][..]));
        assert_eq!(c.shift(0, 2), Some(&[1][..]));
        assert_eq!(c.shift(2, 0), Some(&[-1][..]));
        assert_eq!(c.neighbours(0), vec![0, 1, 2]);
        assert!(c.overlap_contains(2, 0, &[0.99]));
        assert!(!c.overlap_contains(2, 0, &[0.8]));
    }

    #[test]
    fn two_arcs_are_not_leray() {
        let charts = vec![
            Chart::new(vec![-0.1], vec![0.6]).unwrap(),
            Chart::new(vec![0.4], vec![1.1]).unwrap(),
        ];
        assert_eq!(CoverGroupoid::new(1, charts, true), Err(GroupoidError::NotLeray { i: 0, j: 1 }));
    }

    #[test]
    fn intervals_on_the_line() {
        let charts = vec![
            Chart::new(vec![0.0], vec![1.0]).unwrap(),
            Chart::new(vec![0.5], vec![2.0]).unwrap(),
            Chart::new(vec![1.5], vec![3.0]).unwrap(),
        ];
        let c = CoverGroupoid::new(1, charts, false).unwrap();
        assert_eq!(c.neighbours(0), vec![0, 1]);
        assert_eq!(c.neighbours(1), vec![0, 1, 2]);
        assert_eq!(c.locate(&[1.7]).unwrap().0, 1);
    }

    #[test]
    fn grid_counts() {
        let c = CoverGroupoid::torus_grid(2, 3);
        assert_eq!(c.charts().len(), 9);
        assert_eq!(c.neighbours(4).len(), 9);
    }
}
