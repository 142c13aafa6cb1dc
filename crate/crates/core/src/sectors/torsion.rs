//! Discrete torsion: `ℚ/ℤ`-valued 2-cocycles of a finite group and the flat
//! gerbes they define on global quotients.

use num_integer::Integer;
use num_rational::Rational64;
use num_traits::Zero;

use super::schur::{Bar, ModSolver};
use super::SectorError;
use crate::deligne::{Cell, CochainFunction, GerbeData};
use crate::group::FiniteGroup;
use crate::groupoid::{Groupoid, NerveKey};
use crate::scalar::{frac, Scalar};

/// `ε(a, b) = exp(2πi · angle[a][b])`, normalized so that `ε(e, ·) = ε(·, e) = 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct TorsionCocycle {
    group: FiniteGroup,
    angles: Vec<Vec<Rational64>>,
    /// Constant removed during normalization (a coboundary shift).
    pub shift: Rational64,
}

impl TorsionCocycle {
    pub fn trivial(g: &FiniteGroup) -> TorsionCocycle {
        let n = g.order();
        TorsionCocycle {
            group: g.clone(),
            angles: vec![vec![Rational64::zero(); n]; n],
            shift: Rational64::zero(),
        }
    }

    pub(crate) fn from_normalized(g: &FiniteGroup, bar: &Bar, values: &[Rational64]) -> TorsionCocycle {
        let mut eps = TorsionCocycle::trivial(g);
        for &a in &bar.nonid {
            for &b in &bar.nonid {
                eps.angles[a][b] = frac(values[bar.pair(a, b).expect("non-identity pair")]);
            }
        }
        eps
    }

    /// Validate a full table of angles and normalize it.
    pub fn from_angles(g: &FiniteGroup, angles: Vec<Vec<Rational64>>) -> Result<TorsionCocycle, SectorError> {
        let n = g.order();
        if angles.len() != n || angles.iter().any(|r| r.len() != n) {
            return Err(SectorError::BadTable { expected: n });
        }
        let raw = TorsionCocycle {
            group: g.clone(),
            angles: angles.into_iter().map(|r| r.into_iter().map(frac).collect()).collect(),
            shift: Rational64::zero(),
        };
        if let Some((a, b, c)) = raw.cocycle_violation() {
            return Err(SectorError::NotCocycle {
                a: g.name(a).to_string(),
                b: g.name(b).to_string(),
                c: g.name(c).to_string(),
            });
        }
        // for a cocycle ε(e, g) = ε(g, e) = ε(e, e): subtracting the constant δ(c) = c normalizes
        let shift = raw.angles[g.id()][g.id()];
        let mut eps = raw;
        for row in &mut eps.angles {
            for v in row.iter_mut() {
                *v = frac(*v - shift);
            }
        }
        eps.shift = shift;
        Ok(eps)
    }

    pub fn group(&self) -> &FiniteGroup {
        &self.group
    }

    pub fn angle(&self, a: usize, b: usize) -> Rational64 {
        self.angles[a][b]
    }

    pub fn value(&self, a: usize, b: usize) -> Scalar {
        Scalar::phase(self.angles[a][b])
    }

    pub fn angles(&self) -> &[Vec<Rational64>] {
        &self.angles
    }

    pub fn mul(&self, o: &TorsionCocycle) -> TorsionCocycle {
        let mut out = self.clone();
        for (r, s) in out.angles.iter_mut().zip(&o.angles) {
            for (v, w) in r.iter_mut().zip(s) {
                *v = frac(*v + w);
            }
        }
        out.shift = frac(self.shift + o.shift);
        out
    }

    pub fn inv(&self) -> TorsionCocycle {
        let mut out = self.clone();
        for r in &mut out.angles {
            for v in r.iter_mut() {
                *v = frac(-*v);
            }
        }
        out
    }

    /// First triple where `δε ≠ 1`.
    pub fn cocycle_violation(&self) -> Option<(usize, usize, usize)> {
        let g = &self.group;
        for a in g.elements() {
            for b in g.elements() {
                for c in g.elements() {
                    let e = &self.angles;
                    let d = e[b][c] - e[g.mul(a, b)][c] + e[a][g.mul(b, c)] - e[a][b];
                    if !d.is_integer() {
                        return Some((a, b, c));
                    }
                }
            }
        }
        None
    }

    pub fn is_cocycle(&self) -> bool {
        self.cocycle_violation().is_none()
    }

    pub fn is_normalized(&self) -> bool {
        let e = self.group.id();
        self.group
            .elements()
            .all(|g| self.angles[e][g].is_zero() && self.angles[g][e].is_zero())
    }

    /// Least common denominator of the angles.
    pub fn denominator(&self) -> i64 {
        self.angles
            .iter()
            .flatten()
            .fold(1i64, |acc, r| acc.lcm(r.denom()))
    }

    pub(crate) fn normalized_vector(&self, bar: &Bar) -> Vec<Rational64> {
        let mut out = vec![Rational64::zero(); bar.m() * bar.m()];
        for &a in &bar.nonid {
            for &b in &bar.nonid {
                out[bar.pair(a, b).expect("non-identity pair")] = self.angles[a][b];
            }
        }
        out
    }

    /// Exhaustive search for `β` with `δβ = ε`.
    ///
    /// For `a` of order `n`, `Σᵢ ε(a, aⁱ) = n β(a)`, so `β` may be taken with
    /// values in `(1/(d·exp G))ℤ/ℤ` where `d` is the denominator of `ε`.
    pub fn is_coboundary(&self) -> bool {
        let g = &self.group;
        let bar = Bar::new(g);
        let modulus = self.denominator() * g.exponent() as i64;
        let mut rows = Vec::new();
        for &a in &bar.nonid {
            for &b in &bar.nonid {
                let mut row: Vec<(usize, i64)> = Vec::new();
                let mut add = |x: Option<usize>, s: i64| {
                    if let Some(p) = x {
                        match row.iter_mut().find(|(q, _)| *q == p) {
                            Some(e) => e.1 += s,
                            None => row.push((p, s)),
                        }
                    }
                };
                add(bar.pos[a], 1);
                add(bar.pos[b], 1);
                add(bar.pos[g.mul(a, b)], -1);
                row.retain(|&(_, s)| s != 0);
                let rhs = self.angles[a][b] * Rational64::from_integer(modulus);
                rows.push((row, rhs.to_integer()));
            }
        }
        ModSolver::new(rows, bar.m(), modulus).solvable()
    }

    /// `ε(g, k) / ε(k, k⁻¹gk)` for an abelian group, an alternating bicharacter.
    pub fn commutator_phase(&self, g: usize, k: usize) -> Scalar {
        let c = self.group.conj(g, k);
        self.value(g, k).div(self.value(k, c))
    }
}

/// `h(x; g₁, g₂) = ε(g₁, g₂)` on every base component, `A = B = 0`.
pub fn torsion_gerbe(eps: &TorsionCocycle, x: &Groupoid) -> Result<GerbeData, SectorError> {
    if let Some((a, b, c)) = eps.cocycle_violation() {
        let g = eps.group();
        return Err(SectorError::NotCocycle {
            a: g.name(a).to_string(),
            b: g.name(b).to_string(),
            c: g.name(c).to_string(),
        });
    }
    match x.group() {
        Some(g) if g.table() == eps.group().table() => {}
        _ => return Err(SectorError::GroupMismatch),
    }
    let mut h = CochainFunction::one(2);
    for key in x.nerve_keys(2) {
        let v = eps.value(key.labels[0], key.labels[1]);
        if v != Scalar::one() {
            h.set(NerveKey::new(key.comp, key.labels.clone()), Cell::Exact(v));
        }
    }
    Ok(GerbeData {
        h,
        ..GerbeData::trivial(x)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::deligne::{verify_gerbe, VerifyOptions};
    use crate::groupoid::ActionGroupoid;

    fn klein_epsilon() -> TorsionCocycle {
        let g = FiniteGroup::parse("Z/2xZ/2").unwrap();
        let angles = g
            .elements()
            .map(|a| {
                g.elements()
                    .map(|b| Rational64::new((g.coords(a).unwrap()[0] * g.coords(b).unwrap()[1]) as i64, 2))
                    .collect()
            })
            .collect();
        TorsionCocycle::from_angles(&g, angles).unwrap()
    }

    #[test]
    fn klein_torsion_is_not_a_coboundary() {
        let eps = klein_epsilon();
        assert!(eps.is_normalized());
        assert!(!eps.is_coboundary());
        assert!(eps.mul(&eps).is_coboundary());
        let g = eps.group().clone();
        let (a, b) = (g.element_by_name("(1,0)").unwrap(), g.element_by_name("(0,1)").unwrap());
        assert_eq!(eps.commutator_phase(a, b), Scalar::phase(Rational64::new(1, 2)));
    }

    #[test]
    fn normalization_records_the_shift() {
        let g = FiniteGroup::cyclic(3);
        let angles = vec![vec![Rational64::new(1, 5); 3]; 3];
        let eps = TorsionCocycle::from_angles(&g, angles).unwrap();
        assert_eq!(eps.shift, Rational64::new(1, 5));
        assert!(eps.is_normalized());
        assert!(eps.is_coboundary());
    }

    #[test]
    fn non_cocycle_is_rejected() {
        let g = FiniteGroup::cyclic(2);
        let mut angles = vec![vec![Rational64::zero(); 2]; 2];
        angles[1][1] = Rational64::new(1, 4);
        angles[0][1] = Rational64::new(1, 3);
        assert!(matches!(TorsionCocycle::from_angles(&g, angles), Err(SectorError::NotCocycle { .. })));
    }

    #[test]
    fn gerbe_passes_verification() {
        let eps = klein_epsilon();
        let x = Groupoid::Action(ActionGroupoid::trivial_on_points(eps.group().clone(), 2));
        let gerbe = torsion_gerbe(&eps, &x).unwrap();
        let r = verify_gerbe(&x, &gerbe, &VerifyOptions::default()).unwrap();
        assert!(r.pass(), "{}", r);
        assert!(r.checks.iter().all(|c| c.exact));
    }
}
