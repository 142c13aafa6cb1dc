//! `H²(G, ℂ×) ≅ H²(G, ℚ/ℤ)` from the normalized bar complex, and an
//! enumeration oracle for small groups.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::Rational64;
use num_traits::{ToPrimitive, Zero};

use super::torsion::TorsionCocycle;
use super::SectorError;
use crate::group::FiniteGroup;
use crate::scalar::frac;
use crate::snf::{smith, torsion_u64};

pub const DEFAULT_GROUP_CAP: usize = 64;
/// Largest dense boundary matrix (entries) handed to the Smith form.
pub const MAX_MATRIX_ENTRIES: usize = 4_000_000;

/// Invariant factors of `H²(G, ℂ×)` with one representative per factor.
#[derive(Clone, Debug, PartialEq)]
pub struct SchurData {
    pub factors: Vec<u64>,
    pub representatives: Vec<TorsionCocycle>,
    /// Rows of `V⁻¹` reading class coordinates off a normalized cocycle.
    coordinates: Vec<Vec<BigInt>>,
}

/// Indexing of normalized cochains: tuples of non-identity elements.
pub(crate) struct Bar<'a> {
    pub g: &'a FiniteGroup,
    pub nonid: Vec<usize>,
    /// Position of each element in `nonid` (`None` for the identity).
    pub pos: Vec<Option<usize>>,
}

impl<'a> Bar<'a> {
    pub fn new(g: &'a FiniteGroup) -> Bar<'a> {
        let nonid: Vec<usize> = g.elements().filter(|&x| x != g.id()).collect();
        let mut pos = vec![None; g.order()];
        for (i, &x) in nonid.iter().enumerate() {
            pos[x] = Some(i);
        }
        Bar { g, nonid, pos }
    }

    pub fn m(&self) -> usize {
        self.nonid.len()
    }

    pub fn pair(&self, a: usize, b: usize) -> Option<usize> {
        Some(self.pos[a]? * self.m() + self.pos[b]?)
    }

    /// Coefficients of `δε(a, b, c) = ε(b,c) − ε(ab,c) + ε(a,bc) − ε(a,b)`.
    pub fn coboundary_row(&self, a: usize, b: usize, c: usize) -> Vec<(usize, i64)> {
        let g = self.g;
        let mut row: Vec<(usize, i64)> = Vec::new();
        let mut add = |p: Option<usize>, s: i64| {
            if let Some(p) = p {
                match row.iter_mut().find(|(q, _)| *q == p) {
                    Some(e) => e.1 += s,
                    None => row.push((p, s)),
                }
            }
        };
        add(self.pair(b, c), 1);
        add(self.pair(g.mul(a, b), c), -1);
        add(self.pair(a, g.mul(b, c)), 1);
        add(self.pair(a, b), -1);
        row.retain(|&(_, s)| s != 0);
        row
    }

    pub fn rows(&self) -> Vec<Vec<(usize, i64)>> {
        let mut out = Vec::new();
        for &a in &self.nonid {
            for &b in &self.nonid {
                for &c in &self.nonid {
                    out.push(self.coboundary_row(a, b, c));
                }
            }
        }
        out
    }
}

pub fn h2_finite_group(g: &FiniteGroup) -> Result<SchurData, SectorError> {
    h2_finite_group_capped(g, DEFAULT_GROUP_CAP)
}

pub fn h2_finite_group_capped(g: &FiniteGroup, cap: usize) -> Result<SchurData, SectorError> {
    if g.order() > cap {
        return Err(SectorError::GroupTooLarge { order: g.order(), cap });
    }
    let bar = Bar::new(g);
    let m = bar.m();
    let cols = m * m;
    let rows = m * m * m;
    if rows * cols > MAX_MATRIX_ENTRIES {
        return Err(SectorError::MatrixTooLarge { rows, cols });
    }
    if cols == 0 {
        return Ok(SchurData {
            factors: Vec::new(),
            representatives: Vec::new(),
            coordinates: Vec::new(),
        });
    }
    let dense: Vec<Vec<i64>> = bar
        .rows()
        .into_iter()
        .map(|r| {
            let mut v = vec![0; cols];
            for (p, s) in r {
                v[p] = s;
            }
            v
        })
        .collect();
    let s = smith(&dense, cols);
    let factors = torsion_u64(&s);
    let first = s.rank() - factors.len();
    let mut representatives = Vec::new();
    let mut coordinates = Vec::new();
    for (j, &d) in factors.iter().enumerate() {
        let col = first + j;
        let angles = (0..cols)
            .map(|p| {
                let num = s.v[p][col].mod_floor(&BigInt::from(d)).to_i64().expect("reduced entry");
                Rational64::new(num, d as i64)
            })
            .collect::<Vec<_>>();
        representatives.push(TorsionCocycle::from_normalized(g, &bar, &angles));
        coordinates.push(s.v_inv[col].clone());
    }
    Ok(SchurData {
        factors,
        representatives,
        coordinates,
    })
}

impl SchurData {
    /// Order of `H²`.
    pub fn order(&self) -> u64 {
        self.factors.iter().product()
    }

    /// Coordinates of the class of a normalized cocycle, one per factor.
    pub fn class_of(&self, eps: &TorsionCocycle) -> Vec<u64> {
        let bar = Bar::new(eps.group());
        let c = eps.normalized_vector(&bar);
        self.coordinates
            .iter()
            .zip(&self.factors)
            .map(|(row, &d)| {
                let y = row.iter().zip(&c).fold(Rational64::zero(), |acc, (a, x)| {
                    acc + Rational64::from_integer(a.to_i64().expect("transform entry fits")) * x
                });
                let k = frac(y) * Rational64::from_integer(d as i64);
                assert!(k.is_integer(), "cocycle coordinates are multiples of 1/d");
                k.to_integer() as u64
            })
            .collect()
    }

    /// Representative of the class with the given coordinates.
    pub fn class_representative(&self, g: &FiniteGroup, coords: &[u64]) -> TorsionCocycle {
        let mut eps = TorsionCocycle::trivial(g);
        for (rep, &k) in self.representatives.iter().zip(coords) {
            for _ in 0..k {
                eps = eps.mul(rep);
            }
        }
        eps
    }
}

/// Backtracking solver for systems `Σ cᵢ xᵢ ≡ r (mod m)`, with forced
/// assignment through unit coefficients.
pub(crate) struct ModSolver {
    m: i64,
    rows: Vec<(Vec<(usize, i64)>, i64)>,
    incidence: Vec<Vec<usize>>,
    value: Vec<Option<i64>>,
    count: u64,
    limit: u64,
}

impl ModSolver {
    pub fn new(rows: Vec<(Vec<(usize, i64)>, i64)>, vars: usize, m: i64) -> ModSolver {
        let mut incidence = vec![Vec::new(); vars];
        for (r, (row, _)) in rows.iter().enumerate() {
            for &(v, _) in row {
                incidence[v].push(r);
            }
        }
        ModSolver {
            m,
            rows,
            incidence,
            value: vec![None; vars],
            count: 0,
            limit: u64::MAX,
        }
    }

    /// Assign and propagate; returns false on contradiction. Assigned
    /// variables are pushed to `trail`.
    fn assign(&mut self, var: usize, val: i64, trail: &mut Vec<usize>) -> bool {
        let mut queue = vec![(var, val)];
        while let Some((v, x)) = queue.pop() {
            match self.value[v] {
                Some(y) if y == x => continue,
                Some(_) => return false,
                None => {}
            }
            self.value[v] = Some(x);
            trail.push(v);
            for &r in &self.incidence[v] {
                let (row, rhs) = &self.rows[r];
                let mut sum = -rhs;
                let mut open = None;
                let mut opens = 0;
                for &(u, c) in row {
                    match self.value[u] {
                        Some(y) => sum += c * y,
                        None => {
                            opens += 1;
                            open = Some((u, c));
                        }
                    }
                }
                match (opens, open) {
                    (0, _) if sum.rem_euclid(self.m) != 0 => return false,
                    (1, Some((u, c))) if c == 1 || c == -1 => queue.push((u, (-c * sum).rem_euclid(self.m))),
                    _ => {}
                }
            }
        }
        true
    }

    fn undo(&mut self, trail: &[usize]) {
        for &v in trail {
            self.value[v] = None;
        }
    }

    fn search(&mut self) {
        if self.count >= self.limit {
            return;
        }
        let Some(var) = self.value.iter().position(Option::is_none) else {
            self.count += 1;
            return;
        };
        for x in 0..self.m {
            let mut trail = Vec::new();
            if self.assign(var, x, &mut trail) {
                self.search();
            }
            self.undo(&trail);
        }
    }

    /// Number of solutions (rows with no variables must hold outright).
    pub fn count(mut self) -> u64 {
        if self.rows.iter().any(|(r, rhs)| r.is_empty() && rhs.rem_euclid(self.m) != 0) {
            return 0;
        }
        self.search();
        self.count
    }

    pub fn solvable(mut self) -> bool {
        self.limit = 1;
        self.count() > 0
    }
}

/// Number of normalized `ℤ/m`-valued 2-cocycles on `G`.
pub fn count_normalized_cocycles(g: &FiniteGroup, m: u64) -> u64 {
    let bar = Bar::new(g);
    let vars = bar.m() * bar.m();
    let rows = bar.rows().into_iter().map(|r| (r, 0)).collect();
    ModSolver::new(rows, vars, m as i64).count()
}

fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            out.push(p);
            while n.is_multiple_of(p) {
                n /= p;
            }
        }
        p += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Convert prime-power elementary divisors to invariant factors `d₁ | d₂ | …`.
pub fn invariant_factors(mut elementary: Vec<u64>) -> Vec<u64> {
    let mut by_prime: Vec<(u64, Vec<u64>)> = Vec::new();
    elementary.sort_unstable();
    for q in elementary {
        let p = prime_factors(q)[0];
        match by_prime.iter_mut().find(|(r, _)| *r == p) {
            Some((_, v)) => v.push(q),
            None => by_prime.push((p, vec![q])),
        }
    }
    let len = by_prime.iter().map(|(_, v)| v.len()).max().unwrap_or(0);
    let mut out = vec![1u64; len];
    for (_, mut v) in by_prime {
        v.sort_unstable_by(|a, b| b.cmp(a));
        for (i, q) in v.into_iter().enumerate() {
            out[len - 1 - i] *= q;
        }
    }
    out
}

/// Invariant factors of the Schur multiplier by counting cocycles.
///
/// For a finite group, `|H²(G; ℤ/m)| = |M ⊗ ℤ/m| · |Hom(G, ℤ/m)|` and there
/// are `m^{|G|−1} / |Hom(G, ℤ/m)|` normalized coboundaries, so
/// `|M / mM| = Z_m / m^{|G|−1}` with `Z_m` the count of normalized cocycles.
/// These orders for `m = pᵏ`, `pᵏ | exp G`, determine `M`.
pub fn schur_oracle(g: &FiniteGroup) -> Vec<u64> {
    let n = g.order() as u32;
    let exp = g.exponent() as u64;
    let mut elementary = Vec::new();
    for p in prime_factors(exp) {
        let mut prev_rank = 0u32;
        let mut counts = Vec::new();
        let mut q = p;
        while exp.is_multiple_of(q) {
            let z = count_normalized_cocycles(g, q);
            let quotient = z / q.pow(n - 1);
            assert_eq!(quotient * q.pow(n - 1), z, "cocycle count divisible by the coboundary count");
            let rank = quotient.trailing_zeros_base(p);
            counts.push(rank - prev_rank);
            if rank == prev_rank {
                break;
            }
            prev_rank = rank;
            q *= p;
        }
        // counts[k] = number of cyclic p-factors of order ≥ p^{k+1}
        for k in 0..counts.len() {
            let at_least = counts[k];
            let more = counts.get(k + 1).copied().unwrap_or(0);
            for _ in 0..(at_least - more) {
                elementary.push(p.pow(k as u32 + 1));
            }
        }
    }
    invariant_factors(elementary)
}

trait LogBase {
    fn trailing_zeros_base(self, p: u64) -> u32;
}

impl LogBase for u64 {
    /// `log_p` of a power of `p`.
    fn trailing_zeros_base(mut self, p: u64) -> u32 {
        let mut k = 0;
        while self > 1 {
            assert_eq!(self % p, 0, "order of M/mM is a power of p");
            self /= p;
            k += 1;
        }
        k
    }
}

/// All `2^16` unnormalized `ℤ/2`-valued 2-cochains on a group of order 4:
/// the number of cocycles and the number of coboundaries.
pub fn brute_force_order_four(g: &FiniteGroup) -> (u64, u64) {
    assert_eq!(g.order(), 4);
    let n = 4;
    let mut cocycles = 0;
    for bits in 0u32..(1 << 16) {
        let e = |a: usize, b: usize| (bits >> (a * n + b)) & 1;
        let ok = (0..n).all(|a| {
            (0..n).all(|b| (0..n).all(|c| (e(b, c) + e(g.mul(a, b), c) + e(a, g.mul(b, c)) + e(a, b)) % 2 == 0))
        });
        cocycles += ok as u64;
    }
    let mut boundaries = std::collections::BTreeSet::new();
    for beta in 0u32..(1 << 4) {
        let b = |a: usize| (beta >> a) & 1;
        let mut bits = 0u32;
        for x in 0..n {
            for y in 0..n {
                bits |= ((b(x) + b(y) + b(g.mul(x, y))) % 2) << (x * n + y);
            }
        }
        boundaries.insert(bits);
    }
    (cocycles, boundaries.len() as u64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn klein_four() {
        let g = FiniteGroup::parse("Z/2xZ/2").unwrap();
        let s = h2_finite_group(&g).unwrap();
        assert_eq!(s.factors, vec![2]);
        assert_eq!(schur_oracle(&g), vec![2]);
        // 2^16 cochains: 32 cocycles, 4 coboundaries, |H²(G; Z/2)| = 8 = |M/2M| · |Hom(G, Z/2)|
        assert_eq!(brute_force_order_four(&g), (32, 4));
        let rep = &s.representatives[0];
        assert!(rep.is_cocycle());
        assert_eq!(s.class_of(rep), vec![1]);
    }

    #[test]
    fn cyclic_groups_have_trivial_multiplier() {
        for n in 1..=4 {
            let g = FiniteGroup::cyclic(n);
            assert!(h2_finite_group(&g).unwrap().factors.is_empty());
            assert!(schur_oracle(&g).is_empty());
        }
        let (cocycles, boundaries) = brute_force_order_four(&FiniteGroup::cyclic(4));
        assert_eq!((cocycles, boundaries), (16, 8));
    }

    #[test]
    fn elementary_to_invariant() {
        assert_eq!(invariant_factors(vec![2, 4, 3]), vec![2, 12]);
        assert_eq!(invariant_factors(vec![2, 2, 2]), vec![2, 2, 2]);
        assert!(invariant_factors(vec![]).is_empty());
    }

    #[test]
    fn cap_is_enforced() {
        let g = FiniteGroup::cyclic(70);
        assert!(matches!(h2_finite_group(&g), Err(SectorError::GroupTooLarge { .. })));
        let g = FiniteGroup::cyclic(40);
        assert!(matches!(h2_finite_group(&g), Err(SectorError::MatrixTooLarge { .. })));
    }
}
