//! Finite groups given by multiplication tables.

use std::fmt;

use num_integer::Integer;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GroupError {
    #[error("unrecognised group spec `{0}`")]
    BadSpec(String),
    #[error("table is not {n}x{n} with entries below {n}")]
    BadTable { n: usize },
    #[error("no two-sided identity element")]
    NoIdentity,
    #[error("element {0} has no inverse")]
    NoInverse(usize),
    #[error("not associative: ({a}*{b})*{c} != {a}*({b}*{c})")]
    NotAssociative { a: usize, b: usize, c: usize },
    #[error("group order {order} exceeds cap {cap}")]
    TooLarge { order: usize, cap: usize },
}

/// Validated finite group; elements are indices `0..order`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteGroup {
    label: String,
    table: Vec<Vec<usize>>,
    id: usize,
    inv: Vec<usize>,
    names: Vec<String>,
    /// Orders of the cyclic factors when built as `Z/n1xZ/n2x...`;
    /// element index is the mixed-radix number with the first factor most significant.
    cyclic_factors: Option<Vec<usize>>,
}

pub const ASSOCIATIVITY_CAP: usize = 256;

impl FiniteGroup {
    /// Validate a multiplication table (`table[a][b] = ab`).
    pub fn from_table(label: &str, table: Vec<Vec<usize>>) -> Result<FiniteGroup, GroupError> {
        let n = table.len();
        if n == 0 || table.iter().any(|r| r.len() != n || r.iter().any(|&v| v >= n)) {
            return Err(GroupError::BadTable { n });
        }
        if n > ASSOCIATIVITY_CAP {
            return Err(GroupError::TooLarge {
                order: n,
                cap: ASSOCIATIVITY_CAP,
            });
        }
        let id = (0..n)
            .find(|&e| (0..n).all(|g| table[e][g] == g && table[g][e] == g))
            .ok_or(GroupError::NoIdentity)?;
        let mut inv = vec![0; n];
        for g in 0..n {
            inv[g] = (0..n)
                .find(|&h| table[g][h] == id && table[h][g] == id)
                .ok_or(GroupError::NoInverse(g))?;
        }
        for a in 0..n {
            for b in 0..n {
                let ab = table[a][b];
                for c in 0..n {
                    if table[ab][c] != table[a][table[b][c]] {
                        return Err(GroupError::NotAssociative { a, b, c });
                    }
                }
            }
        }
        Ok(FiniteGroup {
            label: label.to_string(),
            names: (0..n).map(|g| g.to_string()).collect(),
            table,
            id,
            inv,
            cyclic_factors: None,
        })
    }

    /// Accept a table without checking the group laws, so that downstream
    /// compatibility checks can report on it. Identity and inverses are found
    /// where they exist (falling back to index 0).
    pub fn from_table_unchecked(label: &str, table: Vec<Vec<usize>>) -> Result<FiniteGroup, GroupError> {
        let n = table.len();
        if n == 0 || table.iter().any(|r| r.len() != n || r.iter().any(|&v| v >= n)) {
            return Err(GroupError::BadTable { n });
        }
        let id = (0..n)
            .find(|&e| (0..n).all(|g| table[e][g] == g && table[g][e] == g))
            .unwrap_or(0);
        let inv = (0..n)
            .map(|g| (0..n).find(|&h| table[g][h] == id).unwrap_or(0))
            .collect();
        Ok(FiniteGroup {
            label: label.to_string(),
            names: (0..n).map(|g| g.to_string()).collect(),
            table,
            id,
            inv,
            cyclic_factors: None,
        })
    }

    /// Re-run the group-law checks.
    pub fn validate(&self) -> Result<(), GroupError> {
        FiniteGroup::from_table(&self.label, self.table.clone()).map(|_| ())
    }

    pub fn table(&self) -> &[Vec<usize>] {
        &self.table
    }

    pub fn cyclic(n: usize) -> FiniteGroup {
        FiniteGroup::cyclic_product(&[n])
    }

    pub fn cyclic_product(factors: &[usize]) -> FiniteGroup {
        assert!(!factors.is_empty() && factors.iter().all(|&f| f >= 1));
        let order: usize = factors.iter().product();
        let coords = |mut g: usize| -> Vec<usize> {
            let mut c = vec![0; factors.len()];
            for (k, &f) in factors.iter().enumerate().rev() {
                c[k] = g % f;
                g /= f;
            }
            c
        };
        let index = |c: &[usize]| c.iter().zip(factors).fold(0, |acc, (&v, &f)| acc * f + v);
        let table = (0..order)
            .map(|a| {
                let ca = coords(a);
                (0..order)
                    .map(|b| {
                        let cb = coords(b);
                        let sum: Vec<usize> = (0..factors.len())
                            .map(|k| (ca[k] + cb[k]) % factors[k])
                            .collect();
                        index(&sum)
                    })
                    .collect()
            })
            .collect();
        let label = factors
            .iter()
            .map(|f| format!("Z/{}", f))
            .collect::<Vec<_>>()
            .join("x");
        let mut g = FiniteGroup::from_table(&label, table).expect("cyclic products are groups");
        g.names = (0..order)
            .map(|a| {
                let c = coords(a);
                if c.len() == 1 {
                    c[0].to_string()
                } else {
                    format!(
                        "({})",
                        c.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(",")
                    )
                }
            })
            .collect();
        g.cyclic_factors = Some(factors.to_vec());
        g
    }

    /// Symmetric group on three letters: elements `r^a s^b`, `s r s = r^-1`.
    pub fn s3() -> FiniteGroup {
        FiniteGroup::dihedral(3, "S3")
    }

    /// Dihedral group of order `2n`: elements `r^a s^b` stored at index `2a + b`.
    pub fn dihedral(n: usize, label: &str) -> FiniteGroup {
        let idx = |a: usize, b: usize| 2 * a + b;
        let mut table = vec![vec![0; 2 * n]; 2 * n];
        for a in 0..n {
            for b in 0..2 {
                for c in 0..n {
                    for d in 0..2 {
                        // r^a s^b r^c s^d = r^(a ± c) s^(b+d)
                        let e = if b == 0 { (a + c) % n } else { (a + n - c) % n };
                        table[idx(a, b)][idx(c, d)] = idx(e, (b + d) % 2);
                    }
                }
            }
        }
        let mut g = FiniteGroup::from_table(label, table).expect("dihedral groups are groups");
        g.names = (0..2 * n)
            .map(|k| {
                let (a, b) = (k / 2, k % 2);
                match (a, b) {
                    (0, 0) => "e".to_string(),
                    (0, 1) => "s".to_string(),
                    (a, 0) => format!("r^{}", a),
                    (a, _) => format!("r^{}s", a),
                }
            })
            .collect();
        g
    }

    /// Quaternion group `{±1, ±i, ±j, ±k}`.
    pub fn quaternion() -> FiniteGroup {
        // unit quaternions as (sign, axis) with axis 0 = 1, 1 = i, 2 = j, 3 = k
        let mul = |(s1, a1): (i8, usize), (s2, a2): (i8, usize)| -> (i8, usize) {
            let (s, a) = match (a1, a2) {
                (0, a) | (a, 0) => (1, a),
                (a, b) if a == b => (-1, 0),
                (1, 2) => (1, 3),
                (2, 3) => (1, 1),
                (3, 1) => (1, 2),
                (2, 1) => (-1, 3),
                (3, 2) => (-1, 1),
                (1, 3) => (-1, 2),
                _ => unreachable!(),
            };
            (s * s1 * s2, a)
        };
        let elems: Vec<(i8, usize)> = [(1, 0), (-1, 0), (1, 1), (-1, 1), (1, 2), (-1, 2), (1, 3), (-1, 3)].to_vec();
        let pos = |q: (i8, usize)| elems.iter().position(|&e| e == q).unwrap();
        let table = elems
            .iter()
            .map(|&a| elems.iter().map(|&b| pos(mul(a, b))).collect())
            .collect();
        let mut g = FiniteGroup::from_table("Q8", table).expect("Q8 is a group");
        g.names = ["1", "-1", "i", "-i", "j", "-j", "k", "-k"]
            .iter()
            .map(|s| s.to_string())
            .collect();
        g
    }

    pub fn trivial() -> FiniteGroup {
        FiniteGroup::cyclic(1)
    }

    /// `Z/n`, `Z/nxZ/m[x...]`, or one of `S3`, `D4`, `Q8`.
    pub fn parse(spec: &str) -> Result<FiniteGroup, GroupError> {
        let compact: String = spec.chars().filter(|c| !c.is_whitespace()).collect();
        match compact.as_str() {
            "S3" => return Ok(FiniteGroup::s3()),
            "D4" => return Ok(FiniteGroup::dihedral(4, "D4")),
            "Q8" => return Ok(FiniteGroup::quaternion()),
            "1" | "trivial" => return Ok(FiniteGroup::trivial()),
            _ => {}
        }
        let bad = || GroupError::BadSpec(spec.to_string());
        let mut factors = Vec::new();
        for part in compact.split('x') {
            let n = part.strip_prefix("Z/").ok_or_else(bad)?;
            let n: usize = n.parse().map_err(|_| bad())?;
            if n == 0 {
                return Err(bad());
            }
            factors.push(n);
        }
        let order: usize = factors.iter().try_fold(1usize, |acc, &f| acc.checked_mul(f)).ok_or_else(bad)?;
        if order > ASSOCIATIVITY_CAP {
            return Err(GroupError::TooLarge {
                order,
                cap: ASSOCIATIVITY_CAP,
            });
        }
        Ok(FiniteGroup::cyclic_product(&factors))
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn order(&self) -> usize {
        self.table.len()
    }

    pub fn id(&self) -> usize {
        self.id
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.table[a][b]
    }

    pub fn inv(&self, a: usize) -> usize {
        self.inv[a]
    }

    /// `k⁻¹ g k`.
    pub fn conj(&self, g: usize, k: usize) -> usize {
        self.mul(self.mul(self.inv(k), g), k)
    }

    pub fn name(&self, g: usize) -> &str {
        &self.names[g]
    }

    pub fn element_by_name(&self, name: &str) -> Option<usize> {
        let compact: String = name.chars().filter(|c| !c.is_whitespace()).collect();
        self.names.iter().position(|n| *n == compact)
    }

    pub fn cyclic_factors(&self) -> Option<&[usize]> {
        self.cyclic_factors.as_deref()
    }

    /// Mixed-radix coordinates for cyclic products.
    pub fn coords(&self, mut g: usize) -> Option<Vec<usize>> {
        let f = self.cyclic_factors.as_ref()?;
        let mut c = vec![0; f.len()];
        for k in (0..f.len()).rev() {
            c[k] = g % f[k];
            g /= f[k];
        }
        Some(c)
    }

    pub fn elements(&self) -> std::ops::Range<usize> {
        0..self.order()
    }

    pub fn is_abelian(&self) -> bool {
        self.elements()
            .all(|a| self.elements().all(|b| self.mul(a, b) == self.mul(b, a)))
    }

    pub fn pow(&self, g: usize, n: usize) -> usize {
        (0..n).fold(self.id, |acc, _| self.mul(acc, g))
    }

    pub fn element_order(&self, g: usize) -> usize {
        let mut x = g;
        let mut k = 1;
        while x != self.id {
            x = self.mul(x, g);
            k += 1;
        }
        k
    }

    pub fn exponent(&self) -> usize {
        self.elements().fold(1, |acc, g| acc.lcm(&self.element_order(g)))
    }

    /// Subgroup generated by `gens`, sorted.
    pub fn generated(&self, gens: &[usize]) -> Vec<usize> {
        let mut seen = vec![false; self.order()];
        seen[self.id] = true;
        let mut frontier = vec![self.id];
        while let Some(x) = frontier.pop() {
            for &g in gens {
                let y = self.mul(x, g);
                if !seen[y] {
                    seen[y] = true;
                    frontier.push(y);
                }
            }
        }
        self.elements().filter(|&g| seen[g]).collect()
    }

    /// A small generating set, chosen greedily by element order.
    pub fn generators(&self) -> Vec<usize> {
        let mut by_order: Vec<usize> = self.elements().filter(|&g| g != self.id).collect();
        by_order.sort_by_key(|&g| (std::cmp::Reverse(self.element_order(g)), g));
        let mut gens = Vec::new();
        let mut span = vec![self.id];
        for g in by_order {
            if span.len() == self.order() {
                break;
            }
            if !span.contains(&g) {
                gens.push(g);
                span = self.generated(&gens);
            }
        }
        gens
    }

    pub fn centralizer(&self, g: usize) -> Vec<usize> {
        self.elements()
            .filter(|&h| self.mul(g, h) == self.mul(h, g))
            .collect()
    }

    /// Conjugacy classes (each sorted, ordered by least element) with
    /// the centralizer of each class's least element.
    pub fn conjugacy_data(&self) -> Vec<ConjugacyClass> {
        let mut assigned = vec![false; self.order()];
        let mut out = Vec::new();
        for g in self.elements() {
            if assigned[g] {
                continue;
            }
            let mut class: Vec<usize> = self.elements().map(|h| self.conj(g, h)).collect();
            class.sort_unstable();
            class.dedup();
            for &c in &class {
                assigned[c] = true;
            }
            out.push(ConjugacyClass {
                representative: g,
                elements: class,
                centralizer: self.centralizer(g),
            });
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConjugacyClass {
    pub representative: usize,
    pub elements: Vec<usize>,
    pub centralizer: Vec<usize>,
}

impl fmt::Display for FiniteGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (order {})", self.label, self.order())
    }
}

/// Named groups of order at most 8 (one per isomorphism class).
pub fn small_groups() -> Vec<FiniteGroup> {
    let mut out: Vec<FiniteGroup> = (1..=8).map(FiniteGroup::cyclic).collect();
    out.push(FiniteGroup::cyclic_product(&[2, 2]));
    out.push(FiniteGroup::cyclic_product(&[2, 4]));
    out.push(FiniteGroup::cyclic_product(&[2, 2, 2]));
    out.push(FiniteGroup::s3());
    out.push(FiniteGroup::dihedral(4, "D4"));
    out.push(FiniteGroup::quaternion());
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_specs() {
        let g = FiniteGroup::parse("Z/2xZ/2").unwrap();
        assert_eq!(g.order(), 4);
        assert_eq!(g.name(2), "(1,0)");
        assert_eq!(g.mul(2, 1), 3);
        assert!(matches!(FiniteGroup::parse("Z/0"), Err(GroupError::BadSpec(_))));
        assert!(matches!(FiniteGroup::parse("A5"), Err(GroupError::BadSpec(_))));
    }

    #[test]
    fn rejects_bad_tables() {
        assert_eq!(
            FiniteGroup::from_table("bad", vec![vec![0, 1], vec![1, 1]]),
            Err(GroupError::NoInverse(1))
        );
        // latin square with identity 0 that is not associative
        let t = vec![
            vec![0, 1, 2, 3, 4],
            vec![1, 0, 3, 4, 2],
            vec![2, 4, 0, 1, 3],
            vec![3, 2, 4, 0, 1],
            vec![4, 3, 1, 2, 0],
        ];
        assert!(matches!(
            FiniteGroup::from_table("loop", t),
            Err(GroupError::NotAssociative { .. })
        ));
    }

    #[test]
    fn s3_classes() {
        let g = FiniteGroup::s3();
        let mut sizes: Vec<usize> = g.conjugacy_data().iter().map(|c| c.elements.len()).collect();
        sizes.sort_unstable();
        assert_eq!(sizes, vec![1, 2, 3]);
        let s = g.element_by_name("s").unwrap();
        assert_eq!(g.centralizer(s).len(), 2);
        for c in g.conjugacy_data() {
            assert_eq!(c.elements.len() * c.centralizer.len(), 6);
        }
    }

    #[test]
    fn abelian_classes_are_singletons() {
        let g = FiniteGroup::cyclic_product(&[2, 4]);
        assert!(g.conjugacy_data().iter().all(|c| c.elements.len() == 1 && c.centralizer.len() == 8));
        assert_eq!(g.exponent(), 4);
    }

    #[test]
    fn small_group_catalogue() {
        let groups = small_groups();
        assert_eq!(groups.len(), 14);
        assert!(!FiniteGroup::quaternion().is_abelian());
        assert_eq!(FiniteGroup::quaternion().exponent(), 4);
        assert_eq!(FiniteGroup::dihedral(4, "D4").generators().len(), 2);
        for g in &groups {
            assert_eq!(g.generated(&g.generators()).len(), g.order());
        }
    }
}
