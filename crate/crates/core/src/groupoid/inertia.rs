//! Fixed sets of affine torus actions and the inertia groupoid of a global quotient.

use num_bigint::BigInt;
use num_rational::Rational64;
use num_traits::{ToPrimitive, Zero};
use rand::Rng;

use super::action::{ActionGroupoid, Space};
use super::{circle_distance, rational_to_f64, GroupoidError, POINT_TOL};
use crate::snf::smith_with_u;

/// Affine subtorus `offset + span(basis)` mod ℤ^d.
#[derive(Clone, Debug, PartialEq)]
pub struct FixedComponent {
    pub offset: Vec<Rational64>,
    pub basis: Vec<Vec<i64>>,
}

impl FixedComponent {
    pub fn offset_f64(&self) -> Vec<f64> {
        self.offset.iter().map(|&r| rational_to_f64(r)).collect()
    }

    pub fn is_point(&self) -> bool {
        self.basis.is_empty()
    }

    /// A point of the component: the offset moved by `coeffs` along the basis.
    pub fn point(&self, coeffs: &[f64]) -> Vec<f64> {
        let mut x = self.offset_f64();
        for (b, &c) in self.basis.iter().zip(coeffs) {
            for (xi, &bi) in x.iter_mut().zip(b) {
                *xi += c * bi as f64;
            }
        }
        x.iter().map(|v| v.rem_euclid(1.0)).collect()
    }

    pub fn sample<R: Rng>(&self, rng: &mut R) -> Vec<f64> {
        let coeffs: Vec<f64> = self.basis.iter().map(|_| rng.gen::<f64>()).collect();
        self.point(&coeffs)
    }
}

/// Fixed set `M^g`.
#[derive(Clone, Debug, PartialEq)]
pub enum FixedSet {
    Points(Vec<usize>),
    Torus {
        components: Vec<FixedComponent>,
        /// First `rank` rows of `V⁻¹` from the solver; components are the
        /// level sets of these coordinates mod 1.
        v_inv: Vec<Vec<i64>>,
        keys: Vec<Vec<f64>>,
    },
}

impl FixedSet {
    pub fn len(&self) -> usize {
        match self {
            FixedSet::Points(p) => p.len(),
            FixedSet::Torus { components, .. } => components.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn components(&self) -> &[FixedComponent] {
        match self {
            FixedSet::Points(_) => &[],
            FixedSet::Torus { components, .. } => components,
        }
    }

    /// Index of the component containing `x`, for torus fixed sets.
    pub fn component_of(&self, x: &[f64]) -> Option<usize> {
        match self {
            FixedSet::Points(_) => None,
            FixedSet::Torus { v_inv, keys, .. } => {
                let key: Vec<f64> = v_inv
                    .iter()
                    .map(|row| row.iter().zip(x).map(|(&a, &b)| a as f64 * b).sum::<f64>())
                    .collect();
                keys.iter().position(|k| {
                    k.iter().zip(&key).all(|(&a, &b)| circle_distance(a, b) < 1e-9)
                })
            }
        }
    }
}

fn big_to_i64(b: &BigInt) -> i64 {
    b.to_i64().expect("transform entries fit in i64")
}

/// Solutions of `(R - I) x ≡ -t (mod ℤ^d)`.
pub fn torus_fixed_set(r: &[Vec<i64>], t: &[Rational64]) -> FixedSet {
    let d = t.len();
    let a: Vec<Vec<i64>> = (0..d)
        .map(|i| (0..d).map(|j| r[i][j] - (i == j) as i64).collect())
        .collect();
    let s = smith_with_u(&a, d);
    let u = s.u.as_ref().expect("row transform requested");
    let rank = s.rank();
    let c: Vec<Rational64> = (0..d)
        .map(|i| {
            (0..d).fold(Rational64::zero(), |acc, k| acc - Rational64::from_integer(big_to_i64(&u[i][k])) * t[k])
        })
        .collect();
    let v: Vec<Vec<i64>> = s.v.iter().map(|row| row.iter().map(big_to_i64).collect()).collect();
    let v_inv: Vec<Vec<i64>> = s.v_inv[..rank]
        .iter()
        .map(|row| row.iter().map(big_to_i64).collect())
        .collect();
    if c[rank..].iter().any(|ci| !ci.is_integer()) {
        return FixedSet::Torus {
            components: Vec::new(),
            v_inv,
            keys: Vec::new(),
        };
    }
    let diag: Vec<i64> = s.diagonal.iter().map(big_to_i64).collect();
    let basis: Vec<Vec<i64>> = (rank..d).map(|j| (0..d).map(|i| v[i][j]).collect()).collect();
    let mut components = Vec::new();
    let mut keys = Vec::new();
    let total: i64 = diag.iter().product();
    for mut idx in 0..total {
        let mut y = vec![Rational64::zero(); d];
        for i in 0..rank {
            let m = idx % diag[i];
            idx /= diag[i];
            y[i] = crate::scalar::frac((c[i] + Rational64::from_integer(m)) / Rational64::from_integer(diag[i]));
        }
        let offset: Vec<Rational64> = (0..d)
            .map(|i| {
                crate::scalar::frac(
                    (0..d).fold(Rational64::zero(), |acc, j| acc + Rational64::from_integer(v[i][j]) * y[j]),
                )
            })
            .collect();
        keys.push(y[..rank].iter().map(|&r| rational_to_f64(r)).collect());
        components.push(FixedComponent {
            offset,
            basis: basis.clone(),
        });
    }
    FixedSet::Torus {
        components,
        v_inv,
        keys,
    }
}

pub fn fixed_set(x: &ActionGroupoid, g: usize) -> FixedSet {
    match x.space() {
        Space::Points(p) => FixedSet::Points((0..p.len()).filter(|&i| x.target_comp(i, g) == i).collect()),
        Space::Torus(_) => {
            let m = x.map(g);
            torus_fixed_set(m.matrix(), m.offset())
        }
    }
}

/// Object `v` of the inertia groupoid: a loop arrow `g` at a point of the
/// given fixed-set component (or base point, on finite spaces).
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct InertiaObject {
    pub g: usize,
    /// Base point index (finite spaces) or component index of `M^g` (tori).
    pub part: usize,
}

/// Arrow `(v, α)` with target `α⁻¹ v α`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InertiaArrow {
    pub source: usize,
    pub alpha: usize,
    pub target: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct InertiaGroupoid {
    pub objects: Vec<InertiaObject>,
    pub arrows: Vec<InertiaArrow>,
    pub fixed_sets: Vec<FixedSet>,
}

impl InertiaGroupoid {
    pub fn object_index(&self, o: &InertiaObject) -> Option<usize> {
        self.objects.iter().position(|p| p == o)
    }

    /// Representative coordinates of an object (empty on finite spaces).
    pub fn object_point(&self, o: &InertiaObject) -> Vec<f64> {
        match &self.fixed_sets[o.g] {
            FixedSet::Points(_) => Vec::new(),
            FixedSet::Torus { components, .. } => components[o.part].offset_f64(),
        }
    }

    pub fn arrows_from(&self, source: usize) -> impl Iterator<Item = &InertiaArrow> {
        self.arrows.iter().filter(move |a| a.source == source)
    }

    /// Arrow with given source and α.
    pub fn arrow(&self, source: usize, alpha: usize) -> Option<&InertiaArrow> {
        self.arrows.iter().find(|a| a.source == source && a.alpha == alpha)
    }
}

pub fn inertia(x: &ActionGroupoid) -> Result<InertiaGroupoid, GroupoidError> {
    let group = x.group();
    let fixed_sets: Vec<FixedSet> = group.elements().map(|g| fixed_set(x, g)).collect();
    let mut objects = Vec::new();
    for g in group.elements() {
        match &fixed_sets[g] {
            FixedSet::Points(p) => objects.extend(p.iter().map(|&part| InertiaObject { g, part })),
            FixedSet::Torus { components, .. } => {
                objects.extend((0..components.len()).map(|part| InertiaObject { g, part }))
            }
        }
    }
    let mut arrows = Vec::new();
    for (si, o) in objects.iter().enumerate() {
        for alpha in group.elements() {
            let h = group.conj(o.g, alpha);
            let part = match &fixed_sets[o.g] {
                FixedSet::Points(_) => x.target_comp(o.part, alpha),
                FixedSet::Torus { components, .. } => {
                    let y = x.map(alpha).apply(&components[o.part].offset_f64());
                    let y: Vec<f64> = y.iter().map(|v| v.rem_euclid(1.0)).collect();
                    match fixed_sets[h].component_of(&y) {
                        Some(p) => p,
                        None => {
                            return Err(GroupoidError::OutsideDomain { comp: h, point: y });
                        }
                    }
                }
            };
            let target = objects
                .iter()
                .position(|t| *t == InertiaObject { g: h, part })
                .ok_or(GroupoidError::OutsideDomain {
                    comp: h,
                    point: vec![part as f64],
                })?;
            arrows.push(InertiaArrow {
                source: si,
                alpha,
                target,
            });
        }
    }
    Ok(InertiaGroupoid {
        objects,
        arrows,
        fixed_sets,
    })
}

/// Whether `x·g = x` on the torus, within the point tolerance.
pub fn is_fixed(x: &ActionGroupoid, g: usize, p: &[f64]) -> bool {
    let y = x.map(g).apply(p);
    y.iter().zip(p).all(|(&a, &b)| circle_distance(a, b) <= POINT_TOL)
}
