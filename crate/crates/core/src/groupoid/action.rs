//! Global quotients `[M/G]` with `M` a finite set or a flat torus.

use num_rational::Rational64;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::GroupoidError;
use crate::form::AffineMap;
use crate::group::FiniteGroup;

#[derive(Clone, Debug, PartialEq)]
pub enum Space {
    Points(Vec<String>),
    /// `ℝ^d / ℤ^d`
    Torus(usize),
}

/// Right action `x·g`; on tori `x·g = R_g x + t_g mod 1`.
#[derive(Clone, Debug, PartialEq)]
pub enum Action {
    /// `perms[g][p]` is the index of `p·g`.
    Permutations(Vec<Vec<usize>>),
    Affine(Vec<AffineMap>),
}

#[derive(Clone, Debug, PartialEq)]
pub struct ActionGroupoid {
    space: Space,
    group: FiniteGroup,
    perms: Vec<Vec<usize>>,
    maps: Vec<AffineMap>,
}

const COMPAT_SAMPLES: usize = 100;

fn translation_mod_one(a: &[Rational64], b: &[Rational64]) -> bool {
    a.iter().zip(b).all(|(x, y)| (x - y).is_integer())
}

impl ActionGroupoid {
    pub fn new(space: Space, group: FiniteGroup, action: Action) -> Result<ActionGroupoid, GroupoidError> {
        let n = group.order();
        let name = |g: usize| group.name(g).to_string();
        match (&space, action) {
            (Space::Points(points), Action::Permutations(perms)) => {
                if perms.len() != n {
                    return Err(GroupoidError::DimensionMismatch {
                        expected: n,
                        found: perms.len(),
                    });
                }
                for (g, p) in perms.iter().enumerate() {
                    let mut seen = vec![false; points.len()];
                    if p.len() != points.len() {
                        return Err(GroupoidError::BadPermutation { g: name(g) });
                    }
                    for &q in p {
                        if q >= points.len() || seen[q] {
                            return Err(GroupoidError::BadPermutation { g: name(g) });
                        }
                        seen[q] = true;
                    }
                }
                for g in 0..n {
                    for h in 0..n {
                        let gh = group.mul(g, h);
                        if let Some(x) = (0..points.len()).find(|&x| perms[h][perms[g][x]] != perms[gh][x]) {
                            return Err(GroupoidError::ActionNotCompatible {
                                g: name(g),
                                h: name(h),
                                point: vec![x as f64],
                            });
                        }
                    }
                }
                if (0..points.len()).any(|x| perms[group.id()][x] != x) {
                    return Err(GroupoidError::IdentityActsNontrivially);
                }
                group.validate()?;
                Ok(ActionGroupoid {
                    maps: vec![AffineMap::identity(0); n],
                    space,
                    group,
                    perms,
                })
            }
            (Space::Torus(d), Action::Affine(maps)) => {
                let d = *d;
                if maps.len() != n {
                    return Err(GroupoidError::DimensionMismatch {
                        expected: n,
                        found: maps.len(),
                    });
                }
                if let Some(m) = maps.iter().find(|m| m.dim() != d) {
                    return Err(GroupoidError::DimensionMismatch {
                        expected: d,
                        found: m.dim(),
                    });
                }
                if let Some(g) = maps.iter().position(|m| !m.is_unimodular()) {
                    return Err(GroupoidError::NonInvertibleLinearPart { g: name(g) });
                }
                let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
                let samples: Vec<Vec<f64>> = (0..COMPAT_SAMPLES)
                    .map(|_| (0..d).map(|_| rng.gen::<f64>()).collect())
                    .collect();
                let probe = super::Groupoid::Action(ActionGroupoid {
                    space: space.clone(),
                    group: group.clone(),
                    perms: vec![vec![0]; n],
                    maps: maps.clone(),
                });
                for g in 0..n {
                    for h in 0..n {
                        let gh = group.mul(g, h);
                        let lhs = maps[g].then(&maps[h]);
                        let exact = lhs.matrix() == maps[gh].matrix()
                            && translation_mod_one(lhs.offset(), maps[gh].offset());
                        let witness = samples.iter().find(|x| {
                            probe.point_distance(&lhs.apply(x), &maps[gh].apply(x)) > super::POINT_TOL
                        });
                        if !exact || witness.is_some() {
                            return Err(GroupoidError::ActionNotCompatible {
                                g: name(g),
                                h: name(h),
                                point: witness.cloned().unwrap_or_else(|| vec![0.0; d]),
                            });
                        }
                    }
                }
                let e = &maps[group.id()];
                if !e.is_identity_linear() || !e.offset().iter().all(|t| t.is_integer()) {
                    return Err(GroupoidError::IdentityActsNontrivially);
                }
                group.validate()?;
                Ok(ActionGroupoid {
                    space,
                    perms: vec![vec![0]; n],
                    group,
                    maps,
                })
            }
            (Space::Points(p), Action::Affine(_)) => Err(GroupoidError::DimensionMismatch {
                expected: p.len(),
                found: 0,
            }),
            (Space::Torus(d), Action::Permutations(_)) => Err(GroupoidError::DimensionMismatch {
                expected: *d,
                found: 0,
            }),
        }
    }

    pub fn on_points(group: FiniteGroup, points: Vec<String>, perms: Vec<Vec<usize>>) -> Result<Self, GroupoidError> {
        ActionGroupoid::new(Space::Points(points), group, Action::Permutations(perms))
    }

    /// `G` acting trivially on `n` points.
    pub fn trivial_on_points(group: FiniteGroup, n: usize) -> ActionGroupoid {
        let perms = vec![(0..n).collect(); group.order()];
        let points = if n == 1 {
            vec!["*".to_string()]
        } else {
            (0..n).map(|i| format!("p{}", i)).collect()
        };
        ActionGroupoid::on_points(group, points, perms).expect("trivial action is compatible")
    }

    pub fn on_torus(group: FiniteGroup, dim: usize, maps: Vec<AffineMap>) -> Result<Self, GroupoidError> {
        ActionGroupoid::new(Space::Torus(dim), group, Action::Affine(maps))
    }

    /// `G` acting trivially on the `d`-torus.
    pub fn trivial_on_torus(group: FiniteGroup, dim: usize) -> ActionGroupoid {
        let maps = vec![AffineMap::identity(dim); group.order()];
        ActionGroupoid::on_torus(group, dim, maps).expect("trivial action is compatible")
    }

    /// Cyclic `Z/n` acting on the first coordinate by `x₁ ↦ x₁ + g/n`.
    pub fn translation_torus(group: FiniteGroup, dim: usize) -> ActionGroupoid {
        let n = group.order() as i64;
        let maps = (0..n)
            .map(|g| {
                let mut t = vec![Rational64::zero(); dim];
                t[0] = Rational64::new(g, n);
                AffineMap::translation(t)
            })
            .collect();
        ActionGroupoid::on_torus(group, dim, maps).expect("translation action of a cyclic group")
    }

    /// `Z/2` acting on the `d`-torus by `x ↦ -x`.
    pub fn reflection_torus(dim: usize) -> ActionGroupoid {
        let neg: Vec<Vec<i64>> = (0..dim)
            .map(|i| (0..dim).map(|j| if i == j { -1 } else { 0 }).collect())
            .collect();
        let maps = vec![AffineMap::identity(dim), AffineMap::linear(neg).expect("square")];
        ActionGroupoid::on_torus(FiniteGroup::cyclic(2), dim, maps).expect("reflection is an action")
    }

    pub fn space(&self) -> &Space {
        &self.space
    }

    pub fn group(&self) -> &FiniteGroup {
        &self.group
    }

    pub fn dim(&self) -> usize {
        match self.space {
            Space::Points(_) => 0,
            Space::Torus(d) => d,
        }
    }

    pub fn components(&self) -> usize {
        match &self.space {
            Space::Points(p) => p.len(),
            Space::Torus(_) => 1,
        }
    }

    pub fn point_label(&self, comp: usize) -> String {
        match &self.space {
            Space::Points(p) => p[comp].clone(),
            Space::Torus(_) => "T".to_string(),
        }
    }

    pub fn target_comp(&self, comp: usize, g: usize) -> usize {
        match self.space {
            Space::Points(_) => self.perms[g][comp],
            Space::Torus(_) => 0,
        }
    }

    pub fn map(&self, g: usize) -> &AffineMap {
        &self.maps[g]
    }

    pub fn maps(&self) -> &[AffineMap] {
        &self.maps
    }

    pub fn perms(&self) -> &[Vec<usize>] {
        &self.perms
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn half_shift_squares_to_identity() {
        let a = ActionGroupoid::translation_torus(FiniteGroup::cyclic(2), 1);
        for &x in &[0.0, 0.13, 0.5, 0.87] {
            let y = a.map(1).apply(&a.map(1).apply(&[x]));
            assert!(super::super::circle_distance(y[0], x) < 1e-15);
        }
    }

    #[test]
    fn bad_table_is_incompatible() {
        let bad = FiniteGroup::from_table_unchecked("bad", vec![vec![0, 1], vec![1, 1]]).unwrap();
        let neg = AffineMap::linear(vec![vec![-1, 0], vec![0, -1]]).unwrap();
        let err = ActionGroupoid::on_torus(bad, 2, vec![AffineMap::identity(2), neg]).unwrap_err();
        assert!(matches!(err, GroupoidError::ActionNotCompatible { .. }), "{:?}", err);
    }

    #[test]
    fn non_invertible_linear_part() {
        let two = AffineMap::linear(vec![vec![2]]).unwrap();
        let err = ActionGroupoid::on_torus(FiniteGroup::cyclic(2), 1, vec![AffineMap::identity(1), two]).unwrap_err();
        assert!(matches!(err, GroupoidError::NonInvertibleLinearPart { .. }));
    }

    #[test]
    fn incompatible_translation() {
        let third = AffineMap::translation(vec![Rational64::new(1, 3)]);
        let err = ActionGroupoid::on_torus(FiniteGroup::cyclic(2), 1, vec![AffineMap::identity(1), third]).unwrap_err();
        assert!(matches!(err, GroupoidError::ActionNotCompatible { .. }));
    }
}
