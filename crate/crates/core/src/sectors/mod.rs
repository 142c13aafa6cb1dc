//! Localization at fixed points: the local system a transgressed gerbe induces
//! on the inertia groupoid, its axioms, twisted sectors, discrete torsion and
//! `H²(G, ℂ×)`.

pub mod schur;
pub mod torsion;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

pub use schur::{h2_finite_group, h2_finite_group_capped, schur_oracle, SchurData, DEFAULT_GROUP_CAP};
pub use torsion::{torsion_gerbe, TorsionCocycle};

use crate::deligne::GerbeData;
use crate::form::PForm;
use crate::group::FiniteGroup;
use crate::groupoid::inertia::inertia;
use crate::groupoid::{ActionGroupoid, FixedSet, Groupoid, GroupoidError, InertiaGroupoid, NerveKey, Space};
use crate::loopspace::{build_loop_arrow, constant_loop, LoopError};
use crate::report::{Check, Report, Worst};
use crate::scalar::Scalar;
use crate::transgression::{f_eval, TransgressedBundle, TransgressionError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SectorError {
    #[error("group of order {order} exceeds the cap {cap}")]
    GroupTooLarge { order: usize, cap: usize },
    #[error("bar-complex boundary of {rows}x{cols} is too large for the dense Smith form")]
    MatrixTooLarge { rows: usize, cols: usize },
    #[error("not a cocycle: delta eps({a}, {b}, {c}) != 1")]
    NotCocycle { a: String, b: String, c: String },
    #[error("cocycle table must be {expected}x{expected}")]
    BadTable { expected: usize },
    #[error("cocycle and groupoid use different groups")]
    GroupMismatch,
    #[error("class coordinates {coords:?} do not match invariant factors {factors:?}")]
    BadClass { coords: Vec<u64>, factors: Vec<u64> },
    #[error(transparent)]
    Groupoid(#[from] GroupoidError),
    #[error(transparent)]
    Loop(#[from] LoopError),
    #[error(transparent)]
    Transgression(#[from] TransgressionError),
}

/// Tolerance for the non-exact axioms.
pub const LOCAL_TOL: f64 = 1e-8;

/// `f` on the arrows of `∧G` together with the data needed to evaluate it
/// away from the representative points.
#[derive(Clone, Debug, PartialEq)]
pub struct LocalSystem {
    pub base: ActionGroupoid,
    pub inertia: InertiaGroupoid,
    data: GerbeData,
    /// Multiplied onto `f`; all ones unless perturbed.
    adjust: Vec<Scalar>,
    /// `f` per inertia arrow at the representative point of its source.
    pub values: Vec<Scalar>,
}

/// `f(v, α) = h(v, α) / h(α, α⁻¹vα)`; `ω` is `A_g` on `M^g`.
pub fn restrict_to_inertia(x: &ActionGroupoid, b: &TransgressedBundle) -> Result<LocalSystem, SectorError> {
    let mut ls = LocalSystem {
        base: x.clone(),
        inertia: inertia(x)?,
        data: b.data.clone(),
        adjust: Vec::new(),
        values: Vec::new(),
    };
    ls.adjust = vec![Scalar::one(); ls.inertia.arrows.len()];
    ls.refresh();
    Ok(ls)
}

impl LocalSystem {
    fn refresh(&mut self) {
        self.values = (0..self.inertia.arrows.len())
            .map(|i| {
                let o = &self.inertia.objects[self.inertia.arrows[i].source];
                let p = self.inertia.object_point(o);
                self.f_at(i, &p)
            })
            .collect();
    }

    pub fn group(&self) -> &FiniteGroup {
        self.base.group()
    }

    /// Base component of an inertia object.
    pub fn base_comp(&self, object: usize) -> usize {
        match self.base.space() {
            Space::Points(_) => self.inertia.objects[object].part,
            Space::Torus(_) => 0,
        }
    }

    /// `x·α` in the base.
    pub fn act(&self, alpha: usize, x: &[f64]) -> Vec<f64> {
        match self.base.space() {
            Space::Points(_) => Vec::new(),
            Space::Torus(_) => self.base.map(alpha).apply(x).iter().map(|v| v.rem_euclid(1.0)).collect(),
        }
    }

    /// `f` on arrow `i` at a point `x` of its source component.
    pub fn f_at(&self, i: usize, x: &[f64]) -> Scalar {
        let a = &self.inertia.arrows[i];
        let g = self.inertia.objects[a.source].g;
        let comp = self.base_comp(a.source);
        let c = self.group().conj(g, a.alpha);
        let num = self.data.h.eval(&NerveKey::new(comp, vec![g, a.alpha]), x);
        let den = self.data.h.eval(&NerveKey::new(comp, vec![a.alpha, c]), x);
        num.div(den).mul(self.adjust[i])
    }

    /// `ω` on an inertia object: `A_g` at the base component.
    pub fn omega(&self, object: usize) -> PForm {
        let g = self.inertia.objects[object].g;
        self.data.a.get(&NerveKey::new(self.base_comp(object), vec![g]))
    }

    /// Multiply `f` on one arrow by `factor`.
    pub fn perturb(&mut self, arrow: usize, factor: Scalar) {
        self.adjust[arrow] = self.adjust[arrow].mul(factor);
        self.refresh();
    }

    pub fn describe_arrow(&self, i: usize) -> String {
        let a = &self.inertia.arrows[i];
        let o = &self.inertia.objects[a.source];
        let g = self.group();
        let place = match self.base.space() {
            Space::Points(_) => self.base.point_label(o.part),
            Space::Torus(_) => format!("component {}", o.part),
        };
        format!("(v = {} at {}, alpha = {})", g.name(o.g), place, g.name(a.alpha))
    }

    /// Arrow of `∧G` with given source and α.
    fn arrow_index(&self, source: usize, alpha: usize) -> usize {
        self.inertia
            .arrows
            .iter()
            .position(|a| a.source == source && a.alpha == alpha)
            .expect("inertia arrows exist for every group element")
    }

    /// Points at which the axioms are tested for a source object: the
    /// representative point and, on positive-dimensional components, samples.
    fn test_points(&self, object: usize, samples: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<f64>> {
        let o = &self.inertia.objects[object];
        let mut pts = vec![self.inertia.object_point(o)];
        if let FixedSet::Torus { components, .. } = &self.inertia.fixed_sets[o.g] {
            let c = &components[o.part];
            if !c.is_point() {
                pts.extend((0..samples).map(|_| c.sample(rng)));
            }
        }
        pts
    }
}

/// Options for [`check_inner_local_system`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LocalOptions {
    pub tol: f64,
    /// Extra sample points on positive-dimensional fixed components.
    pub samples: usize,
    pub seed: u64,
}

impl Default for LocalOptions {
    fn default() -> Self {
        LocalOptions {
            tol: LOCAL_TOL,
            samples: 4,
            seed: 0,
        }
    }
}

pub const CHECK_UNITS: &str = "local system: trivial on units";
pub const CHECK_INVERSION: &str = "local system: f(i(v,a)) = f(v,a)^-1";
pub const CHECK_MORPHISM: &str = "local system: morphism";
pub const CHECK_FLATNESS: &str = "local system: flat";

/// Units, inversion, morphism property and flatness of a local system.
pub fn check_inner_local_system(ls: &LocalSystem, opts: &LocalOptions) -> Report {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let g = ls.group();
    let n = ls.inertia.objects.len();
    let pts: Vec<Vec<Vec<f64>>> = (0..n).map(|o| ls.test_points(o, opts.samples, &mut rng)).collect();
    let mut units = Worst::new();
    let mut inversion = Worst::new();
    let mut morphism = Worst::new();
    for (i, a) in ls.inertia.arrows.iter().enumerate() {
        let v = &ls.inertia.objects[a.source];
        for (pi, x) in pts[a.source].iter().enumerate() {
            let f = if pi == 0 { ls.values[i] } else { ls.f_at(i, x) };
            if v.g == g.id() {
                units.record(f.distance_to_one(), f.is_exact(), || ls.describe_arrow(i));
            }
            let y = ls.act(a.alpha, x);
            let inv = ls.arrow_index(a.target, g.inv(a.alpha));
            let fi = ls.f_at(inv, &y);
            let r = f.mul(fi);
            inversion.record(r.distance_to_one(), r.is_exact(), || ls.describe_arrow(i));
            for beta in g.elements() {
                let second = ls.arrow_index(a.target, beta);
                let whole = ls.arrow_index(a.source, g.mul(a.alpha, beta));
                let lhs = ls.f_at(whole, x);
                let rhs = f.mul(ls.f_at(second, &y));
                morphism.record(lhs.ratio_residual(&rhs), lhs.is_exact() && rhs.is_exact(), || {
                    format!("{} then beta = {}", ls.describe_arrow(i), g.name(beta))
                });
            }
        }
    }
    let mut report = Report::new();
    report.push(units.into_check(CHECK_UNITS, opts.tol));
    report.push(inversion.into_check(CHECK_INVERSION, opts.tol));
    report.push(morphism.into_check(CHECK_MORPHISM, opts.tol));
    report.push(flatness(ls, &pts, opts.tol));
    report
}

/// `dω = 0` and `g*B − B = 0` on tangent pairs of each fixed component.
fn flatness(ls: &LocalSystem, pts: &[Vec<Vec<f64>>], tol: f64) -> Check {
    let Space::Torus(_) = ls.base.space() else {
        return Check::new(CHECK_FLATNESS, 0.0, tol, true, 0, None);
    };
    let bform = ls.data.b.get(&NerveKey::object(0));
    let mut worst = Worst::new();
    for (oi, o) in ls.inertia.objects.iter().enumerate() {
        let FixedSet::Torus { components, .. } = &ls.inertia.fixed_sets[o.g] else { continue };
        let basis: Vec<Vec<f64>> = components[o.part]
            .basis
            .iter()
            .map(|b| b.iter().map(|&v| v as f64).collect())
            .collect();
        if basis.len() < 2 {
            continue;
        }
        let domega = ls.omega(oi).exterior_d();
        let twist = bform
            .pullback(ls.base.map(o.g))
            .and_then(|p| p.sub(&bform))
            .expect("forms share a dimension");
        for x in &pts[oi] {
            for i in 0..basis.len() {
                for j in i + 1..basis.len() {
                    let vs = [basis[i].clone(), basis[j].clone()];
                    for w in [&domega, &twist] {
                        let r = w.eval(x, &vs).map(|z| z.norm()).unwrap_or(f64::INFINITY);
                        worst.record(r, false, || format!("object {} at {:?}", oi, x));
                    }
                }
            }
        }
    }
    if worst.samples == 0 {
        return Check::new(CHECK_FLATNESS, 0.0, tol, true, 0, None);
    }
    worst.into_check(CHECK_FLATNESS, tol)
}

/// `|f(v, α) / F(constant loop arrow) − 1|` over every arrow of `∧G`.
pub fn constant_loop_agreement(ls: &LocalSystem, b: &TransgressedBundle, tol: f64) -> Result<Check, SectorError> {
    let x = Groupoid::Action(ls.base.clone());
    let mut worst = Worst::new();
    for (i, a) in ls.inertia.arrows.iter().enumerate() {
        let o = &ls.inertia.objects[a.source];
        let p = ls.inertia.object_point(o);
        let lp = constant_loop(&x, ls.base_comp(a.source), &p, o.g)?;
        let arrow = build_loop_arrow(&x, &lp, vec![a.alpha])?;
        let f = f_eval(&b.data, &arrow, b.quad)?;
        worst.record(f.ratio_residual(&ls.values[i]), f.is_exact() && ls.values[i].is_exact(), || {
            ls.describe_arrow(i)
        });
    }
    Ok(worst.into_check("local system: agrees with F on constant loops", tol))
}

/// `f` on one arrow of a sector: `component --alpha--> target`.
#[derive(Clone, Debug, PartialEq)]
pub struct SectorEntry {
    pub component: usize,
    pub alpha: usize,
    pub target: usize,
    pub value: Scalar,
}

/// Twisted sector `[M^g / C(g)]` of one conjugacy class.
#[derive(Clone, Debug, PartialEq)]
pub struct Sector {
    pub representative: usize,
    pub class: Vec<usize>,
    pub centralizer: Vec<usize>,
    pub fixed_set: FixedSet,
    /// Equivariant line-bundle data, present when a local system was given.
    pub table: Vec<SectorEntry>,
}

/// One sector per conjugacy class, with the local-system values on it.
pub fn sector_decomposition(x: &ActionGroupoid, ls: Option<&LocalSystem>) -> Result<Vec<Sector>, SectorError> {
    let ig = match ls {
        Some(l) => l.inertia.clone(),
        None => inertia(x)?,
    };
    let g = x.group();
    let mut sectors = Vec::new();
    for class in g.conjugacy_data() {
        let rep = class.representative;
        let mut table = Vec::new();
        if let Some(l) = ls {
            for (i, a) in ig.arrows.iter().enumerate() {
                let o = &ig.objects[a.source];
                if o.g == rep && class.centralizer.contains(&a.alpha) {
                    table.push(SectorEntry {
                        component: o.part,
                        alpha: a.alpha,
                        target: ig.objects[a.target].part,
                        value: l.values[i],
                    });
                }
            }
        }
        sectors.push(Sector {
            representative: rep,
            class: class.elements,
            centralizer: class.centralizer,
            fixed_set: ig.fixed_sets[rep].clone(),
            table,
        });
    }
    Ok(sectors)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::deligne::{Cell, CochainFunction};
    use crate::form::parse_expr;
    use crate::loopspace::Quadrature;
    use crate::transgression::tau2_build;
    use num_rational::Rational64;

    fn klein() -> (ActionGroupoid, TorsionCocycle) {
        let g = FiniteGroup::parse("Z/2xZ/2").unwrap();
        let data = h2_finite_group(&g).unwrap();
        (ActionGroupoid::trivial_on_points(g, 1), data.representatives[0].clone())
    }

    fn system(x: &ActionGroupoid, gerbe: &GerbeData) -> (LocalSystem, TransgressedBundle) {
        let b = tau2_build(gerbe, Quadrature::default());
        (restrict_to_inertia(x, &b).unwrap(), b)
    }

    #[test]
    fn torsion_system_is_inner() {
        let (x, eps) = klein();
        let gerbe = torsion_gerbe(&eps, &Groupoid::Action(x.clone())).unwrap();
        let (ls, b) = system(&x, &gerbe);
        assert_eq!(ls.inertia.arrows.len(), 16);
        let r = check_inner_local_system(&ls, &LocalOptions::default());
        assert!(r.pass(), "{}", r);
        assert!(r.checks.iter().all(|c| c.exact));
        let agree = constant_loop_agreement(&ls, &b, 1e-12).unwrap();
        assert!(agree.pass && agree.exact);
        let g = x.group();
        let (v, alpha) = (g.element_by_name("(1,0)").unwrap(), g.element_by_name("(0,1)").unwrap());
        let i = ls
            .inertia
            .arrows
            .iter()
            .position(|a| ls.inertia.objects[a.source].g == v && a.alpha == alpha)
            .unwrap();
        assert_eq!(ls.values[i], Scalar::phase(Rational64::new(1, 2)));
    }

    #[test]
    fn perturbed_value_breaks_inversion() {
        let (x, eps) = klein();
        let gerbe = torsion_gerbe(&eps, &Groupoid::Action(x.clone())).unwrap();
        let (mut ls, _) = system(&x, &gerbe);
        let g = x.group();
        let v = g.element_by_name("(1,1)").unwrap();
        let i = ls
            .inertia
            .arrows
            .iter()
            .position(|a| ls.inertia.objects[a.source].g == v && a.alpha == v)
            .unwrap();
        ls.perturb(i, Scalar::root(1, 3));
        let r = check_inner_local_system(&ls, &LocalOptions::default());
        let inv = r.get(CHECK_INVERSION).unwrap();
        assert!(!inv.pass);
        assert!(inv.witness.as_deref().unwrap().contains("(1,1)"));
    }

    #[test]
    fn trivial_gerbe_gives_trivial_system() {
        let x = ActionGroupoid::reflection_torus(2);
        let gx = Groupoid::Action(x.clone());
        let (ls, _) = system(&x, &GerbeData::trivial(&gx));
        assert!(ls.values.iter().all(|v| *v == Scalar::one()));
        assert!((0..ls.inertia.objects.len()).all(|o| ls.omega(o).is_zero()));
        assert!(check_inner_local_system(&ls, &LocalOptions::default()).pass());
    }

    #[test]
    fn smooth_gerbe_on_reflection_torus() {
        // the total coboundary of any 1-cochain is a gerbe cocycle
        let x = ActionGroupoid::reflection_torus(2);
        let gx = Groupoid::Action(x.clone());
        let f = CochainFunction::one(1).with(
            NerveKey::new(0, vec![1]),
            Cell::Expr(parse_expr("exp(2*pi*i*(0.3*sin(2*pi*x1) + 0.1*cos(2*pi*x2)))").unwrap()),
        );
        let line = crate::deligne::LineData {
            h: f,
            a: crate::deligne::FormCochain::zero(0, 1, 2).with(
                NerveKey::object(0),
                PForm::from_terms(1, 2, [(vec![1], parse_expr("0.2*sin(2*pi*x1)").unwrap())]).unwrap(),
            ),
        };
        let gerbe = crate::deligne::total_coboundary_line(&gx, &line);
        let (ls, b) = system(&x, &gerbe);
        let r = check_inner_local_system(&ls, &LocalOptions::default());
        assert!(r.pass(), "{}", r);
        let agree = constant_loop_agreement(&ls, &b, 1e-10).unwrap();
        assert!(agree.pass, "{:?}", agree);
    }

    #[test]
    fn sectors_of_models() {
        let (x, _) = klein();
        let s = sector_decomposition(&x, None).unwrap();
        assert_eq!(s.len(), 4);
        assert!(s.iter().all(|sec| sec.centralizer.len() == 4));

        let t = ActionGroupoid::reflection_torus(2);
        let s = sector_decomposition(&t, None).unwrap();
        assert_eq!(s.len(), 2);
        assert_eq!(s[0].fixed_set.components()[0].basis.len(), 2);
        assert_eq!(s[1].fixed_set.len(), 4);
        assert_eq!(s[1].centralizer.len(), 2);

        let p = ActionGroupoid::trivial_on_points(FiniteGroup::trivial(), 1);
        assert_eq!(sector_decomposition(&p, None).unwrap().len(), 1);
    }

    #[test]
    fn sector_table_carries_torsion_phases() {
        let (x, eps) = klein();
        let gerbe = torsion_gerbe(&eps, &Groupoid::Action(x.clone())).unwrap();
        let (ls, _) = system(&x, &gerbe);
        let s = sector_decomposition(&x, Some(&ls)).unwrap();
        for sec in &s {
            assert_eq!(sec.table.len(), 4);
            for e in &sec.table {
                assert_eq!(e.value, eps.commutator_phase(sec.representative, e.alpha));
            }
        }
    }
}
