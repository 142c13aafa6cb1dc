//! Scenario files: JSON input describing a groupoid, cochain data and loops.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use gerbe_core::deligne::{
    total_coboundary_line, validate_forms, validate_function, Cell, CochainFunction, FlatNData, FormCochain, GerbeData,
    LineData, VerifyOptions,
};
use gerbe_core::form::{parse_expr, AffineMap, Expr, PForm};
use gerbe_core::group::FiniteGroup;
use gerbe_core::groupoid::action::Action;
use gerbe_core::groupoid::{ActionGroupoid, Chart, CoverGroupoid, Groupoid, NerveKey, Space};
use gerbe_core::loopspace::{
    build_loop, build_loop_arrow, compose_loop_arrows, inverse_loop_arrow, validate_tangent, Carrier, LoopArrow,
    LoopFamily, LoopTangent, Partition, PathSegment, Quadrature, SegmentedLoop,
};
use gerbe_core::sectors::{h2_finite_group, torsion_gerbe, TorsionCocycle};
use gerbe_core::transgression::SquareOptions;
use gerbe_core::Scalar;
use num_rational::Rational64;
use serde::Deserialize;
use sha2::{Digest, Sha256};
use thiserror::Error;

pub const SCENARIO_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("cannot read {path}: {message}")]
    Io { path: String, message: String },
    #[error("{path}: {message}")]
    Invalid { path: String, message: String },
}

fn invalid(path: impl Into<String>, message: impl ToString) -> ScenarioError {
    ScenarioError::Invalid {
        path: path.into(),
        message: message.to_string(),
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    #[serde(default = "default_version")]
    pub version: u32,
    #[serde(default)]
    pub seed: u64,
    pub groupoid: GroupoidSpec,
    #[serde(default)]
    pub line: Option<LineSpec>,
    #[serde(default)]
    pub gerbe: Option<GerbeSpec>,
    #[serde(default)]
    pub flat: Option<FlatSpec>,
    #[serde(default)]
    pub loops: BTreeMap<String, LoopSpec>,
    #[serde(default)]
    pub loop_arrows: BTreeMap<String, ArrowSpec>,
    #[serde(default)]
    pub tangents: BTreeMap<String, TangentSpec>,
    #[serde(default)]
    pub families: BTreeMap<String, FamilySpec>,
    #[serde(default)]
    pub settings: Settings,
}

fn default_version() -> u32 {
    SCENARIO_VERSION
}

#[derive(Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GroupoidSpec {
    Action {
        group: GroupSpec,
        space: SpaceSpec,
        #[serde(default)]
        action: ActionSpec,
    },
    Cover {
        dim: usize,
        #[serde(default)]
        periodic: bool,
        charts: Vec<ChartSpec>,
    },
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
pub enum GroupSpec {
    Name(String),
    Table { label: String, table: Vec<Vec<usize>> },
}

#[derive(Debug, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpaceSpec {
    Points(Vec<String>),
    Torus(usize),
}

#[derive(Debug, Default, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ActionSpec {
    #[default]
    Trivial,
    /// Element name to the image index of each point; missing elements act trivially.
    Permutations(BTreeMap<String, Vec<usize>>),
    /// Element name to `x ↦ Rx + t`; missing elements act trivially.
    Affine(BTreeMap<String, AffineSpec>),
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AffineSpec {
    pub matrix: Vec<Vec<i64>>,
    #[serde(default)]
    pub translation: Vec<String>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChartSpec {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

/// A point index or point label.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum CompSpec {
    Index(usize),
    Name(String),
}

impl Default for CompSpec {
    fn default() -> Self {
        CompSpec::Index(0)
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CellSpec {
    #[serde(default)]
    pub comp: CompSpec,
    #[serde(default)]
    pub labels: Vec<String>,
    /// Exact value `exp(2πi·p/q)`, written `"p/q"`.
    #[serde(default)]
    pub phase: Option<String>,
    /// Expression in the base coordinates.
    #[serde(default)]
    pub expr: Option<String>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FormSpec {
    #[serde(default)]
    pub comp: CompSpec,
    #[serde(default)]
    pub labels: Vec<String>,
    /// Multi-index (`"1"`, `"1,2"` or `"dx1^dx2"`) to coefficient expression.
    pub terms: BTreeMap<String, String>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LineSpec {
    #[serde(default)]
    pub h: Vec<CellSpec>,
    #[serde(default)]
    pub a: Vec<FormSpec>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GerbeSpec {
    #[serde(default)]
    pub h: Vec<CellSpec>,
    #[serde(default)]
    pub a: Vec<FormSpec>,
    #[serde(default)]
    pub b: Vec<FormSpec>,
    /// Multiply in a discrete-torsion gerbe.
    #[serde(default)]
    pub torsion: Option<TorsionSpec>,
    /// Multiply in the total coboundary of the `line` section.
    #[serde(default)]
    pub coboundary_of_line: bool,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TorsionSpec {
    /// Full table of angles `"p/q"`, rows and columns in element order.
    #[serde(default)]
    pub angles: Option<Vec<Vec<String>>>,
    /// Coordinates of a class in the Smith basis of `H²(G; ℂ×)`.
    #[serde(default)]
    pub class: Option<Vec<u64>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FlatSpec {
    pub n: usize,
    #[serde(default)]
    pub omega: Vec<CellSpec>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SegmentSpec {
    #[serde(default)]
    pub comp: CompSpec,
    /// One expression in `t` (and `s1, s2, …` in families) per coordinate.
    #[serde(default)]
    pub path: Vec<String>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LoopSpec {
    /// Break points `0 < … < 1` as `"p/q"`, endpoints included; default `[0, 1]`.
    #[serde(default)]
    pub breaks: Option<Vec<String>>,
    pub segments: Vec<SegmentSpec>,
    pub arrows: Vec<String>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ArrowSpec {
    #[serde(default)]
    pub source: Option<String>,
    #[serde(default)]
    pub labels: Vec<String>,
    #[serde(default)]
    pub compose: Option<Vec<String>>,
    #[serde(default)]
    pub inverse: Option<String>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TangentSpec {
    #[serde(rename = "loop")]
    pub on: String,
    pub fields: Vec<Vec<String>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FamilySpec {
    #[serde(default)]
    pub breaks: Option<Vec<String>>,
    pub segments: Vec<SegmentSpec>,
    pub arrows: Vec<String>,
    pub labels: Vec<String>,
    #[serde(default = "one")]
    pub params: usize,
    #[serde(default = "default_radius")]
    pub radius: f64,
}

fn one() -> usize {
    1
}

fn default_radius() -> f64 {
    0.1
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Settings {
    pub tol: f64,
    pub tol_form: f64,
    /// Initial Simpson subintervals per segment.
    pub quadrature_n: usize,
    /// Richardson target; `0` means a fixed `quadrature_n`.
    pub quadrature_target: f64,
    pub fd_step: f64,
    pub samples: usize,
    pub paths: usize,
}

impl Default for Settings {
    fn default() -> Self {
        let v = VerifyOptions::default();
        let s = SquareOptions::default();
        Settings {
            tol: v.tol,
            tol_form: s.tol_form,
            quadrature_n: 256,
            quadrature_target: 1e-9,
            fd_step: s.step,
            samples: v.samples,
            paths: v.paths,
        }
    }
}

impl Settings {
    pub fn quadrature(&self) -> Quadrature {
        if self.quadrature_target > 0.0 {
            Quadrature::Adaptive {
                n0: self.quadrature_n,
                target: self.quadrature_target,
            }
        } else {
            Quadrature::Fixed(self.quadrature_n)
        }
    }

    pub fn verify_options(&self, seed: u64) -> VerifyOptions {
        VerifyOptions {
            tol: self.tol,
            samples: self.samples,
            paths: self.paths,
            seed,
            ..VerifyOptions::default()
        }
    }
}

/// A validated scenario.
#[derive(Debug)]
pub struct Scenario {
    pub digest: String,
    pub seed: u64,
    pub groupoid: Groupoid,
    pub line: Option<LineData>,
    pub gerbe: Option<GerbeData>,
    pub flat: Option<FlatNData>,
    pub loops: BTreeMap<String, SegmentedLoop>,
    pub arrows: BTreeMap<String, LoopArrow>,
    /// Tangent id to its loop id and field.
    pub tangents: BTreeMap<String, (String, LoopTangent)>,
    pub families: BTreeMap<String, LoopFamily>,
    pub settings: Settings,
}

pub fn digest(bytes: &[u8]) -> String {
    format!("sha256:{:x}", Sha256::digest(bytes))
}

pub fn load(path: &Path) -> Result<Scenario, ScenarioError> {
    let bytes = std::fs::read(path).map_err(|e| ScenarioError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    parse(&bytes)
}

pub fn parse(bytes: &[u8]) -> Result<Scenario, ScenarioError> {
    let de = &mut serde_json::Deserializer::from_slice(bytes);
    let file: ScenarioFile = serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        invalid(if path == "." { "scenario".to_string() } else { path }, e.into_inner())
    })?;
    build(file, digest(bytes))
}

pub fn parse_rational(path: &str, s: &str) -> Result<Rational64, ScenarioError> {
    let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    compact
        .parse::<Rational64>()
        .map_err(|_| invalid(path, format!("`{}` is not a rational p/q", s)))
}

pub fn parse_group(spec: &str) -> Result<FiniteGroup, ScenarioError> {
    FiniteGroup::parse(spec).map_err(|e| invalid("group", e))
}

struct Builder<'a> {
    g: &'a Groupoid,
}

impl Builder<'_> {
    fn comp(&self, path: &str, c: &CompSpec) -> Result<usize, ScenarioError> {
        let n = self.g.components();
        let idx = match c {
            CompSpec::Index(i) => Some(*i),
            CompSpec::Name(name) => match self.g {
                Groupoid::Action(a) => (0..n).find(|&i| matches!(a.space(), Space::Points(_)) && a.point_label(i) == *name),
                Groupoid::Cover(_) => name.strip_prefix('U').and_then(|k| k.parse().ok()),
            },
        };
        match idx {
            Some(i) if i < n => Ok(i),
            _ => Err(invalid(format!("{}.comp", path), format!("no component {:?}", c))),
        }
    }

    fn label(&self, path: &str, comp: usize, name: &str) -> Result<usize, ScenarioError> {
        let found = match self.g {
            Groupoid::Action(a) => a.group().element_by_name(name).or_else(|| name.parse().ok()),
            Groupoid::Cover(_) => name.strip_prefix('U').unwrap_or(name).parse().ok(),
        };
        match found {
            Some(l) if self.g.labels(comp).contains(&l) => Ok(l),
            _ => Err(invalid(path, format!("no arrow `{}` out of component {}", name, comp))),
        }
    }

    /// Labels of a nerve key, composable from `comp`.
    fn key(&self, path: &str, comp: &CompSpec, labels: &[String]) -> Result<NerveKey, ScenarioError> {
        let c = self.comp(path, comp)?;
        let mut at = c;
        let mut out = Vec::new();
        for (i, name) in labels.iter().enumerate() {
            let l = self.label(&format!("{}.labels[{}]", path, i), at, name)?;
            at = self.g.target_comp(at, l);
            out.push(l);
        }
        Ok(NerveKey::new(c, out))
    }

    fn expr(&self, path: &str, s: &str) -> Result<Expr, ScenarioError> {
        parse_expr(s).map_err(|e| invalid(path, e))
    }

    fn cell(&self, path: &str, c: &CellSpec) -> Result<Cell, ScenarioError> {
        match (&c.phase, &c.expr) {
            (Some(p), None) => Ok(Cell::Exact(Scalar::phase(parse_rational(&format!("{}.phase", path), p)?))),
            (None, Some(e)) => Ok(Cell::Expr(self.expr(&format!("{}.expr", path), e)?)),
            _ => Err(invalid(path, "exactly one of `phase` and `expr` is required")),
        }
    }

    fn function(&self, path: &str, level: usize, cells: &[CellSpec]) -> Result<CochainFunction, ScenarioError> {
        let mut f = CochainFunction::one(level);
        for (i, c) in cells.iter().enumerate() {
            let p = format!("{}[{}]", path, i);
            if c.labels.len() != level {
                return Err(invalid(&p, format!("expected {} labels, found {}", level, c.labels.len())));
            }
            let key = self.key(&p, &c.comp, &c.labels)?;
            let cell = self.cell(&p, c)?;
            if let Cell::Expr(e) = &cell {
                gerbe_core::deligne::validate_expr(self.g, &key, e).map_err(|e| invalid(&p, e))?;
            }
            f.set(key, cell);
        }
        validate_function(self.g, &f).map_err(|e| invalid(path, e))?;
        Ok(f)
    }

    fn multi_index(&self, path: &str, s: &str) -> Result<Vec<usize>, ScenarioError> {
        let dim = self.g.dim();
        let parts: Vec<&str> = s.split([',', '^']).map(str::trim).collect();
        let mut idx = Vec::new();
        for p in parts {
            let k: usize = p
                .strip_prefix("dx")
                .unwrap_or(p)
                .parse()
                .map_err(|_| invalid(path, format!("bad multi-index `{}`", s)))?;
            if k == 0 || k > dim {
                return Err(invalid(path, format!("index {} outside 1..={}", k, dim)));
            }
            idx.push(k - 1);
        }
        if idx.windows(2).any(|w| w[0] >= w[1]) {
            return Err(invalid(path, format!("multi-index `{}` must be strictly increasing", s)));
        }
        Ok(idx)
    }

    fn forms(&self, path: &str, level: usize, degree: usize, specs: &[FormSpec]) -> Result<FormCochain, ScenarioError> {
        let dim = self.g.dim();
        let mut w = FormCochain::zero(level, degree, dim);
        for (i, f) in specs.iter().enumerate() {
            let p = format!("{}[{}]", path, i);
            if f.labels.len() != level {
                return Err(invalid(&p, format!("expected {} labels, found {}", level, f.labels.len())));
            }
            let key = self.key(&p, &f.comp, &f.labels)?;
            let mut terms = Vec::new();
            for (k, v) in &f.terms {
                let tp = format!("{}.terms.{}", p, k);
                let idx = self.multi_index(&tp, k)?;
                if idx.len() != degree {
                    return Err(invalid(&tp, format!("expected a {}-form term", degree)));
                }
                terms.push((idx, self.expr(&tp, v)?));
            }
            let form = PForm::from_terms(degree, dim, terms).map_err(|e| invalid(&p, e))?;
            let merged = w.get(&key).add(&form).map_err(|e| invalid(&p, e))?;
            w.set(key, merged);
        }
        validate_forms(self.g, &w).map_err(|e| invalid(path, e))?;
        Ok(w)
    }

    fn partition(&self, path: &str, breaks: &Option<Vec<String>>) -> Result<Partition, ScenarioError> {
        match breaks {
            None => Ok(Partition::trivial()),
            Some(b) => {
                let pts = b
                    .iter()
                    .enumerate()
                    .map(|(i, s)| parse_rational(&format!("{}.breaks[{}]", path, i), s))
                    .collect::<Result<Vec<_>, _>>()?;
                Partition::new(pts).map_err(|e| invalid(format!("{}.breaks", path), e))
            }
        }
    }

    fn segments(&self, path: &str, specs: &[SegmentSpec]) -> Result<Vec<PathSegment>, ScenarioError> {
        let dim = self.g.dim();
        specs
            .iter()
            .enumerate()
            .map(|(i, s)| {
                let p = format!("{}.segments[{}]", path, i);
                if s.path.len() != dim {
                    return Err(invalid(format!("{}.path", p), format!("expected {} coordinates", dim)));
                }
                let comp = self.comp(&p, &s.comp)?;
                let coords = s
                    .path
                    .iter()
                    .enumerate()
                    .map(|(k, e)| self.expr(&format!("{}.path[{}]", p, k), e))
                    .collect::<Result<Vec<_>, _>>()?;
                Ok(PathSegment::new(comp, Carrier::Param(coords)))
            })
            .collect()
    }

    /// Closing labels, each read out of the component of its segment.
    fn segment_labels(&self, path: &str, segs: &[PathSegment], names: &[String]) -> Result<Vec<usize>, ScenarioError> {
        if names.len() != segs.len() {
            return Err(invalid(path, format!("expected {} labels, one per segment", segs.len())));
        }
        names
            .iter()
            .zip(segs)
            .enumerate()
            .map(|(i, (n, s))| self.label(&format!("{}[{}]", path, i), s.comp, n))
            .collect()
    }

    fn lp(&self, path: &str, s: &LoopSpec) -> Result<SegmentedLoop, ScenarioError> {
        let partition = self.partition(path, &s.breaks)?;
        let segments = self.segments(path, &s.segments)?;
        if segments.len() != partition.segments() {
            return Err(invalid(path, "segment count does not match the break points"));
        }
        let arrows = self.segment_labels(&format!("{}.arrows", path), &segments, &s.arrows)?;
        build_loop(self.g, partition, segments, arrows).map_err(|e| invalid(path, e))
    }

    fn arrow(
        &self,
        id: &str,
        specs: &BTreeMap<String, ArrowSpec>,
        loops: &BTreeMap<String, SegmentedLoop>,
        done: &mut BTreeMap<String, LoopArrow>,
        visiting: &mut BTreeSet<String>,
    ) -> Result<LoopArrow, ScenarioError> {
        if let Some(a) = done.get(id) {
            return Ok(a.clone());
        }
        let path = format!("loop_arrows.{}", id);
        let spec = specs.get(id).ok_or_else(|| invalid(&path, "undefined loop arrow"))?;
        if !visiting.insert(id.to_string()) {
            return Err(invalid(&path, "circular definition"));
        }
        let mut resolve = |r: &str| self.arrow(r, specs, loops, done, visiting);
        let built = match (&spec.source, &spec.compose, &spec.inverse) {
            (Some(src), None, None) => {
                let lp = loops
                    .get(src)
                    .ok_or_else(|| invalid(format!("{}.source", path), format!("undefined loop `{}`", src)))?;
                let labels = self.segment_labels(&format!("{}.labels", path), &lp.segments, &spec.labels)?;
                build_loop_arrow(self.g, lp, labels).map_err(|e| invalid(&path, e))?
            }
            (None, Some(parts), None) if !parts.is_empty() => {
                let mut acc = resolve(&parts[0])?;
                for p in &parts[1..] {
                    let next = resolve(p)?;
                    acc = compose_loop_arrows(self.g, &acc, &next).map_err(|e| invalid(format!("{}.compose", path), e))?;
                }
                acc
            }
            (None, None, Some(r)) => {
                let a = resolve(r)?;
                inverse_loop_arrow(self.g, &a).map_err(|e| invalid(&path, e))?
            }
            _ => return Err(invalid(&path, "give exactly one of `source`, `compose` or `inverse`")),
        };
        visiting.remove(id);
        done.insert(id.to_string(), built.clone());
        Ok(built)
    }
}

fn build_group(spec: &GroupSpec) -> Result<FiniteGroup, ScenarioError> {
    match spec {
        GroupSpec::Name(s) => FiniteGroup::parse(s).map_err(|e| invalid("groupoid.group", e)),
        GroupSpec::Table { label, table } => {
            FiniteGroup::from_table(label, table.clone()).map_err(|e| invalid("groupoid.group.table", e))
        }
    }
}

fn build_groupoid(spec: &GroupoidSpec) -> Result<Groupoid, ScenarioError> {
    match spec {
        GroupoidSpec::Action { group, space, action } => {
            let group = build_group(group)?;
            let element = |name: &str, path: &str| {
                group
                    .element_by_name(name)
                    .or_else(|| name.parse().ok().filter(|&i| i < group.order()))
                    .ok_or_else(|| invalid(path, format!("no element `{}` in {}", name, group.label())))
            };
            let space_model = match space {
                SpaceSpec::Points(p) => Space::Points(p.clone()),
                SpaceSpec::Torus(d) => Space::Torus(*d),
            };
            let action = match (action, space) {
                (ActionSpec::Trivial, SpaceSpec::Points(p)) => {
                    Action::Permutations(vec![(0..p.len()).collect(); group.order()])
                }
                (ActionSpec::Trivial, SpaceSpec::Torus(d)) => Action::Affine(vec![AffineMap::identity(*d); group.order()]),
                (ActionSpec::Permutations(m), SpaceSpec::Points(p)) => {
                    let mut perms = vec![(0..p.len()).collect::<Vec<usize>>(); group.order()];
                    for (name, perm) in m {
                        perms[element(name, &format!("groupoid.action.permutations.{}", name))?] = perm.clone();
                    }
                    Action::Permutations(perms)
                }
                (ActionSpec::Affine(m), SpaceSpec::Torus(d)) => {
                    let mut maps = vec![AffineMap::identity(*d); group.order()];
                    for (name, a) in m {
                        let path = format!("groupoid.action.affine.{}", name);
                        let t = if a.translation.is_empty() {
                            vec![Rational64::from_integer(0); *d]
                        } else {
                            a.translation
                                .iter()
                                .enumerate()
                                .map(|(k, s)| parse_rational(&format!("{}.translation[{}]", path, k), s))
                                .collect::<Result<Vec<_>, _>>()?
                        };
                        maps[element(name, &path)?] = AffineMap::new(a.matrix.clone(), t).map_err(|e| invalid(&path, e))?;
                    }
                    Action::Affine(maps)
                }
                _ => return Err(invalid("groupoid.action", "action kind does not match the space")),
            };
            ActionGroupoid::new(space_model, group, action)
                .map(Groupoid::Action)
                .map_err(|e| invalid("groupoid", e))
        }
        GroupoidSpec::Cover { dim, periodic, charts } => {
            let charts = charts
                .iter()
                .enumerate()
                .map(|(i, c)| Chart::new(c.lo.clone(), c.hi.clone()).map_err(|e| invalid(format!("groupoid.charts[{}]", i), e)))
                .collect::<Result<Vec<_>, _>>()?;
            CoverGroupoid::new(*dim, charts, *periodic)
                .map(Groupoid::Cover)
                .map_err(|e| invalid("groupoid", e))
        }
    }
}

fn torsion_cocycle(g: &Groupoid, spec: &TorsionSpec) -> Result<TorsionCocycle, ScenarioError> {
    let path = "gerbe.torsion";
    let group = g
        .group()
        .ok_or_else(|| invalid(path, "discrete torsion needs a global quotient"))?;
    match (&spec.angles, &spec.class) {
        (Some(rows), None) => {
            let angles = rows
                .iter()
                .enumerate()
                .map(|(i, r)| {
                    r.iter()
                        .enumerate()
                        .map(|(j, s)| parse_rational(&format!("{}.angles[{}][{}]", path, i, j), s))
                        .collect::<Result<Vec<_>, _>>()
                })
                .collect::<Result<Vec<_>, _>>()?;
            TorsionCocycle::from_angles(group, angles).map_err(|e| invalid(format!("{}.angles", path), e))
        }
        (None, Some(coords)) => torsion_class(group, coords).map_err(|e| invalid(format!("{}.class", path), e)),
        _ => Err(invalid(path, "give exactly one of `angles` and `class`")),
    }
}

/// Representative of the class with Smith coordinates `coords`.
pub fn torsion_class(group: &FiniteGroup, coords: &[u64]) -> Result<TorsionCocycle, gerbe_core::sectors::SectorError> {
    let schur = h2_finite_group(group)?;
    if coords.len() != schur.factors.len() || coords.iter().zip(&schur.factors).any(|(c, f)| c >= f) {
        return Err(gerbe_core::sectors::SectorError::BadClass {
            coords: coords.to_vec(),
            factors: schur.factors.clone(),
        });
    }
    Ok(schur.class_representative(group, coords))
}

fn build(file: ScenarioFile, digest: String) -> Result<Scenario, ScenarioError> {
    if file.version != SCENARIO_VERSION {
        return Err(invalid("version", format!("unsupported version {}", file.version)));
    }
    let g = build_groupoid(&file.groupoid)?;
    let b = Builder { g: &g };
    let dim = g.dim();

    let line = match &file.line {
        Some(l) => Some(LineData {
            h: b.function("line.h", 1, &l.h)?,
            a: b.forms("line.a", 0, 1, &l.a)?,
        }),
        None => None,
    };

    let gerbe = match &file.gerbe {
        Some(s) => {
            let mut data = GerbeData {
                h: b.function("gerbe.h", 2, &s.h)?,
                a: b.forms("gerbe.a", 1, 1, &s.a)?,
                b: b.forms("gerbe.b", 0, 2, &s.b)?,
            };
            if let Some(t) = &s.torsion {
                let eps = torsion_cocycle(&g, t)?;
                data = data.mul(&torsion_gerbe(&eps, &g).map_err(|e| invalid("gerbe.torsion", e))?);
            }
            if s.coboundary_of_line {
                let l = line
                    .as_ref()
                    .ok_or_else(|| invalid("gerbe.coboundary_of_line", "no `line` section"))?;
                data = data.mul(&total_coboundary_line(&g, l));
            }
            Some(data)
        }
        None => None,
    };

    let flat = match &file.flat {
        Some(f) => {
            if f.n < 1 {
                return Err(invalid("flat.n", "n must be at least 1"));
            }
            Some(FlatNData::flat(f.n, b.function("flat.omega", f.n, &f.omega)?, dim))
        }
        None => None,
    };

    let mut loops = BTreeMap::new();
    for (id, s) in &file.loops {
        loops.insert(id.clone(), b.lp(&format!("loops.{}", id), s)?);
    }

    let mut arrows = BTreeMap::new();
    for id in file.loop_arrows.keys() {
        b.arrow(id, &file.loop_arrows, &loops, &mut arrows, &mut BTreeSet::new())?;
    }

    let mut tangents = BTreeMap::new();
    for (id, s) in &file.tangents {
        let path = format!("tangents.{}", id);
        let lp = loops
            .get(&s.on)
            .ok_or_else(|| invalid(format!("{}.loop", path), format!("undefined loop `{}`", s.on)))?;
        if s.fields.len() != lp.len() {
            return Err(invalid(format!("{}.fields", path), format!("expected {} fields, one per segment", lp.len())));
        }
        let fields = s
            .fields
            .iter()
            .enumerate()
            .map(|(i, f)| {
                if f.len() != dim {
                    return Err(invalid(format!("{}.fields[{}]", path, i), format!("expected {} coordinates", dim)));
                }
                f.iter()
                    .enumerate()
                    .map(|(k, e)| b.expr(&format!("{}.fields[{}][{}]", path, i, k), e))
                    .collect::<Result<Vec<_>, _>>()
                    .map(Carrier::Param)
            })
            .collect::<Result<Vec<_>, _>>()?;
        let xi = LoopTangent { fields };
        validate_tangent(&g, lp, &xi).map_err(|e| invalid(&path, e))?;
        tangents.insert(id.clone(), (s.on.clone(), xi));
    }

    let mut families = BTreeMap::new();
    for (id, s) in &file.families {
        let path = format!("families.{}", id);
        let partition = b.partition(&path, &s.breaks)?;
        let segments = b.segments(&path, &s.segments)?;
        if segments.len() != partition.segments() {
            return Err(invalid(&path, "segment count does not match the break points"));
        }
        let arrows = b.segment_labels(&format!("{}.arrows", path), &segments, &s.arrows)?;
        let labels = b.segment_labels(&format!("{}.labels", path), &segments, &s.labels)?;
        let fam = LoopFamily::new(&g, partition, segments, arrows, labels, s.params, s.radius).map_err(|e| invalid(&path, e))?;
        families.insert(id.clone(), fam);
    }

    Ok(Scenario {
        digest,
        seed: file.seed,
        groupoid: g,
        line,
        gerbe,
        flat,
        loops,
        arrows,
        tangents,
        families,
        settings: file.settings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rationals_and_digests() {
        assert_eq!(parse_rational("x", " 1 / 3 ").unwrap(), Rational64::new(1, 3));
        assert!(parse_rational("x", "1/0").is_err());
        assert_eq!(
            digest(b""),
            "sha256:e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855"
        );
    }
}
