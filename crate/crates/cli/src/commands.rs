//! Command implementations; each returns a machine report.

use gerbe_core::deligne::{verify_flat, verify_gerbe, verify_line};
use gerbe_core::group::FiniteGroup;
use gerbe_core::groupoid::inertia::inertia;
use gerbe_core::groupoid::{ActionGroupoid, FixedSet, Groupoid};
use gerbe_core::report::{Check, Report};
use gerbe_core::sectors::{
    check_inner_local_system, h2_finite_group, restrict_to_inertia, schur_oracle, sector_decomposition, LocalOptions,
};
use gerbe_core::suites::{run_criterion, CRITERIA};
use gerbe_core::transgression::{
    check_commutation_square, delta_eval, tau1_eval, tau2_build, tau_n_flat_eval, SquareOptions, SquareSamples,
};
use thiserror::Error;

use crate::report::{MachineReport, Value};
use crate::scenario::{parse_group, torsion_class, Scenario, ScenarioError};

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Scenario(#[from] ScenarioError),
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Compute(String),
}

fn compute(e: impl std::fmt::Display) -> CliError {
    CliError::Compute(e.to_string())
}

fn missing(what: &str) -> CliError {
    CliError::Input(format!("scenario has no `{}` section", what))
}

fn prefixed(prefix: &str, r: Report) -> Report {
    Report {
        checks: r
            .checks
            .into_iter()
            .map(|c| Check {
                name: format!("{}: {}", prefix, c.name),
                ..c
            })
            .collect(),
    }
}

fn new_report(command: &str, sc: &Scenario, seed: u64) -> MachineReport {
    MachineReport::new(command, Some(sc.digest.clone()), seed)
}

fn action(sc: &Scenario) -> Result<&ActionGroupoid, CliError> {
    match &sc.groupoid {
        Groupoid::Action(a) => Ok(a),
        Groupoid::Cover(_) => Err(CliError::Input("command needs a global quotient groupoid".into())),
    }
}

pub fn verify(sc: &Scenario, seed: u64) -> Result<MachineReport, CliError> {
    let mut out = new_report("verify", sc, seed);
    let opts = sc.settings.verify_options(seed);
    let g = &sc.groupoid;
    if sc.line.is_none() && sc.gerbe.is_none() && sc.flat.is_none() {
        return Err(CliError::Input("scenario has no `line`, `gerbe` or `flat` section to verify".into()));
    }
    if let Some(l) = &sc.line {
        out.checks(&verify_line(g, l, &opts).map_err(compute)?);
    }
    if let Some(b) = &sc.gerbe {
        out.checks(&verify_gerbe(g, b, &opts).map_err(compute)?);
    }
    if let Some(f) = &sc.flat {
        out.checks(&verify_flat(g, f, &opts).map_err(compute)?);
    }
    Ok(out)
}

pub fn tau1(sc: &Scenario, seed: u64, loop_id: &str) -> Result<MachineReport, CliError> {
    let line = sc.line.as_ref().ok_or_else(|| missing("line"))?;
    let lp = sc
        .loops
        .get(loop_id)
        .ok_or_else(|| CliError::Input(format!("undefined loop `{}`", loop_id)))?;
    let mut out = new_report("tau1", sc, seed);
    let h = tau1_eval(line, lp, sc.settings.quadrature()).map_err(compute)?;
    out.value(format!("H({})", loop_id), Value::scalar(h));
    Ok(out)
}

pub fn tau2(sc: &Scenario, seed: u64, arrow: Option<&str>, tangent: Option<&str>) -> Result<MachineReport, CliError> {
    let gerbe = sc.gerbe.as_ref().ok_or_else(|| missing("gerbe"))?;
    if arrow.is_none() && tangent.is_none() {
        return Err(CliError::Input("tau2 needs --arrow or --tangent".into()));
    }
    let quad = sc.settings.quadrature();
    let bundle = tau2_build(gerbe, quad);
    let mut out = new_report("tau2", sc, seed);
    if let Some(id) = arrow {
        let l = sc
            .arrows
            .get(id)
            .ok_or_else(|| CliError::Input(format!("undefined loop arrow `{}`", id)))?;
        out.value(format!("F({})", id), Value::scalar(bundle.f(l).map_err(compute)?));
    }
    if let Some(id) = tangent {
        let (loop_id, xi) = sc
            .tangents
            .get(id)
            .ok_or_else(|| CliError::Input(format!("undefined tangent `{}`", id)))?;
        let lp = &sc.loops[loop_id];
        let d = delta_eval(&sc.groupoid, gerbe, lp, xi, quad).map_err(compute)?;
        out.value(format!("Delta({}, {})", loop_id, id), Value::Complex { re: d.re, im: d.im });
    }
    Ok(out)
}

pub fn taun(sc: &Scenario, seed: u64, n: usize, ids: &[String]) -> Result<MachineReport, CliError> {
    let flat = sc.flat.as_ref().ok_or_else(|| missing("flat"))?;
    if flat.n != n {
        return Err(CliError::Input(format!("flat data has n = {}, not {}", flat.n, n)));
    }
    let arrows = ids
        .iter()
        .map(|id| {
            sc.arrows
                .get(id)
                .cloned()
                .ok_or_else(|| CliError::Input(format!("undefined loop arrow `{}`", id)))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let v = tau_n_flat_eval(&sc.groupoid, flat, &arrows, sc.settings.quadrature()).map_err(compute)?;
    let mut out = new_report("taun", sc, seed);
    out.value(format!("tau{}({})", n, ids.join(", ")), Value::scalar(v));
    Ok(out)
}

pub fn square(sc: &Scenario, seed: u64) -> Result<MachineReport, CliError> {
    let line = sc.line.as_ref().ok_or_else(|| missing("line"))?;
    if sc.arrows.is_empty() && sc.families.is_empty() {
        return Err(CliError::Input("square needs loop arrows or families".into()));
    }
    let samples = SquareSamples {
        arrows: sc.arrows.values().cloned().collect(),
        families: sc.families.values().cloned().collect(),
    };
    let opts = SquareOptions {
        tol_function: sc.settings.tol,
        tol_form: sc.settings.tol_form,
        step: sc.settings.fd_step,
        ..SquareOptions::default()
    };
    let mut out = new_report("square", sc, seed);
    out.checks(&check_commutation_square(&sc.groupoid, line, &samples, &opts).map_err(compute)?);
    Ok(out)
}

fn describe_fixed(f: &FixedSet) -> String {
    match f {
        FixedSet::Points(p) => format!("{} points", p.len()),
        FixedSet::Torus { components, .. } => {
            let dims: Vec<String> = components.iter().map(|c| c.basis.len().to_string()).collect();
            format!("{} components of dimension [{}]", components.len(), dims.join(", "))
        }
    }
}

pub fn inertia_cmd(sc: &Scenario, seed: u64) -> Result<MachineReport, CliError> {
    let x = action(sc)?;
    let ig = inertia(x).map_err(compute)?;
    let group = x.group();
    let mut out = new_report("inertia", sc, seed);
    out.value("objects", Value::Integers { values: vec![ig.objects.len() as u64] });
    out.value("arrows", Value::Integers { values: vec![ig.arrows.len() as u64] });
    for g in group.elements() {
        out.value(format!("fixed set of {}", group.name(g)), Value::text(describe_fixed(&ig.fixed_sets[g])));
    }
    for (i, o) in ig.objects.iter().enumerate() {
        let at = match x.space() {
            gerbe_core::groupoid::Space::Points(_) => x.point_label(o.part),
            gerbe_core::groupoid::Space::Torus(_) => format!("component {} of M^{}", o.part, group.name(o.g)),
        };
        out.value(format!("object {}", i), Value::text(format!("v = {} at {}", group.name(o.g), at)));
    }
    Ok(out)
}

pub fn sectors(sc: &Scenario, seed: u64) -> Result<MachineReport, CliError> {
    let x = action(sc)?;
    let group = x.group();
    let mut out = new_report("sectors", sc, seed);
    let ls = match &sc.gerbe {
        Some(b) => {
            let bundle = tau2_build(b, sc.settings.quadrature());
            let ls = restrict_to_inertia(x, &bundle).map_err(compute)?;
            let opts = LocalOptions {
                tol: sc.settings.tol,
                seed,
                ..LocalOptions::default()
            };
            out.checks(&check_inner_local_system(&ls, &opts));
            Some(ls)
        }
        None => None,
    };
    let secs = sector_decomposition(x, ls.as_ref()).map_err(compute)?;
    out.value("sectors", Value::Integers { values: vec![secs.len() as u64] });
    for s in &secs {
        let name = format!("sector [{}]", group.name(s.representative));
        let class: Vec<&str> = s.class.iter().map(|&g| group.name(g)).collect();
        out.value(
            name.clone(),
            Value::text(format!(
                "class {{{}}}, centralizer of order {}, fixed set {}",
                class.join(", "),
                s.centralizer.len(),
                describe_fixed(&s.fixed_set)
            )),
        );
        for e in &s.table {
            out.value(
                format!("{} component {} alpha {}", name, e.component, group.name(e.alpha)),
                Value::scalar(e.value),
            );
        }
    }
    Ok(out)
}

pub fn h2(spec: &str, seed: u64) -> Result<MachineReport, CliError> {
    let g = parse_group(spec)?;
    let schur = h2_finite_group(&g).map_err(compute)?;
    let mut out = MachineReport::new("h2", None, seed);
    out.value("group", Value::text(g.label()));
    out.value("invariant factors", Value::Integers { values: schur.factors.clone() });
    out.value("order", Value::Integers { values: vec![schur.order()] });
    for (i, rep) in schur.representatives.iter().enumerate() {
        out.value(format!("generator {}", i), Value::text(angle_table(&g, rep.angles())));
        out.check(&Check::flag(&format!("generator {} is a cocycle", i), rep.is_cocycle(), None));
    }
    let oracle = schur_oracle(&g);
    out.check(&Check::flag(
        "Smith form agrees with cocycle counting",
        oracle == schur.factors,
        (oracle != schur.factors).then(|| format!("counting gives {:?}", oracle)),
    ));
    Ok(out)
}

fn angle_table(g: &FiniteGroup, angles: &[Vec<num_rational::Rational64>]) -> String {
    let rows: Vec<String> = g
        .elements()
        .map(|a| {
            let r: Vec<String> = g.elements().map(|b| angles[a][b].to_string()).collect();
            format!("[{}]", r.join(" "))
        })
        .collect();
    rows.join(" ")
}

pub fn torsion(spec: &str, class: &[u64], seed: u64) -> Result<MachineReport, CliError> {
    let g = parse_group(spec)?;
    let eps = torsion_class(&g, class).map_err(|e| CliError::Input(e.to_string()))?;
    let mut out = MachineReport::new("torsion", None, seed);
    out.value("group", Value::text(g.label()));
    out.value("class", Value::Integers { values: class.to_vec() });
    out.value("angles", Value::text(angle_table(&g, eps.angles())));
    for a in g.elements() {
        for b in g.elements() {
            if g.mul(a, b) == g.mul(b, a) {
                out.value(
                    format!("eps({0},{1})/eps({1},{0})", g.name(a), g.name(b)),
                    Value::scalar(eps.commutator_phase(a, b)),
                );
            }
        }
    }
    out.check(&Check::flag("cocycle", eps.is_cocycle(), None));
    let trivial = class.iter().all(|&c| c == 0);
    let coboundary = eps.is_coboundary();
    out.check(&Check::flag(
        "coboundary exactly for the zero class",
        coboundary == trivial,
        (coboundary != trivial).then(|| format!("is_coboundary = {}", coboundary)),
    ));
    Ok(out)
}

pub fn selftest(criterion: Option<usize>, seed: u64) -> Result<MachineReport, CliError> {
    let mut out = MachineReport::new("selftest", None, seed);
    let ids: Vec<usize> = match criterion {
        Some(id) if CRITERIA.iter().any(|c| c.id == id) => vec![id],
        Some(id) => return Err(CliError::Input(format!("no criterion {}", id))),
        None => CRITERIA.iter().map(|c| c.id).collect(),
    };
    for id in ids {
        let r = run_criterion(id, seed).map_err(compute)?;
        out.value(
            format!("criterion {}", id),
            Value::text(if r.pass() { "PASS" } else { "FAIL" }),
        );
        out.checks(&prefixed(&format!("criterion {}", id), r));
    }
    Ok(out)
}
