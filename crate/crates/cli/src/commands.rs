use std::io::Write;

use expgeo::boltzmann::{GibbsSpec, McRun, Monomial, Observable};
use expgeo::calculus::{
    entropy_functional, expectation_functional, gradient_flow, kl_divergence, kl_in_chart, GradientField,
    ScalarField, VectorField,
};
use expgeo::manifold::{chart, chart_inverse};
use expgeo::transport::l2_norm;
use expgeo::young::{luxemburg_norm, YoungFunction, YoungPairKind};
use expgeo::{CenteredRandomVariable, Density, VectorJson};
use serde::Serialize;

use crate::io::{fmt_f64, read_json, to_json, CliError, CliResult, Context};

fn density(arg: &str, what: &str) -> CliResult<Density<f64>> {
    read_json::<VectorJson<f64>>(arg, what)?.into_density().context(what)
}

pub fn norm(out: &mut impl Write, density_arg: &str, variable_arg: &str, func: YoungFunction, tol: f64) -> CliResult<()> {
    let p = density(density_arg, "--density")?;
    let v = read_json::<VectorJson<f64>>(variable_arg, "--variable")?
        .into_variable_on(p.space())
        .context("--variable")?;
    let n = luxemburg_norm(&p, &v, func, tol).context("--tol")?;
    writeln!(out, "{}", fmt_f64(n))?;
    Ok(())
}

pub fn chart_cmd(out: &mut impl Write, base_arg: &str, density_arg: Option<&str>, coordinate_arg: Option<&str>) -> CliResult<()> {
    let p = density(base_arg, "--base")?;
    let json = match (density_arg, coordinate_arg) {
        (Some(q), None) => {
            let q = density(q, "--density")?;
            let u = chart(&p, &q).context("--density")?;
            VectorJson::from(u.variable())
        }
        (None, Some(u)) => {
            let u = read_json::<VectorJson<f64>>(u, "--coordinate")?
                .into_variable_on(p.space())
                .context("--coordinate")?;
            let u = CenteredRandomVariable::new(p.clone(), u).context("--coordinate")?;
            VectorJson::from(&chart_inverse(&p, &u)?)
        }
        _ => {
            return Err(CliError::Validation(
                "exactly one of --density and --coordinate is required".into(),
            ))
        }
    };
    writeln!(out, "{}", to_json(&json)?)?;
    Ok(())
}

#[derive(Serialize)]
struct KlReport {
    direct: f64,
    chart: f64,
}

pub fn kl(out: &mut impl Write, q1: &str, q2: &str, base: Option<&str>, tol: f64, csv: bool) -> CliResult<()> {
    if !(tol > 0.0) {
        return Err(CliError::Validation(format!("--tol must be positive, got {tol}")));
    }
    let q1 = density(q1, "--q1")?;
    let q2 = density(q2, "--q2")?;
    let p = match base {
        Some(b) => density(b, "--base")?,
        None => Density::uniform(q1.space().clone()),
    };
    let direct = kl_divergence(&q1, &q2).context("--q2")?;
    let u1 = chart(&p, &q1).context("--q1")?;
    let u2 = chart(&p, &q2).context("--q2")?;
    let in_chart = kl_in_chart(&p, &u1, &u2)?;
    if csv {
        writeln!(out, "direct,chart")?;
        writeln!(out, "{},{}", fmt_f64(direct), fmt_f64(in_chart))?;
    } else {
        writeln!(out, "{}", to_json(&KlReport { direct, chart: in_chart })?)?;
    }
    let gap = (direct - in_chart).abs();
    if gap > tol * direct.abs().max(1.0) {
        return Err(CliError::Numeric(format!(
            "direct and chart divergences differ by {gap}, above --tol {tol}"
        )));
    }
    Ok(())
}

pub fn entropy(out: &mut impl Write, density_arg: &str) -> CliResult<()> {
    let q = density(density_arg, "--density")?;
    writeln!(out, "{}", fmt_f64(entropy_functional().evaluate(&q)?))?;
    Ok(())
}

pub enum FlowField {
    Expectation(String),
    Entropy,
}

pub fn flow(out: &mut impl Write, field: FlowField, p0: &str, t: f64, step: f64, csv: bool) -> CliResult<()> {
    let p0 = density(p0, "--p0")?;
    match field {
        FlowField::Expectation(f) => {
            let f = read_json::<VectorJson<f64>>(&f, "--f")?
                .into_variable_on(p0.space())
                .context("--f")?;
            run_flow(out, &expectation_functional(f), &p0, t, step, csv)
        }
        FlowField::Entropy => run_flow(out, &entropy_functional(), &p0, t, step, csv),
    }
}

fn run_flow<S: ScalarField<f64> + Clone>(
    out: &mut impl Write,
    functional: &S,
    p0: &Density<f64>,
    t: f64,
    step: f64,
    csv: bool,
) -> CliResult<()> {
    let field = GradientField(functional.clone());
    let traj = gradient_flow(&field, p0, t, step).context("--t/--step")?;
    if !csv {
        writeln!(out, "{}", to_json(&VectorJson::from(traj.last()))?)?;
        return Ok(());
    }
    let header: Vec<String> = (1..=p0.len()).map(|i| format!("p_{i}")).collect();
    writeln!(out, "t,{},value,fisher", header.join(","))?;
    for (time, q) in traj.times().iter().zip(traj.densities()) {
        let velocity = field.at(q)?;
        let fisher = l2_norm(&velocity).powi(2);
        let mut row = vec![fmt_f64(*time)];
        row.extend(q.values().iter().map(|&x| fmt_f64(x)));
        row.push(fmt_f64(functional.evaluate(q)?));
        row.push(fmt_f64(fisher));
        writeln!(out, "{}", row.join(","))?;
    }
    Ok(())
}

pub enum GChoice {
    Invariant,
    V1Squared,
    LogDensity,
    Polynomial(String),
}

pub fn boltzmann(out: &mut impl Write, spec: &str, g: GChoice, n: usize, seed: u64, workers: Option<usize>) -> CliResult<()> {
    let spec: GibbsSpec = read_json(spec, "--spec")?;
    spec.validate().context("--spec")?;
    let observable = match g {
        GChoice::Invariant => Observable::Invariant,
        GChoice::V1Squared => Observable::V1Squared,
        GChoice::LogDensity => Observable::LogDensity,
        GChoice::Polynomial(p) => {
            let terms: Vec<Monomial> = read_json(&p, "--poly")?;
            Observable::polynomial(terms).context("--poly")?
        }
    };
    let mut run = McRun::new(n, seed);
    if let Some(w) = workers {
        run = run.with_workers(w);
    }
    let est = observable.weak_boltzmann(&spec, &run).context("--n")?;
    writeln!(out, "{}", to_json(&est)?)?;
    Ok(())
}

pub fn young_function(kind: YoungPairKind, conjugate: bool) -> YoungFunction {
    if conjugate {
        YoungFunction::phi_star(kind)
    } else {
        YoungFunction::phi(kind)
    }
}
