use plap_core::barriers::{
    build_counterexample, counterexample_residual, hadamard_lower_bound, hadamard_monotonicity_check, HadamardInput,
};
use plap_core::bvp::{comparison_check, solve_annulus_dirichlet, AnnulusProblem, Rhs};
use plap_core::exponents::{classify_regime, equation_critical, pohozaev_coefficient, EQUATION_BOUNDARY_BAND};
use plap_core::radial::PowerBarrier;
use plap_core::shooting::{classify_outcome, integrate_ivp, pohozaev_residual, IvpSpec, Outcome, Trajectory};
use plap_core::{IdentityReport, Operator, ProblemParams, Regime};
use rayon::prelude::*;
use serde::Serialize;

use crate::args::{
    Axis, BvpArgs, CounterexampleArgs, HadamardArgs, IvpArgs, PohozaevArgs, ProblemArgs, Settings, ShootArgs, SignArg,
    SweepArgs,
};
use crate::output::{read_pairs, Field, Sink};
use crate::CliError;

const DEFAULT_R_MAX: f64 = 1000.0;

#[derive(Serialize)]
struct Classification {
    params: ProblemParams,
    #[serde(flatten)]
    regime: Regime,
    pohozaev_coefficient: Option<f64>,
}

pub fn classify(s: &Settings, args: &ProblemArgs, out: &mut Sink) -> Result<(), CliError> {
    let params = s.problem(args)?;
    out.json(&Classification {
        params,
        regime: classify_regime(&params),
        pohozaev_coefficient: pohozaev_coefficient(&params).ok(),
    })?;
    Ok(())
}

fn ivp(s: &Settings, params: ProblemParams, args: &IvpArgs) -> Result<IvpSpec, CliError> {
    let u0 = s.or(args.u0, "u0", 1.0)?;
    let sign = s.or(args.sign, "sign", SignArg::Minus)?;
    let r_max = s.or(args.r_max, "r-max", DEFAULT_R_MAX)?;
    let mut spec = IvpSpec::new(params, u0, sign.into(), r_max)?;
    let rtol = s.get(args.rtol, "rtol")?;
    let atol = s.get(args.atol, "atol")?;
    if rtol.is_some() || atol.is_some() {
        spec = spec.with_tolerances(rtol.unwrap_or(spec.rtol), atol.unwrap_or(spec.atol))?;
    }
    Ok(spec)
}

fn summarize(traj: &Trajectory) -> String {
    serde_json::json!({
        "outcome": classify_outcome(traj),
        "event": traj.event,
        "samples": traj.len(),
    })
    .to_string()
}

pub fn shoot(s: &Settings, args: &ShootArgs, out: &mut Sink) -> Result<(), CliError> {
    let spec = ivp(s, s.problem(&args.problem)?, &args.ivp)?;
    let traj = integrate_ivp(&spec)?;
    out.csv_header(&["r", "u", "du", "w"])?;
    for (i, du) in traj.du().into_iter().enumerate() {
        out.csv_row(&[
            Field::Num(traj.r[i]),
            Field::Num(traj.u[i]),
            Field::Num(du),
            Field::Num(traj.w[i]),
        ])?;
    }
    eprintln!("{}", summarize(&traj));
    Ok(())
}

struct SweepRow {
    value: f64,
    outcome: Outcome,
    boundary_case: bool,
}

fn thread_cap() -> usize {
    std::env::var("PLAP_THREADS")
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .unwrap_or(0)
}

pub fn sweep(s: &Settings, args: &SweepArgs, out: &mut Sink) -> Result<(), CliError> {
    let axis: Axis = s.require(args.axis, "axis")?;
    let from: f64 = s.require(args.from, "from")?;
    let to: f64 = s.require(args.to, "to")?;
    let steps: usize = s.require(args.steps, "steps")?;
    if !(from < to) || steps < 2 {
        return Err(CliError::Usage(format!(
            "sweep needs from < to and steps >= 2 (got {from}, {to}, {steps})"
        )));
    }
    // The swept quantity may be absent from the flags.
    let mut problem = args.problem.clone();
    let mut ivp_args = args.ivp.clone();
    match axis {
        Axis::Q => problem.q = Some(from),
        Axis::Gamma => problem.gamma = Some(from),
        Axis::U0 => ivp_args.u0 = Some(from),
    }
    let base = ivp(s, s.problem(&problem)?, &ivp_args)?;

    let values: Vec<f64> = (0..steps)
        .map(|i| from + (to - from) * i as f64 / (steps - 1) as f64)
        .collect();
    let specs = values
        .iter()
        .map(|&v| {
            let mut spec = base;
            match axis {
                Axis::Q => spec.params.q = v,
                Axis::Gamma => spec.params.gamma = v,
                Axis::U0 => spec.u0 = v,
            }
            spec.params.validate()?;
            spec.validate()?;
            Ok(spec)
        })
        .collect::<Result<Vec<_>, plap_core::Error>>()?;

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(thread_cap())
        .build()
        .map_err(|e| CliError::Usage(format!("thread pool: {e}")))?;
    let rows = pool.install(|| {
        specs
            .par_iter()
            .zip(values.par_iter())
            .map(|(spec, &value)| {
                let traj = integrate_ivp(spec)?;
                let boundary_case = equation_critical(&spec.params)
                    .map(|qe| (spec.params.q - qe).abs() < EQUATION_BOUNDARY_BAND)
                    .unwrap_or(false);
                Ok(SweepRow {
                    value,
                    outcome: classify_outcome(&traj),
                    boundary_case,
                })
            })
            .collect::<Result<Vec<_>, plap_core::Error>>()
    })?;

    out.csv_header(&["axis_value", "outcome", "r_event", "tail_slope", "boundary_case"])?;
    for row in rows {
        out.csv_row(&[
            Field::Num(row.value),
            Field::Text(row.outcome.label()),
            Field::Opt(row.outcome.event_radius()),
            Field::Opt(row.outcome.tail_slope()),
            Field::Bool(row.boundary_case),
        ])?;
    }
    Ok(())
}

#[derive(Serialize)]
struct CounterexampleOut {
    params: ProblemParams,
    epsilon: f64,
    alpha: f64,
    c: f64,
    r_lo: f64,
    r_hi: f64,
    points: usize,
    min_residual: f64,
    min_residual_at: f64,
    nonnegative: bool,
}

pub fn counterexample(s: &Settings, args: &CounterexampleArgs, out: &mut Sink) -> Result<(), CliError> {
    let params = s.problem(&args.problem)?;
    let r_lo = s.or(args.r_lo, "r-lo", 1e-3)?;
    let r_hi = s.or(args.r_hi, "r-hi", 1e6)?;
    let points = s.or(args.points, "points", 2000)?;
    if !(r_lo > 0.0 && r_lo < r_hi) || points < 2 {
        return Err(CliError::Usage("need 0 < r-lo < r-hi and points >= 2".into()));
    }
    let k = build_counterexample(&params)?;
    let mut min = (f64::INFINITY, r_lo);
    for i in 0..points {
        let r = (r_lo.ln() + (r_hi / r_lo).ln() * i as f64 / (points - 1) as f64).exp();
        let res = counterexample_residual(&k, &params, r)?.residual;
        if res < min.0 {
            min = (res, r);
        }
    }
    out.json(&CounterexampleOut {
        params,
        epsilon: k.epsilon,
        alpha: k.alpha,
        c: k.c,
        r_lo,
        r_hi,
        points,
        min_residual: min.0,
        min_residual_at: min.1,
        nonnegative: min.0 >= 0.0,
    })?;
    Ok(())
}

pub fn hadamard(s: &Settings, args: &HadamardArgs, out: &mut Sink) -> Result<(), CliError> {
    let op = Operator::new(s.require(args.n, "n")?, s.require(args.p, "p")?)?;
    if let Some(path) = s.get(args.samples.clone(), "samples")? {
        let samples = read_pairs(&path).map_err(CliError::Usage)?;
        let report = hadamard_monotonicity_check(&samples, op.lambda())?;
        out.json(&report)?;
        return Ok(());
    }
    let input = HadamardInput::new(
        s.require(args.r1, "r1")?,
        s.require(args.m1, "m1")?,
        s.require(args.r2, "r2")?,
        s.require(args.m2, "m2")?,
        &op,
    )?;
    let points = s.or(args.points, "points", 11)?;
    if points < 2 {
        return Err(CliError::Usage("points must be >= 2".into()));
    }
    out.csv_header(&["r", "bound"])?;
    for i in 0..points {
        let t = i as f64 / (points - 1) as f64;
        let r = if i + 1 == points {
            input.r2
        } else {
            input.r1 * (input.r2 / input.r1).powf(t)
        };
        out.csv_row(&[Field::Num(r), Field::Num(hadamard_lower_bound(&input, r)?)])?;
    }
    Ok(())
}

#[derive(Serialize)]
struct PohozaevOut {
    params: ProblemParams,
    coefficient: Option<f64>,
    outcome: Outcome,
    evaluations: Vec<PohozaevEval>,
}

#[derive(Serialize)]
struct PohozaevEval {
    r_eval: f64,
    relative: f64,
    report: IdentityReport,
}

pub fn pohozaev(s: &Settings, args: &PohozaevArgs, out: &mut Sink) -> Result<(), CliError> {
    let params = s.problem(&args.problem)?;
    let spec = ivp(s, params, &args.ivp)?;
    let radii = if args.r_eval.is_empty() {
        match s.get::<String>(None, "r-eval")? {
            Some(list) => list
                .split(',')
                .map(|v| v.trim().parse::<f64>())
                .collect::<Result<Vec<_>, _>>()
                .map_err(|_| CliError::Usage(format!("cannot parse r-eval list {list:?}")))?,
            None => return Err(CliError::Usage("missing required --r-eval".into())),
        }
    } else {
        args.r_eval.clone()
    };
    let traj = integrate_ivp(&spec)?;
    let evaluations = radii
        .iter()
        .map(|&r| {
            let report = pohozaev_residual(&traj, r)?;
            Ok(PohozaevEval {
                r_eval: r,
                relative: report.relative(),
                report,
            })
        })
        .collect::<Result<Vec<_>, plap_core::Error>>()?;
    out.json(&PohozaevOut {
        params,
        coefficient: pohozaev_coefficient(&params).ok(),
        outcome: classify_outcome(&traj),
        evaluations,
    })?;
    Ok(())
}

pub fn bvp(s: &Settings, args: &BvpArgs, out: &mut Sink) -> Result<(), CliError> {
    let op = Operator::new(s.require(args.n, "n")?, s.require(args.p, "p")?)?;
    let r_inner = s.require(args.r_inner, "r-inner")?;
    let r_outer = s.require(args.r_outer, "r-outer")?;
    let u_inner = s.require(args.u_inner, "u-inner")?;
    let u_outer = s.require(args.u_outer, "u-outer")?;
    let f = s.or(args.f, "f", 0.0)?;
    let mesh = s.or(args.mesh, "mesh", 256)?;
    let rhs = if f == 0.0 { Rhs::Zero } else { Rhs::Constant(f) };
    let prob = AnnulusProblem::new(op, r_inner, r_outer, (u_inner, u_outer), rhs, mesh)?;
    let sol = solve_annulus_dirichlet(&prob)?;
    out.csv_header(&["r", "u"])?;
    for (r, u) in sol.profile.iter() {
        out.csv_row(&[Field::Num(r), Field::Num(u)])?;
    }
    let mut summary = serde_json::json!({
        "residual": sol.residual,
        "flux_eps": sol.flux_eps,
        "newton_iterations": sol.newton_iterations,
    });
    if let Some(phi) = &args.compare {
        let phi = PowerBarrier::through(r_inner, phi[0], r_outer, phi[1], &op);
        summary["comparison"] =
            serde_json::to_value(comparison_check(&prob, &phi)?).map_err(|e| CliError::Io(e.into()))?;
    }
    eprintln!("{summary}");
    Ok(())
}
