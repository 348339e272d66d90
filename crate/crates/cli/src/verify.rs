//! Built-in self checks. Each runs deterministic samples through the library
//! and prints one `PASS`/`FAIL` line; any failure exits with code 3.

use std::time::Instant;

use plap_core::barriers::{
    build_counterexample, counterexample_neg_plap, counterexample_residual, cutoff_barrier_plap, cutoff_upper_bound,
    hadamard_lower_bound, hadamard_monotonicity_check, log_barrier_plap, HadamardInput,
};
use plap_core::bvp::{solve_annulus_dirichlet, AnnulusProblem, Rhs};
use plap_core::exponents::{equation_critical, pohozaev_coefficient, serrin_critical};
use plap_core::identities::{moser_recursion_bound, RecursionSpec};
use plap_core::radial::{
    fd_step, p_laplacian_fd, power_transform_residual, CutoffBarrier, FnProfile, LogBarrier, PowerBarrier,
};
use plap_core::shooting::{
    classify_outcome, integrate_ivp, pohozaev_residual, scaling_exponent, IvpSpec, Outcome, Sign,
};
use plap_core::{Operator, ProblemParams, RadialProfile, Result};

use crate::output::Sink;
use crate::CliError;

struct Check {
    name: &'static str,
    run: fn() -> Result<(bool, String)>,
}

const CHECKS: [Check; 12] = [
    Check {
        name: "exponents",
        run: exponents,
    },
    Check {
        name: "counterexample",
        run: counterexample,
    },
    Check {
        name: "pohozaev-coefficient",
        run: coefficient_root,
    },
    Check {
        name: "critical-trajectory",
        run: critical_trajectory,
    },
    Check {
        name: "subcritical-crossing",
        run: subcritical_crossing,
    },
    Check {
        name: "pohozaev-residual",
        run: pohozaev,
    },
    Check {
        name: "hadamard",
        run: hadamard,
    },
    Check {
        name: "annulus-closed-forms",
        run: annulus,
    },
    Check {
        name: "recursion-bound",
        run: recursion,
    },
    Check {
        name: "closed-form-vs-fd",
        run: finite_differences,
    },
    Check {
        name: "blow-up-and-power-transform",
        run: blow_up,
    },
    Check {
        name: "scaling",
        run: scaling,
    },
];

pub fn run(out: &mut Sink) -> std::result::Result<(), CliError> {
    let mut failed = 0;
    for check in &CHECKS {
        let t = Instant::now();
        let (pass, detail) = (check.run)().unwrap_or_else(|e| (false, format!("error: {e}")));
        if !pass {
            failed += 1;
        }
        out.line(&format!(
            "{} {}: {detail} [{:.2}s]",
            if pass { "PASS" } else { "FAIL" },
            check.name,
            t.elapsed().as_secs_f64()
        ))?;
    }
    out.line(&format!("{}/{} checks passed", CHECKS.len() - failed, CHECKS.len()))?;
    if failed > 0 {
        return Err(CliError::Verification(failed));
    }
    Ok(())
}

fn unit(n: u32, p: f64, gamma: f64, q: f64) -> ProblemParams {
    ProblemParams::unit(n, p, gamma, q).expect("valid built-in parameters")
}

fn log_points(lo: f64, hi: f64, n: usize) -> impl Iterator<Item = f64> {
    (0..n).map(move |i| {
        (lo.ln() + (hi / lo).ln() * i as f64 / (n - 1) as f64)
            .exp()
            .clamp(lo, hi)
    })
}

/// Evenly spread fractions in (0, 1) used in place of random draws.
fn fractions(n: usize) -> impl Iterator<Item = f64> {
    (0..n).map(move |i| (i as f64 + 0.5) / n as f64)
}

fn exponents() -> Result<(bool, String)> {
    let p = unit(3, 2.0, 0.0, 3.0);
    let (qs, qe) = (serrin_critical(&p)?, equation_critical(&p)?);
    let mut worst = 0.0f64;
    for n in 3..=40 {
        let q = equation_critical(&unit(n, 2.0, 0.0, 3.0))?;
        let nf = f64::from(n);
        worst = worst.max((q - (nf + 2.0) / (nf - 2.0)).abs());
    }
    Ok((
        qs == 3.0 && qe == 5.0 && worst <= 1e-12,
        format!("q_S = {qs}, q_E = {qe}, dev {worst:.1e}"),
    ))
}

fn counterexample() -> Result<(bool, String)> {
    let mut min = f64::INFINITY;
    for (n, p, gamma, q) in [
        (3, 2.0, 0.0, 4.0),
        (5, 3.0, 1.0, 8.0),
        (4, 1.5, 0.5, 3.0),
        (6, 2.5, 2.0, 12.0),
    ] {
        let params = unit(n, p, gamma, q);
        let k = build_counterexample(&params)?;
        for r in log_points(1e-3, 1e6, 2000) {
            min = min.min(counterexample_residual(&k, &params, r)?.residual);
        }
    }
    let k = build_counterexample(&unit(3, 2.0, 0.0, 4.0))?;
    let c = (2.0f64 / 9.0).cbrt();
    let exact =
        (k.epsilon - 1.0 / 3.0).abs() <= 1e-12 && (k.alpha - 2.0 / 3.0).abs() <= 1e-12 && (k.c - c).abs() <= 1e-12;
    Ok((
        exact && min >= 0.0,
        format!("constants exact: {exact}, min residual {min:.3e}"),
    ))
}

fn coefficient_root() -> Result<(bool, String)> {
    let mut worst = 0.0f64;
    for n in 2..=8u32 {
        for t in fractions(5) {
            let p = 1.1 + t * (f64::from(n) - 1.2);
            for gamma in [-0.5 * p, 0.0, 1.0, 3.0] {
                let base = unit(n, p, gamma, p);
                worst = worst.max(pohozaev_coefficient(&base.with_q(equation_critical(&base)?))?.abs());
            }
        }
    }
    Ok((worst <= 1e-12, format!("max |coefficient| at q_E {worst:.1e}")))
}

fn critical_trajectory() -> Result<(bool, String)> {
    let u0 = 3f64.powf(0.25);
    let traj = integrate_ivp(&IvpSpec::new(unit(3, 2.0, 0.0, 5.0), u0, Sign::EquationMinus, 1e4)?)?;
    let mut worst = 0.0f64;
    for r in log_points(traj.spec.delta0, 100.0, 1000) {
        let exact = u0 / (1.0 + r * r).sqrt();
        worst = worst.max((traj.u_at(r)? - exact).abs() / exact);
    }
    let outcome = classify_outcome(&traj);
    let ok = worst <= 1e-6 && matches!(outcome, Outcome::PositiveDecaying { .. });
    Ok((ok, format!("max rel err {worst:.1e}, {}", outcome.label())))
}

fn subcritical_crossing() -> Result<(bool, String)> {
    // For p = 2, q = 3 the scaling exponent is 1, so r_cross(u0) = r_cross(1) / u0.
    let params = unit(3, 2.0, 0.0, 3.0);
    let mut radii = Vec::new();
    for u0 in [0.5, 1.0, 2.0] {
        match classify_outcome(&integrate_ivp(&IvpSpec::new(params, u0, Sign::EquationMinus, 100.0)?)?) {
            Outcome::CrossesZero { r_cross } => radii.push(r_cross * u0),
            other => return Ok((false, format!("u0 = {u0}: {}", other.label()))),
        }
    }
    let spread = radii
        .iter()
        .map(|r| (r - radii[1]).abs() / radii[1])
        .fold(0.0, f64::max);
    let ok = spread <= 1e-6 && (radii[1] - 6.89685).abs() <= 1e-4;
    Ok((ok, format!("r_cross(1) = {:.6}, scaling spread {spread:.1e}", radii[1])))
}

fn pohozaev() -> Result<(bool, String)> {
    let traj = integrate_ivp(&IvpSpec::new(
        unit(3, 2.0, 0.0, 5.0),
        3f64.powf(0.25),
        Sign::EquationMinus,
        100.0,
    )?)?;
    let mut exact = 0.0f64;
    for r in [1.0, 5.0, 50.0] {
        exact = exact.max(pohozaev_residual(&traj, r)?.relative());
    }
    let traj = integrate_ivp(&IvpSpec::new(unit(3, 2.0, 0.0, 3.0), 1.0, Sign::EquationMinus, 100.0)?)?;
    let mut sub = 0.0f64;
    for r in [0.5, 2.0, 4.0, 6.5] {
        sub = sub.max(pohozaev_residual(&traj, r)?.relative());
    }
    Ok((
        exact <= 1e-6 && sub <= 1e-4,
        format!("critical {exact:.1e}, subcritical {sub:.1e}"),
    ))
}

fn hadamard() -> Result<(bool, String)> {
    let mut worst = 0.0f64;
    for (n, p) in [(3, 2.0), (3, 3.0), (2, 3.0), (5, 1.5), (4, 6.0)] {
        let op = Operator::new(n, p)?;
        let phi = PowerBarrier::through(0.5, 2.0, 7.0, 0.3, &op);
        let input = HadamardInput::new(0.5, 2.0, 7.0, 0.3, &op)?;
        for r in log_points(0.5, 7.0, 50) {
            worst = worst.max((hadamard_lower_bound(&input, r)? - phi.value(r)?).abs());
        }
    }
    let spec = IvpSpec::new(unit(3, 2.0, 0.0, 6.0), 1.0, Sign::EquationMinus, 1e4)?.with_tolerances(1e-12, 1e-14)?;
    let traj = integrate_ivp(&spec)?;
    let samples: Vec<(f64, f64)> = log_points(1e-4, traj.r_end(), 400)
        .map(|r| traj.u_at(r).map(|u| (r, u)))
        .collect::<Result<_>>()?;
    let mono = hadamard_monotonicity_check(&samples, Operator::new(3, 2.0)?.lambda())?;
    Ok((
        worst <= 1e-10 && mono.passed,
        format!("interpolant dev {worst:.1e}, min increment {:.1e}", mono.residual),
    ))
}

/// `(N, p, r_inner, r_outer, u_inner, u_outer, exact)`.
type ClosedForm = (u32, f64, f64, f64, f64, f64, fn(f64) -> f64);

fn annulus() -> Result<(bool, String)> {
    let cases: [ClosedForm; 3] = [
        (3, 2.0, 1.0, 2.0, 1.0, 0.0, |r| 2.0 / r - 1.0),
        (3, 3.0, 1.0, 2.0, 1.0, 0.0, |r| (r / 2.0).ln() / 0.5f64.ln()),
        (2, 3.0, 1.0, 4.0, 0.0, 1.0, |r| r.sqrt() - 1.0),
    ];
    let mut worst = 0.0f64;
    for (n, p, a, b, ua, ub, exact) in cases {
        let sol = solve_annulus_dirichlet(&AnnulusProblem::new(
            Operator::new(n, p)?,
            a,
            b,
            (ua, ub),
            Rhs::Zero,
            512,
        )?)?;
        for (r, u) in sol.profile.iter() {
            worst = worst.max((u - exact(r)).abs());
        }
    }
    Ok((worst <= 1e-6, format!("max err {worst:.1e}")))
}

fn recursion() -> Result<(bool, String)> {
    let (mut total, mut bad) = (0, 0);
    for i in 0..10 {
        let c = 0.5 + 9.5 * f64::from(i) / 9.0;
        for j in 0..10 {
            let k = 1.1 + 3.9 * f64::from(j) / 9.0;
            for phi0 in [0.1, 0.5, 1.0, 3.0, 10.0] {
                for n in 1..=30 {
                    total += 1;
                    if !moser_recursion_bound(&RecursionSpec::new(c, k, phi0, n)?).passed {
                        bad += 1;
                    }
                }
            }
        }
    }
    Ok((bad == 0, format!("{bad}/{total} grid points exceed the bound")))
}

fn fd_dev<P: RadialProfile>(profile: &P, op: &Operator, r: f64, closed: f64) -> Result<f64> {
    let h = fd_step(r);
    let fd = (4.0 * p_laplacian_fd(profile, r, op, h / 2.0)? - p_laplacian_fd(profile, r, op, h)?) / 3.0;
    let pt = profile.eval(r)?;
    let p = op.p;
    let terms = pt.d1.abs().powf(p - 2.0) * ((p - 1.0) * pt.d2.abs() + (op.n() - 1.0).max(1.0) * pt.d1.abs() / r);
    Ok((closed - fd).abs() / closed.abs().max(terms))
}

fn finite_differences() -> Result<(bool, String)> {
    let mut worst = 0.0f64;
    for t in fractions(10) {
        let op = Operator::new(3, 1.5 + 2.0 * t)?;
        let cb = CutoffBarrier::new(1.0, 1.0, 2.0, 3, op.p)?;
        let r = 1.2 + 0.7 * t;
        worst = worst.max(fd_dev(&cb, &op, r, -cutoff_barrier_plap(&cb, &op, r))?);

        let op = Operator::new(5, 1.5 + 2.5 * t)?;
        let beta = if op.p > 2.0 { 0.5 / (op.p - 1.0) } else { 1.0 };
        let lb = LogBarrier::new(1.0, 0.0, beta, &op)?;
        let r = (3.0 * beta / op.lambda().abs()).exp().max(1.5) * (1.0 + 9.0 * t);
        worst = worst.max(fd_dev(&lb, &op, r, log_barrier_plap(&lb, &op, r)?)?);

        let params = unit(4, 2.0, 0.5, 4.0 + 4.0 * t);
        let k = build_counterexample(&params)?;
        let r = 0.1 + 10.0 * t;
        worst = worst.max(fd_dev(
            &k.profile(),
            &params.operator(),
            r,
            -counterexample_neg_plap(&k, &params.operator(), r)?,
        )?);
    }
    let op = Operator::new(3, 2.0)?;
    let cb = CutoffBarrier::new(1.0, 1.0, 2.0, 3, 2.0)?;
    let bound = cutoff_upper_bound(&cb, &op);
    let sup = fractions(200)
        .map(|t| cutoff_barrier_plap(&cb, &op, 1.0 + t))
        .fold(f64::NEG_INFINITY, f64::max);
    Ok((
        worst <= 1e-6 && sup <= bound,
        format!("max rel dev {worst:.1e}, cutoff sup/bound {:.4}", sup / bound),
    ))
}

fn blow_up() -> Result<(bool, String)> {
    let traj = integrate_ivp(&IvpSpec::new(unit(3, 2.0, 0.0, 3.0), 1.0, Sign::EquationPlus, 100.0)?)?;
    let outcome = classify_outcome(&traj);
    let mut worst = 0.0f64;
    let op = Operator::new(3, 2.5)?;
    let profile = FnProfile(|r: f64| {
        let e = (-r).exp();
        (e, -e, e)
    });
    for alpha in [1.0, 2.0, 3.0] {
        for r in [0.3, 1.0, 2.0, 4.0] {
            worst = worst.max(power_transform_residual(&profile, alpha, r, &op)?.relative());
        }
    }
    let ok = matches!(outcome, Outcome::BlowsUp { .. }) && worst <= 1e-8;
    Ok((
        ok,
        format!(
            "{} at r = {:?}, power transform {worst:.1e}",
            outcome.label(),
            outcome.event_radius()
        ),
    ))
}

fn scaling() -> Result<(bool, String)> {
    let lam = 2.0f64;
    let mut worst = 0.0f64;
    for params in [unit(4, 2.5, 0.5, 3.0), unit(3, 2.0, 0.0, 7.0)] {
        let e = scaling_exponent(&params);
        let t1 = integrate_ivp(&IvpSpec::new(params, 1.0, Sign::EquationMinus, 20.0)?)?;
        let t2 = integrate_ivp(&IvpSpec::new(params, lam.powf(e), Sign::EquationMinus, 10.0)?)?;
        let reach = t2.r_end().min(t1.r_end() / lam);
        for r in log_points(1e-3 * reach, reach, 100) {
            let u = t1.u_at(lam * r)?;
            if u > 1e-2 {
                worst = worst.max((t2.u_at(r)? - lam.powf(e) * u).abs() / (lam.powf(e) * u));
            }
        }
    }
    Ok((worst <= 1e-6, format!("max rel dev {worst:.1e}")))
}
