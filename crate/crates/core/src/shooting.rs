//! Shooting from the origin for radial solutions of
//! `-(r^(N-1) |u'|^(p-2) u')' = +- a r^(N-1+gamma) u^q`, `u(0) = u0`, `u'(0) = 0`.
//!
//! The state is `(u, w)` with `w = r^(N-1) |u'|^(p-2) u'`, which stays
//! regular where `u'` vanishes. Integration starts at a small radius `delta0`
//! from the leading terms of the origin series.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::exponents::{pohozaev_coefficient, ProblemParams};
use crate::ode::{self, Control, DenseStep, Termination};
use crate::quad;
use crate::report::IdentityReport;

/// Trajectories stop once `u` exceeds this multiple of `u0`.
pub const BLOWUP_FACTOR: f64 = 1e8;
/// Relative precision of crossing and blow-up radii.
pub const EVENT_REL_TOL: f64 = 1e-10;
/// Slack allowed on fitted tail exponents.
pub const SLOPE_TOL: f64 = 0.05;

const TAIL_SAMPLES: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Sign {
    /// `-Delta_p u = a r^gamma u^q`
    EquationMinus,
    /// `Delta_p u = a r^gamma u^q`
    EquationPlus,
}

impl Sign {
    fn factor(self) -> f64 {
        match self {
            Sign::EquationMinus => -1.0,
            Sign::EquationPlus => 1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IvpSpec {
    pub params: ProblemParams,
    pub u0: f64,
    pub sign: Sign,
    pub r_max: f64,
    pub rtol: f64,
    pub atol: f64,
    pub delta0: f64,
}

impl IvpSpec {
    /// Default tolerances `1e-10` / `1e-12` and `delta0 = 1e-6 min(1, r_max)`.
    pub fn new(params: ProblemParams, u0: f64, sign: Sign, r_max: f64) -> Result<Self> {
        let spec = Self {
            params,
            u0,
            sign,
            r_max,
            rtol: 1e-10,
            atol: 1e-12,
            delta0: 1e-6 * r_max.min(1.0),
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn with_tolerances(self, rtol: f64, atol: f64) -> Result<Self> {
        let spec = Self { rtol, atol, ..self };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        self.params.validate()?;
        let bad = |m: String| Err(Error::InvalidParams(m));
        if !(self.u0.is_finite() && self.u0 > 0.0) {
            return bad(format!("u0 must be > 0, got {}", self.u0));
        }
        if !(self.r_max.is_finite() && self.r_max > 0.0) {
            return bad(format!("r_max must be > 0, got {}", self.r_max));
        }
        if !(self.delta0 > 0.0 && self.delta0 < 1e-2 * self.r_max) {
            return bad(format!("delta0 must lie in (0, r_max/100), got {}", self.delta0));
        }
        if !(self.rtol > 0.0 && self.atol > 0.0) {
            return bad("rtol and atol must be > 0".into());
        }
        Ok(())
    }

    /// Leading-order `(u, w)` at small `r`.
    pub fn series(&self, r: f64) -> [f64; 2] {
        let ProblemParams {
            p, gamma, q, amplitude, ..
        } = self.params;
        let n = f64::from(self.params.n_dim);
        let s = self.sign.factor();
        let src = amplitude * self.u0.powf(q) / (n + gamma);
        let u = self.u0 + s * (p - 1.0) / (p + gamma) * src.powf(1.0 / (p - 1.0)) * r.powf((p + gamma) / (p - 1.0));
        let w = s * src * r.powf(n + gamma);
        [u, w]
    }

    fn rhs(&self, r: f64, y: &[f64; 2]) -> [f64; 2] {
        let ProblemParams {
            p, gamma, q, amplitude, ..
        } = self.params;
        let n1 = f64::from(self.params.n_dim) - 1.0;
        let (u, w) = (y[0], y[1]);
        let du = w.signum() * (w.abs() / r.powf(n1)).powf(1.0 / (p - 1.0));
        let dw = self.sign.factor() * amplitude * r.powf(n1 + gamma) * u.abs().powf(q - 1.0) * u;
        [du, dw]
    }

    fn du_from_w(&self, r: f64, w: f64) -> f64 {
        let n1 = f64::from(self.params.n_dim) - 1.0;
        w.signum() * (w.abs() / r.powf(n1)).powf(1.0 / (self.params.p - 1.0))
    }
}

/// Why integration ended.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum Event {
    ReachedEnd,
    Crossing(f64),
    Threshold(f64),
    StepCollapse(f64),
    MaxSteps(f64),
}

#[derive(Debug, Clone)]
pub struct Trajectory {
    pub spec: IvpSpec,
    pub r: Vec<f64>,
    pub u: Vec<f64>,
    pub w: Vec<f64>,
    pub event: Event,
    steps: Vec<DenseStep<2>>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.r.len()
    }

    pub fn is_empty(&self) -> bool {
        self.r.is_empty()
    }

    pub fn r_end(&self) -> f64 {
        *self.r.last().expect("trajectory has its initial point")
    }

    /// `u'` at the stored points.
    pub fn du(&self) -> Vec<f64> {
        self.r
            .iter()
            .zip(&self.w)
            .map(|(&r, &w)| self.spec.du_from_w(r, w))
            .collect()
    }

    /// `(u, w)` anywhere on `[0, r_end]`; the series covers `[0, delta0)`.
    pub fn state_at(&self, r: f64) -> Result<[f64; 2]> {
        let lo = self.r[0];
        let hi = self.r_end();
        if !(r >= 0.0 && r <= hi) {
            return Err(Error::Range { r, lo: 0.0, hi });
        }
        if r < lo {
            return Ok(self.spec.series(r));
        }
        let i = self.steps.partition_point(|s| s.t1() < r);
        Ok(match self.steps.get(i) {
            Some(step) => step.eval(r),
            None => [*self.u.last().unwrap(), *self.w.last().unwrap()],
        })
    }

    pub fn u_at(&self, r: f64) -> Result<f64> {
        Ok(self.state_at(r)?[0])
    }

    pub fn du_at(&self, r: f64) -> Result<f64> {
        if r == 0.0 {
            return Ok(0.0);
        }
        let [_, w] = self.state_at(r)?;
        Ok(self.spec.du_from_w(r, w))
    }

    /// `int_0^r f(s, u(s)) ds` by Gauss-Kronrod on each dense step.
    pub fn integral_from_origin<F: Fn(f64, f64) -> f64>(&self, r: f64, f: F) -> Result<f64> {
        if !(r >= 0.0 && r <= self.r_end()) {
            return Err(Error::Range {
                r,
                lo: 0.0,
                hi: self.r_end(),
            });
        }
        let (abs_tol, rel_tol) = (1e-300, 1e-13);
        let d0 = self.r[0].min(r);
        let mut total = quad::integrate(|s| f(s, self.spec.series(s)[0]), 0.0, d0, abs_tol, rel_tol);
        for step in &self.steps {
            if step.t0 >= r {
                break;
            }
            let b = step.t1().min(r);
            total += quad::integrate(|s| f(s, step.eval(s)[0]), step.t0, b, abs_tol, rel_tol);
        }
        Ok(total)
    }

    /// `w(r) -+ a int_0^r s^(N-1+gamma) u^q ds`, zero for exact solutions.
    pub fn conservation_residual(&self, r: f64) -> Result<IdentityReport> {
        let ProblemParams {
            n_dim,
            gamma,
            q,
            amplitude,
            ..
        } = self.spec.params;
        let e = f64::from(n_dim) - 1.0 + gamma;
        let integral = self.integral_from_origin(r, |s, u| s.powf(e) * u.abs().powf(q - 1.0) * u)?;
        let w = self.state_at(r)?[1];
        let rhs = self.spec.sign.factor() * amplitude * integral;
        Ok(IdentityReport::equality(
            w,
            rhs,
            w.abs().max(rhs.abs()),
            10.0 * self.spec.rtol,
        ))
    }
}

/// Integrates from `delta0` to `r_max`, stopping early at a sign change of
/// `u` (refined by bisection) or when `u` passes `BLOWUP_FACTOR * u0`.
pub fn integrate_ivp(spec: &IvpSpec) -> Result<Trajectory> {
    spec.validate()?;
    let opts = ode::Options {
        rtol: spec.rtol,
        atol: spec.atol,
        h_init: spec.delta0,
        ..ode::Options::default()
    };
    let y0 = spec.series(spec.delta0);
    let threshold = BLOWUP_FACTOR * spec.u0;
    let mut r = vec![spec.delta0];
    let mut u = vec![y0[0]];
    let mut w = vec![y0[1]];
    let mut steps: Vec<DenseStep<2>> = Vec::new();
    let mut event = None;

    let term = ode::integrate(
        |t, y: &[f64; 2]| spec.rhs(t, y),
        spec.delta0,
        y0,
        spec.r_max,
        &opts,
        |step| {
            let target = if step.y1[0] <= 0.0 {
                Some((0.0, true))
            } else if step.y1[0] >= threshold {
                Some((threshold, false))
            } else {
                None
            };
            let mut step = *step;
            let stop = if let Some((level, crossing)) = target {
                let root = ode::bisect(|s| step.eval(s)[0] - level, step.t0, step.t1(), EVENT_REL_TOL);
                let y = step.eval(root);
                step.y1 = y;
                r.push(root);
                u.push(if crossing { 0.0 } else { y[0] });
                w.push(y[1]);
                event = Some(if crossing {
                    Event::Crossing(root)
                } else {
                    Event::Threshold(root)
                });
                true
            } else {
                r.push(step.t1());
                u.push(step.y1[0]);
                w.push(step.y1[1]);
                false
            };
            steps.push(step);
            if stop {
                Control::Stop
            } else {
                Control::Continue
            }
        },
    );
    let event = event.unwrap_or(match term {
        Termination::Reached(_) | Termination::Stopped(_) => Event::ReachedEnd,
        Termination::StepCollapse(t) => Event::StepCollapse(t),
        Termination::MaxSteps(t) => Event::MaxSteps(t),
    });
    // The last step may overshoot the bracketed root; clip it.
    if let Some(last) = steps.last_mut() {
        let end = *r.last().unwrap();
        if last.t1() > end {
            last.h = end - last.t0;
        }
    }
    Ok(Trajectory {
        spec: *spec,
        r,
        u,
        w,
        event,
        steps,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum Outcome {
    CrossesZero { r_cross: f64 },
    PositiveDecaying { tail_slope: f64 },
    BlowsUp { r_blow: f64 },
    Indeterminate { reason: String },
}

impl Outcome {
    pub fn label(&self) -> &'static str {
        match self {
            Outcome::CrossesZero { .. } => "crosses_zero",
            Outcome::PositiveDecaying { .. } => "positive_decaying",
            Outcome::BlowsUp { .. } => "blows_up",
            Outcome::Indeterminate { .. } => "indeterminate",
        }
    }

    /// The radius tied to the outcome, if any.
    pub fn event_radius(&self) -> Option<f64> {
        match *self {
            Outcome::CrossesZero { r_cross } => Some(r_cross),
            Outcome::BlowsUp { r_blow } => Some(r_blow),
            _ => None,
        }
    }

    pub fn tail_slope(&self) -> Option<f64> {
        match *self {
            Outcome::PositiveDecaying { tail_slope } => Some(tail_slope),
            _ => None,
        }
    }
}

pub fn classify_outcome(traj: &Trajectory) -> Outcome {
    let indeterminate = |reason: String| Outcome::Indeterminate { reason };
    match traj.event {
        Event::Crossing(r_cross) => Outcome::CrossesZero { r_cross },
        Event::Threshold(r_blow) => Outcome::BlowsUp { r_blow },
        Event::StepCollapse(r) => {
            let rising = traj.spec.sign == Sign::EquationPlus && traj.w.last().is_some_and(|&w| w > 0.0);
            if rising {
                Outcome::BlowsUp { r_blow: r }
            } else {
                indeterminate(format!("step size collapsed at r = {r}"))
            }
        }
        Event::MaxSteps(r) => indeterminate(format!("step budget exhausted at r = {r}")),
        Event::ReachedEnd => {
            let r_max = traj.r_end();
            let window = traj
                .r
                .iter()
                .zip(&traj.u)
                .zip(&traj.w)
                .filter(|((&r, _), _)| r >= r_max / 10.0);
            let mut ok = traj.u.iter().all(|&u| u > 0.0);
            for ((_, &u), &w) in window {
                ok &= u > 0.0 && w < 0.0;
            }
            if !ok {
                return indeterminate("not positive and decreasing over the final decade".into());
            }
            match tail_slopes(traj) {
                Ok((s, _)) if s < 0.0 => Outcome::PositiveDecaying { tail_slope: s },
                Ok((s, _)) => indeterminate(format!("tail slope {s} is not negative")),
                Err(e) => indeterminate(e.to_string()),
            }
        }
    }
}

fn fit_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    sxy / sxx
}

/// Log-log slopes of `u` and `|u'|` over `[r_end/10, r_end]`.
fn tail_slopes(traj: &Trajectory) -> Result<(f64, f64)> {
    let hi = traj.r_end();
    let lo = (hi / 10.0).max(traj.r[0]);
    let mut lr = Vec::with_capacity(TAIL_SAMPLES);
    let mut lu = Vec::with_capacity(TAIL_SAMPLES);
    let mut ld = Vec::with_capacity(TAIL_SAMPLES);
    for i in 0..TAIL_SAMPLES {
        let r = (lo.ln() + (hi / lo).ln() * i as f64 / (TAIL_SAMPLES - 1) as f64)
            .exp()
            .min(hi);
        let u = traj.u_at(r)?;
        let du = traj.du_at(r)?;
        if !(u > 0.0 && du < 0.0) {
            return Err(Error::NotDecaying);
        }
        lr.push(r.ln());
        lu.push(u.ln());
        ld.push((-du).ln());
    }
    Ok((fit_slope(&lr, &lu), fit_slope(&lr, &ld)))
}

/// Fitted tail exponents of `u` and `|u'|` against the a priori bounds
/// `(gamma+p)/(p-1-q)` and `(gamma+q+1)/(p-1-q)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DecayReport {
    pub u: IdentityReport,
    pub du: IdentityReport,
    pub passed: bool,
}

pub fn decay_slope_report(traj: &Trajectory) -> Result<DecayReport> {
    decay_slope_report_tol(traj, SLOPE_TOL)
}

pub fn decay_slope_report_tol(traj: &Trajectory, slope_tol: f64) -> Result<DecayReport> {
    if !matches!(classify_outcome(traj), Outcome::PositiveDecaying { .. }) {
        return Err(Error::NotDecaying);
    }
    let (su, sd) = tail_slopes(traj)?;
    let ProblemParams { p, gamma, q, .. } = traj.spec.params;
    let bound = |slope: f64, target: f64| IdentityReport {
        lhs: slope,
        rhs: target,
        residual: slope - target,
        scale: target.abs(),
        passed: slope <= target + slope_tol,
    };
    let u = bound(su, (gamma + p) / (p - 1.0 - q));
    let du = bound(sd, (gamma + q + 1.0) / (p - 1.0 - q));
    Ok(DecayReport {
        u,
        du,
        passed: u.passed && du.passed,
    })
}

/// Tolerance on `|residual| / scale` used for the `passed` flag of
/// [`pohozaev_residual`].
pub const POHOZAEV_TOL: f64 = 1e-6;

/// Radial Pohozaev identity at `R = r_eval`:
///
/// ```text
///   (N - p - (gamma+N) p/(q+1)) a int_0^R r^(gamma+N-1) u^(q+1) dr
///     = (N-p) |u'|^(p-1) u R^(N-1) + (1-p) |u'|^p R^N - a p/(q+1) R^(gamma+N) u^(q+1)
/// ```
pub fn pohozaev_residual(traj: &Trajectory, r_eval: f64) -> Result<IdentityReport> {
    pohozaev_residual_tol(traj, r_eval, POHOZAEV_TOL)
}

pub fn pohozaev_residual_tol(traj: &Trajectory, r_eval: f64, tol: f64) -> Result<IdentityReport> {
    if traj.spec.sign != Sign::EquationMinus {
        return Err(Error::InvalidParams(
            "the Pohozaev identity applies to -Delta_p u = a r^gamma u^q".into(),
        ));
    }
    if let Event::Crossing(rc) = traj.event {
        if r_eval >= rc {
            return Err(Error::CrossedZero(rc));
        }
    }
    if !(r_eval > 0.0 && r_eval <= traj.r_end()) {
        return Err(Error::Range {
            r: r_eval,
            lo: 0.0,
            hi: traj.r_end(),
        });
    }
    let params = traj.spec.params;
    let ProblemParams {
        p, gamma, q, amplitude, ..
    } = params;
    let n = f64::from(params.n_dim);
    let coef = pohozaev_coefficient(&params)?;
    let integral = amplitude * traj.integral_from_origin(r_eval, |s, u| s.powf(gamma + n - 1.0) * u.powf(q + 1.0))?;
    let u = traj.u_at(r_eval)?;
    let g = traj.du_at(r_eval)?.abs();
    let lhs = coef * integral;
    let rhs = (n - p) * g.powf(p - 1.0) * u * r_eval.powf(n - 1.0) + (1.0 - p) * g.powf(p) * r_eval.powf(n)
        - amplitude * p / (q + 1.0) * r_eval.powf(gamma + n) * u.powf(q + 1.0);
    let scale = lhs.abs().max(rhs.abs()).max(integral.abs());
    Ok(IdentityReport::equality(lhs, rhs, scale, tol))
}

/// Exponent `(p + gamma)/(q - p + 1)` of the scaling
/// `u_l(r) = l^e u(l r)` that maps solutions to solutions.
pub fn scaling_exponent(params: &ProblemParams) -> f64 {
    (params.p + params.gamma) / (params.q - params.p + 1.0)
}
