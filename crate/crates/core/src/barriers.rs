//! Explicit barriers and the supersolution counterexample, together with the
//! Hadamard three-sphere interpolation for sphere minima of supersolutions.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::exponents::{serrin_critical, Operator, ProblemParams};
use crate::radial::{Counterexample, CutoffBarrier, Kernel, LogBarrier, RadialProfile};
use crate::report::IdentityReport;

/// Default tolerance on increments of `m(r) r^(-lambda)`.
pub const MONOTONICITY_TOL: f64 = 1e-8;

/// `epsilon`, `alpha`, `c` of the profile `c (1 + r)^(-alpha)` that is a
/// positive supersolution of `-Delta_p u >= a r^gamma u^q` for `q` above the
/// Serrin exponent.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CounterexampleConstants {
    pub epsilon: f64,
    pub alpha: f64,
    pub c: f64,
}

impl CounterexampleConstants {
    pub fn profile(&self) -> Counterexample {
        Counterexample {
            c: self.c,
            alpha: self.alpha,
        }
    }
}

/// Solves `q = (N + gamma - eps)(p - 1) / (N - p - eps)` for `eps`, then sets
/// `alpha = (N - p - eps)/(p - 1)` and `c^(q-p+1) = alpha^(p-1) eps / a`.
///
/// The bracket of `-Delta_p Gamma` tends to `N - 1 - (alpha+1)(p-1) = eps`
/// at infinity, so `eps` (not `eps + gamma`) is the largest admissible
/// constant once `gamma > 0`.
pub fn build_counterexample(params: &ProblemParams) -> Result<CounterexampleConstants> {
    let q_s = serrin_critical(params)?;
    if params.gamma < 0.0 {
        return Err(Error::NegativeWeightExponent(params.gamma));
    }
    let (n, p, g, q) = (f64::from(params.n_dim), params.p, params.gamma, params.q);
    if !(q > q_s) {
        return Err(Error::NotSupercritical { q, q_serrin: q_s });
    }
    let epsilon = (q * (n - p) - (n + g) * (p - 1.0)) / (q - (p - 1.0));
    let alpha = (n - p - epsilon) / (p - 1.0);
    let c = (alpha.powf(p - 1.0) * epsilon / params.amplitude).powf(1.0 / (q - p + 1.0));
    Ok(CounterexampleConstants { epsilon, alpha, c })
}

/// `-Delta_p` of `c (1+r)^(-alpha)` in closed form, written as
/// `(c alpha)^(p-1) (1+r)^(-(alpha+1)(p-1)-1) [(N-1)/r + N-1-(alpha+1)(p-1)]`.
pub fn counterexample_neg_plap(consts: &CounterexampleConstants, op: &Operator, r: f64) -> Result<f64> {
    if r == 0.0 {
        return Err(Error::OriginSingularity);
    }
    if !(r > 0.0) {
        return Err(Error::Domain {
            r,
            what: "counterexample needs r > 0",
        });
    }
    let (n1, p, a) = (op.n() - 1.0, op.p, consts.alpha);
    let bracket = n1 / r + (n1 - (a + 1.0) * (p - 1.0));
    Ok((consts.c * a).powf(p - 1.0) * (1.0 + r).powf(-(a + 1.0) * (p - 1.0) - 1.0) * bracket)
}

/// `-Delta_p Gamma - a r^gamma Gamma^q`; nonnegative wherever the
/// construction is valid.
pub fn counterexample_residual(
    consts: &CounterexampleConstants,
    params: &ProblemParams,
    r: f64,
) -> Result<IdentityReport> {
    let lhs = counterexample_neg_plap(consts, &params.operator(), r)?;
    let gamma_r = consts.profile().value(r)?;
    let rhs = params.amplitude * r.powf(params.gamma) * gamma_r.powf(params.q);
    let residual = lhs - rhs;
    Ok(IdentityReport {
        lhs,
        rhs,
        residual,
        scale: lhs.abs().max(rhs.abs()),
        passed: residual >= 0.0,
    })
}

/// `-Delta_p zeta` for the cutoff barrier via the chain rule:
/// `A^(p-1) s^(k(p-1)-1) [k(p-1) + (N-1) s / r]` with `s = (r - r1)_+` and
/// `A = m1 (k+1) / (R - r1)^(k+1)`.
pub fn cutoff_barrier_plap(spec: &CutoffBarrier, op: &Operator, r: f64) -> f64 {
    cutoff_with_bracket(spec, op, r, f64::from(spec.k) * (op.p - 1.0))
}

/// Same expression with the constant `2(p-1)` in the bracket, as the
/// formula is usually printed. Agrees with [`cutoff_barrier_plap`] only for
/// `k = 2`, which is not admissible.
pub fn cutoff_barrier_plap_printed(spec: &CutoffBarrier, op: &Operator, r: f64) -> f64 {
    cutoff_with_bracket(spec, op, r, 2.0 * (op.p - 1.0))
}

fn cutoff_with_bracket(spec: &CutoffBarrier, op: &Operator, r: f64, lead: f64) -> f64 {
    let s = (r - spec.r1).max(0.0);
    if s == 0.0 {
        return 0.0;
    }
    let p = op.p;
    let k = f64::from(spec.k);
    spec.slope_coefficient().powf(p - 1.0) * s.powf(k * (p - 1.0) - 1.0) * (lead + (op.n() - 1.0) * s / r)
}

/// `(k+1)^(p-1) (N + 2p - 3) m1^(p-1) (R - r1)^(-p)`.
pub fn cutoff_upper_bound(spec: &CutoffBarrier, op: &Operator) -> f64 {
    let p = op.p;
    (f64::from(spec.k) + 1.0).powf(p - 1.0)
        * (op.n() + 2.0 * p - 3.0)
        * spec.m1.powf(p - 1.0)
        * (spec.r_big - spec.r1).powf(-p)
}

/// `sup` of [`cutoff_barrier_plap`] over `(r1, R)`, attained as `r -> R`
/// because both factors increase in `r`.
pub fn cutoff_plap_supremum(spec: &CutoffBarrier, op: &Operator) -> f64 {
    cutoff_barrier_plap(spec, op, spec.r_big)
}

/// `Delta_p psi` for `psi = gamma1 r^lambda log^beta r + gamma2`:
///
/// ```text
///   gamma1^(p-1) r^(-N) |lambda L^beta + beta L^(beta-1)|^(p-2)
///       [(p-1) beta (beta-1) L^(beta-2) + beta (p-N) L^(beta-1)],   L = log r.
/// ```
pub fn log_barrier_plap(spec: &LogBarrier, op: &Operator, r: f64) -> Result<f64> {
    if !(r > 1.0) {
        return Err(Error::Domain {
            r,
            what: "log barrier needs r > 1",
        });
    }
    if op.is_low_dimension() {
        return Err(Error::DimensionRegime {
            n_dim: op.n_dim,
            p: op.p,
        });
    }
    let (p, b, l) = (op.p, spec.beta, spec.lambda);
    let lg = r.ln();
    let grad = l * lg.powf(b) + b * lg.powf(b - 1.0);
    let bracket = (p - 1.0) * b * (b - 1.0) * lg.powf(b - 2.0) + b * (p - op.n()) * lg.powf(b - 1.0);
    Ok(spec.gamma1.powf(p - 1.0) * r.powf(-op.n()) * grad.abs().powf(p - 2.0) * bracket)
}

/// Smallest `K` with `Delta_p psi >= -gamma1^(p-1) K r^(-N) (log r)^(beta(p-1)-1)`
/// on `n` log-spaced radii of `[r_lo, r_hi]`.
pub fn log_barrier_bound_constant(spec: &LogBarrier, op: &Operator, r_lo: f64, r_hi: f64, n: usize) -> Result<f64> {
    let p = op.p;
    let mut worst = f64::NEG_INFINITY;
    for r in log_space(r_lo, r_hi, n) {
        let lap = log_barrier_plap(spec, op, r)?;
        let shape = spec.gamma1.powf(p - 1.0) * r.powf(-op.n()) * r.ln().powf(spec.beta * (p - 1.0) - 1.0);
        worst = worst.max(-lap / shape);
    }
    Ok(worst)
}

pub(crate) fn log_space(lo: f64, hi: f64, n: usize) -> impl Iterator<Item = f64> {
    let (a, b) = (lo.ln(), hi.ln());
    let last = (n.max(2) - 1) as f64;
    (0..n).map(move |i| (a + (b - a) * i as f64 / last).exp())
}

/// Sphere minima at two radii plus the kernel used to interpolate them.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HadamardInput {
    pub r1: f64,
    pub r2: f64,
    pub m1: f64,
    pub m2: f64,
    pub kernel: Kernel,
}

impl HadamardInput {
    pub fn new(r1: f64, m1: f64, r2: f64, m2: f64, op: &Operator) -> Result<Self> {
        if !(r1 > 0.0 && r1 < r2) {
            return Err(Error::InvalidParams(format!("need 0 < r1 < r2, got {r1}, {r2}")));
        }
        if !(m1 >= 0.0 && m2 >= 0.0) {
            return Err(Error::InvalidParams(format!("minima must be >= 0, got {m1}, {m2}")));
        }
        Ok(Self {
            r1,
            r2,
            m1,
            m2,
            kernel: Kernel::for_operator(op),
        })
    }
}

/// The p-harmonic interpolant of `(r1, m1)` and `(r2, m2)` evaluated at `r`,
/// which bounds the sphere minimum `m(r)` of a nonnegative supersolution from
/// below.
pub fn hadamard_lower_bound(input: &HadamardInput, r: f64) -> Result<f64> {
    let HadamardInput { r1, r2, m1, m2, kernel } = *input;
    if !(r >= r1 && r <= r2) {
        return Err(Error::Range { r, lo: r1, hi: r2 });
    }
    Ok(match kernel {
        Kernel::Power(l) => {
            let (a, b, x) = (r1.powf(l), r2.powf(l), r.powf(l));
            (m1 * (x - b) + m2 * (a - x)) / (a - b)
        }
        Kernel::Log => (m1 * (r / r2).ln() + m2 * (r1 / r).ln()) / (r1 / r2).ln(),
    })
}

pub fn hadamard_monotonicity_check(samples: &[(f64, f64)], lambda: f64) -> Result<IdentityReport> {
    hadamard_monotonicity_check_tol(samples, lambda, MONOTONICITY_TOL)
}

/// Smallest increment of `g(r) = m(r) r^(-lambda)` between consecutive
/// samples. For `lambda < 0` a nonnegative supersolution makes `g`
/// nondecreasing.
pub fn hadamard_monotonicity_check_tol(samples: &[(f64, f64)], lambda: f64, tol: f64) -> Result<IdentityReport> {
    if !(lambda < 0.0) {
        return Err(Error::Regime(lambda));
    }
    if samples.len() < 2 || samples.windows(2).any(|w| !(w[1].0 > w[0].0)) {
        return Err(Error::InvalidParams(
            "need at least two samples sorted by increasing r".into(),
        ));
    }
    let g: Vec<f64> = samples.iter().map(|&(r, m)| m * r.powf(-lambda)).collect();
    let min_inc = g.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min);
    let scale = g.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
    Ok(IdentityReport {
        lhs: min_inc,
        rhs: 0.0,
        residual: min_inc,
        scale,
        passed: min_inc >= -tol,
    })
}
