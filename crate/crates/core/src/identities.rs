//! Two estimates behind the local Harnack machinery: the bound
//! `phi_n^(k^-n) <= c^(k/(k-1)^2) phi_0` for sequences with
//! `phi_n <= c^n phi_(n-1)^k`, and the Caccioppoli inequality
//! `int |grad u|^p zeta^p <= p^p int |u|^p |grad zeta|^p` for p-harmonic `u`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::exponents::Operator;
use crate::quad;
use crate::radial::{check_p_harmonic, RadialProfile};
use crate::report::IdentityReport;

/// Relative slack in the Caccioppoli comparison.
pub const CACCIOPPOLI_SLACK: f64 = 1e-8;
/// Relative tolerance for the p-harmonicity precondition.
pub const HARMONIC_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RecursionSpec {
    pub c: f64,
    pub k: f64,
    pub phi0: f64,
    pub n_max: u32,
}

impl RecursionSpec {
    pub fn new(c: f64, k: f64, phi0: f64, n_max: u32) -> Result<Self> {
        if !(c > 0.0 && phi0 > 0.0 && k > 1.0 && n_max >= 1) {
            return Err(Error::InvalidParams(format!(
                "need c > 0, k > 1, phi0 > 0, n_max >= 1; got c={c} k={k} phi0={phi0} n_max={n_max}"
            )));
        }
        Ok(Self { c, k, phi0, n_max })
    }

    /// `ln` of `c^(k/(k-1)^2) phi0`.
    pub fn log_bound(&self) -> f64 {
        self.k / (self.k - 1.0).powi(2) * self.c.ln() + self.phi0.ln()
    }

    /// `k^-n ln phi_n` for the extremal sequence `phi_n = c^n phi_(n-1)^k`,
    /// `n = 0..=n_max`, accumulated as `l_n = l_(n-1) + n k^-n ln c`.
    pub fn normalized_logs(&self) -> Vec<f64> {
        let lc = self.c.ln();
        let mut out = Vec::with_capacity(self.n_max as usize + 1);
        let mut l = self.phi0.ln();
        let mut kn = 1.0;
        out.push(l);
        for n in 1..=self.n_max {
            kn /= self.k;
            l += f64::from(n) * kn * lc;
            out.push(l);
        }
        out
    }
}

/// Checks the bound along the extremal sequence. `lhs`/`rhs` are the logs of
/// `phi_n^(k^-n)` and of the bound at the worst `n`; `residual = lhs - rhs`
/// and the check passes when it is `<= 0` up to a few ulps of `rhs`.
pub fn moser_recursion_bound(spec: &RecursionSpec) -> IdentityReport {
    let logs = spec.normalized_logs();
    bound_report(spec, &logs[1..])
}

/// Same check for an arbitrary positive sequence `ln phi_1, ..., ln phi_n`
/// that satisfies the recursion hypothesis. Fails with `InvalidParams`
/// when the hypothesis itself is violated.
pub fn recursion_bound_for_sequence(spec: &RecursionSpec, log_phi: &[f64]) -> Result<IdentityReport> {
    let lc = spec.c.ln();
    let mut prev = spec.phi0.ln();
    let mut normalized = Vec::with_capacity(log_phi.len());
    let mut kn = 1.0;
    for (i, &l) in log_phi.iter().enumerate() {
        let n = (i + 1) as f64;
        let allowed = n * lc + spec.k * prev;
        if l > allowed + 1e-12 * allowed.abs().max(1.0) {
            return Err(Error::InvalidParams(format!(
                "sequence breaks phi_n <= c^n phi_(n-1)^k at n = {}",
                i + 1
            )));
        }
        kn /= spec.k;
        normalized.push(l * kn);
        prev = l;
    }
    Ok(bound_report(spec, &normalized))
}

fn bound_report(spec: &RecursionSpec, normalized: &[f64]) -> IdentityReport {
    let rhs = spec.log_bound();
    let lhs = normalized.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let residual = lhs - rhs;
    IdentityReport {
        lhs,
        rhs,
        residual,
        scale: rhs.abs().max(1.0),
        passed: residual <= 8.0 * f64::EPSILON * rhs.abs().max(1.0),
    }
}

/// Piecewise-linear radial cutoff: `0` outside `(r_a, r_b)`, `1` on
/// `[r_in, r_out]`, linear in between. `r_in == r_out` gives a tent.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Cutoff {
    pub r_a: f64,
    pub r_in: f64,
    pub r_out: f64,
    pub r_b: f64,
}

impl Cutoff {
    pub fn new(r_a: f64, r_in: f64, r_out: f64, r_b: f64) -> Result<Self> {
        if !(r_a >= 0.0 && r_a < r_in && r_in <= r_out && r_out < r_b) {
            return Err(Error::InvalidParams(format!(
                "cutoff needs 0 <= r_a < r_in <= r_out < r_b, got {r_a}, {r_in}, {r_out}, {r_b}"
            )));
        }
        Ok(Self { r_a, r_in, r_out, r_b })
    }

    pub fn tent(r_a: f64, r_b: f64) -> Result<Self> {
        let m = 0.5 * (r_a + r_b);
        Self::new(r_a, m, m, r_b)
    }

    pub fn value(&self, r: f64) -> f64 {
        if r <= self.r_a || r >= self.r_b {
            0.0
        } else if r < self.r_in {
            (r - self.r_a) / (self.r_in - self.r_a)
        } else if r <= self.r_out {
            1.0
        } else {
            (self.r_b - r) / (self.r_b - self.r_out)
        }
    }

    pub fn slope(&self, r: f64) -> f64 {
        if r <= self.r_a || r >= self.r_b || (r >= self.r_in && r <= self.r_out) {
            0.0
        } else if r < self.r_in {
            1.0 / (self.r_in - self.r_a)
        } else {
            -1.0 / (self.r_b - self.r_out)
        }
    }

    fn breaks(&self) -> Vec<f64> {
        let mut b = vec![self.r_a, self.r_in, self.r_out, self.r_b];
        b.dedup();
        b
    }
}

/// Compares `int |u'|^p zeta^p r^(N-1)` with `p^p int |u|^p |zeta'|^p r^(N-1)`
/// for a p-harmonic radial `u`. The sphere measure cancels.
pub fn caccioppoli_check<P: RadialProfile + ?Sized>(
    profile: &P,
    op: &Operator,
    cutoff: &Cutoff,
) -> Result<IdentityReport> {
    let p = op.p;
    let n1 = op.n() - 1.0;
    for i in 0..=16 {
        let r = cutoff.r_a + (cutoff.r_b - cutoff.r_a) * (0.02 + 0.96 * f64::from(i) / 16.0);
        check_p_harmonic(profile, op, r, HARMONIC_TOL)?;
    }
    let mut failure = None;
    let mut guarded = |f: &dyn Fn(f64) -> Result<f64>, r: f64| match f(r) {
        Ok(v) => v,
        Err(e) => {
            failure.get_or_insert(e);
            0.0
        }
    };
    let breaks = cutoff.breaks();
    let lhs_int = |r: f64| -> Result<f64> {
        let pt = profile.eval(r)?;
        Ok(pt.d1.abs().powf(p) * cutoff.value(r).powf(p) * r.powf(n1))
    };
    let rhs_int = |r: f64| -> Result<f64> {
        let u = profile.value(r)?;
        Ok(u.abs().powf(p) * cutoff.slope(r).abs().powf(p) * r.powf(n1))
    };
    let lhs = quad::integrate_pieces(|r| guarded(&lhs_int, r), &breaks, 1e-300, 1e-12);
    let rhs_raw = quad::integrate_pieces(|r| guarded(&rhs_int, r), &breaks, 1e-300, 1e-12);
    if let Some(e) = failure {
        return Err(e);
    }
    let rhs = p.powf(p) * rhs_raw;
    Ok(IdentityReport {
        lhs,
        rhs,
        residual: lhs - rhs,
        scale: lhs.abs().max(rhs.abs()),
        passed: lhs <= rhs * (1.0 + CACCIOPPOLI_SLACK),
    })
}
