//! The p-Laplacian on radial functions and the catalog of closed-form radial
//! profiles it is evaluated on.
//!
//! For `v(x) = V(|x|)` with `V'(r) != 0`,
//!
//! ```text
//!     Delta_p v = |V'|^(p-2) ((p-1) V'' + (N-1)/r V')
//!               = r^(1-N) (r^(N-1) |V'|^(p-2) V')'
//! ```
//!
//! The first (expanded) form is [`p_laplacian_radial`]; the second
//! (conservative) form is discretised by [`p_laplacian_fd`] and serves as an
//! independent check on every closed form in the crate.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::exponents::Operator;
use crate::report::IdentityReport;

/// Gradients below `GRADIENT_FLOOR * max(1, |V''| r)` count as zero.
pub const GRADIENT_FLOOR: f64 = 1e-12;

/// Relative tolerance of [`power_transform_residual`].
pub const POWER_TRANSFORM_TOL: f64 = 1e-8;

/// Value and first two derivatives of a radial profile at `r`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EvalPoint {
    pub r: f64,
    pub value: f64,
    pub d1: f64,
    pub d2: f64,
}

/// Anything that can be sampled as a `C^2` function of the radius.
pub trait RadialProfile {
    fn eval(&self, r: f64) -> Result<EvalPoint>;

    fn value(&self, r: f64) -> Result<f64> {
        self.eval(r).map(|pt| pt.value)
    }
}

/// The radial fundamental-solution kernel: `r^lambda`, or `log r` when `N = p`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum Kernel {
    Power(f64),
    Log,
}

impl Kernel {
    pub fn for_operator(op: &Operator) -> Self {
        if op.is_log_case() {
            Kernel::Log
        } else {
            Kernel::Power(op.lambda())
        }
    }

    /// `(k(r), k'(r), k''(r))`.
    fn eval(&self, r: f64) -> (f64, f64, f64) {
        match *self {
            Kernel::Power(l) => {
                let v = r.powf(l);
                (v, l * v / r, l * (l - 1.0) * v / (r * r))
            }
            Kernel::Log => (r.ln(), 1.0 / r, -1.0 / (r * r)),
        }
    }
}

/// `c2 k(r) + c1`, p-harmonic away from the origin.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PowerBarrier {
    pub c2: f64,
    pub c1: f64,
    pub kernel: Kernel,
}

impl PowerBarrier {
    pub fn new(c2: f64, c1: f64, op: &Operator) -> Self {
        Self {
            c2,
            c1,
            kernel: Kernel::for_operator(op),
        }
    }

    /// The p-harmonic profile taking `u_a` at `r_a` and `u_b` at `r_b`.
    pub fn through(r_a: f64, u_a: f64, r_b: f64, u_b: f64, op: &Operator) -> Self {
        let kernel = Kernel::for_operator(op);
        let (ka, kb) = (kernel.eval(r_a).0, kernel.eval(r_b).0);
        let c2 = (u_a - u_b) / (ka - kb);
        Self {
            c2,
            c1: u_a - c2 * ka,
            kernel,
        }
    }
}

impl RadialProfile for PowerBarrier {
    fn eval(&self, r: f64) -> Result<EvalPoint> {
        if !(r > 0.0) {
            return Err(Error::Domain {
                r,
                what: "power barrier needs r > 0",
            });
        }
        let (k, k1, k2) = self.kernel.eval(r);
        Ok(EvalPoint {
            r,
            value: self.c2 * k + self.c1,
            d1: self.c2 * k1,
            d2: self.c2 * k2,
        })
    }
}

/// `gamma1 r^lambda log^beta r + gamma2` on `r > 1`, the barrier used at the
/// Serrin exponent itself.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LogBarrier {
    pub gamma1: f64,
    pub gamma2: f64,
    pub beta: f64,
    pub lambda: f64,
}

impl LogBarrier {
    pub fn new(gamma1: f64, gamma2: f64, beta: f64, op: &Operator) -> Result<Self> {
        if !(gamma1 > 0.0 && gamma2 >= 0.0 && beta > 0.0) {
            return Err(Error::InvalidParams(format!(
                "log barrier needs gamma1 > 0, gamma2 >= 0, beta > 0 (got {gamma1}, {gamma2}, {beta})"
            )));
        }
        if op.is_low_dimension() {
            return Err(Error::DimensionRegime {
                n_dim: op.n_dim,
                p: op.p,
            });
        }
        Ok(Self {
            gamma1,
            gamma2,
            beta,
            lambda: op.lambda(),
        })
    }

    /// Admissible `beta` range: `(0, 1/(p-1))` for `p > 2`, the single value
    /// `1` for `p <= 2`.
    pub fn beta_admissible(beta: f64, p: f64) -> bool {
        if p > 2.0 {
            beta > 0.0 && beta < 1.0 / (p - 1.0)
        } else {
            beta == 1.0
        }
    }
}

impl RadialProfile for LogBarrier {
    fn eval(&self, r: f64) -> Result<EvalPoint> {
        if !(r > 1.0) {
            return Err(Error::Domain {
                r,
                what: "log barrier needs r > 1",
            });
        }
        let (l, b) = (self.lambda, self.beta);
        let lg = r.ln();
        let lb = lg.powf(b);
        let lb1 = lg.powf(b - 1.0);
        let lb2 = lg.powf(b - 2.0);
        let rl = r.powf(l);
        let value = self.gamma1 * rl * lb + self.gamma2;
        let d1 = self.gamma1 * rl / r * (l * lb + b * lb1);
        let d2 = self.gamma1 * rl / (r * r) * (l * (l - 1.0) * lb + (2.0 * l - 1.0) * b * lb1 + b * (b - 1.0) * lb2);
        Ok(EvalPoint { r, value, d1, d2 })
    }
}

/// `m1 (1 - ((r - r1)_+ / (R - r1))^(k+1))`: flat up to `r1`, zero at `R`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CutoffBarrier {
    pub m1: f64,
    pub r1: f64,
    pub r_big: f64,
    pub k: u32,
}

impl CutoffBarrier {
    /// Requires `k >= 3` and `1/k < p - 1` so that `k(p-1) - 1 > 0`.
    pub fn new(m1: f64, r1: f64, r_big: f64, k: u32, p: f64) -> Result<Self> {
        if !(m1 > 0.0 && r1 > 0.0 && r_big > r1) {
            return Err(Error::InvalidParams(format!(
                "cutoff needs m1 > 0 and 0 < r1 < R (got m1={m1}, r1={r1}, R={r_big})"
            )));
        }
        if k < 3 || 1.0 / f64::from(k) >= p - 1.0 {
            return Err(Error::InvalidParams(format!(
                "cutoff needs k >= 3 and 1/k < p - 1 (k={k}, p={p})"
            )));
        }
        Ok(Self { m1, r1, r_big, k })
    }

    /// `m1 (k+1) / (R - r1)^(k+1)`, the slope coefficient.
    pub fn slope_coefficient(&self) -> f64 {
        let k = f64::from(self.k);
        self.m1 * (k + 1.0) / (self.r_big - self.r1).powf(k + 1.0)
    }
}

impl RadialProfile for CutoffBarrier {
    fn eval(&self, r: f64) -> Result<EvalPoint> {
        if !(r > 0.0) {
            return Err(Error::Domain {
                r,
                what: "cutoff barrier needs r > 0",
            });
        }
        let s = (r - self.r1).max(0.0);
        let len = self.r_big - self.r1;
        let k = f64::from(self.k);
        let a = self.slope_coefficient();
        Ok(EvalPoint {
            r,
            value: self.m1 * (1.0 - (s / len).powf(k + 1.0)),
            d1: -a * s.powf(k),
            d2: -a * k * s.powf(k - 1.0),
        })
    }
}

/// `c (1 + r)^(-alpha)`, defined on `r >= 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Counterexample {
    pub c: f64,
    pub alpha: f64,
}

impl RadialProfile for Counterexample {
    fn eval(&self, r: f64) -> Result<EvalPoint> {
        if !(r >= 0.0) {
            return Err(Error::Domain {
                r,
                what: "counterexample needs r >= 0",
            });
        }
        let base = 1.0 + r;
        let value = self.c * base.powf(-self.alpha);
        Ok(EvalPoint {
            r,
            value,
            d1: -self.alpha * value / base,
            d2: self.alpha * (self.alpha + 1.0) * value / (base * base),
        })
    }
}

/// Samples `(r_i, u_i)`; derivatives come from a local quadratic
/// least-squares fit over the five nearest samples.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridProfile {
    r: Vec<f64>,
    u: Vec<f64>,
}

const GRID_FIT_POINTS: usize = 5;

impl GridProfile {
    pub fn new(r: Vec<f64>, u: Vec<f64>) -> Result<Self> {
        if r.len() != u.len() || r.len() < 4 {
            return Err(Error::InvalidParams(format!(
                "grid needs equal lengths >= 4 (got {} and {})",
                r.len(),
                u.len()
            )));
        }
        if r[0] <= 0.0 || r.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidParams(
                "grid radii must be positive and strictly increasing".into(),
            ));
        }
        if u.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParams("grid values must be finite".into()));
        }
        Ok(Self { r, u })
    }

    pub fn radii(&self) -> &[f64] {
        &self.r
    }

    pub fn values(&self) -> &[f64] {
        &self.u
    }

    pub fn len(&self) -> usize {
        self.r.len()
    }

    pub fn is_empty(&self) -> bool {
        self.r.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.r.iter().copied().zip(self.u.iter().copied())
    }

    /// Index range of the samples nearest to `r`.
    fn window(&self, r: f64) -> std::ops::Range<usize> {
        let n = self.r.len();
        let width = GRID_FIT_POINTS.min(n);
        let mut hi = self.r.partition_point(|&x| x < r);
        let mut lo = hi;
        while hi - lo < width {
            let take_left = match (lo > 0, hi < n) {
                (true, true) => r - self.r[lo - 1] <= self.r[hi] - r,
                (true, false) => true,
                (false, _) => false,
            };
            if take_left {
                lo -= 1;
            } else {
                hi += 1;
            }
        }
        lo..hi
    }
}

impl RadialProfile for GridProfile {
    fn eval(&self, r: f64) -> Result<EvalPoint> {
        let (lo, hi) = (self.r[0], *self.r.last().unwrap());
        if !(r >= lo && r <= hi) {
            return Err(Error::Interpolation { r, lo, hi });
        }
        let idx = self.window(r);
        let scale = idx.clone().map(|i| (self.r[i] - r).abs()).fold(0.0, f64::max);
        // Normal equations for u ~ c0 + c1 x + c2 x^2 with x = (r_i - r) / scale.
        let mut ata = [[0.0; 3]; 3];
        let mut atb = [0.0; 3];
        for i in idx {
            let x = (self.r[i] - r) / scale;
            let row = [1.0, x, x * x];
            for a in 0..3 {
                atb[a] += row[a] * self.u[i];
                for b in 0..3 {
                    ata[a][b] += row[a] * row[b];
                }
            }
        }
        let c = solve3(ata, atb);
        Ok(EvalPoint {
            r,
            value: c[0],
            d1: c[1] / scale,
            d2: 2.0 * c[2] / (scale * scale),
        })
    }
}

#[allow(clippy::needless_range_loop)]
fn solve3(mut a: [[f64; 3]; 3], mut b: [f64; 3]) -> [f64; 3] {
    for col in 0..3 {
        let piv = (col..3)
            .max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))
            .unwrap();
        a.swap(col, piv);
        b.swap(col, piv);
        for row in col + 1..3 {
            let f = a[row][col] / a[col][col];
            for k in col..3 {
                a[row][k] -= f * a[col][k];
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = [0.0; 3];
    for row in (0..3).rev() {
        let tail: f64 = (row + 1..3).map(|k| a[row][k] * x[k]).sum();
        x[row] = (b[row] - tail) / a[row][row];
    }
    x
}

/// Tagged union over the closed-form profiles and sampled grids.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum ProfileSpec {
    PowerBarrier(PowerBarrier),
    LogBarrier(LogBarrier),
    CutoffBarrier(CutoffBarrier),
    Counterexample(Counterexample),
    Grid(GridProfile),
}

impl RadialProfile for ProfileSpec {
    fn eval(&self, r: f64) -> Result<EvalPoint> {
        match self {
            ProfileSpec::PowerBarrier(s) => s.eval(r),
            ProfileSpec::LogBarrier(s) => s.eval(r),
            ProfileSpec::CutoffBarrier(s) => s.eval(r),
            ProfileSpec::Counterexample(s) => s.eval(r),
            ProfileSpec::Grid(s) => s.eval(r),
        }
    }
}

pub fn eval_profile(spec: &ProfileSpec, r: f64) -> Result<EvalPoint> {
    spec.eval(r)
}

/// Profile given by a closure returning `(value, d1, d2)`.
pub struct FnProfile<F>(pub F);

impl<F: Fn(f64) -> (f64, f64, f64)> RadialProfile for FnProfile<F> {
    fn eval(&self, r: f64) -> Result<EvalPoint> {
        let (value, d1, d2) = (self.0)(r);
        Ok(EvalPoint { r, value, d1, d2 })
    }
}

/// `u^alpha` for a positive base profile `u`.
pub struct PowerOf<'a, P: ?Sized> {
    pub base: &'a P,
    pub alpha: f64,
}

impl<P: RadialProfile + ?Sized> RadialProfile for PowerOf<'_, P> {
    fn eval(&self, r: f64) -> Result<EvalPoint> {
        let pt = self.base.eval(r)?;
        if !(pt.value > 0.0) {
            return Err(Error::NonPositiveValue { r, value: pt.value });
        }
        let a = self.alpha;
        let v = pt.value.powf(a);
        let d1 = a * v / pt.value * pt.d1;
        let d2 = a * (a - 1.0) * v / (pt.value * pt.value) * pt.d1 * pt.d1 + a * v / pt.value * pt.d2;
        Ok(EvalPoint { r, value: v, d1, d2 })
    }
}

/// `Delta_p` (not `-Delta_p`) of a radial profile from its value and
/// derivatives at one point.
pub fn p_laplacian_radial(point: &EvalPoint, op: &Operator) -> Result<f64> {
    let EvalPoint { r, d1, d2, .. } = *point;
    if !(r > 0.0) {
        return Err(Error::Domain {
            r,
            what: "p-Laplacian needs r > 0",
        });
    }
    let p = op.p;
    let floor = GRADIENT_FLOOR * (d2.abs() * r).max(1.0);
    if d1.abs() < floor {
        if p < 2.0 {
            return Err(Error::SingularGradient { r, p });
        }
        if p > 2.0 {
            return Ok(0.0);
        }
        // p == 2: the operator is linear and the formula is regular.
    }
    Ok(d1.abs().powf(p - 2.0) * ((p - 1.0) * d2 + (op.n() - 1.0) / r * d1))
}

/// Fails with `NotPHarmonic` unless `|Delta_p u(r)|` is within `rel_tol` of
/// the size of its two terms. Constant profiles pass for every `p`.
pub fn check_p_harmonic<P: RadialProfile + ?Sized>(profile: &P, op: &Operator, r: f64, rel_tol: f64) -> Result<()> {
    let pt = profile.eval(r)?;
    if pt.d1 == 0.0 && pt.d2 == 0.0 {
        return Ok(());
    }
    let lap = p_laplacian_radial(&pt, op)?;
    let p = op.p;
    let terms = pt.d1.abs().powf(p - 2.0) * ((p - 1.0) * pt.d2.abs() + (op.n() - 1.0) * pt.d1.abs() / r);
    if lap.abs() > rel_tol * terms {
        return Err(Error::NotPHarmonic { r, residual: lap });
    }
    Ok(())
}

/// Step for [`p_laplacian_fd`] at radius `r`.
pub fn fd_step(r: f64) -> f64 {
    1e-4 * r.max(1.0)
}

/// Central-difference `Delta_p` in conservative form, using profile values at
/// `r - 2h, r, r + 2h` for the slopes and `r -+ h` for the fluxes.
pub fn p_laplacian_fd<P: RadialProfile + ?Sized>(profile: &P, r: f64, op: &Operator, h: f64) -> Result<f64> {
    if !(h > 0.0 && r > 2.0 * h) {
        return Err(Error::Domain {
            r,
            what: "finite difference needs r > 2h > 0",
        });
    }
    let n1 = op.n() - 1.0;
    let p = op.p;
    let (um, u0, up) = (
        profile.value(r - 2.0 * h)?,
        profile.value(r)?,
        profile.value(r + 2.0 * h)?,
    );
    let flux = |s: f64, slope: f64| s.powf(n1) * slope.signum() * slope.abs().powf(p - 1.0);
    let f_plus = flux(r + h, (up - u0) / (2.0 * h));
    let f_minus = flux(r - h, (u0 - um) / (2.0 * h));
    Ok((f_plus - f_minus) / (2.0 * h * r.powf(n1)))
}

/// Checks the chain rule for the p-Laplacian of a power,
///
/// ```text
///     Delta_p(u^alpha) = alpha^(p-1) u^((alpha-1)(p-1))
///                        [Delta_p u + (alpha-1)(p-1) u^(-1) |u'|^p]
/// ```
///
/// with the left side evaluated from the closed-form derivatives of `u^alpha`.
pub fn power_transform_residual<P: RadialProfile + ?Sized>(
    profile: &P,
    alpha: f64,
    r: f64,
    op: &Operator,
) -> Result<IdentityReport> {
    if !(alpha >= 1.0) {
        return Err(Error::InvalidParams(format!("alpha must be >= 1, got {alpha}")));
    }
    let pt = profile.eval(r)?;
    if !(pt.value > 0.0) {
        return Err(Error::NonPositiveValue { r, value: pt.value });
    }
    if pt.d1 == 0.0 {
        return Err(Error::SingularGradient { r, p: op.p });
    }
    let p = op.p;
    let lhs = p_laplacian_radial(&PowerOf { base: profile, alpha }.eval(r)?, op)?;
    let base = p_laplacian_radial(&pt, op)?;
    let correction = (alpha - 1.0) * (p - 1.0) / pt.value * pt.d1.abs().powf(p);
    let rhs = alpha.powf(p - 1.0) * pt.value.powf((alpha - 1.0) * (p - 1.0)) * (base + correction);
    let scale = lhs.abs().max(rhs.abs()).max(1.0);
    Ok(IdentityReport::equality(lhs, rhs, scale, POWER_TRANSFORM_TOL))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn op(n: u32, p: f64) -> Operator {
        Operator::new(n, p).unwrap()
    }

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * b.abs().max(1.0)
    }

    #[test]
    fn power_barrier_eval() {
        let pb = PowerBarrier::new(1.0, 0.0, &op(3, 2.0));
        let pt = pb.eval(2.0).unwrap();
        assert!(close(pt.value, 0.5, 1e-15));
        assert!(close(pt.d1, -0.25, 1e-15));
        assert!(close(pt.d2, 0.25, 1e-15));
    }

    #[test]
    fn cutoff_is_flat_up_to_r1() {
        let cb = CutoffBarrier::new(1.0, 1.0, 2.0, 3, 2.0).unwrap();
        let pt = cb.eval(1.0).unwrap();
        assert_eq!((pt.value, pt.d1, pt.d2), (1.0, 0.0, 0.0));
        let pt = cb.eval(0.5).unwrap();
        assert_eq!((pt.value, pt.d1, pt.d2), (1.0, 0.0, 0.0));
        assert!(cb.eval(2.0).unwrap().value.abs() < 1e-15);
    }

    #[test]
    fn cutoff_admissibility() {
        assert!(CutoffBarrier::new(1.0, 1.0, 2.0, 2, 2.0).is_err());
        // 1/k < p - 1 fails for p = 1.3, k = 3.
        assert!(CutoffBarrier::new(1.0, 1.0, 2.0, 3, 1.3).is_err());
        assert!(CutoffBarrier::new(1.0, 1.0, 2.0, 4, 1.3).is_ok());
        assert!(CutoffBarrier::new(1.0, 2.0, 2.0, 4, 2.0).is_err());
    }

    #[test]
    fn counterexample_at_origin() {
        let ce = Counterexample {
            c: 1.0,
            alpha: 2.0 / 3.0,
        };
        let pt = ce.eval(0.0).unwrap();
        assert_eq!(pt.value, 1.0);
        assert!(close(pt.d1, -2.0 / 3.0, 1e-15));
        assert!(ce.eval(-0.1).is_err());
    }

    #[test]
    fn log_barrier_domain() {
        let lb = LogBarrier::new(0.1, 0.0, 1.0, &op(3, 2.0)).unwrap();
        assert!(matches!(lb.eval(1.0), Err(Error::Domain { .. })));
        assert!(LogBarrier::new(0.1, 0.0, 1.0, &op(3, 3.0)).is_err());
        assert!(LogBarrier::beta_admissible(1.0, 2.0));
        assert!(!LogBarrier::beta_admissible(0.5, 2.0));
        assert!(LogBarrier::beta_admissible(0.4, 3.0));
        assert!(!LogBarrier::beta_admissible(0.6, 3.0));
    }

    #[test]
    fn fundamental_solution_is_p_harmonic() {
        for (n, p) in [(3, 2.0), (5, 3.5), (2, 3.0), (4, 1.5), (1, 2.5)] {
            let o = op(n, p);
            let pb = PowerBarrier::new(1.7, -0.3, &o);
            for r in [0.3, 1.0, 2.5, 40.0] {
                let lap = p_laplacian_radial(&pb.eval(r).unwrap(), &o).unwrap();
                let size = pb.eval(r).unwrap().d1.abs().powf(p - 1.0) / r;
                assert!(lap.abs() <= 1e-12 * size, "N={n} p={p} r={r}: {lap}");
            }
        }
        let o = op(3, 3.0);
        let pb = PowerBarrier::new(2.0, 1.0, &o);
        assert_eq!(pb.kernel, Kernel::Log);
        let lap = p_laplacian_radial(&pb.eval(1.7).unwrap(), &o).unwrap();
        assert!(lap.abs() < 1e-14);
    }

    #[test]
    fn hand_values() {
        // V = r^2, p = 2, N = 3: Delta V = 2N.
        let pt = EvalPoint {
            r: 1.0,
            value: 1.0,
            d1: 2.0,
            d2: 2.0,
        };
        assert!(close(p_laplacian_radial(&pt, &op(3, 2.0)).unwrap(), 6.0, 1e-15));
        // V = r, p = 3, N = 2, r = 2.
        let pt = EvalPoint {
            r: 2.0,
            value: 2.0,
            d1: 1.0,
            d2: 0.0,
        };
        assert!(close(p_laplacian_radial(&pt, &op(2, 3.0)).unwrap(), 0.5, 1e-15));
    }

    #[test]
    fn vanishing_gradient_handling() {
        let flat = EvalPoint {
            r: 1.0,
            value: 1.0,
            d1: 0.0,
            d2: 3.0,
        };
        assert_eq!(p_laplacian_radial(&flat, &op(3, 3.0)).unwrap(), 0.0);
        assert!(matches!(
            p_laplacian_radial(&flat, &op(3, 1.5)),
            Err(Error::SingularGradient { .. })
        ));
        // p = 2 is linear: Delta V = V'' at a critical point.
        assert_eq!(p_laplacian_radial(&flat, &op(3, 2.0)).unwrap(), 3.0);
    }

    #[test]
    fn fd_matches_hand_values() {
        let o = op(3, 2.0);
        let sq = FnProfile(|r: f64| (r * r, 2.0 * r, 2.0));
        let v = p_laplacian_fd(&sq, 1.0, &o, 1e-4).unwrap();
        assert!((v - 6.0).abs() < 1e-6, "{v}");
        let pb = PowerBarrier::new(1.0, 0.0, &o);
        assert!(p_laplacian_fd(&pb, 1.5, &o, 1e-4).unwrap().abs() < 1e-6);
        assert!(p_laplacian_fd(&pb, 1.5, &o, 1.0).is_err());
    }

    #[test]
    fn grid_profile_validation_and_range() {
        assert!(GridProfile::new(vec![1.0, 2.0, 3.0], vec![0.0; 3]).is_err());
        assert!(GridProfile::new(vec![1.0, 2.0, 2.0, 3.0], vec![0.0; 4]).is_err());
        assert!(GridProfile::new(vec![1.0, 2.0, 3.0, 4.0], vec![0.0; 3]).is_err());
        let g = GridProfile::new(vec![1.0, 2.0, 3.0, 4.0], vec![1.0, 4.0, 9.0, 16.0]).unwrap();
        assert!(matches!(g.eval(0.5), Err(Error::Interpolation { .. })));
        assert!(matches!(g.eval(4.5), Err(Error::Interpolation { .. })));
        // Quadratic data is reproduced exactly.
        let pt = g.eval(2.5).unwrap();
        assert!(close(pt.value, 6.25, 1e-12));
        assert!(close(pt.d1, 5.0, 1e-12));
        assert!(close(pt.d2, 2.0, 1e-12));
    }

    #[test]
    fn grid_profile_on_nonuniform_samples() {
        let r: Vec<f64> = (0..60)
            .map(|i| 1.0 + 0.05 * f64::from(i) + 0.01 * f64::from(i % 3))
            .collect();
        let u: Vec<f64> = r.iter().map(|x| x.sin()).collect();
        let g = GridProfile::new(r, u).unwrap();
        for x in [1.2, 2.0, 3.1] {
            let pt = g.eval(x).unwrap();
            assert!((pt.value - x.sin()).abs() < 1e-4);
            assert!((pt.d1 - x.cos()).abs() < 5e-3, "{} {}", pt.d1, x.cos());
            assert!((pt.d2 + x.sin()).abs() < 3e-2);
        }
    }

    #[test]
    fn power_transform_identity_transform_is_exact() {
        let o = op(4, 2.5);
        let ce = Counterexample { c: 0.8, alpha: 0.9 };
        let rep = power_transform_residual(&ce, 1.0, 2.0, &o).unwrap();
        assert_eq!(rep.residual, 0.0);
    }

    #[test]
    fn power_transform_exponential() {
        // u = e^{-r}, alpha = 2, p = 2, N = 3 at r = 1. By hand:
        // Delta(e^{-2r}) = (4 - 4/r) e^{-2r} = 0, and the right side is
        // 2 u [(1 - 2/r) e^{-r} + e^{-2r}/e^{-r}] = 2 e^{-2r}(2 - 2/r) = 0.
        let o = op(3, 2.0);
        let u = FnProfile(|r: f64| ((-r).exp(), -(-r).exp(), (-r).exp()));
        let rep = power_transform_residual(&u, 2.0, 1.0, &o).unwrap();
        assert!(rep.relative() < 1e-10);
        assert!(rep.lhs.abs() < 1e-15);
        let rep = power_transform_residual(&u, 2.0, 2.0, &o).unwrap();
        assert!(close(rep.lhs, 2.0 * (-4.0f64).exp(), 1e-13));
        assert!(rep.passed);
    }

    #[test]
    fn power_transform_counterexample_against_fd() {
        let o = op(4, 2.5);
        let ce = Counterexample { c: 0.7, alpha: 0.6 };
        let rep = power_transform_residual(&ce, 3.0, 2.0, &o).unwrap();
        assert!(rep.relative() < 1e-8);
        let fd = p_laplacian_fd(&PowerOf { base: &ce, alpha: 3.0 }, 2.0, &o, fd_step(2.0)).unwrap();
        assert!((fd - rep.lhs).abs() < 1e-6 * rep.lhs.abs(), "{fd} vs {}", rep.lhs);
    }

    #[test]
    fn power_transform_errors() {
        let o = op(3, 2.0);
        let neg = FnProfile(|_r: f64| (-1.0, 1.0, 0.0));
        assert!(matches!(
            power_transform_residual(&neg, 2.0, 1.0, &o),
            Err(Error::NonPositiveValue { .. })
        ));
        let flat = FnProfile(|_r: f64| (1.0, 0.0, 0.0));
        assert!(matches!(
            power_transform_residual(&flat, 2.0, 1.0, &o),
            Err(Error::SingularGradient { .. })
        ));
        let ce = Counterexample { c: 1.0, alpha: 1.0 };
        assert!(power_transform_residual(&ce, 0.5, 1.0, &o).is_err());
    }
}
