//! Radial Dirichlet problems `-Delta_p u = f(r)` on annuli, discretised in
//! conservative form on a uniform mesh and solved by damped Newton with a
//! continuation in the flux regularisation
//! `|u'|^(p-2) u' -> (|u'|^2 + eps^2)^((p-2)/2) u'`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::exponents::Operator;
use crate::radial::{check_p_harmonic, GridProfile, RadialProfile};
use crate::report::IdentityReport;

pub const NEWTON_TOL: f64 = 1e-11;
pub const COMPARISON_TOL: f64 = 1e-8;
const EPS_START: f64 = 1e-2;
const EPS_END: f64 = 1e-10;
const EPS_FACTOR: f64 = 0.1;
const MAX_NEWTON: usize = 200;
const MAX_HALVINGS: u32 = 40;
const ARMIJO: f64 = 1e-4;
const LEVEL_TOL: f64 = 1e-8;

/// Right-hand side `f(r) >= 0`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum Rhs {
    Zero,
    Constant(f64),
    /// `sum c_i r^(e_i)`
    Powers(Vec<(f64, f64)>),
    Grid(GridProfile),
}

impl Rhs {
    pub fn eval(&self, r: f64) -> Result<f64> {
        Ok(match self {
            Rhs::Zero => 0.0,
            Rhs::Constant(c) => *c,
            Rhs::Powers(terms) => terms.iter().map(|&(c, e)| c * r.powf(e)).sum(),
            Rhs::Grid(g) => g.value(r)?,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AnnulusProblem {
    pub op: Operator,
    pub r_inner: f64,
    pub r_outer: f64,
    pub boundary_inner: f64,
    pub boundary_outer: f64,
    pub rhs: Rhs,
    pub mesh_size: usize,
}

impl AnnulusProblem {
    pub fn new(
        op: Operator,
        r_inner: f64,
        r_outer: f64,
        boundary: (f64, f64),
        rhs: Rhs,
        mesh_size: usize,
    ) -> Result<Self> {
        let prob = Self {
            op,
            r_inner,
            r_outer,
            boundary_inner: boundary.0,
            boundary_outer: boundary.1,
            rhs,
            mesh_size,
        };
        prob.validate()?;
        Ok(prob)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidParams(m));
        if !(self.r_inner > 0.0 && self.r_inner < self.r_outer && self.r_outer.is_finite()) {
            return bad(format!(
                "need 0 < r_inner < r_outer, got {} and {}",
                self.r_inner, self.r_outer
            ));
        }
        if self.mesh_size < 16 {
            return bad(format!("mesh_size must be >= 16, got {}", self.mesh_size));
        }
        if !(self.boundary_inner.is_finite() && self.boundary_outer.is_finite()) {
            return bad("boundary values must be finite".into());
        }
        for r in self.mesh() {
            let f = self.rhs.eval(r)?;
            if !(f >= 0.0 && f.is_finite()) {
                return bad(format!("rhs must be finite and >= 0, got {f} at r = {r}"));
            }
        }
        Ok(())
    }

    pub fn mesh(&self) -> Vec<f64> {
        let m = self.mesh_size;
        let h = (self.r_outer - self.r_inner) / m as f64;
        let mut r: Vec<f64> = (0..=m).map(|i| self.r_inner + h * i as f64).collect();
        r[m] = self.r_outer;
        r
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BvpSolution {
    pub profile: GridProfile,
    /// Scaled residual at the final regularisation level.
    pub residual: f64,
    pub flux_eps: f64,
    pub newton_iterations: usize,
}

struct System {
    p: f64,
    h: f64,
    /// `r^(N-1)` at the midpoints.
    w_mid: Vec<f64>,
    /// `r^(N-1) f(r)` at the interior nodes.
    src: Vec<f64>,
    ua: f64,
    ub: f64,
}

impl System {
    fn full(&self, interior: &[f64]) -> Vec<f64> {
        let mut u = Vec::with_capacity(interior.len() + 2);
        u.push(self.ua);
        u.extend_from_slice(interior);
        u.push(self.ub);
        u
    }

    /// Midpoint fluxes and their derivatives in the slope.
    fn fluxes(&self, u: &[f64], eps: f64) -> (Vec<f64>, Vec<f64>) {
        let p = self.p;
        let e2 = eps * eps;
        let (flux, dflux) = self
            .w_mid
            .iter()
            .zip(u.windows(2))
            .map(|(&w, pair)| {
                let d = (pair[1] - pair[0]) / self.h;
                let s = d * d + e2;
                let f = w * s.powf(0.5 * (p - 2.0)) * d;
                let df = w * s.powf(0.5 * (p - 4.0)) * ((p - 1.0) * d * d + e2);
                (f, df)
            })
            .unzip();
        (flux, dflux)
    }

    /// `-(F_{i+1/2} - F_{i-1/2})/h - r_i^(N-1) f_i` and its scale.
    fn residual(&self, interior: &[f64], eps: f64) -> (Vec<f64>, f64) {
        let u = self.full(interior);
        let (flux, _) = self.fluxes(&u, eps);
        let res: Vec<f64> = (0..interior.len())
            .map(|i| -(flux[i + 1] - flux[i]) / self.h - self.src[i])
            .collect();
        let fmax = flux.iter().fold(0.0f64, |a, f| a.max(f.abs()));
        let smax = self.src.iter().fold(0.0f64, |a, f| a.max(f.abs()));
        (res, (fmax / self.h + smax).max(f64::MIN_POSITIVE))
    }

    /// Change in each residual entry caused by perturbing `u` by a few ulps
    /// of its largest value. Residuals below this cannot be resolved.
    fn roundoff_floor(&self, interior: &[f64], eps: f64) -> Vec<f64> {
        let u = self.full(interior);
        let (_, df) = self.fluxes(&u, eps);
        let du = 16.0 * f64::EPSILON * max_abs(&u);
        let h2 = self.h * self.h;
        (0..interior.len()).map(|i| (df[i] + df[i + 1]) * du / h2).collect()
    }

    fn newton_step(&self, interior: &[f64], res: &[f64], eps: f64) -> Vec<f64> {
        let u = self.full(interior);
        let (_, df) = self.fluxes(&u, eps);
        let n = interior.len();
        let h2 = self.h * self.h;
        let diag: Vec<f64> = (0..n).map(|i| (df[i] + df[i + 1]) / h2).collect();
        let off: Vec<f64> = (0..n.saturating_sub(1)).map(|i| -df[i + 1] / h2).collect();
        let rhs: Vec<f64> = res.iter().map(|r| -r).collect();
        thomas(&off, &diag, &off, &rhs)
    }
}

/// Solves a tridiagonal system with sub-, main and super-diagonals.
fn thomas(sub: &[f64], diag: &[f64], sup: &[f64], rhs: &[f64]) -> Vec<f64> {
    let n = diag.len();
    let mut c = vec![0.0; n];
    let mut d = vec![0.0; n];
    c[0] = if n > 1 { sup[0] / diag[0] } else { 0.0 };
    d[0] = rhs[0] / diag[0];
    for i in 1..n {
        let m = diag[i] - sub[i - 1] * c[i - 1];
        if i + 1 < n {
            c[i] = sup[i] / m;
        }
        d[i] = (rhs[i] - sub[i - 1] * d[i - 1]) / m;
    }
    let mut x = d;
    for i in (0..n.saturating_sub(1)).rev() {
        x[i] -= c[i] * x[i + 1];
    }
    x
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0f64, |a, x| a.max(x.abs()))
}

fn norm2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

pub fn solve_annulus_dirichlet(prob: &AnnulusProblem) -> Result<BvpSolution> {
    prob.validate()?;
    let mesh = prob.mesh();
    let m = prob.mesh_size;
    let h = (prob.r_outer - prob.r_inner) / m as f64;
    let n1 = prob.op.n() - 1.0;
    let sys = System {
        p: prob.op.p,
        h,
        w_mid: mesh.windows(2).map(|w| (0.5 * (w[0] + w[1])).powf(n1)).collect(),
        src: mesh[1..m]
            .iter()
            .map(|&r| Ok(r.powf(n1) * prob.rhs.eval(r)?))
            .collect::<Result<_>>()?,
        ua: prob.boundary_inner,
        ub: prob.boundary_outer,
    };
    let (ua, ub) = (sys.ua, sys.ub);
    let mut u: Vec<f64> = mesh[1..m]
        .iter()
        .map(|&r| ua + (ub - ua) * (r - prob.r_inner) / (prob.r_outer - prob.r_inner))
        .collect();

    let mut eps = EPS_START;
    let mut iterations = 0;
    loop {
        let last_level = eps == EPS_END;
        let tol = if last_level { NEWTON_TOL } else { LEVEL_TOL };
        let (mut res, mut scale) = sys.residual(&u, eps);
        let mut converged = false;
        let resolved = |res: &[f64], scale: f64, floor: &[f64], slack: f64| {
            res.iter().zip(floor).all(|(r, f)| r.abs() <= slack * tol * scale + f)
        };
        for _ in 0..MAX_NEWTON {
            if resolved(&res, scale, &sys.roundoff_floor(&u, eps), 1.0) {
                converged = true;
                break;
            }
            iterations += 1;
            let delta = sys.newton_step(&u, &res, eps);
            let merit = norm2(&res);
            let mut t = 1.0;
            let mut accepted = false;
            for _ in 0..=MAX_HALVINGS {
                let trial: Vec<f64> = u.iter().zip(&delta).map(|(a, d)| a + t * d).collect();
                let (r_trial, s_trial) = sys.residual(&trial, eps);
                let m_trial = norm2(&r_trial);
                if m_trial.is_finite() && m_trial <= (1.0 - ARMIJO * t) * merit {
                    u = trial;
                    res = r_trial;
                    scale = s_trial;
                    accepted = true;
                    break;
                }
                t *= 0.5;
            }
            if !accepted {
                // A full step that leaves the residual at roundoff level is
                // as good as converged.
                if resolved(&res, scale, &sys.roundoff_floor(&u, eps), 10.0) {
                    converged = true;
                    break;
                }
                return Err(Error::NewtonDivergence {
                    residual: max_abs(&res) / scale,
                    flux_eps: eps,
                });
            }
        }
        if !converged {
            return Err(Error::NewtonDivergence {
                residual: max_abs(&res) / scale,
                flux_eps: eps,
            });
        }
        if last_level {
            let values = sys.full(&u);
            return Ok(BvpSolution {
                profile: GridProfile::new(mesh, values)?,
                residual: max_abs(&res) / scale,
                flux_eps: eps,
                newton_iterations: iterations,
            });
        }
        eps *= EPS_FACTOR;
        if eps < 1.5 * EPS_END {
            eps = EPS_END;
        }
    }
}

pub fn comparison_check<P: RadialProfile + ?Sized>(prob: &AnnulusProblem, phi: &P) -> Result<IdentityReport> {
    comparison_check_tol(prob, phi, COMPARISON_TOL)
}

/// Solves `prob` and reports `min (u - phi)` over the mesh for a p-harmonic
/// `phi` whose boundary values are dominated by those of `prob`.
pub fn comparison_check_tol<P: RadialProfile + ?Sized>(
    prob: &AnnulusProblem,
    phi: &P,
    tol: f64,
) -> Result<IdentityReport> {
    prob.validate()?;
    let pa = phi.value(prob.r_inner)?;
    let pb = phi.value(prob.r_outer)?;
    if prob.boundary_inner < pa || prob.boundary_outer < pb {
        return Err(Error::BoundaryDominanceViolated(format!(
            "boundary ({}, {}) below phi ({pa}, {pb})",
            prob.boundary_inner, prob.boundary_outer
        )));
    }
    let mesh = prob.mesh();
    for &r in mesh.iter().step_by((mesh.len() / 16).max(1)) {
        check_p_harmonic(phi, &prob.op, r, 1e-8)?;
    }
    let sol = solve_annulus_dirichlet(prob)?;
    let mut worst = f64::INFINITY;
    let mut scale = 0.0f64;
    for (r, u) in sol.profile.iter() {
        let v = phi.value(r)?;
        worst = worst.min(u - v);
        scale = scale.max(u.abs()).max(v.abs());
    }
    Ok(IdentityReport {
        lhs: worst,
        rhs: 0.0,
        residual: worst,
        scale,
        passed: worst >= -tol,
    })
}
