//! Problem parameters and the closed-form exponents that separate the
//! existence and nonexistence regimes of
//!
//! ```text
//!     -Delta_p u >= a r^gamma u^q   (inequality)
//!     -Delta_p u  = a r^gamma u^q   (equation)
//! ```
//!
//! on `R^N`. The weight is the pure power `a r^gamma` everywhere.

use serde::Serialize;

use crate::error::{Error, Result};

/// Distance from `q_equation` under which a parameter set is reported as a
/// boundary case: the nonexistence argument for radial solutions of the
/// equation only closes for strict inequality there.
pub const EQUATION_BOUNDARY_BAND: f64 = 1e-9;

/// The radial p-Laplacian in dimension `N`, independent of any nonlinearity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Operator {
    pub n_dim: u32,
    pub p: f64,
}

impl Operator {
    pub fn new(n_dim: u32, p: f64) -> Result<Self> {
        if n_dim < 1 {
            return Err(Error::InvalidParams(format!("n_dim must be >= 1, got {n_dim}")));
        }
        if !(p.is_finite() && p > 1.0) {
            return Err(Error::InvalidParams(format!("p must be > 1, got {p}")));
        }
        Ok(Self { n_dim, p })
    }

    pub fn n(&self) -> f64 {
        f64::from(self.n_dim)
    }

    /// Exponent of the radial fundamental solution, `(p - N) / (p - 1)`.
    pub fn lambda(&self) -> f64 {
        (self.p - self.n()) / (self.p - 1.0)
    }

    /// `N == p`: the fundamental solution is `log r` instead of a power.
    pub fn is_log_case(&self) -> bool {
        self.n() == self.p
    }

    pub fn is_low_dimension(&self) -> bool {
        self.n() <= self.p
    }
}

/// `(N, p, q, gamma, a)` for `-Delta_p u (>=, =) a r^gamma u^q`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProblemParams {
    pub n_dim: u32,
    pub p: f64,
    pub gamma: f64,
    pub q: f64,
    pub amplitude: f64,
}

impl ProblemParams {
    pub fn new(n_dim: u32, p: f64, gamma: f64, q: f64, amplitude: f64) -> Result<Self> {
        let params = Self {
            n_dim,
            p,
            gamma,
            q,
            amplitude,
        };
        params.validate()?;
        Ok(params)
    }

    /// Unit amplitude, the normalisation used by most constructions.
    pub fn unit(n_dim: u32, p: f64, gamma: f64, q: f64) -> Result<Self> {
        Self::new(n_dim, p, gamma, q, 1.0)
    }

    pub fn validate(&self) -> Result<()> {
        Operator::new(self.n_dim, self.p)?;
        let bad = |msg: String| Err(Error::InvalidParams(msg));
        if !(self.gamma.is_finite() && self.gamma > -self.p) {
            return bad(format!("gamma must be > -p = {}, got {}", -self.p, self.gamma));
        }
        if !(self.q.is_finite() && self.q > self.p - 1.0) {
            return bad(format!("q must be > p - 1 = {}, got {}", self.p - 1.0, self.q));
        }
        if !(self.amplitude.is_finite() && self.amplitude > 0.0) {
            return bad(format!("amplitude must be > 0, got {}", self.amplitude));
        }
        Ok(())
    }

    pub fn operator(&self) -> Operator {
        Operator {
            n_dim: self.n_dim,
            p: self.p,
        }
    }

    pub fn with_q(self, q: f64) -> Self {
        Self { q, ..self }
    }

    fn n(&self) -> f64 {
        f64::from(self.n_dim)
    }

    fn require_high_dimension(&self) -> Result<()> {
        if self.operator().is_low_dimension() {
            Err(Error::DimensionRegime {
                n_dim: self.n_dim,
                p: self.p,
            })
        } else {
            Ok(())
        }
    }
}

pub fn lambda_exponent(params: &ProblemParams) -> f64 {
    params.operator().lambda()
}

/// Serrin-type exponent `(N + gamma)(p - 1) / (N - p)`.
pub fn serrin_critical(params: &ProblemParams) -> Result<f64> {
    params.require_high_dimension()?;
    let n = params.n();
    Ok((n + params.gamma) * (params.p - 1.0) / (n - params.p))
}

/// Critical exponent for radial solutions of the equation,
/// `((N + gamma)(p - 1) + p + gamma) / (N - p)`.
pub fn equation_critical(params: &ProblemParams) -> Result<f64> {
    params.require_high_dimension()?;
    let n = params.n();
    let (p, g) = (params.p, params.gamma);
    Ok(((n + g) * (p - 1.0) + p + g) / (n - p))
}

/// Coefficient `N - p - (gamma + N) p / (q + 1)` multiplying the bulk
/// integral in the radial Pohozaev identity.
pub fn pohozaev_coefficient(params: &ProblemParams) -> Result<f64> {
    params.require_high_dimension()?;
    let n = params.n();
    let p = params.p;
    Ok(n - p - (params.gamma + n) * p / (params.q + 1.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Regime {
    /// `N <= p`: supersolutions bounded below are constant.
    pub low_dimension: bool,
    /// `N > p` and `q <= q_serrin`: no positive supersolution.
    pub inequality_nonexistence: bool,
    /// `N > p`, `gamma >= 0`, `q > q_serrin`: explicit positive supersolution.
    pub counterexample_exists: bool,
    /// `N > p`, `gamma >= 0`, `q <= q_equation`: no positive radial solution.
    pub equation_radial_nonexistence: bool,
    /// `q` within [`EQUATION_BOUNDARY_BAND`] of `q_equation`.
    pub equation_boundary_case: bool,
    pub lambda: f64,
    pub q_serrin: Option<f64>,
    pub q_equation: Option<f64>,
}

pub fn classify_regime(params: &ProblemParams) -> Regime {
    let lambda = lambda_exponent(params);
    if params.operator().is_low_dimension() {
        return Regime {
            low_dimension: true,
            inequality_nonexistence: false,
            counterexample_exists: false,
            equation_radial_nonexistence: false,
            equation_boundary_case: false,
            lambda,
            q_serrin: None,
            q_equation: None,
        };
    }
    // Both exist for N > p.
    let q_s = serrin_critical(params).expect("N > p");
    let q_e = equation_critical(params).expect("N > p");
    let q = params.q;
    let nonneg_weight = params.gamma >= 0.0;
    Regime {
        low_dimension: false,
        inequality_nonexistence: q <= q_s,
        counterexample_exists: nonneg_weight && q > q_s,
        equation_radial_nonexistence: nonneg_weight && q <= q_e,
        equation_boundary_case: (q - q_e).abs() < EQUATION_BOUNDARY_BAND,
        lambda,
        q_serrin: Some(q_s),
        q_equation: Some(q_e),
    }
}
