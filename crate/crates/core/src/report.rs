use serde::Serialize;

/// Outcome of checking one identity or inequality at a point or over a range.
///
/// `residual` is always `lhs - rhs` unless the producing check documents a
/// different reduction (e.g. a minimum over samples). `passed` is the verdict
/// under the producing check's own tolerance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IdentityReport {
    pub lhs: f64,
    pub rhs: f64,
    pub residual: f64,
    pub scale: f64,
    pub passed: bool,
}

impl IdentityReport {
    /// Equality-type report; passes when `|lhs - rhs| <= tol * scale`.
    pub fn equality(lhs: f64, rhs: f64, scale: f64, tol: f64) -> Self {
        let residual = lhs - rhs;
        Self {
            lhs,
            rhs,
            residual,
            scale,
            passed: residual.abs() <= tol * scale,
        }
    }

    pub fn relative(&self) -> f64 {
        if self.scale > 0.0 {
            self.residual.abs() / self.scale
        } else {
            self.residual.abs()
        }
    }
}
