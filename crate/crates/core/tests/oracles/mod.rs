//! Independent reference integrators for the semilinear case `p = 2`,
//! `gamma = 0`: fixed-step classical RK4 in `(u, u')`, with no adaptivity and
//! no shared code with the library.

#![allow(dead_code)]

const H: f64 = 2e-5;
const R0: f64 = 1e-4;

type State = [f64; 3];

fn rk4(f: &dyn Fn(f64, &State) -> State, x: f64, y: &State, h: f64) -> State {
    let add = |a: &State, b: &State, s: f64| [a[0] + s * b[0], a[1] + s * b[1], a[2] + s * b[2]];
    let k1 = f(x, y);
    let k2 = f(x + 0.5 * h, &add(y, &k1, 0.5 * h));
    let k3 = f(x + 0.5 * h, &add(y, &k2, 0.5 * h));
    let k4 = f(x + h, &add(y, &k3, h));
    let mut out = *y;
    for i in 0..3 {
        out[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    out
}

/// Origin data at `R0` from `u = u0 -+ u0^q r^2 / (2N)`.
fn start(n: f64, q: f64, u0: f64, sign: f64) -> (f64, f64) {
    let s = u0.powf(q) / n;
    (u0 + sign * 0.5 * s * R0 * R0, sign * s * R0)
}

/// First zero of `u'' + (N-1)/r u' + u^q = 0`, `u(0) = u0`, located by
/// bisection on the cubic Hermite interpolant of the bracketing step.
pub fn lane_emden_zero(n_dim: u32, q: f64, u0: f64, r_limit: f64) -> Option<f64> {
    let n = f64::from(n_dim);
    let f = |r: f64, y: &State| [y[1], -y[0].abs().powf(q - 1.0) * y[0] - (n - 1.0) / r * y[1], 0.0];
    let (u, v) = start(n, q, u0, -1.0);
    let mut r = R0;
    let mut y = [u, v, 0.0];
    while r < r_limit {
        let next = rk4(&f, r, &y, H);
        if next[0] <= 0.0 {
            let (a, b) = (r, r + H);
            let herm = |t: f64| {
                let s = (t - a) / H;
                let h00 = 2.0 * s.powi(3) - 3.0 * s * s + 1.0;
                let h10 = s.powi(3) - 2.0 * s * s + s;
                let h01 = -2.0 * s.powi(3) + 3.0 * s * s;
                let h11 = s.powi(3) - s * s;
                h00 * y[0] + h10 * H * y[1] + h01 * next[0] + h11 * H * next[1]
            };
            let (mut lo, mut hi) = (a, b);
            for _ in 0..80 {
                let mid = 0.5 * (lo + hi);
                if herm(mid) > 0.0 {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            return Some(0.5 * (lo + hi));
        }
        y = next;
        r += H;
    }
    None
}

/// Radius at which the solution of `u'' + (N-1)/r u' = u^q`, `u(0) = u0`,
/// reaches `level`. Integrates in `r` until `u = 10 u0`, then switches to
/// `y = ln u` as the independent variable, in which the approach to the
/// singularity is regular.
pub fn blowup_radius(n_dim: u32, q: f64, u0: f64, level: f64) -> f64 {
    let n = f64::from(n_dim);
    let f = |r: f64, y: &State| [y[1], y[0].powf(q) - (n - 1.0) / r * y[1], 0.0];
    let (u, v) = start(n, q, u0, 1.0);
    let mut r = R0;
    let mut y = [u, v, 0.0];
    while y[0] < 10.0 * u0 {
        y = rk4(&f, r, &y, H);
        r += H;
    }
    // State (r, v) over s = ln u: dr/ds = u/v, dv/ds = (u/v)(u^q - (N-1) v / r).
    let g = |s: f64, z: &State| {
        let u = s.exp();
        let drds = u / z[1];
        [drds, drds * (u.powf(q) - (n - 1.0) * z[1] / z[0]), 0.0]
    };
    let mut s = y[0].ln();
    let s_end = level.ln();
    let mut z = [r, y[1], 0.0];
    let steps = ((s_end - s) / 1e-5).ceil() as usize;
    let ds = (s_end - s) / steps as f64;
    for _ in 0..steps {
        z = rk4(&g, s, &z, ds);
        s += ds;
    }
    z[0]
}
