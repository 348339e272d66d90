//! Dormand-Prince 5(4) with error control and the standard quartic dense
//! output, specialised to small fixed-size states.

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;

// Difference between the 5th and embedded 4th order weights.
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

const SAFETY: f64 = 0.9;
const FAC_MIN: f64 = 0.2;
const FAC_MAX: f64 = 5.0;

#[derive(Debug, Clone, Copy)]
pub struct Options {
    pub rtol: f64,
    pub atol: f64,
    pub h_init: f64,
    pub max_steps: usize,
    /// Steps below `min_step_rel * |t|` count as a collapse.
    pub min_step_rel: f64,
}

impl Default for Options {
    fn default() -> Self {
        Self {
            rtol: 1e-10,
            atol: 1e-12,
            h_init: 1e-6,
            max_steps: 2_000_000,
            min_step_rel: 1e-14,
        }
    }
}

/// One accepted step with its continuous extension.
#[derive(Debug, Clone, Copy)]
pub struct DenseStep<const D: usize> {
    pub t0: f64,
    pub h: f64,
    pub y0: [f64; D],
    pub y1: [f64; D],
    cont: [[f64; D]; 4],
}

impl<const D: usize> DenseStep<D> {
    pub fn t1(&self) -> f64 {
        self.t0 + self.h
    }

    /// Dense output at `t` in `[t0, t0 + h]`.
    pub fn eval(&self, t: f64) -> [f64; D] {
        let th = (t - self.t0) / self.h;
        let th1 = 1.0 - th;
        let mut out = [0.0; D];
        for i in 0..D {
            let c = &self.cont;
            out[i] = self.y0[i] + th * (c[0][i] + th1 * (c[1][i] + th * (c[2][i] + th1 * c[3][i])));
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Control {
    Continue,
    Stop,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Termination {
    Reached(f64),
    Stopped(f64),
    StepCollapse(f64),
    MaxSteps(f64),
}

fn axpy<const D: usize>(y: &[f64; D], h: f64, terms: &[(f64, &[f64; D])]) -> [f64; D] {
    let mut out = *y;
    for (c, k) in terms {
        for i in 0..D {
            out[i] += h * c * k[i];
        }
    }
    out
}

/// Integrates `y' = f(t, y)` from `t0` towards `t_end`, handing every
/// accepted step to `on_step`. Non-finite stage values reject the step.
pub fn integrate<const D: usize, F, S>(
    f: F,
    t0: f64,
    y0: [f64; D],
    t_end: f64,
    opts: &Options,
    mut on_step: S,
) -> Termination
where
    F: Fn(f64, &[f64; D]) -> [f64; D],
    S: FnMut(&DenseStep<D>) -> Control,
{
    let mut t = t0;
    let mut y = y0;
    let mut k1 = f(t, &y);
    let mut h = opts.h_init.min(t_end - t0);
    for _ in 0..opts.max_steps {
        if t >= t_end {
            return Termination::Reached(t);
        }
        let last = t + h >= t_end;
        if last {
            h = t_end - t;
        }
        let k2 = f(t + C2 * h, &axpy(&y, h, &[(A21, &k1)]));
        let k3 = f(t + C3 * h, &axpy(&y, h, &[(A31, &k1), (A32, &k2)]));
        let k4 = f(t + C4 * h, &axpy(&y, h, &[(A41, &k1), (A42, &k2), (A43, &k3)]));
        let k5 = f(
            t + C5 * h,
            &axpy(&y, h, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)]),
        );
        let k6 = f(
            t + h,
            &axpy(&y, h, &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)]),
        );
        let y_new = axpy(&y, h, &[(A71, &k1), (A73, &k3), (A74, &k4), (A75, &k5), (A76, &k6)]);
        let k7 = f(t + h, &y_new);

        let mut err_sq = 0.0;
        let mut finite = true;
        for i in 0..D {
            let e = h * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
            let sc = opts.atol + opts.rtol * y[i].abs().max(y_new[i].abs());
            err_sq += (e / sc).powi(2);
            finite &= y_new[i].is_finite() && k7[i].is_finite();
        }
        let err = if finite {
            (err_sq / D as f64).sqrt()
        } else {
            f64::INFINITY
        };

        if err <= 1.0 {
            let mut cont = [[0.0; D]; 4];
            for i in 0..D {
                let dy = y_new[i] - y[i];
                let bspl = h * k1[i] - dy;
                cont[0][i] = dy;
                cont[1][i] = bspl;
                cont[2][i] = dy - h * k7[i] - bspl;
                cont[3][i] = h * (D1 * k1[i] + D3 * k3[i] + D4 * k4[i] + D5 * k5[i] + D6 * k6[i] + D7 * k7[i]);
            }
            let step = DenseStep {
                t0: t,
                h,
                y0: y,
                y1: y_new,
                cont,
            };
            t = if last { t_end } else { t + h };
            y = y_new;
            k1 = k7;
            if on_step(&step) == Control::Stop {
                return Termination::Stopped(t);
            }
            if last {
                return Termination::Reached(t);
            }
            let fac = if err == 0.0 {
                FAC_MAX
            } else {
                (SAFETY * err.powf(-0.2)).clamp(FAC_MIN, FAC_MAX)
            };
            h *= fac;
        } else {
            let fac = if err.is_finite() {
                (SAFETY * err.powf(-0.2)).clamp(FAC_MIN, 1.0)
            } else {
                0.1
            };
            h *= fac;
        }
        if h < opts.min_step_rel * t.abs().max(f64::MIN_POSITIVE) {
            return Termination::StepCollapse(t);
        }
    }
    Termination::MaxSteps(t)
}

/// Bisection for a sign change of `g` on `[a, b]`, assuming `g(a) g(b) <= 0`.
pub fn bisect<G: Fn(f64) -> f64>(g: G, mut a: f64, mut b: f64, rel_tol: f64) -> f64 {
    let mut ga = g(a);
    while (b - a) > rel_tol * b.abs() {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        let gm = g(m);
        if (gm <= 0.0) == (ga <= 0.0) {
            a = m;
            ga = gm;
        } else {
            b = m;
        }
    }
    0.5 * (a + b)
}
