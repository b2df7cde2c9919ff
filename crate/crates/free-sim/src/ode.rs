//! Adaptive Dormand–Prince 5(4) integration with dense output.
//!
//! This is the classic explicit embedded Runge–Kutta pair: a 5th-order
//! solution advanced with 6 fresh function evaluations per step (FSAL — the
//! 7th stage is reused as the first stage of the next step), a 4th-order
//! companion for local error estimation, PI step-size stabilization, and the
//! standard 5-coefficient quartic interpolant for dense output between
//! accepted steps.
//!
//! The right-hand side returns `Result`, so model-level failures (kinematic
//! domain violations, radius singularities) abort the integration cleanly
//! with the failure time attached instead of poisoning the state with NaNs.

use thiserror::Error;

/// Relative/absolute local error tolerances. Defaults to 1e−6/1e−6, the
/// setting the reference trajectories were produced with.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    pub rel: f64,
    pub abs: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            rel: 1e-6,
            abs: 1e-6,
        }
    }
}

impl Tolerances {
    pub fn new(rel: f64, abs: f64) -> Self {
        Self { rel, abs }
    }
}

/// Integration options beyond the tolerances.
#[derive(Debug, Clone)]
pub struct Options {
    pub tol: Tolerances,
    /// Initial step; estimated from the problem when `None`.
    pub h0: Option<f64>,
    /// Hard step ceiling; the span when `None`.
    pub h_max: Option<f64>,
    /// Abort threshold on accepted + rejected steps.
    pub max_steps: usize,
    /// Keep per-step interpolation coefficients for later resampling.
    pub dense: bool,
}

impl Default for Options {
    fn default() -> Self {
        Self {
            tol: Tolerances::default(),
            h0: None,
            h_max: None,
            max_steps: 1_000_000,
            dense: true,
        }
    }
}

/// Integration failure: either the model rejected a state or the step
/// control collapsed.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum SolveError<E> {
    #[error("right-hand side failed at t = {t}: {cause}")]
    Rhs { t: f64, cause: E },
    #[error("step size underflow at t = {t} (h = {h:.3e})")]
    StepSizeUnderflow { t: f64, h: f64 },
    #[error("exceeded {max_steps} steps at t = {t}")]
    MaxSteps { t: f64, max_steps: usize },
    #[error("invalid integration setup: {0}")]
    BadInput(String),
}

/// Dense-output coefficients for one accepted step.
#[derive(Debug, Clone)]
struct DenseSegment<const N: usize> {
    t0: f64,
    h: f64,
    cont: [[f64; N]; 5],
}

impl<const N: usize> DenseSegment<N> {
    fn eval(&self, t: f64) -> [f64; N] {
        let s = if self.h == 0.0 {
            0.0
        } else {
            (t - self.t0) / self.h
        };
        let s1 = 1.0 - s;
        let mut y = [0.0; N];
        let [c0, c1, c2, c3, c4] = &self.cont;
        for i in 0..N {
            y[i] = c0[i] + s * (c1[i] + s1 * (c2[i] + s * (c3[i] + s1 * c4[i])));
        }
        y
    }
}

/// Interpolable solution over the integration span.
#[derive(Debug, Clone)]
pub struct DenseOutput<const N: usize> {
    segments: Vec<DenseSegment<N>>,
    t_end: f64,
    y_end: [f64; N],
}

impl<const N: usize> DenseOutput<N> {
    /// Evaluate the interpolant at `t`. Returns `None` outside the span
    /// (beyond a small round-off allowance at the ends).
    pub fn sample(&self, t: f64) -> Option<[f64; N]> {
        let first = self.segments.first()?;
        let slack = 1e-12 * (self.t_end - first.t0).abs().max(1.0);
        if t < first.t0 - slack || t > self.t_end + slack {
            return None;
        }
        if t >= self.t_end {
            return Some(self.y_end);
        }
        // Last segment whose start lies at or before t.
        let idx = match self.segments.partition_point(|seg| seg.t0 <= t) {
            0 => 0,
            k => k - 1,
        };
        Some(self.segments[idx].eval(t))
    }
}

/// Result of an adaptive integration: states at accepted steps plus optional
/// dense output and work counters.
#[derive(Debug, Clone)]
pub struct Solution<const N: usize> {
    pub t: Vec<f64>,
    pub y: Vec<[f64; N]>,
    pub dense: Option<DenseOutput<N>>,
    pub n_accepted: usize,
    pub n_rejected: usize,
    pub n_evals: usize,
}

impl<const N: usize> Solution<N> {
    pub fn last(&self) -> (f64, [f64; N]) {
        (*self.t.last().unwrap(), *self.y.last().unwrap())
    }

    /// Dense-output sample; requires the run to have kept dense data.
    pub fn sample(&self, t: f64) -> Option<[f64; N]> {
        self.dense.as_ref()?.sample(t)
    }
}

// Dormand–Prince 5(4) tableau.
const A2: [f64; 1] = [0.2];
const A3: [f64; 2] = [3.0 / 40.0, 9.0 / 40.0];
const A4: [f64; 3] = [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0];
const A5: [f64; 4] = [
    19372.0 / 6561.0,
    -25360.0 / 2187.0,
    64448.0 / 6561.0,
    -212.0 / 729.0,
];
const A6: [f64; 5] = [
    9017.0 / 3168.0,
    -355.0 / 33.0,
    46732.0 / 5247.0,
    49.0 / 176.0,
    -5103.0 / 18656.0,
];
const C: [f64; 6] = [0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0];
const B: [f64; 7] = [
    35.0 / 384.0,
    0.0,
    500.0 / 1113.0,
    125.0 / 192.0,
    -2187.0 / 6784.0,
    11.0 / 84.0,
    0.0,
];
const ER: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];
const D: [f64; 7] = [
    -12715105075.0 / 11282082432.0,
    0.0,
    87487479700.0 / 32700410799.0,
    -10690763975.0 / 1880347072.0,
    701980252875.0 / 199316789632.0,
    -1453857185.0 / 822651844.0,
    69997945.0 / 29380423.0,
];

// PI step-control constants (Hairer's DOPRI5 defaults).
const SAFE: f64 = 0.9;
const BETA: f64 = 0.04;
const EXPO1: f64 = 0.2;
const FAC_SHRINK_MAX: f64 = 5.0; // new step no smaller than h/5
const FAC_GROW_MAX: f64 = 0.1; // new step no larger than 10·h

/// Integrate `y' = f(t, y)` from `t0` to `t_end` (forward only).
pub fn solve<const N: usize, E, F>(
    mut f: F,
    t0: f64,
    t_end: f64,
    y0: [f64; N],
    opts: &Options,
) -> Result<Solution<N>, SolveError<E>>
where
    F: FnMut(f64, &[f64; N]) -> Result<[f64; N], E>,
{
    if !(t_end.is_finite() && t0.is_finite() && t_end > t0) {
        return Err(SolveError::BadInput(format!(
            "need finite t_end > t0, got [{t0}, {t_end}]"
        )));
    }
    if !(opts.tol.rel > 0.0 && opts.tol.abs > 0.0) {
        return Err(SolveError::BadInput("tolerances must be positive".into()));
    }
    let span = t_end - t0;
    let h_max = opts.h_max.unwrap_or(span).min(span);
    let (rtol, atol) = (opts.tol.rel, opts.tol.abs);

    let mut n_evals = 0usize;
    let mut eval = |t: f64, y: &[f64; N], n_evals: &mut usize| -> Result<[f64; N], SolveError<E>> {
        *n_evals += 1;
        f(t, y).map_err(|cause| SolveError::Rhs { t, cause })
    };

    let mut t = t0;
    let mut y = y0;
    let mut k1 = eval(t, &y, &mut n_evals)?;

    let mut h = match opts.h0 {
        Some(h0) if h0 > 0.0 => h0.min(h_max),
        _ => initial_step(&mut eval, t, &y, &k1, rtol, atol, h_max, &mut n_evals)?,
    };

    let mut out_t = vec![t];
    let mut out_y = vec![y];
    let mut segments: Vec<DenseSegment<N>> = Vec::new();

    let mut facold = 1e-4f64;
    let mut last_rejected = false;
    let mut n_accepted = 0usize;
    let mut n_rejected = 0usize;
    let mut n_steps = 0usize;

    while t < t_end {
        if n_steps >= opts.max_steps {
            return Err(SolveError::MaxSteps {
                t,
                max_steps: opts.max_steps,
            });
        }
        n_steps += 1;

        let h_floor = 10.0 * f64::EPSILON * t.abs().max(span);
        if h <= h_floor {
            return Err(SolveError::StepSizeUnderflow { t, h });
        }
        let hitting_end = t + 1.01 * h >= t_end;
        if hitting_end {
            h = t_end - t;
        }

        // Stages 2–6.
        let mut k = [[0.0; N]; 7];
        k[0] = k1;
        let rows: [&[f64]; 5] = [&A2, &A3, &A4, &A5, &A6];
        for (j, row) in rows.iter().enumerate() {
            let mut yi = y;
            for (l, &a) in row.iter().enumerate() {
                if a != 0.0 {
                    for i in 0..N {
                        yi[i] += h * a * k[l][i];
                    }
                }
            }
            k[j + 1] = eval(t + C[j] * h, &yi, &mut n_evals)?;
        }

        // 5th-order solution and the FSAL stage at t + h.
        let mut y_new = y;
        for (j, &b) in B.iter().enumerate() {
            if b != 0.0 {
                for i in 0..N {
                    y_new[i] += h * b * k[j][i];
                }
            }
        }
        let t_new = if hitting_end { t_end } else { t + h };
        k[6] = eval(t_new, &y_new, &mut n_evals)?;

        // Embedded error estimate against the 4th-order companion.
        let mut err_sq = 0.0;
        for i in 0..N {
            let sc = atol + rtol * y[i].abs().max(y_new[i].abs());
            let mut e = 0.0;
            for (j, &ej) in ER.iter().enumerate() {
                if ej != 0.0 {
                    e += ej * k[j][i];
                }
            }
            err_sq += (h * e / sc).powi(2);
        }
        let err = (err_sq / N as f64).sqrt();

        let fac11 = err.powf(EXPO1);
        if err <= 1.0 {
            n_accepted += 1;

            if opts.dense {
                let mut cont = [[0.0; N]; 5];
                for i in 0..N {
                    let ydiff = y_new[i] - y[i];
                    let bspl = h * k[0][i] - ydiff;
                    let mut dsum = 0.0;
                    for (j, &dj) in D.iter().enumerate() {
                        if dj != 0.0 {
                            dsum += dj * k[j][i];
                        }
                    }
                    cont[0][i] = y[i];
                    cont[1][i] = ydiff;
                    cont[2][i] = bspl;
                    cont[3][i] = ydiff - h * k[6][i] - bspl;
                    cont[4][i] = h * dsum;
                }
                segments.push(DenseSegment { t0: t, h, cont });
            }

            k1 = k[6];
            y = y_new;
            t = t_new;
            out_t.push(t);
            out_y.push(y);

            // PI controller: damp growth by the history of the error.
            let fac = (fac11 / facold.powf(BETA) / SAFE).clamp(FAC_GROW_MAX, FAC_SHRINK_MAX);
            facold = err.max(1e-4);
            let mut h_new = h / fac;
            if last_rejected {
                h_new = h_new.min(h);
                last_rejected = false;
            }
            h = h_new.min(h_max);
        } else {
            n_rejected += 1;
            last_rejected = true;
            h /= (fac11 / SAFE).min(FAC_SHRINK_MAX);
        }
    }

    let dense = opts.dense.then_some(DenseOutput {
        segments,
        t_end: t,
        y_end: y,
    });
    Ok(Solution {
        t: out_t,
        y: out_y,
        dense,
        n_accepted,
        n_rejected,
        n_evals,
    })
}

/// Hairer's starting-step heuristic: balance the scaled sizes of y and y'
/// and probe the local second derivative with one Euler step.
#[allow(clippy::too_many_arguments)]
fn initial_step<const N: usize, E>(
    eval: &mut impl FnMut(f64, &[f64; N], &mut usize) -> Result<[f64; N], SolveError<E>>,
    t0: f64,
    y0: &[f64; N],
    f0: &[f64; N],
    rtol: f64,
    atol: f64,
    h_max: f64,
    n_evals: &mut usize,
) -> Result<f64, SolveError<E>> {
    let mut d0 = 0.0;
    let mut d1 = 0.0;
    for i in 0..N {
        let sc = atol + rtol * y0[i].abs();
        d0 += (y0[i] / sc).powi(2);
        d1 += (f0[i] / sc).powi(2);
    }
    d0 = (d0 / N as f64).sqrt();
    d1 = (d1 / N as f64).sqrt();

    let mut h = if d0 < 1e-5 || d1 < 1e-5 {
        1e-6
    } else {
        0.01 * (d0 / d1)
    };
    h = h.min(h_max);

    let mut y1 = *y0;
    for i in 0..N {
        y1[i] += h * f0[i];
    }
    let f1 = eval(t0 + h, &y1, n_evals)?;

    let mut d2 = 0.0;
    for i in 0..N {
        let sc = atol + rtol * y0[i].abs();
        d2 += ((f1[i] - f0[i]) / sc).powi(2);
    }
    d2 = (d2 / N as f64).sqrt() / h;

    let dm = d1.max(d2);
    let h1 = if dm <= 1e-15 {
        (h * 1e-3).max(1e-6)
    } else {
        (0.01 / dm).powf(0.2)
    };
    Ok((100.0 * h).min(h1).min(h_max))
}
