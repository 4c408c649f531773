//! Dormand–Prince 5(4) stepping for a two-component first-order system.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A2: [f64; 1] = [1.0 / 5.0];
const A3: [f64; 2] = [3.0 / 40.0, 9.0 / 40.0];
const A4: [f64; 3] = [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0];
const A5: [f64; 4] = [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0];
const A6: [f64; 5] = [
    9017.0 / 3168.0,
    -355.0 / 33.0,
    46732.0 / 5247.0,
    49.0 / 176.0,
    -5103.0 / 18656.0,
];
const B: [f64; 7] = [
    35.0 / 384.0,
    0.0,
    500.0 / 1113.0,
    125.0 / 192.0,
    -2187.0 / 6784.0,
    11.0 / 84.0,
    0.0,
];
// Fifth- minus fourth-order weights.
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

const MAX_STEPS_PER_SEGMENT: usize = 200_000;

pub type State = [f64; 2];

/// Step-controller bookkeeping.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntegrationStats {
    pub accepted: usize,
    pub rejected: usize,
    pub evaluations: usize,
}

impl IntegrationStats {
    pub fn merge(&mut self, other: IntegrationStats) {
        self.accepted += other.accepted;
        self.rejected += other.rejected;
        self.evaluations += other.evaluations;
    }
}

#[inline]
fn axpy(y: &State, h: f64, coeffs: &[f64], k: &[State]) -> State {
    let mut out = *y;
    for (a, kj) in coeffs.iter().zip(k) {
        out[0] += h * a * kj[0];
        out[1] += h * a * kj[1];
    }
    out
}

/// Outcome of one segment: end state, summed relative error estimate, and
/// the last accepted step (used to seed the next segment).
pub struct Segment {
    pub y: State,
    pub error: f64,
    pub h: f64,
}

/// Advance `y` from `t0` to `t1` (either direction). The error of a step is
/// measured against `rtol * (|y_0| + |y_1|)`.
pub fn segment<F>(
    f: &mut F,
    t0: f64,
    t1: f64,
    y0: State,
    h_guess: f64,
    rtol: f64,
    stats: &mut IntegrationStats,
) -> Result<Segment>
where
    F: FnMut(f64, &State) -> State,
{
    let span = t1 - t0;
    if span == 0.0 {
        return Ok(Segment { y: y0, error: 0.0, h: h_guess });
    }
    let dir = span.signum();
    let mut h = h_guess.abs().min(span.abs()).max(1e-12 * span.abs()) * dir;
    let mut t = t0;
    let mut y = y0;
    let mut k = [[0.0; 2]; 7];
    k[0] = f(t, &y);
    stats.evaluations += 1;
    let mut error = 0.0;

    for _ in 0..MAX_STEPS_PER_SEGMENT {
        let remaining = t1 - t;
        let last = h.abs() >= remaining.abs();
        if last {
            h = remaining;
        }
        k[1] = f(t + C[1] * h, &axpy(&y, h, &A2, &k[..1]));
        k[2] = f(t + C[2] * h, &axpy(&y, h, &A3, &k[..2]));
        k[3] = f(t + C[3] * h, &axpy(&y, h, &A4, &k[..3]));
        k[4] = f(t + C[4] * h, &axpy(&y, h, &A5, &k[..4]));
        k[5] = f(t + C[5] * h, &axpy(&y, h, &A6, &k[..5]));
        let y_new = axpy(&y, h, &B[..6], &k[..6]);
        let t_new = if last { t1 } else { t + h };
        k[6] = f(t_new, &y_new);
        stats.evaluations += 6;

        let mut err = [0.0; 2];
        for (e, kj) in E.iter().zip(&k) {
            err[0] += h * e * kj[0];
            err[1] += h * e * kj[1];
        }
        let scale = rtol * (y[0].abs().max(y_new[0].abs()) + y[1].abs().max(y_new[1].abs()));
        let norm = (err[0].abs() + err[1].abs()) / scale.max(f64::MIN_POSITIVE);
        if !norm.is_finite() || !y_new[0].is_finite() || !y_new[1].is_finite() {
            return Err(Error::Breakdown(format!(
                "non-finite state while stepping from t = {t} with h = {h:e}"
            )));
        }

        if norm <= 1.0 {
            stats.accepted += 1;
            error += norm * rtol;
            t = t_new;
            y = y_new;
            k[0] = k[6];
            let last_h = h;
            let grow = if norm == 0.0 { 5.0 } else { (0.9 * norm.powf(-0.2)).clamp(0.2, 5.0) };
            h *= grow;
            if last {
                return Ok(Segment { y, error, h: last_h });
            }
        } else {
            stats.rejected += 1;
            h *= (0.9 * norm.powf(-0.2)).clamp(0.2, 1.0);
            if h.abs() <= 1e-14 * t.abs().max(1.0) {
                return Err(Error::Breakdown(format!("step-size underflow at t = {t}")));
            }
        }
    }
    Err(Error::NonConvergence {
        what: "radial integration",
        iterations: MAX_STEPS_PER_SEGMENT,
        detail: format!("segment [{t0}, {t1}] not finished"),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn harmonic_oscillator() {
        // y'' = -y
        let mut f = |_t: f64, y: &State| [y[1], -y[0]];
        let mut stats = IntegrationStats::default();
        let seg = segment(&mut f, 0.0, 10.0, [1.0, 0.0], 0.1, 1e-12, &mut stats).unwrap();
        assert!((seg.y[0] - 10f64.cos()).abs() < 1e-9);
        assert!((seg.y[1] + 10f64.sin()).abs() < 1e-9);
        assert!(stats.accepted > 0);
    }

    #[test]
    fn backwards_exponential() {
        let mut f = |_t: f64, y: &State| [y[1], y[0]];
        let mut stats = IntegrationStats::default();
        let seg = segment(&mut f, 2.0, 0.0, [2f64.exp(), 2f64.exp()], 0.1, 1e-12, &mut stats).unwrap();
        assert!((seg.y[0] - 1.0).abs() < 1e-10);
    }
}
