//! Adaptive Dormand-Prince 5(4) integration with event localization.
//!
//! Events are scalar functions of `(t, y)`. A sign change inside an accepted
//! step is localized by bisecting the step length and re-taking a single
//! step from the step's start state, so the located state carries the same
//! fifth-order accuracy as ordinary steps.

use crate::error::{Error, Result};

/// Right-hand side of `y' = f(t, y)`.
pub trait OdeSystem<const N: usize> {
    fn rhs(&self, t: f64, y: &[f64; N]) -> [f64; N];
}

impl<F, const N: usize> OdeSystem<N> for F
where
    F: Fn(f64, &[f64; N]) -> [f64; N],
{
    fn rhs(&self, t: f64, y: &[f64; N]) -> [f64; N] {
        self(t, y)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegratorOptions {
    pub rtol: f64,
    pub atol: f64,
    pub h_init: f64,
    pub h_max: f64,
    pub h_min: f64,
    /// Width below which event bisection stops, in time units.
    pub event_tol: f64,
    pub max_steps: usize,
}

impl Default for IntegratorOptions {
    fn default() -> Self {
        Self {
            rtol: 1e-9,
            atol: 1e-12,
            h_init: 1e-5,
            h_max: f64::INFINITY,
            h_min: 1e-14,
            event_tol: 1e-12,
            max_steps: 10_000_000,
        }
    }
}

/// Which sign changes of an event function count as crossings.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    /// From negative to non-negative.
    Rising,
    /// From positive to non-positive.
    Falling,
    Either,
}

impl Direction {
    fn crossed(self, g0: f64, g1: f64) -> bool {
        match self {
            Direction::Rising => g0 < 0.0 && g1 >= 0.0,
            Direction::Falling => g0 > 0.0 && g1 <= 0.0,
            Direction::Either => (g0 < 0.0 && g1 >= 0.0) || (g0 > 0.0 && g1 <= 0.0),
        }
    }
}

/// Event function `g(t, y)`; a root marks the event.
pub type EventFn<'a, const N: usize> = Box<dyn Fn(f64, &[f64; N]) -> f64 + 'a>;

pub struct Event<'a, const N: usize> {
    pub g: EventFn<'a, N>,
    pub direction: Direction,
    /// Stop integration at the first crossing.
    pub terminal: bool,
}

impl<'a, const N: usize> Event<'a, N> {
    pub fn new(
        g: impl Fn(f64, &[f64; N]) -> f64 + 'a,
        direction: Direction,
        terminal: bool,
    ) -> Self {
        Self {
            g: Box::new(g),
            direction,
            terminal,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EventHit<const N: usize> {
    /// Index into the event slice.
    pub index: usize,
    pub t: f64,
    pub y: [f64; N],
}

#[derive(Debug, Clone, PartialEq)]
pub struct Solution<const N: usize> {
    /// Accepted step times, starting at `t0`; the last entry is the terminal
    /// event time or `t_end`.
    pub t: Vec<f64>,
    pub y: Vec<[f64; N]>,
    /// Every located crossing in time order, terminal one included.
    pub hits: Vec<EventHit<N>>,
    /// The terminal crossing that stopped integration, if any.
    pub terminal: Option<EventHit<N>>,
}

// Dormand-Prince tableau.
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
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
// b - b* (fifth minus fourth order weights).
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

fn combine<const N: usize>(y: &[f64; N], h: f64, terms: &[(f64, &[f64; N])]) -> [f64; N] {
    let mut out = *y;
    for (i, o) in out.iter_mut().enumerate() {
        let mut acc = 0.0;
        for (w, k) in terms {
            acc += w * k[i];
        }
        *o += h * acc;
    }
    out
}

/// One Dormand-Prince step. Returns the fifth-order state and the embedded
/// error estimate.
fn dp_step<S: OdeSystem<N> + ?Sized, const N: usize>(
    sys: &S,
    t: f64,
    y: &[f64; N],
    h: f64,
) -> ([f64; N], [f64; N]) {
    let k1 = sys.rhs(t, y);
    let k2 = sys.rhs(t + C2 * h, &combine(y, h, &[(A21, &k1)]));
    let k3 = sys.rhs(t + C3 * h, &combine(y, h, &[(A31, &k1), (A32, &k2)]));
    let k4 = sys.rhs(
        t + C4 * h,
        &combine(y, h, &[(A41, &k1), (A42, &k2), (A43, &k3)]),
    );
    let k5 = sys.rhs(
        t + C5 * h,
        &combine(y, h, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)]),
    );
    let k6 = sys.rhs(
        t + h,
        &combine(
            y,
            h,
            &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)],
        ),
    );
    let y5 = combine(
        y,
        h,
        &[(B1, &k1), (B3, &k3), (B4, &k4), (B5, &k5), (B6, &k6)],
    );
    let k7 = sys.rhs(t + h, &y5);
    let mut err = [0.0; N];
    for i in 0..N {
        err[i] = h * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
    }
    (y5, err)
}

fn error_norm<const N: usize>(
    y0: &[f64; N],
    y1: &[f64; N],
    err: &[f64; N],
    opts: &IntegratorOptions,
) -> f64 {
    let mut sum = 0.0;
    for i in 0..N {
        let scale = opts.atol + opts.rtol * y0[i].abs().max(y1[i].abs());
        let r = err[i] / scale;
        sum += r * r;
    }
    (sum / N as f64).sqrt()
}

/// Integrates from `(t0, y0)` to `t_end` or the first terminal event.
pub fn integrate<S, const N: usize>(
    sys: &S,
    t0: f64,
    y0: [f64; N],
    t_end: f64,
    events: &[Event<'_, N>],
    opts: &IntegratorOptions,
) -> Result<Solution<N>>
where
    S: OdeSystem<N> + ?Sized,
{
    let mut t = t0;
    let mut y = y0;
    let mut h = opts.h_init.min(opts.h_max).min(t_end - t0);
    let mut sol = Solution {
        t: vec![t0],
        y: vec![y0],
        hits: Vec::new(),
        terminal: None,
    };
    let mut g_prev: Vec<f64> = events.iter().map(|e| (e.g)(t, &y)).collect();
    let mut steps = 0usize;

    while t < t_end {
        steps += 1;
        if steps > opts.max_steps || h < opts.h_min {
            return Err(Error::StepSizeUnderflow(t));
        }
        let last = t + h >= t_end;
        let h_try = if last { t_end - t } else { h };
        let (y_new, err) = dp_step(sys, t, &y, h_try);
        let norm = error_norm(&y, &y_new, &err, opts);
        if !norm.is_finite() || norm > 1.0 {
            let factor = if norm.is_finite() {
                (0.9 * norm.powf(-0.2)).clamp(0.1, 1.0)
            } else {
                0.1
            };
            h = h_try * factor;
            continue;
        }
        let t_new = if last { t_end } else { t + h_try };

        // Locate crossings inside the accepted step.
        let mut found: Vec<EventHit<N>> = Vec::new();
        let mut g_new = Vec::with_capacity(events.len());
        for (index, event) in events.iter().enumerate() {
            let g1 = (event.g)(t_new, &y_new);
            g_new.push(g1);
            if event.direction.crossed(g_prev[index], g1) {
                found.push(locate(sys, event, index, t, &y, h_try, g_prev[index], opts));
            }
        }
        found.sort_by(|a, b| a.t.total_cmp(&b.t));
        let stop = found.iter().position(|hit| events[hit.index].terminal);
        if let Some(pos) = stop {
            let hit = found[pos];
            sol.hits.extend_from_slice(&found[..=pos]);
            sol.t.push(hit.t);
            sol.y.push(hit.y);
            sol.terminal = Some(hit);
            return Ok(sol);
        }
        sol.hits.extend(found);

        t = t_new;
        y = y_new;
        g_prev = g_new;
        sol.t.push(t);
        sol.y.push(y);

        let factor = if norm == 0.0 {
            5.0
        } else {
            (0.9 * norm.powf(-0.2)).clamp(0.2, 5.0)
        };
        h = (h_try * factor).min(opts.h_max);
    }
    Ok(sol)
}

#[allow(clippy::too_many_arguments)]
fn locate<S, const N: usize>(
    sys: &S,
    event: &Event<'_, N>,
    index: usize,
    t: f64,
    y: &[f64; N],
    h: f64,
    g0: f64,
    opts: &IntegratorOptions,
) -> EventHit<N>
where
    S: OdeSystem<N> + ?Sized,
{
    let (mut lo, mut hi) = (0.0, h);
    let mut y_hi = dp_step(sys, t, y, h).0;
    while hi - lo > opts.event_tol {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let y_mid = dp_step(sys, t, y, mid).0;
        let g_mid = (event.g)(t + mid, &y_mid);
        if event.direction.crossed(g0, g_mid) {
            hi = mid;
            y_hi = y_mid;
        } else {
            lo = mid;
        }
    }
    EventHit {
        index,
        t: t + hi,
        y: y_hi,
    }
}
