use super::{check_start, Bounds, MinimizeOptions, Minimum, Scaled};
use crate::error::Result;

const GOLDEN: f64 = 1.618_033_988_749_895;
const INV_GOLDEN: f64 = 0.618_033_988_749_895;

/// Range of `t` keeping `p + t d` inside the unit box.
fn feasible_range(p: &[f64], d: &[f64]) -> (f64, f64) {
    let (mut lo, mut hi) = (f64::NEG_INFINITY, f64::INFINITY);
    for (x, dx) in p.iter().zip(d) {
        if dx.abs() < 1e-300 {
            continue;
        }
        let (a, b) = ((0.0 - x) / dx, (1.0 - x) / dx);
        lo = lo.max(a.min(b));
        hi = hi.min(a.max(b));
    }
    (lo.min(0.0), hi.max(0.0))
}

fn point(p: &[f64], d: &[f64], t: f64) -> Vec<f64> {
    p.iter()
        .zip(d)
        .map(|(x, dx)| (x + t * dx).clamp(0.0, 1.0))
        .collect()
}

/// Minimizes along `d` from `p` (where the objective is `fp`): brackets a
/// minimum inside the feasible segment, then golden-section to `tol`.
/// Returns the step taken and the objective there; never worse than `fp`.
fn line_minimize<F: FnMut(&[f64]) -> f64>(
    f: &mut Scaled<'_, F>,
    p: &[f64],
    d: &[f64],
    fp: f64,
    step: f64,
    tol: f64,
) -> (f64, f64) {
    let (t_lo, t_hi) = feasible_range(p, d);
    if t_hi - t_lo < tol {
        return (0.0, fp);
    }
    let mut eval = |t: f64| f.eval(&point(p, d, t));

    // Pick the downhill side.
    let mut best = (0.0, fp);
    let h_fwd = step.min(t_hi);
    let h_bwd = (-step).max(t_lo);
    let (a, mut b, mut fb, limit) = {
        let f_fwd = if h_fwd > 0.0 {
            eval(h_fwd)
        } else {
            f64::INFINITY
        };
        if f_fwd < fp {
            (0.0, h_fwd, f_fwd, t_hi)
        } else {
            let f_bwd = if h_bwd < 0.0 {
                eval(h_bwd)
            } else {
                f64::INFINITY
            };
            if f_bwd < fp {
                (0.0, h_bwd, f_bwd, t_lo)
            } else {
                // Minimum already bracketed by the two trial steps.
                return golden(&mut eval, h_bwd, h_fwd, tol, best);
            }
        }
    };
    best = (b, fb);

    // Expand until the objective rises or the bound is reached.
    let mut prev = a;
    loop {
        let mut c = b + GOLDEN * (b - prev);
        let at_bound = if limit > 0.0 { c >= limit } else { c <= limit };
        if at_bound {
            c = limit;
        }
        if (c - b).abs() < tol {
            return golden(&mut eval, prev, b, tol, best);
        }
        let fc = eval(c);
        if fc >= fb {
            return golden(&mut eval, prev, c, tol, best);
        }
        best = (c, fc);
        if at_bound {
            return golden(&mut eval, b, c, tol, best);
        }
        prev = b;
        b = c;
        fb = fc;
    }
}

fn golden(
    eval: &mut impl FnMut(f64) -> f64,
    a: f64,
    c: f64,
    tol: f64,
    mut best: (f64, f64),
) -> (f64, f64) {
    let (mut lo, mut hi) = (a.min(c), a.max(c));
    let mut x1 = hi - INV_GOLDEN * (hi - lo);
    let mut x2 = lo + INV_GOLDEN * (hi - lo);
    let mut f1 = eval(x1);
    let mut f2 = eval(x2);
    while hi - lo > tol {
        if f1 < f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_GOLDEN * (hi - lo);
            f1 = eval(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_GOLDEN * (hi - lo);
            f2 = eval(x2);
        }
        for cand in [(x1, f1), (x2, f2)] {
            if cand.1 < best.1 {
                best = cand;
            }
        }
    }
    for cand in [(x1, f1), (x2, f2)] {
        if cand.1 < best.1 {
            best = cand;
        }
    }
    best
}

fn normalized(v: &[f64]) -> Option<Vec<f64>> {
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    (norm > 1e-300).then(|| v.iter().map(|x| x / norm).collect())
}

/// Powell's conjugate direction-set method with golden-section line
/// searches, restricted to the bounds.
pub fn powell_minimize<F>(
    objective: F,
    bounds: &Bounds,
    x0: &[f64],
    opts: &MinimizeOptions,
) -> Result<Minimum>
where
    F: FnMut(&[f64]) -> f64,
{
    check_start(bounds, x0)?;
    let n = bounds.dim();
    let mut f = Scaled {
        objective,
        bounds,
        evaluations: 0,
    };
    let mut directions: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
        .collect();
    let mut p = bounds.box_to_unit(x0);
    let mut fp = f.eval(&p);
    let mut history = Vec::new();
    let mut iterations = 0;
    let mut converged = false;

    while iterations < opts.max_iterations {
        iterations += 1;
        let p_start = p.clone();
        let f_start = fp;
        let (mut biggest, mut biggest_drop) = (0, 0.0);
        for (i, d) in directions.iter().enumerate() {
            let before = fp;
            let (t, ft) = line_minimize(&mut f, &p, d, fp, opts.initial_step, opts.line_tol);
            if ft < fp {
                p = point(&p, d, t);
                fp = ft;
            }
            if before - fp > biggest_drop {
                biggest_drop = before - fp;
                biggest = i;
            }
        }

        let moved: Vec<f64> = p.iter().zip(&p_start).map(|(a, b)| a - b).collect();
        let step = moved.iter().map(|x| x.abs()).fold(0.0, f64::max);
        if f_start - fp < opts.f_tol || step < opts.x_tol {
            history.push(fp);
            converged = true;
            break;
        }

        // Replace the direction of largest decrease with the net move when
        // the extrapolated point says the move is worth keeping.
        let extrapolated = point(&p, &moved, 1.0);
        let fe = f.eval(&extrapolated);
        if fe < f_start {
            let t = 2.0 * (f_start - 2.0 * fp + fe) * (f_start - fp - biggest_drop).powi(2)
                - biggest_drop * (f_start - fe).powi(2);
            if t < 0.0 {
                if let Some(d) = normalized(&moved) {
                    let (s, fs) =
                        line_minimize(&mut f, &p, &d, fp, opts.initial_step, opts.line_tol);
                    if fs < fp {
                        p = point(&p, &d, s);
                        fp = fs;
                    }
                    directions.swap_remove(biggest);
                    directions.push(d);
                }
            }
        }
        history.push(fp);
    }

    Ok(Minimum {
        x: bounds.unit_to_box(&p),
        f: fp,
        iterations,
        evaluations: f.evaluations,
        converged,
        history,
    })
}
