use super::{check_start, Bounds, MinimizeOptions, Minimum, Scaled};
use crate::error::Result;

const REFLECT: f64 = 1.0;
const EXPAND: f64 = 2.0;
const CONTRACT: f64 = 0.5;
const SHRINK: f64 = 0.5;

fn project(u: &mut [f64]) {
    for v in u {
        *v = v.clamp(0.0, 1.0);
    }
}

/// `c + t (c - w)`, projected onto the unit box.
fn along(c: &[f64], w: &[f64], t: f64) -> Vec<f64> {
    let mut out: Vec<f64> = c.iter().zip(w).map(|(c, w)| c + t * (c - w)).collect();
    project(&mut out);
    out
}

fn initial_simplex<F: FnMut(&[f64]) -> f64>(
    f: &mut Scaled<'_, F>,
    start: Vec<f64>,
    f_start: f64,
    step: f64,
) -> Vec<(Vec<f64>, f64)> {
    let n = start.len();
    let mut simplex = Vec::with_capacity(n + 1);
    for i in 0..n {
        let mut v = start.clone();
        v[i] += if v[i] + step <= 1.0 { step } else { -step };
        let fv = f.eval(&v);
        simplex.push((v, fv));
    }
    simplex.insert(0, (start, f_start));
    simplex
}

/// Nelder-Mead simplex search with projection onto the bounds.
pub fn nelder_mead_minimize<F>(
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

    let start = bounds.box_to_unit(x0);
    let f0 = f.eval(&start);
    let mut simplex = initial_simplex(&mut f, start, f0, opts.initial_step);
    let mut history = Vec::new();
    let mut iterations = 0;
    let mut converged = false;
    // Best value when the current simplex was built; a restart that cannot
    // improve on it ends the search.
    let mut restart_from: Option<f64> = None;
    loop {
        // Stable sort keeps ties in insertion order.
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let best = simplex[0].1;
        let spread = simplex[n].1 - best;
        let diameter = simplex[1..]
            .iter()
            .map(|(v, _)| {
                v.iter()
                    .zip(&simplex[0].0)
                    .map(|(a, b)| (a - b).abs())
                    .fold(0.0, f64::max)
            })
            .fold(0.0, f64::max);
        if diameter < opts.x_tol || spread < opts.f_tol {
            // Projection can flatten the simplex against a bound; rebuild it
            // around the best vertex once before accepting convergence.
            if restart_from.is_some_and(|f_prev| f_prev - best < opts.f_tol) {
                converged = true;
                break;
            }
            restart_from = Some(best);
            let (u, fu) = simplex.swap_remove(0);
            simplex = initial_simplex(&mut f, u, fu, opts.initial_step);
            continue;
        }
        if iterations >= opts.max_iterations {
            break;
        }
        iterations += 1;

        let mut centroid = vec![0.0; n];
        for (v, _) in &simplex[..n] {
            for (c, x) in centroid.iter_mut().zip(v) {
                *c += x / n as f64;
            }
        }
        let worst = simplex[n].0.clone();
        let f_worst = simplex[n].1;
        let f_second = simplex[n - 1].1;

        let reflected = along(&centroid, &worst, REFLECT);
        let f_reflected = f.eval(&reflected);
        if f_reflected < best {
            let expanded = along(&centroid, &worst, EXPAND);
            let f_expanded = f.eval(&expanded);
            simplex[n] = if f_expanded < f_reflected {
                (expanded, f_expanded)
            } else {
                (reflected, f_reflected)
            };
        } else if f_reflected < f_second {
            simplex[n] = (reflected, f_reflected);
        } else {
            let (contracted, limit) = if f_reflected < f_worst {
                (along(&centroid, &worst, REFLECT * CONTRACT), f_reflected)
            } else {
                (along(&centroid, &worst, -CONTRACT), f_worst)
            };
            let f_contracted = f.eval(&contracted);
            if f_contracted <= limit {
                simplex[n] = (contracted, f_contracted);
            } else {
                let anchor = simplex[0].0.clone();
                for vertex in simplex.iter_mut().skip(1) {
                    let shrunk: Vec<f64> = anchor
                        .iter()
                        .zip(&vertex.0)
                        .map(|(a, v)| a + SHRINK * (v - a))
                        .collect();
                    let fs = f.eval(&shrunk);
                    *vertex = (shrunk, fs);
                }
            }
        }
        let best_now = simplex.iter().map(|v| v.1).fold(f64::INFINITY, f64::min);
        history.push(best_now);
    }

    simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
    let (u, fmin) = simplex.swap_remove(0);
    Ok(Minimum {
        x: bounds.unit_to_box(&u),
        f: fmin,
        iterations,
        evaluations: f.evaluations,
        converged,
        history,
    })
}
