//! Derivative-free local minimization (Nelder-Mead simplex).
//!
//! The mixed-state criterion maximizes a piecewise-smooth objective (singular
//! values cross) over a sphere, so a simplex search restarted from seeded
//! random points is the workhorse. Non-finite objective values are treated
//! as `+inf` so the simplex backs away from them.

/// Options for one Nelder-Mead run.
#[derive(Debug, Clone, Copy)]
pub struct NelderMeadOptions {
    /// Budget on objective evaluations.
    pub max_evals: usize,
    /// Stop when the simplex function-value spread falls below this.
    pub ftol: f64,
    /// Edge length of the initial axis-aligned simplex.
    pub initial_step: f64,
}

impl Default for NelderMeadOptions {
    fn default() -> Self {
        Self {
            max_evals: 2000,
            ftol: 1e-10,
            initial_step: 0.5,
        }
    }
}

/// Result of one run.
#[derive(Debug, Clone)]
pub struct MinimizeResult {
    pub x: Vec<f64>,
    pub value: f64,
    pub evals: usize,
    pub converged: bool,
}

fn finite_or_inf(v: f64) -> f64 {
    if v.is_finite() {
        v
    } else {
        f64::INFINITY
    }
}

/// Minimizes `f` from `x0` with the standard reflect / expand / contract /
/// shrink moves (coefficients 1, 2, 1/2, 1/2).
pub fn minimize<F: FnMut(&[f64]) -> f64>(
    mut f: F,
    x0: &[f64],
    opts: &NelderMeadOptions,
) -> MinimizeResult {
    let n = x0.len();
    assert!(n > 0, "cannot optimize over an empty vector");
    let mut evals = 0usize;
    let mut eval = |x: &[f64], evals: &mut usize| -> f64 {
        *evals += 1;
        finite_or_inf(f(x))
    };

    // Initial simplex: x0 plus one step along each axis.
    let mut simplex: Vec<Vec<f64>> = Vec::with_capacity(n + 1);
    simplex.push(x0.to_vec());
    for i in 0..n {
        let mut v = x0.to_vec();
        v[i] += opts.initial_step;
        simplex.push(v);
    }
    let mut values: Vec<f64> = simplex.iter().map(|v| eval(v, &mut evals)).collect();

    let mut converged = false;
    while evals < opts.max_evals {
        // Sort vertices by value.
        let mut order: Vec<usize> = (0..=n).collect();
        order.sort_by(|&i, &j| values[i].partial_cmp(&values[j]).unwrap());
        let reordered: Vec<Vec<f64>> = order.iter().map(|&i| simplex[i].clone()).collect();
        let revalues: Vec<f64> = order.iter().map(|&i| values[i]).collect();
        simplex = reordered;
        values = revalues;

        let spread = values[n] - values[0];
        if spread.is_finite() && spread < opts.ftol {
            converged = true;
            break;
        }

        // Centroid of all but the worst vertex.
        let mut centroid = vec![0.0; n];
        for vertex in simplex.iter().take(n) {
            for (c, &x) in centroid.iter_mut().zip(vertex) {
                *c += x;
            }
        }
        for c in &mut centroid {
            *c /= n as f64;
        }

        let lerp = |from: &[f64], towards: &[f64], t: f64| -> Vec<f64> {
            from.iter()
                .zip(towards)
                .map(|(&a, &b)| a + t * (b - a))
                .collect()
        };

        // Reflect the worst vertex through the centroid.
        let reflected = lerp(&centroid, &simplex[n], -1.0);
        let fr = eval(&reflected, &mut evals);

        if fr < values[0] {
            // Try to expand further.
            let expanded = lerp(&centroid, &simplex[n], -2.0);
            let fe = eval(&expanded, &mut evals);
            if fe < fr {
                simplex[n] = expanded;
                values[n] = fe;
            } else {
                simplex[n] = reflected;
                values[n] = fr;
            }
        } else if fr < values[n - 1] {
            simplex[n] = reflected;
            values[n] = fr;
        } else {
            // Contract, outside or inside.
            let (point, fp) = if fr < values[n] {
                let outside = lerp(&centroid, &simplex[n], -0.5);
                let fo = eval(&outside, &mut evals);
                (outside, fo)
            } else {
                let inside = lerp(&centroid, &simplex[n], 0.5);
                let fi = eval(&inside, &mut evals);
                (inside, fi)
            };
            if fp < values[n].min(fr) {
                simplex[n] = point;
                values[n] = fp;
            } else {
                // Shrink everything towards the best vertex.
                let best = simplex[0].clone();
                for k in 1..=n {
                    simplex[k] = lerp(&best, &simplex[k], 0.5);
                    values[k] = eval(&simplex[k], &mut evals);
                    if evals >= opts.max_evals {
                        break;
                    }
                }
            }
        }
    }

    let mut best = 0;
    for k in 1..=n {
        if values[k] < values[best] {
            best = k;
        }
    }
    MinimizeResult {
        x: simplex[best].clone(),
        value: values[best],
        evals,
        converged,
    }
}
