//! Derivative-free simplex minimization (Nelder-Mead).
//!
//! Infinite objective values are legal and simply rank worst, which makes
//! hard feasibility rejections cheap to encode.

/// Nelder-Mead settings. `spread_tol` is the convergence criterion on the
/// spread of objective values over the simplex.
#[derive(Debug, Clone, Copy)]
pub struct NelderMead {
    pub max_iterations: usize,
    pub spread_tol: f64,
    /// Additive step used to build the initial simplex around the start.
    pub initial_step: f64,
}

impl Default for NelderMead {
    fn default() -> Self {
        NelderMead { max_iterations: 4000, spread_tol: 1e-8, initial_step: 0.25 }
    }
}

/// Result of one minimization run.
#[derive(Debug, Clone)]
pub struct Minimum {
    pub point: Vec<f64>,
    pub value: f64,
    pub iterations: usize,
    pub converged: bool,
}

impl NelderMead {
    /// Minimizes `f` from `x0`. NaN objective values are treated as
    /// infinite.
    pub fn minimize<F: FnMut(&[f64]) -> f64>(&self, mut f: F, x0: &[f64]) -> Minimum {
        let dim = x0.len();
        let mut eval = |x: &[f64]| {
            let v = f(x);
            if v.is_nan() {
                f64::INFINITY
            } else {
                v
            }
        };

        let mut simplex: Vec<Vec<f64>> = Vec::with_capacity(dim + 1);
        simplex.push(x0.to_vec());
        for i in 0..dim {
            let mut p = x0.to_vec();
            p[i] += self.initial_step;
            simplex.push(p);
        }
        let mut values: Vec<f64> = simplex.iter().map(|p| eval(p)).collect();

        let mut iterations = 0;
        let mut converged = false;
        while iterations < self.max_iterations {
            iterations += 1;
            let mut order: Vec<usize> = (0..=dim).collect();
            order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
            let best = order[0];
            let worst = order[dim];
            let second_worst = order[dim - 1];

            let spread = values[worst] - values[best];
            if spread.is_finite() && spread.abs() < self.spread_tol {
                converged = true;
                break;
            }

            // centroid of all but the worst point
            let mut centroid = vec![0.0; dim];
            for &i in &order[..dim] {
                for d in 0..dim {
                    centroid[d] += simplex[i][d];
                }
            }
            for c in centroid.iter_mut() {
                *c /= dim as f64;
            }

            let reflect: Vec<f64> = (0..dim)
                .map(|d| centroid[d] + (centroid[d] - simplex[worst][d]))
                .collect();
            let f_reflect = eval(&reflect);

            if f_reflect < values[best] {
                // expansion
                let expand: Vec<f64> = (0..dim)
                    .map(|d| centroid[d] + 2.0 * (reflect[d] - centroid[d]))
                    .collect();
                let f_expand = eval(&expand);
                if f_expand < f_reflect {
                    simplex[worst] = expand;
                    values[worst] = f_expand;
                } else {
                    simplex[worst] = reflect;
                    values[worst] = f_reflect;
                }
                continue;
            }
            if f_reflect < values[second_worst] {
                simplex[worst] = reflect;
                values[worst] = f_reflect;
                continue;
            }

            // contraction (outside if the reflection improved on the worst)
            let towards = if f_reflect < values[worst] { &reflect } else { &simplex[worst] };
            let contract: Vec<f64> = (0..dim)
                .map(|d| centroid[d] + 0.5 * (towards[d] - centroid[d]))
                .collect();
            let f_contract = eval(&contract);
            if f_contract < values[worst].min(f_reflect) {
                simplex[worst] = contract;
                values[worst] = f_contract;
                continue;
            }

            // shrink towards the best point
            let best_point = simplex[best].clone();
            for &i in &order[1..] {
                for d in 0..dim {
                    simplex[i][d] = best_point[d] + 0.5 * (simplex[i][d] - best_point[d]);
                }
                values[i] = eval(&simplex[i]);
            }
        }

        let (arg_best, &value) = values
            .iter()
            .enumerate()
            .min_by(|(_, a), (_, b)| a.total_cmp(b))
            .expect("simplex is non-empty");
        Minimum {
            point: simplex[arg_best].clone(),
            value,
            iterations,
            converged,
        }
    }
}
