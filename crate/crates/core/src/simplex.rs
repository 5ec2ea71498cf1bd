//! Nelder–Mead simplex minimization with dimension-adaptive coefficients
//! (Gao & Han, 2012), which keeps expansion and contraction effective in
//! the tens of dimensions used for POVM and attack searches.

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimplexOptions {
    pub max_iterations: usize,
    /// Stop when the spread of objective values across the simplex is below this,
    pub f_tolerance: f64,
    /// or when every vertex is within this max-norm distance of the best one.
    pub x_tolerance: f64,
    /// Edge length of the initial simplex.
    pub initial_step: f64,
}

impl Default for SimplexOptions {
    fn default() -> Self {
        SimplexOptions {
            max_iterations: 4000,
            f_tolerance: 1e-12,
            x_tolerance: 1e-9,
            initial_step: 0.25,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimplexResult {
    pub x: Vec<f64>,
    pub value: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// Minimizes `f` from `x0`. Never returns a point worse than `x0`.
pub fn minimize<F>(f: F, x0: &[f64], opts: &SimplexOptions) -> SimplexResult
where
    F: Fn(&[f64]) -> f64,
{
    let n = x0.len();
    let eval = |x: &[f64]| {
        let v = f(x);
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    };
    if n == 0 {
        return SimplexResult {
            x: Vec::new(),
            value: eval(x0),
            iterations: 0,
            converged: true,
        };
    }
    let nf = n as f64;
    let (alpha, beta, gamma, delta) = if n >= 2 {
        (1.0, 1.0 + 2.0 / nf, 0.75 - 1.0 / (2.0 * nf), 1.0 - 1.0 / nf)
    } else {
        (1.0, 2.0, 0.5, 0.5)
    };

    let mut pts: Vec<Vec<f64>> = Vec::with_capacity(n + 1);
    pts.push(x0.to_vec());
    for i in 0..n {
        let mut p = x0.to_vec();
        p[i] += opts.initial_step;
        pts.push(p);
    }
    let mut vals: Vec<f64> = pts.iter().map(|p| eval(p)).collect();

    let mut iterations = 0;
    let mut converged = false;
    let mut order: Vec<usize> = (0..=n).collect();
    let mut centroid = vec![0.0; n];
    let mut trial = vec![0.0; n];

    while iterations < opts.max_iterations {
        // stable sort keeps lower indices first among ties
        order.sort_by(|&a, &b| vals[a].total_cmp(&vals[b]));
        let best = order[0];
        let worst = order[n];
        let second_worst = order[n - 1];

        let f_spread = vals[worst] - vals[best];
        let x_spread = pts
            .iter()
            .map(|p| {
                p.iter()
                    .zip(&pts[best])
                    .fold(0.0_f64, |m, (a, b)| m.max((a - b).abs()))
            })
            .fold(0.0_f64, f64::max);
        if f_spread.abs() <= opts.f_tolerance || x_spread <= opts.x_tolerance {
            converged = true;
            break;
        }
        iterations += 1;

        centroid.iter_mut().for_each(|c| *c = 0.0);
        for &i in &order[..n] {
            for (c, x) in centroid.iter_mut().zip(&pts[i]) {
                *c += x / nf;
            }
        }
        let along = |t: f64, out: &mut Vec<f64>| {
            for ((o, c), w) in out.iter_mut().zip(&centroid).zip(&pts[worst]) {
                *o = c + t * (c - w);
            }
        };

        along(alpha, &mut trial);
        let f_r = eval(&trial);
        if f_r < vals[best] {
            let reflected = trial.clone();
            along(alpha * beta, &mut trial);
            let f_e = eval(&trial);
            if f_e < f_r {
                pts[worst].copy_from_slice(&trial);
                vals[worst] = f_e;
            } else {
                pts[worst] = reflected;
                vals[worst] = f_r;
            }
            continue;
        }
        if f_r < vals[second_worst] {
            pts[worst].copy_from_slice(&trial);
            vals[worst] = f_r;
            continue;
        }
        if f_r < vals[worst] {
            along(alpha * gamma, &mut trial);
            let f_c = eval(&trial);
            if f_c <= f_r {
                pts[worst].copy_from_slice(&trial);
                vals[worst] = f_c;
                continue;
            }
        } else {
            along(-gamma, &mut trial);
            let f_c = eval(&trial);
            if f_c < vals[worst] {
                pts[worst].copy_from_slice(&trial);
                vals[worst] = f_c;
                continue;
            }
        }
        // shrink toward the best vertex
        let anchor = pts[best].clone();
        for i in 0..=n {
            if i == best {
                continue;
            }
            for (x, a) in pts[i].iter_mut().zip(&anchor) {
                *x = a + delta * (*x - a);
            }
            vals[i] = eval(&pts[i]);
        }
    }

    let best = (0..=n)
        .min_by(|&a, &b| vals[a].total_cmp(&vals[b]))
        .unwrap_or(0);
    SimplexResult {
        x: pts[best].clone(),
        value: vals[best],
        iterations,
        converged,
    }
}
