//! Nelder–Mead downhill simplex for small unconstrained problems.

use alloc::vec::Vec;

#[derive(Debug, Clone, Copy)]
pub struct SimplexOptions {
    /// Stop once every vertex lies within this distance of the best one.
    pub diameter_tol: f64,
    pub max_iters: usize,
}

impl Default for SimplexOptions {
    fn default() -> Self {
        Self {
            diameter_tol: 1e-9,
            max_iters: 20_000,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SimplexResult {
    pub x: Vec<f64>,
    pub value: f64,
    pub iters: usize,
    pub converged: bool,
}

/// Minimize `f` starting from an axis-aligned simplex of edge `step` at `x0`.
///
/// Uses the dimension-adapted coefficients of Gao and Han (reflection 1,
/// expansion 1 + 2/n, contraction ¾ − 1/2n, shrink 1 − 1/n), which behave
/// better than the classic ones beyond a handful of dimensions.
pub fn minimize<F>(f: F, x0: &[f64], step: f64, opts: SimplexOptions) -> SimplexResult
where
    F: Fn(&[f64]) -> f64,
{
    let n = x0.len();
    let mut pts: Vec<Vec<f64>> = Vec::with_capacity(n + 1);
    pts.push(x0.to_vec());
    for i in 0..n {
        let mut p = x0.to_vec();
        p[i] += step;
        pts.push(p);
    }
    let mut vals: Vec<f64> = pts.iter().map(|p| f(p)).collect();

    let mut iters = 0;
    let mut converged = false;
    let mut order: Vec<usize> = (0..=n).collect();
    let mut centroid = alloc::vec![0.0; n];
    let nf = n as f64;
    let (expand, contract, shrink) = (1.0 + 2.0 / nf, 0.75 - 0.5 / nf, 1.0 - 1.0 / nf);
    let along = |c: &[f64], w: &[f64], t: f64| -> Vec<f64> {
        c.iter().zip(w).map(|(c, w)| c + t * (w - c)).collect()
    };

    while iters < opts.max_iters {
        order.sort_by(|&a, &b| vals[a].total_cmp(&vals[b]));
        let (best, worst, second) = (order[0], order[n], order[n - 1]);

        let diameter = pts
            .iter()
            .map(|p| {
                p.iter()
                    .zip(&pts[best])
                    .map(|(a, b)| (a - b).abs())
                    .fold(0.0, f64::max)
            })
            .fold(0.0, f64::max);
        if diameter < opts.diameter_tol {
            converged = true;
            break;
        }
        iters += 1;

        centroid.iter_mut().for_each(|c| *c = 0.0);
        for &k in &order[..n] {
            for (c, v) in centroid.iter_mut().zip(&pts[k]) {
                *c += v / n as f64;
            }
        }

        let reflected = along(&centroid, &pts[worst], -1.0);
        let fr = f(&reflected);
        if fr < vals[best] {
            let expanded = along(&centroid, &pts[worst], -expand);
            let fe = f(&expanded);
            if fe < fr {
                pts[worst] = expanded;
                vals[worst] = fe;
            } else {
                pts[worst] = reflected;
                vals[worst] = fr;
            }
            continue;
        }
        if fr < vals[second] {
            pts[worst] = reflected;
            vals[worst] = fr;
            continue;
        }
        let (contracted, fc) = if fr < vals[worst] {
            let p = along(&centroid, &reflected, contract);
            let v = f(&p);
            (p, v)
        } else {
            let p = along(&centroid, &pts[worst], contract);
            let v = f(&p);
            (p, v)
        };
        if fc < vals[worst].min(fr) {
            pts[worst] = contracted;
            vals[worst] = fc;
            continue;
        }
        // shrink toward the best vertex
        let anchor = pts[best].clone();
        for k in 0..=n {
            if k != best {
                pts[k] = along(&anchor, &pts[k], shrink);
                vals[k] = f(&pts[k]);
            }
        }
    }

    let best = (0..=n)
        .min_by(|&a, &b| vals[a].total_cmp(&vals[b]))
        .unwrap_or(0);
    SimplexResult {
        x: pts.swap_remove(best),
        value: vals[best],
        iters,
        converged,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_quadratic_minimum() {
        let f = |x: &[f64]| (x[0] - 1.0).powi(2) + 10.0 * (x[1] + 2.0).powi(2) + x[2] * x[2];
        let r = minimize(f, &[0.0, 0.0, 0.0], 0.5, SimplexOptions::default());
        assert!(r.converged);
        assert!((r.x[0] - 1.0).abs() < 1e-8 && (r.x[1] + 2.0).abs() < 1e-8 && r.x[2].abs() < 1e-8);
    }

    #[test]
    fn rosenbrock() {
        let f = |x: &[f64]| (1.0 - x[0]).powi(2) + 100.0 * (x[1] - x[0] * x[0]).powi(2);
        let r = minimize(f, &[-1.2, 1.0], 0.1, SimplexOptions::default());
        assert!(r.value < 1e-14, "{}", r.value);
    }
}
