//! Unconstrained local minimizers used by the infimum computations.

use crate::scalar::Real;
use serde::Serialize;

#[derive(Clone, Debug, Serialize)]
pub struct Minimum<T> {
    pub point: Vec<T>,
    pub value: T,
    pub iterations: usize,
    pub evaluations: usize,
    pub converged: bool,
}

#[derive(Clone, Debug)]
pub struct NelderMeadOptions {
    pub initial_step: f64,
    pub max_evaluations: usize,
    /// Stop once the best value improved by less than `stall_tolerance` (relative) over
    /// this many iterations.
    pub stall_iterations: usize,
    pub stall_tolerance: f64,
    /// Fresh simplices built around the incumbent after a stall.
    pub restarts: usize,
}

impl Default for NelderMeadOptions {
    fn default() -> Self {
        Self { initial_step: 0.5, max_evaluations: 100_000, stall_iterations: 50, stall_tolerance: 1e-9, restarts: 3 }
    }
}

fn sanitize<T: Real>(v: T) -> T {
    if v.is_nan() {
        T::infinity()
    } else {
        v
    }
}

/// Nelder-Mead with dimension-adaptive coefficients, restarted around the incumbent until a
/// restart brings no further improvement.
pub fn nelder_mead<T: Real>(mut f: impl FnMut(&[T]) -> T, x0: &[T], opts: &NelderMeadOptions) -> Minimum<T> {
    let mut best = single_nelder_mead(&mut f, x0, T::lit(opts.initial_step), opts, 0);
    for r in 0..opts.restarts {
        if best.evaluations >= opts.max_evaluations {
            break;
        }
        let step = T::lit(opts.initial_step) * T::lit(0.5).powi(r as i32 + 1);
        let next = single_nelder_mead(&mut f, &best.point, step, opts, best.evaluations);
        let gain = best.value - next.value;
        let improved = gain > T::lit(opts.stall_tolerance) * T::one().max(best.value.abs());
        let total = next.evaluations;
        let iterations = best.iterations + next.iterations;
        if next.value < best.value {
            best = next;
        }
        best.evaluations = total;
        best.iterations = iterations;
        if !improved {
            break;
        }
    }
    best
}

fn single_nelder_mead<T: Real>(
    f: &mut impl FnMut(&[T]) -> T,
    x0: &[T],
    step: T,
    opts: &NelderMeadOptions,
    used: usize,
) -> Minimum<T> {
    let n = x0.len();
    let mut evals = used;
    if n == 0 {
        let v = sanitize(f(x0));
        return Minimum { point: vec![], value: v, iterations: 0, evaluations: evals + 1, converged: true };
    }
    let nf = T::from_usize(n).unwrap();
    let (rho, chi) = (T::one(), T::one() + T::lit(2.0) / nf);
    let gamma = T::lit(0.75) - T::lit(0.5) / nf;
    let sigma = T::one() - T::one() / nf;

    let mut simplex: Vec<Vec<T>> = vec![x0.to_vec()];
    for i in 0..n {
        let mut p = x0.to_vec();
        p[i] = p[i] + step;
        simplex.push(p);
    }
    let mut values: Vec<T> = simplex.iter().map(|p| sanitize(f(p))).collect();
    evals += n + 1;
    let mut history: Vec<T> = Vec::new();
    let mut iterations = 0;
    let mut converged = false;

    while evals < opts.max_evaluations {
        let mut order: Vec<usize> = (0..=n).collect();
        order.sort_by(|&a, &b| values[a].partial_cmp(&values[b]).unwrap_or(std::cmp::Ordering::Equal));
        simplex = order.iter().map(|&i| simplex[i].clone()).collect();
        values = order.iter().map(|&i| values[i]).collect();

        history.push(values[0]);
        if history.len() > opts.stall_iterations {
            let old = history[history.len() - 1 - opts.stall_iterations];
            if old - values[0] <= T::lit(opts.stall_tolerance) * T::one().max(values[0].abs()) && values[0].is_finite() {
                converged = true;
                break;
            }
        }
        iterations += 1;

        let centroid: Vec<T> =
            (0..n).map(|j| simplex[..n].iter().map(|p| p[j]).sum::<T>() / nf).collect();
        let along = |t: T| -> Vec<T> { (0..n).map(|j| centroid[j] + t * (simplex[n][j] - centroid[j])).collect() };

        let xr = along(-rho);
        let fr = sanitize(f(&xr));
        evals += 1;
        if fr < values[0] {
            let xe = along(-rho * chi);
            let fe = sanitize(f(&xe));
            evals += 1;
            if fe < fr {
                simplex[n] = xe;
                values[n] = fe;
            } else {
                simplex[n] = xr;
                values[n] = fr;
            }
            continue;
        }
        if fr < values[n - 1] {
            simplex[n] = xr;
            values[n] = fr;
            continue;
        }
        let (xc, fc) = if fr < values[n] {
            let xc = along(-rho * gamma);
            let fc = sanitize(f(&xc));
            (xc, fc)
        } else {
            let xc = along(gamma);
            let fc = sanitize(f(&xc));
            (xc, fc)
        };
        evals += 1;
        if fc < values[n].min(fr) {
            simplex[n] = xc;
            values[n] = fc;
            continue;
        }
        for i in 1..=n {
            let p: Vec<T> = (0..n).map(|j| simplex[0][j] + sigma * (simplex[i][j] - simplex[0][j])).collect();
            values[i] = sanitize(f(&p));
            simplex[i] = p;
        }
        evals += n;
    }
    let best = (0..=n).min_by(|&a, &b| values[a].partial_cmp(&values[b]).unwrap_or(std::cmp::Ordering::Equal)).unwrap();
    Minimum { point: simplex[best].clone(), value: values[best], iterations, evaluations: evals, converged }
}

#[derive(Clone, Debug)]
pub struct LbfgsOptions {
    pub memory: usize,
    pub max_iterations: usize,
    pub max_evaluations: usize,
    /// Converged once `max |g_i| <= gradient_tolerance * max(1, |f|)`.
    pub gradient_tolerance: f64,
    /// Converged once the relative decrease stays below `stall_tolerance` for
    /// `stall_iterations` consecutive iterations.
    pub stall_iterations: usize,
    pub stall_tolerance: f64,
}

impl Default for LbfgsOptions {
    fn default() -> Self {
        Self {
            memory: 12,
            max_iterations: 3000,
            max_evaluations: 20_000,
            gradient_tolerance: 1e-9,
            stall_iterations: 5,
            stall_tolerance: 1e-12,
        }
    }
}

fn dot<T: Real>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).map(|(&x, &y)| x * y).sum()
}

/// Limited-memory BFGS with a backtracking Armijo line search. `fg` writes the gradient into
/// its second argument and returns the objective; non-finite values make the line search
/// back off.
pub fn lbfgs<T: Real>(mut fg: impl FnMut(&[T], &mut [T]) -> T, x0: &[T], opts: &LbfgsOptions) -> Minimum<T> {
    let n = x0.len();
    let mut x = x0.to_vec();
    let mut g = vec![T::zero(); n];
    let mut fx = fg(&x, &mut g);
    let mut evals = 1;
    let mut s_hist: Vec<Vec<T>> = Vec::new();
    let mut y_hist: Vec<Vec<T>> = Vec::new();
    let mut stall = 0;
    let mut converged = false;
    let mut iterations = 0;
    let mut xn = vec![T::zero(); n];
    let mut gn = vec![T::zero(); n];

    if !fx.is_finite() {
        return Minimum { point: x, value: sanitize(fx), iterations: 0, evaluations: evals, converged: false };
    }

    while iterations < opts.max_iterations && evals < opts.max_evaluations {
        let gmax = g.iter().fold(T::zero(), |m, v| m.max(v.abs()));
        if gmax <= T::lit(opts.gradient_tolerance) * T::one().max(fx.abs()) {
            converged = true;
            break;
        }
        iterations += 1;

        let mut d: Vec<T> = g.iter().map(|&v| -v).collect();
        let k = s_hist.len();
        let mut alphas = vec![T::zero(); k];
        for i in (0..k).rev() {
            let rho = T::one() / dot(&y_hist[i], &s_hist[i]);
            alphas[i] = rho * dot(&s_hist[i], &d);
            for j in 0..n {
                d[j] = d[j] - alphas[i] * y_hist[i][j];
            }
        }
        if k > 0 {
            let gamma = dot(&s_hist[k - 1], &y_hist[k - 1]) / dot(&y_hist[k - 1], &y_hist[k - 1]);
            d.iter_mut().for_each(|v| *v = *v * gamma);
        }
        for i in 0..k {
            let rho = T::one() / dot(&y_hist[i], &s_hist[i]);
            let beta = rho * dot(&y_hist[i], &d);
            for j in 0..n {
                d[j] = d[j] + s_hist[i][j] * (alphas[i] - beta);
            }
        }
        let mut slope = dot(&g, &d);
        if !(slope < T::zero()) {
            s_hist.clear();
            y_hist.clear();
            d = g.iter().map(|&v| -v).collect();
            slope = dot(&g, &d);
        }
        let mut t = if k == 0 {
            let norm = dot(&d, &d).sqrt();
            T::one().min(T::one() / norm.max(T::min_positive_value()))
        } else {
            T::one()
        };

        let mut accepted = false;
        for _ in 0..60 {
            for j in 0..n {
                xn[j] = x[j] + t * d[j];
            }
            let fnew = fg(&xn, &mut gn);
            evals += 1;
            if fnew.is_finite() && fnew <= fx + T::lit(1e-4) * t * slope {
                let decrease = fx - fnew;
                let s: Vec<T> = (0..n).map(|j| xn[j] - x[j]).collect();
                let y: Vec<T> = (0..n).map(|j| gn[j] - g[j]).collect();
                let sy = dot(&s, &y);
                if sy > T::epsilon() * dot(&s, &s).sqrt() * dot(&y, &y).sqrt() {
                    if s_hist.len() == opts.memory {
                        s_hist.remove(0);
                        y_hist.remove(0);
                    }
                    s_hist.push(s);
                    y_hist.push(y);
                }
                x.copy_from_slice(&xn);
                g.copy_from_slice(&gn);
                fx = fnew;
                if decrease <= T::lit(opts.stall_tolerance) * T::one().max(fx.abs()) {
                    stall += 1;
                } else {
                    stall = 0;
                }
                accepted = true;
                break;
            }
            t = t * T::lit(0.5);
        }
        if !accepted {
            if s_hist.is_empty() {
                converged = true;
                break;
            }
            s_hist.clear();
            y_hist.clear();
            continue;
        }
        if stall >= opts.stall_iterations {
            converged = true;
            break;
        }
    }
    Minimum { point: x, value: fx, iterations, evaluations: evals, converged }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rosenbrock(x: &[f64]) -> f64 {
        (1.0 - x[0]).powi(2) + 100.0 * (x[1] - x[0] * x[0]).powi(2)
    }

    #[test]
    fn nelder_mead_finds_rosenbrock_minimum() {
        let opts = NelderMeadOptions { stall_tolerance: 1e-14, ..Default::default() };
        let m = nelder_mead(rosenbrock, &[-1.2, 1.0], &opts);
        assert!(m.value < 1e-10, "value {}", m.value);
        assert!((m.point[0] - 1.0).abs() < 1e-4);
    }

    #[test]
    fn lbfgs_finds_rosenbrock_minimum() {
        let m = lbfgs(
            |x: &[f64], g: &mut [f64]| {
                g[0] = -2.0 * (1.0 - x[0]) - 400.0 * x[0] * (x[1] - x[0] * x[0]);
                g[1] = 200.0 * (x[1] - x[0] * x[0]);
                rosenbrock(x)
            },
            &[-1.2, 1.0],
            &LbfgsOptions::default(),
        );
        assert!(m.converged);
        assert!(m.value < 1e-16, "value {}", m.value);
    }

    #[test]
    fn lbfgs_backs_off_from_infinite_values() {
        let m = lbfgs(
            |x: &[f64], g: &mut [f64]| {
                if x[0] <= 0.0 {
                    return f64::INFINITY;
                }
                g[0] = 1.0 - 1.0 / x[0];
                x[0] - x[0].ln()
            },
            &[5.0],
            &LbfgsOptions::default(),
        );
        assert!((m.point[0] - 1.0).abs() < 1e-8);
    }
}
