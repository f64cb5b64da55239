//! Derivative-free weighted least-squares minimizer used as a test oracle.
//!
//! Minimizes `sum_i w_i (d_i - g_i . x)^2` by pattern search over a
//! 5x5x5 lattice around the current center: move to the best lattice point,
//! keep extending along that move while the cost keeps dropping (doubling
//! the spacing if it lay on the outer shell), otherwise halve the spacing.
//! The lattice result is then polished with Powell's conjugate-direction
//! method, each line minimum taken from a parabola through three cost
//! samples. Only cost evaluations are used; the normal equations are never
//! formed.

pub fn weighted_cost(rows: &[[f64; 3]], weights: &[f64], d: &[f64], x: &[f64; 3]) -> f64 {
    rows.iter()
        .zip(weights)
        .zip(d)
        .map(|((g, w), di)| {
            let e = di - (g[0] * x[0] + g[1] * x[1] + g[2] * x[2]);
            w * e * e
        })
        .sum()
}

pub fn brute_force_wls(rows: &[[f64; 3]], weights: &[f64], d: &[f64]) -> [f64; 3] {
    let mut center = [0.0; 3];
    let mut best = weighted_cost(rows, weights, d, &center);
    let mut h = 64.0;
    let mut iterations = 0usize;
    while h > 1e-8 && iterations < 5_000 {
        iterations += 1;
        let mut step: Option<([f64; 3], bool)> = None;
        for a in -2i32..=2 {
            for b in -2i32..=2 {
                for c in -2i32..=2 {
                    if (a, b, c) == (0, 0, 0) {
                        continue;
                    }
                    let x = [
                        center[0] + h * a as f64,
                        center[1] + h * b as f64,
                        center[2] + h * c as f64,
                    ];
                    let f = weighted_cost(rows, weights, d, &x);
                    if f < best {
                        best = f;
                        let shell = a.abs() == 2 || b.abs() == 2 || c.abs() == 2;
                        step = Some((x, shell));
                    }
                }
            }
        }
        match step {
            Some((x, shell)) => {
                let dir = [x[0] - center[0], x[1] - center[1], x[2] - center[2]];
                center = x;
                let mut reach = 1.0;
                loop {
                    let y = [
                        center[0] + reach * dir[0],
                        center[1] + reach * dir[1],
                        center[2] + reach * dir[2],
                    ];
                    let f = weighted_cost(rows, weights, d, &y);
                    if f < best {
                        best = f;
                        center = y;
                        reach *= 2.0;
                    } else {
                        break;
                    }
                }
                if shell {
                    h *= 2.0;
                }
            }
            None => h *= 0.5,
        }
    }
    powell_polish(rows, weights, d, center)
}

fn along(x: &[f64; 3], u: &[f64; 3], t: f64) -> [f64; 3] {
    [x[0] + t * u[0], x[1] + t * u[1], x[2] + t * u[2]]
}

fn line_minimum(rows: &[[f64; 3]], weights: &[f64], d: &[f64], x: [f64; 3], u: &[f64; 3]) -> [f64; 3] {
    let mut x = x;
    for _ in 0..3 {
        let s = 1.0;
        let f_minus = weighted_cost(rows, weights, d, &along(&x, u, -s));
        let f_zero = weighted_cost(rows, weights, d, &x);
        let f_plus = weighted_cost(rows, weights, d, &along(&x, u, s));
        let curvature = f_minus - 2.0 * f_zero + f_plus;
        if !(curvature > 0.0) {
            break;
        }
        let t = s * (f_minus - f_plus) / (2.0 * curvature);
        let y = along(&x, u, t);
        if weighted_cost(rows, weights, d, &y) > f_zero {
            break;
        }
        x = y;
    }
    x
}

fn powell_polish(rows: &[[f64; 3]], weights: &[f64], d: &[f64], start: [f64; 3]) -> [f64; 3] {
    let mut dirs = vec![[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];
    let mut x = start;
    for _ in 0..30 {
        let x0 = x;
        for u in &dirs {
            x = line_minimum(rows, weights, d, x, u);
        }
        let step = [x[0] - x0[0], x[1] - x0[1], x[2] - x0[2]];
        let len = (step[0] * step[0] + step[1] * step[1] + step[2] * step[2]).sqrt();
        if len < 1e-12 {
            break;
        }
        let u = [step[0] / len, step[1] / len, step[2] / len];
        x = line_minimum(rows, weights, d, x, &u);
        dirs.remove(0);
        dirs.push(u);
    }
    x
}
