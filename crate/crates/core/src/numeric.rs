//! Small one-dimensional numerical routines: bisection, golden-section
//! minimization and composite Simpson quadrature with panel doubling.

use crate::error::{Error, Result};

/// Bisection on a bracket `[a, b]` with `f(a)` and `f(b)` of opposite sign
/// (or one of them zero). Stops when the bracket is shorter than `tol`.
pub fn bisect<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64, tol: f64) -> f64 {
    let mut fa = f(a);
    let fb = f(b);
    if fa == 0.0 {
        return a;
    }
    if fb == 0.0 {
        return b;
    }
    debug_assert!(fa.signum() != fb.signum());
    // 200 halvings exhaust any f64 interval
    for _ in 0..200 {
        if (b - a).abs() < tol {
            break;
        }
        let m = 0.5 * (a + b);
        let fm = f(m);
        if fm == 0.0 {
            return m;
        }
        if fm.signum() == fa.signum() {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    0.5 * (a + b)
}

/// Golden-section search for a minimum of a unimodal `f` on `[a, b]`.
/// Returns `(x_min, f(x_min))`.
pub fn golden_section_min<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64, tol: f64) -> (f64, f64) {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    for _ in 0..200 {
        if (b - a).abs() < tol {
            break;
        }
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    let x = 0.5 * (a + b);
    let fx = f(x);
    // the interior probes can be better than the midpoint on a V-shaped minimum
    [(x, fx), (c, fc), (d, fd)]
        .into_iter()
        .min_by(|p, q| p.1.total_cmp(&q.1))
        .unwrap()
}

/// Composite Simpson rule on `panels` (even) subintervals.
pub fn simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, panels: usize) -> f64 {
    let n = panels + panels % 2;
    let h = (b - a) / n as f64;
    let mut acc = f(a) + f(b);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        acc += w * f(a + i as f64 * h);
    }
    acc * h / 3.0
}

/// Simpson quadrature starting at `min_panels`, doubling until two
/// successive estimates agree to `tol` or `max_panels` is exceeded.
pub fn simpson_converged<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    min_panels: usize,
    max_panels: usize,
    tol: f64,
) -> Result<f64> {
    let mut panels = min_panels.max(2);
    let mut prev = simpson(f, a, b, panels);
    loop {
        panels *= 2;
        let next = simpson(f, a, b, panels);
        let diff = (next - prev).abs();
        if diff < tol {
            // Richardson step for the O(h^4) error term
            return Ok(next + (next - prev) / 15.0);
        }
        if panels >= max_panels {
            return Err(Error::Quadrature {
                panels,
                difference: diff,
            });
        }
        prev = next;
    }
}

/// `n` evenly spaced points from `a` to `b` inclusive.
pub fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    match n {
        0 => vec![],
        1 => vec![a],
        _ => {
            let h = (b - a) / (n - 1) as f64;
            (0..n)
                .map(|i| if i == n - 1 { b } else { a + i as f64 * h })
                .collect()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn bisect_finds_sqrt2() {
        let x = bisect(|x| x * x - 2.0, 0.0, 2.0, 1e-14);
        assert!((x - 2f64.sqrt()).abs() < 1e-13);
    }

    #[test]
    fn bisect_accepts_zero_endpoint() {
        assert_eq!(bisect(|x| x - 1.0, 1.0, 3.0, 1e-12), 1.0);
    }

    #[test]
    fn golden_section_parabola_and_v_shape() {
        let (x, fx) = golden_section_min(|x| (x - 0.3) * (x - 0.3) + 1.0, 0.0, 1.0, 1e-12);
        assert!((x - 0.3).abs() < 1e-6);
        assert!((fx - 1.0).abs() < 1e-12);
        let (x, fx) = golden_section_min(|x: f64| (x - 0.7).abs(), 0.0, 1.0, 1e-13);
        assert!((x - 0.7).abs() < 1e-12);
        assert!(fx < 1e-12);
    }

    #[test]
    fn simpson_is_exact_for_cubics() {
        let v = simpson(&|x: f64| x * x * x - x, 0.0, 2.0, 2);
        assert!((v - 2.0).abs() < 1e-14);
    }

    #[test]
    fn simpson_converged_sine() {
        let v = simpson_converged(&|x: f64| x.sin(), 0.0, PI, 64, 1 << 20, 1e-12).unwrap();
        assert!((v - 2.0).abs() < 1e-12);
    }

    #[test]
    fn simpson_reports_non_convergence() {
        let step = |x: f64| if x < 0.5 { 0.0 } else { 1.0 };
        let err = simpson_converged(&step, 0.0, 1.0 + 1e-7, 4, 64, 1e-14).unwrap_err();
        assert!(matches!(err, Error::Quadrature { .. }));
    }
}
