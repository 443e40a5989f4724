//! One-dimensional quadrature routines shared by the constants and kernel
//! code. The integrands in this crate are smooth and rapidly decaying, so
//! adaptive Simpson subdivision with Richardson correction is enough.

/// Hard cap on subdivision depth; 2^60 intervals is far past f64 resolution.
const MAX_DEPTH: u32 = 60;

/// Integrate `f` over the finite interval `[a, b]` by adaptive Simpson
/// subdivision to absolute tolerance `tol`.
pub fn adaptive_simpson<F>(f: &F, a: f64, b: f64, tol: f64) -> f64
where
    F: Fn(f64) -> f64,
{
    if a == b {
        return 0.0;
    }
    let m = 0.5 * (a + b);
    let fa = f(a);
    let fm = f(m);
    let fb = f(b);
    let whole = simpson_rule(a, b, fa, fm, fb);
    adapt(f, a, b, fa, fm, fb, whole, tol, MAX_DEPTH)
}

fn simpson_rule(a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

#[allow(clippy::too_many_arguments)]
fn adapt<F>(f: &F, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, tol: f64, depth: u32) -> f64
where
    F: Fn(f64) -> f64,
{
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = simpson_rule(a, m, fa, flm, fm);
    let right = simpson_rule(m, b, fm, frm, fb);
    let refined = left + right;
    // Standard Richardson acceptance: Simpson error shrinks by 16 per halving.
    if depth == 0 || (refined - whole).abs() <= 15.0 * tol {
        return refined + (refined - whole) / 15.0;
    }
    let half_tol = 0.5 * tol;
    adapt(f, a, m, fa, flm, fm, left, half_tol, depth - 1)
        + adapt(f, m, b, fm, frm, fb, right, half_tol, depth - 1)
}

/// Composite Simpson rule over `[a, b]` with `intervals` equal subintervals
/// (rounded up to an even count). Used where the evaluation points must be a
/// fixed lattice rather than an adaptively chosen set.
pub fn composite_simpson<F>(f: &F, a: f64, b: f64, intervals: usize) -> f64
where
    F: Fn(f64) -> f64,
{
    if a == b {
        return 0.0;
    }
    let n = intervals.max(2).next_multiple_of(2);
    let h = (b - a) / n as f64;
    let mut sum = f(a) + f(b);
    for k in 1..n {
        let weight = if k % 2 == 1 { 4.0 } else { 2.0 };
        sum += weight * f(a + k as f64 * h);
    }
    sum * h / 3.0
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn polynomial_is_exact() {
        // Simpson is exact on cubics.
        let f = |x: f64| 3.0 * x * x * x - x + 2.0;
        let exact = 0.75 * 16.0 - 0.5 * 4.0 + 2.0 * 2.0;
        assert_abs_diff_eq!(adaptive_simpson(&f, 0.0, 2.0, 1e-12), exact, epsilon = 1e-12);
        assert_abs_diff_eq!(composite_simpson(&f, 0.0, 2.0, 2), exact, epsilon = 1e-12);
    }

    #[test]
    fn gaussian_mass() {
        let f = |x: f64| (-0.5 * x * x).exp();
        let half_mass = (std::f64::consts::PI / 2.0).sqrt();
        assert_abs_diff_eq!(adaptive_simpson(&f, 0.0, 40.0, 1e-13), half_mass, epsilon = 1e-12);
    }

    #[test]
    fn steep_reciprocal_converges() {
        // Near-singular integrand exercising deep subdivision.
        let f = |x: f64| 1.0 / (1e-4 + x);
        let exact = ((1e-4 + 1.0) / 1e-4f64).ln();
        assert_abs_diff_eq!(adaptive_simpson(&f, 0.0, 1.0, 1e-11), exact, epsilon = 1e-9);
    }

    #[test]
    fn empty_interval_is_zero() {
        assert_eq!(adaptive_simpson(&|x: f64| x.exp(), 1.0, 1.0, 1e-10), 0.0);
        assert_eq!(composite_simpson(&|x: f64| x.exp(), 1.0, 1.0, 8), 0.0);
    }
}
