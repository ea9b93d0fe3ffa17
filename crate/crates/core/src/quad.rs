//! Composite Simpson quadrature with interval doubling.

/// Integrates `f` over `[a, b]`, doubling the number of subintervals until
/// two successive composite Simpson estimates differ by less than `tol`.
///
/// The subinterval count is capped at 2^21; smooth integrands on compact
/// intervals converge long before that.
pub fn simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> f64 {
    const MAX_INTERVALS: usize = 1 << 21;
    let mut n = 16;
    let mut previous = composite_simpson(&f, a, b, n);
    loop {
        n *= 2;
        let current = composite_simpson(&f, a, b, n);
        if (current - previous).abs() < tol || n >= MAX_INTERVALS {
            return current;
        }
        previous = current;
    }
}

fn composite_simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, n: usize) -> f64 {
    debug_assert!(n.is_multiple_of(2));
    let h = (b - a) / n as f64;
    let mut sum = f(a) + f(b);
    for i in 1..n {
        let weight = if i % 2 == 1 { 4.0 } else { 2.0 };
        sum += weight * f(a + i as f64 * h);
    }
    sum * h / 3.0
}
