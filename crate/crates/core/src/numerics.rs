//! Small numerical helpers shared by the continuous modules: compensated
//! summation and composite Simpson quadrature on uniform grids.

use num_complex::Complex64;

/// Neumaier (improved Kahan) summation. Deterministic for a fixed input order.
pub fn compensated_sum<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    let mut sum = 0.0_f64;
    let mut comp = 0.0_f64;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

pub fn compensated_sum_complex<I: IntoIterator<Item = Complex64>>(values: I) -> Complex64 {
    let (re, im): (Vec<f64>, Vec<f64>) = values.into_iter().map(|z| (z.re, z.im)).unzip();
    Complex64::new(compensated_sum(re), compensated_sum(im))
}

/// Sum of squared moduli.
pub fn norm_sqr(values: &[Complex64]) -> f64 {
    compensated_sum(values.iter().map(|z| z.norm_sqr()))
}

/// Quadrature weights for `n` uniformly spaced samples with spacing `h`.
///
/// Composite Simpson over the largest even number of intervals; when the
/// interval count is odd the last cell is closed with the trapezoid rule.
pub fn simpson_weights(n: usize, h: f64) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![h],
        2 => vec![h / 2.0, h / 2.0],
        _ => {
            let intervals = n - 1;
            let simpson_intervals = intervals - intervals % 2;
            let mut w = vec![0.0; n];
            for (i, wi) in w.iter_mut().enumerate().take(simpson_intervals + 1) {
                *wi = if i == 0 || i == simpson_intervals {
                    h / 3.0
                } else if i % 2 == 1 {
                    4.0 * h / 3.0
                } else {
                    2.0 * h / 3.0
                };
            }
            if simpson_intervals < intervals {
                w[n - 2] += h / 2.0;
                w[n - 1] += h / 2.0;
            }
            w
        }
    }
}

pub fn is_power_of_two(n: usize) -> bool {
    n != 0 && n & (n - 1) == 0
}
