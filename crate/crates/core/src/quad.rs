//! Uniform-grid trapezoid helpers shared by the momentum and tau integrals.

use num_complex::Complex64;

/// Trapezoid weight of node `i` on a uniform grid of `n` nodes.
#[inline]
pub(crate) fn trap_weight(i: usize, n: usize, spacing: f64) -> f64 {
    if i == 0 || i + 1 == n {
        0.5 * spacing
    } else {
        spacing
    }
}

pub(crate) fn trapezoid(values: &[f64], spacing: f64) -> f64 {
    let n = values.len();
    values
        .iter()
        .enumerate()
        .map(|(i, v)| v * trap_weight(i, n, spacing))
        .sum()
}

/// First derivative by fourth-order finite differences, one-sided at the ends.
pub(crate) fn derivative4(values: &[Complex64], spacing: f64) -> Vec<Complex64> {
    let n = values.len();
    assert!(n >= 5, "fourth-order differences need at least 5 nodes");
    let s = 12.0 * spacing;
    let v = values;
    (0..n)
        .map(|i| match i {
            0 => (-25.0 * v[0] + 48.0 * v[1] - 36.0 * v[2] + 16.0 * v[3] - 3.0 * v[4]) / s,
            1 => (-3.0 * v[0] - 10.0 * v[1] + 18.0 * v[2] - 6.0 * v[3] + v[4]) / s,
            _ if i == n - 2 => {
                (3.0 * v[n - 1] + 10.0 * v[n - 2] - 18.0 * v[n - 3] + 6.0 * v[n - 4] - v[n - 5]) / s
            }
            _ if i == n - 1 => {
                (25.0 * v[n - 1] - 48.0 * v[n - 2] + 36.0 * v[n - 3] - 16.0 * v[n - 4]
                    + 3.0 * v[n - 5])
                    / s
            }
            _ => (v[i - 2] - 8.0 * v[i - 1] + 8.0 * v[i + 1] - v[i + 2]) / s,
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trapezoid_is_exact_for_linear_functions() {
        let h = 0.1;
        let v: Vec<f64> = (0..11).map(|i| 2.0 * i as f64 * h + 1.0).collect();
        assert!((trapezoid(&v, h) - 2.0).abs() < 1e-14);
    }

    #[test]
    fn derivative4_is_exact_for_quartics() {
        let h = 0.01;
        let x: Vec<f64> = (0..40).map(|i| 0.3 + i as f64 * h).collect();
        let v: Vec<Complex64> = x
            .iter()
            .map(|x| Complex64::new(x.powi(4) - x, 2.0 * x * x))
            .collect();
        let d = derivative4(&v, h);
        for (xi, di) in x.iter().zip(&d) {
            let exact = Complex64::new(4.0 * xi.powi(3) - 1.0, 4.0 * xi);
            assert!((di - exact).norm() < 1e-10, "{xi}: {di} vs {exact}");
        }
    }
}
