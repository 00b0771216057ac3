//! Least-squares line fits and Richardson extrapolation for convergence scans.

use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    /// Root-mean-square residual of the fit.
    pub rms_residual: f64,
}

/// Ordinary least-squares fit `y = slope * x + intercept`.
///
/// Panics if fewer than two points are given or all `x` coincide.
pub fn linear_fit(x: &[f64], y: &[f64]) -> LinearFit {
    assert_eq!(x.len(), y.len());
    assert!(x.len() >= 2, "need at least two points");
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|xi| (xi - mx) * (xi - mx)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(xi, yi)| (xi - mx) * (yi - my)).sum();
    assert!(sxx > 0.0, "degenerate abscissae");
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss: f64 = x
        .iter()
        .zip(y)
        .map(|(xi, yi)| {
            let r = yi - (slope * xi + intercept);
            r * r
        })
        .sum();
    LinearFit {
        slope,
        intercept,
        rms_residual: (ss / n).sqrt(),
    }
}

/// Richardson extrapolation assuming `f(t) = f_inf + K / t + ...`.
///
/// For consecutive pairs `(t_k, f_k), (t_{k+1}, f_{k+1})` eliminates the
/// `K / t` term; with `t_{k+1} = 2 t_k` this is `2 f_{k+1} - f_k`.
pub fn richardson_inverse(t: &[f64], f: &[f64]) -> Vec<f64> {
    assert_eq!(t.len(), f.len());
    t.windows(2)
        .zip(f.windows(2))
        .map(|(tw, fw)| (tw[1] * fw[1] - tw[0] * fw[0]) / (tw[1] - tw[0]))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_line_has_zero_residual() {
        let x = [1.0, 2.0, 3.0, 4.0];
        let y: Vec<f64> = x.iter().map(|x| 3.0 * x - 1.0).collect();
        let fit = linear_fit(&x, &y);
        assert!((fit.slope - 3.0).abs() < 1e-14);
        assert!((fit.intercept + 1.0).abs() < 1e-13);
        assert!(fit.rms_residual < 1e-13);
    }

    #[test]
    fn richardson_removes_inverse_term() {
        let t = [25.0, 50.0, 100.0, 200.0];
        let f: Vec<f64> = t.iter().map(|t| 1.5 + 3.0 / t).collect();
        for r in richardson_inverse(&t, &f) {
            assert!((r - 1.5).abs() < 1e-13);
        }
    }

    #[test]
    fn richardson_on_doubling_grid_matches_textbook_form() {
        let t = [10.0, 20.0];
        let f = [4.0, 3.0];
        assert_eq!(richardson_inverse(&t, &f), vec![2.0 * 3.0 - 4.0]);
    }
}
