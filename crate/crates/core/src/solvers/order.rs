/// Residuals below this are dominated by rounding and ignored.
const FLOOR: f64 = 1e2 * f64::EPSILON;

/// Empirical convergence order `ln(r_k / r_{k-1}) / ln(r_{k-1} / r_{k-2})`
/// from the last three residuals above the rounding floor.
///
/// Returns `None` when fewer than three such residuals exist or they are
/// not strictly decreasing.
pub fn estimate_order(residuals: &[f64]) -> Option<f64> {
    let usable: Vec<f64> = residuals.iter().copied().filter(|&r| r >= FLOOR).collect();
    let [r2, r1, r0] = usable.get(usable.len().checked_sub(3)?..)? else {
        return None;
    };
    if !(r0 < r1 && r1 < r2) {
        return None;
    }
    let p = (r0 / r1).ln() / (r1 / r2).ln();
    p.is_finite().then_some(p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn quadratic_sequence() {
        let p = estimate_order(&[1e-1, 1e-2, 1e-4, 1e-8]).unwrap();
        assert_relative_eq!(p, 2.0, epsilon = 1e-12);
    }

    #[test]
    fn linear_sequence() {
        let p = estimate_order(&[1.0, 0.5, 0.25, 0.125]).unwrap();
        assert_relative_eq!(p, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn tiny_tail_is_skipped() {
        let p = estimate_order(&[1e-1, 1e-2, 1e-4, 1e-20]).unwrap();
        assert_relative_eq!(p, 2.0, epsilon = 1e-12);
    }

    #[test]
    fn too_short_or_not_decreasing() {
        assert_eq!(estimate_order(&[]), None);
        assert_eq!(estimate_order(&[1.0, 0.1]), None);
        assert_eq!(estimate_order(&[1.0, 0.1, 0.2]), None);
        assert_eq!(estimate_order(&[1.0, 1.0, 0.5]), None);
    }
}
