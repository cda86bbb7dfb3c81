//! Stable log-domain arithmetic for probabilities and weights.
//!
//! Everything downstream of the type engine works with log-probabilities;
//! these helpers are the only place exp/ln cancellation is handled.

/// log(e^a + e^b) without overflow.
#[inline]
pub fn log_add_exp(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    if a >= b {
        a + (b - a).exp().ln_1p()
    } else {
        b + (a - b).exp().ln_1p()
    }
}

/// log(e^a - e^b) for a >= b; returns NEG_INFINITY when a == b.
#[inline]
pub fn log_diff_exp(a: f64, b: f64) -> f64 {
    debug_assert!(a >= b, "log_diff_exp needs a >= b, got {a} < {b}");
    if b == f64::NEG_INFINITY {
        return a;
    }
    if a == b {
        return f64::NEG_INFINITY;
    }
    a + (-(b - a).exp()).ln_1p()
}

/// log(sum e^x) over a slice; NEG_INFINITY on empty input.
pub fn log_sum_exp(xs: &[f64]) -> f64 {
    let m = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !m.is_finite() {
        return m;
    }
    let s: f64 = xs.iter().map(|&x| (x - m).exp()).sum();
    m + s.ln()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn add_matches_naive_in_range() {
        let (a, b) = (0.5f64, 2.0f64);
        let expected = (a.exp() + b.exp()).ln();
        assert!((log_add_exp(a, b) - expected).abs() < 1e-15);
    }

    #[test]
    fn add_survives_large_magnitudes() {
        // naive exp overflows here
        let got = log_add_exp(1234.0, 1232.0);
        let expected = 1232.0 + (2f64.exp() + 1.0).ln();
        assert!((got - expected).abs() < 1e-12);
    }

    #[test]
    fn diff_complements_add() {
        let (a, b) = (-0.3f64, -4.0f64);
        let s = log_add_exp(a, b);
        assert!((log_diff_exp(s, b) - a).abs() < 1e-13);
    }

    #[test]
    fn sum_handles_neg_infinity_entries() {
        let xs = [f64::NEG_INFINITY, -0.5, f64::NEG_INFINITY];
        assert!((log_sum_exp(&xs) + 0.5).abs() < 1e-15);
        assert_eq!(log_sum_exp(&[]), f64::NEG_INFINITY);
    }
}
