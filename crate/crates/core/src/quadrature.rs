//! Composite Simpson quadrature on uniform samples.

use crate::error::{Error, Result};

/// Composite Simpson's rule over an odd number (>= 3) of equally spaced samples.
pub fn simpson(values: &[f64], h: f64) -> Result<f64> {
    check_len(values.len())?;
    let n = values.len() - 1;
    let mut odd = 0.0;
    let mut even = 0.0;
    for (i, &v) in values.iter().enumerate().take(n).skip(1) {
        if i % 2 == 1 {
            odd += v;
        } else {
            even += v;
        }
    }
    Ok(h / 3.0 * (values[0] + 4.0 * odd + 2.0 * even + values[n]))
}

/// Running integral at every sample. Even indices get the composite Simpson
/// sum; odd indices add the three-point partial-panel rule
/// h/12 (5f₀ + 8f₁ − f₂) to the preceding even node. The last entry agrees
/// with [`simpson`] up to rounding.
pub fn cumulative_simpson(values: &[f64], h: f64) -> Result<Vec<f64>> {
    check_len(values.len())?;
    let mut out = vec![0.0; values.len()];
    let mut acc = 0.0;
    let mut i = 0;
    while i + 2 < values.len() {
        let (f0, f1, f2) = (values[i], values[i + 1], values[i + 2]);
        out[i + 1] = acc + h / 12.0 * (5.0 * f0 + 8.0 * f1 - f2);
        acc += h / 3.0 * (f0 + 4.0 * f1 + f2);
        out[i + 2] = acc;
        i += 2;
    }
    Ok(out)
}

fn check_len(len: usize) -> Result<()> {
    if len < 3 || len.is_multiple_of(2) {
        return Err(Error::InsufficientPoints {
            need: if len < 3 { 3 } else { len + 1 },
            got: len,
        });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_for_cubics() {
        let n = 10;
        let h = 2.0 / n as f64;
        let f: Vec<f64> = (0..=n)
            .map(|i| {
                let x = i as f64 * h;
                x * x * x - 2.0 * x + 1.0
            })
            .collect();
        // ∫₀² (x³ − 2x + 1) dx = 4 − 4 + 2
        assert!((simpson(&f, h).unwrap() - 2.0).abs() < 1e-14);
    }

    #[test]
    fn cumulative_matches_total_and_is_fourth_order_at_even_nodes() {
        let n = 64;
        let h = 1.0 / n as f64;
        let f: Vec<f64> = (0..=n).map(|i| (i as f64 * h).exp()).collect();
        let cum = cumulative_simpson(&f, h).unwrap();
        assert!((cum[n] - simpson(&f, h).unwrap()).abs() < 1e-14);
        for (i, c) in cum.iter().enumerate() {
            let exact = (i as f64 * h).exp() - 1.0;
            assert!((c - exact).abs() < 1e-8, "i={i}");
        }
    }

    #[test]
    fn rejects_even_sample_counts() {
        assert!(simpson(&[1.0, 2.0], 0.1).is_err());
        assert!(simpson(&[1.0, 2.0, 3.0, 4.0], 0.1).is_err());
        assert!(cumulative_simpson(&[1.0], 0.1).is_err());
    }
}
