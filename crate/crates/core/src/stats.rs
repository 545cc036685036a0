//! The eight-number summary used for every feature block.

use crate::error::{Error, Result};

/// Number of equal-width bins in the entropy histogram.
pub const ENTROPY_BINS: usize = 20;

/// Summary statistics of a value vector.
///
/// Conventions: sample standard deviation (n-1 denominator); quartiles by
/// linear interpolation between order statistics; skewness `m3 / m2^(3/2)`
/// and excess kurtosis `m4 / m2^2 - 3` from population central moments;
/// Shannon entropy (natural log) over a 20-bin equal-width histogram
/// spanning `[min, max]`. A zero-variance input yields
/// `(c, 0, c, c, c, 0, 0, 0)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DistributionStats {
    pub mean: f64,
    pub std: f64,
    pub q25: f64,
    pub q50: f64,
    pub q75: f64,
    pub skewness: f64,
    pub kurtosis: f64,
    pub entropy: f64,
}

impl DistributionStats {
    pub const NAMES: [&'static str; 8] = [
        "mean", "std", "q25", "q50", "q75", "skew", "kurt", "entropy",
    ];

    pub fn to_array(self) -> [f64; 8] {
        [
            self.mean,
            self.std,
            self.q25,
            self.q50,
            self.q75,
            self.skewness,
            self.kurtosis,
            self.entropy,
        ]
    }
}

fn quantile(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    let frac = pos - lo as f64;
    sorted[lo] + (sorted[hi] - sorted[lo]) * frac
}

/// Compute the eight-number summary. Empty input is an error.
///
/// Values are sorted internally before any accumulation, so the result is
/// exactly permutation-invariant (float summation order is canonical).
pub fn stats_of(values: &[f64]) -> Result<DistributionStats> {
    if values.is_empty() {
        return Err(Error::EmptyValues);
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    let min = sorted[0];
    let max = sorted[sorted.len() - 1];
    if min == max {
        return Ok(DistributionStats {
            mean: min,
            std: 0.0,
            q25: min,
            q50: min,
            q75: min,
            skewness: 0.0,
            kurtosis: 0.0,
            entropy: 0.0,
        });
    }

    let mean = sorted.iter().sum::<f64>() / n;
    let mut m2 = 0.0;
    let mut m3 = 0.0;
    let mut m4 = 0.0;
    for &x in &sorted {
        let d = x - mean;
        let d2 = d * d;
        m2 += d2;
        m3 += d2 * d;
        m4 += d2 * d2;
    }
    let std = (m2 / (n - 1.0)).sqrt();
    m2 /= n;
    m3 /= n;
    m4 /= n;
    let skewness = m3 / m2.powf(1.5);
    let kurtosis = m4 / (m2 * m2) - 3.0;

    let width = (max - min) / ENTROPY_BINS as f64;
    let mut counts = [0usize; ENTROPY_BINS];
    for &x in &sorted {
        let bin = (((x - min) / width) as usize).min(ENTROPY_BINS - 1);
        counts[bin] += 1;
    }
    let entropy = -counts
        .iter()
        .filter(|&&c| c > 0)
        .map(|&c| {
            let p = c as f64 / n;
            p * p.ln()
        })
        .sum::<f64>();

    Ok(DistributionStats {
        mean,
        std,
        q25: quantile(&sorted, 0.25),
        q50: quantile(&sorted, 0.50),
        q75: quantile(&sorted, 0.75),
        skewness,
        kurtosis,
        entropy,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn one_two_three_four() {
        let s = stats_of(&[1.0, 2.0, 3.0, 4.0]).unwrap();
        assert_relative_eq!(s.mean, 2.5);
        assert_relative_eq!(s.std, (5.0f64 / 3.0).sqrt(), max_relative = 1e-15);
        assert_relative_eq!(s.q25, 1.75);
        assert_relative_eq!(s.q50, 2.5);
        assert_relative_eq!(s.q75, 3.25);
        assert_relative_eq!(s.skewness, 0.0);
        assert_relative_eq!(s.kurtosis, -1.36, max_relative = 1e-14);
        // Four singleton bins out of twenty.
        assert_relative_eq!(s.entropy, 4.0f64.ln(), max_relative = 1e-14);
    }

    #[test]
    fn constant_vector() {
        let s = stats_of(&[0.3, 0.3, 0.3]).unwrap();
        assert_eq!(
            s.to_array(),
            [0.3, 0.0, 0.3, 0.3, 0.3, 0.0, 0.0, 0.0]
        );
    }

    #[test]
    fn single_element() {
        let s = stats_of(&[7.5]).unwrap();
        assert_eq!(s.to_array(), [7.5, 0.0, 7.5, 7.5, 7.5, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn empty_is_error() {
        assert!(matches!(stats_of(&[]), Err(Error::EmptyValues)));
    }

    proptest! {
        #[test]
        fn permutation_invariant(
            (values, shuffled) in prop::collection::vec(-1e3f64..1e3, 1..200)
                .prop_flat_map(|v| (Just(v.clone()), Just(v).prop_shuffle()))
        ) {
            let before = stats_of(&values).unwrap();
            let after = stats_of(&shuffled).unwrap();
            prop_assert_eq!(before.to_array(), after.to_array());
        }

        #[test]
        fn entropy_within_bounds(values in prop::collection::vec(-1e3f64..1e3, 1..200)) {
            let s = stats_of(&values).unwrap();
            prop_assert!(s.entropy >= 0.0);
            prop_assert!(s.entropy <= (ENTROPY_BINS as f64).ln() + 1e-12);
            prop_assert!(s.q25 <= s.q50 && s.q50 <= s.q75);
            prop_assert!(s.std >= 0.0);
        }
    }
}
