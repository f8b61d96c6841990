//! Equal-width histogram geometry with Scott's-rule bin width.
//!
//! Bin `k` is the half-open interval `[origin + k·w, origin + (k+1)·w)`,
//! except the last bin, which is closed at the signal maximum so that every
//! sample of the signal lands in exactly one bin.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Scott's constant in `w = 3.49·σ / N^(1/3)`.
pub const SCOTT_FACTOR: f64 = 3.49;

/// Upper bound on the number of bins a signal may produce.
pub const MAX_BINS: usize = 65_536;

/// Denominator used for the standard deviation inside Scott's rule.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StdDenominator {
    /// `N - 1`
    #[default]
    Sample,
    /// `N`
    Population,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BinSpec {
    pub origin: f64,
    pub width: f64,
    pub count: usize,
    pub max_amplitude: f64,
}

impl BinSpec {
    /// Build a spec from explicit geometry, checking that the bins cover
    /// `[origin, max_amplitude]`.
    pub fn new(origin: f64, width: f64, count: usize, max_amplitude: f64) -> Result<Self> {
        if !(width > 0.0 && width.is_finite()) {
            return Err(Error::Degenerate);
        }
        if !origin.is_finite() || !max_amplitude.is_finite() || max_amplitude < origin {
            return Err(Error::invalid(format!(
                "invalid amplitude range [{origin}, {max_amplitude}]"
            )));
        }
        if count == 0 {
            return Err(Error::invalid("bin count must be at least 1"));
        }
        if count > MAX_BINS {
            return Err(Error::TooManyBins {
                count,
                limit: MAX_BINS,
            });
        }
        let spec = Self {
            origin,
            width,
            count,
            max_amplitude,
        };
        if spec.edge(count) < max_amplitude {
            return Err(Error::invalid(format!(
                "{count} bins of width {width} from {origin} do not reach {max_amplitude}"
            )));
        }
        Ok(spec)
    }

    /// Left edge of bin `k`; `edge(count)` is the nominal right edge.
    pub fn edge(&self, k: usize) -> f64 {
        self.origin + k as f64 * self.width
    }

    pub fn edges(&self) -> Vec<f64> {
        (0..=self.count).map(|k| self.edge(k)).collect()
    }

    /// Index of the bin holding `x`, or `None` outside `[origin, max]`.
    pub fn bin_of(&self, x: f64) -> Option<usize> {
        if !(x >= self.origin && x <= self.max_amplitude) {
            return None;
        }
        let last = self.count - 1;
        let mut k = (((x - self.origin) / self.width).floor() as usize).min(last);
        // The quotient can land one bin off near an edge; settle against the
        // edges themselves so membership matches `x >= edge(k) && x < edge(k+1)`.
        while k > 0 && x < self.edge(k) {
            k -= 1;
        }
        while k < last && x >= self.edge(k + 1) {
            k += 1;
        }
        Some(k)
    }
}

/// Sample standard deviation (`N - 1` denominator).
pub fn sample_std(values: &[f64]) -> Result<f64> {
    std_dev(values, StdDenominator::Sample)
}

pub fn std_dev(values: &[f64], denominator: StdDenominator) -> Result<f64> {
    let n = values.len();
    if n < 2 {
        return Err(Error::TooFewSamples { got: n });
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    let ss: f64 = values.iter().map(|v| (v - mean) * (v - mean)).sum();
    let dof = match denominator {
        StdDenominator::Sample => n - 1,
        StdDenominator::Population => n,
    };
    Ok((ss / dof as f64).sqrt())
}

/// Scott's-rule bin width `3.49·σ / N^(1/3)`.
pub fn scott_bin_width(values: &[f64]) -> Result<f64> {
    scott_bin_width_with(values, StdDenominator::Sample)
}

pub fn scott_bin_width_with(values: &[f64], denominator: StdDenominator) -> Result<f64> {
    let sigma = std_dev(values, denominator)?;
    let width = SCOTT_FACTOR * sigma / (values.len() as f64).cbrt();
    if width.is_nan() || width <= 0.0 {
        return Err(Error::Degenerate);
    }
    Ok(width)
}

/// Bin geometry for a signal: origin at its minimum, Scott width, and
/// `ceil((max - min) / w)` bins.
pub fn make_bin_spec(values: &[f64]) -> Result<BinSpec> {
    let width = scott_bin_width(values)?;
    make_bin_spec_with_width(values, width)
}

/// Same as [`make_bin_spec`] with a caller-chosen width.
pub fn make_bin_spec_with_width(values: &[f64], width: f64) -> Result<BinSpec> {
    if values.len() < 2 {
        return Err(Error::TooFewSamples { got: values.len() });
    }
    if !(width > 0.0 && width.is_finite()) {
        return Err(Error::Degenerate);
    }
    let (lo, hi) = min_max(values);
    if hi.is_nan() || lo.is_nan() || hi <= lo {
        return Err(Error::Degenerate);
    }
    let ratio = ((hi - lo) / width).ceil();
    if ratio > MAX_BINS as f64 {
        return Err(Error::TooManyBins {
            count: if ratio.is_finite() {
                ratio as usize
            } else {
                usize::MAX
            },
            limit: MAX_BINS,
        });
    }
    let mut count = (ratio as usize).max(1);
    // Rounding in `lo + count·w` can fall a hair short of `hi`.
    if lo + count as f64 * width < hi {
        count += 1;
    }
    BinSpec::new(lo, width, count, hi)
}

pub(crate) fn min_max(values: &[f64]) -> (f64, f64) {
    values
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
            (lo.min(v), hi.max(v))
        })
}

/// Bin membership: `Some(k)` with `x` in bin `k`, `None` outside the range.
pub fn assign_bin(x: f64, spec: &BinSpec) -> Option<usize> {
    spec.bin_of(x)
}

/// Per-bin sample counts; they sum to `values.len()`.
pub fn histogram_counts(values: &[f64], spec: &BinSpec) -> Result<Vec<usize>> {
    let mut counts = vec![0usize; spec.count];
    for &v in values {
        let k = spec.bin_of(v).ok_or(Error::OutOfRange {
            value: v,
            lo: spec.origin,
            hi: spec.max_amplitude,
        })?;
        counts[k] += 1;
    }
    Ok(counts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const WORKED: [f64; 5] = [1.0, 2.0, 3.0, 4.0, 5.0];

    #[test]
    fn std_of_one_to_five() {
        assert_eq!(sample_std(&WORKED).unwrap(), 1.5811388300841898);
        assert_eq!(sample_std(&[2.0, 2.0, 2.0]).unwrap(), 0.0);
        assert!(matches!(
            sample_std(&[1.0]),
            Err(Error::TooFewSamples { got: 1 })
        ));
        let pop = std_dev(&WORKED, StdDenominator::Population).unwrap();
        assert!((pop - 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn scott_width_worked_example() {
        let w = scott_bin_width(&WORKED).unwrap();
        // 3.49 · sqrt(2.5) / 5^(1/3)
        assert!((w - 3.2270).abs() < 1e-4, "{w}");
        assert!(matches!(
            scott_bin_width(&[7.0, 7.0, 7.0, 7.0]),
            Err(Error::Degenerate)
        ));
    }

    #[test]
    fn scott_width_unit_sigma() {
        // rescaled to σ = 1
        let raw: Vec<f64> = (0..1000).map(|i| ((i * 37 % 1000) as f64).sin()).collect();
        let s = sample_std(&raw).unwrap();
        let unit: Vec<f64> = raw.iter().map(|v| v / s).collect();
        let w = scott_bin_width(&unit).unwrap();
        assert!((w - 0.349).abs() < 1e-12, "{w}");
    }

    #[test]
    fn worked_spec() {
        let spec = make_bin_spec(&WORKED).unwrap();
        assert_eq!(spec.origin, 1.0);
        assert_eq!(spec.count, 2);
        assert_eq!(spec.max_amplitude, 5.0);
        assert!((spec.width - 3.2270).abs() < 1e-4);
    }

    #[test]
    fn figure_range_example() {
        let values = [0.3, -0.91, 0.5, 1.02, -0.2, 0.0, 0.7, -0.5];
        let spec = make_bin_spec(&values).unwrap();
        assert_eq!(spec.origin, -0.91);
        assert_eq!(spec.max_amplitude, 1.02);
    }

    #[test]
    fn range_equal_to_width_is_one_bin() {
        let spec = make_bin_spec_with_width(&[0.0, 0.5, 2.0], 2.0).unwrap();
        assert_eq!(spec.count, 1);
        assert_eq!(assign_bin(2.0, &spec), Some(0));
    }

    #[test]
    fn too_many_bins() {
        let mut v = vec![0.0; 10];
        v.push(1.0);
        assert!(matches!(
            make_bin_spec_with_width(&v, 1e-6),
            Err(Error::TooManyBins { .. })
        ));
    }

    #[test]
    fn assign_edges() {
        let spec = make_bin_spec(&WORKED).unwrap();
        assert_eq!(assign_bin(spec.origin, &spec), Some(0));
        assert_eq!(assign_bin(spec.max_amplitude, &spec), Some(spec.count - 1));
        assert_eq!(assign_bin(spec.origin - 0.1, &spec), None);
        assert_eq!(assign_bin(spec.max_amplitude + 0.1, &spec), None);
        assert_eq!(assign_bin(f64::NAN, &spec), None);
        assert_eq!(assign_bin(spec.edge(1), &spec), Some(1));
    }

    #[test]
    fn counts_worked_example() {
        let spec = make_bin_spec(&WORKED).unwrap();
        assert_eq!(histogram_counts(&WORKED, &spec).unwrap(), vec![4, 1]);
        let two = make_bin_spec_with_width(&[0.0, 1.0], 1.0).unwrap();
        assert_eq!(two.count, 1);
        assert_eq!(histogram_counts(&[0.0, 1.0], &two).unwrap(), vec![2]);
        assert!(matches!(
            histogram_counts(&[9.0], &spec),
            Err(Error::OutOfRange { .. })
        ));
    }

    #[test]
    fn counts_sum_to_n_on_random_signals() {
        let mut rng = crate::rng::SeededRng::new(11);
        for _ in 0..100 {
            let n = 2 + rng.below(2000);
            let v: Vec<f64> = (0..n).map(|_| rng.normal() * 3.0 + 1.0).collect();
            let spec = make_bin_spec(&v).unwrap();
            let c = histogram_counts(&v, &spec).unwrap();
            assert_eq!(c.iter().sum::<usize>(), n);
        }
    }

    proptest! {
        #[test]
        fn width_scale_and_shift(
            v in prop::collection::vec(-100.0f64..100.0, 3..200),
            a in 0.01f64..100.0,
            c in -1e3f64..1e3,
        ) {
            let Ok(w) = scott_bin_width(&v) else { return Ok(()); };
            prop_assume!(w > 0.5);
            let scaled: Vec<f64> = v.iter().map(|x| a * x).collect();
            let shifted: Vec<f64> = v.iter().map(|x| x + c).collect();
            let ws = scott_bin_width(&scaled).unwrap();
            let wc = scott_bin_width(&shifted).unwrap();
            prop_assert!(((ws - a * w) / (a * w)).abs() < 1e-12);
            prop_assert!(((wc - w) / w).abs() < 1e-12);
        }

        #[test]
        fn assign_is_total_on_range(
            v in prop::collection::vec(-10.0f64..10.0, 3..100),
            t in 0.0f64..=1.0,
        ) {
            let Ok(spec) = make_bin_spec(&v) else { return Ok(()); };
            let x = spec.origin + t * (spec.max_amplitude - spec.origin);
            let k = assign_bin(x.min(spec.max_amplitude), &spec);
            prop_assert!(matches!(k, Some(k) if k < spec.count));
            let c = histogram_counts(&v, &spec).unwrap();
            prop_assert_eq!(c.iter().sum::<usize>(), v.len());
        }
    }
}
