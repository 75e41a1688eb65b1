//! Small numerical helpers shared by the estimators.

/// Neumaier-compensated running sum.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    compensation: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.compensation += (self.sum - t) + x;
        } else {
            self.compensation += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.compensation
    }
}

impl FromIterator<f64> for CompensatedSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut acc = CompensatedSum::new();
        for x in iter {
            acc.add(x);
        }
        acc
    }
}

pub fn compensated_sum<I: IntoIterator<Item = f64>>(iter: I) -> f64 {
    iter.into_iter().collect::<CompensatedSum>().value()
}

/// `Σ w_j v_j² − (Σ w_j v_j)²` for weights summing to one, evaluated on values
/// shifted by `v_0`. When every value is identical the result is exactly 0.
pub fn weighted_variance(weights: &[f64], values: &[f64]) -> f64 {
    debug_assert_eq!(weights.len(), values.len());
    let Some(&pivot) = values.first() else {
        return 0.0;
    };
    let mut first = CompensatedSum::new();
    let mut second = CompensatedSum::new();
    for (&w, &v) in weights.iter().zip(values) {
        let d = v - pivot;
        first.add(w * d);
        second.add(w * d * d);
    }
    let mean = first.value();
    (second.value() - mean * mean).max(0.0)
}

/// Mean and unbiased sample variance.
pub fn mean_variance(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = compensated_sum(xs.iter().copied()) / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let ss = compensated_sum(xs.iter().map(|x| (x - mean) * (x - mean)));
    (mean, ss / (n - 1.0))
}

/// `ln k!` for `k = 0..=max`, accumulated exactly as partial sums of `ln i`.
pub fn ln_factorials(max: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(max + 1);
    let mut acc = CompensatedSum::new();
    out.push(0.0);
    for i in 1..=max {
        acc.add((i as f64).ln());
        out.push(acc.value());
    }
    out
}
