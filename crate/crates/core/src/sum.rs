//! Compensated accumulation. All reductions that feed reports go through
//! [`NeumaierSum`] in a fixed order, so results are deterministic at fixed
//! budgets.

/// Neumaier (improved Kahan–Babuška) compensated accumulator.
#[derive(Debug, Clone, Copy, Default)]
pub struct NeumaierSum {
    sum: f64,
    compensation: f64,
}

impl NeumaierSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, value: f64) {
        let t = self.sum + value;
        if self.sum.abs() >= value.abs() {
            self.compensation += (self.sum - t) + value;
        } else {
            self.compensation += (value - t) + self.sum;
        }
        self.sum = t;
    }

    #[inline]
    pub fn total(&self) -> f64 {
        self.sum + self.compensation
    }
}

/// Compensated sum of an iterator, in iteration order.
pub fn compensated_sum<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    let mut acc = NeumaierSum::new();
    for v in values {
        acc.add(v);
    }
    acc.total()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recovers_cancellation() {
        // 1 + 1e100 - 1e100 loses the 1 under naive summation.
        let s = compensated_sum([1.0, 1e100, -1e100]);
        assert_eq!(s, 1.0);
    }

    #[test]
    fn harmonic_partial_matches_reference() {
        let mut acc = NeumaierSum::new();
        for k in 1..=1_000_000u64 {
            acc.add(1.0 / k as f64);
        }
        // ln(1e6) + gamma + 1/(2e6), accurate to ~1e-13.
        let reference = 14.392726722865723;
        assert!((acc.total() - reference).abs() < 1e-9);
    }
}
