//! Log-space arithmetic shared by the model, distribution, and oracle code.

/// `ln(exp(a) + exp(b))` with the larger term factored out.
pub fn log_add_exp(a: f64, b: f64) -> f64 {
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    if hi == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    hi + (lo - hi).exp().ln_1p()
}

/// `ln(1 + exp(x))` without overflow for large `x` or precision loss for very negative `x`.
pub fn log1p_exp(x: f64) -> f64 {
    if x > 0.0 {
        x + (-x).exp().ln_1p()
    } else {
        x.exp().ln_1p()
    }
}

/// Log-sum-exp over a slice; `-inf` for an empty slice.
pub fn log_sum_exp(xs: &[f64]) -> f64 {
    let hi = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if hi == f64::NEG_INFINITY {
        return hi;
    }
    let mut acc = NeumaierSum::default();
    for &x in xs {
        acc.add((x - hi).exp());
    }
    hi + acc.total().ln()
}

/// Table of `ln C(n, k)` for `k = 0..=n`.
#[derive(Debug, Clone)]
pub struct LogBinomialTable {
    values: Vec<f64>,
}

impl LogBinomialTable {
    pub fn new(n: usize) -> Self {
        let values = (0..=n)
            .map(|k| statrs::function::factorial::ln_binomial(n as u64, k as u64))
            .collect();
        Self { values }
    }

    pub fn n(&self) -> usize {
        self.values.len() - 1
    }

    pub fn get(&self, k: usize) -> f64 {
        self.values[k]
    }
}

/// Compensated (Kahan-Babuska-Neumaier) summation.
#[derive(Debug, Clone, Copy, Default)]
pub struct NeumaierSum {
    sum: f64,
    compensation: f64,
}

impl NeumaierSum {
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.compensation += (self.sum - t) + x;
        } else {
            self.compensation += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn total(&self) -> f64 {
        self.sum + self.compensation
    }
}

impl FromIterator<f64> for NeumaierSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut acc = Self::default();
        for x in iter {
            acc.add(x);
        }
        acc
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn log_add_exp_handles_wide_gaps() {
        assert_eq!(log_add_exp(0.0, -800.0), 0.0);
        assert!((log_add_exp(700.0, 700.0) - (700.0 + 2f64.ln())).abs() < 1e-12);
        assert_eq!(
            log_add_exp(f64::NEG_INFINITY, f64::NEG_INFINITY),
            f64::NEG_INFINITY
        );
        assert_eq!(log_add_exp(f64::NEG_INFINITY, -3.0), -3.0);
    }

    #[test]
    fn log1p_exp_matches_naive_in_safe_range() {
        for &x in &[-30.0, -2.5, 0.0, 1.0, 20.0] {
            let naive = (1.0 + f64::exp(x)).ln();
            assert!((log1p_exp(x) - naive).abs() < 1e-12, "x = {x}");
        }
        assert_eq!(log1p_exp(1000.0), 1000.0);
        assert!(log1p_exp(-1000.0) >= 0.0);
    }

    #[test]
    fn log_binomial_table_small_values() {
        let t = LogBinomialTable::new(6);
        let exact = [1.0, 6.0, 15.0, 20.0, 15.0, 6.0, 1.0];
        for (k, c) in exact.iter().enumerate() {
            assert!((t.get(k) - f64::ln(*c)).abs() < 1e-13);
        }
        // C(100, 50) overflows u64 but not the log table.
        let big = LogBinomialTable::new(100);
        assert!((big.get(50) - 66.78384165201743).abs() < 1e-11);
    }

    #[test]
    fn neumaier_recovers_cancelled_terms() {
        let acc: NeumaierSum = [1.0, 1e100, 1.0, -1e100].into_iter().collect();
        assert_eq!(acc.total(), 2.0);
    }

    #[test]
    fn log_sum_exp_of_equal_terms() {
        let v = [-1000.0; 4];
        assert!((log_sum_exp(&v) - (-1000.0 + 4f64.ln())).abs() < 1e-12);
        assert_eq!(log_sum_exp(&[]), f64::NEG_INFINITY);
    }
}
