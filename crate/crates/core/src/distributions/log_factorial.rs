use statrs::function::factorial::ln_factorial;

/// Largest argument tabulated eagerly.
pub const DEFAULT_TABLE_LIMIT: u64 = 1_000_000;

/// `ln(x!)` for `x` up to a limit from a table, beyond it on demand.
#[derive(Debug, Clone, PartialEq)]
pub struct LogFactorials {
    table: Vec<f64>,
}

impl LogFactorials {
    /// Tabulates `ln(0!)..=ln(limit!)`, capped at [`DEFAULT_TABLE_LIMIT`].
    pub fn new(limit: u64) -> Self {
        let limit = limit.min(DEFAULT_TABLE_LIMIT);
        LogFactorials {
            table: (0..=limit).map(ln_factorial).collect(),
        }
    }

    #[inline]
    pub fn get(&self, x: u64) -> f64 {
        match self.table.get(x as usize) {
            Some(&v) => v,
            None => ln_factorial(x),
        }
    }

    pub fn limit(&self) -> u64 {
        self.table.len() as u64 - 1
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_values_exact() {
        let t = LogFactorials::new(10);
        assert_eq!(t.get(0), 0.0);
        assert_eq!(t.get(1), 0.0);
        assert!((t.get(5) - 120f64.ln()).abs() < 1e-14);
        // beyond the table
        let direct: f64 = (1..=30u64).map(|i| (i as f64).ln()).sum();
        assert!((t.get(30) - direct).abs() < 1e-12);
    }

    #[test]
    fn limit_is_capped() {
        assert_eq!(LogFactorials::new(7).limit(), 7);
    }
}
