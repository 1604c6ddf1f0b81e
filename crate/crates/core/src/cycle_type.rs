use crate::error::{Error, Result};
use crate::weights::WeightSequence;
use num_bigint::BigUint;
use num_traits::One;
use std::fmt;
use std::str::FromStr;

/// Cycle type of a permutation of `n`: sparse counts `C_m`, ascending in `m`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CycleType {
    n: usize,
    /// `(m, C_m)` with `C_m > 0`, strictly increasing in `m`.
    counts: Vec<(usize, usize)>,
}

impl CycleType {
    /// Builds from `(m, C_m)` pairs in any order; zero counts are dropped and
    /// repeated lengths are merged.
    pub fn from_counts(pairs: &[(usize, usize)]) -> Result<Self> {
        let mut counts: Vec<(usize, usize)> = pairs.iter().copied().filter(|&(_, c)| c > 0).collect();
        if counts.iter().any(|&(m, _)| m == 0) {
            return Err(Error::InvalidArgument("cycle lengths must be positive".into()));
        }
        counts.sort_unstable();
        counts.dedup_by(|later, earlier| {
            if later.0 == earlier.0 {
                earlier.1 += later.1;
                true
            } else {
                false
            }
        });
        let n = counts.iter().map(|&(m, c)| m * c).sum();
        if n == 0 {
            return Err(Error::InvalidArgument("a cycle type needs n >= 1".into()));
        }
        Ok(CycleType { n, counts })
    }

    /// Builds from a list of cycle lengths.
    pub fn from_lengths(lengths: &[usize]) -> Result<Self> {
        let pairs: Vec<(usize, usize)> = lengths.iter().map(|&m| (m, 1)).collect();
        Self::from_counts(&pairs)
    }

    /// Builds from a dense count vector, `dense[m] = C_m` (`dense[0]` ignored).
    pub fn from_dense(dense: &[usize]) -> Result<Self> {
        let pairs: Vec<(usize, usize)> = dense.iter().enumerate().skip(1).map(|(m, &c)| (m, c)).collect();
        Self::from_counts(&pairs)
    }

    /// Asserts `Σ m C_m = expected`.
    pub(crate) fn check_size(&self, expected: usize) {
        assert_eq!(self.n, expected, "cycle type {self} does not have size {expected}");
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn count(&self, m: usize) -> usize {
        match self.counts.binary_search_by_key(&m, |&(k, _)| k) {
            Ok(i) => self.counts[i].1,
            Err(_) => 0,
        }
    }

    /// `(m, C_m)` pairs with `C_m > 0`, ascending in `m`.
    pub fn counts(&self) -> &[(usize, usize)] {
        &self.counts
    }

    /// Distinct cycle lengths, ascending.
    pub fn distinct_lengths(&self) -> impl Iterator<Item = usize> + '_ {
        self.counts.iter().map(|&(m, _)| m)
    }

    /// Number of cycles `ℓ(λ)`.
    pub fn num_cycles(&self) -> usize {
        self.counts.iter().map(|&(_, c)| c).sum()
    }

    /// Cycle lengths in nonincreasing order.
    pub fn lengths_desc(&self) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.num_cycles());
        for &(m, c) in self.counts.iter().rev() {
            out.extend(std::iter::repeat_n(m, c));
        }
        out
    }

    /// `log z_λ = Σ (C_m log m + log C_m!)`.
    pub fn ln_z(&self) -> f64 {
        self.counts
            .iter()
            .map(|&(m, c)| c as f64 * (m as f64).ln() + crate::special::ln_gamma(c as f64 + 1.0))
            .sum()
    }

    /// `z_λ = Π m^{C_m} C_m!`.
    pub fn z_exact(&self) -> BigUint {
        let mut z = BigUint::one();
        for &(m, c) in &self.counts {
            z *= num_traits::pow(BigUint::from(m), c);
            for k in 2..=c {
                z *= BigUint::from(k);
            }
        }
        z
    }

    /// Class size `n!/z_λ`.
    pub fn class_size(&self) -> BigUint {
        factorial(self.n) / self.z_exact()
    }

    /// `log(Π θ_m^{C_m} / z_λ)`, the unnormalized probability.
    pub fn ln_weight(&self, w: &WeightSequence) -> f64 {
        let theta: f64 = self.counts.iter().map(|&(m, c)| c as f64 * w.ln_theta(m)).sum();
        theta - self.ln_z()
    }

    /// `log Y = Σ C_m log m`.
    pub fn log_y(&self) -> f64 {
        self.counts.iter().map(|&(m, c)| c as f64 * (m as f64).ln()).sum()
    }
}

pub(crate) fn factorial(n: usize) -> BigUint {
    let mut f = BigUint::one();
    for k in 2..=n {
        f *= BigUint::from(k);
    }
    f
}

/// Dash-separated cycle lengths, largest first: `3-1-1`.
impl fmt::Display for CycleType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for &(m, c) in self.counts.iter().rev() {
            for _ in 0..c {
                if !first {
                    f.write_str("-")?;
                }
                write!(f, "{m}")?;
                first = false;
            }
        }
        Ok(())
    }
}

impl FromStr for CycleType {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let lengths = s
            .split('-')
            .map(|p| {
                p.trim()
                    .parse::<usize>()
                    .map_err(|_| Error::InvalidArgument(format!("bad cycle type '{s}'")))
            })
            .collect::<Result<Vec<_>>>()?;
        CycleType::from_lengths(&lengths)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn construction_and_queries() {
        let ct = CycleType::from_lengths(&[1, 3, 1, 2]).unwrap();
        assert_eq!(ct.n(), 7);
        assert_eq!(ct.count(1), 2);
        assert_eq!(ct.count(4), 0);
        assert_eq!(ct.num_cycles(), 4);
        assert_eq!(ct.lengths_desc(), vec![3, 2, 1, 1]);
        assert_eq!(ct.to_string(), "3-2-1-1");
        assert_eq!("3-2-1-1".parse::<CycleType>().unwrap(), ct);
        assert_eq!(CycleType::from_dense(&[0, 2, 1, 1]).unwrap(), ct);
        assert_eq!(CycleType::from_counts(&[(1, 1), (3, 1), (1, 1), (2, 1), (5, 0)]).unwrap(), ct);
        assert!(CycleType::from_lengths(&[]).is_err());
        assert!(CycleType::from_lengths(&[0, 2]).is_err());
        assert!("2-x".parse::<CycleType>().is_err());
    }

    #[test]
    fn z_and_class_sizes() {
        // (2,2,1): z = 2^2 * 2! * 1 = 8, class size 120/8 = 15
        let ct = CycleType::from_lengths(&[2, 2, 1]).unwrap();
        assert_eq!(ct.z_exact(), BigUint::from(8u32));
        assert_eq!(ct.class_size(), BigUint::from(15u32));
        assert!((ct.ln_z() - 8f64.ln()).abs() < 1e-14);
        let id = CycleType::from_lengths(&[1; 6]).unwrap();
        assert_eq!(id.class_size(), BigUint::one());
        assert_eq!(id.log_y(), 0.0);
    }

    #[test]
    fn weights_and_log_y() {
        let ct = CycleType::from_lengths(&[3]).unwrap();
        let w = WeightSequence::power(1.0).unwrap();
        // θ_3 / z = 3 / 3
        assert!(ct.ln_weight(&w).abs() < 1e-14);
        let ct = CycleType::from_lengths(&[2, 3]).unwrap();
        assert!((ct.log_y() - 6f64.ln()).abs() < 1e-14);
    }
}
