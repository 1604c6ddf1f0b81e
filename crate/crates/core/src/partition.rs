//! Exhaustive enumeration over partitions of `n`: the exact cycle-type law,
//! exact `d_b(n)` and the exact law of `(log O, log Y)`.

use crate::cycle_type::{factorial, CycleType};
use crate::error::{Error, Result};
use crate::order::{order_from_lambda_sum, order_lcm, order_stats};
use crate::special::{ln_gamma, MangoldtSieve};
use crate::weights::{ln_bigint, WeightSequence};
use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use std::collections::HashMap;
use std::io::Write;

pub const MAX_ENUMERATION_N: usize = 45;
pub const MAX_TV_N: usize = 25;
const MAX_JOINT_ENTRIES: usize = 10_000_000;

/// Partitions of `n` in reverse-lexicographic order, starting from `(n)`.
#[derive(Debug, Clone)]
pub struct Partitions {
    parts: Vec<usize>,
    done: bool,
}

impl Partitions {
    pub fn new(n: usize) -> Self {
        Partitions {
            parts: vec![n],
            done: n == 0,
        }
    }

    fn to_cycle_type(&self) -> CycleType {
        let mut pairs: Vec<(usize, usize)> = Vec::new();
        for &p in &self.parts {
            match pairs.last_mut() {
                Some(last) if last.0 == p => last.1 += 1,
                _ => pairs.push((p, 1)),
            }
        }
        CycleType::from_counts(&pairs).expect("partition of n >= 1")
    }

    fn advance(&mut self) {
        let Some(i) = self.parts.iter().rposition(|&p| p > 1) else {
            self.done = true;
            return;
        };
        let ones = self.parts.len() - i - 1;
        self.parts[i] -= 1;
        let v = self.parts[i];
        let mut rem = ones + 1;
        self.parts.truncate(i + 1);
        while rem > 0 {
            let take = v.min(rem);
            self.parts.push(take);
            rem -= take;
        }
    }
}

impl Iterator for Partitions {
    type Item = CycleType;

    fn next(&mut self) -> Option<CycleType> {
        if self.done {
            return None;
        }
        let out = self.to_cycle_type();
        self.advance();
        Some(out)
    }
}

#[derive(Debug, Clone)]
pub struct LawEntry {
    pub cycle_type: CycleType,
    pub probability: f64,
    /// Present when the weights are integral.
    pub exact: Option<BigRational>,
}

/// Exact law of the cycle type under `P_Θ` on `S_n`.
#[derive(Debug, Clone)]
pub struct WeightedPartitionLaw {
    pub n: usize,
    pub weights: WeightSequence,
    pub entries: Vec<LawEntry>,
    /// `h_n`, the pre-normalization total `Σ_λ Π θ_m^{C_m} / z_λ`.
    pub total_weight: f64,
    pub total_weight_exact: Option<BigRational>,
}

/// Enumerates all partitions of `n ≤ 45` with probability `Π θ_m^{C_m}/(z_λ h_n)`.
///
/// Integer weights are handled exactly through the integer class weights
/// `n!/z_λ · Π θ_m^{C_m}`; otherwise the weights are summed in `f64`.
pub fn enumerate_law(w: &WeightSequence, n: usize) -> Result<WeightedPartitionLaw> {
    if n == 0 || n > MAX_ENUMERATION_N {
        return Err(Error::out_of_range("n", n as f64, format!("1..={MAX_ENUMERATION_N}")));
    }
    let types: Vec<CycleType> = Partitions::new(n).collect();
    if w.has_exact_weights() {
        let ints: Vec<BigUint> = types
            .iter()
            .map(|ct| {
                let mut v = ct.class_size();
                for &(m, c) in ct.counts() {
                    let theta = w.exact_theta(m).expect("integral weights").to_biguint().expect("positive");
                    v *= num_traits::pow(theta, c);
                }
                v
            })
            .collect();
        let total: BigUint = ints.iter().sum();
        let total_i = BigInt::from(total.clone());
        let entries = types
            .into_iter()
            .zip(ints)
            .map(|(cycle_type, v)| {
                let exact = BigRational::new(BigInt::from(v), total_i.clone());
                let probability = exact.to_f64().unwrap_or(0.0);
                LawEntry {
                    cycle_type,
                    probability,
                    exact: Some(exact),
                }
            })
            .collect();
        let h = BigRational::new(total_i, BigInt::from(factorial(n)));
        return Ok(WeightedPartitionLaw {
            n,
            weights: *w,
            entries,
            total_weight: crate::weights::ln_rational(&h).exp(),
            total_weight_exact: Some(h),
        });
    }
    let raw: Vec<f64> = types.iter().map(|ct| ct.ln_weight(w).exp()).collect();
    let total = kahan_sum(raw.iter().copied());
    let entries = types
        .into_iter()
        .zip(raw)
        .map(|(cycle_type, v)| LawEntry {
            cycle_type,
            probability: v / total,
            exact: None,
        })
        .collect();
    Ok(WeightedPartitionLaw {
        n,
        weights: *w,
        entries,
        total_weight: total,
        total_weight_exact: None,
    })
}

pub(crate) fn kahan_sum(it: impl Iterator<Item = f64>) -> f64 {
    let mut sum = 0.0;
    let mut comp = 0.0;
    for x in it {
        let y = x - comp;
        let t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
    sum
}

fn poisson_ln_pmf(lambda: f64, k: usize) -> f64 {
    k as f64 * lambda.ln() - lambda - ln_gamma(k as f64 + 1.0)
}

impl WeightedPartitionLaw {
    /// Marginal law of `(C_1, ..., C_b)` keyed by the count vector.
    pub fn joint_counts(&self, b: usize) -> Result<HashMap<Vec<u32>, f64>> {
        let mut map: HashMap<Vec<u32>, f64> = HashMap::new();
        for e in &self.entries {
            let key: Vec<u32> = (1..=b).map(|m| e.cycle_type.count(m) as u32).collect();
            *map.entry(key).or_insert(0.0) += e.probability;
            if map.len() > MAX_JOINT_ENTRIES {
                return Err(Error::Numeric(format!("joint count law exceeds {MAX_JOINT_ENTRIES} entries")));
            }
        }
        Ok(map)
    }

    /// Law of `T_{0b} = Σ_{m≤b} m C_m`, indexed `0..=n`.
    pub fn small_cycle_mass_law(&self, b: usize) -> Vec<f64> {
        let mut p = vec![0.0; self.n + 1];
        for e in &self.entries {
            let t: usize = e.cycle_type.counts().iter().filter(|&&(m, _)| m <= b).map(|&(m, c)| m * c).sum();
            p[t] += e.probability;
        }
        p
    }

    /// `Σ_x (P(x) - Q(x))^+` over the support of `P`, with `Q` the product of
    /// `Poisson(θ_m t^m / m)` laws for `m ≤ b`.
    pub fn tv_distance(&self, b: usize, t: f64) -> Result<f64> {
        check_tv_args(self.n, b, t)?;
        if b == 0 {
            return Ok(0.0);
        }
        let lambdas: Vec<f64> = (1..=b).map(|m| self.weights.poisson_mean(m, t)).collect();
        let joint = self.joint_counts(b)?;
        let mut keys: Vec<_> = joint.keys().cloned().collect();
        keys.sort_unstable();
        let diffs = keys.iter().map(|x| {
            let ln_q: f64 = x.iter().zip(&lambdas).map(|(&c, &l)| poisson_ln_pmf(l, c as usize)).sum();
            (joint[x] - ln_q.exp()).max(0.0)
        });
        Ok(kahan_sum(diffs).clamp(0.0, 1.0))
    }

    /// Same distance via the scalar `T_{0b}`: the Poisson law of `T_{0b}` is
    /// assembled by enumerating every `k ≤ n` as a sum of parts `≤ b`.
    pub fn tv_distance_scalar(&self, b: usize, t: f64) -> Result<f64> {
        check_tv_args(self.n, b, t)?;
        if b == 0 {
            return Ok(0.0);
        }
        let lambdas: Vec<f64> = (1..=b).map(|m| self.weights.poisson_mean(m, t)).collect();
        let p = self.small_cycle_mass_law(b);
        let mut total = Vec::with_capacity(self.n + 1);
        for (k, &pk) in p.iter().enumerate() {
            let qk = if k == 0 {
                lambdas.iter().map(|l| -l).sum::<f64>().exp()
            } else {
                let terms = Partitions::new(k).filter(|ct| ct.counts().last().is_some_and(|&(m, _)| m <= b)).map(|ct| {
                    let ln_q: f64 = (1..=b).map(|m| poisson_ln_pmf(lambdas[m - 1], ct.count(m))).sum();
                    ln_q.exp()
                });
                kahan_sum(terms)
            };
            total.push((pk - qk).max(0.0));
        }
        Ok(kahan_sum(total.into_iter()).clamp(0.0, 1.0))
    }

    /// CSV dump `schema_version,cycle_type,probability,log_order,log_y`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        let sieve = MangoldtSieve::new(self.n);
        writeln!(out, "schema_version,cycle_type,probability,log_order,log_y")?;
        for e in &self.entries {
            let st = order_stats(&e.cycle_type, &sieve)?;
            writeln!(
                out,
                "{},{},{},{},{}",
                crate::SCHEMA_VERSION,
                e.cycle_type,
                e.probability,
                st.log_o,
                st.log_y
            )?;
        }
        Ok(())
    }
}

fn check_tv_args(n: usize, b: usize, t: f64) -> Result<()> {
    if n > MAX_TV_N {
        return Err(Error::out_of_range("n", n as f64, format!("1..={MAX_TV_N}")));
    }
    if b > n {
        return Err(Error::out_of_range("b", b as f64, format!("0..={n}")));
    }
    if !(t > 0.0 && t < 1.0) {
        return Err(Error::out_of_range("t", t, "(0, 1)"));
    }
    Ok(())
}

/// Exact `d_b(n)` for `n ≤ 25` from the enumerated law.
pub fn exact_tv_distance(w: &WeightSequence, n: usize, b: usize, t: f64) -> Result<f64> {
    check_tv_args(n, b, t)?;
    enumerate_law(w, n)?.tv_distance(b, t)
}

#[derive(Debug, Clone)]
pub struct OrderLawEntry {
    pub cycle_type: CycleType,
    pub probability: f64,
    pub log_order: f64,
    pub log_y: f64,
    /// `O` as an integer (checked to agree between lcm and the prime-power sum).
    pub order: BigUint,
}

/// Exact law of `(log O_n, log Y_n)`, one row per cycle type.
#[derive(Debug, Clone)]
pub struct OrderLaw {
    pub n: usize,
    pub entries: Vec<OrderLawEntry>,
}

/// Builds the law of `(log O, log Y)`; for every cycle type the order is
/// computed both as an integer lcm and from the prime-power sum, and any
/// disagreement is reported as an error.
pub fn exact_order_law(w: &WeightSequence, n: usize) -> Result<OrderLaw> {
    let law = enumerate_law(w, n)?;
    let sieve = MangoldtSieve::new(n);
    let mut entries = Vec::with_capacity(law.entries.len());
    for e in law.entries {
        let lcm = order_lcm(&e.cycle_type);
        let via_lambda = order_from_lambda_sum(&e.cycle_type, &sieve)?;
        if lcm != via_lambda {
            return Err(Error::Numeric(format!(
                "order mismatch for {}: lcm {lcm} vs prime-power sum {via_lambda}",
                e.cycle_type
            )));
        }
        entries.push(OrderLawEntry {
            log_order: ln_bigint(&BigInt::from(lcm.clone())),
            log_y: e.cycle_type.log_y(),
            probability: e.probability,
            cycle_type: e.cycle_type,
            order: lcm,
        });
    }
    Ok(OrderLaw { n, entries })
}

impl OrderLaw {
    pub fn mean_log_order(&self) -> f64 {
        kahan_sum(self.entries.iter().map(|e| e.probability * e.log_order))
    }

    pub fn mean_log_y(&self) -> f64 {
        kahan_sum(self.entries.iter().map(|e| e.probability * e.log_y))
    }

    /// `log E[exp(s log Y)]`.
    pub fn log_mgf_log_y(&self, s: f64) -> f64 {
        kahan_sum(self.entries.iter().map(|e| e.probability * (s * e.log_y).exp())).ln()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty() || self.entries.iter().all(|e| e.probability.is_zero())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::One;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    fn find<'a>(law: &'a WeightedPartitionLaw, s: &str) -> &'a LawEntry {
        let ct: CycleType = s.parse().unwrap();
        law.entries.iter().find(|e| e.cycle_type == ct).unwrap()
    }

    #[test]
    fn partition_counts_and_order() {
        let counts: Vec<usize> = (1..=12).map(|n| Partitions::new(n).count()).collect();
        assert_eq!(counts, vec![1, 2, 3, 5, 7, 11, 15, 22, 30, 42, 56, 77]);
        assert_eq!(Partitions::new(45).count(), 89_134);
        let p4: Vec<String> = Partitions::new(4).map(|c| c.to_string()).collect();
        assert_eq!(p4, vec!["4", "3-1", "2-2", "2-1-1", "1-1-1-1"]);
        assert!(Partitions::new(0).next().is_none());
    }

    #[test]
    fn linear_weights_n3_and_n4() {
        let w = WeightSequence::power(1.0).unwrap();
        let law = enumerate_law(&w, 3).unwrap();
        assert_eq!(find(&law, "3").exact.as_ref().unwrap(), &q(6, 13));
        assert_eq!(find(&law, "2-1").exact.as_ref().unwrap(), &q(6, 13));
        assert_eq!(find(&law, "1-1-1").exact.as_ref().unwrap(), &q(1, 13));
        let law4 = enumerate_law(&w, 4).unwrap();
        assert_eq!(law4.total_weight_exact.unwrap(), q(73, 24));
        let s: BigRational = law4.entries.iter().map(|e| e.exact.clone().unwrap()).sum();
        assert!(s.is_one());
    }

    #[test]
    fn uniform_single_cycle() {
        let law = enumerate_law(&WeightSequence::uniform(), 4).unwrap();
        assert_eq!(find(&law, "4").exact.as_ref().unwrap(), &q(1, 4));
        assert_eq!(law.total_weight_exact.unwrap(), q(1, 1));
    }

    #[test]
    fn float_mode_sums_to_one() {
        let w = WeightSequence::power(0.5).unwrap();
        let law = enumerate_law(&w, 18).unwrap();
        assert!(law.entries.iter().all(|e| e.exact.is_none()));
        assert!((kahan_sum(law.entries.iter().map(|e| e.probability)) - 1.0).abs() < 1e-12);
        let tab = crate::weights::NormalizationTable::build(w, 18, 0).unwrap();
        assert!((law.total_weight.ln() - tab.log_h(18)).abs() < 1e-12);
    }

    #[test]
    fn range_errors() {
        let w = WeightSequence::power(1.0).unwrap();
        assert!(enumerate_law(&w, 46).is_err());
        assert!(enumerate_law(&w, 0).is_err());
        assert!(exact_tv_distance(&w, 26, 2, 0.5).is_err());
        assert!(exact_tv_distance(&w, 5, 6, 0.5).is_err());
        assert!(exact_tv_distance(&w, 5, 2, 1.0).is_err());
    }

    #[test]
    fn tv_endpoints() {
        let w = WeightSequence::power(1.0).unwrap();
        let t = crate::lattice::saddle_parameter(1.0, 10);
        assert_eq!(exact_tv_distance(&w, 10, 0, t).unwrap(), 0.0);
        // b = n: 1 - P_t[T_{0n} = n] = 1 - t^n h_n exp(-Σ λ_m)
        let law = enumerate_law(&w, 10).unwrap();
        let sum_l: f64 = (1..=10).map(|m| w.poisson_mean(m, t)).sum();
        let p = t.powi(10) * law.total_weight * (-sum_l).exp();
        assert!((law.tv_distance(10, t).unwrap() - (1.0 - p)).abs() < 1e-13);
    }

    #[test]
    fn vector_and_scalar_tv_agree() {
        for &g in &[0.5, 1.0, 2.0] {
            let w = WeightSequence::power(g).unwrap();
            for n in [1usize, 2, 5, 9, 14] {
                let law = enumerate_law(&w, n).unwrap();
                let t = crate::lattice::saddle_parameter(g, n);
                for b in 0..=n {
                    let v = law.tv_distance(b, t).unwrap();
                    let s = law.tv_distance_scalar(b, t).unwrap();
                    assert!((v - s).abs() < 1e-12, "gamma {g} n {n} b {b}: {v} vs {s}");
                    assert!((0.0..=1.0).contains(&v));
                }
            }
        }
    }

    #[test]
    fn order_law_small() {
        let w = WeightSequence::power(1.0).unwrap();
        let law = exact_order_law(&w, 4).unwrap();
        // orders: (4)->4, (3,1)->3, (2,2)->2, (2,1,1)->2, (1^4)->1 with h_4 weights 6,8,... / 73
        let e = law.mean_log_order();
        let manual: f64 = law.entries.iter().map(|e| e.probability * (e.order.to_f64().unwrap()).ln()).sum();
        assert!((e - manual).abs() < 1e-14);
        assert_eq!(law.log_mgf_log_y(0.0), 0.0);
        assert!(!law.is_zero());
    }

    #[test]
    fn dump_format() {
        let law = enumerate_law(&WeightSequence::power(1.0).unwrap(), 3).unwrap();
        let mut buf = Vec::new();
        law.write_csv(&mut buf).unwrap();
        let s = String::from_utf8(buf).unwrap();
        let lines: Vec<_> = s.lines().collect();
        assert_eq!(lines[0], "schema_version,cycle_type,probability,log_order,log_y");
        assert!(lines[2].starts_with("1,2-1,"));
        assert_eq!(lines.len(), 4);
    }
}
