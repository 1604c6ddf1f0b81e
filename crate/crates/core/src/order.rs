//! `log Y`, `log O` and `Δ = log Y - log O` of a cycle type.
//!
//! With `D_k = Σ_m C_m 1{k | m}` and `D*_k = min(1, D_k)`,
//! `log Y = Σ_k Λ(k) D_k` and `log O = Σ_k Λ(k) D*_k`, where `O` is the order
//! of the permutation (the lcm of its cycle lengths).

use crate::cycle_type::CycleType;
use crate::error::{Error, Result};
use crate::special::MangoldtSieve;
use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::One;

/// `D_q` and `D*_q` for one prime power `q` with `D_q > 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PrimePowerCount {
    pub q: usize,
    pub d: usize,
    pub d_star: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OrderStats {
    pub log_y: f64,
    pub log_o: f64,
    /// `log Y - log O`, accumulated from integer exponent gaps so it is never negative.
    pub delta: f64,
    /// Filled only by [`order_stats_with_diagnostics`].
    pub per_prime_power: Option<Vec<PrimePowerCount>>,
}

fn check_sieve(ct: &CycleType, sieve: &MangoldtSieve) -> Result<()> {
    if sieve.len() < ct.n() {
        return Err(Error::InvalidArgument(format!(
            "Mangoldt sieve covers {} but the cycle type has n = {}",
            sieve.len(),
            ct.n()
        )));
    }
    Ok(())
}

/// Per prime `p`: `(p, max_m v_p(m), Σ_m C_m v_p(m))` over the present lengths.
fn prime_exponents(ct: &CycleType, sieve: &MangoldtSieve) -> Vec<(usize, u32, u64)> {
    let mut acc: Vec<(usize, u32, u64)> = Vec::new();
    for &(m, c) in ct.counts() {
        for (p, e) in sieve.factorize(m) {
            match acc.iter_mut().find(|(q, _, _)| *q == p) {
                Some(slot) => {
                    slot.1 = slot.1.max(e);
                    slot.2 += c as u64 * e as u64;
                }
                None => acc.push((p, e, c as u64 * e as u64)),
            }
        }
    }
    acc
}

/// `log Y`, `log O`, `Δ` via the prime factorizations of the distinct lengths.
///
/// A prime power `p^j` has `D*_{p^j} = 1` exactly when `j` is at most the
/// largest exponent of `p` among the lengths, so summing `Λ` over those
/// prime powers gives `Σ_p max_j · log p`.
pub fn order_stats(ct: &CycleType, sieve: &MangoldtSieve) -> Result<OrderStats> {
    check_sieve(ct, sieve)?;
    let mut log_o = 0.0;
    let mut delta = 0.0;
    for (p, max_e, tot_e) in prime_exponents(ct, sieve) {
        let lp = (p as f64).ln();
        log_o += max_e as f64 * lp;
        delta += (tot_e - max_e as u64) as f64 * lp;
    }
    Ok(OrderStats {
        log_y: ct.log_y(),
        log_o,
        delta,
        per_prime_power: None,
    })
}

/// [`order_stats`] plus the `D_q`, `D*_q` table for every prime power with `D_q > 0`.
pub fn order_stats_with_diagnostics(ct: &CycleType, sieve: &MangoldtSieve) -> Result<OrderStats> {
    let mut stats = order_stats(ct, sieve)?;
    let mut table = Vec::new();
    for q in 2..=ct.n() {
        if sieve.prime_power(q).is_some() {
            let d = divisor_count(ct, q);
            if d > 0 {
                table.push(PrimePowerCount { q, d, d_star: 1 });
            }
        }
    }
    stats.per_prime_power = Some(table);
    Ok(stats)
}

/// `D_k = Σ_m C_m 1{k | m}`.
pub fn divisor_count(ct: &CycleType, k: usize) -> usize {
    ct.counts().iter().filter(|&&(m, _)| m % k == 0).map(|&(_, c)| c).sum()
}

/// `D*_k = min(1, D_k)`.
pub fn divisor_indicator(ct: &CycleType, k: usize) -> usize {
    usize::from(ct.counts().iter().any(|&(m, _)| m % k == 0))
}

/// `log O` straight from `Σ_{q ≤ n} Λ(q) D*_q`, scanning every prime power.
pub fn log_order_lambda_sum(ct: &CycleType, sieve: &MangoldtSieve) -> Result<f64> {
    check_sieve(ct, sieve)?;
    Ok((2..=ct.n())
        .filter(|&q| sieve.lambda(q) > 0.0 && divisor_indicator(ct, q) == 1)
        .map(|q| sieve.lambda(q))
        .sum())
}

/// `O` rebuilt from the prime-power scan: `Π_p p^{#{j : D*_{p^j} = 1}}`.
pub fn order_from_lambda_sum(ct: &CycleType, sieve: &MangoldtSieve) -> Result<BigUint> {
    check_sieve(ct, sieve)?;
    let mut o = BigUint::one();
    for q in 2..=ct.n() {
        if let Some((p, _)) = sieve.prime_power(q) {
            if divisor_indicator(ct, q) == 1 {
                o *= BigUint::from(p);
            }
        }
    }
    Ok(o)
}

/// `lcm` of the cycle lengths in arbitrary precision.
pub fn order_lcm(ct: &CycleType) -> BigUint {
    ct.distinct_lengths().fold(BigUint::one(), |acc, m| acc.lcm(&BigUint::from(m)))
}

/// `log lcm{m ≤ cutoff : C_m > 0}`; `0` when no length is at most `cutoff`.
pub fn partial_order(ct: &CycleType, sieve: &MangoldtSieve, cutoff: usize) -> Result<f64> {
    Ok(partial_orders(ct, sieve, &[cutoff])?[0])
}

/// [`partial_order`] at several cutoffs in one pass; output follows the input order.
pub fn partial_orders(ct: &CycleType, sieve: &MangoldtSieve, cutoffs: &[usize]) -> Result<Vec<f64>> {
    check_sieve(ct, sieve)?;
    let mut order: Vec<usize> = (0..cutoffs.len()).collect();
    order.sort_by_key(|&i| cutoffs[i]);
    let mut out = vec![0.0; cutoffs.len()];
    let mut max_exp: Vec<(usize, u32)> = Vec::new();
    let mut log_o = 0.0;
    let mut lengths = ct.distinct_lengths().peekable();
    for i in order {
        while let Some(&m) = lengths.peek() {
            if m > cutoffs[i] {
                break;
            }
            for (p, e) in sieve.factorize(m) {
                match max_exp.iter_mut().find(|(q, _)| *q == p) {
                    Some(slot) if slot.1 < e => {
                        log_o += (e - slot.1) as f64 * (p as f64).ln();
                        slot.1 = e;
                    }
                    Some(_) => {}
                    None => {
                        log_o += e as f64 * (p as f64).ln();
                        max_exp.push((p, e));
                    }
                }
            }
            lengths.next();
        }
        out[i] = log_o;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::partition::Partitions;
    use crate::weights::ln_bigint;
    use num_bigint::BigInt;
    use proptest::prelude::*;

    fn ct(lengths: &[usize]) -> CycleType {
        CycleType::from_lengths(lengths).unwrap()
    }

    #[test]
    fn examples() {
        let s = MangoldtSieve::new(20);
        let a = order_stats(&ct(&[2, 3]), &s).unwrap();
        assert!((a.log_y - 6f64.ln()).abs() < 1e-14);
        assert!((a.log_o - 6f64.ln()).abs() < 1e-14);
        assert_eq!(a.delta, 0.0);
        let b = order_stats(&ct(&[2, 2]), &s).unwrap();
        assert!((b.log_y - 4f64.ln()).abs() < 1e-14);
        assert!((b.log_o - 2f64.ln()).abs() < 1e-14);
        assert!((b.delta - 2f64.ln()).abs() < 1e-14);
        let c = order_stats(&ct(&[4, 6]), &s).unwrap();
        assert!((c.log_o - (2.0 * 2f64.ln() + 3f64.ln())).abs() < 1e-14);
        assert_eq!(order_lcm(&ct(&[4, 6])), BigUint::from(12u32));
        assert!(order_stats(&ct(&[25]), &s).is_err());
    }

    #[test]
    fn diagnostics_table() {
        let s = MangoldtSieve::new(20);
        let st = order_stats_with_diagnostics(&ct(&[4, 6, 2]), &s).unwrap();
        let qs: Vec<_> = st.per_prime_power.unwrap().iter().map(|p| (p.q, p.d)).collect();
        assert_eq!(qs, vec![(2, 3), (3, 1), (4, 1)]);
    }

    #[test]
    fn partial_order_examples() {
        let s = MangoldtSieve::new(20);
        let c = ct(&[2, 3]);
        assert!((partial_order(&c, &s, 2).unwrap() - 2f64.ln()).abs() < 1e-14);
        assert_eq!(partial_order(&c, &s, 1).unwrap(), 0.0);
        assert_eq!(partial_order(&c, &s, 0).unwrap(), 0.0);
        let full = order_stats(&c, &s).unwrap().log_o;
        assert!((partial_order(&c, &s, 5).unwrap() - full).abs() < 1e-14);
        assert!((partial_order(&c, &s, 100).unwrap() - full).abs() < 1e-14);
        let v = partial_orders(&ct(&[1, 4, 6, 9]), &s, &[20, 0, 4, 6]).unwrap();
        assert_eq!(v[1], 0.0);
        assert!((v[2] - 4f64.ln()).abs() < 1e-14);
        assert!((v[3] - 12f64.ln()).abs() < 1e-14);
        assert!((v[0] - 36f64.ln()).abs() < 1e-14);
    }

    #[test]
    fn lambda_sum_matches_lcm_up_to_20() {
        let s = MangoldtSieve::new(20);
        for n in 1..=20 {
            for c in Partitions::new(n) {
                assert_eq!(order_from_lambda_sum(&c, &s).unwrap(), order_lcm(&c), "{c}");
                let fast = order_stats(&c, &s).unwrap();
                let slow = log_order_lambda_sum(&c, &s).unwrap();
                assert!((fast.log_o - slow).abs() < 1e-12);
                assert!((fast.log_o - ln_bigint(&BigInt::from(order_lcm(&c)))).abs() < 1e-12);
            }
        }
    }

    fn arb_cycle_type() -> impl Strategy<Value = CycleType> {
        prop::collection::vec(1usize..200, 1..30).prop_map(|v| CycleType::from_lengths(&v).unwrap())
    }

    proptest! {
        #[test]
        fn delta_nonnegative_and_consistent(c in arb_cycle_type()) {
            let s = MangoldtSieve::new(c.n());
            let st = order_stats(&c, &s).unwrap();
            prop_assert!(st.delta >= 0.0);
            prop_assert!(st.log_o <= st.log_y + 1e-9);
            prop_assert!((st.log_y - st.log_o - st.delta).abs() <= 1e-9 * st.log_y.max(1.0));
        }

        #[test]
        fn partial_order_monotone(c in arb_cycle_type(), mut cuts in prop::collection::vec(0usize..250, 1..10)) {
            let s = MangoldtSieve::new(c.n());
            cuts.sort_unstable();
            let v = partial_orders(&c, &s, &cuts).unwrap();
            for w in v.windows(2) {
                prop_assert!(w[0] <= w[1]);
            }
            for (cut, val) in cuts.iter().zip(&v) {
                prop_assert!((partial_order(&c, &s, *cut).unwrap() - val).abs() < 1e-12);
            }
        }

        #[test]
        fn distinct_prime_powers_have_zero_delta(mask in 0u32..(1 << 10)) {
            let pp = [1usize, 2, 3, 4, 5, 7, 8, 9, 11, 13];
            // prime powers with distinct primes
            let choices: Vec<usize> = pp.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, &q)| q).collect();
            let mut seen = Vec::new();
            let mut lengths = Vec::new();
            for q in choices {
                let p = MangoldtSieve::new(16).prime_power(q).map(|(p, _)| p).unwrap_or(1);
                if p == 1 || !seen.contains(&p) {
                    seen.push(p);
                    lengths.push(q);
                }
            }
            prop_assume!(!lengths.is_empty());
            let c = CycleType::from_lengths(&lengths).unwrap();
            let st = order_stats(&c, &MangoldtSieve::new(c.n())).unwrap();
            prop_assert_eq!(st.delta, 0.0);
        }
    }
}
