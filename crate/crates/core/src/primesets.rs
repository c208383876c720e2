//! Sets of primes and the arithmetic built on them: Σ-parts of integers, the
//! growth sequence `(q^(2aN) - 1)_Σ` and recovery of `q^(2a)` from it, orders
//! of general linear groups, and low-density prime sets defined by a
//! multiplicative-order condition.

use std::sync::OnceLock;

use num_bigint::BigUint;
use num_rational::Ratio;
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::numth;

/// Trial division limit used when a full factorization is needed.
pub const TRIAL_DIVISION_LIMIT: u64 = 1_000_000;
/// Number of trailing estimates that must agree in [`recover_m0_and_p`].
pub const STABLE_TAIL: usize = 3;
/// Search limit for the prime in [`construct_small_order`].
pub const PRIME_SEARCH_LIMIT: u64 = 100_000_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PrimeError {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("genus must be at least 1")]
    BadGenus,
    #[error("r must differ from the characteristic")]
    ROverlapsCharacteristic,
    #[error("epsilon must be a positive rational, got {0:?}")]
    BadEpsilon(String),
    #[error("n must be positive")]
    Zero,
    #[error("cannot factor the {digits}-digit cofactor within the trial-division budget")]
    FactorizationBudget { digits: usize },
    #[error("no qualifying prime below {0}")]
    NoQualifyingPrime(u64),
    #[error("estimates did not stabilize: {0:?}")]
    NonStabilizing(Vec<String>),
    #[error("recovered value {0} is not a prime power")]
    NotPrimePower(String),
    #[error("recovery needs a cofinite prime set")]
    RequiresCofinite,
    #[error("certificates apply only to order-defined prime sets")]
    NotOrderDefined,
    #[error("density bound must be at least 100, got {0}")]
    BoundTooSmall(u64),
    #[error("schedule must be strictly increasing and match the values")]
    BadSchedule,
    #[error("q must be a prime power at least 2, got {0}")]
    BadQ(u64),
    #[error("parameter too large: {0}")]
    TooLarge(&'static str),
}

/// A set Σ of primes.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PrimeSet {
    /// Exactly the listed primes.
    Finite { primes: Vec<u64> },
    /// Every prime except the listed ones.
    Cofinite { excluded: Vec<u64> },
    /// `{r, p}` together with every prime `l` with `l^k ≡ 1 (mod r)` for some
    /// `1 <= k <= 2g`.
    SmallOrder { r: u64, g: u32, p: u64 },
}

fn clean_primes(list: &[u64]) -> Result<Vec<u64>, PrimeError> {
    let mut v = list.to_vec();
    v.sort_unstable();
    v.dedup();
    if let Some(&bad) = v.iter().find(|&&x| !numth::is_prime(x)) {
        return Err(PrimeError::NotPrime(bad));
    }
    Ok(v)
}

impl PrimeSet {
    pub fn finite(primes: &[u64]) -> Result<PrimeSet, PrimeError> {
        Ok(PrimeSet::Finite { primes: clean_primes(primes)? })
    }

    pub fn cofinite(excluded: &[u64]) -> Result<PrimeSet, PrimeError> {
        Ok(PrimeSet::Cofinite { excluded: clean_primes(excluded)? })
    }

    pub fn all() -> PrimeSet {
        PrimeSet::Cofinite { excluded: Vec::new() }
    }

    pub fn small_order(r: u64, g: u32, p: u64) -> Result<PrimeSet, PrimeError> {
        for x in [r, p] {
            if !numth::is_prime(x) {
                return Err(PrimeError::NotPrime(x));
            }
        }
        if g == 0 {
            return Err(PrimeError::BadGenus);
        }
        if r == p {
            return Err(PrimeError::ROverlapsCharacteristic);
        }
        Ok(PrimeSet::SmallOrder { r, g, p })
    }

    /// Membership of a prime `l`.
    pub fn contains(&self, l: u64) -> bool {
        match self {
            PrimeSet::Finite { primes } => primes.binary_search(&l).is_ok(),
            PrimeSet::Cofinite { excluded } => excluded.binary_search(&l).is_err(),
            PrimeSet::SmallOrder { r, g, p } => {
                l == *r
                    || l == *p
                    || numth::order_mod_prime(l, *r).is_some_and(|o| o <= 2 * *g as u64)
            }
        }
    }
}

/// `n = n_sigma · n_sigma_prime` with the prime support of each part in Σ
/// and its complement respectively.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SigmaFactorization {
    pub n_sigma: BigUint,
    pub n_sigma_prime: BigUint,
}

fn small_primes() -> &'static [u64] {
    static PRIMES: OnceLock<Vec<u64>> = OnceLock::new();
    PRIMES.get_or_init(|| numth::primes_up_to(TRIAL_DIVISION_LIMIT))
}

/// Strips every factor `s` from `n`, returning the removed part.
fn strip(n: &mut BigUint, s: u64) -> BigUint {
    let mut removed = BigUint::one();
    let s_big = BigUint::from(s);
    loop {
        let (q, r) = (&*n / &s_big, &*n % &s_big);
        if !r.is_zero() {
            return removed;
        }
        *n = q;
        removed *= &s_big;
    }
}

/// Full factorization: trial division, then a primality test on a 64-bit
/// cofactor.
pub fn factor(n: &BigUint) -> Result<Vec<(BigUint, u32)>, PrimeError> {
    if n.is_zero() {
        return Err(PrimeError::Zero);
    }
    let mut rest = n.clone();
    let mut out = Vec::new();
    for &s in small_primes() {
        if rest.is_one() {
            break;
        }
        let removed = strip(&mut rest, s);
        if !removed.is_one() {
            let mut e = 0;
            let mut x = removed;
            let sb = BigUint::from(s);
            while !x.is_one() {
                x /= &sb;
                e += 1;
            }
            out.push((sb, e));
        }
    }
    if !rest.is_one() {
        let limit_sq = BigUint::from(TRIAL_DIVISION_LIMIT) * BigUint::from(TRIAL_DIVISION_LIMIT);
        let prime = rest < limit_sq || rest.to_u64().is_some_and(numth::is_prime);
        if !prime {
            return Err(PrimeError::FactorizationBudget { digits: rest.to_str_radix(10).len() });
        }
        out.push((rest, 1));
    }
    Ok(out)
}

/// Splits `n` into its Σ-part and Σ′-part.
pub fn sigma_part(n: &BigUint, sigma: &PrimeSet) -> Result<SigmaFactorization, PrimeError> {
    if n.is_zero() {
        return Err(PrimeError::Zero);
    }
    let mut rest = n.clone();
    match sigma {
        PrimeSet::Finite { primes } => {
            let mut part = BigUint::one();
            for &s in primes {
                part *= strip(&mut rest, s);
            }
            Ok(SigmaFactorization { n_sigma: part, n_sigma_prime: rest })
        }
        PrimeSet::Cofinite { excluded } => {
            let mut part = BigUint::one();
            for &s in excluded {
                part *= strip(&mut rest, s);
            }
            Ok(SigmaFactorization { n_sigma: rest, n_sigma_prime: part })
        }
        PrimeSet::SmallOrder { .. } => {
            let mut inside = BigUint::one();
            let mut outside = BigUint::one();
            for (s, e) in factor(n)? {
                let in_sigma = s.to_u64().is_some_and(|x| sigma.contains(x));
                let power = num_traits::pow(s, e as usize);
                if in_sigma {
                    inside *= power;
                } else {
                    outside *= power;
                }
            }
            Ok(SigmaFactorization { n_sigma: inside, n_sigma_prime: outside })
        }
    }
}

/// Values `w_N = (q^(2aN) - 1)_Σ` along a schedule of `N`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FrobGrowth {
    pub q: u64,
    pub a: u32,
    pub sigma: PrimeSet,
    pub schedule: Vec<u64>,
    pub values: Vec<BigUint>,
}

pub fn w_sequence(q: u64, a: u32, sigma: &PrimeSet, schedule: &[u64]) -> Result<FrobGrowth, PrimeError> {
    if q < 2 || numth::prime_power(q).is_none() {
        return Err(PrimeError::BadQ(q));
    }
    if a == 0 {
        return Err(PrimeError::Zero);
    }
    let mut values = Vec::with_capacity(schedule.len());
    for &n in schedule {
        let exp = (2 * a as u64).checked_mul(n).filter(|&e| e <= 1 << 20).ok_or(PrimeError::TooLarge("2aN"))?;
        let x = num_traits::pow(BigUint::from(q), exp as usize) - BigUint::one();
        values.push(sigma_part(&x, sigma)?.n_sigma);
    }
    Ok(FrobGrowth { q, a, sigma: sigma.clone(), schedule: schedule.to_vec(), values })
}

/// The schedule `N = l0^j` for `j = 1..=len`, with `l0` the least prime
/// outside the excluded list of a cofinite set (2 otherwise).
pub fn geometric_schedule(sigma: &PrimeSet, len: u32) -> Vec<u64> {
    let l0 = match sigma {
        PrimeSet::Cofinite { excluded } => {
            (2..).find(|&l| numth::is_prime(l) && !excluded.contains(&l)).unwrap()
        }
        _ => 2,
    };
    (1..=len).map(|j| l0.pow(j)).collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct M0Recovery {
    pub m0: u64,
    pub p: u64,
    /// `floor(w_{j+1} / w_j)^(1/(N_{j+1} - N_j))` for consecutive pairs.
    pub ratio_estimates: Vec<u64>,
    /// `ceil(w_j^(1/N_j))`, reported for comparison; converges much slower.
    pub root_estimates: Vec<String>,
}

/// Recovers `M0 = q^(2a)` and its prime from the growth values alone.
///
/// The Σ′-part of `q^(2aN) - 1` is bounded along a geometric schedule when Σ′
/// is finite, so consecutive ratios are `M0^(ΔN)` up to a bounded factor and
/// eventually exactly so; their integer `ΔN`-th roots stabilize at `M0`.
pub fn recover_m0_and_p(sigma: &PrimeSet, schedule: &[u64], values: &[BigUint]) -> Result<M0Recovery, PrimeError> {
    if !matches!(sigma, PrimeSet::Cofinite { .. }) {
        return Err(PrimeError::RequiresCofinite);
    }
    if schedule.len() != values.len() || schedule.windows(2).any(|w| w[0] >= w[1]) || values.iter().any(Zero::is_zero) {
        return Err(PrimeError::BadSchedule);
    }
    let mut ratio_estimates = Vec::new();
    for i in 0..schedule.len().saturating_sub(1) {
        let delta = u32::try_from(schedule[i + 1] - schedule[i]).map_err(|_| PrimeError::TooLarge("schedule gap"))?;
        let ratio = &values[i + 1] / &values[i];
        let root = if ratio.is_zero() { BigUint::zero() } else { ratio.nth_root(delta) };
        ratio_estimates.push(root.to_u64().ok_or(PrimeError::TooLarge("estimate"))?);
    }
    let root_estimates = schedule
        .iter()
        .zip(values)
        .map(|(&n, w)| {
            let n = n as u32;
            let r = w.nth_root(n);
            if num_traits::pow(r.clone(), n as usize) == *w { r } else { r + 1u32 }.to_string()
        })
        .collect();
    let tail = ratio_estimates.len().checked_sub(STABLE_TAIL).map(|s| &ratio_estimates[s..]);
    let m0 = match tail {
        Some(t) if t.iter().all(|&x| x == t[0]) && t[0] > 1 => t[0],
        _ => {
            return Err(PrimeError::NonStabilizing(ratio_estimates.iter().map(u64::to_string).collect()));
        }
    };
    let (p, _) = numth::prime_power(m0).ok_or_else(|| PrimeError::NotPrimePower(m0.to_string()))?;
    Ok(M0Recovery { m0, p, ratio_estimates, root_estimates })
}

/// `|GL_n(F_l)| = (l^n - 1)(l^(n-1) - 1)...(l - 1) · l^(n(n-1)/2)`.
pub fn gl_order(n: u32, l: u64) -> Result<BigUint, PrimeError> {
    if n == 0 {
        return Err(PrimeError::Zero);
    }
    if !numth::is_prime(l) {
        return Err(PrimeError::NotPrime(l));
    }
    if n > 512 {
        return Err(PrimeError::TooLarge("n"));
    }
    let lb = BigUint::from(l);
    let mut acc = num_traits::pow(lb.clone(), (n as usize) * (n as usize - 1) / 2);
    for i in 1..=n as usize {
        acc *= num_traits::pow(lb.clone(), i) - BigUint::one();
    }
    Ok(acc)
}

/// `|GL_n(F_l)| mod m`.
pub fn gl_order_mod(n: u32, l: u64, m: u64) -> u64 {
    let mut acc = numth::pow_mod(l, n as u64 * (n as u64 - 1) / 2, m);
    for i in 1..=n as u64 {
        acc = numth::mul_mod(acc, (numth::pow_mod(l, i, m) + m - 1) % m, m);
    }
    acc
}

/// Parses `"0.3"`, `"3/10"` or `"2"` as an exact positive rational.
pub fn parse_rational(s: &str) -> Result<Ratio<u64>, PrimeError> {
    let bad = || PrimeError::BadEpsilon(s.to_string());
    let t = s.trim();
    let r = if let Some((a, b)) = t.split_once('/') {
        let (a, b): (u64, u64) = (a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?);
        if b == 0 {
            return Err(bad());
        }
        Ratio::new(a, b)
    } else if let Some((int, frac)) = t.split_once('.') {
        if frac.is_empty() || frac.len() > 18 || !frac.bytes().all(|c| c.is_ascii_digit()) {
            return Err(bad());
        }
        let den = 10u64.pow(frac.len() as u32);
        let int: u64 = if int.is_empty() { 0 } else { int.parse().map_err(|_| bad())? };
        let frac: u64 = frac.parse().map_err(|_| bad())?;
        let num = int.checked_mul(den).and_then(|x| x.checked_add(frac)).ok_or_else(bad)?;
        Ratio::new(num, den)
    } else {
        Ratio::from_integer(t.parse().map_err(|_| bad())?)
    };
    if r.numer().is_zero() {
        return Err(bad());
    }
    Ok(r)
}

/// Evidence that `r` divides no `|GL_2g(F_l)|` for `l` outside Σ up to a bound.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certificate {
    pub bound: u64,
    /// Primes `l <= bound` outside Σ that were checked.
    pub checked: u64,
    /// Primes outside Σ where `r` does divide the order (should be empty).
    pub violations: Vec<u64>,
}

impl Certificate {
    pub fn holds(&self) -> bool {
        self.violations.is_empty()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SmallOrderConstruction {
    pub set: PrimeSet,
    pub r: u64,
    /// `g(2g+1)/(r-1)`, an upper bound for the natural density of the set.
    pub density_bound: Ratio<u64>,
    pub certificate: Certificate,
}

/// Chooses the least prime `r != p` with `g(2g+1)/ε < r - 1` and builds the
/// corresponding prime set, certified up to `cert_bound`.
pub fn construct_small_order(g: u32, p: u64, eps: Ratio<u64>, cert_bound: u64) -> Result<SmallOrderConstruction, PrimeError> {
    if g == 0 {
        return Err(PrimeError::BadGenus);
    }
    if !numth::is_prime(p) {
        return Err(PrimeError::NotPrime(p));
    }
    if eps.numer().is_zero() {
        return Err(PrimeError::BadEpsilon(eps.to_string()));
    }
    let lhs = (g as u128) * (2 * g as u128 + 1) * (*eps.denom() as u128);
    let r = (2..PRIME_SEARCH_LIMIT)
        .find(|&r| r != p && numth::is_prime(r) && lhs < (*eps.numer() as u128) * (r as u128 - 1))
        .ok_or(PrimeError::NoQualifyingPrime(PRIME_SEARCH_LIMIT))?;
    let set = PrimeSet::small_order(r, g, p)?;
    let certificate = certify(&set, cert_bound)?;
    Ok(SmallOrderConstruction {
        set,
        r,
        density_bound: Ratio::new(g as u64 * (2 * g as u64 + 1), r - 1),
        certificate,
    })
}

/// Checks `r ∤ |GL_2g(F_l)|` for every prime `l <= bound` outside the set.
pub fn certify(set: &PrimeSet, bound: u64) -> Result<Certificate, PrimeError> {
    let PrimeSet::SmallOrder { r, g, .. } = *set else {
        return Err(PrimeError::NotOrderDefined);
    };
    let outside: Vec<u64> = numth::primes_up_to(bound).into_iter().filter(|&l| !set.contains(l)).collect();
    let violations = outside.par_iter().copied().filter(|&l| gl_order_mod(2 * g, l, r) == 0).collect();
    Ok(Certificate { bound, checked: outside.len() as u64, violations })
}

/// `#{l <= bound prime : l ∈ Σ} / #{l <= bound prime}`.
pub fn natural_density_estimate(sigma: &PrimeSet, bound: u64) -> Result<Ratio<u64>, PrimeError> {
    if bound < 100 {
        return Err(PrimeError::BoundTooSmall(bound));
    }
    let primes = numth::primes_up_to(bound);
    let inside = primes.par_iter().filter(|&&l| sigma.contains(l)).count();
    Ok(Ratio::new(inside as u64, primes.len() as u64))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn big(x: u64) -> BigUint {
        BigUint::from(x)
    }

    #[test]
    fn sigma_part_examples() {
        let two = PrimeSet::finite(&[2]).unwrap();
        assert_eq!(sigma_part(&big(12), &two).unwrap(), SigmaFactorization { n_sigma: big(4), n_sigma_prime: big(3) });
        let s = sigma_part(&big(1), &PrimeSet::all()).unwrap();
        assert_eq!((s.n_sigma, s.n_sigma_prime), (big(1), big(1)));
        let no3 = PrimeSet::cofinite(&[3]).unwrap();
        assert_eq!(
            sigma_part(&big(16 * 3 * 7), &no3).unwrap(),
            SigmaFactorization { n_sigma: big(112), n_sigma_prime: big(3) }
        );
        assert!(PrimeSet::finite(&[4]).is_err());
    }

    #[test]
    fn w_sequence_examples() {
        let no3 = PrimeSet::cofinite(&[3]).unwrap();
        let w = w_sequence(2, 1, &no3, &[1, 2]).unwrap();
        assert_eq!(w.values, vec![big(1), big(5)]);
        assert_eq!(w_sequence(2, 1, &PrimeSet::all(), &[2]).unwrap().values, vec![big(15)]);
        assert_eq!(w_sequence(6, 1, &no3, &[1]), Err(PrimeError::BadQ(6)));
    }

    #[test]
    fn recovery_examples() {
        let no3 = PrimeSet::cofinite(&[3]).unwrap();
        let sched: Vec<u64> = (1..=8).map(|j| 2u64.pow(j)).collect();
        let w = w_sequence(2, 1, &no3, &sched).unwrap();
        let r = recover_m0_and_p(&no3, &w.schedule, &w.values).unwrap();
        assert_eq!((r.m0, r.p), (4, 2));

        let no2 = PrimeSet::cofinite(&[2]).unwrap();
        let sched: Vec<u64> = (1..=5).map(|j| 5u64.pow(j)).collect();
        let w = w_sequence(3, 2, &no2, &sched).unwrap();
        let r = recover_m0_and_p(&no2, &w.schedule, &w.values).unwrap();
        assert_eq!((r.m0, r.p), (81, 3));

        let ones = vec![big(1); 6];
        assert!(matches!(
            recover_m0_and_p(&no3, &[1, 2, 4, 8, 16, 32], &ones),
            Err(PrimeError::NonStabilizing(_))
        ));
        assert_eq!(recover_m0_and_p(&PrimeSet::finite(&[2]).unwrap(), &[1], &ones[..1]), Err(PrimeError::RequiresCofinite));
    }

    #[test]
    fn gl_orders() {
        assert_eq!(gl_order(2, 2).unwrap(), big(6));
        assert_eq!(gl_order(2, 3).unwrap(), big(48));
        assert_eq!(gl_order(1, 5).unwrap(), big(4));
        for (n, l) in [(2, 5), (4, 7), (3, 2)] {
            let m = 13;
            assert_eq!(gl_order_mod(n, l, m), (gl_order(n, l).unwrap() % big(m)).to_u64().unwrap());
        }
    }

    #[test]
    fn rational_parsing() {
        assert_eq!(parse_rational("0.3").unwrap(), Ratio::new(3, 10));
        assert_eq!(parse_rational("3/10").unwrap(), Ratio::new(3, 10));
        assert_eq!(parse_rational("2").unwrap(), Ratio::from_integer(2));
        assert_eq!(parse_rational(".05").unwrap(), Ratio::new(1, 20));
        for bad in ["0", "x", "1/0", "0.", "-1"] {
            assert!(parse_rational(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn small_order_examples() {
        let c = construct_small_order(1, 2, Ratio::new(3, 10), 10_000).unwrap();
        assert_eq!(c.r, 13);
        assert_eq!(c.density_bound, Ratio::new(1, 4));
        assert!(c.certificate.holds());
        assert!(c.certificate.checked > 0);
        assert_eq!(construct_small_order(2, 2, Ratio::new(1, 20), 100).unwrap().r, 211);
    }

    #[test]
    fn density_examples() {
        assert_eq!(natural_density_estimate(&PrimeSet::all(), 1000).unwrap(), Ratio::from_integer(1));
        assert_eq!(natural_density_estimate(&PrimeSet::finite(&[2, 3]).unwrap(), 10_000).unwrap(), Ratio::new(2, 1229));
        assert!(natural_density_estimate(&PrimeSet::all(), 99).is_err());
    }
}
