//! Prime generation, factorization, the character mod 4, primorials, and the
//! shared numeric constants (Euler's gamma, the Meissel-Mertens constant, and
//! the derived threshold constant kappa).

use std::sync::OnceLock;

use num::bigint::BigUint;

use crate::error::{Error, Result};

/// Hard cap for `primes_up_to`.
pub const PRIMES_LIMIT_CAP: u64 = 1_000_000_000;
/// Hard cap on the upper end of an SPF segment.
pub const SPF_HI_CAP: u64 = 1_000_000_000_000;
/// Maximum width of one SPF segment (entries).
pub const SPF_SEGMENT_CAP: u64 = 1 << 20;
/// Cap on the primorial index.
pub const PRIMORIAL_S_CAP: u64 = 100_000;

/// Euler-Mascheroni constant, 50-digit reference literal (rounded to f64).
pub const GAMMA: f64 = 0.57721566490153286060651209008240243104215933593992;
/// Meissel-Mertens constant b0, 50-digit reference literal (rounded to f64).
pub const MEISSEL_MERTENS: f64 = 0.26149721284764278375542683860869585905156664826120;

/// Shared numeric constants. `kappa` defaults to `e^(1 + b0)`; the threshold
/// lemma leaves it symbolic, so it stays overridable.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Constants {
    pub gamma: f64,
    pub meissel_mertens: f64,
    pub kappa: f64,
}

impl Default for Constants {
    fn default() -> Self {
        Constants {
            gamma: GAMMA,
            meissel_mertens: MEISSEL_MERTENS,
            kappa: (1.0 + MEISSEL_MERTENS).exp(),
        }
    }
}

impl Constants {
    pub fn with_kappa(kappa: f64) -> Self {
        Constants {
            kappa,
            ..Constants::default()
        }
    }
}

/// Non-principal Dirichlet character mod 4: +1 on 1 mod 4, -1 on 3 mod 4,
/// 0 on even n. Completely multiplicative.
#[inline]
pub fn chi1(n: u64) -> i32 {
    match n % 4 {
        1 => 1,
        3 => -1,
        _ => 0,
    }
}

/// Plain sieve of Eratosthenes; intended for small limits (base primes,
/// trial-division tables). Panics are avoided by capping at u32 range.
fn simple_sieve(limit: u64) -> Vec<u64> {
    if limit < 2 {
        return Vec::new();
    }
    let limit = limit as usize;
    let mut composite = vec![false; limit + 1];
    let mut primes = Vec::new();
    for n in 2..=limit {
        if !composite[n] {
            primes.push(n as u64);
            let mut m = n * n;
            while m <= limit {
                composite[m] = true;
                m += n;
            }
        }
    }
    primes
}

fn trial_primes() -> &'static [u64] {
    static TABLE: OnceLock<Vec<u64>> = OnceLock::new();
    TABLE.get_or_init(|| simple_sieve(1_000_000))
}

/// Segment width used by the streaming prime sieve (numbers, not odds).
pub(crate) const PRIME_SEGMENT_SPAN: u64 = 1 << 22;

/// Fixed segment boundaries `[lo, hi)` covering `[2, limit]`; shared by the
/// sequential stream and the parallel Euler-product loops so chunking is
/// identical regardless of worker count.
pub(crate) fn prime_segment_bounds(limit: u64) -> Vec<(u64, u64)> {
    let mut bounds = Vec::new();
    let mut lo = 2u64;
    while lo <= limit {
        let hi = lo.saturating_add(PRIME_SEGMENT_SPAN).min(limit + 1);
        bounds.push((lo, hi));
        lo = hi;
    }
    bounds
}

/// Base primes needed to sieve any segment below `hi`.
pub(crate) fn base_primes(hi: u64) -> Vec<u64> {
    simple_sieve(hi.isqrt() + 1)
}

/// Collect the primes in `[lo, hi)` given base primes up to `sqrt(hi)`.
/// Odd-only bitmap; 2 is handled explicitly.
pub(crate) fn primes_in_segment(lo: u64, hi: u64, base: &[u64], out: &mut Vec<u64>) {
    out.clear();
    if hi <= lo {
        return;
    }
    if lo <= 2 && 2 < hi {
        out.push(2);
    }
    let lo_odd = (lo | 1).max(3);
    if lo_odd >= hi {
        return;
    }
    let n_odds = ((hi - lo_odd) as usize).div_ceil(2);
    let mut bits = vec![u64::MAX; n_odds.div_ceil(64)];
    for &p in base.iter().skip(1) {
        if p.saturating_mul(p) >= hi {
            break;
        }
        let mut start = (lo_odd.div_ceil(p)) * p;
        if start < p * p {
            start = p * p;
        }
        if start % 2 == 0 {
            start += p;
        }
        let mut m = start;
        while m < hi {
            let idx = ((m - lo_odd) / 2) as usize;
            bits[idx / 64] &= !(1u64 << (idx % 64));
            m += 2 * p;
        }
    }
    for idx in 0..n_odds {
        if bits[idx / 64] & (1u64 << (idx % 64)) != 0 {
            out.push(lo_odd + 2 * idx as u64);
        }
    }
}

/// Stream every prime `p <= limit` in ascending order.
pub fn for_primes_up_to<F: FnMut(u64)>(limit: u64, mut f: F) -> Result<()> {
    if limit > PRIMES_LIMIT_CAP {
        return Err(Error::capacity(format!(
            "prime limit {limit} exceeds cap {PRIMES_LIMIT_CAP}"
        )));
    }
    if limit < 2 {
        return Ok(());
    }
    let base = base_primes(limit);
    let mut seg = Vec::new();
    for (lo, hi) in prime_segment_bounds(limit) {
        primes_in_segment(lo, hi, &base, &mut seg);
        for &p in &seg {
            f(p);
        }
    }
    Ok(())
}

/// All primes `p <= limit`, ascending.
pub fn primes_up_to(limit: u64) -> Result<Vec<u64>> {
    let mut primes = Vec::new();
    if limit >= 2 {
        // over-reserve slightly: pi(x) < 1.26 x / ln x for x >= 17
        let cap = if limit >= 17 {
            (1.26 * limit as f64 / (limit as f64).ln()) as usize
        } else {
            8
        };
        primes.reserve(cap);
    }
    for_primes_up_to(limit, |p| primes.push(p))?;
    Ok(primes)
}

/// Smallest-prime-factor table for every n in the inclusive range `[lo, hi]`.
/// Entry `i` is `spf(lo + i)`; entries that survive all base primes are prime
/// themselves.
pub fn spf_sieve_segment(lo: u64, hi: u64) -> Result<Vec<u64>> {
    if lo > hi {
        return Err(Error::argument(format!("inverted range [{lo}, {hi}]")));
    }
    if lo < 2 {
        return Err(Error::argument("spf segment must start at 2 or above"));
    }
    if hi > SPF_HI_CAP {
        return Err(Error::capacity(format!("hi {hi} exceeds cap {SPF_HI_CAP}")));
    }
    let span = hi - lo + 1;
    if span > SPF_SEGMENT_CAP {
        return Err(Error::capacity(format!(
            "segment width {span} exceeds cap {SPF_SEGMENT_CAP}"
        )));
    }
    let mut spf = vec![0u64; span as usize];
    let root = hi.isqrt();
    let base: Vec<u64> = if root <= 1_000_000 {
        trial_primes()
            .iter()
            .copied()
            .take_while(|&p| p <= root)
            .collect()
    } else {
        simple_sieve(root)
    };
    // ascending primes: the first prime to claim a slot is the smallest factor
    for &p in &base {
        let mut m = lo.div_ceil(p) * p;
        while m <= hi {
            let slot = &mut spf[(m - lo) as usize];
            if *slot == 0 {
                *slot = p;
            }
            m += p;
        }
    }
    for (i, slot) in spf.iter_mut().enumerate() {
        if *slot == 0 {
            *slot = lo + i as u64;
        }
    }
    Ok(spf)
}

#[inline]
pub(crate) fn mulmod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub(crate) fn powmod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut acc = 1u64;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mulmod(acc, base, m);
        }
        base = mulmod(base, base, m);
        exp >>= 1;
    }
    acc
}

pub(crate) fn gcd_u64(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = b;
        b = a % b;
        a = t;
    }
    a
}

/// Deterministic Miller-Rabin, valid for all n < 2^64.
/// Base set due to Sinclair (see the usual 7-base certificate).
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for &p in &[2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n == p {
            return true;
        }
        if n.is_multiple_of(p) {
            return false;
        }
    }
    let d = n - 1;
    let s = d.trailing_zeros();
    let d = d >> s;
    'witness: for &a in &[2u64, 325, 9375, 28178, 450775, 9780504, 1795265022] {
        let a = a % n;
        if a == 0 {
            continue;
        }
        let mut x = powmod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mulmod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Pollard rho with Brent cycling; returns a non-trivial factor of an odd
/// composite n with no prime factor below the trial-division bound.
fn pollard_brent(n: u64, c: u64) -> Option<u64> {
    let f = |x: u64| {
        let v = mulmod(x, x, n) + c;
        if v >= n {
            v - n
        } else {
            v
        }
    };
    let mut y = 2u64;
    let mut r = 1u64;
    let mut q = 1u64;
    let mut g = 1u64;
    let mut x = 0u64;
    let mut ys = 0u64;
    while g == 1 {
        x = y;
        for _ in 0..r {
            y = f(y);
        }
        let mut k = 0;
        while k < r && g == 1 {
            ys = y;
            let lim = 128.min(r - k);
            for _ in 0..lim {
                y = f(y);
                q = mulmod(q, x.abs_diff(y), n);
            }
            g = gcd_u64(q, n);
            k += 128;
        }
        r <<= 1;
        if r > 1 << 26 {
            return None;
        }
    }
    if g == n {
        // backtrack one step at a time
        loop {
            ys = f(ys);
            g = gcd_u64(x.abs_diff(ys), n);
            if g > 1 {
                break;
            }
        }
    }
    if g == n {
        None
    } else {
        Some(g)
    }
}

/// Ordered prime factorization: strictly increasing primes, exponents >= 1,
/// empty exactly for n = 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Factorization {
    pub factors: Vec<(u64, u32)>,
}

impl Factorization {
    /// Reassemble the factored integer.
    pub fn value(&self) -> BigUint {
        let mut v = BigUint::from(1u32);
        for &(p, e) in &self.factors {
            v *= BigUint::from(p).pow(e);
        }
        v
    }

    pub fn least_prime_factor(&self) -> Option<u64> {
        self.factors.first().map(|&(p, _)| p)
    }
}

/// Factor n < 2^63: trial division by sieved primes up to 10^6, then
/// deterministic Miller-Rabin plus Pollard-rho/Brent on what remains.
pub fn factorize(n: u64) -> Result<Factorization> {
    if n == 0 {
        return Err(Error::argument("cannot factor 0"));
    }
    if n >= 1 << 63 {
        return Err(Error::capacity("factorization supports n < 2^63"));
    }
    let mut rem = n;
    let mut factors: Vec<(u64, u32)> = Vec::new();
    for &p in trial_primes() {
        if p * p > rem {
            break;
        }
        if rem.is_multiple_of(p) {
            let mut e = 0u32;
            while rem.is_multiple_of(p) {
                rem /= p;
                e += 1;
            }
            factors.push((p, e));
        }
    }
    if rem > 1 {
        if rem <= 1_000_000_000_000 || is_prime(rem) {
            // trial division covered sqrt(rem) for rem <= 10^12
            factors.push((rem, 1));
        } else {
            let mut stack = vec![rem];
            let mut found: Vec<u64> = Vec::new();
            while let Some(m) = stack.pop() {
                if is_prime(m) {
                    found.push(m);
                    continue;
                }
                let mut d = None;
                for c in 1..64 {
                    if let Some(f) = pollard_brent(m, c) {
                        d = Some(f);
                        break;
                    }
                }
                let d = d.ok_or_else(|| {
                    Error::capacity(format!("pollard rho failed to split {m}"))
                })?;
                stack.push(d);
                stack.push(m / d);
            }
            found.sort_unstable();
            let mut i = 0;
            while i < found.len() {
                let p = found[i];
                let mut e = 0u32;
                while i < found.len() && found[i] == p {
                    e += 1;
                    i += 1;
                }
                factors.push((p, e));
            }
        }
    }
    factors.sort_unstable_by_key(|&(p, _)| p);
    Ok(Factorization { factors })
}

/// Product of the first s primes (1 for s = 0), via a balanced product tree.
pub fn primorial(s: u64) -> Result<BigUint> {
    if s > PRIMORIAL_S_CAP {
        return Err(Error::capacity(format!(
            "primorial index {s} exceeds cap {PRIMORIAL_S_CAP}"
        )));
    }
    if s == 0 {
        return Ok(BigUint::from(1u32));
    }
    let sf = s as f64;
    let bound = if s < 6 {
        16
    } else {
        (sf * (sf.ln() + sf.ln().ln()) * 1.2) as u64 + 16
    };
    let primes = simple_sieve(bound);
    debug_assert!(primes.len() >= s as usize, "prime bound too small");
    let leaves: Vec<BigUint> = primes[..s as usize]
        .iter()
        .map(|&p| BigUint::from(p))
        .collect();
    Ok(product_tree(&leaves))
}

fn product_tree(leaves: &[BigUint]) -> BigUint {
    match leaves.len() {
        0 => BigUint::from(1u32),
        1 => leaves[0].clone(),
        n => {
            let (a, b) = leaves.split_at(n / 2);
            product_tree(a) * product_tree(b)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn primes_small() {
        assert_eq!(primes_up_to(10).unwrap(), vec![2, 3, 5, 7]);
        assert_eq!(primes_up_to(1).unwrap(), Vec::<u64>::new());
        assert_eq!(primes_up_to(2).unwrap(), vec![2]);
        assert_eq!(primes_up_to(0).unwrap(), Vec::<u64>::new());
    }

    #[test]
    fn primes_counts() {
        assert_eq!(primes_up_to(100).unwrap().len(), 25);
        assert_eq!(primes_up_to(10_000).unwrap().len(), 1229);
        assert_eq!(primes_up_to(1_000_000).unwrap().len(), 78498);
    }

    #[test]
    fn primes_cap() {
        assert!(matches!(
            primes_up_to(PRIMES_LIMIT_CAP + 1),
            Err(Error::Capacity(_))
        ));
    }

    #[test]
    fn primes_cross_segment() {
        // force several segments and compare against a simple sieve
        let limit = PRIME_SEGMENT_SPAN * 2 + 1234;
        let fast = primes_up_to(limit).unwrap();
        let slow = simple_sieve(limit);
        assert_eq!(fast, slow);
    }

    #[test]
    fn spf_examples() {
        let t = spf_sieve_segment(2, 10).unwrap();
        assert_eq!(t[2], 2); // spf(4)
        assert_eq!(t[7], 3); // spf(9)
        assert_eq!(t[5], 7); // spf(7)
        assert_eq!(spf_sieve_segment(91, 91).unwrap(), vec![7]);
        assert_eq!(spf_sieve_segment(1_000_000, 1_000_000).unwrap(), vec![2]);
    }

    #[test]
    fn spf_errors() {
        assert!(matches!(spf_sieve_segment(10, 5), Err(Error::Argument(_))));
        assert!(matches!(
            spf_sieve_segment(2, 2 + SPF_SEGMENT_CAP),
            Err(Error::Capacity(_))
        ));
    }

    #[test]
    fn spf_high_segment() {
        // 10^12-ish segment: entries are either correctly marked or prime
        let lo = 999_999_999_000u64;
        let t = spf_sieve_segment(lo, lo + 100).unwrap();
        for (i, &p) in t.iter().enumerate() {
            let n = lo + i as u64;
            assert_eq!(n % p, 0);
            assert!(is_prime(p));
            // no smaller prime divides n
            let f = factorize(n).unwrap();
            assert_eq!(f.least_prime_factor().unwrap(), p);
        }
    }

    #[test]
    fn factorize_examples() {
        assert_eq!(
            factorize(360).unwrap().factors,
            vec![(2, 3), (3, 2), (5, 1)]
        );
        assert!(factorize(1).unwrap().factors.is_empty());
        assert_eq!(
            factorize(10403).unwrap().factors,
            vec![(101, 1), (103, 1)]
        );
        assert!(matches!(factorize(0), Err(Error::Argument(_))));
    }

    #[test]
    fn factorize_large_semiprime() {
        // two 30-bit primes, far beyond the trial bound
        let p = 1_073_741_789u64;
        let q = 1_073_741_827u64;
        let f = factorize(p * q).unwrap();
        assert_eq!(f.factors, vec![(p, 1), (q, 1)]);
    }

    #[test]
    fn factorize_matches_trial_division_oracle() {
        // independent oracle: naive trial division
        fn naive(mut n: u64) -> Vec<(u64, u32)> {
            let mut out = Vec::new();
            let mut d = 2;
            while d * d <= n {
                if n.is_multiple_of(d) {
                    let mut e = 0;
                    while n.is_multiple_of(d) {
                        n /= d;
                        e += 1;
                    }
                    out.push((d, e));
                }
                d += 1;
            }
            if n > 1 {
                out.push((n, 1));
            }
            out
        }
        for n in 1..2000u64 {
            assert_eq!(factorize(n).unwrap().factors, naive(n), "n={n}");
        }
    }

    #[test]
    fn chi1_values() {
        assert_eq!(chi1(5), 1);
        assert_eq!(chi1(7), -1);
        assert_eq!(chi1(6), 0);
        assert_eq!(chi1(1), 1);
        assert_eq!(chi1(2), 0);
    }

    #[test]
    fn primorial_examples() {
        assert_eq!(primorial(0).unwrap(), BigUint::from(1u32));
        assert_eq!(primorial(4).unwrap(), BigUint::from(210u32));
        assert_eq!(primorial(6).unwrap(), BigUint::from(30030u32));
        assert!(matches!(
            primorial(PRIMORIAL_S_CAP + 1),
            Err(Error::Capacity(_))
        ));
    }

    #[test]
    fn primorial_ratio_is_next_prime() {
        let primes = primes_up_to(200).unwrap();
        for s in 0..20u64 {
            let a = primorial(s).unwrap();
            let b = primorial(s + 1).unwrap();
            assert_eq!(&b / &a, BigUint::from(primes[s as usize]));
        }
    }

    #[test]
    fn constants_invariants() {
        let c = Constants::default();
        assert!(c.gamma > 0.5772156649 && c.gamma < 0.5772156650);
        assert!((c.kappa - (1.0 + c.meissel_mertens).exp()).abs() < 1e-15);
        let o = Constants::with_kappa(2.5);
        assert_eq!(o.kappa, 2.5);
        assert_eq!(o.gamma, c.gamma);
    }

    #[test]
    fn miller_rabin_agrees_with_sieve() {
        let primes = simple_sieve(20_000);
        let mut idx = 0;
        for n in 0..20_000u64 {
            let in_sieve = idx < primes.len() && primes[idx] == n;
            if in_sieve {
                idx += 1;
            }
            assert_eq!(is_prime(n), in_sieve, "n={n}");
        }
    }

    proptest! {
        #[test]
        fn factorization_reconstructs(n in 1u64..1_000_000_000) {
            let f = factorize(n).unwrap();
            prop_assert_eq!(f.value(), BigUint::from(n));
            // primes strictly increasing, exponents >= 1
            for w in f.factors.windows(2) {
                prop_assert!(w[0].0 < w[1].0);
            }
            for &(p, e) in &f.factors {
                prop_assert!(e >= 1);
                prop_assert!(is_prime(p));
            }
            prop_assert_eq!(f.factors.is_empty(), n == 1);
        }

        #[test]
        fn chi1_completely_multiplicative(m in 0u64..100_000, n in 0u64..100_000) {
            prop_assert_eq!(chi1(m * n), chi1(m) * chi1(n));
        }

        #[test]
        fn spf_agrees_with_factorize(lo in 2u64..10_000_000, width in 0u64..64) {
            let hi = lo + width;
            let t = spf_sieve_segment(lo, hi).unwrap();
            for (i, &p) in t.iter().enumerate() {
                let n = lo + i as u64;
                prop_assert_eq!(p, factorize(n).unwrap().least_prime_factor().unwrap());
            }
        }
    }
}
