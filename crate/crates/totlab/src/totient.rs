//! Exact evaluation of the generalized totient Phi_k(n): the number of
//! k-tuples over Z/nZ whose sum of squares is coprime to n.
//!
//! Phi_k is multiplicative with the explicit prime-power formula
//!
//! ```text
//! Phi_k(n) = n^{k-1} phi(n)                                   (k odd)
//! Phi_k(n) = n^{k-1} phi(n) prod_{p|n, p>2} alpha_k(p)        (k even)
//! alpha_k(p) = 1 - (-1)^{k(p-1)/4} / p^{k/2}
//! ```
//!
//! alongside a definition-level brute-force counter that serves as the
//! independent oracle, the companions phi(n) and J_k(n), and a streaming
//! bulk evaluator for n = 1..x.

use num::bigint::BigUint;
use num::rational::BigRational;
use num::One;

use crate::arith::{factorize, gcd_u64};
use crate::error::{Error, Result};
use crate::rational::check_beta_denom;
use crate::scan;

/// Cap on x for `phi_k_range`.
pub const RANGE_CAP: u64 = 100_000_000;
/// Cap on n^k tuple evaluations in `phi_k_brute`.
pub const BRUTE_COST_CAP: u128 = 100_000_000;

/// The (k, beta) parameter pair with the derived shift delta = beta - (k-1),
/// all exact. delta's sign and size select which asymptotic regime governs
/// the counting function.
#[derive(Debug, Clone, PartialEq)]
pub struct TotientParams {
    pub k: u32,
    pub beta: BigRational,
    pub delta: BigRational,
}

impl TotientParams {
    pub fn new(k: u32, beta: BigRational) -> Result<Self> {
        if k == 0 {
            return Err(Error::argument("k must be >= 1"));
        }
        check_beta_denom(&beta)?;
        let delta = &beta - BigRational::from_integer((k as i64 - 1).into());
        Ok(TotientParams { k, beta, delta })
    }

    pub fn delta_f64(&self) -> f64 {
        crate::rational::rational_to_f64(&self.delta)
    }

    pub fn beta_f64(&self) -> f64 {
        crate::rational::rational_to_f64(&self.beta)
    }
}

/// Sign of the alpha_k exponent: the value of (-1)^{k(p-1)/4} for odd p and
/// even k.
#[inline]
pub(crate) fn alpha_sign(p: u64, k: u32) -> i64 {
    debug_assert!(k.is_multiple_of(2) && p % 2 == 1);
    let half_k = (k / 2) as u64;
    if (half_k * ((p - 1) / 2)).is_multiple_of(2) {
        1
    } else {
        -1
    }
}

/// ln alpha_k(p) in double precision; 0 at p = 2 (alpha is 1 there) and for
/// odd k (no alpha factor).
#[inline]
pub(crate) fn ln_alpha(p: u64, k: u32) -> f64 {
    if k % 2 == 1 || p == 2 {
        return 0.0;
    }
    let pk2 = (p as f64).powi((k / 2) as i32);
    (-(alpha_sign(p, k) as f64) / pk2).ln_1p()
}

/// alpha_k(p) as f64 (1 at p = 2).
#[inline]
pub(crate) fn alpha_f64(p: u64, k: u32) -> f64 {
    if k % 2 == 1 || p == 2 {
        return 1.0;
    }
    let pk2 = (p as f64).powi((k / 2) as i32);
    1.0 - alpha_sign(p, k) as f64 / pk2
}

/// The local correction alpha_k(p) = 1 - (-1)^{k(p-1)/4} / p^{k/2} as an exact
/// rational. Defined at the prime only; prime powers reuse the prime value.
/// Returns 1 at p = 2. k must be even (alpha only enters even-k formulas).
pub fn alpha_k(p: u64, k: u32) -> Result<BigRational> {
    if k == 0 || k % 2 == 1 {
        return Err(Error::argument("alpha_k requires even k >= 2"));
    }
    if p == 2 {
        return Ok(BigRational::one());
    }
    if p.is_multiple_of(2) {
        return Err(Error::argument("alpha_k requires p = 2 or an odd prime"));
    }
    let pk2 = num::BigInt::from(p).pow(k / 2);
    let numer = &pk2 - num::BigInt::from(alpha_sign(p, k));
    Ok(BigRational::new(numer, pk2))
}

/// Phi_k(n), exactly, via the explicit multiplicative formula.
pub fn phi_k(n: u64, k: u32) -> Result<BigUint> {
    if k == 0 {
        return Err(Error::argument("k must be >= 1"));
    }
    if n == 0 {
        return Err(Error::argument("n must be >= 1"));
    }
    let f = factorize(n)?;
    let mut acc = BigUint::one();
    for &(p, e) in &f.factors {
        acc *= phi_k_prime_power(p, e, k);
    }
    Ok(acc)
}

/// Phi_k(p^e) as an exact integer. For even k and odd p the rational alpha
/// factor clears its denominator against p^{e(k-1)}:
/// Phi_k(p^e) = p^{ek - 1 - k/2} (p-1) (p^{k/2} - sign).
fn phi_k_prime_power(p: u64, e: u32, k: u32) -> BigUint {
    let pb = BigUint::from(p);
    let pm1 = BigUint::from(p - 1);
    if k % 2 == 1 || p == 2 {
        // p^{e(k-1)} * p^{e-1} (p-1)
        pb.pow(e * (k - 1) + e - 1) * pm1
    } else {
        let half = k / 2;
        let pk2 = pb.pow(half);
        let numer = if alpha_sign(p, k) > 0 {
            &pk2 - BigUint::one()
        } else {
            &pk2 + BigUint::one()
        };
        let exp = e * k - 1 - half; // >= k/2 - 1 >= 0
        pb.pow(exp) * pm1 * numer
    }
}

/// Definition-level count: enumerate all n^k tuples over Z/nZ and test
/// gcd(sum of squares, n) = 1. This is the oracle the formula is checked
/// against; keep it independent of `phi_k`.
pub fn phi_k_brute(n: u64, k: u32) -> Result<BigUint> {
    if k == 0 || n == 0 {
        return Err(Error::argument("phi_k_brute requires n >= 1 and k >= 1"));
    }
    let mut cost: u128 = 1;
    for _ in 0..k {
        cost = cost.saturating_mul(n as u128);
        if cost > BRUTE_COST_CAP {
            return Err(Error::capacity(format!(
                "n^k = {}^{} exceeds the {BRUTE_COST_CAP} tuple cost guard",
                n, k
            )));
        }
    }
    if n == 1 {
        // the single all-zero tuple has gcd(0, 1) = 1
        return Ok(BigUint::one());
    }
    let nn = n as usize;
    let sq: Vec<u32> = (0..nn).map(|x| ((x * x) % nn) as u32).collect();
    let coprime: Vec<bool> = (0..nn as u64).map(|r| gcd_u64(r, n) == 1).collect();

    fn walk(depth: u32, sum: usize, nn: usize, sq: &[u32], coprime: &[bool]) -> u64 {
        if depth == 0 {
            return coprime[sum] as u64;
        }
        let mut total = 0u64;
        for &s in sq {
            let mut t = sum + s as usize;
            if t >= nn {
                t -= nn;
            }
            total += walk(depth - 1, t, nn, sq, coprime);
        }
        total
    }
    Ok(BigUint::from(walk(k, 0, nn, &sq, &coprime)))
}

/// Euler's phi, exactly (fits u64 for all supported n).
pub fn euler_phi(n: u64) -> Result<u64> {
    let f = factorize(n)?;
    let mut acc = 1u64;
    for &(p, e) in &f.factors {
        acc *= p.pow(e - 1) * (p - 1);
    }
    Ok(acc)
}

/// Jordan's totient J_k(n) = n^k prod_{p|n} (1 - p^{-k}), exactly.
pub fn jordan_j(n: u64, k: u32) -> Result<BigUint> {
    if k == 0 {
        return Err(Error::argument("k must be >= 1"));
    }
    let f = factorize(n)?;
    let mut acc = BigUint::one();
    for &(p, e) in &f.factors {
        let pb = BigUint::from(p);
        acc *= pb.pow(k * (e - 1)) * (pb.pow(k) - BigUint::one());
    }
    Ok(acc)
}

/// One bulk-evaluation entry: `log_ratio = ln Phi_k(n) - k ln n <= 0` is what
/// the range sieve materializes; the exact big integer stays on demand.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TotientValue {
    pub n: u64,
    pub k: u32,
    pub log_ratio: f64,
}

impl TotientValue {
    /// Exact Phi_k(n), computed on demand.
    pub fn phi_k(&self) -> Result<BigUint> {
        phi_k(self.n, self.k)
    }

    /// ln Phi_k(n) reconstructed from the stored ratio.
    pub fn ln_phi_k(&self) -> f64 {
        self.log_ratio + self.k as f64 * (self.n as f64).ln()
    }
}

/// Stream `TotientValue` for n = 1..=x in ascending order, one SPF-sieve
/// segment at a time.
pub fn phi_k_range<F: FnMut(TotientValue)>(x: u64, k: u32, mut f: F) -> Result<()> {
    if k == 0 || x == 0 {
        return Err(Error::argument("phi_k_range requires x >= 1 and k >= 1"));
    }
    if x > RANGE_CAP {
        return Err(Error::capacity(format!("x {x} exceeds cap {RANGE_CAP}")));
    }
    scan::scan_log_ratio(x, k, |seg| {
        for (i, &lr) in seg.log_ratio.iter().enumerate() {
            f(TotientValue {
                n: seg.lo + i as u64,
                k,
                log_ratio: lr,
            });
        }
    });
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use num::FromPrimitive;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    fn big(n: u64) -> BigUint {
        BigUint::from(n)
    }

    #[test]
    fn alpha_examples() {
        assert_eq!(alpha_k(3, 2).unwrap(), rat(4, 3));
        assert_eq!(alpha_k(5, 2).unwrap(), rat(4, 5));
        assert_eq!(alpha_k(3, 4).unwrap(), rat(8, 9));
        assert_eq!(alpha_k(2, 6).unwrap(), rat(1, 1));
        assert!(alpha_k(3, 3).is_err());
    }

    #[test]
    fn alpha_prime_power_independence_and_f64_agreement() {
        // Eq-level: alpha at a prime is what every power reuses; the f64
        // helper must match the exact rational.
        for &(p, k) in &[(3u64, 2u32), (5, 2), (7, 6), (11, 4), (13, 10)] {
            let exact = alpha_k(p, k).unwrap();
            let approx = alpha_f64(p, k);
            let exact_f = crate::rational::rational_to_f64(&exact);
            assert!((approx - exact_f).abs() < 1e-15, "p={p} k={k}");
            assert!((ln_alpha(p, k) - exact_f.ln()).abs() < 1e-14);
        }
    }

    #[test]
    fn alpha_bounds_proposition() {
        // (1 - 2^{-k/2}) <= alpha_k(p) <= (1 + 2^{-k/2}) over p <= 10^5, even k <= 20
        let primes = crate::arith::primes_up_to(100_000).unwrap();
        for k in (2..=20u32).step_by(2) {
            let bound = BigRational::from_f64(2f64.powi(-((k / 2) as i32))).unwrap();
            let lo = BigRational::one() - bound.clone();
            let hi = BigRational::one() + bound;
            for &p in &primes {
                let a = alpha_k(p, k).unwrap();
                assert!(a >= lo && a <= hi, "alpha out of bounds at p={p} k={k}");
            }
        }
    }

    #[test]
    fn phi_k_examples() {
        assert_eq!(phi_k(3, 2).unwrap(), big(8));
        assert_eq!(phi_k(5, 2).unwrap(), big(16));
        assert_eq!(phi_k(3, 4).unwrap(), big(48));
        assert_eq!(phi_k(4, 3).unwrap(), big(32));
        for k in 1..=8 {
            assert_eq!(phi_k(1, k).unwrap(), big(1));
        }
    }

    #[test]
    fn brute_examples() {
        assert_eq!(phi_k_brute(3, 2).unwrap(), big(8));
        assert_eq!(phi_k_brute(4, 2).unwrap(), big(8));
        assert_eq!(phi_k_brute(15, 2).unwrap(), big(128));
        assert_eq!(phi_k_brute(1, 5).unwrap(), big(1));
        assert!(matches!(
            phi_k_brute(100, 5),
            Err(Error::Capacity(_))
        ));
    }

    #[test]
    fn formula_matches_brute_small() {
        // the acceptance suite runs the full grid; keep a quick slice here
        for n in 1..=24u64 {
            for k in 1..=3u32 {
                assert_eq!(
                    phi_k(n, k).unwrap(),
                    phi_k_brute(n, k).unwrap(),
                    "n={n} k={k}"
                );
            }
        }
        for n in 1..=10u64 {
            assert_eq!(phi_k(n, 4).unwrap(), phi_k_brute(n, 4).unwrap());
        }
    }

    #[test]
    fn euler_and_jordan() {
        assert_eq!(euler_phi(12).unwrap(), 4);
        assert_eq!(euler_phi(1).unwrap(), 1);
        assert_eq!(jordan_j(4, 2).unwrap(), big(12));
        for n in 1..=2000u64 {
            assert_eq!(jordan_j(n, 1).unwrap(), big(euler_phi(n).unwrap()));
            assert_eq!(phi_k(n, 1).unwrap(), big(euler_phi(n).unwrap()));
        }
    }

    #[test]
    fn odd_k_is_power_times_phi() {
        for n in 1..=300u64 {
            for k in [1u32, 3, 5] {
                let expect = big(n).pow(k - 1) * big(euler_phi(n).unwrap());
                assert_eq!(phi_k(n, k).unwrap(), expect, "n={n} k={k}");
            }
        }
    }

    #[test]
    fn prime_power_reduction() {
        // Phi_k(p^m) = p^{k(m-1)} Phi_k(p)
        let primes = crate::arith::primes_up_to(50).unwrap();
        for &p in &primes {
            for m in 1..=4u32 {
                for k in 1..=6u32 {
                    let lhs = phi_k(p.pow(m), k).unwrap();
                    let rhs = big(p).pow(k * (m - 1)) * phi_k(p, k).unwrap();
                    assert_eq!(lhs, rhs, "p={p} m={m} k={k}");
                }
            }
        }
    }

    #[test]
    fn multiplicative_on_seeded_pairs() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let mut done = 0;
        while done < 300 {
            let m = rng.gen_range(2u64..40_000);
            let n = rng.gen_range(2u64..25_000);
            if gcd_u64(m, n) != 1 {
                continue;
            }
            let k = rng.gen_range(1u32..=12);
            assert_eq!(
                phi_k(m * n, k).unwrap(),
                phi_k(m, k).unwrap() * phi_k(n, k).unwrap()
            );
            done += 1;
        }
    }

    #[test]
    fn range_examples() {
        let mut vals = Vec::new();
        phi_k_range(10, 1, |v| vals.push(v)).unwrap();
        assert_eq!(vals.len(), 10);
        assert_eq!(vals[0].n, 1);
        assert_eq!(vals[0].log_ratio, 0.0);
        let lr6 = vals[5].log_ratio;
        assert!((lr6 - (1f64 / 3.0).ln()).abs() < 1e-12, "phi(6)/6 = 1/3");

        let mut vals2 = Vec::new();
        phi_k_range(10, 2, |v| vals2.push(v)).unwrap();
        assert_eq!(vals2[8].phi_k().unwrap(), big(72)); // n = 9

        let mut one = Vec::new();
        phi_k_range(1, 3, |v| one.push(v)).unwrap();
        assert_eq!(one.len(), 1);
        assert_eq!(one[0].n, 1);
        assert_eq!(one[0].phi_k().unwrap(), big(1));
        assert_eq!(one[0].log_ratio, 0.0);
    }

    #[test]
    fn range_log_ratio_matches_exact() {
        for k in [1u32, 2, 3, 4, 6] {
            phi_k_range(500, k, |v| {
                let exact = phi_k(v.n, v.k).unwrap();
                let ln_exact = crate::scan::ln_biguint(&exact);
                assert!(
                    (v.ln_phi_k() - ln_exact).abs() < 1e-9,
                    "n={} k={k}",
                    v.n
                );
                assert!(v.log_ratio <= 0.0);
            })
            .unwrap();
        }
    }

    #[test]
    fn params_validation() {
        let p = TotientParams::new(2, rat(3, 2)).unwrap();
        assert_eq!(p.delta, rat(1, 2));
        assert!(TotientParams::new(0, rat(1, 1)).is_err());
        assert!(TotientParams::new(1, rat(1, 65)).is_err());
    }

    proptest! {
        // generous shrink-friendly slice of the multiplicativity invariant
        #[test]
        fn multiplicativity(m in 2u64..3000, n in 2u64..3000, k in 1u32..8) {
            prop_assume!(gcd_u64(m, n) == 1);
            prop_assert_eq!(
                phi_k(m * n, k).unwrap(),
                phi_k(m, k).unwrap() * phi_k(n, k).unwrap()
            );
        }

        #[test]
        fn phi_k_bounds(n in 1u64..50_000, k in 1u32..6) {
            let v = phi_k(n, k).unwrap();
            prop_assert!(v >= BigUint::one());
            prop_assert!(v <= BigUint::from(n).pow(k));
        }
    }
}
