//! High-precision scalar analytics: Riemann zeta on the real axis, the
//! Dirichlet L-function of the character mod 4, the Euler products R_k(z)
//! with certified truncation tails, Mertens-type sums and products, and a
//! two-variable Dirichlet-series consistency check.

use num::complex::Complex64;
use rayon::prelude::*;

use crate::arith::{self, chi1, for_primes_up_to};
use crate::error::{Error, Result};
use crate::totient::{ln_alpha, TotientParams};

/// Truncated Euler product together with a certified bound on the relative
/// error contributed by every omitted prime.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EulerProductResult {
    pub value: Complex64,
    pub truncation_prime: u64,
    pub tail_bound: f64,
}

/// Largest truncation prime `r_value` will sieve to.
pub const R_TRUNCATION_CAP: u64 = 1_000_000_000;

// B_{2j}/(2j)! for j = 1..=8
const BERNOULLI_OVER_FACTORIAL: [f64; 8] = [
    8.333333333333333e-2,   // B2/2!  = 1/12
    -1.388888888888889e-3,  // B4/4!  = -1/720
    3.306878306878307e-5,   // B6/6!  = 1/30240
    -8.267195767195768e-7,  // B8/8!  = -1/1209600
    2.08767569878681e-8,    // B10/10! = 1/47900160
    -5.284190138687493e-10, // B12/12!
    1.3382536530684679e-11, // B14/14!
    -3.3896802963225829e-13, // B16/16!
];

/// zeta(s) for real s > 1 by Euler-Maclaurin: direct sum to a cutoff, the
/// integral and half-term corrections, then 8 Bernoulli terms.
pub fn zeta_real(s: f64) -> Result<f64> {
    if !(s > 1.0) {
        return Err(Error::domain(format!("zeta_real needs s > 1, got {s}")));
    }
    let cutoff = 20usize.max((s.abs().ceil() as usize).saturating_mul(4));
    let mut sum = 0.0f64;
    for n in 1..cutoff {
        sum += (n as f64).powf(-s);
    }
    let nf = cutoff as f64;
    sum += nf.powf(1.0 - s) / (s - 1.0);
    sum += 0.5 * nf.powf(-s);
    let mut pochhammer = s; // (s)(s+1)...(s+2j-2), starting at j = 1
    let mut npow = nf.powf(-s - 1.0);
    for (j, b) in BERNOULLI_OVER_FACTORIAL.iter().enumerate() {
        sum += b * pochhammer * npow;
        let t = 2.0 * (j as f64 + 1.0);
        pochhammer *= (s + t - 1.0) * (s + t);
        npow /= nf * nf;
    }
    Ok(sum)
}

/// L(j, chi1) = sum_{m>=0} (-1)^m (2m+1)^{-j} for real j >= 1, via iterated
/// averaging of the alternating partial sums (depth 30). Converges
/// geometrically even at j = 1 where L(1) = pi/4.
pub fn l_chi1(j: f64) -> Result<f64> {
    if !(j >= 1.0) {
        return Err(Error::domain(format!("l_chi1 needs j >= 1, got {j}")));
    }
    const TERMS: usize = 72;
    const DEPTH: usize = 30;
    let mut partial = Vec::with_capacity(TERMS);
    let mut s = 0.0f64;
    for m in 0..TERMS {
        let a = ((2 * m + 1) as f64).powf(-j);
        s += if m % 2 == 0 { a } else { -a };
        partial.push(s);
        if a < 1e-18 * s.abs() {
            // series already converged in double precision (large j)
            return Ok(s);
        }
    }
    let mut len = partial.len();
    for _ in 0..DEPTH {
        for i in 0..len - 1 {
            partial[i] = 0.5 * (partial[i] + partial[i + 1]);
        }
        len -= 1;
    }
    Ok(partial[len - 1])
}

/// Local factor of the residue Euler product R_k at a prime:
/// `1 - 1/p + (1/p) (p/(p-1))^z alpha_k(p)^{-z}` (the alpha part is absent
/// for odd k and at p = 2). Powers go through the real logarithm, so no
/// branch ambiguity: alpha_k(p) > 0 always.
pub fn euler_factor(p: u64, z: Complex64, k: u32) -> Complex64 {
    if z == Complex64::new(0.0, 0.0) {
        return Complex64::new(1.0, 0.0);
    }
    let pf = p as f64;
    let c = (1.0 / (pf - 1.0)).ln_1p() - ln_alpha(p, k);
    let w = (z * c).exp();
    Complex64::new(1.0 - 1.0 / pf, 0.0) + w / pf
}

/// e^z - 1, accurate for small z.
fn cexpm1(z: Complex64) -> Complex64 {
    let ex = z.re.exp_m1();
    let (sy, cy) = z.im.sin_cos();
    let cos_m1 = -2.0 * (z.im * 0.5).sin().powi(2);
    Complex64::new(ex * cy + cos_m1, (ex + 1.0) * sy)
}

/// ln(1 + w), accurate for small w.
fn cln1p(w: Complex64) -> Complex64 {
    let re = 0.5 * (2.0 * w.re + w.re * w.re + w.im * w.im).ln_1p();
    let im = w.im.atan2(1.0 + w.re);
    Complex64::new(re, im)
}

/// ln of the local factor: the factor is 1 + (e^{z c} - 1)/p, so the log sum
/// over millions of primes keeps every rounding proportional to the tiny
/// per-prime deviation instead of the running product.
fn euler_factor_ln(p: u64, z: Complex64, k: u32) -> Complex64 {
    let pf = p as f64;
    let c = (1.0 / (pf - 1.0)).ln_1p() - ln_alpha(p, k);
    cln1p(cexpm1(z * c) / pf)
}

/// `|local factor - 1| <= C(|z|) / (p (p-1))` holds for p - 1 >= |z| K with
/// C = e |z| K, where K = 1 for odd k and 1 + (1 - 2^{-k/2})^{-1} for even k
/// (the alpha bound feeds the extra term).
fn tail_c_and_p0(k: u32, znorm: f64) -> (f64, u64) {
    let kk = if k.is_multiple_of(2) {
        1.0 + 1.0 / (1.0 - 2f64.powi(-((k / 2) as i32)))
    } else {
        1.0
    };
    let c = std::f64::consts::E * znorm * kk;
    let p0 = (znorm * kk).ceil() as u64 + 2;
    (c, p0)
}

/// Certified relative tail of the product truncated at P: the omitted primes
/// multiply the value by at most `exp(C * S) `, where S bounds
/// `sum_{p > P} 1/(p(p-1))` through partial summation against the
/// Rosser-Schoenfeld bound `pi(x) < 1.25506 x / ln x` (x > 1).
fn tail_bound_at(c: f64, p: u64) -> f64 {
    let pf = p as f64;
    let s = 1.25506 / pf.ln() * (1.0 / (pf - 1.0) + (pf / (pf - 1.0)).ln());
    (c * s).exp_m1()
}

/// Evaluate the Euler product R_k(z) to certified relative tail <= tol.
///
/// The product depends only on k and z; beta enters the theorems solely
/// through the evaluation point z = 1/(1-delta).
pub fn r_value(k: u32, z: Complex64, tol: f64) -> Result<EulerProductResult> {
    if k == 0 {
        return Err(Error::argument("k must be >= 1"));
    }
    if !(tol >= 1e-12) {
        return Err(Error::argument(format!("tol must be >= 1e-12, got {tol}")));
    }
    let znorm = z.norm();
    if !(znorm <= 1e4) {
        return Err(Error::argument("|z| must be <= 1e4"));
    }
    if znorm == 0.0 {
        return Ok(EulerProductResult {
            value: Complex64::new(1.0, 0.0),
            truncation_prime: 2,
            tail_bound: 0.0,
        });
    }
    let (c, p0) = tail_c_and_p0(k, znorm);
    let lo0 = 1024u64.max(p0).max(17);
    if tail_bound_at(c, R_TRUNCATION_CAP) > tol {
        return Err(Error::precision(format!(
            "tol {tol} not reachable: tail still {:.3e} at the {R_TRUNCATION_CAP} truncation cap",
            tail_bound_at(c, R_TRUNCATION_CAP)
        )));
    }
    let trunc = if tail_bound_at(c, lo0) <= tol {
        lo0
    } else {
        // bound is monotone decreasing in P; binary search the cutover
        let (mut lo, mut hi) = (lo0, R_TRUNCATION_CAP);
        while hi - lo > lo / 64 + 1 {
            let mid = lo + (hi - lo) / 2;
            if tail_bound_at(c, mid) <= tol {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        hi
    };
    let value = prime_log_sum_par(trunc, |p| euler_factor_ln(p, z, k)).exp();
    Ok(EulerProductResult {
        value,
        truncation_prime: trunc,
        tail_bound: tail_bound_at(c, trunc),
    })
}

/// Sum of `ln f(p)` over primes p <= limit. Segments are sieved in parallel
/// and their partial sums are added back in fixed segment order, so the
/// result is independent of the worker count.
fn prime_log_sum_par(limit: u64, f: impl Fn(u64) -> Complex64 + Sync) -> Complex64 {
    let base = arith::base_primes(limit);
    let bounds = arith::prime_segment_bounds(limit);
    let partials: Vec<Complex64> = bounds
        .into_par_iter()
        .map(|(lo, hi)| {
            let mut seg = Vec::new();
            arith::primes_in_segment(lo, hi, &base, &mut seg);
            let mut acc = Complex64::new(0.0, 0.0);
            for &p in &seg {
                acc += f(p);
            }
            acc
        })
        .collect();
    let mut acc = Complex64::new(0.0, 0.0);
    for v in partials {
        acc += v;
    }
    acc
}

fn check_mertens_x(x: u64) -> Result<()> {
    if x < 2 {
        return Err(Error::domain(format!("mertens quantities need x >= 2, got {x}")));
    }
    Ok(())
}

/// sum_{p <= x} 1/p, summed in ascending order.
pub fn mertens_sum(x: u64) -> Result<f64> {
    check_mertens_x(x)?;
    let mut s = 0.0;
    for_primes_up_to(x, |p| s += 1.0 / p as f64)?;
    Ok(s)
}

/// prod_{p <= x} (1 - 1/p).
pub fn mertens_product(x: u64) -> Result<f64> {
    check_mertens_x(x)?;
    let mut v = 1.0;
    for_primes_up_to(x, |p| v *= 1.0 - 1.0 / p as f64)?;
    Ok(v)
}

/// prod_{p <= x} (1 - p^{-j}) for j >= 2; tends to 1/zeta(j).
pub fn mertens_product_power(x: u64, j: u32) -> Result<f64> {
    check_mertens_x(x)?;
    if j < 2 {
        return Err(Error::argument("mertens_product_power needs j >= 2"));
    }
    let mut v = 1.0;
    for_primes_up_to(x, |p| v *= 1.0 - (p as f64).powi(-(j as i32)))?;
    Ok(v)
}

/// prod_{p <= x} (1 - chi1(p) p^{-j}) for j >= 1; tends to 1/L(j, chi1).
pub fn mertens_product_chi(x: u64, j: u32) -> Result<f64> {
    check_mertens_x(x)?;
    if j < 1 {
        return Err(Error::argument("mertens_product_chi needs j >= 1"));
    }
    let mut v = 1.0;
    for_primes_up_to(x, |p| {
        v *= 1.0 - chi1(p) as f64 * (p as f64).powi(-(j as i32));
    })?;
    Ok(v)
}

/// Result of comparing the truncated Dirichlet series F_{k,beta}(s,z) against
/// its Euler-product factorization G/I * zeta(s + z - delta z).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DirichletSeriesCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub gap: f64,
    /// crude bound-shaped estimate of the series truncation error
    pub series_tail_estimate: f64,
}

/// Local factor of G (odd k) / I (even k) at general real (s, z):
/// `1 - p^{-s + delta z - z} + p^{-s + delta z} (p-1)^{-z} alpha_k(p)^{-z}`.
/// Collapses to exactly 1 at z = 0.
fn gi_factor(p: u64, s: f64, z: f64, delta: f64, k: u32) -> f64 {
    if z == 0.0 {
        return 1.0;
    }
    let lp = (p as f64).ln();
    let a = ((-s + delta * z - z) * lp).exp();
    let b = ((-s + delta * z) * lp - z * ((p as f64) - 1.0).ln() - z * ln_alpha(p, k)).exp();
    1.0 - a + b
}

const DIRICHLET_N_CAP: u64 = 10_000_000;
const DIRICHLET_PRODUCT_TRUNCATION: u64 = 1_000_000;

/// Compare the N-term Dirichlet series sum_{n} n^{-s+beta z} Phi_k(n)^{-z}
/// with the factorized side, inside the convergence region
/// s + (1 - delta) z > 1.
pub fn dirichlet_series_check(
    params: &TotientParams,
    s: f64,
    z: f64,
    n_terms: u64,
) -> Result<DirichletSeriesCheck> {
    if n_terms == 0 {
        return Err(Error::argument("need at least one series term"));
    }
    if n_terms > DIRICHLET_N_CAP {
        return Err(Error::capacity(format!(
            "n_terms {n_terms} exceeds cap {DIRICHLET_N_CAP}"
        )));
    }
    let delta = params.delta_f64();
    let c = s + (1.0 - delta) * z;
    if !(c > 1.0) {
        return Err(Error::domain(format!(
            "(s, z) outside the convergence region: s + (1-delta) z = {c} <= 1"
        )));
    }
    let mut lhs = 0.0f64;
    let mut last_term = 0.0f64;
    crate::scan::scan_log_ratio(n_terms, params.k, |seg| {
        for (i, &lr) in seg.log_ratio.iter().enumerate() {
            let n = seg.lo + i as u64;
            let t = (-z * lr - c * (n as f64).ln()).exp();
            lhs += t;
            last_term = t;
        }
    });
    let zeta = zeta_real(c)?;
    let mut prod = 1.0f64;
    for_primes_up_to(DIRICHLET_PRODUCT_TRUNCATION.min(n_terms.max(100)), |p| {
        prod *= gi_factor(p, s, z, delta, params.k);
    })?;
    let rhs = zeta * prod;
    let series_tail_estimate = last_term * n_terms as f64 / (c - 1.0);
    Ok(DirichletSeriesCheck {
        lhs,
        rhs,
        gap: (lhs - rhs).abs(),
        series_tail_estimate,
    })
}
