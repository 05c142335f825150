//! Segmented multiplicative scans over n = 1..x.
//!
//! One pass stores a single f64 per n: `ln(Phi_k(n)/n^k)`, accumulated from
//! the prime factorization discovered by a smallest-prime-factor style sweep.
//! Exact big integers never materialize here; boundary-critical callers
//! recompute exactly for the handful of n that land inside a guard band.

use rayon::prelude::*;

use crate::arith::base_primes;
use crate::totient::ln_alpha;

pub(crate) const SCAN_SEGMENT: u64 = 1 << 20;

#[derive(Debug)]
pub(crate) struct LogRatioSegment {
    /// First n covered (inclusive).
    pub lo: u64,
    /// `log_ratio[i] = ln(Phi_k(lo + i) / (lo + i)^k) <= 0`.
    pub log_ratio: Vec<f64>,
}

pub(crate) fn segment_bounds(x: u64) -> Vec<(u64, u64)> {
    let mut out = Vec::new();
    let mut lo = 1u64;
    while lo <= x {
        let hi = (lo + SCAN_SEGMENT - 1).min(x);
        out.push((lo, hi));
        lo = hi + 1;
    }
    out
}

fn fill_segment(lo: u64, hi: u64, k: u32, base: &[u64]) -> LogRatioSegment {
    let span = (hi - lo + 1) as usize;
    let mut lr = vec![0.0f64; span];
    let mut rem: Vec<u64> = (lo..=hi).collect();
    for &p in base {
        if p * p > hi {
            break;
        }
        let contrib = (-1.0 / p as f64).ln_1p() + ln_alpha(p, k);
        let mut m = lo.div_ceil(p) * p;
        while m <= hi {
            let i = (m - lo) as usize;
            lr[i] += contrib;
            while rem[i].is_multiple_of(p) {
                rem[i] /= p;
            }
            m += p;
        }
    }
    for i in 0..span {
        let r = rem[i];
        if r > 1 {
            lr[i] += (-1.0 / r as f64).ln_1p() + ln_alpha(r, k);
        }
        // mathematically <= 0; keep floating-point drift out of the invariant
        if lr[i] > 0.0 {
            lr[i] = 0.0;
        }
    }
    LogRatioSegment { lo, log_ratio: lr }
}

/// Sequential scan, segments delivered in ascending order.
pub(crate) fn scan_log_ratio<F: FnMut(LogRatioSegment)>(x: u64, k: u32, mut f: F) {
    let base = base_primes(x);
    for (lo, hi) in segment_bounds(x) {
        f(fill_segment(lo, hi, k, &base));
    }
}

/// Parallel scan: segments are processed by whatever worker pool is active
/// and folded back in fixed segment order, so results do not depend on the
/// thread count.
pub(crate) fn map_segments_par<T, F>(x: u64, k: u32, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(&LogRatioSegment) -> T + Sync,
{
    let base = base_primes(x);
    segment_bounds(x)
        .into_par_iter()
        .map(|(lo, hi)| f(&fill_segment(lo, hi, k, &base)))
        .collect()
}

/// Exact Euler phi over `[lo, hi]`, one segment at a time (u64 throughout).
pub(crate) fn phi_segments<F: FnMut(u64, &[u64])>(lo: u64, hi: u64, mut f: F) {
    let base = base_primes(hi);
    let mut start = lo;
    while start <= hi {
        let end = (start + SCAN_SEGMENT - 1).min(hi);
        let span = (end - start + 1) as usize;
        let mut phi = vec![1u64; span];
        let mut rem: Vec<u64> = (start..=end).collect();
        for &p in &base {
            if p * p > end {
                break;
            }
            let mut m = start.div_ceil(p) * p;
            while m <= end {
                let i = (m - start) as usize;
                let mut e = 0u32;
                while rem[i].is_multiple_of(p) {
                    rem[i] /= p;
                    e += 1;
                }
                phi[i] *= p.pow(e - 1) * (p - 1);
                m += p;
            }
        }
        for i in 0..span {
            if rem[i] > 1 {
                phi[i] *= rem[i] - 1;
            }
        }
        f(start, &phi);
        start = end + 1;
    }
}

/// ln of a positive big integer without materializing it as f64.
pub(crate) fn ln_biguint(b: &num::BigUint) -> f64 {
    use num::ToPrimitive;
    let bits = b.bits();
    if bits <= 53 {
        return b.to_f64().unwrap().ln();
    }
    let shift = bits - 53;
    let top = (b >> shift).to_f64().unwrap();
    top.ln() + shift as f64 * std::f64::consts::LN_2
}
