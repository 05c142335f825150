//! Exact counting of `#{n <= x : Phi_k(n)/n^beta <= y}` and its companions:
//! the regime classifier for the asymptotic theorems, the empirical CDF of
//! Phi_k(n)/n^k, the summatory A_z(x), and the unbounded count
//! `#{m : phi(m) <= y}` with a no-stragglers certificate.
//!
//! Boundary discipline: each n is decided in the log domain; when the test
//! value lands within a 1e-9 guard band of zero the comparison is redone
//! exactly with big integers, so rational y never miscounts on ties.

use num::bigint::BigInt;
use num::rational::BigRational;
use num::complex::Complex64;
use num::{One, Signed, ToPrimitive, Zero};

use crate::arith::Constants;
use crate::error::{Error, Result};
use crate::rational::rational_to_f64;
use crate::scan;
use crate::totient::{phi_k, TotientParams};

/// Cap on x for the exact counting scans.
pub const COUNT_X_CAP: u64 = 100_000_000;
/// Cap on y for `bateman_count`.
pub const BATEMAN_Y_CAP: u64 = 10_000_000;
/// Width of the log-domain guard band around the boundary.
pub const BOUNDARY_GUARD: f64 = 1e-9;

/// Which theorem of the distribution suite governs a parameter point.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RegimeTag {
    Thm3Main,
    Thm4Bound,
    Thm5Bound,
    Thm6Main,
    Thm7Main,
    Thm7Bound,
    TrivialFull,
    TrivialEmpty,
}

impl RegimeTag {
    pub fn as_str(&self) -> &'static str {
        match self {
            RegimeTag::Thm3Main => "THM3_MAIN",
            RegimeTag::Thm4Bound => "THM4_BOUND",
            RegimeTag::Thm5Bound => "THM5_BOUND",
            RegimeTag::Thm6Main => "THM6_MAIN",
            RegimeTag::Thm7Main => "THM7_MAIN",
            RegimeTag::Thm7Bound => "THM7_BOUND",
            RegimeTag::TrivialFull => "TRIVIAL_FULL",
            RegimeTag::TrivialEmpty => "TRIVIAL_EMPTY",
        }
    }

    /// True when the governing theorem supplies a main term (not just a bound).
    pub fn has_main_term(&self) -> bool {
        matches!(
            self,
            RegimeTag::Thm3Main | RegimeTag::Thm6Main | RegimeTag::Thm7Main
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegimeLabel {
    pub tag: RegimeTag,
    /// The main-term/bound cutover in y, where one is defined (0 < delta < 1).
    pub threshold_y: Option<f64>,
}

/// Tunable threshold constants. epsilon is the free parameter of the cutover
/// formula; kappa defaults to e^(1 + b0) and stays overridable.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegimeConfig {
    pub epsilon: f64,
    pub constants: Constants,
}

impl Default for RegimeConfig {
    fn default() -> Self {
        RegimeConfig {
            epsilon: 0.01,
            constants: Constants::default(),
        }
    }
}

/// The constant c_k of the threshold formula: (1 - 2^{-k/2})^{-1} for even k,
/// 1 for odd k.
pub fn c_k(k: u32) -> f64 {
    if k.is_multiple_of(2) {
        1.0 / (1.0 - 2f64.powi(-((k / 2) as i32)))
    } else {
        1.0
    }
}

/// The THM3/THM4 cutover: y = (ln((1-delta)^{-1} + eps))^{-4} / (c_k kappa^4) * x^{1-delta}.
pub fn thm3_threshold(params: &TotientParams, x: u64, cfg: &RegimeConfig) -> f64 {
    let delta = params.delta_f64();
    let inv = 1.0 / (1.0 - delta);
    let lg = (inv + cfg.epsilon).ln();
    lg.powi(-4) / (c_k(params.k) * cfg.constants.kappa.powi(4)) * (x as f64).powf(1.0 - delta)
}

/// Decide which theorem governs (k, beta, x, y). delta comparisons are exact
/// rational; thresholds are float tests. delta >= 1 sits outside the theorem
/// suite and is rejected.
pub fn classify_regime(
    params: &TotientParams,
    x: u64,
    y: &BigRational,
    cfg: &RegimeConfig,
) -> Result<RegimeLabel> {
    if x < 2 {
        return Err(Error::argument("classify_regime needs x >= 2"));
    }
    let zero = BigRational::zero();
    let one = BigRational::one();
    if params.delta >= one {
        return Err(Error::argument(
            "delta = beta - (k-1) >= 1 is outside the supported regimes",
        ));
    }
    // ratio values are >= 1 for delta <= 0 (and always > 0), so y below 1
    // provably counts nothing
    if params.delta <= zero && y < &one {
        return Ok(RegimeLabel {
            tag: RegimeTag::TrivialEmpty,
            threshold_y: None,
        });
    }
    if params.delta == zero {
        return Ok(RegimeLabel {
            tag: RegimeTag::Thm6Main,
            threshold_y: None,
        });
    }
    let yf = rational_to_f64(y);
    if params.delta > zero {
        // 0 < delta < 1 here
        let threshold = thm3_threshold(params, x, cfg);
        let x_rat = BigRational::from_integer(BigInt::from(x));
        if y > &x_rat {
            return Ok(RegimeLabel {
                tag: RegimeTag::TrivialFull,
                threshold_y: Some(threshold),
            });
        }
        let tag = if yf <= threshold {
            RegimeTag::Thm3Main
        } else {
            RegimeTag::Thm4Bound
        };
        return Ok(RegimeLabel {
            tag,
            threshold_y: Some(threshold),
        });
    }
    // delta < 0, y >= 1
    let xf = x as f64;
    let alpha = yf / xf;
    if alpha < 1.0 {
        return Ok(RegimeLabel {
            tag: RegimeTag::Thm5Bound,
            threshold_y: None,
        });
    }
    let delta = params.delta_f64();
    let lhs = xf * (xf.ln() * xf.ln().ln()).sqrt();
    let rhs = (1.0 - delta).exp() * yf.powf(1.0 / (1.0 - delta) - 1.0 / xf.ln());
    let tag = if lhs < rhs {
        RegimeTag::Thm7Main
    } else {
        RegimeTag::Thm7Bound
    };
    Ok(RegimeLabel {
        tag,
        threshold_y: None,
    })
}

/// One exact count with its parameters and governing regime.
#[derive(Debug, Clone, PartialEq)]
pub struct CountRecord {
    pub k: u32,
    pub beta: BigRational,
    pub x: u64,
    pub y: BigRational,
    pub count: u64,
    pub regime: RegimeLabel,
}

/// Exact comparison Phi_k(n)/n^beta <= y with beta = pb/qb:
/// Phi^qb * denom(y)^qb * n^{max(0,-pb)} <= numer(y)^qb * n^{max(0,pb)}.
fn exact_ratio_le(n: u64, params: &TotientParams, y: &BigRational) -> Result<bool> {
    if y <= &BigRational::zero() {
        return Ok(false);
    }
    let phi = phi_k(n, params.k)?;
    let qb: u32 = params
        .beta
        .denom()
        .to_u32()
        .ok_or_else(|| Error::argument("beta denominator out of range"))?;
    let pb_int = params.beta.numer();
    let pb_mag: u32 = pb_int
        .magnitude()
        .to_u32()
        .ok_or_else(|| Error::argument("beta numerator out of range"))?;
    let n_big = num::BigUint::from(n);
    let mut lhs = phi.pow(qb) * y.denom().magnitude().pow(qb);
    let mut rhs = y.numer().magnitude().pow(qb);
    if pb_int.is_negative() {
        lhs *= n_big.pow(pb_mag);
    } else {
        rhs *= n_big.pow(pb_mag);
    }
    Ok(lhs <= rhs)
}

/// Exact count of n <= x with Phi_k(n)/n^beta <= y, via the phi * alpha_k
/// sieve form. Segments run in parallel; integer counts merge
/// order-independently.
pub fn count_phi_ratio(
    params: &TotientParams,
    x: u64,
    y: &BigRational,
    cfg: &RegimeConfig,
) -> Result<CountRecord> {
    if x > COUNT_X_CAP {
        return Err(Error::capacity(format!("x {x} exceeds cap {COUNT_X_CAP}")));
    }
    let regime = classify_regime(params, x, y, cfg)?;
    let count = if y <= &BigRational::zero() {
        0
    } else {
        let one_minus_delta = 1.0 - params.delta_f64();
        let ln_y = rational_to_f64(y).ln();
        let partials: Vec<Result<u64>> = scan::map_segments_par(x, params.k, |seg| {
            let mut c = 0u64;
            for (i, &lr) in seg.log_ratio.iter().enumerate() {
                let n = seg.lo + i as u64;
                let v = lr + one_minus_delta * (n as f64).ln() - ln_y;
                if v < -BOUNDARY_GUARD || (v <= BOUNDARY_GUARD && exact_ratio_le(n, params, y)?) {
                    c += 1;
                }
            }
            Ok(c)
        });
        let mut total = 0u64;
        for p in partials {
            total += p?;
        }
        total
    };
    Ok(CountRecord {
        k: params.k,
        beta: params.beta.clone(),
        x,
        y: y.clone(),
        count,
        regime,
    })
}

/// Same count through the Phi_k form directly: ln Phi_k(n) from the
/// factorization of each n, no shared sieve. Slow; exists as the independent
/// cross-check route and must agree exactly with `count_phi_ratio`.
pub fn count_phi_ratio_direct(params: &TotientParams, x: u64, y: &BigRational) -> Result<u64> {
    if x > COUNT_X_CAP {
        return Err(Error::capacity(format!("x {x} exceeds cap {COUNT_X_CAP}")));
    }
    if y <= &BigRational::zero() {
        return Ok(0);
    }
    let beta = params.beta_f64();
    let ln_y = rational_to_f64(y).ln();
    let mut count = 0u64;
    for n in 1..=x {
        if phi_form_le(n, params, beta, ln_y, y)? {
            count += 1;
        }
    }
    Ok(count)
}

/// Boundary-guarded decision through the Phi_k form for a single n.
pub(crate) fn phi_form_le(
    n: u64,
    params: &TotientParams,
    beta_f: f64,
    ln_y: f64,
    y: &BigRational,
) -> Result<bool> {
    let ln_phi = scan::ln_biguint(&phi_k(n, params.k)?);
    let v = ln_phi - beta_f * (n as f64).ln() - ln_y;
    if v < -BOUNDARY_GUARD {
        Ok(true)
    } else if v > BOUNDARY_GUARD {
        Ok(false)
    } else {
        exact_ratio_le(n, params, y)
    }
}

/// Empirical CDF of Phi_k(n)/n^k over n <= x at the given grid points in
/// [0, 1]. Grid order is preserved in the output.
pub fn empirical_cdf(k: u32, x: u64, grid: &[f64]) -> Result<Vec<(f64, f64)>> {
    if k == 0 || x == 0 {
        return Err(Error::argument("empirical_cdf needs k >= 1 and x >= 1"));
    }
    if x > COUNT_X_CAP {
        return Err(Error::capacity(format!("x {x} exceeds cap {COUNT_X_CAP}")));
    }
    for &a in grid {
        if !(0.0..=1.0).contains(&a) {
            return Err(Error::argument(format!("grid value {a} outside [0, 1]")));
        }
    }
    let ln_grid: Vec<f64> = grid.iter().map(|&a| a.ln()).collect();
    let partials: Vec<Result<Vec<u64>>> = scan::map_segments_par(x, k, |seg| {
        let mut counts = vec![0u64; grid.len()];
        for (i, &lr) in seg.log_ratio.iter().enumerate() {
            let n = seg.lo + i as u64;
            for (gi, (&a, &ln_a)) in grid.iter().zip(&ln_grid).enumerate() {
                if a == 0.0 {
                    continue; // ratio > 0 always
                }
                if a == 1.0 {
                    counts[gi] += 1; // ratio <= 1 always
                    continue;
                }
                let v = lr - ln_a;
                if v < -BOUNDARY_GUARD || (v <= BOUNDARY_GUARD && exact_cdf_le(n, k, a)?) {
                    counts[gi] += 1;
                }
            }
        }
        Ok(counts)
    });
    let mut totals = vec![0u64; grid.len()];
    for p in partials {
        for (t, v) in totals.iter_mut().zip(p?) {
            *t += v;
        }
    }
    Ok(grid
        .iter()
        .zip(totals)
        .map(|(&a, c)| (a, c as f64 / x as f64))
        .collect())
}

/// Exact Phi_k(n) <= alpha * n^k for a dyadic grid value alpha.
fn exact_cdf_le(n: u64, k: u32, alpha: f64) -> Result<bool> {
    let a = BigRational::from_float(alpha)
        .ok_or_else(|| Error::argument(format!("non-finite grid value {alpha}")))?;
    let phi = phi_k(n, k)?;
    let lhs = phi * a.denom().magnitude();
    let rhs = a.numer().magnitude() * num::BigUint::from(n).pow(k);
    Ok(lhs <= rhs)
}

/// A_z(x) = sum_{n <= x} Phi_k(n)^{-z} n^{beta z}, summed in ascending n.
pub fn summatory_a(params: &TotientParams, z: Complex64, x: u64) -> Result<Complex64> {
    if x == 0 {
        return Err(Error::argument("summatory_a needs x >= 1"));
    }
    if x > COUNT_X_CAP {
        return Err(Error::capacity(format!("x {x} exceeds cap {COUNT_X_CAP}")));
    }
    let one_minus_delta = 1.0 - params.delta_f64();
    let mut sum = Complex64::new(0.0, 0.0);
    scan::scan_log_ratio(x, params.k, |seg| {
        for (i, &lr) in seg.log_ratio.iter().enumerate() {
            let n = seg.lo + i as u64;
            sum += (-z * (lr + one_minus_delta * (n as f64).ln())).exp();
        }
    });
    Ok(sum)
}

/// Result of the unbounded count `#{m : phi(m) <= y}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BatemanResult {
    pub count: u64,
    /// Scan cutoff X whose certificate passed.
    pub cutoff: u64,
    /// min phi(m) over the certificate window (X, 2X]; > y on success.
    pub certificate_min: u64,
}

/// Count every m with phi(m) <= y by scanning m <= X and certifying that
/// min{phi(m) : X < m <= 2X} > y. On certificate failure X doubles (the
/// qualifying m found in the window are folded into the count, so nothing is
/// rescanned).
///
/// The certificate settles all m > 2X as well: an even m > 2X halves down
/// into (X, 2X] through divisors (phi(d) <= phi(m) for d | m), and an odd
/// m > 2X has phi(m)/m bounded well above y/m by the odd-prime product.
pub fn bateman_count(y: u64) -> Result<BatemanResult> {
    if y == 0 {
        return Err(Error::argument("bateman_count needs y >= 1"));
    }
    if y > BATEMAN_Y_CAP {
        return Err(Error::capacity(format!("y {y} exceeds cap {BATEMAN_Y_CAP}")));
    }
    let yf = y as f64;
    let mut x = (8.0 * yf * (yf + 16.0).ln().ln()).ceil() as u64 + 100;
    let mut count = 0u64;
    let mut scanned_to = 0u64; // m <= scanned_to already folded into count
    for _ in 0..7 {
        scan::phi_segments(scanned_to + 1, x, |_, phis| {
            for &v in phis {
                if v <= y {
                    count += 1;
                }
            }
        });
        let mut cert_min = u64::MAX;
        let mut window_hits = 0u64;
        scan::phi_segments(x + 1, 2 * x, |_, phis| {
            for &v in phis {
                cert_min = cert_min.min(v);
                if v <= y {
                    window_hits += 1;
                }
            }
        });
        if cert_min > y {
            return Ok(BatemanResult {
                count,
                cutoff: x,
                certificate_min: cert_min,
            });
        }
        // fold the certified window into the count and double
        count += window_hits;
        scanned_to = 2 * x;
        x *= 2;
    }
    Err(Error::capacity(format!(
        "no-stragglers certificate still failing after doubling to {x}"
    )))
}
