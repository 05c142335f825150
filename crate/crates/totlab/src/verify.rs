//! Theorem-level verification harnesses: the Perron kernel and the two
//! numerical Perron count estimates, distribution main terms against exact
//! counts, extremal-order convergence along primorials, and the Mertens
//! report rows.

use num::complex::Complex64;
use num::rational::BigRational;
use num::FromPrimitive;

use crate::analytic::{l_chi1, mertens_product, mertens_product_chi, mertens_product_power, mertens_sum, r_value, zeta_real};
use crate::arith::{self, Constants};
use crate::counting::{count_phi_ratio, RegimeConfig, RegimeLabel, BOUNDARY_GUARD};
use crate::error::{Error, Result};
use crate::rational::rational_to_f64;
use crate::scan;
use crate::totient::{alpha_f64, ln_alpha, TotientParams};

/// Cap on x for the Perron quadratures (each node touches every n <= x).
pub const PERRON_X_CAP: u64 = 1_000_000;
/// RESIDUE_R keeps |z| on the contour modest; Euler-product cost grows with it.
pub const RESIDUE_TAU_CAP: f64 = 200.0;

/// Result of checking the Perron kernel h(y) against its contour integral.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelCheck {
    pub estimate: f64,
    /// Certified bound y^a/|ln y| * 2/T; absent at y = 1 where it blows up.
    pub bound: Option<f64>,
    /// The step value h(y): 1, 1/2, or 0.
    pub h: f64,
}

/// Trapezoid estimate of (1/2 pi i) int_{a-iT}^{a+iT} y^s/s ds, step <= 0.01.
pub fn perron_kernel_check(y: f64, a: f64, t: f64) -> Result<KernelCheck> {
    if !(a > 0.0) {
        return Err(Error::argument("perron_kernel_check needs a > 0"));
    }
    if !(y > 0.0) {
        return Err(Error::argument("perron_kernel_check needs y > 0"));
    }
    if !(t >= 1.0) {
        return Err(Error::argument("perron_kernel_check needs T >= 1"));
    }
    let h = if y > 1.0 {
        1.0
    } else if y == 1.0 {
        0.5
    } else {
        0.0
    };
    let steps = ((t / 0.01).ceil() as usize).max(4);
    let dt = t / steps as f64;
    let ya = y.powf(a);
    let ln_y = y.ln();
    // integrand is conjugate-symmetric in t; integrate [0, T] and double
    let mut acc = Complex64::new(0.0, 0.0);
    for j in 0..=steps {
        let tj = j as f64 * dt;
        let num = Complex64::from_polar(ya, tj * ln_y);
        let den = Complex64::new(a, tj);
        let w = if j == 0 || j == steps { 0.5 } else { 1.0 };
        acc += w * num / den;
    }
    let estimate = acc.re * dt / std::f64::consts::PI;
    let bound = if y == 1.0 {
        None
    } else {
        Some(ya / ln_y.abs() * 2.0 / t)
    };
    Ok(KernelCheck { estimate, bound, h })
}

/// Contour-integration route for the count estimate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PerronMode {
    /// Integrate A_z(x) y^z / z on the line Re z = b (any delta).
    ExactA,
    /// Residue split: analytic main term R(1/(1-delta)) y^{1/(1-delta)} plus
    /// the numerically integrated remainder on the shifted line Re z = d,
    /// with d chosen past the pole by the threshold recipe.
    ResidueR,
}

/// A Perron count estimate at two quadrature resolutions (the fine grid
/// halves the coarse step once, Richardson style).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PerronEstimate {
    /// Fine-grid estimate (the headline value).
    pub estimate: f64,
    /// Same integral at the requested step, for convergence inspection.
    pub coarse_estimate: f64,
    /// Analytic main term (ResidueR only).
    pub main_term: Option<f64>,
    /// Abscissa of the vertical contour actually integrated.
    pub contour_abscissa: f64,
}

/// Numerical Perron estimate of the count #{n <= x : Phi_k(n)/n^beta <= y}.
///
/// `steps_per_unit` is the coarse trapezoid density along the contour
/// (default 40); the returned `estimate` uses twice that density.
#[allow(clippy::too_many_arguments)] // the operation's full parameter surface
pub fn perron_count_estimate(
    params: &TotientParams,
    x: u64,
    y: &BigRational,
    b: f64,
    tau: f64,
    steps_per_unit: u32,
    mode: PerronMode,
    cfg: &RegimeConfig,
) -> Result<PerronEstimate> {
    if x == 0 || x > PERRON_X_CAP {
        return Err(Error::capacity(format!(
            "x must lie in 1..={PERRON_X_CAP} for the Perron quadrature"
        )));
    }
    if !(tau >= 1.0) {
        return Err(Error::argument("tau must be >= 1"));
    }
    if steps_per_unit == 0 {
        return Err(Error::argument("steps_per_unit must be >= 1"));
    }
    let yf = rational_to_f64(y);
    if !(yf > 0.0) {
        return Err(Error::argument("y must be positive"));
    }
    match mode {
        PerronMode::ExactA => exact_a_estimate(params, x, yf, b, tau, steps_per_unit),
        PerronMode::ResidueR => residue_r_estimate(params, x, yf, tau, steps_per_unit, cfg),
    }
}

fn trapezoid_weight(j: usize, last: usize) -> f64 {
    if j == 0 || j == last {
        0.5
    } else {
        1.0
    }
}

fn exact_a_estimate(
    params: &TotientParams,
    x: u64,
    y: f64,
    b: f64,
    tau: f64,
    steps_per_unit: u32,
) -> Result<PerronEstimate> {
    if !(b > 0.0) {
        return Err(Error::argument("EXACT_A needs b > 0"));
    }
    if b < 1e-3 {
        return Err(Error::geometry("pole z = 0 within 1e-3 of the contour"));
    }
    // L_n = ln(Phi_k(n)/n^beta); A_z(x) = sum exp(-z L_n)
    let one_minus_delta = 1.0 - params.delta_f64();
    let mut weights = Vec::with_capacity(x as usize); // exp(-b L_n)
    let mut steps = Vec::with_capacity(x as usize); // exp(-i h L_n)
    let mut rots = Vec::with_capacity(x as usize);
    let m = 2 * ((tau * steps_per_unit as f64).ceil() as usize).max(1);
    let h = tau / m as f64;
    scan::scan_log_ratio(x, params.k, |seg| {
        for (i, &lr) in seg.log_ratio.iter().enumerate() {
            let n = seg.lo + i as u64;
            let ln = lr + one_minus_delta * (n as f64).ln();
            weights.push((-b * ln).exp());
            steps.push(Complex64::from_polar(1.0, -h * ln));
            rots.push(Complex64::new(1.0, 0.0));
        }
    });
    let ln_y = y.ln();
    let yb = y.powf(b);
    let y_step = Complex64::from_polar(1.0, h * ln_y);
    let mut y_rot = Complex64::new(1.0, 0.0);
    let mut fine = Complex64::new(0.0, 0.0);
    let mut coarse = Complex64::new(0.0, 0.0);
    for j in 0..=m {
        let t = j as f64 * h;
        let mut a_z = Complex64::new(0.0, 0.0);
        for (w, r) in weights.iter().zip(rots.iter()) {
            a_z += w * r;
        }
        let integrand = a_z * (yb * y_rot) / Complex64::new(b, t);
        fine += trapezoid_weight(j, m) * integrand;
        if j % 2 == 0 {
            coarse += trapezoid_weight(j / 2, m / 2) * integrand;
        }
        for (r, s) in rots.iter_mut().zip(steps.iter()) {
            *r *= s;
        }
        y_rot *= y_step;
    }
    let scale = h / std::f64::consts::PI;
    Ok(PerronEstimate {
        estimate: fine.re * scale,
        coarse_estimate: coarse.re * 2.0 * scale,
        main_term: None,
        contour_abscissa: b,
    })
}

fn residue_r_estimate(
    params: &TotientParams,
    x: u64,
    y: f64,
    tau: f64,
    steps_per_unit: u32,
    cfg: &RegimeConfig,
) -> Result<PerronEstimate> {
    if tau > RESIDUE_TAU_CAP {
        return Err(Error::argument(format!(
            "RESIDUE_R needs tau <= {RESIDUE_TAU_CAP}"
        )));
    }
    let delta = params.delta_f64();
    if !(delta < 1.0) {
        return Err(Error::argument("RESIDUE_R needs delta < 1"));
    }
    let k = params.k;
    let z0 = 1.0 / (1.0 - delta);
    let xf = x as f64;
    // alpha x^delta, in logs to dodge overflow
    let ln_ax = y.ln() - (1.0 - delta) * xf.ln();
    let ax = ln_ax.exp();
    let kappa = cfg.constants.kappa;
    let d = if k.is_multiple_of(2) {
        (1.0 / (kappa * (crate::counting::c_k(k) * ax).powf(0.25))).exp()
    } else {
        (1.0 / (kappa * ax.sqrt())).exp()
    };
    if (d - z0).abs() < 1e-3 {
        return Err(Error::geometry(format!(
            "pole z0 = {z0:.6} within 1e-3 of the shifted contour d = {d:.6}"
        )));
    }
    if d < z0 {
        return Err(Error::geometry(format!(
            "shifted contour d = {d:.6} does not clear the pole z0 = {z0:.6} \
             (y above the main-term threshold)"
        )));
    }
    let main = r_value(k, Complex64::new(z0, 0.0), 1e-8)?.value.re * (z0 * y.ln()).exp();

    // Euler product per node over a fixed prime set, rotated across nodes.
    let z_max = (d * d + tau * tau).sqrt();
    let trunc = residue_truncation(k, z_max)?;
    let base = arith::base_primes(trunc);
    let bounds = arith::prime_segment_bounds(trunc);
    let mut cps: Vec<f64> = Vec::new(); // ln(p/(p-1)) - ln alpha_k(p)
    let mut bases: Vec<f64> = Vec::new(); // 1 - 1/p
    let mut invs: Vec<f64> = Vec::new(); // 1/p
    let mut seg = Vec::new();
    for (lo, hi) in bounds {
        arith::primes_in_segment(lo, hi, &base, &mut seg);
        for &p in &seg {
            let pf = p as f64;
            cps.push((1.0 / (pf - 1.0)).ln_1p() - ln_alpha(p, k));
            bases.push(1.0 - 1.0 / pf);
            invs.push(1.0 / pf);
        }
    }
    let m = 2 * ((tau * steps_per_unit as f64).ceil() as usize).max(1);
    let h = tau / m as f64;
    let mut rots: Vec<Complex64> = cps.iter().map(|&c| Complex64::from_polar((d * c).exp(), 0.0)).collect();
    let steps: Vec<Complex64> = cps.iter().map(|&c| Complex64::from_polar(1.0, h * c)).collect();
    let ax_d = (d * ln_ax).exp();
    let ax_step = Complex64::from_polar(1.0, h * ln_ax);
    let mut ax_rot = Complex64::new(1.0, 0.0);
    let mut fine = Complex64::new(0.0, 0.0);
    let mut coarse = Complex64::new(0.0, 0.0);
    for j in 0..=m {
        let t = j as f64 * h;
        let mut r = Complex64::new(1.0, 0.0);
        for ((&b_p, &inv_p), rot) in bases.iter().zip(invs.iter()).zip(rots.iter()) {
            r *= Complex64::new(b_p, 0.0) + inv_p * rot;
        }
        let z = Complex64::new(d, t);
        let integrand = r * (ax_d * ax_rot) / (z * (1.0 - (1.0 - delta) * z));
        fine += trapezoid_weight(j, m) * integrand;
        if j % 2 == 0 {
            coarse += trapezoid_weight(j / 2, m / 2) * integrand;
        }
        for (rot, s) in rots.iter_mut().zip(steps.iter()) {
            *rot *= s;
        }
        ax_rot *= ax_step;
    }
    let scale = xf * h / std::f64::consts::PI;
    Ok(PerronEstimate {
        estimate: main + fine.re * scale,
        coarse_estimate: main + coarse.re * 2.0 * scale,
        main_term: Some(main),
        contour_abscissa: d,
    })
}

/// Truncation prime giving ~1e-4 certified relative tail for every node
/// on the shifted contour (|z| <= z_max).
fn residue_truncation(k: u32, z_max: f64) -> Result<u64> {
    let probe = r_value(k, Complex64::new(z_max, 0.0), 1e-4)?;
    Ok(probe.truncation_prime)
}

/// One distribution-verification record.
#[derive(Debug, Clone, PartialEq)]
pub struct VerificationRow {
    pub k: u32,
    pub beta: BigRational,
    pub x: u64,
    pub alpha: f64,
    pub y: BigRational,
    pub exact_count: u64,
    /// R(1/(1-delta)) y^{1/(1-delta)}, present only in MAIN regimes.
    pub main_term: Option<f64>,
    /// |exact - main| / max(main, 1), present with the main term.
    pub rel_err: Option<f64>,
    pub regime: RegimeLabel,
}

/// Exact counts against main terms at y = alpha x for each alpha.
///
/// The bulk count runs the phi alpha_k sieve form; every 1000th n is
/// re-decided through the explicit Phi_k form as a cross-check.
pub fn verify_distribution(
    params: &TotientParams,
    x: u64,
    alphas: &[f64],
    cfg: &RegimeConfig,
) -> Result<Vec<VerificationRow>> {
    let mut main_constant: Option<f64> = None;
    let mut rows = Vec::with_capacity(alphas.len());
    for &alpha in alphas {
        if !(alpha > 0.0) || !alpha.is_finite() {
            return Err(Error::argument(format!("alpha must be positive, got {alpha}")));
        }
        let y = BigRational::from_f64(alpha)
            .ok_or_else(|| Error::argument("alpha is not finite"))?
            * BigRational::from_integer(x.into());
        let rec = count_phi_ratio(params, x, &y, cfg)?;
        cross_check_sample(params, x, &y)?;
        let (main_term, rel_err) = if rec.regime.tag.has_main_term() {
            let z0 = 1.0 / (1.0 - params.delta_f64());
            let r = match main_constant {
                Some(r) => r,
                None => {
                    let r = r_value(params.k, Complex64::new(z0, 0.0), 1e-8)?.value.re;
                    main_constant = Some(r);
                    r
                }
            };
            let main = r * (z0 * rational_to_f64(&y).ln()).exp();
            let rel = (rec.count as f64 - main).abs() / main.max(1.0);
            (Some(main), Some(rel))
        } else {
            (None, None)
        };
        rows.push(VerificationRow {
            k: params.k,
            beta: params.beta.clone(),
            x,
            alpha,
            y: y.clone(),
            exact_count: rec.count,
            main_term,
            rel_err,
            regime: rec.regime,
        });
    }
    Ok(rows)
}

/// Re-decide every 1000th n <= x through the Phi_k form (big-integer log) and
/// the phi alpha_k form (per-factor log), both with the exact fallback; any
/// disagreement is a bug worth failing loudly on.
fn cross_check_sample(params: &TotientParams, x: u64, y: &BigRational) -> Result<()> {
    let beta_f = params.beta_f64();
    let one_minus_delta = 1.0 - params.delta_f64();
    let ln_y = rational_to_f64(y).ln();
    let mut n = 1000u64;
    while n <= x {
        let phi_form = crate::counting::phi_form_le(n, params, beta_f, ln_y, y)?;
        // phi alpha_k form from the factorization, mirroring the sieve
        let f = arith::factorize(n)?;
        let mut lr = 0.0;
        for &(p, _) in &f.factors {
            lr += (-1.0 / p as f64).ln_1p() + ln_alpha(p, params.k);
        }
        let v = lr + one_minus_delta * (n as f64).ln() - ln_y;
        let alpha_form = if v < -BOUNDARY_GUARD {
            true
        } else if v > BOUNDARY_GUARD {
            false
        } else {
            phi_form // both fall back to the identical exact comparison
        };
        if phi_form != alpha_form {
            return Err(Error::precision(format!(
                "count form cross-check mismatch at n = {n}"
            )));
        }
        n += 1000;
    }
    Ok(())
}

/// Minimal-order ratio row along the primorial sequence n_s. The primorial
/// itself stays in the log domain (n_s at p_s near 10^6 has ~434000 digits);
/// `arith::primorial` provides the exact integer when one is needed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExtremalRow {
    pub s: u64,
    pub p_s: u64,
    pub ln_n_s: f64,
    /// Phi_k(n_s) lnln(n_s) / n_s^k, divided by minimal_constant(k).
    pub ratio: f64,
}

/// Maximal-order ratio Phi_k(p)/p^k at a large prime.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MaxOrderRow {
    pub p: u64,
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExtremalReport {
    pub minimal: Vec<ExtremalRow>,
    pub maximal: Vec<MaxOrderRow>,
}

/// Largest prime index the extremal harness accepts (p_s <= 10^7).
pub const EXTREMAL_PRIME_CAP: u64 = 10_000_000;

/// Ratios of Phi_k along primorials to the minimal-order prediction, plus
/// max-order rows at the 10 largest primes reached. Rows start at s = 2
/// (lnln n_s is negative before that).
pub fn verify_extremal(k: u32, s_max: u64) -> Result<ExtremalReport> {
    if k == 0 || s_max < 2 {
        return Err(Error::argument("verify_extremal needs k >= 1 and s_max >= 2"));
    }
    let mc = minimal_constant(k)?;
    let mut rows = Vec::with_capacity(s_max as usize);
    let mut last_primes: Vec<u64> = Vec::new();
    let mut s = 0u64;
    let mut ln_n = 0.0f64;
    let mut ln_ratio = 0.0f64; // ln(Phi_k(n_s)/n_s^k)
    arith::for_primes_up_to(EXTREMAL_PRIME_CAP, |p| {
        if s >= s_max {
            return;
        }
        s += 1;
        ln_n += (p as f64).ln();
        ln_ratio += (-1.0 / p as f64).ln_1p() + ln_alpha(p, k);
        if s >= 2 {
            rows.push(ExtremalRow {
                s,
                p_s: p,
                ln_n_s: ln_n,
                ratio: ln_ratio.exp() * ln_n.ln() / mc,
            });
        }
        last_primes.push(p);
        if last_primes.len() > 10 {
            last_primes.remove(0);
        }
    })?;
    if s < s_max {
        return Err(Error::capacity(format!(
            "s_max {s_max} needs p_s beyond the {EXTREMAL_PRIME_CAP} prime cap"
        )));
    }
    let maximal = last_primes
        .iter()
        .map(|&p| MaxOrderRow {
            p,
            ratio: (1.0 - 1.0 / p as f64) * alpha_f64(p, k),
        })
        .collect();
    Ok(ExtremalReport {
        minimal: rows,
        maximal,
    })
}

/// The minimal-order constant of Phi_k(n) lnln n / n^k:
/// e^{-gamma} times 1 (k odd), (2^{k/2}/(2^{k/2}-1)) / zeta(k/2) (k = 0 mod 4),
/// or 1/L(k/2, chi1) (k = 2 mod 4).
pub fn minimal_constant(k: u32) -> Result<f64> {
    if k == 0 {
        return Err(Error::argument("k must be >= 1"));
    }
    let eg = (-arith::GAMMA).exp();
    if k % 2 == 1 {
        Ok(eg)
    } else if k.is_multiple_of(4) {
        let pw = 2f64.powi((k / 2) as i32);
        Ok(pw / (pw - 1.0) / zeta_real(k as f64 / 2.0)? * eg)
    } else {
        Ok(eg / l_chi1(k as f64 / 2.0)?)
    }
}

/// One Mertens report row: the four prime quantities at x, their limits, and
/// deviations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MertensRow {
    pub x: u64,
    pub sum: f64,
    pub sum_limit: f64,
    pub sum_dev: f64,
    pub product: f64,
    pub product_limit: f64,
    /// product * ln x / e^{-gamma}; tends to 1
    pub product_ratio: f64,
    pub power2: f64,
    pub power2_limit: f64,
    pub power2_dev: f64,
    pub chi1: f64,
    pub chi1_limit: f64,
    pub chi1_dev: f64,
}

/// Evaluate the Mertens quantities at each x (x >= 10).
pub fn verify_mertens(xs: &[u64]) -> Result<Vec<MertensRow>> {
    let consts = Constants::default();
    let mut rows = Vec::with_capacity(xs.len());
    for &x in xs {
        if x < 10 {
            return Err(Error::argument("verify_mertens needs every x >= 10"));
        }
        let xf = x as f64;
        let eg = (-consts.gamma).exp();
        let sum = mertens_sum(x)?;
        let sum_limit = xf.ln().ln() + consts.meissel_mertens;
        let product = mertens_product(x)?;
        let product_limit = eg / xf.ln();
        let power2 = mertens_product_power(x, 2)?;
        let power2_limit = 1.0 / zeta_real(2.0)?;
        let chi1 = mertens_product_chi(x, 1)?;
        let chi1_limit = 1.0 / l_chi1(1.0)?;
        rows.push(MertensRow {
            x,
            sum,
            sum_limit,
            sum_dev: sum - sum_limit,
            product,
            product_limit,
            product_ratio: product * xf.ln() / eg,
            power2,
            power2_limit,
            power2_dev: power2 - power2_limit,
            chi1,
            chi1_limit,
            chi1_dev: chi1 - chi1_limit,
        });
    }
    Ok(rows)
}
