//! Radius functionals: the data-independent squared radius paired with each
//! subspace test, for exactly known variance and for variance known only up
//! to an interval.
//!
//! The nonzero-dimension radius is a supremum over noncentralities of
//! `z + q_{0,D}(β_m / ψ(z) ∧ 1)` (unit variance), where `ψ(z)` is the
//! acceptance probability of the residual test at noncentrality `z`. The
//! zero-dimension radius is the root of `ψ(z) = β_m`, and the full-model
//! radius is the plain quantile `q_{0,n}(β_n)`.

use rayon::prelude::*;

use crate::distributions::{
    chi2_quantile, chi2_quantile_or_neg_inf, FixedPointCdf, NoncentralChi2, QuantileValue,
};
use crate::error::{Error, Result};

/// Points in the dense scan of the noncentrality axis before refinement.
const Z_GRID: usize = 512;
/// Points in the scan of the variance interval before refinement.
const S_GRID: usize = 64;
const INVPHI: f64 = 0.618_033_988_749_894_8;

/// Prior knowledge about the noise variance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum VarianceSpec {
    /// Exactly known variance σ² > 0.
    Known(f64),
    /// σ² known to lie in the interval [(1 − η)τ², τ²], with η ∈ [0, 1).
    Interval { tau2: f64, eta: f64 },
}

impl VarianceSpec {
    pub fn known(sigma2: f64) -> Result<Self> {
        if !sigma2.is_finite() || sigma2 <= 0.0 {
            return Err(Error::Domain(format!("variance must be finite and > 0, got {sigma2}")));
        }
        Ok(VarianceSpec::Known(sigma2))
    }

    pub fn interval(tau2: f64, eta: f64) -> Result<Self> {
        if !tau2.is_finite() || tau2 <= 0.0 {
            return Err(Error::Domain(format!("τ² must be finite and > 0, got {tau2}")));
        }
        if !eta.is_finite() || !(0.0..1.0).contains(&eta) {
            return Err(Error::Domain(format!("η must lie in [0, 1), got {eta}")));
        }
        Ok(VarianceSpec::Interval { tau2, eta })
    }

    /// Upper endpoint of the variance interval (σ² itself when known).
    pub fn tau2(&self) -> f64 {
        match *self {
            VarianceSpec::Known(s) => s,
            VarianceSpec::Interval { tau2, .. } => tau2,
        }
    }

    /// Relative width of the variance interval (0 when known).
    pub fn eta(&self) -> f64 {
        match *self {
            VarianceSpec::Known(_) => 0.0,
            VarianceSpec::Interval { eta, .. } => eta,
        }
    }
}

/// Per-model inputs for one radius evaluation. `dim + n_resid = n`.
#[derive(Debug, Clone, Copy)]
pub struct RadiusInputs {
    pub dim: u32,
    pub n_resid: u32,
    pub alpha: f64,
    pub beta_m: f64,
    pub variance: VarianceSpec,
}

impl RadiusInputs {
    pub fn new(
        dim: u32,
        n_resid: u32,
        alpha: f64,
        beta_m: f64,
        variance: VarianceSpec,
    ) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(Error::Domain(format!("α must lie in (0, 1), got {alpha}")));
        }
        if !(beta_m > 0.0 && beta_m < 1.0) {
            return Err(Error::Domain(format!("β_m must lie in (0, 1), got {beta_m}")));
        }
        Ok(Self {
            dim,
            n_resid,
            alpha,
            beta_m,
            variance,
        })
    }
}

/// Acceptance probability of the residual χ² test as a function of the
/// noncentrality: `ψ(z) = χ²_{z,N}(q_{0,N}(α) · r)` with `r = τ²/σ² >= 1`.
///
/// Strictly decreasing and continuous in `z`, with `ψ(0) = 1 - α` at `r = 1`.
/// The evaluation point is fixed at construction, so repeated evaluations
/// share the underlying central-CDF components.
#[derive(Debug)]
pub struct PsiFn {
    cdf: FixedPointCdf,
    threshold: f64,
}

impl PsiFn {
    pub fn new(n_resid: u32, alpha: f64, sigma_ratio2: f64) -> Result<Self> {
        if n_resid < 1 {
            return Err(Error::Domain(format!("ψ requires N >= 1, got {n_resid}")));
        }
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(Error::Domain(format!("α must lie in (0, 1), got {alpha}")));
        }
        if !sigma_ratio2.is_finite() || sigma_ratio2 < 1.0 {
            return Err(Error::Domain(format!("τ²/σ² must be >= 1, got {sigma_ratio2}")));
        }
        let q = chi2_quantile(alpha, &NoncentralChi2::central(n_resid))?;
        let threshold = q * sigma_ratio2;
        Ok(Self {
            cdf: FixedPointCdf::new(threshold, n_resid)?,
            threshold,
        })
    }

    /// The test threshold `q_{0,N}(α) · τ²/σ²` (unit variance scale).
    pub fn threshold(&self) -> f64 {
        self.threshold
    }

    pub fn eval(&self, z: f64) -> Result<f64> {
        self.cdf.eval(z)
    }
}

/// One-shot evaluation of ψ; loops should construct a [`PsiFn`] instead.
pub fn psi(z: f64, n_resid: u32, alpha: f64, sigma_ratio2: f64) -> Result<f64> {
    PsiFn::new(n_resid, alpha, sigma_ratio2)?.eval(z)
}

/// Closed-form cap on the root of `ψ(z) = β_m`:
/// `2Nη + 4√N(√L_m + √L_α) + 8L_m + 4L_α` with `L_m = log(1/β_m)`,
/// `L_α = log(1/α)` and `η = 1 - σ²/τ²`.
pub fn z_search_cap(n_resid: u32, alpha: f64, beta_m: f64, sigma_ratio2: f64) -> Result<f64> {
    if !(alpha > 0.0 && alpha < 1.0) || !(beta_m > 0.0 && beta_m < 1.0) {
        return Err(Error::Domain(format!(
            "levels must lie in (0, 1), got α = {alpha}, β_m = {beta_m}"
        )));
    }
    if !sigma_ratio2.is_finite() || sigma_ratio2 < 1.0 {
        return Err(Error::Domain(format!("τ²/σ² must be >= 1, got {sigma_ratio2}")));
    }
    let n = n_resid as f64;
    let lm = (1.0 / beta_m).ln();
    let la = (1.0 / alpha).ln();
    let eta_eff = (1.0 - 1.0 / sigma_ratio2).max(0.0);
    Ok(2.0 * n * eta_eff + 4.0 * n.sqrt() * (lm.sqrt() + la.sqrt()) + 8.0 * lm + 4.0 * la)
}

/// Root of `ψ(z) = β_m`: the right endpoint of the noncentrality interval on
/// which the test still accepts with probability above `β_m`.
///
/// Requires `β_m < 1 - α` so the root exists. Bisection on `[0, cap]` with
/// the cap from [`z_search_cap`] inflated 4×, re-inflated on bracket failure.
pub fn z_bar(n_resid: u32, alpha: f64, beta_m: f64, sigma_ratio2: f64) -> Result<f64> {
    let psi = PsiFn::new(n_resid, alpha, sigma_ratio2)?;
    z_bar_with(&psi, n_resid, alpha, beta_m, sigma_ratio2)
}

fn z_bar_with(
    psi: &PsiFn,
    n_resid: u32,
    alpha: f64,
    beta_m: f64,
    sigma_ratio2: f64,
) -> Result<f64> {
    if !(beta_m > 0.0 && beta_m < 1.0 - alpha) {
        return Err(Error::Domain(format!(
            "root of ψ requires 0 < β_m < 1 - α, got β_m = {beta_m}, α = {alpha}"
        )));
    }
    let cap = z_search_cap(n_resid, alpha, beta_m, sigma_ratio2)?;
    let mut hi = cap * 4.0;
    let mut tries = 0;
    while psi.eval(hi)? > beta_m {
        hi *= 4.0;
        tries += 1;
        if tries > 3 {
            return Err(Error::Bracket(format!(
                "ψ({hi}) > β_m = {beta_m} after inflation retries (N = {n_resid}, α = {alpha}); \
                 inputs are inconsistent"
            )));
        }
    }
    let mut lo = 0.0;
    for _ in 0..500 {
        let mid = 0.5 * (lo + hi);
        let c = psi.eval(mid)?;
        if (c - beta_m).abs() <= 1e-12 * beta_m {
            return Ok(mid);
        }
        if c > beta_m {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-11 * (1.0 + mid) {
            return Ok(0.5 * (lo + hi));
        }
    }
    Err(Error::Convergence(format!(
        "bisection for the root of ψ failed (N = {n_resid}, β_m = {beta_m})"
    )))
}

fn golden_max<F: Fn(f64) -> Result<f64>>(f: F, mut a: f64, mut b: f64, xtol: f64) -> Result<f64> {
    let mut x1 = b - INVPHI * (b - a);
    let mut x2 = a + INVPHI * (b - a);
    let mut f1 = f(x1)?;
    let mut f2 = f(x2)?;
    let mut best = f1.max(f2);
    while b - a > xtol {
        if f1 >= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - INVPHI * (b - a);
            f1 = f(x1)?;
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + INVPHI * (b - a);
            f2 = f(x2)?;
        }
        best = best.max(f1).max(f2);
    }
    Ok(best)
}

/// Unit-variance squared radius at threshold ratio `r = τ²/σ²`.
///
/// `dim = 0`: root of `ψ(z) = β_m`. `dim >= 1`: supremum over `z ∈ [0, z̄]` of
/// `z + q_{0,D}(β_m/ψ(z) ∧ 1)`, candidates outside the acceptance interval
/// being negative infinity; the boundary limit `z̄` is always a candidate.
/// Dense grid, then golden-section refinement around the best bracket; the
/// result is floored at the grid maximum.
fn rho_sq_unit(dim: u32, n_resid: u32, alpha: f64, beta_m: f64, sigma_ratio2: f64) -> Result<f64> {
    let psi = PsiFn::new(n_resid, alpha, sigma_ratio2)?;
    let zbar = z_bar_with(&psi, n_resid, alpha, beta_m, sigma_ratio2)?;
    if dim == 0 {
        return Ok(zbar);
    }

    let d = NoncentralChi2::central(dim);
    let g = |z: f64| -> Result<f64> {
        let pz = psi.eval(z)?;
        let level = (beta_m / pz).min(1.0);
        match chi2_quantile_or_neg_inf(level, &d)? {
            QuantileValue::NegInfinity => Ok(f64::NEG_INFINITY),
            QuantileValue::Finite(q) => Ok(z + q),
        }
    };

    let step = zbar / (Z_GRID - 1) as f64;
    let mut vals = Vec::with_capacity(Z_GRID);
    for i in 0..Z_GRID {
        if i + 1 == Z_GRID {
            // limit of the objective as z -> z̄ from below
            vals.push(zbar);
        } else {
            vals.push(g(i as f64 * step)?);
        }
    }
    let (best_idx, &grid_best) = vals
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .expect("grid is nonempty");

    let lo = step * best_idx.saturating_sub(1) as f64;
    let hi = (step * (best_idx + 1) as f64).min(zbar);
    let refined = golden_max(&g, lo, hi, 1e-8 * (1.0 + zbar))?;
    Ok(grid_best.max(refined))
}

/// Squared radius for exactly known variance.
///
/// Full model: `q_{0,n}(β_n)·σ²` (`dim = n`, `n_resid = 0`). `dim = 0`: the
/// ψ-root times σ². Otherwise the supremum form times σ².
pub fn rho_sq_known(inputs: &RadiusInputs, is_full_model: bool) -> Result<f64> {
    let sigma2 = match inputs.variance {
        VarianceSpec::Known(s) => s,
        VarianceSpec::Interval { .. } => {
            return Err(Error::Domain(
                "rho_sq_known requires a Known variance spec".into(),
            ))
        }
    };
    rho_sq_with_tau2(inputs, is_full_model, sigma2, 0.0)
}

/// Squared radius when only `σ² ∈ [(1 − η)τ², τ²]` is known.
///
/// Outer maximization over `σ² = s·τ²` on a grid of `s ∈ [1 − η, 1]` with
/// golden-section refinement; each inner problem is the known-variance solve
/// at threshold ratio `1/s`. `η = 0` reproduces the known-variance value
/// exactly, and the full-model radius `q_{0,n}(β_n)τ²` does not depend on η.
pub fn rho_sq_interval(inputs: &RadiusInputs, is_full_model: bool) -> Result<f64> {
    let (tau2, eta) = match inputs.variance {
        VarianceSpec::Interval { tau2, eta } => (tau2, eta),
        VarianceSpec::Known(_) => {
            return Err(Error::Domain(
                "rho_sq_interval requires an Interval variance spec".into(),
            ))
        }
    };
    rho_sq_with_tau2(inputs, is_full_model, tau2, eta)
}

/// Dispatch on the variance spec.
pub fn rho_sq(inputs: &RadiusInputs, is_full_model: bool) -> Result<f64> {
    match inputs.variance {
        VarianceSpec::Known(_) => rho_sq_known(inputs, is_full_model),
        VarianceSpec::Interval { .. } => rho_sq_interval(inputs, is_full_model),
    }
}

fn rho_sq_with_tau2(
    inputs: &RadiusInputs,
    is_full_model: bool,
    tau2: f64,
    eta: f64,
) -> Result<f64> {
    if is_full_model {
        if inputs.n_resid != 0 || inputs.dim == 0 {
            return Err(Error::Domain(format!(
                "full model requires N = 0 and D = n >= 1, got D = {}, N = {}",
                inputs.dim, inputs.n_resid
            )));
        }
        let q = chi2_quantile(inputs.beta_m, &NoncentralChi2::central(inputs.dim))?;
        return Ok(q * tau2);
    }
    if inputs.n_resid == 0 {
        return Err(Error::Domain(
            "non-full model requires N >= 1 (declare the full model explicitly)".into(),
        ));
    }
    if eta == 0.0 {
        return Ok(tau2 * rho_sq_unit(inputs.dim, inputs.n_resid, inputs.alpha, inputs.beta_m, 1.0)?);
    }

    let value_at = |s: f64| -> Result<f64> {
        Ok(s * tau2
            * rho_sq_unit(
                inputs.dim,
                inputs.n_resid,
                inputs.alpha,
                inputs.beta_m,
                1.0 / s,
            )?)
    };

    let s_lo = 1.0 - eta;
    let s_step = eta / (S_GRID - 1) as f64;
    let vals: Vec<f64> = (0..S_GRID)
        .into_par_iter()
        .map(|i| value_at((s_lo + i as f64 * s_step).min(1.0)))
        .collect::<Result<_>>()?;
    let (best_idx, &grid_best) = vals
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .expect("grid is nonempty");

    let lo = s_lo + s_step * best_idx.saturating_sub(1) as f64;
    let hi = (s_lo + s_step * (best_idx + 1) as f64).min(1.0);
    let refined = golden_max(&value_at, lo, hi, 1e-7 * eta)?;
    Ok(grid_best.max(refined))
}

/// Element-wise radius evaluation for a family given as `(D, N, β_m)` rows;
/// a row with `N = 0` is the full model. Order is preserved and the result is
/// independent of evaluation order.
pub fn radius_table(
    family_dims: &[(u32, u32, f64)],
    alpha: f64,
    variance: &VarianceSpec,
) -> Result<Vec<f64>> {
    family_dims
        .par_iter()
        .map(|&(dim, n_resid, beta_m)| {
            let inputs = RadiusInputs::new(dim, n_resid, alpha, beta_m, *variance)?;
            rho_sq(&inputs, n_resid == 0)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn known(sigma2: f64) -> VarianceSpec {
        VarianceSpec::known(sigma2).unwrap()
    }

    #[test]
    fn psi_at_zero_is_one_minus_alpha() {
        assert_abs_diff_eq!(psi(0.0, 995, 0.2, 1.0).unwrap(), 0.8, epsilon = 1e-9);
        assert_abs_diff_eq!(psi(0.0, 10, 0.05, 1.0).unwrap(), 0.95, epsilon = 1e-9);
    }

    #[test]
    fn psi_decreasing_and_vanishing() {
        let f = PsiFn::new(10, 0.2, 1.0).unwrap();
        let mut prev = f64::INFINITY;
        for z in [0.0, 1.0, 5.0, 20.0, 80.0] {
            let v = f.eval(z).unwrap();
            assert!(v < prev);
            prev = v;
        }
        // beyond the root, ψ is below any admissible β_m
        let zb = z_bar(10, 0.2, 0.05, 1.0).unwrap();
        assert!(f.eval(zb + 10.0).unwrap() < 0.05);
    }

    #[test]
    fn psi_table1_m2_value() {
        // ψ(z̄) = 0.05 at z̄ ≈ 117.7, so ψ(119) is just below 0.05.
        let v = psi(119.0, 995, 0.2, 1.0).unwrap();
        assert!((v - 0.05).abs() < 0.005, "ψ(119) = {v}");
    }

    #[test]
    fn z_bar_reference_and_well_posedness() {
        let zb = z_bar(995, 0.2, 0.05, 1.0).unwrap();
        // Independent reference (scipy brentq): 117.665094
        assert_abs_diff_eq!(zb, 117.665_094, epsilon = 1e-3);
        assert!((117.0..=121.0).contains(&zb));

        let f = PsiFn::new(995, 0.2, 1.0).unwrap();
        assert!((f.eval(zb).unwrap() - 0.05).abs() <= 1e-10);
        assert!(f.eval(zb - 1e-6).unwrap() > 0.05);
        assert!(f.eval(zb + 1e-6).unwrap() < 0.05);
    }

    #[test]
    fn z_bar_degenerate_level() {
        // β_m just below 1 - α pushes the root to 0.
        let zb = z_bar(100, 0.2, 0.8 - 1e-9, 1.0).unwrap();
        assert!(zb < 1e-3, "z̄ = {zb}");
        assert!(z_bar(100, 0.2, 0.8, 1.0).is_err());
    }

    #[test]
    fn z_bar_grows_with_threshold_ratio() {
        let z1 = z_bar(995, 0.2, 0.05, 1.0).unwrap();
        let z2 = z_bar(995, 0.2, 0.05, 1.0 / (1.0 - 0.01)).unwrap();
        assert!(z2 > z1);
        // Independent reference (scipy brentq): 128.820990
        assert_abs_diff_eq!(z2, 128.820_990, epsilon = 1e-2);
    }

    #[test]
    fn search_cap_exceeds_root() {
        for (n_resid, alpha, beta_m) in
            [(995u32, 0.2, 0.05), (1000, 0.2, 0.1), (967, 0.2, 0.0125), (995, 0.01, 0.005)]
        {
            let cap = z_search_cap(n_resid, alpha, beta_m, 1.0).unwrap();
            let f = PsiFn::new(n_resid, alpha, 1.0).unwrap();
            assert!(
                f.eval(cap).unwrap() < beta_m,
                "cap not past the root for N={n_resid}, α={alpha}, β={beta_m}"
            );
        }
    }

    #[test]
    fn rho_full_model_table1() {
        let inputs = RadiusInputs::new(1000, 0, 0.2, 0.1 / 256.0, known(1.0)).unwrap();
        let r = rho_sq_known(&inputs, true).unwrap();
        assert_abs_diff_eq!(r / 1000.0, 1.157, epsilon = 0.003);
    }

    #[test]
    fn rho_m2_table1() {
        let inputs = RadiusInputs::new(5, 995, 0.2, 0.05, known(1.0)).unwrap();
        let r = rho_sq_known(&inputs, false).unwrap();
        assert_abs_diff_eq!(r / 1000.0, 0.118, epsilon = 0.003);
    }

    #[test]
    fn rho_m2_alpha_sensitivity_oracle() {
        // Independent reference (scipy grid + bounded refinement):
        // 127.5280 at α = 0.15 and 139.6209 at α = 0.10.
        let inputs = RadiusInputs::new(5, 995, 0.15, 0.05, known(1.0)).unwrap();
        assert_abs_diff_eq!(rho_sq_known(&inputs, false).unwrap(), 127.528, epsilon = 0.05);
        let inputs = RadiusInputs::new(5, 995, 0.10, 0.05, known(1.0)).unwrap();
        assert_abs_diff_eq!(rho_sq_known(&inputs, false).unwrap(), 139.621, epsilon = 0.05);
    }

    #[test]
    fn rho_dim_zero_is_psi_root() {
        let inputs = RadiusInputs::new(0, 1000, 0.2, 0.1, known(1.0)).unwrap();
        let r = rho_sq_known(&inputs, false).unwrap();
        // Independent reference (scipy brentq): 99.717157
        assert_abs_diff_eq!(r, 99.717_157, epsilon = 1e-2);
        assert_abs_diff_eq!(r, z_bar(1000, 0.2, 0.1, 1.0).unwrap(), epsilon = 1e-6);
    }

    #[test]
    fn rho_scales_with_variance() {
        let a = rho_sq_known(
            &RadiusInputs::new(5, 995, 0.2, 0.05, known(1.0)).unwrap(),
            false,
        )
        .unwrap();
        let b = rho_sq_known(
            &RadiusInputs::new(5, 995, 0.2, 0.05, known(2.5)).unwrap(),
            false,
        )
        .unwrap();
        assert_abs_diff_eq!(b, 2.5 * a, epsilon = 1e-9 * b.abs());
    }

    #[test]
    fn rho_dominates_zero_noncentrality_term() {
        // The z = 0 candidate is q_{0,D}(β_m/(1-α)); the supremum can only
        // be larger.
        let inputs = RadiusInputs::new(5, 995, 0.2, 0.05, known(1.0)).unwrap();
        let r = rho_sq_known(&inputs, false).unwrap();
        let level = 0.05 / psi(0.0, 995, 0.2, 1.0).unwrap();
        let q0 = chi2_quantile(level, &NoncentralChi2::central(5)).unwrap();
        assert!(r >= q0);
        // and it dominates the plain β_m-quantile of the D-dimensional χ²
        let qb = chi2_quantile(0.05, &NoncentralChi2::central(5)).unwrap();
        assert!(r >= qb);
    }

    #[test]
    fn interval_eta_zero_matches_known() {
        let k = RadiusInputs::new(5, 995, 0.2, 0.05, known(1.0)).unwrap();
        let i = RadiusInputs::new(
            5,
            995,
            0.2,
            0.05,
            VarianceSpec::interval(1.0, 0.0).unwrap(),
        )
        .unwrap();
        let rk = rho_sq_known(&k, false).unwrap();
        let ri = rho_sq_interval(&i, false).unwrap();
        assert!((rk - ri).abs() <= 1e-12 * rk);
    }

    #[test]
    fn interval_grows_with_eta() {
        // Independent reference (scipy): 167.2194 at η = 0.05.
        let mut prev = 0.0;
        for eta in [0.0, 0.02, 0.05] {
            let inputs = RadiusInputs::new(
                5,
                995,
                0.2,
                0.05,
                VarianceSpec::interval(1.0, eta).unwrap(),
            )
            .unwrap();
            let r = rho_sq_interval(&inputs, false).unwrap();
            assert!(r >= prev, "η = {eta}: {r} < {prev}");
            prev = r;
        }
        let inputs = RadiusInputs::new(
            5,
            995,
            0.2,
            0.05,
            VarianceSpec::interval(1.0, 0.05).unwrap(),
        )
        .unwrap();
        assert_abs_diff_eq!(rho_sq_interval(&inputs, false).unwrap(), 167.219, epsilon = 0.1);
    }

    #[test]
    fn full_model_radius_ignores_eta() {
        let a = rho_sq_interval(
            &RadiusInputs::new(100, 0, 0.2, 0.05, VarianceSpec::interval(1.0, 0.0).unwrap())
                .unwrap(),
            true,
        )
        .unwrap();
        let b = rho_sq_interval(
            &RadiusInputs::new(100, 0, 0.2, 0.05, VarianceSpec::interval(1.0, 0.15).unwrap())
                .unwrap(),
            true,
        )
        .unwrap();
        assert_eq!(a, b);
        let q = chi2_quantile(0.05, &NoncentralChi2::central(100)).unwrap();
        assert_abs_diff_eq!(a, q, epsilon = 1e-12);
    }

    #[test]
    fn table_empty_and_single_full() {
        let v = radius_table(&[], 0.2, &known(1.0)).unwrap();
        assert!(v.is_empty());
        let v = radius_table(&[(50, 0, 0.1)], 0.2, &known(2.0)).unwrap();
        assert_eq!(v.len(), 1);
        let q = chi2_quantile(0.1, &NoncentralChi2::central(50)).unwrap();
        assert_abs_diff_eq!(v[0], 2.0 * q, epsilon = 1e-12);
    }

    #[test]
    fn mismatched_variance_spec_rejected() {
        let k = RadiusInputs::new(5, 995, 0.2, 0.05, known(1.0)).unwrap();
        assert!(rho_sq_interval(&k, false).is_err());
        let i = RadiusInputs::new(
            5,
            995,
            0.2,
            0.05,
            VarianceSpec::interval(1.0, 0.1).unwrap(),
        )
        .unwrap();
        assert!(rho_sq_known(&i, false).is_err());
    }
}
