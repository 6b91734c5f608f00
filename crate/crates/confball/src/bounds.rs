//! Closed-form envelopes for squared radii: explicit-constant upper bounds,
//! minimax lower bounds with their admissibility hypotheses, and the
//! subset-count bound behind the dimensional level allocation.

use crate::distributions::ln_binomial;
use crate::error::{Error, Result};

/// Admissibility threshold for the dimension branch of the lower bound.
fn claim_dim_level() -> f64 {
    1.0 - (-1.0f64 / 36.0).exp()
}

/// Admissibility threshold for the residual branches of the lower bound.
fn claim_resid_level() -> f64 {
    1.0 - (-0.25f64).exp()
}

/// Log-level constants entering the closed-form bounds.
///
/// `l1` is defined only when `α + β < 1`; `l2`/`l3` only when `α + 2β < 1`.
#[derive(Debug, Clone, Copy)]
pub struct BoundConstants {
    /// log(1/β_m)
    pub l_m: f64,
    /// log(1/α)
    pub l_alpha: f64,
    /// -4·log(1 - α - β)/81
    pub l1: Option<f64>,
    /// 2·log(1 + 4(1 - α - 2β)²)
    pub l2: Option<f64>,
    /// -log(1 - α - 2β)
    pub l3: Option<f64>,
}

impl BoundConstants {
    pub fn new(alpha: f64, beta_m: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 1.0) || !(beta_m > 0.0 && beta_m < 1.0) {
            return Err(Error::Domain(format!(
                "levels must lie in (0, 1), got α = {alpha}, β = {beta_m}"
            )));
        }
        let l1 = (alpha + beta_m < 1.0).then(|| -4.0 * (1.0 - alpha - beta_m).ln() / 81.0);
        let (l2, l3) = if alpha + 2.0 * beta_m < 1.0 {
            let w = 1.0 - alpha - 2.0 * beta_m;
            (Some(2.0 * (1.0 + 4.0 * w * w).ln()), Some(-w.ln()))
        } else {
            (None, None)
        };
        Ok(Self {
            l_m: (1.0 / beta_m).ln(),
            l_alpha: (1.0 / alpha).ln(),
            l1,
            l2,
            l3,
        })
    }
}

fn check_common(eta: f64, alpha: f64, beta: f64, tau2: f64) -> Result<()> {
    if !(alpha > 0.0 && alpha < 1.0) || !(beta > 0.0 && beta < 1.0) {
        return Err(Error::Domain(format!(
            "levels must lie in (0, 1), got α = {alpha}, β = {beta}"
        )));
    }
    if !eta.is_finite() || !(0.0..1.0).contains(&eta) {
        return Err(Error::Domain(format!("η must lie in [0, 1), got {eta}")));
    }
    if !tau2.is_finite() || tau2 <= 0.0 {
        return Err(Error::Domain(format!("τ² must be finite and > 0, got {tau2}")));
    }
    Ok(())
}

/// Explicit upper bound on the squared radius.
///
/// Non-full models with `D >= 1`:
/// `(2Nη + D + 2√N(3√L_m + 2√L_α) + 2(5L_m + 2L_α))·τ²`;
/// `D = 0`: `(2Nη + 4√N(√L_m + √L_α) + 8L_m + 4L_α)·τ²`;
/// full model (`N = 0`, `n = D`): `(n + 2√(n·L_n) + 2L_n)·τ²`.
pub fn upper_bound_rho(
    dim: u32,
    n_resid: u32,
    eta: f64,
    alpha: f64,
    beta_m: f64,
    tau2: f64,
) -> Result<f64> {
    check_common(eta, alpha, beta_m, tau2)?;
    let lm = (1.0 / beta_m).ln();
    let la = (1.0 / alpha).ln();
    if n_resid == 0 {
        if dim == 0 {
            return Err(Error::Domain("full model requires D = n >= 1".into()));
        }
        let n = dim as f64;
        return Ok((n + 2.0 * (n * lm).sqrt() + 2.0 * lm) * tau2);
    }
    let nr = n_resid as f64;
    if dim == 0 {
        Ok((2.0 * nr * eta + 4.0 * nr.sqrt() * (lm.sqrt() + la.sqrt()) + 8.0 * lm + 4.0 * la)
            * tau2)
    } else {
        Ok((2.0 * nr * eta
            + dim as f64
            + 2.0 * nr.sqrt() * (3.0 * lm.sqrt() + 2.0 * la.sqrt())
            + 2.0 * (5.0 * lm + 2.0 * la))
            * tau2)
    }
}

/// Minimax lower bound on the squared radius attached to one subspace:
/// the maximum of the admissible branches
/// `(D/27 - √(L₁D))·τ²`, `√(L₂N)·τ²/9` and `(N - 2√(L₃N))·η·τ²/9`,
/// each clamped at 0.
///
/// The dimension branch requires `α + β < 1 - exp(-1/36)`; the residual
/// branches require `α + 2β <= 1 - exp(-1/4)`. If neither hypothesis holds
/// the bound is vacuous and an error naming both inequalities is returned.
pub fn lower_bound_radius(
    dim: u32,
    n_resid: u32,
    eta: f64,
    alpha: f64,
    beta: f64,
    tau2: f64,
) -> Result<f64> {
    check_common(eta, alpha, beta, tau2)?;
    let dim_ok = alpha + beta < claim_dim_level();
    let resid_ok = alpha + 2.0 * beta <= claim_resid_level();
    if !dim_ok && !resid_ok {
        return Err(Error::Precondition(format!(
            "α + β < 1 - exp(-1/36) fails ({} >= {:.6}) and α + 2β <= 1 - exp(-1/4) fails \
             ({} > {:.6})",
            alpha + beta,
            claim_dim_level(),
            alpha + 2.0 * beta,
            claim_resid_level()
        )));
    }
    let consts = BoundConstants::new(alpha, beta)?;
    let mut best = 0.0f64;
    if dim_ok && dim >= 1 {
        let l1 = consts.l1.expect("α + β < 1 under the dimension hypothesis");
        let d = dim as f64;
        best = best.max((d / 27.0 - (l1 * d).sqrt()) * tau2);
    }
    if resid_ok && n_resid >= 1 {
        let l2 = consts.l2.expect("α + 2β < 1 under the residual hypothesis");
        let l3 = consts.l3.expect("α + 2β < 1 under the residual hypothesis");
        let nr = n_resid as f64;
        best = best.max((l2 * nr).sqrt() * tau2 / 9.0);
        best = best.max((nr - 2.0 * (l3 * nr).sqrt()) * eta * tau2 / 9.0);
    }
    Ok(best)
}

/// Lower bound holding simultaneously over all mean vectors: the
/// zero-dimension instance of [`lower_bound_radius`].
pub fn global_lower_bound(n: u32, eta: f64, tau2: f64, alpha: f64, beta: f64) -> Result<f64> {
    lower_bound_radius(0, n, eta, alpha, beta, tau2)
}

/// `C(n, D) <= exp(D·log(en/D))` for `1 <= D <= n`.
pub fn subset_count_bound(n: u64, d: u64) -> Result<f64> {
    if d < 1 || d > n {
        return Err(Error::Domain(format!("subset bound requires 1 <= D <= n, got D = {d}, n = {n}")));
    }
    Ok((d as f64 * (1.0 + (n as f64 / d as f64).ln())).exp())
}
