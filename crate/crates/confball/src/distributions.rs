//! Central and noncentral χ² distribution functions, their quantiles, and the
//! closed-form quantile envelopes (Birgé 2001) that double as bracketing
//! intervals for numeric inversion.
//!
//! Quantile convention used throughout the crate: `quantile(u)` is the value
//! `q` with upper-tail probability `u`, i.e. `P(X >= q) = u`, equivalently
//! `cdf(q) = 1 - u`.
//!
//! All functions here are pure; the sampler takes a caller-owned random
//! stream, so everything is safe for unlimited concurrent invocation.

use std::cell::RefCell;

use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

/// Residual Poisson tail mass at which the noncentral mixture is truncated.
const MIXTURE_TAIL_TOL: f64 = 1e-13;
/// Hard budget on mixture terms before reporting a convergence failure.
const MIXTURE_TERM_BUDGET: usize = 1_000_000;
/// Absolute CDF residual targeted by the quantile bisection.
const QUANTILE_CDF_TOL: f64 = 1e-10;

/// Parameter pair for every distribution call: noncentrality `z >= 0` and
/// degrees of freedom `d >= 0`.
///
/// `d = 0` is permitted only so that the convention `q_{z,0}(u) = 0` has a
/// carrier; the CDF itself requires `d >= 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoncentralChi2 {
    z: f64,
    d: u32,
}

impl NoncentralChi2 {
    pub fn new(z: f64, d: u32) -> Result<Self> {
        if !z.is_finite() || z < 0.0 {
            return Err(Error::Domain(format!(
                "noncentrality must be finite and nonnegative, got {z}"
            )));
        }
        Ok(Self { z, d })
    }

    /// Central χ² with `d` degrees of freedom.
    pub fn central(d: u32) -> Self {
        Self { z: 0.0, d }
    }

    pub fn noncentrality(&self) -> f64 {
        self.z
    }

    pub fn dof(&self) -> u32 {
        self.d
    }
}

/// A quantile extended with the sentinel used by supremum searches: the
/// level-1 quantile is treated as negative infinity so that candidate terms
/// containing it compare below every finite candidate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum QuantileValue {
    NegInfinity,
    Finite(f64),
}

impl QuantileValue {
    pub fn finite(self) -> Option<f64> {
        match self {
            QuantileValue::Finite(q) => Some(q),
            QuantileValue::NegInfinity => None,
        }
    }
}

// ---------------------------------------------------------------------------
// Log-gamma and friends
// ---------------------------------------------------------------------------

/// Lanczos coefficients, g = 7, n = 9 (GSL set).
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

const HALF_LN_TWO_PI: f64 = 0.918_938_533_204_672_7;

/// ln Γ(x) for x > 0, Lanczos approximation with reflection below 1/2.
pub(crate) fn ln_gamma(x: f64) -> f64 {
    debug_assert!(x > 0.0, "ln_gamma expects a positive argument");
    if x < 0.5 {
        return std::f64::consts::PI.ln()
            - (std::f64::consts::PI * x).sin().ln()
            - ln_gamma(1.0 - x);
    }
    let z = x - 1.0;
    let mut acc = LANCZOS[0];
    for (i, &c) in LANCZOS.iter().enumerate().skip(1) {
        acc += c / (z + i as f64);
    }
    let t = z + 7.5;
    HALF_LN_TWO_PI + (z + 0.5) * t.ln() - t + acc.ln()
}

/// ln C(n, k) via log-gamma; exact enough for allocations at n ~ 10^4.
pub(crate) fn ln_binomial(n: u64, k: u64) -> f64 {
    debug_assert!(k <= n);
    ln_gamma(n as f64 + 1.0) - ln_gamma(k as f64 + 1.0) - ln_gamma((n - k) as f64 + 1.0)
}

// ---------------------------------------------------------------------------
// Regularized lower incomplete gamma P(a, x)
// ---------------------------------------------------------------------------

const GAMMA_EPS: f64 = 1e-15;
const GAMMA_ITMAX: usize = 20_000;
const FPMIN: f64 = 1e-300;

fn gamma_series(a: f64, x: f64) -> f64 {
    let ln_front = a * x.ln() - x - ln_gamma(a);
    let mut ap = a;
    let mut del = 1.0 / a;
    let mut sum = del;
    for _ in 0..GAMMA_ITMAX {
        ap += 1.0;
        del *= x / ap;
        sum += del;
        if del.abs() < sum.abs() * GAMMA_EPS {
            break;
        }
    }
    (sum * ln_front.exp()).min(1.0)
}

/// Upper incomplete gamma Q(a, x) by modified Lentz continued fraction.
fn gamma_cf(a: f64, x: f64) -> f64 {
    let ln_front = a * x.ln() - x - ln_gamma(a);
    let mut b = x + 1.0 - a;
    let mut c = 1.0 / FPMIN;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..=GAMMA_ITMAX {
        let an = -(i as f64) * (i as f64 - a);
        b += 2.0;
        d = an * d + b;
        if d.abs() < FPMIN {
            d = FPMIN;
        }
        c = b + an / c;
        if c.abs() < FPMIN {
            c = FPMIN;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;
        if (del - 1.0).abs() < GAMMA_EPS {
            break;
        }
    }
    (ln_front.exp() * h).min(1.0)
}

/// Regularized lower incomplete gamma P(a, x), a > 0, x >= 0.
///
/// Series below the χ²-scale split `x_chi2 < d + 1` (here `x < a + 1/2` on
/// the gamma scale), continued fraction otherwise.
fn reg_lower_gamma(a: f64, x: f64) -> f64 {
    debug_assert!(a > 0.0 && x >= 0.0);
    if x == 0.0 {
        return 0.0;
    }
    if x < a + 0.5 {
        gamma_series(a, x)
    } else {
        (1.0 - gamma_cf(a, x)).clamp(0.0, 1.0)
    }
}

// ---------------------------------------------------------------------------
// CDFs
// ---------------------------------------------------------------------------

/// Central χ² CDF `P[X <= x]` for `d >= 1` degrees of freedom.
pub fn central_chi2_cdf(x: f64, d: u32) -> Result<f64> {
    if d < 1 {
        return Err(Error::Domain(format!("central χ² CDF requires d >= 1, got {d}")));
    }
    if !(x >= 0.0) || !x.is_finite() {
        return Err(Error::Domain(format!("CDF argument must be finite and >= 0, got {x}")));
    }
    Ok(reg_lower_gamma(d as f64 / 2.0, x / 2.0))
}

/// Poisson-weighted mixture over central CDFs, summed outward in both
/// directions from the modal Poisson index, truncated when the residual
/// Poisson mass drops below [`MIXTURE_TAIL_TOL`].
fn poisson_mixture<F: FnMut(u64) -> f64>(lambda: f64, mut central_at: F) -> Result<f64> {
    debug_assert!(lambda > 0.0);
    let k0 = lambda.floor() as u64;
    let lw0 = -lambda + if k0 > 0 { k0 as f64 * lambda.ln() } else { 0.0 }
        - ln_gamma(k0 as f64 + 1.0);
    let w0 = lw0.exp();

    let mut total = w0 * central_at(k0);
    let mut mass = w0;
    let mut n_terms: usize = 1;

    let mut down_w = w0;
    let mut down_k = k0;
    let mut up_w = w0;
    let mut up_k = k0;

    while 1.0 - mass > MIXTURE_TAIL_TOL {
        if n_terms >= MIXTURE_TERM_BUDGET {
            return Err(Error::Convergence(format!(
                "noncentral χ² mixture exhausted {MIXTURE_TERM_BUDGET} terms (lambda = {lambda})"
            )));
        }
        if down_k > 0 {
            down_w *= down_k as f64 / lambda;
            down_k -= 1;
            total += down_w * central_at(down_k);
            mass += down_w;
            n_terms += 1;
            if 1.0 - mass <= MIXTURE_TAIL_TOL {
                break;
            }
        }
        up_k += 1;
        up_w *= lambda / up_k as f64;
        total += up_w * central_at(up_k);
        mass += up_w;
        n_terms += 1;
        // Remaining mass is below what f64 accumulation can ever add.
        if down_k == 0 && up_w == 0.0 {
            break;
        }
    }
    Ok(total.min(1.0))
}

/// Noncentral χ² CDF `χ²_{z,d}(x) = Σ_k e^{-z/2}(z/2)^k/k! · P[χ²(d+2k) <= x]`.
pub fn noncentral_chi2_cdf(x: f64, p: &NoncentralChi2) -> Result<f64> {
    if p.d < 1 {
        return Err(Error::Domain(format!("noncentral χ² CDF requires d >= 1, got {}", p.d)));
    }
    if !(x >= 0.0) || !x.is_finite() {
        return Err(Error::Domain(format!("CDF argument must be finite and >= 0, got {x}")));
    }
    if x == 0.0 {
        return Ok(0.0);
    }
    if p.z == 0.0 {
        return central_chi2_cdf(x, p.d);
    }
    let half_d = p.d as f64 / 2.0;
    let half_x = x / 2.0;
    poisson_mixture(p.z / 2.0, |k| reg_lower_gamma(half_d + k as f64, half_x))
}

// ---------------------------------------------------------------------------
// Quantile envelopes
// ---------------------------------------------------------------------------

fn check_envelope_args(z: f64, d: u32, u: f64) -> Result<()> {
    if !z.is_finite() || z < 0.0 {
        return Err(Error::Domain(format!("noncentrality must be finite and >= 0, got {z}")));
    }
    if d < 1 {
        return Err(Error::Domain(format!("envelope requires d >= 1, got {d}")));
    }
    if !(u > 0.0 && u < 1.0) {
        return Err(Error::Domain(format!("envelope level must lie in (0, 1), got {u}")));
    }
    Ok(())
}

/// Upper envelope for the upper-tail-`u` quantile:
/// `q_{z,d}(u) <= z + d + 2√((2z + d)·log(1/u)) + 2·log(1/u)`.
pub fn birge_upper(z: f64, d: u32, u: f64) -> Result<f64> {
    check_envelope_args(z, d, u)?;
    let l = (1.0 / u).ln();
    Ok(z + d as f64 + 2.0 * ((2.0 * z + d as f64) * l).sqrt() + 2.0 * l)
}

/// Lower envelope, stated at the mirrored level:
/// `q_{z,d}(1 - u) >= z + d - 2√((2z + d)·log(1/u))`.
///
/// May be negative; callers clamp at 0 when using it as a bracket.
pub fn birge_lower(z: f64, d: u32, u: f64) -> Result<f64> {
    check_envelope_args(z, d, u)?;
    let l = (1.0 / u).ln();
    Ok(z + d as f64 - 2.0 * ((2.0 * z + d as f64) * l).sqrt())
}

// ---------------------------------------------------------------------------
// Quantiles
// ---------------------------------------------------------------------------

/// Upper-tail quantile: the unique `q >= 0` with `cdf(q) = 1 - u`, `u ∈ (0,1)`.
///
/// Convention: `d = 0` returns 0 for every admissible `u`.
///
/// Monotone bisection on the CDF; the initial bracket comes from the quantile
/// envelopes, so it is always valid. Terminates when the CDF residual is
/// below 1e-10 (with a bracket-width floor well past f64 resolution).
pub fn chi2_quantile(u: f64, p: &NoncentralChi2) -> Result<f64> {
    if !(u > 0.0 && u < 1.0) {
        return Err(Error::Domain(format!(
            "quantile level must lie in (0, 1), got {u}; the level-1 convention \
             requires chi2_quantile_or_neg_inf"
        )));
    }
    if p.d == 0 {
        return Ok(0.0);
    }
    invert_cdf(p, u)
}

/// Quantile with the supremum convention: `u = 1` maps to the negative
/// infinity sentinel instead of being rejected. `u ∈ (0, 1]`.
pub fn chi2_quantile_or_neg_inf(u: f64, p: &NoncentralChi2) -> Result<QuantileValue> {
    if u == 1.0 {
        return Ok(QuantileValue::NegInfinity);
    }
    chi2_quantile(u, p).map(QuantileValue::Finite)
}

fn invert_cdf(p: &NoncentralChi2, u: f64) -> Result<f64> {
    let target = 1.0 - u;
    let zd = 2.0 * p.z + p.d as f64;

    let mut hi = {
        let l = (1.0 / u).ln();
        p.z + p.d as f64 + 2.0 * (zd * l).sqrt() + 2.0 * l
    };
    let mut lo = {
        // Envelope at the mirrored level bounds this quantile from below.
        let l = (1.0 / (1.0 - u)).ln();
        (p.z + p.d as f64 - 2.0 * (zd * l).sqrt()).max(0.0)
    };

    // The envelopes are mathematically valid brackets; expansion only guards
    // against rounding at the boundary.
    let mut expand = 0;
    while noncentral_chi2_cdf(hi, p)? < target {
        hi = hi * 1.5 + 1.0;
        expand += 1;
        if expand > 64 {
            return Err(Error::Bracket(format!(
                "quantile upper bracket failed for z={}, d={}, u={u}",
                p.z, p.d
            )));
        }
    }
    if lo > 0.0 && noncentral_chi2_cdf(lo, p)? > target {
        lo = 0.0;
    }

    for _ in 0..500 {
        let mid = 0.5 * (lo + hi);
        let c = noncentral_chi2_cdf(mid, p)?;
        if (c - target).abs() <= QUANTILE_CDF_TOL {
            return Ok(mid);
        }
        if c < target {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-13 * (1.0 + mid) {
            return Ok(0.5 * (lo + hi));
        }
    }
    Err(Error::Convergence(format!(
        "quantile bisection failed to converge for z={}, d={}, u={u}",
        p.z, p.d
    )))
}

// ---------------------------------------------------------------------------
// Cached-threshold noncentral CDF
// ---------------------------------------------------------------------------

/// Noncentral χ² CDF at a fixed evaluation point, as a function of the
/// noncentrality. The central mixture components depend only on the point,
/// so they are computed once and reused across all noncentrality queries;
/// radius searches evaluate this thousands of times per model.
#[derive(Debug)]
pub struct FixedPointCdf {
    dof: u32,
    x: f64,
    central: RefCell<Vec<f64>>,
}

impl FixedPointCdf {
    pub fn new(x: f64, dof: u32) -> Result<Self> {
        if dof < 1 {
            return Err(Error::Domain(format!("requires d >= 1, got {dof}")));
        }
        if !(x >= 0.0) || !x.is_finite() {
            return Err(Error::Domain(format!("evaluation point must be finite and >= 0, got {x}")));
        }
        Ok(Self {
            dof,
            x,
            central: RefCell::new(Vec::new()),
        })
    }

    pub fn x(&self) -> f64 {
        self.x
    }

    fn central_at(&self, k: u64) -> f64 {
        let mut cache = self.central.borrow_mut();
        let idx = k as usize;
        while cache.len() <= idx {
            let j = cache.len() as f64;
            cache.push(reg_lower_gamma(self.dof as f64 / 2.0 + j, self.x / 2.0));
        }
        cache[idx]
    }

    /// `χ²_{z,d}(x)` for the stored `(x, d)`.
    pub fn eval(&self, z: f64) -> Result<f64> {
        if !z.is_finite() || z < 0.0 {
            return Err(Error::Domain(format!(
                "noncentrality must be finite and nonnegative, got {z}"
            )));
        }
        if self.x == 0.0 {
            return Ok(0.0);
        }
        if z == 0.0 {
            return Ok(self.central_at(0));
        }
        poisson_mixture(z / 2.0, |k| self.central_at(k))
    }
}

// ---------------------------------------------------------------------------
// Sampling
// ---------------------------------------------------------------------------

/// One draw of `‖μ + ε‖²` with `‖μ‖² = z` and `ε` standard normal in ℝᵈ.
///
/// Requires `d >= 1`.
pub fn sample_noncentral<R: Rng + ?Sized>(p: &NoncentralChi2, rng: &mut R) -> f64 {
    assert!(p.d >= 1, "sampling requires d >= 1");
    let shift = p.z.sqrt();
    let mut total = 0.0;
    for i in 0..p.d {
        let g: f64 = rng.sample(StandardNormal);
        let v = if i == 0 { g + shift } else { g };
        total += v * v;
    }
    total
}
