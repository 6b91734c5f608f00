//! Variable selection over column subsets of a design matrix: enumerate
//! subset models with the dimension-weighted level allocation, run the ball
//! procedure, and report the selected support together with its closed-form
//! radius bound.

use ndarray::{Array2, ArrayView1};

use crate::distributions::ln_binomial;
use crate::error::{Error, Result};
use crate::models::{orthonormalize, LinearModel, ModelFamily};
use crate::procedure::{ConfidenceBall, Procedure};
use crate::radii::VarianceSpec;

/// Default ceiling on the number of enumerated subset models.
pub const DEFAULT_ENUM_CAP: usize = 1_000_000;

/// A full-column-rank n×p design; columns are labeled 1..=p.
#[derive(Debug, Clone)]
pub struct DesignMatrix {
    x: Array2<f64>,
}

impl DesignMatrix {
    pub fn new(x: Array2<f64>) -> Result<Self> {
        let (n, p) = x.dim();
        if p == 0 || n == 0 {
            return Err(Error::Domain("design matrix must be nonempty".into()));
        }
        if p > n {
            return Err(Error::Domain(format!(
                "design must have at most as many columns as rows, got {n}×{p}"
            )));
        }
        let rank = orthonormalize(&x.view()).ncols();
        if rank != p {
            return Err(Error::Domain(format!(
                "design matrix must have full column rank, numerical rank is {rank} < {p}"
            )));
        }
        Ok(Self { x })
    }

    pub fn n(&self) -> usize {
        self.x.nrows()
    }

    pub fn p(&self) -> usize {
        self.x.ncols()
    }

    pub fn matrix(&self) -> &Array2<f64> {
        &self.x
    }
}

/// Subset family: the model family plus, for each member, the 1-based column
/// subset it spans (`None` for the full model).
#[derive(Debug)]
pub struct SubsetFamily {
    family: ModelFamily,
    subsets: Vec<Option<Vec<usize>>>,
}

impl SubsetFamily {
    pub fn family(&self) -> &ModelFamily {
        &self.family
    }

    /// Columns of the `idx`-th member (`None` for the full model).
    pub fn subset(&self, idx: usize) -> Option<&[usize]> {
        self.subsets[idx].as_deref()
    }
}

fn subset_label(cols: &[usize]) -> String {
    let inner: Vec<String> = cols.iter().map(|c| c.to_string()).collect();
    format!("{{{}}}", inner.join(","))
}

/// One model per nonempty column subset of size at most `max_size`, with
/// levels `β_m = β/(n·C(n,|m|))`, plus the full model at level `β/2`.
///
/// `max_size` must not exceed `min(p, n/2)`, and the subset count
/// `C(p,1) + … + C(p,max_size)` must stay within `cap`.
pub fn enumerate_models(
    x: &DesignMatrix,
    beta: f64,
    max_size: usize,
    cap: usize,
) -> Result<SubsetFamily> {
    let (n, p) = (x.n(), x.p());
    if !(beta > 0.0 && beta < 1.0) {
        return Err(Error::Domain(format!("β must lie in (0, 1), got {beta}")));
    }
    if max_size < 1 || max_size > p || 2 * max_size > n {
        return Err(Error::Domain(format!(
            "subset size must satisfy 1 <= max_size <= min(p, n/2), got {max_size} with p = {p}, n = {n}"
        )));
    }
    let mut count = 0.0f64;
    for k in 1..=max_size {
        count += ln_binomial(p as u64, k as u64).exp();
    }
    if count > cap as f64 {
        return Err(Error::CapExceeded(format!(
            "enumerating {count:.3e} subsets exceeds the cap of {cap}; lower max_size or p"
        )));
    }

    let mut models = Vec::new();
    let mut subsets = Vec::new();
    for k in 1..=max_size {
        let beta_m = (beta.ln() - (n as f64).ln() - ln_binomial(n as u64, k as u64)).exp();
        let mut combo: Vec<usize> = (0..k).collect();
        loop {
            let cols_1based: Vec<usize> = combo.iter().map(|&c| c + 1).collect();
            let raw = select_columns(x.matrix(), &combo);
            let basis = orthonormalize(&raw.view());
            if basis.ncols() != k {
                return Err(Error::Family(format!(
                    "columns {} of a full-rank design are numerically dependent",
                    subset_label(&cols_1based)
                )));
            }
            models.push(LinearModel::from_orthonormal_columns(
                subset_label(&cols_1based),
                basis,
                beta_m,
            )?);
            subsets.push(Some(cols_1based));
            if !next_combination(&mut combo, p) {
                break;
            }
        }
    }
    models.push(LinearModel::full("full", n, beta / 2.0)?);
    subsets.push(None);
    let family = ModelFamily::new(n, beta, models)?;
    Ok(SubsetFamily { family, subsets })
}

fn select_columns(x: &Array2<f64>, cols: &[usize]) -> Array2<f64> {
    let n = x.nrows();
    let mut out = Array2::zeros((n, cols.len()));
    for (j, &c) in cols.iter().enumerate() {
        out.column_mut(j).assign(&x.column(c));
    }
    out
}

/// Advance `combo` to the next lexicographic k-combination of `0..p`.
fn next_combination(combo: &mut [usize], p: usize) -> bool {
    let k = combo.len();
    let mut i = k;
    while i > 0 {
        i -= 1;
        if combo[i] < p - k + i {
            combo[i] += 1;
            for j in i + 1..k {
                combo[j] = combo[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// Enumerate, test, and select: returns the chosen column subset (`None`
/// when the full model is selected) together with the confidence ball.
pub fn select_variables(
    y: &ArrayView1<f64>,
    x: &DesignMatrix,
    alpha: f64,
    beta: f64,
    variance: VarianceSpec,
    max_size: usize,
    cap: usize,
) -> Result<(Option<Vec<usize>>, ConfidenceBall)> {
    let subset_family = enumerate_models(x, beta, max_size, cap)?;
    let proc = Procedure::new(subset_family.family(), alpha, variance)?;
    let ball = proc.build_ball(y)?;
    let selected = subset_family.subset(ball.selected_index).map(|s| s.to_vec());
    Ok((selected, ball))
}

/// Closed-form bound on the selected squared radius when the target support
/// has size `s`: the explicit upper bound evaluated at the conservative level
/// `log(1/β_{m*}) <= log(n/β) + s·log(en/s)`.
pub fn selection_radius_bound(n: u32, s: u32, alpha: f64, beta: f64, sigma2: f64) -> Result<f64> {
    if !(alpha > 0.0 && alpha < 1.0) || !(beta > 0.0 && beta < 1.0) {
        return Err(Error::Domain(format!(
            "levels must lie in (0, 1), got α = {alpha}, β = {beta}"
        )));
    }
    if !sigma2.is_finite() || sigma2 <= 0.0 {
        return Err(Error::Domain(format!("σ² must be finite and > 0, got {sigma2}")));
    }
    if s < 1 || 2 * s > n {
        return Err(Error::Domain(format!(
            "support size must satisfy 1 <= s <= n/2, got s = {s}, n = {n}"
        )));
    }
    // log(1/β_m) with the subset-count bound in place of the exact binomial;
    // composed in log space because β_m itself can underflow.
    let nf = n as f64;
    let sf = s as f64;
    let lm = (nf / beta).ln() + sf * (1.0 + (nf / sf).ln());
    let la = (1.0 / alpha).ln();
    let n_resid = (n - s) as f64;
    Ok((sf + 2.0 * n_resid.sqrt() * (3.0 * lm.sqrt() + 2.0 * la.sqrt()) + 2.0 * (5.0 * lm + 2.0 * la))
        * sigma2)
}
