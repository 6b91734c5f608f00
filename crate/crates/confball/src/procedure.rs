//! The confidence-ball construction: one residual χ² test per subspace, the
//! accepted set, selection of the smallest accepted radius, and membership
//! tests for the (stronger) intersection region.

use ndarray::{Array1, ArrayView1};
use rand::SeedableRng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use crate::distributions::{chi2_quantile, NoncentralChi2};
use crate::error::{Error, Result};
use crate::models::ModelFamily;
use crate::radii::{radius_table, VarianceSpec};

/// Result of one goodness-of-fit test. `accepted == (statistic <= threshold)`.
#[derive(Debug, Clone)]
pub struct TestOutcome {
    pub model_id: String,
    /// `‖y - Π_m y‖²`, in variance units.
    pub statistic: f64,
    /// `q_{0,N_m}(α)·τ²` (σ² when the variance is known exactly).
    pub threshold: f64,
    pub accepted: bool,
}

/// Per-model line of a ball report.
#[derive(Debug, Clone)]
pub struct ModelReport {
    pub model_id: String,
    pub dim: usize,
    pub beta_m: f64,
    pub rho_sq: f64,
    pub statistic: f64,
    pub threshold: f64,
    pub accepted: bool,
}

/// The constructed ball: center, squared radius, and how it was selected.
#[derive(Debug, Clone)]
pub struct ConfidenceBall {
    pub selected: String,
    pub selected_index: usize,
    pub center: Array1<f64>,
    pub radius_sq: f64,
    pub nominal_coverage: f64,
    pub per_model: Vec<ModelReport>,
}

/// The test-and-select procedure for one family at fixed level and variance
/// spec. Radii and test thresholds are data-independent, so they are computed
/// once at construction and reused across data vectors; nothing here mutates
/// afterwards.
#[derive(Debug)]
pub struct Procedure<'a> {
    family: &'a ModelFamily,
    alpha: f64,
    variance: VarianceSpec,
    rho_sq: Vec<f64>,
    thresholds: Vec<f64>,
}

impl<'a> Procedure<'a> {
    pub fn new(family: &'a ModelFamily, alpha: f64, variance: VarianceSpec) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 1.0 - family.beta()) {
            return Err(Error::Domain(format!(
                "α must lie in (0, 1 - β) = (0, {}), got {alpha}",
                1.0 - family.beta()
            )));
        }
        let n = family.n();
        let entries: Vec<(u32, u32, f64)> = family
            .models()
            .iter()
            .map(|m| (m.dim() as u32, (n - m.dim()) as u32, m.beta_m()))
            .collect();
        let rho_sq = radius_table(&entries, alpha, &variance)?;

        let tau2 = variance.tau2();
        let thresholds: Vec<f64> = family
            .models()
            .iter()
            .map(|m| -> Result<f64> {
                if m.is_full() {
                    // residual is identically zero; threshold via q_{z,0} = 0
                    Ok(0.0)
                } else {
                    let q = chi2_quantile(
                        alpha,
                        &NoncentralChi2::central((n - m.dim()) as u32),
                    )?;
                    Ok(q * tau2)
                }
            })
            .collect::<Result<_>>()?;
        Ok(Self {
            family,
            alpha,
            variance,
            rho_sq,
            thresholds,
        })
    }

    pub fn family(&self) -> &ModelFamily {
        self.family
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn variance(&self) -> &VarianceSpec {
        &self.variance
    }

    /// Squared radii, in family order.
    pub fn rho_sq(&self) -> &[f64] {
        &self.rho_sq
    }

    /// Test thresholds `q_{0,N_m}(α)·τ²`, in family order (0 for the full model).
    pub fn thresholds(&self) -> &[f64] {
        &self.thresholds
    }

    /// One goodness-of-fit outcome per model, in family order.
    pub fn run_tests(&self, y: &ArrayView1<f64>) -> Result<Vec<TestOutcome>> {
        self.check_len(y)?;
        self.family
            .models()
            .iter()
            .zip(&self.thresholds)
            .map(|(m, &threshold)| {
                let statistic = if m.is_full() { 0.0 } else { m.residual_sq(y)? };
                Ok(TestOutcome {
                    model_id: m.id().to_string(),
                    statistic,
                    threshold,
                    accepted: statistic <= threshold,
                })
            })
            .collect()
    }

    /// Build the ball: among accepted models pick the smallest squared
    /// radius, breaking ties by smaller dimension and then by family order;
    /// the center is the projection onto the selected subspace.
    pub fn build_ball(&self, y: &ArrayView1<f64>) -> Result<ConfidenceBall> {
        let outcomes = self.run_tests(y)?;
        let mut best: Option<(usize, f64, usize)> = None; // (idx, rho_sq, dim)
        let mut per_model = Vec::with_capacity(outcomes.len());
        for (idx, out) in outcomes.iter().enumerate() {
            let m = &self.family.models()[idx];
            per_model.push(ModelReport {
                model_id: out.model_id.clone(),
                dim: m.dim(),
                beta_m: m.beta_m(),
                rho_sq: self.rho_sq[idx],
                statistic: out.statistic,
                threshold: out.threshold,
                accepted: out.accepted,
            });
            if !out.accepted {
                continue;
            }
            let rho = self.rho_sq[idx];
            let dim = m.dim();
            let better = match best {
                None => true,
                Some((_, brho, bdim)) => rho < brho || (rho == brho && dim < bdim),
            };
            if better {
                best = Some((idx, rho, dim));
            }
        }
        // the full model is always accepted, so the accepted set is nonempty
        let (idx, rho, _) = best.expect("accepted set contains the full model");
        let center = self.family.models()[idx].project(y)?;
        Ok(ConfidenceBall {
            selected: self.family.models()[idx].id().to_string(),
            selected_index: idx,
            center,
            radius_sq: rho,
            nominal_coverage: 1.0 - self.family.beta(),
            per_model,
        })
    }

    /// Whether `f_query` lies in every ball `B(Π_m y, ρ_m)` with `m` accepted.
    /// This region is contained in the reported ball but covers with the same
    /// probability.
    pub fn in_intersection(&self, f_query: &ArrayView1<f64>, y: &ArrayView1<f64>) -> Result<bool> {
        self.check_len(f_query)?;
        let outcomes = self.run_tests(y)?;
        for (idx, out) in outcomes.iter().enumerate() {
            if !out.accepted {
                continue;
            }
            let center = self.family.models()[idx].project(y)?;
            let dist_sq = f_query
                .iter()
                .zip(center.iter())
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>();
            if dist_sq > self.rho_sq[idx] {
                return Ok(false);
            }
        }
        Ok(true)
    }

    fn check_len(&self, y: &ArrayView1<f64>) -> Result<()> {
        if y.len() != self.family.n() {
            return Err(Error::Dimension(format!(
                "data has length {}, family ambient dimension is {}",
                y.len(),
                self.family.n()
            )));
        }
        Ok(())
    }
}

/// Empirical frequency of `ρ̂² <= ρ_m² + 1e-9` over seeded replicates with
/// mean `f ∈ S_m`; the selection guarantee says this is at least `1 - α`.
///
/// Noise is drawn at level σ for a known variance and at the interval's upper
/// endpoint τ otherwise.
pub fn radius_guarantee_check(
    family: &ModelFamily,
    alpha: f64,
    variance: VarianceSpec,
    model_id: &str,
    f: &ArrayView1<f64>,
    replicates: usize,
    seed: u64,
) -> Result<f64> {
    let idx = family
        .models()
        .iter()
        .position(|m| m.id() == model_id)
        .ok_or_else(|| Error::Family(format!("no model with id '{model_id}'")))?;
    let model = &family.models()[idx];
    let resid = model.residual_sq(f)?;
    let scale = f.dot(f).max(1.0);
    if resid > 1e-8 * scale {
        return Err(Error::Domain(format!(
            "mean vector is not in the subspace of '{model_id}' (residual² = {resid:.3e})"
        )));
    }
    let proc = Procedure::new(family, alpha, variance)?;
    let rho_m = proc.rho_sq()[idx];
    let sigma = variance.tau2().sqrt();
    let hits: usize = (0..replicates as u64)
        .into_par_iter()
        .map(|r| {
            let mut rng = seeded_stream(seed, r);
            let y = add_noise(f, sigma, &mut rng);
            let ball = proc.build_ball(&y.view()).expect("replicate ball");
            usize::from(ball.radius_sq <= rho_m + 1e-9)
        })
        .sum();
    Ok(hits as f64 / replicates as f64)
}

/// Independent substream `stream` of the ChaCha generator keyed by `seed`;
/// parallel and serial traversals of the replicate index agree bitwise.
pub fn seeded_stream(seed: u64, stream: u64) -> rand_chacha::ChaCha8Rng {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// `f + σ·ε` with `ε` standard normal, drawn coordinate-wise from `rng`.
pub fn add_noise<R: rand::Rng + ?Sized>(f: &ArrayView1<f64>, sigma: f64, rng: &mut R) -> Array1<f64> {
    f.mapv(|v| {
        let eps: f64 = StandardNormal.sample(rng);
        v + sigma * eps
    })
}
