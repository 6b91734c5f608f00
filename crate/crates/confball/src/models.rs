//! Linear-subspace family machinery: orthonormal bases, projections, level
//! allocation across the family, and the dyadic trigonometric family used by
//! the simulation study.

use ndarray::{Array1, Array2, ArrayView1, ArrayView2};

use crate::distributions::ln_binomial;
use crate::error::{Error, Result};

/// Orthonormality defect tolerated on stored bases, and the rank cutoff of
/// the orthonormalizer relative to the largest input column norm.
pub const ORTHO_TOL: f64 = 1e-10;

/// How a model's subspace is represented.
#[derive(Debug, Clone)]
pub enum Basis {
    /// The whole ambient space; projection is the identity.
    Full,
    /// Orthonormal columns spanning the subspace (zero columns allowed).
    Columns(Array2<f64>),
}

/// One subspace together with its allocated level.
#[derive(Debug, Clone)]
pub struct LinearModel {
    id: String,
    n: usize,
    beta_m: f64,
    basis: Basis,
}

impl LinearModel {
    /// Model spanned by arbitrary (possibly rank-deficient) columns; the
    /// stored basis is the orthonormalized column span.
    pub fn from_raw_columns(
        id: impl Into<String>,
        raw: &ArrayView2<f64>,
        beta_m: f64,
    ) -> Result<Self> {
        let basis = orthonormalize(raw);
        Self::from_orthonormal_columns(id, basis, beta_m)
    }

    /// Model from columns that are already orthonormal (defect <= 1e-10).
    pub fn from_orthonormal_columns(
        id: impl Into<String>,
        basis: Array2<f64>,
        beta_m: f64,
    ) -> Result<Self> {
        check_level(beta_m)?;
        let (n, d) = basis.dim();
        if d > n {
            return Err(Error::Family(format!("basis has {d} columns in dimension {n}")));
        }
        for i in 0..d {
            for j in i..d {
                let dot = basis.column(i).dot(&basis.column(j));
                let target = if i == j { 1.0 } else { 0.0 };
                if (dot - target).abs() > ORTHO_TOL {
                    return Err(Error::Family(format!(
                        "basis columns {i},{j} are not orthonormal (defect {:.3e})",
                        (dot - target).abs()
                    )));
                }
            }
        }
        Ok(Self {
            id: id.into(),
            n,
            beta_m,
            basis: Basis::Columns(basis),
        })
    }

    /// Model whose subspace is all of ℝⁿ.
    pub fn full(id: impl Into<String>, n: usize, beta_m: f64) -> Result<Self> {
        check_level(beta_m)?;
        if n == 0 {
            return Err(Error::Family("ambient dimension must be >= 1".into()));
        }
        Ok(Self {
            id: id.into(),
            n,
            beta_m,
            basis: Basis::Full,
        })
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    /// Ambient dimension n.
    pub fn ambient(&self) -> usize {
        self.n
    }

    /// Subspace dimension.
    pub fn dim(&self) -> usize {
        match &self.basis {
            Basis::Full => self.n,
            Basis::Columns(b) => b.ncols(),
        }
    }

    pub fn beta_m(&self) -> f64 {
        self.beta_m
    }

    pub fn basis(&self) -> &Basis {
        &self.basis
    }

    /// Whether the subspace is the whole space.
    pub fn is_full(&self) -> bool {
        self.dim() == self.n
    }

    /// Orthogonal projection of `y` onto the subspace.
    pub fn project(&self, y: &ArrayView1<f64>) -> Result<Array1<f64>> {
        self.check_len(y)?;
        match &self.basis {
            Basis::Full => Ok(y.to_owned()),
            Basis::Columns(b) => {
                if b.ncols() == 0 {
                    return Ok(Array1::zeros(self.n));
                }
                let coeffs = b.t().dot(y);
                Ok(b.dot(&coeffs))
            }
        }
    }

    /// Squared residual `‖y - Π y‖²`, computed as `‖y‖² - ‖Bᵀy‖²` and clamped
    /// at 0 against rounding.
    pub fn residual_sq(&self, y: &ArrayView1<f64>) -> Result<f64> {
        self.check_len(y)?;
        match &self.basis {
            Basis::Full => Ok(0.0),
            Basis::Columns(b) => {
                let total = y.dot(y);
                if b.ncols() == 0 {
                    return Ok(total);
                }
                let coeffs = b.t().dot(y);
                Ok((total - coeffs.dot(&coeffs)).max(0.0))
            }
        }
    }

    fn check_len(&self, y: &ArrayView1<f64>) -> Result<()> {
        if y.len() != self.n {
            return Err(Error::Dimension(format!(
                "vector has length {}, model lives in dimension {}",
                y.len(),
                self.n
            )));
        }
        Ok(())
    }
}

fn check_level(beta_m: f64) -> Result<()> {
    if !(beta_m > 0.0 && beta_m < 1.0) {
        return Err(Error::Family(format!("β_m must lie in (0, 1), got {beta_m}")));
    }
    Ok(())
}

/// Ordered family of subspaces. Structural requirements, checked at
/// construction: exactly one member spans the whole space, and the allocated
/// levels sum to at most the family level `β` (tolerance 1e-12).
#[derive(Debug, Clone)]
pub struct ModelFamily {
    n: usize,
    beta: f64,
    models: Vec<LinearModel>,
    full_idx: usize,
}

impl ModelFamily {
    pub fn new(n: usize, beta: f64, models: Vec<LinearModel>) -> Result<Self> {
        if !(beta > 0.0 && beta < 1.0) {
            return Err(Error::Family(format!("β must lie in (0, 1), got {beta}")));
        }
        if models.is_empty() {
            return Err(Error::Family("family is empty".into()));
        }
        for m in &models {
            if m.ambient() != n {
                return Err(Error::Family(format!(
                    "model '{}' lives in dimension {}, family ambient dimension is {n}",
                    m.id(),
                    m.ambient()
                )));
            }
        }
        let mut ids: Vec<&str> = models.iter().map(|m| m.id()).collect();
        ids.sort_unstable();
        if ids.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::Family("model ids must be unique".into()));
        }
        let full: Vec<usize> = models
            .iter()
            .enumerate()
            .filter(|(_, m)| m.is_full())
            .map(|(i, _)| i)
            .collect();
        if full.len() != 1 {
            return Err(Error::Family(format!(
                "family must contain exactly one model spanning the whole space, found {}",
                full.len()
            )));
        }
        let sum: f64 = models.iter().map(|m| m.beta_m()).sum();
        if sum > beta + 1e-12 {
            return Err(Error::Family(format!(
                "allocated levels sum to {sum}, exceeding β = {beta}"
            )));
        }
        Ok(Self {
            n,
            beta,
            models,
            full_idx: full[0],
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Family-wide coverage level β.
    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn models(&self) -> &[LinearModel] {
        &self.models
    }

    pub fn len(&self) -> usize {
        self.models.len()
    }

    pub fn is_empty(&self) -> bool {
        self.models.is_empty()
    }

    /// Index of the full model.
    pub fn full_index(&self) -> usize {
        self.full_idx
    }
}

/// Orthonormal basis of the column span of `raw`, by Householder QR with
/// column pivoting. Columns whose residual norm falls below
/// `1e-10 × (largest input column norm)` are treated as dependent and
/// dropped, so the number of returned columns is the numerical rank.
pub fn orthonormalize(raw: &ArrayView2<f64>) -> Array2<f64> {
    let (n, k) = raw.dim();
    if n == 0 || k == 0 {
        return Array2::zeros((n, 0));
    }
    // column-major working copy
    let mut cols: Vec<Vec<f64>> = (0..k).map(|j| raw.column(j).to_vec()).collect();
    let max_norm = cols
        .iter()
        .map(|c| c.iter().map(|v| v * v).sum::<f64>().sqrt())
        .fold(0.0, f64::max);
    if max_norm == 0.0 {
        return Array2::zeros((n, 0));
    }
    let tol = ORTHO_TOL * max_norm;

    // reflectors[j] acts on rows j.. and is stored normalized
    let mut reflectors: Vec<Vec<f64>> = Vec::new();
    for j in 0..k.min(n) {
        let (pivot, pnorm) = (j..k)
            .map(|c| {
                let nrm = cols[c][j..].iter().map(|v| v * v).sum::<f64>().sqrt();
                (c, nrm)
            })
            .max_by(|a, b| a.1.total_cmp(&b.1))
            .expect("pivot range is nonempty");
        if pnorm <= tol {
            break;
        }
        cols.swap(j, pivot);

        let mut v: Vec<f64> = cols[j][j..].to_vec();
        let alpha = -v[0].signum() * pnorm;
        v[0] -= alpha;
        let vnorm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        for x in &mut v {
            *x /= vnorm;
        }
        for c in cols.iter_mut().skip(j + 1) {
            let tail = &mut c[j..];
            let dot: f64 = 2.0 * v.iter().zip(tail.iter()).map(|(a, b)| a * b).sum::<f64>();
            for (t, vi) in tail.iter_mut().zip(v.iter()) {
                *t -= dot * vi;
            }
        }
        reflectors.push(v);
    }

    let rank = reflectors.len();
    let mut q = Array2::zeros((n, rank));
    for i in 0..rank {
        let mut e = vec![0.0f64; n];
        e[i] = 1.0;
        for (t, v) in reflectors.iter().enumerate().rev() {
            let tail = &mut e[t..];
            let dot: f64 = 2.0 * v.iter().zip(tail.iter()).map(|(a, b)| a * b).sum::<f64>();
            for (x, vi) in tail.iter_mut().zip(v.iter()) {
                *x -= dot * vi;
            }
        }
        for (r, &x) in e.iter().enumerate() {
            q[(r, i)] = x;
        }
    }
    q
}

/// Equal split of the family level: each model receives `β / count`.
pub fn allocate_uniform(beta: f64, count: usize) -> Vec<f64> {
    assert!(count >= 1, "allocation needs at least one model");
    vec![beta / count as f64; count]
}

/// Dimension-weighted allocation: a model of dimension `D` receives
/// `β / (n·C(n, D))`, and the full model (given as `D = n`) receives `β/2`.
/// Non-full entries must satisfy `1 <= D <= n/2`.
pub fn allocate_dimensional(beta: f64, n: usize, dims: &[usize]) -> Result<Vec<f64>> {
    if !(beta > 0.0 && beta < 1.0) {
        return Err(Error::Domain(format!("β must lie in (0, 1), got {beta}")));
    }
    let mut out = Vec::with_capacity(dims.len());
    for &d in dims {
        if d == n {
            out.push(beta / 2.0);
            continue;
        }
        if d < 1 || 2 * d > n {
            return Err(Error::Domain(format!(
                "dimensional allocation requires 1 <= D <= n/2 for non-full models, got D = {d}, n = {n}"
            )));
        }
        let ln_beta_m = beta.ln() - (n as f64).ln() - ln_binomial(n as u64, d as u64);
        out.push(ln_beta_m.exp());
    }
    let sum: f64 = out.iter().sum();
    if sum > beta + 1e-12 {
        return Err(Error::Domain(format!(
            "dimensional allocation sums to {sum} > β = {beta}"
        )));
    }
    Ok(out)
}

/// Sampled trigonometric design: the constant column together with
/// `cos(2πj x_i)` and `sin(2πj x_i)` for `j = 1..=harmonics`, evaluated at
/// `x_i = i/n`, `i = 1..=n`. Returns the raw (not orthonormalized) columns.
pub fn fourier_columns(n: usize, harmonics: usize) -> Array2<f64> {
    let mut a = Array2::zeros((n, 2 * harmonics + 1));
    for i in 0..n {
        let x = (i as f64 + 1.0) / n as f64;
        a[(i, 0)] = 1.0;
        for j in 1..=harmonics {
            let t = 2.0 * std::f64::consts::PI * j as f64 * x;
            a[(i, 2 * j - 1)] = t.cos();
            a[(i, 2 * j)] = t.sin();
        }
    }
    a
}

/// Dyadic trigonometric family: models `m = 2^k` for `k = 1..=k_max` with
/// dimensions `2m + 1` and levels `β·2^{-k}`, plus the full model with level
/// `β·2^{-k_max}`. Requires `dim(S_{2^k_max}) = 2^{k_max+1} + 1 < n`.
pub fn fourier_family(n: usize, k_max: u32, beta: f64) -> Result<ModelFamily> {
    let top_dim = 2usize
        .checked_pow(k_max + 1)
        .and_then(|v| v.checked_add(1))
        .ok_or_else(|| Error::Domain(format!("dyadic depth {k_max} overflows")))?;
    if k_max < 1 || top_dim >= n {
        return Err(Error::Domain(format!(
            "dyadic depth must satisfy 1 <= k_max and 2^(k_max+1) + 1 < n, got k_max = {k_max}, n = {n}"
        )));
    }
    let mut models = Vec::with_capacity(k_max as usize + 1);
    for k in 1..=k_max {
        let m = 2usize.pow(k);
        let beta_m = beta * 0.5f64.powi(k as i32);
        let raw = fourier_columns(n, m);
        let model = LinearModel::from_raw_columns(m.to_string(), &raw.view(), beta_m)?;
        if model.dim() != 2 * m + 1 {
            return Err(Error::Family(format!(
                "trigonometric design for m = {m} has numerical rank {} instead of {}",
                model.dim(),
                2 * m + 1
            )));
        }
        models.push(model);
    }
    models.push(LinearModel::full(
        n.to_string(),
        n,
        beta * 0.5f64.powi(k_max as i32),
    )?);
    ModelFamily::new(n, beta, models)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use ndarray::array;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn seeded_matrix(n: usize, k: usize, seed: u64) -> Array2<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Array2::from_shape_fn((n, k), |_| rng.random::<f64>() * 2.0 - 1.0)
    }

    fn ortho_defect(b: &Array2<f64>) -> f64 {
        let d = b.ncols();
        let mut worst = 0.0f64;
        for i in 0..d {
            for j in 0..d {
                let dot = b.column(i).dot(&b.column(j));
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((dot - target).abs());
            }
        }
        worst
    }

    #[test]
    fn orthonormalize_identity_up_to_sign() {
        let eye = Array2::<f64>::eye(4);
        let q = orthonormalize(&eye.view());
        assert_eq!(q.dim(), (4, 4));
        for j in 0..4 {
            let col = q.column(j);
            let nonzero: Vec<usize> = (0..4).filter(|&i| col[i].abs() > 1e-12).collect();
            assert_eq!(nonzero.len(), 1);
            assert_abs_diff_eq!(col[nonzero[0]].abs(), 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn orthonormalize_drops_duplicated_column() {
        let mut a = seeded_matrix(10, 3, 1);
        let c0 = a.column(0).to_owned();
        a.column_mut(2).assign(&c0);
        let q = orthonormalize(&a.view());
        assert_eq!(q.ncols(), 2);
    }

    #[test]
    fn orthonormalize_random_span_and_defect() {
        let a = seeded_matrix(10, 3, 7);
        let q = orthonormalize(&a.view());
        assert_eq!(q.ncols(), 3);
        assert!(ortho_defect(&q) <= 1e-10);
        // original columns are reproduced by projection onto span(q)
        for j in 0..3 {
            let col = a.column(j).to_owned();
            let proj = q.dot(&q.t().dot(&col));
            let resid = (&col - &proj).mapv(|v| v * v).sum().sqrt();
            assert!(resid <= 1e-8, "column {j} residual {resid}");
        }
    }

    #[test]
    fn orthonormalize_zero_matrix() {
        let a = Array2::<f64>::zeros((5, 2));
        assert_eq!(orthonormalize(&a.view()).ncols(), 0);
    }

    #[test]
    fn projection_edge_cases() {
        let empty = LinearModel::from_orthonormal_columns("0", Array2::zeros((4, 0)), 0.1).unwrap();
        let y = array![1.0, -2.0, 3.0, 0.5];
        assert_eq!(empty.project(&y.view()).unwrap(), Array1::zeros(4));
        assert_abs_diff_eq!(empty.residual_sq(&y.view()).unwrap(), y.dot(&y), epsilon = 1e-12);

        let full = LinearModel::full("full", 4, 0.1).unwrap();
        assert_eq!(full.project(&y.view()).unwrap(), y);
        assert_eq!(full.residual_sq(&y.view()).unwrap(), 0.0);

        let bad = array![1.0, 2.0];
        assert!(full.project(&bad.view()).is_err());
    }

    #[test]
    fn projection_idempotent_and_pythagoras() {
        let a = seeded_matrix(12, 4, 3);
        let model = LinearModel::from_raw_columns("m", &a.view(), 0.1).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..5 {
            let y = Array1::from_shape_fn(12, |_| rng.random::<f64>() * 4.0 - 2.0);
            let p = model.project(&y.view()).unwrap();
            let pp = model.project(&p.view()).unwrap();
            let drift = (&p - &pp).mapv(|v| v * v).sum().sqrt();
            assert!(drift <= 1e-10);
            // contraction and Pythagoras
            assert!(p.dot(&p) <= y.dot(&y) * (1.0 + 1e-12));
            let resid = (&y - &p).mapv(|v| v * v).sum();
            let total = y.dot(&y);
            assert_abs_diff_eq!(p.dot(&p) + resid, total, epsilon = 1e-8 * total);
            assert_abs_diff_eq!(
                model.residual_sq(&y.view()).unwrap(),
                resid,
                epsilon = 1e-8 * total
            );
        }
        // a vector already in the span projects to itself
        let in_span = a.dot(&array![0.3, -1.0, 2.0, 0.7]);
        let p = model.project(&in_span.view()).unwrap();
        let resid = (&in_span - &p).mapv(|v| v * v).sum().sqrt();
        assert!(resid <= 1e-8);
    }

    #[test]
    fn uniform_allocation() {
        let b = allocate_uniform(0.1, 9);
        assert_eq!(b.len(), 9);
        for v in &b {
            assert_abs_diff_eq!(*v, 0.1 / 9.0, epsilon = 1e-16);
        }
        assert!(b.iter().sum::<f64>() <= 0.1 + 1e-12);
        assert_eq!(allocate_uniform(0.1, 1), vec![0.1]);
    }

    #[test]
    fn dimensional_allocation() {
        // four singletons plus the full model at n = 4
        let b = allocate_dimensional(0.1, 4, &[1, 1, 1, 1, 4]).unwrap();
        for v in &b[..4] {
            assert_abs_diff_eq!(*v, 0.1 / 16.0, epsilon = 1e-12);
        }
        assert_abs_diff_eq!(b[4], 0.05, epsilon = 1e-15);
        assert_abs_diff_eq!(b.iter().sum::<f64>(), 0.075, epsilon = 1e-12);

        // log-space path matches direct arithmetic where the count is exact
        let b = allocate_dimensional(0.1, 1000, &[5]).unwrap();
        let exact = 0.1 / (1000.0 * 8_250_291_250_200.0);
        assert_abs_diff_eq!(b[0], exact, epsilon = 1e-9 * exact);

        assert!(allocate_dimensional(0.1, 10, &[6]).is_err());
        assert!(allocate_dimensional(0.1, 10, &[0]).is_err());
    }

    #[test]
    fn family_validation() {
        let m1 = LinearModel::from_raw_columns("a", &seeded_matrix(6, 2, 1).view(), 0.02).unwrap();
        let full = LinearModel::full("full", 6, 0.05).unwrap();

        assert!(ModelFamily::new(6, 0.1, vec![m1.clone()]).is_err()); // no full model
        let fam = ModelFamily::new(6, 0.1, vec![m1.clone(), full.clone()]).unwrap();
        assert_eq!(fam.full_index(), 1);
        assert_eq!(fam.len(), 2);

        // levels exceeding β are rejected
        let m2 = LinearModel::from_raw_columns("b", &seeded_matrix(6, 2, 2).view(), 0.06).unwrap();
        assert!(ModelFamily::new(6, 0.1, vec![m1.clone(), m2, full.clone()]).is_err());

        // duplicate ids are rejected
        let m3 = LinearModel::from_raw_columns("a", &seeded_matrix(6, 2, 3).view(), 0.01).unwrap();
        assert!(ModelFamily::new(6, 0.1, vec![m1, m3, full]).is_err());
    }

    #[test]
    fn fourier_family_dimensions_and_levels() {
        let fam = fourier_family(1000, 8, 0.1).unwrap();
        let dims: Vec<usize> = fam.models().iter().map(|m| m.dim()).collect();
        assert_eq!(dims, vec![5, 9, 17, 33, 65, 129, 257, 513, 1000]);
        let betas: Vec<f64> = fam.models().iter().map(|m| m.beta_m()).collect();
        for (k, b) in betas[..8].iter().enumerate() {
            assert_abs_diff_eq!(*b, 0.1 * 0.5f64.powi(k as i32 + 1), epsilon = 1e-15);
        }
        assert_abs_diff_eq!(betas[8], 0.1 / 256.0, epsilon = 1e-15);
        assert_abs_diff_eq!(betas.iter().sum::<f64>(), 0.1, epsilon = 1e-12);
        assert_eq!(fam.full_index(), 8);
        assert_eq!(fam.models()[0].id(), "2");
        assert_eq!(fam.models()[8].id(), "1000");
    }

    #[test]
    fn fourier_family_nested_spans() {
        let fam = fourier_family(200, 3, 0.1).unwrap();
        for k in 0..2 {
            let small = &fam.models()[k];
            let big = &fam.models()[k + 1];
            if let Basis::Columns(b) = small.basis() {
                for j in 0..b.ncols() {
                    let col = b.column(j).to_owned();
                    let proj = big.project(&col.view()).unwrap();
                    let resid = (&col - &proj).mapv(|v| v * v).sum().sqrt();
                    assert!(resid <= 1e-8, "nesting fails at level {k}, column {j}");
                }
            } else {
                panic!("dyadic member stored as full basis");
            }
        }
    }

    #[test]
    fn fourier_family_deterministic() {
        let a = fourier_family(100, 2, 0.1).unwrap();
        let b = fourier_family(100, 2, 0.1).unwrap();
        for (ma, mb) in a.models().iter().zip(b.models()) {
            match (ma.basis(), mb.basis()) {
                (Basis::Columns(x), Basis::Columns(y)) => assert_eq!(x, y),
                (Basis::Full, Basis::Full) => {}
                _ => panic!("representation mismatch"),
            }
        }
    }

    #[test]
    fn fourier_family_precondition() {
        // 2^(k_max+1) + 1 must stay below n
        assert!(fourier_family(17, 3, 0.1).is_err());
        assert!(fourier_family(18, 3, 0.1).is_ok());
    }
}
