//! Curvature-function algebra.
//!
//! Elementary symmetric polynomials `H_k`, the admissible curvature functions
//! `F` (mean curvature, normalized roots of `H_k`, power means and quotients),
//! their gradients and Hessians with respect to the principal curvatures, and
//! the quadratic form used to test inverse concavity on symmetric matrices.
//!
//! Every curvature function is normalized so that `F(1, ..., 1) = n` and is
//! evaluated on the ascending rearrangement of its argument, which makes the
//! result bitwise invariant under permutations of the input.

use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Divided differences `(F_i - F_j)/(k_i - k_j)` switch to their diagonal limit below this gap.
pub const COLLISION_GAP: f64 = 1e-8;

/// Principal curvatures at one point of a hypersurface.
#[derive(Debug, Clone, PartialEq)]
pub struct KappaVector(Vec<f64>);

impl KappaVector {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Argument("curvature vector must have n >= 1 entries".into()));
        }
        if let Some(i) = values.iter().position(|x| !x.is_finite()) {
            return Err(Error::Argument(format!("curvature entry {i} is not finite")));
        }
        Ok(Self(values))
    }

    /// Wraps values produced by the grid without validation.
    pub(crate) fn from_raw(values: Vec<f64>) -> Self {
        Self(values)
    }

    /// Builds a vector that must lie in the positive cone.
    pub fn positive(values: Vec<f64>) -> Result<Self> {
        let kappa = Self::new(values)?;
        if !kappa.is_positive() {
            return Err(Error::Domain("curvature vector is not in the positive cone".into()));
        }
        Ok(kappa)
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn is_positive(&self) -> bool {
        self.0.iter().all(|&x| x > 0.0)
    }

    pub fn min(&self) -> f64 {
        self.0.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.0.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Mean curvature `H = H_1`.
    pub fn mean_curvature(&self) -> f64 {
        sum_sorted(&self.0)
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

impl From<KappaVector> for Vec<f64> {
    fn from(k: KappaVector) -> Self {
        k.0
    }
}

/// Square real symmetric matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricMatrix(DMatrix<f64>);

impl SymmetricMatrix {
    /// Accepts a square matrix whose asymmetry is below `1e-14` (relative to its largest entry)
    /// and stores its symmetric part.
    pub fn new(m: DMatrix<f64>) -> Result<Self> {
        if m.nrows() != m.ncols() || m.nrows() == 0 {
            return Err(Error::Argument(format!(
                "expected a non-empty square matrix, got {}x{}",
                m.nrows(),
                m.ncols()
            )));
        }
        let scale = m.iter().fold(1.0_f64, |a, x| a.max(x.abs()));
        let asym = (&m - m.transpose()).iter().fold(0.0_f64, |a, x| a.max(x.abs()));
        if asym > 1e-14 * scale || m.iter().any(|x| !x.is_finite()) {
            return Err(Error::Argument(format!("matrix is not symmetric (defect {asym:e})")));
        }
        Ok(Self((&m + m.transpose()) * 0.5))
    }

    pub fn from_diagonal(d: &[f64]) -> Self {
        Self(DMatrix::from_diagonal(&nalgebra::DVector::from_column_slice(d)))
    }

    pub fn zeros(n: usize) -> Self {
        Self(DMatrix::zeros(n, n))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.0[(i, j)]
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.0
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut ev: Vec<f64> = SymmetricEigen::new(self.0.clone()).eigenvalues.iter().copied().collect();
        ev.sort_by(f64::total_cmp);
        ev
    }
}

/// Shape of an admissible curvature function.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Family {
    /// `H = sum k_i`.
    Mean,
    /// `n * (H_k / C(n,k))^(1/k)`.
    NormalizedRoot(usize),
    /// `n * (sum k_i^r / n)^(1/r)`.
    PowerMean(f64),
    /// `n * (H~_k / H~_l)^(1/(k-l))` with `H~_0 = 1`.
    Quotient(usize, usize),
}

/// A normalized curvature function together with the flow exponent `p`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvatureSpec {
    family: Family,
    p: f64,
    n: usize,
}

impl CurvatureSpec {
    pub fn new(n: usize, family: Family, p: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::Argument("dimension n must be at least 1".into()));
        }
        if !(p.is_finite() && p > 0.0) {
            return Err(Error::Argument(format!("flow exponent p must be > 0, got {p}")));
        }
        match family {
            Family::Mean => {}
            Family::NormalizedRoot(k) => {
                if k < 1 || k > n {
                    return Err(Error::Argument(format!("root_k requires 1 <= k <= n, got k={k}, n={n}")));
                }
            }
            Family::PowerMean(r) => {
                if !(r.is_finite() && r != 0.0 && r.abs() <= 1.0) {
                    return Err(Error::Argument(format!("power_mean requires 0 < |r| <= 1, got r={r}")));
                }
            }
            Family::Quotient(k, l) => {
                if !(k <= n && k > l) {
                    return Err(Error::Argument(format!("quotient requires n >= k > l >= 0, got k={k}, l={l}, n={n}")));
                }
            }
        }
        Ok(Self { family, p, n })
    }

    /// Skips parameter validation. Used to build negative controls (for example a power
    /// mean with `r < -1`, which is not inverse concave).
    pub fn unchecked(n: usize, family: Family, p: f64) -> Self {
        Self { family, p, n }
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Same function with a different exponent.
    pub fn with_p(&self, p: f64) -> Result<Self> {
        Self::new(self.n, self.family, p)
    }

    pub fn is_concave(&self) -> bool {
        match self.family {
            Family::Mean | Family::NormalizedRoot(_) | Family::Quotient(..) => true,
            Family::PowerMean(r) => r <= 1.0,
        }
    }

    pub fn is_inverse_concave(&self) -> bool {
        match self.family {
            Family::Mean | Family::NormalizedRoot(_) | Family::Quotient(..) => true,
            Family::PowerMean(r) => r >= -1.0,
        }
    }

    /// Whether `F -> 0` on the boundary of the positive cone.
    pub fn vanishes_on_boundary(&self) -> bool {
        match self.family {
            Family::Mean => self.n == 1,
            Family::NormalizedRoot(k) => k == self.n,
            Family::PowerMean(r) => r < 0.0 || self.n == 1,
            Family::Quotient(k, _) => k == self.n,
        }
    }

    pub fn label(&self) -> String {
        match self.family {
            Family::Mean => "mean".into(),
            Family::NormalizedRoot(k) => format!("root_{k}"),
            Family::PowerMean(r) => format!("power_mean({r})"),
            Family::Quotient(k, l) => format!("quotient({k},{l})"),
        }
    }

    fn check_kappa(&self, kappa: &KappaVector) -> Result<()> {
        if kappa.dim() != self.n {
            return Err(Error::Argument(format!(
                "curvature vector has {} entries, curvature function expects {}",
                kappa.dim(),
                self.n
            )));
        }
        if !kappa.is_positive() {
            return Err(Error::Domain("curvature vector is not in the positive cone".into()));
        }
        Ok(())
    }

    /// `F(k)` on the positive cone.
    pub fn value(&self, kappa: &KappaVector) -> Result<f64> {
        self.check_kappa(kappa)?;
        let (sorted, _) = sorted_with_perm(kappa.values());
        Ok(self.value_sorted(&sorted))
    }

    fn value_sorted(&self, k: &[f64]) -> f64 {
        let n = self.n as f64;
        match self.family {
            Family::Mean => sum_sorted(k),
            Family::NormalizedRoot(kk) => quotient_value(k, kk, 0),
            Family::Quotient(kk, l) => quotient_value(k, kk, l),
            Family::PowerMean(r) => {
                let m = k.iter().map(|x| x.powf(r)).sum::<f64>() / n;
                n * m.powf(1.0 / r)
            }
        }
    }

    /// Partial derivatives `F_i = dF/dk_i`.
    pub fn gradient(&self, kappa: &KappaVector) -> Result<KappaVector> {
        let (_, grad) = self.value_and_gradient(kappa)?;
        Ok(KappaVector(grad))
    }

    /// `F` together with its gradient, sharing the symmetric-polynomial work.
    pub fn value_and_gradient(&self, kappa: &KappaVector) -> Result<(f64, Vec<f64>)> {
        self.check_kappa(kappa)?;
        let (sorted, perm) = sorted_with_perm(kappa.values());
        let (f, g) = self.value_and_gradient_sorted(&sorted);
        let mut out = vec![0.0; self.n];
        for (s, &orig) in perm.iter().enumerate() {
            out[orig] = g[s];
        }
        Ok((f, out))
    }

    fn value_and_gradient_sorted(&self, k: &[f64]) -> (f64, Vec<f64>) {
        let n = self.n;
        let f = self.value_sorted(k);
        let grad = match self.family {
            Family::Mean => vec![1.0; n],
            Family::NormalizedRoot(kk) => quotient_log_gradient(k, kk, 0).into_iter().map(|g| f * g).collect(),
            Family::Quotient(kk, l) => quotient_log_gradient(k, kk, l).into_iter().map(|g| f * g).collect(),
            Family::PowerMean(r) => {
                let s: f64 = k.iter().map(|x| x.powf(r)).sum();
                // d/dk_i log(mean^(1/r)) = k_i^(r-1) / sum k^r
                k.iter().map(|x| f * x.powf(r - 1.0) / s).collect()
            }
        };
        (f, grad)
    }

    /// `(F, dF/dk_1, dF/dk_2)` at `k = (m, a, ..., a)` with `a` repeated `n - 1` times.
    ///
    /// Closed-form fast path for rotationally symmetric graphs; agrees with
    /// [`CurvatureSpec::value_and_gradient`] up to roundoff. For `n = 1` the third
    /// entry is zero and `a` is ignored.
    pub fn axial(&self, m: f64, a: f64) -> Result<(f64, f64, f64)> {
        let n = self.n;
        if !(m > 0.0 && m.is_finite()) || (n > 1 && !(a > 0.0 && a.is_finite())) {
            return Err(Error::Domain("curvature vector is not in the positive cone".into()));
        }
        if n == 1 {
            // every normalized one-variable function is the identity
            return Ok((m, 1.0, 0.0));
        }
        let nf = n as f64;
        let reps = nf - 1.0;
        match self.family {
            Family::Mean => Ok((m + reps * a, 1.0, 1.0)),
            Family::PowerMean(r) => {
                let (mr, ar) = (pow(m, r), pow(a, r));
                let s = mr + reps * ar;
                let f = nf * pow(s / nf, 1.0 / r);
                Ok((f, f * mr / (m * s), f * ar / (a * s)))
            }
            Family::NormalizedRoot(k) => Ok(axial_quotient(n, k, 0, m, a)),
            Family::Quotient(k, l) => Ok(axial_quotient(n, k, l, m, a)),
        }
    }

    /// `F` alone at `k = (m, a, ..., a)`; the cheap counterpart of [`CurvatureSpec::axial`].
    pub fn axial_value(&self, m: f64, a: f64) -> Result<f64> {
        let n = self.n;
        if !(m > 0.0 && m.is_finite()) || (n > 1 && !(a > 0.0 && a.is_finite())) {
            return Err(Error::Domain("curvature vector is not in the positive cone".into()));
        }
        if n == 1 {
            return Ok(m);
        }
        let nf = n as f64;
        let reps = nf - 1.0;
        Ok(match self.family {
            Family::Mean => m + reps * a,
            Family::PowerMean(r) => nf * pow((pow(m, r) + reps * pow(a, r)) / nf, 1.0 / r),
            Family::NormalizedRoot(k) => axial_quotient_value(n, k, 0, m, a),
            Family::Quotient(k, l) => axial_quotient_value(n, k, l, m, a),
        })
    }

    /// Second derivatives `d^2F / dk_i dk_j`.
    pub fn hessian(&self, kappa: &KappaVector) -> Result<SymmetricMatrix> {
        self.check_kappa(kappa)?;
        let (sorted, perm) = sorted_with_perm(kappa.values());
        let hs = self.hessian_sorted(&sorted);
        let n = self.n;
        let mut out = DMatrix::zeros(n, n);
        for a in 0..n {
            for b in 0..n {
                out[(perm[a], perm[b])] = hs[(a, b)];
            }
        }
        Ok(SymmetricMatrix(out))
    }

    fn hessian_sorted(&self, k: &[f64]) -> DMatrix<f64> {
        let n = self.n;
        match self.family {
            Family::Mean => DMatrix::zeros(n, n),
            Family::NormalizedRoot(_) | Family::Quotient(..) | Family::PowerMean(_) => {
                // F = n exp(g): F_ij = F (g_i g_j + g_ij)
                let f = self.value_sorted(k);
                let (g1, g2) = self.log_derivatives(k);
                DMatrix::from_fn(n, n, |i, j| f * (g1[i] * g1[j] + g2[(i, j)]))
            }
        }
    }

    /// First and second derivatives of `log F` (families other than `Mean`).
    fn log_derivatives(&self, k: &[f64]) -> (Vec<f64>, DMatrix<f64>) {
        let n = self.n;
        match self.family {
            Family::Mean => {
                let h = sum_sorted(k);
                (vec![1.0 / h; n], DMatrix::from_element(n, n, -1.0 / (h * h)))
            }
            Family::NormalizedRoot(kk) => quotient_log_derivatives(k, kk, 0),
            Family::Quotient(kk, l) => quotient_log_derivatives(k, kk, l),
            Family::PowerMean(r) => {
                let s: f64 = k.iter().map(|x| x.powf(r)).sum();
                let g1: Vec<f64> = k.iter().map(|x| x.powf(r - 1.0) / s).collect();
                let g2 = DMatrix::from_fn(n, n, |i, j| {
                    let diag = if i == j { (r - 1.0) * k[i].powf(r - 2.0) / s } else { 0.0 };
                    diag - r * g1[i] * g1[j]
                });
                (g1, g2)
            }
        }
    }
}

/// Serialized form of a curvature function inside a run document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurvatureFields {
    pub family: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub l: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r: Option<f64>,
    pub p: f64,
}

impl CurvatureFields {
    pub fn to_spec(&self, n: usize) -> Result<CurvatureSpec> {
        let need_k = || self.k.ok_or_else(|| Error::Parse(format!("family '{}' requires field k", self.family)));
        let family = match self.family.as_str() {
            "mean" => Family::Mean,
            "root_k" => Family::NormalizedRoot(need_k()?),
            "power_mean" => {
                Family::PowerMean(self.r.ok_or_else(|| Error::Parse("family 'power_mean' requires field r".into()))?)
            }
            "quotient" => Family::Quotient(need_k()?, self.l.unwrap_or(0)),
            other => return Err(Error::Parse(format!("unknown curvature family '{other}'"))),
        };
        CurvatureSpec::new(n, family, self.p)
    }

    pub fn from_spec(spec: &CurvatureSpec) -> Self {
        let (family, k, l, r) = match spec.family() {
            Family::Mean => ("mean", None, None, None),
            Family::NormalizedRoot(k) => ("root_k", Some(k), None, None),
            Family::PowerMean(r) => ("power_mean", None, None, Some(r)),
            Family::Quotient(k, l) => ("quotient", Some(k), Some(l), None),
        };
        Self { family: family.into(), k, l, r, p: spec.p() }
    }
}

/// `C(n, k)` extended by zero outside `0 <= k <= n`.
fn binomial_ext(n: isize, k: isize) -> f64 {
    if n < 0 || k < 0 || k > n {
        0.0
    } else {
        binomial(n as usize, k as usize)
    }
}

/// `sigma_k(m, a^(reps))` and its partials in `m` and in one copy of `a`.
fn axial_sigma(reps: usize, k: usize, m: f64, a: f64) -> (f64, f64, f64) {
    let (r, k) = (reps as isize, k as isize);
    let ap = |e: isize| if e < 0 { 0.0 } else { a.powi(e as i32) };
    let value = binomial_ext(r, k) * ap(k) + m * binomial_ext(r, k - 1) * ap(k - 1);
    let d_m = binomial_ext(r, k - 1) * ap(k - 1);
    let d_a = binomial_ext(r - 1, k - 1) * ap(k - 1) + m * binomial_ext(r - 1, k - 2) * ap(k - 2);
    (value, d_m, d_a)
}

fn axial_quotient(n: usize, k: usize, l: usize, m: f64, a: f64) -> (f64, f64, f64) {
    let (sk, sk_m, sk_a) = axial_sigma(n - 1, k, m, a);
    let (sl, sl_m, sl_a) = axial_sigma(n - 1, l, m, a);
    let ratio = (sk / binomial(n, k)) / (sl / binomial(n, l));
    let e = 1.0 / (k - l) as f64;
    let f = n as f64 * pow(ratio, e);
    (f, f * e * (sk_m / sk - sl_m / sl), f * e * (sk_a / sk - sl_a / sl))
}

fn axial_quotient_value(n: usize, k: usize, l: usize, m: f64, a: f64) -> f64 {
    let (sk, _, _) = axial_sigma(n - 1, k, m, a);
    let (sl, _, _) = axial_sigma(n - 1, l, m, a);
    let ratio = (sk / binomial(n, k)) / (sl / binomial(n, l));
    n as f64 * pow(ratio, 1.0 / (k - l) as f64)
}

/// `x^e` with the exponents met in practice evaluated without `powf`.
fn pow(x: f64, e: f64) -> f64 {
    if e == 1.0 {
        x
    } else if e == 2.0 {
        x * x
    } else if e == 0.5 {
        x.sqrt()
    } else if e == -1.0 {
        1.0 / x
    } else if e == -0.5 {
        1.0 / x.sqrt()
    } else if e == -2.0 {
        1.0 / (x * x)
    } else {
        x.powf(e)
    }
}

/// Binomial coefficient as a float (exact for the small arguments used here).
pub fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// All elementary symmetric polynomials `H_0..H_n` of `values`.
pub fn elementary_all(values: &[f64]) -> Vec<f64> {
    let n = values.len();
    let mut e = vec![0.0; n + 1];
    e[0] = 1.0;
    for (m, &x) in values.iter().enumerate() {
        for j in (1..=m + 1).rev() {
            e[j] += x * e[j - 1];
        }
    }
    e
}

/// Unnormalized `H_k`, the sum of all `k`-fold products of distinct entries.
pub fn elementary_symmetric(kappa: &KappaVector, k: usize) -> Result<f64> {
    let n = kappa.dim();
    if k > n {
        return Err(Error::Argument(format!("H_k requires 0 <= k <= n, got k={k}, n={n}")));
    }
    let (sorted, _) = sorted_with_perm(kappa.values());
    Ok(elementary_all(&sorted)[k])
}

/// `dH_k / dk_i`, which is `H_{k-1}` of the vector with entry `i` removed.
pub fn elementary_partial(kappa: &KappaVector, k: usize, i: usize) -> Result<f64> {
    let n = kappa.dim();
    if k > n || i >= n {
        return Err(Error::Argument(format!("partial of H_{k} w.r.t. entry {i} out of range (n={n})")));
    }
    if k == 0 {
        return Ok(0.0);
    }
    let rest: Vec<f64> = without(kappa.values(), &[i]);
    Ok(elementary_all(&rest)[k - 1])
}

/// Whether `H_1, ..., H_k` are all positive.
pub fn cone_membership(kappa: &KappaVector, k: usize) -> bool {
    let (sorted, _) = sorted_with_perm(kappa.values());
    let e = elementary_all(&sorted);
    (1..=k.min(kappa.dim())).all(|j| e[j] > 0.0)
}

/// `(H_k / C(n,k))^(1/k)` on the Garding cone `Gamma_k`.
pub fn normalized_root(kappa: &KappaVector, k: usize) -> Result<f64> {
    let n = kappa.dim();
    if k < 1 || k > n {
        return Err(Error::Argument(format!("normalized root requires 1 <= k <= n, got k={k}, n={n}")));
    }
    if !cone_membership(kappa, k) {
        return Err(Error::Domain(format!("curvature vector is not in Gamma_{k}")));
    }
    let (sorted, _) = sorted_with_perm(kappa.values());
    let hk = elementary_all(&sorted)[k] / binomial(n, k);
    Ok(if k == 1 { hk } else { hk.powf(1.0 / k as f64) })
}

/// Quadratic form from the inverse-concavity lemma,
/// `F^{rs,kl} e_rs e_kl + 2 F^{rk} h~^{sl} e_rs e_kl - (2/F)(F^{ij} e_ij)^2`,
/// evaluated in an eigenbasis of the positive definite matrix `h`.
pub fn inverse_concavity_form(spec: &CurvatureSpec, h: &SymmetricMatrix, eta: &SymmetricMatrix) -> Result<f64> {
    let n = spec.n();
    if h.dim() != n || eta.dim() != n {
        return Err(Error::Argument(format!(
            "matrix sizes {}x{} / {}x{} do not match n={n}",
            h.dim(),
            h.dim(),
            eta.dim(),
            eta.dim()
        )));
    }
    let eig = SymmetricEigen::new(h.matrix().clone());
    let kappa = eig.eigenvalues.iter().copied().collect::<Vec<_>>();
    if kappa.iter().any(|&x| !(x > 0.0)) {
        return Err(Error::Domain("h is not positive definite".into()));
    }
    let q = &eig.eigenvectors;
    let e = q.transpose() * eta.matrix() * q;
    let kv = KappaVector(kappa.clone());
    let f = spec.value(&kv)?;
    let grad = spec.gradient(&kv)?.into_inner();
    let hess = spec.hessian(&kv)?;

    let mut second = 0.0;
    for i in 0..n {
        for j in 0..n {
            second += hess.get(i, j) * e[(i, i)] * e[(j, j)];
            if i != j {
                let gap = kappa[i] - kappa[j];
                let divided =
                    if gap.abs() < COLLISION_GAP { hess.get(i, i) - hess.get(i, j) } else { (grad[i] - grad[j]) / gap };
                second += divided * e[(i, j)] * e[(i, j)];
            }
        }
    }
    let mut mixed = 0.0;
    for r in 0..n {
        for s in 0..n {
            mixed += grad[r] * e[(r, s)] * e[(r, s)] / kappa[s];
        }
    }
    let trace: f64 = (0..n).map(|i| grad[i] * e[(i, i)]).sum();
    Ok(second + 2.0 * mixed - 2.0 / f * trace * trace)
}

fn sum_sorted(k: &[f64]) -> f64 {
    let (s, _) = sorted_with_perm(k);
    s.iter().sum()
}

fn sorted_with_perm(values: &[f64]) -> (Vec<f64>, Vec<usize>) {
    let mut perm: Vec<usize> = (0..values.len()).collect();
    perm.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    (perm.iter().map(|&i| values[i]).collect(), perm)
}

fn without(values: &[f64], skip: &[usize]) -> Vec<f64> {
    values.iter().enumerate().filter(|(i, _)| !skip.contains(i)).map(|(_, &x)| x).collect()
}

fn quotient_value(k: &[f64], kk: usize, l: usize) -> f64 {
    let n = k.len();
    let e = elementary_all(k);
    let ratio = (e[kk] / binomial(n, kk)) / (e[l] / binomial(n, l));
    let d = kk - l;
    n as f64 * if d == 1 { ratio } else { ratio.powf(1.0 / d as f64) }
}

/// `d/dk_i` of `log(H_k) - log(H_l)` divided by `k - l`.
fn quotient_log_gradient(k: &[f64], kk: usize, l: usize) -> Vec<f64> {
    let n = k.len();
    let e = elementary_all(k);
    let d = (kk - l) as f64;
    (0..n)
        .map(|i| {
            let rest = elementary_all(&without(k, &[i]));
            let dk = rest[kk - 1] / e[kk];
            let dl = if l == 0 { 0.0 } else { rest[l - 1] / e[l] };
            (dk - dl) / d
        })
        .collect()
}

fn quotient_log_derivatives(k: &[f64], kk: usize, l: usize) -> (Vec<f64>, DMatrix<f64>) {
    let n = k.len();
    let e = elementary_all(k);
    let d = (kk - l) as f64;
    let partial = |m: usize| -> Vec<f64> {
        (0..n).map(|i| if m == 0 { 0.0 } else { elementary_all(&without(k, &[i]))[m - 1] }).collect()
    };
    let second = |m: usize, i: usize, j: usize| -> f64 {
        if m < 2 || i == j {
            0.0
        } else {
            elementary_all(&without(k, &[i, j]))[m - 2]
        }
    };
    let pk = partial(kk);
    let pl = partial(l);
    let g1: Vec<f64> = (0..n).map(|i| (pk[i] / e[kk] - if l == 0 { 0.0 } else { pl[i] / e[l] }) / d).collect();
    let g2 = DMatrix::from_fn(n, n, |i, j| {
        let tk = second(kk, i, j) / e[kk] - pk[i] * pk[j] / (e[kk] * e[kk]);
        let tl = if l == 0 { 0.0 } else { second(l, i, j) / e[l] - pl[i] * pl[j] / (e[l] * e[l]) };
        (tk - tl) / d
    });
    (g1, g2)
}
