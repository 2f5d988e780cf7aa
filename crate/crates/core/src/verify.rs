//! Numerical verifiers for rearrangement inequalities and their
//! supporting identities.
//!
//! The central quantity is the *rearrangement gap*
//! `||A^m B^n|| - ||W(A,B)||` for a word `W`: nonnegative means the
//! ordered product dominates on this instance, negative flags a
//! violation candidate. Around it sit the 2×2 eigenvalue certificate
//! (trace and determinant identities for `WᵀW` against `B^n A^{2m} B^n`),
//! the 2×2 power-trace inequality, perturbation diagnostics (projection
//! decay of the norm maximizer, strict third-order gaps at the top
//! eigenvector, the epsilon threshold of the perturbed family), a suite
//! of classical operator-norm inequalities, and the Recht–Ré sum
//! inequality.

use crate::error::{Error, Result};
use crate::linalg::{
    commutator_min_sv, dot, eigen_sym, eval_word, frac_power, norm2, spectral_norm, Matrix,
    SymMatrix,
};
use crate::ncpoly::extract_coeffs;
use crate::rng::Rng64;
use crate::word::Word;
use num_traits::ToPrimitive;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

/// How a reported gap is backed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CertStatus {
    /// Floating-point evaluation only.
    FloatOnly,
    /// The sign of the gap is guaranteed by exact-rational bounds.
    RationalCertified,
}

/// Result of evaluating a rearrangement gap on one instance.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GapReport {
    pub word: Word,
    pub dim: usize,
    /// `||W(A, B)||`.
    pub norm_word: f64,
    /// `||A^m B^n||`.
    pub norm_ordered: f64,
    /// `norm_ordered - norm_word`; negative is a violation candidate.
    pub gap: f64,
    pub certified: CertStatus,
    /// Content hash of the inputs (first 16 hex digits of SHA-256).
    pub inputs_digest: String,
}

impl GapReport {
    /// Candidate threshold: gaps below `-1e-8 * scale` are genuine
    /// candidates, anything closer to zero is treated as roundoff.
    pub fn is_violation_candidate(&self) -> bool {
        self.gap < -1e-8 * self.norm_word.max(self.norm_ordered)
    }
}

/// Content hash of a matrix pair, stable across runs.
pub fn inputs_digest(a: &SymMatrix, b: &SymMatrix) -> String {
    let mut hasher = Sha256::new();
    hasher.update((a.dim() as u64).to_le_bytes());
    for &v in a.as_matrix().data() {
        hasher.update(v.to_le_bytes());
    }
    for &v in b.as_matrix().data() {
        hasher.update(v.to_le_bytes());
    }
    let digest = hasher.finalize();
    digest[..8].iter().map(|b| format!("{b:02x}")).collect()
}

/// Evaluates the rearrangement gap `||A^m B^n|| - ||W(A, B)||`.
pub fn rearrangement_gap(word: &Word, a: &SymMatrix, b: &SymMatrix) -> Result<GapReport> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch(format!(
            "rearrangement_gap: dims {} vs {}",
            a.dim(),
            b.dim()
        )));
    }
    let w = eval_word(word, a, b)?;
    let z = eval_word(&word.ordered(), a, b)?;
    let norm_word = spectral_norm(&w)?.value;
    let norm_ordered = spectral_norm(&z)?.value;
    Ok(GapReport {
        word: word.clone(),
        dim: a.dim(),
        norm_word,
        norm_ordered,
        gap: norm_ordered - norm_word,
        certified: CertStatus::FloatOnly,
        inputs_digest: inputs_digest(a, b),
    })
}

/// Eigenvalue certificate for a 2×2 instance: the spectra of
/// `B^n A^{2m} B^n` (lambda) and `WᵀW` (mu) satisfy
/// `mu1 + mu2 <= lambda1 + lambda2` and `lambda1 lambda2 = mu1 mu2`,
/// which together force `mu1 <= lambda1`.
#[derive(Clone, Debug, Serialize)]
pub struct Certificate2x2 {
    pub lambda: [f64; 2],
    pub mu: [f64; 2],
    /// `(lambda1 + lambda2) - (mu1 + mu2)`; nonnegative up to roundoff.
    pub trace_slack: f64,
    /// `|lambda1 lambda2 - mu1 mu2|` relative to
    /// `max(lambda1 lambda2, mu1 mu2, floor)`. The floor
    /// `1e-5 * sigma * (lambda1 + mu1)`, where `sigma` bounds the
    /// intermediate product scale `max(||A||,1)^2m * max(||B||,1)^2n`,
    /// keeps the measure meaningful when both determinants sit below
    /// the absolute roundoff of the product chain (which scales with
    /// the inputs, not with a contracted lambda1).
    pub det_mismatch: f64,
}

impl Certificate2x2 {
    /// `lambda1 - mu1`, the certified inequality itself.
    pub fn max_eig_slack(&self) -> f64 {
        self.lambda[0] - self.mu[0]
    }
}

/// Computes the 2×2 certificate. The lambda spectrum is evaluated from
/// the word `B^n A^{2m} B^n` directly, independent of the `A^m B^n`
/// route used by [`rearrangement_gap`], so the two can cross-check each
/// other.
pub fn certificate_2x2(word: &Word, a: &SymMatrix, b: &SymMatrix) -> Result<Certificate2x2> {
    if a.dim() != 2 || b.dim() != 2 {
        return Err(Error::InvalidArgument(format!(
            "certificate_2x2 requires dimension 2, got {} and {}",
            a.dim(),
            b.dim()
        )));
    }
    let m = word.total_m();
    let n = word.total_n();
    let gram_ordered = Word::from_blocks(&[(0, n), (2 * m, n)])?;
    let so = SymMatrix::from_matrix(&eval_word(&gram_ordered, a, b)?);
    let w = eval_word(word, a, b)?;
    let sw = SymMatrix::from_matrix(&w.transpose().mul(&w));
    let lam = eigen_sym(&so)?.eigenvalues;
    let mu = eigen_sym(&sw)?.eigenvalues;
    let (pl, pm) = (lam[0] * lam[1], mu[0] * mu[1]);
    let norm_a = a.spectral_norm()?;
    let norm_b = b.spectral_norm()?;
    let sigma = norm_a.max(1.0).powi(2 * m as i32) * norm_b.max(1.0).powi(2 * n as i32);
    let det_floor = 1e-5 * sigma * (lam[0] + mu[0]);
    let denom = pl.max(pm).max(det_floor);
    let det_mismatch = if denom > 0.0 {
        (pl - pm).abs() / denom
    } else {
        0.0
    };
    Ok(Certificate2x2 {
        lambda: [lam[0], lam[1]],
        mu: [mu[0], mu[1]],
        trace_slack: (lam[0] + lam[1]) - (mu[0] + mu[1]),
        det_mismatch,
    })
}

/// Result of the 2×2 power-trace inequality
/// `tr(C^{p1} D^{q1} ... C^{pk} D^{qk}) <= tr(CD)`.
#[derive(Clone, Debug, Serialize)]
pub struct TraceCheck {
    /// `tr(CD) - tr(C^{p1} D^{q1} ...)`.
    pub slack: f64,
    pub tr_cd: f64,
    /// Set for dimension 3, where the inequality can fail and results
    /// are reported without assertion.
    pub warn_only: bool,
}

/// Checks the power-trace inequality for exponent splittings
/// `(p_i, q_i)` with `sum p_i = sum q_i = 1`, `p_i, q_i >= 0`.
///
/// Dimension 2 is the asserted regime; dimension 3 is accepted in
/// warn-only mode (counterexamples exist there); other dimensions are
/// rejected.
pub fn trace_inequality(c: &SymMatrix, d: &SymMatrix, exponents: &[(f64, f64)]) -> Result<TraceCheck> {
    if c.dim() != d.dim() {
        return Err(Error::DimensionMismatch(format!(
            "trace_inequality: dims {} vs {}",
            c.dim(),
            d.dim()
        )));
    }
    let warn_only = match c.dim() {
        2 => false,
        3 => true,
        other => {
            return Err(Error::InvalidArgument(format!(
                "trace_inequality supports dimension 2 (asserted) or 3 (warn-only), got {other}"
            )))
        }
    };
    if exponents.is_empty() {
        return Err(Error::InvalidArgument("empty exponent list".into()));
    }
    if exponents.iter().any(|&(p, q)| p < 0.0 || q < 0.0) {
        return Err(Error::InvalidArgument("exponents must be nonnegative".into()));
    }
    let sum_p: f64 = exponents.iter().map(|e| e.0).sum();
    let sum_q: f64 = exponents.iter().map(|e| e.1).sum();
    if (sum_p - 1.0).abs() > 1e-12 || (sum_q - 1.0).abs() > 1e-12 {
        return Err(Error::InvalidArgument(format!(
            "exponent sums must equal 1 (got {sum_p} and {sum_q})"
        )));
    }
    let n = c.dim();
    let mut prod = Matrix::identity(n);
    for &(p, q) in exponents {
        prod = prod.mul(frac_power(c, p)?.as_matrix());
        prod = prod.mul(frac_power(d, q)?.as_matrix());
    }
    let tr = |m: &Matrix| (0..n).map(|i| m.get(i, i)).sum::<f64>();
    let tr_cd = tr(&c.as_matrix().mul(d.as_matrix()));
    Ok(TraceCheck {
        slack: tr_cd - tr(&prod),
        tr_cd,
        warn_only,
    })
}

/// One sampled point of the projection-decay diagnostic.
#[derive(Clone, Debug, Serialize)]
pub struct EpsDefect {
    pub eps: f64,
    /// `1 - ||pi v_eps||` where `pi` projects onto the top eigenspace
    /// of `mA + nB` and `v_eps` maximizes `||W(Id+eps A, Id+eps B) v||`.
    pub defect: f64,
}

/// Fitted linear decay of the maximizer's projection defect.
#[derive(Clone, Debug, Serialize)]
pub struct ProjectionDecay {
    /// Least-squares slope of `defect ~ c1 * eps` over the sample.
    pub c1: f64,
    /// Largest sampled eps such that `defect <= c1 * eps` holds at it
    /// and every smaller sampled eps; 0 if none.
    pub threshold: f64,
    pub eigspace_dim: usize,
    pub samples: Vec<EpsDefect>,
}

/// Measures how fast the norm maximizer of `W(Id+eps A, Id+eps B)`
/// falls into the top eigenspace of `Y = mA + nB` as eps shrinks.
///
/// Eigenspace membership uses the relative tolerance `1e-8 * lambda1`.
pub fn maximizer_projection_decay(
    word: &Word,
    a: &SymMatrix,
    b: &SymMatrix,
    eps_list: &[f64],
) -> Result<ProjectionDecay> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch(format!(
            "projection decay: dims {} vs {}",
            a.dim(),
            b.dim()
        )));
    }
    if eps_list.is_empty() || eps_list.iter().any(|&e| !(e > 0.0)) {
        return Err(Error::InvalidArgument(
            "eps list must be nonempty and strictly positive".into(),
        ));
    }
    let mut eps_sorted = eps_list.to_vec();
    eps_sorted.sort_by(|x, y| y.partial_cmp(x).expect("no NaN"));

    let m = word.total_m() as f64;
    let n = word.total_n() as f64;
    let y = SymMatrix::linear_comb(m, a, n, b)?;
    let eig = eigen_sym(&y)?;
    let basis = eig.top_eigenspace(1e-8);

    let mut samples = Vec::with_capacity(eps_sorted.len());
    for &eps in &eps_sorted {
        let a_eps = a.scale(eps).add_scaled_identity(1.0);
        let b_eps = b.scale(eps).add_scaled_identity(1.0);
        let x = eval_word(word, &a_eps, &b_eps)?;
        let v = spectral_norm(&x)?.maximizer;
        let proj_sq: f64 = basis.iter().map(|q| dot(q, &v) * dot(q, &v)).sum();
        let defect = 1.0 - proj_sq.max(0.0).sqrt();
        samples.push(EpsDefect { eps, defect });
    }

    let num: f64 = samples.iter().map(|s| s.defect * s.eps).sum();
    let den: f64 = samples.iter().map(|s| s.eps * s.eps).sum();
    let c1 = if den > 0.0 { num / den } else { 0.0 };

    // Largest eps whose entire tail (all smaller sampled eps) obeys the
    // fitted bound; small slack absorbs roundoff at defect ~ 0.
    let mut threshold = 0.0;
    for s in samples.iter().rev() {
        if s.defect <= c1 * s.eps + 1e-12 {
            threshold = s.eps;
        } else {
            break;
        }
    }

    Ok(ProjectionDecay {
        c1,
        threshold,
        eigspace_dim: basis.len(),
        samples,
    })
}

/// Strict-gap diagnostic at the top eigenvector of `mA + nB`.
#[derive(Clone, Debug, Serialize)]
pub struct EigvecGaps {
    /// `<AABv, v> - <ABAv, v>`, minimized over an orthonormal basis of
    /// the top eigenspace.
    pub gap_aba: f64,
    /// `<ABBv, v> - <BABv, v>`, minimized likewise.
    pub gap_bab: f64,
    /// Smallest singular value of `AB - BA`.
    pub min_sv: f64,
    /// Multiplicity of the top eigenvalue; with multiplicity > 1 the
    /// basis minimum is a proxy for the eigenspace minimum.
    pub eigspace_dim: usize,
}

/// Computes the two rearrangement gaps at unit top eigenvectors of
/// `mA + nB`. Both are nonnegative up to roundoff for PSD inputs and
/// strictly positive when the commutator is nonsingular.
pub fn top_eigenvector_gaps(m: u32, n: u32, a: &SymMatrix, b: &SymMatrix) -> Result<EigvecGaps> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch(format!(
            "eigenvector gaps: dims {} vs {}",
            a.dim(),
            b.dim()
        )));
    }
    if m < 1 || n < 1 {
        return Err(Error::InvalidArgument("m and n must be >= 1".into()));
    }
    let y = SymMatrix::linear_comb(m as f64, a, n as f64, b)?;
    let basis = eigen_sym(&y)?.top_eigenspace(1e-8);

    let am = a.as_matrix();
    let bm = b.as_matrix();
    let aab = am.mul(am).mul(bm);
    let aba = am.mul(bm).mul(am);
    let abb = am.mul(bm).mul(bm);
    let bab = bm.mul(am).mul(bm);

    let quad = |mat: &Matrix, v: &[f64]| dot(&mat.matvec(v), v);
    let mut gap_aba = f64::INFINITY;
    let mut gap_bab = f64::INFINITY;
    for v in &basis {
        gap_aba = gap_aba.min(quad(&aab, v) - quad(&aba, v));
        gap_bab = gap_bab.min(quad(&abb, v) - quad(&bab, v));
    }
    Ok(EigvecGaps {
        gap_aba,
        gap_bab,
        min_sv: commutator_min_sv(a, b)?,
        eigspace_dim: basis.len(),
    })
}

/// Symbolic third-order coefficient and its numerical cross-check.
#[derive(Clone, Debug, Serialize)]
pub struct ThirdOrder {
    /// `2 a7 (<AABv,v> - <ABAv,v>) + 2 a10 (<ABBv,v> - <BABv,v>)
    ///  + 2 a3 <(AB-BA)v, (mA+nB)v>` at the top eigenvector `v`.
    pub coeff3: f64,
    /// The eps^3 coefficient of `||Z_eps v_eps||^2 - ||X_eps v_eps||^2`
    /// fitted by two-level Richardson extrapolation over
    /// eps in {1e-2, 5e-3, 2.5e-3}.
    pub numeric_fit: f64,
    /// The `a3` contribution alone; vanishes at an exact eigenvector.
    pub a3_term: f64,
    pub gap_aba: f64,
    pub gap_bab: f64,
}

/// Evaluates the third-order coefficient of the ordered-minus-word
/// squared-norm difference at the top eigenvector of `mA + nB`, checks
/// the commutator term vanishes there, and fits the same coefficient
/// numerically from the perturbed family.
///
/// Ordered words are rejected: the difference is identically zero and
/// there is no third order to fit.
pub fn third_order_coefficient(word: &Word, a: &SymMatrix, b: &SymMatrix) -> Result<ThirdOrder> {
    if word.is_ordered() {
        return Err(Error::InvalidArgument(format!(
            "word {word} is already ordered; the difference is identically zero"
        )));
    }
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch(format!(
            "third order: dims {} vs {}",
            a.dim(),
            b.dim()
        )));
    }
    let coeffs = extract_coeffs(word);
    let to_f = |x: &num_bigint::BigInt| x.to_f64().expect("small counts fit f64");
    let a3 = to_f(&coeffs.ba);
    let a7 = to_f(&coeffs.aba);
    let a10 = to_f(&coeffs.bab);

    let m = word.total_m();
    let n = word.total_n();
    let y = SymMatrix::linear_comb(m as f64, a, n as f64, b)?;
    let v = eigen_sym(&y)?.eigenvectors.column(0);

    let am = a.as_matrix();
    let bm = b.as_matrix();
    let quad = |mat: &Matrix, v: &[f64]| dot(&mat.matvec(v), v);
    let gap_aba = quad(&am.mul(am).mul(bm), &v) - quad(&am.mul(bm).mul(am), &v);
    let gap_bab = quad(&am.mul(bm).mul(bm), &v) - quad(&bm.mul(am).mul(bm), &v);
    let comm = am.mul(bm).sub(&bm.mul(am));
    let a3_term = 2.0 * a3 * dot(&comm.matvec(&v), &y.as_matrix().matvec(&v));
    let coeff3 = 2.0 * a7 * gap_aba + 2.0 * a10 * gap_bab + a3_term;

    let ordered = word.ordered();
    let mut g = [0.0f64; 3];
    for (i, eps) in [1e-2, 5e-3, 2.5e-3].into_iter().enumerate() {
        let a_eps = a.scale(eps).add_scaled_identity(1.0);
        let b_eps = b.scale(eps).add_scaled_identity(1.0);
        let x_mat = eval_word(word, &a_eps, &b_eps)?;
        let z_mat = eval_word(&ordered, &a_eps, &b_eps)?;
        let v_eps = spectral_norm(&x_mat)?.maximizer;
        let zn = norm2(&z_mat.matvec(&v_eps));
        let xn = norm2(&x_mat.matvec(&v_eps));
        g[i] = (zn * zn - xn * xn) / (eps * eps * eps);
    }
    // Richardson: g(eps) = c3 + c4 eps + O(eps^2); two levels kill the
    // eps and eps^2 terms.
    let r1a = 2.0 * g[1] - g[0];
    let r1b = 2.0 * g[2] - g[1];
    let numeric_fit = (4.0 * r1b - r1a) / 3.0;

    Ok(ThirdOrder {
        coeff3,
        numeric_fit,
        a3_term,
        gap_aba,
        gap_bab,
    })
}

/// Largest eps on the grid `{2^-k : 1 <= k <= 40}` such that the
/// rearrangement gap of `(Id + eps' A, Id + eps' B)` stays above
/// `-1e-12` for every grid eps' at or below it; 0 if none.
pub fn epsilon0_search(word: &Word, a: &SymMatrix, b: &SymMatrix) -> Result<f64> {
    let mut best = 0.0;
    for k in (1..=40u32).rev() {
        let eps = (2.0f64).powi(-(k as i32));
        let a_eps = a.scale(eps).add_scaled_identity(1.0);
        let b_eps = b.scale(eps).add_scaled_identity(1.0);
        let report = rearrangement_gap(word, &a_eps, &b_eps)?;
        if report.gap >= -1e-12 {
            best = eps;
        } else {
            break;
        }
    }
    Ok(best)
}

/// Grids for the classical inequality suite.
#[derive(Clone, Debug, Serialize)]
pub struct ClassicalConfig {
    /// Cordes exponents in [0, 1].
    pub s_grid: Vec<f64>,
    /// Furuta integer exponents.
    pub n_grid: Vec<u32>,
    /// Heinz–Kato interpolation exponents in [0, 1].
    pub alpha_grid: Vec<f64>,
}

impl Default for ClassicalConfig {
    fn default() -> Self {
        ClassicalConfig {
            s_grid: (0..=10).map(|i| i as f64 / 10.0).collect(),
            n_grid: (1..=5).collect(),
            alpha_grid: (0..=4).map(|i| i as f64 / 4.0).collect(),
        }
    }
}

/// Worst slack of one classical inequality over its grid.
#[derive(Clone, Debug, Serialize)]
pub struct ClassicalSlack {
    pub name: &'static str,
    /// Smallest `rhs - lhs` observed.
    pub worst_slack: f64,
    /// Smallest `(rhs - lhs) / max(rhs, tiny)` observed.
    pub worst_rel_slack: f64,
}

/// Per-inequality worst slacks for one `(A, B)` instance.
#[derive(Clone, Debug, Serialize)]
pub struct ClassicalReport {
    pub items: Vec<ClassicalSlack>,
}

impl ClassicalReport {
    pub fn worst_rel_slack(&self) -> f64 {
        self.items
            .iter()
            .map(|i| i.worst_rel_slack)
            .fold(f64::INFINITY, f64::min)
    }
}

fn gaussian_matrix(rows: usize, cols: usize, rng: &mut Rng64) -> Matrix {
    let mut m = Matrix::zeros(rows, cols);
    for i in 0..rows {
        for j in 0..cols {
            m.set(i, j, StandardNormal.sample(rng));
        }
    }
    m
}

fn gaussian_vector(n: usize, rng: &mut Rng64) -> Vec<f64> {
    (0..n).map(|_| StandardNormal.sample(rng)).collect()
}

/// Runs the classical operator-norm inequalities on one PSD pair:
/// Heinz–Löwner `||ABA|| <= ||AAB||`, Cordes `||A^s B^s|| <= ||AB||^s`,
/// Furuta `||AB||^n <= ||A^n B^n||`, McIntosh
/// `||AXB|| <= ||A^2 X||^(1/2) ||X B^2||^(1/2)` with random `X`, and
/// Heinz–Kato `|<Tx, y>| <= ||A^alpha x|| ||B^(1-alpha) y||` with
/// `A = (TᵀT)^(1/2)`, `B = (TTᵀ)^(1/2)` built from a random `T` so the
/// premises hold with equality.
pub fn classical_suite(
    a: &SymMatrix,
    b: &SymMatrix,
    cfg: &ClassicalConfig,
    rng: &mut Rng64,
) -> Result<ClassicalReport> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch(format!(
            "classical suite: dims {} vs {}",
            a.dim(),
            b.dim()
        )));
    }
    let n = a.dim();
    let am = a.as_matrix();
    let bm = b.as_matrix();
    let norm = |m: &Matrix| spectral_norm(m).map(|s| s.value);
    let mut items = Vec::new();

    let mut push = |name: &'static str, points: Vec<(f64, f64)>| {
        let mut worst_slack = f64::INFINITY;
        let mut worst_rel = f64::INFINITY;
        for (lhs, rhs) in points {
            let slack = rhs - lhs;
            worst_slack = worst_slack.min(slack);
            worst_rel = worst_rel.min(slack / rhs.max(1e-300));
        }
        items.push(ClassicalSlack {
            name,
            worst_slack,
            worst_rel_slack: worst_rel,
        });
    };

    // Heinz-Loewner
    push(
        "heinz_lowner",
        vec![(norm(&am.mul(bm).mul(am))?, norm(&am.mul(am).mul(bm))?)],
    );

    // Cordes over the s grid
    let norm_ab = norm(&am.mul(bm))?;
    let mut pts = Vec::new();
    for &s in &cfg.s_grid {
        let lhs = norm(&frac_power(a, s)?.as_matrix().mul(frac_power(b, s)?.as_matrix()))?;
        pts.push((lhs, norm_ab.powf(s)));
    }
    push("cordes", pts);

    // Furuta over the n grid
    let mut pts = Vec::new();
    for &k in &cfg.n_grid {
        let rhs = norm(&am.pow(k).mul(&bm.pow(k)))?;
        pts.push((norm_ab.powi(k as i32), rhs));
    }
    push("furuta", pts);

    // McIntosh with a random X
    let x = gaussian_matrix(n, n, rng);
    let lhs = norm(&am.mul(&x).mul(bm))?;
    let rhs = (norm(&am.mul(am).mul(&x))? * norm(&x.mul(bm).mul(bm))?).sqrt();
    push("mcintosh", vec![(lhs, rhs)]);

    // Heinz-Kato with premises constructed from a random T
    let t = gaussian_matrix(n, n, rng);
    let a_hk = frac_power(&SymMatrix::from_matrix(&t.transpose().mul(&t)), 0.5)?;
    let b_hk = frac_power(&SymMatrix::from_matrix(&t.mul(&t.transpose())), 0.5)?;
    let xv = gaussian_vector(n, rng);
    let yv = gaussian_vector(n, rng);
    let lhs = dot(&t.matvec(&xv), &yv).abs();
    let mut pts = Vec::new();
    for &alpha in &cfg.alpha_grid {
        let ax = frac_power(&a_hk, alpha)?.as_matrix().matvec(&xv);
        let by = frac_power(&b_hk, 1.0 - alpha)?.as_matrix().matvec(&yv);
        pts.push((lhs, norm2(&ax) * norm2(&by)));
    }
    push("heinz_kato", pts);

    Ok(ClassicalReport { items })
}

/// Result of the Recht–Ré inequality check for `n` matrices and `m`
/// factors.
#[derive(Clone, Debug, Serialize)]
pub struct RechtReCheck {
    /// `lhs - rhs`; conjectured nonnegative, proven for n = m = 2.
    pub slack: f64,
    /// `(1/n^m) || sum over all index tuples of A_{j1} ... A_{jm} ||`.
    pub lhs: f64,
    /// The same value computed as `|| ((A_1 + ... + A_n)/n)^m ||`.
    pub lhs_cross_check: f64,
    /// `((n-m)!/n!) || sum over distinct index tuples ||`.
    pub rhs: f64,
}

/// Evaluates both sides of the Recht–Ré inequality by explicit
/// enumeration of index tuples (budget `n^m <= 10^6`), cross-checking
/// the full sum against the closed form `((sum A_j)/n)^m`.
pub fn recht_re_check(mats: &[SymMatrix], m: u32) -> Result<RechtReCheck> {
    let n = mats.len();
    if n == 0 || m == 0 {
        return Err(Error::InvalidArgument("need n >= 1 matrices and m >= 1".into()));
    }
    if m as usize > n {
        return Err(Error::InvalidArgument(format!(
            "need m <= n, got m = {m}, n = {n}"
        )));
    }
    let dim = mats[0].dim();
    if mats.iter().any(|a| a.dim() != dim) {
        return Err(Error::DimensionMismatch("mixed dimensions".into()));
    }
    let tuple_count = (n as f64).powi(m as i32);
    if tuple_count > 1e6 {
        return Err(Error::BudgetExceeded(format!(
            "n^m = {tuple_count} exceeds the 10^6 enumeration budget"
        )));
    }

    let mut sum_all = Matrix::zeros(dim, dim);
    let mut sum_distinct = Matrix::zeros(dim, dim);
    let mut idx = vec![0usize; m as usize];
    loop {
        let mut prod = Matrix::identity(dim);
        for &j in &idx {
            prod = prod.mul(mats[j].as_matrix());
        }
        sum_all = sum_all.add(&prod);
        let distinct = (0..idx.len()).all(|i| (i + 1..idx.len()).all(|j| idx[i] != idx[j]));
        if distinct {
            sum_distinct = sum_distinct.add(&prod);
        }
        // odometer
        let mut pos = idx.len();
        loop {
            if pos == 0 {
                break;
            }
            pos -= 1;
            idx[pos] += 1;
            if idx[pos] < n {
                break;
            }
            idx[pos] = 0;
        }
        if idx.iter().all(|&v| v == 0) {
            break;
        }
    }

    let lhs = spectral_norm(&sum_all)?.value / tuple_count;
    let mut avg = Matrix::zeros(dim, dim);
    for a in mats {
        avg = avg.add(a.as_matrix());
    }
    let lhs_cross_check = spectral_norm(&avg.scale(1.0 / n as f64).pow(m))?.value;
    let falling: f64 = (0..m as usize).map(|i| (n - i) as f64).product();
    let rhs = spectral_norm(&sum_distinct)?.value / falling;

    Ok(RechtReCheck {
        slack: lhs - rhs,
        lhs,
        lhs_cross_check,
        rhs,
    })
}
