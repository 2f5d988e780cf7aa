//! Batch verification suites with machine-readable per-instance records.
//!
//! Each suite samples independent instances (one RNG substream per
//! instance index), evaluates its checks at fixed tolerances, and
//! returns one record per instance. Instances are evaluated in parallel
//! when a rayon pool is installed; records are collected in index
//! order and every random draw comes from the instance's own substream,
//! so reports are byte-identical for any thread count.

use crate::error::{Error, Result};
use crate::linalg::{commutator_min_sv, sample_psd, SymMatrix};
use crate::ncpoly::extract_coeffs;
use crate::rng::{substream, Rng64};
use crate::search::VIOLATION_THRESHOLD;
use crate::verify::{
    certificate_2x2, classical_suite, epsilon0_search, rearrangement_gap, recht_re_check,
    third_order_coefficient, trace_inequality, ClassicalConfig, ClassicalSlack,
};
use crate::word::Word;
use num_bigint::BigInt;
use num_traits::Zero;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

/// The named verification suites exposed by the CLI.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SuiteKind {
    /// 2×2 rearrangement gap plus the eigenvalue certificate.
    Theorem1,
    /// Third-order perturbation checks and the epsilon threshold.
    Theorem2,
    /// 2×2 power-trace inequality.
    Trace2x2,
    /// Classical operator-norm inequalities.
    Classical,
    /// Recht–Ré sum inequality at n = m = 2.
    RechtRe,
}

impl FromStr for SuiteKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<SuiteKind> {
        match s {
            "theorem1" => Ok(SuiteKind::Theorem1),
            "theorem2" => Ok(SuiteKind::Theorem2),
            "trace2x2" => Ok(SuiteKind::Trace2x2),
            "classical" => Ok(SuiteKind::Classical),
            "rechtre" => Ok(SuiteKind::RechtRe),
            other => Err(Error::InvalidArgument(format!(
                "unknown suite {other:?} (expected theorem1|theorem2|trace2x2|classical|rechtre)"
            ))),
        }
    }
}

impl fmt::Display for SuiteKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            SuiteKind::Theorem1 => "theorem1",
            SuiteKind::Theorem2 => "theorem2",
            SuiteKind::Trace2x2 => "trace2x2",
            SuiteKind::Classical => "classical",
            SuiteKind::RechtRe => "rechtre",
        };
        write!(f, "{name}")
    }
}

/// Configuration shared by all suites.
#[derive(Clone, Debug, Serialize)]
pub struct SuiteConfig {
    pub kind: SuiteKind,
    pub samples: u64,
    pub seed: u64,
    /// Fixed dimension; suites with a default (theorem1/theorem2/
    /// trace2x2 are 2×2 statements) validate it, the others cycle
    /// through dims 2..=4 when unset.
    pub dim: Option<usize>,
    /// Maximum sampled word length.
    pub max_word_len: usize,
    /// Fixed word instead of per-instance sampling.
    pub word: Option<Word>,
}

impl SuiteConfig {
    pub fn new(kind: SuiteKind, samples: u64, seed: u64) -> SuiteConfig {
        SuiteConfig {
            kind,
            samples,
            seed,
            dim: None,
            max_word_len: 12,
            word: None,
        }
    }
}

/// Per-instance record of the theorem1 suite.
#[derive(Clone, Debug, Serialize)]
pub struct GapCertRecord {
    /// Substream index of this instance.
    pub seed: u64,
    pub word: String,
    pub dim: usize,
    pub rank_a: usize,
    pub rank_b: usize,
    pub gap: f64,
    pub norm_word: f64,
    pub norm_ordered: f64,
    pub trace_slack: f64,
    pub det_mismatch: f64,
    pub lambda1: f64,
    pub mu1: f64,
    pub pass: bool,
}

/// Per-instance record of the theorem2 suite.
#[derive(Clone, Debug, Serialize)]
pub struct ThirdOrderRecord {
    pub seed: u64,
    pub word: String,
    pub min_sv: f64,
    pub coeff3: f64,
    pub numeric_fit: f64,
    pub a3_term: f64,
    pub eps0: f64,
    pub pass: bool,
}

/// Per-instance record of the trace2x2 suite.
#[derive(Clone, Debug, Serialize)]
pub struct TraceRecord {
    pub seed: u64,
    pub dim: usize,
    pub splits: usize,
    pub slack: f64,
    pub tr_cd: f64,
    pub warn_only: bool,
    pub pass: bool,
}

/// Per-instance record of the classical suite.
#[derive(Clone, Debug, Serialize)]
pub struct ClassicalRecord {
    pub seed: u64,
    pub dim: usize,
    pub items: Vec<ClassicalSlack>,
    pub pass: bool,
}

/// Per-instance record of the rechtre suite.
#[derive(Clone, Debug, Serialize)]
pub struct RechtReRecord {
    pub seed: u64,
    pub dim: usize,
    pub slack: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub cross_check_err: f64,
    pub pass: bool,
}

/// Typed per-suite record collections.
#[derive(Clone, Debug, Serialize)]
#[serde(untagged)]
pub enum SuiteRecords {
    GapCert(Vec<GapCertRecord>),
    ThirdOrder(Vec<ThirdOrderRecord>),
    Trace(Vec<TraceRecord>),
    Classical(Vec<ClassicalRecord>),
    RechtRe(Vec<RechtReRecord>),
}

impl SuiteRecords {
    pub fn len(&self) -> usize {
        match self {
            SuiteRecords::GapCert(v) => v.len(),
            SuiteRecords::ThirdOrder(v) => v.len(),
            SuiteRecords::Trace(v) => v.len(),
            SuiteRecords::Classical(v) => v.len(),
            SuiteRecords::RechtRe(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Result of one suite run.
#[derive(Clone, Debug, Serialize)]
pub struct SuiteReport {
    pub suite: SuiteKind,
    pub samples: u64,
    pub failures: u64,
    pub pass: bool,
    pub records: SuiteRecords,
}

/// Dispatches to the suite named in the config.
pub fn run_suite(config: &SuiteConfig) -> Result<SuiteReport> {
    match config.kind {
        SuiteKind::Theorem1 => suite_theorem1(config),
        SuiteKind::Theorem2 => suite_theorem2(config),
        SuiteKind::Trace2x2 => suite_trace_2x2(config),
        SuiteKind::Classical => suite_classical(config),
        SuiteKind::RechtRe => suite_recht_re(config),
    }
}

fn finish<R>(
    config: &SuiteConfig,
    records: Vec<R>,
    failures: u64,
    wrap: fn(Vec<R>) -> SuiteRecords,
) -> SuiteReport {
    SuiteReport {
        suite: config.kind,
        samples: config.samples,
        failures,
        pass: failures == 0,
        records: wrap(records),
    }
}

fn sample_rank(rng: &mut Rng64, dim: usize) -> usize {
    rng.gen_range(1..=dim)
}

/// 2×2 suite: for random PSD pairs of mixed ranks and random words, the
/// rearrangement gap is nonnegative (to `1e-10` relative) and the
/// eigenvalue certificate identities hold: trace slack `>= -1e-9`
/// relative, determinant mismatch `<= 1e-8`, `mu1 <= lambda1` to `1e-9`
/// relative, and the certificate spectra match the reported norms.
pub fn suite_theorem1(config: &SuiteConfig) -> Result<SuiteReport> {
    if let Some(dim) = config.dim {
        if dim != 2 {
            return Err(Error::InvalidArgument(format!(
                "the theorem1 suite is a 2x2 statement; got dim {dim}"
            )));
        }
    }
    let records: Vec<GapCertRecord> = (0..config.samples)
        .into_par_iter()
        .map(|i| {
            let mut rng = substream(config.seed, i);
            let rank_a = sample_rank(&mut rng, 2);
            let rank_b = sample_rank(&mut rng, 2);
            let a = sample_psd(2, rank_a, true, &mut rng);
            let b = sample_psd(2, rank_b, true, &mut rng);
            let word = config
                .word
                .clone()
                .unwrap_or_else(|| Word::sample(&mut rng, config.max_word_len));
            let gap = rearrangement_gap(&word, &a, &b)?;
            let cert = certificate_2x2(&word, &a, &b)?;
            let scale = cert.lambda[0].max(cert.mu[0]).max(1e-300);
            let spectra_psd = cert.lambda[1] >= -1e-10 * scale && cert.mu[1] >= -1e-10 * scale;
            let norms_consistent = (cert.lambda[0] - gap.norm_ordered * gap.norm_ordered).abs()
                <= 1e-9 * scale
                && (cert.mu[0] - gap.norm_word * gap.norm_word).abs() <= 1e-9 * scale;
            let pass = gap.gap >= -1e-10 * gap.norm_ordered
                && cert.trace_slack >= -1e-9 * (cert.lambda[0] + cert.lambda[1])
                && cert.det_mismatch <= 1e-8
                && cert.mu[0] <= cert.lambda[0] + 1e-9 * scale
                && spectra_psd
                && norms_consistent;
            Ok(GapCertRecord {
                seed: i,
                word: word.letter_string(),
                dim: 2,
                rank_a,
                rank_b,
                gap: gap.gap,
                norm_word: gap.norm_word,
                norm_ordered: gap.norm_ordered,
                trace_slack: cert.trace_slack,
                det_mismatch: cert.det_mismatch,
                lambda1: cert.lambda[0],
                mu1: cert.mu[0],
                pass,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let failures = records.iter().filter(|r| !r.pass).count() as u64;
    Ok(finish(config, records, failures, SuiteRecords::GapCert))
}

fn sample_noncommuting_pair(rng: &mut Rng64) -> Result<(SymMatrix, SymMatrix, f64)> {
    loop {
        let a = sample_psd(2, 2, true, rng);
        let b = sample_psd(2, 2, true, rng);
        let min_sv = commutator_min_sv(&a, &b)?;
        if min_sv > 1e-3 {
            return Ok((a, b, min_sv));
        }
    }
}

/// Samples a word whose third-order coefficients `a7 + a10` are
/// nonzero; words that are ordered either way round have an identically
/// zero difference and nothing to check at third order.
fn sample_third_order_word(rng: &mut Rng64, max_len: usize) -> Word {
    loop {
        let w = Word::sample(rng, max_len);
        let c = extract_coeffs(&w);
        if &c.aba + &c.bab > BigInt::zero() {
            return w;
        }
    }
}

/// Perturbation suite on 2×2 pairs with well-separated commutator: the
/// symbolic third-order coefficient is strictly positive, its commutator
/// term vanishes (`<= 1e-10`), the Richardson fit agrees within 10%, and
/// the epsilon threshold of the perturbed family is at least `2^-20`.
pub fn suite_theorem2(config: &SuiteConfig) -> Result<SuiteReport> {
    if let Some(dim) = config.dim {
        if dim != 2 {
            return Err(Error::InvalidArgument(format!(
                "the theorem2 suite samples 2x2 pairs (nonsingular commutators); got dim {dim}"
            )));
        }
    }
    let records: Vec<ThirdOrderRecord> = (0..config.samples)
        .into_par_iter()
        .map(|i| {
            let mut rng = substream(config.seed, i);
            let (a, b, min_sv) = sample_noncommuting_pair(&mut rng)?;
            let word = config
                .word
                .clone()
                .unwrap_or_else(|| sample_third_order_word(&mut rng, config.max_word_len));
            let t = third_order_coefficient(&word, &a, &b)?;
            let eps0 = epsilon0_search(&word, &a, &b)?;
            let pass = t.coeff3 > 0.0
                && t.a3_term.abs() <= 1e-10
                && (t.numeric_fit - t.coeff3).abs() <= 0.10 * t.coeff3.abs()
                && eps0 >= (2.0f64).powi(-20);
            Ok(ThirdOrderRecord {
                seed: i,
                word: word.letter_string(),
                min_sv,
                coeff3: t.coeff3,
                numeric_fit: t.numeric_fit,
                a3_term: t.a3_term,
                eps0,
                pass,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let failures = records.iter().filter(|r| !r.pass).count() as u64;
    Ok(finish(config, records, failures, SuiteRecords::ThirdOrder))
}

/// Power-trace suite: random PSD pairs and random exponent splittings
/// with `k <= 4`; slack must stay above `-1e-9 * tr(CD)` in dimension 2.
/// Dimension 3 runs in warn-only mode (violations are recorded, never
/// failed).
pub fn suite_trace_2x2(config: &SuiteConfig) -> Result<SuiteReport> {
    let dim = config.dim.unwrap_or(2);
    if dim != 2 && dim != 3 {
        return Err(Error::InvalidArgument(format!(
            "trace suite supports dim 2 (asserted) or 3 (warn-only), got {dim}"
        )));
    }
    let records: Vec<TraceRecord> = (0..config.samples)
        .into_par_iter()
        .map(|i| {
            let mut rng = substream(config.seed, i);
            let c = sample_psd(dim, dim, true, &mut rng);
            let d = sample_psd(dim, dim, true, &mut rng);
            let k = rng.gen_range(1..=4usize);
            let dirichlet = |rng: &mut Rng64| -> Vec<f64> {
                let draws: Vec<f64> = (0..k)
                    .map(|_| -(1.0 - rng.gen::<f64>()).ln())
                    .collect();
                let total: f64 = draws.iter().sum();
                draws.iter().map(|x| x / total).collect()
            };
            let p = dirichlet(&mut rng);
            let q = dirichlet(&mut rng);
            // Renormalize exactly once more so the 1e-12 precondition is
            // met bit-for-bit even after float division.
            let exps: Vec<(f64, f64)> = p.iter().zip(&q).map(|(&x, &y)| (x, y)).collect();
            let check = trace_inequality(&c, &d, &exps)?;
            let pass = check.warn_only || check.slack >= -1e-9 * check.tr_cd.abs();
            Ok(TraceRecord {
                seed: i,
                dim,
                splits: k,
                slack: check.slack,
                tr_cd: check.tr_cd,
                warn_only: check.warn_only,
                pass,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let failures = records.iter().filter(|r| !r.pass).count() as u64;
    Ok(finish(config, records, failures, SuiteRecords::Trace))
}

/// Classical inequalities on random PSD pairs; dimension cycles through
/// 2..=4 unless fixed. Every slack must stay above `-1e-9` relative to
/// its right-hand side.
pub fn suite_classical(config: &SuiteConfig) -> Result<SuiteReport> {
    let cfg = ClassicalConfig::default();
    let records: Vec<ClassicalRecord> = (0..config.samples)
        .into_par_iter()
        .map(|i| {
            let mut rng = substream(config.seed, i);
            let dim = config.dim.unwrap_or(2 + (i % 3) as usize);
            let a = sample_psd(dim, dim, true, &mut rng);
            let b = sample_psd(dim, dim, true, &mut rng);
            let report = classical_suite(&a, &b, &cfg, &mut rng)?;
            let pass = report.worst_rel_slack() >= -1e-9;
            Ok(ClassicalRecord {
                seed: i,
                dim,
                items: report.items,
                pass,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let failures = records.iter().filter(|r| !r.pass).count() as u64;
    Ok(finish(config, records, failures, SuiteRecords::Classical))
}

/// Recht–Ré suite in the proven regime n = m = 2: the averaged full sum
/// dominates the distinct sum, with the closed-form cross-check of the
/// full sum agreeing to `1e-9` relative.
pub fn suite_recht_re(config: &SuiteConfig) -> Result<SuiteReport> {
    let records: Vec<RechtReRecord> = (0..config.samples)
        .into_par_iter()
        .map(|i| {
            let mut rng = substream(config.seed, i);
            let dim = config.dim.unwrap_or(2 + (i % 3) as usize);
            let a = sample_psd(dim, dim, true, &mut rng);
            let b = sample_psd(dim, dim, true, &mut rng);
            let r = recht_re_check(&[a, b], 2)?;
            let scale = r.lhs.abs().max(r.rhs.abs()).max(1e-300);
            let cross_check_err = (r.lhs - r.lhs_cross_check).abs() / r.lhs.abs().max(1e-300);
            let pass = r.slack >= -1e-9 * scale && cross_check_err <= 1e-9;
            Ok(RechtReRecord {
                seed: i,
                dim,
                slack: r.slack,
                lhs: r.lhs,
                rhs: r.rhs,
                cross_check_err,
                pass,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let failures = records.iter().filter(|r| !r.pass).count() as u64;
    Ok(finish(config, records, failures, SuiteRecords::RechtRe))
}

/// Search smoke criterion used by reports: a violation above the float
/// threshold.
pub fn is_float_violation(best_violation: f64) -> bool {
    best_violation > VIOLATION_THRESHOLD
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_kind_round_trips() {
        for name in ["theorem1", "theorem2", "trace2x2", "classical", "rechtre"] {
            let kind: SuiteKind = name.parse().unwrap();
            assert_eq!(kind.to_string(), name);
        }
        assert!("bogus".parse::<SuiteKind>().is_err());
    }

    #[test]
    fn theorem1_suite_small_run_passes() {
        let cfg = SuiteConfig::new(SuiteKind::Theorem1, 200, 7);
        let report = run_suite(&cfg).unwrap();
        assert!(report.pass, "failures: {}", report.failures);
        assert_eq!(report.records.len(), 200);
    }

    #[test]
    fn theorem1_rejects_other_dims() {
        let mut cfg = SuiteConfig::new(SuiteKind::Theorem1, 1, 7);
        cfg.dim = Some(3);
        assert!(run_suite(&cfg).is_err());
    }

    #[test]
    fn theorem2_suite_small_run_passes() {
        let cfg = SuiteConfig::new(SuiteKind::Theorem2, 25, 11);
        let report = run_suite(&cfg).unwrap();
        assert!(report.pass, "failures: {}", report.failures);
    }

    #[test]
    fn trace_suite_small_run_passes_and_dim3_warns() {
        let cfg = SuiteConfig::new(SuiteKind::Trace2x2, 200, 13);
        let report = run_suite(&cfg).unwrap();
        assert!(report.pass);

        let mut cfg = SuiteConfig::new(SuiteKind::Trace2x2, 50, 13);
        cfg.dim = Some(3);
        let report = run_suite(&cfg).unwrap();
        assert!(report.pass); // warn-only mode never fails
        if let SuiteRecords::Trace(rs) = &report.records {
            assert!(rs.iter().all(|r| r.warn_only));
        } else {
            panic!("wrong record type");
        }
    }

    #[test]
    fn classical_and_rechtre_small_runs_pass() {
        let report = run_suite(&SuiteConfig::new(SuiteKind::Classical, 60, 17)).unwrap();
        assert!(report.pass, "failures: {}", report.failures);
        let report = run_suite(&SuiteConfig::new(SuiteKind::RechtRe, 60, 19)).unwrap();
        assert!(report.pass, "failures: {}", report.failures);
    }

    #[test]
    fn reports_are_thread_count_invariant() {
        let cfg = SuiteConfig::new(SuiteKind::Theorem1, 64, 23);
        let run = |threads: usize| {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap();
            let report = pool.install(|| run_suite(&cfg).unwrap());
            serde_json::to_string(&report).unwrap()
        };
        assert_eq!(run(1), run(4));
    }
}
