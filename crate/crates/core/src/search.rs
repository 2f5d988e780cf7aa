//! Counterexample search over PSD pairs.
//!
//! The search maximizes the violation `||W(A,B)|| - ||A^m B^n||` over
//! Gram-parameterized pairs `A = GGᵀ / ||GGᵀ||`, `B = HHᵀ / ||HHᵀ||`
//! (unconstrained factors, automatically PSD, rank controlled by the
//! factor width). The objective is non-smooth at eigenvalue crossings,
//! so the default optimizer is Nelder–Mead with standard coefficients
//! and restart-on-collapse; finite-difference ascent is available as an
//! alternative. Restarts are independent substreams of the seed and the
//! merge is deterministic for any thread count.

use crate::certify::{certify_candidate, CertifiedCandidate};
use crate::error::{Error, Result};
use crate::linalg::{Matrix, SymMatrix};
use crate::rng::{splitmix64, substream, Rng64};
use crate::verify::rearrangement_gap;
use crate::word::Word;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Derivative-free optimizer choice.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SearchMethod {
    NelderMead,
    FiniteDiffAscent,
}

/// Configuration of one search run.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SearchConfig {
    pub word: Word,
    pub dim: usize,
    pub restarts: u32,
    /// Optimizer iterations per restart.
    pub max_iters: u32,
    /// Factor width `r <= dim`; `r < dim` searches rank-deficient pairs.
    pub factor_rank: usize,
    pub seed: u64,
    pub method: SearchMethod,
    /// Initial simplex step (Nelder–Mead) or initial step length
    /// (finite-difference ascent).
    pub init_step: f64,
    /// Simplex diameter below which the simplex is considered collapsed
    /// and is re-seeded around the incumbent.
    pub collapse_tol: f64,
}

impl SearchConfig {
    pub fn new(word: Word, dim: usize) -> SearchConfig {
        SearchConfig {
            word,
            dim,
            restarts: 64,
            max_iters: 2000,
            factor_rank: dim,
            seed: 0,
            method: SearchMethod::NelderMead,
            init_step: 0.5,
            collapse_tol: 1e-9,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.dim < 2 {
            return Err(Error::InvalidArgument("search needs dim >= 2".into()));
        }
        if self.restarts < 1 {
            return Err(Error::InvalidArgument("search needs restarts >= 1".into()));
        }
        if self.factor_rank < 1 || self.factor_rank > self.dim {
            return Err(Error::InvalidArgument(format!(
                "factor rank must satisfy 1 <= r <= dim, got {} (dim {})",
                self.factor_rank, self.dim
            )));
        }
        if !(self.init_step > 0.0) || !(self.collapse_tol > 0.0) {
            return Err(Error::InvalidArgument(
                "init_step and collapse_tol must be positive".into(),
            ));
        }
        Ok(())
    }
}

/// Best candidate found by a search run.
#[derive(Clone, Debug, Serialize)]
pub struct SearchResult {
    /// `||W|| - ||A^m B^n||` at the optimum; positive means violation.
    pub best_violation: f64,
    pub a: SymMatrix,
    pub b: SymMatrix,
    /// Restart that produced the winner (ties break to the lowest).
    pub restart_index: u32,
    /// Optimizer iterations used by the winning restart.
    pub iterations_used: u32,
    /// Total objective evaluations across all restarts.
    pub objective_evals: u64,
}

/// Builds the normalized PSD pair from factors.
pub fn factors_to_pair(g: &Matrix, h: &Matrix) -> Result<(SymMatrix, SymMatrix)> {
    let normalize = |f: &Matrix| -> Result<SymMatrix> {
        let gram = SymMatrix::gram(f);
        let norm = gram.spectral_norm()?;
        Ok(if norm > 0.0 {
            let mut s = gram.scale(1.0 / norm);
            s = SymMatrix::from_matrix(s.as_matrix());
            s
        } else {
            gram
        })
    };
    Ok((normalize(g)?, normalize(h)?))
}

/// Violation of the rearrangement inequality at the normalized pair
/// built from the factors: positive values are violations. Scale
/// invariance of the inequality makes the normalization harmless.
pub fn objective(word: &Word, g: &Matrix, h: &Matrix) -> Result<f64> {
    let (a, b) = factors_to_pair(g, h)?;
    let report = rearrangement_gap(word, &a, &b)?;
    Ok(-report.gap)
}

fn unpack_factors(x: &[f64], dim: usize, rank: usize) -> (Matrix, Matrix) {
    let mut g = Matrix::zeros(dim, rank);
    let mut h = Matrix::zeros(dim, rank);
    let half = dim * rank;
    for i in 0..dim {
        for j in 0..rank {
            g.set(i, j, x[i * rank + j]);
            h.set(i, j, x[half + i * rank + j]);
        }
    }
    (g, h)
}

struct RestartOutcome {
    violation: f64,
    x: Vec<f64>,
    iterations: u32,
    evals: u64,
}

/// Runs independent restarts and returns the best candidate.
///
/// Deterministic for a given `(seed, config)`: each restart draws from
/// substream `restart_index` and the merge prefers higher violation,
/// then lower restart index.
pub fn run_search(config: &SearchConfig) -> Result<SearchResult> {
    config.validate()?;
    let dim = config.dim;
    let rank = config.factor_rank;
    let d = 2 * dim * rank;

    let outcomes: Vec<RestartOutcome> = (0..config.restarts)
        .into_par_iter()
        .map(|restart| {
            let mut rng = substream(config.seed, restart as u64);
            let mut evals: u64 = 0;
            let mut eval = |x: &[f64]| {
                evals += 1;
                let (g, h) = unpack_factors(x, dim, rank);
                // Non-convergence is treated as a worthless point rather
                // than aborting the whole search.
                match objective(&config.word, &g, &h) {
                    Ok(v) => -v, // minimize the negated violation
                    Err(_) => f64::INFINITY,
                }
            };
            let x0: Vec<f64> = (0..d).map(|_| StandardNormal.sample(&mut rng)).collect();
            let (x, fmin, iterations) = match config.method {
                SearchMethod::NelderMead => nelder_mead(
                    &mut eval,
                    x0,
                    &mut rng,
                    config.max_iters,
                    config.init_step,
                    config.collapse_tol,
                ),
                SearchMethod::FiniteDiffAscent => {
                    finite_diff_ascent(&mut eval, x0, config.max_iters, config.init_step)
                }
            };
            RestartOutcome {
                // + 0.0 normalizes a negative zero
                violation: -fmin + 0.0,
                x,
                iterations,
                evals,
            }
        })
        .collect();

    let mut best = 0usize;
    for i in 1..outcomes.len() {
        if outcomes[i].violation > outcomes[best].violation {
            best = i;
        }
    }
    let total_evals = outcomes.iter().map(|o| o.evals).sum();
    let winner = &outcomes[best];
    let (g, h) = unpack_factors(&winner.x, dim, rank);
    let (a, b) = factors_to_pair(&g, &h)?;
    Ok(SearchResult {
        best_violation: winner.violation,
        a,
        b,
        restart_index: best as u32,
        iterations_used: winner.iterations,
        objective_evals: total_evals,
    })
}

/// Nelder–Mead with reflection 1, expansion 2, contraction 1/2, shrink
/// 1/2, re-seeding the simplex around the incumbent on collapse.
fn nelder_mead(
    f: &mut impl FnMut(&[f64]) -> f64,
    x0: Vec<f64>,
    rng: &mut Rng64,
    max_iters: u32,
    init_step: f64,
    collapse_tol: f64,
) -> (Vec<f64>, f64, u32) {
    let d = x0.len();
    let mut pts: Vec<Vec<f64>> = Vec::with_capacity(d + 1);
    let mut fv: Vec<f64> = Vec::with_capacity(d + 1);
    pts.push(x0.clone());
    for i in 0..d {
        let mut p = x0.clone();
        p[i] += init_step;
        pts.push(p);
    }
    for p in &pts {
        fv.push(f(p));
    }

    let mut iterations = 0;
    for _ in 0..max_iters {
        iterations += 1;
        // order: best first, worst last
        let mut idx: Vec<usize> = (0..pts.len()).collect();
        idx.sort_by(|&i, &j| fv[i].partial_cmp(&fv[j]).expect("no NaN objective"));
        let reorder = |v: &mut Vec<Vec<f64>>, fv: &mut Vec<f64>, idx: &[usize]| {
            let new_v: Vec<Vec<f64>> = idx.iter().map(|&i| v[i].clone()).collect();
            let new_f: Vec<f64> = idx.iter().map(|&i| fv[i]).collect();
            *v = new_v;
            *fv = new_f;
        };
        reorder(&mut pts, &mut fv, &idx);

        // collapse check: re-seed around the incumbent
        let diameter = pts[1..]
            .iter()
            .map(|p| {
                p.iter()
                    .zip(&pts[0])
                    .map(|(a, b)| (a - b).abs())
                    .fold(0.0f64, f64::max)
            })
            .fold(0.0f64, f64::max);
        if diameter < collapse_tol {
            let best = pts[0].clone();
            let scale = 0.25 * init_step;
            for i in 1..pts.len() {
                let p: Vec<f64> = best
                    .iter()
                    .map(|&v| {
                        let z: f64 = StandardNormal.sample(rng);
                        v + scale * z
                    })
                    .collect();
                fv[i] = f(&p);
                pts[i] = p;
            }
            continue;
        }

        let worst = pts.len() - 1;
        let centroid: Vec<f64> = (0..d)
            .map(|k| pts[..worst].iter().map(|p| p[k]).sum::<f64>() / worst as f64)
            .collect();
        let lerp = |from: &[f64], to: &[f64], t: f64| -> Vec<f64> {
            from.iter().zip(to).map(|(a, b)| a + t * (b - a)).collect()
        };

        // reflect worst through centroid
        let xr = lerp(&centroid, &pts[worst], -1.0);
        let fr = f(&xr);
        if fr < fv[0] {
            let xe = lerp(&centroid, &pts[worst], -2.0);
            let fe = f(&xe);
            if fe < fr {
                pts[worst] = xe;
                fv[worst] = fe;
            } else {
                pts[worst] = xr;
                fv[worst] = fr;
            }
        } else if fr < fv[worst - 1] {
            pts[worst] = xr;
            fv[worst] = fr;
        } else {
            let (xc, fc) = if fr < fv[worst] {
                let xc = lerp(&centroid, &xr, 0.5); // outside contraction
                let fc = f(&xc);
                (xc, fc)
            } else {
                let xc = lerp(&centroid, &pts[worst], 0.5); // inside
                let fc = f(&xc);
                (xc, fc)
            };
            if fc < fv[worst].min(fr) {
                pts[worst] = xc;
                fv[worst] = fc;
            } else {
                // shrink toward best
                for i in 1..pts.len() {
                    pts[i] = lerp(&pts[0], &pts[i], 0.5);
                    fv[i] = f(&pts[i]);
                }
            }
        }
    }

    let mut best = 0;
    for i in 1..pts.len() {
        if fv[i] < fv[best] {
            best = i;
        }
    }
    (pts[best].clone(), fv[best], iterations)
}

/// Central-difference gradient ascent with step halving
/// (h = 1e-6 differences).
fn finite_diff_ascent(
    f: &mut impl FnMut(&[f64]) -> f64,
    x0: Vec<f64>,
    max_iters: u32,
    init_step: f64,
) -> (Vec<f64>, f64, u32) {
    const H: f64 = 1e-6;
    let d = x0.len();
    let mut x = x0;
    let mut fx = f(&x);
    let mut step = init_step;
    let mut iterations = 0;
    for _ in 0..max_iters {
        iterations += 1;
        let mut grad = vec![0.0; d];
        for i in 0..d {
            let mut xp = x.clone();
            let mut xm = x.clone();
            xp[i] += H;
            xm[i] -= H;
            grad[i] = (f(&xp) - f(&xm)) / (2.0 * H); // gradient of f (minimized)
        }
        let gnorm = grad.iter().map(|g| g * g).sum::<f64>().sqrt();
        if gnorm < 1e-14 || step < 1e-12 {
            break;
        }
        let trial: Vec<f64> = x
            .iter()
            .zip(&grad)
            .map(|(xi, gi)| xi - step * gi / gnorm)
            .collect();
        let ft = f(&trial);
        if ft < fx {
            x = trial;
            fx = ft;
            step *= 1.2;
        } else {
            step *= 0.5;
        }
    }
    (x, fx, iterations)
}

/// Classification of a word after a search budget.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepLabel {
    ViolatedCertified,
    ViolatedFloat,
    NoViolationFound,
    Skipped,
}

/// One row of the sweep classification table.
#[derive(Clone, Debug, Serialize)]
pub struct SweepRow {
    pub word: Word,
    pub label: SweepLabel,
    pub best_violation: f64,
}

/// Configuration for sweeping all canonical words up to a length.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SweepConfig {
    pub max_length: usize,
    pub dim: usize,
    pub restarts: u32,
    pub max_iters: u32,
    pub factor_rank: usize,
    pub seed: u64,
    /// Total objective-evaluation budget across all words; words beyond
    /// it are labeled `skipped`.
    pub eval_budget: Option<u64>,
    /// Attempt exact certification of float violations.
    pub certify: bool,
}

/// Float violations below this (on unit-normalized pairs) are treated
/// as roundoff, not candidates.
pub const VIOLATION_THRESHOLD: f64 = 1e-8;

/// Runs [`run_search`] on every canonical word of length up to
/// `max_length`, in (length, lexicographic) order. Per-word seeds are
/// derived with SplitMix64 so words are independent; the total
/// evaluation budget is enforced between words.
pub fn sweep_words(config: &SweepConfig) -> Result<Vec<SweepRow>> {
    if config.max_length > 14 {
        return Err(Error::InvalidArgument(
            "sweep supports max_length <= 14".into(),
        ));
    }
    let words = Word::enumerate_all(config.max_length);
    let mut remaining = config.eval_budget;
    let mut rows = Vec::with_capacity(words.len());
    for (index, word) in words.into_iter().enumerate() {
        if let Some(0) = remaining {
            rows.push(SweepRow {
                word,
                label: SweepLabel::Skipped,
                best_violation: 0.0,
            });
            continue;
        }
        let mut search = SearchConfig::new(word.clone(), config.dim);
        search.restarts = config.restarts;
        search.max_iters = config.max_iters;
        search.factor_rank = config.factor_rank;
        search.seed = splitmix64(config.seed.wrapping_add(splitmix64(index as u64)));
        let result = run_search(&search)?;
        if let Some(budget) = remaining.as_mut() {
            *budget = budget.saturating_sub(result.objective_evals);
        }
        let label = if result.best_violation > VIOLATION_THRESHOLD {
            if config.certify {
                let cand = certify_candidate(&word, &result.a, &result.b, 3, 6)?;
                if cand.certified {
                    SweepLabel::ViolatedCertified
                } else {
                    SweepLabel::ViolatedFloat
                }
            } else {
                SweepLabel::ViolatedFloat
            }
        } else {
            SweepLabel::NoViolationFound
        };
        rows.push(SweepRow {
            word,
            label,
            best_violation: result.best_violation,
        });
    }
    Ok(rows)
}

/// Archive format for a found counterexample, committed as a regression
/// fixture and re-verified by the test suite.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CounterexampleFixture {
    pub word: Word,
    pub dim: usize,
    #[serde(rename = "A")]
    pub a: SymMatrix,
    #[serde(rename = "B")]
    pub b: SymMatrix,
    /// Rearrangement gap of the archived pair (negative: violation).
    pub float_gap: f64,
    pub certified: bool,
    pub certificate: Option<crate::certify::Certificate>,
    pub seed: u64,
    pub config: FixtureSearchConfig,
}

/// The search settings that produced a fixture.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FixtureSearchConfig {
    pub restarts: u32,
    pub max_iters: u32,
    pub factor_rank: usize,
    pub method: SearchMethod,
}

impl CounterexampleFixture {
    /// Builds the archive entry from a search result and its
    /// certification drive.
    pub fn from_candidate(
        config: &SearchConfig,
        candidate: &CertifiedCandidate,
    ) -> CounterexampleFixture {
        CounterexampleFixture {
            word: config.word.clone(),
            dim: config.dim,
            a: candidate.a.clone(),
            b: candidate.b.clone(),
            float_gap: candidate.float_gap,
            certified: candidate.certified,
            certificate: candidate.certificate.clone(),
            seed: config.seed,
            config: FixtureSearchConfig {
                restarts: config.restarts,
                max_iters: config.max_iters,
                factor_rank: config.factor_rank,
                method: config.method,
            },
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::master;

    fn gaussian_factor(dim: usize, rank: usize, rng: &mut Rng64) -> Matrix {
        let mut g = Matrix::zeros(dim, rank);
        for i in 0..dim {
            for j in 0..rank {
                g.set(i, j, StandardNormal.sample(rng));
            }
        }
        g
    }

    #[test]
    fn objective_is_zero_for_equal_factors() {
        let g = gaussian_factor(3, 3, &mut master(1));
        let v = objective(&Word::parse("AABABB").unwrap(), &g, &g).unwrap();
        assert!(v.abs() <= 1e-10);
    }

    #[test]
    fn objective_nonpositive_in_dimension_two() {
        let w = Word::parse("AABABB").unwrap();
        for seed in 0..50 {
            let g = gaussian_factor(2, 2, &mut master(seed));
            let h = gaussian_factor(2, 2, &mut master(1000 + seed));
            let v = objective(&w, &g, &h).unwrap();
            assert!(v <= 1e-10, "seed {seed}: violation {v}");
        }
    }

    #[test]
    fn objective_is_scale_invariant() {
        let w = Word::parse("ABAB").unwrap();
        let g = gaussian_factor(3, 3, &mut master(7));
        let h = gaussian_factor(3, 3, &mut master(8));
        let base = objective(&w, &g, &h).unwrap();
        for c in [0.01, 3.0, 1e4] {
            let v = objective(&w, &g.scale(c), &h).unwrap();
            assert!((v - base).abs() <= 1e-12, "c = {c}");
        }
    }

    #[test]
    fn search_on_ordered_word_finds_nothing() {
        let mut cfg = SearchConfig::new(Word::parse("AAB").unwrap(), 3);
        cfg.restarts = 4;
        cfg.max_iters = 150;
        cfg.seed = 5;
        let r = run_search(&cfg).unwrap();
        assert!(r.best_violation.abs() <= 1e-10);
    }

    #[test]
    fn search_is_deterministic_across_thread_counts() {
        let mut cfg = SearchConfig::new(Word::parse("AABABB").unwrap(), 3);
        cfg.restarts = 6;
        cfg.max_iters = 120;
        cfg.seed = 42;
        let run = |threads: usize| {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap();
            pool.install(|| run_search(&cfg).unwrap())
        };
        let r1 = run(1);
        let r4 = run(4);
        assert_eq!(r1.best_violation.to_bits(), r4.best_violation.to_bits());
        assert_eq!(r1.restart_index, r4.restart_index);
        assert_eq!(r1.a.as_matrix().data(), r4.a.as_matrix().data());
        assert_eq!(r1.objective_evals, r4.objective_evals);
    }

    #[test]
    fn finite_diff_method_runs() {
        let mut cfg = SearchConfig::new(Word::parse("ABAB").unwrap(), 2);
        cfg.restarts = 2;
        cfg.max_iters = 40;
        cfg.method = SearchMethod::FiniteDiffAscent;
        let r = run_search(&cfg).unwrap();
        assert!(r.best_violation <= 1e-10);
    }

    #[test]
    fn config_validation() {
        let w = Word::parse("AB").unwrap();
        assert!(SearchConfig::new(w.clone(), 1).validate().is_err());
        let mut cfg = SearchConfig::new(w.clone(), 3);
        cfg.factor_rank = 4;
        assert!(cfg.validate().is_err());
        let mut cfg = SearchConfig::new(w, 3);
        cfg.restarts = 0;
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn small_sweep_labels_ordered_words_clean() {
        let cfg = SweepConfig {
            max_length: 3,
            dim: 2,
            restarts: 2,
            max_iters: 60,
            factor_rank: 2,
            seed: 3,
            eval_budget: None,
            certify: false,
        };
        let rows = sweep_words(&cfg).unwrap();
        assert_eq!(rows.len(), 2 + 4 + 8);
        for row in &rows {
            assert_eq!(row.label, SweepLabel::NoViolationFound, "{}", row.word);
        }
        // sorted by length then lexicographically
        assert_eq!(rows[0].word, Word::parse("A").unwrap());
        assert_eq!(rows[1].word, Word::parse("B").unwrap());
        assert_eq!(rows[2].word, Word::parse("AA").unwrap());
    }

    #[test]
    fn sweep_budget_skips_tail() {
        let cfg = SweepConfig {
            max_length: 2,
            dim: 2,
            restarts: 1,
            max_iters: 30,
            factor_rank: 2,
            seed: 3,
            eval_budget: Some(40),
            certify: false,
        };
        let rows = sweep_words(&cfg).unwrap();
        assert!(rows.iter().any(|r| r.label == SweepLabel::Skipped));
    }
}
