//! Acceptance suite: one test per shipped claim, each printing a
//! PASS line with its headline numbers. Tolerances are pinned in the
//! assertions; sample sizes match the shipped contract.

use matword::certify::{certify, certify_candidate};
use matword::linalg::{commutator_min_sv, sample_psd, SymMatrix};
use matword::ncpoly::{cancellation_difference, expand_word, Monomial};
use matword::rng::{master, substream};
use matword::search::{run_search, CounterexampleFixture, SearchConfig};
use matword::suites::{run_suite, SuiteConfig, SuiteKind};
use matword::verify::{
    maximizer_projection_decay, rearrangement_gap, top_eigenvector_gaps,
};
use matword::word::{Letter, Word};
use std::time::Instant;

fn single_threaded<R: Send>(f: impl FnOnce() -> R + Send) -> R {
    rayon::ThreadPoolBuilder::new()
        .num_threads(1)
        .build()
        .expect("pool")
        .install(f)
}

#[test]
fn c01_gap_suite_100k_2x2_instances() {
    let t0 = Instant::now();
    let cfg = SuiteConfig::new(SuiteKind::Theorem1, 100_000, 20_240_801);
    let report = single_threaded(|| run_suite(&cfg)).unwrap();
    let elapsed = t0.elapsed();
    assert!(report.pass, "failures: {}", report.failures);
    assert!(
        elapsed.as_secs_f64() <= 60.0,
        "single-threaded runtime {elapsed:?} exceeds 60 s"
    );
    println!(
        "criterion 01 PASS: 10^5 2x2 gap+certificate instances, 0 failures, {:.1?} single-threaded",
        elapsed
    );
}

#[test]
fn c02_certificate_suite_10k_instances() {
    let cfg = SuiteConfig::new(SuiteKind::Theorem1, 10_000, 20_240_802);
    let report = run_suite(&cfg).unwrap();
    assert!(report.pass, "failures: {}", report.failures);
    println!("criterion 02 PASS: 10^4 trace/determinant certificates, 0 failures");
}

#[test]
fn c03_trace_inequality_suite_10k() {
    let cfg = SuiteConfig::new(SuiteKind::Trace2x2, 10_000, 20_240_803);
    let report = run_suite(&cfg).unwrap();
    assert!(report.pass, "failures: {}", report.failures);
    println!("criterion 03 PASS: 10^4 power-trace splittings, slack >= -1e-9 tr(CD)");
}

#[test]
fn c04_symbolic_cancellation_all_words_len_12() {
    let t0 = Instant::now();
    let words = Word::enumerate_interior(12);
    assert_eq!(words.len(), 2047);
    for word in &words {
        for k in 0..=2 {
            let d = cancellation_difference(word, k).unwrap();
            assert!(d.is_zero(), "word {} order {k}: {d}", word.letter_string());
        }
    }
    let elapsed = t0.elapsed();
    assert!(
        elapsed.as_secs_f64() <= 10.0,
        "runtime {elapsed:?} exceeds 10 s"
    );
    println!(
        "criterion 04 PASS: exact order-0/1/2 cancellation on all 2047 words, {:.1?}",
        elapsed
    );
}

// Independent oracle: count monomials over explicit position subsets.
fn brute_force_counts(letters: &[Letter], degree: usize) -> Vec<(String, u64)> {
    use std::collections::BTreeMap;
    let mut counts: BTreeMap<String, u64> = BTreeMap::new();
    let n = letters.len();
    let mut chosen = vec![0usize; degree];
    fn walk(
        letters: &[Letter],
        counts: &mut std::collections::BTreeMap<String, u64>,
        chosen: &mut Vec<usize>,
        depth: usize,
        start: usize,
        n: usize,
    ) {
        let degree = chosen.len();
        if depth == degree {
            let mono: String = chosen.iter().map(|&i| letters[i].as_char()).collect();
            *counts.entry(mono).or_default() += 1;
            return;
        }
        for i in start..n {
            chosen[depth] = i;
            walk(letters, counts, chosen, depth + 1, i + 1, n);
        }
    }
    if degree == 0 {
        counts.insert("1".to_string(), 1);
    } else {
        walk(letters, &mut counts, &mut chosen, 0, 0, n);
    }
    counts.into_iter().collect()
}

#[test]
fn c05_expansion_matches_subset_enumeration_oracle() {
    use num_traits::ToPrimitive;
    let mut rng = master(20_240_805);
    for _ in 0..100 {
        let word = Word::sample(&mut rng, 10);
        let letters = word.letters();
        for degree in 0..=3usize {
            let poly = expand_word(&word, degree);
            let expected = brute_force_counts(&letters, degree);
            // every oracle count appears exactly
            for (mono, count) in &expected {
                let c = poly.coeff(&Monomial::parse(mono).unwrap());
                assert_eq!(c.to_u64(), Some(*count), "word {} {mono}", word.letter_string());
            }
            // and no spurious degree-d monomials exist
            let stored: u64 = poly
                .terms()
                .filter(|(m, _)| m.degree() == degree)
                .map(|(_, c)| c.to_u64().unwrap())
                .sum();
            let oracle: u64 = expected.iter().map(|(_, c)| *c).sum();
            assert_eq!(stored, oracle);
        }
    }
    println!("criterion 05 PASS: 100 random words, degrees <= 3, exact oracle match");
}

#[test]
fn c06_perturbation_suite_1k() {
    let cfg = SuiteConfig::new(SuiteKind::Theorem2, 1_000, 20_240_806);
    let report = run_suite(&cfg).unwrap();
    assert!(report.pass, "failures: {}", report.failures);
    println!(
        "criterion 06 PASS: 10^3 third-order instances (coeff3 > 0, commutator term <= 1e-10, \
         Richardson within 10%, eps0 >= 2^-20)"
    );
}

#[test]
fn c07_projection_decay_and_eigenvector_gaps() {
    // linear-decay bound on 100 random 4x4 instances
    let eps: Vec<f64> = (4..=10).map(|k| (2.0f64).powi(-k)).collect();
    for i in 0..100u64 {
        let mut rng = substream(20_240_807, i);
        let a = sample_psd(4, 4, true, &mut rng);
        let b = sample_psd(4, 4, true, &mut rng);
        let word = Word::sample(&mut rng, 8);
        let r = maximizer_projection_decay(&word, &a, &b, &eps).unwrap();
        let max_defect = r.samples.iter().map(|s| s.defect).fold(0.0f64, f64::max);
        for s in &r.samples {
            assert!(s.defect >= -1e-12, "instance {i}");
        }
        if max_defect > 1e-12 {
            let max_ratio = r
                .samples
                .iter()
                .map(|s| s.defect / s.eps)
                .fold(0.0f64, f64::max);
            assert!(
                max_ratio <= 2.0 * r.c1,
                "instance {i} word {}: max ratio {max_ratio} vs fitted C1 {}",
                word.letter_string(),
                r.c1
            );
            assert!(
                r.threshold >= (2.0f64).powi(-10),
                "instance {i}: fitted bound fails even at the smallest eps"
            );
        }
    }

    // strict gaps at the top eigenvector on 10^3 noncommuting 2x2 pairs
    for i in 0..1_000u64 {
        let mut rng = substream(20_240_907, i);
        let (a, b) = loop {
            let a = sample_psd(2, 2, true, &mut rng);
            let b = sample_psd(2, 2, true, &mut rng);
            if commutator_min_sv(&a, &b).unwrap() > 1e-3 {
                break (a, b);
            }
        };
        let m = 1 + (i % 6) as u32;
        let n = 1 + (i / 6 % 6) as u32;
        let g = top_eigenvector_gaps(m, n, &a, &b).unwrap();
        assert!(
            g.gap_aba > 0.0 && g.gap_bab > 0.0,
            "instance {i}: gaps {} {}",
            g.gap_aba,
            g.gap_bab
        );
    }

    // and exact zeros for commuting pairs
    for i in 0..100u64 {
        let mut rng = substream(20_241_007, i);
        use rand::Rng;
        let diag = |rng: &mut matword::rng::Rng64| {
            SymMatrix::diag(&[rng.gen::<f64>(), rng.gen::<f64>()])
        };
        let a = diag(&mut rng);
        let b = diag(&mut rng);
        let g = top_eigenvector_gaps(2, 3, &a, &b).unwrap();
        assert!(g.gap_aba.abs() <= 1e-10 && g.gap_bab.abs() <= 1e-10, "instance {i}");
    }
    println!(
        "criterion 07 PASS: projection decay bounded by fitted C1 (within 2x) on 100 4x4 \
         instances; eigenvector gaps strictly positive on 10^3 noncommuting pairs, zero when \
         commuting"
    );
}

#[test]
fn c08_counterexample_reproduction_and_fixture() {
    let t0 = Instant::now();
    let word = Word::parse("AABABB").unwrap();

    // the documented default configuration: seed 0, 64 restarts
    let cfg = SearchConfig::new(word.clone(), 3);
    assert_eq!((cfg.restarts, cfg.seed), (64, 0));
    let result = run_search(&cfg).unwrap();
    assert!(
        result.best_violation > 1e-6,
        "search found only {}",
        result.best_violation
    );

    // certification with k escalating 3..=6
    let cand = certify_candidate(&word, &result.a, &result.b, 3, 6).unwrap();
    assert!(
        cand.certified,
        "certification refused up to k = {}: {:?}",
        cand.k_used, cand.outcome
    );

    // regression fixture: re-verify the archived pair
    let path = concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/../../fixtures/aababb-dim3.json"
    );
    let fixture: CounterexampleFixture =
        serde_json::from_str(&std::fs::read_to_string(path).expect("fixture present"))
            .expect("fixture parses");
    assert_eq!(fixture.word, word);
    assert_eq!(fixture.dim, 3);
    assert!(fixture.float_gap < -1e-6);
    let recomputed = rearrangement_gap(&fixture.word, &fixture.a, &fixture.b).unwrap();
    assert!(
        (recomputed.gap - fixture.float_gap).abs() <= 1e-12,
        "archived gap {} vs recomputed {}",
        fixture.float_gap,
        recomputed.gap
    );
    assert!(fixture.certified, "fixture was archived as certified");
    let power = fixture
        .certificate
        .as_ref()
        .expect("certificate present")
        .power;
    let out = certify(&fixture.word, &fixture.a, &fixture.b, power.trailing_zeros()).unwrap();
    assert!(out.is_certified(), "fixture no longer certifies: {out:?}");

    // the fresh search reproduces the archived violation
    assert!(
        (result.best_violation + fixture.float_gap).abs() <= 1e-12,
        "fresh {} vs archived {}",
        result.best_violation,
        -fixture.float_gap
    );

    let elapsed = t0.elapsed();
    assert!(
        elapsed.as_secs_f64() <= 300.0,
        "runtime {elapsed:?} exceeds 5 min"
    );
    println!(
        "criterion 08 PASS: violation {:.6e} found and certified (k = {}), fixture re-verified, {:.1?}",
        result.best_violation,
        cand.k_used,
        elapsed
    );
}

#[test]
fn c09_drury_valid_word_survives_search() {
    let word = Word::parse("AABBABBAABBAA").unwrap();
    for dim in [2usize, 3, 4] {
        let mut cfg = SearchConfig::new(word.clone(), dim);
        cfg.seed = 0;
        let result = run_search(&cfg).unwrap();
        assert!(
            result.best_violation <= 1e-10,
            "dim {dim}: unexpected violation {}",
            result.best_violation
        );
    }
    println!("criterion 09 PASS: search finds no violation for AABBABBAABBAA at dims 2-4");
}

#[test]
fn c10_classical_and_recht_re_suites_10k() {
    let cfg = SuiteConfig::new(SuiteKind::Classical, 10_000, 20_240_810);
    let report = run_suite(&cfg).unwrap();
    assert!(report.pass, "classical failures: {}", report.failures);

    let cfg = SuiteConfig::new(SuiteKind::RechtRe, 10_000, 20_240_811);
    let report = run_suite(&cfg).unwrap();
    assert!(report.pass, "recht-re failures: {}", report.failures);
    println!(
        "criterion 10 PASS: classical inequalities and Recht-Re (n = m = 2), 10^4 instances each \
         at dims 2-4"
    );
}
