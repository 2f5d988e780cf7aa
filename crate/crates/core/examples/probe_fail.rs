// Scratch diagnosis runner (deleted before release).
use matword::linalg::{commutator_min_sv, sample_psd};
use matword::rng::substream;
use matword::suites::{run_suite, SuiteConfig, SuiteKind, SuiteRecords};
use matword::verify::maximizer_projection_decay;
use matword::word::Word;

fn main() {
    let cfg = SuiteConfig::new(SuiteKind::Theorem1, 100_000, 20_240_801);
    let report = run_suite(&cfg).unwrap();
    if let SuiteRecords::GapCert(records) = &report.records {
        for r in records.iter().filter(|r| !r.pass).take(10) {
            println!("{}", serde_json::to_string(r).unwrap());
            // which condition?
            println!(
                "  gap_ok={} trace_ok={} det_ok={} mu_le_lambda={}",
                r.gap >= -1e-10 * r.norm_ordered,
                r.trace_slack >= -1e-9 * (r.lambda1 /*approx scale*/),
                r.det_mismatch <= 1e-8,
                r.mu1 <= r.lambda1 + 1e-9 * r.lambda1.max(r.mu1)
            );
        }
    }

    // c07 first failing projection-decay instance
    let eps: Vec<f64> = (4..=10).map(|k| (2.0f64).powi(-k)).collect();
    for i in 0..100u64 {
        let mut rng = substream(20_240_807, i);
        let a = sample_psd(4, 4, true, &mut rng);
        let b = sample_psd(4, 4, true, &mut rng);
        let word = Word::sample(&mut rng, 8);
        let r = maximizer_projection_decay(&word, &a, &b, &eps).unwrap();
        let max_defect = r.samples.iter().map(|s| s.defect).fold(0.0f64, f64::max);
        if max_defect > 1e-12 {
            let max_ratio = r
                .samples
                .iter()
                .map(|s| s.defect / s.eps)
                .fold(0.0f64, f64::max);
            let ok = max_ratio <= 2.0 * r.c1 && r.threshold >= (2.0f64).powi(-5);
            if !ok {
                println!(
                    "c07 lemma1 FAIL i={} word={} c1={:.3e} max_ratio={:.3e} threshold={:.3e} minsv={:.3e} eig_dim={}",
                    i,
                    word.letter_string(),
                    r.c1,
                    max_ratio,
                    r.threshold,
                    commutator_min_sv(&a, &b).unwrap(),
                    r.eigspace_dim
                );
                for s in &r.samples {
                    println!("   eps={:.4e} defect={:.4e} ratio={:.4e}", s.eps, s.defect, s.defect / s.eps);
                }
            }
        }
    }
}
