// Scratch calibration runner (deleted before release).
use matword::certify::certify_candidate;
use matword::search::{run_search, SearchConfig};
use matword::word::Word;

fn main() {
    let word = Word::parse("AABABB").unwrap();
    for seed in [0u64, 1, 2] {
        let mut cfg = SearchConfig::new(word.clone(), 3);
        cfg.restarts = 64;
        cfg.max_iters = 2000;
        cfg.seed = seed;
        let t0 = std::time::Instant::now();
        let r = run_search(&cfg).unwrap();
        println!(
            "seed {seed}: best_violation {:.6e} restart {} iters {} evals {} ({:.2?})",
            r.best_violation,
            r.restart_index,
            r.iterations_used,
            r.objective_evals,
            t0.elapsed()
        );
        if r.best_violation > 1e-6 {
            let t0 = std::time::Instant::now();
            let cand = certify_candidate(&word, &r.a, &r.b, 3, 6).unwrap();
            println!(
                "  certify: certified={} k={} nudged={} gap={:.6e} ({:.2?})",
                cand.certified,
                cand.k_used,
                cand.nudged,
                cand.float_gap,
                t0.elapsed()
            );
        }
    }
    // count how many restarts individually succeed for seed 1
    let mut hits = 0;
    for restart in 0..64u32 {
        let mut cfg = SearchConfig::new(word.clone(), 3);
        cfg.restarts = 1;
        cfg.max_iters = 2000;
        cfg.seed = 1;
        // emulate restart index by using substream via restarts=1? no —
        // just run the full thing once; skip per-restart histogram.
        let _ = restart;
        let _ = cfg;
        hits += 0;
    }
    let _ = hits;

    // dim 2 sanity: no violation
    let mut cfg = SearchConfig::new(word.clone(), 2);
    cfg.restarts = 16;
    cfg.max_iters = 800;
    cfg.seed = 1;
    let r = run_search(&cfg).unwrap();
    println!("dim2: best_violation {:.3e}", r.best_violation);

    // Drury-valid word at dims 2..4
    let good = Word::parse("AABBABBAABBAA").unwrap();
    for dim in [2usize, 3, 4] {
        let mut cfg = SearchConfig::new(good.clone(), dim);
        cfg.restarts = 64;
        cfg.max_iters = 2000;
        cfg.seed = 1;
        let t0 = std::time::Instant::now();
        let r = run_search(&cfg).unwrap();
        println!(
            "good word dim {dim}: best_violation {:.3e} ({:.2?})",
            r.best_violation,
            t0.elapsed()
        );
    }
}
