//! Property tests for the crate-wide invariants.

use matword::linalg::{
    commutator_min_sv, det, eigen_sym, eval_word, sample_psd, spectral_norm, Matrix, SymMatrix,
};
use matword::ncpoly::{expand_word, extract_coeffs, squared_norm_expansion, Monomial};
use matword::rng::master;
use matword::verify::rearrangement_gap;
use matword::word::{Letter, Word};
use num_bigint::BigInt;
use proptest::prelude::*;

fn letters_strategy(max_len: usize) -> impl Strategy<Value = Vec<Letter>> {
    prop::collection::vec(prop::bool::ANY, 1..=max_len)
        .prop_map(|bits| bits.into_iter().map(|b| if b { Letter::B } else { Letter::A }).collect())
}

fn word_strategy(max_len: usize) -> impl Strategy<Value = Word> {
    letters_strategy(max_len).prop_map(|l| Word::from_letters(&l).unwrap())
}

proptest! {
    #[test]
    fn parse_print_round_trip(word in word_strategy(16)) {
        prop_assert_eq!(&Word::parse(&word.to_string()).unwrap(), &word);
        prop_assert_eq!(&Word::parse(&word.letter_string()).unwrap(), &word);
    }

    #[test]
    fn ordered_preserves_totals(word in word_strategy(16)) {
        let o = word.ordered();
        prop_assert_eq!(o.total_m(), word.total_m());
        prop_assert_eq!(o.total_n(), word.total_n());
        prop_assert!(o.is_ordered());
    }

    #[test]
    fn transpose_is_an_involution(word in word_strategy(16)) {
        prop_assert_eq!(&word.transposed().transposed(), &word);
    }

    #[test]
    fn palindromes_are_transpose_fixed_points(half in letters_strategy(8), middle in prop::option::of(prop::bool::ANY)) {
        let mut letters = half.clone();
        if let Some(b) = middle {
            letters.push(if b { Letter::B } else { Letter::A });
        }
        letters.extend(half.iter().rev().copied());
        let word = Word::from_letters(&letters).unwrap();
        prop_assert_eq!(&word.transposed(), &word);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    // tr(A1 ... Ak) = tr(A2 ... Ak A1)
    #[test]
    fn cyclic_trace_identity(seed in 0u64..1000, k in 2usize..=5, dim in 2usize..=5) {
        let mut rng = master(seed);
        let mats: Vec<Matrix> = (0..k)
            .map(|_| sample_psd(dim, dim, true, &mut rng).as_matrix().clone())
            .collect();
        let prod = |order: &[usize]| {
            let mut p = Matrix::identity(dim);
            for &i in order {
                p = p.mul(&mats[i]);
            }
            p
        };
        let tr = |m: &Matrix| (0..dim).map(|i| m.get(i, i)).sum::<f64>();
        let base: Vec<usize> = (0..k).collect();
        let mut rotated = base.clone();
        rotated.rotate_left(1);
        let t1 = tr(&prod(&base));
        let t2 = tr(&prod(&rotated));
        prop_assert!((t1 - t2).abs() <= 1e-9 * t1.abs().max(1.0));
    }

    #[test]
    fn spectral_norm_squared_is_top_gram_eigenvalue(seed in 0u64..1000, dim in 2usize..=5) {
        let mut rng = master(seed);
        // a general (nonsymmetric) matrix: product of two PSD samples
        let a = sample_psd(dim, dim, true, &mut rng);
        let b = sample_psd(dim, dim, true, &mut rng);
        let m = a.as_matrix().mul(b.as_matrix());
        let sn = spectral_norm(&m).unwrap();
        let gram = SymMatrix::from_matrix(&m.transpose().mul(&m));
        let lam = eigen_sym(&gram).unwrap().eigenvalues[0].max(0.0);
        prop_assert!((sn.value * sn.value - lam).abs() <= 1e-10 * lam.max(1e-300));
    }

    // closed-form 2x2 symmetric eigenvalues vs the Jacobi solver
    #[test]
    fn jacobi_matches_2x2_closed_form(a in -5.0f64..5.0, b in -5.0f64..5.0, c in -5.0f64..5.0) {
        let m = SymMatrix::new(2, vec![a, b, b, c]).unwrap();
        let eig = eigen_sym(&m).unwrap();
        let mean = 0.5 * (a + c);
        let disc = (0.25 * (a - c) * (a - c) + b * b).sqrt();
        let scale = a.abs().max(c.abs()).max(b.abs()).max(1.0);
        prop_assert!((eig.eigenvalues[0] - (mean + disc)).abs() <= 1e-12 * scale);
        prop_assert!((eig.eigenvalues[1] - (mean - disc)).abs() <= 1e-12 * scale);
    }

    #[test]
    fn eigen_reconstruction_and_orthonormality(seed in 0u64..1000, dim in 1usize..=6) {
        let mut rng = master(seed);
        let m = sample_psd(dim, dim, false, &mut rng);
        let eig = eigen_sym(&m).unwrap();
        let q = &eig.eigenvectors;
        let mut lam = Matrix::zeros(dim, dim);
        for i in 0..dim {
            lam.set(i, i, eig.eigenvalues[i]);
        }
        let recon = q.mul(&lam).mul(&q.transpose());
        let mf = m.as_matrix().frobenius_norm();
        prop_assert!(recon.sub(m.as_matrix()).frobenius_norm() <= 1e-10 * (1.0 + mf));
        let qtq = q.transpose().mul(q);
        prop_assert!(qtq.sub(&Matrix::identity(dim)).frobenius_norm() <= 1e-12 * dim as f64);
    }

    // det(W(A,B)) = det(A)^m det(B)^n
    #[test]
    fn word_determinant_is_multiplicative(seed in 0u64..500, wordseed in 0u64..500) {
        let mut rng = master(seed);
        let dim = 2 + (seed % 3) as usize;
        let a = sample_psd(dim, dim, true, &mut rng);
        let b = sample_psd(dim, dim, true, &mut rng);
        let word = Word::sample(&mut master(wordseed), 8);
        let w = eval_word(&word, &a, &b).unwrap();
        let expected = det(a.as_matrix()).powi(word.total_m() as i32)
            * det(b.as_matrix()).powi(word.total_n() as i32);
        let got = det(&w);
        // relative 1e-8 plus the absolute LU noise floor for tiny
        // determinants of near-singular products
        let floor = 1e-14 * w.frobenius_norm().powi(dim as i32).max(1e-14);
        prop_assert!((got - expected).abs() <= 1e-8 * expected.abs() + floor,
            "got {} expected {}", got, expected);
    }

    #[test]
    fn spectral_norm_is_submultiplicative(seed in 0u64..1000, dim in 2usize..=5) {
        let mut rng = master(seed);
        let m = sample_psd(dim, dim, false, &mut rng);
        let n = sample_psd(dim, dim, false, &mut rng);
        let nm = spectral_norm(&m.as_matrix().mul(n.as_matrix())).unwrap().value;
        let bound = spectral_norm(m.as_matrix()).unwrap().value
            * spectral_norm(n.as_matrix()).unwrap().value;
        prop_assert!(nm <= bound * (1.0 + 1e-12));
    }
}

fn binomial(n: usize, k: usize) -> BigInt {
    if k > n {
        return BigInt::from(0);
    }
    let mut num = BigInt::from(1);
    for i in 0..k {
        num *= BigInt::from(n - i);
        num /= BigInt::from(i + 1);
    }
    num
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    // choosing k positions out of L letters
    #[test]
    fn degree_coefficients_sum_to_binomials(word in word_strategy(12), k in 0usize..=3) {
        let p = expand_word(&word, k);
        let total: BigInt = p
            .terms()
            .filter(|(m, _)| m.degree() == k)
            .map(|(_, c)| c.clone())
            .sum();
        prop_assert_eq!(total, binomial(word.len(), k));
    }

    #[test]
    fn expansion_is_multiplicative_over_concatenation(w1 in word_strategy(8), w2 in word_strategy(8), d in 0usize..=3) {
        let mut letters = w1.letters();
        letters.extend(w2.letters());
        let concat = Word::from_letters(&letters).unwrap();
        let lhs = expand_word(&concat, d);
        let rhs = expand_word(&w1, d).mul(&expand_word(&w2, d));
        prop_assert_eq!(lhs, rhs);
    }

    // ordered-word coefficients aggregate the disordered ones
    #[test]
    fn ordered_coefficients_aggregate(word in word_strategy(12)) {
        let c = extract_coeffs(&word);
        let o = extract_coeffs(&word.ordered());
        prop_assert_eq!(&o.ab, &(&c.ab + &c.ba));
        prop_assert_eq!(&o.aab, &(&c.aab + &c.aba + &c.baa));
        prop_assert_eq!(&o.abb, &(&c.abb + &c.bab + &c.bba));
        prop_assert_eq!(&o.aa, &c.aa);
        prop_assert_eq!(&o.bb, &c.bb);
        prop_assert_eq!(&o.aaa, &c.aaa);
        prop_assert_eq!(&o.bbb, &c.bbb);
        prop_assert!(o.ba == BigInt::from(0));
    }

    // numerical cancellation of the order <= 2 bilinear difference
    #[test]
    fn low_order_difference_vanishes_numerically(word in word_strategy(10), seed in 0u64..500) {
        let mut rng = master(seed);
        let a = sample_psd(3, 3, true, &mut rng);
        let b = sample_psd(3, 3, true, &mut rng);
        let u: Vec<f64> = {
            use rand_distr::{Distribution, StandardNormal};
            (0..3).map(|_| StandardNormal.sample(&mut rng)).collect()
        };
        let x = squared_norm_expansion(&word, 2).unwrap();
        let z = squared_norm_expansion(&word.ordered(), 2).unwrap();
        for k in 0..=2 {
            let diff = z.orders[k].eval(&a, &b, &u).unwrap() - x.orders[k].eval(&a, &b, &u).unwrap();
            prop_assert!(diff.abs() <= 1e-9, "order {} residual {}", k, diff);
        }
    }
}

#[test]
fn expansion_truncation_error_is_fourth_order() {
    // substitute(expand(w, 3)) vs the direct perturbed product: the
    // difference must shrink like eps^4 across a geometric eps ladder.
    let word = Word::parse("AABAB").unwrap();
    let mut rng = master(99);
    let a = sample_psd(3, 3, true, &mut rng);
    let b = sample_psd(3, 3, true, &mut rng);
    let poly = expand_word(&word, 3);
    let mut ratios = Vec::new();
    for eps in [1e-2, 1e-3, 1e-4] {
        let a_eps = a.scale(eps).add_scaled_identity(1.0);
        let b_eps = b.scale(eps).add_scaled_identity(1.0);
        let direct = eval_word(&word, &a_eps, &b_eps).unwrap();
        // substitute the graded polynomial with eps folded into the symbols
        let a_s = a.scale(eps);
        let b_s = b.scale(eps);
        let truncated = matword::ncpoly::substitute(&poly, &a_s, &b_s).unwrap();
        let err = direct.sub(&truncated).frobenius_norm();
        ratios.push(err / eps.powi(4));
    }
    let (lo, hi) = ratios
        .iter()
        .fold((f64::INFINITY, 0.0f64), |(lo, hi), &r| (lo.min(r), hi.max(r)));
    assert!(
        hi <= 10.0 * lo.max(1e-12),
        "eps^4 constants not stable: {ratios:?}"
    );
}

#[test]
fn gap_is_transpose_invariant_and_scale_sign_stable() {
    for seed in 0..20u64 {
        let mut rng = master(seed);
        let dim = 2 + (seed % 3) as usize;
        let a = sample_psd(dim, dim, true, &mut rng);
        let b = sample_psd(dim, dim, true, &mut rng);
        let word = Word::sample(&mut rng, 10);
        let g1 = rearrangement_gap(&word, &a, &b).unwrap();
        let g2 = rearrangement_gap(&word.transposed(), &a, &b).unwrap();
        assert!(
            (g1.gap - g2.gap).abs() <= 1e-10 * g1.norm_ordered.max(1.0),
            "seed {seed}"
        );

        // scaling both inputs by c > 0 preserves the sign of the gap
        let c = 1.75;
        let g3 = rearrangement_gap(&word, &a.scale(c), &b.scale(c)).unwrap();
        let tol = 1e-10 * g3.norm_ordered.max(g1.norm_ordered);
        if g1.gap > tol {
            assert!(g3.gap > -tol, "seed {seed}");
        }
        if g1.gap < -tol {
            assert!(g3.gap < tol, "seed {seed}");
        }
    }
}

#[test]
fn drury_valid_word_never_violates_on_random_pairs() {
    // 10^4 random pairs in each dimension 2, 3, 4.
    let word = Word::parse("AABBABBAABBAA").unwrap();
    for dim in [2usize, 3, 4] {
        for i in 0..10_000u64 {
            let mut rng = matword::rng::substream(4242 + dim as u64, i);
            let a = sample_psd(dim, dim, true, &mut rng);
            let b = sample_psd(dim, dim, true, &mut rng);
            let r = rearrangement_gap(&word, &a, &b).unwrap();
            assert!(
                r.gap >= -1e-10 * r.norm_ordered.max(1e-300),
                "dim {dim} instance {i}: gap {}",
                r.gap
            );
        }
    }
}

#[test]
fn certify_is_sound_on_nonviolating_instances() {
    // no certificate may be issued when the float gap is nonnegative
    for seed in 0..10u64 {
        let mut rng = master(seed);
        let a = sample_psd(2, 2, true, &mut rng);
        let b = sample_psd(2, 2, true, &mut rng);
        let word = Word::sample(&mut rng, 8);
        let gap = rearrangement_gap(&word, &a, &b).unwrap().gap;
        if gap >= 0.0 {
            let out = matword::certify::certify(&word, &a, &b, 3).unwrap();
            assert!(!out.is_certified(), "seed {seed} word {word}");
        }
    }
}

#[test]
fn odd_dimension_commutators_are_singular() {
    for seed in 0..20u64 {
        let mut rng = master(seed);
        let a = sample_psd(3, 3, true, &mut rng);
        let b = sample_psd(3, 3, true, &mut rng);
        // the Gram route bottoms out at sqrt(eps) noise, which is why
        // strictness thresholds sit at 1e-8
        assert!(commutator_min_sv(&a, &b).unwrap() <= 1e-7);
        let a5 = sample_psd(5, 5, true, &mut rng);
        let b5 = sample_psd(5, 5, true, &mut rng);
        assert!(commutator_min_sv(&a5, &b5).unwrap() <= 1e-7);
    }
}

#[test]
fn monomial_parse_display_round_trip() {
    for s in ["1", "A", "B", "AAB", "BABA"] {
        assert_eq!(Monomial::parse(s).unwrap().to_string(), s);
    }
}
