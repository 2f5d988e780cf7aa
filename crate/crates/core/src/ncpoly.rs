//! Exact truncated expansion of perturbed words.
//!
//! Expanding a word evaluated at `(Id + eps A, Id + eps B)` in powers of
//! `eps` gives, at each order `k`, a polynomial in the two noncommuting
//! symbols `A, B` whose coefficient on a monomial counts the ways to
//! select its letters, in order, from the letter expansion of the word.
//! Those counts are held exactly as big integers, so order-by-order
//! cancellations can be checked with no tolerance at all.
//!
//! The bilinear machinery ([`SquaredNormExpansion`]) mirrors the
//! expansion of `||X_eps u||^2 = <X_eps u, X_eps u>` as sums of terms
//! `<P u, Q u>`; such a term canonicalizes to `<Qᵀ P u, u>`, where the
//! formal transpose of a monomial in symmetric symbols is its reversal.

use crate::error::{Error, Result};
use crate::linalg::{dot, Matrix, SymMatrix};
use crate::word::{Letter, Word};
use num_bigint::BigInt;
use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;
use std::collections::BTreeMap;
use std::fmt;

/// A product of symbols, e.g. `AAB`; the empty product is the identity.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Monomial(Vec<Letter>);

impl Monomial {
    pub fn identity() -> Monomial {
        Monomial(Vec::new())
    }

    pub fn from_letters(letters: &[Letter]) -> Monomial {
        Monomial(letters.to_vec())
    }

    /// Parses `"1"` (identity) or a string over `{A, B}`.
    pub fn parse(text: &str) -> Result<Monomial> {
        if text == "1" {
            return Ok(Monomial::identity());
        }
        let letters = text
            .chars()
            .map(|c| match c {
                'A' => Ok(Letter::A),
                'B' => Ok(Letter::B),
                other => Err(Error::Parse(format!("bad monomial letter {other:?}"))),
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Monomial(letters))
    }

    pub fn degree(&self) -> usize {
        self.0.len()
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    /// Formal transpose: reversal (valid for symmetric symbols).
    pub fn reversed(&self) -> Monomial {
        let mut l = self.0.clone();
        l.reverse();
        Monomial(l)
    }

    pub fn concat(&self, other: &Monomial) -> Monomial {
        let mut l = self.0.clone();
        l.extend_from_slice(&other.0);
        Monomial(l)
    }

    fn append(&self, letter: Letter) -> Monomial {
        let mut l = self.0.clone();
        l.push(letter);
        Monomial(l)
    }
}

// Sort by degree first so polynomial iteration order matches the
// canonical print format.
impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        (self.0.len(), &self.0).cmp(&(other.0.len(), &other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        for l in &self.0 {
            write!(f, "{}", l.as_char())?;
        }
        Ok(())
    }
}

/// Noncommutative polynomial in `A, B`, truncated by total degree, with
/// exact integer coefficients. Zero coefficients are never stored.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NcPolynomial {
    order: usize,
    terms: BTreeMap<Monomial, BigInt>,
}

impl NcPolynomial {
    pub fn zero(order: usize) -> NcPolynomial {
        NcPolynomial {
            order,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(order: usize) -> NcPolynomial {
        let mut p = NcPolynomial::zero(order);
        p.terms.insert(Monomial::identity(), BigInt::one());
        p
    }

    /// Truncation order (maximum stored total degree).
    pub fn order(&self) -> usize {
        self.order
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &BigInt)> {
        self.terms.iter()
    }

    pub fn coeff(&self, mono: &Monomial) -> BigInt {
        self.terms.get(mono).cloned().unwrap_or_else(BigInt::zero)
    }

    pub fn add_term(&mut self, mono: Monomial, coeff: BigInt) {
        if coeff.is_zero() || mono.degree() > self.order {
            return;
        }
        match self.terms.entry(mono) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(coeff);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += coeff;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn add(&self, other: &NcPolynomial) -> NcPolynomial {
        let mut out = self.clone();
        out.order = self.order.max(other.order);
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &NcPolynomial) -> NcPolynomial {
        let mut out = self.clone();
        out.order = self.order.max(other.order);
        for (m, c) in &other.terms {
            out.add_term(m.clone(), -c.clone());
        }
        out
    }

    /// Product, truncated to the smaller of the two orders.
    pub fn mul(&self, other: &NcPolynomial) -> NcPolynomial {
        let mut out = NcPolynomial::zero(self.order.min(other.order));
        for (ml, cl) in &self.terms {
            for (mr, cr) in &other.terms {
                if ml.degree() + mr.degree() > out.order {
                    continue;
                }
                out.add_term(ml.concat(mr), cl * cr);
            }
        }
        out
    }

    /// Multiplies by `(1 + letter)` on the right, the elementary step of
    /// word expansion.
    fn mul_one_plus(&self, letter: Letter) -> NcPolynomial {
        let mut out = self.clone();
        for (m, c) in &self.terms {
            if m.degree() < self.order {
                out.add_term(m.append(letter), c.clone());
            }
        }
        out
    }

    /// Formal transpose: reverses every monomial.
    pub fn transposed(&self) -> NcPolynomial {
        let mut out = NcPolynomial::zero(self.order);
        for (m, c) in &self.terms {
            out.add_term(m.reversed(), c.clone());
        }
        out
    }

    /// The degree-`k` homogeneous part.
    pub fn homogeneous_part(&self, k: usize) -> NcPolynomial {
        let mut out = NcPolynomial::zero(self.order);
        for (m, c) in &self.terms {
            if m.degree() == k {
                out.add_term(m.clone(), c.clone());
            }
        }
        out
    }

    /// Serializable term records with string-encoded coefficients.
    pub fn term_records(&self) -> Vec<TermRecord> {
        self.terms
            .iter()
            .map(|(m, c)| TermRecord {
                monomial: m.to_string(),
                coeff: c.to_string(),
            })
            .collect()
    }
}

impl fmt::Display for NcPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (m, c) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            write!(f, "{c}*{m}")?;
            first = false;
        }
        Ok(())
    }
}

/// One polynomial term in the canonical JSON form.
#[derive(Clone, Debug, Serialize)]
pub struct TermRecord {
    pub monomial: String,
    pub coeff: String,
}

/// Degree-`<= order` truncation of
/// `prod_i (1 + eps A)^{m_i} (1 + eps B)^{n_i}`, the eps-grading carried
/// by monomial degree.
///
/// The coefficient of a monomial is the number of ways to pick its
/// letters, in order, from the letter expansion of the word; these
/// counts are exact big integers. Cost grows with the number of stored
/// monomials (up to `2^(order+1)`), so large orders are only practical
/// for short words.
pub fn expand_word(word: &Word, order: usize) -> NcPolynomial {
    let mut poly = NcPolynomial::one(order);
    for letter in word.letters() {
        poly = poly.mul_one_plus(letter);
    }
    poly
}

/// The twelve expansion coefficients read from degrees 2 and 3, named by
/// their monomials.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WordCoeffs {
    pub aa: BigInt,
    pub ab: BigInt,
    pub ba: BigInt,
    pub bb: BigInt,
    pub aaa: BigInt,
    pub aab: BigInt,
    pub aba: BigInt,
    pub baa: BigInt,
    pub abb: BigInt,
    pub bab: BigInt,
    pub bba: BigInt,
    pub bbb: BigInt,
}

/// Reads the degree-2 and degree-3 coefficients of [`expand_word`] at
/// order 3.
pub fn extract_coeffs(word: &Word) -> WordCoeffs {
    let p = expand_word(word, 3);
    let c = |s: &str| p.coeff(&Monomial::parse(s).expect("fixed monomial"));
    WordCoeffs {
        aa: c("AA"),
        ab: c("AB"),
        ba: c("BA"),
        bb: c("BB"),
        aaa: c("AAA"),
        aab: c("AAB"),
        aba: c("ABA"),
        baa: c("BAA"),
        abb: c("ABB"),
        bab: c("BAB"),
        bba: c("BBA"),
        bbb: c("BBB"),
    }
}

/// A scalar multiple of a bilinear term `<left u, right u>`.
#[derive(Clone, Debug)]
pub struct BilinearTerm {
    pub scalar: BigInt,
    pub left: NcPolynomial,
    pub right: NcPolynomial,
}

/// A sum of bilinear terms in one vector argument.
#[derive(Clone, Debug)]
pub struct BilinearForm {
    pub terms: Vec<BilinearTerm>,
}

impl BilinearForm {
    /// Rewrites every `<P u, Q u>` as `<Qᵀ P u, u>` and returns the sum
    /// `R = sum scalar * Qᵀ P`. The form only determines `R` up to its
    /// symmetric part; use [`Self::canonical_symmetrized`] for equality
    /// tests.
    pub fn canonical_polynomial(&self) -> NcPolynomial {
        let order = self
            .terms
            .iter()
            .map(|t| t.left.order().max(t.right.order()))
            .max()
            .unwrap_or(0);
        let mut sum = NcPolynomial::zero(order);
        for t in &self.terms {
            let prod = scale_poly(&t.right.transposed().mul(&t.left), &t.scalar);
            sum = sum.add(&prod);
        }
        sum
    }

    /// `R + Rᵀ` of the canonical polynomial; two forms agree as bilinear
    /// forms on symmetric matrices iff these polynomials are equal.
    pub fn canonical_symmetrized(&self) -> NcPolynomial {
        let r = self.canonical_polynomial();
        r.add(&r.transposed())
    }

    /// Numerical value `sum scalar * <P(A,B) u, Q(A,B) u>`.
    pub fn eval(&self, a: &SymMatrix, b: &SymMatrix, u: &[f64]) -> Result<f64> {
        let mut acc = 0.0;
        for t in &self.terms {
            let p = substitute(&t.left, a, b)?;
            let q = substitute(&t.right, a, b)?;
            let s = t
                .scalar
                .to_f64()
                .ok_or_else(|| Error::InvalidArgument("bilinear scalar does not fit f64".into()))?;
            acc += s * dot(&p.matvec(u), &q.matvec(u));
        }
        Ok(acc)
    }
}

fn scale_poly(p: &NcPolynomial, c: &BigInt) -> NcPolynomial {
    let mut out = NcPolynomial::zero(p.order());
    for (m, k) in p.terms() {
        out.add_term(m.clone(), k * c);
    }
    out
}

/// Per-order bilinear expansion of `||X_eps u||^2` for the word's
/// perturbed product `X_eps`; index `k` holds the eps^k form.
#[derive(Clone, Debug)]
pub struct SquaredNormExpansion {
    pub orders: Vec<BilinearForm>,
}

/// Expands `||X_eps u||^2 = sum_k eps^k sum_{i+j=k} <X_i u, X_j u>`
/// with `X_0 = Id`, grouping mirror terms with scalar 2: order 1 is
/// `2<X_1 u, u>`, order 2 is `2<X_2 u, u> + <X_1 u, X_1 u>`, order 3 is
/// `2<X_3 u, u> + 2<X_2 u, X_1 u>`.
///
/// Orders above 3 are outside the verified regime and rejected.
pub fn squared_norm_expansion(word: &Word, order: usize) -> Result<SquaredNormExpansion> {
    if order > 3 {
        return Err(Error::InvalidArgument(format!(
            "squared_norm_expansion supports order <= 3, got {order}"
        )));
    }
    let expansion = expand_word(word, order);
    let parts: Vec<NcPolynomial> = (0..=order)
        .map(|k| expansion.homogeneous_part(k))
        .collect();
    let mut orders = Vec::with_capacity(order + 1);
    for k in 0..=order {
        let mut terms = Vec::new();
        let mut i = k - k / 2;
        while i <= k {
            let j = k - i;
            let scalar = if i == j { BigInt::one() } else { BigInt::from(2) };
            terms.push(BilinearTerm {
                scalar,
                left: parts[i].clone(),
                right: parts[j].clone(),
            });
            i += 1;
        }
        orders.push(BilinearForm { terms });
    }
    Ok(SquaredNormExpansion { orders })
}

/// Exact symbolic difference, at eps-order `k`, between the squared-norm
/// expansions of the ordered companion and of the word itself,
/// canonicalized and symmetrized. The rearrangement cancellation says
/// this is the zero polynomial for every word when `k <= 2`.
pub fn cancellation_difference(word: &Word, k: usize) -> Result<NcPolynomial> {
    if k > 3 {
        return Err(Error::InvalidArgument(format!(
            "cancellation order must be <= 3, got {k}"
        )));
    }
    let x = squared_norm_expansion(word, k)?;
    let z = squared_norm_expansion(&word.ordered(), k)?;
    Ok(z.orders[k]
        .canonical_symmetrized()
        .sub(&x.orders[k].canonical_symmetrized()))
}

/// Evaluates a polynomial at a matrix pair: each monomial becomes the
/// corresponding product, summed with its integer coefficient.
pub fn substitute(poly: &NcPolynomial, a: &SymMatrix, b: &SymMatrix) -> Result<Matrix> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch(format!(
            "substitute: A is {}-dim, B is {}-dim",
            a.dim(),
            b.dim()
        )));
    }
    let n = a.dim();
    let mut acc = Matrix::zeros(n, n);
    for (mono, coeff) in poly.terms() {
        let c = coeff
            .to_f64()
            .ok_or_else(|| Error::InvalidArgument("coefficient does not fit f64".into()))?;
        let mut prod = Matrix::identity(n);
        for &l in mono.letters() {
            prod = prod.mul(match l {
                Letter::A => a.as_matrix(),
                Letter::B => b.as_matrix(),
            });
        }
        acc = acc.add(&prod.scale(c));
    }
    Ok(acc)
}
