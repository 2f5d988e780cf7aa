//! Matrix words: products of powers of two symbols `A` and `B`.
//!
//! A word is stored canonically as exponent blocks
//! `(m1, n1), ..., (ms, ns)`, each block meaning `A^{mi} B^{ni}`. All
//! exponents are at least 1 except that the leading `m1` and the
//! trailing `ns` may be 0 (words may start with `B` or end with `A`).
//! Adjacent runs of the same letter are always merged, so every word
//! has exactly one canonical block form.
//!
//! Surface syntax accepts either plain letter strings (`"AABABB"`) or
//! the block grammar (`"A^2 B^1 A^1 B^2"`); printing always uses the
//! block grammar.

use crate::error::{Error, Result};
use crate::rng::Rng64;
use rand::Rng;
use serde::{Deserialize, Serialize};
use std::fmt;

/// Default cap on the total letter count of a parsed or sampled word.
pub const DEFAULT_MAX_LETTERS: usize = 64;

/// One of the two noncommuting symbols.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Letter {
    A,
    B,
}

impl Letter {
    pub fn other(self) -> Letter {
        match self {
            Letter::A => Letter::B,
            Letter::B => Letter::A,
        }
    }

    pub fn as_char(self) -> char {
        match self {
            Letter::A => 'A',
            Letter::B => 'B',
        }
    }
}

/// A canonical matrix word.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Word {
    blocks: Vec<(u32, u32)>,
}

impl Word {
    /// Parses either grammar with the default letter limit.
    pub fn parse(text: &str) -> Result<Word> {
        Word::parse_with_limit(text, DEFAULT_MAX_LETTERS)
    }

    /// Parses either grammar, rejecting words longer than `max_letters`.
    pub fn parse_with_limit(text: &str, max_letters: usize) -> Result<Word> {
        let trimmed = text.trim();
        if trimmed.is_empty() {
            return Err(Error::Parse("empty word".into()));
        }
        let runs = if trimmed.contains('^') {
            parse_blocks(trimmed)?
        } else {
            parse_letters(trimmed)?
        };
        let total: u64 = runs.iter().map(|&(_, k)| k as u64).sum();
        if total > max_letters as u64 {
            return Err(Error::Parse(format!(
                "word has {total} letters, limit is {max_letters}"
            )));
        }
        Ok(Word::from_runs(&runs))
    }

    /// Builds a word from exponent blocks, merging any interior zeros.
    pub fn from_blocks(blocks: &[(u32, u32)]) -> Result<Word> {
        let mut runs: Vec<(Letter, u32)> = Vec::new();
        for &(m, n) in blocks {
            push_run(&mut runs, Letter::A, m);
            push_run(&mut runs, Letter::B, n);
        }
        if runs.is_empty() {
            return Err(Error::Parse("word must contain at least one letter".into()));
        }
        Ok(Word::from_runs(&runs))
    }

    /// Builds a word from a letter sequence.
    pub fn from_letters(letters: &[Letter]) -> Result<Word> {
        let mut runs: Vec<(Letter, u32)> = Vec::new();
        for &l in letters {
            push_run(&mut runs, l, 1);
        }
        if runs.is_empty() {
            return Err(Error::Parse("word must contain at least one letter".into()));
        }
        Ok(Word::from_runs(&runs))
    }

    // Canonical pairing of alternating letter runs into (m, n) blocks.
    fn from_runs(runs: &[(Letter, u32)]) -> Word {
        debug_assert!(runs.windows(2).all(|w| w[0].0 != w[1].0));
        debug_assert!(runs.iter().all(|&(_, k)| k > 0));
        let mut blocks = Vec::new();
        let mut i = 0;
        while i < runs.len() {
            match runs[i].0 {
                Letter::A => {
                    let m = runs[i].1;
                    let n = if i + 1 < runs.len() { runs[i + 1].1 } else { 0 };
                    blocks.push((m, n));
                    i += 2;
                }
                Letter::B => {
                    blocks.push((0, runs[i].1));
                    i += 1;
                }
            }
        }
        Word { blocks }
    }

    /// Exponent blocks `(m_i, n_i)`.
    pub fn blocks(&self) -> &[(u32, u32)] {
        &self.blocks
    }

    /// Total exponent of `A`.
    pub fn total_m(&self) -> u32 {
        self.blocks.iter().map(|b| b.0).sum()
    }

    /// Total exponent of `B`.
    pub fn total_n(&self) -> u32 {
        self.blocks.iter().map(|b| b.1).sum()
    }

    /// Total letter count `m + n`.
    pub fn len(&self) -> usize {
        (self.total_m() + self.total_n()) as usize
    }

    pub fn is_empty(&self) -> bool {
        false // invariant: at least one letter
    }

    /// The word as a flat letter sequence.
    pub fn letters(&self) -> Vec<Letter> {
        let mut out = Vec::with_capacity(self.len());
        for &(m, n) in &self.blocks {
            out.extend(std::iter::repeat(Letter::A).take(m as usize));
            out.extend(std::iter::repeat(Letter::B).take(n as usize));
        }
        out
    }

    /// The word as a plain letter string, e.g. `"AABABB"`.
    pub fn letter_string(&self) -> String {
        self.letters().iter().map(|l| l.as_char()).collect()
    }

    /// The ordered companion `A^m B^n` with the same totals.
    pub fn ordered(&self) -> Word {
        Word {
            blocks: vec![(self.total_m(), self.total_n())],
        }
    }

    /// True iff the word is already of the form `A^m B^n`.
    pub fn is_ordered(&self) -> bool {
        self.blocks.len() == 1
    }

    /// The word with its letter sequence reversed.
    ///
    /// For symmetric `A, B` this is the word evaluating to the transpose
    /// of the original product.
    pub fn transposed(&self) -> Word {
        let mut letters = self.letters();
        letters.reverse();
        Word::from_letters(&letters).expect("nonempty")
    }

    /// All canonical words with 1..=`max_letters` letters, sorted by
    /// length then lexicographically.
    pub fn enumerate_all(max_letters: usize) -> Vec<Word> {
        let mut out = Vec::new();
        for len in 1..=max_letters {
            for bits in 0..(1u64 << len) {
                let letters: Vec<Letter> = (0..len)
                    .map(|i| {
                        if bits >> (len - 1 - i) & 1 == 0 {
                            Letter::A
                        } else {
                            Letter::B
                        }
                    })
                    .collect();
                out.push(Word::from_letters(&letters).expect("nonempty"));
            }
        }
        out
    }

    /// Canonical words with `m1 >= 1` and `ns >= 1` (letter strings that
    /// start with `A` and end with `B`), up to `max_letters` letters.
    ///
    /// There are `2^(L-1) - 1` of these for `max_letters = L`.
    pub fn enumerate_interior(max_letters: usize) -> Vec<Word> {
        let mut out = Vec::new();
        for len in 2..=max_letters {
            let mid = len - 2;
            for bits in 0..(1u64 << mid) {
                let mut letters = Vec::with_capacity(len);
                letters.push(Letter::A);
                for i in 0..mid {
                    letters.push(if bits >> (mid - 1 - i) & 1 == 0 {
                        Letter::A
                    } else {
                        Letter::B
                    });
                }
                letters.push(Letter::B);
                out.push(Word::from_letters(&letters).expect("nonempty"));
            }
        }
        out
    }

    /// Uniform random word: length uniform in 1..=`max_letters`, letters
    /// uniform.
    pub fn sample(rng: &mut Rng64, max_letters: usize) -> Word {
        let len = rng.gen_range(1..=max_letters.max(1));
        let letters: Vec<Letter> = (0..len)
            .map(|_| if rng.gen::<bool>() { Letter::A } else { Letter::B })
            .collect();
        Word::from_letters(&letters).expect("nonempty")
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for &(m, n) in &self.blocks {
            if m > 0 {
                if !first {
                    write!(f, " ")?;
                }
                write!(f, "A^{m}")?;
                first = false;
            }
            if n > 0 {
                if !first {
                    write!(f, " ")?;
                }
                write!(f, "B^{n}")?;
                first = false;
            }
        }
        Ok(())
    }
}

impl std::str::FromStr for Word {
    type Err = Error;

    fn from_str(s: &str) -> Result<Word> {
        Word::parse(s)
    }
}

impl Serialize for Word {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.letter_string())
    }
}

impl<'de> Deserialize<'de> for Word {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Word, D::Error> {
        let text = String::deserialize(d)?;
        Word::parse(&text).map_err(serde::de::Error::custom)
    }
}

fn push_run(runs: &mut Vec<(Letter, u32)>, letter: Letter, count: u32) {
    if count == 0 {
        return;
    }
    match runs.last_mut() {
        Some((l, k)) if *l == letter => *k += count,
        _ => runs.push((letter, count)),
    }
}

fn parse_letters(text: &str) -> Result<Vec<(Letter, u32)>> {
    let mut runs: Vec<(Letter, u32)> = Vec::new();
    for ch in text.chars() {
        let letter = match ch {
            'A' => Letter::A,
            'B' => Letter::B,
            other => {
                return Err(Error::Parse(format!(
                    "unexpected character {other:?}; letter words match [AB]+"
                )))
            }
        };
        push_run(&mut runs, letter, 1);
    }
    Ok(runs)
}

fn parse_blocks(text: &str) -> Result<Vec<(Letter, u32)>> {
    let mut runs: Vec<(Letter, u32)> = Vec::new();
    let mut prev: Option<Letter> = None;
    for token in text.split_whitespace() {
        let (head, exp) = token
            .split_once('^')
            .ok_or_else(|| Error::Parse(format!("block {token:?} must look like A^k or B^k")))?;
        let letter = match head {
            "A" => Letter::A,
            "B" => Letter::B,
            other => {
                return Err(Error::Parse(format!(
                    "block letter must be A or B, got {other:?}"
                )))
            }
        };
        let k: u32 = exp
            .parse()
            .map_err(|_| Error::Parse(format!("bad exponent {exp:?} in block {token:?}")))?;
        if k == 0 {
            return Err(Error::Parse(format!(
                "block exponent must be >= 1, got {token:?}"
            )));
        }
        if prev == Some(letter) {
            return Err(Error::Parse(format!(
                "blocks must alternate letters; {token:?} repeats {}",
                letter.as_char()
            )));
        }
        prev = Some(letter);
        push_run(&mut runs, letter, k);
    }
    if runs.is_empty() {
        return Err(Error::Parse("empty word".into()));
    }
    Ok(runs)
}
