//! Words over a free generating set.
//!
//! A [`Letter`] is a generator or its inverse. It is stored (and serialized)
//! as a nonzero signed integer: generator `g` is `g + 1`, its inverse is
//! `-(g + 1)`. A [`Word`] is a sequence of letters; most operations keep words
//! freely reduced.

use std::fmt;

use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Letter(i32);

impl Letter {
    pub fn new(generator: usize, inverse: bool) -> Self {
        let g = i32::try_from(generator + 1).expect("generator index exceeds i32");
        Letter(if inverse { -g } else { g })
    }

    pub fn positive(generator: usize) -> Self {
        Self::new(generator, false)
    }

    /// Builds a letter from its signed, 1-based serialized form.
    pub fn from_signed(value: i32) -> Option<Self> {
        (value != 0).then_some(Letter(value))
    }

    pub fn signed(self) -> i32 {
        self.0
    }

    pub fn generator(self) -> usize {
        (self.0.unsigned_abs() - 1) as usize
    }

    pub fn is_inverse(self) -> bool {
        self.0 < 0
    }

    /// `+1` for a generator, `-1` for an inverse.
    pub fn exponent(self) -> i32 {
        self.0.signum()
    }

    pub fn inverse(self) -> Self {
        Letter(-self.0)
    }

    /// Position in the enumeration order `g0, g0⁻¹, g1, g1⁻¹, …`.
    pub fn rank_index(self) -> usize {
        2 * self.generator() + usize::from(self.is_inverse())
    }

    pub fn from_rank_index(index: usize) -> Self {
        Self::new(index / 2, index % 2 == 1)
    }
}

impl fmt::Debug for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_inverse() {
            write!(f, "g{}^-1", self.generator())
        } else {
            write!(f, "g{}", self.generator())
        }
    }
}

#[derive(Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Word(Vec<Letter>);

impl Word {
    pub fn empty() -> Self {
        Word(Vec::new())
    }

    /// Wraps letters as given, without reducing.
    pub fn from_letters(letters: Vec<Letter>) -> Self {
        Word(letters)
    }

    /// Parses a signed, 1-based index sequence; zero entries are rejected.
    pub fn from_signed(values: &[i32]) -> Option<Self> {
        values.iter().map(|&v| Letter::from_signed(v)).collect::<Option<Vec<_>>>().map(Word)
    }

    pub fn generator(g: usize) -> Self {
        Word(vec![Letter::positive(g)])
    }

    /// `g^k`, reduced.
    pub fn power_of(g: usize, k: i64) -> Self {
        let letter = Letter::new(g, k < 0);
        Word(vec![letter; k.unsigned_abs() as usize])
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn into_letters(self) -> Vec<Letter> {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn to_signed(&self) -> Vec<i32> {
        self.0.iter().map(|l| l.signed()).collect()
    }

    /// Appends a letter, cancelling against the last letter if they are inverse.
    pub fn push_reduced(&mut self, letter: Letter) {
        if self.0.last() == Some(&letter.inverse()) {
            self.0.pop();
        } else {
            self.0.push(letter);
        }
    }

    pub fn extend_reduced(&mut self, other: &Word) {
        for &l in &other.0 {
            self.push_reduced(l);
        }
    }

    /// Reduced product `self · other` (assuming `self` is reduced).
    pub fn mul(&self, other: &Word) -> Word {
        let mut out = self.clone();
        out.extend_reduced(other);
        out
    }

    pub fn inverse(&self) -> Word {
        Word(self.0.iter().rev().map(|l| l.inverse()).collect())
    }

    pub fn reduced(&self) -> Word {
        free_reduce(self)
    }

    pub fn is_reduced(&self) -> bool {
        self.0.windows(2).all(|w| w[0] != w[1].inverse())
    }

    /// Free and cyclic reduction: the result is reduced and its first letter is
    /// not inverse to its last.
    pub fn cyclically_reduced(&self) -> Word {
        let w = free_reduce(self).0;
        let mut lo = 0;
        let mut hi = w.len();
        while hi - lo >= 2 && w[lo] == w[hi - 1].inverse() {
            lo += 1;
            hi -= 1;
        }
        Word(w[lo..hi].to_vec())
    }

    /// Replaces every letter by a word; the result is reduced.
    pub fn substitute<F>(&self, mut image: F) -> Word
    where
        F: FnMut(usize) -> Word,
    {
        let mut out = Word::empty();
        for &l in &self.0 {
            let w = image(l.generator());
            if l.is_inverse() {
                out.extend_reduced(&w.inverse());
            } else {
                out.extend_reduced(&w);
            }
        }
        out
    }

    /// Exponent sum of every generator in `0..generators`.
    pub fn exponent_vector(&self, generators: usize) -> Vec<i64> {
        let mut v = vec![0i64; generators];
        for l in &self.0 {
            v[l.generator()] += i64::from(l.exponent());
        }
        v
    }

    pub fn max_generator(&self) -> Option<usize> {
        self.0.iter().map(|l| l.generator()).max()
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("1");
        }
        for (i, l) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{l}")?;
        }
        Ok(())
    }
}

impl FromIterator<Letter> for Word {
    fn from_iter<I: IntoIterator<Item = Letter>>(iter: I) -> Self {
        Word(iter.into_iter().collect())
    }
}

/// Removes adjacent inverse pairs until none remain.
pub fn free_reduce(word: &Word) -> Word {
    let mut out = Word(Vec::with_capacity(word.len()));
    for &l in &word.0 {
        out.push_reduced(l);
    }
    out
}

/// Every freely reduced word over `rank` generators of length `1..=max_len`, in
/// shortlex order with letters ordered `g0, g0⁻¹, g1, g1⁻¹, …`.
pub fn reduced_words(rank: usize, max_len: usize) -> Vec<Word> {
    let mut out = Vec::new();
    if rank == 0 {
        return out;
    }
    for len in 1..=max_len {
        let mut current = Vec::with_capacity(len);
        extend_words(rank, len, &mut current, &mut out);
    }
    out
}

fn extend_words(rank: usize, len: usize, current: &mut Vec<Letter>, out: &mut Vec<Word>) {
    if current.len() == len {
        out.push(Word(current.clone()));
        return;
    }
    for idx in 0..2 * rank {
        let l = Letter::from_rank_index(idx);
        if current.last() == Some(&l.inverse()) {
            continue;
        }
        current.push(l);
        extend_words(rank, len, current, out);
        current.pop();
    }
}

/// Number of reduced words of length exactly `len` over `rank` generators.
pub fn reduced_word_count(rank: usize, len: usize) -> u128 {
    if rank == 0 {
        return u128::from(len == 0);
    }
    if len == 0 {
        return 1;
    }
    let r = rank as u128;
    (2 * r) * (2 * r - 1).saturating_pow(len as u32 - 1)
}
