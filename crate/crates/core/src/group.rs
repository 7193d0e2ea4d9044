//! Finitely presented groups: bounded Tietze simplification with free-group
//! certification, and abelian invariants through Smith normal form.

use std::collections::VecDeque;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::snf::{smith_normal_form, sparse_invariant_factors, IntMatrix};
use crate::word::{free_reduce, Letter, Word};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GroupError {
    #[error("relator {relator} uses generator {generator}, but the group has {generators}")]
    GeneratorOutOfRange { relator: usize, generator: usize, generators: usize },
    #[error("word equality requested on a presentation that is not certified free")]
    NotCertified,
    #[error("word uses generator {0} outside the presentation")]
    WordOutOfRange(usize),
}

/// A finite presentation `⟨g_0, …, g_{n-1} | relators⟩`.
///
/// Relators are kept freely and cyclically reduced, and never empty.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FPGroup {
    generators: usize,
    relators: Vec<Word>,
}

impl FPGroup {
    pub fn new(generators: usize, relators: Vec<Word>) -> Result<Self, GroupError> {
        let mut out = Vec::with_capacity(relators.len());
        for (i, r) in relators.into_iter().enumerate() {
            if let Some(g) = r.max_generator().filter(|&g| g >= generators) {
                return Err(GroupError::GeneratorOutOfRange { relator: i, generator: g, generators });
            }
            let r = r.cyclically_reduced();
            if !r.is_empty() {
                out.push(r);
            }
        }
        Ok(FPGroup { generators, relators: out })
    }

    pub fn free(rank: usize) -> Self {
        FPGroup { generators: rank, relators: Vec::new() }
    }

    pub fn generators(&self) -> usize {
        self.generators
    }

    pub fn relators(&self) -> &[Word] {
        &self.relators
    }

    /// Total relator length, the size measure Tietze moves never increase.
    pub fn size(&self) -> usize {
        self.relators.iter().map(Word::len).sum()
    }

    /// Relator exponent-sum rows in sparse form.
    pub fn relator_rows(&self) -> Vec<Vec<(usize, i64)>> {
        self.relators
            .iter()
            .map(|r| {
                let mut row: Vec<(usize, i64)> = Vec::new();
                for l in r.letters() {
                    match row.iter_mut().find(|(c, _)| *c == l.generator()) {
                        Some(e) => e.1 += i64::from(l.exponent()),
                        None => row.push((l.generator(), i64::from(l.exponent()))),
                    }
                }
                row.retain(|(_, v)| *v != 0);
                row
            })
            .collect()
    }

    pub fn relator_matrix(&self) -> IntMatrix {
        let rows: Vec<Vec<i64>> = self.relators.iter().map(|r| r.exponent_vector(self.generators)).collect();
        IntMatrix::from_rows_with_cols(&rows, self.generators)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Certification {
    /// No relators remain: the group is free on the surviving generators.
    FreeCertified,
    /// No generators and no relators remain.
    TrivialCertified,
    Inconclusive,
}

impl Certification {
    pub fn is_free(self) -> bool {
        matches!(self, Certification::FreeCertified | Certification::TrivialCertified)
    }
}

/// Output of [`tietze_simplify`]: an isomorphic presentation on a subset of the
/// original generators plus the substitution expressing every original
/// generator in the survivors.
#[derive(Clone, Debug)]
pub struct Simplification {
    /// The simplified presentation, over survivor indices `0..survivors.len()`.
    pub group: FPGroup,
    /// Original index of each surviving generator.
    pub survivors: Vec<usize>,
    /// Image of every original generator as a reduced word over survivors.
    pub substitution: Vec<Word>,
    pub certification: Certification,
    pub passes: usize,
}

impl Simplification {
    pub fn rank(&self) -> usize {
        self.survivors.len()
    }

    /// Rewrites a word over the original generators into survivor letters.
    pub fn rewrite(&self, word: &Word) -> Word {
        word.substitute(|g| self.substitution[g].clone())
    }

    /// Exact equality test, available only when the simplified presentation is
    /// free.
    pub fn word_equal(&self, a: &Word, b: &Word) -> Result<bool, GroupError> {
        if !self.certification.is_free() {
            return Err(GroupError::NotCertified);
        }
        for w in [a, b] {
            if let Some(g) = w.max_generator().filter(|&g| g >= self.substitution.len()) {
                return Err(GroupError::WordOutOfRange(g));
            }
        }
        Ok(self.rewrite(a) == self.rewrite(b))
    }
}

/// Exact equality of words in a group certified free by `simplification`.
pub fn word_equal_free(a: &Word, b: &Word, simplification: &Simplification) -> Result<bool, GroupError> {
    simplification.word_equal(a, b)
}

/// Simplifies a presentation with size-non-increasing Tietze moves.
///
/// Each pass drains a worklist of relators whose reduced form has length at
/// most two (eliminating a generator outright or identifying two generators),
/// then performs one sweep of substitutions for generators that occur exactly
/// once in some relator, taken only when the total presentation size does not
/// grow. The result is certified free when no relators remain.
pub fn tietze_simplify(group: &FPGroup, pass_budget: usize) -> Simplification {
    let mut state = Tietze::new(group);
    let mut passes = 0;
    while passes < pass_budget {
        passes += 1;
        state.drain();
        if state.live_relators == 0 {
            break;
        }
        if !state.substitution_sweep() {
            break;
        }
    }
    if passes == pass_budget && pass_budget > 0 {
        // The last sweep may have queued work; finishing it never grows size.
        state.drain();
    }
    state.finish(passes)
}

struct Tietze {
    generators: usize,
    /// `None` while alive; otherwise the eliminated generator's value, possibly
    /// in terms of other (later eliminated) generators.
    subst: Vec<Option<Word>>,
    relators: Vec<Option<Word>>,
    occurrences: Vec<Vec<u32>>,
    queue: VecDeque<u32>,
    queued: Vec<bool>,
    live_relators: usize,
}

impl Tietze {
    fn new(group: &FPGroup) -> Self {
        let n = group.generators;
        let mut occurrences = vec![Vec::new(); n];
        for (i, r) in group.relators.iter().enumerate() {
            for l in r.letters() {
                occurrences[l.generator()].push(i as u32);
            }
        }
        let m = group.relators.len();
        Tietze {
            generators: n,
            subst: vec![None; n],
            relators: group.relators.iter().cloned().map(Some).collect(),
            occurrences,
            queue: (0..m as u32).collect(),
            queued: vec![true; m],
            live_relators: m,
        }
    }

    /// Value of generator `g` over currently alive generators, compressing the
    /// stored substitution along the way.
    fn resolve(&mut self, g: usize) -> Word {
        if self.subst[g].is_none() {
            return Word::generator(g);
        }
        // Iterative post-order over the substitution dependencies.
        let mut stack = vec![(g, false)];
        while let Some((h, expanded)) = stack.pop() {
            let Some(value) = self.subst[h].clone() else { continue };
            if expanded {
                let resolved = value.substitute(|x| match &self.subst[x] {
                    None => Word::generator(x),
                    Some(w) => w.clone(),
                });
                self.subst[h] = Some(resolved);
            } else if value.letters().iter().any(|l| self.subst[l.generator()].is_some()) {
                stack.push((h, true));
                for l in value.letters() {
                    let x = l.generator();
                    if self.subst[x]
                        .as_ref()
                        .is_some_and(|w| w.letters().iter().any(|m| self.subst[m.generator()].is_some()))
                    {
                        stack.push((x, false));
                    }
                }
            }
        }
        self.subst[g].clone().unwrap()
    }

    fn current_form(&mut self, r: usize) -> Option<Word> {
        let rel = self.relators[r].clone()?;
        if rel.letters().iter().all(|l| self.subst[l.generator()].is_none()) {
            return Some(rel);
        }
        let mut out = Word::empty();
        for &l in rel.letters() {
            let w = self.resolve(l.generator());
            if l.is_inverse() {
                out.extend_reduced(&w.inverse());
            } else {
                out.extend_reduced(&w);
            }
        }
        Some(out.cyclically_reduced())
    }

    fn enqueue_generator(&mut self, g: usize) {
        let occ = std::mem::take(&mut self.occurrences[g]);
        for &r in &occ {
            if !self.queued[r as usize] && self.relators[r as usize].is_some() {
                self.queued[r as usize] = true;
                self.queue.push_back(r);
            }
        }
        self.occurrences[g] = occ;
    }

    fn drop_relator(&mut self, r: usize) {
        if self.relators[r].take().is_some() {
            self.live_relators -= 1;
        }
    }

    /// Eliminates the generator of the letter at `pos` in the cyclic word `rel`
    /// (which must contain that generator exactly once), dropping relator `r`.
    fn eliminate_from(&mut self, r: usize, rel: &Word, pos: usize) {
        let letters = rel.letters();
        let x = letters[pos];
        // Rotate so x is first: x · rest = 1, hence x = rest⁻¹.
        let rest: Word = letters[pos + 1..].iter().chain(&letters[..pos]).copied().collect();
        let rest = free_reduce(&rest);
        let value = if x.is_inverse() { rest } else { rest.inverse() };
        let g = x.generator();
        self.subst[g] = Some(value);
        self.drop_relator(r);
        self.enqueue_generator(g);
    }

    fn drain(&mut self) {
        while let Some(r) = self.queue.pop_front() {
            let r = r as usize;
            self.queued[r] = false;
            let Some(form) = self.current_form(r) else { continue };
            match form.len() {
                0 => self.drop_relator(r),
                1 => self.eliminate_from(r, &form, 0),
                2 if form.letters()[0].generator() != form.letters()[1].generator() => {
                    // Keep the smaller-indexed generator.
                    let pos = if form.letters()[0].generator() > form.letters()[1].generator() { 0 } else { 1 };
                    self.eliminate_from(r, &form, pos);
                }
                _ => {
                    let changed = self.relators[r].as_ref() != Some(&form);
                    if changed {
                        for l in form.letters() {
                            self.occurrences[l.generator()].push(r as u32);
                        }
                        self.relators[r] = Some(form);
                    }
                }
            }
        }
    }

    /// One sweep of single-occurrence substitutions that do not grow the
    /// presentation. Returns whether anything changed.
    fn substitution_sweep(&mut self) -> bool {
        // Bring every relator to its current form first so counts are exact.
        for r in 0..self.relators.len() {
            if self.relators[r].is_some() {
                let form = self.current_form(r).unwrap();
                if form.is_empty() {
                    self.drop_relator(r);
                } else {
                    self.relators[r] = Some(form);
                }
            }
        }
        let mut total = vec![0usize; self.generators];
        for rel in self.relators.iter().flatten() {
            for l in rel.letters() {
                total[l.generator()] += 1;
            }
        }
        // Generators touched this sweep; a relator mentioning one is stale.
        let mut touched = vec![false; self.generators];
        let mut changed = false;
        for r in 0..self.relators.len() {
            let Some(rel) = self.relators[r].clone() else { continue };
            if rel.letters().iter().any(|l| touched[l.generator()]) {
                continue;
            }
            let len = rel.len();
            let mut choice = None;
            for (pos, l) in rel.letters().iter().enumerate() {
                let g = l.generator();
                let here = rel.letters().iter().filter(|m| m.generator() == g).count();
                if here != 1 {
                    continue;
                }
                let others = total[g] - 1;
                // Removing the relator saves `len`; each other occurrence grows by `len - 2`.
                if others * len.saturating_sub(2) <= len {
                    let key = (others, std::cmp::Reverse(g));
                    if choice.is_none_or(|(k, _)| key < k) {
                        choice = Some((key, pos));
                    }
                }
            }
            if let Some((_, pos)) = choice {
                for l in rel.letters() {
                    touched[l.generator()] = true;
                    total[l.generator()] -= 1;
                }
                self.eliminate_from(r, &rel, pos);
                changed = true;
            }
        }
        changed
    }

    fn finish(mut self, passes: usize) -> Simplification {
        let alive: Vec<usize> = (0..self.generators).filter(|&g| self.subst[g].is_none()).collect();
        let mut index = vec![usize::MAX; self.generators];
        for (i, &g) in alive.iter().enumerate() {
            index[g] = i;
        }
        let renumber = |w: &Word| -> Word {
            w.letters().iter().map(|l| Letter::new(index[l.generator()], l.is_inverse())).collect()
        };
        let substitution: Vec<Word> = (0..self.generators)
            .map(|g| {
                let w = self.resolve(g);
                renumber(&w)
            })
            .collect();
        let mut relators = Vec::new();
        for r in 0..self.relators.len() {
            if let Some(form) = self.current_form(r) {
                if !form.is_empty() {
                    relators.push(renumber(&form));
                }
            }
        }
        let group = FPGroup::new(alive.len(), relators).expect("renumbered relators stay in range");
        let certification = match (group.relators.is_empty(), group.generators) {
            (true, 0) => Certification::TrivialCertified,
            (true, _) => Certification::FreeCertified,
            (false, _) => Certification::Inconclusive,
        };
        Simplification { group, survivors: alive, substitution, certification, passes }
    }
}

/// Free rank and torsion invariant factors of the abelianization.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AbelianInvariants {
    pub betti: usize,
    #[serde(with = "bigint_list")]
    pub torsion: Vec<BigInt>,
}

impl AbelianInvariants {
    pub fn is_trivial(&self) -> bool {
        self.betti == 0 && self.torsion.is_empty()
    }
}

/// Abelian invariants from the relator exponent matrix.
pub fn abelianize(group: &FPGroup) -> AbelianInvariants {
    let factors = sparse_invariant_factors(&group.relator_rows(), group.generators);
    AbelianInvariants {
        betti: group.generators - factors.len(),
        torsion: factors.into_iter().filter(|d| !d.is_one()).collect(),
    }
}

/// Coordinates on the free part of the abelianization.
///
/// `projection` (generators × betti) sends an exponent vector to its free
/// coordinates; `lift` (betti × generators) gives, for each free coordinate, an
/// exponent vector projecting onto that basis vector. `torsion_lift` does the
/// same for the torsion summands.
#[derive(Clone, Debug)]
pub struct AbelianCoordinates {
    pub invariants: AbelianInvariants,
    pub projection: IntMatrix,
    pub lift: IntMatrix,
    pub torsion_lift: Vec<Vec<BigInt>>,
}

impl AbelianCoordinates {
    pub fn of(group: &FPGroup) -> Self {
        let n = group.generators;
        let snf = smith_normal_form(&group.relator_matrix(), true);
        let v = snf.column.as_ref().expect("tracked");
        let vinv = snf.column_inverse.as_ref().expect("tracked");
        let rank = snf.rank();
        let betti = n - rank;
        let mut projection = IntMatrix::zeros(n, betti);
        let mut lift = IntMatrix::zeros(betti, n);
        for k in 0..betti {
            for g in 0..n {
                projection.set(g, k, v.get(g, rank + k).clone());
                lift.set(k, g, vinv.get(rank + k, g).clone());
            }
        }
        let torsion_lift = (0..rank).filter(|&i| !snf.factors[i].is_one()).map(|i| vinv.row(i).to_vec()).collect();
        AbelianCoordinates {
            invariants: AbelianInvariants { betti, torsion: snf.torsion() },
            projection,
            lift,
            torsion_lift,
        }
    }

    pub fn betti(&self) -> usize {
        self.invariants.betti
    }

    /// Free coordinates of a word.
    pub fn project(&self, word: &Word) -> Vec<BigInt> {
        let v: Vec<BigInt> = word.exponent_vector(self.projection.rows()).into_iter().map(BigInt::from).collect();
        self.projection.left_apply(&v)
    }

    /// A word realizing an integer vector of generator exponents.
    pub fn word_of_vector(vector: &[BigInt]) -> Word {
        let mut letters = Vec::new();
        for (g, e) in vector.iter().enumerate() {
            let k = e.to_i64().expect("exponent fits in i64");
            letters.extend(Word::power_of(g, k).into_letters());
        }
        Word::from_letters(letters)
    }
}

mod bigint_list {
    use num_bigint::BigInt;
    use num_traits::ToPrimitive;
    use serde::{de::Error, Deserialize, Deserializer, Serialize, Serializer};

    #[derive(Serialize, Deserialize)]
    #[serde(untagged)]
    enum Entry {
        Small(i64),
        Big(String),
    }

    pub fn serialize<S: Serializer>(v: &[BigInt], s: S) -> Result<S::Ok, S::Error> {
        let entries: Vec<Entry> =
            v.iter().map(|b| b.to_i64().map(Entry::Small).unwrap_or_else(|| Entry::Big(b.to_string()))).collect();
        entries.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<BigInt>, D::Error> {
        let entries = Vec::<Entry>::deserialize(d)?;
        entries
            .into_iter()
            .map(|e| match e {
                Entry::Small(x) => Ok(BigInt::from(x)),
                Entry::Big(s) => s.parse().map_err(D::Error::custom),
            })
            .collect()
    }
}

/// Whether an integer matrix (codomain rows × domain columns) is onto and its
/// kernel rank.
pub fn matrix_surjectivity(m: &IntMatrix) -> (bool, usize) {
    let snf = smith_normal_form(m, false);
    let onto = snf.rank() == m.rows() && snf.factors.iter().all(|d| d.abs().is_one());
    (onto, m.cols() - snf.rank())
}

/// True when `m` is square and unimodular.
pub fn is_unimodular(m: &IntMatrix) -> bool {
    m.rows() == m.cols() && matrix_surjectivity(m).0
}
