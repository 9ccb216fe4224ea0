//! Letters, words, presentations, pieces, and the algebraic C(4)/T(4) checks.
//!
//! Words are sequences of signed generator letters over an [`Alphabet`].
//! Presentations keep their relators sorted in shortlex order so that every
//! derived artifact (closures, pieces, subdivisions) is deterministic.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Index of a generator in its [`Alphabet`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct GeneratorId(pub u32);

/// Exponent sign of a letter: `Plus` is the generator itself, `Minus` its inverse.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn flip(self) -> Sign {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }
}

/// A signed generator occurrence.
///
/// Letters order by `(gen, sign)` with `Plus` before `Minus`; this is the
/// canonical alphabet order used everywhere (closure ordering, lexicographic
/// word comparison, automaton symbol tables).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Letter {
    pub gen: GeneratorId,
    pub sign: Sign,
}

impl Letter {
    pub fn plus(gen: GeneratorId) -> Letter {
        Letter { gen, sign: Sign::Plus }
    }

    pub fn minus(gen: GeneratorId) -> Letter {
        Letter { gen, sign: Sign::Minus }
    }

    pub fn inverse(self) -> Letter {
        Letter { gen: self.gen, sign: self.sign.flip() }
    }

    pub fn is_inverse_of(self, other: Letter) -> bool {
        self.gen == other.gen && self.sign != other.sign
    }
}

/// A named generator set.  Names must be unique and non-empty.
///
/// When every name is a single ASCII lowercase character the alphabet
/// supports the compact text form where `a` is a generator and `A` its
/// inverse; alphabets with longer names (subdivision alphabets) render
/// letters as `name` / `name^-1` tokens instead.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Alphabet {
    names: Vec<String>,
}

impl Alphabet {
    pub fn new(names: Vec<String>) -> Result<Alphabet, WordError> {
        let mut seen = BTreeSet::new();
        for n in &names {
            if n.is_empty() {
                return Err(WordError::BadGeneratorName(n.clone()));
            }
            if n.len() == 1 {
                let c = n.chars().next().unwrap();
                if !c.is_ascii_lowercase() {
                    return Err(WordError::BadGeneratorName(n.clone()));
                }
            }
            if !seen.insert(n.clone()) {
                return Err(WordError::DuplicateGenerator(n.clone()));
            }
        }
        Ok(Alphabet { names })
    }

    pub fn from_names(names: &[&str]) -> Alphabet {
        Alphabet::new(names.iter().map(|s| s.to_string()).collect()).expect("valid generator names")
    }

    pub fn size(&self) -> usize {
        self.names.len()
    }

    pub fn name(&self, g: GeneratorId) -> &str {
        &self.names[g.0 as usize]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn lookup(&self, name: &str) -> Option<GeneratorId> {
        self.names.iter().position(|n| n == name).map(|i| GeneratorId(i as u32))
    }

    /// All `2n` signed letters in canonical order.
    pub fn letters(&self) -> Vec<Letter> {
        let mut out = Vec::with_capacity(2 * self.size());
        for i in 0..self.size() {
            out.push(Letter::plus(GeneratorId(i as u32)));
            out.push(Letter::minus(GeneratorId(i as u32)));
        }
        out
    }

    pub fn is_compact(&self) -> bool {
        self.names.iter().all(|n| n.len() == 1)
    }

    /// Renders a letter. Compact alphabets flip case for inverses.
    pub fn letter_str(&self, l: Letter) -> String {
        let name = self.name(l.gen);
        if self.is_compact() {
            match l.sign {
                Sign::Plus => name.to_string(),
                Sign::Minus => name.to_ascii_uppercase(),
            }
        } else {
            match l.sign {
                Sign::Plus => name.to_string(),
                Sign::Minus => format!("{name}^-1"),
            }
        }
    }

    /// Renders a word: concatenated for compact alphabets, space-separated otherwise.
    pub fn word_str(&self, w: &Word) -> String {
        if w.is_empty() {
            return "1".to_string();
        }
        let parts: Vec<String> = w.letters().iter().map(|&l| self.letter_str(l)).collect();
        if self.is_compact() {
            parts.concat()
        } else {
            parts.join(" ")
        }
    }

    /// Parses the compact form: lowercase = generator, uppercase = inverse.
    /// `1` denotes the empty word.
    pub fn parse_word(&self, s: &str) -> Result<Word, WordError> {
        if !self.is_compact() {
            return Err(WordError::NotCompact);
        }
        if s == "1" {
            return Ok(Word::empty());
        }
        let mut letters = Vec::with_capacity(s.len());
        for c in s.chars() {
            let lower = c.to_ascii_lowercase();
            let gen = self
                .lookup(&lower.to_string())
                .ok_or(WordError::UnknownLetter(c))?;
            let sign = if c.is_ascii_lowercase() { Sign::Plus } else { Sign::Minus };
            letters.push(Letter { gen, sign });
        }
        Ok(Word::new(letters))
    }
}

/// A word over some alphabet.  `Ord` is shortlex: length first, then the
/// canonical letter order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct Word(Vec<Letter>);

impl Word {
    pub fn new(letters: Vec<Letter>) -> Word {
        Word(letters)
    }

    pub fn empty() -> Word {
        Word(Vec::new())
    }

    pub fn single(l: Letter) -> Word {
        Word(vec![l])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn push(&mut self, l: Letter) {
        self.0.push(l);
    }

    pub fn prefix(&self, n: usize) -> Word {
        Word(self.0[..n.min(self.0.len())].to_vec())
    }

    pub fn subword(&self, start: usize, end: usize) -> Word {
        Word(self.0[start..end].to_vec())
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        Word(v)
    }

    pub fn inverse(&self) -> Word {
        Word(self.0.iter().rev().map(|l| l.inverse()).collect())
    }

    /// Cyclic rotation moving the first `k` letters to the end.
    pub fn rotate(&self, k: usize) -> Word {
        if self.is_empty() {
            return Word::empty();
        }
        let k = k % self.len();
        let mut v = self.0[k..].to_vec();
        v.extend_from_slice(&self.0[..k]);
        Word(v)
    }

    pub fn is_freely_reduced(&self) -> bool {
        self.0.windows(2).all(|w| !w[0].is_inverse_of(w[1]))
    }

    pub fn is_cyclically_reduced(&self) -> bool {
        if !self.is_freely_reduced() {
            return false;
        }
        match (self.0.first(), self.0.last()) {
            (Some(&f), Some(&l)) => !l.is_inverse_of(f),
            _ => true,
        }
    }

    /// Letter at cyclic position `i` (indices taken mod length).
    pub fn cyclic(&self, i: usize) -> Letter {
        self.0[i % self.0.len()]
    }
}

impl std::ops::Index<usize> for Word {
    type Output = Letter;
    fn index(&self, i: usize) -> &Letter {
        &self.0[i]
    }
}

impl PartialOrd for Word {
    fn partial_cmp(&self, other: &Word) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Word {
    fn cmp(&self, other: &Word) -> std::cmp::Ordering {
        self.len().cmp(&other.len()).then_with(|| self.0.cmp(&other.0))
    }
}

impl fmt::Display for Word {
    /// Alphabet-free debug rendering (generator indices); use
    /// [`Alphabet::word_str`] for named output.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return write!(f, "1");
        }
        for l in &self.0 {
            match l.sign {
                Sign::Plus => write!(f, "g{}", l.gen.0)?,
                Sign::Minus => write!(f, "G{}", l.gen.0)?,
            }
        }
        Ok(())
    }
}

/// Removes all `x x^-1` cancellations.  Single left-to-right stack pass.
pub fn free_reduce(w: &Word) -> Word {
    let mut stack: Vec<Letter> = Vec::with_capacity(w.len());
    for &l in w.letters() {
        if stack.last().is_some_and(|&top| top.is_inverse_of(l)) {
            stack.pop();
        } else {
            stack.push(l);
        }
    }
    Word(stack)
}

/// Reduces cyclically: free reduction plus trimming inverse first/last pairs.
pub fn cyclic_reduce(w: &Word) -> Word {
    let mut v = free_reduce(w);
    while v.len() >= 2 && v.0[v.len() - 1].is_inverse_of(v.0[0]) {
        v.0.pop();
        v.0.remove(0);
    }
    v
}

/// All cyclic rotations of a cyclically reduced word.
pub fn cyclic_conjugates(w: &Word) -> Result<BTreeSet<Word>, WordError> {
    if !w.is_cyclically_reduced() {
        return Err(WordError::NotCyclicallyReduced(w.clone()));
    }
    Ok((0..w.len().max(1)).map(|k| w.rotate(k)).collect())
}

/// Least word among all rotations of `w` and of `w.inverse()`.
///
/// Two words have the same normal form exactly when they agree as cyclic
/// words up to inversion, so this serves as a dedup key for boundary labels
/// and for relator pairs that differ only by orientation.
pub fn cyclic_inverse_normal_form(w: &Word) -> Word {
    let inv = w.inverse();
    (0..w.len().max(1))
        .flat_map(|k| [w.rotate(k), inv.rotate(k)])
        .min()
        .unwrap_or_else(Word::empty)
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum WordError {
    #[error("word is not cyclically reduced: {0}")]
    NotCyclicallyReduced(Word),
    #[error("generator name invalid (must be non-empty; single-char names must be ascii lowercase): {0:?}")]
    BadGeneratorName(String),
    #[error("duplicate generator name: {0:?}")]
    DuplicateGenerator(String),
    #[error("alphabet has multi-character names; compact word syntax unavailable")]
    NotCompact,
    #[error("unknown letter {0:?}")]
    UnknownLetter(char),
    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

/// A group presentation with cyclically reduced relators.
///
/// Relators are stored sorted (shortlex) and deduplicated, so two
/// presentations with the same relator set compare equal and serialise
/// identically.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Presentation {
    alphabet: Alphabet,
    relators: Vec<Word>,
}

impl Presentation {
    pub fn new(alphabet: Alphabet, relators: Vec<Word>) -> Result<Presentation, WordError> {
        let mut set = BTreeSet::new();
        for r in relators {
            if r.is_empty() || !r.is_cyclically_reduced() {
                return Err(WordError::NotCyclicallyReduced(r));
            }
            for l in r.letters() {
                assert!(
                    (l.gen.0 as usize) < alphabet.size(),
                    "relator letter outside alphabet"
                );
            }
            set.insert(r);
        }
        Ok(Presentation { alphabet, relators: set.into_iter().collect() })
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn relators(&self) -> &[Word] {
        &self.relators
    }

    pub fn max_relator_len(&self) -> usize {
        self.relators.iter().map(Word::len).max().unwrap_or(0)
    }

    /// True when the relator set equals its own symmetric closure.
    pub fn is_symmetrically_closed(&self) -> bool {
        let closed = symmetric_closure(self);
        closed.relators == self.relators
    }

    /// Parses the line-oriented text form:
    ///
    /// ```text
    /// gens: a b
    /// abAB
    /// # comment
    /// ```
    pub fn parse(text: &str) -> Result<Presentation, WordError> {
        let mut lines = text.lines().enumerate();
        let (first_no, first) = loop {
            match lines.next() {
                Some((i, l)) => {
                    let t = l.trim();
                    if t.is_empty() || t.starts_with('#') {
                        continue;
                    }
                    break (i + 1, t.to_string());
                }
                None => {
                    return Err(WordError::Parse { line: 0, msg: "empty input".to_string() })
                }
            }
        };
        let Some(rest) = first.strip_prefix("gens:") else {
            return Err(WordError::Parse {
                line: first_no,
                msg: format!("expected `gens: ...`, found {first:?}"),
            });
        };
        let names: Vec<String> = rest.split_whitespace().map(|s| s.to_string()).collect();
        if names.is_empty() {
            return Err(WordError::Parse { line: first_no, msg: "no generators listed".into() });
        }
        let alphabet = Alphabet::new(names)
            .map_err(|e| WordError::Parse { line: first_no, msg: e.to_string() })?;
        let mut relators = Vec::new();
        for (i, line) in lines {
            let t = line.trim();
            if t.is_empty() || t.starts_with('#') {
                continue;
            }
            let w = alphabet
                .parse_word(t)
                .map_err(|e| WordError::Parse { line: i + 1, msg: e.to_string() })?;
            if !w.is_cyclically_reduced() || w.is_empty() {
                return Err(WordError::Parse {
                    line: i + 1,
                    msg: format!("relator {t:?} is not cyclically reduced"),
                });
            }
            relators.push(w);
        }
        Presentation::new(alphabet, relators)
    }

    /// Writes the text form back out (sorted relators; bit-stable).
    pub fn to_text(&self) -> String {
        let mut s = format!("gens: {}\n", self.alphabet.names().join(" "));
        for r in &self.relators {
            s.push_str(&self.alphabet.word_str(r));
            s.push('\n');
        }
        s
    }
}

/// Symmetric closure: all cyclic rotations of all relators and their inverses.
///
/// Relators are cyclically reduced by construction, so every rotation and
/// every rotation of an inverse is as well.
pub fn symmetric_closure(p: &Presentation) -> Presentation {
    let mut set: BTreeSet<Word> = BTreeSet::new();
    for r in p.relators() {
        let inv = r.inverse();
        for k in 0..r.len() {
            set.insert(r.rotate(k));
            set.insert(inv.rotate(k));
        }
    }
    Presentation { alphabet: p.alphabet.clone(), relators: set.into_iter().collect() }
}

/// A piece: a common prefix of two distinct closure relators.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Piece {
    pub word: Word,
    /// Two distinct closure relators that begin with `word`.
    pub witnesses: (Word, Word),
}

/// All pieces of the symmetric closure of `p`, sorted by word.
///
/// A nonempty word `P` is a piece when `P W1` and `P W2` are closure
/// relators for two different completions `W1 != W2`; equivalently `P` is a
/// prefix of two distinct closure relators.  Witnesses record the
/// lexicographically least such pair.
pub fn pieces(p: &Presentation) -> Vec<Piece> {
    let closure = symmetric_closure(p);
    let mut by_prefix: BTreeMap<Word, Vec<&Word>> = BTreeMap::new();
    for r in closure.relators() {
        for n in 1..=r.len() {
            by_prefix.entry(r.prefix(n)).or_default().push(r);
        }
    }
    let mut out = Vec::new();
    for (prefix, rels) in by_prefix {
        let distinct: BTreeSet<&&Word> = rels.iter().collect();
        if distinct.len() >= 2 {
            let mut it = distinct.into_iter();
            let w1 = (*it.next().unwrap()).clone();
            let w2 = (*it.next().unwrap()).clone();
            out.push(Piece { word: prefix, witnesses: (w1, w2) });
        }
    }
    out
}

/// Outcome of the algebraic C(4) check.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct C4Report {
    pub holds: bool,
    /// A closure relator together with a decomposition into at most three
    /// pieces, when the condition fails.
    pub violation: Option<(Word, Vec<Word>)>,
}

/// Algebraic C(4): no closure relator is a product of three or fewer pieces.
///
/// Relators that cannot be written as a product of pieces at all satisfy the
/// condition vacuously.
pub fn check_c4(p: &Presentation) -> C4Report {
    let closure = symmetric_closure(p);
    let piece_set: BTreeSet<Word> = pieces(p).into_iter().map(|pc| pc.word).collect();
    for r in closure.relators() {
        if let Some(parts) = decompose_into_pieces(r, &piece_set, 3) {
            return C4Report { holds: false, violation: Some((r.clone(), parts)) };
        }
    }
    C4Report { holds: true, violation: None }
}

/// Shortest decomposition of `r` into words from `piece_set` using at most
/// `max_parts` factors, if one exists.  Dynamic program over prefix lengths.
fn decompose_into_pieces(
    r: &Word,
    piece_set: &BTreeSet<Word>,
    max_parts: usize,
) -> Option<Vec<Word>> {
    let n = r.len();
    // best[i] = minimal number of pieces covering r[..i]
    let mut best: Vec<Option<usize>> = vec![None; n + 1];
    let mut back: Vec<usize> = vec![0; n + 1];
    best[0] = Some(0);
    for j in 1..=n {
        for i in 0..j {
            let Some(c) = best[i] else { continue };
            if c >= max_parts {
                continue;
            }
            if piece_set.contains(&r.subword(i, j)) && best[j].is_none_or(|b| c + 1 < b) {
                best[j] = Some(c + 1);
                back[j] = i;
            }
        }
    }
    match best[n] {
        Some(c) if c <= max_parts => {
            let mut parts = Vec::new();
            let mut j = n;
            while j > 0 {
                let i = back[j];
                parts.push(r.subword(i, j));
                j = i;
            }
            parts.reverse();
            Some(parts)
        }
        _ => None,
    }
}

/// Outcome of the algebraic T(4) check.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct T4Report {
    pub holds: bool,
    /// A triple `(R1, R2, R3)` of closure relators for which all of
    /// `R1 R2`, `R2 R3`, `R3 R1` cancel, when the condition fails.
    pub violation: Option<[Word; 3]>,
}

/// Algebraic T(4): for any three closure relators `R1, R2, R3` at least one
/// of `R1 R2`, `R2 R3`, `R3 R1` is freely reduced as written.
///
/// The products only interact at the seams, so the test depends just on each
/// relator's first and last letter; relators are grouped by that pair before
/// the cubic scan.
pub fn check_t4(p: &Presentation) -> T4Report {
    let closure = symmetric_closure(p);
    // (first, last) -> least relator in that class
    let mut classes: BTreeMap<(Letter, Letter), &Word> = BTreeMap::new();
    for r in closure.relators() {
        let key = (r[0], r[r.len() - 1]);
        classes.entry(key).or_insert(r);
    }
    let reps: Vec<(&(Letter, Letter), &&Word)> = classes.iter().collect();
    for &(k1, r1) in &reps {
        for &(k2, r2) in &reps {
            // R1 R2 cancels iff last(R1) = first(R2)^-1
            if !k1.1.is_inverse_of(k2.0) {
                continue;
            }
            for &(k3, r3) in &reps {
                if k2.1.is_inverse_of(k3.0) && k3.1.is_inverse_of(k1.0) {
                    return T4Report {
                        holds: false,
                        violation: Some([(*r1).clone(), (*r2).clone(), (*r3).clone()]),
                    };
                }
            }
        }
    }
    T4Report { holds: true, violation: None }
}

/// First hypothesis gate: every relator has length exactly four and is
/// cyclically reduced (the latter holds by construction of [`Presentation`]).
/// Vacuously true without relators.
pub fn check_h1(p: &Presentation) -> bool {
    p.relators().iter().all(|r| r.len() == 4)
}

/// Checks that each generator, taken as a length-one word, is a piece.
/// Returns the offending generators otherwise.  The piece set is closed
/// under inversion, so checking the positive letter suffices.
pub fn every_generator_is_piece(p: &Presentation) -> (bool, Vec<GeneratorId>) {
    let piece_words: BTreeSet<Word> = pieces(p).into_iter().map(|pc| pc.word).collect();
    let mut offenders = Vec::new();
    for i in 0..p.alphabet().size() {
        let g = GeneratorId(i as u32);
        if !piece_words.contains(&Word::single(Letter::plus(g))) {
            offenders.push(g);
        }
    }
    (offenders.is_empty(), offenders)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use proptest::prelude::*;

    fn ab() -> Alphabet {
        Alphabet::from_names(&["a", "b"])
    }

    fn w(s: &str) -> Word {
        ab().parse_word(s).unwrap()
    }

    #[test]
    fn parse_and_render_roundtrip() {
        let a = ab();
        for s in ["abAB", "ababaBABAB", "a", "BA", "1"] {
            let word = a.parse_word(s).unwrap();
            assert_eq!(a.word_str(&word), s);
        }
        assert!(a.parse_word("abc").is_err());
    }

    #[test]
    fn free_reduce_examples() {
        assert_eq!(free_reduce(&w("abBA")), Word::empty());
        assert_eq!(free_reduce(&w("abBa")), w("aa"));
        assert_eq!(free_reduce(&w("aAaAa")), w("a"));
        assert!(free_reduce(&w("abab")).is_freely_reduced());
    }

    // Oracle: reduce by repeatedly deleting the first cancelling pair found,
    // restarting from scratch each time.
    fn reduce_by_rescan(word: &Word) -> Word {
        let mut v: Vec<Letter> = word.letters().to_vec();
        loop {
            let mut hit = None;
            for i in 0..v.len().saturating_sub(1) {
                if v[i].is_inverse_of(v[i + 1]) {
                    hit = Some(i);
                    break;
                }
            }
            match hit {
                Some(i) => {
                    v.drain(i..=i + 2 - 1);
                }
                None => return Word::new(v),
            }
        }
    }

    #[test]
    fn free_reduce_exhaustive_matches_rescan_oracle() {
        // All words of length <= 7 over {a, A, b, B}.
        let letters = ab().letters();
        let mut frontier = vec![Word::empty()];
        for _ in 0..7 {
            let mut next = Vec::new();
            for word in &frontier {
                for &l in &letters {
                    let mut v = word.letters().to_vec();
                    v.push(l);
                    next.push(Word::new(v));
                }
            }
            for word in &next {
                let fast = free_reduce(word);
                assert_eq!(fast, reduce_by_rescan(word));
                assert!(fast.is_freely_reduced());
                assert_eq!(free_reduce(&fast), fast);
                assert!(fast.len() <= word.len());
                assert_eq!((word.len() - fast.len()) % 2, 0);
            }
            frontier = next;
        }
    }

    proptest! {
        #[test]
        fn free_reduce_matches_oracle_on_random_words(idx in proptest::collection::vec(0usize..4, 0..40)) {
            let letters = ab().letters();
            let word = Word::new(idx.into_iter().map(|i| letters[i]).collect());
            prop_assert_eq!(free_reduce(&word), reduce_by_rescan(&word));
        }

        #[test]
        fn inverse_cancels(idx in proptest::collection::vec(0usize..4, 0..20)) {
            let letters = ab().letters();
            let word = Word::new(idx.into_iter().map(|i| letters[i]).collect());
            prop_assert_eq!(free_reduce(&word.concat(&word.inverse())), Word::empty());
        }
    }

    #[test]
    fn cyclic_conjugates_require_cyclic_reduction() {
        assert!(cyclic_conjugates(&w("abA")).is_err());
        let set = cyclic_conjugates(&w("abAB")).unwrap();
        assert_eq!(set.len(), 4);
        assert!(set.contains(&w("BabA")));
    }

    #[test]
    fn closure_of_z2_has_eight_relators() {
        let p = fixtures::z2();
        let c = symmetric_closure(&p);
        assert_eq!(c.relators().len(), 8);
        for r in c.relators() {
            assert!(r.is_cyclically_reduced());
        }
        // closing is idempotent
        assert_eq!(symmetric_closure(&c), c);
    }

    #[test]
    fn closure_of_running_example_has_twenty_relators() {
        let p = fixtures::running_example();
        let c = symmetric_closure(&p);
        assert_eq!(c.relators().len(), 20);
        let ab_prefix = w("ab");
        let with_prefix = c
            .relators()
            .iter()
            .filter(|r| r.len() >= 2 && r.prefix(2) == ab_prefix)
            .count();
        assert_eq!(with_prefix, 4);
    }

    #[test]
    fn pieces_of_z2_are_the_four_letters() {
        let p = fixtures::z2();
        let ps = pieces(&p);
        let words: BTreeSet<String> =
            ps.iter().map(|pc| p.alphabet().word_str(&pc.word)).collect();
        let expect: BTreeSet<String> =
            ["a", "b", "A", "B"].iter().map(|s| s.to_string()).collect();
        assert_eq!(words, expect);
        // witnesses really are distinct closure relators with the piece as prefix
        let closure = symmetric_closure(&p);
        for pc in &ps {
            let (u, v) = &pc.witnesses;
            assert_ne!(u, v);
            assert!(closure.relators().contains(u));
            assert!(closure.relators().contains(v));
            assert_eq!(&u.prefix(pc.word.len()), &pc.word);
            assert_eq!(&v.prefix(pc.word.len()), &pc.word);
            assert!(pc.word.len() < u.len() && pc.word.len() < v.len());
        }
    }

    #[test]
    fn abab_has_no_pieces() {
        let p = Presentation::new(ab(), vec![w("abab")]).unwrap();
        assert!(pieces(&p).is_empty());
        // C(4) then holds vacuously.
        assert!(check_c4(&p).holds);
    }

    #[test]
    fn aa_generator_is_not_a_piece() {
        let a = Alphabet::from_names(&["a"]);
        let r = a.parse_word("aa").unwrap();
        let p = Presentation::new(a, vec![r]).unwrap();
        let (ok, offenders) = every_generator_is_piece(&p);
        assert!(!ok);
        assert_eq!(offenders, vec![GeneratorId(0)]);
    }

    #[test]
    fn z2_generators_are_pieces() {
        let (ok, offenders) = every_generator_is_piece(&fixtures::z2());
        assert!(ok, "offenders: {offenders:?}");
    }

    // Brute-force reference: try all ways to cover r with 1..=3 pieces.
    fn decomposable_same_as_bruteforce(p: &Presentation) {
        let closure = symmetric_closure(p);
        let piece_set: BTreeSet<Word> = pieces(p).into_iter().map(|pc| pc.word).collect();
        fn cover(r: &Word, from: usize, left: usize, set: &BTreeSet<Word>) -> bool {
            if from == r.len() {
                return true;
            }
            if left == 0 {
                return false;
            }
            (from + 1..=r.len())
                .any(|j| set.contains(&r.subword(from, j)) && cover(r, j, left - 1, set))
        }
        for r in closure.relators() {
            let fast = decompose_into_pieces(r, &piece_set, 3).is_some();
            let brute = cover(r, 0, 3, &piece_set);
            assert_eq!(fast, brute, "mismatch on {r}");
        }
    }

    #[test]
    fn c4_decomposition_matches_bruteforce() {
        decomposable_same_as_bruteforce(&fixtures::z2());
        decomposable_same_as_bruteforce(&fixtures::running_example());
        let square =
            Presentation::new(Alphabet::from_names(&["a"]), vec![Alphabet::from_names(&["a"])
                .parse_word("aaaa")
                .unwrap()])
            .unwrap();
        decomposable_same_as_bruteforce(&square);
    }

    #[test]
    fn c4_verdicts_on_fixtures() {
        assert!(check_c4(&fixtures::z2()).holds);
        assert!(check_c4(&fixtures::running_example()).holds);
        let a = Alphabet::from_names(&["a"]);
        let sq = Presentation::new(a.clone(), vec![a.parse_word("aaaa").unwrap()]).unwrap();
        // pieces of <a|aaaa> are empty (aaaa and AAAA share no prefix), so C(4) is vacuous
        assert!(check_c4(&sq).holds);
    }

    // Literal cubic reference for T(4).
    fn t4_bruteforce(p: &Presentation) -> bool {
        let closure = symmetric_closure(p);
        let rs = closure.relators();
        let reduced_product =
            |x: &Word, y: &Word| !x.letters()[x.len() - 1].is_inverse_of(y.letters()[0]);
        for r1 in rs {
            for r2 in rs {
                for r3 in rs {
                    if !reduced_product(r1, r2)
                        && !reduced_product(r2, r3)
                        && !reduced_product(r3, r1)
                    {
                        return false;
                    }
                }
            }
        }
        true
    }

    #[test]
    fn t4_matches_bruteforce_on_fixtures() {
        for p in [
            fixtures::z2(),
            fixtures::running_example(),
            fixtures::single_square(),
            fixtures::abab(),
        ] {
            assert_eq!(check_t4(&p).holds, t4_bruteforce(&p), "t4 mismatch");
        }
    }

    #[test]
    fn t4_verdicts_on_fixtures() {
        assert!(check_t4(&fixtures::z2()).holds);
        assert!(check_t4(&fixtures::running_example()).holds);
        assert!(check_t4(&fixtures::single_square()).holds);
    }

    #[test]
    fn t4_violation_is_reported_with_witness() {
        // Two commuting squares sharing a generator: abAB and acAC.  The triple
        // (abAB rotated, ...) produces three mutually cancelling products.
        let a = Alphabet::from_names(&["a", "b", "c"]);
        let p = Presentation::new(
            a.clone(),
            vec![a.parse_word("abAB").unwrap(), a.parse_word("acAC").unwrap()],
        )
        .unwrap();
        let rep = check_t4(&p);
        assert_eq!(rep.holds, t4_bruteforce(&p));
        if let Some([r1, r2, r3]) = rep.violation {
            let cancels =
                |x: &Word, y: &Word| x.letters()[x.len() - 1].is_inverse_of(y.letters()[0]);
            assert!(cancels(&r1, &r2) && cancels(&r2, &r3) && cancels(&r3, &r1));
        } else {
            assert!(rep.holds);
        }
    }

    #[test]
    fn h1_on_fixtures() {
        assert!(check_h1(&fixtures::z2()));
        assert!(!check_h1(&fixtures::running_example())); // length 10 relator
        assert!(check_h1(&fixtures::free_rank2())); // vacuous without relators
        assert!(check_h1(&fixtures::single_square()));
    }

    #[test]
    fn presentation_text_roundtrip() {
        let p = fixtures::z2();
        let text = p.to_text();
        assert_eq!(text, "gens: a b\nabAB\n");
        let q = Presentation::parse(&text).unwrap();
        assert_eq!(p, q);
        // comments and blank lines are ignored
        let r = Presentation::parse("# header\n\ngens: a b\n# relator\nabAB\n").unwrap();
        assert_eq!(r, p);
    }

    #[test]
    fn presentation_rejects_bad_input() {
        assert!(Presentation::parse("abAB").is_err()); // missing gens header
        assert!(Presentation::parse("gens: a b\nabA\n").is_err()); // not cyclically reduced
        assert!(Presentation::parse("gens: a a\n").is_err()); // duplicate name
    }

    #[test]
    fn shortlex_order() {
        let mut v = vec![w("ba"), w("a"), w("ab"), Word::empty(), w("A")];
        v.sort();
        assert_eq!(v, vec![Word::empty(), w("a"), w("A"), w("ab"), w("ba")]);
    }

    #[test]
    fn cyclic_inverse_normal_form_identifies_rotations_and_inverses() {
        let base = w("abAB");
        let key = cyclic_inverse_normal_form(&base);
        for k in 0..4 {
            assert_eq!(cyclic_inverse_normal_form(&base.rotate(k)), key);
            assert_eq!(cyclic_inverse_normal_form(&base.inverse().rotate(k)), key);
        }
        assert_ne!(cyclic_inverse_normal_form(&w("aabb")), key);
        assert_eq!(cyclic_inverse_normal_form(&Word::empty()), Word::empty());
    }
}
