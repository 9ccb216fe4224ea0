//! Bounded, certificate-producing decision procedures for the word problem.
//!
//! Nothing here ever asserts inequality: [`equal_in_group`] answers `Equal`
//! with a replayable rewrite certificate or `Unknown` when the budget runs
//! out.  [`MetricBall`] partitions all words up to a radius into classes by
//! saturating one-step rewrites inside the ball; class-graph distances are
//! upper bounds on group distance and are exact whenever no rewrite was
//! discarded at the length cap.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::words::{symmetric_closure, Letter, Presentation, Word};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OracleError {
    #[error("budget invalid: max_len {max_len} is below the longest input word {need}")]
    BudgetInvalid { max_len: usize, need: usize },
    #[error("word of length {len} exceeds ball radius {radius}")]
    WordExceedsBall { len: usize, radius: usize },
    #[error("words are not certified equal within the ball")]
    NotEqual,
    #[error("word {0} is not geodesic: {1} is a shorter equal word")]
    NotGeodesic(Word, Word),
}

/// Search bounds for [`equal_in_group`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EqualityBudget {
    /// Longest intermediate word the search may visit.
    pub max_len: usize,
    /// Maximum number of breadth-first expansions.
    pub max_steps: usize,
}

impl EqualityBudget {
    /// Default bounds for a pair: intermediate words may exceed the inputs
    /// by two relator lengths, and the step cap grows quadratically.
    pub fn for_inputs(p: &Presentation, w: &Word, u: &Word) -> EqualityBudget {
        let n = w.len().max(u.len());
        EqualityBudget {
            max_len: n + 2 * p.max_relator_len(),
            max_steps: 64 * (n + 2) * (n + 2),
        }
    }
}

/// One rewrite applied at a position.  `RelatorSub` replaces `removed` by
/// `inserted` where `removed . inserted^-1` is a closure relator.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum RewriteStep {
    FreeInsert { pos: usize, letter: Letter },
    FreeDelete { pos: usize },
    RelatorSub { pos: usize, removed: Word, inserted: Word, relator: Word },
}

impl RewriteStep {
    /// Applies the step, validating it against the closure relator set.
    pub fn apply(&self, w: &Word, closure: &BTreeSet<Word>) -> Result<Word, String> {
        match self {
            RewriteStep::FreeInsert { pos, letter } => {
                if *pos > w.len() {
                    return Err("insert position out of range".into());
                }
                let mut v = w.letters().to_vec();
                v.insert(*pos, letter.inverse());
                v.insert(*pos, *letter);
                Ok(Word::new(v))
            }
            RewriteStep::FreeDelete { pos } => {
                if pos + 1 >= w.len() + 1 && w.len() < 2 {
                    return Err("delete position out of range".into());
                }
                if pos + 2 > w.len() {
                    return Err("delete position out of range".into());
                }
                if !w[*pos].is_inverse_of(w[pos + 1]) {
                    return Err("letters at delete position do not cancel".into());
                }
                let mut v = w.letters().to_vec();
                v.drain(*pos..*pos + 2);
                Ok(Word::new(v))
            }
            RewriteStep::RelatorSub { pos, removed, inserted, relator } => {
                let cat = removed.concat(&inserted.inverse());
                if &cat != relator || !closure.contains(relator) {
                    return Err("substitution is not backed by a closure relator".into());
                }
                if pos + removed.len() > w.len() {
                    return Err("substitution span out of range".into());
                }
                if &w.subword(*pos, pos + removed.len()) != removed {
                    return Err("substitution source does not match word".into());
                }
                let mut v = w.letters()[..*pos].to_vec();
                v.extend_from_slice(inserted.letters());
                v.extend_from_slice(&w.letters()[pos + removed.len()..]);
                Ok(Word::new(v))
            }
        }
    }
}

/// Replays a certificate from `start`, returning the final word or the index
/// of the first invalid step.
pub fn replay_certificate(
    p: &Presentation,
    start: &Word,
    steps: &[RewriteStep],
) -> Result<Word, (usize, String)> {
    let closure: BTreeSet<Word> = symmetric_closure(p).relators().iter().cloned().collect();
    let mut cur = start.clone();
    for (i, s) in steps.iter().enumerate() {
        cur = s.apply(&cur, &closure).map_err(|e| (i, e))?;
    }
    Ok(cur)
}

/// Verdict of the bounded equality search.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum EqualityVerdict {
    Equal { certificate: Vec<RewriteStep>, budget_spent: usize },
    Unknown { budget_spent: usize },
}

impl EqualityVerdict {
    pub fn is_equal(&self) -> bool {
        matches!(self, EqualityVerdict::Equal { .. })
    }
}

/// All one-step rewrites of `w` staying within `max_len`, in a fixed order:
/// free deletions by position, free insertions by position and letter, then
/// relator substitutions by position, closure index, and split point.
fn neighbors(
    w: &Word,
    closure: &[Word],
    letters: &[Letter],
    max_len: usize,
) -> Vec<(Word, RewriteStep)> {
    let mut out = Vec::new();
    for pos in 0..w.len().saturating_sub(1) {
        if w[pos].is_inverse_of(w[pos + 1]) {
            let step = RewriteStep::FreeDelete { pos };
            let mut v = w.letters().to_vec();
            v.drain(pos..pos + 2);
            out.push((Word::new(v), step));
        }
    }
    if w.len() + 2 <= max_len {
        for pos in 0..=w.len() {
            for &letter in letters {
                let step = RewriteStep::FreeInsert { pos, letter };
                let mut v = w.letters().to_vec();
                v.insert(pos, letter.inverse());
                v.insert(pos, letter);
                out.push((Word::new(v), step));
            }
        }
    }
    for pos in 0..=w.len() {
        for relator in closure {
            for cut in 0..=relator.len() {
                let removed = relator.prefix(cut);
                if pos + cut > w.len() || w.subword(pos, pos + cut) != removed {
                    continue;
                }
                let inserted = relator.subword(cut, relator.len()).inverse();
                let new_len = w.len() - cut + inserted.len();
                if new_len > max_len {
                    continue;
                }
                let mut v = w.letters()[..pos].to_vec();
                v.extend_from_slice(inserted.letters());
                v.extend_from_slice(&w.letters()[pos + cut..]);
                out.push((
                    Word::new(v),
                    RewriteStep::RelatorSub { pos, removed, inserted, relator: relator.clone() },
                ));
            }
        }
    }
    out
}

/// Bounded breadth-first search for a rewrite path from `w` to `u`.
///
/// `Equal` verdicts come with the step chain; `Unknown` means the search
/// space within `budget` was exhausted or the step cap was hit.  Expansion
/// order is deterministic, so certificates are reproducible.
pub fn equal_in_group(
    p: &Presentation,
    w: &Word,
    u: &Word,
    budget: EqualityBudget,
) -> Result<EqualityVerdict, OracleError> {
    let need = w.len().max(u.len());
    if budget.max_len < need {
        return Err(OracleError::BudgetInvalid { max_len: budget.max_len, need });
    }
    if w == u {
        return Ok(EqualityVerdict::Equal { certificate: Vec::new(), budget_spent: 0 });
    }
    let closure: Vec<Word> = symmetric_closure(p).relators().to_vec();
    let letters = p.alphabet().letters();
    let mut parent: BTreeMap<Word, (Word, RewriteStep)> = BTreeMap::new();
    let mut seen: BTreeSet<Word> = BTreeSet::new();
    seen.insert(w.clone());
    let mut queue: VecDeque<Word> = VecDeque::new();
    queue.push_back(w.clone());
    let mut spent = 0usize;
    while let Some(cur) = queue.pop_front() {
        if spent >= budget.max_steps {
            return Ok(EqualityVerdict::Unknown { budget_spent: spent });
        }
        spent += 1;
        for (next, step) in neighbors(&cur, &closure, &letters, budget.max_len) {
            if seen.contains(&next) {
                continue;
            }
            seen.insert(next.clone());
            parent.insert(next.clone(), (cur.clone(), step));
            if &next == u {
                let mut chain = Vec::new();
                let mut at = next;
                while &at != w {
                    let (prev, step) = parent.remove(&at).unwrap();
                    chain.push(step);
                    at = prev;
                }
                chain.reverse();
                return Ok(EqualityVerdict::Equal { certificate: chain, budget_spent: spent });
            }
            queue.push_back(next);
        }
    }
    Ok(EqualityVerdict::Unknown { budget_spent: spent })
}

/// One merge recorded while saturating a ball: word `a` rewrites to word `b`
/// by `step`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MergeEdge {
    pub from: usize,
    pub to: usize,
    pub step: RewriteStep,
}

/// Partition of all words of length at most `radius` into provisional group
/// classes, with a quotient-graph metric.
#[derive(Debug, Clone)]
pub struct MetricBall {
    pub radius: usize,
    /// All words of length <= radius in shortlex order.
    pub words: Vec<Word>,
    index: BTreeMap<Word, usize>,
    /// Class id per word.
    pub class_of: Vec<usize>,
    pub classes: Vec<BallClass>,
    /// Pairwise class distances in the quotient multigraph.
    dist: Vec<Vec<u32>>,
    /// True when some rewrite was discarded because its target exceeded the
    /// radius; distances are exact only for saturated balls, otherwise they
    /// are upper bounds.
    pub truncated: bool,
    /// Union edges with one-step certificates, for replaying class equality.
    pub merges: Vec<MergeEdge>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BallClass {
    /// Member word indices, ascending (hence shortlex).
    pub members: Vec<usize>,
    /// Index of the shortlex-least member.
    pub min_rep: usize,
    /// Length of the shortest member: the certified distance bound to 1.
    pub geodesic_len: usize,
}

struct Dsu(Vec<usize>);

impl Dsu {
    fn new(n: usize) -> Dsu {
        Dsu((0..n).collect())
    }
    fn find(&mut self, x: usize) -> usize {
        if self.0[x] != x {
            let r = self.find(self.0[x]);
            self.0[x] = r;
        }
        self.0[x]
    }
    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            // keep the smaller index as root so class numbering is canonical
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.0[hi] = lo;
        }
    }
}

/// Builds the radius-`radius` ball: enumerates every word up to the radius,
/// merges across all one-step rewrites staying inside the ball, and runs
/// all-pairs BFS over the generator-step quotient graph.
pub fn build_ball(p: &Presentation, radius: usize) -> MetricBall {
    let letters = p.alphabet().letters();
    let mut words: Vec<Word> = vec![Word::empty()];
    let mut layer: Vec<Word> = vec![Word::empty()];
    for _ in 0..radius {
        let mut next = Vec::new();
        for w in &layer {
            for &l in &letters {
                let mut v = w.letters().to_vec();
                v.push(l);
                next.push(Word::new(v));
            }
        }
        words.extend(next.iter().cloned());
        layer = next;
    }
    words.sort();
    let index: BTreeMap<Word, usize> =
        words.iter().enumerate().map(|(i, w)| (w.clone(), i)).collect();

    let closure: Vec<Word> = symmetric_closure(p).relators().to_vec();
    let mut dsu = Dsu::new(words.len());
    let mut merges = Vec::new();
    let mut truncated = false;
    for (i, w) in words.iter().enumerate() {
        // Free insertions are the inverses of deletions between ball members,
        // so applying deletions and relator substitutions in both directions
        // of each split covers the full rewrite relation inside the ball.
        for (next, step) in neighbors(w, &closure, &letters, radius) {
            match index.get(&next) {
                Some(&j) => {
                    if dsu.find(i) != dsu.find(j) {
                        dsu.union(i, j);
                        merges.push(MergeEdge { from: i, to: j, step });
                    }
                }
                None => truncated = true,
            }
        }
        // detect rewrites that left the ball purely by length
        if w.len() + 2 > radius && !closure.is_empty() {
            truncated = true;
        }
    }

    let mut root_to_class: BTreeMap<usize, usize> = BTreeMap::new();
    let mut classes: Vec<BallClass> = Vec::new();
    let mut class_of = vec![0usize; words.len()];
    for i in 0..words.len() {
        let r = dsu.find(i);
        let c = *root_to_class.entry(r).or_insert_with(|| {
            classes.push(BallClass { members: Vec::new(), min_rep: i, geodesic_len: usize::MAX });
            classes.len() - 1
        });
        class_of[i] = c;
        classes[c].members.push(i);
        if words[i] < words[classes[c].min_rep] {
            classes[c].min_rep = i;
        }
        classes[c].geodesic_len = classes[c].geodesic_len.min(words[i].len());
    }

    // Quotient multigraph: class(w) -- class(w x) for every extension in the ball.
    let n = classes.len();
    let mut adj: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); n];
    for (i, w) in words.iter().enumerate() {
        if w.len() == radius {
            continue;
        }
        for &l in &letters {
            let mut v = w.letters().to_vec();
            v.push(l);
            let j = index[&Word::new(v)];
            let (a, b) = (class_of[i], class_of[j]);
            if a != b {
                adj[a].insert(b);
                adj[b].insert(a);
            }
        }
    }
    let mut dist = vec![vec![u32::MAX; n]; n];
    for (s, row) in dist.iter_mut().enumerate() {
        row[s] = 0;
        let mut q = VecDeque::new();
        q.push_back(s);
        while let Some(c) = q.pop_front() {
            let d = row[c];
            for &nb in &adj[c] {
                if row[nb] == u32::MAX {
                    row[nb] = d + 1;
                    q.push_back(nb);
                }
            }
        }
    }

    MetricBall { radius, words, index, class_of, classes, dist, truncated, merges }
}

impl MetricBall {
    pub fn word_index(&self, w: &Word) -> Result<usize, OracleError> {
        self.index
            .get(w)
            .copied()
            .ok_or(OracleError::WordExceedsBall { len: w.len(), radius: self.radius })
    }

    pub fn class(&self, w: &Word) -> Result<usize, OracleError> {
        Ok(self.class_of[self.word_index(w)?])
    }

    /// Class of the empty word.
    pub fn identity_class(&self) -> usize {
        self.class_of[self.index[&Word::empty()]]
    }

    /// Path distance between two classes in the quotient graph.
    pub fn class_distance(&self, a: usize, b: usize) -> u32 {
        self.dist[a][b]
    }

    pub fn distance(&self, w: &Word, u: &Word) -> Result<u32, OracleError> {
        Ok(self.class_distance(self.class(w)?, self.class(u)?))
    }

    /// Shortlex-least member of the word's class.
    pub fn min_rep(&self, w: &Word) -> Result<&Word, OracleError> {
        let c = self.class(w)?;
        Ok(&self.words[self.classes[c].min_rep])
    }

    /// Shortest path of merge steps between two same-class words, replayable
    /// as a rewrite certificate.
    pub fn class_certificate(&self, w: &Word, u: &Word) -> Result<Vec<RewriteStep>, OracleError> {
        let (wi, ui) = (self.word_index(w)?, self.word_index(u)?);
        if self.class_of[wi] != self.class_of[ui] {
            return Err(OracleError::NotEqual);
        }
        if wi == ui {
            return Ok(Vec::new());
        }
        // adjacency over merge edges, with inverse steps for reverse traversal
        let mut adj: BTreeMap<usize, Vec<(usize, RewriteStep)>> = BTreeMap::new();
        for e in &self.merges {
            adj.entry(e.from).or_default().push((e.to, e.step.clone()));
            adj.entry(e.to).or_default().push((e.from, invert_step(&e.step, &self.words[e.from])));
        }
        let mut prev: BTreeMap<usize, (usize, RewriteStep)> = BTreeMap::new();
        let mut q = VecDeque::new();
        q.push_back(wi);
        let mut seen = BTreeSet::new();
        seen.insert(wi);
        while let Some(cur) = q.pop_front() {
            if cur == ui {
                break;
            }
            if let Some(nexts) = adj.get(&cur) {
                for (nb, step) in nexts {
                    if seen.insert(*nb) {
                        prev.insert(*nb, (cur, step.clone()));
                        q.push_back(*nb);
                    }
                }
            }
        }
        let mut chain = Vec::new();
        let mut at = ui;
        while at != wi {
            let (p, step) = prev.get(&at).expect("same-class words are merge-connected").clone();
            chain.push(step);
            at = p;
        }
        chain.reverse();
        Ok(chain)
    }
}

/// Inverse of a rewrite step, given the word it was applied to.
fn invert_step(step: &RewriteStep, source: &Word) -> RewriteStep {
    match step {
        RewriteStep::FreeInsert { pos, .. } => RewriteStep::FreeDelete { pos: *pos },
        RewriteStep::FreeDelete { pos } => {
            RewriteStep::FreeInsert { pos: *pos, letter: source[*pos] }
        }
        RewriteStep::RelatorSub { pos, removed, inserted, .. } => RewriteStep::RelatorSub {
            pos: *pos,
            removed: inserted.clone(),
            inserted: removed.clone(),
            relator: inserted.concat(&removed.inverse()),
        },
    }
}

/// Geodesic verdict within a ball.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GeodesicVerdict {
    /// No shorter word in the class within the ball.
    GeodesicWithinBudget,
    /// A strictly shorter equal word.
    NotGeodesic { shorter: Word },
}

pub fn is_geodesic(w: &Word, ball: &MetricBall) -> Result<GeodesicVerdict, OracleError> {
    let c = ball.class(w)?;
    let cls = &ball.classes[c];
    if cls.geodesic_len < w.len() {
        let shorter = cls
            .members
            .iter()
            .map(|&i| &ball.words[i])
            .find(|m| m.len() < w.len())
            .expect("class has a shorter member")
            .clone();
        Ok(GeodesicVerdict::NotGeodesic { shorter })
    } else {
        Ok(GeodesicVerdict::GeodesicWithinBudget)
    }
}

/// Synchronous fellow-traveller constant: the maximum quotient distance
/// between same-time prefixes.  Words past their end idle at their endpoint.
pub fn fellow_travel_constant(w: &Word, u: &Word, ball: &MetricBall) -> Result<u32, OracleError> {
    let n = w.len().max(u.len());
    let mut best = 0u32;
    for l in 1..=n {
        let d = ball.distance(&w.prefix(l), &u.prefix(l))?;
        best = best.max(d);
    }
    Ok(best)
}

/// Outcome of the Hausdorff-closeness fellow-traveller check.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum HausdorffVerdict {
    /// Hypothesis held and the synchronous constant is within `2s + 1`.
    Verified { measured: u32, bound: u32 },
    /// Some prefix of one word is farther than `s` from every prefix of the
    /// other; the conclusion is not claimed.
    HypothesisUnmet { prefix_len: usize, of_first: bool },
}

/// Checks that two equal geodesic-within-budget words whose prefix sets are
/// mutually `s`-close are synchronous `2s+1`-fellow-travellers.
pub fn check_hausdorff_fellow_travel(
    xw: &Word,
    uy: &Word,
    s: u32,
    ball: &MetricBall,
) -> Result<HausdorffVerdict, OracleError> {
    if ball.class(xw)? != ball.class(uy)? {
        return Err(OracleError::NotEqual);
    }
    for word in [xw, uy] {
        if let GeodesicVerdict::NotGeodesic { shorter } = is_geodesic(word, ball)? {
            return Err(OracleError::NotGeodesic(word.clone(), shorter));
        }
    }
    for (first, a, b) in [(true, xw, uy), (false, uy, xw)] {
        for l in 0..=a.len() {
            let pa = a.prefix(l);
            let close = (0..=b.len()).any(|m| {
                ball.distance(&pa, &b.prefix(m)).is_ok_and(|d| d <= s)
            });
            if !close {
                return Ok(HausdorffVerdict::HypothesisUnmet { prefix_len: l, of_first: first });
            }
        }
    }
    let measured = fellow_travel_constant(xw, uy, ball)?;
    let bound = 2 * s + 1;
    debug_assert!(measured <= bound, "hausdorff bound violated: {measured} > {bound}");
    Ok(HausdorffVerdict::Verified { measured, bound })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::words::free_reduce;

    fn w(s: &str) -> Word {
        fixtures::z2().alphabet().parse_word(s).unwrap()
    }

    #[test]
    fn equal_ab_ba_in_z2_with_one_step() {
        let p = fixtures::z2();
        let budget = EqualityBudget::for_inputs(&p, &w("ab"), &w("ba"));
        let v = equal_in_group(&p, &w("ab"), &w("ba"), budget).unwrap();
        let EqualityVerdict::Equal { certificate, .. } = &v else {
            panic!("expected Equal, got {v:?}");
        };
        assert_eq!(certificate.len(), 1);
        assert_eq!(replay_certificate(&p, &w("ab"), certificate).unwrap(), w("ba"));
    }

    #[test]
    fn budget_must_cover_inputs() {
        let p = fixtures::z2();
        let err = equal_in_group(&p, &w("abab"), &w("a"), EqualityBudget {
            max_len: 2,
            max_steps: 10,
        });
        assert!(matches!(err, Err(OracleError::BudgetInvalid { .. })));
    }

    #[test]
    fn unknown_when_budget_exhausted() {
        let p = fixtures::z2();
        // aa != bb in Z^2; the verdict must be Unknown, never "not equal".
        let v = equal_in_group(&p, &w("aa"), &w("bb"), EqualityBudget {
            max_len: 6,
            max_steps: 2_000,
        })
        .unwrap();
        assert!(matches!(v, EqualityVerdict::Unknown { .. }));
    }

    #[test]
    fn free_group_equality_is_free_reduction_exhaustively() {
        let p = fixtures::free_rank2();
        let letters = p.alphabet().letters();
        let mut words = vec![Word::empty()];
        let mut layer = vec![Word::empty()];
        for _ in 0..3 {
            let mut next = Vec::new();
            for word in &layer {
                for &l in &letters {
                    let mut v = word.letters().to_vec();
                    v.push(l);
                    next.push(Word::new(v));
                }
            }
            words.extend(next.iter().cloned());
            layer = next;
        }
        for a in &words {
            for b in &words {
                let budget = EqualityBudget {
                    max_len: a.len().max(b.len()) + 2,
                    max_steps: 50_000,
                };
                let verdict = equal_in_group(&p, a, b, budget).unwrap();
                let expect = free_reduce(a) == free_reduce(b);
                assert_eq!(verdict.is_equal(), expect, "on {a} vs {b}");
                if let EqualityVerdict::Equal { certificate, .. } = verdict {
                    assert_eq!(&replay_certificate(&p, a, &certificate).unwrap(), b);
                }
            }
        }
        // longer spot checks past the exhaustive range
        let alpha = p.alphabet().clone();
        let lw = |s: &str| alpha.parse_word(s).unwrap();
        for (a, b, eq) in [
            ("abAB", "abAB", true),
            ("abBA", "", true),
            ("aabBA", "a", true),
            ("ababA", "abab", false),
            ("babab", "ababa", false),
        ] {
            let (a, b) = (lw(a), lw(b));
            let budget = EqualityBudget { max_len: a.len().max(b.len()) + 2, max_steps: 200_000 };
            let verdict = equal_in_group(&p, &a, &b, budget).unwrap();
            assert_eq!(verdict.is_equal(), eq, "on {a} vs {b}");
        }
    }

    #[test]
    fn free_ball_classes_are_reduced_words() {
        let ball = build_ball(&fixtures::free_rank2(), 3);
        // 1 + 4 + 12 + 36 reduced words at radius 3
        assert_eq!(ball.classes.len(), 53);
        let by_len = |n: usize| {
            ball.classes
                .iter()
                .filter(|c| c.geodesic_len == n)
                .count()
        };
        assert_eq!(by_len(0), 1);
        assert_eq!(by_len(1), 4);
        assert_eq!(by_len(2), 12);
        assert_eq!(by_len(3), 36);
        for c in &ball.classes {
            let rep = &ball.words[c.min_rep];
            assert!(rep.is_freely_reduced());
            for &m in &c.members {
                assert_eq!(free_reduce(&ball.words[m]), *rep);
            }
        }
    }

    #[test]
    fn z2_ball_counts_are_lattice_points() {
        for r in 1..=4 {
            let ball = build_ball(&fixtures::z2(), r);
            assert_eq!(ball.classes.len(), 2 * r * r + 2 * r + 1, "radius {r}");
        }
    }

    #[test]
    fn z2_class_members_certify_pairwise() {
        let p = fixtures::z2();
        let ball = build_ball(&p, 3);
        let c = ball.class(&w("ab")).unwrap();
        assert_eq!(c, ball.class(&w("ba")).unwrap());
        let cert = ball.class_certificate(&w("ab"), &w("ba")).unwrap();
        assert_eq!(replay_certificate(&p, &w("ab"), &cert).unwrap(), w("ba"));
        // identity class contains the trivial words
        let ball4 = build_ball(&p, 4);
        let id = ball4.identity_class();
        assert_eq!(ball4.class(&Word::empty()).unwrap(), id);
        assert_eq!(ball4.class(&w("aA")).unwrap(), id);
        assert_eq!(ball4.class(&w("abAB")).unwrap(), id);
    }

    #[test]
    fn z2_distances_match_lattice_metric() {
        let ball = build_ball(&fixtures::z2(), 4);
        let d = |a: &str, b: &str| ball.distance(&w(a), &w(b)).unwrap();
        assert_eq!(d("a", "b"), 2);
        assert_eq!(d("aa", "bb"), 4);
        assert_eq!(d("ab", "ba"), 0);
        assert_eq!(d("a", "A"), 2);
        assert_eq!(d("", "abab"), 4);
    }

    #[test]
    fn geodesic_and_fellow_travel() {
        let ball = build_ball(&fixtures::z2(), 4);
        assert_eq!(is_geodesic(&w("ab"), &ball).unwrap(), GeodesicVerdict::GeodesicWithinBudget);
        match is_geodesic(&w("aA"), &ball).unwrap() {
            GeodesicVerdict::NotGeodesic { shorter } => assert_eq!(shorter, Word::empty()),
            v => panic!("expected NotGeodesic, got {v:?}"),
        }
        assert_eq!(fellow_travel_constant(&w("ab"), &w("ba"), &ball).unwrap(), 2);
        assert_eq!(fellow_travel_constant(&w("ab"), &w("ab"), &ball).unwrap(), 0);
    }

    #[test]
    fn hausdorff_check_on_z2_square() {
        let ball = build_ball(&fixtures::z2(), 4);
        match check_hausdorff_fellow_travel(&w("ab"), &w("ba"), 4, &ball).unwrap() {
            HausdorffVerdict::Verified { measured, bound } => {
                assert_eq!(measured, 2);
                assert_eq!(bound, 9);
            }
            v => panic!("expected Verified, got {v:?}"),
        }
        // unequal words error out
        assert!(matches!(
            check_hausdorff_fellow_travel(&w("a"), &w("b"), 4, &ball),
            Err(OracleError::NotEqual)
        ));
        // non-geodesic input is a precondition failure
        assert!(matches!(
            check_hausdorff_fellow_travel(&w("abAB"), &Word::empty(), 4, &ball),
            Err(OracleError::NotGeodesic(..))
        ));
    }

    #[test]
    fn ball_words_exceeding_radius_are_rejected() {
        let ball = build_ball(&fixtures::z2(), 2);
        assert!(matches!(
            ball.class(&w("aaa")),
            Err(OracleError::WordExceedsBall { len: 3, radius: 2 })
        ));
    }
}
