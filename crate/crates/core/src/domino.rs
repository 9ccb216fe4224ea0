//! Dominoes (two squares glued along one inner edge) and the stability
//! machinery built on them.
//!
//! Over a presentation whose relators are all squares ([`check_h1`]) a
//! domino is a reduced two-region disk diagram whose regions share a single
//! edge.  Its boundary has length six and the two endpoints of the inner
//! edge, the *cut vertices*, sit three steps apart on the boundary.  A
//! basepoint choice therefore puts exactly one cut vertex at offset 0, 1 or
//! 2; the offset determines the *type* (3, 1 or 2 respectively) of the
//! biased domino, and advancing the basepoint one step cycles the type
//! 3 -> 2 -> 1 -> 3.
//!
//! A biased domino is *stable* when its boundary word pins down its inside.
//! The strict reading, the default, demands that the boundary admits exactly
//! one filling by two squares along one inner edge; the looser reading
//! (selected through [`crate::config::Budgets::strict_stability`] = false)
//! allows several fillings as long as all of them carry the biased type of
//! the original.  Stability does not depend on the basepoint; only the type
//! and the witnesses do.
//!
//! Every stable domino whose boundary label is cyclically reduced donates
//! *triplets* `(x, y, z)` read at its two cut vertices: `x` labels the
//! boundary edge entering the vertex, `y` the boundary edge leaving it, and
//! `z` the inner edge leaving it.  Both boundary orientations are read, so
//! one such domino donates four triplets.  Dominoes whose boundary cancels
//! across a cut vertex are excluded: the cancellation starves every
//! competing filling, so such a domino is stable for free, and admitting
//! its triplets breaks the chain argument that keeps the graphs below
//! acyclic (the substitution step only applies to reduced boundaries).
//! Fixing the first coordinate `x` and collecting the pairs `(y, z)` as
//! directed edges yields the *stability graph* of `x` over the signed
//! letters.  When that graph is acyclic a *grading* exists: an injective
//! rank assignment under which every edge points strictly down in rank.
//! The grading tables are the order data consumed by the rewriting layer.
//!
//! [`verify_stable_substitution`] replays the closure step this rests on:
//! take a stable domino, replace the two leading boundary letters `x y` by
//! `z w'` where `x y w'^-1 z^-1` is a relator, and check that the new word,
//! when it stays cyclically reduced, again bounds dominoes of the original
//! type only.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;
use thiserror::Error;

use crate::diagram::{DartId, Diagram};
use crate::words::{check_h1, symmetric_closure, Alphabet, Letter, Presentation, Word};

/// Biased type of a domino whose representative cut vertex sits at boundary
/// offset 0, 1 or 2 from the basepoint.
const TYPE_OF_CUT: [u8; 3] = [3, 1, 2];

/// How many failure descriptions a substitution report keeps.
const FAILURE_SAMPLES: usize = 16;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DominoError {
    #[error("every relator must be a square (length four and cyclically reduced)")]
    H1Violated,
    #[error("not a domino: {0}")]
    NotADomino(String),
    #[error("stability graph has a cycle: {cycle}")]
    CyclicGraph { x: Letter, cycle: Word },
}

/// A reduced-shape two-region disk diagram whose regions share exactly one
/// edge.  `inner_label` reads that edge toward the cut vertex that sits in
/// the leading half (offsets 0..3) of the diagram's own boundary orbit.
#[derive(Debug, Clone)]
pub struct Domino {
    pub diagram: Diagram,
    pub inner_label: Letter,
}

/// A domino together with a basepoint choice: `mu` is the boundary word
/// read from the basepoint, `dtype` the biased type, and `inner_label` the
/// inner edge read toward the representative cut vertex.
#[derive(Debug, Clone)]
pub struct BiasedDomino {
    pub domino: Domino,
    pub mu: Word,
    pub basepoint: usize,
    pub dtype: u8,
    pub inner_label: Letter,
}

/// The directed graph on all signed letters whose edges `(y, z)` record the
/// stable triplets `(x, y, z)` of a fixed first letter `x`.
#[derive(Debug, Clone, Serialize)]
pub struct StabilityGraph {
    pub x: Letter,
    pub vertices: Vec<Letter>,
    pub edges: BTreeSet<(Letter, Letter)>,
}

/// An injective rank assignment on the vertices of a stability graph under
/// which every edge points strictly down in rank.
#[derive(Debug, Clone, Serialize)]
pub struct GradingTable {
    pub x: Letter,
    pub grades: BTreeMap<Letter, usize>,
}

/// Outcome of replaying the leading-letter substitution on a sample of
/// stable dominoes.
#[derive(Debug, Clone, Serialize)]
pub struct SubstitutionReport {
    /// Stable dominoes visited, capped by the budget.
    pub stable_scanned: usize,
    /// Substitutions whose new boundary stayed cyclically reduced.
    pub substitutions: usize,
    pub failure_count: usize,
    pub failures: Vec<String>,
    /// True when the budget cut the scan short.
    pub budget_exhausted: bool,
}

impl SubstitutionReport {
    pub fn holds(&self) -> bool {
        self.failure_count == 0
    }
}

/// Cut layout of a two-region diagram, in boundary-orbit offsets.
struct CutLayout {
    /// Ascending boundary offsets of the two cut vertices; `cuts[1]` is
    /// always `cuts[0] + 3`, so `cuts[0]` lies in the leading half.
    cuts: [usize; 2],
    /// `inner_from[k]` is the inner dart leaving the vertex at `cuts[k]`.
    inner_from: [DartId; 2],
}

fn cut_layout(d: &Diagram) -> Result<CutLayout, DominoError> {
    if d.region_count() != 2 {
        return Err(DominoError::NotADomino(format!(
            "expected two regions, found {}",
            d.region_count()
        )));
    }
    let orbit = d.outer_orbit();
    if orbit.len() != 6 || d.edge_count() != 7 {
        return Err(DominoError::NotADomino(format!(
            "expected boundary length six with seven edges, found {} and {}",
            orbit.len(),
            d.edge_count()
        )));
    }
    let (face_of, _) = d.face_partition();
    let region_at: Vec<usize> = orbit.iter().map(|&b| face_of[d.mate(b)]).collect();
    let cuts: Vec<usize> = (0..6).filter(|&i| region_at[(i + 5) % 6] != region_at[i]).collect();
    if cuts.len() != 2 || cuts[1] != cuts[0] + 3 {
        return Err(DominoError::NotADomino(
            "each region must contribute three consecutive boundary edges".into(),
        ));
    }
    let boundary: BTreeSet<DartId> = orbit.iter().flat_map(|&b| [b, d.mate(b)]).collect();
    let inner: Vec<DartId> = (0..d.dart_count()).filter(|x| !boundary.contains(x)).collect();
    let mut inner_from = [usize::MAX; 2];
    for (k, &c) in cuts.iter().enumerate() {
        let v = d.origin(orbit[c]);
        inner_from[k] = *inner
            .iter()
            .find(|&&x| d.origin(x) == v)
            .ok_or_else(|| DominoError::NotADomino("inner edge misses a cut vertex".into()))?;
    }
    Ok(CutLayout { cuts: [cuts[0], cuts[1]], inner_from })
}

impl Domino {
    /// Validates the domino shape of a diagram: two regions meeting along a
    /// single edge, three boundary edges each.
    pub fn from_diagram(diagram: Diagram) -> Result<Domino, DominoError> {
        let layout = cut_layout(&diagram)?;
        let inner_label = diagram.label(layout.inner_from[1]);
        Ok(Domino { diagram, inner_label })
    }

    /// Boundary word read from the diagram's own orbit start.
    pub fn boundary(&self) -> Word {
        self.diagram.boundary_word()
    }

    pub fn to_json(&self, alphabet: &Alphabet) -> serde_json::Value {
        serde_json::json!({
            "boundary": alphabet.word_str(&self.boundary()),
            "inner": alphabet.letter_str(self.inner_label),
            "diagram": self.diagram.to_json(alphabet),
        })
    }
}

/// Reads off the biased view of a domino from a basepoint (taken modulo
/// six): boundary word, type, and the inner letter toward the
/// representative cut.
pub fn classify_biased(d: &Domino, basepoint: usize) -> BiasedDomino {
    let bp = basepoint % 6;
    let layout = cut_layout(&d.diagram).expect("a constructed domino keeps its shape");
    let mu = d.diagram.boundary_word().rotate(bp);
    let (k, rel) = layout
        .cuts
        .iter()
        .enumerate()
        .find_map(|(k, &c)| {
            let rel = (c + 6 - bp) % 6;
            (rel < 3).then_some((k, rel))
        })
        .expect("antipodal cuts put exactly one representative in the leading half");
    let inner_label = d.diagram.label(layout.inner_from[1 - k]);
    BiasedDomino { domino: d.clone(), mu, basepoint: bp, dtype: TYPE_OF_CUT[rel], inner_label }
}

/// The symmetric closure of a square presentation, indexed for the scans:
/// by final letter (for gluing squares along an inner edge), by leading
/// three-letter window (for completing an arc to a square), and by leading
/// two-letter window (for the substitution step).
struct Closure {
    words: Vec<[Letter; 4]>,
    set: BTreeSet<[Letter; 4]>,
    by_last: BTreeMap<Letter, Vec<u32>>,
    window3: BTreeMap<[Letter; 3], Vec<Letter>>,
    by_first2: BTreeMap<[Letter; 2], Vec<[Letter; 2]>>,
}

impl Closure {
    fn build(p: &Presentation) -> Result<Closure, DominoError> {
        if !check_h1(p) {
            return Err(DominoError::H1Violated);
        }
        let sym = symmetric_closure(p);
        let mut set = BTreeSet::new();
        for r in sym.relators() {
            let arr: [Letter; 4] = r.letters().try_into().expect("square relator");
            set.insert(arr);
        }
        let words: Vec<[Letter; 4]> = set.iter().copied().collect();
        let mut by_last: BTreeMap<Letter, Vec<u32>> = BTreeMap::new();
        let mut window3: BTreeMap<[Letter; 3], Vec<Letter>> = BTreeMap::new();
        let mut by_first2: BTreeMap<[Letter; 2], Vec<[Letter; 2]>> = BTreeMap::new();
        for (i, w) in words.iter().enumerate() {
            by_last.entry(w[3]).or_default().push(i as u32);
            window3.entry([w[0], w[1], w[2]]).or_default().push(w[3]);
            by_first2.entry([w[0], w[1]]).or_default().push([w[2], w[3]]);
        }
        Ok(Closure { words, set, by_last, window3, by_first2 })
    }

    fn complete(&self, key: &[Letter; 3]) -> &[Letter] {
        self.window3.get(key).map_or(&[], Vec::as_slice)
    }

    /// All fillings of a hexagon word by two squares along one inner edge,
    /// as `(type, inner letter toward the representative cut)` pairs.  The
    /// cut offset `c` ranges over the leading half; mirror fillings (the
    /// two squares cancelling across the inner edge) are not reduced and do
    /// not count.
    fn realizations_arr(&self, b: &[Letter; 6]) -> BTreeSet<(u8, Letter)> {
        let mut out = BTreeSet::new();
        for c in 0..3 {
            if mirror_at(b, c) {
                continue;
            }
            for &w in self.complete(&[b[c], b[(c + 1) % 6], b[(c + 2) % 6]]) {
                let second = [b[(c + 3) % 6], b[(c + 4) % 6], b[(c + 5) % 6], w.inverse()];
                if self.set.contains(&second) {
                    out.insert((TYPE_OF_CUT[c], w));
                }
            }
        }
        out
    }

    /// Stability of the gluing with boundary `b` basepointed at a cut
    /// vertex, so the gluing itself appears at cut offset 0 with type 3.
    /// Strict: that is the only filling.  Loose: every filling lives at cut
    /// offset 0 and thereby shares the type.
    fn gluing_is_stable(&self, b: &[Letter; 6], strict: bool) -> bool {
        let mut at_own_cut = 0u32;
        for c in 0..3 {
            if mirror_at(b, c) {
                continue;
            }
            for &w in self.complete(&[b[c], b[(c + 1) % 6], b[(c + 2) % 6]]) {
                let second = [b[(c + 3) % 6], b[(c + 4) % 6], b[(c + 5) % 6], w.inverse()];
                if !self.set.contains(&second) {
                    continue;
                }
                if c != 0 {
                    return false;
                }
                at_own_cut += 1;
                if strict && at_own_cut > 1 {
                    return false;
                }
            }
        }
        at_own_cut >= 1
    }
}

/// Whether the filling at cut offset `c` would make the two squares mirror
/// images across the inner edge.
fn mirror_at(b: &[Letter; 6], c: usize) -> bool {
    (0..3).all(|t| b[(c + 3 + t) % 6] == b[(c + 2 - t) % 6].inverse())
}

/// Whether two squares aligned on an inverse final letter are mirror images
/// of each other.
fn mirror_pair(u1: &[Letter; 4], u2: &[Letter; 4]) -> bool {
    (0..3).all(|t| u2[t] == u1[2 - t].inverse())
}

fn cyclically_reduced6(b: &[Letter; 6]) -> bool {
    (0..6).all(|i| b[(i + 1) % 6] != b[i].inverse())
}

fn word6(b: &[Letter; 6]) -> Word {
    Word::new(b.to_vec())
}

/// All fillings of `boundary` by two squares along one inner edge, as
/// `(type, inner letter)` pairs.  Empty when the boundary does not have
/// length six or the presentation is not made of squares.
pub fn realizations(p: &Presentation, boundary: &Word) -> BTreeSet<(u8, Letter)> {
    let Ok(cl) = Closure::build(p) else { return BTreeSet::new() };
    let Ok(b) = <[Letter; 6]>::try_from(boundary.letters()) else { return BTreeSet::new() };
    cl.realizations_arr(&b)
}

/// Strict stability: the boundary of `d` admits exactly one filling.
pub fn is_stable(d: &BiasedDomino, p: &Presentation) -> bool {
    is_stable_with(d, p, true)
}

/// Stability under either reading.  Loose stability only demands that all
/// fillings carry the biased type of `d`.  Rebuilds the closure index; the
/// batch scans below share one.
pub fn is_stable_with(d: &BiasedDomino, p: &Presentation, strict: bool) -> bool {
    let r = realizations(p, &d.mu);
    if strict {
        r.len() == 1 && r.contains(&(d.dtype, d.inner_label))
    } else {
        !r.is_empty() && r.iter().all(|&(t, _)| t == d.dtype)
    }
}

/// All dominoes over `p` up to relabelling, basepoint rotation, and mirror
/// reversal.  Pairs of closure squares are aligned on an inverse final
/// letter, glued along that edge, and deduplicated by canonical code.
pub fn enumerate_dominoes(p: &Presentation) -> Result<Vec<Domino>, DominoError> {
    let cl = Closure::build(p)?;
    let mut seen: BTreeMap<Vec<u32>, Domino> = BTreeMap::new();
    for (i1, u1) in cl.words.iter().enumerate() {
        let Some(bucket) = cl.by_last.get(&u1[3].inverse()) else { continue };
        for &i2 in bucket {
            if (i2 as usize) <= i1 {
                continue;
            }
            let u2 = cl.words[i2 as usize];
            if mirror_pair(u1, &u2) {
                continue;
            }
            let dom = glue_squares(u1, &u2);
            seen.entry(dom.diagram.canonical_code()).or_insert(dom);
        }
    }
    Ok(seen.into_values().collect())
}

/// Glues the square `u2` onto the final edge of the square `u1`; the two
/// final letters must be inverse.
fn glue_squares(u1: &[Letter; 4], u2: &[Letter; 4]) -> Domino {
    let base = Diagram::single_region(&Word::new(u1.to_vec()));
    let orbit = base.outer_orbit();
    let pos = orbit
        .iter()
        .position(|&d| d == 7)
        .expect("the outer orbit of a square contains the final edge");
    let glued = base
        .attach(pos, 1, &Word::new(u2.to_vec()).rotate(3))
        .expect("gluing one square onto another along one edge stays a disk");
    Domino::from_diagram(glued).expect("two squares sharing one edge form a domino")
}

/// Stable triplets `(x, y, z)` of `p` under strict stability.
pub fn stable_triplets(
    p: &Presentation,
) -> Result<BTreeSet<(Letter, Letter, Letter)>, DominoError> {
    stable_triplets_with(p, true)
}

/// Stable triplets under the chosen stability reading.  Scans every gluing
/// of two closure squares along an inverse final letter once, keeps the
/// gluings with cyclically reduced boundary (which also rules out mirror
/// gluings), and lets each stable one donate its four cut readings.
pub fn stable_triplets_with(
    p: &Presentation,
    strict: bool,
) -> Result<BTreeSet<(Letter, Letter, Letter)>, DominoError> {
    let cl = Closure::build(p)?;
    let mut out = BTreeSet::new();
    for (i1, u1) in cl.words.iter().enumerate() {
        let Some(bucket) = cl.by_last.get(&u1[3].inverse()) else { continue };
        for &i2 in bucket {
            if (i2 as usize) <= i1 {
                continue;
            }
            let u2 = &cl.words[i2 as usize];
            let b = [u1[0], u1[1], u1[2], u2[0], u2[1], u2[2]];
            if !cyclically_reduced6(&b) || !cl.gluing_is_stable(&b, strict) {
                continue;
            }
            let w = u1[3];
            out.insert((u2[2], u1[0], w.inverse()));
            out.insert((u1[0].inverse(), u2[2].inverse(), w.inverse()));
            out.insert((u1[2], u2[0], w));
            out.insert((u2[0].inverse(), u1[2].inverse(), w));
        }
    }
    Ok(out)
}

fn graph_from_edges(
    x: Letter,
    vertices: Vec<Letter>,
    edges: BTreeSet<(Letter, Letter)>,
) -> StabilityGraph {
    StabilityGraph { x, vertices, edges }
}

/// The stability graph of one letter under strict stability.
pub fn stability_graph(p: &Presentation, x: Letter) -> Result<StabilityGraph, DominoError> {
    let trips = stable_triplets(p)?;
    let edges = trips.iter().filter(|&&(tx, _, _)| tx == x).map(|&(_, y, z)| (y, z)).collect();
    Ok(graph_from_edges(x, p.alphabet().letters(), edges))
}

/// The stability graphs of every signed letter, from one shared scan,
/// under strict stability.
pub fn stability_graphs(p: &Presentation) -> Result<Vec<StabilityGraph>, DominoError> {
    stability_graphs_with(p, true)
}

/// The stability graphs of every signed letter under the chosen reading.
pub fn stability_graphs_with(
    p: &Presentation,
    strict: bool,
) -> Result<Vec<StabilityGraph>, DominoError> {
    let trips = stable_triplets_with(p, strict)?;
    let vertices = p.alphabet().letters();
    let mut edges_by_x: BTreeMap<Letter, BTreeSet<(Letter, Letter)>> =
        vertices.iter().map(|&x| (x, BTreeSet::new())).collect();
    for &(x, y, z) in &trips {
        edges_by_x.get_mut(&x).expect("triplet letters live in the alphabet").insert((y, z));
    }
    Ok(edges_by_x
        .into_iter()
        .map(|(x, edges)| graph_from_edges(x, vertices.clone(), edges))
        .collect())
}

fn dfs_cycle(
    v: Letter,
    adj: &BTreeMap<Letter, Vec<Letter>>,
    color: &mut BTreeMap<Letter, u8>,
    stack: &mut Vec<Letter>,
) -> Option<Vec<Letter>> {
    color.insert(v, 1);
    stack.push(v);
    for &z in adj.get(&v).map_or(&[][..], Vec::as_slice) {
        match color.get(&z).copied().unwrap_or(0) {
            0 => {
                if let Some(c) = dfs_cycle(z, adj, color, stack) {
                    return Some(c);
                }
            }
            1 => {
                let pos = stack.iter().position(|&s| s == z).expect("open vertex is on the stack");
                return Some(stack[pos..].to_vec());
            }
            _ => {}
        }
    }
    stack.pop();
    color.insert(v, 2);
    None
}

/// Ok when the graph has no directed cycle; otherwise one witness cycle,
/// as the word of its vertices in order.
pub fn assert_acyclic(g: &StabilityGraph) -> Result<(), Word> {
    let mut adj: BTreeMap<Letter, Vec<Letter>> = BTreeMap::new();
    for &(y, z) in &g.edges {
        adj.entry(y).or_default().push(z);
    }
    let seeds: Vec<Letter> = g.vertices.iter().copied().chain(adj.keys().copied()).collect();
    let mut color: BTreeMap<Letter, u8> = BTreeMap::new();
    let mut stack = Vec::new();
    for v in seeds {
        if color.get(&v).copied().unwrap_or(0) == 0 {
            if let Some(cycle) = dfs_cycle(v, &adj, &mut color, &mut stack) {
                return Err(Word::new(cycle));
            }
        }
    }
    Ok(())
}

fn layer(
    v: Letter,
    adj: &BTreeMap<Letter, Vec<Letter>>,
    memo: &mut BTreeMap<Letter, usize>,
) -> usize {
    if let Some(&d) = memo.get(&v) {
        return d;
    }
    let d = 1 + adj
        .get(&v)
        .map_or(0, |succ| succ.iter().map(|&z| layer(z, adj, memo)).max().unwrap_or(0));
    memo.insert(v, d);
    d
}

/// An injective grading of an acyclic stability graph: vertices are layered
/// by longest path toward the sinks, then ranked 1..=n in (layer, letter)
/// order, so every edge points strictly down in rank.
pub fn grading(g: &StabilityGraph) -> Result<GradingTable, DominoError> {
    if let Err(cycle) = assert_acyclic(g) {
        return Err(DominoError::CyclicGraph { x: g.x, cycle });
    }
    let mut adj: BTreeMap<Letter, Vec<Letter>> = BTreeMap::new();
    for &(y, z) in &g.edges {
        adj.entry(y).or_default().push(z);
    }
    let mut memo = BTreeMap::new();
    let mut keyed: Vec<(usize, Letter)> =
        g.vertices.iter().map(|&v| (layer(v, &adj, &mut memo), v)).collect();
    keyed.sort_unstable();
    let grades = keyed.into_iter().enumerate().map(|(i, (_, v))| (v, i + 1)).collect();
    Ok(GradingTable { x: g.x, grades })
}

impl GradingTable {
    /// Every vertex graded, all grades distinct, every edge descending.
    pub fn satisfies(&self, g: &StabilityGraph) -> bool {
        let distinct: BTreeSet<usize> = self.grades.values().copied().collect();
        distinct.len() == self.grades.len()
            && g.vertices.iter().all(|v| self.grades.contains_key(v))
            && g.edges.iter().all(|(y, z)| self.grades[z] < self.grades[y])
    }

    pub fn to_json(&self, alphabet: &Alphabet) -> serde_json::Value {
        let grades: BTreeMap<String, usize> =
            self.grades.iter().map(|(&l, &g)| (alphabet.letter_str(l), g)).collect();
        serde_json::json!({ "x": alphabet.letter_str(self.x), "grades": grades })
    }
}

impl StabilityGraph {
    pub fn to_dot(&self, alphabet: &Alphabet) -> String {
        let mut s = format!("digraph stability {{\n  label=\"x = {}\";\n", alphabet.letter_str(self.x));
        for &v in &self.vertices {
            s.push_str(&format!("  \"{}\";\n", alphabet.letter_str(v)));
        }
        for &(y, z) in &self.edges {
            s.push_str(&format!(
                "  \"{}\" -> \"{}\";\n",
                alphabet.letter_str(y),
                alphabet.letter_str(z)
            ));
        }
        s.push_str("}\n");
        s
    }

    pub fn to_json(&self, alphabet: &Alphabet) -> serde_json::Value {
        serde_json::json!({
            "x": alphabet.letter_str(self.x),
            "vertices": self.vertices.iter().map(|&v| alphabet.letter_str(v)).collect::<Vec<_>>(),
            "edges": self
                .edges
                .iter()
                .map(|&(y, z)| vec![alphabet.letter_str(y), alphabet.letter_str(z)])
                .collect::<Vec<_>>(),
        })
    }
}

/// Replays the substitution step on up to `budget` stable dominoes with
/// cyclically reduced boundary.  The step glues a closure square
/// `x y w'^-1 z^-1` onto a boundary path `x y` that straddles a cut vertex,
/// turning that vertex into an interior one of valence three, so it applies
/// exactly at the two basepoints whose leading two letters sit astride a
/// cut (where the domino is 1-typed).  The reworded boundary `z w' ...`
/// must, when it stays cyclically reduced, have fillings that are all
/// 1-typed as well.
pub fn verify_stable_substitution(
    p: &Presentation,
    budget: usize,
) -> Result<SubstitutionReport, DominoError> {
    let cl = Closure::build(p)?;
    let alphabet = p.alphabet();
    let mut rep = SubstitutionReport {
        stable_scanned: 0,
        substitutions: 0,
        failure_count: 0,
        failures: Vec::new(),
        budget_exhausted: false,
    };
    'scan: for (i1, u1) in cl.words.iter().enumerate() {
        let Some(bucket) = cl.by_last.get(&u1[3].inverse()) else { continue };
        for &i2 in bucket {
            if (i2 as usize) <= i1 {
                continue;
            }
            let u2 = &cl.words[i2 as usize];
            let b = [u1[0], u1[1], u1[2], u2[0], u2[1], u2[2]];
            if !cyclically_reduced6(&b) || !cl.gluing_is_stable(&b, true) {
                continue;
            }
            if rep.stable_scanned == budget {
                rep.budget_exhausted = true;
                break 'scan;
            }
            rep.stable_scanned += 1;
            for bp in 0..6 {
                // cuts sit at offsets 0 and 3, so the type at basepoint bp
                // cycles through 3, 2, 1
                let dtype = TYPE_OF_CUT[(3 - bp % 3) % 3];
                let rb: [Letter; 6] = std::array::from_fn(|i| b[(bp + i) % 6]);
                let Some(pairs) = cl.by_first2.get(&[rb[0], rb[1]]) else { continue };
                for &[r2, r3] in pairs {
                    let nb = [r3.inverse(), r2.inverse(), rb[2], rb[3], rb[4], rb[5]];
                    if !cyclically_reduced6(&nb) {
                        continue;
                    }
                    rep.substitutions += 1;
                    let rs = cl.realizations_arr(&nb);
                    if rs.is_empty() || rs.iter().any(|&(t, _)| t != dtype) {
                        rep.failure_count += 1;
                        if rep.failures.len() < FAILURE_SAMPLES {
                            let types: Vec<u8> = rs.iter().map(|&(t, _)| t).collect();
                            rep.failures.push(format!(
                                "boundary {} at basepoint {bp}: rewording to {} leaves fillings of types {types:?}, want only {dtype}",
                                alphabet.word_str(&word6(&b)),
                                alphabet.word_str(&word6(&nb)),
                            ));
                        }
                    }
                }
            }
        }
    }
    Ok(rep)
}


#[cfg(test)]
mod diag {
    use super::*;
    use crate::bsd::bsd;
    use crate::fixtures;
    use crate::words::{check_c4, check_t4, symmetric_closure, GeneratorId};

    #[test]
    fn debug_cycle_witness() {
        let base = symmetric_closure(&fixtures::z2());
        let sub = bsd(&base).unwrap();
        let p = sub.presentation();
        println!("z2-bsd C4: {:?}", check_c4(p).holds);
        println!("z2-bsd T4: {:?}", check_t4(p).holds);
        let x = Letter::plus(GeneratorId(0));
        let y = Letter::minus(GeneratorId(4));
        let z = Letter::minus(GeneratorId(10));
        let cl = Closure::build(p).unwrap();
        for (i1, u1) in cl.words.iter().enumerate() {
            let Some(bucket) = cl.by_last.get(&u1[3].inverse()) else { continue };
            for &i2 in bucket {
                if (i2 as usize) <= i1 {
                    continue;
                }
                let u2 = &cl.words[i2 as usize];
                if mirror_pair(u1, u2) {
                    continue;
                }
                let b = [u1[0], u1[1], u1[2], u2[0], u2[1], u2[2]];
                if !cl.gluing_is_stable(&b, true) {
                    continue;
                }
                let w = u1[3];
                let emits = [
                    (u2[2], u1[0], w.inverse()),
                    (u1[0].inverse(), u2[2].inverse(), w.inverse()),
                    (u1[2], u2[0], w),
                    (u2[0].inverse(), u1[2].inverse(), w),
                ];
                for (form, &(ex, ey, ez)) in emits.iter().enumerate() {
                    if ex == x && ((ey == y && ez == z) || (ey == z && ez == y)) {
                        println!(
                            "form {form}: u1={} u2={} b={} w={} emits ({}, {}, {})",
                            p.alphabet().word_str(&Word::new(u1.to_vec())),
                            p.alphabet().word_str(&Word::new(u2.to_vec())),
                            p.alphabet().word_str(&word6(&b)),
                            p.alphabet().letter_str(w),
                            p.alphabet().letter_str(ex),
                            p.alphabet().letter_str(ey),
                            p.alphabet().letter_str(ez),
                        );
                        println!(
                            "  realizations: {:?}",
                            cl.realizations_arr(&b)
                                .iter()
                                .map(|&(t, l)| (t, p.alphabet().letter_str(l)))
                                .collect::<Vec<_>>()
                        );
                    }
                }
            }
        }
    }
}
