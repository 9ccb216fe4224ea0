//! Planar labelled diagrams as rotation systems.
//!
//! A diagram is stored as a set of darts (directed half-edges).  Every dart
//! has a mate (the same edge traversed backwards), an origin vertex, a letter
//! label, and a position in the clockwise rotation order around its origin.
//! Faces are the orbits of `d -> rot_next(mate(d))`; each face is traversed
//! with the face on its left, so inner regions read counterclockwise and the
//! designated outer face walks the boundary with the exterior on its left.
//!
//! Diagrams grow by [`Diagram::attach`]: a new region is glued onto a
//! contiguous arc of the outer boundary.  Growing from single regions this
//! way produces exactly the tight diagrams (regular disks: no spikes, no cut
//! vertices), which [`enumerate_tight`] collects up to isomorphism.  Mirror
//! images are identified, since a boundary word is only ever meaningful up to
//! rotation and inversion.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::words::{
    cyclic_inverse_normal_form, free_reduce, symmetric_closure, Alphabet, Letter, Presentation,
    Word,
};

pub type DartId = usize;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DiagramError {
    #[error("diagram has no darts")]
    Empty,
    #[error("dart {0}: mate pointers are not a fixed-point-free involution with inverse labels")]
    MateBroken(DartId),
    #[error("dart {0}: rotation pointers are inconsistent")]
    RotationBroken(DartId),
    #[error("vertex bookkeeping does not match rotation cycles")]
    VertexCount,
    #[error("diagram is not connected")]
    Disconnected,
    #[error("Euler characteristic is not 2 (v={v}, e={e}, f={f}); not a planar disk")]
    NotPlanar { v: usize, e: usize, f: usize },
    #[error("outer dart {0} out of range")]
    OuterInvalid(DartId),
    #[error("tree diagrams need a nonempty boundary word that freely reduces to the identity")]
    BoundaryNotTrivial,
    #[error("corpus enumerated to {have} regions but minimality needs competitors up to {need}")]
    CorpusInsufficient { have: usize, need: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
struct DartRec {
    mate: DartId,
    origin: usize,
    /// Next dart clockwise around the origin vertex.
    rot_next: DartId,
    rot_prev: DartId,
    label: Letter,
}

/// A labelled planar diagram with a designated outer face.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Diagram {
    darts: Vec<DartRec>,
    outer: DartId,
    n_vertices: usize,
}

/// One face orbit: its darts in traversal order and the word they spell.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Face {
    pub darts: Vec<DartId>,
    pub label: Word,
    pub is_outer: bool,
}

/// A maximal path of inner edges shared by two regions, listed from the side
/// of the lower-numbered face.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SharedPath {
    pub faces: (usize, usize),
    pub darts: Vec<DartId>,
}

impl Diagram {
    pub fn dart_count(&self) -> usize {
        self.darts.len()
    }

    pub fn edge_count(&self) -> usize {
        self.darts.len() / 2
    }

    pub fn vertex_count(&self) -> usize {
        self.n_vertices
    }

    pub fn mate(&self, d: DartId) -> DartId {
        self.darts[d].mate
    }

    pub fn origin(&self, d: DartId) -> usize {
        self.darts[d].origin
    }

    pub fn target(&self, d: DartId) -> usize {
        self.origin(self.mate(d))
    }

    pub fn label(&self, d: DartId) -> Letter {
        self.darts[d].label
    }

    pub fn rot_next(&self, d: DartId) -> DartId {
        self.darts[d].rot_next
    }

    pub fn rot_prev(&self, d: DartId) -> DartId {
        self.darts[d].rot_prev
    }

    /// Next dart of the face on the left of `d`.
    pub fn face_next(&self, d: DartId) -> DartId {
        self.rot_next(self.mate(d))
    }

    /// Previous dart of the face on the left of `d`.
    pub fn face_prev(&self, d: DartId) -> DartId {
        self.mate(self.rot_prev(d))
    }

    pub fn outer_dart(&self) -> DartId {
        self.outer
    }

    fn orbit_from(&self, start: DartId) -> Vec<DartId> {
        let mut out = vec![start];
        let mut d = self.face_next(start);
        while d != start {
            out.push(d);
            d = self.face_next(d);
        }
        out
    }

    /// Darts of the outer face, in traversal order from the outer dart.
    pub fn outer_orbit(&self) -> Vec<DartId> {
        self.orbit_from(self.outer)
    }

    pub fn word_of_darts(&self, darts: &[DartId]) -> Word {
        Word::new(darts.iter().map(|&d| self.label(d)).collect())
    }

    /// Boundary label read from the outer dart.
    pub fn boundary_word(&self) -> Word {
        self.word_of_darts(&self.outer_orbit())
    }

    /// Boundary label read from an arbitrary outer dart.
    pub fn boundary_word_from(&self, d: DartId) -> Word {
        self.word_of_darts(&self.orbit_from(d))
    }

    /// Outer darts from which the boundary reads exactly `w`.
    pub fn find_boundary_basepoints(&self, w: &Word) -> Vec<DartId> {
        let orbit = self.outer_orbit();
        if orbit.len() != w.len() {
            return Vec::new();
        }
        (0..orbit.len())
            .filter(|&s| (0..w.len()).all(|i| self.label(orbit[(s + i) % orbit.len()]) == w[i]))
            .map(|s| orbit[s])
            .collect()
    }

    /// All face orbits; the orbit containing the least unvisited dart comes
    /// first, so the ordering is deterministic.
    pub fn faces(&self) -> Vec<Face> {
        self.face_partition().1
    }

    /// Per-dart face index plus the face list.
    pub fn face_partition(&self) -> (Vec<usize>, Vec<Face>) {
        let mut face_of = vec![usize::MAX; self.darts.len()];
        let mut faces = Vec::new();
        for d in 0..self.darts.len() {
            if face_of[d] != usize::MAX {
                continue;
            }
            let orbit = self.orbit_from(d);
            for &x in &orbit {
                face_of[x] = faces.len();
            }
            let label = self.word_of_darts(&orbit);
            let is_outer = orbit.contains(&self.outer);
            faces.push(Face { darts: orbit, label, is_outer });
        }
        (face_of, faces)
    }

    pub fn region_count(&self) -> usize {
        self.faces().len() - 1
    }

    pub fn regions(&self) -> Vec<Face> {
        self.faces().into_iter().filter(|f| !f.is_outer).collect()
    }

    /// Number of darts leaving each vertex.
    pub fn vertex_valences(&self) -> Vec<usize> {
        let mut val = vec![0usize; self.n_vertices];
        for d in &self.darts {
            val[d.origin] += 1;
        }
        val
    }

    /// Vertices not met by the outer face.
    pub fn interior_vertices(&self) -> Vec<usize> {
        let mut boundary = vec![false; self.n_vertices];
        for &d in &self.outer_orbit() {
            boundary[self.origin(d)] = true;
        }
        (0..self.n_vertices).filter(|&v| !boundary[v]).collect()
    }

    /// Structural sanity: mate involution with inverse labels, rotation
    /// cycles matching the vertex count, connectivity, and planarity via the
    /// Euler characteristic.
    pub fn validate(&self) -> Result<(), DiagramError> {
        let n = self.darts.len();
        if n == 0 {
            return Err(DiagramError::Empty);
        }
        if self.outer >= n {
            return Err(DiagramError::OuterInvalid(self.outer));
        }
        for d in 0..n {
            let m = self.mate(d);
            if m >= n || m == d || self.mate(m) != d {
                return Err(DiagramError::MateBroken(d));
            }
            if self.label(m) != self.label(d).inverse() {
                return Err(DiagramError::MateBroken(d));
            }
            let nx = self.rot_next(d);
            if nx >= n || self.rot_prev(nx) != d {
                return Err(DiagramError::RotationBroken(d));
            }
            if self.origin(nx) != self.origin(d) || self.origin(d) >= self.n_vertices {
                return Err(DiagramError::RotationBroken(d));
            }
        }
        // each vertex's darts must form a single rotation cycle
        let mut cycle_of = vec![usize::MAX; n];
        let mut vertex_seen = vec![usize::MAX; self.n_vertices];
        let mut cycles = 0usize;
        for d in 0..n {
            if cycle_of[d] != usize::MAX {
                continue;
            }
            let v = self.origin(d);
            if vertex_seen[v] != usize::MAX {
                // second rotation cycle claiming the same vertex
                return Err(DiagramError::VertexCount);
            }
            vertex_seen[v] = cycles;
            let mut x = d;
            loop {
                cycle_of[x] = cycles;
                x = self.rot_next(x);
                if x == d {
                    break;
                }
            }
            cycles += 1;
        }
        if cycles != self.n_vertices {
            return Err(DiagramError::VertexCount);
        }
        // connectivity over mate and rotation moves
        let mut seen = vec![false; n];
        let mut queue = VecDeque::from([0usize]);
        seen[0] = true;
        while let Some(d) = queue.pop_front() {
            for nb in [self.mate(d), self.rot_next(d)] {
                if !seen[nb] {
                    seen[nb] = true;
                    queue.push_back(nb);
                }
            }
        }
        if seen.iter().any(|s| !s) {
            return Err(DiagramError::Disconnected);
        }
        let (v, e, f) = (self.n_vertices, n / 2, self.faces().len());
        if v + f != e + 2 {
            return Err(DiagramError::NotPlanar { v, e, f });
        }
        Ok(())
    }

    /// Checks that every region label is a relator of the symmetric closure.
    pub fn labels_in_closure(&self, p: &Presentation) -> bool {
        let closure: BTreeSet<Word> = symmetric_closure(p).relators().iter().cloned().collect();
        self.regions().iter().all(|r| closure.contains(&r.label))
    }

    /// A diagram consisting of one region with the given boundary label.
    pub fn single_region(label: &Word) -> Diagram {
        let n = label.len();
        assert!(n >= 2, "region labels need at least two letters");
        let mut darts = Vec::with_capacity(2 * n);
        for i in 0..n {
            // dart 2i runs v_i -> v_{i+1} along the region; 2i+1 is its mate
            darts.push(DartRec {
                mate: 2 * i + 1,
                origin: i,
                rot_next: 0,
                rot_prev: 0,
                label: label[i],
            });
            darts.push(DartRec {
                mate: 2 * i,
                origin: (i + 1) % n,
                rot_next: 0,
                rot_prev: 0,
                label: label[i].inverse(),
            });
        }
        let mut d = Diagram { darts, outer: 2 * n - 1, n_vertices: n };
        for i in 0..n {
            // at v_i: the outgoing region dart 2i and the mate of edge i-1
            let a = 2 * i;
            let b = 2 * ((i + n - 1) % n) + 1;
            d.darts[a].rot_next = b;
            d.darts[a].rot_prev = b;
            d.darts[b].rot_next = a;
            d.darts[b].rot_prev = a;
        }
        d
    }

    pub(crate) fn rot_link_after(&mut self, anchor: DartId, d: DartId) {
        let nxt = self.darts[anchor].rot_next;
        self.darts[anchor].rot_next = d;
        self.darts[d].rot_prev = anchor;
        self.darts[d].rot_next = nxt;
        self.darts[nxt].rot_prev = d;
        self.darts[d].origin = self.darts[anchor].origin;
    }

    pub(crate) fn rot_link_before(&mut self, anchor: DartId, d: DartId) {
        let prv = self.darts[anchor].rot_prev;
        self.rot_link_after(prv, d);
    }

    /// Removes `d` from its rotation cycle, leaving it self-looped.  The
    /// cycle must contain another dart.
    pub(crate) fn rot_unlink(&mut self, d: DartId) {
        let prv = self.darts[d].rot_prev;
        let nxt = self.darts[d].rot_next;
        assert_ne!(prv, d, "cannot unlink the last dart at a vertex");
        self.darts[prv].rot_next = nxt;
        self.darts[nxt].rot_prev = prv;
        self.darts[d].rot_next = d;
        self.darts[d].rot_prev = d;
    }

    pub(crate) fn set_label(&mut self, d: DartId, label: Letter) {
        self.darts[d].label = label;
        let m = self.darts[d].mate;
        self.darts[m].label = label.inverse();
    }

    pub(crate) fn set_outer(&mut self, d: DartId) {
        self.outer = d;
    }

    /// Glues a new region onto the outer boundary along the contiguous arc of
    /// `arc_len` darts starting at position `arc_start` of the outer orbit.
    ///
    /// The new region's label, read from the first arc dart, must be
    /// `region_label`, so the arc must spell a proper prefix of it.  Returns
    /// `None` when the arc does not match, when no new edge would be created,
    /// or when the arc endpoints coincide (which would pinch the disk).
    pub fn attach(&self, arc_start: usize, arc_len: usize, region_label: &Word) -> Option<Diagram> {
        let orbit = self.outer_orbit();
        let ln = orbit.len();
        let m = arc_len;
        if m == 0 || m > ln || m >= region_label.len() {
            return None;
        }
        let arc: Vec<DartId> = (0..m).map(|i| orbit[(arc_start + i) % ln]).collect();
        if (0..m).any(|i| self.label(arc[i]) != region_label[i]) {
            return None;
        }
        let v_start = self.origin(arc[0]);
        let v_end = self.target(arc[m - 1]);
        if v_start == v_end {
            return None;
        }
        let k = region_label.len() - m;
        let mut d = self.clone();
        let base = d.darts.len();
        let vbase = d.n_vertices;
        d.n_vertices += k - 1;
        for i in 0..k {
            let lab = region_label[m + i];
            let fwd = base + 2 * i;
            d.darts.push(DartRec {
                mate: fwd + 1,
                origin: if i == 0 { v_end } else { vbase + i - 1 },
                rot_next: fwd,
                rot_prev: fwd,
                label: lab,
            });
            d.darts.push(DartRec {
                mate: fwd,
                origin: if i == k - 1 { v_start } else { vbase + i },
                rot_next: fwd + 1,
                rot_prev: fwd + 1,
                label: lab.inverse(),
            });
        }
        // rotation at the fresh interior vertices: two darts each
        for i in 1..k {
            let a = base + 2 * (i - 1) + 1;
            let b = base + 2 * i;
            d.darts[a].rot_next = b;
            d.darts[a].rot_prev = b;
            d.darts[b].rot_next = a;
            d.darts[b].rot_prev = a;
        }
        // splice the region closed: the first new dart continues the face
        // after the arc, and the last new dart's mate feeds back into it
        d.rot_link_after(self.mate(arc[m - 1]), base);
        d.rot_link_before(arc[0], base + 2 * (k - 1) + 1);
        d.outer = base + 1;
        debug_assert_eq!(d.outer_orbit().len(), ln - m + k);
        Some(d)
    }

    /// The orientation-reversed diagram: same darts and labels, reversed
    /// rotations, outer face re-anchored on the mate side.
    pub fn mirrored(&self) -> Diagram {
        let mut d = self.clone();
        for r in &mut d.darts {
            std::mem::swap(&mut r.rot_next, &mut r.rot_prev);
        }
        d.outer = self.mate(self.outer);
        d
    }

    /// Finds an inner edge whose two regions cancel: reading both region
    /// labels away from the shared edge gives mutually inverse words.
    pub fn find_cancelling_pair(&self) -> Option<(DartId, DartId)> {
        let (face_of, faces) = self.face_partition();
        let outer_idx = faces.iter().position(|f| f.is_outer).expect("outer face exists");
        for d in 0..self.darts.len() {
            let m = self.mate(d);
            if d > m {
                continue;
            }
            let (fd, fm) = (face_of[d], face_of[m]);
            if fd == outer_idx || fm == outer_idx || fd == fm {
                continue;
            }
            let rest1 = self.word_of_darts(&self.orbit_from(d)[1..]);
            let rest2 = self.word_of_darts(&self.orbit_from(m)[1..]);
            if rest1 == rest2.inverse() {
                return Some((d, m));
            }
        }
        None
    }

    pub fn is_reduced(&self) -> bool {
        self.find_cancelling_pair().is_none()
    }

    /// Maximal shared inner paths for every adjacent region pair.
    pub fn shared_inner_paths(&self) -> Vec<SharedPath> {
        let (face_of, faces) = self.face_partition();
        let outer_idx = faces.iter().position(|f| f.is_outer).expect("outer face exists");
        let share_pair = |d: DartId| -> Option<(usize, usize)> {
            let (fd, fm) = (face_of[d], face_of[self.mate(d)]);
            if fd != outer_idx && fm != outer_idx && fd < fm {
                Some((fd, fm))
            } else {
                None
            }
        };
        let mut out = Vec::new();
        let mut in_path = vec![false; self.darts.len()];
        for d in 0..self.darts.len() {
            let Some(pair) = share_pair(d) else { continue };
            if in_path[d] {
                continue;
            }
            // walk back to the start of this run along the face orbit
            let mut start = d;
            loop {
                let prev = self.face_prev(start);
                if prev == d || share_pair(prev) != Some(pair) {
                    break;
                }
                start = prev;
            }
            let mut run = vec![start];
            in_path[start] = true;
            let mut x = self.face_next(start);
            while x != start && share_pair(x) == Some(pair) {
                in_path[x] = true;
                run.push(x);
                x = self.face_next(x);
            }
            out.push(SharedPath { faces: pair, darts: run });
        }
        out
    }

    /// Distinct region neighbours of each region, by face index.
    pub fn region_neighbor_counts(&self) -> BTreeMap<usize, usize> {
        let mut sets: BTreeMap<usize, BTreeSet<usize>> = BTreeMap::new();
        for p in self.shared_inner_paths() {
            sets.entry(p.faces.0).or_default().insert(p.faces.1);
            sets.entry(p.faces.1).or_default().insert(p.faces.0);
        }
        let (_, faces) = self.face_partition();
        let mut out = BTreeMap::new();
        for (i, f) in faces.iter().enumerate() {
            if !f.is_outer {
                out.insert(i, sets.get(&i).map_or(0, |s| s.len()));
            }
        }
        out
    }

    fn code_from(&self, start: DartId, forward: bool) -> Vec<u32> {
        let n = self.darts.len();
        let mut num = vec![u32::MAX; n];
        let mut order = Vec::with_capacity(n);
        num[start] = 0;
        order.push(start);
        let mut head = 0usize;
        while head < order.len() {
            let d = order[head];
            head += 1;
            let rot = if forward { self.rot_next(d) } else { self.rot_prev(d) };
            for nb in [self.mate(d), rot] {
                if num[nb] == u32::MAX {
                    num[nb] = order.len() as u32;
                    order.push(nb);
                }
            }
        }
        let mut code = Vec::with_capacity(3 * n);
        for &d in &order {
            let rot = if forward { self.rot_next(d) } else { self.rot_prev(d) };
            let l = self.label(d);
            code.push(num[self.mate(d)]);
            code.push(num[rot]);
            code.push(2 * l.gen.0 + u32::from(l.sign == crate::words::Sign::Minus));
        }
        code
    }

    /// Canonical form under relabelling of darts, rotation of the boundary
    /// basepoint, and mirror reversal.  Two diagrams are equivalent exactly
    /// when their canonical codes agree.
    pub fn canonical_code(&self) -> Vec<u32> {
        let outer = self.outer_orbit();
        let mut best: Option<Vec<u32>> = None;
        for forward in [true, false] {
            for &o in &outer {
                let start = if forward { o } else { self.mate(o) };
                let code = self.code_from(start, forward);
                if best.as_ref().is_none_or(|b| code < *b) {
                    best = Some(code);
                }
            }
        }
        best.expect("diagram has darts")
    }

    pub fn to_dot(&self, alphabet: &Alphabet) -> String {
        let outer: BTreeSet<DartId> = self.outer_orbit().into_iter().collect();
        let mut s = String::from("graph diagram {\n  layout=neato;\n");
        for v in 0..self.n_vertices {
            s.push_str(&format!("  v{v} [shape=point];\n"));
        }
        for d in 0..self.darts.len() {
            if d > self.mate(d) {
                continue;
            }
            let style = if outer.contains(&d) || outer.contains(&self.mate(d)) {
                ", penwidth=2"
            } else {
                ""
            };
            s.push_str(&format!(
                "  v{} -- v{} [label=\"{}\"{}];\n",
                self.origin(d),
                self.target(d),
                alphabet.letter_str(self.label(d)),
                style
            ));
        }
        s.push_str("}\n");
        s
    }

    pub fn to_json(&self, alphabet: &Alphabet) -> serde_json::Value {
        let darts: Vec<serde_json::Value> = (0..self.darts.len())
            .map(|d| {
                serde_json::json!({
                    "id": d,
                    "mate": self.mate(d),
                    "origin": self.origin(d),
                    "rot_next": self.rot_next(d),
                    "label": alphabet.letter_str(self.label(d)),
                })
            })
            .collect();
        serde_json::json!({
            "vertices": self.n_vertices,
            "outer_dart": self.outer,
            "boundary": alphabet.word_str(&self.boundary_word()),
            "regions": self.regions().iter().map(|r| alphabet.word_str(&r.label)).collect::<Vec<_>>(),
            "darts": darts,
        })
    }
}

/// Builds the tree diagram of a nonempty word that freely reduces to the
/// identity: a planar tree whose boundary walk spells exactly `w`.
pub fn tree_diagram(w: &Word) -> Result<Diagram, DiagramError> {
    let n = w.len();
    if n == 0 || !free_reduce(w).is_empty() {
        return Err(DiagramError::BoundaryNotTrivial);
    }
    // non-crossing pairing of cancelling letters
    let mut mate = vec![usize::MAX; n];
    let mut stack: Vec<usize> = Vec::new();
    for i in 0..n {
        if let Some(&top) = stack.last() {
            if w[top].is_inverse_of(w[i]) {
                stack.pop();
                mate[top] = i;
                mate[i] = top;
                continue;
            }
        }
        stack.push(i);
    }
    debug_assert!(stack.is_empty());
    // boundary position i is dart i; the face successor is i+1, which forces
    // the rotation to be successor-of-mate
    let mut darts: Vec<DartRec> = (0..n)
        .map(|i| DartRec {
            mate: mate[i],
            origin: usize::MAX,
            rot_next: (mate[i] + 1) % n,
            rot_prev: mate[(i + n - 1) % n],
            label: w[i],
        })
        .collect();
    let mut n_vertices = 0usize;
    for i in 0..n {
        if darts[i].origin != usize::MAX {
            continue;
        }
        let mut d = i;
        while darts[d].origin == usize::MAX {
            darts[d].origin = n_vertices;
            d = darts[d].rot_next;
        }
        n_vertices += 1;
    }
    Ok(Diagram { darts, outer: 0, n_vertices })
}

/// Options for [`enumerate_tight`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EnumerationOptions {
    pub max_regions: usize,
    /// Keep only reduced diagrams.  Pruning is exact: every sub-diagram of a
    /// reduced diagram is reduced, so no reduced diagram is lost.
    pub reduced_only: bool,
}

impl EnumerationOptions {
    pub fn new(max_regions: usize) -> EnumerationOptions {
        EnumerationOptions { max_regions, reduced_only: true }
    }
}

/// All tight diagrams over a presentation, deduplicated and indexed by
/// boundary label up to rotation and inversion.
#[derive(Debug, Clone)]
pub struct DiagramCorpus {
    pub diagrams: Vec<Diagram>,
    by_boundary: BTreeMap<Word, Vec<usize>>,
    /// Number of distinct diagrams per region count, starting at one region.
    pub level_sizes: Vec<usize>,
    pub options: EnumerationOptions,
}

impl DiagramCorpus {
    /// Indices of diagrams whose boundary matches `w` up to rotation and
    /// inversion.
    pub fn matching_boundary(&self, w: &Word) -> &[usize] {
        self.by_boundary
            .get(&cyclic_inverse_normal_form(w))
            .map_or(&[], Vec::as_slice)
    }

    pub fn len(&self) -> usize {
        self.diagrams.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diagrams.is_empty()
    }
}

/// Enumerates tight diagrams (regular disks grown by arc attachment) with up
/// to `options.max_regions` regions, up to isomorphism and mirror.
pub fn enumerate_tight(p: &Presentation, options: EnumerationOptions) -> DiagramCorpus {
    let closure: Vec<Word> = symmetric_closure(p).relators().to_vec();
    let mut prefix_map: BTreeMap<Word, Vec<usize>> = BTreeMap::new();
    for (ri, r) in closure.iter().enumerate() {
        for m in 1..r.len() {
            prefix_map.entry(r.prefix(m)).or_default().push(ri);
        }
    }
    let mut seen: BTreeSet<Vec<u32>> = BTreeSet::new();
    let mut all: Vec<Diagram> = Vec::new();
    let mut level_sizes = Vec::new();
    let mut frontier: Vec<Diagram> = Vec::new();
    for r in &closure {
        if r.len() < 2 {
            continue;
        }
        let d = Diagram::single_region(r);
        if seen.insert(d.canonical_code()) {
            frontier.push(d);
        }
    }
    level_sizes.push(frontier.len());
    all.extend(frontier.iter().cloned());
    for _ in 2..=options.max_regions {
        let mut next = Vec::new();
        for d in &frontier {
            let orbit = d.outer_orbit();
            let ln = orbit.len();
            for start in 0..ln {
                for m in 1..ln {
                    let arc_word =
                        d.word_of_darts(&(0..m).map(|i| orbit[(start + i) % ln]).collect::<Vec<_>>());
                    let Some(cands) = prefix_map.get(&arc_word) else { continue };
                    for &ri in cands {
                        let Some(nd) = d.attach(start, m, &closure[ri]) else { continue };
                        if options.reduced_only && !nd.is_reduced() {
                            continue;
                        }
                        if seen.insert(nd.canonical_code()) {
                            next.push(nd);
                        }
                    }
                }
            }
        }
        if next.is_empty() {
            break;
        }
        level_sizes.push(next.len());
        all.extend(next.iter().cloned());
        frontier = next;
    }
    let mut by_boundary: BTreeMap<Word, Vec<usize>> = BTreeMap::new();
    for (i, d) in all.iter().enumerate() {
        by_boundary
            .entry(cyclic_inverse_normal_form(&d.boundary_word()))
            .or_default()
            .push(i);
    }
    DiagramCorpus { diagrams: all, by_boundary, level_sizes, options }
}

/// Verdict of the bounded minimality search.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MinimalityVerdict {
    /// No tight diagram or tree with fewer regions and the same boundary
    /// (up to rotation and inversion) exists within the corpus bounds.
    Minimal,
    NotMinimal { witness: Diagram },
}

impl MinimalityVerdict {
    pub fn is_minimal(&self) -> bool {
        matches!(self, MinimalityVerdict::Minimal)
    }
}

/// Decides whether `d` has the fewest regions among tight fillings of its
/// boundary, also considering zero-region tree fillings when the boundary
/// freely reduces to the identity.
pub fn is_minimal(d: &Diagram, corpus: &DiagramCorpus) -> Result<MinimalityVerdict, DiagramError> {
    let r = d.region_count();
    if r == 0 {
        return Ok(MinimalityVerdict::Minimal);
    }
    let b = d.boundary_word();
    if free_reduce(&b).is_empty() {
        return Ok(MinimalityVerdict::NotMinimal { witness: tree_diagram(&b)? });
    }
    if corpus.options.max_regions + 1 < r {
        return Err(DiagramError::CorpusInsufficient {
            have: corpus.options.max_regions,
            need: r - 1,
        });
    }
    for &i in corpus.matching_boundary(&b) {
        if corpus.diagrams[i].region_count() < r {
            return Ok(MinimalityVerdict::NotMinimal { witness: corpus.diagrams[i].clone() });
        }
    }
    Ok(MinimalityVerdict::Minimal)
}

/// One way a minimal diagram can fail the local small-cancellation shape
/// conditions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MapViolation {
    /// A minimal diagram has an interior vertex of valence below four.
    InteriorVertexValence { diagram: usize, vertex: usize, valence: usize },
    /// A minimal diagram has two regions sharing a path of several edges.
    LongSharedPath { diagram: usize, faces: (usize, usize), len: usize },
}

#[derive(Debug, Clone)]
pub struct MapConditionReport {
    pub holds: bool,
    pub minimal_checked: usize,
    pub violations: Vec<MapViolation>,
    pub corpus: DiagramCorpus,
}

/// Empirically checks, over all tight diagrams with at most `max_regions`
/// regions, that minimal diagrams have interior vertices of valence at least
/// four and that two regions never share more than a single edge.
pub fn check_map_conditions(
    p: &Presentation,
    max_regions: usize,
) -> Result<MapConditionReport, DiagramError> {
    let corpus = enumerate_tight(p, EnumerationOptions::new(max_regions));
    let mut violations = Vec::new();
    let mut minimal_checked = 0usize;
    for (i, d) in corpus.diagrams.iter().enumerate() {
        if !is_minimal(d, &corpus)?.is_minimal() {
            continue;
        }
        minimal_checked += 1;
        let valences = d.vertex_valences();
        for v in d.interior_vertices() {
            if valences[v] < 4 {
                violations.push(MapViolation::InteriorVertexValence {
                    diagram: i,
                    vertex: v,
                    valence: valences[v],
                });
            }
        }
        for path in d.shared_inner_paths() {
            if path.darts.len() > 1 {
                violations.push(MapViolation::LongSharedPath {
                    diagram: i,
                    faces: path.faces,
                    len: path.darts.len(),
                });
            }
        }
    }
    Ok(MapConditionReport { holds: violations.is_empty(), minimal_checked, violations, corpus })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn z2_word(s: &str) -> Word {
        fixtures::z2().alphabet().parse_word(s).unwrap()
    }

    fn square() -> Diagram {
        Diagram::single_region(&z2_word("abAB"))
    }

    #[test]
    fn single_square_shape() {
        let d = square();
        d.validate().unwrap();
        assert_eq!(d.vertex_count(), 4);
        assert_eq!(d.edge_count(), 4);
        assert_eq!(d.faces().len(), 2);
        assert_eq!(d.region_count(), 1);
        let alpha = fixtures::z2().alphabet().clone();
        assert_eq!(alpha.word_str(&d.boundary_word()), "baBA");
        assert_eq!(alpha.word_str(&d.regions()[0].label), "abAB");
        assert!(d.labels_in_closure(&fixtures::z2()));
        assert!(d.interior_vertices().is_empty());
        assert!(d.is_reduced());
    }

    #[test]
    fn all_closure_squares_are_one_diagram() {
        let p = fixtures::z2();
        let codes: BTreeSet<Vec<u32>> = symmetric_closure(&p)
            .relators()
            .iter()
            .map(|r| Diagram::single_region(r).canonical_code())
            .collect();
        assert_eq!(codes.len(), 1);
    }

    #[test]
    fn attach_builds_vertical_domino() {
        let d = square();
        // outer orbit reads baBA; position 3 carries the A-labelled dart
        let orbit = d.outer_orbit();
        let alpha = fixtures::z2().alphabet().clone();
        assert_eq!(alpha.word_str(&d.word_of_darts(&orbit)), "baBA");
        let domino = d.attach(3, 1, &z2_word("ABab")).expect("arc matches");
        domino.validate().unwrap();
        assert_eq!(domino.region_count(), 2);
        assert_eq!(domino.vertex_count(), 6);
        assert_eq!(domino.edge_count(), 7);
        assert!(domino.is_reduced());
        assert_eq!(
            cyclic_inverse_normal_form(&domino.boundary_word()),
            cyclic_inverse_normal_form(&z2_word("abbABB")),
        );
        // the shared edge is a single a-labelled path between the regions
        let paths = domino.shared_inner_paths();
        assert_eq!(paths.len(), 1);
        assert_eq!(paths[0].darts.len(), 1);
        assert_eq!(domino.label(paths[0].darts[0]).gen.0, 0);
    }

    #[test]
    fn attach_order_does_not_matter() {
        // gluing the mirror-partner relator on the matching arc of either
        // square yields one isomorphism class
        let first = square().attach(3, 1, &z2_word("ABab")).unwrap();
        let other = Diagram::single_region(&z2_word("ABab"));
        let pos = other
            .outer_orbit()
            .iter()
            .position(|&x| other.label(x) == z2_word("a")[0])
            .unwrap();
        let second = other.attach(pos, 1, &z2_word("abAB")).unwrap();
        assert_eq!(first.canonical_code(), second.canonical_code());
    }

    #[test]
    fn attach_detects_cancelling_pair() {
        let d = square().attach(3, 1, &z2_word("AbaB")).expect("arc matches");
        d.validate().unwrap();
        assert!(!d.is_reduced());
        let (x, y) = d.find_cancelling_pair().unwrap();
        assert_eq!(d.mate(x), y);
    }

    #[test]
    fn attach_rejects_bad_arcs() {
        let d = square();
        assert!(d.attach(0, 0, &z2_word("ABab")).is_none());
        assert!(d.attach(0, 1, &z2_word("ABab")).is_none()); // label mismatch at position 0
        assert!(d.attach(3, 4, &z2_word("ABab")).is_none()); // arc as long as the relator
    }

    #[test]
    fn mirror_preserves_class_and_inverts_boundary() {
        let d = square().attach(3, 1, &z2_word("ABab")).unwrap();
        let m = d.mirrored();
        m.validate().unwrap();
        assert_eq!(m.canonical_code(), d.canonical_code());
        assert_eq!(
            cyclic_inverse_normal_form(&m.boundary_word()),
            cyclic_inverse_normal_form(&d.boundary_word()),
        );
        let w = d.boundary_word();
        let mw = m.boundary_word();
        let rotations: Vec<Word> = (0..w.len()).map(|k| w.inverse().rotate(k)).collect();
        assert!(rotations.contains(&mw));
    }

    #[test]
    fn tree_diagram_shapes() {
        let t = tree_diagram(&z2_word("abBA")).unwrap();
        t.validate().unwrap();
        assert_eq!(t.vertex_count(), 3);
        assert_eq!(t.edge_count(), 2);
        assert_eq!(t.faces().len(), 1);
        assert_eq!(t.boundary_word(), z2_word("abBA"));

        let star = tree_diagram(&z2_word("aAbB")).unwrap();
        star.validate().unwrap();
        assert_eq!(star.vertex_count(), 3);
        assert_eq!(star.boundary_word(), z2_word("aAbB"));

        assert!(tree_diagram(&z2_word("ab")).is_err());
        assert!(tree_diagram(&Word::empty()).is_err());
    }

    #[test]
    fn boundary_basepoints_found() {
        let d = square();
        let w = z2_word("BAba");
        let hits = d.find_boundary_basepoints(&w);
        assert_eq!(hits.len(), 1);
        assert_eq!(d.boundary_word_from(hits[0]), w);
        assert!(d.find_boundary_basepoints(&z2_word("abab")).is_empty());
    }

    #[test]
    fn enumeration_structural_invariants() {
        let corpus = enumerate_tight(&fixtures::z2(), EnumerationOptions::new(3));
        // One square; two dominoes; at three regions the two straight strips
        // plus the four bent (L-shaped) strips, one per corner orientation.
        assert_eq!(corpus.level_sizes, vec![1, 2, 6]);
        for d in &corpus.diagrams {
            d.validate().unwrap();
            assert!(d.is_reduced());
            assert!(d.labels_in_closure(&fixtures::z2()));
            // every shared path in a reduced diagram over Z^2 is one edge
            for p in d.shared_inner_paths() {
                assert_eq!(p.darts.len(), 1);
            }
        }
        let codes: BTreeSet<Vec<u32>> =
            corpus.diagrams.iter().map(Diagram::canonical_code).collect();
        assert_eq!(codes.len(), corpus.len());
        // both dominoes appear at two regions
        assert!(!corpus.matching_boundary(&z2_word("abbABB")).is_empty());
        assert!(!corpus.matching_boundary(&z2_word("aabAAB")).is_empty());
    }

    #[test]
    fn grid_is_minimal_and_has_interior_vertex() {
        let corpus = enumerate_tight(&fixtures::z2(), EnumerationOptions::new(4));
        // 19 four-cell lattice shapes plus the four reduced fans that wind a
        // full turn around one boundary vertex (their boundary words carry an
        // adjacent inverse pair where the walk doubles back).
        assert_eq!(corpus.level_sizes, vec![1, 2, 6, 23]);
        let grid_key = z2_word("aabbAABB");
        let hits = corpus.matching_boundary(&grid_key);
        let grid = hits
            .iter()
            .map(|&i| &corpus.diagrams[i])
            .find(|d| d.region_count() == 4)
            .expect("2x2 grid enumerated");
        assert!(is_minimal(grid, &corpus).unwrap().is_minimal());
        let interior = grid.interior_vertices();
        assert_eq!(interior.len(), 1);
        assert_eq!(grid.vertex_valences()[interior[0]], 4);
    }

    #[test]
    fn cancelling_pair_is_not_minimal() {
        let corpus = enumerate_tight(&fixtures::z2(), EnumerationOptions::new(1));
        let d = square().attach(3, 1, &z2_word("AbaB")).unwrap();
        match is_minimal(&d, &corpus).unwrap() {
            MinimalityVerdict::NotMinimal { witness } => {
                assert_eq!(witness.region_count(), 0);
                witness.validate().unwrap();
            }
            v => panic!("expected NotMinimal, got {v:?}"),
        }
    }

    #[test]
    fn map_conditions_hold_for_z2() {
        let report = check_map_conditions(&fixtures::z2(), 3).unwrap();
        assert!(report.holds, "violations: {:?}", report.violations);
        assert!(report.minimal_checked >= 3);
    }

    #[test]
    fn exports_are_wellformed() {
        let alpha = fixtures::z2().alphabet().clone();
        let d = square().attach(3, 1, &z2_word("ABab")).unwrap();
        let dot = d.to_dot(&alpha);
        assert!(dot.starts_with("graph"));
        assert_eq!(dot.matches(" -- ").count(), 7);
        let js = d.to_json(&alpha);
        assert_eq!(js["regions"].as_array().unwrap().len(), 2);
        assert_eq!(js["darts"].as_array().unwrap().len(), 14);
    }
}
