//! Finite Veltman frames and models.
//!
//! A frame is plain data; [`Frame::validate`] reports which frame laws fail
//! and [`complete`] produces the least valid frame above arbitrary seeds.

mod generate;
mod io;

use std::collections::{BTreeMap, VecDeque};
use std::fmt;
use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

pub use crate::worldset::{Relation, World, WorldSet};
pub use generate::{
    all_frames, antichain_under_root, chain, full_tree, random_frame, random_valuation,
};
pub use io::{parse_frame_text, read_frame_file, to_dot, to_text, FrameIoError, LoadedFrame};

/// `⟨W, R, {S_w}⟩` with `W = 0..n`.
#[derive(Clone, PartialEq, Eq)]
pub struct Frame {
    n: usize,
    r: Relation,
    s: Vec<Relation>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "law", rename_all = "kebab-case")]
pub enum Violation {
    /// `w R w`
    RIrreflexive { w: World },
    /// `a R b R c` without `a R c`
    RTransitive { a: World, b: World, c: World },
    /// `i S_w j` with `i` or `j` outside `R[w]`
    SWithinSuccessors { w: World, i: World, j: World },
    /// `v ∈ R[w]` without `v S_w v`
    SReflexive { w: World, v: World },
    /// `a S_w b S_w c` without `a S_w c`
    STransitive { w: World, a: World, b: World, c: World },
    /// `w R i R j` without `i S_w j`
    RContainedInS { w: World, i: World, j: World },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::RIrreflexive { w } => write!(f, "R not irreflexive: {w} R {w}"),
            Violation::RTransitive { a, b, c } => {
                write!(f, "R not transitive: {a} R {b} R {c} but not {a} R {c}")
            }
            Violation::SWithinSuccessors { w, i, j } => {
                write!(f, "S_{w} pair ({i},{j}) leaves R[{w}]")
            }
            Violation::SReflexive { w, v } => write!(f, "S_{w} not reflexive at {v}"),
            Violation::STransitive { w, a, b, c } => {
                write!(f, "S_{w} not transitive: ({a},{b}),({b},{c}) but not ({a},{c})")
            }
            Violation::RContainedInS { w, i, j } => {
                write!(f, "R∩R[{w}]² pair ({i},{j}) not in S_{w}")
            }
        }
    }
}

/// Result of [`Frame::validate`]; empty means every frame law holds.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize)]
pub struct Validation {
    pub violations: Vec<Violation>,
}

impl Validation {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CompleteError {
    #[error("closure introduces a cycle: {}", render_cycle(.cycle))]
    Cycle { cycle: Vec<World> },
    #[error("world {world} out of range for a frame with {n} worlds")]
    WorldOutOfRange { world: World, n: usize },
}

fn render_cycle(cycle: &[World]) -> String {
    cycle
        .iter()
        .map(|w| w.to_string())
        .collect::<Vec<_>>()
        .join("→")
}

impl Frame {
    /// Assembles a frame without checking any law. `s` must have one
    /// relation per world.
    pub fn new(n: usize, r: Relation, s: Vec<Relation>) -> Frame {
        assert_eq!(r.universe(), n, "R built over a different world count");
        assert_eq!(s.len(), n, "need one S relation per world");
        assert!(s.iter().all(|rel| rel.universe() == n));
        Frame { n, r, s }
    }

    /// Frame with no edges.
    pub fn discrete(n: usize) -> Frame {
        Frame::new(n, Relation::new(n), vec![Relation::new(n); n])
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn worlds(&self) -> std::ops::Range<World> {
        0..self.n
    }

    pub fn r(&self) -> &Relation {
        &self.r
    }

    /// `R[w]`
    pub fn successors(&self, w: World) -> &WorldSet {
        self.r.row(w)
    }

    pub fn s(&self, w: World) -> &Relation {
        &self.s[w]
    }

    pub fn empty_set(&self) -> WorldSet {
        WorldSet::empty(self.n)
    }

    pub fn full_set(&self) -> WorldSet {
        WorldSet::full(self.n)
    }

    pub fn validate(&self) -> Validation {
        let mut violations = Vec::new();
        for w in self.worlds() {
            if self.r.contains(w, w) {
                violations.push(Violation::RIrreflexive { w });
            }
        }
        for (a, b) in self.r.pairs() {
            for c in self.r.row(b).difference(self.r.row(a)).iter() {
                violations.push(Violation::RTransitive { a, b, c });
            }
        }
        for w in self.worlds() {
            let succ = self.successors(w);
            let sw = &self.s[w];
            for (i, j) in sw.pairs() {
                if !succ.contains(i) || !succ.contains(j) {
                    violations.push(Violation::SWithinSuccessors { w, i, j });
                }
            }
            for v in succ {
                if !sw.contains(v, v) {
                    violations.push(Violation::SReflexive { w, v });
                }
            }
            for (a, b) in sw.pairs() {
                for c in sw.row(b).difference(sw.row(a)).iter() {
                    violations.push(Violation::STransitive { w, a, b, c });
                }
            }
            for i in succ {
                for j in self.r.row(i).intersection(succ).iter() {
                    if !sw.contains(i, j) {
                        violations.push(Violation::RContainedInS { w, i, j });
                    }
                }
            }
        }
        Validation { violations }
    }

    /// Number of edges on the longest R-path (0 for an edgeless frame).
    /// Requires R acyclic.
    pub fn longest_chain(&self) -> usize {
        let mut memo: Vec<Option<usize>> = vec![None; self.n];
        fn height(fr: &Frame, w: World, memo: &mut Vec<Option<usize>>) -> usize {
            if let Some(h) = memo[w] {
                return h;
            }
            let h = fr
                .successors(w)
                .iter()
                .map(|v| 1 + height(fr, v, memo))
                .max()
                .unwrap_or(0);
            memo[w] = Some(h);
            h
        }
        (0..self.n)
            .map(|w| height(self, w, &mut memo))
            .max()
            .unwrap_or(0)
    }
}

impl fmt::Debug for Frame {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut d = f.debug_struct("Frame");
        d.field("n", &self.n).field("R", &self.r);
        for w in self.worlds() {
            if !self.s[w].is_empty() {
                d.field(&format!("S_{w}"), &self.s[w]);
            }
        }
        d.finish()
    }
}

/// The least valid frame above the given edges.
///
/// Each seed `i S_w j` also forces `w R i` and `w R j`. R is replaced by its
/// transitive closure (a cycle is an error); each `S_w` gains reflexivity on
/// `R[w]`, the pairs of `R ∩ R[w]²`, and is transitively closed.
pub fn complete(n: usize, r_edges: &[(World, World)], s_seeds: &[(World, World, World)]) -> Result<Frame, CompleteError> {
    let check = |w: World| {
        if w < n {
            Ok(())
        } else {
            Err(CompleteError::WorldOutOfRange { world: w, n })
        }
    };
    let mut base = Relation::new(n);
    for &(a, b) in r_edges {
        check(a)?;
        check(b)?;
        base.insert(a, b);
    }
    for &(w, i, j) in s_seeds {
        check(w)?;
        check(i)?;
        check(j)?;
        base.insert(w, i);
        base.insert(w, j);
    }
    let r = base.transitive_closure();
    if let Some(w) = (0..n).find(|&w| r.contains(w, w)) {
        return Err(CompleteError::Cycle {
            cycle: find_cycle(&base, w),
        });
    }
    let mut s: Vec<Relation> = vec![Relation::new(n); n];
    for &(w, i, j) in s_seeds {
        s[w].insert(i, j);
    }
    for (w, sw) in s.iter_mut().enumerate() {
        let succ = r.row(w).clone();
        for v in &succ {
            sw.insert(v, v);
        }
        sw.union_with(&r.restrict(&succ));
        *sw = sw.transitive_closure();
    }
    Ok(Frame::new(n, r, s))
}

/// Completion of an existing frame's edges.
pub fn complete_frame(fr: &Frame) -> Result<Frame, CompleteError> {
    let r: Vec<_> = fr.r.pairs().collect();
    let s: Vec<_> = fr
        .worlds()
        .flat_map(|w| fr.s[w].pairs().map(move |(i, j)| (w, i, j)))
        .collect();
    complete(fr.n, &r, &s)
}

/// Shortest cycle through `start` in `edges`, as `start, .., start`.
fn find_cycle(edges: &Relation, start: World) -> Vec<World> {
    let n = edges.universe();
    let mut parent: Vec<Option<World>> = vec![None; n];
    let mut queue = VecDeque::new();
    for v in edges.row(start) {
        if v == start {
            return vec![start, start];
        }
        if parent[v].is_none() {
            parent[v] = Some(start);
            queue.push_back(v);
        }
    }
    while let Some(u) = queue.pop_front() {
        for v in edges.row(u) {
            if v == start {
                let mut path = vec![start];
                let mut cur = u;
                while cur != start {
                    path.push(cur);
                    cur = parent[cur].expect("bfs tree");
                }
                path.push(start);
                path.reverse();
                return path;
            }
            if parent[v].is_none() {
                parent[v] = Some(u);
                queue.push_back(v);
            }
        }
    }
    vec![start]
}

/// Atom valuation over a frame; unnamed atoms are false everywhere.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Valuation {
    n: usize,
    map: BTreeMap<String, WorldSet>,
}

impl Valuation {
    pub fn new(n: usize) -> Valuation {
        Valuation {
            n,
            map: BTreeMap::new(),
        }
    }

    pub fn universe(&self) -> usize {
        self.n
    }

    pub fn set(&mut self, atom: &str, worlds: WorldSet) {
        assert_eq!(worlds.universe(), self.n, "valuation over a different frame");
        self.map.insert(atom.to_string(), worlds);
    }

    pub fn with(mut self, atom: &str, worlds: &[World]) -> Valuation {
        let set = WorldSet::from_worlds(self.n, worlds.iter().copied());
        self.set(atom, set);
        self
    }

    pub fn get(&self, atom: &str) -> Option<&WorldSet> {
        self.map.get(atom)
    }

    /// `ev(atom)`, empty if unnamed.
    pub fn eval(&self, atom: &str) -> WorldSet {
        self.map
            .get(atom)
            .cloned()
            .unwrap_or_else(|| WorldSet::empty(self.n))
    }

    pub fn atoms(&self) -> impl Iterator<Item = &str> {
        self.map.keys().map(String::as_str)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &WorldSet)> {
        self.map.iter().map(|(k, v)| (k.as_str(), v))
    }

    /// Atoms true at `w`.
    pub fn true_at(&self, w: World) -> Vec<&str> {
        self.iter()
            .filter(|(_, s)| s.contains(w))
            .map(|(a, _)| a)
            .collect()
    }
}

impl fmt::Debug for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_map().entries(self.map.iter()).finish()
    }
}

impl Serialize for Valuation {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_map(self.map.iter())
    }
}

/// A frame with a valuation. The frame is shared so sweeps over many
/// valuations do not copy it.
#[derive(Clone, Debug)]
pub struct Model {
    pub frame: Arc<Frame>,
    pub valuation: Valuation,
}

impl Model {
    pub fn new(frame: Arc<Frame>, valuation: Valuation) -> Model {
        assert_eq!(frame.n(), valuation.universe());
        Model { frame, valuation }
    }

    pub fn bare(frame: Arc<Frame>) -> Model {
        let n = frame.n();
        Model::new(frame, Valuation::new(n))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn raw(n: usize, r: &[(World, World)], s: &[(World, World, World)]) -> Frame {
        let mut sv = vec![Relation::new(n); n];
        for &(w, i, j) in s {
            sv[w].insert(i, j);
        }
        Frame::new(n, Relation::from_pairs(n, r.iter().copied()), sv)
    }

    #[test]
    fn single_world_is_valid() {
        assert!(raw(1, &[], &[]).validate().is_ok());
    }

    #[test]
    fn missing_reflexive_pair_reported() {
        let v = raw(2, &[(0, 1)], &[]).validate();
        assert_eq!(v.violations, vec![Violation::SReflexive { w: 0, v: 1 }]);
    }

    #[test]
    fn missing_r_pair_in_s_reported() {
        let v = raw(3, &[(0, 1), (0, 2), (1, 2)], &[(0, 1, 1), (0, 2, 2)]).validate();
        assert!(v
            .violations
            .contains(&Violation::RContainedInS { w: 0, i: 1, j: 2 }));
    }

    #[test]
    fn law_checks_fire() {
        let v = raw(2, &[(0, 0)], &[]).validate();
        assert!(v.violations.contains(&Violation::RIrreflexive { w: 0 }));
        let v = raw(3, &[(0, 1), (1, 2)], &[]).validate();
        assert!(v
            .violations
            .contains(&Violation::RTransitive { a: 0, b: 1, c: 2 }));
        let v = raw(2, &[], &[(0, 0, 1)]).validate();
        assert!(v
            .violations
            .contains(&Violation::SWithinSuccessors { w: 0, i: 0, j: 1 }));
        let fr = raw(
            4,
            &[(0, 1), (0, 2), (0, 3)],
            &[(0, 1, 1), (0, 2, 2), (0, 3, 3), (0, 1, 2), (0, 2, 3)],
        );
        assert!(fr.validate().violations.contains(&Violation::STransitive {
            w: 0,
            a: 1,
            b: 2,
            c: 3
        }));
    }

    #[test]
    fn complete_closes_r() {
        let fr = complete(3, &[(0, 1), (1, 2)], &[]).unwrap();
        assert_eq!(fr.r().pairs().collect::<Vec<_>>(), vec![(0, 1), (0, 2), (1, 2)]);
        assert!(fr.validate().is_ok());
    }

    #[test]
    fn complete_reports_cycle() {
        let err = complete(2, &[(0, 1), (1, 0)], &[]).unwrap_err();
        assert_eq!(err, CompleteError::Cycle { cycle: vec![0, 1, 0] });
        assert_eq!(err.to_string(), "closure introduces a cycle: 0→1→0");
        let err = complete(1, &[(0, 0)], &[]).unwrap_err();
        assert_eq!(err, CompleteError::Cycle { cycle: vec![0, 0] });
    }

    #[test]
    fn complete_extends_s_seed() {
        let fr = complete(3, &[(0, 1), (1, 2)], &[(0, 1, 2)]).unwrap();
        assert_eq!(
            fr.s(0).pairs().collect::<Vec<_>>(),
            vec![(1, 1), (1, 2), (2, 2)]
        );
    }

    #[test]
    fn seeds_force_successors() {
        let fr = complete(3, &[], &[(0, 1, 2)]).unwrap();
        assert!(fr.r().contains(0, 1) && fr.r().contains(0, 2));
        assert!(fr.validate().is_ok());
        assert!(complete(2, &[], &[(0, 0, 1)]).is_err());
    }

    #[test]
    fn complete_is_idempotent() {
        let fr = complete(4, &[(0, 1), (1, 2), (0, 3)], &[(0, 3, 1)]).unwrap();
        assert_eq!(complete_frame(&fr).unwrap(), fr);
    }

    #[test]
    fn longest_chain_counts_edges() {
        assert_eq!(Frame::discrete(3).longest_chain(), 0);
        assert_eq!(chain(4).longest_chain(), 3);
    }
}
