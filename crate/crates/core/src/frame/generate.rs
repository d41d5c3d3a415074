use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{complete, Frame, Relation, Valuation, World, WorldSet};

/// `0 R 1 R .. R k-1`, closed.
pub fn chain(k: usize) -> Frame {
    let edges: Vec<_> = (1..k).map(|i| (i - 1, i)).collect();
    complete(k, &edges, &[]).expect("chains are acyclic")
}

/// Root `0` with `k` pairwise unrelated successors `1..=k`.
pub fn antichain_under_root(k: usize) -> Frame {
    let edges: Vec<_> = (1..=k).map(|i| (0, i)).collect();
    complete(k + 1, &edges, &[]).expect("acyclic")
}

/// Complete tree in breadth-first numbering; R is the descendant relation.
pub fn full_tree(branching: usize, depth: usize) -> Frame {
    let mut edges = Vec::new();
    let mut level = vec![0usize];
    let mut next_id = 1;
    for _ in 0..depth {
        let mut next = Vec::new();
        for &parent in &level {
            for _ in 0..branching {
                edges.push((parent, next_id));
                next.push(next_id);
                next_id += 1;
            }
        }
        level = next;
    }
    complete(next_id, &edges, &[]).expect("trees are acyclic")
}

/// Every valid frame on worlds `0..n`, labelled (no isomorphism reduction).
///
/// R ranges over strict partial orders; for each world the S relation ranges
/// over transitive relations between the forced part and all of `R[w]²`.
pub fn all_frames(n: usize) -> Vec<Frame> {
    assert!(n <= 5, "raw frame enumeration beyond five worlds is not tractable");
    let off_diag: Vec<(World, World)> = (0..n)
        .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
        .collect();
    let mut out = Vec::new();
    for mask in 0u64..(1u64 << off_diag.len()) {
        let r = Relation::from_pairs(
            n,
            off_diag
                .iter()
                .enumerate()
                .filter(|(k, _)| mask >> k & 1 == 1)
                .map(|(_, &p)| p),
        );
        if r.first_transitivity_violation().is_some() {
            continue;
        }
        let options: Vec<Vec<Relation>> = (0..n).map(|w| s_options(&r, w)).collect();
        let mut idx = vec![0usize; n];
        'product: loop {
            let s = (0..n).map(|w| options[w][idx[w]].clone()).collect();
            out.push(Frame::new(n, r.clone(), s));
            for k in (0..n).rev() {
                idx[k] += 1;
                if idx[k] < options[k].len() {
                    continue 'product;
                }
                idx[k] = 0;
            }
            break;
        }
    }
    out
}

fn s_options(r: &Relation, w: World) -> Vec<Relation> {
    let n = r.universe();
    let succ = r.row(w).clone();
    let mut base = r.restrict(&succ);
    for v in &succ {
        base.insert(v, v);
    }
    let free: Vec<(World, World)> = succ
        .iter()
        .flat_map(|i| succ.iter().map(move |j| (i, j)))
        .filter(|&(i, j)| !base.contains(i, j))
        .collect();
    let mut out = Vec::new();
    for mask in 0u64..(1u64 << free.len()) {
        let mut s = base.clone();
        for (k, &(i, j)) in free.iter().enumerate() {
            if mask >> k & 1 == 1 {
                s.insert(i, j);
            }
        }
        if s.first_transitivity_violation().is_none() {
            out.push(s);
        }
    }
    debug_assert!(out.iter().all(|s| s.universe() == n));
    out
}

/// Random valid frame: a random strict partial order, random S seeds inside
/// each `R[w]²`, then [`complete`].
pub fn random_frame(n: usize, seed: u64) -> Frame {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut order: Vec<World> = (0..n).collect();
    order.shuffle(&mut rng);
    let density = rng.gen_range(0.2..0.7);
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if rng.gen_bool(density) {
                edges.push((order[i], order[j]));
            }
        }
    }
    let r = Relation::from_pairs(n, edges.iter().copied()).transitive_closure();
    let mut seeds = Vec::new();
    for w in 0..n {
        let succ = r.row(w).to_vec();
        if succ.len() < 2 {
            continue;
        }
        for _ in 0..rng.gen_range(0..=succ.len()) {
            let i = succ[rng.gen_range(0..succ.len())];
            let j = succ[rng.gen_range(0..succ.len())];
            seeds.push((w, i, j));
        }
    }
    let fr = complete(n, &edges, &seeds).expect("edges follow a linear order");
    debug_assert!(fr.validate().is_ok());
    fr
}

/// Each atom true at each world with probability one half.
pub fn random_valuation<R: Rng + ?Sized, S: AsRef<str>>(n: usize, atoms: &[S], rng: &mut R) -> Valuation {
    let mut val = Valuation::new(n);
    for a in atoms {
        let set = WorldSet::from_worlds(n, (0..n).filter(|_| rng.gen_bool(0.5)));
        val.set(a.as_ref(), set);
    }
    val
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chain_examples() {
        let c2 = chain(2);
        assert_eq!(c2.r().pairs().collect::<Vec<_>>(), vec![(0, 1)]);
        assert_eq!(c2.s(0).pairs().collect::<Vec<_>>(), vec![(1, 1)]);
        let c3 = chain(3);
        assert_eq!(c3.r().pairs().collect::<Vec<_>>(), vec![(0, 1), (0, 2), (1, 2)]);
        assert_eq!(
            c3.s(0).pairs().collect::<Vec<_>>(),
            vec![(1, 1), (1, 2), (2, 2)]
        );
        assert_eq!(c3.s(1).pairs().collect::<Vec<_>>(), vec![(2, 2)]);
        assert!(c3.s(2).is_empty());
    }

    #[test]
    fn shapes() {
        let a = antichain_under_root(3);
        assert_eq!(a.n(), 4);
        assert_eq!(a.successors(0).len(), 3);
        assert_eq!(a.s(0).len(), 3);
        let t = full_tree(2, 2);
        assert_eq!(t.n(), 7);
        assert_eq!(t.successors(0).len(), 6);
        assert_eq!(t.successors(1).to_vec(), vec![3, 4]);
        for fr in [a, t] {
            assert!(fr.validate().is_ok());
        }
    }

    /// Everything is enumerated: R over all of 2^(n²), every S_w over 2^(n²).
    fn brute_count(n: usize) -> usize {
        let cells = n * n;
        let rel = |mask: u64| {
            Relation::from_pairs(
                n,
                (0..cells).filter(|k| mask >> k & 1 == 1).map(|k| (k / n, k % n)),
            )
        };
        let mut count = 0;
        for rm in 0u64..(1 << cells) {
            let r = rel(rm);
            let total = 1u64 << (cells * n);
            for sm in 0..total {
                let s = (0..n)
                    .map(|w| rel(sm >> (w * cells) & ((1 << cells) - 1)))
                    .collect();
                if Frame::new(n, r.clone(), s).validate().is_ok() {
                    count += 1;
                }
            }
        }
        count
    }

    #[test]
    fn two_world_count_matches_brute_force() {
        assert_eq!(brute_count(1), 1);
        assert_eq!(brute_count(2), 3);
        assert_eq!(all_frames(1).len(), 1);
        assert_eq!(all_frames(2).len(), 3);
    }

    #[test]
    fn three_world_enumeration_is_sound_and_complete() {
        // R brute-forced; each S_w brute-forced over subsets of R[w]²
        let n = 3;
        let mut expected = 0usize;
        for rm in 0u64..(1 << 9) {
            let r = Relation::from_pairs(n, (0..9).filter(|k| rm >> k & 1 == 1).map(|k| (k / 3, k % 3)));
            let mut per_world = 1usize;
            for w in 0..n {
                let succ = r.row(w).to_vec();
                let cells: Vec<_> = succ.iter().flat_map(|&i| succ.iter().map(move |&j| (i, j))).collect();
                let mut ok = 0;
                for sm in 0u64..(1 << cells.len()) {
                    let mut s = vec![Relation::new(n); n];
                    s[w] = Relation::from_pairs(n, cells.iter().enumerate().filter(|(k, _)| sm >> k & 1 == 1).map(|(_, &p)| p));
                    let fr = Frame::new(n, r.clone(), s);
                    let bad = fr.validate().violations.into_iter().any(|v| match v {
                        super::super::Violation::RIrreflexive { .. } | super::super::Violation::RTransitive { .. } => true,
                        super::super::Violation::SWithinSuccessors { w: x, .. }
                        | super::super::Violation::SReflexive { w: x, .. }
                        | super::super::Violation::STransitive { w: x, .. }
                        | super::super::Violation::RContainedInS { w: x, .. } => x == w,
                    });
                    if !bad {
                        ok += 1;
                    }
                }
                per_world *= ok;
            }
            expected += per_world;
        }
        let frames = all_frames(3);
        assert_eq!(frames.len(), expected);
        assert!(frames.iter().all(|f| f.validate().is_ok()));
        let distinct: std::collections::HashSet<String> = frames.iter().map(|f| format!("{f:?}")).collect();
        assert_eq!(distinct.len(), frames.len());
    }

    #[test]
    fn random_frames_are_valid_and_deterministic() {
        for seed in 0..200 {
            let n = (seed % 7) as usize + 1;
            let fr = random_frame(n, seed);
            assert!(fr.validate().is_ok(), "seed {seed}");
            assert_eq!(fr, random_frame(n, seed));
            assert!(fr.longest_chain() < n.max(1));
        }
    }
}
