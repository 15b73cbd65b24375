//! Naive reference implementation of the equivalences, written directly
//! from the definitions and sharing no code with the checkers.
//!
//! Bisimilarity is decided by searching for a bisimulation: starting from
//! the root, every attack of every chosen element is answered by some
//! element, backtracking over the choice of answer. Any bisimulation
//! containing the root contains one built this way, so the search is
//! complete. For small product spaces [`enumerate_all`] additionally tests
//! every subset of the candidate pairs.

use std::collections::{BTreeMap, BTreeSet};

use csr_core::{ConfigStructure, EquivalenceKind};

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
enum Key {
    Single(String),
    Step(Vec<String>),
    DepthSingle(String, usize),
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Family {
    Single,
    Step,
    DepthSingle,
    Homogeneous,
    Equidepth,
}

pub struct Naive {
    configs: Vec<u64>,
    labels: Vec<String>,
}

fn bits(x: u64) -> impl Iterator<Item = usize> {
    (0..64).filter(move |i| x >> i & 1 == 1)
}

impl Naive {
    pub fn new(s: &ConfigStructure) -> Self {
        Naive {
            configs: s.configurations().iter().map(|c| c.bits()).collect(),
            labels: (0..s.num_events())
                .map(|e| s.label(e).as_str().to_string())
                .collect(),
        }
    }

    fn is_config(&self, x: u64) -> bool {
        self.configs.contains(&x)
    }

    /// `d <_X e`: every sub-configuration of `x` holding `e` holds `d`.
    pub fn lt(&self, x: u64, d: usize, e: usize) -> bool {
        d != e
            && self
                .configs
                .iter()
                .filter(|&&y| y & !x == 0 && y >> e & 1 == 1)
                .all(|&y| y >> d & 1 == 1)
    }

    pub fn depth(&self, x: u64, e: usize) -> usize {
        1 + bits(x)
            .filter(|&d| self.lt(x, d, e))
            .map(|d| self.depth(x, d))
            .max()
            .unwrap_or(0)
    }

    fn sorted_labels(&self, set: u64) -> Vec<String> {
        let mut v: Vec<String> = bits(set).map(|e| self.labels[e].clone()).collect();
        v.sort();
        v
    }

    /// Forward transitions `small -> large` of a family, with their keys;
    /// reverse transitions are the same triples read backwards.
    fn transitions(&self, family: Family) -> Vec<(u64, u64, Key)> {
        let mut out = Vec::new();
        for &x in &self.configs {
            for &y in &self.configs {
                if x & !y != 0 || x == y {
                    continue;
                }
                let added = y & !x;
                let events: Vec<usize> = bits(added).collect();
                let concurrent = events
                    .iter()
                    .all(|&d| events.iter().all(|&e| !self.lt(y, d, e)));
                if !concurrent {
                    continue;
                }
                let labels = self.sorted_labels(added);
                let key = match family {
                    Family::Single if events.len() == 1 => Key::Single(labels[0].clone()),
                    Family::Step => Key::Step(labels),
                    Family::DepthSingle if events.len() == 1 => {
                        Key::DepthSingle(labels[0].clone(), self.depth(y, events[0]))
                    }
                    Family::Homogeneous if labels.iter().all(|l| *l == labels[0]) => {
                        Key::Step(labels)
                    }
                    Family::Equidepth
                        if labels.iter().all(|l| *l == labels[0])
                            && events
                                .iter()
                                .all(|&e| self.depth(y, e) == self.depth(y, events[0])) =>
                    {
                        Key::Step(labels)
                    }
                    _ => continue,
                };
                out.push((x, y, key));
            }
        }
        out
    }
}

fn families(kind: EquivalenceKind) -> (Family, Option<Family>) {
    use EquivalenceKind::*;
    match kind {
        Ib => (Family::Single, None),
        Sb => (Family::Step, None),
        Db => (Family::DepthSingle, None),
        Rb | Hh => (Family::Single, Some(Family::Single)),
        Rsb => (Family::Step, Some(Family::Step)),
        Rhsb => (Family::Single, Some(Family::Homogeneous)),
        Rhesb => (Family::Single, Some(Family::Equidepth)),
        Rdb => (Family::DepthSingle, Some(Family::DepthSingle)),
    }
}

/// Moves from a configuration: (key, is_reverse, target).
type Moves = BTreeMap<u64, Vec<(Key, bool, u64)>>;

fn moves(s: &Naive, kind: EquivalenceKind) -> Moves {
    let (fwd, rev) = families(kind);
    let mut out: Moves = s.configs.iter().map(|&x| (x, Vec::new())).collect();
    for (x, y, k) in s.transitions(fwd) {
        out.get_mut(&x).unwrap().push((k, false, y));
    }
    if let Some(rev) = rev {
        for (x, y, k) in s.transitions(rev) {
            out.get_mut(&y).unwrap().push((k, true, x));
        }
    }
    out
}

/// Every attack from a pair, each with its list of answers.
fn obligations(mc: &Moves, md: &Moves, x: u64, y: u64) -> Vec<Vec<(u64, u64)>> {
    let mut out = Vec::new();
    for (k, r, x2) in &mc[&x] {
        out.push(
            md[&y]
                .iter()
                .filter(|(k2, r2, _)| k2 == k && r2 == r)
                .map(|(_, _, y2)| (*x2, *y2))
                .collect(),
        );
    }
    for (k, r, y2) in &md[&y] {
        out.push(
            mc[&x]
                .iter()
                .filter(|(k2, r2, _)| k2 == k && r2 == r)
                .map(|(_, _, x2)| (*x2, *y2))
                .collect(),
        );
    }
    out
}

/// Generic search for a closed set containing `root`: `obligations(p)`
/// lists, per attack, the admissible answers. Open obligations are handled
/// most constrained first.
fn search<P: Ord + Clone>(
    root: P,
    obligations: &dyn Fn(&P) -> Vec<Vec<P>>,
    budget: &mut u64,
) -> Option<bool> {
    fn go<P: Ord + Clone>(
        chosen: &mut BTreeSet<P>,
        pending: &[Vec<P>],
        obligations: &dyn Fn(&P) -> Vec<Vec<P>>,
        budget: &mut u64,
    ) -> Option<bool> {
        if *budget == 0 {
            return None;
        }
        *budget -= 1;
        let open: Vec<&Vec<P>> = pending
            .iter()
            .filter(|ans| !ans.iter().any(|a| chosen.contains(a)))
            .collect();
        let Some(next) = open.iter().min_by_key(|ans| ans.len()) else {
            return Some(true);
        };
        for a in next.iter() {
            chosen.insert(a.clone());
            let mut rest: Vec<Vec<P>> = open.iter().map(|v| (*v).clone()).collect();
            rest.extend(obligations(a));
            let r = go(chosen, &rest, obligations, budget);
            chosen.remove(a);
            if r != Some(false) {
                return r;
            }
        }
        Some(false)
    }
    let mut chosen = BTreeSet::from([root.clone()]);
    let pending = obligations(&root);
    go(&mut chosen, &pending, obligations, budget)
}

/// Search budget per question; exhausting it yields `None`.
const BUDGET: u64 = 5_000_000;

/// Whether some bisimulation of `kind` (not HH) relates the two roots.
pub fn bisimilar(kind: EquivalenceKind, c: &ConfigStructure, d: &ConfigStructure) -> Option<bool> {
    assert_ne!(kind, EquivalenceKind::Hh);
    let (nc, nd) = (Naive::new(c), Naive::new(d));
    let (mc, md) = (moves(&nc, kind), moves(&nd, kind));
    let ob = |&(x, y): &(u64, u64)| obligations(&mc, &md, x, y);
    search((0u64, 0u64), &ob, &mut BUDGET.clone())
}

/// Pairs reachable from the root by matched moves.
fn reachable(mc: &Moves, md: &Moves) -> Vec<(u64, u64)> {
    let mut seen = BTreeSet::from([(0u64, 0u64)]);
    let mut stack = vec![(0u64, 0u64)];
    while let Some((x, y)) = stack.pop() {
        for answers in obligations(mc, md, x, y) {
            for p in answers {
                if seen.insert(p) {
                    stack.push(p);
                }
            }
        }
    }
    seen.into_iter().collect()
}

/// Tests every relation over the reachable pairs that contains the root;
/// `None` if there are more than `max_pairs` of them.
pub fn enumerate_all(
    kind: EquivalenceKind,
    c: &ConfigStructure,
    d: &ConfigStructure,
    max_pairs: usize,
) -> Option<bool> {
    let (nc, nd) = (Naive::new(c), Naive::new(d));
    let (mc, md) = (moves(&nc, kind), moves(&nd, kind));
    let pairs = reachable(&mc, &md);
    if pairs.len() > max_pairs {
        return None;
    }
    let rest = &pairs[1..];
    debug_assert_eq!(pairs[0], (0, 0));
    for mask in 0u64..1 << rest.len() {
        let r: BTreeSet<(u64, u64)> = std::iter::once((0, 0))
            .chain(
                rest.iter()
                    .enumerate()
                    .filter(|(i, _)| mask >> i & 1 == 1)
                    .map(|(_, p)| *p),
            )
            .collect();
        let ok = r.iter().all(|&(x, y)| {
            obligations(&mc, &md, x, y)
                .iter()
                .all(|ans| ans.iter().any(|p| r.contains(p)))
        });
        if ok {
            return Some(true);
        }
    }
    Some(false)
}

type Iso = BTreeMap<usize, usize>;

fn is_isomorphism(c: &Naive, x: u64, d: &Naive, y: u64, f: &Iso) -> bool {
    let xs: Vec<usize> = bits(x).collect();
    if f.len() != xs.len() || bits(y).count() != xs.len() {
        return false;
    }
    let image: BTreeSet<usize> = f.values().copied().collect();
    if image.len() != xs.len()
        || !image.iter().all(|&e| y >> e & 1 == 1)
        || !xs.iter().all(|e| f.contains_key(e))
    {
        return false;
    }
    xs.iter().all(|&e| c.labels[e] == d.labels[f[&e]])
        && xs
            .iter()
            .all(|&p| xs.iter().all(|&q| c.lt(x, p, q) == d.lt(y, f[&p], f[&q])))
}

/// Literal HH definition: forward clauses on both sides extending `f`, and
/// the reverse clause for the left structure only.
pub fn hh_bisimilar(c: &ConfigStructure, d: &ConfigStructure) -> Option<bool> {
    let (nc, nd) = (Naive::new(c), Naive::new(d));
    let (mc, md) = (
        moves(&nc, EquivalenceKind::Rb),
        moves(&nd, EquivalenceKind::Rb),
    );
    let ob = |(x, y, f): &(u64, u64, Iso)| -> Vec<Vec<(u64, u64, Iso)>> {
        let mut out = Vec::new();
        for (k, rev, x2) in &mc[x] {
            let e = bits(x ^ x2).next().unwrap();
            let answers = md[y]
                .iter()
                .filter(|(k2, r2, _)| k2 == k && r2 == rev)
                .filter_map(|(_, _, y2)| {
                    let e2 = bits(y ^ y2).next().unwrap();
                    let mut g = f.clone();
                    if *rev {
                        if f.get(&e) != Some(&e2) {
                            return None;
                        }
                        g.remove(&e);
                    } else {
                        g.insert(e, e2);
                    }
                    is_isomorphism(&nc, *x2, &nd, *y2, &g).then_some((*x2, *y2, g))
                })
                .collect();
            out.push(answers);
        }
        for (k, rev, y2) in &md[y] {
            if *rev {
                continue;
            }
            let e2 = bits(y ^ y2).next().unwrap();
            let answers = mc[x]
                .iter()
                .filter(|(k2, r2, _)| k2 == k && !r2)
                .filter_map(|(_, _, x2)| {
                    let e = bits(x ^ x2).next().unwrap();
                    let mut g = f.clone();
                    g.insert(e, e2);
                    is_isomorphism(&nc, *x2, &nd, *y2, &g).then_some((*x2, *y2, g))
                })
                .collect();
            out.push(answers);
        }
        out
    };
    search((0u64, 0u64, Iso::new()), &ob, &mut BUDGET.clone())
}
