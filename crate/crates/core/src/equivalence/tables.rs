//! Precomputed move tables with interned labels, shared by the arenas.

use std::ops::Range;

use crate::structure::{ConfigStructure, EventSet, Label, LabelMultiset};
use crate::transitions::{common_depth, raw_singles, raw_steps, Direction, Move, MoveKind};

pub(crate) type Lab = u32;

/// Labels of both structures, sorted, so that ids agree across sides.
pub(crate) struct Alphabet {
    names: Vec<Label>,
}

impl Alphabet {
    pub fn new(structures: &[&ConfigStructure]) -> Self {
        let mut names: Vec<Label> = structures
            .iter()
            .flat_map(|s| s.labels().iter().cloned())
            .collect();
        names.sort();
        names.dedup();
        Alphabet { names }
    }

    pub fn id(&self, l: &Label) -> Lab {
        self.names.binary_search(l).expect("label interned") as Lab
    }

    pub fn name(&self, l: Lab) -> &Label {
        &self.names[l as usize]
    }

    /// Sorted label ids of a set, for multiset comparison.
    pub fn multiset(&self, s: &ConfigStructure, set: EventSet) -> Vec<Lab> {
        let mut v: Vec<Lab> = set.iter().map(|e| self.id(s.label(e))).collect();
        v.sort_unstable();
        v
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub(crate) enum MoveFamily {
    Single,
    Step,
    DepthSingle,
    HomogeneousStep,
    EquidepthStep,
}

/// What the defender has to match. Depth of equidepth steps is deliberately
/// absent.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub(crate) enum Key {
    Single(Direction, Lab),
    Step(Direction, Vec<Lab>),
    DepthSingle(Direction, Lab, usize),
    HomogeneousStep(Direction, Lab, usize),
    EquidepthStep(Direction, Lab, usize),
}

impl Key {
    pub fn direction(&self) -> Direction {
        match self {
            Key::Single(d, _)
            | Key::Step(d, _)
            | Key::DepthSingle(d, ..)
            | Key::HomogeneousStep(d, ..)
            | Key::EquidepthStep(d, ..) => *d,
        }
    }
}

#[derive(Clone, Debug)]
pub(crate) struct TableMove {
    pub key: Key,
    pub target: usize,
    pub events: EventSet,
    /// Common depth of the moved events in the larger configuration.
    pub depth: usize,
}

pub(crate) struct MoveTable {
    /// Moves per configuration, sorted by key then target.
    pub moves: Vec<Vec<TableMove>>,
    /// `neighbours[t]`: configurations with some move into `t`.
    pub neighbours: Vec<Vec<usize>>,
}

impl MoveTable {
    pub fn build(
        s: &ConfigStructure,
        alphabet: &Alphabet,
        families: &[(Direction, MoveFamily)],
    ) -> Self {
        let n = s.num_configurations();
        let mut moves = Vec::with_capacity(n);
        let mut neighbours = vec![Vec::new(); n];
        for idx in 0..n {
            let mut row = Vec::new();
            for &(dir, family) in families {
                let raw = match family {
                    MoveFamily::Single | MoveFamily::DepthSingle => raw_singles(s, idx, dir),
                    _ => raw_steps(s, idx, dir),
                };
                for r in raw {
                    let labels = alphabet.multiset(s, r.events);
                    let depth = common_depth(s, r.upper, r.events);
                    let homogeneous = labels.first() == labels.last();
                    let key = match family {
                        MoveFamily::Single => Key::Single(dir, labels[0]),
                        MoveFamily::DepthSingle => {
                            Key::DepthSingle(dir, labels[0], depth.expect("single event"))
                        }
                        MoveFamily::Step => Key::Step(dir, labels),
                        MoveFamily::HomogeneousStep if homogeneous => {
                            Key::HomogeneousStep(dir, labels[0], labels.len())
                        }
                        MoveFamily::EquidepthStep if homogeneous && depth.is_some() => {
                            Key::EquidepthStep(dir, labels[0], labels.len())
                        }
                        _ => continue,
                    };
                    row.push(TableMove {
                        key,
                        target: r.target,
                        events: r.events,
                        depth: depth.unwrap_or(0),
                    });
                }
            }
            row.sort_by(|a, b| a.key.cmp(&b.key).then(a.target.cmp(&b.target)));
            row.dedup_by(|a, b| a.key == b.key && a.target == b.target);
            for m in &row {
                neighbours[m.target].push(idx);
            }
            moves.push(row);
        }
        for v in &mut neighbours {
            v.sort_unstable();
            v.dedup();
        }
        MoveTable { moves, neighbours }
    }

    /// Indices in `moves[src]` carrying `key`.
    pub fn group(&self, src: usize, key: &Key) -> Range<usize> {
        let row = &self.moves[src];
        let lo = row.partition_point(|m| m.key < *key);
        let hi = lo + row[lo..].partition_point(|m| m.key == *key);
        lo..hi
    }

    /// Public form of a table move.
    pub fn to_move(
        &self,
        s: &ConfigStructure,
        alphabet: &Alphabet,
        src: usize,
        m: &TableMove,
    ) -> Move {
        let repeat = |l: Lab, n: usize| -> LabelMultiset {
            std::iter::repeat_n(alphabet.name(l).clone(), n).collect()
        };
        let kind = match &m.key {
            Key::Single(_, l) => MoveKind::Single(alphabet.name(*l).clone()),
            Key::DepthSingle(_, l, k) => MoveKind::DepthSingle(alphabet.name(*l).clone(), *k),
            Key::Step(_, ls) => {
                MoveKind::Step(ls.iter().map(|&l| alphabet.name(l).clone()).collect())
            }
            Key::HomogeneousStep(_, l, n) => MoveKind::HomogeneousStep(repeat(*l, *n)),
            Key::EquidepthStep(_, l, n) => MoveKind::EquidepthStep(repeat(*l, *n), m.depth),
        };
        Move {
            direction: m.key.direction(),
            kind,
            source: s.configurations()[src],
            target: s.configurations()[m.target],
        }
    }
}
