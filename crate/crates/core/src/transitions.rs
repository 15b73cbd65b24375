//! Forward and reverse moves between configurations.
//!
//! Every move kind is computed on the larger of its two configurations: step
//! events must be pairwise concurrent there, and depth-indexed moves carry the
//! depth of the event in it. A reverse move is the inverse of the forward move
//! of the same kind.

use std::fmt;

use crate::error::Result;
use crate::structure::{ConfigStructure, Configuration, EventSet, Label, LabelMultiset};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Direction {
    Forward,
    Reverse,
}

impl Direction {
    pub fn tag(self) -> &'static str {
        match self {
            Direction::Forward => "FWD",
            Direction::Reverse => "REV",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum MoveKind {
    Single(Label),
    Step(LabelMultiset),
    /// Single move tagged with the event's depth.
    DepthSingle(Label, usize),
    /// Step over one distinct label.
    HomogeneousStep(LabelMultiset),
    /// Homogeneous step whose events share one depth (the second field).
    EquidepthStep(LabelMultiset, usize),
}

impl MoveKind {
    pub fn tag(&self) -> &'static str {
        match self {
            MoveKind::Single(_) => "single",
            MoveKind::Step(_) => "step",
            MoveKind::DepthSingle(..) => "dsingle",
            MoveKind::HomogeneousStep(_) => "hstep",
            MoveKind::EquidepthStep(..) => "ehstep",
        }
    }

    /// Whether a defender may answer `self` with `other`. Equidepth steps
    /// are matched on their label multiset only.
    pub fn matches(&self, other: &MoveKind) -> bool {
        match (self, other) {
            (MoveKind::EquidepthStep(a, _), MoveKind::EquidepthStep(b, _)) => a == b,
            _ => self == other,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Move {
    pub direction: Direction,
    pub kind: MoveKind,
    pub source: Configuration,
    pub target: Configuration,
}

impl Move {
    /// Events added (forward) or removed (reverse).
    pub fn events(&self) -> EventSet {
        match self.direction {
            Direction::Forward => self.target.difference(self.source),
            Direction::Reverse => self.source.difference(self.target),
        }
    }

    pub fn answers(&self, attack: &Move) -> bool {
        self.direction == attack.direction && self.kind.matches(&attack.kind)
    }

    /// `FWD|REV kind=<tag> label(s)=... [k=...] target=[...]`, ASCII only.
    pub fn render(&self, s: &ConfigStructure) -> String {
        RenderedMove(self, s).to_string()
    }
}

struct RenderedMove<'a>(&'a Move, &'a ConfigStructure);

impl fmt::Display for RenderedMove<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let RenderedMove(m, s) = self;
        write!(f, "{} kind={} ", m.direction.tag(), m.kind.tag())?;
        match &m.kind {
            MoveKind::Single(a) => write!(f, "label={a}")?,
            MoveKind::DepthSingle(a, k) => write!(f, "label={a} k={k}")?,
            MoveKind::Step(ls) | MoveKind::HomogeneousStep(ls) => write!(f, "labels={ls}")?,
            MoveKind::EquidepthStep(ls, k) => write!(f, "labels={ls} k={k}")?,
        }
        let ids: Vec<&str> = m.target.iter().map(|e| s.event_id(e).as_str()).collect();
        write!(f, " target=[{}]", ids.join(","))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StepConstraint {
    Homogeneous,
    EquidepthHomogeneous,
}

/// Raw step: the moved events, the other configuration's index, and the
/// index of the larger configuration (where concurrency and depth live).
#[derive(Clone, Copy, Debug)]
pub(crate) struct RawStep {
    pub events: EventSet,
    pub target: usize,
    pub upper: usize,
}

/// Single-event moves from configuration `idx`.
pub(crate) fn raw_singles(s: &ConfigStructure, idx: usize, dir: Direction) -> Vec<RawStep> {
    let x = s.configurations()[idx];
    let candidates = match dir {
        Direction::Forward => s.all_events().difference(x),
        Direction::Reverse => x,
    };
    candidates
        .iter()
        .filter_map(|e| {
            let y = match dir {
                Direction::Forward => x.with(e),
                Direction::Reverse => x.without(e),
            };
            s.index_of(y).map(|t| RawStep {
                events: EventSet::singleton(e),
                target: t,
                upper: if dir == Direction::Forward { t } else { idx },
            })
        })
        .collect()
}

/// Step moves (non-empty antichains) from configuration `idx`.
pub(crate) fn raw_steps(s: &ConfigStructure, idx: usize, dir: Direction) -> Vec<RawStep> {
    let x = s.configurations()[idx];
    let mut out = Vec::new();
    for (j, &y) in s.configurations().iter().enumerate() {
        let (lower, upper, upper_idx) = match dir {
            Direction::Forward => (x, y, j),
            Direction::Reverse => (y, x, idx),
        };
        if !lower.is_proper_subset(upper) {
            continue;
        }
        let moved = upper.difference(lower);
        if s.order(upper_idx).antichain(moved) {
            out.push(RawStep {
                events: moved,
                target: j,
                upper: upper_idx,
            });
        }
    }
    out
}

fn labels_of(s: &ConfigStructure, set: EventSet) -> LabelMultiset {
    s.label_multiset(set)
}

/// Single-event moves labelled by the moved event.
pub fn singles(s: &ConfigStructure, x: Configuration, dir: Direction) -> Result<Vec<Move>> {
    let idx = s.require(x)?;
    let configs = s.configurations();
    Ok(raw_singles(s, idx, dir)
        .into_iter()
        .map(|r| Move {
            direction: dir,
            kind: MoveKind::Single(s.label(r.events.iter().next().unwrap()).clone()),
            source: x,
            target: configs[r.target],
        })
        .collect())
}

/// Steps: non-empty sets of pairwise concurrent events, labelled by their
/// label multiset.
pub fn steps(s: &ConfigStructure, x: Configuration, dir: Direction) -> Result<Vec<Move>> {
    let idx = s.require(x)?;
    let configs = s.configurations();
    Ok(raw_steps(s, idx, dir)
        .into_iter()
        .map(|r| Move {
            direction: dir,
            kind: MoveKind::Step(labels_of(s, r.events)),
            source: x,
            target: configs[r.target],
        })
        .collect())
}

/// Single moves tagged with the depth of the moved event, taken in the larger
/// configuration.
pub fn depth_singles(s: &ConfigStructure, x: Configuration, dir: Direction) -> Result<Vec<Move>> {
    let idx = s.require(x)?;
    let configs = s.configurations();
    Ok(raw_singles(s, idx, dir)
        .into_iter()
        .map(|r| {
            let e = r.events.iter().next().unwrap();
            Move {
                direction: dir,
                kind: MoveKind::DepthSingle(s.label(e).clone(), s.order(r.upper).depth[e]),
                source: x,
                target: configs[r.target],
            }
        })
        .collect())
}

/// Common depth of `set` inside configuration `upper`, if there is one.
pub(crate) fn common_depth(s: &ConfigStructure, upper: usize, set: EventSet) -> Option<usize> {
    let depth = &s.order(upper).depth;
    let mut it = set.iter().map(|e| depth[e]);
    let k = it.next()?;
    it.all(|d| d == k).then_some(k)
}

/// Steps restricted to one distinct label, and optionally to one depth.
pub fn special_steps(
    s: &ConfigStructure,
    x: Configuration,
    dir: Direction,
    constraint: StepConstraint,
) -> Result<Vec<Move>> {
    let idx = s.require(x)?;
    let configs = s.configurations();
    Ok(raw_steps(s, idx, dir)
        .into_iter()
        .filter_map(|r| {
            let labels = labels_of(s, r.events);
            if !labels.is_homogeneous() {
                return None;
            }
            let kind = match constraint {
                StepConstraint::Homogeneous => MoveKind::HomogeneousStep(labels),
                StepConstraint::EquidepthHomogeneous => {
                    MoveKind::EquidepthStep(labels, common_depth(s, r.upper, r.events)?)
                }
            };
            Some(Move {
                direction: dir,
                kind,
                source: x,
                target: configs[r.target],
            })
        })
        .collect())
}

/// Every move of every kind from `x`, forward moves first.
pub fn menu(s: &ConfigStructure, x: Configuration) -> Result<Vec<Move>> {
    let mut out = Vec::new();
    for dir in [Direction::Forward, Direction::Reverse] {
        out.extend(singles(s, x, dir)?);
        out.extend(steps(s, x, dir)?);
        out.extend(depth_singles(s, x, dir)?);
        out.extend(special_steps(s, x, dir, StepConstraint::Homogeneous)?);
        out.extend(special_steps(
            s,
            x,
            dir,
            StepConstraint::EquidepthHomogeneous,
        )?);
    }
    Ok(out)
}
