//! Greatest-fixpoint checkers for nine forward/reverse bisimulations.
//!
//! Every checker starts from the full relation (all configuration pairs, or
//! for HH all label- and order-preserving isomorphism triples) and deletes
//! elements that violate a transfer clause until nothing changes. A pair of
//! structures is equivalent iff the root survives. When it does not, the
//! deletion rounds double as ranks from which an attacker strategy is read
//! off.
//!
//! HH transfer clauses use `l_D` restricted to `Y` as the codomain labelling
//! of the isomorphism (the only reading that type-checks), and the reverse
//! clause for the right-hand side is applied symmetrically to the left one.

mod hh;
mod pairs;
mod refine;
mod tables;
mod verify;
mod witness;

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::structure::{ConfigStructure, Configuration, Limits};
use crate::transitions::Direction;
use crate::validate::validate_with;

use hh::HhGame;
use pairs::PairGame;
use refine::{refine, Arena, Refinement};
use tables::MoveFamily;

pub use verify::{verify_relation, Violation};
pub use witness::{replay, WitnessBranch, WitnessTree};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum EquivalenceKind {
    Ib,
    Sb,
    Db,
    Rb,
    Rsb,
    Rhsb,
    Rhesb,
    Rdb,
    Hh,
}

impl EquivalenceKind {
    pub const ALL: [EquivalenceKind; 9] = [
        EquivalenceKind::Ib,
        EquivalenceKind::Sb,
        EquivalenceKind::Db,
        EquivalenceKind::Rb,
        EquivalenceKind::Rsb,
        EquivalenceKind::Rhsb,
        EquivalenceKind::Rhesb,
        EquivalenceKind::Rdb,
        EquivalenceKind::Hh,
    ];

    pub fn name(self) -> &'static str {
        match self {
            EquivalenceKind::Ib => "ib",
            EquivalenceKind::Sb => "sb",
            EquivalenceKind::Db => "db",
            EquivalenceKind::Rb => "rb",
            EquivalenceKind::Rsb => "rsb",
            EquivalenceKind::Rhsb => "rhsb",
            EquivalenceKind::Rhesb => "rhesb",
            EquivalenceKind::Rdb => "rdb",
            EquivalenceKind::Hh => "hh",
        }
    }

    /// Whether the defender must also match reverse moves.
    pub fn uses_reverse(self) -> bool {
        !matches!(
            self,
            EquivalenceKind::Ib | EquivalenceKind::Sb | EquivalenceKind::Db
        )
    }

    pub(crate) fn families(self) -> Vec<(Direction, MoveFamily)> {
        use Direction::{Forward as F, Reverse as R};
        use MoveFamily::*;
        match self {
            EquivalenceKind::Ib => vec![(F, Single)],
            EquivalenceKind::Sb => vec![(F, Step)],
            EquivalenceKind::Db => vec![(F, DepthSingle)],
            EquivalenceKind::Rb | EquivalenceKind::Hh => vec![(F, Single), (R, Single)],
            EquivalenceKind::Rsb => vec![(F, Step), (R, Step)],
            EquivalenceKind::Rhsb => vec![(F, Single), (R, HomogeneousStep)],
            EquivalenceKind::Rhesb => vec![(F, Single), (R, EquidepthStep)],
            EquivalenceKind::Rdb => vec![(F, DepthSingle), (R, DepthSingle)],
        }
    }
}

impl fmt::Display for EquivalenceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for EquivalenceKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let lower = s.to_ascii_lowercase();
        EquivalenceKind::ALL
            .into_iter()
            .find(|k| k.name() == lower)
            .ok_or_else(|| format!("unknown equivalence `{s}` (expected one of ib, sb, db, rb, rsb, rhsb, rhesb, rdb, hh)"))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Side {
    Left,
    Right,
}

impl Side {
    pub fn other(self) -> Side {
        match self {
            Side::Left => Side::Right,
            Side::Right => Side::Left,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Side::Left => "left",
            Side::Right => "right",
        }
    }
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Copy, Debug)]
pub struct CheckOptions {
    pub limits: Limits,
    /// Start reverse kinds from label-multiset-matched pairs only. The
    /// fixpoint is the same either way; this only saves work.
    pub prefilter: bool,
    pub witness: bool,
}

impl Default for CheckOptions {
    fn default() -> Self {
        CheckOptions {
            limits: Limits::default(),
            prefilter: true,
            witness: false,
        }
    }
}

/// Bijection between two configurations, as sorted (left event, right event)
/// pairs of event indices.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EventIsomorphism(pub Vec<(usize, usize)>);

impl EventIsomorphism {
    pub fn empty() -> Self {
        EventIsomorphism(Vec::new())
    }

    pub fn get(&self, e: usize) -> Option<usize> {
        self.0.iter().find(|&&(l, _)| l == e).map(|&(_, r)| r)
    }

    pub fn inverse_get(&self, e: usize) -> Option<usize> {
        self.0.iter().find(|&&(_, r)| r == e).map(|&(l, _)| l)
    }

    pub fn domain(&self) -> Configuration {
        self.0.iter().map(|&(l, _)| l).collect()
    }

    pub fn image(&self) -> Configuration {
        self.0.iter().map(|&(_, r)| r).collect()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn with(&self, l: usize, r: usize) -> Self {
        let mut v = self.0.clone();
        v.push((l, r));
        v.sort_unstable();
        EventIsomorphism(v)
    }

    pub fn without_left(&self, l: usize) -> Self {
        EventIsomorphism(self.0.iter().copied().filter(|&(a, _)| a != l).collect())
    }

    pub fn render(&self, c: &ConfigStructure, d: &ConfigStructure) -> String {
        let parts: Vec<String> = self
            .0
            .iter()
            .map(|&(l, r)| format!("{}->{}", c.event_id(l), d.event_id(r)))
            .collect();
        format!("{{{}}}", parts.join(","))
    }
}

/// A relation between the configurations of two structures. For HH the
/// triples carry the isomorphism; `pairs` is then their projection.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CandidateRelation {
    pub kind: EquivalenceKind,
    pub pairs: BTreeSet<(Configuration, Configuration)>,
    pub triples: Vec<(Configuration, Configuration, EventIsomorphism)>,
    pub rounds: usize,
    pub initial_size: usize,
}

impl CandidateRelation {
    pub fn contains(&self, x: Configuration, y: Configuration) -> bool {
        self.pairs.contains(&(x, y))
    }

    pub fn contains_root(&self) -> bool {
        self.contains(Configuration::EMPTY, Configuration::EMPTY)
    }

    pub fn len(&self) -> usize {
        if self.kind == EquivalenceKind::Hh {
            self.triples.len()
        } else {
            self.pairs.len()
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Verdict {
    pub kind: EquivalenceKind,
    pub equivalent: bool,
    pub rounds: usize,
    pub pairs_initial: usize,
    pub pairs_final: usize,
    pub witness: Option<WitnessTree>,
}

impl Verdict {
    /// `{kind, equivalent, rounds, pairsInitial, pairsFinal, witness?}`.
    pub fn to_json(&self, c: &ConfigStructure, d: &ConfigStructure) -> Value {
        let mut v = json!({
            "kind": self.kind.name(),
            "equivalent": self.equivalent,
            "rounds": self.rounds,
            "pairsInitial": self.pairs_initial,
            "pairsFinal": self.pairs_final,
        });
        if let Some(w) = &self.witness {
            v["witness"] = w.to_json(c, d);
        }
        v
    }
}

fn prepare(c: &ConfigStructure, d: &ConfigStructure, limits: &Limits) -> Result<()> {
    for (side, s) in [("left", c), ("right", d)] {
        limits.check(s)?;
        let report = validate_with(s, limits)?;
        if !report.stable() {
            return Err(Error::NotStable(format!("{side} input")));
        }
    }
    let pairs = c
        .num_configurations()
        .saturating_mul(d.num_configurations());
    if pairs > limits.max_pairs {
        return Err(Error::Capacity {
            what: "configuration pair count",
            actual: pairs,
            limit: limits.max_pairs,
        });
    }
    Ok(())
}

/// Root position: both structures are stable, so `∅` is configuration 0.
const ROOT: usize = 0;

pub fn maximal_bisimulation(
    kind: EquivalenceKind,
    c: &ConfigStructure,
    d: &ConfigStructure,
) -> Result<CandidateRelation> {
    maximal_bisimulation_with(kind, c, d, &CheckOptions::default())
}

pub fn maximal_bisimulation_with(
    kind: EquivalenceKind,
    c: &ConfigStructure,
    d: &ConfigStructure,
    options: &CheckOptions,
) -> Result<CandidateRelation> {
    prepare(c, d, &options.limits)?;
    if kind == EquivalenceKind::Hh {
        let game = HhGame::build(c, d, &options.limits)?;
        let r = refine(&game);
        let mut pairs = BTreeSet::new();
        let mut triples = Vec::new();
        for p in (0..game.len()).filter(|&p| r.alive[p]) {
            let (x, y, f) = game.triple(p);
            pairs.insert((x, y));
            triples.push((x, y, f));
        }
        triples.sort();
        return Ok(CandidateRelation {
            kind,
            pairs,
            triples,
            rounds: r.rounds,
            initial_size: r.initial,
        });
    }
    let game = PairGame::build(kind, c, d);
    let arena = game.arena(options.prefilter && kind.uses_reverse());
    let r = refine(&arena);
    let (cc, dc) = (c.configurations(), d.configurations());
    let pairs = (0..arena.len())
        .filter(|&p| r.alive[p])
        .map(|p| {
            let (x, y) = arena.configs(p);
            (cc[x], dc[y])
        })
        .collect();
    Ok(CandidateRelation {
        kind,
        pairs,
        triples: Vec::new(),
        rounds: r.rounds,
        initial_size: r.initial,
    })
}

pub fn check(
    kind: EquivalenceKind,
    c: &ConfigStructure,
    d: &ConfigStructure,
    want_witness: bool,
) -> Result<Verdict> {
    let options = CheckOptions {
        witness: want_witness,
        ..CheckOptions::default()
    };
    check_with(kind, c, d, &options)
}

fn verdict<A: Arena>(
    kind: EquivalenceKind,
    arena: &A,
    r: &Refinement,
    root: usize,
    want_witness: bool,
) -> Verdict {
    let equivalent = r.alive[root];
    Verdict {
        kind,
        equivalent,
        rounds: r.rounds,
        pairs_initial: r.initial,
        pairs_final: r.surviving(),
        witness: (want_witness && !equivalent).then(|| witness::extract(arena, r, root)),
    }
}

pub fn check_with(
    kind: EquivalenceKind,
    c: &ConfigStructure,
    d: &ConfigStructure,
    options: &CheckOptions,
) -> Result<Verdict> {
    prepare(c, d, &options.limits)?;
    if kind == EquivalenceKind::Hh {
        let game = HhGame::build(c, d, &options.limits)?;
        let r = refine(&game);
        return Ok(verdict(kind, &game, &r, game.root(), options.witness));
    }
    let game = PairGame::build(kind, c, d);
    let filtered = options.prefilter && kind.uses_reverse();
    let arena = game.arena(filtered);
    let r = refine(&arena);
    let root = arena.position(ROOT, ROOT);
    let v = verdict(kind, &arena, &r, root, options.witness && !filtered);
    if !options.witness || v.equivalent || !filtered {
        return Ok(v);
    }
    // Strategies need every losing position ranked, including those the
    // label filter removed up front.
    let full = game.arena(false);
    let rf = refine(&full);
    let witness = witness::extract(&full, &rf, root);
    Ok(Verdict {
        witness: Some(witness),
        ..v
    })
}

/// All nine verdicts, in the order of [`EquivalenceKind::ALL`].
pub fn check_all(
    c: &ConfigStructure,
    d: &ConfigStructure,
    want_witness: bool,
) -> Result<Vec<Verdict>> {
    EquivalenceKind::ALL
        .into_iter()
        .map(|k| check(k, c, d, want_witness))
        .collect()
}
