//! Distinguishing strategies read off refinement ranks, and their replay.
//!
//! A position removed in round `r` was refuted by an attack all of whose
//! answers lead to positions removed earlier, so following the stored attacks
//! always terminates.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde_json::{json, Value};

use super::refine::{Arena, Refinement};
use super::verify::{hh_isomorphic, kind_moves};
use super::{EquivalenceKind, Side, Violation};
use crate::structure::{ConfigStructure, Configuration};
use crate::transitions::{Direction, Move};

/// One attacker move and every legal defender answer to it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WitnessTree {
    pub side: Side,
    pub attack: Move,
    pub responses: Vec<WitnessBranch>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WitnessBranch {
    pub defence: Move,
    pub next: WitnessTree,
}

fn pick<'s>(
    side: Side,
    c: &'s ConfigStructure,
    d: &'s ConfigStructure,
) -> (&'s ConfigStructure, &'s ConfigStructure) {
    match side {
        Side::Left => (c, d),
        Side::Right => (d, c),
    }
}

impl WitnessTree {
    /// Number of attacker moves on the longest line of play.
    pub fn depth(&self) -> usize {
        1 + self
            .responses
            .iter()
            .map(|b| b.next.depth())
            .max()
            .unwrap_or(0)
    }

    /// Every line of play from the root to a position where the defender is
    /// stuck, as alternating attacker and defender moves tagged with the
    /// structure they are played on.
    pub fn lines(&self) -> Vec<Vec<(Side, Move)>> {
        let head = (self.side, self.attack.clone());
        if self.responses.is_empty() {
            return vec![vec![head]];
        }
        let mut out = Vec::new();
        for b in &self.responses {
            for tail in b.next.lines() {
                let mut line = vec![head.clone(), (self.side.other(), b.defence.clone())];
                line.extend(tail);
                out.push(line);
            }
        }
        out
    }

    /// Indented `ATTACK`/`DEFEND` listing.
    pub fn render(&self, c: &ConfigStructure, d: &ConfigStructure) -> String {
        let mut out = String::new();
        self.render_into(c, d, 0, &mut out);
        out
    }

    fn render_into(
        &self,
        c: &ConfigStructure,
        d: &ConfigStructure,
        indent: usize,
        out: &mut String,
    ) {
        let (att, def) = pick(self.side, c, d);
        let pad = "  ".repeat(indent);
        let _ = writeln!(out, "{pad}ATTACK {} {}", self.side, self.attack.render(att));
        if self.responses.is_empty() {
            let _ = writeln!(out, "{pad}  (no response)");
        }
        for b in &self.responses {
            let _ = writeln!(
                out,
                "{pad}  DEFEND {} {}",
                self.side.other(),
                b.defence.render(def)
            );
            b.next.render_into(c, d, indent + 2, out);
        }
    }

    pub fn to_json(&self, c: &ConfigStructure, d: &ConfigStructure) -> Value {
        let (att, def) = pick(self.side, c, d);
        let responses: Vec<Value> = self
            .responses
            .iter()
            .map(|b| json!({ "defence": b.defence.render(def), "next": b.next.to_json(c, d) }))
            .collect();
        json!({
            "side": self.side.name(),
            "attack": self.attack.render(att),
            "responses": responses,
        })
    }
}

pub(crate) fn extract<A: Arena>(arena: &A, r: &Refinement, p: usize) -> WitnessTree {
    let attack = r.attack[p].expect("every removed position keeps its refuting attack");
    let responses = arena
        .responses(p, attack)
        .into_iter()
        .map(|(j, q)| {
            debug_assert!(r.rank[q] < r.rank[p]);
            WitnessBranch {
                defence: arena.defence_move(p, attack, j),
                next: extract(arena, r, q),
            }
        })
        .collect();
    WitnessTree {
        side: attack.side,
        attack: arena.attack_move(p, attack),
        responses,
    }
}

/// Checks a strategy against the structures from the root position: every
/// attack must be legal, every legal answer must be covered, and every line
/// must end with the defender stuck. Uses only the public move functions.
pub fn replay(
    kind: EquivalenceKind,
    c: &ConfigStructure,
    d: &ConfigStructure,
    tree: &WitnessTree,
) -> Result<(), Violation> {
    let root = (Configuration::EMPTY, Configuration::EMPTY);
    if kind == EquivalenceKind::Hh {
        replay_hh(c, d, root, &BTreeMap::new(), tree)
    } else {
        replay_pairs(kind, c, d, root, tree)
    }
}

fn fail(message: String) -> Result<(), Violation> {
    Err(Violation { message })
}

fn sorted(mut v: Vec<Move>) -> Vec<Move> {
    v.sort();
    v.dedup();
    v
}

fn attacker_position(
    side: Side,
    pos: (Configuration, Configuration),
) -> (Configuration, Configuration) {
    match side {
        Side::Left => pos,
        Side::Right => (pos.1, pos.0),
    }
}

fn next_position(side: Side, attack: &Move, defence: &Move) -> (Configuration, Configuration) {
    match side {
        Side::Left => (attack.target, defence.target),
        Side::Right => (defence.target, attack.target),
    }
}

fn replay_pairs(
    kind: EquivalenceKind,
    c: &ConfigStructure,
    d: &ConfigStructure,
    pos: (Configuration, Configuration),
    tree: &WitnessTree,
) -> Result<(), Violation> {
    let (att, def) = pick(tree.side, c, d);
    let (a, b) = attacker_position(tree.side, pos);
    let legal = kind_moves(kind, att, a).map_err(|e| Violation {
        message: e.to_string(),
    })?;
    if tree.attack.source != a || !legal.contains(&tree.attack) {
        return fail(format!(
            "illegal attack {} from {}",
            tree.attack.render(att),
            att.render(a)
        ));
    }
    let answers = sorted(
        kind_moves(kind, def, b)
            .map_err(|e| Violation {
                message: e.to_string(),
            })?
            .into_iter()
            .filter(|m| m.answers(&tree.attack))
            .collect(),
    );
    let given = sorted(tree.responses.iter().map(|r| r.defence.clone()).collect());
    if answers != given {
        return fail(format!(
            "strategy covers {} of {} answers to {}",
            given.len(),
            answers.len(),
            tree.attack.render(att)
        ));
    }
    for r in &tree.responses {
        replay_pairs(
            kind,
            c,
            d,
            next_position(tree.side, &tree.attack, &r.defence),
            &r.next,
        )?;
    }
    Ok(())
}

type Iso = BTreeMap<usize, usize>;

fn only(set: Configuration) -> usize {
    set.iter().next().expect("single-event move")
}

fn replay_hh(
    c: &ConfigStructure,
    d: &ConfigStructure,
    pos: (Configuration, Configuration),
    f: &Iso,
    tree: &WitnessTree,
) -> Result<(), Violation> {
    let (att, def) = pick(tree.side, c, d);
    let (a, b) = attacker_position(tree.side, pos);
    let legal = kind_moves(EquivalenceKind::Hh, att, a).map_err(|e| Violation {
        message: e.to_string(),
    })?;
    if tree.attack.source != a || !legal.contains(&tree.attack) {
        return fail(format!(
            "illegal attack {} from {}",
            tree.attack.render(att),
            att.render(a)
        ));
    }
    // orient f from the attacker's side
    let g: Iso = match tree.side {
        Side::Left => f.clone(),
        Side::Right => f.iter().map(|(&l, &r)| (r, l)).collect(),
    };
    let e = only(tree.attack.events());
    let mut answers = Vec::new();
    for m in kind_moves(EquivalenceKind::Hh, def, b).map_err(|e| Violation {
        message: e.to_string(),
    })? {
        if !m.answers(&tree.attack) {
            continue;
        }
        let t = only(m.events());
        let mut h = g.clone();
        match tree.attack.direction {
            Direction::Forward => {
                h.insert(e, t);
            }
            Direction::Reverse => {
                if g.get(&e) != Some(&t) {
                    continue;
                }
                h.remove(&e);
            }
        }
        let oriented: Iso = match tree.side {
            Side::Left => h,
            Side::Right => h.iter().map(|(&l, &r)| (r, l)).collect(),
        };
        let (x, y) = next_position(tree.side, &tree.attack, &m);
        if hh_isomorphic(c, x, d, y, &oriented) {
            answers.push((m, oriented));
        }
    }
    answers.sort_by(|a, b| a.0.cmp(&b.0));
    let given = sorted(tree.responses.iter().map(|r| r.defence.clone()).collect());
    let legal_answers: Vec<Move> = answers.iter().map(|(m, _)| m.clone()).collect();
    if legal_answers != given {
        return fail(format!(
            "strategy covers {} of {} answers to {}",
            given.len(),
            legal_answers.len(),
            tree.attack.render(att)
        ));
    }
    for r in &tree.responses {
        let (_, h) = answers
            .iter()
            .find(|(m, _)| *m == r.defence)
            .expect("answer matched above");
        replay_hh(
            c,
            d,
            next_position(tree.side, &tree.attack, &r.defence),
            h,
            &r.next,
        )?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::equivalence::check;
    use crate::terms::translate_str;

    #[test]
    fn step_witness_for_auto_concurrency() {
        let (c, d) = (translate_str("a|a").unwrap(), translate_str("a.a").unwrap());
        let v = check(EquivalenceKind::Sb, &c, &d, true).unwrap();
        let w = v.witness.unwrap();
        assert_eq!(w.side, Side::Left);
        assert_eq!(w.attack.events().len(), 2);
        assert!(w.responses.is_empty());
        replay(EquivalenceKind::Sb, &c, &d, &w).unwrap();
        assert!(w.render(&c, &d).contains("(no response)"));
    }

    #[test]
    fn replay_rejects_tampered_strategy() {
        let (c, d) = (
            translate_str("a|b").unwrap(),
            translate_str("a.b+b.a").unwrap(),
        );
        let mut w = check(EquivalenceKind::Rb, &c, &d, true)
            .unwrap()
            .witness
            .unwrap();
        replay(EquivalenceKind::Rb, &c, &d, &w).unwrap();
        if w.responses.is_empty() {
            w.responses.push(WitnessBranch {
                defence: w.attack.clone(),
                next: w.clone(),
            });
        } else {
            w.responses.pop();
        }
        assert!(replay(EquivalenceKind::Rb, &c, &d, &w).is_err());
    }

    #[test]
    fn hh_witness_replays() {
        let (c, d) = (
            translate_str("a|b").unwrap(),
            translate_str("a.b+b.a").unwrap(),
        );
        let w = check(EquivalenceKind::Hh, &c, &d, true)
            .unwrap()
            .witness
            .unwrap();
        replay(EquivalenceKind::Hh, &c, &d, &w).unwrap();
        assert!(w.depth() >= 1);
    }
}
