//! Arena over configuration pairs, used by every kind except HH.

use super::refine::{Arena, Attack};
use super::tables::{Alphabet, Lab, MoveTable};
use super::{EquivalenceKind, Side};
use crate::structure::ConfigStructure;
use crate::transitions::Move;

/// Move tables of both structures for one equivalence kind.
pub(crate) struct PairGame<'a> {
    c: &'a ConfigStructure,
    d: &'a ConfigStructure,
    alphabet: Alphabet,
    left: MoveTable,
    right: MoveTable,
}

impl<'a> PairGame<'a> {
    pub fn build(kind: EquivalenceKind, c: &'a ConfigStructure, d: &'a ConfigStructure) -> Self {
        let alphabet = Alphabet::new(&[c, d]);
        let families = kind.families();
        let left = MoveTable::build(c, &alphabet, &families);
        let right = MoveTable::build(d, &alphabet, &families);
        PairGame {
            c,
            d,
            alphabet,
            left,
            right,
        }
    }

    /// With `prefilter`, only pairs with equal label multisets start alive.
    pub fn arena(&self, prefilter: bool) -> PairArena<'_> {
        let labels = prefilter.then(|| {
            let of = |s: &ConfigStructure| -> Vec<Vec<Lab>> {
                s.configurations()
                    .iter()
                    .map(|&x| self.alphabet.multiset(s, x))
                    .collect()
            };
            (of(self.c), of(self.d))
        });
        PairArena {
            game: self,
            width: self.right.moves.len(),
            labels,
        }
    }
}

pub(crate) struct PairArena<'g> {
    game: &'g PairGame<'g>,
    width: usize,
    labels: Option<(Vec<Vec<Lab>>, Vec<Vec<Lab>>)>,
}

impl PairArena<'_> {
    pub fn position(&self, x: usize, y: usize) -> usize {
        x * self.width + y
    }

    /// (attacker table, defender table, attacker structure, defender structure)
    fn sides(&self, side: Side) -> (&MoveTable, &MoveTable, &ConfigStructure, &ConfigStructure) {
        let g = self.game;
        match side {
            Side::Left => (&g.left, &g.right, g.c, g.d),
            Side::Right => (&g.right, &g.left, g.d, g.c),
        }
    }

    fn oriented(&self, side: Side, attacker: usize, defender: usize) -> usize {
        match side {
            Side::Left => self.position(attacker, defender),
            Side::Right => self.position(defender, attacker),
        }
    }

    fn split(&self, side: Side, p: usize) -> (usize, usize) {
        let (x, y) = self.configs(p);
        match side {
            Side::Left => (x, y),
            Side::Right => (y, x),
        }
    }
}

impl Arena for PairArena<'_> {
    fn len(&self) -> usize {
        self.game.left.moves.len() * self.width
    }

    fn initially_alive(&self, p: usize) -> bool {
        match &self.labels {
            None => true,
            Some((l, r)) => {
                let (x, y) = self.configs(p);
                l[x] == r[y]
            }
        }
    }

    fn refute(&self, p: usize, alive: &[bool]) -> Option<Attack> {
        for side in [Side::Left, Side::Right] {
            let (att, def, _, _) = self.sides(side);
            let (a, d) = self.split(side, p);
            for (index, mv) in att.moves[a].iter().enumerate() {
                let answered = def
                    .group(d, &mv.key)
                    .any(|j| alive[self.oriented(side, mv.target, def.moves[d][j].target)]);
                if !answered {
                    return Some(Attack { side, index });
                }
            }
        }
        None
    }

    fn dependents(&self, p: usize, out: &mut Vec<usize>) {
        let (x, y) = self.configs(p);
        for &px in &self.game.left.neighbours[x] {
            for &py in &self.game.right.neighbours[y] {
                out.push(self.position(px, py));
            }
        }
    }

    fn configs(&self, p: usize) -> (usize, usize) {
        (p / self.width, p % self.width)
    }

    fn responses(&self, p: usize, attack: Attack) -> Vec<(usize, usize)> {
        let (att, def, _, _) = self.sides(attack.side);
        let (a, d) = self.split(attack.side, p);
        let mv = &att.moves[a][attack.index];
        def.group(d, &mv.key)
            .map(|j| {
                (
                    j,
                    self.oriented(attack.side, mv.target, def.moves[d][j].target),
                )
            })
            .collect()
    }

    fn attack_move(&self, p: usize, attack: Attack) -> Move {
        let (att, _, s, _) = self.sides(attack.side);
        let (a, _) = self.split(attack.side, p);
        att.to_move(s, &self.game.alphabet, a, &att.moves[a][attack.index])
    }

    fn defence_move(&self, p: usize, attack: Attack, j: usize) -> Move {
        let (_, def, _, s) = self.sides(attack.side);
        let (_, d) = self.split(attack.side, p);
        def.to_move(s, &self.game.alphabet, d, &def.moves[d][j])
    }
}
