//! Round-based greatest-fixpoint refinement over an abstract game arena.
//!
//! Round `r` removes every live position that some attack refutes against
//! the relation left by round `r - 1`. The round number is the position's
//! rank; the attack found at that point is kept for strategy extraction.

use super::Side;
use crate::transitions::Move;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) struct Attack {
    pub side: Side,
    /// Index of the attacker's move in its table row.
    pub index: usize,
}

pub(crate) trait Arena {
    fn len(&self) -> usize;

    fn initially_alive(&self, p: usize) -> bool;

    /// First attack (in canonical order) that no defender move survives.
    fn refute(&self, p: usize, alive: &[bool]) -> Option<Attack>;

    /// Positions whose status may depend on `p`.
    fn dependents(&self, p: usize, out: &mut Vec<usize>);

    /// Configuration indices (left, right) of a position.
    fn configs(&self, p: usize) -> (usize, usize);

    /// Legal answers to `attack`: defender move index and next position.
    fn responses(&self, p: usize, attack: Attack) -> Vec<(usize, usize)>;

    /// The attacker's move, on the structure of `attack.side`.
    fn attack_move(&self, p: usize, attack: Attack) -> Move;

    /// Defender move `j` answering `attack`, on the other structure.
    fn defence_move(&self, p: usize, attack: Attack, j: usize) -> Move;
}

pub(crate) const ALIVE: u32 = u32::MAX;

pub(crate) struct Refinement {
    pub alive: Vec<bool>,
    /// 0: never in the relation; `ALIVE`: in the fixpoint; else the round of removal.
    pub rank: Vec<u32>,
    pub attack: Vec<Option<Attack>>,
    pub rounds: usize,
    pub initial: usize,
}

impl Refinement {
    pub fn surviving(&self) -> usize {
        self.alive.iter().filter(|&&a| a).count()
    }
}

pub(crate) fn refine<A: Arena>(arena: &A) -> Refinement {
    let n = arena.len();
    let mut alive: Vec<bool> = (0..n).map(|p| arena.initially_alive(p)).collect();
    let mut rank: Vec<u32> = alive.iter().map(|&a| if a { ALIVE } else { 0 }).collect();
    let mut attack = vec![None; n];
    let initial = alive.iter().filter(|&&a| a).count();

    let mut dirty: Vec<usize> = (0..n).filter(|&p| alive[p]).collect();
    let mut marked = vec![false; n];
    let mut buf = Vec::new();
    let mut rounds = 0;
    loop {
        let removed: Vec<(usize, Attack)> = dirty
            .iter()
            .filter(|&&p| alive[p])
            .filter_map(|&p| arena.refute(p, &alive).map(|a| (p, a)))
            .collect();
        if removed.is_empty() {
            break;
        }
        rounds += 1;
        for &(p, a) in &removed {
            alive[p] = false;
            rank[p] = rounds as u32;
            attack[p] = Some(a);
        }
        dirty.clear();
        for &(p, _) in &removed {
            buf.clear();
            arena.dependents(p, &mut buf);
            for &q in &buf {
                if alive[q] && !marked[q] {
                    marked[q] = true;
                    dirty.push(q);
                }
            }
        }
        for &q in &dirty {
            marked[q] = false;
        }
        dirty.sort_unstable();
    }
    Refinement {
        alive,
        rank,
        attack,
        rounds,
        initial,
    }
}
