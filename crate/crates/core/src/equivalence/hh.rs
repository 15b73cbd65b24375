//! Arena over isomorphism triples for hereditary history-preserving
//! bisimulation.
//!
//! A position is `(X, Y, f)` with `f : X -> Y` a bijection preserving labels
//! and preserving and reflecting causality. A forward answer must extend `f`
//! by the pair of added events; a reverse answer must remove the image (or
//! preimage) of the removed event, so that the restricted map is again a
//! bijection.

use std::collections::HashMap;

use super::refine::{Arena, Attack};
use super::tables::{Alphabet, Key, MoveFamily, MoveTable};
use super::{EventIsomorphism, Side};
use crate::error::{Error, Result};
use crate::structure::{ConfigStructure, Configuration, Limits};
use crate::transitions::{Direction, Move};

const UNMAPPED: u8 = u8::MAX;

type Map = Box<[u8]>;

pub(crate) struct HhGame<'a> {
    c: &'a ConfigStructure,
    d: &'a ConfigStructure,
    alphabet: Alphabet,
    left: MoveTable,
    right: MoveTable,
    triples: Vec<(usize, usize, Map)>,
    /// Per triple: answers to each left move, then to each right move.
    challenges: Vec<Vec<Vec<(usize, usize)>>>,
    dependents: Vec<Vec<usize>>,
    root: usize,
}

/// Causal shape of one configuration used to prune the isomorphism search.
struct Shape {
    /// Events sorted by depth.
    events: Vec<usize>,
    preds: Vec<usize>,
}

fn shape(s: &ConfigStructure, idx: usize) -> Shape {
    let x = s.configurations()[idx];
    let order = s.order(idx);
    let mut events: Vec<usize> = x.iter().collect();
    events.sort_by_key(|&e| (order.depth[e], e));
    let preds = (0..s.num_events())
        .map(|e| order.downsets[e].len().saturating_sub(1))
        .collect();
    Shape { events, preds }
}

struct Search<'s> {
    c: &'s ConfigStructure,
    d: &'s ConfigStructure,
    xi: usize,
    yi: usize,
    xs: &'s Shape,
    ys: &'s Shape,
    map: Vec<u8>,
    used: Vec<bool>,
    found: Vec<Map>,
    cap: usize,
}

impl Search<'_> {
    fn run(&mut self, pos: usize) -> Result<()> {
        if pos == self.xs.events.len() {
            if self.found.len() == self.cap {
                return Err(Error::Capacity {
                    what: "isomorphisms for one configuration pair",
                    actual: self.cap + 1,
                    limit: self.cap,
                });
            }
            self.found.push(self.map.clone().into_boxed_slice());
            return Ok(());
        }
        let e = self.xs.events[pos];
        let ox = self.c.order(self.xi);
        let oy = self.d.order(self.yi);
        for &t in &self.ys.events {
            if self.used[t]
                || self.c.label(e) != self.d.label(t)
                || ox.depth[e] != oy.depth[t]
                || self.xs.preds[e] != self.ys.preds[t]
            {
                continue;
            }
            let consistent = self.xs.events[..pos].iter().all(|&p| {
                let q = self.map[p] as usize;
                ox.lt(p, e) == oy.lt(q, t) && ox.lt(e, p) == oy.lt(t, q)
            });
            if !consistent {
                continue;
            }
            self.map[e] = t as u8;
            self.used[t] = true;
            self.run(pos + 1)?;
            self.used[t] = false;
            self.map[e] = UNMAPPED;
        }
        Ok(())
    }
}

impl<'a> HhGame<'a> {
    pub fn build(c: &'a ConfigStructure, d: &'a ConfigStructure, limits: &Limits) -> Result<Self> {
        let alphabet = Alphabet::new(&[c, d]);
        let families = [
            (Direction::Forward, MoveFamily::Single),
            (Direction::Reverse, MoveFamily::Single),
        ];
        let left = MoveTable::build(c, &alphabet, &families);
        let right = MoveTable::build(d, &alphabet, &families);

        let cshapes: Vec<Shape> = (0..c.num_configurations()).map(|i| shape(c, i)).collect();
        let dshapes: Vec<Shape> = (0..d.num_configurations()).map(|i| shape(d, i)).collect();
        let clabels: Vec<_> = c
            .configurations()
            .iter()
            .map(|&x| alphabet.multiset(c, x))
            .collect();
        let dlabels: Vec<_> = d
            .configurations()
            .iter()
            .map(|&y| alphabet.multiset(d, y))
            .collect();

        let mut triples = Vec::new();
        let mut index: HashMap<(usize, usize, Map), usize> = HashMap::new();
        for xi in 0..c.num_configurations() {
            for yi in 0..d.num_configurations() {
                if clabels[xi] != dlabels[yi] {
                    continue;
                }
                let mut search = Search {
                    c,
                    d,
                    xi,
                    yi,
                    xs: &cshapes[xi],
                    ys: &dshapes[yi],
                    map: vec![UNMAPPED; c.num_events()],
                    used: vec![false; d.num_events()],
                    found: Vec::new(),
                    cap: limits.max_isomorphisms,
                };
                search.run(0)?;
                for f in search.found {
                    if triples.len() == limits.max_pairs {
                        return Err(Error::Capacity {
                            what: "isomorphism triple count",
                            actual: triples.len() + 1,
                            limit: limits.max_pairs,
                        });
                    }
                    index.insert((xi, yi, f.clone()), triples.len());
                    triples.push((xi, yi, f));
                }
            }
        }
        let root = index[&(0, 0, vec![UNMAPPED; c.num_events()].into_boxed_slice())];

        let mut game = HhGame {
            c,
            d,
            alphabet,
            left,
            right,
            triples,
            challenges: Vec::new(),
            dependents: Vec::new(),
            root,
        };
        game.challenges = (0..game.triples.len())
            .map(|p| game.answers(p, &index))
            .collect();
        let mut dependents = vec![Vec::new(); game.triples.len()];
        for (p, ch) in game.challenges.iter().enumerate() {
            for &(_, q) in ch.iter().flatten() {
                dependents[q].push(p);
            }
        }
        for v in &mut dependents {
            v.sort_unstable();
            v.dedup();
        }
        game.dependents = dependents;
        Ok(game)
    }

    fn answers(
        &self,
        p: usize,
        index: &HashMap<(usize, usize, Map), usize>,
    ) -> Vec<Vec<(usize, usize)>> {
        let (x, y, ref f) = self.triples[p];
        let only = |set: Configuration| set.iter().next().expect("single event");
        let mut out = Vec::new();
        for m in &self.left.moves[x] {
            let e = only(m.events);
            let mut row = Vec::new();
            for j in self.right.group(y, &m.key) {
                let r = &self.right.moves[y][j];
                let t = only(r.events);
                let mut g = f.clone();
                match m.key {
                    Key::Single(Direction::Forward, _) => g[e] = t as u8,
                    _ if f[e] as usize == t => g[e] = UNMAPPED,
                    _ => continue,
                }
                if let Some(&q) = index.get(&(m.target, r.target, g)) {
                    row.push((j, q));
                }
            }
            out.push(row);
        }
        for m in &self.right.moves[y] {
            let t = only(m.events);
            let mut row = Vec::new();
            for j in self.left.group(x, &m.key) {
                let l = &self.left.moves[x][j];
                let e = only(l.events);
                let mut g = f.clone();
                match m.key {
                    Key::Single(Direction::Forward, _) => g[e] = t as u8,
                    _ if f[e] as usize == t => g[e] = UNMAPPED,
                    _ => continue,
                }
                if let Some(&q) = index.get(&(l.target, m.target, g)) {
                    row.push((j, q));
                }
            }
            out.push(row);
        }
        out
    }

    pub fn root(&self) -> usize {
        self.root
    }

    pub fn triple(&self, p: usize) -> (Configuration, Configuration, EventIsomorphism) {
        let (x, y, ref f) = self.triples[p];
        let iso = f
            .iter()
            .enumerate()
            .filter(|&(_, &t)| t != UNMAPPED)
            .map(|(e, &t)| (e, t as usize))
            .collect();
        (
            self.c.configurations()[x],
            self.d.configurations()[y],
            EventIsomorphism(iso),
        )
    }

    fn challenge(&self, p: usize, attack: Attack) -> &[(usize, usize)] {
        let offset = match attack.side {
            Side::Left => 0,
            Side::Right => self.left.moves[self.triples[p].0].len(),
        };
        &self.challenges[p][offset + attack.index]
    }
}

impl Arena for HhGame<'_> {
    fn len(&self) -> usize {
        self.triples.len()
    }

    fn initially_alive(&self, _p: usize) -> bool {
        true
    }

    fn refute(&self, p: usize, alive: &[bool]) -> Option<Attack> {
        let left_len = self.left.moves[self.triples[p].0].len();
        self.challenges[p]
            .iter()
            .position(|row| !row.iter().any(|&(_, q)| alive[q]))
            .map(|i| {
                if i < left_len {
                    Attack {
                        side: Side::Left,
                        index: i,
                    }
                } else {
                    Attack {
                        side: Side::Right,
                        index: i - left_len,
                    }
                }
            })
    }

    fn dependents(&self, p: usize, out: &mut Vec<usize>) {
        out.extend_from_slice(&self.dependents[p]);
    }

    fn configs(&self, p: usize) -> (usize, usize) {
        (self.triples[p].0, self.triples[p].1)
    }

    fn responses(&self, p: usize, attack: Attack) -> Vec<(usize, usize)> {
        self.challenge(p, attack).to_vec()
    }

    fn attack_move(&self, p: usize, attack: Attack) -> Move {
        let (x, y, _) = self.triples[p];
        match attack.side {
            Side::Left => {
                self.left
                    .to_move(self.c, &self.alphabet, x, &self.left.moves[x][attack.index])
            }
            Side::Right => self.right.to_move(
                self.d,
                &self.alphabet,
                y,
                &self.right.moves[y][attack.index],
            ),
        }
    }

    fn defence_move(&self, p: usize, attack: Attack, j: usize) -> Move {
        let (x, y, _) = self.triples[p];
        match attack.side {
            Side::Left => self
                .right
                .to_move(self.d, &self.alphabet, y, &self.right.moves[y][j]),
            Side::Right => self
                .left
                .to_move(self.c, &self.alphabet, x, &self.left.moves[x][j]),
        }
    }
}
