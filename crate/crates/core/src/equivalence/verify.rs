//! Independent re-check of a candidate relation against the transfer clauses,
//! built on the public move functions rather than the checker's tables.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use super::{CandidateRelation, EquivalenceKind};
use crate::error::Result;
use crate::order::causality;
use crate::structure::{ConfigStructure, Configuration};
use crate::transitions::{
    depth_singles, singles, special_steps, steps, Direction, Move, StepConstraint,
};

/// First transfer clause found broken, in words.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl std::error::Error for Violation {}

/// The moves the attacker may play from `x` in the game for `kind`.
pub(crate) fn kind_moves(
    kind: EquivalenceKind,
    s: &ConfigStructure,
    x: Configuration,
) -> Result<Vec<Move>> {
    use Direction::{Forward as F, Reverse as R};
    let mut out = Vec::new();
    match kind {
        EquivalenceKind::Ib => out.extend(singles(s, x, F)?),
        EquivalenceKind::Sb => out.extend(steps(s, x, F)?),
        EquivalenceKind::Db => out.extend(depth_singles(s, x, F)?),
        EquivalenceKind::Rb | EquivalenceKind::Hh => {
            out.extend(singles(s, x, F)?);
            out.extend(singles(s, x, R)?);
        }
        EquivalenceKind::Rsb => {
            out.extend(steps(s, x, F)?);
            out.extend(steps(s, x, R)?);
        }
        EquivalenceKind::Rhsb => {
            out.extend(singles(s, x, F)?);
            out.extend(special_steps(s, x, R, StepConstraint::Homogeneous)?);
        }
        EquivalenceKind::Rhesb => {
            out.extend(singles(s, x, F)?);
            out.extend(special_steps(
                s,
                x,
                R,
                StepConstraint::EquidepthHomogeneous,
            )?);
        }
        EquivalenceKind::Rdb => {
            out.extend(depth_singles(s, x, F)?);
            out.extend(depth_singles(s, x, R)?);
        }
    }
    Ok(out)
}

/// `f` is a bijection `x -> y` preserving labels and preserving and
/// reflecting causality.
pub(crate) fn hh_isomorphic(
    c: &ConfigStructure,
    x: Configuration,
    d: &ConfigStructure,
    y: Configuration,
    f: &BTreeMap<usize, usize>,
) -> bool {
    let (Ok(cx), Ok(dy)) = (causality(c, x), causality(d, y)) else {
        return false;
    };
    let domain: Configuration = f.keys().copied().collect();
    let image: Configuration = f.values().copied().collect();
    if domain != x || image != y || image.len() != f.len() {
        return false;
    }
    f.iter().all(|(&e, &t)| c.label(e) == d.label(t))
        && f.iter()
            .all(|(&e1, &t1)| f.iter().all(|(&e2, &t2)| cx.lt(e1, e2) == dy.lt(t1, t2)))
}

struct Moves<'s> {
    kind: EquivalenceKind,
    s: &'s ConfigStructure,
    cache: HashMap<Configuration, Vec<Move>>,
}

impl Moves<'_> {
    fn get(&mut self, x: Configuration) -> Result<&[Move]> {
        if !self.cache.contains_key(&x) {
            let m = kind_moves(self.kind, self.s, x)?;
            self.cache.insert(x, m);
        }
        Ok(&self.cache[&x])
    }
}

fn violation(message: String) -> Violation {
    Violation { message }
}

/// Whether `relation` contains the root and satisfies every transfer clause
/// of `kind` in both directions.
pub fn verify_relation(
    kind: EquivalenceKind,
    c: &ConfigStructure,
    d: &ConfigStructure,
    relation: &CandidateRelation,
) -> Result<(), Violation> {
    if kind == EquivalenceKind::Hh {
        return verify_hh(c, d, relation);
    }
    let pairs = &relation.pairs;
    if !pairs.contains(&(Configuration::EMPTY, Configuration::EMPTY)) {
        return Err(violation("root pair ({},{}) missing".into()));
    }
    let mut left = Moves {
        kind,
        s: c,
        cache: HashMap::new(),
    };
    let mut right = Moves {
        kind,
        s: d,
        cache: HashMap::new(),
    };
    let err = |e: crate::Error| violation(e.to_string());
    for &(x, y) in pairs {
        let lm = left.get(x).map_err(err)?.to_vec();
        let rm = right.get(y).map_err(err)?.to_vec();
        for m in &lm {
            if !rm
                .iter()
                .any(|n| n.answers(m) && pairs.contains(&(m.target, n.target)))
            {
                return Err(violation(format!(
                    "at ({}, {}): left {} has no related answer",
                    c.render(x),
                    d.render(y),
                    m.render(c)
                )));
            }
        }
        for n in &rm {
            if !lm
                .iter()
                .any(|m| m.answers(n) && pairs.contains(&(m.target, n.target)))
            {
                return Err(violation(format!(
                    "at ({}, {}): right {} has no related answer",
                    c.render(x),
                    d.render(y),
                    n.render(d)
                )));
            }
        }
    }
    Ok(())
}

type Triple = (Configuration, Configuration, BTreeMap<usize, usize>);

fn verify_hh(
    c: &ConfigStructure,
    d: &ConfigStructure,
    relation: &CandidateRelation,
) -> Result<(), Violation> {
    let triples: BTreeSet<Triple> = relation
        .triples
        .iter()
        .map(|(x, y, f)| (*x, *y, f.0.iter().copied().collect()))
        .collect();
    if !triples.contains(&(Configuration::EMPTY, Configuration::EMPTY, BTreeMap::new())) {
        return Err(violation("root triple missing".into()));
    }
    let err = |e: crate::Error| violation(e.to_string());
    for (x, y, f) in &triples {
        let here = format!("at ({}, {}, {:?})", c.render(*x), d.render(*y), f);
        if !hh_isomorphic(c, *x, d, *y, f) {
            return Err(violation(format!("{here}: not an isomorphism")));
        }
        let inverse: BTreeMap<usize, usize> = f.iter().map(|(&l, &r)| (r, l)).collect();
        let lm = kind_moves(EquivalenceKind::Hh, c, *x).map_err(err)?;
        let rm = kind_moves(EquivalenceKind::Hh, d, *y).map_err(err)?;
        for m in &lm {
            let e = m.events().iter().next().expect("single");
            let ok = match m.direction {
                Direction::Forward => rm.iter().any(|n| {
                    let mut g = f.clone();
                    g.insert(e, n.events().iter().next().expect("single"));
                    n.answers(m) && triples.contains(&(m.target, n.target, g))
                }),
                Direction::Reverse => {
                    let mut g = f.clone();
                    g.remove(&e);
                    let y2 = y.without(f[&e]);
                    rm.iter().any(|n| n.answers(m) && n.target == y2)
                        && triples.contains(&(m.target, y2, g))
                }
            };
            if !ok {
                return Err(violation(format!(
                    "{here}: left {} has no related answer",
                    m.render(c)
                )));
            }
        }
        for n in &rm {
            let t = n.events().iter().next().expect("single");
            let ok = match n.direction {
                Direction::Forward => lm.iter().any(|m| {
                    let mut g = f.clone();
                    g.insert(m.events().iter().next().expect("single"), t);
                    m.answers(n) && triples.contains(&(m.target, n.target, g))
                }),
                Direction::Reverse => {
                    let e = inverse[&t];
                    let mut g = f.clone();
                    g.remove(&e);
                    let x2 = x.without(e);
                    lm.iter().any(|m| m.answers(n) && m.target == x2)
                        && triples.contains(&(x2, n.target, g))
                }
            };
            if !ok {
                return Err(violation(format!(
                    "{here}: right {} has no related answer",
                    n.render(d)
                )));
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::equivalence::maximal_bisimulation;
    use crate::terms::translate_str;

    fn identity(kind: EquivalenceKind, s: &ConfigStructure) -> CandidateRelation {
        CandidateRelation {
            kind,
            pairs: s.configurations().iter().map(|&x| (x, x)).collect(),
            triples: Vec::new(),
            rounds: 0,
            initial_size: 0,
        }
    }

    #[test]
    fn identity_is_a_reverse_bisimulation() {
        let s = translate_str("(a|(b+c))+(a|b)").unwrap();
        for k in [
            EquivalenceKind::Rb,
            EquivalenceKind::Rsb,
            EquivalenceKind::Rdb,
        ] {
            verify_relation(k, &s, &s, &identity(k, &s)).unwrap();
        }
    }

    #[test]
    fn fixpoints_certify_themselves() {
        let (c, d) = (translate_str("a|a").unwrap(), translate_str("a.a").unwrap());
        for k in [EquivalenceKind::Ib, EquivalenceKind::Rb] {
            let r = maximal_bisimulation(k, &c, &d).unwrap();
            verify_relation(k, &c, &d, &r).unwrap();
        }
        let s = translate_str("a|b.a").unwrap();
        let r = maximal_bisimulation(EquivalenceKind::Hh, &s, &s).unwrap();
        verify_relation(EquivalenceKind::Hh, &s, &s, &r).unwrap();
    }

    #[test]
    fn broken_relation_is_reported() {
        let (c, d) = (translate_str("a|a").unwrap(), translate_str("a.a").unwrap());
        let r = maximal_bisimulation(EquivalenceKind::Ib, &c, &d).unwrap();
        assert!(verify_relation(EquivalenceKind::Sb, &c, &d, &r).is_err());
        let mut missing = r.clone();
        missing
            .pairs
            .remove(&(Configuration::EMPTY, Configuration::EMPTY));
        assert!(verify_relation(EquivalenceKind::Ib, &c, &d, &missing).is_err());
    }
}
