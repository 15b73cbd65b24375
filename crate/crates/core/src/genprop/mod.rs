//! Random stable structures and a harness that checks equivalence laws over
//! generated instances.
//!
//! Generation is deterministic: the same parameters always give the same
//! structure, and harness instance `i` is derived from the master seed and
//! `i` alone, so results do not depend on scheduling.

mod instances;
mod laws;
mod random;

use std::collections::HashSet;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::structure::{ConfigStructure, EventId, EventSet, Family, Label, Limits};
use crate::validate::validate;

pub use instances::{instance, Instance};
pub use laws::{run_law, run_laws, HarnessParams, Law, LawReport, LawViolation};
pub use random::{commute, linearise, random_term};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum GenMode {
    /// Conflict-free left-closed sets of a random prime event structure.
    PrimeEs,
    /// Random set families kept only when stable.
    Rejection,
    /// Prime skeleton combined with an "or-causation" gadget.
    Gadget,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GenParams {
    pub max_events: usize,
    pub label_alphabet_size: usize,
    pub causal_density: f64,
    pub conflict_density: f64,
    pub seed: u64,
    pub mode: GenMode,
    /// Rejection mode gives up after this many samples.
    pub attempts: usize,
    pub limits: Limits,
}

impl Default for GenParams {
    fn default() -> Self {
        GenParams {
            max_events: 6,
            label_alphabet_size: 2,
            causal_density: 0.3,
            conflict_density: 0.2,
            seed: 0,
            mode: GenMode::PrimeEs,
            attempts: 10_000,
            limits: Limits::default(),
        }
    }
}

/// Label `i` of the generated alphabet: `a`, `b`, ..., `z`, `a1`, ...
pub fn label_name(i: usize) -> Label {
    let letter = (b'a' + (i % 26) as u8) as char;
    let name = if i < 26 {
        letter.to_string()
    } else {
        format!("{letter}{}", i / 26)
    };
    Label::new(name).expect("generated label is a valid token")
}

pub(crate) fn seeded(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Seed of instance `index` under `master`.
pub(crate) fn derive_seed(master: u64, index: u64) -> u64 {
    master.wrapping_add(index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15))
}

pub fn generate(params: &GenParams) -> Result<ConfigStructure> {
    if !(0.0..=1.0).contains(&params.causal_density)
        || !(0.0..=1.0).contains(&params.conflict_density)
    {
        return Err(Error::Malformed("densities must lie in [0,1]".into()));
    }
    let mut rng = seeded(params.seed);
    match params.mode {
        GenMode::PrimeEs => {
            let n = if params.max_events == 0 {
                0
            } else {
                rng.gen_range(1..=params.max_events)
            };
            Ok(prime_family(&mut rng, n, params)?.into_structure())
        }
        GenMode::Rejection => rejection(&mut rng, params),
        GenMode::Gadget => gadget(&mut rng, params),
    }
}

fn labels(rng: &mut ChaCha8Rng, n: usize, alphabet: usize) -> Vec<Label> {
    (0..n)
        .map(|_| label_name(rng.gen_range(0..alphabet.max(1))))
        .collect()
}

/// Random partial order on `0..n` (causes have smaller indices) with
/// conflict inherited along causality; returns the family of conflict-free
/// left-closed sets, with events that occur in none of them dropped.
fn prime_family(rng: &mut ChaCha8Rng, n: usize, params: &GenParams) -> Result<Family> {
    let mut down = vec![EventSet::EMPTY; n];
    for j in 0..n {
        let mut d = EventSet::singleton(j);
        for below in down.iter().take(j) {
            if rng.gen_bool(params.causal_density) {
                d = d.union(*below);
            }
        }
        down[j] = d;
    }
    let mut base = vec![EventSet::EMPTY; n];
    for i in 0..n {
        for j in i + 1..n {
            let related = down[j].contains(i) || down[i].contains(j);
            if !related && rng.gen_bool(params.conflict_density) {
                base[i] = base[i].with(j);
                base[j] = base[j].with(i);
            }
        }
    }
    // events base-conflicting with some cause of e
    let reach: Vec<EventSet> = (0..n)
        .map(|e| {
            down[e]
                .iter()
                .fold(EventSet::EMPTY, |acc, c| acc.union(base[c]))
        })
        .collect();
    let conflict = |x: usize, y: usize| !reach[x].intersection(down[y]).is_empty();
    let labels = labels(rng, n, params.label_alphabet_size);

    let mut seen: HashSet<EventSet> = HashSet::from([EventSet::EMPTY]);
    let mut stack = vec![EventSet::EMPTY];
    let mut configs = vec![EventSet::EMPTY];
    while let Some(s) = stack.pop() {
        for e in 0..n {
            if s.contains(e) || !down[e].without(e).is_subset(s) {
                continue;
            }
            let t = s.with(e);
            if t.iter().any(|x| conflict(x, e)) || seen.contains(&t) {
                continue;
            }
            if configs.len() == params.limits.max_configurations {
                return Err(Error::Capacity {
                    what: "configuration count",
                    actual: configs.len() + 1,
                    limit: params.limits.max_configurations,
                });
            }
            seen.insert(t);
            configs.push(t);
            stack.push(t);
        }
    }
    compact(labels, configs)
}

/// Drops events used by no set and renumbers the rest.
fn compact(labels: Vec<Label>, configs: Vec<EventSet>) -> Result<Family> {
    let used = configs.iter().fold(EventSet::EMPTY, |acc, c| acc.union(*c));
    let keep: Vec<usize> = used.iter().collect();
    let remap = |c: EventSet| -> EventSet {
        keep.iter()
            .enumerate()
            .filter(|(_, &old)| c.contains(old))
            .map(|(new, _)| new)
            .collect()
    };
    Family::from_sets(
        keep.iter().map(|&e| labels[e].clone()).collect(),
        configs.into_iter().map(remap).collect(),
    )
}

fn rejection(rng: &mut ChaCha8Rng, params: &GenParams) -> Result<ConfigStructure> {
    let cap = params.max_events.min(4);
    if cap == 0 {
        return Ok(Family::nil().into_structure());
    }
    for _ in 0..params.attempts {
        let n = rng.gen_range(1..=cap);
        let full = (1u64 << n) - 1;
        let mut configs = vec![EventSet::EMPTY];
        for bits in 1..=full {
            if rng.gen_bool(0.4) {
                configs.push(EventSet::from_bits(bits));
            }
        }
        let used = configs.iter().fold(EventSet::EMPTY, |acc, c| acc.union(*c));
        if used.len() != n {
            continue;
        }
        let labels = labels(rng, n, params.label_alphabet_size);
        let s = Family::from_sets(labels, configs)?.into_structure();
        if validate(&s)?.stable() {
            return Ok(s);
        }
    }
    Err(Error::GenerationBudget(params.attempts))
}

/// `k` events any one of which enables `b`, but `b` cannot follow two of them.
fn gadget_family(rng: &mut ChaCha8Rng, k: usize, alphabet: usize) -> Result<Family> {
    let labels = labels(rng, k + 1, alphabet);
    let mut configs: Vec<EventSet> = (0..1u64 << k).map(EventSet::from_bits).collect();
    configs.extend((0..k).map(|s| EventSet::singleton(s).with(k)));
    Family::from_sets(labels, configs)
}

fn gadget(rng: &mut ChaCha8Rng, params: &GenParams) -> Result<ConfigStructure> {
    if params.max_events < 3 {
        return Err(Error::Malformed(
            "gadget mode needs room for at least 3 events".into(),
        ));
    }
    let k = if params.max_events >= 4 && rng.gen_bool(0.3) {
        3
    } else {
        2
    };
    let g = gadget_family(rng, k, params.label_alphabet_size)?;
    let rest = rng.gen_range(0..=params.max_events - (k + 1));
    let skeleton = prime_family(rng, rest, params)?;
    let combined = match rng.gen_range(0..4) {
        0 => Family::parallel(g, skeleton, &params.limits)?,
        1 => Family::choice(skeleton, g)?,
        2 if rest > 0 => {
            // one skeleton label in front of the gadget, beside the rest
            let lead = label_name(rng.gen_range(0..params.label_alphabet_size.max(1)));
            let body = Family::prefix(lead, g)?;
            let skeleton = prime_family(rng, rest - 1, params)?;
            Family::choice(body, skeleton)?
        }
        _ => Family::choice(g, skeleton)?,
    };
    Ok(combined.into_structure())
}

/// Same structure with event identifiers shuffled.
pub fn rename(s: &ConfigStructure, seed: u64) -> ConfigStructure {
    let mut rng = seeded(seed);
    let mut ids: Vec<String> = (0..s.num_events()).map(|i| format!("r{}", i + 1)).collect();
    ids.shuffle(&mut rng);
    let events = (0..s.num_events())
        .map(|e| {
            (
                EventId::new(ids[e].clone()).expect("token"),
                s.label(e).clone(),
            )
        })
        .collect();
    let configs: Vec<Vec<&str>> = s
        .configurations()
        .iter()
        .map(|c| c.iter().map(|e| ids[e].as_str()).collect())
        .collect();
    ConfigStructure::new(events, configs).expect("renaming preserves well-formedness")
}
