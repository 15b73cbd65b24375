//! Equivalence laws evaluated over generated (and optionally classic)
//! instances.

use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use rayon::prelude::*;

use super::instances::{instance, instance_where, Instance};
use crate::corpus;
use crate::equivalence::{
    check_with, maximal_bisimulation_with, replay, verify_relation, CandidateRelation,
    CheckOptions, EquivalenceKind,
};
use crate::error::{Error, Result};
use crate::order::{auto_concurrency_unchecked, depths, lift, minimal_events, slice, slice_leq};
use crate::structure::{ConfigStructure, Configuration, Limits};
use crate::transitions::{depth_singles, Direction};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Law {
    /// rsb and rhsb agree.
    RsbRhsb,
    /// rdb, rhesb and rsb agree.
    RdbRhesbRsb,
    /// hh => rsb => rb, sb => ib; db => sb; rdb => rsb.
    Hierarchy,
    /// rb and hh agree on structures without equidepth auto-concurrency.
    RbHhNoEqac,
    /// db => sb.
    DbSb,
    /// Related configurations of a maximal reverse bisimulation carry the
    /// same label multiset.
    LabelsLemma,
    /// The maximal RHSB/RHESB relates the minimal parts of related
    /// configurations.
    MinLemma,
    /// Lifting a maximal RHSB/RHESB at related minimal configurations gives a
    /// bisimulation of the same kind between the lifted structures.
    LiftLemma,
    /// The maximal RHESB is closed under depth truncation, related
    /// configurations agree on labels level by level, and matched single
    /// moves agree on depth.
    Levels,
}

use EquivalenceKind as K;

impl Law {
    pub const ALL: [Law; 9] = [
        Law::RsbRhsb,
        Law::RdbRhesbRsb,
        Law::Hierarchy,
        Law::RbHhNoEqac,
        Law::DbSb,
        Law::LabelsLemma,
        Law::MinLemma,
        Law::LiftLemma,
        Law::Levels,
    ];

    pub fn id(self) -> &'static str {
        match self {
            Law::RsbRhsb => "rsb=rhsb",
            Law::RdbRhesbRsb => "rdb=rhesb=rsb",
            Law::Hierarchy => "hierarchy",
            Law::RbHhNoEqac => "rb=hh-noeqac",
            Law::DbSb => "db⊆sb",
            Law::LabelsLemma => "labels-lemma",
            Law::MinLemma => "min-lemma",
            Law::LiftLemma => "lift-lemma",
            Law::Levels => "levels",
        }
    }

    /// Laws that compute HH verdicts run on smaller structures.
    pub fn involves_hh(self) -> bool {
        matches!(self, Law::Hierarchy | Law::RbHhNoEqac)
    }

    pub fn default_max_events(self) -> usize {
        if self.involves_hh() {
            8
        } else {
            10
        }
    }
}

impl fmt::Display for Law {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for Law {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let s = s.trim();
        if s == "db<=sb" || s == "db-sb" {
            return Ok(Law::DbSb);
        }
        Law::ALL
            .into_iter()
            .find(|l| l.id() == s)
            .ok_or_else(|| format!("unknown law `{s}`"))
    }
}

#[derive(Clone, Debug)]
pub struct HarnessParams {
    pub count: usize,
    pub seed: u64,
    /// Overrides [`Law::default_max_events`].
    pub max_events: Option<usize>,
    /// Also run the classic example pairs.
    pub include_corpus: bool,
    pub limits: Limits,
}

impl Default for HarnessParams {
    fn default() -> Self {
        HarnessParams {
            count: 100,
            seed: 0,
            max_events: None,
            include_corpus: true,
            limits: Limits::default(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct LawViolation {
    pub instance: String,
    pub message: String,
    pub left: ConfigStructure,
    pub right: ConfigStructure,
}

#[derive(Clone, Debug)]
pub struct LawReport {
    pub law: Law,
    pub instances: usize,
    pub violations: Vec<LawViolation>,
    pub capacity_errors: Vec<String>,
    /// Instances the generator could not produce under the law's filter.
    pub skipped: usize,
    /// Passing instances on which the law's leading equivalence holds.
    pub equivalent: usize,
    /// Instances with auto-concurrency on at least one side.
    pub with_auto_concurrency: usize,
    /// rsb-equivalent but hh-inequivalent pairs; none are known.
    pub findings: Vec<String>,
    /// Classic pairs separating two equivalences.
    pub strictness: Vec<String>,
    pub elapsed: Duration,
}

impl LawReport {
    /// Equivalence whose verdict [`LawReport::equivalent`] counts.
    pub fn lead_kind(&self) -> EquivalenceKind {
        lead_kind(self.law)
    }

    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }

    /// `LAW <id>: <n> instances, <v> violations, <t> ms`
    pub fn summary(&self) -> String {
        format!(
            "LAW {}: {} instances, {} violations, {} ms",
            self.law,
            self.instances,
            self.violations.len(),
            self.elapsed.as_millis()
        )
    }
}

enum Outcome {
    /// Finding, and whether the law's leading equivalence holds.
    Pass(Option<String>, bool),
    Violation(String),
    Capacity(String),
}

fn options(limits: &Limits, prefilter: bool) -> CheckOptions {
    CheckOptions {
        limits: *limits,
        prefilter,
        witness: false,
    }
}

fn verdict(kind: K, c: &ConfigStructure, d: &ConfigStructure, limits: &Limits) -> Result<bool> {
    Ok(check_with(kind, c, d, &options(limits, true))?.equivalent)
}

/// Recomputes a verdict on the unfiltered relation and certifies it: an
/// equivalence by re-checking the fixpoint, an inequivalence by replaying a
/// strategy.
fn certified(
    kind: K,
    c: &ConfigStructure,
    d: &ConfigStructure,
    limits: &Limits,
) -> Result<std::result::Result<bool, String>> {
    let v = check_with(
        kind,
        c,
        d,
        &CheckOptions {
            limits: *limits,
            prefilter: false,
            witness: true,
        },
    )?;
    if v.equivalent {
        let r = maximal_bisimulation_with(kind, c, d, &options(limits, false))?;
        if let Err(e) = verify_relation(kind, c, d, &r) {
            return Ok(Err(format!("{kind} fixpoint does not certify: {e}")));
        }
    } else if let Err(e) = replay(kind, c, d, v.witness.as_ref().expect("requested")) {
        return Ok(Err(format!("{kind} strategy does not replay: {e}")));
    }
    Ok(Ok(v.equivalent))
}

fn verdicts(
    kinds: &[K],
    c: &ConfigStructure,
    d: &ConfigStructure,
    limits: &Limits,
) -> Result<Vec<bool>> {
    kinds.iter().map(|&k| verdict(k, c, d, limits)).collect()
}

fn render_verdicts(kinds: &[K], v: &[bool]) -> String {
    let parts: Vec<String> = kinds
        .iter()
        .zip(v)
        .map(|(k, &b)| format!("{k}={}", if b { "yes" } else { "no" }))
        .collect();
    parts.join(" ")
}

const HIERARCHY: [(K, K); 7] = [
    (K::Hh, K::Rsb),
    (K::Rsb, K::Rb),
    (K::Rsb, K::Sb),
    (K::Rb, K::Ib),
    (K::Sb, K::Ib),
    (K::Db, K::Sb),
    (K::Rdb, K::Rsb),
];

fn index_of(kind: K) -> usize {
    K::ALL.iter().position(|&k| k == kind).expect("listed")
}

/// Verdict-level check of a law: `None` if it holds.
fn verdict_law(law: Law, v: &[bool]) -> Option<String> {
    let at = |k: K| v[index_of(k)];
    let equal = |ks: &[K]| ks.windows(2).all(|w| at(w[0]) == at(w[1]));
    let broken: Vec<String> = match law {
        Law::RsbRhsb => (!equal(&[K::Rsb, K::Rhsb]))
            .then(|| "rsb and rhsb differ".to_string())
            .into_iter()
            .collect(),
        Law::RdbRhesbRsb => (!equal(&[K::Rdb, K::Rhesb, K::Rsb]))
            .then(|| "rdb, rhesb and rsb differ".to_string())
            .into_iter()
            .collect(),
        Law::Hierarchy => HIERARCHY
            .iter()
            .filter(|(fine, coarse)| at(*fine) && !at(*coarse))
            .map(|(fine, coarse)| format!("{fine} holds but {coarse} does not"))
            .collect(),
        Law::RbHhNoEqac => (!equal(&[K::Rb, K::Hh]))
            .then(|| "rb and hh differ".to_string())
            .into_iter()
            .collect(),
        Law::DbSb => (at(K::Db) && !at(K::Sb))
            .then(|| "db holds but sb does not".to_string())
            .into_iter()
            .collect(),
        _ => Vec::new(),
    };
    (!broken.is_empty()).then(|| broken.join("; "))
}

fn kinds_for(law: Law) -> Vec<K> {
    match law {
        Law::RsbRhsb => vec![K::Rsb, K::Rhsb],
        Law::RdbRhesbRsb => vec![K::Rdb, K::Rhesb, K::Rsb],
        Law::Hierarchy => K::ALL.to_vec(),
        Law::RbHhNoEqac => vec![K::Rb, K::Hh],
        Law::DbSb => vec![K::Db, K::Sb],
        _ => Vec::new(),
    }
}

fn full_vector(kinds: &[K], v: &[bool]) -> Vec<bool> {
    let mut out = vec![false; 9];
    for (k, &b) in kinds.iter().zip(v) {
        out[index_of(*k)] = b;
    }
    out
}

fn evaluate_verdicts(
    law: Law,
    c: &ConfigStructure,
    d: &ConfigStructure,
    limits: &Limits,
) -> Result<Outcome> {
    let kinds = kinds_for(law);
    let v = verdicts(&kinds, c, d, limits)?;
    let full = full_vector(&kinds, &v);
    let finding = (law == Law::Hierarchy && full[index_of(K::Rsb)] && !full[index_of(K::Hh)])
        .then(|| "rsb-equivalent but hh-inequivalent".to_string());
    let Some(problem) = verdict_law(law, &full) else {
        return Ok(Outcome::Pass(finding, v[0]));
    };
    // Re-derive every verdict independently before reporting.
    let mut again = Vec::new();
    for &k in &kinds {
        match certified(k, c, d, limits)? {
            Ok(b) => again.push(b),
            Err(msg) => return Ok(Outcome::Violation(format!("{problem}; {msg}"))),
        }
    }
    let confirmed = verdict_law(law, &full_vector(&kinds, &again)).is_some();
    Ok(Outcome::Violation(format!(
        "{problem} ({}; {})",
        render_verdicts(&kinds, &v),
        if confirmed {
            "confirmed on re-check"
        } else {
            "not reproduced on re-check"
        }
    )))
}

fn relation(
    kind: K,
    c: &ConfigStructure,
    d: &ConfigStructure,
    limits: &Limits,
) -> Result<CandidateRelation> {
    maximal_bisimulation_with(kind, c, d, &options(limits, false))
}

fn labels_lemma(
    c: &ConfigStructure,
    d: &ConfigStructure,
    limits: &Limits,
) -> Result<Option<String>> {
    for kind in [K::Rb, K::Rsb, K::Rhsb, K::Rhesb, K::Rdb] {
        let r = relation(kind, c, d, limits)?;
        for &(x, y) in &r.pairs {
            if c.label_multiset(x) != d.label_multiset(y) {
                return Ok(Some(format!(
                    "{kind}: ({}, {}) differ in labels",
                    c.render(x),
                    d.render(y)
                )));
            }
        }
    }
    Ok(None)
}

fn min_lemma(c: &ConfigStructure, d: &ConfigStructure, limits: &Limits) -> Result<Option<String>> {
    for kind in [K::Rhsb, K::Rhesb] {
        let r = relation(kind, c, d, limits)?;
        for &(x, y) in &r.pairs {
            let (mx, my) = (minimal_events(c, x)?, minimal_events(d, y)?);
            if !r.contains(mx, my) {
                return Ok(Some(format!(
                    "{kind}: ({}, {}) related but minimal parts ({}, {}) are not",
                    c.render(x),
                    d.render(y),
                    c.render(mx),
                    d.render(my)
                )));
            }
        }
    }
    Ok(None)
}

fn lifted(
    kind: K,
    r: &CandidateRelation,
    c: &ConfigStructure,
    d: &ConfigStructure,
    (m, n): (Configuration, Configuration),
) -> Result<(ConfigStructure, ConfigStructure, CandidateRelation)> {
    let (cm, dn) = (lift(c, m)?, lift(d, n)?);
    let mut pairs = std::collections::BTreeSet::new();
    for &(x, y) in &r.pairs {
        if minimal_events(c, x)? == m && minimal_events(d, y)? == n {
            let lx = c
                .transfer(x.difference(m), &cm)
                .expect("residual events survive lifting");
            let ly = d
                .transfer(y.difference(n), &dn)
                .expect("residual events survive lifting");
            pairs.insert((lx, ly));
        }
    }
    let rel = CandidateRelation {
        kind,
        pairs,
        triples: Vec::new(),
        rounds: 0,
        initial_size: 0,
    };
    Ok((cm, dn, rel))
}

fn lift_lemma(c: &ConfigStructure, d: &ConfigStructure, limits: &Limits) -> Result<Option<String>> {
    for kind in [K::Rhsb, K::Rhesb] {
        let r = relation(kind, c, d, limits)?;
        for &(m, n) in &r.pairs {
            if minimal_events(c, m)? != m || minimal_events(d, n)? != n {
                continue;
            }
            let (cm, dn, rel) = lifted(kind, &r, c, d, (m, n))?;
            if let Err(e) = verify_relation(kind, &cm, &dn, &rel) {
                return Ok(Some(format!(
                    "{kind}: lifting at ({}, {}) is not a bisimulation: {e}",
                    c.render(m),
                    d.render(n)
                )));
            }
        }
    }
    Ok(None)
}

fn levels(c: &ConfigStructure, d: &ConfigStructure, limits: &Limits) -> Result<Option<String>> {
    let r = relation(K::Rhesb, c, d, limits)?;
    for &(x, y) in &r.pairs {
        let here = format!("({}, {})", c.render(x), d.render(y));
        let height = depths(c, x)?.height().max(depths(d, y)?.height());
        for n in 1..=height {
            let (xn, yn) = (slice_leq(c, x, n)?, slice_leq(d, y, n)?);
            if !r.contains(xn, yn) {
                return Ok(Some(format!(
                    "{here}: truncations at depth {n} are not related"
                )));
            }
            if c.label_multiset(slice(c, x, n, n)?) != d.label_multiset(slice(d, y, n, n)?) {
                return Ok(Some(format!("{here}: level {n} labels differ")));
            }
        }
        for dir in [Direction::Forward, Direction::Reverse] {
            let ys = depth_singles(d, y, dir)?;
            for m in depth_singles(c, x, dir)? {
                let crate::MoveKind::DepthSingle(a, k) = &m.kind else {
                    continue;
                };
                for o in &ys {
                    let crate::MoveKind::DepthSingle(b, k2) = &o.kind else {
                        continue;
                    };
                    if a == b && r.contains(m.target, o.target) && k != k2 {
                        return Ok(Some(format!(
                            "{here}: matched {a} moves at depths {k} and {k2}"
                        )));
                    }
                }
            }
        }
    }
    Ok(None)
}

fn lead_kind(law: Law) -> K {
    match law {
        Law::LabelsLemma => K::Rb,
        Law::MinLemma | Law::LiftLemma => K::Rhsb,
        Law::Levels => K::Rhesb,
        _ => kinds_for(law)[0],
    }
}

fn evaluate(law: Law, inst: &Instance, limits: &Limits) -> Result<Outcome> {
    let (c, d) = (&inst.left, &inst.right);
    let problem = match law {
        Law::LabelsLemma => labels_lemma(c, d, limits)?,
        Law::MinLemma => min_lemma(c, d, limits)?,
        Law::LiftLemma => lift_lemma(c, d, limits)?,
        Law::Levels => levels(c, d, limits)?,
        _ => return evaluate_verdicts(law, c, d, limits),
    };
    Ok(match problem {
        None => Outcome::Pass(None, verdict(lead_kind(law), c, d, limits)?),
        Some(p) => Outcome::Violation(p),
    })
}

fn no_equidepth_auto_concurrency(i: &Instance) -> bool {
    [&i.left, &i.right]
        .iter()
        .all(|s| !auto_concurrency_unchecked(s).has_equidepth_auto_concurrency())
}

fn has_auto_concurrency(i: &Instance) -> bool {
    [&i.left, &i.right]
        .iter()
        .any(|s| auto_concurrency_unchecked(s).has_auto_concurrency())
}

fn classic() -> Vec<Instance> {
    let mut out: Vec<Instance> = corpus::entries()
        .into_iter()
        .map(|e| {
            let (left, right) = e.structures().expect("corpus terms translate");
            Instance {
                strategy: "classic",
                description: e.name.to_string(),
                left,
                right,
            }
        })
        .collect();
    let d = corpus::or_causation();
    out.push(Instance {
        strategy: "classic",
        description: "or-causation".into(),
        left: d.clone(),
        right: d,
    });
    out
}

fn strictness(instances: &[Instance], limits: &Limits) -> Vec<String> {
    let mut pairs: Vec<(K, K)> = HIERARCHY.to_vec();
    pairs.extend([
        (K::Sb, K::Rb),
        (K::Rb, K::Sb),
        (K::Hh, K::Rb),
        (K::Hh, K::Sb),
    ]);
    pairs
        .into_iter()
        .filter_map(|(fine, coarse)| {
            instances.iter().find_map(|i| {
                let yes = verdict(coarse, &i.left, &i.right, limits).ok()?;
                let no = verdict(fine, &i.left, &i.right, limits).ok()?;
                (yes && !no).then(|| format!("{coarse} but not {fine}: {}", i.description))
            })
        })
        .collect()
}

/// Runs one law over the classic pairs (if requested) and `count` generated
/// instances. Instances are evaluated in parallel; results keep index order.
pub fn run_law(law: Law, params: &HarnessParams) -> LawReport {
    let start = Instant::now();
    let max_events = params.max_events.unwrap_or(law.default_max_events());
    let classic = if params.include_corpus {
        classic()
    } else {
        Vec::new()
    };
    let filter = law == Law::RbHhNoEqac;

    let generated: Vec<Result<Option<Instance>>> = (0..params.count as u64)
        .into_par_iter()
        .map(|i| {
            if filter {
                instance_where(params.seed, i, max_events, no_equidepth_auto_concurrency)
            } else {
                instance(params.seed, i, max_events).map(Some)
            }
        })
        .collect();

    let mut report = LawReport {
        law,
        instances: 0,
        violations: Vec::new(),
        capacity_errors: Vec::new(),
        skipped: 0,
        equivalent: 0,
        with_auto_concurrency: 0,
        findings: Vec::new(),
        strictness: Vec::new(),
        elapsed: Duration::ZERO,
    };

    let mut all: Vec<(String, Instance)> = Vec::new();
    for i in classic {
        if filter && !no_equidepth_auto_concurrency(&i) {
            continue;
        }
        all.push((format!("classic {}", i.description), i));
    }
    for (idx, g) in generated.into_iter().enumerate() {
        match g {
            Ok(Some(i)) => all.push((format!("#{idx} {} ({})", i.strategy, i.description), i)),
            Ok(None) => report.skipped += 1,
            Err(e) if e.is_capacity() => report.capacity_errors.push(format!("#{idx}: {e}")),
            Err(e) => report
                .capacity_errors
                .push(format!("#{idx}: generation failed: {e}")),
        }
    }

    let outcomes: Vec<Result<Outcome>> = all
        .par_iter()
        .map(|(_, i)| evaluate(law, i, &params.limits))
        .collect();
    for ((name, inst), outcome) in all.iter().zip(outcomes) {
        let outcome = match outcome {
            Ok(o) => o,
            Err(e) if e.is_capacity() => Outcome::Capacity(e.to_string()),
            Err(Error::NotStable(m)) => {
                Outcome::Violation(format!("generated structure not stable: {m}"))
            }
            Err(e) => Outcome::Violation(format!("evaluation failed: {e}")),
        };
        match outcome {
            Outcome::Capacity(m) => report.capacity_errors.push(format!("{name}: {m}")),
            Outcome::Violation(message) => {
                report.instances += 1;
                report.violations.push(LawViolation {
                    instance: name.clone(),
                    message,
                    left: inst.left.clone(),
                    right: inst.right.clone(),
                });
            }
            Outcome::Pass(finding, equivalent) => {
                report.instances += 1;
                report.equivalent += usize::from(equivalent);
                if let Some(f) = finding {
                    report.findings.push(format!("{name}: {f}"));
                }
            }
        }
        if has_auto_concurrency(inst) {
            report.with_auto_concurrency += 1;
        }
    }
    if law == Law::Hierarchy && params.include_corpus {
        let classic: Vec<Instance> = all
            .iter()
            .filter(|(_, i)| i.strategy == "classic")
            .map(|(_, i)| i.clone())
            .collect();
        report.strictness = strictness(&classic, &params.limits);
    }
    report.elapsed = start.elapsed();
    report
}

pub fn run_laws(laws: &[Law], params: &HarnessParams) -> Vec<LawReport> {
    laws.iter().map(|&l| run_law(l, params)).collect()
}
