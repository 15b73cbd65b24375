//! Stability axioms and the prime intersection test.

use std::fmt::Write as _;

use crate::error::Result;
use crate::structure::{ConfigStructure, Configuration, Limits};

/// Outcome of one axiom, with a witness on failure.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Check<W> {
    Pass,
    Fail(W),
}

impl<W> Check<W> {
    pub fn passed(&self) -> bool {
        matches!(self, Check::Pass)
    }

    pub fn witness(&self) -> Option<&W> {
        match self {
            Check::Pass => None,
            Check::Fail(w) => Some(w),
        }
    }
}

/// `first` and `second` are both below `bound`, but their union (or
/// intersection) is missing from the family.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BoundedWitness {
    pub first: Configuration,
    pub second: Configuration,
    pub bound: Configuration,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ValidationReport {
    pub rooted: Check<()>,
    /// Witness: a non-empty configuration with no one-event sub-configuration.
    pub connected: Check<Configuration>,
    pub bounded_unions: Check<BoundedWitness>,
    pub bounded_intersections: Check<BoundedWitness>,
    /// Closure under arbitrary intersections; informational.
    pub prime_intersections: Check<(Configuration, Configuration)>,
}

impl ValidationReport {
    pub fn stable(&self) -> bool {
        self.rooted.passed()
            && self.connected.passed()
            && self.bounded_unions.passed()
            && self.bounded_intersections.passed()
    }

    /// Stable and closed under intersections.
    pub fn prime(&self) -> bool {
        self.stable() && self.prime_intersections.passed()
    }

    /// One line per axiom: `<axiom>: PASS|FAIL [witness]`.
    pub fn render(&self, s: &ConfigStructure) -> String {
        fn line(out: &mut String, name: &str, pass: bool, witness: Option<String>) {
            let verdict = if pass { "PASS" } else { "FAIL" };
            match witness {
                Some(w) => writeln!(out, "{name}: {verdict} [{w}]").unwrap(),
                None => writeln!(out, "{name}: {verdict}").unwrap(),
            }
        }
        let bounded = |w: &BoundedWitness| {
            format!(
                "{},{} ⊆ {}",
                s.render(w.first),
                s.render(w.second),
                s.render(w.bound)
            )
        };
        let mut out = String::new();
        line(&mut out, "rooted", self.rooted.passed(), None);
        line(
            &mut out,
            "connected",
            self.connected.passed(),
            self.connected.witness().map(|c| s.render(*c)),
        );
        line(
            &mut out,
            "boundedUnions",
            self.bounded_unions.passed(),
            self.bounded_unions.witness().map(bounded),
        );
        line(
            &mut out,
            "boundedIntersections",
            self.bounded_intersections.passed(),
            self.bounded_intersections.witness().map(bounded),
        );
        line(&mut out, "stable", self.stable(), None);
        line(
            &mut out,
            "primeIntersections",
            self.prime_intersections.passed(),
            self.prime_intersections
                .witness()
                .map(|(x, y)| format!("{},{}", s.render(*x), s.render(*y))),
        );
        out
    }
}

/// Evaluates every axiom exhaustively under the default [`Limits`].
pub fn validate(s: &ConfigStructure) -> Result<ValidationReport> {
    validate_with(s, &Limits::default())
}

pub fn validate_with(s: &ConfigStructure, limits: &Limits) -> Result<ValidationReport> {
    limits.check(s)?;
    let configs = s.configurations();

    let rooted = if s.contains(Configuration::EMPTY) {
        Check::Pass
    } else {
        Check::Fail(())
    };

    let connected = configs
        .iter()
        .find(|x| !x.is_empty() && !x.iter().any(|e| s.contains(x.without(e))))
        .map_or(Check::Pass, |x| Check::Fail(*x));

    // every bounded set lies below some maximal configuration
    let maximal: Vec<Configuration> = configs
        .iter()
        .filter(|x| !configs.iter().any(|z| x.is_proper_subset(*z)))
        .copied()
        .collect();
    let bounded = |u: Configuration| maximal.iter().any(|z| u.is_subset(*z));
    let first_bound =
        |u: Configuration| *configs.iter().find(|z| u.is_subset(**z)).expect("bounded");

    let mut bounded_unions = Check::Pass;
    let mut bounded_intersections = Check::Pass;
    let mut prime_intersections = Check::Pass;
    'pairs: for (i, &x) in configs.iter().enumerate() {
        for &y in &configs[i + 1..] {
            let union = x.union(y);
            let meet = x.intersection(y);
            let union_missing = !s.contains(union);
            let meet_missing = !s.contains(meet);
            if meet_missing && prime_intersections.passed() {
                prime_intersections = Check::Fail((x, y));
            }
            if (union_missing || meet_missing) && bounded(union) {
                let w = BoundedWitness {
                    first: x,
                    second: y,
                    bound: first_bound(union),
                };
                if union_missing && bounded_unions.passed() {
                    bounded_unions = Check::Fail(w);
                }
                if meet_missing && bounded_intersections.passed() {
                    bounded_intersections = Check::Fail(w);
                }
            }
            if !bounded_unions.passed()
                && !bounded_intersections.passed()
                && !prime_intersections.passed()
            {
                break 'pairs;
            }
        }
    }

    Ok(ValidationReport {
        rooted,
        connected,
        bounded_unions,
        bounded_intersections,
        prime_intersections,
    })
}
