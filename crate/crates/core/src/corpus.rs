//! Classic example pairs with their expected verdicts, and the two small
//! "or-causation" structures built on events `0`, `1`, `b`.

use crate::equivalence::{check, EquivalenceKind};
use crate::error::Result;
use crate::structure::{ConfigStructure, EventId, Label};
use crate::terms::translate_str;

/// A pair of terms and the verdict expected for each equivalence.
#[derive(Clone, Debug)]
pub struct CorpusEntry {
    pub name: &'static str,
    pub left: &'static str,
    pub right: &'static str,
    /// Verdicts in the order of [`EquivalenceKind::ALL`].
    pub expected: [bool; 9],
    /// Why the verdicts are what they are.
    pub note: &'static str,
}

impl CorpusEntry {
    pub fn expected(&self, kind: EquivalenceKind) -> bool {
        let i = EquivalenceKind::ALL
            .iter()
            .position(|&k| k == kind)
            .expect("kind listed");
        self.expected[i]
    }

    pub fn structures(&self) -> Result<(ConfigStructure, ConfigStructure)> {
        Ok((translate_str(self.left)?, translate_str(self.right)?))
    }

    /// Actual verdicts, in the order of [`EquivalenceKind::ALL`].
    pub fn run(&self) -> Result<[bool; 9]> {
        let (c, d) = self.structures()?;
        let mut out = [false; 9];
        for (i, k) in EquivalenceKind::ALL.into_iter().enumerate() {
            out[i] = check(k, &c, &d, false)?.equivalent;
        }
        Ok(out)
    }
}

const T: bool = true;
const F: bool = false;

pub const ABSORPTION_LEFT: &str = "(a | (b + c)) + (a | b) + ((a + c) | b)";
pub const ABSORPTION_RIGHT: &str = "(a | (b + c)) + ((a + c) | b)";

//                      ib sb db rb rsb rhsb rhesb rdb hh
pub fn entries() -> Vec<CorpusEntry> {
    vec![
        CorpusEntry {
            name: "auto-concurrency",
            left: "a | a",
            right: "a.a",
            expected: [T, F, F, T, F, F, F, F, F],
            note: "a|a can do an {a,a} step, a.a cannot; single moves forward and backward match",
        },
        CorpusEntry {
            name: "reverse-step",
            left: "a | a",
            right: "(a | a) + a.a",
            expected: [T, T, F, T, F, F, F, F, F],
            note: "after a, a into the a.a branch no reverse {a,a} step is possible",
        },
        CorpusEntry {
            name: "interleaving-law",
            left: "a | b",
            right: "a.b + b.a",
            expected: [T, F, F, F, F, F, F, F, F],
            note: "interleaving expansion holds only for interleaving bisimulation",
        },
        CorpusEntry {
            name: "absorption",
            left: ABSORPTION_LEFT,
            right: ABSORPTION_RIGHT,
            expected: [T, T, T, F, F, F, F, F, F],
            note: "after a and b in the middle summand, reversing a and doing c is impossible",
        },
        CorpusEntry {
            name: "depth",
            left: "a | b",
            right: "(a | b) + a.b",
            expected: [T, T, F, F, F, F, F, F, F],
            note: "b at depth 2 in the a.b summand has no counterpart in a|b",
        },
        CorpusEntry {
            name: "idempotence",
            left: "a",
            right: "a + a",
            expected: [T; 9],
            note: "a + a = a holds for every equivalence",
        },
        CorpusEntry {
            name: "non-equidepth-auto-concurrency",
            left: "a | b.a",
            right: "b.a | a",
            expected: [T; 9],
            note: "auto-concurrent a events at different depths; reverse and HH bisimulation agree",
        },
    ]
}

fn family(configs: &[&[&str]]) -> ConfigStructure {
    let events = ["0", "1", "b"]
        .iter()
        .map(|&id| {
            let label = if id == "b" { "b" } else { "a" };
            (EventId::new(id).unwrap(), Label::new(label).unwrap())
        })
        .collect();
    let configs = configs.iter().map(|c| c.to_vec()).collect();
    ConfigStructure::new(events, configs).expect("fixed structure is well formed")
}

/// `b` enabled by `0` or `1` and also after both: fails bounded
/// intersections because `{0,b} ∩ {1,b} = {b}`.
pub fn or_causation_unstable() -> ConfigStructure {
    family(&[
        &[],
        &["0"],
        &["1"],
        &["0", "1"],
        &["0", "b"],
        &["1", "b"],
        &["0", "1", "b"],
    ])
}

/// `b` enabled by `0` or `1` but not both: stable, not closed under
/// intersections.
pub fn or_causation() -> ConfigStructure {
    family(&[&[], &["0"], &["1"], &["0", "1"], &["0", "b"], &["1", "b"]])
}
