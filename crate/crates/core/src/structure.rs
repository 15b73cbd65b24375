//! Configuration structures: finite families of event sets with a labelling.
//!
//! Events inside a [`ConfigStructure`] are numbered by the lexicographic order
//! of their identifiers, and a [`Configuration`] is a bit set over those
//! numbers. A configuration value is therefore only meaningful together with
//! the structure it was taken from; use [`ConfigStructure::transfer`] to move
//! one between structures that share identifiers.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Width of [`EventSet`]; no structure can hold more events than this.
pub const MAX_EVENTS_HARD: usize = 64;

/// A finite set of event numbers.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct EventSet(u64);

/// Configurations are event sets that belong to a structure's family.
pub type Configuration = EventSet;

impl EventSet {
    pub const EMPTY: EventSet = EventSet(0);

    pub const fn from_bits(bits: u64) -> Self {
        EventSet(bits)
    }

    pub const fn bits(self) -> u64 {
        self.0
    }

    pub fn singleton(e: usize) -> Self {
        EventSet(1u64 << e)
    }

    pub fn contains(self, e: usize) -> bool {
        e < MAX_EVENTS_HARD && self.0 & (1u64 << e) != 0
    }

    pub fn with(self, e: usize) -> Self {
        EventSet(self.0 | (1u64 << e))
    }

    pub fn without(self, e: usize) -> Self {
        EventSet(self.0 & !(1u64 << e))
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn is_subset(self, other: EventSet) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn is_proper_subset(self, other: EventSet) -> bool {
        self.is_subset(other) && self != other
    }

    pub fn union(self, other: EventSet) -> Self {
        EventSet(self.0 | other.0)
    }

    pub fn intersection(self, other: EventSet) -> Self {
        EventSet(self.0 & other.0)
    }

    pub fn difference(self, other: EventSet) -> Self {
        EventSet(self.0 & !other.0)
    }

    /// Events in increasing order.
    pub fn iter(self) -> Events {
        Events(self.0)
    }

    /// All subsets of `self`, the empty set included, in increasing bit order.
    pub fn subsets(self) -> impl Iterator<Item = EventSet> {
        let full = self.0;
        let mut next = Some(0u64);
        std::iter::from_fn(move || {
            let cur = next?;
            next = if cur == full {
                None
            } else {
                Some((cur.wrapping_sub(full)) & full)
            };
            Some(EventSet(cur))
        })
    }
}

impl FromIterator<usize> for EventSet {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        iter.into_iter().fold(EventSet::EMPTY, EventSet::with)
    }
}

/// Iterator over the members of an [`EventSet`].
pub struct Events(u64);

impl Iterator for Events {
    type Item = usize;

    fn next(&mut self) -> Option<usize> {
        if self.0 == 0 {
            return None;
        }
        let e = self.0.trailing_zeros() as usize;
        self.0 &= self.0 - 1;
        Some(e)
    }
}

/// Canonical order: by size, then lexicographically on the sorted member list.
impl Ord for EventSet {
    fn cmp(&self, other: &Self) -> Ordering {
        self.len().cmp(&other.len()).then_with(|| {
            let diff = self.0 ^ other.0;
            if diff == 0 {
                Ordering::Equal
            } else if self.0 & (diff & diff.wrapping_neg()) != 0 {
                Ordering::Less
            } else {
                Ordering::Greater
            }
        })
    }
}

impl PartialOrd for EventSet {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for EventSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

fn check_token(kind: &str, s: &str) -> Result<()> {
    if s.is_empty() {
        return Err(Error::Malformed(format!("empty {kind}")));
    }
    if s.chars()
        .any(|c| c.is_whitespace() || matches!(c, ',' | '{' | '}' | '[' | ']' | '(' | ')'))
    {
        return Err(Error::Malformed(format!(
            "{kind} `{s}` contains a reserved character"
        )));
    }
    Ok(())
}

/// Identifier of an event, unique within its structure.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct EventId(String);

impl EventId {
    pub fn new(id: impl Into<String>) -> Result<Self> {
        let id = id.into();
        check_token("event id", &id)?;
        Ok(EventId(id))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for EventId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// An action label.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Label(String);

impl Label {
    pub fn new(name: impl Into<String>) -> Result<Self> {
        let name = name.into();
        check_token("label", &name)?;
        Ok(Label(name))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// A multiset of labels, kept as label -> positive count.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Default)]
pub struct LabelMultiset(BTreeMap<Label, usize>);

impl LabelMultiset {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, label: Label) {
        *self.0.entry(label).or_insert(0) += 1;
    }

    /// Total number of elements, counting multiplicity.
    pub fn len(&self) -> usize {
        self.0.values().sum()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn count(&self, label: &Label) -> usize {
        self.0.get(label).copied().unwrap_or(0)
    }

    /// Exactly one distinct label.
    pub fn is_homogeneous(&self) -> bool {
        self.0.len() == 1
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Label, usize)> {
        self.0.iter().map(|(l, &n)| (l, n))
    }
}

impl FromIterator<Label> for LabelMultiset {
    fn from_iter<I: IntoIterator<Item = Label>>(iter: I) -> Self {
        let mut m = LabelMultiset::new();
        for l in iter {
            m.add(l);
        }
        m
    }
}

impl fmt::Display for LabelMultiset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (l, n) in self.iter() {
            for _ in 0..n {
                if !first {
                    f.write_str(",")?;
                }
                first = false;
                write!(f, "{l}")?;
            }
        }
        Ok(())
    }
}

/// Size guards applied by validation, translation and the checkers.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Limits {
    pub max_events: usize,
    pub max_configurations: usize,
    /// Upper bound on the candidate relation (pairs, or triples for HH).
    pub max_pairs: usize,
    /// Upper bound on the isomorphisms enumerated for one configuration pair.
    pub max_isomorphisms: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            max_events: 16,
            max_configurations: 4096,
            max_pairs: 1 << 22,
            max_isomorphisms: 100_000,
        }
    }
}

impl Limits {
    pub fn check(&self, s: &ConfigStructure) -> Result<()> {
        if s.num_events() > self.max_events {
            return Err(Error::Capacity {
                what: "event count",
                actual: s.num_events(),
                limit: self.max_events,
            });
        }
        if s.num_configurations() > self.max_configurations {
            return Err(Error::Capacity {
                what: "configuration count",
                actual: s.num_configurations(),
                limit: self.max_configurations,
            });
        }
        Ok(())
    }
}

/// Causal data of one configuration, computed once per structure.
#[derive(Clone, Debug)]
pub(crate) struct ConfigOrder {
    /// `downsets[e]` = { d : d <=_X e }, empty for events outside X.
    pub downsets: Vec<EventSet>,
    /// Depth of each event of X, 0 outside X.
    pub depth: Vec<usize>,
    pub minimal: EventSet,
    pub partial_order: bool,
}

impl ConfigOrder {
    pub fn lt(&self, d: usize, e: usize) -> bool {
        d != e && self.downsets[e].contains(d)
    }

    pub fn concurrent(&self, d: usize, e: usize) -> bool {
        d != e && !self.downsets[e].contains(d) && !self.downsets[d].contains(e)
    }

    /// Members of `set` are pairwise concurrent.
    pub fn antichain(&self, set: EventSet) -> bool {
        set.iter()
            .all(|e| self.downsets[e].intersection(set) == EventSet::singleton(e))
    }
}

/// A finite configuration structure: a family of configurations plus labels.
///
/// Immutable once built. Events are sorted by identifier, configurations are
/// kept in canonical order without duplicates, and every event occurs in at
/// least one configuration.
#[derive(Clone)]
pub struct ConfigStructure {
    events: Vec<EventId>,
    labels: Vec<Label>,
    configs: Vec<Configuration>,
    index: HashMap<Configuration, usize>,
    orders: OnceLock<Vec<ConfigOrder>>,
}

impl PartialEq for ConfigStructure {
    fn eq(&self, other: &Self) -> bool {
        self.events == other.events && self.labels == other.labels && self.configs == other.configs
    }
}

impl Eq for ConfigStructure {}

impl fmt::Debug for ConfigStructure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ConfigStructure")
            .field(
                "events",
                &self
                    .events
                    .iter()
                    .zip(&self.labels)
                    .map(|(e, l)| format!("{e}:{l}"))
                    .collect::<Vec<_>>(),
            )
            .field(
                "configurations",
                &self
                    .configs
                    .iter()
                    .map(|c| self.render(*c))
                    .collect::<Vec<_>>(),
            )
            .finish()
    }
}

impl ConfigStructure {
    /// Builds a structure from labelled events and configurations given as
    /// identifier lists. Input problems are reported as [`Error::Malformed`].
    pub fn new<S: AsRef<str>>(
        events: Vec<(EventId, Label)>,
        configurations: Vec<Vec<S>>,
    ) -> Result<Self> {
        if events.len() > MAX_EVENTS_HARD {
            return Err(Error::Capacity {
                what: "event count",
                actual: events.len(),
                limit: MAX_EVENTS_HARD,
            });
        }
        let mut events = events;
        events.sort_by(|a, b| a.0.cmp(&b.0));
        for w in events.windows(2) {
            if w[0].0 == w[1].0 {
                return Err(Error::Malformed(format!("duplicate event `{}`", w[0].0)));
            }
        }
        let position: HashMap<&str, usize> = events
            .iter()
            .enumerate()
            .map(|(i, (id, _))| (id.as_str(), i))
            .collect();

        let mut seen = HashSet::new();
        let mut configs = Vec::with_capacity(configurations.len());
        for ids in &configurations {
            let mut set = EventSet::EMPTY;
            for id in ids {
                let id = id.as_ref();
                let &e = position
                    .get(id)
                    .ok_or_else(|| Error::Malformed(format!("event `{id}` has no label")))?;
                if set.contains(e) {
                    return Err(Error::Malformed(format!(
                        "event `{id}` repeated within a configuration"
                    )));
                }
                set = set.with(e);
            }
            if !seen.insert(set) {
                let names: Vec<&str> = ids.iter().map(|s| s.as_ref()).collect();
                return Err(Error::Malformed(format!(
                    "duplicate configuration [{}]",
                    names.join(",")
                )));
            }
            configs.push(set);
        }
        let used = configs.iter().fold(EventSet::EMPTY, |acc, c| acc.union(*c));
        if let Some(i) = (0..events.len()).find(|&i| !used.contains(i)) {
            return Err(Error::Malformed(format!(
                "event `{}` occurs in no configuration",
                events[i].0
            )));
        }
        let (ids, labels) = events.into_iter().unzip();
        Ok(Self::assemble(ids, labels, configs))
    }

    fn assemble(events: Vec<EventId>, labels: Vec<Label>, mut configs: Vec<Configuration>) -> Self {
        configs.sort();
        configs.dedup();
        let index = configs.iter().enumerate().map(|(i, c)| (*c, i)).collect();
        ConfigStructure {
            events,
            labels,
            configs,
            index,
            orders: OnceLock::new(),
        }
    }

    pub fn num_events(&self) -> usize {
        self.events.len()
    }

    pub fn num_configurations(&self) -> usize {
        self.configs.len()
    }

    pub fn event_ids(&self) -> &[EventId] {
        &self.events
    }

    pub fn event_id(&self, e: usize) -> &EventId {
        &self.events[e]
    }

    pub fn labels(&self) -> &[Label] {
        &self.labels
    }

    pub fn label(&self, e: usize) -> &Label {
        &self.labels[e]
    }

    pub fn event_index(&self, id: &str) -> Option<usize> {
        self.events.binary_search_by(|e| e.as_str().cmp(id)).ok()
    }

    /// All events as a set.
    pub fn all_events(&self) -> EventSet {
        (0..self.events.len()).collect()
    }

    /// Configurations in canonical order.
    pub fn configurations(&self) -> &[Configuration] {
        &self.configs
    }

    pub fn contains(&self, c: Configuration) -> bool {
        self.index.contains_key(&c)
    }

    pub fn index_of(&self, c: Configuration) -> Option<usize> {
        self.index.get(&c).copied()
    }

    pub(crate) fn require(&self, c: Configuration) -> Result<usize> {
        self.index_of(c)
            .ok_or_else(|| Error::NotAConfiguration(self.render(c)))
    }

    /// Event set named by a list of identifiers. The set need not be a
    /// configuration.
    pub fn event_set<S: AsRef<str>>(&self, ids: &[S]) -> Result<EventSet> {
        ids.iter().try_fold(EventSet::EMPTY, |acc, id| {
            let id = id.as_ref();
            self.event_index(id)
                .map(|e| acc.with(e))
                .ok_or_else(|| Error::UnknownEvent(id.to_string()))
        })
    }

    /// Like [`event_set`](Self::event_set) but insists on a configuration.
    pub fn configuration<S: AsRef<str>>(&self, ids: &[S]) -> Result<Configuration> {
        let c = self.event_set(ids)?;
        self.require(c)?;
        Ok(c)
    }

    pub fn ids(&self, set: EventSet) -> Vec<&EventId> {
        set.iter().map(|e| &self.events[e]).collect()
    }

    /// `{a,b}` rendering with identifiers in sorted order.
    pub fn render(&self, set: EventSet) -> String {
        let ids: Vec<&str> = set.iter().map(|e| self.events[e].as_str()).collect();
        format!("{{{}}}", ids.join(","))
    }

    pub fn label_multiset(&self, set: EventSet) -> LabelMultiset {
        set.iter().map(|e| self.labels[e].clone()).collect()
    }

    /// Re-expresses a set of this structure in `target` by identifier.
    /// Returns `None` if some identifier is unknown to `target`.
    pub fn transfer(&self, set: EventSet, target: &ConfigStructure) -> Option<EventSet> {
        set.iter().try_fold(EventSet::EMPTY, |acc, e| {
            target
                .event_index(self.events[e].as_str())
                .map(|t| acc.with(t))
        })
    }

    /// Substructure on the given configurations, with labels restricted to the
    /// events they use.
    pub(crate) fn restrict(
        &self,
        configs: impl IntoIterator<Item = Configuration>,
    ) -> ConfigStructure {
        let configs: Vec<Configuration> = configs.into_iter().collect();
        let used = configs.iter().fold(EventSet::EMPTY, |acc, c| acc.union(*c));
        let keep: Vec<usize> = used.iter().collect();
        // events stay sorted, so renumbering preserves order
        let remap = |c: Configuration| -> Configuration {
            keep.iter()
                .enumerate()
                .filter(|(_, &old)| c.contains(old))
                .map(|(new, _)| new)
                .collect()
        };
        Self::assemble(
            keep.iter().map(|&e| self.events[e].clone()).collect(),
            keep.iter().map(|&e| self.labels[e].clone()).collect(),
            configs.into_iter().map(remap).collect(),
        )
    }

    pub(crate) fn orders(&self) -> &[ConfigOrder] {
        self.orders.get_or_init(|| {
            self.configs
                .iter()
                .map(|&x| self.compute_order(x))
                .collect()
        })
    }

    pub(crate) fn order(&self, idx: usize) -> &ConfigOrder {
        &self.orders()[idx]
    }

    fn compute_order(&self, x: Configuration) -> ConfigOrder {
        let n = self.events.len();
        let mut downsets = vec![EventSet::EMPTY; n];
        for e in x.iter() {
            downsets[e] = x;
        }
        for &y in self.configs.iter().filter(|y| y.is_subset(x)) {
            for e in y.iter() {
                downsets[e] = downsets[e].intersection(y);
            }
        }
        let mut partial_order = true;
        for d in x.iter() {
            for e in x.iter().filter(|&e| e > d) {
                if downsets[e].contains(d) && downsets[d].contains(e) {
                    partial_order = false;
                }
            }
        }
        let mut by_size: Vec<usize> = x.iter().collect();
        by_size.sort_by_key(|&e| downsets[e].len());
        let mut depth = vec![0usize; n];
        for &e in &by_size {
            let own = downsets[e].len();
            depth[e] = 1 + downsets[e]
                .without(e)
                .iter()
                .filter(|&d| downsets[d].len() < own)
                .map(|d| depth[d])
                .max()
                .unwrap_or(0);
        }
        let minimal = x
            .iter()
            .filter(|&e| downsets[e] == EventSet::singleton(e))
            .collect();
        ConfigOrder {
            downsets,
            depth,
            minimal,
            partial_order,
        }
    }

    /// Serialises to the structure exchange document.
    pub fn to_json(&self) -> String {
        let doc = Document {
            events: self
                .events
                .iter()
                .zip(&self.labels)
                .map(|(id, label)| EventEntry {
                    id: id.0.clone(),
                    label: label.0.clone(),
                })
                .collect(),
            configurations: self
                .configs
                .iter()
                .map(|c| c.iter().map(|e| self.events[e].0.clone()).collect())
                .collect(),
        };
        let mut out = serde_json::to_string_pretty(&doc).expect("document serialises");
        out.push('\n');
        out
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: Document = serde_json::from_str(text)?;
        let events = doc
            .events
            .into_iter()
            .map(|ev| Ok((EventId::new(ev.id)?, Label::new(ev.label)?)))
            .collect::<Result<Vec<_>>>()?;
        ConfigStructure::new(events, doc.configurations)
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Document {
    events: Vec<EventEntry>,
    configurations: Vec<Vec<String>>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct EventEntry {
    id: String,
    label: String,
}

/// A configuration family under construction, with events numbered in
/// creation order. Used to build structures compositionally: prefixing,
/// choice (disjoint events, shared empty configuration) and parallel
/// composition without synchronisation.
#[derive(Clone, Debug)]
pub struct Family {
    labels: Vec<Label>,
    configs: Vec<u64>,
}

impl Family {
    /// The structure with only the empty configuration.
    pub fn nil() -> Self {
        Family {
            labels: Vec::new(),
            configs: vec![0],
        }
    }

    /// A family over events `0..labels.len()`. Rejects duplicate sets and
    /// sets mentioning unknown events; the empty set is not added.
    pub fn from_sets(labels: Vec<Label>, configs: Vec<EventSet>) -> Result<Self> {
        Self::check_width(labels.len())?;
        let universe = (0..labels.len()).fold(EventSet::EMPTY, |acc, e| acc.with(e));
        let mut seen = HashSet::new();
        for c in &configs {
            if !c.is_subset(universe) {
                return Err(Error::Malformed(format!(
                    "set {c:?} mentions an unknown event"
                )));
            }
            if !seen.insert(*c) {
                return Err(Error::Malformed(format!("duplicate set {c:?}")));
            }
        }
        Ok(Family {
            labels,
            configs: configs.into_iter().map(EventSet::bits).collect(),
        })
    }

    pub fn num_events(&self) -> usize {
        self.labels.len()
    }

    pub fn num_configurations(&self) -> usize {
        self.configs.len()
    }

    fn check_width(n: usize) -> Result<()> {
        if n > MAX_EVENTS_HARD {
            return Err(Error::Capacity {
                what: "event count",
                actual: n,
                limit: MAX_EVENTS_HARD,
            });
        }
        Ok(())
    }

    fn shift(c: u64, by: usize) -> u64 {
        if by >= 64 {
            0
        } else {
            c << by
        }
    }

    /// A fresh event labelled `label` that precedes everything in `body`.
    pub fn prefix(label: Label, body: Family) -> Result<Self> {
        Self::check_width(body.labels.len() + 1)?;
        let mut labels = Vec::with_capacity(body.labels.len() + 1);
        labels.push(label);
        labels.extend(body.labels);
        let mut configs = vec![0u64];
        configs.extend(body.configs.iter().map(|&c| (c << 1) | 1));
        Ok(Family { labels, configs })
    }

    pub fn choice(left: Family, right: Family) -> Result<Self> {
        let k = left.labels.len();
        Self::check_width(k + right.labels.len())?;
        let mut seen: HashSet<u64> = left.configs.iter().copied().collect();
        let mut configs = left.configs;
        for c in right.configs {
            let c = Self::shift(c, k);
            if seen.insert(c) {
                configs.push(c);
            }
        }
        let mut labels = left.labels;
        labels.extend(right.labels);
        Ok(Family { labels, configs })
    }

    pub fn parallel(left: Family, right: Family, limits: &Limits) -> Result<Self> {
        let k = left.labels.len();
        Self::check_width(k + right.labels.len())?;
        let product = left.configs.len().saturating_mul(right.configs.len());
        if product > limits.max_configurations {
            return Err(Error::Capacity {
                what: "configuration count",
                actual: product,
                limit: limits.max_configurations,
            });
        }
        let configs = right
            .configs
            .iter()
            .flat_map(|&r| left.configs.iter().map(move |&l| l | Self::shift(r, k)))
            .collect();
        let mut labels = left.labels;
        labels.extend(right.labels);
        Ok(Family { labels, configs })
    }

    /// Builds a family from an existing structure, keeping its event order.
    pub fn from_structure(s: &ConfigStructure) -> Self {
        Family {
            labels: s.labels.clone(),
            configs: s.configs.iter().map(|c| c.bits()).collect(),
        }
    }

    /// Names event `i` as `e{i+1}`.
    pub fn into_structure(self) -> ConfigStructure {
        let events: Vec<(EventId, Label)> = self
            .labels
            .into_iter()
            .enumerate()
            .map(|(i, l)| (EventId(format!("e{}", i + 1)), l))
            .collect();
        let n = events.len();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| events[a].0.cmp(&events[b].0));
        let mut new_of_old = vec![0usize; n];
        for (new, &old) in order.iter().enumerate() {
            new_of_old[old] = new;
        }
        let configs = self
            .configs
            .iter()
            .map(|&c| EventSet(c).iter().map(|old| new_of_old[old]).collect())
            .collect();
        let (ids, labels) = order.iter().map(|&old| events[old].clone()).unzip();
        ConfigStructure::assemble(ids, labels, configs)
    }
}
