//! Causality, concurrency and depth inside a configuration, plus the derived
//! constructions built on them: minimal events, lifting and depth slices.

use crate::error::{Error, Result};
use crate::structure::{ConfigStructure, Configuration, EventSet};
use crate::validate::validate;

/// Causal order of one configuration.
///
/// `d <=_X e` holds when every sub-configuration of `X` containing `e` also
/// contains `d`. Concurrency is kept for distinct events only.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CausalContext {
    configuration: Configuration,
    downsets: Vec<EventSet>,
}

impl CausalContext {
    pub fn configuration(&self) -> Configuration {
        self.configuration
    }

    pub fn leq(&self, d: usize, e: usize) -> bool {
        self.configuration.contains(e) && self.downsets[e].contains(d)
    }

    pub fn lt(&self, d: usize, e: usize) -> bool {
        d != e && self.leq(d, e)
    }

    pub fn concurrent(&self, d: usize, e: usize) -> bool {
        d != e
            && self.configuration.contains(d)
            && self.configuration.contains(e)
            && !self.lt(d, e)
            && !self.lt(e, d)
    }

    /// `{ d : d <=_X e }`.
    pub fn down(&self, e: usize) -> EventSet {
        if self.configuration.contains(e) {
            self.downsets[e]
        } else {
            EventSet::EMPTY
        }
    }

    pub fn leq_pairs(&self) -> Vec<(usize, usize)> {
        self.configuration
            .iter()
            .flat_map(|e| self.downsets[e].iter().map(move |d| (d, e)))
            .collect()
    }

    pub fn strict_pairs(&self) -> Vec<(usize, usize)> {
        self.leq_pairs()
            .into_iter()
            .filter(|(d, e)| d != e)
            .collect()
    }

    /// Unordered concurrent pairs, each reported once as `(d, e)` with `d < e`.
    pub fn concurrent_pairs(&self) -> Vec<(usize, usize)> {
        let x = self.configuration;
        x.iter()
            .flat_map(|d| x.iter().filter(move |&e| e > d).map(move |e| (d, e)))
            .filter(|&(d, e)| self.concurrent(d, e))
            .collect()
    }
}

pub fn causality(s: &ConfigStructure, x: Configuration) -> Result<CausalContext> {
    let idx = s.require(x)?;
    Ok(CausalContext {
        configuration: x,
        downsets: s.order(idx).downsets.clone(),
    })
}

/// Depth of every event of a configuration: the length of the longest causal
/// chain ending in it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DepthMap {
    configuration: Configuration,
    depth: Vec<usize>,
}

impl DepthMap {
    pub fn configuration(&self) -> Configuration {
        self.configuration
    }

    pub fn get(&self, e: usize) -> Option<usize> {
        self.configuration.contains(e).then(|| self.depth[e])
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.configuration.iter().map(|e| (e, self.depth[e]))
    }

    /// Largest depth, 0 for the empty configuration.
    pub fn height(&self) -> usize {
        self.iter().map(|(_, k)| k).max().unwrap_or(0)
    }
}

pub fn depths(s: &ConfigStructure, x: Configuration) -> Result<DepthMap> {
    let idx = s.require(x)?;
    let order = s.order(idx);
    if !order.partial_order {
        return Err(Error::NotPartialOrder(s.render(x)));
    }
    Ok(DepthMap {
        configuration: x,
        depth: order.depth.clone(),
    })
}

/// Events of `x` with no causal predecessor in `x`.
pub fn minimal_events(s: &ConfigStructure, x: Configuration) -> Result<Configuration> {
    let idx = s.require(x)?;
    Ok(s.order(idx).minimal)
}

/// The structure of residuals `X \ M` over configurations `X ⊇ M` whose
/// minimal events are exactly `M`.
pub fn lift(s: &ConfigStructure, m: Configuration) -> Result<ConfigStructure> {
    let idx = s.require(m)?;
    if s.order(idx).minimal != m {
        return Err(Error::NotMinimal(s.render(m)));
    }
    let residuals: Vec<Configuration> = s
        .configurations()
        .iter()
        .enumerate()
        .filter(|&(j, x)| m.is_subset(*x) && s.order(j).minimal == m)
        .map(|(_, x)| x.difference(m))
        .collect();
    Ok(s.restrict(residuals))
}

/// `{ e ∈ X : lo <= depth_X(e) <= hi }`.
pub fn slice(s: &ConfigStructure, x: Configuration, lo: usize, hi: usize) -> Result<EventSet> {
    let d = depths(s, x)?;
    Ok(d.iter()
        .filter(|&(_, k)| lo <= k && k <= hi)
        .map(|(e, _)| e)
        .collect())
}

/// `X_{<=n}`; always a configuration when the structure is stable.
pub fn slice_leq(s: &ConfigStructure, x: Configuration, n: usize) -> Result<EventSet> {
    slice(s, x, 1, n)
}

/// `X_{>=n}`.
pub fn slice_geq(s: &ConfigStructure, x: Configuration, n: usize) -> Result<EventSet> {
    slice(s, x, n, usize::MAX)
}

/// Two distinct concurrent events with the same label inside `configuration`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct AutoConcurrencyWitness {
    pub configuration: Configuration,
    pub first: usize,
    pub second: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AutoConcurrencyReport {
    pub auto_concurrency: Option<AutoConcurrencyWitness>,
    /// As above, with the two events additionally at equal depth.
    pub equidepth_auto_concurrency: Option<AutoConcurrencyWitness>,
}

impl AutoConcurrencyReport {
    pub fn has_auto_concurrency(&self) -> bool {
        self.auto_concurrency.is_some()
    }

    pub fn has_equidepth_auto_concurrency(&self) -> bool {
        self.equidepth_auto_concurrency.is_some()
    }
}

/// Scans every configuration for auto-concurrency. The structure must be
/// stable.
pub fn auto_concurrency(s: &ConfigStructure) -> Result<AutoConcurrencyReport> {
    if !validate(s)?.stable() {
        return Err(Error::NotStable(
            "auto-concurrency is only defined on stable structures".into(),
        ));
    }
    Ok(auto_concurrency_unchecked(s))
}

pub(crate) fn auto_concurrency_unchecked(s: &ConfigStructure) -> AutoConcurrencyReport {
    let mut report = AutoConcurrencyReport {
        auto_concurrency: None,
        equidepth_auto_concurrency: None,
    };
    for (idx, &x) in s.configurations().iter().enumerate() {
        let order = s.order(idx);
        for d in x.iter() {
            for e in x.iter().filter(|&e| e > d) {
                if s.label(d) != s.label(e) || !order.concurrent(d, e) {
                    continue;
                }
                let w = AutoConcurrencyWitness {
                    configuration: x,
                    first: d,
                    second: e,
                };
                report.auto_concurrency.get_or_insert(w);
                if order.depth[d] == order.depth[e] {
                    report.equidepth_auto_concurrency.get_or_insert(w);
                    return report;
                }
            }
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::terms::translate_str;

    #[test]
    fn chain_has_strict_order_and_depths() {
        let s = translate_str("a.a").unwrap();
        let x = s.configuration(&["e1", "e2"]).unwrap();
        let c = causality(&s, x).unwrap();
        assert!(c.lt(0, 1));
        assert!(c.concurrent_pairs().is_empty());
        let d = depths(&s, x).unwrap();
        assert_eq!((d.get(0), d.get(1)), (Some(1), Some(2)));
        assert_eq!(minimal_events(&s, x).unwrap(), EventSet::singleton(0));
        assert_eq!(slice_leq(&s, x, 1).unwrap(), EventSet::singleton(0));
        assert_eq!(slice(&s, x, 2, 2).unwrap(), EventSet::singleton(1));
    }

    #[test]
    fn free_pair_is_concurrent() {
        let s = translate_str("a | a").unwrap();
        let x = s.configuration(&["e1", "e2"]).unwrap();
        assert_eq!(causality(&s, x).unwrap().concurrent_pairs(), vec![(0, 1)]);
        assert_eq!(minimal_events(&s, x).unwrap(), x);
        assert_eq!(
            minimal_events(&s, EventSet::EMPTY).unwrap(),
            EventSet::EMPTY
        );
    }

    #[test]
    fn unknown_configuration_is_rejected() {
        let s = translate_str("a.a").unwrap();
        let bogus = EventSet::singleton(1);
        assert!(matches!(
            causality(&s, bogus),
            Err(Error::NotAConfiguration(_))
        ));
        assert!(matches!(
            depths(&s, bogus),
            Err(Error::NotAConfiguration(_))
        ));
        assert!(matches!(lift(&s, bogus), Err(Error::NotAConfiguration(_))));
    }

    #[test]
    fn lifting_examples() {
        let chain = translate_str("a.a").unwrap();
        let lifted = lift(&chain, chain.configuration(&["e1"]).unwrap()).unwrap();
        assert_eq!(lifted.num_configurations(), 2);
        assert_eq!(lifted.event_ids()[0].as_str(), "e2");
        assert_eq!(lifted.label(0).as_str(), "a");

        let trivial = lift(&chain, EventSet::EMPTY).unwrap();
        assert_eq!(trivial.configurations(), &[EventSet::EMPTY]);

        let par = translate_str("a|a").unwrap();
        let full = par.configuration(&["e1", "e2"]).unwrap();
        assert_eq!(
            lift(&par, full).unwrap().configurations(),
            &[EventSet::EMPTY]
        );

        let chain_full = chain.configuration(&["e1", "e2"]).unwrap();
        assert!(matches!(
            lift(&chain, chain_full),
            Err(Error::NotMinimal(_))
        ));
    }

    #[test]
    fn auto_concurrency_examples() {
        let r = auto_concurrency(&translate_str("a|a").unwrap()).unwrap();
        assert!(r.has_auto_concurrency() && r.has_equidepth_auto_concurrency());
        let r = auto_concurrency(&translate_str("a|b.a").unwrap()).unwrap();
        assert!(r.has_auto_concurrency() && !r.has_equidepth_auto_concurrency());
        let r = auto_concurrency(&translate_str("a.a").unwrap()).unwrap();
        assert!(!r.has_auto_concurrency() && !r.has_equidepth_auto_concurrency());
    }
}
