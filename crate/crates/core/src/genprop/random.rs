//! Random terms and behaviour-changing or behaviour-preserving rewrites.

use rand::Rng;

use super::label_name;
use crate::terms::Term;

/// A term with exactly `events` prefixes over the first `alphabet` labels.
pub fn random_term<R: Rng>(rng: &mut R, events: usize, alphabet: usize) -> Term {
    if events == 0 {
        return Term::Nil;
    }
    if events == 1 || rng.gen_bool(0.4) {
        let a = label_name(rng.gen_range(0..alphabet.max(1)));
        return Term::prefix(a, random_term(rng, events - 1, alphabet));
    }
    let left = rng.gen_range(1..events);
    let (l, r) = (
        random_term(rng, left, alphabet),
        random_term(rng, events - left, alphabet),
    );
    if rng.gen_bool(0.5) {
        Term::choice(l, r)
    } else {
        Term::par(l, r)
    }
}

/// Swaps the operands of random choices and parallels. The result is
/// isomorphic to the input.
pub fn commute<R: Rng>(rng: &mut R, t: &Term) -> Term {
    match t {
        Term::Nil => Term::Nil,
        Term::Prefix(a, body) => Term::prefix(a.clone(), commute(rng, body)),
        Term::Choice(l, r) | Term::Par(l, r) => {
            let (mut l, mut r) = (commute(rng, l), commute(rng, r));
            if rng.gen_bool(0.5) {
                std::mem::swap(&mut l, &mut r);
            }
            if matches!(t, Term::Choice(..)) {
                Term::choice(l, r)
            } else {
                Term::par(l, r)
            }
        }
    }
}

/// Rewrites one `a.P | Q` (or `Q | a.P`) into `a.(P | Q)`, making `Q` wait
/// for `a`. Returns `None` if the term has no such subterm.
pub fn linearise<R: Rng>(rng: &mut R, t: &Term) -> Option<Term> {
    let sites = count_sites(t);
    if sites == 0 {
        return None;
    }
    let mut pick = rng.gen_range(0..sites);
    Some(rewrite(t, &mut pick))
}

fn is_site(t: &Term) -> bool {
    matches!(t, Term::Par(l, r) if matches!(**l, Term::Prefix(..)) || matches!(**r, Term::Prefix(..)))
}

fn count_sites(t: &Term) -> usize {
    let here = usize::from(is_site(t));
    here + match t {
        Term::Nil => 0,
        Term::Prefix(_, b) => count_sites(b),
        Term::Choice(l, r) | Term::Par(l, r) => count_sites(l) + count_sites(r),
    }
}

fn rewrite(t: &Term, pick: &mut usize) -> Term {
    if is_site(t) {
        if *pick == 0 {
            *pick = usize::MAX;
            if let Term::Par(l, r) = t {
                let (pre, other) = if matches!(**l, Term::Prefix(..)) {
                    (l, r)
                } else {
                    (r, l)
                };
                if let Term::Prefix(a, body) = pre.as_ref() {
                    return Term::prefix(a.clone(), Term::par((**body).clone(), (**other).clone()));
                }
            }
        }
        *pick = pick.wrapping_sub(1);
    }
    match t {
        Term::Nil => Term::Nil,
        Term::Prefix(a, b) => Term::prefix(a.clone(), rewrite(b, pick)),
        Term::Choice(l, r) => {
            let l = rewrite(l, pick);
            Term::choice(l, rewrite(r, pick))
        }
        Term::Par(l, r) => {
            let l = rewrite(l, pick);
            Term::par(l, rewrite(r, pick))
        }
    }
}
