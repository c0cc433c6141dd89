//! Bounded axiomatic proof search for the subtyping preorders, used to
//! cross-check the structural decision procedure.
//!
//! The search works on raw type syntax, never on canonical forms: a goal
//! `a <= b` is decided by exploring chains of single axiom applications.
//! Every axiom of the theories is either an equality (both directions
//! derivable, so applicable at any position) or strictly one-directional
//! (`a <= w` and the two projections of `/\`), which must respect the
//! polarity of the position: the left side of an arrow flips it.
//!
//! States are kept in an associative/commutative/idempotent normal form for
//! intersections; those reshufflings are derivable equalities and cost no
//! steps. The search runs breadth-first from both endpoints and meets in the
//! middle; `false` answers are conclusive only when the bounded exploration
//! has in fact exhausted the reachable states, which the agreement suites
//! validate empirically on their envelope.

use std::collections::{HashMap, HashSet, VecDeque};

use crate::syntax::Location;
use crate::types::Sort;

/// Raw (non-canonical) type expressions over the four sorts.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum RawType {
    WD,
    WS,
    WC,
    WT,
    /// `d -> t` or `s -> k`, depending on the operand sorts.
    Arrow(Box<RawType>, Box<RawType>),
    /// `<l : d>`.
    Entry(Location, Box<RawType>),
    /// `d x s`.
    Prod(Box<RawType>, Box<RawType>),
    And(Box<RawType>, Box<RawType>),
}

impl RawType {
    pub fn arrow(a: RawType, b: RawType) -> RawType {
        RawType::Arrow(Box::new(a), Box::new(b))
    }

    pub fn entry(l: Location, d: RawType) -> RawType {
        RawType::Entry(l, Box::new(d))
    }

    pub fn prod(d: RawType, s: RawType) -> RawType {
        RawType::Prod(Box::new(d), Box::new(s))
    }

    pub fn and(a: RawType, b: RawType) -> RawType {
        RawType::And(Box::new(a), Box::new(b))
    }

    /// Sort of a raw expression, if well-sorted.
    pub fn sort(&self) -> Option<Sort> {
        match self {
            RawType::WD => Some(Sort::Value),
            RawType::WS => Some(Sort::Store),
            RawType::WC => Some(Sort::Result),
            RawType::WT => Some(Sort::Comp),
            RawType::Entry(_, d) => (d.sort()? == Sort::Value).then_some(Sort::Store),
            RawType::Prod(d, s) => {
                (d.sort()? == Sort::Value && s.sort()? == Sort::Store).then_some(Sort::Result)
            }
            RawType::Arrow(a, b) => match (a.sort()?, b.sort()?) {
                (Sort::Value, Sort::Comp) => Some(Sort::Value),
                (Sort::Store, Sort::Result) => Some(Sort::Comp),
                _ => None,
            },
            RawType::And(a, b) => {
                let s = a.sort()?;
                (b.sort()? == s).then_some(s)
            }
        }
    }

    fn size(&self) -> usize {
        match self {
            RawType::WD | RawType::WS | RawType::WC | RawType::WT => 1,
            RawType::Entry(_, d) => 1 + d.size(),
            RawType::Arrow(a, b) | RawType::Prod(a, b) | RawType::And(a, b) => {
                1 + a.size() + b.size()
            }
        }
    }

    fn omega(sort: Sort) -> RawType {
        match sort {
            Sort::Value => RawType::WD,
            Sort::Store => RawType::WS,
            Sort::Result => RawType::WC,
            Sort::Comp => RawType::WT,
        }
    }

    fn is_omega(&self) -> bool {
        matches!(self, RawType::WD | RawType::WS | RawType::WC | RawType::WT)
    }
}

/// Flattens intersections into a sorted, deduplicated member list, dropping
/// omega members. Associativity, commutativity, idempotency and `a /\ w = a`
/// are all derivable equalities.
fn ac_norm(t: &RawType) -> RawType {
    match t {
        RawType::WD | RawType::WS | RawType::WC | RawType::WT => t.clone(),
        RawType::Entry(l, d) => RawType::entry(*l, ac_norm(d)),
        RawType::Arrow(a, b) => RawType::arrow(ac_norm(a), ac_norm(b)),
        RawType::Prod(a, b) => RawType::prod(ac_norm(a), ac_norm(b)),
        RawType::And(_, _) => {
            let sort = t.sort().expect("oracle inputs are well-sorted");
            let mut members = Vec::new();
            collect_members(t, &mut members);
            let mut members: Vec<RawType> = members
                .into_iter()
                .map(|m| ac_norm(&m))
                .filter(|m| !m.is_omega())
                .collect();
            members.sort();
            members.dedup();
            rebuild_and(members, sort)
        }
    }
}

fn collect_members(t: &RawType, out: &mut Vec<RawType>) {
    match t {
        RawType::And(a, b) => {
            collect_members(a, out);
            collect_members(b, out);
        }
        other => out.push(other.clone()),
    }
}

fn rebuild_and(mut members: Vec<RawType>, sort: Sort) -> RawType {
    match members.len() {
        0 => RawType::omega(sort),
        1 => members.pop().unwrap(),
        _ => {
            let last = members.pop().unwrap();
            RawType::and(rebuild_and(members, sort), last)
        }
    }
}

fn members_of(t: &RawType) -> Vec<RawType> {
    let mut out = Vec::new();
    collect_members(t, &mut out);
    out
}

/// One-step rewrites of the node itself. Equality axioms ignore polarity;
/// the strict steps (`a <= w`, projections, and their mirrors) consult it.
/// `positive` means replacing the node by something larger enlarges the
/// whole type.
fn node_steps(t: &RawType, positive: bool, menu: &[RawType], out: &mut Vec<RawType>) {
    let sort = t.sort().expect("well-sorted");

    // Strict direction: x => w (drop information). Mirrors: w => menu type.
    if positive {
        if !t.is_omega() {
            out.push(RawType::omega(sort));
        }
        // Projection: drop one member of an intersection.
        let members = members_of(t);
        if members.len() > 1 {
            for i in 0..members.len() {
                let mut rest = members.clone();
                rest.remove(i);
                out.push(rebuild_and(rest, sort));
            }
        }
    } else {
        if t.is_omega() {
            for m in menu.iter().filter(|m| m.sort() == Some(sort)) {
                out.push(m.clone());
            }
        }
        // Mirror of projection: extend an intersection by a menu member.
        for m in menu.iter().filter(|m| m.sort() == Some(sort)) {
            out.push(RawType::and(t.clone(), m.clone()));
        }
    }

    // Equality: wD = wD -> wT and wT = wS -> wC, both directions.
    match t {
        RawType::WD => out.push(RawType::arrow(RawType::WD, RawType::WT)),
        RawType::WT => out.push(RawType::arrow(RawType::WS, RawType::WC)),
        RawType::Arrow(a, b) => {
            if **a == RawType::WD && **b == RawType::WT {
                out.push(RawType::WD);
            }
            if **a == RawType::WS && **b == RawType::WC {
                out.push(RawType::WT);
            }
        }
        _ => {}
    }

    // Equality: distribution of /\ over same-source arrows, record entries,
    // and products; merging direction.
    let members = members_of(t);
    if members.len() > 1 {
        for i in 0..members.len() {
            for j in (i + 1)..members.len() {
                if let Some(merged) = merge_pair(&members[i], &members[j]) {
                    let mut rest: Vec<RawType> = members.clone();
                    rest.remove(j);
                    rest.remove(i);
                    rest.push(merged);
                    out.push(rebuild_and(rest, sort));
                }
            }
        }
    }

    // Splitting direction of the same equalities.
    for (idx, m) in members.iter().enumerate() {
        for split in split_one(m) {
            if members.len() == 1 {
                out.push(split);
            } else {
                let mut rest = members.clone();
                rest.remove(idx);
                rest.extend(members_of(&split));
                out.push(rebuild_and(rest, sort));
            }
        }
    }
}

/// Merges two intersection members when an equality axiom applies.
fn merge_pair(a: &RawType, b: &RawType) -> Option<RawType> {
    match (a, b) {
        (RawType::Arrow(sa, ta), RawType::Arrow(sb, tb)) if sa == sb => Some(RawType::arrow(
            (**sa).clone(),
            RawType::and((**ta).clone(), (**tb).clone()),
        )),
        (RawType::Entry(la, da), RawType::Entry(lb, db)) if la == lb => Some(RawType::entry(
            *la,
            RawType::and((**da).clone(), (**db).clone()),
        )),
        (RawType::Prod(da, sa), RawType::Prod(db, sb)) => Some(RawType::prod(
            RawType::and((**da).clone(), (**db).clone()),
            RawType::and((**sa).clone(), (**sb).clone()),
        )),
        _ => None,
    }
}

/// Splits one member along an equality axiom: peel a single conjunct out of
/// an arrow target, a record entry, or a product.
fn split_one(m: &RawType) -> Vec<RawType> {
    let mut out = Vec::new();
    match m {
        RawType::Arrow(src, tgt) => {
            let parts = members_of(tgt);
            if parts.len() > 1 {
                for i in 0..parts.len() {
                    let mut rest = parts.clone();
                    let one = rest.remove(i);
                    let tsort = tgt.sort().expect("well-sorted");
                    out.push(RawType::and(
                        RawType::arrow((**src).clone(), one),
                        RawType::arrow((**src).clone(), rebuild_and(rest, tsort)),
                    ));
                }
            }
        }
        RawType::Entry(l, d) => {
            let parts = members_of(d);
            if parts.len() > 1 {
                for i in 0..parts.len() {
                    let mut rest = parts.clone();
                    let one = rest.remove(i);
                    out.push(RawType::and(
                        RawType::entry(*l, one),
                        RawType::entry(*l, rebuild_and(rest, Sort::Value)),
                    ));
                }
            }
        }
        RawType::Prod(d, s) => {
            let dparts = members_of(d);
            let sparts = members_of(s);
            // Peel a (value part, store part) pair; omega stands for the
            // empty side.
            for i in 0..=dparts.len() {
                for j in 0..=sparts.len() {
                    if (i == dparts.len() || dparts.len() == 1)
                        && (j == sparts.len() || sparts.len() == 1)
                    {
                        continue;
                    }
                    let (d1, d2) = peel(&dparts, i, Sort::Value);
                    let (s1, s2) = peel(&sparts, j, Sort::Store);
                    out.push(RawType::and(RawType::prod(d1, s1), RawType::prod(d2, s2)));
                }
            }
        }
        _ => {}
    }
    out
}

/// Splits `parts` into (chosen element, rest); index `len` chooses omega.
fn peel(parts: &[RawType], i: usize, sort: Sort) -> (RawType, RawType) {
    if i == parts.len() {
        (RawType::omega(sort), rebuild_and(parts.to_vec(), sort))
    } else {
        let mut rest = parts.to_vec();
        let one = rest.remove(i);
        (one, rebuild_and(rest, sort))
    }
}

/// All types reachable from `t` by one rewrite at any position. `enlarge`
/// selects whether the whole type should grow or shrink in the preorder.
fn neighbors(t: &RawType, enlarge: bool, menu: &[RawType], cap: usize) -> Vec<RawType> {
    let mut raw = Vec::new();
    rewrite_at(t, enlarge, menu, &mut raw, &mut |x| x);
    raw.into_iter()
        .map(|x| ac_norm(&x))
        .filter(|x| x.size() <= cap)
        .collect()
}

fn rewrite_at(
    t: &RawType,
    positive: bool,
    menu: &[RawType],
    out: &mut Vec<RawType>,
    wrap: &mut dyn FnMut(RawType) -> RawType,
) {
    let mut local = Vec::new();
    node_steps(t, positive, menu, &mut local);
    for n in local {
        out.push(wrap(n));
    }
    match t {
        RawType::Arrow(a, b) => {
            let (ac, bc) = ((**a).clone(), (**b).clone());
            // Arrow sources are contravariant.
            rewrite_at(a, !positive, menu, out, &mut |x| {
                wrap(RawType::arrow(x, bc.clone()))
            });
            let ac2 = ac;
            rewrite_at(b, positive, menu, out, &mut |x| {
                wrap(RawType::arrow(ac2.clone(), x))
            });
        }
        RawType::Entry(l, d) => {
            let l = *l;
            rewrite_at(d, positive, menu, out, &mut |x| wrap(RawType::entry(l, x)));
        }
        RawType::Prod(a, b) => {
            let (ac, bc) = ((**a).clone(), (**b).clone());
            rewrite_at(a, positive, menu, out, &mut |x| {
                wrap(RawType::prod(x, bc.clone()))
            });
            rewrite_at(b, positive, menu, out, &mut |x| {
                wrap(RawType::prod(ac.clone(), x))
            });
        }
        RawType::And(a, b) => {
            let (ac, bc) = ((**a).clone(), (**b).clone());
            rewrite_at(a, positive, menu, out, &mut |x| {
                wrap(RawType::and(x, bc.clone()))
            });
            rewrite_at(b, positive, menu, out, &mut |x| {
                wrap(RawType::and(ac.clone(), x))
            });
        }
        _ => {}
    }
}

/// Collects candidate instantiations: all subterms of both endpoints.
fn menu_of(a: &RawType, b: &RawType) -> Vec<RawType> {
    let mut set = HashSet::new();
    subterms(a, &mut set);
    subterms(b, &mut set);
    let mut v: Vec<RawType> = set.into_iter().map(|t| ac_norm(&t)).collect();
    v.sort();
    v.dedup();
    v
}

fn subterms(t: &RawType, out: &mut HashSet<RawType>) {
    out.insert(t.clone());
    match t {
        RawType::Entry(_, d) => subterms(d, out),
        RawType::Arrow(a, b) | RawType::Prod(a, b) | RawType::And(a, b) => {
            subterms(a, out);
            subterms(b, out);
        }
        _ => {}
    }
}

/// Searches for a derivation of `a <= b` of at most `depth` axiom steps.
/// Sound: `true` implies derivability. A `false` is exhaustive only within
/// the explored bound.
pub fn subtype_oracle(a: &RawType, b: &RawType, depth: usize) -> bool {
    if a.sort().is_none() || a.sort() != b.sort() {
        return false;
    }
    let start = ac_norm(a);
    let goal = ac_norm(b);
    if start == goal {
        return true;
    }
    let menu = menu_of(&start, &goal);
    let cap = start.size().max(goal.size()) + 6;
    let fwd = depth / 2 + depth % 2;
    let bwd = depth / 2;
    // Forward: types above `a`. Backward: types below `b`.
    let up = reach(&start, true, fwd, &menu, cap);
    if up.get(&goal).is_some() {
        return true;
    }
    let down = reach(&goal, false, bwd, &menu, cap);
    up.iter()
        .any(|(t, d1)| down.get(t).is_some_and(|d2| d1 + d2 <= depth))
}

fn reach(
    start: &RawType,
    enlarge: bool,
    depth: usize,
    menu: &[RawType],
    cap: usize,
) -> HashMap<RawType, usize> {
    let mut seen = HashMap::from([(start.clone(), 0)]);
    let mut queue = VecDeque::from([(start.clone(), 0usize)]);
    while let Some((cur, d)) = queue.pop_front() {
        if d >= depth {
            continue;
        }
        for next in neighbors(&cur, enlarge, menu, cap) {
            if !seen.contains_key(&next) {
                seen.insert(next.clone(), d + 1);
                queue.push_back((next, d + 1));
            }
        }
    }
    seen
}

#[cfg(test)]
mod tests {
    use super::*;

    fn l(i: u32) -> Location {
        Location(i)
    }

    fn conv() -> RawType {
        // wS -> wD x wS
        RawType::arrow(RawType::WS, RawType::prod(RawType::WD, RawType::WS))
    }

    #[test]
    fn reflexivity_without_steps() {
        assert!(subtype_oracle(&conv(), &conv(), 1));
        assert!(subtype_oracle(&RawType::WD, &RawType::WD, 0));
    }

    #[test]
    fn projection_in_one_step() {
        let both = RawType::and(conv(), RawType::arrow(RawType::WS, RawType::WC));
        assert!(subtype_oracle(&both, &conv(), 1));
    }

    #[test]
    fn anything_below_omega() {
        assert!(subtype_oracle(&conv(), &RawType::WT, 1));
    }

    #[test]
    fn omega_value_equals_trivial_arrow() {
        let arrow = RawType::arrow(RawType::WD, RawType::WT);
        assert!(subtype_oracle(&RawType::WD, &arrow, 2));
        assert!(subtype_oracle(&arrow, &RawType::WD, 2));
    }

    #[test]
    fn distinct_locations_never_related() {
        let a = RawType::entry(l(0), RawType::WD);
        let b = RawType::entry(l(1), RawType::WD);
        assert!(!subtype_oracle(&a, &b, 4));
    }

    #[test]
    fn store_top_not_below_entry() {
        let e = RawType::entry(l(0), RawType::WD);
        assert!(!subtype_oracle(&RawType::WS, &e, 4));
        assert!(subtype_oracle(&e, &RawType::WS, 1));
    }

    #[test]
    fn record_merge_both_directions() {
        let split = RawType::and(
            RawType::entry(l(0), RawType::WD),
            RawType::entry(l(0), RawType::arrow(RawType::WD, RawType::WT)),
        );
        let merged = RawType::entry(
            l(0),
            RawType::and(RawType::WD, RawType::arrow(RawType::WD, RawType::WT)),
        );
        assert!(subtype_oracle(&split, &merged, 3));
        assert!(subtype_oracle(&merged, &split, 3));
    }

    #[test]
    fn omega_result_not_below_product() {
        let prod = RawType::prod(RawType::WD, RawType::WS);
        assert!(!subtype_oracle(&RawType::WC, &prod, 4));
        assert!(subtype_oracle(&prod, &RawType::WC, 1));
    }

    #[test]
    fn arrow_contravariance() {
        // (wS -> wD x wS) <= (<l0:wD> -> wD x wS): smaller source set.
        let bigger_src = conv();
        let entry_src = RawType::arrow(
            RawType::entry(l(0), RawType::WD),
            RawType::prod(RawType::WD, RawType::WS),
        );
        assert!(subtype_oracle(&bigger_src, &entry_src, 2));
        assert!(!subtype_oracle(&entry_src, &bigger_src, 4));
    }
}
