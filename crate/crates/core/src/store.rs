//! The equational algebra of store and lookup terms.
//!
//! Store terms are built from `emp` and `upd(l, u, s)`; a lookup `lkp(l, s)`
//! is well-formed only when `l` is in the domain of `s`. The governing
//! equations are
//!
//! 1. `lkp(l, upd(l, u, s)) = u`
//! 2. `lkp(l, upd(l', u, s)) = lkp(l, s)` for `l /= l'`
//! 3. `upd(l, lkp(l, s), s) = s`
//! 4. `upd(l, u, upd(l, w, s)) = upd(l, u, s)`
//! 5. `upd(l, u, upd(l', w, s)) = upd(l', w, upd(l, u, s))` for `l /= l'`
//!
//! Derivable equality coincides with extensional equivalence (same domain,
//! same resolved value at every location), which makes it decidable:
//! [`store_eq`] normalizes and compares. [`rewrite_oracle`] is a brute-force
//! search over the axioms used to cross-check that claim in tests.

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::fmt;
use std::sync::Arc;

use crate::syntax::{alpha_eq_value, canonical_rename_value, Location, Value, VarSet};

/// A syntactic store: a finite map built from updates.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum StoreTerm {
    Emp,
    Upd(Location, LookupTerm, Arc<StoreTerm>),
}

/// The argument of an update: a value, or a lookup into another store.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum LookupTerm {
    Val(Value),
    Lkp(Location, Arc<StoreTerm>),
}

pub type LocationSet = BTreeSet<Location>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StoreError {
    /// A lookup was attempted (or written) at a location outside the domain.
    UndefinedLocation(Location),
}

impl fmt::Display for StoreError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StoreError::UndefinedLocation(l) => {
                write!(f, "location {l} is not in the store domain")
            }
        }
    }
}

impl std::error::Error for StoreError {}

impl StoreTerm {
    pub fn upd(l: Location, u: LookupTerm, s: StoreTerm) -> StoreTerm {
        StoreTerm::Upd(l, u, Arc::new(s))
    }

    /// Update with a plain value.
    pub fn upd_val(l: Location, v: Value, s: StoreTerm) -> StoreTerm {
        StoreTerm::Upd(l, LookupTerm::Val(v), Arc::new(s))
    }

    /// Every lookup subterm must read a location its store defines.
    pub fn is_well_formed(&self) -> bool {
        match self {
            StoreTerm::Emp => true,
            StoreTerm::Upd(_, u, s) => u.is_well_formed() && s.is_well_formed(),
        }
    }

    pub fn is_closed(&self) -> bool {
        self.free_vars().is_empty()
    }

    pub fn free_vars(&self) -> VarSet {
        let mut acc = VarSet::new();
        store_free_vars(self, &mut acc);
        acc
    }
}

impl LookupTerm {
    /// Checked constructor for `lkp(l, s)`; rejects `l` outside `dom(s)`.
    pub fn lkp(l: Location, s: StoreTerm) -> Result<LookupTerm, StoreError> {
        if dom_store(&s).contains(&l) {
            Ok(LookupTerm::Lkp(l, Arc::new(s)))
        } else {
            Err(StoreError::UndefinedLocation(l))
        }
    }

    pub fn is_well_formed(&self) -> bool {
        match self {
            LookupTerm::Val(_) => true,
            LookupTerm::Lkp(l, s) => dom_store(s).contains(l) && s.is_well_formed(),
        }
    }
}

fn store_free_vars(s: &StoreTerm, acc: &mut VarSet) {
    match s {
        StoreTerm::Emp => {}
        StoreTerm::Upd(_, u, rest) => {
            match u {
                LookupTerm::Val(v) => acc.extend(v.free_vars()),
                LookupTerm::Lkp(_, inner) => store_free_vars(inner, acc),
            }
            store_free_vars(rest, acc);
        }
    }
}

/// `dom(emp) = {}`, `dom(upd(l, u, s)) = {l} + dom(s)`.
pub fn dom_store(s: &StoreTerm) -> LocationSet {
    let mut acc = BTreeSet::new();
    let mut cur = s;
    while let StoreTerm::Upd(l, _, rest) = cur {
        acc.insert(*l);
        cur = rest;
    }
    acc
}

/// The unique value derivably equal to `lkp(l, s)`: the leftmost outermost
/// binding of `l`, with nested lookups resolved recursively.
pub fn resolve_lookup(l: Location, s: &StoreTerm) -> Result<Value, StoreError> {
    match s {
        StoreTerm::Emp => Err(StoreError::UndefinedLocation(l)),
        StoreTerm::Upd(l1, u, rest) => {
            if *l1 == l {
                match u {
                    LookupTerm::Val(v) => Ok(v.clone()),
                    LookupTerm::Lkp(l2, inner) => resolve_lookup(*l2, inner),
                }
            } else {
                resolve_lookup(l, rest)
            }
        }
    }
}

/// The restriction `s \ l`, removing every binding of `l`.
pub fn remove(s: &StoreTerm, l: Location) -> StoreTerm {
    match s {
        StoreTerm::Emp => StoreTerm::Emp,
        StoreTerm::Upd(l1, u, rest) => {
            if *l1 == l {
                remove(rest, l)
            } else {
                StoreTerm::Upd(*l1, u.clone(), Arc::new(remove(rest, l)))
            }
        }
    }
}

/// Canonical normal form: one binding per location, every lookup resolved to
/// a value, locations listed in ascending order.
pub fn normal_form(s: &StoreTerm) -> StoreTerm {
    let mut out = StoreTerm::Emp;
    for l in dom_store(s).iter().rev() {
        let v = resolve_lookup(*l, s).expect("domain location must resolve");
        out = StoreTerm::upd_val(*l, v, out);
    }
    out
}

/// Extensional equivalence: equal domains and alpha-equal resolved values at
/// every location.
pub fn ext_equiv(s: &StoreTerm, t: &StoreTerm) -> bool {
    let ds = dom_store(s);
    if ds != dom_store(t) {
        return false;
    }
    ds.iter().all(|l| {
        let a = resolve_lookup(*l, s).expect("domain location must resolve");
        let b = resolve_lookup(*l, t).expect("domain location must resolve");
        alpha_eq_value(&a, &b)
    })
}

/// Decides derivable equality of store terms.
pub fn store_eq(s: &StoreTerm, t: &StoreTerm) -> bool {
    ext_equiv(&normal_form(s), &normal_form(t))
}

// ---------------------------------------------------------------------------
// Brute-force equational oracle
// ---------------------------------------------------------------------------

/// Alpha-canonical key for visited-set deduplication.
fn canon_store(s: &StoreTerm) -> StoreTerm {
    match s {
        StoreTerm::Emp => StoreTerm::Emp,
        StoreTerm::Upd(l, u, rest) => StoreTerm::Upd(*l, canon_lkp(u), Arc::new(canon_store(rest))),
    }
}

fn canon_lkp(u: &LookupTerm) -> LookupTerm {
    match u {
        LookupTerm::Val(v) => LookupTerm::Val(canonical_rename_value(v)),
        LookupTerm::Lkp(l, s) => LookupTerm::Lkp(*l, Arc::new(canon_store(s))),
    }
}

fn store_size(s: &StoreTerm) -> usize {
    match s {
        StoreTerm::Emp => 1,
        StoreTerm::Upd(_, u, rest) => 1 + lkp_size(u) + store_size(rest),
    }
}

fn lkp_size(u: &LookupTerm) -> usize {
    match u {
        LookupTerm::Val(_) => 1,
        LookupTerm::Lkp(_, s) => 1 + store_size(s),
    }
}

/// All stores reachable from `s` by one axiom application, in either
/// direction, at any subterm position. Expanding instantiations (axiom 3
/// right-to-left) draw the lookup location from the subterm's own domain, so
/// the step relation stays finitely branching.
fn rewrite_neighbors(s: &StoreTerm, size_cap: usize) -> Vec<StoreTerm> {
    let mut out = Vec::new();
    rewrite_store_positions(s, size_cap, &mut |t| out.push(t));
    out
}

fn rewrite_store_positions(s: &StoreTerm, cap: usize, emit: &mut dyn FnMut(StoreTerm)) {
    // Steps with the redex at the root.
    store_root_steps(s, cap, emit);
    // Recurse into subterm positions.
    if let StoreTerm::Upd(l, u, rest) = s {
        match u {
            LookupTerm::Val(_) => {}
            LookupTerm::Lkp(l2, inner) => {
                lookup_root_steps(*l2, inner, cap, emit, &mut |u2| {
                    StoreTerm::Upd(*l, u2, rest.clone())
                });
                let (l, l2) = (*l, *l2);
                rewrite_store_positions(inner, cap, &mut |inner2| {
                    emit(StoreTerm::Upd(
                        l,
                        LookupTerm::Lkp(l2, Arc::new(inner2)),
                        rest.clone(),
                    ))
                });
            }
        }
        let (l, u) = (*l, u.clone());
        rewrite_store_positions(rest, cap, &mut |rest2| {
            emit(StoreTerm::Upd(l, u.clone(), Arc::new(rest2)))
        });
    }
}

/// Axiom applications whose store-sort redex is `s` itself.
fn store_root_steps(s: &StoreTerm, cap: usize, emit: &mut dyn FnMut(StoreTerm)) {
    if let StoreTerm::Upd(l, u, rest) = s {
        // Axiom 3, left-to-right: upd(l, lkp(l, s0), s0) -> s0.
        if let LookupTerm::Lkp(l2, inner) = u {
            if l2 == l && canon_store(inner) == canon_store(rest) {
                emit((**rest).clone());
            }
        }
        match &**rest {
            StoreTerm::Upd(l2, u2, rest2) => {
                if l2 == l {
                    // Axiom 4, left-to-right: drop the overridden binding.
                    emit(StoreTerm::Upd(*l, u.clone(), rest2.clone()));
                } else {
                    // Axiom 5: commute distinct locations.
                    emit(StoreTerm::Upd(
                        *l2,
                        u2.clone(),
                        Arc::new(StoreTerm::Upd(*l, u.clone(), rest2.clone())),
                    ));
                }
            }
            StoreTerm::Emp => {}
        }
        // Axiom 4, right-to-left: re-insert an overridden binding below.
        // Instantiate the buried argument with values already present.
        for w in lookup_args(s) {
            let grown = StoreTerm::Upd(
                *l,
                u.clone(),
                Arc::new(StoreTerm::Upd(*l, w.clone(), rest.clone())),
            );
            if store_size(&grown) <= cap {
                emit(grown);
            }
        }
    }
    // Axiom 3, right-to-left: s0 -> upd(l, lkp(l, s0), s0), for l in dom(s0).
    for l in dom_store(s) {
        let grown = StoreTerm::Upd(
            l,
            LookupTerm::Lkp(l, Arc::new(s.clone())),
            Arc::new(s.clone()),
        );
        if store_size(&grown) <= cap {
            emit(grown);
        }
    }
}

/// Axiom applications on a lookup-sort redex `lkp(l, s)`; `wrap` rebuilds the
/// surrounding store.
fn lookup_root_steps(
    l: Location,
    s: &StoreTerm,
    cap: usize,
    emit: &mut dyn FnMut(StoreTerm),
    wrap: &mut dyn FnMut(LookupTerm) -> StoreTerm,
) {
    if let StoreTerm::Upd(l1, u, rest) = s {
        if *l1 == l {
            // Axiom 1, left-to-right: lkp(l, upd(l, u, s)) -> u.
            emit(wrap(u.clone()));
        } else if dom_store(rest).contains(&l) {
            // Axiom 2, left-to-right: skip a distinct binding.
            emit(wrap(LookupTerm::Lkp(l, rest.clone())));
        }
    }
    // Axiom 2, right-to-left: lkp(l, s) -> lkp(l, upd(l', w, s)), growing
    // with arguments already present.
    let candidate_args: Vec<LookupTerm> = lookup_args_store(s);
    for l2 in all_locations(s) {
        if l2 == l {
            continue;
        }
        for w in &candidate_args {
            let grown = LookupTerm::Lkp(
                l,
                Arc::new(StoreTerm::Upd(l2, w.clone(), Arc::new(s.clone()))),
            );
            let t = wrap(grown);
            if store_size(&t) <= cap {
                emit(t);
            }
        }
    }
}

fn lookup_args(s: &StoreTerm) -> Vec<LookupTerm> {
    lookup_args_store(s)
}

fn lookup_args_store(s: &StoreTerm) -> Vec<LookupTerm> {
    let mut out = Vec::new();
    let mut cur = s;
    while let StoreTerm::Upd(_, u, rest) = cur {
        if !out.contains(u) {
            out.push(u.clone());
        }
        cur = rest;
    }
    out
}

fn all_locations(s: &StoreTerm) -> LocationSet {
    let mut acc = BTreeSet::new();
    fn go(s: &StoreTerm, acc: &mut LocationSet) {
        if let StoreTerm::Upd(l, u, rest) = s {
            acc.insert(*l);
            if let LookupTerm::Lkp(l2, inner) = u {
                acc.insert(*l2);
                go(inner, acc);
            }
            go(rest, acc);
        }
    }
    go(s, &mut acc);
    acc
}

/// Searches for an equational proof of `s = t` of length at most `depth` by
/// breadth-first search from both endpoints, applying the axioms in both
/// directions at every position. Sound; incomplete when `depth` is too small.
pub fn rewrite_oracle(s: &StoreTerm, t: &StoreTerm, depth: usize) -> bool {
    let cs = canon_store(s);
    let ct = canon_store(t);
    if cs == ct {
        return true;
    }
    let cap = store_size(s).max(store_size(t)) + 4;
    let fwd_depth = depth / 2 + depth % 2;
    let bwd_depth = depth / 2;
    let reach_s = reachable(&cs, fwd_depth, cap);
    if reach_s.get(&ct).is_some() {
        return true;
    }
    let reach_t = reachable(&ct, bwd_depth, cap);
    // Meet in the middle: total proof length is the sum of both path lengths.
    reach_s
        .iter()
        .any(|(term, d1)| reach_t.get(term).is_some_and(|d2| d1 + d2 <= depth))
}

/// Forward closure of `start` under single axiom steps, with path lengths.
pub(crate) fn reachable(start: &StoreTerm, depth: usize, cap: usize) -> HashMap<StoreTerm, usize> {
    let mut seen: HashMap<StoreTerm, usize> = HashMap::from([(start.clone(), 0)]);
    let mut queue: VecDeque<(StoreTerm, usize)> = VecDeque::from([(start.clone(), 0)]);
    while let Some((cur, d)) = queue.pop_front() {
        if d >= depth {
            continue;
        }
        for next in rewrite_neighbors(&cur, cap) {
            let cn = canon_store(&next);
            if !seen.contains_key(&cn) {
                seen.insert(cn.clone(), d + 1);
                queue.push_back((cn, d + 1));
            }
        }
    }
    seen
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::Computation;

    fn l(i: u32) -> Location {
        Location(i)
    }

    fn v1() -> Value {
        Value::identity()
    }

    fn v2() -> Value {
        Value::lam(
            "x",
            Computation::bind(Computation::unit(Value::var("x")), Value::var("x")),
        )
    }

    #[test]
    fn dom_of_emp_is_empty() {
        assert!(dom_store(&StoreTerm::Emp).is_empty());
    }

    #[test]
    fn dom_of_single_update() {
        let s = StoreTerm::upd_val(l(0), v1(), StoreTerm::Emp);
        assert_eq!(dom_store(&s), BTreeSet::from([l(0)]));
    }

    #[test]
    fn dom_collects_duplicates_once() {
        let s = StoreTerm::upd_val(
            l(0),
            v1(),
            StoreTerm::upd_val(l(1), v2(), StoreTerm::upd_val(l(0), v2(), StoreTerm::Emp)),
        );
        assert_eq!(dom_store(&s), BTreeSet::from([l(0), l(1)]));
    }

    #[test]
    fn resolve_outermost_binding() {
        let s = StoreTerm::upd_val(l(0), v1(), StoreTerm::Emp);
        assert_eq!(resolve_lookup(l(0), &s).unwrap(), v1());
    }

    #[test]
    fn resolve_skips_other_locations() {
        let s = StoreTerm::upd_val(l(1), v2(), StoreTerm::upd_val(l(0), v1(), StoreTerm::Emp));
        assert_eq!(resolve_lookup(l(0), &s).unwrap(), v1());
    }

    #[test]
    fn resolve_nested_lookup() {
        // upd(l0, lkp(l1, upd(l1, V, emp)), emp) resolves l0 to V
        let inner = StoreTerm::upd_val(l(1), v1(), StoreTerm::Emp);
        let u = LookupTerm::lkp(l(1), inner).unwrap();
        let s = StoreTerm::Upd(l(0), u, Arc::new(StoreTerm::Emp));
        assert_eq!(resolve_lookup(l(0), &s).unwrap(), v1());
    }

    #[test]
    fn resolve_undefined_location_fails() {
        assert_eq!(
            resolve_lookup(l(0), &StoreTerm::Emp),
            Err(StoreError::UndefinedLocation(l(0)))
        );
    }

    #[test]
    fn lkp_constructor_rejects_empty_store() {
        assert!(LookupTerm::lkp(l(0), StoreTerm::Emp).is_err());
    }

    #[test]
    fn remove_from_emp() {
        assert_eq!(remove(&StoreTerm::Emp, l(0)), StoreTerm::Emp);
    }

    #[test]
    fn remove_single_binding() {
        let s = StoreTerm::upd_val(l(0), v1(), StoreTerm::Emp);
        assert_eq!(remove(&s, l(0)), StoreTerm::Emp);
    }

    #[test]
    fn remove_inner_binding() {
        let s = StoreTerm::upd_val(l(1), v1(), StoreTerm::upd_val(l(0), v2(), StoreTerm::Emp));
        assert_eq!(
            remove(&s, l(0)),
            StoreTerm::upd_val(l(1), v1(), StoreTerm::Emp)
        );
    }

    #[test]
    fn remove_domain_equation() {
        let s = StoreTerm::upd_val(
            l(0),
            v1(),
            StoreTerm::upd_val(l(1), v2(), StoreTerm::upd_val(l(0), v2(), StoreTerm::Emp)),
        );
        assert_eq!(dom_store(&remove(&s, l(0))), BTreeSet::from([l(1)]));
    }

    #[test]
    fn normal_form_of_emp() {
        assert_eq!(normal_form(&StoreTerm::Emp), StoreTerm::Emp);
    }

    #[test]
    fn normal_form_drops_overridden_binding() {
        let s = StoreTerm::upd_val(l(0), v1(), StoreTerm::upd_val(l(0), v2(), StoreTerm::Emp));
        assert_eq!(
            normal_form(&s),
            StoreTerm::upd_val(l(0), v1(), StoreTerm::Emp)
        );
    }

    #[test]
    fn normal_form_sorts_locations() {
        let s = StoreTerm::upd_val(l(1), v2(), StoreTerm::upd_val(l(0), v1(), StoreTerm::Emp));
        let nf = StoreTerm::upd_val(l(0), v1(), StoreTerm::upd_val(l(1), v2(), StoreTerm::Emp));
        assert_eq!(normal_form(&s), nf);
        assert!(ext_equiv(&s, &normal_form(&s)));
    }

    #[test]
    fn ext_equiv_emp() {
        assert!(ext_equiv(&StoreTerm::Emp, &StoreTerm::Emp));
    }

    #[test]
    fn ext_equiv_detects_domain_mismatch() {
        let s = StoreTerm::upd_val(l(0), v1(), StoreTerm::Emp);
        assert!(!ext_equiv(&s, &StoreTerm::Emp));
    }

    #[test]
    fn ext_equiv_commutes_distinct_locations() {
        let a = StoreTerm::upd_val(l(0), v1(), StoreTerm::upd_val(l(1), v2(), StoreTerm::Emp));
        let b = StoreTerm::upd_val(l(1), v2(), StoreTerm::upd_val(l(0), v1(), StoreTerm::Emp));
        assert!(ext_equiv(&a, &b));
    }

    #[test]
    fn store_eq_self_extension() {
        // upd(l, lkp(l, s), s) = s
        let s = StoreTerm::upd_val(l(0), v1(), StoreTerm::Emp);
        let u = LookupTerm::lkp(l(0), s.clone()).unwrap();
        let extended = StoreTerm::Upd(l(0), u, Arc::new(s.clone()));
        assert!(store_eq(&extended, &s));
    }

    #[test]
    fn store_eq_override() {
        let a = StoreTerm::upd_val(l(0), v1(), StoreTerm::upd_val(l(0), v2(), StoreTerm::Emp));
        let b = StoreTerm::upd_val(l(0), v1(), StoreTerm::Emp);
        assert!(store_eq(&a, &b));
    }

    #[test]
    fn store_eq_distinguishes_values() {
        let a = StoreTerm::upd_val(l(0), v1(), StoreTerm::Emp);
        let b = StoreTerm::upd_val(l(0), v2(), StoreTerm::Emp);
        assert!(!store_eq(&a, &b));
    }

    #[test]
    fn oracle_reflexivity_at_zero_depth() {
        let s = StoreTerm::upd_val(l(0), v1(), StoreTerm::Emp);
        assert!(rewrite_oracle(&s, &s, 0));
    }

    #[test]
    fn oracle_commutation_in_one_step() {
        let a = StoreTerm::upd_val(l(0), v1(), StoreTerm::upd_val(l(1), v2(), StoreTerm::Emp));
        let b = StoreTerm::upd_val(l(1), v2(), StoreTerm::upd_val(l(0), v1(), StoreTerm::Emp));
        assert!(rewrite_oracle(&a, &b, 1));
    }

    #[test]
    fn oracle_rejects_domain_change() {
        let a = StoreTerm::upd_val(l(0), v1(), StoreTerm::Emp);
        assert!(!rewrite_oracle(&a, &StoreTerm::Emp, 8));
    }

    #[test]
    fn oracle_proves_override() {
        let a = StoreTerm::upd_val(l(0), v1(), StoreTerm::upd_val(l(0), v2(), StoreTerm::Emp));
        let b = StoreTerm::upd_val(l(0), v1(), StoreTerm::Emp);
        assert!(rewrite_oracle(&a, &b, 2));
    }

    #[test]
    fn oracle_resolves_nested_lookup() {
        let inner = StoreTerm::upd_val(l(1), v1(), StoreTerm::Emp);
        let u = LookupTerm::lkp(l(1), inner).unwrap();
        let s = StoreTerm::Upd(l(0), u, Arc::new(StoreTerm::Emp));
        let t = StoreTerm::upd_val(l(0), v1(), StoreTerm::Emp);
        assert!(rewrite_oracle(&s, &t, 2));
        assert!(store_eq(&s, &t));
    }
}
