//! The four sorts of intersection types and their subtyping theories.
//!
//! Sorts, by mutual induction: value types `d ::= d -> t | d /\ d | wD`,
//! store types `s ::= <l : d> | s /\ s | wS`, result types
//! `k ::= d x s | k /\ k | wC`, computation types `t ::= s -> k | t /\ t | wT`.
//!
//! Each sort carries a preorder generated by reflexivity, transitivity,
//! `a <= w`, the two projections of `/\`, congruence of `/\`, and
//!
//! - `wD <= wD -> wT` and `wT <= wS -> wC` (so arrows whose target is the
//!   top of its sort collapse to the sort's top);
//! - distribution of `/\` over arrow targets with a shared source;
//! - `<l:d> /\ <l:d'> = <l : d /\ d'>`;
//! - `(d x s) /\ (d' x s') = (d /\ d') x (s /\ s')`;
//! - arrows contravariant left, covariant right; records and products
//!   covariant.
//!
//! `wC` is strictly above every product: `wD x wS < wC`, mirroring the
//! strictness of `<l : wD> < wS`. A result type records that a result
//! actually exists, while `wC` also covers undefined outcomes, so the two
//! must not be conflated; the convergence characterization depends on it.
//!
//! Values of [`ValueType`], [`StoreType`], [`ResultType`] and [`CompType`]
//! are always canonical: intersections are flattened into sets, arrows with
//! top targets are dropped, arrows sharing a source are merged, entries and
//! products are merged componentwise, and redundant arrows are removed. On
//! canonical forms, type equivalence is structural equality.

pub mod oracle;

use std::collections::BTreeMap;
use std::fmt;

use crate::syntax::Location;

pub use oracle::{subtype_oracle, RawType};

/// Sort tags for the four type languages.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Sort {
    /// Value types, assigned to values and lookups.
    Value,
    /// Store types.
    Store,
    /// Result types, assigned to configurations.
    Result,
    /// Computation types.
    Comp,
}

impl fmt::Display for Sort {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Sort::Value => "value",
            Sort::Store => "store",
            Sort::Result => "result",
            Sort::Comp => "computation",
        };
        write!(f, "{s}")
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SortError {
    pub expected: &'static str,
    pub found: String,
}

impl fmt::Display for SortError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "ill-sorted type: expected {}, found {}",
            self.expected, self.found
        )
    }
}

impl std::error::Error for SortError {}

/// Canonical value type: a finite set of arrows; the empty set is `wD`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct ValueType {
    arrows: Vec<(ValueType, CompType)>,
}

/// Canonical store type: the top `wS`, or a nonempty location map. A map is
/// strictly below `wS` even when every entry is `wD`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum StoreType {
    Top,
    Entries(BTreeMap<Location, ValueType>),
}

/// Canonical result type: the top `wC`, or a single product.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ResultType {
    Top,
    Prod(ValueType, StoreType),
}

/// Canonical computation type: a finite set of arrows; empty is `wT`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct CompType {
    arrows: Vec<(StoreType, ResultType)>,
}

impl ValueType {
    /// `wD`, the top value type.
    pub fn top() -> ValueType {
        ValueType { arrows: Vec::new() }
    }

    /// A single arrow `src -> tgt`; collapses to `wD` if the target is top.
    pub fn arrow(src: ValueType, tgt: CompType) -> ValueType {
        ValueType::from_arrows(vec![(src, tgt)])
    }

    /// Canonicalizes a set of arrows.
    pub fn from_arrows(arrows: Vec<(ValueType, CompType)>) -> ValueType {
        let mut kept: Vec<(ValueType, CompType)> = Vec::new();
        for (src, tgt) in arrows {
            if tgt.is_top() {
                continue;
            }
            // Merge arrows that share a source.
            if let Some(entry) = kept.iter_mut().find(|(s, _)| *s == src) {
                entry.1 = entry.1.meet(&tgt);
            } else {
                kept.push((src, tgt));
            }
        }
        kept.sort();
        kept.dedup();
        minimize(&mut kept, |rest, arrow| {
            subtype_value(
                &ValueType {
                    arrows: rest.to_vec(),
                },
                &ValueType {
                    arrows: vec![arrow.clone()],
                },
            )
        });
        ValueType { arrows: kept }
    }

    pub fn is_top(&self) -> bool {
        self.arrows.is_empty()
    }

    pub fn arrows(&self) -> &[(ValueType, CompType)] {
        &self.arrows
    }

    /// Greatest lower bound.
    pub fn meet(&self, other: &ValueType) -> ValueType {
        let mut all = self.arrows.clone();
        all.extend(other.arrows.clone());
        ValueType::from_arrows(all)
    }
}

impl StoreType {
    pub fn top() -> StoreType {
        StoreType::Top
    }

    /// The record `<l : d>`.
    pub fn entry(l: Location, d: ValueType) -> StoreType {
        StoreType::Entries(BTreeMap::from([(l, d)]))
    }

    /// Canonicalizes a location map; an empty map is the empty intersection,
    /// i.e. `wS`.
    pub fn from_entries(entries: BTreeMap<Location, ValueType>) -> StoreType {
        if entries.is_empty() {
            StoreType::Top
        } else {
            StoreType::Entries(entries)
        }
    }

    pub fn is_top(&self) -> bool {
        matches!(self, StoreType::Top)
    }

    pub fn entries(&self) -> Option<&BTreeMap<Location, ValueType>> {
        match self {
            StoreType::Top => None,
            StoreType::Entries(m) => Some(m),
        }
    }

    pub fn meet(&self, other: &StoreType) -> StoreType {
        match (self, other) {
            (StoreType::Top, x) | (x, StoreType::Top) => x.clone(),
            (StoreType::Entries(a), StoreType::Entries(b)) => {
                let mut m = a.clone();
                for (l, d) in b {
                    m.entry(*l)
                        .and_modify(|cur| *cur = cur.meet(d))
                        .or_insert_with(|| d.clone());
                }
                StoreType::Entries(m)
            }
        }
    }

    /// Drops the entry at `l`, if any.
    pub fn without(&self, l: Location) -> StoreType {
        match self {
            StoreType::Top => StoreType::Top,
            StoreType::Entries(m) => {
                let mut m = m.clone();
                m.remove(&l);
                StoreType::from_entries(m)
            }
        }
    }
}

impl ResultType {
    pub fn top() -> ResultType {
        ResultType::Top
    }

    pub fn prod(d: ValueType, s: StoreType) -> ResultType {
        ResultType::Prod(d, s)
    }

    /// The product of tops, `wD x wS`; a result type, strictly below `wC`.
    pub fn trivial_result() -> ResultType {
        ResultType::Prod(ValueType::top(), StoreType::Top)
    }

    pub fn is_top(&self) -> bool {
        matches!(self, ResultType::Top)
    }

    pub fn as_prod(&self) -> Option<(&ValueType, &StoreType)> {
        match self {
            ResultType::Top => None,
            ResultType::Prod(d, s) => Some((d, s)),
        }
    }

    pub fn meet(&self, other: &ResultType) -> ResultType {
        match (self, other) {
            (ResultType::Top, x) | (x, ResultType::Top) => x.clone(),
            (ResultType::Prod(d, s), ResultType::Prod(d2, s2)) => {
                ResultType::Prod(d.meet(d2), s.meet(s2))
            }
        }
    }
}

impl CompType {
    pub fn top() -> CompType {
        CompType { arrows: Vec::new() }
    }

    pub fn arrow(src: StoreType, tgt: ResultType) -> CompType {
        CompType::from_arrows(vec![(src, tgt)])
    }

    /// The type characterizing convergent computations: `wS -> wD x wS`.
    pub fn convergent() -> CompType {
        CompType::arrow(StoreType::Top, ResultType::trivial_result())
    }

    pub fn from_arrows(arrows: Vec<(StoreType, ResultType)>) -> CompType {
        let mut kept: Vec<(StoreType, ResultType)> = Vec::new();
        for (src, tgt) in arrows {
            if tgt.is_top() {
                continue;
            }
            if let Some(entry) = kept.iter_mut().find(|(s, _)| *s == src) {
                entry.1 = entry.1.meet(&tgt);
            } else {
                kept.push((src, tgt));
            }
        }
        kept.sort();
        kept.dedup();
        minimize(&mut kept, |rest, arrow| {
            subtype_comp(
                &CompType {
                    arrows: rest.to_vec(),
                },
                &CompType {
                    arrows: vec![arrow.clone()],
                },
            )
        });
        CompType { arrows: kept }
    }

    pub fn is_top(&self) -> bool {
        self.arrows.is_empty()
    }

    pub fn arrows(&self) -> &[(StoreType, ResultType)] {
        &self.arrows
    }

    /// For rule shapes that require a plain arrow: the unique arrow of a
    /// singleton canonical type.
    pub fn as_single_arrow(&self) -> Option<(&StoreType, &ResultType)> {
        match self.arrows.as_slice() {
            [(s, k)] => Some((s, k)),
            _ => None,
        }
    }

    pub fn meet(&self, other: &CompType) -> CompType {
        let mut all = self.arrows.clone();
        all.extend(other.arrows.clone());
        CompType::from_arrows(all)
    }
}

/// Removes arrows implied by the remaining ones, scanning deterministically
/// from the end until a fixpoint.
fn minimize<A: Clone>(arrows: &mut Vec<A>, implied: impl Fn(&[A], &A) -> bool) {
    loop {
        let mut removed = false;
        let mut i = arrows.len();
        while i > 0 {
            i -= 1;
            let candidate = arrows[i].clone();
            let mut rest = arrows.clone();
            rest.remove(i);
            if !rest.is_empty() && implied(&rest, &candidate) {
                arrows.remove(i);
                removed = true;
            }
        }
        if !removed {
            return;
        }
    }
}

// ---------------------------------------------------------------------------
// Subtyping
// ---------------------------------------------------------------------------

/// `a <=D b` on canonical value types.
pub fn subtype_value(a: &ValueType, b: &ValueType) -> bool {
    b.arrows.iter().all(|(src_b, tgt_b)| {
        // Arrows of `a` applicable at source `src_b`.
        let applicable: Vec<&CompType> = a
            .arrows
            .iter()
            .filter(|(src_a, _)| subtype_value(src_b, src_a))
            .map(|(_, tgt_a)| tgt_a)
            .collect();
        if applicable.is_empty() {
            return false;
        }
        let mut combined = CompType::top();
        for t in applicable {
            combined = combined.meet(t);
        }
        subtype_comp(&combined, tgt_b)
    })
}

/// `a <=S b` on canonical store types.
pub fn subtype_store(a: &StoreType, b: &StoreType) -> bool {
    match (a, b) {
        (_, StoreType::Top) => true,
        (StoreType::Top, StoreType::Entries(_)) => false,
        (StoreType::Entries(ma), StoreType::Entries(mb)) => mb
            .iter()
            .all(|(l, db)| ma.get(l).is_some_and(|da| subtype_value(da, db))),
    }
}

/// `a <=C b` on canonical result types.
pub fn subtype_result(a: &ResultType, b: &ResultType) -> bool {
    match (a, b) {
        (_, ResultType::Top) => true,
        (ResultType::Top, ResultType::Prod(_, _)) => false,
        (ResultType::Prod(da, sa), ResultType::Prod(db, sb)) => {
            subtype_value(da, db) && subtype_store(sa, sb)
        }
    }
}

/// `a <=T b` on canonical computation types.
pub fn subtype_comp(a: &CompType, b: &CompType) -> bool {
    b.arrows.iter().all(|(src_b, tgt_b)| {
        let applicable: Vec<&ResultType> = a
            .arrows
            .iter()
            .filter(|(src_a, _)| subtype_store(src_b, src_a))
            .map(|(_, tgt_a)| tgt_a)
            .collect();
        if applicable.is_empty() {
            return false;
        }
        let mut combined = ResultType::top();
        for t in applicable {
            combined = combined.meet(t);
        }
        subtype_result(&combined, tgt_b)
    })
}

/// `dom(wS) = {}`; otherwise the key set. Entries at `wD` still contribute
/// their location.
pub fn dom_sigma(s: &StoreType) -> std::collections::BTreeSet<Location> {
    match s {
        StoreType::Top => Default::default(),
        StoreType::Entries(m) => m.keys().copied().collect(),
    }
}

// ---------------------------------------------------------------------------
// A sort-tagged union, used by judgments
// ---------------------------------------------------------------------------

/// A canonical type of any sort.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum AnyType {
    D(ValueType),
    S(StoreType),
    C(ResultType),
    T(CompType),
}

impl AnyType {
    pub fn sort(&self) -> Sort {
        match self {
            AnyType::D(_) => Sort::Value,
            AnyType::S(_) => Sort::Store,
            AnyType::C(_) => Sort::Result,
            AnyType::T(_) => Sort::Comp,
        }
    }

    pub fn is_top(&self) -> bool {
        match self {
            AnyType::D(d) => d.is_top(),
            AnyType::S(s) => s.is_top(),
            AnyType::C(k) => k.is_top(),
            AnyType::T(t) => t.is_top(),
        }
    }

    pub fn top_of(sort: Sort) -> AnyType {
        match sort {
            Sort::Value => AnyType::D(ValueType::top()),
            Sort::Store => AnyType::S(StoreType::Top),
            Sort::Result => AnyType::C(ResultType::Top),
            Sort::Comp => AnyType::T(CompType::top()),
        }
    }

    pub fn meet(&self, other: &AnyType) -> Result<AnyType, SortError> {
        match (self, other) {
            (AnyType::D(a), AnyType::D(b)) => Ok(AnyType::D(a.meet(b))),
            (AnyType::S(a), AnyType::S(b)) => Ok(AnyType::S(a.meet(b))),
            (AnyType::C(a), AnyType::C(b)) => Ok(AnyType::C(a.meet(b))),
            (AnyType::T(a), AnyType::T(b)) => Ok(AnyType::T(a.meet(b))),
            _ => Err(SortError {
                expected: "matching sorts for intersection",
                found: format!("{} and {}", self.sort(), other.sort()),
            }),
        }
    }
}

/// Decides `a <= b`; the sorts must match.
pub fn subtype(a: &AnyType, b: &AnyType) -> Result<bool, SortError> {
    match (a, b) {
        (AnyType::D(a), AnyType::D(b)) => Ok(subtype_value(a, b)),
        (AnyType::S(a), AnyType::S(b)) => Ok(subtype_store(a, b)),
        (AnyType::C(a), AnyType::C(b)) => Ok(subtype_result(a, b)),
        (AnyType::T(a), AnyType::T(b)) => Ok(subtype_comp(a, b)),
        _ => Err(SortError {
            expected: "matching sorts for subtyping",
            found: format!("{} and {}", a.sort(), b.sort()),
        }),
    }
}

/// Mutual subtyping. On canonical forms this coincides with structural
/// equality, which the property suites check.
pub fn type_equiv(a: &AnyType, b: &AnyType) -> Result<bool, SortError> {
    Ok(subtype(a, b)? && subtype(b, a)?)
}

// ---------------------------------------------------------------------------
// Normalization of raw type expressions
// ---------------------------------------------------------------------------

/// Canonicalizes a raw type expression, rejecting ill-sorted intersections,
/// arrows, and products.
pub fn normalize_type(raw: &RawType) -> Result<AnyType, SortError> {
    match raw {
        RawType::WD => Ok(AnyType::D(ValueType::top())),
        RawType::WS => Ok(AnyType::S(StoreType::Top)),
        RawType::WC => Ok(AnyType::C(ResultType::Top)),
        RawType::WT => Ok(AnyType::T(CompType::top())),
        RawType::Entry(l, d) => match normalize_type(d)? {
            AnyType::D(d) => Ok(AnyType::S(StoreType::entry(*l, d))),
            other => Err(SortError {
                expected: "value type under a location entry",
                found: other.sort().to_string(),
            }),
        },
        RawType::Prod(d, s) => match (normalize_type(d)?, normalize_type(s)?) {
            (AnyType::D(d), AnyType::S(s)) => Ok(AnyType::C(ResultType::Prod(d, s))),
            (a, b) => Err(SortError {
                expected: "value x store product",
                found: format!("{} x {}", a.sort(), b.sort()),
            }),
        },
        RawType::Arrow(a, b) => match (normalize_type(a)?, normalize_type(b)?) {
            (AnyType::D(d), AnyType::T(t)) => Ok(AnyType::D(ValueType::arrow(d, t))),
            (AnyType::S(s), AnyType::C(k)) => Ok(AnyType::T(CompType::arrow(s, k))),
            (a, b) => Err(SortError {
                expected: "value -> computation or store -> result arrow",
                found: format!("{} -> {}", a.sort(), b.sort()),
            }),
        },
        RawType::And(a, b) => {
            let a = normalize_type(a)?;
            let b = normalize_type(b)?;
            a.meet(&b)
        }
    }
}

/// Rebuilds a raw expression from a canonical type (used by the axiomatic
/// oracle and for rendering round-trips).
pub fn to_raw(t: &AnyType) -> RawType {
    match t {
        AnyType::D(d) => value_to_raw(d),
        AnyType::S(s) => store_to_raw(s),
        AnyType::C(k) => result_to_raw(k),
        AnyType::T(t) => comp_to_raw(t),
    }
}

fn and_chain(mut parts: Vec<RawType>, empty: RawType) -> RawType {
    match parts.len() {
        0 => empty,
        1 => parts.pop().unwrap(),
        _ => {
            let mut it = parts.into_iter();
            let first = it.next().unwrap();
            it.fold(first, |acc, p| RawType::And(Box::new(acc), Box::new(p)))
        }
    }
}

fn value_to_raw(d: &ValueType) -> RawType {
    let parts = d
        .arrows
        .iter()
        .map(|(src, tgt)| RawType::Arrow(Box::new(value_to_raw(src)), Box::new(comp_to_raw(tgt))))
        .collect();
    and_chain(parts, RawType::WD)
}

fn store_to_raw(s: &StoreType) -> RawType {
    match s {
        StoreType::Top => RawType::WS,
        StoreType::Entries(m) => {
            let parts = m
                .iter()
                .map(|(l, d)| RawType::Entry(*l, Box::new(value_to_raw(d))))
                .collect();
            and_chain(parts, RawType::WS)
        }
    }
}

fn result_to_raw(k: &ResultType) -> RawType {
    match k {
        ResultType::Top => RawType::WC,
        ResultType::Prod(d, s) => {
            RawType::Prod(Box::new(value_to_raw(d)), Box::new(store_to_raw(s)))
        }
    }
}

fn comp_to_raw(t: &CompType) -> RawType {
    let parts = t
        .arrows
        .iter()
        .map(|(src, tgt)| RawType::Arrow(Box::new(store_to_raw(src)), Box::new(result_to_raw(tgt))))
        .collect();
    and_chain(parts, RawType::WT)
}

// ---------------------------------------------------------------------------
// Display (ASCII concrete syntax)
// ---------------------------------------------------------------------------

fn fmt_value(d: &ValueType, f: &mut fmt::Formatter<'_>, atom: bool) -> fmt::Result {
    if d.arrows.is_empty() {
        return write!(f, "wD");
    }
    let parens = atom || d.arrows.len() > 1;
    for (i, (src, tgt)) in d.arrows.iter().enumerate() {
        if i > 0 {
            write!(f, " /\\ ")?;
        }
        if parens {
            write!(f, "(")?;
        }
        fmt_value(src, f, src.arrows.len() == 1)?;
        write!(f, " -> ")?;
        fmt_comp(tgt, f, false)?;
        if parens {
            write!(f, ")")?;
        }
    }
    Ok(())
}

fn fmt_store(s: &StoreType, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    match s {
        StoreType::Top => write!(f, "wS"),
        StoreType::Entries(m) => {
            for (i, (l, d)) in m.iter().enumerate() {
                if i > 0 {
                    write!(f, " /\\ ")?;
                }
                write!(f, "<{l} : ")?;
                fmt_value(d, f, false)?;
                write!(f, ">")?;
            }
            Ok(())
        }
    }
}

fn fmt_result(k: &ResultType, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    match k {
        ResultType::Top => write!(f, "wC"),
        ResultType::Prod(d, s) => {
            fmt_value(d, f, d.arrows.len() == 1)?;
            write!(f, " x ")?;
            fmt_store(s, f)
        }
    }
}

fn fmt_comp(t: &CompType, f: &mut fmt::Formatter<'_>, atom: bool) -> fmt::Result {
    if t.arrows.is_empty() {
        return write!(f, "wT");
    }
    let parens = atom || t.arrows.len() > 1;
    for (i, (src, tgt)) in t.arrows.iter().enumerate() {
        if i > 0 {
            write!(f, " /\\ ")?;
        }
        if parens {
            write!(f, "(")?;
        }
        fmt_store(src, f)?;
        write!(f, " -> ")?;
        fmt_result(tgt, f)?;
        if parens {
            write!(f, ")")?;
        }
    }
    Ok(())
}

impl fmt::Display for ValueType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_value(self, f, false)
    }
}

impl fmt::Display for StoreType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_store(self, f)
    }
}

impl fmt::Display for ResultType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_result(self, f)
    }
}

impl fmt::Display for CompType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_comp(self, f, false)
    }
}

impl fmt::Display for AnyType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AnyType::D(d) => d.fmt(f),
            AnyType::S(s) => s.fmt(f),
            AnyType::C(k) => k.fmt(f),
            AnyType::T(t) => t.fmt(f),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn l(i: u32) -> Location {
        Location(i)
    }

    fn w_d() -> ValueType {
        ValueType::top()
    }

    /// `wD -> (wS -> wD x wS)`, the type of values that always apply.
    fn total_fn() -> ValueType {
        ValueType::arrow(w_d(), CompType::convergent())
    }

    #[test]
    fn arrow_with_top_target_collapses() {
        let t = ValueType::arrow(total_fn(), CompType::top());
        assert!(t.is_top());
        let t2 = CompType::arrow(StoreType::entry(l(0), w_d()), ResultType::Top);
        assert!(t2.is_top());
    }

    #[test]
    fn record_intersection_merges_per_location() {
        let a = StoreType::entry(l(0), w_d());
        let b = StoreType::entry(l(0), total_fn());
        let m = a.meet(&b);
        assert_eq!(m, StoreType::entry(l(0), total_fn().meet(&w_d())));
        assert_eq!(m, StoreType::entry(l(0), total_fn()));
    }

    #[test]
    fn product_intersections_merge_componentwise() {
        let k1 = ResultType::Prod(total_fn(), StoreType::entry(l(0), w_d()));
        let k2 = ResultType::Prod(w_d(), StoreType::entry(l(1), w_d()));
        let m = k1.meet(&k2);
        assert_eq!(
            m,
            ResultType::Prod(
                total_fn(),
                StoreType::entry(l(0), w_d()).meet(&StoreType::entry(l(1), w_d()))
            )
        );
    }

    #[test]
    fn top_value_below_trivial_arrow() {
        // wD = wD -> wT, so wD <= wD -> wT holds and the arrow normalizes away.
        let arrow = ValueType::arrow(w_d(), CompType::top());
        assert!(subtype_value(&w_d(), &arrow));
        assert!(subtype_value(&arrow, &w_d()));
    }

    #[test]
    fn store_top_not_below_record() {
        assert!(!subtype_store(
            &StoreType::Top,
            &StoreType::entry(l(0), w_d())
        ));
        assert!(subtype_store(
            &StoreType::entry(l(0), w_d()),
            &StoreType::Top
        ));
    }

    #[test]
    fn product_of_tops_strictly_below_result_top() {
        let prod = ResultType::trivial_result();
        assert!(subtype_result(&prod, &ResultType::Top));
        assert!(!subtype_result(&ResultType::Top, &prod));
    }

    #[test]
    fn arrow_distributes_over_intersection_target() {
        // (d -> t) /\ (d -> t') = d -> (t /\ t')
        let d = total_fn();
        let t1 = CompType::arrow(StoreType::entry(l(0), w_d()), ResultType::trivial_result());
        let t2 = CompType::arrow(StoreType::entry(l(1), w_d()), ResultType::trivial_result());
        let lhs = ValueType::from_arrows(vec![(d.clone(), t1.clone()), (d.clone(), t2.clone())]);
        let rhs = ValueType::arrow(d, t1.meet(&t2));
        assert_eq!(lhs, rhs);
        assert!(subtype_value(&lhs, &rhs) && subtype_value(&rhs, &lhs));
    }

    #[test]
    fn distinct_locations_unrelated() {
        let a = StoreType::entry(l(0), w_d());
        let b = StoreType::entry(l(1), w_d());
        assert!(!subtype_store(&a, &b));
        assert!(!subtype_store(&b, &a));
    }

    #[test]
    fn dom_sigma_clauses() {
        assert!(dom_sigma(&StoreType::Top).is_empty());
        let both = StoreType::entry(l(0), total_fn()).meet(&StoreType::entry(l(1), w_d()));
        assert_eq!(
            dom_sigma(&both),
            std::collections::BTreeSet::from([l(0), l(1)])
        );
        assert_eq!(
            dom_sigma(&StoreType::entry(l(0), w_d())),
            std::collections::BTreeSet::from([l(0)])
        );
    }

    #[test]
    fn meet_is_greatest_lower_bound_on_samples() {
        let a = ValueType::arrow(w_d(), CompType::convergent());
        let b = ValueType::arrow(
            total_fn(),
            CompType::arrow(StoreType::entry(l(0), w_d()), ResultType::trivial_result()),
        );
        let m = a.meet(&b);
        assert!(subtype_value(&m, &a));
        assert!(subtype_value(&m, &b));
    }

    #[test]
    fn convergent_type_is_not_top() {
        assert!(!CompType::convergent().is_top());
        assert!(subtype_comp(&CompType::convergent(), &CompType::top()));
        assert!(!subtype_comp(&CompType::top(), &CompType::convergent()));
    }

    #[test]
    fn normalize_examples() {
        // <l0:d> /\ <l0:d'> -> merged entry
        let raw = RawType::And(
            Box::new(RawType::Entry(l(0), Box::new(RawType::WD))),
            Box::new(RawType::Entry(
                l(0),
                Box::new(RawType::Arrow(Box::new(RawType::WD), Box::new(RawType::WT))),
            )),
        );
        let n = normalize_type(&raw).unwrap();
        assert_eq!(n, AnyType::S(StoreType::entry(l(0), w_d())));

        // d -> wT normalizes to wD
        let raw = RawType::Arrow(Box::new(RawType::WD), Box::new(RawType::WT));
        assert_eq!(normalize_type(&raw).unwrap(), AnyType::D(ValueType::top()));

        // wC stays the strict top of the result sort
        assert_eq!(
            normalize_type(&RawType::WC).unwrap(),
            AnyType::C(ResultType::Top)
        );
    }

    #[test]
    fn normalize_rejects_ill_sorted_intersection() {
        let raw = RawType::And(Box::new(RawType::WD), Box::new(RawType::WS));
        assert!(normalize_type(&raw).is_err());
    }

    #[test]
    fn type_equiv_canonical_equality() {
        let a = AnyType::S(StoreType::entry(l(0), w_d()));
        let b = AnyType::S(StoreType::Top);
        assert!(!type_equiv(&a, &b).unwrap());
        let c = AnyType::D(total_fn().meet(&ValueType::top()));
        assert!(type_equiv(&c, &AnyType::D(total_fn())).unwrap());
    }

    #[test]
    fn display_round_examples() {
        assert_eq!(CompType::convergent().to_string(), "wS -> wD x wS");
        let s = StoreType::entry(l(0), ValueType::top()).meet(&StoreType::entry(l(1), total_fn()));
        assert_eq!(s.to_string(), "<l0 : wD> /\\ <l1 : wD -> wS -> wD x wS>");
    }
}
