//! Derivation-level substitution and expansion.
//!
//! [`subst_derivation`] turns derivations of `G, x:d |- M : t` and
//! `G |- V : d` into one of `G |- M[V/x] : t` by splicing the value
//! derivation at every variable node for `x`. [`expand_derivation`] inverts
//! it: given a derivation of `G |- M[V/x] : t` and the decomposition
//! `(M, x, V)`, it recovers a type `d` (the intersection of the types given
//! to the occurrences of `V`), a derivation of `G |- V : d`, and one of
//! `G, x:d |- M : t`. Expansion takes the decomposition explicitly because
//! reconstructing the occurrences from `M[V/x]` alone is ambiguous.
//!
//! Subjects inside a derivation are exact subterms of their parents, so both
//! transformations first rename binders (of the subject and, coherently, of
//! the whole tree) away from `x` and the free variables of `V`; the results
//! are alpha-aligned back by the callers where exact subjects matter.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use crate::store::{LookupTerm, StoreTerm};
use crate::syntax::{fresh_name, substitute, substitute_value, Computation, Name, Value, VarSet};
use crate::types::{AnyType, ValueType};
use crate::typing::{check_derivation, Context, Derivation, Judgment, Rule, Subject};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ExpandError {
    /// An input derivation fails the checker, or the contexts do not line up.
    InputInvalid(String),
    /// The supplied `(M, x, V)` does not reproduce the derivation's subject.
    DecompositionMismatch,
}

impl fmt::Display for ExpandError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExpandError::InputInvalid(s) => write!(f, "invalid input derivation: {s}"),
            ExpandError::DecompositionMismatch => {
                write!(f, "decomposition does not match the derivation subject")
            }
        }
    }
}

impl std::error::Error for ExpandError {}

// ---------------------------------------------------------------------------
// Binder freshening on terms
// ---------------------------------------------------------------------------

/// Renames every binder so that none lies in `avoid`; chosen names are added
/// to `avoid`, so binders also become pairwise distinct.
pub fn freshen_comp(m: &Computation, avoid: &mut VarSet) -> Computation {
    match m {
        Computation::Unit(v) => Computation::Unit(freshen_value(v, avoid)),
        Computation::Bind(n, v) => {
            Computation::bind(freshen_comp(n, avoid), freshen_value(v, avoid))
        }
        Computation::Get(l, y, body) => {
            let (y2, body2) = freshen_binder(y, body, avoid);
            Computation::Get(*l, y2, Arc::new(body2))
        }
        Computation::Set(l, v, rest) => Computation::Set(
            *l,
            freshen_value(v, avoid),
            Arc::new(freshen_comp(rest, avoid)),
        ),
    }
}

pub fn freshen_value(v: &Value, avoid: &mut VarSet) -> Value {
    match v {
        Value::Var(_) => v.clone(),
        Value::Lam(y, body) => {
            let (y2, body2) = freshen_binder(y, body, avoid);
            Value::Lam(y2, Arc::new(body2))
        }
    }
}

fn freshen_binder(y: &Name, body: &Computation, avoid: &mut VarSet) -> (Name, Computation) {
    let y2 = if avoid.contains(y) {
        let mut all = avoid.clone();
        all.extend(body.free_vars());
        fresh_name(y, &all)
    } else {
        y.clone()
    };
    avoid.insert(y2.clone());
    let renamed = if y2 == *y {
        body.clone()
    } else {
        substitute(body, y, &Value::Var(y2.clone()))
    };
    (y2, freshen_comp(&renamed, avoid))
}

// ---------------------------------------------------------------------------
// Alpha-alignment of derivations
// ---------------------------------------------------------------------------

type Scope = Vec<(Name, Name)>;

fn scoped(scope: &Scope, x: &Name) -> Name {
    scope
        .iter()
        .rev()
        .find(|(old, _)| old == x)
        .map(|(_, new)| new.clone())
        .unwrap_or_else(|| x.clone())
}

fn remap_ctx(ctx: &Context, scope: &Scope) -> Option<Context> {
    let mut pairs = Vec::new();
    for (k, d) in ctx.iter() {
        pairs.push((scoped(scope, k), d.clone()));
    }
    let n = pairs.len();
    let out = Context::from_pairs(pairs);
    // A collision would silently merge two bindings.
    (out.iter().count() == n).then_some(out)
}

fn rename_value_scoped(v: &Value, scope: &mut Scope) -> Value {
    match v {
        Value::Var(x) => Value::Var(scoped(scope, x)),
        Value::Lam(y, body) => {
            scope.push((y.clone(), y.clone()));
            let b = rename_comp_scoped(body, scope);
            scope.pop();
            Value::Lam(y.clone(), Arc::new(b))
        }
    }
}

fn rename_comp_scoped(m: &Computation, scope: &mut Scope) -> Computation {
    match m {
        Computation::Unit(v) => Computation::Unit(rename_value_scoped(v, scope)),
        Computation::Bind(n, v) => Computation::Bind(
            Arc::new(rename_comp_scoped(n, scope)),
            rename_value_scoped(v, scope),
        ),
        Computation::Get(l, y, body) => {
            scope.push((y.clone(), y.clone()));
            let b = rename_comp_scoped(body, scope);
            scope.pop();
            Computation::Get(*l, y.clone(), Arc::new(b))
        }
        Computation::Set(l, v, rest) => Computation::Set(
            *l,
            rename_value_scoped(v, scope),
            Arc::new(rename_comp_scoped(rest, scope)),
        ),
    }
}

fn rename_store_scoped(s: &StoreTerm, scope: &mut Scope) -> StoreTerm {
    match s {
        StoreTerm::Emp => StoreTerm::Emp,
        StoreTerm::Upd(l, u, rest) => StoreTerm::Upd(
            *l,
            rename_lookup_scoped(u, scope),
            Arc::new(rename_store_scoped(rest, scope)),
        ),
    }
}

fn rename_lookup_scoped(u: &LookupTerm, scope: &mut Scope) -> LookupTerm {
    match u {
        LookupTerm::Val(v) => LookupTerm::Val(rename_value_scoped(v, scope)),
        LookupTerm::Lkp(l, s) => LookupTerm::Lkp(*l, Arc::new(rename_store_scoped(s, scope))),
    }
}

fn rename_subject_scoped(subject: &Subject, scope: &mut Scope) -> Subject {
    match subject {
        Subject::Val(v) => Subject::Val(rename_value_scoped(v, scope)),
        Subject::Comp(m) => Subject::Comp(rename_comp_scoped(m, scope)),
        Subject::Store(s) => Subject::Store(rename_store_scoped(s, scope)),
        Subject::Lookup(u) => Subject::Lookup(rename_lookup_scoped(u, scope)),
        Subject::Config(m, s) => {
            Subject::Config(rename_comp_scoped(m, scope), rename_store_scoped(s, scope))
        }
    }
}

/// Rebuilds `d` with its subject renamed to the alpha-equivalent `target`,
/// renaming binders (and the context keys they introduce) coherently
/// throughout the tree. Returns `None` when the shapes do not line up.
pub fn align(d: &Derivation, target: &Subject) -> Option<Derivation> {
    align_node(d, target, &mut Vec::new())
}

fn align_node(d: &Derivation, target: &Subject, scope: &mut Scope) -> Option<Derivation> {
    let ctx = remap_ctx(&d.conclusion.ctx, scope)?;
    let renamed_subject = rename_subject_scoped(&d.conclusion.subject, scope);
    let mk = |premises: Vec<Derivation>| Derivation {
        rule: d.rule,
        conclusion: Judgment {
            ctx: ctx.clone(),
            subject: target.clone(),
            ty: d.conclusion.ty.clone(),
        },
        premises,
    };
    match d.rule {
        Rule::Omega | Rule::Var => {
            alpha_subject_eq(&renamed_subject, target).then(|| mk(Vec::new()))
        }
        Rule::Inter | Rule::Sub => {
            let premises: Option<Vec<Derivation>> = d
                .premises
                .iter()
                .map(|p| align_node(p, target, scope))
                .collect();
            Some(mk(premises?))
        }
        Rule::Lam => {
            let (Subject::Val(Value::Lam(y, _)), Subject::Val(Value::Lam(z, tbody))) =
                (&d.conclusion.subject, target)
            else {
                return None;
            };
            scope.push((y.clone(), z.clone()));
            let p = align_node(&d.premises[0], &Subject::Comp((**tbody).clone()), scope);
            scope.pop();
            Some(mk(vec![p?]))
        }
        Rule::Unit => {
            let Subject::Comp(Computation::Unit(tv)) = target else {
                return None;
            };
            let p = align_node(&d.premises[0], &Subject::Val(tv.clone()), scope)?;
            Some(mk(vec![p]))
        }
        Rule::Bind => {
            let Subject::Comp(Computation::Bind(tm, tv)) = target else {
                return None;
            };
            let p0 = align_node(&d.premises[0], &Subject::Comp((**tm).clone()), scope)?;
            let p1 = align_node(&d.premises[1], &Subject::Val(tv.clone()), scope)?;
            Some(mk(vec![p0, p1]))
        }
        Rule::Get => {
            let (
                Subject::Comp(Computation::Get(l, y, _)),
                Subject::Comp(Computation::Get(l2, z, tbody)),
            ) = (&d.conclusion.subject, target)
            else {
                return None;
            };
            if l != l2 {
                return None;
            }
            scope.push((y.clone(), z.clone()));
            let p = align_node(&d.premises[0], &Subject::Comp((**tbody).clone()), scope);
            scope.pop();
            Some(mk(vec![p?]))
        }
        Rule::Set => {
            let Subject::Comp(Computation::Set(l2, tv, trest)) = target else {
                return None;
            };
            let Subject::Comp(Computation::Set(l, _, _)) = &d.conclusion.subject else {
                return None;
            };
            if l != l2 {
                return None;
            }
            let p0 = align_node(&d.premises[0], &Subject::Val(tv.clone()), scope)?;
            let p1 = align_node(&d.premises[1], &Subject::Comp((**trest).clone()), scope)?;
            Some(mk(vec![p0, p1]))
        }
        Rule::UpdA => {
            let Subject::Store(StoreTerm::Upd(l2, tu, _)) = target else {
                return None;
            };
            let Subject::Store(StoreTerm::Upd(l, _, _)) = &d.conclusion.subject else {
                return None;
            };
            if l != l2 {
                return None;
            }
            let ptarget = match tu {
                LookupTerm::Val(v) => Subject::Val(v.clone()),
                LookupTerm::Lkp(_, _) => Subject::Lookup(tu.clone()),
            };
            let p = align_node(&d.premises[0], &ptarget, scope)?;
            Some(mk(vec![p]))
        }
        Rule::UpdB => {
            let Subject::Store(StoreTerm::Upd(l2, _, trest)) = target else {
                return None;
            };
            let Subject::Store(StoreTerm::Upd(l, _, _)) = &d.conclusion.subject else {
                return None;
            };
            if l != l2 {
                return None;
            }
            let p = align_node(&d.premises[0], &Subject::Store((**trest).clone()), scope)?;
            Some(mk(vec![p]))
        }
        Rule::Lkp => {
            let Subject::Lookup(LookupTerm::Lkp(l2, ts)) = target else {
                return None;
            };
            let Subject::Lookup(LookupTerm::Lkp(l, _)) = &d.conclusion.subject else {
                return None;
            };
            if l != l2 {
                return None;
            }
            let p = align_node(&d.premises[0], &Subject::Store((**ts).clone()), scope)?;
            Some(mk(vec![p]))
        }
        Rule::Conf => {
            let Subject::Config(tm, ts) = target else {
                return None;
            };
            let p0 = align_node(&d.premises[0], &Subject::Comp(tm.clone()), scope)?;
            let p1 = align_node(&d.premises[1], &Subject::Store(ts.clone()), scope)?;
            Some(mk(vec![p0, p1]))
        }
    }
}

fn alpha_subject_eq(a: &Subject, b: &Subject) -> bool {
    use crate::syntax::{alpha_eq, alpha_eq_value};
    match (a, b) {
        (Subject::Val(x), Subject::Val(y)) => alpha_eq_value(x, y),
        (Subject::Comp(x), Subject::Comp(y)) => alpha_eq(x, y),
        (Subject::Store(x), Subject::Store(y)) => alpha_eq_store(x, y),
        (Subject::Lookup(x), Subject::Lookup(y)) => alpha_eq_lookup(x, y),
        (Subject::Config(xm, xs), Subject::Config(ym, ys)) => {
            alpha_eq(xm, ym) && alpha_eq_store(xs, ys)
        }
        _ => false,
    }
}

pub(crate) fn alpha_eq_store(a: &StoreTerm, b: &StoreTerm) -> bool {
    match (a, b) {
        (StoreTerm::Emp, StoreTerm::Emp) => true,
        (StoreTerm::Upd(l1, u1, s1), StoreTerm::Upd(l2, u2, s2)) => {
            l1 == l2 && alpha_eq_lookup(u1, u2) && alpha_eq_store(s1, s2)
        }
        _ => false,
    }
}

pub(crate) fn alpha_eq_lookup(a: &LookupTerm, b: &LookupTerm) -> bool {
    use crate::syntax::alpha_eq_value;
    match (a, b) {
        (LookupTerm::Val(v1), LookupTerm::Val(v2)) => alpha_eq_value(v1, v2),
        (LookupTerm::Lkp(l1, s1), LookupTerm::Lkp(l2, s2)) => l1 == l2 && alpha_eq_store(s1, s2),
        _ => false,
    }
}

// ---------------------------------------------------------------------------
// Context surgery
// ---------------------------------------------------------------------------

/// Adds `x : d` to every context in the tree. The binding must be fresh for
/// the whole tree.
fn weaken(d: &Derivation, x: &Name, delta: &ValueType) -> Derivation {
    Derivation {
        rule: d.rule,
        conclusion: Judgment {
            ctx: d
                .conclusion
                .ctx
                .extended(x.clone(), delta.clone())
                .expect("weakening variable must be fresh"),
            subject: d.conclusion.subject.clone(),
            ty: d.conclusion.ty.clone(),
        },
        premises: d.premises.iter().map(|p| weaken(p, x, delta)).collect(),
    }
}

/// Removes the given keys from every context; no variable node may use them.
fn strip_keys(d: &Derivation, keys: &BTreeSet<Name>) -> Derivation {
    if let (Rule::Var, Subject::Val(Value::Var(x))) = (d.rule, &d.conclusion.subject) {
        assert!(!keys.contains(x), "cannot strip a used binding");
    }
    let mut ctx = d.conclusion.ctx.clone();
    for k in keys {
        ctx = ctx.removed(k);
    }
    Derivation {
        rule: d.rule,
        conclusion: Judgment {
            ctx,
            subject: d.conclusion.subject.clone(),
            ty: d.conclusion.ty.clone(),
        },
        premises: d.premises.iter().map(|p| strip_keys(p, keys)).collect(),
    }
}

// ---------------------------------------------------------------------------
// Substitution
// ---------------------------------------------------------------------------

/// From `G, x:d |- M : t` and `G |- V : d`, builds `G |- M[V/x] : t`.
pub fn subst_derivation(
    d_m: &Derivation,
    x: &Name,
    d_v: &Derivation,
) -> Result<Derivation, ExpandError> {
    let Subject::Val(v) = &d_v.conclusion.subject else {
        return Err(ExpandError::InputInvalid(
            "value derivation must type a value".into(),
        ));
    };
    let AnyType::D(delta) = &d_v.conclusion.ty else {
        return Err(ExpandError::InputInvalid(
            "value derivation must carry a value type".into(),
        ));
    };
    match d_m.conclusion.ctx.get(x) {
        Some(dx) if dx == delta => {}
        _ => {
            return Err(ExpandError::InputInvalid(
                "context must bind the substituted variable at the value's type".into(),
            ))
        }
    }
    if d_m.conclusion.ctx.removed(x) != d_v.conclusion.ctx {
        return Err(ExpandError::InputInvalid(
            "value derivation context must be the term context without x".into(),
        ));
    }
    if let Err(e) = check_derivation(d_m) {
        return Err(ExpandError::InputInvalid(e.to_string()));
    }
    if let Err(e) = check_derivation(d_v) {
        return Err(ExpandError::InputInvalid(e.to_string()));
    }
    Ok(subst_unchecked(d_m, x, v, d_v))
}

/// The splice itself, without input validation. Used internally by the step
/// transformers on derivations valid by construction.
pub(crate) fn subst_unchecked(
    d_m: &Derivation,
    x: &Name,
    v: &Value,
    d_v: &Derivation,
) -> Derivation {
    // Make binders unable to capture the value or shadow x.
    let mut avoid: VarSet = v.free_vars();
    avoid.insert(x.clone());
    for (k, _) in d_m.conclusion.ctx.iter() {
        avoid.insert(k.clone());
    }
    let prepared = match &d_m.conclusion.subject {
        Subject::Comp(m) => {
            let fresh = freshen_comp(m, &mut avoid.clone());
            align(d_m, &Subject::Comp(fresh)).expect("freshened subject is alpha-equal")
        }
        Subject::Val(w) => {
            let fresh = freshen_value(w, &mut avoid.clone());
            align(d_m, &Subject::Val(fresh)).expect("freshened subject is alpha-equal")
        }
        _ => d_m.clone(),
    };
    splice(&prepared, x, v, d_v)
}

fn subst_subject(subject: &Subject, x: &Name, v: &Value) -> Subject {
    match subject {
        Subject::Val(w) => Subject::Val(substitute_value(w, x, v)),
        Subject::Comp(m) => Subject::Comp(substitute(m, x, v)),
        Subject::Store(s) => Subject::Store(subst_store(s, x, v)),
        Subject::Lookup(u) => Subject::Lookup(subst_lookup(u, x, v)),
        Subject::Config(m, s) => Subject::Config(substitute(m, x, v), subst_store(s, x, v)),
    }
}

fn subst_store(s: &StoreTerm, x: &Name, v: &Value) -> StoreTerm {
    match s {
        StoreTerm::Emp => StoreTerm::Emp,
        StoreTerm::Upd(l, u, rest) => {
            StoreTerm::Upd(*l, subst_lookup(u, x, v), Arc::new(subst_store(rest, x, v)))
        }
    }
}

fn subst_lookup(u: &LookupTerm, x: &Name, v: &Value) -> LookupTerm {
    match u {
        LookupTerm::Val(w) => LookupTerm::Val(substitute_value(w, x, v)),
        LookupTerm::Lkp(l, s) => LookupTerm::Lkp(*l, Arc::new(subst_store(s, x, v))),
    }
}

fn splice(d: &Derivation, x: &Name, v: &Value, d_v: &Derivation) -> Derivation {
    // A variable node for x becomes the value derivation, weakened into the
    // local context.
    if let (Rule::Var, Subject::Val(Value::Var(y))) = (d.rule, &d.conclusion.subject) {
        if y == x {
            let mut out = d_v.clone();
            let local = d.conclusion.ctx.removed(x);
            for (k, delta) in local.iter() {
                if !out.conclusion.ctx.contains(k) {
                    out = weaken(&out, k, delta);
                }
            }
            return out;
        }
    }
    Derivation {
        rule: d.rule,
        conclusion: Judgment {
            ctx: d.conclusion.ctx.removed(x),
            subject: subst_subject(&d.conclusion.subject, x, v),
            ty: d.conclusion.ty.clone(),
        },
        premises: d.premises.iter().map(|p| splice(p, x, v, d_v)).collect(),
    }
}

// ---------------------------------------------------------------------------
// Expansion
// ---------------------------------------------------------------------------

enum Part<'a> {
    V(&'a Value),
    C(&'a Computation),
}

/// From `G |- M[V/x] : t` and the decomposition `(M, x, V)`, recovers
/// `(d, G |- V : d, (G, x:d) |- M : t)`. The returned term derivation's
/// subject is an alpha-variant of `M` whose binders avoid `x` and `FV(V)`.
pub fn expand_derivation(
    d: &Derivation,
    m: &Computation,
    x: &Name,
    v: &Value,
) -> Result<(ValueType, Derivation, Derivation), ExpandError> {
    if let Err(e) = check_derivation(d) {
        return Err(ExpandError::InputInvalid(e.to_string()));
    }
    if d.conclusion.ctx.contains(x) {
        return Err(ExpandError::InputInvalid(
            "the expansion variable is already bound in the context".into(),
        ));
    }
    expand_unchecked(d, m, x, v)
}

pub(crate) fn expand_unchecked(
    d: &Derivation,
    m: &Computation,
    x: &Name,
    v: &Value,
) -> Result<(ValueType, Derivation, Derivation), ExpandError> {
    let gamma = d.conclusion.ctx.clone();
    let mut avoid: VarSet = v.free_vars();
    avoid.insert(x.clone());
    for (k, _) in gamma.iter() {
        avoid.insert(k.clone());
    }
    avoid.extend(m.free_vars());
    let m_hat = freshen_comp(m, &mut avoid);
    let target = Subject::Comp(substitute(&m_hat, x, v));
    let aligned = align(d, &target).ok_or(ExpandError::DecompositionMismatch)?;

    // Pass 1: the types assigned to the occurrences of V.
    let mut occ: Vec<Derivation> = Vec::new();
    collect_occurrences(&aligned, Part::C(&m_hat), x, &gamma, &mut occ);
    let delta = occ
        .iter()
        .map(|o| match &o.conclusion.ty {
            AnyType::D(dd) => dd.clone(),
            _ => unreachable!("occurrences are value judgments"),
        })
        .fold(ValueType::top(), |acc, dd| acc.meet(&dd));
    let d_v = if occ.is_empty() {
        Derivation::omega(gamma.clone(), Subject::Val(v.clone()))
    } else {
        Derivation::inter(occ)
    };

    // Pass 2: rebuild the term derivation with x at type delta.
    let d_m = rebuild(&aligned, Part::C(&m_hat), x, &delta);
    Ok((delta, d_v, d_m))
}

/// Records the sub-derivations sitting at occurrence positions of `x`,
/// stripped back to the outer context.
fn collect_occurrences(
    d: &Derivation,
    part: Part<'_>,
    x: &Name,
    gamma: &Context,
    out: &mut Vec<Derivation>,
) {
    if let Part::V(Value::Var(y)) = part {
        if y == x {
            let extras: BTreeSet<Name> = d
                .conclusion
                .ctx
                .iter()
                .filter(|(k, _)| !gamma.contains(k))
                .map(|(k, _)| k.clone())
                .collect();
            out.push(strip_keys(d, &extras));
            return;
        }
    }
    match d.rule {
        Rule::Omega | Rule::Var => {}
        Rule::Inter | Rule::Sub => {
            for p in &d.premises {
                collect_occurrences(p, reborrow(&part), x, gamma, out);
            }
        }
        _ => {
            for (p, sub) in d.premises.iter().zip(subparts(&part)) {
                collect_occurrences(p, sub, x, gamma, out);
            }
        }
    }
}

fn reborrow<'a>(p: &Part<'a>) -> Part<'a> {
    match p {
        Part::V(v) => Part::V(v),
        Part::C(c) => Part::C(c),
    }
}

/// The un-substituted subterms matching each premise of a structural node.
fn subparts<'a>(part: &Part<'a>) -> Vec<Part<'a>> {
    match part {
        Part::V(Value::Lam(_, body)) => vec![Part::C(body)],
        Part::C(Computation::Unit(v)) => vec![Part::V(v)],
        Part::C(Computation::Bind(m, v)) => vec![Part::C(m), Part::V(v)],
        Part::C(Computation::Get(_, _, body)) => vec![Part::C(body)],
        Part::C(Computation::Set(_, v, rest)) => vec![Part::V(v), Part::C(rest)],
        _ => Vec::new(),
    }
}

fn part_subject(part: &Part<'_>) -> Subject {
    match part {
        Part::V(v) => Subject::Val((*v).clone()),
        Part::C(c) => Subject::Comp((*c).clone()),
    }
}

fn rebuild(d: &Derivation, part: Part<'_>, x: &Name, delta: &ValueType) -> Derivation {
    let ctx = d
        .conclusion
        .ctx
        .extended(x.clone(), delta.clone())
        .expect("binders were freshened away from x");
    if let Part::V(Value::Var(y)) = part {
        if y == x {
            // The occurrence becomes a variable node, subsumed back to the
            // type this occurrence originally had.
            return Derivation::var(ctx.clone(), x.clone()).sub(d.conclusion.ty.clone());
        }
    }
    let premises = match d.rule {
        Rule::Omega | Rule::Var => Vec::new(),
        Rule::Inter | Rule::Sub => d
            .premises
            .iter()
            .map(|p| rebuild(p, reborrow(&part), x, delta))
            .collect(),
        _ => d
            .premises
            .iter()
            .zip(subparts(&part))
            .map(|(p, sub)| rebuild(p, sub, x, delta))
            .collect(),
    };
    Derivation {
        rule: d.rule,
        conclusion: Judgment {
            ctx,
            subject: part_subject(&part),
            ty: d.conclusion.ty.clone(),
        },
        premises,
    }
}
