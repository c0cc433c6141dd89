//! Typing contexts, explicit derivation trees, and the rule-by-rule checker.
//!
//! The assignment system is not syntax-directed: the omega, intersection and
//! subsumption rules apply to any subject. General inference is therefore
//! off the table, and derivations are explicit data instead: every node
//! names its rule, its conclusion judgment, and its premises, and
//! [`check_derivation`] validates each node against its rule schema, with
//! types compared up to equivalence (equality of canonical forms) and
//! subsumption claims re-checked by the subtyping decision procedure.
//!
//! Rules for terms:
//!
//! - `(var)`: `G, x:d |- x : d`
//! - `(lam)`: `G, x:d |- M : t  =>  G |- \x.M : d -> t`
//! - `(unit)`: `G |- V : d  =>  G |- unit V : s -> d x s`
//! - `(bind)`: `G |- M : s -> d' x s'` and `G |- V : d' -> s' -> d'' x s''`
//!   give `G |- M >>= V : s -> d'' x s''`
//! - `(get)`: `G, x:d |- M : s -> k  =>  G |- get[l](\x.M) : <l:d> /\ s -> k`
//! - `(set)`: `G |- V : d`, `G |- M : <l:d> /\ s -> k`, `l` outside `dom(s)`
//!   give `G |- set[l](V). M : s -> k`
//!
//! Rules for stores, lookups and configurations:
//!
//! - `(upd-a)`: `G |- u : d  =>  G |- upd(l, u, s) : <l:d>`
//! - `(upd-b)`: `G |- s : <l':d>`, `l' /= l  =>  G |- upd(l, u, s) : <l':d>`
//! - `(lkp)`: `G |- s : <l:d>  =>  G |- lkp(l, s) : d`
//! - `(conf)`: `G |- M : s -> k` and `G |- s0 : s` give `G |- (M, s0) : k`

pub mod certify;
pub mod invert;
pub mod search;
pub mod steps;
pub mod stores;
pub mod subst;

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use crate::store::{LookupTerm, StoreTerm};
use crate::syntax::{Computation, Name, Value};
use crate::types::{dom_sigma, subtype, AnyType, CompType, ResultType, Sort, StoreType, ValueType};

pub use certify::{certify_convergence, Certificate, CertifyFailure};
pub use search::search_typing;
pub use steps::{expand_step, preserve_step, StepError};
pub use stores::{type_store, type_store_at};
pub use subst::{expand_derivation, subst_derivation, ExpandError};

/// A typing context: a finite map from variables to value types.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Context(BTreeMap<Name, ValueType>);

impl Context {
    pub fn empty() -> Context {
        Context(BTreeMap::new())
    }

    pub fn get(&self, x: &Name) -> Option<&ValueType> {
        self.0.get(x)
    }

    pub fn contains(&self, x: &Name) -> bool {
        self.0.contains_key(x)
    }

    /// `G, x:d`; the extension requires `x` not already bound.
    pub fn extended(&self, x: Name, d: ValueType) -> Option<Context> {
        if self.contains(&x) {
            return None;
        }
        let mut m = self.0.clone();
        m.insert(x, d);
        Some(Context(m))
    }

    pub fn removed(&self, x: &Name) -> Context {
        let mut m = self.0.clone();
        m.remove(x);
        Context(m)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Name, &ValueType)> {
        self.0.iter()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn from_pairs(pairs: impl IntoIterator<Item = (Name, ValueType)>) -> Context {
        Context(pairs.into_iter().collect())
    }
}

impl fmt::Display for Context {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, (x, d)) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{x} : {d}")?;
        }
        write!(f, "]")
    }
}

/// The subject of a judgment.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Subject {
    Val(Value),
    Comp(Computation),
    Store(StoreTerm),
    Lookup(LookupTerm),
    Config(Computation, StoreTerm),
}

impl Subject {
    /// Judgment sort: values and lookups carry value types, computations
    /// computation types, stores store types, configurations result types.
    pub fn sort(&self) -> Sort {
        match self {
            Subject::Val(_) | Subject::Lookup(_) => Sort::Value,
            Subject::Comp(_) => Sort::Comp,
            Subject::Store(_) => Sort::Store,
            Subject::Config(_, _) => Sort::Result,
        }
    }
}

/// A typing judgment `G |- subject : ty`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Judgment {
    pub ctx: Context,
    pub subject: Subject,
    pub ty: AnyType,
}

/// Rule tags of the assignment system.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Rule {
    Omega,
    Inter,
    Sub,
    Var,
    Lam,
    Unit,
    Bind,
    Get,
    Set,
    UpdA,
    UpdB,
    Lkp,
    Conf,
}

impl Rule {
    pub fn name(self) -> &'static str {
        match self {
            Rule::Omega => "w",
            Rule::Inter => "and",
            Rule::Sub => "sub",
            Rule::Var => "var",
            Rule::Lam => "lam",
            Rule::Unit => "unit",
            Rule::Bind => "bind",
            Rule::Get => "get",
            Rule::Set => "set",
            Rule::UpdA => "upd-a",
            Rule::UpdB => "upd-b",
            Rule::Lkp => "lkp",
            Rule::Conf => "conf",
        }
    }

    pub fn from_name(s: &str) -> Option<Rule> {
        Some(match s {
            "w" => Rule::Omega,
            "and" => Rule::Inter,
            "sub" => Rule::Sub,
            "var" => Rule::Var,
            "lam" => Rule::Lam,
            "unit" => Rule::Unit,
            "bind" => Rule::Bind,
            "get" => Rule::Get,
            "set" => Rule::Set,
            "upd-a" => Rule::UpdA,
            "upd-b" => Rule::UpdB,
            "lkp" => Rule::Lkp,
            "conf" => Rule::Conf,
            _ => return None,
        })
    }
}

/// An explicit proof tree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Derivation {
    pub rule: Rule,
    pub conclusion: Judgment,
    pub premises: Vec<Derivation>,
}

/// Why a node failed to instantiate its rule.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CheckReason {
    ShapeMismatch(String),
    SubtypeFails,
    SideConditionFails,
    ContextMismatch,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CheckError {
    /// Premise indices from the root to the failing node.
    pub path: Vec<usize>,
    pub rule: Rule,
    pub reason: CheckReason,
}

impl fmt::Display for CheckError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "rule ({}) at path {:?}: ", self.rule.name(), self.path)?;
        match &self.reason {
            CheckReason::ShapeMismatch(s) => write!(f, "shape mismatch: {s}"),
            CheckReason::SubtypeFails => write!(f, "claimed subtyping does not hold"),
            CheckReason::SideConditionFails => write!(f, "side condition fails"),
            CheckReason::ContextMismatch => write!(f, "premise context mismatch"),
        }
    }
}

impl std::error::Error for CheckError {}

/// Validates every node of a derivation against its rule schema.
pub fn check_derivation(d: &Derivation) -> Result<(), CheckError> {
    let mut path = Vec::new();
    check_node(d, &mut path)
}

fn fail(rule: Rule, path: &[usize], reason: CheckReason) -> Result<(), CheckError> {
    Err(CheckError {
        path: path.to_vec(),
        rule,
        reason,
    })
}

fn shape(rule: Rule, path: &[usize], msg: impl Into<String>) -> Result<(), CheckError> {
    fail(rule, path, CheckReason::ShapeMismatch(msg.into()))
}

fn check_node(d: &Derivation, path: &mut Vec<usize>) -> Result<(), CheckError> {
    let j = &d.conclusion;
    let rule = d.rule;
    if j.ty.sort() != j.subject.sort() {
        return shape(rule, path, "judgment type sort does not match its subject");
    }
    match rule {
        Rule::Omega => {
            if !d.premises.is_empty() {
                return shape(rule, path, "omega rule takes no premises");
            }
            if !j.ty.is_top() {
                return shape(rule, path, "omega rule assigns the top type of the sort");
            }
        }
        Rule::Inter => {
            if d.premises.len() < 2 {
                return shape(rule, path, "intersection rule needs at least two premises");
            }
            let mut met: Option<AnyType> = None;
            for p in &d.premises {
                if p.conclusion.ctx != j.ctx {
                    return fail(rule, path, CheckReason::ContextMismatch);
                }
                if p.conclusion.subject != j.subject {
                    return shape(rule, path, "intersection premises must share the subject");
                }
                met = Some(match met {
                    None => p.conclusion.ty.clone(),
                    Some(acc) => match acc.meet(&p.conclusion.ty) {
                        Ok(m) => m,
                        Err(_) => return shape(rule, path, "premises of different sorts"),
                    },
                });
            }
            if met.as_ref() != Some(&j.ty) {
                return shape(
                    rule,
                    path,
                    "conclusion is not the intersection of the premises",
                );
            }
        }
        Rule::Sub => {
            let [p] = premises(d, rule, path)?;
            if p.conclusion.ctx != j.ctx {
                return fail(rule, path, CheckReason::ContextMismatch);
            }
            if p.conclusion.subject != j.subject {
                return shape(rule, path, "subsumption keeps the subject");
            }
            match subtype(&p.conclusion.ty, &j.ty) {
                Ok(true) => {}
                _ => return fail(rule, path, CheckReason::SubtypeFails),
            }
        }
        Rule::Var => {
            if !d.premises.is_empty() {
                return shape(rule, path, "variable rule takes no premises");
            }
            let Subject::Val(Value::Var(x)) = &j.subject else {
                return shape(rule, path, "variable rule applies to a variable");
            };
            match j.ctx.get(x) {
                None => return fail(rule, path, CheckReason::ContextMismatch),
                Some(dctx) => {
                    if j.ty != AnyType::D(dctx.clone()) {
                        return shape(rule, path, "variable must receive its context type");
                    }
                }
            }
        }
        Rule::Lam => {
            let [p] = premises(d, rule, path)?;
            let Subject::Val(Value::Lam(x, body)) = &j.subject else {
                return shape(rule, path, "lambda rule applies to an abstraction");
            };
            let AnyType::D(dt) = &j.ty else {
                return shape(rule, path, "lambda conclusion is a value type");
            };
            let [(dom, tau)] = dt.arrows() else {
                return shape(rule, path, "lambda conclusion is a single arrow");
            };
            if p.conclusion.subject != Subject::Comp((**body).clone()) {
                return shape(rule, path, "premise subject must be the body");
            }
            if p.conclusion.ty != AnyType::T(tau.clone()) {
                return shape(rule, path, "premise type must be the arrow target");
            }
            let Some(expected) = j.ctx.extended(x.clone(), dom.clone()) else {
                return fail(rule, path, CheckReason::ContextMismatch);
            };
            if p.conclusion.ctx != expected {
                return fail(rule, path, CheckReason::ContextMismatch);
            }
        }
        Rule::Unit => {
            let [p] = premises(d, rule, path)?;
            let Subject::Comp(Computation::Unit(v)) = &j.subject else {
                return shape(rule, path, "unit rule applies to unit V");
            };
            if p.conclusion.ctx != j.ctx {
                return fail(rule, path, CheckReason::ContextMismatch);
            }
            if p.conclusion.subject != Subject::Val(v.clone()) {
                return shape(rule, path, "premise subject must be the returned value");
            }
            let AnyType::D(delta) = &p.conclusion.ty else {
                return shape(rule, path, "premise assigns a value type");
            };
            let Some((src, tgt)) = single_arrow(&j.ty) else {
                return shape(rule, path, "unit conclusion is a single arrow");
            };
            let expected = ResultType::Prod(delta.clone(), src.clone());
            if tgt != &expected {
                return shape(
                    rule,
                    path,
                    "unit target must be d x s over the same store type",
                );
            }
        }
        Rule::Bind => {
            let [pm, pv] = premises(d, rule, path)?;
            let Subject::Comp(Computation::Bind(m, v)) = &j.subject else {
                return shape(rule, path, "bind rule applies to M >>= V");
            };
            for p in [&pm, &pv] {
                if p.conclusion.ctx != j.ctx {
                    return fail(rule, path, CheckReason::ContextMismatch);
                }
            }
            if pm.conclusion.subject != Subject::Comp((**m).clone()) {
                return shape(rule, path, "first premise types the bound computation");
            }
            if pv.conclusion.subject != Subject::Val(v.clone()) {
                return shape(rule, path, "second premise types the function value");
            }
            let Some((sigma, mid)) = single_arrow(&pm.conclusion.ty) else {
                return shape(rule, path, "first premise is a single arrow");
            };
            let ResultType::Prod(d1, s1) = mid else {
                return shape(rule, path, "first premise target is a product");
            };
            let AnyType::D(fun) = &pv.conclusion.ty else {
                return shape(rule, path, "second premise assigns a value type");
            };
            let [(d2, inner)] = fun.arrows() else {
                return shape(rule, path, "function type is a single arrow");
            };
            let [(s2, kappa)] = inner.arrows() else {
                return shape(rule, path, "function type is curried over the store");
            };
            if d2 != d1 || s2 != s1 {
                return shape(
                    rule,
                    path,
                    "function source must match the first premise target",
                );
            }
            let Some((src, tgt)) = single_arrow(&j.ty) else {
                return shape(rule, path, "bind conclusion is a single arrow");
            };
            if src != sigma || tgt != kappa {
                return shape(
                    rule,
                    path,
                    "bind conclusion must be s -> k from the premises",
                );
            }
        }
        Rule::Get => {
            let [p] = premises(d, rule, path)?;
            let Subject::Comp(Computation::Get(l, x, body)) = &j.subject else {
                return shape(rule, path, "get rule applies to get[l](\\x. M)");
            };
            if p.conclusion.subject != Subject::Comp((**body).clone()) {
                return shape(rule, path, "premise subject must be the body");
            }
            if j.ctx.contains(x) {
                return fail(rule, path, CheckReason::ContextMismatch);
            }
            let Some(delta) = p.conclusion.ctx.get(x).cloned() else {
                return fail(rule, path, CheckReason::ContextMismatch);
            };
            if p.conclusion.ctx.removed(x) != j.ctx {
                return fail(rule, path, CheckReason::ContextMismatch);
            }
            let Some((sigma, kappa)) = single_arrow(&p.conclusion.ty) else {
                return shape(rule, path, "premise is a single arrow");
            };
            let source = StoreType::entry(*l, delta).meet(sigma);
            let Some((src, tgt)) = single_arrow(&j.ty) else {
                return shape(rule, path, "get conclusion is a single arrow");
            };
            if src != &source || tgt != kappa {
                return shape(rule, path, "get conclusion must be <l:d> /\\ s -> k");
            }
        }
        Rule::Set => {
            let [pv, pm] = premises(d, rule, path)?;
            let Subject::Comp(Computation::Set(l, v, rest)) = &j.subject else {
                return shape(rule, path, "set rule applies to set[l](V). M");
            };
            for p in [&pv, &pm] {
                if p.conclusion.ctx != j.ctx {
                    return fail(rule, path, CheckReason::ContextMismatch);
                }
            }
            if pv.conclusion.subject != Subject::Val(v.clone()) {
                return shape(rule, path, "first premise types the written value");
            }
            let AnyType::D(delta) = &pv.conclusion.ty else {
                return shape(rule, path, "first premise assigns a value type");
            };
            if pm.conclusion.subject != Subject::Comp((**rest).clone()) {
                return shape(rule, path, "second premise types the continuation");
            }
            let Some((src_in, kappa)) = single_arrow(&pm.conclusion.ty) else {
                return shape(rule, path, "second premise is a single arrow");
            };
            let entry_ty = match src_in.entries().and_then(|m| m.get(l)) {
                Some(t) => t,
                None => {
                    return shape(
                        rule,
                        path,
                        "continuation source must constrain the written location",
                    )
                }
            };
            if entry_ty != delta {
                return shape(
                    rule,
                    path,
                    "entry at the written location must be the value's type",
                );
            }
            let sigma = src_in.without(*l);
            let Some((src, tgt)) = single_arrow(&j.ty) else {
                return shape(rule, path, "set conclusion is a single arrow");
            };
            if dom_sigma(src).contains(l) {
                return fail(rule, path, CheckReason::SideConditionFails);
            }
            if src != &sigma || tgt != kappa {
                return shape(
                    rule,
                    path,
                    "set conclusion must be s -> k with the entry removed",
                );
            }
        }
        Rule::UpdA => {
            let [p] = premises(d, rule, path)?;
            let Subject::Store(StoreTerm::Upd(l, u, _)) = &j.subject else {
                return shape(rule, path, "upd-a applies to an update");
            };
            if p.conclusion.ctx != j.ctx {
                return fail(rule, path, CheckReason::ContextMismatch);
            }
            let expected_subject = match u {
                LookupTerm::Val(v) => Subject::Val(v.clone()),
                LookupTerm::Lkp(_, _) => Subject::Lookup(u.clone()),
            };
            if p.conclusion.subject != expected_subject {
                return shape(rule, path, "premise subject must be the written argument");
            }
            let AnyType::D(delta) = &p.conclusion.ty else {
                return shape(rule, path, "premise assigns a value type");
            };
            if j.ty != AnyType::S(StoreType::entry(*l, delta.clone())) {
                return shape(
                    rule,
                    path,
                    "upd-a concludes <l : d> at the written location",
                );
            }
        }
        Rule::UpdB => {
            let [p] = premises(d, rule, path)?;
            let Subject::Store(StoreTerm::Upd(l, _, s)) = &j.subject else {
                return shape(rule, path, "upd-b applies to an update");
            };
            if p.conclusion.ctx != j.ctx {
                return fail(rule, path, CheckReason::ContextMismatch);
            }
            if p.conclusion.subject != Subject::Store((**s).clone()) {
                return shape(rule, path, "premise subject must be the underlying store");
            }
            let Some((l2, _)) = single_entry(&p.conclusion.ty) else {
                return shape(rule, path, "premise assigns a single location entry");
            };
            if l2 == *l {
                return fail(rule, path, CheckReason::SideConditionFails);
            }
            if j.ty != p.conclusion.ty {
                return shape(rule, path, "upd-b passes the entry through");
            }
        }
        Rule::Lkp => {
            let [p] = premises(d, rule, path)?;
            let Subject::Lookup(LookupTerm::Lkp(l, s)) = &j.subject else {
                return shape(rule, path, "lkp applies to a lookup expression");
            };
            if p.conclusion.ctx != j.ctx {
                return fail(rule, path, CheckReason::ContextMismatch);
            }
            if p.conclusion.subject != Subject::Store((**s).clone()) {
                return shape(rule, path, "premise subject must be the inspected store");
            }
            let Some((l2, delta)) = single_entry(&p.conclusion.ty) else {
                return shape(rule, path, "premise assigns a single location entry");
            };
            if l2 != *l {
                return shape(rule, path, "premise entry must be at the read location");
            }
            if j.ty != AnyType::D(delta.clone()) {
                return shape(rule, path, "lkp concludes the entry type");
            }
        }
        Rule::Conf => {
            let [pm, ps] = premises(d, rule, path)?;
            let Subject::Config(m, s) = &j.subject else {
                return shape(rule, path, "conf applies to a configuration");
            };
            for p in [&pm, &ps] {
                if p.conclusion.ctx != j.ctx {
                    return fail(rule, path, CheckReason::ContextMismatch);
                }
            }
            if pm.conclusion.subject != Subject::Comp(m.clone()) {
                return shape(rule, path, "first premise types the computation");
            }
            if ps.conclusion.subject != Subject::Store(s.clone()) {
                return shape(rule, path, "second premise types the store");
            }
            let Some((sigma, kappa)) = single_arrow(&pm.conclusion.ty) else {
                return shape(rule, path, "first premise is a single arrow");
            };
            if ps.conclusion.ty != AnyType::S(sigma.clone()) {
                return shape(rule, path, "store premise must match the arrow source");
            }
            if j.ty != AnyType::C(kappa.clone()) {
                return shape(rule, path, "conf concludes the arrow target");
            }
        }
    }
    for (i, p) in d.premises.iter().enumerate() {
        path.push(i);
        check_node(p, path)?;
        path.pop();
    }
    Ok(())
}

fn premises<'a, const N: usize>(
    d: &'a Derivation,
    rule: Rule,
    path: &[usize],
) -> Result<[&'a Derivation; N], CheckError> {
    let ps: Vec<&Derivation> = d.premises.iter().collect();
    match <[&Derivation; N]>::try_from(ps) {
        Ok(arr) => Ok(arr),
        Err(_) => Err(CheckError {
            path: path.to_vec(),
            rule,
            reason: CheckReason::ShapeMismatch(format!("rule expects {N} premises")),
        }),
    }
}

/// The unique arrow of a singleton computation type.
fn single_arrow(ty: &AnyType) -> Option<(&StoreType, &ResultType)> {
    match ty {
        AnyType::T(t) => t.as_single_arrow(),
        _ => None,
    }
}

/// The unique entry of a singleton store type.
fn single_entry(ty: &AnyType) -> Option<(crate::syntax::Location, &ValueType)> {
    match ty {
        AnyType::S(StoreType::Entries(m)) if m.len() == 1 => m.iter().next().map(|(l, d)| (*l, d)),
        _ => None,
    }
}

// ---------------------------------------------------------------------------
// Constructors
//
// These compute conclusions from premises; their preconditions are the
// metatheory invariants of the transformers that call them, so violations
// panic. Everything they produce is re-checked by the soundness harness.
// ---------------------------------------------------------------------------

impl Derivation {
    pub fn omega(ctx: Context, subject: Subject) -> Derivation {
        let ty = AnyType::top_of(subject.sort());
        Derivation {
            rule: Rule::Omega,
            conclusion: Judgment { ctx, subject, ty },
            premises: Vec::new(),
        }
    }

    /// Subsumption to `ty`; skipped when the type is unchanged.
    pub fn sub(self, ty: AnyType) -> Derivation {
        if self.conclusion.ty == ty {
            return self;
        }
        debug_assert_eq!(
            subtype(&self.conclusion.ty, &ty),
            Ok(true),
            "unsound subsumption"
        );
        Derivation {
            rule: Rule::Sub,
            conclusion: Judgment {
                ctx: self.conclusion.ctx.clone(),
                subject: self.conclusion.subject.clone(),
                ty,
            },
            premises: vec![self],
        }
    }

    /// Intersection of several derivations of the same subject.
    pub fn inter(mut ds: Vec<Derivation>) -> Derivation {
        assert!(!ds.is_empty(), "intersection of no derivations");
        if ds.len() == 1 {
            return ds.pop().unwrap();
        }
        let ty = ds
            .iter()
            .map(|d| d.conclusion.ty.clone())
            .reduce(|a, b| a.meet(&b).expect("intersection premises share a sort"))
            .unwrap();
        Derivation {
            rule: Rule::Inter,
            conclusion: Judgment {
                ctx: ds[0].conclusion.ctx.clone(),
                subject: ds[0].conclusion.subject.clone(),
                ty,
            },
            premises: ds,
        }
    }

    pub fn var(ctx: Context, x: Name) -> Derivation {
        let d = ctx.get(&x).expect("variable must be in context").clone();
        Derivation {
            rule: Rule::Var,
            conclusion: Judgment {
                ctx,
                subject: Subject::Val(Value::Var(x)),
                ty: AnyType::D(d),
            },
            premises: Vec::new(),
        }
    }

    /// Abstraction over `x`, which must be bound in the body's context.
    pub fn lam(x: Name, body: Derivation) -> Derivation {
        let delta = body
            .conclusion
            .ctx
            .get(&x)
            .expect("binder must be in the body context")
            .clone();
        let AnyType::T(tau) = body.conclusion.ty.clone() else {
            panic!("lambda body must carry a computation type");
        };
        let Subject::Comp(body_term) = body.conclusion.subject.clone() else {
            panic!("lambda body subject must be a computation");
        };
        let ctx = body.conclusion.ctx.removed(&x);
        Derivation {
            rule: Rule::Lam,
            conclusion: Judgment {
                ctx,
                subject: Subject::Val(Value::Lam(x, Arc::new(body_term))),
                ty: AnyType::D(ValueType::arrow(delta, tau)),
            },
            premises: vec![body],
        }
    }

    /// `unit` introduction at store type `sigma`.
    pub fn unit(val: Derivation, sigma: StoreType) -> Derivation {
        let AnyType::D(delta) = val.conclusion.ty.clone() else {
            panic!("unit premise must carry a value type");
        };
        let Subject::Val(v) = val.conclusion.subject.clone() else {
            panic!("unit premise subject must be a value");
        };
        let ty = CompType::arrow(sigma.clone(), ResultType::Prod(delta, sigma));
        Derivation {
            rule: Rule::Unit,
            conclusion: Judgment {
                ctx: val.conclusion.ctx.clone(),
                subject: Subject::Comp(Computation::Unit(v)),
                ty: AnyType::T(ty),
            },
            premises: vec![val],
        }
    }

    pub fn bind(m: Derivation, v: Derivation) -> Derivation {
        let (sigma, mid) = single_arrow(&m.conclusion.ty)
            .map(|(s, k)| (s.clone(), k.clone()))
            .expect("bind first premise must be a single arrow");
        let AnyType::D(fun) = &v.conclusion.ty else {
            panic!("bind second premise must carry a value type");
        };
        let [(d2, inner)] = fun.arrows() else {
            panic!("bind function type must be a single arrow");
        };
        let [(s2, kappa)] = inner.arrows() else {
            panic!("bind function type must be curried over the store");
        };
        debug_assert_eq!(mid, ResultType::Prod(d2.clone(), s2.clone()));
        let kappa = kappa.clone();
        let (Subject::Comp(mt), Subject::Val(vt)) =
            (m.conclusion.subject.clone(), v.conclusion.subject.clone())
        else {
            panic!("bind premise subjects must be a computation and a value");
        };
        let ty = AnyType::T(CompType::arrow(sigma, kappa));
        Derivation {
            rule: Rule::Bind,
            conclusion: Judgment {
                ctx: m.conclusion.ctx.clone(),
                subject: Subject::Comp(Computation::bind(mt, vt)),
                ty,
            },
            premises: vec![m, v],
        }
    }

    /// `get` introduction; `x` must be bound in the body's context.
    pub fn get(l: crate::syntax::Location, x: Name, body: Derivation) -> Derivation {
        let delta = body
            .conclusion
            .ctx
            .get(&x)
            .expect("get binder must be in the body context")
            .clone();
        let (sigma, kappa) = single_arrow(&body.conclusion.ty)
            .map(|(s, k)| (s.clone(), k.clone()))
            .expect("get premise must be a single arrow");
        let Subject::Comp(body_term) = body.conclusion.subject.clone() else {
            panic!("get body subject must be a computation");
        };
        let ctx = body.conclusion.ctx.removed(&x);
        let source = StoreType::entry(l, delta).meet(&sigma);
        Derivation {
            rule: Rule::Get,
            conclusion: Judgment {
                ctx,
                subject: Subject::Comp(Computation::Get(l, x, Arc::new(body_term))),
                ty: AnyType::T(CompType::arrow(source, kappa)),
            },
            premises: vec![body],
        }
    }

    /// `set` introduction; the continuation's source must contain an entry
    /// at `l` equal to the written value's type.
    pub fn set(l: crate::syntax::Location, val: Derivation, cont: Derivation) -> Derivation {
        let (src_in, kappa) = single_arrow(&cont.conclusion.ty)
            .map(|(s, k)| (s.clone(), k.clone()))
            .expect("set continuation must be a single arrow");
        let sigma = src_in.without(l);
        debug_assert!(!dom_sigma(&sigma).contains(&l));
        let (Subject::Val(v), Subject::Comp(rest)) = (
            val.conclusion.subject.clone(),
            cont.conclusion.subject.clone(),
        ) else {
            panic!("set premise subjects must be a value and a computation");
        };
        let ty = AnyType::T(CompType::arrow(sigma, kappa));
        Derivation {
            rule: Rule::Set,
            conclusion: Judgment {
                ctx: val.conclusion.ctx.clone(),
                subject: Subject::Comp(Computation::Set(l, v, Arc::new(rest))),
                ty,
            },
            premises: vec![val, cont],
        }
    }

    pub fn upd_a(l: crate::syntax::Location, arg: Derivation, store: StoreTerm) -> Derivation {
        let AnyType::D(delta) = arg.conclusion.ty.clone() else {
            panic!("upd-a premise must carry a value type");
        };
        let u = match arg.conclusion.subject.clone() {
            Subject::Val(v) => LookupTerm::Val(v),
            Subject::Lookup(u) => u,
            _ => panic!("upd-a premise subject must be a value or lookup"),
        };
        Derivation {
            rule: Rule::UpdA,
            conclusion: Judgment {
                ctx: arg.conclusion.ctx.clone(),
                subject: Subject::Store(StoreTerm::Upd(l, u, Arc::new(store))),
                ty: AnyType::S(StoreType::entry(l, delta)),
            },
            premises: vec![arg],
        }
    }

    pub fn upd_b(l: crate::syntax::Location, u: LookupTerm, inner: Derivation) -> Derivation {
        let Subject::Store(s) = inner.conclusion.subject.clone() else {
            panic!("upd-b premise subject must be a store");
        };
        let ty = inner.conclusion.ty.clone();
        Derivation {
            rule: Rule::UpdB,
            conclusion: Judgment {
                ctx: inner.conclusion.ctx.clone(),
                subject: Subject::Store(StoreTerm::Upd(l, u, Arc::new(s))),
                ty,
            },
            premises: vec![inner],
        }
    }

    pub fn lkp(l: crate::syntax::Location, store: Derivation) -> Derivation {
        let Some((l2, delta)) = single_entry(&store.conclusion.ty) else {
            panic!("lkp premise must assign a single entry");
        };
        assert_eq!(l2, l, "lkp premise entry must be at the read location");
        let delta = delta.clone();
        let Subject::Store(s) = store.conclusion.subject.clone() else {
            panic!("lkp premise subject must be a store");
        };
        Derivation {
            rule: Rule::Lkp,
            conclusion: Judgment {
                ctx: store.conclusion.ctx.clone(),
                subject: Subject::Lookup(LookupTerm::Lkp(l, Arc::new(s))),
                ty: AnyType::D(delta),
            },
            premises: vec![store],
        }
    }

    pub fn conf(m: Derivation, s: Derivation) -> Derivation {
        let (sigma, kappa) = single_arrow(&m.conclusion.ty)
            .map(|(a, b)| (a.clone(), b.clone()))
            .expect("conf first premise must be a single arrow");
        debug_assert_eq!(s.conclusion.ty, AnyType::S(sigma));
        let (Subject::Comp(mt), Subject::Store(st)) =
            (m.conclusion.subject.clone(), s.conclusion.subject.clone())
        else {
            panic!("conf premise subjects must be a computation and a store");
        };
        Derivation {
            rule: Rule::Conf,
            conclusion: Judgment {
                ctx: m.conclusion.ctx.clone(),
                subject: Subject::Config(mt, st),
                ty: AnyType::C(kappa),
            },
            premises: vec![m, s],
        }
    }
}
