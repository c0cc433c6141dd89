//! Terms of the calculus: values and computations, binding, capture-avoiding
//! substitution, alpha-equivalence, and the surface sugar encodings.
//!
//! Terms come in two sorts. Values are variables and abstractions;
//! computations are `unit V`, `M >>= V`, `get[l](\x. M)` and `set[l](V). M`.
//! Terms are identified up to renaming of bound variables; [`alpha_eq`] is the
//! semantic equality used throughout.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

/// An abstract store location, rendered `l0`, `l1`, ...
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Location(pub u32);

impl fmt::Display for Location {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "l{}", self.0)
    }
}

/// A term variable name.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Name(pub String);

impl Name {
    pub fn new(s: impl Into<String>) -> Self {
        Name(s.into())
    }
}

impl fmt::Display for Name {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl From<&str> for Name {
    fn from(s: &str) -> Self {
        Name(s.to_string())
    }
}

/// Value terms: variables and abstractions.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Value {
    Var(Name),
    /// `\x. M` — the body is a computation.
    Lam(Name, Arc<Computation>),
}

/// Computation terms.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Computation {
    /// `unit V`, the trivial computation returning `V`.
    Unit(Value),
    /// `M >>= V`, with `V` in function position.
    Bind(Arc<Computation>, Value),
    /// `get[l](\x. M)` reads location `l` and binds `x` in `M`.
    Get(Location, Name, Arc<Computation>),
    /// `set[l](V). M` writes `V` to location `l`, then proceeds as `M`.
    Set(Location, Value, Arc<Computation>),
}

/// A finite set of variable names.
pub type VarSet = BTreeSet<Name>;

impl Value {
    pub fn var(s: &str) -> Value {
        Value::Var(Name::from(s))
    }

    pub fn lam(x: &str, body: Computation) -> Value {
        Value::Lam(Name::from(x), Arc::new(body))
    }

    /// The identity value `\x. unit x`.
    pub fn identity() -> Value {
        Value::lam("x", Computation::Unit(Value::var("x")))
    }

    pub fn free_vars(&self) -> VarSet {
        let mut acc = BTreeSet::new();
        free_vars_value(self, &mut Vec::new(), &mut acc);
        acc
    }

    pub fn is_closed(&self) -> bool {
        self.free_vars().is_empty()
    }
}

impl Computation {
    pub fn unit(v: Value) -> Computation {
        Computation::Unit(v)
    }

    pub fn bind(m: Computation, v: Value) -> Computation {
        Computation::Bind(Arc::new(m), v)
    }

    pub fn get(l: Location, x: &str, body: Computation) -> Computation {
        Computation::Get(l, Name::from(x), Arc::new(body))
    }

    pub fn set(l: Location, v: Value, rest: Computation) -> Computation {
        Computation::Set(l, v, Arc::new(rest))
    }

    /// The paradigmatic divergent computation: steps to itself in every store.
    pub fn omega() -> Computation {
        let dup = Value::lam(
            "x",
            Computation::bind(Computation::unit(Value::var("x")), Value::var("x")),
        );
        Computation::bind(Computation::unit(dup.clone()), dup)
    }

    pub fn free_vars(&self) -> VarSet {
        let mut acc = BTreeSet::new();
        free_vars_comp(self, &mut Vec::new(), &mut acc);
        acc
    }

    pub fn is_closed(&self) -> bool {
        self.free_vars().is_empty()
    }

    /// All locations mentioned in the term.
    pub fn locations(&self) -> BTreeSet<Location> {
        let mut acc = BTreeSet::new();
        locations_comp(self, &mut acc);
        acc
    }
}

fn free_vars_value(v: &Value, bound: &mut Vec<Name>, acc: &mut VarSet) {
    match v {
        Value::Var(x) => {
            if !bound.contains(x) {
                acc.insert(x.clone());
            }
        }
        Value::Lam(x, m) => {
            bound.push(x.clone());
            free_vars_comp(m, bound, acc);
            bound.pop();
        }
    }
}

fn free_vars_comp(m: &Computation, bound: &mut Vec<Name>, acc: &mut VarSet) {
    match m {
        Computation::Unit(v) => free_vars_value(v, bound, acc),
        Computation::Bind(m, v) => {
            free_vars_comp(m, bound, acc);
            free_vars_value(v, bound, acc);
        }
        Computation::Get(_, x, body) => {
            bound.push(x.clone());
            free_vars_comp(body, bound, acc);
            bound.pop();
        }
        Computation::Set(_, v, rest) => {
            free_vars_value(v, bound, acc);
            free_vars_comp(rest, bound, acc);
        }
    }
}

fn locations_comp(m: &Computation, acc: &mut BTreeSet<Location>) {
    match m {
        Computation::Unit(v) => locations_value(v, acc),
        Computation::Bind(m, v) => {
            locations_comp(m, acc);
            locations_value(v, acc);
        }
        Computation::Get(l, _, body) => {
            acc.insert(*l);
            locations_comp(body, acc);
        }
        Computation::Set(l, v, rest) => {
            acc.insert(*l);
            locations_value(v, acc);
            locations_comp(rest, acc);
        }
    }
}

fn locations_value(v: &Value, acc: &mut BTreeSet<Location>) {
    if let Value::Lam(_, m) = v {
        locations_comp(m, acc);
    }
}

/// Picks a name not in `avoid`, appending primes to `base`.
pub fn fresh_name(base: &Name, avoid: &VarSet) -> Name {
    if !avoid.contains(base) {
        return base.clone();
    }
    let mut candidate = base.0.clone();
    loop {
        candidate.push('\'');
        let name = Name(candidate.clone());
        if !avoid.contains(&name) {
            return name;
        }
    }
}

/// Capture-avoiding substitution `M[V/x]`.
pub fn substitute(m: &Computation, x: &Name, v: &Value) -> Computation {
    match m {
        Computation::Unit(w) => Computation::Unit(substitute_value(w, x, v)),
        Computation::Bind(n, w) => {
            Computation::bind(substitute(n, x, v), substitute_value(w, x, v))
        }
        Computation::Get(l, y, body) => {
            let (y, body) = subst_under_binder(y, body, x, v);
            Computation::Get(*l, y, Arc::new(body))
        }
        Computation::Set(l, w, rest) => Computation::Set(
            *l,
            substitute_value(w, x, v),
            Arc::new(substitute(rest, x, v)),
        ),
    }
}

/// Capture-avoiding substitution `W[V/x]` on values.
pub fn substitute_value(w: &Value, x: &Name, v: &Value) -> Value {
    match w {
        Value::Var(y) => {
            if y == x {
                v.clone()
            } else {
                w.clone()
            }
        }
        Value::Lam(y, body) => {
            let (y, body) = subst_under_binder(y, body, x, v);
            Value::Lam(y, Arc::new(body))
        }
    }
}

fn subst_under_binder(y: &Name, body: &Computation, x: &Name, v: &Value) -> (Name, Computation) {
    if y == x {
        // Bound occurrence shadows x.
        return (y.clone(), body.clone());
    }
    let fv_v = v.free_vars();
    if fv_v.contains(y) && body.free_vars().contains(x) {
        // Rename y so it cannot capture a free variable of v.
        let mut avoid = fv_v;
        avoid.extend(body.free_vars());
        avoid.insert(x.clone());
        let y2 = fresh_name(y, &avoid);
        let renamed = substitute(body, y, &Value::Var(y2.clone()));
        (y2.clone(), substitute(&renamed, x, v))
    } else if fv_v.contains(y) {
        // x does not occur free in the body, so nothing is substituted.
        (y.clone(), body.clone())
    } else {
        (y.clone(), substitute(body, x, v))
    }
}

// ---------------------------------------------------------------------------
// Alpha-equivalence via a locally nameless view
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
enum DbValue {
    Free(Name),
    Bound(usize),
    Lam(Box<DbComp>),
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
enum DbComp {
    Unit(DbValue),
    Bind(Box<DbComp>, DbValue),
    Get(Location, Box<DbComp>),
    Set(Location, DbValue, Box<DbComp>),
}

fn db_value(v: &Value, scope: &mut Vec<Name>) -> DbValue {
    match v {
        Value::Var(x) => match scope.iter().rev().position(|y| y == x) {
            Some(i) => DbValue::Bound(i),
            None => DbValue::Free(x.clone()),
        },
        Value::Lam(x, body) => {
            scope.push(x.clone());
            let b = db_comp(body, scope);
            scope.pop();
            DbValue::Lam(Box::new(b))
        }
    }
}

fn db_comp(m: &Computation, scope: &mut Vec<Name>) -> DbComp {
    match m {
        Computation::Unit(v) => DbComp::Unit(db_value(v, scope)),
        Computation::Bind(n, v) => DbComp::Bind(Box::new(db_comp(n, scope)), db_value(v, scope)),
        Computation::Get(l, x, body) => {
            scope.push(x.clone());
            let b = db_comp(body, scope);
            scope.pop();
            DbComp::Get(*l, Box::new(b))
        }
        Computation::Set(l, v, rest) => {
            DbComp::Set(*l, db_value(v, scope), Box::new(db_comp(rest, scope)))
        }
    }
}

/// Alpha-equivalence of values.
pub fn alpha_eq_value(a: &Value, b: &Value) -> bool {
    db_value(a, &mut Vec::new()) == db_value(b, &mut Vec::new())
}

/// Alpha-equivalence of computations.
pub fn alpha_eq(a: &Computation, b: &Computation) -> bool {
    db_comp(a, &mut Vec::new()) == db_comp(b, &mut Vec::new())
}

/// Renames all binders deterministically (`_b0`, `_b1`, ...), giving a
/// canonical representative of the alpha-equivalence class.
pub fn canonical_rename(m: &Computation) -> Computation {
    let mut counter = 0;
    rename_comp(m, &mut Vec::new(), &mut counter)
}

pub fn canonical_rename_value(v: &Value) -> Value {
    let mut counter = 0;
    rename_value(v, &mut Vec::new(), &mut counter)
}

fn rename_value(v: &Value, scope: &mut Vec<(Name, Name)>, counter: &mut usize) -> Value {
    match v {
        Value::Var(x) => {
            let renamed = scope
                .iter()
                .rev()
                .find(|(orig, _)| orig == x)
                .map(|(_, new)| new.clone())
                .unwrap_or_else(|| x.clone());
            Value::Var(renamed)
        }
        Value::Lam(x, body) => {
            let new = Name(format!("_b{counter}"));
            *counter += 1;
            scope.push((x.clone(), new.clone()));
            let b = rename_comp(body, scope, counter);
            scope.pop();
            Value::Lam(new, Arc::new(b))
        }
    }
}

fn rename_comp(m: &Computation, scope: &mut Vec<(Name, Name)>, counter: &mut usize) -> Computation {
    match m {
        Computation::Unit(v) => Computation::Unit(rename_value(v, scope, counter)),
        Computation::Bind(n, v) => Computation::Bind(
            Arc::new(rename_comp(n, scope, counter)),
            rename_value(v, scope, counter),
        ),
        Computation::Get(l, x, body) => {
            let new = Name(format!("_b{counter}"));
            *counter += 1;
            scope.push((x.clone(), new.clone()));
            let b = rename_comp(body, scope, counter);
            scope.pop();
            Computation::Get(*l, new, Arc::new(b))
        }
        Computation::Set(l, v, rest) => Computation::Set(
            *l,
            rename_value(v, scope, counter),
            Arc::new(rename_comp(rest, scope, counter)),
        ),
    }
}

// ---------------------------------------------------------------------------
// Surface sugar
// ---------------------------------------------------------------------------

/// The surface language accepted by the frontend. `Let`, `App` and `Seq` are
/// sugar over the core computations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Surface {
    Var(Name),
    Lam(Name, Box<Surface>),
    Unit(Box<Surface>),
    Bind(Box<Surface>, Box<Surface>),
    Get(Location, Name, Box<Surface>),
    Set(Location, Box<Surface>, Box<Surface>),
    /// `let x = M in N` desugars to `M >>= \x. N`.
    Let(Name, Box<Surface>, Box<Surface>),
    /// Application; `V W` desugars to `unit W >>= V`, general `M N` to
    /// `M >>= \z. (N >>= z)` with `z` fresh.
    App(Box<Surface>, Box<Surface>),
    /// `M ; N` desugars to `M >>= \_. N` with a dummy binder.
    Seq(Box<Surface>, Box<Surface>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DesugarError {
    /// A computation form appeared where a value was required.
    ExpectedValue(String),
    /// A value appeared bare where a computation was required.
    ExpectedComputation(String),
}

impl fmt::Display for DesugarError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DesugarError::ExpectedValue(s) => write!(f, "expected a value, found {s}"),
            DesugarError::ExpectedComputation(s) => write!(f, "expected a computation, found {s}"),
        }
    }
}

impl std::error::Error for DesugarError {}

fn surface_free_vars(s: &Surface, bound: &mut Vec<Name>, acc: &mut VarSet) {
    match s {
        Surface::Var(x) => {
            if !bound.contains(x) {
                acc.insert(x.clone());
            }
        }
        Surface::Lam(x, b) | Surface::Get(_, x, b) => {
            bound.push(x.clone());
            surface_free_vars(b, bound, acc);
            bound.pop();
        }
        Surface::Unit(a) => surface_free_vars(a, bound, acc),
        Surface::Bind(a, b) | Surface::App(a, b) | Surface::Seq(a, b) | Surface::Set(_, a, b) => {
            surface_free_vars(a, bound, acc);
            surface_free_vars(b, bound, acc);
        }
        Surface::Let(x, a, b) => {
            surface_free_vars(a, bound, acc);
            bound.push(x.clone());
            surface_free_vars(b, bound, acc);
            bound.pop();
        }
    }
}

impl Surface {
    pub fn free_vars(&self) -> VarSet {
        let mut acc = BTreeSet::new();
        surface_free_vars(self, &mut Vec::new(), &mut acc);
        acc
    }
}

/// Elaborates a surface term into a core computation, desugaring
/// `let`/application/sequencing.
pub fn desugar(s: &Surface) -> Result<Computation, DesugarError> {
    match s {
        Surface::Var(_) | Surface::Lam(_, _) => {
            Err(DesugarError::ExpectedComputation(format!("{s:?}")))
        }
        Surface::Unit(v) => Ok(Computation::Unit(desugar_value(v)?)),
        Surface::Bind(m, v) => Ok(Computation::bind(desugar(m)?, desugar_value(v)?)),
        Surface::Get(l, x, body) => Ok(Computation::Get(*l, x.clone(), Arc::new(desugar(body)?))),
        Surface::Set(l, v, rest) => Ok(Computation::Set(
            *l,
            desugar_value(v)?,
            Arc::new(desugar(rest)?),
        )),
        Surface::Let(x, m, n) => {
            let m = desugar(m)?;
            let n = desugar(n)?;
            Ok(Computation::bind(m, Value::Lam(x.clone(), Arc::new(n))))
        }
        Surface::App(f, a) => desugar_app(f, a),
        Surface::Seq(m, n) => {
            let m = desugar(m)?;
            let n = desugar(n)?;
            let dummy = fresh_name(&Name::from("_"), &n.free_vars());
            Ok(Computation::bind(m, Value::Lam(dummy, Arc::new(n))))
        }
    }
}

fn desugar_value(s: &Surface) -> Result<Value, DesugarError> {
    match s {
        Surface::Var(x) => Ok(Value::Var(x.clone())),
        Surface::Lam(x, body) => Ok(Value::Lam(x.clone(), Arc::new(desugar(body)?))),
        other => Err(DesugarError::ExpectedValue(format!("{other:?}"))),
    }
}

fn is_value_form(s: &Surface) -> bool {
    matches!(s, Surface::Var(_) | Surface::Lam(_, _))
}

fn desugar_app(f: &Surface, a: &Surface) -> Result<Computation, DesugarError> {
    match (is_value_form(f), is_value_form(a)) {
        (true, true) => {
            // V W == unit W >>= V
            let v = desugar_value(f)?;
            let w = desugar_value(a)?;
            Ok(Computation::bind(Computation::Unit(w), v))
        }
        (true, false) => {
            // V N == N >>= V
            let v = desugar_value(f)?;
            let n = desugar(a)?;
            Ok(Computation::bind(n, v))
        }
        (false, was_value) => {
            // M N == M >>= \z. (N >>= z), z fresh
            let m = desugar(f)?;
            let n = if was_value {
                Computation::Unit(desugar_value(a)?)
            } else {
                desugar(a)?
            };
            let mut avoid = n.free_vars();
            avoid.extend(m.free_vars());
            let z = fresh_name(&Name::from("z"), &avoid);
            let inner = Computation::bind(n, Value::Var(z.clone()));
            Ok(Computation::bind(m, Value::Lam(z, Arc::new(inner))))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn l(i: u32) -> Location {
        Location(i)
    }

    #[test]
    fn free_vars_of_unit_var() {
        let m = Computation::unit(Value::var("x"));
        assert_eq!(m.free_vars(), BTreeSet::from([Name::from("x")]));
    }

    #[test]
    fn free_vars_closed_by_lambda() {
        let v = Value::lam("x", Computation::unit(Value::var("x")));
        assert!(v.free_vars().is_empty());
    }

    #[test]
    fn free_vars_under_get_binder() {
        // get[l0](\x. unit y >>= x) has exactly y free
        let m = Computation::get(
            l(0),
            "x",
            Computation::bind(Computation::unit(Value::var("y")), Value::var("x")),
        );
        assert_eq!(m.free_vars(), BTreeSet::from([Name::from("y")]));
    }

    #[test]
    fn substitute_free_occurrence() {
        let m = Computation::unit(Value::var("x"));
        let w = Value::identity();
        assert_eq!(
            substitute(&m, &Name::from("x"), &w),
            Computation::unit(w.clone())
        );
    }

    #[test]
    fn substitute_bound_occurrence_untouched() {
        let v = Value::lam("x", Computation::unit(Value::var("x")));
        let got = substitute_value(&v, &Name::from("x"), &Value::var("z"));
        assert_eq!(got, v);
    }

    #[test]
    fn substitute_avoids_capture() {
        // (\y. unit x)[y/x] must rename the binder, not capture
        let v = Value::lam("y", Computation::unit(Value::var("x")));
        let got = substitute_value(&v, &Name::from("x"), &Value::var("y"));
        let expected = Value::lam("y'", Computation::unit(Value::var("y")));
        assert!(alpha_eq_value(&got, &expected), "got {got:?}");
    }

    #[test]
    fn alpha_eq_renamed_lambdas() {
        let a = Value::lam("x", Computation::unit(Value::var("x")));
        let b = Value::lam("y", Computation::unit(Value::var("y")));
        assert!(alpha_eq_value(&a, &b));
    }

    #[test]
    fn alpha_eq_distinguishes_free_vars() {
        let a = Value::lam("x", Computation::unit(Value::var("x")));
        let b = Value::lam("x", Computation::unit(Value::var("z")));
        assert!(!alpha_eq_value(&a, &b));
    }

    #[test]
    fn alpha_eq_distinguishes_locations() {
        let a = Computation::get(l(0), "x", Computation::unit(Value::var("x")));
        let b = Computation::get(l(1), "x", Computation::unit(Value::var("x")));
        assert!(!alpha_eq(&a, &b));
    }

    #[test]
    fn omega_is_closed() {
        assert!(Computation::omega().is_closed());
    }

    #[test]
    fn desugar_let() {
        // let x = M in N  ==  M >>= \x. N
        let m = Surface::Unit(Box::new(Surface::Lam(
            Name::from("w"),
            Box::new(Surface::Unit(Box::new(Surface::Var(Name::from("w"))))),
        )));
        let s = Surface::Let(
            Name::from("x"),
            Box::new(m.clone()),
            Box::new(Surface::Unit(Box::new(Surface::Var(Name::from("x"))))),
        );
        let got = desugar(&s).unwrap();
        let expected = Computation::bind(
            desugar(&m).unwrap(),
            Value::lam("x", Computation::unit(Value::var("x"))),
        );
        assert_eq!(got, expected);
    }

    #[test]
    fn desugar_value_application() {
        // V W == unit W >>= V
        let s = Surface::App(
            Box::new(Surface::Var(Name::from("f"))),
            Box::new(Surface::Var(Name::from("a"))),
        );
        let got = desugar(&s).unwrap();
        assert_eq!(
            got,
            Computation::bind(Computation::unit(Value::var("a")), Value::var("f"))
        );
    }

    #[test]
    fn desugar_seq_uses_dummy() {
        let m = Surface::Unit(Box::new(Surface::Var(Name::from("v"))));
        let n = Surface::Unit(Box::new(Surface::Var(Name::from("w"))));
        let got = desugar(&Surface::Seq(Box::new(m), Box::new(n))).unwrap();
        match got {
            Computation::Bind(_, Value::Lam(d, body)) => {
                assert_eq!(d, Name::from("_"));
                assert_eq!(*body, Computation::unit(Value::var("w")));
            }
            other => panic!("unexpected desugaring: {other:?}"),
        }
    }

    #[test]
    fn substitution_free_var_equation() {
        // FV(M[V/x]) = (FV(M) \ {x}) + FV(V) when x occurs free
        let m = Computation::bind(
            Computation::unit(Value::var("x")),
            Value::lam("y", Computation::unit(Value::var("x"))),
        );
        let v = Value::lam("z", Computation::unit(Value::var("w")));
        let got = substitute(&m, &Name::from("x"), &v);
        assert_eq!(got.free_vars(), BTreeSet::from([Name::from("w")]));
    }
}
