//! Typing store terms.
//!
//! Any store whose domain is `{l1, ..., ln}` can be typed at
//! `<l1:d1> /\ ... /\ <ln:dn>` by one `upd-a` node per entry (reached under
//! `upd-b` nodes skipping other locations, and through `lkp` nodes when the
//! written argument is itself a lookup), combined by intersection. The
//! empty store types only at `wS`.

use std::collections::BTreeMap;
use std::fmt;

use crate::store::{LookupTerm, StoreTerm};
use crate::syntax::Location;
use crate::types::{subtype_value, AnyType, StoreType, ValueType};
use crate::typing::subst::align;
use crate::typing::{Context, Derivation, Subject};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StoreTypingError {
    /// The target type constrains a location outside the store's domain.
    UndefinedLocation(Location),
    /// No value derivation available for an entry, or it has the wrong type.
    MissingValue(Location),
}

impl fmt::Display for StoreTypingError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StoreTypingError::UndefinedLocation(l) => {
                write!(f, "target type constrains {l} outside the store domain")
            }
            StoreTypingError::MissingValue(l) => {
                write!(f, "no usable value derivation for the entry at {l}")
            }
        }
    }
}

impl std::error::Error for StoreTypingError {}

/// Types `s` at the trivial record over its whole domain: every entry at
/// `wD`. The empty store gets `wS`.
pub fn type_store(ctx: &Context, s: &StoreTerm) -> (StoreType, Derivation) {
    let dom = crate::store::dom_store(s);
    let sigma = StoreType::from_entries(dom.iter().map(|l| (*l, ValueType::top())).collect());
    let d = type_store_at(ctx, s, &sigma, &mut |_, v| {
        Some(Derivation::omega(ctx.clone(), Subject::Val(v.clone())))
    })
    .expect("trivial store typing always exists");
    (sigma, d)
}

/// Types `s` at a given target store type. `supply` provides a derivation
/// for the value resolved at each constrained location; its result is
/// subsumed to the entry type when it is a subtype, and aligned when its
/// subject is only alpha-equal to the resolved value.
pub fn type_store_at(
    ctx: &Context,
    s: &StoreTerm,
    sigma: &StoreType,
    supply: &mut dyn FnMut(Location, &crate::syntax::Value) -> Option<Derivation>,
) -> Result<Derivation, StoreTypingError> {
    let Some(entries) = sigma.entries() else {
        return Ok(Derivation::omega(ctx.clone(), Subject::Store(s.clone())));
    };
    let mut parts = Vec::new();
    for (l, delta) in entries {
        parts.push(entry_derivation(ctx, s, *l, *l, delta, supply)?);
    }
    Ok(Derivation::inter(parts))
}

/// Builds `G |- s : <l : d>` by walking to the leftmost outermost binding.
/// `entry_loc` names the original target entry, which nested lookups keep
/// while the local location changes.
fn entry_derivation(
    ctx: &Context,
    s: &StoreTerm,
    l: Location,
    entry_loc: Location,
    delta: &ValueType,
    supply: &mut dyn FnMut(Location, &crate::syntax::Value) -> Option<Derivation>,
) -> Result<Derivation, StoreTypingError> {
    match s {
        StoreTerm::Emp => Err(StoreTypingError::UndefinedLocation(l)),
        StoreTerm::Upd(l1, u, rest) => {
            if *l1 == l {
                let arg = argument_derivation(ctx, entry_loc, u, delta, supply)?;
                Ok(Derivation::upd_a(l, arg, (**rest).clone()))
            } else {
                let inner = entry_derivation(ctx, rest, l, entry_loc, delta, supply)?;
                Ok(Derivation::upd_b(*l1, u.clone(), inner))
            }
        }
    }
}

/// A derivation of `G |- u : d` for the written argument, following nested
/// lookups through `lkp` nodes.
fn argument_derivation(
    ctx: &Context,
    entry_loc: Location,
    u: &LookupTerm,
    delta: &ValueType,
    supply: &mut dyn FnMut(Location, &crate::syntax::Value) -> Option<Derivation>,
) -> Result<Derivation, StoreTypingError> {
    match u {
        LookupTerm::Val(v) => {
            let d = supply(entry_loc, v).ok_or(StoreTypingError::MissingValue(entry_loc))?;
            let d = if d.conclusion.subject == Subject::Val(v.clone()) {
                d
            } else {
                align(&d, &Subject::Val(v.clone()))
                    .ok_or(StoreTypingError::MissingValue(entry_loc))?
            };
            let AnyType::D(have) = &d.conclusion.ty else {
                return Err(StoreTypingError::MissingValue(entry_loc));
            };
            if !subtype_value(have, delta) {
                return Err(StoreTypingError::MissingValue(entry_loc));
            }
            Ok(d.sub(AnyType::D(delta.clone())))
        }
        LookupTerm::Lkp(l2, s2) => {
            let inner = entry_derivation(ctx, s2, *l2, entry_loc, delta, supply)?;
            Ok(Derivation::lkp(*l2, inner))
        }
    }
}

/// Re-types `t` at `sigma` reusing the per-entry value derivations inverted
/// from an existing store typing; succeeds whenever the resolved values
/// agree up to alpha at every constrained location. This is the derivable
/// equality-stability of store typings: derivably equal stores share their
/// types.
pub fn retype_equal_store(
    ctx: &Context,
    t: &StoreTerm,
    sigma: &StoreType,
    entries: &BTreeMap<Location, Derivation>,
) -> Result<Derivation, StoreTypingError> {
    type_store_at(ctx, t, sigma, &mut |l, _v| entries.get(&l).cloned())
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::syntax::Value;
    use crate::types::CompType;
    use crate::typing::{check_derivation, invert::invert_store};

    fn l(i: u32) -> Location {
        Location(i)
    }

    #[test]
    fn empty_store_types_only_trivially() {
        let (sigma, d) = type_store(&Context::empty(), &StoreTerm::Emp);
        assert_eq!(sigma, StoreType::Top);
        check_derivation(&d).unwrap();
    }

    #[test]
    fn store_types_at_target_with_value_derivations() {
        // upd(l0, V0, upd(l1, V1, emp)) at <l0:d0> /\ <l1:wD>.
        let v0 = Value::identity();
        let v1 = Value::lam(
            "y",
            Computation::bind(Computation::unit(Value::var("y")), Value::var("y")),
        );
        let s = StoreTerm::upd_val(
            l(0),
            v0.clone(),
            StoreTerm::upd_val(l(1), v1, StoreTerm::Emp),
        );
        let d0 = ValueType::arrow(ValueType::top(), CompType::convergent());
        let sigma =
            StoreType::entry(l(0), d0.clone()).meet(&StoreType::entry(l(1), ValueType::top()));
        // Type V0 = \x. unit x at d0 directly.
        let x = crate::syntax::Name::from("x");
        let inner = Context::empty()
            .extended(x.clone(), ValueType::top())
            .unwrap();
        let dv0 = Derivation::lam(
            x.clone(),
            Derivation::unit(Derivation::var(inner, x), StoreType::Top),
        );
        let d = type_store_at(&Context::empty(), &s, &sigma, &mut |loc, v| {
            if loc == l(0) {
                Some(dv0.clone())
            } else {
                Some(Derivation::omega(Context::empty(), Subject::Val(v.clone())))
            }
        })
        .unwrap();
        check_derivation(&d).unwrap();
        assert_eq!(d.conclusion.ty, AnyType::S(sigma));
    }

    #[test]
    fn overridden_binding_is_ignored() {
        // upd(l0, V, upd(l0, W, emp)) types at <l0 : d> from V alone.
        let v = Value::identity();
        let w = Value::lam(
            "y",
            Computation::bind(Computation::unit(Value::var("y")), Value::var("y")),
        );
        let s = StoreTerm::upd_val(l(0), v.clone(), StoreTerm::upd_val(l(0), w, StoreTerm::Emp));
        let sigma = StoreType::entry(l(0), ValueType::top());
        let d = type_store_at(&Context::empty(), &s, &sigma, &mut |_, seen| {
            assert_eq!(seen, &v, "only the outer binding is consulted");
            Some(Derivation::omega(
                Context::empty(),
                Subject::Val(seen.clone()),
            ))
        })
        .unwrap();
        check_derivation(&d).unwrap();
    }

    #[test]
    fn nested_lookup_typed_through_lkp_rule() {
        // upd(l0, lkp(l1, upd(l1, V, emp)), emp) at <l0 : wD>.
        let v = Value::identity();
        let inner = StoreTerm::upd_val(l(1), v, StoreTerm::Emp);
        let u = LookupTerm::lkp(l(1), inner).unwrap();
        let s = StoreTerm::Upd(l(0), u, Arc::new(StoreTerm::Emp));
        let sigma = StoreType::entry(l(0), ValueType::top());
        let d = type_store_at(&Context::empty(), &s, &sigma, &mut |_, vv| {
            Some(Derivation::omega(
                Context::empty(),
                Subject::Val(vv.clone()),
            ))
        })
        .unwrap();
        check_derivation(&d).unwrap();
        // Inversion recovers the resolved value's derivation.
        let entries = invert_store(&d);
        assert_eq!(
            entries[&l(0)].conclusion.subject,
            Subject::Val(Value::identity())
        );
    }

    use crate::syntax::Computation;
}
