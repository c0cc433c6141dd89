//! Executable inversion of checking derivations.
//!
//! The assignment rules can be read backwards: a derivable non-omega
//! judgment for a given subject form decomposes into a family of rule-node
//! premises whose recombination (by intersection and subsumption) recovers
//! the judgment. These functions extract exactly those families from an
//! explicit derivation by walking through omega, intersection and
//! subsumption nodes; the structural rule nodes encountered are the family
//! members.
//!
//! All functions expect derivations that pass the checker; they panic on
//! shapes the checker would have rejected.

use std::collections::BTreeMap;

use crate::store::{resolve_lookup, LookupTerm, StoreTerm};
use crate::syntax::Location;
use crate::types::{AnyType, StoreType};
use crate::typing::{Derivation, Rule, Subject};

/// Premise pairs of the `conf` nodes reachable through w/and/sub:
/// `(G |- M : s -> k, G |- s0 : s)`. The intersection of the `k`s is below
/// the derivation's claimed result type.
pub fn invert_conf(d: &Derivation) -> Vec<(Derivation, Derivation)> {
    let mut out = Vec::new();
    walk(d, &mut |node| {
        if node.rule == Rule::Conf {
            out.push((node.premises[0].clone(), node.premises[1].clone()));
        }
    });
    out
}

/// `unit` families: the value premises of the `unit` nodes, with the store
/// type each node instantiates.
pub fn invert_unit(d: &Derivation) -> Vec<(Derivation, StoreType)> {
    let mut out = Vec::new();
    walk(d, &mut |node| {
        if node.rule == Rule::Unit {
            let AnyType::T(t) = &node.conclusion.ty else {
                unreachable!("unit node carries a computation type");
            };
            let (sigma, _) = t.as_single_arrow().expect("unit node is a single arrow");
            out.push((node.premises[0].clone(), sigma.clone()));
        }
    });
    out
}

/// `bind` families: `(computation premise, function premise)` pairs.
pub fn invert_bind(d: &Derivation) -> Vec<(Derivation, Derivation)> {
    let mut out = Vec::new();
    walk(d, &mut |node| {
        if node.rule == Rule::Bind {
            out.push((node.premises[0].clone(), node.premises[1].clone()));
        }
    });
    out
}

/// `get` families: the body premises `G, x:d |- M : s -> k`.
pub fn invert_get(d: &Derivation) -> Vec<Derivation> {
    let mut out = Vec::new();
    walk(d, &mut |node| {
        if node.rule == Rule::Get {
            out.push(node.premises[0].clone());
        }
    });
    out
}

/// `set` families: `(value premise, continuation premise)` pairs.
pub fn invert_set(d: &Derivation) -> Vec<(Derivation, Derivation)> {
    let mut out = Vec::new();
    walk(d, &mut |node| {
        if node.rule == Rule::Set {
            out.push((node.premises[0].clone(), node.premises[1].clone()));
        }
    });
    out
}

/// `lam` families: the body premises `G, x:d |- M : t`.
pub fn invert_lam(d: &Derivation) -> Vec<Derivation> {
    let mut out = Vec::new();
    walk(d, &mut |node| {
        if node.rule == Rule::Lam {
            out.push(node.premises[0].clone());
        }
    });
    out
}

fn walk(d: &Derivation, visit: &mut impl FnMut(&Derivation)) {
    match d.rule {
        Rule::Omega => {}
        Rule::Inter => {
            for p in &d.premises {
                walk(p, visit);
            }
        }
        Rule::Sub => walk(&d.premises[0], visit),
        _ => visit(d),
    }
}

/// Inverts a store judgment `G |- s : sigma` into per-location value
/// derivations: for every entry `l : d` of the canonical `sigma`, a checking
/// derivation of `G |- V : d` where `V` is the value `l` resolves to in `s`.
pub fn invert_store(d: &Derivation) -> BTreeMap<Location, Derivation> {
    let Subject::Store(s) = &d.conclusion.subject else {
        panic!("invert_store wants a store judgment");
    };
    let AnyType::S(sigma) = &d.conclusion.ty else {
        panic!("store judgment carries a store type");
    };
    let Some(entries) = sigma.entries() else {
        return BTreeMap::new();
    };
    let mut out = BTreeMap::new();
    for l in entries.keys() {
        out.insert(*l, entry_value(d, *l, s));
    }
    out
}

/// The value derivation behind entry `l` of a store judgment.
fn entry_value(d: &Derivation, l: Location, s: &StoreTerm) -> Derivation {
    match d.rule {
        Rule::Omega => unreachable!("omega store typing has no entries"),
        Rule::Sub => {
            let AnyType::S(sigma) = &d.conclusion.ty else {
                unreachable!();
            };
            let want = sigma
                .entries()
                .and_then(|m| m.get(&l))
                .cloned()
                .expect("entry in claimed type");
            let inner = entry_value(&d.premises[0], l, s);
            inner.sub(AnyType::D(want))
        }
        Rule::Inter => {
            let mut parts = Vec::new();
            for p in &d.premises {
                let AnyType::S(sp) = &p.conclusion.ty else {
                    unreachable!();
                };
                if sp.entries().is_some_and(|m| m.contains_key(&l)) {
                    parts.push(entry_value(p, l, s));
                }
            }
            Derivation::inter(parts)
        }
        Rule::UpdA => {
            let Subject::Store(StoreTerm::Upd(l1, u, _)) = &d.conclusion.subject else {
                unreachable!();
            };
            debug_assert_eq!(*l1, l, "upd-a concludes the head entry");
            match u {
                LookupTerm::Val(_) => d.premises[0].clone(),
                // The argument is itself a lookup, typed by (lkp); chase it.
                LookupTerm::Lkp(_, _) => invert_lookup(&d.premises[0]),
            }
        }
        Rule::UpdB => entry_value(
            &d.premises[0],
            l,
            match &d.conclusion.subject {
                Subject::Store(StoreTerm::Upd(_, _, rest)) => rest,
                _ => unreachable!(),
            },
        ),
        other => panic!("store judgments are not concluded by ({})", other.name()),
    }
}

/// Inverts a lookup judgment `G |- lkp(l, s) : d` into a value derivation of
/// the resolved value.
pub fn invert_lookup(d: &Derivation) -> Derivation {
    let Subject::Lookup(LookupTerm::Lkp(l, s)) = &d.conclusion.subject else {
        panic!("invert_lookup wants a lookup judgment");
    };
    match d.rule {
        Rule::Omega => {
            let v = resolve_lookup(*l, s).expect("well-formed lookup resolves");
            Derivation::omega(d.conclusion.ctx.clone(), Subject::Val(v))
        }
        Rule::Sub => invert_lookup(&d.premises[0]).sub(d.conclusion.ty.clone()),
        Rule::Inter => Derivation::inter(d.premises.iter().map(invert_lookup).collect()),
        Rule::Lkp => invert_store(&d.premises[0])
            .remove(l)
            .expect("lkp premise constrains the read location"),
        other => panic!("lookup judgments are not concluded by ({})", other.name()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::Value;
    use crate::types::ValueType;
    use crate::typing::{check_derivation, stores::type_store, Context};

    fn l(i: u32) -> Location {
        Location(i)
    }

    #[test]
    fn store_inversion_returns_checking_value_derivations() {
        let s = StoreTerm::upd_val(
            l(0),
            Value::identity(),
            StoreTerm::upd_val(l(1), Value::identity(), StoreTerm::Emp),
        );
        let (sigma, d) = type_store(&Context::empty(), &s);
        check_derivation(&d).unwrap();
        assert_eq!(sigma.entries().map(|m| m.len()), Some(2));
        let entries = invert_store(&d);
        assert_eq!(entries.len(), 2);
        for (loc, ed) in entries {
            check_derivation(&ed).unwrap();
            assert_eq!(ed.conclusion.ty, AnyType::D(ValueType::top()));
            let v = resolve_lookup(loc, &s).unwrap();
            assert_eq!(ed.conclusion.subject, Subject::Val(v));
        }
    }
}
