//! Term, store, and type generation: seeded random generators for the
//! property suites and exhaustive enumerations for the decidability
//! envelopes.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use std::sync::Arc;

use crate::store::{dom_store, LookupTerm, StoreTerm};
use crate::syntax::{Computation, Location, Name, Value};
use crate::types::{normalize_type, AnyType, RawType, Sort};

const NAME_POOL: [&str; 6] = ["x", "y", "z", "u", "v", "w"];

fn pick_name(rng: &mut ChaCha8Rng, depth: usize) -> Name {
    let base = NAME_POOL[rng.random_range(0..NAME_POOL.len())];
    if depth > NAME_POOL.len() {
        Name(format!("{base}{depth}"))
    } else {
        Name::from(base)
    }
}

fn pick_loc(rng: &mut ChaCha8Rng, locs: &[Location]) -> Location {
    locs[rng.random_range(0..locs.len())]
}

/// A random value: a variable from scope when possible, else an abstraction.
pub fn rand_value(
    rng: &mut ChaCha8Rng,
    budget: usize,
    scope: &mut Vec<Name>,
    locs: &[Location],
) -> Value {
    if !scope.is_empty() && (budget <= 2 || rng.random_bool(0.45)) {
        let i = rng.random_range(0..scope.len());
        return Value::Var(scope[i].clone());
    }
    let x = pick_name(rng, scope.len());
    scope.push(x.clone());
    let body = rand_comp(rng, budget.saturating_sub(2), scope, locs);
    scope.pop();
    Value::Lam(x, Arc::new(body))
}

/// A random computation of roughly the given size.
pub fn rand_comp(
    rng: &mut ChaCha8Rng,
    budget: usize,
    scope: &mut Vec<Name>,
    locs: &[Location],
) -> Computation {
    if budget <= 2 {
        return Computation::Unit(rand_value(rng, budget, scope, locs));
    }
    match rng.random_range(0..100) {
        0..=24 => Computation::Unit(rand_value(rng, budget - 1, scope, locs)),
        25..=54 => {
            let split = rng.random_range(1..budget.max(2));
            let m = rand_comp(rng, split, scope, locs);
            let v = rand_value(rng, budget - split, scope, locs);
            Computation::bind(m, v)
        }
        55..=74 => {
            let l = pick_loc(rng, locs);
            let x = pick_name(rng, scope.len());
            scope.push(x.clone());
            let body = rand_comp(rng, budget - 2, scope, locs);
            scope.pop();
            Computation::Get(l, x, Arc::new(body))
        }
        _ => {
            let l = pick_loc(rng, locs);
            let split = rng.random_range(1..budget.max(2));
            let v = rand_value(rng, split, scope, locs);
            let rest = rand_comp(rng, budget - split, scope, locs);
            Computation::Set(l, v, Arc::new(rest))
        }
    }
}

/// A random closed computation.
pub fn rand_closed_comp(rng: &mut ChaCha8Rng, budget: usize, locs: &[Location]) -> Computation {
    rand_comp(rng, budget, &mut Vec::new(), locs)
}

/// A random closed computation biased toward convergence: reads only hit
/// locations written earlier in execution order, and function positions are
/// mostly abstractions. Divergence through self-application is still
/// possible, so callers filter by running the term.
pub fn rand_convergent_candidate(
    rng: &mut ChaCha8Rng,
    budget: usize,
    locs: &[Location],
) -> Computation {
    let mut initialized = Vec::new();
    convergent_comp(rng, budget, &mut Vec::new(), &mut initialized, locs)
}

fn convergent_comp(
    rng: &mut ChaCha8Rng,
    budget: usize,
    scope: &mut Vec<Name>,
    initialized: &mut Vec<Location>,
    locs: &[Location],
) -> Computation {
    if budget <= 2 {
        return Computation::Unit(convergent_value(rng, budget, scope, initialized, locs));
    }
    let can_get = !initialized.is_empty();
    match rng.random_range(0..100) {
        0..=14 => Computation::Unit(convergent_value(rng, budget - 1, scope, initialized, locs)),
        15..=44 => {
            let split = rng.random_range(1..budget.max(2));
            let m = convergent_comp(rng, split, scope, initialized, locs);
            // The function runs after m, so initialized already reflects it.
            let v = if rng.random_bool(0.8) || scope.is_empty() {
                let x = pick_name(rng, scope.len());
                scope.push(x.clone());
                let body = convergent_comp(rng, budget - split, scope, initialized, locs);
                scope.pop();
                Value::Lam(x, Arc::new(body))
            } else {
                let i = rng.random_range(0..scope.len());
                Value::Var(scope[i].clone())
            };
            Computation::bind(m, v)
        }
        45..=64 if can_get => {
            let l = initialized[rng.random_range(0..initialized.len())];
            let x = pick_name(rng, scope.len());
            scope.push(x.clone());
            let body = convergent_comp(rng, budget - 2, scope, initialized, locs);
            scope.pop();
            Computation::Get(l, x, Arc::new(body))
        }
        _ => {
            let l = pick_loc(rng, locs);
            let split = rng.random_range(1..budget.max(2));
            let v = convergent_value(rng, split, scope, initialized, locs);
            if !initialized.contains(&l) {
                initialized.push(l);
            }
            let rest = convergent_comp(rng, budget - split, scope, initialized, locs);
            Computation::Set(l, v, Arc::new(rest))
        }
    }
}

fn convergent_value(
    rng: &mut ChaCha8Rng,
    budget: usize,
    scope: &mut Vec<Name>,
    initialized: &mut Vec<Location>,
    locs: &[Location],
) -> Value {
    if !scope.is_empty() && (budget <= 2 || rng.random_bool(0.4)) {
        let i = rng.random_range(0..scope.len());
        return Value::Var(scope[i].clone());
    }
    let x = pick_name(rng, scope.len());
    scope.push(x.clone());
    let body = convergent_comp(rng, budget.saturating_sub(2), scope, initialized, locs);
    scope.pop();
    Value::Lam(x, Arc::new(body))
}

/// A random closed store, occasionally nesting a lookup argument.
pub fn rand_closed_store(rng: &mut ChaCha8Rng, bindings: usize, locs: &[Location]) -> StoreTerm {
    let mut s = StoreTerm::Emp;
    for _ in 0..bindings {
        let l = pick_loc(rng, locs);
        let u = if rng.random_bool(0.15) && !dom_store(&s).is_empty() {
            let dom: Vec<Location> = dom_store(&s).into_iter().collect();
            let l2 = dom[rng.random_range(0..dom.len())];
            LookupTerm::Lkp(l2, Arc::new(s.clone()))
        } else {
            let size = rng.random_range(2..6);
            LookupTerm::Val(rand_value(rng, size, &mut Vec::new(), locs))
        };
        s = StoreTerm::Upd(l, u, Arc::new(s));
    }
    s
}

// ---------------------------------------------------------------------------
// Exhaustive store enumeration
// ---------------------------------------------------------------------------

/// All well-formed store terms of size at most `max_size` over the given
/// locations and atomic values; `emp` and each fixed value count 1, each
/// `upd` or `lkp` constructor adds 1.
pub fn enumerate_stores(max_size: usize, locs: &[Location], values: &[Value]) -> Vec<StoreTerm> {
    let mut stores_by_size: Vec<Vec<StoreTerm>> = vec![Vec::new(); max_size + 1];
    let mut lookups_by_size: Vec<Vec<LookupTerm>> = vec![Vec::new(); max_size + 1];
    if max_size >= 1 {
        stores_by_size[1].push(StoreTerm::Emp);
        for v in values {
            lookups_by_size[1].push(LookupTerm::Val(v.clone()));
        }
    }
    for size in 2..=max_size {
        let mut new_lookups = Vec::new();
        for s in &stores_by_size[size - 1] {
            for l in dom_store(s) {
                new_lookups.push(LookupTerm::Lkp(l, Arc::new(s.clone())));
            }
        }
        let mut new_stores = Vec::new();
        for arg_size in 1..size.saturating_sub(1) {
            let rest_size = size - 1 - arg_size;
            for u in &lookups_by_size[arg_size] {
                for s in &stores_by_size[rest_size] {
                    for l in locs {
                        new_stores.push(StoreTerm::Upd(*l, u.clone(), Arc::new(s.clone())));
                    }
                }
            }
        }
        lookups_by_size[size] = new_lookups;
        stores_by_size[size] = new_stores;
    }
    stores_by_size.into_iter().flatten().collect()
}

/// All closed values of term size at most `max_size`, capped in count; the
/// flag reports whether the whole slice was enumerated.
pub fn enumerate_closed_values(
    max_size: usize,
    locs: &[Location],
    cap: usize,
) -> (Vec<Value>, bool) {
    let mut out = Vec::new();
    let mut complete = true;
    let scope = vec![Name::from("x")];
    let mut bodies = Vec::new();
    for size in 1..=max_size.saturating_sub(1) {
        enumerate_comps(size, &scope, locs, cap, &mut bodies, &mut complete);
    }
    bodies.sort();
    bodies.dedup();
    for b in bodies {
        if out.len() >= cap {
            complete = false;
            break;
        }
        out.push(Value::lam("x", b));
    }
    (out, complete)
}

fn enumerate_values(
    size: usize,
    scope: &[Name],
    locs: &[Location],
    cap: usize,
    out: &mut Vec<Value>,
    complete: &mut bool,
) {
    if size == 0 {
        return;
    }
    for x in scope {
        if out.len() >= cap {
            *complete = false;
            return;
        }
        out.push(Value::Var(x.clone()));
    }
    if size >= 2 {
        let x = Name(format!("x{}", scope.len()));
        let mut inner_scope = scope.to_vec();
        inner_scope.push(x.clone());
        let mut bodies = Vec::new();
        enumerate_comps(size - 1, &inner_scope, locs, cap, &mut bodies, complete);
        for b in bodies {
            if out.len() >= cap {
                *complete = false;
                return;
            }
            out.push(Value::Lam(x.clone(), Arc::new(b)));
        }
    }
}

/// Computations of size exactly `size` (sizes count constructors and
/// variable occurrences).
fn enumerate_comps(
    size: usize,
    scope: &[Name],
    locs: &[Location],
    cap: usize,
    out: &mut Vec<Computation>,
    complete: &mut bool,
) {
    if size == 0 {
        return;
    }
    if size >= 2 {
        let mut values = Vec::new();
        enumerate_values(size - 1, scope, locs, cap, &mut values, complete);
        for v in &values {
            if out.len() >= cap {
                *complete = false;
                return;
            }
            out.push(Computation::Unit(v.clone()));
        }
    }
    if size >= 3 {
        for msize in 1..size - 1 {
            let mut ms = Vec::new();
            enumerate_comps(msize, scope, locs, cap, &mut ms, complete);
            let mut vs = Vec::new();
            enumerate_values(size - 1 - msize, scope, locs, cap, &mut vs, complete);
            for m in &ms {
                for v in &vs {
                    if out.len() >= cap {
                        *complete = false;
                        return;
                    }
                    out.push(Computation::bind(m.clone(), v.clone()));
                }
            }
        }
        for l in locs {
            let x = Name(format!("x{}", scope.len()));
            let mut inner_scope = scope.to_vec();
            inner_scope.push(x.clone());
            let mut bodies = Vec::new();
            enumerate_comps(size - 2, &inner_scope, locs, cap, &mut bodies, complete);
            for b in bodies {
                if out.len() >= cap {
                    *complete = false;
                    return;
                }
                out.push(Computation::Get(*l, x.clone(), Arc::new(b)));
            }
            for vsize in 1..size - 1 {
                let mut vs = Vec::new();
                enumerate_values(vsize, scope, locs, cap, &mut vs, complete);
                let mut rests = Vec::new();
                enumerate_comps(size - 1 - vsize, scope, locs, cap, &mut rests, complete);
                for v in &vs {
                    for r in &rests {
                        if out.len() >= cap {
                            *complete = false;
                            return;
                        }
                        out.push(Computation::Set(*l, v.clone(), Arc::new(r.clone())));
                    }
                }
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Type enumeration and random types
// ---------------------------------------------------------------------------

/// All raw type expressions of AST height at most `height`, per sort
/// (value, store, result, computation).
pub fn enumerate_raw_types(height: usize, locs: &[Location]) -> [Vec<RawType>; 4] {
    let mut d: Vec<RawType> = Vec::new();
    let mut s: Vec<RawType> = Vec::new();
    let mut c: Vec<RawType> = Vec::new();
    let mut t: Vec<RawType> = Vec::new();
    if height >= 1 {
        d.push(RawType::WD);
        s.push(RawType::WS);
        c.push(RawType::WC);
        t.push(RawType::WT);
    }
    for _ in 2..=height {
        let (pd, ps, pc, pt) = (d.clone(), s.clone(), c.clone(), t.clone());
        for a in &pd {
            for b in &pt {
                d.push(RawType::arrow(a.clone(), b.clone()));
            }
            for b in &pd {
                d.push(RawType::and(a.clone(), b.clone()));
            }
            for b in &ps {
                c.push(RawType::prod(a.clone(), b.clone()));
            }
            for l in locs {
                s.push(RawType::entry(*l, a.clone()));
            }
        }
        for a in &ps {
            for b in &ps {
                s.push(RawType::and(a.clone(), b.clone()));
            }
            for b in &pc {
                t.push(RawType::arrow(a.clone(), b.clone()));
            }
        }
        for a in &pc {
            for b in &pc {
                c.push(RawType::and(a.clone(), b.clone()));
            }
        }
        for a in &pt {
            for b in &pt {
                t.push(RawType::and(a.clone(), b.clone()));
            }
        }
        for v in [&mut d, &mut s, &mut c, &mut t] {
            v.sort();
            v.dedup();
        }
    }
    [d, s, c, t]
}

/// The canonical types of the raw enumeration, deduplicated.
pub fn enumerate_canonical_types(height: usize, locs: &[Location]) -> [Vec<AnyType>; 4] {
    let raw = enumerate_raw_types(height, locs);
    raw.map(|v| {
        let mut out: Vec<AnyType> = v
            .iter()
            .map(|r| normalize_type(r).expect("enumerated types are well-sorted"))
            .collect();
        out.sort();
        out.dedup();
        out
    })
}

/// A random canonical type of the given sort and depth.
pub fn rand_type(rng: &mut ChaCha8Rng, sort: Sort, depth: usize, locs: &[Location]) -> AnyType {
    normalize_type(&rand_raw(rng, sort, depth, locs)).expect("generated types are well-sorted")
}

fn rand_raw(rng: &mut ChaCha8Rng, sort: Sort, depth: usize, locs: &[Location]) -> RawType {
    if depth <= 1 {
        return match sort {
            Sort::Value => RawType::WD,
            Sort::Store => RawType::WS,
            Sort::Result => RawType::WC,
            Sort::Comp => RawType::WT,
        };
    }
    let roll = rng.random_range(0..100);
    match sort {
        Sort::Value => match roll {
            0..=19 => RawType::WD,
            20..=69 => RawType::arrow(
                rand_raw(rng, Sort::Value, depth - 1, locs),
                rand_raw(rng, Sort::Comp, depth - 1, locs),
            ),
            _ => RawType::and(
                rand_raw(rng, Sort::Value, depth - 1, locs),
                rand_raw(rng, Sort::Value, depth - 1, locs),
            ),
        },
        Sort::Store => match roll {
            0..=19 => RawType::WS,
            20..=69 => RawType::entry(
                pick_loc(rng, locs),
                rand_raw(rng, Sort::Value, depth - 1, locs),
            ),
            _ => RawType::and(
                rand_raw(rng, Sort::Store, depth - 1, locs),
                rand_raw(rng, Sort::Store, depth - 1, locs),
            ),
        },
        Sort::Result => match roll {
            0..=14 => RawType::WC,
            15..=74 => RawType::prod(
                rand_raw(rng, Sort::Value, depth - 1, locs),
                rand_raw(rng, Sort::Store, depth - 1, locs),
            ),
            _ => RawType::and(
                rand_raw(rng, Sort::Result, depth - 1, locs),
                rand_raw(rng, Sort::Result, depth - 1, locs),
            ),
        },
        Sort::Comp => match roll {
            0..=14 => RawType::WT,
            15..=74 => RawType::arrow(
                rand_raw(rng, Sort::Store, depth - 1, locs),
                rand_raw(rng, Sort::Result, depth - 1, locs),
            ),
            _ => RawType::and(
                rand_raw(rng, Sort::Comp, depth - 1, locs),
                rand_raw(rng, Sort::Comp, depth - 1, locs),
            ),
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn locs() -> Vec<Location> {
        vec![Location(0), Location(1)]
    }

    #[test]
    fn generated_closed_comps_are_closed() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let m = rand_closed_comp(&mut rng, 20, &locs());
            assert!(m.is_closed(), "generator must produce closed terms: {m:?}");
        }
    }

    #[test]
    fn generated_stores_are_closed_and_well_formed() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..50 {
            let s = rand_closed_store(&mut rng, 3, &locs());
            assert!(s.is_well_formed());
            assert!(s.is_closed());
        }
    }

    #[test]
    fn enumerated_stores_are_well_formed() {
        let values = [Value::identity()];
        let stores = enumerate_stores(6, &locs(), &values);
        assert!(!stores.is_empty());
        for s in &stores {
            assert!(s.is_well_formed(), "ill-formed store enumerated: {s:?}");
            assert!(s.is_closed());
        }
    }

    #[test]
    fn enumerated_values_are_closed() {
        let (vals, complete) = enumerate_closed_values(5, &locs(), 10_000);
        assert!(complete);
        assert!(vals.iter().all(Value::is_closed));
        assert!(vals.contains(&Value::lam("x", Computation::unit(Value::var("x")))));
    }

    #[test]
    fn canonical_enumeration_dedups_collapsing_types() {
        let [d, s, c, t] = enumerate_canonical_types(3, &locs());
        for v in [&d, &s, &c, &t] {
            assert!(!v.is_empty());
            // No duplicates.
            let mut sorted = (*v).clone();
            sorted.dedup();
            assert_eq!(sorted.len(), v.len());
        }
        assert_eq!(d.iter().filter(|x| x.is_top()).count(), 1);
    }
}
