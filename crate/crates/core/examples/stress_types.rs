//! One-off deeper validation of the type machinery: bulk random pairs at
//! depths 5 and 6 over 3 locations, checking oracle agreement, the
//! canonical-equality property, meets as greatest lower bounds, and
//! transitivity.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use lamgs_core::enumgen::rand_type;
use lamgs_core::syntax::Location;
use lamgs_core::types::{subtype, subtype_oracle, to_raw, type_equiv, Sort};

fn main() {
    let locs = vec![Location(0), Location(1), Location(2)];
    let mut rng = ChaCha8Rng::seed_from_u64(0x5EED);
    let sorts = [Sort::Value, Sort::Store, Sort::Result, Sort::Comp];
    let mut pairs = 0usize;
    let mut oracle_bad = 0usize;
    let mut canon_bad = 0usize;
    let mut glb_bad = 0usize;
    let mut trans_bad = 0usize;
    for i in 0..20_000usize {
        let sort = sorts[i % 4];
        let depth = 5 + (i / 4) % 2;
        let a = rand_type(&mut rng, sort, depth, &locs);
        let b = rand_type(&mut rng, sort, depth, &locs);
        let c = rand_type(&mut rng, sort, depth, &locs);
        pairs += 1;
        let decided = subtype(&a, &b).unwrap();
        if i % 2 == 0 {
            // The oracle is the slow side; alternate pairs keep this fast.
            let axiomatic = subtype_oracle(&to_raw(&a), &to_raw(&b), 14);
            if decided != axiomatic {
                oracle_bad += 1;
                if oracle_bad < 4 {
                    eprintln!("DISAGREE decided={decided} oracle={axiomatic}: {a}  <=  {b}");
                }
            }
        }
        if type_equiv(&a, &b).unwrap() != (a == b) {
            canon_bad += 1;
            if canon_bad < 4 {
                eprintln!("CANON mismatch: {a}  vs  {b}");
            }
        }
        let m = a.meet(&b).unwrap();
        if subtype(&m, &a) != Ok(true)
            || subtype(&m, &b) != Ok(true)
            || (subtype(&c, &a) == Ok(true)
                && subtype(&c, &b) == Ok(true)
                && subtype(&c, &m) != Ok(true))
        {
            glb_bad += 1;
        }
        if subtype(&a, &b) == Ok(true)
            && subtype(&b, &c) == Ok(true)
            && subtype(&a, &c) != Ok(true)
        {
            trans_bad += 1;
        }
    }
    println!(
        "{pairs} triples: oracle disagreements {oracle_bad}, canonical mismatches {canon_bad}, glb violations {glb_bad}, transitivity violations {trans_bad}"
    );
}
