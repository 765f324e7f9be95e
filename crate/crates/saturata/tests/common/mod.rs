//! Helpers shared by the integration suites: seeded family generators and
//! an independent enumerator of increasing families.

#![allow(dead_code)]

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use saturata::{Mask, SetFamily};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Uniformly random membership bitmap.
pub fn random_family(n: usize, rng: &mut ChaCha8Rng) -> SetFamily {
    let mut f = SetFamily::empty(n).expect("test n within cap");
    for m in 0..(1u32 << n) {
        if rng.next_u64() & 1 == 1 {
            f.insert(Mask(m));
        }
    }
    f
}

/// Random family with density at most 1/2 (complemented when too dense).
pub fn random_sparse_family(n: usize, rng: &mut ChaCha8Rng) -> SetFamily {
    let f = random_family(n, rng);
    if 2 * f.len() > f.mask_count() {
        f.complement()
    } else {
        f
    }
}

/// Up-closure of a few random generators: a random increasing family that
/// is usually far from trivial.
pub fn random_increasing(n: usize, rng: &mut ChaCha8Rng) -> SetFamily {
    let gens = 1 + (rng.next_u64() % 4) as usize;
    let mut f = SetFamily::empty(n).expect("test n within cap");
    for _ in 0..gens {
        f.insert(Mask(rng.random_range(0..(1u32 << n))));
    }
    f.up_closure()
}

/// Every increasing family over `[n]`, enumerated independently of the
/// library (recursive antichain construction). Small `n` only.
pub fn all_increasing_families(n: usize) -> Vec<SetFamily> {
    let masks: Vec<Mask> = (0..(1u32 << n)).map(Mask).collect();
    let mut out = vec![SetFamily::empty(n).expect("small n")];
    fn rec(n: usize, masks: &[Mask], start: usize, gens: &mut Vec<Mask>, out: &mut Vec<SetFamily>) {
        for i in start..masks.len() {
            let g = masks[i];
            if gens
                .iter()
                .any(|&h| h.is_subset_of(g) || g.is_subset_of(h))
            {
                continue;
            }
            gens.push(g);
            let mut fam = SetFamily::empty(n).expect("small n");
            for &gen in gens.iter() {
                for extra in gen.complement_in(n).submasks() {
                    fam.insert(gen | extra);
                }
            }
            out.push(fam);
            rec(n, masks, i + 1, gens, out);
            gens.pop();
        }
    }
    let mut gens = Vec::new();
    rec(n, &masks, 0, &mut gens, &mut out);
    out
}

/// Brute-force matching-free test in the same multiset sense as the
/// disjoint-occurrence product: the empty set is disjoint from itself and
/// may repeat, any other member appears at most once.
pub fn naive_has_matching(f: &SetFamily, s: usize) -> bool {
    if s == 0 {
        return true;
    }
    if f.contains(Mask::EMPTY) {
        // pad with copies of ∅: only distinct nonempty members matter
        return true;
    }
    let members: Vec<Mask> = f.members().collect();
    fn rec(members: &[Mask], start: usize, used: Mask, left: usize) -> bool {
        if left == 0 {
            return true;
        }
        for i in start..members.len() {
            if members[i].is_disjoint_from(used) && rec(members, i + 1, used | members[i], left - 1)
            {
                return true;
            }
        }
        false
    }
    rec(&members, 0, Mask::EMPTY, s)
}

/// Definitional saturation check: matching-free plus "every non-member
/// completes a matching", testing each candidate by searching `s − 1`
/// pairwise disjoint members inside its complement.
pub fn naive_saturation(f: &SetFamily, s: usize) -> (bool, bool) {
    let n = f.n();
    let matching_free = !naive_has_matching(f, s);
    let mut maximal = true;
    for m in 0..(1u32 << n) {
        let m = Mask(m);
        if f.contains(m) || m.is_empty() {
            // adding ∅ always completes a matching: it repeats freely
            continue;
        }
        let inside = f.restricted_to(m.complement_in(n));
        if !naive_has_matching(&inside, s - 1) {
            maximal = false;
            break;
        }
    }
    (matching_free, maximal)
}
