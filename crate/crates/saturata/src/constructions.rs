//! Explicit saturated families, random corpus generation, and exhaustive
//! minimum search at tiny `n`.

use crate::boxalg;
use crate::bounds::binomial;
use crate::error::{Error, Result};
use crate::family::{MaskOrder, SetFamily};
use crate::mask::Mask;
use num::rational::BigRational;
use num::{BigInt, One};
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// `{A : A ∩ [s−1] ≠ ∅}`: the family conjectured extremal, of size
/// `2^n − 2^{n−s+1}`.
pub fn star_family(n: usize, s: usize) -> Result<SetFamily> {
    if s < 2 || s > n + 1 {
        return Err(Error::InvalidParameter(format!(
            "star family needs 2 <= s <= n+1, got n={n}, s={s}"
        )));
    }
    let core = Mask::full(s - 1);
    SetFamily::from_masks(
        n,
        (0..(1u32 << n)).map(Mask).filter(|m| !m.is_disjoint_from(core)),
    )
}

/// The block construction: `s − 1` disjoint blocks of odd size `m = 2r + 1`
/// on the lowest elements, and `F = {A : |A ∩ I_i| ≥ r+1 for some i}`. Its
/// top power has section ratio `1/2 − C(2r,r)/2^{2r+1}` at block
/// coordinates, approaching `1/2` as `r` grows.
#[derive(Clone, Debug)]
pub struct BlockConstruction {
    pub n: usize,
    pub s: usize,
    /// Block size, the largest odd integer with `(s−1)·m ≤ n`.
    pub m: usize,
    /// `(m − 1) / 2`; a set needs `r + 1` points in a block to qualify.
    pub r: usize,
    /// The `s − 1` blocks, lowest elements first, consecutive.
    pub blocks: Vec<Mask>,
    /// The unconstrained elements.
    pub free: Mask,
    pub family: SetFamily,
}

pub fn block_family(n: usize, s: usize) -> Result<BlockConstruction> {
    if s < 2 {
        return Err(Error::MatchingSizeTooSmall(s));
    }
    if n < s - 1 {
        return Err(Error::InvalidParameter(format!(
            "block construction needs n >= s-1, got n={n}, s={s}"
        )));
    }
    let mut m = n / (s - 1);
    if m.is_multiple_of(2) {
        m -= 1;
    }
    let r = (m - 1) / 2;
    let blocks: Vec<Mask> = (0..s - 1)
        .map(|i| Mask::from_elements(i * m + 1..=(i + 1) * m))
        .collect();
    let used = blocks.iter().fold(Mask::EMPTY, |acc, &b| acc | b);
    let free = used.complement_in(n);
    let family = SetFamily::from_masks(
        n,
        (0..(1u32 << n)).map(Mask).filter(|a| {
            blocks.iter().any(|&b| (*a & b).len() > r)
        }),
    )?;
    Ok(BlockConstruction {
        n,
        s,
        m,
        r,
        blocks,
        free,
        family,
    })
}

impl BlockConstruction {
    /// The closed form of `F^□(s−1)`: sets meeting every block in at least
    /// `r + 1` points. Must equal the power computed by convolution.
    pub fn top_power_closed_form(&self) -> SetFamily {
        SetFamily::from_masks(
            self.n,
            (0..(1u32 << self.n)).map(Mask).filter(|a| {
                self.blocks.iter().all(|&b| (*a & b).len() > self.r)
            }),
        )
        .expect("n validated")
    }

    /// `1/2 − C(2r,r)/2^{2r+1}`, the block-coordinate section ratio.
    pub fn block_ratio_formula(&self) -> BigRational {
        let half = BigRational::new(BigInt::one(), BigInt::from(2));
        half - BigRational::new(binomial(2 * self.r as u64, self.r as u64), BigInt::one() << (2 * self.r + 1))
    }
}

#[derive(Clone, Debug)]
pub struct SectionRatioProfile {
    /// `|F^□(s−1)(x̄)| / |F^□(s−1)|` for `x = 1..=n`.
    pub per_coordinate: Vec<BigRational>,
    pub min_ratio: BigRational,
    /// The closed-form block-coordinate value.
    pub formula: BigRational,
}

/// Enumerated section ratios of the construction's top power: `1/2` at free
/// coordinates and the closed-form value at block coordinates.
pub fn section_ratio_profile(bc: &BlockConstruction) -> SectionRatioProfile {
    let power = boxalg::box_power(&bc.family, bc.s - 1);
    let total = BigInt::from(power.len());
    let per_coordinate: Vec<BigRational> = power
        .coordinate_avoid_counts()
        .into_iter()
        .map(|c| BigRational::new(BigInt::from(c), total.clone()))
        .collect();
    let min_ratio = per_coordinate.iter().min().expect("n >= 1").clone();
    SectionRatioProfile {
        per_coordinate,
        min_ratio,
        formula: bc.block_ratio_formula(),
    }
}

/// `count` families produced by greedy saturation of the empty family under
/// seeded random mask orders. The `k`-th family uses a ChaCha8 sub-seed
/// drawn from a master ChaCha8 stream keyed with `seed`, so output is
/// deterministic per `(n, s, seed, count)` and stable across platforms.
pub fn random_saturated(n: usize, s: usize, seed: u64, count: usize) -> Result<Vec<SetFamily>> {
    if s < 2 || s > n + 1 {
        return Err(Error::InvalidParameter(format!(
            "random saturated families need 2 <= s <= n+1, got n={n}, s={s}"
        )));
    }
    let empty = SetFamily::empty(n)?;
    let mut master = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    for _ in 0..count {
        let sub = master.next_u64();
        out.push(empty.saturate_greedy(s, &MaskOrder::Seeded(sub))?);
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SearchMode {
    /// Exhaustive over increasing families via antichain generators, with
    /// coordinate-permutation reduction; guaranteed minimum.
    Exact,
    /// Best of `budget` randomized greedy saturations.
    Stochastic,
}

#[derive(Clone, Debug)]
pub struct SearchResult {
    pub n: usize,
    pub s: usize,
    pub minimum_size: u64,
    pub witness: SetFamily,
    pub mode: SearchMode,
    /// Nodes visited (exact) or greedy runs performed (stochastic).
    pub explored: u64,
}

/// Smallest `s`-saturated family over `[n]`.
///
/// Exact mode enumerates all increasing families as up-closures of
/// antichains, ordered by `(popcount, value)` of the generators, pruning
/// any branch that already packs `s` disjoint members (supersets only gain
/// matchings). The first generator is restricted to the prefix sets
/// `{1..k}`: every family is coordinate-isomorphic to one whose
/// `(popcount, value)`-smallest minimal member is a prefix, and the minimum
/// size is permutation-invariant. Guarded to `n ≤ 5` for `s = 2` and
/// `n ≤ 4` otherwise.
pub fn search_minimum(
    n: usize,
    s: usize,
    mode: SearchMode,
    budget: u64,
    seed: u64,
) -> Result<SearchResult> {
    if s < 2 {
        return Err(Error::MatchingSizeTooSmall(s));
    }
    match mode {
        SearchMode::Exact => {
            let within = (s == 2 && n <= 5) || (s >= 3 && n <= 4);
            if !within {
                return Err(Error::GuardExceeded(format!(
                    "exact search allows n <= 5 at s = 2 and n <= 4 at s >= 3; got n={n}, s={s}"
                )));
            }
            exact_search(n, s)
        }
        SearchMode::Stochastic => {
            if budget == 0 {
                return Err(Error::InvalidParameter("stochastic search needs budget >= 1".into()));
            }
            let empty = SetFamily::empty(n)?;
            let mut master = ChaCha8Rng::seed_from_u64(seed);
            let mut best: Option<SetFamily> = None;
            for _ in 0..budget {
                let sub = master.next_u64();
                let fam = empty.saturate_greedy(s, &MaskOrder::Seeded(sub))?;
                if best.as_ref().is_none_or(|b| fam.len() < b.len()) {
                    best = Some(fam);
                }
            }
            let witness = best.expect("budget >= 1");
            Ok(SearchResult {
                n,
                s,
                minimum_size: witness.len(),
                witness,
                mode,
                explored: budget,
            })
        }
    }
}

/// Lexicographically-least membership bitmap over all coordinate
/// permutations (bitmaps compared as `2^n`-bit numbers, most significant
/// masks first).
pub fn canonical_bitmap(f: &SetFamily) -> SetFamily {
    let n = f.n();
    let mut perm: Vec<usize> = (0..n).collect();
    let mut best = f.clone();
    heap_permutations(&mut perm, &mut |p| {
        let candidate = f.permute_coordinates(p);
        if bitmap_less(&candidate, &best) {
            best = candidate;
        }
    });
    best
}

fn bitmap_less(a: &SetFamily, b: &SetFamily) -> bool {
    for (x, y) in a.words_rev().zip(b.words_rev()) {
        if x != y {
            return x < y;
        }
    }
    false
}

fn heap_permutations(items: &mut [usize], visit: &mut impl FnMut(&[usize])) {
    let k = items.len();
    if k <= 1 {
        visit(items);
        return;
    }
    fn rec(items: &mut [usize], k: usize, visit: &mut impl FnMut(&[usize])) {
        if k == 1 {
            visit(items);
            return;
        }
        for i in 0..k {
            rec(items, k - 1, visit);
            if k.is_multiple_of(2) {
                items.swap(i, k - 1);
            } else {
                items.swap(0, k - 1);
            }
        }
    }
    rec(items, k, visit);
}

struct ExactSearch {
    n: usize,
    s: usize,
    candidates: Vec<Mask>, // all nonempty masks by (popcount, value)
    explored: u64,
    best: Option<SetFamily>,
}

fn exact_search(n: usize, s: usize) -> Result<SearchResult> {
    let mut candidates: Vec<Mask> = (1..(1u32 << n)).map(Mask).collect();
    candidates.sort_by_key(|m| (m.len(), m.0));
    let mut search = ExactSearch {
        n,
        s,
        candidates,
        explored: 0,
        best: None,
    };
    // first generator: prefixes {1..k} only
    for k in 1..=n {
        let g = Mask::full(k);
        let closure = up_of_single(n, g);
        if closure.matching_number() >= s {
            continue;
        }
        let pos = search
            .candidates
            .iter()
            .position(|&c| c == g)
            .expect("prefix mask is a candidate");
        search.descend(vec![g], closure, pos)?;
    }
    let witness = search.best.ok_or_else(|| {
        Error::InvalidParameter(format!("no {s}-saturated family over [{n}] found"))
    })?;
    Ok(SearchResult {
        n,
        s,
        minimum_size: witness.len(),
        witness: canonical_bitmap(&witness),
        mode: SearchMode::Exact,
        explored: search.explored,
    })
}

fn up_of_single(n: usize, g: Mask) -> SetFamily {
    let mut f = SetFamily::zeroed(n);
    for extra in g.complement_in(n).submasks() {
        f.insert(g | extra);
    }
    f
}

impl ExactSearch {
    fn descend(&mut self, gens: Vec<Mask>, closure: SetFamily, last_pos: usize) -> Result<()> {
        self.explored += 1;
        let verdict = closure.check_saturation(self.s)?;
        debug_assert!(verdict.matching_free, "matched branches are pruned");
        if verdict.maximal {
            let size = closure.len();
            if self.best.as_ref().is_none_or(|b| size < b.len()) {
                self.best = Some(closure.clone());
            }
            // maximal: nothing can be added, so no children
            return Ok(());
        }
        for pos in last_pos + 1..self.candidates.len() {
            let g = self.candidates[pos];
            if gens.iter().any(|&h| h.is_subset_of(g) || g.is_subset_of(h)) {
                continue; // generators form an antichain
            }
            let extended = closure.union(&up_of_single(self.n, g));
            if extended.matching_number() >= self.s {
                continue; // supersets only gain matchings: prune the subtree
            }
            let mut next = gens.clone();
            next.push(g);
            self.descend(next, extended, pos)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num::Zero;

    #[test]
    fn star_sizes_and_saturation() {
        let f = star_family(6, 3).unwrap();
        assert_eq!(f.len(), 48);
        assert!(f.is_saturated(3).unwrap());

        let g = star_family(5, 2).unwrap();
        assert_eq!(g.len(), 16);
        assert!(g.is_saturated(2).unwrap());

        // s = n + 1: all nonempty sets
        let h = star_family(4, 5).unwrap();
        assert_eq!(h.len(), 15);
        assert!(h.is_saturated(5).unwrap());
    }

    #[test]
    fn star_size_formula() {
        for n in 2..=8 {
            for s in 2..=n + 1 {
                let f = star_family(n, s).unwrap();
                assert_eq!(f.len(), (1u64 << n) - (1u64 << (n + 1 - s)));
            }
        }
    }

    #[test]
    fn star_rejects_out_of_range() {
        assert!(star_family(4, 1).is_err());
        assert!(star_family(4, 6).is_err());
    }

    #[test]
    fn block_9_3_shape() {
        let bc = block_family(9, 3).unwrap();
        assert_eq!((bc.m, bc.r), (3, 1));
        assert_eq!(bc.blocks, vec![Mask(0b000000111), Mask(0b000111000)]);
        assert_eq!(bc.free, Mask(0b111000000));
        assert!(bc.family.is_saturated(3).unwrap());
        // |F^□2| = (C(3,2) + C(3,3))² · 2³ = 128
        let power = boxalg::box_power(&bc.family, 2);
        assert_eq!(power.len(), 128);
        assert_eq!(power, bc.top_power_closed_form());
    }

    #[test]
    fn block_majority_at_s2() {
        let bc = block_family(7, 2).unwrap();
        assert_eq!((bc.m, bc.r), (7, 3));
        assert!(bc.free.is_empty());
        // {A : |A| ≥ 4} over [7]
        assert_eq!(bc.family.len(), 64);
        assert!(bc.family.is_saturated(2).unwrap());
    }

    #[test]
    fn block_boundary_cases() {
        // n = s − 1 gives singleton blocks and the all-nonempty family
        let bc = block_family(2, 3).unwrap();
        assert_eq!((bc.m, bc.r), (1, 0));
        assert_eq!(bc.family.len(), 3);
        assert!(bc.family.is_saturated(3).unwrap());
        assert!(block_family(1, 3).is_err());
    }

    #[test]
    fn ratio_profile_9_3() {
        let bc = block_family(9, 3).unwrap();
        let prof = section_ratio_profile(&bc);
        let quarter = BigRational::new(BigInt::from(1), BigInt::from(4));
        let half = BigRational::new(BigInt::from(1), BigInt::from(2));
        for x in 1..=9usize {
            let expect = if bc.free.contains(x) { &half } else { &quarter };
            assert_eq!(&prof.per_coordinate[x - 1], expect, "x={x}");
        }
        assert_eq!(prof.min_ratio, quarter);
        assert_eq!(prof.formula, quarter);
    }

    #[test]
    fn ratio_formula_monotone_in_r() {
        let half = BigRational::new(BigInt::from(1), BigInt::from(2));
        let mut last = BigRational::zero();
        for r in 0..=4usize {
            let m = 2 * r + 1;
            let bc = block_family(2 * m, 3).unwrap();
            assert_eq!(bc.r, r);
            let formula = bc.block_ratio_formula();
            assert!(formula < half);
            if r > 0 {
                assert!(formula > last);
            }
            last = formula;
        }
    }

    #[test]
    fn random_saturated_deterministic() {
        let a = random_saturated(6, 3, 11, 4).unwrap();
        let b = random_saturated(6, 3, 11, 4).unwrap();
        assert_eq!(a, b);
        for f in &a {
            assert!(f.is_saturated(3).unwrap());
            assert!(f.is_increasing());
        }
    }

    #[test]
    fn random_saturated_meets_trivial_bound() {
        for seed in 1..=20 {
            let fams = random_saturated(4, 2, seed, 1).unwrap();
            assert!(fams[0].len() >= 8, "seed {seed}: {}", fams[0].len());
        }
    }

    #[test]
    fn exact_minimum_intersecting() {
        let r = search_minimum(3, 2, SearchMode::Exact, 0, 0).unwrap();
        assert_eq!(r.minimum_size, 4);
        assert!(r.witness.is_saturated(2).unwrap());

        let r = search_minimum(4, 2, SearchMode::Exact, 0, 0).unwrap();
        assert_eq!(r.minimum_size, 8);
        assert!(r.witness.is_saturated(2).unwrap());
    }

    #[test]
    fn exact_minimum_guard() {
        assert!(matches!(
            search_minimum(6, 2, SearchMode::Exact, 0, 0),
            Err(Error::GuardExceeded(_))
        ));
        assert!(matches!(
            search_minimum(5, 3, SearchMode::Exact, 0, 0),
            Err(Error::GuardExceeded(_))
        ));
    }

    #[test]
    fn stochastic_search_reproducible() {
        let a = search_minimum(5, 2, SearchMode::Stochastic, 8, 42).unwrap();
        let b = search_minimum(5, 2, SearchMode::Stochastic, 8, 42).unwrap();
        assert_eq!(a.minimum_size, b.minimum_size);
        assert_eq!(a.witness, b.witness);
        assert!(a.witness.is_saturated(2).unwrap());
        assert_eq!(a.explored, 8);
    }

    #[test]
    fn canonical_bitmap_is_permutation_invariant() {
        let f = star_family(4, 3).unwrap();
        let g = f.permute_coordinates(&[2, 0, 3, 1]);
        assert_eq!(canonical_bitmap(&f), canonical_bitmap(&g));
    }
}
