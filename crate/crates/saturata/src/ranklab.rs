//! Exact verification of the product-polynomial counting argument.
//!
//! Every union `G` of `s−1` pairwise disjoint members of an `s`-saturated
//! family yields, for each split of the parts into a positive set `S` and a
//! negative set `T`, the function `∏_{j∈⊔S} x_j · ∏_{j∈⊔T} (1−x_j)` on
//! `{0,1}^n` — the indicator of a subcube. Level `k` collects the vectors
//! with `|S| = k`. Distinct levels are orthogonal, each level spans at
//! least `|G|` dimensions, and the level spans cannot together exceed
//! `2^n`; refining with an upset of a small member of `G` pushes the
//! per-level dimension higher. All ranks here are exact (fraction-free
//! elimination over the integers); no tolerances anywhere.

use crate::boxalg;
use crate::bounds::{binomial, g_of};
use crate::error::{Error, Result};
use crate::family::SetFamily;
use crate::mask::Mask;
use num::{BigInt, Zero};
use std::collections::HashMap;

/// Indicator of the subcube `{m : positive ⊆ m, negative ∩ m = ∅}`, the
/// evaluation table of one product polynomial.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CubeVector {
    pub positive: Mask,
    pub negative: Mask,
}

impl CubeVector {
    pub fn new(positive: Mask, negative: Mask) -> CubeVector {
        debug_assert!(positive.is_disjoint_from(negative));
        CubeVector { positive, negative }
    }

    pub fn value_at(self, m: Mask) -> bool {
        self.positive.is_subset_of(m) && self.negative.is_disjoint_from(m)
    }

    /// `Σ_m v(m)·w(m)`: the number of points in the subcube intersection,
    /// `2^{n − |constrained coordinates|}` when the constraints are
    /// consistent and `0` otherwise. Exact.
    pub fn inner_product(self, other: CubeVector, n: usize) -> u64 {
        let pos = self.positive | other.positive;
        let neg = self.negative | other.negative;
        if !pos.is_disjoint_from(neg) {
            return 0;
        }
        1u64 << (n - pos.len() - neg.len())
    }

    /// The support as a family (used for dumps and cross-checks).
    pub fn to_family(self, n: usize) -> SetFamily {
        let mut out = SetFamily::zeroed(n);
        let free = (self.positive | self.negative).complement_in(n);
        for extra in free.submasks() {
            out.insert(self.positive | extra);
        }
        out
    }
}

/// How many vectors to keep per union `G`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VectorMode {
    /// One vector per `(G, k)`: the lexicographically first matching with
    /// union `G`, positive parts at the first `k` positions of the sorted
    /// matching.
    FirstPerUnion,
    /// Every distinct vector.
    All,
}

pub const MATCHING_ENUMERATION_CAP: usize = 10;

fn guard_ranklab(f: &SetFamily, s: usize) -> Result<()> {
    if s < 2 {
        return Err(Error::MatchingSizeTooSmall(s));
    }
    if f.n() > MATCHING_ENUMERATION_CAP {
        return Err(Error::GuardExceeded(format!(
            "matching enumeration is limited to n <= {MATCHING_ENUMERATION_CAP}, got n={}",
            f.n()
        )));
    }
    if s > f.n() + 1 {
        return Err(Error::InvalidParameter(format!(
            "rank analysis needs s <= n+1, got n={}, s={s}",
            f.n()
        )));
    }
    Ok(())
}

/// All matchings of the given size as ascending tuples of members.
fn enumerate_matchings(f: &SetFamily, size: usize) -> Vec<Vec<Mask>> {
    let members: Vec<Mask> = f.members().collect();
    let mut out = Vec::new();
    let mut cur: Vec<Mask> = Vec::with_capacity(size);
    fn rec(
        members: &[Mask],
        start: usize,
        used: Mask,
        cur: &mut Vec<Mask>,
        size: usize,
        out: &mut Vec<Vec<Mask>>,
    ) {
        if cur.len() == size {
            out.push(cur.clone());
            return;
        }
        for i in start..members.len() {
            let a = members[i];
            if a.is_disjoint_from(used) {
                cur.push(a);
                rec(members, i + 1, used | a, cur, size, out);
                cur.pop();
            }
        }
    }
    rec(&members, 0, Mask::EMPTY, &mut cur, size, &mut out);
    out
}

/// Lexicographically first matching of `f` whose union is exactly `target`.
fn first_matching_with_union(f: &SetFamily, target: Mask, size: usize) -> Option<Vec<Mask>> {
    let members: Vec<Mask> = f.members().filter(|m| m.is_subset_of(target)).collect();
    let mut cur: Vec<Mask> = Vec::with_capacity(size);
    fn rec(
        members: &[Mask],
        start: usize,
        used: Mask,
        target: Mask,
        cur: &mut Vec<Mask>,
        size: usize,
    ) -> bool {
        if cur.len() == size {
            return used == target;
        }
        for i in start..members.len() {
            let a = members[i];
            if a.is_disjoint_from(used) {
                cur.push(a);
                if rec(members, i + 1, used | a, target, cur, size) {
                    return true;
                }
                cur.pop();
            }
        }
        false
    }
    if rec(&members, 0, Mask::EMPTY, target, &mut cur, size) {
        Some(cur)
    } else {
        None
    }
}

fn k_position_subsets(total: usize, k: usize) -> Vec<u32> {
    (0..(1u32 << total)).filter(|s| s.count_ones() as usize == k).collect()
}

/// The level-`k` vectors of an `s`-saturated family.
pub fn build_level_vectors(
    f: &SetFamily,
    s: usize,
    k: usize,
    mode: VectorMode,
) -> Result<Vec<CubeVector>> {
    guard_ranklab(f, s)?;
    if k > s - 1 {
        return Err(Error::InvalidParameter(format!(
            "level k must lie in 0..={}, got {k}",
            s - 1
        )));
    }
    if !f.is_saturated(s)? {
        return Err(Error::NotSaturated(s));
    }
    let matchings = enumerate_matchings(f, s - 1);
    match mode {
        VectorMode::All => {
            let splits = k_position_subsets(s - 1, k);
            let mut seen = std::collections::HashSet::new();
            for m in &matchings {
                for &split in &splits {
                    let mut pos = Mask::EMPTY;
                    let mut neg = Mask::EMPTY;
                    for (h, &part) in m.iter().enumerate() {
                        if split >> h & 1 == 1 {
                            pos = pos | part;
                        } else {
                            neg = neg | part;
                        }
                    }
                    seen.insert(CubeVector::new(pos, neg));
                }
            }
            let mut vectors: Vec<CubeVector> = seen.into_iter().collect();
            vectors.sort();
            Ok(vectors)
        }
        VectorMode::FirstPerUnion => {
            let mut first: HashMap<u32, &Vec<Mask>> = HashMap::new();
            for m in &matchings {
                let union = m.iter().fold(Mask::EMPTY, |acc, &p| acc | p);
                first.entry(union.0).or_insert(m);
            }
            let mut keys: Vec<u32> = first.keys().copied().collect();
            keys.sort();
            Ok(keys
                .into_iter()
                .map(|g| {
                    let m = first[&g];
                    let pos = m[..k].iter().fold(Mask::EMPTY, |acc, &p| acc | p);
                    let neg = m[k..].iter().fold(Mask::EMPTY, |acc, &p| acc | p);
                    CubeVector::new(pos, neg)
                })
                .collect())
        }
    }
}

/// True iff every vector at one level is orthogonal to every vector at any
/// other level.
pub fn verify_orthogonality(levels: &[Vec<CubeVector>], n: usize) -> bool {
    for k1 in 0..levels.len() {
        for k2 in k1 + 1..levels.len() {
            for &v in &levels[k1] {
                for &w in &levels[k2] {
                    if v.inner_product(w, n) != 0 {
                        return false;
                    }
                }
            }
        }
    }
    true
}

/// Exact rank of the vectors as elements of the `2^n`-dimensional function
/// space: fraction-free elimination, `i128` fast path with a big-integer
/// fallback on overflow.
pub fn rank_exact(vectors: &[CubeVector], n: usize) -> usize {
    let cols = 1usize << n;
    let rows: Vec<Vec<i128>> = vectors
        .iter()
        .map(|v| {
            (0..cols)
                .map(|m| i128::from(v.value_at(Mask(m as u32))))
                .collect()
        })
        .collect();
    match bareiss_rank_i128(rows) {
        Some(r) => r,
        None => {
            let rows: Vec<Vec<BigInt>> = vectors
                .iter()
                .map(|v| {
                    (0..cols)
                        .map(|m| BigInt::from(u8::from(v.value_at(Mask(m as u32)))))
                        .collect()
                })
                .collect();
            bareiss_rank_bigint(rows)
        }
    }
}

fn bareiss_rank_i128(mut m: Vec<Vec<i128>>) -> Option<usize> {
    if m.is_empty() {
        return Some(0);
    }
    let rows = m.len();
    let cols = m[0].len();
    let mut prev: i128 = 1;
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| m[i][c] != 0) else {
            continue;
        };
        m.swap(r, p);
        for i in r + 1..rows {
            for j in c + 1..cols {
                let a = m[r][c].checked_mul(m[i][j])?;
                let b = m[i][c].checked_mul(m[r][j])?;
                let num = a.checked_sub(b)?;
                debug_assert_eq!(num % prev, 0, "fraction-free division must be exact");
                m[i][j] = num / prev;
            }
            m[i][c] = 0;
        }
        prev = m[r][c];
        r += 1;
    }
    Some(r)
}

fn bareiss_rank_bigint(mut m: Vec<Vec<BigInt>>) -> usize {
    if m.is_empty() {
        return 0;
    }
    let rows = m.len();
    let cols = m[0].len();
    let mut prev = BigInt::from(1);
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        for i in r + 1..rows {
            for j in c + 1..cols {
                let num = &m[r][c] * &m[i][j] - &m[i][c] * &m[r][j];
                debug_assert!((&num % &prev).is_zero());
                m[i][j] = num / &prev;
            }
            m[i][c] = BigInt::zero();
        }
        prev = m[r][c].clone();
        r += 1;
    }
    r
}

/// The `2^n` monomial indicators `m ↦ [S ⊆ m]` are linearly independent:
/// the full `2^n × 2^n` system has exact rank `2^n`.
pub fn monomial_vectors_full_rank(n: usize) -> Result<bool> {
    if n > 8 {
        return Err(Error::GuardExceeded(
            "the full-rank check eliminates a 2^n × 2^n matrix; n <= 8 only".into(),
        ));
    }
    let vectors: Vec<CubeVector> = (0..(1u32 << n))
        .map(|s| CubeVector::new(Mask(s), Mask::EMPTY))
        .collect();
    Ok(rank_exact(&vectors, n) == 1usize << n)
}

#[derive(Clone, Copy, Debug)]
pub struct RankLevel {
    pub k: usize,
    pub num_vectors: usize,
    pub rank: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RefinementVerdict {
    Holds,
    Fails,
    NotApplicable(String),
}

#[derive(Clone, Debug)]
pub struct RankVerdicts {
    /// Distinct levels pairwise orthogonal.
    pub cross_level_orthogonal: bool,
    /// `rank_k ≥ |G|` at every level.
    pub rank_at_least_union_count: bool,
    /// `Σ_k rank_k ≤ 2^n`.
    pub rank_sum_within_dimension: bool,
    /// `rank_k ≥ |G| + (C(s−1,k) − 1)·|G₀-upset|` on the refinement
    /// instance, when one exists.
    pub upset_refinement: RefinementVerdict,
}

#[derive(Clone, Debug)]
pub struct RankReport {
    pub n: usize,
    pub s: usize,
    pub per_level: Vec<RankLevel>,
    pub total_rank_sum: usize,
    /// `|G|` where `G = F^□(s−1)` is the family of matching unions.
    pub union_count: u64,
    /// Size of the chosen upset, when the refinement applies.
    pub upset_size: Option<u64>,
    pub verdicts: RankVerdicts,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum UpsetPolicy {
    /// Pick the smallest member of `G` with `|G₀| ≤ n − g(n,s)` if any.
    Auto,
    /// Skip the refinement check.
    None,
}

pub fn rank_report(f: &SetFamily, s: usize, policy: UpsetPolicy) -> Result<RankReport> {
    guard_ranklab(f, s)?;
    if !f.is_saturated(s)? {
        return Err(Error::NotSaturated(s));
    }
    let n = f.n();
    let unions = boxalg::box_power(f, s - 1);
    let union_count = unions.len();
    let levels: Vec<Vec<CubeVector>> = (0..s)
        .map(|k| build_level_vectors(f, s, k, VectorMode::All))
        .collect::<Result<_>>()?;
    let per_level: Vec<RankLevel> = levels
        .iter()
        .enumerate()
        .map(|(k, vs)| RankLevel {
            k,
            num_vectors: vs.len(),
            rank: rank_exact(vs, n),
        })
        .collect();
    let total_rank_sum: usize = per_level.iter().map(|l| l.rank).sum();

    let instance = match policy {
        UpsetPolicy::None => None,
        UpsetPolicy::Auto => refinement_instance(f, s)?,
    };
    let upset_size = instance.as_ref().map(|i| i.upset.len() as u64);
    let upset_refinement = match (&instance, policy) {
        (_, UpsetPolicy::None) => RefinementVerdict::NotApplicable("disabled by policy".into()),
        (None, UpsetPolicy::Auto) => RefinementVerdict::NotApplicable(format!(
            "no union has at most n − g(n,s) = {} elements",
            n - g_of(n, s)?
        )),
        (Some(inst), UpsetPolicy::Auto) => {
            let g0 = BigInt::from(inst.upset.len() as u64);
            let total = BigInt::from(union_count);
            let ok = per_level.iter().all(|l| {
                let needed = &total + (binomial(s as u64 - 1, l.k as u64) - 1) * &g0;
                BigInt::from(l.rank as u64) >= needed
            });
            if ok {
                RefinementVerdict::Holds
            } else {
                RefinementVerdict::Fails
            }
        }
    };

    let verdicts = RankVerdicts {
        cross_level_orthogonal: verify_orthogonality(&levels, n),
        rank_at_least_union_count: per_level.iter().all(|l| l.rank as u64 >= union_count),
        rank_sum_within_dimension: total_rank_sum as u64 <= 1u64 << n,
        upset_refinement,
    };
    Ok(RankReport {
        n,
        s,
        per_level,
        total_rank_sum,
        union_count,
        upset_size,
        verdicts,
    })
}

/// The refinement instance: a small union `G₀`, its fixed split into
/// members, and deterministic splits of every union above and outside it.
#[derive(Clone, Debug)]
pub struct RefinementInstance {
    pub g0: Mask,
    /// `B_1 ⊔ … ⊔ B_{s−1} = G₀`: the lexicographically first matching.
    pub base_parts: Vec<Mask>,
    /// Unions containing `G₀`, ascending.
    pub upset: Vec<Mask>,
    /// Per upset member `G`: parts with `B_j ⊆ C_j`; the surplus `G \ G₀`
    /// is absorbed into the first part (supersets of members stay members
    /// in an increasing family).
    pub upset_parts: Vec<Vec<Mask>>,
    /// Unions not containing `G₀`, ascending.
    pub others: Vec<Mask>,
    /// Per other member: its lexicographically first matching.
    pub other_parts: Vec<Vec<Mask>>,
}

pub fn refinement_instance(f: &SetFamily, s: usize) -> Result<Option<RefinementInstance>> {
    guard_ranklab(f, s)?;
    let n = f.n();
    let threshold = n - g_of(n, s)?;
    let unions = boxalg::box_power(f, s - 1);
    let Some(g0) = unions
        .members()
        .filter(|m| m.len() <= threshold)
        .min_by_key(|m| (m.len(), m.0))
    else {
        return Ok(None);
    };
    let base_parts = first_matching_with_union(f, g0, s - 1)
        .expect("every union of s-1 disjoint members splits");
    let mut upset = Vec::new();
    let mut upset_parts = Vec::new();
    let mut others = Vec::new();
    let mut other_parts = Vec::new();
    for g in unions.members() {
        if g0.is_subset_of(g) {
            let surplus = g ^ g0;
            let mut parts = base_parts.clone();
            parts[0] = parts[0] | surplus;
            debug_assert!(f.contains(parts[0]), "increasing family keeps supersets");
            upset.push(g);
            upset_parts.push(parts);
        } else {
            let parts = first_matching_with_union(f, g, s - 1)
                .expect("every union of s-1 disjoint members splits");
            others.push(g);
            other_parts.push(parts);
        }
    }
    Ok(Some(RefinementInstance {
        g0,
        base_parts,
        upset,
        upset_parts,
        others,
        other_parts,
    }))
}

impl RefinementInstance {
    /// Parts of `others[h]` reordered so the union of the first `k` parts
    /// meets every one of `B_1..B_k` (possible because the family has no
    /// `s`-matching).
    pub fn relabeled_other_parts(&self, h: usize, k: usize) -> Vec<Mask> {
        let parts = &self.other_parts[h];
        let mut chosen: Vec<usize> = Vec::new();
        for b in &self.base_parts[..k] {
            let r = parts
                .iter()
                .position(|d| !d.is_disjoint_from(*b))
                .expect("a fully disjoint base part would extend the matching");
            if !chosen.contains(&r) {
                chosen.push(r);
            }
        }
        chosen.sort();
        let mut order: Vec<usize> = chosen.clone();
        for i in 0..parts.len() {
            if !order.contains(&i) {
                order.push(i);
            }
        }
        // keep the witnesses within the first k positions
        debug_assert!(chosen.iter().all(|r| order[..k].contains(r)));
        order.into_iter().map(|i| parts[i]).collect()
    }

    /// `p_{G,k,S}` for upset member index `u` and a position set `S` given
    /// as a bitmask over `0..s−1`.
    pub fn p_vector(&self, u: usize, split: u32) -> CubeVector {
        let parts = &self.upset_parts[u];
        let mut pos = Mask::EMPTY;
        let mut neg = Mask::EMPTY;
        for (h, &part) in parts.iter().enumerate() {
            if split >> h & 1 == 1 {
                pos = pos | part;
            } else {
                neg = neg | part;
            }
        }
        CubeVector::new(pos, neg)
    }

    /// `q_{H,k}` for other-member index `h`: first `k` relabeled parts
    /// positive, the rest negative.
    pub fn q_vector(&self, h: usize, k: usize) -> CubeVector {
        let parts = self.relabeled_other_parts(h, k);
        let pos = parts[..k].iter().fold(Mask::EMPTY, |acc, &p| acc | p);
        let neg = parts[k..].iter().fold(Mask::EMPTY, |acc, &p| acc | p);
        CubeVector::new(pos, neg)
    }

    /// `p_{G,k,S} ⊥ p_{G',k,S'}` whenever `S ≠ S'`: the shared base part at
    /// a position where the splits differ forces a `x_j(1−x_j)` factor.
    pub fn check_p_cross_split_orthogonality(&self, n: usize, s: usize, k: usize) -> bool {
        let splits = k_position_subsets(s - 1, k);
        for (ai, &sa) in splits.iter().enumerate() {
            for &sb in &splits[ai + 1..] {
                for u in 0..self.upset.len() {
                    for v in 0..self.upset.len() {
                        let p = self.p_vector(u, sa);
                        let q = self.p_vector(v, sb);
                        if p.inner_product(q, n) != 0 {
                            return false;
                        }
                    }
                }
            }
        }
        true
    }

    /// `q_{H,k} ⊥ p_{G,k,S}` whenever `S ≠ [k]`.
    pub fn check_q_p_orthogonality(&self, n: usize, s: usize, k: usize) -> bool {
        let first_k = (1u32 << k) - 1;
        let splits = k_position_subsets(s - 1, k);
        for h in 0..self.others.len() {
            let q = self.q_vector(h, k);
            for &split in &splits {
                if split == first_k {
                    continue;
                }
                for u in 0..self.upset.len() {
                    if q.inner_product(self.p_vector(u, split), n) != 0 {
                        return false;
                    }
                }
            }
        }
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::{block_family, star_family};

    #[test]
    fn cube_vector_values_and_support() {
        let v = CubeVector::new(Mask(0b001), Mask(0b100));
        assert!(v.value_at(Mask(0b001)));
        assert!(v.value_at(Mask(0b011)));
        assert!(!v.value_at(Mask(0b101)));
        assert!(!v.value_at(Mask(0b110)));
        let fam = v.to_family(3);
        assert_eq!(fam.len(), 2);
    }

    #[test]
    fn inner_product_matches_materialization() {
        let vs = [
            CubeVector::new(Mask(0b0011), Mask(0b0100)),
            CubeVector::new(Mask(0b0001), Mask(0b1000)),
            CubeVector::new(Mask(0b0100), Mask(0b0011)),
            CubeVector::new(Mask::EMPTY, Mask::EMPTY),
        ];
        for &a in &vs {
            for &b in &vs {
                let closed = a.inner_product(b, 4);
                let counted = a
                    .to_family(4)
                    .intersection(&b.to_family(4))
                    .len();
                assert_eq!(closed, counted);
            }
        }
    }

    #[test]
    fn level_vectors_for_s2_star() {
        // s = 2: level 0 keeps ∏(1−x_j) over members, level 1 keeps ∏x_j.
        let f = star_family(3, 2).unwrap();
        let w0 = build_level_vectors(&f, 2, 0, VectorMode::All).unwrap();
        let w1 = build_level_vectors(&f, 2, 1, VectorMode::All).unwrap();
        assert_eq!(w0.len(), 4);
        assert_eq!(w1.len(), 4);
        assert!(w0.iter().all(|v| v.positive.is_empty()));
        assert!(w1.iter().all(|v| v.negative.is_empty()));
        // first mode: one vector per union; unions here are the members
        let first = build_level_vectors(&f, 2, 1, VectorMode::FirstPerUnion).unwrap();
        assert_eq!(first.len(), 4);
    }

    #[test]
    fn first_mode_is_injective_per_union() {
        let f = star_family(4, 3).unwrap();
        for k in 0..=2 {
            let vs = build_level_vectors(&f, 3, k, VectorMode::FirstPerUnion).unwrap();
            let unions = boxalg::box_power(&f, 2);
            assert_eq!(vs.len() as u64, unions.len());
            let mut seen = std::collections::HashSet::new();
            for v in vs {
                assert!(seen.insert(v), "duplicate vector for distinct unions");
                assert!(unions.contains(v.positive | v.negative));
            }
        }
    }

    #[test]
    fn rank_of_small_system() {
        // two parallel subcubes plus their union direction
        let vs = [
            CubeVector::new(Mask(0b01), Mask(0b10)),
            CubeVector::new(Mask(0b10), Mask(0b01)),
            CubeVector::new(Mask(0b11), Mask::EMPTY),
        ];
        assert_eq!(rank_exact(&vs, 2), 3);
        let dup = [vs[0], vs[0]];
        assert_eq!(rank_exact(&dup, 2), 1);
        assert_eq!(rank_exact(&[], 2), 0);
    }

    #[test]
    fn monomial_system_full_rank_small() {
        for n in 1..=6 {
            assert!(monomial_vectors_full_rank(n).unwrap(), "n={n}");
        }
        assert!(monomial_vectors_full_rank(9).is_err());
    }

    #[test]
    fn star_rank_report_is_tight_at_n3() {
        let f = star_family(3, 2).unwrap();
        let r = rank_report(&f, 2, UpsetPolicy::Auto).unwrap();
        assert_eq!(r.union_count, 4);
        assert_eq!(r.per_level.len(), 2);
        assert_eq!(r.per_level[0].rank, 4);
        assert_eq!(r.per_level[1].rank, 4);
        assert_eq!(r.total_rank_sum, 8);
        assert!(r.verdicts.cross_level_orthogonal);
        assert!(r.verdicts.rank_at_least_union_count);
        assert!(r.verdicts.rank_sum_within_dimension);
    }

    #[test]
    fn block_rank_report_n6_s3() {
        let bc = block_family(6, 3).unwrap();
        let r = rank_report(&bc.family, 3, UpsetPolicy::Auto).unwrap();
        assert_eq!(r.union_count, 16);
        assert!(r.verdicts.cross_level_orthogonal);
        assert!(r.verdicts.rank_at_least_union_count);
        assert!(r.verdicts.rank_sum_within_dimension);
        match r.verdicts.upset_refinement {
            RefinementVerdict::Holds => {
                assert_eq!(r.upset_size, Some(4));
            }
            ref v => panic!("expected the refinement to hold, got {v:?}"),
        }
    }

    #[test]
    fn refinement_orthogonality_claims() {
        let bc = block_family(6, 3).unwrap();
        let inst = refinement_instance(&bc.family, 3).unwrap().unwrap();
        for k in 1..=2 {
            assert!(inst.check_p_cross_split_orthogonality(6, 3, k));
            assert!(inst.check_q_p_orthogonality(6, 3, k));
        }
    }

    #[test]
    fn first_mode_vectors_are_independent() {
        // one independent vector per union at every level
        let f = star_family(4, 2).unwrap();
        for k in 0..=1 {
            let vs = build_level_vectors(&f, 2, k, VectorMode::FirstPerUnion).unwrap();
            assert_eq!(rank_exact(&vs, 4) as u64, boxalg::box_power(&f, 1).len());
        }
    }

    #[test]
    fn guards_and_preconditions() {
        let f = star_family(4, 2).unwrap();
        assert!(build_level_vectors(&f, 2, 2, VectorMode::All).is_err());
        let unsat = SetFamily::from_masks(3, [Mask(0b001)]).unwrap();
        assert!(matches!(
            build_level_vectors(&unsat, 2, 0, VectorMode::All),
            Err(Error::NotSaturated(2))
        ));
    }
}
