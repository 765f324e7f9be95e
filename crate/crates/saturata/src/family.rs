//! Set families over a small ground set, stored as a `2^n`-bit membership
//! bitmap indexed by [`Mask`], plus the structural predicates built on them:
//! increasingness, matching number, saturation checking, greedy saturation.

use crate::boxalg;
use crate::error::{Error, Result};
use crate::mask::Mask;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Default upper bound on the ground-set size. The membership bitmap of a
/// family over `[22]` occupies 4 Mi bits; `O(2^n)` sweeps stay cheap up to
/// here while `O(3^n)` paths already need the tighter CLI guard.
pub const DEFAULT_GROUND_SET_CAP: usize = 22;

/// Absolute cap: masks are `u32` and bitmaps `Vec<u64>`, so anything beyond
/// this is a configuration error, not a capacity override.
pub const ABSOLUTE_GROUND_SET_CAP: usize = 26;

// Bits of a 64-mask block whose index has bit `i` clear, for i = 0..6.
// Used to run lattice sweeps word-parallel below stride 64.
pub(crate) const LOW_HALF: [u64; 6] = [
    0x5555_5555_5555_5555,
    0x3333_3333_3333_3333,
    0x0f0f_0f0f_0f0f_0f0f,
    0x00ff_00ff_00ff_00ff,
    0x0000_ffff_0000_ffff,
    0x0000_0000_ffff_ffff,
];

/// A family `F ⊆ 2^[n]`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct SetFamily {
    n: usize,
    words: Vec<u64>,
}

impl std::fmt::Debug for SetFamily {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "SetFamily(n={}, size={}) {{", self.n, self.len())?;
        for (k, m) in self.members().take(16).enumerate() {
            if k > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{m}")?;
        }
        if self.len() > 16 {
            write!(f, ", …")?;
        }
        write!(f, "}}")
    }
}

impl SetFamily {
    pub(crate) fn zeroed(n: usize) -> SetFamily {
        let nwords = if n >= 6 { 1usize << (n - 6) } else { 1 };
        SetFamily {
            n,
            words: vec![0u64; nwords],
        }
    }

    fn tail_mask(n: usize) -> u64 {
        if n >= 6 {
            !0u64
        } else {
            (1u64 << (1usize << n)) - 1
        }
    }

    pub fn empty(n: usize) -> Result<SetFamily> {
        Self::empty_with_cap(n, DEFAULT_GROUND_SET_CAP)
    }

    /// Like [`SetFamily::empty`] with an explicit ground-set cap, for callers
    /// that deliberately exceed the default (e.g. the CLI's `--force`).
    pub fn empty_with_cap(n: usize, cap: usize) -> Result<SetFamily> {
        let cap = cap.min(ABSOLUTE_GROUND_SET_CAP);
        if n == 0 || n > cap {
            return Err(Error::GroundSetSize(n, cap));
        }
        Ok(Self::zeroed(n))
    }

    /// The full family `2^[n]`.
    pub fn full(n: usize) -> Result<SetFamily> {
        let mut f = Self::empty(n)?;
        let tail = Self::tail_mask(n);
        for w in &mut f.words {
            *w = tail;
        }
        Ok(f)
    }

    pub fn from_masks<I: IntoIterator<Item = Mask>>(n: usize, masks: I) -> Result<SetFamily> {
        let mut f = Self::empty(n)?;
        for m in masks {
            if !m.is_subset_of(Mask::full(n)) {
                return Err(Error::MaskOutOfRange { mask: m.0, n });
            }
            f.insert(m);
        }
        Ok(f)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// `2^n`, the number of masks over the ground set.
    pub fn mask_count(&self) -> u64 {
        1u64 << self.n
    }

    pub(crate) fn words(&self) -> &[u64] {
        &self.words
    }

    /// Words from the most significant mask block down.
    pub(crate) fn words_rev(&self) -> impl Iterator<Item = u64> + '_ {
        self.words.iter().rev().copied()
    }

    pub(crate) fn from_words(n: usize, words: Vec<u64>) -> SetFamily {
        debug_assert_eq!(words.len(), if n >= 6 { 1 << (n - 6) } else { 1 });
        debug_assert!(n >= 6 || words[0] & !Self::tail_mask(n) == 0);
        SetFamily { n, words }
    }

    pub fn contains(&self, m: Mask) -> bool {
        let i = m.0 as usize;
        (self.words[i >> 6] >> (i & 63)) & 1 == 1
    }

    pub fn insert(&mut self, m: Mask) {
        let i = m.0 as usize;
        self.words[i >> 6] |= 1u64 << (i & 63);
    }

    pub fn remove(&mut self, m: Mask) {
        let i = m.0 as usize;
        self.words[i >> 6] &= !(1u64 << (i & 63));
    }

    /// `|F|`.
    pub fn len(&self) -> u64 {
        self.words.iter().map(|w| w.count_ones() as u64).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    /// Members in increasing mask order.
    pub fn members(&self) -> Members<'_> {
        Members {
            words: &self.words,
            word_idx: 0,
            cur: self.words[0],
        }
    }

    /// `F^c = 2^[n] \ F`: flip membership pointwise.
    #[must_use]
    pub fn complement(&self) -> SetFamily {
        let tail = Self::tail_mask(self.n);
        SetFamily {
            n: self.n,
            words: self.words.iter().map(|w| !w & tail).collect(),
        }
    }

    /// `F̄ = {[n] \ A : A ∈ F}`: element-wise complements. Involutive.
    #[must_use]
    pub fn bar(&self) -> SetFamily {
        // Mask m maps to full − m, which reverses bit positions within the
        // bitmap: word w bit j goes to word (W−1−w) bit (63−j).
        let size = 1usize << self.n;
        let mut words: Vec<u64> = self.words.iter().rev().map(|w| w.reverse_bits()).collect();
        if size < 64 {
            words[0] >>= 64 - size;
        }
        SetFamily { n: self.n, words }
    }

    #[must_use]
    pub fn union(&self, other: &SetFamily) -> SetFamily {
        debug_assert_eq!(self.n, other.n);
        SetFamily {
            n: self.n,
            words: self
                .words
                .iter()
                .zip(&other.words)
                .map(|(a, b)| a | b)
                .collect(),
        }
    }

    #[must_use]
    pub fn intersection(&self, other: &SetFamily) -> SetFamily {
        debug_assert_eq!(self.n, other.n);
        SetFamily {
            n: self.n,
            words: self
                .words
                .iter()
                .zip(&other.words)
                .map(|(a, b)| a & b)
                .collect(),
        }
    }

    pub fn is_subfamily_of(&self, other: &SetFamily) -> bool {
        debug_assert_eq!(self.n, other.n);
        self.words.iter().zip(&other.words).all(|(a, b)| a & !b == 0)
    }

    /// Members of `self` that are subsets of `allowed`, as a family over the
    /// same ground set.
    #[must_use]
    pub fn restricted_to(&self, allowed: Mask) -> SetFamily {
        let mut out = Self::zeroed(self.n);
        for m in self.members() {
            if m.is_subset_of(allowed) {
                out.insert(m);
            }
        }
        out
    }

    /// `|{A ∈ F : i ∉ A}|` for each coordinate `i = 1..=n`.
    pub fn coordinate_avoid_counts(&self) -> Vec<u64> {
        let mut counts = vec![0u64; self.n];
        for (i, c) in counts.iter_mut().enumerate() {
            if i < 6 {
                let low = LOW_HALF[i];
                *c = self.words.iter().map(|w| (w & low).count_ones() as u64).sum();
            } else {
                let stride = 1usize << (i - 6);
                let block = stride << 1;
                *c = self
                    .words
                    .chunks_exact(block)
                    .flat_map(|chunk| &chunk[..stride])
                    .map(|w| w.count_ones() as u64)
                    .sum();
            }
        }
        counts
    }

    /// Boundary-pair count per coordinate: the number of pairs
    /// `(A, A ∪ {i})` with exactly one endpoint in the family.
    pub fn boundary_counts(&self) -> Vec<u64> {
        let mut counts = vec![0u64; self.n];
        for (i, c) in counts.iter_mut().enumerate() {
            if i < 6 {
                let shift = 1u32 << i;
                let low = LOW_HALF[i];
                *c = self
                    .words
                    .iter()
                    .map(|w| ((w ^ (w >> shift)) & low).count_ones() as u64)
                    .sum();
            } else {
                let stride = 1usize << (i - 6);
                let block = stride << 1;
                *c = self
                    .words
                    .chunks_exact(block)
                    .map(|chunk| {
                        let (lo, hi) = chunk.split_at(stride);
                        lo.iter()
                            .zip(hi)
                            .map(|(l, h)| (l ^ h).count_ones() as u64)
                            .sum::<u64>()
                    })
                    .sum();
            }
        }
        counts
    }

    /// Relabel coordinates: bit `i` of each member moves to bit `perm[i]`
    /// (0-based positions; `perm` must be a permutation of `0..n`).
    #[must_use]
    pub fn permute_coordinates(&self, perm: &[usize]) -> SetFamily {
        debug_assert_eq!(perm.len(), self.n);
        let mut out = Self::zeroed(self.n);
        for m in self.members() {
            let mut img = 0u32;
            let mut bits = m.0;
            while bits != 0 {
                let i = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                img |= 1 << perm[i];
            }
            out.insert(Mask(img));
        }
        out
    }

    /// Smallest increasing family containing `F`: a superset-OR sweep over
    /// the coordinates, `O(n·2^n)` word-parallel.
    #[must_use]
    pub fn up_closure(&self) -> SetFamily {
        let mut out = self.clone();
        out.close_upward();
        out
    }

    pub(crate) fn close_upward(&mut self) {
        for (i, &low) in LOW_HALF.iter().enumerate().take(self.n) {
            let shift = 1u32 << i;
            for w in &mut self.words {
                *w |= (*w & low) << shift;
            }
        }
        for i in 6..self.n {
            let stride = 1usize << (i - 6);
            let block = stride << 1;
            for chunk in self.words.chunks_exact_mut(block) {
                let (lo, hi) = chunk.split_at_mut(stride);
                for (l, h) in lo.iter().zip(hi.iter_mut()) {
                    *h |= *l;
                }
            }
        }
    }

    /// `None` iff `F` is increasing; otherwise a pair `(m, m ∪ {i})` with the
    /// first member whose superset is missing.
    pub fn increasing_counterexample(&self) -> Option<(Mask, Mask)> {
        let mut best: Option<(Mask, Mask)> = None;
        for i in 0..self.n {
            let viol = self.violation_at(i);
            if let Some(pair) = viol {
                best = match best {
                    None => Some(pair),
                    Some(b) if pair.0 < b.0 => Some(pair),
                    b => b,
                };
            }
        }
        best
    }

    // Smallest m with bit i clear, m ∈ F, m ∪ {i} ∉ F.
    fn violation_at(&self, i: usize) -> Option<(Mask, Mask)> {
        if i < 6 {
            let shift = 1u32 << i;
            let low = LOW_HALF[i];
            for (wi, &w) in self.words.iter().enumerate() {
                let v = w & low & !(w >> shift);
                if v != 0 {
                    let j = v.trailing_zeros() as usize;
                    let m = Mask(((wi << 6) | j) as u32);
                    return Some((m, m.with(i + 1)));
                }
            }
        } else {
            let stride = 1usize << (i - 6);
            let block = stride << 1;
            for (ci, chunk) in self.words.chunks_exact(block).enumerate() {
                for k in 0..stride {
                    let v = chunk[k] & !chunk[k + stride];
                    if v != 0 {
                        let j = v.trailing_zeros() as usize;
                        let m = Mask((((ci * block + k) << 6) | j) as u32);
                        return Some((m, m.with(i + 1)));
                    }
                }
            }
        }
        None
    }

    pub fn is_increasing(&self) -> bool {
        self.increasing_counterexample().is_none()
    }

    /// ν(F): the largest number of pairwise disjoint *distinct* members.
    /// The empty set is disjoint from every member including itself, but as a
    /// member it fills at most one slot, so `ν({∅, {1}}) = 2`.
    ///
    /// Direct bitmask dynamic program, `O(3^n)` time and `O(2^n)` space.
    pub fn matching_number(&self) -> usize {
        let size = 1usize << self.n;
        // best[m] = max number of pairwise disjoint nonempty members ⊆ m
        let mut best = vec![0u8; size];
        for m in 1..size {
            let low = m & m.wrapping_neg();
            let rest = m ^ low;
            let mut b = best[rest];
            // members a ⊆ m with low ∈ a: a = x | low over submasks x of rest
            let mut x = rest;
            loop {
                let a = (x | low) as u32;
                if self.contains(Mask(a)) {
                    b = b.max(1 + best[rest ^ x]);
                }
                if x == 0 {
                    break;
                }
                x = (x - 1) & rest;
            }
            best[m] = b;
        }
        best[size - 1] as usize + usize::from(self.contains(Mask::EMPTY))
    }

    /// ν(F) computed through disjoint-occurrence powers of the family with
    /// the empty set stripped (one extra slot if `∅ ∈ F`): the largest `t`
    /// with a nonempty `t`-th power. Must agree with [`matching_number`].
    ///
    /// [`matching_number`]: SetFamily::matching_number
    pub fn matching_number_via_powers(&self) -> usize {
        let mut stripped = self.clone();
        let empty_member = stripped.contains(Mask::EMPTY);
        stripped.remove(Mask::EMPTY);
        let mut t = 0usize;
        let mut power = stripped.clone();
        while !power.is_empty() {
            t += 1;
            power = boxalg::box_product_fast(&power, &stripped).expect("same ground set");
        }
        t + usize::from(empty_member)
    }

    /// Decide whether `F` is `s`-saturated: free of `s` pairwise disjoint
    /// members and maximal with that property.
    ///
    /// Disjointness is read multiset-style, as the disjoint-occurrence
    /// product does: the empty set is disjoint from itself, so any family
    /// containing `∅` fails `matching_free` for every `s ≥ 2`, and `∅` is
    /// never an addable-set witness. With `∅ ∉ F` (in particular for every
    /// matching-free family) this coincides with counting distinct members.
    ///
    /// Cost: `O(s·n²·2^n)` for the powers plus an `O(n·2^n)` closure sweep.
    pub fn check_saturation(&self, s: usize) -> Result<SaturationVerdict> {
        if s < 2 {
            return Err(Error::MatchingSizeTooSmall(s));
        }
        let powers = boxalg::BoxPowerCache::build(self, s)?;
        let matching_free = powers.power(s).is_empty();
        let matching_witness = if matching_free {
            None
        } else {
            Some(extract_matching(self, &powers, s))
        };

        // F ∪ {m} gains an s-matching iff some union of s−1 pairwise
        // disjoint members fits inside [n]\m, i.e. iff the complement of m
        // lies in the up-closure of F^□(s−1). (For increasing F that power
        // is itself increasing and the closure is the identity.)
        let reach = powers.power(s - 1).up_closure();
        let mut maximal = true;
        let mut addable_witness = None;
        let full = Mask::full(self.n);
        for i in 0..(1u64 << self.n) {
            let m = Mask(i as u32);
            if self.contains(m) || m.is_empty() {
                continue;
            }
            if !reach.contains(m ^ full) {
                maximal = false;
                addable_witness = Some(m);
                break;
            }
        }
        Ok(SaturationVerdict {
            matching_free,
            maximal,
            matching_witness,
            addable_witness,
        })
    }

    /// Convenience: `check_saturation(s)` with both flags true.
    pub fn is_saturated(&self, s: usize) -> Result<bool> {
        Ok(self.check_saturation(s)?.is_saturated())
    }

    /// Grow `self` to an `s`-saturated family by scanning candidate masks in
    /// the given order and adding each one whose addition keeps the family
    /// free of `s` pairwise disjoint members.
    ///
    /// The output is determined by `(self, s, order)`. Cost is dominated by
    /// the power maintenance, `O(3^n·s)` bit operations over a full run.
    pub fn saturate_greedy(&self, s: usize, order: &MaskOrder) -> Result<SetFamily> {
        if s < 2 {
            return Err(Error::MatchingSizeTooSmall(s));
        }
        let cache = boxalg::BoxPowerCache::build(self, s)?;
        if !cache.power(s).is_empty() {
            return Err(Error::AlreadyHasMatching(s));
        }
        let mut powers = cache.into_powers();
        powers.pop(); // drop F^□s; powers[t] = F^□t for t ≤ s−1
        let mut fam = self.clone();
        let mut reach = powers[s - 1].up_closure();
        let mut stale = false;
        let full = Mask::full(self.n);

        for g in order.sequence(self.n) {
            let g = Mask(g);
            // ∅ is self-disjoint: adding it always completes an s-matching.
            if g.is_empty() || fam.contains(g) {
                continue;
            }
            let blocker = g ^ full;
            if reach.contains(blocker) {
                continue; // the closure only grows, so this is final
            }
            if stale {
                reach = powers[s - 1].up_closure();
                stale = false;
                if reach.contains(blocker) {
                    continue;
                }
            }
            fam.insert(g);
            // (F ∪ {G})^□t = F^□t ∪ (F^□(t−1) □ {G}) for t ≥ 2; a nonempty
            // G cannot appear twice in a disjoint union.
            for t in (2..s).rev() {
                let delta = boxalg::shift_into(&powers[t - 1], g);
                powers[t] = powers[t].union(&delta);
            }
            powers[1].insert(g);
            stale = true;
        }
        Ok(fam)
    }
}

/// Find `s` pairwise disjoint members (the empty set may repeat), smallest
/// masks first. Assumes `powers.power(s)` is nonempty.
fn extract_matching(fam: &SetFamily, powers: &boxalg::BoxPowerCache, s: usize) -> Vec<Mask> {
    let mut out = Vec::with_capacity(s);
    let mut rem = powers.power(s).members().next().expect("nonempty power");
    for t in (1..=s).rev() {
        let lower = powers.power(t - 1);
        for a in rem.submasks() {
            // powers[0] is the full family, so t = 1 always finds a = rem.
            let rest = rem ^ a;
            let ok = if t == 1 {
                a == rem && fam.contains(a)
            } else {
                fam.contains(a) && lower.contains(rest)
            };
            if ok {
                out.push(a);
                rem = rest;
                break;
            }
        }
    }
    debug_assert_eq!(out.len(), s);
    out.sort();
    out
}

/// Verdict of [`SetFamily::check_saturation`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SaturationVerdict {
    /// No `s` pairwise disjoint members.
    pub matching_free: bool,
    /// Every non-member completes an `s`-matching when added.
    pub maximal: bool,
    /// `s` pairwise disjoint members, present iff `matching_free` is false.
    pub matching_witness: Option<Vec<Mask>>,
    /// A mask addable without creating an `s`-matching, present iff
    /// `maximal` is false.
    pub addable_witness: Option<Mask>,
}

impl SaturationVerdict {
    pub fn is_saturated(&self) -> bool {
        self.matching_free && self.maximal
    }
}

/// Candidate orders for [`SetFamily::saturate_greedy`]. The order is part of
/// the contract: it determines which saturated family comes out.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MaskOrder {
    /// Masks by increasing numeric value.
    Ascending,
    /// Larger sets first, ties by increasing numeric value.
    DescendingPopcount,
    /// Fisher–Yates shuffle of the ascending sequence, driven by ChaCha8
    /// keyed with the seed. Reproducible across platforms.
    Seeded(u64),
}

impl MaskOrder {
    pub fn sequence(&self, n: usize) -> Vec<u32> {
        let size = 1usize << n;
        let mut seq: Vec<u32> = (0..size as u32).collect();
        match self {
            MaskOrder::Ascending => {}
            MaskOrder::DescendingPopcount => {
                seq.sort_by_key(|m| (std::cmp::Reverse(m.count_ones()), *m));
            }
            MaskOrder::Seeded(seed) => {
                let mut rng = ChaCha8Rng::seed_from_u64(*seed);
                seq.shuffle(&mut rng);
            }
        }
        seq
    }
}

pub struct Members<'a> {
    words: &'a [u64],
    word_idx: usize,
    cur: u64,
}

impl Iterator for Members<'_> {
    type Item = Mask;
    fn next(&mut self) -> Option<Mask> {
        while self.cur == 0 {
            self.word_idx += 1;
            if self.word_idx >= self.words.len() {
                return None;
            }
            self.cur = self.words[self.word_idx];
        }
        let j = self.cur.trailing_zeros() as usize;
        self.cur &= self.cur - 1;
        Some(Mask(((self.word_idx << 6) | j) as u32))
    }
}
