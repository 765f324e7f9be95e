//! The disjoint-occurrence product of families and the machinery built on
//! it: iterated powers, coordinate sections, and the section inequalities.
//!
//! `A □ B = {A ⊔ B : A ∈ A, B ∈ B, A ∩ B = ∅}`, and `A^□m` is the product
//! of `m` copies with `A^□0 = 2^[n]`. Two implementations are kept side by
//! side: a submask-enumeration oracle (`O(3^n)`) and a rank-indexed subset
//! convolution over saturating-free exact counts (`O(n²·2^n)`).

use crate::error::{Error, Result};
use crate::family::SetFamily;
use crate::mask::Mask;
use rayon::prelude::*;

/// Submask-enumeration product; the oracle the fast kernel is tested
/// against. `O(3^n)`.
pub fn box_product_naive(a: &SetFamily, b: &SetFamily) -> Result<SetFamily> {
    if a.n() != b.n() {
        return Err(Error::GroundSetMismatch(a.n(), b.n()));
    }
    let n = a.n();
    let mut out = SetFamily::zeroed(n);
    for m in 0..(1u32 << n) {
        let m = Mask(m);
        for sub in m.submasks() {
            if a.contains(sub) && b.contains(m ^ sub) {
                out.insert(m);
                break;
            }
        }
    }
    Ok(out)
}

/// Rank-indexed subset-convolution product. Identical output to
/// [`box_product_naive`] at `O(n²·2^n)`: zeta-transform each rank layer,
/// convolve counts pointwise per output rank, invert, and keep a mask iff
/// its own-rank count is positive.
pub fn box_product_fast(a: &SetFamily, b: &SetFamily) -> Result<SetFamily> {
    if a.n() != b.n() {
        return Err(Error::GroundSetMismatch(a.n(), b.n()));
    }
    let n = a.n();
    if a.is_empty() || b.is_empty() {
        return Ok(SetFamily::zeroed(n));
    }
    let la = rank_zeta_layers(a);
    let lb = rank_zeta_layers(b);
    Ok(product_from_layers(n, &la, &lb))
}

/// `F^□m`: repeated fast product, with the rank layers of `F` computed once.
pub fn box_power(f: &SetFamily, m: usize) -> SetFamily {
    let n = f.n();
    match m {
        0 => SetFamily::full(n).expect("n validated by the base family"),
        1 => f.clone(),
        _ => {
            let base_layers = rank_zeta_layers(f);
            let mut power = f.clone();
            for _ in 2..=m {
                if power.is_empty() {
                    return power;
                }
                let prev = rank_zeta_layers(&power);
                power = product_from_layers(n, &prev, &base_layers);
            }
            power
        }
    }
}

/// All powers `F^□0 … F^□t` of one base family.
pub struct BoxPowerCache {
    base: SetFamily,
    powers: Vec<SetFamily>,
}

impl BoxPowerCache {
    pub fn build(base: &SetFamily, max_power: usize) -> Result<BoxPowerCache> {
        let n = base.n();
        let mut powers = Vec::with_capacity(max_power + 1);
        powers.push(SetFamily::full(n).expect("n validated by the base family"));
        if max_power >= 1 {
            powers.push(base.clone());
        }
        let base_layers = rank_zeta_layers(base);
        for t in 2..=max_power {
            let prev = &powers[t - 1];
            if prev.is_empty() {
                powers.push(prev.clone());
                continue;
            }
            let prev_layers = rank_zeta_layers(prev);
            powers.push(product_from_layers(n, &prev_layers, &base_layers));
        }
        Ok(BoxPowerCache {
            base: base.clone(),
            powers,
        })
    }

    pub fn base(&self) -> &SetFamily {
        &self.base
    }

    pub fn max_power(&self) -> usize {
        self.powers.len() - 1
    }

    pub fn power(&self, t: usize) -> &SetFamily {
        &self.powers[t]
    }

    pub fn into_powers(self) -> Vec<SetFamily> {
        self.powers
    }
}

/// `{G ⊔ A : A ∈ fam, A ∩ G = ∅}`, i.e. the product with the singleton
/// family `{G}`. `O(2^{n−|G|})`.
pub(crate) fn shift_into(fam: &SetFamily, g: Mask) -> SetFamily {
    let n = fam.n();
    let mut out = SetFamily::zeroed(n);
    for c in g.complement_in(n).submasks() {
        if fam.contains(c) {
            out.insert(c | g);
        }
    }
    out
}

type RankLayers = Vec<Option<Vec<u32>>>;

/// Per-rank indicator layers of `f`, each zeta-transformed over the subset
/// lattice: `layers[r][m]` counts the rank-`r` members of `f` below `m`.
fn rank_zeta_layers(f: &SetFamily) -> RankLayers {
    let n = f.n();
    let size = 1usize << n;
    let mut layers: RankLayers = (0..=n).map(|_| None).collect();
    for m in f.members() {
        let layer = layers[m.len()].get_or_insert_with(|| vec![0u32; size]);
        layer[m.0 as usize] = 1;
    }
    if n >= PARALLEL_MIN_N {
        layers.par_iter_mut().flatten().for_each(|v| subset_zeta(v, n));
    } else {
        layers.iter_mut().flatten().for_each(|v| subset_zeta(v, n));
    }
    layers
}

// Below this, thread spawn overhead outweighs the work.
const PARALLEL_MIN_N: usize = 14;

// Counts stay ≤ 2^n < 2^32; products and rank sums stay < 2^50, so the
// whole pipeline is exact in u32/i64 with no headroom tricks.
fn subset_zeta(v: &mut [u32], n: usize) {
    for i in 0..n {
        let stride = 1usize << i;
        for chunk in v.chunks_exact_mut(stride << 1) {
            let (lo, hi) = chunk.split_at_mut(stride);
            for (l, h) in lo.iter().zip(hi.iter_mut()) {
                *h += *l;
            }
        }
    }
}

fn subset_mobius(v: &mut [i64], n: usize) {
    for i in 0..n {
        let stride = 1usize << i;
        for chunk in v.chunks_exact_mut(stride << 1) {
            let (lo, hi) = chunk.split_at_mut(stride);
            for (l, h) in lo.iter().zip(hi.iter_mut()) {
                *h -= *l;
            }
        }
    }
}

fn product_from_layers(n: usize, la: &RankLayers, lb: &RankLayers) -> SetFamily {
    let size = 1usize << n;
    let nwords = if n >= 6 { 1usize << (n - 6) } else { 1 };
    let rank_words = |r: usize| -> Vec<u64> {
        let mut acc: Option<Vec<i64>> = None;
        for i in 0..=r {
            if let (Some(x), Some(y)) = (&la[i], &lb[r - i]) {
                let acc = acc.get_or_insert_with(|| vec![0i64; size]);
                for m in 0..size {
                    acc[m] += x[m] as i64 * y[m] as i64;
                }
            }
        }
        let mut words = vec![0u64; nwords];
        if let Some(mut acc) = acc {
            subset_mobius(&mut acc, n);
            for (m, &c) in acc.iter().enumerate() {
                if c > 0 && m.count_ones() as usize == r {
                    words[m >> 6] |= 1u64 << (m & 63);
                }
            }
        }
        words
    };
    let per_rank: Vec<Vec<u64>> = if n >= PARALLEL_MIN_N {
        (0..=n).into_par_iter().map(rank_words).collect()
    } else {
        (0..=n).map(rank_words).collect()
    };
    let mut words = vec![0u64; nwords];
    for rank in per_rank {
        for (w, rw) in words.iter_mut().zip(rank) {
            *w |= rw;
        }
    }
    SetFamily::from_words(n, words)
}

/// Exact check of `|A □ B| ≤ |Ā ∩ B|` for increasing families.
#[derive(Clone, Copy, Debug)]
pub struct BkInequality {
    pub lhs: u64,
    pub rhs: u64,
    pub holds: bool,
}

pub fn bk_check(a: &SetFamily, b: &SetFamily) -> Result<BkInequality> {
    if a.n() != b.n() {
        return Err(Error::GroundSetMismatch(a.n(), b.n()));
    }
    for fam in [a, b] {
        if let Some((m, sup)) = fam.increasing_counterexample() {
            return Err(Error::NotIncreasing(m, sup));
        }
    }
    let lhs = box_product_fast(a, b)?.len();
    let rhs = a.bar().intersection(b).len();
    Ok(BkInequality {
        lhs,
        rhs,
        holds: lhs <= rhs,
    })
}

/// The two coordinate sections of a family, re-indexed to `n − 1` bits.
///
/// Removing element `x` keeps the relative order of the remaining elements:
/// old element `e < x` stays `e`, old `e > x` becomes `e − 1`. This fixed
/// re-indexing makes section-of-section compositions deterministic.
pub struct SectionPair {
    /// `F(x) = {A \ {x} : A ∈ F, x ∈ A}` over `[n] \ {x}`.
    pub at: SetFamily,
    /// `F(x̄) = {A ∈ F : x ∉ A}` over `[n] \ {x}`.
    pub avoid: SetFamily,
    /// The removed element.
    pub coordinate: usize,
}

pub fn section(f: &SetFamily, x: usize) -> Result<SectionPair> {
    let n = f.n();
    if x < 1 || x > n {
        return Err(Error::ElementOutOfRange { elem: x, n });
    }
    if n < 2 {
        return Err(Error::InvalidParameter(
            "sections need a ground set of at least 2 elements".into(),
        ));
    }
    let mut at = SetFamily::zeroed(n - 1);
    let mut avoid = SetFamily::zeroed(n - 1);
    let xbit = 1u32 << (x - 1);
    for m in 0..(1u32 << (n - 1)) {
        let base = embed_avoiding(Mask(m), x);
        if f.contains(Mask(base.0 | xbit)) {
            at.insert(Mask(m));
        }
        if f.contains(base) {
            avoid.insert(Mask(m));
        }
    }
    Ok(SectionPair {
        at,
        avoid,
        coordinate: x,
    })
}

/// Map a mask over the re-indexed ground set `[n] \ {x}` back to the
/// corresponding subset of `[n]` avoiding `x`.
pub fn embed_avoiding(m: Mask, x: usize) -> Mask {
    let low_mask = (1u32 << (x - 1)) - 1;
    Mask((m.0 & low_mask) | ((m.0 & !low_mask) << 1))
}

/// For an `s`-saturated family, every union of `s−1−t` pairwise disjoint
/// members avoiding `x` has its complement within `[n] \ {x}` outside
/// `F(x) □ F(x̄)^□t`; equivalently, over `2^{[n]\{x}}`,
///
/// `bar((F(x) □ F(x̄)^□t)^c) ⊇ F(x̄)^□(s−1−t)`.
///
/// Returns whether the containment holds bit for bit.
pub fn section_complement_containment(
    f: &SetFamily,
    s: usize,
    x: usize,
    t: usize,
) -> Result<bool> {
    if !f.is_saturated(s)? {
        return Err(Error::NotSaturated(s));
    }
    section_complement_containment_presaturated(f, s, x, t)
}

/// [`section_complement_containment`] without the saturation re-check, for
/// sweeps over `(x, t)` where the caller verified it once.
pub fn section_complement_containment_presaturated(
    f: &SetFamily,
    s: usize,
    x: usize,
    t: usize,
) -> Result<bool> {
    if s < 2 {
        return Err(Error::MatchingSizeTooSmall(s));
    }
    if t > s - 1 {
        return Err(Error::InvalidParameter(format!(
            "t must lie in 0..={}, got {t}",
            s - 1
        )));
    }
    let sp = section(f, x)?;
    let product = box_product_fast(&sp.at, &box_power(&sp.avoid, t))?;
    let lhs = product.complement().bar();
    let rhs = box_power(&sp.avoid, s - 1 - t);
    Ok(rhs.is_subfamily_of(&lhs))
}

/// Exact check of `(s−1)·|F^□(s−1)| ≤ (s−2)·|F(x̄)^□(s−1)| + 2^{n−1}` for an
/// `s`-saturated family.
#[derive(Clone, Copy, Debug)]
pub struct SectionBound {
    pub lhs: u64,
    pub rhs: u64,
    pub holds: bool,
}

pub fn section_occurrence_bound(f: &SetFamily, s: usize, x: usize) -> Result<SectionBound> {
    if !f.is_saturated(s)? {
        return Err(Error::NotSaturated(s));
    }
    section_occurrence_bound_presaturated(f, s, x)
}

/// [`section_occurrence_bound`] without the saturation re-check.
pub fn section_occurrence_bound_presaturated(
    f: &SetFamily,
    s: usize,
    x: usize,
) -> Result<SectionBound> {
    if s < 2 {
        return Err(Error::MatchingSizeTooSmall(s));
    }
    let sp = section(f, x)?;
    let top = box_power(f, s - 1).len();
    let avoid_top = box_power(&sp.avoid, s - 1).len();
    let lhs = (s as u64 - 1) * top;
    let rhs = (s as u64 - 2) * avoid_top + (1u64 << (f.n() - 1));
    Ok(SectionBound {
        lhs,
        rhs,
        holds: lhs <= rhs,
    })
}

/// Sections exchange with powers: `F(x̄)^□m` equals the avoid-section of
/// `F^□m`, as re-indexed families. Holds for every family, not only
/// saturated ones.
pub fn avoid_power_exchange(f: &SetFamily, m: usize, x: usize) -> Result<bool> {
    let sp = section(f, x)?;
    let lhs = box_power(&sp.avoid, m);
    let rhs = section(&box_power(f, m), x)?.avoid;
    Ok(lhs == rhs)
}
