//! Influences of the Boolean indicator of a family, and the
//! Kahn–Kalai–Linial bound `Σ I_i² ≥ p²·log²n/(5n)` for density `p ≤ 1/2`.
//!
//! The influence of coordinate `i` is the probability that flipping `x_i`
//! flips membership after the other coordinates are fixed uniformly at
//! random; counting boundary pairs `(A, A ∪ {i})` and dividing by `2^{n−1}`
//! gives it exactly. All family-side quantities are exact rationals; only
//! the `log`/`√5` side of each inequality is floating point, and those
//! comparisons carry a slack of `1e-12` applied so that rounding can only
//! produce a false alarm, never a false pass.

use crate::boxalg;
use crate::error::{Error, Result};
use crate::family::SetFamily;
use num::rational::BigRational;
use num::{BigInt, FromPrimitive, One, ToPrimitive};

/// Base of the `log n` factors. The inequalities are weakest (safest to
/// assert) under the natural log; base-2 runs are offered as experiments.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LogBase {
    Natural,
    Two,
}

impl LogBase {
    pub fn log(self, x: f64) -> f64 {
        match self {
            LogBase::Natural => x.ln(),
            LogBase::Two => x.log2(),
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            LogBase::Natural => "natural",
            LogBase::Two => "two",
        }
    }
}

const REAL_SLACK: f64 = 1e-12;

/// `lhs ≥ rhs` with the real side inflated by the slack: rounding in `rhs`
/// can only flag a violation that is not there, never hide one.
pub fn rational_at_least_real(lhs: &BigRational, rhs: f64) -> bool {
    let guarded = rhs + rhs.abs() * REAL_SLACK;
    *lhs >= BigRational::from_float(guarded).expect("finite bound")
}

/// `lhs ≤ rhs` with the real side deflated by the slack; same alarm-only
/// convention.
pub fn rational_at_most_real(lhs: &BigRational, rhs: f64) -> bool {
    let guarded = rhs - rhs.abs() * REAL_SLACK;
    *lhs <= BigRational::from_float(guarded).expect("finite bound")
}

#[derive(Clone, Debug)]
pub struct InfluenceReport {
    pub n: usize,
    /// `|F| / 2^n`, exact.
    pub p: BigRational,
    /// Boundary pairs per coordinate.
    pub boundary_counts: Vec<u64>,
    /// `I_i = boundary_counts[i] / 2^{n−1}`, exact.
    pub influences: Vec<BigRational>,
    /// `Σ I_i²`, exact.
    pub sum_sq: BigRational,
    /// `p²·log²n / (5n)` under the configured base.
    pub kkl_rhs: f64,
    pub max_influence: BigRational,
    /// Argmax influence, smallest index on ties (1-based).
    pub best_coordinate: usize,
    pub log_base: LogBase,
}

pub fn influence_report(f: &SetFamily, log_base: LogBase) -> Result<InfluenceReport> {
    let n = f.n();
    if n < 2 {
        return Err(Error::InvalidParameter(
            "influence reports need n ≥ 2 (log n must be positive)".into(),
        ));
    }
    let boundary_counts = f.boundary_counts();
    let half_cube = BigInt::from(1u64 << (n - 1));
    let influences: Vec<BigRational> = boundary_counts
        .iter()
        .map(|&c| BigRational::new(BigInt::from(c), half_cube.clone()))
        .collect();
    let sum_sq = influences.iter().map(|i| i * i).sum::<BigRational>();
    let (best_idx, best_count) = boundary_counts
        .iter()
        .enumerate()
        .max_by_key(|&(i, c)| (c, std::cmp::Reverse(i)))
        .expect("n ≥ 2");
    let p = BigRational::new(BigInt::from(f.len()), BigInt::from(1u64 << n));
    let p_f = f.len() as f64 / (1u64 << n) as f64;
    let log_n = log_base.log(n as f64);
    Ok(InfluenceReport {
        n,
        p,
        influences,
        sum_sq,
        kkl_rhs: p_f * p_f * log_n * log_n / (5.0 * n as f64),
        max_influence: BigRational::new(BigInt::from(*best_count), half_cube),
        best_coordinate: best_idx + 1,
        boundary_counts,
        log_base,
    })
}

#[derive(Clone, Copy, Debug)]
pub struct KklVerdict {
    /// `Σ I_i² ≥ p²·log²n/(5n)`.
    pub holds_sumsq: bool,
    /// `max_i I_i ≥ p·log n/(√5·n)`.
    pub holds_max: bool,
}

/// Check both forms of the influence inequality. Requires `p ≤ 1/2`.
pub fn check_kkl(f: &SetFamily, log_base: LogBase) -> Result<KklVerdict> {
    let n = f.n();
    if 2 * f.len() > f.mask_count() {
        return Err(Error::DensityTooHigh {
            size: f.len(),
            total: f.mask_count(),
        });
    }
    let report = influence_report(f, log_base)?;
    let p_f = f.len() as f64 / (1u64 << n) as f64;
    let max_rhs = p_f * log_base.log(n as f64) / (5f64.sqrt() * n as f64);
    Ok(KklVerdict {
        holds_sumsq: rational_at_least_real(&report.sum_sq, report.kkl_rhs),
        holds_max: rational_at_least_real(&report.max_influence, max_rhs),
    })
}

#[derive(Clone, Copy, Debug)]
pub struct BoundaryCoordinate {
    /// 1-based argmax coordinate, smallest index on ties.
    pub coordinate: usize,
    pub boundary_count: u64,
    /// `|A|·ln n / (2√5·n)`; the count must reach it when `|A| ≤ 2^{n−1}`.
    pub threshold: f64,
    pub holds: bool,
}

/// The coordinate with the most boundary pairs, together with the
/// natural-log guarantee it must meet for families of density at most 1/2.
pub fn max_boundary_coordinate(a: &SetFamily) -> Result<BoundaryCoordinate> {
    if 2 * a.len() > a.mask_count() {
        return Err(Error::DensityTooHigh {
            size: a.len(),
            total: a.mask_count(),
        });
    }
    let n = a.n();
    let counts = a.boundary_counts();
    let (idx, &count) = counts
        .iter()
        .enumerate()
        .max_by_key(|&(i, c)| (c, std::cmp::Reverse(i)))
        .expect("n ≥ 1");
    let threshold = a.len() as f64 * (n as f64).ln() / (2.0 * 5f64.sqrt() * n as f64);
    let holds = rational_at_least_real(
        &BigRational::from_u64(count).expect("count fits"),
        threshold,
    );
    Ok(BoundaryCoordinate {
        coordinate: idx + 1,
        boundary_count: count,
        threshold,
        holds,
    })
}

#[derive(Clone, Debug)]
pub struct GoodSectionBound {
    /// Coordinate minimizing the avoid-section of `F^□(s−1)` (1-based,
    /// smallest index on ties).
    pub coordinate: usize,
    /// `|F^□(s−1)(x̄)| / |F^□(s−1)|`, exact.
    pub ratio: BigRational,
    /// `(1 − log n/(2√5·n)) / 2` under the configured base.
    pub bound: f64,
    pub holds: bool,
}

/// For an `s`-saturated family, some coordinate sees an atypically small
/// avoid-section of `F^□(s−1)`: the minimum ratio is at most
/// `(1 − log n/(2√5·n))/2`. Asserted under the natural log.
pub fn good_section_bound(f: &SetFamily, s: usize, log_base: LogBase) -> Result<GoodSectionBound> {
    if !f.is_saturated(s)? {
        return Err(Error::NotSaturated(s));
    }
    good_section_bound_presaturated(f, s, log_base)
}

/// [`good_section_bound`] without the saturation re-check, for callers that
/// verified it once.
pub fn good_section_bound_presaturated(
    f: &SetFamily,
    s: usize,
    log_base: LogBase,
) -> Result<GoodSectionBound> {
    if s < 2 {
        return Err(Error::MatchingSizeTooSmall(s));
    }
    let n = f.n();
    let power = boxalg::box_power(f, s - 1);
    let total = power.len();
    debug_assert!(total > 0, "saturated families have a nonempty top power");
    debug_assert!(2 * total <= power.mask_count());
    let avoid = power.coordinate_avoid_counts();
    let (idx, &best) = avoid
        .iter()
        .enumerate()
        .min_by_key(|&(i, c)| (c, i))
        .expect("n ≥ 1");
    let ratio = BigRational::new(BigInt::from(best), BigInt::from(total));
    let bound = 0.5 * (1.0 - log_base.log(n as f64) / (2.0 * 5f64.sqrt() * n as f64));
    let holds = rational_at_most_real(&ratio, bound);
    Ok(GoodSectionBound {
        coordinate: idx + 1,
        ratio,
        bound,
        holds,
    })
}

/// Render a rational for reports, reduced, `p/q` or plain integer.
pub fn rational_string(r: &BigRational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Approximate a rational as `f64` for display next to real bounds.
pub fn rational_to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mask::Mask;
    use num::Zero;

    fn ratio(num: u64, den: u64) -> BigRational {
        BigRational::new(BigInt::from(num), BigInt::from(den))
    }

    fn dictator(n: usize) -> SetFamily {
        SetFamily::from_masks(n, (0..(1u32 << n)).map(Mask).filter(|m| m.contains(1))).unwrap()
    }

    #[test]
    fn dictator_influences() {
        let report = influence_report(&dictator(8), LogBase::Natural).unwrap();
        assert_eq!(report.p, ratio(1, 2));
        assert_eq!(report.influences[0], ratio(1, 1));
        for i in 1..8 {
            assert!(report.influences[i].is_zero());
        }
        assert_eq!(report.best_coordinate, 1);
        assert_eq!(report.max_influence, ratio(1, 1));
    }

    #[test]
    fn parity_family_influences_all_one() {
        let f =
            SetFamily::from_masks(6, (0..64u32).map(Mask).filter(|m| m.len() % 2 == 0)).unwrap();
        let report = influence_report(&f, LogBase::Natural).unwrap();
        for i in 0..6 {
            assert_eq!(report.influences[i], ratio(1, 1));
        }
    }

    #[test]
    fn majority_family_influences() {
        // n = 5: I_i = C(4,2)/2^4 = 3/8 at every coordinate
        let f = SetFamily::from_masks(5, (0..32u32).map(Mask).filter(|m| m.len() >= 3)).unwrap();
        let report = influence_report(&f, LogBase::Natural).unwrap();
        for i in 0..5 {
            assert_eq!(report.influences[i], ratio(3, 8));
        }
    }

    #[test]
    fn kkl_dictator_holds() {
        let report = influence_report(&dictator(8), LogBase::Natural).unwrap();
        // sum of squares is exactly 1; the bound is ln²(8)/160 ≈ 0.027
        assert_eq!(report.sum_sq, ratio(1, 1));
        assert!((report.kkl_rhs - 8f64.ln().powi(2) / 160.0).abs() < 1e-15);
        assert!(report.kkl_rhs < 0.028 && report.kkl_rhs > 0.026);
        let v = check_kkl(&dictator(8), LogBase::Natural).unwrap();
        assert!(v.holds_sumsq);
        assert!(v.holds_max);
    }

    #[test]
    fn kkl_empty_family_holds() {
        let f = SetFamily::empty(6).unwrap();
        let v = check_kkl(&f, LogBase::Natural).unwrap();
        assert!(v.holds_sumsq && v.holds_max);
    }

    #[test]
    fn kkl_rejects_dense_family() {
        let f = SetFamily::full(4).unwrap();
        assert!(matches!(
            check_kkl(&f, LogBase::Natural),
            Err(Error::DensityTooHigh { .. })
        ));
    }

    #[test]
    fn boundary_coordinate_of_singleton_empty_set() {
        // A = {∅}: one boundary pair at every coordinate
        let a = SetFamily::from_masks(5, [Mask::EMPTY]).unwrap();
        let r = max_boundary_coordinate(&a).unwrap();
        assert_eq!(r.boundary_count, 1);
        assert_eq!(r.coordinate, 1);
        assert!(r.holds);
    }

    #[test]
    fn boundary_coordinate_dictator_is_sharp() {
        let r = max_boundary_coordinate(&dictator(8)).unwrap();
        assert_eq!(r.coordinate, 1);
        assert_eq!(r.boundary_count, 1 << 7);
        assert!(r.holds);
    }

    #[test]
    fn good_section_star_family() {
        // star, s = 2: F^□1 = F; every member contains 1, so the
        // avoid-section at x = 1 is empty and the ratio is 0.
        let f = dictator(8);
        let r = good_section_bound(&f, 2, LogBase::Natural).unwrap();
        assert_eq!(r.coordinate, 1);
        assert!(r.ratio.is_zero());
        assert!(r.holds);
    }

    #[test]
    fn increasing_influence_matches_section_gap() {
        // For increasing F: I_i · 2^{n−1} = |F| − 2·|F(ī)|
        let f = SetFamily::from_masks(6, [Mask(0b000011), Mask(0b011000), Mask(0b100101)])
            .unwrap()
            .up_closure();
        let counts = f.boundary_counts();
        let avoid = f.coordinate_avoid_counts();
        for i in 0..6 {
            assert_eq!(counts[i], f.len() - 2 * avoid[i]);
        }
    }
}
