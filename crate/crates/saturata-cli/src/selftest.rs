//! Quick end-to-end exercise of every module; prints one line per check.

use anyhow::Result;
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use saturata::bounds;
use saturata::constructions::{self, SearchMode};
use saturata::influence::{self, LogBase};
use saturata::ranklab::{self, RefinementVerdict, UpsetPolicy};
use saturata::{boxalg, Mask, SetFamily};

fn random_family(n: usize, rng: &mut ChaCha8Rng) -> SetFamily {
    let mut f = SetFamily::empty(n).expect("small n");
    for m in 0..(1u32 << n) {
        if rng.next_u64() & 1 == 1 {
            f.insert(Mask(m));
        }
    }
    f
}

fn random_sparse_family(n: usize, rng: &mut ChaCha8Rng) -> SetFamily {
    let f = random_family(n, rng);
    if 2 * f.len() > f.mask_count() {
        f.complement()
    } else {
        f
    }
}

pub fn run() -> Result<bool> {
    let mut all = true;
    let mut check = |name: &str, ok: bool| {
        println!("[{}] {name}", if ok { "ok" } else { "FAIL" });
        all &= ok;
    };
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);

    let mut conv_ok = true;
    for _ in 0..40 {
        let a = random_family(6, &mut rng);
        let b = random_family(6, &mut rng);
        if boxalg::box_product_fast(&a, &b)? != boxalg::box_product_naive(&a, &b)? {
            conv_ok = false;
        }
    }
    check("fast product matches submask oracle (40 random pairs, n=6)", conv_ok);

    let mut identity_ok = true;
    let mut bounds_ok = true;
    for s in 2..=3usize {
        for f in constructions::random_saturated(7, s, 1, 2)? {
            identity_ok &= f.is_increasing();
            identity_ok &= boxalg::box_power(&f, s - 1) == f.complement().bar();
            identity_ok &= f.matching_number() == s - 1;
            for x in 1..=7 {
                for t in 0..=s - 1 {
                    identity_ok &=
                        boxalg::section_complement_containment_presaturated(&f, s, x, t)?;
                }
                identity_ok &= boxalg::section_occurrence_bound_presaturated(&f, s, x)?.holds;
            }
            identity_ok &=
                influence::good_section_bound_presaturated(&f, s, LogBase::Natural)?.holds;
            bounds_ok &= bounds::bound_report_presaturated(&f, s, LogBase::Natural)?
                .all_asserted_pass();
        }
    }
    check("structural identities on greedy-saturated families (n=7)", identity_ok);
    check("size bounds on greedy-saturated families (n=7)", bounds_ok);

    let mut kkl_ok = true;
    for _ in 0..100 {
        let f = random_sparse_family(8, &mut rng);
        let v = influence::check_kkl(&f, LogBase::Natural)?;
        kkl_ok &= v.holds_sumsq && v.holds_max;
    }
    check("influence inequality on 100 random families (n=8)", kkl_ok);

    check(
        "gain exponent spot values",
        bounds::g_of(10, 2)? == 4 && bounds::g_of(10, 3)? == 3 && bounds::g_of(8, 9)? == 0,
    );

    let star = constructions::star_family(6, 3)?;
    check(
        "star family (6,3) is saturated at the conjectured size",
        star.len() == 48 && star.is_saturated(3)?,
    );
    let bc = constructions::block_family(9, 3)?;
    let prof = constructions::section_ratio_profile(&bc);
    check(
        "block family (9,3): saturated, min section ratio matches the formula",
        bc.family.is_saturated(3)? && prof.min_ratio == prof.formula,
    );

    let star_small = constructions::star_family(3, 2)?;
    let rank = ranklab::rank_report(&star_small, 2, UpsetPolicy::Auto)?;
    check(
        "rank levels tight on the star family (3,2)",
        rank.total_rank_sum == 8
            && rank.verdicts.cross_level_orthogonal
            && rank.verdicts.rank_at_least_union_count,
    );
    let block6 = constructions::block_family(6, 3)?;
    let rank6 = ranklab::rank_report(&block6.family, 3, UpsetPolicy::Auto)?;
    check(
        "rank verdicts on the block family (6,3)",
        rank6.verdicts.cross_level_orthogonal
            && rank6.verdicts.rank_at_least_union_count
            && rank6.verdicts.rank_sum_within_dimension
            && !matches!(rank6.verdicts.upset_refinement, RefinementVerdict::Fails),
    );

    let fams = vec![
        SetFamily::empty(6)?,
        SetFamily::full(6)?,
        SetFamily::full(6)?,
    ];
    let cross = bounds::cross_saturated_check(&fams)?;
    check(
        "extremal cross sequence meets (s-1)*2^n with equality",
        cross.is_cross_saturated && cross.total == cross.bound,
    );

    let search = constructions::search_minimum(3, 2, SearchMode::Exact, 0, 0)?;
    check("exact minimum at (n=3, s=2) is 4", search.minimum_size == 4);

    println!("selftest: {}", if all { "PASS" } else { "FAIL" });
    Ok(all)
}
