//! Cross-module structural invariants, each checked against an independent
//! route: definitional oracles, closed forms, or exhaustive enumeration.

mod common;

use common::*;
use num::rational::BigRational;
use num::BigInt;
use rand::Rng;
use saturata::boxalg::{self, BoxPowerCache};
use saturata::constructions::{self, SearchMode};
use saturata::influence;
use saturata::ranklab::{self, VectorMode};
use saturata::{Mask, MaskOrder, SetFamily};

/// Every family over `[n]`, via the bitmap pattern. Only for n ≤ 4.
fn all_families(n: usize) -> impl Iterator<Item = SetFamily> {
    let size = 1usize << n;
    (0u64..(1u64 << size)).map(move |pattern| {
        let mut f = SetFamily::empty(n).expect("small n");
        for b in 0..size {
            if (pattern >> b) & 1 == 1 {
                f.insert(Mask(b as u32));
            }
        }
        f
    })
}

#[test]
fn bar_and_complement_commute() {
    for n in 1..=4 {
        for f in all_families(n) {
            assert_eq!(f.complement().bar(), f.bar().complement());
        }
    }
    let mut rng = rng(101);
    for n in 5..=12 {
        for _ in 0..50 {
            let f = random_family(n, &mut rng);
            assert_eq!(f.complement().bar(), f.bar().complement());
        }
    }
}

#[test]
fn matching_number_routes_agree() {
    for n in 1..=4 {
        for f in all_families(n) {
            assert_eq!(f.matching_number(), f.matching_number_via_powers());
        }
    }
    let mut rng = rng(102);
    for n in 5..=10 {
        for _ in 0..500 {
            let f = random_family(n, &mut rng);
            assert_eq!(
                f.matching_number(),
                f.matching_number_via_powers(),
                "n={n} {f:?}"
            );
        }
    }
}

#[test]
fn saturation_check_matches_definitional_oracle() {
    let mut rng = rng(103);
    for n in 2..=8 {
        let mut corpus: Vec<SetFamily> = Vec::new();
        corpus.push(SetFamily::empty(n).unwrap());
        corpus.push(SetFamily::full(n).unwrap());
        for _ in 0..12 {
            corpus.push(random_family(n, &mut rng));
            corpus.push(random_increasing(n, &mut rng));
        }
        for s in 2..=4 {
            if s <= n + 1 {
                corpus.push(constructions::star_family(n, s).unwrap());
                if n >= s - 1 {
                    corpus.push(constructions::block_family(n, s).unwrap().family);
                }
                corpus.push(
                    SetFamily::empty(n)
                        .unwrap()
                        .saturate_greedy(s, &MaskOrder::Seeded(n as u64 * 100 + s as u64))
                        .unwrap(),
                );
            }
        }
        for f in &corpus {
            for s in 2..=4 {
                let fast = f.check_saturation(s).unwrap();
                let (matching_free, maximal) = naive_saturation(f, s);
                assert_eq!(fast.matching_free, matching_free, "n={n} s={s} {f:?}");
                assert_eq!(fast.maximal, maximal, "n={n} s={s} {f:?}");
                if let Some(w) = &fast.matching_witness {
                    assert_eq!(w.len(), s);
                    for (i, &a) in w.iter().enumerate() {
                        assert!(f.contains(a));
                        for &b in &w[..i] {
                            assert!(a.is_disjoint_from(b));
                        }
                    }
                }
                if let Some(m) = fast.addable_witness {
                    assert!(!f.contains(m));
                    // adding the witness completes no matching through it
                    let inside = f.restricted_to(m.complement_in(n));
                    assert!(!naive_has_matching(&inside, s - 1));
                    if fast.matching_free {
                        let mut grown = f.clone();
                        grown.insert(m);
                        assert!(!naive_has_matching(&grown, s));
                    }
                }
            }
        }
    }
}

#[test]
fn greedy_outputs_are_saturated_and_increasing() {
    for n in 3..=9 {
        for s in 2..=3 {
            for order in [
                MaskOrder::Ascending,
                MaskOrder::DescendingPopcount,
                MaskOrder::Seeded(7 * n as u64 + s as u64),
            ] {
                let f = SetFamily::empty(n)
                    .unwrap()
                    .saturate_greedy(s, &order)
                    .unwrap();
                assert!(f.is_increasing());
                assert!(f.is_saturated(s).unwrap());
                assert_eq!(
                    boxalg::box_power(&f, s - 1),
                    f.complement().bar(),
                    "n={n} s={s} {order:?}"
                );
            }
        }
    }
}

#[test]
fn power_cache_monotone_and_exchange() {
    let mut rng = rng(104);
    for n in 3..=9 {
        let f = random_increasing(n, &mut rng);
        let cache = BoxPowerCache::build(&f, 4).unwrap();
        for t in 1..4 {
            assert!(cache.power(t + 1).is_subfamily_of(cache.power(t)));
        }
        // sections exchange with powers for arbitrary families
        let g = random_family(n, &mut rng);
        for x in 1..=n.min(4) {
            for m in 0..=3 {
                assert!(boxalg::avoid_power_exchange(&g, m, x).unwrap());
            }
        }
    }
}

#[test]
fn product_commutes_and_preserves_increasing() {
    // exhaustive over every pair of increasing families at n <= 4
    for n in 1..=4 {
        let fams = all_increasing_families(n);
        for a in &fams {
            for b in &fams {
                let ab = boxalg::box_product_fast(a, b).unwrap();
                assert_eq!(ab, boxalg::box_product_fast(b, a).unwrap());
                assert!(ab.is_increasing(), "n={n}");
            }
        }
    }
    let mut rng = rng(105);
    for n in 2..=10 {
        for _ in 0..30 {
            let a = random_increasing(n, &mut rng);
            let b = random_increasing(n, &mut rng);
            let ab = boxalg::box_product_fast(&a, &b).unwrap();
            assert_eq!(ab, boxalg::box_product_fast(&b, &a).unwrap());
            assert!(ab.is_increasing(), "product of increasing families");
        }
    }
    // commutativity holds for arbitrary families too
    for n in 2..=6 {
        for _ in 0..30 {
            let a = random_family(n, &mut rng);
            let b = random_family(n, &mut rng);
            assert_eq!(
                boxalg::box_product_fast(&a, &b).unwrap(),
                boxalg::box_product_fast(&b, &a).unwrap()
            );
        }
    }
}

#[test]
fn product_associates() {
    let mut rng = rng(106);
    for n in 2..=8 {
        for _ in 0..20 {
            let a = random_increasing(n, &mut rng);
            let b = random_increasing(n, &mut rng);
            let c = random_increasing(n, &mut rng);
            let left =
                boxalg::box_product_fast(&boxalg::box_product_fast(&a, &b).unwrap(), &c).unwrap();
            let right =
                boxalg::box_product_fast(&a, &boxalg::box_product_fast(&b, &c).unwrap()).unwrap();
            assert_eq!(left, right);
        }
    }
}

#[test]
fn influence_respects_coordinate_permutations() {
    let mut rng = rng(107);
    for n in 3..=8 {
        for _ in 0..10 {
            let f = random_family(n, &mut rng);
            let mut perm: Vec<usize> = (0..n).collect();
            for i in (1..n).rev() {
                let j = rng.random_range(0..=i);
                perm.swap(i, j);
            }
            let g = f.permute_coordinates(&perm);
            let cf = f.boundary_counts();
            let cg = g.boundary_counts();
            for i in 0..n {
                assert_eq!(cf[i], cg[perm[i]], "influence must follow the relabeling");
            }
        }
    }
}

#[test]
fn increasing_influence_equals_size_minus_twice_avoid() {
    let mut rng = rng(108);
    for n in 2..=10 {
        for _ in 0..20 {
            let f = random_increasing(n, &mut rng);
            let counts = f.boundary_counts();
            let avoid = f.coordinate_avoid_counts();
            for i in 0..n {
                assert_eq!(counts[i], f.len() - 2 * avoid[i]);
            }
        }
    }
}

#[test]
fn boundary_argmax_is_true_argmax() {
    let mut rng = rng(109);
    for n in 2..=9 {
        for _ in 0..20 {
            let f = random_sparse_family(n, &mut rng);
            let r = influence::max_boundary_coordinate(&f).unwrap();
            let counts = f.boundary_counts();
            let best = *counts.iter().max().unwrap();
            assert_eq!(r.boundary_count, best);
            assert_eq!(
                r.coordinate,
                counts.iter().position(|&c| c == best).unwrap() + 1,
                "ties break to the smallest index"
            );
        }
    }
}

#[test]
fn constructions_saturate_across_grid() {
    for n in 2..=12usize {
        for s in 2..=5.min(n + 1) {
            let star = constructions::star_family(n, s).unwrap();
            assert_eq!(star.len(), (1u64 << n) - (1u64 << (n + 1 - s)));
            assert!(star.is_saturated(s).unwrap(), "star n={n} s={s}");
            if n >= s - 1 {
                let bc = constructions::block_family(n, s).unwrap();
                assert!(bc.family.is_saturated(s).unwrap(), "block n={n} s={s}");
            }
        }
    }
}

#[test]
fn block_power_matches_closed_form() {
    for (n, s) in [(5, 2), (7, 2), (6, 3), (9, 3), (8, 4)] {
        let bc = constructions::block_family(n, s).unwrap();
        assert_eq!(
            boxalg::box_power(&bc.family, s - 1),
            bc.top_power_closed_form(),
            "n={n} s={s}"
        );
    }
}

#[test]
fn ratio_profile_matches_formula_everywhere() {
    for (n, s) in [(7, 2), (9, 3), (10, 3), (8, 4)] {
        let bc = constructions::block_family(n, s).unwrap();
        let prof = constructions::section_ratio_profile(&bc);
        let half = BigRational::new(BigInt::from(1), BigInt::from(2));
        for x in 1..=n {
            let expect = if bc.free.contains(x) {
                &half
            } else {
                &prof.formula
            };
            assert_eq!(&prof.per_coordinate[x - 1], expect, "n={n} s={s} x={x}");
        }
    }
}

#[test]
fn boundary_guarantee_feeds_saturated_powers() {
    // the top power of a saturated family is intersecting, so its density
    // is at most 1/2 and the boundary guarantee applies to it directly
    for (n, s) in [(6usize, 2usize), (7, 3), (9, 3), (8, 4)] {
        let f = SetFamily::empty(n)
            .unwrap()
            .saturate_greedy(s, &MaskOrder::Seeded(13 * n as u64 + s as u64))
            .unwrap();
        let power = boxalg::box_power(&f, s - 1);
        assert!(2 * power.len() <= power.mask_count());
        let r = influence::max_boundary_coordinate(&power).unwrap();
        assert!(r.holds, "n={n} s={s}: count {} below {}", r.boundary_count, r.threshold);
    }
}

#[test]
fn block_family_section_bound_has_slack() {
    // n=9, s=3, x inside the first block: (s−1)·|F^□2| = 256 against
    // (s−2)·|F^□2(x̄)| + 2^8 = 32 + 256
    let bc = constructions::block_family(9, 3).unwrap();
    let r = boxalg::section_occurrence_bound(&bc.family, 3, 1).unwrap();
    assert_eq!((r.lhs, r.rhs), (256, 288));
    assert!(r.holds);
    // and at a free coordinate the two sides meet with less room
    let r = boxalg::section_occurrence_bound(&bc.family, 3, 9).unwrap();
    assert_eq!((r.lhs, r.rhs), (256, 256 + 64));
    assert!(r.holds);
}

#[test]
fn search_witnesses_reverify() {
    for (n, s) in [(3, 2), (4, 2), (4, 3), (4, 4)] {
        let r = constructions::search_minimum(n, s, SearchMode::Exact, 0, 0).unwrap();
        assert!(r.witness.is_saturated(s).unwrap());
        assert_eq!(r.witness.len(), r.minimum_size);
    }
    let r = constructions::search_minimum(6, 3, SearchMode::Stochastic, 10, 3).unwrap();
    assert!(r.witness.is_saturated(3).unwrap());
}

#[test]
fn exact_search_agrees_with_flat_enumeration() {
    // independent route: scan every increasing family, filter saturated
    for (n, s) in [(3, 2), (4, 2), (4, 3)] {
        let brute = all_increasing_families(n)
            .into_iter()
            .filter(|f| f.is_saturated(s).unwrap())
            .map(|f| f.len())
            .min()
            .unwrap();
        let searched = constructions::search_minimum(n, s, SearchMode::Exact, 0, 0).unwrap();
        assert_eq!(searched.minimum_size, brute, "n={n} s={s}");
    }
}

#[test]
fn first_mode_vectors_span_exactly_the_unions() {
    for (f, s) in [
        (constructions::star_family(4, 2).unwrap(), 2),
        (constructions::star_family(4, 3).unwrap(), 3),
        (constructions::block_family(6, 3).unwrap().family, 3),
    ] {
        let unions = boxalg::box_power(&f, s - 1);
        for k in 0..s {
            let vs = ranklab::build_level_vectors(&f, s, k, VectorMode::FirstPerUnion).unwrap();
            assert_eq!(vs.len() as u64, unions.len(), "one vector per union");
            for v in &vs {
                assert!(unions.contains(v.positive | v.negative));
            }
            assert_eq!(
                ranklab::rank_exact(&vs, f.n()) as u64,
                unions.len(),
                "per-union vectors are independent (s={s}, k={k})"
            );
        }
    }
}

#[test]
fn refinement_claims_on_instances() {
    for (f, s) in [
        (constructions::star_family(4, 3).unwrap(), 3),
        (constructions::block_family(6, 3).unwrap().family, 3),
        (constructions::star_family(5, 4).unwrap(), 4),
    ] {
        let inst = ranklab::refinement_instance(&f, s)
            .unwrap()
            .expect("these instances have a small union");
        let n = f.n();
        // the fixed split really is a matching with the right union
        let mut union = Mask::EMPTY;
        for (i, &b) in inst.base_parts.iter().enumerate() {
            assert!(f.contains(b));
            for &c in &inst.base_parts[..i] {
                assert!(b.is_disjoint_from(c));
            }
            union = union | b;
        }
        assert_eq!(union, inst.g0);
        for k in 1..s {
            assert!(inst.check_p_cross_split_orthogonality(n, s, k), "s={s} k={k}");
            assert!(inst.check_q_p_orthogonality(n, s, k), "s={s} k={k}");
        }
    }
}

#[test]
fn cube_vector_inner_products_match_enumeration() {
    let mut rng = rng(110);
    for _ in 0..200 {
        let n = 6;
        let a = Mask(rng.random_range(0..64));
        let b = Mask(rng.random_range(0..64) & !a.0);
        let c = Mask(rng.random_range(0..64));
        let d = Mask(rng.random_range(0..64) & !c.0);
        let v = ranklab::CubeVector::new(a, b);
        let w = ranklab::CubeVector::new(c, d);
        let closed = v.inner_product(w, n);
        let counted = (0..(1u32 << n))
            .filter(|&m| v.value_at(Mask(m)) && w.value_at(Mask(m)))
            .count() as u64;
        assert_eq!(closed, counted);
    }
}
