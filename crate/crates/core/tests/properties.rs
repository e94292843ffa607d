use dic_core::channel::{random_injective, validate_injectivity, ChannelSpec};
use dic_core::coeff_scheme::{de_of, normalize_traced, CoefficientScheme};
use dic_core::entropy::{build_entropy_table, check_injectivity_identity, InputDistribution};
use dic_core::hk_region::{build_a1, project_to_aggregate};
use dic_core::polytope::{fm_eliminate, prune_redundant, regions_equal, support_value, vertices, LinearInequality, Region};
use dic_core::theorem_region::{
    converse_complement_check, enumerate_facets, facet_to_scheme, random_facet_spec, scheme_to_facet, DEFAULT_FACET_CAP,
};
use dic_core::UserSet;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const TOL: f64 = 1e-9;

fn labels(dim: usize) -> Vec<String> {
    (0..dim).map(|i| format!("x{i}")).collect()
}

/// Random integer system in `dim` variables inside the box `[0, 4]^dim`.
fn boxed_region(rng: &mut ChaCha8Rng, dim: usize, extra: usize) -> Region {
    let mut rows = Vec::new();
    for v in 0..dim {
        rows.push(LinearInequality::nonnegativity(dim, v));
        let mut c = vec![0; dim];
        c[v] = 1;
        rows.push(LinearInequality::new(c, 4.0));
    }
    for _ in 0..extra {
        let c: Vec<i64> = (0..dim).map(|_| rng.gen_range(-3..=3)).collect();
        rows.push(LinearInequality::new(c, rng.gen_range(1..=8) as f64));
    }
    Region::new(labels(dim), rows).unwrap()
}

/// Interval of feasible values for variable `var` with the others fixed.
fn lift_exists(region: &Region, var: usize, others: &[f64]) -> bool {
    let (mut lo, mut hi) = (f64::NEG_INFINITY, f64::INFINITY);
    for q in region.inequalities() {
        let mut rest = q.rhs;
        let mut j = 0;
        for (v, &c) in q.coeffs.iter().enumerate() {
            if v == var {
                continue;
            }
            rest -= c as f64 * others[j];
            j += 1;
        }
        let c = q.coeffs[var] as f64;
        if c > 0.0 {
            hi = hi.min(rest / c);
        } else if c < 0.0 {
            lo = lo.max(rest / c);
        } else if rest < -TOL {
            return false;
        }
    }
    lo <= hi + TOL
}

fn random_direction(rng: &mut ChaCha8Rng, dim: usize) -> Vec<f64> {
    (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect()
}

fn random_channel(rng: &mut ChaCha8Rng, k: usize) -> ChannelSpec {
    let x_sizes: Vec<usize> = (0..k).map(|_| rng.gen_range(1..=3)).collect();
    let g: Vec<Vec<u32>> = x_sizes.iter().map(|&n| (0..n).map(|_| rng.gen_range(0..2)).collect()).collect();
    let images: Vec<usize> = g
        .iter()
        .map(|t| {
            let mut im = t.clone();
            im.sort_unstable();
            im.dedup();
            im.len()
        })
        .collect();
    let f = (0..k)
        .map(|i| {
            let width: usize = (0..k).filter(|&j| j != i).map(|j| images[j]).product();
            (0..x_sizes[i]).map(|_| (0..width).map(|_| rng.gen_range(0..3)).collect()).collect()
        })
        .collect();
    ChannelSpec::new(x_sizes, g, f).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn fm_matches_lift_oracle(seed in any::<u64>(), dim in 2usize..=4, extra in 0usize..=4, var_pick in 0usize..4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let region = boxed_region(&mut rng, dim, extra);
        let var = var_pick % dim;
        match fm_eliminate(&region, var, TOL) {
            Ok(projected) => {
                for _ in 0..40 {
                    let point: Vec<f64> = (0..dim - 1).map(|_| rng.gen_range(0..=8) as f64 * 0.5).collect();
                    prop_assert_eq!(projected.contains_point(&point, TOL), lift_exists(&region, var, &point));
                }
            }
            Err(dic_core::Error::Infeasible) => prop_assert!(!region.is_feasible().unwrap()),
            Err(e) => prop_assert!(false, "unexpected error {e}"),
        }
    }

    #[test]
    fn fm_order_does_not_matter(seed in any::<u64>(), extra in 0usize..=5) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let region = boxed_region(&mut rng, 3, extra);
        prop_assume!(region.is_feasible().unwrap());
        let a = fm_eliminate(&fm_eliminate(&region, 0, TOL).unwrap(), 0, TOL).unwrap();
        let b = fm_eliminate(&fm_eliminate(&region, 1, TOL).unwrap(), 0, TOL).unwrap();
        prop_assert!(regions_equal(&a, &b, 1e-9).unwrap());
    }

    #[test]
    fn pruning_preserves_the_set(seed in any::<u64>(), dim in 1usize..=4, extra in 0usize..=8) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let region = boxed_region(&mut rng, dim, extra);
        prop_assume!(region.is_feasible().unwrap());
        let pruned = prune_redundant(&region, TOL).unwrap();
        prop_assert!(pruned.inequalities().len() <= region.inequalities().len());
        prop_assert!(regions_equal(&region, &pruned, 1e-9).unwrap());
    }

    #[test]
    fn vertices_reproduce_support(seed in any::<u64>(), dim in 1usize..=3, extra in 0usize..=5) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let region = boxed_region(&mut rng, dim, extra);
        prop_assume!(region.is_feasible().unwrap());
        let vs = vertices(&region, TOL).unwrap();
        prop_assert!(!vs.is_empty());
        for v in &vs {
            prop_assert!(region.contains_point(v, 1e-8));
        }
        for _ in 0..100 {
            let dir = random_direction(&mut rng, dim);
            let hull = vs
                .iter()
                .map(|v| v.iter().zip(&dir).map(|(a, b)| a * b).sum::<f64>())
                .fold(f64::NEG_INFINITY, f64::max);
            let lp = support_value(&region, &dir).unwrap();
            prop_assert!((hull - lp).abs() <= 1e-8, "hull {} vs lp {}", hull, lp);
        }
    }

    #[test]
    fn injectivity_iff_identity(seed in any::<u64>(), k in 2usize..=3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let ch = random_channel(&mut rng, k);
        let dist = InputDistribution::random_full_support(&mut rng, ch.x_sizes());
        let injective = validate_injectivity(&ch).is_injective;
        prop_assert_eq!(injective, check_injectivity_identity(&ch, &dist, 1e-9).unwrap());
    }

    #[test]
    fn random_injective_channels_validate(seed in any::<u64>(), k in 2usize..=4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let ch = random_injective(&mut rng, k, 3);
        prop_assert!(validate_injectivity(&ch).is_injective);
    }

    #[test]
    fn conditioning_reduces_entropy(seed in any::<u64>(), k in 2usize..=3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let ch = random_channel(&mut rng, k);
        let dist = InputDistribution::random_full_support(&mut rng, ch.x_sizes());
        let t = build_entropy_table(&ch, &dist).unwrap();
        for i in 0..k {
            for s in UserSet::all(k) {
                prop_assert!(t.cond(i, s) >= 0.0);
                for j in 0..k {
                    prop_assert!(t.cond(i, s.with(j)) <= t.cond(i, s) + 1e-12);
                }
            }
        }
    }

    #[test]
    fn normalization_balances(seed in any::<u64>(), k in 2usize..=3, rows in 1usize..=6) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let ch = random_injective(&mut rng, k, 3);
        let t = build_entropy_table(&ch, &InputDistribution::uniform(ch.x_sizes())).unwrap();
        let scheme = CoefficientScheme::random(&mut rng, k, 3, rows);
        let trace = normalize_traced(&scheme, &t).unwrap();
        prop_assert!(trace.certificates().all(|c| c.holds(TOL)));
        let end = de_of(&trace.scheme);
        prop_assert!(end.balanced());
        prop_assert_eq!(end.min(), de_of(&scheme).min());
        prop_assert!(trace.scheme.rhs(&t) <= scheme.rhs(&t) + TOL);
    }

    #[test]
    fn facet_choices_round_trip(seed in any::<u64>(), k in 1usize..=4, a_max in 0u32..=4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let fs = random_facet_spec(&mut rng, k, a_max);
        prop_assert!(converse_complement_check(&fs));
        let scheme = facet_to_scheme(&fs);
        prop_assert!(de_of(&scheme).balanced());
        prop_assert_eq!(scheme_to_facet(&scheme).unwrap().canonical(), fs.canonical());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn two_user_projection_equals_enumeration(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let ch = random_injective(&mut rng, 2, 4);
        let dist = InputDistribution::random_full_support(&mut rng, ch.x_sizes());
        let t = build_entropy_table(&ch, &dist).unwrap();
        let hk = project_to_aggregate(&build_a1(&t), TOL).unwrap();
        let th = enumerate_facets(&t, 2, DEFAULT_FACET_CAP, TOL).unwrap();
        prop_assert!(regions_equal(&hk, &th, TOL).unwrap());
    }

    #[test]
    fn region_is_downward_closed(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let ch = random_injective(&mut rng, 2, 4);
        let dist = InputDistribution::random_full_support(&mut rng, ch.x_sizes());
        let t = build_entropy_table(&ch, &dist).unwrap();
        let region = enumerate_facets(&t, 2, DEFAULT_FACET_CAP, TOL).unwrap();
        for v in vertices(&region, TOL).unwrap() {
            for _ in 0..10 {
                let shrunk: Vec<f64> = v.iter().map(|x| x * rng.gen_range(0.0..=1.0)).collect();
                prop_assert!(region.contains_point(&shrunk, 1e-9));
            }
        }
    }
}
