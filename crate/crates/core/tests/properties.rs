use std::collections::{BTreeMap, BTreeSet};
use std::sync::OnceLock;

use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::Rng;

use gridcount::cells::{enumerate_cells, CellAtlas, DEFAULT_CELL_BUDGET};
use gridcount::check::window_bound_failures;
use gridcount::enumerator::{
    full_observation_set, pair_partition, window_breakpoints, recurrence_offsets,
};
use gridcount::inference::{infer_with_atlas, ObservationSet};
use gridcount::oracle::{count_samples, oracle_partition, region_offsets};
use gridcount::random::{random_offset, rng_from_seed, SignalSampler};
use gridcount::signal::genericity_check;
use gridcount::{CellProfile, ObservationVector, Offset, Rational, RegionSpec, SignalSpec};

fn generic_signal(seed: u64, max_regions: usize) -> SignalSpec {
    let mut rng = rng_from_seed(seed);
    SignalSampler::with_regions(1, max_regions).sample_generic(&mut rng)
}

fn any_signal(seed: u64, max_regions: usize) -> SignalSpec {
    let mut rng = rng_from_seed(seed);
    SignalSampler::with_regions(1, max_regions).sample(&mut rng)
}

fn fraction() -> impl Strategy<Value = Rational> {
    (2i64..=60).prop_flat_map(|den| (1..=den).prop_map(move |num| Rational::new(num, den)))
}

fn offset() -> impl Strategy<Value = Offset> {
    (1i64..=97).prop_flat_map(|den| {
        (0..den).prop_map(move |num| Offset::new(Rational::new(num, den)).unwrap())
    })
}

fn atlas(m: usize) -> &'static CellAtlas {
    static ATLASES: OnceLock<BTreeMap<usize, CellAtlas>> = OnceLock::new();
    &ATLASES.get_or_init(|| {
        (1..=4).map(|m| (m, enumerate_cells(m, DEFAULT_CELL_BUDGET, 0).unwrap())).collect()
    })[&m]
}

/// Grid points `d + k` inside `[0, total)`, counted one by one.
fn grid_points_by_walking(total: &Rational, d: &Offset) -> u64 {
    let mut count = 0;
    let mut x = d.value().clone();
    while &x < total {
        count += 1;
        x = x + Rational::one();
    }
    count
}

fn true_length(signal: &SignalSpec, start: usize, extent: usize) -> Rational {
    signal.lengths()[start..=start + extent].iter().cloned().sum()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn rational_display_round_trips(num in -10_000i64..10_000, den in 1i64..10_000) {
        let r = Rational::new(num, den);
        prop_assert_eq!(r.to_string().parse::<Rational>().unwrap(), r);
    }

    #[test]
    fn lengths_decompose_back_to_n_and_f(
        n in 2u64..40,
        f in fraction(),
        period_num in 1i64..50,
        period_den in 1i64..50,
    ) {
        let period = Rational::new(period_num, period_den);
        let length = (Rational::from(n) - &f) * &period;
        let scaled = SignalSpec::from_lengths(&[length], &[Rational::one()], &period).unwrap();
        let region = &scaled.regions()[0];
        prop_assert_eq!(region.n(), n);
        prop_assert_eq!(region.f(), &f);

        // measuring in units of T gives the same decomposition
        let unit = SignalSpec::from_lengths(&[Rational::from(n) - &f], &[Rational::one()], &Rational::one())
            .unwrap();
        prop_assert_eq!(unit, scaled);
    }

    #[test]
    fn single_region_count_toggles_at_one_minus_f(n in 2u64..30, f in fraction(), d in offset()) {
        let signal = SignalSpec::from_nf(&[(n, f.clone())]).unwrap();
        let expected = if d.value() < &(Rational::one() - &f) { n } else { n - 1 };
        prop_assert_eq!(count_samples(&signal, &d), ObservationVector::new(vec![expected]));
    }

    #[test]
    fn geometric_offsets_follow_the_recurrence(seed in any::<u64>(), d in offset()) {
        let signal = any_signal(seed, 8);
        prop_assert_eq!(region_offsets(&signal, &d), recurrence_offsets(&signal, &d));
    }

    #[test]
    fn counts_add_up_to_grid_points_in_the_support(seed in any::<u64>(), d in offset()) {
        let signal = any_signal(seed, 8);
        let total: Rational = signal.lengths().into_iter().sum();
        let counted: u64 = count_samples(&signal, &d).counts().iter().sum();
        prop_assert_eq!(counted, grid_points_by_walking(&total, &d));
    }

    #[test]
    fn counts_are_constant_between_critical_offsets(seed in any::<u64>(), d in offset()) {
        let signal = any_signal(seed, 6);
        let part = oracle_partition(&signal);
        let interval = part
            .intervals()
            .into_iter()
            .find(|iv| &iv.start <= d.value() && d.value() < &iv.end)
            .unwrap();
        let other = Offset::new(d.value().midpoint(&interval.end)).unwrap();
        prop_assert_eq!(count_samples(&signal, &d), count_samples(&signal, &other));
        prop_assert_eq!(part.vector_at(&d), &interval.counts);
    }

    #[test]
    fn closed_form_matches_oracle(seed in any::<u64>()) {
        let signal = generic_signal(seed, 8);
        let full = full_observation_set(&signal).unwrap();
        prop_assert_eq!(&full.partition, &oracle_partition(&signal));
        prop_assert_eq!(full.vectors.len(), signal.len() + 1);
    }

    #[test]
    fn window_sums_stay_in_range_and_hit_both_ends(seed in any::<u64>()) {
        let signal = generic_signal(seed, 8);
        let full = full_observation_set(&signal).unwrap();
        prop_assert!(window_bound_failures(&signal, &full).is_empty());
    }

    #[test]
    fn exactly_one_projection_forks_at_each_step(seed in any::<u64>()) {
        let signal = generic_signal(seed, 8);
        let full = full_observation_set(&signal).unwrap();
        for k in 1..signal.len() {
            let mut extensions: BTreeMap<Vec<u64>, BTreeSet<u64>> = BTreeMap::new();
            for v in &full.vectors {
                extensions.entry(v.counts()[..k].to_vec()).or_default().insert(v.counts()[k]);
            }
            prop_assert_eq!(extensions.len(), k + 1);
            prop_assert_eq!(extensions.values().filter(|e| e.len() == 2).count(), 1);
        }
    }

    #[test]
    fn prefix_breakpoints_are_distinct_and_match_the_partition(seed in any::<u64>()) {
        let signal = generic_signal(seed, 8);
        let m = signal.len();
        let bps = window_breakpoints(&signal, 0, m).unwrap();
        prop_assert_eq!(bps.len(), m);
        let full = full_observation_set(&signal).unwrap();
        prop_assert_eq!(full.partition.breakpoints(), &bps[..]);
    }

    #[test]
    fn pair_table_matches_oracle(n1 in 2u64..9, n2 in 2u64..9, f1 in fraction(), f2 in fraction()) {
        let signal = SignalSpec::from_nf(&[(n1, f1.clone()), (n2, f2.clone())]).unwrap();
        let first = RegionSpec::new(n1, f1, Rational::one()).unwrap();
        let second = RegionSpec::new(n2, f2, Rational::from_integer(2)).unwrap();
        let table = pair_partition(&first, &second);
        prop_assert_eq!(table.partition, oracle_partition(&signal));
        if genericity_check(&signal).generic {
            prop_assert!(table.generic);
        }
    }

    #[test]
    fn window_floors_are_monotone_and_nearly_additive(seed in any::<u64>()) {
        let signal = generic_signal(seed, 8);
        let profile = CellProfile::of(&signal);
        let m = signal.len();
        for a in 0..m {
            for e in 0..m - a {
                if a + e + 1 < m {
                    prop_assert!(profile.kappa(a, e) <= profile.kappa(a, e + 1));
                }
                for split in a..a + e {
                    let left = profile.kappa(a, split - a);
                    let right = profile.kappa(split + 1, a + e - split - 1);
                    let whole = profile.kappa(a, e);
                    prop_assert!(left + right <= whole && whole <= left + right + 1);
                }
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn full_set_pins_down_the_truth(seed in any::<u64>()) {
        let signal = generic_signal(seed, 4);
        let full = full_observation_set(&signal).unwrap();
        let set = ObservationSet::new(signal.len(), full.vectors.into_iter().collect()).unwrap();
        let report = infer_with_atlas(&set, atlas(signal.len()), 2).unwrap();
        prop_assert_eq!(report.survivors.len(), 1);
        prop_assert_eq!(&report.survivors[0].n, &signal.ns());
        prop_assert_eq!(&report.survivors[0].cell, &CellProfile::of(&signal));
    }

    #[test]
    fn subsets_keep_the_truth_and_deductions_agree(seed in any::<u64>()) {
        let signal = generic_signal(seed, 4);
        let truth = CellProfile::of(&signal);
        let full: Vec<ObservationVector> =
            full_observation_set(&signal).unwrap().vectors.into_iter().collect();
        let mut rng = rng_from_seed(seed ^ 0x5eed);
        let mut shuffled = full.clone();
        shuffled.shuffle(&mut rng);
        let small = rng.gen_range(1..=full.len());
        let large = rng.gen_range(small..=full.len());

        let infer = |vs: &[ObservationVector]| {
            let set = ObservationSet::new(signal.len(), vs.to_vec()).unwrap();
            infer_with_atlas(&set, atlas(signal.len()), 2).unwrap()
        };
        let a = infer(&shuffled[..small]);
        let b = infer(&shuffled[..large]);

        for report in [&a, &b] {
            prop_assert!(report.survivors.iter().any(|h| h.n == signal.ns() && h.cell == truth));
            for h in &report.survivors {
                for (status, n) in report.n_status.iter().zip(&h.n) {
                    if let Some(known) = status.determined() {
                        prop_assert_eq!(known, *n);
                    }
                }
                for c in &report.constraints {
                    prop_assert!(c.admits(h.cell.kappa(c.start, c.extent)));
                }
            }
            for bound in &report.length_bounds {
                prop_assert!(bound.width() == 1 || bound.width() == 2);
                let len = true_length(&signal, bound.start, bound.extent);
                prop_assert!(Rational::from(bound.lower) < len && len < Rational::from(bound.upper));
            }
        }

        // more observations: no new survivors, no wider bounds
        let survivors_a: BTreeSet<_> = a.survivors.iter().map(|h| (&h.n, &h.cell)).collect();
        for h in &b.survivors {
            prop_assert!(survivors_a.contains(&(&h.n, &h.cell)));
        }
        for (wide, narrow) in a.length_bounds.iter().zip(&b.length_bounds) {
            prop_assert!(wide.lower <= narrow.lower && narrow.upper <= wide.upper);
        }
    }
}

#[test]
fn random_offsets_reproduce_oracle_counts() {
    let mut rng = rng_from_seed(99);
    for seed in 0..200 {
        let signal = generic_signal(seed, 6);
        let full = full_observation_set(&signal).unwrap();
        let d = random_offset(&mut rng, 1000);
        assert_eq!(full.partition.vector_at(&d), &count_samples(&signal, &d));
    }
}
