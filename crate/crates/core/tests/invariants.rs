use dimerlab::aggregate::{connected_sum, Activity};
use dimerlab::enumerate::{enumerate_trees, EnumerationJob, Reduction};
use dimerlab::oracle::{count_matchings_2d, Geometry};
use dimerlab::weight::Ursell;
use num_bigint::BigUint;
use proptest::prelude::*;

fn job(d: usize, s: usize, axis: usize, threads: usize, reduction: Reduction) -> EnumerationJob {
    let mut j = EnumerationJob::new(d, s);
    j.anchor_axis = axis;
    j.threads = Some(threads);
    j.reduction = reduction;
    j
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn open_counts_are_transpose_symmetric(m in 1usize..=7, n in 1usize..=7) {
        let a = count_matchings_2d(Geometry::Open, m, n).unwrap().count;
        let b = count_matchings_2d(Geometry::Open, n, m).unwrap().count;
        prop_assert_eq!(&a, &b);
        if (m * n) % 2 == 1 {
            prop_assert_eq!(a, BigUint::from(0u32));
        }
    }

    #[test]
    fn odd_tori_have_no_coverings(m in 1usize..=7, k in 1usize..=3) {
        let n = 2 * k + 1;
        if m % 2 == 1 {
            prop_assert_eq!(count_matchings_2d(Geometry::Torus, m, n).unwrap().count, BigUint::from(0u32));
        }
    }

    #[test]
    fn connected_sums_ignore_axis_threads_and_reduction(
        d in 1usize..=3,
        s in 1usize..=4,
        axis_seed in 0usize..3,
        threads in 1usize..=4,
        reduced in any::<bool>(),
    ) {
        let u = Ursell::new();
        let reduction = if reduced { Reduction::Hyperoctahedral } else { Reduction::None };
        let base = enumerate_trees(&job(d, s, 0, 1, Reduction::None)).unwrap();
        let other = enumerate_trees(&job(d, s, axis_seed % d, threads, reduction)).unwrap();
        prop_assert_eq!(&base.counts, &other.counts);
        for a in [Activity::F, Activity::Z] {
            prop_assert_eq!(
                connected_sum(&base, &u, a).unwrap().value,
                connected_sum(&other, &u, a).unwrap().value
            );
        }
    }

    #[test]
    fn tally_files_do_not_depend_on_threads(threads in 2usize..=6, interval in 1usize..=20) {
        let dir = tempfile::tempdir().unwrap();
        let run = |t: usize, name: &str| {
            let mut j = job(2, 3, 0, t, Reduction::Hyperoctahedral);
            j.checkpoint_interval = interval;
            j.output = Some(dir.path().join(name));
            enumerate_trees(&j).unwrap();
            std::fs::read(dir.path().join(name)).unwrap()
        };
        prop_assert_eq!(run(1, "a.tsv"), run(threads, "b.tsv"));
    }
}
