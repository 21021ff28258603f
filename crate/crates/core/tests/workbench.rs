use proptest::prelude::*;

use snblock::workbench::{
    generate_dataset, pairs_completeness, recall, zipf_block_sizes, Config, Distribution, GeneratorConfig, GroundTruth,
    ATTRIBUTE_NAMES,
};
use snblock::{BlockIndex, BlockingKeySpec, CandidateSet, Dataset, Pair, RecordId};

#[test]
fn generator_fidelity_over_seeds() {
    for seed in 100..150u64 {
        for dist in [Distribution::Uniform, Distribution::Zipf] {
            let cfg = GeneratorConfig::new(400, 30, dist, 0.25, seed);
            let (ds, truth) = generate_dataset(&cfg).unwrap();
            let idx = BlockIndex::build(ds.records(), &BlockingKeySpec::initials()).unwrap();
            assert_eq!(idx.sizes(), cfg.planted_sizes().unwrap());
            // every true pair lies within one block
            for p in &truth.pairs {
                let k = |id: RecordId| BlockingKeySpec::initials().apply(ds.get(id).unwrap()).unwrap();
                assert_eq!(k(p.lo()), k(p.hi()));
            }
        }
    }
}

#[test]
fn csv_output_is_seed_deterministic() {
    let bytes = |seed| {
        let (ds, truth) = generate_dataset(&GeneratorConfig::new(90, 7, Distribution::Zipf, 0.2, seed)).unwrap();
        let mut out = Vec::new();
        let mut header = vec!["id"];
        header.extend(ATTRIBUTE_NAMES);
        ds.write_csv(&mut out, Some(&header)).unwrap();
        truth.write(&mut out).unwrap();
        out
    };
    assert_eq!(bytes(5), bytes(5));
    assert_ne!(bytes(5), bytes(6));
    let text = bytes(5);
    let csv_part = std::str::from_utf8(&text)
        .unwrap()
        .lines()
        .take(91)
        .collect::<Vec<_>>()
        .join("\n");
    let back = Dataset::read_csv(csv_part.as_bytes(), true).unwrap();
    assert_eq!(back.len(), 90);
}

#[test]
fn mapreduce_zipf_block_exceeds_uniform() {
    let z = zipf_block_sizes(5000, 50).unwrap();
    assert_eq!(z[0], 1111);
    assert!(z[0] > 5000 / 50);
}

#[test]
fn config_file_example() {
    let c = Config::parse("mode = mapreduce\nmappers = 4\nreducers = 8\nseed = 11\n").unwrap();
    assert_eq!(c.get_parsed::<usize>("reducers").unwrap(), Some(8));
}

fn pair(a: u64, b: u64) -> Pair {
    Pair::new(RecordId(a), RecordId(b))
}

proptest! {
    #[test]
    fn pc_matches_counting(
        cand in prop::collection::btree_set((1u64..12, 1u64..12), 1..30),
        truth in prop::collection::btree_set((1u64..12, 1u64..12), 0..30),
    ) {
        let cs = CandidateSet::unscored(cand.iter().filter(|(a, b)| a != b).map(|&(a, b)| pair(a, b)));
        let gt = GroundTruth::new(truth.iter().filter(|(a, b)| a != b).map(|&(a, b)| pair(a, b)));
        prop_assume!(!cs.is_empty());
        let hits = cs.pairs.iter().filter(|p| gt.pairs.contains(p)).count();
        let pc = pairs_completeness(&cs, &gt).unwrap();
        prop_assert!((0.0..=1.0).contains(&pc));
        prop_assert_eq!(pc, hits as f64 / cs.len() as f64);
        if !gt.is_empty() {
            prop_assert_eq!(recall(&cs, &gt).unwrap(), hits as f64 / gt.len() as f64);
        }
    }
}
