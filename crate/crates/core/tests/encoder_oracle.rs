mod support;

use hdcsearch::encoder::{encode, window_count, ArchConfig, ItemMemory};
use hdcsearch::hv::{generate_base_hv, ElementType, EwiseOp};
use hdcsearch::tokenizer::Vocabulary;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use support::oracle;

fn cfg(gram: usize, shift: usize, op: EwiseOp, base: ElementType, enc: ElementType) -> ArchConfig {
    ArchConfig {
        dim: 8,
        sparsity: 0.5,
        gram_size: gram,
        base_dtype: base,
        encoded_dtype: enc,
        resultant_dtype: ElementType::Int64,
        shift,
        ewise_op: op,
    }
}

#[test]
fn encode_matches_brute_force() {
    let items = 6;
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let seqs: Vec<Vec<usize>> = (0..100)
        .map(|_| {
            let len = rng.gen_range(1..=12);
            (0..len).map(|_| rng.gen_range(0..items)).collect()
        })
        .collect();
    for base in ElementType::BASE {
        let c0 = cfg(1, 0, EwiseOp::Mult, base, ElementType::Int64);
        let im = ItemMemory::generate(17, items, &c0).unwrap();
        let table: Vec<Vec<i64>> = im.entries().iter().map(|h| h.to_vec()).collect();
        for gram in 1..=3 {
            for shift in 0..=1 {
                for op in EwiseOp::ALL {
                    for enc in ElementType::ALL {
                        let c = cfg(gram, shift, op, base, enc);
                        for seq in &seqs {
                            let ids: Vec<u32> = seq.iter().map(|&x| x as u32).collect();
                            let got = encode(&c, &im, &ids).unwrap().to_vec();
                            let want = oracle::encode(
                                &table,
                                seq,
                                gram,
                                shift,
                                op.name(),
                                base == ElementType::Bipolar,
                                enc.name(),
                            );
                            assert_eq!(got, want, "{c} seq {seq:?}");
                        }
                    }
                }
            }
        }
    }
}

#[test]
fn that_dog_windows() {
    let vocab = Vocabulary::build(&["that dog"]).unwrap();
    let ids = vocab.tokenize("that dog").unwrap();
    assert_eq!(window_count(4, ids.len()).unwrap(), 5);
}

#[test]
fn item_memory_is_keyed_by_seed_and_id() {
    let c = ArchConfig { dim: 1000, ..ArchConfig::default() };
    let a = ItemMemory::generate(5, 30, &c).unwrap();
    let b = ItemMemory::generate(5, 30, &c).unwrap();
    assert_eq!(a.entries(), b.entries());
    for k in 0..30 {
        assert_eq!(a.get(k).unwrap(), &generate_base_hv(5, k as u64, 1000, 0.5, ElementType::Bipolar).unwrap());
    }
    let other = ItemMemory::generate(6, 30, &c).unwrap();
    assert_ne!(a.entries(), other.entries());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn integer_encodings_are_bounded_by_window_count(
        seq in prop::collection::vec(0u32..5, 1..20),
        gram in 1usize..=6,
        shift in 0usize..=7,
        op_i in 0usize..4,
        bip in any::<bool>(),
    ) {
        let base = if bip { ElementType::Bipolar } else { ElementType::Binary };
        let c = ArchConfig { dim: 64, ..cfg(gram, shift, EwiseOp::ALL[op_i], base, ElementType::Int64) };
        let im = ItemMemory::generate(3, 5, &c).unwrap();
        let w = window_count(gram, seq.len()).unwrap() as i64;
        let enc = encode(&c, &im, &seq).unwrap();
        for x in enc.to_vec() {
            prop_assert!(x.abs() <= w);
            if !bip {
                prop_assert!(x >= 0);
            }
        }
    }
}
