mod support;

use hdcsearch::hv::{ewise, rotate, rotation_amount, ElementType, EwiseOp, Hypervector};
use proptest::prelude::*;
use support::oracle;

fn hv(t: ElementType, v: &[i64]) -> Hypervector {
    Hypervector::from_values(t, v).unwrap()
}

fn to_bipolar(v: &[i64]) -> Vec<i64> {
    v.iter().map(|&x| if x == 1 { 1 } else { -1 }).collect()
}

#[test]
fn truth_tables_match_reference() {
    for op in EwiseOp::ALL {
        for (dtype, values, bipolar) in
            [(ElementType::Binary, [0, 1], false), (ElementType::Bipolar, [-1, 1], true)]
        {
            for a in values {
                for b in values {
                    let got = ewise(op, &hv(dtype, &[a]), &hv(dtype, &[b])).unwrap().get(0);
                    assert_eq!(got, oracle::table(op.name(), bipolar, a, b), "{op} {dtype} {a} {b}");
                }
            }
        }
    }
}

#[test]
fn rotation_amounts_of_a_four_gram() {
    let amounts: Vec<usize> = (1..=4).map(|i| rotation_amount(4, i, 2).unwrap()).collect();
    assert_eq!(amounts, vec![6, 4, 2, 0]);
    assert!(rotation_amount(4, 0, 2).is_err());
    assert!(rotation_amount(4, 5, 2).is_err());
}

fn binary_vec(d: usize) -> impl Strategy<Value = Vec<i64>> {
    prop::collection::vec(0i64..=1, d)
}

proptest! {
    // Xor, And and Or commute with the map 0 -> -1, 1 -> 1. Mult does not:
    // binary Mult(0, 0) = 0 but bipolar Mult(-1, -1) = 1.
    #[test]
    fn binary_bipolar_homomorphism(a in binary_vec(16), b in binary_vec(16)) {
        for op in [EwiseOp::Xor, EwiseOp::And, EwiseOp::Or] {
            let bin = ewise(op, &hv(ElementType::Binary, &a), &hv(ElementType::Binary, &b)).unwrap();
            let bip = ewise(
                op,
                &hv(ElementType::Bipolar, &to_bipolar(&a)),
                &hv(ElementType::Bipolar, &to_bipolar(&b)),
            )
            .unwrap();
            prop_assert_eq!(to_bipolar(&bin.to_vec()), bip.to_vec());
        }
    }

    #[test]
    fn bipolar_mult_is_negated_xor(a in binary_vec(16), b in binary_vec(16)) {
        let (a, b) = (hv(ElementType::Bipolar, &to_bipolar(&a)), hv(ElementType::Bipolar, &to_bipolar(&b)));
        let mult = ewise(EwiseOp::Mult, &a, &b).unwrap();
        let xor = ewise(EwiseOp::Xor, &a, &b).unwrap();
        prop_assert_eq!(mult, xor.negate().unwrap());
    }

    #[test]
    fn rotation_is_a_bijection_that_composes(v in prop::collection::vec(-1i64..=1, 1..40), a in 0usize..100, b in 0usize..100) {
        let v: Vec<i64> = v.into_iter().map(|x| if x == 0 { 1 } else { x }).collect();
        let x = hv(ElementType::Bipolar, &v);
        let d = v.len();
        prop_assert_eq!(rotate(&rotate(&x, a), b), rotate(&x, a + b));
        prop_assert_eq!(rotate(&x, d), x.clone());
        prop_assert_eq!(rotate(&rotate(&x, a % d), d - a % d), x.clone());
        prop_assert_eq!(rotate(&x, a).to_vec(), oracle::rotate_left(&v, a));
        let mut sorted = rotate(&x, a).to_vec();
        sorted.sort();
        let mut orig = v.clone();
        orig.sort();
        prop_assert_eq!(sorted, orig);
    }

    #[test]
    fn operators_are_associative(a in binary_vec(12), b in binary_vec(12), c in binary_vec(12), bip in any::<bool>()) {
        let t = if bip { ElementType::Bipolar } else { ElementType::Binary };
        let m = |v: &[i64]| if bip { hv(t, &to_bipolar(v)) } else { hv(t, v) };
        let (a, b, c) = (m(&a), m(&b), m(&c));
        for op in EwiseOp::ALL {
            let left = ewise(op, &ewise(op, &a, &b).unwrap(), &c).unwrap();
            let right = ewise(op, &a, &ewise(op, &b, &c).unwrap()).unwrap();
            prop_assert_eq!(left, right);
        }
    }
}
