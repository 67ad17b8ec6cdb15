//! Brute-force reference implementations, written from the truth tables and
//! the encoding rule without sharing code with the library.

#![allow(dead_code)]

/// Truth tables as literal lookups: `(op, bipolar, a, b) -> out`.
pub fn table(op: &str, bipolar: bool, a: i64, b: i64) -> i64 {
    let rows: &[(i64, i64, i64)] = match (op, bipolar) {
        ("mult", false) => &[(0, 0, 0), (0, 1, 0), (1, 0, 0), (1, 1, 1)],
        ("xor", false) => &[(0, 0, 0), (0, 1, 1), (1, 0, 1), (1, 1, 0)],
        ("and", false) => &[(0, 0, 0), (0, 1, 0), (1, 0, 0), (1, 1, 1)],
        ("or", false) => &[(0, 0, 0), (0, 1, 1), (1, 0, 1), (1, 1, 1)],
        ("mult", true) => &[(-1, -1, 1), (-1, 1, -1), (1, -1, -1), (1, 1, 1)],
        ("xor", true) => &[(-1, -1, -1), (-1, 1, 1), (1, -1, 1), (1, 1, -1)],
        ("and", true) => &[(-1, -1, -1), (-1, 1, -1), (1, -1, -1), (1, 1, 1)],
        ("or", true) => &[(-1, -1, -1), (-1, 1, 1), (1, -1, 1), (1, 1, 1)],
        _ => panic!("unknown op {op}"),
    };
    rows.iter().find(|r| r.0 == a && r.1 == b).expect("element outside the table").2
}

/// Left rotation: element `k` of the result is element `k + amount` of `v`.
pub fn rotate_left(v: &[i64], amount: usize) -> Vec<i64> {
    let d = v.len();
    (0..d).map(|k| v[(k + amount) % d]).collect()
}

/// Window sums of an n-gram encoding before quantization, plus the number
/// of windows.
pub fn window_sums(
    base: &[Vec<i64>],
    seq: &[usize],
    gram: usize,
    shift: usize,
    op: &str,
    bipolar: bool,
) -> (Vec<i64>, i64) {
    let d = base[0].len();
    let n = gram.min(seq.len());
    let mut sums = vec![0i64; d];
    let mut windows = 0;
    for start in 0..=(seq.len() - n) {
        // Position i (1-based) is rotated by (n - i) * shift.
        let mut acc = rotate_left(&base[seq[start]], (n - 1) * shift);
        for i in 2..=n {
            let next = rotate_left(&base[seq[start + i - 1]], (n - i) * shift);
            acc = acc.iter().zip(&next).map(|(&a, &b)| table(op, bipolar, a, b)).collect();
        }
        for (s, x) in sums.iter_mut().zip(&acc) {
            *s += x;
        }
        windows += 1;
    }
    (sums, windows)
}

/// Quantize one sum. `binary_regime` puts the threshold at half the number
/// of summands, otherwise at zero.
pub fn quantize(s: i64, count: i64, binary_regime: bool, target: &str) -> i64 {
    let w = count.max(1) as f64;
    let theta = if binary_regime { w / 2.0 } else { 0.0 };
    let s_f = s as f64;
    match target {
        "binary" => (s_f > theta) as i64,
        "bipolar" => {
            if s_f >= theta {
                1
            } else {
                -1
            }
        }
        "int8" => s.clamp(-128, 127),
        "int16" => s.clamp(-32768, 32767),
        "int32" => s.clamp(i32::MIN as i64, i32::MAX as i64),
        "int64" => s,
        _ => panic!("unknown dtype {target}"),
    }
}

pub fn encode(
    base: &[Vec<i64>],
    seq: &[usize],
    gram: usize,
    shift: usize,
    op: &str,
    bipolar: bool,
    target: &str,
) -> Vec<i64> {
    let (sums, count) = window_sums(base, seq, gram, shift, op, bipolar);
    sums.iter().map(|&s| quantize(s, count, !bipolar, target)).collect()
}

/// ROC-AUC by enumerating every positive/negative pair; ties count half.
pub fn auc_pairs(scores: &[f64], positive: &[bool]) -> f64 {
    let mut num = 0.0;
    let mut den = 0.0;
    for (i, &pi) in positive.iter().enumerate() {
        if !pi {
            continue;
        }
        for (j, &pj) in positive.iter().enumerate() {
            if pj {
                continue;
            }
            den += 1.0;
            if scores[i] > scores[j] {
                num += 1.0;
            } else if scores[i] == scores[j] {
                num += 0.5;
            }
        }
    }
    num / den
}
