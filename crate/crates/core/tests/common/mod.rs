//! Random unimodular forms for property and acceptance tests.

#![allow(dead_code)]

use degmap::intform::make_form;
use degmap::matrix::int_matrix;
use degmap::{IntMatrix, IntersectionForm, Symmetry};
use num_bigint::BigInt;
use rand::Rng;

/// Standard unimodular forms of rank 1 to 3.
pub fn base_forms(rank: usize) -> Vec<IntMatrix> {
    match rank {
        1 => vec![int_matrix(&[&[1]]), int_matrix(&[&[-1]])],
        2 => vec![
            int_matrix(&[&[1, 0], &[0, 1]]),
            int_matrix(&[&[-1, 0], &[0, -1]]),
            int_matrix(&[&[1, 0], &[0, -1]]),
            int_matrix(&[&[0, 1], &[1, 0]]),
        ],
        3 => vec![
            int_matrix(&[&[1, 0, 0], &[0, 1, 0], &[0, 0, 1]]),
            int_matrix(&[&[-1, 0, 0], &[0, -1, 0], &[0, 0, -1]]),
            int_matrix(&[&[1, 0, 0], &[0, 1, 0], &[0, 0, -1]]),
            int_matrix(&[&[1, 0, 0], &[0, -1, 0], &[0, 0, -1]]),
            int_matrix(&[&[0, 1, 0], &[1, 0, 0], &[0, 0, 1]]),
            int_matrix(&[&[0, 1, 0], &[1, 0, 0], &[0, 0, -1]]),
        ],
        _ => panic!("rank {rank} not supported"),
    }
}

/// A product of `steps` elementary column operations `c_j += ±c_i`.
pub fn random_unimodular<R: Rng>(rng: &mut R, n: usize, steps: usize) -> IntMatrix {
    let mut u = IntMatrix::identity(n);
    if n < 2 {
        return u;
    }
    for _ in 0..steps {
        let i = rng.gen_range(0..n);
        let mut j = rng.gen_range(0..n - 1);
        if j >= i {
            j += 1;
        }
        let s = BigInt::from(if rng.gen_bool(0.5) { 1 } else { -1 });
        for r in 0..n {
            let v = u[(r, i)].clone() * &s;
            u[(r, j)] += v;
        }
    }
    u
}

/// A random symmetric unimodular form of the given rank in a random basis.
pub fn random_form<R: Rng>(rng: &mut R, rank: usize) -> IntersectionForm {
    let bases = base_forms(rank);
    let a = &bases[rng.gen_range(0..bases.len())];
    let steps = rng.gen_range(0..=2);
    let u = random_unimodular(rng, rank, steps);
    make_form(a.congruent(&u), Symmetry::Symmetric).expect("congruent to a unimodular form")
}

pub fn random_k<R: Rng>(rng: &mut R, max: i64) -> BigInt {
    let k = rng.gen_range(1..=max);
    BigInt::from(if rng.gen_bool(0.5) { k } else { -k })
}
