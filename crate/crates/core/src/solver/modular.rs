//! Exhaustive residue search for `Pᵀ·A·P ≡ T (mod N)`.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::ToPrimitive;

use crate::IntMatrix;

/// `Some(true)` if some `P` solves `Pᵀ·A·P ≡ target (mod modulus)`,
/// `Some(false)` if none does, `None` if the search exceeded `node_limit`.
///
/// A `Some(false)` is a proof that the integer equation has no solution.
pub fn solvable_mod(a: &IntMatrix, target: &IntMatrix, modulus: u64, node_limit: u64) -> Option<bool> {
    assert!(modulus >= 2 && modulus < (1 << 31), "modulus out of range");
    let m = a.rows();
    let l = target.rows();
    if l == 0 {
        return Some(true);
    }
    let n = modulus as i64;
    let red = |x: &BigInt| -> i64 { x.mod_floor(&BigInt::from(n)).to_i64().expect("reduced") };
    let a: Vec<Vec<i64>> = (0..m).map(|i| (0..m).map(|j| red(&a[(i, j)])).collect()).collect();
    let t: Vec<Vec<i64>> = (0..l).map(|i| (0..l).map(|j| red(&target[(i, j)])).collect()).collect();

    let total = (modulus as u128).checked_pow(m as u32)?;
    if total > node_limit as u128 {
        return None;
    }

    // Residue vectors grouped by their quadratic value.
    let mut by_norm: HashMap<i64, Vec<Vec<i64>>> = HashMap::new();
    let mut x = vec![0i64; m];
    loop {
        let q = quad(&a, &x, n);
        by_norm.entry(q).or_default().push(x.clone());
        if !increment(&mut x, n) {
            break;
        }
    }

    let mut nodes = 0u64;
    let mut chosen: Vec<Vec<i64>> = Vec::with_capacity(l);
    dfs(&a, &t, n, &by_norm, &mut chosen, &mut nodes, node_limit)
}

fn quad(a: &[Vec<i64>], x: &[i64], n: i64) -> i64 {
    let mut s = 0i64;
    for (i, row) in a.iter().enumerate() {
        if x[i] == 0 {
            continue;
        }
        let mut r = 0i64;
        for (j, &aij) in row.iter().enumerate() {
            r = (r + aij * x[j]) % n;
        }
        s = (s + x[i] * r) % n;
    }
    s
}

fn bilinear(a: &[Vec<i64>], x: &[i64], y: &[i64], n: i64) -> i64 {
    let mut s = 0i64;
    for (i, row) in a.iter().enumerate() {
        if x[i] == 0 {
            continue;
        }
        let mut r = 0i64;
        for (j, &aij) in row.iter().enumerate() {
            r = (r + aij * y[j]) % n;
        }
        s = (s + x[i] * r) % n;
    }
    s
}

fn increment(x: &mut [i64], n: i64) -> bool {
    for v in x.iter_mut().rev() {
        *v += 1;
        if *v < n {
            return true;
        }
        *v = 0;
    }
    false
}

fn dfs(
    a: &[Vec<i64>],
    t: &[Vec<i64>],
    n: i64,
    by_norm: &HashMap<i64, Vec<Vec<i64>>>,
    chosen: &mut Vec<Vec<i64>>,
    nodes: &mut u64,
    limit: u64,
) -> Option<bool> {
    let col = chosen.len();
    if col == t.len() {
        return Some(true);
    }
    let Some(cands) = by_norm.get(&t[col][col]) else {
        return Some(false);
    };
    for x in cands {
        *nodes += 1;
        if *nodes > limit {
            return None;
        }
        // pᵢᵀ·A·pⱼ ≡ t_ij for j < i
        if chosen.iter().enumerate().all(|(j, y)| bilinear(a, x, y, n) == t[col][j]) {
            chosen.push(x.clone());
            let r = dfs(a, t, n, by_norm, chosen, nodes, limit);
            chosen.pop();
            match r {
                Some(false) => {}
                other => return other,
            }
        }
    }
    Some(false)
}
