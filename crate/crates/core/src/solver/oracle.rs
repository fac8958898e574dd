//! Naive reference search used to cross-check the kernel in tests.
//!
//! Every vector of the box `[-bound, bound]^m` is scored by its quadratic
//! value with a plain double loop; columns are then matched by direct
//! evaluation of `xᵀ·A·y`. No filters, no pruning, no column reordering.
//! Together with the column matching this visits every `P` in the box, so a
//! `NoWithinBound` is exact for that box.

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use thiserror::Error;

use crate::IntMatrix;

/// Largest box `(2·bound+1)^m` the oracle will materialize.
pub const ORACLE_VECTOR_LIMIT: u64 = 10_000_000;
const ORACLE_NODE_LIMIT: u64 = 200_000_000;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OracleVerdict {
    Yes(IntMatrix),
    NoWithinBound,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("BudgetExceeded: {0}")]
    BudgetExceeded(String),
}

/// Searches every `P` with `|p_ij| <= bound` for `Pᵀ·A·P = k·B`.
pub fn brute_force_oracle(a: &IntMatrix, b: &IntMatrix, k: &BigInt, bound: u32) -> Result<OracleVerdict, OracleError> {
    let m = a.rows();
    let l = b.rows();
    let side = 2 * u64::from(bound) + 1;
    match side.checked_pow(m as u32) {
        Some(n) if n <= ORACLE_VECTOR_LIMIT => {}
        _ => {
            return Err(OracleError::BudgetExceeded(format!("box of side {side} in dimension {m}")));
        }
    }
    let to128 = |x: &BigInt| -> Result<i128, OracleError> {
        x.to_i128().ok_or_else(|| OracleError::BudgetExceeded("entry exceeds i128".into()))
    };
    let mut a128 = vec![vec![0i128; m]; m];
    for (i, row) in a128.iter_mut().enumerate() {
        for (j, v) in row.iter_mut().enumerate() {
            *v = to128(&a[(i, j)])?;
        }
    }
    let k128 = to128(k)?;
    let mut t = vec![vec![0i128; l]; l];
    for (i, row) in t.iter_mut().enumerate() {
        for (j, v) in row.iter_mut().enumerate() {
            *v = k128 * to128(&b[(i, j)])?;
        }
    }

    let bound = i64::from(bound);
    let mut columns: Vec<Vec<Vec<i64>>> = vec![Vec::new(); l];
    let mut x = vec![-bound; m];
    loop {
        let q = form(&a128, &x, &x);
        for (j, col) in columns.iter_mut().enumerate() {
            if q == t[j][j] {
                col.push(x.clone());
            }
        }
        if !next(&mut x, bound) {
            break;
        }
    }
    for col in &mut columns {
        col.sort_by_key(|v| v.iter().map(|c| c.abs()).max().unwrap_or(0));
    }

    let mut chosen: Vec<&Vec<i64>> = Vec::with_capacity(l);
    let mut nodes = 0u64;
    if extend(&a128, &t, &columns, &mut chosen, &mut nodes)? {
        let mut p = IntMatrix::zeros(m, l);
        for (j, v) in chosen.iter().enumerate() {
            for (i, c) in v.iter().enumerate() {
                p[(i, j)] = BigInt::from(*c);
            }
        }
        Ok(OracleVerdict::Yes(p))
    } else {
        Ok(OracleVerdict::NoWithinBound)
    }
}

fn form(a: &[Vec<i128>], x: &[i64], y: &[i64]) -> i128 {
    let mut s = 0i128;
    for i in 0..x.len() {
        for j in 0..y.len() {
            s += a[i][j] * i128::from(x[i]) * i128::from(y[j]);
        }
    }
    s
}

fn next(x: &mut [i64], bound: i64) -> bool {
    for v in x.iter_mut().rev() {
        if *v < bound {
            *v += 1;
            return true;
        }
        *v = -bound;
    }
    false
}

fn extend<'c>(
    a: &[Vec<i128>],
    t: &[Vec<i128>],
    columns: &'c [Vec<Vec<i64>>],
    chosen: &mut Vec<&'c Vec<i64>>,
    nodes: &mut u64,
) -> Result<bool, OracleError> {
    let j = chosen.len();
    if j == columns.len() {
        return Ok(true);
    }
    for v in &columns[j] {
        *nodes += 1;
        if *nodes > ORACLE_NODE_LIMIT {
            return Err(OracleError::BudgetExceeded("column matching node limit".into()));
        }
        if chosen.iter().enumerate().all(|(i, u)| form(a, u, v) == t[i][j]) {
            chosen.push(v);
            if extend(a, t, columns, chosen, nodes)? {
                return Ok(true);
            }
            chosen.pop();
        }
    }
    Ok(false)
}
