//! Complete enumeration of `{x ≠ 0 : xᵀ·G·x = N}` for positive definite `G`.
//!
//! `G = Rᵀ·D·R` with `R` unit upper triangular over the rationals, so
//! `xᵀGx = Σᵢ dᵢ (xᵢ + Σ_{j>i} r_ij x_j)²`. Coordinates are fixed from the
//! last one down, each confined to the interval its remaining budget allows.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

use super::Budget;
use crate::matrix::Matrix;
use crate::scalar::search_order_key;
use crate::IntMatrix;

pub(crate) struct Aborted;

/// Every nonzero `x` with `xᵀ·G·x = target`, sorted by max-norm and then
/// lexicographically in the order 0, 1, -1, 2, -2, ...
pub(crate) fn representations(g: &IntMatrix, target: &BigInt, budget: &Budget) -> Result<Vec<Vec<BigInt>>, Aborted> {
    let n = g.rows();
    if !target.is_positive() || n == 0 {
        return Ok(Vec::new());
    }
    let (d, r) = ldl(&g.to_rational());
    debug_assert!(d.iter().all(Signed::is_positive), "form is not positive definite");
    let mut out = Vec::new();
    let mut x = vec![BigInt::zero(); n];
    let target = BigRational::from_integer(target.clone());
    descend(n - 1, &d, &r, &mut x, target, &mut out, budget)?;
    out.sort_by_cached_key(|v| {
        let maxabs = v.iter().map(|c| c.abs()).max().unwrap_or_default();
        let key: Vec<(u64, bool)> = v
            .iter()
            .map(|c| search_order_key(i64::try_from(c).expect("short vector coordinate fits i64")))
            .collect();
        (maxabs, key)
    });
    Ok(out)
}

fn ldl(g: &Matrix<BigRational>) -> (Vec<BigRational>, Matrix<BigRational>) {
    let n = g.rows();
    let mut a = g.clone();
    let mut r = Matrix::<BigRational>::identity(n);
    let mut d = Vec::with_capacity(n);
    for i in 0..n {
        let di = a[(i, i)].clone();
        for j in i + 1..n {
            r[(i, j)] = a[(i, j)].clone() / di.clone();
        }
        for j in i + 1..n {
            for k in i + 1..n {
                let v = a[(j, k)].clone() - di.clone() * r[(i, j)].clone() * r[(i, k)].clone();
                a[(j, k)] = v;
            }
        }
        d.push(di);
    }
    (d, r)
}

fn descend(
    i: usize,
    d: &[BigRational],
    r: &Matrix<BigRational>,
    x: &mut Vec<BigInt>,
    remaining: BigRational,
    out: &mut Vec<Vec<BigInt>>,
    budget: &Budget,
) -> Result<(), Aborted> {
    if !budget.tick() {
        return Err(Aborted);
    }
    let n = x.len();
    let mut center = BigRational::zero();
    for j in i + 1..n {
        center -= r[(i, j)].clone() * BigRational::from_integer(x[j].clone());
    }
    let ratio = remaining.clone() / d[i].clone();
    let s: BigInt = ratio.floor().to_integer().sqrt();
    let lo: BigInt = center.floor().to_integer() - &s - 1;
    let hi: BigInt = center.ceil().to_integer() + &s + 1;
    let mut v = lo;
    while v <= hi {
        let diff = BigRational::from_integer(v.clone()) - center.clone();
        let used = d[i].clone() * diff.clone() * diff;
        if used <= remaining {
            x[i] = v.clone();
            let rest = remaining.clone() - used;
            if i == 0 {
                if rest.is_zero() && x.iter().any(|c| !c.is_zero()) {
                    out.push(x.clone());
                }
            } else {
                descend(i - 1, d, r, x, rest, out, budget)?;
            }
        }
        v += 1;
    }
    x[i] = BigInt::zero();
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::int_matrix;

    fn reps(g: &IntMatrix, t: i64) -> Vec<Vec<i64>> {
        let budget = Budget::new(1_000_000);
        representations(g, &BigInt::from(t), &budget)
            .ok()
            .unwrap()
            .into_iter()
            .map(|v| v.iter().map(|c| i64::try_from(c).unwrap()).collect())
            .collect()
    }

    /// Independent count over a box. The least eigenvalue of the test form is
    /// 2 - √2 > 1/2, so |x|² < 2t and radius 6 covers every t <= 12.
    fn brute(g: &[[i64; 3]; 3], t: i64, r: i64) -> usize {
        let mut count = 0;
        for a in -r..=r {
            for b in -r..=r {
                for c in -r..=r {
                    let x = [a, b, c];
                    let mut q = 0;
                    for i in 0..3 {
                        for j in 0..3 {
                            q += g[i][j] * x[i] * x[j];
                        }
                    }
                    if q == t && x != [0, 0, 0] {
                        count += 1;
                    }
                }
            }
        }
        count
    }

    #[test]
    fn sums_of_squares() {
        let i2 = int_matrix(&[&[1, 0], &[0, 1]]);
        assert_eq!(reps(&i2, 5).len(), 8);
        assert_eq!(reps(&i2, 3).len(), 0);
        assert_eq!(reps(&i2, 1), vec![vec![0, 1], vec![0, -1], vec![1, 0], vec![-1, 0]]);
    }

    #[test]
    fn matches_box_count_on_skew_form() {
        let g = [[2, 1, 0], [1, 2, 1], [0, 1, 2]];
        let m = int_matrix(&[&[2, 1, 0], &[1, 2, 1], &[0, 1, 2]]);
        for t in 1..=12 {
            assert_eq!(reps(&m, t).len(), brute(&g, t, 6), "t = {t}");
        }
    }

    #[test]
    fn nonpositive_target_is_empty() {
        let i1 = int_matrix(&[&[1]]);
        assert!(reps(&i1, 0).is_empty());
        assert!(reps(&i1, -4).is_empty());
    }
}
