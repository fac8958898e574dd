//! Complete pre-filters. Each one, when it fires, is a proof that
//! `Pᵀ·A·P = k·B` has no integer solution.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive};

use super::modular::solvable_mod;
use super::{NoReason, SearchConfig};
use crate::intform::{IntersectionForm, Parity, Symmetry};
use crate::scalar::exact_sqrt;

/// Largest residue-space size per column the local filters will enumerate.
const LOCAL_VECTOR_LIMIT: u64 = 1 << 20;
const LOCAL_NODE_LIMIT: u64 = 2_000_000;

/// Runs the filters in order (rank, signature, parity, determinant, mod 2,
/// then higher local moduli) and returns the first that fires.
pub fn first_obstruction(
    a: &IntersectionForm,
    b: &IntersectionForm,
    k: &BigInt,
    cfg: &SearchConfig,
) -> Option<NoReason> {
    let (m, l) = (a.rank(), b.rank());

    // The image of P carries a nondegenerate form, so P has full column rank.
    if l > m {
        return Some(NoReason::RankFilter);
    }

    if cfg.signature_filter && a.symmetry() == Symmetry::Symmetric {
        let sa = a.signature().expect("symmetric");
        let mut sb = b.signature().expect("symmetric");
        if k.is_negative() {
            sb = sb.reversed();
        }
        if sb.plus > sa.plus || sb.minus > sa.minus {
            return Some(NoReason::SignatureFilter);
        }
    }

    // k·b_ii = Σ a_rs p_ri p_si is even whenever A is even.
    if a.symmetry() == Symmetry::Symmetric
        && a.parity() == Parity::Even
        && b.parity() == Parity::Odd
        && k.is_odd()
    {
        return Some(NoReason::ParityFilter);
    }

    // det(P)² = k^l · det(B) / det(A), and det(A) = ±1.
    if m == l {
        let rhs = k.pow(l as u32) * b.det() * a.det();
        if exact_sqrt(&rhs).is_none() {
            return Some(NoReason::DeterminantFilter);
        }
    }

    if cfg.local_filters && m <= cfg.definite_cap {
        for modulus in local_moduli(k) {
            if modulus.checked_pow(m as u32).is_none_or(|size| size > LOCAL_VECTOR_LIMIT) {
                continue;
            }
            let target = b.matrix().scale(k);
            if solvable_mod(a.matrix(), &target, modulus, LOCAL_NODE_LIMIT) == Some(false) {
                return Some(if modulus == 2 {
                    NoReason::Mod2Filter
                } else {
                    NoReason::CongruenceFilter { modulus }
                });
            }
        }
    }
    None
}

/// 2, then `2^(v₂(k)+3)`, then `p^(v_p(k)+1)` for each odd prime `p | k`.
fn local_moduli(k: &BigInt) -> Vec<u64> {
    let mut out = vec![2];
    let Some(mut n) = k.abs().to_u64() else {
        return out;
    };
    let v2 = n.trailing_zeros();
    n >>= v2;
    if let Some(m) = 2u64.checked_pow(v2 + 3) {
        out.push(m);
    }
    let mut p = 3;
    while p * p <= n {
        if n % p == 0 {
            let mut e = 0;
            while n % p == 0 {
                n /= p;
                e += 1;
            }
            if let Some(m) = p.checked_pow(e + 1) {
                out.push(m);
            }
        }
        p += 2;
    }
    if n > 1 {
        if let Some(m) = n.checked_mul(n) {
            out.push(m);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sym(rows: &[&[i64]]) -> IntersectionForm {
        IntersectionForm::from_rows(rows, Symmetry::Symmetric).unwrap()
    }

    fn run(a: &IntersectionForm, b: &IntersectionForm, k: i64) -> Option<NoReason> {
        first_obstruction(a, b, &BigInt::from(k), &SearchConfig::default())
    }

    #[test]
    fn moduli_for_small_k() {
        assert_eq!(local_moduli(&BigInt::from(1)), vec![2, 8]);
        assert_eq!(local_moduli(&BigInt::from(-4)), vec![2, 32]);
        assert_eq!(local_moduli(&BigInt::from(12)), vec![2, 32, 9]);
        assert_eq!(local_moduli(&BigInt::from(5)), vec![2, 8, 25]);
    }

    #[test]
    fn rank_filter() {
        assert_eq!(run(&sym(&[&[1]]), &sym(&[&[0, 1], &[1, 0]]), 1), Some(NoReason::RankFilter));
    }

    #[test]
    fn signature_filter_respects_sign_of_k() {
        let a1 = sym(&[&[0, 1], &[1, 0]]);
        let i2 = sym(&[&[1, 0], &[0, 1]]);
        assert_eq!(run(&a1, &i2, 2), Some(NoReason::SignatureFilter));
        assert_eq!(run(&a1, &i2, -2), Some(NoReason::SignatureFilter));
        let i1 = sym(&[&[1]]);
        let m1 = sym(&[&[-1]]);
        assert_eq!(run(&i1, &m1, 1), Some(NoReason::SignatureFilter));
        assert_eq!(run(&i1, &m1, -1), None);
    }

    #[test]
    fn parity_filter() {
        let a1 = sym(&[&[0, 1], &[1, 0]]);
        let b = sym(&[&[1, 0], &[0, -1]]);
        assert_eq!(run(&a1, &b, 3), Some(NoReason::ParityFilter));
        assert_eq!(run(&a1, &b, 2), None);
    }

    #[test]
    fn determinant_filter() {
        let i3 = sym(&[&[1, 0, 0], &[0, 1, 0], &[0, 0, 1]]);
        assert_eq!(run(&i3, &i3, 2), Some(NoReason::DeterminantFilter));
        assert_eq!(run(&i3, &i3, 4), None);
        let b = sym(&[&[1, 0], &[0, -1]]);
        // det(P)² = k² · (-1) · (-1) is a square for every k.
        assert_eq!(run(&b, &b, 3), None);
    }

    #[test]
    fn mod2_filter_catches_odd_degrees_into_even_targets() {
        let b = sym(&[&[1, 0], &[0, -1]]);
        let a1 = sym(&[&[0, 1], &[1, 0]]);
        assert_eq!(run(&b, &a1, 1), Some(NoReason::Mod2Filter));
        assert_eq!(run(&b, &a1, 2), None);
    }

    #[test]
    fn two_adic_filter() {
        // x² - y² = 2 has no solution modulo 4.
        let b = sym(&[&[1, 0], &[0, -1]]);
        let i1 = sym(&[&[1]]);
        assert_eq!(run(&b, &i1, 2), Some(NoReason::CongruenceFilter { modulus: 16 }));
    }
}
