//! Unimodular integer bilinear forms: validation, invariants, direct sums and
//! isomorphism testing.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::matrix::Matrix;
use crate::scalar::FieldScalar;
use crate::solver::{self, SearchConfig, Verdict};
use crate::IntMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Symmetry {
    Symmetric,
    Antisymmetric,
}

impl Symmetry {
    /// Symmetric iff the half-dimension is even.
    pub fn for_half_dimension(n: u32) -> Self {
        if n % 2 == 0 {
            Symmetry::Symmetric
        } else {
            Symmetry::Antisymmetric
        }
    }
}

impl fmt::Display for Symmetry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Symmetry::Symmetric => write!(f, "symmetric"),
            Symmetry::Antisymmetric => write!(f, "antisymmetric"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Even,
    Odd,
}

impl fmt::Display for Parity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Parity::Even => write!(f, "even"),
            Parity::Odd => write!(f, "odd"),
        }
    }
}

/// Counts of positive, negative and zero entries of a congruence-diagonal form.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct Signature {
    pub plus: usize,
    pub minus: usize,
    pub zero: usize,
}

impl Signature {
    pub fn new(plus: usize, minus: usize, zero: usize) -> Self {
        Signature { plus, minus, zero }
    }

    pub fn rank(&self) -> usize {
        self.plus + self.minus + self.zero
    }

    pub fn is_definite(&self) -> bool {
        self.zero == 0 && (self.plus == 0 || self.minus == 0) && self.rank() > 0
    }

    pub fn reversed(&self) -> Self {
        Signature { plus: self.minus, minus: self.plus, zero: self.zero }
    }
}

impl std::ops::Add for Signature {
    type Output = Signature;

    fn add(self, o: Signature) -> Signature {
        Signature { plus: self.plus + o.plus, minus: self.minus + o.minus, zero: self.zero + o.zero }
    }
}

impl fmt::Display for Signature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{})", self.plus, self.minus, self.zero)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FormError {
    #[error("NotSquare: matrix is {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("SymmetryMismatch: matrix is not {expected}")]
    SymmetryMismatch { expected: Symmetry },
    #[error("NotUnimodular: determinant is {det}, expected +1 or -1")]
    NotUnimodular { det: BigInt },
    #[error("AntisymmetricInput: signature is defined only for symmetric forms")]
    AntisymmetricInput,
}

/// A unimodular (anti)symmetric integer form with cached invariants.
#[derive(Clone, PartialEq, Eq)]
pub struct IntersectionForm {
    matrix: IntMatrix,
    symmetry: Symmetry,
    det: BigInt,
    signature: Option<Signature>,
    parity: Parity,
}

impl fmt::Debug for IntersectionForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "IntersectionForm({}, {:?})", self.symmetry, self.matrix)
    }
}

/// Validates `matrix` against `symmetry` and unimodularity and caches the
/// rank, signature (symmetric only) and parity.
pub fn make_form(matrix: IntMatrix, symmetry: Symmetry) -> Result<IntersectionForm, FormError> {
    if !matrix.is_square() {
        return Err(FormError::NotSquare { rows: matrix.rows(), cols: matrix.cols() });
    }
    let ok = match symmetry {
        Symmetry::Symmetric => matrix.is_symmetric(),
        Symmetry::Antisymmetric => matrix.is_antisymmetric(),
    };
    if !ok {
        return Err(FormError::SymmetryMismatch { expected: symmetry });
    }
    let det = matrix.det();
    if !det.abs().is_one() {
        return Err(FormError::NotUnimodular { det });
    }
    let signature = match symmetry {
        Symmetry::Symmetric => Some(congruence_signature(&matrix.to_rational())),
        Symmetry::Antisymmetric => None,
    };
    let parity = parity_of(&matrix);
    Ok(IntersectionForm { matrix, symmetry, det, signature, parity })
}

fn parity_of(matrix: &IntMatrix) -> Parity {
    if matrix.diagonal_entries().iter().all(|d| d.is_even()) {
        Parity::Even
    } else {
        Parity::Odd
    }
}

impl IntersectionForm {
    /// The 0x0 form, identity for direct sums.
    pub fn empty(symmetry: Symmetry) -> Self {
        make_form(Matrix::zeros(0, 0), symmetry).expect("empty form is valid")
    }

    pub fn from_rows(rows: &[&[i64]], symmetry: Symmetry) -> Result<Self, FormError> {
        make_form(crate::matrix::int_matrix(rows), symmetry)
    }

    pub fn matrix(&self) -> &IntMatrix {
        &self.matrix
    }

    pub fn symmetry(&self) -> Symmetry {
        self.symmetry
    }

    pub fn rank(&self) -> usize {
        self.matrix.rows()
    }

    pub fn det(&self) -> &BigInt {
        &self.det
    }

    pub fn entry(&self, i: usize, j: usize) -> &BigInt {
        &self.matrix[(i, j)]
    }

    pub fn signature(&self) -> Result<Signature, FormError> {
        self.signature.ok_or(FormError::AntisymmetricInput)
    }

    /// Even iff every diagonal entry is even. `b(x,x) ≡ Σ xᵢ² aᵢᵢ (mod 2)`
    /// makes the diagonal sufficient.
    pub fn parity(&self) -> Parity {
        self.parity
    }

    pub fn is_definite(&self) -> bool {
        self.signature.is_some_and(|s| s.is_definite())
    }

    pub fn is_positive_definite(&self) -> bool {
        self.signature.is_some_and(|s| s.is_definite() && s.minus == 0)
    }

    pub fn negated(&self) -> Self {
        make_form(self.matrix.neg(), self.symmetry).expect("negation preserves validity")
    }

    /// `Pᵀ·A·P` re-validated as a form; fails when `P` is not unimodular.
    pub fn transform(&self, p: &IntMatrix) -> Result<Self, FormError> {
        make_form(self.matrix.congruent(p), self.symmetry)
    }

    pub fn direct_sum(&self, other: &Self) -> Result<Self, FormError> {
        direct_sum(self, other)
    }
}

impl fmt::Display for IntersectionForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.matrix)
    }
}

pub fn signature(form: &IntersectionForm) -> Result<Signature, FormError> {
    form.signature()
}

pub fn parity(form: &IntersectionForm) -> Parity {
    form.parity()
}

/// Block-diagonal sum. An empty summand takes on the other's symmetry.
pub fn direct_sum(f: &IntersectionForm, g: &IntersectionForm) -> Result<IntersectionForm, FormError> {
    let symmetry = match (f.rank(), g.rank()) {
        (0, _) => g.symmetry,
        (_, 0) => f.symmetry,
        _ if f.symmetry != g.symmetry => {
            return Err(FormError::SymmetryMismatch { expected: f.symmetry });
        }
        _ => f.symmetry,
    };
    make_form(f.matrix.block_diag(&g.matrix), symmetry)
}

/// Diagonal of a congruence-diagonalization `Eᵀ·M·E` of a symmetric matrix
/// over an exact field. Zero pivots are dodged by a symmetric swap with a
/// later nonzero diagonal entry, or else by adding a later basis vector that
/// pairs nontrivially with the current one.
pub fn congruence_diagonal<F: FieldScalar>(m: &Matrix<F>) -> Vec<F> {
    assert!(m.is_square());
    let n = m.rows();
    let mut a = m.clone();
    let mut diag = Vec::with_capacity(n);
    for i in 0..n {
        if a[(i, i)].is_zero() {
            if let Some(j) = (i + 1..n).find(|&j| !a[(j, j)].is_zero()) {
                swap_symmetric(&mut a, i, j);
            } else if let Some(j) = (i + 1..n).find(|&j| !a[(i, j)].is_zero()) {
                // basis e_i <- e_i + e_j
                for c in 0..n {
                    let v = a[(i, c)].clone() + a[(j, c)].clone();
                    a[(i, c)] = v;
                }
                for r in 0..n {
                    let v = a[(r, i)].clone() + a[(r, j)].clone();
                    a[(r, i)] = v;
                }
            }
        }
        let pivot = a[(i, i)].clone();
        if !pivot.is_zero() {
            for j in i + 1..n {
                if a[(j, i)].is_zero() {
                    continue;
                }
                let f = a[(j, i)].clone() / pivot.clone();
                for c in 0..n {
                    let v = a[(j, c)].clone() - f.clone() * a[(i, c)].clone();
                    a[(j, c)] = v;
                }
                for r in 0..n {
                    let v = a[(r, j)].clone() - f.clone() * a[(r, i)].clone();
                    a[(r, j)] = v;
                }
            }
        }
        diag.push(pivot);
    }
    diag
}

fn swap_symmetric<F: Clone>(a: &mut Matrix<F>, i: usize, j: usize) {
    a.swap_rows(i, j);
    for r in 0..a.rows() {
        let t = a[(r, i)].clone();
        a[(r, i)] = a[(r, j)].clone();
        a[(r, j)] = t;
    }
}

/// Sylvester signature of a symmetric matrix by exact congruence
/// diagonalization.
pub fn congruence_signature<F: FieldScalar>(m: &Matrix<F>) -> Signature {
    let mut s = Signature::default();
    for d in congruence_diagonal(m) {
        if d.is_positive() {
            s.plus += 1;
        } else if d.is_negative() {
            s.minus += 1;
        } else {
            s.zero += 1;
        }
    }
    s
}

/// Why two forms were shown non-isomorphic.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum IsoObstruction {
    Symmetry,
    Rank,
    Signature,
    Parity,
    ExhaustiveDefinite,
}

/// How an isomorphism claim was established.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum IsoBasis {
    /// An explicit change of basis was found and verified.
    Witness,
    /// Indefinite symmetric forms are classified by rank, signature and
    /// parity; antisymmetric unimodular forms by rank alone.
    Classification,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Isomorphism {
    /// `witness`, when present, is a unimodular `P` with `Pᵀ·f·P = g`.
    Isomorphic { witness: Option<IntMatrix>, basis: IsoBasis },
    NotIsomorphic(IsoObstruction),
    /// Definite forms above the configured rank cap are not enumerated.
    CapExceeded { rank: usize },
}

impl Isomorphism {
    pub fn is_isomorphic(&self) -> bool {
        matches!(self, Isomorphism::Isomorphic { .. })
    }

    pub fn witness(&self) -> Option<&IntMatrix> {
        match self {
            Isomorphism::Isomorphic { witness, .. } => witness.as_ref(),
            _ => None,
        }
    }
}

/// Decides whether `f` and `g` are isomorphic, with a witness `P`
/// (`Pᵀ·f·P = g`) whenever one is found.
///
/// Indefinite and antisymmetric forms are decided by invariants, with a
/// bounded search only to exhibit a witness. Definite forms go through the
/// complete enumeration of the congruence solver at `k = 1`.
pub fn isomorphic(f: &IntersectionForm, g: &IntersectionForm, cfg: &SearchConfig) -> Isomorphism {
    if f.rank() != g.rank() {
        return Isomorphism::NotIsomorphic(IsoObstruction::Rank);
    }
    if f.rank() == 0 {
        return Isomorphism::Isomorphic { witness: Some(Matrix::zeros(0, 0)), basis: IsoBasis::Witness };
    }
    if f.symmetry != g.symmetry {
        return Isomorphism::NotIsomorphic(IsoObstruction::Symmetry);
    }
    if f.matrix == g.matrix {
        return Isomorphism::Isomorphic { witness: Some(Matrix::identity(f.rank())), basis: IsoBasis::Witness };
    }
    if f.symmetry == Symmetry::Symmetric {
        if f.parity != g.parity {
            return Isomorphism::NotIsomorphic(IsoObstruction::Parity);
        }
        if f.signature != g.signature {
            return Isomorphism::NotIsomorphic(IsoObstruction::Signature);
        }
    }
    let definite = f.is_definite();
    if definite && f.rank() > cfg.definite_cap {
        return Isomorphism::CapExceeded { rank: f.rank() };
    }
    let one = BigInt::one();
    let verdict = solver::congruence_solve(f, g, &one, cfg).expect("forms share symmetry and k = 1");
    match verdict {
        Verdict::Yes(w) => Isomorphism::Isomorphic { witness: Some(w.into_matrix()), basis: IsoBasis::Witness },
        Verdict::No(_) if definite => Isomorphism::NotIsomorphic(IsoObstruction::ExhaustiveDefinite),
        // Invariants already agree: indefinite and antisymmetric classes are
        // determined by them, so a failed bounded search is not a No.
        _ if !definite => Isomorphism::Isomorphic { witness: None, basis: IsoBasis::Classification },
        Verdict::No(reason) => unreachable!("definite search reported {reason:?} after invariants agreed"),
        Verdict::Unknown(_) => Isomorphism::CapExceeded { rank: f.rank() },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::int_matrix;
    use num_rational::BigRational;

    fn sym(rows: &[&[i64]]) -> IntersectionForm {
        IntersectionForm::from_rows(rows, Symmetry::Symmetric).unwrap()
    }

    fn hyperbolic(l: usize) -> IntersectionForm {
        (0..l).fold(IntersectionForm::empty(Symmetry::Symmetric), |acc, _| {
            direct_sum(&acc, &sym(&[&[0, 1], &[1, 0]])).unwrap()
        })
    }

    #[test]
    fn make_form_examples() {
        let i1 = sym(&[&[1]]);
        assert_eq!(i1.parity(), Parity::Odd);
        assert_eq!(i1.signature().unwrap(), Signature::new(1, 0, 0));

        let a1 = sym(&[&[0, 1], &[1, 0]]);
        assert_eq!(a1.parity(), Parity::Even);
        assert_eq!(a1.signature().unwrap(), Signature::new(1, 1, 0));

        let err = IntersectionForm::from_rows(&[&[1, 0], &[0, 2]], Symmetry::Symmetric).unwrap_err();
        assert_eq!(err, FormError::NotUnimodular { det: BigInt::from(2) });
    }

    #[test]
    fn make_form_rejects_bad_shape_and_symmetry() {
        let err = make_form(int_matrix(&[&[1, 0]]), Symmetry::Symmetric).unwrap_err();
        assert!(matches!(err, FormError::NotSquare { rows: 1, cols: 2 }));
        let err = make_form(int_matrix(&[&[0, 1], &[1, 0]]), Symmetry::Antisymmetric).unwrap_err();
        assert!(matches!(err, FormError::SymmetryMismatch { .. }));
        let j = make_form(int_matrix(&[&[0, 1], &[-1, 0]]), Symmetry::Antisymmetric).unwrap();
        assert_eq!(j.signature(), Err(FormError::AntisymmetricInput));
        assert_eq!(j.parity(), Parity::Even);
    }

    #[test]
    fn signature_examples() {
        assert_eq!(sym(&[&[1, 0], &[0, -1]]).signature().unwrap(), Signature::new(1, 1, 0));
        assert_eq!(sym(&[&[1, 0], &[0, 1]]).signature().unwrap(), Signature::new(2, 0, 0));
        assert_eq!(hyperbolic(3).signature().unwrap(), Signature::new(3, 3, 0));
    }

    #[test]
    fn signature_of_degenerate_matrix_counts_zeros() {
        let m: Matrix<BigRational> = int_matrix(&[&[0, 0, 0], &[0, 0, 2], &[0, 2, 0]]).to_rational();
        assert_eq!(congruence_signature(&m), Signature::new(1, 1, 1));
    }

    #[test]
    fn parity_examples() {
        assert_eq!(hyperbolic(1).parity(), Parity::Even);
        assert_eq!(sym(&[&[1]]).parity(), Parity::Odd);
        assert_eq!(sym(&[&[1, 0], &[0, -1]]).parity(), Parity::Odd);
    }

    #[test]
    fn direct_sum_examples() {
        let b = direct_sum(&sym(&[&[1]]), &sym(&[&[-1]])).unwrap();
        assert_eq!(b.matrix(), &int_matrix(&[&[1, 0], &[0, -1]]));
        let a3 = hyperbolic(3);
        assert_eq!(a3.rank(), 6);
        assert_eq!(a3.entry(4, 5), &BigInt::from(1));
        let f = sym(&[&[2, 1], &[1, 1]]);
        assert_eq!(direct_sum(&f, &IntersectionForm::empty(Symmetry::Symmetric)).unwrap(), f);
        let j = make_form(int_matrix(&[&[0, 1], &[-1, 0]]), Symmetry::Antisymmetric).unwrap();
        assert!(direct_sum(&f, &j).is_err());
        assert_eq!(direct_sum(&IntersectionForm::empty(Symmetry::Symmetric), &j).unwrap(), j);
    }

    #[test]
    fn isomorphic_examples() {
        let cfg = SearchConfig::default();
        let b = sym(&[&[1, 0], &[0, -1]]);
        let a1 = hyperbolic(1);
        assert_eq!(isomorphic(&b, &a1, &cfg), Isomorphism::NotIsomorphic(IsoObstruction::Parity));

        let f = sym(&[&[2, 1], &[1, 1]]);
        let same = isomorphic(&f, &f, &cfg);
        assert_eq!(same.witness(), Some(&Matrix::identity(2)));

        let i2 = sym(&[&[1, 0], &[0, 1]]);
        let reordered = i2.transform(&int_matrix(&[&[0, 1], &[1, 0]])).unwrap();
        let iso = isomorphic(&i2, &reordered, &cfg);
        let p = iso.witness().expect("definite isomorphism has a witness");
        assert_eq!(i2.matrix().congruent(p), *reordered.matrix());

        // I_2 and [[2,1],[1,1]] are both positive definite, odd, rank 2.
        let iso = isomorphic(&i2, &f, &cfg);
        let p = iso.witness().unwrap();
        assert_eq!(i2.matrix().congruent(p), *f.matrix());
    }

    #[test]
    fn opposite_definite_forms_differ_by_signature() {
        let cfg = SearchConfig::default();
        let neg = sym(&[&[-1, 0], &[0, -1]]);
        let pos = sym(&[&[1, 0], &[0, 1]]);
        assert_eq!(isomorphic(&neg, &pos, &cfg), Isomorphism::NotIsomorphic(IsoObstruction::Signature));
    }

    #[test]
    fn indefinite_by_classification() {
        let cfg = SearchConfig::default();
        let f = sym(&[&[1, 0, 0], &[0, 1, 0], &[0, 0, -1]]);
        let g = f.transform(&int_matrix(&[&[1, 1, 0], &[0, 1, 1], &[0, 0, 1]])).unwrap();
        assert!(isomorphic(&f, &g, &cfg).is_isomorphic());
    }

    #[test]
    fn antisymmetric_by_rank() {
        let cfg = SearchConfig::default();
        let j = make_form(int_matrix(&[&[0, 1], &[-1, 0]]), Symmetry::Antisymmetric).unwrap();
        let j2 = make_form(int_matrix(&[&[0, -1], &[1, 0]]), Symmetry::Antisymmetric).unwrap();
        let iso = isomorphic(&j, &j2, &cfg);
        assert!(iso.is_isomorphic());
        if let Some(p) = iso.witness() {
            assert_eq!(j.matrix().congruent(p), *j2.matrix());
        }
    }
}
