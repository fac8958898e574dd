//! The decision kernel for `Pᵀ·A·P = k·B` over the integers.
//!
//! [`congruence_solve`] first runs a set of complete pre-filters (any one of
//! them firing is a proof that no integer `P` exists), then searches column
//! by column. Definite `A` has finitely many candidate columns, so an
//! exhausted search is a proof of No; indefinite `A` is searched in a box of
//! fixed radius and an exhausted box is reported as [`Verdict::Unknown`].

mod definite;
mod filters;
mod kernel;
mod modular;
mod oracle;

use std::fmt;
use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::intform::IntersectionForm;
use crate::matrix::Matrix;
use crate::IntMatrix;

pub use filters::first_obstruction;
pub use modular::solvable_mod;
pub use oracle::{brute_force_oracle, OracleError, OracleVerdict, ORACLE_VECTOR_LIMIT};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchConfig {
    /// Max absolute entry of `P` for indefinite search.
    pub radius: u32,
    /// Max rank for complete definite enumeration.
    pub definite_cap: usize,
    /// Max backtracking nodes across all workers.
    pub node_budget: u64,
    pub workers: usize,
    /// Sylvester inertia filter. Sound: the image of `P` carries `k·B`.
    pub signature_filter: bool,
    /// Exhaustive residue searches modulo 2, 2-powers and primes dividing `k`.
    pub local_filters: bool,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            radius: 8,
            definite_cap: 12,
            node_budget: 10_000_000,
            workers: 1,
            signature_filter: true,
            local_filters: true,
        }
    }
}

impl SearchConfig {
    pub fn with_radius(mut self, radius: u32) -> Self {
        self.radius = radius;
        self
    }

    pub fn with_budget(mut self, node_budget: u64) -> Self {
        self.node_budget = node_budget;
        self
    }

    pub fn with_workers(mut self, workers: usize) -> Self {
        self.workers = workers;
        self
    }

    pub fn validate(&self) -> Result<(), SolveError> {
        if self.radius == 0 || self.definite_cap == 0 || self.node_budget == 0 || self.workers == 0 {
            return Err(SolveError::InvalidConfig(
                "radius, definite_cap, node_budget and workers must all be positive".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SolveError {
    #[error("SymmetryMismatch: source and target forms differ in symmetry")]
    SymmetryMismatch,
    #[error("ZeroK: degree 0 is realized by a constant map and is not searched")]
    ZeroK,
    #[error("InvalidConfig: {0}")]
    InvalidConfig(String),
}

/// A complete argument that no integer solution exists.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum NoReason {
    RankFilter,
    SignatureFilter,
    ParityFilter,
    DeterminantFilter,
    Mod2Filter,
    /// No solution modulo `modulus`.
    CongruenceFilter { modulus: u64 },
    ExhaustiveDefinite,
}

impl fmt::Display for NoReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NoReason::RankFilter => write!(f, "RankFilter"),
            NoReason::SignatureFilter => write!(f, "SignatureFilter"),
            NoReason::ParityFilter => write!(f, "ParityFilter"),
            NoReason::DeterminantFilter => write!(f, "DeterminantFilter"),
            NoReason::Mod2Filter => write!(f, "Mod2Filter"),
            NoReason::CongruenceFilter { modulus } => write!(f, "CongruenceFilter(mod {modulus})"),
            NoReason::ExhaustiveDefinite => write!(f, "ExhaustiveDefinite"),
        }
    }
}

/// What was searched before giving up.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct UnknownInfo {
    /// Radius of the box searched completely (0 if the budget ran out first).
    pub radius: u32,
    pub budget_exhausted: bool,
    /// `A` is definite but above the configured enumeration cap.
    pub definite_cap_exceeded: bool,
}

/// A matrix `P` re-verified to satisfy `Pᵀ·A·P = k·B` at construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Witness {
    matrix: IntMatrix,
    parallel: bool,
}

impl Witness {
    /// Returns `None` unless `Pᵀ·A·P = k·B` holds exactly.
    pub fn verified(a: &IntMatrix, b: &IntMatrix, k: &BigInt, p: IntMatrix) -> Option<Self> {
        if p.rows() != a.rows() || p.cols() != b.rows() {
            return None;
        }
        (a.congruent(&p) == b.scale(k)).then_some(Witness { matrix: p, parallel: false })
    }

    pub fn matrix(&self) -> &IntMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> IntMatrix {
        self.matrix
    }

    /// Found by a multi-worker search; may differ from the single-worker witness.
    pub fn from_parallel_search(&self) -> bool {
        self.parallel
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Yes(Witness),
    No(NoReason),
    Unknown(UnknownInfo),
}

impl Verdict {
    pub fn is_yes(&self) -> bool {
        matches!(self, Verdict::Yes(_))
    }

    pub fn is_no(&self) -> bool {
        matches!(self, Verdict::No(_))
    }

    pub fn is_unknown(&self) -> bool {
        matches!(self, Verdict::Unknown(_))
    }

    pub fn witness(&self) -> Option<&IntMatrix> {
        match self {
            Verdict::Yes(w) => Some(w.matrix()),
            _ => None,
        }
    }

    pub fn reason(&self) -> Option<NoReason> {
        match self {
            Verdict::No(r) => Some(*r),
            _ => None,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Verdict::Yes(_) => "Yes",
            Verdict::No(_) => "No",
            Verdict::Unknown(_) => "Unknown",
        }
    }
}

/// Node counter and cancellation flag shared by all workers of one search.
pub(crate) struct Budget {
    used: AtomicU64,
    limit: u64,
    stop: AtomicBool,
}

impl Budget {
    pub(crate) fn new(limit: u64) -> Self {
        Budget { used: AtomicU64::new(0), limit, stop: AtomicBool::new(false) }
    }

    /// Counts one node; false once the budget is spent or a worker finished.
    #[inline]
    pub(crate) fn tick(&self) -> bool {
        if self.stop.load(Ordering::Relaxed) {
            return false;
        }
        self.used.fetch_add(1, Ordering::Relaxed) < self.limit
    }

    pub(crate) fn exhausted(&self) -> bool {
        self.used.load(Ordering::Relaxed) >= self.limit
    }

    pub(crate) fn cancel(&self) {
        self.stop.store(true, Ordering::Relaxed);
    }
}

/// Finds `P` with `Pᵀ·A·P = k·B`, proves none exists, or reports the radius
/// it exhausted.
pub fn congruence_solve(
    a: &IntersectionForm,
    b: &IntersectionForm,
    k: &BigInt,
    cfg: &SearchConfig,
) -> Result<Verdict, SolveError> {
    congruence_search(a, b, k, cfg, &|_| true)
}

/// [`congruence_solve`] with a witness predicate: solutions of the matrix
/// equation rejected by `accept` are skipped and the search continues in
/// order. An exhausted definite search then means no solution is accepted.
pub fn congruence_search(
    a: &IntersectionForm,
    b: &IntersectionForm,
    k: &BigInt,
    cfg: &SearchConfig,
    accept: &(dyn Fn(&IntMatrix) -> bool + Sync),
) -> Result<Verdict, SolveError> {
    cfg.validate()?;
    if k.is_zero() {
        return Err(SolveError::ZeroK);
    }
    if a.rank() > 0 && b.rank() > 0 && a.symmetry() != b.symmetry() {
        return Err(SolveError::SymmetryMismatch);
    }
    let (m, l) = (a.rank(), b.rank());
    if l == 0 {
        let p = Matrix::zeros(m, 0);
        return Ok(match Witness::verified(a.matrix(), b.matrix(), k, p) {
            Some(w) if accept(w.matrix()) => Verdict::Yes(w),
            _ => Verdict::No(NoReason::ExhaustiveDefinite),
        });
    }
    if let Some(reason) = first_obstruction(a, b, k, cfg) {
        return Ok(Verdict::No(reason));
    }

    // Most constrained columns first: descending |b_ii|, ties by index.
    let mut perm: Vec<usize> = (0..l).collect();
    perm.sort_by_key(|&i| (std::cmp::Reverse(b.entry(i, i).abs()), i));
    let target = b.matrix().scale(k).permute_symmetric(&perm);

    let definite = a.is_definite() && m <= cfg.definite_cap;
    let cap_exceeded = a.is_definite() && m > cfg.definite_cap;
    let a_mat = a.matrix();
    let b_mat = b.matrix();
    let unpermute = |p: &IntMatrix| -> IntMatrix {
        let mut out = Matrix::zeros(m, l);
        for (i, &orig) in perm.iter().enumerate() {
            for r in 0..m {
                out[(r, orig)] = p[(r, i)].clone();
            }
        }
        out
    };
    let check = |p: &IntMatrix| -> bool {
        let full = unpermute(p);
        let verified = Witness::verified(a_mat, b_mat, k, full.clone());
        assert!(verified.is_some(), "kernel produced a non-solution {full:?}");
        accept(&full)
    };

    let outcome = kernel::run(a_mat, &target, definite, cfg, &check);
    Ok(match outcome {
        kernel::Outcome::Found { p, parallel } => {
            let full = unpermute(&p);
            let mut w = Witness::verified(a_mat, b_mat, k, full).expect("verified in check");
            w.parallel = parallel;
            Verdict::Yes(w)
        }
        kernel::Outcome::Exhausted if definite => Verdict::No(NoReason::ExhaustiveDefinite),
        kernel::Outcome::Exhausted => Verdict::Unknown(UnknownInfo {
            radius: cfg.radius,
            budget_exhausted: false,
            definite_cap_exceeded: cap_exceeded,
        }),
        kernel::Outcome::OutOfBudget => Verdict::Unknown(UnknownInfo {
            radius: 0,
            budget_exhausted: true,
            definite_cap_exceeded: cap_exceeded,
        }),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::intform::Symmetry;
    use crate::matrix::int_matrix;

    fn sym(rows: &[&[i64]]) -> IntersectionForm {
        IntersectionForm::from_rows(rows, Symmetry::Symmetric).unwrap()
    }

    fn a1() -> IntersectionForm {
        sym(&[&[0, 1], &[1, 0]])
    }

    fn diag_pm() -> IntersectionForm {
        sym(&[&[1, 0], &[0, -1]])
    }

    fn a3() -> IntersectionForm {
        a1().direct_sum(&a1()).unwrap().direct_sum(&a1()).unwrap()
    }

    fn solve(a: &IntersectionForm, b: &IntersectionForm, k: i64) -> Verdict {
        congruence_solve(a, b, &BigInt::from(k), &SearchConfig::default()).unwrap()
    }

    #[test]
    fn diag_pm_never_maps_onto_i2() {
        let i2 = sym(&[&[1, 0], &[0, 1]]);
        for k in [-3, -2, -1, 1, 2, 3, 7] {
            assert!(solve(&diag_pm(), &i2, k).is_no(), "k = {k}");
        }
    }

    #[test]
    fn diag_pm_to_hyperbolic_degree_two() {
        let v = solve(&diag_pm(), &a1(), 2);
        let p = v.witness().expect("degree 2 exists");
        assert_eq!(diag_pm().matrix().congruent(p), a1().matrix().scale(&BigInt::from(2)));
        // First witness in search order is the k = 1 member of the family
        // [[1, k], [1, -k]].
        assert_eq!(p, &int_matrix(&[&[1, 1], &[1, -1]]));
    }

    #[test]
    fn diag_pm_to_hyperbolic_odd_degrees_fail() {
        for k in [-5, -3, -1, 1, 3, 5] {
            let v = solve(&diag_pm(), &a1(), k);
            assert!(v.is_no(), "k = {k}: {v:?}");
        }
    }

    #[test]
    fn hyperbolic_cube_every_degree() {
        for k in [-3, -1, 1, 2, 5] {
            let v = solve(&a3(), &a3(), k);
            assert!(v.is_yes(), "k = {k}: {v:?}");
        }
    }

    #[test]
    fn identity_rank_one_degree_four() {
        let i1 = sym(&[&[1]]);
        assert_eq!(solve(&i1, &i1, 4).witness(), Some(&int_matrix(&[&[2]])));
        assert_eq!(solve(&i1, &i1, 2).reason(), Some(NoReason::DeterminantFilter));
        let i2 = sym(&[&[1, 0], &[0, 1]]);
        // 3 is not a sum of two squares; no filter sees it at rank 2 -> 1.
        let cfg = SearchConfig { local_filters: false, ..SearchConfig::default() };
        let v = congruence_solve(&i2, &i1, &BigInt::from(3), &cfg).unwrap();
        assert_eq!(v.reason(), Some(NoReason::ExhaustiveDefinite));
    }

    #[test]
    fn zero_k_and_symmetry_errors() {
        let cfg = SearchConfig::default();
        assert_eq!(congruence_solve(&a1(), &a1(), &BigInt::zero(), &cfg), Err(SolveError::ZeroK));
        let j = IntersectionForm::from_rows(&[&[0, 1], &[-1, 0]], Symmetry::Antisymmetric).unwrap();
        assert_eq!(congruence_solve(&a1(), &j, &BigInt::from(1), &cfg), Err(SolveError::SymmetryMismatch));
        let bad = SearchConfig { radius: 0, ..SearchConfig::default() };
        assert!(matches!(congruence_solve(&a1(), &a1(), &BigInt::from(1), &bad), Err(SolveError::InvalidConfig(_))));
    }

    #[test]
    fn empty_target_is_trivially_solvable() {
        let e = IntersectionForm::empty(Symmetry::Symmetric);
        let v = solve(&a1(), &e, 3);
        assert_eq!(v.witness().map(Matrix::shape), Some((2, 0)));
        assert_eq!(solve(&e, &a1(), 1).reason(), Some(NoReason::RankFilter));
    }

    #[test]
    fn antisymmetric_forms_solve() {
        let j = IntersectionForm::from_rows(&[&[0, 1], &[-1, 0]], Symmetry::Antisymmetric).unwrap();
        for k in [-2, 1, 3] {
            let v = solve(&j, &j, k);
            assert!(v.is_yes(), "k = {k}");
        }
    }

    #[test]
    fn witness_constructor_rejects_non_solutions() {
        let a = a1();
        assert!(Witness::verified(a.matrix(), a.matrix(), &BigInt::from(2), Matrix::identity(2)).is_none());
        assert!(Witness::verified(a.matrix(), a.matrix(), &BigInt::from(1), Matrix::identity(2)).is_some());
    }

    #[test]
    fn accept_predicate_skips_witnesses() {
        let i1 = sym(&[&[1]]);
        // x² = 4 has solutions 2 and -2; reject the first.
        let v = congruence_search(&i1, &i1, &BigInt::from(4), &SearchConfig::default(), &|p| {
            p[(0, 0)] == BigInt::from(-2)
        })
        .unwrap();
        assert_eq!(v.witness(), Some(&int_matrix(&[&[-2]])));
        let v = congruence_search(&i1, &i1, &BigInt::from(4), &SearchConfig::default(), &|_| false).unwrap();
        assert_eq!(v.reason(), Some(NoReason::ExhaustiveDefinite));
    }

    #[test]
    fn tiny_budget_reports_unknown() {
        let cfg = SearchConfig::default().with_budget(5);
        let v = congruence_solve(&a3(), &a3(), &BigInt::from(3), &cfg).unwrap();
        match v {
            Verdict::Unknown(info) => assert!(info.budget_exhausted),
            other => panic!("expected Unknown, got {other:?}"),
        }
    }

    #[test]
    fn parallel_workers_return_valid_witness() {
        let cfg = SearchConfig::default().with_workers(4);
        let v = congruence_solve(&a3(), &a3(), &BigInt::from(5), &cfg).unwrap();
        let p = v.witness().unwrap();
        assert_eq!(a3().matrix().congruent(p), a3().matrix().scale(&BigInt::from(5)));
    }
}
