//! Degrees of maps between manifold models.
//!
//! For 4-manifolds with simply connected target, a degree `k` map exists iff
//! `Pᵀ·A·P = k·B` has an integer solution. For `(n−1)`-connected
//! `2n`-manifolds with homotopy data, some solution must also satisfy the
//! homotopy condition `k·u_r = t'_r`. Outside those hypotheses the matrix
//! equation is only necessary, and a solution is reported as
//! [`DegreeOutcome::NecessaryConditionsPass`].

use std::fmt::Write as _;
use std::sync::atomic::{AtomicU64, Ordering};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::catalog::ManifoldModel;
use crate::homotopy::{ConditionReport, HomotopyError};
use crate::intform::{make_form, IntersectionForm};
use crate::matrix::Matrix;
use crate::solver::{congruence_search, NoReason, SearchConfig, SolveError, UnknownInfo, Verdict, Witness};
use crate::IntMatrix;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DegsetError {
    #[error("DimensionMismatch: source has n = {0}, target has n = {1}")]
    DimensionMismatch(u32, u32),
    #[error("NotApplicable: {0}")]
    NotApplicable(String),
    #[error("ConditionNotMet: {0}")]
    ConditionNotMet(String),
    #[error(transparent)]
    Solve(#[from] SolveError),
    #[error(transparent)]
    Homotopy(#[from] HomotopyError),
}

/// Which criterion governs a pair of manifolds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    /// `n = 2`, target simply connected: the matrix equation is exact.
    FourManifold,
    /// Both `(n−1)`-connected with homotopy data in the same model: the
    /// matrix equation together with the homotopy condition is exact.
    HighlyConnected,
    /// Only the matrix equation, as a necessary condition.
    NecessaryOnly,
}

impl Regime {
    pub fn label(&self) -> &'static str {
        match self {
            Regime::FourManifold => "four-manifold",
            Regime::HighlyConnected => "highly-connected",
            Regime::NecessaryOnly => "necessary-only",
        }
    }
}

pub fn regime(m: &ManifoldModel, l: &ManifoldModel) -> Regime {
    if m.n() == 2 && l.simply_connected() {
        return Regime::FourManifold;
    }
    if m.highly_connected() && l.highly_connected() {
        if let (Some((pm, _)), Some((pl, _))) = (m.homotopy_invariants(), l.homotopy_invariants()) {
            if pm == pl {
                return Regime::HighlyConnected;
            }
        }
    }
    Regime::NecessaryOnly
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DegreeOutcome {
    Yes(Witness),
    /// The matrix equation holds but the pair is outside the sufficiency
    /// hypotheses.
    NecessaryConditionsPass(Witness),
    No(NoReason),
    Unknown(UnknownInfo),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DegreeAnswer {
    pub k: BigInt,
    pub regime: Regime,
    pub outcome: DegreeOutcome,
    /// Matrix solutions skipped because the homotopy condition failed.
    pub homotopy_rejections: u64,
}

impl DegreeAnswer {
    pub fn kind(&self) -> &'static str {
        match self.outcome {
            DegreeOutcome::Yes(_) => "Yes",
            DegreeOutcome::NecessaryConditionsPass(_) => "NecessaryConditionsPass",
            DegreeOutcome::No(_) => "No",
            DegreeOutcome::Unknown(_) => "Unknown",
        }
    }

    pub fn is_yes(&self) -> bool {
        matches!(self.outcome, DegreeOutcome::Yes(_))
    }

    pub fn is_no(&self) -> bool {
        matches!(self.outcome, DegreeOutcome::No(_))
    }

    pub fn is_unknown(&self) -> bool {
        matches!(self.outcome, DegreeOutcome::Unknown(_))
    }

    pub fn witness(&self) -> Option<&Witness> {
        match &self.outcome {
            DegreeOutcome::Yes(w) | DegreeOutcome::NecessaryConditionsPass(w) => Some(w),
            _ => None,
        }
    }

    pub fn reason(&self) -> Option<NoReason> {
        match self.outcome {
            DegreeOutcome::No(r) => Some(r),
            _ => None,
        }
    }
}

/// Decides whether `M → L` has a map of degree `k`, within the limits of
/// `cfg` and of the applicable criterion.
pub fn degree_realizable(
    m: &ManifoldModel,
    l: &ManifoldModel,
    k: &BigInt,
    cfg: &SearchConfig,
) -> Result<DegreeAnswer, DegsetError> {
    if m.n() != l.n() {
        return Err(DegsetError::DimensionMismatch(m.n(), l.n()));
    }
    let regime = regime(m, l);
    let (a, b) = (m.form(), l.form());
    if k.is_zero() {
        let w = Witness::verified(a.matrix(), b.matrix(), k, Matrix::zeros(a.rank(), b.rank())).expect("0 = 0·B");
        return Ok(DegreeAnswer { k: k.clone(), regime, outcome: DegreeOutcome::Yes(w), homotopy_rejections: 0 });
    }
    let rejections = AtomicU64::new(0);
    let verdict = match regime {
        Regime::HighlyConnected => {
            let (model, t) = m.homotopy_invariants().expect("regime checked");
            let (_, u) = l.homotopy_invariants().expect("regime checked");
            let accept = |p: &IntMatrix| {
                let ok = model
                    .check_condition_15(a.matrix(), &t, b.matrix(), &u, p, k)
                    .map(|r| r.holds())
                    .unwrap_or(false);
                if !ok {
                    rejections.fetch_add(1, Ordering::Relaxed);
                }
                ok
            };
            congruence_search(a, b, k, cfg, &accept)?
        }
        _ => congruence_search(a, b, k, cfg, &|_| true)?,
    };
    let outcome = match verdict {
        Verdict::Yes(w) if regime == Regime::NecessaryOnly => DegreeOutcome::NecessaryConditionsPass(w),
        Verdict::Yes(w) => DegreeOutcome::Yes(w),
        Verdict::No(r) => DegreeOutcome::No(r),
        Verdict::Unknown(u) => DegreeOutcome::Unknown(u),
    };
    Ok(DegreeAnswer { k: k.clone(), regime, outcome, homotopy_rejections: rejections.into_inner() })
}

/// [`degree_realizable`] for callers that need a sufficiency claim: errors
/// when only the necessary condition applies.
pub fn degree_realizable_sufficient(
    m: &ManifoldModel,
    l: &ManifoldModel,
    k: &BigInt,
    cfg: &SearchConfig,
) -> Result<DegreeAnswer, DegsetError> {
    if m.n() == l.n() && regime(m, l) == Regime::NecessaryOnly {
        return Err(not_applicable(m, l));
    }
    degree_realizable(m, l, k, cfg)
}

fn not_applicable(m: &ManifoldModel, l: &ManifoldModel) -> DegsetError {
    DegsetError::NotApplicable(format!(
        "{m} -> {l}: needs n = 2 with a simply connected target, or (n-1)-connected manifolds with homotopy data"
    ))
}

/// `D(M, L) ∩ [−K, K]`. Zero is always present (constant map) and not
/// searched.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DegreeSetReport {
    pub source: String,
    pub target: String,
    pub range: u32,
    /// One answer per `k ∈ [−K, K] \ {0}`, in increasing `k`.
    pub entries: Vec<DegreeAnswer>,
}

impl DegreeSetReport {
    pub fn always_contains_zero(&self) -> bool {
        true
    }

    fn select(&self, f: impl Fn(&DegreeAnswer) -> bool) -> Vec<BigInt> {
        self.entries.iter().filter(|e| f(e)).map(|e| e.k.clone()).collect()
    }

    pub fn yes(&self) -> Vec<BigInt> {
        self.select(DegreeAnswer::is_yes)
    }

    pub fn no(&self) -> Vec<BigInt> {
        self.select(DegreeAnswer::is_no)
    }

    pub fn unknown(&self) -> Vec<BigInt> {
        self.select(DegreeAnswer::is_unknown)
    }

    pub fn necessary(&self) -> Vec<BigInt> {
        self.select(|e| matches!(e.outcome, DegreeOutcome::NecessaryConditionsPass(_)))
    }

    pub fn get(&self, k: i64) -> Option<&DegreeAnswer> {
        let k = BigInt::from(k);
        self.entries.iter().find(|e| e.k == k)
    }
}

/// Runs [`degree_realizable`] for every `k ∈ [−K, K] \ {0}`. With
/// `cfg.workers > 1` the degrees are spread over threads and each search is
/// single-worker, so the report is the same as a sequential run.
pub fn degree_set(
    m: &ManifoldModel,
    l: &ManifoldModel,
    range: u32,
    cfg: &SearchConfig,
) -> Result<DegreeSetReport, DegsetError> {
    if m.n() != l.n() {
        return Err(DegsetError::DimensionMismatch(m.n(), l.n()));
    }
    let r = i64::from(range);
    let ks: Vec<BigInt> = (-r..=r).filter(|&k| k != 0).map(BigInt::from).collect();
    let entries = if cfg.workers <= 1 || ks.len() < 2 {
        ks.iter().map(|k| degree_realizable(m, l, k, cfg)).collect::<Result<Vec<_>, _>>()?
    } else {
        let inner = SearchConfig { workers: 1, ..cfg.clone() };
        let workers = cfg.workers.min(ks.len());
        let mut slots: Vec<Option<Result<DegreeAnswer, DegsetError>>> = vec![None; ks.len()];
        std::thread::scope(|s| {
            let handles: Vec<_> = (0..workers)
                .map(|w| {
                    let (ks, inner) = (&ks, &inner);
                    s.spawn(move || {
                        (w..ks.len())
                            .step_by(workers)
                            .map(|i| (i, degree_realizable(m, l, &ks[i], inner)))
                            .collect::<Vec<_>>()
                    })
                })
                .collect();
            for h in handles {
                for (i, res) in h.join().expect("degree worker panicked") {
                    slots[i] = Some(res);
                }
            }
        });
        slots.into_iter().map(|s| s.expect("every degree assigned")).collect::<Result<Vec<_>, _>>()?
    };
    Ok(DegreeSetReport { source: m.name().to_string(), target: l.name().to_string(), range, entries })
}

/// An orthogonal splitting `A ≅ B ⊕ C` realized by the unimodular basis
/// `[P | K]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Complement {
    pub form: IntersectionForm,
    /// `K`: a basis of the orthogonal complement of the image of `P`.
    pub basis: IntMatrix,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SummandReport {
    pub answer: DegreeAnswer,
    pub complement: Option<Complement>,
}

/// Degree one maps `M → L`. On Yes, also returns `C` with `X_M ≅ X_L ⊕ C`.
pub fn degree_one_summand(m: &ManifoldModel, l: &ManifoldModel, cfg: &SearchConfig) -> Result<SummandReport, DegsetError> {
    if m.n() != l.n() {
        return Err(DegsetError::DimensionMismatch(m.n(), l.n()));
    }
    if regime(m, l) == Regime::NecessaryOnly {
        return Err(not_applicable(m, l));
    }
    let answer = degree_realizable(m, l, &BigInt::one(), cfg)?;
    let complement = answer.witness().map(|w| complement(m.form(), w.matrix()));
    Ok(SummandReport { answer, complement })
}

/// The complement of the image of `P` when `Pᵀ·A·P` is unimodular.
pub fn complement(a: &IntersectionForm, p: &IntMatrix) -> Complement {
    let k = p.transpose().mul(a.matrix()).integer_kernel();
    let full = p.hstack(&k);
    assert!(full.det().abs().is_one(), "image of P and its complement do not span");
    let c = a.matrix().congruent(&k);
    let form = make_form(c, a.symmetry()).expect("orthogonal complement of a unimodular summand is unimodular");
    Complement { form, basis: k }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SelfMapReport {
    pub k: BigInt,
    pub degree: BigInt,
    /// `P = k·I`.
    pub witness: IntMatrix,
    pub condition: ConditionReport,
}

/// The self-map of degree `k²` induced by `k·I`, which exists when `k` is a
/// multiple of `2T` (`T` even) or of `T` (`T` odd), `T` being the order of
/// the torsion of `π_{2n−1}(Sⁿ)`.
pub fn selfmap_square(m: &ManifoldModel, k: &BigInt) -> Result<SelfMapReport, DegsetError> {
    if !m.highly_connected() {
        return Err(DegsetError::NotApplicable(format!("{m} is not (n-1)-connected")));
    }
    let (model, t) = m
        .homotopy_invariants()
        .ok_or_else(|| DegsetError::NotApplicable(format!("{m} carries no homotopy data")))?;
    let torsion = model.torsion_order();
    let step = if torsion.is_even() { &torsion * 2 } else { torsion.clone() };
    if !k.is_multiple_of(&step) {
        return Err(DegsetError::ConditionNotMet(format!("k = {k} is not a multiple of {step} (T = {torsion})")));
    }
    let a = m.form().matrix();
    let p = Matrix::<BigInt>::identity(a.rows()).scale(k);
    let degree = k * k;
    let w = Witness::verified(a, a, &degree, p).expect("(kI)ᵀ·A·(kI) = k²·A");
    let condition = model.check_condition_15(a, &t, a, &t, w.matrix(), &degree)?;
    Ok(SelfMapReport { k: k.clone(), degree, witness: w.into_matrix(), condition })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dominance {
    pub target: String,
    /// First degree found, scanning `1, −1, 2, −2, …`.
    pub degree: BigInt,
    pub witness: IntMatrix,
    /// False when only the necessary condition applies.
    pub sufficient: bool,
}

/// Catalog entries `L` with a nonzero-degree map `M → L` found within
/// `|k| ≤ range`. Targets of higher rank or another dimension are skipped.
pub fn dominated_candidates(
    m: &ManifoldModel,
    catalog: &[ManifoldModel],
    range: u32,
    cfg: &SearchConfig,
) -> Result<Vec<Dominance>, DegsetError> {
    let mut out = Vec::new();
    for l in catalog {
        if l.n() != m.n() || l.form().rank() > m.form().rank() {
            continue;
        }
        let degrees = (1..=i64::from(range)).flat_map(|k| [k, -k]).map(BigInt::from);
        for k in degrees {
            let ans = degree_realizable(m, l, &k, cfg)?;
            if let Some(w) = ans.witness() {
                out.push(Dominance {
                    target: l.name().to_string(),
                    degree: k,
                    witness: w.matrix().clone(),
                    sufficient: ans.is_yes(),
                });
                break;
            }
        }
    }
    Ok(out)
}

/// Graphviz rendering; necessary-only edges are dashed.
pub fn dominance_dot(source: &str, found: &[Dominance]) -> String {
    let mut s = String::from("digraph dominance {\n");
    for d in found {
        let style = if d.sufficient { "" } else { ", style=dashed" };
        writeln!(s, "  \"{}\" -> \"{}\" [label=\"{}\"{style}];", source, d.target, d.degree).unwrap();
    }
    s.push_str("}\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{hyperbolic, preset, reverse_orientation};
    use crate::homotopy::PiModel;
    use crate::intform::Symmetry;
    use crate::matrix::int_matrix;

    fn cfg() -> SearchConfig {
        SearchConfig::default()
    }

    fn ints(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn mixed_sum_to_product_is_even_degrees() {
        let m = preset("CP2#(-CP2)").unwrap();
        let l = preset("S2xS2").unwrap();
        let r = degree_set(&m, &l, 6, &cfg()).unwrap();
        assert_eq!(r.yes(), ints(&[-6, -4, -2, 2, 4, 6]));
        assert_eq!(r.no(), ints(&[-5, -3, -1, 1, 3, 5]));
        assert!(r.unknown().is_empty());
        assert!(r.always_contains_zero());
        let parallel = degree_set(&m, &l, 6, &cfg().with_workers(3)).unwrap();
        assert_eq!(parallel, r);
    }

    #[test]
    fn empty_degree_sets() {
        let pairs = [("CP2#CP2", "S2xS2"), ("S2xS2", "CP2#CP2"), ("CP2#(-CP2)", "CP2#CP2")];
        for (a, b) in pairs {
            let r = degree_set(&preset(a).unwrap(), &preset(b).unwrap(), 4, &cfg()).unwrap();
            assert_eq!(r.no().len(), 8, "{a} -> {b}: {:?}", r.entries);
        }
    }

    #[test]
    fn torus_onto_three_products() {
        let t4 = preset("T4").unwrap();
        let l = preset("#3(S2xS2)").unwrap();
        for k in [-5, -1, 1, 5] {
            let ans = degree_realizable(&t4, &l, &BigInt::from(k), &cfg()).unwrap();
            assert!(ans.is_yes(), "k = {k}: {:?}", ans.outcome);
            assert_eq!(ans.regime, Regime::FourManifold);
        }
        let back = degree_realizable(&l, &t4, &BigInt::from(1), &cfg()).unwrap();
        assert_eq!(back.kind(), "NecessaryConditionsPass");
        assert!(matches!(
            degree_realizable_sufficient(&l, &t4, &BigInt::from(1), &cfg()),
            Err(DegsetError::NotApplicable(_))
        ));
    }

    #[test]
    fn degree_one_complements() {
        let cp2 = preset("CP2").unwrap();
        let r = degree_one_summand(&preset("CP2#CP2").unwrap(), &cp2, &cfg()).unwrap();
        assert_eq!(r.complement.unwrap().form.matrix(), &int_matrix(&[&[1]]));
        let r = degree_one_summand(&preset("CP2#(-CP2)").unwrap(), &cp2, &cfg()).unwrap();
        assert_eq!(r.complement.unwrap().form.matrix(), &int_matrix(&[&[-1]]));
        let r = degree_one_summand(&preset("S2xS2").unwrap(), &cp2, &cfg()).unwrap();
        assert_eq!(r.answer.reason(), Some(NoReason::ParityFilter));
        assert!(r.complement.is_none());
        let r = degree_one_summand(&preset("#3(S2xS2)").unwrap(), &preset("S2xS2").unwrap(), &cfg()).unwrap();
        assert_eq!(r.complement.unwrap().form.matrix(), &hyperbolic(2));
    }

    #[test]
    fn self_map_squares() {
        for name in ["CP2", "S2xS2", "CP2#CP2"] {
            let m = preset(name).unwrap();
            for k in 0..=3 {
                let r = selfmap_square(&m, &BigInt::from(k)).unwrap();
                assert_eq!(r.degree, BigInt::from(k * k));
                assert!(r.condition.holds());
            }
        }
        assert!(matches!(selfmap_square(&preset("T4").unwrap(), &BigInt::from(2)), Err(DegsetError::NotApplicable(_))));

        let model = PiModel::generic_even(6, vec![2], vec![1]).unwrap();
        let form = make_form(hyperbolic(1), Symmetry::Symmetric).unwrap();
        let data = vec![model.element(0.into(), &[1.into()]).unwrap(), model.zero()];
        let m = ManifoldModel::new("W", 6, form, true, true).unwrap().with_homotopy_data(model, data).unwrap();
        let r = selfmap_square(&m, &BigInt::from(4)).unwrap();
        assert_eq!(r.degree, BigInt::from(16));
        assert!(r.condition.holds());
        assert!(matches!(selfmap_square(&m, &BigInt::from(2)), Err(DegsetError::ConditionNotMet(_))));
    }

    #[test]
    fn homotopy_condition_filters_witnesses() {
        // n = 4, W = 2ν. Solutions are p = ±√k and t' = k·ν, while
        // k·u = k·ν + k·τ, so the condition fails exactly for odd k.
        let model = PiModel::generic_even(4, vec![2], vec![0]).unwrap();
        let form = make_form(int_matrix(&[&[1]]), Symmetry::Symmetric).unwrap();
        let m = ManifoldModel::new("M", 4, form.clone(), true, true)
            .unwrap()
            .with_homotopy_data(model.clone(), vec![model.element(1.into(), &[0.into()]).unwrap()])
            .unwrap();
        let l = ManifoldModel::new("L", 4, form, true, true)
            .unwrap()
            .with_homotopy_data(model.clone(), vec![model.element(1.into(), &[1.into()]).unwrap()])
            .unwrap();
        assert_eq!(regime(&m, &l), Regime::HighlyConnected);
        let ans = degree_realizable(&m, &l, &BigInt::from(1), &cfg()).unwrap();
        assert_eq!(ans.reason(), Some(NoReason::ExhaustiveDefinite));
        assert_eq!(ans.homotopy_rejections, 2);
        let ans = degree_realizable(&m, &l, &BigInt::from(4), &cfg()).unwrap();
        assert!(ans.is_yes());
    }

    #[test]
    fn dominance() {
        let pool: Vec<ManifoldModel> = ["CP2", "S2xS2", "CP2#CP2"].iter().map(|n| preset(n).unwrap()).collect();
        let found = dominated_candidates(&preset("CP2").unwrap(), &pool, 3, &cfg()).unwrap();
        assert_eq!(found.iter().map(|d| d.target.as_str()).collect::<Vec<_>>(), vec!["CP2"]);
        let t4 = preset("T4").unwrap();
        let found = dominated_candidates(&t4, &crate::catalog::catalog(), 3, &cfg()).unwrap();
        let names: Vec<&str> = found.iter().map(|d| d.target.as_str()).collect();
        assert!(names.contains(&"CP2") && names.contains(&"#3(S2xS2)"), "{names:?}");
        let dot = dominance_dot("T4", &found);
        assert!(dot.starts_with("digraph dominance {") && dot.contains("\"T4\" -> \"CP2\" [label=\"2\"]"));
        let empty = ManifoldModel::new("S4", 2, IntersectionForm::empty(Symmetry::Symmetric), true, true).unwrap();
        let mut pool2 = pool.clone();
        pool2.push(preset("#0(S2xS2)").unwrap());
        let found = dominated_candidates(&empty, &pool2, 2, &cfg()).unwrap();
        assert_eq!(found.iter().map(|d| d.target.as_str()).collect::<Vec<_>>(), vec!["#0(S2xS2)"]);
    }

    #[test]
    fn orientation_reversal_negates_degrees() {
        let m = preset("CP2#(-CP2)").unwrap();
        let l = preset("CP2").unwrap();
        let r = degree_set(&m, &l, 4, &cfg()).unwrap();
        let rr = degree_set(&m, &reverse_orientation(&l), 4, &cfg()).unwrap();
        let neg = |v: Vec<BigInt>| {
            let mut v: Vec<BigInt> = v.into_iter().map(|k| -k).collect();
            v.sort();
            v
        };
        assert_eq!(neg(r.yes()), rr.yes());
        assert_eq!(neg(r.no()), rr.no());
    }
}
