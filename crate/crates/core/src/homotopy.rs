//! Bookkeeping in `π_{2n−1}(Sⁿ) = ⟨ν⟩ ⊕ G` for `(n−1)`-connected
//! `2n`-manifolds presented as `∨Sⁿ ∪_g D^{2n}`.
//!
//! Each sphere of the wedge carries an invariant `t_i ∈ π_{2n−1}(Sⁿ)`. A
//! change of basis `P` acts on the invariants by
//!
//! ```text
//! t'_r = Σ_v p_vr t_v + (Σ_v C(p_vr, 2) a_vv + Σ_{v<w} p_vr p_wr a_vw) · W
//! ```
//!
//! where `W = [sⁿ, sⁿ]` is the Whitehead square. The group itself is input
//! data: a model fixes `n`, the cyclic orders of `G` and the torsion part of
//! `W`; only the `ν`-part of `W` is determined, by `H(W) = 2`.
//!
//! For even `n`, `t = λ·H(t)·ν + μ` with `λ = 1` when `n ∈ {2, 4, 8}` and
//! `λ = 1/2` otherwise, so in the latter case `H(t)` is always even.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::IntMatrix;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HomotopyError {
    #[error("ModelMismatch: {0}")]
    ModelMismatch(String),
    #[error("ShapeMismatch: {0}")]
    ShapeMismatch(String),
    #[error("OddN: the Hopf invariant is defined only for even n")]
    OddN,
    #[error("NonIntegralHopf: ν-coefficient {0} is not an integer")]
    NonIntegralHopf(BigRational),
    #[error("InvalidModel: {0}")]
    InvalidModel(String),
}

/// An element `c·ν + μ` with torsion residues `μ_i mod d_i`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PiElement {
    #[serde(with = "crate::io::big")]
    pub nu: BigInt,
    pub torsion: Vec<u64>,
}

impl PiElement {
    pub fn is_zero(&self) -> bool {
        self.nu.is_zero() && self.torsion.iter().all(|&r| r == 0)
    }

    pub fn is_torsion(&self) -> bool {
        self.nu.is_zero()
    }
}

#[derive(Serialize, Deserialize)]
struct PiModelDoc {
    n: u32,
    torsion_orders: Vec<u64>,
    whitehead: WhiteheadDoc,
}

#[derive(Serialize, Deserialize)]
struct WhiteheadDoc {
    #[serde(default, with = "crate::io::big")]
    nu: BigInt,
    torsion: Vec<u64>,
}

/// A concrete model of `π_{2n−1}(Sⁿ)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "PiModelDoc", into = "PiModelDoc")]
pub struct PiModel {
    n: u32,
    torsion_orders: Vec<u64>,
    whitehead: PiElement,
}

impl TryFrom<PiModelDoc> for PiModel {
    type Error = HomotopyError;

    fn try_from(doc: PiModelDoc) -> Result<Self, HomotopyError> {
        let model = PiModel::new(doc.n, doc.torsion_orders, doc.whitehead.torsion)?;
        if !doc.whitehead.nu.is_zero() && doc.whitehead.nu != model.whitehead.nu {
            return Err(HomotopyError::InvalidModel(format!(
                "Whitehead ν-coefficient must be {} for n = {}",
                model.whitehead.nu, model.n
            )));
        }
        Ok(model)
    }
}

impl From<PiModel> for PiModelDoc {
    fn from(m: PiModel) -> Self {
        PiModelDoc {
            n: m.n,
            torsion_orders: m.torsion_orders,
            whitehead: WhiteheadDoc { nu: m.whitehead.nu, torsion: m.whitehead.torsion },
        }
    }
}

impl PiModel {
    /// Builds the model for half-dimension `n` with `G = ⊕ Z/d_i` and the
    /// given torsion part of `W`. The `ν`-part of `W` is `2λ` for even `n`.
    /// For odd `n` there is no `ν`, and `2W = 0` is required so that the
    /// transformation rule composes.
    pub fn new(n: u32, torsion_orders: Vec<u64>, whitehead_torsion: Vec<u64>) -> Result<Self, HomotopyError> {
        if n == 0 {
            return Err(HomotopyError::InvalidModel("n must be positive".into()));
        }
        if let Some(i) = torsion_orders.iter().position(|&d| d < 2) {
            return Err(HomotopyError::InvalidModel(format!("torsion order {} at index {i} is below 2", torsion_orders[i])));
        }
        if whitehead_torsion.len() != torsion_orders.len() {
            return Err(HomotopyError::InvalidModel(format!(
                "Whitehead torsion has {} residues for {} cyclic factors",
                whitehead_torsion.len(),
                torsion_orders.len()
            )));
        }
        let torsion: Vec<u64> = whitehead_torsion.iter().zip(&torsion_orders).map(|(r, d)| r % d).collect();
        let nu = if n % 2 == 0 {
            if matches!(n, 2 | 4 | 8) {
                BigInt::from(2)
            } else {
                BigInt::one()
            }
        } else {
            if let Some(i) = torsion.iter().zip(&torsion_orders).position(|(r, d)| (2 * u128::from(*r)) % u128::from(*d) != 0) {
                return Err(HomotopyError::InvalidModel(format!(
                    "n odd requires 2W = 0, but 2·{} ≠ 0 mod {}",
                    torsion[i], torsion_orders[i]
                )));
            }
            BigInt::zero()
        };
        Ok(PiModel { n, torsion_orders, whitehead: PiElement { nu, torsion } })
    }

    /// `π₃(S²) = Z·ν`, `W = 2ν`.
    pub fn n2() -> Self {
        PiModel::new(2, Vec::new(), Vec::new()).expect("valid")
    }

    /// Even `n` with user-supplied torsion and Whitehead torsion part.
    pub fn generic_even(n: u32, torsion_orders: Vec<u64>, whitehead_torsion: Vec<u64>) -> Result<Self, HomotopyError> {
        if n % 2 != 0 {
            return Err(HomotopyError::OddN);
        }
        PiModel::new(n, torsion_orders, whitehead_torsion)
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn has_nu(&self) -> bool {
        self.n % 2 == 0
    }

    /// `λ`, or `None` for odd `n`.
    pub fn lambda(&self) -> Option<BigRational> {
        if !self.has_nu() {
            return None;
        }
        let den = if matches!(self.n, 2 | 4 | 8) { 1 } else { 2 };
        Some(BigRational::new(BigInt::one(), BigInt::from(den)))
    }

    pub fn torsion_orders(&self) -> &[u64] {
        &self.torsion_orders
    }

    /// `T`, the order of `G` (1 when `G` is trivial).
    pub fn torsion_order(&self) -> BigInt {
        self.torsion_orders.iter().map(|&d| BigInt::from(d)).product()
    }

    /// `W = [sⁿ, sⁿ]`.
    pub fn whitehead(&self) -> &PiElement {
        &self.whitehead
    }

    pub fn zero(&self) -> PiElement {
        PiElement { nu: BigInt::zero(), torsion: vec![0; self.torsion_orders.len()] }
    }

    /// `ν`; errors for odd `n`.
    pub fn nu(&self) -> Result<PiElement, HomotopyError> {
        if !self.has_nu() {
            return Err(HomotopyError::OddN);
        }
        Ok(PiElement { nu: BigInt::one(), ..self.zero() })
    }

    /// `c·ν + μ`, with the residues reduced.
    pub fn element(&self, nu: BigInt, torsion: &[BigInt]) -> Result<PiElement, HomotopyError> {
        if torsion.len() != self.torsion_orders.len() {
            return Err(HomotopyError::ModelMismatch(format!(
                "{} torsion residues for {} cyclic factors",
                torsion.len(),
                self.torsion_orders.len()
            )));
        }
        if !self.has_nu() && !nu.is_zero() {
            return Err(HomotopyError::ModelMismatch(format!("n = {} has no ν summand", self.n)));
        }
        let torsion = torsion.iter().zip(&self.torsion_orders).map(|(r, &d)| reduce(r, d)).collect();
        Ok(PiElement { nu, torsion })
    }

    fn check(&self, a: &PiElement) -> Result<(), HomotopyError> {
        if a.torsion.len() != self.torsion_orders.len() {
            return Err(HomotopyError::ModelMismatch(format!(
                "element has {} torsion residues, model has {} cyclic factors",
                a.torsion.len(),
                self.torsion_orders.len()
            )));
        }
        if let Some(i) = a.torsion.iter().zip(&self.torsion_orders).position(|(r, d)| r >= d) {
            return Err(HomotopyError::ModelMismatch(format!(
                "residue {} is not reduced mod {}",
                a.torsion[i], self.torsion_orders[i]
            )));
        }
        if !self.has_nu() && !a.nu.is_zero() {
            return Err(HomotopyError::ModelMismatch(format!("n = {} has no ν summand", self.n)));
        }
        Ok(())
    }

    pub fn add(&self, a: &PiElement, b: &PiElement) -> Result<PiElement, HomotopyError> {
        self.check(a)?;
        self.check(b)?;
        Ok(self.add_unchecked(a, b))
    }

    fn add_unchecked(&self, a: &PiElement, b: &PiElement) -> PiElement {
        let torsion = a
            .torsion
            .iter()
            .zip(&b.torsion)
            .zip(&self.torsion_orders)
            .map(|((x, y), d)| ((u128::from(*x) + u128::from(*y)) % u128::from(*d)) as u64)
            .collect();
        PiElement { nu: &a.nu + &b.nu, torsion }
    }

    pub fn scale(&self, c: &BigInt, a: &PiElement) -> Result<PiElement, HomotopyError> {
        self.check(a)?;
        Ok(self.scale_unchecked(c, a))
    }

    fn scale_unchecked(&self, c: &BigInt, a: &PiElement) -> PiElement {
        let torsion = a.torsion.iter().zip(&self.torsion_orders).map(|(r, &d)| reduce(&(c * BigInt::from(*r)), d)).collect();
        PiElement { nu: c * &a.nu, torsion }
    }

    /// The invariant of a disjoint union of framed spheres:
    /// `t1 + t2 + lk·W`.
    pub fn compose_disjoint(&self, t1: &PiElement, t2: &PiElement, lk: &BigInt) -> Result<PiElement, HomotopyError> {
        let sum = self.add(t1, t2)?;
        Ok(self.add_unchecked(&sum, &self.scale_unchecked(lk, &self.whitehead)))
    }

    /// `H(t) = c / λ` for `t = c·ν + μ`. Always an integer, since `λ` is 1
    /// or 1/2.
    pub fn hopf(&self, t: &PiElement) -> Result<BigInt, HomotopyError> {
        self.check(t)?;
        let lambda = self.lambda().ok_or(HomotopyError::OddN)?;
        let h = BigRational::from_integer(t.nu.clone()) / lambda;
        Ok(h.to_integer())
    }

    /// `λ·h·ν + μ`. Errors when `λ·h` is not an integer, i.e. `h` odd with
    /// `λ = 1/2`.
    pub fn from_hopf(&self, h: &BigInt, torsion: &[BigInt]) -> Result<PiElement, HomotopyError> {
        let lambda = self.lambda().ok_or(HomotopyError::OddN)?;
        let c = lambda * BigRational::from_integer(h.clone());
        if !c.is_integer() {
            return Err(HomotopyError::NonIntegralHopf(c));
        }
        self.element(c.to_integer(), torsion)
    }

    /// `t_i = λ·a_ii·ν` with zero torsion part: the self-linking of each
    /// sphere is its self-intersection.
    pub fn diagonal_invariants(&self, a: &IntMatrix) -> Result<Vec<PiElement>, HomotopyError> {
        let zeros = vec![BigInt::zero(); self.torsion_orders.len()];
        (0..a.rows()).map(|i| self.from_hopf(&a[(i, i)], &zeros)).collect()
    }

    fn check_form(&self, a: &IntMatrix) -> Result<(), HomotopyError> {
        if !a.is_square() {
            return Err(HomotopyError::ShapeMismatch(format!("form is {}x{}", a.rows(), a.cols())));
        }
        let ok = if self.has_nu() { a.is_symmetric() } else { a.is_antisymmetric() };
        if !ok {
            let want = if self.has_nu() { "symmetric" } else { "antisymmetric" };
            return Err(HomotopyError::ModelMismatch(format!("n = {} needs a {want} form", self.n)));
        }
        Ok(())
    }

    /// The invariants `t'_1 … t'_l` carried by the columns of `P` over the
    /// form `A` with invariants `t`.
    pub fn induced_invariant(&self, a: &IntMatrix, t: &[PiElement], p: &IntMatrix) -> Result<Vec<PiElement>, HomotopyError> {
        self.check_form(a)?;
        let m = a.rows();
        if t.len() != m {
            return Err(HomotopyError::ShapeMismatch(format!("{} invariants for a rank {m} form", t.len())));
        }
        if p.rows() != m {
            return Err(HomotopyError::ShapeMismatch(format!("P has {} rows, form has rank {m}", p.rows())));
        }
        for e in t {
            self.check(e)?;
        }
        let out = (0..p.cols())
            .map(|r| {
                let mut acc = self.zero();
                let mut bracket = BigInt::zero();
                for v in 0..m {
                    let pv = &p[(v, r)];
                    if pv.is_zero() {
                        continue;
                    }
                    acc = self.add_unchecked(&acc, &self.scale_unchecked(pv, &t[v]));
                    bracket += (pv * (pv - 1u32)).div_floor(&BigInt::from(2)) * &a[(v, v)];
                    for w in v + 1..m {
                        bracket += pv * &p[(w, r)] * &a[(v, w)];
                    }
                }
                self.add_unchecked(&acc, &self.scale_unchecked(&bracket, &self.whitehead))
            })
            .collect();
        Ok(out)
    }

    /// Checks `k·u_r = t'_r` for every column `r` of `P`.
    pub fn check_condition_15(
        &self,
        a: &IntMatrix,
        t: &[PiElement],
        b: &IntMatrix,
        u: &[PiElement],
        p: &IntMatrix,
        k: &BigInt,
    ) -> Result<ConditionReport, HomotopyError> {
        self.check_form(b)?;
        if p.cols() != b.rows() {
            return Err(HomotopyError::ShapeMismatch(format!("P has {} columns, target has rank {}", p.cols(), b.rows())));
        }
        if u.len() != b.rows() {
            return Err(HomotopyError::ShapeMismatch(format!("{} invariants for a rank {} target", u.len(), b.rows())));
        }
        for e in u {
            self.check(e)?;
        }
        let induced = self.induced_invariant(a, t, p)?;
        let failing = induced
            .iter()
            .zip(u)
            .enumerate()
            .filter(|(_, (lhs, ur))| self.scale_unchecked(k, ur) != **lhs)
            .map(|(r, _)| r)
            .collect();
        Ok(ConditionReport { failing, induced })
    }
}

/// Outcome of the homotopy condition, per target index.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConditionReport {
    /// Indices `r` with `k·u_r ≠ t'_r`.
    pub failing: Vec<usize>,
    /// `t'_r` for every `r`.
    pub induced: Vec<PiElement>,
}

impl ConditionReport {
    pub fn holds(&self) -> bool {
        self.failing.is_empty()
    }
}

fn reduce(r: &BigInt, d: u64) -> u64 {
    r.mod_floor(&BigInt::from(d)).to_u64().expect("residue below modulus")
}
