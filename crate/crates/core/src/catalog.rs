//! Named manifold models and connected sums.

use std::fmt;

use num_bigint::BigInt;
use thiserror::Error;

use crate::homotopy::{HomotopyError, PiElement, PiModel};
use crate::intform::{FormError, IntersectionForm, Symmetry};
use crate::matrix::Matrix;
use crate::IntMatrix;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CatalogError {
    #[error("UnknownPreset: {0:?} (see catalog-list)")]
    UnknownPreset(String),
    #[error("DimensionMismatch: n = {0} vs n = {1}")]
    DimensionMismatch(u32, u32),
    #[error("InvalidModel: {0}")]
    InvalidModel(String),
    #[error(transparent)]
    Form(#[from] FormError),
    #[error(transparent)]
    Homotopy(#[from] HomotopyError),
}

/// A closed oriented `2n`-manifold described by its middle-dimensional
/// intersection form (free part only) and connectivity flags.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ManifoldModel {
    name: String,
    n: u32,
    form: IntersectionForm,
    simply_connected: bool,
    highly_connected: bool,
    homotopy: Option<(PiModel, Vec<PiElement>)>,
}

impl ManifoldModel {
    pub fn new(
        name: impl Into<String>,
        n: u32,
        form: IntersectionForm,
        simply_connected: bool,
        highly_connected: bool,
    ) -> Result<Self, CatalogError> {
        if n == 0 {
            return Err(CatalogError::InvalidModel("n must be positive".into()));
        }
        if form.rank() > 0 && form.symmetry() != Symmetry::for_half_dimension(n) {
            return Err(CatalogError::InvalidModel(format!("n = {n} needs a {} form", Symmetry::for_half_dimension(n))));
        }
        if highly_connected && !simply_connected && n >= 2 {
            return Err(CatalogError::InvalidModel("(n-1)-connected implies simply connected".into()));
        }
        let form = if form.rank() == 0 { IntersectionForm::empty(Symmetry::for_half_dimension(n)) } else { form };
        Ok(ManifoldModel { name: name.into(), n, form, simply_connected, highly_connected, homotopy: None })
    }

    /// Attaches the invariants `t_1 … t_m` of a highly connected model.
    pub fn with_homotopy_data(mut self, model: PiModel, data: Vec<PiElement>) -> Result<Self, CatalogError> {
        if !self.highly_connected {
            return Err(CatalogError::InvalidModel("homotopy data requires an (n-1)-connected manifold".into()));
        }
        if model.n() != self.n {
            return Err(CatalogError::DimensionMismatch(self.n, model.n()));
        }
        if data.len() != self.form.rank() {
            return Err(CatalogError::InvalidModel(format!(
                "{} invariants for a rank {} form",
                data.len(),
                self.form.rank()
            )));
        }
        let mut clean = Vec::with_capacity(data.len());
        for t in &data {
            let tor: Vec<BigInt> = t.torsion.iter().map(|&r| BigInt::from(r)).collect();
            let e = model.element(t.nu.clone(), &tor)?;
            if e != *t {
                return Err(HomotopyError::ModelMismatch("torsion residues are not reduced".into()).into());
            }
            clean.push(e);
        }
        for (i, t) in clean.iter().enumerate() {
            if model.has_nu() && model.hopf(t)? != *self.form.entry(i, i) {
                return Err(CatalogError::InvalidModel(format!(
                    "H(t_{}) must equal the self-intersection {}",
                    i + 1,
                    self.form.entry(i, i)
                )));
            }
        }
        self.homotopy = Some((model, clean));
        Ok(self)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn form(&self) -> &IntersectionForm {
        &self.form
    }

    pub fn simply_connected(&self) -> bool {
        self.simply_connected
    }

    pub fn highly_connected(&self) -> bool {
        self.highly_connected
    }

    /// Explicit homotopy data, if attached.
    pub fn homotopy_data(&self) -> Option<(&PiModel, &[PiElement])> {
        self.homotopy.as_ref().map(|(m, d)| (m, d.as_slice()))
    }

    /// Homotopy data to use in the homotopy condition: the attached data, or
    /// for simply connected 4-manifolds `t_i = a_ii·ν`, which the form
    /// determines.
    pub fn homotopy_invariants(&self) -> Option<(PiModel, Vec<PiElement>)> {
        if let Some((m, d)) = &self.homotopy {
            return Some((m.clone(), d.clone()));
        }
        if self.n == 2 && self.simply_connected {
            let model = PiModel::n2();
            let data = model.diagonal_invariants(self.form.matrix()).expect("λ = 1 for n = 2");
            return Some((model, data));
        }
        None
    }

    pub fn renamed(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }
}

impl fmt::Display for ManifoldModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.name)
    }
}

pub fn connected_sum(a: &ManifoldModel, b: &ManifoldModel) -> Result<ManifoldModel, CatalogError> {
    if a.n != b.n {
        return Err(CatalogError::DimensionMismatch(a.n, b.n));
    }
    let form = a.form.direct_sum(&b.form)?;
    let homotopy = match (&a.homotopy, &b.homotopy) {
        (Some((ma, da)), Some((mb, db))) if ma == mb => Some((ma.clone(), da.iter().chain(db).cloned().collect())),
        _ => None,
    };
    Ok(ManifoldModel {
        name: format!("{}#{}", a.name, b.name),
        n: a.n,
        form,
        simply_connected: a.simply_connected && b.simply_connected,
        highly_connected: a.highly_connected && b.highly_connected,
        homotopy,
    })
}

/// `-M`: the form is negated. Attached homotopy data is dropped, since its
/// behaviour under reversal is not part of the model.
pub fn reverse_orientation(m: &ManifoldModel) -> ManifoldModel {
    let name = match m.name.strip_prefix('-') {
        Some(rest) => rest.to_string(),
        None => format!("-{}", m.name),
    };
    ManifoldModel { name, form: m.form.negated(), homotopy: None, ..m.clone() }
}

/// `⊕_l [[0,1],[1,0]]`.
pub fn hyperbolic(l: usize) -> IntMatrix {
    let h = Matrix::from_rows(vec![vec![BigInt::from(0), BigInt::from(1)], vec![BigInt::from(1), BigInt::from(0)]])
        .expect("2x2");
    (0..l).fold(Matrix::zeros(0, 0), |acc, _| acc.block_diag(&h))
}

fn four_manifold(name: &str, matrix: IntMatrix, simply_connected: bool) -> ManifoldModel {
    let form = crate::intform::make_form(matrix, Symmetry::Symmetric).expect("preset forms are unimodular");
    ManifoldModel::new(name, 2, form, simply_connected, simply_connected).expect("preset flags are consistent")
}

fn diag(entries: &[i64]) -> IntMatrix {
    Matrix::diagonal(&entries.iter().map(|&e| BigInt::from(e)).collect::<Vec<_>>())
}

/// Canonical preset names, in listing order.
pub const PRESET_NAMES: &[&str] =
    &["CP2", "minusCP2", "S2xS2", "CP2#CP2", "CP2#(-CP2)", "T4", "FsxFr(1,1)", "#2(S2xS2)", "#3(S2xS2)"];

/// Looks up a preset by name. The families `FsxFr(s,r)` (product of closed
/// orientable surfaces of genus `s` and `r`) and `#q(S2xS2)` accept any
/// non-negative parameters; `−` may be written as a Unicode minus.
pub fn preset(name: &str) -> Result<ManifoldModel, CatalogError> {
    let norm = name.trim().replace('\u{2212}', "-");
    let unknown = || CatalogError::UnknownPreset(name.to_string());
    let model = match norm.as_str() {
        "CP2" => four_manifold("CP2", diag(&[1]), true),
        "minusCP2" | "-CP2" => four_manifold("minusCP2", diag(&[-1]), true),
        "S2xS2" => four_manifold("S2xS2", hyperbolic(1), true),
        "CP2#CP2" => four_manifold("CP2#CP2", diag(&[1, 1]), true),
        "CP2#(-CP2)" | "CP2#-CP2" | "CP2#minusCP2" => four_manifold("CP2#(-CP2)", diag(&[1, -1]), true),
        "T4" => four_manifold("T4", hyperbolic(3), false),
        _ => {
            if let Some(args) = norm.strip_prefix("FsxFr(").and_then(|s| s.strip_suffix(')')) {
                let (s, r) = args.split_once(',').ok_or_else(unknown)?;
                let s: usize = s.trim().parse().map_err(|_| unknown())?;
                let r: usize = r.trim().parse().map_err(|_| unknown())?;
                if s == 0 && r == 0 {
                    return preset("S2xS2");
                }
                let q = 2 * r.checked_mul(s).ok_or_else(unknown)? + 1;
                four_manifold(&format!("FsxFr({s},{r})"), hyperbolic(q), false)
            } else if let Some(rest) = norm.strip_prefix('#') {
                let q = rest.strip_suffix("(S2xS2)").or_else(|| rest.strip_suffix("S2xS2")).ok_or_else(unknown)?;
                let q: usize = q.trim().parse().map_err(|_| unknown())?;
                four_manifold(&format!("#{q}(S2xS2)"), hyperbolic(q), true)
            } else {
                return Err(unknown());
            }
        }
    };
    Ok(model)
}

/// Every model in [`PRESET_NAMES`].
pub fn catalog() -> Vec<ManifoldModel> {
    PRESET_NAMES.iter().map(|n| preset(n).expect("listed preset")).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::intform::{isomorphic, Parity, Signature};
    use num_traits::Signed;
    use crate::matrix::int_matrix;
    use crate::solver::SearchConfig;

    #[test]
    fn preset_forms() {
        let t4 = preset("T4").unwrap();
        assert_eq!(t4.form().matrix(), &hyperbolic(3));
        assert!(!t4.simply_connected());
        assert_eq!(preset("CP2#(−CP2)").unwrap().form().matrix(), &int_matrix(&[&[1, 0], &[0, -1]]));
        let f11 = preset("FsxFr(1,1)").unwrap();
        assert_eq!(f11.form().rank(), 6);
        assert!(!f11.simply_connected());
        assert_eq!(preset("FsxFr(2,1)").unwrap().form().rank(), 2 + 4 * 2);
        assert_eq!(preset("FsxFr(0,0)").unwrap(), preset("S2xS2").unwrap());
        assert_eq!(preset("FsxFr(0,3)").unwrap().form().matrix(), &hyperbolic(1));
        assert_eq!(preset("#3(S2xS2)").unwrap().form().matrix(), &hyperbolic(3));
        assert_eq!(preset("#0(S2xS2)").unwrap().form().rank(), 0);
        assert!(matches!(preset("K3"), Err(CatalogError::UnknownPreset(_))));
        assert!(matches!(preset("FsxFr(1)"), Err(CatalogError::UnknownPreset(_))));
        for m in catalog() {
            assert_eq!(m.form().det().abs(), BigInt::from(1), "{m}");
        }
    }

    #[test]
    fn sums_and_reversal() {
        let cp2 = preset("CP2").unwrap();
        let s = connected_sum(&cp2, &cp2).unwrap();
        assert_eq!(s.form().matrix(), preset("CP2#CP2").unwrap().form().matrix());
        let mixed = connected_sum(&cp2, &preset("minusCP2").unwrap()).unwrap();
        assert_eq!(mixed.form().matrix(), &int_matrix(&[&[1, 0], &[0, -1]]));
        let s2 = preset("S2xS2").unwrap();
        let s3 = connected_sum(&connected_sum(&s2, &s2).unwrap(), &s2).unwrap();
        assert_eq!(s3.form().matrix(), &hyperbolic(3));

        let rev = reverse_orientation(&cp2);
        assert_eq!(rev.name(), "-CP2");
        assert_eq!(rev.form().matrix(), &int_matrix(&[&[-1]]));
        assert_eq!(reverse_orientation(&rev), cp2);
        let rs2 = reverse_orientation(&s2);
        let iso = isomorphic(rs2.form(), s2.form(), &SearchConfig::default());
        assert!(iso.is_isomorphic());
        assert_eq!(rs2.form().signature().unwrap(), Signature::new(1, 1, 0));
        assert_eq!(rs2.form().parity(), Parity::Even);

        let odd = ManifoldModel::new("X", 3, IntersectionForm::empty(Symmetry::Antisymmetric), true, true).unwrap();
        assert_eq!(connected_sum(&cp2, &odd), Err(CatalogError::DimensionMismatch(2, 3)));
    }

    #[test]
    fn sum_is_commutative_and_associative_up_to_isomorphism() {
        let cfg = SearchConfig::default();
        let ms = catalog();
        for a in &ms[..5] {
            for b in &ms[..5] {
                let ab = connected_sum(a, b).unwrap();
                let ba = connected_sum(b, a).unwrap();
                assert!(isomorphic(ab.form(), ba.form(), &cfg).is_isomorphic(), "{a} {b}");
                for c in &ms[..3] {
                    let l = connected_sum(&ab, c).unwrap();
                    let r = connected_sum(a, &connected_sum(b, c).unwrap()).unwrap();
                    assert!(isomorphic(l.form(), r.form(), &cfg).is_isomorphic());
                }
            }
        }
    }

    #[test]
    fn four_manifold_invariants_follow_the_diagonal() {
        let (model, t) = preset("CP2#(-CP2)").unwrap().homotopy_invariants().unwrap();
        assert_eq!(model, PiModel::n2());
        assert_eq!(t.iter().map(|e| e.nu.clone()).collect::<Vec<_>>(), vec![BigInt::from(1), BigInt::from(-1)]);
        assert!(preset("T4").unwrap().homotopy_invariants().is_none());
    }

    #[test]
    fn attaching_homotopy_data() {
        let model = PiModel::generic_even(6, vec![2], vec![1]).unwrap();
        let form = crate::intform::make_form(hyperbolic(1), Symmetry::Symmetric).unwrap();
        let m = ManifoldModel::new("W", 6, form.clone(), true, true).unwrap();
        let data = vec![model.element(0.into(), &[1.into()]).unwrap(), model.zero()];
        let m = m.with_homotopy_data(model.clone(), data.clone()).unwrap();
        assert_eq!(m.homotopy_data().unwrap().1, data.as_slice());
        let bad = vec![model.nu().unwrap(), model.zero()];
        let m2 = ManifoldModel::new("W", 6, form, true, true).unwrap();
        assert!(matches!(m2.with_homotopy_data(model, bad), Err(CatalogError::InvalidModel(_))));
    }
}
