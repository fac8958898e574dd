//! File formats.
//!
//! Matrix text format: a `rows cols` header line followed by `rows` lines of
//! space-separated integers. Blank lines and `#` comments are ignored.
//!
//! Structured documents are JSON. A matrix document is
//! `{"rows", "cols", "entries", "symmetry"}` with `entries` flat in row-major
//! order; integers that do not fit in 64 bits are written as strings. A
//! manifold document adds `name`, `n`, the connectivity flags and optional
//! homotopy data.

use std::path::Path;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::catalog::{self, CatalogError, ManifoldModel};
use crate::homotopy::{PiElement, PiModel};
use crate::intform::{make_form, FormError, IntersectionForm, Symmetry};
use crate::matrix::Matrix;
use crate::IntMatrix;

#[derive(Debug, Error)]
pub enum IoError {
    #[error("cannot read {path}: {source}")]
    Read { path: String, source: std::io::Error },
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Form(#[from] FormError),
    #[error(transparent)]
    Catalog(#[from] CatalogError),
}

/// Serde adapters writing `BigInt` as a JSON number when it fits in `i64`
/// and as a decimal string otherwise. Both forms are accepted on input.
pub mod big {
    use num_bigint::BigInt;
    use num_traits::ToPrimitive;
    use serde::de::Error as _;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    #[derive(Serialize, Deserialize)]
    #[serde(untagged)]
    pub(crate) enum Repr {
        Small(i64),
        Text(String),
    }

    pub(crate) fn to_repr(v: &BigInt) -> Repr {
        match v.to_i64() {
            Some(x) => Repr::Small(x),
            None => Repr::Text(v.to_string()),
        }
    }

    pub(crate) fn from_repr(r: Repr) -> Result<BigInt, String> {
        match r {
            Repr::Small(x) => Ok(BigInt::from(x)),
            Repr::Text(s) => s.trim().parse().map_err(|_| format!("not an integer: {s:?}")),
        }
    }

    pub fn serialize<S: Serializer>(v: &BigInt, s: S) -> Result<S::Ok, S::Error> {
        to_repr(v).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigInt, D::Error> {
        from_repr(Repr::deserialize(d)?).map_err(D::Error::custom)
    }

    pub mod vec {
        use super::*;

        pub fn serialize<S: Serializer>(v: &[BigInt], s: S) -> Result<S::Ok, S::Error> {
            v.iter().map(to_repr).collect::<Vec<_>>().serialize(s)
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<BigInt>, D::Error> {
            Vec::<Repr>::deserialize(d)?.into_iter().map(|r| from_repr(r).map_err(D::Error::custom)).collect()
        }
    }
}

/// Parses the text format.
pub fn parse_matrix_text(text: &str) -> Result<IntMatrix, IoError> {
    let mut lines = text
        .lines()
        .map(|l| l.split('#').next().unwrap_or("").trim())
        .filter(|l| !l.is_empty());
    let header = lines.next().ok_or_else(|| IoError::Parse("empty matrix file".into()))?;
    let dims: Vec<usize> = header
        .split_whitespace()
        .map(|t| t.parse().map_err(|_| IoError::Parse(format!("bad header token {t:?}"))))
        .collect::<Result<_, _>>()?;
    let [rows, cols] = dims[..] else {
        return Err(IoError::Parse(format!("header must be \"rows cols\", got {header:?}")));
    };
    let mut data = Vec::with_capacity(rows * cols);
    for r in 0..rows {
        let line = lines.next().ok_or_else(|| IoError::Parse(format!("missing row {}", r + 1)))?;
        let row: Vec<BigInt> = line
            .split_whitespace()
            .map(|t| t.parse().map_err(|_| IoError::Parse(format!("bad entry {t:?} in row {}", r + 1))))
            .collect::<Result<_, _>>()?;
        if row.len() != cols {
            return Err(IoError::Parse(format!("row {} has {} entries, expected {cols}", r + 1, row.len())));
        }
        data.extend(row);
    }
    if let Some(extra) = lines.next() {
        return Err(IoError::Parse(format!("unexpected trailing line {extra:?}")));
    }
    Matrix::new(rows, cols, data).map_err(|e| IoError::Parse(e.to_string()))
}

pub fn format_matrix_text(m: &IntMatrix) -> String {
    format!("{} {}\n{m}", m.rows(), m.cols())
}

/// Symmetric if the matrix is symmetric (including all-zero), else
/// antisymmetric if it is antisymmetric.
pub fn infer_symmetry(m: &IntMatrix) -> Result<Symmetry, FormError> {
    if !m.is_square() {
        return Err(FormError::NotSquare { rows: m.rows(), cols: m.cols() });
    }
    if m.is_symmetric() {
        Ok(Symmetry::Symmetric)
    } else if m.is_antisymmetric() {
        Ok(Symmetry::Antisymmetric)
    } else {
        Err(FormError::SymmetryMismatch { expected: Symmetry::Symmetric })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatrixDoc {
    pub rows: usize,
    pub cols: usize,
    #[serde(with = "big::vec")]
    pub entries: Vec<BigInt>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub symmetry: Option<Symmetry>,
}

impl MatrixDoc {
    pub fn from_matrix(m: &IntMatrix, symmetry: Option<Symmetry>) -> Self {
        MatrixDoc { rows: m.rows(), cols: m.cols(), entries: m.entries().to_vec(), symmetry }
    }

    pub fn from_form(f: &IntersectionForm) -> Self {
        MatrixDoc::from_matrix(f.matrix(), Some(f.symmetry()))
    }

    pub fn to_matrix(&self) -> Result<IntMatrix, IoError> {
        Matrix::new(self.rows, self.cols, self.entries.clone()).map_err(|e| IoError::Parse(e.to_string()))
    }

    pub fn to_form(&self) -> Result<IntersectionForm, IoError> {
        let m = self.to_matrix()?;
        let sym = match self.symmetry {
            Some(s) => s,
            None => infer_symmetry(&m)?,
        };
        Ok(make_form(m, sym)?)
    }
}

/// A manifold in structured form. Optional fields default to a highly
/// connected manifold whose dimension follows the form's symmetry.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ManifoldDoc {
    #[serde(default)]
    pub name: Option<String>,
    #[serde(default)]
    pub n: Option<u32>,
    #[serde(flatten)]
    pub form: MatrixDoc,
    #[serde(default)]
    pub simply_connected: Option<bool>,
    #[serde(default)]
    pub highly_connected: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pi_model: Option<PiModel>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub homotopy_data: Option<Vec<PiElement>>,
}

impl ManifoldDoc {
    pub fn from_model(m: &ManifoldModel) -> Self {
        let (pi_model, homotopy_data) = match m.homotopy_data() {
            Some((pm, d)) => (Some(pm.clone()), Some(d.to_vec())),
            None => (None, None),
        };
        ManifoldDoc {
            name: Some(m.name().to_string()),
            n: Some(m.n()),
            form: MatrixDoc::from_form(m.form()),
            simply_connected: Some(m.simply_connected()),
            highly_connected: Some(m.highly_connected()),
            pi_model,
            homotopy_data,
        }
    }

    pub fn to_model(&self, default_name: &str) -> Result<ManifoldModel, IoError> {
        let form = self.form.to_form()?;
        let n = self.n.unwrap_or(match form.symmetry() {
            Symmetry::Symmetric => 2,
            Symmetry::Antisymmetric => 3,
        });
        let highly = self.highly_connected.unwrap_or(true);
        let simply = self.simply_connected.unwrap_or(highly);
        let name = self.name.clone().unwrap_or_else(|| default_name.to_string());
        let model = ManifoldModel::new(name, n, form, simply, highly)?;
        match (&self.pi_model, &self.homotopy_data) {
            (Some(pm), Some(data)) => Ok(model.with_homotopy_data(pm.clone(), data.clone())?),
            (None, None) => Ok(model),
            _ => Err(IoError::Parse("pi_model and homotopy_data must be given together".into())),
        }
    }
}

fn read(path: &Path) -> Result<String, IoError> {
    std::fs::read_to_string(path).map_err(|source| IoError::Read { path: path.display().to_string(), source })
}

/// Parses either format, choosing JSON when the text starts with `{`.
pub fn parse_matrix(text: &str) -> Result<(IntMatrix, Option<Symmetry>), IoError> {
    if text.trim_start().starts_with('{') {
        let doc: MatrixDoc = serde_json::from_str(text).map_err(|e| IoError::Parse(e.to_string()))?;
        Ok((doc.to_matrix()?, doc.symmetry))
    } else {
        Ok((parse_matrix_text(text)?, None))
    }
}

pub fn load_form(path: &Path) -> Result<IntersectionForm, IoError> {
    let (m, sym) = parse_matrix(&read(path)?)?;
    let sym = match sym {
        Some(s) => s,
        None => infer_symmetry(&m)?,
    };
    Ok(make_form(m, sym)?)
}

/// Loads a manifold from a text matrix or a JSON manifold document. A bare
/// matrix is named after the file stem.
pub fn load_manifold(path: &Path) -> Result<ManifoldModel, IoError> {
    let text = read(path)?;
    let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let doc = if text.trim_start().starts_with('{') {
        serde_json::from_str(&text).map_err(|e| IoError::Parse(e.to_string()))?
    } else {
        let m = parse_matrix_text(&text)?;
        ManifoldDoc {
            name: None,
            n: None,
            form: MatrixDoc::from_matrix(&m, None),
            simply_connected: None,
            highly_connected: None,
            pi_model: None,
            homotopy_data: None,
        }
    };
    doc.to_model(&stem)
}

/// `@path` loads a file; anything else is a preset name.
pub fn resolve_manifold(spec: &str) -> Result<ManifoldModel, IoError> {
    match spec.strip_prefix('@') {
        Some(path) => load_manifold(Path::new(path)),
        None => Ok(catalog::preset(spec)?),
    }
}

/// `@path` loads a form; anything else is a preset whose form is used.
pub fn resolve_form(spec: &str) -> Result<IntersectionForm, IoError> {
    match spec.strip_prefix('@') {
        Some(path) => load_form(Path::new(path)),
        None => Ok(catalog::preset(spec)?.form().clone()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::int_matrix;

    #[test]
    fn text_round_trip() {
        let m = int_matrix(&[&[0, 1], &[1, 0]]);
        let text = format_matrix_text(&m);
        assert_eq!(text, "2 2\n0 1\n1 0\n");
        assert_eq!(parse_matrix_text(&text).unwrap(), m);
        let commented = "# hyperbolic plane\n2 2\n0 1 # first row\n\n1 0\n";
        assert_eq!(parse_matrix_text(commented).unwrap(), m);
        assert_eq!(parse_matrix_text("0 0\n").unwrap().shape(), (0, 0));
    }

    #[test]
    fn text_errors() {
        assert!(parse_matrix_text("").is_err());
        assert!(parse_matrix_text("2 2\n1 0\n").is_err());
        assert!(parse_matrix_text("2 2\n1 0\n0\n").is_err());
        assert!(parse_matrix_text("1 1\nx\n").is_err());
        assert!(parse_matrix_text("1 1\n1\n2\n").is_err());
    }

    #[test]
    fn json_big_entries_are_strings() {
        let huge: BigInt = "123456789012345678901234567890".parse().unwrap();
        let m = Matrix::new(1, 2, vec![BigInt::from(-3), huge.clone()]).unwrap();
        let doc = MatrixDoc::from_matrix(&m, None);
        let json = serde_json::to_string(&doc).unwrap();
        assert_eq!(json, r#"{"rows":1,"cols":2,"entries":[-3,"123456789012345678901234567890"]}"#);
        let back: MatrixDoc = serde_json::from_str(&json).unwrap();
        assert_eq!(back.to_matrix().unwrap(), m);
    }

    #[test]
    fn symmetry_is_inferred_or_checked() {
        let (m, s) = parse_matrix(r#"{"rows":2,"cols":2,"entries":[0,1,-1,0]}"#).unwrap();
        assert_eq!(s, None);
        assert_eq!(infer_symmetry(&m).unwrap(), Symmetry::Antisymmetric);
        let doc: MatrixDoc =
            serde_json::from_str(r#"{"rows":2,"cols":2,"entries":[0,1,-1,0],"symmetry":"symmetric"}"#).unwrap();
        assert!(matches!(doc.to_form(), Err(IoError::Form(FormError::SymmetryMismatch { .. }))));
        let doc: MatrixDoc = serde_json::from_str(r#"{"rows":2,"cols":2,"entries":[1,0,0,2]}"#).unwrap();
        assert!(matches!(doc.to_form(), Err(IoError::Form(FormError::NotUnimodular { .. }))));
    }

    #[test]
    fn manifold_documents() {
        let t4 = catalog::preset("T4").unwrap();
        let doc = ManifoldDoc::from_model(&t4);
        let json = serde_json::to_string(&doc).unwrap();
        let back: ManifoldDoc = serde_json::from_str(&json).unwrap();
        assert_eq!(back.to_model("x").unwrap(), t4);

        let bare: ManifoldDoc = serde_json::from_str(r#"{"rows":1,"cols":1,"entries":[1]}"#).unwrap();
        let m = bare.to_model("mine").unwrap();
        assert_eq!((m.name(), m.n(), m.simply_connected(), m.highly_connected()), ("mine", 2, true, true));

        let with_data = r#"{"name":"W","n":6,"rows":2,"cols":2,"entries":[0,1,1,0],
            "pi_model":{"n":6,"torsion_orders":[2],"whitehead":{"nu":1,"torsion":[1]}},
            "homotopy_data":[{"nu":0,"torsion":[1]},{"nu":0,"torsion":[0]}]}"#;
        let doc: ManifoldDoc = serde_json::from_str(with_data).unwrap();
        let m = doc.to_model("x").unwrap();
        assert_eq!(m.homotopy_data().unwrap().0.torsion_orders(), &[2]);
        let again: ManifoldDoc = serde_json::from_str(&serde_json::to_string(&ManifoldDoc::from_model(&m)).unwrap()).unwrap();
        assert_eq!(again.to_model("x").unwrap(), m);
    }
}
