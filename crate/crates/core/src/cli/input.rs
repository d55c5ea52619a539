//! JSON input schemas and their conversion into library types.

use num_complex::Complex64;
use serde::Deserialize;

use crate::error::{Error, Result};
use crate::kernel::ComplexMatrix;
use crate::projective::FiniteGroup;

/// `{"rows": r, "cols": c, "data": [[[re, im], ...], ...]}`, row-major.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixJson {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<Vec<[f64; 2]>>,
}

impl MatrixJson {
    pub fn to_matrix(&self) -> Result<ComplexMatrix> {
        if self.data.len() != self.rows || self.data.iter().any(|r| r.len() != self.cols) {
            return Err(Error::ShapeMismatch(format!(
                "matrix declared {}x{} but data has {} rows of lengths {:?}",
                self.rows,
                self.cols,
                self.data.len(),
                self.data.iter().map(Vec::len).collect::<Vec<_>>()
            )));
        }
        let flat = self
            .data
            .iter()
            .flatten()
            .map(|&[re, im]| Complex64::new(re, im))
            .collect();
        ComplexMatrix::from_vec(self.rows, self.cols, flat)
    }
}

pub fn matrices(list: &[MatrixJson]) -> Result<Vec<ComplexMatrix>> {
    list.iter().map(MatrixJson::to_matrix).collect()
}

pub fn vector(v: &[[f64; 2]]) -> Result<Vec<Complex64>> {
    let out: Vec<Complex64> = v.iter().map(|&[re, im]| Complex64::new(re, im)).collect();
    if out.iter().any(|z| !z.is_finite()) {
        return Err(Error::NonFinite("state vector"));
    }
    Ok(out)
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnalyzeInput {
    pub matrices: Vec<MatrixJson>,
    /// Required when `matrices` is empty.
    #[serde(default)]
    pub dim: Option<usize>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReduceInput {
    pub state: MatrixJson,
    pub projectors: Vec<MatrixJson>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WayInput {
    #[serde(rename = "P")]
    pub p: MatrixJson,
    #[serde(rename = "Q_S")]
    pub q_s: MatrixJson,
    #[serde(rename = "Q_A")]
    pub q_a: MatrixJson,
    /// When absent, the best charge-conserving unitary is searched for.
    #[serde(rename = "U", default)]
    pub u: Option<MatrixJson>,
    /// Defaults to the eigenvectors of `P`.
    #[serde(default)]
    pub s_states: Option<Vec<Vec<[f64; 2]>>>,
    pub a_states: Vec<Vec<[f64; 2]>>,
    pub a0: Vec<[f64; 2]>,
    #[serde(default)]
    pub overlap_margin: Option<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroupJson {
    pub order: usize,
    pub table: Vec<Vec<usize>>,
}

impl GroupJson {
    pub fn to_group(&self) -> Result<FiniteGroup> {
        if self.table.len() != self.order {
            return Err(Error::ShapeMismatch(format!(
                "group of order {} with a table of {} rows",
                self.order,
                self.table.len()
            )));
        }
        FiniteGroup::new(self.table.clone())
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RayRepInput {
    /// Name of a built-in example; replaces `group` and `multiplier`.
    #[serde(default)]
    pub catalog: Option<String>,
    #[serde(default)]
    pub group: Option<GroupJson>,
    #[serde(default)]
    pub multiplier: Option<Vec<Vec<[f64; 2]>>>,
    /// Second multiplier to test for similarity with the first.
    #[serde(default)]
    pub compare: Option<Vec<Vec<[f64; 2]>>>,
    /// Projective representations, one matrix per group element; with two,
    /// the direct sum is examined.
    #[serde(default)]
    pub reps: Option<Vec<Vec<MatrixJson>>>,
    #[serde(default)]
    pub root_order: Option<usize>,
}

pub fn multiplier_values(group: &FiniteGroup, table: &[Vec<[f64; 2]>]) -> Result<Vec<Complex64>> {
    let n = group.order();
    if table.len() != n || table.iter().any(|r| r.len() != n) {
        return Err(Error::ShapeMismatch(format!("multiplier table must be {n}x{n}")));
    }
    let vals: Vec<Complex64> = table.iter().flatten().map(|&[re, im]| Complex64::new(re, im)).collect();
    if vals.iter().any(|z| !z.is_finite()) {
        return Err(Error::NonFinite("multiplier"));
    }
    Ok(vals)
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RepJson {
    pub group: GroupJson,
    pub unitaries: Vec<MatrixJson>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelInput {
    pub kraus: Vec<MatrixJson>,
    /// Signed weights `w_j` in `sum_j w_j K_j rho K_j^dagger`; default 1.
    #[serde(default)]
    pub weights: Option<Vec<f64>>,
    #[serde(default)]
    pub rep: Option<RepJson>,
}

/// Parses `text` as `T`, mapping syntax and schema errors to
/// [`Error::InvalidInput`].
pub fn parse<T: for<'de> Deserialize<'de>>(text: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::InvalidInput(format!("malformed input: {e}")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matrix_roundtrip() {
        let m: MatrixJson = parse(r#"{"rows":1,"cols":2,"data":[[[1,0],[0,-1]]]}"#).unwrap();
        let m = m.to_matrix().unwrap();
        assert_eq!(m[(0, 1)], Complex64::new(0.0, -1.0));
    }

    #[test]
    fn shape_errors() {
        let m: MatrixJson = parse(r#"{"rows":2,"cols":2,"data":[[[1,0],[0,0]]]}"#).unwrap();
        assert!(matches!(m.to_matrix(), Err(Error::ShapeMismatch(_))));
    }

    #[test]
    fn unknown_fields_rejected() {
        assert!(parse::<MatrixJson>(r#"{"rows":1,"cols":1,"data":[[[1,0]]],"x":1}"#).is_err());
    }
}
