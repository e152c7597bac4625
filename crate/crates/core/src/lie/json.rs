use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{GVector, LieAlgebraModel, Sl2Triple};
use crate::error::{Error, Result};
use crate::scalar::{format_rational, parse_rational, Rational};

/// On-disk algebra description. Rationals are strings such as `"-3/2"`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AlgebraDocument {
    #[serde(default)]
    pub name: Option<String>,
    pub dim: usize,
    pub basis_names: Vec<String>,
    /// Sparse triplets `[i, j, k, "p/q"]` meaning c[i][j][k] = p/q.
    pub structure_constants: Vec<(usize, usize, usize, String)>,
    #[serde(default)]
    pub lattice_basis: Option<Vec<Vec<String>>>,
    #[serde(default)]
    pub sl2_triple: Option<TripleDocument>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TripleDocument {
    pub e: Vec<String>,
    pub h: Vec<String>,
    pub f: Vec<String>,
}

fn parse_vec(v: &[String], dim: usize) -> Result<GVector<Rational>> {
    if v.len() != dim {
        return Err(Error::DimensionMismatch { expected: dim, got: v.len() });
    }
    Ok(GVector::new(v.iter().map(|s| parse_rational(s)).collect::<Result<_>>()?))
}

fn render_vec(v: &GVector<Rational>) -> Vec<String> {
    v.coords.iter().map(format_rational).collect()
}

impl AlgebraDocument {
    pub fn into_model(self) -> Result<LieAlgebraModel> {
        if self.basis_names.len() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, got: self.basis_names.len() });
        }
        let constants = self
            .structure_constants
            .iter()
            .map(|(i, j, k, c)| Ok((*i, *j, *k, parse_rational(c)?)))
            .collect::<Result<Vec<_>>>()?;
        let lattice = self
            .lattice_basis
            .as_ref()
            .map(|l| l.iter().map(|v| parse_vec(v, self.dim)).collect::<Result<Vec<_>>>())
            .transpose()?;
        let triple = self
            .sl2_triple
            .as_ref()
            .map(|t| {
                Ok::<_, Error>(Sl2Triple {
                    e: parse_vec(&t.e, self.dim)?,
                    h: parse_vec(&t.h, self.dim)?,
                    f: parse_vec(&t.f, self.dim)?,
                })
            })
            .transpose()?;
        LieAlgebraModel::new(
            self.name.unwrap_or_else(|| "custom".into()),
            self.basis_names,
            &constants,
            lattice,
            triple,
            None,
        )
    }

    pub fn from_model(m: &LieAlgebraModel) -> Self {
        Self {
            name: Some(m.name().to_string()),
            dim: m.dim(),
            basis_names: m.basis_names().to_vec(),
            structure_constants: m
                .structure_constants()
                .iter()
                .filter(|(i, j, _, _)| i < j)
                .map(|(i, j, k, c)| (*i, *j, *k, format_rational(c)))
                .collect(),
            lattice_basis: Some(m.lattice_basis().iter().map(render_vec).collect()),
            sl2_triple: m.sl2_triple().map(|t| TripleDocument {
                e: render_vec(&t.e),
                h: render_vec(&t.h),
                f: render_vec(&t.f),
            }),
        }
    }
}

impl LieAlgebraModel {
    pub fn from_json_str(s: &str) -> Result<Self> {
        serde_json::from_str::<AlgebraDocument>(s)?.into_model()
    }

    pub fn from_json_file(path: &Path) -> Result<Self> {
        let s = std::fs::read_to_string(path)
            .map_err(|e| Error::Parse(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json_str(&s)
    }

    pub fn to_json_string(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&AlgebraDocument::from_model(self))?)
    }
}
