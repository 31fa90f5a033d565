//! Text I/O: expressions and versioned CMF documents (TOML).

mod parser;

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

pub use parser::parse_expr;

use crate::cmf_core::{Cmf, FuncMat};
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::ratfunc::RationalFunction;
use crate::scalar::Coeff;

pub const FORMAT_VERSION: i64 = 1;

/// Names that user documents may not declare.
pub const RESERVED_NAMES: &[&str] = &["n"];

/// Renders an expression that [`parse_expr`] reads back to an equal value.
pub fn print_expr<T: Coeff>(f: &RationalFunction<T>, names: &[String]) -> String {
    f.to_string_with(names)
}

/// A named matrix stored alongside the generators (M_θ, coboundary A).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AuxMatrix {
    pub name: String,
    pub matrix: Vec<Vec<String>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CmfDocument {
    pub format_version: i64,
    #[serde(default)]
    pub name: String,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub description: String,
    pub dim: usize,
    pub rank: usize,
    pub variables: Vec<String>,
    #[serde(default)]
    pub parameters: Vec<String>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub metadata: BTreeMap<String, String>,
    #[serde(rename = "generator")]
    pub generators: Vec<Generator>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub aux: Vec<AuxMatrix>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Generator {
    pub matrix: Vec<Vec<String>>,
}

impl CmfDocument {
    pub fn from_toml(text: &str) -> Result<Self> {
        Ok(toml::from_str(text)?)
    }

    pub fn to_toml(&self) -> Result<String> {
        Ok(toml::to_string_pretty(self)?)
    }

    pub fn read(path: &Path) -> Result<Self> {
        Self::from_toml(&std::fs::read_to_string(path)?)
    }

    /// Names in index order: variables then parameters.
    pub fn names(&self) -> Vec<String> {
        self.variables.iter().chain(&self.parameters).cloned().collect()
    }

    /// Structural checks that do not need parsing.
    pub fn validate(&self) -> Result<()> {
        if self.format_version != FORMAT_VERSION {
            return Err(Error::FormatVersion(self.format_version));
        }
        if self.dim == 0 || self.rank == 0 {
            return Err(Error::Document("dim and rank must be positive".into()));
        }
        if self.variables.len() != self.dim {
            return Err(Error::Document(format!("{} variables for dim {}", self.variables.len(), self.dim)));
        }
        if self.generators.len() != self.dim {
            return Err(Error::Document(format!("{} generators for dim {}", self.generators.len(), self.dim)));
        }
        let names = self.names();
        for (i, n) in names.iter().enumerate() {
            if RESERVED_NAMES.contains(&n.as_str()) {
                return Err(Error::ReservedName(n.clone()));
            }
            let ok = n.chars().next().is_some_and(|c| c.is_ascii_alphabetic() || c == '_')
                && n.chars().all(|c| c.is_ascii_alphanumeric() || c == '_');
            if !ok {
                return Err(Error::Document(format!("invalid name `{n}`")));
            }
            if names[..i].contains(n) {
                return Err(Error::Document(format!("duplicate name `{n}`")));
            }
        }
        for (k, g) in self.generators.iter().enumerate() {
            check_shape(&g.matrix, self.rank, &format!("generator {}", k + 1))?;
        }
        for a in &self.aux {
            check_shape(&a.matrix, self.rank, &format!("aux matrix `{}`", a.name))?;
        }
        Ok(())
    }

    /// Parses an auxiliary matrix by name.
    pub fn aux_matrix<T: Coeff>(&self, name: &str) -> Result<Option<FuncMat<T>>> {
        let names = self.names();
        self.aux.iter().find(|a| a.name == name).map(|a| parse_matrix(&a.matrix, &names)).transpose()
    }
}

fn check_shape(m: &[Vec<String>], rank: usize, what: &str) -> Result<()> {
    if m.len() != rank || m.iter().any(|r| r.len() != rank) {
        return Err(Error::Document(format!("{what} is not {rank}×{rank}")));
    }
    Ok(())
}

pub fn parse_matrix<T: Coeff>(rows: &[Vec<String>], names: &[String]) -> Result<FuncMat<T>> {
    let rows = rows
        .iter()
        .map(|r| r.iter().map(|e| parse_expr(e, names)).collect::<Result<Vec<_>>>())
        .collect::<Result<Vec<_>>>()?;
    Ok(Matrix::from_rows(rows))
}

pub fn print_matrix<T: Coeff>(m: &FuncMat<T>, names: &[String]) -> Vec<Vec<String>> {
    m.to_rows().iter().map(|r| r.iter().map(|e| print_expr(e, names)).collect()).collect()
}

/// Builds the CMF of a document. Generator invertibility is checked;
/// the cocycle check is left to [`Cmf::verify`].
pub fn load_cmf<T: Coeff>(doc: &CmfDocument) -> Result<Cmf<T>> {
    doc.validate()?;
    let names = doc.names();
    let gens = doc.generators.iter().map(|g| parse_matrix(&g.matrix, &names)).collect::<Result<Vec<_>>>()?;
    let mut cmf = Cmf::new(doc.name.clone(), doc.variables.clone(), doc.parameters.clone(), gens)?;
    cmf.metadata = doc.metadata.clone();
    Ok(cmf)
}

pub fn dump_cmf<T: Coeff>(cmf: &Cmf<T>) -> CmfDocument {
    let names = cmf.names();
    CmfDocument {
        format_version: FORMAT_VERSION,
        name: cmf.name().to_string(),
        description: String::new(),
        dim: cmf.dim(),
        rank: cmf.rank(),
        variables: cmf.variables().to_vec(),
        parameters: cmf.parameters().to_vec(),
        metadata: cmf.metadata.clone(),
        generators: cmf.generators().iter().map(|g| Generator { matrix: print_matrix(g, &names) }).collect(),
        aux: Vec::new(),
    }
}
