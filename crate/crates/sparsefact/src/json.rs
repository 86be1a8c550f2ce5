//! JSON schemas and file I/O for matrices, masks, support tuples, trees,
//! chain manifests, and certificates.
//!
//! Matrices: `{"rows": m, "cols": n, "complex": bool, "data": [...]}` with
//! `data` row-major; complex entries are `[re, im]` pairs, real matrices may
//! use bare scalars. Masks: `{"rows": m, "cols": n, "ones": [[k,l], ...]}`.
//! Tuples: `{"m": m, "n": n, "supports": [{"rows": [...], "cols": [...]}]}`.
//! Trees: a leaf is a layer index, an internal node a `[left, right]` pair.
//! Serialization uses the shortest digit strings that round-trip doubles
//! exactly, so written files reparse to bit-identical values.

use std::collections::BTreeSet;
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::emd::ScalingChain;
use crate::hier::TreeNode;
use crate::mask::SupportMask;
use crate::matrix::ComplexMatrix;
use crate::oracle::{CertificateStatus, PartitionCertificate};
use crate::supports::RankOneSupportTuple;
use crate::{Error, Result};

/// One matrix entry: a bare scalar when real, a `[re, im]` pair otherwise.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(untagged)]
pub enum EntryJson {
    Real(f64),
    Complex([f64; 2]),
}

impl EntryJson {
    fn value(self) -> Complex64 {
        match self {
            EntryJson::Real(re) => Complex64::new(re, 0.0),
            EntryJson::Complex([re, im]) => Complex64::new(re, im),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MatrixJson {
    pub rows: usize,
    pub cols: usize,
    pub complex: bool,
    pub data: Vec<EntryJson>,
}

impl MatrixJson {
    pub fn from_matrix(m: &ComplexMatrix) -> Self {
        let complex = m.entries().iter().any(|v| v.im != 0.0);
        let data = m
            .entries()
            .iter()
            .map(|v| {
                if complex {
                    EntryJson::Complex([v.re, v.im])
                } else {
                    EntryJson::Real(v.re)
                }
            })
            .collect();
        MatrixJson {
            rows: m.rows(),
            cols: m.cols(),
            complex,
            data,
        }
    }

    pub fn into_matrix(self) -> Result<ComplexMatrix> {
        if self.data.len() != self.rows * self.cols {
            return Err(Error::InvalidInput(format!(
                "matrix data holds {} entries, expected {}x{}",
                self.data.len(),
                self.rows,
                self.cols
            )));
        }
        ComplexMatrix::from_vec(
            self.rows,
            self.cols,
            self.data.into_iter().map(EntryJson::value).collect(),
        )
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MaskJson {
    pub rows: usize,
    pub cols: usize,
    pub ones: Vec<[usize; 2]>,
}

impl MaskJson {
    pub fn from_mask(mask: &SupportMask) -> Self {
        MaskJson {
            rows: mask.rows(),
            cols: mask.cols(),
            ones: mask.iter().map(|(k, l)| [k, l]).collect(),
        }
    }

    pub fn into_mask(self) -> Result<SupportMask> {
        SupportMask::from_indices(self.rows, self.cols, self.ones.iter().map(|&[k, l]| (k, l)))
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SupportJson {
    pub rows: Vec<usize>,
    pub cols: Vec<usize>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TupleJson {
    pub m: usize,
    pub n: usize,
    pub supports: Vec<SupportJson>,
}

impl TupleJson {
    pub fn from_tuple(tuple: &RankOneSupportTuple) -> Self {
        TupleJson {
            m: tuple.m(),
            n: tuple.n(),
            supports: (0..tuple.len())
                .map(|i| SupportJson {
                    rows: tuple.row_set(i).iter().copied().collect(),
                    cols: tuple.col_set(i).iter().copied().collect(),
                })
                .collect(),
        }
    }

    pub fn into_tuple(self) -> Result<RankOneSupportTuple> {
        let supports = self
            .supports
            .into_iter()
            .map(|s| {
                (
                    s.rows.into_iter().collect::<BTreeSet<usize>>(),
                    s.cols.into_iter().collect::<BTreeSet<usize>>(),
                )
            })
            .collect();
        RankOneSupportTuple::new(self.m, self.n, supports)
    }
}

/// Manifest tying a directory of factor files into one chain, leftmost
/// (outermost) factor first.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ChainManifestJson {
    pub n: usize,
    pub layers: usize,
    pub dft_bit_reversal: bool,
    /// File names relative to the manifest's directory.
    pub factors: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tree: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mode: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub residuals: Option<Vec<ResidualJson>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ResidualJson {
    pub level: usize,
    pub relative_error: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CertificateJson {
    pub status: String,
    pub partitions: Vec<TupleJson>,
}

impl CertificateJson {
    pub fn from_certificate(cert: &PartitionCertificate) -> Self {
        let status = match cert.status {
            CertificateStatus::Unique => "unique",
            CertificateStatus::Multiple => "multiple",
            CertificateStatus::None => "none",
        };
        CertificateJson {
            status: status.to_string(),
            partitions: cert.partitions.iter().map(TupleJson::from_tuple).collect(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScalingChainJson {
    pub equivalent: bool,
    /// Inner diagonals, innermost first, entries as `[re, im]` pairs.
    pub diagonals: Vec<Vec<[f64; 2]>>,
}

impl ScalingChainJson {
    pub fn from_witness(witness: &ScalingChain) -> Self {
        ScalingChainJson {
            equivalent: true,
            diagonals: witness
                .diagonals()
                .iter()
                .map(|d| d.iter().map(|v| [v.re, v.im]).collect())
                .collect(),
        }
    }

    pub fn not_equivalent() -> Self {
        ScalingChainJson {
            equivalent: false,
            diagonals: Vec::new(),
        }
    }
}

/// Completion report: the outcome tag, the offending cell when incompatible,
/// the recovered terms when complete, and the number of still-missing cells
/// when stalled.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CompletionJson {
    pub outcome: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cell: Option<[usize; 2]>,
    pub contributions: Vec<MatrixJson>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub missing: Option<usize>,
}

/// Tree description: a leaf is its layer index, an internal node is the pair
/// `[left, right]`.
pub fn tree_node_from_json(value: &serde_json::Value) -> Result<TreeNode> {
    match value {
        serde_json::Value::Number(num) => {
            let index = num
                .as_u64()
                .ok_or_else(|| Error::InvalidTree(format!("leaf index {num} is not natural")))?;
            Ok(TreeNode::Leaf(index as usize))
        }
        serde_json::Value::Array(pair) if pair.len() == 2 => Ok(TreeNode::Internal(
            Box::new(tree_node_from_json(&pair[0])?),
            Box::new(tree_node_from_json(&pair[1])?),
        )),
        other => Err(Error::InvalidTree(format!(
            "tree nodes are leaf indices or [left, right] pairs, found {other}"
        ))),
    }
}

pub fn tree_node_to_json(node: &TreeNode) -> serde_json::Value {
    match node {
        TreeNode::Leaf(i) => serde_json::json!(i),
        TreeNode::Internal(left, right) => {
            serde_json::json!([tree_node_to_json(left), tree_node_to_json(right)])
        }
    }
}

fn read_to_string(path: &Path) -> Result<String> {
    std::fs::read_to_string(path)
        .map_err(|e| Error::InvalidInput(format!("{}: {e}", path.display())))
}

fn write_string(path: &Path, contents: &str) -> Result<()> {
    std::fs::write(path, contents)
        .map_err(|e| Error::InvalidInput(format!("{}: {e}", path.display())))
}

fn parse<T: serde::de::DeserializeOwned>(path: &Path, text: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::InvalidInput(format!("{}: {e}", path.display())))
}

pub fn read_matrix(path: &Path) -> Result<ComplexMatrix> {
    parse::<MatrixJson>(path, &read_to_string(path)?)?.into_matrix()
}

pub fn write_matrix(path: &Path, m: &ComplexMatrix) -> Result<()> {
    let json = serde_json::to_string_pretty(&MatrixJson::from_matrix(m))?;
    write_string(path, &(json + "\n"))
}

pub fn read_tuple(path: &Path) -> Result<RankOneSupportTuple> {
    parse::<TupleJson>(path, &read_to_string(path)?)?.into_tuple()
}

pub fn write_tuple(path: &Path, tuple: &RankOneSupportTuple) -> Result<()> {
    let json = serde_json::to_string_pretty(&TupleJson::from_tuple(tuple))?;
    write_string(path, &(json + "\n"))
}

pub fn read_manifest(path: &Path) -> Result<ChainManifestJson> {
    parse(path, &read_to_string(path)?)
}

pub fn write_manifest(path: &Path, manifest: &ChainManifestJson) -> Result<()> {
    let json = serde_json::to_string_pretty(manifest)?;
    write_string(path, &(json + "\n"))
}

pub fn read_tree(path: &Path) -> Result<TreeNode> {
    let value: serde_json::Value = parse(path, &read_to_string(path)?)?;
    tree_node_from_json(&value)
}

/// Read a chain from a manifest: factor files resolve relative to the
/// manifest's directory. Returns factors leftmost first.
pub fn read_chain(dir: &Path) -> Result<(ChainManifestJson, Vec<ComplexMatrix>)> {
    let manifest = read_manifest(&dir.join("manifest.json"))?;
    let factors = manifest
        .factors
        .iter()
        .map(|name| read_matrix(&dir.join(name)))
        .collect::<Result<Vec<_>>>()?;
    Ok((manifest, factors))
}

pub fn pretty(value: &impl Serialize) -> Result<String> {
    Ok(serde_json::to_string_pretty(value)?)
}
