//! On-disk state format.
//!
//! Line-delimited structured text with explicit `[re, im]` pairs, so any
//! language can parse it with string splitting alone; a JSON rendering of
//! the same record (as emitted by `--json` reports) is accepted
//! interchangeably. Fields: `version`, `kind`, `dA`, `dB`, `matrix`,
//! optional `label`.
//!
//! ```text
//! version: 1
//! kind: bipartite-density
//! dA: 2
//! dB: 2
//! label: bell pair
//! matrix:
//! [0.5, 0] [0, 0] [0, 0] [0.5, 0]
//! [0, 0] [0, 0] [0, 0] [0, 0]
//! [0, 0] [0, 0] [0, 0] [0, 0]
//! [0.5, 0] [0, 0] [0, 0] [0.5, 0]
//! ```
//!
//! `kind: joint-pmf` stores `dA·dB` bare reals instead of complex pairs.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::classical::JointPMF;
use crate::error::{Error, Result};
use crate::matcore::{Complex64, ComplexMatrix};
use crate::states::BipartiteState;

pub const FORMAT_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum StateKind {
    #[serde(rename = "bipartite-density")]
    BipartiteDensity,
    #[serde(rename = "joint-pmf")]
    JointPmf,
}

impl StateKind {
    pub fn name(&self) -> &'static str {
        match self {
            StateKind::BipartiteDensity => "bipartite-density",
            StateKind::JointPmf => "joint-pmf",
        }
    }
}

/// One matrix entry: a complex `[re, im]` pair for bipartite states, a bare
/// real for PMFs.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MatrixEntry {
    Pair([f64; 2]),
    Real(f64),
}

/// Parsed state-file record; validation into a typed state happens in
/// [`StateFile::to_bipartite`] / [`StateFile::to_pmf`].
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct StateFile {
    pub version: u32,
    pub kind: StateKind,
    #[serde(rename = "dA")]
    pub dim_a: usize,
    #[serde(rename = "dB")]
    pub dim_b: usize,
    pub matrix: Vec<MatrixEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
}

impl StateFile {
    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::parse(&text)
    }

    /// Parses either the line format or its JSON rendering (detected by a
    /// leading `{`).
    pub fn parse(text: &str) -> Result<Self> {
        let record = if text.trim_start().starts_with('{') {
            serde_json::from_str(text)?
        } else {
            parse_text(text)?
        };
        validate_record(record)
    }

    pub fn from_bipartite(s: &BipartiteState, label: Option<String>) -> Self {
        let dim = s.dim();
        let mut matrix = Vec::with_capacity(dim * dim);
        for i in 0..dim {
            for j in 0..dim {
                let z = s.matrix().get(i, j);
                matrix.push(MatrixEntry::Pair([z.re, z.im]));
            }
        }
        Self {
            version: FORMAT_VERSION,
            kind: StateKind::BipartiteDensity,
            dim_a: s.dim_a(),
            dim_b: s.dim_b(),
            matrix,
            label,
        }
    }

    pub fn from_pmf(pmf: &JointPMF, label: Option<String>) -> Self {
        Self {
            version: FORMAT_VERSION,
            kind: StateKind::JointPmf,
            dim_a: pmf.size_a(),
            dim_b: pmf.size_b(),
            matrix: pmf.entries().iter().map(|&v| MatrixEntry::Real(v)).collect(),
            label,
        }
    }

    /// Validates into a bipartite density state; fails with the violated
    /// invariant and its margin.
    pub fn to_bipartite(&self) -> Result<BipartiteState> {
        if self.kind != StateKind::BipartiteDensity {
            return Err(Error::KindMismatch {
                expected: StateKind::BipartiteDensity.name().to_string(),
                found: self.kind.name().to_string(),
            });
        }
        let dim = self.dim_a * self.dim_b;
        let mut entries = Vec::with_capacity(dim * dim);
        for entry in &self.matrix {
            match entry {
                MatrixEntry::Pair([re, im]) => entries.push(Complex64::new(*re, *im)),
                MatrixEntry::Real(_) => {
                    return Err(Error::Parse {
                        line: 0,
                        message: "bipartite-density matrix entries must be [re, im] pairs"
                            .to_string(),
                    })
                }
            }
        }
        let m = ComplexMatrix::from_fn(dim, |i, j| entries[i * dim + j])?;
        BipartiteState::from_matrix(m, self.dim_a, self.dim_b)
    }

    /// Validates into a joint PMF.
    pub fn to_pmf(&self) -> Result<JointPMF> {
        if self.kind != StateKind::JointPmf {
            return Err(Error::KindMismatch {
                expected: StateKind::JointPmf.name().to_string(),
                found: self.kind.name().to_string(),
            });
        }
        let mut entries = Vec::with_capacity(self.matrix.len());
        for entry in &self.matrix {
            match entry {
                MatrixEntry::Real(v) => entries.push(*v),
                MatrixEntry::Pair(_) => {
                    return Err(Error::Parse {
                        line: 0,
                        message: "joint-pmf matrix entries must be bare reals".to_string(),
                    })
                }
            }
        }
        JointPMF::new(self.dim_a, self.dim_b, entries)
    }

    /// Renders the line format. Floats use the shortest round-trip
    /// representation, so write → parse is exact.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("version: {}\n", self.version));
        out.push_str(&format!("kind: {}\n", self.kind.name()));
        out.push_str(&format!("dA: {}\n", self.dim_a));
        out.push_str(&format!("dB: {}\n", self.dim_b));
        if let Some(label) = &self.label {
            out.push_str(&format!("label: {label}\n"));
        }
        out.push_str("matrix:\n");
        let per_row = match self.kind {
            StateKind::BipartiteDensity => self.dim_a * self.dim_b,
            StateKind::JointPmf => self.dim_b,
        };
        for (i, entry) in self.matrix.iter().enumerate() {
            match entry {
                MatrixEntry::Pair([re, im]) => out.push_str(&format!("[{re}, {im}]")),
                MatrixEntry::Real(v) => out.push_str(&format!("{v}")),
            }
            if (i + 1) % per_row == 0 {
                out.push('\n');
            } else {
                out.push(' ');
            }
        }
        out
    }
}

fn validate_record(record: StateFile) -> Result<StateFile> {
    if record.version != FORMAT_VERSION {
        return Err(Error::UnsupportedVersion {
            found: record.version,
        });
    }
    let expected = match record.kind {
        StateKind::BipartiteDensity => {
            let dim = record.dim_a * record.dim_b;
            dim * dim
        }
        StateKind::JointPmf => record.dim_a * record.dim_b,
    };
    if record.matrix.len() != expected {
        return Err(Error::Parse {
            line: 0,
            message: format!(
                "matrix has {} entries, expected {expected} for kind {} with dA={}, dB={}",
                record.matrix.len(),
                record.kind.name(),
                record.dim_a,
                record.dim_b
            ),
        });
    }
    Ok(record)
}

fn parse_text(text: &str) -> Result<StateFile> {
    let mut version: Option<u32> = None;
    let mut kind: Option<StateKind> = None;
    let mut dim_a: Option<usize> = None;
    let mut dim_b: Option<usize> = None;
    let mut label: Option<String> = None;
    let mut matrix: Vec<MatrixEntry> = Vec::new();
    let mut in_matrix = false;
    let mut header_line = 0usize;

    for (index, raw) in text.lines().enumerate() {
        let line_no = index + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if in_matrix {
            parse_matrix_line(line, line_no, kind, &mut matrix)?;
            continue;
        }
        let (key, value) = line.split_once(':').ok_or_else(|| Error::Parse {
            line: line_no,
            message: format!("expected 'key: value', found '{line}'"),
        })?;
        let value = value.trim();
        match key.trim() {
            "version" => {
                version = Some(value.parse().map_err(|_| Error::Parse {
                    line: line_no,
                    message: format!("version must be an integer, found '{value}'"),
                })?)
            }
            "kind" => {
                kind = Some(match value {
                    "bipartite-density" => StateKind::BipartiteDensity,
                    "joint-pmf" => StateKind::JointPmf,
                    other => {
                        return Err(Error::Parse {
                            line: line_no,
                            message: format!(
                                "kind must be 'bipartite-density' or 'joint-pmf', found '{other}'"
                            ),
                        })
                    }
                })
            }
            "dA" => {
                dim_a = Some(value.parse().map_err(|_| Error::Parse {
                    line: line_no,
                    message: format!("dA must be a positive integer, found '{value}'"),
                })?)
            }
            "dB" => {
                dim_b = Some(value.parse().map_err(|_| Error::Parse {
                    line: line_no,
                    message: format!("dB must be a positive integer, found '{value}'"),
                })?)
            }
            "label" => label = Some(value.to_string()),
            "matrix" => {
                if !value.is_empty() {
                    return Err(Error::Parse {
                        line: line_no,
                        message: "matrix entries start on the next line".to_string(),
                    });
                }
                in_matrix = true;
                header_line = line_no;
            }
            other => {
                return Err(Error::Parse {
                    line: line_no,
                    message: format!("unknown field '{other}'"),
                })
            }
        }
    }

    if !in_matrix {
        return Err(Error::Parse {
            line: text.lines().count(),
            message: "missing 'matrix:' section".to_string(),
        });
    }
    let missing = |field: &str| Error::Parse {
        line: header_line,
        message: format!("missing field '{field}'"),
    };
    Ok(StateFile {
        version: version.ok_or_else(|| missing("version"))?,
        kind: kind.ok_or_else(|| missing("kind"))?,
        dim_a: dim_a.ok_or_else(|| missing("dA"))?,
        dim_b: dim_b.ok_or_else(|| missing("dB"))?,
        matrix,
        label,
    })
}

fn parse_matrix_line(
    line: &str,
    line_no: usize,
    kind: Option<StateKind>,
    matrix: &mut Vec<MatrixEntry>,
) -> Result<()> {
    let kind = kind.ok_or_else(|| Error::Parse {
        line: line_no,
        message: "kind must be declared before the matrix".to_string(),
    })?;
    let numbers: Vec<f64> = line
        .replace(['[', ']', ','], " ")
        .split_whitespace()
        .map(|token| {
            token.parse().map_err(|_| Error::Parse {
                line: line_no,
                message: format!("expected a number, found '{token}'"),
            })
        })
        .collect::<Result<_>>()?;
    match kind {
        StateKind::BipartiteDensity => {
            if numbers.len() % 2 != 0 {
                return Err(Error::Parse {
                    line: line_no,
                    message: "odd number of values; entries are [re, im] pairs".to_string(),
                });
            }
            for pair in numbers.chunks(2) {
                matrix.push(MatrixEntry::Pair([pair[0], pair[1]]));
            }
        }
        StateKind::JointPmf => {
            for value in numbers {
                matrix.push(MatrixEntry::Real(value));
            }
        }
    }
    Ok(())
}
