//! Matrix Market files, plain-text vectors and the JSON manifest that ties a
//! matrix and a right-hand side into a problem bundle.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::generators::GenSpec;
use crate::linalg::{DenseMatrix, Matrix, PentaBandMatrix, RowAccess, SparseMatrix, StorageKind};
use crate::problem::PwlsProblem;

pub(crate) fn read_to_string(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub(crate) fn write_string(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Layout {
    Coordinate,
    Array,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Field {
    Real,
    Integer,
    Pattern,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Symmetry {
    General,
    Symmetric,
    SkewSymmetric,
}

struct Parser<'a> {
    path: &'a Path,
    lines: std::iter::Enumerate<std::str::Lines<'a>>,
}

impl<'a> Parser<'a> {
    fn new(path: &'a Path, text: &'a str) -> Self {
        Self {
            path,
            lines: text.lines().enumerate(),
        }
    }

    fn error(&self, line: usize, msg: impl Into<String>) -> Error {
        Error::Parse {
            path: self.path.to_path_buf(),
            line,
            msg: msg.into(),
        }
    }

    /// Next line that is neither blank nor a comment, with its 1-based number.
    fn next_data(&mut self) -> Option<(usize, &'a str)> {
        self.lines
            .by_ref()
            .map(|(i, l)| (i + 1, l.trim()))
            .find(|(_, l)| !l.is_empty() && !l.starts_with('%'))
    }

    fn numbers<T: std::str::FromStr>(&self, line: usize, text: &str, count: usize) -> Result<Vec<T>> {
        let fields: Vec<&str> = text.split_whitespace().collect();
        if fields.len() != count {
            return Err(self.error(line, format!("expected {count} fields, found {}", fields.len())));
        }
        fields
            .iter()
            .map(|f| {
                f.parse::<T>()
                    .map_err(|_| self.error(line, format!("cannot parse `{f}`")))
            })
            .collect()
    }
}

fn parse_header(parser: &mut Parser<'_>) -> Result<(Layout, Field, Symmetry)> {
    let (line, header) = parser
        .lines
        .next()
        .map(|(i, l)| (i + 1, l.trim()))
        .ok_or_else(|| parser.error(1, "empty file"))?;
    let words: Vec<String> = header.split_whitespace().map(str::to_ascii_lowercase).collect();
    if words.len() != 5 || words[0] != "%%matrixmarket" || words[1] != "matrix" {
        return Err(parser.error(line, "missing `%%MatrixMarket matrix` header"));
    }
    let layout = match words[2].as_str() {
        "coordinate" => Layout::Coordinate,
        "array" => Layout::Array,
        other => return Err(parser.error(line, format!("unsupported format `{other}`"))),
    };
    let field = match words[3].as_str() {
        "real" | "double" => Field::Real,
        "integer" => Field::Integer,
        "pattern" if layout == Layout::Coordinate => Field::Pattern,
        other => return Err(parser.error(line, format!("unsupported field `{other}`"))),
    };
    let symmetry = match words[4].as_str() {
        "general" => Symmetry::General,
        "symmetric" => Symmetry::Symmetric,
        "skew-symmetric" => Symmetry::SkewSymmetric,
        other => return Err(parser.error(line, format!("unsupported symmetry `{other}`"))),
    };
    Ok((layout, field, symmetry))
}

fn parse_value(parser: &Parser<'_>, line: usize, text: &str) -> Result<f64> {
    let v: f64 = text
        .parse()
        .map_err(|_| parser.error(line, format!("cannot parse `{text}`")))?;
    if !v.is_finite() {
        return Err(parser.error(line, format!("non-finite value `{text}`")));
    }
    Ok(v)
}

/// Parses Matrix Market text. Coordinate files give sparse matrices, array
/// files dense ones. `path` is only used in error messages.
pub fn parse_matrix_market(path: &Path, text: &str) -> Result<Matrix> {
    let mut parser = Parser::new(path, text);
    let (layout, field, symmetry) = parse_header(&mut parser)?;
    let (size_line, size_text) = parser.next_data().ok_or_else(|| parser.error(1, "missing size line"))?;
    let mirror = |i: usize, j: usize, v: f64| match symmetry {
        Symmetry::General => None,
        _ if i == j => None,
        Symmetry::Symmetric => Some((j, i, v)),
        Symmetry::SkewSymmetric => Some((j, i, -v)),
    };
    match layout {
        Layout::Coordinate => {
            let dims: Vec<usize> = parser.numbers(size_line, size_text, 3)?;
            let (rows, cols, nnz) = (dims[0], dims[1], dims[2]);
            if symmetry != Symmetry::General && rows != cols {
                return Err(parser.error(size_line, "symmetric storage requires a square matrix"));
            }
            let mut triplets = Vec::with_capacity(nnz * 2);
            for k in 0..nnz {
                let (line, text) = parser
                    .next_data()
                    .ok_or_else(|| parser.error(size_line, format!("expected {nnz} entries, found {k}")))?;
                let fields: Vec<&str> = text.split_whitespace().collect();
                let want = if field == Field::Pattern { 2 } else { 3 };
                if fields.len() != want {
                    return Err(parser.error(line, format!("expected {want} fields, found {}", fields.len())));
                }
                let index = |f: &str, bound: usize| -> Result<usize> {
                    match f.parse::<usize>() {
                        Ok(i) if (1..=bound).contains(&i) => Ok(i - 1),
                        _ => Err(parser.error(line, format!("index `{f}` outside 1..={bound}"))),
                    }
                };
                let (i, j) = (index(fields[0], rows)?, index(fields[1], cols)?);
                if symmetry != Symmetry::General && j > i {
                    return Err(parser.error(line, "entry above the diagonal in symmetric storage"));
                }
                let v = if field == Field::Pattern {
                    1.0
                } else {
                    parse_value(&parser, line, fields[2])?
                };
                if symmetry == Symmetry::SkewSymmetric && i == j {
                    return Err(parser.error(line, "diagonal entry in skew-symmetric storage"));
                }
                triplets.push((i, j, v));
                triplets.extend(mirror(i, j, v));
            }
            if let Some((line, _)) = parser.next_data() {
                return Err(parser.error(line, "trailing data after the last entry"));
            }
            Ok(Matrix::Sparse(SparseMatrix::from_triplets(rows, cols, &triplets)?))
        }
        Layout::Array => {
            let dims: Vec<usize> = parser.numbers(size_line, size_text, 2)?;
            let (rows, cols) = (dims[0], dims[1]);
            if symmetry != Symmetry::General && rows != cols {
                return Err(parser.error(size_line, "symmetric storage requires a square matrix"));
            }
            // Column-major; symmetric files hold the lower triangle only.
            let positions: Vec<(usize, usize)> = (0..cols)
                .flat_map(|j| (0..rows).map(move |i| (i, j)))
                .filter(|&(i, j)| match symmetry {
                    Symmetry::General => true,
                    Symmetry::Symmetric => i >= j,
                    Symmetry::SkewSymmetric => i > j,
                })
                .collect();
            let mut m = DenseMatrix::zeros(rows, cols);
            for (k, &(i, j)) in positions.iter().enumerate() {
                let (line, text) = parser.next_data().ok_or_else(|| {
                    parser.error(size_line, format!("expected {} values, found {k}", positions.len()))
                })?;
                let v = parse_value(&parser, line, text)?;
                m.set(i, j, v);
                if let Some((a, b, w)) = mirror(i, j, v) {
                    m.set(a, b, w);
                }
            }
            if let Some((line, _)) = parser.next_data() {
                return Err(parser.error(line, "trailing data after the last value"));
            }
            Ok(Matrix::Dense(m))
        }
    }
}

pub fn read_matrix(path: &Path) -> Result<Matrix> {
    parse_matrix_market(path, &read_to_string(path)?)
}

/// Dense matrices are written in array form, the others in coordinate form,
/// all with `general` symmetry. Values use the shortest representation that
/// reads back to the same `f64`.
pub fn format_matrix_market(m: &Matrix) -> String {
    let mut out = String::new();
    match m {
        Matrix::Dense(d) => {
            out.push_str("%%MatrixMarket matrix array real general\n");
            let _ = writeln!(out, "{} {}", d.n_rows(), d.n_cols());
            for j in 0..d.n_cols() {
                for i in 0..d.n_rows() {
                    let _ = writeln!(out, "{:?}", d.get(i, j));
                }
            }
        }
        _ => {
            let mut entries = Vec::new();
            for i in 0..m.n_rows() {
                m.for_each_in_row(i, |j, v| {
                    if v != 0.0 || i == j {
                        entries.push((i, j, v));
                    }
                });
            }
            out.push_str("%%MatrixMarket matrix coordinate real general\n");
            let _ = writeln!(out, "{} {} {}", m.n_rows(), m.n_cols(), entries.len());
            for (i, j, v) in entries {
                let _ = writeln!(out, "{} {} {:?}", i + 1, j + 1, v);
            }
        }
    }
    out
}

pub fn write_matrix(path: &Path, m: &Matrix) -> Result<()> {
    write_string(path, &format_matrix_market(m))
}

/// A vector stored either as a Matrix Market `n x 1` file or as one decimal
/// per line (blank lines and `#` comments are skipped).
pub fn parse_vector(path: &Path, text: &str) -> Result<Vec<f64>> {
    if text.trim_start().starts_with("%%") {
        let m = parse_matrix_market(path, text)?;
        if m.n_cols() != 1 {
            return Err(Error::Parse {
                path: path.to_path_buf(),
                line: 1,
                msg: format!("expected a single column, found {}", m.n_cols()),
            });
        }
        return Ok(m.to_dense().into_vec());
    }
    let parser = Parser::new(path, text);
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
        .map(|(line, l)| parse_value(&parser, line, l))
        .collect()
}

pub fn read_vector(path: &Path) -> Result<Vec<f64>> {
    parse_vector(path, &read_to_string(path)?)
}

pub fn format_vector(v: &[f64]) -> String {
    let mut out = String::from("%%MatrixMarket matrix array real general\n");
    let _ = writeln!(out, "{} 1", v.len());
    for x in v {
        let _ = writeln!(out, "{x:?}");
    }
    out
}

pub fn write_vector(path: &Path, v: &[f64]) -> Result<()> {
    write_string(path, &format_vector(v))
}

/// Rebuilds a pentadiagonal band matrix from general storage. Fails if an
/// entry lies off the five admissible diagonals.
pub fn to_band(m: &Matrix, offset: usize) -> Result<PentaBandMatrix> {
    if let Matrix::Band(b) = m {
        if b.offset() == offset {
            return Ok(b.clone());
        }
    }
    if !m.is_square() {
        return Err(Error::NotSquare {
            rows: m.n_rows(),
            cols: m.n_cols(),
        });
    }
    let n = m.n_rows();
    let mut diag = vec![0.0; n];
    let mut ln = vec![0.0; n.saturating_sub(1)];
    let mut un = vec![0.0; n.saturating_sub(1)];
    let mut lf = vec![0.0; n.saturating_sub(offset)];
    let mut uf = vec![0.0; n.saturating_sub(offset)];
    let mut stray = None;
    for i in 0..n {
        m.for_each_in_row(i, |j, v| {
            if j == i {
                diag[i] = v;
            } else if j + 1 == i {
                ln[j] = v;
            } else if i + 1 == j {
                un[i] = v;
            } else if j + offset == i {
                lf[j] = v;
            } else if i + offset == j {
                uf[i] = v;
            } else if v != 0.0 {
                stray.get_or_insert((i, j));
            }
        });
    }
    if let Some((i, j)) = stray {
        return Err(Error::InvalidMatrix(format!(
            "entry ({}, {}) lies outside the band with offset {offset}",
            i + 1,
            j + 1
        )));
    }
    if ln == un && lf == uf {
        PentaBandMatrix::symmetric(offset, diag, ln, lf)
    } else {
        PentaBandMatrix::general(offset, diag, ln, un, lf, uf)
    }
}

/// Converts to the requested storage.
pub fn convert(m: &Matrix, storage: StorageKind, band_offset: Option<usize>) -> Result<Matrix> {
    Ok(match storage {
        StorageKind::Dense => Matrix::Dense(m.to_dense()),
        StorageKind::Sparse => match m {
            Matrix::Sparse(s) => Matrix::Sparse(s.clone()),
            _ => {
                let mut triplets = Vec::new();
                for i in 0..m.n_rows() {
                    m.for_each_in_row(i, |j, v| {
                        if v != 0.0 || i == j {
                            triplets.push((i, j, v));
                        }
                    });
                }
                Matrix::Sparse(SparseMatrix::from_triplets(m.n_rows(), m.n_cols(), &triplets)?)
            }
        },
        StorageKind::Band => {
            let offset = band_offset
                .ok_or_else(|| Error::InvalidArgument("band storage needs `band_offset` in the manifest".into()))?;
            Matrix::Band(to_band(m, offset)?)
        }
    })
}

/// Names the files of a problem bundle. Relative paths are resolved against
/// the manifest's directory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub matrix: PathBuf,
    pub rhs: PathBuf,
    pub storage: StorageKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub band_offset: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gen_spec: Option<GenSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub canonical: Option<String>,
}

impl Manifest {
    pub fn read(path: &Path) -> Result<Self> {
        let text = read_to_string(path)?;
        serde_json::from_str(&text).map_err(|e| Error::Parse {
            path: path.to_path_buf(),
            line: e.line(),
            msg: e.to_string(),
        })
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        let mut text = serde_json::to_string_pretty(self)?;
        text.push('\n');
        write_string(path, &text)
    }

    fn resolve(base: &Path, p: &Path) -> PathBuf {
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            base.join(p)
        }
    }

    /// Reads the referenced files into a problem with the declared storage.
    pub fn load(&self, manifest_dir: &Path) -> Result<PwlsProblem> {
        let t = read_matrix(&Self::resolve(manifest_dir, &self.matrix))?;
        let b = read_vector(&Self::resolve(manifest_dir, &self.rhs))?;
        PwlsProblem::new(convert(&t, self.storage, self.band_offset)?, b)
    }
}

pub fn load_problem(manifest_path: &Path) -> Result<(PwlsProblem, Manifest)> {
    let manifest = Manifest::read(manifest_path)?;
    let dir = manifest_path.parent().unwrap_or(Path::new("."));
    let p = manifest.load(dir)?;
    Ok((p, manifest))
}

pub const MATRIX_FILE: &str = "T.mtx";
pub const RHS_FILE: &str = "b.mtx";
pub const MANIFEST_FILE: &str = "manifest.json";

/// Writes `T.mtx`, `b.mtx` and `manifest.json` into `dir`, creating it if
/// needed, and returns the manifest path.
pub fn save_bundle(
    dir: &Path,
    p: &PwlsProblem,
    gen_spec: Option<GenSpec>,
    canonical: Option<String>,
) -> Result<PathBuf> {
    fs::create_dir_all(dir).map_err(|source| Error::Io {
        path: dir.to_path_buf(),
        source,
    })?;
    write_matrix(&dir.join(MATRIX_FILE), p.matrix())?;
    write_vector(&dir.join(RHS_FILE), p.rhs())?;
    let band_offset = match p.matrix() {
        Matrix::Band(b) => Some(b.offset()),
        _ => None,
    };
    let manifest = Manifest {
        matrix: PathBuf::from(MATRIX_FILE),
        rhs: PathBuf::from(RHS_FILE),
        storage: p.storage(),
        band_offset,
        gen_spec,
        canonical,
    };
    let path = dir.join(MANIFEST_FILE);
    manifest.write(&path)?;
    Ok(path)
}
