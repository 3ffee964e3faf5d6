//! Artifact formats and atomic, hashed file output.

use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use phimin::surface::{GeometryField, GraphPatch, Surface};

/// Header of profile CSV files.
pub const PROFILE_HEADER: &str = "s,x,z,theta,k1,k2,H,K,eta,mu";
/// Header of graph CSV files.
pub const GRAPH_HEADER: &str = "i,j,x,y,u,H,K,k1,k2,eta";

/// Per-sample table of a sampled surface in the schema of its kind.
pub fn surface_csv(field: &GeometryField<f64>) -> String {
    let mut s = String::new();
    match &field.source {
        Surface::Profile(c) => {
            s.push_str(PROFILE_HEADER);
            s.push('\n');
            for (k, p) in c.samples.iter().enumerate() {
                writeln!(
                    s,
                    "{},{},{},{},{},{},{},{},{},{}",
                    p.s,
                    p.x,
                    p.z,
                    p.theta,
                    field.k1[k],
                    field.k2[k],
                    field.mean[k],
                    field.gauss[k],
                    field.eta[k],
                    field.mu[k]
                )
                .unwrap();
            }
        }
        Surface::Graph(g) => {
            s.push_str(GRAPH_HEADER);
            s.push('\n');
            for j in 0..g.ny {
                for i in 0..g.nx {
                    let k = g.idx(i, j);
                    writeln!(
                        s,
                        "{},{},{},{},{},{},{},{},{},{}",
                        i,
                        j,
                        g.x(i),
                        g.y(j),
                        g.u[k],
                        field.mean[k],
                        field.gauss[k],
                        field.k1[k],
                        field.k2[k],
                        field.eta[k]
                    )
                    .unwrap();
                }
            }
        }
    }
    s
}

/// Wavefront OBJ of a graph: vertices row-major, two triangles per cell
/// split along the diagonal from `(i, j)` to `(i + 1, j + 1)`.
pub fn graph_obj(g: &GraphPatch<f64>) -> String {
    let mut s = String::new();
    for j in 0..g.ny {
        for i in 0..g.nx {
            writeln!(s, "v {} {} {}", g.x(i), g.y(j), g.at(i, j)).unwrap();
        }
    }
    // OBJ indices are 1-based.
    let v = |i: usize, j: usize| g.idx(i, j) + 1;
    for j in 0..g.ny.saturating_sub(1) {
        for i in 0..g.nx.saturating_sub(1) {
            writeln!(s, "f {} {} {}", v(i, j), v(i + 1, j), v(i + 1, j + 1)).unwrap();
            writeln!(s, "f {} {} {}", v(i, j), v(i + 1, j + 1), v(i, j + 1)).unwrap();
        }
    }
    s
}

/// Pretty JSON array of reports; an empty list gives `[]`.
pub fn reports_json<R: Serialize>(reports: &[R]) -> String {
    let mut s = serde_json::to_string_pretty(reports).expect("reports serialize");
    s.push('\n');
    s
}

/// Pretty JSON of one value with a trailing newline.
pub fn to_json<R: Serialize + ?Sized>(value: &R) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("value serializes");
    s.push('\n');
    s
}

/// Lowercase hex SHA-256 of `bytes`.
pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes)
        .iter()
        .fold(String::with_capacity(64), |mut s, b| {
            write!(s, "{b:02x}").unwrap();
            s
        })
}

/// A written file as listed in the manifest.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Artifact {
    /// Path relative to the output directory.
    pub path: String,
    pub sha256: String,
    pub bytes: u64,
}

/// Writes files into one directory through a temporary file and a rename.
#[derive(Debug)]
pub struct ArtifactWriter {
    dir: PathBuf,
    artifacts: Vec<Artifact>,
}

impl ArtifactWriter {
    pub fn new(dir: impl Into<PathBuf>) -> std::io::Result<Self> {
        let dir = dir.into();
        fs::create_dir_all(&dir)?;
        Ok(Self {
            dir,
            artifacts: Vec::new(),
        })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    /// Writes `contents` to `name` and records it.
    pub fn write(&mut self, name: &str, contents: &str) -> std::io::Result<PathBuf> {
        let path = write_atomic(&self.dir, name, contents.as_bytes())?;
        self.artifacts.retain(|a| a.path != name);
        self.artifacts.push(Artifact {
            path: name.to_string(),
            sha256: sha256_hex(contents.as_bytes()),
            bytes: contents.len() as u64,
        });
        Ok(path)
    }

    pub fn artifacts(&self) -> &[Artifact] {
        &self.artifacts
    }
}

/// Writes `bytes` to `dir/name` so that readers never see a partial file.
pub fn write_atomic(dir: &Path, name: &str, bytes: &[u8]) -> std::io::Result<PathBuf> {
    let target = dir.join(name);
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(&target).map_err(|e| e.error)?;
    Ok(target)
}
