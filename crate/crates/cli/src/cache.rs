//! On-disk cache of DNS points. Every file is written to a temporary name in
//! the same directory and renamed into place, and a point's `result.json`
//! goes last, so an interrupted sweep leaves either a complete entry or one
//! that is ignored.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use slipflow::saddle::StaggeredField;
use slipflow::scaling::ScalingParams;

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Key of any serializable spec: SHA-256 of its JSON.
pub fn key_of<T: Serialize>(spec: &T) -> String {
    sha256_hex(&serde_json::to_vec(spec).expect("spec serializes"))
}

pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = path.parent().unwrap_or(Path::new("."));
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let name = path.file_name().context("path has no file name")?.to_string_lossy();
    let tmp = dir.join(format!(".{name}.{}.tmp", std::process::id()));
    {
        let mut f = fs::File::create(&tmp).with_context(|| format!("creating {}", tmp.display()))?;
        f.write_all(bytes)?;
        f.sync_all()?;
    }
    fs::rename(&tmp, path).with_context(|| format!("renaming into {}", path.display()))?;
    Ok(())
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut bytes = serde_json::to_vec_pretty(value)?;
    bytes.push(b'\n');
    write_atomic(path, &bytes)
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_slice(&text).with_context(|| format!("parsing {}", path.display()))
}

/// Sidecar describing a raw field snapshot.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SnapshotMeta {
    pub nx: usize,
    pub ny: usize,
    pub h: f64,
    pub y0: f64,
    pub replicas: usize,
    pub params: ScalingParams,
    /// Lengths of the u, v and p blocks, stored in that order as
    /// little-endian f64.
    pub lengths: [usize; 3],
    pub sha256: String,
}

#[derive(Debug, Clone)]
pub struct Cache {
    root: PathBuf,
}

impl Cache {
    pub fn new(root: impl Into<PathBuf>) -> Self {
        Self { root: root.into() }
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn point_dir(&self, key: &str) -> PathBuf {
        self.root.join("points").join(key)
    }

    pub fn result_path(&self, key: &str) -> PathBuf {
        self.point_dir(key).join("result.json")
    }

    pub fn load_result<T: DeserializeOwned>(&self, key: &str) -> Option<T> {
        let path = self.result_path(key);
        if !path.exists() {
            return None;
        }
        read_json(&path).ok()
    }

    /// Field first, result last.
    pub fn store_point<T: Serialize>(
        &self,
        key: &str,
        field: &StaggeredField,
        params: &ScalingParams,
        result: &T,
    ) -> Result<()> {
        let dir = self.point_dir(key);
        let mut bytes = Vec::with_capacity(8 * (field.u.len() + field.v.len() + field.p.len()));
        for x in field.u.iter().chain(&field.v).chain(&field.p) {
            bytes.extend_from_slice(&x.to_le_bytes());
        }
        let g = &field.grid;
        let meta = SnapshotMeta {
            nx: g.nx,
            ny: g.ny,
            h: g.h,
            y0: g.y0,
            replicas: g.replicas,
            params: *params,
            lengths: [field.u.len(), field.v.len(), field.p.len()],
            sha256: sha256_hex(&bytes),
        };
        write_atomic(&dir.join("field.bin"), &bytes)?;
        write_json(&dir.join("field.json"), &meta)?;
        write_json(&dir.join("result.json"), result)
    }

    /// Raw `(u, v, p)` of a stored snapshot after checking its checksum.
    pub fn load_field(&self, key: &str) -> Result<(SnapshotMeta, [Vec<f64>; 3])> {
        let dir = self.point_dir(key);
        let meta: SnapshotMeta = read_json(&dir.join("field.json"))?;
        let bytes = fs::read(dir.join("field.bin"))?;
        if sha256_hex(&bytes) != meta.sha256 {
            bail!("checksum mismatch in {}", dir.display());
        }
        let total: usize = meta.lengths.iter().sum();
        if bytes.len() != 8 * total {
            bail!("snapshot in {} has {} bytes, expected {}", dir.display(), bytes.len(), 8 * total);
        }
        let mut values = bytes
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().expect("8-byte chunk")));
        let mut take = |n: usize| values.by_ref().take(n).collect::<Vec<f64>>();
        let [nu, nv, np] = meta.lengths;
        let parts = [take(nu), take(nv), take(np)];
        Ok((meta, parts))
    }
}
