//! Run manifests: a JSON sidecar per output file recording what produced
//! it, from which inputs, under which options.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::Read;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;
use sha2::{Digest, Sha256};

use twinscope_core::{Error, Result};

#[derive(Debug, Serialize)]
pub struct FileStamp {
    pub path: String,
    pub sha256: String,
}

#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub tool: &'static str,
    pub version: &'static str,
    pub subcommand: &'static str,
    pub options: BTreeMap<String, String>,
    pub inputs: Vec<FileStamp>,
    pub outputs: Vec<FileStamp>,
    pub duration_ms: u64,
}

fn sha256_file(path: &Path) -> Result<String> {
    let mut file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut hasher = Sha256::new();
    let mut buf = [0u8; 64 * 1024];
    loop {
        let n = file.read(&mut buf).map_err(|e| Error::io(path, e))?;
        if n == 0 {
            break;
        }
        hasher.update(&buf[..n]);
    }
    let digest = hasher.finalize();
    let mut out = String::with_capacity(64);
    for b in digest {
        use std::fmt::Write as _;
        write!(out, "{b:02x}").expect("writing to String cannot fail");
    }
    Ok(out)
}

fn stamp(paths: &[PathBuf]) -> Result<Vec<FileStamp>> {
    paths
        .iter()
        .map(|p| {
            Ok(FileStamp {
                path: p.display().to_string(),
                sha256: sha256_file(p)?,
            })
        })
        .collect()
}

/// Write `<output>.manifest.json` next to every output file.
pub fn emit(
    subcommand: &'static str,
    options: BTreeMap<String, String>,
    inputs: &[PathBuf],
    outputs: &[PathBuf],
    started: Instant,
) -> Result<()> {
    let manifest = RunManifest {
        tool: "twinscope",
        version: env!("CARGO_PKG_VERSION"),
        subcommand,
        options,
        inputs: stamp(inputs)?,
        outputs: stamp(outputs)?,
        duration_ms: started.elapsed().as_millis() as u64,
    };
    let rendered = serde_json::to_string_pretty(&manifest)
        .map_err(|e| Error::Format(format!("failed to encode manifest: {e}")))?;
    for output in outputs {
        let mut path = output.clone().into_os_string();
        path.push(".manifest.json");
        std::fs::write(&path, &rendered).map_err(|e| Error::io(PathBuf::from(&path), e))?;
    }
    Ok(())
}
