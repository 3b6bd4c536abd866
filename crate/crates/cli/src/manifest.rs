use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::Context;
use serde::Serialize;

/// Provenance record written next to every output file.
#[derive(Debug, Serialize)]
pub struct RunManifest<'a, P: Serialize> {
    pub command_line: Vec<String>,
    pub command: &'a str,
    pub parameters: &'a P,
    pub seed: Option<u64>,
    pub tool_version: &'static str,
    pub wall_time_secs: f64,
    pub threads: usize,
    pub outputs: Vec<String>,
}

pub fn manifest_path(output: &Path) -> PathBuf {
    let mut name = output.file_name().unwrap_or_default().to_os_string();
    name.push(".manifest.json");
    output.with_file_name(name)
}

/// Writes `<output>.manifest.json` for each output.
pub fn write_manifests<P: Serialize>(
    command: &str,
    parameters: &P,
    seed: Option<u64>,
    started: Instant,
    outputs: &[PathBuf],
) -> anyhow::Result<()> {
    let manifest = RunManifest {
        command_line: std::env::args().collect(),
        command,
        parameters,
        seed,
        tool_version: env!("CARGO_PKG_VERSION"),
        wall_time_secs: started.elapsed().as_secs_f64(),
        threads: rayon::current_num_threads(),
        outputs: outputs.iter().map(|p| p.display().to_string()).collect(),
    };
    let text = serde_json::to_string_pretty(&manifest)?;
    for out in outputs {
        let path = manifest_path(out);
        std::fs::write(&path, &text).with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(())
}
