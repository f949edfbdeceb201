// SPDX-License-Identifier: Apache-2.0

//! Run manifests: enough to rerun a command and check its outputs.
//!
//! ```text
//! tool=simll 0.1.0
//! command=lock
//! arg=lock
//! arg=--in
//! arg=c17.bench
//! param.keys=4
//! seed=7
//! input=<sha256> c17.bench
//! output=<sha256> locked.bench
//! ```

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use sha2::{Digest, Sha256};

pub const TOOL: &str = concat!("simll ", env!("CARGO_PKG_VERSION"));

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Manifest {
    pub tool: String,
    pub command: String,
    pub args: Vec<String>,
    pub params: Vec<(String, String)>,
    pub seed: u64,
    pub inputs: Vec<(String, PathBuf)>,
    pub outputs: Vec<(String, String)>,
}

impl Manifest {
    pub fn new(command: &str, args: &[String], seed: u64) -> Manifest {
        Manifest {
            tool: TOOL.to_string(),
            command: command.to_string(),
            args: args.to_vec(),
            seed,
            ..Manifest::default()
        }
    }

    pub fn param(&mut self, name: &str, value: impl ToString) {
        self.params.push((name.to_string(), value.to_string()));
    }

    /// Read an input file and record its digest.
    pub fn read_input(&mut self, path: &Path) -> Result<String> {
        let bytes = fs::read(path).with_context(|| format!("reading {}", path.display()))?;
        self.inputs.push((sha256_hex(&bytes), path.to_path_buf()));
        String::from_utf8(bytes).with_context(|| format!("{} is not UTF-8", path.display()))
    }

    pub fn record_output(&mut self, name: &str, contents: &str) {
        self.outputs
            .push((sha256_hex(contents.as_bytes()), name.to_string()));
    }

    pub fn render(&self) -> String {
        let mut s = format!("tool={}\ncommand={}\n", self.tool, self.command);
        for a in &self.args {
            s += &format!("arg={a}\n");
        }
        for (k, v) in &self.params {
            s += &format!("param.{k}={v}\n");
        }
        s += &format!("seed={}\n", self.seed);
        for (h, p) in &self.inputs {
            s += &format!("input={h} {}\n", p.display());
        }
        for (h, name) in &self.outputs {
            s += &format!("output={h} {name}\n");
        }
        s
    }

    pub fn parse(text: &str) -> Result<Manifest> {
        let mut m = Manifest::default();
        for (no, line) in text.lines().enumerate() {
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((k, v)) = line.split_once('=') else {
                bail!("manifest line {}: expected key=value", no + 1);
            };
            let digest_pair = |v: &str| -> Result<(String, String)> {
                let (h, rest) = v.split_once(' ').with_context(|| {
                    format!("manifest line {}: expected digest and path", no + 1)
                })?;
                Ok((h.to_string(), rest.to_string()))
            };
            match k {
                "tool" => m.tool = v.to_string(),
                "command" => m.command = v.to_string(),
                "arg" => m.args.push(v.to_string()),
                "seed" => {
                    m.seed = v
                        .parse()
                        .with_context(|| format!("manifest line {}: bad seed", no + 1))?
                }
                "input" => {
                    let (h, p) = digest_pair(v)?;
                    m.inputs.push((h, PathBuf::from(p)));
                }
                "output" => m.outputs.push(digest_pair(v)?),
                _ => match k.strip_prefix("param.") {
                    Some(p) => m.params.push((p.to_string(), v.to_string())),
                    None => bail!("manifest line {}: unknown field {k}", no + 1),
                },
            }
        }
        if m.command.is_empty() || m.args.is_empty() {
            bail!("manifest has no command");
        }
        Ok(m)
    }
}
