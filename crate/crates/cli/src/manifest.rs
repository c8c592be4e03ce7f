//! Run manifest: the resolved parameters as a loadable config, with the
//! scenario kind and artifact checksums in comment lines.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use sha2::{Digest, Sha256};

use crate::scenario::Artifact;

pub const MANIFEST_NAME: &str = "manifest.txt";

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().fold(String::with_capacity(64), |mut s, b| {
        let _ = write!(s, "{b:02x}");
        s
    })
}

/// Manifest text. Feeding it back as `--config` repeats the run.
pub fn render(kind: &str, params: &BTreeMap<String, String>, artifacts: &[Artifact]) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "# swarmshape manifest");
    let _ = writeln!(out, "# kind: {kind}");
    for a in artifacts {
        let _ = writeln!(out, "# sha256 {} {}", sha256_hex(&a.bytes), a.name);
    }
    for (k, v) in params {
        let _ = writeln!(out, "{k} = {v}");
    }
    out
}
