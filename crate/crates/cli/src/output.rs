//! Output files with a metadata header, and the error-to-exit-code mapping.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECKS_FAILED: i32 = 1;
pub const EXIT_NUMERICAL: i32 = 2;
pub const EXIT_PRECISION: i32 = 3;
pub const EXIT_USAGE: i32 = 64;

#[derive(Debug, Clone, Serialize)]
pub struct Metadata {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: &'static str,
    pub config_hash: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    /// Generator behind `seed`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rng: Option<&'static str>,
}

impl Metadata {
    /// Hashes the JSON form of the parsed arguments (output paths excluded).
    pub fn new<A: Serialize>(command: &'static str, args: &A, seed: Option<u64>) -> Self {
        let canonical = serde_json::to_string(args).unwrap_or_default();
        let digest = Sha256::digest(canonical.as_bytes());
        let config_hash = digest.iter().fold(String::new(), |mut s, b| {
            let _ = write!(s, "{b:02x}");
            s
        });
        Self {
            tool: "nmm",
            version: env!("CARGO_PKG_VERSION"),
            command,
            config_hash,
            seed,
            rng: seed.map(|_| nmm_core::gas::RNG_ALGORITHM),
        }
    }

    fn csv_line(&self) -> String {
        let mut s = format!(
            "# {} {} command={} config_hash={}",
            self.tool, self.version, self.command, self.config_hash
        );
        if let Some(seed) = self.seed {
            let _ = write!(s, " seed={seed}");
        }
        if let Some(rng) = self.rng {
            let _ = write!(s, " rng=\"{rng}\"");
        }
        s
    }
}

#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Numerical(nmm_core::Error),
    Positivity { n_star: usize, requested: usize },
    Io(PathBuf, std::io::Error),
    ChecksFailed(usize),
}

impl From<nmm_core::Error> for Failure {
    fn from(e: nmm_core::Error) -> Self {
        match e {
            nmm_core::Error::InvalidInput(msg) => Failure::Usage(msg),
            other => Failure::Numerical(other),
        }
    }
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Usage(_) => EXIT_USAGE,
            Failure::Numerical(nmm_core::Error::PositivityLoss { .. }) | Failure::Positivity { .. } => EXIT_PRECISION,
            Failure::Numerical(_) | Failure::Io(..) => EXIT_NUMERICAL,
            Failure::ChecksFailed(_) => EXIT_CHECKS_FAILED,
        }
    }

    /// Machine-readable diagnostics for stderr.
    pub fn diagnostics(&self) -> Value {
        use nmm_core::Error as E;
        match self {
            Failure::Usage(msg) => json!({"error": "usage", "message": msg}),
            Failure::Positivity { n_star, requested } => {
                json!({"error": "positivity_loss", "n_star": n_star, "requested": requested})
            }
            Failure::Io(path, e) => json!({"error": "io", "path": path.display().to_string(), "message": e.to_string()}),
            Failure::ChecksFailed(n) => json!({"error": "checks_failed", "failed": n}),
            Failure::Numerical(e) => {
                let mut v = json!({"error": "numerical", "message": e.to_string()});
                match e {
                    E::NoConvergence { what, iterations, residual } => {
                        v["error"] = json!("no_convergence");
                        v["what"] = json!(what);
                        v["iterations"] = json!(iterations);
                        v["residual"] = json!(residual);
                    }
                    E::PositivityLoss { n_star } => {
                        v["error"] = json!("positivity_loss");
                        v["n_star"] = json!(n_star);
                    }
                    E::QuadratureNotConverged { coarse, fine } => {
                        v["error"] = json!("quadrature_not_converged");
                        v["coarse"] = json!(coarse);
                        v["fine"] = json!(fine);
                    }
                    _ => {}
                }
                v
            }
        }
    }
}

pub type CmdResult<T> = std::result::Result<T, Failure>;

pub struct OutDir {
    pub dir: PathBuf,
    pub metadata: Metadata,
}

impl OutDir {
    pub fn create(dir: &Path, metadata: Metadata) -> CmdResult<Self> {
        fs::create_dir_all(dir).map_err(|e| Failure::Io(dir.to_path_buf(), e))?;
        Ok(Self {
            dir: dir.to_path_buf(),
            metadata,
        })
    }

    fn write(&self, name: &str, text: &str) -> CmdResult<PathBuf> {
        let path = self.dir.join(name);
        fs::write(&path, text).map_err(|e| Failure::Io(path.clone(), e))?;
        Ok(path)
    }

    /// Writes `{"metadata": ..., <body fields>}`.
    pub fn json(&self, name: &str, body: Value) -> CmdResult<PathBuf> {
        let mut doc = json!({ "metadata": self.metadata });
        if let (Some(d), Value::Object(b)) = (doc.as_object_mut(), body) {
            d.extend(b);
        }
        let text = serde_json::to_string_pretty(&doc).expect("JSON values serialise");
        self.write(name, &(text + "\n"))
    }

    /// Writes a metadata comment line, the header row and the rows.
    pub fn csv(&self, name: &str, header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> CmdResult<PathBuf> {
        let mut text = self.metadata.csv_line();
        text.push('\n');
        text.push_str(&header.join(","));
        text.push('\n');
        for row in rows {
            text.push_str(&row.join(","));
            text.push('\n');
        }
        self.write(name, &text)
    }
}

/// 17 significant digits.
pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hash_ignores_skipped_fields() {
        #[derive(Serialize)]
        struct A {
            x: f64,
            #[serde(skip)]
            _out: String,
        }
        let a = Metadata::new("t", &A { x: 1.0, _out: "a".into() }, Some(3));
        let b = Metadata::new("t", &A { x: 1.0, _out: "b".into() }, Some(3));
        assert_eq!(a.config_hash, b.config_hash);
        assert_eq!(a.config_hash.len(), 64);
        assert!(a.csv_line().contains(" seed=3 rng="));
    }

    #[test]
    fn exit_codes() {
        assert_eq!(Failure::from(nmm_core::Error::InvalidInput("x".into())).exit_code(), EXIT_USAGE);
        assert_eq!(Failure::from(nmm_core::Error::PositivityLoss { n_star: 4 }).exit_code(), EXIT_PRECISION);
        let f = Failure::from(nmm_core::Error::NoConvergence {
            what: "newton",
            iterations: 3,
            residual: 0.5,
        });
        assert_eq!(f.exit_code(), EXIT_NUMERICAL);
        assert_eq!(f.diagnostics()["residual"], json!(0.5));
    }
}
