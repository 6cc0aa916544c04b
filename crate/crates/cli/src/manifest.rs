use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use serde::Serialize;
use serde_json::Value;

/// A failed run: exit code plus a stable error kind.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub kind: &'static str,
    pub message: String,
}

impl Failure {
    pub fn usage(message: impl Into<String>) -> Self {
        Failure {
            code: 1,
            kind: "usage",
            message: message.into(),
        }
    }

    pub fn data(kind: &'static str, message: impl Into<String>) -> Self {
        Failure {
            code: 2,
            kind,
            message: message.into(),
        }
    }

    pub fn report(&self) -> ExitCode {
        let line = serde_json::json!({ "error": self.kind, "message": self.message });
        eprintln!("{line}");
        ExitCode::from(self.code)
    }

    /// Attaches the offending path to a library error.
    pub fn at(path: &Path, e: pea_core::Error) -> Self {
        let mut f = Failure::from(e);
        f.message = format!("{}: {}", path.display(), f.message);
        f
    }
}

impl From<pea_core::Error> for Failure {
    fn from(e: pea_core::Error) -> Self {
        use pea_core::Error as E;
        let kind = match &e {
            E::InvalidParameter(_) => return Failure::usage(e.to_string()),
            E::UnknownLabel(_) | E::NotFineGrained(_) => "label",
            E::Parse { .. } => "parse",
            E::DuplicateAnnotation { .. } | E::DuplicateId(_) => "duplicate",
            E::EmptySet(_) | E::SingleAnnotator(_) | E::MissingAnnotation { .. } => "precondition",
            E::InsufficientNegatives { .. } | E::InsufficientData(_) => "insufficient_data",
            E::InvalidDistribution(_) => "distribution",
            E::Io(_) => "io",
            E::Csv(_) => "csv",
            E::Json(_) => "json",
        };
        Failure::data(kind, e.to_string())
    }
}

pub fn open(path: &Path) -> Result<BufReader<File>, Failure> {
    File::open(path)
        .map(BufReader::new)
        .map_err(|e| Failure::data("io", format!("{}: {e}", path.display())))
}

pub fn create(path: &Path) -> Result<BufWriter<File>, Failure> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| Failure::data("io", format!("{}: {e}", path.display())))
}

pub fn create_dir(path: &Path) -> Result<(), Failure> {
    std::fs::create_dir_all(path)
        .map_err(|e| Failure::data("io", format!("{}: {e}", path.display())))
}

pub fn finish<W: Write>(mut w: W, path: &Path) -> Result<(), Failure> {
    w.flush()
        .map_err(|e| Failure::data("io", format!("{}: {e}", path.display())))
}

/// Uses the given seed or draws one; the second value says which.
pub fn resolve_seed(seed: Option<u64>) -> (u64, bool) {
    match seed {
        Some(s) => (s, false),
        None => (rand::random(), true),
    }
}

#[derive(Debug, Serialize)]
pub struct Manifest {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: &'static str,
    pub inputs: Vec<String>,
    pub outputs: Vec<String>,
    pub parameters: Value,
    pub seed: Option<u64>,
    pub seed_generated: bool,
    pub results: Value,
    pub warnings: Vec<String>,
}

impl Manifest {
    pub fn new(command: &'static str) -> Self {
        Manifest {
            tool: "pea",
            version: pea_core::VERSION,
            command,
            inputs: Vec::new(),
            outputs: Vec::new(),
            parameters: Value::Null,
            seed: None,
            seed_generated: false,
            results: Value::Null,
            warnings: Vec::new(),
        }
    }

    pub fn input(mut self, path: &Path) -> Self {
        self.inputs.push(path.display().to_string());
        self
    }

    pub fn output(mut self, path: &Path) -> Self {
        self.outputs.push(path.display().to_string());
        self
    }

    pub fn parameters(mut self, parameters: Value) -> Self {
        self.parameters = parameters;
        self
    }

    pub fn seed(mut self, (seed, generated): (u64, bool)) -> Self {
        self.seed = Some(seed);
        self.seed_generated = generated;
        self
    }

    pub fn results(mut self, results: Value) -> Self {
        self.results = results;
        self
    }

    pub fn warnings(mut self, warnings: impl IntoIterator<Item = String>) -> Self {
        self.warnings.extend(warnings);
        self
    }

    /// `<dir>/manifest.json` for directory outputs, `<file>.manifest.json`
    /// otherwise.
    pub fn path_for(output: &Path) -> PathBuf {
        if output.is_dir() {
            output.join("manifest.json")
        } else {
            let mut name = output.as_os_str().to_owned();
            name.push(".manifest.json");
            PathBuf::from(name)
        }
    }

    pub fn write(&self, output: &Path) -> Result<(), Failure> {
        let path = Manifest::path_for(output);
        let mut w = create(&path)?;
        serde_json::to_writer_pretty(&mut w, self)
            .map_err(|e| Failure::data("json", e.to_string()))?;
        w.write_all(b"\n")
            .map_err(|e| Failure::data("io", format!("{}: {e}", path.display())))?;
        finish(w, &path)
    }
}
