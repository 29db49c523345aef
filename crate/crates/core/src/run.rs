//! File-level driver: loads `.e` files with their imports against a library
//! directory, checks them, and collects per-file outcomes. Used by the CLI
//! and the test suite.

use crate::engine::{check_script, ScriptReport};
use crate::library::Library;
use crate::parser::{parse_script, ParseError};
use std::collections::HashSet;
use std::path::{Path, PathBuf};

#[derive(Debug)]
pub struct FileOutcome {
    pub path: PathBuf,
    /// Set when the file failed to read or parse; no report in that case.
    pub error: Option<String>,
    pub report: Option<ScriptReport>,
}

#[derive(Default)]
pub struct Session {
    pub lib: Library,
    loaded: HashSet<PathBuf>,
    pub outcomes: Vec<FileOutcome>,
}

impl Session {
    pub fn new() -> Self {
        Self::default()
    }

    /// Loads every `.e` file of a library directory (sorted by name),
    /// skipping paths in `exclude`.
    pub fn load_library_dir(&mut self, dir: &Path, exclude: &[PathBuf]) -> Result<(), String> {
        let mut files: Vec<PathBuf> = std::fs::read_dir(dir)
            .map_err(|e| format!("{}: {e}", dir.display()))?
            .filter_map(|e| e.ok())
            .map(|e| e.path())
            .filter(|p| p.extension().is_some_and(|x| x == "e"))
            .collect();
        files.sort();
        let excluded: HashSet<PathBuf> = exclude
            .iter()
            .filter_map(|p| p.canonicalize().ok())
            .collect();
        for f in files {
            if let Ok(c) = f.canonicalize() {
                if excluded.contains(&c) {
                    continue;
                }
            }
            self.load_file(&f, &[dir.to_path_buf()])?;
        }
        Ok(())
    }

    /// Loads and checks one file, resolving its imports against the file's
    /// own directory and the given library directories.
    pub fn load_file(&mut self, path: &Path, lib_dirs: &[PathBuf]) -> Result<(), String> {
        let canonical = path
            .canonicalize()
            .map_err(|e| format!("{}: {e}", path.display()))?;
        if !self.loaded.insert(canonical) {
            return Ok(());
        }
        let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
        let script = match parse_script(&text) {
            Ok(s) => s,
            Err(e) => {
                self.outcomes.push(FileOutcome {
                    path: path.to_path_buf(),
                    error: Some(render_parse_error(path, &e)),
                    report: None,
                });
                return Ok(());
            }
        };
        // Imports first.
        for imp in &script.imports {
            let mut candidates: Vec<PathBuf> = Vec::new();
            if let Some(parent) = path.parent() {
                candidates.push(parent.join(format!("{imp}.e")));
            }
            for d in lib_dirs {
                candidates.push(d.join(format!("{imp}.e")));
            }
            let found = candidates.iter().find(|c| c.exists());
            match found {
                Some(f) => self.load_file(f, lib_dirs)?,
                None => return Err(format!("{}: import '{imp}' not found", path.display())),
            }
        }
        let name = path.display().to_string();
        let report = check_script(&script, &mut self.lib, &name);
        self.outcomes.push(FileOutcome {
            path: path.to_path_buf(),
            error: None,
            report: Some(report),
        });
        Ok(())
    }
}

pub fn render_parse_error(path: &Path, e: &ParseError) -> String {
    crate::parser::render_diagnostic(&path.display().to_string(), e.span, &e.msg)
}

/// Checks the corpus shipped with the repository; test helper.
pub fn check_corpus(corpus_dir: &Path) -> Result<Session, String> {
    let mut s = Session::new();
    s.load_library_dir(corpus_dir, &[])?;
    Ok(s)
}
