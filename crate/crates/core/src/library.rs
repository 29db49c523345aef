//! Registry of theorem statements and their status. Assumed statements are
//! first-class: applying them is permitted without a proof. Library files
//! are plain proof-script files; `assumed` is a keyword, not a format.

use crate::ast::TheoremAst;
use std::collections::HashMap;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EntryStatus {
    /// Registered with a proof that has not been checked yet; usable only
    /// after its check succeeds.
    Declared,
    Assumed,
    /// Checked in this session; the hash records the checked source.
    Proved {
        check_hash: u64,
    },
    Failed,
}

#[derive(Debug, Clone)]
pub struct LibraryEntry {
    pub theorem: TheoremAst,
    pub status: EntryStatus,
    /// Where the statement came from (file name or a transcription note).
    pub provenance: String,
}

#[derive(Debug, Clone, Default)]
pub struct Library {
    entries: Vec<LibraryEntry>,
    by_name: HashMap<String, usize>,
}

#[derive(Debug, Clone, thiserror::Error, PartialEq, Eq)]
pub enum LibraryError {
    #[error("duplicate theorem name '{0}'")]
    Duplicate(String),
    #[error("unknown theorem '{0}'")]
    Unknown(String),
}

impl Library {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn register(&mut self, entry: LibraryEntry) -> Result<usize, LibraryError> {
        let name = entry.theorem.name.clone();
        if self.by_name.contains_key(&name) {
            return Err(LibraryError::Duplicate(name));
        }
        let idx = self.entries.len();
        self.entries.push(entry);
        self.by_name.insert(name, idx);
        Ok(idx)
    }

    pub fn lookup(&self, name: &str) -> Result<(usize, &LibraryEntry), LibraryError> {
        let idx = *self
            .by_name
            .get(name)
            .ok_or_else(|| LibraryError::Unknown(name.to_string()))?;
        Ok((idx, &self.entries[idx]))
    }

    pub fn set_status(&mut self, idx: usize, status: EntryStatus) {
        self.entries[idx].status = status;
    }

    pub fn entries(&self) -> &[LibraryEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

pub fn source_hash(text: &str) -> u64 {
    // FNV-1a; stability matters more than strength here.
    let mut h: u64 = 0xcbf29ce484222325;
    for b in text.as_bytes() {
        h ^= *b as u64;
        h = h.wrapping_mul(0x100000001b3);
    }
    h
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ast::{TheoremAst, TheoremStatus};

    fn thm(name: &str) -> TheoremAst {
        TheoremAst {
            span: Default::default(),
            name: name.to_string(),
            params: vec![],
            assumes: vec![],
            existentials: vec![],
            concludes: Some(vec![]),
            status: TheoremStatus::Assumed,
            proof: vec![],
        }
    }

    #[test]
    fn register_then_lookup() {
        let mut lib = Library::new();
        lib.register(LibraryEntry {
            theorem: thm("I.4"),
            status: EntryStatus::Assumed,
            provenance: "test".into(),
        })
        .unwrap();
        assert!(lib.lookup("I.4").is_ok());
        assert_eq!(
            lib.lookup("I.99").unwrap_err(),
            LibraryError::Unknown("I.99".into())
        );
    }

    #[test]
    fn duplicate_rejected() {
        let mut lib = Library::new();
        let e = LibraryEntry {
            theorem: thm("I.4"),
            status: EntryStatus::Assumed,
            provenance: "test".into(),
        };
        lib.register(e.clone()).unwrap();
        assert_eq!(
            lib.register(e).unwrap_err(),
            LibraryError::Duplicate("I.4".into())
        );
    }
}
