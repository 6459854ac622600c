//! Loading of line-oriented input files and the model references they share.
//!
//! A model reference is one of
//!
//! ```text
//! models/m0.km
//! models/m0.km restrict "ma | mb | mc"
//! @consecutive:nat1
//! inline          # followed by .km lines up to a line reading `end`
//! ```
//!
//! Paths are resolved against the directory of the file that mentions them.

use std::cell::Cell;
use std::collections::HashMap;
use std::fmt;
use std::path::{Component, Path, PathBuf};

use crate::formula::parse_formula;
use crate::kripke::format::parse_model_at;
use crate::kripke::KripkeModel;
use crate::scenario::consecutive::{self, LineVariant};
use crate::semantics::truth_set;
use crate::{Error, Result};

pub const DEFAULT_TRUNC_N: usize = 12;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Tok {
    Word(String),
    Quoted(String),
}

impl Tok {
    pub fn word(&self) -> Option<&str> {
        match self {
            Tok::Word(w) => Some(w),
            Tok::Quoted(_) => None,
        }
    }

    pub fn quoted(&self) -> Option<&str> {
        match self {
            Tok::Quoted(q) => Some(q),
            Tok::Word(_) => None,
        }
    }
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Word(w) => f.write_str(w),
            Tok::Quoted(q) => write!(f, "\"{q}\""),
        }
    }
}

/// Splits a line into words and double-quoted strings; `#` outside quotes
/// starts a comment.
pub fn tokenize(line: &str) -> std::result::Result<Vec<Tok>, String> {
    let mut out = Vec::new();
    let mut chars = line.char_indices().peekable();
    while let Some(&(i, c)) = chars.peek() {
        if c == '#' {
            break;
        }
        if c.is_whitespace() {
            chars.next();
            continue;
        }
        if c == '"' {
            chars.next();
            let mut s = String::new();
            loop {
                match chars.next() {
                    Some((_, '"')) => break,
                    Some((_, ch)) => s.push(ch),
                    None => return Err(format!("unterminated string starting at column {}", i + 1)),
                }
            }
            out.push(Tok::Quoted(s));
            continue;
        }
        let mut s = String::new();
        while let Some(&(_, ch)) = chars.peek() {
            if ch.is_whitespace() || ch == '"' || ch == '#' {
                break;
            }
            s.push(ch);
            chars.next();
        }
        out.push(Tok::Word(s));
    }
    Ok(out)
}

/// Where file contents come from.
pub trait Source: Sync {
    fn read(&self, path: &Path) -> std::io::Result<String>;
}

pub struct FileSystem;

impl Source for FileSystem {
    fn read(&self, path: &Path) -> std::io::Result<String> {
        std::fs::read_to_string(path)
    }
}

/// Files compiled into the binary, keyed by normalized relative path.
pub struct Embedded {
    files: HashMap<String, &'static str>,
}

impl Embedded {
    pub fn new(files: &[(&'static str, &'static str)]) -> Self {
        Embedded {
            files: files.iter().map(|&(p, t)| (p.to_string(), t)).collect(),
        }
    }
}

impl Source for Embedded {
    fn read(&self, path: &Path) -> std::io::Result<String> {
        let key = normalize(path).to_string_lossy().replace('\\', "/");
        self.files
            .get(&key)
            .map(|t| t.to_string())
            .ok_or_else(|| std::io::Error::new(std::io::ErrorKind::NotFound, "not in the embedded corpus"))
    }
}

/// Lexical normalization: drops `.` and folds `..` where possible.
pub fn normalize(path: &Path) -> PathBuf {
    let mut out = PathBuf::new();
    for c in path.components() {
        match c {
            Component::CurDir => {}
            Component::ParentDir => {
                if !out.pop() {
                    out.push("..");
                }
            }
            other => out.push(other.as_os_str()),
        }
    }
    out
}

/// `rel` as seen from the file at `from`.
pub fn resolve(from: &Path, rel: &str) -> PathBuf {
    let base = from.parent().unwrap_or_else(|| Path::new(""));
    normalize(&base.join(rel))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ModelRef {
    File { path: String, restrict: Option<String> },
    Generator { variant: LineVariant, restrict: Option<String> },
    Inline { text: String, first_line: usize },
}

impl fmt::Display for ModelRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let restrict = match self {
            ModelRef::File { path, restrict } => {
                f.write_str(path)?;
                restrict
            }
            ModelRef::Generator { variant, restrict } => {
                write!(f, "@consecutive:{variant}")?;
                restrict
            }
            ModelRef::Inline { .. } => return f.write_str("inline"),
        };
        if let Some(r) = restrict {
            write!(f, " restrict \"{r}\"")?;
        }
        Ok(())
    }
}

/// Directive lines of one file, with access to raw lines for inline blocks.
pub struct LineReader<'t> {
    file: String,
    lines: Vec<&'t str>,
    next: usize,
}

impl<'t> LineReader<'t> {
    pub fn new(file: impl Into<String>, text: &'t str) -> Self {
        LineReader {
            file: file.into(),
            lines: text.lines().collect(),
            next: 0,
        }
    }

    pub fn file(&self) -> &str {
        &self.file
    }

    pub fn error(&self, line: usize, message: impl Into<String>) -> Error {
        Error::Parse {
            file: self.file.clone(),
            line,
            message: message.into(),
        }
    }

    /// Next nonblank line as `(line number, tokens)`.
    pub fn next_line(&mut self) -> Result<Option<(usize, Vec<Tok>)>> {
        while self.next < self.lines.len() {
            let no = self.next + 1;
            let raw = self.lines[self.next];
            self.next += 1;
            let toks = tokenize(raw).map_err(|m| self.error(no, m))?;
            if !toks.is_empty() {
                return Ok(Some((no, toks)));
            }
        }
        Ok(None)
    }

    /// Raw lines up to (not including) a line reading `end`.
    pub fn block(&mut self, opened_at: usize) -> Result<(String, usize)> {
        let first = self.next + 1;
        let mut text = String::new();
        while self.next < self.lines.len() {
            let raw = self.lines[self.next];
            self.next += 1;
            if raw.trim() == "end" {
                return Ok((text, first));
            }
            text.push_str(raw);
            text.push('\n');
        }
        Err(self.error(opened_at, "inline block without `end`"))
    }

    /// Parses a model reference starting at `toks[0]`; returns it with the
    /// number of tokens consumed. An inline block is read right away.
    pub fn model_ref(&mut self, toks: &[Tok], line: usize) -> Result<(ModelRef, usize)> {
        let head = toks
            .first()
            .and_then(Tok::word)
            .ok_or_else(|| self.error(line, "expected a model reference"))?;
        if head == "inline" {
            let (text, first_line) = self.block(line)?;
            return Ok((ModelRef::Inline { text, first_line }, 1));
        }
        let mut used = 1;
        let restrict = match toks.get(1).and_then(Tok::word) {
            Some("restrict") => {
                let f = toks
                    .get(2)
                    .and_then(Tok::quoted)
                    .ok_or_else(|| self.error(line, "expected `restrict \"<formula>\"`"))?;
                used = 3;
                Some(f.to_string())
            }
            _ => None,
        };
        let r = match head.strip_prefix("@consecutive:") {
            Some(v) => ModelRef::Generator {
                variant: v
                    .parse()
                    .map_err(|_| self.error(line, format!("unknown generator variant `{v}`")))?,
                restrict,
            },
            None => ModelRef::File {
                path: head.to_string(),
                restrict,
            },
        };
        Ok((r, used))
    }
}

/// File access plus the settings that affect what a reference denotes.
pub struct Loader<'s> {
    pub source: &'s dyn Source,
    pub trunc_n: usize,
    generated: Cell<bool>,
}

impl<'s> Loader<'s> {
    pub fn new(source: &'s dyn Source, trunc_n: usize) -> Self {
        Loader {
            source,
            trunc_n,
            generated: Cell::new(false),
        }
    }

    /// Whether any truncated generator model has been produced so far.
    pub fn used_generator(&self) -> bool {
        self.generated.get()
    }

    pub fn read(&self, path: &Path) -> Result<String> {
        self.source.read(path).map_err(|e| Error::Io {
            path: path.display().to_string(),
            message: e.to_string(),
        })
    }

    pub fn model_file(&self, path: &Path) -> Result<KripkeModel> {
        let text = self.read(path)?;
        parse_model_at(&text, 1).map_err(|e| located(path, e))
    }

    /// Resolves a reference found in the file at `from`.
    pub fn model(&self, r: &ModelRef, from: &Path) -> Result<KripkeModel> {
        let (base, restrict) = match r {
            ModelRef::File { path, restrict } => (self.model_file(&resolve(from, path))?, restrict),
            ModelRef::Generator { variant, restrict } => {
                self.generated.set(true);
                (consecutive::line_model(*variant, self.trunc_n), restrict)
            }
            ModelRef::Inline { text, first_line } => {
                return parse_model_at(text, *first_line).map_err(|e| located(from, e));
            }
        };
        match restrict {
            None => Ok(base),
            Some(text) => restrict_model(&base, text),
        }
    }
}

/// `M|φ` without a point; the model keeps its name.
pub fn restrict_model(m: &KripkeModel, text: &str) -> Result<KripkeModel> {
    let f = parse_formula(text, m.agents(), m.atoms())?;
    let keep = truth_set(m, &f)?;
    m.restrict_to(&keep).ok_or_else(|| Error::EmptyRestriction(text.to_string()))
}

fn located(path: &Path, e: crate::kripke::ModelError) -> Error {
    match e {
        crate::kripke::ModelError::Parse { line, message } => Error::Parse {
            file: path.display().to_string(),
            line,
            message,
        },
        other => Error::Model(other),
    }
}
