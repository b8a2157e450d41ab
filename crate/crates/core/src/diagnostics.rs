//! Error values that point back into the source text.
//!
//! A [`Diagnostic`] never contains pretty-printed syntax of the offending
//! code; instead its labels carry spans, and [`render`] reproduces the exact
//! source slices next to the message.

use std::fmt;
use std::sync::Arc;

use crate::syntax::Span;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Phase {
    Io,
    Parse,
    Resolve,
    Type,
    Proof,
    Match,
}

impl fmt::Display for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Phase::Io => "io",
            Phase::Parse => "parse",
            Phase::Resolve => "resolve",
            Phase::Type => "type",
            Phase::Proof => "proof",
            Phase::Match => "match",
        })
    }
}

/// A span together with the file it points into. `file: None` refers to the
/// module being checked.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Label {
    pub file: Option<Arc<str>>,
    pub span: Span,
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("{phase}: {message}")]
pub struct Diagnostic {
    pub phase: Phase,
    pub message: String,
    pub labels: Vec<Label>,
}

pub type Result<T, E = Diagnostic> = std::result::Result<T, E>;

impl Diagnostic {
    pub fn new(phase: Phase, message: impl Into<String>) -> Self {
        Diagnostic {
            phase,
            message: message.into(),
            labels: Vec::new(),
        }
    }

    pub fn parse(message: impl Into<String>) -> Self {
        Self::new(Phase::Parse, message)
    }

    pub fn resolve(message: impl Into<String>) -> Self {
        Self::new(Phase::Resolve, message)
    }

    pub fn typing(message: impl Into<String>) -> Self {
        Self::new(Phase::Type, message)
    }

    pub fn proof(message: impl Into<String>) -> Self {
        Self::new(Phase::Proof, message)
    }

    /// Attach a span; `None` is ignored (synthesized nodes have no span).
    pub fn with_span(mut self, span: Option<Span>) -> Self {
        if let Some(span) = span {
            if !self
                .labels
                .iter()
                .any(|l| l.span == span && l.file.is_none())
            {
                self.labels.push(Label { file: None, span });
            }
        }
        self
    }

    pub fn with_file_span(mut self, file: Option<Arc<str>>, span: Option<Span>) -> Self {
        if let Some(span) = span {
            self.labels.push(Label { file, span });
        }
        self
    }

    /// Assign `file` to every label that does not name one yet.
    pub fn in_file(mut self, file: &Arc<str>) -> Self {
        for l in &mut self.labels {
            if l.file.is_none() {
                l.file = Some(file.clone());
            }
        }
        self
    }

    pub fn spans(&self) -> impl Iterator<Item = Span> + '_ {
        self.labels.iter().map(|l| l.span)
    }
}

/// The texts diagnostics may point into. The first file added is the
/// default for labels without a file name.
#[derive(Clone, Debug, Default)]
pub struct Sources {
    files: Vec<(Arc<str>, String)>,
}

impl Sources {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn single(name: &str, text: &str) -> Self {
        let mut s = Self::new();
        s.insert(name, text);
        s
    }

    pub fn insert(&mut self, name: &str, text: &str) {
        self.files.push((Arc::from(name), text.to_string()));
    }

    fn lookup(&self, file: Option<&str>) -> Option<(&str, &str)> {
        match file {
            Some(f) => self.files.iter().find(|(n, _)| &**n == f),
            None => self.files.first(),
        }
        .map(|(n, t)| (&**n, t.as_str()))
    }
}

/// Source slices a rendering of `d` shows, one per label that resolves.
pub fn rendered_slices<'a>(d: &Diagnostic, sources: &'a Sources) -> Vec<&'a str> {
    d.labels
        .iter()
        .filter_map(|l| {
            let (_, text) = sources.lookup(l.file.as_deref())?;
            l.span.slice(text)
        })
        .collect()
}

/// Human-readable rendering: the message, then for every label its
/// location, the source lines it covers and a caret underline.
pub fn render(d: &Diagnostic, sources: &Sources) -> String {
    let mut out = format!("error[{}]: {}\n", d.phase, d.message);
    for label in &d.labels {
        let Some((name, text)) = sources.lookup(label.file.as_deref()) else {
            out.push_str(&format!(
                "  --> {}:{}\n",
                label.file.as_deref().unwrap_or("<input>"),
                label.span
            ));
            continue;
        };
        out.push_str(&format!("  --> {name}:{}\n", label.span));
        if label.span.slice(text).is_none() {
            continue;
        }
        render_snippet(&mut out, text, label.span);
    }
    out
}

fn render_snippet(out: &mut String, text: &str, span: Span) {
    let first = span.start.line as usize;
    let last = span.end.line.max(span.start.line) as usize;
    let width = last.to_string().len();
    out.push_str(&format!("{:width$} |\n", ""));
    for (idx, line) in text
        .split('\n')
        .enumerate()
        .skip(first - 1)
        .take(last - first + 1)
    {
        let lineno = idx + 1;
        let line = line.strip_suffix('\r').unwrap_or(line);
        out.push_str(&format!("{lineno:>width$} | {line}\n"));
        let chars = line.chars().count();
        let from = if lineno == first {
            span.start.column as usize - 1
        } else {
            0
        };
        let to = if lineno == last {
            (span.end.column as usize).saturating_sub(1)
        } else {
            chars
        };
        let carets = to.saturating_sub(from).max(1);
        out.push_str(&format!(
            "{:width$} | {}{}\n",
            "",
            " ".repeat(from),
            "^".repeat(carets)
        ));
    }
}

/// One line: `file:line:col: phase: message`.
pub fn render_machine(d: &Diagnostic, default_file: &str) -> String {
    let message = d.message.replace('\n', " ");
    match d.labels.first() {
        Some(l) => format!(
            "{}:{}:{}: {}: {}",
            l.file.as_deref().unwrap_or(default_file),
            l.span.start.line,
            l.span.start.column,
            d.phase,
            message
        ),
        None => format!("{default_file}: {}: {}", d.phase, message),
    }
}
