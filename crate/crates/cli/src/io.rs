//! Operand loading and output formatting.

use std::fs;
use std::io::Read;

use crystalline::interchange::{Document, Kind, Parsed};
use crystalline::Fq;
use serde_json::Value;

use crate::CliError;

/// Reads an operand: "-" is stdin, text starting with '{' is an inline document, anything else a path.
pub fn read_text(operand: &str) -> Result<String, CliError> {
    if operand == "-" {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s).map_err(|e| CliError::Usage(format!("cannot read stdin: {e}")))?;
        return Ok(s);
    }
    if operand.trim_start().starts_with('{') {
        return Ok(operand.to_string());
    }
    fs::read_to_string(operand).map_err(|e| CliError::Usage(format!("cannot read {operand}: {e}")))
}

pub fn load(operand: &str) -> Result<Document, CliError> {
    Ok(Document::parse(&read_text(operand)?)?)
}

/// Loads and decodes a document, insisting on one of the given kinds.
pub fn load_kind(operand: &str, kinds: &[Kind]) -> Result<Parsed, CliError> {
    let doc = load(operand)?;
    if !kinds.contains(&doc.kind) {
        let want: Vec<&str> = kinds.iter().map(|k| k.as_str()).collect();
        return Err(CliError::Usage(format!("{operand}: expected a {} document, got {}", want.join(" or "), doc.kind.as_str())));
    }
    Ok(doc.decode()?)
}

/// Output of one command: a document for --json plus the text rendering.
pub struct Output {
    pub doc: Document,
    pub text: String,
}

impl Output {
    pub fn new(doc: Document, text: impl Into<String>) -> Self {
        Output { doc, text: text.into() }
    }

    pub fn report(payload: Value, text: impl Into<String>) -> Self {
        Output::new(Document::new(Kind::Report, payload), text)
    }

    /// Objects print as documents in both modes so they can be piped.
    pub fn object(doc: Document) -> Self {
        let text = doc.to_canonical();
        Output { doc, text }
    }

    pub fn render(&self, json: bool) -> String {
        if json {
            self.doc.to_canonical()
        } else {
            self.text.clone()
        }
    }
}

pub fn fq_text(e: &Fq) -> String {
    if e.len() == 1 {
        e[0].to_string()
    } else {
        let parts: Vec<String> = e.iter().map(u64::to_string).collect();
        format!("({})", parts.join(","))
    }
}

pub fn list_text<T: std::fmt::Display>(xs: &[T]) -> String {
    let parts: Vec<String> = xs.iter().map(T::to_string).collect();
    format!("[{}]", parts.join(","))
}
