//! Corpus files: the raw input CSV and the cleaned JSON-lines file.

use std::collections::HashSet;
use std::io::{BufRead, Read, Write};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::textprep::{Document, RawRecord};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CorpusError {
    #[error("missing column `{0}`")]
    MissingColumn(String),
    #[error("line {line}: {message}")]
    Parse { line: u64, message: String },
    #[error("line {line}: duplicate id `{id}`")]
    DuplicateId { line: u64, id: String },
}

#[derive(Serialize, Deserialize)]
struct CleanLine<'a> {
    id: std::borrow::Cow<'a, str>,
    text: std::borrow::Cow<'a, str>,
}

/// Reads a headed CSV and picks the id and text columns by name.
pub fn read_raw_csv<R: Read>(
    r: R,
    id_col: &str,
    text_col: &str,
) -> Result<Vec<RawRecord>, CorpusError> {
    let mut rd = csv::ReaderBuilder::new().flexible(true).from_reader(r);
    let headers = rd
        .headers()
        .map_err(|e| CorpusError::Parse {
            line: 1,
            message: e.to_string(),
        })?
        .clone();
    let col = |name: &str| {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| CorpusError::MissingColumn(name.to_string()))
    };
    let (ic, tc) = (col(id_col)?, col(text_col)?);
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for rec in rd.records() {
        let rec = rec.map_err(|e| CorpusError::Parse {
            line: e.position().map_or(0, |p| p.line()),
            message: e.to_string(),
        })?;
        let line = rec.position().map_or(0, |p| p.line());
        let (Some(id), Some(text)) = (rec.get(ic), rec.get(tc)) else {
            return Err(CorpusError::Parse {
                line,
                message: format!("expected at least {} fields", ic.max(tc) + 1),
            });
        };
        if !seen.insert(id.to_string()) {
            return Err(CorpusError::DuplicateId {
                line,
                id: id.to_string(),
            });
        }
        out.push(RawRecord::new(id, text));
    }
    Ok(out)
}

/// One `{"id","text"}` object per line, `text` being the cleaned text.
pub fn write_cleaned_jsonl<W: Write>(docs: &[Document], mut w: W) -> std::io::Result<()> {
    for d in docs {
        let line = CleanLine {
            id: d.id.as_str().into(),
            text: d.clean.as_str().into(),
        };
        serde_json::to_writer(&mut w, &line)?;
        w.write_all(b"\n")?;
    }
    w.flush()
}

/// Blank lines are skipped.
pub fn read_cleaned_jsonl<R: BufRead>(r: R) -> Result<Vec<Document>, CorpusError> {
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for (i, line) in r.lines().enumerate() {
        let line_no = i as u64 + 1;
        let line = line.map_err(|e| CorpusError::Parse {
            line: line_no,
            message: e.to_string(),
        })?;
        if line.trim().is_empty() {
            continue;
        }
        let rec: CleanLine = serde_json::from_str(&line).map_err(|e| CorpusError::Parse {
            line: line_no,
            message: e.to_string(),
        })?;
        if !seen.insert(rec.id.to_string()) {
            return Err(CorpusError::DuplicateId {
                line: line_no,
                id: rec.id.into_owned(),
            });
        }
        out.push(Document::from_clean(
            rec.id.into_owned(),
            rec.text.into_owned(),
        ));
    }
    Ok(out)
}
