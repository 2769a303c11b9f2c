//! `id,e0,...,e{d-1}` embedding files.

use std::collections::HashMap;
use std::io::{Read, Write};
use std::path::Path;

use super::{EmbeddingMatrix, VectorizeError};
use crate::error::Error;

fn parse_err(line: u64, message: impl Into<String>) -> VectorizeError {
    VectorizeError::ParseError {
        line,
        message: message.into(),
    }
}

/// Reads an embeddings CSV in file order, rejecting duplicate ids.
pub fn read_embeddings_csv<R: Read>(r: R) -> Result<EmbeddingMatrix, VectorizeError> {
    let mut rd = csv::ReaderBuilder::new().flexible(true).from_reader(r);
    let header = rd
        .headers()
        .map_err(|e| parse_err(1, e.to_string()))?
        .clone();
    if header.get(0) != Some("id") {
        return Err(parse_err(1, "first column must be `id`"));
    }
    let dim = header.len() - 1;
    for (k, name) in header.iter().skip(1).enumerate() {
        if name != format!("e{k}") {
            return Err(parse_err(
                1,
                format!("expected column `e{k}`, found `{name}`"),
            ));
        }
    }

    let mut ids = Vec::new();
    let mut seen = HashMap::new();
    let mut data = Vec::new();
    for rec in rd.records() {
        let rec =
            rec.map_err(|e| parse_err(e.position().map_or(0, |p| p.line()), e.to_string()))?;
        let line = rec.position().map_or(0, |p| p.line());
        if rec.len() != dim + 1 {
            return Err(VectorizeError::DimensionMismatch {
                line,
                expected: dim,
                found: rec.len().saturating_sub(1),
            });
        }
        let id = rec[0].to_string();
        if seen.insert(id.clone(), ()).is_some() {
            return Err(VectorizeError::DuplicateId(id));
        }
        for field in rec.iter().skip(1) {
            let v: f64 = field
                .trim()
                .parse()
                .map_err(|_| parse_err(line, format!("`{field}` is not a number")))?;
            if !v.is_finite() {
                return Err(parse_err(line, format!("`{field}` is not finite")));
            }
            data.push(v);
        }
        ids.push(id);
    }
    Ok(EmbeddingMatrix::new(ids, dim, data))
}

/// Writes with the shortest decimal representation that reads back to the
/// same `f64`.
pub fn write_embeddings_csv<W: Write>(emb: &EmbeddingMatrix, w: W) -> csv::Result<()> {
    let mut wr = csv::Writer::from_writer(w);
    let mut header = vec!["id".to_string()];
    header.extend((0..emb.dim()).map(|k| format!("e{k}")));
    wr.write_record(&header)?;
    for (i, id) in emb.doc_ids().iter().enumerate() {
        let mut rec = vec![id.clone()];
        rec.extend(emb.row(i).iter().map(|v| v.to_string()));
        wr.write_record(&rec)?;
    }
    wr.flush()?;
    Ok(())
}

/// Loads an embeddings file and aligns its rows to `expected_ids`.
pub fn load_external_embeddings(
    path: &Path,
    expected_ids: &[String],
) -> Result<EmbeddingMatrix, Error> {
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let emb = read_embeddings_csv(std::io::BufReader::new(file))?;
    Ok(align_embeddings(&emb, expected_ids)?)
}

pub fn align_embeddings(
    emb: &EmbeddingMatrix,
    expected_ids: &[String],
) -> Result<EmbeddingMatrix, VectorizeError> {
    let pos: HashMap<&str, usize> = emb
        .doc_ids()
        .iter()
        .enumerate()
        .map(|(i, id)| (id.as_str(), i))
        .collect();
    let mut order = Vec::with_capacity(expected_ids.len());
    let mut wanted = HashMap::with_capacity(expected_ids.len());
    for id in expected_ids {
        let &i = pos
            .get(id.as_str())
            .ok_or_else(|| VectorizeError::MissingId(id.clone()))?;
        if wanted.insert(id.as_str(), ()).is_some() {
            return Err(VectorizeError::DuplicateId(id.clone()));
        }
        order.push(i);
    }
    if let Some(extra) = emb
        .doc_ids()
        .iter()
        .find(|id| !wanted.contains_key(id.as_str()))
    {
        return Err(VectorizeError::UnexpectedId(extra.clone()));
    }
    Ok(emb.select(&order))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn ids(xs: &[&str]) -> Vec<String> {
        xs.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn aligns_to_expected_order() {
        let src = "id,e0,e1\nt2,3,4\nt1,1,2\n";
        let emb = read_embeddings_csv(src.as_bytes()).unwrap();
        let out = align_embeddings(&emb, &ids(&["t1", "t2"])).unwrap();
        assert_eq!(out.doc_ids(), &ids(&["t1", "t2"]));
        assert_eq!(out.row(0), &[1.0, 2.0]);
        assert_eq!(out.dim(), 2);
    }

    #[test]
    fn id_errors() {
        let emb = read_embeddings_csv("id,e0\nt1,1\nt2,2\n".as_bytes()).unwrap();
        assert_eq!(
            align_embeddings(&emb, &ids(&["t1", "t3"])),
            Err(VectorizeError::MissingId("t3".into()))
        );
        assert_eq!(
            align_embeddings(&emb, &ids(&["t1"])),
            Err(VectorizeError::UnexpectedId("t2".into()))
        );
        assert_eq!(
            read_embeddings_csv("id,e0\nt1,1\nt1,2\n".as_bytes()),
            Err(VectorizeError::DuplicateId("t1".into()))
        );
    }

    #[test]
    fn format_errors() {
        assert_eq!(
            read_embeddings_csv("id,e0,e1\nt1,1\n".as_bytes()),
            Err(VectorizeError::DimensionMismatch {
                line: 2,
                expected: 2,
                found: 1
            })
        );
        assert!(matches!(
            read_embeddings_csv("id,e0\nt1,abc\n".as_bytes()),
            Err(VectorizeError::ParseError { line: 2, .. })
        ));
        assert!(matches!(
            read_embeddings_csv("name,e0\n".as_bytes()),
            Err(VectorizeError::ParseError { line: 1, .. })
        ));
        assert!(matches!(
            read_embeddings_csv("id,e0\nt1,NaN\n".as_bytes()),
            Err(VectorizeError::ParseError { .. })
        ));
    }

    proptest! {
        #[test]
        fn save_then_load_is_identity(
            rows in proptest::collection::vec(proptest::collection::vec(-1e6f64..1e6, 3), 1..20)
        ) {
            let ids: Vec<String> = (0..rows.len()).map(|i| format!("doc{i}")).collect();
            let emb = EmbeddingMatrix::from_rows(ids.clone(), &rows);
            let mut buf = Vec::new();
            write_embeddings_csv(&emb, &mut buf).unwrap();
            let back = align_embeddings(&read_embeddings_csv(&buf[..]).unwrap(), &ids).unwrap();
            prop_assert_eq!(back, emb);
        }
    }
}
