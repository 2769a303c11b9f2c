//! On-disk layout of a run.
//!
//! ```text
//! <dir>/run.json              version, stop reason, configuration
//! <dir>/summary.json          one row per iteration
//! <dir>/indices.json          one row per comparison of successive iterations
//! <dir>/iter_<t>/assignments.csv
//! <dir>/iter_<t>/topics.json
//! <dir>/final/assignments.csv id,label,group
//! <dir>/final/topics.json
//! ```
//!
//! Every file is written to a temporary sibling and renamed into place.
//! `run.json` is written last, so a directory without it is a partial run.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fmt::serialize_sig6;
use crate::iterloop::{IterationRecord, RunConfig, RunResult, StopReason};
use crate::partition::{Label, Partition};
use crate::topicrep::{TopicRecord, TopicRep};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub iter: usize,
    pub requested_n: Option<usize>,
    pub achieved_topics: usize,
    pub achieved_groups: usize,
    pub outlier_count: usize,
}

impl SummaryRow {
    pub fn of(rec: &IterationRecord) -> Self {
        Self {
            iter: rec.t,
            requested_n: rec.requested_n,
            achieved_topics: rec.achieved_topics,
            achieved_groups: rec.achieved_groups(),
            outlier_count: rec.outlier_ids.len(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IndexRow {
    pub from_iter: usize,
    pub to_iter: usize,
    pub n_common: usize,
    #[serde(serialize_with = "serialize_sig6")]
    pub rand: f64,
    #[serde(serialize_with = "serialize_sig6")]
    pub ari: f64,
    #[serde(serialize_with = "serialize_sig6")]
    pub vdm: f64,
    #[serde(serialize_with = "serialize_sig6")]
    pub vi_nats: f64,
    #[serde(serialize_with = "serialize_sig6")]
    pub nvi: f64,
}

impl IndexRow {
    pub fn of(rec: &IterationRecord) -> Option<Self> {
        let r = rec.vs_previous?;
        Some(Self {
            from_iter: rec.t - 1,
            to_iter: rec.t,
            n_common: r.n_common,
            rand: r.rand,
            ari: r.ari,
            vdm: r.vdm,
            vi_nats: r.vi,
            nvi: r.nvi,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunInfo {
    pub version: String,
    pub stop_reason: StopReason,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub degenerate: Option<String>,
    pub iterations: usize,
    pub config: serde_json::Value,
}

/// Writes `bytes` to `path` through a temporary file in the same directory.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let parent = path.parent().filter(|p| !p.as_os_str().is_empty());
    let parent = parent.unwrap_or(Path::new("."));
    std::fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
    let mut tmp = tempfile::NamedTempFile::new_in(parent).map_err(|e| Error::io(parent, e))?;
    tmp.write_all(bytes).map_err(|e| Error::io(path, e))?;
    tmp.persist(path).map_err(|e| Error::io(path, e.error))?;
    Ok(())
}

pub fn write_json_atomic<T: Serialize + ?Sized>(path: &Path, value: &T) -> Result<()> {
    let mut bytes = serde_json::to_vec_pretty(value)?;
    bytes.push(b'\n');
    write_atomic(path, &bytes)
}

fn topic_records(
    reps: &[TopicRep],
    top_k: usize,
    groups: Option<&BTreeMap<Label, String>>,
) -> Vec<TopicRecord> {
    reps.iter()
        .map(|r| TopicRecord::from_rep(r, top_k, groups.and_then(|g| g.get(&r.label).cloned())))
        .collect()
}

fn partition_csv(part: &Partition) -> Vec<u8> {
    let mut buf = Vec::new();
    part.write_csv(&mut buf).expect("writing to memory");
    buf
}

/// Writes a run directory incrementally: iterations as they finish, the final
/// grouping and `run.json` at the end.
pub struct RunDirWriter {
    dir: PathBuf,
    top_k: usize,
    summary: Vec<SummaryRow>,
    indices: Vec<IndexRow>,
}

impl RunDirWriter {
    pub fn create(dir: impl Into<PathBuf>, top_k: usize) -> Result<Self> {
        let dir = dir.into();
        std::fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
        Ok(Self {
            dir,
            top_k,
            summary: Vec::new(),
            indices: Vec::new(),
        })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn iteration(&mut self, rec: &IterationRecord) -> Result<()> {
        let it = self.dir.join(format!("iter_{}", rec.t));
        write_atomic(&it.join("assignments.csv"), &partition_csv(&rec.partition))?;
        write_json_atomic(
            &it.join("topics.json"),
            &topic_records(&rec.reps, self.top_k, None),
        )?;
        self.summary.push(SummaryRow::of(rec));
        self.indices.extend(IndexRow::of(rec));
        write_json_atomic(&self.dir.join("summary.json"), &self.summary)?;
        write_json_atomic(&self.dir.join("indices.json"), &self.indices)
    }

    pub fn finish(self, result: &RunResult, cfg: &RunConfig, version: &str) -> Result<()> {
        if self.summary.is_empty() {
            write_json_atomic(&self.dir.join("summary.json"), &self.summary)?;
            write_json_atomic(&self.dir.join("indices.json"), &self.indices)?;
        }
        let fin = self.dir.join("final");
        write_atomic(
            &fin.join("assignments.csv"),
            &final_csv(&result.final_partition, &result.final_groups),
        )?;
        write_json_atomic(
            &fin.join("topics.json"),
            &topic_records(&result.final_topics, self.top_k, Some(&result.final_groups)),
        )?;
        let info = RunInfo {
            version: version.to_string(),
            stop_reason: result.stop_reason,
            degenerate: result.degenerate.as_ref().map(ToString::to_string),
            iterations: result.records.len(),
            config: serde_json::to_value(cfg)?,
        };
        write_json_atomic(&self.dir.join("run.json"), &info)
    }
}

/// Writes a complete run directory in one go.
pub fn write_run_dir(
    dir: impl Into<PathBuf>,
    result: &RunResult,
    cfg: &RunConfig,
    top_k: usize,
    version: &str,
) -> Result<()> {
    let mut w = RunDirWriter::create(dir, top_k)?;
    for rec in &result.records {
        w.iteration(rec)?;
    }
    w.finish(result, cfg, version)
}

fn final_csv(part: &Partition, groups: &BTreeMap<Label, String>) -> Vec<u8> {
    let mut wr = csv::Writer::from_writer(Vec::new());
    wr.write_record(["id", "label", "group"])
        .expect("writing to memory");
    for (id, l) in part.iter() {
        let g = groups.get(&l).map_or("", String::as_str);
        wr.write_record([id, &l.to_string(), g])
            .expect("writing to memory");
    }
    wr.into_inner().expect("writing to memory")
}

/// Everything `report` needs from a run directory.
#[derive(Debug, Clone, PartialEq)]
pub struct RunDirContents {
    /// `None` for a run that did not finish.
    pub info: Option<RunInfo>,
    pub summary: Vec<SummaryRow>,
    pub indices: Vec<IndexRow>,
    pub final_topics: Option<Vec<TopicRecord>>,
}

impl RunDirContents {
    pub fn is_partial(&self) -> bool {
        self.info.is_none()
    }
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<Option<T>> {
    match std::fs::read(path) {
        Ok(bytes) => serde_json::from_slice(&bytes)
            .map(Some)
            .map_err(|e| Error::format(path, e.to_string())),
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => Ok(None),
        Err(e) => Err(Error::io(path, e)),
    }
}

pub fn read_run_dir(dir: &Path) -> Result<RunDirContents> {
    if !dir.is_dir() {
        return Err(Error::io(
            dir,
            std::io::Error::new(std::io::ErrorKind::NotFound, "run directory not found"),
        ));
    }
    let summary: Vec<SummaryRow> = read_json(&dir.join("summary.json"))?
        .ok_or_else(|| Error::format(dir.join("summary.json"), "missing"))?;
    Ok(RunDirContents {
        info: read_json(&dir.join("run.json"))?,
        summary,
        indices: read_json(&dir.join("indices.json"))?.unwrap_or_default(),
        final_topics: read_json(&dir.join("final").join("topics.json"))?,
    })
}
