use std::fmt::Write;

use itertopic::rundir::RunDirContents;
use itertopic::StopReason;
use serde::Serialize;

const REPORT_TERMS: usize = 10;

fn status(c: &RunDirContents) -> String {
    match &c.info {
        None => "partial: run.json missing, the run did not finish".to_string(),
        Some(info) => match info.stop_reason {
            StopReason::Converged => format!("converged after {} iterations", info.iterations),
            StopReason::MaxIters => format!(
                "stopped at the iteration limit after {} iterations without converging",
                info.iterations
            ),
            StopReason::Degenerate => format!(
                "partial: stopped degenerate after {} iterations ({})",
                info.iterations,
                info.degenerate.as_deref().unwrap_or("no reason recorded")
            ),
        },
    }
}

pub fn markdown(c: &RunDirContents) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "# Run report\n");
    let _ = writeln!(s, "Status: {}\n", status(c));
    if let Some(info) = &c.info {
        let _ = writeln!(s, "Produced by {}\n", info.version);
    }

    let _ = writeln!(s, "## Iterations\n");
    let _ = writeln!(s, "| iteration | requested | topics | groups | outliers |");
    let _ = writeln!(s, "|---:|---:|---:|---:|---:|");
    for r in &c.summary {
        let req = r
            .requested_n
            .map_or_else(|| "-".to_string(), |n| n.to_string());
        let _ = writeln!(
            s,
            "| {} | {} | {} | {} | {} |",
            r.iter, req, r.achieved_topics, r.achieved_groups, r.outlier_count
        );
    }

    let _ = writeln!(s, "\n## Comparisons\n");
    if c.indices.is_empty() {
        let _ = writeln!(s, "No comparisons (single iteration).");
    } else {
        let _ = writeln!(s, "| from | to | common | ari | vdm | nvi |");
        let _ = writeln!(s, "|---:|---:|---:|---:|---:|---:|");
        for r in &c.indices {
            let _ = writeln!(
                s,
                "| {} | {} | {} | {:.4} | {:.4} | {:.4} |",
                r.from_iter, r.to_iter, r.n_common, r.ari, r.vdm, r.nvi
            );
        }
    }

    let _ = writeln!(s, "\n## Final topics\n");
    match &c.final_topics {
        None => {
            let _ = writeln!(s, "Not available.");
        }
        Some(topics) => {
            for t in topics {
                let terms: Vec<&str> = t
                    .terms
                    .iter()
                    .take(REPORT_TERMS)
                    .map(|w| w.term.as_str())
                    .collect();
                let group = t.group.as_deref().unwrap_or("topic");
                let _ = writeln!(
                    s,
                    "- **{}** ({group}, {} docs): {}",
                    t.label,
                    t.size,
                    terms.join(", ")
                );
            }
        }
    }
    s
}

#[derive(Serialize)]
struct Bundle<'a> {
    status: String,
    partial: bool,
    run: Option<&'a itertopic::rundir::RunInfo>,
    summary: &'a [itertopic::rundir::SummaryRow],
    indices: &'a [itertopic::rundir::IndexRow],
    final_topics: Option<&'a [itertopic::topicrep::TopicRecord]>,
}

pub fn json(c: &RunDirContents) -> String {
    let partial = c.is_partial()
        || c.info
            .as_ref()
            .is_some_and(|i| i.stop_reason == StopReason::Degenerate);
    let bundle = Bundle {
        status: status(c),
        partial,
        run: c.info.as_ref(),
        summary: &c.summary,
        indices: &c.indices,
        final_topics: c.final_topics.as_deref(),
    };
    let mut out = serde_json::to_string_pretty(&bundle).expect("serializable");
    out.push('\n');
    out
}
