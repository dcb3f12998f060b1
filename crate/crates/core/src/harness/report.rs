//! Report files: records as JSON lines, per-group summary tables and
//! plot-ready tab-separated data.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use super::records::{keys, write_records, Real, RunRecord, RunStatus};
use super::HarnessError;
use crate::metrics::summarize;

/// Metrics summarised in the group table, in column order.
pub const SUMMARY_METRICS: [&str; 10] = [
    keys::P_STAR,
    keys::TTS,
    keys::TTS_OH,
    keys::TTS_LAYERS,
    keys::AR,
    keys::RATIO,
    keys::RELATIVE_ERROR,
    keys::FEASIBILITY,
    keys::TOUR_VALIDITY,
    keys::COMBINED_ERROR,
];

/// `(group, solver)` → records, both sorted.
fn by_group(records: &[RunRecord]) -> BTreeMap<(&str, &str), Vec<&RunRecord>> {
    let mut out: BTreeMap<(&str, &str), Vec<&RunRecord>> = BTreeMap::new();
    for r in records {
        out.entry((r.group.as_str(), r.solver_id.as_str())).or_default().push(r);
    }
    out
}

fn present_metrics(records: &[RunRecord]) -> Vec<&'static str> {
    SUMMARY_METRICS.into_iter().filter(|k| records.iter().any(|r| r.metrics.contains_key(*k))).collect()
}

/// Group table: `count`, `ok`, `failed`, `skipped`, then median and the
/// 12.5% / 87.5% quantiles of each metric over successful runs.
pub fn group_table(records: &[RunRecord]) -> String {
    let metrics = present_metrics(records);
    let mut out = String::from("group\tsolver\tcount\tok\tfailed\tskipped");
    for m in &metrics {
        let _ = write!(out, "\t{m}_median\t{m}_q12_5\t{m}_q87_5");
    }
    out.push('\n');
    for ((group, solver), rs) in by_group(records) {
        let count_of = |s: RunStatus| rs.iter().filter(|r| r.status == s).count();
        let _ = write!(
            out,
            "{group}\t{solver}\t{}\t{}\t{}\t{}",
            rs.len(),
            count_of(RunStatus::Ok),
            count_of(RunStatus::Failed),
            count_of(RunStatus::Skipped)
        );
        for m in &metrics {
            let values: Vec<f64> = rs.iter().filter(|r| r.is_ok()).filter_map(|r| r.metric(m)).collect();
            match summarize(&values) {
                Some(s) => {
                    let _ = write!(out, "\t{}\t{}\t{}", Real(s.median), Real(s.q12_5), Real(s.q87_5));
                }
                None => out.push_str("\t\t\t"),
            }
        }
        out.push('\n');
    }
    out
}

/// Box-plot data for one metric: one row per successful record.
pub fn plot_data(records: &[RunRecord], metric: &str) -> String {
    let mut out = format!("group\tsolver\tinstance\tnum_nodes\t{metric}\n");
    for r in records.iter().filter(|r| r.is_ok()) {
        if let Some(v) = r.metric(metric) {
            let _ = writeln!(out, "{}\t{}\t{}\t{}\t{}", r.group, r.solver_id, r.instance_id, r.num_nodes, Real(v));
        }
    }
    out
}

/// Fraction of instances per group on which each solver matched the best
/// cost found; failed runs count as misses and are listed separately.
pub fn fob_table(records: &[RunRecord]) -> String {
    let mut out = String::from("group\tsolver\tinstances\tfob\tfailed\n");
    for ((group, solver), rs) in by_group(records) {
        let hits = rs.iter().filter(|r| r.metric(keys::OVERALL_BEST) == Some(1.0)).count();
        let failed = rs.iter().filter(|r| r.status == RunStatus::Failed).count();
        let _ = writeln!(out, "{group}\t{solver}\t{}\t{}\t{failed}", rs.len(), Real(hits as f64 / rs.len() as f64));
    }
    out
}

/// Writes `records.jsonl`, `groups.tsv`, `plot_<metric>.tsv` per present
/// metric and, for best-so-far runs, `fob.tsv`. Returns the written paths.
pub fn emit_report(records: &[RunRecord], dir: &Path) -> Result<Vec<PathBuf>, HarnessError> {
    if records.is_empty() {
        return Err(HarnessError::Config("no records to report".into()));
    }
    std::fs::create_dir_all(dir).map_err(|e| HarnessError::io(dir, e))?;
    let mut written = Vec::new();
    let jsonl = dir.join("records.jsonl");
    write_records(&jsonl, records)?;
    written.push(jsonl);
    let mut put = |name: String, body: String| -> Result<(), HarnessError> {
        let path = dir.join(name);
        std::fs::write(&path, body).map_err(|e| HarnessError::io(&path, e))?;
        written.push(path);
        Ok(())
    };
    put("groups.tsv".into(), group_table(records))?;
    for m in present_metrics(records) {
        put(format!("plot_{m}.tsv"), plot_data(records, m))?;
    }
    if records.iter().any(|r| r.scenario == "bsf") {
        put("fob.tsv".into(), fob_table(records))?;
    }
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::records::read_records;
    use crate::harness::records::tests_support::record;

    fn sample() -> Vec<RunRecord> {
        let mut out = Vec::new();
        for (i, tts) in [1.0, 2.0, f64::INFINITY].into_iter().enumerate() {
            let mut r = record(&format!("i{i}"), -3.0);
            r.set_metric(keys::TTS, tts);
            out.push(r);
        }
        let mut failed = record("i3", -1.0);
        failed.status = RunStatus::Failed;
        failed.group = "h".into();
        out.push(failed);
        out
    }

    #[test]
    fn files_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let recs = sample();
        let paths = emit_report(&recs, dir.path()).unwrap();
        assert!(paths.iter().any(|p| p.ends_with("plot_tts.tsv")));
        let back = read_records(&dir.path().join("records.jsonl")).unwrap();
        assert_eq!(back.len(), recs.len());
        assert_eq!(back[2].metric(keys::TTS), Some(f64::INFINITY));
        let text = std::fs::read_to_string(dir.path().join("records.jsonl")).unwrap();
        assert!(text.contains("\"tts\":\"inf\""));
        assert_eq!(text.lines().count(), recs.len());
    }

    #[test]
    fn group_counts_sum_to_records() {
        let recs = sample();
        let table = group_table(&recs);
        let mut lines = table.lines();
        let header: Vec<&str> = lines.next().unwrap().split('\t').collect();
        assert!(header.contains(&"tts_median") && header.contains(&"tts_q87_5"));
        let total: usize = lines.map(|l| l.split('\t').nth(2).unwrap().parse::<usize>().unwrap()).sum();
        assert_eq!(total, recs.len());
        assert!(table.lines().nth(1).unwrap().contains("\t2\t"));
    }

    #[test]
    fn empty_and_unwritable() {
        let dir = tempfile::tempdir().unwrap();
        assert!(emit_report(&[], dir.path()).is_err());
        let file = dir.path().join("f");
        std::fs::write(&file, "x").unwrap();
        assert!(matches!(emit_report(&sample(), &file.join("sub")), Err(HarnessError::Io { .. })));
    }
}
