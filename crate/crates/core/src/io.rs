//! File formats: pmf JSON, sample data (raw observations or `label,count`
//! CSV), and CSV side files for plotting.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

use crate::distribution::{Pmf, SampleCounts};
use crate::error::{Error, Result};
use crate::inference::Histogram;
use crate::montecarlo::{CltEntry, CltReport, TraceRow};

pub const COUNTS_HEADER: &str = "label,count";

/// Reads `{"labels": [...], "probs": [...]}`.
pub fn read_pmf(path: &Path) -> Result<Pmf> {
    parse_pmf(BufReader::new(File::open(path)?))
}

pub fn parse_pmf<R: Read>(reader: R) -> Result<Pmf> {
    Ok(serde_json::from_reader(reader)?)
}

/// Reads sample data. A first line equal to `label,count` selects the CSV
/// format; anything else is treated as one observation per line.
pub fn read_counts(path: &Path) -> Result<SampleCounts> {
    parse_counts(BufReader::new(File::open(path)?))
}

pub fn parse_counts<R: BufRead>(mut reader: R) -> Result<SampleCounts> {
    let mut first = String::new();
    reader.read_line(&mut first)?;
    if first.trim() == COUNTS_HEADER {
        parse_count_rows(reader)
    } else {
        aggregate_observations(first.as_bytes().chain(reader))
    }
}

#[derive(Deserialize)]
struct CountRow {
    label: String,
    count: u64,
}

fn parse_count_rows<R: Read>(reader: R) -> Result<SampleCounts> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(false).trim(csv::Trim::All).from_reader(reader);
    let mut labels = Vec::new();
    let mut counts = Vec::new();
    for row in rdr.deserialize() {
        let row: CountRow = row?;
        labels.push(row.label);
        counts.push(row.count);
    }
    SampleCounts::new(labels, counts)
}

/// One pass over raw observations; categories are ordered by first
/// appearance and blank lines are skipped.
fn aggregate_observations<R: BufRead>(reader: R) -> Result<SampleCounts> {
    let mut tally: IndexMap<String, u64> = IndexMap::new();
    for line in reader.lines() {
        let line = line?;
        let label = line.trim();
        if label.is_empty() {
            continue;
        }
        *tally.entry(label.to_owned()).or_insert(0) += 1;
    }
    if tally.is_empty() {
        return Err(Error::EmptySample);
    }
    let (labels, counts) = tally.into_iter().unzip();
    SampleCounts::new(labels, counts)
}

/// Pretty JSON with a trailing newline.
pub fn write_json<T: Serialize + ?Sized>(path: &Path, value: &T) -> Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    serde_json::to_writer_pretty(&mut out, value)?;
    out.write_all(b"\n")?;
    out.flush()?;
    Ok(())
}

fn write_rows<W: Write, I>(writer: W, header: &[&str], rows: I) -> Result<()>
where
    I: IntoIterator<Item = Vec<String>>,
{
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(header)?;
    for row in rows {
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_standardized_csv<W: Write>(writer: W, values: &[f64]) -> Result<()> {
    write_rows(writer, &["value"], values.iter().map(|v| vec![v.to_string()]))
}

pub fn write_qq_csv<W: Write>(writer: W, points: &[(f64, f64)]) -> Result<()> {
    write_rows(writer, &["theoretical", "observed"], points.iter().map(|(t, o)| vec![t.to_string(), o.to_string()]))
}

pub fn write_histogram_csv<W: Write>(writer: W, hist: &Histogram) -> Result<()> {
    let rows = hist
        .counts
        .iter()
        .enumerate()
        .map(|(i, c)| vec![hist.edges[i].to_string(), hist.edges[i + 1].to_string(), c.to_string()]);
    write_rows(writer, &["bin_left", "bin_right", "count"], rows)
}

pub fn write_trace_csv<W: Write>(writer: W, rows: &[TraceRow]) -> Result<()> {
    let rows =
        rows.iter().map(|r| vec![r.family.clone(), r.n.to_string(), r.estimate.to_string(), r.truth.to_string()]);
    write_rows(writer, &["family", "n", "estimate", "truth"], rows)
}

/// `<family>_<n>_<artifact>.csv`.
pub fn artifact_name(family: &str, n: u64, artifact: &str) -> String {
    format!("{family}_{n}_{artifact}.csv")
}

fn create(dir: &Path, name: String, written: &mut Vec<PathBuf>) -> Result<BufWriter<File>> {
    let path = dir.join(name);
    let file = File::create(&path)?;
    written.push(path);
    Ok(BufWriter::new(file))
}

fn write_entry_artifacts(dir: &Path, entry: &CltEntry, written: &mut Vec<PathBuf>) -> Result<()> {
    let family = entry.kind.family_name();
    write_standardized_csv(
        create(dir, artifact_name(family, entry.n, "standardized"), written)?,
        &entry.standardized.values,
    )?;
    write_qq_csv(create(dir, artifact_name(family, entry.n, "qq"), written)?, &entry.normality.qq_points)?;
    write_histogram_csv(create(dir, artifact_name(family, entry.n, "histogram"), written)?, &entry.normality.histogram)
}

/// Writes `report.json` plus standardized-sample, Q-Q and histogram CSVs for
/// every cell. Returns the paths written, in order.
pub fn write_clt_artifacts(dir: &Path, report: &CltReport) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    let json = dir.join("report.json");
    write_json(&json, report)?;
    written.push(json);
    for entry in &report.entries {
        write_entry_artifacts(dir, entry, &mut written)?;
    }
    Ok(written)
}

/// Writes one `<family>_<largest n>_trace.csv` per family.
pub fn write_trace_artifacts(dir: &Path, rows: &[TraceRow]) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir)?;
    let mut groups: IndexMap<&str, Vec<TraceRow>> = IndexMap::new();
    for row in rows {
        groups.entry(row.family.as_str()).or_default().push(row.clone());
    }
    let mut written = Vec::new();
    for (family, group) in groups {
        let n_max = group.iter().map(|r| r.n).max().unwrap_or(0);
        write_trace_csv(create(dir, artifact_name(family, n_max, "trace"), &mut written)?, &group)?;
    }
    Ok(written)
}
