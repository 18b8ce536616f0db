//! Grouped mean and standard error over result CSVs.

use std::collections::HashMap;
use std::path::{Path, PathBuf};

use crate::error::{CliError, Result};
use crate::run::OutputFile;

/// Mean and standard error `sd / sqrt(n)` with the `n - 1` variance; a
/// single value has standard error 0.
pub fn mean_se(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

struct Table {
    path: PathBuf,
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

fn read_table(path: &Path) -> Result<Table> {
    let mut r = csv::Reader::from_path(path).map_err(|e| match e.into_kind() {
        csv::ErrorKind::Io(io) => CliError::io(path, io),
        other => CliError::Schema(format!("{}: {other:?}", path.display())),
    })?;
    let header: Vec<String> = r
        .headers()
        .map_err(|e| CliError::Schema(format!("{}: {e}", path.display())))?
        .iter()
        .map(str::to_string)
        .collect();
    let rows = r
        .records()
        .map(|rec| {
            rec.map(|rec| rec.iter().map(str::to_string).collect())
                .map_err(|e| CliError::Schema(format!("{}: {e}", path.display())))
        })
        .collect::<Result<Vec<Vec<String>>>>()?;
    Ok(Table { path: path.to_path_buf(), header, rows })
}

fn column(t: &Table, name: &str) -> Result<usize> {
    t.header
        .iter()
        .position(|h| h == name)
        .ok_or_else(|| CliError::Schema(format!("{}: no column `{name}`", t.path.display())))
}

/// Summarizes `metrics` (every numeric non-group column when empty) over
/// rows grouped by `group_by`, pooling all inputs. Output columns are the
/// group columns, then `metric,mean,se,trials`; groups appear in order of
/// first occurrence.
pub fn summarize_tables(inputs: &[PathBuf], group_by: &[String], metrics: &[String]) -> Result<String> {
    let tables = inputs.iter().map(|p| read_table(p)).collect::<Result<Vec<_>>>()?;
    let first = tables.first().ok_or_else(|| CliError::invalid("summarize.inputs", "no input files"))?;
    let metrics: Vec<String> = if metrics.is_empty() {
        first
            .header
            .iter()
            .enumerate()
            .filter(|(_, h)| !group_by.contains(h))
            .filter(|(i, _)| first.rows.iter().all(|r| r[*i].parse::<f64>().is_ok()))
            .map(|(_, h)| h.clone())
            .collect()
    } else {
        metrics.to_vec()
    };
    if metrics.is_empty() {
        return Err(CliError::Schema("no numeric columns to summarize".into()));
    }

    let mut index: HashMap<Vec<String>, usize> = HashMap::new();
    let mut groups: Vec<(Vec<String>, Vec<Vec<f64>>)> = Vec::new();
    for t in &tables {
        let gcols = group_by.iter().map(|g| column(t, g)).collect::<Result<Vec<_>>>()?;
        let mcols = metrics.iter().map(|m| column(t, m)).collect::<Result<Vec<_>>>()?;
        for (line, r) in t.rows.iter().enumerate() {
            let key: Vec<String> = gcols.iter().map(|&c| r[c].clone()).collect();
            let g = *index.entry(key.clone()).or_insert_with(|| {
                groups.push((key, vec![Vec::new(); metrics.len()]));
                groups.len() - 1
            });
            let slot = &mut groups[g].1;
            for (k, &c) in mcols.iter().enumerate() {
                let v: f64 = r[c].parse().map_err(|_| {
                    CliError::Schema(format!(
                        "{} row {}: `{}` in column `{}` is not a number",
                        t.path.display(),
                        line + 2,
                        r[c],
                        metrics[k]
                    ))
                })?;
                slot[k].push(v);
            }
        }
    }

    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header: Vec<&str> = group_by.iter().map(String::as_str).collect();
    header.extend(["metric", "mean", "se", "trials"]);
    let err = |e: csv::Error| CliError::Schema(e.to_string());
    w.write_record(&header).map_err(err)?;
    for (key, columns) in &groups {
        for (m, values) in metrics.iter().zip(columns) {
            let (mean, se) = mean_se(values);
            let mut rec = key.clone();
            rec.extend([m.clone(), mean.to_string(), se.to_string(), values.len().to_string()]);
            w.write_record(&rec).map_err(err)?;
        }
    }
    let bytes = w.into_inner().map_err(|e| CliError::Schema(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

pub(crate) fn summarize_files(inputs: &[PathBuf], group_by: &[String], metrics: &[String]) -> Result<OutputFile> {
    Ok(OutputFile {
        name: "summary.csv".into(),
        bytes: summarize_tables(inputs, group_by, metrics)?.into_bytes(),
    })
}
