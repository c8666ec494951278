//! CSV tables. Every file starts with the resolved configuration as
//! `#`-prefixed comment lines.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;

use super::config::RunConfig;
use super::run::{LongtimeSample, Rung};
use crate::Result;

fn open(config: &RunConfig, name: &str) -> Result<(PathBuf, BufWriter<File>)> {
    std::fs::create_dir_all(&config.output_dir)?;
    let path = config.output_dir.join(name);
    let mut out = BufWriter::new(File::create(&path)?);
    for line in config.header().lines() {
        writeln!(out, "# {line}")?;
    }
    Ok((path, out))
}

pub fn write_errors(config: &RunConfig, rungs: &[Rung]) -> Result<PathBuf> {
    let (path, mut out) = open(config, "errors.csv")?;
    writeln!(out, "h,cells,steps,time,error_hx,error_hy,error_ez,error_combined,status")?;
    for r in rungs {
        match &r.outcome {
            Ok((rec, _)) => writeln!(
                out,
                "{:.10e},{},{},{:.10e},{:.10e},{:.10e},{:.10e},{:.10e},ok",
                rec.h, rec.cells, rec.steps, rec.time, rec.errors.hx, rec.errors.hy, rec.errors.ez, rec.errors.combined
            )?,
            Err(e) => writeln!(out, "{:.10e},,,,,,,,\"failed: {}\"", r.h, e.replace('"', "'"))?,
        }
    }
    out.flush()?;
    Ok(path)
}

/// One row per `(h, condition)` plus one `max` row per `(h, order)`.
pub fn write_jumps(config: &RunConfig, rungs: &[Rung]) -> Result<PathBuf> {
    let (path, mut out) = open(config, "jumps.csv")?;
    writeln!(out, "h,order,condition,error")?;
    for r in rungs {
        if let Ok((rec, Some(table))) = &r.outcome {
            for (order, name, e) in &table.conditions {
                writeln!(out, "{:.10e},{order},\"{name}\",{e:.10e}", rec.h)?;
            }
            for (order, e) in &table.orders {
                writeln!(out, "{:.10e},{order},max,{e:.10e}", rec.h)?;
            }
        }
    }
    out.flush()?;
    Ok(path)
}

pub fn write_longtime(config: &RunConfig, samples: &[LongtimeSample]) -> Result<PathBuf> {
    let (path, mut out) = open(config, "longtime.csv")?;
    writeln!(out, "step,time,error_hx,error_hy,error_ez,error_combined")?;
    for s in samples {
        writeln!(
            out,
            "{},{:.10e},{:.10e},{:.10e},{:.10e},{:.10e}",
            s.step, s.time, s.errors.hx, s.errors.hy, s.errors.ez, s.errors.combined
        )?;
    }
    out.flush()?;
    Ok(path)
}
