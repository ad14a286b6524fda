//! Sample logs: one `re im` pair per line, 17 significant digits, which
//! round-trips every `f64` exactly.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use cvhet_core::{Complex64, HeterodyneSample};

use crate::error::{CliError, Result};

pub fn format_sample(s: &HeterodyneSample) -> String {
    format!("{:.16e} {:.16e}", s.value.re, s.value.im)
}

pub fn write_samples_to<W: Write>(mut w: W, samples: &[HeterodyneSample]) -> std::io::Result<()> {
    for s in samples {
        writeln!(w, "{:.16e} {:.16e}", s.value.re, s.value.im)?;
    }
    w.flush()
}

pub fn write_samples(path: &Path, samples: &[HeterodyneSample]) -> Result<()> {
    let file = File::create(path).map_err(|e| CliError::io(path, e))?;
    write_samples_to(BufWriter::new(file), samples).map_err(|e| CliError::io(path, e))
}

fn parse_line(line: &str) -> std::result::Result<HeterodyneSample, String> {
    let mut fields = line.split_whitespace();
    let mut next = |name| -> std::result::Result<f64, String> {
        let f = fields.next().ok_or_else(|| format!("missing {name} part"))?;
        f.parse::<f64>().map_err(|e| format!("{name} part {f:?}: {e}"))
    };
    let (re, im) = (next("real")?, next("imaginary")?);
    if let Some(extra) = fields.next() {
        return Err(format!("unexpected third field {extra:?}"));
    }
    HeterodyneSample::new(Complex64::new(re, im)).map_err(|e| e.to_string())
}

/// Parses a sample log. Blank lines are skipped.
pub fn read_samples_from<R: BufRead>(r: R, origin: &str) -> Result<Vec<HeterodyneSample>> {
    let mut out = Vec::new();
    for (i, line) in r.lines().enumerate() {
        let line = line.map_err(|e| CliError::io(origin, e))?;
        if line.trim().is_empty() {
            continue;
        }
        out.push(parse_line(&line).map_err(|msg| CliError::Parse {
            path: origin.to_string(),
            line: i + 1,
            msg,
        })?);
    }
    Ok(out)
}

pub fn read_samples(path: &Path) -> Result<Vec<HeterodyneSample>> {
    let file = File::open(path).map_err(|e| CliError::io(path, e))?;
    read_samples_from(BufReader::new(file), &path.display().to_string())
}
