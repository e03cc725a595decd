use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use btwist_core::RadiusProfile;
use serde::Serialize;

use crate::CliError;

pub fn load_profile(path: &Path) -> Result<RadiusProfile> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    let profile: RadiusProfile =
        serde_json::from_str(&text).map_err(|e| CliError::ProfileFormat(format!("{}: {e}", path.display())))?;
    profile.validate()?;
    Ok(profile)
}

/// Shortest decimal that parses back to the same `f64`, in exponent form
/// for very small and very large magnitudes.
pub fn num(x: f64) -> String {
    format!("{x:?}")
}

pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

pub fn to_csv(header: &[&str], rows: &[Vec<String>]) -> Result<String> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
    w.write_record(header)?;
    for row in rows {
        w.write_record(row)?;
    }
    Ok(String::from_utf8(w.into_inner().context("flushing CSV")?)?)
}

/// Where artifacts go. Without a directory only the primary artifact is
/// printed to stdout.
pub struct Output {
    dir: Option<PathBuf>,
}

impl Output {
    pub fn new(dir: Option<PathBuf>) -> Result<Self> {
        if let Some(d) = &dir {
            fs::create_dir_all(d).map_err(|e| CliError::Io(format!("{}: {e}", d.display())))?;
        }
        Ok(Output { dir })
    }

    pub fn has_dir(&self) -> bool {
        self.dir.is_some()
    }

    /// Writes `name` into the output directory, if any.
    pub fn file(&self, name: &str, contents: &str) -> Result<()> {
        if let Some(d) = &self.dir {
            let path = d.join(name);
            fs::write(&path, contents).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        }
        Ok(())
    }

    /// Writes `name` and prints it to stdout.
    pub fn primary(&self, name: &str, contents: &str) -> Result<()> {
        self.file(name, contents)?;
        let mut stdout = std::io::stdout().lock();
        stdout.write_all(contents.as_bytes())?;
        stdout.flush()?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numbers_round_trip() {
        for x in [0.1, 1.0 / 3.0, 1e-300, 2.0, -0.0, 12.739886804028268] {
            assert_eq!(num(x).parse::<f64>().unwrap().to_bits(), x.to_bits());
        }
        assert_eq!(num(2.0), "2.0");
        assert_eq!(num(4.440892098500626e-16), "4.440892098500626e-16");
        assert_eq!(num(f64::INFINITY), "inf");
    }

    #[test]
    fn csv_has_header() {
        let s = to_csv(&["a", "b"], &[vec![num(1.5), num(2.0)]]).unwrap();
        assert_eq!(s, "a,b\n1.5,2.0\n");
    }
}
