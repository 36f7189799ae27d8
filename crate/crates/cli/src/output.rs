//! Number formatting, CSV assembly and artifact destinations.

use std::path::{Path, PathBuf};

use crate::CliError;

/// Environment variable naming the default output directory.
pub const OUTPUT_DIR_VAR: &str = "ADVCAL_OUTPUT_DIR";

/// Seventeen significant digits, `.` as decimal separator, like C's `%.17g`.
pub fn fmt17(x: f64) -> String {
    if x.is_nan() {
        return String::from("nan");
    }
    if x.is_infinite() {
        return String::from(if x > 0.0 { "inf" } else { "-inf" });
    }
    if x == 0.0 {
        return String::from(if x.is_sign_negative() { "-0" } else { "0" });
    }
    let sci = format!("{:.16e}", x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..17).contains(&exp) {
        let decimals = (16 - exp).max(0) as usize;
        trim(format!("{:.*}", decimals, x))
    } else {
        format!("{}e{}", trim(mantissa.to_string()), exp)
    }
}

fn trim(s: String) -> String {
    if !s.contains('.') {
        return s;
    }
    s.trim_end_matches('0').trim_end_matches('.').to_string()
}

/// Renders a header and rows; ragged rows are padded with empty cells.
pub fn csv_table(header: &[String], rows: &[Vec<String>]) -> Result<String, CliError> {
    let width = rows.iter().map(Vec::len).chain([header.len()]).max().unwrap_or(0);
    let mut w = csv::WriterBuilder::new().from_writer(Vec::new());
    let pad = |r: &[String]| {
        let mut r = r.to_vec();
        r.resize(width, String::new());
        r
    };
    w.write_record(pad(header))?;
    for r in rows {
        w.write_record(pad(r))?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Io(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

/// One rendered output of a command.
#[derive(Debug, Clone, PartialEq)]
pub struct Artifact {
    /// Extra file-name suffix for secondary artifacts, e.g. `.trace`.
    pub suffix: &'static str,
    pub extension: &'static str,
    pub content: String,
}

/// Where artifacts go: an explicit path, the default directory, or stdout.
pub fn destination(command: &str, output: Option<&Path>, extension: &str) -> Option<PathBuf> {
    if let Some(p) = output {
        return Some(p.to_path_buf());
    }
    let dir = std::env::var_os(OUTPUT_DIR_VAR).filter(|d| !d.is_empty())?;
    Some(Path::new(&dir).join(format!("{command}.{extension}")))
}

fn sibling(primary: &Path, suffix: &str, extension: &str) -> PathBuf {
    let stem = primary.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    primary.with_file_name(format!("{stem}{suffix}.{extension}"))
}

/// Writes the primary artifact to `dest` (or stdout) and secondary ones
/// next to it. Secondary artifacts are dropped when writing to stdout.
pub fn emit(artifacts: &[Artifact], dest: Option<&Path>) -> Result<Vec<PathBuf>, CliError> {
    let mut written = Vec::new();
    let Some((primary, rest)) = artifacts.split_first() else {
        return Ok(written);
    };
    match dest {
        None => {
            use std::io::Write;
            let mut out = std::io::stdout().lock();
            out.write_all(primary.content.as_bytes())?;
            out.flush()?;
        }
        Some(path) => {
            if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
                std::fs::create_dir_all(dir)?;
            }
            std::fs::write(path, &primary.content)?;
            written.push(path.to_path_buf());
            for a in rest {
                let p = sibling(path, a.suffix, a.extension);
                std::fs::write(&p, &a.content)?;
                written.push(p);
            }
        }
    }
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seventeen_digits_round_trip() {
        assert_eq!(fmt17(0.35), "0.34999999999999998");
        assert_eq!(fmt17(1.0), "1");
        assert_eq!(fmt17(-2.5), "-2.5");
        assert_eq!(fmt17(1e-7), "9.9999999999999995e-8");
        assert_eq!(fmt17(f64::INFINITY), "inf");
        for x in [0.1, 1.0 / 3.0, 123456.789, -7.25e-9, 6.02e23] {
            assert_eq!(fmt17(x).parse::<f64>().unwrap(), x);
        }
    }

    #[test]
    fn ragged_rows_are_padded() {
        let h = vec![String::from("a"), String::from("b")];
        let t = csv_table(&h, &[vec![String::from("1")], vec![String::from("1"), String::from("2"), String::from("3")]]).unwrap();
        assert_eq!(t, "a,b,\n1,,\n1,2,3\n");
    }
}
