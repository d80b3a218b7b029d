//! On-disk cache of pivot samples.
//!
//! Text format, one item per line:
//!
//! ```text
//! specrel-pivot-cache 1
//! nu_n 20
//! n_paths 50000
//! n_steps 10000
//! seed 1234
//! sha256 <hex digest of the draw lines>
//! <draw as 16 hex digits of its IEEE-754 bits>
//! ...
//! ```
//!
//! Draws are stored bit-exactly, so a cache hit reproduces the sample.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};
use specrel_core::pivot::PivotSample;

use crate::error::{CliError, CliResult};
use crate::io::write_text;

const MAGIC: &str = "specrel-pivot-cache 1";

pub fn cache_file(dir: &Path, nu_n: usize, n_paths: usize, n_steps: usize, seed: u64) -> PathBuf {
    dir.join(format!("pivot-nu{nu_n}-p{n_paths}-s{n_steps}-{seed:016x}.txt"))
}

fn digest(body: &str) -> String {
    let d = Sha256::digest(body.as_bytes());
    d.iter().fold(String::with_capacity(64), |mut s, b| {
        let _ = write!(s, "{b:02x}");
        s
    })
}

pub fn encode(sample: &PivotSample) -> String {
    let mut body = String::with_capacity(17 * sample.n_paths());
    for &v in sample.draws() {
        let _ = writeln!(body, "{:016x}", v.to_bits());
    }
    format!(
        "{MAGIC}\nnu_n {}\nn_paths {}\nn_steps {}\nseed {}\nsha256 {}\n{body}",
        sample.nu_n,
        sample.n_paths(),
        sample.n_steps,
        sample.seed,
        digest(&body)
    )
}

/// Parses a cache file, checking the header against the expected key.
pub fn decode(text: &str, nu_n: usize, n_paths: usize, n_steps: usize, seed: u64) -> Result<PivotSample, String> {
    let mut lines = text.split_inclusive('\n');
    let mut next = || lines.next().map(|l| l.trim_end_matches('\n')).ok_or("truncated header");
    if next()? != MAGIC {
        return Err("bad magic line".into());
    }
    let mut field = |name: &str| -> Result<String, String> {
        let line = next()?;
        line.strip_prefix(name)
            .and_then(|r| r.strip_prefix(' '))
            .map(str::to_owned)
            .ok_or_else(|| format!("expected '{name}'"))
    };
    let expect = |name: &str, got: String, want: String| {
        if got == want {
            Ok(())
        } else {
            Err(format!("{name} is {got}, expected {want}"))
        }
    };
    expect("nu_n", field("nu_n")?, nu_n.to_string())?;
    expect("n_paths", field("n_paths")?, n_paths.to_string())?;
    expect("n_steps", field("n_steps")?, n_steps.to_string())?;
    expect("seed", field("seed")?, seed.to_string())?;
    let sum = field("sha256")?;
    let header_len: usize = text.split_inclusive('\n').take(6).map(str::len).sum();
    let body = &text[header_len..];
    if digest(body) != sum {
        return Err("checksum mismatch".into());
    }
    let draws = body
        .lines()
        .map(|l| u64::from_str_radix(l, 16).map(f64::from_bits).map_err(|_| format!("bad draw '{l}'")))
        .collect::<Result<Vec<f64>, String>>()?;
    if draws.len() != n_paths {
        return Err(format!("{} draws, expected {n_paths}", draws.len()));
    }
    PivotSample::from_draws(draws, nu_n, n_steps, seed).map_err(|e| e.to_string())
}

/// Outcome of a cache lookup.
#[derive(Debug)]
pub enum Lookup {
    Hit(PivotSample),
    Miss,
    /// File present but unusable; the reason is reported and the sample
    /// regenerated.
    Corrupt(String),
}

pub fn load(path: &Path, nu_n: usize, n_paths: usize, n_steps: usize, seed: u64) -> Lookup {
    match fs::read_to_string(path) {
        Err(_) => Lookup::Miss,
        Ok(text) => match decode(&text, nu_n, n_paths, n_steps, seed) {
            Ok(s) => Lookup::Hit(s),
            Err(why) => Lookup::Corrupt(why),
        },
    }
}

pub fn store(path: &Path, sample: &PivotSample) -> CliResult<()> {
    write_text(path, &encode(sample)).map_err(|e| CliError::io("write pivot cache", e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> PivotSample {
        PivotSample::from_draws(vec![1.5, -0.25, f64::MIN_POSITIVE, 1e300], 20, 20, 7).unwrap()
    }

    #[test]
    fn round_trip_is_bit_exact() {
        let s = sample();
        let d = decode(&encode(&s), 20, 4, 20, 7).unwrap();
        assert_eq!(d, s);
    }

    #[test]
    fn detects_corruption_and_key_mismatch() {
        let text = encode(&sample());
        assert!(decode(&text, 20, 4, 20, 8).unwrap_err().contains("seed"));
        let flipped = text.replacen("3ff8", "3ff9", 1);
        assert!(decode(&flipped, 20, 4, 20, 7).unwrap_err().contains("checksum"));
        assert!(decode(&text[..text.len() - 5], 20, 4, 20, 7).is_err());
        assert!(decode("garbage", 20, 4, 20, 7).is_err());
    }
}
