//! On-disk export bundles: a directory holding `field.txt`, `points.csv`,
//! `meta.txt`, and optionally `certificate.txt`. Everything is
//! line-oriented `key: value` text or CSV; integers in decimal, polynomial
//! coefficients constant-term-first. Re-importing rebuilds the candidate
//! from its parameters and cross-checks the stored field and point list,
//! so a bundle round-trips bit-identically or fails loudly.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use thiserror::Error;

use crate::construct::{build_candidate, ConstructError, ConstructionParams, OrbitChoice, OvoidCandidate};
use crate::verify::Certificate;

#[derive(Debug, Error)]
pub enum BundleError {
    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed {file}: {reason}")]
    Malformed { file: String, reason: String },
    #[error("bundle is inconsistent: {0}")]
    Inconsistent(String),
    #[error("construct error: {0}")]
    Construct(#[from] ConstructError),
}

fn io_err(path: &Path, source: std::io::Error) -> BundleError {
    BundleError::Io { path: path.display().to_string(), source }
}

pub fn write_bundle(dir: &Path, c: &OvoidCandidate, cert: Option<&Certificate>) -> Result<(), BundleError> {
    fs::create_dir_all(dir).map_err(|e| io_err(dir, e))?;

    let fp = c.space.field().params();
    let mut field = String::new();
    let _ = writeln!(field, "p: {}", fp.p);
    let _ = writeln!(field, "s: {}", fp.s);
    let coeffs: Vec<String> = fp.modulus.iter().map(|c| c.to_string()).collect();
    let _ = writeln!(field, "modulus: {}", coeffs.join(" "));
    let _ = writeln!(field, "generator: {}", fp.generator);
    let path = dir.join("field.txt");
    fs::write(&path, field).map_err(|e| io_err(&path, e))?;

    let mut points = String::from("rep\n");
    for &r in c.points.reps() {
        let _ = writeln!(points, "{r}");
    }
    let path = dir.join("points.csv");
    fs::write(&path, points).map_err(|e| io_err(&path, e))?;

    let mut meta = String::new();
    let _ = writeln!(meta, "p: {}", c.params.p);
    let _ = writeln!(meta, "p0: {}", c.params.p0);
    let _ = writeln!(meta, "l: {}", c.params.l);
    let _ = writeln!(meta, "t: {}", c.params.t);
    let _ = writeln!(meta, "b: {}", c.params.b);
    let orbits = match &c.params.orbit_choice {
        OrbitChoice::FirstB => "first".to_string(),
        OrbitChoice::Explicit(idx) => idx.iter().map(|i| i.to_string()).collect::<Vec<_>>().join(","),
    };
    let _ = writeln!(meta, "orbits: {orbits}");
    let _ = writeln!(meta, "n: {}", c.n);
    let _ = writeln!(meta, "d0: {}", c.d0);
    let j: Vec<String> = c.j.members.iter().map(|i| i.to_string()).collect();
    let _ = writeln!(meta, "j: {}", j.join(" "));
    let _ = writeln!(meta, "m: {}", c.m_claimed);
    let _ = writeln!(meta, "d_size: {}", c.d_size);
    let _ = writeln!(meta, "point_count: {}", c.points.len());
    let path = dir.join("meta.txt");
    fs::write(&path, meta).map_err(|e| io_err(&path, e))?;

    if let Some(cert) = cert {
        write_certificate(&dir.join("certificate.txt"), cert)?;
    }
    Ok(())
}

pub fn write_certificate(path: &Path, cert: &Certificate) -> Result<(), BundleError> {
    fs::write(path, render_certificate(cert)).map_err(|e| io_err(path, e))
}

pub fn render_certificate(cert: &Certificate) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "p: {}", cert.p);
    let _ = writeln!(s, "e: {}", cert.e);
    let _ = writeln!(s, "r: {}", cert.r);
    let _ = writeln!(s, "n: {}", cert.n);
    let _ = writeln!(s, "b: {}", cert.b);
    let j: Vec<String> = cert.j.iter().map(|i| i.to_string()).collect();
    let _ = writeln!(s, "j: {}", j.join(" "));
    let _ = writeln!(s, "m: {}", cert.m_claimed);
    let _ = writeln!(s, "point_count: {}", cert.point_count);
    let _ = writeln!(s, "coverage: {}", cert.coverage_label());
    let _ = writeln!(s, "overall: {}", if cert.overall { "pass" } else { "fail" });
    let _ = writeln!(s, "checks:");
    for c in &cert.checks {
        let _ = writeln!(s, "  {}: {}", c.name, if c.passed { "pass" } else { "fail" });
        if let Some(w) = &c.witness {
            let _ = writeln!(s, "    note: {w}");
        }
        let _ = writeln!(s, "    millis: {}", c.millis);
    }
    s
}

fn parse_kv(path: &Path) -> Result<BTreeMap<String, String>, BundleError> {
    let text = fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    let file = path.file_name().unwrap_or_default().to_string_lossy().to_string();
    let mut map = BTreeMap::new();
    for line in text.lines() {
        if line.trim().is_empty() || line.starts_with(' ') {
            continue;
        }
        let (k, v) = line
            .split_once(':')
            .ok_or_else(|| BundleError::Malformed { file: file.clone(), reason: format!("no key in {line:?}") })?;
        map.insert(k.trim().to_string(), v.trim().to_string());
    }
    Ok(map)
}

fn get<'a>(map: &'a BTreeMap<String, String>, file: &str, key: &str) -> Result<&'a str, BundleError> {
    map.get(key)
        .map(|s| s.as_str())
        .ok_or_else(|| BundleError::Malformed { file: file.into(), reason: format!("missing key {key}") })
}

fn parse_num<T: std::str::FromStr>(file: &str, key: &str, v: &str) -> Result<T, BundleError> {
    v.parse()
        .map_err(|_| BundleError::Malformed { file: file.into(), reason: format!("bad value for {key}: {v:?}") })
}

/// Rebuild the candidate from the stored parameters and cross-check the
/// stored field description and point list against the deterministic
/// reconstruction.
pub fn read_bundle(dir: &Path) -> Result<OvoidCandidate, BundleError> {
    let meta = parse_kv(&dir.join("meta.txt"))?;
    let f = "meta.txt";
    let p: u64 = parse_num(f, "p", get(&meta, f, "p")?)?;
    let p0: u32 = parse_num(f, "p0", get(&meta, f, "p0")?)?;
    let l: u32 = parse_num(f, "l", get(&meta, f, "l")?)?;
    let t: u32 = parse_num(f, "t", get(&meta, f, "t")?)?;
    let b: u64 = parse_num(f, "b", get(&meta, f, "b")?)?;
    let orbit_choice = match get(&meta, f, "orbits")? {
        "first" => OrbitChoice::FirstB,
        list => OrbitChoice::Explicit(
            list.split(',')
                .map(|s| parse_num(f, "orbits", s.trim()))
                .collect::<Result<Vec<usize>, _>>()?,
        ),
    };
    let c = build_candidate(ConstructionParams { p, p0, l, t, b, orbit_choice })?;

    // stored field must match the deterministic rebuild bit for bit
    let field = parse_kv(&dir.join("field.txt"))?;
    let fp = c.space.field().params();
    let f = "field.txt";
    if parse_num::<u64>(f, "p", get(&field, f, "p")?)? != fp.p
        || parse_num::<u32>(f, "s", get(&field, f, "s")?)? != fp.s
    {
        return Err(BundleError::Inconsistent("field p/s do not match the metadata parameters".into()));
    }
    let stored_mod: Vec<u32> = get(&field, f, "modulus")?
        .split_whitespace()
        .map(|s| parse_num(f, "modulus", s))
        .collect::<Result<_, _>>()?;
    if stored_mod != fp.modulus {
        return Err(BundleError::Inconsistent(format!(
            "stored modulus {stored_mod:?} differs from the deterministic choice {:?}",
            fp.modulus
        )));
    }
    if parse_num::<u64>(f, "generator", get(&field, f, "generator")?)? != fp.generator {
        return Err(BundleError::Inconsistent("stored generator differs from the deterministic choice".into()));
    }

    let path = dir.join("points.csv");
    let text = fs::read_to_string(&path).map_err(|e| io_err(&path, e))?;
    let mut lines = text.lines();
    if lines.next() != Some("rep") {
        return Err(BundleError::Malformed { file: "points.csv".into(), reason: "missing header".into() });
    }
    let stored: Vec<u32> = lines
        .map(|s| parse_num("points.csv", "rep", s.trim()))
        .collect::<Result<_, _>>()?;
    if stored != c.points.reps() {
        return Err(BundleError::Inconsistent("stored point list differs from the reconstruction".into()));
    }

    let stored_m: u64 = parse_num("meta.txt", "m", get(&meta, "meta.txt", "m")?)?;
    if stored_m != c.m_claimed {
        return Err(BundleError::Inconsistent(format!(
            "stored m = {stored_m} differs from reconstructed {}",
            c.m_claimed
        )));
    }
    Ok(c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::construct::ConstructionParams;

    #[test]
    fn round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let c = build_candidate(ConstructionParams::first_b(3, 3, 3, 2, 1)).unwrap();
        write_bundle(dir.path(), &c, None).unwrap();
        let back = read_bundle(dir.path()).unwrap();
        assert_eq!(back.points.reps(), c.points.reps());
        assert_eq!(back.m_claimed, 13);
        // byte-identical re-export
        let first = fs::read(dir.path().join("points.csv")).unwrap();
        let dir2 = tempfile::tempdir().unwrap();
        write_bundle(dir2.path(), &back, None).unwrap();
        assert_eq!(first, fs::read(dir2.path().join("points.csv")).unwrap());
        assert_eq!(
            fs::read(dir.path().join("field.txt")).unwrap(),
            fs::read(dir2.path().join("field.txt")).unwrap()
        );
    }

    #[test]
    fn tamper_detected() {
        let dir = tempfile::tempdir().unwrap();
        let c = build_candidate(ConstructionParams::first_b(3, 3, 3, 2, 1)).unwrap();
        write_bundle(dir.path(), &c, None).unwrap();
        let path = dir.path().join("points.csv");
        let mut text = fs::read_to_string(&path).unwrap();
        text.push_str("7\n");
        fs::write(&path, text).unwrap();
        assert!(matches!(read_bundle(dir.path()), Err(BundleError::Inconsistent(_))));
    }
}
