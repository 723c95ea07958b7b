//! JSON-Lines cache of enumerated autocorrelation classes.
//!
//! Line 1 is a header `{"format","version","group","total","distinct"}`;
//! each further line is `{"group","gamma","v"}` with `v` as `"p/q"` strings.

use std::fs;
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::autocorr::{enumerate_classes, AutocorrClass, AutocorrVector, ClassEnumeration, SubsetGamma};
use crate::error::{Error, Result};
use crate::presentation::GroupSpec;
use crate::rational::{self, Rational};

pub const CACHE_FORMAT: &str = "torsion-classes";
pub const CACHE_VERSION: u32 = 1;

#[derive(Debug, Serialize, Deserialize)]
struct Header {
    format: String,
    version: u32,
    group: String,
    total: u64,
    distinct: usize,
}

#[derive(Debug, Serialize, Deserialize)]
struct Record {
    group: String,
    gamma: Vec<usize>,
    #[serde(with = "rational::serde_str::vec")]
    v: Vec<Rational>,
}

/// File name for the classes of `spec` inside a cache directory.
pub fn cache_file_name(spec: &GroupSpec) -> String {
    let mut name = String::from("classes-");
    for c in spec.to_string().chars() {
        match c {
            '^' => name.push('e'),
            ',' => name.push('-'),
            ':' => name.push('_'),
            '@' => name.push_str("at"),
            c => name.push(c),
        }
    }
    name.push_str(".jsonl");
    name
}

pub fn cache_path(dir: &Path, spec: &GroupSpec) -> PathBuf {
    dir.join(cache_file_name(spec))
}

/// Serialized cache contents; identical inputs give identical bytes.
pub fn render_classes(spec: &GroupSpec, classes: &ClassEnumeration) -> Result<String> {
    let group = spec.to_string();
    let mut out = serde_json::to_string(&Header {
        format: CACHE_FORMAT.into(),
        version: CACHE_VERSION,
        group: group.clone(),
        total: classes.total,
        distinct: classes.distinct(),
    })?;
    out.push('\n');
    for c in &classes.classes {
        out.push_str(&serde_json::to_string(&Record {
            group: group.clone(),
            gamma: c.representative.indices(),
            v: c.vector.entries().to_vec(),
        })?);
        out.push('\n');
    }
    Ok(out)
}

pub fn write_classes(path: &Path, spec: &GroupSpec, classes: &ClassEnumeration) -> Result<()> {
    let text = render_classes(spec, classes)?;
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent)?;
    }
    let tmp = path.with_extension("jsonl.tmp");
    {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(text.as_bytes())?;
        f.sync_all()?;
    }
    fs::rename(&tmp, path)?;
    Ok(())
}

/// Reads a cache for `spec`. Returns `None` when the file is missing or
/// was written by another format version or for another group.
pub fn read_classes(path: &Path, spec: &GroupSpec) -> Result<Option<ClassEnumeration>> {
    let file = match fs::File::open(path) {
        Ok(f) => f,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(None),
        Err(e) => return Err(e.into()),
    };
    let mut lines = BufReader::new(file).lines();
    let header_line = match lines.next() {
        Some(l) => l?,
        None => return Ok(None),
    };
    let header: Header = match serde_json::from_str(&header_line) {
        Ok(h) => h,
        Err(_) => return Ok(None),
    };
    let group_name = spec.to_string();
    if header.format != CACHE_FORMAT || header.version != CACHE_VERSION || header.group != group_name {
        return Ok(None);
    }
    let group = spec.group();
    let mut classes = Vec::with_capacity(header.distinct);
    for (i, line) in lines.enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let bad = |msg: String| Error::Cache(format!("{}: record {}: {msg}", path.display(), i + 1));
        let rec: Record = serde_json::from_str(&line).map_err(|e| bad(e.to_string()))?;
        if rec.group != group_name {
            return Err(bad(format!("group {:?}", rec.group)));
        }
        let representative = SubsetGamma::from_indices(group, &rec.gamma).map_err(|e| bad(e.to_string()))?;
        let vector = AutocorrVector::from_entries(group, rec.v).map_err(|e| bad(e.to_string()))?;
        if representative.autocorr_vector() != vector {
            return Err(bad("vector does not match its representative".into()));
        }
        classes.push(AutocorrClass { representative, vector });
    }
    if classes.len() != header.distinct {
        return Err(Error::Cache(format!(
            "{}: header says {} classes, found {}",
            path.display(),
            header.distinct,
            classes.len()
        )));
    }
    Ok(Some(ClassEnumeration {
        group: group.clone(),
        total: header.total,
        classes,
    }))
}

/// Classes for `spec`, read from `dir` when a current cache exists and
/// enumerated (and written back) otherwise.
pub fn load_or_enumerate(dir: &Path, spec: &GroupSpec) -> Result<ClassEnumeration> {
    let path = cache_path(dir, spec);
    if let Some(classes) = read_classes(&path, spec)? {
        return Ok(classes);
    }
    let classes = enumerate_classes(spec.group())?;
    write_classes(&path, spec, &classes)?;
    Ok(classes)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_and_idempotent() {
        let dir = tempfile::tempdir().unwrap();
        let spec: GroupSpec = "2^2".parse().unwrap();
        let first = load_or_enumerate(dir.path(), &spec).unwrap();
        let path = cache_path(dir.path(), &spec);
        let bytes = fs::read(&path).unwrap();
        let second = load_or_enumerate(dir.path(), &spec).unwrap();
        assert_eq!(first.distinct(), second.distinct());
        assert_eq!(first.total, second.total);
        write_classes(&path, &spec, &second).unwrap();
        assert_eq!(fs::read(&path).unwrap(), bytes);
        let header: serde_json::Value =
            serde_json::from_str(std::str::from_utf8(&bytes).unwrap().lines().next().unwrap()).unwrap();
        assert_eq!(header["total"], 15);
        assert_eq!(header["distinct"], 6);
        assert_eq!(header["version"], CACHE_VERSION);
    }

    #[test]
    fn stale_version_regenerated() {
        let dir = tempfile::tempdir().unwrap();
        let spec: GroupSpec = "2".parse().unwrap();
        let path = cache_path(dir.path(), &spec);
        fs::write(
            &path,
            "{\"format\":\"torsion-classes\",\"version\":0,\"group\":\"2\",\"total\":3,\"distinct\":2}\n",
        )
        .unwrap();
        assert!(read_classes(&path, &spec).unwrap().is_none());
        let classes = load_or_enumerate(dir.path(), &spec).unwrap();
        assert_eq!(classes.distinct(), 2);
        assert!(read_classes(&path, &spec).unwrap().is_some());
    }

    #[test]
    fn corrupt_record_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let spec: GroupSpec = "2".parse().unwrap();
        let path = cache_path(dir.path(), &spec);
        fs::write(
            &path,
            "{\"format\":\"torsion-classes\",\"version\":1,\"group\":\"2\",\"total\":3,\"distinct\":1}\n\
             {\"group\":\"2\",\"gamma\":[0],\"v\":[\"1/1\",\"1/1\"]}\n",
        )
        .unwrap();
        assert!(read_classes(&path, &spec).is_err());
    }

    #[test]
    fn file_names_are_distinct() {
        let names: Vec<String> = ["2^3", "2,3", "prufer:2@3", "trivial"]
            .iter()
            .map(|s| cache_file_name(&s.parse().unwrap()))
            .collect();
        assert_eq!(names[0], "classes-2e3.jsonl");
        let mut sorted = names.clone();
        sorted.sort();
        sorted.dedup();
        assert_eq!(sorted.len(), names.len());
    }
}
