//! Resumable JSON-lines store for the expensive sweeps. A cache file is one
//! manifest line followed by one record per line, sorted by key. Files are
//! replaced atomically, so a killed run leaves the last complete state.

use std::collections::BTreeMap;
use std::fs;
use std::io::{self, BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::anytime::{cutoff_scan, CutoffPolicy, ScanReport, ScanRow};
use crate::machine::{encode_instruction, Alphabet, MachineError, Program};
use crate::numberings::{sweep_record, ComplexityTable, SweepRecord, Universal};

pub const FORMAT_VERSION: u32 = 1;

/// Overrides the default cache directory.
pub const CACHE_DIR_ENV: &str = "HALTREG_CACHE_DIR";

const DEFAULT_DIR: &str = ".haltreg-cache";

/// Records computed between two saves.
const CHUNK: usize = 8192;

#[derive(Debug, Error)]
pub enum CacheError {
    #[error("{path}: {msg}")]
    Io { path: PathBuf, msg: String },
    #[error("{path} line {line}: {msg}")]
    Corrupt { path: PathBuf, line: usize, msg: String },
    #[error("{path}: {field} is {found}, expected {expected}; rerun with --rebuild to discard it")]
    Mismatch { path: PathBuf, field: &'static str, found: String, expected: String },
    #[error("{path}: conflicting records for key {key}")]
    Conflict { path: PathBuf, key: u64 },
    #[error(transparent)]
    Machine(#[from] MachineError),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CacheManifest {
    pub format_version: u32,
    /// SHA-256 of the instruction set and its numbering.
    pub alphabet_hash: String,
    pub kind: String,
    pub budgets: BTreeMap<String, String>,
    pub r_label: Option<String>,
    pub record_count: u64,
}

impl CacheManifest {
    pub fn new(kind: &str, budgets: &[(&str, String)], r_label: Option<&str>) -> CacheManifest {
        CacheManifest {
            format_version: FORMAT_VERSION,
            alphabet_hash: alphabet_hash(),
            kind: kind.to_string(),
            budgets: budgets.iter().map(|(k, v)| (k.to_string(), v.clone())).collect(),
            r_label: r_label.map(str::to_string),
            record_count: 0,
        }
    }

    /// File name derived from everything the records depend on.
    pub fn file_name(&self) -> String {
        let mut name = self.kind.clone();
        if let Some(r) = &self.r_label {
            name.push('-');
            name.push_str(r);
        }
        for (k, v) in &self.budgets {
            name.push_str(&format!("-{k}{v}"));
        }
        let safe: String = name.chars().map(|c| if c.is_ascii_alphanumeric() || c == '-' || c == '_' { c } else { '_' }).collect();
        format!("{safe}.jsonl")
    }
}

/// Hash of the machine's instruction set: a fixed description plus the
/// numeric codes of a block of instructions, so changing either the
/// semantics text or the numbering invalidates old caches.
pub fn alphabet_hash() -> String {
    let mut h = Sha256::new();
    h.update(b"INC r; DEC r saturating; JZ r d; JMP d; relative jumps; halt on fall-off; register 1 in/out\n");
    for ins in Alphabet::new(4, 4).letters() {
        h.update(format!("{ins}={}\n", encode_instruction(&ins)).as_bytes());
    }
    hex::encode(h.finalize())
}

/// `$HALTREG_CACHE_DIR`, or `.haltreg-cache` under the working directory.
pub fn default_dir() -> PathBuf {
    std::env::var_os(CACHE_DIR_ENV).map_or_else(|| PathBuf::from(DEFAULT_DIR), PathBuf::from)
}

pub trait Keyed {
    fn key(&self) -> u64;
}

impl Keyed for SweepRecord {
    fn key(&self) -> u64 {
        self.y
    }
}

impl Keyed for ScanRow {
    fn key(&self) -> u64 {
        self.x
    }
}

pub struct JsonlCache<R> {
    path: PathBuf,
    manifest: CacheManifest,
    records: BTreeMap<u64, R>,
}

impl<R: Keyed + Serialize + DeserializeOwned + PartialEq> JsonlCache<R> {
    /// Loads `dir/<manifest file name>` if present. Any disagreement with
    /// `expected` other than the record count is a mismatch.
    pub fn open(dir: &Path, expected: CacheManifest) -> Result<Self, CacheError> {
        let path = dir.join(expected.file_name());
        let mut cache = JsonlCache { path, manifest: expected, records: BTreeMap::new() };
        let file = match fs::File::open(&cache.path) {
            Ok(f) => f,
            Err(e) if e.kind() == io::ErrorKind::NotFound => return Ok(cache),
            Err(e) => return Err(cache.io(e)),
        };
        let mut lines = BufReader::new(file).lines();
        let corrupt = |line: usize, msg: String| CacheError::Corrupt { path: cache.path.clone(), line, msg };
        let header = lines.next().ok_or_else(|| corrupt(1, "empty file".into()))?.map_err(|e| cache.io(e))?;
        let found: CacheManifest = serde_json::from_str(&header).map_err(|e| corrupt(1, e.to_string()))?;
        cache.check(&found)?;
        for (i, line) in lines.enumerate() {
            let line = line.map_err(|e| cache.io(e))?;
            let rec: R = serde_json::from_str(&line).map_err(|e| corrupt(i + 2, e.to_string()))?;
            cache.records.insert(rec.key(), rec);
        }
        if cache.records.len() as u64 != found.record_count {
            return Err(corrupt(0, format!("manifest promises {} records, found {}", found.record_count, cache.records.len())));
        }
        Ok(cache)
    }

    fn check(&self, found: &CacheManifest) -> Result<(), CacheError> {
        let want = &self.manifest;
        let mismatch = |field, found: String, expected: String| Err(CacheError::Mismatch { path: self.path.clone(), field, found, expected });
        if found.format_version != want.format_version {
            return mismatch("format_version", found.format_version.to_string(), want.format_version.to_string());
        }
        if found.alphabet_hash != want.alphabet_hash {
            return mismatch("alphabet_hash", found.alphabet_hash.clone(), want.alphabet_hash.clone());
        }
        if found.kind != want.kind {
            return mismatch("kind", found.kind.clone(), want.kind.clone());
        }
        if found.budgets != want.budgets {
            return mismatch("budgets", format!("{:?}", found.budgets), format!("{:?}", want.budgets));
        }
        if found.r_label != want.r_label {
            return mismatch("r_label", format!("{:?}", found.r_label), format!("{:?}", want.r_label));
        }
        Ok(())
    }

    fn io(&self, e: io::Error) -> CacheError {
        CacheError::Io { path: self.path.clone(), msg: e.to_string() }
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn get(&self, key: u64) -> Option<&R> {
        self.records.get(&key)
    }

    /// Adds records; a key already present must carry an identical record.
    pub fn merge(&mut self, records: impl IntoIterator<Item = R>) -> Result<(), CacheError> {
        for rec in records {
            let key = rec.key();
            match self.records.get(&key) {
                Some(old) if *old != rec => return Err(CacheError::Conflict { path: self.path.clone(), key }),
                Some(_) => {}
                None => {
                    self.records.insert(key, rec);
                }
            }
        }
        Ok(())
    }

    /// Writes a sibling temp file and renames it over the cache.
    pub fn save(&mut self) -> Result<(), CacheError> {
        self.manifest.record_count = self.records.len() as u64;
        let dir = self.path.parent().filter(|d| !d.as_os_str().is_empty()).unwrap_or(Path::new("."));
        fs::create_dir_all(dir).map_err(|e| self.io(e))?;
        let tmp = self.path.with_extension(format!("jsonl.tmp{}", std::process::id()));
        let write = || -> io::Result<()> {
            let mut out = io::BufWriter::new(fs::File::create(&tmp)?);
            serde_json::to_writer(&mut out, &self.manifest)?;
            out.write_all(b"\n")?;
            for rec in self.records.values() {
                serde_json::to_writer(&mut out, rec)?;
                out.write_all(b"\n")?;
            }
            out.into_inner().map_err(|e| e.into_error())?.sync_all()?;
            fs::rename(&tmp, &self.path)
        };
        write().map_err(|e| {
            let _ = fs::remove_file(&tmp);
            self.io(e)
        })
    }

    /// Deletes the file, for an explicit rebuild.
    pub fn discard(dir: &Path, manifest: &CacheManifest) -> Result<(), CacheError> {
        let path = dir.join(manifest.file_name());
        match fs::remove_file(&path) {
            Err(e) if e.kind() != io::ErrorKind::NotFound => Err(CacheError::Io { path, msg: e.to_string() }),
            _ => Ok(()),
        }
    }
}

/// How much of a cached computation was reused.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub struct CacheStats {
    pub reused: u64,
    pub computed: u64,
}

pub fn sweep_manifest(u: &Universal, step_budget: u64, space_budget: u64) -> CacheManifest {
    CacheManifest::new("sweep", &[("t", step_budget.to_string()), ("s", space_budget.to_string())], Some(u.r().label()))
}

/// The universal sweep behind a complexity table, resuming from and
/// extending the cache in `dir`.
pub fn cached_complexity_table(
    dir: &Path,
    u: &Universal,
    step_budget: u64,
    space_budget: u64,
    k_max: u64,
) -> Result<(ComplexityTable, CacheStats), CacheError> {
    let mut cache = JsonlCache::<SweepRecord>::open(dir, sweep_manifest(u, step_budget, space_budget))?;
    let missing: Vec<u64> = (1..=k_max).filter(|&y| cache.get(y).is_none()).collect();
    let stats = CacheStats { reused: k_max - missing.len() as u64, computed: missing.len() as u64 };
    for chunk in missing.chunks(CHUNK) {
        let recs: Vec<SweepRecord> = chunk.par_iter().map(|&y| sweep_record(u, y, step_budget, space_budget)).collect();
        cache.merge(recs)?;
        cache.save()?;
    }
    let records = (1..=k_max).map(|y| cache.get(y).expect("filled above").clone()).collect();
    Ok((ComplexityTable::from_records(step_budget, space_budget, u.r().label(), records), stats))
}

/// Names an enumerated program set for [`scan_manifest`].
pub fn alphabet_set_label(alphabet: &Alphabet, max_size: usize) -> String {
    format!("m{max_size}r{}o{}", alphabet.registers, alphabet.max_offset)
}

/// Names an explicit program list by a hash of its text.
pub fn list_set_label(programs: &[Program]) -> String {
    let mut h = Sha256::new();
    for p in programs {
        h.update(format!("{p}\n").as_bytes());
    }
    format!("list{}", &hex::encode(h.finalize())[..16])
}

pub fn scan_manifest(set_label: &str, policy: &CutoffPolicy, super_budget: u64) -> CacheManifest {
    CacheManifest::new(
        "scan",
        &[
            ("c", format!("{}_{}", policy.c.numer(), policy.c.denom())),
            ("e", policy.exponent.to_string()),
            ("p", set_label.to_string()),
            ("s", policy.space_budget.to_string()),
            ("super", super_budget.to_string()),
        ],
        None,
    )
}

/// [`cutoff_scan`] with one cached row per input. `set_label` must name
/// `programs` uniquely.
pub fn cached_cutoff_scan(
    dir: &Path,
    programs: &[Program],
    set_label: &str,
    inputs: std::ops::RangeInclusive<u64>,
    policy: &CutoffPolicy,
    super_budget: u64,
) -> Result<(ScanReport, CacheStats), CacheError> {
    let mut stats = CacheStats::default();
    let mut rows = Vec::new();
    if !programs.is_empty() {
        let mut cache = JsonlCache::<ScanRow>::open(dir, scan_manifest(set_label, policy, super_budget))?;
        for x in inputs {
            if let Some(row) = cache.get(x) {
                stats.reused += 1;
                rows.push(row.clone());
                continue;
            }
            let row = cutoff_scan(programs, x..=x, policy, super_budget)?.rows.remove(0);
            cache.merge([row.clone()])?;
            stats.computed += 1;
            rows.push(row);
        }
        if stats.computed > 0 {
            cache.save()?;
        }
    }
    Ok((ScanReport { policy: *policy, super_budget, programs: programs.len(), rows }, stats))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numberings::{complexity_table_with, RSequence};

    #[test]
    fn hash_is_stable_hex() {
        let h = alphabet_hash();
        assert_eq!(h.len(), 64);
        assert_eq!(h, alphabet_hash());
    }

    #[test]
    fn resume_matches_cold_run() {
        let dir = tempfile::tempdir().unwrap();
        let u = Universal::new(RSequence::powers_of_two());
        let (half, s1) = cached_complexity_table(dir.path(), &u, 200, 64, 300).unwrap();
        assert_eq!(s1, CacheStats { reused: 0, computed: 300 });
        let (full, s2) = cached_complexity_table(dir.path(), &u, 200, 64, 700).unwrap();
        assert_eq!(s2, CacheStats { reused: 300, computed: 400 });
        assert_eq!(full, complexity_table_with(&u, 200, 64, 700));
        assert_eq!(half, complexity_table_with(&u, 200, 64, 300));
        let (again, s3) = cached_complexity_table(dir.path(), &u, 200, 64, 700).unwrap();
        assert_eq!((again, s3.computed), (full, 0));
    }

    #[test]
    fn version_mismatch_is_refused() {
        let dir = tempfile::tempdir().unwrap();
        let u = Universal::new(RSequence::powers_of_two());
        cached_complexity_table(dir.path(), &u, 100, 64, 10).unwrap();
        let path = dir.path().join(sweep_manifest(&u, 100, 64).file_name());
        let text = fs::read_to_string(&path).unwrap();
        fs::write(&path, text.replacen("\"format_version\":1", "\"format_version\":0", 1)).unwrap();
        let err = cached_complexity_table(dir.path(), &u, 100, 64, 10).unwrap_err();
        assert!(matches!(err, CacheError::Mismatch { field: "format_version", .. }), "{err}");
        JsonlCache::<SweepRecord>::discard(dir.path(), &sweep_manifest(&u, 100, 64)).unwrap();
        assert!(cached_complexity_table(dir.path(), &u, 100, 64, 10).is_ok());
    }

    #[test]
    fn truncated_file_is_corrupt() {
        let dir = tempfile::tempdir().unwrap();
        let u = Universal::new(RSequence::powers_of_two());
        cached_complexity_table(dir.path(), &u, 100, 64, 10).unwrap();
        let path = dir.path().join(sweep_manifest(&u, 100, 64).file_name());
        let text = fs::read_to_string(&path).unwrap();
        let cut: Vec<&str> = text.lines().take(5).collect();
        fs::write(&path, cut.join("\n")).unwrap();
        assert!(matches!(cached_complexity_table(dir.path(), &u, 100, 64, 10), Err(CacheError::Corrupt { .. })));
    }

    #[test]
    fn scans_resume_row_by_row() {
        let dir = tempfile::tempdir().unwrap();
        let a = Alphabet::new(1, 1);
        let programs = crate::machine::enumerate_programs(&a, 2);
        let label = alphabet_set_label(&a, 2);
        let policy = CutoffPolicy::quadratic(2);
        let (first, _) = cached_cutoff_scan(dir.path(), &programs, &label, 1..=4, &policy, 500).unwrap();
        let (second, stats) = cached_cutoff_scan(dir.path(), &programs, &label, 1..=6, &policy, 500).unwrap();
        assert_eq!(stats, CacheStats { reused: 4, computed: 2 });
        assert_eq!(second.rows[..4], first.rows[..]);
        let cold = cutoff_scan(&programs, 1..=6, &policy, 500).unwrap();
        assert_eq!(second, cold);
        let (empty, _) = cached_cutoff_scan(dir.path(), &[], &list_set_label(&[]), 1..=6, &policy, 500).unwrap();
        assert!(empty.rows.is_empty());
    }

    #[test]
    fn conflicting_records_are_refused() {
        let dir = tempfile::tempdir().unwrap();
        let u = Universal::new(RSequence::powers_of_two());
        let mut c = JsonlCache::<SweepRecord>::open(dir.path(), sweep_manifest(&u, 100, 64)).unwrap();
        let r = sweep_record(&u, 3, 100, 64);
        c.merge([r.clone()]).unwrap();
        c.merge([r.clone()]).unwrap();
        let mut other = r;
        other.code += 1;
        assert!(matches!(c.merge([other]), Err(CacheError::Conflict { key: 3, .. })));
    }
}
