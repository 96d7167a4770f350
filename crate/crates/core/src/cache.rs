//! Persistent store of Kazhdan–Lusztig columns.
//!
//! One append-only JSON-lines file per (datum, convention). Every line
//! carries a sha256 digest of its payload; lines that fail to parse or to
//! verify are dropped on open and the file is rewritten without them, so
//! the affected columns are simply recomputed.

use std::collections::HashMap;
use std::fs::{self, File, OpenOptions};
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::laurent::LaurentPoly;
use crate::weyl::CONVENTION_ID;

/// Column `w ↦ [(y, p_{y,w})]` keyed by canonical reduced words.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct KlRecord {
    pub w: String,
    pub entries: Vec<(String, LaurentPoly)>,
}

#[derive(Serialize, Deserialize)]
struct Line {
    #[serde(flatten)]
    record: KlRecord,
    sha256: String,
}

impl KlRecord {
    pub fn new<I: IntoIterator<Item = (String, LaurentPoly)>>(w: &str, entries: I) -> Self {
        KlRecord { w: w.to_string(), entries: entries.into_iter().collect() }
    }

    fn digest(&self) -> String {
        let payload = serde_json::to_vec(self).expect("records serialise");
        hex::encode(Sha256::digest(&payload))
    }
}

#[derive(Debug)]
pub struct KlCache {
    path: PathBuf,
    records: HashMap<String, KlRecord>,
    dropped: usize,
}

impl KlCache {
    /// Opens (creating if needed) the cache for `datum` under `root`.
    pub fn open(root: &Path, datum: &str) -> Result<Self> {
        let dir = root.join(datum.replace(':', "-")).join(CONVENTION_ID);
        fs::create_dir_all(&dir)?;
        let path = dir.join("records.jsonl");
        let mut records = HashMap::new();
        let mut dropped = 0;
        if path.exists() {
            let reader = BufReader::new(File::open(&path)?);
            for line in reader.lines() {
                let line = line?;
                if line.trim().is_empty() {
                    continue;
                }
                match serde_json::from_str::<Line>(&line) {
                    Ok(l) if l.record.digest() == l.sha256 => {
                        records.insert(l.record.w.clone(), l.record);
                    }
                    _ => dropped += 1,
                }
            }
        }
        let cache = KlCache { path, records, dropped };
        if dropped > 0 {
            cache.rewrite()?;
        }
        Ok(cache)
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

    /// Number of corrupt lines discarded when the cache was opened.
    pub fn dropped(&self) -> usize {
        self.dropped
    }

    pub fn get(&self, w: &str) -> Option<&KlRecord> {
        self.records.get(w)
    }

    pub fn append(&mut self, records: &[KlRecord]) -> Result<()> {
        if records.is_empty() {
            return Ok(());
        }
        let file = OpenOptions::new().create(true).append(true).open(&self.path)?;
        let mut out = BufWriter::new(file);
        for r in records {
            write_line(&mut out, r)?;
            self.records.insert(r.w.clone(), r.clone());
        }
        out.flush()?;
        Ok(())
    }

    fn rewrite(&self) -> Result<()> {
        let tmp = self.path.with_extension("jsonl.tmp");
        {
            let mut out = BufWriter::new(File::create(&tmp)?);
            let mut keys: Vec<&String> = self.records.keys().collect();
            keys.sort();
            for k in keys {
                write_line(&mut out, &self.records[k])?;
            }
            out.flush()?;
        }
        fs::rename(&tmp, &self.path).map_err(|e| Error::Cache(format!("{}: {e}", self.path.display())))
    }
}

fn write_line<W: Write>(out: &mut W, r: &KlRecord) -> Result<()> {
    let line = Line { record: r.clone(), sha256: r.digest() };
    serde_json::to_writer(&mut *out, &line)?;
    out.write_all(b"\n")?;
    Ok(())
}
