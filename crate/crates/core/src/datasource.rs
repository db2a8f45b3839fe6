//! Manifest-driven acquisition of input CSVs with a local cache.
//!
//! A manifest lists datasets as `[id]` stanzas with a `url` or `path`
//! source, optional column mapping onto the `year,value` contract, and an
//! optional sha256 over the normalized CSV. Fetched entries are
//! normalized and cached as `<cache_dir>/<id>.csv` plus `<id>.meta`;
//! a warm cache with matching checksum never touches the network.
//!
//! Network access goes through the [`Transport`] trait so tests run
//! offline against recorded fixtures. Cache writes are atomic per entry
//! (write to a temp file, then rename).

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

#[cfg(feature = "parallel")]
use rayon::prelude::*;
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::series::{AnnualSeries, SeriesError};

#[derive(Debug, Error)]
pub enum DatasourceError {
    #[error("manifest line {line}: {message}")]
    Manifest { line: usize, message: String },
    #[error("duplicate dataset id {0:?}")]
    DuplicateId(String),
    #[error("dataset {id}: fetch failed from {origin}: {reason}")]
    Fetch {
        id: String,
        origin: String,
        reason: String,
    },
    #[error("dataset {id}: checksum mismatch (expected {expected}, got {actual})")]
    ChecksumMismatch {
        id: String,
        expected: String,
        actual: String,
    },
    #[error("dataset {id}: source has no column named {column:?}")]
    UnmappableColumn { id: String, column: String },
    #[error("dataset {id}: source row {row}: {message}")]
    BadSourceRow {
        id: String,
        row: usize,
        message: String,
    },
    #[error("dataset {id}: {source}")]
    BadSeries { id: String, source: SeriesError },
    #[error("dataset {id}: cache io at {path}: {source}")]
    CacheIo {
        id: String,
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

/// Where an entry's raw bytes come from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Source {
    Url(String),
    Path(PathBuf),
}

impl Source {
    fn describe(&self) -> String {
        match self {
            Source::Url(u) => u.clone(),
            Source::Path(p) => p.display().to_string(),
        }
    }
}

/// One dataset stanza: id, source, column mapping, optional checksum of
/// the normalized CSV.
#[derive(Debug, Clone, PartialEq)]
pub struct ManifestEntry {
    pub id: String,
    pub source: Source,
    pub year_column: String,
    pub value_column: String,
    pub sha256: Option<String>,
}

/// A parsed manifest: entries with unique ids, in file order.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct DatasetManifest {
    pub entries: Vec<ManifestEntry>,
}

impl DatasetManifest {
    /// Parse the plain-text stanza format:
    ///
    /// ```text
    /// # comment
    /// [money]
    /// url = https://example.org/money.csv
    /// year_column = Year
    /// value_column = Broad Money
    /// sha256 = <hex>
    /// ```
    ///
    /// Exactly one of `url`/`path` per stanza; `year_column` and
    /// `value_column` default to `year` and `value`.
    pub fn parse(text: &str) -> Result<Self, DatasourceError> {
        let mut entries: Vec<ManifestEntry> = Vec::new();
        let mut current: Option<StanzaBuilder> = None;

        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            if let Some(id) = line.strip_prefix('[').and_then(|s| s.strip_suffix(']')) {
                if let Some(stanza) = current.take() {
                    entries.push(stanza.finish()?);
                }
                let id = id.trim();
                if id.is_empty()
                    || !id
                        .chars()
                        .all(|c| c.is_ascii_alphanumeric() || c == '-' || c == '_')
                {
                    return Err(DatasourceError::Manifest {
                        line: line_no,
                        message: format!("invalid id {id:?} (use [A-Za-z0-9_-])"),
                    });
                }
                if entries.iter().any(|e| e.id == id) {
                    return Err(DatasourceError::DuplicateId(id.to_string()));
                }
                current = Some(StanzaBuilder::new(id, line_no));
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(DatasourceError::Manifest {
                    line: line_no,
                    message: format!("expected `key = value`, got {line:?}"),
                });
            };
            let Some(stanza) = current.as_mut() else {
                return Err(DatasourceError::Manifest {
                    line: line_no,
                    message: "key outside of a [id] stanza".into(),
                });
            };
            stanza.set(key.trim(), value.trim(), line_no)?;
        }
        if let Some(stanza) = current.take() {
            entries.push(stanza.finish()?);
        }
        Ok(Self { entries })
    }

    /// Read a manifest file, resolving relative `path` sources against the
    /// manifest's own directory.
    pub fn load(path: &Path) -> Result<Self, DatasourceError> {
        let text = fs::read_to_string(path)?;
        let mut manifest = Self::parse(&text)?;
        let base = path.parent().unwrap_or_else(|| Path::new("."));
        for entry in &mut manifest.entries {
            if let Source::Path(p) = &entry.source {
                if p.is_relative() {
                    entry.source = Source::Path(base.join(p));
                }
            }
        }
        Ok(manifest)
    }
}

struct StanzaBuilder {
    id: String,
    line: usize,
    url: Option<String>,
    path: Option<PathBuf>,
    year_column: Option<String>,
    value_column: Option<String>,
    sha256: Option<String>,
}

impl StanzaBuilder {
    fn new(id: &str, line: usize) -> Self {
        Self {
            id: id.to_string(),
            line,
            url: None,
            path: None,
            year_column: None,
            value_column: None,
            sha256: None,
        }
    }

    fn set(&mut self, key: &str, value: &str, line: usize) -> Result<(), DatasourceError> {
        let slot = match key {
            "url" => &mut self.url,
            "path" => {
                if self.path.is_some() {
                    return Err(dup_key(line, key));
                }
                self.path = Some(PathBuf::from(value));
                return Ok(());
            }
            "year_column" => &mut self.year_column,
            "value_column" => &mut self.value_column,
            "sha256" => &mut self.sha256,
            other => {
                return Err(DatasourceError::Manifest {
                    line,
                    message: format!("unknown key {other:?}"),
                })
            }
        };
        if slot.is_some() {
            return Err(dup_key(line, key));
        }
        *slot = Some(value.to_string());
        Ok(())
    }

    fn finish(self) -> Result<ManifestEntry, DatasourceError> {
        let source = match (self.url, self.path) {
            (Some(url), None) => Source::Url(url),
            (None, Some(path)) => Source::Path(path),
            (None, None) => {
                return Err(DatasourceError::Manifest {
                    line: self.line,
                    message: format!("entry {:?} needs a `url` or `path`", self.id),
                })
            }
            (Some(_), Some(_)) => {
                return Err(DatasourceError::Manifest {
                    line: self.line,
                    message: format!("entry {:?} has both `url` and `path`", self.id),
                })
            }
        };
        Ok(ManifestEntry {
            id: self.id,
            source,
            year_column: self.year_column.unwrap_or_else(|| "year".into()),
            value_column: self.value_column.unwrap_or_else(|| "value".into()),
            sha256: self.sha256.map(|s| s.to_ascii_lowercase()),
        })
    }
}

fn dup_key(line: usize, key: &str) -> DatasourceError {
    DatasourceError::Manifest {
        line,
        message: format!("duplicate key {key:?}"),
    }
}

/// Byte-level fetcher for URL sources. Implementations must be callable
/// from multiple threads; entries may be fetched concurrently.
pub trait Transport: Sync {
    fn get(&self, url: &str) -> Result<Vec<u8>, String>;
}

/// Plain HTTP(S) GET via ureq.
#[derive(Debug, Default)]
pub struct HttpTransport;

impl Transport for HttpTransport {
    fn get(&self, url: &str) -> Result<Vec<u8>, String> {
        let mut response = ureq::get(url).call().map_err(|e| e.to_string())?;
        response
            .body_mut()
            .read_to_vec()
            .map_err(|e| e.to_string())
    }
}

/// Materialize every manifest entry through the cache using the default
/// HTTP transport. See [`fetch_with`].
pub fn fetch(
    manifest: &DatasetManifest,
    cache_dir: &Path,
) -> Result<BTreeMap<String, AnnualSeries>, DatasourceError> {
    fetch_with(manifest, cache_dir, &HttpTransport)
}

/// Materialize every manifest entry as a normalized `year,value` CSV under
/// `cache_dir`, returning the parsed series keyed by id.
///
/// A cache file whose checksum matches the manifest (or any cache file,
/// when the manifest carries no checksum) is reused without touching the
/// transport; a mismatching cache file is refetched. Entries are fetched
/// concurrently under the `parallel` feature.
pub fn fetch_with(
    manifest: &DatasetManifest,
    cache_dir: &Path,
    transport: &dyn Transport,
) -> Result<BTreeMap<String, AnnualSeries>, DatasourceError> {
    fs::create_dir_all(cache_dir)?;

    #[cfg(feature = "parallel")]
    let results: Vec<Result<(String, AnnualSeries), DatasourceError>> = manifest
        .entries
        .par_iter()
        .map(|entry| fetch_entry(entry, cache_dir, transport).map(|s| (entry.id.clone(), s)))
        .collect();
    #[cfg(not(feature = "parallel"))]
    let results: Vec<Result<(String, AnnualSeries), DatasourceError>> = manifest
        .entries
        .iter()
        .map(|entry| fetch_entry(entry, cache_dir, transport).map(|s| (entry.id.clone(), s)))
        .collect();

    // Report the first failure in manifest order regardless of scheduling.
    let mut out = BTreeMap::new();
    for result in results {
        let (id, series) = result?;
        out.insert(id, series);
    }
    Ok(out)
}

fn fetch_entry(
    entry: &ManifestEntry,
    cache_dir: &Path,
    transport: &dyn Transport,
) -> Result<AnnualSeries, DatasourceError> {
    let csv_path = cache_dir.join(format!("{}.csv", entry.id));

    if let Ok(cached) = fs::read_to_string(&csv_path) {
        let reusable = match &entry.sha256 {
            Some(expected) => &sha256_hex(cached.as_bytes()) == expected,
            None => true,
        };
        if reusable {
            return AnnualSeries::parse_csv(&entry.id, &cached).map_err(|source| {
                DatasourceError::BadSeries {
                    id: entry.id.clone(),
                    source,
                }
            });
        }
        // Stale or corrupted cache entry: fall through and refetch.
    }

    let raw = match &entry.source {
        Source::Url(url) => transport.get(url).map_err(|reason| DatasourceError::Fetch {
            id: entry.id.clone(),
            origin: url.clone(),
            reason,
        })?,
        Source::Path(path) => fs::read(path).map_err(|e| DatasourceError::Fetch {
            id: entry.id.clone(),
            origin: path.display().to_string(),
            reason: e.to_string(),
        })?,
    };

    let series = normalize(entry, &raw)?;
    let normalized = series.to_csv();
    let actual = sha256_hex(normalized.as_bytes());
    if let Some(expected) = &entry.sha256 {
        if &actual != expected {
            return Err(DatasourceError::ChecksumMismatch {
                id: entry.id.clone(),
                expected: expected.clone(),
                actual,
            });
        }
    }

    write_atomic(&csv_path, normalized.as_bytes()).map_err(|e| DatasourceError::CacheIo {
        id: entry.id.clone(),
        path: csv_path.clone(),
        source: e,
    })?;
    let meta = format!(
        "source = {}\nsha256 = {}\nretrieved_at = {}\n",
        entry.source.describe(),
        actual,
        SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0),
    );
    let meta_path = cache_dir.join(format!("{}.meta", entry.id));
    write_atomic(&meta_path, meta.as_bytes()).map_err(|e| DatasourceError::CacheIo {
        id: entry.id.clone(),
        path: meta_path,
        source: e,
    })?;

    Ok(series)
}

/// Map the source CSV's named columns onto the `year,value` contract and
/// validate the result as a series.
fn normalize(entry: &ManifestEntry, raw: &[u8]) -> Result<AnnualSeries, DatasourceError> {
    let text = String::from_utf8_lossy(raw);
    let mut lines = text.lines();
    let header = lines.next().unwrap_or("");
    let columns: Vec<&str> = header.split(',').map(|c| c.trim().trim_matches('\u{feff}')).collect();

    let year_idx = find_column(&columns, &entry.year_column).ok_or_else(|| {
        DatasourceError::UnmappableColumn {
            id: entry.id.clone(),
            column: entry.year_column.clone(),
        }
    })?;
    let value_idx = find_column(&columns, &entry.value_column).ok_or_else(|| {
        DatasourceError::UnmappableColumn {
            id: entry.id.clone(),
            column: entry.value_column.clone(),
        }
    })?;

    let mut pairs: Vec<(i32, f64)> = Vec::new();
    for (idx, raw_row) in lines.enumerate() {
        let row_no = idx + 2;
        let row = raw_row.trim_end_matches('\r');
        if row.is_empty() {
            continue;
        }
        let fields: Vec<&str> = row.split(',').collect();
        let year_field = fields.get(year_idx).map(|f| f.trim()).unwrap_or("");
        let value_field = fields.get(value_idx).map(|f| f.trim()).unwrap_or("");
        let year: i32 = year_field.parse().map_err(|_| DatasourceError::BadSourceRow {
            id: entry.id.clone(),
            row: row_no,
            message: format!("cannot parse year from {year_field:?}"),
        })?;
        let value: f64 = value_field.parse().map_err(|_| DatasourceError::BadSourceRow {
            id: entry.id.clone(),
            row: row_no,
            message: format!("cannot parse value from {value_field:?}"),
        })?;
        pairs.push((year, value));
    }

    AnnualSeries::from_year_values(&entry.id, &pairs).map_err(|source| DatasourceError::BadSeries {
        id: entry.id.clone(),
        source,
    })
}

fn find_column(columns: &[&str], wanted: &str) -> Option<usize> {
    columns.iter().position(|c| *c == wanted)
}

fn sha256_hex(bytes: &[u8]) -> String {
    let mut hasher = Sha256::new();
    hasher.update(bytes);
    let digest = hasher.finalize();
    let mut out = String::with_capacity(64);
    for b in digest {
        out.push_str(&format!("{b:02x}"));
    }
    out
}

/// Checksum helper exposed for manifest authors and tests.
pub fn checksum(bytes: &[u8]) -> String {
    sha256_hex(bytes)
}

fn write_atomic(path: &Path, bytes: &[u8]) -> std::io::Result<()> {
    let tmp = path.with_extension("tmp");
    {
        let mut file = fs::File::create(&tmp)?;
        file.write_all(bytes)?;
        file.sync_all()?;
    }
    fs::rename(&tmp, path)
}
