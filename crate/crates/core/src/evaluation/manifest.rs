//! Labelled corpus manifests: CSV with header `path,speaker_id,vowel,split`.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::vowel::Vowel;

pub const MANIFEST_HEADER: [&str; 4] = ["path", "speaker_id", "vowel", "split"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Split {
    Train,
    Test,
}

impl fmt::Display for Split {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Split::Train => "train",
            Split::Test => "test",
        })
    }
}

impl FromStr for Split {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "train" => Ok(Split::Train),
            "test" => Ok(Split::Test),
            other => Err(Error::Manifest(format!("unknown split {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ManifestEntry {
    /// As written in the manifest; relative paths resolve against the
    /// manifest's directory.
    pub path: PathBuf,
    pub speaker_id: String,
    pub vowel: Vowel,
    pub split: Split,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Manifest {
    pub base_dir: PathBuf,
    pub entries: Vec<ManifestEntry>,
}

impl Manifest {
    pub fn resolve(&self, entry: &ManifestEntry) -> PathBuf {
        if entry.path.is_absolute() {
            entry.path.clone()
        } else {
            self.base_dir.join(&entry.path)
        }
    }

    pub fn split(&self, split: Split) -> impl Iterator<Item = &ManifestEntry> {
        self.entries.iter().filter(move |e| e.split == split)
    }
}

pub fn read_manifest(path: impl AsRef<Path>) -> Result<Manifest> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(file);
    let headers = rdr
        .headers()
        .map_err(|e| Error::Manifest(format!("{}: {e}", path.display())))?
        .clone();
    let col = |name: &str| {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::Manifest(format!("{}: missing column `{name}`", path.display())))
    };
    let [ip, is, iv, isplit] = [
        col("path")?,
        col("speaker_id")?,
        col("vowel")?,
        col("split")?,
    ];

    let mut entries = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let line = i + 2;
        let rec = rec.map_err(|e| Error::Manifest(format!("{}:{line}: {e}", path.display())))?;
        let field = |k: usize| rec.get(k).unwrap_or("");
        let bad = |e: Error| Error::Parse {
            path: path.to_path_buf(),
            line,
            message: e.to_string(),
        };
        let speaker_id = field(is).to_string();
        if speaker_id.is_empty() || speaker_id.chars().any(char::is_whitespace) {
            return Err(bad(Error::invalid(format!(
                "bad speaker id {speaker_id:?}"
            ))));
        }
        if field(ip).is_empty() {
            return Err(bad(Error::invalid("empty path")));
        }
        entries.push(ManifestEntry {
            path: PathBuf::from(field(ip)),
            speaker_id,
            vowel: field(iv).parse().map_err(bad)?,
            split: field(isplit).parse().map_err(bad)?,
        });
    }
    Ok(Manifest {
        base_dir: path.parent().map(Path::to_path_buf).unwrap_or_default(),
        entries,
    })
}

pub fn write_manifest(path: impl AsRef<Path>, entries: &[ManifestEntry]) -> Result<()> {
    let path = path.as_ref();
    let wrap = |e: csv::Error| Error::Manifest(format!("{}: {e}", path.display()));
    let mut w = csv::Writer::from_path(path).map_err(wrap)?;
    w.write_record(MANIFEST_HEADER).map_err(wrap)?;
    for e in entries {
        w.write_record([
            e.path.to_string_lossy().as_ref(),
            e.speaker_id.as_str(),
            e.vowel.as_str(),
            &e.split.to_string(),
        ])
        .map_err(wrap)?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}
