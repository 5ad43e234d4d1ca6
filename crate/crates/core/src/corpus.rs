//! Corpus manifests and feature tables.
//!
//! Manifest: CSV with header `path,label,seed`; `seed` may be empty. Paths
//! are resolved against the manifest's directory. Feature table: header
//! `path,label,<column>...`, one row per image, values written as shortest
//! round-trip decimals. Both use LF line endings.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::features::FeatureVector;
use crate::image::GrayImage;
use crate::numfmt::shortest;
use crate::pgm;

pub const MANIFEST_HEADER: [&str; 3] = ["path", "label", "seed"];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ManifestEntry {
    pub path: String,
    pub label: String,
    pub seed: Option<u64>,
}

fn csv_error(e: csv::Error) -> Error {
    Error::Format(format!("csv: {e}"))
}

fn reader(text: &str) -> csv::Reader<&[u8]> {
    csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(false)
        .from_reader(text.as_bytes())
}

fn writer() -> csv::Writer<Vec<u8>> {
    csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new())
}

pub fn parse_manifest(text: &str) -> Result<Vec<ManifestEntry>> {
    let mut rdr = reader(text);
    let header = rdr.headers().map_err(csv_error)?;
    if header.iter().ne(MANIFEST_HEADER) {
        return Err(Error::Format(format!(
            "manifest header must be {}, got {}",
            MANIFEST_HEADER.join(","),
            header.iter().collect::<Vec<_>>().join(",")
        )));
    }
    rdr.records()
        .map(|rec| {
            let rec = rec.map_err(csv_error)?;
            let seed = match rec[2].trim() {
                "" => None,
                s => Some(
                    s.parse()
                        .map_err(|_| Error::Format(format!("bad seed {s:?} for {}", &rec[0])))?,
                ),
            };
            if rec[0].is_empty() || rec[1].is_empty() {
                return Err(Error::Format("manifest row with empty path or label".into()));
            }
            Ok(ManifestEntry {
                path: rec[0].to_string(),
                label: rec[1].to_string(),
                seed,
            })
        })
        .collect()
}

pub fn format_manifest(entries: &[ManifestEntry]) -> String {
    let mut w = writer();
    w.write_record(MANIFEST_HEADER).expect("in-memory write");
    for e in entries {
        let seed = e.seed.map(|s| s.to_string()).unwrap_or_default();
        w.write_record([e.path.as_str(), e.label.as_str(), seed.as_str()])
            .expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 input")
}

pub fn read_manifest(path: &Path) -> Result<Vec<ManifestEntry>> {
    parse_manifest(&std::fs::read_to_string(path)?)
}

pub fn write_manifest(path: &Path, entries: &[ManifestEntry]) -> Result<()> {
    std::fs::write(path, format_manifest(entries))?;
    Ok(())
}

/// Path of an entry relative to the manifest that lists it.
pub fn resolve(manifest_path: &Path, entry: &ManifestEntry) -> PathBuf {
    let p = Path::new(&entry.path);
    if p.is_absolute() {
        p.to_path_buf()
    } else {
        manifest_path.parent().unwrap_or(Path::new("")).join(p)
    }
}

/// Loads a PGM into a validated analysis image.
pub fn load_image(path: &Path) -> Result<GrayImage> {
    let data = std::fs::read(path).map_err(|e| match e.kind() {
        std::io::ErrorKind::NotFound => Error::MissingImage(path.to_path_buf()),
        _ => Error::Io(e),
    })?;
    let img = GrayImage::from_pgm(&pgm::decode(&data)?)?;
    img.check_analysis_size()?;
    Ok(img)
}

pub fn load_manifest_images(manifest_path: &Path, entries: &[ManifestEntry]) -> Result<Vec<GrayImage>> {
    use rayon::prelude::*;
    entries
        .par_iter()
        .map(|e| load_image(&resolve(manifest_path, e)))
        .collect()
}

/// Maps two class names onto `-1` / `+1` in lexicographic order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabelMap {
    pub negative: String,
    pub positive: String,
}

impl LabelMap {
    pub fn from_labels<'a>(labels: impl IntoIterator<Item = &'a str>) -> Result<Self> {
        let distinct: BTreeSet<&str> = labels.into_iter().collect();
        let mut it = distinct.iter();
        match (it.next(), it.next(), it.next()) {
            (None, ..) => Err(Error::Empty("no labels")),
            (Some(_), None, _) => Err(Error::SingleClass),
            (Some(a), Some(b), None) => Ok(Self {
                negative: a.to_string(),
                positive: b.to_string(),
            }),
            _ => Err(Error::InvalidArgument(format!(
                "two-class data expected, found {} labels",
                distinct.len()
            ))),
        }
    }

    pub fn from_pair(pair: &[String; 2]) -> Self {
        Self {
            negative: pair[0].clone(),
            positive: pair[1].clone(),
        }
    }

    pub fn encode(&self, label: &str) -> Result<i8> {
        if label == self.negative {
            Ok(-1)
        } else if label == self.positive {
            Ok(1)
        } else {
            Err(Error::InvalidArgument(format!("unknown label {label:?}")))
        }
    }

    pub fn decode(&self, y: i8) -> &str {
        if y < 0 {
            &self.negative
        } else {
            &self.positive
        }
    }

    pub fn pair(&self) -> [String; 2] {
        [self.negative.clone(), self.positive.clone()]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FeatureRow {
    pub path: String,
    pub label: String,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FeatureTable {
    pub columns: Vec<String>,
    pub rows: Vec<FeatureRow>,
}

impl FeatureTable {
    pub fn from_vectors(columns: Vec<String>, entries: &[ManifestEntry], vectors: &[FeatureVector]) -> Self {
        let rows = entries
            .iter()
            .zip(vectors)
            .map(|(e, v)| FeatureRow {
                path: e.path.clone(),
                label: e.label.clone(),
                values: v.values.clone(),
            })
            .collect();
        Self { columns, rows }
    }

    pub fn label_map(&self) -> Result<LabelMap> {
        LabelMap::from_labels(self.rows.iter().map(|r| r.label.as_str()))
    }

    /// Feature values and `-1`/`+1` labels under `map`.
    pub fn dataset(&self, map: &LabelMap) -> Result<(Vec<Vec<f64>>, Vec<i8>)> {
        let labels = self
            .rows
            .iter()
            .map(|r| map.encode(&r.label))
            .collect::<Result<Vec<_>>>()?;
        Ok((self.rows.iter().map(|r| r.values.clone()).collect(), labels))
    }

    pub fn to_csv(&self) -> String {
        let mut w = writer();
        let mut header = vec!["path".to_string(), "label".to_string()];
        header.extend(self.columns.iter().cloned());
        w.write_record(&header).expect("in-memory write");
        for row in &self.rows {
            let mut rec = vec![row.path.clone(), row.label.clone()];
            rec.extend(row.values.iter().map(|&v| shortest(v)));
            w.write_record(&rec).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 input")
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut rdr = reader(text);
        let header = rdr.headers().map_err(csv_error)?.clone();
        if header.len() < 3 || &header[0] != "path" || &header[1] != "label" {
            return Err(Error::Format(
                "feature table header must start with path,label and name at least one column".into(),
            ));
        }
        let columns: Vec<String> = header.iter().skip(2).map(str::to_string).collect();
        let rows = rdr
            .records()
            .map(|rec| {
                let rec = rec.map_err(csv_error)?;
                let values = rec
                    .iter()
                    .skip(2)
                    .map(|s| match s.parse::<f64>() {
                        Ok(v) if v.is_finite() => Ok(v),
                        _ => Err(Error::Format(format!("bad feature value {s:?} for {}", &rec[0]))),
                    })
                    .collect::<Result<Vec<_>>>()?;
                Ok(FeatureRow {
                    path: rec[0].to_string(),
                    label: rec[1].to_string(),
                    values,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { columns, rows })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn manifest_roundtrip() {
        let entries = vec![
            ManifestEntry {
                path: "a.pgm".into(),
                label: "x".into(),
                seed: Some(7),
            },
            ManifestEntry {
                path: "dir/b, c.pgm".into(),
                label: "y".into(),
                seed: None,
            },
        ];
        let text = format_manifest(&entries);
        assert!(text.starts_with("path,label,seed\na.pgm,x,7\n"));
        assert!(!text.contains('\r'));
        assert_eq!(parse_manifest(&text).unwrap(), entries);
    }

    #[test]
    fn manifest_errors() {
        assert!(parse_manifest("file,label,seed\na,b,1\n").is_err());
        assert!(parse_manifest("path,label,seed\na,b\n").is_err());
        assert!(parse_manifest("path,label,seed\na,b,-3\n").is_err());
        assert!(parse_manifest("path,label,seed\n,b,1\n").is_err());
        assert_eq!(parse_manifest("path,label,seed\n").unwrap(), vec![]);
    }

    #[test]
    fn resolve_relative_to_manifest() {
        let e = ManifestEntry {
            path: "img.pgm".into(),
            label: "a".into(),
            seed: None,
        };
        assert_eq!(resolve(Path::new("/data/set/manifest.csv"), &e), Path::new("/data/set/img.pgm"));
    }

    #[test]
    fn label_map_rules() {
        let map = LabelMap::from_labels(["dotted", "continuous", "dotted"]).unwrap();
        assert_eq!(map.encode("continuous").unwrap(), -1);
        assert_eq!(map.encode("dotted").unwrap(), 1);
        assert_eq!(map.decode(1), "dotted");
        assert!(map.encode("other").is_err());
        assert!(matches!(LabelMap::from_labels(["a", "a"]), Err(Error::SingleClass)));
        assert!(LabelMap::from_labels(["a", "b", "c"]).is_err());
    }

    #[test]
    fn feature_table_roundtrip() {
        let table = FeatureTable {
            columns: vec!["t1_mean".into(), "t1_var".into()],
            rows: vec![FeatureRow {
                path: "a.pgm".into(),
                label: "x".into(),
                values: vec![0.1 + 0.2, -1e-300],
            }],
        };
        let text = table.to_csv();
        assert_eq!(FeatureTable::parse(&text).unwrap(), table);
        assert!(FeatureTable::parse("path,label\n").is_err());
        assert!(FeatureTable::parse("path,label,a\np,l,nan\n").is_err());
    }

    #[test]
    fn missing_image_error() {
        let err = load_image(Path::new("/nonexistent/x.pgm")).unwrap_err();
        assert!(matches!(err, Error::MissingImage(_)));
    }
}
