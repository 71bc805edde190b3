use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sweep::engine::{Metadata, SweepResult};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(Error::InvalidConfig(format!("format must be csv or json, got `{other}`"))),
        }
    }
}

/// Twelve significant digits in scientific notation; `NaN` for failed points.
pub fn format_value(x: f64) -> String {
    if x.is_nan() {
        "NaN".to_string()
    } else if x == 0.0 {
        format!("{:.11e}", 0.0)
    } else {
        format!("{x:.11e}")
    }
}

/// Row values that serialize `NaN` as `null` and read `null` back as `NaN`.
pub(crate) mod nullable_rows {
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(rows: &[Vec<f64>], s: S) -> Result<S::Ok, S::Error> {
        let wrapped: Vec<Vec<Option<f64>>> = rows
            .iter()
            .map(|r| r.iter().map(|&x| if x.is_finite() { Some(x) } else { None }).collect())
            .collect();
        wrapped.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Vec<f64>>, D::Error> {
        let wrapped: Vec<Vec<Option<f64>>> = Vec::deserialize(d)?;
        Ok(wrapped
            .into_iter()
            .map(|r| r.into_iter().map(|x| x.unwrap_or(f64::NAN)).collect())
            .collect())
    }
}

fn io_error(path: &Path) -> impl FnOnce(std::io::Error) -> Error + '_ {
    move |source| Error::Io {
        path: path.to_path_buf(),
        source,
    }
}

pub fn csv_string(result: &SweepResult) -> Result<String> {
    let mut writer = csv::Writer::from_writer(Vec::new());
    let csv_error = |source| Error::Csv {
        path: PathBuf::from("<memory>"),
        source,
    };
    writer.write_record(&result.columns).map_err(csv_error)?;
    for row in &result.rows {
        writer
            .write_record(row.iter().map(|&x| format_value(x)))
            .map_err(csv_error)?;
    }
    let bytes = writer.into_inner().map_err(|e| Error::Io {
        path: PathBuf::from("<memory>"),
        source: e.into_error(),
    })?;
    Ok(String::from_utf8(bytes).expect("CSV output is UTF-8"))
}

pub fn json_string(result: &SweepResult) -> String {
    serde_json::to_string_pretty(result).expect("result serializes")
}

pub fn metadata_string(metadata: &Metadata) -> String {
    serde_json::to_string_pretty(metadata).expect("metadata serializes")
}

/// Path of the metadata file that accompanies `path`.
pub fn sidecar_path(path: &Path) -> PathBuf {
    let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    path.with_file_name(format!("{stem}.meta.json"))
}

/// Writes `result` to `path` and its metadata next to it.
pub fn write_file(result: &SweepResult, format: Format, path: &Path) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(io_error(dir))?;
    }
    let text = match format {
        Format::Csv => csv_string(result)?,
        Format::Json => json_string(result),
    };
    fs::write(path, text).map_err(io_error(path))?;
    let meta = sidecar_path(path);
    fs::write(&meta, metadata_string(&result.metadata)).map_err(io_error(&meta))?;
    Ok(())
}

/// Writes `<dir>/<id>.<ext>` and `<dir>/<id>.meta.json`; returns the data path.
pub fn write_result(result: &SweepResult, format: Format, dir: &Path) -> Result<PathBuf> {
    let path = dir.join(format!("{}.{}", result.spec.id, format.extension()));
    write_file(result, format, &path)?;
    Ok(path)
}

pub fn read_json(path: &Path) -> Result<SweepResult> {
    let text = fs::read_to_string(path).map_err(io_error(path))?;
    serde_json::from_str(&text).map_err(|source| Error::Json {
        context: path.display().to_string(),
        source,
    })
}

/// Header and rows of a CSV written by [`write_file`].
pub fn read_csv(path: &Path) -> Result<(Vec<String>, Vec<Vec<f64>>)> {
    let csv_error = |source| Error::Csv {
        path: path.to_path_buf(),
        source,
    };
    let mut reader = csv::Reader::from_path(path).map_err(csv_error)?;
    let header = reader.headers().map_err(csv_error)?.iter().map(String::from).collect();
    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record.map_err(csv_error)?;
        let row = record
            .iter()
            .map(|field| {
                field.parse::<f64>().map_err(|_| {
                    Error::InvalidSweep(format!("{}: `{field}` is not a number", path.display()))
                })
            })
            .collect::<Result<Vec<f64>>>()?;
        rows.push(row);
    }
    Ok((header, rows))
}
