//! CSV files for longitudinal and survival data.
//!
//! Longitudinal: `id, time, y`, then covariates prefixed `l_` (longitudinal
//! predictor) or `ls_` (shared predictor). Survival: `id, time, status`, then
//! covariates prefixed `s_`. Numbers are written with 17 significant digits,
//! so a write/read round trip is exact.

use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use jointboost_core::{Covariates, LongitudinalDataset, SurvivalDataset};

use crate::error::{Error, Result};

pub const LONGITUDINAL_KEYS: [&str; 3] = ["id", "time", "y"];
pub const SURVIVAL_KEYS: [&str; 3] = ["id", "time", "status"];

/// Formats a float with 17 significant digits.
pub fn format_float(x: f64) -> String {
    format!("{x:.16e}")
}

struct Context<'a> {
    path: &'a Path,
}

impl Context<'_> {
    fn schema(&self, row: Option<usize>, column: Option<&str>, message: impl Into<String>) -> Error {
        Error::Schema {
            path: self.path.to_path_buf(),
            row,
            column: column.map(str::to_owned),
            message: message.into(),
        }
    }

    fn csv(&self, source: csv::Error) -> Error {
        Error::Csv {
            path: self.path.to_path_buf(),
            source,
        }
    }
}

/// Header and parsed rows of one file.
struct Parsed {
    /// Covariate columns as (name, values).
    covariates: Vec<(String, Vec<f64>)>,
    ids: Vec<i64>,
    time: Vec<f64>,
    third: Vec<f64>,
}

fn parse<R: Read>(reader: R, ctx: &Context, keys: [&str; 3], prefixes: &[&str]) -> Result<Parsed> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let header: Vec<String> = rdr.headers().map_err(|e| ctx.csv(e))?.iter().map(str::to_owned).collect();
    for (k, key) in keys.iter().enumerate() {
        match header.get(k) {
            Some(h) if h == key => {}
            found => {
                return Err(ctx.schema(
                    None,
                    found.map(String::as_str),
                    format!("expected column {} to be `{key}`, header is `{}`", k + 1, header.join(",")),
                ))
            }
        }
    }
    let mut covariates = Vec::new();
    for name in &header[3..] {
        if !prefixes.iter().any(|p| name.starts_with(p) && name.len() > p.len()) {
            return Err(ctx.schema(None, Some(name), format!("covariate columns must start with one of {prefixes:?}")));
        }
        if covariates.iter().any(|(n, _): &(String, Vec<f64>)| n == name) {
            return Err(ctx.schema(None, Some(name), "duplicate column"));
        }
        covariates.push((name.clone(), Vec::new()));
    }

    let mut parsed = Parsed {
        covariates,
        ids: Vec::new(),
        time: Vec::new(),
        third: Vec::new(),
    };
    for (r, record) in rdr.records().enumerate() {
        let row = r + 1;
        let record = record.map_err(|e| ctx.csv(e))?;
        let field = |k: usize| -> Result<&str> {
            record
                .get(k)
                .ok_or_else(|| ctx.schema(Some(row), Some(&header[k]), "missing value"))
        };
        let number = |k: usize| -> Result<f64> {
            let text = field(k)?;
            text.parse::<f64>()
                .map_err(|_| ctx.schema(Some(row), Some(&header[k]), format!("`{text}` is not a number")))
        };
        let id = field(0)?;
        parsed
            .ids
            .push(id.parse().map_err(|_| ctx.schema(Some(row), Some("id"), format!("`{id}` is not an integer id")))?);
        parsed.time.push(number(1)?);
        parsed.third.push(number(2)?);
        for (k, (_, column)) in parsed.covariates.iter_mut().enumerate() {
            column.push(number(k + 3)?);
        }
    }
    Ok(parsed)
}

fn split_columns(columns: Vec<(String, Vec<f64>)>, rows: usize, prefix: &str) -> (Covariates, Vec<(String, Vec<f64>)>) {
    let (mine, rest): (Vec<_>, Vec<_>) = columns.into_iter().partition(|(n, _)| n.starts_with(prefix));
    let (names, values) = mine.into_iter().unzip();
    (Covariates::from_columns(rows, names, values).expect("parsed columns have one value per row"), rest)
}

pub fn read_longitudinal_from<R: Read>(reader: R, path: &Path) -> Result<LongitudinalDataset> {
    let ctx = Context { path };
    let parsed = parse(reader, &ctx, LONGITUDINAL_KEYS, &["ls_", "l_"])?;
    let rows = parsed.ids.len();
    let (x_ls, rest) = split_columns(parsed.covariates, rows, "ls_");
    let (x_l, _) = split_columns(rest, rows, "l_");
    Ok(LongitudinalDataset {
        ids: parsed.ids,
        time: parsed.time,
        outcome: parsed.third,
        x_l,
        x_ls,
    })
}

pub fn read_survival_from<R: Read>(reader: R, path: &Path) -> Result<SurvivalDataset> {
    let ctx = Context { path };
    let parsed = parse(reader, &ctx, SURVIVAL_KEYS, &["s_"])?;
    let event = parsed
        .third
        .iter()
        .enumerate()
        .map(|(r, &s)| match s {
            0.0 => Ok(false),
            1.0 => Ok(true),
            _ => Err(ctx.schema(Some(r + 1), Some("status"), format!("status must be 0 or 1, got {s}"))),
        })
        .collect::<Result<Vec<_>>>()?;
    let rows = parsed.ids.len();
    let (x_s, _) = split_columns(parsed.covariates, rows, "s_");
    Ok(SurvivalDataset {
        ids: parsed.ids,
        time: parsed.time,
        event,
        x_s,
    })
}

fn open(path: &Path) -> Result<std::fs::File> {
    std::fs::File::open(path).map_err(|e| Error::io(path, e))
}

pub fn read_longitudinal(path: &Path) -> Result<LongitudinalDataset> {
    read_longitudinal_from(open(path)?, path)
}

pub fn read_survival(path: &Path) -> Result<SurvivalDataset> {
    read_survival_from(open(path)?, path)
}

fn prefixed(name: &str, prefix: &str) -> String {
    if name.starts_with(prefix) {
        name.to_owned()
    } else {
        format!("{prefix}{name}")
    }
}

fn write_table<W: Write>(
    writer: W,
    path: &Path,
    keys: [&str; 3],
    blocks: &[(&Covariates, &str)],
    rows: usize,
    leading: impl Fn(usize) -> [String; 3],
) -> Result<()> {
    let err = |source| Error::Csv {
        path: path.to_path_buf(),
        source,
    };
    let mut w = csv::Writer::from_writer(writer);
    let mut header: Vec<String> = keys.iter().map(|k| k.to_string()).collect();
    for (x, prefix) in blocks {
        header.extend(x.names().iter().map(|n| prefixed(n, prefix)));
    }
    w.write_record(&header).map_err(err)?;
    let mut record = Vec::with_capacity(header.len());
    for r in 0..rows {
        record.clear();
        record.extend(leading(r));
        for (x, _) in blocks {
            record.extend(x.columns().map(|c| format_float(c[r])));
        }
        w.write_record(&record).map_err(err)?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn write_longitudinal_to<W: Write>(writer: W, path: &Path, data: &LongitudinalDataset) -> Result<()> {
    let blocks = [(&data.x_l, "l_"), (&data.x_ls, "ls_")];
    write_table(writer, path, LONGITUDINAL_KEYS, &blocks, data.ids.len(), |r| {
        [data.ids[r].to_string(), format_float(data.time[r]), format_float(data.outcome[r])]
    })
}

pub fn write_survival_to<W: Write>(writer: W, path: &Path, data: &SurvivalDataset) -> Result<()> {
    write_table(writer, path, SURVIVAL_KEYS, &[(&data.x_s, "s_")], data.ids.len(), |r| {
        [
            data.ids[r].to_string(),
            format_float(data.time[r]),
            u8::from(data.event[r]).to_string(),
        ]
    })
}

fn create(path: &Path) -> Result<std::io::BufWriter<std::fs::File>> {
    std::fs::File::create(path).map(std::io::BufWriter::new).map_err(|e| Error::io(path, e))
}

pub fn write_longitudinal(path: &Path, data: &LongitudinalDataset) -> Result<()> {
    write_longitudinal_to(create(path)?, path, data)
}

pub fn write_survival(path: &Path, data: &SurvivalDataset) -> Result<()> {
    write_survival_to(create(path)?, path, data)
}

/// Writes rows of already formatted fields under `header`.
pub fn write_rows<I, R>(path: &Path, header: &[&str], rows: I) -> Result<()>
where
    I: IntoIterator<Item = R>,
    R: IntoIterator<Item = String>,
{
    let err = |source| Error::Csv {
        path: path.to_path_buf(),
        source,
    };
    let mut w = csv::Writer::from_writer(create(path)?);
    w.write_record(header).map_err(err)?;
    for row in rows {
        w.write_record(row.into_iter().collect::<Vec<_>>()).map_err(err)?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

/// `dir/name`, creating `dir` when missing.
pub fn output_path(dir: &Path, name: &str) -> Result<PathBuf> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    Ok(dir.join(name))
}
