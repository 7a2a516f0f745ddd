use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::types::LabeledDataset;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LabelColumn {
    /// Every column is a feature.
    None,
    Last,
    /// Zero-based column index.
    Index(usize),
}

impl std::str::FromStr for LabelColumn {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "none" => Ok(LabelColumn::None),
            "last" => Ok(LabelColumn::Last),
            _ => s
                .parse()
                .map(LabelColumn::Index)
                .map_err(|_| Error::config(format!("label column must be none, last or an index, got {s:?}"))),
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct CsvOptions {
    pub label_column: LabelColumn,
    pub has_header: bool,
}

/// Numeric feature rows, plus the raw label column when one was requested.
#[derive(Clone, Debug, Default)]
pub struct CsvTable {
    pub n: usize,
    pub values: Vec<f64>,
    pub labels: Option<Vec<String>>,
}

impl CsvTable {
    pub fn rows(&self) -> usize {
        self.values.len().checked_div(self.n).unwrap_or(0)
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.n..(i + 1) * self.n]
    }
}

fn csv_error(err: ::csv::Error) -> Error {
    let line = err.position().map(|p| p.line()).unwrap_or(0);
    match err.kind() {
        ::csv::ErrorKind::Io(_) => match err.into_kind() {
            ::csv::ErrorKind::Io(e) => Error::Io(e),
            _ => unreachable!(),
        },
        ::csv::ErrorKind::UnequalLengths { expected_len, len, .. } => Error::Parse {
            line,
            msg: format!("ragged row: {len} fields, expected {expected_len}"),
        },
        _ => Error::Parse {
            line,
            msg: err.to_string(),
        },
    }
}

/// Reads a rectangular numeric table. Zero data rows is not an error here.
pub fn read_csv<R: Read>(reader: R, opts: CsvOptions) -> Result<CsvTable> {
    let mut rdr = ::csv::ReaderBuilder::new()
        .has_headers(opts.has_header)
        .flexible(false)
        .trim(::csv::Trim::All)
        .from_reader(reader);
    let mut table = CsvTable {
        labels: (opts.label_column != LabelColumn::None).then(Vec::new),
        ..Default::default()
    };
    let mut record = ::csv::StringRecord::new();
    let mut width = None;
    while rdr.read_record(&mut record).map_err(csv_error)? {
        let line = record.position().map(|p| p.line()).unwrap_or(0);
        let fields = record.len();
        let label_idx = match opts.label_column {
            LabelColumn::None => None,
            LabelColumn::Last => Some(fields - 1),
            LabelColumn::Index(i) if i < fields => Some(i),
            LabelColumn::Index(i) => {
                return Err(Error::Parse {
                    line,
                    msg: format!("label column {i} out of range for {fields} fields"),
                })
            }
        };
        if width.is_none() {
            let n = fields - usize::from(label_idx.is_some());
            if n == 0 {
                return Err(Error::Parse {
                    line,
                    msg: "no feature columns".into(),
                });
            }
            table.n = n;
            width = Some(fields);
        }
        for (j, field) in record.iter().enumerate() {
            if Some(j) == label_idx {
                table.labels.as_mut().unwrap().push(field.to_string());
                continue;
            }
            let v: f64 = field.parse().map_err(|_| Error::Parse {
                line,
                msg: format!("non-numeric feature {field:?} in column {j}"),
            })?;
            if !v.is_finite() {
                return Err(Error::Parse {
                    line,
                    msg: format!("non-finite feature {field:?} in column {j}"),
                });
            }
            table.values.push(v);
        }
    }
    Ok(table)
}

/// Parses a labeled dataset; labels are indexed in order of first appearance.
pub fn parse_csv_dataset<R: Read>(reader: R, opts: CsvOptions) -> Result<LabeledDataset> {
    if opts.label_column == LabelColumn::None {
        return Err(Error::config("a labeled dataset needs a label column"));
    }
    let table = read_csv(reader, opts)?;
    if table.rows() == 0 {
        return Err(Error::Parse {
            line: 1,
            msg: "no examples".into(),
        });
    }
    let labels = table.labels.expect("label column requested");
    LabeledDataset::from_symbols(table.n, table.values, &labels)
}

pub fn ingest_csv(path: &Path, label_column: LabelColumn, has_header: bool) -> Result<LabeledDataset> {
    let file = File::open(path)?;
    parse_csv_dataset(
        std::io::BufReader::new(file),
        CsvOptions {
            label_column,
            has_header,
        },
    )
}

/// Writes `x0,...,x{n-1},class` with a header row. Values use the shortest
/// representation that parses back to the same f64.
pub fn write_csv_dataset<W: Write>(ds: &LabeledDataset, mut w: W) -> Result<()> {
    let mut line = String::new();
    for j in 0..ds.dim() {
        line.push_str(&format!("x{j},"));
    }
    line.push_str("class\n");
    w.write_all(line.as_bytes())?;
    for (x, y) in ds.iter() {
        line.clear();
        for v in x {
            line.push_str(&format!("{v},"));
        }
        line.push_str(&ds.class_names()[y]);
        line.push('\n');
        w.write_all(line.as_bytes())?;
    }
    Ok(())
}
