use std::collections::HashMap;
use std::io::{Read, Write};

use super::{Attribute, AttributeKind, Column, Dataset, MISSING};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ClassColumn {
    Name(String),
    Index(usize),
    Last,
}

impl ClassColumn {
    /// Parses a command-line style selector: a plain integer is a column
    /// index, anything else a column name.
    pub fn parse(s: &str) -> ClassColumn {
        match s.parse::<usize>() {
            Ok(i) => ClassColumn::Index(i),
            Err(_) => ClassColumn::Name(s.to_string()),
        }
    }
}

/// Attribute kinds declared in a schema sidecar.
///
/// One attribute per non-blank line, `name: kind` or `name kind`, where kind is
/// `categorical` / `discrete` or `continuous` / `numeric`. Lines starting
/// with `#` are comments. Attributes that are not listed are categorical.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SchemaSpec {
    pub entries: Vec<(String, AttributeKind)>,
}

impl SchemaSpec {
    pub fn parse(text: &str) -> Result<SchemaSpec> {
        let mut entries = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (name, kind) = match line.rsplit_once(':') {
                Some((n, k)) => (n.trim(), k.trim()),
                None => match line.rsplit_once(char::is_whitespace) {
                    Some((n, k)) => (n.trim(), k.trim()),
                    None => (line, "categorical"),
                },
            };
            let kind = match kind.to_ascii_lowercase().as_str() {
                "categorical" | "discrete" | "nominal" => AttributeKind::Categorical,
                "continuous" | "numeric" | "real" => AttributeKind::Continuous,
                other => {
                    return Err(Error::Schema(format!(
                        "schema line {}: unknown kind `{other}`",
                        lineno + 1
                    )))
                }
            };
            entries.push((name.to_string(), kind));
        }
        Ok(SchemaSpec { entries })
    }

    fn kind_of(&self, name: &str) -> AttributeKind {
        self.entries
            .iter()
            .find(|(n, _)| n == name)
            .map_or(AttributeKind::Categorical, |(_, k)| *k)
    }
}

#[derive(Debug, Clone)]
pub struct LoadOptions {
    pub class_column: ClassColumn,
    pub missing_token: String,
    pub delimiter: u8,
    pub has_header: bool,
    pub schema: Option<SchemaSpec>,
}

impl Default for LoadOptions {
    fn default() -> Self {
        LoadOptions {
            class_column: ClassColumn::Last,
            missing_token: MISSING.to_string(),
            delimiter: b',',
            has_header: true,
            schema: None,
        }
    }
}

/// Parses delimiter-separated text into a dataset.
///
/// Category codes follow first-appearance order within each column. Cells
/// equal to the missing token become the `?` category (or NaN for continuous
/// attributes).
pub fn load_csv<R: Read>(source: R, opts: &LoadOptions) -> Result<Dataset> {
    let mut reader = csv::ReaderBuilder::new()
        .delimiter(opts.delimiter)
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(source);

    let mut records = reader.records();
    let names: Vec<String> = if opts.has_header {
        match records.next() {
            None => return Err(Error::EmptyInput),
            Some(header) => header?.iter().map(str::to_string).collect(),
        }
    } else {
        match &opts.schema {
            Some(spec) if !spec.entries.is_empty() => spec.entries.iter().map(|(n, _)| n.clone()).collect(),
            _ => Vec::new(),
        }
    };

    let mut rows: Vec<csv::StringRecord> = Vec::new();
    let mut lines: Vec<usize> = Vec::new();
    let mut width = if names.is_empty() { None } else { Some(names.len()) };
    let first_data_line = if opts.has_header { 2 } else { 1 };
    for (k, record) in records.enumerate() {
        let record = record?;
        if record.len() == 1 && record[0].is_empty() {
            continue;
        }
        let line = record.position().map_or(k + first_data_line, |p| p.line() as usize);
        let expected = *width.get_or_insert(record.len());
        if record.len() != expected {
            return Err(Error::RaggedRow {
                row: line,
                expected,
                found: record.len(),
            });
        }
        rows.push(record);
        lines.push(line);
    }
    if rows.is_empty() {
        return Err(Error::EmptyInput);
    }
    let width = width.unwrap_or(0);
    let names = if names.is_empty() {
        (0..width).map(|i| format!("x{i}")).collect()
    } else {
        names
    };

    let class_index = match &opts.class_column {
        ClassColumn::Last => width - 1,
        ClassColumn::Index(i) if *i < width => *i,
        ClassColumn::Index(i) => return Err(Error::MissingClassColumn(i.to_string())),
        ClassColumn::Name(n) => names
            .iter()
            .position(|x| x == n)
            .ok_or_else(|| Error::MissingClassColumn(n.clone()))?,
    };

    let mut schema = Vec::with_capacity(width);
    let mut columns = Vec::with_capacity(width);
    for (c, name) in names.iter().enumerate() {
        let kind = match &opts.schema {
            Some(spec) if c != class_index => spec.kind_of(name),
            _ => AttributeKind::Categorical,
        };
        match kind {
            AttributeKind::Categorical => {
                let mut index: HashMap<&str, u32> = HashMap::new();
                let mut values: Vec<String> = Vec::new();
                let mut codes = Vec::with_capacity(rows.len());
                for (r, row) in rows.iter().enumerate() {
                    let mut cell = &row[c];
                    if cell == opts.missing_token {
                        if c == class_index {
                            return Err(Error::MissingClassValue { row: lines[r] });
                        }
                        cell = MISSING;
                    }
                    let code = *index.entry(cell).or_insert_with(|| {
                        values.push(cell.to_string());
                        (values.len() - 1) as u32
                    });
                    codes.push(code);
                }
                schema.push(Attribute::categorical(name.clone(), values));
                columns.push(Column::Categorical(codes));
            }
            AttributeKind::Continuous => {
                let mut values = Vec::with_capacity(rows.len());
                for (r, row) in rows.iter().enumerate() {
                    let cell = &row[c];
                    if cell == opts.missing_token {
                        values.push(f64::NAN);
                        continue;
                    }
                    match cell.parse::<f64>() {
                        Ok(v) if v.is_finite() => values.push(v),
                        _ => {
                            return Err(Error::NonNumeric {
                                attribute: name.clone(),
                                row: lines[r],
                                value: cell.to_string(),
                            })
                        }
                    }
                }
                schema.push(Attribute::continuous(name.clone()));
                columns.push(Column::Continuous(values));
            }
        }
    }
    Dataset::new(schema, class_index, columns)
}

/// Loads a dataset from a filesystem path.
pub fn read_csv(path: impl AsRef<std::path::Path>, opts: &LoadOptions) -> Result<Dataset> {
    let file = std::fs::File::open(path)?;
    load_csv(std::io::BufReader::new(file), opts)
}

/// Writes the dataset back out with a header row, in stored row order.
/// Missing continuous cells are written as `?`.
pub fn write_csv<W: Write>(ds: &Dataset, sink: W, delimiter: u8) -> Result<()> {
    let mut writer = csv::WriterBuilder::new().delimiter(delimiter).from_writer(sink);
    writer.write_record(ds.schema().iter().map(|a| a.name.as_str()))?;
    let mut cells: Vec<String> = Vec::with_capacity(ds.n_attributes());
    for r in 0..ds.n_cases() {
        cells.clear();
        for c in 0..ds.n_attributes() {
            cells.push(match ds.column(c) {
                Column::Categorical(codes) => ds.attribute(c).values[codes[r] as usize].clone(),
                Column::Continuous(v) if v[r].is_nan() => MISSING.to_string(),
                Column::Continuous(v) => v[r].to_string(),
            });
        }
        writer.write_record(&cells)?;
    }
    writer.flush()?;
    Ok(())
}
