//! Minimal flat Parquet tables: named columns of int32, int64, double or
//! UTF-8 values, read whole into memory.

use std::fs::File;
use std::path::Path;
use std::sync::Arc;

use parquet::basic::{ConvertedType, Type as PhysicalType};
use parquet::column::reader::get_typed_column_reader;
use parquet::data_type::{ByteArray, ByteArrayType, DataType, DoubleType, Int32Type, Int64Type};
use parquet::file::properties::WriterProperties;
use parquet::file::reader::{FileReader, SerializedFileReader};
use parquet::file::writer::SerializedFileWriter;
use parquet::schema::parser::parse_message_type;
use parquet::schema::types::ColumnDescriptor;

use crate::error::{Error, Result};

const ROW_GROUP_ROWS: usize = 1 << 20;
const READ_BATCH: usize = 64 * 1024;

#[derive(Debug, Clone, PartialEq)]
pub(crate) enum Values {
    Int32(Vec<i32>),
    Int64(Vec<i64>),
    Double(Vec<f64>),
    Utf8(Vec<String>),
    /// A type this crate never reads; the name is kept for diagnostics.
    Unsupported(String),
}

impl Values {
    pub(crate) fn type_name(&self) -> String {
        match self {
            Values::Int32(_) => "int32".into(),
            Values::Int64(_) => "int64".into(),
            Values::Double(_) => "double".into(),
            Values::Utf8(_) => "string".into(),
            Values::Unsupported(t) => t.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Column {
    pub name: String,
    pub values: Values,
    /// Rows holding null; their slot in `values` has a placeholder.
    pub nulls: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Table {
    pub columns: Vec<Column>,
    pub n_rows: usize,
}

impl Table {
    pub(crate) fn column(&self, name: &str) -> Option<&Column> {
        self.columns.iter().find(|c| c.name == name)
    }

    pub(crate) fn has_column(&self, name: &str) -> bool {
        self.column(name).is_some()
    }
}

fn pq_err(path: &Path) -> impl Fn(parquet::errors::ParquetError) -> Error + '_ {
    move |source| Error::Parquet {
        path: path.to_path_buf(),
        source,
    }
}

fn read_typed<T: DataType>(
    reader: parquet::column::reader::ColumnReader,
    desc: &ColumnDescriptor,
    placeholder: T::T,
    path: &Path,
) -> Result<(Vec<T::T>, Vec<usize>)>
where
    T::T: Clone,
{
    let mut typed = get_typed_column_reader::<T>(reader);
    let max_def = desc.max_def_level();
    let mut values = Vec::new();
    let mut out = Vec::new();
    let mut nulls = Vec::new();
    let mut defs = Vec::new();
    loop {
        values.clear();
        defs.clear();
        let (records, _, _) = typed
            .read_records(READ_BATCH, (max_def > 0).then_some(&mut defs), None, &mut values)
            .map_err(pq_err(path))?;
        if records == 0 {
            break;
        }
        if max_def == 0 {
            out.append(&mut values);
        } else {
            let mut it = values.drain(..);
            for &d in &defs {
                if d == max_def {
                    out.push(it.next().expect("value for defined level"));
                } else {
                    nulls.push(out.len());
                    out.push(placeholder.clone());
                }
            }
        }
    }
    Ok((out, nulls))
}

/// Reads a flat Parquet file. Errors only when the file cannot be read or
/// is not a flat table; unexpected column types come back as
/// [`Values::Unsupported`].
pub(crate) fn read_table(path: &Path) -> Result<Table> {
    let file = File::open(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let reader = SerializedFileReader::new(file).map_err(pq_err(path))?;
    let meta = reader.metadata();
    let schema = meta.file_metadata().schema_descr();
    let n_rows = meta.file_metadata().num_rows() as usize;
    let mut columns: Vec<Column> = Vec::with_capacity(schema.num_columns());
    for i in 0..schema.num_columns() {
        let desc = schema.column(i);
        if desc.max_rep_level() > 0 || desc.path().parts().len() != 1 {
            return Err(Error::format(path, format!("column {} is nested", desc.path())));
        }
        let values = match (desc.physical_type(), desc.converted_type()) {
            (PhysicalType::INT32, _) => Values::Int32(Vec::with_capacity(n_rows)),
            (PhysicalType::INT64, _) => Values::Int64(Vec::with_capacity(n_rows)),
            (PhysicalType::DOUBLE, _) => Values::Double(Vec::with_capacity(n_rows)),
            (PhysicalType::BYTE_ARRAY, ConvertedType::UTF8) => Values::Utf8(Vec::with_capacity(n_rows)),
            (PhysicalType::BYTE_ARRAY, _) if desc.logical_type_ref().is_some() => {
                Values::Utf8(Vec::with_capacity(n_rows))
            }
            (t, _) => Values::Unsupported(t.to_string().to_lowercase()),
        };
        columns.push(Column {
            name: desc.name().to_string(),
            values,
            nulls: Vec::new(),
        });
    }

    let mut base = 0usize;
    for g in 0..reader.num_row_groups() {
        let rg = reader.get_row_group(g).map_err(pq_err(path))?;
        for (i, col) in columns.iter_mut().enumerate() {
            let desc = schema.column(i);
            let cr = || rg.get_column_reader(i).map_err(pq_err(path));
            match &mut col.values {
                Values::Int32(v) => {
                    let (vals, nulls) = read_typed::<Int32Type>(cr()?, &desc, 0, path)?;
                    col.nulls.extend(nulls.into_iter().map(|r| r + base));
                    v.extend(vals);
                }
                Values::Int64(v) => {
                    let (vals, nulls) = read_typed::<Int64Type>(cr()?, &desc, 0, path)?;
                    col.nulls.extend(nulls.into_iter().map(|r| r + base));
                    v.extend(vals);
                }
                Values::Double(v) => {
                    let (vals, nulls) = read_typed::<DoubleType>(cr()?, &desc, 0.0, path)?;
                    col.nulls.extend(nulls.into_iter().map(|r| r + base));
                    v.extend(vals);
                }
                Values::Utf8(v) => {
                    let (vals, nulls) = read_typed::<ByteArrayType>(cr()?, &desc, ByteArray::new(), path)?;
                    col.nulls.extend(nulls.into_iter().map(|r| r + base));
                    for b in vals {
                        let s = std::str::from_utf8(b.data())
                            .map_err(|_| Error::format(path, format!("column {} is not UTF-8", col.name)))?;
                        v.push(s.to_string());
                    }
                }
                Values::Unsupported(_) => {}
            }
        }
        base += rg.metadata().num_rows() as usize;
    }
    for col in &columns {
        if !matches!(col.values, Values::Unsupported(_)) && values_len(&col.values) != n_rows {
            return Err(Error::format(path, format!("column {} has a ragged length", col.name)));
        }
    }
    Ok(Table { columns, n_rows })
}

fn values_len(v: &Values) -> usize {
    match v {
        Values::Int32(x) => x.len(),
        Values::Int64(x) => x.len(),
        Values::Double(x) => x.len(),
        Values::Utf8(x) => x.len(),
        Values::Unsupported(_) => 0,
    }
}

/// A column to write; all columns are required (non-null).
pub(crate) enum OutColumn<'a> {
    Int32(&'a str, Vec<i32>),
    Double(&'a str, Vec<f64>),
    Utf8(&'a str, Vec<String>),
}

impl OutColumn<'_> {
    fn schema_field(&self) -> String {
        match self {
            OutColumn::Int32(n, _) => format!("required int32 {n};"),
            OutColumn::Double(n, _) => format!("required double {n};"),
            OutColumn::Utf8(n, _) => format!("required binary {n} (UTF8);"),
        }
    }

    fn len(&self) -> usize {
        match self {
            OutColumn::Int32(_, v) => v.len(),
            OutColumn::Double(_, v) => v.len(),
            OutColumn::Utf8(_, v) => v.len(),
        }
    }
}

/// Writes equal-length columns as one flat Parquet file.
pub(crate) fn write_table(path: &Path, message: &str, columns: &[OutColumn<'_>]) -> Result<()> {
    let n_rows = columns.first().map_or(0, OutColumn::len);
    assert!(columns.iter().all(|c| c.len() == n_rows), "columns differ in length");
    let fields: String = columns.iter().map(OutColumn::schema_field).collect::<Vec<_>>().join(" ");
    let schema = Arc::new(
        parse_message_type(&format!("message {message} {{ {fields} }}")).map_err(pq_err(path))?,
    );
    let file = File::create(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let props = Arc::new(WriterProperties::builder().build());
    let mut writer = SerializedFileWriter::new(file, schema, props).map_err(pq_err(path))?;

    let mut start = 0;
    loop {
        let end = (start + ROW_GROUP_ROWS).min(n_rows);
        let mut rg = writer.next_row_group().map_err(pq_err(path))?;
        for col in columns {
            let mut cw = rg
                .next_column()
                .map_err(pq_err(path))?
                .expect("schema and columns agree");
            match col {
                OutColumn::Int32(_, v) => {
                    cw.typed::<Int32Type>().write_batch(&v[start..end], None, None).map_err(pq_err(path))?;
                }
                OutColumn::Double(_, v) => {
                    cw.typed::<DoubleType>().write_batch(&v[start..end], None, None).map_err(pq_err(path))?;
                }
                OutColumn::Utf8(_, v) => {
                    let bytes: Vec<ByteArray> = v[start..end].iter().map(|s| ByteArray::from(s.as_str())).collect();
                    cw.typed::<ByteArrayType>().write_batch(&bytes, None, None).map_err(pq_err(path))?;
                }
            }
            cw.close().map_err(pq_err(path))?;
        }
        rg.close().map_err(pq_err(path))?;
        start = end;
        if start >= n_rows {
            break;
        }
    }
    writer.close().map_err(pq_err(path))?;
    Ok(())
}
