#![allow(dead_code)]

use std::fs::File;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};
use std::sync::Arc;

use parquet::data_type::{ByteArray, ByteArrayType, DoubleType, Int32Type, Int64Type};
use parquet::file::properties::WriterProperties;
use parquet::file::writer::SerializedFileWriter;
use parquet::schema::parser::parse_message_type;

pub fn bin() -> PathBuf {
    PathBuf::from(env!("CARGO_BIN_EXE_cfscore"))
}

pub fn cfscore(dir: &Path, args: &[&str]) -> Output {
    Command::new(bin())
        .current_dir(dir)
        .args(args)
        .output()
        .expect("spawn cfscore")
}

/// Raw columns for building arbitrary (including malformed) files.
pub enum Col {
    I32(&'static str, Vec<i32>),
    I64(&'static str, Vec<i64>),
    F64(&'static str, Vec<f64>),
    Str(&'static str, Vec<String>),
    OptI32(&'static str, Vec<Option<i32>>),
}

impl Col {
    fn field(&self) -> String {
        match self {
            Col::I32(n, _) => format!("required int32 {n};"),
            Col::I64(n, _) => format!("required int64 {n};"),
            Col::F64(n, _) => format!("required double {n};"),
            Col::Str(n, _) => format!("required binary {n} (UTF8);"),
            Col::OptI32(n, _) => format!("optional int32 {n};"),
        }
    }
}

pub fn write_parquet(path: &Path, cols: &[Col]) {
    let fields: Vec<String> = cols.iter().map(Col::field).collect();
    let schema = Arc::new(parse_message_type(&format!("message t {{ {} }}", fields.join(" "))).unwrap());
    let props = Arc::new(WriterProperties::builder().build());
    let mut w = SerializedFileWriter::new(File::create(path).unwrap(), schema, props).unwrap();
    let mut rg = w.next_row_group().unwrap();
    for col in cols {
        let mut cw = rg.next_column().unwrap().unwrap();
        match col {
            Col::I32(_, v) => {
                cw.typed::<Int32Type>().write_batch(v, None, None).unwrap();
            }
            Col::I64(_, v) => {
                cw.typed::<Int64Type>().write_batch(v, None, None).unwrap();
            }
            Col::F64(_, v) => {
                cw.typed::<DoubleType>().write_batch(v, None, None).unwrap();
            }
            Col::Str(_, v) => {
                let b: Vec<ByteArray> = v.iter().map(|s| ByteArray::from(s.as_str())).collect();
                cw.typed::<ByteArrayType>().write_batch(&b, None, None).unwrap();
            }
            Col::OptI32(_, v) => {
                let defs: Vec<i16> = v.iter().map(|x| x.is_some() as i16).collect();
                let vals: Vec<i32> = v.iter().flatten().copied().collect();
                cw.typed::<Int32Type>().write_batch(&vals, Some(&defs), None).unwrap();
            }
        }
        cw.close().unwrap();
    }
    rg.close().unwrap();
    w.close().unwrap();
}

/// Long-format rows of a cm submission: (month, country, draw, prediction).
#[derive(Clone)]
pub struct Rows(pub Vec<(i32, i32, i32, i32)>);

impl Rows {
    /// Countries `units` x months `months`, `n` draws each, prediction = draw % 7.
    pub fn grid(units: &[i32], months: &[i32], n: i32) -> Rows {
        let mut rows = Vec::new();
        for &m in months {
            for &u in units {
                for d in 0..n {
                    rows.push((m, u, d, d % 7));
                }
            }
        }
        Rows(rows)
    }

    pub fn columns(&self) -> (Vec<i32>, Vec<i32>, Vec<i32>, Vec<i32>) {
        let mut out = (Vec::new(), Vec::new(), Vec::new(), Vec::new());
        for &(m, u, d, p) in &self.0 {
            out.0.push(m);
            out.1.push(u);
            out.2.push(d);
            out.3.push(p);
        }
        out
    }

    pub fn write(&self, path: &Path) {
        let (m, u, d, p) = self.columns();
        write_parquet(
            path,
            &[
                Col::I32("month_id", m),
                Col::I32("country_id", u),
                Col::I32("draw", d),
                Col::I32("prediction", p),
            ],
        );
    }
}
