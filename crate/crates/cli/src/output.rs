//! JSON and CSV writers. Floats are written with 17 significant digits in
//! both formats, which round-trips every `f64` exactly.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use serde::Serialize;
use serde_json::ser::Formatter;

use crate::error::CliError;

pub fn format_f64(value: f64) -> String {
    format!("{value:.16e}")
}

struct SignificantDigits;

impl Formatter for SignificantDigits {
    fn write_f64<W: ?Sized + Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        writer.write_all(format_f64(value).as_bytes())
    }

    fn write_f32<W: ?Sized + Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(writer, f64::from(value))
    }
}

#[derive(Serialize)]
struct Envelope<'a, M: Serialize, D: Serialize> {
    meta: &'a M,
    data: &'a D,
}

pub fn json_string<M: Serialize, D: Serialize>(meta: &M, data: &D) -> Result<String, CliError> {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, SignificantDigits);
    Envelope { meta, data }.serialize(&mut ser)?;
    buf.push(b'\n');
    Ok(String::from_utf8(buf).expect("serde_json writes UTF-8"))
}

/// CSV with a mandatory header row.
pub fn csv_string(header: &[&str], rows: &[Vec<String>]) -> Result<String, CliError> {
    let mut writer = csv::Writer::from_writer(Vec::new());
    writer.write_record(header)?;
    for row in rows {
        writer.write_record(row)?;
    }
    let bytes = writer.into_inner().map_err(|e| CliError::Io(io::Error::other(e.to_string())))?;
    Ok(String::from_utf8(bytes).expect("csv fields are UTF-8"))
}

pub fn emit(text: &str, path: Option<&Path>) -> Result<(), CliError> {
    match path {
        Some(p) => {
            let mut out = BufWriter::new(File::create(p)?);
            out.write_all(text.as_bytes())?;
            out.flush()?;
        }
        None => {
            let stdout = io::stdout();
            let mut lock = stdout.lock();
            lock.write_all(text.as_bytes())?;
            lock.flush()?;
        }
    }
    Ok(())
}
