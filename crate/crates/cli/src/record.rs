//! Sweep rows and their CSV form.
//!
//! Floats are written as `{:.16e}`, 17 significant digits, which
//! round-trips every finite double exactly.

use std::io::{Read, Write};

use crate::error::{CliError, CliResult};
use crate::methods::Method;

pub const HEADER: [&str; 8] = [
    "eps",
    "M",
    "method",
    "order_or_tol",
    "value_re",
    "value_im",
    "ref_value",
    "rel_error",
];

/// Smallest denominator of the relative error.
pub const REL_ERROR_FLOOR: f64 = 1e-300;

/// One evaluated grid point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRecord {
    pub eps: f64,
    pub m: f64,
    pub method: Method,
    pub order_or_tol: f64,
    pub value_re: f64,
    pub value_im: f64,
    pub ref_value: f64,
    pub rel_error: f64,
}

impl SweepRecord {
    /// A row with `rel_error = |value − ref| / max(|ref|, 1e−300)`.
    /// A missing value (transform breakdown) is stored as NaN.
    pub fn new(
        eps: f64,
        m: f64,
        method: Method,
        order_or_tol: f64,
        value: Option<(f64, f64)>,
        ref_value: f64,
    ) -> Self {
        let (value_re, value_im) = value.unwrap_or((f64::NAN, f64::NAN));
        let diff = (value_re - ref_value).hypot(value_im);
        SweepRecord {
            eps,
            m,
            method,
            order_or_tol,
            value_re,
            value_im,
            ref_value,
            rel_error: diff / ref_value.abs().max(REL_ERROR_FLOOR),
        }
    }

    pub fn is_breakdown(&self) -> bool {
        self.value_re.is_nan()
    }

    fn fields(&self) -> [String; 8] {
        [
            format_float(self.eps),
            format_float(self.m),
            self.method.name().to_string(),
            format_float(self.order_or_tol),
            format_float(self.value_re),
            format_float(self.value_im),
            format_float(self.ref_value),
            format_float(self.rel_error),
        ]
    }

    /// Bitwise equality, treating NaN as equal to NaN.
    pub fn same_bits(&self, other: &SweepRecord) -> bool {
        let a = [
            self.eps,
            self.m,
            self.order_or_tol,
            self.value_re,
            self.value_im,
            self.ref_value,
            self.rel_error,
        ];
        let b = [
            other.eps,
            other.m,
            other.order_or_tol,
            other.value_re,
            other.value_im,
            other.ref_value,
            other.rel_error,
        ];
        self.method == other.method
            && a.iter()
                .zip(&b)
                .all(|(x, y)| x.to_bits() == y.to_bits() || (x.is_nan() && y.is_nan()))
    }
}

pub fn format_float(x: f64) -> String {
    if x.is_nan() {
        "NaN".to_string()
    } else if x.is_infinite() {
        if x > 0.0 { "inf" } else { "-inf" }.to_string()
    } else {
        format!("{x:.16e}")
    }
}

pub fn write_csv<W: Write>(out: W, records: &[SweepRecord]) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(HEADER)?;
    for r in records {
        w.write_record(r.fields())?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_csv<R: Read>(input: R) -> CliResult<Vec<SweepRecord>> {
    let mut rd = csv::Reader::from_reader(input);
    let header = rd.headers().map_err(|e| CliError::Csv(e.to_string()))?;
    if header.iter().ne(HEADER) {
        return Err(CliError::Csv(format!("unexpected header {header:?}")));
    }
    let mut out = Vec::new();
    for row in rd.records() {
        let row = row.map_err(|e| CliError::Csv(e.to_string()))?;
        let num = |i: usize| -> CliResult<f64> {
            row[i]
                .parse::<f64>()
                .map_err(|e| CliError::Csv(format!("column {}: {e}", HEADER[i])))
        };
        out.push(SweepRecord {
            eps: num(0)?,
            m: num(1)?,
            method: row[2]
                .parse()
                .map_err(|e: CliError| CliError::Csv(e.to_string()))?,
            order_or_tol: num(3)?,
            value_re: num(4)?,
            value_im: num(5)?,
            ref_value: num(6)?,
            rel_error: num(7)?,
        });
    }
    Ok(out)
}
