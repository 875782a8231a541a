//! Text formats shared by every artifact writer: fixed 15-significant-digit
//! decimals, `.` separator, LF line endings.

/// Formats `x` with 15 significant digits in plain decimal notation.
///
/// Non-finite values are written as `nan`, `inf` or `-inf`.
pub fn sig15(x: f64) -> String {
    if !x.is_finite() {
        return if x.is_nan() {
            "nan".into()
        } else if x > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        };
    }
    if x == 0.0 {
        return "0".into();
    }
    // Round through scientific notation first so the exponent reflects the
    // rounded mantissa (9.99...e-1 rounding up to 1.0).
    let sci = format!("{x:.14e}");
    let (mantissa, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("exponent");
    let decimals = (14 - exp).max(0) as usize;
    let mantissa: f64 = mantissa.parse().expect("mantissa");
    let value = mantissa * 10f64.powi(exp);
    format!("{value:.decimals$}")
}

/// Accumulates a CSV table with a fixed header.
#[derive(Debug, Clone)]
pub struct CsvTable {
    text: String,
    columns: usize,
}

impl CsvTable {
    pub fn new(header: &[&str]) -> Self {
        let mut text = header.join(",");
        text.push('\n');
        Self {
            text,
            columns: header.len(),
        }
    }

    /// Appends one row of already formatted cells.
    pub fn push_cells<I, S>(&mut self, cells: I)
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let mut n = 0;
        for (i, cell) in cells.into_iter().enumerate() {
            if i > 0 {
                self.text.push(',');
            }
            self.text.push_str(cell.as_ref());
            n += 1;
        }
        debug_assert_eq!(n, self.columns, "row width");
        self.text.push('\n');
    }

    /// Appends one numeric row; `None` cells stay empty.
    pub fn push_numbers(&mut self, values: &[Option<f64>]) {
        self.push_cells(values.iter().map(|v| v.map(sig15).unwrap_or_default()));
    }

    pub fn into_string(self) -> String {
        self.text
    }
}

/// Pretty JSON with a trailing newline.
pub fn to_json_string<T: serde::Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable value");
    s.push('\n');
    s
}
