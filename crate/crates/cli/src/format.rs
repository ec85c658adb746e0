//! Locale-free number formatting for CSV and reports.

use std::io::{self, Write};

/// Scientific notation with 17 significant digits; `-0` prints as `0`.
pub fn num(v: f64) -> String {
    let v = if v == 0.0 { 0.0 } else { v };
    format!("{v:.16e}")
}

/// A CSV writer that always emits its header first.
pub struct Table<W: Write> {
    out: W,
    width: usize,
}

impl<W: Write> Table<W> {
    pub fn new(mut out: W, header: &[&str]) -> io::Result<Self> {
        writeln!(out, "{}", header.join(","))?;
        Ok(Table {
            out,
            width: header.len(),
        })
    }

    pub fn row(&mut self, cells: &[String]) -> io::Result<()> {
        debug_assert_eq!(cells.len(), self.width);
        writeln!(self.out, "{}", cells.join(","))
    }

    pub fn finish(mut self) -> io::Result<()> {
        self.out.flush()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seventeen_significant_digits() {
        assert_eq!(num(0.1), "1.0000000000000001e-1");
        assert_eq!(num(-2.0), "-2.0000000000000000e0");
        assert_eq!(num(-0.0), num(0.0));
        assert_eq!(num(1.0 / 3.0).parse::<f64>().unwrap(), 1.0 / 3.0);
    }

    #[test]
    fn header_always_written() {
        let mut buf = Vec::new();
        Table::new(&mut buf, &["x", "re"])
            .unwrap()
            .finish()
            .unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "x,re\n");
    }
}
