//! Deterministic report serialization: JSON and CSV with floats printed at
//! 17 significant digits so identical runs produce byte-identical files and
//! every value round-trips exactly.

use std::io;

use serde::Serialize;
use serde_json::ser::{Formatter, PrettyFormatter, Serializer};

/// Format a float with 17 significant digits (round-trip exact).
pub fn fmt_f64(x: f64) -> String {
    if x.is_nan() {
        return "null".into();
    }
    format!("{x:.16e}")
}

struct F17<'a> {
    inner: PrettyFormatter<'a>,
}

impl Formatter for F17<'_> {
    fn write_f64<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        write!(writer, "{value:.16e}")
    }
    fn write_f32<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        write!(writer, "{value:.8e}")
    }
    fn begin_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.inner.begin_array(w)
    }
    fn end_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.inner.end_array(w)
    }
    fn begin_array_value<W: ?Sized + io::Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.inner.begin_array_value(w, first)
    }
    fn end_array_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.inner.end_array_value(w)
    }
    fn begin_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.inner.begin_object(w)
    }
    fn end_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.inner.end_object(w)
    }
    fn begin_object_key<W: ?Sized + io::Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.inner.begin_object_key(w, first)
    }
    fn end_object_key<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.inner.end_object_key(w)
    }
    fn begin_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.inner.begin_object_value(w)
    }
    fn end_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.inner.end_object_value(w)
    }
}

/// Pretty JSON with all floats at 17 significant digits.
pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut out = Vec::new();
    let fmt = F17 {
        inner: PrettyFormatter::new(),
    };
    let mut ser = Serializer::with_formatter(&mut out, fmt);
    value
        .serialize(&mut ser)
        .expect("report serialization cannot fail");
    String::from_utf8(out).expect("serde_json emits utf8")
}

/// One CSV line from mixed fields; floats must already be formatted.
pub fn csv_line(fields: &[String]) -> String {
    fields.join(",")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_have_17_digits() {
        #[derive(Serialize)]
        struct S {
            x: f64,
        }
        let js = to_json(&S { x: 0.1 });
        assert!(js.contains("1.0000000000000001e-1"), "{js}");
    }

    #[test]
    fn round_trip_exact() {
        let x = std::f64::consts::PI / 3.0;
        let s = fmt_f64(x);
        let back: f64 = s.parse().unwrap();
        assert_eq!(x, back);
    }
}
