//! Decimal output with 17 significant digits, enough to reproduce every
//! double exactly on re-parse.

use std::io::{self, Write};

use serde::Serialize;
use serde_json::ser::{Formatter, Serializer};

pub fn float(v: f64) -> String {
    if !v.is_finite() {
        return if v.is_nan() {
            "nan".into()
        } else if v > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        };
    }
    let sci = format!("{v:.16e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    let (sign, mantissa) = match mantissa.strip_prefix('-') {
        Some(rest) => ("-", rest),
        None => ("", mantissa),
    };
    if !(-5..17).contains(&exp) {
        return format!("{sign}{mantissa}e{exp}");
    }
    let digits: String = mantissa.chars().filter(|c| *c != '.').collect();
    if exp < 0 {
        let zeros = "0".repeat((-exp - 1) as usize);
        format!("{sign}0.{zeros}{digits}")
    } else {
        let split = exp as usize + 1;
        let (int, frac) = digits.split_at(split);
        let frac = if frac.is_empty() { "0" } else { frac };
        format!("{sign}{int}.{frac}")
    }
}

pub fn floats(vs: &[f64]) -> String {
    let parts: Vec<String> = vs.iter().map(|&v| float(v)).collect();
    format!("[{}]", parts.join(", "))
}

/// One top-level key per line, arrays inline.
#[derive(Default)]
struct Precise {
    depth: usize,
}

impl Formatter for Precise {
    fn write_f64<W: ?Sized + Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        writer.write_all(float(value).as_bytes())
    }

    fn begin_array_value<W: ?Sized + Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        if first {
            Ok(())
        } else {
            w.write_all(b", ")
        }
    }

    fn begin_object<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.depth += 1;
        w.write_all(b"{")
    }

    fn end_object<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.depth -= 1;
        if self.depth == 0 {
            w.write_all(b"\n}")
        } else {
            w.write_all(b"}")
        }
    }

    fn begin_object_key<W: ?Sized + Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        match (first, self.depth) {
            (true, 1) => w.write_all(b"\n  "),
            (false, 1) => w.write_all(b",\n  "),
            (true, _) => Ok(()),
            (false, _) => w.write_all(b", "),
        }
    }

    fn begin_object_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        w.write_all(b": ")
    }
}

/// JSON with one top-level key per line and every float at 17 significant digits.
pub fn to_json<T: Serialize, W: Write>(value: &T, out: W) -> io::Result<()> {
    let mut ser = Serializer::with_formatter(out, Precise::default());
    value.serialize(&mut ser).map_err(io::Error::other)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seventeen_digits() {
        assert_eq!(float(1.0), "1.0000000000000000");
        assert_eq!(float(0.5), "0.50000000000000000");
        assert_eq!(float(0.1), "0.10000000000000001");
        assert_eq!(float(-0.25), "-0.25000000000000000");
        assert_eq!(float(1e-7), "9.9999999999999995e-8");
        assert_eq!(float(2.5e-6), "2.5000000000000002e-6");
        assert_eq!(float(0.0), "0.0000000000000000");
        assert_eq!(float(f64::INFINITY), "inf");
    }

    #[test]
    fn round_trips() {
        for v in [0.1, 1.0 / 3.0, 2.0f64.sqrt(), 1e-300, 123456.789, 5e-324, 0.30000000000000004] {
            let s = float(v);
            assert_eq!(s.parse::<f64>().unwrap().to_bits(), v.to_bits(), "{s}");
        }
    }

    #[test]
    fn json_floats() {
        let mut buf = Vec::new();
        to_json(&serde_json::json!({"q": [0.5, 0.1], "m": 2}), &mut buf).unwrap();
        let s = String::from_utf8(buf).unwrap();
        assert!(s.contains("0.50000000000000000"), "{s}");
        assert!(s.contains("0.10000000000000001"), "{s}");
        let back: serde_json::Value = serde_json::from_str(&s).unwrap();
        assert_eq!(back["q"][1].as_f64(), Some(0.1));
    }
}
