//! Text format for PMFs.
//!
//! ```text
//! q=<q> backend=<exact|float> mantissa=<bits>
//! <index> <value>
//! ```
//!
//! One line per residue `0..q`. Exact values are written `num/den` in lowest
//! terms, float values as normalised hexadecimal floats (`0x1.8p-3`), which
//! round-trip bit for bit. The mantissa field is `0` for exact files.

use std::fmt::Write as _;
use std::path::Path;

use rug::{Float, Integer, Rational};

use super::{Backend, Pmf, Weights};
use crate::{Error, Result};

pub fn render_pmf(pmf: &Pmf) -> String {
    let mut out = String::new();
    match &pmf.weights {
        Weights::Exact(w) => {
            writeln!(out, "q={} backend=exact mantissa=0", pmf.q).unwrap();
            for (i, x) in w.iter().enumerate() {
                writeln!(out, "{i} {}/{}", x.numer(), x.denom()).unwrap();
            }
        }
        Weights::Float { prec, w } => {
            writeln!(out, "q={} backend=float mantissa={prec}", pmf.q).unwrap();
            for (i, x) in w.iter().enumerate() {
                writeln!(out, "{i} {}", hex_float(x)).unwrap();
            }
        }
    }
    out
}

pub fn write_pmf(pmf: &Pmf, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, render_pmf(pmf)).map_err(|e| Error::io(path, e))
}

pub fn read_pmf(path: impl AsRef<Path>) -> Result<Pmf> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_pmf(&text)
}

pub fn parse_pmf(text: &str) -> Result<Pmf> {
    let mut lines = text.lines();
    let header = lines.next().ok_or_else(|| perr("empty PMF file"))?;
    let (q, backend) = parse_header(header)?;
    let mut seen = 0usize;
    let mut exact = Vec::new();
    let mut float = Vec::new();
    for line in lines.filter(|l| !l.trim().is_empty()) {
        let (idx, value) = line
            .trim()
            .split_once(' ')
            .ok_or_else(|| perr(&format!("malformed line {line:?}")))?;
        let idx: usize = idx.parse().map_err(|_| perr(&format!("bad index {idx:?}")))?;
        if idx != seen {
            return Err(perr(&format!("expected index {seen}, found {idx}")));
        }
        seen += 1;
        match backend {
            Backend::Exact => exact.push(parse_rational(value)?),
            Backend::Float(prec) => float.push(parse_hex_float(value, prec)?),
        }
    }
    if seen != q as usize {
        return Err(perr(&format!("expected {q} entries, found {seen}")));
    }
    match backend {
        Backend::Exact => Pmf::from_rationals(q, exact),
        Backend::Float(_) => Pmf::from_floats(q, float),
    }
}

fn perr(msg: &str) -> Error {
    Error::Parse(format!("PMF file: {msg}"))
}

fn parse_header(line: &str) -> Result<(u32, Backend)> {
    let mut q = None;
    let mut kind = None;
    let mut mantissa = None;
    for field in line.split_whitespace() {
        let (key, value) = field
            .split_once('=')
            .ok_or_else(|| perr(&format!("bad header field {field:?}")))?;
        match key {
            "q" => q = value.parse::<u32>().ok(),
            "backend" => kind = Some(value.to_owned()),
            "mantissa" => mantissa = value.parse::<u32>().ok(),
            _ => return Err(perr(&format!("unknown header key {key:?}"))),
        }
    }
    let q = q.filter(|&q| q >= 2).ok_or_else(|| perr("missing or invalid q"))?;
    let mantissa = mantissa.ok_or_else(|| perr("missing mantissa"))?;
    let backend = match kind.as_deref() {
        Some("exact") => Backend::Exact,
        Some("float") if mantissa >= 2 => Backend::Float(mantissa),
        _ => return Err(perr("backend must be exact or float")),
    };
    Ok((q, backend))
}

fn parse_rational(s: &str) -> Result<Rational> {
    let bad = || perr(&format!("bad rational {s:?}"));
    let (n, d) = s.split_once('/').unwrap_or((s, "1"));
    let n: Integer = n.parse().map_err(|_| bad())?;
    let d: Integer = d.parse().map_err(|_| bad())?;
    if d <= 0 {
        return Err(bad());
    }
    Ok(Rational::from((n, d)))
}

/// Normalised hexadecimal rendering `0x1.<hex>p<exp>`; zero is `0x0p+0`.
pub(crate) fn hex_float(x: &Float) -> String {
    let (mut m, mut exp) = x.to_integer_exp().expect("finite weight");
    if m == 0 {
        return "0x0p+0".to_owned();
    }
    let sign = if m < 0 { "-" } else { "" };
    m.abs_mut();
    let tz = m.find_one(0).expect("nonzero");
    m >>= tz;
    exp += tz as i32;
    let bits = m.significant_bits();
    let frac_bits = bits - 1;
    let e = exp + frac_bits as i32;
    if frac_bits == 0 {
        return format!("{sign}0x1p{e:+}");
    }
    let digits = frac_bits.div_ceil(4);
    let frac = (m - (Integer::from(1) << frac_bits)) << (4 * digits - frac_bits);
    let hex = format!("{frac:x}");
    format!("{sign}0x1.{hex:0>width$}p{e:+}", width = digits as usize)
}

pub(crate) fn parse_hex_float(s: &str, prec: u32) -> Result<Float> {
    let bad = || perr(&format!("bad hex float {s:?}"));
    let (neg, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s),
    };
    let body = body.strip_prefix("0x").ok_or_else(bad)?;
    let (mant, exp) = body.split_once('p').ok_or_else(bad)?;
    let exp: i64 = exp.parse().map_err(|_| bad())?;
    let (int, frac) = mant.split_once('.').unwrap_or((mant, ""));
    let digits = format!("{int}{frac}");
    let m = Integer::from_str_radix(&digits, 16).map_err(|_| bad())?;
    let padding = m.find_one(0).unwrap_or(0);
    if m.significant_bits() - padding > prec {
        return Err(perr(&format!("{s:?} needs more than {prec} mantissa bits")));
    }
    let shift = exp - 4 * frac.len() as i64;
    let shift = i32::try_from(shift).map_err(|_| bad())?;
    let mut f = Float::with_val(prec, m);
    f <<= shift;
    if neg {
        f = -f;
    }
    Ok(f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pmf::pmf_cbd;

    #[test]
    fn hex_float_rendering() {
        assert_eq!(hex_float(&Float::with_val(64, 0.1875)), "0x1.8p-3");
        assert_eq!(hex_float(&Float::with_val(64, 1)), "0x1p+0");
        assert_eq!(hex_float(&Float::with_val(64, 0)), "0x0p+0");
        assert_eq!(hex_float(&Float::with_val(64, -5)), "-0x1.4p+2");
        let x = Float::with_val(64, 0.1875);
        assert_eq!(parse_hex_float("0x1.8p-3", 64).unwrap(), x);
    }

    #[test]
    fn hex_round_trip_is_bitwise() {
        let third = Float::with_val(1024, 1) / 3u32;
        let tiny = Float::with_val(1024, Float::i_exp(3, -40000)) / 7u32;
        for x in [third, tiny] {
            let back = parse_hex_float(&hex_float(&x), 1024).unwrap();
            assert_eq!(back, x);
        }
    }

    #[test]
    fn file_round_trip() {
        let e = pmf_cbd(2, 17, Backend::Exact).unwrap();
        let text = render_pmf(&e);
        assert!(text.starts_with("q=17 backend=exact mantissa=0\n0 3/8\n1 1/4\n"));
        assert_eq!(parse_pmf(&text).unwrap(), e);
        let f = e.to_backend(Backend::Float(300));
        let f = crate::pmf::convolve(&f, &Pmf::uniform(17, Backend::Float(300))).unwrap();
        assert_eq!(parse_pmf(&render_pmf(&f)).unwrap(), f);
    }

    #[test]
    fn malformed_files_rejected() {
        assert!(parse_pmf("").is_err());
        assert!(parse_pmf("q=3 backend=exact mantissa=0\n0 1/2\n1 1/2\n").is_err());
        assert!(parse_pmf("q=2 backend=exact mantissa=0\n0 1/2\n2 1/2\n").is_err());
        assert!(parse_pmf("q=2 backend=exact mantissa=0\n0 1/2\n1 1/3\n").is_err());
        assert!(parse_pmf("q=2 backend=odd mantissa=0\n0 1/2\n1 1/2\n").is_err());
        assert!(parse_pmf("q=2 backend=exact mantissa=0 extra=1\n0 1/2\n1 1/2\n").is_err());
    }
}
