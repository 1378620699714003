//! Canonical text form for exact rationals: always `p/q`, reduced, with
//! `q >= 1`. Parsing additionally accepts bare integers (`3` = `3/1`)
//! and decimal literals (`0.02` = `1/50`), which is what command lines
//! want to pass for tolerances.
//!
//! The `serialize`/`deserialize` pair plugs into serde field attributes
//! (`#[serde(with = "crate::qfmt")]`), so every rational in every JSON
//! report shares the one format.

use serde::{Deserialize, Deserializer, Serializer};

use crate::Q;

pub fn to_string(q: &Q) -> String {
    format!("{}/{}", q.numer(), q.denom())
}

pub fn parse(s: &str) -> Result<Q, String> {
    let s = s.trim();
    if let Some((num, den)) = s.split_once('/') {
        let n: i128 = num
            .trim()
            .parse()
            .map_err(|_| format!("bad numerator in '{s}'"))?;
        let d: i128 = den
            .trim()
            .parse()
            .map_err(|_| format!("bad denominator in '{s}'"))?;
        if d == 0 {
            return Err(format!("zero denominator in '{s}'"));
        }
        return Ok(Q::new(n, d));
    }
    if let Some((whole, frac)) = s.split_once('.') {
        let neg = whole.starts_with('-');
        let w: i128 = if whole.is_empty() || whole == "-" {
            0
        } else {
            whole.parse().map_err(|_| format!("bad number '{s}'"))?
        };
        if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return Err(format!("bad decimal '{s}'"));
        }
        if frac.len() > 30 {
            return Err(format!("decimal '{s}' has too many digits"));
        }
        let f: i128 = frac.parse().map_err(|_| format!("bad decimal '{s}'"))?;
        let scale = 10i128.pow(frac.len() as u32);
        let magnitude = Q::new(w.abs(), 1) + Q::new(f, scale);
        return Ok(if neg { -magnitude } else { magnitude });
    }
    let n: i128 = s.parse().map_err(|_| format!("bad number '{s}'"))?;
    Ok(Q::from_integer(n))
}

pub fn serialize<S: Serializer>(q: &Q, ser: S) -> Result<S::Ok, S::Error> {
    ser.serialize_str(&to_string(q))
}

pub fn deserialize<'de, D: Deserializer<'de>>(de: D) -> Result<Q, D::Error> {
    let s = String::deserialize(de)?;
    parse(&s).map_err(serde::de::Error::custom)
}
