use std::io::{self, Write};

use serde::Serialize;
use serde_json::ser::Formatter;
use serde_json::Value;

/// Compact JSON with every float written to 17 significant digits.
struct SignificantDigits;

impl Formatter for SignificantDigits {
    fn write_f64<W: ?Sized + Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        write!(writer, "{value:.16e}")
    }

    fn write_f32<W: ?Sized + Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        write!(writer, "{:.16e}", f64::from(value))
    }
}

pub fn to_json_bytes(value: &Value) -> Vec<u8> {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, SignificantDigits);
    value.serialize(&mut ser).expect("serializing to memory");
    buf.push(b'\n');
    buf
}

/// Finite floats as numbers, anything else as null.
pub fn num(v: f64) -> Value {
    serde_json::Number::from_f64(v).map_or(Value::Null, Value::Number)
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn seventeen_digits_and_round_trip() {
        let out = String::from_utf8(to_json_bytes(&json!({ "a": num(0.1), "b": 3, "c": num(f64::NAN) }))).unwrap();
        assert_eq!(out, "{\"a\":1.0000000000000001e-1,\"b\":3,\"c\":null}\n");
        let back: Value = serde_json::from_str(&out).unwrap();
        assert_eq!(back["a"].as_f64(), Some(0.1));
    }
}
