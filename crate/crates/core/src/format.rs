//! Stable numeric formatting for CSV and JSON outputs.

/// Significant digits carried by every emitted number.
pub const SIGNIFICANT_DIGITS: usize = 12;

/// `%.12g`-style rendering: shortest of fixed or scientific, trailing zeros trimmed.
pub fn fmt_sig(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{:.*e}", SIGNIFICANT_DIGITS - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("exponent");
    if exp < -5 || exp >= SIGNIFICANT_DIGITS as i32 {
        format!("{}e{}", trim_zeros(mantissa), exp)
    } else {
        let decimals = (SIGNIFICANT_DIGITS as i32 - 1 - exp).max(0) as usize;
        trim_zeros(&format!("{:.*}", decimals, x)).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// Rounds to [`SIGNIFICANT_DIGITS`]; non-finite values become `None` (JSON null).
pub fn round_sig(x: f64) -> Option<f64> {
    x.is_finite()
        .then(|| fmt_sig(x).parse().expect("formatted float parses"))
}

/// Recursively rounds every number in a JSON value.
pub fn round_json(value: &mut serde_json::Value) {
    use serde_json::Value;
    match value {
        Value::Number(num) => {
            if let Some(f) = num.as_f64().filter(|_| !num.is_i64() && !num.is_u64()) {
                *value = round_sig(f)
                    .and_then(serde_json::Number::from_f64)
                    .map_or(Value::Null, Value::Number);
            }
        }
        Value::Array(items) => items.iter_mut().for_each(round_json),
        Value::Object(map) => map.values_mut().for_each(round_json),
        _ => {}
    }
}
