use std::fmt::Write as _;

use serde::Serialize;
use serde_json::Value;

use super::knee::KneeTimeSeries;
use crate::synth::Side;

/// Significant digits kept in text output.
pub const SIG_DIGITS: usize = 9;

/// `x` rounded to [`SIG_DIGITS`] significant digits. Non-finite values pass
/// through.
pub fn round_sig(x: f64) -> f64 {
    if !x.is_finite() {
        return x;
    }
    format!("{:.*e}", SIG_DIGITS - 1, x).parse().unwrap_or(x)
}

fn round_value(v: &mut Value) {
    match v {
        Value::Number(n) => {
            if n.is_f64() {
                if let Some(x) = n.as_f64() {
                    if let Some(r) = serde_json::Number::from_f64(round_sig(x)) {
                        *n = r;
                    }
                }
            }
        }
        Value::Array(a) => a.iter_mut().for_each(round_value),
        Value::Object(o) => o.values_mut().for_each(round_value),
        _ => {}
    }
}

/// Pretty JSON with every float rounded to [`SIG_DIGITS`] digits.
pub fn to_json_rounded<T: Serialize>(value: &T) -> serde_json::Result<String> {
    let mut v = serde_json::to_value(value)?;
    round_value(&mut v);
    let mut s = serde_json::to_string_pretty(&v)?;
    s.push('\n');
    Ok(s)
}

/// CSV with columns `frame,posture,side,K,H,K_abs,K_rms`, left before right.
pub fn knee_series_csv(series: &KneeTimeSeries) -> String {
    let mut out = String::from("frame,posture,side,K,H,K_abs,K_rms\n");
    for f in &series.frames {
        let posture = f.label.map_or_else(|| "-".to_string(), |l| l.to_string());
        for side in Side::BOTH {
            let m = &f.means[side.index()];
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{}",
                f.frame,
                posture,
                side,
                round_sig(m.gaussian),
                round_sig(m.mean),
                round_sig(m.absolute),
                round_sig(m.rms)
            );
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rounding() {
        assert_eq!(round_sig(1.234_567_891_234), 1.234_567_89);
        assert_eq!(round_sig(-0.000_123_456_789_87), -0.000_123_456_790);
        assert_eq!(round_sig(0.0), 0.0);
        assert!(round_sig(f64::NAN).is_nan());
    }

    #[test]
    fn json_rounds_nested_floats() {
        let s = to_json_rounded(&serde_json::json!({"a": [1.000_000_000_4, 2], "b": {"c": 0.1}})).unwrap();
        assert!(s.contains("1.0") && !s.contains("1.0000000004"));
        assert!(s.contains("0.1") && s.contains('2'));
    }
}
