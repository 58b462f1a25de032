//! Locale-free 17-significant-digit number formatting for CSV and JSON output.

use serde::{Serialize, Serializer};

/// `x` with 17 significant digits, e.g. `1.0000000000000000e0`.
pub fn sig17(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else if x.is_nan() {
        "NaN".into()
    } else if x > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

/// Serializes an `f64` through [`sig17`] as a raw JSON number.
#[derive(Clone, Copy, Debug)]
pub struct Sig17(pub f64);

impl Serialize for Sig17 {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        if !self.0.is_finite() {
            return s.serialize_none();
        }
        let raw = serde_json::value::RawValue::from_string(sig17(self.0))
            .map_err(serde::ser::Error::custom)?;
        raw.serialize(s)
    }
}

pub fn csv_row(values: &[f64]) -> String {
    values.iter().map(|&v| sig17(v)).collect::<Vec<_>>().join(",")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trips() {
        for x in [0.1, 1.0 / 3.0, -2.5e-17, 6.02214076e23, 0.0] {
            let s = sig17(x);
            assert_eq!(s.parse::<f64>().unwrap(), x);
        }
        let j = serde_json::to_string(&[Sig17(0.5)]).unwrap();
        assert_eq!(j, "[5.0000000000000000e-1]");
        let back: Vec<f64> = serde_json::from_str(&j).unwrap();
        assert_eq!(back, vec![0.5]);
    }
}
