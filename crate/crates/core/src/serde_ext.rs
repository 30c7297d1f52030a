//! Serde adapters for values JSON cannot express natively.

/// `f64` that may be infinite or NaN, written as a number when finite and as
/// the strings `"inf"`, `"-inf"` or `"nan"` otherwise.
pub mod extended_f64 {
    use serde::de::{self, Visitor};
    use serde::{Deserializer, Serializer};
    use std::fmt;

    pub fn serialize<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
        if x.is_finite() {
            s.serialize_f64(*x)
        } else {
            s.serialize_str(&format_extended(*x))
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        d.deserialize_any(ExtendedVisitor)
    }

    pub fn format_extended(x: f64) -> String {
        if x.is_nan() {
            "nan".into()
        } else if x == f64::INFINITY {
            "inf".into()
        } else if x == f64::NEG_INFINITY {
            "-inf".into()
        } else {
            x.to_string()
        }
    }

    struct ExtendedVisitor;

    impl Visitor<'_> for ExtendedVisitor {
        type Value = f64;

        fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
            f.write_str("a number or one of \"inf\", \"-inf\", \"nan\"")
        }

        fn visit_f64<E: de::Error>(self, v: f64) -> Result<f64, E> {
            Ok(v)
        }

        fn visit_i64<E: de::Error>(self, v: i64) -> Result<f64, E> {
            Ok(v as f64)
        }

        fn visit_u64<E: de::Error>(self, v: u64) -> Result<f64, E> {
            Ok(v as f64)
        }

        fn visit_str<E: de::Error>(self, v: &str) -> Result<f64, E> {
            match v {
                "inf" | "+inf" | "Infinity" => Ok(f64::INFINITY),
                "-inf" | "-Infinity" => Ok(f64::NEG_INFINITY),
                "nan" | "NaN" => Ok(f64::NAN),
                other => other.parse().map_err(|_| E::invalid_value(de::Unexpected::Str(other), &self)),
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use serde::{Deserialize, Serialize};

    #[derive(Serialize, Deserialize, PartialEq, Debug)]
    struct Wrap {
        #[serde(with = "super::extended_f64")]
        x: f64,
    }

    #[test]
    fn round_trip() {
        for x in [0.1, -3.5e-300, 1.0 / 3.0, f64::INFINITY, f64::NEG_INFINITY] {
            let json = serde_json::to_string(&Wrap { x }).unwrap();
            let back: Wrap = serde_json::from_str(&json).unwrap();
            assert_eq!(back.x.to_bits(), x.to_bits());
        }
        assert_eq!(serde_json::to_string(&Wrap { x: f64::INFINITY }).unwrap(), r#"{"x":"inf"}"#);
    }
}
