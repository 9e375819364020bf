//! Serialization helpers shared by the JSON reports.
//!
//! Coefficients are exact; anything that does not fit in 64 bits is written
//! as a decimal string so no consumer silently rounds it.

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde::Serializer;

pub fn bigint<S: Serializer>(value: &BigInt, ser: S) -> Result<S::Ok, S::Error> {
    match value.to_i64() {
        Some(v) => ser.serialize_i64(v),
        None => ser.serialize_str(&value.to_string()),
    }
}

pub fn bigint_opt<S: Serializer>(value: &Option<BigInt>, ser: S) -> Result<S::Ok, S::Error> {
    match value {
        Some(v) => bigint(v, ser),
        None => ser.serialize_none(),
    }
}

pub fn bigint_seq<S: Serializer>(values: &[BigInt], ser: S) -> Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = ser.serialize_seq(Some(values.len()))?;
    for v in values {
        seq.serialize_element(&Exact(v))?;
    }
    seq.end()
}

/// Wrapper that serializes a borrowed [`BigInt`] with [`bigint`].
pub struct Exact<'a>(pub &'a BigInt);

impl serde::Serialize for Exact<'_> {
    fn serialize<S: Serializer>(&self, ser: S) -> Result<S::Ok, S::Error> {
        bigint(self.0, ser)
    }
}
