//! Versioned JSON records for computed quantities.

use serde::Serialize;

use crate::set::RatSet;

pub const RECORD_SCHEMA: &str = "sumprod.record/1";

/// One computed quantity with the digests of its inputs.
#[derive(Clone, Debug, Serialize)]
pub struct Record<T: Serialize> {
    pub schema: &'static str,
    pub operation: String,
    pub inputs_digest: Vec<String>,
    pub value: T,
    /// Budgets that capped the computation, if any.
    pub budget_flags: Vec<String>,
}

impl<T: Serialize> Record<T> {
    pub fn new(operation: &str, inputs: &[&RatSet], value: T) -> Self {
        Record {
            schema: RECORD_SCHEMA,
            operation: operation.to_string(),
            inputs_digest: inputs.iter().map(|s| s.digest()).collect(),
            value,
            budget_flags: Vec::new(),
        }
    }

    pub fn flag(mut self, flag: impl Into<String>) -> Self {
        self.budget_flags.push(flag.into());
        self
    }

    pub fn to_json(&self) -> String {
        to_json(self)
    }
}

/// Pretty JSON with a trailing newline; field order is declaration order,
/// so output is byte-stable.
pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report types serialize");
    s.push('\n');
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::energy::additive_energy;

    #[test]
    fn energy_record_shape() {
        let a = RatSet::from_ints([1, 2, 3]);
        let e = additive_energy(&a, &a).unwrap();
        let r = Record::new("additive_energy", &[&a], e);
        let v: serde_json::Value = serde_json::from_str(&r.to_json()).unwrap();
        assert_eq!(v["schema"], RECORD_SCHEMA);
        assert_eq!(v["value"], "19");
        assert_eq!(v["inputs_digest"][0], a.digest());
    }
}
