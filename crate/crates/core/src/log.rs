//! Append-only run log.
//!
//! Every dispatched event, actuation, external action, and error produces
//! exactly one record. Records serialize as JSON Lines with sorted keys and
//! integer-millisecond timestamps, so a run's log is byte-stable and can be
//! compared against committed golden files.

use serde_json::{Map, Value};

use crate::time::TimeMs;

/// Flat attribute map of one record. `serde_json::Map` keeps keys sorted.
pub type FieldMap = Map<String, Value>;

#[derive(Debug, Clone, PartialEq)]
pub struct Record {
    pub t: TimeMs,
    pub seq: u64,
    pub kind: String,
    pub fields: FieldMap,
}

impl Record {
    /// Serializes to one JSON object with `kind`, `seq`, `t` merged into the
    /// field map. Field names never collide with the built-in three.
    pub fn to_json(&self) -> String {
        let mut map = self.fields.clone();
        map.insert("kind".into(), self.kind.as_str().into());
        map.insert("seq".into(), self.seq.into());
        map.insert("t".into(), self.t.into());
        serde_json::to_string(&Value::Object(map)).expect("record serialization cannot fail")
    }
}

/// In-memory record sink for one run.
#[derive(Debug, Default)]
pub struct EventLog {
    records: Vec<Record>,
    next_seq: u64,
}

impl EventLog {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, t: TimeMs, kind: &str, fields: FieldMap) {
        let seq = self.next_seq;
        self.next_seq += 1;
        self.records.push(Record {
            t,
            seq,
            kind: kind.to_string(),
            fields,
        });
    }

    pub fn records(&self) -> &[Record] {
        &self.records
    }

    /// Records of one kind, in order.
    pub fn of_kind<'a>(&'a self, kind: &'a str) -> impl Iterator<Item = &'a Record> {
        self.records.iter().filter(move |r| r.kind == kind)
    }

    /// Full log as JSON Lines.
    pub fn to_jsonl(&self) -> String {
        let mut out = String::new();
        for r in &self.records {
            out.push_str(&r.to_json());
            out.push('\n');
        }
        out
    }
}

/// Builds a [`FieldMap`] from `key => value` pairs.
#[macro_export]
macro_rules! fields {
    ($($key:expr => $value:expr),* $(,)?) => {{
        #[allow(unused_mut)]
        let mut map = $crate::log::FieldMap::new();
        $(map.insert($key.to_string(), ::serde_json::Value::from($value));)*
        map
    }};
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn test_record_keys_are_sorted() {
        let mut log = EventLog::new();
        log.push(1_000, "event", fields! {"zebra" => 1, "alpha" => "x"});
        let line = &log.to_jsonl();
        assert_eq!(
            line.trim(),
            r#"{"alpha":"x","kind":"event","seq":0,"t":1000,"zebra":1}"#
        );
    }

    #[test]
    fn test_sequence_numbers_increase() {
        let mut log = EventLog::new();
        log.push(0, "a", FieldMap::new());
        log.push(0, "b", FieldMap::new());
        assert_eq!(log.records()[0].seq, 0);
        assert_eq!(log.records()[1].seq, 1);
    }
}
