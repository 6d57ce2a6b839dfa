//! Logical/physical stream-graph model.
//!
//! A topology describes one application: its operator graph, the composite
//! instances the operators are nested in, the partitioning of operators into
//! PEs, and the host pools the PEs may be placed on. Descriptors are
//! immutable after loading and can be shared read-only.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Topology-local PE identifier (unique within one application).
pub type PeId = u32;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "camelCase")]
pub struct OperatorInstance {
    pub name: String,
    #[serde(rename = "type")]
    pub operator_type: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub parent: Option<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub metrics: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "camelCase")]
pub struct CompositeInstance {
    pub name: String,
    #[serde(rename = "type")]
    pub composite_type: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub parent: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "camelCase")]
pub struct StreamConnection {
    pub from: String,
    pub to: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "camelCase")]
pub struct PePartition {
    pub id: PeId,
    pub operators: Vec<String>,
    pub host_pool: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "camelCase")]
pub struct HostPool {
    pub name: String,
    pub hosts: Vec<String>,
    #[serde(default)]
    pub exclusive: bool,
}

/// Export or import declaration. At least one of `stream_id` / `properties`
/// must be present.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "camelCase")]
pub struct StreamSpec {
    pub operator: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stream_id: Option<String>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub properties: BTreeMap<String, String>,
}

pub type ExportSpec = StreamSpec;
pub type ImportSpec = StreamSpec;

/// One application's logical graph plus its physical mapping.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "camelCase")]
pub struct TopologyDescriptor {
    pub name: String,
    pub operators: Vec<OperatorInstance>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub composites: Vec<CompositeInstance>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub streams: Vec<StreamConnection>,
    pub pes: Vec<PePartition>,
    pub host_pools: Vec<HostPool>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub exports: Vec<ExportSpec>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub imports: Vec<ImportSpec>,
}

/// Parses and validates a topology document.
pub fn load_topology(document: &str) -> Result<TopologyDescriptor> {
    let descriptor: TopologyDescriptor =
        serde_json::from_str(document).map_err(|e| Error::Parse(e.to_string()))?;
    descriptor.validate()?;
    Ok(descriptor)
}

impl TopologyDescriptor {
    /// Checks every structural invariant, naming the first violation found.
    pub fn validate(&self) -> Result<()> {
        let mut operator_names = BTreeSet::new();
        for op in &self.operators {
            if !operator_names.insert(op.name.as_str()) {
                return Err(Error::Validation(format!("duplicate operator {:?}", op.name)));
            }
        }
        let mut composite_names = BTreeSet::new();
        for c in &self.composites {
            if !composite_names.insert(c.name.as_str()) {
                return Err(Error::Validation(format!("duplicate composite {:?}", c.name)));
            }
        }
        for c in &self.composites {
            if let Some(parent) = &c.parent {
                if !composite_names.contains(parent.as_str()) {
                    return Err(Error::Validation(format!(
                        "composite {:?} names unknown parent composite {:?}",
                        c.name, parent
                    )));
                }
            }
        }
        // Parent chains must form a forest.
        for c in &self.composites {
            let mut seen = BTreeSet::new();
            let mut cur = Some(c.name.as_str());
            while let Some(name) = cur {
                if !seen.insert(name) {
                    return Err(Error::Validation(format!(
                        "composite cycle through {:?}",
                        name
                    )));
                }
                cur = self.composite(name).and_then(|ci| ci.parent.as_deref());
            }
        }
        for op in &self.operators {
            if let Some(parent) = &op.parent {
                if !composite_names.contains(parent.as_str()) {
                    return Err(Error::Validation(format!(
                        "operator {:?} names unknown parent composite {:?}",
                        op.name, parent
                    )));
                }
            }
            let mut metric_names = BTreeSet::new();
            for m in &op.metrics {
                if !metric_names.insert(m.as_str()) {
                    return Err(Error::Validation(format!(
                        "operator {:?} declares duplicate metric {:?}",
                        op.name, m
                    )));
                }
            }
        }
        for s in &self.streams {
            for endpoint in [&s.from, &s.to] {
                if !operator_names.contains(endpoint.as_str()) {
                    return Err(Error::Validation(format!(
                        "stream references unknown operator {:?}",
                        endpoint
                    )));
                }
            }
        }
        let mut pool_names = BTreeSet::new();
        for pool in &self.host_pools {
            if !pool_names.insert(pool.name.as_str()) {
                return Err(Error::Validation(format!("duplicate host pool {:?}", pool.name)));
            }
            if pool.hosts.is_empty() {
                return Err(Error::Validation(format!("empty host pool {:?}", pool.name)));
            }
        }
        let mut pe_ids = BTreeSet::new();
        let mut partitioned: BTreeMap<&str, PeId> = BTreeMap::new();
        for pe in &self.pes {
            if !pe_ids.insert(pe.id) {
                return Err(Error::Validation(format!("duplicate PE id {}", pe.id)));
            }
            if pe.operators.is_empty() {
                return Err(Error::Validation(format!("empty PE {}", pe.id)));
            }
            if !pool_names.contains(pe.host_pool.as_str()) {
                return Err(Error::Validation(format!(
                    "PE {} references unknown host pool {:?}",
                    pe.id, pe.host_pool
                )));
            }
            for op in &pe.operators {
                if !operator_names.contains(op.as_str()) {
                    return Err(Error::Validation(format!(
                        "PE {} references unknown operator {:?}",
                        pe.id, op
                    )));
                }
                if let Some(other) = partitioned.insert(op.as_str(), pe.id) {
                    return Err(Error::Validation(format!(
                        "partition overlap: operator {:?} in PE {} and PE {}",
                        op, other, pe.id
                    )));
                }
            }
        }
        for op in &self.operators {
            if !partitioned.contains_key(op.name.as_str()) {
                return Err(Error::Validation(format!(
                    "unpartitioned operator {:?}",
                    op.name
                )));
            }
        }
        for (label, specs) in [("export", &self.exports), ("import", &self.imports)] {
            for spec in specs {
                if !operator_names.contains(spec.operator.as_str()) {
                    return Err(Error::Validation(format!(
                        "{} references unknown operator {:?}",
                        label, spec.operator
                    )));
                }
                if spec.stream_id.is_none() && spec.properties.is_empty() {
                    return Err(Error::Validation(format!(
                        "empty {} spec on operator {:?}",
                        label, spec.operator
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn operator(&self, name: &str) -> Option<&OperatorInstance> {
        self.operators.iter().find(|o| o.name == name)
    }

    pub fn composite(&self, name: &str) -> Option<&CompositeInstance> {
        self.composites.iter().find(|c| c.name == name)
    }

    pub fn partition(&self, pe_id: PeId) -> Option<&PePartition> {
        self.pes.iter().find(|p| p.id == pe_id)
    }

    pub fn host_pool(&self, name: &str) -> Option<&HostPool> {
        self.host_pools.iter().find(|p| p.name == name)
    }

    /// Full parent chain of composite instance names for an operator,
    /// innermost first. Empty for top-level operators.
    pub fn transitive_composites(&self, operator_name: &str) -> Result<Vec<String>> {
        let op = self
            .operator(operator_name)
            .ok_or_else(|| Error::UnknownOperator(operator_name.to_string()))?;
        let mut chain = Vec::new();
        let mut cur = op.parent.as_deref();
        while let Some(name) = cur {
            chain.push(name.to_string());
            cur = self.composite(name).and_then(|c| c.parent.as_deref());
        }
        Ok(chain)
    }

    /// Composite-type names along an operator's parent chain, innermost first.
    pub fn transitive_composite_types(&self, operator_name: &str) -> Result<Vec<String>> {
        Ok(self
            .transitive_composites(operator_name)?
            .iter()
            .filter_map(|name| self.composite(name))
            .map(|c| c.composite_type.clone())
            .collect())
    }

    /// Operator names placed in the given PE, in lexicographic order.
    pub fn operators_in_pe(&self, pe_id: PeId) -> Result<Vec<String>> {
        let pe = self
            .partition(pe_id)
            .ok_or(Error::UnknownPe(pe_id as u64))?;
        let mut names = pe.operators.clone();
        names.sort();
        Ok(names)
    }

    /// Composite instances with at least one transitively contained operator
    /// in the given PE, in lexicographic order.
    pub fn composites_in_pe(&self, pe_id: PeId) -> Result<Vec<String>> {
        let pe = self
            .partition(pe_id)
            .ok_or(Error::UnknownPe(pe_id as u64))?;
        let mut result = BTreeSet::new();
        for op in &pe.operators {
            for c in self.transitive_composites(op)? {
                result.insert(c);
            }
        }
        Ok(result.into_iter().collect())
    }

    /// Innermost enclosing composite instance name, if any.
    pub fn enclosing_composite(&self, operator_name: &str) -> Result<Option<String>> {
        let op = self
            .operator(operator_name)
            .ok_or_else(|| Error::UnknownOperator(operator_name.to_string()))?;
        Ok(op.parent.clone())
    }

    /// Topology-local id of the PE holding the operator.
    pub fn pe_of_operator(&self, operator_name: &str) -> Result<PeId> {
        if self.operator(operator_name).is_none() {
            return Err(Error::UnknownOperator(operator_name.to_string()));
        }
        self.pes
            .iter()
            .find(|pe| pe.operators.iter().any(|o| o == operator_name))
            .map(|pe| pe.id)
            .ok_or_else(|| Error::UnknownOperator(operator_name.to_string()))
    }

    /// Serializes the descriptor back to its file form.
    pub fn to_document(&self) -> String {
        serde_json::to_string_pretty(self).expect("topology serialization cannot fail")
    }
}

/// Jobs whose export matches the import. A stream id matches by exact
/// equality; properties match when every import pair is present verbatim in
/// the export. Every constraint the import declares must hold. Job ids are
/// returned in input order, without duplicates.
pub fn match_exports(import: &ImportSpec, exports: &[(u64, ExportSpec)]) -> Vec<u64> {
    let mut matched = Vec::new();
    for (job, export) in exports {
        let stream_ok = match &import.stream_id {
            Some(id) => export.stream_id.as_deref() == Some(id.as_str()),
            None => true,
        };
        let props_ok = import
            .properties
            .iter()
            .all(|(k, v)| export.properties.get(k) == Some(v));
        if stream_ok && props_ok && (import.stream_id.is_some() || !import.properties.is_empty())
        {
            if !matched.contains(job) {
                matched.push(*job);
            }
        }
    }
    matched
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fixture() -> TopologyDescriptor {
        load_topology(include_str!("../fixtures/splitmerge.json")).unwrap()
    }

    #[test]
    fn test_fixture_shape() {
        let t = fixture();
        assert_eq!(t.operators.len(), 10);
        assert_eq!(t.composites.len(), 2);
        assert!(t.composites.iter().all(|c| c.composite_type == "composite1"));
        assert_eq!(t.pes.len(), 3);
    }

    #[test]
    fn test_round_trip_is_structurally_equal() {
        let t = fixture();
        let reloaded = load_topology(&t.to_document()).unwrap();
        assert_eq!(t, reloaded);
    }

    #[test]
    fn test_partition_overlap_rejected() {
        let mut t = fixture();
        t.pes[0].operators.push("op3'".to_string());
        let err = load_topology(&t.to_document()).unwrap_err();
        assert!(err.to_string().contains("partition overlap"), "{err}");
    }

    #[test]
    fn test_empty_pe_rejected() {
        let mut t = fixture();
        t.pes[2].operators.clear();
        // Drop the now-unpartitioned operators so the empty-PE check is what fires.
        let err = t.validate().unwrap_err();
        assert!(err.to_string().contains("empty PE"), "{err}");
    }

    #[test]
    fn test_unknown_keys_rejected() {
        let err = load_topology(r#"{"name":"x","operators":[],"pes":[],"hostPools":[],"bogus":1}"#)
            .unwrap_err();
        assert!(matches!(err, Error::Parse(_)));
    }

    #[test]
    fn test_transitive_composites() {
        let t = fixture();
        assert_eq!(t.transitive_composites("op4'").unwrap(), vec!["composite1'"]);
        assert_eq!(t.transitive_composites("op1").unwrap(), Vec::<String>::new());
        assert!(matches!(
            t.transitive_composites("nope"),
            Err(Error::UnknownOperator(_))
        ));
    }

    #[test]
    fn test_nested_composite_chain() {
        let doc = r#"{
            "name": "nested",
            "operators": [{"name": "op", "type": "Worker", "parent": "A"}],
            "composites": [
                {"name": "B", "type": "outer"},
                {"name": "A", "type": "inner", "parent": "B"}
            ],
            "pes": [{"id": 1, "operators": ["op"], "hostPool": "pool"}],
            "hostPools": [{"name": "pool", "hosts": ["h1"]}]
        }"#;
        let t = load_topology(doc).unwrap();
        assert_eq!(t.transitive_composites("op").unwrap(), vec!["A", "B"]);
        assert_eq!(t.transitive_composite_types("op").unwrap(), vec!["inner", "outer"]);
    }

    #[test]
    fn test_composite_cycle_rejected() {
        let doc = r#"{
            "name": "cyclic",
            "operators": [{"name": "op", "type": "Worker", "parent": "A"}],
            "composites": [
                {"name": "A", "type": "t", "parent": "B"},
                {"name": "B", "type": "t", "parent": "A"}
            ],
            "pes": [{"id": 1, "operators": ["op"], "hostPool": "pool"}],
            "hostPools": [{"name": "pool", "hosts": ["h1"]}]
        }"#;
        let err = load_topology(doc).unwrap_err();
        assert!(err.to_string().contains("composite cycle"), "{err}");
    }

    #[test]
    fn test_operators_in_pe() {
        let t = fixture();
        assert_eq!(
            t.operators_in_pe(2).unwrap(),
            vec!["op4'", "op4''", "op5'", "op5''", "op6'", "op6''"]
        );
        assert_eq!(t.operators_in_pe(3).unwrap(), vec!["op3'", "op3''"]);
        assert!(matches!(t.operators_in_pe(99), Err(Error::UnknownPe(99))));
    }

    #[test]
    fn test_composites_in_pe() {
        let t = fixture();
        assert_eq!(
            t.composites_in_pe(2).unwrap(),
            vec!["composite1'", "composite1''"]
        );
        assert_eq!(t.composites_in_pe(1).unwrap(), Vec::<String>::new());
        assert_eq!(
            t.composites_in_pe(3).unwrap(),
            vec!["composite1'", "composite1''"]
        );
    }

    #[test]
    fn test_enclosing_composite() {
        let t = fixture();
        assert_eq!(
            t.enclosing_composite("op6''").unwrap(),
            Some("composite1''".to_string())
        );
        assert_eq!(t.enclosing_composite("op2").unwrap(), None);
        assert!(t.enclosing_composite("nope").is_err());
    }

    #[test]
    fn test_pe_of_operator() {
        let t = fixture();
        assert_eq!(t.pe_of_operator("op5'").unwrap(), 2);
        assert_eq!(t.pe_of_operator("op1").unwrap(), 1);
        assert!(matches!(
            t.pe_of_operator("ghost"),
            Err(Error::UnknownOperator(_))
        ));
    }

    #[test]
    fn test_pe_queries_mutually_consistent() {
        let t = fixture();
        for op in &t.operators {
            let pe = t.pe_of_operator(&op.name).unwrap();
            assert!(t.operators_in_pe(pe).unwrap().contains(&op.name));
        }
    }

    fn export(op: &str, stream_id: Option<&str>, props: &[(&str, &str)]) -> ExportSpec {
        StreamSpec {
            operator: op.to_string(),
            stream_id: stream_id.map(str::to_string),
            properties: props
                .iter()
                .map(|(k, v)| (k.to_string(), v.to_string()))
                .collect(),
        }
    }

    #[test]
    fn test_match_exports_by_stream_id() {
        let import = export("in", Some("profiles"), &[]);
        let exports = vec![(7, export("out", Some("profiles"), &[]))];
        assert_eq!(match_exports(&import, &exports), vec![7]);
        assert!(match_exports(&import, &[]).is_empty());
    }

    #[test]
    fn test_match_exports_property_subset() {
        let import = export("in", None, &[("topic", "iphone")]);
        let exports = vec![
            (1, export("out", None, &[("topic", "iphone"), ("lang", "en")])),
            (2, export("out", None, &[("topic", "android")])),
        ];
        assert_eq!(match_exports(&import, &exports), vec![1]);
    }

    #[test]
    fn test_match_exports_multiple_jobs() {
        let import = export("in", Some("x"), &[]);
        let exports = vec![
            (1, export("a", Some("x"), &[])),
            (2, export("b", Some("x"), &[])),
        ];
        assert_eq!(match_exports(&import, &exports), vec![1, 2]);
    }
}
