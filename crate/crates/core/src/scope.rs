//! Event scopes: typed, filtered event-interest registrations.
//!
//! The orchestrator delivers an event when it matches at least one registered
//! subscope. Filter values on the same attribute are disjunctive; filters on
//! different attributes are conjunctive. An empty filter is a wildcard.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::event::EventKind;

/// A typed event-interest declaration with attribute filters.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "camelCase")]
pub struct Subscope {
    pub key: String,
    pub kind: EventKind,
    #[serde(default, skip_serializing_if = "BTreeSet::is_empty")]
    pub applications: BTreeSet<String>,
    #[serde(default, skip_serializing_if = "BTreeSet::is_empty")]
    pub composite_types: BTreeSet<String>,
    #[serde(default, skip_serializing_if = "BTreeSet::is_empty")]
    pub operator_types: BTreeSet<String>,
    #[serde(default, skip_serializing_if = "BTreeSet::is_empty")]
    pub metrics: BTreeSet<String>,
}

impl Subscope {
    pub fn new(key: impl Into<String>, kind: EventKind) -> Self {
        Subscope {
            key: key.into(),
            kind,
            applications: BTreeSet::new(),
            composite_types: BTreeSet::new(),
            operator_types: BTreeSet::new(),
            metrics: BTreeSet::new(),
        }
    }

    pub fn with_application(mut self, app: impl Into<String>) -> Self {
        self.applications.insert(app.into());
        self
    }

    pub fn with_composite_type(mut self, t: impl Into<String>) -> Self {
        self.composite_types.insert(t.into());
        self
    }

    pub fn with_operator_type(mut self, t: impl Into<String>) -> Self {
        self.operator_types.insert(t.into());
        self
    }

    pub fn with_metric(mut self, m: impl Into<String>) -> Self {
        self.metrics.insert(m.into());
        self
    }

    /// Checks key and filter legality for the subscope kind.
    pub fn validate(&self) -> Result<()> {
        if self.key.is_empty() {
            return Err(Error::EmptyKey);
        }
        let illegal = |filter: &str| Error::IllegalFilterForKind {
            kind: self.kind.name().to_string(),
            filter: filter.to_string(),
        };
        if !self.metrics.is_empty() && !self.kind.is_metric() {
            return Err(illegal("metricName"));
        }
        let structural_ok = match self.kind {
            EventKind::OperatorMetric | EventKind::OperatorPortMetric => true,
            EventKind::PeMetric | EventKind::PeFailure => {
                cfg!(feature = "pe-structural-filters")
            }
            _ => false,
        };
        if !self.composite_types.is_empty() && !structural_ok {
            return Err(illegal("compositeType"));
        }
        if !self.operator_types.is_empty() && !structural_ok {
            return Err(illegal("operatorType"));
        }
        if !self.applications.is_empty()
            && matches!(self.kind, EventKind::Timer | EventKind::UserEvent | EventKind::Start)
        {
            return Err(illegal("application"));
        }
        Ok(())
    }
}

/// Validates a subscope specification, returning it ready for registration.
pub fn build_subscope(spec: Subscope) -> Result<Subscope> {
    spec.validate()?;
    Ok(spec)
}

/// The attribute slice of one event, as seen by the matcher. Attributes that
/// do not apply to the event's kind are `None` / empty.
#[derive(Debug, Default, Clone)]
pub struct EventShape<'a> {
    pub kind: EventKind,
    pub app: Option<&'a str>,
    pub operator_type: Option<&'a str>,
    pub metric: Option<&'a str>,
    /// Composite types enclosing the event's operator, innermost first.
    pub enclosing_composite_types: Vec<String>,
    pub timer_key: Option<&'a str>,
    /// Operator types contained in the event's PE (PE-scoped kinds only).
    #[cfg(feature = "pe-structural-filters")]
    pub pe_operator_types: Vec<String>,
    /// Composite types with an operator in the event's PE (PE-scoped kinds only).
    #[cfg(feature = "pe-structural-filters")]
    pub pe_composite_types: Vec<String>,
}

/// True iff the event matches the subscope: kinds are equal and, for every
/// non-empty filter, the event's attribute value belongs to the filter set.
pub fn matches(subscope: &Subscope, shape: &EventShape<'_>) -> bool {
    if shape.kind != subscope.kind {
        return false;
    }
    if shape.kind == EventKind::Timer {
        // A timer subscope is keyed to the timers it was registered for.
        return shape.timer_key == Some(subscope.key.as_str());
    }
    if !subscope.applications.is_empty() {
        match shape.app {
            Some(app) if subscope.applications.contains(app) => {}
            _ => return false,
        }
    }
    if !subscope.metrics.is_empty() {
        match shape.metric {
            Some(m) if subscope.metrics.contains(m) => {}
            _ => return false,
        }
    }
    if !subscope.operator_types.is_empty() && !operator_type_satisfied(subscope, shape) {
        return false;
    }
    if !subscope.composite_types.is_empty() && !composite_type_satisfied(subscope, shape) {
        return false;
    }
    true
}

fn operator_type_satisfied(subscope: &Subscope, shape: &EventShape<'_>) -> bool {
    if let Some(t) = shape.operator_type {
        return subscope.operator_types.contains(t);
    }
    #[cfg(feature = "pe-structural-filters")]
    if !shape.pe_operator_types.is_empty() {
        return shape
            .pe_operator_types
            .iter()
            .any(|t| subscope.operator_types.contains(t));
    }
    false
}

fn composite_type_satisfied(subscope: &Subscope, shape: &EventShape<'_>) -> bool {
    if shape
        .enclosing_composite_types
        .iter()
        .any(|t| subscope.composite_types.contains(t))
    {
        return true;
    }
    #[cfg(feature = "pe-structural-filters")]
    if shape
        .pe_composite_types
        .iter()
        .any(|t| subscope.composite_types.contains(t))
    {
        return true;
    }
    false
}

/// Ordered collection of registered subscopes. Registration order is
/// preserved and drives the order of matched keys at delivery time.
#[derive(Debug, Default)]
pub struct ScopeRegistry {
    subscopes: Vec<Subscope>,
}

impl ScopeRegistry {
    pub fn new() -> Self {
        Self::default()
    }

    /// Registers a subscope. Keys must be unique for the orchestrator
    /// lifetime; there is no unregistration.
    pub fn register(&mut self, subscope: Subscope) -> Result<()> {
        subscope.validate()?;
        if self.subscopes.iter().any(|s| s.key == subscope.key) {
            return Err(Error::DuplicateKey(subscope.key));
        }
        self.subscopes.push(subscope);
        Ok(())
    }

    /// Keys of all subscopes matching the event, in registration order.
    pub fn match_keys(&self, shape: &EventShape<'_>) -> Vec<String> {
        self.subscopes
            .iter()
            .filter(|s| matches(s, shape))
            .map(|s| s.key.clone())
            .collect()
    }

    pub fn is_empty(&self) -> bool {
        self.subscopes.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Subscope> {
        self.subscopes.iter()
    }
}
