//! Events and their contexts.
//!
//! Each event carries the minimal context needed to characterize it and to
//! query the topology it relates to. Metric events carry an epoch value that
//! groups measurements from the same collection round; failure events carry
//! an epoch that groups notifications caused by the same physical incident.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::log::FieldMap;
use crate::sim::{FailureReason, PeInstanceId};
use crate::time::TimeMs;

pub type JobId = u64;
pub type Epoch = u64;

/// Kinds of events the orchestrator can deliver. `Start` is always in scope;
/// all other kinds require a matching subscope registration.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Default, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum EventKind {
    #[default]
    Start,
    OperatorMetric,
    PeMetric,
    OperatorPortMetric,
    PeFailure,
    JobSubmitted,
    JobCancelled,
    Timer,
    UserEvent,
}

impl EventKind {
    pub fn name(&self) -> &'static str {
        match self {
            EventKind::Start => "start",
            EventKind::OperatorMetric => "operator_metric",
            EventKind::PeMetric => "pe_metric",
            EventKind::OperatorPortMetric => "operator_port_metric",
            EventKind::PeFailure => "pe_failure",
            EventKind::JobSubmitted => "job_submitted",
            EventKind::JobCancelled => "job_cancelled",
            EventKind::Timer => "timer",
            EventKind::UserEvent => "user_event",
        }
    }

    pub fn is_metric(&self) -> bool {
        matches!(
            self,
            EventKind::OperatorMetric | EventKind::PeMetric | EventKind::OperatorPortMetric
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum PortDirection {
    Input,
    Output,
}

impl PortDirection {
    pub fn name(&self) -> &'static str {
        match self {
            PortDirection::Input => "input",
            PortDirection::Output => "output",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StartContext {
    pub start_time: TimeMs,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OperatorMetricContext {
    pub job: JobId,
    pub app: String,
    pub instance_name: String,
    pub metric: String,
    pub value: i64,
    pub epoch: Epoch,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PeMetricContext {
    pub job: JobId,
    pub app: String,
    pub pe_instance: PeInstanceId,
    pub metric: String,
    pub value: i64,
    pub epoch: Epoch,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OperatorPortMetricContext {
    pub job: JobId,
    pub app: String,
    pub operator: String,
    pub port: u32,
    pub direction: PortDirection,
    pub metric: String,
    pub value: i64,
    pub epoch: Epoch,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PeFailureContext {
    pub job: JobId,
    pub app: String,
    pub pe_instance: PeInstanceId,
    pub detection_timestamp: TimeMs,
    pub reason: FailureReason,
    pub epoch: Epoch,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JobLifecycleContext {
    pub job: JobId,
    pub config: String,
    pub app: String,
    pub time: TimeMs,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TimerContext {
    pub timer_key: String,
    pub fired_at: TimeMs,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UserEventContext {
    pub name: String,
    pub payload: BTreeMap<String, String>,
}

/// A tagged event with its per-kind context.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Event {
    Start(StartContext),
    OperatorMetric(OperatorMetricContext),
    PeMetric(PeMetricContext),
    OperatorPortMetric(OperatorPortMetricContext),
    PeFailure(PeFailureContext),
    JobSubmitted(JobLifecycleContext),
    JobCancelled(JobLifecycleContext),
    Timer(TimerContext),
    User(UserEventContext),
}

impl Event {
    pub fn kind(&self) -> EventKind {
        match self {
            Event::Start(_) => EventKind::Start,
            Event::OperatorMetric(_) => EventKind::OperatorMetric,
            Event::PeMetric(_) => EventKind::PeMetric,
            Event::OperatorPortMetric(_) => EventKind::OperatorPortMetric,
            Event::PeFailure(_) => EventKind::PeFailure,
            Event::JobSubmitted(_) => EventKind::JobSubmitted,
            Event::JobCancelled(_) => EventKind::JobCancelled,
            Event::Timer(_) => EventKind::Timer,
            Event::User(_) => EventKind::UserEvent,
        }
    }

    /// Flattens the context into log-record fields.
    pub fn log_fields(&self, fields: &mut FieldMap) {
        fields.insert("event".into(), self.kind().name().into());
        match self {
            Event::Start(c) => {
                fields.insert("startTime".into(), c.start_time.into());
            }
            Event::OperatorMetric(c) => {
                fields.insert("job".into(), c.job.into());
                fields.insert("app".into(), c.app.as_str().into());
                fields.insert("operator".into(), c.instance_name.as_str().into());
                fields.insert("metric".into(), c.metric.as_str().into());
                fields.insert("value".into(), c.value.into());
                fields.insert("epoch".into(), c.epoch.into());
            }
            Event::PeMetric(c) => {
                fields.insert("job".into(), c.job.into());
                fields.insert("app".into(), c.app.as_str().into());
                fields.insert("pe".into(), c.pe_instance.into());
                fields.insert("metric".into(), c.metric.as_str().into());
                fields.insert("value".into(), c.value.into());
                fields.insert("epoch".into(), c.epoch.into());
            }
            Event::OperatorPortMetric(c) => {
                fields.insert("job".into(), c.job.into());
                fields.insert("app".into(), c.app.as_str().into());
                fields.insert("operator".into(), c.operator.as_str().into());
                fields.insert("port".into(), c.port.into());
                fields.insert("direction".into(), c.direction.name().into());
                fields.insert("metric".into(), c.metric.as_str().into());
                fields.insert("value".into(), c.value.into());
                fields.insert("epoch".into(), c.epoch.into());
            }
            Event::PeFailure(c) => {
                fields.insert("job".into(), c.job.into());
                fields.insert("app".into(), c.app.as_str().into());
                fields.insert("pe".into(), c.pe_instance.into());
                fields.insert("detectedAt".into(), c.detection_timestamp.into());
                fields.insert("reason".into(), c.reason.name().into());
                fields.insert("epoch".into(), c.epoch.into());
            }
            Event::JobSubmitted(c) | Event::JobCancelled(c) => {
                fields.insert("job".into(), c.job.into());
                fields.insert("config".into(), c.config.as_str().into());
                fields.insert("app".into(), c.app.as_str().into());
            }
            Event::Timer(c) => {
                fields.insert("timer".into(), c.timer_key.as_str().into());
                fields.insert("firedAt".into(), c.fired_at.into());
            }
            Event::User(c) => {
                fields.insert("name".into(), c.name.as_str().into());
                for (k, v) in &c.payload {
                    fields.insert(format!("payload_{k}"), v.as_str().into());
                }
            }
        }
    }
}

/// Logical clocks for event grouping. The metric epoch increments once per
/// collection round; failure epochs are allocated per distinct
/// (reason, detection timestamp) pair.
#[derive(Debug, Default)]
pub struct EpochCounters {
    metric_epoch: Epoch,
    failure_epochs: BTreeMap<(FailureReason, TimeMs), Epoch>,
    next_failure_epoch: Epoch,
}

impl EpochCounters {
    pub fn new() -> Self {
        Self::default()
    }

    /// Advances and returns the metric epoch for a new collection round.
    pub fn next_metric_epoch(&mut self) -> Epoch {
        self.metric_epoch += 1;
        self.metric_epoch
    }

    pub fn metric_epoch(&self) -> Epoch {
        self.metric_epoch
    }

    /// Epoch for a failure notification. Notifications sharing a reason and
    /// detection timestamp belong to the same physical incident and share an
    /// epoch; a new pair allocates the next value.
    pub fn failure_epoch(&mut self, reason: FailureReason, detected_at: TimeMs) -> Epoch {
        *self
            .failure_epochs
            .entry((reason, detected_at))
            .or_insert_with(|| {
                self.next_failure_epoch += 1;
                self.next_failure_epoch
            })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn test_metric_epoch_strictly_increases() {
        let mut e = EpochCounters::new();
        assert_eq!(e.next_metric_epoch(), 1);
        assert_eq!(e.next_metric_epoch(), 2);
        assert_eq!(e.metric_epoch(), 2);
    }

    #[test]
    fn test_failure_epochs_group_by_reason_and_timestamp() {
        let mut e = EpochCounters::new();
        let a = e.failure_epoch(FailureReason::HostFailure, 5_000);
        let b = e.failure_epoch(FailureReason::HostFailure, 5_000);
        let c = e.failure_epoch(FailureReason::ProcessCrash, 5_000);
        let d = e.failure_epoch(FailureReason::HostFailure, 6_000);
        assert_eq!(a, b);
        assert_ne!(a, c);
        assert_ne!(a, d);
        assert_ne!(c, d);
    }
}
