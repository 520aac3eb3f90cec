//! JSON formats for instances and schedules. Sizes and times are exact
//! rationals written as `"p/q"` strings (integers and decimals also parse).

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use sts_core::model::Eps;
pub use sts_core::rational::{format_rational, parse_rational};
use sts_core::{Instance, Job, Schedule, ScheduledJob};

#[derive(Debug, thiserror::Error)]
pub enum FormatError {
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("{0}")]
    Instance(#[from] sts_core::StsError),
    #[error("unknown job id {0:?}")]
    UnknownJob(String),
}

#[derive(Debug, Serialize, Deserialize)]
pub struct JobJson {
    pub id: String,
    pub size: String,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct InstanceJson {
    pub b: usize,
    pub machines: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<String>,
    pub jobs: Vec<JobJson>,
}

/// An instance together with the ε it was stored with, if any.
pub fn read_instance(text: &str) -> Result<(Instance, Option<Eps>), FormatError> {
    let raw: InstanceJson = serde_json::from_str(text)?;
    let jobs = raw
        .jobs
        .iter()
        .map(|j| Ok(Job::new(j.id.clone(), parse_rational(&j.size)?)))
        .collect::<Result<Vec<_>, FormatError>>()?;
    let eps = raw.epsilon.as_deref().map(|e| Eps::from_rational(&parse_rational(e)?)).transpose()?;
    Ok((Instance::new(jobs, raw.machines, raw.b)?, eps))
}

pub fn write_instance(inst: &Instance, eps: Option<Eps>) -> String {
    let raw = InstanceJson {
        b: inst.burst_limit,
        machines: inst.machines,
        epsilon: eps.map(|e| format_rational(&e.value())),
        jobs: inst.jobs.iter().map(|j| JobJson { id: j.id.clone(), size: format_rational(&j.size) }).collect(),
    };
    serde_json::to_string_pretty(&raw).expect("plain data serializes")
}

#[derive(Debug, Serialize, Deserialize)]
pub struct AssignmentJson {
    pub job: String,
    pub machine: usize,
    pub start: String,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct ScheduleJson {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub makespan: Option<String>,
    pub assignments: Vec<AssignmentJson>,
}

/// Sizes come from the instance; the file only names jobs by id.
pub fn read_schedule(text: &str, inst: &Instance) -> Result<Schedule, FormatError> {
    let raw: ScheduleJson = serde_json::from_str(text)?;
    let index: BTreeMap<&str, usize> = inst.jobs.iter().enumerate().map(|(i, j)| (j.id.as_str(), i)).collect();
    let assignments = raw
        .assignments
        .iter()
        .map(|a| {
            let j = *index.get(a.job.as_str()).ok_or_else(|| FormatError::UnknownJob(a.job.clone()))?;
            Ok(ScheduledJob::new(j, a.machine, parse_rational(&a.start)?, inst.jobs[j].size.clone()))
        })
        .collect::<Result<Vec<_>, FormatError>>()?;
    Ok(Schedule::new(assignments))
}

pub fn write_schedule(s: &Schedule, inst: &Instance) -> String {
    let mut rows: Vec<&ScheduledJob> = s.assignments.iter().collect();
    rows.sort_by(|a, b| a.machine.cmp(&b.machine).then(a.start.cmp(&b.start)).then(a.job.cmp(&b.job)));
    let raw = ScheduleJson {
        makespan: Some(format_rational(&s.makespan())),
        assignments: rows
            .into_iter()
            .map(|a| AssignmentJson { job: inst.jobs[a.job].id.clone(), machine: a.machine, start: format_rational(&a.start) })
            .collect(),
    };
    serde_json::to_string_pretty(&raw).expect("plain data serializes")
}
