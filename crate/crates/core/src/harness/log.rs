//! Line-delimited JSON run log.
//!
//! The first line is a header carrying the run config verbatim as TOML:
//!
//! ```text
//! {"type":"header","schema":1,"config":"seed = 0\n..."}
//! ```
//!
//! followed by one `{"type":"generation","schema":1,...}` line per
//! generation. Wall-clock timings live in a separate `timing.jsonl` so the
//! log itself is a pure function of the config.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{DipError, Result};
use crate::moea::{Population, StepReport};

pub const LOG_SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComponentCounts {
    pub visual: u32,
    pub memory: u32,
    pub controller: u32,
}

impl From<[u32; 3]> for ComponentCounts {
    fn from(c: [u32; 3]) -> Self {
        Self {
            visual: c[0],
            memory: c[1],
            controller: c[2],
        }
    }
}

impl ComponentCounts {
    pub fn total(&self) -> u32 {
        self.visual + self.memory + self.controller
    }
}

/// Members of one age and the sum of their rewards.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AgeBucket {
    pub age: u32,
    pub count: u32,
    pub reward_sum: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GenerationRecord {
    pub schema: u32,
    pub generation: u64,
    pub best_reward: f64,
    pub mean_reward: f64,
    pub median_reward: f64,
    pub mean_age: f64,
    pub age_histogram: Vec<AgeBucket>,
    pub mutations: ComponentCounts,
    pub resets: ComponentCounts,
    pub children_survived: u32,
    pub failures: u32,
    pub elite_id: u64,
    pub elite_age: u32,
    pub best_so_far: f64,
}

impl GenerationRecord {
    /// Summarizes an evaluated population after a generation step.
    pub fn summarize<T>(
        pop: &Population<T>,
        report: &StepReport,
        best_so_far: f64,
    ) -> Result<Self> {
        let mut rewards: Vec<f64> = pop
            .members
            .iter()
            .map(|m| {
                m.reward
                    .ok_or_else(|| DipError::logic(format!("unevaluated member {} in log", m.id)))
            })
            .collect::<Result<_>>()?;
        let elite = pop
            .best()
            .ok_or_else(|| DipError::logic("empty population in log"))?;
        let n = rewards.len() as f64;
        let mean_reward = rewards.iter().sum::<f64>() / n;
        rewards.sort_by(f64::total_cmp);
        let mid = rewards.len() / 2;
        let median_reward = if rewards.len() % 2 == 1 {
            rewards[mid]
        } else {
            0.5 * (rewards[mid - 1] + rewards[mid])
        };
        let mut hist: BTreeMap<u32, (u32, f64)> = BTreeMap::new();
        for m in &pop.members {
            let e = hist.entry(m.age).or_default();
            e.0 += 1;
            e.1 += m.reward.unwrap_or_default();
        }
        Ok(Self {
            schema: LOG_SCHEMA_VERSION,
            generation: pop.generation,
            best_reward: *rewards.last().expect("non-empty"),
            mean_reward,
            median_reward,
            mean_age: pop.mean_age(),
            age_histogram: hist
                .into_iter()
                .map(|(age, (count, reward_sum))| AgeBucket {
                    age,
                    count,
                    reward_sum,
                })
                .collect(),
            mutations: report.mutations.into(),
            resets: report.resets.into(),
            children_survived: report.children_survived,
            failures: report.failures.len() as u32,
            elite_id: elite.id,
            elite_age: elite.age,
            best_so_far,
        })
    }
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
enum Line {
    Header { schema: u32, config: String },
    Generation(GenerationRecord),
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct RunLog {
    /// Run config as TOML, verbatim.
    pub config: String,
    pub records: Vec<GenerationRecord>,
}

impl RunLog {
    pub fn new(config: String) -> Self {
        Self {
            config,
            records: Vec::new(),
        }
    }

    pub fn header_line(&self) -> String {
        serde_json::to_string(&Line::Header {
            schema: LOG_SCHEMA_VERSION,
            config: self.config.clone(),
        })
        .expect("header serializes")
    }

    pub fn record_line(record: &GenerationRecord) -> String {
        serde_json::to_string(&Line::Generation(record.clone())).expect("record serializes")
    }

    pub fn to_jsonl(&self) -> String {
        let mut out = self.header_line();
        out.push('\n');
        for r in &self.records {
            out.push_str(&Self::record_line(r));
            out.push('\n');
        }
        out
    }

    /// Parses and schema-checks a log.
    pub fn from_jsonl(text: &str) -> Result<Self> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let bad = |n: usize, e: String| DipError::config(format!("run log line {n}: {e}"));
        let first = lines
            .next()
            .ok_or_else(|| DipError::config("run log is empty"))?;
        let config = match serde_json::from_str::<Line>(first).map_err(|e| bad(1, e.to_string()))? {
            Line::Header { schema, config } if schema == LOG_SCHEMA_VERSION => config,
            Line::Header { schema, .. } => {
                return Err(bad(1, format!("unsupported schema {schema}")))
            }
            Line::Generation(_) => return Err(bad(1, "expected header".into())),
        };
        let mut log = RunLog::new(config);
        for (i, line) in lines.enumerate() {
            match serde_json::from_str::<Line>(line).map_err(|e| bad(i + 2, e.to_string()))? {
                Line::Generation(r) if r.schema == LOG_SCHEMA_VERSION => log.records.push(r),
                Line::Generation(r) => {
                    return Err(bad(i + 2, format!("unsupported schema {}", r.schema)))
                }
                Line::Header { .. } => return Err(bad(i + 2, "unexpected second header".into())),
            }
        }
        Ok(log)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TimingRecord {
    pub generation: u64,
    pub wall_clock_ms: f64,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn record(g: u64) -> GenerationRecord {
        GenerationRecord {
            schema: LOG_SCHEMA_VERSION,
            generation: g,
            best_reward: 12.5,
            mean_reward: 0.1 + 0.2,
            median_reward: 3.0,
            mean_age: 1.0 / 3.0,
            age_histogram: vec![AgeBucket {
                age: 0,
                count: 2,
                reward_sum: 7.25,
            }],
            mutations: [1, 2, 3].into(),
            resets: [1, 2, 0].into(),
            children_survived: 4,
            failures: 0,
            elite_id: 17,
            elite_age: 2,
            best_so_far: 12.5,
        }
    }

    #[test]
    fn jsonl_round_trip_is_exact() {
        let mut log = RunLog::new("seed = 1\n".into());
        log.records = vec![record(1), record(2)];
        let text = log.to_jsonl();
        assert_eq!(RunLog::from_jsonl(&text).unwrap(), log);
        assert!(text.lines().next().unwrap().contains("\"type\":\"header\""));
    }

    #[test]
    fn schema_mismatch_rejected() {
        let mut log = RunLog::new(String::new());
        let mut r = record(1);
        r.schema = 99;
        log.records.push(r);
        assert!(RunLog::from_jsonl(&log.to_jsonl()).is_err());
    }

    #[test]
    fn unknown_field_rejected() {
        let text = RunLog::new(String::new()).to_jsonl()
            + &RunLog::record_line(&record(1)).replace("\"failures\"", "\"extra\":1,\"failures\"");
        assert!(RunLog::from_jsonl(&text).is_err());
    }
}
