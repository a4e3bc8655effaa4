use crate::envs::EnvConfig;
use crate::error::Result;
use crate::genome::Genome;
use crate::harness::{rollout, WorldModel};
use crate::scalar::Scalar;

#[derive(Clone, Debug, PartialEq)]
pub struct VectorRecord {
    pub t: u32,
    pub z: Vec<f64>,
    pub h: Vec<f64>,
    pub action: Vec<f64>,
    pub reward: f64,
}

/// Latent and hidden vectors of one episode, one record per executed step.
#[derive(Clone, Debug, PartialEq)]
pub struct VectorDump {
    pub z_dim: usize,
    pub hidden_dim: usize,
    pub action_dim: usize,
    pub genome_id: Option<u64>,
    pub episode_seed: u64,
    pub records: Vec<VectorRecord>,
}

pub fn dump_vectors<T: Scalar>(
    genome: &Genome<T>,
    env: &EnvConfig,
    episode_seed: u64,
    genome_id: Option<u64>,
) -> Result<VectorDump> {
    let model = WorldModel::new(genome)?;
    let f = |v: &[T]| v.iter().map(|x| x.as_f64()).collect::<Vec<f64>>();
    let mut records = Vec::new();
    rollout(&model, env, episode_seed, |s| {
        records.push(VectorRecord {
            t: s.t,
            z: f(&s.state.z),
            h: f(&s.state.h),
            action: f(s.action),
            reward: s.reward,
        })
    })?;
    let arch = genome.arch();
    Ok(VectorDump {
        z_dim: arch.z_dim,
        hidden_dim: arch.hidden_dim,
        action_dim: arch.action_dim,
        genome_id,
        episode_seed,
        records,
    })
}

impl VectorDump {
    /// `#`-prefixed header lines, a column header, then one tab-separated row
    /// per step: `t z0.. h0.. a0.. reward`.
    pub fn to_tsv(&self) -> String {
        let mut out = format!(
            "# z_dim={} hidden_dim={} action_dim={}\n# genome_id={}\n# episode_seed={}\n",
            self.z_dim,
            self.hidden_dim,
            self.action_dim,
            self.genome_id.map_or("-".to_string(), |i| i.to_string()),
            self.episode_seed
        );
        let mut cols = vec!["t".to_string()];
        cols.extend((0..self.z_dim).map(|i| format!("z{i}")));
        cols.extend((0..self.hidden_dim).map(|i| format!("h{i}")));
        cols.extend((0..self.action_dim).map(|i| format!("a{i}")));
        cols.push("reward".into());
        out.push_str(&cols.join("\t"));
        out.push('\n');
        for r in &self.records {
            let mut row = vec![r.t.to_string()];
            row.extend(
                r.z.iter()
                    .chain(&r.h)
                    .chain(&r.action)
                    .map(|v| v.to_string()),
            );
            row.push(r.reward.to_string());
            out.push_str(&row.join("\t"));
            out.push('\n');
        }
        out
    }

    pub fn hidden_trace(&self) -> Vec<Vec<f64>> {
        self.records.iter().map(|r| r.h.clone()).collect()
    }
}
