use std::ops::Range;

use crate::envs::{env_reset, env_step, EnvConfig, EpisodeResult, Observation};
use crate::error::{DipError, Result};
use crate::genome::{Component, Genome};
use crate::nn::{
    conv2d_forward, linear_forward, lstm_cell_forward, LayerSpec, Tensor, TensorShape,
};
use crate::scalar::Scalar;

/// Per-episode recurrent state: latent code, LSTM state and previous action.
#[derive(Clone, Debug, PartialEq)]
pub struct AgentState<T> {
    pub z: Vec<T>,
    pub h: Vec<T>,
    pub c: Vec<T>,
    pub last_action: Vec<T>,
}

impl<T: Scalar> AgentState<T> {
    pub fn zeros(z_dim: usize, hidden: usize, action_dim: usize) -> Self {
        Self {
            z: vec![T::zero(); z_dim],
            h: vec![T::zero(); hidden],
            c: vec![T::zero(); hidden],
            last_action: vec![T::zero(); action_dim],
        }
    }
}

/// Genome with its layer layout resolved once, ready for repeated steps.
#[derive(Clone, Debug)]
pub struct WorldModel<'g, T> {
    genome: &'g Genome<T>,
    convs: Vec<(LayerSpec, Range<usize>)>,
    mean_head: (LayerSpec, Range<usize>),
    lstm: Range<usize>,
    controller: LayerSpec,
    input_shape: TensorShape,
}

impl<'g, T: Scalar> WorldModel<'g, T> {
    pub fn new(genome: &'g Genome<T>) -> Result<Self> {
        let arch = genome.arch();
        let visual = arch.layout(Component::Visual)?;
        let convs: Vec<_> = visual.layers[..arch.channels.len()].to_vec();
        let mean_head = visual
            .get("enc.mu")
            .cloned()
            .expect("visual layout has a mean head");
        let memory = arch.layout(Component::Memory)?;
        let lstm = memory.layers[0].1.clone();
        let controller = arch.layout(Component::Controller)?.layers[0].0.clone();
        Ok(Self {
            genome,
            convs,
            mean_head,
            lstm,
            controller,
            input_shape: TensorShape::image(3, arch.image_size, arch.image_size)?,
        })
    }

    pub fn genome(&self) -> &'g Genome<T> {
        self.genome
    }

    pub fn initial_state(&self) -> AgentState<T> {
        let a = self.genome.arch();
        AgentState::zeros(a.z_dim, a.hidden_dim, a.action_dim)
    }

    /// Latent code: conv stack, flatten, mean head.
    pub fn encode(&self, image: &Tensor<T>) -> Result<Vec<T>> {
        if image.shape() != &self.input_shape {
            return Err(DipError::shape(
                "enc.input",
                &self.input_shape,
                image.shape(),
            ));
        }
        let visual = self.genome.visual();
        let mut x = conv2d_forward(image, &visual[self.convs[0].1.clone()], &self.convs[0].0)?;
        for (spec, range) in &self.convs[1..] {
            x = conv2d_forward(&x, &visual[range.clone()], spec)?;
        }
        let (spec, range) = &self.mean_head;
        linear_forward(x.data(), &visual[range.clone()], spec)
    }

    /// LSTM update on `[z, a_prev]`.
    pub fn remember(
        &self,
        z: &[T],
        last_action: &[T],
        h: &[T],
        c: &[T],
    ) -> Result<(Vec<T>, Vec<T>)> {
        let mut x = Vec::with_capacity(z.len() + last_action.len());
        x.extend_from_slice(z);
        x.extend_from_slice(last_action);
        lstm_cell_forward(&x, h, c, &self.genome.memory()[self.lstm.clone()])
    }

    /// `tanh(W [z, h] + b)`.
    pub fn act(&self, z: &[T], h: &[T]) -> Result<Vec<T>> {
        let mut x = Vec::with_capacity(z.len() + h.len());
        x.extend_from_slice(z);
        x.extend_from_slice(h);
        linear_forward(&x, self.genome.controller(), &self.controller)
    }

    pub fn step_tensor(
        &self,
        state: &AgentState<T>,
        image: &Tensor<T>,
    ) -> Result<(Vec<T>, AgentState<T>)> {
        let z = self.encode(image)?;
        let (h, c) = self.remember(&z, &state.last_action, &state.h, &state.c)?;
        let action = self.act(&z, &h)?;
        let next = AgentState {
            z,
            h,
            c,
            last_action: action.clone(),
        };
        Ok((action, next))
    }

    pub fn step(
        &self,
        state: &AgentState<T>,
        obs: &Observation,
    ) -> Result<(Vec<T>, AgentState<T>)> {
        self.step_tensor(state, &obs.to_tensor())
    }
}

/// One agent step: encode, update memory with the previous action, act.
pub fn agent_step<T: Scalar>(
    genome: &Genome<T>,
    state: &AgentState<T>,
    obs: &Observation,
) -> Result<(Vec<T>, AgentState<T>)> {
    WorldModel::new(genome)?.step(state, obs)
}

/// What the agent saw and did on one frame.
#[derive(Clone, Debug, PartialEq)]
pub struct StepTrace<'a, T> {
    pub t: u32,
    pub observation: &'a Observation,
    /// State before the step (the recurrent state the frame was processed with).
    pub state_before: &'a AgentState<T>,
    pub state: &'a AgentState<T>,
    pub action: &'a [T],
    pub reward: f64,
}

/// Run one episode from a fresh agent state, reporting each frame to `observe`.
pub fn rollout<T: Scalar>(
    model: &WorldModel<'_, T>,
    env: &EnvConfig,
    episode_seed: u64,
    mut observe: impl FnMut(&StepTrace<'_, T>),
) -> Result<EpisodeResult> {
    let arch = model.genome().arch();
    if arch.image_size != env.image_size || arch.action_dim != env.kind.action_dim() {
        return Err(DipError::config(format!(
            "architecture ({}px, {} actions) does not fit environment ({}px, {} actions)",
            arch.image_size,
            arch.action_dim,
            env.image_size,
            env.kind.action_dim()
        )));
    }
    let (mut env_state, mut obs) = env_reset(env, episode_seed)?;
    let mut state = model.initial_state();
    let mut total = 0.0;
    let mut survived = 0;
    let mut t = 0;
    loop {
        let (action, next) = model.step(&state, &obs)?;
        let action_f64: Vec<f64> = action.iter().map(|a| a.as_f64()).collect();
        let out = env_step(&mut env_state, &action_f64)?;
        observe(&StepTrace {
            t,
            observation: &obs,
            state_before: &state,
            state: &next,
            action: &action,
            reward: out.reward,
        });
        total += out.reward;
        t += 1;
        if out.reward > 0.0 || env.kind != crate::envs::EnvKind::Dodge {
            survived += 1;
        }
        state = next;
        obs = out.observation;
        if out.done {
            break;
        }
    }
    Ok(EpisodeResult {
        total_reward: total,
        steps_survived: survived,
        terminated_early: t < env.max_steps,
    })
}
