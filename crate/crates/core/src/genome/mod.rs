//! Three-component genome: visual encoder, recurrent memory, linear controller.

mod io;

use std::fmt;
use std::ops::Range;

use serde::{Deserialize, Serialize};

use crate::error::{DipError, Result};
use crate::nn::{conv_output_size, he_uniform_init, Activation, LayerSpec};
use crate::rng::RandomSource;
use crate::scalar::Scalar;

pub use io::{deserialize_genome, deserialize_genome_for, serialize_genome, GENOME_FORMAT_VERSION};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Component {
    Visual,
    Memory,
    Controller,
}

impl Component {
    pub const ALL: [Component; 3] = [Component::Visual, Component::Memory, Component::Controller];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        match self {
            Component::Visual => "visual",
            Component::Memory => "memory",
            Component::Controller => "controller",
        }
    }

    pub fn from_index(i: usize) -> Option<Self> {
        Self::ALL.get(i).copied()
    }
}

impl fmt::Display for Component {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

fn default_mixtures() -> usize {
    5
}

fn default_true() -> bool {
    true
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ArchitectureConfig {
    /// Pixels per side of the square RGB observation.
    pub image_size: usize,
    /// Output channels of each stride-2 conv layer.
    pub channels: Vec<usize>,
    pub kernel: usize,
    pub z_dim: usize,
    pub hidden_dim: usize,
    #[serde(default = "default_mixtures")]
    pub n_mixtures: usize,
    pub action_dim: usize,
    /// Include the (never consumed) mixture-density head in the memory segment.
    #[serde(default = "default_true")]
    pub mdn_head: bool,
}

/// Flat-segment layout of one component: each layer and its parameter range.
#[derive(Clone, Debug, PartialEq)]
pub struct ComponentLayout {
    pub layers: Vec<(LayerSpec, Range<usize>)>,
}

impl ComponentLayout {
    fn from_layers(specs: Vec<LayerSpec>) -> Self {
        let mut offset = 0;
        let layers = specs
            .into_iter()
            .map(|spec| {
                let n = spec.param_count();
                let range = offset..offset + n;
                offset += n;
                (spec, range)
            })
            .collect();
        Self { layers }
    }

    pub fn len(&self) -> usize {
        self.layers.last().map_or(0, |(_, r)| r.end)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn get(&self, name: &str) -> Option<&(LayerSpec, Range<usize>)> {
        self.layers.iter().find(|(s, _)| s.name == name)
    }
}

pub const IMAGE_CHANNELS: usize = 3;

impl ArchitectureConfig {
    /// 64px, channels 32/64/128/256, kernel 4, z 32, hidden 256.
    pub fn full_scale(action_dim: usize) -> Self {
        Self {
            image_size: 64,
            channels: vec![32, 64, 128, 256],
            kernel: 4,
            z_dim: 32,
            hidden_dim: 256,
            n_mixtures: 5,
            action_dim,
            mdn_head: true,
        }
    }

    /// 16px with two conv layers (16 -> 7 -> 2), z 8, hidden 16.
    pub fn desk_scale(action_dim: usize) -> Self {
        Self {
            image_size: 16,
            channels: vec![8, 16],
            kernel: 4,
            z_dim: 8,
            hidden_dim: 16,
            n_mixtures: 5,
            action_dim,
            mdn_head: true,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let checks = [
            (self.image_size, "image_size"),
            (self.kernel, "kernel"),
            (self.z_dim, "z_dim"),
            (self.hidden_dim, "hidden_dim"),
            (self.n_mixtures, "n_mixtures"),
            (self.action_dim, "action_dim"),
        ];
        for (v, name) in checks {
            if v == 0 {
                return Err(DipError::config(format!(
                    "architecture {name} must be >= 1"
                )));
            }
        }
        if self.channels.is_empty() || self.channels.contains(&0) {
            return Err(DipError::config(
                "architecture channels must be a non-empty list of positive counts",
            ));
        }
        self.conv_extents().map(|_| ())
    }

    /// Spatial extent after each conv layer.
    pub fn conv_extents(&self) -> Result<Vec<usize>> {
        let mut size = self.image_size;
        let mut out = Vec::with_capacity(self.channels.len());
        for (i, _) in self.channels.iter().enumerate() {
            size = conv_output_size(size, self.kernel, LayerSpec::DEFAULT_STRIDE).ok_or_else(
                || {
                    DipError::config(format!(
                        "conv stack collapses below 1x1 at layer {} (input {}px, kernel {})",
                        i + 1,
                        size,
                        self.kernel
                    ))
                },
            )?;
            out.push(size);
        }
        Ok(out)
    }

    pub fn conv_specs(&self) -> Vec<LayerSpec> {
        let mut in_ch = IMAGE_CHANNELS;
        self.channels
            .iter()
            .enumerate()
            .map(|(i, &out_ch)| {
                let spec = LayerSpec::conv(
                    format!("enc.conv{}", i + 1),
                    in_ch,
                    out_ch,
                    self.kernel,
                    Activation::Relu,
                );
                in_ch = out_ch;
                spec
            })
            .collect()
    }

    /// Length of the flattened final conv feature map.
    pub fn encoder_flat_size(&self) -> Result<usize> {
        let ext = *self.conv_extents()?.last().expect("validated non-empty");
        Ok(ext * ext * self.channels.last().copied().unwrap_or(0))
    }

    pub fn lstm_input_size(&self) -> usize {
        self.z_dim + self.action_dim
    }

    pub fn controller_input_size(&self) -> usize {
        self.z_dim + self.hidden_dim
    }

    pub fn layout(&self, component: Component) -> Result<ComponentLayout> {
        self.validate()?;
        let specs = match component {
            Component::Visual => {
                let flat = self.encoder_flat_size()?;
                let mut specs = self.conv_specs();
                specs.push(LayerSpec::linear(
                    "enc.mu",
                    flat,
                    self.z_dim,
                    Activation::Identity,
                ));
                specs.push(LayerSpec::linear(
                    "enc.logvar",
                    flat,
                    self.z_dim,
                    Activation::Identity,
                ));
                specs
            }
            Component::Memory => {
                let mut specs = vec![LayerSpec::lstm_cell(
                    "mem.lstm",
                    self.lstm_input_size(),
                    self.hidden_dim,
                )];
                if self.mdn_head {
                    specs.push(LayerSpec::mdn_head(
                        "mem.mdn",
                        self.hidden_dim,
                        self.n_mixtures,
                        self.z_dim,
                    ));
                }
                specs
            }
            Component::Controller => vec![LayerSpec::linear(
                "ctrl",
                self.controller_input_size(),
                self.action_dim,
                Activation::Tanh,
            )],
        };
        Ok(ComponentLayout::from_layers(specs))
    }
}

/// Exact parameter count of one component's flat layout.
pub fn count_params(arch: &ArchitectureConfig, component: Component) -> Result<usize> {
    Ok(arch.layout(component)?.len())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MutationEvent {
    pub component: Component,
    pub sigma: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Genome<T> {
    arch: ArchitectureConfig,
    segments: [Vec<T>; 3],
}

impl<T: Scalar> Genome<T> {
    pub fn from_segments(
        arch: ArchitectureConfig,
        visual: Vec<T>,
        memory: Vec<T>,
        controller: Vec<T>,
    ) -> Result<Self> {
        let segments = [visual, memory, controller];
        for c in Component::ALL {
            let expected = count_params(&arch, c)?;
            let got = segments[c.index()].len();
            if expected != got {
                return Err(DipError::config(format!(
                    "{c} segment has {got} parameters, architecture requires {expected}"
                )));
            }
        }
        Ok(Self { arch, segments })
    }

    /// He-uniform initialization of every layer with its own fan-in.
    pub fn init(arch: &ArchitectureConfig, rng: &mut RandomSource) -> Result<Self> {
        let mut segments: [Vec<T>; 3] = Default::default();
        for c in Component::ALL {
            let layout = arch.layout(c)?;
            let seg = &mut segments[c.index()];
            seg.reserve(layout.len());
            for (spec, range) in &layout.layers {
                seg.extend(he_uniform_init::<T>(spec.fan_in(), range.len(), rng));
            }
        }
        Ok(Self {
            arch: arch.clone(),
            segments,
        })
    }

    pub fn zeros(arch: &ArchitectureConfig) -> Result<Self> {
        let mut segments: [Vec<T>; 3] = Default::default();
        for c in Component::ALL {
            segments[c.index()] = vec![T::zero(); count_params(arch, c)?];
        }
        Ok(Self {
            arch: arch.clone(),
            segments,
        })
    }

    pub fn arch(&self) -> &ArchitectureConfig {
        &self.arch
    }

    pub fn segment(&self, c: Component) -> &[T] {
        &self.segments[c.index()]
    }

    pub fn visual(&self) -> &[T] {
        self.segment(Component::Visual)
    }

    pub fn memory(&self) -> &[T] {
        self.segment(Component::Memory)
    }

    pub fn controller(&self) -> &[T] {
        self.segment(Component::Controller)
    }

    /// Replace one segment; its length must not change.
    pub fn with_segment(&self, c: Component, values: Vec<T>) -> Result<Self> {
        if values.len() != self.segments[c.index()].len() {
            return Err(DipError::config(format!(
                "{c} segment must have {} parameters, got {}",
                self.segments[c.index()].len(),
                values.len()
            )));
        }
        let mut out = self.clone();
        out.segments[c.index()] = values;
        Ok(out)
    }

    pub fn param_count(&self) -> usize {
        self.segments.iter().map(Vec::len).sum()
    }

    /// Adds `σ·ε`, `ε ~ N(0, I)`, to every parameter of one component chosen
    /// uniformly at random.
    pub fn mutate(&self, sigma: f64, rng: &mut RandomSource) -> (Self, MutationEvent) {
        let component = Component::from_index(rng.below(3)).expect("index < 3");
        let child = self.mutate_component(component, sigma, rng);
        (child, MutationEvent { component, sigma })
    }

    pub fn mutate_component(
        &self,
        component: Component,
        sigma: f64,
        rng: &mut RandomSource,
    ) -> Self {
        let mut child = self.clone();
        for p in child.segments[component.index()].iter_mut() {
            *p += T::lit(sigma * rng.normal());
        }
        child
    }
}

/// Euclidean distance between the two genomes' segments for `component`.
pub fn weight_distance<T: Scalar>(
    a: &Genome<T>,
    b: &Genome<T>,
    component: Component,
) -> Result<f64> {
    if a.arch != b.arch {
        return Err(DipError::config(
            "weight distance between genomes of different architectures",
        ));
    }
    let sq: f64 = a
        .segment(component)
        .iter()
        .zip(b.segment(component))
        .map(|(&x, &y)| {
            let d = x.as_f64() - y.as_f64();
            d * d
        })
        .sum();
    Ok(sq.sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toy() -> ArchitectureConfig {
        ArchitectureConfig {
            image_size: 8,
            channels: vec![2],
            kernel: 4,
            z_dim: 2,
            hidden_dim: 3,
            n_mixtures: 2,
            action_dim: 1,
            mdn_head: true,
        }
    }

    #[test]
    fn full_scale_counts() {
        let arch = ArchitectureConfig::full_scale(3);
        assert_eq!(count_params(&arch, Component::Visual).unwrap(), 755_744);
        assert_eq!(count_params(&arch, Component::Controller).unwrap(), 867);
        assert_eq!(arch.conv_extents().unwrap(), vec![31, 14, 6, 2]);
    }

    #[test]
    fn toy_controller_count() {
        assert_eq!(count_params(&toy(), Component::Controller).unwrap(), 6);
    }

    #[test]
    fn collapsing_stack_rejected() {
        let mut arch = ArchitectureConfig::full_scale(3);
        arch.channels.push(512);
        assert!(matches!(
            count_params(&arch, Component::Visual),
            Err(DipError::Config(_))
        ));
    }

    #[test]
    fn mdn_flag_shrinks_memory() {
        let mut arch = toy();
        let with = count_params(&arch, Component::Memory).unwrap();
        arch.mdn_head = false;
        let without = count_params(&arch, Component::Memory).unwrap();
        assert_eq!(with - without, 3 * (3 * 2 * 2) + 3 * 2 * 2);
    }

    #[test]
    fn init_is_deterministic_and_bounded() {
        let arch = ArchitectureConfig::full_scale(3);
        let a: Genome<f32> = Genome::init(&arch, &mut RandomSource::new(5, 0)).unwrap();
        let b: Genome<f32> = Genome::init(&arch, &mut RandomSource::new(5, 0)).unwrap();
        assert_eq!(a, b);
        let bound = (1.0f64 / 288.0).sqrt() as f32;
        assert!(a.controller().iter().all(|v| v.abs() <= bound));
    }

    #[test]
    fn mutation_touches_one_segment() {
        let arch = toy();
        let mut rng = RandomSource::new(9, 1);
        let g: Genome<f64> = Genome::init(&arch, &mut rng).unwrap();
        for _ in 0..30 {
            let (child, ev) = g.mutate(0.03, &mut rng);
            for c in Component::ALL {
                let same = child.segment(c) == g.segment(c);
                assert_eq!(same, c != ev.component);
            }
        }
    }

    #[test]
    fn distance_basics() {
        let arch = toy();
        let g: Genome<f64> = Genome::init(&arch, &mut RandomSource::new(1, 1)).unwrap();
        assert_eq!(weight_distance(&g, &g, Component::Memory).unwrap(), 0.0);
        let mut v = g.memory().to_vec();
        v[3] += 0.25;
        let h = g.with_segment(Component::Memory, v).unwrap();
        assert!((weight_distance(&g, &h, Component::Memory).unwrap() - 0.25).abs() < 1e-15);
        assert_eq!(weight_distance(&g, &h, Component::Visual).unwrap(), 0.0);
    }

    #[test]
    fn distance_arch_mismatch() {
        let a: Genome<f64> = Genome::zeros(&toy()).unwrap();
        let mut arch = toy();
        arch.z_dim = 3;
        let b: Genome<f64> = Genome::zeros(&arch).unwrap();
        assert!(weight_distance(&a, &b, Component::Controller).is_err());
    }
}
