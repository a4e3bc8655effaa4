use rayon::prelude::*;

use crate::envs::Observation;
use crate::error::{DipError, Result};
use crate::genome::{Genome, IMAGE_CHANNELS};
use crate::harness::{AgentState, WorldModel};
use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SaliencyConfig {
    /// Side of the square blurred patch (odd).
    pub blur_size: usize,
    /// Gaussian sigma; `None` means `blur_size / 3`.
    pub blur_sigma: Option<f64>,
    /// Only every `stride`-th pixel (in both axes) is perturbed.
    pub stride: usize,
}

impl Default for SaliencyConfig {
    fn default() -> Self {
        Self {
            blur_size: 5,
            blur_sigma: None,
            stride: 1,
        }
    }
}

impl SaliencyConfig {
    pub fn sigma(&self) -> f64 {
        self.blur_sigma.unwrap_or(self.blur_size as f64 / 3.0)
    }

    pub fn validate(&self, image_size: usize) -> Result<()> {
        if self.blur_size == 0 || self.blur_size.is_multiple_of(2) {
            return Err(DipError::config(format!(
                "blur size must be odd and positive, got {}",
                self.blur_size
            )));
        }
        if self.blur_size > image_size {
            return Err(DipError::config(format!(
                "blur patch {} is larger than the {image_size}px image",
                self.blur_size
            )));
        }
        if self.stride == 0 {
            return Err(DipError::config("saliency stride must be >= 1"));
        }
        let s = self.sigma();
        if !(s > 0.0) || !s.is_finite() {
            return Err(DipError::config(format!(
                "blur sigma must be positive, got {s}"
            )));
        }
        Ok(())
    }
}

/// Per-pixel saliency, row-major `size × size`. With a stride above one,
/// every pixel carries the value of the sampled pixel at the top-left of its
/// stride block.
#[derive(Clone, Debug, PartialEq)]
pub struct SaliencyMap {
    pub size: usize,
    pub stride: usize,
    pub values: Vec<f64>,
}

impl SaliencyMap {
    pub fn get(&self, y: usize, x: usize) -> f64 {
        self.values[y * self.size + x]
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(0.0, f64::max)
    }

    /// Tab-separated grid, one image row per line.
    pub fn to_tsv(&self) -> String {
        let mut out = String::new();
        for row in self.values.chunks(self.size) {
            let cells: Vec<String> = row.iter().map(|v| format!("{v:e}")).collect();
            out.push_str(&cells.join("\t"));
            out.push('\n');
        }
        out
    }

    /// Binary PPM of the observation with saliency blended into the red channel.
    pub fn overlay_ppm(&self, obs: &Observation) -> Result<Vec<u8>> {
        if obs.size() != self.size {
            return Err(DipError::shape("saliency overlay", self.size, obs.size()));
        }
        let peak = self.max();
        let mut out = format!("P6\n{} {}\n255\n", self.size, self.size).into_bytes();
        for y in 0..self.size {
            for x in 0..self.size {
                let s = if peak > 0.0 {
                    self.get(y, x) / peak
                } else {
                    0.0
                };
                let [r, g, b] = [0, 1, 2].map(|c| obs.get(c, y, x));
                let blend = |v: f64, target: f64| {
                    ((v * (1.0 - 0.6 * s) + target * 0.6 * s) * 255.0).round() as u8
                };
                out.extend_from_slice(&[blend(r, 1.0), blend(g, 0.0), blend(b, 0.0)]);
            }
        }
        Ok(out)
    }
}

fn gaussian_weights(size: usize, sigma: f64) -> Vec<f64> {
    let r = (size / 2) as f64;
    (0..size)
        .map(|i| {
            let d = i as f64 - r;
            (-d * d / (2.0 * sigma * sigma)).exp()
        })
        .collect()
}

/// Gaussian blur with a `size × size` window, renormalized where the window
/// leaves the image. Written as a weighted mean of differences from the
/// centre pixel, so a constant region blurs to exactly itself.
pub fn gaussian_blur(obs: &Observation, size: usize, sigma: f64) -> Observation {
    let n = obs.size();
    let w = gaussian_weights(size, sigma);
    let r = (size / 2) as isize;
    let mut pixels = vec![0.0; IMAGE_CHANNELS * n * n];
    for c in 0..IMAGE_CHANNELS {
        for y in 0..n {
            for x in 0..n {
                let centre = obs.get(c, y, x);
                let (mut acc, mut norm) = (0.0, 0.0);
                for dy in -r..=r {
                    for dx in -r..=r {
                        let (yy, xx) = (y as isize + dy, x as isize + dx);
                        if yy < 0 || xx < 0 || yy >= n as isize || xx >= n as isize {
                            continue;
                        }
                        let k = w[(dy + r) as usize] * w[(dx + r) as usize];
                        acc += k * (obs.get(c, yy as usize, xx as usize) - centre);
                        norm += k;
                    }
                }
                pixels[(c * n + y) * n + x] = centre + acc / norm;
            }
        }
    }
    Observation::from_pixels(n, pixels).expect("blurred pixels stay in range")
}

/// `obs` with the `size × size` patch centred on `(cy, cx)` replaced by `blurred`.
pub fn perturb_patch(
    obs: &Observation,
    blurred: &Observation,
    cy: usize,
    cx: usize,
    size: usize,
) -> Observation {
    let n = obs.size();
    let r = size / 2;
    let mut pixels = obs.pixels().to_vec();
    for c in 0..IMAGE_CHANNELS {
        for y in cy.saturating_sub(r)..(cy + r + 1).min(n) {
            for x in cx.saturating_sub(r)..(cx + r + 1).min(n) {
                pixels[(c * n + y) * n + x] = blurred.get(c, y, x);
            }
        }
    }
    Observation::from_pixels(n, pixels).expect("patch pixels stay in range")
}

/// Controller output for one frame processed from `state`.
pub fn policy_output<T: Scalar>(
    model: &WorldModel<'_, T>,
    state: &AgentState<T>,
    obs: &Observation,
) -> Result<Vec<f64>> {
    let (action, _) = model.step(state, obs)?;
    Ok(action.iter().map(|a| a.as_f64()).collect())
}

/// `S(y, x) = ‖π(I) − π(I′)‖₁` where `I′` blurs the patch at `(y, x)`. Both
/// passes start from the same incoming recurrent state.
pub fn saliency_map<T: Scalar>(
    genome: &Genome<T>,
    obs: &Observation,
    state: &AgentState<T>,
    cfg: &SaliencyConfig,
) -> Result<SaliencyMap> {
    let n = genome.arch().image_size;
    if obs.size() != n {
        return Err(DipError::shape("saliency observation", n, obs.size()));
    }
    cfg.validate(n)?;
    let model = WorldModel::new(genome)?;
    let clean = policy_output(&model, state, obs)?;
    let blurred = gaussian_blur(obs, cfg.blur_size, cfg.sigma());
    let samples: Vec<(usize, usize)> = (0..n)
        .step_by(cfg.stride)
        .flat_map(|y| (0..n).step_by(cfg.stride).map(move |x| (y, x)))
        .collect();
    let scores = samples
        .par_iter()
        .map(|&(y, x)| {
            let out = policy_output(
                &model,
                state,
                &perturb_patch(obs, &blurred, y, x, cfg.blur_size),
            )?;
            Ok(clean
                .iter()
                .zip(&out)
                .map(|(a, b)| (a - b).abs())
                .sum::<f64>())
        })
        .collect::<Result<Vec<f64>>>()?;
    let cols = n.div_ceil(cfg.stride);
    let mut values = vec![0.0; n * n];
    for y in 0..n {
        for x in 0..n {
            values[y * n + x] = scores[(y / cfg.stride) * cols + x / cfg.stride];
        }
    }
    Ok(SaliencyMap {
        size: n,
        stride: cfg.stride,
        values,
    })
}
