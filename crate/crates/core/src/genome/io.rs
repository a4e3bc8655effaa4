//! Versioned, checksummed binary genome format.
//!
//! ```text
//! "DIPG" | version u16 | scalar width u8 | 0u8 | descriptor len u32 | descriptor | crc32(header)
//! then for visual, memory, controller:
//!   tag u8 | count u64 | count values (LE) | crc32(tag..values)
//! ```
//!
//! The descriptor is `key=value` lines spelling out the architecture and the
//! per-segment parameter counts. All integers little-endian.

use super::{count_params, ArchitectureConfig, Component, Genome};
use crate::error::{DipError, Result};
use crate::scalar::Scalar;

pub const GENOME_FORMAT_VERSION: u16 = 1;
const MAGIC: &[u8; 4] = b"DIPG";
const LSTM_GATE_ORDER: &str = "input,forget,candidate,output";

fn descriptor(arch: &ArchitectureConfig) -> Result<String> {
    let channels: Vec<String> = arch.channels.iter().map(|c| c.to_string()).collect();
    let mut s = String::new();
    s.push_str(&format!("image_size={}\n", arch.image_size));
    s.push_str(&format!("channels={}\n", channels.join(",")));
    s.push_str(&format!("kernel={}\n", arch.kernel));
    s.push_str(&format!("z_dim={}\n", arch.z_dim));
    s.push_str(&format!("hidden_dim={}\n", arch.hidden_dim));
    s.push_str(&format!("n_mixtures={}\n", arch.n_mixtures));
    s.push_str(&format!("action_dim={}\n", arch.action_dim));
    s.push_str(&format!("mdn_head={}\n", u8::from(arch.mdn_head)));
    s.push_str(&format!("lstm_gates={LSTM_GATE_ORDER}\n"));
    for c in Component::ALL {
        s.push_str(&format!("{}={}\n", c.name(), count_params(arch, c)?));
    }
    Ok(s)
}

fn parse_descriptor(text: &str) -> Result<ArchitectureConfig> {
    let corrupt = |m: String| DipError::CorruptGenome(m);
    let get = |key: &str| -> Result<String> {
        text.lines()
            .find_map(|l| l.strip_prefix(key).and_then(|r| r.strip_prefix('=')))
            .map(str::to_owned)
            .ok_or_else(|| corrupt(format!("descriptor lacks `{key}`")))
    };
    let num = |v: String, key: &str| -> Result<usize> {
        v.parse()
            .map_err(|_| DipError::CorruptGenome(format!("descriptor `{key}` is not an integer")))
    };
    let channels = get("channels")?
        .split(',')
        .map(|c| c.parse::<usize>())
        .collect::<std::result::Result<Vec<_>, _>>()
        .map_err(|_| corrupt("descriptor `channels` malformed".into()))?;
    if get("lstm_gates")? != LSTM_GATE_ORDER {
        return Err(corrupt("unsupported LSTM gate order".into()));
    }
    let arch = ArchitectureConfig {
        image_size: num(get("image_size")?, "image_size")?,
        channels,
        kernel: num(get("kernel")?, "kernel")?,
        z_dim: num(get("z_dim")?, "z_dim")?,
        hidden_dim: num(get("hidden_dim")?, "hidden_dim")?,
        n_mixtures: num(get("n_mixtures")?, "n_mixtures")?,
        action_dim: num(get("action_dim")?, "action_dim")?,
        mdn_head: num(get("mdn_head")?, "mdn_head")? != 0,
    };
    arch.validate()
        .map_err(|e| corrupt(format!("descriptor architecture invalid: {e}")))?;
    for c in Component::ALL {
        let stated = num(get(c.name())?, c.name())?;
        if stated != count_params(&arch, c)? {
            return Err(corrupt(format!(
                "descriptor {c} count {stated} disagrees with its architecture"
            )));
        }
    }
    Ok(arch)
}

pub fn serialize_genome<T: Scalar>(g: &Genome<T>) -> Vec<u8> {
    let desc = descriptor(g.arch()).expect("genome architecture was validated at construction");
    let mut out = Vec::with_capacity(64 + desc.len() + g.param_count() * T::WIDTH);
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&GENOME_FORMAT_VERSION.to_le_bytes());
    out.push(T::WIDTH as u8);
    out.push(0);
    out.extend_from_slice(&(desc.len() as u32).to_le_bytes());
    out.extend_from_slice(desc.as_bytes());
    let crc = crc32fast::hash(&out);
    out.extend_from_slice(&crc.to_le_bytes());
    for c in Component::ALL {
        let start = out.len();
        out.push(c.index() as u8);
        let seg = g.segment(c);
        out.extend_from_slice(&(seg.len() as u64).to_le_bytes());
        for &v in seg {
            v.write_le(&mut out);
        }
        let crc = crc32fast::hash(&out[start..]);
        out.extend_from_slice(&crc.to_le_bytes());
    }
    out
}

struct Reader<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize, what: &str) -> Result<&'a [u8]> {
        if self.buf.len() - self.pos < n {
            return Err(DipError::CorruptGenome(format!(
                "truncated while reading {what}"
            )));
        }
        let s = &self.buf[self.pos..self.pos + n];
        self.pos += n;
        Ok(s)
    }

    fn u32(&mut self, what: &str) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4, what)?.try_into().unwrap()))
    }

    fn u64(&mut self, what: &str) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8, what)?.try_into().unwrap()))
    }

    fn check_crc(&mut self, start: usize, what: &str) -> Result<()> {
        let actual = crc32fast::hash(&self.buf[start..self.pos]);
        let stored = self.u32(what)?;
        if stored != actual {
            return Err(DipError::CorruptGenome(format!(
                "{what} checksum mismatch: stored {stored:#010x}, computed {actual:#010x}"
            )));
        }
        Ok(())
    }
}

/// Decode a genome, taking the architecture from the file.
pub fn deserialize_genome<T: Scalar>(bytes: &[u8]) -> Result<Genome<T>> {
    let mut r = Reader { buf: bytes, pos: 0 };
    if r.take(4, "magic")? != MAGIC {
        return Err(DipError::CorruptGenome("bad magic".into()));
    }
    let version = u16::from_le_bytes(r.take(2, "version")?.try_into().unwrap());
    if version != GENOME_FORMAT_VERSION {
        return Err(DipError::CorruptGenome(format!(
            "unsupported layout version {version} (expected {GENOME_FORMAT_VERSION})"
        )));
    }
    let width = r.take(2, "scalar width")?[0] as usize;
    let desc_len = r.u32("descriptor length")? as usize;
    let desc = r.take(desc_len, "descriptor")?;
    r.check_crc(0, "header")?;
    if width != T::WIDTH {
        return Err(DipError::config(format!(
            "genome stores {width}-byte scalars, requested {} ({} bytes)",
            T::NAME,
            T::WIDTH
        )));
    }
    let desc = std::str::from_utf8(desc)
        .map_err(|_| DipError::CorruptGenome("descriptor is not UTF-8".into()))?;
    let arch = parse_descriptor(desc)?;

    let mut segments: [Vec<T>; 3] = Default::default();
    for c in Component::ALL {
        let start = r.pos;
        let tag = r.take(1, "segment tag")?[0];
        if tag as usize != c.index() {
            return Err(DipError::CorruptGenome(format!(
                "expected {c} segment, found tag {tag}"
            )));
        }
        let count = r.u64("segment length")? as usize;
        let expected = count_params(&arch, c)?;
        if count != expected {
            return Err(DipError::CorruptGenome(format!(
                "{c} segment holds {count} values, layout needs {expected}"
            )));
        }
        let raw = r.take(count * width, c.name())?;
        r.check_crc(start, c.name())?;
        segments[c.index()] = raw.chunks_exact(width).map(T::read_le).collect();
    }
    if r.pos != bytes.len() {
        return Err(DipError::CorruptGenome(format!(
            "{} trailing bytes",
            bytes.len() - r.pos
        )));
    }
    let [visual, memory, controller] = segments;
    Genome::from_segments(arch, visual, memory, controller)
}

/// Decode a genome that must match `arch` exactly.
pub fn deserialize_genome_for<T: Scalar>(
    bytes: &[u8],
    arch: &ArchitectureConfig,
) -> Result<Genome<T>> {
    let g = deserialize_genome::<T>(bytes)?;
    if g.arch() != arch {
        return Err(DipError::config(format!(
            "genome architecture (z_dim {}, hidden {}, channels {:?}) does not match configured (z_dim {}, hidden {}, channels {:?})",
            g.arch().z_dim,
            g.arch().hidden_dim,
            g.arch().channels,
            arch.z_dim,
            arch.hidden_dim,
            arch.channels
        )));
    }
    Ok(g)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::RandomSource;

    fn sample() -> Genome<f64> {
        Genome::init(
            &ArchitectureConfig::desk_scale(1),
            &mut RandomSource::new(3, 3),
        )
        .unwrap()
    }

    #[test]
    fn round_trip_is_identity() {
        let g = sample();
        let bytes = serialize_genome(&g);
        assert_eq!(deserialize_genome::<f64>(&bytes).unwrap(), g);
    }

    #[test]
    fn truncated_stream_is_corrupt() {
        let bytes = serialize_genome(&sample());
        for cut in [0, 3, 10, bytes.len() / 2, bytes.len() - 1] {
            assert!(matches!(
                deserialize_genome::<f64>(&bytes[..cut]),
                Err(DipError::CorruptGenome(_))
            ));
        }
    }

    #[test]
    fn flipped_byte_fails_checksum() {
        let mut bytes = serialize_genome(&sample());
        let n = bytes.len();
        bytes[n - 20] ^= 0x40;
        let err = deserialize_genome::<f64>(&bytes).unwrap_err();
        assert!(err.to_string().contains("checksum"), "{err}");
    }

    #[test]
    fn version_mismatch() {
        let mut bytes = serialize_genome(&sample());
        bytes[4] = 9;
        let err = deserialize_genome::<f64>(&bytes).unwrap_err();
        assert!(err.to_string().contains("version"), "{err}");
    }

    #[test]
    fn cross_config_load_is_config_error() {
        let mut big = ArchitectureConfig::desk_scale(1);
        big.z_dim = 32;
        let g: Genome<f64> = Genome::init(&big, &mut RandomSource::new(1, 1)).unwrap();
        let bytes = serialize_genome(&g);
        let mut small = big.clone();
        small.z_dim = 8;
        assert!(matches!(
            deserialize_genome_for::<f64>(&bytes, &small),
            Err(DipError::Config(_))
        ));
        assert!(deserialize_genome_for::<f64>(&bytes, &big).is_ok());
    }

    #[test]
    fn scalar_width_mismatch() {
        let bytes = serialize_genome(&sample());
        assert!(matches!(
            deserialize_genome::<f32>(&bytes),
            Err(DipError::Config(_))
        ));
    }
}
