//! Versioned binary checkpoints of all policy tensors.
//!
//! Layout, little-endian: magic `INCSIMCK`, u32 version, u32 hash length
//! and the config hash bytes, one architecture byte, u32 tensor count,
//! then per tensor a u32 length followed by that many f64 values. Tensors
//! are the actor's five, the critic's five and the target critic's five.

use std::io::{Read, Write};
use std::path::Path;

use super::policy::Policy;
use super::CriticVariant;
use crate::error::RunError;

pub const MAGIC: &[u8; 8] = b"INCSIMCK";
pub const VERSION: u32 = 1;

fn tensors(p: &Policy) -> Vec<&Vec<f64>> {
    let mut v: Vec<&Vec<f64>> = p.actor.tensors().to_vec();
    v.extend(p.critic.tensors());
    v.extend(p.target.tensors());
    v
}

pub fn encode(policy: &Policy, config_hash: &str) -> Vec<u8> {
    let mut out = Vec::new();
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&VERSION.to_le_bytes());
    out.extend_from_slice(&(config_hash.len() as u32).to_le_bytes());
    out.extend_from_slice(config_hash.as_bytes());
    out.push(policy.variant.code());
    let ts = tensors(policy);
    out.extend_from_slice(&(ts.len() as u32).to_le_bytes());
    for t in ts {
        out.extend_from_slice(&(t.len() as u32).to_le_bytes());
        for x in t {
            out.extend_from_slice(&x.to_le_bytes());
        }
    }
    out
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8], RunError> {
        let end = self.pos.checked_add(n).filter(|&e| e <= self.bytes.len());
        let end = end.ok_or_else(|| RunError::Checkpoint("truncated checkpoint".into()))?;
        let s = &self.bytes[self.pos..end];
        self.pos = end;
        Ok(s)
    }

    fn u32(&mut self) -> Result<u32, RunError> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }
}

/// Decoded header and tensors.
#[derive(Debug, Clone, PartialEq)]
pub struct Checkpoint {
    pub config_hash: String,
    pub variant: CriticVariant,
    pub tensors: Vec<Vec<f64>>,
}

pub fn decode(bytes: &[u8]) -> Result<Checkpoint, RunError> {
    let mut r = Reader { bytes, pos: 0 };
    if r.take(8)? != MAGIC {
        return Err(RunError::Checkpoint("bad magic".into()));
    }
    let version = r.u32()?;
    if version != VERSION {
        return Err(RunError::Checkpoint(format!("unsupported version {version}")));
    }
    let hlen = r.u32()? as usize;
    let config_hash = String::from_utf8(r.take(hlen)?.to_vec())
        .map_err(|_| RunError::Checkpoint("config hash is not utf-8".into()))?;
    let code = r.take(1)?[0];
    let variant = CriticVariant::from_code(code)
        .ok_or_else(|| RunError::Checkpoint(format!("unknown architecture code {code}")))?;
    let count = r.u32()? as usize;
    let mut tensors = Vec::with_capacity(count);
    for _ in 0..count {
        let len = r.u32()? as usize;
        let raw = r.take(len.checked_mul(8).ok_or_else(|| RunError::Checkpoint("tensor too large".into()))?)?;
        tensors.push(
            raw.chunks_exact(8)
                .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
                .collect(),
        );
    }
    if r.pos != bytes.len() {
        return Err(RunError::Checkpoint("trailing bytes".into()));
    }
    Ok(Checkpoint {
        config_hash,
        variant,
        tensors,
    })
}

impl Checkpoint {
    /// Overwrite `policy`'s tensors, which must match in layout.
    pub fn restore_into(&self, policy: &mut Policy) -> Result<(), RunError> {
        if self.variant != policy.variant {
            return Err(RunError::Checkpoint(format!(
                "checkpoint is {} but policy is {}",
                self.variant, policy.variant
            )));
        }
        let mut slots: Vec<&mut Vec<f64>> = policy.actor.tensors_mut().into_iter().collect();
        slots.extend(policy.critic.tensors_mut());
        slots.extend(policy.target.tensors_mut());
        if slots.len() != self.tensors.len() {
            return Err(RunError::Checkpoint(format!(
                "expected {} tensors, found {}",
                slots.len(),
                self.tensors.len()
            )));
        }
        for (i, (dst, src)) in slots.iter().zip(&self.tensors).enumerate() {
            if dst.len() != src.len() {
                return Err(RunError::Checkpoint(format!(
                    "tensor {i} has {} values, expected {}",
                    src.len(),
                    dst.len()
                )));
            }
        }
        for (dst, src) in slots.into_iter().zip(&self.tensors) {
            dst.copy_from_slice(src);
        }
        Ok(())
    }
}

pub fn save(path: &Path, policy: &Policy, config_hash: &str) -> Result<(), RunError> {
    let mut f = std::fs::File::create(path).map_err(|e| RunError::io(path, e))?;
    f.write_all(&encode(policy, config_hash))
        .map_err(|e| RunError::io(path, e))
}

pub fn load(path: &Path) -> Result<Checkpoint, RunError> {
    let mut bytes = Vec::new();
    std::fs::File::open(path)
        .and_then(|mut f| f.read_to_end(&mut bytes))
        .map_err(|e| RunError::io(path, e))?;
    decode(&bytes)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::LearningConfig;
    use crate::rng::{RngStreams, Stream};

    #[test]
    fn round_trip() {
        let l = LearningConfig {
            hidden_width: 5,
            ..LearningConfig::default()
        };
        let mut rng = RngStreams::fresh(1, Stream::PolicyInit);
        let p = Policy::new(&l, CriticVariant::Masc, &mut rng);
        let bytes = encode(&p, "abc123");
        let ck = decode(&bytes).unwrap();
        assert_eq!(ck.config_hash, "abc123");
        assert_eq!(ck.variant, CriticVariant::Masc);
        let mut q = Policy::new(&l, CriticVariant::Masc, &mut rng);
        assert_ne!(p, q);
        ck.restore_into(&mut q).unwrap();
        assert_eq!(p, q);

        let mut other = Policy::new(&l, CriticVariant::Ac, &mut rng);
        assert!(ck.restore_into(&mut other).is_err());
        assert!(decode(&bytes[..bytes.len() - 1]).is_err());
        let mut bad = bytes.clone();
        bad[0] = b'X';
        assert!(decode(&bad).is_err());
    }
}
