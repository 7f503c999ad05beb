//! The operator's learning stack: permutation-invariant encoders, a
//! score-based UL actor, a Gaussian DL actor, three critic layouts, rewards,
//! GAE and clipped policy-gradient updates.

pub mod buffer;
pub mod checkpoint;
pub mod gae;
pub mod nn;
pub mod policy;
pub mod ppo;
pub mod reward;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::config::ScenarioConfig;
use crate::error::ModelError;
use crate::requests::TaskSpec;

/// Per-user feature tuple.
pub type Features = [f64; 3];

/// Critic layouts. AHMRL has UL, DL and global heads; MASC shares one
/// global critic; AC keeps independent UL and DL critics.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CriticVariant {
    Ahmrl,
    Masc,
    Ac,
}

impl CriticVariant {
    pub const ALL: [CriticVariant; 3] = [CriticVariant::Ahmrl, CriticVariant::Masc, CriticVariant::Ac];

    pub fn name(self) -> &'static str {
        match self {
            CriticVariant::Ahmrl => "ahmrl",
            CriticVariant::Masc => "masc",
            CriticVariant::Ac => "ac",
        }
    }

    /// Which of the (u, d, g) value heads exist.
    pub fn heads(self) -> [bool; 3] {
        match self {
            CriticVariant::Ahmrl => [true, true, true],
            CriticVariant::Masc => [false, false, true],
            CriticVariant::Ac => [true, true, false],
        }
    }

    pub fn code(self) -> u8 {
        match self {
            CriticVariant::Ahmrl => 1,
            CriticVariant::Masc => 2,
            CriticVariant::Ac => 3,
        }
    }

    pub fn from_code(c: u8) -> Option<Self> {
        Self::ALL.into_iter().find(|v| v.code() == c)
    }
}

impl fmt::Display for CriticVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for CriticVariant {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "ahmrl" => Ok(CriticVariant::Ahmrl),
            "masc" => Ok(CriticVariant::Masc),
            "ac" => Ok(CriticVariant::Ac),
            other => Err(format!("unknown architecture `{other}` (expected ahmrl, masc or ac)")),
        }
    }
}

const HEAD_NAMES: [&str; 3] = ["UL", "DL", "global"];

fn need(variant: CriticVariant, head: usize, v: Option<f64>) -> Result<f64, ModelError> {
    v.ok_or(ModelError::MissingCriticHead {
        variant: variant.name(),
        head: HEAD_NAMES[head],
    })
}

/// AHMRL: (A_u + A_g, A_d + A_g); MASC: (A_g, A_g); AC: (A_u, A_d).
pub fn effective_advantages(
    variant: CriticVariant,
    a_u: Option<f64>,
    a_d: Option<f64>,
    a_g: Option<f64>,
) -> Result<(f64, f64), ModelError> {
    match variant {
        CriticVariant::Ahmrl => {
            let g = need(variant, 2, a_g)?;
            Ok((need(variant, 0, a_u)? + g, need(variant, 1, a_d)? + g))
        }
        CriticVariant::Masc => {
            let g = need(variant, 2, a_g)?;
            Ok((g, g))
        }
        CriticVariant::Ac => Ok((need(variant, 0, a_u)?, need(variant, 1, a_d)?)),
    }
}

/// AHMRL: w_u L^u + w_d L^d + w_g L^g; MASC: L^g; AC: L^u + L^d.
pub fn combine_critic_losses(
    variant: CriticVariant,
    weights: [f64; 3],
    l_u: Option<f64>,
    l_d: Option<f64>,
    l_g: Option<f64>,
) -> Result<f64, ModelError> {
    match variant {
        CriticVariant::Ahmrl => Ok(weights[0] * need(variant, 0, l_u)?
            + weights[1] * need(variant, 1, l_d)?
            + weights[2] * need(variant, 2, l_g)?),
        CriticVariant::Masc => need(variant, 2, l_g),
        CriticVariant::Ac => Ok(need(variant, 0, l_u)? + need(variant, 1, l_d)?),
    }
}

/// Loss weight each head's squared error carries under `variant`.
pub fn critic_head_weights(variant: CriticVariant, weights: [f64; 3]) -> [f64; 3] {
    match variant {
        CriticVariant::Ahmrl => weights,
        CriticVariant::Masc => [0.0, 0.0, 1.0],
        CriticVariant::Ac => [1.0, 1.0, 0.0],
    }
}

/// UL features (μ_m / F, I_m / I_hi, p_m / p_ul); all zero for idle users.
pub fn ul_state(cfg: &ScenarioConfig, requests: &[usize], tasks: &[Option<TaskSpec>]) -> Vec<Features> {
    let f = cfg.requests.num_tasks as f64;
    let (_, i_hi) = cfg.task_size_range_bits();
    requests
        .iter()
        .zip(tasks)
        .map(|(&r, t)| match t {
            Some(t) => [r as f64 / f, t.bits / i_hi, 1.0],
            None => [0.0; 3],
        })
        .collect()
}

/// DL features (o_m, I'_m / (q_hi I_hi), I_m / I_hi).
pub fn dl_state(cfg: &ScenarioConfig, offload: &[bool], tasks: &[Option<TaskSpec>]) -> Vec<Features> {
    let (_, i_hi) = cfg.task_size_range_bits();
    let q_hi = cfg.tasks.render_slope_range[1];
    offload
        .iter()
        .zip(tasks)
        .map(|(&o, t)| {
            let o = if o { 1.0 } else { 0.0 };
            match t {
                Some(t) => [o, t.rendered_bits() / (q_hi * i_hi), t.bits / i_hi],
                None => [o, 0.0, 0.0],
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn effective_advantage_rows() {
        use CriticVariant::*;
        assert_eq!(effective_advantages(Ahmrl, Some(1.0), Some(2.0), Some(3.0)).unwrap(), (4.0, 5.0));
        assert_eq!(effective_advantages(Masc, None, None, Some(3.0)).unwrap(), (3.0, 3.0));
        assert_eq!(effective_advantages(Ac, Some(1.0), Some(2.0), None).unwrap(), (1.0, 2.0));
        assert!(matches!(
            effective_advantages(Masc, Some(1.0), Some(2.0), None),
            Err(ModelError::MissingCriticHead { .. })
        ));
        assert!(effective_advantages(Ahmrl, Some(1.0), None, Some(3.0)).is_err());
    }

    #[test]
    fn critic_loss_combination() {
        use CriticVariant::*;
        let w = [0.25, 0.25, 0.5];
        assert_eq!(combine_critic_losses(Ahmrl, w, Some(4.0), Some(4.0), Some(2.0)).unwrap(), 3.0);
        assert_eq!(combine_critic_losses(Masc, w, None, None, Some(2.0)).unwrap(), 2.0);
        assert_eq!(combine_critic_losses(Ac, w, Some(4.0), Some(1.0), None).unwrap(), 5.0);
        assert!(combine_critic_losses(Ac, w, Some(4.0), None, None).is_err());
    }

    #[test]
    fn variant_names_round_trip() {
        for v in CriticVariant::ALL {
            assert_eq!(v.name().parse::<CriticVariant>().unwrap(), v);
            assert_eq!(CriticVariant::from_code(v.code()), Some(v));
        }
        assert!("ppo".parse::<CriticVariant>().is_err());
    }
}
