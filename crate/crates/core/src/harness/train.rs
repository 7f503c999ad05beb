//! Training and frozen evaluation loops.

use super::episode::{run_episode, Environment, Operator, SlotSnapshot};
use super::metrics::EpisodeSummary;
use crate::baselines::BaselineKind;
use crate::error::RunError;
use crate::marl::buffer::TrajectoryBuffer;
use crate::marl::policy::Policy;
use crate::marl::ppo::PpoTrainer;
use crate::marl::CriticVariant;
use crate::rng::{RngStreams, Stream};

/// Result of a training run. On a numeric failure `policy` is the last
/// parameters that produced finite updates and `failure` holds the error.
#[derive(Debug)]
pub struct TrainRun {
    pub policy: Policy,
    pub episodes: Vec<EpisodeSummary>,
    pub failure: Option<RunError>,
}

/// Alternate one exploring episode and one update over it. `observe`
/// sees every episode's slots as they are produced.
pub fn train(
    env: &Environment,
    variant: CriticVariant,
    episodes: usize,
    mut observe: impl FnMut(&[SlotSnapshot]) -> Result<(), RunError>,
) -> Result<TrainRun, RunError> {
    let cfg = &env.cfg;
    let mut streams = RngStreams::new(cfg.seed);
    let mut policy = Policy::new(&cfg.learning, variant, streams.get(Stream::PolicyInit));
    let mut trainer = PpoTrainer::new(&cfg.learning, &policy);
    let mut buffer = TrajectoryBuffer::new(cfg.learning.replay_capacity);
    let mut summaries = Vec::with_capacity(episodes);
    for e in 0..episodes {
        buffer.start_window();
        let slots = run_episode(
            env,
            Operator::Learned {
                policy: &policy,
                explore: true,
            },
            &mut streams,
            e,
            Some(&mut buffer),
        )?;
        observe(&slots)?;
        let last_good = policy.clone();
        match trainer.update(&mut policy, &buffer, streams.get(Stream::Update)) {
            Ok(stats) => summaries.push(EpisodeSummary::from_slots(
                e,
                &slots,
                cfg.utility.latency_cap_s,
                Some(stats),
            )),
            Err(err @ RunError::NonFinite { .. }) => {
                return Ok(TrainRun {
                    policy: last_good,
                    episodes: summaries,
                    failure: Some(err),
                })
            }
            Err(err) => return Err(err),
        }
    }
    Ok(TrainRun {
        policy,
        episodes: summaries,
        failure: None,
    })
}

/// The operator a frozen evaluation runs.
#[derive(Debug, Clone, Copy)]
pub enum Evaluated<'a> {
    Policy(&'a Policy),
    Baseline(BaselineKind),
}

/// Rollouts with a frozen operator; learned policies act on their means.
pub fn evaluate(
    env: &Environment,
    who: Evaluated<'_>,
    episodes: usize,
    mut observe: impl FnMut(&[SlotSnapshot]) -> Result<(), RunError>,
) -> Result<Vec<EpisodeSummary>, RunError> {
    let mut streams = RngStreams::new(env.cfg.seed);
    let operator = match who {
        Evaluated::Policy(policy) => Operator::Learned {
            policy,
            explore: false,
        },
        Evaluated::Baseline(k) => Operator::Baseline(k),
    };
    let mut out = Vec::with_capacity(episodes);
    for e in 0..episodes {
        let slots = run_episode(env, operator, &mut streams, e, None)?;
        observe(&slots)?;
        out.push(EpisodeSummary::from_slots(e, &slots, env.cfg.utility.latency_cap_s, None));
    }
    Ok(out)
}
