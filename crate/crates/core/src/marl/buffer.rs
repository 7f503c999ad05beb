//! Per-slot trajectory storage with UL-then-DL record ordering.

use std::collections::VecDeque;

use super::policy::Sample;
use super::Features;
use crate::error::RunError;

#[derive(Debug, Clone, PartialEq)]
pub struct UlRecord {
    pub state: Vec<Features>,
    pub offload: Vec<bool>,
    pub log_prob: Vec<f64>,
    pub reward: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DlRecord {
    pub state: Vec<Features>,
    pub sample: Vec<f64>,
    pub log_prob: Vec<f64>,
    pub reward: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SlotRecord {
    pub ul: UlRecord,
    pub dl: Option<DlRecord>,
    pub global_reward: Option<f64>,
}

impl SlotRecord {
    pub fn is_complete(&self) -> bool {
        self.dl.is_some() && self.global_reward.is_some()
    }

    pub fn sample(&self) -> Option<Sample> {
        let dl = self.dl.as_ref()?;
        Some(Sample {
            xu: self.ul.state.clone(),
            xd: dl.state.clone(),
            offload: self.ul.offload.clone(),
            ul_log_prob: self.ul.log_prob.clone(),
            dl_sample: dl.sample.clone(),
            dl_log_prob: dl.log_prob.clone(),
        })
    }
}

/// Bounded FIFO of slot records; the current update window is the tail.
#[derive(Debug, Clone)]
pub struct TrajectoryBuffer {
    capacity: usize,
    records: VecDeque<SlotRecord>,
    window_len: usize,
}

impl TrajectoryBuffer {
    pub fn new(capacity: usize) -> Self {
        Self {
            capacity,
            records: VecDeque::new(),
            window_len: 0,
        }
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn start_window(&mut self) {
        self.window_len = 0;
    }

    fn incomplete_tail(&self) -> bool {
        self.window_len > 0 && self.records.back().is_some_and(|r| !r.is_complete())
    }

    pub fn push_ul(&mut self, ul: UlRecord) -> Result<(), RunError> {
        if self.incomplete_tail() {
            return Err(RunError::IncompleteBuffer("UL record before previous slot completed".into()));
        }
        if self.records.len() == self.capacity {
            self.records.pop_front();
        }
        self.records.push_back(SlotRecord {
            ul,
            dl: None,
            global_reward: None,
        });
        self.window_len = (self.window_len + 1).min(self.capacity);
        Ok(())
    }

    pub fn push_dl(&mut self, dl: DlRecord) -> Result<(), RunError> {
        match self.records.back_mut() {
            Some(r) if self.window_len > 0 && r.dl.is_none() => {
                r.dl = Some(dl);
                Ok(())
            }
            _ => Err(RunError::IncompleteBuffer("DL record without a pending UL record".into())),
        }
    }

    pub fn push_global(&mut self, reward: f64) -> Result<(), RunError> {
        match self.records.back_mut() {
            Some(r) if self.window_len > 0 && r.dl.is_some() && r.global_reward.is_none() => {
                r.global_reward = Some(reward);
                Ok(())
            }
            _ => Err(RunError::IncompleteBuffer("global reward out of order".into())),
        }
    }

    /// The records of the current window, all complete.
    pub fn window(&self) -> Result<Vec<&SlotRecord>, RunError> {
        let start = self.records.len() - self.window_len;
        let w: Vec<&SlotRecord> = self.records.range(start..).collect();
        if w.is_empty() {
            return Err(RunError::IncompleteBuffer("empty window".into()));
        }
        if let Some(i) = w.iter().position(|r| !r.is_complete()) {
            return Err(RunError::IncompleteBuffer(format!("slot {i} of the window is incomplete")));
        }
        Ok(w)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ul() -> UlRecord {
        UlRecord {
            state: vec![[0.0; 3]],
            offload: vec![false],
            log_prob: vec![0.0],
            reward: 1.0,
        }
    }

    fn dl() -> DlRecord {
        DlRecord {
            state: vec![[0.0; 3]],
            sample: vec![0.5],
            log_prob: vec![0.0],
            reward: 0.0,
        }
    }

    #[test]
    fn ordering_is_enforced() {
        let mut b = TrajectoryBuffer::new(4);
        b.start_window();
        assert!(b.push_dl(dl()).is_err());
        b.push_ul(ul()).unwrap();
        assert!(b.push_global(0.0).is_err());
        assert!(b.window().is_err());
        assert!(b.push_ul(ul()).is_err());
        b.push_dl(dl()).unwrap();
        b.push_global(-1.0).unwrap();
        assert_eq!(b.window().unwrap().len(), 1);
    }

    #[test]
    fn capacity_evicts_oldest() {
        let mut b = TrajectoryBuffer::new(3);
        b.start_window();
        for i in 0..5 {
            b.push_ul(ul()).unwrap();
            b.push_dl(dl()).unwrap();
            b.push_global(i as f64).unwrap();
        }
        assert_eq!(b.len(), 3);
        let w = b.window().unwrap();
        assert_eq!(w.len(), 3);
        assert_eq!(w[0].global_reward, Some(2.0));
        b.start_window();
        assert!(b.window().is_err());
    }
}
