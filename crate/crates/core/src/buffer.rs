//! FIFO replay buffers and the symmetric dual-domain minibatch sampler.

use crate::domain::{Domain, Transition};
use crate::error::CoreError;
use crate::rng::StreamRng;
use rand::Rng;
use std::collections::VecDeque;

pub const DEFAULT_CAPACITY: usize = 1_000_000;

/// FIFO ring of transitions: inserting past capacity evicts the oldest entry.
#[derive(Debug, Clone)]
pub struct ReplayBuffer {
    storage: VecDeque<Transition>,
    capacity: usize,
    domain: Domain,
}

impl ReplayBuffer {
    pub fn new(capacity: usize, domain: Domain) -> Self {
        assert!(capacity > 0, "capacity must be positive");
        ReplayBuffer {
            storage: VecDeque::with_capacity(capacity.min(1 << 20)),
            capacity,
            domain,
        }
    }

    pub fn with_default_capacity(domain: Domain) -> Self {
        Self::new(DEFAULT_CAPACITY, domain)
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn len(&self) -> usize {
        self.storage.len()
    }

    pub fn is_empty(&self) -> bool {
        self.storage.is_empty()
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    /// Inserts a transition, stamping it with this buffer's domain.
    pub fn push(&mut self, mut t: Transition) {
        t.domain = self.domain;
        if self.storage.len() == self.capacity {
            self.storage.pop_front();
        }
        self.storage.push_back(t);
    }

    pub fn iter(&self) -> impl Iterator<Item = &Transition> {
        self.storage.iter()
    }

    pub fn get(&self, idx: usize) -> Option<&Transition> {
        self.storage.get(idx)
    }

    /// Uniform with-replacement draw of `n` transitions.
    pub fn sample(&self, n: usize, rng: &mut StreamRng) -> Result<Vec<Transition>, CoreError> {
        if self.is_empty() {
            return Err(CoreError::EmptyBuffer(self.domain));
        }
        Ok((0..n)
            .map(|_| self.storage[rng.random_range(0..self.storage.len())].clone())
            .collect())
    }
}

/// A paired source/target minibatch, as drawn by [`sample_symmetric`].
#[derive(Debug, Clone)]
pub struct DualBatch {
    pub src: Vec<Transition>,
    pub tar: Vec<Transition>,
}

/// Paired source/target replay stores.
#[derive(Debug, Clone)]
pub struct DualBuffers {
    pub src: ReplayBuffer,
    pub tar: ReplayBuffer,
}

impl DualBuffers {
    pub fn new(capacity: usize) -> Self {
        DualBuffers {
            src: ReplayBuffer::new(capacity, Domain::Source),
            tar: ReplayBuffer::new(capacity, Domain::Target),
        }
    }

    pub fn sample_symmetric(
        &self,
        n_src: usize,
        n_tar: usize,
        rng: &mut StreamRng,
    ) -> Result<DualBatch, CoreError> {
        sample_symmetric(&self.src, &self.tar, n_src, n_tar, rng)
    }
}

/// Draws `n_src` source and `n_tar` target transitions uniformly with
/// replacement. Source draws are consumed from the RNG before target draws.
pub fn sample_symmetric(
    src: &ReplayBuffer,
    tar: &ReplayBuffer,
    n_src: usize,
    n_tar: usize,
    rng: &mut StreamRng,
) -> Result<DualBatch, CoreError> {
    if src.is_empty() {
        return Err(CoreError::EmptyBuffer(Domain::Source));
    }
    if tar.is_empty() {
        return Err(CoreError::EmptyBuffer(Domain::Target));
    }
    let src = src.sample(n_src, rng)?;
    let tar = tar.sample(n_tar, rng)?;
    debug_assert!(src.iter().all(|t| t.domain == Domain::Source));
    debug_assert!(tar.iter().all(|t| t.domain == Domain::Target));
    Ok(DualBatch { src, tar })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream_rng;

    fn transition(tag: f64) -> Transition {
        Transition {
            state: vec![tag, 0.0],
            action: vec![0.0],
            reward: tag,
            next_state: vec![tag, 1.0],
            done: false,
            domain: Domain::Source,
        }
    }

    #[test]
    fn fifo_eviction_keeps_last_capacity_items() {
        let capacity = 16;
        let extra = 5;
        let mut buf = ReplayBuffer::new(capacity, Domain::Source);
        for i in 0..(capacity + extra) {
            buf.push(transition(i as f64));
        }
        assert_eq!(buf.len(), capacity);
        let rewards: Vec<f64> = buf.iter().map(|t| t.reward).collect();
        let expected: Vec<f64> = (extra..capacity + extra).map(|i| i as f64).collect();
        assert_eq!(rewards, expected);
    }

    #[test]
    fn sampling_is_near_uniform() {
        let mut buf = ReplayBuffer::new(64, Domain::Target);
        for i in 0..10 {
            buf.push(transition(i as f64));
        }
        let mut rng = stream_rng(7, "sampler");
        let draws = 100_000usize;
        let mut counts = [0usize; 10];
        for t in buf.sample(draws, &mut rng).unwrap() {
            counts[t.reward as usize] += 1;
        }
        for &c in &counts {
            let freq = c as f64 / draws as f64;
            assert!((freq - 0.1).abs() < 0.005, "freq {freq} outside ±5% of uniform");
        }
    }

    #[test]
    fn singleton_buffer_repeats_sole_entry() {
        let mut src = ReplayBuffer::new(8, Domain::Source);
        let mut tar = ReplayBuffer::new(8, Domain::Target);
        src.push(transition(3.0));
        tar.push(transition(4.0));
        let mut rng = stream_rng(0, "sampler");
        let batch = sample_symmetric(&src, &tar, 128, 128, &mut rng).unwrap();
        assert_eq!(batch.src.len(), 128);
        assert!(batch.src.iter().all(|t| t.reward == 3.0));
        assert!(batch.tar.iter().all(|t| t.domain == Domain::Target));
    }

    #[test]
    fn empty_target_buffer_is_an_error() {
        let mut src = ReplayBuffer::new(8, Domain::Source);
        src.push(transition(1.0));
        let tar = ReplayBuffer::new(8, Domain::Target);
        let mut rng = stream_rng(0, "sampler");
        let err = sample_symmetric(&src, &tar, 4, 4, &mut rng).unwrap_err();
        assert_eq!(err, CoreError::EmptyBuffer(Domain::Target));
    }
}
