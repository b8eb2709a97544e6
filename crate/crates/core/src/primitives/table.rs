use std::collections::HashMap;
use std::sync::Mutex;

use rand::SeedableRng;

use crate::bits::BitString;
use crate::qsim::rng::SimRng;

/// Lazily sampled uniformly random function with a fixed output width.
///
/// Outputs are drawn from a seeded generator on first query and memoized;
/// the mapping lives behind a mutex so concurrent first queries of the same
/// input agree on one value.
#[derive(Debug)]
pub struct RandomFunctionTable {
    output_width: usize,
    inner: Mutex<TableState>,
}

#[derive(Debug)]
struct TableState {
    rng: SimRng,
    entries: HashMap<BitString, BitString>,
}

impl RandomFunctionTable {
    pub fn new(output_width: usize, seed: u64) -> Self {
        Self {
            output_width,
            inner: Mutex::new(TableState { rng: SimRng::seed_from_u64(seed), entries: HashMap::new() }),
        }
    }

    /// A table with every value fixed in advance (used by exhaustive oracles).
    pub fn from_entries(output_width: usize, entries: HashMap<BitString, BitString>) -> Self {
        assert!(entries.values().all(|v| v.len() == output_width));
        Self { output_width, inner: Mutex::new(TableState { rng: SimRng::seed_from_u64(0), entries }) }
    }

    pub fn output_width(&self) -> usize {
        self.output_width
    }

    pub fn eval(&self, x: &BitString) -> BitString {
        let mut state = self.inner.lock().expect("random function table poisoned");
        if let Some(v) = state.entries.get(x) {
            return v.clone();
        }
        let v = BitString::random(self.output_width, &mut state.rng);
        state.entries.insert(x.clone(), v.clone());
        v
    }

    /// Number of inputs sampled so far.
    pub fn len(&self) -> usize {
        self.inner.lock().expect("random function table poisoned").entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}
