use std::collections::HashMap;
use std::sync::{Arc, RwLock};

use oddsci_core::{DistributionSource, Model, OutcomeDistribution, Result};

/// [`Model`] behind a read-mostly cache keyed by the bits of `r`. Safe to
/// share between threads; concurrent misses on the same `r` may compute the
/// distribution twice, and the first insertion wins.
#[derive(Debug)]
pub struct SharedModel {
    model: Model,
    cache: RwLock<HashMap<u64, Arc<OutcomeDistribution>>>,
}

impl SharedModel {
    pub fn new(n_a: u32, n_b: u32) -> Result<Self> {
        Ok(SharedModel {
            model: Model::new(n_a, n_b)?,
            cache: RwLock::new(HashMap::new()),
        })
    }

    pub fn cached(&self) -> usize {
        self.cache.read().unwrap_or_else(|e| e.into_inner()).len()
    }

    pub fn clear(&self) {
        self.cache
            .write()
            .unwrap_or_else(|e| e.into_inner())
            .clear();
    }
}

impl DistributionSource for SharedModel {
    fn n_a(&self) -> u32 {
        self.model.n_a()
    }

    fn n_b(&self) -> u32 {
        self.model.n_b()
    }

    fn distribution(&self, r: f64) -> Result<Arc<OutcomeDistribution>> {
        let key = r.to_bits();
        if let Some(d) = self
            .cache
            .read()
            .unwrap_or_else(|e| e.into_inner())
            .get(&key)
        {
            return Ok(Arc::clone(d));
        }
        let d = Arc::new(self.model.compute(r)?);
        let mut cache = self.cache.write().unwrap_or_else(|e| e.into_inner());
        Ok(Arc::clone(cache.entry(key).or_insert(d)))
    }
}
