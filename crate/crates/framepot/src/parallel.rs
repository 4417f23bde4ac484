//! Multi-threaded trace evaluation.

use std::ops::Range;
use std::thread;

use framepot_core::estimator::{evaluate_sample, probe_width, BatchEvaluator};
use framepot_core::{Contractor, EnsembleSpec, TraceSample};

/// Splits each batch into contiguous chunks, one per worker. Every sample's
/// randomness comes from its own index, so the output does not depend on
/// the worker count.
#[derive(Debug, Clone)]
pub struct ThreadedEvaluator {
    contractors: Vec<Contractor>,
}

impl ThreadedEvaluator {
    pub fn new(workers: usize, width_cap: usize) -> Self {
        Self { contractors: vec![Contractor::new(width_cap); workers.max(1)] }
    }

    pub fn workers(&self) -> usize {
        self.contractors.len()
    }
}

impl BatchEvaluator for ThreadedEvaluator {
    fn evaluate(
        &mut self,
        spec: &EnsembleSpec,
        master_seed: u64,
        indices: Range<u64>,
    ) -> framepot_core::Result<Vec<TraceSample>> {
        let len = indices.end.saturating_sub(indices.start);
        if len == 0 {
            return Ok(Vec::new());
        }
        let workers = (self.contractors.len() as u64).min(len);
        if workers == 1 {
            let c = &mut self.contractors[0];
            return indices.map(|i| evaluate_sample(spec, master_seed, i, c)).collect();
        }
        let chunk = len.div_ceil(workers);
        let results: Vec<framepot_core::Result<Vec<TraceSample>>> = thread::scope(|scope| {
            let handles: Vec<_> = self
                .contractors
                .iter_mut()
                .take(workers as usize)
                .enumerate()
                .map(|(w, contractor)| {
                    let start = indices.start + w as u64 * chunk;
                    let end = (start + chunk).min(indices.end);
                    scope.spawn(move || (start..end).map(|i| evaluate_sample(spec, master_seed, i, contractor)).collect())
                })
                .collect();
            handles.into_iter().map(|h| h.join().expect("worker panicked")).collect()
        });
        let mut out = Vec::with_capacity(len as usize);
        for r in results {
            out.extend(r?);
        }
        Ok(out)
    }

    fn probe_width(&mut self, spec: &EnsembleSpec, master_seed: u64, index: u64) -> framepot_core::Result<usize> {
        probe_width(spec, master_seed, index, &mut self.contractors[0])
    }
}
