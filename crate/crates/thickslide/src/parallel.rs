//! Multi-threaded paving. Each generation of the worklist is split into
//! contiguous chunks classified on scoped threads; the result is identical
//! to [`thickslide_core::paver::pave`].

use std::num::NonZeroUsize;
use std::thread;
use std::time::Instant;

use thickslide_core::interval::IntervalBox;
use thickslide_core::paver::{pave_with, PaveConfig, PaveError, Paving};
use thickslide_core::thickset::{BoxClass, SetExpr};

// Below this many boxes a generation is classified on the calling thread.
const MIN_PARALLEL_BATCH: usize = 256;

pub fn available_workers() -> usize {
    thread::available_parallelism().map_or(1, NonZeroUsize::get)
}

pub fn pave_parallel(
    set: &SetExpr,
    domain: &IntervalBox,
    config: PaveConfig,
    workers: usize,
) -> Result<Paving, PaveError> {
    let workers = workers.max(1);
    let start = Instant::now();
    let mut paving = pave_with(set, domain, config, |s, boxes| {
        classify_batch(s, boxes, workers)
    })?;
    paving.meta.elapsed = Some(start.elapsed());
    Ok(paving)
}

fn classify_batch(set: &SetExpr, boxes: &[IntervalBox], workers: usize) -> Vec<BoxClass> {
    if workers == 1 || boxes.len() < MIN_PARALLEL_BATCH {
        return boxes.iter().map(|b| set.classify(b)).collect();
    }
    let chunk = boxes.len().div_ceil(workers);
    thread::scope(|scope| {
        let handles: Vec<_> = boxes
            .chunks(chunk)
            .map(|part| {
                scope.spawn(move || part.iter().map(|b| set.classify(b)).collect::<Vec<_>>())
            })
            .collect();
        handles
            .into_iter()
            .flat_map(|h| h.join().expect("classification worker panicked"))
            .collect()
    })
}
