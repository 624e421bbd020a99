//! Monte-Carlo falsification of a paving.
//!
//! Random points are pulled onto the boundary of a random region leaf by
//! Newton steps, with the parameters fixed to a thin instance inside their
//! box. A point where the thin sliding conditions hold belongs to the
//! sliding surface of that instance, which the outer approximation must
//! contain: finding it in an OUT box is a violation.

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use thickslide_core::expr::Expr;
use thickslide_core::interval::IntervalBox;
use thickslide_core::paver::Paving;
use thickslide_core::sliding::SlidingError;
use thickslide_core::thickset::{BoxClass, ThickError};

use crate::system::SystemDef;

const NEWTON_STEPS: usize = 60;
const NEWTON_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CheckConfig {
    pub samples: usize,
    /// Number of random parameter instances; 0 uses only the centre of
    /// the parameter box.
    pub param_samples: usize,
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Violation {
    pub x: Vec<f64>,
    pub p: Vec<f64>,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct CheckReport {
    pub samples: usize,
    /// Samples that converged onto a leaf boundary inside the domain.
    pub on_boundary: usize,
    /// Samples that satisfied the thin sliding conditions.
    pub sliding: usize,
    pub violations: Vec<Violation>,
}

#[derive(Debug, thiserror::Error)]
pub enum CheckError {
    #[error("paving has dimension {paving}, system has {system} states")]
    Dimension { paving: usize, system: usize },
    #[error(transparent)]
    Sliding(#[from] SlidingError),
    #[error(transparent)]
    Thick(#[from] ThickError),
}

fn parameter_instances(
    params: &IntervalBox,
    config: &CheckConfig,
    rng: &mut StdRng,
) -> Vec<Vec<f64>> {
    if config.param_samples == 0 {
        return vec![params.center()];
    }
    (0..config.param_samples)
        .map(|_| {
            params
                .iter()
                .map(|r| rng.gen_range(r.lo()..=r.hi()))
                .collect()
        })
        .collect()
}

fn project(c: &Expr, grad: &[Expr], mut x: Vec<f64>, p: &[f64]) -> Option<Vec<f64>> {
    for _ in 0..NEWTON_STEPS {
        let v = c.eval_point(&x, p);
        if !v.is_finite() {
            return None;
        }
        if v.abs() <= NEWTON_TOL {
            return Some(x);
        }
        let g: Vec<f64> = grad.iter().map(|d| d.eval_point(&x, p)).collect();
        let norm2: f64 = g.iter().map(|d| d * d).sum();
        if !norm2.is_finite() || norm2 <= 1e-300 {
            return None;
        }
        for (xi, gi) in x.iter_mut().zip(&g) {
            *xi -= v * gi / norm2;
        }
    }
    None
}

pub fn check_paving(
    def: &SystemDef,
    paving: &Paving,
    config: &CheckConfig,
) -> Result<CheckReport, CheckError> {
    let n = def.states.len();
    if paving.domain.dim() != n {
        return Err(CheckError::Dimension {
            paving: paving.domain.dim(),
            system: n,
        });
    }
    let sliding = def.sliding_set()?;
    let leaves: Vec<(Expr, Vec<Expr>)> = def
        .region
        .leaves()
        .into_iter()
        .map(|(c, _)| (c.clone(), (0..n).map(|i| c.differentiate(i)).collect()))
        .collect();
    let mut rng = StdRng::seed_from_u64(config.seed);
    let instances = parameter_instances(&def.param_box(), config, &mut rng);
    let mut report = CheckReport {
        samples: config.samples,
        ..CheckReport::default()
    };
    for k in 0..config.samples {
        let p = &instances[k % instances.len()];
        let (c, grad) = &leaves[rng.gen_range(0..leaves.len())];
        let start: Vec<f64> = paving
            .domain
            .iter()
            .map(|r| rng.gen_range(r.lo()..=r.hi()))
            .collect();
        let Some(x) = project(c, grad, start, p) else {
            continue;
        };
        let Ok(class) = paving.query(&x) else {
            continue;
        };
        report.on_boundary += 1;
        if !sliding.point_classify_thin(&x, p)?.is_member() {
            continue;
        }
        report.sliding += 1;
        if class == BoxClass::Out {
            report.violations.push(Violation { x, p: p.clone() });
        }
    }
    Ok(report)
}
