//! Chambers–Mallows–Stuck sampling of S_α(σ, δ).

use std::f64::consts::{FRAC_PI_2, PI};

use rand::RngCore;
use rayon::prelude::*;

use super::StableParams;
use crate::batch::SampleBatch;
use crate::error::{Error, Result};
use crate::rng::{open01, tags, Substreams, CHUNK};

/// Per-law constants of the transform.
#[derive(Debug, Clone, Copy)]
pub struct CmsConstants {
    alpha: f64,
    sigma: f64,
    b: f64,
    s: f64,
}

impl CmsConstants {
    pub fn new(p: &StableParams) -> Self {
        let t = p.delta * (FRAC_PI_2 * p.alpha).tan();
        CmsConstants {
            alpha: p.alpha,
            sigma: p.sigma,
            b: t.atan() / p.alpha,
            s: (1.0 + t * t).powf(0.5 / p.alpha),
        }
    }
}

/// One draw from the law described by `c`.
#[inline]
pub fn stable_draw<R: RngCore + ?Sized>(rng: &mut R, c: &CmsConstants) -> f64 {
    let v = PI * (open01(rng.next_u64()) - 0.5);
    let w = -open01(rng.next_u64()).ln();
    let a = c.alpha;
    let avb = a * (v + c.b);
    let x = c.s * avb.sin() / v.cos().powf(1.0 / a) * ((v - avb).cos() / w).powf((1.0 - a) / a);
    c.sigma * x
}

/// `n` draws; draw `i` comes from substream `i / CHUNK`, so the output does not depend on
/// the number of worker threads.
pub fn sample_stable(p: &StableParams, n: usize, seed: u64) -> Result<SampleBatch> {
    if n == 0 {
        return Err(Error::EmptyBatch);
    }
    let c = CmsConstants::new(p);
    let streams = Substreams::new(seed, tags::STABLE);
    let mut values = vec![0.0; n];
    values
        .par_chunks_mut(CHUNK)
        .enumerate()
        .for_each(|(chunk, out)| {
            let mut rng = streams.stream(chunk as u64);
            for v in out.iter_mut() {
                *v = stable_draw(&mut rng, &c);
            }
        });
    Ok(SampleBatch::new(
        values,
        seed,
        format!("stable alpha={} sigma={} delta={}", p.alpha, p.sigma, p.delta),
    ))
}
