//! Exact sampling from `P_Θ`.
//!
//! The cycle through the smallest unused label has length `j` with
//! probability `θ_j·h_{n−j}/(n·h_n)`; the remaining labels then carry an
//! independent `P_Θ` permutation of size `n−j`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

use crate::error::{Error, Result};
use crate::measure::{normalization_constants, working_weights};
use crate::partitions::Partition;
use crate::weights::WeightSequence;

/// Generator for sample `index` of a run seeded with `seed`.
///
/// Each index gets its own ChaCha stream, so batches can be split across
/// threads without changing any individual draw.
pub fn rng_for(seed: u64, index: u64) -> ChaCha20Rng {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

#[derive(Debug, Clone)]
pub struct CycleSampler {
    n: usize,
    theta: Vec<f64>,
    h: Vec<f64>,
}

impl CycleSampler {
    pub fn new(theta: &WeightSequence, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::Usage("sampling needs n ≥ 1".into()));
        }
        let theta = working_weights::<f64>(theta);
        let h = normalization_constants::<f64>(&theta, n)?;
        if h[n] <= 0.0 || !h[n].is_finite() {
            return Err(Error::Degenerate(format!("{}: h_{n} = {}", theta.name(), h[n])));
        }
        Ok(CycleSampler {
            n,
            theta: theta.values::<f64>(n)?,
            h,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Cycle lengths in the order they are drawn.
    fn draw_lengths<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<usize> {
        let mut lengths = Vec::new();
        let mut remaining = self.n;
        while remaining > 0 {
            let weights = (1..=remaining).map(|j| self.theta[j - 1] * self.h[remaining - j]);
            let total: f64 = weights.clone().sum();
            let target = rng.random::<f64>() * total;
            let mut acc = 0.0;
            let mut chosen = 0;
            for (j, w) in (1..=remaining).zip(weights) {
                if w > 0.0 {
                    chosen = j;
                    acc += w;
                    if target < acc {
                        break;
                    }
                }
            }
            lengths.push(chosen);
            remaining -= chosen;
        }
        lengths
    }

    pub fn sample_cycle_type<R: Rng + ?Sized>(&self, rng: &mut R) -> Partition {
        Partition::from_cycle_lengths(self.draw_lengths(rng)).expect("positive lengths")
    }

    /// A permutation in one-line notation: entry `i` is the image of `i + 1`.
    pub fn sample_permutation<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<usize> {
        let lengths = self.draw_lengths(rng);
        let mut unused: Vec<usize> = (1..=self.n).collect();
        let mut image = vec![0usize; self.n];
        for len in lengths {
            // Smallest unused label opens the cycle; the other members are a
            // uniformly random ordered selection from the rest.
            let first = unused.remove(0);
            let mut cycle = vec![first];
            for i in 0..len - 1 {
                let pick = rng.random_range(i..unused.len());
                unused.swap(i, pick);
                cycle.push(unused[i]);
            }
            unused.drain(..len - 1);
            for w in cycle.windows(2) {
                image[w[0] - 1] = w[1];
            }
            image[cycle[len - 1] - 1] = first;
            unused.sort_unstable();
        }
        image
    }
}

pub fn sample_cycle_type(theta: &WeightSequence, n: usize, seed: u64) -> Result<Partition> {
    let sampler = CycleSampler::new(theta, n)?;
    Ok(sampler.sample_cycle_type(&mut rng_for(seed, 0)))
}

pub fn sample_permutation(theta: &WeightSequence, n: usize, seed: u64) -> Result<Vec<usize>> {
    let sampler = CycleSampler::new(theta, n)?;
    Ok(sampler.sample_permutation(&mut rng_for(seed, 0)))
}

/// Cycle lengths of a permutation in one-line notation.
pub fn cycle_type_of(perm: &[usize]) -> Result<Partition> {
    let n = perm.len();
    let mut seen = vec![false; n];
    let mut lengths = Vec::new();
    for start in 0..n {
        if seen[start] {
            continue;
        }
        let mut len = 0;
        let mut i = start;
        while !seen[i] {
            seen[i] = true;
            len += 1;
            i = perm[i]
                .checked_sub(1)
                .filter(|&j| j < n)
                .ok_or_else(|| Error::Usage("not a permutation".into()))?;
        }
        if i != start {
            return Err(Error::Usage("not a permutation".into()));
        }
        lengths.push(len);
    }
    Partition::from_cycle_lengths(lengths)
}
