//! Haar-random reference values, estimated by sampling.

use std::collections::BTreeMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::circuit::{StateVector, C64};
use crate::error::{Error, Result};
use crate::measures::{
    block_spectrum, negativity, odd_entropy, partial_transpose, reduced_density_matrix,
    renyi_entropy, von_neumann_entropy, TriPartition,
};

pub const DEFAULT_HAAR_SAMPLES: usize = 200;

/// Normalized vector of `2^L` i.i.d. standard complex Gaussians.
pub fn sample_haar_state(sites: usize, seed: u64) -> Result<StateVector> {
    sample_from(sites, ChaCha8Rng::seed_from_u64(seed))
}

/// Sample `index` of the stream seeded by `seed`; independent of how samples
/// are scheduled across threads.
pub fn sample_haar_state_indexed(sites: usize, seed: u64, index: u64) -> Result<StateVector> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    sample_from(sites, rng)
}

fn sample_from(sites: usize, mut rng: ChaCha8Rng) -> Result<StateVector> {
    if sites < 2 {
        return Err(Error::TooFewSites { sites });
    }
    let amps = (0..1usize << sites)
        .map(|_| {
            C64::new(
                StandardNormal.sample(&mut rng),
                StandardNormal.sample(&mut rng),
            )
        })
        .collect();
    let mut state = StateVector::new(sites, amps)?;
    state.normalize();
    Ok(state)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum HaarMeasure {
    Negativity,
    OddEntropy,
    RenyiA(f64),
    RenyiB(f64),
    RenyiAB(f64),
    MutualInformation(f64),
    VonNeumannAB,
}

impl HaarMeasure {
    /// Column name used in the experiment CSV.
    pub fn label(&self) -> String {
        match self {
            Self::Negativity => "E".into(),
            Self::OddEntropy => "E_odd".into(),
            Self::RenyiA(a) => format!("S_A_{a}"),
            Self::RenyiB(a) => format!("S_B_{a}"),
            Self::RenyiAB(a) => format!("S_AB_{a}"),
            Self::MutualInformation(a) => format!("I_{a}"),
            Self::VonNeumannAB => "S_vN_AB".into(),
        }
    }

    fn alpha(&self) -> Option<f64> {
        match *self {
            Self::RenyiA(a) | Self::RenyiB(a) | Self::RenyiAB(a) | Self::MutualInformation(a) => {
                Some(a)
            }
            _ => None,
        }
    }

    fn needs_partial_transpose(&self) -> bool {
        matches!(self, Self::Negativity | Self::OddEntropy)
    }

    /// Every measure that has a CSV column, for the given α list.
    pub fn all(alphas: &[f64]) -> Vec<Self> {
        let mut out = vec![Self::Negativity, Self::OddEntropy];
        for &a in alphas {
            out.extend([
                Self::RenyiA(a),
                Self::RenyiB(a),
                Self::RenyiAB(a),
                Self::MutualInformation(a),
            ]);
        }
        out.push(Self::VonNeumannAB);
        out
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HaarEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub samples: usize,
    pub seed: u64,
}

impl HaarEstimate {
    pub fn from_values(values: &[f64], seed: u64) -> Result<Self> {
        let n = values.len();
        if n < 2 {
            return Err(Error::TooFewSamples(n));
        }
        let mean = values.iter().sum::<f64>() / n as f64;
        let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
        Ok(Self {
            mean,
            std_error: (var / n as f64).sqrt(),
            samples: n,
            seed,
        })
    }
}

/// Estimates keyed by CSV column name.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HaarReference {
    #[serde(rename = "L")]
    pub sites: usize,
    pub partition: TriPartition,
    pub samples: usize,
    pub seed: u64,
    pub estimates: BTreeMap<String, HaarEstimate>,
}

pub fn haar_reference(
    sites: usize,
    part: &TriPartition,
    measures: &[HaarMeasure],
    samples: usize,
    seed: u64,
) -> Result<HaarReference> {
    part.validate(sites)?;
    if samples < 2 {
        return Err(Error::TooFewSamples(samples));
    }
    for alpha in measures.iter().filter_map(HaarMeasure::alpha) {
        if !(alpha > 0.0) {
            return Err(Error::InvalidAlpha { alpha });
        }
    }
    let with_pt = measures.iter().any(HaarMeasure::needs_partial_transpose);
    let rows = (0..samples as u64)
        .into_par_iter()
        .map(|i| {
            let state = sample_haar_state_indexed(sites, seed, i)?;
            evaluate(&state, part, measures, with_pt)
        })
        .collect::<Result<Vec<_>>>()?;
    let estimates = measures
        .iter()
        .enumerate()
        .map(|(k, m)| {
            let values: Vec<f64> = rows.iter().map(|row| row[k]).collect();
            Ok((m.label(), HaarEstimate::from_values(&values, seed)?))
        })
        .collect::<Result<_>>()?;
    Ok(HaarReference {
        sites,
        partition: *part,
        samples,
        seed,
        estimates,
    })
}

fn evaluate(
    state: &StateVector,
    part: &TriPartition,
    measures: &[HaarMeasure],
    with_pt: bool,
) -> Result<Vec<f64>> {
    let pt = if with_pt {
        Some(partial_transpose(&reduced_density_matrix(state, part)?).spectrum()?)
    } else {
        None
    };
    let a = block_spectrum(state, 0, part.len_a)?;
    let b = block_spectrum(state, part.len_a, part.len_b)?;
    let ab = block_spectrum(state, 0, part.len_a + part.len_b)?;
    measures
        .iter()
        .map(|m| {
            Ok(match *m {
                HaarMeasure::Negativity => negativity(pt.as_ref().expect("computed")),
                HaarMeasure::OddEntropy => odd_entropy(pt.as_ref().expect("computed")),
                HaarMeasure::RenyiA(x) => renyi_entropy(&a, x)?,
                HaarMeasure::RenyiB(x) => renyi_entropy(&b, x)?,
                HaarMeasure::RenyiAB(x) => renyi_entropy(&ab, x)?,
                HaarMeasure::MutualInformation(x) => {
                    renyi_entropy(&a, x)? + renyi_entropy(&b, x)? - renyi_entropy(&ab, x)?
                }
                HaarMeasure::VonNeumannAB => von_neumann_entropy(&ab),
            })
        })
        .collect()
}
