//! Product initial states `⊗_k (cos(θ_k/2)|↑⟩ + e^{iφ_k} sin(θ_k/2)|↓⟩)` and
//! their solvability class.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI, TAU};

use serde::{Deserialize, Serialize};

use crate::circuit::{StateVector, C64};
use crate::error::{Error, Result};

pub const DEFAULT_CLASSIFY_TOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProductStateSpec {
    pub thetas: Vec<f64>,
    pub phis: Vec<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum StateClass {
    Transverse,
    Longitudinal,
    Generic,
}

impl ProductStateSpec {
    /// Builds a spec with θ folded into `[0, π]` and φ into `[0, 2π)`.
    ///
    /// Folding `θ → 2π - θ` flips the sign of the up amplitude, which is
    /// absorbed as `φ → φ + π` and an overall phase of `-1` on that site.
    pub fn new(thetas: Vec<f64>, phis: Vec<f64>) -> Result<Self> {
        if thetas.len() != phis.len() {
            return Err(Error::DimensionMismatch {
                expected: thetas.len(),
                found: phis.len(),
            });
        }
        if thetas.len() < 2 {
            return Err(Error::TooFewSites {
                sites: thetas.len(),
            });
        }
        let (thetas, phis) = thetas
            .into_iter()
            .zip(phis)
            .map(|(theta, phi)| {
                let theta = theta.rem_euclid(TAU);
                if theta > PI {
                    (TAU - theta, (phi + PI).rem_euclid(TAU))
                } else {
                    (theta, phi.rem_euclid(TAU))
                }
            })
            .unzip();
        Ok(Self { thetas, phis })
    }

    pub fn uniform(sites: usize, theta: f64, phi: f64) -> Result<Self> {
        Self::new(vec![theta; sites], vec![phi; sites])
    }

    pub fn sites(&self) -> usize {
        self.thetas.len()
    }
}

/// Dense amplitudes of the product state. Site 1 is the most significant bit.
pub fn product_state(spec: &ProductStateSpec) -> Result<StateVector> {
    if spec.thetas.len() != spec.phis.len() {
        return Err(Error::DimensionMismatch {
            expected: spec.thetas.len(),
            found: spec.phis.len(),
        });
    }
    let mut amps = vec![C64::new(1.0, 0.0)];
    for (&theta, &phi) in spec.thetas.iter().zip(&spec.phis) {
        let up = C64::new((theta / 2.0).cos(), 0.0);
        let down = C64::from_polar((theta / 2.0).sin(), phi);
        amps = amps.iter().flat_map(|&a| [a * up, a * down]).collect();
    }
    let mut state = StateVector::new(spec.sites(), amps)?;
    state.normalize();
    Ok(state)
}

pub fn classify_state(spec: &ProductStateSpec, tol: f64) -> Result<StateClass> {
    if !(tol > 0.0 && tol < FRAC_PI_4) {
        return Err(Error::InvalidTolerance { tol });
    }
    if spec.thetas.iter().all(|t| (t - FRAC_PI_2).abs() <= tol) {
        Ok(StateClass::Transverse)
    } else if spec
        .thetas
        .iter()
        .all(|t| t.abs() <= tol || (t - PI).abs() <= tol)
    {
        Ok(StateClass::Longitudinal)
    } else {
        Ok(StateClass::Generic)
    }
}
