//! Kicked-field Ising Floquet circuit.
//!
//! One period is `U = U_K U_I` with
//! `U_I = exp(-i [J Σ_k Z_k Z_{k+1} + Σ_k h_k Z_k])` (periodic, `Z_{L+1} = Z_1`)
//! and `U_K = Π_k exp(-i b X_k)`.
//!
//! Basis convention: site 1 is the most significant bit of the amplitude
//! index; bit 0 is spin up (`Z = +1`), bit 1 is spin down (`Z = -1`).

use std::f64::consts::FRAC_PI_4;

use nalgebra::{DMatrix, Matrix4};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Largest chain for which [`build_floquet_dense`] will allocate a matrix.
pub const MAX_DENSE_FLOQUET_SITES: usize = 12;

/// Tolerance on the input norm accepted by the evolution kernels.
pub const NORM_TOLERANCE: f64 = 1e-6;

const DUAL_POINT_TOL: f64 = 1e-12;
const UNITARITY_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundaryCondition {
    #[default]
    Periodic,
}

/// Couplings of the kicked-field Ising chain. Angles are in radians.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CircuitParams {
    #[serde(rename = "L")]
    pub sites: usize,
    #[serde(rename = "J")]
    pub coupling: f64,
    #[serde(rename = "b")]
    pub kick: f64,
    #[serde(rename = "h")]
    pub fields: Vec<f64>,
    #[serde(default)]
    pub bc: BoundaryCondition,
}

impl CircuitParams {
    pub fn new(sites: usize, coupling: f64, kick: f64, fields: Vec<f64>) -> Result<Self> {
        let params = Self {
            sites,
            coupling,
            kick,
            fields,
            bc: BoundaryCondition::Periodic,
        };
        params.validate()?;
        Ok(params)
    }

    pub fn uniform(sites: usize, coupling: f64, kick: f64, field: f64) -> Result<Self> {
        Self::new(sites, coupling, kick, vec![field; sites])
    }

    /// The self-dual point `J = π/4, b = -π/4` used throughout.
    pub fn dual_point(sites: usize, fields: Vec<f64>) -> Result<Self> {
        Self::new(sites, FRAC_PI_4, -FRAC_PI_4, fields)
    }

    pub fn validate(&self) -> Result<()> {
        if self.sites < 2 {
            return Err(Error::TooFewSites { sites: self.sites });
        }
        if self.fields.len() != self.sites {
            return Err(Error::FieldLength {
                expected: self.sites,
                found: self.fields.len(),
            });
        }
        Ok(())
    }

    pub fn is_dual_point(&self) -> bool {
        (self.coupling.abs() - FRAC_PI_4).abs() <= DUAL_POINT_TOL
            && (self.kick.abs() - FRAC_PI_4).abs() <= DUAL_POINT_TOL
    }

    /// Shifts both angles down by `epsilon`; from the dual point this gives
    /// `J = π/4 - ε`, `b = -π/4 - ε`.
    pub fn perturbed(&self, epsilon: f64) -> Self {
        Self {
            coupling: self.coupling - epsilon,
            kick: self.kick - epsilon,
            ..self.clone()
        }
    }

    /// Two-site plaquette gate of the h = 0 circuit (see [`plaquette_gate`]).
    pub fn two_site_gate(&self) -> Matrix4<C64> {
        plaquette_gate(self.coupling, self.kick)
    }

    pub fn dim(&self) -> usize {
        1 << self.sites
    }
}

/// Normalized pure state on `sites` qubits.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    amplitudes: Vec<C64>,
    sites: usize,
}

impl StateVector {
    pub fn new(sites: usize, amplitudes: Vec<C64>) -> Result<Self> {
        let expected = 1usize << sites;
        if amplitudes.len() != expected {
            return Err(Error::DimensionMismatch {
                expected,
                found: amplitudes.len(),
            });
        }
        Ok(Self { amplitudes, sites })
    }

    pub fn basis(sites: usize, index: usize) -> Self {
        let mut amplitudes = vec![C64::new(0.0, 0.0); 1 << sites];
        amplitudes[index] = C64::new(1.0, 0.0);
        Self { amplitudes, sites }
    }

    pub fn sites(&self) -> usize {
        self.sites
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub fn into_amplitudes(self) -> Vec<C64> {
        self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes
            .iter()
            .map(|a| a.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    pub fn normalize(&mut self) {
        let norm = self.norm();
        if norm > 0.0 {
            let inv = 1.0 / norm;
            self.amplitudes.iter_mut().for_each(|a| *a *= inv);
        }
    }

    /// `⟨self|other⟩`
    pub fn inner(&self, other: &Self) -> C64 {
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    fn check_normalized(&self) -> Result<()> {
        let norm = self.norm();
        if (norm - 1.0).abs() > NORM_TOLERANCE {
            return Err(Error::NotNormalized { norm });
        }
        Ok(())
    }
}

/// Precomputed Floquet operator: the diagonal Ising phases and the kick angle.
///
/// Building one costs `O(L 2^L)`; applying it costs `O(L 2^L)` as well, with
/// the kick layer done as `L` butterfly sweeps over amplitude pairs.
#[derive(Clone, Debug)]
pub struct FloquetOperator {
    sites: usize,
    phases: Vec<C64>,
    cos_b: f64,
    sin_b: f64,
}

impl FloquetOperator {
    pub fn new(params: &CircuitParams) -> Result<Self> {
        params.validate()?;
        let sites = params.sites;
        let phases = (0..1usize << sites)
            .map(|index| C64::from_polar(1.0, -ising_energy(params, index)))
            .collect();
        Ok(Self {
            sites,
            phases,
            cos_b: params.kick.cos(),
            sin_b: params.kick.sin(),
        })
    }

    pub fn sites(&self) -> usize {
        self.sites
    }

    /// Applies one period in place. The slice must have length `2^L`.
    pub fn apply_in_place(&self, amps: &mut [C64]) {
        debug_assert_eq!(amps.len(), self.phases.len());
        for (a, p) in amps.iter_mut().zip(&self.phases) {
            *a *= p;
        }
        let c = self.cos_b;
        let minus_is = C64::new(0.0, -self.sin_b);
        for site in 0..self.sites {
            let mask = 1usize << (self.sites - 1 - site);
            // Walk blocks of 2*mask; the low half has the site bit clear.
            for block in (0..amps.len()).step_by(2 * mask) {
                let (lo, hi) = amps[block..block + 2 * mask].split_at_mut(mask);
                for (x, y) in lo.iter_mut().zip(hi.iter_mut()) {
                    let (a, b) = (*x, *y);
                    *x = a * c + minus_is * b;
                    *y = b * c + minus_is * a;
                }
            }
        }
    }

    pub fn apply(&self, state: &StateVector) -> Result<StateVector> {
        self.check(state)?;
        let mut amps = state.amplitudes.clone();
        self.apply_in_place(&mut amps);
        Ok(StateVector {
            amplitudes: amps,
            sites: self.sites,
        })
    }

    fn check(&self, state: &StateVector) -> Result<()> {
        if state.sites != self.sites {
            return Err(Error::DimensionMismatch {
                expected: self.sites,
                found: state.sites,
            });
        }
        state.check_normalized()
    }
}

/// `J Σ_k s_k s_{k+1} + Σ_k h_k s_k` for the spin configuration encoded by `index`.
fn ising_energy(params: &CircuitParams, index: usize) -> f64 {
    let n = params.sites;
    let spin = |k: usize| -> f64 {
        if (index >> (n - 1 - k)) & 1 == 0 {
            1.0
        } else {
            -1.0
        }
    };
    (0..n)
        .map(|k| params.coupling * spin(k) * spin((k + 1) % n) + params.fields[k] * spin(k))
        .sum()
}

/// One Floquet period `U_K U_I |ψ⟩`.
pub fn apply_floquet(state: &StateVector, params: &CircuitParams) -> Result<StateVector> {
    FloquetOperator::new(params)?.apply(state)
}

/// `t` Floquet periods. `t = 0` returns a copy of the input.
pub fn evolve(state: &StateVector, params: &CircuitParams, t: usize) -> Result<StateVector> {
    let op = FloquetOperator::new(params)?;
    op.check(state)?;
    let mut amps = state.amplitudes.clone();
    for _ in 0..t {
        op.apply_in_place(&mut amps);
    }
    Ok(StateVector {
        amplitudes: amps,
        sites: state.sites,
    })
}

/// Dense `U = U_K U_I` assembled from Kronecker products of single-site
/// matrices. Serves as the reference for the butterfly kernel.
pub fn build_floquet_dense(params: &CircuitParams) -> Result<DMatrix<C64>> {
    params.validate()?;
    if params.sites > MAX_DENSE_FLOQUET_SITES {
        return Err(Error::SizeGuard {
            what: "dense Floquet matrix sites",
            requested: params.sites,
            limit: MAX_DENSE_FLOQUET_SITES,
        });
    }
    let n = params.sites;
    let dim = 1usize << n;
    let one = C64::new(1.0, 0.0);
    let zero = C64::new(0.0, 0.0);

    // diag(Z_k) as a length-2^L vector, built by Kronecker products.
    let z_diag = |k: usize| -> Vec<f64> {
        let mut v = vec![1.0];
        for site in 0..n {
            let local = if site == k { [1.0, -1.0] } else { [1.0, 1.0] };
            v = v
                .iter()
                .flat_map(|x| local.iter().map(move |y| x * y))
                .collect();
        }
        v
    };
    let zs: Vec<Vec<f64>> = (0..n).map(z_diag).collect();
    let mut energy = vec![0.0; dim];
    for k in 0..n {
        let next = (k + 1) % n;
        for (i, e) in energy.iter_mut().enumerate() {
            *e += params.coupling * zs[k][i] * zs[next][i] + params.fields[k] * zs[k][i];
        }
    }

    let (c, s) = (params.kick.cos(), params.kick.sin());
    let kick = DMatrix::from_row_slice(
        2,
        2,
        &[
            C64::new(c, 0.0),
            C64::new(0.0, -s),
            C64::new(0.0, -s),
            C64::new(c, 0.0),
        ],
    );
    let mut u_k = DMatrix::from_element(1, 1, one);
    for _ in 0..n {
        u_k = u_k.kronecker(&kick);
    }

    let mut u = DMatrix::from_element(dim, dim, zero);
    for col in 0..dim {
        let phase = C64::from_polar(1.0, -energy[col]);
        for row in 0..dim {
            u[(row, col)] = u_k[(row, col)] * phase;
        }
    }
    Ok(u)
}

/// Plaquette gate `e^{-iJ ZZ} (e^{-ibX} ⊗ e^{-ibX}) e^{-iJ ZZ}`.
///
/// In the checkerboard decomposition of the chain's space-time network every
/// Ising bond and every kick bond belongs to exactly one active plaquette, and
/// this is the weight carried by such a plaquette (with h = 0). Row/column
/// index is `2a + b` for the two spins `(a, b)`.
pub fn plaquette_gate(coupling: f64, kick: f64) -> Matrix4<C64> {
    let (c, s) = (kick.cos(), kick.sin());
    let k = nalgebra::Matrix2::new(
        C64::new(c, 0.0),
        C64::new(0.0, -s),
        C64::new(0.0, -s),
        C64::new(c, 0.0),
    );
    let kk: Matrix4<C64> = k.kronecker(&k);
    let ising = Matrix4::from_diagonal(&nalgebra::Vector4::new(
        C64::from_polar(1.0, -coupling),
        C64::from_polar(1.0, coupling),
        C64::from_polar(1.0, coupling),
        C64::from_polar(1.0, -coupling),
    ));
    ising * kk * ising
}

fn unitarity_defect(m: &Matrix4<C64>) -> f64 {
    (m.adjoint() * m - Matrix4::identity()).camax()
}

/// Space-time reshuffle `(a,b; c,d) -> (c,a; d,b)`.
pub fn reshuffle(gate: &Matrix4<C64>) -> Matrix4<C64> {
    let mut out = Matrix4::zeros();
    for a in 0..2 {
        for b in 0..2 {
            for c in 0..2 {
                for d in 0..2 {
                    out[(2 * c + a, 2 * d + b)] = gate[(2 * a + b, 2 * c + d)];
                }
            }
        }
    }
    out
}

/// True iff the reshuffled gate is also unitary (within 1e-10).
pub fn check_dual_unitarity(gate: &Matrix4<C64>) -> Result<bool> {
    let deviation = unitarity_defect(gate);
    if deviation > UNITARITY_TOL {
        return Err(Error::NotUnitary { deviation });
    }
    Ok(unitarity_defect(&reshuffle(gate)) <= UNITARITY_TOL)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_state(sites: usize, seed: u64) -> StateVector {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let amps = (0..1usize << sites)
            .map(|_| C64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
            .collect();
        let mut s = StateVector::new(sites, amps).unwrap();
        s.normalize();
        s
    }

    fn random_params(sites: usize, seed: u64) -> CircuitParams {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let h = (0..sites).map(|_| rng.random_range(-2.0..2.0)).collect();
        CircuitParams::new(
            sites,
            rng.random_range(-2.0..2.0),
            rng.random_range(-2.0..2.0),
            h,
        )
        .unwrap()
    }

    fn mat_vec(u: &DMatrix<C64>, s: &StateVector) -> Vec<C64> {
        let v = nalgebra::DVector::from_column_slice(s.amplitudes());
        (u * v).iter().copied().collect()
    }

    fn max_diff(a: &[C64], b: &[C64]) -> f64 {
        a.iter()
            .zip(b)
            .map(|(x, y)| (x - y).norm())
            .fold(0.0, f64::max)
    }

    #[test]
    fn identity_circuit_leaves_state_unchanged() {
        let params = CircuitParams::uniform(2, 0.0, 0.0, 0.0).unwrap();
        let up = StateVector::basis(2, 0);
        let out = apply_floquet(&up, &params).unwrap();
        assert!(max_diff(out.amplitudes(), up.amplitudes()) < 1e-15);
    }

    #[test]
    fn kernel_matches_dense_at_dual_point() {
        let params = CircuitParams::dual_point(6, vec![1.0, 0.3, -0.7, 2.0, 0.0, 1.1]).unwrap();
        let u = build_floquet_dense(&params).unwrap();
        for seed in 0..100 {
            let psi = random_state(6, seed);
            let kernel = apply_floquet(&psi, &params).unwrap();
            assert!(max_diff(kernel.amplitudes(), &mat_vec(&u, &psi)) < 1e-12);
        }
    }

    #[test]
    fn dense_floquet_is_unitary() {
        for seed in 0..5 {
            let params = random_params(2, seed);
            let u = build_floquet_dense(&params).unwrap();
            let defect = (u.adjoint() * &u - DMatrix::<C64>::identity(4, 4)).camax();
            assert!(defect < 1e-12);
        }
        let u = build_floquet_dense(&random_params(7, 9)).unwrap();
        assert!((u.adjoint() * &u - DMatrix::<C64>::identity(128, 128)).camax() < 1e-12);
    }

    #[test]
    fn dense_guard_names_the_limit() {
        let params = CircuitParams::uniform(13, 0.1, 0.1, 0.0).unwrap();
        match build_floquet_dense(&params) {
            Err(Error::SizeGuard { limit, .. }) => assert_eq!(limit, MAX_DENSE_FLOQUET_SITES),
            other => panic!("expected size guard, got {other:?}"),
        }
    }

    #[test]
    fn rejects_bad_inputs() {
        let params = CircuitParams::dual_point(4, vec![0.0; 4]).unwrap();
        assert!(matches!(
            apply_floquet(&StateVector::basis(3, 0), &params),
            Err(Error::DimensionMismatch { .. })
        ));
        let unnormalized = StateVector::new(4, vec![C64::new(0.5, 0.0); 16]).unwrap();
        assert!(matches!(
            apply_floquet(&unnormalized, &params),
            Err(Error::NotNormalized { .. })
        ));
        assert!(matches!(
            CircuitParams::new(1, 0.0, 0.0, vec![0.0]),
            Err(Error::TooFewSites { .. })
        ));
        assert!(matches!(
            CircuitParams::new(3, 0.0, 0.0, vec![0.0; 2]),
            Err(Error::FieldLength { .. })
        ));
    }

    #[test]
    fn evolve_composes() {
        let params = random_params(5, 3);
        let psi = random_state(5, 4);
        let zero = evolve(&psi, &params, 0).unwrap();
        assert_eq!(zero, psi);
        let three = evolve(&psi, &params, 3).unwrap();
        let mut step = psi.clone();
        for _ in 0..3 {
            step = apply_floquet(&step, &params).unwrap();
        }
        assert!(max_diff(three.amplitudes(), step.amplitudes()) < 1e-14);
    }

    #[test]
    fn norm_is_conserved_over_fifty_periods() {
        let params = CircuitParams::dual_point(8, vec![1.0; 8]).unwrap();
        let op = FloquetOperator::new(&params).unwrap();
        let mut psi = random_state(8, 11);
        for _ in 0..50 {
            psi = op.apply(&psi).unwrap();
            assert!((psi.norm() - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn ising_layer_is_diagonal() {
        // b = 0 leaves only U_I.
        let params = CircuitParams::new(5, 0.37, 0.0, vec![0.1, -0.4, 0.9, 1.3, 0.2]).unwrap();
        for index in 0..32 {
            let out = apply_floquet(&StateVector::basis(5, index), &params).unwrap();
            for (i, a) in out.amplitudes().iter().enumerate() {
                if i == index {
                    assert!((a.norm() - 1.0).abs() < 1e-14);
                } else {
                    assert_eq!(a.norm(), 0.0);
                }
            }
        }
    }

    #[test]
    fn dual_point_predicate() {
        for (j, b) in [(1.0, -1.0), (1.0, 1.0), (-1.0, 1.0), (-1.0, -1.0)] {
            let p = CircuitParams::uniform(3, j * FRAC_PI_4, b * FRAC_PI_4, 0.5).unwrap();
            assert!(p.is_dual_point());
        }
        let p = CircuitParams::dual_point(3, vec![0.0; 3])
            .unwrap()
            .perturbed(0.01);
        assert!(!p.is_dual_point());
        assert!((p.coupling - (FRAC_PI_4 - 0.01)).abs() < 1e-15);
        assert!((p.kick - (-FRAC_PI_4 - 0.01)).abs() < 1e-15);
    }

    #[test]
    fn plaquette_gate_is_dual_unitary_at_dual_point() {
        let gate = CircuitParams::dual_point(2, vec![0.0; 2])
            .unwrap()
            .two_site_gate();
        assert!(check_dual_unitarity(&gate).unwrap());
        assert!(!check_dual_unitarity(&plaquette_gate(FRAC_PI_4 - 0.1, -FRAC_PI_4)).unwrap());
        assert!(!check_dual_unitarity(&Matrix4::identity()).unwrap());
    }

    #[test]
    fn swap_is_dual_unitary() {
        let mut swap = Matrix4::<C64>::zeros();
        for (r, c) in [(0, 0), (1, 2), (2, 1), (3, 3)] {
            swap[(r, c)] = C64::new(1.0, 0.0);
        }
        assert!(check_dual_unitarity(&swap).unwrap());
    }

    #[test]
    fn non_unitary_gate_is_rejected() {
        let m = Matrix4::<C64>::identity() * C64::new(2.0, 0.0);
        assert!(matches!(
            check_dual_unitarity(&m),
            Err(Error::NotUnitary { .. })
        ));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(100))]

        #[test]
        fn kernel_equals_dense_for_small_chains(sites in 2usize..=8, seed in any::<u64>()) {
            let params = random_params(sites, seed);
            let psi = random_state(sites, seed ^ 0x5eed);
            let u = build_floquet_dense(&params).unwrap();
            let kernel = apply_floquet(&psi, &params).unwrap();
            prop_assert!(max_diff(kernel.amplitudes(), &mat_vec(&u, &psi)) < 1e-12);
        }

        #[test]
        fn dual_unitarity_only_at_the_four_sign_choices(
            j in -1.5f64..1.5,
            b in -1.5f64..1.5,
        ) {
            let dual = (j.abs() - FRAC_PI_4).abs() < 1e-6 && (b.abs() - FRAC_PI_4).abs() < 1e-6;
            prop_assume!(!dual);
            prop_assert!(!check_dual_unitarity(&plaquette_gate(j, b)).unwrap());
        }
    }
}
