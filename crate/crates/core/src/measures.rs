//! Reduced density matrices, partial transposes and the entanglement
//! quantities built from their spectra. All logarithms are natural.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::circuit::{StateVector, C64};
use crate::error::{Error, Result};

/// Largest matrix dimension for dense reduced density matrices and
/// Hermitian eigensolves.
pub const MAX_DENSE_DIM: usize = 1 << 14;

/// Hermiticity accepted by [`hermitian_spectrum`].
pub const HERMITIAN_TOL: f64 = 1e-8;

/// Eigenvalues with `|λ| ≤ 1e-10 · dim` are treated as zero.
pub fn default_zero_tol(dim: usize) -> f64 {
    1e-10 * dim as f64
}

/// Contiguous split `A | B | C` of the chain, starting at site 1.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TriPartition {
    #[serde(rename = "L_A")]
    pub len_a: usize,
    #[serde(rename = "L_B")]
    pub len_b: usize,
    #[serde(rename = "L_C")]
    pub len_c: usize,
}

impl TriPartition {
    pub fn new(len_a: usize, len_b: usize, len_c: usize) -> Result<Self> {
        let part = Self {
            len_a,
            len_b,
            len_c,
        };
        part.validate(part.sites())?;
        Ok(part)
    }

    pub fn sites(&self) -> usize {
        self.len_a + self.len_b + self.len_c
    }

    pub fn validate(&self, sites: usize) -> Result<()> {
        if self.len_a == 0 || self.len_b == 0 || self.len_c == 0 || self.sites() != sites {
            return Err(Error::InvalidPartition {
                a: self.len_a,
                b: self.len_b,
                c: self.len_c,
                sites,
            });
        }
        Ok(())
    }

    pub fn dim_a(&self) -> usize {
        1 << self.len_a
    }

    pub fn dim_b(&self) -> usize {
        1 << self.len_b
    }

    pub fn dim_ab(&self) -> usize {
        1 << (self.len_a + self.len_b)
    }
}

/// Dense density matrix on `A ⊗ B`, row index `a · dim_b + b`.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    entries: DMatrix<C64>,
    dim_a: usize,
    dim_b: usize,
}

impl DensityMatrix {
    pub fn new(entries: DMatrix<C64>, dim_a: usize, dim_b: usize) -> Result<Self> {
        let dim = dim_a * dim_b;
        if entries.nrows() != dim || entries.ncols() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: entries.nrows().max(entries.ncols()),
            });
        }
        Ok(Self {
            entries,
            dim_a,
            dim_b,
        })
    }

    pub fn entries(&self) -> &DMatrix<C64> {
        &self.entries
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn dim_a(&self) -> usize {
        self.dim_a
    }

    pub fn dim_b(&self) -> usize {
        self.dim_b
    }

    pub fn trace(&self) -> C64 {
        self.entries.trace()
    }

    pub fn hermiticity_defect(&self) -> f64 {
        hermiticity_defect(&self.entries)
    }

    /// `tr ρ²`, from the entries (`Σ |ρ_ij|²` for Hermitian ρ).
    pub fn purity(&self) -> f64 {
        self.entries.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn spectrum(&self) -> Result<Spectrum> {
        hermitian_spectrum(&self.entries, default_zero_tol(self.dim()))
    }
}

fn hermiticity_defect(m: &DMatrix<C64>) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

/// Reduced density matrix of the contiguous block `[start, start + len)`,
/// tracing out everything to its left and right.
pub fn block_density_matrix(state: &StateVector, start: usize, len: usize) -> Result<DMatrix<C64>> {
    let sites = state.sites();
    if len == 0 || start + len > sites {
        return Err(Error::InvalidConfig(format!(
            "block [{start}, {}) outside a chain of {sites} sites",
            start + len
        )));
    }
    let block = 1usize << len;
    if block > MAX_DENSE_DIM {
        return Err(Error::SizeGuard {
            what: "reduced density matrix dimension",
            requested: block,
            limit: MAX_DENSE_DIM,
        });
    }
    let right = 1usize << (sites - start - len);
    let left = 1usize << start;
    let amps = state.amplitudes();
    let mut rho = DMatrix::<C64>::zeros(block, block);
    for l in 0..left {
        let slab = &amps[l * block * right..(l + 1) * block * right];
        let m = DMatrix::from_row_slice(block, right, slab);
        rho.gemm(C64::new(1.0, 0.0), &m, &m.adjoint(), C64::new(1.0, 0.0));
    }
    Ok(rho)
}

/// `ρ_AB = tr_C |ψ⟩⟨ψ|`, contracted as `Σ_c ψ(a,b,c) ψ*(a',b',c)`.
pub fn reduced_density_matrix(state: &StateVector, part: &TriPartition) -> Result<DensityMatrix> {
    part.validate(state.sites())?;
    let entries = block_density_matrix(state, 0, part.len_a + part.len_b)?;
    DensityMatrix::new(entries, part.dim_a(), part.dim_b())
}

/// `(a1 b1; a2 b2) ↦ (a1 b2; a2 b1)`.
pub fn partial_transpose(rho: &DensityMatrix) -> DensityMatrix {
    let (da, db) = (rho.dim_a, rho.dim_b);
    let src = &rho.entries;
    let mut out = DMatrix::<C64>::zeros(da * db, da * db);
    for a1 in 0..da {
        for a2 in 0..da {
            for b1 in 0..db {
                for b2 in 0..db {
                    out[(a1 * db + b1, a2 * db + b2)] = src[(a1 * db + b2, a2 * db + b1)];
                }
            }
        }
    }
    DensityMatrix {
        entries: out,
        dim_a: da,
        dim_b: db,
    }
}

/// Real spectrum of a Hermitian matrix, sorted descending, with sign counts.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Spectrum {
    pub eigenvalues: Vec<f64>,
    pub zero_tol: f64,
    pub n_plus: usize,
    pub n_minus: usize,
    pub n_zero: usize,
}

impl Spectrum {
    pub fn from_eigenvalues(mut eigenvalues: Vec<f64>, zero_tol: f64) -> Self {
        eigenvalues.sort_by(|a, b| b.total_cmp(a));
        let n_plus = eigenvalues.iter().filter(|&&l| l > zero_tol).count();
        let n_minus = eigenvalues.iter().filter(|&&l| l < -zero_tol).count();
        let n_zero = eigenvalues.len() - n_plus - n_minus;
        Self {
            eigenvalues,
            zero_tol,
            n_plus,
            n_minus,
            n_zero,
        }
    }

    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn trace(&self) -> f64 {
        self.eigenvalues.iter().sum()
    }

    /// Singular values `|λ|`, descending.
    pub fn magnitudes(&self) -> Vec<f64> {
        let mut m: Vec<f64> = self.eigenvalues.iter().map(|l| l.abs()).collect();
        m.sort_by(|a, b| b.total_cmp(a));
        m
    }

    fn nonzero(&self) -> impl Iterator<Item = f64> + '_ {
        self.eigenvalues
            .iter()
            .copied()
            .filter(move |l| l.abs() > self.zero_tol)
    }

    /// `(max - min) / max` over the nonzero `|λ|`; 0 for a flat spectrum.
    pub fn flat_spread(&self) -> f64 {
        let (lo, hi) = self
            .nonzero()
            .map(f64::abs)
            .fold((f64::INFINITY, 0.0f64), |(lo, hi), x| {
                (lo.min(x), hi.max(x))
            });
        if hi > 0.0 {
            (hi - lo) / hi
        } else {
            0.0
        }
    }

    /// `Σ_i λ_i^{2n}`.
    pub fn even_moment(&self, n: usize) -> Result<f64> {
        if n == 0 {
            return Err(Error::InvalidMomentOrder { n });
        }
        Ok(self.eigenvalues.iter().map(|l| l.powi(2 * n as i32)).sum())
    }
}

pub fn hermitian_spectrum(m: &DMatrix<C64>, zero_tol: f64) -> Result<Spectrum> {
    if m.nrows() != m.ncols() {
        return Err(Error::DimensionMismatch {
            expected: m.nrows(),
            found: m.ncols(),
        });
    }
    if m.nrows() > MAX_DENSE_DIM {
        return Err(Error::SizeGuard {
            what: "Hermitian eigensolve dimension",
            requested: m.nrows(),
            limit: MAX_DENSE_DIM,
        });
    }
    let deviation = hermiticity_defect(m);
    if deviation > HERMITIAN_TOL {
        return Err(Error::NotHermitian { deviation });
    }
    let eigenvalues = m.clone().symmetric_eigenvalues();
    Ok(Spectrum::from_eigenvalues(
        eigenvalues.iter().copied().collect(),
        zero_tol,
    ))
}

/// `ln Σ_i |λ_i|`.
pub fn negativity(spec: &Spectrum) -> f64 {
    spec.eigenvalues.iter().map(|l| l.abs()).sum::<f64>().ln()
}

/// Rényi entropy `ln(Σ λ^α) / (1 - α)`, or von Neumann `-Σ λ ln λ` at α = 1.
/// Only eigenvalues above the spectrum's zero tolerance contribute.
pub fn renyi_entropy(spec: &Spectrum, alpha: f64) -> Result<f64> {
    if !(alpha > 0.0) {
        return Err(Error::InvalidAlpha { alpha });
    }
    let positive = spec
        .eigenvalues
        .iter()
        .copied()
        .filter(|&l| l > spec.zero_tol);
    if alpha == 1.0 {
        Ok(-positive.map(|l| l * l.ln()).sum::<f64>())
    } else {
        Ok(positive.map(|l| l.powf(alpha)).sum::<f64>().ln() / (1.0 - alpha))
    }
}

pub fn von_neumann_entropy(spec: &Spectrum) -> f64 {
    renyi_entropy(spec, 1.0).expect("alpha = 1 is valid")
}

/// `-Σ_{λ>0} λ ln λ + Σ_{λ<0} |λ| ln |λ|`; eigenvalues classified as zero
/// contribute nothing.
pub fn odd_entropy(spec: &Spectrum) -> f64 {
    spec.nonzero()
        .map(|l| {
            let m = l.abs();
            if l > 0.0 {
                -m * m.ln()
            } else {
                m * m.ln()
            }
        })
        .sum()
}

/// `tr((ρ^{T_B})^{2n})` from the eigenvalues of `rho_pt`.
pub fn even_moment(rho_pt: &DensityMatrix, n: usize) -> Result<f64> {
    if n == 0 {
        return Err(Error::InvalidMomentOrder { n });
    }
    rho_pt.spectrum()?.even_moment(n)
}

/// Spectrum of the block `[start, start + len)`. When the block touches an end
/// of the chain and is the larger side, the complementary block is
/// diagonalized instead; for a pure state both share the nonzero spectrum.
pub fn block_spectrum(state: &StateVector, start: usize, len: usize) -> Result<Spectrum> {
    let sites = state.sites();
    let (start, len) = if 2 * len > sites && (start == 0 || start + len == sites) {
        if start == 0 {
            (len, sites - len)
        } else {
            (0, start)
        }
    } else {
        (start, len)
    };
    let rho = block_density_matrix(state, start, len)?;
    hermitian_spectrum(&rho, default_zero_tol(rho.nrows()))
}

/// `S_A^{(α)} + S_B^{(α)} - S_AB^{(α)}`.
pub fn mutual_information(state: &StateVector, part: &TriPartition, alpha: f64) -> Result<f64> {
    part.validate(state.sites())?;
    let a = block_spectrum(state, 0, part.len_a)?;
    let b = block_spectrum(state, part.len_a, part.len_b)?;
    let ab = block_spectrum(state, 0, part.len_a + part.len_b)?;
    Ok(renyi_entropy(&a, alpha)? + renyi_entropy(&b, alpha)? - renyi_entropy(&ab, alpha)?)
}

/// Rényi entropies and mutual information at one α.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RenyiSet {
    pub alpha: f64,
    pub s_a: f64,
    pub s_b: f64,
    pub s_ab: f64,
    pub mutual_information: f64,
}

/// Every quantity tracked for one state and partition.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EntanglementProfile {
    pub negativity: f64,
    pub odd_entropy: f64,
    pub renyi: Vec<RenyiSet>,
    pub von_neumann_ab: f64,
    pub n_plus: usize,
    pub n_minus: usize,
    pub n_zero: usize,
    pub flat_spread: f64,
    pub pt_trace: f64,
}

pub fn entanglement_profile(
    state: &StateVector,
    part: &TriPartition,
    alphas: &[f64],
) -> Result<EntanglementProfile> {
    part.validate(state.sites())?;
    let rho = reduced_density_matrix(state, part)?;
    let pt = partial_transpose(&rho).spectrum()?;
    let a = block_spectrum(state, 0, part.len_a)?;
    let b = block_spectrum(state, part.len_a, part.len_b)?;
    let ab = block_spectrum(state, 0, part.len_a + part.len_b)?;
    let renyi = alphas
        .iter()
        .map(|&alpha| {
            let s_a = renyi_entropy(&a, alpha)?;
            let s_b = renyi_entropy(&b, alpha)?;
            let s_ab = renyi_entropy(&ab, alpha)?;
            Ok(RenyiSet {
                alpha,
                s_a,
                s_b,
                s_ab,
                mutual_information: s_a + s_b - s_ab,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(EntanglementProfile {
        negativity: negativity(&pt),
        odd_entropy: odd_entropy(&pt),
        renyi,
        von_neumann_ab: von_neumann_entropy(&ab),
        n_plus: pt.n_plus,
        n_minus: pt.n_minus,
        n_zero: pt.n_zero,
        flat_spread: pt.flat_spread(),
        pt_trace: pt.trace(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::{product_state, ProductStateSpec};
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::LN_2;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    fn random_state(sites: usize, seed: u64) -> StateVector {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let amps = (0..1usize << sites)
            .map(|_| C64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
            .collect();
        let mut s = StateVector::new(sites, amps).unwrap();
        s.normalize();
        s
    }

    fn bell() -> DensityMatrix {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let psi = StateVector::new(2, vec![c(h), c(0.0), c(0.0), c(h)]).unwrap();
        reduced_density_matrix_two(&psi)
    }

    fn reduced_density_matrix_two(psi: &StateVector) -> DensityMatrix {
        let v = nalgebra::DVector::from_column_slice(psi.amplitudes());
        DensityMatrix::new(&v * v.adjoint(), 2, 2).unwrap()
    }

    fn ghz3() -> StateVector {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let mut amps = vec![c(0.0); 8];
        amps[0] = c(h);
        amps[7] = c(h);
        StateVector::new(3, amps).unwrap()
    }

    fn spectrum_of(eigs: &[f64]) -> Spectrum {
        Spectrum::from_eigenvalues(eigs.to_vec(), 1e-12)
    }

    #[test]
    fn ghz_reduced_density_matrix() {
        let rho = reduced_density_matrix(&ghz3(), &TriPartition::new(1, 1, 1).unwrap()).unwrap();
        let mut expected = DMatrix::<C64>::zeros(4, 4);
        expected[(0, 0)] = c(0.5);
        expected[(3, 3)] = c(0.5);
        assert!((rho.entries() - expected).camax() < 1e-15);
    }

    #[test]
    fn partial_trace_matches_brute_force() {
        let psi = random_state(6, 7);
        for (a, b, cc) in [(1, 2, 3), (2, 2, 2), (3, 1, 2), (1, 4, 1)] {
            let part = TriPartition::new(a, b, cc).unwrap();
            let rho = reduced_density_matrix(&psi, &part).unwrap();
            let dab = 1 << (a + b);
            let dc = 1 << cc;
            let mut brute = DMatrix::<C64>::zeros(dab, dab);
            for index in 0..64usize {
                for index2 in 0..64usize {
                    if index % dc == index2 % dc {
                        brute[(index / dc, index2 / dc)] +=
                            psi.amplitudes()[index] * psi.amplitudes()[index2].conj();
                    }
                }
            }
            assert!((rho.entries() - brute).camax() < 1e-12);
        }
    }

    #[test]
    fn product_states_are_pure_on_every_partition() {
        let spec =
            ProductStateSpec::new(vec![0.3, 1.2, 2.0, 0.7, 2.9], vec![0.1, 4.0, 2.2, 0.0, 1.0])
                .unwrap();
        let psi = product_state(&spec).unwrap();
        for (a, b, cc) in [(1, 1, 3), (2, 2, 1), (1, 3, 1)] {
            let rho = reduced_density_matrix(&psi, &TriPartition::new(a, b, cc).unwrap()).unwrap();
            assert!((rho.purity() - 1.0).abs() < 1e-12);
        }
        for site in 0..5 {
            let rho = block_density_matrix(&psi, site, 1).unwrap();
            let purity: f64 = rho.iter().map(|z| z.norm_sqr()).sum();
            assert!((purity - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn bell_partial_transpose_spectrum() {
        let spec = partial_transpose(&bell()).spectrum().unwrap();
        let expected = [0.5, 0.5, 0.5, -0.5];
        for (l, e) in spec.eigenvalues.iter().zip(expected) {
            assert!((l - e).abs() < 1e-14);
        }
        assert_eq!((spec.n_plus, spec.n_minus, spec.n_zero), (3, 1, 0));
        assert!((negativity(&spec) - LN_2).abs() < 1e-14);
        assert!((odd_entropy(&spec) - LN_2).abs() < 1e-14);
        assert!((spec.even_moment(2).unwrap() - 0.25).abs() < 1e-14);
    }

    #[test]
    fn partial_transpose_is_an_involution() {
        let psi = random_state(5, 3);
        let rho = reduced_density_matrix(&psi, &TriPartition::new(2, 2, 1).unwrap()).unwrap();
        assert_eq!(partial_transpose(&partial_transpose(&rho)), rho);
    }

    #[test]
    fn product_density_matrix_keeps_its_spectrum() {
        // ρ_A ⊗ ρ_B from two independent random mixed states
        let ra = block_density_matrix(&random_state(3, 1), 0, 1).unwrap();
        let rb = block_density_matrix(&random_state(4, 2), 0, 2).unwrap();
        let rho = DensityMatrix::new(ra.kronecker(&rb), 2, 4).unwrap();
        let direct = rho.spectrum().unwrap();
        let pt = partial_transpose(&rho).spectrum().unwrap();
        for (x, y) in direct.eigenvalues.iter().zip(&pt.eigenvalues) {
            assert!((x - y).abs() < 1e-12);
        }
        assert_eq!(pt.n_minus, 0);
        assert!(negativity(&pt).abs() < 1e-12);
        assert!((odd_entropy(&pt) - von_neumann_entropy(&direct)).abs() < 1e-12);
    }

    #[test]
    fn maximally_mixed_spectrum() {
        let m = DMatrix::<C64>::identity(4, 4) * c(0.25);
        let spec = hermitian_spectrum(&m, default_zero_tol(4)).unwrap();
        assert!(spec.eigenvalues.iter().all(|l| (l - 0.25).abs() < 1e-15));
        assert_eq!(spec.n_plus, 4);
        assert_eq!(spec.flat_spread(), 0.0);
    }

    #[test]
    fn non_hermitian_input_is_rejected() {
        let mut m = DMatrix::<C64>::identity(3, 3);
        m[(0, 1)] = c(1e-3);
        assert!(matches!(
            hermitian_spectrum(&m, 1e-10),
            Err(Error::NotHermitian { .. })
        ));
    }

    #[test]
    fn separable_spectra_have_zero_negativity() {
        assert_eq!(negativity(&spectrum_of(&[0.5, 0.3, 0.2, 0.0])), 0.0);
    }

    #[test]
    fn flat_spectrum_renyi_is_log_dimension() {
        for d in [2usize, 4, 16] {
            let spec = spectrum_of(&vec![1.0 / d as f64; d]);
            for alpha in [0.5, 1.0, 2.0, 3.7] {
                assert!((renyi_entropy(&spec, alpha).unwrap() - (d as f64).ln()).abs() < 1e-13);
            }
        }
        let pure = spectrum_of(&[1.0, 0.0, 0.0]);
        for alpha in [0.5, 1.0, 2.0] {
            assert!(renyi_entropy(&pure, alpha).unwrap().abs() < 1e-15);
        }
        assert!(matches!(
            renyi_entropy(&pure, 0.0),
            Err(Error::InvalidAlpha { .. })
        ));
        assert!(matches!(
            renyi_entropy(&pure, -1.0),
            Err(Error::InvalidAlpha { .. })
        ));
    }

    #[test]
    fn mutual_information_examples() {
        let part = TriPartition::new(1, 1, 1).unwrap();
        assert!((mutual_information(&ghz3(), &part, 1.0).unwrap() - LN_2).abs() < 1e-13);
        let product = product_state(&ProductStateSpec::uniform(6, 1.1, 0.4).unwrap()).unwrap();
        let part = TriPartition::new(2, 2, 2).unwrap();
        for alpha in [0.5, 1.0, 2.0] {
            assert!(mutual_information(&product, &part, alpha).unwrap().abs() < 1e-12);
        }
    }

    #[test]
    fn even_moment_order_one_is_purity() {
        let psi = random_state(6, 5);
        let rho = reduced_density_matrix(&psi, &TriPartition::new(2, 2, 2).unwrap()).unwrap();
        let m1 = even_moment(&partial_transpose(&rho), 1).unwrap();
        let mu: f64 = rho
            .spectrum()
            .unwrap()
            .eigenvalues
            .iter()
            .map(|l| l * l)
            .sum();
        assert!((m1 - mu).abs() < 1e-10);
        assert!(matches!(
            even_moment(&rho, 0),
            Err(Error::InvalidMomentOrder { n: 0 })
        ));
    }

    #[test]
    fn complement_spectrum_shortcut() {
        let psi = random_state(7, 9);
        // block of 5 sites at the left edge: diagonalized through its 2-site complement
        let shortcut = block_spectrum(&psi, 0, 5).unwrap();
        let direct = block_density_matrix(&psi, 0, 5).unwrap();
        let direct = hermitian_spectrum(&direct, default_zero_tol(32)).unwrap();
        for alpha in [0.5, 1.0, 2.0] {
            let a = renyi_entropy(&shortcut, alpha).unwrap();
            let b = renyi_entropy(&direct, alpha).unwrap();
            assert!((a - b).abs() < 1e-10);
        }
    }

    #[test]
    fn guard_is_enforced() {
        let psi = StateVector::basis(15, 0);
        let part = TriPartition::new(14, 0, 1);
        assert!(part.is_err());
        let err = block_density_matrix(&StateVector::basis(16, 0), 0, 15).unwrap_err();
        assert!(matches!(
            err,
            Error::SizeGuard {
                limit: MAX_DENSE_DIM,
                ..
            }
        ));
        assert!(block_density_matrix(&psi, 10, 6).is_err());
    }

    /// Faddeev–LeVerrier characteristic polynomial and Durand–Kerner roots.
    fn char_poly_roots(m: &DMatrix<C64>) -> Vec<f64> {
        let n = m.nrows();
        let mut coeffs = vec![c(1.0)];
        let mut mk = DMatrix::<C64>::zeros(n, n);
        let eye = DMatrix::<C64>::identity(n, n);
        for k in 1..=n {
            mk = m * (&mk + &eye * coeffs[k - 1]);
            coeffs.push(-mk.trace() / c(k as f64));
        }
        let poly = |z: C64| coeffs.iter().fold(c(0.0), |acc, &a| acc * z + a);
        let mut roots: Vec<C64> = (0..n).map(|i| C64::new(0.4, 0.9).powu(i as u32)).collect();
        for _ in 0..500 {
            for i in 0..n {
                let denom: C64 = (0..n)
                    .filter(|&j| j != i)
                    .map(|j| roots[i] - roots[j])
                    .product();
                let step = poly(roots[i]) / denom;
                roots[i] -= step;
            }
        }
        let mut re: Vec<f64> = roots.iter().map(|z| z.re).collect();
        re.sort_by(|a, b| b.total_cmp(a));
        re
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn eigenvalues_match_characteristic_polynomial(seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let a = DMatrix::<C64>::from_fn(4, 4, |_, _| {
                C64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)
            });
            let h = &a + a.adjoint();
            let spec = hermitian_spectrum(&h, 1e-12).unwrap();
            let roots = char_poly_roots(&h);
            for (x, y) in spec.eigenvalues.iter().zip(roots) {
                prop_assert!((x - y).abs() < 1e-9);
            }
        }

        #[test]
        fn traces_and_purity_identity(seed in any::<u64>(), split in 0usize..3) {
            let (a, b, cc) = [(1, 2, 3), (2, 2, 2), (3, 2, 1)][split];
            let psi = random_state(6, seed);
            let rho = reduced_density_matrix(&psi, &TriPartition::new(a, b, cc).unwrap()).unwrap();
            let pt = partial_transpose(&rho);
            prop_assert!((rho.trace() - c(1.0)).norm() < 1e-10);
            prop_assert!((pt.trace() - c(1.0)).norm() < 1e-10);
            prop_assert!(pt.hermiticity_defect() < 1e-12);
            let pt_spec = pt.spectrum().unwrap();
            prop_assert!((pt_spec.trace() - 1.0).abs() < 1e-9);
            prop_assert_eq!(pt_spec.n_plus + pt_spec.n_minus + pt_spec.n_zero, pt_spec.dim());
            let mu: f64 = rho.spectrum().unwrap().eigenvalues.iter().map(|l| l * l).sum();
            prop_assert!((pt_spec.even_moment(1).unwrap() - mu).abs() < 1e-10);
            prop_assert_eq!(negativity(&pt_spec).abs() < 1e-12, pt_spec.n_minus == 0);
            prop_assert!(negativity(&pt_spec) > -1e-12);
        }
    }
}
