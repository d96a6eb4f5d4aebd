//! Replica transfer matrices of the dual-unitary kicked Ising chain.
//!
//! A configuration of the replica space is a grid of spins `s_{ν,τ}` with
//! `ν = 0..4n` replica rows and `τ = 0..t` time slices. Rows `ν < 2n` are
//! forward (ket) copies, the rest backward (bra) copies. Row-major bit
//! position `p = ν·t + τ` is stored most-significant first, so the basis
//! index bit is `D - 1 - p` with `D = 4n·t`, and `s = 1 - 2·bit`.
//!
//! Every transfer matrix factors as `T = F·K`: `K` is the tensor product of
//! the space-direction kernels `exp(-iπ/4·sgn·s·r)` and `F` is diagonal. This
//! gives `O(d log d)` matrix-vector products next to the dense assembly.

use std::f64::consts::FRAC_PI_4;

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::circuit::C64;
use crate::error::{Error, Result};
use crate::measures::TriPartition;

/// Largest replica-space dimension for dense matrices and for operations
/// that sweep every basis column (traces, spectral certificates).
pub const MAX_REPLICA_DIM: usize = 1 << 12;

/// Largest replica-space dimension for vector-only operations.
pub const MAX_REPLICA_VECTOR_DIM: usize = 1 << 20;

/// Relative imaginary part tolerated in a transfer-matrix moment.
pub const MOMENT_IMAG_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReplicaSpace {
    pub n: usize,
    pub t: usize,
}

impl ReplicaSpace {
    pub fn new(n: usize, t: usize) -> Result<Self> {
        if n == 0 || t == 0 {
            return Err(Error::InvalidConfig(format!(
                "replica space needs n ≥ 1 and t ≥ 1, got n={n}, t={t}"
            )));
        }
        let bits = 4 * n * t;
        if bits > MAX_REPLICA_VECTOR_DIM.trailing_zeros() as usize {
            return Err(Error::SizeGuard {
                what: "replica space dimension 2^(4nt)",
                requested: 1usize.checked_shl(bits as u32).unwrap_or(usize::MAX),
                limit: MAX_REPLICA_VECTOR_DIM,
            });
        }
        Ok(Self { n, t })
    }

    /// Errors unless the space is small enough for dense work.
    pub fn require_dense(&self, what: &'static str) -> Result<()> {
        if self.dim() > MAX_REPLICA_DIM {
            return Err(Error::SizeGuard {
                what,
                requested: self.dim(),
                limit: MAX_REPLICA_DIM,
            });
        }
        Ok(())
    }

    pub fn rows(&self) -> usize {
        4 * self.n
    }

    pub fn bits(&self) -> usize {
        4 * self.n * self.t
    }

    pub fn dim(&self) -> usize {
        1 << self.bits()
    }

    /// `+1` for forward rows, `-1` for backward rows.
    pub fn row_sign(&self, nu: usize) -> f64 {
        if nu < 2 * self.n {
            1.0
        } else {
            -1.0
        }
    }

    fn shift(&self, nu: usize, tau: usize) -> usize {
        self.bits() - 1 - (nu * self.t + tau)
    }

    pub fn spin(&self, index: usize, nu: usize, tau: usize) -> i8 {
        1 - 2 * ((index >> self.shift(nu, tau)) & 1) as i8
    }

    pub fn spins(&self, index: usize) -> Vec<Vec<i8>> {
        (0..self.rows())
            .map(|nu| (0..self.t).map(|tau| self.spin(index, nu, tau)).collect())
            .collect()
    }

    pub fn index_of(&self, spins: &[Vec<i8>]) -> usize {
        let mut index = 0;
        for (nu, row) in spins.iter().enumerate() {
            for (tau, &s) in row.iter().enumerate() {
                if s < 0 {
                    index |= 1 << self.shift(nu, tau);
                }
            }
        }
        index
    }

    fn forward_mask(&self) -> usize {
        let bwd_bits = 2 * self.n * self.t;
        ((1 << bwd_bits) - 1) << bwd_bits
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum TransferFlavor {
    A,
    B,
    C,
}

impl TransferFlavor {
    /// Backward row paired with forward row `nu` by the final-time projector.
    pub fn pairing(self, n: usize, nu: usize) -> usize {
        let two_n = 2 * n;
        match self {
            Self::C => nu + two_n,
            Self::A => two_n + (nu + two_n - 1) % two_n,
            Self::B => two_n + (nu + 1) % two_n,
        }
    }
}

/// One site's transfer matrix, stored as the diagonal of `F` in `T = F·K`.
#[derive(Clone, Debug)]
pub struct TransferMatrix {
    space: ReplicaSpace,
    flavor: TransferFlavor,
    field: f64,
    theta: f64,
    phi: f64,
    diagonal: Vec<C64>,
}

impl TransferMatrix {
    pub fn new(
        space: ReplicaSpace,
        flavor: TransferFlavor,
        field: f64,
        theta: f64,
        phi: f64,
    ) -> Self {
        let prefactor = 0.5f64.powi((2 * (space.t - 1) * space.n) as i32);
        let (cos, sin) = ((theta / 2.0).cos(), (theta / 2.0).sin());
        let diagonal = (0..space.dim())
            .into_par_iter()
            .map(|index| {
                let s = space.spins(index);
                for nu in 0..2 * space.n {
                    if s[nu][space.t - 1] != s[flavor.pairing(space.n, nu)][space.t - 1] {
                        return C64::new(0.0, 0.0);
                    }
                }
                let mut phase = 0.0;
                let mut weight = C64::new(prefactor, 0.0);
                for (nu, row) in s.iter().enumerate() {
                    let sign = space.row_sign(nu);
                    let local: f64 = row.iter().map(|&x| field * x as f64).sum::<f64>()
                        + row
                            .windows(2)
                            .map(|w| FRAC_PI_4 * (w[0] * w[1]) as f64)
                            .sum::<f64>();
                    phase += sign * local;
                    weight *= if row[0] > 0 {
                        C64::new(cos, 0.0)
                    } else {
                        C64::from_polar(sin, sign * phi)
                    };
                }
                weight * C64::from_polar(1.0, -phase)
            })
            .collect();
        Self {
            space,
            flavor,
            field,
            theta,
            phi,
            diagonal,
        }
    }

    pub fn space(&self) -> ReplicaSpace {
        self.space
    }

    pub fn flavor(&self) -> TransferFlavor {
        self.flavor
    }

    pub fn field(&self) -> f64 {
        self.field
    }

    pub fn angles(&self) -> (f64, f64) {
        (self.theta, self.phi)
    }

    pub fn diagonal(&self) -> &[C64] {
        &self.diagonal
    }

    pub fn element(&self, row: usize, col: usize) -> C64 {
        self.diagonal[row] * kernel_element(&self.space, row ^ col)
    }

    pub fn to_dense(&self) -> Result<DMatrix<C64>> {
        self.space.require_dense("dense transfer matrix")?;
        let d = self.space.dim();
        Ok(DMatrix::from_fn(d, d, |r, c| self.element(r, c)))
    }

    /// `v ← T v`.
    pub fn apply_in_place(&self, v: &mut [C64]) {
        apply_kernel(&self.space, v, 1.0);
        for (x, f) in v.iter_mut().zip(&self.diagonal) {
            *x *= f;
        }
    }

    /// `v ← T† v`.
    pub fn apply_adjoint_in_place(&self, v: &mut [C64]) {
        for (x, f) in v.iter_mut().zip(&self.diagonal) {
            *x *= f.conj();
        }
        apply_kernel(&self.space, v, -1.0);
    }
}

/// `K(s, r) = i^{#forward flips - #backward flips}` for `x = s XOR r`.
fn kernel_element(space: &ReplicaSpace, x: usize) -> C64 {
    let fwd = (x & space.forward_mask()).count_ones() as i64;
    let bwd = (x & !space.forward_mask()).count_ones() as i64;
    match (fwd - bwd).rem_euclid(4) {
        0 => C64::new(1.0, 0.0),
        1 => C64::new(0.0, 1.0),
        2 => C64::new(-1.0, 0.0),
        _ => C64::new(0.0, -1.0),
    }
}

/// Applies `K` (`direction = 1`) or `K†` (`direction = -1`). Each bit carries
/// `[[1, ±i], [±i, 1]]` up to a phase; the phases cancel between the equal
/// numbers of forward and backward bits.
fn apply_kernel(space: &ReplicaSpace, v: &mut [C64], direction: f64) {
    let fwd = space.forward_mask();
    for bit in 0..space.bits() {
        let mask = 1usize << bit;
        let sign = if fwd & mask != 0 { 1.0 } else { -1.0 };
        let c = C64::new(0.0, sign * direction);
        for i in 0..v.len() {
            if i & mask == 0 {
                let (a, b) = (v[i], v[i | mask]);
                v[i] = a + c * b;
                v[i | mask] = c * a + b;
            }
        }
    }
}

/// Cyclic relabelling of the forward rows, `P|s⟩ = |s'⟩`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Permutation {
    images: Vec<usize>,
}

impl Permutation {
    pub fn image(&self, index: usize) -> usize {
        self.images[index]
    }

    pub fn apply(&self, v: &[C64]) -> Vec<C64> {
        let mut out = vec![C64::new(0.0, 0.0); v.len()];
        for (j, &x) in v.iter().enumerate() {
            out[self.images[j]] = x;
        }
        out
    }

    pub fn apply_inverse(&self, v: &[C64]) -> Vec<C64> {
        self.images.iter().map(|&i| v[i]).collect()
    }

    pub fn to_dense(&self) -> DMatrix<C64> {
        let d = self.images.len();
        assert!(
            d <= MAX_REPLICA_DIM,
            "dense permutation above the replica guard"
        );
        let mut m = DMatrix::zeros(d, d);
        for (j, &i) in self.images.iter().enumerate() {
            m[(i, j)] = C64::new(1.0, 0.0);
        }
        m
    }
}

/// `P` sets `s'_ν = s_{ν-1}` on the forward rows; `P′` (`primed`) sets
/// `s'_ν = s_{ν+1}`. Then `T_A = P T_C P†` and `T_B = P′ T_C P′†`.
pub fn permutation(space: ReplicaSpace, primed: bool) -> Permutation {
    let two_n = 2 * space.n;
    let images = (0..space.dim())
        .map(|index| {
            let s = space.spins(index);
            let mut out = s.clone();
            for nu in 0..two_n {
                let from = if primed {
                    (nu + 1) % two_n
                } else {
                    (nu + two_n - 1) % two_n
                };
                out[nu] = s[from].clone();
            }
            space.index_of(&out)
        })
        .collect();
    Permutation { images }
}

/// Normalized `|1⟩`: equal weight `2^{-nt}` on configurations with each
/// forward row equal to its backward partner `ν + 2n`.
pub fn boundary_vector_one(space: ReplicaSpace) -> Vec<C64> {
    let value = 0.5f64.powi((space.n * space.t) as i32);
    let half = 2 * space.n * space.t;
    let low = (1usize << half) - 1;
    (0..space.dim())
        .map(|index| {
            if index >> half == index & low {
                C64::new(value, 0.0)
            } else {
                C64::new(0.0, 0.0)
            }
        })
        .collect()
}

fn dot(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

/// `⟨1|P|1⟩` (or `⟨1|P′|1⟩`).
pub fn overlap_one_p_one(space: ReplicaSpace, primed: bool) -> f64 {
    let one = boundary_vector_one(space);
    dot(&one, &permutation(space, primed).apply(&one)).re
}

/// `⟨1|P†P′|1⟩`.
pub fn overlap_one_pdag_pprime_one(space: ReplicaSpace) -> f64 {
    let one = boundary_vector_one(space);
    let p = permutation(space, false);
    let pp = permutation(space, true);
    dot(&p.apply(&one), &pp.apply(&one)).re
}

/// `⟨1|P|1⟩ · ⟨1|P†P′|1⟩ · ⟨1|P′†|1⟩`, the moment when all three blocks are
/// long compared with `2t`.
pub fn lemma_overlap_product(space: ReplicaSpace) -> f64 {
    overlap_one_p_one(space, false)
        * overlap_one_pdag_pprime_one(space)
        * overlap_one_p_one(space, true)
}

/// `2^{(4 - 6n)t}`.
pub fn lemma_closed_form(n: usize, t: usize) -> f64 {
    2f64.powi((4 - 6 * n as i32) * t as i32)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum BoundaryForm {
    /// `tr(∏_A T_A ∏_B T_B ∏_C T_C)`.
    Finite,
    /// `⟨1|∏_A T_A ∏_B T_B|1⟩`; the fields of C are not used.
    InfiniteC,
}

struct Chain<'a> {
    matrices: &'a [TransferMatrix],
}

impl Chain<'_> {
    /// `v ← (∏_k T_k) v`, rightmost factor first.
    fn apply(&self, v: &mut [C64]) {
        for m in self.matrices.iter().rev() {
            m.apply_in_place(v);
        }
    }
}

fn chain_matrices(
    part: &TriPartition,
    space: ReplicaSpace,
    fields: &[f64],
    theta: f64,
    phi: f64,
    with_c: bool,
) -> Vec<TransferMatrix> {
    let flavors = std::iter::repeat_n(TransferFlavor::A, part.len_a)
        .chain(std::iter::repeat_n(TransferFlavor::B, part.len_b))
        .chain(std::iter::repeat_n(
            TransferFlavor::C,
            if with_c { part.len_c } else { 0 },
        ));
    flavors
        .zip(fields)
        .map(|(flavor, &h)| TransferMatrix::new(space, flavor, h, theta, phi))
        .collect()
}

/// `tr((ρ_AB^{T_B})^{2n})` after `t` periods from the uniform product state
/// with angles `(θ, φ)`, computed from replica transfer matrices.
pub fn moment_via_transfer(
    part: &TriPartition,
    space: ReplicaSpace,
    fields: &[f64],
    theta: f64,
    phi: f64,
    form: BoundaryForm,
) -> Result<f64> {
    part.validate(part.sites())?;
    if fields.len() != part.sites() {
        return Err(Error::FieldLength {
            expected: part.sites(),
            found: fields.len(),
        });
    }
    let value = match form {
        BoundaryForm::Finite => {
            space.require_dense("transfer-matrix trace")?;
            let matrices = chain_matrices(part, space, fields, theta, phi, true);
            let chain = Chain {
                matrices: &matrices,
            };
            (0..space.dim())
                .into_par_iter()
                .map(|j| {
                    let mut v = vec![C64::new(0.0, 0.0); space.dim()];
                    v[j] = C64::new(1.0, 0.0);
                    chain.apply(&mut v);
                    v[j]
                })
                .sum::<C64>()
        }
        BoundaryForm::InfiniteC => {
            let matrices = chain_matrices(part, space, fields, theta, phi, false);
            let one = boundary_vector_one(space);
            let mut v = one.clone();
            Chain {
                matrices: &matrices,
            }
            .apply(&mut v);
            dot(&one, &v)
        }
    };
    if value.im.abs() > MOMENT_IMAG_TOL * value.re.abs().max(1.0) {
        return Err(Error::NonRealMoment {
            re: value.re,
            im: value.im,
        });
    }
    Ok(value.re)
}

/// Numerical certificate that `Spec(T_C) ⊂ {0, 1}` with a simple unit
/// eigenvalue: `T|1⟩ = |1⟩`, `⟨1|T = ⟨1|` and `T^k = |1⟩⟨1|` from some `k` on.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectralCertificate {
    pub right_residual: f64,
    pub left_residual: f64,
    pub fixed_point_deviation: f64,
    /// `‖T^k - |1⟩⟨1|‖_F` for `k = 1..=max_power`.
    pub power_defects: Vec<f64>,
    /// `tr(T^k)` for `k = 1..=max_power`.
    pub power_traces: Vec<C64>,
    /// Smallest `k` with `‖T^k - |1⟩⟨1|‖_F ≤ tol`.
    pub nilpotency_index: Option<usize>,
    /// Bauer–Fike radius around `{0, 1}` containing `Spec(T^k)` and
    /// `Spec(T^{k+1})` at the nilpotency index.
    pub eigenvalue_deviation: f64,
    /// `tr(T^k)` at the nilpotency index, the algebraic multiplicity of 1.
    pub unit_multiplicity: f64,
}

impl SpectralCertificate {
    pub fn holds(&self, tol: f64) -> bool {
        self.nilpotency_index.is_some()
            && self.right_residual <= tol
            && self.left_residual <= tol
            && self.fixed_point_deviation <= tol
            && self.eigenvalue_deviation <= tol
            && (self.unit_multiplicity - 1.0).abs() <= tol
    }
}

pub fn spectral_certificate(
    matrix: &TransferMatrix,
    max_power: usize,
    tol: f64,
) -> Result<SpectralCertificate> {
    let space = matrix.space();
    space.require_dense("spectral certificate")?;
    let d = space.dim();
    let one = boundary_vector_one(space);

    let mut right = one.clone();
    matrix.apply_in_place(&mut right);
    let mut left = one.clone();
    matrix.apply_adjoint_in_place(&mut left);
    let residual = |v: &[C64]| {
        v.iter()
            .zip(&one)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt()
    };
    let fixed_point_deviation = (dot(&one, &right) - C64::new(1.0, 0.0)).norm();

    let zero = || (vec![0.0; max_power], vec![C64::new(0.0, 0.0); max_power]);
    let (defect_sq, traces) = (0..d)
        .into_par_iter()
        .fold(zero, |(mut defects, mut traces), j| {
            let mut v = vec![C64::new(0.0, 0.0); d];
            v[j] = C64::new(1.0, 0.0);
            let proj = one[j].conj();
            for k in 0..max_power {
                matrix.apply_in_place(&mut v);
                defects[k] += v
                    .iter()
                    .zip(&one)
                    .map(|(x, o)| (x - o * proj).norm_sqr())
                    .sum::<f64>();
                traces[k] += v[j];
            }
            (defects, traces)
        })
        .reduce(zero, |(mut a, mut ta), (b, tb)| {
            a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
            ta.iter_mut().zip(tb).for_each(|(x, y)| *x += y);
            (a, ta)
        });
    let power_defects: Vec<f64> = defect_sq.iter().map(|x| x.sqrt()).collect();
    let nilpotency_index = power_defects
        .iter()
        .position(|&x| x <= tol)
        .map(|k| k + 1)
        .filter(|&k| k < max_power);
    let (eigenvalue_deviation, unit_multiplicity) = match nilpotency_index {
        Some(k) => (power_defects[k - 1].max(power_defects[k]), traces[k - 1].re),
        None => (f64::INFINITY, f64::NAN),
    };
    Ok(SpectralCertificate {
        right_residual: residual(&right),
        left_residual: residual(&left),
        fixed_point_deviation,
        power_defects,
        power_traces: traces,
        nilpotency_index,
        eigenvalue_deviation,
        unit_multiplicity,
    })
}

/// `‖T^{k+1} - T^k‖_F` and `tr(T^k)` for `k = 1..=max_power`. A vanishing
/// difference at some `k` forces `λ^k (λ - 1) = 0` for every eigenvalue,
/// independently of any candidate fixed point.
pub fn power_differences(
    matrix: &TransferMatrix,
    max_power: usize,
) -> Result<(Vec<f64>, Vec<C64>)> {
    matrix.space().require_dense("power differences")?;
    let d = matrix.space().dim();
    let zero = || (vec![0.0; max_power], vec![C64::new(0.0, 0.0); max_power]);
    let (diff_sq, traces) = (0..d)
        .into_par_iter()
        .fold(zero, |(mut diffs, mut traces), j| {
            let mut v = vec![C64::new(0.0, 0.0); d];
            v[j] = C64::new(1.0, 0.0);
            matrix.apply_in_place(&mut v);
            for k in 0..max_power {
                traces[k] += v[j];
                let prev = v.clone();
                matrix.apply_in_place(&mut v);
                diffs[k] += v
                    .iter()
                    .zip(&prev)
                    .map(|(a, b)| (a - b).norm_sqr())
                    .sum::<f64>();
            }
            (diffs, traces)
        })
        .reduce(zero, |(mut a, mut ta), (b, tb)| {
            a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
            ta.iter_mut().zip(tb).for_each(|(x, y)| *x += y);
            (a, ta)
        });
    Ok((diff_sq.iter().map(|x| x.sqrt()).collect(), traces))
}
