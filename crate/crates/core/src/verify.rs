//! Self-checks run by `kfim verify`: cross-engine moments, the transfer-matrix
//! identities and the flat spectrum of solvable states.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::circuit::{
    build_floquet_dense, check_dual_unitarity, evolve, plaquette_gate, CircuitParams,
    FloquetOperator, StateVector, C64,
};
use crate::error::Result;
use crate::measures::{partial_transpose, reduced_density_matrix, TriPartition};
use crate::replica::{
    lemma_closed_form, moment_via_transfer, overlap_one_p_one, overlap_one_pdag_pprime_one,
    spectral_certificate, BoundaryForm, ReplicaSpace, TransferFlavor, TransferMatrix,
};
use crate::states::{product_state, ProductStateSpec};

#[derive(Clone, Debug, PartialEq)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl CheckResult {
    fn new(name: impl Into<String>, passed: bool, detail: String) -> Self {
        Self {
            name: name.into(),
            passed,
            detail,
        }
    }
}

impl std::fmt::Display for CheckResult {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let tag = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "{tag}  {}  ({})", self.name, self.detail)
    }
}

/// Even moment `tr((ρ^{T_B})^{2n})` after `t` periods of the dual-point
/// circuit from the uniform product state `(θ, φ)`.
pub fn state_vector_moment(
    part: &TriPartition,
    fields: &[f64],
    theta: f64,
    phi: f64,
    t: usize,
    n: usize,
) -> Result<f64> {
    let sites = part.sites();
    let params = CircuitParams::dual_point(sites, fields.to_vec())?;
    let psi = evolve(
        &product_state(&ProductStateSpec::uniform(sites, theta, phi)?)?,
        &params,
        t,
    )?;
    partial_transpose(&reduced_density_matrix(&psi, part)?)
        .spectrum()?
        .even_moment(n)
}

fn floquet_oracle() -> Result<CheckResult> {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let fields: Vec<f64> = (0..6).map(|_| rng.random_range(-1.0..1.0)).collect();
    let params = CircuitParams::dual_point(6, fields)?;
    let dense = build_floquet_dense(&params)?;
    let op = FloquetOperator::new(&params)?;
    let mut worst = 0.0f64;
    for _ in 0..10 {
        let amps: Vec<C64> = (0..64)
            .map(|_| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
            .collect();
        let mut psi = StateVector::new(6, amps)?;
        psi.normalize();
        let kernel = op.apply(&psi)?;
        let v = &dense * nalgebra::DVector::from_column_slice(psi.amplitudes());
        for (a, b) in kernel.amplitudes().iter().zip(v.iter()) {
            worst = worst.max((a - b).norm());
        }
    }
    Ok(CheckResult::new(
        "Floquet kernel equals dense operator (L=6)",
        worst <= 1e-12,
        format!("max deviation {worst:.2e}"),
    ))
}

fn dual_unitarity() -> Result<CheckResult> {
    let at_point = check_dual_unitarity(&plaquette_gate(FRAC_PI_4, -FRAC_PI_4))?;
    let off_point = check_dual_unitarity(&plaquette_gate(FRAC_PI_4 - 0.1, -FRAC_PI_4))?;
    Ok(CheckResult::new(
        "dual unitarity at J=π/4, b=-π/4 only",
        at_point && !off_point,
        format!("dual point {at_point}, J-0.1 {off_point}"),
    ))
}

fn lemma_state_vector() -> Result<CheckResult> {
    let part = TriPartition::new(4, 4, 4)?;
    let mut worst = 0.0f64;
    for t in 1..=2 {
        for n in 1..=2 {
            let m = state_vector_moment(&part, &[1.0; 12], FRAC_PI_2, 0.0, t, n)?;
            worst = worst.max((m / lemma_closed_form(n, t) - 1.0).abs());
        }
    }
    Ok(CheckResult::new(
        "even moments equal 2^((4-6n)t) (L=12, 4/4/4)",
        worst <= 1e-8,
        format!("max relative error {worst:.2e}"),
    ))
}

fn cross_engine() -> Result<CheckResult> {
    let part = TriPartition::new(3, 3, 3)?;
    let space = ReplicaSpace::new(1, 1)?;
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut worst = 0.0f64;
    for _ in 0..5 {
        let h = rng.random_range(-2.0..2.0);
        let fields = vec![h; 9];
        let sv = state_vector_moment(&part, &fields, FRAC_PI_2, 0.0, 1, 1)?;
        let tm = moment_via_transfer(&part, space, &fields, FRAC_PI_2, 0.0, BoundaryForm::Finite)?;
        worst = worst.max((sv - tm).abs());
    }
    Ok(CheckResult::new(
        "transfer-matrix moment equals state-vector moment (L=9, t=1)",
        worst <= 1e-9,
        format!("max deviation {worst:.2e}"),
    ))
}

fn boundary_form() -> Result<Vec<CheckResult>> {
    [(1, 1), (1, 2), (2, 1)]
        .into_iter()
        .map(|(n, t)| {
            let space = ReplicaSpace::new(n, t)?;
            let part = TriPartition::new(2 * t, 2 * t, 1)?;
            let fields = vec![1.0; part.sites()];
            let m = moment_via_transfer(
                &part,
                space,
                &fields,
                FRAC_PI_2,
                0.0,
                BoundaryForm::InfiniteC,
            )?;
            let err = (m / lemma_closed_form(n, t) - 1.0).abs();
            Ok(CheckResult::new(
                format!("boundary form gives 2^((4-6n)t) at n={n}, t={t}"),
                err <= 1e-8,
                format!("moment {m:e}, relative error {err:.2e}"),
            ))
        })
        .collect()
}

fn overlaps() -> Result<Vec<CheckResult>> {
    let mut out = Vec::new();
    for (n, t) in [(1, 1), (1, 2), (2, 1), (2, 2)] {
        let space = ReplicaSpace::new(n, t)?;
        let p = overlap_one_p_one(space, false);
        let expected = 2f64.powi((1 - 2 * n as i32) * t as i32);
        out.push(CheckResult::new(
            format!("<1|P|1> = 2^((1-2n)t) at n={n}, t={t}"),
            (p - expected).abs() <= 1e-12,
            format!("measured {p}, expected {expected}"),
        ));
        let pp = overlap_one_pdag_pprime_one(space);
        let expected = 2f64.powi((2 - 2 * n as i32) * t as i32);
        out.push(CheckResult::new(
            format!("<1|P†P'|1> = 2^((2-2n)t) at n={n}, t={t}"),
            (pp - expected).abs() <= 1e-12,
            format!("measured {pp}, expected {expected}"),
        ));
    }
    Ok(out)
}

fn spectral_property(t: usize) -> Result<CheckResult> {
    let space = ReplicaSpace::new(1, t)?;
    let m = TransferMatrix::new(space, TransferFlavor::C, 1.0, FRAC_PI_2, 0.0);
    let cert = spectral_certificate(&m, 2 * t + 2, 1e-9)?;
    Ok(CheckResult::new(
        format!("Spec(T_C) in {{0,1}} with simple unit eigenvalue (n=1, t={t})"),
        cert.holds(1e-9),
        format!(
            "nilpotency index {:?}, deviation {:.2e}, tr T^k = {:.12}",
            cert.nilpotency_index, cert.eigenvalue_deviation, cert.unit_multiplicity
        ),
    ))
}

fn flat_spectrum() -> Result<CheckResult> {
    let part = TriPartition::new(4, 4, 4)?;
    let params = CircuitParams::dual_point(12, vec![1.0; 12])?;
    let mut psi = product_state(&ProductStateSpec::uniform(12, FRAC_PI_2, 0.0)?)?;
    let op = FloquetOperator::new(&params)?;
    let mut ok = true;
    let mut detail = Vec::new();
    for t in 1..=2u32 {
        psi = op.apply(&psi)?;
        let spec = partial_transpose(&reduced_density_matrix(&psi, &part)?).spectrum()?;
        let nonzero = spec.n_plus + spec.n_minus;
        let (p, m) = (
            (1usize << (4 * t)) + (1 << (3 * t)),
            (1usize << (4 * t)) - (1 << (3 * t)),
        );
        ok &= nonzero == 1 << (4 * t)
            && spec.n_plus == p / 2
            && spec.n_minus == m / 2
            && spec.flat_spread() <= 1e-8;
        detail.push(format!(
            "t={t}: N+={} N-={} spread {:.1e}",
            spec.n_plus,
            spec.n_minus,
            spec.flat_spread()
        ));
    }
    Ok(CheckResult::new(
        "flat partial-transpose spectrum (L=12, 4/4/4)",
        ok,
        detail.join("; "),
    ))
}

/// Runs every check; the t=3 spectral certificate is included when `full`.
pub fn run_checks(full: bool) -> Result<Vec<CheckResult>> {
    let mut out = vec![
        floquet_oracle()?,
        dual_unitarity()?,
        lemma_state_vector()?,
        flat_spectrum()?,
        cross_engine()?,
    ];
    out.extend(boundary_form()?);
    out.extend(overlaps()?);
    let max_t = if full { 3 } else { 2 };
    for t in 1..=max_t {
        out.push(spectral_property(t)?);
    }
    Ok(out)
}
