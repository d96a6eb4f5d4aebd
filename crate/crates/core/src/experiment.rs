//! Configured time sweeps, figure presets and CSV/JSON output.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, LN_2};
use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::circuit::{CircuitParams, FloquetOperator};
use crate::error::{Error, Result};
use crate::haar::{haar_reference, HaarMeasure, HaarReference, DEFAULT_HAAR_SAMPLES};
use crate::measures::{entanglement_profile, RenyiSet, TriPartition, MAX_DENSE_DIM};
use crate::states::{product_state, ProductStateSpec};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub const DEFAULT_ALPHAS: [f64; 3] = [0.5, 1.0, 2.0];

pub const DEFAULT_T_MAX: usize = 15;

/// Largest chain evolved as a dense state vector.
pub const MAX_STATE_SITES: usize = 26;

pub const PRESET_NAMES: [&str; 12] = [
    "fig1a", "fig1b", "fig1c", "fig1d", "fig2a", "fig2b", "fig2c", "fig2d", "fig3a", "fig3b",
    "fig3c", "fig3d",
];

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HaarSettings {
    #[serde(default = "default_samples")]
    pub samples: usize,
    #[serde(default)]
    pub seed: u64,
}

impl Default for HaarSettings {
    fn default() -> Self {
        Self {
            samples: DEFAULT_HAAR_SAMPLES,
            seed: 0,
        }
    }
}

fn default_samples() -> usize {
    DEFAULT_HAAR_SAMPLES
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OutputSettings {
    pub path: PathBuf,
    #[serde(default)]
    pub format: OutputFormat,
    /// Entropic columns in bits instead of nats.
    #[serde(default)]
    pub bits: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub circuit: CircuitParams,
    pub state: ProductStateSpec,
    pub partition: TriPartition,
    pub t_max: usize,
    #[serde(default = "default_alphas")]
    pub alphas: Vec<f64>,
    #[serde(default)]
    pub epsilon: f64,
    #[serde(default)]
    pub haar: Option<HaarSettings>,
    #[serde(default)]
    pub output: Option<OutputSettings>,
}

fn default_alphas() -> Vec<f64> {
    DEFAULT_ALPHAS.to_vec()
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let config: Self = serde_json::from_str(text)?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn validate(&self) -> Result<()> {
        self.circuit.validate()?;
        let sites = self.circuit.sites;
        if sites > MAX_STATE_SITES {
            return Err(Error::SizeGuard {
                what: "state vector sites",
                requested: sites,
                limit: MAX_STATE_SITES,
            });
        }
        if self.state.sites() != sites || self.state.phis.len() != sites {
            return Err(Error::DimensionMismatch {
                expected: sites,
                found: self.state.sites(),
            });
        }
        self.partition.validate(sites)?;
        if self.partition.dim_ab() > MAX_DENSE_DIM {
            return Err(Error::SizeGuard {
                what: "reduced density matrix dimension",
                requested: self.partition.dim_ab(),
                limit: MAX_DENSE_DIM,
            });
        }
        if self.alphas.is_empty() {
            return Err(Error::InvalidConfig("alphas must not be empty".into()));
        }
        if let Some(&alpha) = self.alphas.iter().find(|a| !(**a > 0.0) || !a.is_finite()) {
            return Err(Error::InvalidAlpha { alpha });
        }
        if !(self.epsilon >= 0.0 && self.epsilon.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "epsilon must be finite and non-negative, got {}",
                self.epsilon
            )));
        }
        if let Some(haar) = &self.haar {
            if haar.samples < 2 {
                return Err(Error::TooFewSamples(haar.samples));
            }
        }
        Ok(())
    }

    /// Circuit actually evolved: `J - ε`, `b - ε`.
    pub fn effective_circuit(&self) -> CircuitParams {
        self.circuit.perturbed(self.epsilon)
    }

    /// α values sorted ascending without duplicates.
    pub fn sorted_alphas(&self) -> Vec<f64> {
        let mut a = self.alphas.clone();
        a.sort_by(f64::total_cmp);
        a.dedup();
        a
    }

    pub fn seed(&self) -> Option<u64> {
        self.haar.as_ref().map(|h| h.seed)
    }
}

/// One time step of a run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EntanglementRecord {
    pub t: usize,
    #[serde(rename = "E")]
    pub negativity: f64,
    #[serde(rename = "E_odd")]
    pub odd_entropy: f64,
    pub renyi: Vec<RenyiSet>,
    #[serde(rename = "S_vN_AB")]
    pub von_neumann_ab: f64,
    #[serde(rename = "N_plus")]
    pub n_plus: usize,
    #[serde(rename = "N_minus")]
    pub n_minus: usize,
    #[serde(rename = "N_zero")]
    pub n_zero: usize,
    pub flat_spread: f64,
    /// `tr ρ_AB^{T_B}` from the spectrum.
    pub pt_trace: f64,
}

impl EntanglementRecord {
    pub fn renyi_at(&self, alpha: f64) -> Option<&RenyiSet> {
        self.renyi.iter().find(|r| r.alpha == alpha)
    }

    /// `|2E - I^{(α)}|`, the Conjecture-1 monitor.
    pub fn conjecture_deviation(&self, alpha: f64) -> Option<f64> {
        self.renyi_at(alpha)
            .map(|r| (2.0 * self.negativity - r.mutual_information).abs())
    }

    /// Entropic quantities divided by `ln 2`.
    pub fn in_bits(&self) -> Self {
        let mut out = self.clone();
        out.negativity /= LN_2;
        out.odd_entropy /= LN_2;
        out.von_neumann_ab /= LN_2;
        for r in &mut out.renyi {
            r.s_a /= LN_2;
            r.s_b /= LN_2;
            r.s_ab /= LN_2;
            r.mutual_information /= LN_2;
        }
        out
    }
}

/// Evolves the configured state and records every `t ∈ 0..=t_max`.
pub fn run_experiment(config: &ExperimentConfig) -> Result<Vec<EntanglementRecord>> {
    config.validate()?;
    let alphas = config.sorted_alphas();
    let floquet = FloquetOperator::new(&config.effective_circuit())?;
    let mut state = product_state(&config.state)?;
    let mut records = Vec::with_capacity(config.t_max + 1);
    for t in 0..=config.t_max {
        if t > 0 {
            state = floquet.apply(&state)?;
        }
        let p = entanglement_profile(&state, &config.partition, &alphas)?;
        records.push(EntanglementRecord {
            t,
            negativity: p.negativity,
            odd_entropy: p.odd_entropy,
            renyi: p.renyi,
            von_neumann_ab: p.von_neumann_ab,
            n_plus: p.n_plus,
            n_minus: p.n_minus,
            n_zero: p.n_zero,
            flat_spread: p.flat_spread,
            pt_trace: p.pt_trace,
        });
    }
    Ok(records)
}

/// Partition with the given ratios of `L_A` and `L_B`, rounded to whole
/// sites; `L_C` takes the rest.
pub fn scaled_partition(sites: usize, ratio_a: f64, ratio_b: f64) -> Result<TriPartition> {
    let a = ((ratio_a * sites as f64).round() as usize).max(1);
    let b = ((ratio_b * sites as f64).round() as usize).max(1);
    if a + b >= sites {
        return Err(Error::InvalidPartition { a, b, c: 0, sites });
    }
    TriPartition::new(a, b, sites - a - b)
}

/// Figure preset at `sites` (defaults: 12 for fig1/fig2, 15 for fig3).
pub fn preset(name: &str, sites: Option<usize>) -> Result<ExperimentConfig> {
    let unknown = || Error::UnknownPreset {
        name: name.to_string(),
        valid: PRESET_NAMES.to_vec(),
    };
    let (theta, phi, field, ratios, default_sites) = match name {
        "fig1a" => (FRAC_PI_2, 0.0, 1.0, (1.0 / 3.0, 1.0 / 3.0), 12),
        "fig1b" => (0.0, 0.0, 1.0, (1.0 / 3.0, 1.0 / 3.0), 12),
        "fig1c" => (FRAC_PI_2, 0.0, 0.0, (1.0 / 3.0, 1.0 / 3.0), 12),
        "fig1d" => (FRAC_PI_2, 0.0, 0.1, (1.0 / 3.0, 1.0 / 3.0), 12),
        "fig2a" => (1.0, 1.0, 1.0, (1.0 / 3.0, 1.0 / 3.0), 12),
        "fig2b" => (2.0, 2.0, 1.0, (1.0 / 3.0, 1.0 / 3.0), 12),
        "fig2c" => (2.5, 1.0, 1.0, (1.0 / 3.0, 1.0 / 3.0), 12),
        "fig2d" => (2.5, 3.0, 1.0, (1.0 / 3.0, 1.0 / 3.0), 12),
        "fig3a" => (FRAC_PI_2, 0.0, 1.0, (6.0 / 30.0, 6.0 / 30.0), 15),
        "fig3b" => (FRAC_PI_2, 0.0, 1.0, (7.0 / 30.0, 7.0 / 30.0), 15),
        "fig3c" => (1.0, 1.0, 1.0, (6.0 / 30.0, 6.0 / 30.0), 15),
        "fig3d" => (1.0, 1.0, 1.0, (7.0 / 30.0, 7.0 / 30.0), 15),
        _ => return Err(unknown()),
    };
    let sites = sites.unwrap_or(default_sites);
    let circuit = CircuitParams::new(sites, FRAC_PI_4, -FRAC_PI_4, vec![field; sites])?;
    let config = ExperimentConfig {
        circuit,
        state: ProductStateSpec::uniform(sites, theta, phi)?,
        partition: scaled_partition(sites, ratios.0, ratios.1)?,
        t_max: DEFAULT_T_MAX,
        alphas: default_alphas(),
        epsilon: 0.0,
        haar: None,
        output: None,
    };
    config.validate()?;
    Ok(config)
}

/// CSV header for the given α list (ascending).
pub fn csv_header(alphas: &[f64]) -> Vec<String> {
    let mut h: Vec<String> = vec!["t".into(), "E".into(), "E_odd".into()];
    for a in alphas {
        h.extend([
            format!("S_A_{a}"),
            format!("S_B_{a}"),
            format!("S_AB_{a}"),
            format!("I_{a}"),
        ]);
    }
    h.extend(["S_vN_AB", "N_plus", "N_minus", "N_zero", "flat_spread"].map(String::from));
    h.extend(alphas.iter().map(|a| format!("conj_dev_{a}")));
    h
}

/// Shortest round-trip text; exponent form outside `[1e-4, 1e16)`.
fn fmt_real(x: f64) -> String {
    let m = x.abs();
    if m == 0.0 || !x.is_finite() || (1e-4..1e16).contains(&m) {
        x.to_string()
    } else {
        format!("{x:e}")
    }
}

fn csv_row(record: &EntanglementRecord, alphas: &[f64]) -> Vec<String> {
    let mut row = vec![
        record.t.to_string(),
        fmt_real(record.negativity),
        fmt_real(record.odd_entropy),
    ];
    for &a in alphas {
        let r = record
            .renyi_at(a)
            .expect("record holds every configured alpha");
        row.extend([r.s_a, r.s_b, r.s_ab, r.mutual_information].map(fmt_real));
    }
    row.push(fmt_real(record.von_neumann_ab));
    row.extend([record.n_plus, record.n_minus, record.n_zero].map(|n| n.to_string()));
    row.push(fmt_real(record.flat_spread));
    row.extend(alphas.iter().map(|&a| {
        fmt_real(
            record
                .conjecture_deviation(a)
                .expect("record holds every configured alpha"),
        )
    }));
    row
}

fn header_line(config: &ExperimentConfig) -> String {
    let seed = config
        .seed()
        .map_or_else(|| "none".to_string(), |s| s.to_string());
    format!("# seed={seed}, version={VERSION}\n")
}

fn convert(records: &[EntanglementRecord], bits: bool) -> Vec<EntanglementRecord> {
    if bits {
        records.iter().map(EntanglementRecord::in_bits).collect()
    } else {
        records.to_vec()
    }
}

pub fn to_csv(
    config: &ExperimentConfig,
    records: &[EntanglementRecord],
    bits: bool,
) -> Result<String> {
    let alphas = config.sorted_alphas();
    let mut writer = csv::Writer::from_writer(Vec::new());
    writer.write_record(csv_header(&alphas))?;
    for record in convert(records, bits) {
        writer.write_record(csv_row(&record, &alphas))?;
    }
    let body = writer.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    let mut out = header_line(config);
    out.push_str(std::str::from_utf8(&body).expect("csv output is UTF-8"));
    Ok(out)
}

#[derive(Serialize)]
struct JsonReport<'a> {
    seed: Option<u64>,
    version: &'a str,
    units: &'a str,
    config: &'a ExperimentConfig,
    records: Vec<JsonRecord>,
}

#[derive(Serialize)]
struct JsonRecord {
    #[serde(flatten)]
    record: EntanglementRecord,
    conj_dev: Vec<f64>,
}

pub fn to_json(
    config: &ExperimentConfig,
    records: &[EntanglementRecord],
    bits: bool,
) -> Result<String> {
    let alphas = config.sorted_alphas();
    let records = convert(records, bits)
        .into_iter()
        .map(|record| JsonRecord {
            conj_dev: alphas
                .iter()
                .map(|&a| record.conjecture_deviation(a).unwrap_or(f64::NAN))
                .collect(),
            record,
        })
        .collect();
    let report = JsonReport {
        seed: config.seed(),
        version: VERSION,
        units: if bits { "bits" } else { "nats" },
        config,
        records,
    };
    let mut text = serde_json::to_string_pretty(&report)?;
    text.push('\n');
    Ok(text)
}

pub fn render(
    config: &ExperimentConfig,
    records: &[EntanglementRecord],
    format: OutputFormat,
    bits: bool,
) -> Result<String> {
    match format {
        OutputFormat::Csv => to_csv(config, records, bits),
        OutputFormat::Json => to_json(config, records, bits),
    }
}

/// Writes through a temporary file in the target directory, then renames.
pub fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(contents.as_bytes())?;
    tmp.flush()?;
    tmp.persist(path).map_err(|e| Error::Io(e.error))?;
    Ok(())
}

/// Haar reference for the configured size and partition, keyed by CSV column.
pub fn haar_refs(config: &ExperimentConfig) -> Result<HaarReference> {
    let settings = config.haar.clone().unwrap_or_default();
    haar_reference(
        config.circuit.sites,
        &config.partition,
        &HaarMeasure::all(&config.sorted_alphas()),
        settings.samples,
        settings.seed,
    )
}

/// Text summary of a run; one line per record.
pub fn summary(records: &[EntanglementRecord], alpha: f64) -> String {
    let mut s = String::new();
    for r in records {
        let i = r.renyi_at(alpha).map_or(f64::NAN, |x| x.mutual_information);
        let _ = writeln!(
            s,
            "t={:>3}  2E={:.6}  (2/3)E_odd={:.6}  I_{alpha}={:.6}",
            r.t,
            2.0 * r.negativity,
            2.0 * r.odd_entropy / 3.0,
            i
        );
    }
    s
}
