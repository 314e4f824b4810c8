//! Sampling campaigns, region checks and figure datasets.
//!
//! Sample `i` of a campaign with seed `s` draws all of its randomness from
//! `StreamSeed::new(s, i)`, so results do not depend on the worker count.

use std::fs;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::families::{self, Bell, Curve, FamilySpec, State};
use crate::matkernel::ComplexMatrix;
use crate::measures::{self, MeasureRecord};
use crate::qstate::{self, DensityMatrix, PartialTrace, StreamSeed};

/// Default tolerance for region membership.
pub const REGION_TOL: f64 = 1e-9;
/// Tolerance for the two identities involving τ.
pub const TAU_TOL: f64 = 1e-8;
/// Points per analytic curve in figure datasets.
pub const CURVE_POINTS: usize = 512;
/// Offending records kept in a [`ViolationReport`].
pub const MAX_OFFENDING: usize = 20;

/// Sample count, seed and worker count shared by every campaign.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CampaignConfig {
    pub n: usize,
    pub seed: u64,
    /// `None` uses rayon's default pool size.
    #[serde(skip)]
    pub threads: Option<usize>,
}

impl CampaignConfig {
    pub fn new(n: usize, seed: u64) -> Self {
        Self { n, seed, threads: None }
    }

    pub fn with_threads(mut self, threads: usize) -> Self {
        self.threads = Some(threads);
        self
    }

    fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::Domain("sample count must be at least 1".into()));
        }
        if self.threads == Some(0) {
            return Err(Error::Domain("worker count must be at least 1".into()));
        }
        Ok(())
    }
}

/// Runs `f(i, rng_i)` for i in 0..n on a dedicated pool and returns the
/// results in index order.
pub fn run_indexed<T, F>(config: &CampaignConfig, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(usize, &mut ChaCha8Rng) -> Result<T> + Sync,
{
    config.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.threads.unwrap_or(0))
        .build()
        .map_err(|e| Error::Domain(format!("cannot start worker pool: {e}")))?;
    pool.install(|| {
        (0..config.n)
            .into_par_iter()
            .map(|i| f(i, &mut StreamSeed::new(config.seed, i as u64).rng()))
            .collect()
    })
}

fn scatter_tag(dims: &[usize]) -> String {
    format!("haar_{}", dims.iter().map(usize::to_string).collect::<String>())
}

/// Measures of ρ₁₂ for Haar-random pure states on `dims`.
///
/// `dims` is (2,2) for pure two-qubit states or (2,2,k) with k ∈ {2,3,4},
/// in which case the third factor is traced out. τ is recorded for (2,2,2).
pub fn scatter(dims: &[usize], config: &CampaignConfig) -> Result<Vec<MeasureRecord>> {
    match dims {
        [2, 2] | [2, 2, 2] | [2, 2, 3] | [2, 2, 4] => {}
        _ => {
            return Err(Error::Dimension(format!(
                "scatter supports dims 2,2 and 2,2,k with k in 2..=4, got {dims:?}"
            )))
        }
    }
    let tag = scatter_tag(dims);
    run_indexed(config, |_, rng| {
        let psi = qstate::haar_random_pure(dims, rng)?;
        if dims == [2, 2, 2] {
            MeasureRecord::from_three_qubit(&psi, tag.as_str())
        } else if dims.len() == 2 {
            MeasureRecord::from_state(&psi.to_density(), None, tag.as_str())
        } else {
            MeasureRecord::from_state(&psi.reduce(&[0, 1])?, None, tag.as_str())
        }
    })
}

/// Numerical measures of random members of a named family.
pub fn family_samples(tag: &str, config: &CampaignConfig) -> Result<Vec<MeasureRecord>> {
    FamilySpec::random(tag, &mut StreamSeed::new(0, 0).rng())?;
    run_indexed(config, |_, rng| {
        let spec = FamilySpec::random(tag, rng)?;
        match families::make_state(&spec)? {
            State::Pure(psi) => MeasureRecord::from_three_qubit(&psi, tag),
            State::Mixed(rho) => MeasureRecord::from_state(&rho, None, tag),
        }
    })
}

/// The perturbation experiments around boundary families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PerturbationKind {
    /// Ansatz-I plus a random state with the same three eigenvectors.
    Ansatz1Fig4,
    /// Werner (ψ⁻ fiducial) plus the two-qubit reduction of a Haar (2,2,4) state.
    WernerFig5,
    /// Three-qubit purification of MEMS-I plus a Haar three-qubit vector.
    Mems1Fig8,
}

impl PerturbationKind {
    pub const ALL: [PerturbationKind; 3] = [Self::Ansatz1Fig4, Self::WernerFig5, Self::Mems1Fig8];

    pub fn tag(self) -> &'static str {
        match self {
            Self::Ansatz1Fig4 => "ansatz1_fig4",
            Self::WernerFig5 => "werner_fig5",
            Self::Mems1Fig8 => "mems1_fig8",
        }
    }

    pub fn parse(tag: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.tag() == tag)
            .ok_or_else(|| Error::UnknownTag {
                kind: "perturbation kind",
                tag: tag.to_string(),
            })
    }
}

fn perturbed_sample(kind: PerturbationKind, epsilon: f64, rng: &mut ChaCha8Rng) -> Result<MeasureRecord> {
    let tag = kind.tag();
    match kind {
        PerturbationKind::Ansatz1Fig4 => {
            let spec = FamilySpec::Ansatz1 {
                p: rng.random_range(0.0..=1.0),
            };
            let base = families::make_state(&spec)?.pair()?;
            let vecs = [Bell::PsiPlus.vector(), Bell::PsiMinus.vector(), Bell::PhiPlus.vector()];
            let noise = qstate::random_fixed_eigvecs(&[2, 2], &vecs, rng)?;
            MeasureRecord::from_state(&qstate::mix(&base, &noise, epsilon)?, None, tag)
        }
        PerturbationKind::WernerFig5 => {
            let spec = FamilySpec::Werner {
                p: rng.random_range(0.0..=1.0),
                fiducial: Bell::PsiMinus,
            };
            let base = families::make_state(&spec)?.pair()?;
            let noise = qstate::haar_random_pure(&[2, 2, 4], rng)?.reduce(&[0, 1])?;
            MeasureRecord::from_state(&qstate::mix(&base, &noise, epsilon)?, None, tag)
        }
        PerturbationKind::Mems1Fig8 => {
            let spec = FamilySpec::Mems1Purification {
                c: rng.random_range(0.0..=1.0),
            };
            let State::Pure(psi) = families::make_state(&spec)? else {
                unreachable!("the MEMS-I purification is pure")
            };
            let noise = qstate::haar_random_pure(&[2, 2, 2], rng)?;
            MeasureRecord::from_three_qubit(&qstate::perturb_pure(&psi, &noise, epsilon)?, tag)
        }
    }
}

/// Runs one perturbation experiment; the base-family parameter is drawn
/// uniformly from its domain for every sample.
pub fn perturbation_campaign(
    kind: PerturbationKind,
    epsilon: f64,
    config: &CampaignConfig,
) -> Result<Vec<MeasureRecord>> {
    if !(epsilon >= 0.0) || !epsilon.is_finite() {
        return Err(Error::Domain(format!("epsilon must be finite and >= 0, got {epsilon}")));
    }
    run_indexed(config, |_, rng| perturbed_sample(kind, epsilon, rng))
}

fn random_qubit_state(rng: &mut ChaCha8Rng) -> Result<ComplexMatrix> {
    // Reduction of a Haar two-qubit state: a random mixed qubit state.
    Ok(qstate::haar_random_pure(&[2, 2], rng)?.reduce(&[0])?.into_matrix())
}

/// Separable two-qubit states of four kinds, cycling with the sample index:
/// mixtures of one to three product states, classical-quantum states,
/// separable Werner states (p ≤ 1/3) and separable Bell-diagonal states
/// (all weights ≤ 1/2).
pub fn separable_samples(config: &CampaignConfig) -> Result<Vec<MeasureRecord>> {
    run_indexed(config, |i, rng| {
        let (rho, tag) = match i % 4 {
            0 => {
                let terms = rng.random_range(1..=3usize);
                let mut m = ComplexMatrix::zeros(4, 4);
                let mut weights: Vec<f64> = (0..terms).map(|_| rng.random_range(0.0..1.0)).collect();
                let total: f64 = weights.iter().sum::<f64>().max(f64::MIN_POSITIVE);
                weights.iter_mut().for_each(|w| *w /= total);
                for w in weights {
                    let a = random_qubit_state(rng)?;
                    let b = random_qubit_state(rng)?;
                    m = &m + &crate::matkernel::kron(&a, &b).scale(w);
                }
                (DensityMatrix::new(&[2, 2], m)?, "product_mixture")
            }
            1 => {
                let spec = FamilySpec::random("cq_state", rng)?;
                (families::make_state(&spec)?.pair()?, "cq_state")
            }
            2 => {
                let spec = FamilySpec::Werner {
                    p: rng.random_range(0.0..=1.0 / 3.0),
                    fiducial: Bell::PhiPlus,
                };
                (families::make_state(&spec)?.pair()?, "werner_separable")
            }
            _ => {
                let p = loop {
                    let FamilySpec::BellDiagonal { p } = FamilySpec::random("bell_diagonal", rng)? else {
                        unreachable!()
                    };
                    if p.iter().all(|&x| x <= 0.5) {
                        break p;
                    }
                };
                (
                    families::make_state(&FamilySpec::BellDiagonal { p })?.pair()?,
                    "bell_diagonal_separable",
                )
            }
        };
        MeasureRecord::from_state(&rho, None, tag)
    })
}

/// Regions of the measure planes that sampled records are checked against.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Region {
    /// 0 ≤ R ≤ 1.
    Prop1,
    /// C ≤ R ≤ √C (rank ≤ 2).
    Prop2,
    /// R ≥ C.
    Prop3,
    /// Rank-3 R–C region bounded by ansatz-I.
    CrRank3,
    /// C ≤ R ≤ ((2C+1)/3)^{3/4}.
    CrRank4,
    /// C ≥ R²; expected to fail for rank 3 and 4.
    CrRank2Lower,
    /// √((1−R)² + R²) − (1−R) ≤ N ≤ R.
    NrRank2,
    /// Lower half of `NrRank2`; expected to fail for rank 3 and 4.
    NrRank2Lower,
    /// Rank-3 R–N region bounded by ansatz-II.
    NrRank3,
    /// N ≤ R ≤ ((2N+1)/3)^{3/4}.
    NrRank4,
    /// R⁴ = C²(C² + τ).
    TauIdentity,
    /// τ ≤ 1 − C².
    M3tsMax,
    /// R ≤ (1/3)^{3/4}.
    Separable,
    /// √((1−C)² + C²) − (1−C) ≤ N ≤ C, so N = 0 exactly when C = 0.
    CnBounds,
}

impl Region {
    pub const ALL: [Region; 14] = [
        Region::Prop1,
        Region::Prop2,
        Region::Prop3,
        Region::CrRank3,
        Region::CrRank4,
        Region::CrRank2Lower,
        Region::NrRank2,
        Region::NrRank2Lower,
        Region::NrRank3,
        Region::NrRank4,
        Region::TauIdentity,
        Region::M3tsMax,
        Region::Separable,
        Region::CnBounds,
    ];

    pub fn tag(self) -> &'static str {
        match self {
            Region::Prop1 => "prop1",
            Region::Prop2 => "prop2",
            Region::Prop3 => "prop3",
            Region::CrRank3 => "cr_rank3",
            Region::CrRank4 => "cr_rank4",
            Region::CrRank2Lower => "cr_rank2_lower",
            Region::NrRank2 => "nr_rank2",
            Region::NrRank2Lower => "nr_rank2_lower",
            Region::NrRank3 => "nr_rank3",
            Region::NrRank4 => "nr_rank4",
            Region::TauIdentity => "tau_identity",
            Region::M3tsMax => "m3ts_max",
            Region::Separable => "separable",
            Region::CnBounds => "cn_bounds",
        }
    }

    pub fn parse(tag: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|r| r.tag() == tag)
            .ok_or_else(|| Error::UnknownTag {
                kind: "region",
                tag: tag.to_string(),
            })
    }

    pub fn tolerance(self) -> f64 {
        match self {
            Region::TauIdentity | Region::M3tsMax => TAU_TOL,
            _ => REGION_TOL,
        }
    }

    /// False for the rank-2 bounds that rank-3/4 samples are known to cross.
    pub fn must_hold(self) -> bool {
        !matches!(self, Region::CrRank2Lower | Region::NrRank2Lower)
    }

    /// Distance outside the region; ≤ 0 means inside.
    pub fn margin(self, index: usize, rec: &MeasureRecord) -> Result<f64> {
        let (c, n, r) = (rec.c12, rec.n12, rec.r12);
        let tol = self.tolerance();
        let sep = measures::separable_r12_max();
        let rank3_upper = |x: f64, h: fn(f64) -> f64| if x > tol { h(x) } else { sep };
        let werner_upper = |x: f64| ((2.0 * x + 1.0) / 3.0).powf(0.75);
        let mems1_lower = |x: f64| ((1.0 - x).powi(2) + x * x).sqrt() - (1.0 - x);
        Ok(match self {
            Region::Prop1 => (-r).max(r - 1.0),
            Region::Prop2 => (c - r).max(r - c.sqrt()),
            Region::Prop3 => c - r,
            Region::CrRank3 => {
                let lower = if c > tol { c - r } else { f64::NEG_INFINITY };
                lower.max(r - rank3_upper(c, |x| x.powf(0.25) * ((1.0 + x) / 2.0).sqrt()))
            }
            Region::CrRank4 => (c - r).max(r - werner_upper(c)),
            Region::CrRank2Lower => r * r - c,
            Region::NrRank2 => (mems1_lower(r) - n).max(n - r),
            Region::NrRank2Lower => mems1_lower(r) - n,
            Region::NrRank3 => {
                let lower = if n > tol { n - r } else { f64::NEG_INFINITY };
                lower.max(r - rank3_upper(n, |x| x.powf(0.25) * ((2.0 + x) / 3.0).powf(0.75)))
            }
            Region::NrRank4 => (n - r).max(r - werner_upper(n)),
            Region::TauIdentity | Region::M3tsMax => {
                let tau = rec.tau.ok_or(Error::MissingField {
                    index,
                    field: "tau",
                    region: self.tag(),
                })?;
                if self == Region::TauIdentity {
                    (r.powi(4) - c * c * (c * c + tau)).abs()
                } else {
                    tau - (1.0 - c * c)
                }
            }
            Region::Separable => r - sep,
            Region::CnBounds => (mems1_lower(c) - n).max(n - c),
        })
    }
}

/// Outcome of checking records against a region.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ViolationReport {
    pub region: Region,
    pub tolerance: f64,
    pub total: usize,
    pub violations: usize,
    /// Largest margin over all records; ≤ tolerance exactly when there are no violations.
    pub worst_margin: f64,
    /// The first few offending records with their positions.
    pub offending: Vec<(usize, MeasureRecord)>,
}

impl ViolationReport {
    /// True when the outcome matches what the region is expected to show.
    pub fn as_expected(&self) -> bool {
        if self.region.must_hold() {
            self.violations == 0
        } else {
            self.violations > 0
        }
    }
}

pub fn verify(records: &[MeasureRecord], region: Region) -> Result<ViolationReport> {
    let tol = region.tolerance();
    let mut report = ViolationReport {
        region,
        tolerance: tol,
        total: records.len(),
        violations: 0,
        worst_margin: f64::NEG_INFINITY,
        offending: Vec::new(),
    };
    for (i, rec) in records.iter().enumerate() {
        let m = region.margin(i, rec)?;
        report.worst_margin = report.worst_margin.max(m);
        if !(m <= tol) {
            report.violations += 1;
            if report.offending.len() < MAX_OFFENDING {
                report.offending.push((i, rec.clone()));
            }
        }
    }
    Ok(report)
}

/// Header of record CSV files.
pub const CSV_HEADER: [&str; 7] = ["index", "rank", "c12", "n12", "r12", "tau", "family"];

fn fmt_float(x: f64) -> String {
    format!("{x:.16e}")
}

/// Writes records as CSV with 17 significant digits; τ is left empty when absent.
pub fn write_records_csv<W: Write>(out: W, records: &[MeasureRecord]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER)?;
    for (i, r) in records.iter().enumerate() {
        w.write_record([
            i.to_string(),
            r.rank.to_string(),
            fmt_float(r.c12),
            fmt_float(r.n12),
            fmt_float(r.r12),
            r.tau.map(fmt_float).unwrap_or_default(),
            r.family.clone(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Deserialize)]
struct CsvRow {
    #[allow(dead_code)]
    index: usize,
    rank: usize,
    c12: f64,
    n12: f64,
    r12: f64,
    tau: Option<f64>,
    family: String,
}

pub fn read_records_csv<R: Read>(input: R) -> Result<Vec<MeasureRecord>> {
    let mut reader = csv::Reader::from_reader(input);
    let header: Vec<String> = reader.headers()?.iter().map(str::to_string).collect();
    if header != CSV_HEADER {
        return Err(Error::Contract(format!(
            "expected CSV header {}, got {}",
            CSV_HEADER.join(","),
            header.join(",")
        )));
    }
    reader
        .deserialize::<CsvRow>()
        .map(|row| {
            let row = row?;
            Ok(MeasureRecord {
                rank: row.rank,
                c12: row.c12,
                n12: row.n12,
                r12: row.r12,
                tau: row.tau,
                family: row.family,
            })
        })
        .collect()
}

pub fn write_records_json<W: Write>(out: W, records: &[MeasureRecord]) -> Result<()> {
    serde_json::to_writer_pretty(out, records)?;
    Ok(())
}

pub fn read_records_json<R: Read>(input: R) -> Result<Vec<MeasureRecord>> {
    Ok(serde_json::from_reader(input)?)
}

/// Writes (x, y) pairs with the given column names.
pub fn write_curve_csv<W: Write>(out: W, columns: [&str; 2], points: &[(f64, f64)]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(columns)?;
    for &(x, y) in points {
        w.write_record([fmt_float(x), fmt_float(y)])?;
    }
    w.flush()?;
    Ok(())
}

/// Options for [`figure_dataset`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FigureConfig {
    /// `None` uses the sample count from the figure caption.
    pub n: Option<usize>,
    pub seed: u64,
    pub epsilon: f64,
    pub threads: Option<usize>,
    pub points: usize,
}

impl Default for FigureConfig {
    fn default() -> Self {
        Self {
            n: None,
            seed: 20_240_917,
            epsilon: 0.51,
            threads: None,
            points: CURVE_POINTS,
        }
    }
}

/// One analytic curve written for a figure.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CurveFile {
    pub tag: String,
    pub columns: [String; 2],
    pub file: String,
}

/// Metadata written to `fig<k>_meta.json`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FigureSummary {
    pub figure: u8,
    pub description: String,
    pub n: Option<usize>,
    pub seed: u64,
    pub epsilon: Option<f64>,
    /// How the base-family parameter of a perturbation experiment is drawn.
    pub base_parameter: Option<String>,
    pub scatter: Option<String>,
    pub curves: Vec<CurveFile>,
    pub regions: Vec<RegionSummary>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegionSummary {
    pub region: Region,
    pub subset: Option<String>,
    pub total: usize,
    pub violations: usize,
    pub worst_margin: f64,
    pub must_hold: bool,
    pub as_expected: bool,
}

impl FigureSummary {
    /// True when every region check behaved as expected.
    pub fn all_as_expected(&self) -> bool {
        self.regions.iter().all(|r| r.as_expected)
    }
}

struct FigurePlan {
    description: &'static str,
    default_n: usize,
    curves: &'static [Curve],
    m3ts_tau_curve: bool,
    checks: &'static [(Region, Option<&'static str>)],
}

fn plan(fig: u8) -> Result<FigurePlan> {
    use Curve::*;
    use Region as G;
    let p = |description, default_n, curves, checks| FigurePlan {
        description,
        default_n,
        curves,
        m3ts_tau_curve: false,
        checks,
    };
    Ok(match fig {
        1 => p(
            "R12 vs C12, Haar (2,2,2)",
            10_000,
            &[CrRank2Upper, CrRank2Lower],
            &[(G::Prop2, None), (G::Prop1, None)],
        ),
        2 => FigurePlan {
            m3ts_tau_curve: true,
            ..p(
                "tau vs C12, Haar (2,2,2)",
                10_000,
                &[],
                &[(G::M3tsMax, None), (G::TauIdentity, None)],
            )
        },
        3 => p(
            "R12 vs C12, Haar (2,2,3) and (2,2,4)",
            10_000,
            &[CrRank2Upper, CrRank2Lower, CrRank3, CrRank4],
            &[
                (G::CrRank3, Some("haar_223")),
                (G::CrRank4, Some("haar_224")),
                (G::CrRank2Lower, Some("haar_224")),
            ],
        ),
        4 => p(
            "R12 vs C12, perturbed ansatz-I",
            20_000,
            &[CrRank3],
            &[(G::CrRank3, None)],
        ),
        5 => p(
            "R12 vs C12, perturbed Werner",
            20_000,
            &[CrRank4],
            &[(G::CrRank4, None)],
        ),
        6 => p(
            "R12 vs C12 boundary curves",
            0,
            &[CrRank2Upper, CrRank2Lower, CrRank3, CrRank4],
            &[],
        ),
        7 => p(
            "R12 vs N12, Haar (2,2,2)",
            20_000,
            &[NrRank2Upper, NrRank2Lower],
            &[(G::NrRank2, None)],
        ),
        8 => p(
            "R12 vs N12, perturbed MEMS-I purification",
            10_000,
            &[NrRank2Upper, NrRank2Lower],
            &[(G::NrRank2, None)],
        ),
        9 => p(
            "R12 vs N12, Haar (2,2,3)",
            20_000,
            &[NrRank2Upper, NrRank2Lower, NrRank3],
            &[(G::NrRank3, None), (G::NrRank2Lower, None)],
        ),
        10 => p(
            "R12 vs N12, Haar (2,2,4)",
            20_000,
            &[NrRank2Upper, NrRank2Lower, NrRank4],
            &[(G::NrRank4, None), (G::NrRank2Lower, None)],
        ),
        11 => p(
            "R12 vs N12 boundary curves",
            0,
            &[NrRank2Upper, NrRank2Lower, NrRank3, NrRank4],
            &[],
        ),
        other => {
            return Err(Error::UnknownTag {
                kind: "figure",
                tag: other.to_string(),
            })
        }
    })
}

fn figure_records(fig: u8, config: &CampaignConfig, epsilon: f64) -> Result<Vec<MeasureRecord>> {
    Ok(match fig {
        1 | 2 | 7 => scatter(&[2, 2, 2], config)?,
        3 => {
            let mut recs = scatter(&[2, 2, 3], config)?;
            recs.extend(scatter(&[2, 2, 4], config)?);
            recs
        }
        4 => perturbation_campaign(PerturbationKind::Ansatz1Fig4, epsilon, config)?,
        5 => perturbation_campaign(PerturbationKind::WernerFig5, epsilon, config)?,
        8 => perturbation_campaign(PerturbationKind::Mems1Fig8, epsilon, config)?,
        9 => scatter(&[2, 2, 3], config)?,
        10 => scatter(&[2, 2, 4], config)?,
        _ => Vec::new(),
    })
}

/// (C₁₂, τ) of M3TS states on a grid of C₁₂, evaluated numerically.
pub fn m3ts_tau_sweep(points: usize) -> Result<Vec<(f64, f64)>> {
    families::linspace(0.0, 1.0, points)
        .into_iter()
        .map(|c12| {
            let State::Pure(psi) = families::make_state(&FamilySpec::M3ts { c12 })? else {
                unreachable!("M3TS are pure")
            };
            let rec = MeasureRecord::from_three_qubit(&psi, "m3ts")?;
            Ok((rec.c12, rec.tau.unwrap_or_default()))
        })
        .collect()
}

/// Writes the scatter, curves and metadata of figure `fig` into `out`.
pub fn figure_dataset(fig: u8, config: &FigureConfig, out: &Path) -> Result<FigureSummary> {
    let plan = plan(fig)?;
    fs::create_dir_all(out)?;
    let has_scatter = plan.default_n > 0;
    let n = config.n.unwrap_or(plan.default_n);
    let campaign = CampaignConfig {
        n,
        seed: config.seed,
        threads: config.threads,
    };
    let records = if has_scatter {
        figure_records(fig, &campaign, config.epsilon)?
    } else {
        Vec::new()
    };

    let file_in = |name: String| -> (String, PathBuf) {
        let path = out.join(&name);
        (name, path)
    };

    let mut scatter_name = None;
    if has_scatter {
        let (name, path) = file_in(format!("fig{fig}_scatter.csv"));
        write_records_csv(fs::File::create(path)?, &records)?;
        scatter_name = Some(name);
    }

    let mut curves = Vec::new();
    for &curve in plan.curves {
        let grid = families::linspace(0.0, 1.0, config.points);
        let points = families::boundary_curve(curve, &grid)?;
        let columns = ["r12", if curve.is_negativity() { "n12" } else { "c12" }];
        let (name, path) = file_in(format!("fig{fig}_curve_{}.csv", curve.tag()));
        write_curve_csv(fs::File::create(path)?, columns, &points)?;
        curves.push(CurveFile {
            tag: curve.tag().to_string(),
            columns: columns.map(String::from),
            file: name,
        });
    }
    if plan.m3ts_tau_curve {
        let points = m3ts_tau_sweep(config.points)?;
        let (name, path) = file_in(format!("fig{fig}_curve_m3ts_tau.csv"));
        write_curve_csv(fs::File::create(path)?, ["c12", "tau"], &points)?;
        curves.push(CurveFile {
            tag: "m3ts_tau".to_string(),
            columns: ["c12".to_string(), "tau".to_string()],
            file: name,
        });
    }

    let mut regions = Vec::new();
    for &(region, subset) in plan.checks {
        let selected: Vec<MeasureRecord> = records
            .iter()
            .filter(|r| subset.map_or(true, |s| r.family == s))
            .cloned()
            .collect();
        let report = verify(&selected, region)?;
        regions.push(RegionSummary {
            region,
            subset: subset.map(String::from),
            total: report.total,
            violations: report.violations,
            worst_margin: report.worst_margin,
            must_hold: region.must_hold(),
            as_expected: report.as_expected(),
        });
    }

    let perturbation = matches!(fig, 4 | 5 | 8);
    let summary = FigureSummary {
        figure: fig,
        description: plan.description.to_string(),
        n: has_scatter.then_some(n),
        seed: config.seed,
        epsilon: perturbation.then_some(config.epsilon),
        base_parameter: perturbation.then(|| {
            match fig {
                4 => "ansatz-I p uniform in [0, 1]",
                5 => "Werner p uniform in [0, 1], psi_minus fiducial",
                _ => "MEMS-I C12 uniform in [0, 1]",
            }
            .to_string()
        }),
        scatter: scatter_name,
        curves,
        regions,
    };
    let (_, meta) = file_in(format!("fig{fig}_meta.json"));
    let mut f = fs::File::create(meta)?;
    serde_json::to_writer_pretty(&mut f, &summary)?;
    f.write_all(b"\n")?;
    Ok(summary)
}
