//! Configuration ingestion, the analyze / predict / verify / sweep
//! pipelines, prefactor extrapolation, and machine-readable reports.

mod config;

pub use config::{
    GridConfig, OperatorConfig, OutputConfig, PotentialConfig, RunConfig, Tolerances,
    SCHEMA_VERSION,
};

use std::path::Path;

use serde::Serialize;
use thiserror::Error;

use crate::operator::{
    build_random_walk_matrix, build_witten_matrix, count_small_spectrum,
    default_window_constant, smallest_eigenvalues, DiscreteOperator, OperatorError,
    OperatorKind,
};
use crate::potential::{
    find_critical_points, validate_hypotheses, Domain, Potential, PotentialError,
    ValidationReport,
};
use crate::spectral::{predict_spectrum, PredictedSpectrum, SpectralError, SpectralGroup};
use crate::topology::{build_landscape, Filtration, LabeledLandscape, TopologyError, TopologyParams};

#[derive(Debug, Error)]
pub enum ReportError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("hypothesis validation failed: {}", violations.join("; "))]
    Validation { violations: Vec<String> },
    #[error("resolution failure: {0}")]
    Resolution(String),
    #[error("spectral window count mismatch: expected {expected}, found {found} ({detail})")]
    CountMismatch {
        expected: usize,
        found: usize,
        detail: String,
    },
    #[error("{0}")]
    Upstream(String),
}

impl ReportError {
    /// Process exit code: 2 hypothesis failure, 3 resolution failure,
    /// 4 count mismatch, 1 anything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            ReportError::Validation { .. } => 2,
            ReportError::Resolution(_) => 3,
            ReportError::CountMismatch { .. } => 4,
            _ => 1,
        }
    }
}

impl From<PotentialError> for ReportError {
    fn from(e: PotentialError) -> Self {
        match e {
            PotentialError::MorseViolation { .. } => ReportError::Validation {
                violations: vec![e.to_string()],
            },
            PotentialError::Syntax { .. }
            | PotentialError::UnknownIdentifier { .. }
            | PotentialError::DimensionMismatch { .. }
            | PotentialError::InvalidDimension(_)
            | PotentialError::InvalidDomain(_) => ReportError::Config(e.to_string()),
            other => ReportError::Upstream(other.to_string()),
        }
    }
}

impl From<TopologyError> for ReportError {
    fn from(e: TopologyError) -> Self {
        match e {
            TopologyError::Resolution(_)
            | TopologyError::MemoryBound { .. }
            | TopologyError::NoSeparatingSaddles
            | TopologyError::Bijectivity(_) => ReportError::Resolution(e.to_string()),
            other => ReportError::Upstream(other.to_string()),
        }
    }
}

impl From<OperatorError> for ReportError {
    fn from(e: OperatorError) -> Self {
        match e {
            OperatorError::BallUnderResolved { .. }
            | OperatorError::IntegerBallRadius { .. }
            | OperatorError::Overflow { .. }
            | OperatorError::NonConvergence { .. } => ReportError::Resolution(e.to_string()),
            other => ReportError::Upstream(other.to_string()),
        }
    }
}

impl From<SpectralError> for ReportError {
    fn from(e: SpectralError) -> Self {
        ReportError::Upstream(e.to_string())
    }
}

/// Everything the landscape half of the pipeline produces; reused across
/// the h-values of a sweep.
pub struct AnalysisArtifacts {
    pub potential: Potential,
    pub validation: ValidationReport,
    pub landscape: LabeledLandscape,
}

pub fn analyze_pipeline(cfg: &RunConfig) -> Result<AnalysisArtifacts, ReportError> {
    let dim = cfg.potential.dimension;
    let domain = Domain::new(cfg.potential.domain.clone())?;
    let potential = Potential::parse(&cfg.potential.expression, dim, domain)?;
    let (points, _) = find_critical_points(
        &potential,
        cfg.tolerances.seeds_per_axis,
        cfg.tolerances.tol_grad_rel,
    )?;
    let validation = validate_hypotheses(&potential, &points, None)?;
    if !validation.passed {
        return Err(ReportError::Validation {
            violations: validation.violations.clone(),
        });
    }
    let filtration = Filtration::build(&potential, cfg.grid.topology_nodes(dim), None)?;
    let landscape = build_landscape(&potential, &filtration, &points, &TopologyParams::default())?;
    Ok(AnalysisArtifacts {
        potential,
        validation,
        landscape,
    })
}

// ---------------------------------------------------------------------
// analyze

#[derive(Clone, Debug, Serialize)]
pub struct AnalyzeReport {
    pub schema_version: u32,
    pub potential: PotentialConfig,
    pub n0: usize,
    pub validation: ValidationSummary,
    pub critical_points: Vec<CriticalPointReport>,
    /// Finite separating-saddle values, descending (the top level of the
    /// hierarchy is unbounded and omitted).
    pub levels: Vec<f64>,
    pub minima: Vec<MinimumReport>,
    pub classes: Vec<ClassReport>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ValidationSummary {
    pub passed: bool,
    pub violations: Vec<String>,
    pub boundary_min: f64,
    pub max_critical_value: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct CriticalPointReport {
    pub location: Vec<f64>,
    pub value: f64,
    pub index: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct MinimumReport {
    pub level: usize,
    pub j: usize,
    pub location: Vec<f64>,
    pub value: f64,
    /// `None` for the global label (its saddle value is unbounded).
    pub sigma: Option<f64>,
    pub s: Option<f64>,
    /// `(level, j)` of the hat; `None` for the global label.
    pub hat: Option<(usize, usize)>,
    pub type_ii: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct ClassReport {
    pub level: usize,
    pub sigma: f64,
    pub hat: (usize, usize),
    pub members: Vec<(usize, usize)>,
    pub s_values: Vec<f64>,
    /// Per entry of members-then-hat: the adjacent saddle locations.
    pub saddles: Vec<Vec<Vec<f64>>>,
}

pub fn run_analyze(cfg: &RunConfig) -> Result<AnalyzeReport, ReportError> {
    let art = analyze_pipeline(cfg)?;
    let land = &art.landscape;
    let label = |id: usize| (land.minima[id].level, land.minima[id].j_index);
    Ok(AnalyzeReport {
        schema_version: SCHEMA_VERSION,
        potential: cfg.potential.clone(),
        n0: land.n0(),
        validation: ValidationSummary {
            passed: art.validation.passed,
            violations: art.validation.violations.clone(),
            boundary_min: art.validation.boundary_min,
            max_critical_value: art.validation.max_critical_value,
        },
        critical_points: land
            .critical_points
            .iter()
            .map(|p| CriticalPointReport {
                location: p.location.clone(),
                value: p.value,
                index: p.index,
            })
            .collect(),
        levels: land.levels[1..].to_vec(),
        minima: land
            .minima
            .iter()
            .map(|m| MinimumReport {
                level: m.level,
                j: m.j_index,
                location: m.location.clone(),
                value: m.value,
                sigma: m.sigma.is_finite().then_some(m.sigma),
                s: m.s_value.is_finite().then_some(m.s_value),
                hat: m.hat.map(label),
                type_ii: m.type_ii,
            })
            .collect(),
        classes: land
            .classes
            .iter()
            .map(|c| ClassReport {
                level: c.level,
                sigma: c.sigma,
                hat: label(c.hat),
                members: c.members.iter().map(|&id| label(id)).collect(),
                s_values: c.members.iter().map(|&id| land.minima[id].s_value).collect(),
                saddles: c
                    .j_sets
                    .iter()
                    .map(|js| {
                        js.iter()
                            .map(|&si| land.saddles[si].point.location.clone())
                            .collect()
                    })
                    .collect(),
            })
            .collect(),
    })
}

// ---------------------------------------------------------------------
// predict

#[derive(Clone, Debug, Serialize)]
pub struct PredictReport {
    pub schema_version: u32,
    pub h: f64,
    pub rho: f64,
    pub groups: Vec<PredictGroup>,
    /// All predicted eigenvalues including the exact zero, ascending.
    pub eigenvalues: Vec<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct PredictGroup {
    pub s_hat: f64,
    pub scale: f64,
    pub prefactors: Vec<f64>,
    pub eigenvalues: Vec<f64>,
}

pub fn run_predict(cfg: &RunConfig, h: f64, rho: f64) -> Result<PredictReport, ReportError> {
    let art = analyze_pipeline(cfg)?;
    let pred = predict_spectrum(&art.landscape, rho, h)?;
    Ok(predict_report(&pred))
}

fn predict_report(pred: &PredictedSpectrum) -> PredictReport {
    PredictReport {
        schema_version: SCHEMA_VERSION,
        h: pred.h,
        rho: pred.rho,
        groups: pred
            .groups
            .iter()
            .map(|g| PredictGroup {
                s_hat: g.s_hat,
                scale: g.scale,
                prefactors: g.prefactors.clone(),
                eigenvalues: g.eigenvalues.clone(),
            })
            .collect(),
        eigenvalues: pred.all_eigenvalues(),
    }
}

// ---------------------------------------------------------------------
// verify

/// One predicted-vs-computed eigenvalue comparison; field order is the
/// CSV column order.
#[derive(Clone, Debug, Serialize)]
pub struct VerificationRow {
    pub h: f64,
    /// Barrier level `S` of the group.
    pub level: f64,
    pub predicted: f64,
    pub computed: f64,
    /// `computed / (h exp(-2 level / h))`.
    pub ratio: f64,
    /// Predicted prefactor of this eigenvalue.
    pub prefactor: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct VerifyReport {
    pub schema_version: u32,
    pub kind: OperatorKind,
    pub h: f64,
    pub rho: f64,
    pub nodes: usize,
    pub delta: f64,
    pub window_c: f64,
    pub window_count: usize,
    pub window_ambiguous: bool,
    /// `lambda_{n0+1} / lambda_{n0}`, the audit of the spectral gap.
    pub gap_ratio: Option<f64>,
    pub computed: Vec<f64>,
    pub max_residual: f64,
    pub rows: Vec<VerificationRow>,
}

/// The largest admissible barrier at this `h`: beyond `2 S / h = 30` the
/// scale `exp(-2S/h)` sinks under the double-precision floor.
pub const MAX_BARRIER_OVER_H: f64 = 30.0;

pub fn run_verify(
    cfg: &RunConfig,
    kind: OperatorKind,
    h: f64,
    nodes_override: Option<usize>,
    window_c_override: Option<f64>,
) -> Result<VerifyReport, ReportError> {
    let art = analyze_pipeline(cfg)?;
    verify_with(&art, cfg, kind, h, nodes_override, window_c_override)
}

pub fn verify_with(
    art: &AnalysisArtifacts,
    cfg: &RunConfig,
    kind: OperatorKind,
    h: f64,
    nodes_override: Option<usize>,
    window_c_override: Option<f64>,
) -> Result<VerifyReport, ReportError> {
    let land = &art.landscape;
    let dim = art.potential.dimension();
    let rho = kind.rho(dim);
    let s_max = land
        .minima
        .iter()
        .filter(|m| m.s_value.is_finite())
        .map(|m| m.s_value)
        .fold(0.0f64, f64::max);
    if 2.0 * s_max / h > MAX_BARRIER_OVER_H {
        return Err(ReportError::Resolution(format!(
            "2 S_max / h = {:.1} > {MAX_BARRIER_OVER_H}: the deepest eigenvalue scale underflows; increase h",
            2.0 * s_max / h
        )));
    }

    let pred = predict_spectrum(land, rho, h)?;
    let nodes = nodes_override.unwrap_or_else(|| cfg.grid.operator_nodes(dim));
    let op = build_operator(&art.potential, kind, nodes, h)?;
    let n0 = land.n0();
    let k = (n0 + 1).min(12).min(op.matrix.n);
    let spec = smallest_eigenvalues(&op, k, cfg.tolerances.eigensolver_tol)?;

    let window_c = window_c_override
        .or(cfg.operator.as_ref().and_then(|o| o.window_c))
        .unwrap_or_else(|| default_window_constant(land, rho));
    let wc = count_small_spectrum(&spec, window_c, h);
    if wc.count != n0 {
        return Err(ReportError::CountMismatch {
            expected: n0,
            found: wc.count,
            detail: format!("window [0, {:.3e}] at h = {h}", window_c * h),
        });
    }

    let gap_ratio = (spec.eigenvalues.len() > n0 && spec.eigenvalues[n0 - 1] > 0.0)
        .then(|| spec.eigenvalues[n0] / spec.eigenvalues[n0 - 1]);

    // computed nonzero eigenvalues, ascending; the smallest is the exact
    // zero mode and is excluded from the comparison
    let computed_nonzero = &spec.eigenvalues[1..n0];

    // pair computed with predicted in ascending order; when prefactors
    // invert the raw scale order of close levels this still matches each
    // computed eigenvalue with the prediction it tracks
    let mut predicted: Vec<(f64, &SpectralGroup, usize)> = Vec::new();
    for group in &pred.groups {
        for (i, &e) in group.eigenvalues.iter().enumerate() {
            predicted.push((e, group, i));
        }
    }
    predicted.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    if predicted.len() != computed_nonzero.len() {
        return Err(ReportError::CountMismatch {
            expected: predicted.len(),
            found: computed_nonzero.len(),
            detail: "predicted nonzero eigenvalues vs computed window".into(),
        });
    }
    let mut rows = Vec::new();
    for (&lam, &(e, group, i)) in computed_nonzero.iter().zip(&predicted) {
        rows.push(VerificationRow {
            h,
            level: group.s_hat,
            predicted: e,
            computed: lam,
            ratio: lam / group.scale,
            prefactor: group.prefactors[i],
        });
    }
    rows.sort_by(|a, b| {
        (a.level, a.predicted)
            .partial_cmp(&(b.level, b.predicted))
            .unwrap()
    });

    Ok(VerifyReport {
        schema_version: SCHEMA_VERSION,
        kind,
        h,
        rho,
        nodes,
        delta: op.delta,
        window_c,
        window_count: wc.count,
        window_ambiguous: wc.ambiguous,
        gap_ratio,
        computed: spec.eigenvalues.clone(),
        max_residual: spec.residuals.iter().copied().fold(0.0, f64::max),
        rows,
    })
}

pub fn build_operator(
    potential: &Potential,
    kind: OperatorKind,
    nodes: usize,
    h: f64,
) -> Result<DiscreteOperator, ReportError> {
    let op = match kind {
        OperatorKind::RandomWalk => build_random_walk_matrix(potential, nodes, h)?,
        OperatorKind::Witten => build_witten_matrix(potential, nodes, h)?,
    };
    Ok(op)
}

// ---------------------------------------------------------------------
// sweep and fit

#[derive(Clone, Debug, Serialize)]
pub struct LevelFit {
    pub level: f64,
    /// Extrapolated prefactor at `h = 0`.
    pub c0: f64,
    /// First-order slope in `h`.
    pub c1: f64,
    pub residual: f64,
    pub points: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct SweepReport {
    pub schema_version: u32,
    pub kind: OperatorKind,
    pub rho: f64,
    pub h_list: Vec<f64>,
    pub rows: Vec<VerificationRow>,
    pub fits: Option<Vec<LevelFit>>,
}

/// Least-squares line `ratio = c0 + c1 h` through `(h, ratio)` points.
pub fn fit_prefactor(points: &[(f64, f64)]) -> Result<(f64, f64, f64), ReportError> {
    if points.len() < 3 {
        return Err(ReportError::Config(format!(
            "prefactor fit needs at least 3 points, got {}",
            points.len()
        )));
    }
    if points.iter().any(|&(h, r)| !h.is_finite() || !r.is_finite()) {
        return Err(ReportError::Config("non-finite point in prefactor fit".into()));
    }
    let n = points.len() as f64;
    let sh: f64 = points.iter().map(|p| p.0).sum();
    let sr: f64 = points.iter().map(|p| p.1).sum();
    let shh: f64 = points.iter().map(|p| p.0 * p.0).sum();
    let shr: f64 = points.iter().map(|p| p.0 * p.1).sum();
    let det = n * shh - sh * sh;
    if det.abs() < 1e-300 {
        return Err(ReportError::Config("degenerate h values in prefactor fit".into()));
    }
    let c0 = (sr * shh - sh * shr) / det;
    let c1 = (n * shr - sh * sr) / det;
    let residual = points
        .iter()
        .map(|&(h, r)| {
            let e = r - (c0 + c1 * h);
            e * e
        })
        .sum::<f64>()
        .sqrt();
    Ok((c0, c1, residual))
}

pub fn run_sweep(
    cfg: &RunConfig,
    kind: OperatorKind,
    h_list: &[f64],
    nodes_override: Option<usize>,
    window_c_override: Option<f64>,
    fit: bool,
) -> Result<SweepReport, ReportError> {
    if h_list.is_empty() {
        return Err(ReportError::Config("empty h list".into()));
    }
    if h_list.windows(2).any(|w| w[0] >= w[1]) {
        return Err(ReportError::Config("h list must be strictly increasing".into()));
    }
    let art = analyze_pipeline(cfg)?;
    let mut rows: Vec<VerificationRow> = Vec::new();
    let mut rho = 0.0;
    for &h in h_list {
        let rep = verify_with(&art, cfg, kind, h, nodes_override, window_c_override)?;
        rho = rep.rho;
        rows.extend(rep.rows);
    }

    let fits = if fit {
        // group rows by level; the landscape is shared so level values
        // repeat exactly across h
        let mut levels: Vec<f64> = Vec::new();
        for r in &rows {
            if !levels.iter().any(|&l| l == r.level) {
                levels.push(r.level);
            }
        }
        levels.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let mut fits = Vec::new();
        for level in levels {
            let pts: Vec<(f64, f64)> = rows
                .iter()
                .filter(|r| r.level == level)
                .map(|r| (r.h, r.ratio))
                .collect();
            let (c0, c1, residual) = fit_prefactor(&pts)?;
            fits.push(LevelFit {
                level,
                c0,
                c1,
                residual,
                points: pts.len(),
            });
        }
        Some(fits)
    } else {
        None
    };

    Ok(SweepReport {
        schema_version: SCHEMA_VERSION,
        kind,
        rho,
        h_list: h_list.to_vec(),
        rows,
        fits,
    })
}

// ---------------------------------------------------------------------
// emission

/// Canonical JSON serialization; identical inputs give identical bytes.
pub fn to_json_string<T: Serialize>(value: &T) -> Result<String, ReportError> {
    serde_json::to_string_pretty(value).map_err(|e| ReportError::Upstream(e.to_string()))
}

pub fn write_json<T: Serialize>(value: &T, path: &Path) -> Result<(), ReportError> {
    let mut s = to_json_string(value)?;
    s.push('\n');
    std::fs::write(path, s)?;
    Ok(())
}

/// CSV with the fixed header `h,level,predicted,computed,ratio,prefactor`.
pub fn write_rows_csv(rows: &[VerificationRow], path: &Path) -> Result<(), ReportError> {
    let mut w = csv::Writer::from_path(path).map_err(|e| ReportError::Upstream(e.to_string()))?;
    for row in rows {
        w.serialize(row)
            .map_err(|e| ReportError::Upstream(e.to_string()))?;
    }
    w.flush()?;
    Ok(())
}
