//! R-ladder campaigns: norms of `f_R`, `W_R`, `F_R`, `F̃_R` and the free flow,
//! the quotients built from them, and slope fits against the closed-form
//! exponents.

use magdirac_core::cutoff::{make_cutoffs, Cutoffs};
use magdirac_core::exponents::{exponents_f64, AdmissiblePair, ExponentReport};
use magdirac_core::fit::{fit_power_law, spread, strictly_increasing_tail, BoundKind, ScalingFit};
use magdirac_core::params::ConstructionParams;
use magdirac_core::quasimode::{InterpolatedMode, Quasimode};
use rayon::prelude::*;

use crate::cylinder::{check_padding, CylField, CylGrid, CylTransform, Sector};
use crate::error::{LabError, Result};
use crate::landau::EigenMode2D;
use crate::norms::{mixed_time_norm_from, profile_norm, DerivFlags, MixedNorm, WeightedProfile};

/// Refinement factor of the mode interpolant used by every campaign.
pub const MODE_REFINEMENT: usize = 4;

/// Edge/peak ratio tolerated for the free flow on its widened box.
pub const FREE_EDGE_TOL: f64 = 1e-3;

/// Cylinder box and resolution for one ladder row.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridPolicy {
    /// Box size over support size, radially and axially.
    pub pad: f64,
    pub n_rho: usize,
    pub n_z: usize,
}

impl Default for GridPolicy {
    fn default() -> Self {
        Self { pad: 2.0, n_rho: 256, n_z: 256 }
    }
}

impl GridPolicy {
    pub fn grid(&self, params: &ConstructionParams) -> Result<CylGrid> {
        CylGrid::for_support(params, self.pad, 0.0, self.n_rho, self.n_z)
    }

    /// The box of [`GridPolicy::grid`] widened by `margin` on every open side
    /// at (up to rounding) the same spacing.
    pub fn grid_with_margin(&self, params: &ConstructionParams, margin: f64) -> Result<CylGrid> {
        let base = self.grid(params)?;
        let len = base.z_hi - base.z_lo;
        let n_rho = round_even(self.n_rho as f64 * (base.rho_max + margin) / base.rho_max);
        let n_z = round_even(self.n_z as f64 * (len + 2.0 * margin) / len);
        CylGrid::for_support(params, self.pad, margin, n_rho, n_z)
    }

    /// Half the spacing in both directions.
    pub fn refined(&self) -> Self {
        Self { n_rho: 2 * self.n_rho, n_z: 2 * self.n_z, ..*self }
    }
}

fn round_even(x: f64) -> usize {
    2 * (x / 2.0).ceil() as usize
}

/// Optional, more expensive parts of a row.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct LadderOptions {
    /// `‖e^{itD} f_R‖_{L^p((0,R^β); L^q)}` and its quotient.
    pub free_control: bool,
    /// Dual mixed norm of each of the five `G_R` terms.
    pub term_diagnostics: bool,
}

/// The five `G_R` pieces, in the order of `GrTerms::as_array`.
pub const TERM_NAMES: [&str; 5] = ["transverse_dpsi", "transverse_dchi", "psi_r_prime", "radial_dpsi", "radial_dchi"];

/// One `R` of a ladder. Norms of an invalid row are NaN.
#[derive(Debug, Clone, PartialEq)]
pub struct LadderRow {
    pub r: f64,
    /// `‖f_R‖_{Ḣ^σ}`.
    pub norm_fr_hsigma: f64,
    pub norm_fr_l2: f64,
    pub norm_fr_h1: f64,
    /// `‖f_R‖_{L^q} = ‖W_R(0)‖_{L^q}`.
    pub norm_fr_lq: f64,
    /// `‖W_R‖_{L^p((0,R^β); L^q)}`.
    pub norm_wr_mixed: f64,
    /// `‖F_R‖_{L^{p'}((0,R^β); Ḣ^{2σ}_{q'})}`.
    pub norm_fsource_dual: f64,
    /// `‖F̃_R‖_{L^{p'}((0,R^β); Ḣ^{2σ}_{q'})}`.
    pub norm_ftilde_dual: f64,
    /// `‖Λ ψ_R ψ χ‖_{L^q}`.
    pub profile_lambda: f64,
    /// `‖W_R‖ / ‖f_R‖_{Ḣ^σ}`.
    pub quot_epo25: f64,
    /// `‖W_R‖ / ‖F_R‖_{dual}`.
    pub quot_epo26: f64,
    /// `‖W_R‖ / (‖f_R‖_{Ḣ^σ} + ‖F̃_R‖_{dual})`.
    pub quot_epo75: f64,
    pub free_mixed: Option<f64>,
    /// `quot_epo75` with the free flow in the numerator.
    pub quot_free: Option<f64>,
    pub terms: Option<[f64; 5]>,
    /// Largest Gauss–Legendre node count any mixed norm of the row needed.
    pub nodes: usize,
    pub valid: bool,
    pub error: Option<String>,
}

impl LadderRow {
    fn invalid(r: f64, err: &LabError) -> Self {
        let nan = f64::NAN;
        Self {
            r,
            norm_fr_hsigma: nan,
            norm_fr_l2: nan,
            norm_fr_h1: nan,
            norm_fr_lq: nan,
            norm_wr_mixed: nan,
            norm_fsource_dual: nan,
            norm_ftilde_dual: nan,
            profile_lambda: nan,
            quot_epo25: nan,
            quot_epo26: nan,
            quot_epo75: nan,
            free_mixed: None,
            quot_free: None,
            terms: None,
            nodes: 0,
            valid: false,
            error: Some(err.to_string()),
        }
    }
}

/// A quantity of a ladder that can be fitted against `R`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Column {
    FrHsigma,
    FrL2,
    FrH1,
    FrLq,
    WrMixed,
    FsourceDual,
    FtildeDual,
    ProfileLambda,
    Quot25,
    Quot26,
    Quot75,
    FreeMixed,
    QuotFree,
    Term(usize),
}

impl Column {
    pub fn name(&self) -> String {
        match self {
            Column::FrHsigma => "norm_fR_Hsigma".into(),
            Column::FrL2 => "norm_fR_L2".into(),
            Column::FrH1 => "norm_fR_H1".into(),
            Column::FrLq => "norm_fR_Lq".into(),
            Column::WrMixed => "norm_WR_mixed".into(),
            Column::FsourceDual => "norm_FR_dual".into(),
            Column::FtildeDual => "norm_FtildeR_dual".into(),
            Column::ProfileLambda => "profile_lambda".into(),
            Column::Quot25 => "quot_epo25".into(),
            Column::Quot26 => "quot_epo26".into(),
            Column::Quot75 => "quot_epo75".into(),
            Column::FreeMixed => "norm_free_mixed".into(),
            Column::QuotFree => "quot_free".into(),
            Column::Term(k) => format!("term_{}", TERM_NAMES.get(*k).copied().unwrap_or("unknown")),
        }
    }

    pub fn get(&self, row: &LadderRow) -> f64 {
        match self {
            Column::FrHsigma => row.norm_fr_hsigma,
            Column::FrL2 => row.norm_fr_l2,
            Column::FrH1 => row.norm_fr_h1,
            Column::FrLq => row.norm_fr_lq,
            Column::WrMixed => row.norm_wr_mixed,
            Column::FsourceDual => row.norm_fsource_dual,
            Column::FtildeDual => row.norm_ftilde_dual,
            Column::ProfileLambda => row.profile_lambda,
            Column::Quot25 => row.quot_epo25,
            Column::Quot26 => row.quot_epo26,
            Column::Quot75 => row.quot_epo75,
            Column::FreeMixed => row.free_mixed.unwrap_or(f64::NAN),
            Column::QuotFree => row.quot_free.unwrap_or(f64::NAN),
            Column::Term(k) => row.terms.and_then(|t| t.get(*k).copied()).unwrap_or(f64::NAN),
        }
    }
}

/// Halving-spacing comparison at one `R`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceCheck {
    pub r: f64,
    pub coarse: LadderRow,
    pub fine: LadderRow,
}

impl ConvergenceCheck {
    /// Largest relative change over the always-present columns.
    pub fn max_relative_change(&self) -> f64 {
        CORE_COLUMNS
            .iter()
            .map(|c| {
                let (a, b) = (c.get(&self.coarse), c.get(&self.fine));
                ((a - b) / b).abs()
            })
            .fold(0.0, f64::max)
    }
}

const CORE_COLUMNS: [Column; 8] = [
    Column::FrHsigma,
    Column::FrL2,
    Column::FrH1,
    Column::FrLq,
    Column::WrMixed,
    Column::FsourceDual,
    Column::FtildeDual,
    Column::Quot75,
];

#[derive(Debug, Clone)]
pub struct NormLadderReport {
    pub template: ConstructionParams,
    pub pair: AdmissiblePair<f64>,
    pub policy: GridPolicy,
    pub options: LadderOptions,
    pub exponents: ExponentReport<f64>,
    pub rows: Vec<LadderRow>,
    pub warnings: Vec<String>,
    pub convergence: Option<ConvergenceCheck>,
}

impl NormLadderReport {
    /// `(R, value)` over valid rows with a finite positive value.
    pub fn series(&self, column: Column) -> (Vec<f64>, Vec<f64>) {
        self.rows
            .iter()
            .filter(|r| r.valid)
            .map(|r| (r.r, column.get(r)))
            .filter(|(_, v)| v.is_finite() && *v > 0.0)
            .unzip()
    }

    pub fn valid_rows(&self) -> usize {
        self.rows.iter().filter(|r| r.valid).count()
    }
}

/// Shared read-only state of a campaign.
struct Context<'a> {
    mode: &'a EigenMode2D,
    profile: InterpolatedMode,
    sector: Sector,
    cutoffs: Cutoffs,
    pair: AdmissiblePair<f64>,
}

impl Context<'_> {
    fn row(&self, params: ConstructionParams, policy: &GridPolicy, options: LadderOptions) -> Result<LadderRow> {
        let qm = Quasimode::new(params, self.cutoffs, &self.profile);
        let (p, q) = (self.pair.p(), self.pair.q());
        let (pd, qd) = (self.pair.p_dual(), self.pair.q_dual());
        let sigma = self.pair.sigma();
        let horizon = params.horizon();
        let grid = policy.grid(&params)?;
        let tr = CylTransform::new(grid, self.sector);
        let sample =
            |f: &(dyn Fn([f64; 3]) -> magdirac_core::dirac::Spinor + Sync)| CylField::sample(grid, self.sector, f);

        let f = sample(&|x| qm.f_r(x));
        check_padding(&f)?;
        let hat = tr.forward(&f)?;
        let hs = tr.sobolev_l2_of(&hat, sigma)?;
        let l2 = f.lq_norm(2.0)?;
        let h1 = tr.sobolev_l2_of(&hat, 1.0)?;
        let lq = f.lq_norm(q)?;

        let mut nodes = 0;
        let mut track = |m: MixedNorm| {
            nodes = nodes.max(m.nodes);
            m.value
        };
        let w = track(mixed_time_norm_from(|t| sample(&|x| qm.w_r(t, x)).lq_norm(q), p, horizon, 2)?);
        let dual = |src: &(dyn Fn(f64, [f64; 3]) -> magdirac_core::dirac::Spinor + Sync)| {
            mixed_time_norm_from(|t| tr.sobolev_q(&sample(&|x| src(t, x)), 2.0 * sigma, qd), pd, horizon, 2)
        };
        let fsource = track(dual(&|t, x| qm.f_r_windowed(t, x))?);
        let ftilde = track(dual(&|t, x| qm.f_tilde(t, x))?);
        let terms = if options.term_diagnostics {
            let mut out = [0.0; 5];
            for (k, o) in out.iter_mut().enumerate() {
                *o = track(dual(&|t, x| {
                    if t > 0.0 && t < horizon {
                        qm.g_r_terms(t, x).as_array()[k]
                    } else {
                        magdirac_core::dirac::ZERO_SPINOR
                    }
                })?);
            }
            Some(out)
        } else {
            None
        };
        let free = if options.free_control {
            let wide = policy.grid_with_margin(&params, horizon)?;
            let trw = CylTransform::new(wide, self.sector);
            let hatw = trw.forward(&CylField::sample(wide, self.sector, |x| qm.f_r(x)))?;
            Some(track(mixed_time_norm_from(
                |t| {
                    let u = trw.inverse(&trw.free_flow(&hatw, t));
                    let ratio = u.edge_ratio();
                    if ratio > FREE_EDGE_TOL {
                        return Err(LabError::Padding { ratio, limit: FREE_EDGE_TOL });
                    }
                    u.lq_norm(q)
                },
                p,
                horizon,
                2,
            )?))
        } else {
            None
        };
        let profile_lambda =
            profile_norm(WeightedProfile::LAMBDA, self.mode, &params, &self.cutoffs, q, DerivFlags::default())?;
        let row = LadderRow {
            r: params.r,
            norm_fr_hsigma: hs,
            norm_fr_l2: l2,
            norm_fr_h1: h1,
            norm_fr_lq: lq,
            norm_wr_mixed: w,
            norm_fsource_dual: fsource,
            norm_ftilde_dual: ftilde,
            profile_lambda,
            quot_epo25: w / hs,
            quot_epo26: w / fsource,
            quot_epo75: w / (hs + ftilde),
            free_mixed: free,
            quot_free: free.map(|v| v / (hs + ftilde)),
            terms,
            nodes,
            valid: true,
            error: None,
        };
        let finite = CORE_COLUMNS.iter().all(|c| {
            let v = c.get(&row);
            v.is_finite() && v > 0.0
        });
        if !finite {
            return Err(LabError::Parameter(format!("non-finite or non-positive norm at R = {}", params.r)));
        }
        Ok(row)
    }
}

fn context<'a>(mode: &'a EigenMode2D, pair: AdmissiblePair<f64>) -> Result<Context<'a>> {
    let profile = mode.interpolant(MODE_REFINEMENT)?;
    let sector = Sector::detect(&profile)?;
    Ok(Context { mode, profile, sector, cutoffs: make_cutoffs(), pair })
}

/// Runs every `R` of `r_list` with the construction parameters of `template`.
/// A row that fails numerically is kept, marked invalid, with its error.
pub fn run_ladder(
    template: &ConstructionParams,
    r_list: &[f64],
    pair: AdmissiblePair<f64>,
    policy: GridPolicy,
    options: LadderOptions,
    mode: &EigenMode2D,
) -> Result<NormLadderReport> {
    if r_list.is_empty() {
        return Err(LabError::Parameter("empty R ladder".into()));
    }
    if let Some(r) = r_list.iter().find(|r| !(**r > 2.0)) {
        return Err(LabError::Parameter(format!("ladder needs R > 2, got {r}")));
    }
    let mut rs = r_list.to_vec();
    rs.sort_by(|a, b| a.total_cmp(b));
    rs.dedup();
    let ctx = context(mode, pair)?;
    let params = rs.iter().map(|&r| template.with_r(r)).collect::<std::result::Result<Vec<_>, _>>()?;
    let rows = params
        .par_iter()
        .map(|p| ctx.row(*p, &policy, options).unwrap_or_else(|e| LadderRow::invalid(p.r, &e)))
        .collect();
    let mut warnings = Vec::new();
    if !template.beta_above_threshold() {
        warnings.push(format!(
            "beta = {} does not exceed delta - gamma = {}; the quotient growth estimate does not apply",
            template.beta,
            template.delta - template.gamma
        ));
    }
    Ok(NormLadderReport {
        template: *template,
        pair,
        policy,
        options,
        exponents: exponents_f64(template.delta, template.gamma, template.beta, &pair),
        rows,
        warnings,
        convergence: None,
    })
}

/// Recomputes the row at `r` with `policy` and with half its spacing.
pub fn halving_check(
    template: &ConstructionParams,
    r: f64,
    pair: AdmissiblePair<f64>,
    policy: GridPolicy,
    mode: &EigenMode2D,
) -> Result<ConvergenceCheck> {
    let ctx = context(mode, pair)?;
    let params = template.with_r(r)?;
    let coarse = ctx.row(params, &policy, LadderOptions::default())?;
    let fine = ctx.row(params, &policy.refined(), LadderOptions::default())?;
    Ok(ConvergenceCheck { r, coarse, fine })
}

/// Least squares of `log column` against `log R` over the valid rows.
pub fn fit(report: &NormLadderReport, column: Column, predicted: f64, tol: f64, kind: BoundKind) -> Result<ScalingFit> {
    let (x, y) = report.series(column);
    Ok(fit_power_law(&x, &y, predicted, tol, kind)?)
}

/// Outcome of one named check of a campaign.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    /// Counted in the overall verdict.
    pub required: bool,
    pub passed: bool,
    pub fit: Option<ScalingFit>,
    pub detail: String,
}

impl Check {
    fn from_fit(name: &str, required: bool, fit: Result<ScalingFit>) -> Self {
        match fit {
            Ok(f) => Self {
                name: name.into(),
                required,
                passed: f.verdict,
                detail: format!(
                    "slope {:.4} vs predicted {:.4} ({:?}, tol {})",
                    f.slope, f.predicted, f.kind, f.tolerance
                ),
                fit: Some(f),
            },
            Err(e) => Self { name: name.into(), required, passed: false, fit: None, detail: e.to_string() },
        }
    }

    fn flag(name: &str, required: bool, passed: bool, detail: String) -> Self {
        Self { name: name.into(), required, passed, fit: None, detail }
    }
}

/// Tolerance on two-sided slope fits.
pub const SLOPE_TOL: f64 = 0.15;
/// Slack on one-sided slope inequalities.
pub const BOUND_SLACK: f64 = 0.05;
/// Largest tolerated max/min of a quantity that should stay bounded.
pub const SPREAD_LIMIT: f64 = 3.0;

/// Slope checks of the norm estimates on `f_R`, `W_R` and `F_R`.
pub fn lemma_checks(report: &NormLadderReport) -> Vec<Check> {
    let e = &report.exponents;
    let dq = (report.template.delta + report.template.gamma) / report.pair.q();
    let mut out = vec![
        Check::from_fit("fR_Hsigma", true, fit(report, Column::FrHsigma, e.f_r_exp, SLOPE_TOL, BoundKind::TwoSided)),
        Check::from_fit("fR_L2", true, fit(report, Column::FrL2, e.f_r_l2_exp, 0.1, BoundKind::TwoSided)),
        Check::from_fit("fR_H1", true, fit(report, Column::FrH1, e.f_r_h1_exp, SLOPE_TOL, BoundKind::TwoSided)),
        Check::from_fit("WR0_Lq", true, fit(report, Column::FrLq, e.w_r_exp, 0.1, BoundKind::TwoSided)),
        Check::from_fit("WR_mixed", true, fit(report, Column::WrMixed, e.w_r_mixed_exp, BOUND_SLACK, BoundKind::Lower)),
    ];
    let (rs, prof) = report.series(Column::ProfileLambda);
    let normalized: Vec<f64> = rs.iter().zip(&prof).map(|(r, v)| v / r.powf(dq)).collect();
    out.push(if normalized.len() >= 3 {
        let s = spread(&normalized);
        Check::flag("profile_ratio", true, s < SPREAD_LIMIT, format!("max/min of ‖Λψ_Rψχ‖_q / R^{dq:.4} = {s:.4}"))
    } else {
        Check::flag("profile_ratio", true, false, format!("needs 3 valid rows, got {}", normalized.len()))
    });
    let stated = fit(report, Column::FsourceDual, e.f_source_dual_exp, BOUND_SLACK, BoundKind::Upper);
    let alt = fit(report, Column::FsourceDual, e.f_source_dual_exp_alt, BOUND_SLACK, BoundKind::Upper);
    let extra = match (&stated, &alt) {
        (Ok(s), Ok(a)) => {
            let closer =
                if (s.slope - s.predicted).abs() <= (a.slope - a.predicted).abs() { "R^-gamma" } else { "R^-1" };
            format!(
                "; R^-1 branch predicts {:.4} (bound {}); nearer: {closer}",
                a.predicted,
                if a.verdict { "holds" } else { "fails" }
            )
        }
        _ => String::new(),
    };
    let mut c = Check::from_fit("FR_dual", true, stated);
    c.detail.push_str(&extra);
    out.push(c);
    out.push(Check::from_fit(
        "quot_epo25",
        true,
        fit(report, Column::Quot25, e.ratio25_exp, BOUND_SLACK, BoundKind::Lower),
    ));
    out.push(Check::from_fit("quot_epo26", true, fit(report, Column::Quot26, e.kappa, BOUND_SLACK, BoundKind::Lower)));
    out
}

/// Predicted dual mixed-norm exponent of each `G_R` term.
pub fn term_predictions(report: &NormLadderReport) -> [f64; 5] {
    let t = &report.template;
    let pair = &report.pair;
    let base = t.beta / pair.p_dual() + (t.delta + t.gamma) / pair.q_dual() - 2.0 * pair.sigma() * t.gamma;
    let transverse = base - (2.0 - t.delta / 2.0);
    let radial = base - (3.0 - t.delta);
    [transverse, transverse, base - t.gamma, radial, radial]
}

/// Informational fits of the five `G_R` terms.
pub fn term_checks(report: &NormLadderReport) -> Vec<Check> {
    if !report.options.term_diagnostics {
        return vec![];
    }
    term_predictions(report)
        .iter()
        .enumerate()
        .map(|(k, &pred)| {
            Check::from_fit(
                &Column::Term(k).name(),
                false,
                fit(report, Column::Term(k), pred, SLOPE_TOL, BoundKind::TwoSided),
            )
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct BlowUpReport {
    /// `(R, quot_epo75)` over valid rows.
    pub quotients: Vec<(f64, f64)>,
    pub increasing_tail: bool,
    /// Growth of the quotient against `R^μ` (informational).
    pub growth: Option<ScalingFit>,
    pub mu: f64,
    pub certificate: bool,
    /// max/min of the free-flow quotient, when computed.
    pub free_spread: Option<f64>,
}

impl BlowUpReport {
    pub fn checks(&self) -> Vec<Check> {
        let mut out = vec![
            Check::flag(
                "quot_epo75_increasing",
                true,
                self.increasing_tail,
                format!("last 4 of {:?}", self.quotients.iter().map(|q| q.1).collect::<Vec<_>>()),
            ),
            Check::flag("mu_certificate", true, self.certificate, format!("mu = {:.6}", self.mu)),
        ];
        if let Some(g) = &self.growth {
            out.push(Check {
                name: "quot_epo75_growth".into(),
                required: false,
                passed: g.verdict,
                fit: Some(*g),
                detail: format!("slope {:.4} vs mu {:.4}", g.slope, g.predicted),
            });
        }
        if let Some(s) = self.free_spread {
            out.push(Check::flag("free_control", true, s < SPREAD_LIMIT, format!("max/min = {s:.4}")));
        }
        out
    }
}

pub fn blow_up_report(report: &NormLadderReport) -> BlowUpReport {
    let (rs, qs) = report.series(Column::Quot75);
    let growth = fit_power_law(&rs, &qs, report.exponents.mu, SLOPE_TOL, BoundKind::Lower).ok();
    let free_spread = if report.options.free_control {
        let (_, f) = report.series(Column::QuotFree);
        (f.len() == report.rows.len() && !f.is_empty()).then(|| spread(&f))
    } else {
        None
    };
    BlowUpReport {
        increasing_tail: strictly_increasing_tail(&qs, 4),
        quotients: rs.into_iter().zip(qs).collect(),
        growth,
        mu: report.exponents.mu,
        certificate: report.exponents.mu_positive(),
        free_spread,
    }
}

/// Every check of a campaign, required ones first.
pub fn all_checks(report: &NormLadderReport) -> Vec<Check> {
    let mut out = lemma_checks(report);
    out.extend(blow_up_report(report).checks());
    out.extend(term_checks(report));
    if let Some(c) = &report.convergence {
        let m = c.max_relative_change();
        out.push(Check::flag("halving", true, m < 1e-2, format!("R = {}: max relative change {m:.2e}", c.r)));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::GridSpec2D;
    use crate::landau::{default_mode_index, solve_modes};
    use magdirac_core::exponents::admissible;

    fn synthetic(rs: &[f64], f: impl Fn(f64) -> f64) -> NormLadderReport {
        let template = ConstructionParams::new(1.5, 0.8, 0.75, 8.0).unwrap();
        let pair = admissible(4.0, 4.0).unwrap();
        let rows = rs
            .iter()
            .map(|&r| {
                let mut row = LadderRow::invalid(r, &LabError::Parameter(String::new()));
                row.valid = true;
                row.error = None;
                row.norm_fr_hsigma = f(r);
                row.quot_epo75 = f(r);
                row
            })
            .collect();
        NormLadderReport {
            template,
            pair,
            policy: GridPolicy::default(),
            options: LadderOptions::default(),
            exponents: exponents_f64(1.5, 0.8, 0.75, &pair),
            rows,
            warnings: vec![],
            convergence: None,
        }
    }

    #[test]
    fn synthetic_power_law_and_scale_freedom() {
        let rs = [8.0, 12.0, 16.0, 24.0, 32.0, 48.0, 64.0];
        let rep = synthetic(&rs, |r| 3.0 * r.powf(0.75));
        let f = fit(&rep, Column::FrHsigma, 0.75, SLOPE_TOL, BoundKind::TwoSided).unwrap();
        assert!((f.slope - 0.75).abs() < 1e-12 && f.verdict);
        let scaled: Vec<f64> = rs.iter().map(|r| 5.0 * r).collect();
        let rep2 = synthetic(&scaled, |r| 3.0 * (r / 5.0).powf(0.75));
        let g = fit(&rep2, Column::FrHsigma, 0.75, SLOPE_TOL, BoundKind::TwoSided).unwrap();
        assert!((g.slope - f.slope).abs() < 1e-12);
        assert!((g.intercept - f.intercept).abs() > 0.5);
        let b = blow_up_report(&rep);
        assert!(b.increasing_tail && b.certificate);
    }

    #[test]
    fn single_row_refuses_fits() {
        let rep = synthetic(&[8.0], |r| r);
        assert!(fit(&rep, Column::FrHsigma, 1.0, 0.1, BoundKind::TwoSided).is_err());
        assert!(!blow_up_report(&rep).increasing_tail);
    }

    #[test]
    fn policies() {
        let p = ConstructionParams::new(1.5, 0.8, 0.75, 16.0).unwrap();
        let pol = GridPolicy::default();
        let g = pol.grid(&p).unwrap();
        let w = pol.grid_with_margin(&p, p.horizon()).unwrap();
        assert!((w.d_rho() / g.d_rho() - 1.0).abs() < 0.02 && (w.d_z() / g.d_z() - 1.0).abs() < 0.02);
        assert!(w.rho_max > g.rho_max + p.horizon() - 1e-9);
        assert_eq!(pol.refined().grid(&p).unwrap().d_rho() * 2.0, g.d_rho());
        let pred = term_predictions(&synthetic(&[8.0], |r| r));
        for (a, b) in pred.iter().zip([0.2375, 0.2375, 0.6875, -0.0125, -0.0125]) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn small_ladder_runs() {
        let modes = solve_modes(GridSpec2D::new(8.0, 64).unwrap(), 4, 1e-8).unwrap();
        let mode = &modes[default_mode_index(&modes).unwrap()];
        let low = ConstructionParams::new(1.5, 0.8, 0.6, 8.0).unwrap();
        let pair = admissible(4.0, 4.0).unwrap();
        let pol = GridPolicy { pad: 2.0, n_rho: 128, n_z: 128 };
        let rep = run_ladder(
            &low,
            &[12.0, 8.0],
            pair,
            pol,
            LadderOptions { free_control: true, term_diagnostics: false },
            mode,
        )
        .unwrap();
        assert_eq!(rep.rows.iter().map(|r| r.r).collect::<Vec<_>>(), vec![8.0, 12.0]);
        assert!(rep.rows.iter().all(|r| r.valid), "{:?}", rep.rows);
        assert_eq!(rep.warnings.len(), 1);
        for row in &rep.rows {
            // Constant modulus in time: the mixed norm is T^{1/p} times the slice norm.
            let t = low.with_r(row.r).unwrap().horizon();
            assert!((row.norm_wr_mixed / (t.powf(0.25) * row.norm_fr_lq) - 1.0).abs() < 1e-9);
            assert!(row.free_mixed.unwrap() > 0.0);
        }
        assert!(run_ladder(&low, &[2.0], pair, pol, LadderOptions::default(), mode).is_err());
    }
}
