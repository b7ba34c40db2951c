//! Command-line driving logic: single-state reports, figure-reproduction
//! sweeps with deterministic CSV output, and the validation suite.

use std::io::Write;
use std::path::PathBuf;

use rayon::prelude::*;
use serde::Serialize;

use crate::entropies::{fisher_numeric, shannon_entropy, QuadratureSpec, ScalarResult};
use crate::error::{Error, Result};
use crate::measures::{
    complexity_fisher_renyi, complexity_fisher_shannon, complexity_lmc, default_path,
    entropic_moment, fisher_closed, measure_report, renyi_entropy, tsallis_entropy, WqPath,
};
use crate::oracle::audit_catalog;
use crate::state::HyperState;

/// CSV column order shared by every sweep row.
pub const CSV_HEADER: &str = "D,l,m,q,measure,value,err,method";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Json,
}

/// The nine figure grids plus a free-form grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepMode {
    FsVsM,
    FsVsL,
    FsDiag,
    FrVsM,
    FrVsL,
    FrDiag,
    LmcVsM,
    LmcVsL,
    LmcDiag,
    Custom,
}

impl SweepMode {
    pub fn name(self) -> &'static str {
        match self {
            SweepMode::FsVsM => "fs_vs_m",
            SweepMode::FsVsL => "fs_vs_l",
            SweepMode::FsDiag => "fs_diag",
            SweepMode::FrVsM => "fr_vs_m",
            SweepMode::FrVsL => "fr_vs_l",
            SweepMode::FrDiag => "fr_diag",
            SweepMode::LmcVsM => "lmc_vs_m",
            SweepMode::LmcVsL => "lmc_vs_l",
            SweepMode::LmcDiag => "lmc_diag",
            SweepMode::Custom => "custom",
        }
    }

    pub fn all_figures() -> [SweepMode; 9] {
        [
            SweepMode::FsVsM,
            SweepMode::FsVsL,
            SweepMode::FsDiag,
            SweepMode::FrVsM,
            SweepMode::FrVsL,
            SweepMode::FrDiag,
            SweepMode::LmcVsM,
            SweepMode::LmcVsL,
            SweepMode::LmcDiag,
        ]
    }

    fn measure(self) -> MeasureKind {
        match self {
            SweepMode::FsVsM | SweepMode::FsVsL | SweepMode::FsDiag => MeasureKind::CFs,
            SweepMode::FrVsM | SweepMode::FrVsL | SweepMode::FrDiag => MeasureKind::CFr,
            SweepMode::LmcVsM | SweepMode::LmcVsL | SweepMode::LmcDiag => MeasureKind::CLmc,
            SweepMode::Custom => MeasureKind::CFs,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum MeasureKind {
    Fisher,
    Shannon,
    Renyi,
    Tsallis,
    Disequilibrium,
    CFs,
    CFr,
    CLmc,
}

impl MeasureKind {
    fn name(self) -> &'static str {
        match self {
            MeasureKind::Fisher => "fisher",
            MeasureKind::Shannon => "shannon",
            MeasureKind::Renyi => "renyi",
            MeasureKind::Tsallis => "tsallis",
            MeasureKind::Disequilibrium => "disequilibrium",
            MeasureKind::CFs => "c_fs",
            MeasureKind::CFr => "c_fr",
            MeasureKind::CLmc => "c_lmc",
        }
    }

    fn takes_order(self) -> bool {
        matches!(
            self,
            MeasureKind::Renyi | MeasureKind::Tsallis | MeasureKind::CFr
        )
    }
}

/// Declarative description of one sweep: the mode picks the figure grid and
/// measure, the optional lists override the plotted parameter values.
#[derive(Debug, Clone)]
pub struct SweepSpec {
    pub mode: SweepMode,
    pub l_values: Option<Vec<i64>>,
    pub m_values: Option<Vec<i64>>,
    pub a_values: Option<Vec<i64>>,
    pub l_max: Option<i64>,
    pub q: f64,
    pub out: Option<PathBuf>,
    pub format: OutputFormat,
    pub quad: QuadratureSpec,
    pub force_path: Option<WqPath>,
}

impl SweepSpec {
    pub fn figure_defaults(mode: SweepMode) -> Self {
        SweepSpec {
            mode,
            l_values: None,
            m_values: None,
            a_values: None,
            l_max: None,
            q: 2.0,
            out: None,
            format: OutputFormat::Csv,
            quad: QuadratureSpec::default(),
            force_path: None,
        }
    }
}

#[derive(Debug, Clone)]
struct SweepPoint {
    state: HyperState,
    q: Option<f64>,
    measure: MeasureKind,
}

/// One emitted row.
#[derive(Debug, Clone, Serialize)]
pub struct SweepRow {
    pub d: usize,
    pub l: i64,
    pub m: i64,
    pub q: Option<f64>,
    pub measure: &'static str,
    pub value: f64,
    pub err: f64,
    pub method: String,
}

fn grid(spec: &SweepSpec) -> Result<Vec<SweepPoint>> {
    let measure = spec.mode.measure();
    let q = Some(spec.q);
    let mut points = Vec::new();
    let mut push = |l: i64, m: i64, kind: MeasureKind, q: Option<f64>| -> Result<()> {
        let state = HyperState::new(3, vec![l, m])?;
        points.push(SweepPoint {
            state,
            q: if kind.takes_order() { q } else { None },
            measure: kind,
        });
        Ok(())
    };
    match spec.mode {
        SweepMode::FsVsM | SweepMode::FrVsM | SweepMode::LmcVsM => {
            let default: &[i64] = if spec.mode == SweepMode::FrVsM {
                &[10, 20, 50]
            } else {
                &[10, 20, 50, 80]
            };
            let ls = spec.l_values.clone().unwrap_or_else(|| default.to_vec());
            for l in ls {
                for m in 0..=l {
                    push(l, m, measure, q)?;
                }
            }
        }
        SweepMode::FsVsL | SweepMode::FrVsL | SweepMode::LmcVsL => {
            let cap = spec.l_max.unwrap_or(match spec.mode {
                SweepMode::FrVsL => 60,
                _ => 80,
            });
            let ms = spec.m_values.clone().unwrap_or_else(|| vec![0, 1, 2, 5]);
            for m in ms {
                for l in m..=cap {
                    push(l, m, measure, q)?;
                }
            }
        }
        SweepMode::FsDiag | SweepMode::FrDiag | SweepMode::LmcDiag => {
            let cap = spec.l_max.unwrap_or(match spec.mode {
                SweepMode::FsDiag => 80,
                _ => 60,
            });
            let avals = spec.a_values.clone().unwrap_or_else(|| vec![0, 1, 2]);
            for a in avals {
                for l in a..=cap {
                    push(l, l - a, measure, q)?;
                }
            }
        }
        SweepMode::Custom => {
            let ls = spec
                .l_values
                .clone()
                .ok_or_else(|| Error::domain("custom mode needs --l"))?;
            let ms = spec.m_values.clone().unwrap_or_else(|| vec![0]);
            let kinds = [
                MeasureKind::Fisher,
                MeasureKind::Shannon,
                MeasureKind::Renyi,
                MeasureKind::Tsallis,
                MeasureKind::Disequilibrium,
                MeasureKind::CFs,
                MeasureKind::CFr,
                MeasureKind::CLmc,
            ];
            for &l in &ls {
                for &m in &ms {
                    if m.abs() > l {
                        continue;
                    }
                    for kind in kinds {
                        push(l, m, kind, q)?;
                    }
                }
            }
        }
    }
    Ok(points)
}

fn eval_point(point: &SweepPoint, spec: &SweepSpec) -> Result<ScalarResult> {
    let quad = &spec.quad;
    let state = &point.state;
    let order = point.q.unwrap_or(spec.q);
    let path = spec.force_path.unwrap_or_else(|| default_path(order));
    let w2_path = spec.force_path.unwrap_or(WqPath::Exact);
    match point.measure {
        MeasureKind::Fisher => Ok(fisher_closed(state)),
        MeasureKind::Shannon => shannon_entropy(state, quad),
        MeasureKind::Renyi => renyi_entropy(state, order, path, quad),
        MeasureKind::Tsallis => tsallis_entropy(state, order, path, quad),
        MeasureKind::Disequilibrium => entropic_moment(state, 2.0, w2_path, quad),
        MeasureKind::CFs => complexity_fisher_shannon(state, quad),
        MeasureKind::CFr => complexity_fisher_renyi(state, order, path, quad),
        MeasureKind::CLmc => complexity_lmc(state, w2_path, quad),
    }
}

/// Evaluates the sweep grid in parallel; rows come back in grid order.
pub fn sweep_rows(spec: &SweepSpec) -> Result<Vec<SweepRow>> {
    let points = grid(spec)?;
    points
        .par_iter()
        .map(|point| {
            let result = eval_point(point, spec)?;
            Ok(SweepRow {
                d: point.state.dimension(),
                l: point.state.l(),
                m: point.state.m(),
                q: point.q,
                measure: point.measure.name(),
                value: result.value,
                err: result.error,
                method: result.method.to_string(),
            })
        })
        .collect()
}

/// Shortest round-trip decimal, capped at 15 significant digits.
pub fn fmt_value(v: f64) -> String {
    if v == 0.0 {
        return "0".to_string();
    }
    if !v.is_finite() {
        return format!("{v}");
    }
    let shortest = format!("{v}");
    if significant_digits(&shortest) <= 15 {
        shortest
    } else {
        format!("{v:.14e}")
    }
}

fn significant_digits(s: &str) -> usize {
    let mantissa = s.split(['e', 'E']).next().unwrap_or(s);
    mantissa
        .chars()
        .filter(|c| c.is_ascii_digit())
        .collect::<String>()
        .trim_start_matches('0')
        .len()
}

fn render_csv(rows: &[SweepRow]) -> String {
    let mut out = String::with_capacity(rows.len() * 48 + 64);
    out.push_str(CSV_HEADER);
    out.push('\n');
    for row in rows {
        let q = row.q.map(fmt_value).unwrap_or_default();
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{}\n",
            row.d,
            row.l,
            row.m,
            q,
            row.measure,
            fmt_value(row.value),
            fmt_value(row.err),
            row.method
        ));
    }
    out
}

fn render_json(rows: &[SweepRow]) -> String {
    serde_json::to_string_pretty(rows).expect("rows serialize")
}

fn write_output(out: &Option<PathBuf>, content: &str) -> Result<()> {
    match out {
        Some(path) => {
            let mut file = std::fs::File::create(path)?;
            file.write_all(content.as_bytes())?;
            Ok(())
        }
        None => {
            std::io::stdout().write_all(content.as_bytes())?;
            Ok(())
        }
    }
}

/// Runs one sweep end to end. Returns the rendered output (also written to
/// `spec.out` when set).
pub fn cmd_sweep(spec: &SweepSpec) -> Result<String> {
    let rows = sweep_rows(spec)?;
    let content = match spec.format {
        OutputFormat::Csv => render_csv(&rows),
        OutputFormat::Json => render_json(&rows),
    };
    write_output(&spec.out, &content)?;
    Ok(content)
}

/// Builds the full report for one state literal. Orders equal to one are
/// redirected to the Shannon entropy; any redirect or unconverged
/// quadrature is reported in the returned notices.
pub fn cmd_report(
    literal: &str,
    orders: &[f64],
    quad: &QuadratureSpec,
    force_path: Option<WqPath>,
) -> Result<(String, Vec<String>)> {
    let state: HyperState = literal.parse()?;
    let mut notices = Vec::new();
    let mut qs: Vec<f64> = Vec::new();
    let mut wants_shannon_order = false;
    for &q in orders {
        if q == 1.0 {
            wants_shannon_order = true;
            notices.push("q = 1 redirected to the Shannon entropy".to_string());
        } else {
            qs.push(q);
        }
    }
    if qs.is_empty() && !wants_shannon_order {
        qs.push(2.0);
    }
    let mut report = measure_report(&state, &qs, quad, force_path)?;
    if wants_shannon_order {
        report.renyi.0.push((1.0, report.shannon));
        report.tsallis.0.push((1.0, report.shannon));
        report
            .renyi
            .0
            .sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        report
            .tsallis
            .0
            .sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    }
    for (name, r) in [
        ("shannon", &report.shannon),
        ("disequilibrium", &report.disequilibrium),
        ("c_lmc", &report.c_lmc),
    ] {
        if !r.converged(quad) {
            notices.push(format!(
                "{name} quadrature flagged: error estimate {:.2e} exceeds tolerance",
                r.error
            ));
        }
    }
    let json = serde_json::to_string_pretty(&report).expect("report serializes");
    Ok((json, notices))
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckSummary {
    pub name: String,
    pub points: usize,
    pub failures: Vec<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ValidateSummary {
    pub audit_passed: bool,
    pub quarantined: Vec<&'static str>,
    pub audit_cases: Vec<crate::oracle::CaseSummary>,
    /// Audit entries that did not pass (quarantined ones are informational).
    pub audit_flagged: Vec<crate::oracle::AuditEntry>,
    pub checks: Vec<CheckSummary>,
    pub pass: bool,
}

/// The validation suite: the catalog audit, exact-vs-quadrature agreement,
/// normalization and the Fisher cross-check, over the requested grid.
pub fn cmd_validate(
    l_max: i64,
    dims: &[usize],
    q_grid: &[f64],
    quad: &QuadratureSpec,
) -> Result<(String, bool)> {
    let audit = audit_catalog(l_max, q_grid);
    let mut checks = Vec::new();

    // dual-path agreement at the integer orders of the grid
    {
        let mut failures = Vec::new();
        let mut points = 0;
        for &d in dims {
            for state in HyperState::enumerate(d, l_max) {
                for &q in q_grid {
                    if q < 1.0 || q.fract() != 0.0 {
                        continue;
                    }
                    points += 1;
                    let exact = entropic_moment(&state, q, WqPath::Exact, quad)?;
                    let numeric = entropic_moment(&state, q, WqPath::Quadrature, quad)?;
                    let tol = (1e-8 * numeric.value.abs()).max(exact.error + numeric.error);
                    if (exact.value - numeric.value).abs() > tol {
                        failures.push(format!(
                            "{state} q={q}: exact {} vs quadrature {}",
                            exact.value, numeric.value
                        ));
                    }
                }
            }
        }
        checks.push(CheckSummary {
            name: "dual-path moments".to_string(),
            points,
            failures,
        });
    }

    // W_1 = 1 from the quadrature path
    {
        let mut failures = Vec::new();
        let mut points = 0;
        for &d in dims {
            for state in HyperState::enumerate(d, l_max) {
                points += 1;
                let w1 = entropic_moment(&state, 1.0, WqPath::Quadrature, quad)?;
                if (w1.value - 1.0).abs() > 1e-10 {
                    failures.push(format!("{state}: W_1 = {}", w1.value));
                }
            }
        }
        checks.push(CheckSummary {
            name: "normalization".to_string(),
            points,
            failures,
        });
    }

    // closed-form Fisher against the numeric oracle
    {
        let mut failures = Vec::new();
        let mut points = 0;
        for &d in dims {
            if d < 3 {
                continue;
            }
            let cap = if d == 3 { l_max.min(10) } else { l_max.min(5) };
            for state in HyperState::enumerate(d, cap) {
                points += 1;
                let closed = fisher_closed(&state);
                let numeric = fisher_numeric(&state, quad)?;
                let scale = closed.value.abs().max(1.0);
                if (closed.value - numeric.value).abs() > 1e-6 * scale {
                    failures.push(format!(
                        "{state}: closed {} vs numeric {}",
                        closed.value, numeric.value
                    ));
                }
            }
        }
        checks.push(CheckSummary {
            name: "fisher cross-check".to_string(),
            points,
            failures,
        });
    }

    let pass = audit.passed() && checks.iter().all(|c| c.failures.is_empty());
    let summary = ValidateSummary {
        audit_passed: audit.passed(),
        quarantined: audit.quarantined_ids(),
        audit_cases: audit.cases.clone(),
        audit_flagged: audit
            .entries
            .iter()
            .filter(|e| e.verdict != crate::oracle::Verdict::Pass)
            .cloned()
            .collect(),
        checks,
        pass,
    };
    Ok((
        serde_json::to_string_pretty(&summary).expect("summary serializes"),
        pass,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn formatting_is_capped_shortest() {
        assert_eq!(fmt_value(0.0), "0");
        assert_eq!(fmt_value(8.0), "8");
        assert_eq!(fmt_value(0.5), "0.5");
        assert_eq!(fmt_value(-3.25), "-3.25");
        // a value whose shortest form needs 17 digits gets capped to 15
        let v = 0.1 + 0.2;
        assert_eq!(fmt_value(v), format!("{v:.14e}"));
        assert!(significant_digits(&fmt_value(v)) <= 15);
    }

    #[test]
    fn sweep_grid_shapes() {
        let mut spec = SweepSpec::figure_defaults(SweepMode::FsVsM);
        spec.l_values = Some(vec![10]);
        let rows = sweep_rows(&spec).unwrap();
        assert_eq!(rows.len(), 11);
        assert!(rows.iter().all(|r| r.measure == "c_fs" && r.d == 3));
        // strictly decreasing in m
        for w in rows.windows(2) {
            assert!(w[1].value < w[0].value);
        }

        let mut spec = SweepSpec::figure_defaults(SweepMode::LmcVsM);
        spec.l_values = Some(vec![20]);
        let rows = sweep_rows(&spec).unwrap();
        assert_eq!(rows.len(), 21);
        let values: Vec<f64> = rows.iter().map(|r| r.value).collect();
        let min_pos = values
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.partial_cmp(b.1).unwrap())
            .unwrap()
            .0;
        assert!(min_pos > 0 && min_pos < values.len() - 1, "{values:?}");

        let mut spec = SweepSpec::figure_defaults(SweepMode::FrVsM);
        spec.l_values = Some(vec![10]);
        let rows = sweep_rows(&spec).unwrap();
        let max_pos = rows
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.value.partial_cmp(&b.1.value).unwrap())
            .unwrap()
            .0;
        assert!(max_pos > 0, "maximum must sit at m > 0");
        assert!(rows.iter().all(|r| r.q == Some(2.0)));
    }

    #[test]
    fn sweep_output_is_deterministic() {
        let mut spec = SweepSpec::figure_defaults(SweepMode::FsDiag);
        spec.a_values = Some(vec![0, 1]);
        spec.l_max = Some(12);
        let a = cmd_sweep(&spec).unwrap();
        let b = cmd_sweep(&spec).unwrap();
        assert_eq!(a, b);
        assert!(a.starts_with(CSV_HEADER));
        let lines: Vec<&str> = a.trim_end().lines().collect();
        assert_eq!(lines.len(), 1 + 13 + 12);
    }

    #[test]
    fn custom_mode_emits_all_measures() {
        let mut spec = SweepSpec::figure_defaults(SweepMode::Custom);
        spec.l_values = Some(vec![2]);
        spec.m_values = Some(vec![1]);
        let rows = sweep_rows(&spec).unwrap();
        assert_eq!(rows.len(), 8);
        let names: Vec<&str> = rows.iter().map(|r| r.measure).collect();
        assert!(names.contains(&"fisher") && names.contains(&"c_lmc"));
        // fisher row for (2, 1) is exactly 14
        assert_eq!(rows[0].measure, "fisher");
        assert_eq!(rows[0].value, 14.0);
    }

    #[test]
    fn report_redirects_order_one() {
        let quad = QuadratureSpec::default();
        let (json, notices) = cmd_report("3:1,0", &[1.0, 2.0], &quad, None).unwrap();
        assert!(notices.iter().any(|n| n.contains("redirected")));
        let value: serde_json::Value = serde_json::from_str(&json).unwrap();
        assert!((value["fisher"]["value"].as_f64().unwrap() - 8.0).abs() < 1e-12);
        // the q = 1 entry equals the Shannon entropy
        let s = value["shannon"]["value"].as_f64().unwrap();
        assert_eq!(value["renyi"]["1"]["value"].as_f64().unwrap(), s);
        assert!((s - ((4.0 * std::f64::consts::PI / 3.0).ln() + 2.0 / 3.0)).abs() < 1e-9);

        assert!(cmd_report("4:1,2,0", &[2.0], &quad, None).is_err());
    }

    #[test]
    fn validate_small_grid_passes() {
        let quad = QuadratureSpec::default();
        let (json, pass) = cmd_validate(2, &[3, 4], &[1.0, 2.0], &quad).unwrap();
        assert!(pass, "{json}");
        let v: serde_json::Value = serde_json::from_str(&json).unwrap();
        assert_eq!(v["pass"], true);
        assert_eq!(v["quarantined"][0], "d4-staircase-printed");
    }
}
