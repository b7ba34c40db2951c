//! Closed-form Fisher information and the derived entropy and complexity
//! measures, assembled from the two entropic-moment paths and the Shannon
//! integral.

use serde::ser::SerializeMap;
use serde::Serialize;

use crate::entropies::{
    entropic_moment_quadrature, fisher_numeric, shannon_entropy, Method, QuadratureSpec,
    ScalarResult,
};
use crate::error::{Error, Result};
use crate::linearization::entropic_moment_exact;
use crate::state::HyperState;

/// Which entropic-moment route feeds a measure.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WqPath {
    Exact,
    Quadrature,
}

/// Picks the exact path for integer orders, quadrature otherwise.
pub fn default_path(q: f64) -> WqPath {
    if q >= 1.0 && q.fract() == 0.0 {
        WqPath::Exact
    } else {
        WqPath::Quadrature
    }
}

/// Entropic moment along the requested path.
pub fn entropic_moment(
    state: &HyperState,
    q: f64,
    path: WqPath,
    spec: &QuadratureSpec,
) -> Result<ScalarResult> {
    match path {
        WqPath::Exact => {
            if !(q >= 1.0 && q.fract() == 0.0 && q <= u32::MAX as f64) {
                return Err(Error::UnsupportedOrder(format!(
                    "the exact path needs an integer q >= 1, got {q}; use the quadrature path"
                )));
            }
            let m = entropic_moment_exact(state, q as u32)?;
            let value = m.value.value();
            Ok(ScalarResult {
                value,
                error: value.abs() * m.rel_error,
                method: Method::Exact,
            })
        }
        WqPath::Quadrature => entropic_moment_quadrature(state, q, spec),
    }
}

/// ln W_q plus its relative error, staying in log space on the exact path.
fn log_moment(
    state: &HyperState,
    q: f64,
    path: WqPath,
    spec: &QuadratureSpec,
) -> Result<(f64, f64, Method)> {
    match path {
        WqPath::Exact => {
            if !(q >= 1.0 && q.fract() == 0.0 && q <= u32::MAX as f64) {
                return Err(Error::UnsupportedOrder(format!(
                    "the exact path needs an integer q >= 1, got {q}; use the quadrature path"
                )));
            }
            let m = entropic_moment_exact(state, q as u32)?;
            if m.value.sign <= 0 {
                return Err(Error::domain(format!(
                    "non-positive entropic moment for {state} at q = {q}"
                )));
            }
            Ok((m.value.log_magnitude, m.rel_error, Method::Exact))
        }
        WqPath::Quadrature => {
            let w = entropic_moment_quadrature(state, q, spec)?;
            if !(w.value > 0.0) {
                return Err(Error::domain(format!(
                    "non-positive entropic moment for {state} at q = {q}"
                )));
            }
            Ok((w.value.ln(), w.error / w.value, Method::Quadrature))
        }
    }
}

/// Fisher information in closed form:
///
///   F = 4 L (L + 1) - 2 |m| (2 L + 1) - (D - 1)(D - 3),  L = l + (D - 3)/2.
///
/// Vanishes identically for the uniform densities (l = 0 and all of D = 2).
pub fn fisher_closed(state: &HyperState) -> ScalarResult {
    let d = state.dimension() as f64;
    let l = state.l().abs() as f64;
    let m = state.m().abs() as f64;
    let big_l = l + (d - 3.0) / 2.0;
    let value = 4.0 * big_l * (big_l + 1.0) - 2.0 * m * (2.0 * big_l + 1.0) - (d - 1.0) * (d - 3.0);
    ScalarResult {
        value,
        error: 4.0 * f64::EPSILON * value.abs(),
        method: Method::ClosedForm,
    }
}

fn check_renyi_order(q: f64) -> Result<()> {
    if !(q > 0.0) {
        return Err(Error::domain(format!("order must be positive, got {q}")));
    }
    if q == 1.0 {
        return Err(Error::UnsupportedOrder(
            "q = 1 is the Shannon limit; call shannon_entropy instead".into(),
        ));
    }
    Ok(())
}

/// Renyi entropy R_q = log(W_q) / (1 - q), q > 0, q != 1.
pub fn renyi_entropy(
    state: &HyperState,
    q: f64,
    path: WqPath,
    spec: &QuadratureSpec,
) -> Result<ScalarResult> {
    check_renyi_order(q)?;
    let (log_w, rel, method) = log_moment(state, q, path, spec)?;
    Ok(ScalarResult {
        value: log_w / (1.0 - q),
        error: rel / (1.0 - q).abs(),
        method,
    })
}

/// Tsallis entropy T_q = (1 - W_q) / (q - 1), q > 0, q != 1.
pub fn tsallis_entropy(
    state: &HyperState,
    q: f64,
    path: WqPath,
    spec: &QuadratureSpec,
) -> Result<ScalarResult> {
    check_renyi_order(q)?;
    let w = entropic_moment(state, q, path, spec)?;
    Ok(ScalarResult {
        value: (1.0 - w.value) / (q - 1.0),
        error: w.error / (q - 1.0).abs(),
        method: w.method,
    })
}

fn power_entropy_from_log(state: &HyperState, entropy: f64, entropy_err: f64) -> (f64, f64) {
    let d = state.dimension() as f64;
    let j = (2.0 / d * entropy).exp() / (2.0 * std::f64::consts::PI * std::f64::consts::E);
    (j, j * (2.0 / d) * entropy_err)
}

/// Renyi power entropy J_q = exp((2/D) R_q) / (2 pi e).
pub fn renyi_power_entropy(
    state: &HyperState,
    q: f64,
    path: WqPath,
    spec: &QuadratureSpec,
) -> Result<ScalarResult> {
    let r = renyi_entropy(state, q, path, spec)?;
    let (value, error) = power_entropy_from_log(state, r.value, r.error);
    Ok(ScalarResult {
        value,
        error,
        method: r.method,
    })
}

/// Fisher-Renyi complexity C_FR = F x J_q.
pub fn complexity_fisher_renyi(
    state: &HyperState,
    q: f64,
    path: WqPath,
    spec: &QuadratureSpec,
) -> Result<ScalarResult> {
    let f = fisher_closed(state);
    let j = renyi_power_entropy(state, q, path, spec)?;
    Ok(ScalarResult {
        value: f.value * j.value,
        error: f.value.abs() * j.error + f.error * j.value.abs(),
        method: j.method,
    })
}

/// Fisher-Shannon complexity C_FS = F x exp((2/D) S) / (2 pi e).
pub fn complexity_fisher_shannon(state: &HyperState, spec: &QuadratureSpec) -> Result<ScalarResult> {
    let f = fisher_closed(state);
    let s = shannon_entropy(state, spec)?;
    let (j, j_err) = power_entropy_from_log(state, s.value, s.error);
    Ok(ScalarResult {
        value: f.value * j,
        error: f.value.abs() * j_err + f.error * j,
        method: Method::Quadrature,
    })
}

/// LMC complexity C_LMC = W_2 x exp(S), the disequilibrium from the
/// requested moment path (exact by default) and S from quadrature. The
/// error is propagated to first order in both parts.
pub fn complexity_lmc(
    state: &HyperState,
    w2_path: WqPath,
    spec: &QuadratureSpec,
) -> Result<ScalarResult> {
    let w2 = entropic_moment(state, 2.0, w2_path, spec)?;
    let s = shannon_entropy(state, spec)?;
    let es = s.value.exp();
    Ok(ScalarResult {
        value: w2.value * es,
        error: es * w2.error + w2.value.abs() * es * s.error,
        method: Method::Quadrature,
    })
}

/// Ordered q -> result map that serializes with trimmed numeric keys.
#[derive(Debug, Clone)]
pub struct QMap(pub Vec<(f64, ScalarResult)>);

impl Serialize for QMap {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut map = serializer.serialize_map(Some(self.0.len()))?;
        for (q, r) in &self.0 {
            map.serialize_entry(&format!("{q}"), r)?;
        }
        map.end()
    }
}

/// Every measure of one state, evaluated over a list of moment orders.
#[derive(Debug, Clone, Serialize)]
pub struct MeasureReport {
    pub state: HyperState,
    pub fisher: ScalarResult,
    pub shannon: ScalarResult,
    pub renyi: QMap,
    pub tsallis: QMap,
    pub disequilibrium: ScalarResult,
    pub c_fs: ScalarResult,
    pub c_fr: QMap,
    pub c_lmc: ScalarResult,
}

/// Builds the full report. Orders equal to one are rejected here; the CLI
/// redirects them to the Shannon entropy with a notice.
pub fn measure_report(
    state: &HyperState,
    orders: &[f64],
    spec: &QuadratureSpec,
    force_path: Option<WqPath>,
) -> Result<MeasureReport> {
    let mut qs: Vec<f64> = orders.to_vec();
    qs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    qs.dedup();

    let fisher = fisher_closed(state);
    let shannon = shannon_entropy(state, spec)?;
    let mut renyi = Vec::new();
    let mut tsallis = Vec::new();
    let mut c_fr = Vec::new();
    for &q in &qs {
        let path = force_path.unwrap_or_else(|| default_path(q));
        renyi.push((q, renyi_entropy(state, q, path, spec)?));
        tsallis.push((q, tsallis_entropy(state, q, path, spec)?));
        c_fr.push((q, complexity_fisher_renyi(state, q, path, spec)?));
    }
    let w2_path = force_path.unwrap_or(WqPath::Exact);
    let disequilibrium = entropic_moment(state, 2.0, w2_path, spec)?;
    let c_fs = complexity_fisher_shannon(state, spec)?;
    let c_lmc = complexity_lmc(state, w2_path, spec)?;
    Ok(MeasureReport {
        state: state.clone(),
        fisher,
        shannon,
        renyi: QMap(renyi),
        tsallis: QMap(tsallis),
        disequilibrium,
        c_fs,
        c_fr: QMap(c_fr),
        c_lmc,
    })
}

/// Numeric Fisher oracle re-export for cross-checks against [`fisher_closed`].
pub fn fisher_oracle(state: &HyperState, spec: &QuadratureSpec) -> Result<ScalarResult> {
    fisher_numeric(state, spec)
}

#[cfg(test)]
mod tests {
    use super::*;

    const PI: f64 = std::f64::consts::PI;

    fn state(d: usize, mu: &[i64]) -> HyperState {
        HyperState::new(d, mu.to_vec()).unwrap()
    }

    #[test]
    fn fisher_closed_examples() {
        assert_eq!(fisher_closed(&state(3, &[1, 0])).value, 8.0);
        assert_eq!(fisher_closed(&state(3, &[5, 5])).value, 10.0);
        assert_eq!(fisher_closed(&state(3, &[2, 1])).value, 14.0);
        assert_eq!(fisher_closed(&state(4, &[1, 0, 0])).value, 12.0);
        for m in [-5i64, -1, 0, 2, 5] {
            assert_eq!(fisher_closed(&state(2, &[m])).value, 0.0);
        }
        // sign of m never matters
        assert_eq!(
            fisher_closed(&state(3, &[7, -4])).value,
            fisher_closed(&state(3, &[7, 4])).value
        );
    }

    #[test]
    fn renyi_examples() {
        let spec = QuadratureSpec::default();
        let r = renyi_entropy(&state(3, &[0, 0]), 2.0, WqPath::Exact, &spec).unwrap();
        assert!((r.value - (4.0 * PI).ln()).abs() < 1e-13);
        assert_eq!(r.method, Method::Exact);

        let r = renyi_entropy(&state(3, &[1, 0]), 2.0, WqPath::Exact, &spec).unwrap();
        assert!((r.value - (20.0 * PI / 9.0).ln()).abs() < 1e-13);

        for q in [0.5, 2.0, 3.5] {
            let r = renyi_entropy(&state(2, &[6]), q, default_path(q), &spec).unwrap();
            assert!((r.value - (2.0 * PI).ln()).abs() < 1e-10, "q = {q}");
        }

        assert!(renyi_entropy(&state(3, &[1, 0]), 1.0, WqPath::Exact, &spec).is_err());
        assert!(renyi_entropy(&state(3, &[1, 0]), 0.0, WqPath::Exact, &spec).is_err());
        assert!(renyi_entropy(&state(3, &[1, 0]), 2.5, WqPath::Exact, &spec).is_err());
    }

    #[test]
    fn tsallis_examples() {
        let spec = QuadratureSpec::default();
        let t = tsallis_entropy(&state(3, &[0, 0]), 2.0, WqPath::Exact, &spec).unwrap();
        assert!((t.value - (1.0 - 1.0 / (4.0 * PI))).abs() < 1e-13);
        let t = tsallis_entropy(&state(2, &[3]), 2.0, WqPath::Exact, &spec).unwrap();
        assert!((t.value - (1.0 - 1.0 / (2.0 * PI))).abs() < 1e-13);

        // orders close to one bracket the Shannon entropy
        let s = shannon_entropy(&state(3, &[2, 1]), &spec).unwrap().value;
        let lo = tsallis_entropy(&state(3, &[2, 1]), 1.0001, WqPath::Quadrature, &spec)
            .unwrap()
            .value;
        let hi = tsallis_entropy(&state(3, &[2, 1]), 0.9999, WqPath::Quadrature, &spec)
            .unwrap()
            .value;
        assert!(lo <= s + 1e-3 && s <= hi + 1e-3, "{lo} {s} {hi}");
    }

    #[test]
    fn power_entropy_examples() {
        let spec = QuadratureSpec::default();
        // uniform circle: J_q = exp(log 2 pi) / (2 pi e) = 1/e
        let j = renyi_power_entropy(&state(2, &[9]), 2.0, WqPath::Exact, &spec).unwrap();
        assert!((j.value - (-1.0f64).exp()).abs() < 1e-13);

        let j = renyi_power_entropy(&state(3, &[0, 0]), 2.0, WqPath::Exact, &spec).unwrap();
        let want = (4.0 * PI).powf(2.0 / 3.0) / (2.0 * PI * std::f64::consts::E);
        assert!((j.value - want).abs() < 1e-13);

        let j = renyi_power_entropy(&state(3, &[1, 0]), 2.0, WqPath::Exact, &spec).unwrap();
        let want = (20.0 * PI / 9.0).powf(2.0 / 3.0) / (2.0 * PI * std::f64::consts::E);
        assert!((j.value - want).abs() < 1e-13);
    }

    #[test]
    fn complexity_anchors() {
        let spec = QuadratureSpec::default();
        // frozen independent recomputations
        let c = complexity_fisher_renyi(&state(3, &[1, 0]), 2.0, WqPath::Exact, &spec).unwrap();
        assert!((c.value - 1.7109627035811565).abs() < 1e-3);

        let c = complexity_fisher_shannon(&state(3, &[1, 0]), &spec).unwrap();
        assert!((c.value - 1.898283819784941).abs() < 1e-3);

        let c = complexity_lmc(&state(3, &[1, 0]), WqPath::Exact, &spec).unwrap();
        assert!((c.value - 0.6 * (2.0f64 / 3.0).exp()).abs() < 1e-6);

        // uniform densities sit exactly at the complexity floor
        for s in [state(3, &[0, 0]), state(5, &[0, 0, 0, 0]), state(2, &[4])] {
            assert!(complexity_fisher_shannon(&s, &spec).unwrap().value.abs() < 1e-9);
            let lmc = complexity_lmc(&s, WqPath::Exact, &spec).unwrap();
            assert!((lmc.value - 1.0).abs() < 1e-9, "{s}: {}", lmc.value);
        }
    }

    #[test]
    fn lmc_at_least_one_and_even_in_m() {
        let spec = QuadratureSpec::default();
        for l in 0..=6i64 {
            for m in 0..=l {
                let plus = complexity_lmc(&state(3, &[l, m]), WqPath::Exact, &spec).unwrap();
                let minus = complexity_lmc(&state(3, &[l, -m]), WqPath::Exact, &spec).unwrap();
                assert!(plus.value >= 1.0 - 1e-9, "C_LMC({l},{m}) = {}", plus.value);
                assert!((plus.value - minus.value).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn fisher_shannon_decreases_in_m() {
        let spec = QuadratureSpec::default();
        let values: Vec<f64> = (0..=4i64)
            .map(|m| {
                complexity_fisher_shannon(&state(3, &[4, m]), &spec)
                    .unwrap()
                    .value
            })
            .collect();
        for w in values.windows(2) {
            assert!(w[1] < w[0], "{values:?}");
        }
    }

    #[test]
    fn report_has_consistent_tags() {
        let spec = QuadratureSpec::default();
        let report = measure_report(&state(3, &[2, 1]), &[0.5, 2.0, 3.0], &spec, None).unwrap();
        assert_eq!(report.fisher.method, Method::ClosedForm);
        assert_eq!(report.shannon.method, Method::Quadrature);
        assert_eq!(report.disequilibrium.method, Method::Exact);
        let (q0, r0) = report.renyi.0[0];
        assert_eq!(q0, 0.5);
        assert_eq!(r0.method, Method::Quadrature);
        let (q1, r1) = report.renyi.0[1];
        assert_eq!(q1, 2.0);
        assert_eq!(r1.method, Method::Exact);
        assert!(report.c_lmc.value >= 1.0 - 1e-9);

        // forcing quadrature flips every moment-backed tag
        let forced =
            measure_report(&state(3, &[2, 1]), &[2.0], &spec, Some(WqPath::Quadrature)).unwrap();
        assert_eq!(forced.disequilibrium.method, Method::Quadrature);
        assert_eq!(forced.renyi.0[0].1.method, Method::Quadrature);
        let rel = (forced.disequilibrium.value - report.disequilibrium.value).abs()
            / report.disequilibrium.value;
        assert!(rel < 1e-9);
    }

    #[test]
    fn json_shape() {
        let spec = QuadratureSpec::default();
        let report = measure_report(&state(3, &[1, 0]), &[2.0], &spec, None).unwrap();
        let json = serde_json::to_value(&report).unwrap();
        assert_eq!(json["state"]["dimension"], 3);
        assert!((json["fisher"]["value"].as_f64().unwrap() - 8.0).abs() < 1e-12);
        assert_eq!(json["fisher"]["method"], "closed-form");
        assert!(json["renyi"]["2"]["value"].is_f64());
        assert!(json["c_fr"]["2"]["error"].is_f64());
    }
}
