//! CSV, JSON and gnuplot emitters.

use std::path::Path;

use num_complex::Complex64;
use pauliflow::linalg::Matrix;
use pauliflow::maps::{CorrelatedContext, CpStatus, DynamicalMap, MapContext};
use pauliflow::{BlochVector, CanonicalCoupling, OptResult, Trajectory};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

pub const CSV_HEADER: [&str; 11] =
    ["t", "a1", "a2", "a3", "b1", "b2", "b3", "purity_A", "purity_B", "entanglement", "global_purity"];

/// 17 significant digits.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn trajectory_csv(traj: &Trajectory) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(CSV_HEADER).expect("write to memory");
    for s in traj {
        let mut row: Vec<String> = Vec::with_capacity(11);
        row.push(fmt_f64(s.t));
        row.extend(s.bloch_a.0.iter().chain(&s.bloch_b.0).map(|&x| fmt_f64(x)));
        row.push(fmt_f64(s.purity_a));
        row.push(fmt_f64(s.purity_b));
        row.push(s.entanglement.map(fmt_f64).unwrap_or_default());
        row.push(fmt_f64(s.global_purity));
        w.write_record(&row).expect("write to memory");
    }
    String::from_utf8(w.into_inner().expect("flush to memory")).expect("ascii output")
}

pub fn curve_csv(curve: &[(f64, f64)]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["parameter", "value"]).expect("write to memory");
    for &(t, v) in curve {
        w.write_record([fmt_f64(t), fmt_f64(v)]).expect("write to memory");
    }
    String::from_utf8(w.into_inner().expect("flush to memory")).expect("ascii output")
}

/// Plot script for a trajectory CSV: both purities and, where defined, the
/// entanglement.
pub fn trajectory_gnuplot(csv: &Path) -> String {
    let name = csv.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
    format!(
        "set datafile separator ','\n\
         set key autotitle columnhead\n\
         set xlabel 't'\n\
         set ylabel 'purity'\n\
         set yrange [0:1.05]\n\
         plot '{name}' using 1:8 with lines title 'P^A', \\\n\
         \x20    '' using 1:9 with lines title 'P^B', \\\n\
         \x20    '' using 1:10 with lines dashtype 2 title 'entanglement'\n\
         pause mouse close\n"
    )
}

pub fn curve_gnuplot(csv: &Path) -> String {
    let name = csv.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
    format!(
        "set datafile separator ','\n\
         set key autotitle columnhead\n\
         set xlabel 'free parameter'\n\
         set ylabel 'objective'\n\
         plot '{name}' using 1:2 with lines title 'objective'\n\
         pause mouse close\n"
    )
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ContextJson {
    Separable { environment: [f64; 3], gamma: [f64; 3], interval: [f64; 2] },
    Correlated { environment: [f64; 3], correlations: [[f64; 3]; 3], gamma: [f64; 3], interval: [f64; 2] },
    Composite { parts: usize },
    Explicit,
}

impl From<&MapContext> for ContextJson {
    fn from(c: &MapContext) -> Self {
        match c {
            MapContext::Separable { environment, coupling, interval } => ContextJson::Separable {
                environment: environment.0,
                gamma: coupling.gamma,
                interval: [interval.0, interval.1],
            },
            MapContext::Correlated { context, coupling, interval } => ContextJson::Correlated {
                environment: context.environment.0,
                correlations: context.correlations,
                gamma: coupling.gamma,
                interval: [interval.0, interval.1],
            },
            MapContext::Composite { parts } => ContextJson::Composite { parts: *parts },
            MapContext::Explicit => ContextJson::Explicit,
        }
    }
}

impl From<ContextJson> for MapContext {
    fn from(c: ContextJson) -> Self {
        match c {
            ContextJson::Separable { environment, gamma, interval } => MapContext::Separable {
                environment: BlochVector(environment),
                coupling: CanonicalCoupling { gamma },
                interval: (interval[0], interval[1]),
            },
            ContextJson::Correlated { environment, correlations, gamma, interval } => MapContext::Correlated {
                context: CorrelatedContext { environment: BlochVector(environment), correlations },
                coupling: CanonicalCoupling { gamma },
                interval: (interval[0], interval[1]),
            },
            ContextJson::Composite { parts } => MapContext::Composite { parts },
            ContextJson::Explicit => MapContext::Explicit,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MapJson {
    /// Row-major `[re, im]` pairs.
    pub b_matrix: [[[f64; 2]; 4]; 4],
    /// Ascending.
    pub eigenvalues: [f64; 4],
    pub cp: bool,
    pub cp_status: String,
    pub context: ContextJson,
}

fn status_name(s: CpStatus) -> &'static str {
    match s {
        CpStatus::CompletelyPositive => "completely_positive",
        CpStatus::NotCompletelyPositive => "not_completely_positive",
        CpStatus::Unchecked => "unchecked",
    }
}

impl MapJson {
    pub fn from_map(m: &DynamicalMap) -> Result<Self, CliError> {
        let eigenvalues = m.eigenvalues()?;
        let b = m.b_form();
        Ok(MapJson {
            b_matrix: std::array::from_fn(|i| std::array::from_fn(|j| [b.0[i][j].re, b.0[i][j].im])),
            eigenvalues,
            cp: eigenvalues[0] >= -pauliflow::maps::CP_TOL,
            cp_status: status_name(m.cp_status()).to_string(),
            context: m.context().into(),
        })
    }

    pub fn to_map(&self) -> Result<DynamicalMap, CliError> {
        let b = Matrix(std::array::from_fn(|i| {
            std::array::from_fn(|j| Complex64::new(self.b_matrix[i][j][0], self.b_matrix[i][j][1]))
        }));
        Ok(DynamicalMap::from_b_form(b, self.context.clone().into()).with_cp_checked()?)
    }
}

pub fn map_json(m: &DynamicalMap) -> Result<String, CliError> {
    Ok(serde_json::to_string_pretty(&MapJson::from_map(m)?).expect("serializable") + "\n")
}

pub fn parse_map_json(text: &str) -> Result<DynamicalMap, CliError> {
    let parsed: MapJson = serde_json::from_str(text).map_err(|e| CliError::Config(format!("map JSON: {e}")))?;
    parsed.to_map()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OptResultJson {
    pub best_params: Vec<f64>,
    pub best_value: f64,
    pub degenerate_optima: Vec<Vec<f64>>,
    /// Path of the curve CSV, when one was written.
    pub curve: Option<String>,
    pub flat: bool,
}

impl OptResultJson {
    pub fn new(res: &OptResult, curve: Option<&Path>) -> Self {
        OptResultJson {
            best_params: res.best_params.clone(),
            best_value: res.best_value,
            degenerate_optima: res.degenerate_optima().to_vec(),
            curve: curve.map(|p| p.display().to_string()),
            flat: res.flat,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BellJson {
    pub t_bell: Option<f64>,
    #[serde(rename = "E_max")]
    pub e_max: Option<f64>,
    pub degenerate: bool,
}

pub fn to_json<T: Serialize>(v: &T) -> String {
    serde_json::to_string_pretty(v).expect("serializable") + "\n"
}

#[cfg(test)]
mod tests {
    use super::*;
    use pauliflow::{build_map_general, build_map_separable, purity_swap_demo, SWAP_DEMO_COUPLING};

    #[test]
    fn csv_header_and_row_shape() {
        let traj = purity_swap_demo(&SWAP_DEMO_COUPLING, 0.02, 0.01).unwrap();
        let text = trajectory_csv(&traj);
        let lines: Vec<_> = text.lines().collect();
        assert_eq!(lines[0], "t,a1,a2,a3,b1,b2,b3,purity_A,purity_B,entanglement,global_purity");
        assert_eq!(lines.len(), 4);
        let first: Vec<_> = lines[1].split(',').collect();
        assert_eq!(first.len(), 11);
        assert_eq!(first[7].parse::<f64>().unwrap(), 1.0);
        // Mixed partner: global purity below 1, entanglement column empty.
        assert_eq!(first[9], "");
    }

    #[test]
    fn seventeen_digits_round_trip() {
        for x in [std::f64::consts::PI, 1.0 / 3.0, -2.5e-17, 0.0] {
            assert_eq!(fmt_f64(x).parse::<f64>().unwrap(), x);
        }
    }

    #[test]
    fn map_json_round_trips() {
        let m = build_map_separable(&BlochVector::new(0.1, -0.2, 0.3), &CanonicalCoupling::new(0.5, 1.0, -0.7), 0.9);
        let back = parse_map_json(&map_json(&m).unwrap()).unwrap();
        assert_eq!(back, m);

        let ctx = CorrelatedContext {
            environment: BlochVector::ZERO,
            correlations: [[0.0, 1.0, 0.0], [0.0, 0.0, 1.0], [-1.0, 0.0, 0.0]],
        };
        let m = build_map_general(&ctx, &CanonicalCoupling::new(1.0, 0.0, 0.0), 0.3);
        let json = MapJson::from_map(&m).unwrap();
        assert!(!json.cp);
        assert_eq!(parse_map_json(&to_json(&json)).unwrap(), m);
    }
}
