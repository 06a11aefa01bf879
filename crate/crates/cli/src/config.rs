//! JSON run configuration for `solve`.
//!
//! ```json
//! {
//!   "problem": { "data": { "kind": "piecewise_constant", "faces": [0, 0, 0, 0, 0, 1] } },
//!   "collocation": { "n": 5 },
//!   "backend": { "kind": "mfs", "alpha": 3.0 },
//!   "quadrature": { "base_k": 16 },
//!   "outputs": { "solution": "hot.sol", "report": "hot.json" },
//!   "evaluations": { "points": [[0.5, 0.5, 0.5]], "output": "points.csv" }
//! }
//! ```
//!
//! Unknown keys are rejected. Relative paths are taken relative to the
//! working directory.

use std::path::{Path, PathBuf};

use serde::Deserialize;
use sr_dirichlet::pipeline::{BackendSpec, ProblemSpec};
use sr_dirichlet::quadrature::DEFAULT_BASE_K;
use sr_dirichlet::{BoundaryData, Point3};

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub problem: ProblemSection,
    pub collocation: CollocationSection,
    pub backend: BackendSpec,
    #[serde(default)]
    pub quadrature: QuadratureSection,
    pub outputs: OutputSection,
    #[serde(default)]
    pub evaluations: Option<EvaluationSection>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemSection {
    pub data: BoundaryData,
    #[serde(default = "yes")]
    pub estimate_error: bool,
}

fn yes() -> bool {
    true
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CollocationSection {
    pub n: usize,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuadratureSection {
    pub base_k: usize,
}

impl Default for QuadratureSection {
    fn default() -> Self {
        QuadratureSection { base_k: DEFAULT_BASE_K }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    pub solution: PathBuf,
    pub report: Option<PathBuf>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvaluationSection {
    pub points: Vec<[f64; 3]>,
    pub output: PathBuf,
}

impl Config {
    pub fn load(path: &Path) -> Result<Self, String> {
        let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
        let config: Config = serde_json::from_str(&text).map_err(|e| format!("{}: {e}", path.display()))?;
        config.problem_spec().validate().map_err(|e| e.to_string())?;
        if let Some(ev) = &config.evaluations {
            if let Some(p) = ev.points.iter().find(|p| p.iter().any(|c| !c.is_finite())) {
                return Err(format!("evaluation point {p:?} is not finite"));
            }
        }
        Ok(config)
    }

    pub fn problem_spec(&self) -> ProblemSpec {
        let mut spec = ProblemSpec::new(self.problem.data.clone(), self.collocation.n, self.backend.clone());
        spec.base_k = self.quadrature.base_k;
        spec.estimate_error = self.problem.estimate_error;
        spec
    }

    pub fn evaluation_points(&self) -> Vec<Point3> {
        self.evaluations
            .iter()
            .flat_map(|e| e.points.iter().map(|&p| Point3::from_array(p)))
            .collect()
    }
}
