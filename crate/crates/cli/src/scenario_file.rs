//! The JSON scenario format.

use serde::{Deserialize, Serialize};

use explab_core::hypothesis::HypothesisClassSpec;
use explab_core::piecewise::{Density, Interval, StepFunction};
use explab_core::structure::Scenario;

use crate::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub domain: [f64; 2],
    pub density: DensitySpec,
    pub ground_truth: GroundTruthSpec,
    pub class: HypothesisClassSpec,
    pub delta: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DensitySpec {
    pub breakpoints: Vec<f64>,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroundTruthSpec {
    pub breakpoints: Vec<f64>,
    pub first_value: u8,
}

fn at(path: &str) -> impl Fn(explab_core::Error) -> CliError + '_ {
    move |e| CliError::Input(format!("{path}: {e}"))
}

impl ScenarioFile {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let de = &mut serde_json::Deserializer::from_str(text);
        serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            let inner = e.into_inner();
            if path == "." || path.is_empty() {
                CliError::Input(inner.to_string())
            } else {
                CliError::Input(format!("{path}: {inner}"))
            }
        })
    }

    pub fn load(path: &std::path::Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn to_scenario(&self) -> Result<Scenario, CliError> {
        let domain = Interval::new(self.domain[0], self.domain[1]).map_err(at("domain"))?;
        let density = Density::new(
            domain,
            self.density.breakpoints.clone(),
            self.density.values.clone(),
        )
        .map_err(at("density"))?;
        let first_value = match self.ground_truth.first_value {
            0 => false,
            1 => true,
            v => {
                return Err(CliError::Input(format!(
                    "ground_truth.first_value: expected 0 or 1, got {v}"
                )))
            }
        };
        let truth = StepFunction::new(domain, self.ground_truth.breakpoints.clone(), first_value)
            .map_err(at("ground_truth.breakpoints"))?;
        if let HypothesisClassSpec::KBoundary { k } = self.class {
            HypothesisClassSpec::k_boundary(k).map_err(at("class.k"))?;
        }
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return Err(CliError::Input(format!(
                "delta: must lie in (0, 1), got {}",
                self.delta
            )));
        }
        Scenario::new(density, truth, self.class, self.delta).map_err(at("scenario"))
    }

    pub fn from_scenario(sc: &Scenario) -> Self {
        let domain = sc.domain();
        Self {
            domain: [domain.lo(), domain.hi()],
            density: DensitySpec {
                breakpoints: sc.density().breakpoints().to_vec(),
                values: sc.density().densities().to_vec(),
            },
            ground_truth: GroundTruthSpec {
                breakpoints: sc.ground_truth().breakpoints().to_vec(),
                first_value: u8::from(sc.ground_truth().first_value()),
            },
            class: sc.class_spec(),
            delta: sc.delta(),
        }
    }
}
