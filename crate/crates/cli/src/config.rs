//! Declarative run configuration: a single JSON document with fail-fast
//! parsing (unknown keys are errors).

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub a: f64,
    pub d: usize,
    pub grid: GridConfig,
    pub time: TimeConfig,
    #[serde(default)]
    pub data: DataConfig,
    #[serde(default = "default_mu")]
    pub mu: MuConfig,
    #[serde(default = "default_p")]
    pub p: f64,
    #[serde(default)]
    pub exponents: ExponentConfig,
    #[serde(default)]
    pub solver: SolverConfig,
    #[serde(default)]
    pub seed: u64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    #[serde(rename = "Zmax")]
    pub zmax: f64,
    #[serde(rename = "Nz")]
    pub nz: usize,
    #[serde(rename = "Xmax")]
    pub xmax: f64,
    #[serde(rename = "Nx")]
    pub nx: usize,
    #[serde(default = "default_scheme")]
    pub scheme: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeConfig {
    #[serde(rename = "T")]
    pub t: f64,
    #[serde(rename = "Nt")]
    pub nt: usize,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DataConfig {
    #[serde(default)]
    pub u0: DatumConfig,
    #[serde(default = "DatumConfig::zero", rename = "F")]
    pub forcing: DatumConfig,
    #[serde(default = "DatumConfig::zero", rename = "Phi")]
    pub phi: DatumConfig,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum DatumConfig {
    Zero,
    Gaussian {
        #[serde(default = "one")]
        amp: f64,
        #[serde(default = "one")]
        xwidth: f64,
        #[serde(default = "one")]
        zwidth: f64,
        #[serde(default)]
        xcenter: f64,
        #[serde(default = "one")]
        twidth: f64,
        #[serde(default)]
        tcenter: f64,
    },
    /// The kink datum f(X) + z^{1-a}/(1-a) h(z).
    Fixture,
    File {
        path: String,
    },
}

impl Default for DatumConfig {
    fn default() -> Self {
        DatumConfig::Gaussian {
            amp: 1.0,
            xwidth: 1.0,
            zwidth: 1.0,
            xcenter: 0.0,
            twidth: 1.0,
            tcenter: 0.0,
        }
    }
}

impl DatumConfig {
    pub fn zero() -> Self {
        DatumConfig::Zero
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MuConfig {
    pub re: f64,
    pub im: f64,
}

fn default_mu() -> MuConfig {
    MuConfig { re: 1.0, im: 0.0 }
}
fn default_p() -> f64 {
    2.0
}
fn default_scheme() -> String {
    "bessel_collocation".into()
}
fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExponentConfig {
    pub q: Option<f64>,
    pub r: Option<f64>,
    pub m: Option<f64>,
    pub q_inf: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverConfig {
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default = "default_max_iter")]
    pub max_iter: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            tol: default_tol(),
            max_iter: default_max_iter(),
        }
    }
}

fn default_tol() -> f64 {
    1e-8
}
fn default_max_iter() -> usize {
    40
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_and_rejects_unknown_keys() {
        let good = r#"{
            "a": 0.0, "d": 1,
            "grid": {"Zmax": 8.0, "Nz": 64, "Xmax": 10.0, "Nx": 32},
            "time": {"T": 1.0, "Nt": 16},
            "data": {"u0": {"type": "gaussian", "amp": 0.25}},
            "mu": {"re": 1.0, "im": 0.0},
            "p": 2.0,
            "seed": 7
        }"#;
        let cfg: Config = serde_json::from_str(good).unwrap();
        assert_eq!(cfg.grid.nz, 64);
        assert!(matches!(cfg.data.forcing, DatumConfig::Zero));
        let bad = r#"{"a": 0.0, "d": 1, "grid": {"Zmax": 8.0, "Nz": 64, "Xmax": 10.0, "Nx": 32},
                      "time": {"T": 1.0, "Nt": 16}, "bogus": 1}"#;
        assert!(serde_json::from_str::<Config>(bad).is_err());
    }
}
