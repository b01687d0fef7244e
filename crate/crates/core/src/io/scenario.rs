use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::diversity::{Attribute, Consumer, ConsumerPanel, DiversityModel, Technology};
use crate::dynamics::{
    Protocol, DEFAULT_CLOCK_RATE, DEFAULT_DT, DEFAULT_T_MAX, DEFAULT_TOL, DEFAULT_WINDOW,
};
use crate::error::{Error, Result};
use crate::game::{GameMatrix, PopulationState};
use crate::schumpeter::{params_from_diversity, MarketValueMap, SchumpeterParams};

/// Parsed and validated scenario file.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub diversity: Option<DiversitySection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub game: Option<GameSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub schumpeter: Option<SchumpeterSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dynamics: Option<DynamicsSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepSection>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiversitySection {
    pub technologies: Vec<TechnologyEntry>,
    pub attributes: Vec<AttributeEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub panel: Option<Vec<ConsumerEntry>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TechnologyEntry {
    pub id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AttributeEntry {
    pub id: String,
    pub members: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weight: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConsumerEntry {
    pub mass: f64,
    #[serde(default)]
    pub valuations: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GameSection {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

/// Either explicit `alpha`/`beta` or a `from_diversity` block.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SchumpeterSection {
    pub pi: f64,
    pub cost: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub from_diversity: Option<FromDiversity>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FromDiversity {
    pub old: String,
    pub new: String,
    pub f: MarketValueMap,
    pub ft: MarketValueMap,
}

fn default_protocol() -> Protocol {
    Protocol::Ppi
}
fn default_x0() -> f64 {
    0.5
}
fn default_t_max() -> f64 {
    DEFAULT_T_MAX
}
fn default_dt() -> f64 {
    DEFAULT_DT
}
fn default_n() -> u64 {
    1000
}
fn default_clock_rate() -> f64 {
    DEFAULT_CLOCK_RATE
}
fn default_tol() -> f64 {
    DEFAULT_TOL
}
fn default_window() -> f64 {
    DEFAULT_WINDOW
}

/// Simulation settings; every field has a default.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DynamicsSection {
    #[serde(default = "default_protocol")]
    pub protocol: Protocol,
    #[serde(default = "default_x0")]
    pub x0: f64,
    #[serde(default = "default_t_max")]
    pub t_max: f64,
    /// Integration step, and the sampling interval of stochastic runs.
    #[serde(default = "default_dt")]
    pub dt: f64,
    #[serde(rename = "N", default = "default_n")]
    pub n: u64,
    #[serde(default = "default_clock_rate")]
    pub clock_rate: f64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub stochastic: bool,
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default = "default_window")]
    pub window: f64,
}

impl Default for DynamicsSection {
    fn default() -> Self {
        Self {
            protocol: default_protocol(),
            x0: default_x0(),
            t_max: default_t_max(),
            dt: default_dt(),
            n: default_n(),
            clock_rate: default_clock_rate(),
            seed: 0,
            stochastic: false,
            tol: default_tol(),
            window: default_window(),
        }
    }
}

impl DynamicsSection {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Validation(msg));
        if !(0.0..=1.0).contains(&self.x0) {
            return bad(format!("dynamics.x0 = {} must lie in [0, 1]", self.x0));
        }
        for (name, v) in [
            ("t_max", self.t_max),
            ("dt", self.dt),
            ("clock_rate", self.clock_rate),
            ("tol", self.tol),
            ("window", self.window),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return bad(format!("dynamics.{name} = {v} must be positive"));
            }
        }
        if self.dt > self.t_max {
            return bad(format!(
                "dynamics.dt = {} exceeds t_max = {}",
                self.dt, self.t_max
            ));
        }
        if self.n == 0 {
            return bad("dynamics.N must be at least 1".into());
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub min: f64,
    pub max: f64,
    pub n: usize,
}

impl GridSpec {
    /// `n` evenly spaced points from `min` to `max`.
    pub fn values(&self) -> Vec<f64> {
        if self.n == 1 {
            return vec![self.min];
        }
        let step = (self.max - self.min) / (self.n - 1) as f64;
        (0..self.n)
            .map(|k| {
                if k + 1 == self.n {
                    self.max
                } else {
                    self.min + k as f64 * step
                }
            })
            .collect()
    }

    fn validate(&self, name: &str) -> Result<()> {
        if !(self.min.is_finite() && self.max.is_finite()) {
            return Err(Error::Validation(format!("sweep.{name} bounds must be finite")));
        }
        if self.n == 0 {
            return Err(Error::Validation(format!("sweep.{name}.n must be at least 1")));
        }
        if self.n > 1 && self.max <= self.min {
            return Err(Error::Validation(format!(
                "sweep.{name} needs max > min for n > 1"
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    pub alpha: GridSpec,
    pub beta: GridSpec,
    pub xi: f64,
}

/// Strict parse of scenario text followed by semantic validation.
pub fn parse_scenario(text: &str) -> Result<Scenario> {
    let scenario: Scenario = serde_json::from_str(text).map_err(|e| Error::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    scenario.validate()?;
    Ok(scenario)
}

fn validation(e: Error) -> Error {
    match e {
        Error::Domain(m) | Error::Constraint(m) | Error::DegenerateMatrix(m) => Error::Validation(m),
        other => other,
    }
}

impl Scenario {
    pub fn validate(&self) -> Result<()> {
        if self.game.is_some() && self.schumpeter.is_some() {
            return Err(Error::Validation(
                "give either a game or a schumpeter section, not both".into(),
            ));
        }
        self.diversity_model()?;
        if let Some(g) = &self.game {
            GameMatrix::new(g.a, g.b, g.c, g.d).map_err(validation)?;
        }
        self.schumpeter_params()?;
        if let Some(d) = &self.dynamics {
            d.validate()?;
        }
        if let Some(s) = &self.sweep {
            s.alpha.validate("alpha")?;
            s.beta.validate("beta")?;
            if !s.xi.is_finite() {
                return Err(Error::Validation("sweep.xi must be finite".into()));
            }
        }
        Ok(())
    }

    /// Canonical pretty-printed JSON; parses back to an equal scenario.
    pub fn to_canonical_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("scenario serialises");
        s.push('\n');
        s
    }

    /// Non-fatal issues worth reporting to the user.
    pub fn warnings(&self) -> Vec<String> {
        let mut out = Vec::new();
        if let Some(div) = &self.diversity {
            if div.panel.is_some() && div.attributes.iter().any(|a| a.weight.is_some()) {
                out.push(
                    "diversity section has both a panel and direct weights; using the panel".into(),
                );
            }
        }
        if let Some(d) = &self.dynamics {
            if d.protocol == Protocol::Ppi && (d.x0 == 0.0 || d.x0 == 1.0) {
                out.push(format!(
                    "x0 = {} is monomorphic; imitation cannot leave it",
                    d.x0
                ));
            }
        }
        out
    }

    pub fn diversity_model(&self) -> Result<Option<DiversityModel>> {
        let Some(div) = &self.diversity else {
            return Ok(None);
        };
        let catalog = div
            .technologies
            .iter()
            .map(|t| Technology {
                id: t.id.clone(),
                label: t.label.clone(),
            })
            .collect();
        let attributes: Vec<Attribute> = div
            .attributes
            .iter()
            .map(|a| Attribute::new(a.id.clone(), a.members.iter().cloned()))
            .collect();
        let model = match &div.panel {
            Some(panel) => {
                let consumers = panel
                    .iter()
                    .map(|c| Consumer {
                        mass: c.mass,
                        valuations: c.valuations.clone(),
                    })
                    .collect();
                let panel = ConsumerPanel::new(consumers)?;
                DiversityModel::from_panel(catalog, attributes, &panel)
            }
            None => {
                let mut weights = BTreeMap::new();
                for a in &div.attributes {
                    let w = a.weight.ok_or_else(|| {
                        Error::Validation(format!(
                            "attribute {:?} needs a weight when no panel is given",
                            a.id
                        ))
                    })?;
                    weights.insert(a.id.clone(), w);
                }
                DiversityModel::with_weights(catalog, attributes, &weights)
            }
        };
        model.map(Some).map_err(validation)
    }

    pub fn schumpeter_params(&self) -> Result<Option<SchumpeterParams>> {
        let Some(s) = &self.schumpeter else {
            return Ok(None);
        };
        let params = match (&s.from_diversity, s.alpha, s.beta) {
            (None, Some(alpha), Some(beta)) => SchumpeterParams::new(s.pi, s.cost, alpha, beta),
            (Some(fd), None, None) => {
                let model = self.diversity_model()?.ok_or_else(|| {
                    Error::Validation("schumpeter.from_diversity needs a diversity section".into())
                })?;
                params_from_diversity(&model, &fd.old, &fd.new, &fd.f, &fd.ft, s.pi, s.cost)
            }
            _ => {
                return Err(Error::Validation(
                    "schumpeter section needs either alpha and beta, or from_diversity".into(),
                ))
            }
        };
        params.map(Some).map_err(validation)
    }

    /// Matrix for simulation commands, from `game` or built from `schumpeter`.
    pub fn matrix(&self) -> Result<GameMatrix> {
        if let Some(g) = &self.game {
            return GameMatrix::new(g.a, g.b, g.c, g.d).map_err(validation);
        }
        match self.schumpeter_params()? {
            Some(p) => p.build_game(),
            None => Err(Error::Validation(
                "scenario has neither a game nor a schumpeter section".into(),
            )),
        }
    }

    pub fn dynamics_or_default(&self) -> DynamicsSection {
        self.dynamics.clone().unwrap_or_default()
    }

    pub fn initial_state(&self) -> Result<PopulationState> {
        PopulationState::new(self.dynamics_or_default().x0).map_err(validation)
    }
}
