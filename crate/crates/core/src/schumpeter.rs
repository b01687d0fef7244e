//! The innovate (I) / refrain (R) game and its polymorphic equilibrium.
//!
//! Firms either pay `cost` to adopt a relevant innovation `y'` or keep the old
//! technology `y`. Market values enter through `pi` (old market value),
//! `alpha` (value added by `y'`) and `beta` (value of old attributes lost when
//! only `y'` is used). Strategy 1 is I, strategy 2 is R.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::diversity::DiversityModel;
use crate::error::{Error, Result};
use crate::game::{GameMatrix, PopulationState};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SchumpeterParams {
    pi: f64,
    cost: f64,
    alpha: f64,
    beta: f64,
}

impl SchumpeterParams {
    pub fn new(pi: f64, cost: f64, alpha: f64, beta: f64) -> Result<Self> {
        if ![pi, cost, alpha, beta].iter().all(|v| v.is_finite()) {
            return Err(Error::Constraint(format!(
                "parameters must be finite, got pi={pi}, cost={cost}, alpha={alpha}, beta={beta}"
            )));
        }
        if pi <= 0.0 {
            return Err(Error::Constraint(format!("market value pi = {pi} must be positive")));
        }
        if cost <= 0.0 {
            return Err(Error::Constraint(format!(
                "innovation cost = {cost} must be positive"
            )));
        }
        if beta < 0.0 {
            return Err(Error::Constraint(format!("beta = {beta} must be nonnegative")));
        }
        if alpha <= beta {
            return Err(Error::Constraint(format!(
                "market value with the innovation must exceed the value without it: \
                 need alpha > beta >= 0, got alpha = {alpha}, beta = {beta}"
            )));
        }
        Ok(Self {
            pi,
            cost,
            alpha,
            beta,
        })
    }

    pub fn pi(&self) -> f64 {
        self.pi
    }
    pub fn cost(&self) -> f64 {
        self.cost
    }
    pub fn alpha(&self) -> f64 {
        self.alpha
    }
    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// Reduced cost parameter `ξ = 2c − π`.
    pub fn xi(&self) -> f64 {
        2.0 * self.cost - self.pi
    }

    /// Payoff matrix with I as strategy 1 and R as strategy 2.
    pub fn build_game(&self) -> Result<GameMatrix> {
        let gross = self.pi + self.alpha - self.beta;
        let a = gross / 2.0 - self.cost;
        let b = gross - self.cost;
        let c = self.beta;
        let d = self.pi / 2.0;
        GameMatrix::new(a, b, c, d).map_err(|e| {
            Error::DegenerateMatrix(format!(
                "{e}; the parameters sit on the boundary of the Schumpeterian region"
            ))
        })
    }

    /// The two strict inequalities that make the game anti-coordination.
    pub fn check(&self) -> SchumpeterCheck {
        let half_pi = self.pi / 2.0;
        SchumpeterCheck {
            innovation_self_limiting: half_pi + (self.alpha - self.beta) / 2.0
                < self.beta + self.cost,
            innovation_profitable: half_pi + self.alpha > self.beta + self.cost,
        }
    }

    pub fn is_schumpeterian(&self) -> bool {
        self.check().holds()
    }

    /// Closed-form rates of innovators and imitators at the polymorphic ESS.
    pub fn schumpeterian_state(&self) -> Result<SchumpeterianState> {
        let check = self.check();
        if let Some(reason) = check.violation() {
            return Err(Error::Domain(format!("not a Schumpeterian game: {reason}")));
        }
        let denom = self.alpha + self.beta;
        let innovators = (self.pi + 2.0 * (self.alpha - self.beta - self.cost)) / denom;
        let imitators = (2.0 * self.cost - self.alpha - self.pi + 3.0 * self.beta) / denom;
        Ok(SchumpeterianState {
            innovators,
            imitators,
        })
    }

    /// Innovator payoff at innovator share `x_i`.
    pub fn innovator_payoff(&self, x_i: f64) -> f64 {
        let gross = self.pi + self.alpha - self.beta;
        gross - self.cost - gross / 2.0 * x_i
    }

    /// Imitator payoff at innovator share `x_i`.
    pub fn imitator_payoff(&self, x_i: f64) -> f64 {
        (self.beta - self.pi / 2.0) * x_i + self.pi / 2.0
    }
}

impl fmt::Display for SchumpeterParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "pi={}, cost={}, alpha={}, beta={}",
            self.pi, self.cost, self.alpha, self.beta
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SchumpeterCheck {
    /// `π/2 + (α−β)/2 < β + c`: innovating against innovators pays less than
    /// refraining against them.
    pub innovation_self_limiting: bool,
    /// `π/2 + α > β + c`: innovating against imitators pays more than
    /// imitating against imitators.
    pub innovation_profitable: bool,
}

impl SchumpeterCheck {
    pub fn holds(&self) -> bool {
        self.innovation_self_limiting && self.innovation_profitable
    }

    pub fn violation(&self) -> Option<&'static str> {
        if !self.innovation_self_limiting {
            Some("pi/2 + (alpha - beta)/2 < beta + cost fails")
        } else if !self.innovation_profitable {
            Some("pi/2 + alpha > beta + cost fails")
        } else {
            None
        }
    }
}

/// Innovator and imitator rates at the polymorphic ESS.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SchumpeterianState {
    pub innovators: f64,
    pub imitators: f64,
}

impl SchumpeterianState {
    pub fn as_population(&self) -> PopulationState {
        PopulationState::clamped(self.innovators)
    }
}

/// Increasing map from a dissimilarity to a market-value change, with `f(0) = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum MarketValueMap {
    /// `k·δ`
    Linear { k: f64 },
    /// `k·δ^γ`
    Power { k: f64, gamma: f64 },
    /// `k·δ/(s + δ)`
    Saturating { k: f64, s: f64 },
}

impl MarketValueMap {
    pub fn validate(&self) -> Result<()> {
        let params: &[(&str, f64)] = match self {
            MarketValueMap::Linear { k } => &[("k", *k)],
            MarketValueMap::Power { k, gamma } => &[("k", *k), ("gamma", *gamma)],
            MarketValueMap::Saturating { k, s } => &[("k", *k), ("s", *s)],
        };
        for (name, v) in params {
            if !(v.is_finite() && *v > 0.0) {
                return Err(Error::Validation(format!(
                    "market value map parameter {name} = {v} must be positive"
                )));
            }
        }
        Ok(())
    }

    pub fn eval(&self, delta: f64) -> f64 {
        match *self {
            MarketValueMap::Linear { k } => k * delta,
            MarketValueMap::Power { k, gamma } => k * delta.powf(gamma),
            MarketValueMap::Saturating { k, s } => k * delta / (s + delta),
        }
    }
}

/// Market parameters induced by replacing `old` with its innovation `new`.
#[allow(clippy::too_many_arguments)]
pub fn params_from_diversity(
    model: &DiversityModel,
    old: &str,
    new: &str,
    f: &MarketValueMap,
    ft: &MarketValueMap,
    pi: f64,
    cost: f64,
) -> Result<SchumpeterParams> {
    f.validate()?;
    ft.validate()?;
    if !model.is_relevant_innovation(new, old)? {
        return Err(Error::Domain(format!(
            "{new:?} is not a relevant innovation of {old:?}"
        )));
    }
    let alpha = f.eval(model.dissimilarity(new, old)?);
    let beta = ft.eval(model.dissimilarity(old, new)?);
    SchumpeterParams::new(pi, cost, alpha, beta)
}

/// `(α, β)` admissible for fixed `ξ`: `α > 0` and `α/3 − ξ/3 < β < α − ξ/2`.
pub fn in_domain(alpha: f64, beta: f64, xi: f64) -> bool {
    alpha > 0.0 && alpha / 3.0 - xi / 3.0 < beta && beta < alpha - xi / 2.0
}

fn require_domain(alpha: f64, beta: f64, xi: f64) -> Result<()> {
    if in_domain(alpha, beta, xi) {
        Ok(())
    } else {
        Err(Error::Domain(format!(
            "(alpha, beta) = ({alpha}, {beta}) is outside the admissible region for xi = {xi}"
        )))
    }
}

/// Innovator rate `(2(α−β) − ξ)/(α+β)` as a function of `(α, β)` at fixed `ξ`.
pub fn gamma(alpha: f64, beta: f64, xi: f64) -> Result<f64> {
    require_domain(alpha, beta, xi)?;
    Ok((2.0 * (alpha - beta) - xi) / (alpha + beta))
}

/// `(∂Γ/∂α, ∂Γ/∂β)`.
pub fn gamma_gradient(alpha: f64, beta: f64, xi: f64) -> Result<(f64, f64)> {
    require_domain(alpha, beta, xi)?;
    let s2 = (alpha + beta).powi(2);
    Ok(((4.0 * beta + xi) / s2, (xi - 4.0 * alpha) / s2))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub alpha: f64,
    pub beta: f64,
    pub xi: f64,
    pub in_domain: bool,
    pub innovators: Option<f64>,
    pub d_alpha: Option<f64>,
    pub d_beta: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct SweepResult {
    pub rows: Vec<SweepRow>,
}

fn check_grid(name: &str, grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::domain(format!("{name} grid is empty")));
    }
    if grid.iter().any(|v| !v.is_finite()) || grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::domain(format!(
            "{name} grid must be finite and strictly increasing"
        )));
    }
    Ok(())
}

/// Evaluates `Γ` and its gradient on `alphas × betas`, alpha-major.
pub fn sweep(alphas: &[f64], betas: &[f64], xi: f64) -> Result<SweepResult> {
    check_grid("alpha", alphas)?;
    check_grid("beta", betas)?;
    let rows = alphas
        .iter()
        .flat_map(|&alpha| betas.iter().map(move |&beta| (alpha, beta)))
        .map(|(alpha, beta)| {
            let ok = in_domain(alpha, beta, xi);
            let grad = gamma_gradient(alpha, beta, xi).ok();
            SweepRow {
                alpha,
                beta,
                xi,
                in_domain: ok,
                innovators: gamma(alpha, beta, xi).ok(),
                d_alpha: grad.map(|g| g.0),
                d_beta: grad.map(|g| g.1),
            }
        })
        .collect();
    Ok(SweepResult { rows })
}

#[cfg(test)]
mod tests {
    use std::collections::BTreeMap;

    use super::*;
    use crate::diversity::{Attribute, Technology};
    use crate::game::GameKind;

    fn f1() -> DiversityModel {
        let weights: BTreeMap<String, f64> = [("A1", 0.5), ("A2", 0.2), ("A3", 0.4)]
            .into_iter()
            .map(|(k, v)| (k.to_string(), v))
            .collect();
        DiversityModel::with_weights(
            vec![Technology::new("y"), Technology::new("yp")],
            vec![
                Attribute::new("A1", ["y", "yp"]),
                Attribute::new("A2", ["y"]),
                Attribute::new("A3", ["yp"]),
            ],
            &weights,
        )
        .unwrap()
    }

    fn p(pi: f64, cost: f64, alpha: f64, beta: f64) -> SchumpeterParams {
        SchumpeterParams::new(pi, cost, alpha, beta).unwrap()
    }

    #[test]
    fn params_from_fixture() {
        let lin10 = MarketValueMap::Linear { k: 10.0 };
        let params = params_from_diversity(&f1(), "y", "yp", &lin10, &lin10, 2.0, 1.0).unwrap();
        assert!((params.alpha() - 4.0).abs() < 1e-12);
        assert!((params.beta() - 2.0).abs() < 1e-12);

        let err = params_from_diversity(
            &f1(),
            "y",
            "yp",
            &MarketValueMap::Linear { k: 1.0 },
            &MarketValueMap::Linear { k: 3.0 },
            2.0,
            1.0,
        )
        .unwrap_err();
        assert!(matches!(err, Error::Constraint(_)), "{err}");

        let err = params_from_diversity(&f1(), "yp", "y", &lin10, &lin10, 2.0, 1.0).unwrap_err();
        assert!(matches!(err, Error::Domain(_)));
    }

    #[test]
    fn forgone_value_vanishes_when_nothing_is_lost() {
        let weights: BTreeMap<String, f64> = [("A1", 0.5), ("A3", 0.4)]
            .into_iter()
            .map(|(k, v)| (k.to_string(), v))
            .collect();
        let model = DiversityModel::with_weights(
            vec![Technology::new("y"), Technology::new("yp")],
            vec![Attribute::new("A1", ["y", "yp"]), Attribute::new("A3", ["yp"])],
            &weights,
        )
        .unwrap();
        for ft in [
            MarketValueMap::Linear { k: 3.0 },
            MarketValueMap::Power { k: 2.0, gamma: 0.5 },
            MarketValueMap::Saturating { k: 1.0, s: 0.1 },
        ] {
            let params = params_from_diversity(
                &model,
                "y",
                "yp",
                &MarketValueMap::Linear { k: 10.0 },
                &ft,
                2.0,
                1.0,
            )
            .unwrap();
            assert_eq!(params.beta(), 0.0);
        }
    }

    #[test]
    fn build_game_examples() {
        let g = p(2.0, 1.0, 3.0, 1.2).build_game().unwrap();
        for (got, want) in g.entries().iter().zip([0.9, 2.8, 1.2, 1.0]) {
            assert!((got - want).abs() < 1e-12, "{g}");
        }
        let g = p(2.0, 3.0, 1.0, 0.0).build_game().unwrap();
        assert_eq!(g.b(), 0.0);
        assert_eq!(g.d(), 1.0);
        assert!(!p(2.0, 3.0, 1.0, 0.0).is_schumpeterian());
        assert!(SchumpeterParams::new(2.0, 1.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn payoffs_match_matrix_rows() {
        let params = p(2.0, 1.0, 3.0, 1.2);
        let g = params.build_game().unwrap();
        for k in 0..=10 {
            let x = PopulationState::new(k as f64 / 10.0).unwrap();
            let (pi_i, pi_r) = g.payoff_vector(x);
            assert!((pi_i - params.innovator_payoff(x.x1())).abs() < 1e-12);
            assert!((pi_r - params.imitator_payoff(x.x1())).abs() < 1e-12);
        }
    }

    #[test]
    fn schumpeterian_condition_examples() {
        assert!(p(2.0, 1.0, 3.0, 1.2).is_schumpeterian());
        assert!(!p(2.0, 1.0, 3.0, 1.0).is_schumpeterian());
        assert!(!p(2.0, 10.0, 3.0, 1.2).is_schumpeterian());
        let c = p(2.0, 10.0, 3.0, 1.2).check();
        assert!(c.innovation_self_limiting && !c.innovation_profitable);
        assert_eq!(
            p(2.0, 1.0, 3.0, 1.2).build_game().unwrap().kind(),
            GameKind::AntiCoordination
        );
    }

    #[test]
    fn schumpeterian_state_examples() {
        let s = p(2.0, 1.0, 3.0, 1.2).schumpeterian_state().unwrap();
        assert!((s.innovators - 6.0 / 7.0).abs() < 1e-12);
        assert!((s.imitators - 1.0 / 7.0).abs() < 1e-12);
        let eq = p(2.0, 1.0, 3.0, 1.2).build_game().unwrap().interior_equilibrium().unwrap();
        assert!((eq.x1() - s.innovators).abs() < 1e-12);

        let s = p(2.0, 1.5, 2.0, 0.5).schumpeterian_state().unwrap();
        assert!((s.innovators - 0.8).abs() < 1e-12);
        assert!((s.imitators - 0.2).abs() < 1e-12);
        assert!((s.innovators + s.imitators - 1.0).abs() < 1e-15);

        let err = p(2.0, 10.0, 3.0, 1.2).schumpeterian_state().unwrap_err();
        assert!(err.to_string().contains("pi/2 + alpha > beta + cost"), "{err}");
        assert!(matches!(
            p(2.0, 1.0, 3.0, 1.0).schumpeterian_state(),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn gamma_examples() {
        assert!((gamma(3.0, 1.2, 0.0).unwrap() - 6.0 / 7.0).abs() < 1e-12);
        let eps = 1e-6;
        let g = gamma(3.0, 3.0 - eps, 0.0).unwrap();
        assert!(g > 0.0 && g < 1e-6);
        assert!((g - 2.0 * eps / (6.0 - eps)).abs() < 1e-12);
        // ξ = 2(α − β) puts Γ at 0, outside the open interval.
        assert!(gamma(3.0, 1.2, 3.6).is_err());
    }

    #[test]
    fn domain_examples() {
        assert!(in_domain(3.0, 1.2, 0.0));
        assert!(!in_domain(3.0, 0.5, 0.0));
        assert!(!in_domain(0.0, 0.1, 0.0));
        assert!(!in_domain(0.0, -1.0, -5.0));
    }

    #[test]
    fn gradient_examples() {
        let (da, db) = gamma_gradient(3.0, 1.2, 0.0).unwrap();
        assert!((da - 4.8 / 17.64).abs() < 1e-12);
        assert!((db + 12.0 / 17.64).abs() < 1e-12);
        assert!((da - 0.272109).abs() < 1e-6);
        assert!((db + 0.680272).abs() < 1e-6);
        assert!(gamma_gradient(3.0, 0.5, 0.0).is_err());
    }

    #[test]
    fn sweep_examples() {
        let res = sweep(&[3.0], &[1.2], 0.0).unwrap();
        assert_eq!(res.rows.len(), 1);
        assert!(res.rows[0].in_domain);
        assert!((res.rows[0].innovators.unwrap() - 6.0 / 7.0).abs() < 1e-12);

        let alphas: Vec<f64> = (0..50).map(|k| 1.5 + k as f64 * 0.03).collect();
        let res = sweep(&alphas, &[1.0], 0.0).unwrap();
        let col: Vec<f64> = res.rows.iter().filter_map(|r| r.innovators).collect();
        assert_eq!(col.len(), 50);
        assert!(col.windows(2).all(|w| w[1] >= w[0]));

        let res = sweep(&[1.0, 2.0], &[5.0, 6.0], 0.0).unwrap();
        assert!(res.rows.iter().all(|r| !r.in_domain && r.innovators.is_none()));
        assert_eq!((res.rows[1].alpha, res.rows[1].beta), (1.0, 6.0));

        assert!(sweep(&[], &[1.0], 0.0).is_err());
        assert!(sweep(&[2.0, 1.0], &[1.0], 0.0).is_err());
    }

    #[test]
    fn market_value_maps() {
        let f = MarketValueMap::Saturating { k: 2.0, s: 1.0 };
        assert_eq!(f.eval(0.0), 0.0);
        assert_eq!(f.eval(1.0), 1.0);
        assert_eq!(MarketValueMap::Power { k: 2.0, gamma: 2.0 }.eval(3.0), 18.0);
        assert!(MarketValueMap::Linear { k: 0.0 }.validate().is_err());
        assert!(MarketValueMap::Power { k: 1.0, gamma: -1.0 }.validate().is_err());
    }
}
