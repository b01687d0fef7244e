//! Python bindings: games, Schumpeterian parameters, diversity models and
//! the deterministic and stochastic dynamics.

use std::collections::BTreeMap;

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use schumpeter_core as core;
use schumpeter_core::{Basin, PopulationState, Protocol};

fn py_err(e: core::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn state(x: f64) -> PyResult<PopulationState> {
    PopulationState::new(x).map_err(py_err)
}

fn protocol(name: &str) -> PyResult<Protocol> {
    name.parse().map_err(py_err)
}

#[pyclass(name = "GameMatrix", frozen, module = "schumpeter_py")]
struct PyGameMatrix {
    inner: core::GameMatrix,
}

#[pymethods]
impl PyGameMatrix {
    #[new]
    fn new(a: f64, b: f64, c: f64, d: f64) -> PyResult<Self> {
        core::GameMatrix::new(a, b, c, d)
            .map(|inner| Self { inner })
            .map_err(py_err)
    }

    #[getter]
    fn entries(&self) -> (f64, f64, f64, f64) {
        let [a, b, c, d] = self.inner.entries();
        (a, b, c, d)
    }

    /// Payoffs `(π1, π2)` at innovator share `x`.
    fn payoffs(&self, x: f64) -> PyResult<(f64, f64)> {
        Ok(self.inner.payoff_vector(state(x)?))
    }

    fn interior_equilibrium(&self) -> Option<f64> {
        self.inner.interior_equilibrium().map(|p| p.x1())
    }

    fn kind(&self) -> String {
        self.inner.kind().to_string()
    }

    fn classify(&self) -> Classification {
        let c = self.inner.classify_ess();
        Classification {
            kind: c.kind.to_string(),
            ess: c.ess_states.iter().map(|s| s.x1()).collect(),
            interior_equilibrium: c.interior_eq.map(|p| p.x1()),
            split_at: match c.attracting {
                Basin::Global => None,
                Basin::SplitAt(p) => Some(p.x1()),
            },
        }
    }

    fn __repr__(&self) -> String {
        let [a, b, c, d] = self.inner.entries();
        format!("GameMatrix(a={a}, b={b}, c={c}, d={d})")
    }
}

#[pyclass(frozen, module = "schumpeter_py")]
struct Classification {
    #[pyo3(get)]
    kind: String,
    #[pyo3(get)]
    ess: Vec<f64>,
    #[pyo3(get)]
    interior_equilibrium: Option<f64>,
    /// Basin boundary for coordination games, `None` when one state attracts everything.
    #[pyo3(get)]
    split_at: Option<f64>,
}

#[pymethods]
impl Classification {
    fn __repr__(&self) -> String {
        format!("Classification(kind={:?}, ess={:?})", self.kind, self.ess)
    }
}

#[pyclass(name = "SchumpeterParams", frozen, module = "schumpeter_py")]
struct PySchumpeterParams {
    inner: core::SchumpeterParams,
}

#[pymethods]
impl PySchumpeterParams {
    #[new]
    fn new(pi: f64, cost: f64, alpha: f64, beta: f64) -> PyResult<Self> {
        core::SchumpeterParams::new(pi, cost, alpha, beta)
            .map(|inner| Self { inner })
            .map_err(py_err)
    }

    #[getter]
    fn pi(&self) -> f64 {
        self.inner.pi()
    }

    #[getter]
    fn cost(&self) -> f64 {
        self.inner.cost()
    }

    #[getter]
    fn alpha(&self) -> f64 {
        self.inner.alpha()
    }

    #[getter]
    fn beta(&self) -> f64 {
        self.inner.beta()
    }

    #[getter]
    fn xi(&self) -> f64 {
        self.inner.xi()
    }

    fn game(&self) -> PyResult<PyGameMatrix> {
        self.inner
            .build_game()
            .map(|inner| PyGameMatrix { inner })
            .map_err(py_err)
    }

    fn is_schumpeterian(&self) -> bool {
        self.inner.is_schumpeterian()
    }

    /// `(x_I, x_R)`; raises `ValueError` when the conditions fail.
    fn state(&self) -> PyResult<(f64, f64)> {
        let s = self.inner.schumpeterian_state().map_err(py_err)?;
        Ok((s.innovators, s.imitators))
    }

    fn __repr__(&self) -> String {
        format!("SchumpeterParams({})", self.inner)
    }
}

#[pyclass(name = "DiversityModel", frozen, module = "schumpeter_py")]
struct PyDiversityModel {
    inner: core::DiversityModel,
}

#[pymethods]
impl PyDiversityModel {
    /// `attributes` maps attribute ids to member technologies; `weights`
    /// gives every attribute its weight in `[0, 1]`.
    #[new]
    fn new(
        technologies: Vec<String>,
        attributes: BTreeMap<String, Vec<String>>,
        weights: BTreeMap<String, f64>,
    ) -> PyResult<Self> {
        let catalog = technologies.into_iter().map(core::Technology::new).collect();
        let attrs = attributes
            .into_iter()
            .map(|(id, members)| core::Attribute::new(id, members))
            .collect();
        core::DiversityModel::with_weights(catalog, attrs, &weights)
            .map(|inner| Self { inner })
            .map_err(py_err)
    }

    fn diversity(&self, technologies: Vec<String>) -> PyResult<f64> {
        self.inner.diversity(&technologies).map_err(py_err)
    }

    fn dissimilarity(&self, new: &str, old: &str) -> PyResult<f64> {
        self.inner.dissimilarity(new, old).map_err(py_err)
    }

    fn is_relevant_innovation(&self, new: &str, old: &str) -> PyResult<bool> {
        self.inner.is_relevant_innovation(new, old).map_err(py_err)
    }

    fn relevant_attributes(&self) -> Vec<String> {
        self.inner.relevant_attributes()
    }

    /// Parameters induced by linear market-value maps `k·δ`.
    fn schumpeter_params(
        &self,
        old: &str,
        new: &str,
        k: f64,
        pi: f64,
        cost: f64,
    ) -> PyResult<PySchumpeterParams> {
        let f = core::MarketValueMap::Linear { k };
        core::params_from_diversity(&self.inner, old, new, &f, &f, pi, cost)
            .map(|inner| PySchumpeterParams { inner })
            .map_err(py_err)
    }
}

#[pyclass(name = "Trajectory", frozen, module = "schumpeter_py")]
struct PyTrajectory {
    inner: core::Trajectory,
}

#[pymethods]
impl PyTrajectory {
    #[getter]
    fn times(&self) -> Vec<f64> {
        self.inner.times().to_vec()
    }

    #[getter]
    fn innovators(&self) -> Vec<f64> {
        self.inner.states().iter().map(|s| s.x1()).collect()
    }

    #[getter]
    fn payoffs(&self) -> Vec<(f64, f64)> {
        self.inner.payoffs().to_vec()
    }

    fn final_state(&self) -> f64 {
        self.inner.last_state().x1()
    }

    fn to_csv(&self) -> String {
        core::io::trajectory_csv_string(&self.inner, &[])
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }
}

#[pyfunction]
#[pyo3(signature = (game, x0, protocol = "ppi", t_max = 100.0, dt = 0.01))]
fn integrate(
    game: PyRef<'_, PyGameMatrix>,
    x0: f64,
    protocol: &str,
    t_max: f64,
    dt: f64,
) -> PyResult<PyTrajectory> {
    core::integrate(self::protocol(protocol)?, &game.inner, state(x0)?, t_max, dt)
        .map(|inner| PyTrajectory { inner })
        .map_err(py_err)
}

#[pyfunction]
#[pyo3(signature = (game, x0, n, seed, protocol = "ppi", t_max = 100.0, clock_rate = 1.0, sample_dt = 0.1))]
#[allow(clippy::too_many_arguments)]
fn simulate(
    game: PyRef<'_, PyGameMatrix>,
    x0: f64,
    n: u64,
    seed: u64,
    protocol: &str,
    t_max: f64,
    clock_rate: f64,
    sample_dt: f64,
) -> PyResult<PyTrajectory> {
    let pop = core::AgentPopulation::from_share(n, state(x0)?, seed).map_err(py_err)?;
    core::simulate_finite_population(
        self::protocol(protocol)?,
        &game.inner,
        pop,
        t_max,
        clock_rate,
        sample_dt,
    )
    .map(|inner| PyTrajectory { inner })
    .map_err(py_err)
}

#[pyfunction]
fn in_domain(alpha: f64, beta: f64, xi: f64) -> bool {
    core::in_domain(alpha, beta, xi)
}

#[pyfunction]
fn gamma(alpha: f64, beta: f64, xi: f64) -> PyResult<f64> {
    core::gamma(alpha, beta, xi).map_err(py_err)
}

#[pyfunction]
fn gamma_gradient(alpha: f64, beta: f64, xi: f64) -> PyResult<(f64, f64)> {
    core::gamma_gradient(alpha, beta, xi).map_err(py_err)
}

/// Sweep CSV text over the `alphas × betas` grid.
#[pyfunction]
fn sweep(alphas: Vec<f64>, betas: Vec<f64>, xi: f64) -> PyResult<String> {
    let res = core::sweep(&alphas, &betas, xi).map_err(py_err)?;
    Ok(core::io::sweep_csv_string(&res))
}

/// Validates a scenario and returns it in canonical form.
#[pyfunction]
fn parse_scenario(text: &str) -> PyResult<String> {
    core::io::parse_scenario(text)
        .map(|s| s.to_canonical_json())
        .map_err(py_err)
}

#[pymodule]
fn schumpeter_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyGameMatrix>()?;
    m.add_class::<Classification>()?;
    m.add_class::<PySchumpeterParams>()?;
    m.add_class::<PyDiversityModel>()?;
    m.add_class::<PyTrajectory>()?;
    m.add_function(wrap_pyfunction!(integrate, m)?)?;
    m.add_function(wrap_pyfunction!(simulate, m)?)?;
    m.add_function(wrap_pyfunction!(in_domain, m)?)?;
    m.add_function(wrap_pyfunction!(gamma, m)?)?;
    m.add_function(wrap_pyfunction!(gamma_gradient, m)?)?;
    m.add_function(wrap_pyfunction!(sweep, m)?)?;
    m.add_function(wrap_pyfunction!(parse_scenario, m)?)?;
    Ok(())
}
