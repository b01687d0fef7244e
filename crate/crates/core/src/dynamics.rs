//! Revision protocols and the population dynamics they induce.
//!
//! With two strategies the inflow-outflow equation reduces to the scalar ODE
//!
//! ```text
//! ẋ1 = (1 − x1)·ρ21(x) − x1·ρ12(x)
//! ```
//!
//! which [`integrate`] solves with fixed-step RK4. [`simulate_finite_population`]
//! realises the same switch rates for `N` agents with Poisson revision clocks.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::game::{GameMatrix, PopulationState, Strategy};

/// Largest post-step clamp tolerated by [`integrate`].
pub const CLAMP_BUDGET: f64 = 1e-9;

pub const DEFAULT_DT: f64 = 0.01;
pub const DEFAULT_T_MAX: f64 = 100.0;
pub const DEFAULT_CLOCK_RATE: f64 = 1.0;
pub const DEFAULT_TOL: f64 = 1e-6;
pub const DEFAULT_WINDOW: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Protocol {
    /// Pairwise proportional imitation; yields the replicator dynamic.
    Ppi,
    /// Pairwise comparison against every strategy; yields the Smith dynamic.
    Smith,
    /// Excess payoff over the population average; yields the BNN dynamic.
    Bnn,
}

impl Protocol {
    pub const ALL: [Protocol; 3] = [Protocol::Ppi, Protocol::Smith, Protocol::Bnn];

    pub fn name(self) -> &'static str {
        match self {
            Protocol::Ppi => "ppi",
            Protocol::Smith => "smith",
            Protocol::Bnn => "bnn",
        }
    }

    /// `(ρ12, ρ21)` at raw share `x1`.
    fn rates_at(self, m: &GameMatrix, x1: f64) -> (f64, f64) {
        let (p1, p2) = m.payoffs_at(x1);
        let x2 = 1.0 - x1;
        match self {
            Protocol::Ppi => (x2 * pos(p2 - p1), x1 * pos(p1 - p2)),
            Protocol::Smith => (pos(p2 - p1), pos(p1 - p2)),
            Protocol::Bnn => {
                let avg = x1 * p1 + x2 * p2;
                (pos(p2 - avg), pos(p1 - avg))
            }
        }
    }

    fn rhs_at(self, m: &GameMatrix, x1: f64) -> f64 {
        let (r12, r21) = self.rates_at(m, x1);
        (1.0 - x1) * r21 - x1 * r12
    }
}

impl fmt::Display for Protocol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Protocol {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "ppi" => Ok(Protocol::Ppi),
            "smith" => Ok(Protocol::Smith),
            "bnn" => Ok(Protocol::Bnn),
            other => Err(Error::Validation(format!(
                "unknown protocol {other:?} (expected ppi, smith or bnn)"
            ))),
        }
    }
}

#[inline]
fn pos(r: f64) -> f64 {
    r.max(0.0)
}

/// Conditional rate at which an `i`-strategist switches to `j`.
pub fn switch_rate(
    protocol: Protocol,
    m: &GameMatrix,
    x: PopulationState,
    i: Strategy,
    j: Strategy,
) -> Result<f64> {
    if i == j {
        return Err(Error::domain("switch rate needs two distinct strategies"));
    }
    let (r12, r21) = protocol.rates_at(m, x.x1());
    Ok(match i {
        Strategy::First => r12,
        Strategy::Second => r21,
    })
}

/// Right-hand side `ẋ1` of the two-strategy mean dynamic.
pub fn mean_field_rhs(protocol: Protocol, m: &GameMatrix, x: PopulationState) -> f64 {
    protocol.rhs_at(m, x.x1())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RunKind {
    Ode { dt: f64 },
    Stochastic { n: u64, clock_rate: f64, seed: u64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryMeta {
    pub protocol: Protocol,
    pub matrix: GameMatrix,
    pub x0: PopulationState,
    pub run: RunKind,
}

/// Sampled path of the population state with the payoffs at each sample.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    times: Vec<f64>,
    states: Vec<PopulationState>,
    payoffs: Vec<(f64, f64)>,
    pub meta: TrajectoryMeta,
}

impl Trajectory {
    fn with_capacity(meta: TrajectoryMeta, n: usize) -> Self {
        Self {
            times: Vec::with_capacity(n),
            states: Vec::with_capacity(n),
            payoffs: Vec::with_capacity(n),
            meta,
        }
    }

    fn push(&mut self, t: f64, x: PopulationState) {
        debug_assert!(self.times.last().is_none_or(|&last| t > last));
        self.times.push(t);
        self.states.push(x);
        self.payoffs.push(self.meta.matrix.payoff_vector(x));
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn states(&self) -> &[PopulationState] {
        &self.states
    }

    pub fn payoffs(&self) -> &[(f64, f64)] {
        &self.payoffs
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn last_state(&self) -> PopulationState {
        *self.states.last().expect("trajectories hold at least the initial state")
    }

    pub fn span(&self) -> f64 {
        match (self.times.first(), self.times.last()) {
            (Some(a), Some(b)) => b - a,
            _ => 0.0,
        }
    }

    /// Linear interpolation of `x1` at time `t` (clamped to the sampled range).
    pub fn x1_at(&self, t: f64) -> f64 {
        let times = &self.times;
        if t <= times[0] {
            return self.states[0].x1();
        }
        if t >= *times.last().unwrap() {
            return self.last_state().x1();
        }
        let k = times.partition_point(|&s| s <= t);
        let (t0, t1) = (times[k - 1], times[k]);
        let (x0, x1) = (self.states[k - 1].x1(), self.states[k].x1());
        x0 + (x1 - x0) * (t - t0) / (t1 - t0)
    }
}

fn check_horizon(t_max: f64, step: f64, what: &str) -> Result<()> {
    if !(t_max.is_finite() && t_max > 0.0) {
        return Err(Error::domain(format!("t_max must be positive, got {t_max}")));
    }
    if !(step.is_finite() && step > 0.0) {
        return Err(Error::domain(format!("{what} must be positive, got {step}")));
    }
    if step > t_max {
        return Err(Error::domain(format!("{what} = {step} exceeds t_max = {t_max}")));
    }
    Ok(())
}

/// Number of uniform steps of size about `dt` covering `[0, t_max]`.
fn step_count(t_max: f64, dt: f64) -> usize {
    let ratio = t_max / dt;
    let rounded = ratio.round();
    if (ratio - rounded).abs() <= 1e-9 * ratio.max(1.0) {
        rounded as usize
    } else {
        ratio.ceil() as usize
    }
}

/// Classical RK4 integration of the mean dynamic, recording every step.
///
/// States are clamped to `[0, 1]` after each step; a clamp larger than
/// [`CLAMP_BUDGET`] is reported as an [`Error::Integration`].
pub fn integrate(
    protocol: Protocol,
    m: &GameMatrix,
    x0: PopulationState,
    t_max: f64,
    dt: f64,
) -> Result<Trajectory> {
    check_horizon(t_max, dt, "dt")?;
    let steps = step_count(t_max, dt);
    let meta = TrajectoryMeta {
        protocol,
        matrix: *m,
        x0,
        run: RunKind::Ode { dt },
    };
    let mut traj = Trajectory::with_capacity(meta, steps + 1);
    traj.push(0.0, x0);

    let mut x = x0.x1();
    for k in 1..=steps {
        let t_prev = (k - 1) as f64 * dt;
        let t = if k == steps { t_max } else { k as f64 * dt };
        x = rk4_step(protocol, m, x, t - t_prev, t)?;
        traj.push(t, PopulationState::clamped(x));
    }
    Ok(traj)
}

/// State reached from `x0` after time `t_max`, by the same RK4 scheme as
/// [`integrate`] but without recording intermediate samples.
pub fn advance(
    protocol: Protocol,
    m: &GameMatrix,
    x0: PopulationState,
    t_max: f64,
    dt: f64,
) -> Result<PopulationState> {
    check_horizon(t_max, dt, "dt")?;
    let steps = step_count(t_max, dt);
    let mut x = x0.x1();
    for k in 1..=steps {
        let t_prev = (k - 1) as f64 * dt;
        let t = if k == steps { t_max } else { k as f64 * dt };
        x = rk4_step(protocol, m, x, t - t_prev, t)?;
    }
    Ok(PopulationState::clamped(x))
}

/// One clamped RK4 step of size `h` ending at time `t`.
#[inline]
fn rk4_step(protocol: Protocol, m: &GameMatrix, x: f64, h: f64, t: f64) -> Result<f64> {
    let f = |x: f64| protocol.rhs_at(m, x);
    let k1 = f(x);
    let k2 = f(x + 0.5 * h * k1);
    let k3 = f(x + 0.5 * h * k2);
    let k4 = f(x + h * k3);
    let next = x + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    if !next.is_finite() {
        return Err(Error::Integration {
            time: t,
            reason: "state became non-finite".into(),
        });
    }
    let clamped = next.clamp(0.0, 1.0);
    if (clamped - next).abs() > CLAMP_BUDGET {
        return Err(Error::Integration {
            time: t,
            reason: format!(
                "step left the simplex by {:e}; reduce dt",
                (clamped - next).abs()
            ),
        });
    }
    Ok(clamped)
}

/// Finite population of `n` agents, `n1` of them on strategy 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AgentPopulation {
    n: u64,
    n1: u64,
    seed: u64,
}

impl AgentPopulation {
    pub fn new(n: u64, n1: u64, seed: u64) -> Result<Self> {
        if n == 0 {
            return Err(Error::domain("population needs at least one agent"));
        }
        if n1 > n {
            return Err(Error::domain(format!("n1 = {n1} exceeds N = {n}")));
        }
        Ok(Self { n, n1, seed })
    }

    /// Population closest to share `x0`, with `n1 = round(x0·n)`.
    pub fn from_share(n: u64, x0: PopulationState, seed: u64) -> Result<Self> {
        let n1 = (x0.x1() * n as f64).round() as u64;
        Self::new(n, n1.min(n), seed)
    }

    pub fn n(&self) -> u64 {
        self.n
    }
    pub fn n1(&self) -> u64 {
        self.n1
    }
    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn state(&self) -> PopulationState {
        PopulationState::clamped(self.n1 as f64 / self.n as f64)
    }
}

/// Event-driven simulation of `pop` under `protocol`, sampled every `sample_dt`.
///
/// An `i`-strategist switches to `j` at rate `clock_rate · ρ_ij(x)`, with
/// `x = (n1/N, n2/N)`. Revision opportunities are generated by uniformisation:
/// the whole population rings at rate `N · clock_rate · K`, where `K` bounds
/// every switch rate, and a ringing agent accepts with probability `ρ_ij / K`.
pub fn simulate_finite_population(
    protocol: Protocol,
    m: &GameMatrix,
    pop: AgentPopulation,
    t_max: f64,
    clock_rate: f64,
    sample_dt: f64,
) -> Result<Trajectory> {
    check_horizon(t_max, sample_dt, "sample interval")?;
    if !(clock_rate.is_finite() && clock_rate > 0.0) {
        return Err(Error::domain(format!(
            "clock rate must be positive, got {clock_rate}"
        )));
    }
    let bound = m.max_payoff_gap();
    let n = pop.n;
    let nf = n as f64;
    let total_rate = nf * clock_rate * bound;
    let samples = step_count(t_max, sample_dt);
    let meta = TrajectoryMeta {
        protocol,
        matrix: *m,
        x0: pop.state(),
        run: RunKind::Stochastic {
            n,
            clock_rate,
            seed: pop.seed,
        },
    };
    let mut traj = Trajectory::with_capacity(meta, samples + 1);
    let sample_time = |k: usize| {
        if k == samples {
            t_max
        } else {
            k as f64 * sample_dt
        }
    };

    let mut rng = ChaCha8Rng::seed_from_u64(pop.seed);
    let mut n1 = pop.n1;
    let mut t = 0.0;
    let mut next_sample = 0usize;
    loop {
        let wait = -(1.0 - rng.random::<f64>()).ln() / total_rate;
        let t_event = t + wait;
        let state = PopulationState::clamped(n1 as f64 / nf);
        while next_sample <= samples && sample_time(next_sample) < t_event {
            traj.push(sample_time(next_sample), state);
            next_sample += 1;
        }
        if next_sample > samples {
            break;
        }
        t = t_event;

        let x1 = n1 as f64 / nf;
        let (r12, r21) = protocol.rates_at(m, x1);
        let reviser_on_first = rng.random::<f64>() * nf < n1 as f64;
        let rate = if reviser_on_first { r12 } else { r21 };
        if rate > bound * (1.0 + 1e-12) {
            return Err(Error::Simulation(format!(
                "switch rate {rate} exceeds uniformisation bound {bound} at x1 = {x1}"
            )));
        }
        if rate > 0.0 && rng.random::<f64>() * bound < rate {
            if reviser_on_first {
                n1 -= 1;
            } else {
                n1 += 1;
            }
        }
    }
    Ok(traj)
}

/// Final state of `traj` if `x1` varies by at most `tol` over the trailing `window`.
pub fn converged_state(traj: &Trajectory, tol: f64, window: f64) -> Option<PopulationState> {
    if traj.is_empty() || window > traj.span() {
        return None;
    }
    let t_end = *traj.times().last()?;
    let start = traj.times().partition_point(|&t| t < t_end - window);
    let (lo, hi) = traj.states()[start..]
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), s| {
            (lo.min(s.x1()), hi.max(s.x1()))
        });
    (hi - lo <= tol).then(|| traj.last_state())
}
