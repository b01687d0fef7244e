//! Symmetric 2×2 population games under random matching.

use std::fmt;

use crate::error::{Error, Result};

/// Margin used by the direct ESS inequality check.
pub const ESS_MARGIN: f64 = 1e-12;

/// Payoff matrix `[[a, b], [c, d]]`; rows are the own strategy, columns the
/// opponent's.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GameMatrix {
    a: f64,
    b: f64,
    c: f64,
    d: f64,
}

impl GameMatrix {
    pub fn new(a: f64, b: f64, c: f64, d: f64) -> Result<Self> {
        if ![a, b, c, d].iter().all(|v| v.is_finite()) {
            return Err(Error::DegenerateMatrix(format!(
                "entries must be finite, got ({a}, {b}, {c}, {d})"
            )));
        }
        if a == c {
            return Err(Error::DegenerateMatrix(format!(
                "a = c = {a} violates matrix invariant"
            )));
        }
        if b == d {
            return Err(Error::DegenerateMatrix(format!(
                "b = d = {b} violates matrix invariant"
            )));
        }
        Ok(Self { a, b, c, d })
    }

    pub fn a(&self) -> f64 {
        self.a
    }
    pub fn b(&self) -> f64 {
        self.b
    }
    pub fn c(&self) -> f64 {
        self.c
    }
    pub fn d(&self) -> f64 {
        self.d
    }

    pub fn entries(&self) -> [f64; 4] {
        [self.a, self.b, self.c, self.d]
    }

    /// `(π1, π2)` at mass `x1` on strategy 1. Accepts any real `x1` so that
    /// integrator stages may evaluate slightly off the simplex.
    pub(crate) fn payoffs_at(&self, x1: f64) -> (f64, f64) {
        (
            (self.a - self.b) * x1 + self.b,
            (self.c - self.d) * x1 + self.d,
        )
    }

    pub fn payoff_vector(&self, x: PopulationState) -> (f64, f64) {
        self.payoffs_at(x.x1())
    }

    pub fn average_payoff(&self, x: PopulationState) -> f64 {
        let (p1, p2) = self.payoff_vector(x);
        x.x1() * p1 + x.x2() * p2
    }

    /// Largest payoff gap `|π1 − π2|` over the simplex; attained at a vertex.
    pub fn max_payoff_gap(&self) -> f64 {
        (self.a - self.c).abs().max((self.b - self.d).abs())
    }

    /// Polymorphic state where both strategies earn the same, if any.
    pub fn interior_equilibrium(&self) -> Option<PopulationState> {
        if (self.a - self.c) * (self.d - self.b) > 0.0 {
            let p = (self.b - self.d) / (self.c - self.a + self.b - self.d);
            Some(PopulationState::clamped(p))
        } else {
            None
        }
    }

    pub fn kind(&self) -> GameKind {
        match (self.a > self.c, self.b > self.d) {
            (true, true) => GameKind::Dominant1,
            (false, false) => GameKind::Dominant2,
            (false, true) => GameKind::AntiCoordination,
            (true, false) => GameKind::Coordination,
        }
    }

    pub fn classify_ess(&self) -> EssClassification {
        let kind = self.kind();
        let interior_eq = self.interior_equilibrium();
        let (ess_states, attracting) = match kind {
            GameKind::Dominant1 => (vec![PopulationState::VERTEX_1], Basin::Global),
            GameKind::Dominant2 => (vec![PopulationState::VERTEX_2], Basin::Global),
            GameKind::AntiCoordination => {
                let p = interior_eq.expect("anti-coordination games have an interior equilibrium");
                (vec![p], Basin::Global)
            }
            GameKind::Coordination => {
                let p = interior_eq.expect("coordination games have an interior equilibrium");
                (
                    vec![PopulationState::VERTEX_1, PopulationState::VERTEX_2],
                    Basin::SplitAt(p),
                )
            }
        };
        EssClassification {
            kind,
            ess_states,
            interior_eq,
            attracting,
        }
    }

    /// `xᵀ M y` for two population states.
    pub fn bilinear(&self, x: PopulationState, y: PopulationState) -> f64 {
        let (p1, p2) = self.payoff_vector(y);
        x.x1() * p1 + x.x2() * p2
    }

    /// Checks the two ESS inequalities of `x` against the mutants
    /// `q1 = k / (grid - 1)` for `k = 0..grid`, skipping `q = x`.
    pub fn check_ess(&self, x: PopulationState, grid: usize) -> EssCheck {
        let grid = grid.max(2);
        let mut check = EssCheck {
            stable: true,
            near_ties: Vec::new(),
            violations: Vec::new(),
        };
        let xmx = self.bilinear(x, x);
        for k in 0..grid {
            let q = PopulationState::clamped(k as f64 / (grid - 1) as f64);
            if q.x1() == x.x1() {
                continue;
            }
            let first = xmx - self.bilinear(q, x);
            if first < -ESS_MARGIN {
                check.stable = false;
                check.violations.push(q.x1());
                continue;
            }
            if first > ESS_MARGIN {
                continue;
            }
            // Mutant is an alternative best reply; the second condition decides.
            let second = self.bilinear(x, q) - self.bilinear(q, q);
            if second > ESS_MARGIN {
                continue;
            }
            if second < -ESS_MARGIN {
                check.stable = false;
                check.violations.push(q.x1());
            } else {
                check.near_ties.push(q.x1());
            }
        }
        check
    }
}

impl fmt::Display for GameMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[[{}, {}], [{}, {}]]", self.a, self.b, self.c, self.d)
    }
}

/// Point of the simplex, stored by the mass on strategy 1.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct PopulationState(f64);

impl PopulationState {
    /// `(1, 0)`: everyone plays strategy 1.
    pub const VERTEX_1: PopulationState = PopulationState(1.0);
    /// `(0, 1)`: everyone plays strategy 2.
    pub const VERTEX_2: PopulationState = PopulationState(0.0);

    pub fn new(x1: f64) -> Result<Self> {
        if (0.0..=1.0).contains(&x1) {
            Ok(Self(x1))
        } else {
            Err(Error::domain(format!("population share {x1} is outside [0, 1]")))
        }
    }

    pub(crate) fn clamped(x1: f64) -> Self {
        Self(x1.clamp(0.0, 1.0))
    }

    pub fn x1(&self) -> f64 {
        self.0
    }

    pub fn x2(&self) -> f64 {
        1.0 - self.0
    }

    pub fn is_monomorphic(&self) -> bool {
        self.0 == 0.0 || self.0 == 1.0
    }
}

impl fmt::Display for PopulationState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x1(), self.x2())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Strategy {
    First,
    Second,
}

impl Strategy {
    pub fn other(self) -> Self {
        match self {
            Strategy::First => Strategy::Second,
            Strategy::Second => Strategy::First,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GameKind {
    /// Strategy 1 strictly dominates.
    Dominant1,
    /// Strategy 2 strictly dominates.
    Dominant2,
    AntiCoordination,
    Coordination,
}

impl fmt::Display for GameKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            GameKind::Dominant1 => "dominant-1",
            GameKind::Dominant2 => "dominant-2",
            GameKind::AntiCoordination => "anti-coordination",
            GameKind::Coordination => "coordination",
        };
        f.write_str(s)
    }
}

/// Basin structure of the ESS set under the mean dynamics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Basin {
    /// Every polymorphic initial state converges to the ESS.
    Global,
    /// Starts below `p` go to `(0, 1)`, starts above go to `(1, 0)`.
    SplitAt(PopulationState),
}

#[derive(Debug, Clone, PartialEq)]
pub struct EssClassification {
    pub kind: GameKind,
    pub ess_states: Vec<PopulationState>,
    pub interior_eq: Option<PopulationState>,
    pub attracting: Basin,
}

impl EssClassification {
    /// ESS reached from a polymorphic start `x0`; `None` when `x0` sits exactly
    /// on the separatrix of a coordination game.
    pub fn limit_from(&self, x0: PopulationState) -> Option<PopulationState> {
        match self.attracting {
            Basin::Global => self.ess_states.first().copied(),
            Basin::SplitAt(p) if x0.x1() < p.x1() => Some(PopulationState::VERTEX_2),
            Basin::SplitAt(p) if x0.x1() > p.x1() => Some(PopulationState::VERTEX_1),
            Basin::SplitAt(_) => None,
        }
    }
}

/// Outcome of [`GameMatrix::check_ess`].
#[derive(Debug, Clone, PartialEq)]
pub struct EssCheck {
    pub stable: bool,
    /// Mutants where both ESS inequalities hold with equality within the margin.
    pub near_ties: Vec<f64>,
    pub violations: Vec<f64>,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(a: f64, b: f64, c: f64, d: f64) -> GameMatrix {
        GameMatrix::new(a, b, c, d).unwrap()
    }

    fn x(v: f64) -> PopulationState {
        PopulationState::new(v).unwrap()
    }

    #[test]
    fn payoff_vector_examples() {
        assert_eq!(m(1.0, 1.0, 0.0, 0.0).payoff_vector(x(0.3)), (1.0, 0.0));
        assert_eq!(m(0.0, 2.0, 1.0, 0.0).payoff_vector(x(0.0)), (2.0, 0.0));
        let (p1, p2) = m(0.0, 2.0, 1.0, 0.0).payoff_vector(x(2.0 / 3.0));
        assert!((p1 - 2.0 / 3.0).abs() < 1e-12);
        assert!((p2 - 2.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn average_payoff_examples() {
        assert!((m(1.0, 1.0, 0.0, 0.0).average_payoff(x(0.5)) - 0.5).abs() < 1e-12);
        assert!((m(0.0, 2.0, 1.0, 0.0).average_payoff(x(2.0 / 3.0)) - 2.0 / 3.0).abs() < 1e-12);
        assert_eq!(m(0.0, 2.0, 1.0, 0.0).average_payoff(x(0.0)), 0.0);
    }

    #[test]
    fn interior_equilibrium_examples() {
        let p = m(0.0, 2.0, 1.0, 0.0).interior_equilibrium().unwrap();
        assert!((p.x1() - 2.0 / 3.0).abs() < 1e-12);
        let p = m(-1.0, 2.0, 0.0, 1.0).interior_equilibrium().unwrap();
        assert!((p.x1() - 0.5).abs() < 1e-12);
        assert!(m(2.0, 2.0, 1.0, 1.0).interior_equilibrium().is_none());
    }

    #[test]
    fn classification_examples() {
        let c = m(2.0, 2.0, 1.0, 1.0).classify_ess();
        assert_eq!(c.kind, GameKind::Dominant1);
        assert_eq!(c.ess_states, vec![PopulationState::VERTEX_1]);
        assert_eq!(c.attracting, Basin::Global);

        let c = m(0.0, 2.0, 1.0, 0.0).classify_ess();
        assert_eq!(c.kind, GameKind::AntiCoordination);
        assert_eq!(c.ess_states.len(), 1);
        assert!((c.ess_states[0].x1() - 2.0 / 3.0).abs() < 1e-12);
        assert!((c.ess_states[0].x2() - 1.0 / 3.0).abs() < 1e-12);

        let c = m(2.0, 0.0, 1.0, 1.0).classify_ess();
        assert_eq!(c.kind, GameKind::Coordination);
        assert_eq!(
            c.ess_states,
            vec![PopulationState::VERTEX_1, PopulationState::VERTEX_2]
        );
        match c.attracting {
            Basin::SplitAt(p) => assert!((p.x1() - 0.5).abs() < 1e-12),
            other => panic!("expected split basin, got {other:?}"),
        }
        assert_eq!(c.limit_from(x(0.4)), Some(PopulationState::VERTEX_2));
        assert_eq!(c.limit_from(x(0.6)), Some(PopulationState::VERTEX_1));
        assert_eq!(c.limit_from(x(0.5)), None);

        assert_eq!(m(1.0, 0.0, 2.0, 1.0).kind(), GameKind::Dominant2);
    }

    #[test]
    fn degenerate_matrices_are_rejected() {
        let err = GameMatrix::new(1.0, 2.0, 1.0, 0.0).unwrap_err();
        assert!(err.to_string().contains("a = c"), "{err}");
        assert!(GameMatrix::new(0.0, 1.0, 2.0, 1.0).is_err());
        assert!(GameMatrix::new(f64::NAN, 1.0, 2.0, 0.0).is_err());
    }

    #[test]
    fn state_rejects_out_of_simplex() {
        assert!(PopulationState::new(-0.1).is_err());
        assert!(PopulationState::new(1.0 + 1e-15).is_err());
        assert!(PopulationState::new(f64::NAN).is_err());
        assert!(x(1.0).is_monomorphic());
    }

    #[test]
    fn direct_ess_check_matches_classification() {
        let g = m(0.0, 2.0, 1.0, 0.0);
        let p = g.interior_equilibrium().unwrap();
        let check = g.check_ess(p, 1001);
        assert!(check.stable, "{check:?}");
        assert!(check.violations.is_empty());
        // Vertices are not stable in an anti-coordination game.
        assert!(!g.check_ess(PopulationState::VERTEX_1, 1001).stable);

        let coord = m(2.0, 0.0, 1.0, 1.0);
        assert!(coord.check_ess(PopulationState::VERTEX_1, 1001).stable);
        assert!(coord.check_ess(PopulationState::VERTEX_2, 1001).stable);
        assert!(!coord.check_ess(coord.interior_equilibrium().unwrap(), 1001).stable);
    }
}
