use std::fmt;

use crate::geometry::{distance, Point3, TrajState, Trajectory, TrajectoryKind};
use crate::world::World;

use super::residuals::{
    obstacle_penalty, residual_acceleration, residual_equidistance, residual_time, residual_velocity, tether_collides,
    tether_penalty, turn_exceeds_bound, turn_penalty,
};
use super::{OptConfig, OptError};

/// Variables per state: `[x, y, z, l, dt]`.
pub const VARS_PER_STATE: usize = 5;
const LENGTH: usize = 3;
const DT: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FactorKind {
    Equidistance,
    UavObstacle,
    Kinematics,
    Time,
    Velocity,
    Acceleration,
    Tether,
}

impl FactorKind {
    pub const ALL: [FactorKind; 7] = [
        FactorKind::Equidistance,
        FactorKind::UavObstacle,
        FactorKind::Kinematics,
        FactorKind::Time,
        FactorKind::Velocity,
        FactorKind::Acceleration,
        FactorKind::Tether,
    ];

    pub fn name(self) -> &'static str {
        match self {
            FactorKind::Equidistance => "equidistance",
            FactorKind::UavObstacle => "uav_obstacle",
            FactorKind::Kinematics => "kinematics",
            FactorKind::Time => "time",
            FactorKind::Velocity => "velocity",
            FactorKind::Acceleration => "acceleration",
            FactorKind::Tether => "tether",
        }
    }

    pub fn dimension(self) -> usize {
        match self {
            FactorKind::Equidistance => 3,
            FactorKind::Tether => 2,
            _ => 1,
        }
    }

    pub fn weight(self, cfg: &OptConfig) -> f64 {
        match self {
            FactorKind::Equidistance => cfg.gamma_eq,
            FactorKind::UavObstacle => cfg.gamma_o,
            FactorKind::Kinematics => cfg.gamma_theta,
            FactorKind::Time => cfg.gamma_t,
            FactorKind::Velocity => cfg.gamma_v,
            FactorKind::Acceleration => cfg.gamma_a,
            FactorKind::Tether => cfg.gamma_l,
        }
    }

    /// Valid anchor indices for `n` states.
    fn indices(self, n: usize) -> std::ops::Range<usize> {
        match self {
            FactorKind::Equidistance => 2..n - 1,
            FactorKind::UavObstacle | FactorKind::Tether => 0..n,
            FactorKind::Kinematics | FactorKind::Acceleration => 1..n - 1,
            FactorKind::Time => 1..n,
            FactorKind::Velocity => 0..n - 1,
        }
    }
}

impl fmt::Display for FactorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// One cost term, identified by its kind and the state index it is anchored at.
///
/// | kind | variables |
/// |---|---|
/// | equidistance | `p[i-2..=i+1]` |
/// | uav_obstacle | `p[i]` |
/// | kinematics | `p[i-1..=i+1]` |
/// | time | `dt[i]` |
/// | velocity | `p[i]`, `p[i+1]`, `dt[i+1]` |
/// | acceleration | `p[i-1..=i+1]`, `dt[i]`, `dt[i+1]` |
/// | tether | `p[i]`, `l[i]` |
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Factor {
    pub kind: FactorKind,
    pub index: usize,
}

impl fmt::Display for Factor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}[{}]", self.kind, self.index)
    }
}

impl Factor {
    pub fn dimension(&self) -> usize {
        self.kind.dimension()
    }

    /// State indices whose positions the factor reads.
    pub fn position_states(&self) -> std::ops::Range<usize> {
        let i = self.index;
        match self.kind {
            FactorKind::Equidistance => i - 2..i + 2,
            FactorKind::UavObstacle | FactorKind::Tether => i..i + 1,
            FactorKind::Kinematics | FactorKind::Acceleration => i - 1..i + 2,
            FactorKind::Velocity => i..i + 2,
            FactorKind::Time => i..i,
        }
    }

    /// Flattened variable indices, ascending.
    pub fn variables(&self) -> Vec<usize> {
        let i = self.index;
        let mut v: Vec<usize> =
            self.position_states().flat_map(|s| (0..3).map(move |c| s * VARS_PER_STATE + c)).collect();
        let dt = |s: usize| s * VARS_PER_STATE + DT;
        match self.kind {
            FactorKind::Time => v.push(dt(i)),
            FactorKind::Velocity => v.push(dt(i + 1)),
            FactorKind::Acceleration => v.extend([dt(i), dt(i + 1)]),
            FactorKind::Tether => v.push(i * VARS_PER_STATE + LENGTH),
            _ => {}
        }
        v.sort_unstable();
        v
    }

    /// State indices referenced through any variable.
    pub fn states(&self) -> Vec<usize> {
        let mut s: Vec<usize> = self.variables().iter().map(|v| v / VARS_PER_STATE).collect();
        s.dedup();
        s
    }
}

/// Non-smooth choices held fixed while differentiating one factor.
#[derive(Debug, Clone, Copy)]
pub(crate) enum Frozen {
    Nothing,
    Obstacle(Option<Point3>),
    TurnActive(bool),
    TetherCollides(bool),
}

#[derive(Debug, Clone, Copy, Default)]
pub(crate) struct Residual {
    pub values: [f64; 3],
    pub dim: usize,
}

impl Residual {
    fn new(values: &[f64]) -> Self {
        let mut r = Residual { values: [0.0; 3], dim: values.len() };
        r.values[..values.len()].copy_from_slice(values);
        r
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.values[..self.dim]
    }

    pub fn squared_norm(&self) -> f64 {
        self.as_slice().iter().map(|v| v * v).sum()
    }
}

pub(crate) fn position(x: &[f64], i: usize) -> Point3 {
    let b = i * VARS_PER_STATE;
    Point3::new(x[b], x[b + 1], x[b + 2])
}

fn length(x: &[f64], i: usize) -> f64 {
    x[i * VARS_PER_STATE + LENGTH]
}

fn dt(x: &[f64], i: usize) -> f64 {
    x[i * VARS_PER_STATE + DT]
}

/// A trajectory flattened into optimization variables, with its factors.
#[derive(Debug, Clone)]
pub struct OptProblem<'w> {
    /// `[x, y, z, l, dt]` per state.
    pub variables: Vec<f64>,
    /// Pins `p_0`, `p_{n-1}`, `l_0` and `dt_0`.
    pub fixed: Vec<bool>,
    /// Initial time increments, references for the time factors.
    pub dt0: Vec<f64>,
    pub factors: Vec<Factor>,
    pub world: &'w World,
    pub config: OptConfig,
    pub anchor: Point3,
}

pub fn build_problem<'w>(t: &Trajectory, world: &'w World, cfg: &OptConfig) -> Result<OptProblem<'w>, OptError> {
    cfg.validate()?;
    let n = t.len();
    if n < 5 {
        return Err(OptError::TooShort(n));
    }
    let mut variables = Vec::with_capacity(n * VARS_PER_STATE);
    for s in &t.states {
        let p = s.position;
        variables.extend([p.x, p.y, p.z, s.tether_length, s.dt]);
    }
    let mut fixed = vec![false; variables.len()];
    for c in 0..3 {
        fixed[c] = true;
        fixed[(n - 1) * VARS_PER_STATE + c] = true;
    }
    fixed[LENGTH] = true;
    fixed[DT] = true;

    let factors =
        FactorKind::ALL.iter().flat_map(|&kind| kind.indices(n).map(move |index| Factor { kind, index })).collect();
    Ok(OptProblem {
        variables,
        fixed,
        dt0: t.states.iter().map(|s| s.dt).collect(),
        factors,
        world,
        config: cfg.clone(),
        anchor: t.anchor,
    })
}

/// `sum_k gamma_k |delta_k|^2` at the problem's current variables.
pub fn total_cost(prob: &OptProblem<'_>) -> f64 {
    prob.cost_at(&prob.variables)
}

impl OptProblem<'_> {
    pub fn num_states(&self) -> usize {
        self.variables.len() / VARS_PER_STATE
    }

    /// Half-bandwidth of the normal equations.
    pub fn bandwidth(&self) -> usize {
        self.factors
            .iter()
            .map(|f| {
                let v = f.variables();
                v[v.len() - 1] - v[0]
            })
            .max()
            .unwrap_or(0)
    }

    pub(crate) fn freeze(&self, f: &Factor, x: &[f64]) -> Frozen {
        let i = f.index;
        match f.kind {
            FactorKind::UavObstacle => Frozen::Obstacle(self.world.nearest_obstacle(position(x, i)).map(|(_, q)| q)),
            FactorKind::Kinematics => Frozen::TurnActive(turn_exceeds_bound(
                position(x, i - 1),
                position(x, i),
                position(x, i + 1),
                &self.config,
            )),
            FactorKind::Tether => Frozen::TetherCollides(tether_collides(
                position(x, i),
                length(x, i),
                self.anchor,
                self.world,
                &self.config,
            )),
            _ => Frozen::Nothing,
        }
    }

    pub(crate) fn evaluate(&self, f: &Factor, x: &[f64], frozen: Frozen) -> Residual {
        let i = f.index;
        let p = |k: usize| position(x, k);
        let cfg = &self.config;
        match (f.kind, frozen) {
            (FactorKind::Equidistance, _) => Residual::new(&residual_equidistance(p(i - 2), p(i - 1), p(i), p(i + 1))),
            (FactorKind::UavObstacle, Frozen::Obstacle(q)) => {
                let d = q.map_or(f64::INFINITY, |q| distance(p(i), q));
                Residual::new(&[obstacle_penalty(d, cfg)])
            }
            (FactorKind::Kinematics, Frozen::TurnActive(active)) => {
                let r = if active { turn_penalty(p(i - 1), p(i), p(i + 1), cfg) } else { 0.0 };
                Residual::new(&[r])
            }
            (FactorKind::Time, _) => Residual::new(&[residual_time(dt(x, i), self.dt0[i])]),
            (FactorKind::Velocity, _) => Residual::new(&[residual_velocity(p(i), p(i + 1), dt(x, i + 1), cfg)]),
            (FactorKind::Acceleration, _) => {
                Residual::new(&[residual_acceleration(p(i - 1), p(i), p(i + 1), dt(x, i), dt(x, i + 1))])
            }
            (FactorKind::Tether, Frozen::TetherCollides(c)) => {
                Residual::new(&tether_penalty(p(i), length(x, i), self.anchor, c))
            }
            (kind, _) => self.evaluate(f, x, self.freeze(&Factor { kind, index: i }, x)),
        }
    }

    /// Unweighted residual of `f` at `x`.
    pub fn residual(&self, f: &Factor, x: &[f64]) -> Vec<f64> {
        self.evaluate(f, x, self.freeze(f, x)).as_slice().to_vec()
    }

    /// Weighted squared residual of `f` at `x`.
    pub fn factor_cost(&self, f: &Factor, x: &[f64]) -> f64 {
        f.kind.weight(&self.config) * self.evaluate(f, x, self.freeze(f, x)).squared_norm()
    }

    pub fn cost_at(&self, x: &[f64]) -> f64 {
        self.factors.iter().map(|f| self.factor_cost(f, x)).sum()
    }

    /// Like `cost_at`, but names the first factor with a non-finite cost.
    pub(crate) fn checked_cost(&self, x: &[f64]) -> Result<f64, Factor> {
        let mut total = 0.0;
        for f in &self.factors {
            let c = self.factor_cost(f, x);
            if !c.is_finite() {
                return Err(*f);
            }
            total += c;
        }
        Ok(total)
    }

    /// Applies `dt >= dt_min` and `chord <= l <= l_max` to the free variables.
    pub(crate) fn clamp(&self, x: &mut [f64]) {
        for i in 0..self.num_states() {
            let b = i * VARS_PER_STATE;
            if !self.fixed[b + DT] {
                x[b + DT] = x[b + DT].max(self.config.dt_min);
            }
            if !self.fixed[b + LENGTH] {
                let chord = distance(position(x, i), self.anchor);
                x[b + LENGTH] = x[b + LENGTH].min(self.config.l_max).max(chord);
            }
        }
    }

    pub fn trajectory_at(&self, x: &[f64]) -> Trajectory {
        let states = (0..self.num_states()).map(|i| TrajState::new(position(x, i), length(x, i), dt(x, i))).collect();
        Trajectory::new(states, self.anchor, TrajectoryKind::Optimized)
    }

    pub fn trajectory(&self) -> Trajectory {
        self.trajectory_at(&self.variables)
    }
}
