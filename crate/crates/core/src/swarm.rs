//! Binary PSO kinematics: velocity clamp, sigmoid transfer, velocity and
//! position updates, and personal/global best tracking.
//!
//! Positions are bit vectors; velocities stay real-valued. A velocity
//! component is mapped through the logistic sigmoid to the probability of
//! setting that position bit, so clamping velocities to `[-v_max, v_max]`
//! keeps every bit-set probability away from 0 and 1.

use rand::Rng;

use crate::cnf::{Assignment, CnfFormula};

/// Binary PSO coefficients.
///
/// The defaults (`omega = 1`, `cognitive = social = 2`, `v_max = 4`) follow
/// the usual binary-PSO convention: acceleration factors distributed over
/// `[0, 2]` and transfer probabilities confined to roughly `(0.018, 0.982)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PsoParams {
    /// Inertia weight applied to the previous velocity.
    pub omega: f64,
    /// Cognitive coefficient: pull toward the particle's own best.
    pub cognitive: f64,
    /// Social coefficient: pull toward the swarm's best.
    pub social: f64,
    /// Componentwise velocity bound, must be positive.
    pub v_max: f64,
}

impl Default for PsoParams {
    fn default() -> Self {
        PsoParams { omega: 1.0, cognitive: 2.0, social: 2.0, v_max: 4.0 }
    }
}

/// Clamps `v` into `[-v_max, v_max]`.
pub fn clamp_velocity(v: f64, v_max: f64) -> f64 {
    debug_assert!(v_max > 0.0);
    v.clamp(-v_max, v_max)
}

/// Logistic transfer `1 / (1 + exp(-v))`, strictly increasing into (0, 1).
pub fn sigmoid(v: f64) -> f64 {
    1.0 / (1.0 + (-v).exp())
}

/// One velocity component update:
/// `clamp(omega * v + cognitive * r_cog * (pbest - x) + social * r_soc * (gbest - x))`
/// with position bits entering the differences as 0.0/1.0.
pub fn velocity_step(
    v: f64,
    position_bit: bool,
    pbest_bit: bool,
    gbest_bit: bool,
    r_cognitive: f64,
    r_social: f64,
    params: &PsoParams,
) -> f64 {
    let x = position_bit as u8 as f64;
    let p = pbest_bit as u8 as f64;
    let g = gbest_bit as u8 as f64;
    let raw = params.omega * v
        + params.cognitive * r_cognitive * (p - x)
        + params.social * r_social * (g - x);
    clamp_velocity(raw, params.v_max)
}

/// Stochastic position rule for one bit: set iff `draw < sigmoid(v)`.
pub fn position_bit(v: f64, draw: f64) -> bool {
    draw < sigmoid(v)
}

/// Samples a full position from a velocity vector, one fresh uniform draw
/// per dimension.
pub fn update_position(velocity: &[f64], rng: &mut impl Rng) -> Assignment {
    Assignment::from_bits(
        velocity
            .iter()
            .map(|&v| position_bit(v, rng.random()))
            .collect::<Vec<bool>>(),
    )
}

/// The best position any particle has reached so far.
#[derive(Debug, Clone, PartialEq)]
pub struct GlobalBest {
    pub position: Assignment,
    pub fitness: usize,
}

/// One candidate solution: a position, its velocity, and the best position
/// this particle has reached (pBest).
#[derive(Debug, Clone, PartialEq)]
pub struct Particle {
    pub position: Assignment,
    pub velocity: Vec<f64>,
    pub best_position: Assignment,
    pub best_fitness: usize,
}

impl Particle {
    /// A freshly seeded particle: its own position is its personal best.
    pub fn new(position: Assignment, fitness: usize, velocity: Vec<f64>) -> Self {
        assert_eq!(position.len(), velocity.len(), "position/velocity dimension mismatch");
        Particle {
            best_position: position.clone(),
            best_fitness: fitness,
            position,
            velocity,
        }
    }

    /// Updates every velocity component with fresh cognitive/social draws
    /// (independent per dimension), clamping into `[-v_max, v_max]`.
    pub fn update_velocity(&mut self, gbest: &GlobalBest, params: &PsoParams, rng: &mut impl Rng) {
        assert_eq!(
            self.position.len(),
            gbest.position.len(),
            "particle/global-best dimension mismatch"
        );
        for d in 0..self.velocity.len() {
            let r_cognitive: f64 = rng.random();
            let r_social: f64 = rng.random();
            self.velocity[d] = velocity_step(
                self.velocity[d],
                self.position.bit(d),
                self.best_position.bit(d),
                gbest.position.bit(d),
                r_cognitive,
                r_social,
                params,
            );
        }
    }

    /// Resamples the position from the current velocity.
    pub fn update_position(&mut self, rng: &mut impl Rng) {
        self.position = update_position(&self.velocity, rng);
    }

    /// Re-evaluates the current position and promotes it to personal best
    /// (and the personal best to global best) on strict improvement; ties
    /// keep the incumbent. Returns the current position's fitness.
    pub fn refresh_bests(&mut self, gbest: &mut GlobalBest, formula: &CnfFormula) -> usize {
        let fitness = formula
            .evaluate(&self.position)
            .expect("particle dimension matches formula");
        if fitness > self.best_fitness {
            self.best_fitness = fitness;
            self.best_position = self.position.clone();
        }
        if self.best_fitness > gbest.fitness {
            gbest.fitness = self.best_fitness;
            gbest.position = self.best_position.clone();
        }
        fitness
    }
}
