//! Simulated annealing over feasible placements.
//!
//! The search starts from a latency-ordered first-fit placement and only
//! ever visits placements that keep every initially served request served
//! within all constraints. Worsening neighbors are accepted with
//! probability `exp((c1 - c2) / T)`; the temperature cools geometrically.

use std::time::Instant;

use rand::seq::{IndexedRandom, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::heuristics::first_fit;
use super::placement::Placement;
use super::{finish, SolveReport, SolverError, SolverKind};
use crate::model::{Instance, Role, ServerRef, Solution, EPS};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SaParams {
    pub t0: f64,
    pub t_min: f64,
    /// Cooling factor applied after each inner loop.
    pub alpha: f64,
    /// Neighbors evaluated per temperature.
    pub max_iterations: usize,
    pub seed: u64,
    /// Relative odds of the reassign, migrate and consolidate moves.
    pub move_weights: [f64; 3],
    /// Attempts before a neighbor falls back to the current placement.
    pub max_retries: usize,
}

impl Default for SaParams {
    fn default() -> Self {
        SaParams {
            t0: 100.0,
            t_min: 0.1,
            alpha: 0.9,
            max_iterations: 50,
            seed: 0,
            move_weights: [0.5, 0.3, 0.2],
            max_retries: 20,
        }
    }
}

impl SaParams {
    pub fn with_seed(seed: u64) -> SaParams {
        SaParams {
            seed,
            ..SaParams::default()
        }
    }

    pub fn validate(&self) -> Result<(), SolverError> {
        let bad = |m: &str| Err(SolverError::InvalidParams(m.to_string()));
        if !(self.t_min > 0.0) || !(self.t0 > self.t_min) {
            return bad("need t0 > t_min > 0");
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return bad("alpha must lie in (0, 1)");
        }
        if self.max_iterations == 0 {
            return bad("max_iterations must be at least 1");
        }
        if self.move_weights.iter().any(|w| !(*w >= 0.0))
            || self.move_weights.iter().sum::<f64>() <= 0.0
        {
            return bad("move weights must be non-negative and not all zero");
        }
        Ok(())
    }
}

/// Temperatures of the outer loop: `t0, alpha*t0, ...` while above `t_min`.
pub fn cooling_schedule(params: &SaParams) -> impl Iterator<Item = f64> {
    let (alpha, t_min) = (params.alpha, params.t_min);
    std::iter::successors(Some(params.t0), move |t| Some(t * alpha)).take_while(move |&t| t > t_min)
}

/// Latency-ordered first-fit placement; requests that fit nowhere stay unserved.
pub fn sa_initial_solution(instance: &Instance) -> Solution {
    first_fit(instance).to_solution()
}

#[derive(Clone, Copy, Debug)]
enum Move {
    Reassign,
    Migrate,
    Consolidate,
}

fn pick_move(rng: &mut impl Rng, weights: &[f64; 3]) -> Move {
    let total: f64 = weights.iter().sum();
    let x = rng.random::<f64>() * total;
    if x < weights[0] {
        Move::Reassign
    } else if x < weights[0] + weights[1] {
        Move::Migrate
    } else {
        Move::Consolidate
    }
}

/// Moves one role of one random request to another feasible server.
fn reassign(p: &mut Placement<'_>, rng: &mut impl Rng) -> bool {
    let served = p.served_positions();
    let Some(&pos) = served.choose(rng) else {
        return false;
    };
    let role = if rng.random::<bool>() {
        Role::Primary
    } else {
        Role::Backup
    };
    let old = p.unplace(pos, role).expect("served request has both roles");
    let options: Vec<ServerRef> = p
        .instance()
        .servers()
        .filter(|&s| s != old && p.can_place(pos, role, s))
        .collect();
    match options.choose(rng) {
        Some(&s) => {
            p.place(pos, role, s);
            true
        }
        None => {
            p.place(pos, role, old);
            false
        }
    }
}

/// Places every (currently unplaced) member on `target`, or none of them.
fn move_members(p: &mut Placement<'_>, members: &[usize], role: Role, target: ServerRef) -> bool {
    for (i, &pos) in members.iter().enumerate() {
        if !p.can_place(pos, role, target) {
            for &undo in &members[..i] {
                p.unplace(undo, role);
            }
            return false;
        }
        p.place(pos, role, target);
    }
    true
}

/// Moves one VNF slot, with all requests it serves, to another server.
fn migrate(p: &mut Placement<'_>, rng: &mut impl Rng) -> bool {
    let slots: Vec<_> = p.slots().map(|(k, _)| *k).collect();
    let Some(&slot) = slots.choose(rng) else {
        return false;
    };
    let from = slot.server_ref();
    let members = p.members(&slot);
    for &m in &members {
        p.unplace(m, slot.role);
    }
    let mut targets: Vec<ServerRef> = p.instance().servers().filter(|&s| s != from).collect();
    targets.shuffle(rng);
    for target in targets {
        if move_members(p, &members, slot.role, target) {
            return true;
        }
    }
    for &m in &members {
        p.place(m, slot.role, from);
    }
    false
}

/// Folds one slot into another slot of the same type and role that has
/// enough spare throughput, freeing the first slot's instances.
fn consolidate(p: &mut Placement<'_>, rng: &mut impl Rng) -> bool {
    let slots: Vec<_> = p.slots().map(|(k, _)| *k).collect();
    let Some(&slot) = slots.choose(rng) else {
        return false;
    };
    let from = slot.server_ref();
    let res = p.instance().resources();
    let load = p.load(&slot);
    let mut hosts: Vec<_> = slots
        .iter()
        .filter(|k| {
            k.vnf_type == slot.vnf_type
                && k.role == slot.role
                && k.server_ref() != from
                && res.instances_for(p.load(k) + load) == res.instances_for(p.load(k))
        })
        .copied()
        .collect();
    if hosts.is_empty() {
        return false;
    }
    hosts.shuffle(rng);
    let members = p.members(&slot);
    for &m in &members {
        p.unplace(m, slot.role);
    }
    for host in hosts {
        if move_members(p, &members, slot.role, host.server_ref()) {
            return true;
        }
    }
    for &m in &members {
        p.place(m, slot.role, from);
    }
    false
}

fn neighbor<'a>(current: &Placement<'a>, rng: &mut impl Rng, params: &SaParams) -> Placement<'a> {
    for _ in 0..params.max_retries {
        let mut next = current.clone();
        let moved = match pick_move(rng, &params.move_weights) {
            Move::Reassign => reassign(&mut next, rng),
            Move::Migrate => migrate(&mut next, rng),
            Move::Consolidate => consolidate(&mut next, rng),
        };
        if moved {
            return next;
        }
    }
    current.clone()
}

/// One random feasible neighbor of `solution`, or `solution` itself when no
/// move applies within the retry budget.
pub fn sa_neighbor(
    solution: &Solution,
    instance: &Instance,
    rng: &mut impl Rng,
    params: &SaParams,
) -> Solution {
    match Placement::from_solution(instance, solution) {
        Some(p) => neighbor(&p, rng, params).to_solution(),
        None => solution.clone(),
    }
}

pub fn solve_sa(instance: &Instance, params: &SaParams) -> Result<SolveReport, SolverError> {
    params.validate()?;
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);

    let mut current = first_fit(instance);
    let mut c1 = current.cost().total;
    let mut best = current.clone();
    let mut best_cost = c1;
    let mut evaluated = 0u64;

    for t in cooling_schedule(params) {
        for _ in 0..params.max_iterations {
            let next = neighbor(&current, &mut rng, params);
            evaluated += 1;
            let c2 = next.cost().total;
            let accept = c2 <= c1 || rng.random::<f64>() < ((c1 - c2) / t).exp();
            if accept {
                current = next;
                c1 = c2;
                if c1 < best_cost - EPS {
                    best = current.clone();
                    best_cost = c1;
                }
            }
        }
    }
    Ok(finish(SolverKind::Sa, &best, evaluated, started))
}
