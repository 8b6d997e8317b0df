//! Normalized sum-rate formulas, baselines and net sum-rate bounds.
//!
//! Analytic values are exact rationals taken in the `eps -> 0` limit; the
//! `(1 - eps)` scaled value is reported next to them as a float.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rand::seq::SliceRandom;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{ConflictGraph, UserId};
use crate::rng;
use crate::scheduler::ColorAssignment;
use crate::selection::SelectionResult;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Formula {
    Dc,
    Conservative,
    AggressiveSum,
    AggressiveRatio,
    Empirical,
    Migs,
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Formula::Dc => "dc",
            Formula::Conservative => "conservative",
            Formula::AggressiveSum => "aggressive_sum",
            Formula::AggressiveRatio => "aggressive_ratio",
            Formula::Empirical => "empirical",
            Formula::Migs => "migs",
        })
    }
}

/// A normalized sum-rate.
#[derive(Clone, Debug, PartialEq)]
pub struct AlphaReport {
    pub ideal: BigRational,
    pub eps_scaled: f64,
    pub formula: Formula,
}

impl AlphaReport {
    fn analytic(ideal: BigRational, eps: f64, formula: Formula) -> Self {
        let eps_scaled = (1.0 - eps) * to_f64(&ideal);
        AlphaReport { ideal, eps_scaled, formula }
    }

    fn exact(ideal: BigRational, formula: Formula) -> Self {
        let eps_scaled = to_f64(&ideal);
        AlphaReport { ideal, eps_scaled, formula }
    }

    pub fn ideal_f64(&self) -> f64 {
        to_f64(&self.ideal)
    }

    /// Recompute `eps_scaled` as `(1 - eps) * ideal`.
    pub fn scaled(mut self, eps: f64) -> Self {
        self.eps_scaled = (1.0 - eps) * to_f64(&self.ideal);
        self
    }
}

pub fn ratio(num: usize, den: usize) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

pub fn to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// Multicoloring the conflict graph directly: `1 / (Δ + 1)`.
pub fn alpha_dc(g: &ConflictGraph) -> AlphaReport {
    AlphaReport::exact(ratio(1, g.max_degree() + 1), Formula::Dc)
}

/// `1 / (Δ_{G_ρ} + 1)` over the consolidated graph.
pub fn alpha_conservative(sel: &SelectionResult, eps: f64) -> AlphaReport {
    AlphaReport::analytic(
        ratio(1, sel.consolidated.max_degree() + 1),
        eps,
        Formula::Conservative,
    )
}

fn check_represented(sel: &SelectionResult) -> Result<()> {
    match sel.representation.iter().find(|(_, l)| l.is_empty()) {
        Some((u, _)) => Err(Error::Invariant(format!("user {u} has no vertex"))),
        None => Ok(()),
    }
}

/// `min_v Σ_{w ∋ v} 1 / (δ_w + 1)`.
pub fn alpha_aggressive_sum(sel: &SelectionResult, eps: f64) -> Result<AlphaReport> {
    check_represented(sel)?;
    let cg = &sel.consolidated;
    let ideal = sel
        .representation
        .values()
        .map(|list| {
            list.iter()
                .fold(BigRational::zero(), |acc, &w| acc + ratio(1, cg.degree(w) + 1))
        })
        .min()
        .unwrap_or_else(BigRational::one);
    Ok(AlphaReport::analytic(ideal, eps, Formula::AggressiveSum))
}

/// `min_v a(v) / Δ_{G_ρ}`, capped at one (and one when Δ is zero).
pub fn alpha_aggressive_ratio(sel: &SelectionResult) -> Result<AlphaReport> {
    check_represented(sel)?;
    let delta = sel.consolidated.max_degree();
    let ideal = if delta == 0 {
        BigRational::one()
    } else {
        ratio(sel.min_appearances(), delta).min(BigRational::one())
    };
    Ok(AlphaReport::exact(ideal, Formula::AggressiveRatio))
}

/// `min_v d_v / k` where `d_v` counts slots over every vertex holding `v`.
pub fn alpha_empirical(assign: &ColorAssignment, sel: &SelectionResult) -> AlphaReport {
    let worst = sel
        .representation
        .values()
        .map(|list| list.iter().map(|&w| assign.count(w)).sum::<usize>())
        .min()
        .unwrap_or(assign.k);
    AlphaReport::exact(ratio(worst, assign.k.max(1)), Formula::Empirical)
}

/// Per-user active slot counts of the greedy maximal scheduler.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MsOutcome {
    pub slots: usize,
    pub counts: Vec<u64>,
}

/// Greedy maximal scheduling with every user backlogged: each slot scans a
/// fresh uniform permutation and activates users with no active neighbor.
pub fn ms_schedule(g: &ConflictGraph, slots: usize, seed: u64) -> Result<MsOutcome> {
    if slots == 0 {
        return Err(crate::error::invalid("the maximal scheduler needs at least one slot"));
    }
    let mut rng = rng::stream(seed, 0);
    let mut order: Vec<UserId> = g.users().collect();
    let mut counts = vec![0u64; g.n()];
    let mut active = vec![false; g.n()];
    for slot in 0..slots {
        order.shuffle(&mut rng);
        active.iter_mut().for_each(|a| *a = false);
        for &u in &order {
            if g.adj(u).iter().all(|w| !active[w.0]) {
                active[u.0] = true;
                counts[u.0] += 1;
            }
        }
        if let Some(u) = g
            .users()
            .find(|&u| !active[u.0] && g.adj(u).iter().all(|w| !active[w.0]))
        {
            return Err(Error::Invariant(format!(
                "slot {slot} is not maximal: user {u} could still transmit"
            )));
        }
    }
    Ok(MsOutcome { slots, counts })
}

/// `min_v count_v / T`.
pub fn alpha_ms(outcome: &MsOutcome) -> AlphaReport {
    let worst = outcome.counts.iter().copied().min().unwrap_or(outcome.slots as u64);
    AlphaReport::exact(
        BigRational::new(BigInt::from(worst), BigInt::from(outcome.slots)),
        Formula::Migs,
    )
}

/// Per-slot net sum-rate bounds.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NetRateBounds {
    pub lower: f64,
    pub upper: f64,
    pub capacities: Vec<f64>,
}

/// Worst case: members of an active sub-network time-share (`C_i / m`).
/// Best case: every member of an active sub-network gets `C_i`.
pub fn net_rate_bounds(
    assign: &ColorAssignment,
    sel: &SelectionResult,
    capacities: &[f64],
) -> Result<NetRateBounds> {
    if capacities.len() < sel.consolidated.n_users() {
        return Err(crate::error::invalid(format!(
            "{} capacities given for {} users",
            capacities.len(),
            sel.consolidated.n_users()
        )));
    }
    let (mut lower, mut upper) = (0.0, 0.0);
    for (w, v) in sel.consolidated.vertices().iter().enumerate() {
        let held = assign.count(w) as f64;
        let total: f64 = v.members.iter().map(|m| capacities[m.0]).sum();
        upper += held * total;
        lower += held * total / v.members.len() as f64;
    }
    let k = assign.k.max(1) as f64;
    Ok(NetRateBounds {
        lower: lower / k,
        upper: upper / k,
        capacities: capacities.to_vec(),
    })
}

/// Net sum-rate of the maximal scheduler; single users never time-share.
pub fn ms_net_rate(outcome: &MsOutcome, capacities: &[f64]) -> NetRateBounds {
    let total: f64 = outcome
        .counts
        .iter()
        .zip(capacities)
        .map(|(&c, &cap)| c as f64 * cap)
        .sum();
    let rate = total / outcome.slots as f64;
    NetRateBounds {
        lower: rate,
        upper: rate,
        capacities: capacities.to_vec(),
    }
}
