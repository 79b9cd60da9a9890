//! Seeded random instances for property tests and scenario generation.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::acts::Act;
use crate::car::{Belief, CarModel, CostFunction, UtilityIndex};
use crate::contract::ContractProblem;
use crate::error::Result;
use crate::rational::{int, ratio, Rational};
use crate::statespace::{enumerate_partitions, Partition, StateSpace, DEFAULT_ENUMERATION_CAP};

/// Integer weights in `1..=8`, normalized; always full support.
pub fn belief<R: Rng>(rng: &mut R, n: usize) -> Belief {
    let w: Vec<i64> = (0..n).map(|_| rng.gen_range(1..=8)).collect();
    let total: i64 = w.iter().sum();
    Belief::new(w.iter().map(|&x| ratio(x, total)).collect()).expect("weights are positive")
}

/// Raw nonnegative draws per partition, zero on the trivial one.
fn raw_costs<R: Rng>(rng: &mut R, parts: &[Partition]) -> Vec<Rational> {
    parts.iter().map(|s| if s.num_blocks() == 1 { int(0) } else { ratio(rng.gen_range(0..=12), 4) }).collect()
}

/// `C(S) = max{r(T) : S refines T}`, which is monotone for any draws `r`.
fn monotone_hull(parts: &[Partition], raw: &[Rational]) -> Vec<Rational> {
    parts
        .iter()
        .map(|s| {
            parts
                .iter()
                .zip(raw)
                .filter(|(t, _)| s.refines(t).expect("same ground set"))
                .map(|(_, r)| r.clone())
                .max()
                .expect("S refines itself")
        })
        .collect()
}

fn all_partitions(n: usize) -> Vec<Partition> {
    enumerate_partitions(&StateSpace::new(n).expect("n > 0"), DEFAULT_ENUMERATION_CAP).expect("small n")
}

fn full_table(n: usize, parts: &[Partition], costs: Vec<Rational>) -> CostFunction {
    CostFunction::finite_table(n, parts.iter().cloned().zip(costs)).expect("valid table")
}

/// A monotone table listing every partition of `n` states.
pub fn monotone_table<R: Rng>(rng: &mut R, n: usize) -> CostFunction {
    let parts = all_partitions(n);
    let raw = raw_costs(rng, &parts);
    full_table(n, &parts, monotone_hull(&parts, &raw))
}

/// A table that breaks monotonicity on at least one covering pair.
pub fn non_monotone_table<R: Rng>(rng: &mut R, n: usize) -> CostFunction {
    assert!(n >= 2, "needs a non-trivial partition");
    let parts = all_partitions(n);
    let mut costs = monotone_hull(&parts, &raw_costs(rng, &parts));
    let discrete = parts.iter().position(|s| s.num_blocks() == n).expect("listed");
    let coarse: Vec<usize> = (0..parts.len()).filter(|&i| parts[i].num_blocks() == n - 1).collect();
    let bump = *coarse.choose(rng).expect("n >= 2");
    costs[bump] = &costs[discrete] + int(1);
    full_table(n, &parts, costs)
}

pub fn utility<R: Rng>(rng: &mut R) -> UtilityIndex {
    if rng.gen_bool(0.5) {
        UtilityIndex::identity()
    } else {
        UtilityIndex::new(ratio(rng.gen_range(1..=6), 2), int(rng.gen_range(-3..=3))).expect("positive scale")
    }
}

pub fn model<R: Rng>(rng: &mut R, n: usize) -> CarModel {
    let u = utility(rng);
    let mu = belief(rng, n);
    let cost = monotone_table(rng, n);
    CarModel::new(StateSpace::new(n).expect("n > 0"), u, mu, cost).expect("monotone by construction")
}

/// Two models sharing `u` and `μ` with `C¹ ≤ C²` on every partition.
pub fn dominated_pair<R: Rng>(rng: &mut R, n: usize) -> (CarModel, CarModel) {
    let parts = all_partitions(n);
    let low = monotone_hull(&parts, &raw_costs(rng, &parts));
    let extra = monotone_hull(&parts, &raw_costs(rng, &parts));
    let high: Vec<Rational> = low.iter().zip(&extra).map(|(a, b)| a + b).collect();
    let m1 = model_with(rng, n, full_table(n, &parts, low));
    let m2 = m1.with_cost(full_table(n, &parts, high)).expect("sum of monotone tables");
    (m1, m2)
}

/// Two models sharing `u` and `μ` where `C¹ > C²` on some partition.
pub fn undominated_pair<R: Rng>(rng: &mut R, n: usize) -> (CarModel, CarModel) {
    let (low, high) = dominated_pair(rng, n);
    let parts = all_partitions(n);
    // adding a positive constant off the trivial partition keeps monotonicity
    let lift = ratio(rng.gen_range(1..=4), 4);
    let lifted: Vec<Rational> = parts
        .iter()
        .map(|s| {
            let c = high.cost(s).finite().expect("finite table").clone();
            if s.num_blocks() == 1 { c } else { c + &lift }
        })
        .collect();
    let m1 = low.with_cost(full_table(n, &parts, lifted)).expect("monotone");
    (m1, low)
}

fn model_with<R: Rng>(rng: &mut R, n: usize, cost: CostFunction) -> CarModel {
    let u = utility(rng);
    let mu = belief(rng, n);
    CarModel::new(StateSpace::new(n).expect("n > 0"), u, mu, cost).expect("monotone by construction")
}

/// Every act with outcomes in `0..=max` on `n` states.
pub fn grid_acts(n: usize, max: i64) -> Vec<Act> {
    let mut out = vec![vec![]];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|prefix: Vec<i64>| {
                (0..=max).map(move |x| {
                    let mut v = prefix.clone();
                    v.push(x);
                    v
                })
            })
            .collect();
    }
    out.iter().map(|v| Act::from_ints(v)).collect()
}

/// Random acts with integer outcomes in `0..=max`.
pub fn acts<R: Rng>(rng: &mut R, n: usize, count: usize, max: i64) -> Vec<Act> {
    (0..count)
        .map(|_| {
            let v: Vec<i64> = (0..n).map(|_| rng.gen_range(0..=max)).collect();
            Act::from_ints(&v)
        })
        .collect()
}

/// Three-state belief whose probabilities are pairwise distinct.
fn distinct_belief<R: Rng>(rng: &mut R) -> Belief {
    let mut w: Vec<i64> = (1..=12).collect();
    w.shuffle(rng);
    w.truncate(3);
    let total: i64 = w.iter().sum();
    Belief::new(w.iter().map(|&x| ratio(x, total)).collect()).expect("positive weights")
}

/// `ū ∈ [5, 10]`, `c ∈ [1/10, 1]`, `δ ∈ [1/100, 1]`.
pub fn contract_problem<R: Rng>(rng: &mut R) -> Result<ContractProblem> {
    loop {
        let mu0 = distinct_belief(rng);
        let mu1 = distinct_belief(rng);
        if mu0 == mu1 {
            continue;
        }
        let c = ratio(rng.gen_range(1..=10), 10);
        let u_bar = ratio(rng.gen_range(20..=40), 4);
        let delta = ratio(rng.gen_range(1..=100), 100);
        return ContractProblem::new(mu0, mu1, c, u_bar, delta);
    }
}
