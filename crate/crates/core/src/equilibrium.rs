//! Competitive equilibrium with complexity-averse consumers.
//!
//! One good per state, log utility. A consumer chooses a partition and then
//! consumption constant on each of its blocks. Given a partition, log demand
//! spends the share `μ(b)` of wealth on block `b`, so every state in `b`
//! receives `μ(b)·w / p(b)`.

use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::car::{validate_cost, Belief, Cost, CostFunction};
use crate::error::{Error, Result};
use crate::rational::{approximate, from_f64, int, ratio, serde_rational_vec, to_f64, Rational};
use crate::statespace::{enumerate_partitions, Partition, StateSpace};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum UtilityTag {
    #[default]
    Log,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Consumer {
    #[serde(with = "serde_rational_vec")]
    pub endowment: Vec<Rational>,
    pub belief: Belief,
    pub cost: CostFunction,
    #[serde(default)]
    pub utility: UtilityTag,
}

impl Consumer {
    pub fn new(endowment: Vec<Rational>, belief: Belief, cost: CostFunction) -> Self {
        Consumer { endowment, belief, cost, utility: UtilityTag::Log }
    }

    pub fn wealth(&self, prices: &[Rational]) -> Rational {
        prices.iter().zip(&self.endowment).map(|(p, e)| p * e).sum()
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(try_from = "EconomyDoc", into = "EconomyDoc")]
pub struct Economy {
    n: usize,
    consumers: Vec<Consumer>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct EconomyDoc {
    consumers: Vec<Consumer>,
}

impl TryFrom<EconomyDoc> for Economy {
    type Error = Error;
    fn try_from(doc: EconomyDoc) -> Result<Self> {
        Economy::new(doc.consumers)
    }
}

impl From<Economy> for EconomyDoc {
    fn from(e: Economy) -> Self {
        EconomyDoc { consumers: e.consumers }
    }
}

/// Cost functions are validated by enumeration up to this many states.
const VALIDATION_CAP: usize = 8;

impl Economy {
    pub fn new(consumers: Vec<Consumer>) -> Result<Self> {
        let first = consumers.first().ok_or_else(|| Error::Hypothesis("economy has no consumers".into()))?;
        let n = first.endowment.len();
        let space = StateSpace::new(n)?;
        let mut aggregate = vec![Rational::zero(); n];
        for (i, c) in consumers.iter().enumerate() {
            for len in [c.endowment.len(), c.belief.n()] {
                if len != n {
                    return Err(Error::SpaceMismatch { expected: n, actual: len });
                }
            }
            if c.endowment.iter().any(Signed::is_negative) {
                return Err(Error::Hypothesis(format!("consumer {} has a negative endowment", i + 1)));
            }
            if c.endowment.iter().all(Zero::is_zero) {
                return Err(Error::ZeroWealth(i + 1));
            }
            if !c.belief.has_full_support() {
                return Err(Error::InvalidBelief(format!("consumer {} belief lacks full support", i + 1)));
            }
            let report = validate_cost(&c.cost, &space, VALIDATION_CAP)?;
            if let Some(v) = report.violations.first() {
                return Err(Error::InvalidCost(format!("consumer {}: {v}", i + 1)));
            }
            for (a, e) in aggregate.iter_mut().zip(&c.endowment) {
                *a += e;
            }
        }
        if let Some(w) = aggregate.iter().position(Zero::is_zero) {
            return Err(Error::Hypothesis(format!("aggregate endowment is zero in state {}", w + 1)));
        }
        Ok(Economy { n, consumers })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn consumers(&self) -> &[Consumer] {
        &self.consumers
    }

    pub fn aggregate_endowment(&self) -> Vec<Rational> {
        (0..self.n).map(|w| self.consumers.iter().map(|c| &c.endowment[w]).sum()).collect()
    }

    fn check_profile(&self, profile: &[Partition]) -> Result<()> {
        if profile.len() != self.consumers.len() {
            return Err(Error::Hypothesis(format!(
                "profile has {} partitions for {} consumers",
                profile.len(),
                self.consumers.len()
            )));
        }
        for s in profile {
            if s.n() != self.n {
                return Err(Error::SpaceMismatch { expected: self.n, actual: s.n() });
            }
            if !s.is_full() {
                return Err(Error::InvalidPartition("measurability partitions cover every state".into()));
            }
        }
        Ok(())
    }
}

fn check_prices(prices: &[Rational], n: usize) -> Result<()> {
    if prices.len() != n {
        return Err(Error::SpaceMismatch { expected: n, actual: prices.len() });
    }
    if prices.iter().any(|p| !p.is_positive()) {
        return Err(Error::Hypothesis("prices must be positive".into()));
    }
    Ok(())
}

/// Exact log demand of `consumer` constrained to be measurable w.r.t. `partition`.
pub fn demand(consumer: &Consumer, prices: &[Rational], partition: &Partition) -> Result<Vec<Rational>> {
    let n = consumer.endowment.len();
    check_prices(prices, n)?;
    if partition.n() != n || !partition.is_full() {
        return Err(Error::SpaceMismatch { expected: n, actual: partition.n() });
    }
    let wealth = consumer.wealth(prices);
    if !wealth.is_positive() {
        return Err(Error::ZeroWealth(0));
    }
    let mut out = vec![Rational::zero(); n];
    for block in partition.blocks() {
        let share = consumer.belief.prob_of_states(&block);
        let cost: Rational = block.iter().map(|&w| &prices[w]).sum();
        let level = share * &wealth / cost;
        for w in block {
            out[w] = level.clone();
        }
    }
    Ok(out)
}

struct Numeric {
    endowment: Vec<f64>,
    belief: Vec<f64>,
}

impl Numeric {
    fn of(c: &Consumer) -> Self {
        Numeric { endowment: c.endowment.iter().map(to_f64).collect(), belief: c.belief.probs().iter().map(to_f64).collect() }
    }

    fn demand(&self, prices: &[f64], blocks: &[Vec<usize>], out: &mut [f64]) {
        let wealth: f64 = prices.iter().zip(&self.endowment).map(|(p, e)| p * e).sum();
        for block in blocks {
            let share: f64 = block.iter().map(|&w| self.belief[w]).sum();
            let cost: f64 = block.iter().map(|&w| prices[w]).sum();
            for &w in block {
                out[w] += share * wealth / cost;
            }
        }
    }

    /// `Σ_b μ(b)·ln(μ(b)·w/p(b))`: expected log utility of the demand.
    fn indirect_utility(&self, prices: &[f64], blocks: &[Vec<usize>]) -> f64 {
        let wealth: f64 = prices.iter().zip(&self.endowment).map(|(p, e)| p * e).sum();
        blocks
            .iter()
            .map(|block| {
                let share: f64 = block.iter().map(|&w| self.belief[w]).sum();
                let cost: f64 = block.iter().map(|&w| prices[w]).sum();
                share * (share * wealth / cost).ln()
            })
            .sum()
    }
}

/// Indirect utility net of complexity cost; `None` for infinite cost.
pub fn partition_utility(consumer: &Consumer, prices: &[Rational], partition: &Partition) -> Result<Option<f64>> {
    check_prices(prices, consumer.endowment.len())?;
    let Cost::Finite(c) = consumer.cost.cost(partition) else { return Ok(None) };
    let p: Vec<f64> = prices.iter().map(to_f64).collect();
    Ok(Some(Numeric::of(consumer).indirect_utility(&p, &partition.blocks()) - to_f64(&c)))
}

#[derive(Clone, Debug, Serialize)]
pub struct BestResponse {
    pub partition: Partition,
    pub utility: f64,
    /// Every finite-cost partition with its net utility, best first.
    pub ranking: Vec<(Partition, f64)>,
}

/// Net utility maximizer; ties within `1e-12` go to fewer blocks.
pub fn best_partition_response(consumer: &Consumer, prices: &[Rational], cap: usize) -> Result<BestResponse> {
    let n = consumer.endowment.len();
    let mut ranking = Vec::new();
    for s in enumerate_partitions(&StateSpace::new(n)?, cap)? {
        if let Some(u) = partition_utility(consumer, prices, &s)? {
            ranking.push((s, u));
        }
    }
    // the trivial partition has cost zero, so the ranking is never empty
    ranking.sort_by(|a, b| {
        let d = b.1 - a.1;
        if d.abs() <= TIE {
            (a.0.num_blocks(), a.0.labels()).cmp(&(b.0.num_blocks(), b.0.labels()))
        } else {
            b.1.total_cmp(&a.1)
        }
    });
    let (partition, utility) = ranking[0].clone();
    Ok(BestResponse { partition, utility, ranking })
}

const TIE: f64 = 1e-12;

#[derive(Clone, Debug, Serialize)]
pub struct SolverOptions {
    /// Largest acceptable excess demand in any state.
    pub tolerance: f64,
    pub max_iterations: usize,
    /// Exponent of the multiplicative price update.
    pub step: f64,
    /// Prices are normalized so this state costs 1.
    pub numeraire: usize,
    /// Largest denominator tried when rationalizing prices.
    pub max_denominator: u64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions { tolerance: 1e-9, max_iterations: 200_000, step: 0.5, numeraire: 0, max_denominator: 1_000_000 }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct EquilibriumResult {
    #[serde(with = "serde_rational_vec")]
    pub prices: Vec<Rational>,
    pub allocation: Vec<Vec<String>>,
    #[serde(skip)]
    pub exact_allocation: Vec<Vec<Rational>>,
    pub partition_profile: Vec<Partition>,
    /// Largest absolute excess demand of the numeric solve.
    pub clearing_residual: f64,
    /// The rationalized prices clear every market exactly.
    pub exact: bool,
    pub iterations: usize,
    pub utilities: Vec<f64>,
}

impl EquilibriumResult {
    pub fn prices_f64(&self) -> Vec<f64> {
        self.prices.iter().map(to_f64).collect()
    }
}

/// `Σ_i c^i − Σ_i e^i` at exact prices.
pub fn excess_demand(economy: &Economy, profile: &[Partition], prices: &[Rational]) -> Result<Vec<Rational>> {
    economy.check_profile(profile)?;
    let mut z: Vec<Rational> = economy.aggregate_endowment().into_iter().map(|e| -e).collect();
    for (c, s) in economy.consumers.iter().zip(profile) {
        for (zw, d) in z.iter_mut().zip(demand(c, prices, s)?) {
            *zw += d;
        }
    }
    Ok(z)
}

/// Price-weighted excess demand; zero at every positive price vector.
pub fn walras_value(economy: &Economy, profile: &[Partition], prices: &[Rational]) -> Result<Rational> {
    Ok(excess_demand(economy, profile, prices)?.iter().zip(prices).map(|(z, p)| z * p).sum())
}

/// Iterations without a 0.1% residual improvement before giving up.
const STALL_LIMIT: usize = 2_000;

pub fn solve_given_profile(economy: &Economy, profile: &[Partition], opts: &SolverOptions) -> Result<EquilibriumResult> {
    economy.check_profile(profile)?;
    let n = economy.n;
    if opts.numeraire >= n {
        return Err(Error::StateOutOfRange { index: opts.numeraire, n });
    }
    let numeric: Vec<Numeric> = economy.consumers.iter().map(Numeric::of).collect();
    let blocks: Vec<Vec<Vec<usize>>> = profile.iter().map(Partition::blocks).collect();
    let supply: Vec<f64> = economy.aggregate_endowment().iter().map(to_f64).collect();
    let residual_at = |p: &[f64], d: &mut Vec<f64>| {
        d.iter_mut().for_each(|x| *x = 0.0);
        for (c, b) in numeric.iter().zip(&blocks) {
            c.demand(p, b, d);
        }
        d.iter().zip(&supply).map(|(x, s)| (x - s).abs()).fold(0.0, f64::max)
    };

    let mut p = vec![1.0; n];
    let mut d = vec![0.0; n];
    let mut step = opts.step;
    let mut residual = residual_at(&p, &mut d);
    let mut iterations = 0;
    let (mut best, mut since_best) = (residual, 0);
    while residual > opts.tolerance && iterations < opts.max_iterations {
        iterations += 1;
        // profiles without clearing prices stall or send relative prices off to 0 or ∞
        if residual < best * 0.999 {
            (best, since_best) = (residual, 0);
        } else {
            since_best += 1;
            if since_best > STALL_LIMIT {
                break;
            }
        }
        let spread = p.iter().fold(0.0f64, |m, x| m.max(x.abs().ln().abs()));
        if spread > 30.0 {
            break;
        }
        let next: Vec<f64> = p.iter().zip(&d).zip(&supply).map(|((p, d), s)| p * (d / s).powf(step)).collect();
        let scale = next[opts.numeraire];
        let next: Vec<f64> = next.iter().map(|x| x / scale).collect();
        let mut trial = vec![0.0; n];
        let r = residual_at(&next, &mut trial);
        if r.is_finite() && r < residual * 1.5 {
            p = next;
            d = trial;
            residual = r;
        } else {
            step *= 0.5;
            if step < 1e-6 {
                break;
            }
        }
    }
    if residual > opts.tolerance || !residual.is_finite() {
        return Err(Error::NonConvergence { iterations, residual });
    }

    let (prices, exact) = rationalize(economy, profile, &p, opts)?;
    let exact_allocation: Vec<Vec<Rational>> =
        economy.consumers.iter().zip(profile).map(|(c, s)| demand(c, &prices, s)).collect::<Result<_>>()?;
    let utilities = economy
        .consumers
        .iter()
        .zip(profile)
        .map(|(c, s)| partition_utility(c, &prices, s).map(|u| u.unwrap_or(f64::NEG_INFINITY)))
        .collect::<Result<_>>()?;
    Ok(EquilibriumResult {
        allocation: exact_allocation.iter().map(|v| v.iter().map(crate::rational::format_rational).collect()).collect(),
        exact_allocation,
        prices,
        partition_profile: profile.to_vec(),
        clearing_residual: residual,
        exact,
        iterations,
        utilities,
    })
}

/// Smallest-denominator rational prices near `p` that clear exactly, or the
/// binary value of `p` itself when none is found.
fn rationalize(economy: &Economy, profile: &[Partition], p: &[f64], opts: &SolverOptions) -> Result<(Vec<Rational>, bool)> {
    let mut denom = 10u64;
    loop {
        let limit = denom.min(opts.max_denominator);
        let candidate: Option<Vec<Rational>> = p.iter().map(|&x| approximate(x, limit)).collect();
        if let Some(candidate) = candidate {
            if candidate.iter().all(Signed::is_positive)
                && candidate[opts.numeraire].is_one()
                && excess_demand(economy, profile, &candidate)?.iter().all(Zero::is_zero)
            {
                return Ok((candidate, true));
            }
        }
        if limit >= opts.max_denominator {
            break;
        }
        denom = denom.saturating_mul(10);
    }
    let fallback: Option<Vec<Rational>> = p.iter().map(|&x| from_f64(x)).collect();
    Ok((fallback.ok_or_else(|| Error::Hypothesis("non-finite price".into()))?, false))
}

#[derive(Clone, Debug, Serialize)]
pub struct ProfileFailure {
    pub profile: Vec<Partition>,
    pub reason: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct CaceReport {
    /// Every equilibrium found, in profile enumeration order.
    pub equilibria: Vec<EquilibriumResult>,
    pub profiles_checked: usize,
    /// Profiles whose price solve failed.
    pub failures: Vec<ProfileFailure>,
}

pub const DEFAULT_PROFILE_CAP: usize = 200_000;

/// Enumerates partition profiles (finite-cost partitions only), solves each
/// for prices and keeps those where every consumer best-responds.
pub fn solve_cace(economy: &Economy, opts: &SolverOptions, cap: usize, profile_cap: usize) -> Result<CaceReport> {
    let space = StateSpace::new(economy.n)?;
    let all = enumerate_partitions(&space, cap)?;
    let options: Vec<Vec<Partition>> = economy
        .consumers
        .iter()
        .map(|c| all.iter().filter(|s| c.cost.cost(s) != Cost::Infinite).cloned().collect())
        .collect();
    let total = options.iter().try_fold(1usize, |acc, o| acc.checked_mul(o.len())).unwrap_or(usize::MAX);
    if total > profile_cap {
        return Err(Error::Hypothesis(format!("{total} partition profiles exceed the cap of {profile_cap}")));
    }
    let outcomes: Vec<(Vec<Partition>, Result<Option<EquilibriumResult>>)> = (0..total)
        .into_par_iter()
        .map(|mut index| {
            let profile: Vec<Partition> = options
                .iter()
                .map(|o| {
                    let s = o[index % o.len()].clone();
                    index /= o.len();
                    s
                })
                .collect();
            let outcome = check_profile(economy, &profile, opts, cap);
            (profile, outcome)
        })
        .collect();
    let mut equilibria = Vec::new();
    let mut failures = Vec::new();
    for (profile, outcome) in outcomes {
        match outcome {
            Ok(Some(r)) => equilibria.push(r),
            Ok(None) => {}
            Err(e) => failures.push(ProfileFailure { profile, reason: e.to_string() }),
        }
    }
    Ok(CaceReport { equilibria, profiles_checked: total, failures })
}

fn check_profile(economy: &Economy, profile: &[Partition], opts: &SolverOptions, cap: usize) -> Result<Option<EquilibriumResult>> {
    let r = solve_given_profile(economy, profile, opts)?;
    for (c, u) in economy.consumers.iter().zip(&r.utilities) {
        let best = best_partition_response(c, &r.prices, cap)?;
        if best.utility - u > 1e-9 {
            return Ok(None);
        }
    }
    Ok(Some(r))
}

/// Standard equilibrium: every consumer on the discrete partition.
pub fn standard_equilibrium(economy: &Economy, opts: &SolverOptions) -> Result<EquilibriumResult> {
    let profile = vec![Partition::discrete(economy.n); economy.consumers.len()];
    solve_given_profile(economy, &profile, opts)
}

/// Three states, one good, endowments `(1,0,0), (0,2,0), (0,0,3)`, uniform
/// beliefs and log utility. Consumer 1 finds separating state 3 from the
/// pair `{1,2}` cheap and any further distinction expensive; the others
/// face no cost.
pub fn three_consumer_economy() -> Economy {
    let n = 3;
    let part = |s: &str| s.parse::<Partition>().expect("valid literal");
    let c1 = CostFunction::finite_table(n, [
        (part("[[0,1],[2]]"), ratio(1, 20)),
        (part("[[0],[1,2]]"), ratio(1, 5)),
        (part("[[0,2],[1]]"), ratio(1, 5)),
        (part("[[0],[1],[2]]"), ratio(1, 5)),
    ])
    .expect("valid table");
    let endow = |w: usize, x: i64| {
        let mut v = vec![Rational::zero(); n];
        v[w] = int(x);
        v
    };
    Economy::new(vec![
        Consumer::new(endow(0, 1), Belief::uniform(n), c1),
        Consumer::new(endow(1, 2), Belief::uniform(n), CostFunction::zero()),
        Consumer::new(endow(2, 3), Belief::uniform(n), CostFunction::zero()),
    ])
    .expect("valid economy")
}

/// Utility gain of the discrete plan over `{{1,2},{3}}` for consumer 1, which
/// depends on `p₁, p₂` only: `(1/3)·ln((p₁+p₂)²/(4p₁p₂))`.
pub fn discrete_premium(p1: f64, p2: f64) -> f64 {
    ((p1 + p2).powi(2) / (4.0 * p1 * p2)).ln() / 3.0
}

/// The bundle is constant on every block.
pub fn is_measurable(bundle: &[Rational], partition: &Partition) -> bool {
    partition.blocks().iter().all(|b| b.iter().all(|&w| bundle[w] == bundle[b[0]]))
}

/// Probability-weighted log utility of an exact bundle.
pub fn expected_log_utility(belief: &Belief, bundle: &[Rational]) -> f64 {
    belief.probs().iter().zip(bundle).map(|(m, c)| to_f64(m) * to_f64(c).ln()).sum()
}
