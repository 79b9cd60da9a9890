//! Conditional preferences after an event: Bayes' rule, the minimal
//! conditional complexity cost, and dynamic-consistency diagnostics.
//!
//! After `E` the cost of `f` is the cheapest unconditional cost among
//! partitions `R` of the whole space with `R|E = S^{f|E}`, divided by `μ(E)`.
//!
//! Every block of such an `R` either meets `E` in exactly one block of
//! `S^{f|E}` or lies outside `E`. Attaching each outside state to one of the
//! on-`E` blocks gives a coarser compatible partition, so for a monotone cost
//! the minimum is attained among these attachments: `k^m` candidates for `k`
//! on-`E` blocks and `m` outside states. Sending every outside state to the
//! same block (the acts `fEx`) is not enough in general; see
//! [`Method::SingleMerge`].

use std::cmp::Ordering;
use std::collections::HashMap;
use std::sync::RwLock;

use num_traits::{One, Zero};
use serde::Serialize;

use crate::acts::{minimal_extensions, Act};
use crate::car::{serde_ordering, Belief, CarModel, Cost, Value};
use crate::error::{Error, Result};
use crate::rational::{int, serde_rational, Rational};
use crate::statespace::{Event, Partition, PartitionIter, DEFAULT_ENUMERATION_CAP};

/// Posterior after `event`.
pub fn bayes(mu: &Belief, event: &Event) -> Result<Belief> {
    if event.n() != mu.n() {
        return Err(Error::SpaceMismatch { expected: mu.n(), actual: event.n() });
    }
    let pe = mu.prob_of(event);
    if pe.is_zero() {
        return Err(Error::ZeroProbabilityEvent);
    }
    let mask = event.mask();
    let probs = mu
        .probs()
        .iter()
        .zip(mask)
        .map(|(p, inside)| if inside { p / &pe } else { Rational::zero() })
        .collect();
    Belief::new(probs)
}

/// How the minimum over compatible partitions is searched.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    /// Attachment witnesses; exact for monotone costs.
    Attachment,
    /// Every partition of the space; exact for any cost, needs `n ≤ cap`.
    Enumeration,
    /// Only the partitions of the acts `fEx`, `x ∈ f(E)`. An upper bound that
    /// can be strictly above the minimum even for monotone costs.
    SingleMerge,
    /// Attachment for validated models, enumeration otherwise.
    Auto,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ConditionalCost {
    /// `C(R)/μ(E)` (or `C(R)` with the divisor disabled).
    pub cost: Cost,
    /// `C(R)` of the witness.
    pub unconditional: Cost,
    /// A minimizing partition `R` of the whole space.
    pub witness: Partition,
}

/// Minimal conditional cost of the on-event partition `restricted`.
pub fn conditional_cost_of(
    model: &CarModel,
    event: &Event,
    restricted: &Partition,
    method: Method,
    cap: usize,
) -> Result<ConditionalCost> {
    let pe = model.belief().prob_of(event);
    if pe.is_zero() {
        return Err(Error::ZeroProbabilityEvent);
    }
    let (unconditional, witness) = minimize_compatible(model, event, restricted, method, cap)?;
    Ok(ConditionalCost { cost: unconditional.divided(&pe), unconditional, witness })
}

fn minimize_compatible(
    model: &CarModel,
    event: &Event,
    restricted: &Partition,
    method: Method,
    cap: usize,
) -> Result<(Cost, Partition)> {
    let n = model.n();
    if restricted.n() != n || event.n() != n {
        return Err(Error::SpaceMismatch { expected: n, actual: restricted.n() });
    }
    if restricted.ground() != *event {
        return Err(Error::GroundMismatch);
    }
    let method = match method {
        Method::Auto if model.is_validated() => Method::Attachment,
        Method::Auto => Method::Enumeration,
        m => m,
    };
    let mut best: Option<(Cost, Partition)> = None;
    let mut consider = |r: Partition| {
        let c = model.cost(&r);
        if best.as_ref().is_none_or(|(b, _)| c < *b) {
            best = Some((c, r));
        }
    };
    match method {
        Method::Enumeration => {
            if n > cap {
                return Err(Error::CapExceeded { n, cap });
            }
            for r in PartitionIter::new(&model.space().full_event()) {
                if r.restrict(event)? == *restricted {
                    consider(r);
                }
            }
        }
        Method::SingleMerge | Method::Attachment => {
            let labels = restricted.labels();
            let outside: Vec<usize> = (0..n).filter(|&i| labels[i].is_none()).collect();
            let blocks = restricted.blocks();
            let k = blocks.len();
            // single merges first, largest block first, so ties report them
            let mut order: Vec<usize> = (0..k).collect();
            order.sort_by_key(|&b| std::cmp::Reverse(blocks[b].len()));
            let build = |assign: &dyn Fn(usize) -> usize| {
                let full: Vec<usize> = (0..n).map(|i| labels[i].unwrap_or_else(|| assign(i))).collect();
                Partition::from_full_labels(&full)
            };
            for &b in &order {
                consider(build(&|_| b));
            }
            if method == Method::Attachment && k > 1 && outside.len() > 1 {
                let m = outside.len();
                let mut digits = vec![0usize; m];
                let position: HashMap<usize, usize> = outside.iter().enumerate().map(|(j, &s)| (s, j)).collect();
                loop {
                    if digits.iter().any(|&d| d != digits[0]) {
                        consider(build(&|i| digits[position[&i]]));
                    }
                    let mut j = 0;
                    while j < m {
                        digits[j] += 1;
                        if digits[j] < k {
                            break;
                        }
                        digits[j] = 0;
                        j += 1;
                    }
                    if j == m {
                        break;
                    }
                }
            }
        }
        Method::Auto => unreachable!(),
    }
    Ok(best.expect("the restricted partition always has a compatible extension"))
}

/// `min{C(R)/μ(E) : R|E = S^{f|E}}`.
pub fn minimal_conditional_cost(model: &CarModel, event: &Event, f: &Act) -> Result<Cost> {
    let restricted = f.induced_partition().restrict(event)?;
    Ok(conditional_cost_of(model, event, &restricted, Method::Auto, DEFAULT_ENUMERATION_CAP)?.cost)
}

/// `E_{μ_E}[u(f)] − C_{E,μ}(σ(f))`.
pub fn conditional_evaluate(model: &CarModel, event: &Event, f: &Act) -> Result<Value> {
    ConditionalModel::new(model, event)?.evaluate(f)
}

/// A model conditioned on an event, with conditional costs cached per
/// on-event partition.
#[derive(Debug)]
pub struct ConditionalModel {
    base: CarModel,
    event: Event,
    posterior: Belief,
    event_prob: Rational,
    divide: bool,
    method: Method,
    cap: usize,
    cache: RwLock<HashMap<Partition, ConditionalCost>>,
}

impl ConditionalModel {
    pub fn new(model: &CarModel, event: &Event) -> Result<Self> {
        let posterior = bayes(model.belief(), event)?;
        Ok(ConditionalModel {
            base: model.clone(),
            event: event.clone(),
            posterior,
            event_prob: model.belief().prob_of(event),
            divide: true,
            method: Method::Auto,
            cap: DEFAULT_ENUMERATION_CAP,
            cache: RwLock::new(HashMap::new()),
        })
    }

    /// Drops the `1/μ(E)` factor; for sensitivity experiments only.
    pub fn without_divisor(mut self) -> Self {
        self.divide = false;
        self.cache = RwLock::new(HashMap::new());
        self
    }

    pub fn with_method(mut self, method: Method, cap: usize) -> Self {
        self.method = method;
        self.cap = cap;
        self.cache = RwLock::new(HashMap::new());
        self
    }

    pub fn base(&self) -> &CarModel {
        &self.base
    }

    pub fn event(&self) -> &Event {
        &self.event
    }

    pub fn posterior(&self) -> &Belief {
        &self.posterior
    }

    pub fn event_prob(&self) -> &Rational {
        &self.event_prob
    }

    /// Conditional cost of an on-event partition.
    pub fn cost_of(&self, restricted: &Partition) -> Result<ConditionalCost> {
        if let Some(hit) = self.cache.read().expect("cache lock").get(restricted) {
            return Ok(hit.clone());
        }
        let mut found = conditional_cost_of(&self.base, &self.event, restricted, self.method, self.cap)?;
        if !self.divide {
            found.cost = found.unconditional.clone();
        }
        self.cache.write().expect("cache lock").entry(restricted.clone()).or_insert_with(|| found.clone());
        Ok(found)
    }

    pub fn conditional_cost(&self, f: &Act) -> Result<ConditionalCost> {
        self.cost_of(&f.induced_partition().restrict(&self.event)?)
    }

    pub fn expected_utility(&self, f: &Act) -> Result<Rational> {
        if f.n() != self.base.n() {
            return Err(Error::SpaceMismatch { expected: self.base.n(), actual: f.n() });
        }
        let u = self.base.utility();
        Ok(self.posterior.probs().iter().zip(f.payoffs()).map(|(p, x)| p * u.apply(x)).sum())
    }

    pub fn evaluate(&self, f: &Act) -> Result<Value> {
        let eu = self.expected_utility(f)?;
        Ok(Value::from_parts(eu, &self.conditional_cost(f)?.cost))
    }

    /// `Greater` means `f ≻_E g`.
    pub fn prefers(&self, f: &Act, g: &Act) -> Result<Ordering> {
        Ok(self.evaluate(f)?.cmp(&self.evaluate(g)?))
    }
}

/// `xEf ≻ yEf`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct NullWitness {
    #[serde(with = "serde_rational")]
    pub x: Rational,
    #[serde(with = "serde_rational")]
    pub y: Rational,
    pub f: Act,
}

impl NullWitness {
    pub fn recheck(&self, model: &CarModel, event: &Event) -> Result<bool> {
        let n = self.f.n();
        let left = Act::splice(&Act::constant(n, self.x.clone()), event, &self.f)?;
        let right = Act::splice(&Act::constant(n, self.y.clone()), event, &self.f)?;
        Ok(model.prefers(&left, &right)? == Ordering::Greater)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct NullReport {
    /// `μ(E) = 0`.
    pub null: bool,
    /// A strict preference found on the collision-free grid, if any.
    pub witness: Option<NullWitness>,
    pub grid_size: usize,
}

impl NullReport {
    /// The grid search agrees with the probability test.
    pub fn corroborated(&self) -> bool {
        self.null == self.witness.is_none()
    }
}

/// Null-event test. The grid uses acts `f` whose outcomes avoid `x` and `y`,
/// so `xEf` and `yEf` induce the same partition and the costs cancel. Without
/// that guard a zero-probability event can still be non-null through the
/// cost term alone.
pub fn is_null(model: &CarModel, event: &Event) -> Result<NullReport> {
    if event.n() != model.n() {
        return Err(Error::SpaceMismatch { expected: model.n(), actual: event.n() });
    }
    let null = model.belief().prob_of(event).is_zero();
    let n = model.n();
    let mut grid = 0;
    let mut witness = None;
    'search: for x in 0..3 {
        for y in 0..3 {
            if x == y {
                continue;
            }
            for pattern in 0..n.min(4) {
                // fresh outcomes from 10 upward, never equal to x or y
                let payoffs: Vec<i64> = (0..n).map(|i| 10 + ((i + pattern) % (pattern + 1)) as i64).collect();
                let f = Act::from_ints(&payoffs);
                grid += 1;
                let candidate = NullWitness { x: int(x), y: int(y), f };
                if candidate.recheck(model, event)? {
                    witness = Some(candidate);
                    break 'search;
                }
            }
        }
    }
    Ok(NullReport { null, witness, grid_size: grid })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DynamicsCase {
    /// `f ≿ g` and `fEx ≿ gEx`.
    Consistent,
    /// `g ≻ f` and `fEx ≿ gEx`.
    Reversal,
    Neither,
}

#[derive(Clone, Debug, Serialize)]
pub struct DynamicsReport {
    pub case: DynamicsCase,
    /// The constant used in `fEx` and `gEx`, taken from `g(E)`.
    #[serde(with = "serde_rational")]
    pub x: Rational,
    #[serde(with = "serde_ordering")]
    pub ex_ante: Ordering,
    #[serde(with = "serde_ordering")]
    pub spliced: Ordering,
    #[serde(with = "serde_ordering")]
    pub ex_post: Ordering,
    /// `gEx` attains the minimal conditional cost of `g`.
    pub axiom9_applicable: bool,
    /// `fEx ≿ gEx ⇒ f ≿_E g`, vacuous when not applicable.
    pub axiom9_holds: bool,
    /// `f ≿_E g ⇔ fEg ≿ g`.
    pub dynamic_consistency: bool,
}

/// Values `x ∈ g(E)` whose splice `gEx` attains the minimal conditional cost
/// of `g`, ascending.
pub fn cost_minimal_extensions(cm: &ConditionalModel, g: &Act) -> Result<Vec<Rational>> {
    let target = cm.conditional_cost(g)?.unconditional;
    let mut out = Vec::new();
    for x in g.values_on(cm.event()) {
        let h = Act::splice_constant(g, cm.event(), &x)?;
        if cm.base().cost(&h.induced_partition()) == target {
            out.push(x);
        }
    }
    Ok(out)
}

/// Classifies the pair by the two cases of dynamic behaviour and checks the
/// dynamic complexity aversion implication on it.
pub fn classify_dynamics(model: &CarModel, event: &Event, f: &Act, g: &Act) -> Result<DynamicsReport> {
    let cm = ConditionalModel::new(model, event)?;
    let minimal = cost_minimal_extensions(&cm, g)?;
    let x = match minimal.first() {
        Some(x) => x.clone(),
        None => {
            // cheapest fEx, then the one absorbing the outside into the largest block
            let candidates = minimal_extensions(g, event)?;
            let mut best: Option<(Cost, std::cmp::Reverse<usize>, Rational)> = None;
            for h in candidates {
                let x = h.payoffs()[event.complement().map_or(event.members()[0], |c| c.members()[0])].clone();
                let size = event.members().iter().filter(|&&i| *g.get(i) == x).count();
                let key = (model.cost(&h.induced_partition()), std::cmp::Reverse(size), x);
                if best.as_ref().is_none_or(|b| key < *b) {
                    best = Some(key);
                }
            }
            best.expect("g(E) is nonempty").2
        }
    };
    let fx = Act::splice_constant(f, event, &x)?;
    let gx = Act::splice_constant(g, event, &x)?;
    let ex_ante = model.prefers(f, g)?;
    let spliced = model.prefers(&fx, &gx)?;
    let ex_post = cm.prefers(f, g)?;
    let case = if spliced != Ordering::Less {
        if ex_ante != Ordering::Less {
            DynamicsCase::Consistent
        } else {
            DynamicsCase::Reversal
        }
    } else {
        DynamicsCase::Neither
    };
    let axiom9_applicable = minimal.contains(&x);
    let axiom9_holds = !axiom9_applicable || spliced == Ordering::Less || ex_post != Ordering::Less;
    let feg = Act::splice(f, event, g)?;
    let dynamic_consistency = (ex_post != Ordering::Less) == (model.prefers(&feg, g)? != Ordering::Less);
    Ok(DynamicsReport { case, x, ex_ante, spliced, ex_post, axiom9_applicable, axiom9_holds, dynamic_consistency })
}

/// Shorthand: the posterior probability vector is concentrated on the event.
pub fn posterior_is_concentrated(posterior: &Belief, event: &Event) -> bool {
    posterior.prob_of(event).is_one()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::car::{CostFunction, UtilityIndex};
    use crate::rational::ratio;
    use crate::statespace::StateSpace;

    fn p(n: usize, blocks: &[&[usize]]) -> Partition {
        let blocks: Vec<Vec<usize>> = blocks.iter().map(|b| b.to_vec()).collect();
        Partition::from_full_blocks(n, &blocks).unwrap()
    }

    pub(crate) fn investment_model() -> CarModel {
        let n = 3;
        let quarter = ratio(1, 4);
        CarModel::simple(
            n,
            CostFunction::finite_table(
                n,
                [
                    (p(n, &[&[0, 1], &[2]]), quarter.clone()),
                    (p(n, &[&[0], &[1, 2]]), quarter.clone()),
                    (p(n, &[&[0, 2], &[1]]), quarter),
                    (Partition::discrete(n), int(1)),
                ],
            )
            .unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn bayes_examples() {
        let u = Belief::uniform(3);
        let e = Event::new(3, [1]).unwrap();
        assert_eq!(bayes(&u, &e).unwrap().probs(), &[int(0), int(1), int(0)]);
        let e = Event::new(3, [0, 1]).unwrap();
        assert_eq!(bayes(&u, &e).unwrap().probs(), &[ratio(1, 2), ratio(1, 2), int(0)]);
        let mu = Belief::new(vec![ratio(1, 6), ratio(1, 3), ratio(1, 2)]).unwrap();
        let e = Event::new(3, [1, 2]).unwrap();
        let post = bayes(&mu, &e).unwrap();
        assert_eq!(post.probs(), &[int(0), ratio(2, 5), ratio(3, 5)]);
        assert!(posterior_is_concentrated(&post, &e));
        let degenerate = Belief::new(vec![int(0), int(1), int(0)]).unwrap();
        assert_eq!(bayes(&degenerate, &Event::new(3, [0]).unwrap()), Err(Error::ZeroProbabilityEvent));
    }

    #[test]
    fn investment_reversal() {
        let m = investment_model();
        let e = Event::new(3, [1]).unwrap();
        let f = Act::from_ints(&[1, 3, 4]);
        let g = Act::from_ints(&[2, 2, 2]);
        assert_eq!(minimal_conditional_cost(&m, &e, &f).unwrap(), Cost::zero());
        assert_eq!(conditional_evaluate(&m, &e, &f).unwrap(), Value::Finite(int(3)));
        assert_eq!(conditional_evaluate(&m, &e, &g).unwrap(), Value::Finite(int(2)));
        let r = classify_dynamics(&m, &e, &f, &g).unwrap();
        assert_eq!(r.case, DynamicsCase::Reversal);
        assert_eq!(r.x, int(2));
        assert_eq!(r.ex_ante, Ordering::Less);
        assert_eq!(r.ex_post, Ordering::Greater);
        assert!(r.axiom9_applicable && r.axiom9_holds);
        let same = classify_dynamics(&m, &e, &f, &f).unwrap();
        assert_eq!(same.case, DynamicsCase::Consistent);
    }

    #[test]
    fn dearer_two_block_cost_breaks_dynamic_consistency() {
        let n = 3;
        let half = ratio(1, 2);
        let cost = CostFunction::finite_table(
            n,
            [
                (p(n, &[&[0, 1], &[2]]), half.clone()),
                (p(n, &[&[0], &[1, 2]]), half.clone()),
                (p(n, &[&[0, 2], &[1]]), half),
                (Partition::discrete(n), int(1)),
            ],
        )
        .unwrap();
        let m = CarModel::simple(n, cost).unwrap();
        let e = Event::new(3, [1]).unwrap();
        let r = classify_dynamics(&m, &e, &Act::from_ints(&[1, 3, 4]), &Act::from_ints(&[2, 2, 2])).unwrap();
        assert!(!r.dynamic_consistency);
        assert_eq!(r.ex_post, Ordering::Greater);
    }

    #[test]
    fn constant_and_whole_event_costs() {
        let m = investment_model();
        for members in [vec![0], vec![0, 2], vec![1, 2]] {
            let e = Event::new(3, members).unwrap();
            let x = Act::from_ints(&[5, 5, 5]);
            assert_eq!(conditional_evaluate(&m, &e, &x).unwrap(), Value::Finite(int(5)));
        }
        let f = Act::from_ints(&[1, 3, 4]);
        assert_eq!(minimal_conditional_cost(&m, &Event::full(3), &f).unwrap(), Cost::Finite(int(1)));
    }

    #[test]
    fn per_block_witness_on_seven_states() {
        // f = (1,1,2,2,3,3,3), E = {ω4..ω7}: S^{f|E} = {{ω4},{ω5,ω6,ω7}}
        let n = 7;
        let delta = ratio(1, 3);
        let m = CarModel::simple(n, CostFunction::PerBlock { delta: delta.clone() }).unwrap();
        let e = Event::new(n, [3, 4, 5, 6]).unwrap();
        let f = Act::from_ints(&[1, 1, 2, 2, 3, 3, 3]);
        let restricted = f.induced_partition().restrict(&e).unwrap();
        let fast = conditional_cost_of(&m, &e, &restricted, Method::Attachment, 12).unwrap();
        let slow = conditional_cost_of(&m, &e, &restricted, Method::Enumeration, 12).unwrap();
        assert_eq!(fast.cost, slow.cost);
        // two blocks cost δ, divided by μ(E) = 4/7
        assert_eq!(fast.cost, Cost::Finite(delta * ratio(7, 4)));
        // tie between the two single merges reports the larger block
        assert_eq!(fast.witness, p(n, &[&[0, 1, 2, 4, 5, 6], &[3]]));
    }

    #[test]
    fn single_merge_is_not_exact() {
        // C({{0,2},{1,3}}) = 1 while every other non-trivial partition costs 5
        let n = 4;
        let cheap = p(n, &[&[0, 2], &[1, 3]]);
        let c = cheap.clone();
        let cost = CostFunction::rule("one-cheap", move |s: &Partition| {
            if s.num_blocks() == 1 {
                Cost::zero()
            } else if *s == c {
                Cost::Finite(int(1))
            } else {
                Cost::Finite(int(5))
            }
        });
        let m = CarModel::simple(n, cost).unwrap();
        let e = Event::new(n, [0, 1]).unwrap();
        let restricted = Partition::discrete_on(&e);
        let exact = conditional_cost_of(&m, &e, &restricted, Method::Enumeration, 12).unwrap();
        let attach = conditional_cost_of(&m, &e, &restricted, Method::Attachment, 12).unwrap();
        let single = conditional_cost_of(&m, &e, &restricted, Method::SingleMerge, 12).unwrap();
        assert_eq!(exact.cost, Cost::Finite(int(2)));
        assert_eq!(attach.cost, exact.cost);
        assert_eq!(attach.witness, cheap);
        assert_eq!(single.cost, Cost::Finite(int(10)));
    }

    #[test]
    fn divisor_toggle() {
        let m = CarModel::simple(3, CostFunction::PerBlock { delta: int(1) }).unwrap();
        let e = Event::new(3, [0, 1]).unwrap();
        let f = Act::from_ints(&[1, 2, 3]);
        let with = ConditionalModel::new(&m, &e).unwrap();
        let without = ConditionalModel::new(&m, &e).unwrap().without_divisor();
        assert_eq!(with.conditional_cost(&f).unwrap().cost, Cost::Finite(ratio(3, 2)));
        assert_eq!(without.conditional_cost(&f).unwrap().cost, Cost::Finite(int(1)));
    }

    #[test]
    fn null_events() {
        let mu = Belief::new(vec![int(0), ratio(1, 2), ratio(1, 2)]).unwrap();
        let m = CarModel::new(StateSpace::new(3).unwrap(), UtilityIndex::identity(), mu, CostFunction::PerBlock {
            delta: int(1),
        })
        .unwrap();
        let e = Event::new(3, [0]).unwrap();
        let r = is_null(&m, &e).unwrap();
        assert!(r.null && r.witness.is_none() && r.corroborated());

        let m = investment_model();
        let r = is_null(&m, &Event::new(3, [2]).unwrap()).unwrap();
        assert!(!r.null && r.corroborated());
        assert!(r.witness.unwrap().recheck(&m, &Event::new(3, [2]).unwrap()).unwrap());
        let r = is_null(&m, &Event::full(3)).unwrap();
        assert!(!r.null && r.corroborated());
    }

    #[test]
    fn cost_term_alone_can_make_a_zero_probability_event_non_null() {
        let mu = Belief::new(vec![int(0), ratio(1, 2), ratio(1, 2)]).unwrap();
        let m = CarModel::new(StateSpace::new(3).unwrap(), UtilityIndex::identity(), mu, CostFunction::PerBlock {
            delta: int(1),
        })
        .unwrap();
        let e = Event::new(3, [0]).unwrap();
        // x equals f's outcome, y does not: xEf is constant, yEf has two blocks
        let w = NullWitness { x: int(4), y: int(5), f: Act::from_ints(&[4, 4, 4]) };
        assert!(w.recheck(&m, &e).unwrap());
    }

    #[test]
    fn cache_is_consistent() {
        let m = investment_model();
        let cm = ConditionalModel::new(&m, &Event::new(3, [0, 1]).unwrap()).unwrap();
        let f = Act::from_ints(&[1, 2, 9]);
        let first = cm.conditional_cost(&f).unwrap();
        let second = cm.conditional_cost(&Act::from_ints(&[7, 8, 0])).unwrap();
        assert_eq!(first, second);
    }
}
