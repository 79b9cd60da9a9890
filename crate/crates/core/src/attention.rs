//! Optimal inattention and attention reallocation.
//!
//! An agent facing a menu picks a partition to pay attention to, trading the
//! value of finer information against its cost. After an event she keeps
//! every cell of that partition meeting the event (the possibility set),
//! re-chooses a partition compatible with it, and repeats until the
//! possibility set stops shrinking.

use num_traits::Zero;
use serde::Serialize;

use crate::acts::Act;
use crate::car::{Belief, CarModel, Cost, CostFunction, PairTerm, SeparationCost, UtilityIndex, Value};
use crate::error::{Error, Result};
use crate::rational::{int, ratio, serde_rational, Rational};
use crate::statespace::{enumerate_partitions_of, Event, Partition, StateSpace};
use crate::updating::{conditional_cost_of, ConditionalCost, Method};

#[derive(Clone, Debug, Serialize)]
pub struct ChoiceProblem {
    acts: Vec<Act>,
}

impl ChoiceProblem {
    pub fn new(acts: Vec<Act>) -> Result<Self> {
        let first = acts.first().ok_or_else(|| Error::Hypothesis("menu is empty".into()))?;
        if let Some(bad) = acts.iter().find(|a| a.n() != first.n()) {
            return Err(Error::SpaceMismatch { expected: first.n(), actual: bad.n() });
        }
        Ok(ChoiceProblem { acts })
    }

    pub fn acts(&self) -> &[Act] {
        &self.acts
    }

    pub fn n(&self) -> usize {
        self.acts[0].n()
    }
}

/// `⟨u, μ, C⟩` with `C` read as an attention cost; μ must have full support.
#[derive(Clone, Debug, Serialize)]
#[serde(transparent)]
pub struct AttentionModel {
    model: CarModel,
}

impl AttentionModel {
    pub fn new(u: UtilityIndex, mu: Belief, cost: CostFunction) -> Result<Self> {
        let space = StateSpace::new(mu.n())?;
        Self::from_model(CarModel::new(space, u, mu, cost)?)
    }

    pub fn from_model(model: CarModel) -> Result<Self> {
        if !model.belief().has_full_support() {
            return Err(Error::InvalidBelief("attention needs a full-support prior".into()));
        }
        Ok(AttentionModel { model })
    }

    pub fn model(&self) -> &CarModel {
        &self.model
    }

    pub fn n(&self) -> usize {
        self.model.n()
    }
}

/// `max_f Σ_{ω∈b} μ(ω) u(f(ω))`, i.e. `μ(b)·max_f E[u∘f | b]`.
fn block_value(model: &CarModel, menu: &ChoiceProblem, block: &[usize]) -> Rational {
    let mu = model.belief();
    let u = model.utility();
    menu.acts
        .iter()
        .map(|f| block.iter().map(|&i| mu.prob(i) * u.apply(f.get(i))).sum::<Rational>())
        .max()
        .expect("menu is nonempty")
}

fn check_menu(model: &AttentionModel, menu: &ChoiceProblem) -> Result<()> {
    if menu.n() != model.n() {
        return Err(Error::SpaceMismatch { expected: model.n(), actual: menu.n() });
    }
    Ok(())
}

/// Higher objective first, then fewer blocks, then the smaller label string.
fn better(candidate: (&Rational, &Partition), incumbent: (&Rational, &Partition)) -> bool {
    match candidate.0.cmp(incumbent.0) {
        std::cmp::Ordering::Greater => true,
        std::cmp::Ordering::Less => false,
        std::cmp::Ordering::Equal => {
            (candidate.1.num_blocks(), candidate.1.labels()) < (incumbent.1.num_blocks(), incumbent.1.labels())
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct InattentionChoice {
    pub partition: Partition,
    #[serde(with = "serde_rational")]
    pub objective: Rational,
    pub candidates: usize,
}

/// `argmax_S Σ_{b∈S} μ(b) max_f E[u∘f | b] − C(S)` over every partition.
/// Partitions of infinite cost are never chosen unless all are infinite.
pub fn optimal_subjective_info(model: &AttentionModel, menu: &ChoiceProblem, cap: usize) -> Result<InattentionChoice> {
    check_menu(model, menu)?;
    let m = &model.model;
    let mut best: Option<(Rational, Partition)> = None;
    let mut candidates = 0;
    for s in enumerate_partitions_of(&m.space().full_event(), cap)? {
        candidates += 1;
        let Cost::Finite(c) = m.cost(&s) else { continue };
        let value: Rational = s.blocks().iter().map(|b| block_value(m, menu, b)).sum::<Rational>() - c;
        if best.as_ref().is_none_or(|(v, p)| better((&value, &s), (v, p))) {
            best = Some((value, s));
        }
    }
    let (objective, partition) = best.ok_or(Error::InfiniteCost)?;
    Ok(InattentionChoice { partition, objective, candidates })
}

/// Union of the cells of `s` that meet `event`: the smallest union of cells
/// covering the event, which is unique.
pub fn possibility_set(s: &Partition, event: &Event) -> Result<Event> {
    if s.n() != event.n() {
        return Err(Error::SpaceMismatch { expected: s.n(), actual: event.n() });
    }
    if !s.is_full() {
        return Err(Error::InvalidPartition("possibility sets need a partition of the whole space".into()));
    }
    let hit: Vec<usize> = event.members().iter().filter_map(|&i| s.block_of(i)).collect();
    Event::new(s.n(), (0..s.n()).filter(|&i| s.block_of(i).is_some_and(|b| hit.contains(&b))))
}

/// Every partition of which some union of cells equals `poss`: a partition
/// of `poss` side by side with a partition of its complement.
pub fn admissible_partitions(poss: &Event, cap: usize) -> Result<Vec<Partition>> {
    let n = poss.n();
    if n > cap {
        return Err(Error::CapExceeded { n, cap });
    }
    let inside = enumerate_partitions_of(poss, cap)?;
    let Some(rest) = poss.complement() else { return Ok(inside) };
    let outside = enumerate_partitions_of(&rest, cap)?;
    let mut out = Vec::with_capacity(inside.len() * outside.len());
    for a in &inside {
        let la = a.labels();
        let ka = a.num_blocks();
        for b in &outside {
            let lb = b.labels();
            let full: Vec<usize> = (0..n).map(|i| la[i].unwrap_or_else(|| ka + lb[i].expect("covers the rest"))).collect();
            out.push(Partition::from_full_labels(&full));
        }
    }
    Ok(out)
}

/// `min{C(R) : R agrees with S on poss} / μ(poss)` with its witness `R`.
pub fn conditional_attention_cost(model: &AttentionModel, poss: &Event, s: &Partition, cap: usize) -> Result<ConditionalCost> {
    conditional_cost_of(&model.model, poss, &s.restrict(poss)?, Method::Auto, cap)
}

#[derive(Clone, Debug, Serialize)]
pub struct Stage {
    pub stage: usize,
    pub partition: Partition,
    pub possibility: Event,
    /// The partition whose cost measured this stage's choice; absent at the
    /// first stage, which pays the unconditional cost.
    pub witness: Option<Partition>,
    #[serde(with = "serde_rational")]
    pub objective: Rational,
    /// This stage's objective evaluated at the previous stage's partition.
    #[serde(with = "crate::rational::serde_option_rational")]
    pub previous_objective: Option<Rational>,
    pub candidates: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct ReallocationTrace {
    pub event: Event,
    pub stages: Vec<Stage>,
    /// Indices into the menu of the acts chosen at the end.
    pub choice: Vec<usize>,
}

impl ReallocationTrace {
    pub fn first_possibility(&self) -> &Event {
        &self.stages[0].possibility
    }

    pub fn final_possibility(&self) -> &Event {
        &self.stages.last().expect("at least one stage").possibility
    }

    /// The terminal possibility set is strictly inside the first one.
    pub fn shrank(&self) -> bool {
        self.final_possibility().len() < self.first_possibility().len()
    }
}

/// Objective of a stage after the first: `Σ_{b ⊆ poss} μ(b)/μ(poss)·max_f
/// E[u∘f | b] − C_cond(S)`.
struct StageObjective<'a> {
    model: &'a AttentionModel,
    menu: &'a ChoiceProblem,
    poss: Event,
    poss_prob: Rational,
    cap: usize,
    cache: std::collections::HashMap<Partition, ConditionalCost>,
}

impl StageObjective<'_> {
    fn value(&mut self, s: &Partition) -> Result<Option<(Rational, Partition)>> {
        let restricted = s.restrict(&self.poss)?;
        let cc = match self.cache.get(&restricted) {
            Some(cc) => cc.clone(),
            None => {
                let cc = conditional_cost_of(&self.model.model, &self.poss, &restricted, Method::Auto, self.cap)?;
                self.cache.insert(restricted, cc.clone());
                cc
            }
        };
        let Cost::Finite(c) = cc.cost else { return Ok(None) };
        let mask = self.poss.mask();
        let gain: Rational = s
            .blocks()
            .iter()
            .filter(|b| b.iter().all(|&i| mask[i]))
            .map(|b| block_value(&self.model.model, self.menu, b))
            .sum::<Rational>()
            / &self.poss_prob;
        Ok(Some((gain - c, cc.witness)))
    }
}

pub fn run_reallocation(model: &AttentionModel, menu: &ChoiceProblem, event: &Event, cap: usize) -> Result<ReallocationTrace> {
    check_menu(model, menu)?;
    if event.n() != model.n() {
        return Err(Error::SpaceMismatch { expected: model.n(), actual: event.n() });
    }
    let first = optimal_subjective_info(model, menu, cap)?;
    let mut poss = possibility_set(&first.partition, event)?;
    let mut stages = vec![Stage {
        stage: 1,
        partition: first.partition,
        possibility: poss.clone(),
        witness: None,
        objective: first.objective,
        previous_objective: None,
        candidates: first.candidates,
    }];
    // each further stage either shrinks the set or ends the loop
    while poss != *event {
        let mut objective = StageObjective {
            model,
            menu,
            poss: poss.clone(),
            poss_prob: model.model.belief().prob_of(&poss),
            cap,
            cache: Default::default(),
        };
        let previous = stages.last().expect("nonempty").partition.clone();
        let previous_objective = objective.value(&previous)?.map(|(v, _)| v);
        let candidates = admissible_partitions(&poss, cap)?;
        let mut best: Option<(Rational, Partition, Partition)> = None;
        for s in &candidates {
            let Some((v, witness)) = objective.value(s)? else { continue };
            if best.as_ref().is_none_or(|(bv, bp, _)| better((&v, s), (bv, bp))) {
                best = Some((v, s.clone(), witness));
            }
        }
        let (value, partition, witness) = best.ok_or(Error::InfiniteCost)?;
        let next = possibility_set(&partition, event)?;
        let fixed = next == poss;
        stages.push(Stage {
            stage: stages.len() + 1,
            partition,
            possibility: next.clone(),
            witness: Some(witness),
            objective: value,
            previous_objective,
            candidates: candidates.len(),
        });
        if fixed {
            break;
        }
        poss = next;
    }
    let choice = final_choice(model, menu, stages.last().expect("nonempty").possibility.clone())?;
    Ok(ReallocationTrace { event: event.clone(), stages, choice })
}

/// Maximizers of expected utility under the prior conditioned on `poss`.
fn final_choice(model: &AttentionModel, menu: &ChoiceProblem, poss: Event) -> Result<Vec<usize>> {
    let m = &model.model;
    let values: Vec<Rational> = menu.acts.iter().map(|f| block_value_single(m, f, &poss)).collect();
    let top = values.iter().max().expect("menu is nonempty").clone();
    Ok(values.iter().enumerate().filter(|(_, v)| **v == top).map(|(i, _)| i).collect())
}

fn block_value_single(model: &CarModel, f: &Act, poss: &Event) -> Rational {
    poss.members().iter().map(|&i| model.belief().prob(i) * model.utility().apply(f.get(i))).sum()
}

/// Unconditional value of a partition with the menu: used to report the
/// stage-one objective of arbitrary partitions.
pub fn inattention_value(model: &AttentionModel, menu: &ChoiceProblem, s: &Partition) -> Result<Value> {
    check_menu(model, menu)?;
    let gain: Rational = s.blocks().iter().map(|b| block_value(&model.model, menu, b)).sum();
    Ok(Value::from_parts(gain, &model.model.cost(s)))
}

/// A bet paying `prize` on `state` and 0 elsewhere.
pub fn bet(n: usize, state: usize, prize: Rational) -> Act {
    let mut v = vec![Rational::zero(); n];
    v[state] = prize;
    Act::new(v).expect("n > 0")
}

fn pair(a: usize, b: usize, weights: Vec<Rational>) -> PairTerm {
    PairTerm { states: [a, b], weights }
}

/// A worked instance: eight equally likely states, bets on six of them, and
/// a separation cost. Stage one attends to `{0},{1,2},{3},{4,5},{6,7}`;
/// after `E = {2,3,4}` the agent keeps `{1,…,5}`, then reallocates to
/// `{1},{2},{3,4,5}` on it and keeps `{2,…,5}`, a fixed point.
///
/// Keeping 1 and 2 apart is cheap while the partition has at most three
/// blocks and expensive beyond, so the split is worth it only once the
/// states outside the possibility set can be lumped together.
pub fn eight_state_instance() -> (AttentionModel, ChoiceProblem, Event) {
    let n = 8;
    let cost = CostFunction::Separation(SeparationCost {
        block_count: vec![],
        pairs: vec![
            pair(1, 2, vec![int(0), ratio(1, 4), ratio(1, 4), int(4)]),
            pair(3, 4, vec![int(0), ratio(1, 8)]),
            pair(4, 5, vec![int(0), int(4)]),
            pair(6, 7, vec![int(0), int(4)]),
        ],
    });
    let model = AttentionModel::new(UtilityIndex::identity(), Belief::uniform(n), cost).expect("valid instance");
    let prizes = [(0, 16), (1, 8), (2, 8), (3, 6), (4, 4), (6, 16)];
    let menu = ChoiceProblem::new(prizes.iter().map(|&(s, p)| bet(n, s, int(p))).collect()).expect("nonempty");
    (model, menu, Event::new(n, [2, 3, 4]).expect("valid"))
}

/// The five-state construction: stage one attends to `{0},{1,2},{3},{4}`,
/// `E = {2,3}` leaves `{1,2,3}` possible, and stage two attends to `{1},{2,3}`
/// there, measured by `{1},{0,2,3,4}`, which leaves exactly `E`.
pub fn shrinkage_instance() -> (AttentionModel, ChoiceProblem, Event) {
    let n = 5;
    let cost = CostFunction::Separation(SeparationCost {
        block_count: vec![],
        pairs: vec![pair(1, 2, vec![int(0), ratio(1, 4), int(4)]), pair(2, 3, vec![int(0), ratio(1, 8)])],
    });
    let model = AttentionModel::new(UtilityIndex::identity(), Belief::uniform(n), cost).expect("valid instance");
    let prizes = [(0, int(10)), (1, int(5)), (2, int(5)), (3, ratio(5, 2)), (4, int(10))];
    let menu = ChoiceProblem::new(prizes.iter().map(|(s, p)| bet(n, *s, p.clone())).collect()).expect("nonempty");
    (model, menu, Event::new(n, [2, 3]).expect("valid"))
}
