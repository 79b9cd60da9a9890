//! The complexity-aversion representation `V(f) = E_μ[u(f)] − C(σ(f))`.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::acts::Act;
use crate::error::{Error, Result};
use crate::rational::{format_rational, int, parse_rational, serde_rational, serde_rational_vec, Rational};
use crate::statespace::{Event, Partition, PartitionIter, StateSpace, DEFAULT_ENUMERATION_CAP};

/// Probability vector over states, summing to exactly one.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "BeliefDoc", into = "BeliefDoc")]
pub struct Belief {
    probs: Vec<Rational>,
}

#[derive(Serialize, Deserialize)]
#[serde(transparent)]
struct BeliefDoc(#[serde(with = "serde_rational_vec")] Vec<Rational>);

impl TryFrom<BeliefDoc> for Belief {
    type Error = Error;
    fn try_from(doc: BeliefDoc) -> Result<Self> {
        Belief::new(doc.0)
    }
}

impl From<Belief> for BeliefDoc {
    fn from(b: Belief) -> Self {
        BeliefDoc(b.probs)
    }
}

impl Belief {
    pub fn new(probs: Vec<Rational>) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::InvalidBelief("no states".into()));
        }
        if let Some(p) = probs.iter().find(|p| p.is_negative()) {
            return Err(Error::InvalidBelief(format!("negative probability {}", format_rational(p))));
        }
        let total: Rational = probs.iter().sum();
        if !total.is_one() {
            return Err(Error::InvalidBelief(format!("probabilities sum to {}", format_rational(&total))));
        }
        Ok(Belief { probs })
    }

    pub fn uniform(n: usize) -> Self {
        Belief { probs: vec![Rational::new(1.into(), (n as i64).into()); n] }
    }

    pub fn n(&self) -> usize {
        self.probs.len()
    }

    pub fn probs(&self) -> &[Rational] {
        &self.probs
    }

    pub fn prob(&self, state: usize) -> &Rational {
        &self.probs[state]
    }

    pub fn prob_of(&self, event: &Event) -> Rational {
        event.members().iter().map(|&i| &self.probs[i]).sum()
    }

    pub fn prob_of_states(&self, states: &[usize]) -> Rational {
        states.iter().map(|&i| &self.probs[i]).sum()
    }

    pub fn has_full_support(&self) -> bool {
        self.probs.iter().all(|p| p.is_positive())
    }

    pub fn expectation(&self, values: &[Rational]) -> Rational {
        self.probs.iter().zip(values).map(|(p, v)| p * v).sum()
    }
}

/// Affine utility `u(x) = a·x + b` with `a > 0`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "UtilityDoc", into = "UtilityDoc")]
pub struct UtilityIndex {
    a: Rational,
    b: Rational,
}

#[derive(Serialize, Deserialize)]
struct UtilityDoc {
    #[serde(with = "serde_rational")]
    a: Rational,
    #[serde(with = "serde_rational", default = "Rational::zero")]
    b: Rational,
}

impl TryFrom<UtilityDoc> for UtilityIndex {
    type Error = Error;
    fn try_from(doc: UtilityDoc) -> Result<Self> {
        UtilityIndex::new(doc.a, doc.b)
    }
}

impl From<UtilityIndex> for UtilityDoc {
    fn from(u: UtilityIndex) -> Self {
        UtilityDoc { a: u.a, b: u.b }
    }
}

impl UtilityIndex {
    pub fn new(a: Rational, b: Rational) -> Result<Self> {
        if !a.is_positive() {
            return Err(Error::InvalidUtility(format!("scale must be positive, got {}", format_rational(&a))));
        }
        Ok(UtilityIndex { a, b })
    }

    pub fn identity() -> Self {
        UtilityIndex { a: Rational::one(), b: Rational::zero() }
    }

    pub fn scale(&self) -> &Rational {
        &self.a
    }

    pub fn shift(&self) -> &Rational {
        &self.b
    }

    pub fn apply(&self, x: &Rational) -> Rational {
        &self.a * x + &self.b
    }

    /// The outcome with utility `v`.
    pub fn invert(&self, v: &Rational) -> Rational {
        (v - &self.b) / &self.a
    }

    /// `a'·u + b'`.
    pub fn transformed(&self, a: &Rational, b: &Rational) -> Result<Self> {
        UtilityIndex::new(a * &self.a, a * &self.b + b)
    }
}

/// A complexity cost: a nonnegative rational or infinity.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Cost {
    Finite(Rational),
    Infinite,
}

impl Cost {
    pub fn zero() -> Self {
        Cost::Finite(Rational::zero())
    }

    pub fn finite(&self) -> Option<&Rational> {
        match self {
            Cost::Finite(c) => Some(c),
            Cost::Infinite => None,
        }
    }

    pub fn scaled(&self, factor: &Rational) -> Cost {
        match self {
            Cost::Finite(c) => Cost::Finite(c * factor),
            Cost::Infinite => Cost::Infinite,
        }
    }

    pub fn divided(&self, d: &Rational) -> Cost {
        match self {
            Cost::Finite(c) => Cost::Finite(c / d),
            Cost::Infinite => Cost::Infinite,
        }
    }
}

impl fmt::Display for Cost {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Cost::Finite(c) => f.write_str(&format_rational(c)),
            Cost::Infinite => f.write_str("inf"),
        }
    }
}

impl Serialize for Cost {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Cost {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Text(String),
            Int(i64),
        }
        match Raw::deserialize(d)? {
            Raw::Int(i) => Ok(Cost::Finite(int(i))),
            Raw::Text(t) if matches!(t.trim(), "inf" | "infinity" | "∞") => Ok(Cost::Infinite),
            Raw::Text(t) => parse_rational(&t).map(Cost::Finite).map_err(serde::de::Error::custom),
        }
    }
}

/// Value of an act: finite, or minus infinity when its cost is infinite.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Value {
    NegInfinity,
    Finite(Rational),
}

impl Value {
    pub fn finite(&self) -> Option<&Rational> {
        match self {
            Value::Finite(v) => Some(v),
            Value::NegInfinity => None,
        }
    }

    pub fn from_parts(expected_utility: Rational, cost: &Cost) -> Value {
        match cost {
            Cost::Finite(c) => Value::Finite(expected_utility - c),
            Cost::Infinite => Value::NegInfinity,
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Finite(v) => f.write_str(&format_rational(v)),
            Value::NegInfinity => f.write_str("-inf"),
        }
    }
}

/// Serializes a preference `Ordering` as `strict-left`, `indifferent` or
/// `strict-right`.
pub mod serde_ordering {
    use std::cmp::Ordering;

    use serde::Serializer;

    pub fn label(o: Ordering) -> &'static str {
        match o {
            Ordering::Greater => "strict-left",
            Ordering::Equal => "indifferent",
            Ordering::Less => "strict-right",
        }
    }

    pub fn serialize<S: Serializer>(o: &Ordering, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(label(*o))
    }
}

/// Explicit costs on some partitions of an `n`-state space. A partition not
/// listed costs the largest listed cost among partitions it refines, or 0:
/// the smallest monotone extension of the listed values.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CostTable {
    n: usize,
    entries: BTreeMap<Partition, Cost>,
}

impl CostTable {
    pub fn new(n: usize, entries: impl IntoIterator<Item = (Partition, Cost)>) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (p, c) in entries {
            if p.n() != n {
                return Err(Error::SpaceMismatch { expected: n, actual: p.n() });
            }
            if !p.is_full() {
                return Err(Error::InvalidCost(format!("table key {p} does not cover the state space")));
            }
            if map.insert(p.clone(), c).is_some() {
                return Err(Error::InvalidCost(format!("duplicate table key {p}")));
            }
        }
        Ok(CostTable { n, entries: map })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn entries(&self) -> &BTreeMap<Partition, Cost> {
        &self.entries
    }

    pub fn get(&self, s: &Partition) -> Cost {
        if let Some(c) = self.entries.get(s) {
            return c.clone();
        }
        self.entries
            .iter()
            .filter(|(a, _)| s.refines_unchecked(a))
            .map(|(_, c)| c.clone())
            .max()
            .unwrap_or_else(Cost::zero)
    }
}

pub type CostRule = Arc<dyn Fn(&Partition) -> Cost + Send + Sync>;

/// Entry `k − 1` of a schedule applies to partitions with `k` blocks; the
/// last entry repeats. An empty schedule is zero.
fn schedule_at(schedule: &[Rational], blocks: usize) -> Rational {
    schedule.get(blocks.saturating_sub(1)).or(schedule.last()).cloned().unwrap_or_else(Rational::zero)
}

fn schedule_is_monotone(schedule: &[Rational]) -> bool {
    schedule.iter().all(|x| !x.is_negative()) && schedule.windows(2).all(|w| w[0] <= w[1])
}

/// Charge for keeping two states apart, depending on how many blocks the
/// partition has.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PairTerm {
    pub states: [usize; 2],
    #[serde(with = "serde_rational_vec")]
    pub weights: Vec<Rational>,
}

/// `h(|S|) + Σ [i, j in different blocks]·φ_ij(|S|)`. Monotone whenever
/// every schedule is nonnegative and nondecreasing.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SeparationCost {
    pub block_count: Vec<Rational>,
    pub pairs: Vec<PairTerm>,
}

impl SeparationCost {
    pub fn cost(&self, s: &Partition) -> Rational {
        let k = s.num_blocks();
        let mut total = schedule_at(&self.block_count, k);
        for term in &self.pairs {
            let [i, j] = term.states;
            if s.block_of(i) != s.block_of(j) {
                total += schedule_at(&term.weights, k);
            }
        }
        total
    }

    fn is_monotone(&self) -> bool {
        schedule_is_monotone(&self.block_count) && self.pairs.iter().all(|t| schedule_is_monotone(&t.weights))
    }

    fn max_state(&self) -> Option<usize> {
        self.pairs.iter().flat_map(|t| t.states).max()
    }
}

#[derive(Clone)]
pub enum CostFunction {
    Table(CostTable),
    /// `δ·(|S| − 1)`.
    PerBlock { delta: Rational },
    /// 0 on `{Ω}`, `δ·|S|` otherwise.
    ContractRule { delta: Rational },
    Scaled { factor: Rational, inner: Box<CostFunction> },
    Separation(SeparationCost),
    Rule { name: String, rule: CostRule },
}

impl fmt::Debug for CostFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CostFunction::Table(t) => f.debug_tuple("Table").field(t).finish(),
            CostFunction::PerBlock { delta } => write!(f, "PerBlock {{ delta: {} }}", format_rational(delta)),
            CostFunction::ContractRule { delta } => write!(f, "ContractRule {{ delta: {} }}", format_rational(delta)),
            CostFunction::Scaled { factor, inner } => {
                write!(f, "Scaled {{ factor: {}, inner: {inner:?} }}", format_rational(factor))
            }
            CostFunction::Separation(c) => f.debug_tuple("Separation").field(c).finish(),
            CostFunction::Rule { name, .. } => write!(f, "Rule({name})"),
        }
    }
}

impl CostFunction {
    pub fn zero() -> Self {
        CostFunction::PerBlock { delta: Rational::zero() }
    }

    pub fn table(n: usize, entries: impl IntoIterator<Item = (Partition, Cost)>) -> Result<Self> {
        Ok(CostFunction::Table(CostTable::new(n, entries)?))
    }

    /// Table from finite costs.
    pub fn finite_table(n: usize, entries: impl IntoIterator<Item = (Partition, Rational)>) -> Result<Self> {
        Self::table(n, entries.into_iter().map(|(p, c)| (p, Cost::Finite(c))))
    }

    pub fn rule(name: impl Into<String>, rule: impl Fn(&Partition) -> Cost + Send + Sync + 'static) -> Self {
        CostFunction::Rule { name: name.into(), rule: Arc::new(rule) }
    }

    /// Cost of a partition of the whole state space.
    pub fn cost(&self, s: &Partition) -> Cost {
        debug_assert!(s.is_full(), "costs are defined on partitions of the whole space");
        match self {
            CostFunction::Table(t) => t.get(s),
            CostFunction::PerBlock { delta } => Cost::Finite(delta * int(s.num_blocks() as i64 - 1)),
            CostFunction::ContractRule { delta } => {
                if s.num_blocks() == 1 {
                    Cost::zero()
                } else {
                    Cost::Finite(delta * int(s.num_blocks() as i64))
                }
            }
            CostFunction::Scaled { factor, inner } => inner.cost(s).scaled(factor),
            CostFunction::Separation(c) => Cost::Finite(c.cost(s)),
            CostFunction::Rule { rule, .. } => rule(s),
        }
    }

    /// `factor · C`, keeping the closed kinds closed.
    pub fn scaled(&self, factor: &Rational) -> CostFunction {
        match self {
            CostFunction::Table(t) => CostFunction::Table(CostTable {
                n: t.n,
                entries: t.entries.iter().map(|(p, c)| (p.clone(), c.scaled(factor))).collect(),
            }),
            CostFunction::PerBlock { delta } => CostFunction::PerBlock { delta: delta * factor },
            CostFunction::ContractRule { delta } => CostFunction::ContractRule { delta: delta * factor },
            CostFunction::Separation(c) => CostFunction::Separation(SeparationCost {
                block_count: c.block_count.iter().map(|x| x * factor).collect(),
                pairs: c
                    .pairs
                    .iter()
                    .map(|t| PairTerm { states: t.states, weights: t.weights.iter().map(|x| x * factor).collect() })
                    .collect(),
            }),
            other => CostFunction::Scaled { factor: factor.clone(), inner: Box::new(other.clone()) },
        }
    }

    pub fn kind_name(&self) -> &str {
        match self {
            CostFunction::Table(_) => "table",
            CostFunction::PerBlock { .. } => "per_block",
            CostFunction::ContractRule { .. } => "contract",
            CostFunction::Scaled { .. } => "scaled",
            CostFunction::Separation(_) => "separation",
            CostFunction::Rule { name, .. } => name,
        }
    }
}

/// On-disk cost description; rule kinds cannot be written.
#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
enum CostDoc {
    Table {
        n: Option<usize>,
        table: BTreeMap<String, Cost>,
    },
    PerBlock {
        #[serde(with = "serde_rational")]
        delta: Rational,
    },
    Contract {
        #[serde(with = "serde_rational")]
        delta: Rational,
    },
    Scaled {
        #[serde(with = "serde_rational")]
        factor: Rational,
        inner: Box<CostDoc>,
    },
    Separation {
        #[serde(default, with = "serde_rational_vec")]
        block_count: Vec<Rational>,
        #[serde(default)]
        pairs: Vec<PairTerm>,
    },
}

impl CostDoc {
    fn into_cost(self) -> Result<CostFunction> {
        Ok(match self {
            CostDoc::Table { n, table } => {
                let mut entries = Vec::new();
                for (key, cost) in table {
                    entries.push((key.parse::<Partition>()?, cost));
                }
                let inferred = entries.iter().map(|(p, _)| p.n()).max().unwrap_or(1);
                let n = n.unwrap_or(inferred);
                // keys parse with n = largest index + 1; a key must mention every state
                CostFunction::table(n, entries)?
            }
            CostDoc::PerBlock { delta } => CostFunction::PerBlock { delta },
            CostDoc::Contract { delta } => CostFunction::ContractRule { delta },
            CostDoc::Scaled { factor, inner } => {
                CostFunction::Scaled { factor, inner: Box::new(inner.into_cost()?) }
            }
            CostDoc::Separation { block_count, pairs } => {
                CostFunction::Separation(SeparationCost { block_count, pairs })
            }
        })
    }

    fn from_cost(cost: &CostFunction) -> Result<Self> {
        Ok(match cost {
            CostFunction::Table(t) => CostDoc::Table {
                n: Some(t.n),
                table: t.entries.iter().map(|(p, c)| (p.to_string(), c.clone())).collect(),
            },
            CostFunction::PerBlock { delta } => CostDoc::PerBlock { delta: delta.clone() },
            CostFunction::ContractRule { delta } => CostDoc::Contract { delta: delta.clone() },
            CostFunction::Scaled { factor, inner } => {
                CostDoc::Scaled { factor: factor.clone(), inner: Box::new(Self::from_cost(inner)?) }
            }
            CostFunction::Separation(c) => {
                CostDoc::Separation { block_count: c.block_count.clone(), pairs: c.pairs.clone() }
            }
            CostFunction::Rule { name, .. } => {
                return Err(Error::InvalidCost(format!("rule cost {name:?} has no file form")))
            }
        })
    }
}

impl Serialize for CostFunction {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        CostDoc::from_cost(self).map_err(serde::ser::Error::custom)?.serialize(s)
    }
}

impl<'de> Deserialize<'de> for CostFunction {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        CostDoc::deserialize(d)?.into_cost().map_err(serde::de::Error::custom)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "violation", rename_all = "snake_case")]
pub enum CostViolation {
    NotNormalized { cost: Cost },
    Negative { partition: Partition, cost: Cost },
    NotMonotone { finer: Partition, finer_cost: Cost, coarser: Partition, coarser_cost: Cost },
}

impl fmt::Display for CostViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CostViolation::NotNormalized { cost } => write!(f, "cost of the trivial partition is {cost}, not 0"),
            CostViolation::Negative { partition, cost } => write!(f, "negative cost {cost} on {partition}"),
            CostViolation::NotMonotone { finer, finer_cost, coarser, coarser_cost } => write!(
                f,
                "{finer} refines {coarser} but costs {finer_cost} < {coarser_cost}"
            ),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub violations: Vec<CostViolation>,
    pub pairs_checked: usize,
    /// `"table-pairs"`, `"analytic"` or `"covering-pairs"`
    pub method: &'static str,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks `C({Ω}) = 0`, nonnegativity, and monotonicity under refinement.
///
/// Tables are checked pairwise over their listed entries, which suffices for
/// the monotone extension used on unlisted partitions. The per-block and
/// contract rules are checked analytically. Arbitrary rules are checked on
/// every covering pair (merge of two blocks), which needs `n ≤ cap`.
pub fn validate_cost(cost: &CostFunction, space: &StateSpace, cap: usize) -> Result<ValidationReport> {
    let n = space.n();
    if let Some(index) = separation_of(cost).and_then(SeparationCost::max_state) {
        if index >= n {
            return Err(Error::StateOutOfRange { index, n });
        }
    }
    let mut violations = Vec::new();
    let trivial_cost = cost.cost(&Partition::trivial(n));
    if trivial_cost != Cost::zero() {
        violations.push(CostViolation::NotNormalized { cost: trivial_cost });
    }
    match analytic_sign(cost) {
        Some(Ok(())) => {
            return Ok(ValidationReport { violations, pairs_checked: 0, method: "analytic" });
        }
        Some(Err(())) => {
            violations.push(CostViolation::NotMonotone {
                finer: Partition::discrete(n),
                finer_cost: cost.cost(&Partition::discrete(n)),
                coarser: Partition::trivial(n),
                coarser_cost: cost.cost(&Partition::trivial(n)),
            });
            return Ok(ValidationReport { violations, pairs_checked: 0, method: "analytic" });
        }
        None => {}
    }
    if let Some(table) = table_of(cost) {
        let (table, factor) = table;
        if table.n != n {
            return Err(Error::SpaceMismatch { expected: n, actual: table.n });
        }
        let entries: Vec<(&Partition, Cost)> = table.entries.iter().map(|(p, c)| (p, c.scaled(&factor))).collect();
        let mut pairs = 0;
        for (p, c) in &entries {
            if let Cost::Finite(v) = c {
                if v.is_negative() {
                    violations.push(CostViolation::Negative { partition: (*p).clone(), cost: c.clone() });
                }
            }
        }
        for (a, ca) in &entries {
            for (b, cb) in &entries {
                if a == b || !a.refines_unchecked(b) {
                    continue;
                }
                pairs += 1;
                if ca < cb {
                    violations.push(CostViolation::NotMonotone {
                        finer: (*a).clone(),
                        finer_cost: ca.clone(),
                        coarser: (*b).clone(),
                        coarser_cost: cb.clone(),
                    });
                }
            }
        }
        return Ok(ValidationReport { violations, pairs_checked: pairs, method: "table-pairs" });
    }
    if n > cap {
        return Err(Error::CapExceeded { n, cap });
    }
    let mut pairs = 0;
    for s in PartitionIter::new(&space.full_event()) {
        let cs = cost.cost(&s);
        if let Cost::Finite(v) = &cs {
            if v.is_negative() {
                violations.push(CostViolation::Negative { partition: s.clone(), cost: cs.clone() });
            }
        }
        let k = s.num_blocks();
        for a in 0..k {
            for b in a + 1..k {
                let coarser = s.merge_blocks(a, b);
                let cc = cost.cost(&coarser);
                pairs += 1;
                if cs < cc {
                    violations.push(CostViolation::NotMonotone {
                        finer: s.clone(),
                        finer_cost: cs.clone(),
                        coarser,
                        coarser_cost: cc,
                    });
                }
            }
        }
    }
    Ok(ValidationReport { violations, pairs_checked: pairs, method: "covering-pairs" })
}

/// For the closed-form rules: Ok when monotone and nonnegative.
fn analytic_sign(cost: &CostFunction) -> Option<std::result::Result<(), ()>> {
    match cost {
        CostFunction::PerBlock { delta } | CostFunction::ContractRule { delta } => {
            Some(if delta.is_negative() { Err(()) } else { Ok(()) })
        }
        // a bad schedule falls through to enumeration, which finds a concrete pair
        CostFunction::Separation(c) if c.is_monotone() => Some(Ok(())),
        CostFunction::Scaled { factor, inner } => {
            let inner = analytic_sign(inner)?;
            Some(if factor.is_positive() { inner } else if factor.is_zero() { Ok(()) } else { Err(()) })
        }
        _ => None,
    }
}

fn separation_of(cost: &CostFunction) -> Option<&SeparationCost> {
    match cost {
        CostFunction::Separation(c) => Some(c),
        CostFunction::Scaled { inner, .. } => separation_of(inner),
        _ => None,
    }
}

fn table_of(cost: &CostFunction) -> Option<(&CostTable, Rational)> {
    match cost {
        CostFunction::Table(t) => Some((t, Rational::one())),
        CostFunction::Scaled { factor, inner } if !factor.is_negative() => {
            let (t, f) = table_of(inner)?;
            Some((t, f * factor))
        }
        _ => None,
    }
}

/// The tuple `⟨u, μ, C⟩` on a state space.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(try_from = "ModelDoc", into = "ModelDoc")]
pub struct CarModel {
    space: StateSpace,
    u: UtilityIndex,
    mu: Belief,
    cost: CostFunction,
    validated: bool,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ModelDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    states: Option<Vec<String>>,
    #[serde(default = "default_utility")]
    u: UtilityIndex,
    mu: Belief,
    cost: CostFunction,
}

fn default_utility() -> UtilityIndex {
    UtilityIndex::identity()
}

impl TryFrom<ModelDoc> for CarModel {
    type Error = Error;
    fn try_from(doc: ModelDoc) -> Result<Self> {
        let space = match doc.states {
            Some(labels) => StateSpace::with_labels(labels)?,
            None => StateSpace::new(doc.mu.n())?,
        };
        CarModel::new(space, doc.u, doc.mu, doc.cost)
    }
}

impl From<CarModel> for ModelDoc {
    fn from(m: CarModel) -> Self {
        ModelDoc { states: Some(m.space.labels().to_vec()), u: m.u, mu: m.mu, cost: m.cost }
    }
}

impl CarModel {
    /// Validated model; the cost must be normalized, nonnegative and monotone.
    pub fn new(space: StateSpace, u: UtilityIndex, mu: Belief, cost: CostFunction) -> Result<Self> {
        let mut model = Self::new_unchecked(space, u, mu, cost)?;
        let report = validate_cost(&model.cost, &model.space, DEFAULT_ENUMERATION_CAP)?;
        if let Some(v) = report.violations.first() {
            return Err(Error::InvalidCost(v.to_string()));
        }
        model.validated = true;
        Ok(model)
    }

    /// Checks dimensions only; used for negative controls with non-monotone costs.
    pub fn new_unchecked(space: StateSpace, u: UtilityIndex, mu: Belief, cost: CostFunction) -> Result<Self> {
        if mu.n() != space.n() {
            return Err(Error::SpaceMismatch { expected: space.n(), actual: mu.n() });
        }
        if let Some((t, _)) = table_of(&cost) {
            if t.n != space.n() {
                return Err(Error::SpaceMismatch { expected: space.n(), actual: t.n });
            }
        }
        Ok(CarModel { space, u, mu, cost, validated: false })
    }

    /// Uniform belief and identity utility on `n` states.
    pub fn simple(n: usize, cost: CostFunction) -> Result<Self> {
        Self::new(StateSpace::new(n)?, UtilityIndex::identity(), Belief::uniform(n), cost)
    }

    pub fn space(&self) -> &StateSpace {
        &self.space
    }

    pub fn n(&self) -> usize {
        self.space.n()
    }

    pub fn utility(&self) -> &UtilityIndex {
        &self.u
    }

    pub fn belief(&self) -> &Belief {
        &self.mu
    }

    pub fn cost_function(&self) -> &CostFunction {
        &self.cost
    }

    pub fn cost(&self, s: &Partition) -> Cost {
        self.cost.cost(s)
    }

    pub fn with_cost(&self, cost: CostFunction) -> Result<Self> {
        Self::new(self.space.clone(), self.u.clone(), self.mu.clone(), cost)
    }

    /// Same preferences, represented by `(a·u + b, a·C)`.
    pub fn affine_transform(&self, a: &Rational, b: &Rational) -> Result<Self> {
        let mut out =
            Self::new_unchecked(self.space.clone(), self.u.transformed(a, b)?, self.mu.clone(), self.cost.scaled(a))?;
        out.validated = self.validated;
        Ok(out)
    }

    /// Whether the cost passed [`validate_cost`] at construction.
    pub fn is_validated(&self) -> bool {
        self.validated
    }

    fn check_act(&self, f: &Act) -> Result<()> {
        if f.n() != self.n() {
            return Err(Error::SpaceMismatch { expected: self.n(), actual: f.n() });
        }
        Ok(())
    }

    pub fn expected_utility(&self, f: &Act) -> Result<Rational> {
        self.check_act(f)?;
        Ok(self.mu.probs().iter().zip(f.payoffs()).map(|(p, x)| p * self.u.apply(x)).sum())
    }

    pub fn evaluate(&self, f: &Act) -> Result<Value> {
        let eu = self.expected_utility(f)?;
        Ok(Value::from_parts(eu, &self.cost(&f.induced_partition())))
    }

    /// `Greater` means `f ≻ g`.
    pub fn prefers(&self, f: &Act, g: &Act) -> Result<Ordering> {
        Ok(self.evaluate(f)?.cmp(&self.evaluate(g)?))
    }

    /// The outcome `x` with `u(x) = V(f)`.
    pub fn certainty_equivalent(&self, f: &Act) -> Result<Rational> {
        match self.evaluate(f)? {
            Value::Finite(v) => Ok(self.u.invert(&v)),
            Value::NegInfinity => Err(Error::InfiniteCost),
        }
    }

    fn shares_tastes(&self, other: &CarModel) -> bool {
        self.u == other.u && self.mu == other.mu && self.n() == other.n()
    }
}

/// `x ≻¹ f` while `f ≿² x`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AversionWitness {
    pub act: Act,
    #[serde(with = "serde_rational")]
    pub constant: Rational,
}

impl AversionWitness {
    pub fn recheck(&self, m1: &CarModel, m2: &CarModel) -> Result<bool> {
        let x = Act::constant(self.act.n(), self.constant.clone());
        Ok(m1.prefers(&x, &self.act)? == Ordering::Greater && m2.prefers(&self.act, &x)? != Ordering::Less)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct AversionReport {
    /// `C¹ ≤ C²` on every partition.
    pub parameter_holds: bool,
    pub parameter_witness: Option<(Partition, Cost, Cost)>,
    /// No `x ≻¹ f` with `f ≿² x` among the supplied acts.
    pub definitional_holds: bool,
    pub definitional_witness: Option<AversionWitness>,
    /// Built from the first partition with `C¹ > C²`.
    pub constructed_witness: Option<AversionWitness>,
    pub comparisons: usize,
}

impl AversionReport {
    pub fn tests_agree(&self) -> bool {
        self.parameter_holds == self.definitional_holds
    }
}

/// An act inducing exactly `s`: block `k` pays `k`.
pub fn act_with_partition(s: &Partition) -> Act {
    let payoffs = s.labels().into_iter().map(|l| int(l.expect("full partition") as i64)).collect();
    Act::new(payoffs).expect("nonempty")
}

/// Compares "lower complexity costs": `m1` should have `C¹ ≤ C²`.
///
/// The definitional test pairs every supplied act with the supplied constants
/// and with its certainty equivalent under `m2`.
pub fn compare_aversion(m1: &CarModel, m2: &CarModel, acts: &[Act], cap: usize) -> Result<AversionReport> {
    if !m1.shares_tastes(m2) {
        return Err(Error::SharedPreconditionViolated);
    }
    if m1.n() > cap {
        return Err(Error::CapExceeded { n: m1.n(), cap });
    }
    let mut parameter_witness = None;
    for s in PartitionIter::new(&m1.space.full_event()) {
        let (c1, c2) = (m1.cost(&s), m2.cost(&s));
        if c1 > c2 {
            parameter_witness = Some((s, c1, c2));
            break;
        }
    }
    let constructed_witness = match &parameter_witness {
        Some((s, _, _)) => {
            let act = act_with_partition(s);
            let constant = m2.certainty_equivalent(&act)?;
            Some(AversionWitness { act, constant })
        }
        None => None,
    };

    let mut constants: Vec<Rational> = acts.iter().filter_map(|a| a.constant_value().cloned()).collect();
    constants.sort();
    constants.dedup();
    let mut comparisons = 0;
    let mut definitional_witness = None;
    'outer: for f in acts {
        let v1 = m1.evaluate(f)?;
        let v2 = m2.evaluate(f)?;
        let mut candidates = constants.clone();
        if let Value::Finite(v) = &v2 {
            candidates.push(m2.u.invert(v));
        }
        for x in candidates {
            comparisons += 1;
            let ux = Value::Finite(m1.u.apply(&x));
            if ux > v1 && v2 >= ux {
                definitional_witness = Some(AversionWitness { act: f.clone(), constant: x });
                break 'outer;
            }
        }
    }
    Ok(AversionReport {
        parameter_holds: parameter_witness.is_none(),
        parameter_witness,
        definitional_holds: definitional_witness.is_none(),
        definitional_witness,
        constructed_witness,
        comparisons,
    })
}

/// `αf + (1−α)x ≻¹ αf + (1−α)g` but not under `m2`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CapacityWitness {
    pub f: Act,
    pub g: Act,
    #[serde(with = "serde_rational")]
    pub x: Rational,
    #[serde(with = "serde_rational")]
    pub alpha: Rational,
}

impl CapacityWitness {
    pub fn recheck(&self, m1: &CarModel, m2: &CarModel) -> Result<bool> {
        let x = Act::constant(self.f.n(), self.x.clone());
        let left = Act::mix(&self.alpha, &self.f, &x)?;
        let right = Act::mix(&self.alpha, &self.f, &self.g)?;
        Ok(m1.prefers(&left, &right)? == Ordering::Greater && m2.prefers(&left, &right)? != Ordering::Greater)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SupportReport {
    #[serde(with = "serde_rational")]
    pub cap: Rational,
    /// supp(C¹) ⊆ supp(C²) with supp(C) = partitions costing at most `cap`
    pub holds: bool,
    pub witness: Option<Partition>,
}

#[derive(Clone, Debug, Serialize)]
pub struct CapacityReport {
    pub definitional_holds: bool,
    pub witness: Option<CapacityWitness>,
    pub comparisons: usize,
    /// Only present when a support cap was supplied.
    pub support: Option<SupportReport>,
}

/// Compares "higher capacity for complex acts" of `m1` over `m2` on the
/// supplied acts and weights. Constants are the supplied constant acts, or
/// the expected outcomes of the supplied acts when none are given.
pub fn compare_capacity(
    m1: &CarModel,
    m2: &CarModel,
    acts: &[Act],
    weights: &[Rational],
    support_cap: Option<&Rational>,
    cap: usize,
) -> Result<CapacityReport> {
    if !m1.shares_tastes(m2) {
        return Err(Error::SharedPreconditionViolated);
    }
    let mut constants: Vec<Rational> = acts.iter().filter_map(|a| a.constant_value().cloned()).collect();
    if constants.is_empty() {
        constants = acts.iter().map(|a| m1.mu.expectation(a.payoffs())).collect();
    }
    constants.sort();
    constants.dedup();
    let mut comparisons = 0;
    let mut witness = None;
    'outer: for f in acts {
        for g in acts {
            for x in &constants {
                let xa = Act::constant(f.n(), x.clone());
                for alpha in weights {
                    let left = Act::mix(alpha, f, &xa)?;
                    let right = Act::mix(alpha, f, g)?;
                    comparisons += 1;
                    if m1.prefers(&left, &right)? == Ordering::Greater
                        && m2.prefers(&left, &right)? != Ordering::Greater
                    {
                        witness = Some(CapacityWitness { f: f.clone(), g: g.clone(), x: x.clone(), alpha: alpha.clone() });
                        break 'outer;
                    }
                }
            }
        }
    }
    let support = match support_cap {
        None => None,
        Some(limit) => {
            if m1.n() > cap {
                return Err(Error::CapExceeded { n: m1.n(), cap });
            }
            let bound = Cost::Finite(limit.clone());
            let witness = PartitionIter::new(&m1.space.full_event())
                .find(|s| m1.cost(s) <= bound && m2.cost(s) > bound);
            Some(SupportReport { cap: limit.clone(), holds: witness.is_none(), witness })
        }
    };
    Ok(CapacityReport { definitional_holds: witness.is_none(), witness, comparisons, support })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;

    fn p(n: usize, blocks: &[&[usize]]) -> Partition {
        let blocks: Vec<Vec<usize>> = blocks.iter().map(|b| b.to_vec()).collect();
        Partition::from_full_blocks(n, &blocks).unwrap()
    }

    fn discrete_one(n: usize) -> CostFunction {
        CostFunction::finite_table(n, [(Partition::discrete(n), int(1))]).unwrap()
    }

    #[test]
    fn belief_validation() {
        assert!(Belief::new(vec![ratio(1, 2), ratio(1, 3)]).is_err());
        assert!(Belief::new(vec![ratio(3, 2), ratio(-1, 2)]).is_err());
        let b = Belief::new(vec![ratio(1, 6), ratio(1, 3), ratio(1, 2)]).unwrap();
        assert_eq!(b.prob_of(&Event::new(3, [1, 2]).unwrap()), ratio(5, 6));
    }

    #[test]
    fn validate_examples() {
        let space = StateSpace::new(3).unwrap();
        let r = validate_cost(&CostFunction::PerBlock { delta: int(1) }, &space, 12).unwrap();
        assert!(r.is_valid());
        let r = validate_cost(&CostFunction::ContractRule { delta: ratio(1, 10) }, &space, 12).unwrap();
        assert!(r.is_valid());
        let bad = CostFunction::finite_table(
            3,
            [(Partition::discrete(3), int(1)), (p(3, &[&[0], &[1, 2]]), int(2))],
        )
        .unwrap();
        let r = validate_cost(&bad, &space, 12).unwrap();
        assert_eq!(
            r.violations,
            vec![CostViolation::NotMonotone {
                finer: Partition::discrete(3),
                finer_cost: Cost::Finite(int(1)),
                coarser: p(3, &[&[0], &[1, 2]]),
                coarser_cost: Cost::Finite(int(2)),
            }]
        );
        let unnormalized = CostFunction::finite_table(3, [(Partition::trivial(3), int(1))]).unwrap();
        assert!(!validate_cost(&unnormalized, &space, 12).unwrap().is_valid());
    }

    #[test]
    fn rule_validation_by_covering_pairs() {
        let space = StateSpace::new(4).unwrap();
        let good = CostFunction::rule("squares", |s: &Partition| {
            let k = s.num_blocks() as i64;
            Cost::Finite(int((k - 1) * (k - 1)))
        });
        let r = validate_cost(&good, &space, 12).unwrap();
        assert!(r.is_valid());
        assert_eq!(r.method, "covering-pairs");
        let bad = CostFunction::rule("reversed", |s: &Partition| Cost::Finite(int(4 - s.num_blocks() as i64)));
        assert!(!validate_cost(&bad, &space, 12).unwrap().is_valid());
        assert!(validate_cost(&good, &space, 3).is_err());
    }

    #[test]
    fn table_validation_agrees_with_covering_pairs() {
        // the monotone extension of a consistent table passes the rule scan
        let n = 4;
        let table = CostFunction::finite_table(
            n,
            [
                (p(n, &[&[0, 1], &[2, 3]]), ratio(1, 2)),
                (p(n, &[&[0], &[1], &[2, 3]]), ratio(3, 4)),
                (Partition::discrete(n), int(2)),
            ],
        )
        .unwrap();
        let space = StateSpace::new(n).unwrap();
        assert!(validate_cost(&table, &space, 12).unwrap().is_valid());
        let as_rule = {
            let t = table.clone();
            CostFunction::rule("wrapped", move |s: &Partition| t.cost(s))
        };
        assert!(validate_cost(&as_rule, &space, 12).unwrap().is_valid());
    }

    #[test]
    fn evaluate_investment_example() {
        let m = CarModel::simple(3, discrete_one(3)).unwrap();
        let f = Act::from_ints(&[1, 3, 4]);
        let g = Act::from_ints(&[2, 2, 2]);
        assert_eq!(m.evaluate(&g).unwrap(), Value::Finite(int(2)));
        assert_eq!(m.evaluate(&f).unwrap(), Value::Finite(ratio(5, 3)));
        assert_eq!(m.prefers(&f, &g).unwrap(), Ordering::Less);
        assert_eq!(m.prefers(&f, &f).unwrap(), Ordering::Equal);
        let seu = CarModel::simple(3, CostFunction::zero()).unwrap();
        assert_eq!(seu.prefers(&f, &g).unwrap(), Ordering::Greater);
    }

    #[test]
    fn investment_gap_equals_cost_difference() {
        let (c2, c3) = (ratio(1, 5), ratio(1, 2));
        let cost = CostFunction::finite_table(
            3,
            [(p(3, &[&[0, 1], &[2]]), c2.clone()), (Partition::discrete(3), c3.clone())],
        )
        .unwrap();
        let m = CarModel::simple(3, cost).unwrap();
        let half = ratio(1, 2);
        let h = Act::from_ints(&[4, 4, 6]);
        let lg = Act::mix(&half, &Act::from_ints(&[2, 2, 2]), &h).unwrap();
        let lf = Act::mix(&half, &Act::from_ints(&[1, 2, 3]), &h).unwrap();
        assert_eq!(m.expected_utility(&lg).unwrap(), m.expected_utility(&lf).unwrap());
        let gap = m.evaluate(&lg).unwrap().finite().unwrap() - m.evaluate(&lf).unwrap().finite().unwrap();
        assert_eq!(gap, c3 - c2);
    }

    #[test]
    fn certainty_equivalents() {
        let m = CarModel::simple(3, discrete_one(3)).unwrap();
        assert_eq!(m.certainty_equivalent(&Act::from_ints(&[7, 7, 7])).unwrap(), int(7));
        let f = Act::from_ints(&[1, 3, 4]);
        assert_eq!(m.certainty_equivalent(&f).unwrap(), ratio(5, 3));
        let u = UtilityIndex::new(int(2), int(1)).unwrap();
        let m2 = CarModel::new(m.space().clone(), u, Belief::uniform(3), discrete_one(3)).unwrap();
        // V = 2·8/3 + 1 − 1 = 16/3, CE = (16/3 − 1)/2
        let ce = m2.certainty_equivalent(&f).unwrap();
        assert_eq!(ce, ratio(13, 6));
        let x = Act::constant(3, ce);
        assert_eq!(m2.prefers(&x, &f).unwrap(), Ordering::Equal);
    }

    #[test]
    fn infinite_costs() {
        let cost = CostFunction::table(3, [(Partition::discrete(3), Cost::Infinite)]).unwrap();
        let m = CarModel::simple(3, cost).unwrap();
        let f = Act::from_ints(&[1, 2, 3]);
        assert_eq!(m.evaluate(&f).unwrap(), Value::NegInfinity);
        assert_eq!(m.certainty_equivalent(&f), Err(Error::InfiniteCost));
        assert_eq!(m.prefers(&Act::from_ints(&[0, 0, 0]), &f).unwrap(), Ordering::Greater);
    }

    #[test]
    fn aversion_comparisons() {
        let grid: Vec<Act> = (0..5)
            .flat_map(|a| (0..5).flat_map(move |b| (0..4).map(move |c| Act::from_ints(&[a, b, c]))))
            .collect();
        assert_eq!(grid.len(), 100);
        let m1 = CarModel::simple(3, CostFunction::PerBlock { delta: int(1) }).unwrap();
        let m2 = CarModel::simple(3, CostFunction::PerBlock { delta: int(2) }).unwrap();
        let r = compare_aversion(&m1, &m2, &grid, 12).unwrap();
        assert!(r.parameter_holds && r.definitional_holds && r.tests_agree());
        let same = compare_aversion(&m1, &m1, &grid, 12).unwrap();
        assert!(same.parameter_holds && same.definitional_holds);

        let a = CarModel::simple(3, CostFunction::finite_table(3, [(Partition::discrete(3), int(3))]).unwrap()).unwrap();
        let b = CarModel::simple(3, CostFunction::finite_table(3, [(Partition::discrete(3), int(1))]).unwrap()).unwrap();
        let r = compare_aversion(&a, &b, &grid, 12).unwrap();
        assert!(!r.parameter_holds);
        assert!(!r.definitional_holds);
        assert!(r.definitional_witness.as_ref().unwrap().recheck(&a, &b).unwrap());
        assert!(r.constructed_witness.as_ref().unwrap().recheck(&a, &b).unwrap());

        let other_belief = CarModel::new(
            StateSpace::new(3).unwrap(),
            UtilityIndex::identity(),
            Belief::new(vec![ratio(1, 2), ratio(1, 4), ratio(1, 4)]).unwrap(),
            CostFunction::zero(),
        )
        .unwrap();
        assert!(compare_aversion(&m1, &other_belief, &grid, 12).is_err());
    }

    #[test]
    fn capacity_comparisons() {
        let acts: Vec<Act> = [[0, 1, 2], [2, 2, 2], [3, 0, 0], [1, 1, 4], [0, 0, 0]]
            .iter()
            .map(|v| Act::from_ints(v))
            .collect();
        let weights: Vec<Rational> = (1..10).map(|k| ratio(k, 10)).collect();
        let m = CarModel::simple(3, CostFunction::PerBlock { delta: int(1) }).unwrap();
        let r = compare_capacity(&m, &m, &acts, &weights, None, 12).unwrap();
        assert!(r.definitional_holds);

        // crossed costs: m1 finds two-block acts cheap, m2 finds them dear
        let m1 = CarModel::simple(
            3,
            CostFunction::finite_table(
                3,
                [
                    (p(3, &[&[0, 1], &[2]]), int(3)),
                    (p(3, &[&[0], &[1, 2]]), int(3)),
                    (p(3, &[&[0, 2], &[1]]), int(3)),
                    (Partition::discrete(3), int(3)),
                ],
            )
            .unwrap(),
        )
        .unwrap();
        let m2 = CarModel::simple(3, CostFunction::zero()).unwrap();
        let r = compare_capacity(&m1, &m2, &acts, &weights, Some(&int(1)), 12).unwrap();
        assert!(!r.definitional_holds);
        assert!(r.witness.as_ref().unwrap().recheck(&m1, &m2).unwrap());
        let support = r.support.unwrap();
        assert!(support.holds);
    }

    #[test]
    fn affine_transform_preserves_order() {
        let m = CarModel::simple(3, discrete_one(3)).unwrap();
        let t = m.affine_transform(&int(3), &int(-7)).unwrap();
        let acts = [Act::from_ints(&[1, 3, 4]), Act::from_ints(&[2, 2, 2]), Act::from_ints(&[0, 5, 5])];
        for f in &acts {
            for g in &acts {
                assert_eq!(m.prefers(f, g).unwrap(), t.prefers(f, g).unwrap());
            }
        }
    }

    #[test]
    fn model_round_trips_through_json() {
        let json = r#"{
            "u": {"a": "1", "b": "0"},
            "mu": ["1/3", "1/3", "1/3"],
            "cost": {"kind": "table", "table": {"[[0],[1],[2]]": "1", "[[0,1],[2]]": "1/4"}}
        }"#;
        let m: CarModel = serde_json::from_str(json).unwrap();
        assert_eq!(m.cost(&Partition::discrete(3)), Cost::Finite(int(1)));
        assert_eq!(m.cost(&p(3, &[&[0], &[1, 2]])), Cost::zero());
        let text = serde_json::to_string(&m).unwrap();
        let back: CarModel = serde_json::from_str(&text).unwrap();
        assert_eq!(back.cost(&p(3, &[&[0, 1], &[2]])), Cost::Finite(ratio(1, 4)));

        let bad = r#"{"mu": ["1/2","1/2","1/2"], "cost": {"kind": "per_block", "delta": "1"}}"#;
        assert!(serde_json::from_str::<CarModel>(bad).is_err());
        let non_monotone = r#"{"mu": ["1/3","1/3","1/3"],
            "cost": {"kind": "table", "table": {"[[0],[1],[2]]": "1", "[[0],[1,2]]": "2"}}}"#;
        assert!(serde_json::from_str::<CarModel>(non_monotone).is_err());
    }

    #[test]
    fn separation_cost() {
        let doc = r#"{"kind": "separation", "block_count": ["0", "1/10"],
            "pairs": [{"states": [0, 1], "weights": ["0", "1/4", "4"]}]}"#;
        let cost: CostFunction = serde_json::from_str(doc).unwrap();
        assert_eq!(cost.cost(&Partition::trivial(3)), Cost::zero());
        assert_eq!(cost.cost(&p(3, &[&[0], &[1, 2]])), Cost::Finite(ratio(1, 10) + ratio(1, 4)));
        assert_eq!(cost.cost(&p(3, &[&[0, 1], &[2]])), Cost::Finite(ratio(1, 10)));
        assert_eq!(cost.cost(&Partition::discrete(3)), Cost::Finite(ratio(1, 10) + int(4)));
        let space = StateSpace::new(3).unwrap();
        let r = validate_cost(&cost, &space, 12).unwrap();
        assert!(r.is_valid() && r.method == "analytic");
        let back: CostFunction = serde_json::from_str(&serde_json::to_string(&cost).unwrap()).unwrap();
        assert_eq!(back.cost(&Partition::discrete(3)), cost.cost(&Partition::discrete(3)));

        // a decreasing schedule is caught by enumeration with a real pair
        let bad: CostFunction = serde_json::from_str(
            r#"{"kind": "separation", "pairs": [{"states": [0, 1], "weights": ["0", "2", "1"]}]}"#,
        )
        .unwrap();
        let r = validate_cost(&bad, &space, 12).unwrap();
        assert_eq!(r.method, "covering-pairs");
        for v in &r.violations {
            if let CostViolation::NotMonotone { finer, coarser, .. } = v {
                assert!(finer.refines(coarser).unwrap());
            }
        }
        assert!(!r.is_valid());
        let out_of_range: CostFunction =
            serde_json::from_str(r#"{"kind": "separation", "pairs": [{"states": [0, 5], "weights": ["1"]}]}"#).unwrap();
        assert!(validate_cost(&out_of_range, &space, 12).is_err());
    }

    #[test]
    fn separation_monotone_by_enumeration() {
        // brute-force oracle over all comparable pairs at n = 5
        let cost = CostFunction::Separation(SeparationCost {
            block_count: vec![int(0), ratio(1, 3), ratio(1, 2)],
            pairs: vec![
                PairTerm { states: [0, 4], weights: vec![int(0), int(1), int(3)] },
                PairTerm { states: [2, 3], weights: vec![ratio(1, 8)] },
            ],
        });
        let all: Vec<Partition> = PartitionIter::new(&StateSpace::new(5).unwrap().full_event()).collect();
        for a in &all {
            for b in &all {
                if a.refines(b).unwrap() {
                    assert!(cost.cost(a) >= cost.cost(b), "{a} vs {b}");
                }
            }
        }
    }
}
