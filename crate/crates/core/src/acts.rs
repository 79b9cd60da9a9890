//! Acts: state-contingent outcome vectors.

use std::collections::BTreeSet;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::{format_rational, int, serde_rational_vec, Rational};
use crate::statespace::{Event, Partition};

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Act {
    #[serde(with = "serde_rational_vec")]
    payoffs: Vec<Rational>,
}

impl Act {
    pub fn new(payoffs: Vec<Rational>) -> Result<Self> {
        if payoffs.is_empty() {
            return Err(Error::InvalidPartition("act must have at least one state".into()));
        }
        Ok(Act { payoffs })
    }

    pub fn from_ints(values: &[i64]) -> Self {
        Act { payoffs: values.iter().map(|&v| int(v)).collect() }
    }

    pub fn constant(n: usize, value: Rational) -> Self {
        Act { payoffs: vec![value; n] }
    }

    pub fn n(&self) -> usize {
        self.payoffs.len()
    }

    pub fn payoffs(&self) -> &[Rational] {
        &self.payoffs
    }

    pub fn get(&self, state: usize) -> &Rational {
        &self.payoffs[state]
    }

    pub fn is_constant(&self) -> bool {
        self.payoffs.windows(2).all(|w| w[0] == w[1])
    }

    /// The common value of a constant act.
    pub fn constant_value(&self) -> Option<&Rational> {
        self.is_constant().then(|| &self.payoffs[0])
    }

    /// States grouped by exact outcome equality.
    pub fn induced_partition(&self) -> Partition {
        Partition::from_full_labels(&self.payoffs.iter().collect::<Vec<_>>())
    }

    /// Tolerance grouping for imported numeric data: sorted values are chained
    /// into one block while consecutive gaps stay within `eps`.
    pub fn induced_partition_within(&self, eps: &Rational) -> Partition {
        let mut order: Vec<usize> = (0..self.n()).collect();
        order.sort_by(|&a, &b| self.payoffs[a].cmp(&self.payoffs[b]));
        let mut cluster = vec![0usize; self.n()];
        let mut current = 0;
        for w in order.windows(2) {
            if &self.payoffs[w[1]] - &self.payoffs[w[0]] > *eps {
                current += 1;
            }
            cluster[w[1]] = current;
        }
        Partition::from_full_labels(&cluster)
    }

    /// Distinct outcomes on `event`, ascending: f(E).
    pub fn values_on(&self, event: &Event) -> Vec<Rational> {
        let set: BTreeSet<&Rational> = event.members().iter().map(|&i| &self.payoffs[i]).collect();
        set.into_iter().cloned().collect()
    }

    fn check_same_space(&self, other: &Act) -> Result<()> {
        if self.n() != other.n() {
            return Err(Error::SpaceMismatch { expected: self.n(), actual: other.n() });
        }
        Ok(())
    }

    /// `αf + (1−α)g`, statewise.
    pub fn mix(alpha: &Rational, f: &Act, g: &Act) -> Result<Act> {
        f.check_same_space(g)?;
        if alpha.is_negative() || *alpha > Rational::one() {
            return Err(Error::WeightOutOfRange(format_rational(alpha)));
        }
        let beta = Rational::one() - alpha;
        let payoffs = f.payoffs.iter().zip(&g.payoffs).map(|(a, b)| alpha * a + &beta * b).collect();
        Ok(Act { payoffs })
    }

    /// `fEg`: `f` on the event, `g` elsewhere.
    pub fn splice(f: &Act, event: &Event, g: &Act) -> Result<Act> {
        f.check_same_space(g)?;
        if event.n() != f.n() {
            return Err(Error::SpaceMismatch { expected: f.n(), actual: event.n() });
        }
        let mask = event.mask();
        let payoffs = (0..f.n())
            .map(|i| if mask[i] { f.payoffs[i].clone() } else { g.payoffs[i].clone() })
            .collect();
        Ok(Act { payoffs })
    }

    /// `fEx` for a constant outcome `x`.
    pub fn splice_constant(f: &Act, event: &Event, x: &Rational) -> Result<Act> {
        Self::splice(f, event, &Act::constant(f.n(), x.clone()))
    }
}

/// A weight strictly inside (0,1) with the two acts it mixes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MixtureProfile {
    weight: Rational,
    left: Act,
    right: Act,
}

impl MixtureProfile {
    pub fn new(weight: Rational, left: Act, right: Act) -> Result<Self> {
        if !weight.is_positive() || weight >= Rational::one() {
            return Err(Error::WeightOutOfRange(format_rational(&weight)));
        }
        left.check_same_space(&right)?;
        Ok(MixtureProfile { weight, left, right })
    }

    pub fn weight(&self) -> &Rational {
        &self.weight
    }

    pub fn left(&self) -> &Act {
        &self.left
    }

    pub fn right(&self) -> &Act {
        &self.right
    }

    pub fn act(&self) -> Act {
        Act::mix(&self.weight, &self.left, &self.right).expect("validated at construction")
    }
}

/// Weights λ ∈ (0,1) at which two states that are generically separated by
/// `λf + (1−λ)g` receive equal outcomes, ascending and deduplicated.
pub fn collision_weights(f: &Act, g: &Act) -> Result<Vec<Rational>> {
    f.check_same_space(g)?;
    let n = f.n();
    let mut out = BTreeSet::new();
    for i in 0..n {
        for j in i + 1..n {
            // g_i + λ d_i = g_j + λ d_j with d = f − g
            let di = &f.payoffs[i] - &g.payoffs[i];
            let dj = &f.payoffs[j] - &g.payoffs[j];
            let slope = &di - &dj;
            if slope.is_zero() {
                continue;
            }
            let lambda = (&g.payoffs[j] - &g.payoffs[i]) / slope;
            if lambda.is_positive() && lambda < Rational::one() {
                out.insert(lambda);
            }
        }
    }
    Ok(out.into_iter().collect())
}

/// Partitions of `λf + (1−λ)g` over λ ∈ (0,1): the generic one plus one per
/// collision weight. There are only finitely many.
pub fn mixture_partitions(f: &Act, g: &Act) -> Result<Vec<(Option<Rational>, Partition)>> {
    let generic_labels: Vec<(&Rational, &Rational)> = f.payoffs.iter().zip(&g.payoffs).collect();
    let mut out = vec![(None, Partition::from_full_labels(&generic_labels))];
    for lambda in collision_weights(f, g)? {
        let p = Act::mix(&lambda, f, g)?.induced_partition();
        out.push((Some(lambda), p));
    }
    Ok(out)
}

/// Membership of `f` in the complexity cone of `g`: σ(g) ⊆ σ(λf + (1−λ)g)
/// for every λ ∈ (0,1).
pub fn in_complexity_cone(f: &Act, g: &Act) -> Result<bool> {
    let sg = g.induced_partition();
    Ok(mixture_partitions(f, g)?.iter().all(|(_, p)| p.refines_unchecked(&sg)))
}

/// As [`in_complexity_cone`] with strict refinement at every λ.
pub fn in_complexity_cone_strict(f: &Act, g: &Act) -> Result<bool> {
    let sg = g.induced_partition();
    Ok(mixture_partitions(f, g)?.iter().all(|(_, p)| p.refines_unchecked(&sg) && *p != sg))
}

/// Existential reading: some λ ∈ (0,1) gives σ(g) ⊆ σ(λf + (1−λ)g).
pub fn in_complexity_cone_somewhere(f: &Act, g: &Act) -> Result<bool> {
    let sg = g.induced_partition();
    Ok(mixture_partitions(f, g)?.iter().any(|(_, p)| p.refines_unchecked(&sg)))
}

/// The refinement-minimal acts agreeing with `f` on `event`: `fEx` for each
/// `x ∈ f(E)`. Returns `[f]` when the event is the whole space.
pub fn minimal_extensions(f: &Act, event: &Event) -> Result<Vec<Act>> {
    if event.n() != f.n() {
        return Err(Error::SpaceMismatch { expected: f.n(), actual: event.n() });
    }
    if event.is_full() {
        return Ok(vec![f.clone()]);
    }
    f.values_on(event).iter().map(|x| Act::splice_constant(f, event, x)).collect()
}
