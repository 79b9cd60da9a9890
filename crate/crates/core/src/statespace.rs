//! Finite state spaces, events, set partitions and the algebras they generate.
//!
//! A [`Partition`] is stored as a restricted-growth string over the states of
//! its ground set: state `i` carries the index of its block, blocks numbered in
//! order of their least member. Two partitions are equal exactly when their
//! label vectors are equal, so derived `Eq`, `Ord` and `Hash` are structural.
//!
//! Partitions usually cover the whole state space. Restricting to an event
//! yields a partition of that event; states outside the ground set carry no
//! label.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Default ceiling on `n` for Bell-number enumeration; Bell(12) = 4,213,597.
pub const DEFAULT_ENUMERATION_CAP: usize = 12;

const OUTSIDE: u16 = u16::MAX;

/// Number of set partitions of an `n`-element set.
pub fn bell(n: usize) -> u128 {
    // Bell triangle
    let mut row = vec![1u128];
    for _ in 0..n {
        let mut next = Vec::with_capacity(row.len() + 1);
        next.push(*row.last().unwrap());
        for value in &row {
            let prev = *next.last().unwrap();
            next.push(prev + value);
        }
        row = next;
    }
    row[0]
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct StateSpace {
    labels: Vec<String>,
}

impl StateSpace {
    /// `n` states labelled `ω1..ωn`.
    pub fn new(n: usize) -> Result<Self> {
        Self::with_labels((1..=n).map(|i| format!("ω{i}")).collect())
    }

    pub fn with_labels(labels: Vec<String>) -> Result<Self> {
        if labels.is_empty() {
            return Err(Error::InvalidPartition("state space must be nonempty".into()));
        }
        if labels.len() >= OUTSIDE as usize {
            return Err(Error::InvalidPartition("too many states".into()));
        }
        let distinct: BTreeSet<&String> = labels.iter().collect();
        if distinct.len() != labels.len() {
            return Err(Error::InvalidPartition("state labels must be distinct".into()));
        }
        Ok(StateSpace { labels })
    }

    pub fn n(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn full_event(&self) -> Event {
        Event::full(self.n())
    }

    /// Human-readable rendering such as `{{ω1},{ω2,ω3}}`.
    pub fn show_partition(&self, partition: &Partition) -> String {
        let blocks: Vec<String> = partition
            .blocks()
            .iter()
            .map(|b| {
                let names: Vec<&str> = b.iter().map(|&i| self.labels[i].as_str()).collect();
                format!("{{{}}}", names.join(","))
            })
            .collect();
        format!("{{{}}}", blocks.join(","))
    }

    pub fn show_event(&self, event: &Event) -> String {
        let names: Vec<&str> = event.members().iter().map(|&i| self.labels[i].as_str()).collect();
        format!("{{{}}}", names.join(","))
    }
}

/// A nonempty set of states.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Event {
    n: usize,
    members: Vec<usize>,
}

impl Event {
    pub fn new(n: usize, members: impl IntoIterator<Item = usize>) -> Result<Self> {
        let set: BTreeSet<usize> = members.into_iter().collect();
        if set.is_empty() {
            return Err(Error::EmptyEvent);
        }
        if let Some(&index) = set.iter().next_back() {
            if index >= n {
                return Err(Error::StateOutOfRange { index, n });
            }
        }
        Ok(Event { n, members: set.into_iter().collect() })
    }

    pub fn full(n: usize) -> Self {
        Event { n, members: (0..n).collect() }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn members(&self) -> &[usize] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    /// Always false: events are nonempty by construction.
    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn is_full(&self) -> bool {
        self.members.len() == self.n
    }

    pub fn contains(&self, state: usize) -> bool {
        self.members.binary_search(&state).is_ok()
    }

    pub fn mask(&self) -> Vec<bool> {
        let mut mask = vec![false; self.n];
        for &i in &self.members {
            mask[i] = true;
        }
        mask
    }

    /// States outside the event; `None` when the event is the whole space.
    pub fn complement(&self) -> Option<Event> {
        let mask = self.mask();
        let rest: Vec<usize> = (0..self.n).filter(|&i| !mask[i]).collect();
        if rest.is_empty() {
            None
        } else {
            Some(Event { n: self.n, members: rest })
        }
    }

    pub fn is_subset_of(&self, other: &Event) -> bool {
        self.members.iter().all(|&i| other.contains(i))
    }

    pub fn intersection(&self, other: &Event) -> Option<Event> {
        let members: Vec<usize> = self.members.iter().copied().filter(|&i| other.contains(i)).collect();
        if members.is_empty() {
            None
        } else {
            Some(Event { n: self.n, members })
        }
    }

    pub fn union(&self, other: &Event) -> Event {
        let set: BTreeSet<usize> = self.members.iter().chain(other.members.iter()).copied().collect();
        Event { n: self.n, members: set.into_iter().collect() }
    }
}

impl Serialize for Event {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.members.serialize(s)
    }
}

/// A set partition of a ground set of states, in canonical form.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Partition {
    labels: Vec<u16>,
}

impl Partition {
    /// Canonicalizes an arbitrary labelling; `None` marks states outside the
    /// ground set.
    pub fn from_labels<L: Copy + Eq>(raw: &[Option<L>]) -> Self {
        let mut seen: Vec<L> = Vec::new();
        let labels = raw
            .iter()
            .map(|slot| match slot {
                None => OUTSIDE,
                Some(l) => match seen.iter().position(|s| s == l) {
                    Some(p) => p as u16,
                    None => {
                        seen.push(*l);
                        (seen.len() - 1) as u16
                    }
                },
            })
            .collect();
        Partition { labels }
    }

    /// Canonicalizes a full labelling (every state in the ground set).
    pub fn from_full_labels<L: Copy + Eq>(raw: &[L]) -> Self {
        let wrapped: Vec<Option<L>> = raw.iter().map(|&l| Some(l)).collect();
        Self::from_labels(&wrapped)
    }

    /// Builds a partition of the union of `blocks` inside a space of `n`
    /// states. Blocks must be nonempty and pairwise disjoint.
    pub fn from_blocks(n: usize, blocks: &[Vec<usize>]) -> Result<Self> {
        if n == 0 || n >= OUTSIDE as usize {
            return Err(Error::InvalidPartition(format!("unsupported state count {n}")));
        }
        let mut raw: Vec<Option<usize>> = vec![None; n];
        for (b, block) in blocks.iter().enumerate() {
            if block.is_empty() {
                return Err(Error::InvalidPartition("empty block".into()));
            }
            for &i in block {
                if i >= n {
                    return Err(Error::StateOutOfRange { index: i, n });
                }
                if raw[i].is_some() {
                    return Err(Error::InvalidPartition(format!("state {i} appears in two blocks")));
                }
                raw[i] = Some(b);
            }
        }
        if raw.iter().all(Option::is_none) {
            return Err(Error::InvalidPartition("no blocks".into()));
        }
        Ok(Self::from_labels(&raw))
    }

    /// Like [`Partition::from_blocks`] but the blocks must cover all `n` states.
    pub fn from_full_blocks(n: usize, blocks: &[Vec<usize>]) -> Result<Self> {
        let p = Self::from_blocks(n, blocks)?;
        if !p.is_full() {
            return Err(Error::InvalidPartition("blocks do not cover the state space".into()));
        }
        Ok(p)
    }

    /// `{Ω}`: the single-block partition.
    pub fn trivial(n: usize) -> Self {
        Partition { labels: vec![0; n] }
    }

    /// Every state in its own block.
    pub fn discrete(n: usize) -> Self {
        Partition { labels: (0..n as u16).collect() }
    }

    /// The partition `{E}` of the event itself.
    pub fn single_block(event: &Event) -> Self {
        let raw: Vec<Option<u8>> = (0..event.n()).map(|i| event.contains(i).then_some(0)).collect();
        Self::from_labels(&raw)
    }

    /// Singletons of the event.
    pub fn discrete_on(event: &Event) -> Self {
        let raw: Vec<Option<usize>> = (0..event.n()).map(|i| event.contains(i).then_some(i)).collect();
        Self::from_labels(&raw)
    }

    pub fn n(&self) -> usize {
        self.labels.len()
    }

    pub fn num_blocks(&self) -> usize {
        self.labels.iter().filter(|&&l| l != OUTSIDE).map(|&l| l as usize + 1).max().unwrap_or(0)
    }

    pub fn is_full(&self) -> bool {
        !self.labels.contains(&OUTSIDE)
    }

    pub fn block_of(&self, state: usize) -> Option<usize> {
        match self.labels.get(state) {
            Some(&l) if l != OUTSIDE => Some(l as usize),
            _ => None,
        }
    }

    /// Ground-set membership per state.
    pub fn ground_mask(&self) -> Vec<bool> {
        self.labels.iter().map(|&l| l != OUTSIDE).collect()
    }

    pub fn ground(&self) -> Event {
        Event {
            n: self.n(),
            members: (0..self.n()).filter(|&i| self.labels[i] != OUTSIDE).collect(),
        }
    }

    /// Blocks in canonical order, each sorted ascending.
    pub fn blocks(&self) -> Vec<Vec<usize>> {
        let mut blocks = vec![Vec::new(); self.num_blocks()];
        for (i, &l) in self.labels.iter().enumerate() {
            if l != OUTSIDE {
                blocks[l as usize].push(i);
            }
        }
        blocks
    }

    pub fn block_events(&self) -> Vec<Event> {
        self.blocks().into_iter().map(|members| Event { n: self.n(), members }).collect()
    }

    /// Raw block index per state (`None` outside the ground set).
    pub fn labels(&self) -> Vec<Option<usize>> {
        self.labels.iter().map(|&l| (l != OUTSIDE).then_some(l as usize)).collect()
    }

    fn check_compatible(&self, other: &Partition) -> Result<()> {
        if self.n() != other.n() {
            return Err(Error::SpaceMismatch { expected: self.n(), actual: other.n() });
        }
        if self.ground_mask() != other.ground_mask() {
            return Err(Error::GroundMismatch);
        }
        Ok(())
    }

    /// `self` is finer than or equal to `other`: every block of `self` lies
    /// inside a block of `other` (equivalently σ(other) ⊆ σ(self)).
    pub fn refines(&self, other: &Partition) -> Result<bool> {
        self.check_compatible(other)?;
        Ok(self.refines_unchecked(other))
    }

    pub(crate) fn refines_unchecked(&self, other: &Partition) -> bool {
        let mut image = vec![OUTSIDE; self.num_blocks()];
        for (&mine, &theirs) in self.labels.iter().zip(&other.labels) {
            if mine == OUTSIDE {
                continue;
            }
            let slot = &mut image[mine as usize];
            if *slot == OUTSIDE {
                *slot = theirs;
            } else if *slot != theirs {
                return false;
            }
        }
        true
    }

    /// Refines and differs.
    pub fn strictly_refines(&self, other: &Partition) -> Result<bool> {
        Ok(self.refines(other)? && self != other)
    }

    /// Coarsest common refinement: nonempty pairwise block intersections.
    pub fn join(&self, other: &Partition) -> Result<Partition> {
        self.check_compatible(other)?;
        let raw: Vec<Option<(u16, u16)>> = self
            .labels
            .iter()
            .zip(&other.labels)
            .map(|(&a, &b)| (a != OUTSIDE).then_some((a, b)))
            .collect();
        Ok(Self::from_labels(&raw))
    }

    /// Finest common coarsening: transitive closure of "shares a block".
    pub fn meet(&self, other: &Partition) -> Result<Partition> {
        self.check_compatible(other)?;
        let n = self.n();
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(parent: &mut [usize], mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        for labels in [&self.labels, &other.labels] {
            let mut first: Vec<Option<usize>> = vec![None; n];
            for (i, &l) in labels.iter().enumerate() {
                if l == OUTSIDE {
                    continue;
                }
                match first[l as usize] {
                    None => first[l as usize] = Some(i),
                    Some(j) => {
                        let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                        parent[a] = b;
                    }
                }
            }
        }
        let raw: Vec<Option<usize>> = (0..n)
            .map(|i| (self.labels[i] != OUTSIDE).then(|| find(&mut parent, i)))
            .collect();
        Ok(Self::from_labels(&raw))
    }

    /// The partition of `ground ∩ event` whose blocks are the nonempty
    /// intersections of blocks with the event.
    pub fn restrict(&self, event: &Event) -> Result<Partition> {
        if event.n() != self.n() {
            return Err(Error::SpaceMismatch { expected: self.n(), actual: event.n() });
        }
        let mask = event.mask();
        let raw: Vec<Option<u16>> = self
            .labels
            .iter()
            .zip(&mask)
            .map(|(&l, &inside)| (inside && l != OUTSIDE).then_some(l))
            .collect();
        if raw.iter().all(Option::is_none) {
            return Err(Error::EmptyEvent);
        }
        Ok(Self::from_labels(&raw))
    }

    /// Merges blocks `a` and `b` (canonical indices).
    pub fn merge_blocks(&self, a: usize, b: usize) -> Partition {
        let (a, b) = (a as u16, b as u16);
        let raw: Vec<Option<u16>> = self
            .labels
            .iter()
            .map(|&l| match l {
                OUTSIDE => None,
                l if l == b => Some(a),
                l => Some(l),
            })
            .collect();
        Self::from_labels(&raw)
    }

    /// Algebra of all unions of blocks, including the empty set.
    pub fn sigma(&self) -> SigmaAlgebra {
        let blocks = self.blocks();
        let k = blocks.len();
        assert!(k < usize::BITS as usize, "too many blocks to list the generated algebra");
        let mut events: Vec<Vec<usize>> = (0..(1usize << k))
            .map(|mask| {
                let mut members: Vec<usize> = (0..k)
                    .filter(|b| mask & (1 << b) != 0)
                    .flat_map(|b| blocks[b].iter().copied())
                    .collect();
                members.sort_unstable();
                members
            })
            .collect();
        events.sort();
        SigmaAlgebra { generated_by: self.clone(), events }
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let blocks: Vec<String> = self
            .blocks()
            .iter()
            .map(|b| format!("[{}]", b.iter().map(|i| i.to_string()).collect::<Vec<_>>().join(",")))
            .collect();
        write!(f, "[{}]", blocks.join(","))
    }
}

impl Serialize for Partition {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.blocks().serialize(s)
    }
}

impl<'de> Deserialize<'de> for Partition {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let blocks = Vec::<Vec<usize>>::deserialize(d)?;
        let n = blocks.iter().flatten().max().map(|m| m + 1).unwrap_or(0);
        Partition::from_blocks(n, &blocks).map_err(serde::de::Error::custom)
    }
}

impl std::str::FromStr for Partition {
    type Err = Error;

    /// Parses the serialized form, e.g. `[[0],[1,2]]`.
    fn from_str(s: &str) -> Result<Self> {
        let inner = s.trim();
        let inner = inner
            .strip_prefix('[')
            .and_then(|r| r.strip_suffix(']'))
            .ok_or_else(|| Error::Parse(format!("partition must look like [[0],[1,2]]: {s:?}")))?;
        let mut blocks = Vec::new();
        let mut rest = inner.trim();
        while !rest.is_empty() {
            let body = rest
                .strip_prefix('[')
                .ok_or_else(|| Error::Parse(format!("malformed partition {s:?}")))?;
            let close = body.find(']').ok_or_else(|| Error::Parse(format!("malformed partition {s:?}")))?;
            let block: std::result::Result<Vec<usize>, _> = body[..close]
                .split(',')
                .filter(|t| !t.trim().is_empty())
                .map(|t| t.trim().parse::<usize>())
                .collect();
            blocks.push(block.map_err(|e| Error::Parse(format!("{e} in {s:?}")))?);
            rest = body[close + 1..].trim_start().trim_start_matches(',').trim_start();
        }
        let n = blocks.iter().flatten().max().map(|m| m + 1).unwrap_or(0);
        Partition::from_blocks(n, &blocks)
    }
}

/// The event algebra generated by a partition.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SigmaAlgebra {
    generated_by: Partition,
    events: Vec<Vec<usize>>,
}

impl SigmaAlgebra {
    pub fn generated_by(&self) -> &Partition {
        &self.generated_by
    }

    /// All member events, sorted; the empty set comes first.
    pub fn events(&self) -> &[Vec<usize>] {
        &self.events
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    pub fn contains(&self, members: &[usize]) -> bool {
        let mut sorted = members.to_vec();
        sorted.sort_unstable();
        sorted.dedup();
        self.events.binary_search(&sorted).is_ok()
    }

    /// Minimal nonempty members: the blocks of the generating partition.
    pub fn atoms(&self) -> Vec<Vec<usize>> {
        self.generated_by.blocks()
    }

    /// σ(self) ⊆ σ(other).
    pub fn is_subalgebra_of(&self, other: &SigmaAlgebra) -> bool {
        self.events.iter().all(|e| other.events.binary_search(e).is_ok())
    }

    /// Checks closure under complement (within the ground set) and union.
    pub fn is_closed(&self) -> bool {
        let ground: Vec<usize> = self.generated_by.ground().members().to_vec();
        for e in &self.events {
            let comp: Vec<usize> = ground.iter().copied().filter(|i| e.binary_search(i).is_err()).collect();
            if !self.contains(&comp) {
                return false;
            }
            for f in &self.events {
                let mut u: Vec<usize> = e.iter().chain(f.iter()).copied().collect();
                u.sort_unstable();
                u.dedup();
                if !self.contains(&u) {
                    return false;
                }
            }
        }
        true
    }
}

/// Iterates the set partitions of a ground set in lexicographic order of their
/// restricted-growth strings.
#[derive(Clone, Debug)]
pub struct PartitionIter {
    n: usize,
    ground: Vec<usize>,
    rgs: Vec<u16>,
    /// running maxima: `maxes[i] = max(rgs[..=i])`
    maxes: Vec<u16>,
    fixed: usize,
    done: bool,
}

impl PartitionIter {
    /// All partitions of `ground`.
    pub fn new(ground: &Event) -> Self {
        Self::with_prefix(ground, &[]).expect("empty prefix is always valid")
    }

    /// Partitions of `ground` whose restricted-growth string starts with
    /// `prefix`; disjoint prefixes split the enumeration across workers.
    pub fn with_prefix(ground: &Event, prefix: &[u16]) -> Result<Self> {
        let k = ground.len();
        if prefix.len() > k {
            return Err(Error::InvalidPartition("prefix longer than ground set".into()));
        }
        let mut rgs = vec![0u16; k];
        let mut maxes = vec![0u16; k];
        let mut running: Option<u16> = None;
        for (i, &v) in prefix.iter().enumerate() {
            let limit = running.map_or(0, |m| m + 1);
            if v > limit {
                return Err(Error::InvalidPartition(format!("prefix {prefix:?} is not a restricted-growth string")));
            }
            rgs[i] = v;
            running = Some(running.map_or(v, |m| m.max(v)));
            maxes[i] = running.unwrap();
        }
        let start_max = running.unwrap_or(0);
        for slot in maxes.iter_mut().skip(prefix.len()) {
            *slot = start_max;
        }
        Ok(PartitionIter {
            n: ground.n(),
            ground: ground.members().to_vec(),
            rgs,
            maxes,
            fixed: prefix.len().max(1),
            done: false,
        })
    }

    fn current(&self) -> Partition {
        let mut labels = vec![OUTSIDE; self.n];
        for (&state, &l) in self.ground.iter().zip(&self.rgs) {
            labels[state] = l;
        }
        Partition { labels }
    }

    fn advance(&mut self) -> bool {
        let k = self.rgs.len();
        let mut i = k;
        while i > self.fixed {
            i -= 1;
            if self.rgs[i] <= self.maxes[i - 1] {
                self.rgs[i] += 1;
                self.maxes[i] = self.maxes[i - 1].max(self.rgs[i]);
                for j in i + 1..k {
                    self.rgs[j] = 0;
                    self.maxes[j] = self.maxes[i];
                }
                return true;
            }
        }
        false
    }
}

impl Iterator for PartitionIter {
    type Item = Partition;

    fn next(&mut self) -> Option<Partition> {
        if self.done {
            return None;
        }
        let out = self.current();
        if !self.advance() {
            self.done = true;
        }
        Some(out)
    }
}

/// All partitions of the state space, canonically ordered.
pub fn enumerate_partitions(space: &StateSpace, cap: usize) -> Result<Vec<Partition>> {
    enumerate_partitions_of(&space.full_event(), cap)
}

/// All partitions of an event's states.
pub fn enumerate_partitions_of(ground: &Event, cap: usize) -> Result<Vec<Partition>> {
    if ground.len() > cap {
        return Err(Error::CapExceeded { n: ground.len(), cap });
    }
    Ok(PartitionIter::new(ground).collect())
}
