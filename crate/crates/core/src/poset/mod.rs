//! Partial orders over a small labeled ground set.
//!
//! A [`Poset`] is a reflexive, antisymmetric and transitive [`Relation`]
//! stored as a bit matrix. The item labels live in an [`ItemUniverse`] that is
//! shared by every poset of a sample, so posets themselves are `Copy` and
//! cheap to compare, hash and intersect.

mod enumerate;
mod extensions;
pub mod io;
mod relation;

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use enumerate::{count_posets, enumerate_posets, DEFAULT_ENUM_LIMIT};
pub use extensions::{
    critical_pairs, linear_extensions, linear_extensions_bounded, order_dimension, Dimension,
    DEFAULT_EXTENSION_BUDGET,
};
pub use relation::{Edge, Relation, MAX_ITEMS};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PosetError {
    #[error("relation is not reflexive at ({0}, {0})")]
    NotReflexive(usize),
    #[error("relation is not antisymmetric at ({0}, {1})")]
    NotAntisymmetric(usize, usize),
    #[error("relation is not transitive: ({0}, {1}) is missing")]
    NotTransitive(usize, usize),
    #[error("transitive hull contains a cycle through ({0}, {1})")]
    CycleDetected(usize, usize),
    #[error("universe of {m} items exceeds the enumeration limit {limit}")]
    UniverseTooLarge { m: usize, limit: usize },
    #[error("operation requires a nonempty set of posets")]
    EmptyInput,
    #[error("poset is not a member of the given set")]
    MemberNotInSet,
    #[error("search budget of {0} exceeded")]
    SearchBudgetExceeded(usize),
    #[error("posets are defined over different universes")]
    UniverseMismatch,
    #[error("bad relation shape: {0}")]
    BadShape(String),
    #[error("invalid item universe: {0}")]
    BadUniverse(String),
    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("family was not enumerated from this sample")]
    FamilySampleMismatch,
    #[error("depth maps cover different sets of posets")]
    ScopeMismatch,
}

/// The labeled ground set `M`.
#[derive(Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<String>", into = "Vec<String>")]
pub struct ItemUniverse {
    labels: Vec<String>,
    #[serde(skip)]
    index: HashMap<String, usize>,
}

impl ItemUniverse {
    pub fn new<I, S>(labels: I) -> Result<Self, PosetError>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        if labels.is_empty() {
            return Err(PosetError::BadUniverse("no items".into()));
        }
        if labels.len() > MAX_ITEMS {
            return Err(PosetError::BadUniverse(format!(
                "{} items, at most {MAX_ITEMS} supported",
                labels.len()
            )));
        }
        let mut index = HashMap::with_capacity(labels.len());
        for (i, l) in labels.iter().enumerate() {
            if l.is_empty() || l.contains(|c: char| c.is_whitespace() || c == ',' || c == '<') {
                return Err(PosetError::BadUniverse(format!("invalid label {l:?}")));
            }
            if index.insert(l.clone(), i).is_some() {
                return Err(PosetError::BadUniverse(format!("duplicate label {l:?}")));
            }
        }
        Ok(ItemUniverse { labels, index })
    }

    /// Items named `y1, ..., ym`.
    pub fn numbered(m: usize) -> Self {
        ItemUniverse::new((1..=m).map(|i| format!("y{i}"))).expect("numbered labels are valid")
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, i: usize) -> &str {
        &self.labels[i]
    }

    pub fn index(&self, label: &str) -> Option<usize> {
        self.index.get(label).copied()
    }

    pub fn edge_label(&self, (a, b): Edge) -> String {
        format!("{}<{}", self.labels[a], self.labels[b])
    }
}

impl TryFrom<Vec<String>> for ItemUniverse {
    type Error = PosetError;
    fn try_from(v: Vec<String>) -> Result<Self, Self::Error> {
        ItemUniverse::new(v)
    }
}

impl From<ItemUniverse> for Vec<String> {
    fn from(u: ItemUniverse) -> Self {
        u.labels
    }
}

impl fmt::Debug for ItemUniverse {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(&self.labels).finish()
    }
}

pub type SharedUniverse = Arc<ItemUniverse>;

/// A partial order stored as its full (reflexive, transitively closed) relation.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Poset(Relation);

impl Poset {
    /// Accepts `r` unchanged if it satisfies the three poset axioms.
    pub fn validate(r: Relation) -> Result<Poset, PosetError> {
        validate_poset(r)
    }

    /// The trivial order `p_Δ`.
    pub fn trivial(m: usize) -> Poset {
        Poset(Relation::identity(m))
    }

    /// The chain given by `order`, first element lowest.
    pub fn chain(order: &[usize]) -> Poset {
        let m = order.len();
        let mut r = Relation::identity(m);
        for (i, &a) in order.iter().enumerate() {
            for &b in &order[i + 1..] {
                r.insert(a, b);
            }
        }
        Poset(r)
    }

    /// Transitive hull of a generating edge set; panics on cycles.
    ///
    /// Convenience for fixtures; use [`transitive_hull`] for fallible input.
    pub fn from_edges<I: IntoIterator<Item = Edge>>(m: usize, edges: I) -> Poset {
        transitive_hull(&Relation::from_edges(m, edges)).expect("edges must be acyclic")
    }

    pub(crate) fn from_relation_unchecked(r: Relation) -> Poset {
        debug_assert!(r.is_reflexive() && r.is_antisymmetric() && r.is_transitive());
        Poset(r)
    }

    #[inline]
    pub fn relation(&self) -> &Relation {
        &self.0
    }

    #[inline]
    pub fn size(&self) -> usize {
        self.0.size()
    }

    #[inline]
    pub fn contains(&self, a: usize, b: usize) -> bool {
        self.0.contains(a, b)
    }

    /// Off-diagonal pairs in row-major order.
    pub fn edges(&self) -> impl Iterator<Item = Edge> + '_ {
        self.0.edges()
    }

    pub fn edge_count(&self) -> usize {
        self.0.count() - self.size()
    }

    pub fn is_total(&self) -> bool {
        let m = self.size();
        self.edge_count() == m * (m - 1) / 2
    }

    pub fn is_subset(&self, other: &Poset) -> bool {
        self.0.is_subset(&other.0)
    }

    /// Intersection of two posets; always a poset.
    pub fn meet(&self, other: &Poset) -> Poset {
        Poset(self.0.intersection(&other.0))
    }

    pub fn reduction(&self) -> Relation {
        transitive_reduction(self)
    }

    /// Relabels items by `perm`; item `i` becomes `perm[i]`.
    pub fn permute(&self, perm: &[usize]) -> Poset {
        Poset(self.0.permute(perm))
    }

    /// The dual order.
    pub fn dual(&self) -> Poset {
        Poset(self.0.transpose())
    }

    /// Hasse layer of every item: minimal elements are layer 0.
    pub fn layers(&self) -> Vec<usize> {
        let m = self.size();
        let mut layer = vec![0usize; m];
        // Items sorted by number of strict predecessors form a topological order.
        let mut order: Vec<usize> = (0..m).collect();
        let below = |x: usize| (0..m).filter(|&y| y != x && self.contains(y, x)).count();
        order.sort_by_key(|&x| below(x));
        for &x in &order {
            for y in 0..m {
                if y != x && self.contains(y, x) {
                    layer[x] = layer[x].max(layer[y] + 1);
                }
            }
        }
        layer
    }
}

impl fmt::Debug for Poset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Poset{:?}", transitive_reduction(self))
    }
}

/// Checks the poset axioms, naming the first violating pair in row-major order.
pub fn validate_poset(r: Relation) -> Result<Poset, PosetError> {
    if r.size() == 0 {
        return Err(PosetError::BadShape("empty universe".into()));
    }
    if let Some(i) = (0..r.size()).find(|&i| !r.contains(i, i)) {
        return Err(PosetError::NotReflexive(i));
    }
    if let Some((a, b)) = r.first_symmetric_pair() {
        return Err(PosetError::NotAntisymmetric(a, b));
    }
    if let Some((a, c)) = r.first_transitivity_gap() {
        return Err(PosetError::NotTransitive(a, c));
    }
    Ok(Poset(r))
}

/// Reflexive-transitive hull `th(r)`; fails when the hull is not antisymmetric.
pub fn transitive_hull(r: &Relation) -> Result<Poset, PosetError> {
    let closed = r.with_diagonal().transitive_closure();
    match closed.first_symmetric_pair() {
        Some((a, b)) => Err(PosetError::CycleDetected(a, b)),
        None => Ok(Poset(closed)),
    }
}

/// Transitive reduction `tr(p)` without diagonal entries (the Hasse edges).
pub fn transitive_reduction(p: &Poset) -> Relation {
    let strict = p.0.without_diagonal();
    let m = p.size();
    let mut out = Relation::empty(m);
    for a in 0..m {
        let row = strict.row(a);
        let mut covered = 0u16;
        let mut bits = row;
        while bits != 0 {
            let c = bits.trailing_zeros() as usize;
            bits &= bits - 1;
            covered |= strict.row(c);
        }
        let mut keep = row & !covered;
        while keep != 0 {
            let b = keep.trailing_zeros() as usize;
            keep &= keep - 1;
            out.insert(a, b);
        }
    }
    out
}

/// A canonically ordered set of distinct posets over one universe.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct PosetSet {
    members: Vec<Poset>,
}

impl PosetSet {
    pub fn new<I: IntoIterator<Item = Poset>>(posets: I) -> Result<Self, PosetError> {
        let mut members: Vec<Poset> = posets.into_iter().collect();
        if let Some(first) = members.first() {
            let m = first.size();
            if members.iter().any(|p| p.size() != m) {
                return Err(PosetError::UniverseMismatch);
            }
        }
        members.sort_unstable();
        members.dedup();
        Ok(PosetSet { members })
    }

    pub fn empty() -> Self {
        PosetSet::default()
    }

    pub fn members(&self) -> &[Poset] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, p: &Poset) -> bool {
        self.members.binary_search(p).is_ok()
    }

    pub fn is_subset(&self, other: &PosetSet) -> bool {
        self.members.iter().all(|p| other.contains(p))
    }

    pub fn without(&self, p: &Poset) -> PosetSet {
        PosetSet {
            members: self.members.iter().filter(|q| *q != p).copied().collect(),
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = &Poset> {
        self.members.iter()
    }

    /// `⋂P`, or `None` for the empty set.
    pub fn intersection(&self) -> Option<Poset> {
        let mut it = self.members.iter();
        let first = *it.next()?;
        Some(it.fold(first, |acc, p| acc.meet(p)))
    }

    /// `⋃P` as a relation, or `None` for the empty set.
    pub fn union(&self) -> Option<Relation> {
        let mut it = self.members.iter();
        let first = *it.next()?.relation();
        Some(it.fold(first, |acc, p| acc.union(p.relation())))
    }
}

impl<'a> IntoIterator for &'a PosetSet {
    type Item = &'a Poset;
    type IntoIter = std::slice::Iter<'a, Poset>;
    fn into_iter(self) -> Self::IntoIter {
        self.members.iter()
    }
}

/// `p ∈ γ(P)`, i.e. `⋂P ⊆ p ⊆ ⋃P`.
pub fn closure_membership(p: &Poset, set: &PosetSet) -> Result<bool, PosetError> {
    let (Some(meet), Some(join)) = (set.intersection(), set.union()) else {
        return Err(PosetError::EmptyInput);
    };
    if meet.size() != p.size() {
        return Err(PosetError::UniverseMismatch);
    }
    Ok(meet.is_subset(p) && p.relation().is_subset(&join))
}

/// Materializes `γ(P)` over all posets on the universe. `γ(∅) = ∅`.
pub fn closure(set: &PosetSet, limit: usize) -> Result<PosetSet, PosetError> {
    let (Some(meet), Some(join)) = (set.intersection(), set.union()) else {
        return Ok(PosetSet::empty());
    };
    let all = enumerate_posets(meet.size(), limit)?;
    Ok(PosetSet {
        members: all
            .into_iter()
            .filter(|q| meet.is_subset(q) && q.relation().is_subset(&join))
            .collect(),
    })
}
