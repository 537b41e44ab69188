//! Exact maximum- and minimum-depth posets by branch and bound.
//!
//! The search assigns the off-diagonal pairs one at a time. The relation of
//! pairs set to one is kept transitively closed, so every node already holds
//! a valid poset, and a leaf is reached when every pair is decided.

mod lp;

use std::ops::AddAssign;
use std::time::{Duration, Instant};

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::Zero;
use serde::Serialize;
use thiserror::Error;

use crate::depth::{depth_map, DepthScope, FamilyIndex, WeightsView};
use crate::poset::{Edge, Poset, PosetError, Relation};
use crate::ufg::{PosetSample, UfgFamily};

pub use lp::write_lp;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Max,
    Min,
}

#[derive(Debug, Clone, Copy)]
pub struct ExtremalOptions {
    pub direction: Direction,
    /// Number of distinct posets to rank.
    pub k: usize,
    pub timeout: Option<Duration>,
}

impl Default for ExtremalOptions {
    fn default() -> Self {
        ExtremalOptions {
            direction: Direction::Max,
            k: 1,
            timeout: Some(Duration::from_secs(600)),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RankedPoset {
    pub poset: Poset,
    pub depth: BigRational,
    /// Family set ids whose closure contains the poset.
    pub proof: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExtremalSolution {
    pub direction: Direction,
    /// Best first; ties in canonical order.
    pub ranked: Vec<RankedPoset>,
    pub nodes: u64,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ExtremalError {
    #[error("search timed out; incumbent is within {gap} of the optimum")]
    Timeout {
        incumbent: ExtremalSolution,
        gap: BigRational,
    },
    #[error(transparent)]
    Poset(#[from] PosetError),
}

trait Weight: Clone + Ord + Zero + for<'a> AddAssign<&'a Self> {
    fn to_big(&self) -> BigUint;
}

impl Weight for u128 {
    fn to_big(&self) -> BigUint {
        BigUint::from(*self)
    }
}

impl Weight for BigUint {
    fn to_big(&self) -> BigUint {
        self.clone()
    }
}

/// `⋂S` and `⋃S` for every family set.
struct Tables {
    m: usize,
    meets: Vec<Relation>,
    joins: Vec<Relation>,
}

impl Tables {
    fn new(index: &FamilyIndex, m: usize) -> Self {
        Tables {
            m,
            meets: (0..index.len()).map(|s| *index.meet(s)).collect(),
            joins: (0..index.len()).map(|s| *index.join(s)).collect(),
        }
    }

    /// Whether some poset `P ⊇ inside`, disjoint from `outside`, lies in `γ(S)`.
    fn reachable(&self, s: usize, inside: &Relation, outside: &Relation) -> bool {
        let (meet, join) = (&self.meets[s], &self.joins[s]);
        if !inside.is_subset(join) || !meet.is_disjoint(outside) {
            return false;
        }
        if meet.is_subset(inside) {
            return true;
        }
        let c = inside.union(meet).transitive_closure();
        c.is_antisymmetric() && c.is_disjoint(outside) && c.is_subset(join)
    }

    /// Whether every completion of the node lies in `γ(S)`.
    fn forced(&self, s: usize, inside: &Relation, outside: &Relation) -> bool {
        let outside_join = Relation::off_diagonal(self.m).difference(&self.joins[s]);
        self.meets[s].is_subset(inside) && outside_join.is_subset(outside)
    }
}

fn sum<W: Weight>(weights: &[W], sets: impl Iterator<Item = usize>) -> W {
    let mut acc = W::zero();
    for s in sets {
        acc += &weights[s];
    }
    acc
}

fn bound<W: Weight>(
    t: &Tables,
    weights: &[W],
    dir: Direction,
    alive: &[usize],
    inside: &Relation,
    outside: &Relation,
) -> W {
    match dir {
        Direction::Max => sum(weights, alive.iter().copied()),
        Direction::Min => sum(
            weights,
            alive
                .iter()
                .copied()
                .filter(|&s| t.forced(s, inside, outside)),
        ),
    }
}

struct Search<'a, W> {
    t: Tables,
    weights: &'a [W],
    dir: Direction,
    k: usize,
    order: Vec<Edge>,
    /// Sorted best first.
    pool: Vec<(W, Poset)>,
    nodes: u64,
    deadline: Option<Instant>,
    timed_out: bool,
}

impl<W: Weight> Search<'_, W> {
    fn better(&self, a: &(W, Poset), b: &(W, Poset)) -> bool {
        let by_value = match self.dir {
            Direction::Max => b.0.cmp(&a.0),
            Direction::Min => a.0.cmp(&b.0),
        };
        by_value.then_with(|| a.1.cmp(&b.1)).is_lt()
    }

    fn offer(&mut self, value: W, p: Poset) {
        let cand = (value, p);
        if self.pool.len() == self.k && !self.better(&cand, self.pool.last().unwrap()) {
            return;
        }
        let pos = self
            .pool
            .iter()
            .position(|x| self.better(&cand, x))
            .unwrap_or(self.pool.len());
        self.pool.insert(pos, cand);
        self.pool.truncate(self.k);
    }

    /// No completion under `bound` can enter the pool.
    fn prunable(&self, bound: &W) -> bool {
        let Some((kth, _)) = self.pool.last().filter(|_| self.pool.len() == self.k) else {
            return false;
        };
        match self.dir {
            Direction::Max => bound <= kth,
            Direction::Min => bound >= kth,
        }
    }

    fn child(&self, alive: &[usize], inside: &Relation, outside: &Relation) -> (Vec<usize>, W) {
        let next: Vec<usize> = alive
            .iter()
            .copied()
            .filter(|&s| self.t.reachable(s, inside, outside))
            .collect();
        let bound = bound(&self.t, self.weights, self.dir, &next, inside, outside);
        (next, bound)
    }

    fn run(
        &mut self,
        alive: Vec<usize>,
        inside: Relation,
        outside: Relation,
        bound: W,
        depth: usize,
    ) {
        self.nodes += 1;
        if self.nodes % 256 == 1 && self.deadline.is_some_and(|d| Instant::now() >= d) {
            self.timed_out = true;
        }
        if self.timed_out || self.prunable(&bound) {
            return;
        }
        let Some(pos) = (depth..self.order.len()).find(|&i| {
            let (a, b) = self.order[i];
            !inside.contains(a, b) && !outside.contains(a, b)
        }) else {
            // Leaf: every surviving set covers `inside` exactly.
            let value = sum(self.weights, alive.iter().copied());
            self.offer(value, Poset::from_relation_unchecked(inside));
            return;
        };
        let (a, b) = self.order[pos];
        let out_branch = {
            let mut o = outside;
            o.insert(a, b);
            let (next, bd) = self.child(&alive, &inside, &o);
            (next, inside, o, bd)
        };
        let mut added = inside;
        added.insert(a, b);
        let added = added.transitive_closure();
        let in_branch = (added.is_antisymmetric() && added.is_disjoint(&outside)).then(|| {
            let (next, bd) = self.child(&alive, &added, &outside);
            (next, added, outside, bd)
        });
        let mut branches = vec![out_branch];
        if let Some(b) = in_branch {
            let in_first = match self.dir {
                Direction::Max => b.3 >= branches[0].3,
                Direction::Min => b.3 <= branches[0].3,
            };
            if in_first {
                branches.insert(0, b);
            } else {
                branches.push(b);
            }
        }
        for (next, i, o, bd) in branches {
            self.run(next, i, o, bd, pos + 1);
        }
    }
}

/// Off-diagonal pairs ordered by the family weight they constrain, heaviest first.
fn branch_order<W: Weight>(t: &Tables, weights: &[W]) -> Vec<Edge> {
    let mut pairs: Vec<(W, Edge)> = Relation::off_diagonal(t.m)
        .pairs()
        .map(|(a, b)| {
            let touching = (0..t.meets.len())
                .filter(|&s| t.meets[s].contains(a, b) || !t.joins[s].contains(a, b));
            (sum(weights, touching), (a, b))
        })
        .collect();
    pairs.sort_by(|x, y| y.0.cmp(&x.0).then(x.1.cmp(&y.1)));
    pairs.into_iter().map(|(_, e)| e).collect()
}

fn solve_with<W: Weight>(
    index: &FamilyIndex,
    m: usize,
    weights: &[W],
    total: &BigUint,
    opts: &ExtremalOptions,
) -> Result<ExtremalSolution, ExtremalError> {
    let t = Tables::new(index, m);
    let order = branch_order(&t, weights);
    let root_in = Relation::identity(m);
    let root_out = Relation::empty(m);
    let alive: Vec<usize> = (0..t.meets.len()).collect();
    let root_bound = bound(&t, weights, opts.direction, &alive, &root_in, &root_out);
    let mut search = Search {
        t,
        weights,
        dir: opts.direction,
        k: opts.k.max(1),
        order,
        pool: Vec::new(),
        nodes: 0,
        deadline: opts.timeout.map(|d| Instant::now() + d),
        timed_out: false,
    };
    search.run(alive, root_in, root_out, root_bound.clone(), 0);
    let ratio = |w: &BigUint| {
        if total.is_zero() {
            BigRational::zero()
        } else {
            BigRational::new(BigInt::from(w.clone()), BigInt::from(total.clone()))
        }
    };
    let ranked = search
        .pool
        .iter()
        .map(|(w, p)| RankedPoset {
            poset: *p,
            depth: ratio(&w.to_big()),
            proof: index.containing_sets(p),
        })
        .collect::<Vec<_>>();
    let solution = ExtremalSolution {
        direction: opts.direction,
        ranked,
        nodes: search.nodes,
    };
    if search.timed_out {
        let best = search
            .pool
            .first()
            .map(|(w, _)| w.to_big())
            .unwrap_or_default();
        let root = root_bound.to_big();
        let gap = match opts.direction {
            Direction::Max => ratio(&root) - ratio(&best),
            Direction::Min => ratio(&best) - ratio(&root),
        };
        return Err(ExtremalError::Timeout {
            incumbent: solution,
            gap,
        });
    }
    Ok(solution)
}

/// Exact optimum (and the `k` best) over every poset on the universe.
pub fn solve_extremal(
    sample: &PosetSample,
    family: &UfgFamily,
    opts: &ExtremalOptions,
) -> Result<ExtremalSolution, ExtremalError> {
    let index = FamilyIndex::new(sample, family)?;
    match index.weights_view() {
        WeightsView::Small(each, total) => {
            solve_with(&index, sample.m(), each, &BigUint::from(total), opts)
        }
        WeightsView::Big(each, total) => solve_with(&index, sample.m(), each, total, opts),
    }
}

/// The `k` best posets; same as [`solve_extremal`] with `opts.k = k`.
pub fn k_best(
    sample: &PosetSample,
    family: &UfgFamily,
    direction: Direction,
    k: usize,
    timeout: Option<Duration>,
) -> Result<ExtremalSolution, ExtremalError> {
    solve_extremal(
        sample,
        family,
        &ExtremalOptions {
            direction,
            k,
            timeout,
        },
    )
}

/// Upper (max) or lower (min) bound on the depth of any poset containing
/// `inside` and avoiding `outside`; exposed for soundness tests.
pub fn node_bound(
    sample: &PosetSample,
    family: &UfgFamily,
    direction: Direction,
    inside: &Poset,
    outside: &Relation,
) -> Result<BigRational, PosetError> {
    let index = FamilyIndex::new(sample, family)?;
    let t = Tables::new(&index, sample.m());
    let inside = inside.relation();
    let sets: Vec<usize> = (0..index.len())
        .filter(|&s| t.reachable(s, inside, outside))
        .filter(|&s| direction == Direction::Max || t.forced(s, inside, outside))
        .collect();
    Ok(index.depth_of_sets(&sets))
}

/// Recomputes every reported depth and proof, checks the ranking order, and
/// when `m ≤ enum_limit` compares against the exhaustive ranking.
pub fn verify_solution(
    sol: &ExtremalSolution,
    sample: &PosetSample,
    family: &UfgFamily,
    enum_limit: usize,
) -> bool {
    let Ok(index) = FamilyIndex::new(sample, family) else {
        return false;
    };
    for r in &sol.ranked {
        let proof = index.containing_sets(&r.poset);
        if proof != r.proof || index.depth_of_sets(&proof) != r.depth {
            return false;
        }
    }
    let ordered = sol.ranked.windows(2).all(|w| match sol.direction {
        Direction::Max => w[0].depth >= w[1].depth,
        Direction::Min => w[0].depth <= w[1].depth,
    });
    let mut distinct: Vec<Poset> = sol.ranked.iter().map(|r| r.poset).collect();
    distinct.sort_unstable();
    distinct.dedup();
    if !ordered || distinct.len() != sol.ranked.len() {
        return false;
    }
    if sample.m() > enum_limit {
        return true;
    }
    let Ok(map) = depth_map(sample, family, DepthScope::AllPosets { limit: enum_limit }) else {
        return false;
    };
    let mut values: Vec<&BigRational> = map.entries.iter().map(|(_, d)| d).collect();
    if sol.direction == Direction::Min {
        values.reverse();
    }
    !sol.ranked.is_empty() && sol.ranked.iter().zip(&values).all(|(r, v)| &r.depth == *v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poset::ItemUniverse;
    use crate::ufg::enumerate_ufg_family;

    fn second_sample() -> PosetSample {
        let t1 = Poset::from_edges(3, [(0, 1)]);
        let t2 = Poset::from_edges(3, [(0, 2)]);
        let t3 = Poset::from_edges(3, [(0, 1), (1, 2)]);
        PosetSample::from_observations(ItemUniverse::numbered(3), [t1, t2, t3]).unwrap()
    }

    #[test]
    fn max_on_second_sample() {
        let s = second_sample();
        let f = enumerate_ufg_family(&s);
        let sol = solve_extremal(&s, &f, &ExtremalOptions::default()).unwrap();
        assert_eq!(sol.ranked[0].poset, Poset::from_edges(3, [(0, 1), (0, 2)]));
        assert_eq!(sol.ranked[0].depth, BigRational::from_integer(1.into()));
        assert_eq!(sol.ranked[0].proof.len(), 4);
        assert!(verify_solution(&sol, &s, &f, 6));
    }

    #[test]
    fn tampering_is_detected() {
        let s = second_sample();
        let f = enumerate_ufg_family(&s);
        let mut sol = k_best(&s, &f, Direction::Max, 3, None).unwrap();
        assert!(verify_solution(&sol, &s, &f, 6));
        let mut bad = sol.clone();
        bad.ranked[1].depth = BigRational::from_integer(1.into());
        assert!(!verify_solution(&bad, &s, &f, 6));
        sol.ranked[0].proof.pop();
        assert!(!verify_solution(&sol, &s, &f, 6));
    }

    #[test]
    fn zero_timeout_reports_gap() {
        let s = second_sample();
        let f = enumerate_ufg_family(&s);
        let opts = ExtremalOptions {
            direction: Direction::Max,
            k: 19,
            timeout: Some(Duration::ZERO),
        };
        match solve_extremal(&s, &f, &opts) {
            Err(ExtremalError::Timeout { gap, incumbent }) => {
                assert!(gap >= BigRational::zero());
                assert!(incumbent.ranked.is_empty());
            }
            other => panic!("{other:?}"),
        }
    }
}
