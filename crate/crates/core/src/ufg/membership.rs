//! Deciding whether a set of posets is union-free and generic.
//!
//! A set `S` belongs to the family iff some poset `q ∈ γ(S) \ S` escapes
//! `γ(S \ {p})` for every `p ∈ S` (a *ufg element*).

use crate::poset::{enumerate_posets, Edge, Poset, PosetError, PosetSet, Relation};

/// Edges that single out one member of a set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DistinguishingSets {
    /// Edges of `p` that no other member has.
    pub with_edges: Relation,
    /// Non-edges of `p` that every other member has.
    pub without_edges: Relation,
}

/// A ufg element together with the edges chosen to build it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UfgWitness {
    pub witness: Poset,
    /// `(member, edge)` for each distinguishing edge added to the witness.
    pub chosen_edges: Vec<(Poset, Edge)>,
}

/// Per-member distinguishing sets plus `⋂S` and `⋃S`.
pub(crate) struct SetProfile {
    pub meet: Relation,
    pub join: Relation,
    pub with_edges: Vec<Relation>,
    pub without_edges: Vec<Relation>,
}

impl SetProfile {
    pub fn new(members: &[Poset]) -> Self {
        let k = members.len();
        let m = members[0].size();
        let diag = Relation::identity(m);
        let full = Relation::full(m);
        let empty = Relation::empty(m);
        // prefix[i] covers members[..i], suffix[i] covers members[i..].
        let mut pre_meet = vec![full; k + 1];
        let mut pre_join = vec![empty; k + 1];
        for (i, p) in members.iter().enumerate() {
            pre_meet[i + 1] = pre_meet[i].intersection(p.relation());
            pre_join[i + 1] = pre_join[i].union(p.relation());
        }
        let mut suf_meet = vec![full; k + 1];
        let mut suf_join = vec![empty; k + 1];
        for i in (0..k).rev() {
            suf_meet[i] = suf_meet[i + 1].intersection(members[i].relation());
            suf_join[i] = suf_join[i + 1].union(members[i].relation());
        }
        let mut with_edges = Vec::with_capacity(k);
        let mut without_edges = Vec::with_capacity(k);
        for (i, p) in members.iter().enumerate() {
            let others_meet = pre_meet[i].intersection(&suf_meet[i + 1]);
            let others_join = pre_join[i].union(&suf_join[i + 1]);
            let rel = p.relation();
            with_edges.push(rel.difference(&others_join).difference(&diag));
            without_edges.push(others_meet.difference(rel).difference(&diag));
        }
        SetProfile {
            meet: pre_meet[k],
            join: pre_join[k],
            with_edges,
            without_edges,
        }
    }
}

/// Distinguishing edge and non-edge sets of `p` within `set`.
pub fn distinguishing_sets(set: &PosetSet, p: &Poset) -> Result<DistinguishingSets, PosetError> {
    let members = set.members();
    let idx = members
        .iter()
        .position(|q| q == p)
        .ok_or(PosetError::MemberNotInSet)?;
    let profile = SetProfile::new(members);
    Ok(DistinguishingSets {
        with_edges: profile.with_edges[idx],
        without_edges: profile.without_edges[idx],
    })
}

/// Adds `(a, b)` to the transitively closed `q`; `None` if that closes a cycle.
#[inline]
fn add_edge_closed(q: &Relation, (a, b): Edge) -> Option<Relation> {
    if q.contains(b, a) {
        return None;
    }
    if q.contains(a, b) {
        return Some(*q);
    }
    let m = q.size();
    let mut out = *q;
    let above_b = q.row(b);
    for x in 0..m {
        if q.contains(x, a) {
            let mut bits = above_b;
            while bits != 0 {
                let y = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                out.insert(x, y);
            }
        }
    }
    Some(out)
}

/// Searches for a ufg element.
///
/// Each member must be escaped either by an edge from its `with_edges`
/// (added to the witness) or by a pair from its `without_edges` (kept out of
/// it). The search branches on those choices for one unresolved member at a
/// time, keeping the included part transitively closed inside `⋃S`. Any ufg
/// element contains the included part of some branch and avoids its excluded
/// part, so the search is complete; the included part itself is then a
/// witness.
pub(crate) fn find_witness(members: &[Poset]) -> Option<(Relation, Vec<(usize, Edge)>)> {
    if members.len() < 2 {
        return None;
    }
    let profile = SetProfile::new(members);
    if (0..members.len())
        .any(|i| profile.with_edges[i].is_empty() && profile.without_edges[i].is_empty())
    {
        return None;
    }
    let mut chosen = Vec::new();
    let outside = Relation::empty(members[0].size());
    descend(&profile, profile.meet, outside, &mut chosen).map(|q| (q, chosen))
}

enum Choice {
    Include(Edge, Relation),
    Exclude(Edge),
}

fn choices(profile: &SetProfile, i: usize, inside: &Relation, outside: &Relation) -> Vec<Choice> {
    let mut out = Vec::new();
    // Exclusions first: they leave the witness as small as possible.
    for (a, b) in profile.without_edges[i].pairs() {
        if !inside.contains(a, b) {
            out.push(Choice::Exclude((a, b)));
        }
    }
    for e in profile.with_edges[i].pairs() {
        let Some(next) = add_edge_closed(inside, e) else {
            continue;
        };
        if next.is_subset(&profile.join) && next.is_disjoint(outside) {
            out.push(Choice::Include(e, next));
        }
    }
    out
}

fn descend(
    profile: &SetProfile,
    inside: Relation,
    outside: Relation,
    chosen: &mut Vec<(usize, Edge)>,
) -> Option<Relation> {
    let mut best: Option<(usize, Vec<Choice>)> = None;
    for i in 0..profile.with_edges.len() {
        let escaped = !inside.is_disjoint(&profile.with_edges[i])
            || !outside.is_disjoint(&profile.without_edges[i]);
        if escaped {
            continue;
        }
        let options = choices(profile, i, &inside, &outside);
        if options.is_empty() {
            return None;
        }
        if best.as_ref().is_none_or(|(_, b)| options.len() < b.len()) {
            best = Some((i, options));
        }
    }
    let Some((i, options)) = best else {
        return Some(inside);
    };
    for choice in options {
        match choice {
            Choice::Exclude((a, b)) => {
                if let Some(q) = descend(profile, inside, outside.with(a, b), chosen) {
                    return Some(q);
                }
            }
            Choice::Include(e, next) => {
                chosen.push((i, e));
                if let Some(q) = descend(profile, next, outside, chosen) {
                    return Some(q);
                }
                chosen.pop();
            }
        }
    }
    None
}

/// Constructs a ufg element for `set`, or `None` if `set` is not union-free generic.
pub fn ufg_witness(set: &PosetSet) -> Option<UfgWitness> {
    let members = set.members();
    let (q, chosen) = find_witness(members)?;
    let witness = Poset::validate(q).expect("closure of a poset plus acyclic edges is a poset");
    debug_assert!(!set.contains(&witness));
    Some(UfgWitness {
        witness,
        chosen_edges: chosen.into_iter().map(|(i, e)| (members[i], e)).collect(),
    })
}

/// Pair test: `{a, b}` fails only when one contains the other and their
/// relations differ in exactly one pair (a covering pair).
pub(crate) fn is_ufg_pair(a: &Poset, b: &Poset) -> bool {
    if a == b {
        return false;
    }
    let (ra, rb) = (a.relation(), b.relation());
    let covering = |lo: &Relation, hi: &Relation| lo.is_subset(hi) && hi.count() == lo.count() + 1;
    !(covering(ra, rb) || covering(rb, ra))
}

/// Membership test on a slice of distinct posets.
pub(crate) fn is_ufg_members(members: &[Poset]) -> bool {
    match members.len() {
        0 | 1 => false,
        2 => is_ufg_pair(&members[0], &members[1]),
        _ => find_witness(members).is_some(),
    }
}

/// Whether `set` is union-free and generic.
pub fn is_ufg(set: &PosetSet) -> bool {
    is_ufg_members(set.members())
}

/// Ground-truth membership by materializing `γ` of `set` and of all its
/// proper subsets, then testing both defining conditions literally.
pub fn is_ufg_oracle(set: &PosetSet, limit: usize) -> Result<bool, PosetError> {
    let members = set.members();
    let Some(first) = members.first() else {
        // γ(∅) = ∅, so ∅ is not a proper subset of its closure.
        return Ok(false);
    };
    let all = enumerate_posets(first.size(), limit)?;
    let in_closure = |subset: &[Poset], q: &Poset| -> bool {
        if subset.is_empty() {
            return false;
        }
        let meet = subset.iter().skip(1).fold(*subset[0].relation(), |acc, p| {
            acc.intersection(p.relation())
        });
        let join = subset
            .iter()
            .skip(1)
            .fold(*subset[0].relation(), |acc, p| acc.union(p.relation()));
        meet.is_subset(q.relation()) && q.relation().is_subset(&join)
    };
    let gamma: Vec<&Poset> = all.iter().filter(|q| in_closure(members, q)).collect();

    // Every member lies in γ(S); the first condition asks for something more.
    let c1 = gamma.len() > members.len();

    // Any family of proper subsets covers at most what all proper subsets
    // together cover, so the second condition fails iff that union is γ(S).
    let k = members.len();
    let full_mask = (1u32 << k) - 1;
    let proper: Vec<Vec<Poset>> = (0..full_mask)
        .map(|mask| {
            (0..k)
                .filter(|i| mask >> i & 1 == 1)
                .map(|i| members[i])
                .collect()
        })
        .collect();
    let covered = gamma
        .iter()
        .all(|q| proper.iter().any(|a| in_closure(a, q)));
    let c2 = !covered;
    Ok(c1 && c2)
}
