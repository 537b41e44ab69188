use super::{Edge, Poset, PosetError, Relation};

/// Default cap on linear extensions materialized by [`order_dimension`].
pub const DEFAULT_EXTENSION_BUDGET: usize = 100_000;

/// Result of an order-dimension search.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Dimension {
    Exact(usize),
    /// The dimension exceeds the requested cap.
    AboveCap(usize),
}

/// All total orders extending `p`, in lexicographic order of their item sequences.
pub fn linear_extensions(p: &Poset) -> Vec<Poset> {
    linear_extensions_bounded(p, usize::MAX).expect("unbounded")
}

/// Like [`linear_extensions`] but fails once more than `budget` extensions exist.
pub fn linear_extensions_bounded(p: &Poset, budget: usize) -> Result<Vec<Poset>, PosetError> {
    let m = p.size();
    let pred: Vec<u16> = (0..m)
        .map(|x| {
            (0..m)
                .filter(|&y| y != x && p.contains(y, x))
                .fold(0u16, |acc, y| acc | 1 << y)
        })
        .collect();
    let mut out = Vec::new();
    let mut seq = Vec::with_capacity(m);
    walk(&pred, m, 0, &mut seq, &mut out, budget)?;
    Ok(out)
}

fn walk(
    pred: &[u16],
    m: usize,
    placed: u16,
    seq: &mut Vec<usize>,
    out: &mut Vec<Poset>,
    budget: usize,
) -> Result<(), PosetError> {
    if seq.len() == m {
        if out.len() >= budget {
            return Err(PosetError::SearchBudgetExceeded(budget));
        }
        out.push(Poset::chain(seq));
        return Ok(());
    }
    for x in 0..m {
        if placed >> x & 1 == 0 && pred[x] & !placed == 0 {
            seq.push(x);
            walk(pred, m, placed | 1 << x, seq, out, budget)?;
            seq.pop();
        }
    }
    Ok(())
}

/// Critical pairs `(a, b)`: incomparable, every strict predecessor of `a` lies
/// below `b` and every strict successor of `b` lies above `a`.
///
/// A family of linear extensions realizes `p` iff each critical pair `(a, b)`
/// has `b` placed below `a` in at least one member.
pub fn critical_pairs(p: &Poset) -> Vec<Edge> {
    let m = p.size();
    let r = p.relation();
    let mut out = Vec::new();
    for a in 0..m {
        for b in 0..m {
            if a == b || r.contains(a, b) || r.contains(b, a) {
                continue;
            }
            let down_ok = (0..m).all(|x| x == a || !r.contains(x, a) || r.contains(x, b));
            let up_ok = (0..m).all(|y| y == b || !r.contains(b, y) || r.contains(a, y));
            if down_ok && up_ok {
                out.push((a, b));
            }
        }
    }
    out
}

/// Order dimension of `p` if at most `cap`.
///
/// Extensions are projected onto the critical pairs they reverse; the search
/// then looks for `k` projections covering every critical pair, for
/// `k = 1..=cap`, which is exhaustive over `k`-subsets of extensions.
pub fn order_dimension(p: &Poset, cap: usize, budget: usize) -> Result<Dimension, PosetError> {
    assert!(cap >= 1, "cap must be at least 1");
    let crit = critical_pairs(p);
    if crit.is_empty() {
        // Only total orders lack critical pairs.
        return Ok(Dimension::Exact(1));
    }
    let exts = linear_extensions_bounded(p, budget)?;
    let mut covers: Vec<Relation> = exts
        .iter()
        .map(|l| {
            Relation::from_edges(
                p.size(),
                crit.iter().copied().filter(|&(a, b)| l.contains(b, a)),
            )
        })
        .collect();
    covers.sort();
    covers.dedup();
    // Keep only maximal cover sets.
    let maximal: Vec<Relation> = covers
        .iter()
        .filter(|c| !covers.iter().any(|d| d != *c && c.is_subset(d)))
        .copied()
        .collect();
    let target = Relation::from_edges(p.size(), crit.iter().copied());
    for k in 2..=cap {
        if cover_search(&maximal, &target, Relation::empty(p.size()), k) {
            return Ok(Dimension::Exact(k));
        }
    }
    Ok(Dimension::AboveCap(cap))
}

fn cover_search(sets: &[Relation], target: &Relation, covered: Relation, left: usize) -> bool {
    let missing = target.difference(&covered);
    let Some((a, b)) = missing.pairs().next() else {
        return true;
    };
    if left == 0 {
        return false;
    }
    sets.iter()
        .filter(|s| s.contains(a, b))
        .any(|s| cover_search(sets, target, covered.union(s), left - 1))
}
