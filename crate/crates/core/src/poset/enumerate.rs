use rayon::prelude::*;

use super::{Poset, PosetError, Relation};

/// Default largest universe for which all posets are materialized.
pub const DEFAULT_ENUM_LIMIT: usize = 6;

/// All posets on `m` items, each exactly once, in canonical order.
///
/// Posets on `k + 1` items are grown from posets on `k` items by placing the
/// new item above a down-set `D` and below an up-set `U` with `D × U` already
/// ordered; every poset arises from exactly one such choice.
pub fn enumerate_posets(m: usize, limit: usize) -> Result<Vec<Poset>, PosetError> {
    if m > limit {
        return Err(PosetError::UniverseTooLarge { m, limit });
    }
    if m == 0 {
        return Err(PosetError::BadShape("empty universe".into()));
    }
    let mut level: Vec<Relation> = vec![Relation::identity(1)];
    for k in 1..m {
        level = level
            .par_iter()
            .flat_map_iter(|r| extend_by_one(r, k, m))
            .collect();
    }
    let mut out: Vec<Poset> = level
        .into_iter()
        .map(|r| Poset::from_relation_unchecked(resize(&r, m)))
        .collect();
    out.par_sort_unstable();
    Ok(out)
}

/// Number of labeled posets on `m` items, by enumeration.
pub fn count_posets(m: usize, limit: usize) -> Result<usize, PosetError> {
    enumerate_posets(m, limit).map(|v| v.len())
}

fn resize(r: &Relation, m: usize) -> Relation {
    let mut out = Relation::empty(m);
    for (a, b) in r.pairs() {
        out.insert(a, b);
    }
    out
}

/// All extensions of the poset `r` on items `0..k` by the new item `k`.
fn extend_by_one(r: &Relation, k: usize, m: usize) -> Vec<Relation> {
    let base = resize(r, m.max(k + 1));
    // Strict predecessor / successor masks per item.
    let succ: Vec<u16> = (0..k).map(|x| base.row(x) & !(1 << x)).collect();
    let pred: Vec<u16> = (0..k)
        .map(|x| {
            (0..k)
                .filter(|&y| y != x && base.contains(y, x))
                .fold(0u16, |acc, y| acc | 1 << y)
        })
        .collect();
    let subsets = 1u32 << k;
    let mut downs = Vec::new();
    let mut ups = Vec::new();
    for s in 0..subsets {
        let s = s as u16;
        let mut down = true;
        let mut up = true;
        let mut bits = s;
        while bits != 0 {
            let x = bits.trailing_zeros() as usize;
            bits &= bits - 1;
            down &= pred[x] & !s == 0;
            up &= succ[x] & !s == 0;
        }
        if down {
            downs.push(s);
        }
        if up {
            ups.push(s);
        }
    }
    let all = (subsets - 1) as u16;
    let mut out = Vec::new();
    for &d in &downs {
        // Items strictly above every element of `d`.
        let mut above = all;
        let mut bits = d;
        while bits != 0 {
            let x = bits.trailing_zeros() as usize;
            bits &= bits - 1;
            above &= succ[x];
        }
        for &u in &ups {
            if u & d != 0 || u & !above != 0 {
                continue;
            }
            let mut next = base;
            next.insert(k, k);
            let mut ub = u;
            while ub != 0 {
                let y = ub.trailing_zeros() as usize;
                ub &= ub - 1;
                next.insert(k, y);
            }
            let mut db = d;
            while db != 0 {
                let x = db.trailing_zeros() as usize;
                db &= db - 1;
                next.insert(x, k);
            }
            out.push(next);
        }
    }
    out
}
