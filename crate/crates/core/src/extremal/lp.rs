//! CPLEX LP rendering of the 0-1 program, for cross-checking with an external solver.

use std::fmt::Write as _;

use num_bigint::BigUint;

use super::Direction;
use crate::depth::{FamilyIndex, WeightsView};
use crate::poset::{PosetError, Relation};
use crate::ufg::{PosetSample, UfgFamily};

fn x(a: usize, b: usize) -> String {
    format!("x_{a}_{b}")
}

/// Writes the program: `x_a_b` says pair `(a, b)` is in the poset and `s_i`
/// says family set `i` is counted. Objective coefficients are the set
/// weights scaled to a common integer denominator.
///
/// For `Min` the counted sets are tied to the poset by equivalence rows, so
/// every set whose closure contains the poset must be counted.
pub fn write_lp(
    sample: &PosetSample,
    family: &UfgFamily,
    direction: Direction,
) -> Result<String, PosetError> {
    let index = FamilyIndex::new(sample, family)?;
    let m = sample.m();
    let weights: Vec<BigUint> = match index.weights_view() {
        WeightsView::Small(each, _) => each.iter().map(|&w| BigUint::from(w)).collect(),
        WeightsView::Big(each, _) => each.to_vec(),
    };
    let off = Relation::off_diagonal(m);
    let mut out = String::new();
    out.push_str(match direction {
        Direction::Max => "Maximize\n",
        Direction::Min => "Minimize\n",
    });
    let terms: Vec<String> = weights
        .iter()
        .enumerate()
        .map(|(i, w)| format!("{w} s_{i}"))
        .collect();
    let objective = if terms.is_empty() {
        "0 x_0_1".to_string()
    } else {
        terms.join(" + ")
    };
    let _ = writeln!(out, " obj: {objective}");
    out.push_str("Subject To\n");
    for (a, b) in off.pairs().filter(|&(a, b)| a < b) {
        let _ = writeln!(out, " anti_{a}_{b}: {} + {} <= 1", x(a, b), x(b, a));
    }
    for a in 0..m {
        for b in (0..m).filter(|&b| b != a) {
            for c in (0..m).filter(|&c| c != a && c != b) {
                let _ = writeln!(
                    out,
                    " trans_{a}_{b}_{c}: {} + {} - {} <= 1",
                    x(a, b),
                    x(b, c),
                    x(a, c)
                );
            }
        }
    }
    for i in 0..index.len() {
        let meet = index.meet(i).intersection(&off);
        let outside = off.difference(index.join(i));
        for (a, b) in meet.pairs() {
            let _ = writeln!(out, " meet_{i}_{a}_{b}: s_{i} - {} <= 0", x(a, b));
        }
        for (a, b) in outside.pairs() {
            let _ = writeln!(out, " join_{i}_{a}_{b}: s_{i} + {} <= 1", x(a, b));
        }
        if direction == Direction::Min {
            let mut row = format!(" cover_{i}: s_{i}");
            for (a, b) in meet.pairs() {
                let _ = write!(row, " - {}", x(a, b));
            }
            for (a, b) in outside.pairs() {
                let _ = write!(row, " + {}", x(a, b));
            }
            let _ = writeln!(out, "{row} >= {}", 1 - meet.count() as i64);
        }
    }
    out.push_str("Binary\n");
    for (a, b) in off.pairs() {
        let _ = writeln!(out, " {}", x(a, b));
    }
    for i in 0..index.len() {
        let _ = writeln!(out, " s_{i}");
    }
    out.push_str("End\n");
    Ok(out)
}
