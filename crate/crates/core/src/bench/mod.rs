//! Benchmark tables to poset samples, and the analyses run on them.

mod analysis;
pub mod davidson;
mod table;

use thiserror::Error;

pub use analysis::{
    dispersion, edge_persistence, rank_shift, ranked_posets, sum_statistics, tie_counts,
    PersistenceMode, PersistenceRow, RankShift, SumStatistics,
};
pub use davidson::{davidson_fit, davidson_fit_sample, DavidsonModel};
pub use table::{parse_orientations, Orientation, PerformanceTable};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BenchError {
    #[error("csv: {0}")]
    Csv(String),
    #[error("line {line}: cannot parse value {value:?}")]
    BadValue { line: usize, value: String },
    #[error("missing cell: dataset {dataset}, algorithm {algorithm}, measure {measure}")]
    MissingCell {
        dataset: String,
        algorithm: String,
        measure: String,
    },
    #[error("duplicate cell: dataset {dataset}, algorithm {algorithm}, measure {measure}")]
    DuplicateCell {
        dataset: String,
        algorithm: String,
        measure: String,
    },
    #[error("no orientation declared for measure {0}")]
    UnknownOrientation(String),
    #[error("unknown measure {0}")]
    UnknownMeasure(String),
    #[error("orientation line {line} is not `measure: higher|lower`: {text:?}")]
    Orientation { line: usize, text: String },
    #[error("algorithms {first} and {second} tie on every measure in dataset {dataset}")]
    IndifferentAlgorithms {
        dataset: String,
        first: String,
        second: String,
    },
    #[error("depth ties cross the persistence boundary of edge {from} -> {to}")]
    AmbiguousRanking { from: String, to: String },
    #[error("depth maps cover different posets")]
    ScopeMismatch,
    #[error("Davidson model is degenerate: {0}")]
    Degenerate(String),
    #[error("{0}")]
    Shape(String),
}
