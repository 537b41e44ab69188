use std::collections::HashMap;
use std::io::Read;

use super::BenchError;
use crate::poset::{ItemUniverse, Poset, Relation};
use crate::ufg::PosetSample;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Orientation {
    HigherBetter,
    LowerBetter,
}

/// Parses `measure: higher|lower` lines; `#` starts a comment.
pub fn parse_orientations(text: &str) -> Result<Vec<(String, Orientation)>, BenchError> {
    let mut out: Vec<(String, Orientation)> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let bad = || BenchError::Orientation {
            line: i + 1,
            text: raw.to_string(),
        };
        let (name, dir) = line.split_once(':').ok_or_else(bad)?;
        let dir = match dir.trim() {
            "higher" => Orientation::HigherBetter,
            "lower" => Orientation::LowerBetter,
            _ => return Err(bad()),
        };
        let name = name.trim().to_string();
        if out.iter().any(|(n, _)| *n == name) {
            return Err(bad());
        }
        out.push((name, dir));
    }
    Ok(out)
}

/// Dataset × algorithm × measure grid of performance values.
#[derive(Debug, Clone, PartialEq)]
pub struct PerformanceTable {
    pub datasets: Vec<String>,
    pub algorithms: Vec<String>,
    pub measures: Vec<String>,
    pub orientations: Vec<Orientation>,
    values: Vec<f64>,
}

#[derive(serde::Deserialize)]
struct Row {
    dataset: String,
    algorithm: String,
    measure: String,
    value: String,
}

fn intern(names: &mut Vec<String>, lookup: &mut HashMap<String, usize>, name: &str) -> usize {
    *lookup.entry(name.to_string()).or_insert_with(|| {
        names.push(name.to_string());
        names.len() - 1
    })
}

impl PerformanceTable {
    /// Reads `dataset,algorithm,measure,value` rows. Names keep their order of first appearance.
    pub fn from_csv<R: Read>(
        reader: R,
        orientations: &[(String, Orientation)],
    ) -> Result<Self, BenchError> {
        let mut rdr = csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .from_reader(reader);
        let (mut datasets, mut algorithms, mut measures) = (Vec::new(), Vec::new(), Vec::new());
        let (mut ds_ix, mut alg_ix, mut mes_ix) = (HashMap::new(), HashMap::new(), HashMap::new());
        let mut cells: HashMap<(usize, usize, usize), f64> = HashMap::new();
        for (i, rec) in rdr.deserialize::<Row>().enumerate() {
            let row = rec.map_err(|e| BenchError::Csv(e.to_string()))?;
            let value: f64 = row
                .value
                .parse()
                .ok()
                .filter(|v: &f64| v.is_finite())
                .ok_or_else(|| BenchError::BadValue {
                    line: i + 2,
                    value: row.value.clone(),
                })?;
            let key = (
                intern(&mut datasets, &mut ds_ix, &row.dataset),
                intern(&mut algorithms, &mut alg_ix, &row.algorithm),
                intern(&mut measures, &mut mes_ix, &row.measure),
            );
            if cells.insert(key, value).is_some() {
                return Err(BenchError::DuplicateCell {
                    dataset: row.dataset,
                    algorithm: row.algorithm,
                    measure: row.measure,
                });
            }
        }
        let orient: Vec<Orientation> = measures
            .iter()
            .map(|m| {
                orientations
                    .iter()
                    .find(|(n, _)| n == m)
                    .map(|(_, o)| *o)
                    .ok_or_else(|| BenchError::UnknownOrientation(m.clone()))
            })
            .collect::<Result<_, _>>()?;
        if algorithms.len() < 2 {
            return Err(BenchError::Shape(
                "at least two algorithms are required".into(),
            ));
        }
        let mut values = Vec::with_capacity(datasets.len() * algorithms.len() * measures.len());
        for (d, dn) in datasets.iter().enumerate() {
            for (a, an) in algorithms.iter().enumerate() {
                for (m, mn) in measures.iter().enumerate() {
                    let v = cells
                        .get(&(d, a, m))
                        .ok_or_else(|| BenchError::MissingCell {
                            dataset: dn.clone(),
                            algorithm: an.clone(),
                            measure: mn.clone(),
                        })?;
                    values.push(*v);
                }
            }
        }
        Ok(PerformanceTable {
            datasets,
            algorithms,
            measures,
            orientations: orient,
            values,
        })
    }

    pub fn value(&self, dataset: usize, algorithm: usize, measure: usize) -> f64 {
        let (k, l) = (self.algorithms.len(), self.measures.len());
        self.values[(dataset * k + algorithm) * l + measure]
    }

    /// The table restricted to the named measures, in the given order.
    pub fn select_measures(&self, names: &[String]) -> Result<PerformanceTable, BenchError> {
        if names.is_empty() {
            return Err(BenchError::Shape("measure subset is empty".into()));
        }
        let idx: Vec<usize> = names
            .iter()
            .map(|n| {
                self.measures
                    .iter()
                    .position(|m| m == n)
                    .ok_or_else(|| BenchError::UnknownMeasure(n.clone()))
            })
            .collect::<Result<_, _>>()?;
        let mut values = Vec::new();
        for d in 0..self.datasets.len() {
            for a in 0..self.algorithms.len() {
                values.extend(idx.iter().map(|&m| self.value(d, a, m)));
            }
        }
        Ok(PerformanceTable {
            datasets: self.datasets.clone(),
            algorithms: self.algorithms.clone(),
            measures: names.to_vec(),
            orientations: idx.iter().map(|&m| self.orientations[m]).collect(),
            values,
        })
    }

    /// Compares two algorithms on one measure; `epsilon` widens equality.
    fn compare(
        &self,
        d: usize,
        a: usize,
        b: usize,
        m: usize,
        epsilon: Option<f64>,
    ) -> std::cmp::Ordering {
        let (x, y) = (self.value(d, a, m), self.value(d, b, m));
        if epsilon.is_some_and(|e| (x - y).abs() <= e) || x == y {
            return std::cmp::Ordering::Equal;
        }
        let ord = x.total_cmp(&y);
        match self.orientations[m] {
            Orientation::HigherBetter => ord,
            Orientation::LowerBetter => ord.reverse(),
        }
    }

    /// Dominance poset of one dataset: `(i, j)` when `i` is at least as good
    /// as `j` on every measure and strictly better on one.
    pub fn build_poset(&self, dataset: usize, epsilon: Option<f64>) -> Result<Poset, BenchError> {
        let k = self.algorithms.len();
        let mut rel = Relation::identity(k);
        for i in 0..k {
            for j in (0..k).filter(|&j| j != i) {
                let ords: Vec<_> = (0..self.measures.len())
                    .map(|m| self.compare(dataset, i, j, m, epsilon))
                    .collect();
                if ords.iter().all(|o| o.is_eq()) {
                    return Err(BenchError::IndifferentAlgorithms {
                        dataset: self.datasets[dataset].clone(),
                        first: self.algorithms[i.min(j)].clone(),
                        second: self.algorithms[i.max(j)].clone(),
                    });
                }
                if ords.iter().all(|o| o.is_ge()) {
                    rel.insert(i, j);
                }
            }
        }
        // Dominance is transitive; with epsilon it may not be, so validate.
        Poset::validate(rel)
            .map_err(|e| BenchError::Shape(format!("dataset {}: {e}", self.datasets[dataset])))
    }

    /// One dominance poset per dataset, items labeled by algorithm.
    pub fn to_sample(&self, epsilon: Option<f64>) -> Result<PosetSample, BenchError> {
        let universe = ItemUniverse::new(self.algorithms.iter().cloned())
            .map_err(|e| BenchError::Shape(e.to_string()))?;
        let posets = (0..self.datasets.len())
            .map(|d| self.build_poset(d, epsilon))
            .collect::<Result<Vec<_>, _>>()?;
        PosetSample::from_observations(universe, posets)
            .map_err(|e| BenchError::Shape(e.to_string()))
    }
}
