//! Text and JSON encodings of posets.
//!
//! The text format holds one or more records separated by blank lines:
//!
//! ```text
//! items: y1,y2,y3
//! count: 2
//! y1 < y2
//! y2 < y3
//! ```
//!
//! Body lines list any generating edge set; readers take the transitive hull
//! and validate it. `count` is optional and defaults to 1. Writers emit the
//! transitive reduction in row-major order.

use serde::{Deserialize, Serialize};

use super::{transitive_hull, transitive_reduction, ItemUniverse, Poset, PosetError, Relation};

/// One parsed record of the text format.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PosetRecord {
    pub universe: ItemUniverse,
    pub poset: Poset,
    pub count: u64,
}

fn parse_err(line: usize, msg: impl Into<String>) -> PosetError {
    PosetError::Parse {
        line,
        msg: msg.into(),
    }
}

/// Parses every record in `text`.
pub fn parse_records(text: &str) -> Result<Vec<PosetRecord>, PosetError> {
    let mut out = Vec::new();
    let mut current: Option<(ItemUniverse, Relation, u64, usize)> = None;

    fn finish(
        out: &mut Vec<PosetRecord>,
        current: Option<(ItemUniverse, Relation, u64, usize)>,
    ) -> Result<(), PosetError> {
        if let Some((universe, rel, count, line)) = current {
            let poset = transitive_hull(&rel).map_err(|e| parse_err(line, e.to_string()))?;
            out.push(PosetRecord {
                universe,
                poset,
                count,
            });
        }
        Ok(())
    }

    for (idx, raw) in text.lines().enumerate() {
        let lineno = idx + 1;
        let line = raw.trim();
        if line.starts_with('#') {
            continue;
        }
        if line.is_empty() {
            finish(&mut out, current.take())?;
            continue;
        }
        if let Some(rest) = line.strip_prefix("items:") {
            finish(&mut out, current.take())?;
            let labels = rest.split(',').map(str::trim).filter(|s| !s.is_empty());
            let universe =
                ItemUniverse::new(labels).map_err(|e| parse_err(lineno, e.to_string()))?;
            let m = universe.len();
            current = Some((universe, Relation::empty(m), 1, lineno));
            continue;
        }
        let Some((universe, rel, count, _)) = current.as_mut() else {
            return Err(parse_err(lineno, "record body before `items:` header"));
        };
        if let Some(rest) = line.strip_prefix("count:") {
            *count = rest
                .trim()
                .parse()
                .map_err(|_| parse_err(lineno, "count must be a positive integer"))?;
            if *count == 0 {
                return Err(parse_err(lineno, "count must be a positive integer"));
            }
            continue;
        }
        let Some((a, b)) = line.split_once('<') else {
            return Err(parse_err(lineno, format!("expected `a < b`, got {line:?}")));
        };
        let (a, b) = (a.trim(), b.trim());
        let ia = universe
            .index(a)
            .ok_or_else(|| parse_err(lineno, format!("unknown item {a:?}")))?;
        let ib = universe
            .index(b)
            .ok_or_else(|| parse_err(lineno, format!("unknown item {b:?}")))?;
        rel.insert(ia, ib);
    }
    finish(&mut out, current.take())?;
    Ok(out)
}

/// Parses exactly one record.
pub fn parse_poset(text: &str) -> Result<(ItemUniverse, Poset), PosetError> {
    let mut recs = parse_records(text)?;
    match recs.len() {
        1 => {
            let r = recs.pop().unwrap();
            Ok((r.universe, r.poset))
        }
        n => Err(parse_err(0, format!("expected one record, found {n}"))),
    }
}

/// Writes one record with its transitive-reduction edges.
pub fn write_poset(universe: &ItemUniverse, poset: &Poset, count: Option<u64>) -> String {
    let mut s = format!("items: {}\n", universe.labels().join(","));
    if let Some(c) = count {
        s.push_str(&format!("count: {c}\n"));
    }
    for (a, b) in transitive_reduction(poset).pairs() {
        s.push_str(&format!("{} < {}\n", universe.label(a), universe.label(b)));
    }
    s
}

/// JSON mirror of the text format.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PosetJson {
    pub items: Vec<String>,
    pub edges: Vec<[String; 2]>,
}

impl PosetJson {
    pub fn from_poset(universe: &ItemUniverse, poset: &Poset) -> Self {
        PosetJson {
            items: universe.labels().to_vec(),
            edges: transitive_reduction(poset)
                .pairs()
                .map(|(a, b)| [universe.label(a).to_string(), universe.label(b).to_string()])
                .collect(),
        }
    }

    pub fn to_poset(&self) -> Result<(ItemUniverse, Poset), PosetError> {
        let universe = ItemUniverse::new(self.items.iter().cloned())?;
        let mut rel = Relation::empty(universe.len());
        for [a, b] in &self.edges {
            let ia = universe
                .index(a)
                .ok_or_else(|| parse_err(0, format!("unknown item {a:?}")))?;
            let ib = universe
                .index(b)
                .ok_or_else(|| parse_err(0, format!("unknown item {b:?}")))?;
            rel.insert(ia, ib);
        }
        let poset = transitive_hull(&rel)?;
        Ok((universe, poset))
    }
}

/// `a<b;c<d` rendering of the Hasse edges, used in CSV outputs.
pub fn hasse_string(universe: &ItemUniverse, poset: &Poset) -> String {
    transitive_reduction(poset)
        .pairs()
        .map(|e| universe.edge_label(e))
        .collect::<Vec<_>>()
        .join(";")
}
