use std::cmp::Ordering;
use std::fmt;

use super::PosetError;

/// Largest ground set supported by the bit-matrix representation.
pub const MAX_ITEMS: usize = 16;

/// Ordered pair of item indices `(from, to)`, read as "from is below to".
pub type Edge = (usize, usize);

/// A binary relation on `m` items stored as one `u16` bit row per item.
///
/// Bit `j` of row `i` is set iff `(i, j)` belongs to the relation. Rows beyond
/// `m` and bits beyond `m` are always zero, so derived equality and hashing
/// are bit-exact matrix equality.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Relation {
    m: u8,
    rows: [u16; MAX_ITEMS],
}

impl Relation {
    /// The empty relation on `m` items.
    pub fn empty(m: usize) -> Self {
        assert!(m <= MAX_ITEMS, "relation on {m} items exceeds {MAX_ITEMS}");
        Relation {
            m: m as u8,
            rows: [0; MAX_ITEMS],
        }
    }

    /// The diagonal `{(y, y)}`.
    pub fn identity(m: usize) -> Self {
        let mut r = Relation::empty(m);
        for i in 0..m {
            r.rows[i] = 1 << i;
        }
        r
    }

    /// `M x M`.
    pub fn full(m: usize) -> Self {
        let mut r = Relation::empty(m);
        let mask = Self::row_mask(m);
        for i in 0..m {
            r.rows[i] = mask;
        }
        r
    }

    /// All off-diagonal pairs.
    pub fn off_diagonal(m: usize) -> Self {
        Relation::full(m).difference(&Relation::identity(m))
    }

    pub fn from_edges<I: IntoIterator<Item = Edge>>(m: usize, edges: I) -> Self {
        let mut r = Relation::empty(m);
        for (a, b) in edges {
            r.insert(a, b);
        }
        r
    }

    /// Builds a relation from a dense boolean matrix.
    pub fn from_matrix(matrix: &[Vec<bool>]) -> Result<Self, PosetError> {
        let m = matrix.len();
        if m == 0 || m > MAX_ITEMS {
            return Err(PosetError::BadShape(format!("{m} rows")));
        }
        let mut r = Relation::empty(m);
        for (i, row) in matrix.iter().enumerate() {
            if row.len() != m {
                return Err(PosetError::BadShape(format!(
                    "row {i} has {} columns, expected {m}",
                    row.len()
                )));
            }
            for (j, &set) in row.iter().enumerate() {
                if set {
                    r.insert(i, j);
                }
            }
        }
        Ok(r)
    }

    #[inline]
    fn row_mask(m: usize) -> u16 {
        if m == 16 {
            u16::MAX
        } else {
            (1u16 << m) - 1
        }
    }

    #[inline]
    pub fn size(&self) -> usize {
        self.m as usize
    }

    #[inline]
    pub fn contains(&self, a: usize, b: usize) -> bool {
        self.rows[a] >> b & 1 == 1
    }

    #[inline]
    pub fn insert(&mut self, a: usize, b: usize) {
        debug_assert!(a < self.size() && b < self.size());
        self.rows[a] |= 1 << b;
    }

    #[inline]
    pub fn remove(&mut self, a: usize, b: usize) {
        self.rows[a] &= !(1 << b);
    }

    #[inline]
    pub fn row(&self, a: usize) -> u16 {
        self.rows[a]
    }

    pub fn with(mut self, a: usize, b: usize) -> Self {
        self.insert(a, b);
        self
    }

    #[inline]
    pub fn union(&self, other: &Relation) -> Relation {
        let mut r = *self;
        for i in 0..MAX_ITEMS {
            r.rows[i] |= other.rows[i];
        }
        r
    }

    #[inline]
    pub fn intersection(&self, other: &Relation) -> Relation {
        let mut r = *self;
        for i in 0..MAX_ITEMS {
            r.rows[i] &= other.rows[i];
        }
        r
    }

    #[inline]
    pub fn difference(&self, other: &Relation) -> Relation {
        let mut r = *self;
        for i in 0..MAX_ITEMS {
            r.rows[i] &= !other.rows[i];
        }
        r
    }

    /// Pairs of `M x M` not in the relation.
    pub fn complement(&self) -> Relation {
        Relation::full(self.size()).difference(self)
    }

    #[inline]
    pub fn is_subset(&self, other: &Relation) -> bool {
        self.rows
            .iter()
            .zip(other.rows.iter())
            .all(|(a, b)| a & !b == 0)
    }

    #[inline]
    pub fn is_disjoint(&self, other: &Relation) -> bool {
        self.rows
            .iter()
            .zip(other.rows.iter())
            .all(|(a, b)| a & b == 0)
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.rows.iter().all(|&r| r == 0)
    }

    pub fn count(&self) -> usize {
        self.rows.iter().map(|r| r.count_ones() as usize).sum()
    }

    /// Iterates all pairs in row-major order.
    pub fn pairs(&self) -> impl Iterator<Item = Edge> + '_ {
        (0..self.size()).flat_map(move |a| {
            let row = self.rows[a];
            (0..self.size())
                .filter(move |&b| row >> b & 1 == 1)
                .map(move |b| (a, b))
        })
    }

    /// Iterates off-diagonal pairs in row-major order.
    pub fn edges(&self) -> impl Iterator<Item = Edge> + '_ {
        self.pairs().filter(|(a, b)| a != b)
    }

    pub fn without_diagonal(&self) -> Relation {
        self.difference(&Relation::identity(self.size()))
    }

    pub fn with_diagonal(&self) -> Relation {
        self.union(&Relation::identity(self.size()))
    }

    pub fn is_reflexive(&self) -> bool {
        (0..self.size()).all(|i| self.contains(i, i))
    }

    /// First row-major pair `(a, b)`, `a < b`, with both directions present.
    pub fn first_symmetric_pair(&self) -> Option<Edge> {
        for a in 0..self.size() {
            for b in a + 1..self.size() {
                if self.contains(a, b) && self.contains(b, a) {
                    return Some((a, b));
                }
            }
        }
        None
    }

    /// First row-major pair `(a, c)` missing although some `(a, b), (b, c)` are present.
    pub fn first_transitivity_gap(&self) -> Option<Edge> {
        self.compose_with_self().difference(self).pairs().next()
    }

    /// `{(a, c) : (a, b), (b, c) in self}`.
    pub fn compose_with_self(&self) -> Relation {
        let mut out = Relation::empty(self.size());
        for a in 0..self.size() {
            let mut bits = self.rows[a];
            while bits != 0 {
                let b = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                out.rows[a] |= self.rows[b];
            }
        }
        out
    }

    pub fn is_transitive(&self) -> bool {
        (0..self.size()).all(|a| {
            let row = self.rows[a];
            let mut reach = 0u16;
            let mut bits = row;
            while bits != 0 {
                let b = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                reach |= self.rows[b];
            }
            reach & !row == 0
        })
    }

    pub fn is_antisymmetric(&self) -> bool {
        self.first_symmetric_pair().is_none()
    }

    /// Smallest transitive superset (Warshall on bit rows).
    pub fn transitive_closure(&self) -> Relation {
        let mut r = *self;
        let m = self.size();
        for k in 0..m {
            let rk = r.rows[k];
            let bit = 1u16 << k;
            for i in 0..m {
                if r.rows[i] & bit != 0 {
                    r.rows[i] |= rk;
                }
            }
        }
        r
    }

    /// Converse relation `{(b, a) : (a, b) in self}`.
    pub fn transpose(&self) -> Relation {
        let mut r = Relation::empty(self.size());
        for (a, b) in self.pairs() {
            r.insert(b, a);
        }
        r
    }

    /// Applies an item permutation: pair `(a, b)` becomes `(perm[a], perm[b])`.
    pub fn permute(&self, perm: &[usize]) -> Relation {
        let mut r = Relation::empty(self.size());
        for (a, b) in self.pairs() {
            r.insert(perm[a], perm[b]);
        }
        r
    }

    pub fn to_matrix(&self) -> Vec<Vec<bool>> {
        (0..self.size())
            .map(|a| (0..self.size()).map(|b| self.contains(a, b)).collect())
            .collect()
    }

    /// Key whose ordering is lexicographic on the row-major bit string.
    #[inline]
    fn lex_key(&self, row: usize) -> u16 {
        self.rows[row].reverse_bits()
    }
}

impl Ord for Relation {
    fn cmp(&self, other: &Self) -> Ordering {
        self.m.cmp(&other.m).then_with(|| {
            for i in 0..self.size() {
                match self.lex_key(i).cmp(&other.lex_key(i)) {
                    Ordering::Equal => continue,
                    ord => return ord,
                }
            }
            Ordering::Equal
        })
    }
}

impl PartialOrd for Relation {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Relation[{}]{{", self.m)?;
        let mut first = true;
        for (a, b) in self.edges() {
            if !first {
                write!(f, ",")?;
            }
            first = false;
            write!(f, "{a}<{b}")?;
        }
        write!(f, "}}")
    }
}
