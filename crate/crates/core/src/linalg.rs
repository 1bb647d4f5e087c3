//! Sparse exact row reduction over the rationals.
//!
//! Columns are any ordered key type. Every stored row remembers which
//! combination of inserted source vectors produced it, which is enough for
//! rank, kernel, membership and particular solutions.

use std::collections::BTreeMap;

use num_traits::{One, Zero};

use crate::graded_core::Rat;

pub type SparseVec<C> = BTreeMap<C, Rat>;
pub type Combination = BTreeMap<usize, Rat>;

/// Which end of a row's support becomes its pivot.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum PivotOrder {
    #[default]
    Lowest,
    Highest,
}

#[derive(Clone, Debug)]
struct Row<C> {
    vec: SparseVec<C>,
    combo: Combination,
}

#[derive(Clone, Debug)]
pub struct EchelonBasis<C: Ord + Clone> {
    rows: Vec<Row<C>>,
    pivots: BTreeMap<C, usize>,
    order: PivotOrder,
    sources: usize,
    kernel: Vec<Combination>,
}

fn axpy<K: Ord + Clone>(y: &mut BTreeMap<K, Rat>, a: &Rat, x: &BTreeMap<K, Rat>) {
    for (k, v) in x {
        let e = y.entry(k.clone()).or_insert_with(Rat::zero);
        *e += a * v;
        if e.is_zero() {
            y.remove(k);
        }
    }
}

impl<C: Ord + Clone> Default for EchelonBasis<C> {
    fn default() -> Self {
        Self::new(PivotOrder::Lowest)
    }
}

impl<C: Ord + Clone> EchelonBasis<C> {
    pub fn new(order: PivotOrder) -> Self {
        EchelonBasis { rows: Vec::new(), pivots: BTreeMap::new(), order, sources: 0, kernel: Vec::new() }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn sources(&self) -> usize {
        self.sources
    }

    /// Source combinations found to map to zero, one per dependent insert.
    pub fn kernel(&self) -> &[Combination] {
        &self.kernel
    }

    fn next_pivot_col(&self, v: &SparseVec<C>, after: Option<&C>) -> Option<C> {
        match self.order {
            PivotOrder::Lowest => {
                let it: Box<dyn Iterator<Item = &C>> = match after {
                    Some(a) => Box::new(v.range(a.clone()..).map(|(k, _)| k)),
                    None => Box::new(v.keys()),
                };
                for k in it {
                    if self.pivots.contains_key(k) {
                        return Some(k.clone());
                    }
                }
                None
            }
            PivotOrder::Highest => {
                let it: Box<dyn Iterator<Item = &C>> = match after {
                    Some(a) => Box::new(v.range(..=a.clone()).rev().map(|(k, _)| k)),
                    None => Box::new(v.keys().rev()),
                };
                for k in it {
                    if self.pivots.contains_key(k) {
                        return Some(k.clone());
                    }
                }
                None
            }
        }
    }

    /// Reduces `v` against the rows; returns the residual and the
    /// combination of sources that was subtracted.
    pub fn reduce(&self, v: &SparseVec<C>) -> (SparseVec<C>, Combination) {
        let mut r = v.clone();
        let mut used = Combination::new();
        let mut cursor: Option<C> = None;
        while let Some(col) = self.next_pivot_col(&r, cursor.as_ref()) {
            let row = &self.rows[self.pivots[&col]];
            let a = r[&col].clone();
            axpy(&mut r, &-a.clone(), &row.vec);
            axpy(&mut used, &a, &row.combo);
            cursor = Some(col);
        }
        (r, used)
    }

    fn pivot_of(&self, v: &SparseVec<C>) -> Option<C> {
        match self.order {
            PivotOrder::Lowest => v.keys().next().cloned(),
            PivotOrder::Highest => v.keys().next_back().cloned(),
        }
    }

    /// Inserts the image of a new source. Returns `true` if it raised the rank.
    pub fn insert(&mut self, v: &SparseVec<C>) -> bool {
        let id = self.sources;
        self.sources += 1;
        let (r, used) = self.reduce(v);
        let mut combo = Combination::new();
        combo.insert(id, Rat::one());
        axpy(&mut combo, &-Rat::one(), &used);
        match self.pivot_of(&r) {
            None => {
                self.kernel.push(combo);
                false
            }
            Some(p) => {
                let inv = Rat::one() / &r[&p];
                let vec = r.into_iter().map(|(k, x)| (k, x * &inv)).collect();
                let combo = combo.into_iter().map(|(k, x)| (k, x * &inv)).collect();
                self.pivots.insert(p, self.rows.len());
                self.rows.push(Row { vec, combo });
                true
            }
        }
    }

    pub fn contains(&self, v: &SparseVec<C>) -> bool {
        self.reduce(v).0.is_empty()
    }

    /// A source combination whose image is `target`, if one exists.
    pub fn solve(&self, target: &SparseVec<C>) -> Option<Combination> {
        let (r, used) = self.reduce(target);
        if r.is_empty() {
            Some(used)
        } else {
            None
        }
    }

    /// Stored rows whose pivot satisfies `keep`.
    pub fn rows_with_pivot(&self, keep: impl Fn(&C) -> bool) -> Vec<SparseVec<C>> {
        self.pivots
            .iter()
            .filter(|(c, _)| keep(c))
            .map(|(_, &i)| self.rows[i].vec.clone())
            .collect()
    }
}

/// Rank of a list of vectors.
pub fn rank_of<C: Ord + Clone>(vs: &[SparseVec<C>]) -> usize {
    let mut b = EchelonBasis::new(PivotOrder::Lowest);
    for v in vs {
        b.insert(v);
    }
    b.rank()
}

/// Dense rational matrix rank, for small reports such as the anchor.
pub fn dense_rank(m: &[Vec<Rat>]) -> usize {
    let vs: Vec<SparseVec<usize>> = m
        .iter()
        .map(|row| row.iter().enumerate().filter(|(_, x)| !x.is_zero()).map(|(j, x)| (j, x.clone())).collect())
        .collect();
    rank_of(&vs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graded_core::int;

    fn v(xs: &[(usize, i64)]) -> SparseVec<usize> {
        xs.iter().map(|&(k, x)| (k, int(x))).collect()
    }

    #[test]
    fn rank_and_kernel() {
        let mut b = EchelonBasis::new(PivotOrder::Lowest);
        assert!(b.insert(&v(&[(0, 1), (1, 2)])));
        assert!(b.insert(&v(&[(1, 1), (2, 1)])));
        assert!(!b.insert(&v(&[(0, 1), (1, 3), (2, 1)])));
        assert_eq!(b.rank(), 2);
        let k = &b.kernel()[0];
        assert_eq!(k.get(&2), Some(&int(1)));
        assert_eq!(k.get(&0), Some(&int(-1)));
        assert_eq!(k.get(&1), Some(&int(-1)));
    }

    #[test]
    fn solve_returns_preimage() {
        for order in [PivotOrder::Lowest, PivotOrder::Highest] {
            let mut b = EchelonBasis::new(order);
            let cols = [v(&[(0, 2)]), v(&[(0, 1), (1, 1)]), v(&[(1, 1), (2, 5)])];
            for c in &cols {
                b.insert(c);
            }
            let target = v(&[(0, 3), (1, 2), (2, 5)]);
            let x = b.solve(&target).unwrap();
            let mut acc = SparseVec::new();
            for (i, a) in &x {
                axpy(&mut acc, a, &cols[*i]);
            }
            assert_eq!(acc, target);
            assert!(b.solve(&v(&[(3, 1)])).is_none());
        }
    }

    #[test]
    fn dense_rank_works() {
        let m = vec![vec![int(1), int(2)], vec![int(2), int(4)]];
        assert_eq!(dense_rank(&m), 1);
    }
}
