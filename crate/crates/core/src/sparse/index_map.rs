use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Ordered set of global indices describing a restriction `R`.
///
/// `R x` is [`IndexMap::gather`] and `Rᵀ y` is [`IndexMap::scatter_add`].
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct IndexMap {
    indices: Vec<usize>,
}

impl IndexMap {
    /// Requires strictly increasing indices.
    pub fn new(indices: Vec<usize>) -> Result<Self> {
        if indices.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidStructure(
                "index map entries must be unique and sorted".into(),
            ));
        }
        Ok(Self { indices })
    }

    /// Sorts and deduplicates.
    pub fn from_unsorted(mut indices: Vec<usize>) -> Self {
        indices.sort_unstable();
        indices.dedup();
        Self { indices }
    }

    pub fn full(n: usize) -> Self {
        Self {
            indices: (0..n).collect(),
        }
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.indices.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    #[inline]
    pub fn as_slice(&self) -> &[usize] {
        &self.indices
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.indices.iter().copied()
    }

    /// Local position of a global index.
    pub fn position(&self, global: usize) -> Option<usize> {
        self.indices.binary_search(&global).ok()
    }

    pub fn contains(&self, global: usize) -> bool {
        self.position(global).is_some()
    }

    pub fn max_index(&self) -> Option<usize> {
        self.indices.last().copied()
    }

    pub fn is_subset_of(&self, other: &IndexMap) -> bool {
        self.indices.iter().all(|&g| other.contains(g))
    }

    /// `out[k] = x[indices[k]]`
    pub fn gather<T: Copy>(&self, x: &[T], out: &mut [T]) {
        debug_assert_eq!(out.len(), self.indices.len());
        for (o, &g) in out.iter_mut().zip(&self.indices) {
            *o = x[g];
        }
    }

    /// `x[indices[k]] += local[k]`
    pub fn scatter_add<T: Scalar>(&self, local: &[T], x: &mut [T]) {
        debug_assert_eq!(local.len(), self.indices.len());
        for (&v, &g) in local.iter().zip(&self.indices) {
            x[g] += v;
        }
    }
}

impl From<IndexMap> for Vec<usize> {
    fn from(m: IndexMap) -> Self {
        m.indices
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_unsorted() {
        assert!(IndexMap::new(vec![1, 0]).is_err());
        assert!(IndexMap::new(vec![1, 1]).is_err());
        assert_eq!(IndexMap::from_unsorted(vec![3, 1, 3]).as_slice(), &[1, 3]);
    }

    #[test]
    fn gather_scatter_are_adjoint() {
        let m = IndexMap::new(vec![0, 2, 5]).unwrap();
        let x = [1.0, 2.0, 3.0, 4.0, 5.0, 6.0];
        let mut loc = [0.0; 3];
        m.gather(&x, &mut loc);
        assert_eq!(loc, [1.0, 3.0, 6.0]);
        let mut y = [0.0; 6];
        m.scatter_add(&loc, &mut y);
        assert_eq!(y, [1.0, 0.0, 3.0, 0.0, 0.0, 6.0]);
        assert_eq!(m.position(5), Some(2));
        assert_eq!(m.position(4), None);
    }
}
