use crate::mask::SupportMask;
use crate::{Error, Result};

/// Permutation of `{1, ..., n}` stored as the image array: `image[j-1]` is
/// the destination of index `j`.
///
/// Applying the permutation to a sequence `v` produces `w` with
/// `w[image(j)] = v[j]`; the associated matrix sends basis vector `e_j` to
/// `e_{image(j)}`, so composition matches matrix multiplication.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Permutation {
    image: Vec<usize>,
}

impl Permutation {
    pub fn identity(n: usize) -> Self {
        Permutation {
            image: (1..=n).collect(),
        }
    }

    /// Build from a 1-based image array, validating bijectivity.
    pub fn from_image(image: Vec<usize>) -> Result<Self> {
        let n = image.len();
        let mut seen = vec![false; n];
        for &dest in &image {
            if dest == 0 || dest > n || seen[dest - 1] {
                return Err(Error::InvalidPermutation(format!(
                    "image {:?} is not a bijection on 1..={}",
                    image, n
                )));
            }
            seen[dest - 1] = true;
        }
        Ok(Permutation { image })
    }

    pub fn len(&self) -> usize {
        self.image.len()
    }

    pub fn is_empty(&self) -> bool {
        self.image.is_empty()
    }

    /// Destination of 1-based index `j`.
    pub fn image_of(&self, j: usize) -> usize {
        self.image[j - 1]
    }

    pub fn image(&self) -> &[usize] {
        &self.image
    }

    pub fn is_identity(&self) -> bool {
        self.image.iter().enumerate().all(|(i, &d)| d == i + 1)
    }

    /// Reorder a sequence: element at position `j` moves to `image(j)`.
    pub fn apply<T: Clone>(&self, v: &[T]) -> Result<Vec<T>> {
        if v.len() != self.image.len() {
            return Err(Error::DimensionMismatch(format!(
                "permutation of size {} applied to {} elements",
                self.image.len(),
                v.len()
            )));
        }
        let mut out = v.to_vec();
        for (j, &dest) in self.image.iter().enumerate() {
            out[dest - 1] = v[j].clone();
        }
        Ok(out)
    }

    /// Composition `self . other` (apply `other` first), matching the product
    /// of the associated matrices.
    pub fn compose(&self, other: &Permutation) -> Result<Permutation> {
        if self.len() != other.len() {
            return Err(Error::DimensionMismatch(format!(
                "composing permutations of sizes {} and {}",
                self.len(),
                other.len()
            )));
        }
        Ok(Permutation {
            image: other.image.iter().map(|&j| self.image[j - 1]).collect(),
        })
    }

    pub fn inverse(&self) -> Permutation {
        let mut image = vec![0; self.image.len()];
        for (j, &dest) in self.image.iter().enumerate() {
            image[dest - 1] = j + 1;
        }
        Permutation { image }
    }

    /// Block-diagonal repetition: `count` copies along the diagonal, acting on
    /// `count * len` indices.
    pub fn repeat_blocks(&self, count: usize) -> Permutation {
        let n = self.image.len();
        let mut image = Vec::with_capacity(n * count);
        for b in 0..count {
            image.extend(self.image.iter().map(|&d| b * n + d));
        }
        Permutation { image }
    }

    /// Sparsity pattern of the permutation matrix: one at `(image(j), j)`.
    pub fn to_mask(&self) -> SupportMask {
        let n = self.image.len();
        SupportMask::from_indices(n, n, self.image.iter().enumerate().map(|(j, &d)| (d, j + 1)))
            .expect("permutation image stays in bounds")
    }
}
