//! Small fixed-capacity vectors for dimensions 2 to 4.

use std::fmt;
use std::ops::{Add, AddAssign, Index, IndexMut, Mul, Neg, Sub, SubAssign};

use serde::{Deserialize, Deserializer, Serialize, Serializer};

pub const MAX_DIM: usize = 4;

/// A point or vector in R^N, N <= 4, stored inline.
#[derive(Clone, Copy, PartialEq)]
pub struct VecN {
    data: [f64; MAX_DIM],
    dim: u8,
}

impl VecN {
    pub fn zeros(dim: usize) -> Self {
        assert!(dim <= MAX_DIM, "dimension {dim} exceeds {MAX_DIM}");
        Self {
            data: [0.0; MAX_DIM],
            dim: dim as u8,
        }
    }

    pub fn from_slice(values: &[f64]) -> Self {
        let mut v = Self::zeros(values.len());
        v.data[..values.len()].copy_from_slice(values);
        v
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize) -> f64) -> Self {
        let mut v = Self::zeros(dim);
        for i in 0..dim {
            v.data[i] = f(i);
        }
        v
    }

    /// The k-th standard basis vector.
    pub fn basis(dim: usize, k: usize) -> Self {
        let mut v = Self::zeros(dim);
        v.data[k] = 1.0;
        v
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim as usize
    }

    #[inline]
    pub fn as_slice(&self) -> &[f64] {
        &self.data[..self.dim as usize]
    }

    #[inline]
    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.data[..self.dim as usize]
    }

    pub fn to_vec(&self) -> Vec<f64> {
        self.as_slice().to_vec()
    }

    #[inline]
    pub fn dot(&self, other: &Self) -> f64 {
        debug_assert_eq!(self.dim, other.dim);
        let mut s = 0.0;
        for k in 0..self.dim as usize {
            s += self.data[k] * other.data[k];
        }
        s
    }

    #[inline]
    pub fn norm_sq(&self) -> f64 {
        self.dot(self)
    }

    #[inline]
    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    /// Unit vector in the same direction; `None` for the zero vector.
    pub fn normalized(&self) -> Option<Self> {
        let n = self.norm();
        if n > 0.0 && n.is_finite() {
            Some(*self * (1.0 / n))
        } else {
            None
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.as_slice().iter().fold(0.0f64, |m, x| m.max(x.abs()))
    }

    /// 2D rotation by +90 degrees, (a, b) -> (-b, a).
    pub fn perp(&self) -> Self {
        assert_eq!(self.dim, 2, "perp is only defined in 2D");
        Self::from_slice(&[-self.data[1], self.data[0]])
    }

    pub fn cross(&self, other: &Self) -> Self {
        assert!(self.dim == 3 && other.dim == 3, "cross product needs 3D");
        let (a, b) = (&self.data, &other.data);
        Self::from_slice(&[
            a[1] * b[2] - a[2] * b[1],
            a[2] * b[0] - a[0] * b[2],
            a[0] * b[1] - a[1] * b[0],
        ])
    }

    /// Drop the last coordinate.
    pub fn head(&self) -> Self {
        Self::from_slice(&self.as_slice()[..self.dim() - 1])
    }

    /// Append a coordinate.
    pub fn extend(&self, last: f64) -> Self {
        let mut v = Self::zeros(self.dim() + 1);
        v.data[..self.dim()].copy_from_slice(self.as_slice());
        v.data[self.dim()] = last;
        v
    }

    pub fn iter(&self) -> impl Iterator<Item = &f64> {
        self.as_slice().iter()
    }

    pub fn is_finite(&self) -> bool {
        self.iter().all(|x| x.is_finite())
    }
}

impl fmt::Debug for VecN {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.as_slice()).finish()
    }
}

impl Index<usize> for VecN {
    type Output = f64;
    #[inline]
    fn index(&self, i: usize) -> &f64 {
        &self.as_slice()[i]
    }
}

impl IndexMut<usize> for VecN {
    #[inline]
    fn index_mut(&mut self, i: usize) -> &mut f64 {
        &mut self.as_mut_slice()[i]
    }
}

impl Add for VecN {
    type Output = VecN;
    #[inline]
    fn add(mut self, rhs: VecN) -> VecN {
        self += rhs;
        self
    }
}

impl AddAssign for VecN {
    #[inline]
    fn add_assign(&mut self, rhs: VecN) {
        debug_assert_eq!(self.dim, rhs.dim);
        for k in 0..self.dim as usize {
            self.data[k] += rhs.data[k];
        }
    }
}

impl Sub for VecN {
    type Output = VecN;
    #[inline]
    fn sub(mut self, rhs: VecN) -> VecN {
        self -= rhs;
        self
    }
}

impl SubAssign for VecN {
    #[inline]
    fn sub_assign(&mut self, rhs: VecN) {
        debug_assert_eq!(self.dim, rhs.dim);
        for k in 0..self.dim as usize {
            self.data[k] -= rhs.data[k];
        }
    }
}

impl Mul<f64> for VecN {
    type Output = VecN;
    #[inline]
    fn mul(mut self, s: f64) -> VecN {
        for k in 0..self.dim as usize {
            self.data[k] *= s;
        }
        self
    }
}

impl Neg for VecN {
    type Output = VecN;
    #[inline]
    fn neg(self) -> VecN {
        self * -1.0
    }
}

impl Serialize for VecN {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.as_slice().serialize(s)
    }
}

impl<'de> Deserialize<'de> for VecN {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = Vec::<f64>::deserialize(d)?;
        if v.is_empty() || v.len() > MAX_DIM {
            return Err(serde::de::Error::custom(format!(
                "vector length {} not in 1..={MAX_DIM}",
                v.len()
            )));
        }
        Ok(VecN::from_slice(&v))
    }
}

/// Orthonormal basis of the complement of `normal` by Gram-Schmidt on the
/// standard basis, taken in index order; candidates that collapse are skipped.
///
/// In 2D the single tangent is exactly `normal.perp()`.
pub fn orthonormal_complement(normal: &VecN) -> Vec<VecN> {
    let dim = normal.dim();
    if dim == 2 {
        return vec![normal.perp()];
    }
    let mut basis: Vec<VecN> = Vec::with_capacity(dim - 1);
    for k in 0..dim {
        if basis.len() == dim - 1 {
            break;
        }
        let mut c = VecN::basis(dim, k);
        // two passes keep the result orthogonal when the candidate nearly collapses
        for _ in 0..2 {
            c = c - *normal * c.dot(normal);
            for b in &basis {
                c = c - *b * c.dot(b);
            }
        }
        let n = c.norm();
        if n > 1e-6 {
            basis.push(c * (1.0 / n));
        }
    }
    debug_assert_eq!(basis.len(), dim - 1);
    basis
}
