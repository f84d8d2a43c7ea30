use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;

use super::lattice::{BoxShape, LatticeSpec};
use crate::error::{Error, Result};

/// Complex Fourier coefficients on a cube `|j|_inf <= extent`.
///
/// `extent` equals `spec.k_max` for freshly built fields and grows under
/// exact products; `spec` is the base lattice shared by every field of one
/// computation.
#[derive(Clone, Debug, PartialEq)]
pub struct FourierField {
    spec: LatticeSpec,
    extent: usize,
    coeffs: Vec<Complex64>,
}

impl FourierField {
    pub fn zeros(spec: LatticeSpec) -> Self {
        Self::zeros_with_extent(spec, spec.k_max)
    }

    pub fn zeros_with_extent(spec: LatticeSpec, extent: usize) -> Self {
        let len = BoxShape::new(spec.dim, extent).len();
        Self {
            spec,
            extent,
            coeffs: vec![Complex64::default(); len],
        }
    }

    /// Builds a field from raw coefficients in storage order.
    pub fn from_coeffs(spec: LatticeSpec, extent: usize, coeffs: Vec<Complex64>) -> Self {
        assert_eq!(coeffs.len(), BoxShape::new(spec.dim, extent).len());
        Self {
            spec,
            extent,
            coeffs,
        }
    }

    /// Field on the base lattice with the given sparse coefficients, zero elsewhere.
    pub fn from_entries<I, J>(spec: LatticeSpec, entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (J, Complex64)>,
        J: AsRef<[i64]>,
    {
        let mut field = Self::zeros(spec);
        let shape = field.shape();
        for (j, value) in entries {
            let j = j.as_ref();
            if j.len() != spec.dim {
                return Err(Error::DimensionMismatch {
                    index: j.to_vec(),
                    got: j.len(),
                    expected: spec.dim,
                });
            }
            let idx = shape.index_of(j).ok_or_else(|| Error::OutOfLattice {
                index: j.to_vec(),
                extent: spec.k_max,
            })?;
            field.coeffs[idx] = value;
        }
        Ok(field)
    }

    /// Field on the base lattice with coefficient `f(j)` at every `j`.
    pub fn from_fn(spec: LatticeSpec, f: impl FnMut(&[i64]) -> Complex64) -> Self {
        Self::from_fn_with_extent(spec, spec.k_max, f)
    }

    pub fn from_fn_with_extent(
        spec: LatticeSpec,
        extent: usize,
        mut f: impl FnMut(&[i64]) -> Complex64,
    ) -> Self {
        let shape = BoxShape::new(spec.dim, extent);
        let mut p = vec![0i64; spec.dim];
        let coeffs = (0..shape.len())
            .map(|idx| {
                shape.point_into(idx, &mut p);
                f(&p)
            })
            .collect();
        Self {
            spec,
            extent,
            coeffs,
        }
    }

    /// `amplitude * exp(i j . x)`.
    pub fn mode(spec: LatticeSpec, j: &[i64], amplitude: Complex64) -> Result<Self> {
        Self::from_entries(spec, [(j, amplitude)])
    }

    pub fn spec(&self) -> &LatticeSpec {
        &self.spec
    }

    pub fn dim(&self) -> usize {
        self.spec.dim
    }

    pub fn extent(&self) -> usize {
        self.extent
    }

    pub fn shape(&self) -> BoxShape {
        BoxShape::new(self.spec.dim, self.extent)
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [Complex64] {
        &mut self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Complex64> {
        self.coeffs
    }

    /// Coefficient at `j`; zero outside the stored cube.
    pub fn get(&self, j: &[i64]) -> Complex64 {
        self.shape()
            .index_of(j)
            .map(|i| self.coeffs[i])
            .unwrap_or_default()
    }

    /// Iterator over `(j, coefficient)` for nonzero coefficients.
    pub fn nonzero(&self) -> impl Iterator<Item = (Vec<i64>, Complex64)> + '_ {
        let shape = self.shape();
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| **c != Complex64::default())
            .map(move |(i, c)| (shape.point(i), *c))
    }

    /// Same coefficients stored on a cube of a different extent. Shrinking
    /// drops every mode outside the new cube.
    pub fn with_extent(&self, extent: usize) -> Self {
        if extent == self.extent {
            return self.clone();
        }
        let target = BoxShape::new(self.spec.dim, extent);
        let source = self.shape();
        let mut out = Self::zeros_with_extent(self.spec, extent);
        let mut p = vec![0i64; self.spec.dim];
        if extent > self.extent {
            for (i, c) in self.coeffs.iter().enumerate() {
                source.point_into(i, &mut p);
                out.coeffs[target.index_of(&p).unwrap()] = *c;
            }
        } else {
            for (i, c) in out.coeffs.iter_mut().enumerate() {
                target.point_into(i, &mut p);
                *c = self.coeffs[source.index_of(&p).unwrap()];
            }
        }
        out
    }

    /// Drops every stored cube entry that is identically zero beyond the
    /// smallest enclosing cube.
    pub fn trimmed(&self) -> Self {
        let shape = self.shape();
        let mut p = vec![0i64; self.spec.dim];
        let mut needed = 0usize;
        for (i, c) in self.coeffs.iter().enumerate() {
            if *c != Complex64::default() {
                shape.point_into(i, &mut p);
                let m = p.iter().map(|c| c.unsigned_abs() as usize).max().unwrap_or(0);
                needed = needed.max(m);
            }
        }
        self.with_extent(needed)
    }

    /// Restriction to the base lattice `|j|_inf <= K`.
    pub fn to_base(&self) -> Self {
        self.with_extent(self.spec.k_max)
    }

    /// Coefficients of the pointwise complex conjugate: `conj(c(-j))`.
    pub fn conj(&self) -> Self {
        let n = self.coeffs.len();
        let coeffs = (0..n).map(|i| self.coeffs[n - 1 - i].conj()).collect();
        Self {
            spec: self.spec,
            extent: self.extent,
            coeffs,
        }
    }

    /// True when `c(-j) = conj(c(j))` for all `j` within `tol`.
    pub fn is_real_valued(&self, tol: f64) -> bool {
        let n = self.coeffs.len();
        (0..n).all(|i| (self.coeffs[n - 1 - i] - self.coeffs[i].conj()).norm() <= tol)
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        self.map(|_, c| c * factor)
    }

    /// Coefficientwise map `c(j) -> f(j, c(j))`.
    pub fn map(&self, mut f: impl FnMut(&[i64], Complex64) -> Complex64) -> Self {
        let shape = self.shape();
        let mut p = vec![0i64; self.spec.dim];
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| {
                shape.point_into(i, &mut p);
                f(&p, *c)
            })
            .collect();
        Self {
            spec: self.spec,
            extent: self.extent,
            coeffs,
        }
    }

    pub fn ensure_same_spec(&self, other: &Self) -> Result<()> {
        if self.spec != other.spec {
            return Err(Error::SpecMismatch {
                left: self.spec.to_string(),
                right: other.spec.to_string(),
            });
        }
        Ok(())
    }

    fn combine(&self, other: &Self, f: impl Fn(Complex64, Complex64) -> Complex64) -> Self {
        assert_eq!(
            self.spec, other.spec,
            "combining fields on different lattices"
        );
        let extent = self.extent.max(other.extent);
        let a = self.with_extent(extent);
        let b = other.with_extent(extent);
        let coeffs = a
            .coeffs
            .iter()
            .zip(&b.coeffs)
            .map(|(x, y)| f(*x, *y))
            .collect();
        Self {
            spec: self.spec,
            extent,
            coeffs,
        }
    }

    /// `sum_j |c(j)|^2`.
    pub fn l2_sq(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum()
    }

    /// Largest coefficient modulus.
    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }
}

impl Add for &FourierField {
    type Output = FourierField;
    fn add(self, rhs: &FourierField) -> FourierField {
        self.combine(rhs, |a, b| a + b)
    }
}

impl Sub for &FourierField {
    type Output = FourierField;
    fn sub(self, rhs: &FourierField) -> FourierField {
        self.combine(rhs, |a, b| a - b)
    }
}

impl Neg for &FourierField {
    type Output = FourierField;
    fn neg(self) -> FourierField {
        self.map(|_, c| -c)
    }
}

impl Mul<f64> for &FourierField {
    type Output = FourierField;
    fn mul(self, rhs: f64) -> FourierField {
        self.map(|_, c| c * rhs)
    }
}

impl Mul<Complex64> for &FourierField {
    type Output = FourierField;
    fn mul(self, rhs: Complex64) -> FourierField {
        self.scale(rhs)
    }
}

/// Relative l2 distance `|a - b| / max(|b|, tiny)`.
pub fn relative_error(a: &FourierField, b: &FourierField) -> f64 {
    let diff = (a - b).l2_sq().sqrt();
    let reference = b.l2_sq().sqrt();
    if reference == 0.0 {
        diff
    } else {
        diff / reference
    }
}
