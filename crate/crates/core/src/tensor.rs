//! Dense rank-4 f64 tensors, row-major (N, C, H, W).
//!
//! Matrices ride along as (rows, cols, 1, 1); scalars as (1, 1, 1, 1).
//! Gradients are not stored here — the [`crate::tape::Tape`] keeps a
//! same-length gradient buffer per recorded tensor.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::Error;
use crate::rng::Rng;

#[derive(Clone, Debug, PartialEq)]
pub struct Tensor {
    dims: [usize; 4],
    data: Vec<f64>,
}

impl Tensor {
    /// Build from dims and row-major data. Dims must be positive and
    /// their product must equal `data.len()`.
    pub fn new(dims: [usize; 4], data: Vec<f64>) -> Result<Self, Error> {
        if dims.contains(&0) {
            return Err(Error::Config {
                op: "tensor",
                msg: alloc::format!("zero dimension in {dims:?}"),
            });
        }
        let n = dims.iter().product::<usize>();
        if n != data.len() {
            return Err(Error::Config {
                op: "tensor",
                msg: alloc::format!("dims {dims:?} need {n} values, got {}", data.len()),
            });
        }
        Ok(Tensor { dims, data })
    }

    pub fn zeros(dims: [usize; 4]) -> Self {
        let n = dims.iter().product::<usize>();
        assert!(dims.iter().all(|&d| d > 0), "zero dimension in {dims:?}");
        Tensor {
            dims,
            data: vec![0.0; n],
        }
    }

    pub fn full(dims: [usize; 4], value: f64) -> Self {
        let mut t = Tensor::zeros(dims);
        t.data.fill(value);
        t
    }

    pub fn scalar(value: f64) -> Self {
        Tensor {
            dims: [1, 1, 1, 1],
            data: vec![value],
        }
    }

    /// Matrix constructor: (rows, cols, 1, 1).
    pub fn matrix(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self, Error> {
        Tensor::new([rows, cols, 1, 1], data)
    }

    pub fn from_fn(dims: [usize; 4], f: impl FnMut(usize) -> f64) -> Self {
        let n = dims.iter().product::<usize>();
        assert!(dims.iter().all(|&d| d > 0), "zero dimension in {dims:?}");
        Tensor {
            dims,
            data: (0..n).map(f).collect(),
        }
    }

    /// Uniform in [-scale, scale] from the given stream.
    pub fn random_uniform(dims: [usize; 4], scale: f64, rng: &mut Rng) -> Self {
        Tensor::from_fn(dims, |_| rng.uniform_in(-scale, scale))
    }

    #[inline]
    pub fn dims(&self) -> [usize; 4] {
        self.dims
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.data.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    #[inline]
    pub fn data(&self) -> &[f64] {
        &self.data
    }

    #[inline]
    pub fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn into_data(self) -> Vec<f64> {
        self.data
    }

    #[inline]
    pub fn at(&self, n: usize, c: usize, h: usize, w: usize) -> f64 {
        self.data[self.offset(n, c, h, w)]
    }

    #[inline]
    pub fn offset(&self, n: usize, c: usize, h: usize, w: usize) -> usize {
        debug_assert!(n < self.dims[0] && c < self.dims[1] && h < self.dims[2] && w < self.dims[3]);
        ((n * self.dims[1] + c) * self.dims[2] + h) * self.dims[3] + w
    }

    /// Rows of the matrix view; panics unless H = W = 1.
    #[inline]
    pub fn rows(&self) -> usize {
        assert!(
            self.dims[2] == 1 && self.dims[3] == 1,
            "matrix view on non-matrix dims {:?}",
            self.dims
        );
        self.dims[0]
    }

    /// Cols of the matrix view; panics unless H = W = 1.
    #[inline]
    pub fn cols(&self) -> usize {
        assert!(
            self.dims[2] == 1 && self.dims[3] == 1,
            "matrix view on non-matrix dims {:?}",
            self.dims
        );
        self.dims[1]
    }

    #[inline]
    pub fn row(&self, r: usize) -> &[f64] {
        let c = self.cols();
        &self.data[r * c..(r + 1) * c]
    }

    pub fn is_scalar(&self) -> bool {
        self.data.len() == 1
    }

    pub fn all_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    /// Max |a - b| over elements; shapes must match.
    pub fn max_abs_diff(&self, other: &Tensor) -> f64 {
        assert_eq!(self.dims, other.dims, "max_abs_diff shape mismatch");
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| crate::fmath::abs(a - b))
            .fold(0.0, f64::max)
    }
}

/// Dot product with four-lane accumulation. The summation order is
/// fixed (lane-major), so results are deterministic run to run.
#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    let mut acc = [0.0f64; 4];
    let chunks = a.len() / 4;
    for i in 0..chunks {
        let j = i * 4;
        acc[0] += a[j] * b[j];
        acc[1] += a[j + 1] * b[j + 1];
        acc[2] += a[j + 2] * b[j + 2];
        acc[3] += a[j + 3] * b[j + 3];
    }
    let mut tail = 0.0;
    for j in chunks * 4..a.len() {
        tail += a[j] * b[j];
    }
    (acc[0] + acc[1]) + (acc[2] + acc[3]) + tail
}

/// y += c * x, elementwise.
#[inline]
pub fn axpy(y: &mut [f64], c: f64, x: &[f64]) {
    debug_assert_eq!(y.len(), x.len());
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += c * xi;
    }
}
