//! Abstraction over symmetric linear operators applied via matvecs.

/// A symmetric linear operator on vectors of a fixed length. Symmetry is a
/// caller contract; the iterative routines built on top of this trait do not
/// verify it.
pub trait LinearOperator {
    fn dim(&self) -> usize;
    /// y = A x. `x` and `y` have length `dim()`.
    fn apply(&self, x: &[f64], y: &mut [f64]);
}

/// Wraps a closure as an operator.
pub struct FnOperator<F: Fn(&[f64], &mut [f64])> {
    dim: usize,
    f: F,
}

impl<F: Fn(&[f64], &mut [f64])> FnOperator<F> {
    pub fn new(dim: usize, f: F) -> Self {
        Self { dim, f }
    }
}

impl<F: Fn(&[f64], &mut [f64])> LinearOperator for FnOperator<F> {
    fn dim(&self) -> usize {
        self.dim
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        (self.f)(x, y)
    }
}
