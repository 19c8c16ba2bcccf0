use faer::Mat;

use crate::C64;

/// Dense square matrix stored as real when possible.
///
/// The mixed-field Ising Hamiltonian, its eigenvectors and the `x`/`z` Pauli
/// operators are all real. Keeping them real halves the memory and cuts the
/// cost of eigensolves and basis rotations by roughly four, which is what
/// makes `L = 12` feasible on a laptop.
#[derive(Clone, Debug)]
pub enum Dense {
    Real(Mat<f64>),
    Complex(Mat<C64>),
}

impl Dense {
    pub fn nrows(&self) -> usize {
        match self {
            Dense::Real(m) => m.nrows(),
            Dense::Complex(m) => m.nrows(),
        }
    }

    pub fn ncols(&self) -> usize {
        match self {
            Dense::Real(m) => m.ncols(),
            Dense::Complex(m) => m.ncols(),
        }
    }

    pub fn is_real(&self) -> bool {
        matches!(self, Dense::Real(_))
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> C64 {
        match self {
            Dense::Real(m) => C64::new(m[(i, j)], 0.0),
            Dense::Complex(m) => m[(i, j)],
        }
    }

    pub fn to_complex(&self) -> Mat<C64> {
        match self {
            Dense::Real(m) => Mat::from_fn(m.nrows(), m.ncols(), |i, j| C64::new(m[(i, j)], 0.0)),
            Dense::Complex(m) => m.clone(),
        }
    }

    /// Copies the block `rows × cols` into a complex matrix.
    pub fn block(&self, rows: std::ops::Range<usize>, cols: std::ops::Range<usize>) -> Mat<C64> {
        let (r0, c0) = (rows.start, cols.start);
        Mat::from_fn(rows.len(), cols.len(), |i, j| self.get(r0 + i, c0 + j))
    }

    pub fn frobenius_sq(&self) -> f64 {
        match self {
            Dense::Real(m) => m.squared_norm_l2(),
            Dense::Complex(m) => m.squared_norm_l2(),
        }
    }

    pub fn trace(&self) -> C64 {
        (0..self.nrows().min(self.ncols())).map(|i| self.get(i, i)).sum()
    }

    /// `‖A − A†‖_F`.
    pub fn hermiticity_residual(&self) -> f64 {
        let n = self.nrows();
        let mut acc = 0.0;
        for j in 0..n {
            for i in 0..n {
                acc += (self.get(i, j) - self.get(j, i).conj()).norm_sqr();
            }
        }
        acc.sqrt()
    }
}
