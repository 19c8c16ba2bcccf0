//! Spin-1/2 chains: geometry of the `A|B` cut, the mixed-field Ising
//! Hamiltonian and single-site Pauli operators.
//!
//! Site 0 is the leftmost tensor factor, i.e. the most significant bit of the
//! basis index, so subsystem `A = {0, .., n_A - 1}` is a contiguous leading
//! factor and a basis index splits as `i = j * d_B + alpha`.

use faer::Mat;

use crate::{Dense, Error, Result, C64};

/// Local dimension of a spin-1/2.
pub const Q: usize = 2;

/// Bare dimensions of a bipartition `d = d_A * d_B`.
///
/// Most evaluators only need the two dimensions, not the chain, so they take
/// a `Cut`; this also allows `d_A = 1` as a degenerate test case.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Cut {
    pub d_a: usize,
    pub d_b: usize,
}

impl Cut {
    pub fn new(d_a: usize, d_b: usize) -> Result<Self> {
        if d_a == 0 || d_b == 0 {
            return Err(Error::InvalidGeometry(format!("empty factor {d_a}x{d_b}")));
        }
        Ok(Self { d_a, d_b })
    }

    pub fn d(&self) -> usize {
        self.d_a * self.d_b
    }

    /// The same cut with the roles of `A` and `B` exchanged.
    pub fn swapped(&self) -> Self {
        Self { d_a: self.d_b, d_b: self.d_a }
    }

    #[inline]
    pub fn index(&self, j: usize, alpha: usize) -> usize {
        j * self.d_b + alpha
    }

    #[inline]
    pub fn split(&self, i: usize) -> (usize, usize) {
        (i / self.d_b, i % self.d_b)
    }
}

/// Chain of `L` spins cut after the first `n_A` sites.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct HilbertGeometry {
    l: usize,
    n_a: usize,
}

impl HilbertGeometry {
    pub fn new(l: usize, n_a: usize) -> Result<Self> {
        if l < 2 {
            return Err(Error::InvalidGeometry(format!("chain of {l} sites")));
        }
        if n_a == 0 || n_a >= l {
            return Err(Error::InvalidGeometry(format!("n_A = {n_a} outside 1..{l}")));
        }
        Ok(Self { l, n_a })
    }

    pub fn l(&self) -> usize {
        self.l
    }

    pub fn n_a(&self) -> usize {
        self.n_a
    }

    pub fn q(&self) -> usize {
        Q
    }

    pub fn d_a(&self) -> usize {
        Q.pow(self.n_a as u32)
    }

    pub fn d_b(&self) -> usize {
        Q.pow((self.l - self.n_a) as u32)
    }

    pub fn d(&self) -> usize {
        Q.pow(self.l as u32)
    }

    /// Number of sites in the doubled subsystem `A ⊗ A'`.
    pub fn doubled_volume(&self) -> usize {
        2 * self.n_a
    }

    pub fn cut(&self) -> Cut {
        Cut { d_a: self.d_a(), d_b: self.d_b() }
    }

    pub fn index(&self, j: usize, alpha: usize) -> usize {
        self.cut().index(j, alpha)
    }

    pub fn split(&self, i: usize) -> (usize, usize) {
        self.cut().split(i)
    }
}

/// Hermitian matrix in the computational (site) basis.
#[derive(Clone, Debug)]
pub struct HermitianOperator {
    data: Dense,
}

impl HermitianOperator {
    /// Relative Hermiticity tolerance applied on construction.
    pub const TOL: f64 = 1e-12;

    pub fn new(data: Dense) -> Result<Self> {
        if data.nrows() != data.ncols() {
            return Err(Error::DimensionMismatch { expected: data.nrows(), got: data.ncols() });
        }
        let residual = data.hermiticity_residual();
        let bound = Self::TOL * data.frobenius_sq().sqrt().max(1.0);
        if residual > bound {
            return Err(Error::NotHermitian { residual, bound });
        }
        Ok(Self { data })
    }

    pub fn from_real(m: Mat<f64>) -> Result<Self> {
        Self::new(Dense::Real(m))
    }

    pub fn from_complex(m: Mat<C64>) -> Result<Self> {
        Self::new(Dense::Complex(m))
    }

    pub fn dim(&self) -> usize {
        self.data.nrows()
    }

    pub fn data(&self) -> &Dense {
        &self.data
    }

    pub fn into_data(self) -> Dense {
        self.data
    }

    pub fn is_real(&self) -> bool {
        self.data.is_real()
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.data.get(i, j)
    }

    pub fn to_complex(&self) -> Mat<C64> {
        self.data.to_complex()
    }

    pub fn trace(&self) -> f64 {
        self.data.trace().re
    }

    /// Infinite-temperature norm `Tr(O†O)/d`.
    pub fn normalized_norm_sq(&self) -> f64 {
        self.data.frobenius_sq() / self.dim() as f64
    }
}

/// Couplings of the mixed-field Ising chain
/// `H = J Σ σz σz + Σ (h_z σz + h_x σx) + g_0 σz_0 + g_l σz_{L-1}`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MfimParams {
    pub j: f64,
    pub h_x: f64,
    pub h_z: f64,
    pub g_0: f64,
    pub g_l: f64,
}

impl MfimParams {
    /// The strongly chaotic point used throughout the benchmarks.
    pub const CHAOTIC: Self = Self { j: 1.0, h_x: 1.1, h_z: 0.3, g_0: 0.25, g_l: -0.25 };

    /// Integrable comparison point (`h_z = g_0 = g_l = 0`).
    pub const INTEGRABLE: Self = Self { j: 1.0, h_x: 1.1, h_z: 0.0, g_0: 0.0, g_l: 0.0 };
}

impl Default for MfimParams {
    fn default() -> Self {
        Self::CHAOTIC
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum PauliAxis {
    X,
    Y,
    Z,
}

impl std::str::FromStr for PauliAxis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "x" | "X" => Ok(PauliAxis::X),
            "y" | "Y" => Ok(PauliAxis::Y),
            "z" | "Z" => Ok(PauliAxis::Z),
            other => Err(Error::InvalidArgument(format!("unknown Pauli axis {other:?}"))),
        }
    }
}

#[inline]
fn site_mask(l: usize, site: usize) -> usize {
    1 << (l - 1 - site)
}

/// `+1` for spin up (bit 0), `-1` for spin down.
#[inline]
fn z_value(i: usize, mask: usize) -> f64 {
    if i & mask == 0 {
        1.0
    } else {
        -1.0
    }
}

fn check_chain(l: usize) -> Result<()> {
    if l < 2 {
        return Err(Error::InvalidGeometry(format!("chain of {l} sites")));
    }
    if l > 24 {
        return Err(Error::InvalidGeometry(format!("dense chain of {l} sites does not fit in memory")));
    }
    Ok(())
}

/// Dense mixed-field Ising Hamiltonian with open boundaries.
pub fn build_mfim(l: usize, p: MfimParams) -> Result<HermitianOperator> {
    check_chain(l)?;
    let d = 1usize << l;
    let mut h = Mat::<f64>::zeros(d, d);
    for i in 0..d {
        let mut diag = 0.0;
        for s in 0..l {
            let z = z_value(i, site_mask(l, s));
            diag += p.h_z * z;
            if s + 1 < l {
                diag += p.j * z * z_value(i, site_mask(l, s + 1));
            }
        }
        diag += p.g_0 * z_value(i, site_mask(l, 0));
        diag += p.g_l * z_value(i, site_mask(l, l - 1));
        h[(i, i)] = diag;
        for s in 0..l {
            h[(i ^ site_mask(l, s), i)] += p.h_x;
        }
    }
    HermitianOperator::from_real(h)
}

/// Pauli matrix on `site`, identity elsewhere.
pub fn build_site_pauli(l: usize, site: usize, axis: PauliAxis) -> Result<HermitianOperator> {
    check_chain(l)?;
    if site >= l {
        return Err(Error::InvalidGeometry(format!("site {site} outside chain of {l}")));
    }
    let d = 1usize << l;
    let mask = site_mask(l, site);
    let data = match axis {
        PauliAxis::X => Dense::Real(Mat::from_fn(d, d, |i, j| if i == j ^ mask { 1.0 } else { 0.0 })),
        PauliAxis::Z => Dense::Real(Mat::from_fn(d, d, |i, j| if i == j { z_value(i, mask) } else { 0.0 })),
        // <0|σy|1> = -i, <1|σy|0> = +i
        PauliAxis::Y => Dense::Complex(Mat::from_fn(d, d, |i, j| {
            if i != j ^ mask {
                C64::new(0.0, 0.0)
            } else if i & mask == 0 {
                C64::new(0.0, -1.0)
            } else {
                C64::new(0.0, 1.0)
            }
        })),
    };
    HermitianOperator::new(data)
}

/// Site carrying the probe operator: `L/2` for even and `(L-1)/2` for odd chains.
pub fn center_site(l: usize) -> usize {
    l / 2
}

#[cfg(test)]
mod tests {
    use super::*;

    fn eigenvalues(h: &HermitianOperator) -> Vec<f64> {
        let m = h.to_complex();
        let mut e: Vec<f64> = m.self_adjoint_eigenvalues(faer::Side::Lower).unwrap();
        e.sort_by(|a, b| a.partial_cmp(b).unwrap());
        e
    }

    #[test]
    fn zz_spectrum() {
        let h = build_mfim(2, MfimParams { j: 1.0, h_x: 0.0, h_z: 0.0, g_0: 0.0, g_l: 0.0 }).unwrap();
        let e = eigenvalues(&h);
        for (x, y) in e.iter().zip([-1.0, -1.0, 1.0, 1.0]) {
            assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn free_transverse_field_spectrum() {
        let h = build_mfim(3, MfimParams { j: 0.0, h_x: 1.0, h_z: 0.0, g_0: 0.0, g_l: 0.0 }).unwrap();
        let e = eigenvalues(&h);
        for (x, y) in e.iter().zip([-3.0, -1.0, -1.0, -1.0, 1.0, 1.0, 1.0, 3.0]) {
            assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn chaotic_chain_is_real_symmetric() {
        let h = build_mfim(6, MfimParams::CHAOTIC).unwrap();
        assert!(h.is_real());
        assert_eq!(h.data().hermiticity_residual(), 0.0);
    }

    #[test]
    fn pauli_norms_and_traces() {
        let o = build_site_pauli(4, 2, PauliAxis::X).unwrap();
        assert!((o.normalized_norm_sq() - 1.0).abs() < 1e-15);
        for axis in [PauliAxis::X, PauliAxis::Y, PauliAxis::Z] {
            for site in 0..3 {
                let o = build_site_pauli(3, site, axis).unwrap();
                assert_eq!(o.trace(), 0.0);
                assert!((o.normalized_norm_sq() - 1.0).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn leftmost_site_is_leading_factor() {
        // σx ⊗ I on two sites
        let o = build_site_pauli(2, 0, PauliAxis::X).unwrap();
        let expect = [[0., 0., 1., 0.], [0., 0., 0., 1.], [1., 0., 0., 0.], [0., 1., 0., 0.]];
        for (i, row) in expect.iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                assert_eq!(o.get(i, j), C64::new(v, 0.0));
            }
        }
    }

    #[test]
    fn center_sites() {
        assert_eq!(center_site(6), 3);
        assert_eq!(center_site(7), 3);
        assert_eq!(center_site(2), 1);
    }

    #[test]
    fn geometry_rejects_bad_cuts() {
        assert!(HilbertGeometry::new(1, 0).is_err());
        assert!(HilbertGeometry::new(4, 0).is_err());
        assert!(HilbertGeometry::new(4, 4).is_err());
        assert!(build_mfim(1, MfimParams::CHAOTIC).is_err());
        assert!(build_site_pauli(3, 3, PauliAxis::X).is_err());
    }
}
