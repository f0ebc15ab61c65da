//! Dense square complex matrices and a Hermitian eigensolver.
//!
//! Every matrix in the simulator is small (dimension 3 to 9), so the
//! representation is a plain row-major `Vec` and the eigensolver is a cyclic
//! complex Jacobi iteration. Jacobi keeps the accumulated eigenvector matrix
//! unitary to machine precision, which is what makes the propagators exactly
//! unitary up to roundoff.

use crate::error::{Error, Result};
use crate::scalar::{cis, norm_sqr, Scalar, C};

/// Dense square complex matrix, row-major storage.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexMatrix<T> {
    dim: usize,
    data: Vec<C<T>>,
}

impl<T: Scalar> ComplexMatrix<T> {
    pub fn zeros(dim: usize) -> Self {
        Self { dim, data: vec![C::new(T::zero(), T::zero()); dim * dim] }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.set(i, i, C::new(T::one(), T::zero()));
        }
        m
    }

    /// Build from a row-major closure.
    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> C<T>) -> Self {
        let mut m = Self::zeros(dim);
        for r in 0..dim {
            for c in 0..dim {
                m.set(r, c, f(r, c));
            }
        }
        m
    }

    /// Build from rows of real entries (convenience for ideal gates and tests).
    pub fn from_real_rows(rows: &[&[f64]]) -> Self {
        let dim = rows.len();
        let mut m = Self::zeros(dim);
        for (r, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), dim, "ragged rows");
            for (c, &x) in row.iter().enumerate() {
                m.set(r, c, C::new(T::cst(x), T::zero()));
            }
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> C<T> {
        self.data[r * self.dim + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: C<T>) {
        self.data[r * self.dim + c] = v;
    }

    pub fn entries(&self) -> &[C<T>] {
        &self.data
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch");
        let n = self.dim;
        let mut out = Self::zeros(n);
        for r in 0..n {
            for k in 0..n {
                let a = self.get(r, k);
                if a.re == T::zero() && a.im == T::zero() {
                    continue;
                }
                for c in 0..n {
                    let v = out.get(r, c) + a * rhs.get(k, c);
                    out.set(r, c, v);
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[C<T>]) -> Vec<C<T>> {
        assert_eq!(self.dim, v.len(), "dimension mismatch");
        let n = self.dim;
        let mut out = vec![C::new(T::zero(), T::zero()); n];
        for r in 0..n {
            let mut acc = C::new(T::zero(), T::zero());
            for c in 0..n {
                acc = acc + self.get(r, c) * v[c];
            }
            out[r] = acc;
        }
        out
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.dim, |r, c| self.get(c, r).conj())
    }

    pub fn scaled(&self, z: C<T>) -> Self {
        Self { dim: self.dim, data: self.data.iter().map(|&a| a * z).collect() }
    }

    pub fn add(&self, rhs: &Self) -> Self {
        assert_eq!(self.dim, rhs.dim);
        Self {
            dim: self.dim,
            data: self.data.iter().zip(&rhs.data).map(|(&a, &b)| a + b).collect(),
        }
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        assert_eq!(self.dim, rhs.dim);
        Self {
            dim: self.dim,
            data: self.data.iter().zip(&rhs.data).map(|(&a, &b)| a - b).collect(),
        }
    }

    /// Scale rows by diagonal phases: `diag(d) * M`.
    pub fn row_scaled(&self, d: &[C<T>]) -> Self {
        assert_eq!(self.dim, d.len());
        Self::from_fn(self.dim, |r, c| d[r] * self.get(r, c))
    }

    /// Scale columns by diagonal phases: `M * diag(d)`.
    pub fn col_scaled(&self, d: &[C<T>]) -> Self {
        assert_eq!(self.dim, d.len());
        Self::from_fn(self.dim, |r, c| self.get(r, c) * d[c])
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> T {
        self.data.iter().fold(T::zero(), |m, z| m.max(z.norm()))
    }

    /// Largest entrywise difference `max |a_ij - b_ij|`.
    pub fn max_abs_diff(&self, rhs: &Self) -> T {
        assert_eq!(self.dim, rhs.dim);
        self.data
            .iter()
            .zip(&rhs.data)
            .fold(T::zero(), |m, (&a, &b)| m.max((a - b).norm()))
    }

    pub fn frobenius_norm(&self) -> T {
        self.data.iter().map(|z| norm_sqr(*z)).sum::<T>().sqrt()
    }

    /// `max |a_ij - conj(a_ji)|`.
    pub fn hermiticity_deviation(&self) -> T {
        let mut dev = T::zero();
        for r in 0..self.dim {
            for c in r..self.dim {
                dev = dev.max((self.get(r, c) - self.get(c, r).conj()).norm());
            }
        }
        dev
    }

    /// `max |(U^† U - I)_ij|`.
    pub fn unitarity_deviation(&self) -> T {
        self.adjoint().mul(self).max_abs_diff(&Self::identity(self.dim))
    }

    fn off_diagonal_norm(&self) -> T {
        let mut s = T::zero();
        for r in 0..self.dim {
            for c in 0..self.dim {
                if r != c {
                    s += norm_sqr(self.get(r, c));
                }
            }
        }
        s.sqrt()
    }
}

/// Eigendecomposition of a Hermitian matrix: `H = V diag(values) V^†`,
/// eigenvalues ascending, eigenvectors in the columns of `vectors`.
#[derive(Clone, Debug)]
pub struct HermitianEigen<T> {
    pub values: Vec<T>,
    pub vectors: ComplexMatrix<T>,
}

const MAX_JACOBI_SWEEPS: usize = 64;

/// Cyclic complex Jacobi eigensolver for Hermitian matrices.
///
/// The caller is responsible for Hermiticity; entries above the diagonal are
/// taken as authoritative and the iteration keeps the working copy exactly
/// Hermitian.
pub fn eigh<T: Scalar>(h: &ComplexMatrix<T>) -> Result<HermitianEigen<T>> {
    let n = h.dim();
    let mut a = h.clone();
    let mut v = ComplexMatrix::identity(n);
    if n <= 1 {
        return Ok(HermitianEigen {
            values: (0..n).map(|i| a.get(i, i).re).collect(),
            vectors: v,
        });
    }
    let scale = a.frobenius_norm().max(T::min_positive_value());
    let stop = scale * T::epsilon() * T::cst(4.0);
    let skip = stop * T::cst(1.0e-2);

    let mut converged = false;
    for _ in 0..MAX_JACOBI_SWEEPS {
        if a.off_diagonal_norm() <= stop {
            converged = true;
            break;
        }
        for p in 0..n - 1 {
            for q in p + 1..n {
                let apq = a.get(p, q);
                let b = apq.norm();
                if b <= skip {
                    continue;
                }
                // Unitary 2x2 rotation annihilating a_pq. With
                // apq = b e^{i phi}, tan(2 theta) = 2 b / (a_pp - a_qq).
                let phase = apq / C::new(b, T::zero());
                let app = a.get(p, p).re;
                let aqq = a.get(q, q).re;
                let tau = (app - aqq) / (b + b);
                let t = {
                    let denom = tau.abs() + (T::one() + tau * tau).sqrt();
                    if tau < T::zero() {
                        -(denom.recip())
                    } else {
                        denom.recip()
                    }
                };
                let c = (T::one() + t * t).sqrt().recip();
                let s = t * c;
                let cs = C::new(c, T::zero());
                let s_phase = phase * C::new(s, T::zero());

                for k in 0..n {
                    if k == p || k == q {
                        continue;
                    }
                    let akp = a.get(k, p);
                    let akq = a.get(k, q);
                    let nkp = akp * cs + akq * s_phase.conj();
                    let nkq = akq * cs - akp * s_phase;
                    a.set(k, p, nkp);
                    a.set(p, k, nkp.conj());
                    a.set(k, q, nkq);
                    a.set(q, k, nkq.conj());
                }
                let two = T::cst(2.0);
                let napp = app * c * c + two * b * c * s + aqq * s * s;
                let naqq = app * s * s - two * b * c * s + aqq * c * c;
                a.set(p, p, C::new(napp, T::zero()));
                a.set(q, q, C::new(naqq, T::zero()));
                a.set(p, q, C::new(T::zero(), T::zero()));
                a.set(q, p, C::new(T::zero(), T::zero()));

                for k in 0..n {
                    let vkp = v.get(k, p);
                    let vkq = v.get(k, q);
                    v.set(k, p, vkp * cs + vkq * s_phase.conj());
                    v.set(k, q, vkq * cs - vkp * s_phase);
                }
            }
        }
    }
    if !converged && a.off_diagonal_norm() > stop {
        return Err(Error::ConvergenceFailure {
            steps: MAX_JACOBI_SWEEPS,
            last_delta: a.off_diagonal_norm().as_f64(),
        });
    }

    let mut order: Vec<usize> = (0..n).collect();
    let diag: Vec<T> = (0..n).map(|i| a.get(i, i).re).collect();
    order.sort_by(|&i, &j| diag[i].partial_cmp(&diag[j]).expect("NaN eigenvalue"));
    let values = order.iter().map(|&i| diag[i]).collect();
    let vectors = ComplexMatrix::from_fn(n, |r, c| v.get(r, order[c]));
    Ok(HermitianEigen { values, vectors })
}

impl<T: Scalar> HermitianEigen<T> {
    /// Unitary `exp(-i t H)` rebuilt from the decomposition.
    pub fn propagator(&self, t: T) -> ComplexMatrix<T> {
        let phases: Vec<C<T>> = self.values.iter().map(|&l| cis(-(l * t))).collect();
        self.vectors.col_scaled(&phases).mul(&self.vectors.adjoint())
    }

    /// Apply `exp(-i t H)` to a state without forming the full matrix.
    pub fn evolve_vec(&self, t: T, psi: &[C<T>]) -> Vec<C<T>> {
        let coeffs = self.vectors.adjoint().mul_vec(psi);
        let rotated: Vec<C<T>> = coeffs
            .iter()
            .zip(&self.values)
            .map(|(&c, &l)| c * cis(-(l * t)))
            .collect();
        self.vectors.mul_vec(&rotated)
    }
}

/// `exp(-i t H)` for a Hermitian `H`.
pub fn expm_hermitian<T: Scalar>(h: &ComplexMatrix<T>, t: T) -> Result<ComplexMatrix<T>> {
    Ok(eigh(h)?.propagator(t))
}

/// Frobenius inner product `Tr(A^dagger B)`.
pub fn frobenius_inner<T: Scalar>(a: &ComplexMatrix<T>, b: &ComplexMatrix<T>) -> C<T> {
    assert_eq!(a.dim(), b.dim());
    a.data
        .iter()
        .zip(&b.data)
        .fold(C::new(T::zero(), T::zero()), |acc, (&x, &y)| acc + x.conj() * y)
}

/// 2-norm of a complex vector.
pub fn vec_norm<T: Scalar>(v: &[C<T>]) -> T {
    v.iter().map(|z| norm_sqr(*z)).sum::<T>().sqrt()
}

/// Inner product `<a|b>` (conjugate-linear in the first argument).
pub fn inner<T: Scalar>(a: &[C<T>], b: &[C<T>]) -> C<T> {
    a.iter()
        .zip(b)
        .fold(C::new(T::zero(), T::zero()), |acc, (&x, &y)| acc + x.conj() * y)
}

/// Largest componentwise difference between two vectors.
pub fn vec_max_abs_diff<T: Scalar>(a: &[C<T>], b: &[C<T>]) -> T {
    a.iter()
        .zip(b)
        .fold(T::zero(), |m, (&x, &y)| m.max((x - y).norm()))
}

#[cfg(test)]
mod tests {
    use super::*;

    type M = ComplexMatrix<f64>;

    fn random_hermitian(n: usize, seed: u64) -> M {
        // deterministic pseudo-random entries; a simple LCG is enough here
        let mut state = seed.wrapping_mul(6364136223846793005).wrapping_add(1);
        let mut next = move || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((state >> 11) as f64 / (1u64 << 53) as f64) * 2.0 - 1.0
        };
        let mut m = M::zeros(n);
        for r in 0..n {
            m.set(r, r, C::new(next(), 0.0));
            for c in r + 1..n {
                let z = C::new(next(), next());
                m.set(r, c, z);
                m.set(c, r, z.conj());
            }
        }
        m
    }

    #[test]
    fn eigh_reconstructs_and_is_orthonormal() {
        for n in 2..=9 {
            let h = random_hermitian(n, 42 + n as u64);
            let e = eigh(&h).unwrap();
            assert!(e.vectors.unitarity_deviation() < 1e-13);
            for k in 0..n {
                let col: Vec<C<f64>> = (0..n).map(|r| e.vectors.get(r, k)).collect();
                let hv = h.mul_vec(&col);
                let lv: Vec<C<f64>> = col.iter().map(|&z| z * e.values[k]).collect();
                assert!(vec_max_abs_diff(&hv, &lv) < 1e-12 * h.max_abs().max(1.0));
            }
        }
    }

    #[test]
    fn propagator_is_unitary_and_reduces_to_identity() {
        let h = random_hermitian(6, 7);
        let e = eigh(&h).unwrap();
        let u = e.propagator(0.73);
        assert!(u.unitarity_deviation() < 1e-13);
        assert!(e.propagator(0.0).max_abs_diff(&M::identity(6)) < 1e-14);
    }

    #[test]
    fn evolve_vec_matches_propagator() {
        let h = random_hermitian(5, 19);
        let e = eigh(&h).unwrap();
        let psi: Vec<C<f64>> = (0..5).map(|i| C::new(1.0 / (i as f64 + 2.0), 0.3)).collect();
        let a = e.evolve_vec(1.3, &psi);
        let b = e.propagator(1.3).mul_vec(&psi);
        assert!(vec_max_abs_diff(&a, &b) < 1e-13);
    }

    #[test]
    fn eigh_works_in_f32() {
        let mut m = ComplexMatrix::<f32>::zeros(2);
        m.set(0, 1, C::new(0.5f32, 0.0));
        m.set(1, 0, C::new(0.5f32, 0.0));
        let e = eigh(&m).unwrap();
        assert!((e.values[0] + 0.5).abs() < 1e-6);
        assert!((e.values[1] - 0.5).abs() < 1e-6);
    }
}
