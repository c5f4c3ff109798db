//! Small dense square matrices over a [`Scalar`].

use std::ops::{Index, IndexMut};

use crate::exterior::mask;
use crate::scalar::Scalar;

#[derive(Clone, Debug, PartialEq)]
pub struct Matrix<S> {
    n: usize,
    data: Vec<S>,
}

impl<S: Scalar> Matrix<S> {
    pub fn zeros(n: usize) -> Self {
        Matrix { n, data: vec![S::zero(); n * n] }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, |i, j| if i == j { S::one() } else { S::zero() })
    }

    pub fn diagonal(d: &[S]) -> Self {
        Self::from_fn(d.len(), |i, j| if i == j { d[i].clone() } else { S::zero() })
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> S) -> Self {
        let mut data = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                data.push(f(i, j));
            }
        }
        Matrix { n, data }
    }

    /// Build from rows; panics unless square.
    pub fn from_rows(rows: &[Vec<S>]) -> Self {
        let n = rows.len();
        assert!(rows.iter().all(|r| r.len() == n), "matrix must be square");
        Self::from_fn(n, |i, j| rows[i][j].clone())
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.n, |i, j| self[(j, i)].clone())
    }

    pub fn is_symmetric(&self) -> bool {
        (0..self.n).all(|i| (0..i).all(|j| self[(i, j)] == self[(j, i)]))
    }

    pub fn scale(&self, c: &S) -> Self {
        Matrix { n: self.n, data: self.data.iter().map(|x| x.clone() * c.clone()).collect() }
    }

    pub fn add(&self, o: &Self) -> Self {
        assert_eq!(self.n, o.n);
        Matrix {
            n: self.n,
            data: self.data.iter().zip(&o.data).map(|(a, b)| a.clone() + b.clone()).collect(),
        }
    }

    pub fn sub(&self, o: &Self) -> Self {
        assert_eq!(self.n, o.n);
        Matrix {
            n: self.n,
            data: self.data.iter().zip(&o.data).map(|(a, b)| a.clone() - b.clone()).collect(),
        }
    }

    pub fn mul(&self, o: &Self) -> Self {
        assert_eq!(self.n, o.n);
        let n = self.n;
        Self::from_fn(n, |i, j| {
            let mut s = S::zero();
            for k in 0..n {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                s = s + a.clone() * o[(k, j)].clone();
            }
            s
        })
    }

    pub fn mul_vec(&self, v: &[S]) -> Vec<S> {
        assert_eq!(v.len(), self.n);
        (0..self.n)
            .map(|i| {
                let mut s = S::zero();
                for (k, x) in v.iter().enumerate() {
                    if !x.is_zero() {
                        s = s + self[(i, k)].clone() * x.clone();
                    }
                }
                s
            })
            .collect()
    }

    pub fn trace(&self) -> S {
        (0..self.n).fold(S::zero(), |s, i| s + self[(i, i)].clone())
    }

    /// Largest absolute entry, as a double.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|x| x.abs().to_f64()).fold(0.0, f64::max)
    }

    /// Gaussian elimination with largest-magnitude pivoting.
    pub fn det(&self) -> S {
        let n = self.n;
        match n {
            0 => return S::one(),
            1 => return self.data[0].clone(),
            2 => {
                return self[(0, 0)].clone() * self[(1, 1)].clone()
                    - self[(0, 1)].clone() * self[(1, 0)].clone()
            }
            _ => {}
        }
        let mut a = self.data.clone();
        let mut det = S::one();
        for c in 0..n {
            let p = match pivot(&a, n, c) {
                Some(p) => p,
                None => return S::zero(),
            };
            if p != c {
                for k in 0..n {
                    a.swap(c * n + k, p * n + k);
                }
                det = -det;
            }
            let piv = a[c * n + c].clone();
            det = det * piv.clone();
            for r in c + 1..n {
                let f = a[r * n + c].clone();
                if f.is_zero() {
                    continue;
                }
                let f = f / piv.clone();
                for k in c..n {
                    let t = a[c * n + k].clone();
                    a[r * n + k] = a[r * n + k].clone() - f.clone() * t;
                }
            }
        }
        det
    }

    /// Gauss-Jordan inverse; `None` when singular.
    pub fn inverse(&self) -> Option<Self> {
        let n = self.n;
        let mut a = self.data.clone();
        let mut inv = Self::identity(n).data;
        for c in 0..n {
            let p = pivot(&a, n, c)?;
            if p != c {
                for k in 0..n {
                    a.swap(c * n + k, p * n + k);
                    inv.swap(c * n + k, p * n + k);
                }
            }
            let piv = a[c * n + c].clone();
            for k in 0..n {
                a[c * n + k] = a[c * n + k].clone() / piv.clone();
                inv[c * n + k] = inv[c * n + k].clone() / piv.clone();
            }
            for r in 0..n {
                if r == c {
                    continue;
                }
                let f = a[r * n + c].clone();
                if f.is_zero() {
                    continue;
                }
                for k in 0..n {
                    let t = a[c * n + k].clone();
                    a[r * n + k] = a[r * n + k].clone() - f.clone() * t;
                    let t = inv[c * n + k].clone();
                    inv[r * n + k] = inv[r * n + k].clone() - f.clone() * t;
                }
            }
        }
        Some(Matrix { n, data: inv })
    }

    /// Determinants of the leading principal submatrices, sizes 1..=n.
    pub fn leading_minors(&self) -> Vec<S> {
        (1..=self.n)
            .map(|k| Self::from_fn(k, |i, j| self[(i, j)].clone()).det())
            .collect()
    }

    fn submatrix(&self, rows: &[usize], cols: &[usize]) -> Self {
        Self::from_fn(rows.len(), |i, j| self[(rows[i], cols[j])].clone())
    }

    /// The p-th compound matrix of a 7x7 matrix: entries are the p×p minors
    /// indexed by the degree-p masks in [`mask::masks_of_degree`] order.
    pub fn compound(&self, p: usize) -> Self {
        assert_eq!(self.n, 7, "compound matrices are defined on 7x7 input");
        let ms = mask::masks_of_degree(p);
        let idx: Vec<Vec<usize>> = ms.iter().map(|&m| mask::indices(m)).collect();
        Self::from_fn(ms.len(), |i, j| self.submatrix(&idx[i], &idx[j]).det())
    }

    pub fn to_f64(&self) -> Matrix<f64> {
        Matrix { n: self.n, data: self.data.iter().map(|x| x.to_f64()).collect() }
    }

    /// Eigenvalues of the symmetric part, ascending (computed in double precision).
    pub fn symmetric_eigenvalues(&self) -> Vec<f64> {
        let n = self.n;
        let m = nalgebra::DMatrix::from_fn(n, n, |i, j| {
            0.5 * (self[(i, j)].to_f64() + self[(j, i)].to_f64())
        });
        let mut ev: Vec<f64> = m.symmetric_eigenvalues().iter().copied().collect();
        ev.sort_by(|a, b| a.total_cmp(b));
        ev
    }

    /// Eigenvalues of `self` relative to the positive definite `g`, i.e. of g⁻¹·self,
    /// ascending. `None` if `g` is not positive definite in double precision.
    pub fn relative_eigenvalues(&self, g: &Matrix<S>) -> Option<Vec<f64>> {
        let n = self.n;
        let gm = nalgebra::DMatrix::from_fn(n, n, |i, j| g[(i, j)].to_f64());
        let chol = gm.cholesky()?;
        let linv = chol.l().try_inverse()?;
        let a = nalgebra::DMatrix::from_fn(n, n, |i, j| {
            0.5 * (self[(i, j)].to_f64() + self[(j, i)].to_f64())
        });
        let m = &linv * a * linv.transpose();
        let m = Matrix::from_fn(n, |i, j| m[(i, j)]);
        Some(m.symmetric_eigenvalues())
    }
}

/// Matrix exponential by scaling and squaring with a Taylor core.
pub fn expm(a: &Matrix<f64>) -> Matrix<f64> {
    let norm = a.max_abs() * a.dim() as f64;
    let mut k = 0;
    while norm / f64::powi(2.0, k) > 0.25 {
        k += 1;
    }
    let x = a.scale(&f64::powi(0.5, k));
    let mut term = Matrix::identity(a.dim());
    let mut sum = term.clone();
    for n in 1..20 {
        term = term.mul(&x).scale(&(1.0 / n as f64));
        sum = sum.add(&term);
    }
    for _ in 0..k {
        sum = sum.mul(&sum);
    }
    sum
}

/// Reduced row echelon form in place; returns the pivot columns.
/// Entries with `is_negligible(tol)` count as zero.
pub fn rref<S: Scalar>(rows: &mut [Vec<S>], tol: f64) -> Vec<usize> {
    let ncols = rows.first().map_or(0, |r| r.len());
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        if r == rows.len() {
            break;
        }
        let mut best: Option<(usize, f64)> = None;
        for (i, row) in rows.iter().enumerate().skip(r) {
            if row[c].is_negligible(tol) {
                continue;
            }
            let v = row[c].abs().to_f64();
            if S::EXACT {
                best = Some((i, v));
                break;
            }
            if best.is_none_or(|(_, b)| v > b) {
                best = Some((i, v));
            }
        }
        let Some((p, _)) = best else { continue };
        rows.swap(r, p);
        let piv = rows[r][c].clone();
        for x in rows[r].iter_mut() {
            *x = x.clone() / piv.clone();
        }
        for i in 0..rows.len() {
            if i == r || rows[i][c].is_zero() {
                continue;
            }
            let f = rows[i][c].clone();
            for k in 0..ncols {
                let t = rows[r][k].clone();
                rows[i][k] = rows[i][k].clone() - f.clone() * t;
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

pub fn rank<S: Scalar>(rows: &[Vec<S>], tol: f64) -> usize {
    let mut m = rows.to_vec();
    rref(&mut m, tol).len()
}

/// A basis of {x : rows·x = 0}.
pub fn nullspace<S: Scalar>(rows: &[Vec<S>], ncols: usize, tol: f64) -> Vec<Vec<S>> {
    let mut m = rows.to_vec();
    let pivots = rref(&mut m, tol);
    let free: Vec<usize> = (0..ncols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![S::zero(); ncols];
            v[f] = S::one();
            for (r, &p) in pivots.iter().enumerate() {
                v[p] = -m[r][f].clone();
            }
            v
        })
        .collect()
}

fn pivot<S: Scalar>(a: &[S], n: usize, c: usize) -> Option<usize> {
    let mut best: Option<(usize, S)> = None;
    for r in c..n {
        let v = a[r * n + c].abs();
        if v.is_zero() {
            continue;
        }
        if S::EXACT {
            return Some(r);
        }
        match &best {
            Some((_, b)) if *b >= v => {}
            _ => best = Some((r, v)),
        }
    }
    best.map(|(r, _)| r)
}

impl<S> Index<(usize, usize)> for Matrix<S> {
    type Output = S;
    fn index(&self, (i, j): (usize, usize)) -> &S {
        &self.data[i * self.n + j]
    }
}

impl<S> IndexMut<(usize, usize)> for Matrix<S> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut S {
        &mut self.data[i * self.n + j]
    }
}
