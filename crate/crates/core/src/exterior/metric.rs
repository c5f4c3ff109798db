use std::sync::OnceLock;

use super::{mask, Covector, Form, Vector};
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Orientation {
    Positive,
    Negative,
}

impl Orientation {
    pub fn sign(self) -> i32 {
        match self {
            Orientation::Positive => 1,
            Orientation::Negative => -1,
        }
    }

    pub fn from_sign(s: i32) -> Self {
        if s < 0 {
            Orientation::Negative
        } else {
            Orientation::Positive
        }
    }
}

/// A positive definite inner product on the span of e₁,…,e₇, with cached
/// inverse, determinant and inverse compound matrices.
#[derive(Clone, Debug)]
pub struct Metric<S> {
    g: Matrix<S>,
    inv: Matrix<S>,
    det: S,
    sqrt_det: Option<S>,
    is_identity: bool,
    inv_compounds: [OnceLock<Matrix<S>>; 8],
}

impl<S: Scalar> PartialEq for Metric<S> {
    fn eq(&self, o: &Self) -> bool {
        self.g == o.g
    }
}

impl<S: Scalar> Metric<S> {
    /// Checks symmetry and positivity of all leading principal minors.
    pub fn new(g: Matrix<S>) -> Result<Self> {
        if g.dim() != 7 || !g.is_symmetric() {
            return Err(Error::NotPositiveDefinite);
        }
        if g.leading_minors().iter().any(|m| m.signum() <= 0) {
            return Err(Error::NotPositiveDefinite);
        }
        let inv = g.inverse().ok_or(Error::NotPositiveDefinite)?;
        let det = g.det();
        let sqrt_det = det.sqrt();
        let is_identity = g == Matrix::identity(7);
        Ok(Metric { g, inv, det, sqrt_det, is_identity, inv_compounds: Default::default() })
    }

    /// Like [`Metric::new`] but with a known value of √det g, useful in exact
    /// arithmetic when the caller already has it.
    pub fn with_sqrt_det(g: Matrix<S>, sqrt_det: S) -> Result<Self> {
        let mut m = Self::new(g)?;
        m.sqrt_det = Some(sqrt_det);
        Ok(m)
    }

    pub fn identity() -> Self {
        Self::new(Matrix::identity(7)).expect("identity is positive definite")
    }

    pub fn matrix(&self) -> &Matrix<S> {
        &self.g
    }

    pub fn inverse(&self) -> &Matrix<S> {
        &self.inv
    }

    pub fn det(&self) -> &S {
        &self.det
    }

    pub fn sqrt_det(&self) -> Option<&S> {
        self.sqrt_det.as_ref()
    }

    /// The p-th compound of g⁻¹, which raises all indices of a p-form.
    pub fn inverse_compound(&self, p: usize) -> &Matrix<S> {
        self.inv_compounds[p].get_or_init(|| self.inv.compound(p))
    }

    /// Metric volume form o·√det g·e^{1…7}.
    pub fn volume_form(&self, o: Orientation) -> Result<Form<S>> {
        let s = self.sqrt_det.clone().ok_or(Error::NotRepresentable)?;
        let s = if o == Orientation::Negative { -s } else { s };
        Ok(Form::from_terms(7, [(mask::FULL, s)]))
    }

    /// ⟨v, w⟩ for vectors.
    pub fn dot(&self, v: &Vector<S>, w: &Vector<S>) -> S {
        let gw = self.g.mul_vec(&w.0);
        v.0.iter().zip(gw).fold(S::zero(), |s, (a, b)| s + a.clone() * b)
    }
}

/// Hodge star with volume factor `vol` = o·√det g: raise all indices with g⁻¹,
/// then send e^I to sign(I, Iᶜ)·e^{Iᶜ}.
pub(crate) fn star_with<S: Scalar>(a: &Form<S>, g: &Metric<S>, vol: &S) -> Form<S> {
    let p = a.degree();
    let up = if g.is_identity { a.to_vec() } else { g.inverse_compound(p).mul_vec(&a.to_vec()) };
    let ms = mask::masks_of_degree(p);
    Form::from_terms(
        7 - p,
        ms.iter().zip(up).map(|(&m, c)| {
            let comp = mask::FULL ^ m;
            let c = c * vol.clone();
            (comp, if mask::merge_sign(m, comp) < 0 { -c } else { c })
        }),
    )
}

pub fn hodge_star<S: Scalar>(a: &Form<S>, g: &Metric<S>, o: Orientation) -> Result<Form<S>> {
    let v = g.sqrt_det.clone().ok_or(Error::NotRepresentable)?;
    let v = if o == Orientation::Negative { -v } else { v };
    Ok(star_with(a, g, &v))
}

/// ⟨a, b⟩ = aᵀ·C_p(g⁻¹)·b.
pub fn form_inner<S: Scalar>(a: &Form<S>, b: &Form<S>, g: &Metric<S>) -> Result<S> {
    b.expect_degree(a.degree())?;
    Ok(inner_unchecked(a, b, g))
}

pub(crate) fn inner_unchecked<S: Scalar>(a: &Form<S>, b: &Form<S>, g: &Metric<S>) -> S {
    let p = a.degree();
    if g.is_identity {
        return a.terms().fold(S::zero(), |s, (m, x)| s + x.clone() * b.coeff_mask(m));
    }
    let gb = g.inverse_compound(p).mul_vec(&b.to_vec());
    a.to_vec().into_iter().zip(gb).fold(S::zero(), |s, (x, y)| {
        if x.is_zero() {
            s
        } else {
            s + x * y
        }
    })
}

/// v ↦ v♭ = g(v, ·).
pub fn flat<S: Scalar>(v: &Vector<S>, g: &Metric<S>) -> Covector<S> {
    Covector::from(g.g.mul_vec(&v.0))
}

/// α ↦ α♯ with g(α♯, ·) = α.
pub fn sharp<S: Scalar>(a: &Covector<S>, g: &Metric<S>) -> Vector<S> {
    Vector::from_slice(&g.inv.mul_vec(&a.0))
}

impl<S: Scalar> From<Vec<S>> for Covector<S> {
    fn from(v: Vec<S>) -> Self {
        assert_eq!(v.len(), 7);
        Covector(std::array::from_fn(|k| v[k].clone()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rational;

    type F = Form<Rational>;

    fn q(n: i64) -> Rational {
        Rational::from_i64(n)
    }

    #[test]
    fn identity_star_examples() {
        let g = Metric::<Rational>::identity();
        let o = Orientation::Positive;
        assert_eq!(hodge_star(&F::basis(&[1, 2, 3]), &g, o).unwrap(), F::basis(&[4, 5, 6, 7]));
        assert_eq!(hodge_star(&F::constant(q(1)), &g, o).unwrap(), F::volume());
        // (2,5,7,1,3,4,6) is an even permutation, so the −e²⁵⁷ term of φ
        // pairs with the −e¹³⁴⁶ term of ∗φ
        assert_eq!(
            hodge_star(&-F::basis(&[2, 5, 7]), &g, o).unwrap(),
            -F::basis(&[1, 3, 4, 6])
        );
    }

    #[test]
    fn rejects_indefinite() {
        let mut d = vec![q(1); 7];
        d[3] = q(-1);
        assert_eq!(Metric::new(Matrix::diagonal(&d)).unwrap_err(), Error::NotPositiveDefinite);
    }

    #[test]
    fn inner_examples() {
        let g = Metric::<Rational>::identity();
        let e12 = F::basis(&[1, 2]);
        assert_eq!(form_inner(&e12, &e12, &g).unwrap(), q(1));
        assert!(form_inner(&e12, &F::basis(&[1, 2, 3]), &g).is_err());
    }

    #[test]
    fn musical_examples() {
        let mut d = vec![q(1); 7];
        d[0] = q(4);
        let g = Metric::new(Matrix::diagonal(&d)).unwrap();
        assert_eq!(flat(&Vector::basis(1), &g), Covector::basis(1).scaled(&q(4)));
        let id = Metric::<Rational>::identity();
        assert_eq!(sharp(&Covector::basis(1), &id), Vector::basis(1));
    }
}
