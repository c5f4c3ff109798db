//! Exterior algebra of a fixed 7-dimensional space with basis e₁,…,e₇.

pub mod json;
pub mod mask;
pub(crate) mod metric;

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Neg, Sub};

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::scalar::Scalar;

pub use metric::{flat, form_inner, hodge_star, sharp, Metric, Orientation};

/// A homogeneous exterior form of degree `p`, stored sparsely by index mask.
#[derive(Clone)]
pub struct Form<S> {
    degree: usize,
    coeffs: BTreeMap<u8, S>,
}

/// A tangent vector, given by its components in the basis e₁,…,e₇.
#[derive(Clone, Debug, PartialEq)]
pub struct Vector<S>(pub [S; 7]);

/// A covector (1-form) in the dual basis e¹,…,e⁷.
#[derive(Clone, Debug, PartialEq)]
pub struct Covector<S>(pub [S; 7]);

impl<S: Scalar> Vector<S> {
    pub fn zero() -> Self {
        Vector(std::array::from_fn(|_| S::zero()))
    }
    /// The basis vector e_i, one-based.
    pub fn basis(i: usize) -> Self {
        assert!((1..=7).contains(&i), "basis index out of range");
        Vector(std::array::from_fn(|k| if k + 1 == i { S::one() } else { S::zero() }))
    }
    pub fn from_slice(v: &[S]) -> Self {
        assert_eq!(v.len(), 7);
        Vector(std::array::from_fn(|k| v[k].clone()))
    }
    pub fn add(&self, o: &Self) -> Self {
        Vector(std::array::from_fn(|k| self.0[k].clone() + o.0[k].clone()))
    }
    pub fn scale(&self, c: &S) -> Self {
        Vector(std::array::from_fn(|k| self.0[k].clone() * c.clone()))
    }
    pub fn dot(&self, o: &Self) -> S {
        (0..7).fold(S::zero(), |s, k| s + self.0[k].clone() * o.0[k].clone())
    }
}

impl<S: Scalar> Covector<S> {
    pub fn zero() -> Self {
        Covector(std::array::from_fn(|_| S::zero()))
    }
    pub fn basis(i: usize) -> Self {
        Covector(Vector::basis(i).0)
    }
    pub fn to_form(&self) -> Form<S> {
        Form::from_terms(1, (0..7).map(|k| (1u8 << k, self.0[k].clone())))
    }
    pub fn from_form(a: &Form<S>) -> Result<Self> {
        a.expect_degree(1)?;
        Ok(Covector(std::array::from_fn(|k| a.coeff_mask(1 << k))))
    }
    pub fn scaled(&self, c: &S) -> Self {
        Covector(std::array::from_fn(|k| self.0[k].clone() * c.clone()))
    }
    /// Evaluation α(v).
    pub fn eval(&self, v: &Vector<S>) -> S {
        (0..7).fold(S::zero(), |s, k| s + self.0[k].clone() * v.0[k].clone())
    }
}

impl<S: Scalar> Form<S> {
    pub fn zero(degree: usize) -> Self {
        assert!(degree <= 7, "degree out of range");
        Form { degree, coeffs: BTreeMap::new() }
    }

    pub fn constant(c: S) -> Self {
        Self::from_terms(0, [(0u8, c)])
    }

    /// The reference volume element e^{1…7}.
    pub fn volume() -> Self {
        Self::from_terms(7, [(mask::FULL, S::one())])
    }

    /// `c · e^{i₁}∧…∧e^{i_p}` for one-based indices in any order.
    pub fn term(c: S, idx: &[usize]) -> Self {
        let (m, s) = mask::from_indices(idx).unwrap_or_else(|| panic!("bad multi-index {idx:?}"));
        let c = if s < 0 { -c } else { c };
        Self::from_terms(idx.len(), [(m, c)])
    }

    pub fn basis(idx: &[usize]) -> Self {
        Self::term(S::one(), idx)
    }

    /// Build from mask/coefficient pairs; repeated masks are summed.
    pub fn from_terms(degree: usize, terms: impl IntoIterator<Item = (u8, S)>) -> Self {
        let mut f = Self::zero(degree);
        for (m, c) in terms {
            assert!(m < 128 && mask::degree(m) == degree, "mask of wrong degree");
            f.add_term(m, c);
        }
        f
    }

    /// Dense coefficient vector in [`mask::masks_of_degree`] order.
    pub fn from_vec(degree: usize, v: &[S]) -> Self {
        let ms = mask::masks_of_degree(degree);
        assert_eq!(v.len(), ms.len());
        Self::from_terms(degree, ms.iter().copied().zip(v.iter().cloned()))
    }

    pub fn to_vec(&self) -> Vec<S> {
        mask::masks_of_degree(self.degree).iter().map(|&m| self.coeff_mask(m)).collect()
    }

    fn add_term(&mut self, m: u8, c: S) {
        if c.is_zero() {
            return;
        }
        match self.coeffs.get_mut(&m) {
            Some(x) => {
                let v = x.clone() + c;
                if v.is_zero() {
                    self.coeffs.remove(&m);
                } else {
                    *x = v;
                }
            }
            None => {
                self.coeffs.insert(m, c);
            }
        }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn expect_degree(&self, p: usize) -> Result<()> {
        if self.degree == p {
            Ok(())
        } else {
            Err(Error::DegreeMismatch { expected: p, found: self.degree })
        }
    }

    pub fn coeff_mask(&self, m: u8) -> S {
        self.coeffs.get(&m).cloned().unwrap_or_else(S::zero)
    }

    /// Coefficient of e^{i₁…i_p} for one-based indices in any order.
    pub fn coeff(&self, idx: &[usize]) -> S {
        match mask::from_indices(idx) {
            Some((m, s)) if idx.len() == self.degree => {
                let c = self.coeff_mask(m);
                if s < 0 {
                    -c
                } else {
                    c
                }
            }
            _ => S::zero(),
        }
    }

    /// Value of a 0-form or top-degree coefficient of a 7-form.
    pub fn scalar_part(&self) -> S {
        match self.degree {
            0 => self.coeff_mask(0),
            7 => self.coeff_mask(mask::FULL),
            _ => S::zero(),
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (u8, &S)> {
        self.coeffs.iter().map(|(m, c)| (*m, c))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.values().all(|c| c.is_zero())
    }

    /// Largest absolute coefficient.
    pub fn max_abs(&self) -> f64 {
        self.coeffs.values().map(|c| c.abs().to_f64()).fold(0.0, f64::max)
    }

    pub fn scale(&self, c: &S) -> Self {
        if c.is_zero() {
            return Self::zero(self.degree);
        }
        Form {
            degree: self.degree,
            coeffs: self.coeffs.iter().map(|(m, x)| (*m, x.clone() * c.clone())).collect(),
        }
    }

    pub fn map<T: Scalar>(&self, f: impl Fn(&S) -> T) -> Form<T> {
        Form::from_terms(self.degree, self.coeffs.iter().map(|(m, c)| (*m, f(c))))
    }

    pub fn to_f64(&self) -> Form<f64> {
        self.map(|c| c.to_f64())
    }

    /// Drop coefficients with absolute value at most `tol`.
    pub fn chop(&self, tol: f64) -> Self {
        Form {
            degree: self.degree,
            coeffs: self
                .coeffs
                .iter()
                .filter(|(_, c)| !c.is_negligible(tol))
                .map(|(m, c)| (*m, c.clone()))
                .collect(),
        }
    }

    pub fn wedge(&self, o: &Self) -> Self {
        wedge(self, o)
    }

    /// Interior product v⌟self.
    pub fn contract(&self, v: &Vector<S>) -> Self {
        contract(v, self)
    }

    /// `self ∧ self ∧ … ∧ self` (k factors); `k = 0` gives 1.
    pub fn power(&self, k: usize) -> Self {
        let mut r = Self::constant(S::one());
        for _ in 0..k {
            r = wedge(&r, self);
        }
        r
    }
}

impl<S: Scalar> PartialEq for Form<S> {
    fn eq(&self, o: &Self) -> bool {
        if self.is_zero() && o.is_zero() {
            return true;
        }
        self.degree == o.degree
            && self
                .coeffs
                .keys()
                .chain(o.coeffs.keys())
                .all(|m| self.coeff_mask(*m) == o.coeff_mask(*m))
    }
}

impl<S: Scalar> fmt::Debug for Form<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Form[{}](", self.degree)?;
        let mut first = true;
        for (m, c) in &self.coeffs {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            let idx: String = mask::to_one_based(*m).iter().map(|i| i.to_string()).collect();
            write!(f, "{c:?}·e{idx}")?;
        }
        if first {
            write!(f, "0")?;
        }
        write!(f, ")")
    }
}

impl<S: Scalar> fmt::Display for Form<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

fn combine<S: Scalar>(a: &Form<S>, b: &Form<S>, neg: bool) -> Form<S> {
    if a.is_zero() {
        return if neg { -b.clone() } else { b.clone() };
    }
    if b.is_zero() {
        return a.clone();
    }
    assert_eq!(a.degree, b.degree, "adding forms of different degree");
    let mut r = a.clone();
    for (m, c) in &b.coeffs {
        r.add_term(*m, if neg { -c.clone() } else { c.clone() });
    }
    r
}

impl<S: Scalar> Add for &Form<S> {
    type Output = Form<S>;
    fn add(self, o: Self) -> Form<S> {
        combine(self, o, false)
    }
}

impl<S: Scalar> Sub for &Form<S> {
    type Output = Form<S>;
    fn sub(self, o: Self) -> Form<S> {
        combine(self, o, true)
    }
}

impl<S: Scalar> Add for Form<S> {
    type Output = Form<S>;
    fn add(self, o: Self) -> Form<S> {
        combine(&self, &o, false)
    }
}

impl<S: Scalar> Sub for Form<S> {
    type Output = Form<S>;
    fn sub(self, o: Self) -> Form<S> {
        combine(&self, &o, true)
    }
}

impl<S: Scalar> Neg for Form<S> {
    type Output = Form<S>;
    fn neg(self) -> Form<S> {
        Form {
            degree: self.degree,
            coeffs: self.coeffs.into_iter().map(|(m, c)| (m, -c)).collect(),
        }
    }
}

impl<S: Scalar> Neg for &Form<S> {
    type Output = Form<S>;
    fn neg(self) -> Form<S> {
        -self.clone()
    }
}

/// Exterior product. When the degrees sum past 7 the result is the zero 7-form.
pub fn wedge<S: Scalar>(a: &Form<S>, b: &Form<S>) -> Form<S> {
    let deg = a.degree + b.degree;
    if deg > 7 {
        return Form::zero(7);
    }
    let mut r = Form::zero(deg);
    for (ma, ca) in &a.coeffs {
        for (mb, cb) in &b.coeffs {
            match mask::merge_sign(*ma, *mb) {
                0 => {}
                s => {
                    let c = ca.clone() * cb.clone();
                    r.add_term(ma | mb, if s < 0 { -c } else { c });
                }
            }
        }
    }
    r
}

/// Interior product v⌟a. Contracting a 0-form gives zero.
pub fn contract<S: Scalar>(v: &Vector<S>, a: &Form<S>) -> Form<S> {
    if a.degree == 0 {
        return Form::zero(0);
    }
    let mut r = Form::zero(a.degree - 1);
    for (m, c) in &a.coeffs {
        for (pos, i) in mask::indices(*m).into_iter().enumerate() {
            if v.0[i].is_zero() {
                continue;
            }
            let x = v.0[i].clone() * c.clone();
            r.add_term(m & !(1 << i), if pos % 2 == 1 { -x } else { x });
        }
    }
    r
}

/// Pullback along a linear map: (A*a)(v₁,…,v_p) = a(Av₁,…,Av_p).
pub fn pullback<S: Scalar>(a_map: &Matrix<S>, a: &Form<S>) -> Form<S> {
    let p = a.degree;
    let c = a_map.compound(p);
    let v = c.transpose().mul_vec(&a.to_vec());
    Form::from_vec(p, &v)
}

/// Pullback using a precomputed compound matrix of the map.
pub fn pullback_with_compound<S: Scalar>(compound: &Matrix<S>, a: &Form<S>) -> Form<S> {
    let v = compound.transpose().mul_vec(&a.to_vec());
    Form::from_vec(a.degree, &v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rational;

    type F = Form<Rational>;

    #[test]
    fn basic_products() {
        let e1 = F::basis(&[1]);
        let e2 = F::basis(&[2]);
        assert_eq!(e1.wedge(&e2), F::basis(&[1, 2]));
        assert_eq!(e2.wedge(&e1), -F::basis(&[1, 2]));
        let e12 = F::basis(&[1, 2]);
        assert!(e12.wedge(&e12).is_zero());
        assert_eq!(F::basis(&[2, 1]), -e12.clone());
    }

    #[test]
    fn contraction_examples() {
        let e12 = F::basis(&[1, 2]);
        assert_eq!(contract(&Vector::basis(1), &e12), F::basis(&[2]));
        assert_eq!(contract(&Vector::basis(2), &e12), -F::basis(&[1]));
        assert!(contract(&Vector::basis(3), &e12).is_zero());
        assert!(contract(&Vector::basis(3), &F::constant(Rational::from_i64(2))).is_zero());
    }

    #[test]
    fn equality_ignores_zeros() {
        let mut a = F::basis(&[1, 2, 3]);
        a.coeffs.insert(0b1000_0000 >> 1, Rational::from_i64(0));
        assert_eq!(a, F::basis(&[1, 2, 3]));
        assert_eq!(F::zero(3), F::zero(4));
    }

    #[test]
    fn pullback_scaling() {
        let l = Rational::from_i64(3);
        let a = Matrix::diagonal(&vec![l.clone(); 7]);
        assert_eq!(pullback(&a, &F::basis(&[1, 2, 3])), F::term(l.powi(3), &[1, 2, 3]));
    }
}
