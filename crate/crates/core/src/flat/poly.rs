use std::collections::BTreeMap;
use std::ops::{Add, Neg, Sub};

use crate::exterior::Form;
use crate::scalar::{Rational, Scalar};

/// Exponents of x₁,…,x₇.
pub type Monomial = [u8; 7];

/// All monomials of total degree at most `deg`, in lexicographic order.
pub fn monomials_up_to(deg: u8) -> Vec<Monomial> {
    fn rec(i: usize, left: u8, cur: &mut Monomial, out: &mut Vec<Monomial>) {
        if i == 7 {
            out.push(*cur);
            return;
        }
        for e in 0..=left {
            cur[i] = e;
            rec(i + 1, left - e, cur, out);
        }
        cur[i] = 0;
    }
    let mut out = Vec::new();
    rec(0, deg, &mut [0; 7], &mut out);
    out
}

/// A p-form on ℝ⁷ with polynomial coefficients: Σ_m x^m·a_m with constant forms a_m.
#[derive(Clone, Debug)]
pub struct PolyForm {
    degree: usize,
    terms: BTreeMap<Monomial, Form<Rational>>,
}

impl PartialEq for PolyForm {
    fn eq(&self, o: &Self) -> bool {
        (self - o).is_zero()
    }
}

impl PolyForm {
    pub fn zero(degree: usize) -> Self {
        PolyForm { degree, terms: BTreeMap::new() }
    }

    pub fn constant(a: Form<Rational>) -> Self {
        Self::monomial([0; 7], a)
    }

    pub fn monomial(m: Monomial, a: Form<Rational>) -> Self {
        let mut p = Self::zero(a.degree());
        p.add_term(m, a);
        p
    }

    pub fn from_terms(degree: usize, terms: impl IntoIterator<Item = (Monomial, Form<Rational>)>) -> Self {
        let mut p = Self::zero(degree);
        for (m, a) in terms {
            assert_eq!(a.degree(), degree, "coefficient of wrong degree");
            p.add_term(m, a);
        }
        p
    }

    fn add_term(&mut self, m: Monomial, a: Form<Rational>) {
        if a.is_zero() {
            return;
        }
        let sum = match self.terms.remove(&m) {
            Some(old) => old + a,
            None => a,
        };
        if !sum.is_zero() {
            self.terms.insert(m, sum);
        }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Form<Rational>)> {
        self.terms.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Largest total degree of a monomial present, or `None` for zero.
    pub fn poly_degree(&self) -> Option<u32> {
        self.terms.keys().map(|m| m.iter().map(|&e| e as u32).sum()).max()
    }

    /// Largest absolute coefficient.
    pub fn max_abs(&self) -> Rational {
        let mut best = Rational::zero();
        for a in self.terms.values() {
            for (_, c) in a.terms() {
                let c = c.abs();
                if c > best {
                    best = c;
                }
            }
        }
        best
    }

    pub fn scale(&self, c: &Rational) -> Self {
        self.map(self.degree, |a| a.scale(c))
    }

    /// Apply a constant-coefficient linear map to every coefficient form.
    pub fn map(&self, degree: usize, f: impl Fn(&Form<Rational>) -> Form<Rational>) -> Self {
        let mut out = Self::zero(degree);
        for (m, a) in &self.terms {
            let b = f(a);
            if !b.is_zero() {
                assert_eq!(b.degree(), degree, "map changed degree unexpectedly");
                out.add_term(*m, b);
            }
        }
        out
    }

    pub fn wedge(&self, o: &Self) -> Self {
        let mut out = Self::zero(self.degree + o.degree);
        for (m, a) in &self.terms {
            for (n, b) in &o.terms {
                let mn: Monomial = std::array::from_fn(|i| m[i] + n[i]);
                out.add_term(mn, a.wedge(b));
            }
        }
        out
    }

    /// Value at a rational point.
    pub fn eval(&self, x: &[Rational; 7]) -> Form<Rational> {
        let mut out = Form::zero(self.degree);
        for (m, a) in &self.terms {
            let mut v = Rational::one();
            for (xi, &e) in x.iter().zip(m) {
                v = v * xi.powi(e as u32);
            }
            out = out + a.scale(&v);
        }
        out
    }

    /// ∂/∂x_i, with `i` zero-based.
    pub fn partial(&self, i: usize) -> Self {
        let mut out = Self::zero(self.degree);
        for (m, a) in &self.terms {
            if m[i] == 0 {
                continue;
            }
            let mut n = *m;
            n[i] -= 1;
            out.add_term(n, a.scale(&Rational::from_i64(m[i] as i64)));
        }
        out
    }
}

/// Exterior derivative d(Σ x^m a_m) = Σ_i ∂_i(x^m) e^i∧a_m.
pub fn d_poly(a: &PolyForm) -> PolyForm {
    if a.degree == 7 {
        return PolyForm::zero(7);
    }
    let mut out = PolyForm::zero(a.degree + 1);
    for i in 0..7 {
        let p = a.partial(i);
        if p.is_zero() {
            continue;
        }
        let ei = Form::<Rational>::basis(&[i + 1]);
        for (m, c) in p.terms {
            out.add_term(m, ei.wedge(&c));
        }
    }
    out
}

impl Add for PolyForm {
    type Output = PolyForm;
    fn add(mut self, o: PolyForm) -> PolyForm {
        if self.is_zero() && o.degree != self.degree {
            return o;
        }
        for (m, a) in o.terms {
            self.add_term(m, a);
        }
        self
    }
}

impl Sub for PolyForm {
    type Output = PolyForm;
    fn sub(self, o: PolyForm) -> PolyForm {
        self + (-o)
    }
}

impl<'a> Sub<&'a PolyForm> for &'a PolyForm {
    type Output = PolyForm;
    fn sub(self, o: &PolyForm) -> PolyForm {
        self.clone() - o.clone()
    }
}

impl<'a> Add<&'a PolyForm> for &'a PolyForm {
    type Output = PolyForm;
    fn add(self, o: &PolyForm) -> PolyForm {
        self.clone() + o.clone()
    }
}

impl Neg for PolyForm {
    type Output = PolyForm;
    fn neg(self) -> PolyForm {
        let degree = self.degree;
        PolyForm { degree, terms: self.terms.into_iter().map(|(m, a)| (m, -a)).collect() }
    }
}
