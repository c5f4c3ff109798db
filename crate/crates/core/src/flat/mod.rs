//! The first-order operator calculus of a torsion-free G2-structure, realized on
//! ℝ⁷ with the constant form φ and polynomial coefficients.
//!
//! Sections of the four bundles are [`TypedSection`]s labelled 1, 7, 14, 27:
//! functions, 1-forms, 2-forms in Λ²₁₄ and 3-forms in Λ³₂₇. Every operator d^p_q
//! is obtained from its row of the exterior derivative table by applying
//! [`d_poly`] and the constant-coefficient type projections.

mod poly;
pub mod tables;

use std::fmt;
use std::sync::OnceLock;

pub use poly::{d_poly, monomials_up_to, Monomial, PolyForm};

use crate::definite::DefiniteStructure;
use crate::error::{Error, Result};
use crate::exterior::Form;
use crate::scalar::{Rational, Scalar};

pub(crate) fn standard() -> &'static DefiniteStructure<Rational> {
    static ST: OnceLock<DefiniteStructure<Rational>> = OnceLock::new();
    ST.get_or_init(DefiniteStructure::standard)
}

/// The four bundles Ω₁, Ω₇, Ω₁₄, Ω₂₇.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Label {
    One,
    Seven,
    Fourteen,
    TwentySeven,
}

impl Label {
    pub const ALL: [Label; 4] = [Label::One, Label::Seven, Label::Fourteen, Label::TwentySeven];

    /// Form degree of the representative.
    pub fn degree(self) -> usize {
        match self {
            Label::One => 0,
            Label::Seven => 1,
            Label::Fourteen => 2,
            Label::TwentySeven => 3,
        }
    }

    pub fn dim(self) -> usize {
        match self {
            Label::One => 1,
            Label::Seven => 7,
            Label::Fourteen => 14,
            Label::TwentySeven => 27,
        }
    }

    pub fn parse(s: &str) -> Option<Label> {
        match s {
            "1" => Some(Label::One),
            "7" => Some(Label::Seven),
            "14" => Some(Label::Fourteen),
            "27" => Some(Label::TwentySeven),
            _ => None,
        }
    }

    /// Project a constant form of the right degree onto this type.
    pub fn project(self, a: &Form<Rational>) -> Form<Rational> {
        let st = standard();
        match self {
            Label::One | Label::Seven => a.clone(),
            Label::Fourteen => st.project2(a).expect("degree 2").beta14,
            Label::TwentySeven => st.project3(a).expect("degree 3").gamma27,
        }
    }

    /// The part of a constant form that is not of this type.
    fn leak(self, a: &Form<Rational>) -> Form<Rational> {
        a - &self.project(a)
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.dim())
    }
}

/// A polynomial section of one of the four bundles, with exact purity.
#[derive(Clone, Debug, PartialEq)]
pub struct TypedSection {
    label: Label,
    payload: PolyForm,
}

impl TypedSection {
    /// Fails with [`Error::Impure`] unless every coefficient form has the labelled type.
    pub fn new(label: Label, payload: PolyForm) -> Result<Self> {
        if payload.degree() != label.degree() {
            return Err(Error::DegreeMismatch { expected: label.degree(), found: payload.degree() });
        }
        let leak = payload.map(label.degree(), |a| label.leak(a));
        if !leak.is_zero() {
            return Err(Error::Impure(leak.max_abs().to_f64()));
        }
        Ok(TypedSection { label, payload })
    }

    /// Project each coefficient onto the labelled type.
    pub fn projected(label: Label, payload: &PolyForm) -> Result<Self> {
        if payload.degree() != label.degree() {
            return Err(Error::DegreeMismatch { expected: label.degree(), found: payload.degree() });
        }
        Ok(TypedSection { label, payload: payload.map(label.degree(), |a| label.project(a)) })
    }

    pub fn label(&self) -> Label {
        self.label
    }

    pub fn payload(&self) -> &PolyForm {
        &self.payload
    }

    pub fn into_payload(self) -> PolyForm {
        self.payload
    }
}

/// Whether d^p_q is one of the operators that vanish identically.
pub fn is_zero_operator(p: Label, q: Label) -> bool {
    use Label::*;
    matches!(
        (p, q),
        (One, TwentySeven)
            | (TwentySeven, One)
            | (One, Fourteen)
            | (Fourteen, One)
            | (One, One)
            | (Fourteen, Fourteen)
    )
}

fn star(a: &PolyForm) -> PolyForm {
    let st = standard();
    a.map(7 - a.degree(), |f| st.star(f))
}

fn wedge_const(a: &PolyForm, c: &Form<Rational>) -> PolyForm {
    a.map(a.degree() + c.degree(), |f| f.wedge(c))
}

/// Read α off a Λ⁴₇ form α∧σ, using ∗(∗(α∧σ)∧σ) = −4α. Other types are ignored.
fn from_wedge_sigma(w: &PolyForm) -> PolyForm {
    let st = standard();
    let q = Rational::ratio(-1, 4);
    w.map(1, |f| st.star(&st.star(f).wedge(st.sigma())).scale(&q))
}

/// d^p_q applied to a section of type p.
pub fn dpq(p: Label, q: Label, s: &TypedSection) -> Result<TypedSection> {
    use Label::*;
    if s.label != p {
        return Err(Error::Invalid(format!("section has type {}, operator expects {p}", s.label)));
    }
    if is_zero_operator(p, q) {
        return Err(Error::Invalid(format!("d^{p}_{q} is identically zero")));
    }
    let st = standard();
    let x = &s.payload;
    let out = match (p, q) {
        // d f = d¹₇ f
        (One, Seven) => d_poly(x),
        // d⁷₇α = ∗d(α∧∗σ); the opposite sign breaks the remaining rows
        (Seven, Seven) => star(&d_poly(&wedge_const(x, st.psi()))),
        // d(∗α) = −d⁷₁α ∗1
        (Seven, One) => -star(&d_poly(&star(x))),
        // dα = ⅓∗(d⁷₇α∧∗σ) + d⁷₁₄α
        (Seven, Fourteen) => d_poly(x).map(2, |f| Fourteen.project(f)),
        // d∗(α∧∗σ) = −(3/7)d⁷₁α σ − ½∗(d⁷₇α∧σ) + d⁷₂₇α
        (Seven, TwentySeven) => {
            d_poly(&star(&wedge_const(x, st.psi()))).map(3, |f| TwentySeven.project(f))
        }
        // d(∗β) = ∗d¹⁴₇β
        (Fourteen, Seven) => star(&d_poly(&star(x))),
        // dβ = ¼∗(d¹⁴₇β∧σ) + d¹⁴₂₇β
        (Fourteen, TwentySeven) => d_poly(x).map(3, |f| TwentySeven.project(f)),
        // dγ = ¼ d²⁷₇γ∧σ + ∗d²⁷₂₇γ
        (TwentySeven, Seven) => from_wedge_sigma(&d_poly(x)).scale(&Rational::from_i64(4)),
        (TwentySeven, TwentySeven) => star(&d_poly(x)).map(3, |f| TwentySeven.project(f)),
        // d(∗γ) = −⅓ d²⁷₇γ∧∗σ − ∗d²⁷₁₄γ
        (TwentySeven, Fourteen) => -star(&d_poly(&star(x))).map(2, |f| Fourteen.project(f)),
        _ => unreachable!("zero operators handled above"),
    };
    TypedSection::new(q, out)
}

/// All ordered pairs (p, q) with d^p_q not identically zero.
pub fn nonzero_operators() -> Vec<(Label, Label)> {
    let mut v = Vec::new();
    for p in Label::ALL {
        for q in Label::ALL {
            if !is_zero_operator(p, q) {
                v.push((p, q));
            }
        }
    }
    v
}

/// The components that the six vanishing operators would produce: they must all be zero.
pub fn zero_operator_residual(p: Label, q: Label, s: &TypedSection) -> Result<PolyForm> {
    use Label::*;
    if !is_zero_operator(p, q) || s.label != p {
        return Err(Error::Invalid(format!("d^{p}_{q} is not a vanishing operator for this section")));
    }
    let st = standard();
    let x = &s.payload;
    let one_part = |w: &PolyForm| w.map(3, |f| st.project3(f).expect("degree 3").gamma1);
    Ok(match (p, q) {
        // Λ⁴₁ and Λ⁴₂₇ parts of d(fσ), as 3-forms after ∗
        (One, One) => one_part(&star(&d_poly(&wedge_const(x, st.sigma())))),
        (One, TwentySeven) => star(&d_poly(&wedge_const(x, st.sigma()))).map(3, |f| TwentySeven.project(f)),
        // Λ⁵₁₄ part of d(f∗σ)
        (One, Fourteen) => star(&d_poly(&wedge_const(x, st.psi()))).map(2, |f| Fourteen.project(f)),
        // Λ³₁ part of dβ
        (Fourteen, One) => one_part(&d_poly(x)),
        // Λ³ has no 14 summand: dβ is exhausted by its 1, 7 and 27 parts
        (Fourteen, Fourteen) => d_poly(x).map(3, |f| {
            let c = st.project3(f).expect("degree 3");
            f - &(&(&c.gamma1 + &c.gamma7) + &c.gamma27)
        }),
        // Λ⁴₁ part of dγ
        (TwentySeven, One) => one_part(&star(&d_poly(x))),
        _ => unreachable!(),
    })
}

/// Flat Hodge Laplacian dδ + δd with δ = (−1)^p ∗d∗.
pub fn laplacian(a: &PolyForm) -> PolyForm {
    let delta = |b: &PolyForm| -> PolyForm {
        if b.degree() == 0 {
            return PolyForm::zero(0);
        }
        let r = star(&d_poly(&star(b)));
        if b.degree() % 2 == 1 {
            -r
        } else {
            r
        }
    };
    let mut out = delta(&d_poly(a));
    if a.degree() > 0 {
        out = out + d_poly(&delta(a));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64) -> Rational {
        Rational::from_i64(n)
    }

    fn x(i: usize) -> Monomial {
        let mut m = [0u8; 7];
        m[i - 1] = 1;
        m
    }

    #[test]
    fn d_examples() {
        let x1 = PolyForm::monomial(x(1), Form::constant(q(1)));
        assert_eq!(d_poly(&x1), PolyForm::constant(Form::basis(&[1])));
        let a = PolyForm::monomial(x(2), Form::basis(&[1]));
        assert_eq!(d_poly(&a), PolyForm::constant(-Form::<Rational>::basis(&[1, 2])));
        assert!(d_poly(&PolyForm::constant(crate::g2::phi())).is_zero());
    }

    #[test]
    fn d17_is_d_and_fsigma_row() {
        let f = PolyForm::monomial([1, 1, 0, 0, 0, 0, 0], Form::constant(q(1)))
            + PolyForm::monomial([0, 0, 2, 0, 0, 0, 0], Form::constant(q(1)));
        let s = TypedSection::new(Label::One, f.clone()).unwrap();
        let df = dpq(Label::One, Label::Seven, &s).unwrap();
        assert_eq!(df.payload(), &d_poly(&f));
        let phi = crate::g2::phi::<Rational>();
        assert_eq!(d_poly(&wedge_const(&f, &phi)), wedge_const(df.payload(), &phi));
        assert!(dpq(Label::Seven, Label::Seven, &df).unwrap().payload().is_zero());
    }

    #[test]
    fn zero_operators_rejected() {
        let s = TypedSection::new(Label::One, PolyForm::zero(0)).unwrap();
        assert!(dpq(Label::One, Label::TwentySeven, &s).is_err());
        assert_eq!(nonzero_operators().len(), 10);
    }

    #[test]
    fn impure_rejected() {
        let b = PolyForm::constant(Form::<Rational>::basis(&[1, 2]));
        assert!(matches!(TypedSection::new(Label::Fourteen, b), Err(Error::Impure(_))));
    }

    #[test]
    fn constant_sections_are_killed() {
        let g = PolyForm::constant(Label::TwentySeven.project(&Form::basis(&[1, 2, 4])));
        let s = TypedSection::new(Label::TwentySeven, g).unwrap();
        for q in [Label::Seven, Label::Fourteen, Label::TwentySeven] {
            assert!(dpq(Label::TwentySeven, q, &s).unwrap().payload().is_zero());
        }
    }

    #[test]
    fn function_laplacian_sign() {
        let f = PolyForm::monomial([2, 0, 0, 0, 0, 0, 0], Form::constant(q(1)));
        assert_eq!(laplacian(&f), PolyForm::constant(Form::constant(q(-2))));
    }
}
