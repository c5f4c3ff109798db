//! Definite 3-forms and the structures they induce.

use crate::error::{Error, Result};
use crate::exterior::metric::{inner_unchecked, star_with};
use crate::exterior::{mask, Covector, Form, Metric, Orientation, Vector};
use crate::g2::{self, SymTensor};
use crate::matrix::Matrix;
use crate::scalar::Scalar;

/// Normalized eigenvalue margin below which a float 3-form counts as degenerate.
pub const MARGIN_TOL: f64 = 1e-12;

/// A definite 3-form σ together with g_σ, vol_σ, the orientation, and ∗σσ.
#[derive(Clone, Debug)]
pub struct DefiniteStructure<S: Scalar> {
    sigma: Form<S>,
    psi: Form<S>,
    metric: Metric<S>,
    // vol_σ = s·e^{1…7}; s = o·√det g
    s: S,
    orientation: Orientation,
    margin: f64,
}

/// The triple (f⁰, f¹, f³) with σ̇ = 3f⁰σ + ∗(f¹∧σ) + f³.
#[derive(Clone, Debug, PartialEq)]
pub struct DeformationForms<S: Scalar> {
    pub f0: S,
    pub f1: Form<S>,
    pub f3: Form<S>,
}

/// Predicted first derivatives of g, ∗σσ and the volume coefficient.
#[derive(Clone, Debug)]
pub struct PredictedDerivatives<S: Scalar> {
    pub metric: SymTensor<S>,
    pub dual4: Form<S>,
    pub volume: S,
}

/// The matrix b_ij = [(e_i⌟σ)∧(e_j⌟σ)∧σ]_{1…7}.
pub fn bilinear_b<S: Scalar>(sigma: &Form<S>) -> Matrix<S> {
    let c: Vec<Form<S>> = (1..=7).map(|i| sigma.contract(&Vector::basis(i))).collect();
    let w: Vec<Form<S>> = c.iter().map(|ci| ci.wedge(sigma)).collect();
    let mut b = Matrix::zeros(7);
    for i in 0..7 {
        for j in i..7 {
            let v = c[i].wedge(&w[j]).scalar_part();
            b[(i, j)] = v.clone();
            b[(j, i)] = v;
        }
    }
    b
}

fn margin_of<S: Scalar>(b: &Matrix<S>) -> f64 {
    let ev = b.symmetric_eigenvalues();
    let lo = ev.iter().map(|x| x.abs()).fold(f64::INFINITY, f64::min);
    let hi = ev.iter().map(|x| x.abs()).fold(0.0, f64::max);
    if hi == 0.0 {
        0.0
    } else {
        lo / hi
    }
}

fn definite_sign<S: Scalar>(b: &Matrix<S>) -> Option<i32> {
    let minors = b.leading_minors();
    if minors.iter().all(|m| m.signum() > 0) {
        return Some(1);
    }
    let alt = minors.iter().enumerate().all(|(k, m)| {
        let want = if k % 2 == 0 { -1 } else { 1 };
        m.signum() == want
    });
    alt.then_some(-1)
}

/// Whether σ is definite, with the normalized margin min|λ(b)| / max|λ(b)|.
pub fn is_definite<S: Scalar>(sigma: &Form<S>) -> Result<(bool, f64)> {
    sigma.expect_degree(3)?;
    let b = bilinear_b(sigma);
    let margin = margin_of(&b);
    let ok = definite_sign(&b).is_some() && (S::EXACT || margin >= MARGIN_TOL);
    Ok((ok, margin))
}

/// Build the structure induced by a definite 3-form.
pub fn metric_from<S: Scalar>(sigma: &Form<S>) -> Result<DefiniteStructure<S>> {
    sigma.expect_degree(3)?;
    let b = bilinear_b(sigma);
    let margin = margin_of(&b);
    if definite_sign(&b).is_none() || (!S::EXACT && margin < MARGIN_TOL) {
        return Err(Error::NotDefinite { margin });
    }
    let six = S::from_i64(6);
    let s = (b.det() / six.powi(7)).nth_root(9).ok_or(Error::NotRepresentable)?;
    let g = b.scale(&(S::one() / (six * s.clone())));
    let metric = Metric::with_sqrt_det(g, s.abs())?;
    let orientation = Orientation::from_sign(s.signum());
    let psi = star_with(sigma, &metric, &s);
    Ok(DefiniteStructure { sigma: sigma.clone(), psi, metric, s, orientation, margin })
}

impl<S: Scalar> DefiniteStructure<S> {
    /// The reference structure φ with the identity metric.
    pub fn standard() -> Self {
        DefiniteStructure {
            sigma: g2::phi(),
            psi: g2::star_phi(),
            metric: Metric::identity(),
            s: S::one(),
            orientation: Orientation::Positive,
            margin: 1.0,
        }
    }

    pub fn sigma(&self) -> &Form<S> {
        &self.sigma
    }

    /// ∗σσ.
    pub fn psi(&self) -> &Form<S> {
        &self.psi
    }

    pub fn metric(&self) -> &Metric<S> {
        &self.metric
    }

    pub fn orientation(&self) -> Orientation {
        self.orientation
    }

    pub fn margin(&self) -> f64 {
        self.margin
    }

    /// Coefficient of vol_σ against e^{1…7}.
    pub fn volume_factor(&self) -> &S {
        &self.s
    }

    pub fn volume_form(&self) -> Form<S> {
        Form::from_terms(7, [(mask::FULL, self.s.clone())])
    }

    pub fn star(&self, a: &Form<S>) -> Form<S> {
        star_with(a, &self.metric, &self.s)
    }

    pub fn inner(&self, a: &Form<S>, b: &Form<S>) -> Result<S> {
        b.expect_degree(a.degree())?;
        Ok(inner_unchecked(a, b, &self.metric))
    }

    pub fn norm2(&self, a: &Form<S>) -> S {
        inner_unchecked(a, a, &self.metric)
    }

    /// α♯ for a 1-form α.
    pub fn sharp(&self, a: &Form<S>) -> Result<Vector<S>> {
        Ok(crate::exterior::sharp(&Covector::from_form(a)?, &self.metric))
    }

    /// G′(σ)(ψ) = ½ j(ψ) − ⅓ ∗(ψ∧∗σ) g.
    pub fn metric_linearization(&self, psi: &Form<S>) -> Result<SymTensor<S>> {
        let j = self.j_map(psi)?;
        let c = self.star(&psi.wedge(&self.psi)).scalar_part() / S::from_i64(3);
        let g = self.metric.matrix().scale(&c);
        Ok(SymTensor::new_unchecked(j.matrix().scale(&S::ratio(1, 2)).sub(&g)))
    }

    /// (a² − |α|²)σ + 2a∗(α∧σ) + i(α∘α), valid when a² + |α|² = 1.
    pub fn same_metric_family(&self, a: &S, alpha: &Form<S>, tol: f64) -> Result<Form<S>> {
        alpha.expect_degree(1)?;
        let n = self.norm2(alpha);
        let norm = a.clone() * a.clone() + n.clone() - S::one();
        if !norm.is_negligible(tol) {
            return Err(Error::Invalid(format!(
                "a² + |α|² must equal 1 (off by {:e})",
                norm.to_f64()
            )));
        }
        let al = Covector::from_form(alpha)?;
        let h = SymTensor::new_unchecked(Matrix::from_fn(7, |i, j| al.0[i].clone() * al.0[j].clone()));
        let t1 = self.sigma.scale(&(a.clone() * a.clone() - n));
        let t2 = self.star(&alpha.wedge(&self.sigma)).scale(&(S::from_i64(2) * a.clone()));
        Ok(t1 + t2 + self.i_map(&h))
    }

    /// Split σ̇ into deformation forms.
    pub fn deformation_split(&self, sdot: &Form<S>) -> Result<DeformationForms<S>> {
        sdot.expect_degree(3)?;
        let parts = self.project3(sdot)?;
        let f0 = self.inner(sdot, &self.sigma)? / S::from_i64(21);
        let f1 = self.lambda3_7_to_one_form(&parts.gamma7);
        Ok(DeformationForms { f0, f1, f3: parts.gamma27 })
    }

    pub fn reconstruct(&self, f: &DeformationForms<S>) -> Form<S> {
        self.sigma.scale(&(S::from_i64(3) * f.f0.clone()))
            + self.star(&f.f1.wedge(&self.sigma))
            + f.f3.clone()
    }

    /// ġ = 2f⁰g + ½j(f³), (∗σσ)˙ = 4f⁰∗σσ + f¹∧σ − ∗f³, vol˙ = 7f⁰·vol.
    pub fn predicted_derivatives(
        &self,
        f: &DeformationForms<S>,
        tol: f64,
    ) -> Result<PredictedDerivatives<S>> {
        f.f1.expect_degree(1)?;
        f.f3.expect_degree(3)?;
        let pure = self.project3(&f.f3)?;
        let leak = pure.gamma1.max_abs().max(pure.gamma7.max_abs());
        if !S::EXACT && leak > tol * (1.0 + f.f3.max_abs()) || S::EXACT && leak != 0.0 {
            return Err(Error::Impure(leak));
        }
        let two = S::from_i64(2);
        let metric = self
            .metric
            .matrix()
            .scale(&(two * f.f0.clone()))
            .add(&self.j_map(&f.f3)?.matrix().scale(&S::ratio(1, 2)));
        let dual4 = self.psi.scale(&(S::from_i64(4) * f.f0.clone())) + f.f1.wedge(&self.sigma)
            - self.star(&f.f3);
        let volume = S::from_i64(7) * f.f0.clone() * self.s.clone();
        Ok(PredictedDerivatives { metric: SymTensor::new_unchecked(metric), dual4, volume })
    }
}

/// Second-order model of vol(σ)/vol(φ) for σ = φ + 3b₀φ + ∗(b₁∧φ) + b₃.
pub fn taylor_volume<S: Scalar>(b0: &S, b1: &Form<S>, b3: &Form<S>) -> Result<S> {
    b1.expect_degree(1)?;
    b3.expect_degree(3)?;
    let st = DefiniteStructure::<S>::standard();
    let n1 = st.norm2(b1);
    let n3 = st.norm2(b3);
    Ok(S::one()
        + S::from_i64(7) * b0.clone()
        + S::from_i64(14) * b0.clone() * b0.clone()
        + S::ratio(2, 3) * n1
        - S::ratio(1, 6) * n3)
}

/// The perturbed form φ + 3b₀φ + ∗(b₁∧φ) + b₃ used by [`taylor_volume`].
pub fn linear_deform<S: Scalar>(b0: &S, b1: &Form<S>, b3: &Form<S>) -> Form<S> {
    let st = DefiniteStructure::<S>::standard();
    let phi = g2::phi::<S>();
    phi.scale(&(S::one() + S::from_i64(3) * b0.clone())) + st.star(&b1.wedge(&phi)) + b3.clone()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rational;

    type Q = Rational;

    #[test]
    fn standard_structure_from_phi() {
        let s = metric_from(&g2::phi::<Q>()).unwrap();
        assert_eq!(s.metric().matrix(), &Matrix::identity(7));
        assert_eq!(s.volume_form(), Form::volume());
        assert_eq!(s.psi(), &g2::star_phi());
        assert_eq!(s.orientation(), Orientation::Positive);
    }

    #[test]
    fn negative_phi() {
        let s = metric_from(&-g2::phi::<Q>()).unwrap();
        assert_eq!(s.metric().matrix(), &Matrix::identity(7));
        assert_eq!(s.orientation(), Orientation::Negative);
        assert!(is_definite(&-g2::phi::<Q>()).unwrap().0);
    }

    #[test]
    fn degenerate_rejected() {
        let e123 = Form::<Q>::basis(&[1, 2, 3]);
        assert!(!is_definite(&e123).unwrap().0);
        assert!(matches!(metric_from(&e123), Err(Error::NotDefinite { .. })));
        assert!(is_definite(&Form::<Q>::basis(&[1, 2])).is_err());
    }

    #[test]
    fn scaling() {
        let l = Q::from_i64(2);
        let s = metric_from(&g2::phi::<Q>().scale(&l.powi(3))).unwrap();
        assert_eq!(s.metric().matrix(), &Matrix::identity(7).scale(&l.powi(2)));
        assert_eq!(s.volume_form(), Form::volume().scale(&l.powi(7)));
    }

    #[test]
    fn linearization_on_sigma() {
        let s = DefiniteStructure::<Q>::standard();
        let h = s.metric_linearization(s.sigma()).unwrap();
        assert_eq!(h.matrix(), &Matrix::identity(7).scale(&Q::ratio(2, 3)));
    }

    #[test]
    fn split_examples() {
        let s = DefiniteStructure::<Q>::standard();
        let f = s.deformation_split(s.sigma()).unwrap();
        assert_eq!(f.f0, Q::ratio(1, 3));
        assert!(f.f1.is_zero() && f.f3.is_zero());
        let alpha = Form::<Q>::basis(&[2]) + Form::term(Q::from_i64(3), &[5]);
        let f = s.deformation_split(&s.star(&alpha.wedge(s.sigma()))).unwrap();
        assert_eq!(f.f0, Q::from_i64(0));
        assert_eq!(f.f1, alpha);
        assert!(f.f3.is_zero());
    }

    #[test]
    fn family_endpoints() {
        let s = DefiniteStructure::<Q>::standard();
        let z = Form::zero(1);
        assert_eq!(&s.same_metric_family(&Q::from_i64(1), &z, 0.0).unwrap(), s.sigma());
        assert_eq!(&s.same_metric_family(&Q::from_i64(-1), &z, 0.0).unwrap(), s.sigma());
        assert!(s.same_metric_family(&Q::from_i64(2), &z, 0.0).is_err());
        let e1 = Form::<Q>::basis(&[1]);
        let t = s.same_metric_family(&Q::from_i64(0), &e1, 0.0).unwrap();
        let st = metric_from(&t).unwrap();
        assert_eq!(st.metric().matrix(), &Matrix::identity(7));
        assert_eq!(st.orientation(), Orientation::Positive);
    }

    #[test]
    fn taylor_pure_scaling() {
        let t = Q::ratio(1, 10);
        let v = taylor_volume(&t, &Form::zero(1), &Form::zero(3)).unwrap();
        assert_eq!(v, Q::from_i64(1) + Q::ratio(7, 10) + Q::ratio(14, 100));
        let one = taylor_volume(&Q::from_i64(0), &Form::zero(1), &Form::zero(3)).unwrap();
        assert_eq!(one, Q::from_i64(1));
    }
}
