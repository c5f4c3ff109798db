//! Torsion forms and curvature of invariant G2-structures.

use crate::definite::{metric_from, DefiniteStructure};
use crate::error::{Error, Result};
use crate::exterior::Form;
use crate::g2::SymTensor;
use crate::scalar::Scalar;

use super::LieAlgebra7;

/// τ₀,…,τ₃ with dσ = τ₀∗σ + 3τ₁∧σ + ∗τ₃ and d∗σ = 4τ₁∧∗σ + τ₂∧σ.
#[derive(Clone, Debug, PartialEq)]
pub struct TorsionForms<S: Scalar> {
    pub tau0: S,
    /// τ₁ read off from dσ.
    pub tau1: Form<S>,
    /// τ₁ read off independently from d∗σ.
    pub tau1_from_dpsi: Form<S>,
    pub tau2: Form<S>,
    pub tau3: Form<S>,
}

impl<S: Scalar> TorsionForms<S> {
    pub fn is_zero(&self, tol: f64) -> bool {
        self.tau0.is_negligible(tol)
            && negligible(&self.tau1, tol)
            && negligible(&self.tau2, tol)
            && negligible(&self.tau3, tol)
    }
}

/// A residual form together with its squared norm.
#[derive(Clone, Debug, PartialEq)]
pub struct Residual<S: Scalar> {
    pub form: Form<S>,
    pub norm2: S,
}

impl<S: Scalar> Residual<S> {
    fn new(st: &DefiniteStructure<S>, form: Form<S>) -> Self {
        let norm2 = st.norm2(&form);
        Residual { form, norm2 }
    }

    pub fn norm(&self) -> f64 {
        self.norm2.to_f64().max(0.0).sqrt()
    }

    pub fn is_zero(&self) -> bool {
        self.form.is_zero()
    }
}

/// One j-term of the Ricci formula, already multiplied by its coefficient.
#[derive(Clone, Debug)]
pub struct RicciTerm<S: Scalar> {
    pub label: &'static str,
    pub value: SymTensor<S>,
}

#[derive(Clone, Debug)]
pub struct CurvatureReport<S: Scalar> {
    pub scal: S,
    pub ric: SymTensor<S>,
    pub ric0: SymTensor<S>,
    /// Eigenvalues of Ric relative to g, ascending.
    pub spectrum: Vec<f64>,
    /// 21|Ric⁰|² / (4 Scal²), when Scal ≠ 0.
    pub pinch_ratio: Option<S>,
    /// Coefficient of g in the Ricci formula.
    pub g_coefficient: S,
    pub terms: Vec<RicciTerm<S>>,
}

#[derive(Clone, Debug)]
pub struct ClosedReport<S: Scalar> {
    pub tau2: Form<S>,
    pub dtau2: Form<S>,
    pub tau2_norm2: S,
    pub scal: S,
    /// ⟨dτ₂, σ⟩/7, to compare against |τ₂|²/7.
    pub lambda1_coefficient: S,
    pub lambda7_part: Form<S>,
    /// γ = dτ₂ − (|τ₂|²/7)σ.
    pub gamma: Form<S>,
    /// ¼|τ₂|²g − ¼j(dτ₂ − ½∗(τ₂∧τ₂)).
    pub closed_ricci: SymTensor<S>,
    pub curvature: CurvatureReport<S>,
    pub pinch_ratio: Option<S>,
    pub einstein: Residual<S>,
    pub scal_nonpositive: bool,
}

#[derive(Clone, Debug)]
pub struct NaturalReport<S: Scalar> {
    pub residual: Residual<S>,
    /// d(τ₂³) − 3(6λ−1)/7·|τ₂|⁴·vol, meaningful when the residual vanishes.
    pub tau_cubed: Form<S>,
}

fn negligible<S: Scalar>(f: &Form<S>, tol: f64) -> bool {
    if S::EXACT {
        f.is_zero()
    } else {
        f.max_abs() <= tol
    }
}

/// A definite σ on a Lie algebra with dσ and d∗σ cached.
#[derive(Clone, Debug)]
pub struct G2Structure<'a, S: Scalar> {
    algebra: &'a LieAlgebra7<S>,
    st: DefiniteStructure<S>,
    dsigma: Form<S>,
    dpsi: Form<S>,
}

impl<'a, S: Scalar> G2Structure<'a, S> {
    pub fn new(algebra: &'a LieAlgebra7<S>, sigma: &Form<S>) -> Result<Self> {
        Ok(Self::from_structure(algebra, metric_from(sigma)?))
    }

    pub fn from_structure(algebra: &'a LieAlgebra7<S>, st: DefiniteStructure<S>) -> Self {
        let dsigma = algebra.d(st.sigma());
        let dpsi = algebra.d(st.psi());
        G2Structure { algebra, st, dsigma, dpsi }
    }

    pub fn algebra(&self) -> &LieAlgebra7<S> {
        self.algebra
    }

    pub fn structure(&self) -> &DefiniteStructure<S> {
        &self.st
    }

    pub fn d_sigma(&self) -> &Form<S> {
        &self.dsigma
    }

    pub fn d_psi(&self) -> &Form<S> {
        &self.dpsi
    }

    /// δa = (−1)^p ∗d∗a.
    pub fn delta(&self, a: &Form<S>) -> Result<Form<S>> {
        codifferential(self.algebra, &self.st, a)
    }

    fn scale(&self) -> f64 {
        1.0 + self.dsigma.max_abs().max(self.dpsi.max_abs())
    }

    /// Extract τ₀,…,τ₃ and check purity and the two τ₁ extractions against
    /// `tol` (relative to the size of dσ, d∗σ; exact zero for exact scalars).
    pub fn torsion(&self, tol: f64) -> Result<TorsionForms<S>> {
        let t = self.torsion_unchecked()?;
        let st = &self.st;
        let scale = tol * self.scale();
        let check = |f: &Form<S>| -> Result<()> {
            if negligible(f, scale) {
                Ok(())
            } else {
                Err(Error::Impure(f.max_abs()))
            }
        };
        check(&(&t.tau1 - &t.tau1_from_dpsi))?;
        check(&st.project2(&t.tau2)?.beta7)?;
        let p3 = st.project3(&t.tau3)?;
        check(&p3.gamma1)?;
        check(&p3.gamma7)?;
        Ok(t)
    }

    /// The torsion forms without the purity checks.
    pub fn torsion_unchecked(&self) -> Result<TorsionForms<S>> {
        let st = &self.st;
        let psi = st.psi();
        let sigma = st.sigma();
        let tau0 = st.inner(&self.dsigma, psi)? / S::from_i64(7);
        let tau1 = st.star(&st.star(&self.dsigma).wedge(sigma)).scale(&S::ratio(-1, 12));
        let tau1_from_dpsi = st.star(&st.star(&self.dpsi).wedge(psi)).scale(&S::ratio(1, 12));
        let tau2 = -st.star(&(&self.dpsi - &tau1.wedge(psi).scale(&S::from_i64(4))));
        let tau3 = st.star(
            &(&self.dsigma - &psi.scale(&tau0) - tau1.wedge(sigma).scale(&S::from_i64(3))),
        );
        Ok(TorsionForms { tau0, tau1, tau1_from_dpsi, tau2, tau3 })
    }

    /// τ₀∗σ + 3τ₁∧σ + ∗τ₃ and 4τ₁∧∗σ + τ₂∧σ.
    pub fn reconstruct(&self, t: &TorsionForms<S>) -> (Form<S>, Form<S>) {
        let st = &self.st;
        let ds = st.psi().scale(&t.tau0)
            + t.tau1.wedge(st.sigma()).scale(&S::from_i64(3))
            + st.star(&t.tau3);
        let dp = t.tau1.wedge(st.psi()).scale(&S::from_i64(4)) + t.tau2.wedge(st.sigma());
        (ds, dp)
    }

    pub fn scalar_curvature(&self, tol: f64) -> Result<S> {
        let t = self.torsion(tol)?;
        self.scal_from(&t)
    }

    fn scal_from(&self, t: &TorsionForms<S>) -> Result<S> {
        let st = &self.st;
        let dt1 = self.delta(&t.tau1)?.scalar_part();
        Ok(S::from_i64(12) * dt1
            + S::ratio(21, 8) * t.tau0.clone() * t.tau0.clone()
            + S::from_i64(30) * st.norm2(&t.tau1)
            - S::ratio(1, 2) * st.norm2(&t.tau2)
            - S::ratio(1, 2) * st.norm2(&t.tau3))
    }

    /// Scalar and Ricci curvature from the torsion forms.
    pub fn curvature(&self, tol: f64) -> Result<CurvatureReport<S>> {
        let t = self.torsion(tol)?;
        let st = &self.st;
        let d = |f: &Form<S>| self.algebra.d(f);
        let (t0, t1, t2, t3) = (&t.tau0, &t.tau1, &t.tau2, &t.tau3);
        let scal = self.scal_from(&t)?;
        let dt1 = self.delta(t1)?.scalar_part();
        let g_coefficient = -(S::ratio(3, 2) * dt1 - S::ratio(3, 8) * t0.clone() * t0.clone()
            + S::from_i64(15) * st.norm2(t1)
            - S::ratio(1, 4) * st.norm2(t2)
            + S::ratio(1, 2) * st.norm2(t3));
        let a = st.star(&t1.wedge(st.psi()));
        let raw: Vec<(&'static str, S, Form<S>)> = vec![
            ("d*(tau1^*sigma)", S::ratio(-5, 4), d(&a)),
            ("d tau2", S::ratio(-1, 4), d(t2)),
            ("*d tau3", S::ratio(1, 4), st.star(&d(t3))),
            ("tau1^*(tau1^*sigma)", S::ratio(5, 2), t1.wedge(&a)),
            ("tau0 tau3", S::ratio(-1, 8) * t0.clone(), t3.clone()),
            ("tau1^tau2", S::ratio(1, 4), t1.wedge(t2)),
            ("*(tau1^tau3)", S::ratio(3, 4), st.star(&t1.wedge(t3))),
            ("*(tau2^tau2)", S::ratio(1, 8), st.star(&t2.wedge(t2))),
            ("Q(tau3,tau3)", S::ratio(1, 64), st.q_pairing(t3, t3)?),
        ];
        let g = st.metric();
        let mut ric = g.matrix().scale(&g_coefficient);
        let mut terms = Vec::with_capacity(raw.len());
        for (label, c, f) in raw {
            let f = f.scale(&c);
            let value = if f.is_zero() { SymTensor::zero() } else { st.j_map(&f)? };
            ric = ric.add(value.matrix());
            terms.push(RicciTerm { label, value });
        }
        let ric = SymTensor::new_unchecked(ric);
        Ok(self.report(scal, ric, g_coefficient, terms))
    }

    fn report(
        &self,
        scal: S,
        ric: SymTensor<S>,
        g_coefficient: S,
        terms: Vec<RicciTerm<S>>,
    ) -> CurvatureReport<S> {
        let g = self.st.metric();
        let ric0 = SymTensor::new_unchecked(
            ric.matrix().sub(&g.matrix().scale(&(scal.clone() / S::from_i64(7)))),
        );
        let spectrum = ric.matrix().relative_eigenvalues(g.matrix()).unwrap_or_default();
        let pinch_ratio = (!scal.is_zero()).then(|| {
            S::from_i64(21) * ric0.norm2_with(g) / (S::from_i64(4) * scal.clone() * scal.clone())
        });
        CurvatureReport { scal, ric, ric0, spectrum, pinch_ratio, g_coefficient, terms }
    }

    fn require_closed(&self, tol: f64) -> Result<()> {
        if negligible(&self.dsigma, tol) {
            Ok(())
        } else {
            Err(Error::NotClosed(self.dsigma.max_abs()))
        }
    }

    pub fn closed_report(&self, tol: f64) -> Result<ClosedReport<S>> {
        self.require_closed(tol)?;
        let st = &self.st;
        let t = self.torsion(tol)?;
        let tau2 = t.tau2;
        let dtau2 = self.algebra.d(&tau2);
        let n2 = st.norm2(&tau2);
        let seventh = S::ratio(1, 7);
        let lambda1_coefficient = st.inner(&dtau2, st.sigma())? * seventh.clone();
        let p = st.project3(&dtau2)?;
        let gamma = &dtau2 - &st.sigma().scale(&(n2.clone() * seventh));
        let gp = st.project3(&gamma)?;
        let scale = tol * (1.0 + dtau2.max_abs());
        if !negligible(&gp.gamma1, scale) || !negligible(&gp.gamma7, scale) {
            return Err(Error::Impure(gp.gamma1.max_abs().max(gp.gamma7.max_abs())));
        }
        let tt = st.star(&tau2.wedge(&tau2));
        let inner = &dtau2 - &tt.scale(&S::ratio(1, 2));
        let closed_ricci = st
            .metric()
            .matrix()
            .scale(&(n2.clone() * S::ratio(1, 4)))
            .sub(&st.j_map(&inner)?.matrix().scale(&S::ratio(1, 4)));
        let curvature = self.curvature(tol)?;
        let closed_ricci = SymTensor::new_unchecked(closed_ricci);
        let scal = -(n2.clone() * S::ratio(1, 2));
        let pinch_ratio = curvature.pinch_ratio.clone();
        let einstein = Residual::new(
            st,
            &dtau2 - &st.sigma().scale(&(n2.clone() * S::ratio(3, 14))) - tt.scale(&S::ratio(1, 2)),
        );
        Ok(ClosedReport {
            tau2,
            dtau2,
            scal_nonpositive: scal.signum() <= 0,
            tau2_norm2: n2,
            scal,
            lambda1_coefficient,
            lambda7_part: p.gamma7,
            gamma,
            closed_ricci,
            curvature,
            pinch_ratio,
            einstein,
        })
    }

    /// dτ₂ − (1/6)(|τ₂|²σ + ∗(τ₂∧τ₂)).
    pub fn erp_residual(&self, tol: f64) -> Result<Residual<S>> {
        self.natural_residual(&S::ratio(1, 6), tol).map(|r| r.residual)
    }

    /// dτ₂ − (1/7)|τ₂|²σ − λ((1/7)|τ₂|²σ + ∗(τ₂∧τ₂)).
    pub fn natural_residual(&self, lambda: &S, tol: f64) -> Result<NaturalReport<S>> {
        self.require_closed(tol)?;
        let st = &self.st;
        let tau2 = self.torsion(tol)?.tau2;
        let n2 = st.norm2(&tau2);
        let a = st.sigma().scale(&(n2.clone() * S::ratio(1, 7)));
        let rhs = &a + &(&a + &st.star(&tau2.wedge(&tau2))).scale(lambda);
        let residual = Residual::new(st, &self.algebra.d(&tau2) - &rhs);
        let c = S::from_i64(3) * (S::from_i64(6) * lambda.clone() - S::one()) / S::from_i64(7);
        let tau_cubed = self.algebra.d(&tau2.power(3))
            - st.volume_form().scale(&(c * n2.clone() * n2));
        Ok(NaturalReport { residual, tau_cubed })
    }
}

pub fn codifferential<S: Scalar>(
    l: &LieAlgebra7<S>,
    st: &DefiniteStructure<S>,
    a: &Form<S>,
) -> Result<Form<S>> {
    let p = a.degree();
    if p == 0 {
        return Err(Error::Invalid("codifferential of a 0-form".into()));
    }
    let r = st.star(&l.d(&st.star(a)));
    Ok(if p % 2 == 1 { -r } else { r })
}

pub fn torsion_forms<S: Scalar>(l: &LieAlgebra7<S>, sigma: &Form<S>, tol: f64) -> Result<TorsionForms<S>> {
    G2Structure::new(l, sigma)?.torsion(tol)
}

pub fn scalar_curvature<S: Scalar>(l: &LieAlgebra7<S>, sigma: &Form<S>, tol: f64) -> Result<S> {
    G2Structure::new(l, sigma)?.scalar_curvature(tol)
}

pub fn ricci_torsion_formula<S: Scalar>(
    l: &LieAlgebra7<S>,
    sigma: &Form<S>,
    tol: f64,
) -> Result<CurvatureReport<S>> {
    G2Structure::new(l, sigma)?.curvature(tol)
}

pub fn closed_structure_report<S: Scalar>(
    l: &LieAlgebra7<S>,
    sigma: &Form<S>,
    tol: f64,
) -> Result<ClosedReport<S>> {
    G2Structure::new(l, sigma)?.closed_report(tol)
}

pub fn erp_residual<S: Scalar>(l: &LieAlgebra7<S>, sigma: &Form<S>, tol: f64) -> Result<Residual<S>> {
    G2Structure::new(l, sigma)?.erp_residual(tol)
}

pub fn natural_equation_residual<S: Scalar>(
    l: &LieAlgebra7<S>,
    sigma: &Form<S>,
    lambda: &S,
    tol: f64,
) -> Result<NaturalReport<S>> {
    G2Structure::new(l, sigma)?.natural_residual(lambda, tol)
}
