//! Laplacian flow dσ/dt = Δσ for invariant G2-structures.
//!
//! The state is the 35-vector of coefficients of σ in the ω^{ijk} basis, and
//! time stepping is fixed-step classical RK4.

use std::fmt::Write as _;
use std::io;
use std::path::Path;

use crate::definite::metric_from;
use crate::error::{Error, Result};
use crate::exterior::Form;
use crate::g2::{self, SymTensor};
use crate::invariant::{G2Structure, LieAlgebra7};
use crate::matrix::Matrix;
use crate::scalar::Scalar;

pub const MARGIN_STOP: f64 = 1e-10;
pub const CLOSED_STOP: f64 = 1e-8;

pub const CSV_HEADER: &str = "t,vol,tau2_sq,scal,ric1,ric2,ric3,ric4,ric5,ric6,ric7,margin,closed_residual";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FlowMode {
    /// dσ/dt = dτ₂, for closed σ.
    Closed,
    /// dσ/dt = dδσ + δdσ.
    General,
}

/// Δσ = dδσ + δdσ.
pub fn hodge_laplacian<S: Scalar>(l: &LieAlgebra7<S>, sigma: &Form<S>) -> Result<Form<S>> {
    let s = G2Structure::new(l, sigma)?;
    Ok(laplacian_of(&s))
}

fn laplacian_of<S: Scalar>(s: &G2Structure<'_, S>) -> Form<S> {
    let l = s.algebra();
    let sigma = s.structure().sigma();
    let a = l.d(&s.delta(sigma).expect("degree 3"));
    let b = s.delta(s.d_sigma()).expect("degree 4");
    a + b
}

pub fn flow_rhs<S: Scalar>(l: &LieAlgebra7<S>, sigma: &Form<S>, mode: FlowMode) -> Result<Form<S>> {
    let s = G2Structure::new(l, sigma)?;
    rhs_of(&s, mode)
}

fn rhs_of<S: Scalar>(s: &G2Structure<'_, S>, mode: FlowMode) -> Result<Form<S>> {
    match mode {
        FlowMode::Closed => Ok(s.algebra().d(&s.torsion_unchecked()?.tau2)),
        FlowMode::General => Ok(laplacian_of(s)),
    }
}

/// One recorded sample of a flow.
#[derive(Clone, Debug, PartialEq)]
pub struct FlowRow {
    pub t: f64,
    pub vol: f64,
    pub tau2_sq: f64,
    pub scal: f64,
    pub spectrum: [f64; 7],
    pub margin: f64,
    pub closed_residual: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub enum FlowStatus {
    ReachedEnd,
    LostDefiniteness,
    StepFailure(String),
}

#[derive(Clone, Debug)]
pub struct FlowTrace {
    pub rows: Vec<FlowRow>,
    pub status: FlowStatus,
    /// σ at the last recorded time.
    pub sigma: Form<f64>,
}

#[derive(Clone, Copy, Debug)]
pub struct FlowOptions {
    pub t_end: f64,
    pub dt: f64,
    pub mode: FlowMode,
}

fn sample(l: &LieAlgebra7<f64>, sigma: &Form<f64>, t: f64) -> Result<FlowRow> {
    let s = G2Structure::new(l, sigma)?;
    let st = s.structure();
    let tau = s.torsion_unchecked()?;
    let tau2_sq = st.norm2(&tau.tau2);
    let closed_residual = s.d_sigma().max_abs();
    let (scal, ric) = if closed_residual == 0.0 || closed_residual <= CLOSED_STOP {
        (-0.5 * tau2_sq, closed_ricci(&s, &tau.tau2)?)
    } else {
        let c = s.curvature(f64::INFINITY)?;
        (c.scal, c.ric)
    };
    let ev = ric.matrix().relative_eigenvalues(st.metric().matrix()).unwrap_or_default();
    let mut spectrum = [f64::NAN; 7];
    spectrum[..ev.len()].copy_from_slice(&ev);
    Ok(FlowRow {
        t,
        vol: *st.volume_factor(),
        tau2_sq,
        scal,
        spectrum,
        margin: st.margin(),
        closed_residual,
    })
}

// ¼|τ₂|²g − ¼j(dτ₂ − ½∗(τ₂∧τ₂))
fn closed_ricci(s: &G2Structure<'_, f64>, tau2: &Form<f64>) -> Result<SymTensor<f64>> {
    let st = s.structure();
    let n2 = st.norm2(tau2);
    let inner = s.algebra().d(tau2) - st.star(&tau2.wedge(tau2)).scale(&0.5);
    let j = st.j_map(&inner)?;
    SymTensor::new(st.metric().matrix().scale(&(0.25 * n2)).sub(&j.matrix().scale(&0.25)))
}

fn rk4_step(l: &LieAlgebra7<f64>, sigma: &Form<f64>, h: f64, mode: FlowMode) -> Result<Form<f64>> {
    let f = |x: &Form<f64>| -> Result<Form<f64>> { flow_rhs(l, x, mode) };
    let k1 = f(sigma)?;
    let k2 = f(&(sigma + &k1.scale(&(h / 2.0))))?;
    let k3 = f(&(sigma + &k2.scale(&(h / 2.0))))?;
    let k4 = f(&(sigma + &k3.scale(&h)))?;
    let incr = (k1 + k2.scale(&2.0) + k3.scale(&2.0) + k4).scale(&(h / 6.0));
    Ok(sigma + &incr)
}

/// Integrate from σ₀ and record one row per step, including t = 0.
pub fn run_flow(l: &LieAlgebra7<f64>, sigma0: &Form<f64>, opts: FlowOptions) -> Result<FlowTrace> {
    if !opts.dt.is_finite() || opts.dt <= 0.0 || opts.t_end.is_nan() || opts.t_end < 0.0 {
        return Err(Error::Invalid("need dt > 0 and t_end >= 0".into()));
    }
    sigma0.expect_degree(3)?;
    let first = sample(l, sigma0, 0.0)?;
    if opts.mode == FlowMode::Closed && first.closed_residual > CLOSED_STOP {
        return Err(Error::NotClosed(first.closed_residual));
    }
    let mut rows = vec![first];
    let mut sigma = sigma0.clone();
    let steps = (opts.t_end / opts.dt - 1e-9).ceil().max(0.0) as usize;
    let mut t = 0.0;
    for k in 0..steps {
        let t_next = if k + 1 == steps { opts.t_end } else { (k + 1) as f64 * opts.dt };
        let next = match rk4_step(l, &sigma, t_next - t, opts.mode) {
            Ok(x) => x,
            Err(Error::NotDefinite { .. }) | Err(Error::NotRepresentable) => {
                return Ok(FlowTrace { rows, status: FlowStatus::LostDefiniteness, sigma });
            }
            Err(e) => return Ok(FlowTrace { rows, status: FlowStatus::StepFailure(e.to_string()), sigma }),
        };
        if next.terms().any(|(_, c)| !c.is_finite()) {
            let status = FlowStatus::StepFailure(format!("non-finite coefficients at t = {t_next}"));
            return Ok(FlowTrace { rows, status, sigma });
        }
        let row = match sample(l, &next, t_next) {
            Ok(r) => r,
            Err(Error::NotDefinite { .. }) | Err(Error::NotRepresentable) => {
                return Ok(FlowTrace { rows, status: FlowStatus::LostDefiniteness, sigma });
            }
            Err(e) => return Ok(FlowTrace { rows, status: FlowStatus::StepFailure(e.to_string()), sigma }),
        };
        let margin = row.margin;
        let closed = row.closed_residual;
        rows.push(row);
        sigma = next;
        t = t_next;
        if margin < MARGIN_STOP {
            return Ok(FlowTrace { rows, status: FlowStatus::LostDefiniteness, sigma });
        }
        if opts.mode == FlowMode::Closed && closed > CLOSED_STOP {
            let status = FlowStatus::StepFailure(format!("closedness residual {closed:e} at t = {t}"));
            return Ok(FlowTrace { rows, status, sigma });
        }
    }
    Ok(FlowTrace { rows, status: FlowStatus::ReachedEnd, sigma })
}

fn fmt17(x: f64) -> String {
    format!("{:.16e}", x)
}

impl FlowTrace {
    pub fn to_csv(&self) -> String {
        let mut out = String::from(CSV_HEADER);
        out.push('\n');
        for r in &self.rows {
            let mut fields = vec![fmt17(r.t), fmt17(r.vol), fmt17(r.tau2_sq), fmt17(r.scal)];
            fields.extend(r.spectrum.iter().map(|&x| fmt17(x)));
            fields.push(fmt17(r.margin));
            fields.push(fmt17(r.closed_residual));
            let _ = writeln!(out, "{}", fields.join(","));
        }
        out
    }

    pub fn write_csv(&self, path: impl AsRef<Path>) -> io::Result<()> {
        std::fs::write(path, self.to_csv())
    }

    pub fn reached_end(&self) -> bool {
        self.status == FlowStatus::ReachedEnd
    }
}

/// The exact flow of φ on the Fernández algebra:
/// A(t)ω¹²³ + ω¹⁴⁵ + ω¹⁶⁷ + ω²⁴⁶ − ω²⁵⁷ − ω³⁴⁷ − ω³⁵⁶ with A = (1 + 10t/3)^{3/5}.
///
/// Along this family dτ₂ = 2A^{−2/3}ω¹²³, so Ȧ = 2A^{−2/3}.
pub fn fernandez_reference(t: f64) -> Form<f64> {
    with_a(fernandez_coefficient(t))
}

pub fn fernandez_coefficient(t: f64) -> f64 {
    (1.0 + 10.0 * t / 3.0).powf(0.6)
}

/// The metric of [`fernandez_reference`]: A^{2/3} on ω¹,ω²,ω³ and A^{−1/3} on the rest.
pub fn fernandez_metric(t: f64) -> Matrix<f64> {
    metric_for_a(fernandez_coefficient(t))
}

/// The family e^{2t}ω¹²³ + (the other six terms of φ), with metric
/// e^{4t/3} on ω¹,ω²,ω³ and e^{−2t/3} on the rest. It agrees with the flow to
/// first order at t = 0 only.
pub fn fernandez_exponential(t: f64) -> Form<f64> {
    with_a((2.0 * t).exp())
}

pub fn fernandez_exponential_metric(t: f64) -> Matrix<f64> {
    metric_for_a((2.0 * t).exp())
}

fn with_a(a: f64) -> Form<f64> {
    g2::phi::<f64>() + Form::term(a - 1.0, &[1, 2, 3])
}

fn metric_for_a(a: f64) -> Matrix<f64> {
    let hi = a.powf(2.0 / 3.0);
    let lo = a.powf(-1.0 / 3.0);
    Matrix::diagonal(&[hi, hi, hi, lo, lo, lo, lo])
}

/// Finite-difference rates along a closed flow against their predicted values.
#[derive(Clone, Debug)]
pub struct Monitors {
    /// (d vol/dt)/vol, measured and predicted (1/3)|τ|².
    pub vol_rate: (f64, f64),
    /// Sup-norm of ġ − (−2Ric + c|τ|²g + ¼j(∗(τ∧τ))), relative to |ġ|, for
    /// c = 8/21 and for c = 1/6.
    pub metric_residual: (f64, f64),
    /// Sup-norm of (∗σ)˙ − ((1/3)|τ|²∗σ − ∗dτ), relative.
    pub dual_residual: f64,
    /// d(|τ|²vol)/dt ÷ vol, measured and predicted (2/3)|τ|⁴ − 2|dτ|².
    pub energy_rate: (f64, f64),
    /// 4((11/21)Scal² − |Ric⁰|²), the integrand that matches d(|τ|²vol)/dt
    /// after integration.
    pub second_vol_integrand: f64,
}

/// Central differences with step h, using one RK4 step in each direction.
pub fn monitor_residuals(l: &LieAlgebra7<f64>, sigma: &Form<f64>, h: f64) -> Result<Monitors> {
    let s = G2Structure::new(l, sigma)?;
    if s.d_sigma().max_abs() > CLOSED_STOP {
        return Err(Error::NotClosed(s.d_sigma().max_abs()));
    }
    let st = s.structure();
    let tau = s.torsion_unchecked()?.tau2;
    let n2 = st.norm2(&tau);
    let dtau = l.d(&tau);
    let fwd = metric_from(&rk4_step(l, sigma, h, FlowMode::Closed)?)?;
    let bwd = metric_from(&rk4_step(l, sigma, -h, FlowMode::Closed)?)?;
    let diff = |a: f64, b: f64| (a - b) / (2.0 * h);

    let vol = *st.volume_factor();
    let vol_rate = (diff(*fwd.volume_factor(), *bwd.volume_factor()) / vol, n2 / 3.0);

    let gdot = fwd.metric().matrix().sub(bwd.metric().matrix()).scale(&(1.0 / (2.0 * h)));
    let ric = closed_ricci(&s, &tau)?;
    let tt = st.star(&tau.wedge(&tau));
    let jtt = st.j_map(&tt)?;
    let pred = |c: f64| {
        ric.matrix()
            .scale(&-2.0)
            .add(&st.metric().matrix().scale(&(c * n2)))
            .add(&jtt.matrix().scale(&0.25))
    };
    let rel = |c: f64| gdot.sub(&pred(c)).max_abs() / gdot.max_abs().max(1e-300);
    let metric_residual = (rel(8.0 / 21.0), rel(1.0 / 6.0));

    let psidot = (fwd.psi() - bwd.psi()).scale(&(1.0 / (2.0 * h)));
    let psi_pred = st.psi().scale(&(n2 / 3.0)) - st.star(&dtau);
    let dual_residual = (&psidot - &psi_pred).max_abs() / psidot.max_abs().max(1e-300);

    let energy = |x: &crate::definite::DefiniteStructure<f64>| -> Result<f64> {
        let g = G2Structure::from_structure(l, x.clone());
        let t2 = g.torsion_unchecked()?.tau2;
        Ok(x.norm2(&t2) * x.volume_factor())
    };
    let energy_rate = (
        diff(energy(&fwd)?, energy(&bwd)?) / vol,
        2.0 / 3.0 * n2 * n2 - 2.0 * st.norm2(&dtau),
    );

    let scal = -0.5 * n2;
    let ric0 = ric.traceless_with(st.metric());
    let second_vol_integrand = 4.0 * (11.0 / 21.0 * scal * scal - ric0.norm2_with(st.metric()));
    Ok(Monitors { vol_rate, metric_residual, dual_residual, energy_rate, second_vol_integrand })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::g2::phi;
    use crate::invariant::builtins;
    use crate::scalar::Rational;

    #[test]
    fn laplacian_is_dtau2_on_fernandez() {
        let l = builtins::fernandez::<Rational>();
        let lap = hodge_laplacian(&l, &phi()).unwrap();
        assert_eq!(lap, Form::term(Rational::from_i64(2), &[1, 2, 3]));
        assert_eq!(flow_rhs(&l, &phi(), FlowMode::Closed).unwrap(), lap);
        let ab = LieAlgebra7::<Rational>::abelian();
        assert!(hodge_laplacian(&ab, &phi()).unwrap().is_zero());
    }

    #[test]
    fn reference_solves_the_flow() {
        let l = builtins::fernandez::<f64>();
        for t in [0.0, 0.3, 1.0] {
            let rhs = flow_rhs(&l, &fernandez_reference(t), FlowMode::Closed).unwrap();
            let a = fernandez_coefficient(t);
            let want = Form::term(2.0 * a.powf(-2.0 / 3.0), &[1, 2, 3]);
            assert!((&rhs - &want).max_abs() < 1e-12 * (1.0 + want.max_abs()));
            let st = metric_from(&fernandez_reference(t)).unwrap();
            assert!(st.metric().matrix().sub(&fernandez_metric(t)).max_abs() < 1e-12);
        }
    }

    #[test]
    fn fernandez_monitors() {
        let l = builtins::fernandez::<f64>();
        let m = monitor_residuals(&l, &phi(), 1e-4).unwrap();
        assert!((m.vol_rate.0 - 2.0 / 3.0).abs() < 1e-6, "{m:?}");
        assert!((m.vol_rate.1 - 2.0 / 3.0).abs() < 1e-12);
        assert!(m.metric_residual.1 < 1e-5, "{m:?}");
        // with 8/21 the prediction is off by (3/7)g, i.e. by 9/28 relative to |ġ| = 4/3
        assert!((m.metric_residual.0 - 9.0 / 28.0).abs() < 1e-4, "{m:?}");
        assert!((m.second_vol_integrand - m.energy_rate.1).abs() < 1e-12, "{m:?}");
        assert!(m.dual_residual < 1e-5, "{m:?}");
        assert!((m.energy_rate.0 - m.energy_rate.1).abs() < 1e-5, "{m:?}");
    }

    #[test]
    fn short_flow_csv() {
        let l = builtins::fernandez::<f64>();
        let opts = FlowOptions { t_end: 0.01, dt: 0.005, mode: FlowMode::Closed };
        let tr = run_flow(&l, &phi(), opts).unwrap();
        assert!(tr.reached_end());
        assert_eq!(tr.rows.len(), 3);
        let csv = tr.to_csv();
        assert!(csv.starts_with(CSV_HEADER));
        assert_eq!(csv.lines().nth(1).unwrap().split(',').count(), 13);
    }

    #[test]
    fn bad_step_rejected() {
        let l = LieAlgebra7::<f64>::abelian();
        let opts = FlowOptions { t_end: 1.0, dt: 0.0, mode: FlowMode::Closed };
        assert!(run_flow(&l, &phi(), opts).is_err());
    }

    #[test]
    fn rk4_is_fourth_order() {
        let l = builtins::fernandez::<f64>();
        let err = |dt: f64| {
            let tr = run_flow(&l, &phi(), FlowOptions { t_end: 1.0, dt, mode: FlowMode::Closed }).unwrap();
            (&tr.sigma - &fernandez_reference(1.0)).max_abs()
        };
        let ratio = err(0.1) / err(0.05);
        assert!((ratio - 16.0).abs() < 2.0, "{ratio}");
    }

    #[test]
    fn torsion_free_is_fixed() {
        let l = LieAlgebra7::<f64>::abelian();
        let tr = run_flow(&l, &phi(), FlowOptions { t_end: 0.1, dt: 0.01, mode: FlowMode::General }).unwrap();
        assert!((&tr.sigma - &phi()).max_abs() == 0.0);
        assert!(tr.rows.windows(2).all(|w| w[1].vol == w[0].vol));
    }
}
