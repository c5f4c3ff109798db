//! Left-invariant G2-structures on seven-dimensional Lie algebras.
//!
//! A Lie algebra is given by the differentials of a coframe ω¹,…,ω⁷:
//! dω^i = −½ c^i_{jk} ω^j∧ω^k where [e_j, e_k] = c^i_{jk} e_i. All forms have
//! constant coefficients in this coframe, so `d` is purely algebraic.

pub mod builtins;
mod connection;
mod torsion;

use rand::Rng;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::exterior::{mask, pullback, Form};
use crate::matrix::Matrix;
use crate::scalar::Scalar;

pub use connection::{levi_civita, ricci_via_connection};
pub use torsion::{
    closed_structure_report, codifferential, erp_residual, natural_equation_residual,
    ricci_torsion_formula, scalar_curvature, torsion_forms, ClosedReport, CurvatureReport, Residual,
    G2Structure, NaturalReport, RicciTerm, TorsionForms,
};

/// A 7-dimensional Lie algebra, stored as the 2-forms dω¹,…,dω⁷.
#[derive(Clone, Debug)]
pub struct LieAlgebra7<S: Scalar> {
    name: String,
    dw: Vec<Form<S>>,
    // d of every basis monomial, indexed by mask
    basis_d: Vec<Form<S>>,
}

impl<S: Scalar> LieAlgebra7<S> {
    /// Build from dω¹,…,dω⁷. Jacobi is not checked here; see [`Self::jacobi_residual`].
    pub fn new(name: impl Into<String>, dw: Vec<Form<S>>) -> Result<Self> {
        if dw.len() != 7 {
            return Err(Error::Invalid(format!("expected 7 differentials, got {}", dw.len())));
        }
        for f in &dw {
            f.expect_degree(2)?;
        }
        let basis_d = (0..128u8).map(|m| d_monomial(&dw, m)).collect();
        Ok(LieAlgebra7 { name: name.into(), dw, basis_d })
    }

    /// Build from c^i_{jk} given as `c[i][j][k]`, zero-based.
    pub fn from_structure_constants(name: impl Into<String>, c: &[Vec<Vec<S>>]) -> Result<Self> {
        let mut dw = Vec::with_capacity(7);
        for ci in c.iter().take(7) {
            let mut f = Form::zero(2);
            for j in 0..7 {
                for k in j + 1..7 {
                    let v = ci[j][k].clone();
                    if !v.is_zero() {
                        f = f + Form::from_terms(2, [((1u8 << j) | (1u8 << k), -v)]);
                    }
                }
            }
            dw.push(f);
        }
        Self::new(name, dw)
    }

    pub fn abelian() -> Self {
        Self::new("abelian", vec![Form::zero(2); 7]).expect("valid")
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    /// dω^i, one-based.
    pub fn dw(&self, i: usize) -> &Form<S> {
        &self.dw[i - 1]
    }

    /// c^i_{jk} as `c[i][j][k]`, zero-based.
    pub fn structure_constants(&self) -> Vec<Vec<Vec<S>>> {
        let mut c = vec![vec![vec![S::zero(); 7]; 7]; 7];
        for (i, f) in self.dw.iter().enumerate() {
            for (m, v) in f.terms() {
                let jk = mask::indices(m);
                c[i][jk[0]][jk[1]] = -v.clone();
                c[i][jk[1]][jk[0]] = v.clone();
            }
        }
        c
    }

    /// The algebraic exterior derivative, extended from dω^i as a derivation.
    pub fn d(&self, a: &Form<S>) -> Form<S> {
        if a.degree() == 7 {
            return Form::zero(7);
        }
        let mut out = Form::zero(a.degree() + 1);
        for (m, c) in a.terms() {
            let dm = &self.basis_d[m as usize];
            if !dm.is_zero() {
                out = out + dm.scale(c);
            }
        }
        out
    }

    /// Largest coefficient of d(dω^i) over all i; zero exactly when Jacobi holds.
    pub fn jacobi_residual(&self) -> f64 {
        self.dw.iter().map(|f| self.d(f).max_abs()).fold(0.0, f64::max)
    }

    pub fn check_jacobi(&self, tol: f64) -> Result<()> {
        let r = self.jacobi_residual();
        let bad = if S::EXACT { r != 0.0 } else { r > tol };
        if bad {
            Err(Error::Jacobi(r))
        } else {
            Ok(())
        }
    }

    /// Express the algebra in the basis f_a = P_{ia} e_i. Forms transform by
    /// `pullback(P, ·)`, and the new differential satisfies d'(P*α) = P*(dα).
    pub fn change_basis(&self, p: &Matrix<S>) -> Result<Self> {
        let pinv = p.inverse().ok_or_else(|| Error::Invalid("singular basis change".into()))?;
        let images: Vec<Form<S>> = self.dw.iter().map(|f| pullback(p, f)).collect();
        let dw = (0..7)
            .map(|a| {
                (0..7).fold(Form::zero(2), |acc, i| {
                    let c = pinv[(a, i)].clone();
                    if c.is_zero() {
                        acc
                    } else {
                        acc + images[i].scale(&c)
                    }
                })
            })
            .collect();
        Self::new(format!("{}'", self.name), dw)
    }

    pub fn map<T: Scalar>(&self, f: impl Fn(&S) -> T + Copy) -> LieAlgebra7<T> {
        LieAlgebra7::new(self.name.clone(), self.dw.iter().map(|w| w.map(f)).collect())
            .expect("valid")
    }

    pub fn to_json(&self) -> Value {
        let d: Vec<Value> = self
            .dw
            .iter()
            .enumerate()
            .map(|(i, f)| {
                let terms: Vec<Value> = f
                    .terms()
                    .map(|(m, c)| {
                        let jk = mask::to_one_based(m);
                        json!({"j": jk[0], "k": jk[1], "coeff": c.to_json()})
                    })
                    .collect();
                json!({"target": i + 1, "terms": terms})
            })
            .collect();
        json!({"name": self.name, "dim": 7, "d": d})
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let bad = |s: &str| Error::Invalid(format!("algebra: {s}"));
        let name = v.get("name").and_then(Value::as_str).unwrap_or("unnamed");
        if v.get("dim").and_then(Value::as_u64) != Some(7) {
            return Err(bad("dim must be 7"));
        }
        let mut dw = vec![Form::zero(2); 7];
        for entry in v.get("d").and_then(Value::as_array).ok_or_else(|| bad("missing d"))? {
            let i = entry.get("target").and_then(Value::as_u64).ok_or_else(|| bad("target"))? as usize;
            if !(1..=7).contains(&i) {
                return Err(Error::BadIndex(vec![i]));
            }
            let terms = entry.get("terms").and_then(Value::as_array).ok_or_else(|| bad("terms"))?;
            for t in terms {
                let j = t.get("j").and_then(Value::as_u64).ok_or_else(|| bad("j"))? as usize;
                let k = t.get("k").and_then(Value::as_u64).ok_or_else(|| bad("k"))? as usize;
                if j >= k {
                    return Err(Error::BadIndex(vec![j, k]));
                }
                let c = t.get("coeff").and_then(S::from_json).ok_or_else(|| bad("coeff"))?;
                let (m, _) = mask::from_indices(&[j, k]).ok_or(Error::BadIndex(vec![j, k]))?;
                dw[i - 1] = dw[i - 1].clone() + Form::from_terms(2, [(m, c)]);
            }
        }
        Self::new(name, dw)
    }
}

fn d_monomial<S: Scalar>(dw: &[Form<S>], m: u8) -> Form<S> {
    let p = mask::degree(m);
    if p == 7 {
        return Form::zero(7);
    }
    let idx = mask::indices(m);
    let mut out = Form::zero(p + 1);
    for (pos, &i) in idx.iter().enumerate() {
        if dw[i].is_zero() {
            continue;
        }
        let before: u8 = idx[..pos].iter().fold(0, |a, &j| a | 1 << j);
        let after = m ^ before ^ (1 << i);
        let t = Form::from_terms(mask::degree(before), [(before, S::one())])
            .wedge(&dw[i])
            .wedge(&Form::from_terms(mask::degree(after), [(after, S::one())]));
        out = if pos % 2 == 1 { out - t } else { out + t };
    }
    out
}

/// A random Jacobi-valid algebra in a random basis. Families: ℝ ⋉_A ℝ⁶ and
/// 𝔰𝔲(2) ⊕ (ℝ ⋉_B ℝ³), then conjugated by P = I + noise.
pub fn random_algebra<R: Rng>(rng: &mut R, scale: f64) -> LieAlgebra7<f64> {
    let mut c = vec![vec![vec![0.0; 7]; 7]; 7];
    let mut set = |i: usize, j: usize, k: usize, v: f64| {
        c[i][j][k] = v;
        c[i][k][j] = -v;
    };
    if rng.gen_bool(0.5) {
        for i in 0..6 {
            for j in 0..6 {
                set(1 + i, 0, 1 + j, scale * rng.gen_range(-1.0..1.0));
            }
        }
    } else {
        let s = scale * rng.gen_range(0.2..1.0);
        set(0, 1, 2, s);
        set(1, 2, 0, s);
        set(2, 0, 1, s);
        for i in 0..3 {
            for j in 0..3 {
                set(4 + i, 3, 4 + j, scale * rng.gen_range(-1.0..1.0));
            }
        }
    }
    let base = LieAlgebra7::from_structure_constants("random", &c).expect("valid");
    let p = Matrix::from_fn(7, |i, j| {
        (if i == j { 1.0 } else { 0.0 }) + 0.3 * rng.gen_range(-1.0..1.0)
    });
    base.change_basis(&p).expect("P is near the identity")
}

/// φ plus a random constant 3-form with coefficients in [−size, size].
pub fn random_structure<R: Rng>(rng: &mut R, size: f64) -> Form<f64> {
    let noise = Form::from_terms(
        3,
        mask::masks_of_degree(3).iter().map(|&m| (m, size * rng.gen_range(-1.0..1.0))),
    );
    crate::g2::phi::<f64>() + noise
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rational;
    use rand::SeedableRng;

    type Q = Rational;

    #[test]
    fn fernandez_differentials() {
        let l = builtins::fernandez::<Q>();
        assert_eq!(l.jacobi_residual(), 0.0);
        assert_eq!(l.d(&Form::basis(&[6])), Form::basis(&[1, 2]));
        assert!(l.d(&Form::constant(Q::from_i64(5))).is_zero());
        let t = Form::<Q>::basis(&[2, 7]) - Form::basis(&[3, 6]);
        assert_eq!(l.d(&t), Form::term(Q::from_i64(2), &[1, 2, 3]));
    }

    #[test]
    fn broken_jacobi_detected() {
        let dw = vec![
            Form::<Q>::basis(&[2, 3]),
            Form::basis(&[3, 1]),
            Form::basis(&[1, 2]),
            Form::basis(&[1, 4]),
            Form::zero(2),
            Form::zero(2),
            Form::zero(2),
        ];
        let l = LieAlgebra7::new("broken", dw).unwrap();
        assert!(l.jacobi_residual() > 0.0);
        assert!(LieAlgebra7::<Q>::abelian().jacobi_residual() == 0.0);
    }

    #[test]
    fn json_round_trip() {
        let l = builtins::erp_sl2c::<Q>();
        let back = LieAlgebra7::<Q>::from_json(&l.to_json()).unwrap();
        for i in 1..=7 {
            assert_eq!(back.dw(i), l.dw(i));
        }
    }

    #[test]
    fn random_algebras_satisfy_jacobi() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for _ in 0..20 {
            let l = random_algebra(&mut rng, 1.0);
            assert!(l.jacobi_residual() < 1e-12);
        }
    }

    #[test]
    fn structure_constants_round_trip() {
        let l = builtins::erp_sl2c::<Q>();
        let c = l.structure_constants();
        let l2 = LieAlgebra7::from_structure_constants("x", &c).unwrap();
        for i in 1..=7 {
            assert_eq!(l2.dw(i), l.dw(i));
        }
    }
}
