//! G2 linear algebra: φ, ∗φ, the ε-symbols, the cross product, type
//! decompositions and the i/j maps.
//!
//! Functions at module level work at the reference point (φ, identity metric).
//! The same operations relative to an arbitrary definite σ are methods on
//! [`DefiniteStructure`].

use std::sync::OnceLock;

use rand::Rng;

use crate::definite::DefiniteStructure;
use crate::error::{Error, Result};
use crate::exterior::{mask, Covector, Form, Metric, Vector};
use crate::matrix::{self, Matrix};
use crate::scalar::{Rational, Scalar};

const PHI_TERMS: [([usize; 3], i64); 7] = [
    ([1, 2, 3], 1),
    ([1, 4, 5], 1),
    ([1, 6, 7], 1),
    ([2, 4, 6], 1),
    ([2, 5, 7], -1),
    ([3, 4, 7], -1),
    ([3, 5, 6], -1),
];

/// φ = e¹²³ + e¹⁴⁵ + e¹⁶⁷ + e²⁴⁶ − e²⁵⁷ − e³⁴⁷ − e³⁵⁶.
pub fn phi<S: Scalar>() -> Form<S> {
    PHI_TERMS
        .iter()
        .fold(Form::zero(3), |acc, (idx, c)| acc + Form::term(S::from_i64(*c), idx))
}

/// ∗φ for the identity metric and standard orientation.
pub fn star_phi<S: Scalar>() -> Form<S> {
    let mut out = Form::zero(4);
    for (idx, c) in PHI_TERMS.iter() {
        let (m, _) = mask::from_indices(idx).expect("valid multi-index");
        let comp = mask::FULL ^ m;
        let c = S::from_i64(*c * mask::merge_sign(m, comp) as i64);
        out = out + Form::from_terms(4, [(comp, c)]);
    }
    out
}

/// Fully populated ε_{ijk} and ε_{ijkl} (zero-based), expanded from φ and ∗φ.
pub struct EpsilonTables {
    e3: Vec<i8>,
    e4: Vec<i8>,
}

fn inversion_sign(p: &[usize]) -> i8 {
    let mut s = 1;
    for i in 0..p.len() {
        for j in i + 1..p.len() {
            if p[i] > p[j] {
                s = -s;
            }
        }
    }
    s
}

fn permutations(v: &mut Vec<usize>, k: usize, out: &mut Vec<Vec<usize>>) {
    if k == v.len() {
        out.push(v.clone());
        return;
    }
    for i in k..v.len() {
        v.swap(k, i);
        permutations(v, k + 1, out);
        v.swap(k, i);
    }
}

fn table_from(form: &Form<Rational>) -> Vec<i8> {
    let n = form.degree();
    let mut t = vec![0i8; 7usize.pow(n as u32)];
    for (m, c) in form.terms() {
        let c = c.to_f64() as i8;
        let mut perms = Vec::new();
        permutations(&mut mask::indices(m), 0, &mut perms);
        for p in perms {
            let k = p.iter().fold(0, |a, &i| a * 7 + i);
            t[k] = inversion_sign(&p) * c;
        }
    }
    t
}

impl EpsilonTables {
    /// ε_{ijk}, zero-based.
    pub fn e3(&self, i: usize, j: usize, k: usize) -> i32 {
        self.e3[(i * 7 + j) * 7 + k] as i32
    }

    /// ε_{ijkl}, zero-based.
    pub fn e4(&self, i: usize, j: usize, k: usize, l: usize) -> i32 {
        self.e4[((i * 7 + j) * 7 + k) * 7 + l] as i32
    }
}

pub fn epsilon_tables() -> &'static EpsilonTables {
    static T: OnceLock<EpsilonTables> = OnceLock::new();
    T.get_or_init(|| EpsilonTables {
        e3: table_from(&phi()),
        e4: table_from(&star_phi()),
    })
}

/// ε for three or four one-based indices.
pub fn epsilon(idx: &[usize]) -> Result<i32> {
    if idx.iter().any(|i| !(1..=7).contains(i)) {
        return Err(Error::BadIndex(idx.to_vec()));
    }
    let t = epsilon_tables();
    match idx {
        [i, j, k] => Ok(t.e3(i - 1, j - 1, k - 1)),
        [i, j, k, l] => Ok(t.e4(i - 1, j - 1, k - 1, l - 1)),
        _ => Err(Error::BadIndex(idx.to_vec())),
    }
}

/// v × w with e_i × e_j = ε_{ijk} e_k.
pub fn cross<S: Scalar>(v: &Vector<S>, w: &Vector<S>) -> Vector<S> {
    let t = epsilon_tables();
    let mut out = Vector::<S>::zero();
    for i in 0..7 {
        if v.0[i].is_zero() {
            continue;
        }
        for j in 0..7 {
            if w.0[j].is_zero() {
                continue;
            }
            for k in 0..7 {
                let e = t.e3(i, j, k);
                if e != 0 {
                    let x = v.0[i].clone() * w.0[j].clone() * S::from_i64(e as i64);
                    out.0[k] = out.0[k].clone() + x;
                }
            }
        }
    }
    out
}

/// [v] with entries v_{ij} = ε_{ijk} v_k; then [v]w = w × v and ⟨[a]⟩ = 6a.
pub fn vee_matrix<S: Scalar>(v: &Vector<S>) -> Matrix<S> {
    let t = epsilon_tables();
    Matrix::from_fn(7, |i, j| {
        (0..7).fold(S::zero(), |s, k| match t.e3(i, j, k) {
            0 => s,
            e => s + v.0[k].clone() * S::from_i64(e as i64),
        })
    })
}

/// ⟨A⟩_i = ε_{ijk} A_{jk}.
pub fn angle_map<S: Scalar>(a: &Matrix<S>) -> Vector<S> {
    let t = epsilon_tables();
    let mut out = Vector::zero();
    for i in 0..7 {
        let mut s = S::zero();
        for j in 0..7 {
            for k in 0..7 {
                let e = t.e3(i, j, k);
                if e != 0 && !a[(j, k)].is_zero() {
                    s = s + a[(j, k)].clone() * S::from_i64(e as i64);
                }
            }
        }
        out.0[i] = s;
    }
    out
}

/// A basis of 𝔤₂: skew matrices annihilated by [`angle_map`].
pub fn g2_basis() -> Vec<Matrix<Rational>> {
    let pairs: Vec<(usize, usize)> =
        (0..7).flat_map(|a| (a + 1..7).map(move |b| (a, b))).collect();
    let rows: Vec<Vec<Rational>> = (0..7)
        .map(|i| {
            pairs
                .iter()
                .map(|&(a, b)| Rational::from_i64(2 * epsilon_tables().e3(i, a, b) as i64))
                .collect()
        })
        .collect();
    matrix::nullspace(&rows, pairs.len(), 0.0)
        .into_iter()
        .map(|x| {
            let mut m = Matrix::zeros(7);
            for (c, &(a, b)) in x.iter().zip(&pairs) {
                m[(a, b)] = c.clone();
                m[(b, a)] = -c.clone();
            }
            m
        })
        .collect()
}

/// exp(X) for a random X ∈ 𝔤₂ with coefficients uniform in [−scale, scale].
pub fn random_g2_element<R: Rng>(rng: &mut R, scale: f64) -> Matrix<f64> {
    static B: OnceLock<Vec<Matrix<f64>>> = OnceLock::new();
    let basis = B.get_or_init(|| g2_basis().iter().map(|m| m.to_f64()).collect());
    let x = basis.iter().fold(Matrix::zeros(7), |acc, b| {
        acc.add(&b.scale(&rng.gen_range(-scale..=scale)))
    });
    matrix::expm(&x)
}

/// A symmetric 2-tensor h_{ij} in the e-basis.
#[derive(Clone, Debug, PartialEq)]
pub struct SymTensor<S>(Matrix<S>);

impl<S: Scalar> SymTensor<S> {
    pub fn new(m: Matrix<S>) -> Result<Self> {
        if m.dim() != 7 || !m.is_symmetric() {
            return Err(Error::Invalid("tensor must be a symmetric 7x7 matrix".into()));
        }
        Ok(SymTensor(m))
    }

    pub(crate) fn new_unchecked(m: Matrix<S>) -> Self {
        SymTensor(m)
    }

    pub fn zero() -> Self {
        SymTensor(Matrix::zeros(7))
    }

    pub fn matrix(&self) -> &Matrix<S> {
        &self.0
    }

    pub fn into_matrix(self) -> Matrix<S> {
        self.0
    }

    /// Trace against the identity metric.
    pub fn trace(&self) -> S {
        self.0.trace()
    }

    /// tr_g h = g^{ij} h_{ij}.
    pub fn trace_with(&self, g: &Metric<S>) -> S {
        g.inverse().mul(&self.0).trace()
    }

    /// |h|²_g = tr(g⁻¹ h g⁻¹ h).
    pub fn norm2_with(&self, g: &Metric<S>) -> S {
        let a = g.inverse().mul(&self.0);
        a.mul(&a).trace()
    }

    /// The traceless part h − (tr_g h / 7) g.
    pub fn traceless_with(&self, g: &Metric<S>) -> Self {
        let t = self.trace_with(g) / S::from_i64(7);
        SymTensor(self.0.sub(&g.matrix().scale(&t)))
    }
}

/// β = β₇ + β₁₄.
#[derive(Clone, Debug, PartialEq)]
pub struct TypeComponents2<S: Scalar> {
    pub beta7: Form<S>,
    pub beta14: Form<S>,
}

/// γ = γ₁ + γ₇ + γ₂₇.
#[derive(Clone, Debug, PartialEq)]
pub struct TypeComponents3<S: Scalar> {
    pub gamma1: Form<S>,
    pub gamma7: Form<S>,
    pub gamma27: Form<S>,
}

impl<S: Scalar> DefiniteStructure<S> {
    /// Eigen-split of β ↦ ∗(β∧σ) (eigenvalues 2 on Λ²₇, −1 on Λ²₁₄).
    pub fn project2(&self, beta: &Form<S>) -> Result<TypeComponents2<S>> {
        beta.expect_degree(2)?;
        let t = self.star(&beta.wedge(self.sigma()));
        let three = S::from_i64(3);
        let beta7 = (beta + &t).scale(&(S::one() / three.clone()));
        let beta14 = (beta.scale(&S::from_i64(2)) - t).scale(&(S::one() / three));
        Ok(TypeComponents2 { beta7, beta14 })
    }

    /// γ₁ = (⟨γ,σ⟩/7)σ, γ₇ = ∗(α∧σ) with α = −¼∗(γ∧σ), γ₂₇ the rest.
    pub fn project3(&self, gamma: &Form<S>) -> Result<TypeComponents3<S>> {
        gamma.expect_degree(3)?;
        let c = self.inner(gamma, self.sigma())? / S::from_i64(7);
        let gamma1 = self.sigma().scale(&c);
        let gamma7 = self.one_form_to_lambda3_7(&self.lambda3_7_to_one_form(gamma));
        let gamma27 = gamma - &gamma1 - gamma7.clone();
        Ok(TypeComponents3 { gamma1, gamma7, gamma27 })
    }

    /// Λ⁴ components as the stars of the Λ³ components of ∗ω.
    pub fn project4(&self, omega: &Form<S>) -> Result<TypeComponents3<S>> {
        omega.expect_degree(4)?;
        let p = self.project3(&self.star(omega))?;
        Ok(TypeComponents3 {
            gamma1: self.star(&p.gamma1),
            gamma7: self.star(&p.gamma7),
            gamma27: self.star(&p.gamma27),
        })
    }

    /// α ↦ ∗(α∧σ).
    pub fn one_form_to_lambda3_7(&self, alpha: &Form<S>) -> Form<S> {
        self.star(&alpha.wedge(self.sigma()))
    }

    /// The 1-form α with γ₇ = ∗(α∧σ), read off as −¼∗(γ∧σ).
    pub fn lambda3_7_to_one_form(&self, gamma: &Form<S>) -> Form<S> {
        self.star(&gamma.wedge(self.sigma())).scale(&S::ratio(-1, 4))
    }

    /// i_σ(h) = 2 (h g⁻¹)_{jk} e^j ∧ (e_k⌟σ).
    pub fn i_map(&self, h: &SymTensor<S>) -> Form<S> {
        let hg = h.0.mul(self.metric().inverse());
        let mut out = Form::zero(3);
        for k in 0..7 {
            let col = Covector::from((0..7).map(|j| hg[(j, k)].clone()).collect::<Vec<S>>());
            if col.0.iter().all(|c| c.is_zero()) {
                continue;
            }
            let ck = self.sigma().contract(&Vector::basis(k + 1));
            out = out + col.to_form().wedge(&ck);
        }
        out.scale(&S::from_i64(2))
    }

    /// j_σ(γ)_{ij} = ∗σ((e_i⌟σ)∧(e_j⌟σ)∧γ).
    pub fn j_map(&self, gamma: &Form<S>) -> Result<SymTensor<S>> {
        gamma.expect_degree(3)?;
        let c: Vec<Form<S>> = (1..=7).map(|i| self.sigma().contract(&Vector::basis(i))).collect();
        let cg: Vec<Form<S>> = c.iter().map(|cj| cj.wedge(gamma)).collect();
        let inv_vol = S::one() / self.volume_factor().clone();
        let mut m = Matrix::zeros(7);
        for i in 0..7 {
            for j in i..7 {
                let v = c[i].wedge(&cg[j]).scalar_part() * inv_vol.clone();
                m[(i, j)] = v.clone();
                m[(j, i)] = v;
            }
        }
        Ok(SymTensor(m))
    }

    /// Q(α,β) = ∗[ε^{ijkl} ((e_i∧e_j)⌟∗α)∧((e_k∧e_l)⌟∗β)] with the ε-tensor taken
    /// as ∗σ with all indices raised, which equals the G2-frame expression.
    pub fn q_pairing(&self, a: &Form<S>, b: &Form<S>) -> Result<Form<S>> {
        a.expect_degree(3)?;
        b.expect_degree(3)?;
        let sa = self.star(a);
        let sb = self.star(b);
        let pairs = mask::masks_of_degree(2);
        let dc = |f: &Form<S>, m: u8| -> Form<S> {
            let ij = mask::indices(m);
            f.contract(&Vector::basis(ij[0] + 1)).contract(&Vector::basis(ij[1] + 1))
        };
        let ca: Vec<Form<S>> = pairs.iter().map(|&m| dc(&sa, m)).collect();
        let cb: Vec<Form<S>> = pairs.iter().map(|&m| dc(&sb, m)).collect();
        let raised = if self.metric().matrix() == &Matrix::identity(7) {
            self.psi().to_vec()
        } else {
            self.metric().inverse_compound(4).mul_vec(&self.psi().to_vec())
        };
        let mut acc = Form::zero(4);
        for (&m4, t) in mask::masks_of_degree(4).iter().zip(raised) {
            if t.is_zero() {
                continue;
            }
            for (pa, &ma) in pairs.iter().enumerate() {
                if ma & m4 != ma {
                    continue;
                }
                let mb = m4 ^ ma;
                let pb = mask::position(mb);
                let c = t.clone() * S::from_i64(4 * mask::merge_sign(ma, mb) as i64);
                acc = acc + ca[pa].wedge(&cb[pb]).scale(&c);
            }
        }
        Ok(self.star(&acc))
    }
}

pub fn project2<S: Scalar>(beta: &Form<S>) -> Result<TypeComponents2<S>> {
    DefiniteStructure::standard().project2(beta)
}

pub fn project3<S: Scalar>(gamma: &Form<S>) -> Result<TypeComponents3<S>> {
    DefiniteStructure::standard().project3(gamma)
}

pub fn i_map<S: Scalar>(h: &SymTensor<S>) -> Form<S> {
    DefiniteStructure::standard().i_map(h)
}

pub fn j_map<S: Scalar>(gamma: &Form<S>) -> Result<SymTensor<S>> {
    DefiniteStructure::standard().j_map(gamma)
}

pub fn q_pairing<S: Scalar>(a: &Form<S>, b: &Form<S>) -> Result<Form<S>> {
    DefiniteStructure::standard().q_pairing(a, b)
}

/// Largest 2k with β^k ≠ 0. Float coefficients below `tol·(1+|β|)^k` count as zero.
pub fn two_form_rank<S: Scalar>(beta: &Form<S>, tol: f64) -> Result<usize> {
    beta.expect_degree(2)?;
    let scale = 1.0 + beta.max_abs();
    let mut p = Form::constant(S::one());
    let mut rank = 0;
    for k in 1..=3 {
        p = p.wedge(beta);
        let zero = if S::EXACT { p.is_zero() } else { p.max_abs() <= tol * scale.powi(k) };
        if zero {
            break;
        }
        rank = 2 * k as usize;
    }
    Ok(rank)
}

/// Invariants of α ∈ Λ²₁₄: q₂ = |α|², q₆ = |α³|², and the normal-form parameters
/// 0 ≤ λ₁ ≤ λ₂ with α ~ λ₁e²³ + λ₂e⁴⁵ − (λ₁+λ₂)e⁶⁷.
#[derive(Clone, Debug, PartialEq)]
pub struct Lambda14Invariants<S: Scalar> {
    pub q2: S,
    pub q6: S,
    pub lambda1: f64,
    pub lambda2: f64,
}

pub fn lambda14_invariants<S: Scalar>(alpha: &Form<S>, tol: f64) -> Result<Lambda14Invariants<S>> {
    let st = DefiniteStructure::standard();
    let parts = st.project2(alpha)?;
    let scale = alpha.max_abs();
    if !parts.beta7.is_zero() && (S::EXACT || parts.beta7.max_abs() > tol * scale.max(1e-300)) {
        return Err(Error::Impure(parts.beta7.max_abs()));
    }
    let q2 = st.norm2(alpha);
    let a3 = alpha.power(3);
    let q6 = st.norm2(&a3);
    let bound = S::ratio(2, 3) * q2.powi(3);
    let excess = q6.clone() - bound;
    if excess.signum() > 0 && (S::EXACT || excess.to_f64() > tol * (1.0 + q6.to_f64())) {
        return Err(Error::Invalid("|α³|² exceeds (2/3)|α|⁶".into()));
    }
    let (l1, l2) = normal_form(q2.to_f64(), q6.to_f64());
    Ok(Lambda14Invariants { q2, q6, lambda1: l1, lambda2: l2 })
}

/// The two non-negative roots of t³ − (q₂/2)t + √q₆/6, ascending.
fn normal_form(q2: f64, q6: f64) -> (f64, f64) {
    if q2 <= 0.0 {
        return (0.0, 0.0);
    }
    let p = -q2 / 2.0;
    let q = q6.max(0.0).sqrt() / 6.0;
    let m = 2.0 * (-p / 3.0).sqrt();
    let arg = ((3.0 * q) / (p * m)).clamp(-1.0, 1.0);
    let theta = arg.acos() / 3.0;
    let mut roots: Vec<f64> = (0..3)
        .map(|k| m * (theta - 2.0 * std::f64::consts::PI * k as f64 / 3.0).cos())
        .collect();
    roots.sort_by(|a, b| a.total_cmp(b));
    (roots[1].max(0.0), roots[2].max(0.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    type Q = Rational;

    #[test]
    fn epsilon_examples() {
        assert_eq!(epsilon(&[1, 2, 3]).unwrap(), 1);
        assert_eq!(epsilon(&[4, 5, 6, 7]).unwrap(), 1);
        assert_eq!(epsilon(&[1, 2, 4]).unwrap(), 0);
        assert_eq!(epsilon(&[3, 4, 5, 6]).unwrap(), 0);
        assert_eq!(epsilon(&[2, 1, 3]).unwrap(), -1);
        assert!(epsilon(&[1, 2]).is_err());
        assert!(epsilon(&[0, 1, 2]).is_err());
    }

    #[test]
    fn phi_wedge_star_phi() {
        assert_eq!(phi::<Q>().wedge(&star_phi()), Form::volume().scale(&Q::from_i64(7)));
    }

    #[test]
    fn cross_examples() {
        let e = |i| Vector::<Q>::basis(i);
        assert_eq!(cross(&e(1), &e(2)), e(3));
        assert_eq!(cross(&e(4), &e(5)), e(1));
        assert_eq!(cross(&e(3), &e(3)), Vector::zero());
    }

    #[test]
    fn vee_of_zero_and_anchor() {
        assert_eq!(vee_matrix(&Vector::<Q>::zero()), Matrix::zeros(7));
        let a = Vector::from_slice(&(1..=7).map(Q::from_i64).collect::<Vec<_>>());
        assert_eq!(angle_map(&vee_matrix(&a)), a.scale(&Q::from_i64(6)));
        assert_eq!(angle_map(&Matrix::<Q>::identity(7)), Vector::zero());
    }

    #[test]
    fn g2_has_dimension_14_and_fixes_phi() {
        let b = g2_basis();
        assert_eq!(b.len(), 14);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
        let g = random_g2_element(&mut rng, 0.7);
        let moved = crate::exterior::pullback(&g, &phi::<f64>());
        assert!((moved - phi()).max_abs() < 1e-9);
    }

    #[test]
    fn normal_form_example() {
        let a = Form::<Q>::basis(&[2, 3]) + Form::basis(&[4, 5]) - Form::term(Q::from_i64(2), &[6, 7]);
        let inv = lambda14_invariants(&a, 0.0).unwrap();
        assert_eq!(inv.q2, Q::from_i64(6));
        assert_eq!(inv.q6, Q::from_i64(144));
        assert!((inv.lambda1 - 1.0).abs() < 1e-12 && (inv.lambda2 - 1.0).abs() < 1e-12);
        let z = lambda14_invariants(&Form::<Q>::zero(2), 0.0).unwrap();
        assert_eq!((z.q2, z.lambda1, z.lambda2), (Q::from_i64(0), 0.0, 0.0));
        assert!(lambda14_invariants(&Form::<Q>::basis(&[2, 3]), 0.0).is_err());
    }

    #[test]
    fn rank_examples() {
        assert_eq!(two_form_rank(&Form::<Q>::basis(&[1, 2]), 0.0).unwrap(), 2);
        let b = Form::<Q>::basis(&[1, 2]) + Form::basis(&[3, 4]);
        assert_eq!(two_form_rank(&b, 0.0).unwrap(), 4);
        assert_eq!(two_form_rank(&Form::<Q>::zero(2), 0.0).unwrap(), 0);
    }

    #[test]
    fn ij_anchors() {
        let g = SymTensor::new(Matrix::<Q>::identity(7)).unwrap();
        assert_eq!(i_map(&g), phi().scale(&Q::from_i64(6)));
        assert_eq!(j_map(&phi::<Q>()).unwrap(), SymTensor::new(Matrix::identity(7).scale(&Q::from_i64(6))).unwrap());
        assert!(i_map(&SymTensor::<Q>::zero()).is_zero());
    }

    #[test]
    fn projection_examples() {
        let t = Form::<Q>::basis(&[2, 3]) - Form::basis(&[4, 5]);
        let p = project2(&t).unwrap();
        assert!(p.beta7.is_zero());
        assert_eq!(p.beta14, t);
        let p3 = project3(&phi::<Q>()).unwrap();
        assert_eq!(p3.gamma1, phi());
        assert!(p3.gamma7.is_zero() && p3.gamma27.is_zero());
    }
}
