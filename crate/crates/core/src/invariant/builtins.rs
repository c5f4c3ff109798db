//! Named example algebras.

use crate::exterior::Form;
use crate::scalar::{convert, Rational, Scalar};

use super::LieAlgebra7;

pub const NAMES: [&str; 3] = ["abelian", "fernandez", "erp-sl2c"];

pub fn by_name<S: Scalar>(name: &str) -> Option<LieAlgebra7<S>> {
    match name {
        "abelian" => Some(LieAlgebra7::abelian()),
        "fernandez" => Some(fernandez()),
        "erp-sl2c" => Some(erp_sl2c()),
        _ => None,
    }
}

/// dω⁶ = ω¹², dω⁷ = ω¹³, all other dω^i = 0. The form φ is closed here and
/// its torsion is τ₂ = ω²⁷ − ω³⁶.
pub fn fernandez<S: Scalar>() -> LieAlgebra7<S> {
    let mut dw = vec![Form::zero(2); 7];
    dw[5] = Form::basis(&[1, 2]);
    dw[6] = Form::basis(&[1, 3]);
    LieAlgebra7::new("fernandez", dw).expect("valid")
}

#[derive(Clone, Debug, PartialEq)]
struct Gauss {
    re: Rational,
    im: Rational,
}

impl Gauss {
    fn new(re: i64, im: i64) -> Self {
        Gauss { re: Rational::from_i64(re), im: Rational::from_i64(im) }
    }
    fn zero() -> Self {
        Self::new(0, 0)
    }
    fn add(&self, o: &Self) -> Self {
        Gauss { re: &self.re + &o.re, im: &self.im + &o.im }
    }
    fn sub(&self, o: &Self) -> Self {
        Gauss { re: &self.re - &o.re, im: &self.im - &o.im }
    }
    fn mul(&self, o: &Self) -> Self {
        Gauss {
            re: &self.re * &o.re - &self.im * &o.im,
            im: &self.re * &o.im + &self.im * &o.re,
        }
    }
}

type M3 = [[Gauss; 3]; 3];

// [[a, z, u], [0, −a, v], [0, 0, 0]]
fn pattern(a: Gauss, z: Gauss, u: Gauss, v: Gauss) -> M3 {
    let neg_a = Gauss::zero().sub(&a);
    [
        [a, z, u],
        [Gauss::zero(), neg_a, v],
        [Gauss::zero(), Gauss::zero(), Gauss::zero()],
    ]
}

fn bracket(x: &M3, y: &M3) -> M3 {
    std::array::from_fn(|i| {
        std::array::from_fn(|j| {
            (0..3).fold(Gauss::zero(), |s, k| s.add(&x[i][k].mul(&y[k][j])).sub(&y[i][k].mul(&x[k][j])))
        })
    })
}

fn coords(m: &M3) -> [Rational; 7] {
    let half = Rational::ratio(1, 2);
    let (a, z, u, v) = (&m[0][0], &m[0][1], &m[0][2], &m[1][2]);
    [
        -a.re.clone(),
        -(&z.im * &half),
        -(&z.re * &half),
        u.re.clone(),
        u.im.clone(),
        v.re.clone(),
        -v.im.clone(),
    ]
}

/// The solvable algebra of 3×3 complex matrices [[a, z, u], [0, −a, v], [0, 0, 0]]
/// with a real, in the basis
/// E₁: a = −1, E₂: z = −2i, E₃: z = −2, E₄: u = 1, E₅: u = i, E₆: v = 1, E₇: v = −i.
/// The structure constants are computed from matrix brackets. φ is closed and
/// extremally Ricci-pinched on this algebra.
pub fn erp_sl2c<S: Scalar>() -> LieAlgebra7<S> {
    let z = Gauss::zero;
    let basis: Vec<M3> = vec![
        pattern(Gauss::new(-1, 0), z(), z(), z()),
        pattern(z(), Gauss::new(0, -2), z(), z()),
        pattern(z(), Gauss::new(-2, 0), z(), z()),
        pattern(z(), z(), Gauss::new(1, 0), z()),
        pattern(z(), z(), Gauss::new(0, 1), z()),
        pattern(z(), z(), z(), Gauss::new(1, 0)),
        pattern(z(), z(), z(), Gauss::new(0, -1)),
    ];
    for (k, e) in basis.iter().enumerate() {
        debug_assert_eq!(coords(e)[k], Rational::from_i64(1));
    }
    let mut c = vec![vec![vec![S::zero(); 7]; 7]; 7];
    for j in 0..7 {
        for k in 0..7 {
            let w = coords(&bracket(&basis[j], &basis[k]));
            for i in 0..7 {
                c[i][j][k] = convert(&w[i]);
            }
        }
    }
    LieAlgebra7::from_structure_constants("erp-sl2c", &c).expect("valid")
}
