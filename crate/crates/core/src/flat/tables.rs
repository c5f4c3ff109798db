//! The exterior derivative table, the second-order identities and the
//! Laplacian formulas, evaluated on random polynomial sections.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use super::{d_poly, dpq, laplacian, monomials_up_to, standard, zero_operator_residual, Label, PolyForm, TypedSection};
use crate::error::Result;
use crate::exterior::{mask, Form};
use crate::scalar::{Rational, Scalar};

use Label::{Fourteen as L14, One as L1, Seven as L7, TwentySeven as L27};

/// Σ coeff·(d_{k}∘…∘d_{1}) with operators listed in the order they are applied.
pub type Chain = (Rational, Vec<(Label, Label)>);

pub struct Identity {
    pub name: &'static str,
    pub input: Label,
    pub terms: Vec<Chain>,
}

fn r(n: i64, d: i64) -> Rational {
    Rational::ratio(n, d)
}

/// The second-order identities; each sum must vanish.
pub fn second_order_identities() -> Vec<Identity> {
    let one = || r(1, 1);
    vec![
        Identity { name: "d77 d17 = 0", input: L1, terms: vec![(one(), vec![(L1, L7), (L7, L7)])] },
        Identity { name: "d714 d17 = 0", input: L1, terms: vec![(one(), vec![(L1, L7), (L7, L14)])] },
        Identity { name: "d71 d77 = 0", input: L7, terms: vec![(one(), vec![(L7, L7), (L7, L1)])] },
        Identity {
            name: "d147 d714 = 2/3 (d77)^2",
            input: L7,
            terms: vec![(one(), vec![(L7, L14), (L14, L7)]), (r(-2, 3), vec![(L7, L7), (L7, L7)])],
        },
        Identity {
            name: "d277 d727 = (d77)^2 + 12/7 d17 d71",
            input: L7,
            terms: vec![
                (one(), vec![(L7, L27), (L27, L7)]),
                (r(-1, 1), vec![(L7, L7), (L7, L7)]),
                (r(-12, 7), vec![(L7, L1), (L1, L7)]),
            ],
        },
        Identity {
            name: "d714 d77 + 2 d2714 d727 = 0",
            input: L7,
            terms: vec![(one(), vec![(L7, L7), (L7, L14)]), (r(2, 1), vec![(L7, L27), (L27, L14)])],
        },
        Identity {
            name: "3 d1427 d714 + d727 d77 = 0",
            input: L7,
            terms: vec![(r(3, 1), vec![(L7, L14), (L14, L27)]), (one(), vec![(L7, L7), (L7, L27)])],
        },
        Identity {
            name: "2 d2727 d727 - d727 d77 = 0",
            input: L7,
            terms: vec![(r(2, 1), vec![(L7, L27), (L27, L27)]), (r(-1, 1), vec![(L7, L7), (L7, L27)])],
        },
        Identity { name: "d71 d147 = 0", input: L14, terms: vec![(one(), vec![(L14, L7), (L7, L1)])] },
        Identity {
            name: "d77 d147 + 2 d277 d1427 = 0",
            input: L14,
            terms: vec![(one(), vec![(L14, L7), (L7, L7)]), (r(2, 1), vec![(L14, L27), (L27, L7)])],
        },
        Identity {
            name: "d727 d147 + 4 d2727 d1427 = 0",
            input: L14,
            terms: vec![(one(), vec![(L14, L7), (L7, L27)]), (r(4, 1), vec![(L14, L27), (L27, L27)])],
        },
        Identity {
            name: "3 d147 d2714 + d77 d277 = 0",
            input: L27,
            terms: vec![(r(3, 1), vec![(L27, L14), (L14, L7)]), (one(), vec![(L27, L7), (L7, L7)])],
        },
        Identity {
            name: "2 d277 d2727 - d77 d277 = 0",
            input: L27,
            terms: vec![(r(2, 1), vec![(L27, L27), (L27, L7)]), (r(-1, 1), vec![(L27, L7), (L7, L7)])],
        },
        Identity {
            name: "d714 d277 + 4 d2714 d2727 = 0",
            input: L27,
            terms: vec![(one(), vec![(L27, L7), (L7, L14)]), (r(4, 1), vec![(L27, L27), (L27, L14)])],
        },
    ]
}

/// Δ minus each Laplacian formula; the chains are the right-hand sides.
pub fn laplacian_formulas() -> Vec<Identity> {
    let one = || r(1, 1);
    vec![
        Identity { name: "Delta f = d71 d17 f", input: L1, terms: vec![(one(), vec![(L1, L7), (L7, L1)])] },
        Identity {
            name: "Delta alpha = ((d77)^2 + d17 d71) alpha",
            input: L7,
            terms: vec![(one(), vec![(L7, L7), (L7, L7)]), (one(), vec![(L7, L1), (L1, L7)])],
        },
        Identity {
            name: "Delta beta = (5/4 d714 d147 + d2714 d1427) beta",
            input: L14,
            terms: vec![(r(5, 4), vec![(L14, L7), (L7, L14)]), (one(), vec![(L14, L27), (L27, L14)])],
        },
        Identity {
            name: "Delta gamma = (7/12 d727 d277 + d1427 d2714 + (d2727)^2) gamma",
            input: L27,
            terms: vec![
                (r(7, 12), vec![(L27, L7), (L7, L27)]),
                (one(), vec![(L27, L14), (L14, L27)]),
                (one(), vec![(L27, L27), (L27, L27)]),
            ],
        },
    ]
}

pub fn eval_chains(terms: &[Chain], s: &TypedSection) -> Result<PolyForm> {
    let mut total: Option<PolyForm> = None;
    for (c, ops) in terms {
        let mut cur = s.clone();
        for &(p, q) in ops {
            cur = dpq(p, q, &cur)?;
        }
        let v = cur.into_payload().scale(c);
        total = Some(match total {
            None => v,
            Some(t) => t + v,
        });
    }
    Ok(total.unwrap_or_else(|| PolyForm::zero(s.label().degree())))
}

fn random_rational<R: Rng>(rng: &mut R) -> Rational {
    let d = rng.gen_range(1..=3i64);
    Rational::ratio(rng.gen_range(-3 * d..=3 * d), d)
}

/// A random section of type `label` with polynomial degree at most `deg` and
/// rational coefficients in [−3, 3], projected onto the type.
pub fn random_section<R: Rng>(rng: &mut R, label: Label, deg: u8) -> TypedSection {
    let p = label.degree();
    let masks = mask::masks_of_degree(p);
    let mut terms = Vec::new();
    for m in monomials_up_to(deg) {
        if !rng.gen_bool(0.5) {
            continue;
        }
        let mut coeffs: Vec<(u8, Rational)> = Vec::new();
        for &k in masks {
            if rng.gen_bool(0.5) {
                coeffs.push((k, random_rational(rng)));
            }
        }
        terms.push((m, Form::from_terms(p, coeffs)));
    }
    TypedSection::projected(label, &PolyForm::from_terms(p, terms)).expect("degree matches")
}

/// Per-identity results of a batch of trials.
#[derive(Clone, Debug)]
pub struct IdentityResult {
    pub name: String,
    pub trials: usize,
    pub max_residual: Rational,
    /// Trials in which the first operator of some chain gave a nonzero section.
    pub nontrivial: usize,
}

#[derive(Clone, Debug)]
pub struct TableReport {
    pub table: &'static str,
    pub seed: u64,
    pub max_poly_degree: u8,
    pub results: Vec<IdentityResult>,
}

impl TableReport {
    pub fn all_zero(&self) -> bool {
        self.results.iter().all(|r| r.max_residual.is_zero())
    }

    pub fn to_json(&self) -> Value {
        let rows: Vec<Value> = self
            .results
            .iter()
            .map(|r| {
                json!({
                    "identity": r.name,
                    "trials": r.trials,
                    "nontrivial_trials": r.nontrivial,
                    "max_residual": r.max_residual.to_string(),
                })
            })
            .collect();
        json!({
            "table": self.table,
            "seed": self.seed,
            "max_poly_degree": self.max_poly_degree,
            "all_zero": self.all_zero(),
            "identities": rows,
        })
    }
}

fn run<F>(table: &'static str, names: Vec<(String, Label)>, trials: usize, deg: u8, seed: u64, eval: F) -> Result<TableReport>
where
    F: Fn(usize, &TypedSection) -> Result<(PolyForm, bool)>,
{
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut results: Vec<IdentityResult> = names
        .iter()
        .map(|(n, _)| IdentityResult { name: n.clone(), trials, max_residual: Rational::zero(), nontrivial: 0 })
        .collect();
    for _ in 0..trials {
        for (k, (_, label)) in names.iter().enumerate() {
            let s = random_section(&mut rng, *label, deg);
            let (res, nontrivial) = eval(k, &s)?;
            let m = res.max_abs();
            if m > results[k].max_residual {
                results[k].max_residual = m;
            }
            if nontrivial {
                results[k].nontrivial += 1;
            }
        }
    }
    Ok(TableReport { table, seed, max_poly_degree: deg, results })
}

fn chains_nontrivial(terms: &[Chain], s: &TypedSection) -> Result<bool> {
    for (_, ops) in terms {
        if let Some(&(p, q)) = ops.first() {
            if !dpq(p, q, s)?.payload().is_zero() {
                return Ok(true);
            }
        }
    }
    Ok(false)
}

/// Residuals of every row of the exterior derivative table.
pub fn table1_residuals(trials: usize, deg: u8, seed: u64) -> Result<TableReport> {
    let names: Vec<(String, Label)> = table1_rows().into_iter().map(|(n, l)| (n.to_string(), l)).collect();
    run("1", names, trials, deg, seed, |k, s| {
        let res = table1_row(k, s)?;
        Ok((res, !s.payload().is_zero()))
    })
}

pub fn table2_residuals(trials: usize, deg: u8, seed: u64) -> Result<TableReport> {
    let ids = second_order_identities();
    let names = ids.iter().map(|i| (i.name.to_string(), i.input)).collect();
    run("2", names, trials, deg, seed, |k, s| {
        Ok((eval_chains(&ids[k].terms, s)?, chains_nontrivial(&ids[k].terms, s)?))
    })
}

pub fn table3_residuals(trials: usize, deg: u8, seed: u64) -> Result<TableReport> {
    let ids = laplacian_formulas();
    let names = ids.iter().map(|i| (i.name.to_string(), i.input)).collect();
    run("3", names, trials, deg, seed, |k, s| {
        let lhs = laplacian(s.payload());
        let rhs = eval_chains(&ids[k].terms, s)?;
        Ok((&lhs - &rhs, !lhs.is_zero()))
    })
}

/// The six vanishing operators, as the components they would produce.
pub fn zero_operator_residuals(trials: usize, deg: u8, seed: u64) -> Result<TableReport> {
    let pairs = [(L1, L27), (L27, L1), (L1, L14), (L14, L1), (L1, L1), (L14, L14)];
    let names = pairs.iter().map(|(p, q)| (format!("d{p}_{q} = 0"), *p)).collect();
    run("zero operators", names, trials, deg, seed, |k, s| {
        let (p, q) = pairs[k];
        Ok((zero_operator_residual(p, q, s)?, !s.payload().is_zero()))
    })
}

fn table1_rows() -> Vec<(&'static str, Label)> {
    vec![
        ("d f = d17 f", L1),
        ("d(f sigma) = d17 f ^ sigma", L1),
        ("d(f *sigma) = d17 f ^ *sigma", L1),
        ("d alpha = 1/3 *(d77 alpha ^ *sigma) + d714 alpha", L7),
        ("d*(alpha ^ *sigma) = -3/7 d71 alpha sigma - 1/2 *(d77 alpha ^ sigma) + d727 alpha", L7),
        ("d*(alpha ^ sigma) = 4/7 d71 alpha *sigma + 1/2 d77 alpha ^ sigma + *d727 alpha", L7),
        ("d(alpha ^ sigma) = 2/3 d77 alpha ^ *sigma - *d714 alpha", L7),
        ("d(alpha ^ *sigma) = *d77 alpha", L7),
        ("d(*alpha) = -d71 alpha *1", L7),
        ("d beta = 1/4 *(d147 beta ^ sigma) + d1427 beta", L14),
        ("d(*beta) = *d147 beta", L14),
        ("d gamma = 1/4 d277 gamma ^ sigma + *d2727 gamma", L27),
        ("d(*gamma) = -1/3 d277 gamma ^ *sigma - *d2714 gamma", L27),
    ]
}

fn table1_row(k: usize, s: &TypedSection) -> Result<PolyForm> {
    let st = standard();
    let sigma = PolyForm::constant(st.sigma().clone());
    let psi = PolyForm::constant(st.psi().clone());
    let vol = PolyForm::constant(Form::volume());
    let star = |a: &PolyForm| a.map(7 - a.degree(), |f| st.star(f));
    let op = |p, q| dpq(p, q, s).map(TypedSection::into_payload);
    let x = s.payload();
    let c = |n, d| r(n, d);
    Ok(match k {
        0 => d_poly(x) - op(L1, L7)?,
        1 => d_poly(&x.wedge(&sigma)) - op(L1, L7)?.wedge(&sigma),
        2 => d_poly(&x.wedge(&psi)) - op(L1, L7)?.wedge(&psi),
        3 => d_poly(x) - star(&op(L7, L7)?.wedge(&psi)).scale(&c(1, 3)) - op(L7, L14)?,
        4 => {
            d_poly(&star(&x.wedge(&psi))) + op(L7, L1)?.wedge(&sigma).scale(&c(3, 7))
                + star(&op(L7, L7)?.wedge(&sigma)).scale(&c(1, 2))
                - op(L7, L27)?
        }
        5 => {
            d_poly(&star(&x.wedge(&sigma)))
                - op(L7, L1)?.wedge(&psi).scale(&c(4, 7))
                - op(L7, L7)?.wedge(&sigma).scale(&c(1, 2))
                - star(&op(L7, L27)?)
        }
        6 => d_poly(&x.wedge(&sigma)) - op(L7, L7)?.wedge(&psi).scale(&c(2, 3)) + star(&op(L7, L14)?),
        7 => d_poly(&x.wedge(&psi)) - star(&op(L7, L7)?),
        8 => d_poly(&star(x)) + op(L7, L1)?.wedge(&vol),
        9 => d_poly(x) - star(&op(L14, L7)?.wedge(&sigma)).scale(&c(1, 4)) - op(L14, L27)?,
        10 => d_poly(&star(x)) - star(&op(L14, L7)?),
        11 => d_poly(x) - op(L27, L7)?.wedge(&sigma).scale(&c(1, 4)) - star(&op(L27, L27)?),
        12 => d_poly(&star(x)) + op(L27, L7)?.wedge(&psi).scale(&c(1, 3)) + star(&op(L27, L14)?),
        _ => unreachable!(),
    })
}

/// The α∧∗σ row with the opposite sign, d(α∧∗σ) = −∗d⁷₇α, evaluated on one
/// random section. Nonzero whenever d⁷₇α ≠ 0.
pub fn opposite_sign_row_residual(deg: u8, seed: u64) -> Result<Rational> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let s = random_section(&mut rng, L7, deg);
    let st = standard();
    let psi = PolyForm::constant(st.psi().clone());
    let d77 = dpq(L7, L7, &s)?.into_payload();
    let res = d_poly(&s.payload().wedge(&psi)) + d77.map(6, |f| st.star(f));
    Ok(res.max_abs())
}

/// Outcome of the adjointness check for one pair d^p_q, d^q_p.
#[derive(Clone, Debug)]
pub struct AdjointResult {
    pub p: Label,
    pub q: Label,
    /// c with ⟨d^p_q s, t⟩ ≃ c·⟨s, d^q_p t⟩ modulo divergences, if one c fits all tests.
    pub ratio: Option<Rational>,
}

/// Test (d^p_q)* = c·d^q_p for the exterior-form inner products.
///
/// Both operators have constant coefficients, so ⟨Ds, t⟩ − ⟨s, D't⟩ is a
/// divergence for all s, t exactly when D' = −Σ A_iᵀ∂_i for D = Σ A_i∂_i.
/// That is checked on s = x_i·u and constant t (and vice versa) over bases u, w.
pub fn adjointness() -> Result<Vec<AdjointResult>> {
    let mut out = Vec::new();
    let bases: Vec<(Label, Vec<Form<Rational>>)> = Label::ALL.iter().map(|&l| (l, type_basis(l))).collect();
    let basis = |l: Label| bases.iter().find(|(k, _)| *k == l).map(|(_, b)| b).expect("all labels");
    for (p, q) in super::nonzero_operators() {
        if p > q {
            continue;
        }
        let mut ratio: Option<Rational> = None;
        let mut consistent = true;
        for i in 0..7 {
            let mut m = [0u8; 7];
            m[i] = 1;
            for u in basis(p) {
                let su = TypedSection::new(p, PolyForm::monomial(m, u.clone()))?;
                let du = dpq(p, q, &su)?.into_payload();
                let du = const_part(&du);
                for w in basis(q) {
                    let tw = TypedSection::new(q, PolyForm::monomial(m, w.clone()))?;
                    let dw = const_part(&dpq(q, p, &tw)?.into_payload());
                    let lhs = inner(&du, w);
                    let rhs = -inner(u, &dw);
                    match (lhs.is_zero(), rhs.is_zero()) {
                        (true, true) => {}
                        (false, false) => {
                            let c = lhs / rhs;
                            match &ratio {
                                None => ratio = Some(c),
                                Some(r0) if *r0 == c => {}
                                Some(_) => consistent = false,
                            }
                        }
                        _ => consistent = false,
                    }
                }
            }
        }
        out.push(AdjointResult { p, q, ratio: if consistent { ratio } else { None } });
    }
    Ok(out)
}

fn const_part(a: &PolyForm) -> Form<Rational> {
    a.terms()
        .find(|(m, _)| m.iter().all(|&e| e == 0))
        .map(|(_, f)| f.clone())
        .unwrap_or_else(|| Form::zero(a.degree()))
}

fn inner(a: &Form<Rational>, b: &Form<Rational>) -> Rational {
    a.terms().fold(Rational::zero(), |s, (m, x)| s + x.clone() * b.coeff_mask(m))
}

/// A spanning set of constant forms of the given type (projected basis forms).
fn type_basis(l: Label) -> Vec<Form<Rational>> {
    mask::masks_of_degree(l.degree())
        .iter()
        .map(|&m| l.project(&Form::from_terms(l.degree(), [(m, Rational::one())])))
        .filter(|f| !f.is_zero())
        .collect()
}
