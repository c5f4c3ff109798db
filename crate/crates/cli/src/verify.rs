//! The `verify` suites. Each check carries a formula string as its anchor and
//! the worst residual seen over the trials.

use g2kit::definite::{metric_from, DefiniteStructure, DeformationForms};
use g2kit::exterior::{mask, pullback, Form, Metric};
use g2kit::flat::tables;
use g2kit::g2::{self, epsilon_tables, SymTensor};
use g2kit::invariant::{self, builtins, ricci_via_connection, G2Structure, LieAlgebra7};
use g2kit::{Matrix, Rational, Result, Scalar};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

type Q = Rational;

pub const SUITES: [&str; 5] = ["eps", "algebra", "types", "closed", "tables"];

pub struct Check {
    name: &'static str,
    anchor: String,
    residual: Value,
    pass: bool,
}

impl Check {
    /// Exact check: passes iff the residual is zero.
    fn exact(name: &'static str, anchor: impl Into<String>, residual: Q) -> Self {
        Check { name, anchor: anchor.into(), pass: residual.is_zero(), residual: residual.to_json() }
    }

    fn float(name: &'static str, anchor: impl Into<String>, residual: f64, tol: f64) -> Self {
        Check { name, anchor: anchor.into(), pass: residual <= tol, residual: json!(residual) }
    }

    fn to_json(&self) -> Value {
        json!({"check": self.name, "anchor": self.anchor, "residual": self.residual, "pass": self.pass})
    }
}

pub struct Report {
    pub suite: String,
    pub trials: usize,
    pub seed: u64,
    pub checks: Vec<Check>,
    pub notes: Vec<Value>,
}

impl Report {
    pub fn pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "suite": self.suite,
            "trials": self.trials,
            "seed": self.seed,
            "pass": self.pass(),
            "checks": self.checks.iter().map(Check::to_json).collect::<Vec<_>>(),
            "notes": self.notes,
        })
    }
}

pub fn run(suite: &str, trials: usize, seed: u64, tol: f64) -> Result<Report> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (checks, notes) = match suite {
        "eps" => (eps(), vec![]),
        "types" => (types(&mut rng, trials)?, vec![]),
        "algebra" => (algebra(&mut rng, trials, tol)?, vec![]),
        "closed" => (closed(&mut rng, trials)?, vec![]),
        "tables" => flat(trials, seed)?,
        _ => unreachable!("suite names are validated by the parser"),
    };
    Ok(Report { suite: suite.to_string(), trials, seed, checks, notes })
}

fn worst(a: Q, b: Q) -> Q {
    if b > a {
        b
    } else {
        a
    }
}

fn absq(x: Q) -> Q {
    x.abs()
}

fn rand_q<R: Rng>(rng: &mut R) -> Q {
    let d = rng.gen_range(1..=4i64);
    Q::ratio(rng.gen_range(-3 * d..=3 * d), d)
}

fn rand_form<R: Rng>(rng: &mut R, p: usize) -> Form<Q> {
    let v: Vec<Q> = (0..mask::masks_of_degree(p).len()).map(|_| rand_q(rng)).collect();
    Form::from_vec(p, &v)
}

fn form_max(a: &Form<Q>) -> Q {
    a.terms().fold(Q::zero(), |m, (_, c)| worst(m, c.abs()))
}

fn matrix_max(a: &Matrix<Q>) -> Q {
    let mut m = Q::zero();
    for i in 0..7 {
        for j in 0..7 {
            m = worst(m, a[(i, j)].abs());
        }
    }
    m
}

fn eps() -> Vec<Check> {
    let t = epsilon_tables();
    let d = |i: usize, j: usize| (i == j) as i32;
    let mut r = [0i32; 4];
    let range = || (0..7).flat_map(|i| (0..7).map(move |j| (i, j)));
    for (k, l) in range() {
        let s: i32 = range().map(|(i, j)| t.e3(i, j, k) * t.e3(i, j, l)).sum();
        r[0] = r[0].max((s - 6 * d(k, l)).abs());
    }
    for q in 0..7 {
        for (k, l) in range() {
            let s: i32 = range().map(|(i, j)| t.e3(i, j, q) * t.e4(i, j, k, l)).sum();
            r[1] = r[1].max((s - 4 * t.e3(q, k, l)).abs());
        }
    }
    for (p, q) in range() {
        for (j, k) in range() {
            let s: i32 = (0..7).map(|i| t.e3(i, p, q) * t.e3(i, j, k)).sum();
            let want = t.e4(p, q, j, k) + d(p, j) * d(q, k) - d(p, k) * d(q, j);
            r[2] = r[2].max((s - want).abs());
            for l in 0..7 {
                let s: i32 = (0..7).map(|i| t.e3(i, p, q) * t.e4(i, j, k, l)).sum();
                let want = d(p, j) * t.e3(q, k, l) - d(j, q) * t.e3(p, k, l) + d(p, k) * t.e3(j, q, l)
                    - d(k, q) * t.e3(j, p, l)
                    + d(p, l) * t.e3(j, k, q)
                    - d(l, q) * t.e3(j, k, p);
                r[3] = r[3].max((s - want).abs());
            }
        }
    }
    let q = |x: i32| Q::from_i64(x as i64);
    vec![
        Check::exact("eps-1", "ε_ijk ε_ijl = 6δ_kl", q(r[0])),
        Check::exact("eps-2", "ε_ijq ε_ijkl = 4ε_qkl", q(r[1])),
        Check::exact("eps-3", "ε_ipq ε_ijk = ε_pqjk + δ_pj δ_qk − δ_pk δ_qj", q(r[2])),
        Check::exact(
            "eps-4",
            "ε_ipq ε_ijkl = δ_pj ε_qkl − δ_jq ε_pkl + δ_pk ε_jql − δ_kq ε_jpl + δ_pl ε_jkq − δ_lq ε_jkp",
            q(r[3]),
        ),
    ]
}

fn types<R: Rng>(rng: &mut R, trials: usize) -> Result<Vec<Check>> {
    let st = DefiniteStructure::<Q>::standard();
    let psi = st.psi().clone();
    let g = Matrix::<Q>::identity(7);
    let id = Metric::<Q>::identity();
    let six = Q::from_i64(6);
    let anchors = form_max(&(g2::i_map(&SymTensor::new(g.clone())?) - g2::phi::<Q>().scale(&six)));
    let anchors = worst(anchors, matrix_max(&g2::j_map(&g2::phi::<Q>())?.matrix().sub(&g.scale(&six))));
    let mut r = vec![Q::zero(); 9];
    let mut bounds: f64 = 0.0;
    let mut equiv: f64 = 0.0;
    for _ in 0..trials {
        let mut m = Matrix::zeros(7);
        for i in 0..7 {
            for j in i..7 {
                let v = rand_q(rng);
                m[(i, j)] = v.clone();
                m[(j, i)] = v;
            }
        }
        let h = SymTensor::new(m)?;
        let jih = g2::j_map(&g2::i_map(&h))?;
        let want = h.matrix().scale(&Q::from_i64(8)).add(&g.scale(&(h.trace() * Q::from_i64(4))));
        r[0] = worst(r[0].clone(), matrix_max(&jih.matrix().sub(&want)));
        let h0 = h.traceless_with(&id);
        r[1] = worst(r[1].clone(), absq(st.norm2(&g2::i_map(&h0)) - h0.norm2_with(&id) * Q::from_i64(8)));

        let a = st.project2(&rand_form(rng, 2))?.beta14;
        let n2 = st.norm2(&a);
        let aa = a.wedge(&a);
        let a3 = aa.wedge(&a);
        r[2] = worst(r[2].clone(), absq(st.norm2(&aa) - n2.clone() * n2.clone()));
        let excess = st.norm2(&a3) - Q::ratio(2, 3) * n2.powi(3);
        r[3] = worst(r[3].clone(), worst(Q::zero(), excess));
        let cubic = a.wedge(&st.star(&aa)) - st.star(&a).scale(&n2) + st.star(&a3).wedge(&psi).scale(&Q::ratio(1, 3));
        r[4] = worst(r[4].clone(), form_max(&cubic));
        let parts = st.project4(&aa)?;
        let one = &parts.gamma1 + &psi.scale(&(n2.clone() / Q::from_i64(7)));
        r[5] = worst(r[5].clone(), worst(form_max(&parts.gamma7), form_max(&one)));
        let piece = &aa + &psi.scale(&(n2.clone() / Q::from_i64(7)));
        r[6] = worst(r[6].clone(), absq(st.norm2(&piece) - Q::ratio(6, 7) * n2.clone() * n2.clone()));
        let eig = g2::j_map(&st.star(&aa))?.matrix().to_f64().symmetric_eigenvalues();
        let n = n2.to_f64();
        for e in eig {
            bounds = bounds.max((-2.0 * n - e).max(e - 2.0 / 3.0 * n)).max(0.0);
        }

        let c = rand_form(rng, 3);
        let p = st.project3(&c)?;
        let again = st.project3(&p.gamma27)?;
        let split = &(&(&p.gamma1 + &p.gamma7) + &p.gamma27) - &c;
        r[7] = worst(r[7].clone(), worst(form_max(&split), worst(form_max(&again.gamma1), form_max(&again.gamma7))));
        let f = DeformationForms { f0: rand_q(rng), f1: rand_form(rng, 1), f3: p.gamma27.clone() };
        let back = st.deformation_split(&st.reconstruct(&f))?;
        let diff = worst(absq(back.f0 - f.f0), worst(form_max(&(&back.f1 - &f.f1)), form_max(&(&back.f3 - &f.f3))));
        r[8] = worst(r[8].clone(), diff);

        let a = Matrix::from_fn(7, |i, j| (i == j) as i32 as f64 + 0.4 * rng.gen_range(-1.0..1.0));
        let s = metric_from(&pullback(&a, &g2::phi::<f64>()))?;
        let want = a.transpose().mul(&a);
        equiv = equiv.max(s.metric().matrix().sub(&want).max_abs() / want.max_abs());
    }
    let [a0, a1, a2, a3, a4, a5, a6, a7, a8]: [Q; 9] = r.try_into().expect("nine residuals");
    Ok(vec![
        Check::exact("ij-anchors", "i(g) = 6φ, j(φ) = 6g", anchors),
        Check::exact("j-of-i", "j(i(h)) = 8h + 4 tr(h) g", a0),
        Check::exact("i-norm", "|i(h)|² = 8|h|² for traceless h", a1),
        Check::exact("quartic", "|α∧α|² = |α|⁴ on Λ²₁₄", a2),
        Check::exact("sextic", "|α³|² ≤ (2/3)|α|⁶ on Λ²₁₄", a3),
        Check::exact("cubic", "α∧∗(α∧α) = |α|²∗α − (1/3)∗(α³)∧∗φ on Λ²₁₄", a4),
        Check::exact("beta-squared", "β∧β = −(1/7)|β|²∗φ + Λ⁴₂₇ part on Λ²₁₄", a5),
        Check::exact("27-piece", "|β∧β + (1/7)|β|²∗φ|² = (6/7)|β|⁴ on Λ²₁₄", a6),
        Check::float("j-bounds", "−2|β|² g ≤ j(∗(β∧β)) ≤ (2/3)|β|² g", bounds, 1e-10),
        Check::exact("project3", "Λ³ = Λ³₁ ⊕ Λ³₇ ⊕ Λ³₂₇, idempotent projections", a7),
        Check::exact("deformation-split", "σ̇ = 3f⁰σ + ∗(f¹∧σ) + f³ round trip", a8),
        Check::float("equivariance", "g(A*φ) = Aᵀ A", equiv, 1e-8),
    ])
}

fn algebra<R: Rng>(rng: &mut R, trials: usize, tol: f64) -> Result<Vec<Check>> {
    let mut r = [0.0f64; 6];
    for _ in 0..trials {
        let l = invariant::random_algebra(rng, 1.0);
        let sigma = invariant::random_structure(rng, 0.2);
        r[0] = r[0].max(l.jacobi_residual());
        let s = G2Structure::new(&l, &sigma)?;
        let st = s.structure();
        let t = s.torsion(tol)?;
        let (ds, dp) = s.reconstruct(&t);
        r[1] = r[1].max((&ds - s.d_sigma()).max_abs()).max((&dp - s.d_psi()).max_abs());
        r[2] = r[2].max((&t.tau1 - &t.tau1_from_dpsi).max_abs());
        let ident = &st.psi().wedge(&st.star(s.d_psi())) + &st.star(s.d_sigma()).wedge(st.sigma());
        r[3] = r[3].max(ident.max_abs());
        let c = s.curvature(tol)?;
        let k = ricci_via_connection(&l, st.metric())?;
        r[4] = r[4].max((s.scalar_curvature(tol)? - k.trace_with(st.metric())).abs());
        r[5] = r[5].max(c.ric.matrix().sub(k.matrix()).max_abs());
    }
    Ok(vec![
        Check::float("jacobi", "d² = 0 on the generated algebras", r[0], 1e-12),
        Check::float("torsion-reconstruction", "dσ and d∗σ rebuilt from τ₀, τ₁, τ₂, τ₃", r[1], 1e-10),
        Check::float("tau1-agreement", "τ₁ from dσ equals τ₁ from d∗σ", r[2], 1e-10),
        Check::float("torsion-identity", "∗σ∧∗(d∗σ) + (∗dσ)∧σ = 0", r[3], 1e-10),
        Check::float("scalar-curvature", "Scal(τ) = tr Ric of the Levi-Civita connection", r[4], 1e-8),
        Check::float("ricci", "Ric(τ) = Ric of the Levi-Civita connection", r[5], 1e-8),
    ])
}

/// The builtin closed examples plus `trials` conjugates of Fernández and ERP by
/// random unipotent rational matrices.
pub fn closed_examples<R: Rng>(rng: &mut R, trials: usize) -> Result<Vec<(LieAlgebra7<Q>, Form<Q>)>> {
    let mut out = vec![
        (LieAlgebra7::abelian(), g2::phi()),
        (builtins::fernandez(), g2::phi()),
        (builtins::erp_sl2c(), g2::phi()),
    ];
    for k in 0..trials {
        let base = if k % 2 == 0 { builtins::fernandez::<Q>() } else { builtins::erp_sl2c() };
        let p = Matrix::from_fn(7, |i, j| if i == j { Q::one() } else if i < j { rand_q(rng) } else { Q::zero() });
        out.push((base.change_basis(&p)?, pullback(&p, &g2::phi())));
    }
    Ok(out)
}

fn closed<R: Rng>(rng: &mut R, trials: usize) -> Result<Vec<Check>> {
    let mut r = vec![Q::zero(); 4];
    for (l, sigma) in closed_examples(rng, trials)? {
        let c = G2Structure::new(&l, &sigma)?.closed_report(0.0)?;
        r[0] = worst(r[0].clone(), absq(c.scal.clone() + c.tau2_norm2.clone() / Q::from_i64(2)));
        let sign_bad = c.scal > Q::zero() || c.scal.is_zero() != c.tau2.is_zero();
        r[1] = worst(r[1].clone(), if sign_bad { Q::one() } else { Q::zero() });
        r[2] = worst(r[2].clone(), absq(c.lambda1_coefficient.clone() - c.tau2_norm2 / Q::from_i64(7)));
        r[3] = worst(r[3].clone(), form_max(&c.lambda7_part));
    }
    let [a0, a1, a2, a3]: [Q; 4] = r.try_into().expect("four residuals");
    Ok(vec![
        Check::exact("scal-closed", "Scal = −½|τ₂|² when dσ = 0", a0),
        Check::exact("scal-sign", "Scal ≤ 0, with equality iff τ₂ = 0", a1),
        Check::exact("dtau2-one-part", "Λ³₁ part of dτ₂ is (1/7)|τ₂|²σ", a2),
        Check::exact("dtau2-seven-part", "Λ³₇ part of dτ₂ vanishes", a3),
    ])
}

fn flat(trials: usize, seed: u64) -> Result<(Vec<Check>, Vec<Value>)> {
    let reports = [
        tables::table1_residuals(trials, 2, seed)?,
        tables::table2_residuals(trials, 2, seed)?,
        tables::table3_residuals(trials, 2, seed)?,
        tables::zero_operator_residuals(trials, 2, seed)?,
    ];
    let names = ["table-1", "table-2", "table-3", "zero-operator"];
    let mut checks = Vec::new();
    for (name, rep) in names.iter().zip(&reports) {
        for row in &rep.results {
            checks.push(Check::exact(name, row.name.clone(), row.max_residual.clone()));
        }
    }
    let adj: Vec<Value> = tables::adjointness()?
        .iter()
        .map(|a| json!({"p": a.p.to_string(), "q": a.q.to_string(), "ratio": a.ratio.as_ref().map(|c| c.to_string())}))
        .collect();
    let opposite = tables::opposite_sign_row_residual(2, seed)?;
    let notes = vec![
        json!({"note": "formal adjoint ratios for (d^p_q, d^q_p) with exterior-form inner products", "pairs": adj}),
        json!({"note": "residual of d(α∧∗σ) = −∗d⁷₇α, the opposite sign to the checked row", "residual": opposite.to_string()}),
    ];
    Ok((checks, notes))
}
