//! Acceptance run: one PASS/FAIL line per criterion.
//!
//! Two criteria compare against printed values that do not hold (see
//! `KNOWN_DEVIATIONS`). They print FAIL with the reason; the run as a whole
//! fails only if a criterion outside that list fails, or if the replacement
//! checks attached to a deviation fail.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use g2kit::definite::{linear_deform, metric_from, DefiniteStructure};
use g2kit::exterior::{mask, pullback, Form, Metric};
use g2kit::flat::tables;
use g2kit::flow::{self, FlowMode, FlowOptions};
use g2kit::g2::{self, epsilon_tables, SymTensor};
use g2kit::invariant::{self, builtins, ricci_via_connection, G2Structure, LieAlgebra7};
use g2kit::{Matrix, Rational, Scalar};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Q = Rational;

/// Criteria whose printed target is known to be wrong, with the reason.
const KNOWN_DEVIATIONS: &[(u32, &str)] = &[
    (7, "printed solution e^{2t}ω¹²³ does not solve the flow; the flow follows (1+10t/3)^{3/5}ω¹²³"),
    (9, "printed row d(α∧∗σ) = −∗d⁷₇α contradicts the other rows; it holds with + sign"),
];

struct Outcome {
    pass: bool,
    detail: String,
    /// For known deviations: the replacement checks, which must hold.
    deviation_ok: Option<bool>,
}

impl Outcome {
    fn new(pass: bool, detail: impl Into<String>) -> Self {
        Outcome { pass, detail: detail.into(), deviation_ok: None }
    }
}

fn q(n: i64, d: i64) -> Q {
    Q::ratio(n, d)
}

fn rand_q(rng: &mut ChaCha8Rng) -> Q {
    let d = rng.gen_range(1..=4i64);
    q(rng.gen_range(-3 * d..=3 * d), d)
}

fn rand_form_q(rng: &mut ChaCha8Rng, p: usize) -> Form<Q> {
    Form::from_terms(p, mask::masks_of_degree(p).iter().map(|&m| (m, rand_q(rng))).collect::<Vec<_>>())
}

fn rand_form_f(rng: &mut ChaCha8Rng, p: usize, size: f64) -> Form<f64> {
    Form::from_terms(p, mask::masks_of_degree(p).iter().map(|&m| (m, size * rng.gen_range(-1.0..1.0))).collect::<Vec<_>>())
}

fn rand_sym_q(rng: &mut ChaCha8Rng) -> SymTensor<Q> {
    let mut m = Matrix::zeros(7);
    for i in 0..7 {
        for j in i..7 {
            let v = rand_q(rng);
            m[(i, j)] = v.clone();
            m[(j, i)] = v;
        }
    }
    SymTensor::new(m).unwrap()
}

fn delta(i: usize, j: usize) -> i32 {
    (i == j) as i32
}

// 1
fn epsilon_identities() -> Outcome {
    let t = epsilon_tables();
    let e3 = |i, j, k| t.e3(i, j, k);
    let e4 = |i, j, k, l| t.e4(i, j, k, l);
    let mut bad = [0usize; 4];
    for k in 0..7 {
        for l in 0..7 {
            let s: i32 = (0..7).flat_map(|i| (0..7).map(move |j| (i, j))).map(|(i, j)| e3(i, j, k) * e3(i, j, l)).sum();
            bad[0] += (s != 6 * delta(k, l)) as usize;
        }
    }
    for qq in 0..7 {
        for k in 0..7 {
            for l in 0..7 {
                let s: i32 = (0..7).flat_map(|i| (0..7).map(move |j| (i, j))).map(|(i, j)| e3(i, j, qq) * e4(i, j, k, l)).sum();
                bad[1] += (s != 4 * e3(qq, k, l)) as usize;
            }
        }
    }
    for p in 0..7 {
        for qq in 0..7 {
            for j in 0..7 {
                for k in 0..7 {
                    let s: i32 = (0..7).map(|i| e3(i, p, qq) * e3(i, j, k)).sum();
                    let want = e4(p, qq, j, k) + delta(p, j) * delta(qq, k) - delta(p, k) * delta(qq, j);
                    bad[2] += (s != want) as usize;
                    for l in 0..7 {
                        let s: i32 = (0..7).map(|i| e3(i, p, qq) * e4(i, j, k, l)).sum();
                        let want = delta(p, j) * e3(qq, k, l) - delta(j, qq) * e3(p, k, l) + delta(p, k) * e3(j, qq, l)
                            - delta(k, qq) * e3(j, p, l)
                            + delta(p, l) * e3(j, k, qq)
                            - delta(l, qq) * e3(j, k, p);
                        bad[3] += (s != want) as usize;
                    }
                }
            }
        }
    }
    Outcome::new(bad == [0; 4], format!("failing index tuples per identity: {bad:?}"))
}

// 2
fn ij_calculus() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let st = DefiniteStructure::<Q>::standard();
    let id = Metric::<Q>::identity();
    let g = Matrix::<Q>::identity(7);
    let mut fails = 0;
    let anchors = g2::i_map(&SymTensor::new(g.clone()).unwrap()) == g2::phi::<Q>().scale(&q(6, 1))
        && g2::j_map(&g2::phi::<Q>()).unwrap().matrix() == &g.scale(&q(6, 1));
    for _ in 0..100 {
        let h = rand_sym_q(&mut rng);
        let jih = g2::j_map(&g2::i_map(&h)).unwrap();
        let want = h.matrix().scale(&q(8, 1)).add(&g.scale(&(h.trace() * q(4, 1))));
        fails += (jih.matrix() != &want) as usize;
        let h0 = h.traceless_with(&id);
        fails += (st.norm2(&g2::i_map(&h0)) != h0.norm2_with(&id) * q(8, 1)) as usize;
    }
    Outcome::new(anchors && fails == 0, format!("anchors i(g)=6φ, j(φ)=6g: {anchors}; failures over 100 h: {fails}"))
}

// 3
fn lambda14_identities() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let st = DefiniteStructure::<Q>::standard();
    let psi = st.psi().clone();
    let mut fails = [0usize; 5];
    let mut worst_eig: f64 = 0.0;
    for _ in 0..100 {
        let a = st.project2(&rand_form_q(&mut rng, 2)).unwrap().beta14;
        let n2 = st.norm2(&a);
        let aa = a.wedge(&a);
        fails[0] += (st.norm2(&aa) != n2.clone() * n2.clone()) as usize;
        let a3 = aa.wedge(&a);
        fails[1] += (st.norm2(&a3) > q(2, 3) * n2.powi(3)) as usize;
        let lhs = a.wedge(&st.star(&aa));
        let rhs = st.star(&a).scale(&n2) - st.star(&a3).wedge(&psi).scale(&q(1, 3));
        fails[2] += (lhs != rhs) as usize;
        let piece = &aa + &psi.scale(&(n2.clone() / q(7, 1)));
        fails[3] += (st.norm2(&piece) != q(6, 7) * n2.clone() * n2.clone()) as usize;
        let eig = g2::j_map(&st.star(&aa)).unwrap().matrix().to_f64().symmetric_eigenvalues();
        let n = n2.to_f64();
        let lo = eig.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = eig.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let excess = (-2.0 * n - lo).max(hi - 2.0 / 3.0 * n);
        worst_eig = worst_eig.max(excess);
        fails[4] += (excess > 1e-10 * (1.0 + n)) as usize;
    }
    Outcome::new(
        fails == [0; 5],
        format!("failures [quartic, sextic, cubic, 27-piece, j-bounds] = {fails:?}; worst bound excess {worst_eig:.1e}"),
    )
}

// 4
fn metric_extraction() -> Outcome {
    let ok_phi = metric_from(&g2::phi::<Q>()).unwrap().metric().matrix() == &Matrix::identity(7);
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut worst: f64 = 0.0;
    for k in 0..100 {
        let mut a = Matrix::from_fn(7, |i, j| (i == j) as i32 as f64 + 0.4 * rng.gen_range(-1.0..1.0));
        if k % 2 == 1 {
            for j in 0..7 {
                a[(0, j)] = -a[(0, j)];
            }
        }
        let st = metric_from(&pullback(&a, &g2::phi::<f64>())).unwrap();
        let want = a.transpose().mul(&a);
        worst = worst.max(st.metric().matrix().sub(&want).max_abs() / want.max_abs());
    }
    let mut scaling = true;
    for (n, d) in [(2, 1), (3, 2), (-1, 1), (-5, 3)] {
        let l = q(n, d);
        let st = metric_from(&g2::phi::<Q>().scale(&l.powi(3))).unwrap();
        scaling &= st.metric().matrix() == &Matrix::identity(7).scale(&(l.clone() * l));
    }
    Outcome::new(
        ok_phi && worst <= 1e-8 && scaling,
        format!("metric(φ) = I: {ok_phi}; GL residual {worst:.1e} over 100 A; λ³φ ↦ λ²g exact: {scaling}"),
    )
}

fn random_pairs(seed: u64, n: usize) -> Vec<(LieAlgebra7<f64>, Form<f64>)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            let l = invariant::random_algebra(&mut rng, 1.0);
            let s = invariant::random_structure(&mut rng, 0.2);
            (l, s)
        })
        .collect()
}

// 5
fn torsion_extraction() -> Outcome {
    let mut worst_rec: f64 = 0.0;
    let mut worst_tau1: f64 = 0.0;
    let mut errors = 0;
    for (l, sigma) in random_pairs(5, 100) {
        let s = G2Structure::new(&l, &sigma).unwrap();
        match s.torsion(1e-10) {
            Ok(t) => {
                let (ds, dp) = s.reconstruct(&t);
                worst_rec = worst_rec.max((&ds - s.d_sigma()).max_abs()).max((&dp - s.d_psi()).max_abs());
                worst_tau1 = worst_tau1.max((&t.tau1 - &t.tau1_from_dpsi).max_abs());
            }
            Err(_) => errors += 1,
        }
    }
    Outcome::new(
        errors == 0 && worst_rec <= 1e-10 && worst_tau1 <= 1e-10,
        format!("reconstruction {worst_rec:.1e}, τ₁ agreement {worst_tau1:.1e}, extraction errors {errors}"),
    )
}

// 6
fn curvature_cross_oracle() -> Outcome {
    let mut worst_scal: f64 = 0.0;
    let mut worst_ric: f64 = 0.0;
    for (l, sigma) in random_pairs(6, 100) {
        let s = G2Structure::new(&l, &sigma).unwrap();
        let scal = s.scalar_curvature(1e-10).unwrap();
        let c = s.curvature(1e-10).unwrap();
        let k = ricci_via_connection(&l, s.structure().metric()).unwrap();
        worst_scal = worst_scal.max((scal - k.trace_with(s.structure().metric())).abs());
        worst_ric = worst_ric.max(c.ric.matrix().sub(k.matrix()).max_abs());
    }
    Outcome::new(
        worst_scal <= 1e-8 && worst_ric <= 1e-8,
        format!("max |Scal − tr Ric_LC| = {worst_scal:.1e}, max |Ric − Ric_LC| = {worst_ric:.1e}"),
    )
}

// 7
fn fernandez() -> Outcome {
    let lq = builtins::fernandez::<Q>();
    let s = G2Structure::new(&lq, &g2::phi()).unwrap();
    let t = s.torsion(0.0).unwrap();
    let tau2_ok = t.tau2 == Form::basis(&[2, 7]) - Form::basis(&[3, 6]);
    let r = s.closed_report(0.0).unwrap();
    let scal_ok = r.tau2_norm2 == q(2, 1) && r.scal == q(-1, 1);

    let l = builtins::fernandez::<f64>();
    let trace = flow::run_flow(&l, &g2::phi(), FlowOptions { t_end: 1.0, dt: 1e-3, mode: FlowMode::Closed }).unwrap();
    let end = trace.sigma.clone();
    let g_end = metric_from(&end).unwrap().metric().matrix().clone();
    let printed_sigma = (&end - &flow::fernandez_exponential(1.0)).max_abs();
    let printed_metric = g_end.sub(&flow::fernandez_exponential_metric(1.0)).max_abs();
    let true_sigma = (&end - &flow::fernandez_reference(1.0)).max_abs();
    let true_metric = g_end.sub(&flow::fernandez_metric(1.0)).max_abs();
    let vol_up = trace.rows.windows(2).all(|w| w[1].vol > w[0].vol);
    let closed = trace.rows.iter().map(|r| r.closed_residual).fold(0.0, f64::max);

    let common = trace.reached_end() && tau2_ok && scal_ok && vol_up && closed <= 1e-12;
    let printed = printed_sigma <= 1e-6 && printed_metric <= 1e-6;
    let replacement = true_sigma <= 1e-6 && true_metric <= 1e-6;
    Outcome {
        pass: common && printed,
        detail: format!(
            "τ₂ exact {tau2_ok}, Scal −1 {scal_ok}, vol increasing {vol_up}, closedness {closed:.1e}; \
             printed e^{{2t}} solution off by {printed_sigma:.3} (σ) / {printed_metric:.3} (g); \
             power-law solution off by {true_sigma:.1e} (σ) / {true_metric:.1e} (g)"
        ),
        deviation_ok: Some(common && replacement),
    }
}

// 8
fn erp() -> Outcome {
    let l = builtins::erp_sl2c::<Q>();
    let s = G2Structure::new(&l, &g2::phi()).unwrap();
    let t = s.torsion(0.0).unwrap();
    let six = q(6, 1);
    let tau2_ok = t.tau2 == (Form::basis(&[4, 5]) - Form::basis(&[6, 7])).scale(&six);
    let res_ok = s.erp_residual(0.0).unwrap().is_zero();
    let cube_ok = t.tau2.power(3).is_zero();
    let rank = g2::two_form_rank(&t.tau2, 0.0).unwrap();
    let spec = s.curvature(0.0).unwrap().spectrum;
    let want = [-12.0, -12.0, -12.0, 0.0, 0.0, 0.0, 0.0];
    let spec_err = spec.iter().zip(want).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    Outcome::new(
        tau2_ok && res_ok && cube_ok && rank == 4 && spec_err <= 1e-9,
        format!("τ₂ exact {tau2_ok}, ERP residual 0 {res_ok}, τ₂³ = 0 {cube_ok}, rank {rank}, spectrum error {spec_err:.1e}"),
    )
}

// 9
fn flat_tables() -> Outcome {
    let t1 = tables::table1_residuals(50, 2, 9).unwrap();
    let t2 = tables::table2_residuals(50, 2, 9).unwrap();
    let t3 = tables::table3_residuals(50, 2, 9).unwrap();
    let z = tables::zero_operator_residuals(50, 2, 9).unwrap();
    let opposite = tables::opposite_sign_row_residual(2, 9).unwrap();
    let nonzero: Vec<String> = [&t1, &t2, &t3, &z]
        .iter()
        .flat_map(|t| t.results.iter().filter(|r| !r.max_residual.is_zero()).map(|r| r.name.clone()))
        .collect();
    let rows_ok = nonzero.is_empty();
    let printed_ok = opposite.is_zero();
    Outcome {
        pass: rows_ok && printed_ok,
        detail: format!(
            "{} + {} + {} identities and {} zero operators over 50 sections: nonzero {:?}; \
             printed d(α∧∗σ) = −∗d⁷₇α residual {}",
            t1.results.len(),
            t2.results.len(),
            t3.results.len(),
            z.results.len(),
            nonzero,
            opposite
        ),
        deviation_ok: Some(rows_ok && !printed_ok),
    }
}

// 10
fn deformation_calculus() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let mut worst_rel: f64 = 0.0;
    let mut worst_ratio: f64 = f64::INFINITY;
    let mut best_ratio: f64 = 0.0;
    for _ in 0..20 {
        let sigma = invariant::random_structure(&mut rng, 0.2);
        let sdot = rand_form_f(&mut rng, 3, 1.0);
        let st = metric_from(&sigma).unwrap();
        let f = st.deformation_split(&sdot).unwrap();
        let p = st.predicted_derivatives(&f, 1e-10).unwrap();
        let fd = |h: f64| {
            let a = metric_from(&(&sigma + &sdot.scale(&h))).unwrap();
            let b = metric_from(&(&sigma - &sdot.scale(&h))).unwrap();
            let g = a.metric().matrix().sub(b.metric().matrix()).scale(&(0.5 / h));
            let d4 = (a.psi() - b.psi()).scale(&(0.5 / h));
            let v = (a.volume_factor() - b.volume_factor()) * (0.5 / h);
            [
                g.sub(p.metric.matrix()).max_abs() / p.metric.matrix().max_abs(),
                (&d4 - &p.dual4).max_abs() / p.dual4.max_abs(),
                (v - p.volume).abs() / p.volume.abs().max(1e-3),
            ]
        };
        let e1 = fd(1e-4);
        let e2 = fd(5e-5);
        for k in 0..3 {
            worst_rel = worst_rel.max(e1[k]);
            let ratio = e1[k] / e2[k];
            worst_ratio = worst_ratio.min(ratio);
            best_ratio = best_ratio.max(ratio);
        }
    }
    let coeffs = taylor_coefficients();
    let want = [7.0, 14.0, 2.0 / 3.0, -1.0 / 6.0];
    let taylor_err = coeffs.iter().zip(want).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    Outcome::new(
        worst_rel <= 1e-5 && worst_ratio >= 3.0 && best_ratio <= 5.0 && taylor_err <= 1e-6,
        format!(
            "max relative FD error {worst_rel:.1e} at h = 1e-4; halving ratios in [{worst_ratio:.2}, {best_ratio:.2}]; \
             fitted Taylor coefficients {coeffs:.7?} (error {taylor_err:.1e})"
        ),
    )
}

/// Fit vol(σ)/vol(φ) along three lines and read off (7, 14, 2/3, −1/6).
fn taylor_coefficients() -> [f64; 4] {
    let st = DefiniteStructure::<f64>::standard();
    let mut rng = ChaCha8Rng::seed_from_u64(100);
    let b1 = {
        let v = rand_form_f(&mut rng, 1, 1.0);
        v.scale(&(1.0 / st.norm2(&v).sqrt()))
    };
    let b3 = {
        let v = st.project3(&rand_form_f(&mut rng, 3, 1.0)).unwrap().gamma27;
        v.scale(&(1.0 / st.norm2(&v).sqrt()))
    };
    let z1 = Form::zero(1);
    let z3 = Form::zero(3);
    let vol = |s: &Form<f64>| *metric_from(s).unwrap().volume_factor();
    let c0 = fit(|t| vol(&linear_deform(&t, &z1, &z3)));
    let c1 = fit(|t| vol(&linear_deform(&0.0, &b1.scale(&t), &z3)));
    let c3 = fit(|t| vol(&linear_deform(&0.0, &z1, &b3.scale(&t))));
    [c0[1], c0[2], c1[2], c3[2]]
}

/// Least-squares polynomial fit of degree 6 on [−0.05, 0.05]; coefficients of t⁰…t⁶.
fn fit(f: impl Fn(f64) -> f64) -> Vec<f64> {
    let (n, deg, r) = (41, 6, 0.05);
    let ts: Vec<f64> = (0..n).map(|k| r * (2.0 * k as f64 / (n - 1) as f64 - 1.0)).collect();
    let a = nalgebra::DMatrix::from_fn(n, deg + 1, |i, j| (ts[i] / r).powi(j as i32));
    let b = nalgebra::DVector::from_iterator(n, ts.iter().map(|&t| f(t)));
    let c = a.svd(true, true).solve(&b, 1e-14).expect("full rank");
    (0..=deg).map(|j| c[j] / r.powi(j as i32)).collect()
}

// 11
fn closed_structures() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut cases: Vec<(String, LieAlgebra7<Q>, Form<Q>)> = vec![
        ("abelian".into(), LieAlgebra7::abelian(), g2::phi()),
        ("fernandez".into(), builtins::fernandez(), g2::phi()),
        ("erp-sl2c".into(), builtins::erp_sl2c(), g2::phi()),
    ];
    for base in ["fernandez", "erp-sl2c"] {
        for k in 0..3 {
            // unipotent, so the pulled-back structure keeps a rational metric
            let p = Matrix::from_fn(7, |i, j| if i == j { q(1, 1) } else if i < j { rand_q(&mut rng) } else { q(0, 1) });
            let l = builtins::by_name::<Q>(base).unwrap().change_basis(&p).unwrap();
            cases.push((format!("{base} conjugate {k}"), l, pullback(&p, &g2::phi())));
        }
    }
    let mut failures = Vec::new();
    for (name, l, sigma) in &cases {
        let s = G2Structure::new(l, sigma).unwrap();
        let r = match s.closed_report(0.0) {
            Ok(r) => r,
            Err(e) => {
                failures.push(format!("{name}: {e}"));
                continue;
            }
        };
        let sign_ok = r.scal <= Q::zero() && (r.scal.is_zero() == r.tau2.is_zero());
        let one_ok = r.lambda1_coefficient == r.tau2_norm2.clone() / q(7, 1);
        let seven_ok = r.lambda7_part.is_zero();
        if !(sign_ok && one_ok && seven_ok) {
            failures.push(format!("{name}: sign {sign_ok}, Λ³₁ {one_ok}, Λ³₇ {seven_ok}"));
        }
    }
    Outcome::new(failures.is_empty(), format!("{} closed examples; failures {:?}", cases.len(), failures))
}

fn main() -> ExitCode {
    let criteria: [(u32, &str, Option<Duration>, fn() -> Outcome); 11] = [
        (1, "epsilon identities", Some(Duration::from_secs(1)), epsilon_identities),
        (2, "i/j calculus", Some(Duration::from_secs(1)), ij_calculus),
        (3, "Λ²₁₄ identities", Some(Duration::from_secs(5)), lambda14_identities),
        (4, "metric extraction", Some(Duration::from_secs(2)), metric_extraction),
        (5, "torsion extraction", Some(Duration::from_secs(10)), torsion_extraction),
        (6, "curvature cross-oracle", Some(Duration::from_secs(30)), curvature_cross_oracle),
        (7, "Fernández example", Some(Duration::from_secs(10)), fernandez),
        (8, "ERP example", Some(Duration::from_secs(5)), erp),
        (9, "flat operator identities", Some(Duration::from_secs(60)), flat_tables),
        (10, "deformation calculus", Some(Duration::from_secs(20)), deformation_calculus),
        (11, "closed-case structure", None, closed_structures),
    ];
    let mut unexpected = Vec::new();
    for (n, name, budget, run) in criteria {
        let start = Instant::now();
        let out = run();
        let took = start.elapsed();
        let in_time = budget.map_or(true, |b| took <= b);
        let pass = out.pass && in_time;
        println!(
            "criterion {n:>2} {}: {name} ({:.2}s, budget {}) {}",
            if pass { "PASS" } else { "FAIL" },
            took.as_secs_f64(),
            budget.map_or("none".to_string(), |b| format!("{}s", b.as_secs())),
            out.detail
        );
        match KNOWN_DEVIATIONS.iter().find(|(k, _)| *k == n) {
            Some((_, why)) => {
                let ok = out.deviation_ok.unwrap_or(false) && in_time;
                println!("             known deviation: {why}; replacement checks {}", if ok { "hold" } else { "FAIL" });
                if !ok {
                    unexpected.push(n);
                }
            }
            None if !pass => unexpected.push(n),
            None => {}
        }
    }
    if unexpected.is_empty() {
        println!("acceptance: all criteria pass apart from the known deviations");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: unexpected failures in criteria {unexpected:?}");
        ExitCode::FAILURE
    }
}
