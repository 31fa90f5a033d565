//! Acceptance criteria. Every check prints a `PASS`/`FAIL` line; a
//! criterion fails if any of its checks does, and the run fails if any
//! criterion does. Positional arguments filter criteria by name.

use std::time::{Duration, Instant};

use cmf::analysis::{estimate, pp_report, rho_predicted, Convergence};
use cmf::cmf_core::{eval_matrix, matrices_equal};
use cmf::constructors::{builtin, builtin_names, gauge_check, pfq_cmf, PfqSpec};
use cmf::explore::{enumerate_directions, scan, DirectionReport, Orthant, ScanConfig};
use cmf::exprio::parse_matrix;
use cmf::trajectory::{metric_at, probe, walk, RatioVectors, Walker};
use cmf::{BigInt, BigRat, Matrix, QMat, RatMat};
use num_traits::{Signed, ToPrimitive, Zero};

struct Checks {
    id: &'static str,
    failed: Vec<String>,
}

impl Checks {
    fn new(id: &'static str) -> Self {
        Checks { id, failed: Vec::new() }
    }

    fn check(&mut self, name: &str, ok: bool, detail: impl std::fmt::Display) {
        println!("[{}] {} {name}: {detail}", self.id, if ok { "PASS" } else { "FAIL" });
        if !ok {
            self.failed.push(name.to_string());
        }
    }

    fn finish(self) {
        assert!(self.failed.is_empty(), "[{}] failed checks: {:?}", self.id, self.failed);
    }
}

fn q(n: i64) -> BigRat {
    BigRat::from_integer(n.into())
}

fn qs(v: &[i64]) -> Vec<BigRat> {
    v.iter().map(|&n| q(n)).collect()
}

fn frac(n: i64, d: i64) -> BigRat {
    BigRat::new(n.into(), d.into())
}

fn f64_of(x: &BigRat) -> f64 {
    x.to_f64().unwrap()
}

/// ζ(3) to `digits` decimals from
/// ζ(3) = 5/2 · Σ_{k≥1} (−1)^{k+1} / (k³ C(2k,k)), in fixed point.
fn zeta3_oracle(digits: usize) -> BigRat {
    let guard = 20;
    let scale = num_traits::pow(BigInt::from(10), digits + guard);
    // t_k = (−1)^{k+1} scale / (k³ C(2k,k)); t_{k+1} = −t_k k³ / (2 (k+1)² (2k+1))
    let mut t = &scale / BigInt::from(2);
    let mut sum = BigInt::zero();
    let mut k: u64 = 1;
    while !t.is_zero() {
        sum += &t;
        t = -(t * BigInt::from(k * k * k)) / BigInt::from(2 * (k + 1) * (k + 1) * (2 * k + 1));
        k += 1;
    }
    let value = BigRat::new(sum * 5, scale * 2);
    // keep `digits` decimals
    let unit = num_traits::pow(BigInt::from(10), digits);
    BigRat::new((value * BigRat::from_integer(unit.clone())).round().to_integer(), unit)
}

const ZETA3_200: &str = "1.20205690315959428539973816151144999076498629234049888179227155534183820578631309018645587360933525814619915779526071941849199599867328321377639683720790016145394178294936006671919157552224249424396156";

const LOG2_60: &str = "0.69314718055994530941723212145817656807550013436025525412068";

fn parse_dec(s: &str) -> BigRat {
    cmf::rat::parse_decimal(s).unwrap()
}

fn c1_apery_zeta3() {
    let mut c = Checks::new("C1");
    let reference = zeta3_oracle(4000);
    let published = parse_dec(ZETA3_200);
    let agree = (&reference - &published).abs() < BigRat::new(1.into(), num_traits::pow(BigInt::from(10), 199));
    c.check("reference constant", agree, "4000-digit series agrees with the published 200 digits");

    let b = builtin("zeta3").unwrap();
    let vecs = RatioVectors::new(qs(&[0, 1]), qs(&[1, 1]));
    let t0 = Instant::now();
    let (vals, singular) = probe(&b.cmf, &qs(&[1, 1]), &[1, 1], &vecs, &[500, 1000]).unwrap();
    let walk_time = t0.elapsed();
    c.check("no singular steps", singular.is_empty(), format!("{} singular", singular.len()));

    let m500 = metric_at(&vals[0], 500, &reference);
    let m1000 = metric_at(&vals[1], 1000, &reference);
    let err = vals[1].log_abs_diff_rat(&reference).unwrap();
    c.check("L(n) → ζ(3)", err < -7000.0, format!("ln|L(1000) − ζ(3)| = {err:.1}"));

    let target = -8.0 * (1.0 + 2f64.sqrt()).ln();
    let rho = m500.rho.unwrap();
    c.check("ρ_500 within 1%", ((rho - target) / target).abs() < 0.01, format!("ρ_500 = {rho:.6}, −8 ln(1+√2) = {target:.6}"));
    let delta = m1000.delta.unwrap();
    c.check("δ_1000 in [0.05, 0.15]", (0.05..=0.15).contains(&delta), format!("δ_1000 = {delta:.5} (liminf bound 0.0805)"));
    c.check("walk runtime", walk_time < Duration::from_secs(120), format!("{walk_time:.2?} for 1000 steps"));
    c.finish();
}

/// u(n) for (n+2)³u(n+2) − (2n+3)(17n²+51n+39)u(n+1) + (n+1)³u(n) = 0.
fn apery_recurrence(u0: i64, u1: i64, count: usize) -> Vec<BigRat> {
    let mut u = vec![q(u0), q(u1)];
    for n in 0..count as i64 {
        let a = q((2 * n + 3) * (17 * n * n + 51 * n + 39));
        let b = q((n + 1).pow(3));
        let next = (a * &u[n as usize + 1] - b * &u[n as usize]) / q((n + 2).pow(3));
        u.push(next);
    }
    u
}

fn c2_apery_initial_conditions() {
    let mut c = Checks::new("C2");
    let comp = builtin("apery_coboundary_A").unwrap();
    let a = eval_matrix(&comp.aux["A"], &qs(&[1, 1])).unwrap();
    let at = a.transpose();
    let want: QMat = Matrix::from_rows(vec![qs(&[1, 0]), qs(&[-1, 6])]);
    c.check("Aᵗ(1,1)", at == want, format!("{at}"));
    let mul = |v: &[BigRat]| -> Vec<BigRat> { (0..2).map(|i| (0..2).fold(q(0), |s, j| s + at.get(i, j) * &v[j])).collect() };
    let (u1, u2) = (mul(&qs(&[0, 1])), mul(&qs(&[1, 1])));
    let show = |v: &[BigRat]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", ");
    c.check("p ↦ u₁", u1 == qs(&[0, 6]), format!("({})", show(&u1)));
    c.check("q ↦ u₂", u2 == qs(&[1, 5]), format!("({})", show(&u2)));

    let oracle1 = apery_recurrence(0, 6, 51);
    let oracle2 = apery_recurrence(1, 5, 51);
    // (u(n), u(n+1)) · M_{n(1,1)}(1,1) = (u(n+n'), ...) for the companion walk
    let vecs = RatioVectors::new(u1.clone(), u2.clone());
    let mut w = Walker::new(&comp.cmf, &qs(&[1, 1]), &[1, 1], &vecs).unwrap();
    let mut mismatch = None;
    for n in 0..=50usize {
        let p = w.product();
        let row = |u: &[BigRat]| -> Vec<BigRat> { (0..2).map(|j| (0..2).fold(q(0), |s, i| s + &u[i] * p.get(i, j))).collect() };
        let (r1, r2) = (row(&u1), row(&u2));
        let ok = r1 == vec![oracle1[n].clone(), oracle1[n + 1].clone()] && r2 == vec![oracle2[n].clone(), oracle2[n + 1].clone()];
        let ratio_ok = w.current().value() == Some(&(&oracle1[n + 1] / &oracle2[n + 1]));
        if (!ok || !ratio_ok) && mismatch.is_none() {
            mismatch = Some(n);
        }
        if n < 50 {
            w.advance().unwrap();
        }
    }
    c.check("companion walk = scalar recurrence, n ≤ 50", mismatch.is_none(), format!("first mismatch {mismatch:?}; b(50) has {} digits", oracle2[50].numer().to_string().len()));
    c.finish();
}

fn c3_log2() {
    let mut c = Checks::new("C3");
    let t0 = Instant::now();
    let b = builtin("pfq21_zm1").unwrap();
    let vecs = RatioVectors::new(qs(&[0, 1]), qs(&[-2, 2]));
    let s = walk(&b.cmf, &qs(&[1, 1, 2]), &[1, 1, 2], &vecs, 3).unwrap();
    let want = [frac(1, 2), frac(11, 16), frac(79, 114), frac(1597, 2304)];
    let got: Vec<String> = (0..4).map(|n| s.get(n).map_or("undefined".into(), |v| v.to_string())).collect();
    c.check("exact values n = 0..3", (0..4).all(|n| s.get(n) == Some(&want[n])), got.join(", "));

    let est = estimate(&b.cmf, &qs(&[1, 1, 2]), &[1, 1, 2], &vecs, 100).unwrap();
    let log2 = parse_dec(LOG2_60);
    let err = f64_of(&(&est.l_hat - &log2)).abs();
    c.check("l̂ within 1e−10 of log 2", err < 1e-10, format!("|l̂ − log 2| = {err:.3e}"));
    let rho = est.rho.unwrap();
    c.check("ρ̂ within 5% of −3.53", ((rho + 3.53) / 3.53).abs() < 0.05, format!("ρ̂ = {rho:.4}"));
    let delta = est.delta.unwrap();
    c.check("δ̂ within ±0.05 of 0.31", (delta - 0.31).abs() < 0.05, format!("δ̂ = {delta:.4}"));

    let other = estimate(&b.cmf, &qs(&[-1, -1, 2]), &[-1, -1, 2], &vecs, 100).unwrap();
    c.check("x = v = (−1,−1,2) non-converging", other.converged == Convergence::NonConverging, format!("{:?}, ρ̂ = {:?}", other.converged, other.rho));
    let elapsed = t0.elapsed();
    c.check("runtime", elapsed < Duration::from_secs(30), format!("{elapsed:.2?}"));
    c.finish();
}

fn mat(rows: &[&[&str]], names: &[&str]) -> RatMat {
    let rows: Vec<Vec<String>> = rows.iter().map(|r| r.iter().map(|s| s.to_string()).collect()).collect();
    let names: Vec<String> = names.iter().map(|s| s.to_string()).collect();
    parse_matrix(&rows, &names).unwrap()
}

fn c4_symbolic_goldens() {
    let mut c = Checks::new("C4");
    for name in builtin_names() {
        let b = builtin(name).unwrap();
        c.check(&format!("verify {name}"), b.cmf.check_generators().is_ok(), "cocycle holds on generators");
    }

    let xz = ["x1", "x2", "x3", "z"];
    let f = pfq_cmf::<BigRat>(&PfqSpec::symbolic(2, 1)).unwrap();
    let m1 = mat(&[&["1", "x2*z/(1-z)"], &["1/x1", "(x1+x2*z-x3+1)/(x1*(1-z))"]], &xz);
    let m2 = mat(&[&["1", "x1*z/(1-z)"], &["1/x2", "(x1*z+x2-x3+1)/(x2*(1-z))"]], &xz);
    let s = "x3/((x1-x3)*(x2-x3))";
    let m3 = mat(
        &[
            &[&format!("{s}*(-x1-x2+x3)"), &format!("{s}*x1*x2")],
            &[&format!("{s}*(1/z-1)"), &format!("{s}*x3*(z-1)/z")],
        ],
        &xz,
    );
    for (i, m) in [m1, m2, m3].iter().enumerate() {
        c.check(&format!("2F1 generator {}", i + 1), matrices_equal(f.cmf.generator(i), m), "equal as rational functions");
    }

    let numeric = pfq_cmf::<BigRat>(&PfqSpec::at(2, 1, q(-1))).unwrap();
    let sub = numeric.cmf.sub_cmf(&[vec![2, 2, 1], vec![-2, 1, 2]], &qs(&[0, 0, 0])).unwrap();
    let displayed = builtin("appendixB").unwrap();
    for i in 0..2 {
        c.check(&format!("sub-CMF M{}", i + 1), matrices_equal(sub.generator(i), displayed.cmf.generator(i)), "basis (2,2,1), (−2,1,2)");
    }

    c.check("gauge 2F1 (symbolic z)", gauge_check(&f.cmf, &f.m_theta, "z").unwrap(), "θ-representation consistent");
    let tri = builtin("tricomi").unwrap();
    c.check("gauge Tricomi", gauge_check(&tri.cmf, &tri.aux["M_theta"], "z").unwrap(), "θ-representation consistent");
    c.finish();
}

fn c5_eigen_pipeline() {
    let mut c = Checks::new("C5");
    let b = builtin("zeta3").unwrap();
    let r = pp_report(&b.cmf, &qs(&[1, 1]), &[1, 1]).unwrap();
    let want: QMat = Matrix::from_rows(vec![qs(&[-1, -6]), qs(&[6, 35])]);
    c.check("limit matrix", r.limit.as_ref() == Some(&want), format!("{:?}", r.limit.as_ref().map(|m| m.to_string())));
    c.check("char poly t² − 34t + 1", r.char_poly == qs(&[1, -34, 1]), format!("{:?}", r.char_poly.iter().map(|x| x.to_string()).collect::<Vec<_>>()));
    let s2 = 2f64.sqrt();
    let exact = [(1.0 + s2).powi(4), (s2 - 1.0).powi(4)];
    let rel: Vec<f64> = r.roots.iter().zip(exact).map(|(z, e)| (z.norm() - e).abs() / e + z.im.abs()).collect();
    c.check("roots (1±√2)⁴ to 1e−9", rel.iter().all(|&e| e < 1e-9), format!("{:?}, relative errors {rel:?}", r.roots));
    c.check("pp_ok on (1,1)", r.pp_ok, "distinct moduli");

    let axis = pp_report(&b.cmf, &qs(&[1, 1]), &[1, 0]).unwrap();
    let double = axis.roots.len() == 2 && (axis.roots[0] - axis.roots[1]).norm() < 1e-9;
    c.check("double root on (1,0)", double, format!("{:?}", axis.roots));
    c.check("pp_ok false on (1,0)", !axis.pp_ok, "tied moduli");
    c.finish();
}

fn zeta3_scan() -> (Vec<DirectionReport>, Duration) {
    let b = builtin("zeta3").unwrap();
    let mut cfg = ScanConfig::new(b.cmf, qs(&[1, 1]), RatioVectors::new(qs(&[0, 1]), qs(&[1, 1])));
    cfg.radius = 8.0;
    cfg.n = 300;
    cfg.workers = 8;
    let t0 = Instant::now();
    let reports = scan(&cfg).unwrap();
    (reports, t0.elapsed())
}

fn digits_of_agreement(a: &BigRat, b: &BigRat) -> f64 {
    let d = f64_of(&(a - b)).abs();
    if d == 0.0 {
        f64::INFINITY
    } else {
        -d.log10()
    }
}

fn converging(r: &DirectionReport) -> bool {
    r.classification == Some(Convergence::Converging)
}

fn c6_zeta3_scan() {
    let mut c = Checks::new("C6/zeta3");
    let zeta = zeta3_oracle(60);
    let (reports, elapsed) = zeta3_scan();
    c.check("direction count", reports.len() == 31, format!("{} directions", reports.len()));

    let mut worst = (f64::INFINITY, vec![]);
    let mut rho_bad = Vec::new();
    for r in reports.iter().filter(|r| converging(r)) {
        let d = digits_of_agreement(r.l_hat.as_ref().unwrap(), &zeta);
        if d < worst.0 {
            worst = (d, r.v.clone());
        }
        let lm = &r.log_moduli_norm;
        let predicted = lm[1] - lm[0];
        let rho = r.rho_norm.unwrap();
        let ok = predicted != 0.0 && ((rho - predicted) / predicted).abs() < 0.05;
        if !ok {
            rho_bad.push(format!("{:?}: ρ̂/|v| = {rho:.4}, predicted {predicted:.4}", r.v));
        }
    }
    let n_conv = reports.iter().filter(|r| converging(r)).count();
    c.check("l̂ = ζ(3) to ≥ 10 digits on converging directions", worst.0 >= 10.0, format!("{n_conv} converging; worst {:.1} digits at {:?}", worst.0, worst.1));
    c.check("ρ̂/|v| within 5% of eigen prediction", rho_bad.is_empty(), if rho_bad.is_empty() { "all directions".to_string() } else { rho_bad.join("; ") });
    let best = reports.iter().filter_map(|r| r.delta_hat.map(|d| (d, r.v.clone()))).fold((f64::NEG_INFINITY, vec![]), |a, b| if b.0 > a.0 { b } else { a });
    c.check("some δ̂ > 0", best.0 > 0.0, format!("max δ̂ = {:.4} at {:?}", best.0, best.1));
    c.check("runtime", elapsed < Duration::from_secs(300), format!("{elapsed:.2?}"));
    c.finish();
}

fn c6_modulus_crossing_scan() {
    let mut c = Checks::new("C6/crossing");
    let b = builtin("appendixB").unwrap();
    let mut cfg = ScanConfig::new(b.cmf, vec![frac(1, 3), frac(-1, 3)], RatioVectors::new(qs(&[1, 0]), qs(&[0, 1])));
    cfg.radius = 6.0;
    cfg.orthant = Orthant::All;
    cfg.n = 100;
    cfg.workers = 8;
    let t0 = Instant::now();
    let reports = scan(&cfg).unwrap();
    let elapsed = t0.elapsed();

    let missing: Vec<_> = reports.iter().filter(|r| r.log_moduli_norm.len() != 2).map(|r| r.v.clone()).collect();
    c.check("eigen data on every direction", missing.is_empty(), format!("{} directions, missing {missing:?}", reports.len()));
    let mut mismatched = Vec::new();
    let (mut tied, mut nonconv) = (0, 0);
    for r in &reports {
        let lm = &r.log_moduli_norm;
        let is_tied = lm.len() == 2 && (lm[0] - lm[1]).abs() < 0.02;
        let is_nonconv = r.classification == Some(Convergence::NonConverging);
        tied += is_tied as usize;
        nonconv += is_nonconv as usize;
        if is_tied != is_nonconv {
            mismatched.push(format!("{:?} ({})", r.v, r.classification.map_or("none", |k| k.as_str())));
        }
    }
    let outside: Vec<_> = reports
        .iter()
        .filter(|r| r.classification == Some(Convergence::NonConverging))
        .filter(|r| !(r.log_moduli_norm.len() == 2 && (r.log_moduli_norm[0] - r.log_moduli_norm[1]).abs() < 0.02))
        .map(|r| r.v.clone())
        .collect();
    println!("[C6/crossing] info: {tied} tied directions, {nonconv} non-converging, {} non-converging outside the tied set", outside.len());
    c.check(
        "non-converging exactly where |ln|λ₁| − ln|λ₂||/|v| < 0.02",
        mismatched.is_empty(),
        if mismatched.is_empty() { "sets agree".to_string() } else { format!("tied but not non-converging: {}", mismatched.join(", ")) },
    );
    c.check("runtime", elapsed < Duration::from_secs(300), format!("{elapsed:.2?}"));
    c.finish();
}

fn c6_constant_field_scan() {
    let mut c = Checks::new("C6/const3x3");
    let b = builtin("const3x3").unwrap();
    let pairs = [(qs(&[1, 0, 0]), qs(&[0, 1, 0])), (qs(&[-1, -1, 2]), qs(&[3, -1, 0]))];
    let mut elapsed = Duration::ZERO;
    for (k, (p, qv)) in pairs.into_iter().enumerate() {
        let mut cfg = ScanConfig::new(b.cmf.clone(), qs(&[0, 0]), RatioVectors::new(p, qv));
        cfg.radius = 6.0;
        cfg.orthant = Orthant::All;
        cfg.n = 200;
        cfg.workers = 8;
        let t0 = Instant::now();
        let reports = scan(&cfg).unwrap();
        elapsed = elapsed.max(t0.elapsed());
        let mut worst = 0.0f64;
        for r in &reports {
            let (a, bb) = (r.v[0] as f64, r.v[1] as f64);
            let mut want = [a * 5f64.ln() + bb * (5.0f64 / 3.0).ln(), a * 3f64.ln() - bb * 3f64.ln(), bb * 4f64.ln()];
            want.sort_by(|x, y| y.total_cmp(x));
            let mut got: Vec<f64> = r.log_moduli_norm.iter().map(|l| l * r.norm).collect();
            got.sort_by(|x, y| y.total_cmp(x));
            let err = if got.len() == 3 { got.iter().zip(want).map(|(g, w)| (g - w).abs()).fold(0.0, f64::max) } else { f64::INFINITY };
            worst = worst.max(err);
        }
        c.check(&format!("log moduli, vector pair {}", k + 1), worst < 1e-6, format!("{} directions, max error {worst:.2e}", reports.len()));
    }
    c.check("runtime", elapsed < Duration::from_secs(300), format!("{elapsed:.2?}"));
    c.finish();
}

fn c7_property_suites() {
    let mut c = Checks::new("C7");
    let b = builtin("zeta3").unwrap();
    let cmf = &b.cmf;

    // path independence and product law on a deterministic sample
    let points = [qs(&[1, 1]), vec![frac(1, 2), frac(7, 3)], vec![frac(5, 4), frac(2, 5)], qs(&[3, 2])];
    let dirs: [[i64; 2]; 5] = [[1, 0], [0, 1], [2, 1], [1, 3], [-1, 2]];
    let mut path_ok = true;
    let mut count = 0;
    for x in &points {
        for v in &dirs {
            for w in &dirs {
                let vw = [v[0] + w[0], v[1] + w[1]];
                let xv: Vec<BigRat> = x.iter().zip(v).map(|(a, &s)| a + q(s)).collect();
                if let (Ok(a), Ok(b1), Ok(b2)) = (cmf.eval(&vw, x), cmf.eval(v, x), cmf.eval(w, &xv)) {
                    path_ok &= a.matrix == &b1.matrix * &b2.matrix;
                    count += 1;
                }
            }
        }
    }
    c.check("path independence M_{v+w}(x) = M_v(x) M_w(x+v)", path_ok, format!("{count} cases"));

    let vecs = RatioVectors::new(qs(&[0, 1]), qs(&[1, 1]));
    let mut product_ok = true;
    for v in [[1, 1], [2, 1], [1, 2]] {
        let seq = walk(cmf, &qs(&[1, 1]), &v, &vecs, 6).unwrap();
        let e = cmf.eval(&[6 * v[0], 6 * v[1]], &qs(&[1, 1])).unwrap();
        product_ok &= seq.last_product == e.matrix;
    }
    c.check("product law M_{nv}(x) = Π T(k)", product_ok, "n = 6, three directions");

    let mut homog_ok = true;
    for (v, k) in [([1, 1], 2), ([2, 1], 3), ([1, 2], 2)] {
        let base = walk(cmf, &qs(&[1, 1]), &v, &vecs, 8 * k).unwrap();
        let kv = [v[0] * k as i64, v[1] * k as i64];
        let scaled = walk(cmf, &qs(&[1, 1]), &kv, &vecs, 8).unwrap();
        homog_ok &= (0..=8).all(|n| base.get(k * n) == scaled.get(n));
    }
    c.check("homogeneity L_{x,kv}(n) = L_{x,v}(kn)", homog_ok, "k = 2, 3; n ≤ 8");

    // coboundary ratio law: M_zeta(nv)(x) = A(x) M_ex(nv)(x) A(x+nv)⁻¹
    let ex = builtin("ex312_coboundary").unwrap();
    let a = &ex.aux["A"];
    let x = qs(&[1, 1]);
    let mut cob_ok = true;
    let mut wz = Walker::new(cmf, &x, &[1, 1], &vecs).unwrap();
    let mut we = Walker::new(&ex.cmf, &x, &[1, 1], &vecs).unwrap();
    let ax = eval_matrix(a, &x).unwrap();
    for n in 0..12i64 {
        let axn = eval_matrix(a, &[q(1 + n), q(1 + n)]).unwrap().inverse().unwrap();
        let lhs = wz.product();
        let rhs = &(&ax * &we.product()) * &axn;
        let bil = |m: &QMat, l: &[BigRat], r: &[BigRat]| m.bilinear(l, r);
        let ratio = bil(&rhs, &vecs.p, &vecs.p_prime) / bil(&rhs, &vecs.q, &vecs.q_prime);
        cob_ok &= lhs == rhs && wz.current().value() == Some(&ratio);
        wz.advance().unwrap();
        we.advance().unwrap();
    }
    c.check("coboundary ratio law per n", cob_ok, "n < 12");

    let gen = cmf.generator(0);
    let cp = gen.char_poly();
    let ch = gen.eval_poly(&cp);
    c.check("Cayley–Hamilton (symbolic generator)", ch.entries().iter().all(|e| e.is_zero()), "p(M₁) = 0");
    let c3 = builtin("const3x3").unwrap();
    let m: QMat = eval_matrix(c3.cmf.generator(1), &qs(&[0, 0])).unwrap();
    c.check("Cayley–Hamilton (numeric 3×3)", m.eval_poly(&m.char_poly()).is_zero(), "p(M₂) = 0");

    c.check("97 directions (radius 14, ℕ²)", enumerate_directions(2, 14.0, Orthant::Positive).len() == 97, "counted");
    c.check("264 directions (radius 12, ℤ²)", enumerate_directions(2, 12.0, Orthant::All).len() == 264, "counted");

    let dual = cmf.dual().unwrap();
    let back = dual.dual().unwrap();
    let invol = (0..2).all(|i| matrices_equal(back.generator(i), cmf.generator(i)));
    c.check("dual involution", invol, "dual(dual(M)) = M");
    c.check("dual cocycle", dual.check_generators().is_ok(), "dual generators commute in the cocycle sense");
    c.finish();
}

fn c8_continuity_probes() {
    let mut c = Checks::new("C8");
    let (reports, _) = zeta3_scan();
    let conv: Vec<&DirectionReport> = reports.iter().filter(|r| converging(r)).collect();
    let mut l_bad = Vec::new();
    let (mut d_max, mut r_max, mut e_max) = ((0.0f64, vec![]), (0.0f64, vec![]), (0.0f64, vec![]));
    for w in conv.windows(2) {
        let (a, b) = (w[0], w[1]);
        let digits = digits_of_agreement(a.l_hat.as_ref().unwrap(), b.l_hat.as_ref().unwrap());
        if digits < 10.0 {
            l_bad.push(format!("{:?}–{:?} ({digits:.1} digits)", a.v, b.v));
        }
        let pair = vec![a.v.clone(), b.v.clone()];
        let dd = (a.delta_hat.unwrap() - b.delta_hat.unwrap()).abs();
        let dr = (a.rho_norm.unwrap() - b.rho_norm.unwrap()).abs();
        let de = a.log_moduli_norm.iter().zip(&b.log_moduli_norm).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
        if dd > d_max.0 {
            d_max = (dd, pair.clone());
        }
        if dr > r_max.0 {
            r_max = (dr, pair.clone());
        }
        if de > e_max.0 {
            e_max = (de, pair);
        }
    }
    c.check("adjacent converging l̂ agree to 10 digits", l_bad.is_empty(), if l_bad.is_empty() { format!("{} directions", conv.len()) } else { l_bad.join(", ") });
    c.check("δ̂ varies < 0.1 between neighbours", d_max.0 < 0.1, format!("max step {:.3} at {:?}", d_max.0, d_max.1));
    c.check("ρ̂/|v| varies < 0.1 between neighbours", r_max.0 < 0.1, format!("max step {:.3} at {:?}", r_max.0, r_max.1));
    c.check("eigen curves vary < 0.1 between neighbours", e_max.0 < 0.1, format!("max step {:.3} at {:?}", e_max.0, e_max.1));
    let pp_pred: Vec<f64> = conv.iter().filter_map(|r| {
        let eig = pp_report(&builtin("zeta3").unwrap().cmf, &qs(&[1, 1]), &r.v).ok()?;
        rho_predicted(&eig).ok().map(|p| p.default)
    }).collect();
    println!("[C8] info: {} of {} converging directions satisfy Poincaré–Perron", pp_pred.len(), conv.len());
    c.finish();
}

fn main() {
    let criteria: [(&str, fn()); 10] = [
        ("c1_apery_zeta3", c1_apery_zeta3),
        ("c2_apery_initial_conditions", c2_apery_initial_conditions),
        ("c3_log2", c3_log2),
        ("c4_symbolic_goldens", c4_symbolic_goldens),
        ("c5_eigen_pipeline", c5_eigen_pipeline),
        ("c6_zeta3_scan", c6_zeta3_scan),
        ("c6_modulus_crossing_scan", c6_modulus_crossing_scan),
        ("c6_constant_field_scan", c6_constant_field_scan),
        ("c7_property_suites", c7_property_suites),
        ("c8_continuity_probes", c8_continuity_probes),
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    // keep panic messages out of the report; the check lines say what failed
    std::panic::set_hook(Box::new(|_| {}));
    let mut failed = Vec::new();
    for (name, run) in criteria {
        if !filter.is_empty() && !filter.iter().any(|f| name.contains(f.as_str())) {
            continue;
        }
        let t0 = Instant::now();
        let ok = std::panic::catch_unwind(run).is_ok();
        println!("{} {name} ({:.1?})\n", if ok { "ok  " } else { "FAIL" }, t0.elapsed());
        if !ok {
            failed.push(name);
        }
    }
    if failed.is_empty() {
        println!("acceptance: all criteria passed");
    } else {
        println!("acceptance: {} failed: {}", failed.len(), failed.join(", "));
        std::process::exit(1);
    }
}
