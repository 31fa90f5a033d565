//! Asymptotics of trajectories: limit matrices, eigenvalues, the
//! Poincaré–Perron condition, predicted convergence rates and the
//! (N/2, N, 2N) estimators.

use num_complex::Complex64;
use num_traits::{ToPrimitive, Zero};
use serde::Serialize;

use crate::cmf_core::{clear_denominators, TrajectoryMatrix};
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::poly::dense;
use crate::ratfunc::Limit;
use crate::trajectory::{probe, RatioSeq, RatioValue, RatioVectors};
use crate::{BigRat, ExactCmf, QMat};

/// Relative modulus gap below which two eigenvalues count as tied.
pub const PP_GAP: f64 = 1e-9;

/// Entrywise n → ∞ limit of a trajectory matrix.
pub fn limit_matrix(t: &TrajectoryMatrix<BigRat>) -> Result<QMat> {
    t.matrix.try_map_indexed(|i, j, f| match f.limit_inf(0) {
        Limit::Finite(c) => Ok(c),
        Limit::Infinite => Err(Error::DivergentEntry { row: i + 1, col: j + 1 }),
    })
}

/// Monic characteristic polynomial, coefficients from t^r down to t^0.
pub fn char_poly(m: &QMat) -> Vec<BigRat> {
    m.char_poly()
}

fn to_f64(c: &BigRat) -> f64 {
    c.to_f64().unwrap_or(f64::NAN)
}

fn horner_c(coeffs: &[f64], z: Complex64) -> (Complex64, Complex64) {
    // value and derivative, coefficients descending
    let mut p = Complex64::zero();
    let mut dp = Complex64::zero();
    for &c in coeffs {
        dp = dp * z + p;
        p = p * z + c;
    }
    (p, dp)
}

/// Roots of a squarefree polynomial (descending float coefficients) by
/// Aberth iteration followed by Newton polishing.
fn aberth(coeffs: &[f64], tol: f64) -> Result<Vec<Complex64>> {
    let deg = coeffs.len() - 1;
    let lead = coeffs[0];
    let c: Vec<f64> = coeffs.iter().map(|x| x / lead).collect();
    if deg == 1 {
        return Ok(vec![Complex64::new(-c[1], 0.0)]);
    }
    let bound = 1.0 + c[1..].iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let mut z: Vec<Complex64> = (0..deg)
        .map(|k| Complex64::from_polar(0.5 * bound, 2.0 * std::f64::consts::PI * (k as f64 + 0.25) / deg as f64 + 0.4))
        .collect();
    let mut converged = false;
    for _ in 0..2000 {
        let mut max_step = 0.0f64;
        for i in 0..deg {
            let (p, dp) = horner_c(&c, z[i]);
            if p.norm() == 0.0 {
                continue;
            }
            let ratio = p / dp;
            let s: Complex64 = (0..deg).filter(|&j| j != i).map(|j| (z[i] - z[j]).inv()).sum();
            let w = ratio / (Complex64::new(1.0, 0.0) - ratio * s);
            z[i] -= w;
            max_step = max_step.max(w.norm() / z[i].norm().max(1e-300));
        }
        if max_step < 1e-15 {
            converged = true;
            break;
        }
    }
    for r in z.iter_mut() {
        for _ in 0..3 {
            let (p, dp) = horner_c(&c, *r);
            if dp.norm() > 0.0 {
                *r -= p / dp;
            }
        }
    }
    let norm = c.iter().map(|x| x.abs()).sum::<f64>();
    let ok = z.iter().all(|&r| {
        let (p, _) = horner_c(&c, r);
        p.norm() <= tol * norm * r.norm().max(1.0).powi(deg as i32)
    });
    if !converged && !ok {
        return Err(Error::RootsNotConverged { best: z.iter().map(|r| (r.re, r.im)).collect() });
    }
    Ok(z)
}

/// Squarefree factors (Yun), each paired with its multiplicity.
fn squarefree(ascending: &[BigRat]) -> Vec<(Vec<BigRat>, usize)> {
    let deriv: Vec<BigRat> = ascending.iter().enumerate().skip(1).map(|(k, c)| c * BigRat::from_integer(k.into())).collect();
    let mut a = ascending.to_vec();
    dense::trim(&mut a);
    let g = dense::gcd(&a, &deriv);
    if g.len() <= 1 {
        return vec![(a, 1)];
    }
    let mut out = Vec::new();
    let mut b = dense::quo(&a, &g);
    let mut c = dense::quo(&deriv, &g);
    let mut i = 1;
    loop {
        let db: Vec<BigRat> = b.iter().enumerate().skip(1).map(|(k, x)| x * BigRat::from_integer(k.into())).collect();
        let mut d: Vec<BigRat> = c.iter().zip(db.iter().chain(std::iter::repeat(&BigRat::zero()))).map(|(x, y)| x - y).collect();
        if db.len() > c.len() {
            d.extend(db[c.len()..].iter().map(|y| -y));
        }
        dense::trim(&mut d);
        let f = dense::gcd(&b, &d);
        if f.len() > 1 {
            out.push((f.clone(), i));
        }
        if b.len() <= 1 || f.is_empty() {
            break;
        }
        b = dense::quo(&b, &f);
        if b.len() <= 1 {
            break;
        }
        c = dense::quo(&d, &f);
        i += 1;
    }
    out
}

/// All complex roots (with multiplicity) of a polynomial with exact
/// coefficients given from the highest power down.
pub fn poly_roots(coeffs: &[BigRat], tol: f64) -> Result<Vec<Complex64>> {
    let mut asc: Vec<BigRat> = coeffs.iter().rev().cloned().collect();
    dense::trim(&mut asc);
    if asc.len() < 2 {
        return Err(Error::ConstantPolynomial);
    }
    let mut roots = Vec::new();
    for (factor, mult) in squarefree(&asc) {
        let desc: Vec<f64> = factor.iter().rev().map(to_f64).collect();
        let rs = aberth(&desc, tol)?;
        for mut r in rs {
            // real coefficients: a residue this small is rounding, not a pair
            if r.im.abs() <= 1e-14 * r.norm() {
                r.im = 0.0;
            }
            roots.extend(std::iter::repeat_n(r, mult));
        }
    }
    sort_roots(&mut roots);
    Ok(roots)
}

/// Descending modulus, then descending real part, then imaginary part.
fn sort_roots(roots: &mut [Complex64]) {
    roots.sort_by(|a, b| {
        b.norm()
            .total_cmp(&a.norm())
            .then(b.re.total_cmp(&a.re))
            .then(a.im.total_cmp(&b.im))
    });
}

#[derive(Clone, Debug, PartialEq)]
pub struct EigenReport {
    /// Entrywise limit of T(n); None when some entry diverges and the
    /// eigenvalues come from the limit of the characteristic polynomial.
    pub limit: Option<QMat>,
    pub char_poly: Vec<BigRat>,
    /// k when the characteristic polynomial of T(n)/n^k was used.
    pub scale_exponent: u32,
    pub roots: Vec<Complex64>,
    pub pp_ok: bool,
    pub log_moduli: Vec<f64>,
}

fn report_from_poly(limit: Option<QMat>, cp: Vec<BigRat>, scale_exponent: u32) -> Result<EigenReport> {
    let roots = poly_roots(&cp, 1e-9)?;
    let moduli: Vec<f64> = roots.iter().map(|r| r.norm()).collect();
    let pp_ok = moduli.windows(2).all(|w| w[0] > 0.0 && (w[0] - w[1]) / w[0] > PP_GAP);
    let log_moduli = moduli.iter().map(|m| m.ln()).collect();
    Ok(EigenReport { limit, char_poly: cp, scale_exponent, roots, pp_ok, log_moduli })
}

/// Eigen data of a numeric limit matrix.
pub fn eigen_report(limit: QMat) -> Result<EigenReport> {
    let cp = char_poly(&limit);
    report_from_poly(Some(limit), cp, 0)
}

/// Limit of the characteristic polynomial of T(n)/n^k for the least k ≥ 0
/// making every coefficient finite.
pub fn limit_char_poly(t: &TrajectoryMatrix<BigRat>) -> Result<(Vec<BigRat>, u32)> {
    // T = P/q, so the coefficient of t^{r−i} is c_i(P)/q^i.
    let (p, q) = clear_denominators(&t.matrix);
    if p.entries().iter().chain([&q]).any(|e| e.variables().iter().any(|&v| v > 0)) {
        return Err(Error::InvalidConfig("trajectory still depends on parameters".into()));
    }
    let cp = p.char_poly();
    let dq = q.degree_in(0) as i64;
    let lq = q.to_dense(0).pop().expect("nonzero denominator");
    let mut k = 0i64;
    for (i, c) in cp.iter().enumerate().skip(1) {
        if !c.is_zero() {
            let excess = c.degree_in(0) as i64 - i as i64 * dq;
            k = k.max(num_integer::Integer::div_ceil(&excess, &(i as i64)));
        }
    }
    let out = cp
        .iter()
        .enumerate()
        .map(|(i, c)| {
            let excess = c.degree_in(0) as i64 - i as i64 * dq;
            if c.is_zero() || excess < k * i as i64 {
                BigRat::zero()
            } else {
                let lc = c.to_dense(0).pop().expect("nonzero");
                lc / num_traits::pow(lq.clone(), i)
            }
        })
        .collect();
    Ok((out, k as u32))
}

/// Eigen data of a trajectory: from the entrywise limit of T(n) when it
/// exists, otherwise from the limiting characteristic polynomial.
pub fn trajectory_eigen(t: &TrajectoryMatrix<BigRat>) -> Result<EigenReport> {
    match limit_matrix(t) {
        Ok(l) => eigen_report(l),
        Err(Error::DivergentEntry { .. }) => {
            let (cp, k) = limit_char_poly(t)?;
            report_from_poly(None, cp, k)
        }
        Err(e) => Err(e),
    }
}

/// Eigen report for the trajectory from x along v.
pub fn pp_report(cmf: &ExactCmf, x: &[BigRat], v: &[i64]) -> Result<EigenReport> {
    trajectory_eigen(&cmf.trajectory(x, v)?)
}

/// ln|λ_k| − ln|λ_j| for j < k (1-based, roots sorted by modulus).
#[derive(Clone, Debug, PartialEq)]
pub struct RhoPrediction {
    /// The (j, k) = (1, 2) value.
    pub default: f64,
    pub pairs: Vec<(usize, usize, f64)>,
}

impl RhoPrediction {
    /// The pair value closest to an observed rate.
    pub fn best_match(&self, rho: f64) -> (usize, usize, f64) {
        *self
            .pairs
            .iter()
            .min_by(|a, b| (a.2 - rho).abs().total_cmp(&(b.2 - rho).abs()))
            .expect("at least one pair")
    }
}

pub fn rho_predicted(report: &EigenReport) -> Result<RhoPrediction> {
    let r = report.log_moduli.len();
    if r < 2 {
        return Err(Error::NoSecondEigenvalue(r));
    }
    if !report.pp_ok {
        return Err(Error::NotPoincarePerron);
    }
    let lm = &report.log_moduli;
    let mut pairs = Vec::new();
    for j in 0..r {
        for k in j + 1..r {
            pairs.push((j + 1, k + 1, lm[k] - lm[j]));
        }
    }
    Ok(RhoPrediction { default: lm[1] - lm[0], pairs })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Convergence {
    Converging,
    NonConverging,
    Undetermined,
}

impl Convergence {
    pub fn as_str(self) -> &'static str {
        match self {
            Convergence::Converging => "converging",
            Convergence::NonConverging => "non-converging",
            Convergence::Undetermined => "undetermined",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Estimates {
    pub n: usize,
    pub l_hat: BigRat,
    /// ln|L(N) − L(2N)| / N; None when the two are equal.
    pub rho: Option<f64>,
    pub delta: Option<f64>,
    pub eta: f64,
    /// L(N) = L(2N) exactly.
    pub exact_equality: bool,
    pub converged: Convergence,
}

/// Estimators from the values at N/2, N and 2N.
pub fn estimate_values(n: usize, half: &RatioValue, at_n: &RatioValue, at_2n: &RatioValue) -> Result<Estimates> {
    for (idx, v) in [(n / 2, half), (n, at_n), (2 * n, at_2n)] {
        if !v.is_defined() {
            return Err(Error::UndefinedRatio(idx));
        }
    }
    let l_hat = at_n.value().expect("defined").clone();
    let log_h = at_n.log_height().expect("defined");
    let nf = n as f64;
    let eta = log_h / nf;
    let diff = at_n.log_abs_diff(at_2n);
    let prev = half.log_abs_diff(at_n);
    let rho = diff.map(|d| d / nf);
    let delta = diff.filter(|_| log_h > 0.0).map(|d| -1.0 - d / log_h);
    let converged = match (diff, rho) {
        // Eventually constant: L(N) = L(2N).
        (None, _) => Convergence::Converging,
        (Some(d), Some(r)) => {
            let contracting = prev.is_some_and(|p| d < p);
            if !contracting || r > -1e-3 {
                Convergence::NonConverging
            } else if r < -1e-2 {
                Convergence::Converging
            } else {
                Convergence::Undetermined
            }
        }
        (Some(_), None) => unreachable!(),
    };
    Ok(Estimates { n, l_hat, rho, delta, eta, exact_equality: diff.is_none(), converged })
}

/// Estimates from a finished walk of length ≥ 2N.
pub fn estimate_seq(seq: &RatioSeq, n: usize) -> Result<Estimates> {
    if seq.len() <= 2 * n {
        return Err(Error::InvalidConfig(format!("walk has {} values, need index {}", seq.len(), 2 * n)));
    }
    estimate_values(n, &seq.values[n / 2], &seq.values[n], &seq.values[2 * n])
}

/// Walks to 2N and applies the estimators.
pub fn estimate(cmf: &ExactCmf, x: &[BigRat], v: &[i64], vectors: &RatioVectors, n: usize) -> Result<Estimates> {
    if n == 0 || !n.is_multiple_of(2) {
        return Err(Error::InvalidConfig(format!("N = {n} must be positive and even")));
    }
    let (vals, _) = probe(cmf, x, v, vectors, &[n / 2, n, 2 * n])?;
    estimate_values(n, &vals[0], &vals[1], &vals[2])
}

#[derive(Serialize)]
struct EigenDoc {
    #[serde(skip_serializing_if = "Option::is_none")]
    limit: Option<Vec<Vec<String>>>,
    scale_exponent: u32,
    char_poly: Vec<String>,
    roots: Vec<[f64; 2]>,
    log_moduli: Vec<f64>,
    pp_ok: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    rho_predicted: Option<f64>,
}

#[derive(Serialize)]
struct EstimatesDoc {
    n: usize,
    l_hat: String,
    l_hat_decimal: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    rho: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    delta: Option<f64>,
    eta: f64,
    exact_equality: bool,
    converged: Convergence,
}

#[derive(Serialize, Default)]
struct ReportDoc {
    #[serde(skip_serializing_if = "Option::is_none")]
    estimates: Option<EstimatesDoc>,
    #[serde(skip_serializing_if = "Option::is_none")]
    eigen: Option<EigenDoc>,
}

fn matrix_strings(m: &Matrix<BigRat>) -> Vec<Vec<String>> {
    m.to_rows().iter().map(|r| r.iter().map(|c| c.to_string()).collect()).collect()
}

/// TOML rendering of estimates and/or an eigen report.
pub fn report_toml(est: Option<&Estimates>, eig: Option<&EigenReport>, digits: usize) -> Result<String> {
    let doc = ReportDoc {
        estimates: est.map(|e| EstimatesDoc {
            n: e.n,
            l_hat: e.l_hat.to_string(),
            l_hat_decimal: crate::rat::to_decimal(&e.l_hat, digits),
            rho: e.rho,
            delta: e.delta,
            eta: e.eta,
            exact_equality: e.exact_equality,
            converged: e.converged,
        }),
        eigen: eig.map(|r| EigenDoc {
            limit: r.limit.as_ref().map(matrix_strings),
            char_poly: r.char_poly.iter().map(|c| c.to_string()).collect(),
            scale_exponent: r.scale_exponent,
            roots: r.roots.iter().map(|z| [z.re, z.im]).collect(),
            log_moduli: r.log_moduli.clone(),
            pp_ok: r.pp_ok,
            rho_predicted: rho_predicted(r).ok().map(|p| p.default),
        }),
    };
    Ok(toml::to_string(&doc)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructors::builtin;
    use num_bigint::BigInt;
    use num_traits::One;

    fn q(n: i64) -> BigRat {
        BigRat::from_integer(n.into())
    }

    fn qm(rows: &[&[i64]]) -> QMat {
        Matrix::from_rows(rows.iter().map(|r| r.iter().map(|&x| q(x)).collect()).collect())
    }

    #[test]
    fn apery_limit_and_roots() {
        let b = builtin("zeta3").unwrap();
        let r = pp_report(&b.cmf, &[q(1), q(1)], &[1, 1]).unwrap();
        assert_eq!(r.limit, Some(qm(&[&[-1, -6], &[6, 35]])));
        assert_eq!(r.char_poly, vec![q(1), q(-34), q(1)]);
        let s = 2f64.sqrt();
        let (l1, l2) = ((1.0 + s).powi(4), (s - 1.0).powi(4));
        assert!((r.roots[0].re - l1).abs() / l1 < 1e-12);
        assert!((r.roots[1].re - l2).abs() / l2 < 1e-12);
        assert!(r.pp_ok);
        let rho = rho_predicted(&r).unwrap().default;
        assert!((rho + 8.0 * (1.0 + s).ln()).abs() < 1e-9);
    }

    #[test]
    fn double_root_is_not_pp() {
        let b = builtin("zeta3").unwrap();
        let r = pp_report(&b.cmf, &[q(1), q(1)], &[1, 0]).unwrap();
        assert_eq!(r.limit, Some(qm(&[&[0, -1], &[1, 2]])));
        assert!(!r.pp_ok);
        assert!(r.roots.iter().all(|z| (z - Complex64::new(1.0, 0.0)).norm() < 1e-12));
        assert!(matches!(rho_predicted(&r), Err(Error::NotPoincarePerron)));
    }

    #[test]
    fn cubic_roots_and_scaling() {
        let cp = vec![q(1), q(-9), q(23), q(-15)];
        let r = poly_roots(&cp, 1e-9).unwrap();
        for (z, want) in r.iter().zip([5.0, 3.0, 1.0]) {
            assert!((z.re - want).abs() < 1e-12 && z.im.abs() < 1e-12);
        }
        let scaled: Vec<BigRat> = cp.iter().map(|c| c * BigRat::new(BigInt::from(-7), BigInt::from(3))).collect();
        let r2 = poly_roots(&scaled, 1e-9).unwrap();
        for (a, b) in r.iter().zip(&r2) {
            assert!((a - b).norm() < 1e-12);
        }
        // (t − 2)^3 (t + 1)^2
        let cp = vec![q(1), q(-4), q(1), q(10), q(-4), q(-8)];
        let r = poly_roots(&cp, 1e-9).unwrap();
        assert_eq!(r.len(), 5);
        assert!(r[..3].iter().all(|z| (z.re - 2.0).abs() < 1e-12));
        assert!(r[3..].iter().all(|z| (z.re + 1.0).abs() < 1e-12));
        assert!(matches!(poly_roots(&[q(3)], 1e-9), Err(Error::ConstantPolynomial)));
    }

    #[test]
    fn complex_pair_ties() {
        // t^2 + 1: conjugate pair of equal modulus.
        let r = eigen_report(qm(&[&[0, -1], &[1, 0]])).unwrap();
        assert!(!r.pp_ok);
        assert!(r.roots[0].im < r.roots[1].im);
        let tr: f64 = r.roots.iter().map(|z| z.re).sum();
        assert!(tr.abs() < 1e-12);
    }

    #[test]
    fn rank_one_has_no_prediction() {
        let r = eigen_report(qm(&[&[4]])).unwrap();
        assert!(matches!(rho_predicted(&r), Err(Error::NoSecondEigenvalue(1))));
    }

    #[test]
    fn geometric_estimator() {
        let n = 40usize;
        let val = |k: usize| {
            let d = BigInt::one() << k;
            RatioValue::from_parts(&d + BigInt::one(), d)
        };
        let e = estimate_values(n, &val(n / 2), &val(n), &val(2 * n)).unwrap();
        assert!((e.rho.unwrap() + std::f64::consts::LN_2).abs() < 1e-6);
        assert_eq!(e.converged, Convergence::Converging);
        let c = RatioValue::from_parts(BigInt::from(3), BigInt::from(5));
        let e = estimate_values(n, &c, &c, &c).unwrap();
        assert!(e.exact_equality && e.delta.is_none());
        let undefined = RatioValue::from_parts(BigInt::one(), BigInt::zero());
        assert!(matches!(estimate_values(n, &c, &undefined, &c), Err(Error::UndefinedRatio(40))));
    }

    #[test]
    fn report_renders() {
        let r = eigen_report(qm(&[&[2, 0], &[0, 1]])).unwrap();
        let text = report_toml(None, Some(&r), 10).unwrap();
        assert!(text.contains("pp_ok = true"), "{text}");
        assert!(text.contains("char_poly = [\"1\", \"-3\", \"2\"]"), "{text}");
    }
}
