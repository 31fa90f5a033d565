//! Exact walks along x + n v: ratio sequences and their metric sequences.
//!
//! The step matrix T(n) is cleared once into an integer polynomial matrix
//! P(n) and a scalar D(n) with T(n) = P(n)/D(n). The walk accumulates
//! ΠP(k) in integers; D cancels in every ratio, so no gcd is taken until a
//! value is actually reduced.

use std::io::Write;
use std::sync::OnceLock;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::cmf_core::TrajectoryMatrix;
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::poly::dense;
use crate::rat::{bigint_log_abs, decimal_digits, to_decimal};
use crate::{BigRat, ExactCmf};

pub use crate::rat::height;

/// The four vectors of a CMF ratio pᵀ·M·p′ / qᵀ·M·q′.
#[derive(Clone, Debug, PartialEq)]
pub struct RatioVectors {
    pub p: Vec<BigRat>,
    pub p_prime: Vec<BigRat>,
    pub q: Vec<BigRat>,
    pub q_prime: Vec<BigRat>,
}

impl RatioVectors {
    /// p′ = q′ = e_r.
    pub fn new(p: Vec<BigRat>, q: Vec<BigRat>) -> Self {
        let mut e = vec![BigRat::zero(); p.len()];
        if let Some(last) = e.last_mut() {
            *last = BigRat::one();
        }
        RatioVectors { p, p_prime: e.clone(), q, q_prime: e }
    }

    pub fn full(p: Vec<BigRat>, p_prime: Vec<BigRat>, q: Vec<BigRat>, q_prime: Vec<BigRat>) -> Self {
        RatioVectors { p, p_prime, q, q_prime }
    }

    fn check(&self, rank: usize) -> Result<()> {
        for (name, v) in [("p", &self.p), ("p'", &self.p_prime), ("q", &self.q), ("q'", &self.q_prime)] {
            if v.len() != rank {
                return Err(Error::DimensionMismatch(format!("{name} has {} entries, rank is {rank}", v.len())));
            }
        }
        Ok(())
    }
}

/// One term of a ratio sequence, stored unreduced.
#[derive(Debug)]
pub struct RatioValue {
    num: BigInt,
    den: BigInt,
    reduced: OnceLock<Option<BigRat>>,
}

impl Clone for RatioValue {
    fn clone(&self) -> Self {
        let reduced = OnceLock::new();
        if let Some(r) = self.reduced.get() {
            let _ = reduced.set(r.clone());
        }
        RatioValue { num: self.num.clone(), den: self.den.clone(), reduced }
    }
}

impl RatioValue {
    pub fn from_parts(num: BigInt, den: BigInt) -> Self {
        RatioValue { num, den, reduced: OnceLock::new() }
    }

    /// False when the denominator vanishes.
    pub fn is_defined(&self) -> bool {
        !self.den.is_zero()
    }

    /// The unreduced numerator and denominator.
    pub fn raw(&self) -> (&BigInt, &BigInt) {
        (&self.num, &self.den)
    }

    /// The value in lowest terms; reduced on first use.
    pub fn value(&self) -> Option<&BigRat> {
        self.reduced
            .get_or_init(|| self.is_defined().then(|| BigRat::new(self.num.clone(), self.den.clone())))
            .as_ref()
    }

    /// ln |self − other| from the unreduced cross product. None if either
    /// side is undefined or the two are equal.
    pub fn log_abs_diff(&self, other: &RatioValue) -> Option<f64> {
        if !self.is_defined() || !other.is_defined() {
            return None;
        }
        let top = &self.num * &other.den - &other.num * &self.den;
        if top.is_zero() {
            return None;
        }
        let l = bigint_log_abs(&top).ok()? - bigint_log_abs(&self.den).ok()? - bigint_log_abs(&other.den).ok()?;
        Some(l)
    }

    /// ln |self − l| for an exact reference l.
    pub fn log_abs_diff_rat(&self, l: &BigRat) -> Option<f64> {
        self.log_abs_diff(&RatioValue::from_parts(l.numer().clone(), l.denom().clone()))
    }

    /// ln H of the reduced value.
    pub fn log_height(&self) -> Option<f64> {
        self.value().map(|v| bigint_log_abs(&height(v)).expect("height is positive"))
    }

    pub fn to_f64(&self) -> Option<f64> {
        use num_traits::ToPrimitive;
        if !self.is_defined() {
            return None;
        }
        if self.num.is_zero() {
            return Some(0.0);
        }
        let l = bigint_log_abs(&self.num).ok()? - bigint_log_abs(&self.den).ok()?;
        let sign = if self.num.is_negative() != self.den.is_negative() { -1.0 } else { 1.0 };
        // Small values convert directly to keep full precision.
        if self.num.bits() < 1000 && self.den.bits() < 1000 {
            return BigRat::new(self.num.clone(), self.den.clone()).to_f64();
        }
        Some(sign * l.exp())
    }
}

/// T(n) = P(n)/D(n) with integer polynomial entries (ascending powers).
#[derive(Clone, Debug)]
struct StepPlan {
    p: Vec<Vec<BigInt>>,
    d: Vec<BigInt>,
    rank: usize,
}

fn horner(c: &[BigInt], n: &BigInt) -> BigInt {
    c.iter().rev().fold(BigInt::zero(), |acc, a| acc * n + a)
}

fn lcm_dense(a: &[BigRat], b: &[BigRat]) -> Vec<BigRat> {
    let g = dense::gcd(a, b);
    let prod = mul_dense(a, b);
    dense::quo(&prod, &g)
}

fn mul_dense(a: &[BigRat], b: &[BigRat]) -> Vec<BigRat> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![BigRat::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

impl StepPlan {
    fn new(t: &TrajectoryMatrix<BigRat>) -> Result<Self> {
        let m = &t.matrix;
        let rank = m.rows();
        for f in m.entries() {
            if f.num().variables().iter().chain(f.den().variables().iter()).any(|&v| v != 0) {
                return Err(Error::InvalidConfig("walks need numeric parameters; substitute them first".into()));
            }
        }
        let mut d = vec![BigRat::one()];
        for f in m.entries() {
            d = lcm_dense(&d, &f.den().to_dense(0));
        }
        let entries: Vec<Vec<BigRat>> = m
            .entries()
            .iter()
            .map(|f| mul_dense(&f.num().to_dense(0), &dense::quo(&d, &f.den().to_dense(0))))
            .collect();
        let mut scale = BigInt::one();
        for c in entries.iter().flatten().chain(&d) {
            scale = scale.lcm(c.denom());
        }
        let to_int = |v: &[BigRat]| -> Vec<BigInt> {
            let mut out: Vec<BigInt> = v.iter().map(|c| (c * BigRat::from(scale.clone())).to_integer()).collect();
            while out.last().is_some_and(Zero::is_zero) {
                out.pop();
            }
            out
        };
        Ok(StepPlan { p: entries.iter().map(|e| to_int(e)).collect(), d: to_int(&d), rank })
    }

    /// P(k), D(k); None when D(k) = 0.
    fn at(&self, k: i64) -> Option<(Matrix<BigInt>, BigInt)> {
        let n = BigInt::from(k);
        let d = horner(&self.d, &n);
        if d.is_zero() {
            return None;
        }
        let data = self.p.iter().map(|c| horner(c, &n)).collect();
        Some((Matrix::new(self.rank, self.rank, data), d))
    }
}

/// Clears a rational matrix to (integer matrix, common denominator).
fn clear_matrix(m: &Matrix<BigRat>) -> (Matrix<BigInt>, BigInt) {
    let mut c = BigInt::one();
    for e in m.entries() {
        c = c.lcm(e.denom());
    }
    let cq = BigRat::from(c.clone());
    (m.map(|e| (e * &cq).to_integer()), c)
}

/// Clears a rational vector to (integer vector, common denominator).
fn clear_vector(v: &[BigRat]) -> (Vec<BigInt>, BigInt) {
    let mut c = BigInt::one();
    for e in v {
        c = c.lcm(e.denom());
    }
    let cq = BigRat::from(c.clone());
    (v.iter().map(|e| (e * &cq).to_integer()).collect(), c)
}

fn bilinear(a: &Matrix<BigInt>, left: &[BigInt], right: &[BigInt]) -> BigInt {
    let mut s = BigInt::zero();
    for (i, l) in left.iter().enumerate() {
        if l.is_zero() {
            continue;
        }
        let mut row = BigInt::zero();
        for (j, r) in right.iter().enumerate() {
            if !r.is_zero() {
                row += a.get(i, j) * r;
            }
        }
        s += l * row;
    }
    s
}

/// Incremental walk state: after `n` steps it holds ΠP(k) for k < n.
#[derive(Clone, Debug)]
pub struct Walker {
    x: Vec<BigRat>,
    v: Vec<i64>,
    cmf: ExactCmf,
    plan: StepPlan,
    acc: Matrix<BigInt>,
    den: BigInt,
    n: usize,
    singular_steps: Vec<usize>,
    left: (Vec<BigInt>, Vec<BigInt>),
    right: (Vec<BigInt>, Vec<BigInt>),
    /// Multipliers (b·b′, a·a′) restoring the denominators of the vectors.
    fix: (BigInt, BigInt),
}

impl Walker {
    pub fn new(cmf: &ExactCmf, x: &[BigRat], v: &[i64], vectors: &RatioVectors) -> Result<Self> {
        let t = cmf.trajectory(x, v)?;
        Self::from_trajectory(cmf, &t, vectors)
    }

    /// Starts a walk from an already computed trajectory matrix.
    pub fn from_trajectory(cmf: &ExactCmf, t: &TrajectoryMatrix<BigRat>, vectors: &RatioVectors) -> Result<Self> {
        vectors.check(cmf.rank())?;
        let plan = StepPlan::new(t)?;
        let (x, v) = (&t.x, &t.v);
        let (p, a) = clear_vector(&vectors.p);
        let (pp, a2) = clear_vector(&vectors.p_prime);
        let (q, b) = clear_vector(&vectors.q);
        let (qp, b2) = clear_vector(&vectors.q_prime);
        Ok(Walker {
            x: x.to_vec(),
            v: v.to_vec(),
            cmf: cmf.clone(),
            plan,
            acc: Matrix::identity(cmf.rank()),
            den: BigInt::one(),
            n: 0,
            singular_steps: Vec::new(),
            left: (p, q),
            right: (pp, qp),
            fix: (b * b2, a * a2),
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Steps whose matrix T(k) had zero determinant.
    pub fn singular_steps(&self) -> &[usize] {
        &self.singular_steps
    }

    /// The ratio after the current number of steps.
    pub fn current(&self) -> RatioValue {
        let num = bilinear(&self.acc, &self.left.0, &self.right.0) * &self.fix.0;
        let den = bilinear(&self.acc, &self.left.1, &self.right.1) * &self.fix.1;
        RatioValue::from_parts(num, den)
    }

    /// M_{nv}(x) for the current n.
    pub fn product(&self) -> Matrix<BigRat> {
        let d = BigRat::from(self.den.clone());
        self.acc.map(|e| BigRat::from(e.clone()) / &d)
    }

    /// Multiplies in T(n) and advances n.
    pub fn advance(&mut self) -> Result<()> {
        let k = self.n as i64;
        let (p, d) = match self.plan.at(k) {
            Some(s) => s,
            None => {
                // D(k) = 0: retry on the factor path at x + k v.
                let pt: Vec<BigRat> = self.x.iter().zip(&self.v).map(|(a, &b)| a + BigRat::from(BigInt::from(b * k))).collect();
                let e = self.cmf.eval(&self.v, &pt).map_err(|e| Error::PoleAtStep { step: self.n, detail: e.to_string() })?;
                clear_matrix(&e.matrix)
            }
        };
        if p.det().is_zero() {
            self.singular_steps.push(self.n);
        }
        self.acc = &self.acc * &p;
        self.den *= d;
        self.n += 1;
        Ok(())
    }
}

/// An exact CMF ratio sequence L(0..=N).
#[derive(Clone, Debug)]
pub struct RatioSeq {
    pub cmf: String,
    pub x: Vec<BigRat>,
    pub v: Vec<i64>,
    pub vectors: RatioVectors,
    pub values: Vec<RatioValue>,
    pub singular_steps: Vec<usize>,
    /// M_{Nv}(x) after the last step.
    pub last_product: Matrix<BigRat>,
}

impl RatioSeq {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn get(&self, n: usize) -> Option<&BigRat> {
        self.values.get(n).and_then(RatioValue::value)
    }
}

/// Walks N steps and records L(0), ..., L(N).
pub fn walk(cmf: &ExactCmf, x: &[BigRat], v: &[i64], vectors: &RatioVectors, n: usize) -> Result<RatioSeq> {
    let mut w = Walker::new(cmf, x, v, vectors)?;
    let mut values = Vec::with_capacity(n + 1);
    values.push(w.current());
    for _ in 0..n {
        w.advance()?;
        values.push(w.current());
    }
    Ok(RatioSeq {
        cmf: cmf.name().to_string(),
        x: x.to_vec(),
        v: v.to_vec(),
        vectors: vectors.clone(),
        values,
        singular_steps: w.singular_steps.clone(),
        last_product: w.product(),
    })
}

/// Walks to the largest index and returns the values at the given indices
/// together with the singular steps met on the way.
pub fn probe(cmf: &ExactCmf, x: &[BigRat], v: &[i64], vectors: &RatioVectors, indices: &[usize]) -> Result<(Vec<RatioValue>, Vec<usize>)> {
    probe_walker(Walker::new(cmf, x, v, vectors)?, indices)
}

pub fn probe_walker(mut w: Walker, indices: &[usize]) -> Result<(Vec<RatioValue>, Vec<usize>)> {
    let last = indices.iter().copied().max().unwrap_or(0);
    let mut out = vec![None; indices.len()];
    for step in 0..=last {
        for (slot, &i) in out.iter_mut().zip(indices) {
            if i == step {
                *slot = Some(w.current());
            }
        }
        if step < last {
            w.advance()?;
        }
    }
    Ok((out.into_iter().map(|v| v.expect("every index reached")).collect(), w.singular_steps.clone()))
}

/// δ_n, ρ_n, η_n at one index.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Metric {
    pub delta: Option<f64>,
    pub rho: Option<f64>,
    pub eta: Option<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MetricSeq {
    pub entries: Vec<Metric>,
    /// First n where |s_n − l| is below ten units in the last place of l.
    pub resolution_lost_at: Option<usize>,
}

/// Metrics of one value against l (`ulp` is the resolution of l).
pub fn metric_at(value: &RatioValue, n: usize, l: &BigRat) -> Metric {
    let diff = value.log_abs_diff_rat(l);
    let lh = value.log_height();
    let nf = n as f64;
    Metric {
        delta: match (diff, lh) {
            (Some(d), Some(h)) if h > 0.0 => Some(-1.0 - d / h),
            _ => None,
        },
        rho: diff.filter(|_| n > 0).map(|d| d / nf),
        eta: lh.filter(|_| n > 0).map(|h| h / nf),
    }
}

/// δ_n = −1 − ln|s_n − l| / ln H(s_n), ρ_n = ln|s_n − l| / n, η_n = ln H(s_n) / n.
pub fn metrics(seq: &RatioSeq, l: &BigRat, ulp: &BigRat) -> MetricSeq {
    let floor = crate::rat::rat_log_abs(&(ulp * BigRat::from(BigInt::from(10)))).unwrap_or(f64::NEG_INFINITY);
    let mut lost = None;
    let entries = seq
        .values
        .iter()
        .enumerate()
        .map(|(n, v)| {
            if lost.is_none() && v.log_abs_diff_rat(l).is_some_and(|d| d < floor) {
                lost = Some(n);
            }
            metric_at(v, n, l)
        })
        .collect();
    MetricSeq { entries, resolution_lost_at: lost }
}

pub const WALK_CSV_HEADER: &str = "n,num_digits,den_digits,decimal,delta,rho,eta";

fn opt(x: Option<f64>) -> String {
    x.map(|v| format!("{v:.12}")).unwrap_or_default()
}

/// Streams a walk as CSV; digit counts are of the reduced fraction.
pub fn write_walk_csv<W: Write>(out: W, seq: &RatioSeq, metrics: Option<&MetricSeq>, digits: usize) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(WALK_CSV_HEADER.split(','))?;
    for (n, v) in seq.values.iter().enumerate() {
        let m = metrics.and_then(|m| m.entries.get(n)).copied().unwrap_or_default();
        let (nd, dd, dec) = match v.value() {
            Some(r) => (decimal_digits(r.numer()).to_string(), decimal_digits(r.denom()).to_string(), to_decimal(r, digits)),
            None => (String::new(), String::new(), "undefined".to_string()),
        };
        w.write_record([n.to_string(), nd, dd, dec, opt(m.delta), opt(m.rho), opt(m.eta)])?;
    }
    w.flush()?;
    Ok(())
}
