//! Multivariate rational functions num/den over a coefficient field.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::poly::{dense, Monomial, Poly};
use crate::scalar::{Coeff, Field, Ring};

/// Value of a univariate rational function as n → ∞.
#[derive(Clone, Debug, PartialEq)]
pub enum Limit<T> {
    Finite(T),
    Infinite,
}

/// num/den with den ≠ 0, den primitive with positive leading coefficient
/// (exact fields) and common monomial factors removed.
#[derive(Clone, Debug)]
pub struct RationalFunction<T> {
    num: Poly<T>,
    den: Poly<T>,
}

impl<T: Coeff> RationalFunction<T> {
    pub fn new(num: Poly<T>, den: Poly<T>) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(Self::normalized(num, den))
    }

    pub fn from_poly(p: Poly<T>) -> Self {
        RationalFunction { num: p, den: Poly::one() }
    }

    pub fn constant(c: T) -> Self {
        Self::from_poly(Poly::constant(c))
    }

    pub fn from_i64(v: i64) -> Self {
        Self::constant(T::from_i64(v))
    }

    pub fn var(i: usize) -> Self {
        Self::from_poly(Poly::var(i))
    }

    pub fn num(&self) -> &Poly<T> {
        &self.num
    }

    pub fn den(&self) -> &Poly<T> {
        &self.den
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.is_constant()
    }

    pub fn as_constant(&self) -> Option<T> {
        match (self.num.as_constant(), self.den.as_constant()) {
            (Some(n), Some(d)) => Some(n / d),
            _ => None,
        }
    }

    /// num / Π dens for univariate inputs, cancelling against one factor at
    /// a time; much cheaper than one gcd against the expanded product.
    pub fn from_factored(num: Poly<T>, dens: &[Poly<T>]) -> Result<Self> {
        if dens.iter().any(|d| d.is_zero()) {
            return Err(Error::DivisionByZero);
        }
        let mut var = None;
        let univariate = T::is_exact()
            && dens.iter().chain([&num]).map(|p| p.univariate_var()).all(|u| match u {
                Some(None) => true,
                Some(Some(v)) => *var.get_or_insert(v) == v,
                None => false,
            });
        let var = match var {
            Some(v) if univariate && !num.is_zero() => v,
            _ => return Self::new(num, dens.iter().fold(Poly::one(), |a, d| &a * d)),
        };
        let mut a = num.to_dense(var);
        let mut den = vec![T::one()];
        for d in dens {
            let mut b = d.to_dense(var);
            let g = dense::gcd(&b, &dense::rem(&a, &b));
            if g.len() > 1 {
                a = dense::quo(&a, &g);
                b = dense::quo(&b, &g);
            }
            den = dense::mul(&den, &b);
        }
        Ok(Self::reduce(Poly::from_dense(var, &a), Poly::from_dense(var, &den), false))
    }

    fn normalized(num: Poly<T>, den: Poly<T>) -> Self {
        Self::reduce(num, den, true)
    }

    fn reduce(num: Poly<T>, den: Poly<T>, cancel_common: bool) -> Self {
        if num.is_zero() {
            return RationalFunction { num, den: Poly::one() };
        }
        let (mut num, mut den) = (num, den);
        let g = num.monomial_content().gcd(&den.monomial_content());
        if !g.is_one() {
            num = num.div_monomial(&g).expect("monomial gcd divides");
            den = den.div_monomial(&g).expect("monomial gcd divides");
        }
        if let Some(c) = den.as_constant() {
            return RationalFunction { num: num.scale(&c.recip()), den: Poly::one() };
        }
        if T::is_exact() {
            if cancel_common {
                (num, den) = cancel(num, den);
            }
            if let Some(c) = den.as_constant() {
                return RationalFunction { num: num.scale(&c.recip()), den: Poly::one() };
            }
            let c = den.content();
            let c = if den.leading_coeff().is_negative() { -c } else { c };
            if !c.is_one() {
                let inv = c.recip();
                num = num.scale(&inv);
                den = den.scale(&inv);
            }
        } else {
            let lc = den.leading_coeff().recip();
            num = num.scale(&lc);
            den = den.scale(&lc);
        }
        RationalFunction { num, den }
    }

    /// Cross-multiplication equality.
    pub fn equals(&self, other: &Self) -> bool {
        if self.num == other.num && self.den == other.den {
            return true;
        }
        &self.num * &other.den == &other.num * &self.den
    }

    pub fn checked_div(&self, other: &Self) -> Result<Self> {
        if other.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(self.clone() * other.recip_unchecked())
    }

    pub fn inv(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(self.recip_unchecked())
    }

    fn recip_unchecked(&self) -> Self {
        Self::normalized(self.den.clone(), self.num.clone())
    }

    /// Integer power; negative exponents of zero panic.
    pub fn pow_i(&self, e: i32) -> Self {
        let r = Self::normalized(self.num.pow(e.unsigned_abs()), self.den.pow(e.unsigned_abs()));
        if e < 0 {
            r.inv().expect("negative power of zero")
        } else {
            r
        }
    }

    pub fn scale(&self, c: &T) -> Self {
        Self::normalized(self.num.scale(c), self.den.clone())
    }

    /// Applies `f` to numerator and denominator separately.
    pub fn map_polys(&self, f: impl Fn(&Poly<T>) -> Poly<T>) -> Self {
        Self::normalized(f(&self.num), f(&self.den))
    }

    /// σ_v with integer shifts on the leading variables.
    pub fn shift(&self, v: &[i64]) -> Self {
        let s: Vec<T> = v.iter().map(|&k| T::from_i64(k)).collect();
        self.shift_by(&s)
    }

    pub fn shift_by(&self, v: &[T]) -> Self {
        if v.iter().all(|c| c.is_zero()) {
            return self.clone();
        }
        self.map_polys(|p| p.shift(v))
    }

    pub fn derivative(&self, var: usize) -> Self {
        let n = &(&self.num.derivative(var) * &self.den) - &(&self.num * &self.den.derivative(var));
        let d = &self.den * &self.den;
        Self::normalized(n, d)
    }

    /// θ_z f = z ∂f/∂z.
    pub fn euler(&self, var: usize) -> Self {
        self.derivative(var) * Self::var(var)
    }

    pub fn eval(&self, point: &[T]) -> Result<T> {
        let d = self.den.eval(point);
        if d.is_zero() {
            return Err(Error::Pole {
                factor: self.to_string(),
                point: format!("({})", point.iter().map(|p| p.to_string()).collect::<Vec<_>>().join(", ")),
            });
        }
        Ok(self.num.eval(point) / d)
    }

    /// Limit as the single variable x_var → ∞.
    pub fn limit_inf(&self, var: usize) -> Limit<T> {
        let dn = self.num.degree_in(var);
        let dd = self.den.degree_in(var);
        if self.num.is_zero() || dn < dd {
            return Limit::Finite(T::zero());
        }
        if dn > dd {
            return Limit::Infinite;
        }
        let lead = |p: &Poly<T>, d: u32| {
            p.terms().filter(|(m, _)| m.exp(var) == d).fold(T::zero(), |a, (_, c)| a + c.clone())
        };
        Limit::Finite(lead(&self.num, dn) / lead(&self.den, dd))
    }

    pub fn compose(&self, subs: &[Option<Poly<T>>]) -> Self {
        let n = self.num.compose(subs);
        let d = self.den.compose(subs);
        Self::normalized(n, d)
    }

    /// Composition with x = c + L·y where L is d×s (row i gives x_i).
    /// Variables past the first d (parameters) move to indices s, s+1, ...
    pub fn affine_sub(&self, l: &[Vec<i64>], c: &[T]) -> Self {
        let d = l.len();
        let s = l.first().map_or(0, Vec::len);
        let width = self.num.width().max(self.den.width()).max(d);
        let subs: Vec<Option<Poly<T>>> = (0..width)
            .map(|i| {
                if i < d {
                    let mut p = Poly::constant(c.get(i).cloned().unwrap_or_else(T::zero));
                    for (j, &k) in l[i].iter().enumerate() {
                        if k != 0 {
                            p = &p + &Poly::var(j).scale(&T::from_i64(k));
                        }
                    }
                    Some(p)
                } else {
                    Some(Poly::var(s + i - d))
                }
            })
            .collect();
        self.compose(&subs)
    }

    pub fn map_coeffs<U: Coeff>(&self, f: impl Fn(&T) -> U) -> RationalFunction<U> {
        RationalFunction::normalized(self.num.map_coeffs(&f), self.den.map_coeffs(&f))
    }

    pub fn to_string_with(&self, names: &[String]) -> String {
        let n = self.num.to_string_with(names);
        if self.den.is_one() {
            return n;
        }
        let d = self.den.to_string_with(names);
        let n = if self.num.len() > 1 { format!("({n})") } else { n };
        let d = if self.den.len() > 1 || self.den.total_degree() > 0 && !is_single_factor(&self.den) {
            format!("({d})")
        } else {
            d
        };
        format!("{n}/{d}")
    }
}

fn is_single_factor<T: Coeff>(p: &Poly<T>) -> bool {
    p.len() == 1 && p.leading().is_some_and(|(m, c)| c.is_one() && m.exponents().iter().filter(|&&e| e > 0).count() <= 1)
}

/// Best-effort cancellation: exact division either way, then a univariate
/// gcd when both sides involve at most one (the same) variable.
fn cancel<T: Coeff>(num: Poly<T>, den: Poly<T>) -> (Poly<T>, Poly<T>) {
    if den.total_degree() <= num.total_degree() {
        if let Some(q) = num.div_exact(&den) {
            return (q, Poly::one());
        }
    } else if let Some(q) = den.div_exact(&num) {
        return (Poly::one(), q);
    }
    let (un, ud) = match (num.univariate_var(), den.univariate_var()) {
        (Some(a), Some(b)) => (a, b),
        _ => return (num, den),
    };
    let var = match (un, ud) {
        (Some(a), Some(b)) if a == b => a,
        _ => return (num, den),
    };
    let a = num.to_dense(var);
    let b = den.to_dense(var);
    let g = dense::gcd(&a, &b);
    if g.len() <= 1 {
        return (num, den);
    }
    let qa = dense::quo(&a, &g);
    let qb = dense::quo(&b, &g);
    (Poly::from_dense(var, &qa), Poly::from_dense(var, &qb))
}

impl<T: Coeff> fmt::Display for RationalFunction<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_string_with(&[]))
    }
}

impl<T: Coeff> PartialEq for RationalFunction<T> {
    fn eq(&self, other: &Self) -> bool {
        self.equals(other)
    }
}

impl<T: Coeff> Zero for RationalFunction<T> {
    fn zero() -> Self {
        Self::from_poly(Poly::zero())
    }
    fn is_zero(&self) -> bool {
        self.num.is_zero()
    }
}

impl<T: Coeff> One for RationalFunction<T> {
    fn one() -> Self {
        Self::from_poly(Poly::one())
    }
}

impl<T: Coeff> Add for RationalFunction<T> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        &self + &rhs
    }
}

impl<T: Coeff> Add for &RationalFunction<T> {
    type Output = RationalFunction<T>;
    fn add(self, rhs: Self) -> RationalFunction<T> {
        if self.is_zero() {
            return rhs.clone();
        }
        if rhs.is_zero() {
            return self.clone();
        }
        if self.den == rhs.den {
            return RationalFunction::normalized(&self.num + &rhs.num, self.den.clone());
        }
        if T::is_exact() {
            if rhs.den.is_one() {
                return RationalFunction::normalized(&self.num + &(&rhs.num * &self.den), self.den.clone());
            }
            if self.den.is_one() {
                return RationalFunction::normalized(&(&self.num * &rhs.den) + &rhs.num, rhs.den.clone());
            }
            let (big, small) = if self.den.len() >= rhs.den.len() { (self, rhs) } else { (rhs, self) };
            if let Some(q) = big.den.div_exact(&small.den) {
                return RationalFunction::normalized(&big.num + &(&small.num * &q), big.den.clone());
            }
        }
        let n = &(&self.num * &rhs.den) + &(&rhs.num * &self.den);
        RationalFunction::normalized(n, &self.den * &rhs.den)
    }
}

impl<T: Coeff> Sub for RationalFunction<T> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        &self + &(-rhs)
    }
}

impl<T: Coeff> Sub for &RationalFunction<T> {
    type Output = RationalFunction<T>;
    fn sub(self, rhs: Self) -> RationalFunction<T> {
        self + &(-rhs.clone())
    }
}

impl<T: Coeff> Neg for RationalFunction<T> {
    type Output = Self;
    fn neg(self) -> Self {
        RationalFunction { num: -self.num, den: self.den }
    }
}

impl<T: Coeff> Mul for RationalFunction<T> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        &self * &rhs
    }
}

impl<T: Coeff> Mul for &RationalFunction<T> {
    type Output = RationalFunction<T>;
    fn mul(self, rhs: Self) -> RationalFunction<T> {
        if self.is_zero() || rhs.is_zero() {
            return RationalFunction::zero();
        }
        let (mut n1, mut d1) = (self.num.clone(), self.den.clone());
        let (mut n2, mut d2) = (rhs.num.clone(), rhs.den.clone());
        if T::is_exact() {
            if !d2.is_constant() {
                if let Some(q) = n1.div_exact(&d2) {
                    n1 = q;
                    d2 = Poly::one();
                }
            }
            if !d1.is_constant() {
                if let Some(q) = n2.div_exact(&d1) {
                    n2 = q;
                    d1 = Poly::one();
                }
            }
        }
        RationalFunction::normalized(&n1 * &n2, &d1 * &d2)
    }
}

impl<T: Coeff> Div for RationalFunction<T> {
    type Output = Self;
    /// Panics on division by zero; use [`RationalFunction::checked_div`].
    fn div(self, rhs: Self) -> Self {
        self.checked_div(&rhs).expect("division by the zero rational function")
    }
}

impl<T: Coeff> Ring for RationalFunction<T> {}
impl<T: Coeff> Field for RationalFunction<T> {}

/// Monomial helper used by constructors and tests.
pub fn monomial<T: Coeff>(exps: &[u32], c: T) -> RationalFunction<T> {
    RationalFunction::from_poly(Poly::monomial(Monomial::from_exponents(exps), c))
}
