//! Sparse multivariate polynomials.
//!
//! Variables are identified by index; the caller keeps the names. Exponent
//! vectors are stored with trailing zeros trimmed so polynomials over
//! different variable counts compare and combine directly.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::ops::{Add, Mul, Neg, Sub};

use smallvec::SmallVec;

use num_traits::{One, Zero};

use crate::scalar::{Coeff, Ring};

/// Exponent vector ordered graded-lexicographically (x1 > x2 > ...).
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct Monomial(SmallVec<[u32; 4]>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(SmallVec::new())
    }

    pub fn var(i: usize) -> Self {
        let mut v = SmallVec::from_elem(0, i + 1);
        v[i] = 1;
        Monomial(v)
    }

    pub fn from_exponents(exps: &[u32]) -> Self {
        let mut v: SmallVec<[u32; 4]> = exps.iter().copied().collect();
        while v.last() == Some(&0) {
            v.pop();
        }
        Monomial(v)
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    pub fn exp(&self, i: usize) -> u32 {
        self.0.get(i).copied().unwrap_or(0)
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    /// Number of leading variable slots in use.
    pub fn width(&self) -> usize {
        self.0.len()
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let n = self.0.len().max(other.0.len());
        let v: SmallVec<[u32; 4]> = (0..n).map(|i| self.exp(i) + other.exp(i)).collect();
        Monomial(v)
    }

    /// self / other when other divides self.
    pub fn div(&self, other: &Monomial) -> Option<Monomial> {
        if other.0.len() > self.0.len() {
            return None;
        }
        let mut v = self.0.clone();
        for (i, e) in other.0.iter().enumerate() {
            if v[i] < *e {
                return None;
            }
            v[i] -= e;
        }
        while v.last() == Some(&0) {
            v.pop();
        }
        Some(Monomial(v))
    }

    pub fn gcd(&self, other: &Monomial) -> Monomial {
        let n = self.0.len().min(other.0.len());
        let v: Vec<u32> = (0..n).map(|i| self.0[i].min(other.0[i])).collect();
        Monomial::from_exponents(&v)
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree().cmp(&other.degree()).then_with(|| {
            let n = self.0.len().max(other.0.len());
            for i in 0..n {
                match self.exp(i).cmp(&other.exp(i)) {
                    Ordering::Equal => continue,
                    o => return o,
                }
            }
            Ordering::Equal
        })
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Polynomial with coefficients in `T`; no zero coefficients are stored.
#[derive(Clone, PartialEq, Debug)]
pub struct Poly<T> {
    terms: BTreeMap<Monomial, T>,
}

impl<T: Coeff> Default for Poly<T> {
    fn default() -> Self {
        Self::zero()
    }
}

impl<T: Coeff> Poly<T> {
    pub fn zero() -> Self {
        Poly { terms: BTreeMap::new() }
    }

    pub fn one() -> Self {
        Self::constant(T::one())
    }

    pub fn constant(c: T) -> Self {
        Self::monomial(Monomial::one(), c)
    }

    pub fn var(i: usize) -> Self {
        Self::monomial(Monomial::var(i), T::one())
    }

    pub fn monomial(m: Monomial, c: T) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        Poly { terms }
    }

    pub fn from_terms<I: IntoIterator<Item = (Monomial, T)>>(it: I) -> Self {
        let mut p = Self::zero();
        for (m, c) in it {
            p.add_term(m, c);
        }
        p
    }

    pub fn add_term(&mut self, m: Monomial, c: T) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let s = e.get().clone() + c;
                if s.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = s;
                }
            }
        }
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &T)> {
        self.terms.iter()
    }

    pub fn coeffs(&self) -> impl Iterator<Item = &T> {
        self.terms.values()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.as_constant().is_some_and(|c| c.is_one())
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(Monomial::is_one)
    }

    /// The value of a constant polynomial.
    pub fn as_constant(&self) -> Option<T> {
        match self.terms.len() {
            0 => Some(T::zero()),
            1 => self.terms.get(&Monomial::one()).cloned(),
            _ => None,
        }
    }

    pub fn leading(&self) -> Option<(&Monomial, &T)> {
        self.terms.iter().next_back()
    }

    pub fn leading_coeff(&self) -> T {
        self.leading().map(|(_, c)| c.clone()).unwrap_or_else(T::zero)
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(Monomial::degree).max().unwrap_or(0)
    }

    pub fn degree_in(&self, var: usize) -> u32 {
        self.terms.keys().map(|m| m.exp(var)).max().unwrap_or(0)
    }

    /// One past the highest variable index that occurs.
    pub fn width(&self) -> usize {
        self.terms.keys().map(Monomial::width).max().unwrap_or(0)
    }

    /// Indices of the variables that occur.
    pub fn variables(&self) -> Vec<usize> {
        let w = self.width();
        (0..w).filter(|&i| self.terms.keys().any(|m| m.exp(i) > 0)).collect()
    }

    /// `Some(None)` for constants, `Some(Some(i))` when only x_i occurs.
    pub fn univariate_var(&self) -> Option<Option<usize>> {
        let vars = self.variables();
        match vars.len() {
            0 => Some(None),
            1 => Some(Some(vars[0])),
            _ => None,
        }
    }

    pub fn scale(&self, c: &T) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        Poly { terms: self.terms.iter().map(|(m, a)| (m.clone(), a.clone() * c.clone())).collect() }
    }

    pub fn mul_monomial(&self, m: &Monomial) -> Self {
        Poly { terms: self.terms.iter().map(|(k, a)| (k.mul(m), a.clone())).collect() }
    }

    pub fn pow(&self, mut e: u32) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// Evaluates at `point`; variables beyond the point are taken as zero.
    pub fn eval(&self, point: &[T]) -> T {
        let mut acc = T::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (i, &e) in m.exponents().iter().enumerate() {
                if e == 0 {
                    continue;
                }
                let x = point.get(i).cloned().unwrap_or_else(T::zero);
                t = t * pow_scalar(&x, e);
            }
            acc = acc + t;
        }
        acc
    }

    /// Substitutes x_i ↦ subs[i]. Variables with index ≥ subs.len() and
    /// entries equal to `None` are left in place.
    pub fn compose(&self, subs: &[Option<Poly<T>>]) -> Self {
        let mut cache: Vec<Vec<Poly<T>>> = vec![Vec::new(); subs.len()];
        let mut out = Self::zero();
        for (m, c) in &self.terms {
            let mut keep: SmallVec<[u32; 4]> = SmallVec::new();
            let mut factor = Poly::constant(c.clone());
            for (i, &e) in m.exponents().iter().enumerate() {
                match subs.get(i) {
                    Some(Some(s)) if e > 0 => {
                        keep.push(0);
                        let powers = &mut cache[i];
                        if powers.is_empty() {
                            powers.push(Poly::one());
                        }
                        while powers.len() <= e as usize {
                            let next = powers.last().expect("nonempty") * s;
                            powers.push(next);
                        }
                        factor = &factor * &powers[e as usize];
                    }
                    _ => keep.push(e),
                }
            }
            let keep = Monomial::from_exponents(&keep);
            for (k, a) in factor.terms {
                out.add_term(k.mul(&keep), a);
            }
        }
        out
    }

    /// σ_v: x_i ↦ x_i + shift[i].
    pub fn shift(&self, shift: &[T]) -> Self {
        if shift.iter().all(|s| s.is_zero()) {
            return self.clone();
        }
        let subs: Vec<Option<Poly<T>>> = shift
            .iter()
            .enumerate()
            .map(|(i, s)| if s.is_zero() { None } else { Some(&Poly::var(i) + &Poly::constant(s.clone())) })
            .collect();
        self.compose(&subs)
    }

    pub fn derivative(&self, var: usize) -> Self {
        let mut out = Self::zero();
        for (m, c) in &self.terms {
            let e = m.exp(var);
            if e == 0 {
                continue;
            }
            let mut exps = m.exponents().to_vec();
            exps[var] -= 1;
            out.add_term(Monomial::from_exponents(&exps), c.clone() * T::from_i64(e as i64));
        }
        out
    }

    /// Exact quotient self / d, or `None` when d does not divide self.
    pub fn div_exact(&self, d: &Poly<T>) -> Option<Poly<T>> {
        let (dm, dc) = d.leading()?;
        if self.is_zero() {
            return Some(Self::zero());
        }
        if d.len() == 1 {
            let inv = T::one() / dc.clone();
            let mut terms = BTreeMap::new();
            for (m, c) in &self.terms {
                terms.insert(m.div(dm)?, c.clone() * inv.clone());
            }
            return Some(Poly { terms });
        }
        if self.total_degree() < d.total_degree() {
            return None;
        }
        let mut r = self.clone();
        let mut q = Self::zero();
        while let Some((rm, rc)) = r.leading() {
            let qm = rm.div(dm)?;
            let qc = rc.clone() / dc.clone();
            let lead = rm.clone();
            r.terms.remove(&lead);
            for (m, c) in d.terms.iter().rev().skip(1) {
                r.add_term(m.mul(&qm), -(c.clone() * qc.clone()));
            }
            q.add_term(qm, qc);
        }
        Some(q)
    }

    /// gcd of all exponent vectors.
    pub fn monomial_content(&self) -> Monomial {
        let mut it = self.terms.keys();
        let first = match it.next() {
            Some(m) => m.clone(),
            None => return Monomial::one(),
        };
        it.fold(first, |g, m| g.gcd(m))
    }

    pub fn div_monomial(&self, m: &Monomial) -> Option<Self> {
        let mut terms = BTreeMap::new();
        for (k, c) in &self.terms {
            terms.insert(k.div(m)?, c.clone());
        }
        Some(Poly { terms })
    }

    pub fn content(&self) -> T {
        T::content(self.terms.values())
    }

    pub fn map_coeffs<U: Coeff>(&self, f: impl Fn(&T) -> U) -> Poly<U> {
        Poly::from_terms(self.terms.iter().map(|(m, c)| (m.clone(), f(c))))
    }

    /// Dense coefficient vector (index = power) of a polynomial in x_var only.
    pub fn to_dense(&self, var: usize) -> Vec<T> {
        let deg = self.degree_in(var) as usize;
        let mut v = vec![T::zero(); deg + 1];
        for (m, c) in &self.terms {
            v[m.exp(var) as usize] = c.clone();
        }
        if self.is_zero() {
            v.clear();
        }
        v
    }

    pub fn from_dense(var: usize, coeffs: &[T]) -> Self {
        Self::from_terms(coeffs.iter().enumerate().map(|(k, c)| {
            let mut exps = vec![0u32; var + 1];
            exps[var] = k as u32;
            (Monomial::from_exponents(&exps), c.clone())
        }))
    }

    /// Renders with the given variable names, highest term first.
    pub fn to_string_with(&self, names: &[String]) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut s = String::new();
        for (idx, (m, c)) in self.terms.iter().rev().enumerate() {
            let neg = c.is_negative();
            let abs = if neg { -c.clone() } else { c.clone() };
            if idx == 0 {
                if neg {
                    s.push('-');
                }
            } else {
                s.push_str(if neg { " - " } else { " + " });
            }
            let mut parts: Vec<String> = Vec::new();
            if !abs.is_one() || m.is_one() {
                parts.push(abs.to_string());
            }
            for (i, &e) in m.exponents().iter().enumerate() {
                let name = names.get(i).cloned().unwrap_or_else(|| format!("x{}", i + 1));
                match e {
                    0 => {}
                    1 => parts.push(name),
                    _ => parts.push(format!("{name}^{e}")),
                }
            }
            let _ = write!(s, "{}", parts.join("*"));
        }
        s
    }
}

pub(crate) fn pow_scalar<T: Coeff>(x: &T, mut e: u32) -> T {
    let mut base = x.clone();
    let mut acc = T::one();
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * base.clone();
        }
        e >>= 1;
        if e > 0 {
            base = base.clone() * base;
        }
    }
    acc
}

impl<T: Coeff> Add for &Poly<T> {
    type Output = Poly<T>;
    fn add(self, rhs: &Poly<T>) -> Poly<T> {
        let (big, small) = if self.len() >= rhs.len() { (self, rhs) } else { (rhs, self) };
        let mut out = big.clone();
        for (m, c) in &small.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }
}

impl<T: Coeff> Sub for &Poly<T> {
    type Output = Poly<T>;
    fn sub(self, rhs: &Poly<T>) -> Poly<T> {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), -c.clone());
        }
        out
    }
}

impl<T: Coeff> Mul for &Poly<T> {
    type Output = Poly<T>;
    fn mul(self, rhs: &Poly<T>) -> Poly<T> {
        if self.is_zero() || rhs.is_zero() {
            return Poly::zero();
        }
        if let Some(c) = self.as_constant() {
            return rhs.scale(&c);
        }
        if let Some(c) = rhs.as_constant() {
            return self.scale(&c);
        }
        let mut out = Poly::zero();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                out.add_term(ma.mul(mb), ca.clone() * cb.clone());
            }
        }
        out
    }
}

impl<T: Coeff> Neg for &Poly<T> {
    type Output = Poly<T>;
    fn neg(self) -> Poly<T> {
        Poly { terms: self.terms.iter().map(|(m, c)| (m.clone(), -c.clone())).collect() }
    }
}

impl<T: Coeff> Add for Poly<T> {
    type Output = Poly<T>;
    fn add(self, rhs: Poly<T>) -> Poly<T> {
        &self + &rhs
    }
}

impl<T: Coeff> Sub for Poly<T> {
    type Output = Poly<T>;
    fn sub(self, rhs: Poly<T>) -> Poly<T> {
        &self - &rhs
    }
}

impl<T: Coeff> Mul for Poly<T> {
    type Output = Poly<T>;
    fn mul(self, rhs: Poly<T>) -> Poly<T> {
        &self * &rhs
    }
}

impl<T: Coeff> Neg for Poly<T> {
    type Output = Poly<T>;
    fn neg(self) -> Poly<T> {
        -&self
    }
}

impl<T: Coeff> Zero for Poly<T> {
    fn zero() -> Self {
        Poly::zero()
    }
    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
}

impl<T: Coeff> One for Poly<T> {
    fn one() -> Self {
        Poly::one()
    }
}

impl<T: Coeff> Ring for Poly<T> {}

/// Dense univariate helpers over a field; coefficient index = power.
pub(crate) mod dense {
    use crate::scalar::Coeff;

    pub fn trim<T: Coeff>(v: &mut Vec<T>) {
        while v.last().is_some_and(|c| c.is_zero()) {
            v.pop();
        }
    }

    /// Remainder of a / b (b nonzero, trimmed).
    pub fn rem<T: Coeff>(a: &[T], b: &[T]) -> Vec<T> {
        let mut r = a.to_vec();
        trim(&mut r);
        let db = b.len() - 1;
        let lb = b[db].clone();
        while r.len() > db && !r.is_empty() {
            let k = r.len() - 1 - db;
            let f = r.last().expect("nonempty").clone() / lb.clone();
            for (i, c) in b.iter().enumerate() {
                r[k + i] = r[k + i].clone() - f.clone() * c.clone();
            }
            r.pop();
            trim(&mut r);
        }
        r
    }

    pub fn quo<T: Coeff>(a: &[T], b: &[T]) -> Vec<T> {
        let mut r = a.to_vec();
        trim(&mut r);
        let db = b.len() - 1;
        if r.len() <= db {
            return Vec::new();
        }
        let lb = b[db].clone();
        let mut q = vec![T::zero(); r.len() - db];
        while r.len() > db {
            let k = r.len() - 1 - db;
            let f = r.last().expect("nonempty").clone() / lb.clone();
            for (i, c) in b.iter().enumerate() {
                r[k + i] = r[k + i].clone() - f.clone() * c.clone();
            }
            q[k] = f;
            r.pop();
        }
        trim(&mut q);
        q
    }

    pub fn mul<T: Coeff>(a: &[T], b: &[T]) -> Vec<T> {
        if a.is_empty() || b.is_empty() {
            return Vec::new();
        }
        let mut out = vec![T::zero(); a.len() + b.len() - 1];
        for (i, x) in a.iter().enumerate() {
            for (j, y) in b.iter().enumerate() {
                out[i + j] = out[i + j].clone() + x.clone() * y.clone();
            }
        }
        out
    }

    fn monic<T: Coeff>(v: &[T]) -> Vec<T> {
        let l = v.last().expect("nonempty").clone();
        v.iter().map(|c| c.clone() / l.clone()).collect()
    }

    /// b·r − lead(r)·x^k·a style pseudo-remainder: ring operations only.
    fn prem<T: Coeff>(a: &[T], b: &[T]) -> Vec<T> {
        let mut r = a.to_vec();
        let db = b.len() - 1;
        let lb = b[db].clone();
        while r.len() > db {
            let k = r.len() - 1 - db;
            let lr = r.last().expect("nonempty").clone();
            for c in r.iter_mut() {
                *c = c.clone() * lb.clone();
            }
            for (i, c) in b.iter().enumerate() {
                r[k + i] = r[k + i].clone() - lr.clone() * c.clone();
            }
            r.pop();
            trim(&mut r);
        }
        r
    }

    fn primitive<T: Coeff>(v: &[T]) -> Vec<T> {
        let c = T::content(v.iter()).recip();
        v.iter().map(|x| x.clone() * c.clone()).collect()
    }

    /// Monic gcd; empty when both inputs are zero.
    pub fn gcd<T: Coeff>(a: &[T], b: &[T]) -> Vec<T> {
        let mut a = a.to_vec();
        let mut b = b.to_vec();
        trim(&mut a);
        trim(&mut b);
        if T::is_exact() {
            // primitive remainder sequence keeps coefficients integral and small
            if a.is_empty() || b.is_empty() {
                let g = if a.is_empty() { b } else { a };
                return if g.is_empty() { g } else { monic(&g) };
            }
            a = primitive(&a);
            b = primitive(&b);
            while !b.is_empty() {
                let r = prem(&a, &b);
                a = b;
                b = if r.is_empty() { r } else { primitive(&r) };
            }
            return monic(&a);
        }
        while !b.is_empty() {
            let r = rem(&a, &b);
            a = monic(&b);
            b = if r.is_empty() { r } else { monic(&r) };
        }
        if a.is_empty() {
            a
        } else {
            monic(&a)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::BigRat;

    type P = Poly<BigRat>;

    fn c(v: i64) -> BigRat {
        BigRat::from_integer(v.into())
    }

    fn x(i: usize) -> P {
        P::var(i)
    }

    #[test]
    fn grlex_order() {
        let a = Monomial::from_exponents(&[2, 0]);
        let b = Monomial::from_exponents(&[1, 1]);
        let d = Monomial::from_exponents(&[0, 3]);
        assert!(a > b);
        assert!(d > a);
        assert_eq!(Monomial::from_exponents(&[1, 0, 0]), Monomial::var(0));
    }

    #[test]
    fn arithmetic_and_expansion() {
        let p = &x(0) + &P::one();
        let cube = p.pow(3);
        assert_eq!(cube.len(), 4);
        assert_eq!(cube.eval(&[c(1)]), c(8));
        let diff = &cube - &cube;
        assert!(diff.is_zero());
        let q = &(&x(0) - &x(1)) * &(&x(0) + &x(1));
        assert_eq!(q, &x(0).pow(2) - &x(1).pow(2));
    }

    #[test]
    fn shift_matches_binomial() {
        let p = x(0).pow(3);
        let s = p.shift(&[c(1)]);
        assert_eq!(s, (&x(0) + &P::one()).pow(3));
        let back = s.shift(&[c(-1)]);
        assert_eq!(back, p);
        assert_eq!(p.shift(&[c(0), c(0)]), p);
    }

    #[test]
    fn exact_division() {
        let a = &x(0) + &x(1);
        let b = &x(0) - &P::constant(c(2));
        let prod = &a * &b;
        assert_eq!(prod.div_exact(&a), Some(b.clone()));
        assert_eq!(prod.div_exact(&b), Some(a.clone()));
        assert_eq!(a.div_exact(&b), None);
        assert_eq!(prod.div_exact(&x(1)), None);
    }

    #[test]
    fn derivative_and_compose() {
        let p = &x(0).pow(2) * &x(1);
        assert_eq!(p.derivative(0), (&x(0) * &x(1)).scale(&c(2)));
        let subs = vec![Some(&x(1) + &P::one()), None];
        assert_eq!(p.compose(&subs), &(&x(1) + &P::one()).pow(2) * &x(1));
    }

    #[test]
    fn dense_gcd() {
        // (t-1)(t-2) and (t-1)(t+3)
        let a = vec![c(2), c(-3), c(1)];
        let b = vec![c(-3), c(2), c(1)];
        assert_eq!(dense::gcd(&a, &b), vec![c(-1), c(1)]);
        assert_eq!(dense::quo(&a, &[c(-1), c(1)]), vec![c(-2), c(1)]);
    }

    #[test]
    fn printing() {
        let p = &(&x(0).pow(2).scale(&c(3)) - &x(1)) + &P::constant(BigRat::new(1.into(), 2.into()));
        assert_eq!(p.to_string_with(&["a".into(), "b".into()]), "3*a^2 - b + 1/2");
        assert_eq!((-&x(0)).to_string_with(&[]), "-x1");
    }
}
