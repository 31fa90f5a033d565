//! Dense square and rectangular matrices over a commutative ring.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use crate::error::{Error, Result};
use crate::scalar::{Field, Ring};

#[derive(Clone, Debug, PartialEq)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Ring> Matrix<T> {
    pub fn new(rows: usize, cols: usize, data: Vec<T>) -> Self {
        assert_eq!(data.len(), rows * cols, "matrix data length");
        Matrix { rows, cols, data }
    }

    pub fn from_rows(rows: Vec<Vec<T>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        Matrix { rows: r, cols: c, data: rows.into_iter().flatten().collect() }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![T::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = T::one();
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &T {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: T) {
        self.data[i * self.cols + j] = v;
    }

    pub fn entries(&self) -> &[T] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<T>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn map<U: Ring>(&self, f: impl Fn(&T) -> U) -> Matrix<U> {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(f).collect() }
    }

    pub fn try_map<U: Ring, E>(&self, f: impl Fn(&T) -> std::result::Result<U, E>) -> std::result::Result<Matrix<U>, E> {
        let data = self.data.iter().map(f).collect::<std::result::Result<Vec<_>, E>>()?;
        Ok(Matrix { rows: self.rows, cols: self.cols, data })
    }

    /// Like [`Matrix::try_map`] but passes the entry position.
    pub fn try_map_indexed<U: Ring, E>(
        &self,
        f: impl Fn(usize, usize, &T) -> std::result::Result<U, E>,
    ) -> std::result::Result<Matrix<U>, E> {
        let mut data = Vec::with_capacity(self.data.len());
        for i in 0..self.rows {
            for j in 0..self.cols {
                data.push(f(i, j, self.get(i, j))?);
            }
        }
        Ok(Matrix { rows: self.rows, cols: self.cols, data })
    }

    pub fn transpose(&self) -> Self {
        let mut data = Vec::with_capacity(self.data.len());
        for j in 0..self.cols {
            for i in 0..self.rows {
                data.push(self.get(i, j).clone());
            }
        }
        Matrix { rows: self.cols, cols: self.rows, data }
    }

    pub fn scale(&self, c: &T) -> Self {
        self.map(|x| x.clone() * c.clone())
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }

    pub fn trace(&self) -> T {
        (0..self.rows.min(self.cols)).fold(T::zero(), |acc, i| acc + self.get(i, i).clone())
    }

    /// Row vector times matrix times column vector.
    pub fn bilinear(&self, left: &[T], right: &[T]) -> T {
        let mut acc = T::zero();
        for i in 0..self.rows {
            if left[i].is_zero() {
                continue;
            }
            let mut s = T::zero();
            for j in 0..self.cols {
                if !right[j].is_zero() {
                    s = s + self.get(i, j).clone() * right[j].clone();
                }
            }
            acc = acc + left[i].clone() * s;
        }
        acc
    }

    /// Characteristic polynomial det(tI − M), coefficients from t^n down to
    /// t^0 (leading 1). Berkowitz's algorithm: ring operations only.
    pub fn char_poly(&self) -> Vec<T> {
        assert!(self.is_square(), "char_poly of a non-square matrix");
        let n = self.rows;
        if n == 0 {
            return vec![T::one()];
        }
        let mut vect = vec![T::one(), -self.get(0, 0).clone()];
        for k in 1..n {
            // Leading (k×k) block A, row R = M[k][0..k], column S = M[0..k][k].
            let r: Vec<T> = (0..k).map(|j| self.get(k, j).clone()).collect();
            let mut col: Vec<T> = (0..k).map(|i| self.get(i, k).clone()).collect();
            let mut toeplitz = Vec::with_capacity(k + 2);
            toeplitz.push(T::one());
            toeplitz.push(-self.get(k, k).clone());
            for _ in 0..k {
                let rs = r.iter().zip(&col).fold(T::zero(), |a, (x, y)| a + x.clone() * y.clone());
                toeplitz.push(-rs);
                col = (0..k)
                    .map(|i| (0..k).fold(T::zero(), |a, j| a + self.get(i, j).clone() * col[j].clone()))
                    .collect();
            }
            let mut next = vec![T::zero(); k + 2];
            for (i, slot) in next.iter_mut().enumerate() {
                let mut s = T::zero();
                for (j, v) in vect.iter().enumerate() {
                    if i >= j {
                        s = s + toeplitz[i - j].clone() * v.clone();
                    }
                }
                *slot = s;
            }
            vect = next;
        }
        vect
    }

    pub fn det(&self) -> T {
        let n = self.rows;
        match n {
            0 => T::one(),
            1 => self.data[0].clone(),
            2 => self.data[0].clone() * self.data[3].clone() - self.data[1].clone() * self.data[2].clone(),
            _ => {
                let cp = self.char_poly();
                let c0 = cp[n].clone();
                if n.is_multiple_of(2) {
                    c0
                } else {
                    -c0
                }
            }
        }
    }

    pub fn minor(&self, row: usize, col: usize) -> Self {
        let mut data = Vec::with_capacity((self.rows - 1) * (self.cols - 1));
        for i in (0..self.rows).filter(|&i| i != row) {
            for j in (0..self.cols).filter(|&j| j != col) {
                data.push(self.get(i, j).clone());
            }
        }
        Matrix { rows: self.rows - 1, cols: self.cols - 1, data }
    }

    /// Classical adjugate (transpose of the cofactor matrix).
    pub fn adjugate(&self) -> Self {
        let n = self.rows;
        if n == 1 {
            return Self::identity(1);
        }
        let mut out = Self::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                let c = self.minor(i, j).det();
                out.set(j, i, if (i + j) % 2 == 0 { c } else { -c });
            }
        }
        out
    }

    /// Evaluates a polynomial with coefficients from highest degree down.
    pub fn eval_poly(&self, coeffs: &[T]) -> Self {
        let n = self.rows;
        let mut acc = Self::zeros(n, n);
        for c in coeffs {
            acc = &(&acc * self) + &Self::identity(n).scale(c);
        }
        acc
    }
}

impl<T: Field> Matrix<T> {
    /// Exact inverse: adjugate/determinant up to rank 4, Gauss–Jordan above.
    pub fn inverse(&self) -> Result<Self> {
        if !self.is_square() {
            return Err(Error::DimensionMismatch("inverse of a non-square matrix".into()));
        }
        let n = self.rows;
        if n <= 4 {
            let d = self.det();
            if d.is_zero() {
                return Err(Error::SingularMatrix);
            }
            let inv = d.recip();
            return Ok(self.adjugate().scale(&inv));
        }
        let mut a = self.clone();
        let mut b = Self::identity(n);
        for col in 0..n {
            let piv = (col..n).find(|&r| !a.get(r, col).is_zero()).ok_or(Error::SingularMatrix)?;
            if piv != col {
                for j in 0..n {
                    a.data.swap(piv * n + j, col * n + j);
                    b.data.swap(piv * n + j, col * n + j);
                }
            }
            let inv = a.get(col, col).recip();
            for j in 0..n {
                a.data[col * n + j] = a.data[col * n + j].clone() * inv.clone();
                b.data[col * n + j] = b.data[col * n + j].clone() * inv.clone();
            }
            for r in 0..n {
                if r == col || a.get(r, col).is_zero() {
                    continue;
                }
                let f = a.get(r, col).clone();
                for j in 0..n {
                    a.data[r * n + j] = a.data[r * n + j].clone() - f.clone() * a.data[col * n + j].clone();
                    b.data[r * n + j] = b.data[r * n + j].clone() - f.clone() * b.data[col * n + j].clone();
                }
            }
        }
        Ok(b)
    }
}

impl<T: Ring> Mul for &Matrix<T> {
    type Output = Matrix<T>;
    fn mul(self, rhs: &Matrix<T>) -> Matrix<T> {
        assert_eq!(self.cols, rhs.rows, "matrix product shapes");
        let mut data = Vec::with_capacity(self.rows * rhs.cols);
        for i in 0..self.rows {
            for j in 0..rhs.cols {
                let mut s = T::zero();
                for k in 0..self.cols {
                    let a = self.get(i, k);
                    let b = rhs.get(k, j);
                    if a.is_zero() || b.is_zero() {
                        continue;
                    }
                    s = s + a.clone() * b.clone();
                }
                data.push(s);
            }
        }
        Matrix { rows: self.rows, cols: rhs.cols, data }
    }
}

impl<T: Ring> Add for &Matrix<T> {
    type Output = Matrix<T>;
    fn add(self, rhs: &Matrix<T>) -> Matrix<T> {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "matrix sum shapes");
        let data = self.data.iter().zip(&rhs.data).map(|(a, b)| a.clone() + b.clone()).collect();
        Matrix { rows: self.rows, cols: self.cols, data }
    }
}

impl<T: Ring> Sub for &Matrix<T> {
    type Output = Matrix<T>;
    fn sub(self, rhs: &Matrix<T>) -> Matrix<T> {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "matrix difference shapes");
        let data = self.data.iter().zip(&rhs.data).map(|(a, b)| a.clone() - b.clone()).collect();
        Matrix { rows: self.rows, cols: self.cols, data }
    }
}

impl<T: Ring> Neg for &Matrix<T> {
    type Output = Matrix<T>;
    fn neg(self) -> Matrix<T> {
        self.map(|x| -x.clone())
    }
}

impl<T: Ring + fmt::Display> fmt::Display for Matrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for i in 0..self.rows {
            if i > 0 {
                f.write_str(", ")?;
            }
            f.write_str("[")?;
            for j in 0..self.cols {
                if j > 0 {
                    f.write_str(", ")?;
                }
                write!(f, "{}", self.get(i, j))?;
            }
            f.write_str("]")?;
        }
        f.write_str("]")
    }
}
