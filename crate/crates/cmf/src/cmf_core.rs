//! Conservative matrix fields: generators, M_v, evaluation, transforms.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::OnceLock;

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::poly::Poly;
use crate::ratfunc::RationalFunction;
use crate::scalar::Coeff;

pub type FuncMat<T> = Matrix<RationalFunction<T>>;

/// One factor σ_offset(M_{±e_axis}) of a lattice path.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Factor {
    pub axis: usize,
    pub negative: bool,
    pub offset: Vec<i64>,
}

impl fmt::Display for Factor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sign = if self.negative { "-" } else { "" };
        write!(f, "M_{{{sign}e{}}} shifted by {:?}", self.axis + 1, self.offset)
    }
}

/// First failing generator pair and entry of [`Cmf::verify`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VerifyFailure {
    pub i: usize,
    pub j: usize,
    pub row: usize,
    pub col: usize,
}

/// Numeric M_v(x) with a flag for a vanishing determinant.
#[derive(Clone, Debug, PartialEq)]
pub struct Evaluated<T> {
    pub matrix: Matrix<T>,
    pub singular: bool,
}

/// T_{x,v}(n) = M_v(x + n v), univariate in n (variable index 0; any
/// symbolic parameters follow at indices 1, 2, ...).
#[derive(Clone, Debug)]
pub struct TrajectoryMatrix<T: Coeff> {
    pub x: Vec<T>,
    pub v: Vec<i64>,
    pub matrix: FuncMat<T>,
}

impl<T: Coeff> TrajectoryMatrix<T> {
    pub fn at(&self, n: i64) -> Result<Matrix<T>> {
        let pt = [T::from_i64(n)];
        self.matrix.try_map(|f| f.eval(&pt))
    }
}

#[derive(Clone, Debug)]
pub struct Cmf<T: Coeff> {
    name: String,
    variables: Vec<String>,
    parameters: Vec<String>,
    generators: Vec<FuncMat<T>>,
    inverses: Vec<OnceLock<FuncMat<T>>>,
    verified: bool,
    pub metadata: BTreeMap<String, String>,
}

impl<T: Coeff> Cmf<T> {
    /// Builds a CMF; each generator must be square of equal rank with a
    /// nonzero determinant. The cocycle condition is not checked here.
    pub fn new(
        name: impl Into<String>,
        variables: Vec<String>,
        parameters: Vec<String>,
        generators: Vec<FuncMat<T>>,
    ) -> Result<Self> {
        if generators.len() != variables.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} generators for {} variables",
                generators.len(),
                variables.len()
            )));
        }
        let rank = generators.first().map_or(0, Matrix::rows);
        for (i, g) in generators.iter().enumerate() {
            if !g.is_square() || g.rows() != rank {
                return Err(Error::DimensionMismatch(format!("generator {} is not {rank}×{rank}", i + 1)));
            }
            if g.det().is_zero() {
                return Err(Error::SingularGenerator { index: i + 1 });
            }
        }
        let inverses = generators.iter().map(|_| OnceLock::new()).collect();
        Ok(Cmf {
            name: name.into(),
            variables,
            parameters,
            generators,
            inverses,
            verified: false,
            metadata: BTreeMap::new(),
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn set_name(&mut self, name: impl Into<String>) {
        self.name = name.into();
    }

    pub fn dim(&self) -> usize {
        self.generators.len()
    }

    pub fn rank(&self) -> usize {
        self.generators.first().map_or(0, Matrix::rows)
    }

    pub fn variables(&self) -> &[String] {
        &self.variables
    }

    pub fn parameters(&self) -> &[String] {
        &self.parameters
    }

    /// Shift variables followed by parameters, in index order.
    pub fn names(&self) -> Vec<String> {
        self.variables.iter().chain(&self.parameters).cloned().collect()
    }

    pub fn generators(&self) -> &[FuncMat<T>] {
        &self.generators
    }

    pub fn generator(&self, axis: usize) -> &FuncMat<T> {
        &self.generators[axis]
    }

    pub fn is_verified(&self) -> bool {
        self.verified
    }

    /// M_{−e_i} = σ_{−e_i}(M_{e_i})⁻¹, computed once.
    pub fn neg_generator(&self, axis: usize) -> &FuncMat<T> {
        self.inverses[axis].get_or_init(|| {
            let s = self.unit(axis, -1);
            shift_matrix(&self.generators[axis], &s).inverse().expect("generators are invertible")
        })
    }

    fn unit(&self, axis: usize, k: i64) -> Vec<i64> {
        let mut v = vec![0; self.dim()];
        v[axis] = k;
        v
    }

    /// Checks M_i σ_i(M_j) = M_j σ_j(M_i) for all i < j.
    pub fn check_generators(&self) -> std::result::Result<(), VerifyFailure> {
        for i in 0..self.dim() {
            for j in i + 1..self.dim() {
                let lhs = &self.generators[i] * &shift_matrix(&self.generators[j], &self.unit(i, 1));
                let rhs = &self.generators[j] * &shift_matrix(&self.generators[i], &self.unit(j, 1));
                if let Some((row, col)) = first_difference(&lhs, &rhs) {
                    return Err(VerifyFailure { i: i + 1, j: j + 1, row: row + 1, col: col + 1 });
                }
            }
        }
        Ok(())
    }

    /// Runs [`Cmf::check_generators`] and marks the CMF verified on success.
    pub fn verify(&mut self) -> std::result::Result<(), VerifyFailure> {
        self.check_generators()?;
        self.verified = true;
        Ok(())
    }

    fn into_verified(mut self) -> Self {
        self.verified = true;
        self
    }

    /// Factors of M_v: positive components first in axis order, then
    /// negative ones, each at its accumulated offset.
    pub fn factor_path(&self, v: &[i64]) -> Vec<Factor> {
        let order: Vec<usize> = (0..self.dim()).filter(|&i| v[i] > 0).chain((0..self.dim()).filter(|&i| v[i] < 0)).collect();
        self.factor_path_ordered(v, &order)
    }

    fn factor_path_ordered(&self, v: &[i64], order: &[usize]) -> Vec<Factor> {
        let mut cur = vec![0i64; self.dim()];
        let mut out = Vec::new();
        for &axis in order {
            let steps = v[axis];
            for _ in 0..steps.unsigned_abs() {
                out.push(Factor { axis, negative: steps < 0, offset: cur.clone() });
                cur[axis] += steps.signum();
            }
        }
        out
    }

    fn factor_matrix(&self, f: &Factor) -> &FuncMat<T> {
        if f.negative {
            self.neg_generator(f.axis)
        } else {
            &self.generators[f.axis]
        }
    }

    fn check_direction(&self, v: &[i64]) -> Result<()> {
        if v.len() != self.dim() {
            return Err(Error::DimensionMismatch(format!("direction has {} entries, CMF dimension is {}", v.len(), self.dim())));
        }
        Ok(())
    }

    fn check_point(&self, x: &[T]) -> Result<()> {
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch(format!("point has {} entries, CMF dimension is {}", x.len(), self.dim())));
        }
        Ok(())
    }

    /// Symbolic M_v as the ordered product of shifted generator factors.
    pub fn matrix(&self, v: &[i64]) -> Result<FuncMat<T>> {
        self.check_direction(v)?;
        let mut acc = Matrix::identity(self.rank());
        for f in self.factor_path(v) {
            acc = &acc * &shift_matrix(self.factor_matrix(&f), &f.offset);
        }
        Ok(acc)
    }

    /// Numeric M_v(x): each factor is evaluated at its shifted point and the
    /// results multiplied. When a factor has a pole on the default path,
    /// other axis orders are tried before reporting the pole.
    pub fn eval(&self, v: &[i64], x: &[T]) -> Result<Evaluated<T>> {
        self.check_direction(v)?;
        self.check_point(x)?;
        let first = self.factor_path(v);
        let err = match self.eval_path(&first, x) {
            Ok(m) => return Ok(m),
            Err(e) => e,
        };
        let axes: Vec<usize> = (0..self.dim()).filter(|&i| v[i] != 0).collect();
        for order in permutations(&axes) {
            let path = self.factor_path_ordered(v, &order);
            if path == first {
                continue;
            }
            if let Ok(m) = self.eval_path(&path, x) {
                return Ok(m);
            }
        }
        Err(err)
    }

    fn eval_path(&self, path: &[Factor], x: &[T]) -> Result<Evaluated<T>> {
        let r = self.rank();
        let mut acc = Matrix::identity(r);
        for f in path {
            let pt: Vec<T> = x.iter().zip(&f.offset).map(|(a, &o)| a.clone() + T::from_i64(o)).collect();
            let m = self.factor_matrix(f).try_map(|e| e.eval(&pt)).map_err(|_| Error::Pole {
                factor: f.to_string(),
                point: format_point(&pt),
            })?;
            acc = &acc * &m;
        }
        let singular = acc.det().is_zero();
        Ok(Evaluated { matrix: acc, singular })
    }

    /// T_{x,v}(n) = M_v(x + n v) as a matrix of univariate functions of n.
    pub fn trajectory(&self, x: &[T], v: &[i64]) -> Result<TrajectoryMatrix<T>> {
        self.check_direction(v)?;
        self.check_point(x)?;
        let d = self.dim();
        // Products are kept over one common denominator and reduced once at
        // the end; reducing every partial product is far slower.
        let mut num: Matrix<Poly<T>> = Matrix::identity(self.rank());
        let mut dens = Vec::new();
        for f in self.factor_path(v) {
            let mut subs: Vec<Option<Poly<T>>> = (0..d)
                .map(|i| {
                    let c = x[i].clone() + T::from_i64(f.offset[i]);
                    let p = &Poly::constant(c) + &Poly::var(0).scale(&T::from_i64(v[i]));
                    Some(p)
                })
                .collect();
            subs.extend((0..self.parameters.len()).map(|k| Some(Poly::var(1 + k))));
            let m = self.factor_matrix(&f).map(|e| e.compose(&subs));
            let (p, q) = clear_denominators(&m);
            num = &num * &p;
            if !q.is_one() {
                dens.push(q);
            }
        }
        let matrix = num.try_map(|e| RationalFunction::from_factored(e.clone(), &dens))?;
        Ok(TrajectoryMatrix { x: x.to_vec(), v: v.to_vec(), matrix })
    }

    /// Whether A·M¹_{e_i} = M²_{e_i}·σ_{e_i}(A) for every axis (self = M¹).
    pub fn coboundary_check(&self, other: &Cmf<T>, a: &FuncMat<T>) -> Result<bool> {
        if self.dim() != other.dim() || self.rank() != other.rank() {
            return Err(Error::DimensionMismatch("coboundary between CMFs of different shape".into()));
        }
        if !a.is_square() || a.rows() != self.rank() {
            return Err(Error::DimensionMismatch("coboundary matrix has the wrong size".into()));
        }
        if a.det().is_zero() {
            return Err(Error::SingularMatrix);
        }
        for i in 0..self.dim() {
            let lhs = a * &self.generators[i];
            let rhs = &other.generators[i] * &shift_matrix(a, &self.unit(i, 1));
            if first_difference(&lhs, &rhs).is_some() {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// The CMF M̄_v = A⁻¹·M_v·σ_v(A).
    pub fn coboundary_apply(&self, a: &FuncMat<T>) -> Result<Cmf<T>> {
        if !a.is_square() || a.rows() != self.rank() {
            return Err(Error::DimensionMismatch("coboundary matrix has the wrong size".into()));
        }
        let inv = a.inverse()?;
        let gens = (0..self.dim())
            .map(|i| &(&inv * &self.generators[i]) * &shift_matrix(a, &self.unit(i, 1)))
            .collect();
        let out = Cmf::new(format!("{}_coboundary", self.name), self.variables.clone(), self.parameters.clone(), gens)?;
        Ok(if self.verified { out.into_verified() } else { out })
    }

    /// Dual CMF with generators (M_{e_i}⁻¹)ᵀ.
    pub fn dual(&self) -> Result<Cmf<T>> {
        let gens = self.generators.iter().map(|g| g.inverse().map(|m| m.transpose())).collect::<Result<Vec<_>>>()?;
        let out = Cmf::new(format!("{}_dual", self.name), self.variables.clone(), self.parameters.clone(), gens)?;
        Ok(if self.verified { out.into_verified() } else { out })
    }

    /// Restriction to x = offset + Σ y_j l_j, `basis[j]` = l_j.
    pub fn sub_cmf(&self, basis: &[Vec<i64>], offset: &[T]) -> Result<Cmf<T>> {
        let d = self.dim();
        self.check_point(offset)?;
        if basis.iter().any(|l| l.len() != d) {
            return Err(Error::DimensionMismatch("basis vectors must have the CMF dimension".into()));
        }
        if integer_rank(basis) < basis.len() {
            return Err(Error::DependentColumns);
        }
        let s = basis.len();
        let l: Vec<Vec<i64>> = (0..d).map(|i| basis.iter().map(|col| col[i]).collect()).collect();
        let gens = basis
            .iter()
            .map(|col| Ok(self.matrix(col)?.map(|e| e.affine_sub(&l, offset))))
            .collect::<Result<Vec<_>>>()?;
        let vars = (1..=s).map(|i| format!("x{i}")).collect();
        let out = Cmf::new(format!("{}_sub", self.name), vars, self.parameters.clone(), gens)?;
        Ok(if self.verified { out.into_verified() } else { out })
    }

    /// Rank-1 CMF of generator determinants.
    pub fn det_cmf(&self) -> Result<Cmf<T>> {
        let gens = self.generators.iter().map(|g| Matrix::new(1, 1, vec![g.det()])).collect();
        let out = Cmf::new(format!("{}_det", self.name), self.variables.clone(), self.parameters.clone(), gens)?;
        Ok(if self.verified { out.into_verified() } else { out })
    }

    /// Replaces named parameters by values.
    pub fn substitute_parameters(&self, values: &[(String, T)]) -> Result<Cmf<T>> {
        let d = self.dim();
        let mut subs: Vec<Option<Poly<T>>> = vec![None; d];
        let mut remaining = Vec::new();
        for (k, name) in self.parameters.iter().enumerate() {
            match values.iter().find(|(n, _)| n == name) {
                Some((_, val)) => subs.push(Some(Poly::constant(val.clone()))),
                None => {
                    subs.push(Some(Poly::var(d + remaining.len())));
                    remaining.push(self.parameters[k].clone());
                }
            }
        }
        for (n, _) in values {
            if !self.parameters.contains(n) {
                return Err(Error::UnknownVariable { name: n.clone(), pos: 0 });
            }
        }
        let gens = self
            .generators
            .iter()
            .map(|g| {
                let m = g.map(|e| e.compose(&subs));
                if m.det().is_zero() {
                    Err(Error::SingularMatrix)
                } else {
                    Ok(m)
                }
            })
            .collect::<Result<Vec<_>>>()?;
        let mut out = Cmf::new(self.name.clone(), self.variables.clone(), remaining, gens)?;
        out.metadata = self.metadata.clone();
        Ok(if self.verified { out.into_verified() } else { out })
    }

    /// The same field over another coefficient type.
    pub fn map_coeffs<U: Coeff>(&self, f: impl Fn(&T) -> U) -> Result<Cmf<U>> {
        let gens = self.generators.iter().map(|g| g.map(|e| e.map_coeffs(&f))).collect();
        Cmf::new(self.name.clone(), self.variables.clone(), self.parameters.clone(), gens)
    }
}

/// σ_v applied entrywise.
pub fn shift_matrix<T: Coeff>(m: &FuncMat<T>, v: &[i64]) -> FuncMat<T> {
    if v.iter().all(|&k| k == 0) {
        return m.clone();
    }
    let s: Vec<T> = v.iter().map(|&k| T::from_i64(k)).collect();
    m.map(|e| e.shift_by(&s))
}

/// (P, q) with M = P/q, q the product of the distinct entry denominators.
pub fn clear_denominators<T: Coeff>(m: &FuncMat<T>) -> (Matrix<Poly<T>>, Poly<T>) {
    let mut dens: Vec<&Poly<T>> = Vec::new();
    for e in m.entries() {
        if !e.den().is_one() && !dens.contains(&e.den()) {
            dens.push(e.den());
        }
    }
    let q = dens.iter().fold(Poly::one(), |a, d| &a * *d);
    let p = m.map(|e| {
        let rest = q.div_exact(e.den()).expect("entry denominator divides the product");
        e.num() * &rest
    });
    (p, q)
}

/// First entry where two symbolic matrices differ as rational functions.
pub fn first_difference<T: Coeff>(a: &FuncMat<T>, b: &FuncMat<T>) -> Option<(usize, usize)> {
    for i in 0..a.rows() {
        for j in 0..a.cols() {
            if !a.get(i, j).equals(b.get(i, j)) {
                return Some((i, j));
            }
        }
    }
    None
}

pub fn matrices_equal<T: Coeff>(a: &FuncMat<T>, b: &FuncMat<T>) -> bool {
    a.rows() == b.rows() && a.cols() == b.cols() && first_difference(a, b).is_none()
}

fn format_point<T: Coeff>(pt: &[T]) -> String {
    format!("({})", pt.iter().map(|p| p.to_string()).collect::<Vec<_>>().join(", "))
}

fn permutations(items: &[usize]) -> Vec<Vec<usize>> {
    if items.len() <= 1 {
        return vec![items.to_vec()];
    }
    let mut out = Vec::new();
    for i in 0..items.len() {
        let mut rest = items.to_vec();
        let head = rest.remove(i);
        for mut p in permutations(&rest) {
            p.insert(0, head);
            out.push(p);
        }
    }
    out
}

/// Rank of a list of integer vectors (fraction-free elimination in i128).
fn integer_rank(vectors: &[Vec<i64>]) -> usize {
    let mut rows: Vec<Vec<i128>> = vectors.iter().map(|v| v.iter().map(|&x| x as i128).collect()).collect();
    let cols = rows.first().map_or(0, Vec::len);
    let mut rank = 0;
    for c in 0..cols {
        let Some(p) = (rank..rows.len()).find(|&r| rows[r][c] != 0) else { continue };
        rows.swap(rank, p);
        for r in 0..rows.len() {
            if r != rank && rows[r][c] != 0 {
                let (a, b) = (rows[rank][c], rows[r][c]);
                for k in 0..cols {
                    rows[r][k] = rows[r][k] * a - rows[rank][k] * b;
                }
                let g = rows[r].iter().fold(0i128, |g, &x| num_integer::gcd(g, x));
                if g > 1 {
                    rows[r].iter_mut().for_each(|x| *x /= g);
                }
            }
        }
        rank += 1;
    }
    rank
}

/// Lifts a numeric matrix to constant rational functions.
pub fn constant_matrix<T: Coeff>(m: &Matrix<T>) -> FuncMat<T> {
    m.map(|c| RationalFunction::constant(c.clone()))
}

/// Evaluates a symbolic matrix at a point.
pub fn eval_matrix<T: Coeff>(m: &FuncMat<T>, x: &[T]) -> Result<Matrix<T>> {
    m.try_map(|e| e.eval(x))
}

pub fn is_identity<T: Coeff>(m: &FuncMat<T>) -> bool {
    matrices_equal(m, &Matrix::identity(m.rows()))
}
