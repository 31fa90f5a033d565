//! CMFs from closed-form recipes: the pFq construction and the builtin catalog.

use std::collections::BTreeMap;
use std::sync::OnceLock;

use num_traits::{One, Zero};

use crate::cmf_core::{matrices_equal, shift_matrix, Cmf, FuncMat};
use crate::error::{Error, Result};
use crate::exprio::{load_cmf, CmfDocument};
use crate::matrix::Matrix;
use crate::ratfunc::RationalFunction;
use crate::scalar::Coeff;
use crate::{BigRat, ExactCmf, RatMat};

/// The argument z of a pFq field.
#[derive(Clone, Debug, PartialEq)]
pub enum PfqZ<T> {
    /// z stays a parameter named `z`.
    Symbolic,
    Value(T),
}

#[derive(Clone, Debug, PartialEq)]
pub struct PfqSpec<T> {
    pub p: usize,
    pub q: usize,
    pub z: PfqZ<T>,
}

impl<T: Coeff> PfqSpec<T> {
    pub fn symbolic(p: usize, q: usize) -> Self {
        PfqSpec { p, q, z: PfqZ::Symbolic }
    }

    pub fn at(p: usize, q: usize, z: T) -> Self {
        PfqSpec { p, q, z: PfqZ::Value(z) }
    }

    pub fn rank(&self) -> usize {
        self.p.max(self.q + 1)
    }

    fn validate(&self) -> Result<()> {
        if self.p + self.q == 0 {
            return Err(Error::InvalidPfq("need at least one parameter".into()));
        }
        if let PfqZ::Value(z) = &self.z {
            if z.is_zero() || z.is_one() {
                return Err(Error::InvalidPfq(format!("z = {z} is not allowed")));
            }
        }
        Ok(())
    }
}

/// A pFq CMF together with its θ_z matrix.
#[derive(Clone, Debug)]
pub struct PfqCmf<T: Coeff> {
    pub cmf: Cmf<T>,
    pub m_theta: FuncMat<T>,
}

type RF<T> = RationalFunction<T>;

/// Multiplies a θ-polynomial (ascending coefficients) by (θ + c).
fn mul_linear<T: Coeff>(poly: &[RF<T>], c: &RF<T>) -> Vec<RF<T>> {
    let mut out = vec![RF::zero(); poly.len() + 1];
    for (k, a) in poly.iter().enumerate() {
        out[k + 1] = &out[k + 1] + a;
        out[k] = &out[k] + &(a * c);
    }
    out
}

/// Builds the pFq CMF in variables x1..x_{p+q}; upper parameters come first.
pub fn pfq_cmf<T: Coeff>(spec: &PfqSpec<T>) -> Result<PfqCmf<T>> {
    spec.validate()?;
    let (p, q) = (spec.p, spec.q);
    let d = p + q;
    let z: RF<T> = match &spec.z {
        PfqZ::Symbolic => RF::var(d),
        PfqZ::Value(v) => RF::constant(v.clone()),
    };
    let x = |i: usize| RF::<T>::var(i);
    let one = RF::<T>::one();

    // θ Π (θ + x_{p+j} − 1) − z Π (θ + x_i)
    let mut lower = vec![RF::zero(), one.clone()];
    for j in 0..q {
        lower = mul_linear(&lower, &(&x(p + j) - &one));
    }
    let mut upper = vec![one.clone()];
    for i in 0..p {
        upper = mul_linear(&upper, &x(i));
    }
    let r = spec.rank();
    let mut c = vec![RF::zero(); r + 1];
    for (k, a) in lower.iter().enumerate() {
        c[k] = &c[k] + a;
    }
    for (k, a) in upper.iter().enumerate() {
        c[k] = &c[k] - &(&z * a);
    }
    let lead = c[r].clone();

    let mut theta = Matrix::zeros(r, r);
    for i in 1..r {
        theta.set(i, i - 1, one.clone());
    }
    for (k, ck) in c.iter().take(r).enumerate() {
        theta.set(k, r - 1, -ck.checked_div(&lead)?);
    }

    let id: FuncMat<T> = Matrix::identity(r);
    let mut gens = Vec::with_capacity(d);
    for i in 0..p {
        gens.push(&theta.scale(&x(i).inv()?) + &id);
    }
    for j in 0..q {
        let axis = p + j;
        let neg = &theta.scale(&(&x(axis) - &one).inv()?) + &id;
        let mut e = vec![0; d];
        e[axis] = 1;
        gens.push(shift_matrix(&neg, &e).inverse()?);
    }
    let variables = (1..=d).map(|i| format!("x{i}")).collect();
    let parameters = match spec.z {
        PfqZ::Symbolic => vec!["z".to_string()],
        PfqZ::Value(_) => Vec::new(),
    };
    let mut cmf = Cmf::new(format!("pfq{p}{q}"), variables, parameters, gens)?;
    if let Err(f) = cmf.verify() {
        return Err(Error::InvalidPfq(format!("construction fails the cocycle check at pair ({}, {})", f.i, f.j)));
    }
    Ok(PfqCmf { cmf, m_theta: theta })
}

/// Whether M_i·σ_i(M_θ) = θ_z(M_i) + M_θ·M_i for every generator.
pub fn gauge_check<T: Coeff>(cmf: &Cmf<T>, m_theta: &FuncMat<T>, zvar: &str) -> Result<bool> {
    let names = cmf.names();
    let zi = names
        .iter()
        .position(|n| n == zvar)
        .ok_or_else(|| Error::UnknownVariable { name: zvar.to_string(), pos: 0 })?;
    if m_theta.rows() != cmf.rank() || !m_theta.is_square() {
        return Err(Error::DimensionMismatch("M_theta has the wrong size".into()));
    }
    for i in 0..cmf.dim() {
        let mut e = vec![0; cmf.dim()];
        e[i] = 1;
        let g = cmf.generator(i);
        let lhs = g * &shift_matrix(m_theta, &e);
        let rhs = &g.map(|f| f.euler(zi)) + &(m_theta * g);
        if !matrices_equal(&lhs, &rhs) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// A catalog entry: a verified CMF with its named auxiliary matrices.
#[derive(Clone, Debug)]
pub struct Builtin {
    pub cmf: ExactCmf,
    pub aux: BTreeMap<String, RatMat>,
    pub description: String,
}

const CORPUS: &[(&str, &str)] = &[
    ("zeta3", include_str!("../corpus/v1/zeta3.toml")),
    ("const3x3", include_str!("../corpus/v1/const3x3.toml")),
    ("tricomi", include_str!("../corpus/v1/tricomi.toml")),
    ("binomial", include_str!("../corpus/v1/binomial.toml")),
    ("pfq21_zm1", include_str!("../corpus/v1/pfq21_zm1.toml")),
    ("appendixB", include_str!("../corpus/v1/appendixB.toml")),
    ("apery_coboundary_A", include_str!("../corpus/v1/apery_coboundary_A.toml")),
    ("ex312_coboundary", include_str!("../corpus/v1/ex312_coboundary.toml")),
];

pub fn builtin_names() -> Vec<&'static str> {
    CORPUS.iter().map(|(n, _)| *n).collect()
}

/// The corpus document of a builtin.
pub fn builtin_document(name: &str) -> Result<CmfDocument> {
    let (_, text) = CORPUS.iter().find(|(n, _)| *n == name).ok_or_else(|| Error::UnknownBuiltin(name.to_string()))?;
    CmfDocument::from_toml(text)
}

/// Loads and verifies a builtin. Results are cached per process.
pub fn builtin(name: &str) -> Result<Builtin> {
    static CACHE: [OnceLock<Builtin>; 8] = [const { OnceLock::new() }; 8];
    let idx = CORPUS.iter().position(|(n, _)| *n == name).ok_or_else(|| Error::UnknownBuiltin(name.to_string()))?;
    if let Some(b) = CACHE[idx].get() {
        return Ok(b.clone());
    }
    let b = load_builtin(name)?;
    Ok(CACHE[idx].get_or_init(|| b).clone())
}

fn load_builtin(name: &str) -> Result<Builtin> {
    let doc = builtin_document(name)?;
    let mut cmf: ExactCmf = load_cmf(&doc)?;
    if let Err(f) = cmf.verify() {
        return Err(Error::Document(format!(
            "builtin `{name}` fails the cocycle check at pair ({}, {}), entry ({}, {})",
            f.i, f.j, f.row, f.col
        )));
    }
    let mut aux = BTreeMap::new();
    for a in &doc.aux {
        aux.insert(a.name.clone(), doc.aux_matrix::<BigRat>(&a.name)?.expect("listed aux matrix"));
    }
    Ok(Builtin { cmf, aux, description: doc.description })
}
