//! Exact arithmetic in `K = Q[X]/<P>` together with its complex embeddings.
//!
//! Elements are coordinate vectors in a user-chosen integral basis (the power
//! basis `1, a, ..., a^(n-1)` by default). Multiplication goes through the
//! power basis and reduction by `P`; everything on this side is exact. Only
//! [`EmbeddingTable`] and [`NumberField::sigma`] are floating point.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::poly::{irreducible_mod_p, q_to_f64, small_primes, IntPoly, QPoly, Q};
use crate::qmat::QMatrix;
use crate::roots::durand_kerner;
use crate::tol;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FieldError {
    #[error("polynomial is not monic")]
    NonMonic,
    #[error("polynomial degree must be at least 2")]
    DegreeTooSmall,
    #[error("polynomial is not squarefree")]
    NotSquarefree,
    #[error("basis must be an n x n matrix for n = {0}")]
    BasisShape(usize),
    #[error("basis matrix is singular")]
    SingularBasis,
    #[error("basis does not contain 1")]
    BasisMissingOne,
    #[error("basis is not closed under multiplication: product of elements {0} and {1} has non-integral coordinates")]
    BasisNotRing(usize, usize),
    #[error("root finding did not converge or produced inconsistent roots: {0}")]
    RootFindingFailed(String),
    #[error("root {0} lies in the guard band between real and complex")]
    AmbiguousRealComplexSplit(Complex64),
    #[error("minimal polynomial methods disagree: {0} vs {1}")]
    OracleMismatch(String, String),
    #[error("element has {got} coordinates, field degree is {expected}")]
    Dimension { expected: usize, got: usize },
    #[error("element is not invertible")]
    NotInvertible,
}

/// Coordinates of an element of K in the field's integral basis.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FieldElement {
    coords: Vec<Q>,
}

impl FieldElement {
    pub fn new(coords: Vec<Q>) -> Self {
        Self { coords }
    }

    pub fn from_i64(coords: &[i64]) -> Self {
        Self::new(coords.iter().map(|&c| Q::from_integer(c.into())).collect())
    }

    pub fn zero(n: usize) -> Self {
        Self::new(vec![Q::zero(); n])
    }

    pub fn coords(&self) -> &[Q] {
        &self.coords
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    /// An element is an algebraic integer iff its coordinates in an integral
    /// basis are integers.
    pub fn is_integral(&self) -> bool {
        self.coords.iter().all(|c| c.is_integer())
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(Zero::is_zero)
    }

    pub fn add(&self, other: &FieldElement) -> FieldElement {
        FieldElement::new(
            self.coords
                .iter()
                .zip(&other.coords)
                .map(|(a, b)| a + b)
                .collect(),
        )
    }

    pub fn sub(&self, other: &FieldElement) -> FieldElement {
        FieldElement::new(
            self.coords
                .iter()
                .zip(&other.coords)
                .map(|(a, b)| a - b)
                .collect(),
        )
    }

    pub fn neg(&self) -> FieldElement {
        FieldElement::new(self.coords.iter().map(|a| -a).collect())
    }

    pub fn scale(&self, k: &Q) -> FieldElement {
        FieldElement::new(self.coords.iter().map(|a| a * k).collect())
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.coords.iter().map(q_to_f64).collect()
    }

    /// Coordinates as JSON-friendly values: integers where they fit,
    /// `"p/q"` strings otherwise.
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::Value::Array(
            self.coords
                .iter()
                .map(|c| match (c.is_integer(), c.to_integer().to_i64()) {
                    (true, Some(v)) => serde_json::Value::from(v),
                    _ => serde_json::Value::from(c.to_string()),
                })
                .collect(),
        )
    }
}

/// Outcome of the mod-p irreducibility search.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Irreducibility {
    /// `P mod prime` is irreducible, hence so is `P` over Q.
    Certified { prime: u64 },
    /// No prime up to the search bound works; `P` may be reducible.
    Unverified,
}

pub const WITNESS_PRIME_BOUND: u64 = 101;

/// Roots of the defining polynomial in the conventional order: real roots
/// descending, then the complex roots with positive imaginary part sorted by
/// real part, then their conjugates in the same order.
#[derive(Clone, Debug, PartialEq)]
pub struct EmbeddingTable {
    values: Vec<Complex64>,
    s: usize,
    t: usize,
    tol: f64,
}

impl EmbeddingTable {
    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn s(&self) -> usize {
        self.s
    }

    pub fn t(&self) -> usize {
        self.t
    }

    pub fn n(&self) -> usize {
        self.values.len()
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    pub fn signature(&self) -> (usize, usize) {
        (self.s, self.t)
    }

    /// Real value of the i-th real embedding (0-based, `i < s`).
    pub fn real(&self, i: usize) -> f64 {
        debug_assert!(i < self.s);
        self.values[i].re
    }

    /// Minimum pairwise distance between embedding values.
    pub fn min_separation(&self) -> f64 {
        let mut best = f64::INFINITY;
        for i in 0..self.values.len() {
            for j in i + 1..self.values.len() {
                best = best.min((self.values[i] - self.values[j]).norm());
            }
        }
        best
    }
}

/// Roots of `p` with signature and ordering per [`EmbeddingTable`].
pub fn compute_embeddings(p: &IntPoly, tol: f64) -> Result<EmbeddingTable, FieldError> {
    let coeffs = p.to_f64();
    let out = durand_kerner(&coeffs).ok_or_else(|| {
        FieldError::RootFindingFailed(format!(
            "no convergence after {} iterations",
            crate::roots::MAX_ITERATIONS
        ))
    })?;

    let mut reals = Vec::new();
    let mut uppers = Vec::new();
    let mut lowers = Vec::new();
    for z in out.roots {
        let scale: f64 = coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| c.abs() * z.norm().powi(i as i32))
            .sum();
        let residual = crate::poly::horner(&coeffs, z).norm();
        if residual > tol * scale {
            return Err(FieldError::RootFindingFailed(format!(
                "residual {residual:e} at {z} exceeds tolerance"
            )));
        }
        let rel = z.im.abs() / (1.0 + z.norm());
        if rel < tol::REAL_SPLIT {
            reals.push(z.re);
        } else if rel < tol::REAL_GUARD {
            return Err(FieldError::AmbiguousRealComplexSplit(z));
        } else if z.im > 0.0 {
            uppers.push(z);
        } else {
            lowers.push(z);
        }
    }
    if uppers.len() != lowers.len() {
        return Err(FieldError::RootFindingFailed(
            "complex roots do not pair into conjugates".into(),
        ));
    }
    for u in &uppers {
        let (k, d) = lowers
            .iter()
            .enumerate()
            .map(|(k, w)| (k, (w - u.conj()).norm()))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .expect("non-empty");
        if d > tol.sqrt() * (1.0 + u.norm()) {
            return Err(FieldError::RootFindingFailed(format!(
                "no conjugate found for {u}"
            )));
        }
        lowers.swap_remove(k);
    }
    reals.sort_by(|a, b| b.total_cmp(a));
    uppers.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));

    let s = reals.len();
    let t = uppers.len();
    let mut values: Vec<Complex64> = reals.into_iter().map(|r| Complex64::new(r, 0.0)).collect();
    values.extend(uppers.iter().copied());
    values.extend(uppers.iter().map(|z| z.conj()));

    let table = EmbeddingTable { values, s, t, tol };
    let sep = table.min_separation();
    if sep <= tol {
        return Err(FieldError::RootFindingFailed(format!(
            "roots separated by only {sep:e}"
        )));
    }
    Ok(table)
}

/// A number field with a validated integral basis and its embeddings.
#[derive(Clone, Debug)]
pub struct NumberField {
    min_poly: IntPoly,
    min_poly_q: QPoly,
    basis: QMatrix,
    basis_inv: QMatrix,
    power_basis: bool,
    embeddings: EmbeddingTable,
    irreducibility: Irreducibility,
    one: FieldElement,
}

/// Validates `p` and the integral basis (columns in power-basis coordinates;
/// `None` selects the power basis) and computes the embeddings with the
/// default tolerance.
pub fn validate_field(p: &IntPoly, basis: Option<QMatrix>) -> Result<NumberField, FieldError> {
    let n = match p.degree() {
        Some(d) if d >= 2 => d,
        _ => return Err(FieldError::DegreeTooSmall),
    };
    if !p.is_monic() {
        return Err(FieldError::NonMonic);
    }
    let min_poly_q = p.to_qpoly();
    if !min_poly_q.is_squarefree() {
        return Err(FieldError::NotSquarefree);
    }

    let power_basis = basis.is_none();
    let basis = basis.unwrap_or_else(|| QMatrix::identity(n));
    if basis.rows() != n || basis.cols() != n {
        return Err(FieldError::BasisShape(n));
    }
    let basis_inv = basis.inverse().ok_or(FieldError::SingularBasis)?;

    let mut e0 = vec![Q::zero(); n];
    e0[0] = Q::one();
    let one_col = (0..n)
        .find(|&j| basis.column(j) == e0)
        .ok_or(FieldError::BasisMissingOne)?;
    let mut one = vec![Q::zero(); n];
    one[one_col] = Q::one();

    let cols: Vec<Vec<Q>> = (0..n).map(|j| basis.column(j)).collect();
    for i in 0..n {
        for j in i..n {
            let prod = mulmod(&min_poly_q, &cols[i], &cols[j], n);
            if !basis_inv.mul_vec(&prod).iter().all(|c| c.is_integer()) {
                return Err(FieldError::BasisNotRing(i, j));
            }
        }
    }

    let irreducibility = small_primes(WITNESS_PRIME_BOUND)
        .into_iter()
        .find(|&q| irreducible_mod_p(p, q))
        .map_or(Irreducibility::Unverified, |prime| Irreducibility::Certified {
            prime,
        });

    let embeddings = compute_embeddings(p, tol::EMBEDDING)?;

    Ok(NumberField {
        min_poly: p.clone(),
        min_poly_q,
        basis,
        basis_inv,
        power_basis,
        embeddings,
        irreducibility,
        one: FieldElement::new(one),
    })
}

/// Embeddings of `field` recomputed at tolerance `tol`.
pub fn embeddings(field: &NumberField, tol: f64) -> Result<EmbeddingTable, FieldError> {
    compute_embeddings(&field.min_poly, tol)
}

fn mulmod(p: &QPoly, a: &[Q], b: &[Q], n: usize) -> Vec<Q> {
    let prod = QPoly::new(a.to_vec()).mul(&QPoly::new(b.to_vec()));
    let (_, r) = prod.div_rem(p);
    (0..n).map(|i| r.coeff(i)).collect()
}

impl NumberField {
    pub fn degree(&self) -> usize {
        self.min_poly.degree().unwrap()
    }

    pub fn min_poly(&self) -> &IntPoly {
        &self.min_poly
    }

    pub fn basis(&self) -> &QMatrix {
        &self.basis
    }

    pub fn is_power_basis(&self) -> bool {
        self.power_basis
    }

    pub fn embedding_table(&self) -> &EmbeddingTable {
        &self.embeddings
    }

    pub fn signature(&self) -> (usize, usize) {
        self.embeddings.signature()
    }

    pub fn irreducibility(&self) -> Irreducibility {
        self.irreducibility
    }

    pub fn one(&self) -> FieldElement {
        self.one.clone()
    }

    pub fn zero(&self) -> FieldElement {
        FieldElement::zero(self.degree())
    }

    /// The element `X mod P`.
    pub fn generator(&self) -> FieldElement {
        let n = self.degree();
        let mut x = vec![Q::zero(); n];
        x[1] = Q::one();
        self.from_power(&x)
    }

    pub fn from_int(&self, k: i64) -> FieldElement {
        self.one.scale(&Q::from_integer(k.into()))
    }

    pub fn element(&self, coords: &[i64]) -> Result<FieldElement, FieldError> {
        self.check_dim(&FieldElement::from_i64(coords))
    }

    pub fn check_dim(&self, x: &FieldElement) -> Result<FieldElement, FieldError> {
        if x.dim() != self.degree() {
            return Err(FieldError::Dimension {
                expected: self.degree(),
                got: x.dim(),
            });
        }
        Ok(x.clone())
    }

    /// Power-basis coordinates of `x`.
    pub fn to_power(&self, x: &FieldElement) -> Vec<Q> {
        self.basis.mul_vec(x.coords())
    }

    pub fn from_power(&self, p: &[Q]) -> FieldElement {
        FieldElement::new(self.basis_inv.mul_vec(p))
    }

    pub fn mul(&self, a: &FieldElement, b: &FieldElement) -> FieldElement {
        let n = self.degree();
        let prod = mulmod(&self.min_poly_q, &self.to_power(a), &self.to_power(b), n);
        self.from_power(&prod)
    }

    /// Matrix of multiplication by `x` in the integral basis: column j holds
    /// the coordinates of `x * b_j`.
    pub fn mult_matrix(&self, x: &FieldElement) -> QMatrix {
        let n = self.degree();
        let cols: Vec<Vec<Q>> = (0..n)
            .map(|j| {
                let mut e = vec![Q::zero(); n];
                e[j] = Q::one();
                self.mul(x, &FieldElement::new(e)).coords
            })
            .collect();
        QMatrix::from_columns(&cols)
    }

    pub fn inverse(&self, x: &FieldElement) -> Result<FieldElement, FieldError> {
        let m = self.mult_matrix(x);
        m.solve_columns(self.one.coords())
            .map(FieldElement::new)
            .ok_or(FieldError::NotInvertible)
    }

    /// `x^k`; negative exponents go through the exact inverse.
    pub fn pow(&self, x: &FieldElement, k: i64) -> Result<FieldElement, FieldError> {
        let base = if k < 0 { self.inverse(x)? } else { x.clone() };
        let mut e = k.unsigned_abs();
        let mut acc = self.one();
        let mut b = base;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &b);
            }
            e >>= 1;
            if e > 0 {
                b = self.mul(&b, &b);
            }
        }
        Ok(acc)
    }

    /// Field norm, `det` of the multiplication matrix.
    pub fn norm(&self, x: &FieldElement) -> Q {
        let cp = self.char_poly_mult(x);
        let c0 = cp.coeff(0);
        if self.degree().is_multiple_of(2) {
            c0
        } else {
            -c0
        }
    }

    /// Characteristic polynomial of multiplication by `x`.
    pub fn char_poly_mult(&self, x: &FieldElement) -> QPoly {
        self.mult_matrix(x).char_poly()
    }

    /// Minimal polynomial of `x`, computed twice: as the radical of the
    /// characteristic polynomial (K is reduced, so the radical is the
    /// minimal polynomial) and as the first linear dependency among
    /// `1, x, x^2, ...`. The two must agree.
    pub fn min_poly_elt(&self, x: &FieldElement) -> Result<QPoly, FieldError> {
        let radical = self.char_poly_mult(x).squarefree_part();
        let dependency = self.min_poly_by_dependency(x);
        if radical != dependency {
            return Err(FieldError::OracleMismatch(
                radical.to_string(),
                dependency.to_string(),
            ));
        }
        Ok(radical)
    }

    /// Minimal polynomial from the first linear dependency among `1, x, x^2, ...`.
    pub fn min_poly_by_dependency(&self, x: &FieldElement) -> QPoly {
        let n = self.degree();
        let mut powers = vec![self.one.coords.clone()];
        let mut cur = self.one();
        for d in 1..=n {
            cur = self.mul(&cur, x);
            let m = QMatrix::from_columns(&powers);
            if let Some(c) = m.solve_columns(&cur.coords) {
                // x^d = sum c_i x^i
                let mut coeffs: Vec<Q> = c.into_iter().map(|v| -v).collect();
                coeffs.push(Q::one());
                debug_assert_eq!(coeffs.len(), d + 1);
                return QPoly::new(coeffs);
            }
            powers.push(cur.coords.clone());
        }
        unreachable!("powers 1..x^n are always dependent in a degree-n algebra")
    }

    /// `sigma_K(x)`: the value of `x` under every embedding.
    pub fn sigma(&self, x: &FieldElement) -> Vec<Complex64> {
        sigma_k(self, x, &self.embeddings)
    }
}

/// Evaluates `x` at every embedding in `table`.
pub fn sigma_k(field: &NumberField, x: &FieldElement, table: &EmbeddingTable) -> Vec<Complex64> {
    let p: Vec<f64> = field.to_power(x).iter().map(q_to_f64).collect();
    table
        .values()
        .iter()
        .map(|&z| crate::poly::horner(&p, z))
        .collect()
}

/// Whether every coefficient of `p` is an integer and the constant term is
/// a unit of Z.
pub fn has_unit_constant(p: &QPoly) -> bool {
    p.to_int_poly()
        .is_some_and(|ip| ip.coeffs().first().is_some_and(|c| c.abs() == BigInt::one()))
}
