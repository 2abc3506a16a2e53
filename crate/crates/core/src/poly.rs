//! Dense univariate polynomials over Z and Q, plus small prime-field helpers.
//!
//! Coefficients are stored constant term first. Both types keep themselves
//! normalized: no trailing zero coefficients, and the zero polynomial is the
//! empty vector.

use std::fmt;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

pub type Q = BigRational;

/// Integer polynomial, constant term first.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(into = "Vec<i64>", from = "Vec<i64>")]
pub struct IntPoly {
    coeffs: Vec<BigInt>,
}

impl IntPoly {
    pub fn new(mut coeffs: Vec<BigInt>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn from_i64(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    /// Degree, or `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_monic(&self) -> bool {
        self.coeffs.last().is_some_and(One::is_one)
    }

    pub fn leading(&self) -> Option<&BigInt> {
        self.coeffs.last()
    }

    pub fn to_qpoly(&self) -> QPoly {
        QPoly::new(self.coeffs.iter().cloned().map(Q::from_integer).collect())
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.coeffs
            .iter()
            .map(|c| c.to_f64().unwrap_or(f64::NAN))
            .collect()
    }

    /// Coefficients as machine integers, if they all fit.
    pub fn to_i64(&self) -> Option<Vec<i64>> {
        self.coeffs.iter().map(ToPrimitive::to_i64).collect()
    }

    /// `X^deg * p(1/X)`: the coefficient list reversed.
    pub fn reversed(&self) -> IntPoly {
        let mut c = self.coeffs.clone();
        c.reverse();
        IntPoly::new(c)
    }

    pub fn eval_complex(&self, z: Complex64) -> Complex64 {
        horner(&self.to_f64(), z)
    }
}

impl From<IntPoly> for Vec<i64> {
    fn from(p: IntPoly) -> Self {
        p.to_i64()
            .expect("integer polynomial coefficients exceed i64 range")
    }
}

impl From<Vec<i64>> for IntPoly {
    fn from(v: Vec<i64>) -> Self {
        IntPoly::from_i64(&v)
    }
}

impl fmt::Display for IntPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_terms(f, self.coeffs.iter().map(|c| Q::from_integer(c.clone())))
    }
}

/// Rational polynomial, constant term first.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QPoly {
    coeffs: Vec<Q>,
}

impl QPoly {
    pub fn new(mut coeffs: Vec<Q>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Self::new(vec![Q::one()])
    }

    pub fn from_i64(coeffs: &[i64]) -> Self {
        Self::new(
            coeffs
                .iter()
                .map(|&c| Q::from_integer(BigInt::from(c)))
                .collect(),
        )
    }

    /// `X - r`
    pub fn linear(r: Q) -> Self {
        Self::new(vec![-r, Q::one()])
    }

    pub fn coeffs(&self) -> &[Q] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> Q {
        self.coeffs.get(i).cloned().unwrap_or_else(Q::zero)
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn leading(&self) -> Option<&Q> {
        self.coeffs.last()
    }

    pub fn monic(&self) -> QPoly {
        match self.leading() {
            None => QPoly::zero(),
            Some(lc) => {
                let lc = lc.clone();
                QPoly::new(self.coeffs.iter().map(|c| c / &lc).collect())
            }
        }
    }

    pub fn derivative(&self) -> QPoly {
        QPoly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * Q::from_integer(BigInt::from(i)))
                .collect(),
        )
    }

    pub fn add(&self, other: &QPoly) -> QPoly {
        let n = self.coeffs.len().max(other.coeffs.len());
        QPoly::new((0..n).map(|i| self.coeff(i) + other.coeff(i)).collect())
    }

    pub fn sub(&self, other: &QPoly) -> QPoly {
        let n = self.coeffs.len().max(other.coeffs.len());
        QPoly::new((0..n).map(|i| self.coeff(i) - other.coeff(i)).collect())
    }

    pub fn mul(&self, other: &QPoly) -> QPoly {
        if self.is_zero() || other.is_zero() {
            return QPoly::zero();
        }
        let mut out = vec![Q::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        QPoly::new(out)
    }

    pub fn scale(&self, k: &Q) -> QPoly {
        QPoly::new(self.coeffs.iter().map(|c| c * k).collect())
    }

    /// Euclidean division. Panics on division by the zero polynomial.
    pub fn div_rem(&self, divisor: &QPoly) -> (QPoly, QPoly) {
        let dd = divisor.degree().expect("division by zero polynomial");
        let lc = divisor.leading().unwrap().clone();
        let mut rem = self.coeffs.clone();
        let Some(nd) = self.degree() else {
            return (QPoly::zero(), QPoly::zero());
        };
        if nd < dd {
            return (QPoly::zero(), self.clone());
        }
        let mut quot = vec![Q::zero(); nd - dd + 1];
        for k in (0..=nd - dd).rev() {
            let c = &rem[k + dd] / &lc;
            if c.is_zero() {
                continue;
            }
            for (j, d) in divisor.coeffs.iter().enumerate() {
                rem[k + j] -= &c * d;
            }
            quot[k] = c;
        }
        rem.truncate(dd);
        (QPoly::new(quot), QPoly::new(rem))
    }

    /// Monic greatest common divisor.
    pub fn gcd(&self, other: &QPoly) -> QPoly {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    /// Radical: the product of the distinct monic irreducible factors.
    pub fn squarefree_part(&self) -> QPoly {
        let g = self.gcd(&self.derivative());
        self.div_rem(&g).0.monic()
    }

    pub fn is_squarefree(&self) -> bool {
        self.gcd(&self.derivative()).degree() == Some(0)
    }

    /// Integer coefficients, when every coefficient is integral.
    pub fn to_int_poly(&self) -> Option<IntPoly> {
        self.coeffs
            .iter()
            .map(|c| c.is_integer().then(|| c.to_integer()))
            .collect::<Option<Vec<_>>>()
            .map(IntPoly::new)
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.coeffs.iter().map(q_to_f64).collect()
    }

    pub fn eval(&self, x: &Q) -> Q {
        self.coeffs
            .iter()
            .rev()
            .fold(Q::zero(), |acc, c| acc * x + c)
    }

    pub fn eval_complex(&self, z: Complex64) -> Complex64 {
        horner(&self.to_f64(), z)
    }

    /// `p(a + bX)` by Horner composition.
    pub fn compose_linear(&self, a: &Q, b: &Q) -> QPoly {
        let inner = QPoly::new(vec![a.clone(), b.clone()]);
        self.coeffs.iter().rev().fold(QPoly::zero(), |acc, c| {
            acc.mul(&inner).add(&QPoly::new(vec![c.clone()]))
        })
    }
}

impl fmt::Display for QPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_terms(f, self.coeffs.iter().cloned())
    }
}

fn fmt_terms(f: &mut fmt::Formatter<'_>, coeffs: impl DoubleEndedIterator<Item = Q> + ExactSizeIterator) -> fmt::Result {
    let n = coeffs.len();
    if n == 0 {
        return write!(f, "0");
    }
    let mut first = true;
    for (i, c) in coeffs.enumerate().collect::<Vec<_>>().into_iter().rev() {
        if c.is_zero() {
            continue;
        }
        let neg = c.is_negative();
        let mag = c.abs();
        if first {
            if neg {
                write!(f, "-")?;
            }
        } else {
            write!(f, " {} ", if neg { '-' } else { '+' })?;
        }
        first = false;
        let show_mag = i == 0 || !mag.is_one();
        if show_mag {
            write!(f, "{mag}")?;
        }
        match i {
            0 => {}
            1 => write!(f, "X")?,
            _ => write!(f, "X^{i}")?,
        }
    }
    Ok(())
}

pub fn q_to_f64(q: &Q) -> f64 {
    q.to_f64().unwrap_or_else(|| {
        // numerator/denominator outside f64 range: scale both down
        let shift = q.numer().bits().max(q.denom().bits()).saturating_sub(1000);
        let n = (q.numer() >> shift).to_f64().unwrap_or(f64::NAN);
        let d = (q.denom() >> shift).to_f64().unwrap_or(f64::NAN);
        n / d
    })
}

pub fn horner(coeffs: &[f64], z: Complex64) -> Complex64 {
    coeffs
        .iter()
        .rev()
        .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c)
}

// ---------------------------------------------------------------------------
// Polynomials over F_p, p < 2^31, used only for irreducibility witnesses.

type Fp = Vec<u64>;

fn fp_norm(mut a: Fp) -> Fp {
    while a.last() == Some(&0) {
        a.pop();
    }
    a
}

fn fp_inv(a: u64, p: u64) -> u64 {
    // Fermat: a^(p-2)
    let (mut base, mut exp, mut acc) = (a % p, p - 2, 1u64);
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * base % p;
        }
        base = base * base % p;
        exp >>= 1;
    }
    acc
}

fn fp_rem(a: &[u64], m: &[u64], p: u64) -> Fp {
    let mut r = a.to_vec();
    let dm = m.len() - 1;
    let inv = fp_inv(m[dm], p);
    while r.len() > dm && !r.is_empty() {
        let top = r.len() - 1;
        let c = r[top] * inv % p;
        if c != 0 {
            for (j, &mj) in m.iter().enumerate() {
                let idx = top - dm + j;
                r[idx] = (r[idx] + p - c * mj % p) % p;
            }
        }
        r.pop();
        r = fp_norm(r);
    }
    fp_norm(r)
}

fn fp_mulmod(a: &[u64], b: &[u64], m: &[u64], p: u64) -> Fp {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = (out[i + j] + x * y) % p;
        }
    }
    fp_rem(&out, m, p)
}

fn fp_powmod(base: &[u64], mut exp: u64, m: &[u64], p: u64) -> Fp {
    let mut acc: Fp = vec![1];
    let mut b = fp_rem(base, m, p);
    while exp > 0 {
        if exp & 1 == 1 {
            acc = fp_mulmod(&acc, &b, m, p);
        }
        b = fp_mulmod(&b, &b, m, p);
        exp >>= 1;
    }
    acc
}

fn fp_gcd(a: &[u64], b: &[u64], p: u64) -> Fp {
    let (mut a, mut b) = (fp_norm(a.to_vec()), fp_norm(b.to_vec()));
    while !b.is_empty() {
        let r = fp_rem(&a, &b, p);
        a = b;
        b = r;
    }
    a
}

/// Whether `f` stays irreducible after reduction mod the prime `p`.
///
/// Ben-Or's test: `f` of degree n is irreducible over F_p iff
/// `gcd(X^(p^i) - X, f) = 1` for every `i <= n/2`. The leading coefficient
/// must not vanish mod `p`.
pub fn irreducible_mod_p(f: &IntPoly, p: u64) -> bool {
    let pz = BigInt::from(p);
    let m: Fp = f
        .coeffs()
        .iter()
        .map(|c| {
            let r = ((c % &pz) + &pz) % &pz;
            r.to_u64().unwrap()
        })
        .collect();
    let m = fp_norm(m);
    let Some(n) = m.len().checked_sub(1) else {
        return false;
    };
    if n != f.degree().unwrap_or(0) || n == 0 {
        return false;
    }
    if n == 1 {
        return true;
    }
    let x: Fp = vec![0, 1];
    let mut xp = x.clone();
    for _ in 1..=n / 2 {
        xp = fp_powmod(&xp, p, &m, p);
        // xp - X
        let mut diff = xp.clone();
        diff.resize(diff.len().max(2), 0);
        diff[1] = (diff[1] + p - 1) % p;
        let g = fp_gcd(&m, &fp_norm(diff), p);
        if g.len() > 1 {
            return false;
        }
    }
    true
}

pub fn small_primes(limit: u64) -> Vec<u64> {
    (2..=limit)
        .filter(|&k| (2..k).take_while(|d| d * d <= k).all(|d| k % d != 0))
        .collect()
}
