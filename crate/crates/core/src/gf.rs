//! Finite fields GF(p^n) in a polynomial basis.
//!
//! An element is stored as the integer `c_0 + c_1 p + ... + c_{n-1} p^{n-1}`
//! where `c_i` are its coordinates with respect to `1, x, ..., x^{n-1}` modulo
//! the field's defining polynomial. Zero encodes as 0 and one as 1, so
//! enumeration in encoding order starts `0, 1, ...`.
//!
//! Fields of order up to 256 cache addition and multiplication tables;
//! larger fields (up to 2^16) compute products by polynomial reduction.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::numth;

/// Largest supported field order.
pub const MAX_ORDER: u64 = 1 << 16;
const TABLE_LIMIT: u32 = 256;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GfError {
    #[error("{0} is not prime")]
    NotPrime(u32),
    #[error("extension degree must be at least 1")]
    ZeroDegree,
    #[error("field order {p}^{n} exceeds the supported bound 2^16")]
    TooLarge { p: u32, n: u32 },
    #[error("modulus is not a monic irreducible polynomial of degree {0} over the prime field")]
    BadModulus(usize),
    #[error("no irreducible modulus found for GF({p}^{n})")]
    NoModulus { p: u32, n: u32 },
    #[error("division by zero")]
    DivisionByZero,
    #[error("operands belong to different fields")]
    MixedFields,
    #[error("value {0} does not encode an element of this field")]
    NotAnElement(u32),
    #[error("operation {0:?} needs a second operand")]
    MissingOperand(ArithOp),
}

/// A field element in polynomial-basis encoding. Only meaningful together
/// with the [`Gf`] it came from.
#[derive(
    Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize,
)]
#[serde(transparent)]
pub struct Fe(pub(crate) u32);

impl Fe {
    pub const ZERO: Fe = Fe(0);
    pub const ONE: Fe = Fe(1);

    pub fn value(self) -> u32 {
        self.0
    }

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

impl fmt::Display for Fe {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

struct Tables {
    add: Vec<u32>,
    mul: Vec<u32>,
    neg: Vec<u32>,
    inv: Vec<u32>,
}

struct Inner {
    p: u32,
    n: u32,
    q: u32,
    /// Monic, constant term first, length n + 1.
    modulus: Vec<u32>,
    tables: Option<Tables>,
    /// x -> x^p
    frob: Vec<u32>,
}

/// A finite field GF(p^n). Cheap to clone; clones share storage.
#[derive(Clone)]
pub struct Gf(Arc<Inner>);

impl PartialEq for Gf {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
            || (self.0.p == other.0.p && self.0.modulus == other.0.modulus)
    }
}

impl Eq for Gf {}

impl fmt::Debug for Gf {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GF({}^{}; {:?})", self.0.p, self.0.n, self.0.modulus)
    }
}

impl fmt::Display for Gf {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GF({})", self.0.q)
    }
}

impl Gf {
    /// GF(p^n) with the lexicographically least monic irreducible modulus,
    /// comparing coefficient lists constant term first.
    pub fn new(p: u32, n: u32) -> Result<Gf, GfError> {
        check_params(p, n)?;
        let n_us = n as usize;
        let total = (p as u64).pow(n);
        for idx in 0..total {
            // digit k of idx is coefficient c_{n-1-k}: c_0 is the most significant.
            let mut coeffs = vec![0u32; n_us + 1];
            let mut rest = idx;
            for k in 0..n_us {
                coeffs[n_us - 1 - k] = (rest % p as u64) as u32;
                rest /= p as u64;
            }
            coeffs[n_us] = 1;
            if n_us > 1 && coeffs[0] == 0 {
                continue;
            }
            if is_irreducible_mod_p(&coeffs, p) {
                return Ok(Gf::build(p, n, coeffs));
            }
        }
        Err(GfError::NoModulus { p, n })
    }

    /// GF(p^n) with an explicit monic irreducible modulus (constant term first).
    pub fn with_modulus(p: u32, modulus: &[u32]) -> Result<Gf, GfError> {
        if modulus.len() < 2 {
            return Err(GfError::BadModulus(modulus.len().saturating_sub(1)));
        }
        let n = (modulus.len() - 1) as u32;
        check_params(p, n)?;
        if *modulus.last().unwrap() != 1
            || modulus.iter().any(|&c| c >= p)
            || !is_irreducible_mod_p(modulus, p)
        {
            return Err(GfError::BadModulus(n as usize));
        }
        Ok(Gf::build(p, n, modulus.to_vec()))
    }

    fn build(p: u32, n: u32, modulus: Vec<u32>) -> Gf {
        let q = p.pow(n);
        let mut inner = Inner { p, n, q, modulus, tables: None, frob: Vec::new() };
        if q <= TABLE_LIMIT {
            let qs = q as usize;
            let mut add = vec![0u32; qs * qs];
            let mut mul = vec![0u32; qs * qs];
            let mut neg = vec![0u32; qs];
            let mut inv = vec![0u32; qs];
            for a in 0..q {
                neg[a as usize] = slow_neg(&inner, a);
                for b in 0..q {
                    add[a as usize * qs + b as usize] = slow_add(&inner, a, b);
                    let m = slow_mul(&inner, a, b);
                    mul[a as usize * qs + b as usize] = m;
                    if m == 1 {
                        inv[a as usize] = b;
                    }
                }
            }
            inner.tables = Some(Tables { add, mul, neg, inv });
        }
        let gf = Gf(Arc::new(inner));
        let frob: Vec<u32> = (0..q).map(|a| gf.pow(Fe(a), p as u64).0).collect();
        let mut inner = Arc::try_unwrap(gf.0).ok().expect("fresh field has a single owner");
        inner.frob = frob;
        Gf(Arc::new(inner))
    }

    pub fn p(&self) -> u32 {
        self.0.p
    }

    pub fn n(&self) -> u32 {
        self.0.n
    }

    /// Number of elements.
    pub fn q(&self) -> u32 {
        self.0.q
    }

    pub fn modulus(&self) -> &[u32] {
        &self.0.modulus
    }

    pub fn zero(&self) -> Fe {
        Fe::ZERO
    }

    pub fn one(&self) -> Fe {
        Fe::ONE
    }

    /// The class of `x`; generates the field over the prime field.
    /// For prime fields this is simply 1.
    pub fn generator(&self) -> Fe {
        if self.0.n == 1 {
            Fe::ONE
        } else {
            Fe(self.0.p)
        }
    }

    pub fn contains(&self, a: Fe) -> bool {
        a.0 < self.0.q
    }

    pub fn element(&self, v: u32) -> Result<Fe, GfError> {
        if v < self.0.q {
            Ok(Fe(v))
        } else {
            Err(GfError::NotAnElement(v))
        }
    }

    /// All elements in encoding order (zero first, then one).
    pub fn elements(&self) -> impl Iterator<Item = Fe> + Clone {
        (0..self.0.q).map(Fe)
    }

    /// Image of an integer in the prime subfield.
    pub fn from_int(&self, i: i64) -> Fe {
        Fe(i.rem_euclid(self.0.p as i64) as u32)
    }

    pub fn from_coeffs(&self, coeffs: &[u32]) -> Result<Fe, GfError> {
        if coeffs.len() > self.0.n as usize {
            return Err(GfError::NotAnElement(u32::MAX));
        }
        let mut v = 0u32;
        for &c in coeffs.iter().rev() {
            if c >= self.0.p {
                return Err(GfError::NotAnElement(c));
            }
            v = v * self.0.p + c;
        }
        Ok(Fe(v))
    }

    /// Polynomial-basis coordinates, constant term first, length n.
    pub fn coeffs(&self, a: Fe) -> Vec<u32> {
        let mut out = vec![0u32; self.0.n as usize];
        let mut v = a.0;
        for c in out.iter_mut() {
            *c = v % self.0.p;
            v /= self.0.p;
        }
        out
    }

    #[inline]
    pub fn add(&self, a: Fe, b: Fe) -> Fe {
        match &self.0.tables {
            Some(t) => Fe(t.add[a.0 as usize * self.0.q as usize + b.0 as usize]),
            None => Fe(slow_add(&self.0, a.0, b.0)),
        }
    }

    #[inline]
    pub fn neg(&self, a: Fe) -> Fe {
        match &self.0.tables {
            Some(t) => Fe(t.neg[a.0 as usize]),
            None => Fe(slow_neg(&self.0, a.0)),
        }
    }

    #[inline]
    pub fn sub(&self, a: Fe, b: Fe) -> Fe {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: Fe, b: Fe) -> Fe {
        match &self.0.tables {
            Some(t) => Fe(t.mul[a.0 as usize * self.0.q as usize + b.0 as usize]),
            None => Fe(slow_mul(&self.0, a.0, b.0)),
        }
    }

    pub fn inv(&self, a: Fe) -> Result<Fe, GfError> {
        if a.is_zero() {
            return Err(GfError::DivisionByZero);
        }
        Ok(match &self.0.tables {
            Some(t) => Fe(t.inv[a.0 as usize]),
            None => self.pow(a, self.0.q as u64 - 2),
        })
    }

    pub fn div(&self, a: Fe, b: Fe) -> Result<Fe, GfError> {
        Ok(self.mul(a, self.inv(b)?))
    }

    pub fn pow(&self, a: Fe, mut e: u64) -> Fe {
        let mut base = a;
        let mut acc = Fe::ONE;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    /// `a^(p^i)`, with `i` taken modulo n.
    pub fn frobenius(&self, a: Fe, i: u32) -> Fe {
        let mut v = a.0;
        for _ in 0..(i % self.0.n) {
            v = self.0.frob[v as usize];
        }
        Fe(v)
    }

    /// Nonzero elements in encoding order.
    pub fn units(&self) -> impl Iterator<Item = Fe> + Clone {
        (1..self.0.q).map(Fe)
    }
}

fn check_params(p: u32, n: u32) -> Result<(), GfError> {
    if !numth::is_prime(p as u64) {
        return Err(GfError::NotPrime(p));
    }
    if n == 0 {
        return Err(GfError::ZeroDegree);
    }
    match (p as u64).checked_pow(n) {
        Some(q) if q <= MAX_ORDER => Ok(()),
        _ => Err(GfError::TooLarge { p, n }),
    }
}

fn slow_add(f: &Inner, mut a: u32, mut b: u32) -> u32 {
    let p = f.p;
    let mut out = 0u32;
    let mut place = 1u32;
    for _ in 0..f.n {
        let d = (a % p + b % p) % p;
        out += d * place;
        place = place.wrapping_mul(p);
        a /= p;
        b /= p;
    }
    out
}

fn slow_neg(f: &Inner, mut a: u32) -> u32 {
    let p = f.p;
    let mut out = 0u32;
    let mut place = 1u32;
    for _ in 0..f.n {
        let d = (p - a % p) % p;
        out += d * place;
        place = place.wrapping_mul(p);
        a /= p;
    }
    out
}

fn slow_mul(f: &Inner, a: u32, b: u32) -> u32 {
    let p = f.p as u64;
    let n = f.n as usize;
    let mut da = [0u64; 16];
    let mut db = [0u64; 16];
    let (mut x, mut y) = (a as u64, b as u64);
    for i in 0..n {
        da[i] = x % p;
        db[i] = y % p;
        x /= p;
        y /= p;
    }
    let mut prod = [0u64; 32];
    for i in 0..n {
        if da[i] == 0 {
            continue;
        }
        for j in 0..n {
            prod[i + j] = (prod[i + j] + da[i] * db[j]) % p;
        }
    }
    for k in (n..2 * n.max(1) - 1).rev() {
        let c = prod[k];
        if c == 0 {
            continue;
        }
        prod[k] = 0;
        for i in 0..n {
            let m = f.modulus[i] as u64;
            prod[k - n + i] = (prod[k - n + i] + c * ((p - m) % p)) % p;
        }
    }
    let mut out = 0u64;
    for i in (0..n).rev() {
        out = out * p + prod[i];
    }
    out as u32
}

// Dense polynomials over Z/p, constant term first, used only for the
// irreducibility test of candidate moduli.

fn trim(v: &mut Vec<u64>) {
    while v.len() > 1 && *v.last().unwrap() == 0 {
        v.pop();
    }
    if v.is_empty() {
        v.push(0);
    }
}

fn poly_rem(a: &[u64], m: &[u64], p: u64) -> Vec<u64> {
    let mut r = a.to_vec();
    trim(&mut r);
    let dm = m.len() - 1;
    let lead_inv = numth::pow_mod(m[dm], p - 2, p);
    while r.len() > dm && !(r.len() == 1 && r[0] == 0) {
        let dr = r.len() - 1;
        let c = r[dr] * lead_inv % p;
        for (i, &mi) in m.iter().enumerate() {
            let idx = dr - dm + i;
            r[idx] = (r[idx] + (p - c * mi % p)) % p;
        }
        r.pop();
        trim(&mut r);
    }
    r
}

fn poly_mulmod(a: &[u64], b: &[u64], m: &[u64], p: u64) -> Vec<u64> {
    let mut prod = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            prod[i + j] = (prod[i + j] + x * y) % p;
        }
    }
    poly_rem(&prod, m, p)
}

fn poly_powmod(base: &[u64], mut e: u64, m: &[u64], p: u64) -> Vec<u64> {
    let mut acc = vec![1u64];
    let mut b = poly_rem(base, m, p);
    while e > 0 {
        if e & 1 == 1 {
            acc = poly_mulmod(&acc, &b, m, p);
        }
        b = poly_mulmod(&b, &b, m, p);
        e >>= 1;
    }
    acc
}

fn poly_gcd(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let mut x = a.to_vec();
    let mut y = b.to_vec();
    trim(&mut x);
    trim(&mut y);
    while !(y.len() == 1 && y[0] == 0) {
        let r = poly_rem(&x, &y, p);
        x = y;
        y = r;
    }
    x
}

/// Rabin's irreducibility test for a monic polynomial over Z/p.
fn is_irreducible_mod_p(modulus: &[u32], p: u32) -> bool {
    let p = p as u64;
    let f: Vec<u64> = modulus.iter().map(|&c| c as u64).collect();
    let n = f.len() - 1;
    if n == 1 {
        return true;
    }
    // x^(p^k) mod f for k = 0..=n
    let mut powers = vec![poly_rem(&[0, 1], &f, p)];
    for k in 1..=n {
        let next = poly_powmod(&powers[k - 1], p, &f, p);
        powers.push(next);
    }
    let x_minus = |h: &Vec<u64>| {
        let mut d = h.clone();
        d.resize(d.len().max(2), 0);
        d[1] = (d[1] + p - 1) % p;
        trim(&mut d);
        d
    };
    let top = x_minus(&powers[n]);
    if !(top.len() == 1 && top[0] == 0) {
        return false;
    }
    for (r, _) in numth::factor_small(n as u64) {
        let g = poly_gcd(&f, &x_minus(&powers[n / r as usize]), p);
        if g.len() > 1 {
            return false;
        }
    }
    true
}

/// The arithmetic operations exposed by [`arith`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Div,
    Inv,
    Neg,
}

/// An element bundled with its field, for callers that want mixed-field
/// operands rejected instead of silently misread.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FieldElem {
    pub field: Gf,
    pub value: Fe,
}

impl FieldElem {
    pub fn new(field: &Gf, value: Fe) -> Result<FieldElem, GfError> {
        if !field.contains(value) {
            return Err(GfError::NotAnElement(value.0));
        }
        Ok(FieldElem { field: field.clone(), value })
    }
}

/// Checked field arithmetic on bundled elements.
pub fn arith(op: ArithOp, a: &FieldElem, b: Option<&FieldElem>) -> Result<FieldElem, GfError> {
    let f = &a.field;
    let rhs = |b: Option<&FieldElem>| -> Result<Fe, GfError> {
        let b = b.ok_or(GfError::MissingOperand(op))?;
        if b.field != *f {
            return Err(GfError::MixedFields);
        }
        Ok(b.value)
    };
    let value = match op {
        ArithOp::Add => f.add(a.value, rhs(b)?),
        ArithOp::Sub => f.sub(a.value, rhs(b)?),
        ArithOp::Mul => f.mul(a.value, rhs(b)?),
        ArithOp::Div => f.div(a.value, rhs(b)?)?,
        ArithOp::Inv => f.inv(a.value)?,
        ArithOp::Neg => f.neg(a.value),
    };
    Ok(FieldElem { field: f.clone(), value })
}
