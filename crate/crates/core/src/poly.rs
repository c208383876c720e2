//! Dense univariate polynomials over a [`Gf`].

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::gf::{Fe, Gf, GfError};

/// Coefficients constant term first, without trailing zeros. The zero
/// polynomial has no coefficients.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Poly {
    coeffs: Vec<Fe>,
}

impl Poly {
    pub fn zero() -> Poly {
        Poly { coeffs: Vec::new() }
    }

    pub fn one() -> Poly {
        Poly { coeffs: vec![Fe::ONE] }
    }

    pub fn constant(c: Fe) -> Poly {
        Poly::new(vec![c])
    }

    /// The monomial `c t^k`.
    pub fn monomial(c: Fe, k: usize) -> Poly {
        let mut coeffs = vec![Fe::ZERO; k + 1];
        coeffs[k] = c;
        Poly::new(coeffs)
    }

    /// `t - a`
    pub fn linear(f: &Gf, a: Fe) -> Poly {
        Poly::new(vec![f.neg(a), Fe::ONE])
    }

    pub fn new(mut coeffs: Vec<Fe>) -> Poly {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn coeffs(&self) -> &[Fe] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> Fe {
        self.coeffs.get(k).copied().unwrap_or(Fe::ZERO)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Fe {
        self.coeffs.last().copied().unwrap_or(Fe::ZERO)
    }

    pub fn is_monic(&self) -> bool {
        self.leading() == Fe::ONE
    }

    pub fn add(&self, other: &Poly, f: &Gf) -> Poly {
        let len = self.coeffs.len().max(other.coeffs.len());
        Poly::new((0..len).map(|k| f.add(self.coeff(k), other.coeff(k))).collect())
    }

    pub fn sub(&self, other: &Poly, f: &Gf) -> Poly {
        let len = self.coeffs.len().max(other.coeffs.len());
        Poly::new((0..len).map(|k| f.sub(self.coeff(k), other.coeff(k))).collect())
    }

    pub fn scale(&self, c: Fe, f: &Gf) -> Poly {
        Poly::new(self.coeffs.iter().map(|&a| f.mul(a, c)).collect())
    }

    pub fn mul(&self, other: &Poly, f: &Gf) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![Fe::ZERO; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, &b) in other.coeffs.iter().enumerate() {
                out[i + j] = f.add(out[i + j], f.mul(a, b));
            }
        }
        Poly::new(out)
    }

    pub fn pow(&self, e: u32, f: &Gf) -> Poly {
        let mut acc = Poly::one();
        for _ in 0..e {
            acc = acc.mul(self, f);
        }
        acc
    }

    pub fn divrem(&self, divisor: &Poly, f: &Gf) -> Result<(Poly, Poly), GfError> {
        let dd = divisor.degree().ok_or(GfError::DivisionByZero)?;
        let lead_inv = f.inv(divisor.leading())?;
        let mut rem = self.coeffs.clone();
        if rem.len() <= dd {
            return Ok((Poly::zero(), self.clone()));
        }
        let mut quot = vec![Fe::ZERO; rem.len() - dd];
        for k in (dd..rem.len()).rev() {
            let c = f.mul(rem[k], lead_inv);
            if c.is_zero() {
                continue;
            }
            quot[k - dd] = c;
            for (i, &d) in divisor.coeffs.iter().enumerate() {
                let idx = k - dd + i;
                rem[idx] = f.sub(rem[idx], f.mul(c, d));
            }
        }
        rem.truncate(dd);
        Ok((Poly::new(quot), Poly::new(rem)))
    }

    pub fn monic(&self, f: &Gf) -> Poly {
        if self.is_zero() {
            return Poly::zero();
        }
        self.scale(f.inv(self.leading()).expect("nonzero leading coefficient"), f)
    }

    /// Monic greatest common divisor; `gcd(0, 0) = 0`.
    pub fn gcd(&self, other: &Poly, f: &Gf) -> Poly {
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let (_, r) = a.divrem(&b, f).expect("nonzero divisor");
            a = b;
            b = r;
        }
        a.monic(f)
    }

    pub fn eval(&self, x: Fe, f: &Gf) -> Fe {
        self.coeffs.iter().rev().fold(Fe::ZERO, |acc, &c| f.add(f.mul(acc, x), c))
    }

    /// Applies `c -> c^(p^i)` to every coefficient.
    pub fn frobenius(&self, i: u32, f: &Gf) -> Poly {
        Poly::new(self.coeffs.iter().map(|&c| f.frobenius(c, i)).collect())
    }

    pub fn divides(&self, other: &Poly, f: &Gf) -> bool {
        match other.divrem(self, f) {
            Ok((_, r)) => r.is_zero(),
            Err(_) => false,
        }
    }

    /// Irreducibility by trial division against all monic polynomials of
    /// degree at most half this one's.
    pub fn is_irreducible(&self, f: &Gf) -> bool {
        match self.degree() {
            None | Some(0) => false,
            Some(1) => true,
            Some(d) => {
                for k in 1..=d / 2 {
                    for cand in monic_of_degree(f, k) {
                        if cand.divides(self, f) {
                            return false;
                        }
                    }
                }
                true
            }
        }
    }

    /// Factorization into a unit times monic irreducibles with multiplicities,
    /// factors sorted by degree. Trial division; meant for the low degrees used here.
    pub fn factor(&self, f: &Gf) -> Result<(Fe, Vec<(Poly, u32)>), GfError> {
        if self.is_zero() {
            return Err(GfError::DivisionByZero);
        }
        let unit = self.leading();
        let mut rest = self.monic(f);
        let mut out = Vec::new();
        let mut k = 1;
        while rest.degree().unwrap_or(0) >= 2 * k {
            for cand in monic_of_degree(f, k) {
                let mut e = 0;
                loop {
                    let (qt, r) = rest.divrem(&cand, f)?;
                    if !r.is_zero() {
                        break;
                    }
                    rest = qt;
                    e += 1;
                }
                if e > 0 {
                    out.push((cand, e));
                }
            }
            k += 1;
        }
        if rest.degree().unwrap_or(0) >= 1 {
            match out.iter_mut().find(|(p, _)| *p == rest) {
                Some(entry) => entry.1 += 1,
                None => out.push((rest, 1)),
            }
        }
        out.sort_by(|a, b| (a.0.degree(), &a.0).cmp(&(b.0.degree(), &b.0)));
        Ok((unit, out))
    }
}

/// Coefficients print as their integer encodings, e.g. `t^2 + 3t + 1`.
impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match (k, c.value()) {
                (0, v) => write!(f, "{v}")?,
                (1, 1) => write!(f, "t")?,
                (1, v) => write!(f, "{v}t")?,
                (_, 1) => write!(f, "t^{k}")?,
                (_, v) => write!(f, "{v}t^{k}")?,
            }
        }
        Ok(())
    }
}

/// All monic polynomials of degree exactly `k`, in encoding order.
pub fn monic_of_degree(f: &Gf, k: usize) -> impl Iterator<Item = Poly> + '_ {
    let q = f.q() as u64;
    let total = q.pow(k as u32);
    (0..total).map(move |mut idx| {
        let mut coeffs = Vec::with_capacity(k + 1);
        for _ in 0..k {
            coeffs.push(Fe((idx % q) as u32));
            idx /= q;
        }
        coeffs.push(Fe::ONE);
        Poly::new(coeffs)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn divrem_reconstructs() {
        let f = Gf::new(5, 1).unwrap();
        let a = Poly::new(vec![Fe(1), Fe(2), Fe(3), Fe(4)]);
        let b = Poly::new(vec![Fe(2), Fe(1)]);
        let (qt, r) = a.divrem(&b, &f).unwrap();
        assert_eq!(qt.mul(&b, &f).add(&r, &f), a);
        assert!(r.degree().unwrap_or(0) < 1);
        assert!(a.divrem(&Poly::zero(), &f).is_err());
    }

    #[test]
    fn irreducibles_over_f3() {
        let f = Gf::new(3, 1).unwrap();
        // t^2 + 1 is irreducible over F_3, t^2 - 1 is not.
        assert!(Poly::new(vec![Fe(1), Fe(0), Fe(1)]).is_irreducible(&f));
        assert!(!Poly::new(vec![Fe(2), Fe(0), Fe(1)]).is_irreducible(&f));
        let count = monic_of_degree(&f, 2).filter(|p| p.is_irreducible(&f)).count();
        assert_eq!(count, 3);
    }

    #[test]
    fn factor_recomposes() {
        let f = Gf::new(3, 1).unwrap();
        let t2p1 = Poly::new(vec![Fe(1), Fe(0), Fe(1)]);
        let tm1 = Poly::linear(&f, Fe(1));
        let g = t2p1.mul(&tm1, &f).mul(&tm1, &f).scale(Fe(2), &f);
        let (unit, facs) = g.factor(&f).unwrap();
        assert_eq!(unit, Fe(2));
        assert_eq!(facs, vec![(tm1.clone(), 2), (t2p1.clone(), 1)]);
        let mut back = Poly::constant(unit);
        for (p, e) in &facs {
            back = back.mul(&p.pow(*e, &f), &f);
        }
        assert_eq!(back, g);
    }

    #[test]
    fn display() {
        let p = Poly::new(vec![Fe(1), Fe(3), Fe(1)]);
        assert_eq!(p.to_string(), "t^2 + 3t + 1");
        assert_eq!(Poly::zero().to_string(), "0");
        assert_eq!(Poly::new(vec![Fe(0), Fe(2)]).to_string(), "2t");
    }

    #[test]
    fn gcd_is_monic() {
        let f = Gf::new(7, 1).unwrap();
        let a = Poly::linear(&f, Fe(3)).mul(&Poly::linear(&f, Fe(4)), &f).scale(Fe(5), &f);
        let b = Poly::linear(&f, Fe(3)).scale(Fe(2), &f);
        assert_eq!(a.gcd(&b, &f), Poly::linear(&f, Fe(3)));
    }
}
