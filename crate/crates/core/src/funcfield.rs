//! Rational functions on the projective line over GF(q), their divisors and
//! Riemann-Roch spaces, and a finite run of the ring-recovery pipeline:
//! scramble the unit classes of L(D) by a Möbius substitution and a
//! Frobenius twist, extend the resulting partial collineation, and read the
//! ring isomorphism back off the decoded semilinear map.

use std::collections::BTreeMap;
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ample::{is_ample, AmpleError, AmpleFamily, AmpleSubset};
use crate::extend::{extend, restrict_semilinear, ExtendError, ExtendOptions, PartialCollineation};
use crate::gf::{Fe, Gf, GfError};
use crate::linalg::Matrix;
use crate::poly::Poly;
use crate::projgeom::{GeomError, ProjSpace};
use crate::semilinear::{FieldIso, SemilinearError, SemilinearIso};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FuncFieldError {
    #[error("the zero function has no divisor")]
    ZeroFunction,
    #[error("denominator is zero")]
    ZeroDenominator,
    #[error("{0} is not a monic irreducible polynomial")]
    NotIrreducible(String),
    #[error("divisor is not effective")]
    NotEffective,
    #[error("closed point {0} lies in both D and E")]
    Overlap(String),
    #[error("function {0} is not in L(D)")]
    NotInSpace(String),
    #[error("Möbius map does not stabilize {0}")]
    NotStable(&'static str),
    #[error("Möbius matrix is singular")]
    Singular,
    #[error("L(D) has dimension {0}, need at least 3")]
    DimensionTooSmall(usize),
    #[error("no size bound t with q > 3t + 1 makes the unit set ample (largest complement {0})")]
    NotCertifiable(usize),
    #[error("decoded map does not fix the class of 1")]
    NormalizationFailed,
    #[error("multiplicativity fails for f = {f}, g = {g}")]
    NotMultiplicative { f: String, g: String },
    #[error("recovered map differs from the scrambling map")]
    GroundTruthMismatch,
    #[error(transparent)]
    Field(#[from] GfError),
    #[error(transparent)]
    Geometry(#[from] GeomError),
    #[error(transparent)]
    Ample(#[from] AmpleError),
    #[error(transparent)]
    Extend(#[from] ExtendError),
    #[error(transparent)]
    Semilinear(#[from] SemilinearError),
}

/// `num / den` with `den` monic and `gcd(num, den) = 1`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RationalFunction {
    num: Poly,
    den: Poly,
}

impl RationalFunction {
    pub fn new(num: Poly, den: Poly, f: &Gf) -> Result<RationalFunction, FuncFieldError> {
        if den.is_zero() {
            return Err(FuncFieldError::ZeroDenominator);
        }
        if num.is_zero() {
            return Ok(RationalFunction::zero());
        }
        let g = num.gcd(&den, f);
        let (num, _) = num.divrem(&g, f)?;
        let (den, _) = den.divrem(&g, f)?;
        let lead = f.inv(den.leading())?;
        Ok(RationalFunction { num: num.scale(lead, f), den: den.scale(lead, f) })
    }

    pub fn zero() -> RationalFunction {
        RationalFunction { num: Poly::zero(), den: Poly::one() }
    }

    pub fn constant(c: Fe) -> RationalFunction {
        RationalFunction { num: Poly::constant(c), den: Poly::one() }
    }

    pub fn from_poly(p: Poly) -> RationalFunction {
        RationalFunction { num: p, den: Poly::one() }
    }

    /// The coordinate function `t`.
    pub fn t() -> RationalFunction {
        RationalFunction::from_poly(Poly::monomial(Fe::ONE, 1))
    }

    pub fn num(&self) -> &Poly {
        &self.num
    }

    pub fn den(&self) -> &Poly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn add(&self, o: &RationalFunction, f: &Gf) -> RationalFunction {
        let num = self.num.mul(&o.den, f).add(&o.num.mul(&self.den, f), f);
        RationalFunction::new(num, self.den.mul(&o.den, f), f).expect("nonzero denominator")
    }

    pub fn sub(&self, o: &RationalFunction, f: &Gf) -> RationalFunction {
        self.add(&o.scale(f.neg(Fe::ONE), f), f)
    }

    pub fn scale(&self, c: Fe, f: &Gf) -> RationalFunction {
        RationalFunction::new(self.num.scale(c, f), self.den.clone(), f).expect("nonzero denominator")
    }

    pub fn mul(&self, o: &RationalFunction, f: &Gf) -> RationalFunction {
        RationalFunction::new(self.num.mul(&o.num, f), self.den.mul(&o.den, f), f).expect("nonzero denominator")
    }

    pub fn div(&self, o: &RationalFunction, f: &Gf) -> Result<RationalFunction, FuncFieldError> {
        if o.is_zero() {
            return Err(FuncFieldError::ZeroFunction);
        }
        RationalFunction::new(self.num.mul(&o.den, f), self.den.mul(&o.num, f), f)
    }

    /// Value at `t = a`, or `None` at a pole.
    pub fn eval(&self, a: Fe, f: &Gf) -> Option<Fe> {
        let d = self.den.eval(a, f);
        if d.is_zero() {
            return None;
        }
        Some(f.div(self.num.eval(a, f), d).unwrap())
    }

    /// Value at infinity, or `None` at a pole.
    pub fn eval_infinity(&self) -> Option<Fe> {
        let (dn, dd) = (self.num.degree(), self.den.degree().unwrap());
        match dn {
            None => Some(Fe::ZERO),
            Some(n) if n < dd => Some(Fe::ZERO),
            Some(n) if n == dd => Some(self.num.leading()),
            _ => None,
        }
    }

    /// Applies `x -> x^(p^i)` to all coefficients.
    pub fn frobenius(&self, i: u32, f: &Gf) -> RationalFunction {
        RationalFunction { num: self.num.frobenius(i, f), den: self.den.frobenius(i, f) }
    }

    /// `self ∘ r` for the Möbius map `r`.
    pub fn compose(&self, r: &Mobius, f: &Gf) -> RationalFunction {
        let m = self.num.degree().unwrap_or(0).max(self.den.degree().unwrap_or(0));
        let top = Poly::new(vec![r.b, r.a]);
        let bottom = Poly::new(vec![r.d, r.c]);
        let homog = |p: &Poly| {
            let mut acc = Poly::zero();
            for (i, &c) in p.coeffs().iter().enumerate() {
                if c.is_zero() {
                    continue;
                }
                let term = top.pow(i as u32, f).mul(&bottom.pow((m - i) as u32, f), f).scale(c, f);
                acc = acc.add(&term, f);
            }
            acc
        };
        RationalFunction::new(homog(&self.num), homog(&self.den), f).expect("Möbius maps are invertible")
    }
}

impl fmt::Display for RationalFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den == Poly::one() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "({})/({})", self.num, self.den)
        }
    }
}

/// A closed point of P¹: infinity or a monic irreducible polynomial.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ClosedPointP1 {
    Infinity,
    Finite(Poly),
}

impl ClosedPointP1 {
    pub fn finite(p: Poly, f: &Gf) -> Result<ClosedPointP1, FuncFieldError> {
        if !p.is_monic() || !p.is_irreducible(f) {
            return Err(FuncFieldError::NotIrreducible(p.to_string()));
        }
        Ok(ClosedPointP1::Finite(p))
    }

    /// The rational point `t = a`.
    pub fn rational(a: Fe, f: &Gf) -> ClosedPointP1 {
        ClosedPointP1::Finite(Poly::linear(f, a))
    }

    pub fn degree(&self) -> usize {
        match self {
            ClosedPointP1::Infinity => 1,
            ClosedPointP1::Finite(p) => p.degree().unwrap(),
        }
    }

    /// A function with a simple zero here and poles only elsewhere.
    fn uniformizer(&self) -> RationalFunction {
        match self {
            ClosedPointP1::Infinity => RationalFunction { num: Poly::one(), den: Poly::monomial(Fe::ONE, 1) },
            ClosedPointP1::Finite(p) => RationalFunction::from_poly(p.clone()),
        }
    }

    pub fn frobenius(&self, i: u32, f: &Gf) -> ClosedPointP1 {
        match self {
            ClosedPointP1::Infinity => ClosedPointP1::Infinity,
            ClosedPointP1::Finite(p) => ClosedPointP1::Finite(p.frobenius(i, f)),
        }
    }
}

impl fmt::Display for ClosedPointP1 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ClosedPointP1::Infinity => write!(f, "inf"),
            ClosedPointP1::Finite(p) => write!(f, "({p})"),
        }
    }
}

/// A divisor on P¹ with nonzero multiplicities.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct DivisorP1 {
    mult: BTreeMap<ClosedPointP1, i64>,
}

impl DivisorP1 {
    pub fn zero() -> DivisorP1 {
        DivisorP1::default()
    }

    pub fn from_points(pts: &[(ClosedPointP1, i64)]) -> DivisorP1 {
        let mut d = DivisorP1::zero();
        for (p, m) in pts {
            d.add_point(p.clone(), *m);
        }
        d
    }

    pub fn add_point(&mut self, p: ClosedPointP1, m: i64) {
        let e = self.mult.entry(p.clone()).or_insert(0);
        *e += m;
        if *e == 0 {
            self.mult.remove(&p);
        }
    }

    pub fn multiplicity(&self, p: &ClosedPointP1) -> i64 {
        self.mult.get(p).copied().unwrap_or(0)
    }

    pub fn support(&self) -> impl Iterator<Item = &ClosedPointP1> {
        self.mult.keys()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&ClosedPointP1, i64)> {
        self.mult.iter().map(|(p, &m)| (p, m))
    }

    pub fn degree(&self) -> i64 {
        self.mult.iter().map(|(p, &m)| m * p.degree() as i64).sum()
    }

    pub fn is_effective(&self) -> bool {
        self.mult.values().all(|&m| m > 0)
    }

    pub fn add(&self, o: &DivisorP1) -> DivisorP1 {
        let mut d = self.clone();
        for (p, m) in o.iter() {
            d.add_point(p.clone(), m);
        }
        d
    }

    /// The part with positive multiplicities.
    pub fn positive_part(&self) -> DivisorP1 {
        DivisorP1 { mult: self.mult.iter().filter(|(_, &m)| m > 0).map(|(p, &m)| (p.clone(), m)).collect() }
    }

    pub fn map_points(&self, mut g: impl FnMut(&ClosedPointP1) -> ClosedPointP1) -> DivisorP1 {
        let mut d = DivisorP1::zero();
        for (p, m) in self.iter() {
            d.add_point(g(p), m);
        }
        d
    }
}

impl fmt::Display for DivisorP1 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.mult.is_empty() {
            return write!(f, "0");
        }
        for (i, (p, m)) in self.mult.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            if *m == 1 {
                write!(f, "{p}")?;
            } else {
                write!(f, "{m}{p}")?;
            }
        }
        Ok(())
    }
}

/// Zeros minus poles of `f`, including the point at infinity.
pub fn divisor_of(func: &RationalFunction, f: &Gf) -> Result<DivisorP1, FuncFieldError> {
    if func.is_zero() {
        return Err(FuncFieldError::ZeroFunction);
    }
    let mut d = DivisorP1::zero();
    for (p, e) in func.num.factor(f)?.1 {
        d.add_point(ClosedPointP1::Finite(p), e as i64);
    }
    for (p, e) in func.den.factor(f)?.1 {
        d.add_point(ClosedPointP1::Finite(p), -(e as i64));
    }
    let inf = func.den.degree().unwrap() as i64 - func.num.degree().unwrap() as i64;
    d.add_point(ClosedPointP1::Infinity, inf);
    Ok(d)
}

/// Whether `func` has a zero or pole at `x`.
fn touches(func: &RationalFunction, x: &ClosedPointP1, f: &Gf) -> bool {
    match x {
        ClosedPointP1::Infinity => func.num.degree() != func.den.degree(),
        ClosedPointP1::Finite(p) => p.divides(&func.num, f) || p.divides(&func.den, f),
    }
}

/// The Riemann-Roch space L(D) = {f : div f >= -D} ∪ {0} of an effective D,
/// with basis `t^i / h`, `h = prod P^(n_P)` over finite points of D.
#[derive(Clone, Debug)]
pub struct RRSpace {
    field: Gf,
    divisor: DivisorP1,
    h: Poly,
    basis: Vec<RationalFunction>,
}

pub fn rr_basis(d: &DivisorP1, f: &Gf) -> Result<RRSpace, FuncFieldError> {
    if !d.is_effective() {
        return Err(FuncFieldError::NotEffective);
    }
    let mut h = Poly::one();
    for (p, m) in d.iter() {
        if let ClosedPointP1::Finite(poly) = p {
            h = h.mul(&poly.pow(m as u32, f), f);
        }
    }
    let dim = d.degree() as usize + 1;
    let basis = (0..dim)
        .map(|i| RationalFunction::new(Poly::monomial(Fe::ONE, i), h.clone(), f))
        .collect::<Result<_, _>>()?;
    Ok(RRSpace { field: f.clone(), divisor: d.clone(), h, basis })
}

impl RRSpace {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[RationalFunction] {
        &self.basis
    }

    pub fn divisor(&self) -> &DivisorP1 {
        &self.divisor
    }

    pub fn field(&self) -> &Gf {
        &self.field
    }

    /// `sum c_i t^i / h`.
    pub fn element(&self, coords: &[Fe]) -> RationalFunction {
        RationalFunction::new(Poly::new(coords.to_vec()), self.h.clone(), &self.field).expect("h is nonzero")
    }

    /// Coordinates in the basis, or `None` if `func` is not in L(D).
    pub fn coords(&self, func: &RationalFunction) -> Option<Vec<Fe>> {
        let f = &self.field;
        let (g, r) = func.num.mul(&self.h, f).divrem(&func.den, f).ok()?;
        if !r.is_zero() || g.degree().is_some_and(|d| d >= self.dim()) {
            return None;
        }
        Some((0..self.dim()).map(|i| g.coeff(i)).collect())
    }

    pub fn contains(&self, func: &RationalFunction) -> bool {
        self.coords(func).is_some()
    }
}

/// Classes of `f ∈ L(D) \ {0}` whose divisor avoids E, as points of P(L(D)).
#[derive(Clone, Debug)]
pub struct UnitSubset {
    rr: RRSpace,
    e: Vec<ClosedPointP1>,
    space: ProjSpace,
    subset: AmpleSubset,
}

pub fn unit_subset(d: &DivisorP1, e: &[ClosedPointP1], f: &Gf) -> Result<UnitSubset, FuncFieldError> {
    if let Some(x) = e.iter().find(|x| d.multiplicity(x) != 0) {
        return Err(FuncFieldError::Overlap(x.to_string()));
    }
    let rr = rr_basis(d, f)?;
    let space = ProjSpace::new(f, rr.dim()).map_err(|err| match err {
        GeomError::DimensionTooSmall(n) => FuncFieldError::DimensionTooSmall(n),
        other => other.into(),
    })?;
    let members: Vec<u32> = (0..space.point_count() as u32)
        .filter(|&i| {
            let func = rr.element(&space.coords_of(i));
            e.iter().all(|x| !touches(&func, x, f))
        })
        .collect();
    let subset = AmpleSubset::new(&space, &members)?;
    Ok(UnitSubset { rr, e: e.to_vec(), space, subset })
}

impl UnitSubset {
    pub fn rr(&self) -> &RRSpace {
        &self.rr
    }

    pub fn space(&self) -> &ProjSpace {
        &self.space
    }

    pub fn subset(&self) -> &AmpleSubset {
        &self.subset
    }

    pub fn avoided(&self) -> &[ClosedPointP1] {
        &self.e
    }

    /// Point of P(L(D)) for a nonzero member of L(D).
    pub fn class_of(&self, func: &RationalFunction) -> Result<u32, FuncFieldError> {
        let c = self.rr.coords(func).ok_or_else(|| FuncFieldError::NotInSpace(func.to_string()))?;
        self.space.index_of_vector(&c).ok_or(FuncFieldError::ZeroFunction)
    }

    /// The representative with canonical coordinates.
    pub fn representative(&self, class: u32) -> RationalFunction {
        self.rr.element(&self.space.coords_of(class))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShiftReport {
    pub survivors: Vec<u32>,
    /// `q - |E|` when `f` has no pole on E: each point of E excludes at most
    /// one shift.
    pub lower_bound: Option<usize>,
}

/// The `c ∈ GF(q)` with `f - c` nonzero and without zeros or poles on E.
pub fn shift_survivors(func: &RationalFunction, e: &[ClosedPointP1], f: &Gf) -> ShiftReport {
    let survivors = f
        .elements()
        .filter(|&c| {
            let g = func.sub(&RationalFunction::constant(c), f);
            !g.is_zero() && e.iter().all(|x| !touches(&g, x, f))
        })
        .map(Fe::value)
        .collect();
    let pole_on_e = e.iter().any(|x| match x {
        ClosedPointP1::Infinity => func.num.degree() > func.den.degree(),
        ClosedPointP1::Finite(p) => p.divides(&func.den, f),
    });
    ShiftReport { survivors, lower_bound: (!pole_on_e).then(|| (f.q() as usize).saturating_sub(e.len())) }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AmpleCertificate {
    /// Ampleness for the family that was passed in.
    pub ample: bool,
    /// Largest `|ℓ \ U|` over lines meeting U.
    pub max_complement: usize,
    /// `q > 3t + 1` with `t = max_complement`, i.e. `size_at_most(t)` is
    /// (3,2)-admissible.
    pub certifiable: bool,
}

pub fn ample_certificate(u: &UnitSubset, fam: &AmpleFamily) -> Result<AmpleCertificate, FuncFieldError> {
    let rep = is_ample(&u.subset, fam)?;
    let t = rep.max_complement;
    let q = u.space.field().q() as usize;
    Ok(AmpleCertificate { ample: rep.ample, max_complement: t, certifiable: !u.subset.is_empty() && q > 3 * t + 1 })
}

/// `t -> (a t + b) / (c t + d)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Mobius {
    pub a: Fe,
    pub b: Fe,
    pub c: Fe,
    pub d: Fe,
}

impl Mobius {
    pub fn new(a: Fe, b: Fe, c: Fe, d: Fe, f: &Gf) -> Result<Mobius, FuncFieldError> {
        if f.sub(f.mul(a, d), f.mul(b, c)).is_zero() {
            return Err(FuncFieldError::Singular);
        }
        Ok(Mobius { a, b, c, d })
    }

    pub fn identity() -> Mobius {
        Mobius { a: Fe::ONE, b: Fe::ZERO, c: Fe::ZERO, d: Fe::ONE }
    }

    pub fn inverse(&self, f: &Gf) -> Mobius {
        Mobius { a: self.d, b: f.neg(self.b), c: f.neg(self.c), d: self.a }
    }

    /// Image of a closed point: the zero of `π ∘ g⁻¹` for a uniformizer π.
    pub fn apply_point(&self, x: &ClosedPointP1, f: &Gf) -> ClosedPointP1 {
        let moved = x.uniformizer().compose(&self.inverse(f), f);
        let zeros = divisor_of(&moved, f).expect("nonzero").positive_part();
        let mut it = zeros.support();
        let p = it.next().expect("one zero").clone();
        debug_assert!(it.next().is_none());
        p
    }

    /// `func ∘ g⁻¹`.
    pub fn push(&self, func: &RationalFunction, f: &Gf) -> RationalFunction {
        func.compose(&self.inverse(f), f)
    }
}

/// Ground truth and partial data for one scrambled instance.
#[derive(Clone, Debug)]
pub struct Scramble {
    pub units: UnitSubset,
    pub mobius: Mobius,
    pub frob: u32,
    /// `f -> frob^o(f ∘ g⁻¹)` as a semilinear map of L(D).
    pub ground_truth: SemilinearIso,
    pub partial: PartialCollineation,
}

fn scramble_fn(func: &RationalFunction, g: &Mobius, frob: u32, f: &Gf) -> RationalFunction {
    g.push(func, f).frobenius(frob, f)
}

/// Builds the partial collineation on the unit classes induced by
/// `f -> frob^o(f ∘ g⁻¹)`.
pub fn scramble(g: &Mobius, frob: u32, d: &DivisorP1, e: &[ClosedPointP1], f: &Gf) -> Result<Scramble, FuncFieldError> {
    if frob >= f.n() {
        return Err(SemilinearError::BadExponent { exp: frob, n: f.n() }.into());
    }
    let move_point = |x: &ClosedPointP1| g.apply_point(x, f).frobenius(frob, f);
    if d.map_points(move_point) != *d {
        return Err(FuncFieldError::NotStable("D"));
    }
    let mut e_sorted = e.to_vec();
    e_sorted.sort();
    let mut e_moved: Vec<ClosedPointP1> = e.iter().map(move_point).collect();
    e_moved.sort();
    if e_moved != e_sorted {
        return Err(FuncFieldError::NotStable("E"));
    }
    let units = unit_subset(d, e, f)?;
    let rr = &units.rr;
    let cols: Vec<Vec<Fe>> = rr
        .basis
        .iter()
        .map(|b| {
            let img = scramble_fn(b, g, frob, f);
            rr.coords(&img).ok_or_else(|| FuncFieldError::NotInSpace(img.to_string()))
        })
        .collect::<Result<_, _>>()?;
    let mu = FieldIso::new(f, f, frob)?;
    let ground_truth = SemilinearIso::new(&units.space, &units.space, mu, Matrix::from_columns(&cols))?;
    let partial = restrict_semilinear(&ground_truth, &units.subset)?;
    Ok(Scramble { units, mobius: *g, frob, ground_truth, partial })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RingIsoReport {
    pub frob_exp: u32,
    pub multiplicative_pairs: u64,
    pub operator_checks: u64,
    pub matches_ground_truth: bool,
    /// `ψ(b_i)` for the basis of L(D).
    pub basis_images: Vec<String>,
}

/// Normalizes `decoded` by `ψ(1) = 1` and checks that the result is a ring
/// map where products stay in L(D) and equals the scrambling map.
pub fn recover_ring_iso(
    decoded: &SemilinearIso,
    s: &Scramble,
    operator_samples: usize,
    seed: u64,
) -> Result<(SemilinearIso, RingIsoReport), FuncFieldError> {
    let units = &s.units;
    let (rr, space, f) = (&units.rr, &units.space, units.space.field());
    let one = rr.coords(&RationalFunction::constant(Fe::ONE)).expect("D is effective");
    let image = decoded.apply(&one)?;
    let pos = one.iter().position(|x| !x.is_zero()).unwrap();
    let scale = f.div(image[pos], one[pos]).map_err(|_| FuncFieldError::NormalizationFailed)?;
    if image.iter().zip(&one).any(|(&y, &x)| y != f.mul(scale, x)) {
        return Err(FuncFieldError::NormalizationFailed);
    }
    let inv = f.inv(scale).map_err(|_| FuncFieldError::NormalizationFailed)?;
    let psi = SemilinearIso::new(space, space, decoded.mu().clone(), decoded.matrix().scale(inv, f))?;
    let apply = |func: &RationalFunction| -> RationalFunction {
        rr.element(&psi.apply(&rr.coords(func).expect("member of L(D)")).expect("dimension"))
    };

    let reps: Vec<RationalFunction> = (0..space.point_count() as u32).map(|i| units.representative(i)).collect();
    let images: Vec<RationalFunction> = reps.iter().map(apply).collect();
    let mut pairs = 0u64;
    for (i, a) in reps.iter().enumerate() {
        for (j, b) in reps.iter().enumerate().skip(i) {
            let prod = a.mul(b, f);
            if !rr.contains(&prod) {
                continue;
            }
            pairs += 1;
            if apply(&prod) != images[i].mul(&images[j], f) {
                return Err(FuncFieldError::NotMultiplicative { f: a.to_string(), g: b.to_string() });
            }
        }
    }

    // ψ ∘ (multiplication by h) = (multiplication by ψ(h)) ∘ ψ on L(D).
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut operator_checks = 0u64;
    for _ in 0..operator_samples {
        let coords: Vec<Fe> = (0..rr.dim()).map(|_| Fe(rng.gen_range(0..f.q()))).collect();
        let h = rr.element(&coords);
        let ph = apply(&h);
        for x in rr.basis() {
            let hx = h.mul(x, f);
            if !rr.contains(&hx) {
                continue;
            }
            operator_checks += 1;
            if apply(&hx) != ph.mul(&apply(x), f) {
                return Err(FuncFieldError::NotMultiplicative { f: h.to_string(), g: x.to_string() });
            }
        }
    }

    let truth_on_basis = rr.basis().iter().all(|b| apply(b) == scramble_fn(b, &s.mobius, s.frob, f));
    let matches_ground_truth = psi == s.ground_truth && truth_on_basis;
    if !matches_ground_truth {
        return Err(FuncFieldError::GroundTruthMismatch);
    }
    let report = RingIsoReport {
        frob_exp: psi.frob_exp(),
        multiplicative_pairs: pairs,
        operator_checks,
        matches_ground_truth,
        basis_images: rr.basis().iter().map(|b| apply(b).to_string()).collect(),
    };
    Ok((psi, report))
}

/// Parameters of one end-to-end run.
#[derive(Clone, Debug)]
pub struct DemoInstance {
    pub field: Gf,
    pub d: DivisorP1,
    pub e: Vec<ClosedPointP1>,
    pub mobius: Mobius,
    pub frob: u32,
}

impl DemoInstance {
    /// q = 13, E = {(t), inf}, D = (t-2) + (t-7), g: t -> 1/t.
    pub fn q13() -> DemoInstance {
        let f = Gf::new(13, 1).unwrap();
        let d = DivisorP1::from_points(&[
            (ClosedPointP1::rational(f.from_int(2), &f), 1),
            (ClosedPointP1::rational(f.from_int(7), &f), 1),
        ]);
        let e = vec![ClosedPointP1::rational(Fe::ZERO, &f), ClosedPointP1::Infinity];
        let mobius = Mobius::new(Fe::ZERO, Fe::ONE, Fe::ONE, Fe::ZERO, &f).unwrap();
        DemoInstance { field: f, d, e, mobius, frob: 0 }
    }

    /// q = 9, E = {inf}, D = 2(t-1), g: t -> 2 - t, one Frobenius twist.
    pub fn q9_frobenius() -> DemoInstance {
        let f = Gf::new(3, 2).unwrap();
        let d = DivisorP1::from_points(&[(ClosedPointP1::rational(Fe::ONE, &f), 2)]);
        let e = vec![ClosedPointP1::Infinity];
        let mobius = Mobius::new(f.from_int(2), f.from_int(2), Fe::ZERO, Fe::ONE, &f).unwrap();
        DemoInstance { field: f, d, e, mobius, frob: 1 }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DemoReport {
    pub q: u32,
    pub divisor: String,
    pub avoided: Vec<String>,
    pub dim: usize,
    pub unit_classes: usize,
    pub certificate: AmpleCertificate,
    pub frob: u32,
    pub ring: RingIsoReport,
    pub recovered: bool,
}

/// scramble -> extend -> decode -> normalize -> compare.
pub fn run_demo(inst: &DemoInstance, seed: u64) -> Result<DemoReport, FuncFieldError> {
    let f = &inst.field;
    let s = scramble(&inst.mobius, inst.frob, &inst.d, &inst.e, f)?;
    let probe = ample_certificate(&s.units, &AmpleFamily::size_at_most(f, f.q() as usize + 1))?;
    if !probe.certifiable {
        return Err(FuncFieldError::NotCertifiable(probe.max_complement));
    }
    let fam = AmpleFamily::size_at_most(f, probe.max_complement);
    let certificate = ample_certificate(&s.units, &fam)?;
    let res = extend(&s.partial, &fam, &fam, &ExtendOptions::default())?;
    let (_, ring) = recover_ring_iso(&res.decoded, &s, 50, seed)?;
    Ok(DemoReport {
        q: f.q(),
        divisor: inst.d.to_string(),
        avoided: inst.e.iter().map(ToString::to_string).collect(),
        dim: s.units.rr.dim(),
        unit_classes: s.units.subset.len(),
        certificate,
        frob: inst.frob,
        recovered: ring.matches_ground_truth,
        ring,
    })
}
