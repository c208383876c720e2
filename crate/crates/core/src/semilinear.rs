//! Semilinear isomorphisms, the collineations they induce, and the inverse
//! direction: recovering a semilinear map from a collineation of spaces of
//! dimension at least three.

use std::fmt;

use rand::Rng;
use thiserror::Error;

use crate::gf::{Fe, Gf};
use crate::linalg::Matrix;
use crate::projgeom::{GeomError, ProjSpace, NONE};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SemilinearError {
    #[error("fields {source_field} and {target_field} are not isomorphic")]
    FieldMismatch { source_field: String, target_field: String },
    #[error("frobenius exponent {exp} out of range for degree {n}")]
    BadExponent { exp: u32, n: u32 },
    #[error("expected dimension {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("matrix is not invertible")]
    NotInvertible,
    #[error("value {0} is not a field element")]
    NotAnElement(u32),
    #[error("collineations need dimension at least 3 to be decoded, got {0}")]
    DimensionTooSmall(usize),
    #[error("point map is not a bijection (point {point} hit twice or missing)")]
    NotBijective { point: u32 },
    #[error("line {line} is not mapped onto a line")]
    NotLinePreserving { line: u32 },
    #[error("images of the standard frame are not in general position")]
    FrameDegenerate,
    #[error("the induced scalar map is not a field automorphism")]
    NoFieldAutomorphism,
    #[error("decoded map does not induce the given collineation")]
    NotInduced,
    #[error(transparent)]
    Geometry(#[from] GeomError),
}

/// A field isomorphism `x -> iota(x)^(p^e)` where `iota` is the canonical
/// identification of the source with the target field.
///
/// `iota` is the identity when both fields use the same modulus; otherwise it
/// sends the class of `x` to the least root (in encoding order) of the source
/// modulus inside the target field.
#[derive(Clone)]
pub struct FieldIso {
    source: Gf,
    target: Gf,
    frob_exp: u32,
    table: Vec<Fe>,
    inverse: Vec<Fe>,
}

impl PartialEq for FieldIso {
    fn eq(&self, other: &Self) -> bool {
        self.source == other.source && self.target == other.target && self.table == other.table
    }
}

impl Eq for FieldIso {}

impl fmt::Debug for FieldIso {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FieldIso({} -> {}, frob^{})", self.source, self.target, self.frob_exp)
    }
}

fn check_isomorphic(a: &Gf, b: &Gf) -> Result<(), SemilinearError> {
    if a.p() != b.p() || a.n() != b.n() {
        return Err(SemilinearError::FieldMismatch {
            source_field: a.to_string(),
            target_field: b.to_string(),
        });
    }
    Ok(())
}

fn canonical_identification(source: &Gf, target: &Gf) -> Vec<Fe> {
    if source == target {
        return source.elements().collect();
    }
    let modulus: Vec<Fe> = source.modulus().iter().map(|&c| target.from_int(c as i64)).collect();
    let root = target
        .elements()
        .find(|&r| {
            modulus.iter().rev().fold(Fe::ZERO, |acc, &c| target.add(target.mul(acc, r), c)).is_zero()
        })
        .expect("an irreducible polynomial splits in any field of its degree");
    source
        .elements()
        .map(|a| {
            source
                .coeffs(a)
                .iter()
                .rev()
                .fold(Fe::ZERO, |acc, &c| target.add(target.mul(acc, root), target.from_int(c as i64)))
        })
        .collect()
}

impl FieldIso {
    pub fn new(source: &Gf, target: &Gf, frob_exp: u32) -> Result<FieldIso, SemilinearError> {
        check_isomorphic(source, target)?;
        if frob_exp >= source.n() {
            return Err(SemilinearError::BadExponent { exp: frob_exp, n: source.n() });
        }
        let table: Vec<Fe> = canonical_identification(source, target)
            .into_iter()
            .map(|x| target.frobenius(x, frob_exp))
            .collect();
        let mut inverse = vec![Fe::ZERO; table.len()];
        for (a, &b) in table.iter().enumerate() {
            inverse[b.value() as usize] = Fe(a as u32);
        }
        Ok(FieldIso { source: source.clone(), target: target.clone(), frob_exp, table, inverse })
    }

    pub fn identity(f: &Gf) -> FieldIso {
        FieldIso::new(f, f, 0).expect("identity is valid")
    }

    pub fn source(&self) -> &Gf {
        &self.source
    }

    pub fn target(&self) -> &Gf {
        &self.target
    }

    pub fn frob_exp(&self) -> u32 {
        self.frob_exp
    }

    #[inline]
    pub fn apply(&self, a: Fe) -> Fe {
        self.table[a.value() as usize]
    }

    #[inline]
    pub fn apply_inverse(&self, b: Fe) -> Fe {
        self.inverse[b.value() as usize]
    }

    pub fn is_identity(&self) -> bool {
        self.source == self.target && self.table.iter().enumerate().all(|(i, x)| x.value() as usize == i)
    }

    /// `next ∘ self`.
    pub fn then(&self, next: &FieldIso) -> Result<FieldIso, SemilinearError> {
        if self.target != next.source {
            return Err(SemilinearError::FieldMismatch {
                source_field: self.target.to_string(),
                target_field: next.source.to_string(),
            });
        }
        let table: Vec<Fe> = self.table.iter().map(|&x| next.apply(x)).collect();
        Self::from_table(&self.source, &next.target, table)
    }

    pub fn inverse(&self) -> FieldIso {
        Self::from_table(&self.target, &self.source, self.inverse.clone()).expect("inverse of an isomorphism")
    }

    /// Matches a bijection table against the n candidate isomorphisms.
    fn from_table(source: &Gf, target: &Gf, table: Vec<Fe>) -> Result<FieldIso, SemilinearError> {
        for e in 0..source.n() {
            let cand = FieldIso::new(source, target, e)?;
            if cand.table == table {
                return Ok(cand);
            }
        }
        Err(SemilinearError::NoFieldAutomorphism)
    }
}

/// A semilinear isomorphism `x -> M · mu(x)` from `source` to `target`.
#[derive(Clone, PartialEq, Eq)]
pub struct SemilinearIso {
    source: ProjSpace,
    target: ProjSpace,
    mu: FieldIso,
    matrix: Matrix,
}

impl fmt::Debug for SemilinearIso {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SemilinearIso")
            .field("source", &self.source)
            .field("target", &self.target)
            .field("frob_exp", &self.mu.frob_exp)
            .field("matrix", &self.matrix.data().iter().map(|x| x.value()).collect::<Vec<_>>())
            .finish()
    }
}

impl SemilinearIso {
    pub fn new(
        source: &ProjSpace,
        target: &ProjSpace,
        mu: FieldIso,
        matrix: Matrix,
    ) -> Result<SemilinearIso, SemilinearError> {
        let d = source.dim();
        if target.dim() != d {
            return Err(SemilinearError::DimensionMismatch { expected: d, got: target.dim() });
        }
        if mu.source != *source.field() || mu.target != *target.field() {
            return Err(SemilinearError::FieldMismatch {
                source_field: mu.source.to_string(),
                target_field: source.field().to_string(),
            });
        }
        if matrix.rows() != d || matrix.cols() != d {
            return Err(SemilinearError::DimensionMismatch { expected: d, got: matrix.rows().max(matrix.cols()) });
        }
        let kf = target.field();
        if let Some(bad) = matrix.data().iter().find(|x| !kf.contains(**x)) {
            return Err(SemilinearError::NotAnElement(bad.value()));
        }
        if matrix.determinant(kf).is_zero() {
            return Err(SemilinearError::NotInvertible);
        }
        Ok(SemilinearIso { source: source.clone(), target: target.clone(), mu, matrix })
    }

    pub fn identity(space: &ProjSpace) -> SemilinearIso {
        SemilinearIso {
            source: space.clone(),
            target: space.clone(),
            mu: FieldIso::identity(space.field()),
            matrix: Matrix::identity(space.dim()),
        }
    }

    /// A uniformly random invertible matrix with the given (or a random)
    /// Frobenius exponent.
    pub fn random(
        source: &ProjSpace,
        target: &ProjSpace,
        frob_exp: Option<u32>,
        rng: &mut impl Rng,
    ) -> Result<SemilinearIso, SemilinearError> {
        let kf = target.field();
        let e = frob_exp.unwrap_or_else(|| rng.gen_range(0..kf.n()));
        let mu = FieldIso::new(source.field(), kf, e)?;
        let d = source.dim();
        loop {
            let data: Vec<Fe> = (0..d * d).map(|_| Fe(rng.gen_range(0..kf.q()))).collect();
            let m = Matrix::from_row_major(d, d, data).expect("square");
            if !m.determinant(kf).is_zero() {
                return SemilinearIso::new(source, target, mu, m);
            }
        }
    }

    pub fn source(&self) -> &ProjSpace {
        &self.source
    }

    pub fn target(&self) -> &ProjSpace {
        &self.target
    }

    pub fn mu(&self) -> &FieldIso {
        &self.mu
    }

    pub fn frob_exp(&self) -> u32 {
        self.mu.frob_exp
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    pub fn apply(&self, v: &[Fe]) -> Result<Vec<Fe>, SemilinearError> {
        let d = self.source.dim();
        if v.len() != d {
            return Err(SemilinearError::DimensionMismatch { expected: d, got: v.len() });
        }
        if let Some(bad) = v.iter().find(|x| !self.source.field().contains(**x)) {
            return Err(SemilinearError::NotAnElement(bad.value()));
        }
        let twisted: Vec<Fe> = v.iter().map(|&x| self.mu.apply(x)).collect();
        Ok(self.matrix.mul_vec(&twisted, self.target.field()))
    }

    /// `next ∘ self`.
    pub fn then(&self, next: &SemilinearIso) -> Result<SemilinearIso, SemilinearError> {
        if self.target != next.source {
            return Err(GeomError::SpaceMismatch.into());
        }
        let mu = self.mu.then(&next.mu)?;
        let twisted = self.matrix.map(|x| next.mu.apply(x));
        let matrix = next.matrix.mul(&twisted, next.target.field());
        SemilinearIso::new(&self.source, &next.target, mu, matrix)
    }

    /// The map `x -> self(a·x)`.
    pub fn precompose_scalar(&self, a: Fe) -> Result<SemilinearIso, SemilinearError> {
        if a.is_zero() || !self.source.field().contains(a) {
            return Err(SemilinearError::NotInvertible);
        }
        let b = self.mu.apply(a);
        Ok(SemilinearIso { matrix: self.matrix.scale(b, self.target.field()), ..self.clone() })
    }

    /// The collineation `x̄ -> λ(x)‾`.
    pub fn induce(&self) -> Collineation {
        let d = self.source.dim();
        let kf = self.target.field();
        let mut v = vec![Fe::ZERO; d];
        let mut tw = vec![Fe::ZERO; d];
        let mut out = vec![Fe::ZERO; d];
        let sigma: Vec<u32> = (0..self.source.point_count() as u32)
            .map(|i| {
                self.source.coords_into(i, &mut v);
                for (t, &x) in tw.iter_mut().zip(&v) {
                    *t = self.mu.apply(x);
                }
                self.matrix.mul_vec_into(&tw, kf, &mut out);
                self.target.index_of_vector(&out).expect("invertible map")
            })
            .collect();
        Collineation::from_trusted(&self.source, &self.target, sigma)
    }
}

/// A collineation between two projective spaces: a point bijection `sigma`
/// carrying lines onto lines, together with the induced line bijection `tau`.
#[derive(Clone, PartialEq, Eq)]
pub struct Collineation {
    source: ProjSpace,
    target: ProjSpace,
    sigma: Vec<u32>,
    tau: Vec<u32>,
}

impl fmt::Debug for Collineation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Collineation({:?} -> {:?})", self.source, self.target)
    }
}

impl Collineation {
    /// Builds a collineation from a point table, verifying that it is a
    /// bijection sending every line onto a line.
    pub fn from_points(
        source: &ProjSpace,
        target: &ProjSpace,
        sigma: Vec<u32>,
    ) -> Result<Collineation, SemilinearError> {
        if source.dim() != target.dim() {
            return Err(SemilinearError::DimensionMismatch { expected: source.dim(), got: target.dim() });
        }
        check_isomorphic(source.field(), target.field())?;
        let n = source.point_count();
        if sigma.len() != n {
            return Err(SemilinearError::DimensionMismatch { expected: n, got: sigma.len() });
        }
        let mut hit = vec![false; n];
        for &s in &sigma {
            if s as usize >= n || hit[s as usize] {
                return Err(SemilinearError::NotBijective { point: s });
            }
            hit[s as usize] = true;
        }
        let mut tau = Vec::with_capacity(source.line_count());
        for l in 0..source.line_count() as u32 {
            tau.push(image_line(source, target, &sigma, l).ok_or(SemilinearError::NotLinePreserving { line: l })?);
        }
        Ok(Collineation { source: source.clone(), target: target.clone(), sigma, tau })
    }

    /// For point tables known to come from a semilinear map.
    pub(crate) fn from_trusted(source: &ProjSpace, target: &ProjSpace, sigma: Vec<u32>) -> Collineation {
        let tau = (0..source.line_count() as u32)
            .map(|l| {
                let b = source.line_chart(l);
                target.join_idx(sigma[b[0] as usize], sigma[b[source.field().q() as usize] as usize]).unwrap()
            })
            .collect();
        Collineation { source: source.clone(), target: target.clone(), sigma, tau }
    }

    pub fn identity(space: &ProjSpace) -> Collineation {
        Collineation::from_trusted(space, space, (0..space.point_count() as u32).collect())
    }

    pub fn source(&self) -> &ProjSpace {
        &self.source
    }

    pub fn target(&self) -> &ProjSpace {
        &self.target
    }

    pub fn sigma(&self) -> &[u32] {
        &self.sigma
    }

    pub fn tau(&self) -> &[u32] {
        &self.tau
    }

    pub fn point_image(&self, p: u32) -> u32 {
        self.sigma[p as usize]
    }

    pub fn line_image(&self, l: u32) -> u32 {
        self.tau[l as usize]
    }

    /// `next ∘ self`.
    pub fn then(&self, next: &Collineation) -> Result<Collineation, SemilinearError> {
        if self.target != next.source {
            return Err(GeomError::SpaceMismatch.into());
        }
        Ok(Collineation {
            source: self.source.clone(),
            target: next.target.clone(),
            sigma: self.sigma.iter().map(|&p| next.sigma[p as usize]).collect(),
            tau: self.tau.iter().map(|&l| next.tau[l as usize]).collect(),
        })
    }

    pub fn inverse(&self) -> Collineation {
        let mut sigma = vec![NONE; self.sigma.len()];
        for (i, &s) in self.sigma.iter().enumerate() {
            sigma[s as usize] = i as u32;
        }
        let mut tau = vec![NONE; self.tau.len()];
        for (i, &t) in self.tau.iter().enumerate() {
            tau[t as usize] = i as u32;
        }
        Collineation { source: self.target.clone(), target: self.source.clone(), sigma, tau }
    }

    /// Checks `tau(l) = sigma(l)` as point sets for every line.
    pub fn check_lines(&self) -> Result<(), SemilinearError> {
        for l in 0..self.source.line_count() as u32 {
            let m = self.tau[l as usize];
            if !self.source.points_on(l).iter().all(|&p| self.target.on_line(self.sigma[p as usize], m)) {
                return Err(SemilinearError::NotLinePreserving { line: l });
            }
        }
        Ok(())
    }
}

/// The line through the images of the points of `l`, if they are collinear.
pub(crate) fn image_line(source: &ProjSpace, target: &ProjSpace, sigma: &[u32], l: u32) -> Option<u32> {
    let pts = source.points_on(l);
    let a = sigma[pts[0] as usize];
    let b = sigma[pts[1] as usize];
    let m = target.join_idx(a, b).ok()?;
    pts[2..].iter().all(|&p| target.on_line(sigma[p as usize], m)).then_some(m)
}

/// Recovers the semilinear isomorphism inducing `c`, normalized so the first
/// column of its matrix is in canonical form (leading nonzero entry one).
pub fn decode_ftpg(c: &Collineation) -> Result<SemilinearIso, SemilinearError> {
    let (src, tgt) = (&c.source, &c.target);
    let d = src.dim();
    if d < 3 {
        return Err(SemilinearError::DimensionTooSmall(d));
    }
    // Re-derive tau from sigma so a tampered table cannot slip through.
    let checked = Collineation::from_points(src, tgt, c.sigma.clone())?;
    if checked.tau != c.tau {
        let bad = (0..c.tau.len()).find(|&l| checked.tau[l] != c.tau[l]).unwrap_or(0);
        return Err(SemilinearError::NotLinePreserving { line: bad as u32 });
    }
    let (k1, k2) = (src.field(), tgt.field());

    let img = |v: &[Fe]| tgt.coords_of(c.sigma[src.index_of_vector(v).unwrap() as usize]);
    let mut e = vec![Fe::ZERO; d];
    let mut w_cols = Vec::with_capacity(d);
    for i in 0..d {
        e.fill(Fe::ZERO);
        e[i] = Fe::ONE;
        w_cols.push(img(&e));
    }
    let unit = img(&vec![Fe::ONE; d]);
    let w = Matrix::from_columns(&w_cols);
    let coef = w.solve(&unit, k2).ok_or(SemilinearError::FrameDegenerate)?;
    if coef.iter().any(|x| x.is_zero()) {
        return Err(SemilinearError::FrameDegenerate);
    }
    let v_cols: Vec<Vec<Fe>> =
        w_cols.iter().zip(&coef).map(|(col, &s)| col.iter().map(|&x| k2.mul(x, s)).collect()).collect();

    // mu(a) is the coordinate of sigma(e1 + a e2) along v1 + mu(a) v2.
    let plane = Matrix::from_columns(&[v_cols[0].clone(), v_cols[1].clone()]);
    let mu_of = |a: Fe| -> Result<Fe, SemilinearError> {
        let mut x = vec![Fe::ZERO; d];
        x[0] = Fe::ONE;
        x[1] = a;
        let y = img(&x);
        let st = plane.solve(&y, k2).ok_or(SemilinearError::NotInduced)?;
        k2.div(st[1], st[0]).map_err(|_| SemilinearError::NotInduced)
    };
    let g = k1.generator();
    let g_image = mu_of(g)?;
    let mut mu = None;
    for exp in 0..k1.n() {
        let cand = FieldIso::new(k1, k2, exp)?;
        if cand.apply(g) == g_image {
            mu = Some(cand);
            break;
        }
    }
    let mu = mu.ok_or(SemilinearError::NoFieldAutomorphism)?;

    let matrix = Matrix::from_columns(&v_cols);
    let lead = *v_cols[0].iter().find(|x| !x.is_zero()).expect("nonzero column");
    let matrix = matrix.scale(k2.inv(lead).expect("nonzero"), k2);
    let lambda = SemilinearIso::new(src, tgt, mu, matrix)?;
    if lambda.induce().sigma != c.sigma {
        return Err(SemilinearError::NotInduced);
    }
    Ok(lambda)
}

/// The unique `a` with `λ2(x) = λ1(a·x)` for all `x`, if it exists.
pub fn equal_up_to_scalar(l1: &SemilinearIso, l2: &SemilinearIso) -> Option<Fe> {
    if l1.source != l2.source || l1.target != l2.target || l1.mu != l2.mu {
        return None;
    }
    let k2 = l1.target.field();
    let (m1, m2) = (l1.matrix.data(), l2.matrix.data());
    let pos = m1.iter().position(|x| !x.is_zero())?;
    let b = k2.div(m2[pos], m1[pos]).ok()?;
    if b.is_zero() {
        return None;
    }
    if m1.iter().zip(m2).all(|(&x, &y)| k2.mul(x, b) == y) {
        Some(l1.mu.apply_inverse(b))
    } else {
        None
    }
}
