//! Projective spaces P(V) over finite fields with their lines.
//!
//! Points are stored in canonical form (leftmost nonzero coordinate equal to
//! one) and numbered in a fixed canonical order: first by the position of the
//! leading one, then by the remaining coordinates read as a base-q number with
//! the last coordinate least significant. Lines are 2-dimensional subspaces
//! held by their reduced row echelon basis.
//!
//! Algorithms work on `u32` point and line indices through the precomputed
//! incidence structure. The coordinate API ([`ProjSpace::join`],
//! [`ProjSpace::meet`], ...) goes through linear algebra instead, so the two
//! routes can be checked against each other.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, OnceLock};

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gf::{Fe, Gf};
use crate::linalg::Matrix;

/// Sentinel for "no point"/"no line" in index tables.
pub const NONE: u32 = u32::MAX;

const MAX_POINTS: u64 = 1_000_000;
const MAX_INCIDENCES: u64 = 50_000_000;
const JOIN_TABLE_LIMIT: usize = 4096;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GeomError {
    #[error("vector space dimension must be at least 2, got {0}")]
    DimensionTooSmall(usize),
    #[error("projective space over GF({q}) of dimension {dim} is too large")]
    TooLarge { q: u32, dim: usize },
    #[error("expected a vector of length {expected}, got {got}")]
    WrongLength { expected: usize, got: usize },
    #[error("the zero vector does not define a point")]
    ZeroVector,
    #[error("coordinate {0} is not a field element")]
    NotAnElement(u32),
    #[error("index {0} is out of range")]
    BadIndex(u32),
    #[error("the two points coincide")]
    SamePoint,
    #[error("the two lines coincide")]
    SameLine,
    #[error("the input set is empty")]
    Empty,
    #[error("the centre lies on one of the lines")]
    CenterOnLine,
    #[error("lines and centre are not coplanar")]
    NotCoplanar,
    #[error("point is not on the source line")]
    NotOnLine,
    #[error("configuration violates the hypotheses: {0}")]
    Hypothesis(&'static str),
    #[error("exhaustive check would need about {work} steps; use sampling")]
    Budget { work: u64 },
    #[error("objects come from different spaces")]
    SpaceMismatch,
}

/// A point given by its canonical coordinate vector.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ProjPoint {
    coords: Vec<Fe>,
}

impl ProjPoint {
    pub fn coords(&self) -> &[Fe] {
        &self.coords
    }
}

impl fmt::Display for ProjPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.coords.iter().enumerate() {
            if i > 0 {
                write!(f, ":")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

/// A line given by the reduced row echelon basis of its 2-dimensional subspace.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ProjLine {
    basis: [ProjPoint; 2],
}

impl ProjLine {
    pub fn basis(&self) -> &[ProjPoint; 2] {
        &self.basis
    }
}

impl fmt::Display for ProjLine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{} v {}]", self.basis[0], self.basis[1])
    }
}

/// Precomputed incidence data.
pub struct Incidence {
    /// Reduced basis point indices of each line.
    line_basis: Vec<[u32; 2]>,
    /// Points of each line, in chart order: `b0 + c b1` for `c` in encoding
    /// order, then `b1`.
    line_chart: Vec<Vec<u32>>,
    /// Points of each line, sorted.
    line_points: Vec<Vec<u32>>,
    point_lines: Vec<Vec<u32>>,
    lookup: HashMap<[u32; 2], u32>,
    join: Option<Vec<u32>>,
}

struct SpaceInner {
    field: Gf,
    dim: usize,
    q: u64,
    point_count: usize,
    line_count: usize,
    /// offsets[i] = index of the first point whose leading one sits at i.
    offsets: Vec<u64>,
    incidence: OnceLock<Incidence>,
}

/// The projective space P(V) for V = GF(q)^dim.
#[derive(Clone)]
pub struct ProjSpace(Arc<SpaceInner>);

impl PartialEq for ProjSpace {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || (self.0.dim == other.0.dim && self.0.field == other.0.field)
    }
}

impl Eq for ProjSpace {}

impl fmt::Debug for ProjSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "P^{}({})", self.0.dim - 1, self.0.field)
    }
}

/// Number of k-dimensional subspaces of GF(q)^d.
fn gaussian_binomial(d: usize, k: usize, q: u64) -> Option<u64> {
    let mut num: u128 = 1;
    let mut den: u128 = 1;
    for i in 0..k {
        num = num.checked_mul((q as u128).checked_pow((d - i) as u32)? - 1)?;
        den = den.checked_mul((q as u128).checked_pow((i + 1) as u32)? - 1)?;
    }
    u64::try_from(num / den).ok()
}

impl ProjSpace {
    pub fn new(field: &Gf, dim: usize) -> Result<ProjSpace, GeomError> {
        if dim < 2 {
            return Err(GeomError::DimensionTooSmall(dim));
        }
        let q = field.q() as u64;
        let too_large = GeomError::TooLarge { q: field.q(), dim };
        let points = gaussian_binomial(dim, 1, q).ok_or(too_large.clone())?;
        let lines = gaussian_binomial(dim, 2, q).ok_or(too_large.clone())?;
        if points > MAX_POINTS || lines.saturating_mul(q + 1) > MAX_INCIDENCES {
            return Err(too_large);
        }
        let mut offsets = Vec::with_capacity(dim + 1);
        let mut acc = 0u64;
        for i in 0..dim {
            offsets.push(acc);
            acc += q.pow((dim - 1 - i) as u32);
        }
        offsets.push(acc);
        Ok(ProjSpace(Arc::new(SpaceInner {
            field: field.clone(),
            dim,
            q,
            point_count: points as usize,
            line_count: lines as usize,
            offsets,
            incidence: OnceLock::new(),
        })))
    }

    pub fn field(&self) -> &Gf {
        &self.0.field
    }

    /// Dimension of the underlying vector space.
    pub fn dim(&self) -> usize {
        self.0.dim
    }

    pub fn point_count(&self) -> usize {
        self.0.point_count
    }

    pub fn line_count(&self) -> usize {
        self.0.line_count
    }

    pub fn same_space(&self, other: &ProjSpace) -> bool {
        self == other
    }

    // ---- points ----

    /// Index of the point spanned by `v`, or `None` for the zero vector.
    /// `v` must have length `dim` and contain field elements.
    #[inline]
    pub fn index_of_vector(&self, v: &[Fe]) -> Option<u32> {
        let f = &self.0.field;
        let lead = v.iter().position(|c| !c.is_zero())?;
        let inv = f.inv(v[lead]).ok()?;
        let q = self.0.q;
        let mut r = 0u64;
        for &c in &v[lead + 1..] {
            r = r * q + f.mul(c, inv).value() as u64;
        }
        Some((self.0.offsets[lead] + r) as u32)
    }

    /// Canonical coordinates of the point with index `idx`.
    pub fn coords_of(&self, idx: u32) -> Vec<Fe> {
        let mut out = vec![Fe::ZERO; self.0.dim];
        self.coords_into(idx, &mut out);
        out
    }

    #[inline]
    pub fn coords_into(&self, idx: u32, out: &mut [Fe]) {
        let idx = idx as u64;
        let dim = self.0.dim;
        let lead = (0..dim).rev().find(|&i| self.0.offsets[i] <= idx).expect("index in range");
        let mut r = idx - self.0.offsets[lead];
        for c in out.iter_mut().take(lead) {
            *c = Fe::ZERO;
        }
        out[lead] = Fe::ONE;
        for k in (lead + 1..dim).rev() {
            out[k] = Fe((r % self.0.q) as u32);
            r /= self.0.q;
        }
    }

    pub fn point(&self, idx: u32) -> ProjPoint {
        assert!((idx as usize) < self.0.point_count, "point index out of range");
        ProjPoint { coords: self.coords_of(idx) }
    }

    /// The point spanned by a nonzero vector.
    pub fn point_from(&self, v: &[Fe]) -> Result<ProjPoint, GeomError> {
        let idx = self.checked_index(v)?;
        Ok(self.point(idx))
    }

    fn checked_index(&self, v: &[Fe]) -> Result<u32, GeomError> {
        if v.len() != self.0.dim {
            return Err(GeomError::WrongLength { expected: self.0.dim, got: v.len() });
        }
        if let Some(bad) = v.iter().find(|c| !self.0.field.contains(**c)) {
            return Err(GeomError::NotAnElement(bad.value()));
        }
        self.index_of_vector(v).ok_or(GeomError::ZeroVector)
    }

    pub fn index_of(&self, p: &ProjPoint) -> Result<u32, GeomError> {
        self.checked_index(&p.coords)
    }

    pub fn points(&self) -> impl Iterator<Item = ProjPoint> + '_ {
        (0..self.0.point_count as u32).map(|i| self.point(i))
    }

    /// The vector e_i (a standard frame point).
    pub fn basis_point(&self, i: usize) -> u32 {
        let mut v = vec![Fe::ZERO; self.0.dim];
        v[i] = Fe::ONE;
        self.index_of_vector(&v).unwrap()
    }

    // ---- incidence ----

    pub fn incidence(&self) -> &Incidence {
        self.0.incidence.get_or_init(|| build_incidence(self))
    }

    pub fn line(&self, idx: u32) -> ProjLine {
        let b = self.incidence().line_basis[idx as usize];
        ProjLine { basis: [self.point(b[0]), self.point(b[1])] }
    }

    pub fn line_index(&self, l: &ProjLine) -> Result<u32, GeomError> {
        let a = self.index_of(&l.basis[0])?;
        let b = self.index_of(&l.basis[1])?;
        self.join_idx(a, b)
    }

    pub fn lines(&self) -> impl Iterator<Item = ProjLine> + '_ {
        (0..self.0.line_count as u32).map(|i| self.line(i))
    }

    /// Points on line `l`, sorted by index.
    pub fn points_on(&self, l: u32) -> &[u32] {
        &self.incidence().line_points[l as usize]
    }

    /// Points on line `l` listed by their coordinate on the line's chart:
    /// position `c` (for `c < q`) holds `b0 + c b1`, position `q` holds `b1`.
    pub fn line_chart(&self, l: u32) -> &[u32] {
        &self.incidence().line_chart[l as usize]
    }

    pub fn lines_through(&self, p: u32) -> &[u32] {
        &self.incidence().point_lines[p as usize]
    }

    #[inline]
    pub fn on_line(&self, p: u32, l: u32) -> bool {
        self.points_on(l).binary_search(&p).is_ok()
    }

    /// Index of the line through two distinct points.
    pub fn join_idx(&self, a: u32, b: u32) -> Result<u32, GeomError> {
        if a == b {
            return Err(GeomError::SamePoint);
        }
        let n = self.0.point_count;
        if a as usize >= n {
            return Err(GeomError::BadIndex(a));
        }
        if b as usize >= n {
            return Err(GeomError::BadIndex(b));
        }
        let inc = self.incidence();
        if let Some(t) = &inc.join {
            return Ok(t[a as usize * n + b as usize]);
        }
        let key = self.reduced_basis(&self.coords_of(a), &self.coords_of(b));
        Ok(inc.lookup[&key])
    }

    fn reduced_basis(&self, u: &[Fe], v: &[Fe]) -> [u32; 2] {
        let f = &self.0.field;
        let (red, pivots) = Matrix::from_rows(&[u.to_vec(), v.to_vec()]).rref(f);
        debug_assert_eq!(pivots.len(), 2);
        [self.index_of_vector(red.row(0)).unwrap(), self.index_of_vector(red.row(1)).unwrap()]
    }

    /// Common point of two distinct lines, if they meet.
    pub fn meet_idx(&self, l: u32, m: u32) -> Option<u32> {
        let (a, b) = (self.points_on(l), self.points_on(m));
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].cmp(&b[j]) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => return Some(a[i]),
            }
        }
        None
    }

    pub fn collinear_idx(&self, pts: &[u32]) -> bool {
        let mut distinct: Vec<u32> = pts.to_vec();
        distinct.sort_unstable();
        distinct.dedup();
        if distinct.len() <= 2 {
            return true;
        }
        let l = self.join_idx(distinct[0], distinct[1]).expect("distinct points");
        distinct[2..].iter().all(|&p| self.on_line(p, l))
    }

    pub fn concurrent_idx(&self, lines: &[u32]) -> bool {
        let mut distinct: Vec<u32> = lines.to_vec();
        distinct.sort_unstable();
        distinct.dedup();
        match distinct.len() {
            0 | 1 => true,
            _ => match self.meet_idx(distinct[0], distinct[1]) {
                None => false,
                Some(x) => distinct[2..].iter().all(|&l| self.on_line(x, l)),
            },
        }
    }

    // ---- coordinate API ----

    /// The line through two distinct points.
    pub fn join(&self, p: &ProjPoint, q: &ProjPoint) -> Result<ProjLine, GeomError> {
        let a = self.index_of(p)?;
        let b = self.index_of(q)?;
        if a == b {
            return Err(GeomError::SamePoint);
        }
        let [x, y] = self.reduced_basis(&p.coords, &q.coords);
        Ok(ProjLine { basis: [self.point(x), self.point(y)] })
    }

    /// Common point of two distinct lines; `None` when they are skew.
    pub fn meet(&self, l: &ProjLine, m: &ProjLine) -> Result<Option<ProjPoint>, GeomError> {
        if l == m {
            return Err(GeomError::SameLine);
        }
        let basis = subspace_intersection(&self.0.field, &line_rows(l), &line_rows(m));
        match basis.len() {
            0 => Ok(None),
            1 => Ok(Some(self.point_from(&basis[0])?)),
            _ => Err(GeomError::SameLine),
        }
    }

    /// True iff one line contains all the given points.
    pub fn collinear(&self, pts: &[ProjPoint]) -> Result<bool, GeomError> {
        if pts.is_empty() {
            return Err(GeomError::Empty);
        }
        for p in pts {
            self.index_of(p)?;
        }
        let rows: Vec<Vec<Fe>> = pts.iter().map(|p| p.coords.clone()).collect();
        Ok(Matrix::from_rows(&rows).rank(&self.0.field) <= 2)
    }

    /// True iff one point lies on all the given lines.
    pub fn concurrent(&self, lines: &[ProjLine]) -> Result<bool, GeomError> {
        let (first, rest) = lines.split_first().ok_or(GeomError::Empty)?;
        let mut common = line_rows(first);
        for l in rest {
            common = subspace_intersection(&self.0.field, &common, &line_rows(l));
            if common.is_empty() {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Whether `p` lies on `l`, by rank.
    pub fn incident(&self, p: &ProjPoint, l: &ProjLine) -> bool {
        let mut rows = line_rows(l);
        rows.push(p.coords.clone());
        Matrix::from_rows(&rows).rank(&self.0.field) == 2
    }

    /// The perspectivity from `from` to `to` with the given centre.
    pub fn perspectivity(
        &self,
        from: &ProjLine,
        to: &ProjLine,
        center: &ProjPoint,
    ) -> Result<Perspectivity, GeomError> {
        if self.incident(center, from) || self.incident(center, to) {
            return Err(GeomError::CenterOnLine);
        }
        let mut rows = line_rows(from);
        rows.extend(line_rows(to));
        rows.push(center.coords.clone());
        if Matrix::from_rows(&rows).rank(&self.0.field) > 3 {
            return Err(GeomError::NotCoplanar);
        }
        Ok(Perspectivity {
            space: self.clone(),
            from: from.clone(),
            to: to.clone(),
            center: center.clone(),
        })
    }

    // ---- random sampling ----

    pub fn random_point(&self, rng: &mut impl Rng) -> u32 {
        rng.gen_range(0..self.0.point_count as u32)
    }
}

fn line_rows(l: &ProjLine) -> Vec<Vec<Fe>> {
    vec![l.basis[0].coords.clone(), l.basis[1].coords.clone()]
}

/// Basis (as rows) of span(a) ∩ span(b); `a` and `b` are lists of
/// independent row vectors.
fn subspace_intersection(f: &Gf, a: &[Vec<Fe>], b: &[Vec<Fe>]) -> Vec<Vec<Fe>> {
    // Solve sum x_i a_i - sum y_j b_j = 0; each kernel vector gives sum x_i a_i.
    let dim = a[0].len();
    let cols: Vec<Vec<Fe>> = a
        .iter()
        .cloned()
        .chain(b.iter().map(|v| v.iter().map(|&c| f.neg(c)).collect()))
        .collect();
    let m = Matrix::from_columns(&cols);
    let kernel = m.nullspace(f);
    let mut vecs: Vec<Vec<Fe>> = kernel
        .iter()
        .map(|k| {
            let mut v = vec![Fe::ZERO; dim];
            for (i, row) in a.iter().enumerate() {
                for (c, &x) in row.iter().enumerate() {
                    v[c] = f.add(v[c], f.mul(k[i], x));
                }
            }
            v
        })
        .collect();
    if vecs.is_empty() {
        return vecs;
    }
    let (red, pivots) = Matrix::from_rows(&vecs).rref(f);
    vecs = (0..pivots.len()).map(|r| red.row(r).to_vec()).collect();
    vecs
}

fn build_incidence(space: &ProjSpace) -> Incidence {
    let dim = space.0.dim;
    let f = space.0.field.clone();
    let q = space.0.q as usize;
    let mut line_basis = Vec::with_capacity(space.0.line_count);
    let mut line_chart = Vec::with_capacity(space.0.line_count);
    let mut point_lines = vec![Vec::new(); space.0.point_count];
    let mut lookup = HashMap::with_capacity(space.0.line_count);

    for i in 0..dim {
        for j in i + 1..dim {
            // row0: 1 at i, 0 at j, free after i; row1: 1 at j, free after j.
            let free0: Vec<usize> = (i + 1..dim).filter(|&k| k != j).collect();
            let free1: Vec<usize> = (j + 1..dim).collect();
            let n0 = q.pow(free0.len() as u32);
            let n1 = q.pow(free1.len() as u32);
            for a in 0..n0 {
                for b in 0..n1 {
                    let mut r0 = vec![Fe::ZERO; dim];
                    let mut r1 = vec![Fe::ZERO; dim];
                    r0[i] = Fe::ONE;
                    r1[j] = Fe::ONE;
                    let mut x = a;
                    for &k in free0.iter().rev() {
                        r0[k] = Fe((x % q) as u32);
                        x /= q;
                    }
                    let mut y = b;
                    for &k in free1.iter().rev() {
                        r1[k] = Fe((y % q) as u32);
                        y /= q;
                    }
                    let b0 = space.index_of_vector(&r0).unwrap();
                    let b1 = space.index_of_vector(&r1).unwrap();
                    let idx = line_basis.len() as u32;
                    line_basis.push([b0, b1]);
                    lookup.insert([b0, b1], idx);
                    let mut chart = Vec::with_capacity(q + 1);
                    let mut v = vec![Fe::ZERO; dim];
                    for c in f.elements() {
                        for k in 0..dim {
                            v[k] = f.add(r0[k], f.mul(c, r1[k]));
                        }
                        chart.push(space.index_of_vector(&v).unwrap());
                    }
                    chart.push(b1);
                    for &p in &chart {
                        point_lines[p as usize].push(idx);
                    }
                    line_chart.push(chart);
                }
            }
        }
    }
    debug_assert_eq!(line_basis.len(), space.0.line_count);
    let line_points: Vec<Vec<u32>> = line_chart
        .iter()
        .map(|c| {
            let mut s = c.clone();
            s.sort_unstable();
            s
        })
        .collect();
    let n = space.0.point_count;
    let join = (n <= JOIN_TABLE_LIMIT).then(|| {
        let mut t = vec![NONE; n * n];
        for (l, pts) in line_points.iter().enumerate() {
            for &a in pts {
                for &b in pts {
                    if a != b {
                        t[a as usize * n + b as usize] = l as u32;
                    }
                }
            }
        }
        t
    });
    Incidence { line_basis, line_chart, line_points, point_lines, lookup, join }
}

/// Central projection of one line onto another: `x -> (x v center) ∩ to`.
#[derive(Clone, Debug)]
pub struct Perspectivity {
    space: ProjSpace,
    from: ProjLine,
    to: ProjLine,
    center: ProjPoint,
}

impl Perspectivity {
    pub fn apply(&self, x: &ProjPoint) -> Result<ProjPoint, GeomError> {
        if !self.space.incident(x, &self.from) {
            return Err(GeomError::NotOnLine);
        }
        if self.space.incident(x, &self.to) {
            return Ok(x.clone());
        }
        let ray = self.space.join(x, &self.center)?;
        self.space.meet(&ray, &self.to)?.ok_or(GeomError::NotCoplanar)
    }

    /// The perspectivity back from `to` to `from` with the same centre.
    pub fn inverse(&self) -> Perspectivity {
        Perspectivity {
            space: self.space.clone(),
            from: self.to.clone(),
            to: self.from.clone(),
            center: self.center.clone(),
        }
    }

    /// All `(x, image)` pairs over the source line.
    pub fn pairs(&self) -> Result<Vec<(ProjPoint, ProjPoint)>, GeomError> {
        let l = self.space.line_index(&self.from)?;
        self.space
            .points_on(l)
            .iter()
            .map(|&i| {
                let x = self.space.point(i);
                let y = self.apply(&x)?;
                Ok((x, y))
            })
            .collect()
    }
}

// ---- axiom and Desargues checkers ----

/// How thoroughly a checker should search.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum CheckMode {
    Exhaustive,
    Sampled { samples: u64, seed: u64 },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AxiomOutcome {
    pub passed: bool,
    pub checked: u64,
    /// Point indices of the first counterexample.
    pub witness: Option<Vec<u32>>,
}

impl AxiomOutcome {
    fn new() -> Self {
        AxiomOutcome { passed: true, checked: 0, witness: None }
    }

    fn fail(&mut self, w: Vec<u32>) {
        if self.passed {
            self.passed = false;
            self.witness = Some(w);
        }
    }
}

/// Outcome of checking the three incidence axioms.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AxiomReport {
    /// Two distinct points lie on exactly one line.
    pub unique_join: AxiomOutcome,
    /// Veblen-Young: if p0,p1,q1 and p0,p2,q2 are collinear (p0,p1,p2 not,
    /// q1 != q2) then p1 v p2 and q1 v q2 meet.
    pub veblen: AxiomOutcome,
    /// Every line has at least three points.
    pub three_points: AxiomOutcome,
}

impl AxiomReport {
    pub fn passed(&self) -> bool {
        self.unique_join.passed && self.veblen.passed && self.three_points.passed
    }
}

const EXHAUSTIVE_WORK_LIMIT: u64 = 2_000_000_000;

/// Checks the incidence axioms of projective geometry on `space`.
pub fn check_axioms(space: &ProjSpace, mode: CheckMode) -> Result<AxiomReport, GeomError> {
    let n = space.point_count() as u64;
    let q1 = space.0.q + 1;
    let mut report = AxiomReport {
        unique_join: AxiomOutcome::new(),
        veblen: AxiomOutcome::new(),
        three_points: AxiomOutcome::new(),
    };
    let count_common_lines = |a: u32, b: u32| -> usize {
        let la = space.lines_through(a);
        space.lines_through(b).iter().filter(|l| la.contains(l)).count()
    };
    let veblen_case = |p0: u32, p1: u32, p2: u32, out: &mut AxiomOutcome| {
        if p0 == p1 || p0 == p2 || p1 == p2 || space.collinear_idx(&[p0, p1, p2]) {
            return;
        }
        let l01 = space.join_idx(p0, p1).unwrap();
        let l02 = space.join_idx(p0, p2).unwrap();
        let l12 = space.join_idx(p1, p2).unwrap();
        for &a in space.points_on(l01) {
            for &b in space.points_on(l02) {
                if a == b {
                    continue;
                }
                out.checked += 1;
                let m = space.join_idx(a, b).unwrap();
                if m != l12 && space.meet_idx(l12, m).is_none() {
                    out.fail(vec![p0, p1, p2, a, b]);
                }
            }
        }
    };

    match mode {
        CheckMode::Exhaustive => {
            let work = n.saturating_mul(n).saturating_mul(n).saturating_mul(q1 * q1);
            if n > 10_000 || work > EXHAUSTIVE_WORK_LIMIT {
                return Err(GeomError::Budget { work });
            }
            for a in 0..n as u32 {
                for b in a + 1..n as u32 {
                    report.unique_join.checked += 1;
                    if count_common_lines(a, b) != 1 {
                        report.unique_join.fail(vec![a, b]);
                    }
                }
            }
            for p0 in 0..n as u32 {
                for p1 in 0..n as u32 {
                    for p2 in p1 + 1..n as u32 {
                        veblen_case(p0, p1, p2, &mut report.veblen);
                    }
                }
            }
        }
        CheckMode::Sampled { samples, seed } => {
            use rand::SeedableRng;
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            for _ in 0..samples {
                let a = space.random_point(&mut rng);
                let b = space.random_point(&mut rng);
                if a != b {
                    report.unique_join.checked += 1;
                    if count_common_lines(a, b) != 1 {
                        report.unique_join.fail(vec![a, b]);
                    }
                }
                let (p0, p1, p2) = (
                    space.random_point(&mut rng),
                    space.random_point(&mut rng),
                    space.random_point(&mut rng),
                );
                veblen_case(p0, p1, p2, &mut report.veblen);
            }
        }
    }
    for l in 0..space.line_count() as u32 {
        report.three_points.checked += 1;
        if space.points_on(l).len() < 3 {
            report.three_points.fail(space.points_on(l).to_vec());
        }
    }
    Ok(report)
}

/// Both sides of Desargues' equivalence for one configuration.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DesarguesOutcome {
    /// p1 v q1, p2 v q2, p3 v q3 are concurrent.
    pub perspective_from_point: bool,
    /// The three side intersections are collinear.
    pub perspective_from_line: bool,
}

impl DesarguesOutcome {
    pub fn agrees(&self) -> bool {
        self.perspective_from_point == self.perspective_from_line
    }
}

enum Section {
    Empty,
    Point(u32),
    Line(u32),
}

/// Evaluates Desargues' equivalence for triangles `p1p2p3` and `q1q2q3`
/// given as point indices `[p1, p2, p3, q1, q2, q3]`.
///
/// When a pair of corresponding sides coincide, their intersection is that
/// whole line and the right-hand side asks whether some choice of points from
/// the three intersections is collinear.
pub fn desargues_idx(space: &ProjSpace, cfg: [u32; 6]) -> Result<DesarguesOutcome, GeomError> {
    let [p1, p2, p3, q1, q2, q3] = cfg;
    for &x in &cfg {
        if x as usize >= space.point_count() {
            return Err(GeomError::BadIndex(x));
        }
    }
    if p1 == p2 || p2 == p3 || p1 == p3 || space.collinear_idx(&[p1, p2, p3]) {
        return Err(GeomError::Hypothesis("p1, p2, p3 are collinear"));
    }
    if q1 == q2 || q2 == q3 || q1 == q3 || space.collinear_idx(&[q1, q2, q3]) {
        return Err(GeomError::Hypothesis("q1, q2, q3 are collinear"));
    }
    if p1 == q1 || p2 == q2 || p3 == q3 {
        return Err(GeomError::Hypothesis("p_i = q_i for some i"));
    }
    let j = |a: u32, b: u32| space.join_idx(a, b).unwrap();
    let from_point = space.concurrent_idx(&[j(p1, q1), j(p2, q2), j(p3, q3)]);

    let section = |a: u32, b: u32| {
        if a == b {
            Section::Line(a)
        } else {
            match space.meet_idx(a, b) {
                Some(x) => Section::Point(x),
                None => Section::Empty,
            }
        }
    };
    let sides = [
        section(j(p2, p3), j(q2, q3)),
        section(j(p3, p1), j(q3, q1)),
        section(j(p1, p2), j(q1, q2)),
    ];
    let choices: Option<Vec<Vec<u32>>> = sides
        .iter()
        .map(|s| match s {
            Section::Empty => None,
            Section::Point(x) => Some(vec![*x]),
            Section::Line(l) => Some(space.points_on(*l).to_vec()),
        })
        .collect();
    let from_line = match choices {
        None => false,
        Some(c) => c[0].iter().any(|&a| {
            c[1].iter().any(|&b| c[2].iter().any(|&d| space.collinear_idx(&[a, b, d])))
        }),
    };
    Ok(DesarguesOutcome { perspective_from_point: from_point, perspective_from_line: from_line })
}

/// Coordinate-level entry point for [`desargues_idx`].
pub fn check_desargues(space: &ProjSpace, cfg: &[ProjPoint; 6]) -> Result<DesarguesOutcome, GeomError> {
    let mut idx = [0u32; 6];
    for (slot, p) in idx.iter_mut().zip(cfg) {
        *slot = space.index_of(p)?;
    }
    desargues_idx(space, idx)
}

/// Summary of a Desargues sweep.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DesarguesSummary {
    pub configurations: u64,
    pub perspective_pairs: u64,
    pub disagreements: u64,
    pub first_disagreement: Option<[u32; 6]>,
}

/// Runs Desargues' equivalence over every admissible configuration or a
/// random sample of them.
pub fn desargues_sweep(space: &ProjSpace, mode: CheckMode) -> Result<DesarguesSummary, GeomError> {
    let n = space.point_count() as u32;
    let mut summary = DesarguesSummary {
        configurations: 0,
        perspective_pairs: 0,
        disagreements: 0,
        first_disagreement: None,
    };
    let record = |cfg: [u32; 6], out: DesarguesOutcome, s: &mut DesarguesSummary| {
        s.configurations += 1;
        if out.perspective_from_point {
            s.perspective_pairs += 1;
        }
        if !out.agrees() {
            s.disagreements += 1;
            s.first_disagreement.get_or_insert(cfg);
        }
    };
    match mode {
        CheckMode::Exhaustive => {
            let triangles: Vec<[u32; 3]> = ordered_triangles(space);
            let work = (triangles.len() as u64).pow(2);
            if work > EXHAUSTIVE_WORK_LIMIT / 100 {
                return Err(GeomError::Budget { work });
            }
            for t in &triangles {
                for s in &triangles {
                    if t[0] == s[0] || t[1] == s[1] || t[2] == s[2] {
                        continue;
                    }
                    let cfg = [t[0], t[1], t[2], s[0], s[1], s[2]];
                    let out = desargues_idx(space, cfg)?;
                    record(cfg, out, &mut summary);
                }
            }
        }
        CheckMode::Sampled { samples, seed } => {
            use rand::SeedableRng;
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let mut taken = 0;
            let mut attempts = 0u64;
            while taken < samples && attempts < samples.saturating_mul(1000) {
                attempts += 1;
                let mut cfg = [0u32; 6];
                for c in cfg.iter_mut() {
                    *c = rng.gen_range(0..n);
                }
                if let Ok(out) = desargues_idx(space, cfg) {
                    taken += 1;
                    record(cfg, out, &mut summary);
                }
            }
        }
    }
    Ok(summary)
}

fn ordered_triangles(space: &ProjSpace) -> Vec<[u32; 3]> {
    let n = space.point_count() as u32;
    let mut out = Vec::new();
    for a in 0..n {
        for b in 0..n {
            if a == b {
                continue;
            }
            let l = space.join_idx(a, b).unwrap();
            for c in 0..n {
                if c != a && c != b && !space.on_line(c, l) {
                    out.push([a, b, c]);
                }
            }
        }
    }
    out
}
