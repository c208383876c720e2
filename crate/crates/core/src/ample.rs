//! Admissible families of subsets of the projective line and the subsets of
//! P(V) that are ample with respect to them.
//!
//! Subsets of P¹(k) are lists of point indices of the 2-dimensional
//! [`ProjSpace`]: `(1:c)` has index `c` and `(0:1)` has index `q`.

use std::collections::HashSet;
use std::fmt;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gf::{Fe, Gf};
use crate::projgeom::{GeomError, ProjSpace};

/// Work limit for enumerations over PGL₂ and line charts.
pub const ENUMERATION_BUDGET: u64 = 200_000_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AmpleError {
    #[error("family is over {family} but the space is over {space}")]
    FieldMismatch { family: String, space: String },
    #[error("{0} is not a point of the projective line")]
    BadLinePoint(u32),
    #[error("enumeration would take about {work} steps")]
    Budget { work: u64 },
    #[error(transparent)]
    Geometry(#[from] GeomError),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FamilyKind {
    /// Only the empty subset.
    EmptyOnly,
    /// All subsets with at most `t` points.
    SizeAtMost { t: usize },
    /// An explicit list of subsets (sorted, deduplicated).
    Explicit { sets: Vec<Vec<u32>> },
}

/// A family 𝒮 of subsets of P¹(k).
#[derive(Clone, Debug)]
pub struct AmpleFamily {
    field: Gf,
    kind: FamilyKind,
    members: HashSet<Vec<u32>>,
    stable: bool,
    downward_closed: bool,
}

/// Projective linear maps of the line, as matrices with first nonzero entry 1.
pub fn pgl2(f: &Gf) -> Vec<[Fe; 4]> {
    let mut out = Vec::new();
    for a in f.elements() {
        for b in f.elements() {
            for c in f.elements() {
                for d in f.elements() {
                    let first = [a, b, c, d].into_iter().find(|x| !x.is_zero());
                    if first != Some(Fe::ONE) {
                        continue;
                    }
                    if f.sub(f.mul(a, d), f.mul(b, c)).is_zero() {
                        continue;
                    }
                    out.push([a, b, c, d]);
                }
            }
        }
    }
    out
}

/// Image of a P¹ index under `(x:y) -> (ax + by : cx + dy)`.
pub fn pgl2_apply(line: &ProjSpace, g: &[Fe; 4], idx: u32) -> u32 {
    let f = line.field();
    let v = line.coords_of(idx);
    let w = [f.add(f.mul(g[0], v[0]), f.mul(g[1], v[1])), f.add(f.mul(g[2], v[0]), f.mul(g[3], v[1]))];
    line.index_of_vector(&w).expect("invertible")
}

fn normalize(set: &[u32]) -> Vec<u32> {
    let mut s = set.to_vec();
    s.sort_unstable();
    s.dedup();
    s
}

impl AmpleFamily {
    pub fn empty_only(field: &Gf) -> AmpleFamily {
        Self::intensional(field, FamilyKind::EmptyOnly)
    }

    pub fn size_at_most(field: &Gf, t: usize) -> AmpleFamily {
        Self::intensional(field, FamilyKind::SizeAtMost { t })
    }

    fn intensional(field: &Gf, kind: FamilyKind) -> AmpleFamily {
        AmpleFamily { field: field.clone(), kind, members: HashSet::new(), stable: true, downward_closed: true }
    }

    /// An explicit family; PGL₂-stability is decided by enumeration.
    pub fn explicit(field: &Gf, sets: &[Vec<u32>]) -> Result<AmpleFamily, AmpleError> {
        let npts = field.q() + 1;
        let mut members = HashSet::new();
        for s in sets {
            if let Some(&bad) = s.iter().find(|&&x| x >= npts) {
                return Err(AmpleError::BadLinePoint(bad));
            }
            members.insert(normalize(s));
        }
        let mut list: Vec<Vec<u32>> = members.iter().cloned().collect();
        list.sort();
        let q = field.q() as u64;
        let group = q * (q * q - 1);
        let work = group.saturating_mul(list.iter().map(|s| s.len() as u64 + 1).sum());
        if work > ENUMERATION_BUDGET {
            return Err(AmpleError::Budget { work });
        }
        let line = ProjSpace::new(field, 2)?;
        let stable = pgl2(field).iter().all(|g| {
            list.iter().all(|s| {
                let image: Vec<u32> = s.iter().map(|&x| pgl2_apply(&line, g, x)).collect();
                members.contains(&normalize(&image))
            })
        });
        let downward_closed = list.iter().all(|s| {
            (0..s.len()).all(|skip| {
                let sub: Vec<u32> = s.iter().enumerate().filter(|&(i, _)| i != skip).map(|(_, &x)| x).collect();
                members.contains(&sub)
            })
        });
        Ok(AmpleFamily {
            field: field.clone(),
            kind: FamilyKind::Explicit { sets: list },
            members,
            stable,
            downward_closed,
        })
    }

    pub fn field(&self) -> &Gf {
        &self.field
    }

    pub fn kind(&self) -> &FamilyKind {
        &self.kind
    }

    pub fn is_pgl2_stable(&self) -> bool {
        self.stable
    }

    /// Every subset of a member is a member.
    pub fn is_downward_closed(&self) -> bool {
        self.downward_closed
    }

    /// Membership of a subset of P¹(k) given by indices.
    pub fn contains(&self, set: &[u32]) -> bool {
        match &self.kind {
            FamilyKind::EmptyOnly => set.is_empty(),
            FamilyKind::SizeAtMost { t } => normalize(set).len() <= *t,
            FamilyKind::Explicit { .. } => self.members.contains(&normalize(set)),
        }
    }

    /// True iff the family is PGL₂-stable and no union of at most `m`
    /// members and at most `n` points is all of P¹(k).
    pub fn is_mn_admissible(&self, m: usize, n: usize) -> bool {
        if !self.stable {
            return false;
        }
        let npts = self.field.q() as usize + 1;
        match &self.kind {
            FamilyKind::EmptyOnly => n < npts,
            FamilyKind::SizeAtMost { t } => {
                // Largest union: m pairwise disjoint members, then n fresh points.
                let mut covered = vec![false; npts];
                let mut next = 0;
                for _ in 0..m {
                    for _ in 0..*t {
                        if next < npts {
                            covered[next] = true;
                            next += 1;
                        }
                    }
                }
                let uncovered = covered.iter().filter(|c| !**c).count();
                uncovered > n
            }
            FamilyKind::Explicit { sets } => {
                let masks: Vec<Vec<bool>> = sets
                    .iter()
                    .map(|s| {
                        let mut v = vec![false; npts];
                        for &x in s {
                            v[x as usize] = true;
                        }
                        v
                    })
                    .collect();
                let mut covered = vec![0u32; npts];
                !covers(&masks, 0, m, n, &mut covered)
            }
        }
    }
}

/// Whether some choice of at most `left` masks (from `start` on, repeats
/// allowed) leaves at most `n` points uncovered.
fn covers(masks: &[Vec<bool>], start: usize, left: usize, n: usize, covered: &mut [u32]) -> bool {
    if covered.iter().filter(|&&c| c == 0).count() <= n {
        return true;
    }
    if left == 0 {
        return false;
    }
    for i in start..masks.len() {
        for (c, &b) in covered.iter_mut().zip(&masks[i]) {
            *c += b as u32;
        }
        let hit = covers(masks, i, left - 1, n, covered);
        for (c, &b) in covered.iter_mut().zip(&masks[i]) {
            *c -= b as u32;
        }
        if hit {
            return true;
        }
    }
    false
}

/// How a line is identified with P¹(k) when transporting a family.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Chart {
    /// `(x:y) -> x b0 + y b1` for the reduced basis `b0, b1`.
    Reduced,
    /// `(x:y) -> x b1 + y b0`.
    Swapped,
    /// `(x:y) -> x (b0 + b1) + y g b1` with `g` the field generator.
    Sheared,
}

/// `chart[i]` is the point of line `l` corresponding to P¹ index `i`.
pub fn chart_points(space: &ProjSpace, l: u32, chart: Chart) -> Vec<u32> {
    let f = space.field();
    let b = space.line_chart(l);
    let q = f.q() as usize;
    let (b0, b1) = (space.coords_of(b[0]), space.coords_of(b[q]));
    let (u, v): (Vec<Fe>, Vec<Fe>) = match chart {
        Chart::Reduced => return b.to_vec(),
        Chart::Swapped => (b1, b0),
        Chart::Sheared => {
            let g = f.generator();
            (b0.iter().zip(&b1).map(|(&x, &y)| f.add(x, y)).collect(), b1.iter().map(|&y| f.mul(g, y)).collect())
        }
    };
    let line = ProjSpace::new(f, 2).expect("dimension 2");
    (0..=q as u32)
        .map(|i| {
            let c = line.coords_of(i);
            let w: Vec<Fe> = u.iter().zip(&v).map(|(&x, &y)| f.add(f.mul(c[0], x), f.mul(c[1], y))).collect();
            space.index_of_vector(&w).unwrap()
        })
        .collect()
}

/// A subset U of the points of a projective space.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AmpleSubset {
    space: ProjSpace,
    points: Vec<u32>,
    mask: Vec<bool>,
}

impl AmpleSubset {
    pub fn new(space: &ProjSpace, points: &[u32]) -> Result<AmpleSubset, AmpleError> {
        let n = space.point_count();
        let mut mask = vec![false; n];
        for &p in points {
            if p as usize >= n {
                return Err(GeomError::BadIndex(p).into());
            }
            mask[p as usize] = true;
        }
        Ok(Self::from_mask(space, mask))
    }

    fn from_mask(space: &ProjSpace, mask: Vec<bool>) -> AmpleSubset {
        let points = (0..mask.len() as u32).filter(|&p| mask[p as usize]).collect();
        AmpleSubset { space: space.clone(), points, mask }
    }

    pub fn whole(space: &ProjSpace) -> AmpleSubset {
        Self::from_mask(space, vec![true; space.point_count()])
    }

    /// Everything except `removed`.
    pub fn complement_of(space: &ProjSpace, removed: &[u32]) -> Result<AmpleSubset, AmpleError> {
        let n = space.point_count();
        let mut mask = vec![true; n];
        for &p in removed {
            if p as usize >= n {
                return Err(GeomError::BadIndex(p).into());
            }
            mask[p as usize] = false;
        }
        Ok(Self::from_mask(space, mask))
    }

    pub fn space(&self) -> &ProjSpace {
        &self.space
    }

    /// Sorted point indices.
    pub fn points(&self) -> &[u32] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    #[inline]
    pub fn contains(&self, p: u32) -> bool {
        self.mask.get(p as usize).copied().unwrap_or(false)
    }

    pub fn complement(&self) -> Vec<u32> {
        (0..self.mask.len() as u32).filter(|&p| !self.mask[p as usize]).collect()
    }

    /// Points of line `l` inside U.
    pub fn on_line(&self, l: u32) -> Vec<u32> {
        self.space.points_on(l).iter().copied().filter(|&p| self.contains(p)).collect()
    }

    pub fn meets(&self, l: u32) -> bool {
        self.space.points_on(l).iter().any(|&p| self.contains(p))
    }

    /// The lines with at least one point in U.
    pub fn lines_meeting(&self) -> Vec<u32> {
        (0..self.space.line_count() as u32).filter(|&l| self.meets(l)).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "reason", rename_all = "snake_case")]
pub enum AmpleWitness {
    /// U is empty.
    EmptySubset,
    /// A line meeting U whose remaining points are not in the family.
    Line { line: u32, complement: Vec<u32> },
}

impl fmt::Display for AmpleWitness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AmpleWitness::EmptySubset => write!(f, "the subset is empty"),
            AmpleWitness::Line { line, complement } => {
                write!(f, "line {line} misses the points {complement:?}, which are not a small set")
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AmpleReport {
    pub ample: bool,
    pub witness: Option<AmpleWitness>,
    /// Largest `|ℓ \ U|` over lines meeting U.
    pub max_complement: usize,
    pub lines_checked: u64,
}

/// Decides whether U is ample for the family, transporting the family to each
/// line through the given chart. For families that are not PGL₂-stable a line
/// passes if some chart carries its complement into the family.
pub fn is_ample_with_chart(u: &AmpleSubset, fam: &AmpleFamily, chart: Chart) -> Result<AmpleReport, AmpleError> {
    let space = &u.space;
    if fam.field.p() != space.field().p() || fam.field.n() != space.field().n() {
        return Err(AmpleError::FieldMismatch { family: fam.field.to_string(), space: space.field().to_string() });
    }
    let mut report = AmpleReport { ample: true, witness: None, max_complement: 0, lines_checked: 0 };
    if u.is_empty() {
        report.ample = false;
        report.witness = Some(AmpleWitness::EmptySubset);
        return Ok(report);
    }
    let group = if fam.stable { Vec::new() } else { pgl2(space.field()) };
    let line = ProjSpace::new(space.field(), 2)?;
    if !fam.stable {
        let work = (group.len() as u64).saturating_mul(space.line_count() as u64);
        if work > ENUMERATION_BUDGET {
            return Err(AmpleError::Budget { work });
        }
    }
    for l in 0..space.line_count() as u32 {
        if !u.meets(l) {
            continue;
        }
        report.lines_checked += 1;
        let outside: Vec<u32> = space.points_on(l).iter().copied().filter(|&p| !u.contains(p)).collect();
        report.max_complement = report.max_complement.max(outside.len());
        let pass = match fam.kind {
            FamilyKind::EmptyOnly => outside.is_empty(),
            FamilyKind::SizeAtMost { t } => outside.len() <= t,
            FamilyKind::Explicit { .. } => {
                let pts = chart_points(space, l, chart);
                let local: Vec<u32> =
                    (0..pts.len() as u32).filter(|&i| !u.contains(pts[i as usize])).collect();
                fam.contains(&local)
                    || group.iter().any(|g| fam.contains(&local.iter().map(|&x| pgl2_apply(&line, g, x)).collect::<Vec<_>>()))
            }
        };
        if !pass && report.ample {
            report.ample = false;
            report.witness = Some(AmpleWitness::Line { line: l, complement: outside });
        }
    }
    Ok(report)
}

pub fn is_ample(u: &AmpleSubset, fam: &AmpleFamily) -> Result<AmpleReport, AmpleError> {
    is_ample_with_chart(u, fam, Chart::Reduced)
}

/// Points of a random subspace of the given vector dimension.
fn random_subspace(space: &ProjSpace, k: usize, rng: &mut impl Rng) -> Vec<u32> {
    let f = space.field();
    let d = space.dim();
    let q = f.q() as u64;
    loop {
        let basis: Vec<Vec<Fe>> = (0..k).map(|_| (0..d).map(|_| Fe(rng.gen_range(0..f.q()))).collect()).collect();
        let mut pts: Vec<u32> = (1..q.pow(k as u32))
            .filter_map(|mut idx| {
                let mut v = vec![Fe::ZERO; d];
                for b in &basis {
                    let c = Fe((idx % q) as u32);
                    idx /= q;
                    for (x, &y) in v.iter_mut().zip(b) {
                        *x = f.add(*x, f.mul(c, y));
                    }
                }
                space.index_of_vector(&v)
            })
            .collect();
        pts.sort_unstable();
        pts.dedup();
        let expected = ((q.pow(k as u32) - 1) / (q - 1)) as usize;
        if pts.len() == expected {
            return pts;
        }
    }
}

/// Draws a random nonempty subset that is ample for `fam`: the complement of
/// a random subspace, of a few random points, or of both. Candidates are
/// checked with [`is_ample`]; after `attempts` failures the whole space is
/// returned.
pub fn sample_ample_subset(
    space: &ProjSpace,
    fam: &AmpleFamily,
    attempts: usize,
    rng: &mut impl Rng,
) -> Result<AmpleSubset, AmpleError> {
    let t = match fam.kind {
        FamilyKind::EmptyOnly => 0,
        FamilyKind::SizeAtMost { t } => t,
        FamilyKind::Explicit { ref sets } => sets.iter().map(Vec::len).max().unwrap_or(0),
    };
    let d = space.dim();
    let n = space.point_count() as u32;
    for _ in 0..attempts {
        let mut removed = Vec::new();
        match rng.gen_range(0..3) {
            0 => {
                let k = rng.gen_range(1..d);
                removed.extend(random_subspace(space, k, rng));
            }
            1 => {
                let count = rng.gen_range(0..=t.max(1));
                removed.extend((0..count).map(|_| rng.gen_range(0..n)));
            }
            _ => {
                let k = rng.gen_range(1..d);
                removed.extend(random_subspace(space, k, rng));
                let count = rng.gen_range(0..=t);
                removed.extend((0..count).map(|_| rng.gen_range(0..n)));
            }
        }
        let cand = AmpleSubset::complement_of(space, &removed)?;
        if is_ample(&cand, fam)?.ample {
            return Ok(cand);
        }
    }
    Ok(AmpleSubset::whole(space))
}

/// A random subset of `size` points (not necessarily ample).
pub fn random_subset(space: &ProjSpace, size: usize, rng: &mut impl Rng) -> AmpleSubset {
    let mut all: Vec<u32> = (0..space.point_count() as u32).collect();
    all.shuffle(rng);
    all.truncate(size);
    AmpleSubset::new(space, &all).expect("valid indices")
}
