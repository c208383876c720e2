//! Extending a partial collineation defined on an ample subset to a full
//! collineation, and a brute-force oracle that enumerates every collineation
//! agreeing with the partial data.
//!
//! For a point `p` outside U₁ the image is `τ(ℓ) ∩ τ(m)` for two distinct
//! lines `ℓ, m` through `p` that meet U₁. Ampleness for a (3,2)-admissible
//! family makes this well defined and independent of the chosen lines.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ample::{is_ample, AmpleError, AmpleFamily, AmpleSubset, AmpleWitness};
use crate::gf::Fe;
use crate::projgeom::{ProjSpace, NONE};
use crate::semilinear::{decode_ftpg, Collineation, FieldIso, SemilinearError, SemilinearIso};

/// Above this many lines the final line check samples instead of sweeping.
pub const EXHAUSTIVE_LINE_CHECK: usize = 100_000;
const SAMPLED_LINE_CHECKS: usize = 10_000;
/// Largest collineation group the brute-force oracle will enumerate.
pub const BRUTE_FORCE_LIMIT: u64 = 10_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Source,
    Target,
}

/// First counterexample found by [`validate_partial`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "check", rename_all = "snake_case")]
pub enum ValidationFailure {
    /// Two points of U₁ share an image, or an image lies outside U₂.
    SigmaNotInjective { point: u32 },
    SigmaOutsideTarget { point: u32 },
    /// A point of U₂ is not hit.
    SigmaNotOnto { point: u32 },
    /// Two lines share an image, or some line meeting U₂ is not hit.
    TauNotInjective { line: u32 },
    TauNotOnto { line: u32 },
    /// `τ` does not carry the lines through `point` onto the lines through
    /// `σ(point)`.
    LinesThroughPoint { point: u32, line: u32 },
    /// `τ(ℓ) ∩ U₂ ≠ σ(ℓ ∩ U₁)`.
    Compatibility { line: u32 },
    /// Lines that are concurrent on one side but not on the other.
    Concurrency { lines: Vec<u32> },
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub bijectivity: Option<ValidationFailure>,
    pub incidence: Option<ValidationFailure>,
    pub compatibility: Option<ValidationFailure>,
    pub concurrency: Option<ValidationFailure>,
    pub checks: u64,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.first_failure().is_none()
    }

    pub fn first_failure(&self) -> Option<&ValidationFailure> {
        self.bijectivity.as_ref().or(self.incidence.as_ref()).or(self.compatibility.as_ref()).or(self.concurrency.as_ref())
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ExtendError {
    #[error("dimension {0} is below 3")]
    DimensionTooSmall(usize),
    #[error("source has dimension {source_dim}, target {target_dim}")]
    DimensionMismatch { source_dim: usize, target_dim: usize },
    #[error("fields {0} and {1} are not isomorphic")]
    FieldMismatch(String, String),
    #[error("{0:?} family is not (3,2)-admissible")]
    NotAdmissible(Side),
    #[error("{side:?} subset is not ample: {}", witness.as_ref().map_or_else(|| "no witness".to_string(), ToString::to_string))]
    NotAmple { side: Side, witness: Option<AmpleWitness> },
    #[error("partial collineation is inconsistent: {0:?}")]
    InvalidPartial(ValidationFailure),
    #[error("table shape does not match the spaces: {0}")]
    Shape(&'static str),
    #[error("fewer than two lines through point {point} meet U1")]
    TooFewLines { point: u32 },
    #[error("images of lines {lines:?} through point {point} do not meet")]
    ImagesNotConcurrent { point: u32, lines: [u32; 2] },
    #[error("image of line {line} through point {point} misses the intersection point")]
    InconsistentIntersection { point: u32, line: u32 },
    #[error("extended point map is not injective at point {point}")]
    NotBijective { point: u32 },
    #[error("extended map does not carry line {line} onto a line")]
    LineNotPreserved { line: u32 },
    #[error("extended line map disagrees with the given one on line {line}")]
    TauMismatch { line: u32 },
    #[error("collineation group has {size} elements, above the enumeration limit")]
    Budget { size: u64 },
    #[error(transparent)]
    Decode(#[from] SemilinearError),
    #[error(transparent)]
    Ample(#[from] AmpleError),
}

/// Partial data `(σ, τ)`: `σ` on the points of U₁, `τ` on the lines meeting
/// U₁. Entries outside the domain hold [`NONE`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PartialCollineation {
    u1: AmpleSubset,
    u2: AmpleSubset,
    sigma: Vec<u32>,
    tau: Vec<u32>,
}

impl PartialCollineation {
    pub fn new(u1: AmpleSubset, u2: AmpleSubset, sigma: Vec<u32>, tau: Vec<u32>) -> Result<Self, ExtendError> {
        let (s, t) = (u1.space(), u2.space());
        if sigma.len() != s.point_count() || tau.len() != s.line_count() {
            return Err(ExtendError::Shape("table lengths"));
        }
        for p in 0..sigma.len() as u32 {
            let v = sigma[p as usize];
            if u1.contains(p) != (v != NONE) || (v != NONE && v as usize >= t.point_count()) {
                return Err(ExtendError::Shape("sigma must be defined exactly on U1"));
            }
        }
        for l in 0..tau.len() as u32 {
            let v = tau[l as usize];
            if u1.meets(l) != (v != NONE) || (v != NONE && v as usize >= t.line_count()) {
                return Err(ExtendError::Shape("tau must be defined exactly on lines meeting U1"));
            }
        }
        Ok(PartialCollineation { u1, u2, sigma, tau })
    }

    pub fn source(&self) -> &ProjSpace {
        self.u1.space()
    }

    pub fn target(&self) -> &ProjSpace {
        self.u2.space()
    }

    pub fn u1(&self) -> &AmpleSubset {
        &self.u1
    }

    pub fn u2(&self) -> &AmpleSubset {
        &self.u2
    }

    pub fn sigma(&self, p: u32) -> Option<u32> {
        self.sigma.get(p as usize).copied().filter(|&v| v != NONE)
    }

    pub fn tau(&self, l: u32) -> Option<u32> {
        self.tau.get(l as usize).copied().filter(|&v| v != NONE)
    }

    /// Exchanges the images of two points of U₁.
    pub fn swap_sigma(&mut self, a: u32, b: u32) {
        assert!(self.u1.contains(a) && self.u1.contains(b), "points must lie in U1");
        self.sigma.swap(a as usize, b as usize);
    }

    /// Exchanges the images of two lines meeting U₁.
    pub fn swap_tau(&mut self, l: u32, m: u32) {
        assert!(self.u1.meets(l) && self.u1.meets(m), "lines must meet U1");
        self.tau.swap(l as usize, m as usize);
    }

    /// Sends line `l` to `target_line`.
    pub fn redirect_tau(&mut self, l: u32, target_line: u32) {
        assert!(self.u1.meets(l), "line must meet U1");
        assert!((target_line as usize) < self.target().line_count(), "line index out of range");
        self.tau[l as usize] = target_line;
    }
}

/// Restricts a collineation to U₁ (and the lines meeting it).
pub fn restrict(c: &Collineation, u1: &AmpleSubset) -> Result<PartialCollineation, ExtendError> {
    if u1.space() != c.source() {
        return Err(ExtendError::Shape("U1 lives in a different space"));
    }
    if u1.is_empty() {
        return Err(ExtendError::NotAmple { side: Side::Source, witness: Some(AmpleWitness::EmptySubset) });
    }
    let image: Vec<u32> = u1.points().iter().map(|&p| c.point_image(p)).collect();
    let u2 = AmpleSubset::new(c.target(), &image)?;
    let mut sigma = vec![NONE; c.source().point_count()];
    for &p in u1.points() {
        sigma[p as usize] = c.point_image(p);
    }
    let tau = (0..c.source().line_count() as u32)
        .map(|l| if u1.meets(l) { c.line_image(l) } else { NONE })
        .collect();
    PartialCollineation::new(u1.clone(), u2, sigma, tau)
}

pub fn restrict_semilinear(lambda: &SemilinearIso, u1: &AmpleSubset) -> Result<PartialCollineation, ExtendError> {
    restrict(&lambda.induce(), u1)
}

/// Which line pairs/triples [`validate_partial`] checks for preserved
/// concurrency.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ConcurrencyCheck {
    Skip,
    Sampled { samples: u64, seed: u64 },
    Exhaustive,
}

/// Checks the hypotheses on `(σ, τ)`. Every category is checked; each records
/// its first counterexample.
pub fn validate_partial(pc: &PartialCollineation, concurrency: ConcurrencyCheck) -> ValidationReport {
    let (s, t) = (pc.source(), pc.target());
    let mut rep = ValidationReport::default();

    // bijectivity
    let mut hit = vec![false; t.point_count()];
    for &p in pc.u1.points() {
        rep.checks += 1;
        let v = pc.sigma[p as usize];
        if !pc.u2.contains(v) {
            rep.bijectivity.get_or_insert(ValidationFailure::SigmaOutsideTarget { point: p });
        } else if hit[v as usize] {
            rep.bijectivity.get_or_insert(ValidationFailure::SigmaNotInjective { point: p });
        }
        hit[v as usize] = true;
    }
    if let Some(&miss) = pc.u2.points().iter().find(|&&v| !hit[v as usize]) {
        rep.bijectivity.get_or_insert(ValidationFailure::SigmaNotOnto { point: miss });
    }
    let mut line_hit = vec![false; t.line_count()];
    for l in 0..s.line_count() as u32 {
        let Some(m) = pc.tau(l) else { continue };
        rep.checks += 1;
        if line_hit[m as usize] {
            rep.bijectivity.get_or_insert(ValidationFailure::TauNotInjective { line: l });
        }
        line_hit[m as usize] = true;
    }
    if let Some(m) = (0..t.line_count() as u32).find(|&m| pc.u2.meets(m) && !line_hit[m as usize]) {
        rep.bijectivity.get_or_insert(ValidationFailure::TauNotOnto { line: m });
    }

    // lines through p go to lines through sigma(p)
    for &p in pc.u1.points() {
        let sp = pc.sigma[p as usize];
        for &l in s.lines_through(p) {
            rep.checks += 1;
            if !t.on_line(sp, pc.tau[l as usize]) {
                rep.incidence.get_or_insert(ValidationFailure::LinesThroughPoint { point: p, line: l });
                break;
            }
        }
        if rep.incidence.is_some() {
            break;
        }
    }

    // tau(l) ∩ U2 = sigma(l ∩ U1)
    for l in 0..s.line_count() as u32 {
        let Some(m) = pc.tau(l) else { continue };
        rep.checks += 1;
        let mut lhs = pc.u2.on_line(m);
        let mut rhs: Vec<u32> = pc.u1.on_line(l).iter().map(|&p| pc.sigma[p as usize]).collect();
        lhs.sort_unstable();
        rhs.sort_unstable();
        if lhs != rhs {
            rep.compatibility = Some(ValidationFailure::Compatibility { line: l });
            break;
        }
    }

    let dom: Vec<u32> = (0..s.line_count() as u32).filter(|&l| pc.u1.meets(l)).collect();
    let concurrent_pair = |space: &ProjSpace, a: u32, b: u32| a == b || space.meet_idx(a, b).is_some();
    let check_pair = |a: u32, b: u32| {
        concurrent_pair(s, a, b) == concurrent_pair(t, pc.tau[a as usize], pc.tau[b as usize])
    };
    let check_triple = |a: u32, b: u32, c: u32| {
        s.concurrent_idx(&[a, b, c])
            == t.concurrent_idx(&[pc.tau[a as usize], pc.tau[b as usize], pc.tau[c as usize]])
    };
    match concurrency {
        ConcurrencyCheck::Skip => {}
        ConcurrencyCheck::Exhaustive => {
            'outer: for (i, &a) in dom.iter().enumerate() {
                for (j, &b) in dom.iter().enumerate().skip(i + 1) {
                    rep.checks += 1;
                    if !check_pair(a, b) {
                        rep.concurrency = Some(ValidationFailure::Concurrency { lines: vec![a, b] });
                        break 'outer;
                    }
                    for &c in &dom[j + 1..] {
                        rep.checks += 1;
                        if !check_triple(a, b, c) {
                            rep.concurrency = Some(ValidationFailure::Concurrency { lines: vec![a, b, c] });
                            break 'outer;
                        }
                    }
                }
            }
        }
        ConcurrencyCheck::Sampled { samples, seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            if !dom.is_empty() {
                for _ in 0..samples {
                    let a = dom[rng.gen_range(0..dom.len())];
                    let b = dom[rng.gen_range(0..dom.len())];
                    let c = dom[rng.gen_range(0..dom.len())];
                    rep.checks += 2;
                    if !check_pair(a, b) {
                        rep.concurrency = Some(ValidationFailure::Concurrency { lines: vec![a, b] });
                        break;
                    }
                    if !check_triple(a, b, c) {
                        rep.concurrency = Some(ValidationFailure::Concurrency { lines: vec![a, b, c] });
                        break;
                    }
                }
            }
        }
    }
    rep
}

/// Order in which points of U₁ are tried when looking for lines through a
/// point outside U₁.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SearchOrder {
    Canonical,
    Reversed,
    Shuffled { seed: u64 },
}

impl SearchOrder {
    fn arrange(self, pts: &[u32]) -> Vec<u32> {
        let mut v = pts.to_vec();
        match self {
            SearchOrder::Canonical => {}
            SearchOrder::Reversed => v.reverse(),
            SearchOrder::Shuffled { seed } => v.shuffle(&mut ChaCha8Rng::seed_from_u64(seed)),
        }
        v
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExtendOptions {
    pub order: SearchOrder,
    /// Further lines through each new point whose images must contain the
    /// computed intersection.
    pub extra_checks: usize,
    pub concurrency: ConcurrencyCheck,
}

impl Default for ExtendOptions {
    fn default() -> Self {
        ExtendOptions { order: SearchOrder::Canonical, extra_checks: 0, concurrency: ConcurrencyCheck::Skip }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Diagnostics {
    pub points_extended: u64,
    pub joins_formed: u64,
    pub extra_intersections_checked: u64,
    pub lines_verified: u64,
    pub validation_checks: u64,
}

#[derive(Clone, Debug)]
pub struct ExtensionResult {
    pub collineation: Collineation,
    pub decoded: SemilinearIso,
    pub diagnostics: Diagnostics,
}

fn point_image(
    pc: &PartialCollineation,
    p: u32,
    search: &[u32],
    extra_checks: usize,
    diag: &mut Diagnostics,
) -> Result<u32, ExtendError> {
    if let Some(v) = pc.sigma(p) {
        return Ok(v);
    }
    let (s, t) = (pc.source(), pc.target());
    let mut lines: Vec<u32> = Vec::with_capacity(2 + extra_checks);
    let mut image = None;
    for &u in search {
        let l = s.join_idx(p, u).expect("p is outside U1");
        diag.joins_formed += 1;
        if lines.contains(&l) {
            continue;
        }
        lines.push(l);
        if lines.len() == 2 {
            let (a, b) = (pc.tau[lines[0] as usize], pc.tau[lines[1] as usize]);
            let x = if a == b { None } else { t.meet_idx(a, b) };
            image = Some(x.ok_or(ExtendError::ImagesNotConcurrent { point: p, lines: [lines[0], lines[1]] })?);
        } else if lines.len() > 2 {
            diag.extra_intersections_checked += 1;
            if !t.on_line(image.unwrap(), pc.tau[l as usize]) {
                return Err(ExtendError::InconsistentIntersection { point: p, line: l });
            }
        }
        if lines.len() == 2 + extra_checks {
            break;
        }
    }
    diag.points_extended += 1;
    image.ok_or(ExtendError::TooFewLines { point: p })
}

/// The image of a single point under the extension.
pub fn extend_point(pc: &PartialCollineation, p: u32, order: SearchOrder) -> Result<u32, ExtendError> {
    if p as usize >= pc.source().point_count() {
        return Err(ExtendError::Shape("point index out of range"));
    }
    let search = order.arrange(pc.u1.points());
    point_image(pc, p, &search, 0, &mut Diagnostics::default())
}

/// Extends `pc` to a collineation of the whole spaces and decodes it.
pub fn extend(
    pc: &PartialCollineation,
    fam1: &AmpleFamily,
    fam2: &AmpleFamily,
    opts: &ExtendOptions,
) -> Result<ExtensionResult, ExtendError> {
    let (s, t) = (pc.source(), pc.target());
    if s.dim() != t.dim() {
        return Err(ExtendError::DimensionMismatch { source_dim: s.dim(), target_dim: t.dim() });
    }
    if s.dim() < 3 {
        return Err(ExtendError::DimensionTooSmall(s.dim()));
    }
    let (k1, k2) = (s.field(), t.field());
    if k1.p() != k2.p() || k1.n() != k2.n() {
        return Err(ExtendError::FieldMismatch(k1.to_string(), k2.to_string()));
    }
    for (side, fam) in [(Side::Source, fam1), (Side::Target, fam2)] {
        if !fam.is_mn_admissible(3, 2) {
            return Err(ExtendError::NotAdmissible(side));
        }
    }
    for (side, u, fam) in [(Side::Source, &pc.u1, fam1), (Side::Target, &pc.u2, fam2)] {
        let rep = is_ample(u, fam)?;
        if !rep.ample {
            return Err(ExtendError::NotAmple { side, witness: rep.witness });
        }
    }
    let report = validate_partial(pc, opts.concurrency);
    if let Some(f) = report.first_failure() {
        return Err(ExtendError::InvalidPartial(f.clone()));
    }
    let mut diag = Diagnostics { validation_checks: report.checks, ..Diagnostics::default() };

    let search = opts.order.arrange(pc.u1.points());
    let n = s.point_count();
    let mut sigma = Vec::with_capacity(n);
    let mut hit = vec![false; t.point_count()];
    for p in 0..n as u32 {
        let v = point_image(pc, p, &search, opts.extra_checks, &mut diag)?;
        if std::mem::replace(&mut hit[v as usize], true) {
            return Err(ExtendError::NotBijective { point: p });
        }
        sigma.push(v);
    }

    let q = s.field().q() as usize;
    let lines = s.line_count();
    let tau: Vec<u32> = (0..lines as u32)
        .map(|l| {
            let b = s.line_chart(l);
            t.join_idx(sigma[b[0] as usize], sigma[b[q] as usize]).expect("injective")
        })
        .collect();
    let to_check: Vec<u32> = if lines <= EXHAUSTIVE_LINE_CHECK {
        (0..lines as u32).collect()
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(lines as u64);
        (0..SAMPLED_LINE_CHECKS).map(|_| rng.gen_range(0..lines as u32)).collect()
    };
    for l in to_check {
        diag.lines_verified += 1;
        let m = tau[l as usize];
        if !s.points_on(l).iter().all(|&p| t.on_line(sigma[p as usize], m)) {
            return Err(ExtendError::LineNotPreserved { line: l });
        }
    }
    for l in 0..lines as u32 {
        if let Some(m) = pc.tau(l) {
            if tau[l as usize] != m {
                return Err(ExtendError::TauMismatch { line: l });
            }
        }
    }
    let collineation = Collineation::from_points(s, t, sigma)?;
    let decoded = decode_ftpg(&collineation)?;
    Ok(ExtensionResult { collineation, decoded, diagnostics: diag })
}

/// Number of collineations `P(V₁) → P(V₂)`: `n · |PGL(d, q)|`.
pub fn collineation_group_order(q: u64, n: u32, d: usize) -> Option<u64> {
    let qd = q.checked_pow(d as u32)?;
    let mut order: u64 = n as u64;
    for i in 0..d {
        order = order.checked_mul(qd - q.pow(i as u32))?;
    }
    Some(order / (q - 1))
}

/// Every collineation from the source to the target space that agrees with
/// `σ` on U₁ and with `τ` on the lines meeting U₁.
pub fn brute_force_extensions(pc: &PartialCollineation) -> Result<Vec<Collineation>, ExtendError> {
    let (s, t) = (pc.source(), pc.target());
    let d = s.dim();
    if t.dim() != d {
        return Err(ExtendError::DimensionMismatch { source_dim: d, target_dim: t.dim() });
    }
    let (k1, k2) = (s.field(), t.field());
    if k1.p() != k2.p() || k1.n() != k2.n() {
        return Err(ExtendError::FieldMismatch(k1.to_string(), k2.to_string()));
    }
    let q = k2.q() as u64;
    let size = collineation_group_order(q, k2.n(), d).unwrap_or(u64::MAX);
    let work = q.checked_pow((d * d) as u32).unwrap_or(u64::MAX).saturating_mul(k2.n() as u64);
    if size > BRUTE_FORCE_LIMIT || work > 50 * BRUTE_FORCE_LIMIT {
        return Err(ExtendError::Budget { size });
    }
    let u1_coords: Vec<(Vec<Fe>, u32)> =
        pc.u1.points().iter().map(|&p| (s.coords_of(p), pc.sigma[p as usize])).collect();
    let mut out = Vec::new();
    let mut digits = vec![0u32; d * d];
    let mut tw = vec![Fe::ZERO; d];
    let mut img = vec![Fe::ZERO; d];
    for e in 0..k1.n() {
        let mu = FieldIso::new(k1, k2, e)?;
        let twisted: Vec<Vec<Fe>> =
            u1_coords.iter().map(|(c, _)| c.iter().map(|&x| mu.apply(x)).collect()).collect();
        digits.iter_mut().for_each(|x| *x = 0);
        'matrices: loop {
            // first nonzero entry must be one: one representative per scalar class
            if digits.iter().find(|&&x| x != 0) == Some(&1) {
                let m = crate::linalg::Matrix::from_row_major(d, d, digits.iter().map(|&x| Fe(x)).collect())
                    .expect("square");
                let mut ok = true;
                for (i, tv) in twisted.iter().enumerate() {
                    tw.copy_from_slice(tv);
                    m.mul_vec_into(&tw, k2, &mut img);
                    if t.index_of_vector(&img) != Some(u1_coords[i].1) {
                        ok = false;
                        break;
                    }
                }
                if ok && !m.determinant(k2).is_zero() {
                    let c = SemilinearIso::new(s, t, mu.clone(), m)?.induce();
                    let agrees = (0..s.line_count() as u32)
                        .all(|l| pc.tau(l).is_none_or(|x| c.line_image(l) == x));
                    if agrees {
                        out.push(c);
                    }
                }
            }
            for x in digits.iter_mut().rev() {
                *x += 1;
                if (*x as u64) < q {
                    continue 'matrices;
                }
                *x = 0;
            }
            break;
        }
    }
    Ok(out)
}
