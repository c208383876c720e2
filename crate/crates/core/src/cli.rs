//! Batch experiment runner behind the `ftpg` binary.
//!
//! Every command produces a [`Report`]: a config echo, one record per trial
//! and aggregate counts. Trials run in parallel with seeds derived from the
//! run seed and the trial index, and are assembled in index order, so a
//! given config always yields the same bytes (unless `--timings` is on).

use std::collections::{BTreeMap, BTreeSet};
use std::time::Instant;

use anyhow::{bail, ensure, Context, Result};
use clap::{Parser, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::ample::{sample_ample_subset, AmpleFamily};
use crate::extend::{
    brute_force_extensions, collineation_group_order, extend, restrict_semilinear, ExtendOptions, SearchOrder,
    BRUTE_FORCE_LIMIT,
};
use crate::funcfield::{run_demo, DemoInstance};
use crate::gf::Gf;
use crate::numth;
use crate::primesets::{
    construct_small_order, geometric_schedule, natural_density_estimate, parse_rational, recover_m0_and_p, w_sequence,
    PrimeSet,
};
use crate::projgeom::{check_axioms, desargues_sweep, CheckMode, ProjSpace};
use crate::semilinear::{equal_up_to_scalar, SemilinearIso};

pub const SCHEMA: &str = "ftpg-report/1";

/// Spaces with at most this many points are checked exhaustively by
/// `checkgeom`; larger ones are sampled.
pub const EXHAUSTIVE_GEOMETRY_POINTS: usize = 40;

/// Slack allowed between the empirical density and its bound.
pub const DENSITY_SLACK: (u64, u64) = (1, 20);

/// Attempts used when drawing ample subsets.
const SAMPLE_ATTEMPTS: usize = 200;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    /// restrict -> extend -> decode round trips
    Extend,
    /// brute-force extension counts
    Oracle,
    /// prime-set construction, density and growth recovery
    Primesets,
    /// rational function field ring recovery demo
    Ffdemo,
    /// incidence axioms and Desargues
    Checkgeom,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, Parser)]
#[command(name = "ftpg", version, about = "Extend partial collineations and run the accompanying experiments")]
pub struct RunConfig {
    #[arg(long, value_enum)]
    pub cmd: Command,
    /// Field size (a prime power). Defaults: 5, or 13 for ffdemo and 3 for checkgeom.
    #[arg(long)]
    pub q: Option<u64>,
    /// Vector space dimension.
    #[arg(long, default_value_t = 3)]
    pub d: usize,
    /// Size bound t of the small-subset family.
    #[arg(long, default_value_t = 1)]
    pub t: usize,
    #[arg(long, default_value_t = 10)]
    pub trials: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Genus for the prime-set construction.
    #[arg(long, default_value_t = 1)]
    pub g: u32,
    /// Characteristic for the prime-set construction.
    #[arg(long, default_value_t = 2)]
    pub p: u64,
    /// Density target, as a decimal or a fraction.
    #[arg(long, default_value = "0.3")]
    pub eps: String,
    /// Sieve bound for density and certificates.
    #[arg(long, default_value_t = 100_000)]
    pub bound: u64,
    #[arg(long)]
    pub out: Option<std::path::PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Record per-trial wall-clock times (makes output nondeterministic).
    #[arg(long)]
    pub timings: bool,
}

impl RunConfig {
    pub fn q(&self) -> u64 {
        self.q.unwrap_or(match self.cmd {
            Command::Ffdemo => 13,
            Command::Checkgeom => 3,
            _ => 5,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub trial: u64,
    pub seed: u64,
    pub passed: bool,
    /// Instance summary; keys depend on the command.
    pub instance: BTreeMap<String, Value>,
    /// Scalar relating the recovered map to the generating one.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub scalar: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub elapsed_ms: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub trials: u64,
    pub passed: u64,
    pub failed: u64,
    pub success_rate: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema: String,
    pub config: RunConfig,
    pub records: Vec<TrialRecord>,
    pub summary: Summary,
}

impl Report {
    pub fn all_passed(&self) -> bool {
        self.summary.failed == 0
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)? + "\n")
    }

    /// One row per trial; instance keys become columns.
    pub fn to_csv(&self) -> Result<String> {
        let keys: BTreeSet<&String> = self.records.iter().flat_map(|r| r.instance.keys()).collect();
        let mut w = csv::Writer::from_writer(Vec::new());
        let mut header = vec!["trial", "seed", "passed", "scalar", "error"];
        if self.config.timings {
            header.push("elapsed_ms");
        }
        header.extend(keys.iter().map(|k| k.as_str()));
        w.write_record(&header)?;
        for r in &self.records {
            let mut row = vec![
                r.trial.to_string(),
                r.seed.to_string(),
                r.passed.to_string(),
                r.scalar.clone().unwrap_or_default(),
                r.error.clone().unwrap_or_default(),
            ];
            if self.config.timings {
                row.push(r.elapsed_ms.map(|x| format!("{x:.3}")).unwrap_or_default());
            }
            for k in &keys {
                row.push(match r.instance.get(*k) {
                    None => String::new(),
                    Some(Value::String(s)) => s.clone(),
                    Some(v) => v.to_string(),
                });
            }
            w.write_record(&row)?;
        }
        Ok(String::from_utf8(w.into_inner()?)?)
    }

    pub fn render(&self) -> Result<String> {
        match self.config.format {
            Format::Json => self.to_json(),
            Format::Csv => self.to_csv(),
        }
    }
}

/// Seed of trial `k`: a splitmix64 step on the counter-offset run seed.
pub fn trial_seed(seed: u64, k: u64) -> u64 {
    let mut z = seed.wrapping_add(k.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

struct Outcome {
    passed: bool,
    instance: BTreeMap<String, Value>,
    scalar: Option<String>,
    error: Option<String>,
}

impl Outcome {
    fn new() -> Outcome {
        Outcome { passed: false, instance: BTreeMap::new(), scalar: None, error: None }
    }

    fn set(&mut self, k: &str, v: impl Into<Value>) {
        self.instance.insert(k.to_string(), v.into());
    }

    fn fail(mut self, e: impl ToString) -> Outcome {
        self.passed = false;
        self.error = Some(e.to_string());
        self
    }
}

fn run_trials(cfg: &RunConfig, count: u64, f: impl Fn(u64, u64) -> Outcome + Sync) -> Report {
    let records: Vec<TrialRecord> = (0..count)
        .into_par_iter()
        .map(|k| {
            let seed = trial_seed(cfg.seed, k);
            let start = Instant::now();
            let o = f(k, seed);
            TrialRecord {
                trial: k,
                seed,
                passed: o.passed,
                instance: o.instance,
                scalar: o.scalar,
                error: o.error,
                elapsed_ms: cfg.timings.then(|| start.elapsed().as_secs_f64() * 1e3),
            }
        })
        .collect();
    let passed = records.iter().filter(|r| r.passed).count() as u64;
    let trials = records.len() as u64;
    Report {
        schema: SCHEMA.to_string(),
        config: cfg.clone(),
        summary: Summary {
            trials,
            passed,
            failed: trials - passed,
            success_rate: if trials == 0 { 1.0 } else { passed as f64 / trials as f64 },
        },
        records,
    }
}

fn field_for(q: u64) -> Result<Gf> {
    let (p, n) = numth::prime_power(q).with_context(|| format!("q = {q} is not a prime power"))?;
    ensure!(p <= u32::MAX as u64, "q = {q} is too large");
    Ok(Gf::new(p as u32, n)?)
}

fn space_for(cfg: &RunConfig) -> Result<(Gf, ProjSpace)> {
    let f = field_for(cfg.q())?;
    let s = ProjSpace::new(&f, cfg.d)?;
    Ok((f, s))
}

/// Checks `q > 3t + 1` and `d >= 3`, the conditions under which partial
/// collineations on `size_at_most(t)`-ample subsets extend uniquely.
fn extension_preconditions(cfg: &RunConfig) -> Result<()> {
    let q = cfg.q();
    ensure!(cfg.d >= 3, "precondition violated: dimension d = {} must be at least 3", cfg.d);
    ensure!(
        q > 3 * cfg.t as u64 + 1,
        "precondition violated: size_at_most({}) is not (3,2)-admissible since q = {} <= 3t + 1 = {}",
        cfg.t,
        q,
        3 * cfg.t + 1
    );
    Ok(())
}

pub fn cmd_extend(cfg: &RunConfig) -> Result<Report> {
    extension_preconditions(cfg)?;
    let (f, space) = space_for(cfg)?;
    let fam = AmpleFamily::size_at_most(&f, cfg.t);
    Ok(run_trials(cfg, cfg.trials, |_, seed| {
        let mut o = Outcome::new();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let lambda = match SemilinearIso::random(&space, &space, None, &mut rng) {
            Ok(l) => l,
            Err(e) => return o.fail(e),
        };
        o.set("frob_exp", lambda.frob_exp());
        let u = match sample_ample_subset(&space, &fam, SAMPLE_ATTEMPTS, &mut rng) {
            Ok(u) => u,
            Err(e) => return o.fail(e),
        };
        o.set("subset_size", u.len());
        o.set("points", space.point_count());
        let pc = match restrict_semilinear(&lambda, &u) {
            Ok(pc) => pc,
            Err(e) => return o.fail(e),
        };
        let canonical = match extend(&pc, &fam, &fam, &ExtendOptions::default()) {
            Ok(r) => r,
            Err(e) => return o.fail(e),
        };
        let shuffled_opts = ExtendOptions { order: SearchOrder::Shuffled { seed }, ..ExtendOptions::default() };
        let shuffled = match extend(&pc, &fam, &fam, &shuffled_opts) {
            Ok(r) => r,
            Err(e) => return o.fail(e),
        };
        let order_independent = canonical.collineation.sigma() == shuffled.collineation.sigma();
        o.set("order_independent", order_independent);
        o.set("lines_verified", canonical.diagnostics.lines_verified);
        match equal_up_to_scalar(&lambda, &canonical.decoded) {
            Some(a) => {
                o.scalar = Some(a.to_string());
                o.passed = order_independent;
                if !order_independent {
                    o.error = Some("shuffled search order produced a different point map".into());
                }
            }
            None => o.error = Some("decoded map differs from the generating map beyond a scalar".into()),
        }
        o
    }))
}

pub fn cmd_oracle(cfg: &RunConfig) -> Result<Report> {
    extension_preconditions(cfg)?;
    let (f, space) = space_for(cfg)?;
    let size = collineation_group_order(cfg.q(), f.n(), cfg.d).unwrap_or(u64::MAX);
    ensure!(size <= BRUTE_FORCE_LIMIT, "collineation group of order {size} exceeds the budget {BRUTE_FORCE_LIMIT}");
    let fam = AmpleFamily::size_at_most(&f, cfg.t);
    Ok(run_trials(cfg, cfg.trials, |_, seed| {
        let mut o = Outcome::new();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let lambda = match SemilinearIso::random(&space, &space, None, &mut rng) {
            Ok(l) => l,
            Err(e) => return o.fail(e),
        };
        let u = match sample_ample_subset(&space, &fam, SAMPLE_ATTEMPTS, &mut rng) {
            Ok(u) => u,
            Err(e) => return o.fail(e),
        };
        o.set("subset_size", u.len());
        o.set("group_order", size);
        let pc = match restrict_semilinear(&lambda, &u) {
            Ok(pc) => pc,
            Err(e) => return o.fail(e),
        };
        let all = match brute_force_extensions(&pc) {
            Ok(v) => v,
            Err(e) => return o.fail(e),
        };
        o.set("extensions", all.len());
        let ours = match extend(&pc, &fam, &fam, &ExtendOptions::default()) {
            Ok(r) => r,
            Err(e) => return o.fail(e),
        };
        let agrees = all.len() == 1 && all[0].sigma() == ours.collineation.sigma();
        o.set("matches_extend", agrees);
        o.passed = agrees;
        if !agrees {
            o.error = Some(format!("expected exactly one extension equal to the constructed one, found {}", all.len()));
        }
        o
    }))
}

pub fn cmd_primesets(cfg: &RunConfig) -> Result<Report> {
    let eps = parse_rational(&cfg.eps)?;
    let construction = construct_small_order(cfg.g, cfg.p, eps, cfg.bound)?;
    let density = natural_density_estimate(&construction.set, cfg.bound)?;
    let r = construction.r;
    let excluded = PrimeSet::cofinite(&[r])?;
    // Record 0 is the construction; records 1..=3 replay growth recovery
    // for q = p and a = 1, 2, 3.
    Ok(run_trials(cfg, 4, |k, _| {
        let mut o = Outcome::new();
        if k == 0 {
            let (dn, dd) = (*density.numer() as f64, *density.denom() as f64);
            let bound = construction.density_bound;
            let slack = num_rational::Ratio::new(DENSITY_SLACK.0, DENSITY_SLACK.1);
            o.set("check", "construction");
            o.set("r", r);
            o.set("density_bound", bound.to_string());
            o.set("density_bound_value", *bound.numer() as f64 / *bound.denom() as f64);
            o.set("density", density.to_string());
            o.set("density_value", dn / dd);
            o.set("sieve_bound", cfg.bound);
            o.set("certificate_checked", construction.certificate.checked);
            o.set("certificate_violations", construction.certificate.violations.len());
            let within = density <= bound + slack;
            o.passed = construction.certificate.holds() && within;
            if !construction.certificate.holds() {
                o.error = Some(format!("r = {r} divides the group order for {:?}", construction.certificate.violations));
            } else if !within {
                o.error = Some(format!("density {density} exceeds the bound {bound} by more than {slack}"));
            }
            return o;
        }
        let a = k as u32;
        o.set("check", "growth_recovery");
        o.set("q", cfg.p);
        o.set("a", a);
        o.set("excluded", r);
        let schedule = geometric_schedule(&excluded, 8);
        let res = w_sequence(cfg.p, a, &excluded, &schedule)
            .and_then(|w| recover_m0_and_p(&excluded, &w.schedule, &w.values));
        match res {
            Ok(rec) => {
                let expected = cfg.p.checked_pow(2 * a);
                o.set("m0", rec.m0);
                o.set("recovered_p", rec.p);
                o.passed = Some(rec.m0) == expected && rec.p == cfg.p;
                if !o.passed {
                    o.error = Some(format!("recovered ({}, {}) instead of (p^2a, p)", rec.m0, rec.p));
                }
            }
            Err(e) => return o.fail(e),
        }
        o
    }))
}

pub fn cmd_ffdemo(cfg: &RunConfig) -> Result<Report> {
    let inst = match cfg.q() {
        13 => DemoInstance::q13(),
        9 => DemoInstance::q9_frobenius(),
        q => bail!("no demo instance for q = {q}; available: 13, 9"),
    };
    Ok(run_trials(cfg, cfg.trials.max(1), |_, seed| {
        let mut o = Outcome::new();
        match run_demo(&inst, seed) {
            Ok(r) => {
                o.set("divisor", r.divisor.clone());
                o.set("avoided", r.avoided.join(" "));
                o.set("dim", r.dim);
                o.set("unit_classes", r.unit_classes);
                o.set("max_complement", r.certificate.max_complement);
                o.set("frob_exp", r.ring.frob_exp);
                o.set("multiplicative_pairs", r.ring.multiplicative_pairs);
                o.set("operator_checks", r.ring.operator_checks);
                o.set("ring_iso_recovered", r.recovered);
                o.passed = r.recovered;
                o
            }
            Err(e) => o.fail(e),
        }
    }))
}

pub fn cmd_checkgeom(cfg: &RunConfig) -> Result<Report> {
    let (_, space) = space_for(cfg)?;
    let mode = if space.point_count() <= EXHAUSTIVE_GEOMETRY_POINTS {
        CheckMode::Exhaustive
    } else {
        CheckMode::Sampled { samples: 10_000 * cfg.trials.max(1), seed: cfg.seed }
    };
    Ok(run_trials(cfg, 2, |k, _| {
        let mut o = Outcome::new();
        o.set("mode", if mode == CheckMode::Exhaustive { "exhaustive" } else { "sampled" });
        if k == 0 {
            o.set("check", "axioms");
            match check_axioms(&space, mode) {
                Ok(rep) => {
                    o.set("unique_join", rep.unique_join.checked);
                    o.set("veblen", rep.veblen.checked);
                    o.set("three_points", rep.three_points.checked);
                    o.passed = rep.passed();
                    if !o.passed {
                        o.error = Some(format!("incidence axiom violated: {}", json!(rep)));
                    }
                    o
                }
                Err(e) => o.fail(e),
            }
        } else {
            o.set("check", "desargues");
            match desargues_sweep(&space, mode) {
                Ok(s) => {
                    o.set("configurations", s.configurations);
                    o.set("perspective_pairs", s.perspective_pairs);
                    o.set("disagreements", s.disagreements);
                    o.passed = s.disagreements == 0;
                    if let Some(c) = s.first_disagreement {
                        o.error = Some(format!("Desargues fails for configuration {c:?}"));
                    }
                    o
                }
                Err(e) => o.fail(e),
            }
        }
    }))
}

pub fn run(cfg: &RunConfig) -> Result<Report> {
    match cfg.cmd {
        Command::Extend => cmd_extend(cfg),
        Command::Oracle => cmd_oracle(cfg),
        Command::Primesets => cmd_primesets(cfg),
        Command::Ffdemo => cmd_ffdemo(cfg),
        Command::Checkgeom => cmd_checkgeom(cfg),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(args: &[&str]) -> RunConfig {
        RunConfig::parse_from(std::iter::once("ftpg").chain(args.iter().copied()))
    }

    #[test]
    fn seeds_are_distinct_and_stable() {
        let s: BTreeSet<u64> = (0..1000).map(|k| trial_seed(7, k)).collect();
        assert_eq!(s.len(), 1000);
        assert_eq!(trial_seed(7, 3), trial_seed(7, 3));
        assert_ne!(trial_seed(7, 3), trial_seed(8, 3));
    }

    #[test]
    fn extend_rejects_small_q() {
        let err = run(&cfg(&["--cmd", "extend", "--q", "5", "--t", "2"])).unwrap_err();
        assert!(err.to_string().contains("5 <= 3t + 1 = 7"), "{err}");
        assert!(run(&cfg(&["--cmd", "extend", "--d", "2"])).is_err());
        assert!(run(&cfg(&["--cmd", "extend", "--q", "6"])).is_err());
    }

    #[test]
    fn extend_passes_and_is_deterministic() {
        let c = cfg(&["--cmd", "extend", "--q", "5", "--trials", "6", "--seed", "7"]);
        let a = run(&c).unwrap();
        assert!(a.all_passed(), "{}", a.to_json().unwrap());
        assert_eq!(a.to_json().unwrap(), run(&c).unwrap().to_json().unwrap());
        let csv = a.to_csv().unwrap();
        assert_eq!(csv.lines().count(), 7);
        assert!(csv.starts_with("trial,seed,passed,scalar,error,"));
    }

    #[test]
    fn ffdemo_and_checkgeom() {
        let r = run(&cfg(&["--cmd", "ffdemo", "--trials", "1"])).unwrap();
        assert!(r.all_passed());
        assert_eq!(r.records[0].instance["ring_iso_recovered"], Value::Bool(true));
        assert!(run(&cfg(&["--cmd", "ffdemo", "--q", "7"])).is_err());
        let g = run(&cfg(&["--cmd", "checkgeom", "--q", "2"])).unwrap();
        assert!(g.all_passed());
        assert_eq!(g.records.len(), 2);
    }

    #[test]
    fn primesets_report() {
        let r = run(&cfg(&["--cmd", "primesets", "--bound", "10000"])).unwrap();
        assert!(r.all_passed(), "{}", r.to_json().unwrap());
        assert_eq!(r.records[0].instance["r"], json!(13));
        assert_eq!(r.records[1].instance["m0"], json!(4));
    }
}
