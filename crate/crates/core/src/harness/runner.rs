//! Scenario protocols: fixed-read time-to-solution against an exhaustive
//! oracle, and repeated calls under a wall-clock budget scored against the
//! best cost found by the roster.

use std::collections::BTreeMap;
use std::path::Path;
use std::time::Instant;

use log::{info, warn};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::{ExperimentConfig, QaoaSolverConfig, Scenario, SolverEntry, SolverSpec};
use super::dataset::{materialize, BenchInstance, Problem};
use super::records::{keys, Real, RunRecord, RunStatus};
use super::seeds::{call_seed, derive_seed};
use super::HarnessError;
use crate::instances::{rng_from_seed, MaxCutInstance, TspInstance};
use crate::metrics::{self, bsf_from_cost, equal_frequency_bins, MetricContext, Reference, DEFAULT_TARGET};
use crate::model::{argmin_exhaustive, BinaryPolynomial, Bitstring, QuadraticModel, SampleSet};
use crate::qaoa::problem::{unrank_permutation, xy_embed};
use crate::qaoa::tsp::{decode_onehot, onehot_qubit, tsp_qubo};
use crate::qaoa::{
    expand_generator, maxcut_ledger, tsp_ledger, tts_layers, Basis, Encoding, OutputDistribution, QaoaProblem,
    TspPenalties,
};
use crate::solvers::sa::anneal;
use crate::solvers::tabu::search;
use crate::solvers::{
    exhaustive_sampler, gw_relax, gw_round, local_search_maxcut, tsp_exhaustive, GwRelaxation,
    SolverError, DEFAULT_TSP_CAP,
};

/// Exact optimum of an instance in the cost domain the solvers sample in.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Oracle {
    pub instance_id: String,
    pub instance_hash: String,
    pub optimal_cost: f64,
    pub bitstring: String,
    /// Optimal and worst tour lengths for TSP instances.
    pub optimal_length: Option<f64>,
    pub worst_length: Option<f64>,
}

/// Solves `inst` by enumeration; `cap` bounds the Max-Cut variable count.
pub fn compute_oracle(inst: &BenchInstance, cap: usize) -> Result<Oracle, HarnessError> {
    let base = |cost: f64, bits: Bitstring| Oracle {
        instance_id: inst.id.clone(),
        instance_hash: inst.hash.clone(),
        optimal_cost: cost,
        bitstring: bits.to_string(),
        optimal_length: None,
        worst_length: None,
    };
    match &inst.problem {
        Problem::MaxCut(g) => {
            let (bits, cost) = argmin_exhaustive(&g.to_qubo(), cap).map_err(SolverError::from)?;
            Ok(base(cost, bits))
        }
        Problem::Tsp(t) => {
            let opt = tsp_exhaustive(t, DEFAULT_TSP_CAP)?;
            let pen = TspPenalties::for_instance(t);
            let mut o = base(pen.a * opt.best_length, perm_bits(&opt.best_perm, t.k()));
            o.optimal_length = Some(opt.best_length);
            o.worst_length = Some(opt.worst_length);
            Ok(o)
        }
    }
}

/// Writes oracle solutions as JSON lines.
pub fn write_oracles(path: &Path, oracles: &[Oracle]) -> Result<(), HarnessError> {
    let mut out = String::new();
    for o in oracles {
        out.push_str(&serde_json::to_string(o)?);
        out.push('\n');
    }
    std::fs::write(path, out).map_err(|e| HarnessError::io(path, e))
}

pub fn read_oracles(path: &Path) -> Result<Vec<Oracle>, HarnessError> {
    let text = std::fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))?;
    text.lines().filter(|l| !l.trim().is_empty()).map(|l| Ok(serde_json::from_str(l)?)).collect()
}

/// One-hot bits of a tour given as the visiting order of `1..=k`.
fn perm_bits(perm: &[usize], k: usize) -> Bitstring {
    let mut bits = vec![false; k * k];
    for (slot, &loc) in perm.iter().enumerate() {
        bits[onehot_qubit(k, loc, slot)] = true;
    }
    Bitstring::from_bits(bits)
}

/// Thread CPU time in seconds.
fn thread_cpu_time() -> f64 {
    let mut ts = libc::timespec { tv_sec: 0, tv_nsec: 0 };
    // SAFETY: clock_gettime only writes the timespec we pass it.
    let rc = unsafe { libc::clock_gettime(libc::CLOCK_THREAD_CPUTIME_ID, &mut ts) };
    if rc == 0 {
        ts.tv_sec as f64 + ts.tv_nsec as f64 * 1e-9
    } else {
        0.0
    }
}

/// What the solver sees of an instance.
enum Target<'a> {
    MaxCut(&'a MaxCutInstance),
    Tsp(&'a TspInstance, TspPenalties),
}

impl<'a> Target<'a> {
    fn of(inst: &'a BenchInstance) -> Self {
        match &inst.problem {
            Problem::MaxCut(g) => Target::MaxCut(g),
            Problem::Tsp(t) => Target::Tsp(t, TspPenalties::for_instance(t)),
        }
    }

    fn polynomial(&self) -> Result<BinaryPolynomial, HarnessError> {
        match self {
            Target::MaxCut(g) => Ok(g.to_qubo()),
            Target::Tsp(t, pen) => Ok(tsp_qubo(t, *pen).map_err(SolverError::from)?),
        }
    }

    fn maxcut(&self, kind: &str) -> Result<&'a MaxCutInstance, HarnessError> {
        match self {
            Target::MaxCut(g) => Ok(g),
            Target::Tsp(..) => Err(HarnessError::Config(format!("{kind} applies to Max-Cut instances only"))),
        }
    }
}

/// Work cached before the first call and reused by every later one.
enum Prepared {
    Quadratic(QuadraticModel),
    Direct,
    Gw(GwRelaxation),
    Qaoa { dist: OutputDistribution, layers: Option<u64>, layer_time: f64, shots: usize },
}

fn prepare(target: &Target, spec: &SolverSpec) -> Result<Prepared, HarnessError> {
    Ok(match spec {
        SolverSpec::Sa(_) | SolverSpec::Ts(_) => {
            Prepared::Quadratic(target.polynomial()?.to_quadratic().map_err(SolverError::from)?)
        }
        SolverSpec::Ls(_) | SolverSpec::Greedy(_) => {
            target.maxcut(spec.kind())?;
            Prepared::Direct
        }
        SolverSpec::Exhaustive(_) => Prepared::Direct,
        SolverSpec::Gw(c) => Prepared::Gw(gw_relax(target.maxcut("gw")?, c)?),
        SolverSpec::Qaoa(q) => prepare_qaoa(target, q)?,
    })
}

fn prepare_qaoa(target: &Target, q: &QaoaSolverConfig) -> Result<Prepared, HarnessError> {
    let (problem, ledger) = match target {
        Target::MaxCut(g) => (QaoaProblem::from_polynomial(&g.to_qubo(), &q.caps)?, maxcut_ledger(g)),
        Target::Tsp(t, pen) => {
            let enc = q.encoding.unwrap_or(Encoding::Xy);
            (QaoaProblem::tsp(t, enc, *pen, &q.caps)?, tsp_ledger(enc, t.k()))
        }
    };
    let (beta, gamma) = expand_generator(&q.schedule.generator()?, q.p)?;
    let dist = problem.simulate(&beta, &gamma)?;
    Ok(Prepared::Qaoa { dist, layers: ledger.total(q.p).ok(), layer_time: q.cnot_layer_time, shots: q.shots })
}

/// Basis index of a QAOA sample as a bitstring over the problem's qubits.
fn basis_bits(basis: Basis, index: usize) -> Bitstring {
    match basis {
        Basis::Full { qubits } => Bitstring::from_index(index as u64, qubits),
        Basis::OneHot { k } => xy_embed(index, k),
        Basis::Permutation { k } => perm_bits(&unrank_permutation(index, k), k),
    }
}

fn call(target: &Target, spec: &SolverSpec, prepared: &Prepared, seed: u64) -> Result<SampleSet, HarnessError> {
    match (spec, prepared) {
        (SolverSpec::Sa(c), Prepared::Quadratic(m)) => {
            let mut c = c.clone();
            c.seed = seed;
            Ok(anneal(m, &c))
        }
        (SolverSpec::Ts(c), Prepared::Quadratic(m)) => {
            let mut c = c.clone();
            c.seed = seed;
            Ok(search(m, &c))
        }
        (SolverSpec::Ls(c) | SolverSpec::Greedy(c), _) => Ok(local_search_maxcut(target.maxcut("ls")?, c.restarts, seed)),
        (SolverSpec::Gw(c), Prepared::Gw(relax)) => Ok(gw_round(target.maxcut("gw")?, relax, c.hyperplanes, seed)),
        (SolverSpec::Exhaustive(c), _) => match target {
            Target::MaxCut(g) => Ok(exhaustive_sampler(&g.to_qubo(), c.cap)?),
            Target::Tsp(t, pen) => {
                let started = Instant::now();
                let opt = tsp_exhaustive(t, DEFAULT_TSP_CAP)?;
                let mut out = SampleSet::new(t.k() * t.k());
                out.push(perm_bits(&opt.best_perm, t.k()), pen.a * opt.best_length).map_err(SolverError::from)?;
                out.timing.solve = started.elapsed().as_secs_f64();
                Ok(out)
            }
        },
        (SolverSpec::Qaoa(_), Prepared::Qaoa { dist, layers, layer_time, shots }) => {
            let started = Instant::now();
            let mut rng = rng_from_seed(seed);
            let mut counts: BTreeMap<usize, u64> = BTreeMap::new();
            for idx in dist.sample_indices(*shots, &mut rng) {
                *counts.entry(idx).or_default() += 1;
            }
            let basis = dist.basis();
            let n = basis_bits(basis, 0).len();
            let mut out = SampleSet::new(n);
            for (idx, count) in counts {
                out.add(basis_bits(basis, idx), dist.problem.costs()[idx], count).map_err(SolverError::from)?;
            }
            // device time when the circuit depth is known, sampler wall time otherwise
            out.timing.solve = match layers {
                Some(l) => *shots as f64 * *l as f64 * layer_time,
                None => started.elapsed().as_secs_f64(),
            };
            Ok(out)
        }
        _ => unreachable!("prepare matches every solver kind"),
    }
}

pub struct Runner<'a> {
    cfg: &'a ExperimentConfig,
    oracles: BTreeMap<String, Oracle>,
}

impl<'a> Runner<'a> {
    pub fn new(cfg: &'a ExperimentConfig) -> Self {
        Runner { cfg, oracles: BTreeMap::new() }
    }

    /// Preloads oracle solutions keyed by instance hash.
    pub fn with_oracles(mut self, oracles: impl IntoIterator<Item = Oracle>) -> Self {
        self.oracles.extend(oracles.into_iter().map(|o| (o.instance_hash.clone(), o)));
        self
    }

    fn pool(&self) -> Result<rayon::ThreadPool, HarnessError> {
        rayon::ThreadPoolBuilder::new()
            .num_threads(self.cfg.jobs)
            .build()
            .map_err(|e| HarnessError::Config(format!("thread pool: {e}")))
    }

    /// Runs the configured scenario over `instances` with the full roster.
    pub fn run(&self, instances: &[BenchInstance]) -> Result<Vec<RunRecord>, HarnessError> {
        self.run_roster(instances, &self.cfg.solvers)
    }

    pub fn run_roster(&self, instances: &[BenchInstance], roster: &[SolverEntry]) -> Result<Vec<RunRecord>, HarnessError> {
        let pool = self.pool()?;
        pool.install(|| match self.cfg.scenario {
            Scenario::Tts => self.run_tts(instances, roster),
            Scenario::Bsf => Ok(self.run_bsf(instances, roster)),
        })
    }

    /// Oracle for every instance; the error string explains a skip.
    pub fn oracles(&self, instances: &[BenchInstance]) -> Vec<Result<Oracle, String>> {
        instances
            .par_iter()
            .map(|inst| match self.oracles.get(&inst.hash) {
                Some(o) => Ok(o.clone()),
                None => compute_oracle(inst, self.cfg.oracle_cap).map_err(|e| e.to_string()),
            })
            .collect()
    }

    fn run_tts(&self, instances: &[BenchInstance], roster: &[SolverEntry]) -> Result<Vec<RunRecord>, HarnessError> {
        let oracles = self.oracles(instances);
        let tasks: Vec<(usize, &SolverEntry)> =
            (0..instances.len()).flat_map(|i| roster.iter().map(move |s| (i, s))).collect();
        let records = tasks
            .par_iter()
            .map(|&(i, entry)| {
                let inst = &instances[i];
                let mut rec = self.blank_record(inst, entry);
                rec.group = format!("{}/n{}", inst.family, inst.num_nodes);
                rec.reference = Some(Reference::Optimal);
                match &oracles[i] {
                    Ok(oracle) => self.tts_one(inst, entry, oracle, &mut rec),
                    Err(reason) => {
                        warn!("skipping {} for {}: oracle unavailable: {reason}", inst.id, entry.id);
                        rec.status = RunStatus::Skipped;
                        rec.error = Some(format!("oracle unavailable: {reason}"));
                    }
                }
                rec
            })
            .collect();
        Ok(records)
    }

    fn blank_record(&self, inst: &BenchInstance, entry: &SolverEntry) -> RunRecord {
        RunRecord {
            scenario: self.cfg.scenario.name().to_string(),
            group: String::new(),
            instance_id: inst.id.clone(),
            instance_hash: inst.hash.clone(),
            family: inst.family.clone(),
            num_nodes: inst.num_nodes,
            solver_id: entry.id.clone(),
            solver_kind: entry.spec.kind().to_string(),
            config_hash: entry.config_hash(),
            seed: derive_seed(self.cfg.seed, &inst.id, &entry.id),
            status: RunStatus::Ok,
            error: None,
            best_cost: None,
            best_bitstring: None,
            draws: 0,
            calls: 0,
            timing: Default::default(),
            cpu_time: 0.0,
            wall_time: 0.0,
            reference: None,
            metrics: BTreeMap::new(),
        }
    }

    fn tts_one(&self, inst: &BenchInstance, entry: &SolverEntry, oracle: &Oracle, rec: &mut RunRecord) {
        let wall = Instant::now();
        let cpu = thread_cpu_time();
        let target = Target::of(inst);
        let outcome = (|| -> Result<(), HarnessError> {
            let pre = Instant::now();
            let prepared = prepare(&target, &entry.spec)?;
            let preprocess = pre.elapsed().as_secs_f64();
            let mut sample = call(&target, &entry.spec, &prepared, call_seed(rec.seed, 0))?;
            sample.timing.preprocess += preprocess;
            fill_sample(rec, &sample, 1);
            self.tts_metrics(&target, &prepared, &sample, oracle, rec)
        })();
        if let Err(e) = outcome {
            rec.status = RunStatus::Failed;
            rec.error = Some(e.to_string());
        }
        rec.wall_time = wall.elapsed().as_secs_f64();
        rec.cpu_time = thread_cpu_time() - cpu;
    }

    fn tts_metrics(
        &self,
        target: &Target,
        prepared: &Prepared,
        sample: &SampleSet,
        oracle: &Oracle,
        rec: &mut RunRecord,
    ) -> Result<(), HarnessError> {
        let opt = oracle.optimal_cost;
        let best = sample.best_cost().ok_or(metrics::MetricError::Empty)?;
        rec.set_metric(keys::RATIO, bsf_from_cost(best, &MetricContext { optimal_cost: Some(opt), best_found_cost: None })?.ratio);
        if let Prepared::Qaoa { dist, layers, layer_time, .. } = prepared {
            rec.set_metric(keys::P_STAR, dist.p_star);
            rec.set_metric(keys::AR, dist.approximation_ratio()?);
            match layers {
                Some(l) => {
                    let tl = tts_layers(dist.p_star, *l);
                    rec.set_metric(keys::LAYERS, *l as f64);
                    rec.set_metric(keys::TTS_LAYERS, tl);
                    let tts = tl * layer_time;
                    rec.set_metric(keys::TTS, tts);
                    rec.set_metric(keys::TTS_OH, metrics::with_overhead(tts, &sample.timing));
                }
                None => rec.error = Some("circuit depth unavailable for this ansatz; TTS omitted".into()),
            }
            if let Target::Tsp(..) = target {
                rec.set_metric(keys::FEASIBILITY, dist.feasibility_ratio());
                rec.set_metric(keys::TOUR_VALIDITY, dist.tour_validity().unwrap_or(0.0));
                rec.set_metric(keys::COMBINED_ERROR, dist.tsp_combined_error()?);
            }
            return Ok(());
        }
        let p_star = metrics::empirical_p_star(sample, opt)?;
        rec.set_metric(keys::P_STAR, p_star);
        rec.set_metric(keys::TTS, metrics::tts(sample, p_star, DEFAULT_TARGET)?);
        rec.set_metric(keys::TTS_OH, metrics::tts_oh(sample, p_star, DEFAULT_TARGET)?);
        rec.set_metric(keys::AR, metrics::approximation_ratio(sample, opt)?);
        if let Target::Tsp(t, _) = target {
            let k = t.k();
            let valid = metrics::feasibility_ratio(sample, |b| decode_onehot(b.bits(), k).is_some())?;
            rec.set_metric(keys::FEASIBILITY, valid);
            rec.set_metric(keys::TOUR_VALIDITY, valid);
            if let (Some(l_star), Some(l_worst)) = (oracle.optimal_length, oracle.worst_length) {
                let outcomes = sample
                    .iter()
                    .map(|(b, e)| (e.count as f64, decode_onehot(b.bits(), k).map(|p| t.tour_length(&p))));
                rec.set_metric(keys::COMBINED_ERROR, metrics::tsp_combined_error(outcomes, l_star, l_worst)?);
            }
        }
        Ok(())
    }

    fn run_bsf(&self, instances: &[BenchInstance], roster: &[SolverEntry]) -> Vec<RunRecord> {
        let limit = self.cfg.time_limit();
        let tasks: Vec<(usize, &SolverEntry)> =
            (0..instances.len()).flat_map(|i| roster.iter().map(move |s| (i, s))).collect();
        let mut records: Vec<RunRecord> = tasks
            .par_iter()
            .map(|&(i, entry)| {
                let inst = &instances[i];
                let mut rec = self.blank_record(inst, entry);
                rec.reference = Some(Reference::BestFound);
                bsf_one(inst, entry, limit, &mut rec);
                rec
            })
            .collect();
        score_bsf(instances, &mut records, self.cfg.bins);
        records
    }
}

fn fill_sample(rec: &mut RunRecord, sample: &SampleSet, calls: u64) {
    rec.draws = sample.total_draws();
    rec.calls = calls;
    rec.timing = sample.timing;
    if let Some((bits, cost)) = sample.best() {
        rec.best_cost = Some(Real(cost));
        rec.best_bitstring = Some(bits.to_string());
    }
}

/// Repeats calls until `limit` seconds of wall clock have passed; the call
/// in flight when the budget expires completes and is kept.
fn bsf_one(inst: &BenchInstance, entry: &SolverEntry, limit: f64, rec: &mut RunRecord) {
    let wall = Instant::now();
    let cpu = thread_cpu_time();
    let target = Target::of(inst);
    let outcome = (|| -> Result<(), HarnessError> {
        let prepared = prepare(&target, &entry.spec)?;
        let preprocess = wall.elapsed().as_secs_f64();
        let mut pooled: Option<SampleSet> = None;
        let mut calls = 0u64;
        loop {
            let s = call(&target, &entry.spec, &prepared, call_seed(rec.seed, calls))?;
            calls += 1;
            match &mut pooled {
                None => pooled = Some(s),
                Some(p) => p.absorb(&s).map_err(SolverError::from)?,
            }
            // an exhaustive call proves optimality, so later calls add nothing
            if matches!(entry.spec, SolverSpec::Exhaustive(_)) {
                rec.set_metric("early_stop", 1.0);
                break;
            }
            if wall.elapsed().as_secs_f64() >= limit {
                break;
            }
        }
        let mut pooled = pooled.expect("at least one call");
        pooled.timing.preprocess += preprocess;
        fill_sample(rec, &pooled, calls);
        Ok(())
    })();
    if let Err(e) = outcome {
        warn!("{} on {} failed: {e}", entry.id, inst.id);
        rec.status = RunStatus::Failed;
        rec.error = Some(e.to_string());
    }
    rec.wall_time = wall.elapsed().as_secs_f64();
    rec.cpu_time = thread_cpu_time() - cpu;
    info!("{} on {}: {} calls, best {:?}", entry.id, inst.id, rec.calls, rec.best_cost.map(|r| r.0));
}

/// Best-found reference per instance from successful runs, then relative
/// error, the overall-best flag and size-bin groups.
fn score_bsf(instances: &[BenchInstance], records: &mut [RunRecord], bins: usize) {
    let mut best: BTreeMap<&str, f64> = BTreeMap::new();
    for r in records.iter().filter(|r| r.is_ok()) {
        if let Some(Real(c)) = r.best_cost {
            let e = best.entry(r.instance_id.as_str()).or_insert(f64::INFINITY);
            *e = e.min(c);
        }
    }
    let best: BTreeMap<String, f64> = best.into_iter().map(|(k, v)| (k.to_string(), v)).collect();
    let labels = bin_labels(instances, bins);
    for r in records.iter_mut() {
        r.group = labels.get(&r.instance_id).cloned().unwrap_or_default();
        let (Some(Real(c)), Some(&reference), true) = (r.best_cost, best.get(&r.instance_id), r.is_ok()) else {
            continue;
        };
        r.set_metric(keys::OVERALL_BEST, f64::from((c - reference).abs() <= metrics::COST_TOL));
        let ctx = MetricContext { optimal_cost: None, best_found_cost: Some(reference) };
        match bsf_from_cost(c, &ctx) {
            Ok(b) => {
                r.set_metric(keys::RATIO, b.ratio);
                r.set_metric(keys::RELATIVE_ERROR, b.relative_error);
            }
            Err(e) => r.error = Some(format!("ratio undefined: {e}")),
        }
    }
}

/// `n{lo}-{hi}` label of each instance's equal-frequency size bin.
fn bin_labels(instances: &[BenchInstance], bins: usize) -> BTreeMap<String, String> {
    let sizes: Vec<usize> = instances.iter().map(|b| b.num_nodes).collect();
    let assignment = equal_frequency_bins(&sizes, bins);
    let mut range: BTreeMap<usize, (usize, usize)> = BTreeMap::new();
    for (&b, &n) in assignment.iter().zip(&sizes) {
        let e = range.entry(b).or_insert((n, n));
        *e = (e.0.min(n), e.1.max(n));
    }
    instances
        .iter()
        .zip(&assignment)
        .map(|(inst, b)| {
            let (lo, hi) = range[b];
            (inst.id.clone(), format!("n{lo:03}-{hi:03}"))
        })
        .collect()
}

/// Materialises the benchmark set and runs the configured scenario.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<Vec<RunRecord>, HarnessError> {
    let instances = materialize(&cfg.instances, cfg.seed, "bench")?;
    Runner::new(cfg).run(&instances)
}
