//! Figures of merit over sample sets and exact output distributions.
//!
//! All costs follow the minimisation convention, so Max-Cut ratios compare
//! two negative numbers.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{SampleSet, Timing};

/// Cost tolerance used for optimality and FOB equality tests.
pub const COST_TOL: f64 = 1e-9;
/// Default confidence for TTS and TTT.
pub const DEFAULT_TARGET: f64 = 0.99;

#[derive(Debug, Error, PartialEq)]
pub enum MetricError {
    #[error("reference cost is zero; ratio undefined")]
    ZeroReference,
    #[error("empty input")]
    Empty,
    #[error("worst length equals optimal length ({0}); combined error undefined")]
    Degenerate(f64),
    #[error("probability {0} outside [0, 1]")]
    BadProbability(f64),
}

/// Repetitions needed to see a success of probability `p` with confidence
/// `target`: `ceil(log(1 - target) / log(1 - p))`, or `None` for `p = 0`.
///
/// A ratio within 1e-9 of an integer is rounded to it, so that e.g. `p = 0.9`
/// yields 2 rather than 3 from a last-ulp excess.
pub fn repetitions(p: f64, target: f64) -> Result<Option<u64>, MetricError> {
    if !(0.0..=1.0).contains(&p) {
        return Err(MetricError::BadProbability(p));
    }
    if p == 0.0 {
        return Ok(None);
    }
    if p == 1.0 {
        return Ok(Some(1));
    }
    let ratio = (1.0 - target).ln() / (1.0 - p).ln();
    Ok(Some(((ratio - 1e-9).ceil() as u64).max(1)))
}

fn scaled(per_shot: f64, p: f64, target: f64) -> Result<f64, MetricError> {
    Ok(match repetitions(p, target)? {
        Some(r) => per_shot * r as f64,
        None => f64::INFINITY,
    })
}

/// `t_solve / M` per draw times the repetition count.
pub fn tts(sample: &SampleSet, p_star: f64, target: f64) -> Result<f64, MetricError> {
    let m = sample.total_draws();
    if m == 0 {
        return Err(MetricError::Empty);
    }
    tts_from_parts(sample.timing.solve, m, p_star, target)
}

pub fn tts_from_parts(t_solve: f64, draws: u64, p_star: f64, target: f64) -> Result<f64, MetricError> {
    if draws == 0 {
        return Err(MetricError::Empty);
    }
    scaled(t_solve / draws as f64, p_star, target)
}

/// TTS plus preprocessing and postprocessing time.
pub fn tts_oh(sample: &SampleSet, p_star: f64, target: f64) -> Result<f64, MetricError> {
    Ok(with_overhead(tts(sample, p_star, target)?, &sample.timing))
}

pub fn with_overhead(tts: f64, timing: &Timing) -> f64 {
    tts + timing.preprocess + timing.postprocess
}

/// Fraction of draws whose cost is at most `threshold + COST_TOL`.
pub fn success_probability(sample: &SampleSet, threshold: f64) -> Result<f64, MetricError> {
    let m = sample.total_draws();
    if m == 0 {
        return Err(MetricError::Empty);
    }
    let hits: u64 = sample
        .iter()
        .filter(|(_, e)| e.cost <= threshold + COST_TOL)
        .map(|(_, e)| e.count)
        .sum();
    Ok(hits as f64 / m as f64)
}

/// Empirical `p*`: hits on the optimal cost over all draws.
pub fn empirical_p_star(sample: &SampleSet, optimal_cost: f64) -> Result<f64, MetricError> {
    success_probability(sample, optimal_cost)
}

/// Time-to-target at a threshold cost.
pub fn ttt(sample: &SampleSet, threshold: f64, target: f64) -> Result<f64, MetricError> {
    let p = success_probability(sample, threshold)?;
    tts(sample, p, target)
}

/// Reference the BSF ratio was formed against.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Reference {
    /// Proven optimum `C(x*)`; the ratio is `c`.
    Optimal,
    /// Best found across solvers `C(x̂)`; the ratio is `ĉ`.
    BestFound,
}

impl Reference {
    pub fn label(self) -> &'static str {
        match self {
            Reference::Optimal => "c",
            Reference::BestFound => "c_hat",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct MetricContext {
    pub optimal_cost: Option<f64>,
    pub best_found_cost: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bsf {
    pub best_cost: f64,
    pub ratio: f64,
    pub relative_error: f64,
    pub reference: Reference,
}

pub fn bsf_relative(sample: &SampleSet, ctx: &MetricContext) -> Result<Bsf, MetricError> {
    let best = sample.best_cost().ok_or(MetricError::Empty)?;
    bsf_from_cost(best, ctx)
}

pub fn bsf_from_cost(best_cost: f64, ctx: &MetricContext) -> Result<Bsf, MetricError> {
    let (reference_cost, reference) = match (ctx.optimal_cost, ctx.best_found_cost) {
        (Some(c), _) => (c, Reference::Optimal),
        (None, Some(c)) => (c, Reference::BestFound),
        (None, None) => return Err(MetricError::Empty),
    };
    if reference_cost == 0.0 {
        return Err(MetricError::ZeroReference);
    }
    // equal costs give exactly 1 even when they differ in the last bits
    let ratio = if (best_cost - reference_cost).abs() <= COST_TOL {
        1.0
    } else {
        best_cost / reference_cost
    };
    Ok(Bsf { best_cost, ratio, relative_error: (1.0 - ratio).abs(), reference })
}

/// Fraction of instances whose best cost matches the cross-solver best.
/// Each entry is `(solver best cost, overall best cost)`.
pub fn fob(entries: &[(f64, f64)]) -> Result<f64, MetricError> {
    if entries.is_empty() {
        return Err(MetricError::Empty);
    }
    let hits = entries.iter().filter(|(c, best)| (c - best).abs() <= COST_TOL).count();
    Ok(hits as f64 / entries.len() as f64)
}

/// `⟨C⟩ / C(x*)` over the draws of a sample set.
pub fn approximation_ratio(sample: &SampleSet, optimal_cost: f64) -> Result<f64, MetricError> {
    let mean = sample.mean_cost().ok_or(MetricError::Empty)?;
    ratio(mean, optimal_cost)
}

pub fn ratio(expected_cost: f64, optimal_cost: f64) -> Result<f64, MetricError> {
    if optimal_cost == 0.0 {
        return Err(MetricError::ZeroReference);
    }
    Ok(expected_cost / optimal_cost)
}

/// Ratio rescaled onto `[0, 1]` with the worst cost: `(worst - ⟨C⟩) / (worst - best)`.
pub fn worst_normalized_ratio(expected_cost: f64, optimal_cost: f64, worst_cost: f64) -> Result<f64, MetricError> {
    if worst_cost == optimal_cost {
        return Err(MetricError::Degenerate(worst_cost));
    }
    Ok((worst_cost - expected_cost) / (worst_cost - optimal_cost))
}

/// Count-weighted fraction of draws accepted by `feasible`.
pub fn feasibility_ratio<F>(sample: &SampleSet, feasible: F) -> Result<f64, MetricError>
where
    F: Fn(&crate::model::Bitstring) -> bool,
{
    let m = sample.total_draws();
    if m == 0 {
        return Err(MetricError::Empty);
    }
    let ok: u64 = sample.iter().filter(|(b, _)| feasible(b)).map(|(_, e)| e.count).sum();
    Ok(ok as f64 / m as f64)
}

/// Combined TSP error over weighted outcomes `(weight, Some(length) | None)`.
/// Infeasible outcomes count as `l_worst - l*`; weights are normalised.
pub fn tsp_combined_error<I>(outcomes: I, l_star: f64, l_worst: f64) -> Result<f64, MetricError>
where
    I: IntoIterator<Item = (f64, Option<f64>)>,
{
    let span = l_worst - l_star;
    if !(span > 0.0) {
        return Err(MetricError::Degenerate(l_worst));
    }
    let mut total = 0.0;
    let mut acc = 0.0;
    for (w, len) in outcomes {
        total += w;
        acc += w * match len {
            Some(l) => l - l_star,
            None => span,
        };
    }
    if total <= 0.0 {
        return Err(MetricError::Empty);
    }
    Ok(acc / total / span)
}

/// Non-dominated `(runtime, error)` points, both minimised, ordered by runtime.
pub fn pareto_front(points: &[(f64, f64)]) -> Vec<(f64, f64)> {
    let mut sorted: Vec<(f64, f64)> = points.to_vec();
    sorted.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
    let mut front: Vec<(f64, f64)> = Vec::new();
    for p in sorted {
        if front.last().is_none_or(|last| p.1 < last.1) {
            front.push(p);
        }
    }
    front
}

/// Linear-interpolation quantile of unsorted data; infinities sort last.
pub fn quantile(values: &[f64], q: f64) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    let mut v = values.to_vec();
    v.sort_by(|a, b| a.total_cmp(b));
    let pos = q.clamp(0.0, 1.0) * (v.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    if lo == hi || v[lo] == v[hi] {
        return Some(v[lo]);
    }
    let frac = pos - lo as f64;
    Some(v[lo] + frac * (v[hi] - v[lo]))
}

/// Median with the 12.5% / 87.5% whiskers of a 75% interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub count: usize,
    pub median: f64,
    pub q12_5: f64,
    pub q87_5: f64,
}

pub fn summarize(values: &[f64]) -> Option<Summary> {
    Some(Summary {
        count: values.len(),
        median: quantile(values, 0.5)?,
        q12_5: quantile(values, 0.125)?,
        q87_5: quantile(values, 0.875)?,
    })
}

/// Equal-frequency bins over sizes: sizes are sorted and split into `bins`
/// contiguous runs of near-equal length, never splitting equal sizes.
/// Returns the bin index of each input.
pub fn equal_frequency_bins(sizes: &[usize], bins: usize) -> Vec<usize> {
    let n = sizes.len();
    if n == 0 || bins == 0 {
        return vec![0; n];
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&i| (sizes[i], i));
    let mut out = vec![0; n];
    let mut bin = 0;
    for (rank, &i) in order.iter().enumerate() {
        let target = rank * bins / n;
        let same_as_prev = rank > 0 && sizes[order[rank - 1]] == sizes[i];
        if target > bin && !same_as_prev {
            bin = target;
        }
        out[i] = bin;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Bitstring;

    fn sample_with(costs: &[(f64, u64)], t_solve: f64) -> SampleSet {
        let n = 8;
        let mut s = SampleSet::new(n);
        for (i, &(c, count)) in costs.iter().enumerate() {
            s.add(Bitstring::from_index(i as u64, n), c, count).unwrap();
        }
        s.timing.solve = t_solve;
        s
    }

    #[test]
    fn tts_edge_cases() {
        let s = sample_with(&[(-1.0, 4)], 2.0);
        assert_eq!(tts(&s, 1.0, DEFAULT_TARGET).unwrap(), 0.5);
        assert_eq!(tts(&s, 0.0, DEFAULT_TARGET).unwrap(), f64::INFINITY);
        let s = sample_with(&[(-1.0, 10)], 1.0);
        assert!((tts(&s, 0.5, DEFAULT_TARGET).unwrap() - 0.7).abs() < 1e-12);
    }

    #[test]
    fn repetition_counts() {
        assert_eq!(repetitions(0.5, 0.99).unwrap(), Some(7));
        assert_eq!(repetitions(0.3, 0.99).unwrap(), Some(13));
        assert_eq!(repetitions(0.9, 0.99).unwrap(), Some(2));
        assert_eq!(repetitions(1.0, 0.99).unwrap(), Some(1));
        assert_eq!(repetitions(0.0, 0.99).unwrap(), None);
        assert!(repetitions(1.5, 0.99).is_err());
    }

    #[test]
    fn overhead_is_additive() {
        let mut s = sample_with(&[(-1.0, 4)], 2.0);
        assert_eq!(tts_oh(&s, 1.0, DEFAULT_TARGET).unwrap(), 0.5);
        s.timing.preprocess = 0.2;
        s.timing.postprocess = 0.1;
        assert!((tts_oh(&s, 1.0, DEFAULT_TARGET).unwrap() - 0.8).abs() < 1e-12);
        assert_eq!(tts_oh(&s, 0.0, DEFAULT_TARGET).unwrap(), f64::INFINITY);
    }

    #[test]
    fn ttt_cases() {
        let s = sample_with(&[(-3.0, 3), (-1.0, 7)], 1.0);
        assert_eq!(ttt(&s, f64::INFINITY, DEFAULT_TARGET).unwrap(), 0.1);
        assert_eq!(ttt(&s, -5.0, DEFAULT_TARGET).unwrap(), f64::INFINITY);
        assert!((ttt(&s, -2.0, DEFAULT_TARGET).unwrap() - 1.3).abs() < 1e-12);
    }

    #[test]
    fn tts_monotone_in_p() {
        let mut prev = f64::INFINITY;
        for i in 0..=100 {
            let t = tts_from_parts(1.0, 10, i as f64 / 100.0, DEFAULT_TARGET).unwrap();
            assert!(t <= prev);
            prev = t;
        }
    }

    #[test]
    fn bsf_cases() {
        let ctx = MetricContext { optimal_cost: Some(-100.0), best_found_cost: None };
        let b = bsf_from_cost(-90.0, &ctx).unwrap();
        assert!((b.ratio - 0.9).abs() < 1e-12 && (b.relative_error - 0.1).abs() < 1e-12);
        assert_eq!(b.reference.label(), "c");
        let b = bsf_from_cost(-100.0, &ctx).unwrap();
        assert_eq!((b.ratio, b.relative_error), (1.0, 0.0));
        let hat = MetricContext { optimal_cost: None, best_found_cost: Some(-50.0) };
        assert_eq!(bsf_from_cost(-50.0, &hat).unwrap().reference.label(), "c_hat");
        let zero = MetricContext { optimal_cost: Some(0.0), best_found_cost: None };
        assert_eq!(bsf_from_cost(-1.0, &zero), Err(MetricError::ZeroReference));
    }

    #[test]
    fn fob_cases() {
        assert_eq!(fob(&[(1.0, 1.0), (2.0, 2.0)]).unwrap(), 1.0);
        assert_eq!(fob(&[(1.0, 0.0), (3.0, 2.0)]).unwrap(), 0.0);
        assert_eq!(fob(&[(1.0, 1.0), (2.0, 2.0 + 1e-12), (3.0, 3.0), (5.0, 4.0)]).unwrap(), 0.75);
        assert_eq!(fob(&[]), Err(MetricError::Empty));
    }

    #[test]
    fn ratio_cases() {
        let s = sample_with(&[(-2.0, 5)], 1.0);
        assert_eq!(approximation_ratio(&s, -2.0).unwrap(), 1.0);
        let s = sample_with(&[(0.0, 1), (-1.0, 1)], 1.0);
        assert_eq!(approximation_ratio(&s, -1.0).unwrap(), 0.5);
        let one = sample_with(&[(-7.0, 1)], 1.0);
        let ctx = MetricContext { optimal_cost: Some(-9.0), best_found_cost: None };
        assert_eq!(approximation_ratio(&one, -9.0).unwrap(), bsf_relative(&one, &ctx).unwrap().ratio);
        assert_eq!(worst_normalized_ratio(-1.0, -2.0, 0.0).unwrap(), 0.5);
    }

    #[test]
    fn feasibility_cases() {
        let s = sample_with(&[(0.0, 3), (1.0, 1)], 1.0);
        assert_eq!(feasibility_ratio(&s, |_| true).unwrap(), 1.0);
        assert_eq!(feasibility_ratio(&s, |_| false).unwrap(), 0.0);
        assert_eq!(feasibility_ratio(&s, |b| b.to_index() == Some(0)).unwrap(), 0.75);
    }

    #[test]
    fn combined_error_cases() {
        assert_eq!(tsp_combined_error([(1.0, Some(4.0))], 4.0, 6.0).unwrap(), 0.0);
        assert_eq!(tsp_combined_error([(0.3, None), (0.7, None)], 4.0, 6.0).unwrap(), 1.0);
        assert!(tsp_combined_error([(1.0, None)], 4.0, 4.0).is_err());
        // uniform over the 6 fixed-start orders of the unit square
        let d = 2f64.sqrt();
        let lens = [4.0, 2.0 + 2.0 * d, 4.0, 2.0 + 2.0 * d, 4.0, 2.0 + 2.0 * d];
        let e = tsp_combined_error(lens.iter().map(|&l| (1.0, Some(l))), 4.0, 2.0 + 2.0 * d).unwrap();
        assert!((e - 0.5).abs() < 1e-12);
    }

    #[test]
    fn pareto_cases() {
        assert_eq!(pareto_front(&[(1.0, 0.5)]), vec![(1.0, 0.5)]);
        assert_eq!(pareto_front(&[(2.0, 0.1), (1.0, 0.5)]), vec![(1.0, 0.5), (2.0, 0.1)]);
        assert_eq!(pareto_front(&[(1.0, 0.5), (2.0, 0.5)]), vec![(1.0, 0.5)]);
    }

    #[test]
    fn quantiles_and_bins() {
        let v = [1.0, 2.0, 3.0, 4.0, 5.0];
        assert_eq!(quantile(&v, 0.5), Some(3.0));
        assert_eq!(quantile(&v, 0.125), Some(1.5));
        assert_eq!(quantile(&[1.0, f64::INFINITY, f64::INFINITY], 0.5), Some(f64::INFINITY));
        let bins = equal_frequency_bins(&[10, 10, 12, 12, 14, 14], 3);
        assert_eq!(bins, vec![0, 0, 1, 1, 2, 2]);
        let bins = equal_frequency_bins(&[30, 30, 30, 40], 2);
        assert_eq!(bins, vec![0, 0, 0, 1]);
    }
}
