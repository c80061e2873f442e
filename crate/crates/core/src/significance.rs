//! Significance tests for coincidence counts.
//!
//! Three null models are available:
//!
//! * `poisson`: binomial approximation for two independent, sparse Poisson
//!   processes. The per-event match probability is
//!   `1 - (1 - TOL / (T - tau))^N_other`, and the p-value is the upper
//!   binomial tail `P(K' >= K)`.
//! * `shuffle`: surrogate pairs with the observed event counts at uniformly
//!   random positions.
//! * `surrogate`: surrogate series built by resampling the observed waiting
//!   times between events.
//!
//! Surrogate p-values are the fraction of surrogate pairs whose coincidence
//! rate is at least the observed one (ties count). Every surrogate draws from
//! its own ChaCha8 stream, selected by its index, so the result only depends
//! on the seed and the number of repetitions, never on the thread count.

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::engine::{
    count_coincidences, precursor_count, trigger_count, CoincidenceCounts, EcaParams, EventPair,
    Format, Support,
};
use crate::error::{EcaError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum SigMethod {
    /// Analytical binomial approximation.
    Poisson,
    /// Uniformly shuffled event positions.
    Shuffle,
    /// Waiting-time-preserving surrogates.
    Surrogate,
}

impl std::fmt::Display for SigMethod {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            SigMethod::Poisson => "poisson",
            SigMethod::Shuffle => "shuffle",
            SigMethod::Surrogate => "surrogate",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SigConfig {
    pub method: SigMethod,
    pub reps: usize,
    pub alpha: f64,
    /// Master seed of the surrogate ensemble. `None` draws one at random.
    pub seed: Option<u64>,
}

impl Default for SigConfig {
    fn default() -> Self {
        Self {
            method: SigMethod::Poisson,
            reps: 1000,
            alpha: 0.05,
            seed: None,
        }
    }
}

impl SigConfig {
    pub fn validate(&self) -> Result<()> {
        if self.reps < 1 {
            return Err(EcaError::InvalidParameter(
                "reps must satisfy reps >= 1".into(),
            ));
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(EcaError::InvalidParameter(format!(
                "alpha must satisfy 0 < alpha < 1, got {}",
                self.alpha
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PValues {
    pub precursor: f64,
    pub trigger: f64,
}

/// Summary of one analysis. The `nh_*` flags are `true` when the null
/// hypothesis of independent random events is retained.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EcaResult {
    pub nh_precursor: bool,
    pub nh_trigger: bool,
    pub p_precursor: f64,
    pub p_trigger: f64,
    pub rate_precursor: f64,
    pub rate_trigger: f64,
}

impl EcaResult {
    pub fn new(p: PValues, rate_precursor: f64, rate_trigger: f64, alpha: f64) -> Self {
        Self {
            nh_precursor: decide(p.precursor, alpha),
            nh_trigger: decide(p.trigger, alpha),
            p_precursor: p.precursor,
            p_trigger: p.trigger,
            rate_precursor,
            rate_trigger,
        }
    }
}

/// `true` (retain) iff `p >= alpha`.
pub fn decide(p: f64, alpha: f64) -> bool {
    p >= alpha
}

/// Effective window length used by the analytical test.
pub fn effective_tol(delt: f64, sym: bool, format: Format) -> f64 {
    let width = if sym { 2.0 * delt } else { delt };
    match format {
        Format::Es => width,
        Format::Ts => width + 1.0,
    }
}

/// Probability that a given reference event has at least one of `n_other`
/// independent random events inside its window of length `tol`.
pub fn match_probability(n_other: usize, t: f64, tau: f64, tol: f64) -> Result<f64> {
    let avail = t - tau;
    if avail.is_nan() || avail <= 0.0 {
        return Err(EcaError::InvalidParameter(format!(
            "series length must exceed the lag: T = {t}, tau = {tau}"
        )));
    }
    if tol.is_nan() || tol < 0.0 || tol > avail {
        return Err(EcaError::ToleranceTooLarge { tol, avail });
    }
    let miss = tol / avail;
    // 1 - (1 - x)^n without cancellation for small x
    Ok((-(n_other as f64 * (-miss).ln_1p()).exp_m1()).clamp(0.0, 1.0))
}

/// Upper tail `P(X >= k)` of a binomial `X ~ B(n, p)`.
///
/// When `k` lies above the mean the terms are accumulated from `k` upwards;
/// otherwise the lower tail `P(X <= k - 1)` is accumulated downwards and
/// subtracted from one. Either way consecutive terms follow the pmf ratio
/// relative to a first term evaluated in log space, and the running sum is
/// rescaled when it grows large, so intermediate terms neither overflow nor
/// underflow.
pub fn binomial_upper_tail(n: u64, k: u64, p: f64) -> f64 {
    if k == 0 {
        return 1.0;
    }
    if k > n || p <= 0.0 {
        return 0.0;
    }
    if p >= 1.0 {
        return 1.0;
    }
    let tail = if k as f64 > n as f64 * p {
        pmf_sum(n, k, p, true)
    } else {
        1.0 - pmf_sum(n, k - 1, p, false)
    };
    tail.clamp(0.0, 1.0)
}

/// `sum_{j >= from} pmf(j)` when `upward`, else `sum_{j <= from} pmf(j)`.
fn pmf_sum(n: u64, from: u64, p: f64, upward: bool) -> f64 {
    const RESCALE: f64 = 1e200;

    let ln_p = p.ln();
    let ln_q = (-p).ln_1p();
    let odds = p / (1.0 - p);
    let ln_first = ln_choose(n, from) + from as f64 * ln_p + (n - from) as f64 * ln_q;
    let mean = n as f64 * p;

    let mut term = 1.0f64;
    let mut sum = 1.0f64;
    let mut ln_scale = 0.0f64;
    let mut j = from;
    loop {
        if upward {
            if j == n {
                break;
            }
            term *= (n - j) as f64 / (j + 1) as f64 * odds;
            j += 1;
        } else {
            if j == 0 {
                break;
            }
            term *= j as f64 / (n - j + 1) as f64 / odds;
            j -= 1;
        }
        sum += term;
        if sum > RESCALE {
            sum /= RESCALE;
            term /= RESCALE;
            ln_scale += RESCALE.ln();
        }
        // once past the mode the terms only shrink
        let past_mode = if upward {
            j as f64 > mean
        } else {
            (j as f64) < mean
        };
        if past_mode && term < sum * 1e-18 {
            break;
        }
    }
    let ln_base = ln_first + ln_scale;
    if ln_base < -700.0 {
        // exp(ln_base) alone would be subnormal
        (ln_base + sum.ln()).exp()
    } else {
        ln_base.exp() * sum
    }
}

/// `ln C(n, k)`, summed over the shorter side of the coefficient.
fn ln_choose(n: u64, k: u64) -> f64 {
    let k = k.min(n - k);
    (1..=k).map(|i| ((n - k + i) as f64 / i as f64).ln()).sum()
}

/// Analytical p-value of observing `k` or more coincidences among `n_ref`
/// reference events, given `n_other` events in the other series.
///
/// The precursor test uses `(N_A, N_B, K_p)`; the trigger test
/// `(N_B, N_A, K_t)`.
pub fn analytical_pvalue(
    n_ref: usize,
    n_other: usize,
    k: usize,
    t: f64,
    tau: f64,
    tol: f64,
) -> Result<f64> {
    if k > n_ref {
        return Err(EcaError::InvalidParameter(format!(
            "coincidence count must satisfy K <= N_ref, got K = {k}, N_ref = {n_ref}"
        )));
    }
    if n_other < 1 {
        return Err(EcaError::InvalidParameter(
            "the compared series needs at least one event".into(),
        ));
    }
    let p1 = match_probability(n_other, t, tau, tol)?;
    Ok(binomial_upper_tail(n_ref as u64, k as u64, p1))
}

/// `k_s / n_s >= k / n`, compared exactly. A surrogate without events has
/// rate 0.
fn rate_at_least(k_s: usize, n_s: usize, k: usize, n: usize) -> bool {
    if n_s == 0 {
        return k == 0;
    }
    (k_s as u128) * (n as u128) >= (k as u128) * (n_s as u128)
}

fn stream_rng(seed: u64, rep: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(rep as u64);
    rng
}

fn resolve_seed(sig: &SigConfig) -> u64 {
    sig.seed.unwrap_or_else(rand::random)
}

/// Scores `reps` surrogate pairs produced by `make` against the observed
/// counts.
fn score_ensemble<F>(
    observed: &CoincidenceCounts,
    params: &EcaParams,
    reps: usize,
    seed: u64,
    make: F,
) -> PValues
where
    F: Fn(&mut ChaCha8Rng) -> (Vec<f64>, Vec<f64>) + Sync,
{
    let (hits_p, hits_t) = (0..reps)
        .into_par_iter()
        .map(|rep| {
            let mut rng = stream_rng(seed, rep);
            let (a, b) = make(&mut rng);
            let kp = precursor_count(&a, &b, params);
            let kt = trigger_count(&a, &b, params);
            (
                rate_at_least(kp, a.len(), observed.k_p, observed.n_a) as usize,
                rate_at_least(kt, b.len(), observed.k_t, observed.n_b) as usize,
            )
        })
        .reduce(|| (0, 0), |x, y| (x.0 + y.0, x.1 + y.1));
    PValues {
        precursor: hits_p as f64 / reps as f64,
        trigger: hits_t as f64 / reps as f64,
    }
}

/// `n` distinct time steps from `1..=len`, sorted.
fn shuffled_steps(rng: &mut ChaCha8Rng, len: usize, n: usize) -> Vec<f64> {
    let mut out: Vec<f64> = index::sample(rng, len, n)
        .into_iter()
        .map(|i| (i + 1) as f64)
        .collect();
    out.sort_by(f64::total_cmp);
    out
}

/// `n` uniform times in `[start, end]`, sorted and de-duplicated.
fn shuffled_times(rng: &mut ChaCha8Rng, start: f64, end: f64, n: usize) -> Vec<f64> {
    let mut out: Vec<f64> = (0..n).map(|_| rng.gen_range(start..=end)).collect();
    out.sort_by(f64::total_cmp);
    out.dedup();
    out
}

/// Shuffle-surrogate test. Event time series place `N` events on distinct
/// valid time steps; event sequences draw `N` continuous uniform times from
/// the span.
pub fn shuffle_test(pair: &EventPair, params: &EcaParams, sig: &SigConfig) -> Result<PValues> {
    sig.validate()?;
    let observed = count_coincidences(pair, params)?;
    Ok(shuffle_with_seed(
        pair,
        &observed,
        params,
        sig.reps,
        resolve_seed(sig),
    ))
}

fn shuffle_with_seed(
    pair: &EventPair,
    observed: &CoincidenceCounts,
    params: &EcaParams,
    reps: usize,
    seed: u64,
) -> PValues {
    let (n_a, n_b) = (observed.n_a, observed.n_b);
    match pair.support() {
        Support::Steps(len) => score_ensemble(observed, params, reps, seed, |rng| {
            (shuffled_steps(rng, len, n_a), shuffled_steps(rng, len, n_b))
        }),
        Support::Span { start, end } => score_ensemble(observed, params, reps, seed, |rng| {
            (
                shuffled_times(rng, start, end, n_a),
                shuffled_times(rng, start, end, n_b),
            )
        }),
    }
}

fn waiting_times(times: &[f64]) -> Vec<f64> {
    times.windows(2).map(|w| w[1] - w[0]).collect()
}

/// Builds one surrogate by walking from `anchor` with waiting times drawn
/// (with replacement) from `gaps`, stopping before the walk passes `end`.
pub fn waiting_time_surrogate(rng: &mut impl Rng, gaps: &[f64], anchor: f64, end: f64) -> Vec<f64> {
    debug_assert!(!gaps.is_empty() && gaps.iter().all(|&g| g > 0.0));
    let mut out = Vec::new();
    let mut t = anchor;
    loop {
        t += gaps[rng.gen_range(0..gaps.len())];
        if t > end {
            break;
        }
        out.push(t);
    }
    out
}

/// Waiting-time-preserving surrogate test. Each surrogate starts from a
/// virtual event at the start of the record (step 0 for event time series,
/// the span start for event sequences) and is truncated at the end, so
/// surrogate event counts vary around the observed ones.
pub fn waiting_time_test(pair: &EventPair, params: &EcaParams, sig: &SigConfig) -> Result<PValues> {
    sig.validate()?;
    let observed = count_coincidences(pair, params)?;
    waiting_time_with_seed(pair, &observed, params, sig.reps, resolve_seed(sig))
}

fn waiting_time_with_seed(
    pair: &EventPair,
    observed: &CoincidenceCounts,
    params: &EcaParams,
    reps: usize,
    seed: u64,
) -> Result<PValues> {
    if pair.a().len() < 2 {
        return Err(EcaError::TooFewEvents('A'));
    }
    if pair.b().len() < 2 {
        return Err(EcaError::TooFewEvents('B'));
    }
    let gaps_a = waiting_times(pair.a());
    let gaps_b = waiting_times(pair.b());
    let (anchor, end) = match pair.support() {
        Support::Steps(len) => (0.0, len as f64),
        Support::Span { start, end } => (start, end),
    };
    Ok(score_ensemble(observed, params, reps, seed, |rng| {
        (
            waiting_time_surrogate(rng, &gaps_a, anchor, end),
            waiting_time_surrogate(rng, &gaps_b, anchor, end),
        )
    }))
}

/// Runs the configured test on counts already obtained for `pair`. Returns
/// the p-values and, for surrogate tests, the seed that was used.
pub fn test_pair(
    pair: &EventPair,
    counts: &CoincidenceCounts,
    params: &EcaParams,
    sig: &SigConfig,
) -> Result<(PValues, Option<u64>)> {
    sig.validate()?;
    match sig.method {
        SigMethod::Poisson => {
            let tol = effective_tol(params.delt, params.sym, pair.format());
            let t = counts.t_eff;
            let precursor =
                analytical_pvalue(counts.n_a, counts.n_b, counts.k_p, t, params.tau, tol)?;
            let trigger =
                analytical_pvalue(counts.n_b, counts.n_a, counts.k_t, t, params.tau, tol)?;
            Ok((PValues { precursor, trigger }, None))
        }
        SigMethod::Shuffle => {
            let seed = resolve_seed(sig);
            Ok((
                shuffle_with_seed(pair, counts, params, sig.reps, seed),
                Some(seed),
            ))
        }
        SigMethod::Surrogate => {
            let seed = resolve_seed(sig);
            Ok((
                waiting_time_with_seed(pair, counts, params, sig.reps, seed)?,
                Some(seed),
            ))
        }
    }
}
