//! Seeded Monte Carlo simulation of the operational process: availability
//! sampling, path selection, generation-by-generation transmission with the
//! coding pipeline, eavesdropping capture and jamming disruption.
//!
//! Trials draw from per-trial ChaCha streams split off a master seed, so a
//! (seed, config) pair produces bit-identical reports however the trials
//! are scheduled. Blocked trials are tracked separately and excluded from
//! the exposure means, mirroring the 1/(1 - P_B) conditioning of the
//! closed-form engine.
//!
//! By default each trial only counts wiretapped and jammed paths, which is
//! exactly what the reported metrics depend on; `verify_with_codec` makes
//! every trial push real blocks through encode/decode and cross-checks the
//! counting outcome against the actual coding results.

use crate::analysis::{ExposureReport, PolicyKind};
use crate::codec::{self, DecodeState, GenerationParams};
use crate::gf::Field;
use crate::netmodel::Scenario;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum SimError {
    #[error("config invalid: {0}")]
    BadConfig(String),
    #[error("all {0} trials were blocked; exposure means are undefined")]
    AllTrialsBlocked(u64),
    #[error("codec failure during simulated transmission: {0}")]
    Codec(#[from] codec::CodecError),
    #[error("codec cross-check failed: {0}")]
    CrossCheck(String),
}

/// One experiment: a scenario cell plus trial count and seed.
#[derive(Debug, Clone)]
pub struct TrialConfig {
    pub policy: PolicyKind,
    /// Generation size.
    pub k: usize,
    /// Redundancy; xi = n = k + r paths carry each generation.
    pub r: usize,
    /// Secret size in data blocks.
    pub m_blocks: usize,
    /// Payload length per block in bytes.
    pub block_len: usize,
    pub trials: u64,
    pub seed: u64,
    /// Push real blocks through the codec every trial and cross-check.
    pub verify_with_codec: bool,
}

impl TrialConfig {
    pub fn new(policy: PolicyKind, k: usize, r: usize) -> Self {
        TrialConfig {
            policy,
            k,
            r,
            m_blocks: 20,
            block_len: 80,
            trials: 100_000,
            seed: 1,
            verify_with_codec: false,
        }
    }

    pub fn xi(&self) -> usize {
        self.k + self.r
    }

    fn validate(&self, scenario: &Scenario) -> Result<(), SimError> {
        if self.k == 0 {
            return Err(SimError::BadConfig("k must be at least 1".into()));
        }
        if self.trials == 0 {
            return Err(SimError::BadConfig("trials must be at least 1".into()));
        }
        if self.m_blocks == 0 {
            return Err(SimError::BadConfig("secret must have at least 1 block".into()));
        }
        if self.xi() > scenario.paths.len() {
            return Err(SimError::BadConfig(format!(
                "xi = {} exceeds the {} candidate paths",
                self.xi(),
                scenario.paths.len()
            )));
        }
        Ok(())
    }
}

/// Ids (delay-sorted order) of the paths available this trial; each path is
/// included independently with its own probability.
pub fn sample_availability(probs: &[f64], rng: &mut impl Rng) -> Vec<usize> {
    probs
        .iter()
        .enumerate()
        .filter(|(_, &p)| rng.gen_bool(p))
        .map(|(i, _)| i)
        .collect()
}

/// Path selection outcome; fewer than xi available paths blocks the request.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Selection {
    Blocked,
    Chosen(Vec<usize>),
}

/// Choose xi transmission paths from the available set. OPT takes the
/// lowest-delay paths (available ids are already delay-sorted); RND draws a
/// uniform xi-subset.
pub fn select_paths(
    policy: PolicyKind,
    available: &[usize],
    xi: usize,
    rng: &mut impl Rng,
) -> Selection {
    if available.len() < xi {
        return Selection::Blocked;
    }
    match policy {
        PolicyKind::Opt => Selection::Chosen(available[..xi].to_vec()),
        PolicyKind::Rnd => {
            let mut chosen: Vec<usize> =
                available.choose_multiple(rng, xi).copied().collect();
            chosen.sort_unstable();
            Selection::Chosen(chosen)
        }
    }
}

/// What happened in one unblocked trial.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TrialOutcome {
    pub blocked: bool,
    /// Chosen paths crossing an eavesdrop edge.
    pub wiretap_paths_used: usize,
    pub eavesdropped_per_generation: Vec<usize>,
    pub jam_disrupted_per_generation: Vec<usize>,
    /// Every generation yielded at least k captured blocks.
    pub secret_recovered_by_attacker: bool,
    /// Some generation had more than r disrupted blocks.
    pub decode_failed_at_receiver: bool,
}

/// Transmit one M-block secret over the chosen paths. One coded block per
/// path per generation (n = xi); jamming is a detected erasure, so the
/// receiver decodes a generation iff it keeps at least k clean blocks.
pub fn run_transmission(
    field: &Field,
    config: &TrialConfig,
    eavesdropped_paths: usize,
    jammed_paths: usize,
    rng: &mut impl Rng,
) -> Result<TrialOutcome, SimError> {
    let (k, n) = (config.k, config.xi());
    debug_assert!(eavesdropped_paths <= n && jammed_paths <= n);
    let generations = config.m_blocks.div_ceil(k);
    let clean = n - jammed_paths;
    let decode_failed = clean < k;
    let recovered = eavesdropped_paths >= k;

    if config.verify_with_codec {
        verify_generations(field, config, eavesdropped_paths, jammed_paths, generations, rng)?;
    }

    Ok(TrialOutcome {
        blocked: false,
        wiretap_paths_used: eavesdropped_paths,
        eavesdropped_per_generation: vec![eavesdropped_paths; generations],
        jam_disrupted_per_generation: vec![jammed_paths; generations],
        secret_recovered_by_attacker: recovered,
        decode_failed_at_receiver: decode_failed,
    })
}

/// Run the real codec for each generation and cross-check the counting
/// outcome: the receiver's decode succeeds iff clean blocks >= k, and the
/// attacker's decode succeeds iff captured blocks >= k.
fn verify_generations(
    field: &Field,
    config: &TrialConfig,
    eavesdropped_paths: usize,
    jammed_paths: usize,
    generations: usize,
    rng: &mut impl Rng,
) -> Result<(), SimError> {
    let (k, n) = (config.k, config.xi());
    let params = GenerationParams::new(k, config.r).map_err(SimError::Codec)?;
    for g in 0..generations {
        let source: Vec<Vec<u8>> = (0..k)
            .map(|_| (0..config.block_len).map(|_| rng.gen()).collect())
            .collect();
        let vectors = codec::make_coefficients(field, params, rng)?;
        let coded = codec::encode_generation(field, g as u64, &source, &vectors)?;

        // Which of the n lanes are jammed / eavesdropped is irrelevant to
        // the counts; take prefixes.
        let mut receiver = DecodeState::new(g as u64, k)?;
        for block in coded.iter().skip(jammed_paths) {
            receiver.ingest(field, block)?;
        }
        let receiver_ok = receiver.decode(field).map(|d| d == source);
        match (n - jammed_paths >= k, receiver_ok) {
            (true, Ok(true)) | (false, Err(_)) => {}
            (expected, got) => {
                return Err(SimError::CrossCheck(format!(
                    "receiver decode mismatch in generation {g}: expected success={expected}, got {got:?}"
                )))
            }
        }

        let mut attacker = DecodeState::new(g as u64, k)?;
        for block in coded.iter().take(eavesdropped_paths) {
            attacker.ingest(field, block)?;
        }
        let attacker_ok = attacker.decode(field).map(|d| d == source);
        match (eavesdropped_paths >= k, attacker_ok) {
            (true, Ok(true)) | (false, Err(_)) => {}
            (expected, got) => {
                return Err(SimError::CrossCheck(format!(
                    "attacker decode mismatch in generation {g}: expected success={expected}, got {got:?}"
                )))
            }
        }
    }
    Ok(())
}

/// Mean and 95% confidence half-width of one simulated metric.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricStat {
    pub mean: f64,
    pub ci_halfwidth: f64,
    pub samples: u64,
}

impl MetricStat {
    fn from_sums(sum: f64, sumsq: f64, n: u64) -> MetricStat {
        let mean = sum / n as f64;
        let ci_halfwidth = if n > 1 {
            let var = ((sumsq - sum * sum / n as f64) / (n as f64 - 1.0)).max(0.0);
            1.96 * (var / n as f64).sqrt()
        } else {
            0.0
        };
        MetricStat { mean, ci_halfwidth, samples: n }
    }

    /// Does the analytical value fall within the 95% interval?
    pub fn covers(&self, analytical: f64) -> bool {
        (self.mean - analytical).abs() <= self.ci_halfwidth + 1e-9
    }
}

#[derive(Debug, Clone, Copy, Default)]
struct Accumulator {
    sum: f64,
    sumsq: f64,
}

impl Accumulator {
    fn push(&mut self, x: f64) {
        self.sum += x;
        self.sumsq += x * x;
    }

    fn stat(&self, n: u64) -> MetricStat {
        MetricStat::from_sums(self.sum, self.sumsq, n)
    }
}

/// Aggregated empirical metrics for one experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct SimReport {
    pub trials: u64,
    pub blocked_trials: u64,
    /// Fraction of trials blocked, over all trials.
    pub blocking: MetricStat,
    /// y_E / xi: fraction of the secret the eavesdropper collects.
    pub lambda_fraction: MetricStat,
    /// y_E / k: captured blocks per generation over the generation size.
    pub lambda_star: MetricStat,
    /// Fraction of unblocked trials with y_E >= k (secret recoverable).
    pub eavesdrop_success: MetricStat,
    /// Fraction of unblocked trials with y_J > r (generations undecodable).
    pub jam_success: MetricStat,
}

impl SimReport {
    /// Signed deltas (simulated mean minus analytical value) for the
    /// exposure metrics shared with an [`ExposureReport`].
    pub fn deltas(&self, analytical: &ExposureReport, m_blocks: u64) -> ExposureDeltas {
        ExposureDeltas {
            lambda_fraction: self.lambda_fraction.mean - analytical.lambda / m_blocks as f64,
            lambda_star: self.lambda_star.mean - analytical.lambda_star,
            blocking: self.blocking.mean - analytical.blocking,
        }
    }
}

/// Simulated-minus-analytical differences per shared metric.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExposureDeltas {
    pub lambda_fraction: f64,
    pub lambda_star: f64,
    pub blocking: f64,
}

/// Run all trials of one experiment. Deterministic for a given
/// (seed, config): trial t draws from ChaCha stream t of the master seed.
pub fn run_experiment(scenario: &Scenario, config: &TrialConfig) -> Result<SimReport, SimError> {
    config.validate(scenario)?;
    let field = Field::gf256();
    let probs = scenario.paths.availabilities();
    let eavesdrop_flags = scenario.paths.wiretap_flags(&scenario.attack.eavesdrop_edges);
    let jam_flags = scenario.paths.wiretap_flags(&scenario.attack.jam_edges);
    let xi = config.xi();

    let mut blocked: u64 = 0;
    let mut lambda_fraction = Accumulator::default();
    let mut lambda_star = Accumulator::default();
    let mut eavesdrop_success = Accumulator::default();
    let mut jam_success = Accumulator::default();

    for trial in 0..config.trials {
        let mut rng = ChaCha12Rng::seed_from_u64(config.seed);
        rng.set_stream(trial);
        let available = sample_availability(&probs, &mut rng);
        let Selection::Chosen(chosen) = select_paths(config.policy, &available, xi, &mut rng)
        else {
            blocked += 1;
            continue;
        };
        let y_e = chosen.iter().filter(|&&i| eavesdrop_flags[i]).count();
        let y_j = chosen.iter().filter(|&&i| jam_flags[i]).count();
        let outcome = run_transmission(&field, config, y_e, y_j, &mut rng)?;

        lambda_fraction.push(y_e as f64 / xi as f64);
        lambda_star.push(y_e as f64 / config.k as f64);
        eavesdrop_success.push(if outcome.secret_recovered_by_attacker { 1.0 } else { 0.0 });
        jam_success.push(if outcome.decode_failed_at_receiver { 1.0 } else { 0.0 });
    }

    let unblocked = config.trials - blocked;
    if unblocked == 0 {
        return Err(SimError::AllTrialsBlocked(config.trials));
    }
    let blocking = MetricStat::from_sums(
        blocked as f64,
        blocked as f64, // indicator: x^2 = x
        config.trials,
    );

    Ok(SimReport {
        trials: config.trials,
        blocked_trials: blocked,
        blocking,
        lambda_fraction: lambda_fraction.stat(unblocked),
        lambda_star: lambda_star.stat(unblocked),
        eavesdrop_success: eavesdrop_success.stat(unblocked),
        jam_success: jam_success.stat(unblocked),
    })
}
