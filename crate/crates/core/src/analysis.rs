//! Exact closed-form exposure engine.
//!
//! Availability combinatorics over the candidate path set (path-combination
//! probability, N-available distribution, blocking), expected wiretap-path
//! counts under optimal and random path selection, attacked-block metrics,
//! and catastrophic-security-threat probabilities.
//!
//! Everything here is exact enumeration: all 2^N availability subsets are
//! visited directly (N = 18 is 262,144 subsets), with compensated summation
//! for the long probability sums. The engine refuses universes above
//! [`MAX_UNIVERSE`] paths; no sampling happens on this side of the artifact.
//!
//! Random selection comes in two flavors that are deliberately kept apart:
//! [`RndModel::Formula`] normalizes over the event that exactly xi paths are
//! available, while [`RndModel::Operational`] models the operating process
//! (any N >= xi available, then a uniform xi-subset is chosen). The two do
//! not agree in general and both are reported.

use crate::netmodel::{EdgeId, Scenario};
use thiserror::Error;

/// Largest path universe the exact engine will enumerate (2^24 subsets).
pub const MAX_UNIVERSE: usize = 24;

#[derive(Debug, Error, PartialEq)]
pub enum AnalysisError {
    #[error("universe of {0} paths exceeds the exact-enumeration limit of {MAX_UNIVERSE}")]
    UniverseTooLarge(usize),
    #[error("xi = {xi} must be in 1..={universe}")]
    BadTransmissionCount { xi: usize, universe: usize },
    #[error("nu must be at least 1")]
    ZeroThreshold,
    #[error("every availability outcome is blocked; the expectation is undefined")]
    AllBlocked,
    #[error("no availability mass on exactly xi = {0} paths; Formula-model normalization is undefined")]
    NoExactAvailabilityMass(usize),
}

/// Kahan compensated accumulator for long sums of small products.
#[derive(Debug, Clone, Copy, Default)]
pub struct KahanSum {
    sum: f64,
    carry: f64,
}

impl KahanSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, x: f64) {
        let y = x - self.carry;
        let t = self.sum + y;
        self.carry = (t - self.sum) - y;
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum
    }
}

/// Path selection method.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PolicyKind {
    /// P-OPT: the xi lowest-delay available paths, ties by ascending id.
    Opt,
    /// P-RND: a uniform xi-subset of the available paths.
    Rnd,
}

/// A selection policy bound to the number of transmission paths xi = n.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SelectionPolicy {
    pub kind: PolicyKind,
    pub xi: usize,
}

/// Which reading of the random-selection expectation to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RndModel {
    /// As the closed form is written: condition on exactly xi available.
    Formula,
    /// The operating process: N >= xi available, uniform choice of xi.
    #[default]
    Operational,
}

/// Analytical exposure metrics for one (policy, k, r, wiretap-set) cell.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExposureReport {
    /// Expected number of utilized wiretap paths.
    pub expected_wiretap_paths: f64,
    /// Request blocking probability for xi paths.
    pub blocking: f64,
    /// Expected attacked data blocks out of the M-block secret.
    pub lambda: f64,
    /// Expected attacked blocks per generation, as a fraction of k.
    pub lambda_star: f64,
    /// Catastrophic-threat probability at the report's threshold nu.
    pub theta: f64,
}

/// Product of p over the members and (1 - p) over the complement.
pub fn combo_probability(probs: &[f64], members: &[usize]) -> f64 {
    let mut acc = 1.0;
    for (i, &p) in probs.iter().enumerate() {
        acc *= if members.contains(&i) { p } else { 1.0 - p };
    }
    acc
}

fn check_universe(probs: &[f64]) -> Result<(), AnalysisError> {
    if probs.len() > MAX_UNIVERSE {
        return Err(AnalysisError::UniverseTooLarge(probs.len()));
    }
    Ok(())
}

fn check_xi(probs: &[f64], xi: usize) -> Result<(), AnalysisError> {
    check_universe(probs)?;
    if xi == 0 || xi > probs.len() {
        return Err(AnalysisError::BadTransmissionCount { xi, universe: probs.len() });
    }
    Ok(())
}

fn mask_probability(probs: &[f64], mask: u32) -> f64 {
    let mut acc = 1.0;
    for (i, &p) in probs.iter().enumerate() {
        acc *= if mask & (1 << i) != 0 { p } else { 1.0 - p };
    }
    acc
}

/// Probability that exactly `j` of the universe's paths are available:
/// the sum of `combo_probability` over all C(|universe|, j) subsets.
pub fn prob_n_available(probs: &[f64], j: usize) -> Result<f64, AnalysisError> {
    check_universe(probs)?;
    if j > probs.len() {
        return Ok(0.0);
    }
    let mut acc = KahanSum::new();
    if j == 0 {
        return Ok(combo_probability(probs, &[]));
    }
    let mut subset: Vec<usize> = (0..j).collect();
    loop {
        acc.add(combo_probability(probs, &subset));
        if !advance(&mut subset, probs.len()) {
            break;
        }
    }
    Ok(acc.value())
}

/// The whole availability distribution in one 2^N sweep.
pub fn availability_pmf(probs: &[f64]) -> Result<Vec<f64>, AnalysisError> {
    check_universe(probs)?;
    let n = probs.len();
    let mut buckets = vec![KahanSum::new(); n + 1];
    for mask in 0u32..(1u32 << n) {
        buckets[mask.count_ones() as usize].add(mask_probability(probs, mask));
    }
    Ok(buckets.iter().map(|b| b.value()).collect())
}

/// Probability that fewer than `xi` paths are available at request time.
pub fn blocking_probability(probs: &[f64], xi: usize) -> Result<f64, AnalysisError> {
    check_xi(probs, xi)?;
    let pmf = availability_pmf(probs)?;
    let mut acc = KahanSum::new();
    for p in &pmf[..xi] {
        acc.add(*p);
    }
    Ok(acc.value().min(1.0))
}

/// Number of wiretap paths in a chosen combination: one per wiretapped path.
pub fn wiretap_path_count(chosen: &[usize], wiretapped: &[bool]) -> usize {
    chosen.iter().filter(|&&i| wiretapped[i]).count()
}

/// Wiretap count of the xi lowest-delay members of an availability mask.
/// Paths are indexed in delay-sorted order, so those are the first xi bits.
fn opt_wiretap_count(mask: u32, n: usize, xi: usize, wiretapped: &[bool]) -> usize {
    let mut taken = 0;
    let mut hits = 0;
    for i in 0..n {
        if mask & (1 << i) != 0 {
            if wiretapped[i] {
                hits += 1;
            }
            taken += 1;
            if taken == xi {
                break;
            }
        }
    }
    hits
}

fn unblocked_mass(probs: &[f64], xi: usize) -> Result<f64, AnalysisError> {
    let mass = 1.0 - blocking_probability(probs, xi)?;
    if mass <= 0.0 {
        return Err(AnalysisError::AllBlocked);
    }
    Ok(mass)
}

// P-OPT expectations share this shape: sweep every availability outcome
// with at least xi paths, weight by its probability, score the xi
// lowest-delay members, normalize by the unblocked mass.
fn opt_sum(
    probs: &[f64],
    xi: usize,
    score: impl Fn(usize) -> f64,
    wiretapped: &[bool],
) -> Result<f64, AnalysisError> {
    check_xi(probs, xi)?;
    let mass = unblocked_mass(probs, xi)?;
    let n = probs.len();
    let mut num = KahanSum::new();
    for mask in 0u32..(1u32 << n) {
        if (mask.count_ones() as usize) < xi {
            continue;
        }
        let v = score(opt_wiretap_count(mask, n, xi, wiretapped));
        if v != 0.0 {
            num.add(mask_probability(probs, mask) * v);
        }
    }
    Ok(num.value() / mass)
}

// Formula-model P-RND sums: iterate all C(N, xi) combinations of the whole
// universe, weight by P'', normalize by the exactly-xi availability mass.
fn rnd_formula_sum(
    probs: &[f64],
    xi: usize,
    score: impl Fn(usize) -> f64,
    wiretapped: &[bool],
) -> Result<f64, AnalysisError> {
    check_xi(probs, xi)?;
    let n = probs.len();
    let mut num = KahanSum::new();
    let mut den = KahanSum::new();
    let mut subset: Vec<usize> = (0..xi).collect();
    loop {
        let p = combo_probability(probs, &subset);
        den.add(p);
        let v = score(wiretap_path_count(&subset, wiretapped));
        if v != 0.0 {
            num.add(p * v);
        }
        if !advance(&mut subset, n) {
            break;
        }
    }
    if den.value() <= 0.0 {
        return Err(AnalysisError::NoExactAvailabilityMass(xi));
    }
    Ok(num.value() / den.value())
}

/// Expected utilized wiretap paths under P-OPT.
pub fn expected_wiretap_paths_opt(
    probs: &[f64],
    wiretapped: &[bool],
    xi: usize,
) -> Result<f64, AnalysisError> {
    opt_sum(probs, xi, |y| y as f64, wiretapped)
}

/// Expected utilized wiretap paths under P-RND, Formula model.
pub fn expected_wiretap_paths_rnd(
    probs: &[f64],
    wiretapped: &[bool],
    xi: usize,
) -> Result<f64, AnalysisError> {
    rnd_formula_sum(probs, xi, |y| y as f64, wiretapped)
}

/// Expected utilized wiretap paths under P-RND, operational model. With a
/// uniform xi-subset drawn from N available paths of which W are
/// wiretapped, the per-outcome expectation is xi * W / N by linearity.
pub fn expected_wiretap_paths_rnd_operational(
    probs: &[f64],
    wiretapped: &[bool],
    xi: usize,
) -> Result<f64, AnalysisError> {
    check_xi(probs, xi)?;
    let mass = unblocked_mass(probs, xi)?;
    let n = probs.len();
    let mut num = KahanSum::new();
    for mask in 0u32..(1u32 << n) {
        let avail = mask.count_ones() as usize;
        if avail < xi {
            continue;
        }
        let w = (0..n).filter(|&i| mask & (1 << i) != 0 && wiretapped[i]).count();
        if w > 0 {
            num.add(mask_probability(probs, mask) * (xi as f64 * w as f64 / avail as f64));
        }
    }
    Ok(num.value() / mass)
}

/// Catastrophic-threat probability under P-OPT: the chance that at least
/// `nu` of the xi utilized paths are wiretap paths.
pub fn catastrophic_threat_opt(
    probs: &[f64],
    wiretapped: &[bool],
    nu: usize,
    xi: usize,
) -> Result<f64, AnalysisError> {
    if nu == 0 {
        return Err(AnalysisError::ZeroThreshold);
    }
    if nu > xi {
        return Ok(0.0);
    }
    opt_sum(probs, xi, |y| if y >= nu { 1.0 } else { 0.0 }, wiretapped)
}

/// Catastrophic-threat probability under P-RND, Formula model.
pub fn catastrophic_threat_rnd(
    probs: &[f64],
    wiretapped: &[bool],
    nu: usize,
    xi: usize,
) -> Result<f64, AnalysisError> {
    if nu == 0 {
        return Err(AnalysisError::ZeroThreshold);
    }
    if nu > xi {
        return Ok(0.0);
    }
    rnd_formula_sum(probs, xi, |y| if y >= nu { 1.0 } else { 0.0 }, wiretapped)
}

/// Catastrophic-threat probability under P-RND, operational model: a
/// hypergeometric tail per availability outcome.
pub fn catastrophic_threat_rnd_operational(
    probs: &[f64],
    wiretapped: &[bool],
    nu: usize,
    xi: usize,
) -> Result<f64, AnalysisError> {
    if nu == 0 {
        return Err(AnalysisError::ZeroThreshold);
    }
    if nu > xi {
        return Ok(0.0);
    }
    check_xi(probs, xi)?;
    let mass = unblocked_mass(probs, xi)?;
    let n = probs.len();
    let mut num = KahanSum::new();
    for mask in 0u32..(1u32 << n) {
        let avail = mask.count_ones() as usize;
        if avail < xi {
            continue;
        }
        let w = (0..n).filter(|&i| mask & (1 << i) != 0 && wiretapped[i]).count();
        let tail = hypergeometric_tail(avail, w, xi, nu);
        if tail > 0.0 {
            num.add(mask_probability(probs, mask) * tail);
        }
    }
    Ok(num.value() / mass)
}

/// P(at least `nu` wiretapped) when drawing `xi` uniformly from `n` paths
/// of which `w` are wiretapped.
fn hypergeometric_tail(n: usize, w: usize, xi: usize, nu: usize) -> f64 {
    if nu > w.min(xi) {
        return 0.0;
    }
    let total = binomial(n, xi);
    let mut acc = 0.0;
    for i in nu..=w.min(xi) {
        if xi - i <= n - w {
            acc += binomial(w, i) * binomial(n - w, xi - i);
        }
    }
    acc / total
}

fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    let mut acc = 1.0;
    for i in 0..k {
        acc = acc * (n - i) as f64 / (i + 1) as f64;
    }
    acc
}

/// Total attacked data blocks out of an M-block secret: M * y / xi.
pub fn attacked_blocks(y: f64, m_blocks: u64, xi: usize) -> f64 {
    assert!(xi > 0, "xi must be positive");
    m_blocks as f64 * y / xi as f64
}

/// Attacked blocks per generation as a fraction of the generation size.
pub fn attacked_blocks_per_generation(y: f64, k: usize) -> f64 {
    assert!(k >= 1, "k must be at least 1");
    y / k as f64
}

/// Redundancy sizing against the expected exposure: a per-secret budget of
/// ceil(Lambda(y)) redundant blocks, alongside the per-generation
/// jam-protection threshold nu = r + 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RedundancyPlan {
    /// r: redundant blocks to generate for the whole secret.
    pub redundant_blocks: u64,
    /// nu = r + 1: disruptions per generation the attacker must reach.
    pub jam_threshold: u64,
}

pub fn recommend_redundancy(y: f64, m_blocks: u64, xi: usize) -> RedundancyPlan {
    let r = attacked_blocks(y, m_blocks, xi).ceil() as u64;
    RedundancyPlan { redundant_blocks: r, jam_threshold: r + 1 }
}

/// Scenario-level facade over the low-level sums.
#[derive(Debug, Clone)]
pub struct Analyzer<'a> {
    scenario: &'a Scenario,
    probs: Vec<f64>,
}

impl<'a> Analyzer<'a> {
    pub fn new(scenario: &'a Scenario) -> Result<Self, AnalysisError> {
        let probs = scenario.paths.availabilities();
        check_universe(&probs)?;
        Ok(Analyzer { scenario, probs })
    }

    pub fn universe(&self) -> usize {
        self.probs.len()
    }

    pub fn blocking(&self, xi: usize) -> Result<f64, AnalysisError> {
        blocking_probability(&self.probs, xi)
    }

    pub fn availability_pmf(&self) -> Result<Vec<f64>, AnalysisError> {
        availability_pmf(&self.probs)
    }

    fn flags(&self, wiretap_edges: &[EdgeId]) -> Vec<bool> {
        self.scenario.paths.wiretap_flags(wiretap_edges)
    }

    /// Expected utilized wiretap paths for the given policy and wiretap set.
    pub fn expected_wiretap_paths(
        &self,
        policy: SelectionPolicy,
        wiretap_edges: &[EdgeId],
        model: RndModel,
    ) -> Result<f64, AnalysisError> {
        let flags = self.flags(wiretap_edges);
        match (policy.kind, model) {
            (PolicyKind::Opt, _) => expected_wiretap_paths_opt(&self.probs, &flags, policy.xi),
            (PolicyKind::Rnd, RndModel::Formula) => {
                expected_wiretap_paths_rnd(&self.probs, &flags, policy.xi)
            }
            (PolicyKind::Rnd, RndModel::Operational) => {
                expected_wiretap_paths_rnd_operational(&self.probs, &flags, policy.xi)
            }
        }
    }

    /// Probability that at least `nu` of the xi utilized paths cross the
    /// given wiretap edges (one edge for the classic single-edge threat).
    pub fn catastrophic_threat(
        &self,
        policy: SelectionPolicy,
        nu: usize,
        wiretap_edges: &[EdgeId],
        model: RndModel,
    ) -> Result<f64, AnalysisError> {
        let flags = self.flags(wiretap_edges);
        match (policy.kind, model) {
            (PolicyKind::Opt, _) => catastrophic_threat_opt(&self.probs, &flags, nu, policy.xi),
            (PolicyKind::Rnd, RndModel::Formula) => {
                catastrophic_threat_rnd(&self.probs, &flags, nu, policy.xi)
            }
            (PolicyKind::Rnd, RndModel::Operational) => {
                catastrophic_threat_rnd_operational(&self.probs, &flags, nu, policy.xi)
            }
        }
    }

    /// Full analytical report for one cell. `nu` is the threat threshold
    /// for theta: k when the wiretap set eavesdrops, r + 1 when it jams.
    pub fn exposure_report(
        &self,
        policy: SelectionPolicy,
        k: usize,
        m_blocks: u64,
        nu: usize,
        wiretap_edges: &[EdgeId],
        model: RndModel,
    ) -> Result<ExposureReport, AnalysisError> {
        let y = self.expected_wiretap_paths(policy, wiretap_edges, model)?;
        let theta = self.catastrophic_threat(policy, nu, wiretap_edges, model)?;
        Ok(ExposureReport {
            expected_wiretap_paths: y,
            blocking: self.blocking(policy.xi)?,
            lambda: attacked_blocks(y, m_blocks, policy.xi),
            lambda_star: attacked_blocks_per_generation(y, k),
            theta,
        })
    }
}

/// Advance to the next lexicographic k-combination of 0..n.
fn advance(subset: &mut [usize], n: usize) -> bool {
    let k = subset.len();
    let mut i = k;
    while i > 0 {
        i -= 1;
        if subset[i] < n - (k - i) {
            subset[i] += 1;
            for j in i + 1..k {
                subset[j] = subset[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;

    const EPS: f64 = 1e-12;

    #[test]
    fn combo_probability_hand_values() {
        let probs = [0.8, 0.5];
        assert!((combo_probability(&probs, &[0]) - 0.40).abs() < EPS);
        assert!((combo_probability(&probs, &[0, 1]) - 0.40).abs() < EPS);
        assert!((combo_probability(&probs, &[]) - 0.10).abs() < EPS);
        let with_zero = [0.0, 0.5];
        assert_eq!(combo_probability(&with_zero, &[0, 1]), 0.0);
    }

    #[test]
    fn n_available_two_path_universe() {
        let probs = [0.8, 0.5];
        assert!((prob_n_available(&probs, 2).unwrap() - 0.40).abs() < EPS);
        assert!((prob_n_available(&probs, 1).unwrap() - 0.50).abs() < EPS);
        assert!((prob_n_available(&probs, 0).unwrap() - 0.10).abs() < EPS);
        assert_eq!(prob_n_available(&probs, 3).unwrap(), 0.0);
    }

    #[test]
    fn pmf_sums_to_one_and_matches_dp_oracle() {
        // Independent oracle: Poisson-binomial dynamic program.
        let probs = [0.8, 0.79, 0.78, 0.3, 0.45, 0.9, 0.05, 0.61];
        let mut dp = vec![1.0f64];
        for &p in &probs {
            let mut next = vec![0.0; dp.len() + 1];
            for (j, &v) in dp.iter().enumerate() {
                next[j] += v * (1.0 - p);
                next[j + 1] += v * p;
            }
            dp = next;
        }
        let pmf = availability_pmf(&probs).unwrap();
        for (a, b) in pmf.iter().zip(&dp) {
            assert!((a - b).abs() < 1e-12);
        }
        let total: f64 = pmf.iter().sum();
        assert!((total - 1.0).abs() < 1e-12);
    }

    #[test]
    fn pmf_degenerate_all_available() {
        let probs = [1.0; 5];
        let pmf = availability_pmf(&probs).unwrap();
        assert_eq!(pmf[5], 1.0);
        assert!(pmf[..5].iter().all(|&p| p == 0.0));
    }

    #[test]
    fn blocking_two_path_universe() {
        let probs = [0.8, 0.5];
        assert!((blocking_probability(&probs, 2).unwrap() - 0.60).abs() < EPS);
        assert_eq!(blocking_probability(&[1.0, 1.0], 1).unwrap(), 0.0);
        assert_eq!(
            blocking_probability(&probs, 3),
            Err(AnalysisError::BadTransmissionCount { xi: 3, universe: 2 })
        );
    }

    #[test]
    fn wiretap_counts() {
        let flags = [true, false, true, false];
        assert_eq!(wiretap_path_count(&[0, 1, 2, 3], &flags), 2);
        assert_eq!(wiretap_path_count(&[1, 3], &flags), 0);
        assert_eq!(wiretap_path_count(&[], &flags), 0);
    }

    // 3-path toy universe used across the closed-form tests:
    // p = {0.9, 0.8, 0.7}, delays ascending, wiretap on the shortest path.
    const TOY_P: [f64; 3] = [0.9, 0.8, 0.7];
    const TOY_W: [bool; 3] = [true, false, false];

    /// Brute-force oracle over all 2^3 availability outcomes for P-OPT.
    fn toy_opt_expect(xi: usize, score: impl Fn(usize) -> f64) -> f64 {
        let mut num = 0.0;
        let mut mass = 0.0;
        for m in 0u32..8 {
            let avail: Vec<usize> = (0..3).filter(|&i| m & (1 << i) != 0).collect();
            if avail.len() < xi {
                continue;
            }
            let mut p = 1.0;
            for i in 0..3 {
                p *= if m & (1 << i) != 0 { TOY_P[i] } else { 1.0 - TOY_P[i] };
            }
            mass += p;
            let y = avail[..xi].iter().filter(|&&i| TOY_W[i]).count();
            num += p * score(y);
        }
        num / mass
    }

    #[test]
    fn opt_expectation_matches_toy_enumeration() {
        let got = expected_wiretap_paths_opt(&TOY_P, &TOY_W, 2).unwrap();
        let want = toy_opt_expect(2, |y| y as f64);
        assert!((got - want).abs() < EPS, "{got} vs {want}");
    }

    #[test]
    fn opt_trivial_cases() {
        assert_eq!(expected_wiretap_paths_opt(&[1.0], &[true], 1).unwrap(), 1.0);
        assert_eq!(expected_wiretap_paths_opt(&TOY_P, &[false; 3], 2).unwrap(), 0.0);
        assert_eq!(
            expected_wiretap_paths_opt(&[0.0, 0.0], &[true, true], 1),
            Err(AnalysisError::AllBlocked)
        );
    }

    #[test]
    fn rnd_formula_matches_hand_sum() {
        // C(3,2) = 3 subsets: {0,1}, {0,2}, {1,2}
        let p01 = 0.9 * 0.8 * 0.3;
        let p02 = 0.9 * 0.2 * 0.7;
        let p12 = 0.1 * 0.8 * 0.7;
        let want = (p01 + p02) / (p01 + p02 + p12); // y = 1, 1, 0
        let got = expected_wiretap_paths_rnd(&TOY_P, &TOY_W, 2).unwrap();
        assert!((got - want).abs() < EPS);
    }

    #[test]
    fn rnd_trivial_cases() {
        // all paths wiretapped: every combination counts xi
        assert!(
            (expected_wiretap_paths_rnd(&TOY_P, &[true; 3], 2).unwrap() - 2.0).abs() < EPS
        );
        assert_eq!(expected_wiretap_paths_rnd(&TOY_P, &[false; 3], 2).unwrap(), 0.0);
        assert_eq!(
            expected_wiretap_paths_rnd(&[0.0, 0.0], &[true, true], 1),
            Err(AnalysisError::NoExactAvailabilityMass(1))
        );
        assert!(
            (expected_wiretap_paths_rnd_operational(&TOY_P, &[true; 3], 2).unwrap() - 2.0).abs()
                < EPS
        );
    }

    #[test]
    fn rnd_operational_matches_selection_enumeration() {
        // Oracle: enumerate availability outcomes and all xi-subsets.
        let xi = 2;
        let mut num = 0.0;
        let mut mass = 0.0;
        for m in 0u32..8 {
            let avail: Vec<usize> = (0..3).filter(|&i| m & (1 << i) != 0).collect();
            if avail.len() < xi {
                continue;
            }
            let mut p = 1.0;
            for i in 0..3 {
                p *= if m & (1 << i) != 0 { TOY_P[i] } else { 1.0 - TOY_P[i] };
            }
            mass += p;
            let mut acc = 0.0;
            let mut count = 0.0;
            for a in 0..avail.len() {
                for b in a + 1..avail.len() {
                    acc += [avail[a], avail[b]].iter().filter(|&&i| TOY_W[i]).count() as f64;
                    count += 1.0;
                }
            }
            num += p * acc / count;
        }
        let want = num / mass;
        let got = expected_wiretap_paths_rnd_operational(&TOY_P, &TOY_W, 2).unwrap();
        assert!((got - want).abs() < EPS);
    }

    #[test]
    fn threat_trivial_cases() {
        assert_eq!(catastrophic_threat_opt(&[1.0], &[true], 1, 1).unwrap(), 1.0);
        assert_eq!(catastrophic_threat_opt(&TOY_P, &[false; 3], 1, 2).unwrap(), 0.0);
        // nu > xi is a certain miss, not an error
        assert_eq!(catastrophic_threat_opt(&TOY_P, &TOY_W, 3, 2).unwrap(), 0.0);
        assert_eq!(catastrophic_threat_rnd(&TOY_P, &TOY_W, 3, 2).unwrap(), 0.0);
        assert_eq!(
            catastrophic_threat_rnd_operational(&TOY_P, &TOY_W, 3, 2).unwrap(),
            0.0
        );
        assert_eq!(
            catastrophic_threat_opt(&TOY_P, &TOY_W, 0, 2),
            Err(AnalysisError::ZeroThreshold)
        );
    }

    #[test]
    fn threat_matches_toy_enumeration() {
        // wiretap edge shared by the two shortest paths
        let flags = [true, true, false];
        let got = catastrophic_threat_opt(&TOY_P, &flags, 2, 2).unwrap();
        let mut num = 0.0;
        let mut mass = 0.0;
        for m in 0u32..8 {
            let avail: Vec<usize> = (0..3).filter(|&i| m & (1 << i) != 0).collect();
            if avail.len() < 2 {
                continue;
            }
            let mut p = 1.0;
            for i in 0..3 {
                p *= if m & (1 << i) != 0 { TOY_P[i] } else { 1.0 - TOY_P[i] };
            }
            mass += p;
            if avail[..2].iter().filter(|&&i| flags[i]).count() >= 2 {
                num += p;
            }
        }
        assert!((got - num / mass).abs() < EPS);
    }

    #[test]
    fn theta_monotone_in_nu() {
        let mut prev = 1.0;
        for nu in 1..=3 {
            let t = catastrophic_threat_rnd_operational(&TOY_P, &TOY_W, nu, 3).unwrap();
            assert!(t <= prev + EPS);
            prev = t;
        }
    }

    #[test]
    fn all_available_collapses_opt_to_shortest() {
        let probs = [1.0; 4];
        let flags = [true, true, false, true];
        // xi = 2 shortest paths are both wiretapped
        assert_eq!(expected_wiretap_paths_opt(&probs, &flags, 2).unwrap(), 2.0);
        assert_eq!(expected_wiretap_paths_opt(&probs, &flags, 3).unwrap(), 2.0);
    }

    #[test]
    fn attacked_block_algebra() {
        assert_eq!(attacked_blocks(2.0, 20, 4), 10.0);
        assert_eq!(attacked_blocks(0.0, 20, 4), 0.0);
        assert_eq!(attacked_blocks(4.0, 20, 4), 20.0);
        assert_eq!(attacked_blocks_per_generation(4.0, 4), 1.0);
        assert_eq!(attacked_blocks_per_generation(2.0, 8), 0.25);
    }

    #[test]
    fn redundancy_recommendation() {
        assert_eq!(
            recommend_redundancy(0.0, 20, 5),
            RedundancyPlan { redundant_blocks: 0, jam_threshold: 1 }
        );
        assert_eq!(recommend_redundancy(1.0, 20, 5).redundant_blocks, 4);
        assert_eq!(recommend_redundancy(2.0, 20, 4).redundant_blocks, 10);
    }

    #[test]
    fn hypergeometric_sanity() {
        assert!((hypergeometric_tail(4, 2, 2, 1) - 5.0 / 6.0).abs() < EPS);
        assert_eq!(hypergeometric_tail(4, 0, 2, 1), 0.0);
        assert_eq!(hypergeometric_tail(4, 4, 2, 2), 1.0);
    }

    #[test]
    fn universe_limit_enforced() {
        let probs = vec![0.5; MAX_UNIVERSE + 1];
        assert_eq!(
            availability_pmf(&probs),
            Err(AnalysisError::UniverseTooLarge(MAX_UNIVERSE + 1))
        );
    }

    #[test]
    fn wiretap_monotone_in_edge_set() {
        // enlarging the wiretapped set never decreases the expectation
        let small = [true, false, false];
        let large = [true, false, true];
        for xi in 1..=2 {
            let a = expected_wiretap_paths_opt(&TOY_P, &small, xi).unwrap();
            let b = expected_wiretap_paths_opt(&TOY_P, &large, xi).unwrap();
            assert!(b >= a - EPS);
            let a = expected_wiretap_paths_rnd(&TOY_P, &small, xi).unwrap();
            let b = expected_wiretap_paths_rnd(&TOY_P, &large, xi).unwrap();
            assert!(b >= a - EPS);
        }
    }
}
