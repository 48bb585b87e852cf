//! Photon counting, heralding, post-selection and detector inefficiency.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::fock::{FockState, Rail, StateVector};
use crate::matrix::CMatrix;

/// What a detector is required to read for a run to be kept.
#[derive(Debug, Copy, Clone, PartialEq, Eq)]
pub enum Expectation {
    /// Exactly this many photons.
    Exactly(u8),
    /// No constraint; the detector only labels outcomes.
    Any,
}

/// One photon counter reading a set of registry modes.
#[derive(Debug, Clone, PartialEq)]
pub struct DetectorSpec {
    pub name: String,
    pub modes: Vec<usize>,
    pub expectation: Expectation,
}

impl DetectorSpec {
    pub fn new(name: &str, modes: Vec<usize>, expectation: Expectation) -> Self {
        DetectorSpec { name: name.to_string(), modes, expectation }
    }
}

/// Checks that detectors are non-empty and mode-disjoint.
pub fn validate_detectors(detectors: &[DetectorSpec], n_modes: usize) -> Result<()> {
    let mut seen: Vec<bool> = vec![false; n_modes];
    for d in detectors {
        if d.modes.is_empty() {
            return Err(Error::InvalidArgument(format!("detector {} reads no modes", d.name)));
        }
        for &m in &d.modes {
            if m >= n_modes {
                return Err(Error::UnknownRail(format!("mode index {m}")));
            }
            if seen[m] {
                return Err(Error::InvalidArgument(format!(
                    "mode {m} constrained by more than one detector"
                )));
            }
            seen[m] = true;
        }
    }
    Ok(())
}

/// A set of simultaneous count constraints used for heralding.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct HeraldPattern {
    /// (modes read together, required total count)
    pub constraints: Vec<(Vec<usize>, u8)>,
}

impl HeraldPattern {
    pub fn new(constraints: Vec<(Vec<usize>, u8)>) -> Result<Self> {
        let mut seen: BTreeMap<usize, ()> = BTreeMap::new();
        for (modes, _) in &constraints {
            for &m in modes {
                if seen.insert(m, ()).is_some() {
                    return Err(Error::InvalidArgument(format!(
                        "mode {m} constrained twice in herald pattern"
                    )));
                }
            }
        }
        Ok(HeraldPattern { constraints })
    }

    pub fn is_empty(&self) -> bool {
        self.constraints.is_empty()
    }

    pub fn matches(&self, state: &FockState) -> bool {
        self.constraints.iter().all(|(modes, count)| state.count_in(modes) == *count as u32)
    }
}

/// A distribution over measurement outcomes.
///
/// `total_probability` is the weight the distribution was conditioned on;
/// the stored probabilities themselves sum to 1 after renormalization.
#[derive(Debug, Clone, PartialEq)]
pub struct OutcomeDistribution<L: Ord> {
    probs: BTreeMap<L, f64>,
    total_probability: f64,
}

impl<L: Ord + Clone> OutcomeDistribution<L> {
    pub fn from_weights(weights: BTreeMap<L, f64>) -> Self {
        let total: f64 = weights.values().sum();
        let mut probs = weights;
        if total > 0.0 {
            for p in probs.values_mut() {
                *p /= total;
            }
        }
        OutcomeDistribution { probs, total_probability: total }
    }

    /// A distribution with explicitly enumerated outcomes, some possibly of
    /// probability zero.
    pub fn from_probs(probs: BTreeMap<L, f64>, total_probability: f64) -> Self {
        OutcomeDistribution { probs, total_probability }
    }

    pub fn total_probability(&self) -> f64 {
        self.total_probability
    }

    pub fn probability(&self, label: &L) -> f64 {
        self.probs.get(label).copied().unwrap_or(0.0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&L, f64)> {
        self.probs.iter().map(|(l, &p)| (l, p))
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn labels(&self) -> impl Iterator<Item = &L> {
        self.probs.keys()
    }

    pub fn same_outcome_set(&self, other: &Self) -> bool {
        self.probs.len() == other.probs.len()
            && self.probs.keys().zip(other.probs.keys()).all(|(a, b)| a == b)
    }

    /// Largest absolute probability difference summed over outcomes, halved.
    pub fn total_variation(&self, other: &Self) -> f64 {
        let mut acc = 0.0;
        for (l, p) in self.iter() {
            acc += (p - other.probability(l)).abs();
        }
        for (l, q) in other.iter() {
            if self.probs.get(l).is_none() {
                acc += q;
            }
        }
        acc / 2.0
    }
}

/// Measured photon counts per detector, together with the conditional state
/// left behind for each outcome.
pub struct MeasurementResult {
    pub distribution: OutcomeDistribution<Vec<u8>>,
    pub conditionals: BTreeMap<Vec<u8>, StateVector>,
}

/// Counts photons on every detector at once.
///
/// The outcome label is the tuple of per-detector totals. Conditional states
/// are normalized projections of the input onto each outcome.
pub fn measure_counts(state: &StateVector, detectors: &[DetectorSpec]) -> Result<MeasurementResult> {
    validate_detectors(detectors, state.registry().len())?;
    let mut weights: BTreeMap<Vec<u8>, f64> = BTreeMap::new();
    for (fock, amp) in state.terms() {
        let label: Vec<u8> =
            detectors.iter().map(|d| fock.count_in(&d.modes) as u8).collect();
        *weights.entry(label).or_insert(0.0) += amp.norm_sqr();
    }
    let mut conditionals = BTreeMap::new();
    for label in weights.keys() {
        let projected = state.project(|fock| {
            detectors
                .iter()
                .zip(label.iter())
                .all(|(d, &c)| fock.count_in(&d.modes) == c as u32)
        });
        if let Ok((_, unit)) = projected.normalize() {
            conditionals.insert(label.clone(), unit);
        }
    }
    Ok(MeasurementResult { distribution: OutcomeDistribution::from_weights(weights), conditionals })
}

/// Projects onto a herald pattern.
///
/// Returns the success probability and the normalized conditional state; a
/// zero-probability pattern yields probability 0 and an empty state rather
/// than an error.
pub fn postselect(state: &StateVector, pattern: &HeraldPattern) -> Result<(f64, StateVector)> {
    for (modes, _) in &pattern.constraints {
        for &m in modes {
            if m >= state.registry().len() {
                return Err(Error::UnknownRail(format!("mode index {m}")));
            }
        }
    }
    let projected = state.project(|fock| pattern.matches(fock));
    let p = projected.norm_sqr();
    match projected.normalize() {
        Ok((_, unit)) => Ok((p, unit)),
        Err(_) => Ok((0.0, projected)),
    }
}

/// Coincidence-basis acceptance: exactly one photon in each rail's
/// polarization pair.
pub fn coincidence_accept(counts: &FockState, rail_a: Rail, rail_b: Rail) -> bool {
    counts.count_in(&[rail_a.h, rail_a.v]) == 1 && counts.count_in(&[rail_b.h, rail_b.v]) == 1
}

/// Projects onto the coincidence subspace of the listed rails (one photon
/// per rail). Returns acceptance probability and the unnormalized
/// conditional.
pub fn project_coincidence(state: &StateVector, rails: &[Rail]) -> (f64, StateVector) {
    let projected =
        state.project(|fock| rails.iter().all(|r| fock.count_in(&[r.h, r.v]) == 1));
    let p = projected.norm_sqr();
    (p, projected)
}

/// Detection-efficiency model. `eta_d = 1` reproduces the ideal pipeline
/// bit-exactly. `bucket` merges counts >= 1, modelling non-number-resolving
/// detectors.
#[derive(Debug, Copy, Clone, PartialEq)]
pub struct EfficiencyModel {
    pub eta_d: f64,
    pub bucket: bool,
}

impl Default for EfficiencyModel {
    fn default() -> Self {
        EfficiencyModel { eta_d: 1.0, bucket: false }
    }
}

impl EfficiencyModel {
    pub fn ideal(&self) -> bool {
        self.eta_d >= 1.0 && !self.bucket
    }
}

/// Couples each mode of a detector to a fresh environment mode through a
/// beamsplitter of amplitude `sqrt(eta_d)`; tracing the environment then
/// reproduces binomial thinning of the detected counts.
///
/// Returns the enlarged state. Existing mode indices are unchanged;
/// environment modes are appended at the end of the registry.
pub fn apply_detector_efficiency(
    state: &StateVector,
    detector: &DetectorSpec,
    eta_d: f64,
) -> Result<StateVector> {
    if !(0.0..=1.0).contains(&eta_d) {
        return Err(Error::InvalidArgument(format!("eta_d {eta_d} outside [0, 1]")));
    }
    if eta_d == 1.0 {
        return Ok(state.clone());
    }
    let mut registry = (**state.registry()).clone();
    let mut env = Vec::new();
    for &m in &detector.modes {
        env.push(registry.add_aux_mode(&format!("loss:{}:{}", detector.name, m))?);
    }
    let mut s = state.extend_registry(Arc::new(registry))?;
    let r = eta_d.sqrt();
    let t = (1.0 - eta_d).sqrt();
    let loss = CMatrix::from_real_2x2(r, t, t, -r);
    for (&m, &e) in detector.modes.iter().zip(env.iter()) {
        s = s.apply_mode_unitary(&loss, &[m, e])?;
    }
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::ModeRegistry;
    use approx::assert_abs_diff_eq;
    use num_complex::Complex64;

    fn two_mode_reg() -> (Arc<ModeRegistry>, Rail) {
        let mut reg = ModeRegistry::new();
        let a = reg.add_rail("a").unwrap();
        (Arc::new(reg), a)
    }

    #[test]
    fn basis_state_measures_deterministically() {
        let (reg, a) = two_mode_reg();
        let s = StateVector::basis(reg, vec![1, 0]).unwrap();
        let detectors = vec![
            DetectorSpec::new("dh", vec![a.h], Expectation::Any),
            DetectorSpec::new("dv", vec![a.v], Expectation::Any),
        ];
        let result = measure_counts(&s, &detectors).unwrap();
        assert_abs_diff_eq!(result.distribution.probability(&vec![1, 0]), 1.0, epsilon = 1e-12);
        assert_eq!(result.distribution.len(), 1);
    }

    #[test]
    fn superposition_counts_split_evenly() {
        let (reg, a) = two_mode_reg();
        let amp = Complex64::new(core::f64::consts::FRAC_1_SQRT_2, 0.0);
        let s = StateVector::superposition(
            reg,
            &[(vec![1, 0], amp), (vec![0, 1], amp)],
        )
        .unwrap();
        let detectors = vec![DetectorSpec::new("dh", vec![a.h], Expectation::Any)];
        let result = measure_counts(&s, &detectors).unwrap();
        assert_abs_diff_eq!(result.distribution.probability(&vec![1]), 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(result.distribution.probability(&vec![0]), 0.5, epsilon = 1e-12);
        let sum: f64 = result.distribution.iter().map(|(_, p)| p).sum();
        assert_abs_diff_eq!(sum, 1.0, epsilon = 1e-10);
    }

    #[test]
    fn herald_on_unoccupied_ancilla_is_certain() {
        let (reg, a) = two_mode_reg();
        let s = StateVector::basis(reg, vec![1, 0]).unwrap();
        let pattern = HeraldPattern::new(vec![(vec![a.v], 0)]).unwrap();
        let (p, cond) = postselect(&s, &pattern).unwrap();
        assert_abs_diff_eq!(p, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(
            (cond.amplitude(&FockState::new(vec![1, 0])) - Complex64::ONE).norm(),
            0.0,
            epsilon = 1e-12
        );
    }

    #[test]
    fn zero_probability_postselection_is_a_value() {
        let (reg, a) = two_mode_reg();
        let s = StateVector::basis(reg, vec![1, 0]).unwrap();
        let pattern = HeraldPattern::new(vec![(vec![a.h], 2)]).unwrap();
        let (p, cond) = postselect(&s, &pattern).unwrap();
        assert_eq!(p, 0.0);
        assert!(cond.is_zero());
    }

    #[test]
    fn herald_pattern_rejects_double_constraint() {
        assert!(HeraldPattern::new(vec![(vec![0], 1), (vec![0, 1], 0)]).is_err());
    }

    #[test]
    fn coincidence_rule() {
        let a = Rail { h: 0, v: 1 };
        let b = Rail { h: 2, v: 3 };
        assert!(coincidence_accept(&FockState::new(vec![1, 0, 0, 1]), a, b));
        assert!(!coincidence_accept(&FockState::new(vec![2, 0, 0, 0]), a, b));
        assert!(!coincidence_accept(&FockState::new(vec![1, 1, 1, 0]), a, b));
    }

    #[test]
    fn exhaustive_patterns_partition_probability() {
        let (reg, a) = two_mode_reg();
        let amp = Complex64::new(0.6, 0.0);
        let amp2 = Complex64::new(0.0, 0.8);
        let s = StateVector::superposition(reg, &[(vec![1, 0], amp), (vec![0, 2], amp2)])
            .unwrap();
        let mut total = 0.0;
        for k in 0..=6u8 {
            let pattern = HeraldPattern::new(vec![(vec![a.h, a.v], k)]).unwrap();
            total += postselect(&s, &pattern).unwrap().0;
        }
        assert_abs_diff_eq!(total, 1.0, epsilon = 1e-10);
    }

    #[test]
    fn conditioning_then_measuring_matches_joint_chain_rule() {
        let mut reg = ModeRegistry::new();
        let a = reg.add_rail("a").unwrap();
        let b = reg.add_rail("b").unwrap();
        let reg = Arc::new(reg);
        let n = Complex64::new(0.5, 0.0);
        let s = StateVector::superposition(
            Arc::clone(&reg),
            &[
                (vec![1, 0, 1, 0], n),
                (vec![1, 0, 0, 1], n),
                (vec![0, 1, 1, 0], n),
                (vec![0, 1, 0, 1], n),
            ],
        )
        .unwrap();
        // Condition on one photon in a.h, then measure b; compare against the
        // joint distribution marginalized to the same event.
        let pattern = HeraldPattern::new(vec![(vec![a.h], 1)]).unwrap();
        let (p_cond, cond) = postselect(&s, &pattern).unwrap();
        let det_b = vec![
            DetectorSpec::new("bh", vec![b.h], Expectation::Any),
            DetectorSpec::new("bv", vec![b.v], Expectation::Any),
        ];
        let after = measure_counts(&cond, &det_b).unwrap();

        let det_all = vec![
            DetectorSpec::new("ah", vec![a.h], Expectation::Any),
            DetectorSpec::new("bh", vec![b.h], Expectation::Any),
            DetectorSpec::new("bv", vec![b.v], Expectation::Any),
        ];
        let joint = measure_counts(&s, &det_all).unwrap();
        for (label, p) in after.distribution.iter() {
            let mut joint_label = vec![1u8];
            joint_label.extend_from_slice(label);
            let joint_p = joint.distribution.probability(&joint_label);
            assert_abs_diff_eq!(p * p_cond, joint_p, epsilon = 1e-10);
        }
    }

    #[test]
    fn unit_efficiency_is_identity() {
        let (reg, a) = two_mode_reg();
        let s = StateVector::basis(reg, vec![1, 0]).unwrap();
        let d = DetectorSpec::new("d", vec![a.h], Expectation::Any);
        let out = apply_detector_efficiency(&s, &d, 1.0).unwrap();
        assert_eq!(out.registry().len(), s.registry().len());
        assert_eq!(out.amplitude(&FockState::new(vec![1, 0])), Complex64::ONE);
    }

    #[test]
    fn zero_efficiency_never_clicks() {
        let (reg, a) = two_mode_reg();
        let s = StateVector::basis(reg, vec![1, 0]).unwrap();
        let d = DetectorSpec::new("d", vec![a.h], Expectation::Any);
        let out = apply_detector_efficiency(&s, &d, 0.0).unwrap();
        let result = measure_counts(&out, &[d]).unwrap();
        assert_abs_diff_eq!(result.distribution.probability(&vec![0]), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn single_photon_click_probability_is_eta() {
        let (reg, a) = two_mode_reg();
        let s = StateVector::basis(reg, vec![1, 0]).unwrap();
        let d = DetectorSpec::new("d", vec![a.h], Expectation::Any);
        let out = apply_detector_efficiency(&s, &d, 0.8).unwrap();
        let result = measure_counts(&out, &[d]).unwrap();
        assert_abs_diff_eq!(result.distribution.probability(&vec![1]), 0.8, epsilon = 1e-12);
        assert_abs_diff_eq!(result.distribution.probability(&vec![0]), 0.2, epsilon = 1e-12);
    }

    #[test]
    fn two_photon_thinning_is_binomial() {
        let (reg, a) = two_mode_reg();
        let s = StateVector::basis(reg, vec![2, 0]).unwrap();
        let d = DetectorSpec::new("d", vec![a.h], Expectation::Any);
        let eta = 0.7;
        let out = apply_detector_efficiency(&s, &d, eta).unwrap();
        let result = measure_counts(&out, &[d]).unwrap();
        assert_abs_diff_eq!(result.distribution.probability(&vec![2]), eta * eta, epsilon = 1e-12);
        assert_abs_diff_eq!(
            result.distribution.probability(&vec![1]),
            2.0 * eta * (1.0 - eta),
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(
            result.distribution.probability(&vec![0]),
            (1.0 - eta) * (1.0 - eta),
            epsilon = 1e-12
        );
    }

    #[test]
    fn detectors_must_be_disjoint() {
        let detectors = vec![
            DetectorSpec::new("d1", vec![0], Expectation::Any),
            DetectorSpec::new("d2", vec![0, 1], Expectation::Any),
        ];
        assert!(validate_detectors(&detectors, 2).is_err());
    }
}
