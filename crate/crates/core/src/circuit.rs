//! A runnable optical circuit: photon sources, an ordered element list,
//! detectors and an acceptance rule.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::elements::{apply_elements, Element};
use crate::error::{Error, Result};
use crate::fock::{ModeRegistry, Polarization, Rail, StateVector, DEFAULT_PHOTON_CAP, DEFAULT_TOLERANCE};
use crate::measurement::{
    apply_detector_efficiency, validate_detectors, DetectorSpec, EfficiencyModel, Expectation,
    OutcomeDistribution,
};

/// How a run is accepted.
#[derive(Debug, Clone, PartialEq)]
pub enum AcceptanceRule {
    /// Only the detectors' `Exactly` expectations must hold.
    Heralds,
    /// Detector expectations must hold, and additionally each of the two
    /// rails must show exactly one photon across its polarization pair.
    Coincidence { rail_a: String, rail_b: String },
}

/// A complete simulation target.
#[derive(Debug, Clone)]
pub struct Circuit {
    pub registry: Arc<ModeRegistry>,
    /// One photon injected per listed mode index (repeats allowed).
    pub injections: Vec<usize>,
    /// Polarization-entangled pair sources: (|HH> + |VV>)/sqrt(2) across two rails.
    pub pair_sources: Vec<(String, String)>,
    pub elements: Vec<Element>,
    pub detectors: Vec<DetectorSpec>,
    pub acceptance: AcceptanceRule,
    pub photon_cap: u32,
    pub tolerance: f64,
}

impl Circuit {
    pub fn new(registry: Arc<ModeRegistry>) -> Self {
        Circuit {
            registry,
            injections: Vec::new(),
            pair_sources: Vec::new(),
            elements: Vec::new(),
            detectors: Vec::new(),
            acceptance: AcceptanceRule::Heralds,
            photon_cap: DEFAULT_PHOTON_CAP,
            tolerance: DEFAULT_TOLERANCE,
        }
    }

    pub fn total_photons(&self) -> u32 {
        self.injections.len() as u32 + 2 * self.pair_sources.len() as u32
    }

    /// Builds the input state from injections and pair sources.
    pub fn initial_state(&self) -> Result<StateVector> {
        let n = self.registry.len();
        let mut occ = vec![0u8; n];
        for &m in &self.injections {
            if m >= n {
                return Err(Error::UnknownRail(format!("mode index {m}")));
            }
            occ[m] += 1;
        }
        let base = StateVector::basis(Arc::clone(&self.registry), occ)?
            .with_photon_cap(self.photon_cap)?
            .with_tolerance(self.tolerance);
        let mut state = base;
        let amp = Complex64::new(core::f64::consts::FRAC_1_SQRT_2, 0.0);
        for (a, b) in &self.pair_sources {
            let ra = self.registry.rail(a)?;
            let rb = self.registry.rail(b)?;
            // (|HH> + |VV>)/sqrt(2) on top of whatever is already there.
            let mut terms = Vec::new();
            for (fock, &c) in state.terms() {
                let mut hh = fock.occupations().to_vec();
                hh[ra.h] += 1;
                hh[rb.h] += 1;
                terms.push((hh, c * amp));
                let mut vv = fock.occupations().to_vec();
                vv[ra.v] += 1;
                vv[rb.v] += 1;
                terms.push((vv, c * amp));
            }
            state = StateVector::superposition(Arc::clone(&self.registry), &terms)?
                .with_photon_cap(self.photon_cap)?
                .with_tolerance(self.tolerance);
        }
        Ok(state)
    }

    /// Applies every element to the input state.
    pub fn final_state(&self) -> Result<StateVector> {
        apply_elements(&self.initial_state()?, &self.elements)
    }

    /// Same circuit with every ordinary beamsplitter's amplitude
    /// reflectivity shifted by `delta` (imperfection sweeps).
    pub fn with_reflectivity_offset(&self, delta: f64) -> Result<Circuit> {
        let mut out = self.clone();
        out.elements = self
            .elements
            .iter()
            .map(|e| e.with_reflectivity_offset(delta))
            .collect::<Result<Vec<_>>>()?;
        Ok(out)
    }

    fn coincidence_rails(&self) -> Result<Option<(Rail, Rail)>> {
        match &self.acceptance {
            AcceptanceRule::Heralds => Ok(None),
            AcceptanceRule::Coincidence { rail_a, rail_b } => {
                Ok(Some((self.registry.rail(rail_a)?, self.registry.rail(rail_b)?)))
            }
        }
    }

    /// Runs the circuit under an efficiency model and classifies detector
    /// count patterns into accepted and rejected ones.
    pub fn run(&self, model: &EfficiencyModel) -> Result<CircuitOutcome> {
        validate_detectors(&self.detectors, self.registry.len())?;
        let mut state = self.final_state()?;
        if model.eta_d < 1.0 {
            for d in &self.detectors {
                state = apply_detector_efficiency(&state, d, model.eta_d)?;
            }
        }
        let rails = self.coincidence_rails()?;

        // Born rule over occupation bases; unmeasured and environment modes
        // are marginalized by simply not entering the label.
        let mut weights: BTreeMap<Vec<u8>, f64> = BTreeMap::new();
        for (fock, amp) in state.terms() {
            let mut label: Vec<u8> = Vec::with_capacity(self.detectors.len());
            for d in &self.detectors {
                let mut c = fock.count_in(&d.modes) as u8;
                if model.bucket {
                    c = c.min(1);
                }
                label.push(c);
            }
            *weights.entry(label).or_insert(0.0) += amp.norm_sqr();
        }

        let mut accepted: BTreeMap<Vec<u8>, f64> = BTreeMap::new();
        let mut acceptance_probability = 0.0;
        for (label, &w) in &weights {
            if self.label_accepted(label, rails) {
                acceptance_probability += w;
                *accepted.entry(label.clone()).or_insert(0.0) += w;
            }
        }
        Ok(CircuitOutcome {
            detector_names: self.detectors.iter().map(|d| d.name.clone()).collect(),
            all: OutcomeDistribution::from_weights(weights),
            accepted: OutcomeDistribution::from_weights(accepted),
            acceptance_probability,
        })
    }

    fn label_accepted(&self, label: &[u8], rails: Option<(Rail, Rail)>) -> bool {
        for (d, &c) in self.detectors.iter().zip(label.iter()) {
            if let Expectation::Exactly(k) = d.expectation {
                if c != k {
                    return false;
                }
            }
        }
        if let Some((ra, rb)) = rails {
            let count_on = |rail: Rail| -> u32 {
                let mut total = 0;
                for (d, &c) in self.detectors.iter().zip(label.iter()) {
                    if d.modes.iter().any(|&m| m == rail.h || m == rail.v) {
                        total += c as u32;
                    }
                }
                total
            };
            if count_on(ra) != 1 || count_on(rb) != 1 {
                return false;
            }
        }
        true
    }

    /// Finds the detector reading a single given mode, if any.
    pub fn detector_on_mode(&self, mode: usize) -> Option<usize> {
        self.detectors.iter().position(|d| d.modes == [mode])
    }

    /// Derives the two-bit logical outcome from a detector count label, for
    /// circuits whose rails a and b carry one polarization-encoded qubit
    /// each (H = 0, V = 1). Requires per-mode detectors on all four rail
    /// modes. Returns `None` for labels outside the qubit subspace.
    pub fn logical_outcome(&self, label: &[u8], rail_a: Rail, rail_b: Rail) -> Option<String> {
        let mut bits = String::new();
        for rail in [rail_a, rail_b] {
            let dh = self.detector_on_mode(rail.mode(Polarization::H))?;
            let dv = self.detector_on_mode(rail.mode(Polarization::V))?;
            match (label[dh], label[dv]) {
                (1, 0) => bits.push('0'),
                (0, 1) => bits.push('1'),
                _ => return None,
            }
        }
        Some(bits)
    }
}

/// Result of one circuit run.
pub struct CircuitOutcome {
    pub detector_names: Vec<String>,
    /// Distribution over all detector count tuples.
    pub all: OutcomeDistribution<Vec<u8>>,
    /// Conditional distribution over accepted tuples.
    pub accepted: OutcomeDistribution<Vec<u8>>,
    pub acceptance_probability: f64,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::elements::{Element, PolSelect, ThickSide};
    use approx::assert_abs_diff_eq;

    #[test]
    fn pair_source_is_normalized_and_entangled() {
        let mut reg = ModeRegistry::new();
        let a = reg.add_rail("a").unwrap();
        let b = reg.add_rail("b").unwrap();
        let mut circuit = Circuit::new(Arc::new(reg));
        circuit.pair_sources.push(("a".into(), "b".into()));
        let s = circuit.initial_state().unwrap();
        assert_abs_diff_eq!(s.norm(), 1.0, epsilon = 1e-12);
        assert_eq!(s.term_count(), 2);
        let hh = crate::fock::FockState::new(vec![1, 0, 1, 0]);
        let vv = crate::fock::FockState::new(vec![0, 1, 0, 1]);
        assert_abs_diff_eq!(s.amplitude(&hh).norm_sqr(), 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(s.amplitude(&vv).norm_sqr(), 0.5, epsilon = 1e-12);
        let _ = (a, b);
    }

    #[test]
    fn hong_ou_mandel_circuit_run() {
        let mut reg = ModeRegistry::new();
        let a = reg.add_rail("a").unwrap();
        let b = reg.add_rail("b").unwrap();
        let reg = Arc::new(reg);
        let mut circuit = Circuit::new(Arc::clone(&reg));
        circuit.injections = vec![a.h, b.h];
        circuit.elements = vec![Element::beamsplitter(
            a,
            b,
            PolSelect::H,
            core::f64::consts::FRAC_1_SQRT_2,
            ThickSide::B,
        )
        .unwrap()];
        circuit.detectors = vec![
            DetectorSpec::new("da", vec![a.h], Expectation::Any),
            DetectorSpec::new("db", vec![b.h], Expectation::Any),
        ];
        let out = circuit.run(&EfficiencyModel::default()).unwrap();
        assert_abs_diff_eq!(out.all.probability(&vec![1, 1]), 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(out.all.probability(&vec![2, 0]), 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(out.all.probability(&vec![0, 2]), 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(out.acceptance_probability, 1.0, epsilon = 1e-12);
    }
}
