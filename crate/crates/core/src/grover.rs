//! The four-element optical search circuits, end to end.
//!
//! Three optical variants are built from the gate constructions: the full
//! circuit (heralded CSIGN oracle followed by a coincidence-basis CNOT), a
//! simplified variant whose oracle CSIGN is replaced by a polarization
//! entangled pair source plus a Hadamard waveplate, and a variant with both
//! two-qubit gates heralded. A dense abstract-qubit variant runs on the
//! reference simulator. Every optical variant is cross-checked against the
//! reference distribution.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use crate::circuit::{AcceptanceRule, Circuit};
use crate::elements::Element;
use crate::error::{Error, Result};
use crate::fock::{ModeRegistry, Rail};
use crate::gates::{
    coincidence_csign_orientation, coincidence_csign_parts, scalable_csign_orientation,
    scalable_csign_parts, GateParts,
};
use crate::measurement::{DetectorSpec, EfficiencyModel, Expectation, OutcomeDistribution};
use crate::qubit::{abstract_grover_circuit, grover_reference, MarkedItem};

/// Which realization of the four-element search to run.
#[derive(Debug, Copy, Clone, PartialEq, Eq)]
pub enum GroverVariant {
    /// Heralded CSIGN oracle + coincidence CNOT.
    Full,
    /// Entangled-pair source replaces the oracle CSIGN.
    Bell,
    /// Both two-qubit gates heralded.
    TwoScalable,
    /// Dense abstract-qubit reference.
    Abstract,
}

impl GroverVariant {
    pub fn name(&self) -> &'static str {
        match self {
            GroverVariant::Full => "full",
            GroverVariant::Bell => "bell",
            GroverVariant::TwoScalable => "two-scalable",
            GroverVariant::Abstract => "abstract",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "full" => Ok(GroverVariant::Full),
            "bell" => Ok(GroverVariant::Bell),
            "two-scalable" => Ok(GroverVariant::TwoScalable),
            "abstract" => Ok(GroverVariant::Abstract),
            other => Err(Error::InvalidArgument(format!("unknown variant {other:?}"))),
        }
    }
}

/// Fixed per-variant resource budget (photons and detectors are exact;
/// waveplate counts depend on the oracle and are compared as soft ranges).
#[derive(Debug, Copy, Clone)]
pub struct VariantCatalog {
    pub photons: u32,
    pub detectors: u32,
    pub waveplate_range: (u32, u32),
    pub beamsplitters: u32,
    pub polarizing_beamsplitters: u32,
}

pub fn catalog(variant: GroverVariant) -> Option<VariantCatalog> {
    match variant {
        GroverVariant::Full => Some(VariantCatalog {
            photons: 4,
            detectors: 7,
            waveplate_range: (10, 12),
            beamsplitters: 5,
            polarizing_beamsplitters: 9,
        }),
        GroverVariant::Bell => Some(VariantCatalog {
            photons: 2,
            detectors: 4,
            waveplate_range: (6, 8),
            beamsplitters: 3,
            polarizing_beamsplitters: 6,
        }),
        GroverVariant::TwoScalable => Some(VariantCatalog {
            photons: 6,
            detectors: 10,
            waveplate_range: (14, 16),
            beamsplitters: 4,
            polarizing_beamsplitters: 8,
        }),
        GroverVariant::Abstract => None,
    }
}

/// Element and photon counts of a built circuit.
#[derive(Debug, Copy, Clone, Default, PartialEq, Eq)]
pub struct ComponentTally {
    pub photons: u32,
    pub detectors: u32,
    pub waveplates: u32,
    pub phase_delays: u32,
    pub beamsplitters: u32,
    pub polarizing_beamsplitters: u32,
}

pub fn tally(circuit: &Circuit) -> ComponentTally {
    let mut t = ComponentTally {
        photons: circuit.total_photons(),
        detectors: circuit.detectors.len() as u32,
        ..Default::default()
    };
    for e in &circuit.elements {
        match e {
            Element::Waveplate { .. } => t.waveplates += 1,
            Element::PhaseDelay { .. } => t.phase_delays += 1,
            Element::Beamsplitter { .. } => t.beamsplitters += 1,
            Element::Pbs { .. } => t.polarizing_beamsplitters += 1,
        }
    }
    t
}

/// Simulation knobs for a run.
#[derive(Debug, Copy, Clone, PartialEq)]
pub struct RunConfig {
    pub efficiency: EfficiencyModel,
    /// Added to every ordinary beamsplitter's amplitude reflectivity.
    pub reflectivity_offset: f64,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig { efficiency: EfficiencyModel::default(), reflectivity_offset: 0.0 }
    }
}

impl RunConfig {
    pub fn ideal(&self) -> bool {
        self.efficiency.ideal() && self.reflectivity_offset == 0.0
    }
}

fn wp_x(rail: Rail) -> Element {
    Element::waveplate(rail, -45.0, 180.0)
}

fn wp_r(rail: Rail) -> Element {
    Element::waveplate(rail, -67.5, 180.0)
}

fn wp_z(rail: Rail) -> Element {
    Element::waveplate(rail, 90.0, 180.0)
}

/// Oracle X waveplates: an X on each qubit whose marked bit is 0.
fn oracle_x_layer(marked: &MarkedItem, c: Rail, t: Rail) -> Vec<Element> {
    let mut out = Vec::new();
    if marked.index() & 2 == 0 {
        out.push(wp_x(c));
    }
    if marked.index() & 1 == 0 {
        out.push(wp_x(t));
    }
    out
}

/// The inversion-about-the-mean stage compiled through a CSIGN subcircuit:
/// waveplate layers equivalent to Hadamards, the conditional phase
/// (Z on both rails times CSIGN), and final Hadamards, regrouped so the
/// CSIGN appears Hadamard-conjugated on the target rail (a CNOT).
fn diffusion_tail(c: Rail, t: Rail, cnot_core: GateParts) -> Vec<Element> {
    let mut out = vec![wp_r(c)];
    out.push(wp_r(t));
    out.extend(cnot_core.elements);
    out.push(wp_r(t));
    // Remaining one-qubit layers, in path order.
    out.push(wp_z(c));
    out.push(wp_r(c));
    out.push(wp_r(t));
    out.push(wp_z(t));
    out.push(wp_r(t));
    out
}

fn rail_detectors(registry: &ModeRegistry, c: Rail, t: Rail) -> Vec<DetectorSpec> {
    let _ = registry;
    vec![
        DetectorSpec::new("aH", vec![c.h], Expectation::Any),
        DetectorSpec::new("aV", vec![c.v], Expectation::Any),
        DetectorSpec::new("bH", vec![t.h], Expectation::Any),
        DetectorSpec::new("bV", vec![t.v], Expectation::Any),
    ]
}

/// Builds the optical circuit for a variant and marked item.
pub fn build_optical_grover(variant: GroverVariant, marked: &MarkedItem) -> Result<Circuit> {
    if marked.n_bits() != 2 {
        return Err(Error::InvalidArgument("the optical search is over 4 elements".into()));
    }
    let mut registry = ModeRegistry::new();
    let c = registry.add_rail("a")?;
    let t = registry.add_rail("b")?;
    let mut elements: Vec<Element> = Vec::new();
    let mut injections: Vec<usize> = Vec::new();
    let mut pair_sources: Vec<(String, String)> = Vec::new();
    let mut detectors: Vec<DetectorSpec> = Vec::new();

    match variant {
        GroverVariant::Full | GroverVariant::TwoScalable => {
            // Qubits start as |00> = |HH>; the initial Hadamard layer and
            // the heralded CSIGN form the oracle's entangler.
            injections.push(c.h);
            injections.push(t.h);
            elements.push(wp_r(c));
            elements.push(wp_r(t));
            let orientation = scalable_csign_orientation()?;
            let oracle = scalable_csign_parts(&mut registry, c, t, "g1:", orientation)?;
            injections.extend(oracle.ancilla_photons.iter().copied());
            elements.extend(oracle.elements);
            detectors.extend(oracle.herald_detectors);
        }
        GroverVariant::Bell => {
            // The pair source plus a Hadamard waveplate on the first rail
            // prepares exactly the state the oracle CSIGN would output.
            pair_sources.push(("a".to_string(), "b".to_string()));
            elements.push(wp_r(c));
        }
        GroverVariant::Abstract => {
            return Err(Error::InvalidArgument(
                "the abstract variant has no optical circuit".into(),
            ))
        }
    }

    elements.extend(oracle_x_layer(marked, c, t));

    let cnot_core = match variant {
        GroverVariant::TwoScalable => {
            let orientation = scalable_csign_orientation()?;
            let parts = scalable_csign_parts(&mut registry, c, t, "g2:", orientation)?;
            injections.extend(parts.ancilla_photons.iter().copied());
            detectors.extend(parts.herald_detectors.clone());
            parts
        }
        _ => {
            let orientation = coincidence_csign_orientation()?;
            coincidence_csign_parts(&mut registry, c, t, "cx:", orientation)?
        }
    };
    elements.extend(diffusion_tail(c, t, cnot_core));

    detectors.extend(rail_detectors(&registry, c, t));

    let mut circuit = Circuit::new(Arc::new(registry));
    circuit.injections = injections;
    circuit.pair_sources = pair_sources;
    circuit.elements = elements;
    circuit.detectors = detectors;
    circuit.acceptance = AcceptanceRule::Coincidence { rail_a: "a".into(), rail_b: "b".into() };
    Ok(circuit)
}

/// Outcome of one end-to-end run.
#[derive(Debug, Clone)]
pub struct RunReport {
    pub variant: GroverVariant,
    pub marked: MarkedItem,
    pub overall_success_probability: f64,
    /// Conditional distribution over reported answers, after applying the
    /// circuit's stored output correction.
    pub conditional: OutcomeDistribution<String>,
    /// Conditional distribution over raw detector outcomes, before the
    /// correction.
    pub observed: OutcomeDistribution<String>,
    /// Observed outcome -> reported answer.
    pub correction: BTreeMap<String, String>,
    pub tally: ComponentTally,
    /// Soft mismatches against the variant's catalog entry.
    pub warnings: Vec<String>,
    /// Set when the acceptance probability vanished.
    pub degenerate: bool,
}

fn two_bit_labels() -> Vec<String> {
    vec!["00".into(), "01".into(), "10".into(), "11".into()]
}

fn observed_distribution(
    circuit: &Circuit,
    config: &RunConfig,
) -> Result<(f64, OutcomeDistribution<String>)> {
    let run_circuit;
    let circuit = if config.reflectivity_offset != 0.0 {
        run_circuit = circuit.with_reflectivity_offset(config.reflectivity_offset)?;
        &run_circuit
    } else {
        circuit
    };
    let c = circuit.registry.rail("a")?;
    let t = circuit.registry.rail("b")?;
    let outcome = circuit.run(&config.efficiency)?;
    let mut weights: BTreeMap<String, f64> = BTreeMap::new();
    for label in two_bit_labels() {
        weights.insert(label, 0.0);
    }
    for (label, p) in outcome.accepted.iter() {
        let bits = circuit.logical_outcome(label, c, t).ok_or_else(|| {
            Error::ContractViolation(format!("accepted outcome {label:?} is not a qubit reading"))
        })?;
        *weights.get_mut(&bits).expect("two-bit label") += p;
    }
    let dist = OutcomeDistribution::from_probs(weights, outcome.acceptance_probability);
    Ok((outcome.acceptance_probability, dist))
}

/// Derives the output correction for a variant by running all four marked
/// items on ideal components and inverting the observed bijection.
pub fn derive_correction(variant: GroverVariant) -> Result<BTreeMap<String, String>> {
    if variant == GroverVariant::Abstract {
        let marked = MarkedItem::parse("00")?;
        return Ok(abstract_grover_circuit(&marked)?.correction);
    }
    let mut correction = BTreeMap::new();
    for index in 0..4usize {
        let marked = MarkedItem::new(2, index)?;
        let circuit = build_optical_grover(variant, &marked)?;
        let (_, observed) = observed_distribution(&circuit, &RunConfig::default())?;
        let (label, peak) = observed
            .iter()
            .map(|(l, p)| (l.clone(), p))
            .fold((String::new(), -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
        if (peak - 1.0).abs() > 1e-9 {
            return Err(Error::ContractViolation(format!(
                "ideal run for marked {} is not a point mass (peak {peak})",
                marked.bits()
            )));
        }
        if correction.insert(label, marked.bits()).is_some() {
            return Err(Error::ContractViolation(
                "outcome-to-answer map is not a bijection".into(),
            ));
        }
    }
    Ok(correction)
}

/// Runs a variant end to end and assembles the report.
pub fn run_grover(
    variant: GroverVariant,
    marked: &MarkedItem,
    config: &RunConfig,
) -> Result<RunReport> {
    if variant == GroverVariant::Abstract {
        let circuit = abstract_grover_circuit(marked)?;
        let reference = grover_reference(2, marked, 1)?;
        let mut weights = BTreeMap::new();
        for label in two_bit_labels() {
            weights.insert(label.clone(), reference.probability(&label));
        }
        let dist = OutcomeDistribution::from_probs(weights, 1.0);
        return Ok(RunReport {
            variant,
            marked: marked.clone(),
            overall_success_probability: 1.0,
            conditional: dist.clone(),
            observed: dist,
            correction: circuit.correction,
            tally: ComponentTally::default(),
            warnings: Vec::new(),
            degenerate: false,
        });
    }

    let circuit = build_optical_grover(variant, marked)?;
    let (acceptance, observed) = observed_distribution(&circuit, config)?;
    let correction = derive_correction(variant)?;
    let mut corrected = BTreeMap::new();
    for label in two_bit_labels() {
        corrected.insert(label, 0.0);
    }
    for (label, p) in observed.iter() {
        let reported = correction.get(label).cloned().unwrap_or_else(|| label.clone());
        *corrected.get_mut(&reported).expect("two-bit label") += p;
    }
    let conditional = OutcomeDistribution::from_probs(corrected, acceptance);

    let t = tally(&circuit);
    let mut warnings = Vec::new();
    if let Some(cat) = catalog(variant) {
        if t.photons != cat.photons {
            return Err(Error::ContractViolation(format!(
                "photon budget {} does not match the catalog entry {}",
                t.photons, cat.photons
            )));
        }
        if t.detectors != cat.detectors {
            return Err(Error::ContractViolation(format!(
                "detector count {} does not match the catalog entry {}",
                t.detectors, cat.detectors
            )));
        }
        if t.beamsplitters != cat.beamsplitters {
            warnings.push(format!(
                "beamsplitter count {} vs cataloged {}",
                t.beamsplitters, cat.beamsplitters
            ));
        }
        if t.waveplates < cat.waveplate_range.0 || t.waveplates > cat.waveplate_range.1 {
            warnings.push(format!(
                "waveplate count {} outside cataloged range {}..={} (polarization-folding \
                 choreography is written out element by element)",
                t.waveplates, cat.waveplate_range.0, cat.waveplate_range.1
            ));
        }
        if t.polarizing_beamsplitters != cat.polarizing_beamsplitters {
            warnings.push(format!(
                "polarizing beamsplitter count {} vs cataloged {} (polarization-resolved \
                 detectors and polarization-selective couplers imply splitters not listed \
                 as elements)",
                t.polarizing_beamsplitters, cat.polarizing_beamsplitters
            ));
        }
    }

    Ok(RunReport {
        variant,
        marked: marked.clone(),
        overall_success_probability: acceptance,
        conditional,
        observed,
        correction,
        tally: t,
        warnings,
        degenerate: acceptance <= 0.0,
    })
}

/// Comparison of an optical run against the dense reference.
#[derive(Debug, Clone)]
pub struct CrossCheck {
    pub passes: bool,
    pub total_variation: f64,
    pub optical: OutcomeDistribution<String>,
    pub reference: OutcomeDistribution<String>,
}

/// Tolerance on the total-variation distance for a cross-check pass.
pub const CROSS_CHECK_TOL: f64 = 1e-9;

/// Compares the conditional answer distribution of a variant against the
/// dense reference simulator for the same marked item.
pub fn cross_check(variant: GroverVariant, marked: &MarkedItem, config: &RunConfig) -> Result<CrossCheck> {
    let report = run_grover(variant, marked, config)?;
    let reference = grover_reference(2, marked, 1)?;
    let mut ref_weights = BTreeMap::new();
    for label in two_bit_labels() {
        ref_weights.insert(label.clone(), reference.probability(&label));
    }
    let reference = OutcomeDistribution::from_probs(ref_weights, 1.0);
    let tv = report.conditional.total_variation(&reference);
    Ok(CrossCheck {
        passes: tv <= CROSS_CHECK_TOL,
        total_variation: tv,
        optical: report.conditional,
        reference,
    })
}
