//! Two-qubit gate constructions on polarization-encoded qubits.
//!
//! Two constructions are provided. The coincidence-basis CSIGN couples the
//! two vertical modes on a one-third-reflectivity beamsplitter and each
//! horizontal mode to an undetected vacuum port; it works only when the
//! final rail counts are post-selected. The scalable CSIGN folds both qubit
//! "1" components into one interferometer rail as orthogonal polarizations,
//! couples that rail to a pair of ancilla photons and to a vacuum port, and
//! heralds success on the ancilla and vacuum detectors alone, which is what
//! makes it composable with later gates.
//!
//! Thick-side orientations (and any local phase fixes) are chosen by a
//! search over the small discrete orientation space at construction time;
//! every built blueprint is validated against its numeric contract via
//! [`gate_action_matrix`] before being returned.

use alloc::format;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::SQRT_2;
use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::elements::{apply_elements, Element, PolSelect, ThickSide};
use crate::error::{Error, Result};
use crate::fock::{FockState, ModeRegistry, Polarization, Rail, StateVector};
use crate::matrix::CMatrix;
use crate::measurement::{DetectorSpec, Expectation, HeraldPattern};

/// Intensity reflectivity of the beamsplitter coupling the interferometer
/// rail to the ancilla photon pair in the scalable CSIGN. Its value also
/// equals the magnitude of the heralded transfer amplitude.
pub const SCALABLE_ANCILLA_REFLECTIVITY: f64 = (3.0 - SQRT_2) / 7.0;

/// Intensity reflectivity of the beamsplitter coupling the interferometer
/// rail to the undetected vacuum port in the scalable CSIGN.
pub const SCALABLE_VACUUM_REFLECTIVITY: f64 = 5.0 - 3.0 * SQRT_2;

/// Herald success probability of the scalable CSIGN, identical for every
/// qubit basis input.
pub const SCALABLE_CSIGN_SUCCESS: f64 =
    SCALABLE_ANCILLA_REFLECTIVITY * SCALABLE_ANCILLA_REFLECTIVITY;

/// Intensity reflectivity shared by all three beamsplitters of the
/// coincidence-basis gate.
pub const COINCIDENCE_REFLECTIVITY: f64 = 1.0 / 3.0;

/// Per-basis success probability of the coincidence-basis gate.
pub const COINCIDENCE_SUCCESS: f64 = 1.0 / 9.0;

/// Tolerance for the input-independence check on heralded success.
pub const SUCCESS_SPREAD_TOL: f64 = 1e-9;

fn amplitude_of_intensity(eta: f64) -> f64 {
    eta.sqrt()
}

/// How a gate's output is accepted.
#[derive(Debug, Copy, Clone, PartialEq, Eq)]
pub enum GateAcceptance {
    /// Ancilla detector outcomes alone certify success.
    Heralded,
    /// Success is only certified by end-of-circuit rail counts.
    Coincidence,
}

/// Target conditional action and success amplitude a blueprint promises.
#[derive(Debug, Clone)]
pub struct GateContract {
    /// 4x4 matrix the conditional action must be proportional to.
    pub target: CMatrix,
    /// Magnitude of the heralded amplitude on every basis input.
    pub success_amplitude: f64,
}

/// Element subcircuit realizing one two-qubit gate.
#[derive(Debug, Clone)]
pub struct GateParts {
    pub elements: Vec<Element>,
    /// Modes receiving one ancilla photon each.
    pub ancilla_photons: Vec<usize>,
    pub heralds: HeraldPattern,
    pub herald_detectors: Vec<DetectorSpec>,
}

/// A gate bound to its own two-rail registry, with a validated contract.
#[derive(Debug, Clone)]
pub struct GateBlueprint {
    pub registry: Arc<ModeRegistry>,
    pub control: Rail,
    pub target: Rail,
    pub elements: Vec<Element>,
    pub ancilla_photons: Vec<usize>,
    pub heralds: HeraldPattern,
    pub herald_detectors: Vec<DetectorSpec>,
    pub acceptance: GateAcceptance,
    /// Absent only for experimental variants whose action is unconstrained.
    pub contract: Option<GateContract>,
}

/// Thick-side choices for the scalable CSIGN's two beamsplitters, listed
/// with the interferometer rail first.
#[derive(Debug, Copy, Clone, PartialEq, Eq)]
pub struct ScalableOrientation {
    pub ancilla_thick: ThickSide,
    pub vacuum_thick: ThickSide,
}

/// Thick sides and local phase fixes for the coincidence gate.
#[derive(Debug, Copy, Clone, PartialEq, Eq)]
pub struct CoincidenceOrientation {
    /// Central beamsplitter, bound (control, target).
    pub central_thick: ThickSide,
    /// Control-H to vacuum, bound (control, vacuum).
    pub control_vacuum_thick: ThickSide,
    /// Target-H to vacuum, bound (target, vacuum).
    pub target_vacuum_thick: ThickSide,
    pub z_on_control: bool,
    pub z_on_target: bool,
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

/// Assembles the scalable CSIGN on externally owned qubit rails.
///
/// Both qubits' vertical components are folded into one fresh rail as
/// orthogonal polarizations (half waveplates plus polarizing splitters), a
/// balanced waveplate pair forms the interferometer, and the rail is
/// coupled to two ancilla photons and a vacuum port. Heralds: the vacuum
/// detector counts 0 photons and each ancilla detector counts exactly 1.
pub fn scalable_csign_parts(
    registry: &mut ModeRegistry,
    control: Rail,
    target: Rail,
    prefix: &str,
    orientation: ScalableOrientation,
) -> Result<GateParts> {
    let core = registry.add_rail(&format!("{prefix}core"))?;
    let anc = registry.add_rail(&format!("{prefix}anc"))?;
    let vac = registry.add_rail(&format!("{prefix}vac"))?;
    let r_anc = amplitude_of_intensity(SCALABLE_ANCILLA_REFLECTIVITY);
    let r_vac = amplitude_of_intensity(SCALABLE_VACUUM_REFLECTIVITY);
    let elements = vec![
        // Fold control-V into the core rail's V slot...
        wp_x(control),
        Element::pbs(control, core),
        wp_x(core),
        // ...and target-V into its H slot.
        wp_x(target),
        Element::pbs(target, core),
        // Balanced mixing of the two folded components.
        wp_r(core),
        Element::beamsplitter(core, anc, PolSelect::Both, r_anc, orientation.ancilla_thick)?,
        Element::beamsplitter(core, vac, PolSelect::Both, r_vac, orientation.vacuum_thick)?,
        wp_r(core),
        // Unfold in reverse order.
        Element::pbs(target, core),
        wp_x(target),
        wp_x(core),
        Element::pbs(control, core),
        wp_x(control),
    ];
    let heralds = HeraldPattern::new(vec![
        (vec![vac.h, vac.v], 0),
        (vec![anc.h], 1),
        (vec![anc.v], 1),
    ])?;
    let herald_detectors = vec![
        DetectorSpec::new(&format!("{prefix}vac"), vec![vac.h, vac.v], Expectation::Exactly(0)),
        DetectorSpec::new(&format!("{prefix}ancH"), vec![anc.h], Expectation::Exactly(1)),
        DetectorSpec::new(&format!("{prefix}ancV"), vec![anc.v], Expectation::Exactly(1)),
    ];
    Ok(GateParts { elements, ancilla_photons: vec![anc.h, anc.v], heralds, herald_detectors })
}

/// Scalable CSIGN with the vacuum-port beamsplitter removed and a caller
/// supplied ancilla-coupler reflectivity (amplitude). Experimental; no
/// contract is attached or asserted.
pub fn reduced_csign_parts(
    registry: &mut ModeRegistry,
    control: Rail,
    target: Rail,
    prefix: &str,
    ancilla_amplitude: f64,
    orientation: ScalableOrientation,
) -> Result<GateParts> {
    let core = registry.add_rail(&format!("{prefix}core"))?;
    let anc = registry.add_rail(&format!("{prefix}anc"))?;
    let elements = vec![
        wp_x(control),
        Element::pbs(control, core),
        wp_x(core),
        wp_x(target),
        Element::pbs(target, core),
        wp_r(core),
        Element::beamsplitter(core, anc, PolSelect::Both, ancilla_amplitude, orientation.ancilla_thick)?,
        wp_r(core),
        Element::pbs(target, core),
        wp_x(target),
        wp_x(core),
        Element::pbs(control, core),
        wp_x(control),
    ];
    let heralds = HeraldPattern::new(vec![(vec![anc.h], 1), (vec![anc.v], 1)])?;
    let herald_detectors = vec![
        DetectorSpec::new(&format!("{prefix}ancH"), vec![anc.h], Expectation::Exactly(1)),
        DetectorSpec::new(&format!("{prefix}ancV"), vec![anc.v], Expectation::Exactly(1)),
    ];
    Ok(GateParts { elements, ancilla_photons: vec![anc.h, anc.v], heralds, herald_detectors })
}

/// Assembles the coincidence-basis CSIGN on externally owned qubit rails.
pub fn coincidence_csign_parts(
    registry: &mut ModeRegistry,
    control: Rail,
    target: Rail,
    prefix: &str,
    orientation: CoincidenceOrientation,
) -> Result<GateParts> {
    let v1 = registry.add_rail(&format!("{prefix}v1"))?;
    let v2 = registry.add_rail(&format!("{prefix}v2"))?;
    let r = amplitude_of_intensity(COINCIDENCE_REFLECTIVITY);
    let mut elements = vec![
        Element::beamsplitter(control, v1, PolSelect::H, r, orientation.control_vacuum_thick)?,
        Element::beamsplitter(control, target, PolSelect::V, r, orientation.central_thick)?,
        Element::beamsplitter(target, v2, PolSelect::H, r, orientation.target_vacuum_thick)?,
    ];
    if orientation.z_on_control {
        elements.push(wp_z(control));
    }
    if orientation.z_on_target {
        elements.push(wp_z(target));
    }
    Ok(GateParts {
        elements,
        ancilla_photons: Vec::new(),
        heralds: HeraldPattern::default(),
        herald_detectors: Vec::new(),
    })
}

/// CSIGN target action diag(1, 1, 1, -1) on (00, 01, 10, 11).
pub fn csign_target() -> CMatrix {
    let mut m = CMatrix::identity(4);
    m[(3, 3)] = -Complex64::ONE;
    m
}

/// CNOT target action with the first qubit as control.
pub fn cnot_target() -> CMatrix {
    let mut m = CMatrix::zeros(4, 4);
    m[(0, 0)] = Complex64::ONE;
    m[(1, 1)] = Complex64::ONE;
    m[(3, 2)] = Complex64::ONE;
    m[(2, 3)] = Complex64::ONE;
    m
}

fn basis_pols(idx: usize) -> (Polarization, Polarization) {
    let c = if idx & 2 == 0 { Polarization::H } else { Polarization::V };
    let t = if idx & 1 == 0 { Polarization::H } else { Polarization::V };
    (c, t)
}

/// Per-input heralded action of a blueprint, without the input-independence
/// requirement. Columns are inputs (00, 01, 10, 11); rows outputs.
pub struct GateAction {
    pub amplitudes: CMatrix,
    pub success: [f64; 4],
}

/// Runs the Fock simulation for each qubit basis input and reads off the
/// heralded (unnormalized) output amplitudes.
pub fn gate_action_raw(bp: &GateBlueprint) -> Result<GateAction> {
    let n = bp.registry.len();
    let mut amplitudes = CMatrix::zeros(4, 4);
    let mut success = [0.0f64; 4];
    for in_idx in 0..4 {
        let (cp, tp) = basis_pols(in_idx);
        let mut occ = vec![0u8; n];
        occ[bp.control.mode(cp)] += 1;
        occ[bp.target.mode(tp)] += 1;
        for &m in &bp.ancilla_photons {
            occ[m] += 1;
        }
        let input = StateVector::basis(Arc::clone(&bp.registry), occ)?;
        let state = apply_elements(&input, &bp.elements)?;
        let control = bp.control;
        let target = bp.target;
        let projected = match bp.acceptance {
            GateAcceptance::Heralded => state.project(|f| bp.heralds.matches(f)),
            GateAcceptance::Coincidence => state.project(|f| {
                bp.heralds.matches(f)
                    && f.count_in(&[control.h, control.v]) == 1
                    && f.count_in(&[target.h, target.v]) == 1
            }),
        };
        let p = projected.norm_sqr();
        let mut explained = 0.0;
        for out_idx in 0..4 {
            let expected = expected_output(bp, out_idx)?;
            let amp = projected.amplitude(&expected);
            amplitudes[(out_idx, in_idx)] = amp;
            explained += amp.norm_sqr();
        }
        if (p - explained).abs() > 1e-9 {
            let mut diag = String::from("heralded output leaves the qubit subspace:");
            for (fock, amp) in projected.terms() {
                let is_expected = (0..4).any(|o| {
                    expected_output(bp, o).map(|e| &e == fock).unwrap_or(false)
                });
                if !is_expected {
                    diag += &format!(" {fock}({:.3e})", amp.norm());
                }
            }
            return Err(Error::ContractViolation(diag));
        }
        success[in_idx] = p;
    }
    Ok(GateAction { amplitudes, success })
}

fn expected_output(bp: &GateBlueprint, out_idx: usize) -> Result<FockState> {
    let n = bp.registry.len();
    let mut occ = vec![0u8; n];
    let (cp, tp) = basis_pols(out_idx);
    occ[bp.control.mode(cp)] = 1;
    occ[bp.target.mode(tp)] = 1;
    for (modes, count) in &bp.heralds.constraints {
        if *count == 0 {
            continue;
        }
        if modes.len() == 1 {
            occ[modes[0]] = *count;
        } else {
            return Err(Error::ContractViolation(
                "herald pattern does not determine a unique detector occupation".into(),
            ));
        }
    }
    Ok(FockState::new(occ))
}

/// Extracts the conditional 4x4 action and the common success probability,
/// raising a contract violation if the per-basis success probabilities
/// spread by more than the tolerance.
pub fn gate_action_matrix(bp: &GateBlueprint) -> Result<(CMatrix, f64)> {
    let action = gate_action_raw(bp)?;
    let mean = action.success.iter().sum::<f64>() / 4.0;
    let spread = action
        .success
        .iter()
        .map(|p| (p - mean).abs())
        .fold(0.0f64, f64::max);
    if spread > SUCCESS_SPREAD_TOL {
        return Err(Error::ContractViolation(format!(
            "success probability depends on the basis input: {:?}",
            action.success
        )));
    }
    Ok((action.amplitudes, mean))
}

/// Checks the extracted action against a contract, up to a global phase.
pub fn contract_deviation(amplitudes: &CMatrix, contract: &GateContract) -> f64 {
    // Phase-align on the largest target entry.
    let mut ref_idx = (0, 0);
    let mut best = 0.0;
    for i in 0..4 {
        for j in 0..4 {
            let t = contract.target[(i, j)].norm();
            if t > best {
                best = t;
                ref_idx = (i, j);
            }
        }
    }
    let denom = contract.target[ref_idx] * contract.success_amplitude;
    let phase = amplitudes[ref_idx] / denom;
    let mut dev = (phase.norm() - 1.0).abs();
    for i in 0..4 {
        for j in 0..4 {
            let want = phase * contract.target[(i, j)] * contract.success_amplitude;
            let d = (amplitudes[(i, j)] - want).norm();
            if d > dev {
                dev = d;
            }
        }
    }
    dev
}

fn validate_blueprint(bp: &GateBlueprint, tol: f64) -> Result<()> {
    let contract = bp
        .contract
        .as_ref()
        .ok_or_else(|| Error::ContractViolation("blueprint has no contract".into()))?;
    let (amps, p) = gate_action_matrix(bp)?;
    let dev = contract_deviation(&amps, contract);
    if dev > tol {
        return Err(Error::ContractViolation(format!(
            "conditional action deviates from contract by {dev:.3e}"
        )));
    }
    let p_expect = contract.success_amplitude * contract.success_amplitude;
    if (p - p_expect).abs() > tol {
        return Err(Error::ContractViolation(format!(
            "success probability {p:.12} differs from contracted {p_expect:.12}"
        )));
    }
    Ok(())
}

fn qubit_pair_registry() -> (ModeRegistry, Rail, Rail) {
    let mut reg = ModeRegistry::new();
    let c = reg.add_rail("c").expect("fresh registry");
    let t = reg.add_rail("t").expect("fresh registry");
    (reg, c, t)
}

/// Searches thick-side orientations for the scalable CSIGN and returns the
/// first one whose blueprint satisfies the contract.
pub fn scalable_csign_orientation() -> Result<ScalableOrientation> {
    let sides = [ThickSide::A, ThickSide::B];
    for &ancilla_thick in &sides {
        for &vacuum_thick in &sides {
            let orientation = ScalableOrientation { ancilla_thick, vacuum_thick };
            if let Ok(bp) = assemble_scalable(orientation) {
                if validate_blueprint(&bp, 1e-10).is_ok() {
                    return Ok(orientation);
                }
            }
        }
    }
    Err(Error::ContractViolation(
        "no thick-side orientation reproduces the scalable CSIGN contract".into(),
    ))
}

fn assemble_scalable(orientation: ScalableOrientation) -> Result<GateBlueprint> {
    let (mut reg, c, t) = qubit_pair_registry();
    let parts = scalable_csign_parts(&mut reg, c, t, "g", orientation)?;
    Ok(GateBlueprint {
        registry: Arc::new(reg),
        control: c,
        target: t,
        elements: parts.elements,
        ancilla_photons: parts.ancilla_photons,
        heralds: parts.heralds,
        herald_detectors: parts.herald_detectors,
        acceptance: GateAcceptance::Heralded,
        contract: Some(GateContract {
            target: csign_target(),
            success_amplitude: SCALABLE_ANCILLA_REFLECTIVITY,
        }),
    })
}

/// Builds the heralded (scalable) CSIGN and validates it against its
/// contract. Construction fails rather than returning an invalid gate.
pub fn build_scalable_csign() -> Result<GateBlueprint> {
    let orientation = scalable_csign_orientation()?;
    let bp = assemble_scalable(orientation)?;
    validate_blueprint(&bp, 1e-10)?;
    Ok(bp)
}

/// Builds the vacuum-port-free experimental variant. The caller chooses the
/// ancilla coupler's amplitude reflectivity; no contract is attached.
pub fn build_reduced_csign(ancilla_amplitude: f64) -> Result<GateBlueprint> {
    let orientation = scalable_csign_orientation()?;
    let (mut reg, c, t) = qubit_pair_registry();
    let parts = reduced_csign_parts(&mut reg, c, t, "g", ancilla_amplitude, orientation)?;
    Ok(GateBlueprint {
        registry: Arc::new(reg),
        control: c,
        target: t,
        elements: parts.elements,
        ancilla_photons: parts.ancilla_photons,
        heralds: parts.heralds,
        herald_detectors: parts.herald_detectors,
        acceptance: GateAcceptance::Heralded,
        contract: None,
    })
}

/// Searches orientations and local Z fixes for the coincidence CSIGN.
pub fn coincidence_csign_orientation() -> Result<CoincidenceOrientation> {
    let sides = [ThickSide::A, ThickSide::B];
    for &central_thick in &sides {
        for &control_vacuum_thick in &sides {
            for &target_vacuum_thick in &sides {
                for z_mask in 0..4u8 {
                    let orientation = CoincidenceOrientation {
                        central_thick,
                        control_vacuum_thick,
                        target_vacuum_thick,
                        z_on_control: z_mask & 1 != 0,
                        z_on_target: z_mask & 2 != 0,
                    };
                    if let Ok(bp) = assemble_coincidence_csign(orientation) {
                        if validate_blueprint(&bp, 1e-10).is_ok() {
                            return Ok(orientation);
                        }
                    }
                }
            }
        }
    }
    Err(Error::ContractViolation(
        "no orientation reproduces the coincidence CSIGN contract".into(),
    ))
}

fn assemble_coincidence_csign(orientation: CoincidenceOrientation) -> Result<GateBlueprint> {
    let (mut reg, c, t) = qubit_pair_registry();
    let parts = coincidence_csign_parts(&mut reg, c, t, "g", orientation)?;
    Ok(GateBlueprint {
        registry: Arc::new(reg),
        control: c,
        target: t,
        elements: parts.elements,
        ancilla_photons: parts.ancilla_photons,
        heralds: parts.heralds,
        herald_detectors: parts.herald_detectors,
        acceptance: GateAcceptance::Coincidence,
        contract: Some(GateContract {
            target: csign_target(),
            success_amplitude: 1.0 / 3.0,
        }),
    })
}

/// Builds the coincidence-basis CSIGN, fixing orientations by search.
pub fn build_coincidence_csign() -> Result<GateBlueprint> {
    let orientation = coincidence_csign_orientation()?;
    let bp = assemble_coincidence_csign(orientation)?;
    validate_blueprint(&bp, 1e-10)?;
    Ok(bp)
}

/// Builds the coincidence-basis CNOT: the CSIGN conjugated by Hadamard
/// waveplates on the target rail.
pub fn build_coincidence_cnot() -> Result<GateBlueprint> {
    let orientation = coincidence_csign_orientation()?;
    let (mut reg, c, t) = qubit_pair_registry();
    let parts = coincidence_csign_parts(&mut reg, c, t, "g", orientation)?;
    let mut elements = vec![wp_r(t)];
    elements.extend(parts.elements);
    elements.push(wp_r(t));
    let bp = GateBlueprint {
        registry: Arc::new(reg),
        control: c,
        target: t,
        elements,
        ancilla_photons: parts.ancilla_photons,
        heralds: parts.heralds,
        herald_detectors: parts.herald_detectors,
        acceptance: GateAcceptance::Coincidence,
        contract: Some(GateContract { target: cnot_target(), success_amplitude: 1.0 / 3.0 }),
    };
    validate_blueprint(&bp, 1e-10)?;
    Ok(bp)
}

/// An empty blueprint on two rails; useful as a baseline.
pub fn build_identity() -> Result<GateBlueprint> {
    let (reg, c, t) = qubit_pair_registry();
    Ok(GateBlueprint {
        registry: Arc::new(reg),
        control: c,
        target: t,
        elements: Vec::new(),
        ancilla_photons: Vec::new(),
        heralds: HeraldPattern::default(),
        herald_detectors: Vec::new(),
        acceptance: GateAcceptance::Heralded,
        contract: Some(GateContract { target: CMatrix::identity(4), success_amplitude: 1.0 }),
    })
}
