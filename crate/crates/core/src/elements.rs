//! Physical circuit elements and their mode unitaries.
//!
//! Waveplates and phase delays act on the two polarization modes of one
//! rail; beamsplitters couple two rails (optionally restricted to one
//! polarization channel, standing for a splitter embedded between a pair of
//! polarizing splitters); the polarizing beamsplitter is an exact mode
//! permutation in which horizontal polarization is fully reflected and
//! vertical fully transmitted.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;
use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::fock::{Rail, StateVector};
use crate::matrix::CMatrix;

/// Which of a beamsplitter's two bound rails takes the reflection sign
/// change (the "thick side").
#[derive(Debug, Copy, Clone, PartialEq, Eq)]
pub enum ThickSide {
    A,
    B,
}

impl ThickSide {
    pub fn flipped(self) -> ThickSide {
        match self {
            ThickSide::A => ThickSide::B,
            ThickSide::B => ThickSide::A,
        }
    }
}

/// Polarization channels a beamsplitter couples.
#[derive(Debug, Copy, Clone, PartialEq, Eq)]
pub enum PolSelect {
    H,
    V,
    Both,
}

/// Waveplate unitary on (H, V): slow axis at `alpha` degrees from the
/// horizontal (counter-clockwise w.r.t. propagation), adding relative phase
/// `phi` degrees to slow-axis light.
pub fn waveplate_unitary(phi_deg: f64, alpha_deg: f64) -> CMatrix {
    let phi = phi_deg * PI / 180.0;
    let alpha = alpha_deg * PI / 180.0;
    let e = Complex64::from_polar(1.0, phi);
    let (sa, ca) = (alpha.sin(), alpha.cos());
    let off = (e - Complex64::ONE) * ca * sa;
    CMatrix::from_rows(&[
        &[e * ca * ca + sa * sa, off],
        &[off, e * sa * sa + ca * ca],
    ])
}

/// Beamsplitter unitary with amplitude reflectivity `r`: `[[r, t], [t, -r]]`
/// with `t = sqrt(1 - r^2)` and the sign change on the thick-side row.
pub fn beamsplitter_unitary(r: f64, thick: ThickSide) -> Result<CMatrix> {
    if !(0.0..=1.0).contains(&r) || !r.is_finite() {
        return Err(Error::InvalidArgument(alloc::format!(
            "amplitude reflectivity {r} outside [0, 1]"
        )));
    }
    let t = (1.0 - r * r).sqrt();
    Ok(match thick {
        ThickSide::B => CMatrix::from_real_2x2(r, t, t, -r),
        ThickSide::A => CMatrix::from_real_2x2(-r, t, t, r),
    })
}

/// Uniform phase on both polarizations of one rail. A phase delay of
/// `theta` multiplies the rail's amplitudes by `exp(-i theta)`.
pub fn phase_delay_unitary(theta_deg: f64) -> CMatrix {
    let w = Complex64::from_polar(1.0, -theta_deg * PI / 180.0);
    CMatrix::from_rows(&[&[w, Complex64::ZERO], &[Complex64::ZERO, w]])
}

fn pbs_swap() -> CMatrix {
    CMatrix::from_real_2x2(0.0, 1.0, 1.0, 0.0)
}

/// One physical component bound to concrete rails. Matrices are computed
/// once at construction.
#[derive(Debug, Clone, PartialEq)]
pub enum Element {
    Waveplate { rail: Rail, alpha_deg: f64, phi_deg: f64, matrix: CMatrix },
    PhaseDelay { rail: Rail, theta_deg: f64, matrix: CMatrix },
    Beamsplitter { a: Rail, b: Rail, pol: PolSelect, r: f64, thick: ThickSide, matrix: CMatrix },
    Pbs { a: Rail, b: Rail },
}

impl Element {
    pub fn waveplate(rail: Rail, alpha_deg: f64, phi_deg: f64) -> Element {
        Element::Waveplate { rail, alpha_deg, phi_deg, matrix: waveplate_unitary(phi_deg, alpha_deg) }
    }

    pub fn phase_delay(rail: Rail, theta_deg: f64) -> Element {
        Element::PhaseDelay { rail, theta_deg, matrix: phase_delay_unitary(theta_deg) }
    }

    pub fn beamsplitter(
        a: Rail,
        b: Rail,
        pol: PolSelect,
        r: f64,
        thick: ThickSide,
    ) -> Result<Element> {
        Ok(Element::Beamsplitter { a, b, pol, r, thick, matrix: beamsplitter_unitary(r, thick)? })
    }

    pub fn pbs(a: Rail, b: Rail) -> Element {
        Element::Pbs { a, b }
    }

    /// Re-parameterized copy with `delta` added to the amplitude
    /// reflectivity (clamped to [0, 1]); other elements are unchanged.
    /// Used by imperfection sweeps.
    pub fn with_reflectivity_offset(&self, delta: f64) -> Result<Element> {
        match self {
            Element::Beamsplitter { a, b, pol, r, thick, .. } => {
                let r2 = (r + delta).clamp(0.0, 1.0);
                Element::beamsplitter(*a, *b, *pol, r2, *thick)
            }
            other => Ok(other.clone()),
        }
    }

    /// The mode-index groups this element acts on, paired with the 2x2
    /// unitary for each group.
    fn actions(&self) -> Vec<([usize; 2], &CMatrix)> {
        match self {
            Element::Waveplate { rail, matrix, .. } => vec![([rail.h, rail.v], matrix)],
            Element::PhaseDelay { rail, matrix, .. } => vec![([rail.h, rail.v], matrix)],
            Element::Beamsplitter { a, b, pol, matrix, .. } => match pol {
                PolSelect::H => vec![([a.h, b.h], matrix)],
                PolSelect::V => vec![([a.v, b.v], matrix)],
                PolSelect::Both => vec![([a.h, b.h], matrix), ([a.v, b.v], matrix)],
            },
            Element::Pbs { .. } => Vec::new(),
        }
    }

    /// All registry modes referenced by the element.
    pub fn modes(&self) -> Vec<usize> {
        match self {
            Element::Waveplate { rail, .. } | Element::PhaseDelay { rail, .. } => {
                vec![rail.h, rail.v]
            }
            Element::Beamsplitter { a, b, pol, .. } => match pol {
                PolSelect::H => vec![a.h, b.h],
                PolSelect::V => vec![a.v, b.v],
                PolSelect::Both => vec![a.h, b.h, a.v, b.v],
            },
            Element::Pbs { a, b } => vec![a.h, b.h],
        }
    }

    /// Embeds the element into a full `n`-mode unitary.
    pub fn embedded_unitary(&self, n_modes: usize) -> Result<CMatrix> {
        match self {
            Element::Pbs { a, b } => pbs_swap().embed(n_modes, &[a.h, b.h]),
            _ => {
                let mut u = CMatrix::identity(n_modes);
                for (modes, m) in self.actions() {
                    u = m.embed(n_modes, &modes)?.mul(&u);
                }
                Ok(u)
            }
        }
    }
}

/// Applies one element to a state.
pub fn apply_element(state: &StateVector, element: &Element) -> Result<StateVector> {
    let n = state.registry().len();
    for mode in element.modes() {
        if mode >= n {
            return Err(Error::UnknownRail(alloc::format!("mode index {mode}")));
        }
    }
    match element {
        Element::Pbs { a, b } => state.apply_mode_unitary(&pbs_swap(), &[a.h, b.h]),
        _ => {
            let mut s = state.clone();
            for (modes, m) in element.actions() {
                s = s.apply_mode_unitary(m, &modes)?;
            }
            Ok(s)
        }
    }
}

/// Applies a sequence of elements in optical path order.
pub fn apply_elements(state: &StateVector, elements: &[Element]) -> Result<StateVector> {
    let mut s = state.clone();
    for e in elements {
        s = apply_element(&s, e)?;
    }
    Ok(s)
}

/// Composes a sequence of elements into one registry-wide unitary, in
/// optical path order. This is the input to the permanent engine.
pub fn compose_unitary(elements: &[Element], n_modes: usize) -> Result<CMatrix> {
    let mut u = CMatrix::identity(n_modes);
    for e in elements {
        u = e.embedded_unitary(n_modes)?.mul(&u);
    }
    Ok(u)
}

/// Named one-qubit gates realizable with waveplates and phase delays.
#[derive(Debug, Copy, Clone, PartialEq)]
pub enum OneQubitGate {
    /// Global phase `exp(i theta)`, realized as a phase delay of `-theta`.
    PhaseShift { theta_deg: f64 },
    /// Hadamard.
    R,
    /// Eighth-wave phase gate diag(1, exp(i pi/4)).
    T,
    X,
    Z,
    /// Realized as Z, X, then a global phase; equals Y up to global phase.
    Y,
}

/// Expands a named gate into its element sequence on a rail.
pub fn one_qubit_gate(gate: OneQubitGate, rail: Rail) -> Vec<Element> {
    match gate {
        OneQubitGate::PhaseShift { theta_deg } => vec![Element::phase_delay(rail, -theta_deg)],
        OneQubitGate::R => vec![Element::waveplate(rail, -67.5, 180.0)],
        OneQubitGate::T => vec![Element::waveplate(rail, 90.0, 45.0)],
        OneQubitGate::X => vec![Element::waveplate(rail, -45.0, 180.0)],
        OneQubitGate::Z => vec![Element::waveplate(rail, 90.0, 180.0)],
        OneQubitGate::Y => vec![
            Element::waveplate(rail, 90.0, 180.0),
            Element::waveplate(rail, -45.0, 180.0),
            Element::phase_delay(rail, -45.0),
        ],
    }
}

/// Parses a one-qubit gate name as used by gate tables and checks.
pub fn parse_gate_name(name: &str) -> Result<OneQubitGate> {
    match name {
        "R" => Ok(OneQubitGate::R),
        "T" => Ok(OneQubitGate::T),
        "X" => Ok(OneQubitGate::X),
        "Z" => Ok(OneQubitGate::Z),
        "Y" => Ok(OneQubitGate::Y),
        "I-phase" => Ok(OneQubitGate::PhaseShift { theta_deg: 0.0 }),
        other => Err(Error::InvalidArgument(String::from("unknown gate name: ") + other)),
    }
}
