//! Multi-mode multi-photon states in the occupation-number basis.
//!
//! A [`ModeRegistry`] fixes an ordered set of optical modes, two per spatial
//! rail (horizontal and vertical polarization). A [`StateVector`] is a sparse
//! map from [`FockState`] occupation vectors to complex amplitudes. Mode
//! unitaries are applied by expanding transformed creation-operator
//! monomials, which lifts any single-photon matrix to the full bosonic
//! action.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::matrix::CMatrix;

/// Default total-photon cap; the largest in-scope circuit uses six photons.
pub const DEFAULT_PHOTON_CAP: u32 = 6;
/// Default amplitude-pruning threshold.
pub const DEFAULT_TOLERANCE: f64 = 1e-14;
/// Unitarity tolerance for matrices fed to `apply_mode_unitary`.
pub const UNITARY_TOL: f64 = 1e-10;

/// Polarization of a mode; logical 0 is encoded as H, logical 1 as V.
#[derive(Debug, Copy, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum Polarization {
    H,
    V,
}

impl fmt::Display for Polarization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Polarization::H => write!(f, "H"),
            Polarization::V => write!(f, "V"),
        }
    }
}

/// One optical mode: a rail identifier plus a polarization.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct ModeLabel {
    pub rail: String,
    pub pol: Polarization,
}

impl fmt::Display for ModeLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}.{}", self.rail, self.pol)
    }
}

/// Handle to one spatial rail: the registry indices of its H and V modes.
#[derive(Debug, Copy, Clone, PartialEq, Eq)]
pub struct Rail {
    pub h: usize,
    pub v: usize,
}

impl Rail {
    pub fn mode(&self, pol: Polarization) -> usize {
        match pol {
            Polarization::H => self.h,
            Polarization::V => self.v,
        }
    }
}

/// Ordered set of modes with stable indices for the lifetime of a run.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ModeRegistry {
    labels: Vec<ModeLabel>,
    rails: Vec<(String, Rail)>,
    by_name: BTreeMap<String, usize>,
}

impl ModeRegistry {
    pub fn new() -> Self {
        Self::default()
    }

    /// Registers a rail, adding its H and V modes in order.
    pub fn add_rail(&mut self, name: &str) -> Result<Rail> {
        if self.by_name.contains_key(name) {
            return Err(Error::RegistryConflict(name.to_string()));
        }
        let h = self.labels.len();
        self.labels.push(ModeLabel { rail: name.to_string(), pol: Polarization::H });
        let v = self.labels.len();
        self.labels.push(ModeLabel { rail: name.to_string(), pol: Polarization::V });
        let rail = Rail { h, v };
        self.by_name.insert(name.to_string(), self.rails.len());
        self.rails.push((name.to_string(), rail));
        Ok(rail)
    }

    /// Registers a single auxiliary mode (used for loss environments).
    pub fn add_aux_mode(&mut self, name: &str) -> Result<usize> {
        if self.by_name.contains_key(name) {
            return Err(Error::RegistryConflict(name.to_string()));
        }
        let idx = self.labels.len();
        self.labels.push(ModeLabel { rail: name.to_string(), pol: Polarization::H });
        Ok(idx)
    }

    pub fn rail(&self, name: &str) -> Result<Rail> {
        self.by_name
            .get(name)
            .map(|&i| self.rails[i].1)
            .ok_or_else(|| Error::UnknownRail(name.to_string()))
    }

    pub fn rails(&self) -> impl Iterator<Item = (&str, Rail)> {
        self.rails.iter().map(|(n, r)| (n.as_str(), *r))
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn label(&self, idx: usize) -> &ModeLabel {
        &self.labels[idx]
    }

    /// Concatenates two registries; rail names must be disjoint.
    pub fn concat(a: &ModeRegistry, b: &ModeRegistry) -> Result<ModeRegistry> {
        let mut out = a.clone();
        let offset = a.labels.len();
        for label in &b.labels {
            if out.labels.iter().any(|l| l == label) {
                return Err(Error::RegistryConflict(format!("{label}")));
            }
            out.labels.push(label.clone());
        }
        for (name, rail) in &b.rails {
            if out.by_name.contains_key(name) {
                return Err(Error::RegistryConflict(name.clone()));
            }
            let shifted = Rail { h: rail.h + offset, v: rail.v + offset };
            out.by_name.insert(name.clone(), out.rails.len());
            out.rails.push((name.clone(), shifted));
        }
        Ok(out)
    }
}

/// Photon occupation numbers, one per registry index.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct FockState(Vec<u8>);

impl FockState {
    pub fn new(occupations: Vec<u8>) -> Self {
        FockState(occupations)
    }

    pub fn vacuum(n_modes: usize) -> Self {
        FockState(vec![0; n_modes])
    }

    pub fn occupations(&self) -> &[u8] {
        &self.0
    }

    pub fn occ(&self, mode: usize) -> u8 {
        self.0[mode]
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn total(&self) -> u32 {
        self.0.iter().map(|&n| n as u32).sum()
    }

    /// Sum of occupations over a set of modes.
    pub fn count_in(&self, modes: &[usize]) -> u32 {
        modes.iter().map(|&m| self.0[m] as u32).sum()
    }

    fn with_occ(&self, mode: usize, n: u8) -> FockState {
        let mut v = self.0.clone();
        v[mode] = n;
        FockState(v)
    }
}

impl fmt::Display for FockState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "|")?;
        for (i, n) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{n}")?;
        }
        write!(f, ">")
    }
}

const FACTORIALS: [f64; 13] = [
    1.0, 1.0, 2.0, 6.0, 24.0, 120.0, 720.0, 5040.0, 40320.0, 362880.0, 3628800.0, 39916800.0,
    479001600.0,
];

fn factorial(n: u8) -> f64 {
    FACTORIALS[n as usize]
}

/// Sparse multi-mode photonic state.
#[derive(Debug, Clone)]
pub struct StateVector {
    registry: Arc<ModeRegistry>,
    amps: BTreeMap<FockState, Complex64>,
    tolerance: f64,
    photon_cap: u32,
}

impl StateVector {
    /// The vacuum state on a registry.
    pub fn vacuum(registry: Arc<ModeRegistry>) -> Self {
        let mut amps = BTreeMap::new();
        amps.insert(FockState::vacuum(registry.len()), Complex64::ONE);
        StateVector {
            registry,
            amps,
            tolerance: DEFAULT_TOLERANCE,
            photon_cap: DEFAULT_PHOTON_CAP,
        }
    }

    /// A single occupation-number basis state with amplitude 1.
    pub fn basis(registry: Arc<ModeRegistry>, occupations: Vec<u8>) -> Result<Self> {
        let mut s = StateVector::vacuum(registry);
        let state = FockState::new(occupations);
        s.check_state(&state)?;
        s.amps.clear();
        s.amps.insert(state, Complex64::ONE);
        Ok(s)
    }

    /// Builds a superposition from (occupations, amplitude) terms.
    pub fn superposition(
        registry: Arc<ModeRegistry>,
        terms: &[(Vec<u8>, Complex64)],
    ) -> Result<Self> {
        let mut s = StateVector::vacuum(registry);
        s.amps.clear();
        for (occ, amp) in terms {
            let state = FockState::new(occ.clone());
            s.check_state(&state)?;
            *s.amps.entry(state).or_insert(Complex64::ZERO) += *amp;
        }
        s.prune();
        Ok(s)
    }

    pub fn with_photon_cap(mut self, cap: u32) -> Result<Self> {
        for state in self.amps.keys() {
            if state.total() > cap {
                return Err(Error::PhotonCapExceeded { total: state.total(), cap });
            }
        }
        self.photon_cap = cap;
        Ok(self)
    }

    pub fn with_tolerance(mut self, tol: f64) -> Self {
        self.tolerance = tol;
        self.prune();
        self
    }

    fn check_state(&self, state: &FockState) -> Result<()> {
        if state.len() != self.registry.len() {
            return Err(Error::InvalidArgument(format!(
                "occupation vector length {} does not match registry size {}",
                state.len(),
                self.registry.len()
            )));
        }
        if state.total() > self.photon_cap {
            return Err(Error::PhotonCapExceeded { total: state.total(), cap: self.photon_cap });
        }
        Ok(())
    }

    pub fn registry(&self) -> &Arc<ModeRegistry> {
        &self.registry
    }

    pub fn tolerance(&self) -> f64 {
        self.tolerance
    }

    pub fn photon_cap(&self) -> u32 {
        self.photon_cap
    }

    pub fn amplitude(&self, state: &FockState) -> Complex64 {
        self.amps.get(state).copied().unwrap_or(Complex64::ZERO)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&FockState, &Complex64)> {
        self.amps.iter()
    }

    pub fn term_count(&self) -> usize {
        self.amps.len()
    }

    pub fn is_zero(&self) -> bool {
        self.amps.is_empty()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.values().map(|a| a.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    /// Set of total photon numbers carrying nonzero amplitude.
    pub fn total_photons(&self) -> BTreeSet<u32> {
        self.amps.keys().map(|s| s.total()).collect()
    }

    fn prune(&mut self) {
        let tol = self.tolerance;
        self.amps.retain(|_, a| a.norm() >= tol);
    }

    /// Scales every amplitude; mostly useful for tests and source factors.
    pub fn scaled(&self, factor: Complex64) -> StateVector {
        let mut out = self.clone();
        for a in out.amps.values_mut() {
            *a *= factor;
        }
        out.prune();
        out
    }

    /// Returns the pre-normalization norm together with a unit-norm copy.
    pub fn normalize(&self) -> Result<(f64, StateVector)> {
        let n = self.norm();
        if n < 1e-150 {
            return Err(Error::DegenerateState);
        }
        Ok((n, self.scaled(Complex64::new(1.0 / n, 0.0))))
    }

    /// Tensor product; registries must have disjoint rail names.
    pub fn tensor(a: &StateVector, b: &StateVector) -> Result<StateVector> {
        let registry = Arc::new(ModeRegistry::concat(&a.registry, &b.registry)?);
        let cap = a.photon_cap.max(b.photon_cap);
        let mut amps = BTreeMap::new();
        for (sa, &aa) in &a.amps {
            for (sb, &ab) in &b.amps {
                let mut occ = Vec::with_capacity(sa.len() + sb.len());
                occ.extend_from_slice(sa.occupations());
                occ.extend_from_slice(sb.occupations());
                let state = FockState::new(occ);
                if state.total() > cap {
                    return Err(Error::PhotonCapExceeded { total: state.total(), cap });
                }
                amps.insert(state, aa * ab);
            }
        }
        let mut out = StateVector {
            registry,
            amps,
            tolerance: a.tolerance.min(b.tolerance),
            photon_cap: cap,
        };
        out.prune();
        Ok(out)
    }

    /// Hermitian inner product `<a|b>`; conjugate-linear in `a`.
    pub fn inner_product(a: &StateVector, b: &StateVector) -> Result<Complex64> {
        if a.registry.len() != b.registry.len() {
            return Err(Error::InvalidArgument(
                "inner product requires matching registries".into(),
            ));
        }
        let mut acc = Complex64::ZERO;
        for (state, &aa) in &a.amps {
            if let Some(&ab) = b.amps.get(state) {
                acc += aa.conj() * ab;
            }
        }
        Ok(acc)
    }

    /// Applies an `m x m` mode unitary to the listed registry modes.
    ///
    /// The single-photon convention is that a photon in touched mode `i`
    /// goes to `sum_j u[(j, i)] |j>`, so on single-photon states the matrix
    /// is reproduced directly. Multi-photon states transform by the bosonic
    /// lift: each creation operator is substituted and the resulting
    /// monomials collected with the usual sqrt-factorial normalization.
    pub fn apply_mode_unitary(&self, u: &CMatrix, modes: &[usize]) -> Result<StateVector> {
        let m = modes.len();
        if !u.is_square() || u.rows() != m {
            return Err(Error::InvalidArgument(format!(
                "matrix is {}x{} but {} modes were given",
                u.rows(),
                u.cols(),
                m
            )));
        }
        u.require_unitary(UNITARY_TOL)?;
        for (i, &mi) in modes.iter().enumerate() {
            if mi >= self.registry.len() {
                return Err(Error::UnknownRail(format!("mode index {mi}")));
            }
            if modes[..i].contains(&mi) {
                return Err(Error::RepeatedMode(mi));
            }
        }

        let mut out: BTreeMap<FockState, Complex64> = BTreeMap::new();
        for (state, &amp) in &self.amps {
            // Expand the transformed creation operators of the touched modes.
            // Keys are occupation vectors over the touched modes only.
            let mut partial: BTreeMap<Vec<u8>, Complex64> = BTreeMap::new();
            let mut norm_in = 1.0;
            for &mi in modes {
                norm_in *= factorial(state.occ(mi));
            }
            partial.insert(vec![0; m], amp / norm_in.sqrt());
            for (i, &mi) in modes.iter().enumerate() {
                for _photon in 0..state.occ(mi) {
                    let mut next: BTreeMap<Vec<u8>, Complex64> = BTreeMap::new();
                    for (occ, &coeff) in &partial {
                        for j in 0..m {
                            let w = u[(j, i)];
                            if w == Complex64::ZERO {
                                continue;
                            }
                            let mut occ2 = occ.clone();
                            occ2[j] += 1;
                            *next.entry(occ2).or_insert(Complex64::ZERO) += coeff * w;
                        }
                    }
                    partial = next;
                }
            }
            for (occ, coeff) in partial {
                let mut norm_out = 1.0;
                for &n in &occ {
                    norm_out *= factorial(n);
                }
                let mut full = state.clone();
                for (j, &mj) in modes.iter().enumerate() {
                    full = full.with_occ(mj, occ[j]);
                }
                *out.entry(full).or_insert(Complex64::ZERO) += coeff * norm_out.sqrt();
            }
        }
        let mut result = StateVector {
            registry: Arc::clone(&self.registry),
            amps: out,
            tolerance: self.tolerance,
            photon_cap: self.photon_cap,
        };
        result.prune();
        Ok(result)
    }

    /// Keeps only basis states satisfying the predicate. The result is not
    /// renormalized; its squared norm is the selection probability.
    pub fn project<F: Fn(&FockState) -> bool>(&self, keep: F) -> StateVector {
        let mut out = self.clone();
        out.amps.retain(|s, _| keep(s));
        out
    }

    /// Rebuilds the state on an extended registry whose first modes coincide
    /// with the current ones; new modes start unoccupied.
    pub fn extend_registry(&self, registry: Arc<ModeRegistry>) -> Result<StateVector> {
        if registry.len() < self.registry.len() {
            return Err(Error::InvalidArgument("extended registry is smaller".into()));
        }
        for i in 0..self.registry.len() {
            if registry.label(i) != self.registry.label(i) {
                return Err(Error::InvalidArgument(
                    "extended registry must preserve existing modes".into(),
                ));
            }
        }
        let extra = registry.len() - self.registry.len();
        let mut amps = BTreeMap::new();
        for (state, &amp) in &self.amps {
            let mut occ = state.occupations().to_vec();
            occ.extend(core::iter::repeat(0).take(extra));
            amps.insert(FockState::new(occ), amp);
        }
        Ok(StateVector {
            registry,
            amps,
            tolerance: self.tolerance,
            photon_cap: self.photon_cap,
        })
    }
}
