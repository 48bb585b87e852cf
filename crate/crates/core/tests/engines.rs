//! Cross-validation of the two amplitude engines on random circuits.
//!
//! The creation-operator expansion and the permanent formula are
//! independent derivations of the same physics; they must agree to high
//! precision on arbitrary unitaries and occupation states.

use std::sync::Arc;

use lqc_core::fock::{FockState, ModeRegistry, StateVector};
use lqc_core::matrix::CMatrix;
use lqc_core::permanent::transition_amplitude;
use num_complex::Complex64;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

fn random_unitary(rng: &mut ChaCha8Rng, m: usize) -> CMatrix {
    // Gram-Schmidt on a complex Gaussian matrix.
    let mut cols: Vec<Vec<Complex64>> = Vec::with_capacity(m);
    for _ in 0..m {
        loop {
            let mut v: Vec<Complex64> = (0..m)
                .map(|_| {
                    Complex64::new(rng.sample(rand_distr::StandardNormal), rng.sample(rand_distr::StandardNormal))
                })
                .collect();
            for prev in &cols {
                let overlap: Complex64 =
                    prev.iter().zip(v.iter()).map(|(p, x)| p.conj() * x).sum();
                for (x, p) in v.iter_mut().zip(prev.iter()) {
                    *x -= overlap * p;
                }
            }
            let norm: f64 = v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
            if norm > 1e-6 {
                for x in v.iter_mut() {
                    *x /= norm;
                }
                cols.push(v);
                break;
            }
        }
    }
    let mut u = CMatrix::zeros(m, m);
    for (j, col) in cols.iter().enumerate() {
        for (i, &x) in col.iter().enumerate() {
            u[(i, j)] = x;
        }
    }
    u
}

fn random_occupation(rng: &mut ChaCha8Rng, m: usize, photons: u32) -> Vec<u8> {
    let mut occ = vec![0u8; m];
    for _ in 0..photons {
        occ[rng.gen_range(0..m)] += 1;
    }
    occ
}

fn aux_registry(m: usize) -> Arc<ModeRegistry> {
    let mut reg = ModeRegistry::new();
    for i in 0..m {
        reg.add_aux_mode(&format!("m{i}")).unwrap();
    }
    Arc::new(reg)
}

#[test]
fn expansion_and_permanent_agree_on_random_triples() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x10c0_51f7);
    let mut checked = 0usize;
    while checked < 1000 {
        let m = rng.gen_range(1..=6usize);
        let photons = rng.gen_range(0..=4u32).min(m as u32 + 2);
        let u = random_unitary(&mut rng, m);
        let input_occ = random_occupation(&mut rng, m, photons);
        let output_occ = random_occupation(&mut rng, m, photons);

        let registry = aux_registry(m);
        let modes: Vec<usize> = (0..m).collect();
        let input = StateVector::basis(Arc::clone(&registry), input_occ.clone()).unwrap();
        let evolved = input.apply_mode_unitary(&u, &modes).unwrap();
        let from_expansion = evolved.amplitude(&FockState::new(output_occ.clone()));

        let from_permanent = transition_amplitude(
            &FockState::new(input_occ),
            &FockState::new(output_occ),
            &u,
        )
        .unwrap();

        let diff = (from_expansion - from_permanent).norm();
        assert!(
            diff < 1e-10,
            "engines disagree by {diff} on a {m}-mode, {photons}-photon case"
        );
        checked += 1;
    }
}

#[test]
fn engines_agree_on_photon_rich_small_interferometers() {
    // Push the photon number to the cap on few modes, where the factorial
    // normalizations matter most.
    let mut rng = ChaCha8Rng::seed_from_u64(0xbead);
    for _ in 0..50 {
        let m = rng.gen_range(2..=3usize);
        let photons = rng.gen_range(4..=6u32);
        let u = random_unitary(&mut rng, m);
        let input_occ = random_occupation(&mut rng, m, photons);
        let output_occ = random_occupation(&mut rng, m, photons);
        let registry = aux_registry(m);
        let modes: Vec<usize> = (0..m).collect();
        let input = StateVector::basis(Arc::clone(&registry), input_occ.clone()).unwrap();
        let evolved = input.apply_mode_unitary(&u, &modes).unwrap();
        let a = evolved.amplitude(&FockState::new(output_occ.clone()));
        let b = transition_amplitude(&FockState::new(input_occ), &FockState::new(output_occ), &u)
            .unwrap();
        assert!((a - b).norm() < 1e-10);
    }
}

#[test]
fn applying_u_then_v_equals_applying_their_product() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xc0ffee);
    for _ in 0..40 {
        let m = rng.gen_range(2..=4usize);
        let u = random_unitary(&mut rng, m);
        let v = random_unitary(&mut rng, m);
        let occ = random_occupation(&mut rng, m, rng.gen_range(1..=3u32));
        let registry = aux_registry(m);
        let modes: Vec<usize> = (0..m).collect();
        let s = StateVector::basis(Arc::clone(&registry), occ).unwrap();
        let stepped = s
            .apply_mode_unitary(&u, &modes)
            .unwrap()
            .apply_mode_unitary(&v, &modes)
            .unwrap();
        let direct = s.apply_mode_unitary(&v.mul(&u), &modes).unwrap();
        for (state, amp) in direct.terms() {
            assert!((stepped.amplitude(state) - amp).norm() < 1e-10);
        }
        for (state, amp) in stepped.terms() {
            assert!((direct.amplitude(state) - amp).norm() < 1e-10);
        }
    }
}

#[test]
fn norm_is_preserved_by_random_unitaries() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    for _ in 0..60 {
        let m = rng.gen_range(1..=6usize);
        let u = random_unitary(&mut rng, m);
        let occ = random_occupation(&mut rng, m, rng.gen_range(0..=4u32));
        let registry = aux_registry(m);
        let modes: Vec<usize> = (0..m).collect();
        let s = StateVector::basis(Arc::clone(&registry), occ).unwrap();
        let evolved = s.apply_mode_unitary(&u, &modes).unwrap();
        assert!((evolved.norm() - 1.0).abs() < 1e-10);
        assert_eq!(s.total_photons(), evolved.total_photons());
    }
}

#[test]
fn whole_gate_circuits_agree_between_engines() {
    // Compose a built gate's elements into one big unitary and compare the
    // permanent route against the sequential expansion route, herald terms
    // included.
    use lqc_core::elements::{apply_elements, compose_unitary};
    use lqc_core::gates::build_coincidence_csign;

    let bp = build_coincidence_csign().unwrap();
    let n = bp.registry.len();
    let u = compose_unitary(&bp.elements, n).unwrap();
    let mut occ = vec![0u8; n];
    occ[bp.control.v] = 1;
    occ[bp.target.v] = 1;
    let input = StateVector::basis(Arc::clone(&bp.registry), occ.clone()).unwrap();
    let evolved = apply_elements(&input, &bp.elements).unwrap();
    let input_state = FockState::new(occ);
    for (state, amp) in evolved.terms() {
        let p = transition_amplitude(&input_state, state, &u).unwrap();
        assert!((amp - p).norm() < 1e-10);
    }
}
