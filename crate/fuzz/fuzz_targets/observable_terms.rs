#![no_main]

use esd_core::observables::{parse_observable, parse_pauli_terms};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(terms) = parse_pauli_terms(text) {
        assert!(!terms.is_empty());
        let n = terms.keys().next().unwrap().n_qubits();
        assert!(terms.keys().all(|p| p.n_qubits() == n));
        assert!(terms.values().all(|c| c.is_finite()));
        // Sums of finite coefficients can still overflow to infinity.
        if let Ok(obs) = parse_observable(text) {
            assert_eq!(obs.dim(), 1 << n);
        }
    }
});
