#![no_main]

use esd_core::linalg::PauliString;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(p) = text.parse::<PauliString>() {
        let printed = p.to_string();
        assert_eq!(printed, text);
        assert_eq!(printed.parse::<PauliString>().unwrap(), p);
        let m = p.matrix();
        assert_eq!(m.rows(), 1 << p.n_qubits());
        assert!(m.is_hermitian(0.0));
    }
});
