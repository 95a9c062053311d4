#![no_main]

use esd_cli::{ScenarioConfig, Settings};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(settings) = Settings::parse(text) {
        // Validation must reject or accept without panicking.
        if let Ok(cfg) = ScenarioConfig::try_from(settings) {
            assert!(cfg.molecules >= 1);
            assert!(cfg.rounds != 1);
        }
    }
});
