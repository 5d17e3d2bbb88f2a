//! Fuzzes both experiment-config decoders (JSON and TOML). Accepted configs
//! must validate and survive a serialization round trip.

#![no_main]

use ergavg::lab::ExperimentConfig;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    for parsed in [
        ExperimentConfig::from_json_str(text),
        ExperimentConfig::from_toml_str(text),
        ExperimentConfig::from_str_any(text),
    ] {
        if let Ok(cfg) = parsed {
            cfg.validate().unwrap();
            let again = ExperimentConfig::from_json_str(&cfg.to_json_string()).unwrap();
            assert_eq!(again, cfg);
            let again = ExperimentConfig::from_toml_str(&cfg.to_toml_string()).unwrap();
            assert_eq!(again, cfg);
        }
    }
});
