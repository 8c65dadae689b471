#![no_main]

use libfuzzer_sys::fuzz_target;
use nuwalk::config::{parse_config_with, Mode, Overrides};

// Parses with the mode forced to map-params, then resolves the walk angles,
// which runs the physical mapping or the splitting bisection.
fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let overrides = Overrides {
        mode: Some(Mode::MapParams),
        steps: Some(4500),
        ..Overrides::default()
    };
    if let Ok(config) = parse_config_with(text, &overrides) {
        if let Ok((walk, _)) = config.walk_params() {
            let _ = nuwalk::step_frequencies(&walk);
        }
    }
});
