#![no_main]

use libfuzzer_sys::fuzz_target;
use nuwalk::config::{Format, Mode};
use nuwalk::walk::encoding_table;
use nuwalk::{Encoding, Flavor};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let _ = text.parse::<Flavor>();
    let _ = text.parse::<Encoding>();
    let _ = text.parse::<Mode>();
    let _ = text.parse::<Format>();
    if let Ok(table) = encoding_table(text) {
        for label in table.labels {
            assert!(table.zeta_of(label).is_some());
        }
    }
    for encoding in Encoding::ALL {
        let _ = encoding_table(encoding.name()).map(|t| t.zeta_of(text));
    }
});
