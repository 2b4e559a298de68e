#![no_main]

use fracinfo_cli::parse::{parse_config, CONFIG_KEYS};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(map) = parse_config(text) {
        for (k, v) in &map {
            assert!(CONFIG_KEYS.contains(&k.as_str()));
            assert!(!v.is_empty() && !v.contains('#'));
        }
        // resolving arbitrary values must fail cleanly, never panic
        let _ = fracinfo_cli::resolve(&map, &Default::default());
    }
});
