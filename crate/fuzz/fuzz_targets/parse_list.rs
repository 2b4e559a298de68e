#![no_main]

use fracinfo_cli::parse::{parse_index_list, parse_list, MAX_LIST_LEN};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(values) = parse_list(text) {
        assert!(!values.is_empty() && values.len() <= MAX_LIST_LEN);
        assert!(values.iter().all(|v| v.is_finite()));
    }
    if let Ok(ns) = parse_index_list(text) {
        assert!(!ns.is_empty());
    }
});
