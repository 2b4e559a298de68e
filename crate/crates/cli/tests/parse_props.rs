use std::fs;
use std::path::Path;

use fracinfo_cli::parse::{parse_config, parse_index_list, parse_list, CONFIG_KEYS, MAX_LIST_LEN};
use proptest::prelude::*;

fn check_list(text: &str) {
    if let Ok(values) = parse_list(text) {
        assert!(!values.is_empty() && values.len() <= MAX_LIST_LEN);
        assert!(values.iter().all(|v| v.is_finite()));
    }
    let _ = parse_index_list(text);
}

fn check_config(text: &str) {
    if let Ok(map) = parse_config(text) {
        for (k, v) in &map {
            assert!(CONFIG_KEYS.contains(&k.as_str()));
            assert!(!v.is_empty() && !v.contains('#'));
        }
        let _ = fracinfo_cli::resolve(&map, &Default::default());
    }
}

#[test]
fn fuzz_seeds_replay() {
    let root = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fuzz/corpus");
    for (target, check) in [("parse_list", check_list as fn(&str)), ("parse_config", check_config)] {
        let mut seen = 0;
        for entry in fs::read_dir(root.join(target)).unwrap() {
            check(&fs::read_to_string(entry.unwrap().path()).unwrap());
            seen += 1;
        }
        assert!(seen > 0, "{target} has no seeds");
    }
}

proptest! {
    #[test]
    fn arbitrary_text_never_panics(s in "[0-9eE.,:+ \\-a-z]{0,40}") {
        check_list(&s);
    }

    #[test]
    fn arbitrary_config_never_panics(s in "[a-z\\-=#.,:0-9 \\n]{0,80}") {
        check_config(&s);
    }

    #[test]
    fn ranges_are_inclusive(start in -50i32..50, steps in 0usize..200, step_milli in 1u32..2000) {
        let step = step_milli as f64 / 1000.0;
        let a = start as f64 / 10.0;
        let b = a + steps as f64 * step;
        let v = parse_list(&format!("{a}:{b}:{step}")).unwrap();
        prop_assert_eq!(v.len(), steps + 1);
        prop_assert!((v[0] - a).abs() < 1e-12);
        prop_assert!((v[steps] - b).abs() < 1e-9);
        prop_assert!(v.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn lists_round_trip(values in prop::collection::vec(-1e6f64..1e6, 1..20)) {
        let text = values.iter().map(|v| format!("{v:.6}")).collect::<Vec<_>>().join(",");
        let parsed = parse_list(&text).unwrap();
        prop_assert_eq!(parsed.len(), values.len());
        for (p, v) in parsed.iter().zip(&values) {
            prop_assert!((p - v).abs() < 1e-6);
        }
    }

    #[test]
    fn config_keys_round_trip(idx in prop::collection::btree_set(0usize..10, 0..10), value in "[a-z0-9.]{1,8}") {
        let text: String = idx.iter().map(|&i| format!("{} = {value}  # note\n", CONFIG_KEYS[i])).collect();
        let map = parse_config(&text).unwrap();
        prop_assert_eq!(map.len(), idx.len());
        for &i in &idx {
            prop_assert_eq!(&map[CONFIG_KEYS[i]], &value);
        }
    }
}
