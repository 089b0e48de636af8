//! Byte-for-byte comparison of the canonical order-6 tables.
//! Regenerate with `UPDATE_GOLDEN=1 cargo test -p cusp-core --test golden`.

use std::path::PathBuf;

use cusp_core::normal_form::{exact_pack, pack_tables};
use cusp_core::pde_series::{extend_b, ProblemData};
use cusp_core::{Radical, Rational, Series2};

fn check(name: &str, text: &str) {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(format!("{name}.txt"));
    if std::env::var_os("UPDATE_GOLDEN").is_some() {
        std::fs::write(&path, text).unwrap();
        return;
    }
    let want = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    assert_eq!(text, want, "{name} drifted from its golden file");
}

#[test]
fn canonical_pack_tables() {
    let (map, pack) = exact_pack(&ProblemData::canonical(), 6).unwrap();
    for (name, text) in pack_tables(&pack) {
        check(name, &text);
    }
    check("xi", &map.xi.to_table());
    let b = extend_b::<Rational>(&ProblemData::canonical(), 6).unwrap().series;
    check("b", &b.to_table());
}

#[test]
fn golden_tables_parse_back() {
    let (_, pack) = exact_pack(&ProblemData::canonical(), 6).unwrap();
    for (name, text) in pack_tables(&pack) {
        if name.starts_with("lambda") || name == "v_of_w" {
            continue;
        }
        let parsed = Series2::<Radical>::from_table(&text).unwrap();
        assert_eq!(parsed.to_table(), text, "{name}");
    }
}
