//! Byte-exact golden outputs. Regenerate with `SINGLAB_BLESS=1`.

use std::path::PathBuf;

use singlab::discriminant::{exact_discriminant_1d, slice_sample, SlicePlane};
use singlab::kernel::{rational, Budget};
use singlab::milnor::unfold_expr;
use singlab::morselab::MorseConfig;

fn golden(name: &str, actual: &str) {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name);
    if std::env::var_os("SINGLAB_BLESS").is_some() {
        std::fs::write(&path, actual).unwrap();
    }
    let want = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    assert!(want == actual, "{name} differs from the golden file");
}

fn a2_discriminant_text() -> String {
    let u = unfold_expr("z^3", &Budget::default()).unwrap();
    format!("{}\n", exact_discriminant_1d(&u).unwrap().poly)
}

fn a3_slice_svg() -> String {
    let u = unfold_expr("z^4", &Budget::default()).unwrap();
    let plane = SlicePlane {
        axis: 1,
        fixed: vec![rational(0, 1), rational(0, 1)],
        lambda: (rational(-3, 2), rational(1, 2)),
        t: (rational(-2, 1), rational(1, 1)),
    };
    slice_sample(&u, &plane, 24, &MorseConfig::default()).unwrap().to_svg()
}

#[test]
fn a2_discriminant() {
    golden("a2_discriminant.txt", &a2_discriminant_text());
}

#[test]
fn a3_slice() {
    golden("a3_slice.svg", &a3_slice_svg());
}
