//! Attribute co-occurrence statistics over the bundled census.
//!
//! The census bundles a 200-sequence flag assignment whose pairwise
//! counts reproduce a reference 11×11 co-occurrence table exactly; the
//! loader re-verifies that on every call. Background clutter is set on
//! every sequence, so it would add a constant row and is excluded from
//! the table. Run with `cargo run --example co_occurrence`.

use camobench::dataset::{co_occurrence, Attribute};
use camobench::harness::{attribute_fixture, published_cooccurrence};

fn main() {
    let census = attribute_fixture().expect("bundled census verifies at load");
    println!("census: {} sequences\n", census.len());

    let matrix = co_occurrence(&census);
    print!("{}", matrix.to_csv());

    // The diagonal is the per-attribute sequence count; off-diagonal
    // entries count sequences carrying both attributes, symmetrically.
    assert!(matrix.is_symmetric());
    println!(
        "\nmotion blur total: {} sequences",
        matrix.get(Attribute::MB, Attribute::MB)
    );
    println!(
        "deformation ∩ motion blur: {}",
        matrix.get(Attribute::DEF, Attribute::MB)
    );

    // Every entry matches the reference table (the loader already checked
    // this; shown here because it is the fixture's defining property).
    let reference = published_cooccurrence();
    for a in Attribute::CO_OCCURRENCE {
        for b in Attribute::CO_OCCURRENCE {
            assert_eq!(matrix.get(a, b), reference.get(a, b));
        }
    }
    println!("\nall 121 table entries match the reference");
}
