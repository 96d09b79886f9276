//! The named built-in corpus shipped with the CLI: the library's example
//! groups together with their standard legal extensions.

use vfree::corpus as base;
use vfree::gog::GraphOfGroups;
use vfree::legal::{apply_legal_large, legal_large_candidates};

/// First legal large extension of `g` (panics if none exists; only used on
/// corpus groups where one is known to exist).
fn first_large_extension(g: &GraphOfGroups) -> GraphOfGroups {
    let steps = legal_large_candidates(g).expect("non-elementary corpus group");
    apply_legal_large(g, &steps[0]).expect("candidate step applies")
}

/// All built-in corpus entries as (name, graph) pairs, in a fixed order.
pub fn entries() -> Vec<(&'static str, GraphOfGroups)> {
    let psl2z = base::psl2z();
    let sl2z = base::sl2z();
    let f2z2 = base::f2_times_z2();
    let z4f2 = base::zn_times_f2(4);
    vec![
        ("trivial", base::trivial_gog()),
        ("psl2z", psl2z.clone()),
        ("psl2z-star-z", first_large_extension(&psl2z)),
        ("sl2z", sl2z.clone()),
        ("sl2z-ext", first_large_extension(&sl2z)),
        ("f2-x-z2", f2z2.clone()),
        ("f2-x-z2-ext", first_large_extension(&f2z2)),
        ("f2-x-z2-star-z", base::f2_times_z2_star_z()),
        ("z4-x-f2", z4f2.clone()),
        ("z4-x-f2-ext", first_large_extension(&z4f2)),
        ("n25x6", base::zn_by_z(25, 6)),
        ("n25x11", base::zn_by_z(25, 11)),
        ("d-infinity", base::d_infinity()),
    ]
}
