//! Small reference systems used throughout the tests, benches and docs.

use crate::ars::Ars;

/// `a ⇄ b` via `phi1`/`phi3`, with exits `a -phi2-> c` and `b -phi4-> d`.
pub fn a_lc() -> Ars {
    Ars::new(
        &["a", "b", "c", "d"],
        &["phi1", "phi2", "phi3", "phi4"],
        &[("a", "phi1", "b"), ("a", "phi2", "c"), ("b", "phi3", "a"), ("b", "phi4", "d")],
    )
    .expect("valid system")
}

/// One object with two distinct self-loops.
pub fn a_c() -> Ars {
    Ars::new(&["a"], &["phi1", "phi2"], &[("a", "phi1", "a"), ("a", "phi2", "a")]).expect("valid system")
}

/// Two objects looping into each other.
pub fn a_loop() -> Ars {
    Ars::new(&["a", "b"], &["phi1", "phi2"], &[("a", "phi1", "b"), ("b", "phi2", "a")]).expect("valid system")
}

/// `a` loops to itself or exits to `b`.
pub fn eventual() -> Ars {
    Ars::new(&["a", "b"], &["loop", "exit"], &[("a", "loop", "a"), ("a", "exit", "b")]).expect("valid system")
}

/// Hub `a` with two spokes `b1`, `b2`, each returning to `a`.
pub fn two_loops() -> Ars {
    Ars::new(
        &["a", "b1", "b2"],
        &["phi1", "phi2", "beta1", "beta2"],
        &[("a", "phi1", "b1"), ("a", "phi2", "b2"), ("b1", "beta1", "a"), ("b2", "beta2", "a")],
    )
    .expect("valid system")
}

/// The truncation `a0 -phi0-> a1 -> ... -> aN` of the infinite chain.
pub fn chain(n: usize) -> Ars {
    let objects: Vec<String> = (0..=n).map(|i| format!("a{i}")).collect();
    let labels: Vec<String> = (0..n).map(|i| format!("phi{i}")).collect();
    let steps: Vec<(String, String, String)> = (0..n)
        .map(|i| (objects[i].clone(), labels[i].clone(), objects[i + 1].clone()))
        .collect();
    Ars::new(&objects, &labels, &steps).expect("valid system")
}
