//! Synthetic modules of adjustable size for the benchmarks.

use std::fmt::Write;

fn succ_n(k: usize, inner: &str) -> String {
    let mut t = inner.to_string();
    for _ in 0..k {
        t = format!("S ({t})");
    }
    t
}

/// Peano addition plus `lemmas` lemmas `plus (S^k Z) Z .=. S^k Z`, each
/// proved by `k + 1` unfoldings of `plus`.
pub fn peano_module(lemmas: usize) -> String {
    let mut src = String::from(
        "data N = Z | S N\nplus :: N -> N -> N\nplus Z y = y\nplus (S x) y = S (plus x y)\n",
    );
    for k in 1..=lemmas {
        let _ = writeln!(
            src,
            "\nLemma l{k}: plus ({}) Z .=. {}",
            succ_n(k, "Z"),
            succ_n(k, "Z")
        );
        let _ = writeln!(src, "Proof by rewriting\n  plus ({}) Z", succ_n(k, "Z"));
        for i in 1..=k {
            let inner = format!("plus ({}) Z", succ_n(k - i, "Z"));
            let _ = writeln!(src, "  (by def plus) .=. {}", succ_n(i, &inner));
        }
        let _ = writeln!(src, "  (by def plus) .=. {}\nQED", succ_n(k, "Z"));
    }
    src
}

/// A right-nested term `plus Z (plus Z (... Z))` with `depth` applications.
pub fn deep_term(depth: usize) -> String {
    let mut t = "Z".to_string();
    for _ in 0..depth {
        t = format!("plus Z ({t})");
    }
    t
}
