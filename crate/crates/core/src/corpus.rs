//! Named example structures used by the tests, the acceptance suite and the
//! `corpus` command.

use crate::ibp0::{rotate_finite, Algebra, Factor, FiniteMtl};
use crate::lmonoid::FiniteLMonoid;
use crate::semihoop::FiniteSemihoop;

pub fn trivial_monoid() -> FiniteLMonoid {
    FiniteLMonoid::from_fns(1, |_, _| 0, |_, _| 0, |_, _| 0, 0)
}

/// `{1, a}` with `a + a = a` and `a < 1`; index 0 is the unit `1`.
pub fn idempotent_pair() -> FiniteLMonoid {
    FiniteLMonoid::from_fns(2, |x, y| x.max(y), |x, y| x.max(y), |x, y| x.min(y), 0)
}

/// `{0, ..., k}` under addition capped at `k`, ordered as numbers.
pub fn truncated_sum(k: usize) -> FiniteLMonoid {
    FiniteLMonoid::from_fns(k + 1, |x, y| (x + y).min(k), |x, y| x.min(y), |x, y| x.max(y), 0)
}

/// The chain `{0, ..., n-1}` with `max` as the monoid operation.
pub fn max_chain(n: usize) -> FiniteLMonoid {
    FiniteLMonoid::from_fns(n, |x, y| x.max(y), |x, y| x.min(y), |x, y| x.max(y), 0)
}

/// Finite ℓ-monoids of size at most 4.
pub fn lmonoid_corpus() -> Vec<(String, FiniteLMonoid)> {
    let mut out = vec![
        ("trivial".to_string(), trivial_monoid()),
        ("idempotent2".to_string(), idempotent_pair()),
        ("idempotent2_squared".to_string(), idempotent_pair().product(&idempotent_pair())),
        ("truncated2_squared".to_string(), truncated_sum(1).product(&truncated_sum(1))),
    ];
    for k in 1..=3 {
        out.push((format!("truncated{}", k + 1), truncated_sum(k)));
    }
    for n in 2..=4 {
        out.push((format!("max_chain{n}"), max_chain(n)));
    }
    for (name, hoop) in semihoop_corpus() {
        if hoop.size() <= 4 {
            out.push((format!("{name}_reduct"), hoop.monoid_reduct()));
        }
    }
    out
}

/// The Gödel chain `{0, ..., n-1}`: `x·y = min`, `x → y = 1` if `x <= y` else `y`.
pub fn goedel_hoop(n: usize) -> FiniteSemihoop {
    let top = n - 1;
    FiniteSemihoop::from_fns(
        n,
        |x, y| x.min(y),
        |x, y| if x <= y { top } else { y },
        |x, y| x.min(y),
        top,
    )
}

/// The Łukasiewicz chain `{0, 1/(n-1), ..., 1}` as a hoop, scaled to integers.
pub fn lukasiewicz_hoop(n: usize) -> FiniteSemihoop {
    let top = n - 1;
    FiniteSemihoop::from_fns(
        n,
        |x, y| (x + y).saturating_sub(top),
        |x, y| (top + y - x).min(top),
        |x, y| x.min(y),
        top,
    )
}

/// Finite prelinear semihoops of sizes 1 to 6.
pub fn semihoop_corpus() -> Vec<(String, FiniteSemihoop)> {
    let mut out = Vec::new();
    for n in 1..=6 {
        out.push((format!("goedel{n}"), goedel_hoop(n)));
    }
    for n in 2..=6 {
        out.push((format!("lukasiewicz{n}"), lukasiewicz_hoop(n)));
    }
    out.push(("goedel2_x_goedel2".to_string(), goedel_hoop(2).product(&goedel_hoop(2))));
    out.push(("goedel2_x_goedel3".to_string(), goedel_hoop(2).product(&goedel_hoop(3))));
    out.push(("goedel2_x_lukasiewicz3".to_string(), goedel_hoop(2).product(&lukasiewicz_hoop(3))));
    out.push(("lukasiewicz2_x_lukasiewicz2".to_string(), lukasiewicz_hoop(2).product(&lukasiewicz_hoop(2))));
    out
}

/// The Boolean algebra of subsets of an `atoms`-element set, by bitmask.
pub fn boolean(atoms: u32) -> FiniteMtl {
    let size = 1usize << atoms;
    let full = size - 1;
    FiniteMtl::from_fns(size, |x, y| x & y, |x, y| (!x & full) | y, |x, y| x & y, |x, y| x | y, 0, full)
}

/// The Łukasiewicz chain with `n` elements, an MV-algebra.
pub fn lukasiewicz_chain(n: usize) -> FiniteMtl {
    let top = n - 1;
    FiniteMtl::from_fns(
        n,
        |x, y| (x + y).saturating_sub(top),
        |x, y| (top + y - x).min(top),
        |x, y| x.min(y),
        |x, y| x.max(y),
        0,
        top,
    )
}

/// The rotation of the `n`-element Gödel chain.
pub fn rot_goedel(n: usize) -> FiniteMtl {
    rotate_finite(&goedel_hoop(n)).expect("rotations of Gödel chains are IBP0-algebras")
}

pub fn finite(m: FiniteMtl) -> Algebra {
    Algebra::single(Factor::Finite(m))
}

pub fn chang_factor(rank: usize) -> Factor {
    Factor::perfect(rank)
}

/// The rotation of the cone hoop of the given rank.
pub fn chang(rank: usize) -> Algebra {
    Algebra::single(chang_factor(rank))
}

/// The base IBP₀-algebras.
pub fn ibp0_bases() -> Vec<(String, Algebra)> {
    vec![
        ("boolean2".to_string(), finite(boolean(1))),
        ("boolean4".to_string(), finite(boolean(2))),
        ("boolean8".to_string(), finite(boolean(3))),
        ("rot_goedel3".to_string(), finite(rot_goedel(3))),
        ("rot_goedel4".to_string(), finite(rot_goedel(4))),
        ("chang1".to_string(), chang(1)),
        ("chang2".to_string(), chang(2)),
    ]
}

/// The base algebras followed by all their pairwise products.
pub fn ibp0_corpus() -> Vec<(String, Algebra)> {
    let bases = ibp0_bases();
    let mut out = bases.clone();
    for (i, (left_name, left)) in bases.iter().enumerate() {
        for (right_name, right) in &bases[i..] {
            out.push((format!("{left_name}_x_{right_name}"), left.product(right)));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lmonoid::validate_lmonoid;
    use crate::scan::Window;
    use crate::semihoop::validate_semihoop;

    #[test]
    fn corpus_members_are_valid() {
        for (name, m) in lmonoid_corpus() {
            assert!(m.size() <= 4, "{name}");
            let report = validate_lmonoid(&m);
            assert!(report.is_valid(), "{name}: {:?}", report.first_failure());
        }
        for (name, h) in semihoop_corpus() {
            assert!((1..=6).contains(&h.size()), "{name}");
            let report = validate_semihoop(&h, &Window::default());
            assert!(report.is_valid(), "{name}: {:?}", report.first_failure());
            assert_eq!(report.get_flag("prelinear"), Some(true), "{name}");
        }
    }

    #[test]
    fn corpus_sizes() {
        assert_eq!(boolean(3).size(), 8);
        assert_eq!(rot_goedel(4).size(), 8);
        assert_eq!(ibp0_corpus().len(), 7 + 28);
    }
}
