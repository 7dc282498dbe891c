//! Randomized invariants with fixed seeds.

mod common;

macro_rules! invariant_tests {
    ($($name:ident),* $(,)?) => {
        $(
            #[test]
            fn $name() {
                if let Err(e) = common::$name() {
                    panic!("{e}");
                }
            }
        )*
    };
}

invariant_tests!(
    orthogonal_invariance,
    orthogonal_invariance_sym,
    nonexpansive,
    nonexpansive_sym,
    shrinks_singular_values,
    moments_nonincreasing,
    moments_normalize,
    amse_convex_in_threshold,
);
