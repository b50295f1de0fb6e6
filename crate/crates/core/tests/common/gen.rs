//! Random inputs for the property suites.

use proptest::prelude::*;

/// Smooth expressions in `x` and `y`, finite with moderate derivatives on
/// `[-1, 1]^2`. Logs and square roots only see arguments bounded below by 1.
pub fn smooth_expr() -> BoxedStrategy<String> {
    let leaf = prop_oneof![
        Just("x".to_string()),
        Just("y".to_string()),
        (-3i32..=3).prop_map(|k| format!("({k})")),
        (1i32..=4, 2i32..=5).prop_map(|(a, b)| format!("({a}/{b})")),
    ];
    leaf.prop_recursive(3, 24, 3, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| format!("({a} + {b})")),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| format!("({a} - {b})")),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| format!("({a})*({b})/2")),
            (inner.clone(), 2u32..=3).prop_map(|(a, k)| format!("(({a})/2)^{k}")),
            inner.clone().prop_map(|a| format!("exp(({a})/4)")),
            inner.clone().prop_map(|a| format!("log(1 + ({a})^2)")),
            inner.clone().prop_map(|a| format!("sqrt(1 + ({a})^2)")),
            inner.clone().prop_map(|a| format!("sin({a})")),
            inner.clone().prop_map(|a| format!("cos({a})")),
            (inner.clone(), inner).prop_map(|(a, b)| format!("({a})/(2 + ({b})^2)")),
        ]
    })
    .boxed()
}

/// Rational functions in `x` and `y` whose denominators never vanish.
pub fn rational_expr() -> BoxedStrategy<String> {
    let leaf = prop_oneof![
        Just("x".to_string()),
        Just("y".to_string()),
        (-9i32..=9).prop_map(|k| format!("({k})")),
        (-7i32..=7, 2i32..=9).prop_map(|(a, b)| format!("({a}/{b})")),
    ];
    leaf.prop_recursive(4, 32, 3, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| format!("({a} + {b})")),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| format!("({a} - {b})")),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| format!("({a})*({b})")),
            (inner.clone(), 0u32..=4).prop_map(|(a, k)| format!("({a})^{k}")),
            (inner.clone(), inner).prop_map(|(a, b)| format!("({a})/(1 + ({b})^2)")),
        ]
    })
    .boxed()
}

/// `c * prod (x - r_i)` times an optional irreducible quadratic, as text.
pub fn factorable_poly() -> BoxedStrategy<String> {
    let root = (-6i32..=6, 1i32..=3).prop_map(|(a, b)| format!("(x - ({a}/{b}))"));
    (
        prop::collection::vec(root, 1..=5),
        -5i32..=5,
        prop::bool::ANY,
    )
        .prop_filter("nonzero lead", |(_, c, _)| *c != 0)
        .prop_map(|(roots, c, quad)| {
            let mut s = format!("({c})*{}", roots.join("*"));
            if quad {
                s.push_str("*(x^2 + 1)");
            }
            s
        })
        .boxed()
}

/// Products of one to three linear forms in `x` and `y` with small integer
/// coefficients, each raised to a power of 1 or 2.
pub fn linear_form_product() -> BoxedStrategy<String> {
    let form = (-3i32..=3, -3i32..=3, -4i32..=4, 1u32..=2)
        .prop_filter("not constant", |(a, b, _, _)| (*a, *b) != (0, 0))
        .prop_map(|(a, b, c, k)| format!("(({a})*x + ({b})*y + ({c}))^{k}"));
    (prop::collection::vec(form, 1..=3), 1i32..=6)
        .prop_map(|(forms, c)| format!("({c})*{}", forms.join("*")))
        .boxed()
}

/// Square integer matrices of size 1 to 5 with entries in `[-9, 9]`.
pub fn int_matrix() -> BoxedStrategy<Vec<Vec<i64>>> {
    (1usize..=5)
        .prop_flat_map(|n| prop::collection::vec(prop::collection::vec(-9i64..=9, n), n))
        .boxed()
}

/// A polynomial body in `i` of degree at most 4 with rational coefficients,
/// and summation bounds `lo <= hi + 1` within `[-50, 50]`.
pub fn sum_case() -> BoxedStrategy<(Vec<(i64, i64)>, i64, i64)> {
    (
        prop::collection::vec((-20i64..=20, 1i64..=6), 1..=5),
        -50i64..=50,
        -50i64..=50,
    )
        .prop_map(|(c, a, b)| (c, a.min(b + 1), a.max(b)))
        .boxed()
}

/// A square integer system `A x = b` with `n` in 1 to 4.
pub fn linear_system() -> BoxedStrategy<(Vec<Vec<i64>>, Vec<i64>)> {
    (1usize..=4)
        .prop_flat_map(|n| {
            (prop::collection::vec(prop::collection::vec(-6i64..=6, n), n), prop::collection::vec(-9i64..=9, n))
        })
        .boxed()
}
