use num_complex::Complex64;
use num_traits::Zero;
use proptest::prelude::*;

use torus_zeros::poly::bigint_to_f64;
use torus_zeros::resultant::{resultant_univariate, UnivariateIntPoly};
use torus_zeros::solver::roots_univariate;

fn poly(deg: usize) -> impl Strategy<Value = UnivariateIntPoly> {
    (prop::collection::vec(-6i64..=6, deg), prop_oneof![1i64..=6, -6i64..=-1]).prop_map(|(mut c, lead)| {
        c.push(lead);
        UnivariateIntPoly::from_i64(&c)
    })
}

fn eval(p: &UnivariateIntPoly, z: Complex64) -> Complex64 {
    p.coeffs()
        .iter()
        .rev()
        .fold(Complex64::zero(), |acc, c| acc * z + bigint_to_f64(c))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn resultant_matches_product_over_roots(
        (f, g) in (1usize..=12, 0usize..=12).prop_flat_map(|(df, dg)| (poly(df), poly(dg)))
    ) {
        let res = resultant_univariate(&f, &g).unwrap();
        let roots = roots_univariate(&f).unwrap();
        prop_assume!(roots.all_converged());
        let dg = g.degree().unwrap() as i32;
        let lc = bigint_to_f64(f.leading().unwrap()).abs();
        // Sum of logs keeps the product in range.
        let log_numeric = dg as f64 * lc.ln() + roots.roots.iter().map(|&a| eval(&g, a).norm().ln()).sum::<f64>();
        if res.is_zero() {
            prop_assert!(log_numeric < -10.0, "exact zero but numeric log {log_numeric}");
        } else {
            let log_exact = bigint_to_f64(&res).abs().ln();
            prop_assert!(
                (log_numeric - log_exact).abs() <= 1e-6_f64.ln_1p(),
                "log|Res| exact {log_exact} numeric {log_numeric}"
            );
        }
    }
}
