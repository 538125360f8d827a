//! Wigner 3-j and 6-j symbols from Racah's closed-form sums.
//!
//! Factorials enter as logarithms from a table built once; each term of the
//! alternating sum is exponentiated separately so nothing overflows for
//! angular momenta in the hundreds.

use std::sync::OnceLock;

use super::{HalfInt, SpecFunError};

const LN_FACTORIAL_TABLE: usize = 4096;

fn ln_factorial_table() -> &'static [f64] {
    static TABLE: OnceLock<Vec<f64>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut table = Vec::with_capacity(LN_FACTORIAL_TABLE);
        table.push(0.0);
        // Kahan-compensated running sum of ln k.
        let mut sum = 0.0f64;
        let mut carry = 0.0f64;
        for k in 1..LN_FACTORIAL_TABLE {
            let y = (k as f64).ln() - carry;
            let t = sum + y;
            carry = (t - sum) - y;
            sum = t;
            table.push(sum);
        }
        table
    })
}

/// `ln(n!)`; `n` must be a non-negative integer below the table size.
pub fn ln_factorial(n: i64) -> Result<f64, SpecFunError> {
    let table = ln_factorial_table();
    usize::try_from(n).ok().and_then(|i| table.get(i).copied()).ok_or(SpecFunError::FactorialOutOfRange(n))
}

fn lnf(twice: i32) -> Result<f64, SpecFunError> {
    debug_assert!(twice % 2 == 0);
    ln_factorial(i64::from(twice / 2))
}

/// Twice-valued triangle test including integer perimeter.
fn triangle(a: i32, b: i32, c: i32) -> bool {
    (a + b + c) % 2 == 0 && c <= a + b && c >= (a - b).abs()
}

/// `ln Δ(abc) = ln[(a+b-c)!(a-b+c)!(-a+b+c)!/(a+b+c+1)!]` on twice-values.
fn ln_triangle_coefficient(a: i32, b: i32, c: i32) -> Result<f64, SpecFunError> {
    Ok(lnf(a + b - c)? + lnf(a - b + c)? + lnf(-a + b + c)? - lnf(a + b + c + 2)?)
}

fn check_j(j: HalfInt) -> Result<(), SpecFunError> {
    if j.twice() < 0 {
        return Err(SpecFunError::NegativeAngularMomentum(j));
    }
    Ok(())
}

fn check_jm(j: HalfInt, m: HalfInt) -> Result<(), SpecFunError> {
    check_j(j)?;
    if (j.twice() + m.twice()) % 2 != 0 {
        return Err(SpecFunError::ProjectionParity { j, m });
    }
    if m.twice().abs() > j.twice() {
        return Err(SpecFunError::ProjectionTooLarge { j, m });
    }
    Ok(())
}

fn parity_sign(twice_exponent: i32) -> f64 {
    debug_assert!(twice_exponent % 2 == 0);
    if (twice_exponent / 2) % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Wigner 3-j symbol `(j1 j2 j3; m1 m2 m3)`.
pub fn wigner_3j(
    j1: HalfInt,
    j2: HalfInt,
    j3: HalfInt,
    m1: HalfInt,
    m2: HalfInt,
    m3: HalfInt,
) -> Result<f64, SpecFunError> {
    check_jm(j1, m1)?;
    check_jm(j2, m2)?;
    check_jm(j3, m3)?;
    let (tj1, tj2, tj3) = (j1.twice(), j2.twice(), j3.twice());
    let (tm1, tm2, tm3) = (m1.twice(), m2.twice(), m3.twice());
    if tm1 + tm2 + tm3 != 0 || !triangle(tj1, tj2, tj3) {
        return Ok(0.0);
    }

    let ln_prefactor = ln_triangle_coefficient(tj1, tj2, tj3)?
        + lnf(tj1 + tm1)?
        + lnf(tj1 - tm1)?
        + lnf(tj2 + tm2)?
        + lnf(tj2 - tm2)?
        + lnf(tj3 + tm3)?
        + lnf(tj3 - tm3)?;
    let half_prefactor = 0.5 * ln_prefactor;

    // Summation bounds in twice units; every bound is even.
    let k_min = 0.max(tj2 - tj3 - tm1).max(tj1 - tj3 + tm2);
    let k_max = (tj1 + tj2 - tj3).min(tj1 - tm1).min(tj2 + tm2);

    let mut sum = 0.0;
    let mut k = k_min;
    while k <= k_max {
        let ln_den = lnf(k)?
            + lnf(tj3 - tj2 + k + tm1)?
            + lnf(tj3 - tj1 + k - tm2)?
            + lnf(tj1 + tj2 - tj3 - k)?
            + lnf(tj1 - k - tm1)?
            + lnf(tj2 - k + tm2)?;
        sum += parity_sign(k) * (half_prefactor - ln_den).exp();
        k += 2;
    }
    Ok(parity_sign(tj1 - tj2 - tm3) * sum)
}

/// Wigner 6-j symbol `{j1 j2 j3; j4 j5 j6}`.
pub fn wigner_6j(
    j1: HalfInt,
    j2: HalfInt,
    j3: HalfInt,
    j4: HalfInt,
    j5: HalfInt,
    j6: HalfInt,
) -> Result<f64, SpecFunError> {
    for j in [j1, j2, j3, j4, j5, j6] {
        check_j(j)?;
    }
    let [t1, t2, t3, t4, t5, t6] = [j1, j2, j3, j4, j5, j6].map(HalfInt::twice);
    let triads = [(t1, t2, t3), (t1, t5, t6), (t4, t2, t6), (t4, t5, t3)];
    if triads.iter().any(|&(a, b, c)| !triangle(a, b, c)) {
        return Ok(0.0);
    }

    let mut ln_prefactor = 0.0;
    for &(a, b, c) in &triads {
        ln_prefactor += ln_triangle_coefficient(a, b, c)?;
    }
    let half_prefactor = 0.5 * ln_prefactor;

    let alphas = triads.map(|(a, b, c)| a + b + c);
    let betas = [t1 + t2 + t4 + t5, t2 + t3 + t5 + t6, t3 + t1 + t6 + t4];
    let t_min = *alphas.iter().max().unwrap();
    let t_max = *betas.iter().min().unwrap();

    let mut sum = 0.0;
    let mut t = t_min;
    while t <= t_max {
        let mut ln_term = half_prefactor + lnf(t + 2)?;
        for a in alphas {
            ln_term -= lnf(t - a)?;
        }
        for b in betas {
            ln_term -= lnf(b - t)?;
        }
        sum += parity_sign(t) * ln_term.exp();
        t += 2;
    }
    Ok(sum)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn h(t: i32) -> HalfInt {
        HalfInt::from_twice(t)
    }

    fn j(v: i32) -> HalfInt {
        HalfInt::int(v)
    }

    #[test]
    fn ln_factorial_small_values_exact() {
        let mut f = 1.0f64;
        for n in 1..=20 {
            f *= n as f64;
            let got = ln_factorial(n).unwrap();
            assert!((got - f.ln()).abs() < 1e-14 * f.ln().max(1.0));
        }
        assert!(ln_factorial(-1).is_err());
    }

    #[test]
    fn three_j_reference_values() {
        let v = wigner_3j(j(1), j(1), j(0), j(0), j(0), j(0)).unwrap();
        assert!((v + 1.0 / 3f64.sqrt()).abs() < 1e-15);
        assert_eq!(wigner_3j(j(1), j(1), j(1), j(1), j(1), j(1)).unwrap(), 0.0);
        assert_eq!(wigner_3j(j(1), j(1), j(3), j(0), j(0), j(0)).unwrap(), 0.0);
        // (1/2 1/2 1; 1/2 -1/2 0) = 1/sqrt(6)
        let v = wigner_3j(h(1), h(1), j(1), h(1), h(-1), j(0)).unwrap();
        assert!((v - 1.0 / 6f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn three_j_rejects_bad_projections() {
        assert!(matches!(wigner_3j(j(1), j(1), j(0), h(1), h(-1), j(0)), Err(SpecFunError::ProjectionParity { .. })));
        assert!(matches!(wigner_3j(j(1), j(1), j(0), j(2), j(-2), j(0)), Err(SpecFunError::ProjectionTooLarge { .. })));
        assert!(wigner_3j(j(-1), j(1), j(0), j(0), j(0), j(0)).is_err());
    }

    #[test]
    fn six_j_zero_argument_reduction() {
        for jj in 0..5 {
            for k in 0..4 {
                for l in 0..5 {
                    if !triangle(2 * k, 2 * jj, 2 * l) {
                        continue;
                    }
                    let got = wigner_6j(j(0), j(jj), j(jj), j(k), j(l), j(l)).unwrap();
                    let sign = if (jj + k + l) % 2 == 0 { 1.0 } else { -1.0 };
                    let want = sign / (((2 * jj + 1) * (2 * l + 1)) as f64).sqrt();
                    assert!((got - want).abs() < 1e-14, "{jj} {k} {l}: {got} vs {want}");
                }
            }
        }
    }

    #[test]
    fn six_j_known_values_and_selection() {
        // {1 1 1; 1 1 1} = 1/6
        let v = wigner_6j(j(1), j(1), j(1), j(1), j(1), j(1)).unwrap();
        assert!((v - 1.0 / 6.0).abs() < 1e-15);
        assert_eq!(wigner_6j(j(1), j(1), j(3), j(1), j(1), j(1)).unwrap(), 0.0);
        assert_eq!(wigner_6j(j(1), j(1), h(1), j(1), j(1), j(1)).unwrap(), 0.0);
    }

    #[test]
    fn large_j_stays_finite() {
        // (j j 0; m -m 0) = (-1)^{j-m}/sqrt(2j+1)
        for &(jj, m) in &[(100, 0), (100, 37), (100, -100), (150, 3)] {
            let v = wigner_3j(j(jj), j(jj), j(0), j(m), j(-m), j(0)).unwrap();
            let sign = if (jj - m) % 2 == 0 { 1.0 } else { -1.0 };
            let want = sign / ((2 * jj + 1) as f64).sqrt();
            assert!((v - want).abs() < 1e-11 * want.abs(), "{jj} {m}: {v} vs {want}");
        }
        let v = wigner_6j(j(100), j(100), j(0), j(100), j(100), j(100)).unwrap();
        assert!((v.abs() - 1.0 / 201.0).abs() < 1e-12);
    }
}
