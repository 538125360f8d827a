//! Exact-arithmetic Wigner symbols for cross-checking the floating-point ones.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

fn factorial(n: i32) -> BigInt {
    assert!(n >= 0, "factorial of {n}");
    (1..=n).fold(BigInt::one(), |acc, k| acc * k)
}

/// Factorial of a twice-valued integer argument.
fn f2(twice: i32) -> BigInt {
    assert!(twice % 2 == 0, "half-integer factorial {twice}");
    factorial(twice / 2)
}

fn ratio(n: BigInt, d: BigInt) -> BigRational {
    BigRational::new(n, d)
}

/// `(j1 j2 j3; m1 m2 m3)` on twice-values, as `sign · sqrt(square)` with the
/// square evaluated exactly before the final rounding.
pub fn three_j(j1: i32, j2: i32, j3: i32, m1: i32, m2: i32, m3: i32) -> f64 {
    let valid_jm = |j: i32, m: i32| j >= 0 && m.abs() <= j && (j - m) % 2 == 0;
    if !(valid_jm(j1, m1) && valid_jm(j2, m2) && valid_jm(j3, m3)) {
        return 0.0;
    }
    if m1 + m2 + m3 != 0 || (j1 + j2 + j3) % 2 != 0 || j3 > j1 + j2 || j3 < (j1 - j2).abs() {
        return 0.0;
    }
    let delta = ratio(f2(j1 + j2 - j3) * f2(j1 - j2 + j3) * f2(-j1 + j2 + j3), f2(j1 + j2 + j3 + 2));
    let prefactor =
        delta * ratio(f2(j1 + m1) * f2(j1 - m1) * f2(j2 + m2) * f2(j2 - m2) * f2(j3 + m3) * f2(j3 - m3), BigInt::one());
    let mut sum = BigRational::zero();
    let mut k = 0;
    while k <= j1 + j2 + j3 {
        let args = [k, j3 - j2 + k + m1, j3 - j1 + k - m2, j1 + j2 - j3 - k, j1 - k - m1, j2 - k + m2];
        if args.iter().all(|&a| a >= 0) {
            let den = args.iter().fold(BigInt::one(), |acc, &a| acc * f2(a));
            let term = ratio(BigInt::one(), den);
            if (k / 2) % 2 == 0 {
                sum += term;
            } else {
                sum -= term;
            }
        }
        k += 2;
    }
    if sum.is_zero() {
        return 0.0;
    }
    let phase = (j1 - j2 - m3) / 2;
    let sign = if phase.rem_euclid(2) == 0 { 1.0 } else { -1.0 } * if sum.is_negative() { -1.0 } else { 1.0 };
    let square = prefactor * &sum * &sum;
    sign * square.to_f64().unwrap().sqrt()
}

/// 6-j symbol as the contraction of four 3-j symbols over all projections.
pub struct SixJOracle {
    cache: HashMap<[i32; 6], f64>,
}

impl SixJOracle {
    pub fn new() -> Self {
        SixJOracle { cache: HashMap::new() }
    }

    fn tj(&mut self, key: [i32; 6]) -> f64 {
        *self.cache.entry(key).or_insert_with(|| three_j(key[0], key[1], key[2], key[3], key[4], key[5]))
    }

    pub fn six_j(&mut self, j: [i32; 6]) -> f64 {
        let [j1, j2, j3, j4, j5, j6] = j;
        let ms = |jj: i32| (-jj..=jj).step_by(2);
        let mut total = 0.0;
        for m1 in ms(j1) {
            for m2 in ms(j2) {
                let m3 = -m1 - m2;
                if m3.abs() > j3 {
                    continue;
                }
                for m5 in ms(j5) {
                    let m6 = m5 - m1;
                    if m6.abs() > j6 {
                        continue;
                    }
                    let m4 = m6 - m2;
                    if m4.abs() > j4 || -m4 + m5 + m3 != 0 {
                        continue;
                    }
                    let phase = (j1 - m1 + j2 - m2 + j3 - m3 + j4 - m4 + j5 - m5 + j6 - m6) / 2;
                    let sign = if phase.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
                    total += sign
                        * self.tj([j1, j2, j3, -m1, -m2, -m3])
                        * self.tj([j1, j5, j6, m1, -m5, m6])
                        * self.tj([j4, j2, j6, m4, m2, -m6])
                        * self.tj([j4, j5, j3, -m4, m5, m3]);
                }
            }
        }
        total
    }
}
