#![allow(dead_code)]

use cusp_core::pde_series::ProblemData;
use cusp_core::Rational;
use num_traits::Zero;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `n/d` with `|n| ≤ 9`, `1 ≤ d ≤ 9`.
pub fn small_rational(rng: &mut impl Rng) -> Rational {
    Rational::new(rng.random_range(-9i64..=9).into(), rng.random_range(1i64..=9).into())
}

pub fn nonzero_rational(rng: &mut impl Rng) -> Rational {
    loop {
        let q = small_rational(rng);
        if !q.is_zero() {
            return q;
        }
    }
}

/// Random data with `b02 = 0`, `b03 ≠ 0`, four `α_j` and boundary up to `b0_len − 1`.
pub fn singular_instance(rng: &mut impl Rng, alpha_len: usize, b0_len: usize) -> ProblemData {
    let alpha = (0..alpha_len).map(|_| small_rational(rng)).collect();
    let mut b0: Vec<Rational> = (0..b0_len).map(|_| small_rational(rng)).collect();
    b0[2] = Rational::zero();
    b0[3] = nonzero_rational(rng);
    ProblemData::new(alpha, b0, small_rational(rng))
}
