//! Shared fixtures and the seeded random ensemble used across the
//! integration suites.

use jiscat::JacobiSequence;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn q0() -> JacobiSequence {
    JacobiSequence::free()
}

/// p = 1: a1 = 1/2, b1 = 1.
pub fn q1() -> JacobiSequence {
    JacobiSequence::normalize(&[0.5], &[1.0], 1).unwrap()
}

/// p = 2 case 1: (a1, b1, a2, b2) = (1, 1, 1/2, 0).
pub fn q2() -> JacobiSequence {
    JacobiSequence::normalize(&[1.0, 0.5], &[1.0, 0.0], 1).unwrap()
}

/// Draw one member with the support pattern of the class `(nu, tau, p)`:
/// `a_n` in [0.2, 2], `b_n` in [-2, 2], endpoint entries kept a margin away
/// from the free values so the class is numerically unambiguous.
pub fn sample_class(rng: &mut ChaCha8Rng, p: usize, nu: usize, tau: usize) -> JacobiSequence {
    let margin = 0.1;
    let mut a: Vec<f64> = (0..p).map(|_| rng.gen_range(0.2..2.0)).collect();
    let mut b: Vec<f64> = (0..p).map(|_| rng.gen_range(-2.0..2.0)).collect();
    if nu == 1 {
        b[0] = 0.0;
        while (a[0] - 1.0).abs() < margin {
            a[0] = rng.gen_range(0.2..2.0);
        }
    } else {
        while b[0].abs() < margin {
            b[0] = rng.gen_range(-2.0..2.0);
        }
    }
    if tau == 1 {
        a[p - 1] = 1.0;
        while b[p - 1].abs() < margin {
            b[p - 1] = rng.gen_range(-2.0..2.0);
        }
    } else {
        while (a[p - 1] - 1.0).abs() < margin {
            a[p - 1] = rng.gen_range(0.2..2.0);
        }
    }
    JacobiSequence::normalize(&a, &b, 1).unwrap()
}

/// Max-support member (`nu = tau = 0`), the generic draw.
pub fn sample(rng: &mut ChaCha8Rng, p: usize) -> JacobiSequence {
    sample_class(rng, p, 0, 0)
}
