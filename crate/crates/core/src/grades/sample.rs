//! Deterministic sampling of grade values.
//!
//! Naturals are drawn from `0..=50`, rationals as `n/d` with `d ≤ 16` and
//! value at most 50, and `∞` with a small fixed probability. Zero and one
//! are over-represented so that unit and annihilation laws meet them often.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{AlgebraSpec, ExtReal, GradeValue};

/// Seed used by law validation unless the caller picks another.
pub const SAMPLE_SEED: u64 = 0x6772_6164_6566_6a31;

/// Number of sampled triples (or values) used for infinite carriers.
pub const DEFAULT_SAMPLES: usize = 2000;

pub struct Sampler {
    rng: ChaCha8Rng,
}

impl Sampler {
    pub fn new(seed: u64) -> Self {
        Sampler {
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn value(&mut self, spec: &AlgebraSpec) -> GradeValue {
        let roll: u32 = self.rng.gen_range(0..100);
        match spec {
            AlgebraSpec::Nat => GradeValue::Nat(match roll {
                0..=9 => 0,
                10..=19 => 1,
                _ => self.rng.gen_range(0..=50),
            }),
            AlgebraSpec::ExtReal => match roll {
                0..=7 => GradeValue::Real(ExtReal::Inf),
                8..=15 => spec.zero(),
                16..=23 => spec.one(),
                _ => {
                    let d = self.rng.gen_range(1..=16u64);
                    let n = self.rng.gen_range(0..=50 * d);
                    GradeValue::real(n, d)
                }
            },
            AlgebraSpec::Product(a, b) => {
                let x = self.value(a);
                GradeValue::pair(x, self.value(b))
            }
            AlgebraSpec::Extend(a) => {
                if roll < 10 {
                    GradeValue::ExtInf
                } else {
                    GradeValue::ext(self.value(a))
                }
            }
            _ => {
                let elems = spec.elements().expect("finite carrier");
                elems[self.rng.gen_range(0..elems.len())].clone()
            }
        }
    }
}

/// The whole carrier when finite; otherwise zero, one and `n` sampled values,
/// without duplicates and in a stable order.
pub fn sample_values(spec: &AlgebraSpec, n: usize, seed: u64) -> Vec<GradeValue> {
    if let Some(all) = spec.elements() {
        return all;
    }
    let mut out = vec![spec.zero(), spec.one()];
    let mut sampler = Sampler::new(seed);
    for _ in 0..n {
        let v = sampler.value(spec);
        if !out.contains(&v) {
            out.push(v);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sampling_is_deterministic_and_in_carrier() {
        for spec in [AlgebraSpec::Nat, AlgebraSpec::ExtReal, AlgebraSpec::extend(AlgebraSpec::Nat)] {
            let a = sample_values(&spec, 100, 3);
            let b = sample_values(&spec, 100, 3);
            assert_eq!(a, b);
            assert!(a.iter().all(|v| spec.contains(v)));
        }
    }

    #[test]
    fn extreal_denominators_are_bounded() {
        for v in sample_values(&AlgebraSpec::ExtReal, 500, 11) {
            if let GradeValue::Real(ExtReal::Fin(q)) = v {
                assert!(*q.denom() <= 16);
                assert!(q.numer() / q.denom() <= 50);
            }
        }
    }
}
