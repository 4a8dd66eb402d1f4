//! Deterministic random fixtures. Every job draws from one recorded seed.

use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::arith::poly::Monomial;
use crate::arith::scalar::{ratio, Scalar};
use crate::element::TensorElement;

pub struct Sampler {
    rng: ChaCha8Rng,
}

impl Sampler {
    pub fn new(seed: u64) -> Self {
        Sampler {
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn int(&mut self, lo: i64, hi: i64) -> i64 {
        self.rng.random_range(lo..=hi)
    }

    /// `p/q` with `|p| ≤ num` and `1 ≤ q ≤ den`.
    pub fn scalar(&mut self, num: i64, den: i64) -> Scalar {
        let p = self.rng.random_range(-num..=num);
        let q = self.rng.random_range(1..=den);
        ratio(p, q)
    }

    pub fn nonzero_scalar(&mut self, num: i64, den: i64) -> Scalar {
        loop {
            let x = self.scalar(num, den);
            if !x.is_zero() {
                return x;
            }
        }
    }

    /// A nonzero element with up to `terms` terms, exponents bounded by
    /// `bound` coordinatewise and `V`-indices below `v_indices`.
    pub fn element(&mut self, bound: &[u32], v_indices: usize, terms: usize) -> TensorElement {
        let nvars = bound.len();
        loop {
            let mut e = TensorElement::zero(nvars);
            for _ in 0..terms.max(1) {
                let exps: Vec<u32> = bound.iter().map(|&b| self.rng.random_range(0..=b)).collect();
                let j = self.rng.random_range(0..v_indices.max(1));
                let c = self.nonzero_scalar(5, 3);
                e.add_term(j, Monomial(exps), c);
            }
            if !e.is_zero() {
                return e;
            }
        }
    }

    pub fn elements(&mut self, count: usize, bound: &[u32], v_indices: usize, terms: usize) -> Vec<TensorElement> {
        (0..count).map(|_| self.element(bound, v_indices, terms)).collect()
    }
}
