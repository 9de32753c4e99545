//! Seeded random instances at desk scale: at most three factors, fan depth
//! at most three, rational data with denominators at most 16.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use szlenk::engine::{Component, FanSet, Skeleton};
use szlenk::rational::{Exponent, QPow, Rational};

pub const MAX_DEN: i64 = 16;
pub const MAX_FACTORS: usize = 3;
pub const MAX_DEPTH: usize = 3;

pub struct Gen {
    rng: ChaCha8Rng,
}

impl Gen {
    /// Each sample gets its own ChaCha stream, so results do not depend on
    /// the order in which samples are evaluated.
    pub fn for_sample(seed: u64, sample: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(sample);
        Gen { rng }
    }

    pub fn below(&mut self, n: usize) -> usize {
        self.rng.random_range(0..n)
    }

    pub fn range(&mut self, lo: usize, hi: usize) -> usize {
        self.rng.random_range(lo..=hi)
    }

    pub fn coin(&mut self) -> bool {
        self.rng.random_bool(0.5)
    }

    fn den(&mut self) -> i64 {
        self.rng.random_range(1..=MAX_DEN)
    }

    /// A rational in `(0, 1]`.
    pub fn unit(&mut self) -> Rational {
        let d = self.den();
        let n = self.rng.random_range(1..=d);
        Rational::new(n.into(), d.into())
    }

    /// A rational in `(0, 1)`; needs a denominator of at least two.
    pub fn proper_unit(&mut self) -> Rational {
        let d = self.rng.random_range(2..=MAX_DEN);
        let n = self.rng.random_range(1..d);
        Rational::new(n.into(), d.into())
    }

    /// A rational in `[-1, 1]`.
    pub fn signed_unit(&mut self) -> Rational {
        let d = self.den();
        let n = self.rng.random_range(-d..=d);
        Rational::new(n.into(), d.into())
    }

    /// A rational in `(0, 2]`.
    pub fn positive(&mut self) -> Rational {
        let d = self.den();
        let n = self.rng.random_range(1..=2 * d);
        Rational::new(n.into(), d.into())
    }

    pub fn weight(&mut self) -> QPow {
        QPow::new(self.positive()).expect("positive")
    }

    pub fn exponent(&mut self) -> Exponent {
        let choices = [(1, 1), (3, 2), (2, 1), (3, 1)];
        let (n, d) = choices[self.below(choices.len())];
        Exponent::new(Rational::new(n.into(), d.into())).expect("at least one")
    }

    /// A nonempty product-free fan set containing the origin, with fans
    /// nested at most `depth` deep.
    pub fn fanset(&mut self, depth: usize) -> FanSet {
        if depth == 0 {
            return FanSet::Sing;
        }
        match self.below(6) {
            0 => FanSet::Sing,
            1 => FanSet::simple_fan(self.weight()),
            2 => {
                let prefix = (0..self.range(0, 1)).map(|_| self.fanset(depth - 1)).collect();
                let tail = self.fanset(depth - 1);
                FanSet::fan(self.weight(), prefix, tail)
            }
            3 => {
                let members = (0..2)
                    .map(|_| {
                        let tail = self.fanset(depth - 1);
                        FanSet::fan(self.weight(), vec![], tail)
                    })
                    .collect();
                FanSet::UnionApex(members)
            }
            4 => FanSet::DisjUnion(vec![
                Component::at_origin(self.fanset(depth - 1)),
                Component::shifted(self.weight(), self.fanset(depth - 1)),
            ]),
            _ => {
                let inner = self.fanset(depth);
                FanSet::scale(QPow::new(self.unit()).expect("positive"), inner)
            }
        }
    }

    /// Scaled factors; with `normalized` the scalars satisfy `Σ aᵢ^q ≤ 1`.
    pub fn factors(&mut self, count: usize, depth: usize, normalized: bool) -> Vec<(QPow, FanSet)> {
        let n = Rational::from_integer((count as i64).into());
        (0..count)
            .map(|_| {
                let a = if normalized { self.unit() / &n } else { self.unit() };
                (QPow::new(a).expect("positive"), self.fanset(depth))
            })
            .collect()
    }

    /// A marked point of `set`, addressed by its child-index path.
    pub fn point_path(&mut self, skel: &Skeleton, set: &szlenk::engine::Mask) -> Vec<usize> {
        let marked: Vec<usize> = set.ones().collect();
        skel.path(marked[self.below(marked.len())])
    }
}
