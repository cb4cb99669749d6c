//! Fixed-width bitsets over dense world indices.
//!
//! Worlds carry dense integer indices into their model; an information state
//! is a set of such indices, stored as a 128-bit mask. The numeric value of
//! the mask is the canonical order used everywhere deterministic iteration or
//! tie-breaking is needed.

/// Largest number of worlds a single model (or sum of models) may hold.
pub const MAX_WORLDS: usize = 128;

/// A set of worlds, identified by their dense indices in some model.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct WorldSet(u128);

impl WorldSet {
    pub const EMPTY: WorldSet = WorldSet(0);

    pub fn singleton(w: usize) -> WorldSet {
        debug_assert!(w < MAX_WORLDS);
        WorldSet(1u128 << w)
    }

    pub fn full(n: usize) -> WorldSet {
        debug_assert!(n <= MAX_WORLDS);
        if n == MAX_WORLDS {
            WorldSet(u128::MAX)
        } else {
            WorldSet((1u128 << n) - 1)
        }
    }

    pub fn from_bits(bits: u128) -> WorldSet {
        WorldSet(bits)
    }

    pub fn bits(self) -> u128 {
        self.0
    }

    pub fn contains(self, w: usize) -> bool {
        w < MAX_WORLDS && self.0 & (1u128 << w) != 0
    }

    pub fn insert(&mut self, w: usize) {
        debug_assert!(w < MAX_WORLDS);
        self.0 |= 1u128 << w;
    }

    pub fn remove(&mut self, w: usize) {
        self.0 &= !(1u128 << w);
    }

    pub fn union(self, other: WorldSet) -> WorldSet {
        WorldSet(self.0 | other.0)
    }

    pub fn intersect(self, other: WorldSet) -> WorldSet {
        WorldSet(self.0 & other.0)
    }

    pub fn difference(self, other: WorldSet) -> WorldSet {
        WorldSet(self.0 & !other.0)
    }

    pub fn is_subset(self, other: WorldSet) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn iter(self) -> impl Iterator<Item = usize> {
        let mut bits = self.0;
        std::iter::from_fn(move || {
            if bits == 0 {
                None
            } else {
                let w = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                Some(w)
            }
        })
    }

    pub fn min_world(self) -> Option<usize> {
        if self.0 == 0 {
            None
        } else {
            Some(self.0.trailing_zeros() as usize)
        }
    }

    /// All subsets of this set, from `EMPTY` up to the set itself,
    /// in ascending numeric order.
    pub fn subsets(self) -> impl Iterator<Item = WorldSet> {
        let mask = self.0;
        let mut next = Some(0u128);
        std::iter::from_fn(move || {
            let cur = next?;
            next = if cur == mask {
                None
            } else {
                Some((cur.wrapping_sub(mask)) & mask)
            };
            Some(WorldSet(cur))
        })
    }
}

impl FromIterator<usize> for WorldSet {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> WorldSet {
        let mut s = WorldSet::EMPTY;
        for w in iter {
            s.insert(w);
        }
        s
    }
}

impl std::fmt::Debug for WorldSet {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{{")?;
        for (k, w) in self.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{w}")?;
        }
        write!(f, "}}")
    }
}
