//! Subsets of a small ground set packed into machine words.

use std::fmt;
use std::ops::{BitAnd, BitOr, BitXor, Not};

/// A subset of `[n] = {1, …, n}` packed into the low bits of a `u32`:
/// element `j` corresponds to bit `j − 1`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Mask(pub u32);

impl Mask {
    pub const EMPTY: Mask = Mask(0);

    /// The whole ground set `[n]`.
    pub fn full(n: usize) -> Mask {
        debug_assert!(n <= 31);
        Mask(((1u64 << n) - 1) as u32)
    }

    /// `{elem}` for a 1-based element.
    pub fn singleton(elem: usize) -> Mask {
        debug_assert!((1..=31).contains(&elem));
        Mask(1 << (elem - 1))
    }

    pub fn from_elements<I: IntoIterator<Item = usize>>(elems: I) -> Mask {
        let mut bits = 0u32;
        for e in elems {
            debug_assert!((1..=31).contains(&e));
            bits |= 1 << (e - 1);
        }
        Mask(bits)
    }

    pub fn contains(self, elem: usize) -> bool {
        (1..=32).contains(&elem) && (self.0 >> (elem - 1)) & 1 == 1
    }

    #[must_use]
    pub fn with(self, elem: usize) -> Mask {
        Mask(self.0 | 1 << (elem - 1))
    }

    #[must_use]
    pub fn without(self, elem: usize) -> Mask {
        Mask(self.0 & !(1 << (elem - 1)))
    }

    /// Number of elements.
    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn is_subset_of(self, other: Mask) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn is_disjoint_from(self, other: Mask) -> bool {
        self.0 & other.0 == 0
    }

    /// `[n] \ self`.
    #[must_use]
    pub fn complement_in(self, n: usize) -> Mask {
        Mask(Mask::full(n).0 & !self.0)
    }

    /// Elements in increasing order.
    pub fn elements(self) -> Elements {
        Elements(self.0)
    }

    /// All submasks of `self` in decreasing numeric order (`self` first, `∅` last).
    pub fn submasks(self) -> Submasks {
        Submasks {
            all: self.0,
            cur: self.0,
            done: false,
        }
    }
}

impl BitOr for Mask {
    type Output = Mask;
    fn bitor(self, rhs: Mask) -> Mask {
        Mask(self.0 | rhs.0)
    }
}

impl BitAnd for Mask {
    type Output = Mask;
    fn bitand(self, rhs: Mask) -> Mask {
        Mask(self.0 & rhs.0)
    }
}

impl BitXor for Mask {
    type Output = Mask;
    fn bitxor(self, rhs: Mask) -> Mask {
        Mask(self.0 ^ rhs.0)
    }
}

impl Not for Mask {
    type Output = Mask;
    fn not(self) -> Mask {
        Mask(!self.0)
    }
}

impl fmt::Debug for Mask {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for Mask {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (k, e) in self.elements().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{e}")?;
        }
        write!(f, "}}")
    }
}

pub struct Elements(u32);

impl Iterator for Elements {
    type Item = usize;
    fn next(&mut self) -> Option<usize> {
        if self.0 == 0 {
            return None;
        }
        let e = self.0.trailing_zeros() as usize + 1;
        self.0 &= self.0 - 1;
        Some(e)
    }
}

pub struct Submasks {
    all: u32,
    cur: u32,
    done: bool,
}

impl Iterator for Submasks {
    type Item = Mask;
    fn next(&mut self) -> Option<Mask> {
        if self.done {
            return None;
        }
        let out = self.cur;
        if self.cur == 0 {
            self.done = true;
        } else {
            self.cur = (self.cur - 1) & self.all;
        }
        Some(Mask(out))
    }
}
