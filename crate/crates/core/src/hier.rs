//! Ultrametric arithmetic on the truncated hierarchical group.
//!
//! A point of `B_level(0)` is stored as an integer id in `[0, N^level)`; the
//! base-`N` digit `i` of the id (least significant digit is `i = 1`) is the
//! coordinate `x_i`. The hierarchical distance of two points is the position
//! of their most significant differing digit, and `0` when they coincide.

use alloc::vec::Vec;
use core::ops::Range;

use crate::{Error, Result};

/// Largest ball that [`enumerate_ball`] will materialize.
pub const MAX_BALL_ENUMERATION: u64 = 1 << 30;

/// The ball `B_level(0)` of `Ω_N`: the vertex set of every finite experiment.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Hierarchy {
    order: u32,
    level: u32,
    size: u64,
    /// `log2(order)` when the order is a power of two.
    shift: Option<u32>,
}

impl Hierarchy {
    pub fn new(order: u32, level: u32) -> Result<Self> {
        if order < 2 {
            return Err(Error::invalid("hierarchy order must be at least 2"));
        }
        let size = (order as u64)
            .checked_pow(level)
            .ok_or(Error::Capacity {
                requested: (order as u128).saturating_pow(level),
                limit: u64::MAX as u128,
            })?;
        let shift = order.is_power_of_two().then(|| order.trailing_zeros());
        Ok(Hierarchy {
            order,
            level,
            size,
            shift,
        })
    }

    #[inline]
    pub fn order(&self) -> u32 {
        self.order
    }

    #[inline]
    pub fn level(&self) -> u32 {
        self.level
    }

    /// Number of points, `N^level`.
    #[inline]
    pub fn size(&self) -> u64 {
        self.size
    }

    /// `N^k` for `k <= level`.
    #[inline]
    pub fn pow(&self, k: u32) -> u64 {
        debug_assert!(k <= self.level);
        (self.order as u64).pow(k)
    }

    /// Hierarchical distance between two ids of this ball.
    #[inline]
    pub fn dist(&self, x: u64, y: u64) -> u32 {
        if x == y {
            return 0;
        }
        match self.shift {
            Some(s) => {
                let top = 63 - (x ^ y).leading_zeros();
                top / s + 1
            }
            None => {
                let n = self.order as u64;
                let (mut a, mut b, mut d) = (x, y, 0);
                while a != b {
                    a /= n;
                    b /= n;
                    d += 1;
                }
                d
            }
        }
    }

    /// Distance from the origin, i.e. the number of significant digits of `x`.
    #[inline]
    pub fn radius(&self, x: u64) -> u32 {
        self.dist(0, x)
    }

    /// Ids of the `k`-ball containing `x`.
    pub fn ball_range(&self, x: u64, k: u32) -> Range<u64> {
        let width = self.pow(k);
        let start = (x / width) * width;
        start..start + width
    }

    pub fn address(&self, id: u64) -> Result<HAddress> {
        HAddress::new(self.order, self.level, id)
    }
}

/// A point of `B_level(0)` together with the space it lives in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct HAddress {
    order: u32,
    level: u32,
    id: u64,
}

impl HAddress {
    pub fn new(order: u32, level: u32, id: u64) -> Result<Self> {
        let space = Hierarchy::new(order, level)?;
        if id >= space.size() {
            return Err(Error::invalid("address id outside the ball"));
        }
        Ok(HAddress { order, level, id })
    }

    /// The origin `0 = (0, 0, ...)`.
    pub fn origin(order: u32, level: u32) -> Result<Self> {
        Self::new(order, level, 0)
    }

    /// Builds an address from its coordinates `x_1, x_2, ...`; missing
    /// coordinates are zero.
    pub fn from_digits(order: u32, level: u32, digits: &[u32]) -> Result<Self> {
        if digits.len() > level as usize {
            return Err(Error::invalid("more digits than the level allows"));
        }
        let mut id = 0u64;
        for &d in digits.iter().rev() {
            if d >= order {
                return Err(Error::invalid("digit out of range"));
            }
            id = id * order as u64 + d as u64;
        }
        Self::new(order, level, id)
    }

    #[inline]
    pub fn id(&self) -> u64 {
        self.id
    }

    #[inline]
    pub fn order(&self) -> u32 {
        self.order
    }

    #[inline]
    pub fn level(&self) -> u32 {
        self.level
    }

    /// Coordinate `x_i`, `i >= 1`.
    pub fn digit(&self, i: u32) -> u32 {
        if i == 0 || i > self.level {
            return 0;
        }
        ((self.id / (self.order as u64).pow(i - 1)) % self.order as u64) as u32
    }

    pub fn is_origin(&self) -> bool {
        self.id == 0
    }

    fn space(&self) -> Hierarchy {
        // Validated at construction.
        Hierarchy::new(self.order, self.level).expect("address space is valid")
    }
}

/// Hierarchical distance `max{i : x_i != y_i}` (zero when `x = y`).
pub fn hdist(x: &HAddress, y: &HAddress) -> Result<u32> {
    if x.order != y.order || x.level != y.level {
        return Err(Error::invalid(
            "addresses belong to different hierarchies",
        ));
    }
    Ok(x.space().dist(x.id, y.id))
}

/// The ball of diameter `k` around `center`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BallSpec {
    center: HAddress,
    diameter: u32,
}

impl BallSpec {
    pub fn new(center: HAddress, diameter: u32) -> Result<Self> {
        if diameter > center.level {
            return Err(Error::invalid("ball diameter exceeds the sampled level"));
        }
        Ok(BallSpec { center, diameter })
    }

    pub fn center(&self) -> HAddress {
        self.center
    }

    pub fn diameter(&self) -> u32 {
        self.diameter
    }

    /// `N^k`.
    pub fn size(&self) -> u64 {
        (self.center.order as u64).pow(self.diameter)
    }

    /// Ids of the members; every ball of `B_level(0)` is a contiguous range.
    pub fn range(&self) -> Range<u64> {
        self.center.space().ball_range(self.center.id, self.diameter)
    }

    /// Index of this ball among the disjoint `k`-balls of the sampled level.
    pub fn index(&self) -> u64 {
        self.center.id / self.size()
    }

    pub fn contains(&self, x: &HAddress) -> bool {
        x.order == self.center.order
            && x.level == self.center.level
            && self.range().contains(&x.id)
    }
}

/// All members of a ball, in increasing id order.
pub fn enumerate_ball(b: &BallSpec) -> Result<Vec<HAddress>> {
    let size = (b.center.order as u128).pow(b.diameter);
    if size > MAX_BALL_ENUMERATION as u128 {
        return Err(Error::Capacity {
            requested: size,
            limit: MAX_BALL_ENUMERATION as u128,
        });
    }
    let HAddress { order, level, .. } = b.center;
    Ok(b.range()
        .map(|id| HAddress { order, level, id })
        .collect())
}

/// The annulus `(inner, outer]`, i.e. `B_outer(0) \ B_inner(0)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AnnulusSpec {
    inner: u32,
    outer: u32,
}

impl AnnulusSpec {
    pub fn new(inner: u32, outer: u32) -> Result<Self> {
        if inner >= outer {
            return Err(Error::invalid("annulus needs inner < outer"));
        }
        Ok(AnnulusSpec { inner, outer })
    }

    pub fn inner(&self) -> u32 {
        self.inner
    }

    pub fn outer(&self) -> u32 {
        self.outer
    }

    /// Whether a point at distance `radius` from the origin lies in the annulus.
    #[inline]
    pub fn contains_radius(&self, radius: u32) -> bool {
        radius > self.inner && radius <= self.outer
    }

    /// `N^outer - N^inner`.
    pub fn size(&self, order: u32) -> u128 {
        let n = order as u128;
        n.pow(self.outer) - n.pow(self.inner)
    }
}

/// Number of unordered pairs of `B_k(0)` at distance exactly `j`:
/// `N^k (N^j - N^(j-1)) / 2`.
pub fn shell_pair_count(order: u32, k: u32, j: u32) -> Result<u64> {
    if order < 2 {
        return Err(Error::invalid("hierarchy order must be at least 2"));
    }
    if j == 0 || j > k {
        return Err(Error::invalid("shell index must satisfy 1 <= j <= k"));
    }
    let n = order as u128;
    let count = n
        .checked_pow(k)
        .and_then(|a| n.checked_pow(j - 1).and_then(|b| a.checked_mul(b * (n - 1))))
        .map(|c| c / 2)
        .ok_or(Error::Capacity {
            requested: u128::MAX,
            limit: u64::MAX as u128,
        })?;
    u64::try_from(count).map_err(|_| Error::Capacity {
        requested: count,
        limit: u64::MAX as u128,
    })
}
