//! Ordinals below `w*K` in block/offset form, plus the pairing utilities
//! the layer formulas need.

use std::fmt;
use std::str::FromStr;

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// An ordinal `w*block + offset`. Derived `Ord` is lexicographic on
/// `(block, offset)`, which is the ordinal order.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Ordinal {
    pub block: u32,
    pub offset: u64,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum OrdinalKind {
    Zero,
    Successor,
    Limit,
}

impl Ordinal {
    pub const ZERO: Ordinal = Ordinal { block: 0, offset: 0 };

    pub fn new(block: u32, offset: u64) -> Self {
        Ordinal { block, offset }
    }

    /// The natural `n`, i.e. `w*0 + n`.
    pub fn nat(n: u64) -> Self {
        Ordinal { block: 0, offset: n }
    }

    /// The limit ordinal `w*block`.
    pub fn limit(block: u32) -> Self {
        Ordinal { block, offset: 0 }
    }

    pub fn classify(self) -> OrdinalKind {
        if self.offset == 0 {
            if self.block == 0 {
                OrdinalKind::Zero
            } else {
                OrdinalKind::Limit
            }
        } else {
            OrdinalKind::Successor
        }
    }

    pub fn is_limit(self) -> bool {
        self.classify() == OrdinalKind::Limit
    }

    /// Successor within the same block.
    pub fn succ(self) -> Ordinal {
        Ordinal { block: self.block, offset: self.offset + 1 }
    }
}

impl fmt::Display for Ordinal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.block == 0 {
            write!(f, "{}", self.offset)
        } else if self.offset == 0 {
            write!(f, "w*{}", self.block)
        } else {
            write!(f, "w*{}+{}", self.block, self.offset)
        }
    }
}

/// Failed parse of the textual `w*k+n` form.
#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("invalid ordinal {input:?}: expected a natural or \"w*k+n\"")]
pub struct OrdinalParseError {
    pub input: String,
}

impl FromStr for Ordinal {
    type Err = OrdinalParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let err = || OrdinalParseError { input: s.to_string() };
        if let Some(rest) = s.strip_prefix("w*") {
            let (block_str, offset_str) = match rest.split_once('+') {
                Some((b, n)) => (b, n),
                None => (rest, "0"),
            };
            let block = block_str.trim().parse().map_err(|_| err())?;
            let offset = offset_str.trim().parse().map_err(|_| err())?;
            Ok(Ordinal { block, offset })
        } else if s == "w" {
            Ok(Ordinal::limit(1))
        } else if let Some(rest) = s.strip_prefix("w+") {
            let offset = rest.trim().parse().map_err(|_| err())?;
            Ok(Ordinal { block: 1, offset })
        } else {
            let offset = s.parse().map_err(|_| err())?;
            Ok(Ordinal::nat(offset))
        }
    }
}

impl Serialize for Ordinal {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Ordinal {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(|e: OrdinalParseError| D::Error::custom(e))
    }
}

/// Canonical bijection from `w` onto the ordinals below `w*c`:
/// `t -> w*(t mod c) + (t div c)`. Requires `c >= 1`.
pub fn old_enum(c: u32, t: u64) -> Ordinal {
    assert!(c >= 1, "old_enum requires c >= 1");
    Ordinal { block: (t % c as u64) as u32, offset: t / c as u64 }
}

/// Exact inverse of [`old_enum`]: the index of an ordinal below `w*c`.
pub fn old_index(c: u32, o: Ordinal) -> u64 {
    assert!(c >= 1 && o.block < c, "old_index: {o} is not below w*{c}");
    o.offset * c as u64 + o.block as u64
}

/// Cantor pairing `(m, i) -> (m+i)(m+i+1)/2 + i`. Returns `None` on u64
/// overflow. Satisfies `m <= pair(m, i)`.
pub fn pair(m: u64, i: u64) -> Option<u64> {
    let w = (m as u128) + (i as u128);
    let v = w * (w + 1) / 2 + i as u128;
    u64::try_from(v).ok()
}

/// Exact inverse of [`pair`].
pub fn unpair(j: u64) -> (u64, u64) {
    // w = floor((sqrt(8j+1)-1)/2), then correct for f64 rounding.
    let mut w = (((8.0 * j as f64 + 1.0).sqrt() - 1.0) / 2.0) as u64;
    while tri(w + 1) <= j as u128 {
        w += 1;
    }
    while tri(w) > j as u128 {
        w -= 1;
    }
    let i = j - tri(w) as u64;
    (w - i, i)
}

fn tri(w: u64) -> u128 {
    (w as u128) * (w as u128 + 1) / 2
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::cmp::Ordering;

    #[test]
    fn compare_examples() {
        assert_eq!(Ordinal::limit(1).cmp(&Ordinal::nat(5)), Ordering::Greater);
        assert_eq!(Ordinal::new(2, 3).cmp(&Ordinal::new(2, 3)), Ordering::Equal);
        assert_eq!(Ordinal::new(1, 9).cmp(&Ordinal::limit(2)), Ordering::Less);
    }

    #[test]
    fn classify_examples() {
        assert_eq!(Ordinal::ZERO.classify(), OrdinalKind::Zero);
        assert_eq!(Ordinal::limit(3).classify(), OrdinalKind::Limit);
        assert_eq!(Ordinal::new(3, 1).classify(), OrdinalKind::Successor);
    }

    #[test]
    fn total_order_exhaustive() {
        // Antisymmetry and transitivity over a small exhaustive window.
        let mut all = Vec::new();
        for block in 0..4u32 {
            for offset in 0..32u64 {
                all.push(Ordinal { block, offset });
            }
        }
        for &a in &all {
            for &b in &all {
                if a.cmp(&b) == Ordering::Equal {
                    assert_eq!(a, b);
                }
                assert_eq!(a.cmp(&b), b.cmp(&a).reverse());
            }
        }
        let mut sorted = all.clone();
        sorted.sort();
        for w in sorted.windows(3) {
            assert!(w[0] <= w[1] && w[1] <= w[2] && w[0] <= w[2]);
        }
    }

    #[test]
    fn old_enum_examples() {
        assert_eq!(old_enum(1, 7), Ordinal::nat(7));
        assert_eq!(old_enum(2, 5), Ordinal::new(1, 2));
        assert_eq!(old_enum(3, 0), Ordinal::ZERO);
    }

    #[test]
    fn old_enum_roundtrip() {
        for c in 1..=8 {
            for t in 0..1000 {
                let o = old_enum(c, t);
                assert!(o.block < c);
                assert_eq!(old_index(c, o), t);
            }
        }
    }

    #[test]
    fn pair_examples() {
        assert_eq!(pair(0, 0), Some(0));
        assert_eq!(unpair(4), (1, 1));
        assert_eq!(pair(2, 0), Some(3));
    }

    #[test]
    fn pair_unpair_roundtrip() {
        for j in 0..1_000_000u64 {
            let (m, i) = unpair(j);
            assert_eq!(pair(m, i), Some(j));
            assert!(m <= j);
        }
    }

    #[test]
    fn parse_display_roundtrip() {
        for s in ["0", "17", "w*1", "w*2+5", "w*9+0"] {
            let o: Ordinal = s.parse().unwrap();
            let back: Ordinal = o.to_string().parse().unwrap();
            assert_eq!(o, back);
        }
        assert_eq!("w*2+5".parse::<Ordinal>().unwrap(), Ordinal::new(2, 5));
        assert_eq!("w".parse::<Ordinal>().unwrap(), Ordinal::limit(1));
        assert!("w*x".parse::<Ordinal>().is_err());
        assert!("-3".parse::<Ordinal>().is_err());
    }
}
