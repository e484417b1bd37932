//! Formula-driven type A and type B layers extending a base algebra on
//! the naturals along a finite word over {A, B}.
//!
//! Layer `c >= 1` (at `lambda = w*c`) owns every cell `(x, y)` with
//! `max(x, y)` in block `c` and both coordinates below `w*(c+1)`, and
//! maps those cells bijectively onto the block-`c` elements:
//!
//! * even elements: `cell(lambda+2k) = (e_k, lambda+2k+2)` where the
//!   sequence `e` interleaves `lambda`, the old elements, and the new
//!   elements so that it enumerates everything below `lambda+w`;
//! * odd elements: the j-th odd element sits at the i-th cell of the
//!   L-shaped region `L_m` (cells with max coordinate exactly
//!   `lambda+m`, minus the even cell), with `(m, i)` the Cantor unpair
//!   of `j`.
//!
//! A type B layer is the transpose: the same cells with the two
//! coordinates of every cell exchanged.

use std::fmt;
use std::str::FromStr;

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::algebra::{AlgebraError, BaseAlgebra, JtOps};
use crate::ordinal::{old_enum, old_index, pair, unpair, Ordinal};

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum Letter {
    A,
    B,
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", if *self == Letter::A { 'A' } else { 'B' })
    }
}

/// A finite word over {A, B}; the letter at index `i` governs the layer
/// at `lambda = w*(i+1)`.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct SigmaWord(pub Vec<Letter>);

impl SigmaWord {
    pub fn empty() -> Self {
        SigmaWord(Vec::new())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// The letter governing layer `c` (1-based block index).
    pub fn letter(&self, c: u32) -> Option<Letter> {
        if c == 0 {
            None
        } else {
            self.0.get(c as usize - 1).copied()
        }
    }
}

impl fmt::Display for SigmaWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for l in &self.0 {
            write!(f, "{l}")?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("invalid sigma word {input:?}: only letters A and B are allowed")]
pub struct SigmaParseError {
    pub input: String,
}

impl FromStr for SigmaWord {
    type Err = SigmaParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut letters = Vec::with_capacity(s.len());
        for ch in s.chars() {
            match ch {
                'A' => letters.push(Letter::A),
                'B' => letters.push(Letter::B),
                _ => return Err(SigmaParseError { input: s.to_string() }),
            }
        }
        Ok(SigmaWord(letters))
    }
}

impl Serialize for SigmaWord {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for SigmaWord {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(|e: SigmaParseError| D::Error::custom(e))
    }
}

/// A cell of the multiplication table.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub struct Cell {
    pub x: Ordinal,
    pub y: Ordinal,
}

// ---------------------------------------------------------------------------
// The type A layer scheme for c >= 1

fn ord(c: u32, n: u64) -> Ordinal {
    Ordinal::new(c, n)
}

/// `e_k`, the left coordinate of the even cell `cell(lambda+2k)`.
/// Enumerates everything below `lambda+w`: `e_0 = 0`, `e_{2i} = lambda`
/// for `i >= 1`, and the odd positions interleave old and new elements.
fn e_seq(c: u32, k: u64) -> Ordinal {
    if k == 0 {
        Ordinal::ZERO
    } else if k % 2 == 0 {
        ord(c, 0)
    } else {
        let i = (k - 1) / 2;
        if i % 2 == 0 {
            old_enum(c, i / 2)
        } else {
            ord(c, (i - 1) / 2)
        }
    }
}

/// The enumeration of `{z : z <= lambda+m}` used for the row part of
/// `L_m`: first `lambda..=lambda+m`, then the old elements.
fn v_at(c: u32, m: u64, q: u64) -> Ordinal {
    if q <= m {
        ord(c, q)
    } else {
        old_enum(c, q - m - 1)
    }
}

fn v_index(c: u32, m: u64, y: Ordinal) -> u64 {
    if y.block == c {
        debug_assert!(y.offset <= m);
        y.offset
    } else {
        m + 1 + old_index(c, y)
    }
}

/// `v` with `lambda+m` removed, used for the column part of `L_m`.
fn vp_at(c: u32, m: u64, q: u64) -> Ordinal {
    if q < m {
        ord(c, q)
    } else {
        old_enum(c, q - m)
    }
}

fn vp_index(c: u32, m: u64, x: Ordinal) -> u64 {
    if x.block == c {
        debug_assert!(x.offset < m);
        x.offset
    } else {
        m + old_index(c, x)
    }
}

/// If `(x, y)` is the even cell `(e_k, lambda+2k+2)`, the offset `2k`
/// of the even element occupying it.
fn even_cell_offset(c: u32, x: Ordinal, y: Ordinal) -> Option<u64> {
    if y.block == c && y.offset >= 2 && y.offset % 2 == 0 && x == e_seq(c, (y.offset - 2) / 2) {
        Some(y.offset - 2)
    } else {
        None
    }
}

/// Raw enumeration index (before the even-cell skip) of the single even
/// cell inside `L_m`; defined for even `m >= 2`.
fn even_raw_index(c: u32, m: u64) -> u64 {
    let k = (m - 2) / 2;
    let x = e_seq(c, k);
    2 * vp_index(c, m, x) + 1
}

/// The i-th cell of `L_m` (even cell skipped). Raw index `2q` is the
/// row cell `(lambda+m, v_q)`, raw `2q+1` the column cell
/// `(v'_q, lambda+m)`.
fn lm_cell(c: u32, m: u64, i: u64) -> Cell {
    let raw = if m >= 2 && m % 2 == 0 {
        let s = even_raw_index(c, m);
        if i >= s {
            i + 1
        } else {
            i
        }
    } else {
        i
    };
    if raw % 2 == 0 {
        Cell { x: ord(c, m), y: v_at(c, m, raw / 2) }
    } else {
        Cell { x: vp_at(c, m, raw / 2), y: ord(c, m) }
    }
}

/// Index of an odd (non-even) owned cell within its `L_m` enumeration.
fn lm_index(c: u32, m: u64, x: Ordinal, y: Ordinal) -> u64 {
    let raw = if x == ord(c, m) {
        2 * v_index(c, m, y)
    } else {
        debug_assert_eq!(y, ord(c, m));
        2 * vp_index(c, m, x) + 1
    };
    if m >= 2 && m % 2 == 0 {
        let s = even_raw_index(c, m);
        debug_assert_ne!(raw, s, "even cell reached lm_index");
        if raw > s {
            raw - 1
        } else {
            raw
        }
    } else {
        raw
    }
}

/// `(l, r)` of the block-`c` element `lambda+n` under a type A layer.
fn layer_cell_a(c: u32, n: u64) -> Result<Cell, AlgebraError> {
    if n % 2 == 0 {
        let k = n / 2;
        let y = n.checked_add(2).ok_or(AlgebraError::Overflow)?;
        Ok(Cell { x: e_seq(c, k), y: ord(c, y) })
    } else {
        let (m, i) = unpair((n - 1) / 2);
        Ok(lm_cell(c, m, i))
    }
}

/// Element occupying the owned cell `(x, y)` under a type A layer.
fn layer_elem_a(c: u32, x: Ordinal, y: Ordinal) -> Result<Ordinal, AlgebraError> {
    if let Some(n) = even_cell_offset(c, x, y) {
        return Ok(ord(c, n));
    }
    // The L-region index is the offset of the max coordinate, which is
    // the one lying in block c.
    let m = if x.block == c && y.block == c {
        x.offset.max(y.offset)
    } else if x.block == c {
        x.offset
    } else {
        y.offset
    };
    let i = lm_index(c, m, x, y);
    let j = pair(m, i).ok_or(AlgebraError::Overflow)?;
    let n = j
        .checked_mul(2)
        .and_then(|v| v.checked_add(1))
        .ok_or(AlgebraError::Overflow)?;
    Ok(ord(c, n))
}

// ---------------------------------------------------------------------------
// Public layer-cell interface

/// The cell `(l(z), r(z))` of a block-`c` element under the given
/// letter. Requires `c >= 1` and `z` in block `c`.
pub fn layer_cell(c: u32, letter: Letter, z: Ordinal) -> Result<Cell, AlgebraError> {
    if c == 0 {
        return Err(AlgebraError::NoLayers);
    }
    if z.block != c {
        return Err(AlgebraError::BlockMismatch(z, c));
    }
    let cell = layer_cell_a(c, z.offset)?;
    Ok(match letter {
        Letter::A => cell,
        Letter::B => Cell { x: cell.y, y: cell.x },
    })
}

/// The unique element whose cell is `(cell.x, cell.y)` in layer `c`
/// under the given letter; exact inverse of [`layer_cell`].
pub fn layer_cell_inverse(c: u32, letter: Letter, cell: Cell) -> Result<Ordinal, AlgebraError> {
    if c == 0 {
        return Err(AlgebraError::NoLayers);
    }
    let Cell { x, y } = match letter {
        Letter::A => cell,
        Letter::B => Cell { x: cell.y, y: cell.x },
    };
    let owner = x.max(y).block;
    if owner != c || x.block > c || y.block > c {
        return Err(AlgebraError::NotOwned(cell.x, cell.y, c));
    }
    layer_elem_a(c, x, y)
}

// ---------------------------------------------------------------------------
// The block-0 instantiation (universe = naturals, no old elements)

fn e0_seq(k: u64) -> u64 {
    if k % 2 == 0 {
        0
    } else {
        (k - 1) / 2
    }
}

#[cfg(test)]
fn lm0_size(m: u64) -> u64 {
    2 * m + 1 - u64::from(m >= 2 && m % 2 == 0)
}

fn even_raw_index0(m: u64) -> u64 {
    2 * e0_seq((m - 2) / 2) + 1
}

/// Closed form for `sum of lm0_size(t) for t < m`.
fn cum0(m: u64) -> u128 {
    if m == 0 {
        return 0;
    }
    (m as u128) * (m as u128) - ((m - 1) / 2) as u128
}

pub(crate) fn layer0_left_right(z: u64) -> (u64, u64) {
    if z % 2 == 0 {
        (e0_seq(z / 2), z + 2)
    } else {
        let j = (z - 1) / 2;
        // Find the L-region holding the j-th odd cell: the largest m
        // with cum0(m) <= j, located by a sqrt guess plus fix-up.
        let mut m = (j as f64).sqrt() as u64;
        while cum0(m + 1) <= j as u128 {
            m += 1;
        }
        while cum0(m) > j as u128 {
            m -= 1;
        }
        let i = j - cum0(m) as u64;
        let raw = if m >= 2 && m % 2 == 0 {
            let s = even_raw_index0(m);
            if i >= s {
                i + 1
            } else {
                i
            }
        } else {
            i
        };
        if raw % 2 == 0 {
            (m, raw / 2)
        } else {
            (raw / 2, m)
        }
    }
}

pub(crate) fn layer0_mul(x: u64, y: u64) -> Result<u64, AlgebraError> {
    if y >= 2 && y % 2 == 0 && x == e0_seq((y - 2) / 2) {
        return Ok(y - 2);
    }
    let m = x.max(y);
    let raw = if x == m { 2 * y } else { 2 * x + 1 };
    let i = if m >= 2 && m % 2 == 0 {
        let s = even_raw_index0(m);
        debug_assert_ne!(raw, s);
        if raw > s {
            raw - 1
        } else {
            raw
        }
    } else {
        raw
    };
    let j = cum0(m) + i as u128;
    u64::try_from(2 * j + 1).map_err(|_| AlgebraError::Overflow)
}

// ---------------------------------------------------------------------------
// Layered algebras

/// A base algebra on the naturals extended by the layers of a finite
/// sigma word. The universe is every ordinal with block at most
/// `sigma.len()`; queries beyond that horizon are errors.
#[derive(Clone, Debug, PartialEq)]
pub struct JtAlgebra {
    pub base: BaseAlgebra,
    pub sigma: SigmaWord,
}

impl JtAlgebra {
    pub fn new(base: BaseAlgebra, sigma: SigmaWord) -> Self {
        JtAlgebra { base, sigma }
    }

    /// Build from specifier strings, e.g. (`"cantor"`, `"AB"`).
    pub fn build(base_spec: &str, sigma: &str) -> Result<Self, AlgebraError> {
        let base: BaseAlgebra = base_spec.parse()?;
        let sigma: SigmaWord = sigma
            .parse()
            .map_err(|_| AlgebraError::BadBaseSpec(format!("sigma {sigma:?}")))?;
        Ok(JtAlgebra::new(base, sigma))
    }

    pub fn letter(&self, c: u32) -> Result<Letter, AlgebraError> {
        self.sigma
            .letter(c)
            .ok_or(AlgebraError::BeyondHorizon(Ordinal::limit(c)))
    }

    fn check_horizon(&self, z: Ordinal) -> Result<(), AlgebraError> {
        if z.block as usize > self.sigma.len() {
            Err(AlgebraError::BeyondHorizon(z))
        } else {
            Ok(())
        }
    }
}

impl JtOps for JtAlgebra {
    fn mul(&self, x: Ordinal, y: Ordinal) -> Result<Ordinal, AlgebraError> {
        self.check_horizon(x)?;
        self.check_horizon(y)?;
        let c = x.max(y).block;
        if c == 0 {
            return Ok(Ordinal::nat(self.base.mul_nat(x.offset, y.offset)?));
        }
        let (a, b) = match self.letter(c)? {
            Letter::A => (x, y),
            Letter::B => (y, x),
        };
        layer_elem_a(c, a, b)
    }

    fn left(&self, z: Ordinal) -> Result<Ordinal, AlgebraError> {
        self.check_horizon(z)?;
        if z.block == 0 {
            return Ok(Ordinal::nat(self.base.left_right_nat(z.offset)?.0));
        }
        Ok(layer_cell(z.block, self.letter(z.block)?, z)?.x)
    }

    fn right(&self, z: Ordinal) -> Result<Ordinal, AlgebraError> {
        self.check_horizon(z)?;
        if z.block == 0 {
            return Ok(Ordinal::nat(self.base.left_right_nat(z.offset)?.1));
        }
        Ok(layer_cell(z.block, self.letter(z.block)?, z)?.y)
    }

    fn horizon(&self) -> u32 {
        self.sigma.len() as u32
    }
}

/// Build a layered algebra from a base and a sigma word.
pub fn build_sigma(base: BaseAlgebra, sigma: SigmaWord) -> JtAlgebra {
    JtAlgebra::new(base, sigma)
}

/// One row of a layer table dump.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct LayerRow {
    pub z: Ordinal,
    pub l: Ordinal,
    pub r: Ordinal,
}

/// The first `count` rows `(z, l z, r z)` of layer `c` of an algebra.
pub fn describe_layer(alg: &JtAlgebra, c: u32, count: u64) -> Result<Vec<LayerRow>, AlgebraError> {
    if c as usize > alg.sigma.len() {
        return Err(AlgebraError::BeyondHorizon(Ordinal::limit(c)));
    }
    let mut rows = Vec::with_capacity(count as usize);
    for n in 0..count {
        let z = Ordinal::new(c, n);
        rows.push(LayerRow { z, l: alg.left(z)?, r: alg.right(z)? });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{axiom_check, JtOps};

    fn ord(s: &str) -> Ordinal {
        s.parse().unwrap()
    }

    fn alg(base: &str, sigma: &str) -> JtAlgebra {
        JtAlgebra::build(base, sigma).unwrap()
    }

    #[test]
    fn sigma_word_parse_display() {
        let w: SigmaWord = "AAB".parse().unwrap();
        assert_eq!(w.len(), 3);
        assert_eq!(w.letter(1), Some(Letter::A));
        assert_eq!(w.letter(3), Some(Letter::B));
        assert_eq!(w.letter(4), None);
        assert_eq!(w.to_string(), "AAB");
        assert_eq!("".parse::<SigmaWord>().unwrap(), SigmaWord::empty());
        assert!("AXB".parse::<SigmaWord>().is_err());
    }

    #[test]
    fn layer_cell_examples() {
        assert_eq!(
            layer_cell(1, Letter::A, ord("w")).unwrap(),
            Cell { x: ord("0"), y: ord("w+2") }
        );
        assert_eq!(
            layer_cell(1, Letter::A, ord("w+4")).unwrap(),
            Cell { x: ord("w"), y: ord("w+6") }
        );
        assert_eq!(
            layer_cell(1, Letter::B, ord("w")).unwrap(),
            Cell { x: ord("w+2"), y: ord("0") }
        );
        assert!(matches!(
            layer_cell(1, Letter::A, ord("5")),
            Err(AlgebraError::BlockMismatch(..))
        ));
    }

    #[test]
    fn layer_cell_inverse_examples() {
        assert_eq!(
            layer_cell_inverse(1, Letter::A, Cell { x: ord("0"), y: ord("w+2") }).unwrap(),
            ord("w")
        );
        assert!(matches!(
            layer_cell_inverse(1, Letter::A, Cell { x: ord("0"), y: ord("0") }),
            Err(AlgebraError::NotOwned(..))
        ));
        // Round-trip over a dense sample of new elements.
        for c in 1..=3u32 {
            for letter in [Letter::A, Letter::B] {
                for n in 0..10_000u64 {
                    let z = Ordinal::new(c, n);
                    let cell = layer_cell(c, letter, z).unwrap();
                    assert_eq!(cell.x.max(cell.y).block, c, "cell of {z} not owned by {c}");
                    assert_eq!(
                        layer_cell_inverse(c, letter, cell).unwrap(),
                        z,
                        "round-trip failed at layer {c} {letter:?} element {z}"
                    );
                }
            }
        }
    }

    #[test]
    fn per_layer_bijectivity_window() {
        // Injectivity on {lambda+n : n < 256} and surjectivity onto the
        // owned cells with offsets below a small bound.
        for c in 1..=2u32 {
            for letter in [Letter::A, Letter::B] {
                let cells: Vec<Cell> = (0..256)
                    .map(|n| layer_cell(c, letter, Ordinal::new(c, n)).unwrap())
                    .collect();
                let mut seen = std::collections::HashSet::new();
                for cell in &cells {
                    assert!(seen.insert((cell.x, cell.y)));
                }
                // Every owned cell in a small window is hit by the inverse.
                for xb in 0..=c {
                    for yb in 0..=c {
                        if xb != c && yb != c {
                            continue;
                        }
                        for xo in 0..12u64 {
                            for yo in 0..12u64 {
                                let cell = Cell { x: Ordinal::new(xb, xo), y: Ordinal::new(yb, yo) };
                                let z = layer_cell_inverse(c, letter, cell).unwrap();
                                assert_eq!(z.block, c);
                                assert_eq!(layer_cell(c, letter, z).unwrap(), cell);
                            }
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn type_a_b_inequalities() {
        for c in 1..=3u32 {
            for n in 0..256u64 {
                let z = Ordinal::new(c, n);
                let a = layer_cell(c, Letter::A, z).unwrap();
                assert!(a.x < z, "l({z}) = {} not below", a.x);
                assert!(a.y <= Ordinal::new(c, n + 2), "r({z}) = {} too large", a.y);
                let b = layer_cell(c, Letter::B, z).unwrap();
                assert!(b.y < z);
                assert!(b.x <= Ordinal::new(c, n + 2));
            }
        }
    }

    #[test]
    fn type_a_descent_reaches_base() {
        // Iterating l from lambda+n stays at most lambda+n and leaves
        // the layer in finitely many steps.
        for n in 0..256u64 {
            let start = Ordinal::new(1, n);
            let mut z = start;
            let mut steps = 0;
            while z.block == 1 {
                assert!(z <= start);
                z = layer_cell(1, Letter::A, z).unwrap().x;
                steps += 1;
                assert!(steps < 10_000);
            }
        }
    }

    #[test]
    fn build_sigma_examples() {
        // Empty word: equal to the base.
        let a = alg("cantor", "");
        assert_eq!(a.mul(ord("1"), ord("1")).unwrap(), ord("4"));
        assert!(matches!(a.mul(ord("w"), ord("0")), Err(AlgebraError::BeyondHorizon(_))));

        assert_eq!(alg("cantor", "A").right(ord("w")).unwrap(), ord("w+2"));
        assert_eq!(alg("cantor", "B").left(ord("w")).unwrap(), ord("w+2"));
    }

    #[test]
    fn describe_layer_examples() {
        let rows = describe_layer(&alg("cantor", "A"), 1, 3).unwrap();
        assert_eq!(rows.len(), 3);
        assert_eq!(rows[0].z, ord("w"));
        assert_eq!(rows[0].l, ord("0"));
        assert_eq!(rows[0].r, ord("w+2"));
        // The first odd element sits in the L-region of lambda itself:
        // one coordinate equals lambda, both are at most lambda.
        assert_eq!(rows[1].z, ord("w+1"));
        assert!(rows[1].l.max(rows[1].r) == ord("w"));

        assert!(matches!(
            describe_layer(&alg("cantor", "AB"), 5, 1),
            Err(AlgebraError::BeyondHorizon(_))
        ));
    }

    #[test]
    fn layer0_small_values() {
        assert_eq!(layer0_left_right(0), (0, 2));
        assert_eq!(layer0_mul(0, 0).unwrap(), 1);
        assert_eq!(layer0_left_right(1), (0, 0));
    }

    #[test]
    fn layer0_roundtrip_and_descent() {
        for z in 0..20_000u64 {
            let (l, r) = layer0_left_right(z);
            assert_eq!(layer0_mul(l, r).unwrap(), z, "round-trip failed at {z}");
            if z > 0 {
                assert!(l < z, "descent failed at {z}: l = {l}");
            }
        }
        // l(r^n(0)) enumerates every natural.
        let mut seen = std::collections::HashSet::new();
        let mut cur = 0u64;
        for _ in 0..4_000 {
            seen.insert(layer0_left_right(cur).0);
            cur = layer0_left_right(cur).1;
        }
        for x in 0..1_000u64 {
            assert!(seen.contains(&x), "{x} not enumerated");
        }
    }

    #[test]
    fn cum0_matches_region_sizes() {
        let mut acc = 0u128;
        for m in 0..2_000u64 {
            assert_eq!(cum0(m), acc);
            acc += lm0_size(m) as u128;
        }
    }

    #[test]
    fn axioms_all_short_words() {
        for base in ["cantor", "layer0"] {
            for sigma in ["", "A", "B", "AA", "AB", "BA", "BB", "ABA", "BAB"] {
                let a = alg(base, sigma);
                let report = axiom_check(&a, 48, 200, 7);
                assert!(
                    report.passed,
                    "axioms failed for base {base} sigma {sigma}: {:?}",
                    report.counterexample
                );
            }
        }
    }
}
