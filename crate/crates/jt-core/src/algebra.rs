//! The Jónsson-Tarski operation interface and the base algebras on the
//! naturals from which layered algebras grow.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::layers;
use crate::ordinal::Ordinal;

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum AlgebraError {
    #[error("element {0} is beyond the horizon of this algebra")]
    BeyondHorizon(Ordinal),
    #[error("arithmetic overflow while computing an operation")]
    Overflow,
    #[error("cell ({0}, {1}) is not owned by layer {2}")]
    NotOwned(Ordinal, Ordinal, u32),
    #[error("element {0} does not lie in block {1}")]
    BlockMismatch(Ordinal, u32),
    #[error("the sigma word is empty; no layer to certify")]
    NoLayers,
    #[error("malformed permutation: {0}")]
    BadPermutation(String),
    #[error("unknown base specifier {0:?}")]
    BadBaseSpec(String),
}

/// The three Jónsson-Tarski operations. `horizon` is the largest block
/// the algebra materializes; block-0-only algebras report 0.
pub trait JtOps {
    fn mul(&self, x: Ordinal, y: Ordinal) -> Result<Ordinal, AlgebraError>;
    fn left(&self, z: Ordinal) -> Result<Ordinal, AlgebraError>;
    fn right(&self, z: Ordinal) -> Result<Ordinal, AlgebraError>;
    fn horizon(&self) -> u32;
}

// ---------------------------------------------------------------------------
// Permutations

/// A finite-support bijection of the naturals, given as disjoint cycles.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Permutation {
    forward: HashMap<u64, u64>,
    backward: HashMap<u64, u64>,
}

impl Permutation {
    pub fn identity() -> Self {
        Permutation::default()
    }

    pub fn from_cycles(cycles: &[Vec<u64>]) -> Result<Self, AlgebraError> {
        let mut forward = HashMap::new();
        let mut backward = HashMap::new();
        for cycle in cycles {
            if cycle.is_empty() {
                continue;
            }
            for (i, &a) in cycle.iter().enumerate() {
                let b = cycle[(i + 1) % cycle.len()];
                if forward.insert(a, b).is_some() {
                    return Err(AlgebraError::BadPermutation(format!(
                        "element {a} appears in two cycles"
                    )));
                }
                backward.insert(b, a);
            }
        }
        Ok(Permutation { forward, backward })
    }

    pub fn apply(&self, x: u64) -> u64 {
        *self.forward.get(&x).unwrap_or(&x)
    }

    pub fn invert(&self, x: u64) -> u64 {
        *self.backward.get(&x).unwrap_or(&x)
    }
}

/// Parse a cycle list like `(0 1)(2 5)`.
fn parse_cycles(s: &str) -> Result<Vec<Vec<u64>>, AlgebraError> {
    let s = s.trim();
    let mut cycles = Vec::new();
    let mut rest = s;
    while !rest.is_empty() {
        let rest2 = rest.trim_start();
        let Some(inner) = rest2.strip_prefix('(') else {
            return Err(AlgebraError::BadPermutation(format!("expected '(' in {s:?}")));
        };
        let Some(end) = inner.find(')') else {
            return Err(AlgebraError::BadPermutation(format!("unclosed cycle in {s:?}")));
        };
        let body = &inner[..end];
        let cycle: Result<Vec<u64>, _> = body.split_whitespace().map(|t| t.parse()).collect();
        let cycle =
            cycle.map_err(|_| AlgebraError::BadPermutation(format!("bad entry in {body:?}")))?;
        cycles.push(cycle);
        rest = &inner[end + 1..];
    }
    Ok(cycles)
}

// ---------------------------------------------------------------------------
// Base algebras on the naturals

/// A Jónsson-Tarski algebra with universe the naturals, used as block 0
/// of a layered algebra.
#[derive(Clone, Debug, PartialEq)]
pub enum BaseAlgebra {
    /// `mul(x, y) = (x+y)(x+y+1)/2 + y`, with `l` the first coordinate.
    Cantor,
    /// The layer scheme instantiated at block 0 with no old elements.
    Layer0,
    /// A base relabeled through a finite-support permutation.
    Permuted { inner: Box<BaseAlgebra>, perm: Permutation },
}

impl BaseAlgebra {
    pub fn cantor() -> Self {
        BaseAlgebra::Cantor
    }

    pub fn layer0() -> Self {
        BaseAlgebra::Layer0
    }

    pub fn permuted(inner: BaseAlgebra, perm: Permutation) -> Self {
        BaseAlgebra::Permuted { inner: Box::new(inner), perm }
    }

    pub fn mul_nat(&self, x: u64, y: u64) -> Result<u64, AlgebraError> {
        match self {
            BaseAlgebra::Cantor => {
                let w = x as u128 + y as u128;
                let v = w
                    .checked_mul(w + 1)
                    .map(|t| t / 2 + y as u128)
                    .ok_or(AlgebraError::Overflow)?;
                u64::try_from(v).map_err(|_| AlgebraError::Overflow)
            }
            BaseAlgebra::Layer0 => layers::layer0_mul(x, y),
            BaseAlgebra::Permuted { inner, perm } => {
                Ok(perm.apply(inner.mul_nat(perm.invert(x), perm.invert(y))?))
            }
        }
    }

    pub fn left_right_nat(&self, z: u64) -> Result<(u64, u64), AlgebraError> {
        match self {
            BaseAlgebra::Cantor => {
                // Invert the pairing: w(w+1)/2 <= z < (w+1)(w+2)/2.
                let mut w = (((8.0 * z as f64 + 1.0).sqrt() - 1.0) / 2.0) as u64;
                let tri = |w: u64| (w as u128) * (w as u128 + 1) / 2;
                while tri(w + 1) <= z as u128 {
                    w += 1;
                }
                while tri(w) > z as u128 {
                    w -= 1;
                }
                let y = z - tri(w) as u64;
                Ok((w - y, y))
            }
            BaseAlgebra::Layer0 => Ok(layers::layer0_left_right(z)),
            BaseAlgebra::Permuted { inner, perm } => {
                let (l, r) = inner.left_right_nat(perm.invert(z))?;
                Ok((perm.apply(l), perm.apply(r)))
            }
        }
    }
}

impl fmt::Display for BaseAlgebra {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BaseAlgebra::Cantor => write!(f, "cantor"),
            BaseAlgebra::Layer0 => write!(f, "layer0"),
            BaseAlgebra::Permuted { inner, .. } => write!(f, "perm({inner};...)"),
        }
    }
}

impl FromStr for BaseAlgebra {
    type Err = AlgebraError;

    /// Base specifier strings: `cantor`, `layer0`,
    /// `perm(cantor;(0 1)(2 5))`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        match s {
            "cantor" => Ok(BaseAlgebra::Cantor),
            "layer0" => Ok(BaseAlgebra::Layer0),
            _ => {
                if let Some(inner) = s.strip_prefix("perm(").and_then(|t| t.strip_suffix(')')) {
                    let Some((base, cycles)) = inner.split_once(';') else {
                        return Err(AlgebraError::BadBaseSpec(s.to_string()));
                    };
                    let base: BaseAlgebra = base.parse()?;
                    let perm = Permutation::from_cycles(&parse_cycles(cycles)?)?;
                    Ok(BaseAlgebra::permuted(base, perm))
                } else {
                    Err(AlgebraError::BadBaseSpec(s.to_string()))
                }
            }
        }
    }
}

impl JtOps for BaseAlgebra {
    fn mul(&self, x: Ordinal, y: Ordinal) -> Result<Ordinal, AlgebraError> {
        if x.block != 0 {
            return Err(AlgebraError::BeyondHorizon(x));
        }
        if y.block != 0 {
            return Err(AlgebraError::BeyondHorizon(y));
        }
        Ok(Ordinal::nat(self.mul_nat(x.offset, y.offset)?))
    }

    fn left(&self, z: Ordinal) -> Result<Ordinal, AlgebraError> {
        if z.block != 0 {
            return Err(AlgebraError::BeyondHorizon(z));
        }
        Ok(Ordinal::nat(self.left_right_nat(z.offset)?.0))
    }

    fn right(&self, z: Ordinal) -> Result<Ordinal, AlgebraError> {
        if z.block != 0 {
            return Err(AlgebraError::BeyondHorizon(z));
        }
        Ok(Ordinal::nat(self.left_right_nat(z.offset)?.1))
    }

    fn horizon(&self) -> u32 {
        0
    }
}

// ---------------------------------------------------------------------------
// Axiom checking

#[derive(Clone, Debug, Serialize)]
pub struct AxiomCounterexample {
    pub identity: String,
    pub inputs: Vec<Ordinal>,
    pub got: Vec<Ordinal>,
}

#[derive(Clone, Debug, Serialize)]
pub struct AxiomReport {
    pub passed: bool,
    pub checks: u64,
    pub counterexample: Option<AxiomCounterexample>,
}

/// Exhaustively check identities (1)-(3) for operands with offset below
/// `bound` in every materialized block, plus injectivity of
/// `z -> (l z, r z)` on the same window and `samples` random spot checks
/// above the bound.
pub fn axiom_check(alg: &dyn JtOps, bound: u64, samples: u64, seed: u64) -> AxiomReport {
    let mut checks = 0u64;
    let blocks = alg.horizon();

    let fail = |checks: u64, identity: &str, inputs: Vec<Ordinal>, got: Vec<Ordinal>| AxiomReport {
        passed: false,
        checks,
        counterexample: Some(AxiomCounterexample {
            identity: identity.to_string(),
            inputs,
            got,
        }),
    };

    let window: Vec<Ordinal> = (0..=blocks)
        .flat_map(|b| (0..bound).map(move |n| Ordinal::new(b, n)))
        .collect();

    // (1) and (2): l(x*y) = x, r(x*y) = y.
    for &x in &window {
        for &y in &window {
            checks += 1;
            let z = match alg.mul(x, y) {
                Ok(z) => z,
                Err(_) => return fail(checks, "mul total", vec![x, y], vec![]),
            };
            let (l, r) = match (alg.left(z), alg.right(z)) {
                (Ok(l), Ok(r)) => (l, r),
                _ => return fail(checks, "left/right total", vec![z], vec![]),
            };
            if l != x || r != y {
                return fail(checks, "l(x*y)=x, r(x*y)=y", vec![x, y], vec![z, l, r]);
            }
        }
    }

    // (3) and injectivity: mul(l z, r z) = z, and z -> (l z, r z) injective.
    let mut seen: HashMap<(Ordinal, Ordinal), Ordinal> = HashMap::new();
    for &z in &window {
        checks += 1;
        let (l, r) = match (alg.left(z), alg.right(z)) {
            (Ok(l), Ok(r)) => (l, r),
            _ => return fail(checks, "left/right total", vec![z], vec![]),
        };
        if let Some(&prev) = seen.get(&(l, r)) {
            return fail(checks, "z -> (l z, r z) injective", vec![prev, z], vec![l, r]);
        }
        seen.insert((l, r), z);
        match alg.mul(l, r) {
            Ok(back) if back == z => {}
            Ok(back) => return fail(checks, "l(z)*r(z)=z", vec![z], vec![l, r, back]),
            Err(_) => return fail(checks, "mul total on (l z, r z)", vec![z, l, r], vec![]),
        }
    }

    // Random spot checks above the exhaustive bound.
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..samples {
        checks += 1;
        let z = Ordinal::new(
            rng.random_range(0..=blocks),
            rng.random_range(bound..bound.saturating_mul(4).max(bound + 1)),
        );
        let (l, r) = match (alg.left(z), alg.right(z)) {
            (Ok(l), Ok(r)) => (l, r),
            _ => return fail(checks, "left/right total", vec![z], vec![]),
        };
        match alg.mul(l, r) {
            Ok(back) if back == z => {}
            Ok(back) => return fail(checks, "l(z)*r(z)=z", vec![z], vec![l, r, back]),
            Err(_) => return fail(checks, "mul total on (l z, r z)", vec![z, l, r], vec![]),
        }
    }

    AxiomReport { passed: true, checks, counterexample: None }
}
