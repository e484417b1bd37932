//! Generation, coverage, Jónsson-property, and non-isomorphism analyses
//! of layered algebras.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use serde::Serialize;

use crate::algebra::{AlgebraError, JtOps};
use crate::layers::{JtAlgebra, Letter, SigmaWord};
use crate::ordinal::Ordinal;
use crate::terms::UStep;

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum AnalysisError {
    #[error("{0}")]
    Algebra(#[from] AlgebraError),
    #[error("no generator word from {from} to {to} within budget {budget}")]
    WordNotFound { from: Ordinal, to: Ordinal, budget: usize },
}

/// Windowed membership: block at most `bound.block`, offset strictly
/// below `bound.offset`. Bounds are windows, not order cuts, because an
/// order cut below a limit ordinal contains infinitely many elements.
pub fn in_window(z: Ordinal, bound: Ordinal) -> bool {
    z.block <= bound.block && z.offset < bound.offset
}

// ---------------------------------------------------------------------------
// Bounded closure

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub enum Predicted {
    WithinBase,
    Limit(Ordinal),
}

impl fmt::Display for Predicted {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Predicted::WithinBase => write!(f, "within base"),
            Predicted::Limit(o) => write!(f, "{o}"),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ClosureReport {
    pub requested: Vec<Ordinal>,
    pub bound: Ordinal,
    pub found: Vec<Ordinal>,
    pub frontier: Vec<Ordinal>,
    pub saturated: bool,
    #[serde(rename = "budgetExhausted")]
    pub budget_exhausted: bool,
    pub predicted: Predicted,
}

impl ClosureReport {
    pub fn contains(&self, z: Ordinal) -> bool {
        self.found.binary_search(&z).is_ok()
    }
}

/// Breadth-first closure of `seeds` under mul (all pairs), left, and
/// right. Elements inside the window are recorded as found; elements
/// outside it are kept as frontier and expanded under the unary
/// operations only, up to an offset cap, since the descent identities
/// route back into the window through unary chains.
pub fn closure_bounded(
    alg: &dyn JtOps,
    seeds: &[Ordinal],
    bound: Ordinal,
    budget: usize,
) -> ClosureReport {
    let cap = 8 * (bound.block as u64 + 1) * bound.offset + 64;
    let mut found: BTreeSet<Ordinal> = BTreeSet::new();
    let mut frontier: BTreeSet<Ordinal> = BTreeSet::new();
    let mut budget_exhausted = false;

    let classify = |z: Ordinal| -> Option<bool> {
        // Some(true) -> window, Some(false) -> frontier, None -> dropped.
        if in_window(z, bound) {
            Some(true)
        } else if z.block <= alg.horizon() && z.offset <= cap {
            Some(false)
        } else {
            None
        }
    };

    for &s in seeds {
        match classify(s) {
            Some(true) => {
                found.insert(s);
            }
            Some(false) => {
                frontier.insert(s);
            }
            None => {}
        }
    }

    let mut saturated = false;
    loop {
        let mut additions: Vec<Ordinal> = Vec::new();
        let produce = |r: Result<Ordinal, AlgebraError>, additions: &mut Vec<Ordinal>| {
            if let Ok(z) = r {
                additions.push(z);
            }
        };
        for &z in found.iter().chain(frontier.iter()) {
            produce(alg.left(z), &mut additions);
            produce(alg.right(z), &mut additions);
        }
        let found_vec: Vec<Ordinal> = found.iter().copied().collect();
        for &x in &found_vec {
            for &y in &found_vec {
                produce(alg.mul(x, y), &mut additions);
            }
        }
        let mut grew = false;
        for z in additions {
            match classify(z) {
                Some(true) => grew |= found.insert(z),
                Some(false) => grew |= frontier.insert(z),
                None => {}
            }
        }
        if !grew {
            saturated = true;
            break;
        }
        if found.len() + frontier.len() > budget {
            budget_exhausted = true;
            break;
        }
    }

    let max_seed = seeds.iter().copied().max();
    let predicted = match max_seed {
        Some(m) if m.block >= 1 => Predicted::Limit(Ordinal::limit(m.block + 1)),
        _ => Predicted::WithinBase,
    };

    ClosureReport {
        requested: seeds.to_vec(),
        bound,
        found: found.into_iter().collect(),
        frontier: frontier.into_iter().collect(),
        saturated,
        budget_exhausted,
        predicted,
    }
}

// ---------------------------------------------------------------------------
// Generator words

/// A word over {l, r} carrying an element of an algebra to another,
/// with the steps listed in application order (first applied first).
#[derive(Clone, Debug, Serialize)]
pub struct GeneratorWord {
    #[serde(serialize_with = "serialize_steps")]
    pub steps: Vec<UStep>,
    pub from: Ordinal,
    pub to: Ordinal,
    pub trace: Vec<Ordinal>,
}

fn serialize_steps<S: serde::Serializer>(steps: &[UStep], s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&steps_string(steps))
}

pub fn steps_string(steps: &[UStep]) -> String {
    if steps.is_empty() {
        return "e".to_string();
    }
    steps
        .iter()
        .map(|s| if *s == UStep::L { 'l' } else { 'r' })
        .collect()
}

/// Shortest word over {l, r} from `from` to `to`, found by breadth-first
/// search over unary reachability; falls back to the layer descent
/// pattern when the target is the base limit of `from`'s layer.
pub fn generator_word(
    alg: &JtAlgebra,
    from: Ordinal,
    to: Ordinal,
    budget: usize,
) -> Result<GeneratorWord, AnalysisError> {
    if from == to {
        return Ok(GeneratorWord { steps: vec![], from, to, trace: vec![from] });
    }
    let mut parent: BTreeMap<Ordinal, (Ordinal, UStep)> = BTreeMap::new();
    let mut queue: VecDeque<Ordinal> = VecDeque::new();
    queue.push_back(from);
    let mut visited: BTreeSet<Ordinal> = BTreeSet::new();
    visited.insert(from);
    while let Some(z) = queue.pop_front() {
        for (step, next) in [(UStep::L, alg.left(z)), (UStep::R, alg.right(z))] {
            let Ok(next) = next else { continue };
            if !visited.insert(next) {
                continue;
            }
            parent.insert(next, (z, step));
            if next == to {
                let mut steps = Vec::new();
                let mut trace = vec![to];
                let mut cur = to;
                while cur != from {
                    let (p, s) = parent[&cur];
                    steps.push(s);
                    trace.push(p);
                    cur = p;
                }
                steps.reverse();
                trace.reverse();
                return Ok(GeneratorWord { steps, from, to, trace });
            }
            if visited.len() < budget {
                queue.push_back(next);
            }
        }
        if visited.len() >= budget {
            break;
        }
    }
    // Fallback: the guaranteed descent pattern to the layer's limit.
    if to == Ordinal::limit(from.block) && from.block >= 1 {
        if let Some(w) = descent_word(alg, from, budget) {
            return Ok(w);
        }
    }
    Err(AnalysisError::WordNotFound { from, to, budget })
}

/// Walk from a layer element down to its limit `w*c` using the descent
/// guarantees of the layer scheme: take a unary step that stays in the
/// layer with a strictly smaller offset when one exists, otherwise step
/// across an even element first.
fn descent_word(alg: &JtAlgebra, from: Ordinal, budget: usize) -> Option<GeneratorWord> {
    let c = from.block;
    let target = Ordinal::limit(c);
    let mut steps = Vec::new();
    let mut trace = vec![from];
    let mut z = from;
    for _ in 0..budget {
        if z == target {
            return Some(GeneratorWord { steps, from, to: target, trace });
        }
        let l = alg.left(z).ok()?;
        let r = alg.right(z).ok()?;
        let (step, next) = if l == target {
            (UStep::L, l)
        } else if r == target {
            (UStep::R, r)
        } else if l.block == c && l.offset < z.offset {
            (UStep::L, l)
        } else if r.block == c && r.offset < z.offset {
            (UStep::R, r)
        } else {
            // Even element whose left coordinate leaves the layer: move
            // right to the next even element instead.
            (UStep::R, r)
        };
        steps.push(step);
        trace.push(next);
        z = next;
    }
    None
}

// ---------------------------------------------------------------------------
// Coverage

#[derive(Clone, Debug, Serialize)]
pub struct CoverageReport {
    pub g: Ordinal,
    pub mode: String,
    pub bound: Ordinal,
    pub nmax: u64,
    /// Window elements hit, with the first index `n` that hits each.
    pub covered: Vec<(Ordinal, u64)>,
}

impl CoverageReport {
    pub fn covers(&self, z: Ordinal) -> bool {
        self.covered.binary_search_by_key(&z, |&(o, _)| o).is_ok()
    }
}

/// The set `{l(r^n(g)) : n <= nmax}` (mode A) or `{r(l^n(g)) : n <= nmax}`
/// (mode B), intersected with the window of `bound`.
pub fn coverage_check(
    alg: &dyn JtOps,
    g: Ordinal,
    mode: Letter,
    bound: Ordinal,
    nmax: u64,
) -> Result<CoverageReport, AnalysisError> {
    let mut covered: BTreeMap<Ordinal, u64> = BTreeMap::new();
    let mut z = g;
    for n in 0..=nmax {
        let hit = match mode {
            Letter::A => alg.left(z)?,
            Letter::B => alg.right(z)?,
        };
        if in_window(hit, bound) {
            covered.entry(hit).or_insert(n);
        }
        if n < nmax {
            z = match mode {
                Letter::A => alg.right(z)?,
                Letter::B => alg.left(z)?,
            };
        }
    }
    Ok(CoverageReport {
        g,
        mode: mode.to_string(),
        bound,
        nmax,
        covered: covered.into_iter().collect(),
    })
}

// ---------------------------------------------------------------------------
// Type B generator certificates

/// Descent evidence for one candidate `g = lambda+m` in a type A top
/// layer: every `r(l^n(g))` observed along the l-descent, all at most
/// `g+2`, and a concrete element above that bound.
#[derive(Clone, Debug, Serialize)]
pub struct RefutationTrace {
    pub g: Ordinal,
    pub l_chain: Vec<Ordinal>,
    pub r_values: Vec<Ordinal>,
    pub max_r: Ordinal,
    pub bound_ok: bool,
    pub unreachable_witness: Ordinal,
}

#[derive(Clone, Debug, Serialize)]
#[serde(tag = "kind")]
pub enum TypeBCertificate {
    /// The top layer has letter B: its limit is a type B generator.
    Generator {
        g: Ordinal,
        coverage: CoverageReport,
        /// Every window element was reached.
        complete: bool,
    },
    /// The top layer has letter A: every top-layer candidate is refuted
    /// by the descent bound, and elements below the top limit lie in a
    /// proper subalgebra.
    Refutation {
        top: u32,
        candidates: Vec<RefutationTrace>,
        all_bounded: bool,
        dismissed_below: String,
    },
}

/// Certify item (1) or (2) of the A/B non-isomorphism lemma for the top
/// layer of `alg`. `bound.offset` fixes both the coverage window and the
/// candidate window; `nmax` caps the generator's unary chain.
pub fn typeb_certificate(
    alg: &JtAlgebra,
    bound: Ordinal,
    nmax: u64,
) -> Result<TypeBCertificate, AnalysisError> {
    let c = alg.sigma.len() as u32;
    if c == 0 {
        return Err(AlgebraError::NoLayers.into());
    }
    let top = Ordinal::limit(c);
    match alg.letter(c)? {
        Letter::B => {
            let window = Ordinal::new(c, bound.offset);
            let coverage = coverage_check(alg, top, Letter::B, window, nmax)?;
            let complete = (0..=c)
                .flat_map(|b| (0..window.offset).map(move |n| Ordinal::new(b, n)))
                .all(|z| coverage.covers(z));
            Ok(TypeBCertificate::Generator { g: top, coverage, complete })
        }
        Letter::A => {
            let mut candidates = Vec::new();
            for m in 0..bound.offset {
                let g = Ordinal::new(c, m);
                let cap = Ordinal::new(c, m + 2);
                let mut l_chain = vec![g];
                let mut r_values = Vec::new();
                let mut z = g;
                // The l-descent is strictly decreasing while it stays in
                // the top layer, and once it leaves, both unary images
                // stay inside the proper subalgebra below the limit.
                loop {
                    r_values.push(alg.right(z)?);
                    if z.block < c {
                        break;
                    }
                    z = alg.left(z)?;
                    l_chain.push(z);
                }
                let max_r = r_values.iter().copied().max().unwrap_or(Ordinal::ZERO);
                let bound_ok = max_r <= cap;
                candidates.push(RefutationTrace {
                    g,
                    l_chain,
                    r_values,
                    max_r,
                    bound_ok,
                    unreachable_witness: Ordinal::new(c, m + 4),
                });
            }
            let all_bounded = candidates.iter().all(|t| t.bound_ok);
            Ok(TypeBCertificate::Refutation {
                top: c,
                candidates,
                all_bounded,
                dismissed_below: format!(
                    "elements below {top} lie in the proper subalgebra {top} and cannot generate"
                ),
            })
        }
    }
}

// ---------------------------------------------------------------------------
// Jónsson window check

#[derive(Clone, Debug, Serialize)]
pub struct JonssonFailure {
    pub alpha: Ordinal,
    pub missing: Vec<Ordinal>,
    #[serde(rename = "budgetExhausted")]
    pub budget_exhausted: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct JonssonReport {
    pub bound: Ordinal,
    pub checked: u64,
    pub pass: bool,
    pub failures: Vec<JonssonFailure>,
}

/// Window restatement of the Jónsson property: every single element at
/// or above the first limit generates every window element below its
/// predicted closure.
pub fn jonsson_check(alg: &dyn JtOps, bound: Ordinal, budget: usize) -> JonssonReport {
    let mut checked = 0;
    let mut failures = Vec::new();
    for block in 1..=bound.block.min(alg.horizon()) {
        for offset in 0..bound.offset {
            let alpha = Ordinal::new(block, offset);
            checked += 1;
            let report = closure_bounded(alg, &[alpha], bound, budget);
            let missing: Vec<Ordinal> = (0..=block)
                .flat_map(|b| (0..bound.offset).map(move |n| Ordinal::new(b, n)))
                .filter(|&beta| !report.contains(beta))
                .collect();
            if !missing.is_empty() {
                failures.push(JonssonFailure {
                    alpha,
                    missing,
                    budget_exhausted: report.budget_exhausted,
                });
            }
        }
    }
    JonssonReport { bound, checked, pass: failures.is_empty(), failures }
}

// ---------------------------------------------------------------------------
// Non-isomorphism certificates for sigma words

#[derive(Clone, Debug, PartialEq, Eq, Serialize, thiserror::Error)]
#[serde(tag = "violation")]
pub enum ConstraintViolation {
    #[error("sigma word {which} does not begin with AAB")]
    Prefix { which: u8 },
    #[error("sigma word {which} has two consecutive A's at tail position {position}")]
    ConsecutiveA { which: u8, position: usize },
    #[error("the two sigma words are equal")]
    Equal,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct NonIsoCertificate {
    pub sigma1: SigmaWord,
    pub sigma2: SigmaWord,
    #[serde(rename = "firstDifference")]
    pub first_difference: usize,
    #[serde(rename = "constraintReport")]
    pub constraint_report: String,
}

fn check_word_constraints(word: &SigmaWord, which: u8) -> Result<(), ConstraintViolation> {
    let w = &word.0;
    if w.len() < 3 || w[0] != Letter::A || w[1] != Letter::A || w[2] != Letter::B {
        return Err(ConstraintViolation::Prefix { which });
    }
    let tail = &w[3..];
    for (i, pair) in tail.windows(2).enumerate() {
        if pair[0] == Letter::A && pair[1] == Letter::A {
            return Err(ConstraintViolation::ConsecutiveA { which, position: i });
        }
    }
    Ok(())
}

/// Validate the hypotheses of the different-sequence lemma for a pair of
/// sigma words and certify their non-isomorphism by the first index at
/// which they differ.
pub fn noniso_certificate(
    sigma1: &SigmaWord,
    sigma2: &SigmaWord,
) -> Result<NonIsoCertificate, ConstraintViolation> {
    check_word_constraints(sigma1, 1)?;
    check_word_constraints(sigma2, 2)?;
    if sigma1 == sigma2 {
        return Err(ConstraintViolation::Equal);
    }
    let first_difference = sigma1
        .0
        .iter()
        .zip(&sigma2.0)
        .position(|(a, b)| a != b)
        .unwrap_or(sigma1.len().min(sigma2.len()));
    Ok(NonIsoCertificate {
        sigma1: sigma1.clone(),
        sigma2: sigma2.clone(),
        first_difference,
        constraint_report: "prefix AAB and no-AA tail verified for both words".to_string(),
    })
}

/// Injective encoding of bit strings into admissible sigma words:
/// prefix `AAB`, then `0 -> AB` and `1 -> B`.
pub fn encode_delta(delta: &[bool]) -> SigmaWord {
    let mut letters = vec![Letter::A, Letter::A, Letter::B];
    for &bit in delta {
        if bit {
            letters.push(Letter::B);
        } else {
            letters.push(Letter::A);
            letters.push(Letter::B);
        }
    }
    SigmaWord(letters)
}
