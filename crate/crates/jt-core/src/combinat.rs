//! Finite algebras, subalgebra lattices, set-mappings, free sets, and
//! the proper-subalgebra / union-cover proof pipelines at finite scale.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum CombinatError {
    #[error("operation table is malformed: {0}")]
    BadTable(String),
    #[error("algebra too large for exhaustive search: size {size} exceeds {max}")]
    TooLarge { size: usize, max: usize },
    #[error("set-mapping violates x not-in f(x) at x = {0}")]
    NotSetMapping(usize),
    #[error("subalgebra chain is invalid: {0}")]
    BadChain(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("subalgebra lattice is not distributive")]
    NotDistributive,
    #[error("free set is empty; instance is degenerate")]
    EmptyFreeSet,
    #[error("no proper nonempty cover exists for this instance")]
    NoProperCover,
    #[error("could not parse finite algebra file: {0}")]
    Parse(String),
}

// ---------------------------------------------------------------------------
// Finite algebras

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Operation {
    pub arity: usize,
    /// Row-major table of length `size^arity`; index is the mixed-radix
    /// encoding of the argument tuple, first argument most significant.
    pub table: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FinAlgebra {
    pub size: usize,
    pub operations: Vec<Operation>,
}

/// Subsets of the universe as bitmasks; universes are capped at 64.
pub type Mask = u64;

impl FinAlgebra {
    pub fn new(size: usize, operations: Vec<Operation>) -> Result<Self, CombinatError> {
        if size > 64 {
            return Err(CombinatError::TooLarge { size, max: 64 });
        }
        for op in &operations {
            let expect = size.pow(op.arity as u32);
            if op.table.len() != expect {
                return Err(CombinatError::BadTable(format!(
                    "arity {} table has {} entries, expected {}",
                    op.arity,
                    op.table.len(),
                    expect
                )));
            }
            if op.table.iter().any(|&v| v >= size) {
                return Err(CombinatError::BadTable("table value out of range".into()));
            }
        }
        Ok(FinAlgebra { size, operations })
    }

    /// The chain unary algebra: one unary operation `i -> max(i-1, 0)`.
    pub fn chain_unary(size: usize) -> Self {
        let table = (0..size).map(|i| i.saturating_sub(1)).collect();
        FinAlgebra::new(size, vec![Operation { arity: 1, table }]).unwrap()
    }

    pub fn full_mask(&self) -> Mask {
        if self.size == 64 {
            Mask::MAX
        } else {
            (1 << self.size) - 1
        }
    }

    /// Least superset of `s` closed under all operations.
    pub fn closure(&self, s: Mask) -> Mask {
        let mut cur = s;
        loop {
            let mut next = cur;
            for op in &self.operations {
                self.apply_into(op, cur, &mut next);
            }
            if next == cur {
                return cur;
            }
            cur = next;
        }
    }

    fn apply_into(&self, op: &Operation, s: Mask, out: &mut Mask) {
        let elems: Vec<usize> = (0..self.size).filter(|&i| s >> i & 1 == 1).collect();
        let mut args = vec![0usize; op.arity];
        self.apply_rec(op, &elems, &mut args, 0, out);
    }

    fn apply_rec(&self, op: &Operation, elems: &[usize], args: &mut [usize], d: usize, out: &mut Mask) {
        if d == op.arity {
            let mut idx = 0;
            for &a in args.iter() {
                idx = idx * self.size + a;
            }
            *out |= 1 << op.table[idx];
            return;
        }
        for &e in elems {
            args[d] = e;
            self.apply_rec(op, elems, args, d + 1, out);
        }
    }

    pub fn is_closed(&self, s: Mask) -> bool {
        self.closure(s) == s
    }

    /// The Moore family of all closed subsets, ascending as integers.
    /// Exhaustive over all subsets; sizes above 16 are rejected.
    pub fn subalgebras(&self) -> Result<Vec<Mask>, CombinatError> {
        if self.size > 16 {
            return Err(CombinatError::TooLarge { size: self.size, max: 16 });
        }
        let full = self.full_mask();
        Ok((0..=full).filter(|&s| self.is_closed(s)).collect())
    }
}

pub fn mask_of(elems: &[usize]) -> Mask {
    elems.iter().fold(0, |m, &e| m | 1 << e)
}

pub fn mask_elems(m: Mask) -> Vec<usize> {
    (0..64).filter(|&i| m >> i & 1 == 1).collect()
}

// ---------------------------------------------------------------------------
// Text format

impl FinAlgebra {
    /// Parse the text format: `size n`, then per operation `op arity=a`
    /// followed by `n^(a-1)` rows of `n` values (one row of one value
    /// for arity 0).
    pub fn parse_text(text: &str) -> Result<Self, CombinatError> {
        let mut tokens: Vec<&str> = Vec::new();
        for line in text.lines() {
            let line = line.split('#').next().unwrap_or("");
            tokens.extend(line.split_whitespace());
        }
        let mut it = tokens.into_iter().peekable();
        let err = |m: &str| CombinatError::Parse(m.to_string());
        if it.next() != Some("size") {
            return Err(err("expected leading \"size n\""));
        }
        let size: usize = it
            .next()
            .and_then(|t| t.parse().ok())
            .ok_or_else(|| err("bad size"))?;
        let mut operations = Vec::new();
        while let Some(tok) = it.next() {
            if tok != "op" {
                return Err(err(&format!("expected \"op\", got {tok:?}")));
            }
            let arity: usize = it
                .next()
                .and_then(|t| t.strip_prefix("arity="))
                .and_then(|t| t.parse().ok())
                .ok_or_else(|| err("expected arity=a after op"))?;
            let count = size.pow(arity as u32);
            let mut table = Vec::with_capacity(count);
            for _ in 0..count {
                let v: usize = it
                    .next()
                    .and_then(|t| t.parse().ok())
                    .ok_or_else(|| err("table entry missing or not a number"))?;
                table.push(v);
            }
            operations.push(Operation { arity, table });
        }
        FinAlgebra::new(size, operations)
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("size {}\n", self.size);
        for op in &self.operations {
            let _ = writeln!(out, "op arity={}", op.arity);
            let row = if op.arity == 0 { 1 } else { self.size };
            for chunk in op.table.chunks(row) {
                let line: Vec<String> = chunk.iter().map(|v| v.to_string()).collect();
                let _ = writeln!(out, "{}", line.join(" "));
            }
        }
        out
    }
}

// ---------------------------------------------------------------------------
// Distributivity

#[derive(Clone, Debug, Serialize)]
pub struct DistributivityResult {
    pub distributive: bool,
    /// A violating triple `(h, k, m)` of closed sets when not.
    pub witness: Option<(Vec<usize>, Vec<usize>, Vec<usize>)>,
    pub lattice_size: usize,
}

/// Test `H ^ (K v M) = (H ^ K) v (H ^ M)` over all triples of closed
/// sets, with meet = intersection and join = closure of union.
pub fn distributive_check(alg: &FinAlgebra) -> Result<DistributivityResult, CombinatError> {
    let subs = alg.subalgebras()?;
    let join = |a: Mask, b: Mask| alg.closure(a | b);
    for &h in &subs {
        for &k in &subs {
            for &m in &subs {
                let lhs = h & join(k, m);
                let rhs = join(h & k, h & m);
                if lhs != rhs {
                    return Ok(DistributivityResult {
                        distributive: false,
                        witness: Some((mask_elems(h), mask_elems(k), mask_elems(m))),
                        lattice_size: subs.len(),
                    });
                }
            }
        }
    }
    Ok(DistributivityResult { distributive: true, witness: None, lattice_size: subs.len() })
}

/// The finite instance of the B-minus-A lemma: with `A <= B` closed and
/// every singleton of `S` generating disjointly from `B \ A`, the whole
/// of `<S>` stays disjoint from `B \ A`.
pub fn lemma_bminusa_check(
    alg: &FinAlgebra,
    a: Mask,
    b: Mask,
    s: Mask,
) -> Result<bool, CombinatError> {
    if !alg.is_closed(a) || !alg.is_closed(b) {
        return Err(CombinatError::Precondition("A and B must be closed".into()));
    }
    if a & !b != 0 {
        return Err(CombinatError::Precondition("A must be contained in B".into()));
    }
    let gap = b & !a;
    for e in mask_elems(s) {
        if alg.closure(1 << e) & gap != 0 {
            return Err(CombinatError::Precondition(format!(
                "<{e}> meets B \\ A, hypothesis fails"
            )));
        }
    }
    Ok(alg.closure(s) & gap == 0)
}

// ---------------------------------------------------------------------------
// Set-mappings and free sets

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SetMapping {
    pub size: usize,
    pub images: Vec<Vec<usize>>,
}

impl SetMapping {
    pub fn new(size: usize, images: Vec<Vec<usize>>) -> Result<Self, CombinatError> {
        if images.len() != size {
            return Err(CombinatError::BadTable(format!(
                "{} image sets for size {}",
                images.len(),
                size
            )));
        }
        for (x, img) in images.iter().enumerate() {
            if img.contains(&x) {
                return Err(CombinatError::NotSetMapping(x));
            }
            if img.iter().any(|&v| v >= size) {
                return Err(CombinatError::BadTable(format!("image of {x} out of range")));
            }
        }
        Ok(SetMapping { size, images })
    }

    pub fn is_free(&self, x: &[usize]) -> bool {
        for &a in x {
            for &b in x {
                if self.images[b].contains(&a) {
                    return false;
                }
            }
        }
        true
    }

    /// Symmetrized conflict graph: `a -- b` iff either lies in the
    /// other's image. Freeness is symmetric, so this loses nothing.
    fn conflict_adjacency(&self) -> Vec<BTreeSet<usize>> {
        let mut adj = vec![BTreeSet::new(); self.size];
        for (b, img) in self.images.iter().enumerate() {
            for &a in img {
                if a != b {
                    adj[a].insert(b);
                    adj[b].insert(a);
                }
            }
        }
        adj
    }
}

const MAX_EXACT: usize = 40;

/// Exact maximum free set by branch and bound on the conflict graph.
/// Rejects instances larger than 40 elements.
pub fn max_free(f: &SetMapping) -> Result<Vec<usize>, CombinatError> {
    if f.size > MAX_EXACT {
        return Err(CombinatError::TooLarge { size: f.size, max: MAX_EXACT });
    }
    let adj_sets = f.conflict_adjacency();
    let adj: Vec<u64> = adj_sets
        .iter()
        .map(|s| s.iter().fold(0u64, |m, &v| m | 1 << v))
        .collect();
    let full: u64 = if f.size == 64 { u64::MAX } else { (1 << f.size) - 1 };
    let mut best: u64 = 0;

    fn bnb(adj: &[u64], candidates: u64, current: u64, best: &mut u64) {
        if (current | candidates).count_ones() <= (*best).count_ones() {
            return;
        }
        if candidates == 0 {
            if current.count_ones() > (*best).count_ones() {
                *best = current;
            }
            return;
        }
        // Branch on the candidate of maximum degree within the
        // candidate set; ties break on ascending index.
        let mut pick = 0usize;
        let mut pick_deg = -1i64;
        let mut c = candidates;
        while c != 0 {
            let v = c.trailing_zeros() as usize;
            c &= c - 1;
            let deg = (adj[v] & candidates).count_ones() as i64;
            if deg > pick_deg {
                pick_deg = deg;
                pick = v;
            }
        }
        // Include pick.
        bnb(adj, candidates & !adj[pick] & !(1 << pick), current | 1 << pick, best);
        // Exclude pick.
        bnb(adj, candidates & !(1 << pick), current, best);
    }

    bnb(&adj, full, 0, &mut best);
    let out = mask_elems(best);
    debug_assert!(f.is_free(&out));
    Ok(out)
}

/// Maximal free set built greedily in ascending-degree order (ties on
/// ascending index).
pub fn greedy_free(f: &SetMapping) -> Vec<usize> {
    let adj = f.conflict_adjacency();
    let mut order: Vec<usize> = (0..f.size).collect();
    order.sort_by_key(|&v| (adj[v].len(), v));
    let mut chosen: Vec<usize> = Vec::new();
    for v in order {
        if chosen.iter().all(|&u| !adj[v].contains(&u)) {
            chosen.push(v);
        }
    }
    chosen.sort_unstable();
    chosen
}

/// Partition of the domain into free classes by greedy conflict-graph
/// coloring in ascending index order. Classes are free, disjoint, and
/// cover the domain; no quantitative bound is claimed.
pub fn partition_free(f: &SetMapping) -> Vec<Vec<usize>> {
    let adj = f.conflict_adjacency();
    let mut color = vec![usize::MAX; f.size];
    let mut classes: Vec<Vec<usize>> = Vec::new();
    for v in 0..f.size {
        let used: BTreeSet<usize> = adj[v]
            .iter()
            .filter(|&&u| color[u] != usize::MAX)
            .map(|&u| color[u])
            .collect();
        let c = (0..).find(|c| !used.contains(c)).unwrap();
        color[v] = c;
        if c == classes.len() {
            classes.push(Vec::new());
        }
        classes[c].push(v);
    }
    classes
}

// ---------------------------------------------------------------------------
// Subalgebra chains and the proof pipelines

/// A strictly increasing chain of subuniverses ending at the full
/// universe, with one designated element per gap.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubChain {
    pub algebra: FinAlgebra,
    /// `chain[0] < chain[1] < ... < chain[k]`, each closed, last full.
    pub chain: Vec<Vec<usize>>,
    /// `enumeration[b]` lies in `chain[b+1] \ chain[b]`.
    pub enumeration: Vec<usize>,
}

impl SubChain {
    pub fn validate(&self) -> Result<(), CombinatError> {
        let k = self.chain.len();
        if k < 2 {
            return Err(CombinatError::BadChain("need at least two chain members".into()));
        }
        let masks: Vec<Mask> = self.chain.iter().map(|v| mask_of(v)).collect();
        for (i, &m) in masks.iter().enumerate() {
            if !self.algebra.is_closed(m) {
                return Err(CombinatError::BadChain(format!("member {i} is not closed")));
            }
        }
        for w in masks.windows(2) {
            if w[0] & !w[1] != 0 || w[0] == w[1] {
                return Err(CombinatError::BadChain("chain is not strictly increasing".into()));
            }
        }
        if *masks.last().unwrap() != self.algebra.full_mask() {
            return Err(CombinatError::BadChain("last member must be the full universe".into()));
        }
        if self.enumeration.len() != k - 1 {
            return Err(CombinatError::BadChain(format!(
                "expected {} enumeration entries, got {}",
                k - 1,
                self.enumeration.len()
            )));
        }
        for (b, &j) in self.enumeration.iter().enumerate() {
            let gap = masks[b + 1] & !masks[b];
            if gap >> j & 1 != 1 {
                return Err(CombinatError::BadChain(format!(
                    "enumeration entry {j} is not in gap {b}"
                )));
            }
        }
        Ok(())
    }

    pub fn gap(&self, b: usize) -> Mask {
        mask_of(&self.chain[b + 1]) & !mask_of(&self.chain[b])
    }

    pub fn steps(&self) -> usize {
        self.chain.len() - 1
    }
}

/// The set-mapping `f(a) = { b != a : <j_a> meets gap(b) }` induced by
/// a subalgebra chain.
pub fn build_setmap_from_chain(sc: &SubChain) -> Result<SetMapping, CombinatError> {
    sc.validate()?;
    let k = sc.steps();
    let mut images = Vec::with_capacity(k);
    for a in 0..k {
        let gen = sc.algebra.closure(1 << sc.enumeration[a]);
        let img: Vec<usize> = (0..k)
            .filter(|&b| b != a && gen & sc.gap(b) != 0)
            .collect();
        images.push(img);
    }
    SetMapping::new(k, images)
}

#[derive(Clone, Debug, Serialize)]
pub struct ProperSubalgebraWitness {
    pub setmap: SetMapping,
    pub free_set: Vec<usize>,
    pub xi: usize,
    pub s_indices: Vec<usize>,
    pub s_elements: Vec<usize>,
    pub generated: Vec<usize>,
    pub gap_disjoint: bool,
    pub proper: bool,
}

/// Run the proper-subalgebra pipeline: build the induced set-mapping,
/// take a maximum free set, drop one index, and verify that the
/// generated subuniverse avoids the dropped gap and is proper.
pub fn proper_subalgebra_pipeline(sc: &SubChain) -> Result<ProperSubalgebraWitness, CombinatError> {
    sc.validate()?;
    let dist = distributive_check(&sc.algebra)?;
    if !dist.distributive {
        return Err(CombinatError::NotDistributive);
    }
    let setmap = build_setmap_from_chain(sc)?;
    let free_set = if setmap.size <= MAX_EXACT {
        max_free(&setmap)?
    } else {
        greedy_free(&setmap)
    };
    if free_set.is_empty() {
        return Err(CombinatError::EmptyFreeSet);
    }
    let xi = free_set[0];
    let s_indices: Vec<usize> = free_set[1..].to_vec();
    let s_elements: Vec<usize> = s_indices.iter().map(|&a| sc.enumeration[a]).collect();
    let generated_mask = sc.algebra.closure(mask_of(&s_elements));
    let gap_disjoint = generated_mask & sc.gap(xi) == 0;
    let proper = generated_mask != sc.algebra.full_mask();
    Ok(ProperSubalgebraWitness {
        setmap,
        free_set,
        xi,
        s_indices,
        s_elements,
        generated: mask_elems(generated_mask),
        gap_disjoint,
        proper,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct CoverMember {
    pub class_index: usize,
    pub kept_indices: Vec<usize>,
    pub elements: Vec<usize>,
    pub generated: Vec<usize>,
    pub proper: bool,
    /// Set when this member keeps its whole class and generates
    /// everything, which the finite collapse of the drop-tail family
    /// cannot avoid.
    pub degenerate: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct UnionCover {
    pub classes: Vec<Vec<usize>>,
    pub members: Vec<CoverMember>,
    pub covers: bool,
    pub all_proper: bool,
}

/// Run the union-cover pipeline: partition the indices into free
/// classes and, within each class, build the drop-tail family of
/// generated subuniverses.
pub fn union_cover_pipeline(sc: &SubChain) -> Result<UnionCover, CombinatError> {
    sc.validate()?;
    let dist = distributive_check(&sc.algebra)?;
    if !dist.distributive {
        return Err(CombinatError::NotDistributive);
    }
    let setmap = build_setmap_from_chain(sc)?;
    let classes = partition_free(&setmap);
    let mut members = Vec::new();
    let mut union: Mask = 0;
    for (ci, class) in classes.iter().enumerate() {
        for n in 0..class.len() {
            let kept: Vec<usize> = class[..=n].to_vec();
            let elements: Vec<usize> = kept.iter().map(|&a| sc.enumeration[a]).collect();
            let generated_mask = sc.algebra.closure(mask_of(&elements));
            let proper = generated_mask != sc.algebra.full_mask();
            let degenerate = n + 1 == class.len() && !proper;
            union |= generated_mask;
            members.push(CoverMember {
                class_index: ci,
                kept_indices: kept,
                elements,
                generated: mask_elems(generated_mask),
                proper,
                degenerate,
            });
        }
    }
    if members.iter().all(|m| !m.proper) {
        return Err(CombinatError::NoProperCover);
    }
    // The enumerated elements are what the infinite argument covers;
    // the rest of the universe is covered by the chain members below.
    let enumerated = mask_of(&sc.enumeration);
    let covers = enumerated & !union == 0;
    let all_proper = members.iter().all(|m| m.proper);
    Ok(UnionCover { classes, members, covers, all_proper })
}

// ---------------------------------------------------------------------------
// DOT export

/// Export a family of closed sets as a DOT Hasse diagram.
pub fn lattice_dot(subs: &[Mask]) -> String {
    let mut out = String::from("digraph lattice {\n  rankdir=BT;\n");
    let label = |m: Mask| {
        let elems = mask_elems(m);
        if elems.is_empty() {
            "{}".to_string()
        } else {
            format!(
                "{{{}}}",
                elems.iter().map(|e| e.to_string()).collect::<Vec<_>>().join(",")
            )
        }
    };
    for &m in subs {
        let _ = writeln!(out, "  \"{}\";", label(m));
    }
    for &a in subs {
        for &b in subs {
            if a != b && a & !b == 0 {
                // Cover relation: nothing strictly between.
                let between = subs
                    .iter()
                    .any(|&c| c != a && c != b && a & !c == 0 && c & !b == 0);
                if !between {
                    let _ = writeln!(out, "  \"{}\" -> \"{}\";", label(a), label(b));
                }
            }
        }
    }
    out.push_str("}\n");
    out
}
