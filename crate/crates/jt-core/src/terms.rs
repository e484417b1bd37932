//! The term language over one binary symbol `*` and the unary symbols
//! `l`, `r`, with normalization to m,u-form and the subalgebra
//! distributivity witnesses built on top of it.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::algebra::JtOps;
use crate::ordinal::Ordinal;

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum Term {
    Var(String),
    Mul(Box<Term>, Box<Term>),
    L(Box<Term>),
    R(Box<Term>),
}

impl Term {
    pub fn var(name: &str) -> Term {
        Term::Var(name.to_string())
    }

    pub fn mul(a: Term, b: Term) -> Term {
        Term::Mul(Box::new(a), Box::new(b))
    }

    pub fn l(a: Term) -> Term {
        Term::L(Box::new(a))
    }

    pub fn r(a: Term) -> Term {
        Term::R(Box::new(a))
    }

    pub fn node_count(&self) -> usize {
        match self {
            Term::Var(_) => 1,
            Term::Mul(a, b) => 1 + a.node_count() + b.node_count(),
            Term::L(a) | Term::R(a) => 1 + a.node_count(),
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            Term::Var(_) => 1,
            Term::Mul(a, b) => 1 + a.depth().max(b.depth()),
            Term::L(a) | Term::R(a) => 1 + a.depth(),
        }
    }

    /// Variable names in first-occurrence order.
    pub fn variables(&self) -> Vec<String> {
        let mut out = Vec::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut Vec<String>) {
        match self {
            Term::Var(v) => {
                if !out.iter().any(|x| x == v) {
                    out.push(v.clone());
                }
            }
            Term::Mul(a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
            Term::L(a) | Term::R(a) => a.collect_vars(out),
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(v) => write!(f, "{v}"),
            Term::Mul(a, b) => write!(f, "({a}*{b})"),
            Term::L(a) => write!(f, "l({a})"),
            Term::R(a) => write!(f, "r({a})"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum TermError {
    #[error("syntax error at position {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("term is not in m,u-form: {0} applies l/r above *")]
    NotMuForm(String),
    #[error("no binding for variable {0}")]
    MissingBinding(String),
    #[error("variable {0} was assigned to both sides of the split")]
    AmbiguousSide(String),
    #[error("variable {0} is on neither side of the split")]
    UnassignedSide(String),
}

// ---------------------------------------------------------------------------
// Parsing

struct Parser<'a> {
    input: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn new(s: &'a str) -> Self {
        Parser { input: s.as_bytes(), pos: 0 }
    }

    fn error(&self, msg: &str) -> TermError {
        TermError::Parse { pos: self.pos, msg: msg.to_string() }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.input.len() && self.input[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.input.get(self.pos).copied()
    }

    fn expect(&mut self, c: u8) -> Result<(), TermError> {
        if self.peek() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.error(&format!("expected '{}'", c as char)))
        }
    }

    // term := primary ("*" primary)*   (left-associative)
    fn term(&mut self) -> Result<Term, TermError> {
        let mut t = self.primary()?;
        while self.peek() == Some(b'*') {
            self.pos += 1;
            let rhs = self.primary()?;
            t = Term::mul(t, rhs);
        }
        Ok(t)
    }

    fn primary(&mut self) -> Result<Term, TermError> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let t = self.term()?;
                self.expect(b')')?;
                Ok(t)
            }
            Some(c) if c.is_ascii_alphabetic() || c == b'_' => {
                let ident = self.ident();
                if (ident == "l" || ident == "r") && self.peek() == Some(b'(') {
                    self.pos += 1;
                    let arg = self.term()?;
                    self.expect(b')')?;
                    Ok(if ident == "l" { Term::l(arg) } else { Term::r(arg) })
                } else {
                    Ok(Term::Var(ident))
                }
            }
            _ => Err(self.error("expected a variable, 'l(', 'r(', or '('")),
        }
    }

    fn ident(&mut self) -> String {
        let start = self.pos;
        while self.pos < self.input.len()
            && (self.input[self.pos].is_ascii_alphanumeric() || self.input[self.pos] == b'_')
        {
            self.pos += 1;
        }
        String::from_utf8_lossy(&self.input[start..self.pos]).into_owned()
    }
}

pub fn parse_term(text: &str) -> Result<Term, TermError> {
    let mut p = Parser::new(text);
    let t = p.term()?;
    if p.peek().is_some() {
        return Err(p.error("trailing input"));
    }
    Ok(t)
}

impl FromStr for Term {
    type Err = TermError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_term(s)
    }
}

// ---------------------------------------------------------------------------
// Normalization

/// Normal form under the rewrite system
/// `{ l(X*Y) -> X, r(X*Y) -> Y, l(Z)*r(Z) -> Z }` applied to fixpoint.
/// Every rule strictly shrinks the term, so innermost rewriting halts;
/// the result is always an m,u-term.
pub fn normalize(t: &Term) -> Term {
    match t {
        Term::Var(_) => t.clone(),
        Term::L(a) => match normalize(a) {
            Term::Mul(x, _) => *x,
            a => Term::L(Box::new(a)),
        },
        Term::R(a) => match normalize(a) {
            Term::Mul(_, y) => *y,
            a => Term::R(Box::new(a)),
        },
        Term::Mul(a, b) => {
            let a = normalize(a);
            let b = normalize(b);
            if let (Term::L(z1), Term::R(z2)) = (&a, &b) {
                if z1 == z2 {
                    return (**z1).clone();
                }
            }
            Term::Mul(Box::new(a), Box::new(b))
        }
    }
}

/// Sigma-equivalence, decided by normal form comparison.
pub fn sigma_equiv(t1: &Term, t2: &Term) -> bool {
    normalize(t1) == normalize(t2)
}

// ---------------------------------------------------------------------------
// m,u-decomposition

/// A word over `{l, r}`, stored outermost-first: `"rl"` applied to `p`
/// is `r(l(p))`. The empty word is the identity.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub struct UnaryWord(pub Vec<UStep>);

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum UStep {
    L,
    R,
}

impl UnaryWord {
    pub fn empty() -> Self {
        UnaryWord(Vec::new())
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    /// Wrap a term: innermost (last) step is applied first.
    pub fn apply(&self, t: Term) -> Term {
        self.0.iter().rev().fold(t, |acc, step| match step {
            UStep::L => Term::l(acc),
            UStep::R => Term::r(acc),
        })
    }

    /// Evaluate the word at an algebra element, innermost step first.
    pub fn apply_element(
        &self,
        alg: &dyn JtOps,
        z: Ordinal,
    ) -> Result<Ordinal, crate::algebra::AlgebraError> {
        let mut cur = z;
        for step in self.0.iter().rev() {
            cur = match step {
                UStep::L => alg.left(cur)?,
                UStep::R => alg.right(cur)?,
            };
        }
        Ok(cur)
    }
}

impl fmt::Display for UnaryWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "e");
        }
        for step in &self.0 {
            write!(f, "{}", if *step == UStep::L { 'l' } else { 'r' })?;
        }
        Ok(())
    }
}

impl From<UnaryWord> for String {
    fn from(w: UnaryWord) -> String {
        w.to_string()
    }
}

impl TryFrom<String> for UnaryWord {
    type Error = String;

    fn try_from(s: String) -> Result<Self, String> {
        if s == "e" {
            return Ok(UnaryWord::empty());
        }
        let mut steps = Vec::new();
        for c in s.chars() {
            match c {
                'l' => steps.push(UStep::L),
                'r' => steps.push(UStep::R),
                _ => return Err(format!("invalid unary word {s:?}")),
            }
        }
        Ok(UnaryWord(steps))
    }
}

/// A purely multiplicative skeleton over numbered slots.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Skeleton {
    Slot(usize),
    Mul(Box<Skeleton>, Box<Skeleton>),
}

impl Skeleton {
    pub fn slot_count(&self) -> usize {
        match self {
            Skeleton::Slot(_) => 1,
            Skeleton::Mul(a, b) => a.slot_count() + b.slot_count(),
        }
    }

    /// Substitute a term for each slot.
    pub fn instantiate(&self, args: &[Term]) -> Term {
        match self {
            Skeleton::Slot(i) => args[*i].clone(),
            Skeleton::Mul(a, b) => Term::mul(a.instantiate(args), b.instantiate(args)),
        }
    }
}

impl fmt::Display for Skeleton {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Skeleton::Slot(i) => write!(f, "#{i}"),
            Skeleton::Mul(a, b) => write!(f, "({a}*{b})"),
        }
    }
}

/// An m,u-term split into its multiplicative skeleton and its unary
/// arguments `u_i(x_i)`, in left-to-right slot order.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct MuDecomposition {
    pub skeleton: Skeleton,
    pub unaries: Vec<(UnaryWord, String)>,
}

impl MuDecomposition {
    /// Reassemble the original term.
    pub fn term(&self) -> Term {
        let args: Vec<Term> = self
            .unaries
            .iter()
            .map(|(w, v)| w.apply(Term::var(v)))
            .collect();
        self.skeleton.instantiate(&args)
    }
}

/// Check whether `t` is an m,u-term (no `l`/`r` above any `*`) and read
/// off its decomposition.
pub fn is_mu(t: &Term) -> Result<MuDecomposition, TermError> {
    let mut unaries = Vec::new();
    let skeleton = mu_walk(t, &mut unaries)?;
    Ok(MuDecomposition { skeleton, unaries })
}

fn mu_walk(t: &Term, unaries: &mut Vec<(UnaryWord, String)>) -> Result<Skeleton, TermError> {
    match t {
        Term::Mul(a, b) => {
            let sa = mu_walk(a, unaries)?;
            let sb = mu_walk(b, unaries)?;
            Ok(Skeleton::Mul(Box::new(sa), Box::new(sb)))
        }
        _ => {
            let mut word = Vec::new();
            let mut cur = t;
            loop {
                match cur {
                    Term::L(a) => {
                        word.push(UStep::L);
                        cur = a;
                    }
                    Term::R(a) => {
                        word.push(UStep::R);
                        cur = a;
                    }
                    Term::Var(v) => {
                        let idx = unaries.len();
                        unaries.push((UnaryWord(word), v.clone()));
                        return Ok(Skeleton::Slot(idx));
                    }
                    Term::Mul(_, _) => return Err(TermError::NotMuForm(t.to_string())),
                }
            }
        }
    }
}

/// For a decomposition of `p' = m(w_1, ..., w_n)`, produce the unary
/// words `t_i` with `t_i(p')` sigma-equivalent to `w_i`. The word for
/// slot `i` is the root-to-slot path read leaf-to-root: descending into
/// a left factor contributes an innermost `l`, a right factor an `r`.
pub fn extract_unaries(d: &MuDecomposition) -> Vec<UnaryWord> {
    let mut out = vec![UnaryWord::empty(); d.unaries.len()];
    let mut path = Vec::new();
    extract_walk(&d.skeleton, &mut path, &mut out);
    out
}

fn extract_walk(s: &Skeleton, path: &mut Vec<UStep>, out: &mut [UnaryWord]) {
    match s {
        Skeleton::Slot(i) => {
            // Path was collected root-first; the word is applied
            // innermost-at-root, so reverse it.
            let mut word: Vec<UStep> = path.clone();
            word.reverse();
            out[*i] = UnaryWord(word);
        }
        Skeleton::Mul(a, b) => {
            path.push(UStep::L);
            extract_walk(a, path, out);
            path.pop();
            path.push(UStep::R);
            extract_walk(b, path, out);
            path.pop();
        }
    }
}

// ---------------------------------------------------------------------------
// Distributivity witnesses

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub enum Side {
    #[serde(rename = "x-side")]
    X,
    #[serde(rename = "y-side")]
    Y,
}

/// Witness data for the subalgebra distributivity condition: the outer
/// skeleton `s` of the normal form of `p` and the extracted unary words
/// `t_i`, each tagged with the side of the variable its slot reads.
#[derive(Clone, Debug)]
pub struct DistributivityWitness {
    pub p: Term,
    pub normal: Term,
    pub skeleton: Skeleton,
    pub extracted: Vec<(UnaryWord, Side)>,
    pub unaries: Vec<(UnaryWord, String)>,
}

impl DistributivityWitness {
    /// The right-hand side `s(t_1(q), ..., t_n(q))` of the witness
    /// identity, for an arbitrary inner term `q`.
    pub fn outer_applied(&self, q: &Term) -> Term {
        let args: Vec<Term> = self
            .extracted
            .iter()
            .map(|(w, _)| w.apply(q.clone()))
            .collect();
        self.skeleton.instantiate(&args)
    }
}

/// Build the witness for `p` under a caller-supplied variable split.
/// Every variable of `p` must be on exactly one side.
pub fn distributivity_witness(
    p: &Term,
    x_vars: &[String],
    y_vars: &[String],
) -> Result<DistributivityWitness, TermError> {
    for v in x_vars {
        if y_vars.contains(v) {
            return Err(TermError::AmbiguousSide(v.clone()));
        }
    }
    let normal = normalize(p);
    let d = is_mu(&normal).expect("normal forms are m,u-terms");
    let words = extract_unaries(&d);
    let mut extracted = Vec::with_capacity(words.len());
    for (word, (_, var)) in words.into_iter().zip(&d.unaries) {
        let side = if x_vars.iter().any(|v| v == var) {
            Side::X
        } else if y_vars.iter().any(|v| v == var) {
            Side::Y
        } else {
            return Err(TermError::UnassignedSide(var.clone()));
        };
        extracted.push((word, side));
    }
    Ok(DistributivityWitness {
        p: p.clone(),
        normal,
        skeleton: d.skeleton.clone(),
        extracted,
        unaries: d.unaries,
    })
}

// ---------------------------------------------------------------------------
// Evaluation

/// Structural evaluation of a term in an algebra.
#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum EvalError {
    #[error("{0}")]
    Term(#[from] TermError),
    #[error("{0}")]
    Algebra(#[from] crate::algebra::AlgebraError),
}

pub fn evaluate(
    t: &Term,
    env: &HashMap<String, Ordinal>,
    alg: &dyn JtOps,
) -> Result<Ordinal, EvalError> {
    match t {
        Term::Var(v) => env
            .get(v)
            .copied()
            .ok_or_else(|| TermError::MissingBinding(v.clone()).into()),
        Term::Mul(a, b) => {
            let x = evaluate(a, env, alg)?;
            let y = evaluate(b, env, alg)?;
            Ok(alg.mul(x, y)?)
        }
        Term::L(a) => {
            let z = evaluate(a, env, alg)?;
            Ok(alg.left(z)?)
        }
        Term::R(a) => {
            let z = evaluate(a, env, alg)?;
            Ok(alg.right(z)?)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::BaseAlgebra;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn t(s: &str) -> Term {
        parse_term(s).unwrap()
    }

    fn w(s: &str) -> UnaryWord {
        UnaryWord::try_from(s.to_string()).unwrap()
    }

    #[test]
    fn parse_examples() {
        assert_eq!(t("l(x*y)"), Term::l(Term::mul(Term::var("x"), Term::var("y"))));
        assert_eq!(
            t("l(z)*r(z)"),
            Term::mul(Term::l(Term::var("z")), Term::r(Term::var("z")))
        );
        assert_eq!(
            t("r(l(x*(y*z)))"),
            Term::r(Term::l(Term::mul(
                Term::var("x"),
                Term::mul(Term::var("y"), Term::var("z"))
            )))
        );
        // "*" is left-associative.
        assert_eq!(t("a*b*c"), Term::mul(Term::mul(Term::var("a"), Term::var("b")), Term::var("c")));
        assert!(parse_term("l(x").is_err());
        assert!(parse_term("x)").is_err());
        assert!(parse_term("").is_err());
    }

    #[test]
    fn normalize_examples() {
        assert_eq!(normalize(&t("l(x*y)")), t("x"));
        assert_eq!(normalize(&t("l(z)*r(z)")), t("z"));
        assert_eq!(normalize(&t("r(l((a*b)*c))")), t("b"));
    }

    #[test]
    fn is_mu_examples() {
        let d = is_mu(&t("x")).unwrap();
        assert_eq!(d.skeleton, Skeleton::Slot(0));
        assert_eq!(d.unaries, vec![(UnaryWord::empty(), "x".to_string())]);

        let d = is_mu(&t("l(x)*r(l(y))")).unwrap();
        assert_eq!(d.skeleton.slot_count(), 2);
        assert_eq!(
            d.unaries,
            vec![(w("l"), "x".to_string()), (w("rl"), "y".to_string())]
        );
        assert_eq!(d.term(), t("l(x)*r(l(y))"));

        assert!(matches!(is_mu(&t("l(x*y)")), Err(TermError::NotMuForm(_))));
    }

    #[test]
    fn sigma_equiv_examples() {
        assert!(sigma_equiv(&t("l(x)*r(x)"), &t("x")));
        assert!(!sigma_equiv(&t("x"), &t("y")));
        assert!(sigma_equiv(&t("l(r(x*(y*z)))"), &t("y")));

        // Semantic confirmation of the last pair in the Cantor base.
        let alg = BaseAlgebra::Cantor;
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..1000 {
            let env: HashMap<String, Ordinal> = ["x", "y", "z"]
                .iter()
                .map(|v| (v.to_string(), Ordinal::nat(rng.random_range(0..500))))
                .collect();
            let a = evaluate(&t("l(r(x*(y*z)))"), &env, &alg).unwrap();
            let b = evaluate(&t("y"), &env, &alg).unwrap();
            assert_eq!(a, b);
        }
    }

    #[test]
    fn evaluate_examples() {
        let alg = BaseAlgebra::Cantor;
        let env: HashMap<String, Ordinal> = [("x", 0), ("y", 0)]
            .iter()
            .map(|&(v, n)| (v.to_string(), Ordinal::nat(n)))
            .collect();
        assert_eq!(evaluate(&t("x*y"), &env, &alg).unwrap(), Ordinal::nat(0));

        let env: HashMap<String, Ordinal> = [("x", 3), ("y", 5)]
            .iter()
            .map(|&(v, n)| (v.to_string(), Ordinal::nat(n)))
            .collect();
        assert_eq!(evaluate(&t("l(x*y)"), &env, &alg).unwrap(), Ordinal::nat(3));

        let env: HashMap<String, Ordinal> = [("x", 1), ("y", 1)]
            .iter()
            .map(|&(v, n)| (v.to_string(), Ordinal::nat(n)))
            .collect();
        assert_eq!(evaluate(&t("x*y"), &env, &alg).unwrap(), Ordinal::nat(4));

        assert!(matches!(
            evaluate(&t("q"), &HashMap::new(), &alg),
            Err(EvalError::Term(TermError::MissingBinding(_)))
        ));
    }

    #[test]
    fn extract_unaries_examples() {
        let d = is_mu(&t("r(x)")).unwrap();
        assert_eq!(extract_unaries(&d), vec![UnaryWord::empty()]);

        let d = is_mu(&t("l(x)*r(y)")).unwrap();
        assert_eq!(extract_unaries(&d), vec![w("l"), w("r")]);

        let p = t("(a*b)*c");
        let d = is_mu(&p).unwrap();
        let words = extract_unaries(&d);
        assert_eq!(words, vec![w("ll"), w("rl"), w("r")]);
        // t1(p) = l(l(p)), t2(p) = r(l(p)), t3(p) = r(p); each
        // normalizes to its slot's argument.
        for (ti, (ui, var)) in words.iter().zip(&d.unaries) {
            let applied = ti.apply(p.clone());
            let slot_term = ui.apply(Term::var(var));
            assert!(sigma_equiv(&applied, &slot_term));
        }
    }

    #[test]
    fn distributivity_witness_examples() {
        let wn = distributivity_witness(
            &t("x*y"),
            &["x".to_string()],
            &["y".to_string()],
        )
        .unwrap();
        assert_eq!(wn.skeleton.slot_count(), 2);
        assert_eq!(wn.extracted, vec![(w("l"), Side::X), (w("r"), Side::Y)]);
        // The witness identity x*y = l(p)*r(p) at p = x*y.
        assert!(sigma_equiv(&wn.outer_applied(&wn.p), &wn.p));

        let wn = distributivity_witness(&t("x"), &["x".to_string()], &[]).unwrap();
        assert_eq!(wn.extracted, vec![(UnaryWord::empty(), Side::X)]);

        let wn = distributivity_witness(
            &t("l(x)*(y*r(x))"),
            &["x".to_string()],
            &["y".to_string()],
        )
        .unwrap();
        let words: Vec<UnaryWord> = wn.extracted.iter().map(|(w, _)| w.clone()).collect();
        let sides: Vec<Side> = wn.extracted.iter().map(|(_, s)| *s).collect();
        assert_eq!(words, vec![w("l"), w("lr"), w("rr")]);
        assert_eq!(sides, vec![Side::X, Side::Y, Side::X]);
        for ((ti, _), (ui, var)) in wn.extracted.iter().zip(&wn.unaries) {
            assert!(sigma_equiv(&ti.apply(wn.p.clone()), &ui.apply(Term::var(var))));
        }

        assert!(matches!(
            distributivity_witness(&t("x*y"), &["x".to_string()], &[]),
            Err(TermError::UnassignedSide(_))
        ));
        assert!(matches!(
            distributivity_witness(
                &t("x"),
                &["x".to_string()],
                &["x".to_string()]
            ),
            Err(TermError::AmbiguousSide(_))
        ));
    }

    /// Every term over {a, b} with at most 4 nodes normalizes, and the
    /// result is an m,u-term.
    #[test]
    fn small_term_sweep() {
        let terms = all_terms(4, &["a", "b"]);
        assert!(terms.len() > 50);
        for t in &terms {
            let n = normalize(t);
            assert!(n.node_count() <= t.node_count());
            assert!(is_mu(&n).is_ok(), "{t} normalized to non-mu {n}");
            // Idempotence.
            assert_eq!(normalize(&n), n);
        }
    }

    pub(crate) fn all_terms(max_nodes: usize, vars: &[&str]) -> Vec<Term> {
        let mut by_size: Vec<Vec<Term>> = vec![Vec::new(); max_nodes + 1];
        for &v in vars {
            by_size[1].push(Term::var(v));
        }
        for n in 2..=max_nodes {
            let mut level = Vec::new();
            for t in &by_size[n - 1] {
                level.push(Term::l(t.clone()));
                level.push(Term::r(t.clone()));
            }
            for k in 1..n - 1 {
                for a in &by_size[k] {
                    for b in &by_size[n - 1 - k] {
                        level.push(Term::mul(a.clone(), b.clone()));
                    }
                }
            }
            by_size[n] = level;
        }
        by_size.into_iter().flatten().collect()
    }

    /// Random m,u-terms: each extracted word recovers its slot argument
    /// up to sigma-equivalence.
    #[test]
    fn unary_extraction_random_mu_terms() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for _ in 0..1000 {
            let slots = rng.random_range(1..6usize);
            let mut skel = Skeleton::Slot(0);
            for i in 1..slots {
                // Grow by multiplying on a new slot, alternating sides.
                skel = if rng.random_bool(0.5) {
                    Skeleton::Mul(Box::new(skel), Box::new(Skeleton::Slot(i)))
                } else {
                    Skeleton::Mul(Box::new(Skeleton::Slot(i)), Box::new(skel))
                };
            }
            let unaries: Vec<(UnaryWord, String)> = (0..slots)
                .map(|i| {
                    let len = rng.random_range(0..4usize);
                    let word = UnaryWord(
                        (0..len)
                            .map(|_| if rng.random_bool(0.5) { UStep::L } else { UStep::R })
                            .collect(),
                    );
                    (word, format!("v{i}"))
                })
                .collect();
            // Renumber slots to left-to-right order via a reparse.
            let term = MuDecomposition {
                skeleton: skel,
                unaries: unaries.clone(),
            }
            .term();
            let d = is_mu(&term).unwrap();
            let words = extract_unaries(&d);
            for (ti, (ui, var)) in words.iter().zip(&d.unaries) {
                assert!(
                    sigma_equiv(&ti.apply(term.clone()), &ui.apply(Term::var(var))),
                    "failed on {term}"
                );
            }
        }
    }

    fn arb_term() -> impl Strategy<Value = Term> {
        let leaf = prop_oneof![
            Just(Term::var("x")),
            Just(Term::var("y")),
            Just(Term::var("z")),
        ];
        leaf.prop_recursive(5, 24, 2, |inner| {
            prop_oneof![
                (inner.clone(), inner.clone()).prop_map(|(a, b)| Term::mul(a, b)),
                inner.clone().prop_map(Term::l),
                inner.prop_map(Term::r),
            ]
        })
    }

    proptest! {
        #[test]
        fn print_reparse_roundtrip(t in arb_term()) {
            let printed = t.to_string();
            prop_assert_eq!(parse_term(&printed).unwrap(), t);
        }

        /// Evaluation agrees before and after normalization whenever
        /// the original term evaluates at all (normal forms are
        /// smaller, so they cannot overflow when the original does not).
        #[test]
        fn normalize_sound_in_layer0(t in arb_term(), e0 in 0u64..50, e1 in 0u64..50, e2 in 0u64..50) {
            let alg = BaseAlgebra::Layer0;
            let env: HashMap<String, Ordinal> = [("x", e0), ("y", e1), ("z", e2)]
                .iter()
                .map(|&(v, n)| (v.to_string(), Ordinal::nat(n)))
                .collect();
            if let Ok(a) = evaluate(&t, &env, &alg) {
                let b = evaluate(&normalize(&t), &env, &alg).unwrap();
                prop_assert_eq!(a, b);
            }
        }

        #[test]
        fn normalize_result_is_mu(t in arb_term()) {
            prop_assert!(is_mu(&normalize(&t)).is_ok());
        }
    }
}
