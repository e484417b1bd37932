//! Python bindings for the core term, algebra, and combinatorics APIs.

use std::collections::HashMap;

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use jt_core::analysis;
use jt_core::combinat::{self, SetMapping};
use jt_core::layers::{JtAlgebra, Letter, SigmaWord};
use jt_core::ordinal::Ordinal;
use jt_core::terms;

fn bad<E: std::fmt::Display>(e: E) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn ord(s: &str) -> PyResult<Ordinal> {
    s.parse().map_err(bad)
}

/// Normal form of a term, as a string.
#[pyfunction]
fn normalize(term: &str) -> PyResult<String> {
    let t = terms::parse_term(term).map_err(bad)?;
    Ok(terms::normalize(&t).to_string())
}

/// Whether two terms denote the same operation in every model.
#[pyfunction]
fn equiv(term1: &str, term2: &str) -> PyResult<bool> {
    let t1 = terms::parse_term(term1).map_err(bad)?;
    let t2 = terms::parse_term(term2).map_err(bad)?;
    Ok(terms::sigma_equiv(&t1, &t2))
}

/// Encode a bit string like "01" into an admissible layer word.
#[pyfunction]
fn encode(bits: &str) -> PyResult<String> {
    let delta: Vec<bool> = bits
        .chars()
        .map(|c| match c {
            '0' => Ok(false),
            '1' => Ok(true),
            other => Err(PyValueError::new_err(format!("bad bit {other:?}"))),
        })
        .collect::<PyResult<_>>()?;
    Ok(analysis::encode_delta(&delta).to_string())
}

/// First index where two admissible layer words differ; raises on
/// inadmissible or equal words.
#[pyfunction]
fn noniso(sigma1: &str, sigma2: &str) -> PyResult<usize> {
    let s1: SigmaWord = sigma1.parse().map_err(bad)?;
    let s2: SigmaWord = sigma2.parse().map_err(bad)?;
    let cert = analysis::noniso_certificate(&s1, &s2).map_err(bad)?;
    Ok(cert.first_difference)
}

/// Maximum free set of the set-mapping `i -> images[i]`.
#[pyfunction]
fn max_free(images: Vec<Vec<usize>>) -> PyResult<Vec<usize>> {
    let f = SetMapping { size: images.len(), images };
    combinat::max_free(&f).map_err(bad)
}

/// Greedy free set (linear-time lower bound).
#[pyfunction]
fn greedy_free(images: Vec<Vec<usize>>) -> PyResult<Vec<usize>> {
    let f = SetMapping { size: images.len(), images };
    Ok(combinat::greedy_free(&f))
}

/// Partition of the index set into free classes.
#[pyfunction]
fn partition_free(images: Vec<Vec<usize>>) -> PyResult<Vec<Vec<usize>>> {
    let f = SetMapping { size: images.len(), images };
    Ok(combinat::partition_free(&f))
}

/// A layered algebra over a base, addressed by ordinal strings like
/// "w*2+5".
#[pyclass]
struct Algebra {
    inner: JtAlgebra,
    base_spec: String,
}

#[pymethods]
impl Algebra {
    #[new]
    #[pyo3(signature = (base="cantor", sigma=""))]
    fn new(base: &str, sigma: &str) -> PyResult<Self> {
        Ok(Algebra {
            inner: JtAlgebra::build(base, sigma).map_err(bad)?,
            base_spec: base.to_string(),
        })
    }

    fn mul(&self, x: &str, y: &str) -> PyResult<String> {
        use jt_core::algebra::JtOps;
        Ok(self.inner.mul(ord(x)?, ord(y)?).map_err(bad)?.to_string())
    }

    fn left(&self, z: &str) -> PyResult<String> {
        use jt_core::algebra::JtOps;
        Ok(self.inner.left(ord(z)?).map_err(bad)?.to_string())
    }

    fn right(&self, z: &str) -> PyResult<String> {
        use jt_core::algebra::JtOps;
        Ok(self.inner.right(ord(z)?).map_err(bad)?.to_string())
    }

    /// Evaluate a term under `env`, a dict of variable -> ordinal string.
    fn eval(&self, term: &str, env: HashMap<String, String>) -> PyResult<String> {
        let t = terms::parse_term(term).map_err(bad)?;
        let env: HashMap<String, Ordinal> = env
            .into_iter()
            .map(|(k, v)| Ok((k, ord(&v)?)))
            .collect::<PyResult<_>>()?;
        Ok(terms::evaluate(&t, &env, &self.inner).map_err(bad)?.to_string())
    }

    #[pyo3(signature = (bound=64, samples=128, seed=0))]
    fn axiom_check(&self, bound: u64, samples: u64, seed: u64) -> bool {
        jt_core::algebra::axiom_check(&self.inner, bound, samples, seed).passed
    }

    /// Elements below `bound` generated from `seeds`.
    #[pyo3(signature = (seeds, bound, budget=1_000_000))]
    fn closure(&self, seeds: Vec<String>, bound: &str, budget: usize) -> PyResult<Vec<String>> {
        let seeds: Vec<Ordinal> = seeds.iter().map(|s| ord(s)).collect::<PyResult<_>>()?;
        let rep = analysis::closure_bounded(&self.inner, &seeds, ord(bound)?, budget);
        Ok(rep.found.iter().map(|z| z.to_string()).collect())
    }

    /// Shortest unary word sending `src` to `dst`, e.g. "llr".
    #[pyo3(signature = (src, dst, budget=1_000_000))]
    fn genword(&self, src: &str, dst: &str, budget: usize) -> PyResult<String> {
        let w = analysis::generator_word(&self.inner, ord(src)?, ord(dst)?, budget).map_err(bad)?;
        Ok(analysis::steps_string(&w.steps))
    }

    /// Window elements covered from generator `g` in mode "A" or "B",
    /// as (element, first index) pairs.
    #[pyo3(signature = (g, mode, bound, nmax=600))]
    fn coverage(&self, g: &str, mode: &str, bound: &str, nmax: u64) -> PyResult<Vec<(String, u64)>> {
        let mode = match mode {
            "A" => Letter::A,
            "B" => Letter::B,
            other => return Err(PyValueError::new_err(format!("mode must be A or B, got {other:?}"))),
        };
        let rep = analysis::coverage_check(&self.inner, ord(g)?, mode, ord(bound)?, nmax)
            .map_err(bad)?;
        Ok(rep.covered.iter().map(|(z, n)| (z.to_string(), *n)).collect())
    }

    /// Single-generation check on the window below `bound`.
    #[pyo3(signature = (bound, budget=1_000_000))]
    fn jonsson(&self, bound: &str, budget: usize) -> PyResult<bool> {
        Ok(analysis::jonsson_check(&self.inner, ord(bound)?, budget).pass)
    }

    /// Full certificate for the top layer, as a JSON string.
    #[pyo3(signature = (bound, nmax=600))]
    fn certify_typeb(&self, bound: &str, nmax: u64) -> PyResult<String> {
        let cert = analysis::typeb_certificate(&self.inner, ord(bound)?, nmax).map_err(bad)?;
        Ok(serde_json::to_string(&cert).unwrap())
    }

    fn __repr__(&self) -> String {
        format!("Algebra(base={:?}, sigma={:?})", self.base_spec, self.inner.sigma.to_string())
    }
}

#[pymodule]
fn jt_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(normalize, m)?)?;
    m.add_function(wrap_pyfunction!(equiv, m)?)?;
    m.add_function(wrap_pyfunction!(encode, m)?)?;
    m.add_function(wrap_pyfunction!(noniso, m)?)?;
    m.add_function(wrap_pyfunction!(max_free, m)?)?;
    m.add_function(wrap_pyfunction!(greedy_free, m)?)?;
    m.add_function(wrap_pyfunction!(partition_free, m)?)?;
    m.add_class::<Algebra>()?;
    Ok(())
}
