//! Python bindings: presentations, normal forms, series, torsion separation, Whitehead
//! problems, matrix embeddings and graph-of-groups isomorphism.

use std::path::PathBuf;
use std::sync::Arc;

use nilcert::gogiso::{decide_gog_iso, parse_gog, GogBudget};
use nilcert::malcev::{embed_matrix_group, expm as nil_expm, logm as nil_logm, rational_from_str, rational_to_string, QMatrix};
use nilcert::malcev::{StrictUpper, UniTriangular, DEFAULT_CLASS_CAP};
use nilcert::nilgroup::{library, NilElement, PcPresentation};
use nilcert::outsep::{elusive_report, separate_torsion as nil_separate, verify_certificate as nil_verify, SeparateOptions};
use nilcert::outsep::{CongruenceCertificate, DEFAULT_COSET_CAP};
use nilcert::whitehead::{whitehead_abelian, whitehead_nilpotent, TupleSystem, WhiteheadBudget};
use nilcert::zmod::AbelianModule;
use nilcert::{pcp, Error};
use pyo3::create_exception;
use pyo3::exceptions::PyException;
use pyo3::prelude::*;

create_exception!(nilcert, NilcertError, PyException, "Raised for every error reported by the library.");

fn err(e: Error) -> PyErr {
    NilcertError::new_err(format!("[{}] {e}", e.code()))
}

fn to_py<'py, T: serde::Serialize>(py: Python<'py>, x: &T) -> PyResult<Bound<'py, PyAny>> {
    let text = serde_json::to_string(x).map_err(|e| NilcertError::new_err(e.to_string()))?;
    py.import("json")?.call_method1("loads", (text,))
}

/// A consistent polycyclic presentation of a finitely generated nilpotent group.
#[pyclass(name = "Presentation", frozen)]
struct PyPresentation {
    inner: Arc<PcPresentation>,
}

impl PyPresentation {
    fn wrap(p: PcPresentation) -> Self {
        PyPresentation { inner: Arc::new(p) }
    }

    fn element(&self, x: Vec<i64>) -> PyResult<NilElement> {
        let e = NilElement::from_exponents(x);
        self.inner.check_len(&e).map_err(err)?;
        Ok(self.inner.normalize(&e))
    }

    fn tuples(&self, words: Vec<Vec<String>>) -> PyResult<TupleSystem<NilElement>> {
        let tuples = words
            .iter()
            .map(|t| t.iter().map(|w| self.collect(w)).collect::<PyResult<Vec<_>>>())
            .collect::<PyResult<Vec<_>>>()?;
        Ok(TupleSystem::new(tuples))
    }

    fn collect(&self, word: &str) -> PyResult<NilElement> {
        let w = pcp::parse_word(word, self.inner.gen_names())
            .map_err(|(c, m)| err(Error::Parse { line: 1, column: c, message: m }))?;
        Ok(self.inner.collect(&w))
    }
}

#[pymethods]
impl PyPresentation {
    /// Parses the `.pcp` text format.
    #[staticmethod]
    fn parse(text: &str) -> PyResult<Self> {
        pcp::parse(text).map(Self::wrap).map_err(err)
    }

    #[staticmethod]
    fn heisenberg() -> Self {
        Self::wrap(library::heisenberg())
    }

    /// The class-2 group with `[x, y] = z^k`.
    #[staticmethod]
    fn heisenberg_k(k: i64) -> Self {
        Self::wrap(library::heisenberg_k(k))
    }

    #[staticmethod]
    fn free_abelian(n: usize) -> Self {
        Self::wrap(library::free_abelian(n))
    }

    #[staticmethod]
    fn free_nilpotent_class2(rank: usize) -> Self {
        Self::wrap(library::free_nilpotent_class2(rank))
    }

    fn to_text(&self) -> String {
        pcp::to_string(&self.inner)
    }

    #[getter]
    fn name(&self) -> String {
        self.inner.name().to_string()
    }

    #[getter]
    fn generators(&self) -> Vec<String> {
        self.inner.gen_names().to_vec()
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    fn __repr__(&self) -> String {
        format!("Presentation({:?}, generators={:?})", self.inner.name(), self.inner.gen_names())
    }

    /// Exponent vector of the normal form of a word such as `"y x^-2"`.
    fn normal_form(&self, word: &str) -> PyResult<Vec<i64>> {
        Ok(self.collect(word)?.into_exponents())
    }

    fn format(&self, x: Vec<i64>) -> PyResult<String> {
        Ok(self.inner.format(&self.element(x)?))
    }

    fn multiply(&self, a: Vec<i64>, b: Vec<i64>) -> PyResult<Vec<i64>> {
        Ok(self.inner.multiply(&self.element(a)?, &self.element(b)?).into_exponents())
    }

    fn inverse(&self, a: Vec<i64>) -> PyResult<Vec<i64>> {
        Ok(self.inner.invert(&self.element(a)?).into_exponents())
    }

    fn power(&self, a: Vec<i64>, k: i64) -> PyResult<Vec<i64>> {
        Ok(self.inner.power(&self.element(a)?, k).into_exponents())
    }

    /// `a^-1 b^-1 a b`.
    fn commutator(&self, a: Vec<i64>, b: Vec<i64>) -> PyResult<Vec<i64>> {
        Ok(self.inner.commutator(&self.element(a)?, &self.element(b)?).into_exponents())
    }

    fn nilpotency_class(&self) -> usize {
        self.inner.nilpotency_class()
    }

    /// Generators of each term of the upper central series, from the trivial group up.
    fn upper_central_series(&self) -> Vec<Vec<Vec<i64>>> {
        let s = self.inner.upper_central_series();
        s.terms.iter().map(|t| t.generators().iter().map(|g| g.exponents().to_vec()).collect()).collect()
    }

    /// Torsion subgroup generators, order, exponent and `m` with `G^m` meeting it trivially.
    #[pyo3(signature = (quotient_cap = None))]
    fn torsion<'py>(&self, py: Python<'py>, quotient_cap: Option<usize>) -> PyResult<Bound<'py, PyAny>> {
        let cap = quotient_cap.unwrap_or_else(nilcert::nilgroup::quotient_cap_from_env);
        let td = self.inner.torsion_data(cap).map_err(err)?;
        let gens: Vec<Vec<i64>> = td.tau.generators().iter().map(|g| g.exponents().to_vec()).collect();
        let out = serde_json::json!({"generators": gens, "order": td.elements.len(), "exponent": td.exponent, "m": td.m});
        to_py(py, &out)
    }

    /// Non-trivial elusive outer classes.
    fn elusive<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        let report = elusive_report(&self.inner, DEFAULT_COSET_CAP).map_err(err)?;
        to_py(py, &report.classes)
    }

    /// Torsion-separating characteristic subgroup; returns the certificate as a dict.
    #[pyo3(signature = (max_steps = None, quotient_cap = None))]
    fn separate_torsion<'py>(&self, py: Python<'py>, max_steps: Option<usize>, quotient_cap: Option<usize>) -> PyResult<Bound<'py, PyAny>> {
        let mut opts = SeparateOptions { quotient_cap: quotient_cap.unwrap_or_else(nilcert::nilgroup::quotient_cap_from_env), ..Default::default() };
        if let Some(s) = max_steps {
            opts.max_steps = s;
        }
        let cert = nil_separate(&self.inner, &opts).map_err(err)?;
        to_py(py, &cert)
    }

    /// Mixed Whitehead problem for tuples of words; returns the verdict as a dict.
    #[pyo3(signature = (source, target, budget = None))]
    fn whitehead<'py>(&self, py: Python<'py>, source: Vec<Vec<String>>, target: Vec<Vec<String>>, budget: Option<usize>) -> PyResult<Bound<'py, PyAny>> {
        let (s, t) = (self.tuples(source)?, self.tuples(target)?);
        let p = &self.inner;
        let verdict = if p.is_abelian() && p.relative_orders().iter().all(Option::is_none) {
            let ex = |sys: &TupleSystem<NilElement>| TupleSystem::new(sys.tuples.iter().map(|tu| tu.iter().map(|x| x.exponents().to_vec()).collect()).collect());
            whitehead_abelian(&AbelianModule::free(p.len()), &ex(&s), &ex(&t))
        } else {
            let b = budget.map(WhiteheadBudget::with_level).unwrap_or_default();
            whitehead_nilpotent(p, &s, &t, &b)
        }
        .map_err(err)?;
        to_py(py, &verdict)
    }

    /// Images of the generators under a unitriangular embedding, as rows of rational strings.
    #[pyo3(signature = (class_cap = DEFAULT_CLASS_CAP))]
    fn embed(&self, class_cap: usize) -> PyResult<Vec<Vec<Vec<String>>>> {
        let emb = embed_matrix_group(&self.inner, class_cap).map_err(err)?;
        Ok(emb.images.iter().map(|u| rows_out(u.matrix())).collect())
    }
}

fn rows_in(rows: Vec<Vec<String>>) -> PyResult<QMatrix> {
    let parsed = rows
        .into_iter()
        .map(|r| {
            r.into_iter()
                .map(|c| rational_from_str(&c).ok_or_else(|| err(Error::Input(format!("`{c}` is not a rational")))))
                .collect::<PyResult<Vec<_>>>()
        })
        .collect::<PyResult<Vec<_>>>()?;
    QMatrix::from_rows(parsed).map_err(err)
}

fn rows_out(m: &QMatrix) -> Vec<Vec<String>> {
    m.to_rows().iter().map(|r| r.iter().map(rational_to_string).collect()).collect()
}

/// Exponential of a strictly upper triangular matrix given as rows of rational strings.
#[pyfunction]
fn expm(rows: Vec<Vec<String>>) -> PyResult<Vec<Vec<String>>> {
    let m = StrictUpper::new(rows_in(rows)?).map_err(err)?;
    Ok(rows_out(nil_expm(&m).matrix()))
}

/// Logarithm of a unitriangular matrix given as rows of rational strings.
#[pyfunction]
fn logm(rows: Vec<Vec<String>>) -> PyResult<Vec<Vec<String>>> {
    let u = UniTriangular::new(rows_in(rows)?).map_err(err)?;
    Ok(rows_out(nil_logm(&u).matrix()))
}

/// Re-checks a torsion-separation certificate given as JSON text.
#[pyfunction]
#[pyo3(signature = (certificate, quotient_cap = None))]
fn verify_certificate(certificate: &str, quotient_cap: Option<usize>) -> PyResult<bool> {
    let cert: CongruenceCertificate =
        serde_json::from_str(certificate).map_err(|e| err(Error::Input(format!("malformed certificate: {e}"))))?;
    nil_verify(&cert, quotient_cap.unwrap_or_else(nilcert::nilgroup::quotient_cap_from_env)).map_err(err)?;
    Ok(true)
}

/// Decides isomorphism of two `.gog` documents; `.pcp` references resolve against `base_dir`.
#[pyfunction]
#[pyo3(signature = (source, target, base_dir = None, budget = None))]
fn gog_iso<'py>(py: Python<'py>, source: &str, target: &str, base_dir: Option<PathBuf>, budget: Option<usize>) -> PyResult<Bound<'py, PyAny>> {
    let base = base_dir.unwrap_or_else(|| PathBuf::from("."));
    let resolve = |name: &str| std::fs::read_to_string(base.join(name)).map_err(|e| Error::Input(format!("{name}: {e}")));
    let x1 = parse_gog(source, &resolve).map_err(err)?;
    let x2 = parse_gog(target, &resolve).map_err(err)?;
    let white = if x2.white_orbits.is_empty() { &x1.white_orbits } else { &x2.white_orbits };
    let b = budget.map(GogBudget::with_level).unwrap_or_default();
    let verdict = decide_gog_iso(&x1.gog, &x2.gog, white, &b).map_err(err)?;
    to_py(py, &verdict)
}

#[pymodule]
#[pyo3(name = "nilcert")]
fn nilcert_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("NilcertError", m.py().get_type::<NilcertError>())?;
    m.add_class::<PyPresentation>()?;
    m.add_function(wrap_pyfunction!(expm, m)?)?;
    m.add_function(wrap_pyfunction!(logm, m)?)?;
    m.add_function(wrap_pyfunction!(verify_certificate, m)?)?;
    m.add_function(wrap_pyfunction!(gog_iso, m)?)?;
    Ok(())
}
