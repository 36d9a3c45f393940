//! Python bindings for `plwe-core`. Ring elements cross the boundary as
//! lists of residues in ascending degree, `F_{q^2}` elements as `(c0, c1)`.

use std::sync::Arc;

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use plwe_core::attack::{self, AttackPlan, AttackVerdict};
use plwe_core::files::{read_params, ParamsFile};
use plwe_core::forge;
use plwe_core::harness::{self, ExperimentConfig};
use plwe_core::region::{RegionMode, SmallnessRegion, DEFAULT_TABLE_CAP};
use plwe_core::sampler::{GaussianParams, Oracle as CoreOracle, Sample as CoreSample};
use plwe_core::{FieldParams as CoreFieldParams, PrimeField, QuadExtElement, Ring as CoreRing, RingElement};

fn err(e: plwe_core::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn ext(x: QuadExtElement) -> (u64, u64) {
    (x.c0.value(), x.c1.value())
}

#[pyclass(frozen, get_all, skip_from_py_object)]
#[derive(Clone)]
struct Verdict {
    kind: String,
    guess: Option<u64>,
    surviving: Vec<u64>,
}

impl From<AttackVerdict> for Verdict {
    fn from(v: AttackVerdict) -> Self {
        Self {
            kind: v.kind.as_str().to_string(),
            guess: v.guess.map(|g| g.value()),
            surviving: v.surviving.iter().map(|g| g.value()).collect(),
        }
    }
}

#[pymethods]
impl Verdict {
    fn __repr__(&self) -> String {
        let guess = self.guess.map_or("None".to_string(), |g| g.to_string());
        format!("Verdict(kind={:?}, guess={guess}, surviving={})", self.kind, self.surviving.len())
    }
}

/// `F_{q^2} = F_q[x]/(x^2 + rho)`.
#[pyclass(frozen)]
struct FieldParams {
    inner: CoreFieldParams,
}

impl FieldParams {
    fn elem(&self, x: (u64, u64)) -> QuadExtElement {
        let f = self.inner.field();
        QuadExtElement::new(f.elem(x.0), f.elem(x.1))
    }
}

#[pymethods]
impl FieldParams {
    #[new]
    fn new(q: u64, rho: u64) -> PyResult<Self> {
        Ok(Self { inner: CoreFieldParams::new(q, rho).map_err(err)? })
    }

    #[getter]
    fn q(&self) -> u64 {
        self.inner.q()
    }

    #[getter]
    fn rho(&self) -> u64 {
        self.inner.rho().value()
    }

    /// Multiplicative order of `-rho`.
    #[getter]
    fn r(&self) -> u64 {
        self.inner.order_of_neg_rho()
    }

    fn mul(&self, x: (u64, u64), y: (u64, u64)) -> (u64, u64) {
        ext(self.inner.mul(self.elem(x), self.elem(y)))
    }

    fn pow(&self, x: (u64, u64), e: u64) -> (u64, u64) {
        ext(self.inner.pow(self.elem(x), e))
    }

    fn trace(&self, x: (u64, u64)) -> u64 {
        self.inner.trace(self.elem(x)).value()
    }

    fn norm(&self, x: (u64, u64)) -> u64 {
        self.inner.norm(self.elem(x)).value()
    }

    fn frobenius(&self, x: (u64, u64)) -> (u64, u64) {
        ext(self.inner.frobenius(self.elem(x)))
    }

    fn __repr__(&self) -> String {
        format!("FieldParams(q={}, rho={})", self.q(), self.rho())
    }
}

/// An attackable instance `(q, rho, f, sigma)` with its ring and region.
#[pyclass(frozen)]
struct ParameterSet {
    inner: forge::ParameterSet,
    ring: Arc<CoreRing>,
}

impl ParameterSet {
    fn wrap(inner: forge::ParameterSet) -> PyResult<Self> {
        let ring = Arc::new(inner.ring().map_err(err)?);
        Ok(Self { inner, ring })
    }

    fn element(&self, coeffs: Vec<u64>) -> PyResult<RingElement> {
        let f = self.ring.field();
        self.ring.element(coeffs.into_iter().map(|c| f.elem(c)).collect()).map_err(err)
    }

    fn samples(&self, samples: Vec<(Vec<u64>, Vec<u64>)>) -> PyResult<Vec<CoreSample>> {
        samples
            .into_iter()
            .map(|(a, b)| Ok(CoreSample::new(self.element(a)?, self.element(b)?)))
            .collect()
    }

    fn region(&self) -> PyResult<SmallnessRegion> {
        self.inner.region(DEFAULT_TABLE_CAP).map_err(err)
    }
}

fn coeffs(p: &RingElement) -> Vec<u64> {
    p.coeffs().iter().map(|c| c.value()).collect()
}

#[pymethods]
impl ParameterSet {
    #[new]
    #[pyo3(signature = (q, rho, f, sigma))]
    fn new(q: u64, rho: u64, f: Vec<i64>, sigma: f64) -> PyResult<Self> {
        let f = plwe_core::ModulusPoly::new(f).map_err(err)?;
        Self::wrap(forge::ParameterSet::new(q, rho, f, sigma).map_err(err)?)
    }

    /// Smallest suitable prime `q >= min_q` and a certified modulus
    /// `(x^2 + rho)(x^(N-2) + c) + q`.
    #[staticmethod]
    #[pyo3(signature = (min_q, n, rho, c=1, sigma=8.0))]
    fn generate(min_q: u64, n: usize, rho: u64, c: u64, sigma: f64) -> PyResult<Self> {
        let q = forge::find_prime(min_q, rho).map_err(err)?;
        let f = forge::build_modulus(n, rho, q, c).map_err(err)?;
        Self::wrap(forge::ParameterSet::new(q, rho, f, sigma).map_err(err)?)
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Self::wrap(read_params(text).map_err(err)?)
    }

    fn to_json(&self) -> String {
        ParamsFile::from_set(&self.inner).to_json()
    }

    #[getter]
    fn q(&self) -> u64 {
        self.inner.q()
    }

    #[getter]
    fn rho(&self) -> u64 {
        self.inner.rho()
    }

    #[getter]
    fn r(&self) -> u64 {
        self.inner.r
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.degree()
    }

    #[getter]
    fn sigma(&self) -> f64 {
        self.inner.sigma
    }

    /// Integer coefficients of `f`, ascending.
    #[getter]
    fn modulus(&self) -> Vec<i64> {
        self.inner.f.coeffs().to_vec()
    }

    fn modulus_str(&self) -> String {
        self.inner.f.to_string()
    }

    fn field(&self) -> FieldParams {
        FieldParams { inner: self.inner.params }
    }

    fn region_members(&self) -> PyResult<Vec<u64>> {
        Ok(self.region()?.members().iter().map(|m| m.value()).collect())
    }

    fn region_mode(&self) -> String {
        self.inner.region_mode.as_str().to_string()
    }

    fn mul(&self, a: Vec<u64>, b: Vec<u64>) -> PyResult<Vec<u64>> {
        Ok(coeffs(&self.ring.mul(&self.element(a)?, &self.element(b)?).map_err(err)?))
    }

    fn eval_at_alpha(&self, p: Vec<u64>) -> PyResult<(u64, u64)> {
        Ok(ext(self.ring.eval_at_alpha(&self.element(p)?)))
    }

    fn half_trace(&self, p: Vec<u64>) -> PyResult<u64> {
        Ok(self.ring.half_trace(&self.element(p)?).value())
    }

    fn is_in_rq0(&self, p: Vec<u64>) -> PyResult<bool> {
        Ok(self.ring.is_in_rq0(&self.element(p)?))
    }

    fn star(&self, p: Vec<u64>) -> PyResult<Vec<u64>> {
        Ok(coeffs(&self.ring.star(&self.element(p)?)))
    }

    /// Zero-trace attack on samples `(a, b)` with `a` in `R_q0`.
    fn attack(&self, samples: Vec<(Vec<u64>, Vec<u64>)>) -> PyResult<Verdict> {
        let samples = self.samples(samples)?;
        Ok(attack::algorithm2(&self.ring, &samples, &self.region()?).map_err(err)?.into())
    }

    /// General attack over a recorded oracle stream with budget `(k, l)`.
    fn attack_stream(&self, samples: Vec<(Vec<u64>, Vec<u64>)>, k: u64, l: u64) -> PyResult<Verdict> {
        let samples = self.samples(samples)?;
        let plan = AttackPlan::manual(k, l).map_err(err)?;
        Ok(attack::algorithm3_from_stream(&self.ring, samples, &plan, &self.region()?).map_err(err)?.into())
    }

    /// Vulnerability scan as a JSON document.
    #[pyo3(signature = (sigma=None))]
    fn scan(&self, sigma: Option<f64>) -> PyResult<String> {
        let report = forge::scan(&self.inner.f, self.q(), sigma.unwrap_or(self.inner.sigma)).map_err(err)?;
        Ok(report.to_json())
    }

    /// Runs the experiment campaign and returns the report as JSON.
    #[pyo3(signature = (ntests, m, seed=0))]
    fn run_experiment(&self, py: Python<'_>, ntests: u64, m: usize, seed: u64) -> PyResult<String> {
        let cfg = ExperimentConfig::new(self.inner.clone(), ntests, m, seed).map_err(err)?;
        let report = py.detach(|| harness::run_experiment(&cfg)).map_err(err)?;
        Ok(report.to_json())
    }

    fn __repr__(&self) -> String {
        format!("ParameterSet(q={}, rho={}, N={}, sigma={})", self.q(), self.rho(), self.n(), self.sigma())
    }
}

/// Seeded sample source: `kind` is `"uniform"` or `"plwe"`.
#[pyclass]
struct Oracle {
    inner: CoreOracle,
}

#[pymethods]
impl Oracle {
    #[new]
    #[pyo3(signature = (params, kind, seed=0))]
    fn new(params: &ParameterSet, kind: &str, seed: u64) -> PyResult<Self> {
        let ring = params.ring.clone();
        let inner = match kind {
            "uniform" => CoreOracle::uniform(ring, seed),
            "plwe" => CoreOracle::plwe(ring, GaussianParams::new(params.inner.sigma).map_err(err)?, seed),
            other => return Err(PyValueError::new_err(format!("unknown oracle kind {other:?}"))),
        };
        Ok(Self { inner })
    }

    #[pyo3(signature = (rq0=false))]
    fn sample(&mut self, rq0: bool) -> (Vec<u64>, Vec<u64>) {
        let s = if rq0 { self.inner.next_rq0_sample() } else { self.inner.next_sample() };
        (coeffs(&s.a), coeffs(&s.b))
    }

    /// Rejection-samples until `a` lies in `R_q0`; returns the sample and the
    /// number of draws.
    fn x0_sample(&mut self) -> ((Vec<u64>, Vec<u64>), u64) {
        let (s, count) = self.inner.x0_sample();
        ((coeffs(&s.a), coeffs(&s.b)), count)
    }

    #[getter]
    fn secret(&self) -> Option<Vec<u64>> {
        self.inner.secret().map(coeffs)
    }

    #[getter]
    fn calls(&self) -> u64 {
        self.inner.calls()
    }
}

/// Root-evaluation attack at `alpha` in `F_q` against an explicit region.
#[pyfunction]
fn root_attack(q: u64, samples: Vec<(Vec<u64>, Vec<u64>)>, region: Vec<u64>, alpha: u64) -> PyResult<Verdict> {
    let field = PrimeField::new(q).map_err(err)?;
    let el = |v: Vec<u64>| RingElement::from_coeffs(v.into_iter().map(|c| field.elem(c)).collect());
    let samples: Vec<CoreSample> = samples.into_iter().map(|(a, b)| CoreSample::new(el(a), el(b))).collect();
    let region = SmallnessRegion::from_members(q, RegionMode::TableElos, region).map_err(err)?;
    Ok(attack::algorithm1(&field, &samples, &region, field.elem(alpha)).map_err(err)?.into())
}

#[pyfunction]
fn success_probability(region_size: f64, q: u64, samples: u32) -> PyResult<f64> {
    attack::success_probability_bound(region_size, q, samples).map_err(err)
}

/// Returns `(k, l, hit_probability)`.
#[pyfunction]
#[pyo3(signature = (theta, q, region_size, safety=1.0))]
fn plan_attack(theta: f64, q: u64, region_size: u64, safety: f64) -> PyResult<(u64, u64, f64)> {
    let p = attack::plan_attack(theta, q, region_size, safety).map_err(err)?;
    Ok((p.k, p.l, p.hit_probability))
}

#[pyfunction]
fn find_prime(min_q: u64, rho: u64) -> PyResult<u64> {
    forge::find_prime(min_q, rho).map_err(err)
}

#[pyfunction]
fn detect_quadratic_factors(f: Vec<i64>, q: u64) -> PyResult<Vec<u64>> {
    let f = plwe_core::ModulusPoly::new(f).map_err(err)?;
    forge::detect_quadratic_factors(&f, q).map_err(err)
}

#[pyfunction]
fn find_fq_roots(f: Vec<i64>, q: u64) -> PyResult<Vec<(u64, u64)>> {
    let f = plwe_core::ModulusPoly::new(f).map_err(err)?;
    forge::find_fq_roots(&f, q).map_err(err)
}

/// Factors of `Phi_{p^k}` mod `q` as residue lists.
#[pyfunction]
fn cyclotomic_factors(p: u64, k: u32, a: u32, q: u64) -> PyResult<Vec<Vec<u64>>> {
    let factors = forge::cyclotomic_prime_power_factors(p, k, a, q).map_err(err)?;
    Ok(factors.into_iter().map(|g| g.iter().map(|c| c.value()).collect()).collect())
}

#[pymodule]
fn plwe(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    m.add_class::<FieldParams>()?;
    m.add_class::<ParameterSet>()?;
    m.add_class::<Oracle>()?;
    m.add_class::<Verdict>()?;
    m.add_function(wrap_pyfunction!(root_attack, m)?)?;
    m.add_function(wrap_pyfunction!(success_probability, m)?)?;
    m.add_function(wrap_pyfunction!(plan_attack, m)?)?;
    m.add_function(wrap_pyfunction!(find_prime, m)?)?;
    m.add_function(wrap_pyfunction!(detect_quadratic_factors, m)?)?;
    m.add_function(wrap_pyfunction!(find_fq_roots, m)?)?;
    m.add_function(wrap_pyfunction!(cyclotomic_factors, m)?)?;
    Ok(())
}
