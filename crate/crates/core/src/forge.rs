//! Generation of attackable parameter sets and vulnerability scanning of
//! given `(f, q, sigma)` triples.

use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::attack::plan_attack;
use crate::error::{Error, Result};
use crate::field::{is_prime, FieldElement, FieldParams, PrimeField};
use crate::fpoly;
use crate::region::{RegionMode, SmallnessRegion, DEFAULT_TABLE_CAP};
use crate::ring::{eval_poly, split_eval, ModulusPoly, Ring};

/// Largest prime candidate `find_prime` will examine.
const PRIME_SEARCH_LIMIT: u64 = 1 << 40;

/// How many consecutive values of `c` `build_modulus` tries.
pub const FORGE_ATTEMPTS: u64 = 64;

/// Roots of multiplicative order at most this are flagged as small.
pub const SMALL_ORDER: u64 = 5;

/// Success targets for which scans recommend a sample count.
pub const SCAN_THETAS: [f64; 3] = [0.75, 0.90, 0.99];

/// An attackable instance: `x^2 + rho | f` mod `q` and `-rho` a non-residue.
#[derive(Clone, Debug, PartialEq)]
pub struct ParameterSet {
    pub params: FieldParams,
    pub f: ModulusPoly,
    pub sigma: f64,
    /// `ord(-rho)`.
    pub r: u64,
    pub region_mode: RegionMode,
}

impl ParameterSet {
    /// Validates the instance. `rho = 1` selects the interval region and any
    /// other `rho` the quadratic table.
    pub fn new(q: u64, rho: u64, f: ModulusPoly, sigma: f64) -> Result<Self> {
        let params = FieldParams::new(q, rho)?;
        if !(sigma > 0.0 && sigma.is_finite()) {
            return Err(Error::InvalidParameter(format!("sigma must be positive, got {sigma}")));
        }
        if !f.has_quadratic_factor(params.field(), params.rho()) {
            return Err(Error::QuadraticFactorMissing { q, rho });
        }
        let region_mode = if rho == 1 { RegionMode::Interval } else { RegionMode::TableQuadratic };
        Ok(Self { r: params.order_of_neg_rho(), params, f, sigma, region_mode })
    }

    pub fn q(&self) -> u64 {
        self.params.q()
    }

    pub fn rho(&self) -> u64 {
        self.params.rho().value()
    }

    pub fn degree(&self) -> usize {
        self.f.degree()
    }

    pub fn ring(&self) -> Result<Ring> {
        Ring::with_zero_trace_root(self.params, self.f.clone())
    }

    pub fn region(&self, cap: u64) -> Result<SmallnessRegion> {
        match self.region_mode {
            RegionMode::Interval => SmallnessRegion::interval(self.q(), self.degree(), self.sigma),
            _ => SmallnessRegion::quadratic(&self.params, self.degree(), self.sigma, cap),
        }
    }
}

/// Smallest prime `q >= min` for which `-rho` is a quadratic non-residue.
pub fn find_prime(min: u64, rho: u64) -> Result<u64> {
    if min < 3 {
        return Err(Error::InvalidParameter(format!("min must be at least 3, got {min}")));
    }
    let mut q = min;
    while q < PRIME_SEARCH_LIMIT {
        if is_prime(q) && !rho.is_multiple_of(q) {
            let field = PrimeField::new(q)?;
            if !field.is_quadratic_residue(field.neg(field.elem(rho)))? {
                return Ok(q);
            }
        }
        q += 1;
    }
    Err(Error::InvalidParameter(format!("no prime found between {min} and {PRIME_SEARCH_LIMIT}")))
}

/// `(x^2 + rho)(x^(N-2) + c) + q` as integer coefficients.
pub fn forge_pattern(n: usize, rho: u64, q: u64, c: u64) -> Result<ModulusPoly> {
    if n < 4 {
        return Err(Error::DegreeTooSmall(n, 4));
    }
    let mut coeffs = vec![0i64; n + 1];
    let (rho, c) = (to_i64(rho)?, to_i64(c)?);
    coeffs[n] += 1;
    coeffs[n - 2] += rho;
    coeffs[2] += c;
    let constant = rho
        .checked_mul(c)
        .and_then(|v| v.checked_add(to_i64(q).ok()?))
        .ok_or_else(|| Error::InvalidParameter("constant term overflows".into()))?;
    coeffs[0] += constant;
    ModulusPoly::new(coeffs)
}

fn to_i64(v: u64) -> Result<i64> {
    i64::try_from(v).map_err(|_| Error::InvalidParameter(format!("{v} does not fit a signed coefficient")))
}

/// Forges a modulus that is divisible by `x^2 + rho` mod `q` and certified
/// irreducible over the integers, starting at `c` and incrementing it until
/// a certificate is found.
pub fn build_modulus(n: usize, rho: u64, q: u64, c: u64) -> Result<ModulusPoly> {
    FieldParams::new(q, rho)?;
    if c == 0 {
        return Err(Error::InvalidParameter("c must be positive".into()));
    }
    let last = c + FORGE_ATTEMPTS - 1;
    for c in c..=last {
        let f = forge_pattern(n, rho, q, c)?;
        if f.certify_irreducible(q).is_some() {
            return Ok(f);
        }
    }
    Err(Error::ForgeFailed { first: c, last })
}

/// All `rho` in `[1, q-1]` with `x^2 + rho | f` mod `q` and `-rho` a
/// non-residue, by exhaustive scan.
pub fn detect_quadratic_factors(f: &ModulusPoly, q: u64) -> Result<Vec<u64>> {
    let field = PrimeField::new(q)?;
    let reduced = f.reduce(&field);
    Ok((1..q)
        .into_par_iter()
        .filter(|&rho| {
            let neg = field.neg(field.elem(rho));
            let (even, odd) = split_eval(&field, &reduced, neg);
            even.is_zero() && odd.is_zero() && !field.is_quadratic_residue(neg).unwrap_or(true)
        })
        .collect())
}

/// Nonzero roots of `f` in `F_q` with their multiplicative orders.
pub fn find_fq_roots(f: &ModulusPoly, q: u64) -> Result<Vec<(u64, u64)>> {
    let field = PrimeField::new(q)?;
    let reduced = f.reduce(&field);
    let roots: Vec<u64> = (1..q)
        .into_par_iter()
        .filter(|&a| eval_poly(&field, &reduced, field.elem(a)).is_zero())
        .collect();
    roots
        .into_iter()
        .map(|a| Ok((a, field.mult_order(field.elem(a))?)))
        .collect()
}

/// `Phi_{p^k}(x) = sum_{i<p} x^(i p^(k-1))`.
pub fn cyclotomic_prime_power(p: u64, k: u32) -> Result<ModulusPoly> {
    if !is_prime(p) || k == 0 {
        return Err(Error::InvalidParameter(format!("need a prime p and k >= 1, got p={p}, k={k}")));
    }
    let step = p.checked_pow(k - 1).ok_or_else(|| Error::InvalidParameter("p^(k-1) overflows".into()))? as usize;
    let mut coeffs = vec![0i64; (p as usize - 1) * step + 1];
    for i in 0..p as usize {
        coeffs[i * step] = 1;
    }
    ModulusPoly::new(coeffs)
}

/// Factors `x^(p^(k-A)) - rho` of `Phi_{p^k}` mod `q`, one per primitive
/// `p^A`-th root of unity `rho`, for `q = 1 + p^A u` with `p` not dividing
/// `u` and `2 <= A < k`. The product of the factors is checked against
/// `Phi_{p^k}` before returning.
pub fn cyclotomic_prime_power_factors(p: u64, k: u32, a: u32, q: u64) -> Result<Vec<Vec<FieldElement>>> {
    if p < 3 || !is_prime(p) {
        return Err(Error::InvalidParameter(format!("p = {p} is not an odd prime")));
    }
    if !(2 <= a && a < k) {
        return Err(Error::InvalidParameter(format!("need 2 <= A < k, got A={a}, k={k}")));
    }
    let field = PrimeField::new(q)?;
    let pa = p.checked_pow(a).ok_or_else(|| Error::InvalidParameter("p^A overflows".into()))?;
    if !(q - 1).is_multiple_of(pa) || ((q - 1) / pa).is_multiple_of(p) {
        return Err(Error::InvalidParameter(format!("q = {q} is not 1 + p^A u with p not dividing u")));
    }
    let deg = p.checked_pow(k - a).ok_or_else(|| Error::InvalidParameter("p^(k-A) overflows".into()))? as usize;
    let mut factors = Vec::new();
    for rho in field.elements().skip(1) {
        if field.mult_order(rho)? == pa {
            let mut factor = vec![FieldElement::ZERO; deg + 1];
            factor[0] = field.neg(rho);
            factor[deg] = FieldElement::ONE;
            factors.push(factor);
        }
    }
    let product = factors
        .iter()
        .fold(vec![FieldElement::ONE], |acc, g| fpoly::mul(&field, &acc, g));
    if product != cyclotomic_prime_power(p, k)?.reduce(&field) {
        return Err(Error::InvalidParameter(format!(
            "factors do not multiply to Phi_{{{p}^{k}}} mod {q}"
        )));
    }
    Ok(factors)
}

/// Region size, feasibility and recommended sample counts for one finding.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegionAssessment {
    pub mode: RegionMode,
    pub analytic_bound: Option<f64>,
    /// Size of the exact region, when the table could be built.
    pub exact_size: Option<u64>,
    /// The analytic bound (or the exact size) is below `q` and the table
    /// fits under the cap.
    pub feasible: bool,
    pub note: Option<String>,
    pub recommendations: Vec<Recommendation>,
}

/// Samples needed for success probability `theta`, sized from the analytic
/// bound when there is one and from the exact region otherwise.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Recommendation {
    pub theta: f64,
    pub samples: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RootFinding {
    pub alpha: u64,
    pub order: u64,
    pub small_order: bool,
    pub region: RegionAssessment,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuadraticFinding {
    pub rho: u64,
    /// `ord(-rho)`.
    pub r: u64,
    pub region: RegionAssessment,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VulnerabilityReport {
    pub q: u64,
    pub degree: usize,
    pub sigma: f64,
    pub roots_in_fq: Vec<RootFinding>,
    pub quadratic_rhos: Vec<QuadraticFinding>,
    pub out_of_scope: Vec<String>,
}

impl VulnerabilityReport {
    pub fn is_empty(&self) -> bool {
        self.roots_in_fq.is_empty() && self.quadratic_rhos.is_empty()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

fn assess(q: u64, mode: RegionMode, analytic: f64, built: Result<SmallnessRegion>) -> RegionAssessment {
    let (exact_size, note) = match built {
        Ok(region) => (Some(region.exact_size()), None),
        Err(e) => (None, Some(e.to_string())),
    };
    let basis = if analytic.is_finite() && analytic < q as f64 {
        Some(analytic.ceil() as u64)
    } else {
        exact_size.filter(|&s| s < q)
    };
    let feasible = exact_size.is_some() && basis.is_some();
    let recommendations = match basis {
        Some(size) if feasible => SCAN_THETAS
            .iter()
            .filter_map(|&theta| {
                plan_attack(theta, q, size.min(q - 1), 1.0)
                    .ok()
                    .map(|p| Recommendation { theta, samples: p.k })
            })
            .collect(),
        _ => Vec::new(),
    };
    RegionAssessment { mode, analytic_bound: Some(analytic), exact_size, feasible, note, recommendations }
}

/// Runs the root and quadratic-factor scans and sizes a smallness region
/// for every finding. Infeasible findings are kept and marked as such.
pub fn scan(f: &ModulusPoly, q: u64, sigma: f64) -> Result<VulnerabilityReport> {
    scan_with_cap(f, q, sigma, DEFAULT_TABLE_CAP)
}

pub fn scan_with_cap(f: &ModulusPoly, q: u64, sigma: f64, cap: u64) -> Result<VulnerabilityReport> {
    if !(sigma > 0.0 && sigma.is_finite()) {
        return Err(Error::InvalidParameter(format!("sigma must be positive, got {sigma}")));
    }
    let n = f.degree();
    if n < 2 {
        return Err(Error::DegreeTooSmall(n, 2));
    }
    let field = PrimeField::new(q)?;
    let roots_in_fq = find_fq_roots(f, q)?
        .into_iter()
        .map(|(alpha, order)| {
            let analytic = crate::region::elos_analytic_bound(n, sigma, order);
            let built = SmallnessRegion::elos(q, n, sigma, field.elem(alpha), cap);
            RootFinding {
                alpha,
                order,
                small_order: order <= SMALL_ORDER,
                region: assess(q, RegionMode::TableElos, analytic, built),
            }
        })
        .collect();
    let quadratic_rhos = detect_quadratic_factors(f, q)?
        .into_iter()
        .map(|rho| {
            let params = FieldParams::new(q, rho).expect("detected rho is valid");
            let r = params.order_of_neg_rho();
            let region = if rho == 1 {
                let analytic = crate::region::interval_analytic_bound(n, sigma);
                assess(q, RegionMode::Interval, analytic, SmallnessRegion::interval(q, n, sigma))
            } else {
                let analytic = crate::region::quadratic_analytic_bound(n, sigma, r);
                let built = SmallnessRegion::quadratic(&params, n, sigma, cap);
                assess(q, RegionMode::TableQuadratic, analytic, built)
            };
            QuadraticFinding { rho, r, region }
        })
        .collect();
    Ok(VulnerabilityReport {
        q,
        degree: n,
        sigma,
        roots_in_fq,
        quadratic_rhos,
        out_of_scope: vec![
            "roots of small residue (such as 2 or 3) are not evaluated".into(),
            "distinguishers for roots of large order and residue are not evaluated".into(),
        ],
    })
}

fn fmt_assessment(f: &mut fmt::Formatter<'_>, a: &RegionAssessment) -> fmt::Result {
    write!(f, "      region {}", a.mode)?;
    if let Some(b) = a.analytic_bound {
        write!(f, ", analytic bound {b:.3}")?;
    }
    match a.exact_size {
        Some(s) => write!(f, ", exact size {s}")?,
        None => write!(f, ", table not built")?,
    }
    writeln!(f, ", {}", if a.feasible { "feasible" } else { "INFEASIBLE" })?;
    if let Some(note) = &a.note {
        writeln!(f, "      note: {note}")?;
    }
    for r in &a.recommendations {
        writeln!(f, "      theta {:.2}: M = {}", r.theta, r.samples)?;
    }
    Ok(())
}

impl fmt::Display for VulnerabilityReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "scan of degree-{} modulus mod q = {}, sigma = {}", self.degree, self.q, self.sigma)?;
        writeln!(f, "roots in F_q: {}", self.roots_in_fq.len())?;
        for r in &self.roots_in_fq {
            let flag = if r.small_order { "  [SMALL ORDER]" } else { "" };
            writeln!(f, "  alpha = {}, order {}{flag}", r.alpha, r.order)?;
            fmt_assessment(f, &r.region)?;
        }
        writeln!(f, "quadratic factors x^2 + rho: {}", self.quadratic_rhos.len())?;
        for qf in &self.quadratic_rhos {
            writeln!(f, "  rho = {}, r = ord(-rho) = {}", qf.rho, qf.r)?;
            fmt_assessment(f, &qf.region)?;
        }
        writeln!(f, "not checked:")?;
        for s in &self.out_of_scope {
            writeln!(f, "  {s}")?;
        }
        Ok(())
    }
}
