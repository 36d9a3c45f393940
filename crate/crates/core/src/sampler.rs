//! Seedable randomness: uniform samplers over `F_q`, `R_q` and `R_{q,0}`,
//! the truncated rounded-normal error sampler, the uniform and PLWE sample
//! oracles, and the rejection sampler that keeps only samples with
//! `a(x)` in `R_{q,0}`.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{FieldElement, PrimeField};
use crate::ring::{Ring, RingElement};

/// Deterministic generator for `(seed, stream)`. Distinct streams of the same
/// seed are independent ChaCha20 keystreams.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha20Rng {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Standard deviation of the error distribution and its per-coefficient
/// truncation bound `floor(2 sigma)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GaussianParams {
    sigma: f64,
    truncation: i64,
}

impl GaussianParams {
    pub fn new(sigma: f64) -> Result<Self> {
        if !(sigma.is_finite() && sigma > 0.0) {
            return Err(Error::InvalidParameter(format!("sigma must be positive, got {sigma}")));
        }
        Ok(Self { sigma, truncation: (2.0 * sigma).floor() as i64 })
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn truncation(&self) -> i64 {
        self.truncation
    }
}

/// Draws a normal value, rounds it to the nearest integer and resamples
/// until it lies within the truncation bound.
pub fn sample_error_coeff<R: Rng + ?Sized>(g: &GaussianParams, rng: &mut R) -> i64 {
    let normal = Normal::new(0.0, g.sigma).expect("sigma validated");
    loop {
        let v = normal.sample(rng).round() as i64;
        if v.abs() <= g.truncation {
            return v;
        }
    }
}

pub fn sample_error_poly<R: Rng + ?Sized>(g: &GaussianParams, n: usize, rng: &mut R) -> Vec<i64> {
    let normal = Normal::new(0.0, g.sigma).expect("sigma validated");
    (0..n)
        .map(|_| loop {
            let v = normal.sample(rng).round() as i64;
            if v.abs() <= g.truncation {
                break v;
            }
        })
        .collect()
}

pub fn uniform_fq<R: Rng + ?Sized>(field: &PrimeField, rng: &mut R) -> FieldElement {
    field.elem(rng.random_range(0..field.modulus()))
}

pub fn uniform_rq<R: Rng + ?Sized>(ring: &Ring, rng: &mut R) -> RingElement {
    let f = ring.field();
    RingElement::from_coeffs((0..ring.degree()).map(|_| uniform_fq(f, rng)).collect())
}

/// Uniform element of `R_{q,0}`: every coefficient is drawn uniformly except
/// `p_1`, which is solved for so that the odd-index form
/// `sum_j (-rho)^j p_{2j+1}` vanishes (its weight there is `(-rho)^0 = 1`).
pub fn uniform_rq0<R: Rng + ?Sized>(ring: &Ring, rng: &mut R) -> RingElement {
    let f = ring.field();
    let form = ring.rq0_form();
    let mut coeffs: Vec<FieldElement> = (0..ring.degree()).map(|_| uniform_fq(f, rng)).collect();
    let rest = form
        .iter()
        .enumerate()
        .skip(1)
        .fold(FieldElement::ZERO, |acc, (j, &w)| f.add(acc, f.mul(w, coeffs[2 * j + 1])));
    coeffs[1] = f.neg(rest);
    RingElement::from_coeffs(coeffs)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OracleKind {
    Uniform,
    Plwe,
}

/// A pair `(a, b)` in `R_q^2`, optionally tagged with the oracle that made it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Sample {
    pub a: RingElement,
    pub b: RingElement,
    pub source: Option<OracleKind>,
}

impl Sample {
    pub fn new(a: RingElement, b: RingElement) -> Self {
        Self { a, b, source: None }
    }
}

/// Sample source over a fixed ring. A PLWE oracle holds one secret for its
/// whole lifetime; equal seeds reproduce equal streams.
#[derive(Clone, Debug)]
pub struct Oracle {
    kind: OracleKind,
    ring: Arc<Ring>,
    rng: ChaCha20Rng,
    gaussian: Option<GaussianParams>,
    secret: Option<RingElement>,
    calls: u64,
}

impl Oracle {
    pub fn uniform(ring: Arc<Ring>, seed: u64) -> Self {
        Self::uniform_from_rng(ring, ChaCha20Rng::seed_from_u64(seed))
    }

    pub fn uniform_from_rng(ring: Arc<Ring>, rng: ChaCha20Rng) -> Self {
        Self { kind: OracleKind::Uniform, ring, rng, gaussian: None, secret: None, calls: 0 }
    }

    /// PLWE oracle whose secret is drawn uniformly from `R_q` out of the
    /// same stream.
    pub fn plwe(ring: Arc<Ring>, gaussian: GaussianParams, seed: u64) -> Self {
        Self::plwe_from_rng(ring, gaussian, ChaCha20Rng::seed_from_u64(seed))
    }

    pub fn plwe_from_rng(ring: Arc<Ring>, gaussian: GaussianParams, mut rng: ChaCha20Rng) -> Self {
        let secret = uniform_rq(&ring, &mut rng);
        Self { kind: OracleKind::Plwe, ring, rng, gaussian: Some(gaussian), secret: Some(secret), calls: 0 }
    }

    pub fn plwe_with_secret(
        ring: Arc<Ring>,
        gaussian: GaussianParams,
        secret: RingElement,
        seed: u64,
    ) -> Result<Self> {
        if secret.len() != ring.degree() {
            return Err(Error::LengthMismatch { expected: ring.degree(), got: secret.len() });
        }
        Ok(Self {
            kind: OracleKind::Plwe,
            ring,
            rng: ChaCha20Rng::seed_from_u64(seed),
            gaussian: Some(gaussian),
            secret: Some(secret),
            calls: 0,
        })
    }

    pub fn kind(&self) -> OracleKind {
        self.kind
    }

    pub fn ring(&self) -> &Arc<Ring> {
        &self.ring
    }

    pub fn secret(&self) -> Option<&RingElement> {
        self.secret.as_ref()
    }

    pub fn gaussian(&self) -> Option<&GaussianParams> {
        self.gaussian.as_ref()
    }

    /// Total number of samples drawn so far.
    pub fn calls(&self) -> u64 {
        self.calls
    }

    pub fn next_sample(&mut self) -> Sample {
        self.next_sample_with_error().0
    }

    /// Like [`Oracle::next_sample`], also returning the signed error term for
    /// PLWE oracles.
    pub fn next_sample_with_error(&mut self) -> (Sample, Option<Vec<i64>>) {
        let a = uniform_rq(&self.ring, &mut self.rng);
        self.complete(a)
    }

    /// Draws a sample whose `a` is uniform on `R_{q,0}` directly, without
    /// rejection. Used by the experiment harness.
    pub fn next_rq0_sample(&mut self) -> Sample {
        let a = uniform_rq0(&self.ring, &mut self.rng);
        self.complete(a).0
    }

    fn complete(&mut self, a: RingElement) -> (Sample, Option<Vec<i64>>) {
        self.calls += 1;
        let ring = &self.ring;
        let (b, e) = match (self.kind, &self.secret, &self.gaussian) {
            (OracleKind::Plwe, Some(s), Some(g)) => {
                let e = sample_error_poly(g, ring.degree(), &mut self.rng);
                let b = ring
                    .add_signed(&ring.mul(&a, s).expect("lengths match"), &e)
                    .expect("lengths match");
                (b, Some(e))
            }
            _ => (uniform_rq(ring, &mut self.rng), None),
        };
        (Sample { a, b, source: Some(self.kind) }, e)
    }

    /// Rejection sampler: draws until `a` lies in `R_{q,0}` and returns the
    /// accepted sample together with the number of draws it took.
    pub fn x0_sample(&mut self) -> (Sample, u64) {
        self.x0_sample_capped(u64::MAX).expect("unbounded budget")
    }

    /// As [`Oracle::x0_sample`], giving up with [`Error::BudgetExceeded`] once
    /// `cap` draws have all been rejected.
    pub fn x0_sample_capped(&mut self, cap: u64) -> Result<(Sample, u64)> {
        let mut count = 0u64;
        while count < cap {
            let s = self.next_sample();
            count += 1;
            if self.ring.is_in_rq0(&s.a) {
                return Ok((s, count));
            }
        }
        Err(Error::BudgetExceeded(cap))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::FieldParams;
    use crate::ring::ModulusPoly;

    fn small_ring() -> Arc<Ring> {
        // q = 3, N = 3: f = (x^2 + 1)(x + 1) + 3
        let params = FieldParams::new(3, 1).unwrap();
        Arc::new(Ring::with_zero_trace_root(params, ModulusPoly::new(vec![4, 1, 1, 1]).unwrap()).unwrap())
    }

    fn ring_5003() -> Arc<Ring> {
        let params = FieldParams::new(5003, 1).unwrap();
        let mut c = vec![0i64; 63];
        c[62] = 1;
        c[60] = 1;
        c[2] = 1;
        c[0] = 1 + 5003;
        Arc::new(Ring::with_zero_trace_root(params, ModulusPoly::new(c).unwrap()).unwrap())
    }

    #[test]
    fn tiny_sigma_is_zero() {
        let g = GaussianParams::new(0.0001).unwrap();
        assert_eq!(g.truncation(), 0);
        let mut rng = stream_rng(1, 0);
        let zeros = (0..100_000).filter(|_| sample_error_coeff(&g, &mut rng) == 0).count();
        assert!(zeros as f64 / 1e5 > 0.999);
    }

    #[test]
    fn sigma_eight_support_and_spread() {
        let g = GaussianParams::new(8.0).unwrap();
        assert_eq!(g.truncation(), 16);
        let mut rng = stream_rng(2, 0);
        let draws: Vec<i64> = (0..100_000).map(|_| sample_error_coeff(&g, &mut rng)).collect();
        assert!(draws.iter().all(|v| v.abs() <= 16));
        // exact std of the rounded normal conditioned on |c| <= 16
        let normal = statrs::distribution::Normal::new(0.0, 8.0).unwrap();
        use statrs::distribution::ContinuousCDF;
        let w: Vec<f64> = (-16..=16)
            .map(|c| normal.cdf(c as f64 + 0.5) - normal.cdf(c as f64 - 0.5))
            .collect();
        let total: f64 = w.iter().sum();
        let var: f64 = (-16..=16).zip(&w).map(|(c, p)| (c * c) as f64 * p / total).sum();
        let oracle_std = var.sqrt();
        let n = draws.len() as f64;
        let mean = draws.iter().sum::<i64>() as f64 / n;
        let emp = (draws.iter().map(|&v| (v as f64 - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt();
        assert!((emp - oracle_std).abs() / oracle_std < 0.01, "emp {emp} oracle {oracle_std}");
    }

    #[test]
    fn rq0_sampler_lands_in_subring() {
        let ring = ring_5003();
        let mut rng = stream_rng(3, 0);
        for _ in 0..200 {
            let p = uniform_rq0(&ring, &mut rng);
            assert!(ring.is_in_rq0(&p));
            assert!(ring.eval_at_alpha(&p).c1.is_zero());
        }
    }

    #[test]
    fn rq0_sampler_uniform_on_small_ring() {
        let ring = small_ring();
        let mut rng = stream_rng(4, 0);
        let mut counts = std::collections::HashMap::new();
        let n = 100_000;
        for _ in 0..n {
            let p = uniform_rq0(&ring, &mut rng);
            *counts.entry(p.coeffs().to_vec()).or_insert(0u32) += 1;
        }
        assert_eq!(counts.len(), 9);
        let p = 1.0 / 9.0;
        let sd = (n as f64 * p * (1.0 - p)).sqrt();
        for &c in counts.values() {
            assert!((c as f64 - n as f64 * p).abs() <= 3.0 * sd + 1.0, "count {c}");
        }
    }

    #[test]
    fn plwe_error_bounds() {
        let ring = ring_5003();
        let g = GaussianParams::new(8.0).unwrap();
        let mut o = Oracle::plwe(ring.clone(), g, 7);
        let s = o.secret().unwrap().clone();
        for _ in 0..20 {
            let smp = o.next_sample();
            let e = ring.sub(&smp.b, &ring.mul(&smp.a, &s).unwrap()).unwrap();
            assert!(e.coeffs().iter().all(|&c| ring.field().to_signed(c).abs() <= 16));
        }
        let zero = GaussianParams::new(1e-9).unwrap();
        let mut o = Oracle::plwe(ring.clone(), zero, 7);
        let s = o.secret().unwrap().clone();
        let smp = o.next_sample();
        assert_eq!(smp.b, ring.mul(&smp.a, &s).unwrap());
    }

    #[test]
    fn seeds_reproduce_streams() {
        let ring = ring_5003();
        let g = GaussianParams::new(3.0).unwrap();
        let mut a = Oracle::plwe(ring.clone(), g, 99);
        let mut b = Oracle::plwe(ring.clone(), g, 99);
        let mut c = Oracle::plwe(ring, g, 100);
        let sa: Vec<_> = (0..5).map(|_| a.next_sample()).collect();
        let sb: Vec<_> = (0..5).map(|_| b.next_sample()).collect();
        let sc: Vec<_> = (0..5).map(|_| c.next_sample()).collect();
        assert_eq!(sa, sb);
        assert_ne!(sa, sc);
        assert_ne!(stream_rng(1, 0).random::<u64>(), stream_rng(1, 1).random::<u64>());
    }

    #[test]
    fn x0_rejection_properties() {
        let ring = small_ring();
        let mut o = Oracle::uniform(ring.clone(), 5);
        let mut total = 0;
        for _ in 0..2000 {
            let (s, c) = o.x0_sample();
            assert!(ring.is_in_rq0(&s.a));
            assert!(c >= 1);
            total += c;
        }
        assert_eq!(o.calls(), total);
        let mut big = Oracle::uniform(ring_5003(), 5);
        let capped = (0..50).filter(|_| big.x0_sample_capped(1).is_err()).count();
        assert!(capped >= 45);
    }
}
