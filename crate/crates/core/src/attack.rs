//! The decision attacks and their planner.
//!
//! All three attacks share one guess loop: every sample is reduced to a pair
//! `(slope, target)` in `F_q`, and a guess `g` survives iff
//! `target - slope * g` lies in the smallness region for every sample.
//!
//! * Root evaluation at `alpha` in `F_q`: `slope = a(alpha)`,
//!   `target = b(alpha)`.
//! * Zero-trace attack on `R_{q,0} x R_q`: `slope = a(alpha) / 2`,
//!   `target = Tr(b(alpha)) / 2`; the survivor is a guess for
//!   `Tr(s(alpha))`, never for `s(alpha)` itself.
//! * The general attack collects samples through the `R_{q,0}` rejection
//!   sampler and hands them to the zero-trace attack.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{Error, Result};
use crate::field::{FieldElement, PrimeField};
use crate::region::SmallnessRegion;
use crate::ring::{eval_poly, Ring};
use crate::sampler::{Oracle, Sample};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum VerdictKind {
    Guess,
    Plwe,
    NotPlwe,
    NotEnoughSamples,
    Uniform,
    Fail,
}

impl VerdictKind {
    pub fn as_str(self) -> &'static str {
        match self {
            VerdictKind::Guess => "GUESS",
            VerdictKind::Plwe => "PLWE",
            VerdictKind::NotPlwe => "NOT_PLWE",
            VerdictKind::NotEnoughSamples => "NOT_ENOUGH_SAMPLES",
            VerdictKind::Uniform => "UNIFORM",
            VerdictKind::Fail => "FAIL",
        }
    }
}

/// Outcome of an attack. `guess` is set for `GUESS` and `PLWE`; `surviving`
/// holds the full surviving guess set in ascending order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AttackVerdict {
    pub kind: VerdictKind,
    pub guess: Option<FieldElement>,
    pub surviving: Vec<FieldElement>,
}

impl AttackVerdict {
    fn from_survivors(surviving: Vec<FieldElement>, single: VerdictKind) -> Self {
        match surviving.len() {
            0 => Self { kind: VerdictKind::NotPlwe, guess: None, surviving },
            1 => Self { kind: single, guess: Some(surviving[0]), surviving },
            _ => Self { kind: VerdictKind::NotEnoughSamples, guess: None, surviving },
        }
    }

    fn fail() -> Self {
        Self { kind: VerdictKind::Fail, guess: None, surviving: Vec::new() }
    }

    pub fn surviving_count(&self) -> usize {
        self.surviving.len()
    }

    /// For the zero-trace attack: the surviving guess for `Tr(s(alpha))`.
    pub fn trace_guess(&self) -> Option<FieldElement> {
        match self.kind {
            VerdictKind::Plwe => self.guess,
            _ => None,
        }
    }
}

/// Instrumentation for the guess loop.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct WorkStats {
    /// `F_q` multiplications performed inside the guess loop.
    pub multiplications: u64,
}

/// One sample reduced to the linear check `target - slope * g in Sigma`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Evaluation {
    pub slope: FieldElement,
    pub target: FieldElement,
}

fn survivors_in(
    field: &PrimeField,
    evals: &[Evaluation],
    region: &SmallnessRegion,
    guesses: std::ops::Range<u64>,
    stats: &mut WorkStats,
) -> Vec<FieldElement> {
    let mut out = Vec::new();
    'guess: for g in guesses {
        let g = field.elem(g);
        for e in evals {
            stats.multiplications += 1;
            let v = field.sub(e.target, field.mul(e.slope, g));
            if !region.contains(v) {
                continue 'guess;
            }
        }
        out.push(g);
    }
    out
}

/// A sample whose slope is zero rules out every guess at once when its
/// target falls outside the region.
fn hopeless(evals: &[Evaluation], region: &SmallnessRegion) -> bool {
    evals.iter().any(|e| e.slope.is_zero() && !region.contains(e.target))
}

/// Runs the guess loop over all of `F_q` in ascending order.
pub fn surviving_guesses(
    field: &PrimeField,
    evals: &[Evaluation],
    region: &SmallnessRegion,
    stats: &mut WorkStats,
) -> Vec<FieldElement> {
    if hopeless(evals, region) {
        return Vec::new();
    }
    survivors_in(field, evals, region, 0..field.modulus(), stats)
}

/// Parallel variant of [`surviving_guesses`]: workers scan disjoint guess
/// ranges and the survivor lists are concatenated in range order.
pub fn surviving_guesses_parallel(
    field: &PrimeField,
    evals: &[Evaluation],
    region: &SmallnessRegion,
    stats: &mut WorkStats,
) -> Vec<FieldElement> {
    if hopeless(evals, region) {
        return Vec::new();
    }
    let q = field.modulus();
    let chunk = 1u64 << 14;
    let parts: Vec<(Vec<FieldElement>, u64)> = (0..q.div_ceil(chunk))
        .into_par_iter()
        .map(|i| {
            let mut local = WorkStats::default();
            let s = survivors_in(field, evals, region, i * chunk..((i + 1) * chunk).min(q), &mut local);
            (s, local.multiplications)
        })
        .collect();
    let mut out = Vec::new();
    for (s, m) in parts {
        stats.multiplications += m;
        out.extend(s);
    }
    out
}

fn check_region(field: &PrimeField, region: &SmallnessRegion) -> Result<()> {
    if region.q() != field.modulus() {
        return Err(Error::RegionModulusMismatch { region_q: region.q(), q: field.modulus() });
    }
    Ok(())
}

/// Root-evaluation attack at `alpha` in `F_q`. Coefficient vectors of any
/// length are accepted, so starred samples can be fed directly.
pub fn algorithm1(
    field: &PrimeField,
    samples: &[Sample],
    region: &SmallnessRegion,
    alpha: FieldElement,
) -> Result<AttackVerdict> {
    if samples.is_empty() {
        return Err(Error::NoSamples);
    }
    check_region(field, region)?;
    let alpha = field.elem(alpha.value());
    if let Some(root) = region.root() {
        if root != alpha {
            return Err(Error::RegionRootMismatch { region_root: root.value(), alpha: alpha.value() });
        }
    }
    let evals: Vec<Evaluation> = samples
        .iter()
        .map(|s| Evaluation {
            slope: eval_poly(field, s.a.coeffs(), alpha),
            target: eval_poly(field, s.b.coeffs(), alpha),
        })
        .collect();
    let survivors = surviving_guesses(field, &evals, region, &mut WorkStats::default());
    Ok(AttackVerdict::from_survivors(survivors, VerdictKind::Guess))
}

/// Precomputes `(a(alpha)/2, Tr(b(alpha))/2)` for each sample, rejecting
/// samples whose `a` lies outside `R_{q,0}`.
pub fn zero_trace_evaluations(ring: &Ring, samples: &[Sample]) -> Result<Vec<Evaluation>> {
    if ring.zero_trace().is_none() {
        return Err(Error::InvalidParameter("ring has no zero-trace root".into()));
    }
    let field = ring.field();
    let half = field.half();
    samples
        .iter()
        .enumerate()
        .map(|(i, s)| {
            let a = ring.eval_at_alpha(&s.a);
            if !a.is_base() {
                return Err(Error::SampleNotInRq0(i));
            }
            Ok(Evaluation { slope: field.mul(a.c0, half), target: ring.half_trace(&s.b) })
        })
        .collect()
}

/// Zero-trace attack on samples from `R_{q,0} x R_q`.
pub fn algorithm2(ring: &Ring, samples: &[Sample], region: &SmallnessRegion) -> Result<AttackVerdict> {
    algorithm2_with_stats(ring, samples, region).map(|(v, _)| v)
}

/// [`algorithm2`] with the guess-loop multiplication count.
pub fn algorithm2_with_stats(
    ring: &Ring,
    samples: &[Sample],
    region: &SmallnessRegion,
) -> Result<(AttackVerdict, WorkStats)> {
    let evals = prepare2(ring, samples, region)?;
    let mut stats = WorkStats::default();
    let survivors = surviving_guesses(ring.field(), &evals, region, &mut stats);
    Ok((AttackVerdict::from_survivors(survivors, VerdictKind::Plwe), stats))
}

/// [`algorithm2`] with the guess range split across the rayon pool.
pub fn algorithm2_parallel(
    ring: &Ring,
    samples: &[Sample],
    region: &SmallnessRegion,
) -> Result<AttackVerdict> {
    let evals = prepare2(ring, samples, region)?;
    let survivors = surviving_guesses_parallel(ring.field(), &evals, region, &mut WorkStats::default());
    Ok(AttackVerdict::from_survivors(survivors, VerdictKind::Plwe))
}

fn prepare2(ring: &Ring, samples: &[Sample], region: &SmallnessRegion) -> Result<Vec<Evaluation>> {
    if samples.is_empty() {
        return Err(Error::NoSamples);
    }
    check_region(ring.field(), region)?;
    zero_trace_evaluations(ring, samples)
}

/// Sample budget for the general attack: `k` samples in `R_{q,0} x R_q`
/// out of at most `l` oracle calls.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AttackPlan {
    pub k: u64,
    pub l: u64,
    pub theta: f64,
    /// Normal approximation of `P[Binomial(l, 1/q) >= k]`.
    pub hit_probability: f64,
}

impl AttackPlan {
    /// A plan with explicit `(k, l)`; `theta` and `hit_probability` are left
    /// at zero.
    pub fn manual(k: u64, l: u64) -> Result<Self> {
        let p = Self { k, l, theta: 0.0, hit_probability: 0.0 };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if self.k == 0 {
            return Err(Error::InvalidPlan("k must be at least 1".into()));
        }
        if self.l < 1 {
            return Err(Error::InvalidPlan("l must be at least 1".into()));
        }
        Ok(())
    }
}

/// General attack: collect `k` samples through the `R_{q,0}` rejection
/// sampler within `l` oracle calls, then run the zero-trace attack.
/// `NOT_PLWE` is reported as `UNIFORM`; an exhausted budget gives `FAIL`.
pub fn algorithm3(oracle: &mut Oracle, plan: &AttackPlan, region: &SmallnessRegion) -> Result<AttackVerdict> {
    plan.validate()?;
    let mut collected = Vec::with_capacity(plan.k as usize);
    let mut count = 0u64;
    while (collected.len() as u64) < plan.k {
        // a call needing more than the remaining budget pushes count past l
        let remaining = plan.l - count;
        if remaining == 0 {
            return Ok(AttackVerdict::fail());
        }
        match oracle.x0_sample_capped(remaining) {
            Ok((s, c)) => {
                count += c;
                collected.push(s);
            }
            Err(Error::BudgetExceeded(_)) => return Ok(AttackVerdict::fail()),
            Err(e) => return Err(e),
        }
    }
    let ring = oracle.ring().clone();
    finish3(&ring, &collected, region)
}

/// [`algorithm3`] over a recorded stream of oracle outputs, consumed in
/// order. Running out of samples before the plan is decided is an error,
/// not a `FAIL`.
pub fn algorithm3_from_stream<I>(ring: &Ring, stream: I, plan: &AttackPlan, region: &SmallnessRegion) -> Result<AttackVerdict>
where
    I: IntoIterator<Item = Sample>,
{
    plan.validate()?;
    let mut collected = Vec::with_capacity(plan.k as usize);
    let mut stream = stream.into_iter();
    let mut count = 0u64;
    while (collected.len() as u64) < plan.k {
        if count == plan.l {
            return Ok(AttackVerdict::fail());
        }
        let s = stream.next().ok_or_else(|| {
            Error::InvalidParameter(format!("sample stream ran out after {count} samples"))
        })?;
        count += 1;
        if ring.is_in_rq0(&s.a) {
            collected.push(s);
        }
    }
    finish3(ring, &collected, region)
}

fn finish3(ring: &Ring, collected: &[Sample], region: &SmallnessRegion) -> Result<AttackVerdict> {
    let mut verdict = algorithm2(ring, collected, region)?;
    if verdict.kind == VerdictKind::NotPlwe {
        verdict.kind = VerdictKind::Uniform;
    }
    Ok(verdict)
}

/// `1 - (|Sigma| / q)^M`.
pub fn success_probability(region_size: u64, q: u64, samples: u32) -> Result<f64> {
    if region_size >= q {
        return Err(Error::RegionCoversField { size: region_size, q });
    }
    success_probability_bound(region_size as f64, q, samples)
}

/// [`success_probability`] for a real-valued region size such as an
/// analytic bound.
pub fn success_probability_bound(bound: f64, q: u64, samples: u32) -> Result<f64> {
    if !(bound >= 0.0 && bound < q as f64) {
        return Err(Error::RegionCoversField { size: bound.ceil().max(0.0) as u64, q });
    }
    Ok(1.0 - (bound / q as f64).powi(samples as i32))
}

/// Smallest `k` with `1 - (|Sigma|/q)^k >= theta`, and `l = ceil(safety k q)`.
pub fn plan_attack(theta: f64, q: u64, region_size: u64, safety: f64) -> Result<AttackPlan> {
    if !(theta > 0.0 && theta < 1.0) {
        return Err(Error::InvalidPlan(format!("theta must lie in (0, 1), got {theta}")));
    }
    if !(safety >= 1.0 && safety.is_finite()) {
        return Err(Error::InvalidPlan(format!("safety must be >= 1, got {safety}")));
    }
    if region_size >= q {
        return Err(Error::RegionCoversField { size: region_size, q });
    }
    let ratio = region_size as f64 / q as f64;
    let k = if ratio == 0.0 {
        1
    } else {
        let mut k = ((1.0 - theta).ln() / ratio.ln()).ceil().max(1.0) as u64;
        while k > 1 && 1.0 - ratio.powi(k as i32 - 1) >= theta {
            k -= 1;
        }
        while 1.0 - ratio.powi(k as i32) < theta {
            k += 1;
        }
        k
    };
    let l = (safety * k as f64 * q as f64).ceil() as u64;
    Ok(AttackPlan { k, l, theta, hit_probability: hit_probability(k, l, q) })
}

/// `P[N(l/q, sqrt(l/q (1 - 1/q))) >= k]`.
pub fn hit_probability(k: u64, l: u64, q: u64) -> f64 {
    let p = 1.0 / q as f64;
    let mean = l as f64 * p;
    let sd = (mean * (1.0 - p)).sqrt();
    if sd == 0.0 {
        return if mean >= k as f64 { 1.0 } else { 0.0 };
    }
    let z = Normal::standard();
    1.0 - z.cdf((k as f64 - mean) / sd)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::FieldParams;
    use crate::region::{RegionMode, DEFAULT_TABLE_CAP};
    use crate::ring::{ModulusPoly, RingElement};
    use crate::sampler::{stream_rng, uniform_rq, uniform_rq0, GaussianParams};
    use std::sync::Arc;

    fn fe(f: &PrimeField, v: u64) -> FieldElement {
        f.elem(v)
    }

    fn single_elem(f: &PrimeField, v: u64) -> RingElement {
        RingElement::from_coeffs(vec![f.elem(v)])
    }

    #[test]
    fn alg1_zero_error_recovers_evaluation() {
        // f = (x - 1)(x^2 + 3) + 17 over q = 17: root alpha = 1
        let f = ModulusPoly::new(vec![-3 + 17, 3, -1, 1]).unwrap();
        let ring = Ring::new(17, f).unwrap();
        let field = *ring.field();
        let alpha = FieldElement::ONE;
        assert!(ring.eval_at(&ring.from_i64s(&[-3 + 17, 3, -1]).unwrap(), alpha) == field.from_i64(-1));
        let zero = GaussianParams::new(1e-9).unwrap();
        let mut o = Oracle::plwe(Arc::new(ring.clone()), zero, 11);
        let s = o.secret().unwrap().clone();
        let samples: Vec<Sample> = (0..3).map(|_| o.next_sample()).collect();
        let region = SmallnessRegion::from_members(17, RegionMode::TableElos, [0]).unwrap();
        let v = algorithm1(&field, &samples, &region, alpha).unwrap();
        if samples.iter().any(|smp| !ring.eval_at(&smp.a, alpha).is_zero()) {
            assert_eq!(v.kind, VerdictKind::Guess);
            assert_eq!(v.guess, Some(ring.eval_at(&s, alpha)));
        }
    }

    #[test]
    fn alg1_hopeless_sample() {
        let field = PrimeField::new(17).unwrap();
        let region = SmallnessRegion::from_members(17, RegionMode::TableElos, [0, 1, 16]).unwrap();
        let smp = Sample::new(single_elem(&field, 0), single_elem(&field, 5));
        let v = algorithm1(&field, &[smp], &region, FieldElement::ONE).unwrap();
        assert_eq!(v.kind, VerdictKind::NotPlwe);
        assert_eq!(v.surviving_count(), 0);
    }

    #[test]
    fn alg1_small_brute_force() {
        let field = PrimeField::new(17).unwrap();
        let region = SmallnessRegion::from_members(17, RegionMode::TableElos, [0, 1, 16]).unwrap();
        let smp = Sample::new(single_elem(&field, 1), single_elem(&field, 5));
        let brute: Vec<u64> = (0..17u64)
            .filter(|&g| [0, 1, 16].contains(&((5 + 17 - g) % 17)))
            .collect();
        assert_eq!(brute, vec![4, 5, 6]);
        let v = algorithm1(&field, &[smp], &region, FieldElement::ONE).unwrap();
        assert_eq!(v.kind, VerdictKind::NotEnoughSamples);
        assert_eq!(v.surviving.iter().map(|g| g.value()).collect::<Vec<_>>(), brute);
    }

    #[test]
    fn alg1_rejects_bad_input() {
        let field = PrimeField::new(17).unwrap();
        let region = SmallnessRegion::elos(17, 4, 0.1, fe(&field, 16), DEFAULT_TABLE_CAP).unwrap();
        assert_eq!(algorithm1(&field, &[], &region, fe(&field, 16)), Err(Error::NoSamples));
        let smp = Sample::new(single_elem(&field, 1), single_elem(&field, 5));
        assert!(matches!(
            algorithm1(&field, std::slice::from_ref(&smp), &region, FieldElement::ONE),
            Err(Error::RegionRootMismatch { .. })
        ));
        let other = SmallnessRegion::from_members(19, RegionMode::TableElos, [0]).unwrap();
        assert!(matches!(
            algorithm1(&field, &[smp], &other, FieldElement::ONE),
            Err(Error::RegionModulusMismatch { .. })
        ));
    }

    fn ring7() -> Ring {
        Ring::with_zero_trace_root(FieldParams::new(7, 1).unwrap(), ModulusPoly::new(vec![7, 1, 0, 1]).unwrap()).unwrap()
    }

    #[test]
    fn alg2_small_example_trace_guess_survives() {
        let ring = ring7();
        let params = *ring.zero_trace().unwrap();
        let s = ring.from_i64s(&[0, 0, 1]).unwrap();
        let a = ring.from_i64s(&[2, 0, 1]).unwrap();
        assert_eq!(ring.eval_at_alpha(&a), params.embed(FieldElement::ONE));
        let b = ring.mul(&a, &s).unwrap();
        let tr = params.trace(ring.eval_at_alpha(&s));
        assert_eq!(tr.value(), 5);
        let region = SmallnessRegion::from_members(7, RegionMode::Interval, [0]).unwrap();
        let v = algorithm2(&ring, &[Sample::new(a, b)], &region).unwrap();
        assert!(v.surviving.contains(&tr));
        assert_eq!(v.kind, VerdictKind::Plwe);
        assert_eq!(v.trace_guess(), Some(tr));
    }

    #[test]
    fn alg2_no_information() {
        let ring = ring7();
        let region = SmallnessRegion::from_members(7, RegionMode::Interval, [0, 1, 6]).unwrap();
        // a = x^2 + 1 evaluates to 0 at alpha; b = 1 has half-trace 1
        let a = ring.from_i64s(&[1, 0, 1]).unwrap();
        let b = ring.from_i64s(&[1]).unwrap();
        let samples = vec![Sample::new(a.clone(), b.clone()), Sample::new(a, b)];
        let v = algorithm2(&ring, &samples, &region).unwrap();
        assert_eq!(v.kind, VerdictKind::NotEnoughSamples);
        assert_eq!(v.surviving_count(), 7);
    }

    #[test]
    fn alg2_rejects_bad_input() {
        let ring = ring7();
        let region = SmallnessRegion::from_members(7, RegionMode::Interval, [0]).unwrap();
        assert_eq!(algorithm2(&ring, &[], &region), Err(Error::NoSamples));
        let smp = Sample::new(ring.from_i64s(&[0, 1]).unwrap(), ring.zero());
        assert_eq!(algorithm2(&ring, &[smp], &region), Err(Error::SampleNotInRq0(0)));
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
    fn alg2_uniform_with_tiny_region_rejects() {
        let ring = ring_5003();
        let region = SmallnessRegion::from_members(5003, RegionMode::Interval, [0]).unwrap();
        let mut rng = stream_rng(21, 0);
        for _ in 0..20 {
            let samples: Vec<Sample> = (0..5)
                .map(|_| Sample::new(uniform_rq0(&ring, &mut rng), uniform_rq(&ring, &mut rng)))
                .collect();
            assert_eq!(algorithm2(&ring, &samples, &region).unwrap().kind, VerdictKind::NotPlwe);
        }
    }

    #[test]
    fn adding_samples_never_grows_survivors() {
        let ring = ring_5003();
        let region = SmallnessRegion::interval(5003, 62, 8.0).unwrap();
        let mut o = Oracle::plwe(ring.clone(), GaussianParams::new(8.0).unwrap(), 3);
        let mut rng = stream_rng(5, 1);
        let mut samples = Vec::new();
        let mut prev: Option<Vec<FieldElement>> = None;
        for i in 0..6 {
            // alternate genuine and uniform samples
            let s = if i % 2 == 0 { o.next_rq0_sample() } else {
                Sample::new(uniform_rq0(&ring, &mut rng), uniform_rq(&ring, &mut rng))
            };
            samples.push(s);
            let cur = algorithm2(&ring, &samples, &region).unwrap().surviving;
            if let Some(p) = &prev {
                assert!(cur.iter().all(|g| p.contains(g)));
            }
            prev = Some(cur);
        }
    }

    #[test]
    fn parallel_matches_sequential() {
        let ring = ring_5003();
        let region = SmallnessRegion::interval(5003, 62, 8.0).unwrap();
        let mut o = Oracle::plwe(ring.clone(), GaussianParams::new(8.0).unwrap(), 4);
        let samples: Vec<Sample> = (0..2).map(|_| o.next_rq0_sample()).collect();
        assert_eq!(
            algorithm2(&ring, &samples, &region).unwrap(),
            algorithm2_parallel(&ring, &samples, &region).unwrap()
        );
    }

    #[test]
    fn worst_case_work_is_m_times_q() {
        let ring = ring7();
        let region = SmallnessRegion::from_members(7, RegionMode::Interval, [1]).unwrap();
        let a = ring.from_i64s(&[1, 0, 1]).unwrap();
        let b = ring.from_i64s(&[1]).unwrap();
        let samples = vec![Sample::new(a, b); 4];
        let (_, stats) = algorithm2_with_stats(&ring, &samples, &region).unwrap();
        assert_eq!(stats.multiplications, 4 * 7);
    }

    #[test]
    fn alg3_tiny_budget_fails() {
        let ring = ring_5003();
        let region = SmallnessRegion::interval(5003, 62, 8.0).unwrap();
        let plan = AttackPlan::manual(1, 1).unwrap();
        let mut fails = 0;
        for seed in 0..50 {
            let mut o = Oracle::uniform(ring.clone(), seed);
            if algorithm3(&mut o, &plan, &region).unwrap().kind == VerdictKind::Fail {
                fails += 1;
            }
        }
        assert!(fails >= 45);
        assert!(AttackPlan::manual(0, 10).is_err());
        assert!(AttackPlan::manual(1, 0).is_err());
    }

    #[test]
    fn alg3_stream_matches_oracle() {
        let ring = ring_5003();
        let region = SmallnessRegion::interval(5003, 62, 8.0).unwrap();
        let plan = AttackPlan::manual(2, 40_000).unwrap();
        let g = GaussianParams::new(8.0).unwrap();
        let mut live = Oracle::plwe(ring.clone(), g, 8);
        let v = algorithm3(&mut live, &plan, &region).unwrap();
        let mut replay = Oracle::plwe(ring.clone(), g, 8);
        let stream = std::iter::from_fn(|| Some(replay.next_sample()));
        assert_eq!(algorithm3_from_stream(&ring, stream, &plan, &region).unwrap(), v);
        let short = vec![Sample::new(ring.from_i64s(&[0, 1]).unwrap(), ring.zero())];
        assert!(algorithm3_from_stream(&ring, short, &plan, &region).is_err());
        let tight = AttackPlan::manual(1, 1).unwrap();
        let off = vec![Sample::new(ring.from_i64s(&[0, 1]).unwrap(), ring.zero()); 2];
        assert_eq!(algorithm3_from_stream(&ring, off, &tight, &region).unwrap().kind, VerdictKind::Fail);
    }

    #[test]
    fn success_probability_examples() {
        assert_eq!(success_probability(0, 17, 0).unwrap(), 0.0);
        assert_eq!(success_probability(5, 17, 0).unwrap(), 0.0);
        let p20 = success_probability(89_124, 100_000, 20).unwrap();
        assert!(p20 >= 0.90);
        assert!(success_probability(17, 17, 3).is_err());
        let b = 89_127.409;
        assert!((success_probability_bound(b, 100_003, 12).unwrap() - 0.74882).abs() < 1e-5);
        assert!(success_probability_bound(b, 100_003, 20).unwrap() >= 0.90);
        assert!(success_probability_bound(100_003.0, 100_003, 1).is_err());
    }

    #[test]
    fn plan_examples() {
        // 0.8912^12 = 0.2510 > 0.25, so twelve samples fall just short of 75%
        let p = plan_attack(0.75, 10_000, 8912, 1.0).unwrap();
        assert_eq!(p.k, 13);
        assert_eq!(plan_attack(0.5, 17, 0, 1.0).unwrap().k, 1);
        let p = plan_attack(0.99, 100, 50, 2.0).unwrap();
        assert_eq!(p.k, 7);
        assert_eq!(p.l, 1400);
        // mean 14, sd ~3.73: P[N >= 7] ~ 0.97
        assert!((p.hit_probability - 0.970).abs() < 0.01);
        assert!(plan_attack(1.0, 100, 50, 1.0).is_err());
        assert!(plan_attack(0.5, 100, 100, 1.0).is_err());
        // brute-force k search
        for size in [1u64, 10, 50, 90, 99] {
            for theta in [0.1, 0.5, 0.9, 0.999] {
                let k = plan_attack(theta, 100, size, 1.0).unwrap().k;
                let brute = (1..).find(|&k| 1.0 - (size as f64 / 100.0).powi(k) >= theta).unwrap();
                assert_eq!(k, brute as u64);
            }
        }
    }
}
