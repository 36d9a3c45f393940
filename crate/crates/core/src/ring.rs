//! The quotient ring `R_q = F_q[x]/(f(x))`, its subring `R_{q,0}` of elements
//! that evaluate into `F_q` at the zero-trace root, and the star map.

use std::fmt;

use crate::error::{Error, Result};
use crate::field::{FieldElement, FieldParams, PrimeField, QuadExtElement};
use crate::fpoly;

/// Odd primes tried when certifying irreducibility over the integers.
pub const CERTIFICATE_PRIMES: usize = 25;

/// Monic integer polynomial of degree `N`, coefficients in ascending degree.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ModulusPoly {
    coeffs: Vec<i64>,
}

impl ModulusPoly {
    pub fn new(coeffs: Vec<i64>) -> Result<Self> {
        if coeffs.len() < 2 {
            return Err(Error::DegreeTooSmall(coeffs.len().saturating_sub(1), 1));
        }
        if coeffs.last() != Some(&1) {
            return Err(Error::NotMonic);
        }
        Ok(Self { coeffs })
    }

    pub fn coeffs(&self) -> &[i64] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// `floor((N - 1) / 2)`.
    pub fn n_star(&self) -> usize {
        (self.degree() - 1) / 2
    }

    pub fn reduce(&self, field: &PrimeField) -> Vec<FieldElement> {
        self.coeffs.iter().map(|&c| field.from_i64(c)).collect()
    }

    /// Checks `x^2 + rho | f` mod q through the two evaluations
    /// `sum_j f_{2j} (-rho)^j` and `sum_j f_{2j+1} (-rho)^j`.
    pub fn has_quadratic_factor(&self, field: &PrimeField, rho: FieldElement) -> bool {
        let (even, odd) = split_eval(field, &self.reduce(field), field.neg(rho));
        even.is_zero() && odd.is_zero()
    }

    /// Certifies irreducibility over the integers from factorization degree
    /// patterns modulo small auxiliary primes (skipping `exclude`). A factor
    /// over the integers of degree `d` forces `d` to be a subset sum of the
    /// factor degrees modulo every prime where `f` stays squarefree, so once
    /// the intersection of those sets is `{0, N}` the polynomial is
    /// irreducible. Returns the primes used, or `None` if undecided.
    pub fn certify_irreducible(&self, exclude: u64) -> Option<Vec<u64>> {
        let n = self.degree();
        let mut possible = vec![true; n + 1];
        let mut used = Vec::new();
        let primes = (3u64..)
            .filter(|&p| crate::field::is_prime(p))
            .take(CERTIFICATE_PRIMES);
        for p in primes {
            if p == exclude {
                continue;
            }
            let field = PrimeField::new(p).expect("odd prime");
            let Some(degrees) = fpoly::factor_degrees(&field, &self.reduce(&field)) else {
                continue;
            };
            used.push(p);
            let reach = fpoly::subset_sums(&degrees, n);
            for (slot, r) in possible.iter_mut().zip(reach) {
                *slot &= r;
            }
            if possible[1..n].iter().all(|&x| !x) {
                return Some(used);
            }
        }
        None
    }
}

impl fmt::Display for ModulusPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, &c) in self.coeffs.iter().enumerate().rev() {
            if c == 0 {
                continue;
            }
            let sign = if c < 0 { "-" } else { "+" };
            if first {
                if c < 0 {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            first = false;
            let mag = c.unsigned_abs();
            match (i, mag) {
                (0, m) => write!(f, "{m}")?,
                (1, 1) => write!(f, "x")?,
                (1, m) => write!(f, "{m}x")?,
                (e, 1) => write!(f, "x^{e}")?,
                (e, m) => write!(f, "{m}x^{e}")?,
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

/// Evaluates the even-index and odd-index halves of `p` at `y`:
/// returns `(sum_j p_{2j} y^j, sum_j p_{2j+1} y^j)`.
pub(crate) fn split_eval(
    field: &PrimeField,
    p: &[FieldElement],
    y: FieldElement,
) -> (FieldElement, FieldElement) {
    let horner = |it: &mut dyn DoubleEndedIterator<Item = &FieldElement>| {
        it.rev()
            .fold(FieldElement::ZERO, |acc, &c| field.add(field.mul(acc, y), c))
    };
    let even = horner(&mut p.iter().step_by(2));
    let odd = horner(&mut p.iter().skip(1).step_by(2));
    (even, odd)
}

/// Coefficient vector of a class in `R_q`, index `i` holding the coefficient
/// of `x^i`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RingElement {
    coeffs: Vec<FieldElement>,
}

impl RingElement {
    /// Wraps a coefficient vector without a length check. Ring operations
    /// validate lengths against `N`.
    pub fn from_coeffs(coeffs: Vec<FieldElement>) -> Self {
        Self { coeffs }
    }

    pub fn coeffs(&self) -> &[FieldElement] {
        &self.coeffs
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    pub fn into_coeffs(self) -> Vec<FieldElement> {
        self.coeffs
    }
}

/// `F_q[x]/(f(x))`, optionally equipped with a zero-trace root `alpha`
/// (`alpha^2 = -rho`, `x^2 + rho | f`).
#[derive(Clone, Debug)]
pub struct Ring {
    field: PrimeField,
    modulus: ModulusPoly,
    reduced: Vec<FieldElement>,
    zero_trace: Option<FieldParams>,
}

impl Ring {
    /// Plain quotient ring with no zero-trace structure.
    pub fn new(q: u64, modulus: ModulusPoly) -> Result<Self> {
        let field = PrimeField::new(q)?;
        let reduced = modulus.reduce(&field);
        Ok(Self { field, modulus, reduced, zero_trace: None })
    }

    /// Quotient ring whose modulus is divisible by `x^2 + rho` mod q.
    pub fn with_zero_trace_root(params: FieldParams, modulus: ModulusPoly) -> Result<Self> {
        if modulus.degree() < 2 {
            return Err(Error::DegreeTooSmall(modulus.degree(), 2));
        }
        let field = *params.field();
        if !modulus.has_quadratic_factor(&field, params.rho()) {
            return Err(Error::QuadraticFactorMissing { q: params.q(), rho: params.rho().value() });
        }
        let reduced = modulus.reduce(&field);
        Ok(Self { field, modulus, reduced, zero_trace: Some(params) })
    }

    pub fn field(&self) -> &PrimeField {
        &self.field
    }

    pub fn q(&self) -> u64 {
        self.field.modulus()
    }

    pub fn modulus(&self) -> &ModulusPoly {
        &self.modulus
    }

    /// `N`, the degree of `f`.
    pub fn degree(&self) -> usize {
        self.modulus.degree()
    }

    pub fn n_star(&self) -> usize {
        self.modulus.n_star()
    }

    pub fn zero_trace(&self) -> Option<&FieldParams> {
        self.zero_trace.as_ref()
    }

    fn params(&self) -> &FieldParams {
        self.zero_trace
            .as_ref()
            .expect("ring was built without a zero-trace root")
    }

    pub fn zero(&self) -> RingElement {
        RingElement::from_coeffs(vec![FieldElement::ZERO; self.degree()])
    }

    pub fn one(&self) -> RingElement {
        let mut z = self.zero();
        z.coeffs[0] = FieldElement::ONE;
        z
    }

    /// Builds an element from residues, rejecting the wrong length.
    pub fn element(&self, coeffs: Vec<FieldElement>) -> Result<RingElement> {
        self.check_len(coeffs.len())?;
        Ok(RingElement::from_coeffs(coeffs))
    }

    /// Builds an element from signed integers, zero-padding up to `N`.
    pub fn from_i64s(&self, coeffs: &[i64]) -> Result<RingElement> {
        if coeffs.len() > self.degree() {
            return Err(Error::LengthMismatch { expected: self.degree(), got: coeffs.len() });
        }
        let mut v: Vec<FieldElement> = coeffs.iter().map(|&c| self.field.from_i64(c)).collect();
        v.resize(self.degree(), FieldElement::ZERO);
        Ok(RingElement::from_coeffs(v))
    }

    fn check_len(&self, got: usize) -> Result<()> {
        if got != self.degree() {
            return Err(Error::LengthMismatch { expected: self.degree(), got });
        }
        Ok(())
    }

    pub fn add(&self, p: &RingElement, r: &RingElement) -> Result<RingElement> {
        self.check_len(p.len())?;
        self.check_len(r.len())?;
        Ok(RingElement::from_coeffs(
            p.coeffs.iter().zip(&r.coeffs).map(|(&a, &b)| self.field.add(a, b)).collect(),
        ))
    }

    pub fn sub(&self, p: &RingElement, r: &RingElement) -> Result<RingElement> {
        self.check_len(p.len())?;
        self.check_len(r.len())?;
        Ok(RingElement::from_coeffs(
            p.coeffs.iter().zip(&r.coeffs).map(|(&a, &b)| self.field.sub(a, b)).collect(),
        ))
    }

    /// Adds a vector of small signed integers (an error term) to `p`.
    pub fn add_signed(&self, p: &RingElement, e: &[i64]) -> Result<RingElement> {
        self.check_len(p.len())?;
        self.check_len(e.len())?;
        Ok(RingElement::from_coeffs(
            p.coeffs
                .iter()
                .zip(e)
                .map(|(&a, &b)| self.field.add(a, self.field.from_i64(b)))
                .collect(),
        ))
    }

    /// Schoolbook product followed by monic long division by `f`.
    pub fn mul(&self, p: &RingElement, r: &RingElement) -> Result<RingElement> {
        self.check_len(p.len())?;
        self.check_len(r.len())?;
        let n = self.degree();
        let f = &self.field;
        let mut prod = vec![FieldElement::ZERO; 2 * n - 1];
        for (i, &a) in p.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, &b) in r.coeffs.iter().enumerate() {
                prod[i + j] = f.add(prod[i + j], f.mul(a, b));
            }
        }
        for k in (n..2 * n - 1).rev() {
            let c = prod[k];
            if c.is_zero() {
                continue;
            }
            let base = k - n;
            for (i, &fi) in self.reduced[..n].iter().enumerate() {
                prod[base + i] = f.sub(prod[base + i], f.mul(c, fi));
            }
        }
        prod.truncate(n);
        Ok(RingElement::from_coeffs(prod))
    }

    /// Horner evaluation at a point of `F_q`; accepts any coefficient length.
    pub fn eval_at(&self, p: &RingElement, x: FieldElement) -> FieldElement {
        eval_poly(&self.field, p.coeffs(), x)
    }

    /// `p(alpha) = sum_j (-rho)^j p_{2j} + (sum_j (-rho)^j p_{2j+1}) alpha`.
    pub fn eval_at_alpha(&self, p: &RingElement) -> QuadExtElement {
        let params = self.params();
        let (c0, c1) = split_eval(&self.field, p.coeffs(), params.neg_rho());
        QuadExtElement::new(c0, c1)
    }

    /// `1/2 Tr(p(alpha))`, i.e. the `F_q` part of `p(alpha)`.
    pub fn half_trace(&self, p: &RingElement) -> FieldElement {
        self.eval_at_alpha(p).c0
    }

    /// Membership in `R_{q,0}`: the odd-index linear form vanishes.
    pub fn is_in_rq0(&self, p: &RingElement) -> bool {
        self.eval_at_alpha(p).c1.is_zero()
    }

    /// Coefficients `(-rho)^j` of the linear form on odd-index coefficients
    /// `p_{2j+1}` that cuts out `R_{q,0}`.
    pub fn rq0_form(&self) -> Vec<FieldElement> {
        let y = self.params().neg_rho();
        let odd = self.degree() / 2;
        let mut out = Vec::with_capacity(odd);
        let mut pw = FieldElement::ONE;
        for _ in 0..odd {
            out.push(pw);
            pw = self.field.mul(pw, y);
        }
        out
    }

    /// Even-index subsequence `(p_0, p_2, ..., p_{2N*})`.
    pub fn star(&self, p: &RingElement) -> RingElement {
        RingElement::from_coeffs(p.coeffs.iter().step_by(2).copied().collect())
    }
}

pub(crate) fn eval_poly(field: &PrimeField, p: &[FieldElement], x: FieldElement) -> FieldElement {
    p.iter()
        .rev()
        .fold(FieldElement::ZERO, |acc, &c| field.add(field.mul(acc, x), c))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    // f = x^3 + x + 7, divisible by x^2 + 1 mod 7 (f = x(x^2+1) mod 7)
    fn ring7() -> Ring {
        let params = FieldParams::new(7, 1).unwrap();
        Ring::with_zero_trace_root(params, ModulusPoly::new(vec![7, 1, 0, 1]).unwrap()).unwrap()
    }

    fn values(p: &RingElement) -> Vec<u64> {
        p.coeffs().iter().map(|c| c.value()).collect()
    }

    /// Independent reduction oracle: integer long division then mod q.
    fn long_division_oracle(prod: &[i64], f: &[i64], q: i64) -> Vec<i64> {
        let mut r: Vec<i64> = prod.iter().map(|c| c.rem_euclid(q)).collect();
        let n = f.len() - 1;
        while r.len() > n {
            let c = r.pop().unwrap();
            let base = r.len() - n;
            for i in 0..n {
                r[base + i] = (r[base + i] - c * f[i]).rem_euclid(q);
            }
        }
        r
    }

    #[test]
    fn mul_examples() {
        let ring = ring7();
        let r = ring.from_i64s(&[3, 5, 2]).unwrap();
        assert_eq!(ring.mul(&ring.one(), &r).unwrap(), r);
        assert!(ring.mul(&ring.zero(), &r).unwrap().is_zero());
        let x2 = ring.from_i64s(&[0, 0, 1]).unwrap();
        let x = ring.from_i64s(&[0, 1]).unwrap();
        let got = ring.mul(&x2, &x).unwrap();
        assert_eq!(values(&got), long_division_oracle(&[0, 0, 0, 1], &[7, 1, 0, 1], 7).iter().map(|&v| v as u64).collect::<Vec<_>>());
        assert_eq!(values(&got), vec![0, 6, 0]);
        let bad = RingElement::from_coeffs(vec![FieldElement::ZERO; 2]);
        assert_eq!(ring.mul(&bad, &r), Err(Error::LengthMismatch { expected: 3, got: 2 }));
    }

    #[test]
    fn mul_matches_oracle_randomized() {
        let params = FieldParams::new(103, 2).unwrap();
        // (x^2 + 2)(x^5 + 3) + 103
        let f = vec![6 + 103, 0, 3, 0, 0, 2, 0, 1];
        let ring = Ring::with_zero_trace_root(params, ModulusPoly::new(f.clone()).unwrap()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..200 {
            let a: Vec<i64> = (0..7).map(|_| rng.random_range(0..103)).collect();
            let b: Vec<i64> = (0..7).map(|_| rng.random_range(0..103)).collect();
            let mut prod = vec![0i64; 13];
            for i in 0..7 {
                for j in 0..7 {
                    prod[i + j] += a[i] * b[j];
                }
            }
            let want = long_division_oracle(&prod, &f, 103);
            let got = ring.mul(&ring.from_i64s(&a).unwrap(), &ring.from_i64s(&b).unwrap()).unwrap();
            assert_eq!(values(&got), want.iter().map(|&v| v as u64).collect::<Vec<_>>());
        }
    }

    #[test]
    fn eval_examples() {
        let ring = ring7();
        let params = *ring.zero_trace().unwrap();
        let p = ring.from_i64s(&[1, 2, 3]).unwrap();
        // Horner in F_{q^2}
        let horner = p.coeffs().iter().rev().fold(QuadExtElement::default(), |acc, &c| {
            params.add(params.mul(acc, params.alpha()), params.embed(c))
        });
        let got = ring.eval_at_alpha(&p);
        assert_eq!(got, horner);
        assert_eq!((got.c0.value(), got.c1.value()), (5, 2));
        let c = ring.from_i64s(&[4]).unwrap();
        assert_eq!(ring.eval_at_alpha(&c), params.embed(ring.field().elem(4)));
    }

    #[test]
    fn f_vanishes_at_alpha() {
        let ring = ring7();
        let (e, o) = split_eval(ring.field(), &ring.modulus().reduce(ring.field()), ring.field().elem(6));
        assert!(e.is_zero() && o.is_zero());
    }

    #[test]
    fn rq0_membership() {
        let params = FieldParams::new(7, 1).unwrap();
        // degree-4 modulus so x^3 is representable: (x^2+1)(x^2+1) + 7
        let ring = Ring::with_zero_trace_root(params, ModulusPoly::new(vec![8, 0, 2, 0, 1]).unwrap()).unwrap();
        assert!(ring.is_in_rq0(&ring.from_i64s(&[0, 1, 0, 1]).unwrap()));
        assert!(ring.is_in_rq0(&ring.from_i64s(&[5]).unwrap()));
        assert!(!ring.is_in_rq0(&ring.from_i64s(&[0, 1]).unwrap()));
    }

    #[test]
    fn star_examples() {
        let params = FieldParams::new(7, 1).unwrap();
        let ring = Ring::with_zero_trace_root(params, ModulusPoly::new(vec![8, 0, 2, 0, 1]).unwrap()).unwrap();
        assert_eq!(values(&ring.star(&ring.from_i64s(&[1, 2, 3, 4]).unwrap())), vec![1, 3]);
        assert!(ring.star(&ring.zero()).is_zero());
        assert_eq!(ring.star(&ring.zero()).len(), ring.n_star() + 1);
    }

    #[test]
    fn quadratic_factor_required() {
        let params = FieldParams::new(7, 1).unwrap();
        let err = Ring::with_zero_trace_root(params, ModulusPoly::new(vec![1, 0, 0, 0, 1]).unwrap());
        assert!(matches!(err, Err(Error::QuadraticFactorMissing { .. })));
        assert_eq!(ModulusPoly::new(vec![1, 2]).map(|_| ()), Err(Error::NotMonic));
    }

    #[test]
    fn display_modulus() {
        let f = ModulusPoly::new(vec![103_347, 0, 2, 0, 1672, 0, 1]).unwrap();
        assert_eq!(f.to_string(), "x^6 + 1672x^4 + 2x^2 + 103347");
        assert_eq!(ModulusPoly::new(vec![-1, 0, 1]).unwrap().to_string(), "x^2 - 1");
    }

    #[test]
    fn rq0_dimension_by_counting() {
        // Count solutions of the linear constraint over all of R_q for small q, N.
        for (q, rho, f) in [(3u64, 1u64, vec![4i64, 1, 1, 1]), (7, 1, vec![8, 0, 2, 0, 1]), (3, 1, vec![4, 0, 1, 1, 0, 1])] {
            let params = FieldParams::new(q, rho).unwrap();
            let m = ModulusPoly::new(f).unwrap();
            let ring = Ring::with_zero_trace_root(params, m).unwrap();
            let n = ring.degree();
            let total = q.pow(n as u32);
            let mut count = 0u64;
            for idx in 0..total {
                let mut v = idx;
                let coeffs: Vec<i64> = (0..n).map(|_| { let c = v % q; v /= q; c as i64 }).collect();
                if ring.is_in_rq0(&ring.from_i64s(&coeffs).unwrap()) {
                    count += 1;
                }
            }
            assert_eq!(count, q.pow(n as u32 - 1), "q={q} N={n}");
        }
    }

    #[test]
    fn large_modulus_certifies() {
        let mut c = vec![0i64; 317];
        c[316] = 1;
        c[314] = 1672;
        c[2] = 2;
        c[0] = 103_347;
        let f = ModulusPoly::new(c).unwrap();
        assert!(f.certify_irreducible(100_003).is_some());
        // x^4 - 1 is reducible: never certified
        assert!(ModulusPoly::new(vec![-1, 0, 0, 0, 1]).unwrap().certify_irreducible(0).is_none());
    }
}
