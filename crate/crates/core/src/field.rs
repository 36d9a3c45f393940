//! Arithmetic in the prime field `F_q` and in the quadratic extension
//! `F_{q^2} = F_q[x]/(x^2 + rho)`.
//!
//! Elements are plain canonical residues; the modulus lives in a small
//! context value ([`PrimeField`] or [`FieldParams`]) that performs the
//! operations. All products go through `u128` before reduction.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Canonical residue in `[0, q-1]`.
#[derive(
    Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
)]
#[serde(transparent)]
pub struct FieldElement(u64);

impl FieldElement {
    pub const ZERO: FieldElement = FieldElement(0);
    pub const ONE: FieldElement = FieldElement(1);

    pub fn value(self) -> u64 {
        self.0
    }

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Deterministic primality test for 64-bit integers (Miller-Rabin with the
/// first twelve prime bases).
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    const BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    for p in BASES {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        s += 1;
    }
    'outer: for a in BASES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'outer;
            }
        }
        return false;
    }
    true
}

/// Prime factorization by trial division, as `(prime, exponent)` pairs in
/// ascending prime order.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2u64;
    while p.saturating_mul(p) <= n {
        if n.is_multiple_of(p) {
            let mut e = 0;
            while n.is_multiple_of(p) {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

/// The smallest prime `>= n`.
pub fn next_prime(n: u64) -> u64 {
    let mut c = n.max(2);
    while !is_prime(c) {
        c += 1;
    }
    c
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// The prime field `F_q` for an odd prime `q`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct PrimeField {
    q: u64,
}

impl PrimeField {
    pub fn new(q: u64) -> Result<Self> {
        if q < 3 || !is_prime(q) {
            return Err(Error::NotOddPrime(q));
        }
        Ok(Self { q })
    }

    pub fn modulus(&self) -> u64 {
        self.q
    }

    /// Reduces an unsigned integer into the field.
    pub fn elem(&self, v: u64) -> FieldElement {
        FieldElement(v % self.q)
    }

    /// Reduces a signed integer into the field.
    pub fn from_i64(&self, v: i64) -> FieldElement {
        FieldElement(v.rem_euclid(self.q as i64) as u64)
    }

    pub fn from_i128(&self, v: i128) -> FieldElement {
        FieldElement(v.rem_euclid(self.q as i128) as u64)
    }

    /// Balanced lift into `(-q/2, q/2]`.
    pub fn to_signed(&self, x: FieldElement) -> i64 {
        if x.0 > self.q / 2 {
            x.0 as i64 - self.q as i64
        } else {
            x.0 as i64
        }
    }

    pub fn add(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        let s = a.0 + b.0;
        FieldElement(if s >= self.q { s - self.q } else { s })
    }

    pub fn sub(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        FieldElement(if a.0 >= b.0 { a.0 - b.0 } else { a.0 + self.q - b.0 })
    }

    pub fn neg(&self, a: FieldElement) -> FieldElement {
        if a.0 == 0 {
            a
        } else {
            FieldElement(self.q - a.0)
        }
    }

    pub fn mul(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        FieldElement(mul_mod(a.0, b.0, self.q))
    }

    pub fn pow(&self, a: FieldElement, exp: u64) -> FieldElement {
        FieldElement(pow_mod(a.0, exp, self.q))
    }

    pub fn inv(&self, a: FieldElement) -> Result<FieldElement> {
        if a.is_zero() {
            return Err(Error::ZeroInput);
        }
        Ok(self.pow(a, self.q - 2))
    }

    /// `2^{-1} mod q`.
    pub fn half(&self) -> FieldElement {
        FieldElement(self.q.div_ceil(2))
    }

    /// Least `r >= 1` with `x^r = 1`, found by descending through the divisors
    /// of `q - 1`.
    pub fn mult_order(&self, x: FieldElement) -> Result<u64> {
        if x.is_zero() {
            return Err(Error::ZeroInput);
        }
        let mut r = self.q - 1;
        for (p, _) in factorize(self.q - 1) {
            while r.is_multiple_of(p) && self.pow(x, r / p) == FieldElement::ONE {
                r /= p;
            }
        }
        Ok(r)
    }

    /// Euler criterion: `x^((q-1)/2) == 1`.
    pub fn is_quadratic_residue(&self, x: FieldElement) -> Result<bool> {
        if x.is_zero() {
            return Err(Error::ZeroInput);
        }
        Ok(self.pow(x, (self.q - 1) / 2) == FieldElement::ONE)
    }

    /// All residues in ascending order.
    pub fn elements(&self) -> impl Iterator<Item = FieldElement> {
        (0..self.q).map(FieldElement)
    }
}

/// Element `c0 + c1*alpha` of `F_{q^2}`, where `alpha^2 = -rho`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct QuadExtElement {
    pub c0: FieldElement,
    pub c1: FieldElement,
}

impl QuadExtElement {
    pub fn new(c0: FieldElement, c1: FieldElement) -> Self {
        Self { c0, c1 }
    }

    /// True iff the element lies in the base field.
    pub fn is_base(&self) -> bool {
        self.c1.is_zero()
    }
}

/// A prime `q` together with `rho` such that `x^2 + rho` is irreducible over
/// `F_q`, fixing the extension `F_{q^2}` and its zero-trace generator `alpha`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct FieldParams {
    field: PrimeField,
    rho: FieldElement,
}

impl FieldParams {
    pub fn new(q: u64, rho: u64) -> Result<Self> {
        let field = PrimeField::new(q)?;
        if rho == 0 || rho >= q {
            return Err(Error::RhoOutOfRange(rho));
        }
        let rho = field.elem(rho);
        if field.is_quadratic_residue(field.neg(rho))? {
            return Err(Error::ReducibleQuadratic { q, rho: rho.value() });
        }
        Ok(Self { field, rho })
    }

    pub fn field(&self) -> &PrimeField {
        &self.field
    }

    pub fn q(&self) -> u64 {
        self.field.modulus()
    }

    pub fn rho(&self) -> FieldElement {
        self.rho
    }

    /// `-rho`, the norm-side root `alpha^2`.
    pub fn neg_rho(&self) -> FieldElement {
        self.field.neg(self.rho)
    }

    /// Multiplicative order of `-rho`.
    pub fn order_of_neg_rho(&self) -> u64 {
        self.field
            .mult_order(self.neg_rho())
            .expect("-rho is nonzero by construction")
    }

    pub fn alpha(&self) -> QuadExtElement {
        QuadExtElement::new(FieldElement::ZERO, FieldElement::ONE)
    }

    pub fn embed(&self, c: FieldElement) -> QuadExtElement {
        QuadExtElement::new(c, FieldElement::ZERO)
    }

    pub fn add(&self, x: QuadExtElement, y: QuadExtElement) -> QuadExtElement {
        let f = &self.field;
        QuadExtElement::new(f.add(x.c0, y.c0), f.add(x.c1, y.c1))
    }

    pub fn sub(&self, x: QuadExtElement, y: QuadExtElement) -> QuadExtElement {
        let f = &self.field;
        QuadExtElement::new(f.sub(x.c0, y.c0), f.sub(x.c1, y.c1))
    }

    pub fn scale(&self, c: FieldElement, x: QuadExtElement) -> QuadExtElement {
        let f = &self.field;
        QuadExtElement::new(f.mul(c, x.c0), f.mul(c, x.c1))
    }

    /// `(a + b alpha)(c + d alpha) = (ac - rho bd) + (ad + bc) alpha`.
    pub fn mul(&self, x: QuadExtElement, y: QuadExtElement) -> QuadExtElement {
        let f = &self.field;
        let ac = f.mul(x.c0, y.c0);
        let bd = f.mul(x.c1, y.c1);
        let c0 = f.sub(ac, f.mul(self.rho, bd));
        let c1 = f.add(f.mul(x.c0, y.c1), f.mul(x.c1, y.c0));
        QuadExtElement::new(c0, c1)
    }

    pub fn pow(&self, x: QuadExtElement, mut exp: u64) -> QuadExtElement {
        let mut acc = self.embed(FieldElement::ONE);
        let mut base = x;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            exp >>= 1;
        }
        acc
    }

    /// `x^q = c0 - c1 alpha`.
    pub fn frobenius(&self, x: QuadExtElement) -> QuadExtElement {
        QuadExtElement::new(x.c0, self.field.neg(x.c1))
    }

    /// `x + x^q = 2 c0`.
    pub fn trace(&self, x: QuadExtElement) -> FieldElement {
        self.field.add(x.c0, x.c0)
    }

    /// `x * x^q = c0^2 + rho c1^2`.
    pub fn norm(&self, x: QuadExtElement) -> FieldElement {
        let f = &self.field;
        f.add(f.mul(x.c0, x.c0), f.mul(self.rho, f.mul(x.c1, x.c1)))
    }

    pub fn inv(&self, x: QuadExtElement) -> Result<QuadExtElement> {
        let n_inv = self.field.inv(self.norm(x))?;
        Ok(self.scale(n_inv, self.frobenius(x)))
    }
}
