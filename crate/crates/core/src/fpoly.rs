//! Dense univariate polynomials over a prime field, coefficients in
//! ascending degree. Used for long division checks, the cyclotomic product
//! identity and the irreducibility certificate over the integers.

use crate::field::{FieldElement, PrimeField};

pub type Coeffs = Vec<FieldElement>;

/// Drops trailing zero coefficients. The zero polynomial is the empty vector.
pub fn trim(mut p: Coeffs) -> Coeffs {
    while p.last().is_some_and(|c| c.is_zero()) {
        p.pop();
    }
    p
}

/// Degree, with the zero polynomial reported as `None`.
pub fn degree(p: &[FieldElement]) -> Option<usize> {
    p.iter().rposition(|c| !c.is_zero())
}

pub fn mul(f: &PrimeField, a: &[FieldElement], b: &[FieldElement]) -> Coeffs {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![FieldElement::ZERO; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = f.add(out[i + j], f.mul(x, y));
        }
    }
    trim(out)
}

pub fn sub(f: &PrimeField, a: &[FieldElement], b: &[FieldElement]) -> Coeffs {
    let n = a.len().max(b.len());
    let get = |p: &[FieldElement], i: usize| p.get(i).copied().unwrap_or_default();
    trim((0..n).map(|i| f.sub(get(a, i), get(b, i))).collect())
}

/// Long division `a = quot * b + rem`. Panics on a zero divisor.
pub fn divrem(f: &PrimeField, a: &[FieldElement], b: &[FieldElement]) -> (Coeffs, Coeffs) {
    let db = degree(b).expect("division by the zero polynomial");
    let lead_inv = f.inv(b[db]).expect("nonzero leading coefficient");
    let mut rem = trim(a.to_vec());
    if rem.len() <= db {
        return (Vec::new(), rem);
    }
    let mut quot = vec![FieldElement::ZERO; rem.len() - db];
    while let Some(dr) = degree(&rem) {
        if dr < db {
            break;
        }
        let c = f.mul(rem[dr], lead_inv);
        let shift = dr - db;
        quot[shift] = c;
        for (j, &bj) in b[..=db].iter().enumerate() {
            rem[shift + j] = f.sub(rem[shift + j], f.mul(c, bj));
        }
        rem = trim(rem);
    }
    (trim(quot), rem)
}

pub fn make_monic(f: &PrimeField, p: Coeffs) -> Coeffs {
    let p = trim(p);
    match p.last() {
        Some(&lead) => {
            let inv = f.inv(lead).expect("nonzero lead");
            p.into_iter().map(|c| f.mul(c, inv)).collect()
        }
        None => p,
    }
}

/// Monic greatest common divisor.
pub fn gcd(f: &PrimeField, a: &[FieldElement], b: &[FieldElement]) -> Coeffs {
    let mut x = trim(a.to_vec());
    let mut y = trim(b.to_vec());
    while !y.is_empty() {
        let (_, r) = divrem(f, &x, &y);
        x = y;
        y = r;
    }
    make_monic(f, x)
}

pub fn derivative(f: &PrimeField, p: &[FieldElement]) -> Coeffs {
    trim(
        p.iter()
            .enumerate()
            .skip(1)
            .map(|(i, &c)| f.mul(f.elem(i as u64), c))
            .collect(),
    )
}

/// Degrees of the irreducible factors of a monic squarefree polynomial,
/// via distinct-degree factorization. Returns `None` when the polynomial is
/// not squarefree.
pub fn factor_degrees(f: &PrimeField, poly: &[FieldElement]) -> Option<Vec<usize>> {
    let poly = make_monic(f, poly.to_vec());
    let n = degree(&poly)?;
    if n == 0 {
        return Some(Vec::new());
    }
    if degree(&gcd(f, &poly, &derivative(f, &poly))) != Some(0) {
        return None;
    }
    let p = f.modulus() as usize;

    // Frobenius matrix: row j holds x^(p*j) mod poly.
    let reduce_shift = |v: &mut Coeffs| {
        // v has length n; multiply by x and reduce by the monic poly
        let top = v[n - 1];
        for i in (1..n).rev() {
            v[i] = f.sub(v[i - 1], f.mul(top, poly[i]));
        }
        v[0] = f.neg(f.mul(top, poly[0]));
    };
    let mut rows: Vec<Coeffs> = Vec::with_capacity(n);
    let mut cur = vec![FieldElement::ZERO; n];
    cur[0] = FieldElement::ONE;
    for _ in 0..n {
        rows.push(cur.clone());
        for _ in 0..p {
            reduce_shift(&mut cur);
        }
    }
    let frobenius = |h: &Coeffs| -> Coeffs {
        let mut out = vec![FieldElement::ZERO; n];
        for (j, &hj) in h.iter().enumerate() {
            if hj.is_zero() {
                continue;
            }
            for (o, &r) in out.iter_mut().zip(&rows[j]) {
                *o = f.add(*o, f.mul(hj, r));
            }
        }
        out
    };

    let x_poly = vec![FieldElement::ZERO, FieldElement::ONE];
    let mut h = vec![FieldElement::ZERO; n];
    if n > 1 {
        h[1] = FieldElement::ONE;
    } else {
        // degree one: already irreducible
        return Some(vec![1]);
    }
    let mut rest = poly.clone();
    let mut degrees = Vec::new();
    let mut i = 0;
    while let Some(dr) = degree(&rest) {
        if dr < 2 * (i + 1) {
            if dr > 0 {
                degrees.push(dr);
            }
            break;
        }
        i += 1;
        h = frobenius(&h);
        let g = gcd(f, &sub(f, &h, &x_poly), &rest);
        let dg = degree(&g).unwrap_or(0);
        if dg > 0 {
            degrees.extend(std::iter::repeat_n(i, dg / i));
            rest = divrem(f, &rest, &g).0;
        }
    }
    Some(degrees)
}

/// Marks every achievable subset sum of `degrees` in `[0, total]`.
pub fn subset_sums(degrees: &[usize], total: usize) -> Vec<bool> {
    let mut reach = vec![false; total + 1];
    reach[0] = true;
    for &d in degrees {
        for s in (d..=total).rev() {
            if reach[s - d] {
                reach[s] = true;
            }
        }
    }
    reach
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pf(q: u64) -> PrimeField {
        PrimeField::new(q).unwrap()
    }

    fn poly(f: &PrimeField, c: &[i64]) -> Coeffs {
        c.iter().map(|&v| f.from_i64(v)).collect()
    }

    #[test]
    fn divrem_reconstructs() {
        let f = pf(7);
        let a = poly(&f, &[1, 2, 3, 4, 5, 6]);
        let b = poly(&f, &[3, 0, 1]);
        let (qt, r) = divrem(&f, &a, &b);
        assert!(r.len() < 3);
        let back = sub(&f, &mul(&f, &qt, &b), &sub(&f, &[], &r));
        assert_eq!(back, trim(a));
    }

    #[test]
    fn factor_degrees_small_cases() {
        // x^4 + 1 = (x^2+3x+1)(x^2+4x+1) mod 7
        let f = pf(7);
        let mut d = factor_degrees(&f, &poly(&f, &[1, 0, 0, 0, 1])).unwrap();
        d.sort();
        assert_eq!(d, vec![2, 2]);
        // x^2 + 1 irreducible mod 7
        assert_eq!(factor_degrees(&f, &poly(&f, &[1, 0, 1])).unwrap(), vec![2]);
        // (x-1)^2 not squarefree
        assert_eq!(factor_degrees(&f, &poly(&f, &[1, -2, 1])), None);
        // Phi_5 mod 11 splits completely
        let g = pf(11);
        assert_eq!(factor_degrees(&g, &poly(&g, &[1, 1, 1, 1, 1])).unwrap(), vec![1, 1, 1, 1]);
    }

    #[test]
    fn factor_degrees_sum_to_degree() {
        let f = pf(13);
        let p = poly(&f, &[5, 1, 0, 7, 2, 0, 0, 3, 1]);
        if let Some(d) = factor_degrees(&f, &p) {
            assert_eq!(d.iter().sum::<usize>(), 8);
        }
    }

    #[test]
    fn subset_sum_marks() {
        let s = subset_sums(&[18, 76, 222], 316);
        let got: Vec<usize> = (0..=316).filter(|&i| s[i]).collect();
        assert_eq!(got, vec![0, 18, 76, 94, 222, 240, 298, 316]);
    }
}
