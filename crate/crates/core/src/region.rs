//! Smallness regions: the sets of residues that the evaluated (half-)trace of
//! a small error lands in with high probability.
//!
//! Three constructions are provided:
//!
//! * [`SmallnessRegion::interval`] for `rho = 1`: all integers in
//!   `[-2 sqrt(N*) sigma, 2 sqrt(N*) sigma]`.
//! * [`SmallnessRegion::quadratic`] for general `rho` with `r = ord(-rho)`:
//!   all sums `sum_k (-rho)^k eps_k` with each `eps_k` in its slot interval.
//! * [`SmallnessRegion::elos`] for a root `alpha` of `f` in `F_q`:
//!   all sums `sum_j eps_j alpha^j`.
//!
//! The first two are in half-trace units, i.e. they describe
//! `1/2 Tr(e(alpha))`, which is exactly the quantity the zero-trace attack
//! tests. Members are stored as canonical residues with a bitmap for O(1)
//! membership.

use std::fmt;
use std::io::{BufRead, Write};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{FieldElement, FieldParams, PrimeField};

/// Default cap on the Cartesian product size of a lookup table.
pub const DEFAULT_TABLE_CAP: u64 = 1 << 24;

const CACHE_MAGIC: &str = "PLWE-SIGMA v1";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum RegionMode {
    Interval,
    TableQuadratic,
    TableElos,
}

impl RegionMode {
    pub fn as_str(self) -> &'static str {
        match self {
            RegionMode::Interval => "INTERVAL",
            RegionMode::TableQuadratic => "TABLE_QUADRATIC",
            RegionMode::TableElos => "TABLE_ELOS",
        }
    }
}

impl fmt::Display for RegionMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for RegionMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "INTERVAL" => Ok(RegionMode::Interval),
            "TABLE_QUADRATIC" => Ok(RegionMode::TableQuadratic),
            "TABLE_ELOS" => Ok(RegionMode::TableElos),
            other => Err(Error::InvalidParameter(format!("unknown region mode {other:?}"))),
        }
    }
}

/// `floor(2 sqrt(m) sigma)`, the half-width of the integer interval for a sum
/// of `m` error coefficients.
pub fn slot_half_width(m: f64, sigma: f64) -> i64 {
    (2.0 * m.sqrt() * sigma).floor() as i64
}

/// Number of even-index error coefficients `e_{2(ir+k)}` (with
/// `2(ir+k) <= N-1`) feeding each slot `k` of the quadratic table.
pub fn quadratic_slot_counts(n: usize, r: u64) -> Vec<usize> {
    let terms = (n - 1) / 2 + 1;
    (0..r as usize)
        .map(|k| if k < terms { (terms - k).div_ceil(r as usize) } else { 0 })
        .collect()
}

/// `(4 sqrt(floor(N*/r)) sigma + 1)^r`.
pub fn quadratic_analytic_bound(n: usize, sigma: f64, r: u64) -> f64 {
    let n_star = (n - 1) / 2;
    let per_slot = (n_star as u64 / r) as f64;
    (4.0 * per_slot.sqrt() * sigma + 1.0).powi(r as i32)
}

/// `4 sqrt(N*) sigma + 1`.
pub fn interval_analytic_bound(n: usize, sigma: f64) -> f64 {
    4.0 * (((n - 1) / 2) as f64).sqrt() * sigma + 1.0
}

/// `(4 sqrt(N/r) sigma + 1)^r`.
pub fn elos_analytic_bound(n: usize, sigma: f64, r: u64) -> f64 {
    (4.0 * (n as f64 / r as f64).sqrt() * sigma + 1.0).powi(r as i32)
}

#[derive(Clone, Debug, PartialEq)]
pub struct SmallnessRegion {
    q: u64,
    mode: RegionMode,
    members: Vec<FieldElement>,
    bitmap: Vec<u64>,
    analytic_bound: Option<f64>,
    root: Option<FieldElement>,
}

impl SmallnessRegion {
    /// Assembles a region from arbitrary residues (deduplicated), failing if
    /// it would cover all of `F_q`.
    pub fn from_members(
        q: u64,
        mode: RegionMode,
        members: impl IntoIterator<Item = u64>,
    ) -> Result<Self> {
        let mut bitmap = vec![0u64; (q as usize).div_ceil(64)];
        for m in members {
            let m = (m % q) as usize;
            bitmap[m / 64] |= 1 << (m % 64);
        }
        Self::from_bitmap(q, mode, bitmap, None, None)
    }

    fn from_bitmap(
        q: u64,
        mode: RegionMode,
        bitmap: Vec<u64>,
        analytic_bound: Option<f64>,
        root: Option<FieldElement>,
    ) -> Result<Self> {
        let field = PrimeField::new(q)?;
        let members: Vec<FieldElement> = (0..q)
            .filter(|&v| bitmap[(v / 64) as usize] >> (v % 64) & 1 == 1)
            .map(|v| field.elem(v))
            .collect();
        let size = members.len() as u64;
        if size >= q {
            return Err(Error::RegionCoversField { size, q });
        }
        Ok(Self { q, mode, members, bitmap, analytic_bound, root })
    }

    /// Interval region `Z cap [-B, B]` with `B = floor(2 sqrt(N*) sigma)`,
    /// for `rho = 1`.
    pub fn interval(q: u64, n: usize, sigma: f64) -> Result<Self> {
        let field = PrimeField::new(q)?;
        check_degree(n)?;
        let half = slot_half_width(((n - 1) / 2) as f64, sigma);
        if 2 * half as u128 + 1 >= q as u128 {
            return Err(Error::RegionCoversField { size: (2 * half as u64 + 1).min(q), q });
        }
        let mut bitmap = vec![0u64; (q as usize).div_ceil(64)];
        for t in -half..=half {
            let v = field.from_i64(t).value() as usize;
            bitmap[v / 64] |= 1 << (v % 64);
        }
        Self::from_bitmap(q, RegionMode::Interval, bitmap, Some(interval_analytic_bound(n, sigma)), None)
    }

    /// Lookup table of `sum_{k<r} (-rho)^k eps_k` with `eps_k` ranging over
    /// `Z cap [-2 sqrt(m_k) sigma, 2 sqrt(m_k) sigma]`, `m_k` counting the
    /// error coefficients feeding slot `k` and `r = ord(-rho)`.
    pub fn quadratic(params: &FieldParams, n: usize, sigma: f64, cap: u64) -> Result<Self> {
        check_degree(n)?;
        let field = *params.field();
        let r = params.order_of_neg_rho();
        let counts = quadratic_slot_counts(n, r);
        let widths: Vec<i64> = counts.iter().map(|&m| slot_half_width(m as f64, sigma)).collect();
        check_cap(&widths, cap)?;
        let mut weights = Vec::with_capacity(widths.len());
        let mut w = FieldElement::ONE;
        for _ in 0..widths.len() {
            weights.push(w);
            w = field.mul(w, params.neg_rho());
        }
        let bitmap = sumset(&field, &weights, &widths);
        Self::from_bitmap(
            field.modulus(),
            RegionMode::TableQuadratic,
            bitmap,
            Some(quadratic_analytic_bound(n, sigma, r)),
            None,
        )
    }

    /// Lookup table of `sum_{j<r} eps_j alpha^j` with every `eps_j` in
    /// `Z cap [-2 sqrt(N/r) sigma, 2 sqrt(N/r) sigma]`, `r = ord(alpha)`.
    pub fn elos(q: u64, n: usize, sigma: f64, alpha: FieldElement, cap: u64) -> Result<Self> {
        let field = PrimeField::new(q)?;
        check_degree(n)?;
        let alpha = field.elem(alpha.value());
        let r = field.mult_order(alpha)?;
        let half = slot_half_width(n as f64 / r as f64, sigma);
        let widths = vec![half; r as usize];
        check_cap(&widths, cap)?;
        let weights: Vec<FieldElement> = (0..r).map(|j| field.pow(alpha, j)).collect();
        let bitmap = sumset(&field, &weights, &widths);
        Self::from_bitmap(q, RegionMode::TableElos, bitmap, Some(elos_analytic_bound(n, sigma, r)), Some(alpha))
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn mode(&self) -> RegionMode {
        self.mode
    }

    pub fn members(&self) -> &[FieldElement] {
        &self.members
    }

    pub fn exact_size(&self) -> u64 {
        self.members.len() as u64
    }

    pub fn analytic_bound(&self) -> Option<f64> {
        self.analytic_bound
    }

    /// The root the table was built for (ELOS tables only).
    pub fn root(&self) -> Option<FieldElement> {
        self.root
    }

    #[inline]
    pub fn contains(&self, v: FieldElement) -> bool {
        let v = v.value();
        v < self.q && self.bitmap[(v / 64) as usize] >> (v % 64) & 1 == 1
    }

    /// Members doubled, i.e. the region expressed as values of the full
    /// trace `Tr(e(alpha))` instead of the half-trace.
    pub fn trace_values(&self) -> Vec<FieldElement> {
        let field = PrimeField::new(self.q).expect("validated on construction");
        let mut out: Vec<FieldElement> = self.members.iter().map(|&m| field.add(m, m)).collect();
        out.sort();
        out
    }

    /// Writes the cache file: one header line, then ascending residues.
    pub fn write_cache<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "{CACHE_MAGIC} q={} mode={} size={}", self.q, self.mode, self.members.len())?;
        for m in &self.members {
            writeln!(w, "{m}")?;
        }
        Ok(())
    }

    /// Reads a cache file written by [`SmallnessRegion::write_cache`]. The
    /// analytic bound is not stored and comes back as `None`.
    pub fn read_cache<R: BufRead>(r: R) -> Result<Self> {
        let mut lines = r.lines();
        let header = lines.next().ok_or_else(|| cache_err(1, "missing header"))??;
        let rest = header
            .strip_prefix(CACHE_MAGIC)
            .ok_or_else(|| cache_err(1, "bad magic"))?;
        let (mut q, mut mode, mut size) = (None, None, None);
        for field in rest.split_whitespace() {
            let (key, value) = field.split_once('=').ok_or_else(|| cache_err(1, field))?;
            match key {
                "q" => q = Some(value.parse::<u64>().map_err(|e| cache_err(1, &e.to_string()))?),
                "mode" => mode = Some(value.parse::<RegionMode>()?),
                "size" => size = Some(value.parse::<usize>().map_err(|e| cache_err(1, &e.to_string()))?),
                _ => return Err(cache_err(1, &format!("unknown key {key}"))),
            }
        }
        let (q, mode, size) = match (q, mode, size) {
            (Some(q), Some(m), Some(s)) => (q, m, s),
            _ => return Err(cache_err(1, "header needs q, mode and size")),
        };
        let mut members = Vec::with_capacity(size);
        let mut prev: Option<u64> = None;
        for (i, line) in lines.enumerate() {
            let line = line?;
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let v: u64 = line.parse().map_err(|e: std::num::ParseIntError| cache_err(i + 2, &e.to_string()))?;
            if v >= q || prev.is_some_and(|p| p >= v) {
                return Err(cache_err(i + 2, "residues must be ascending and below q"));
            }
            prev = Some(v);
            members.push(v);
        }
        if members.len() != size {
            return Err(cache_err(0, &format!("header says {size} members, found {}", members.len())));
        }
        Self::from_members(q, mode, members)
    }
}

fn cache_err(line: usize, msg: &str) -> Error {
    Error::Format { context: format!("region cache line {line}"), message: msg.to_string() }
}

fn check_degree(n: usize) -> Result<()> {
    if n < 2 {
        return Err(Error::DegreeTooSmall(n, 2));
    }
    Ok(())
}

fn check_cap(widths: &[i64], cap: u64) -> Result<()> {
    let estimated = widths
        .iter()
        .fold(1u128, |acc, &b| acc.saturating_mul(2 * b as u128 + 1));
    if estimated > cap as u128 {
        return Err(Error::TableTooLarge { estimated, cap });
    }
    Ok(())
}

/// Bitmap of `{ sum_k w_k eps_k : |eps_k| <= b_k }` in `F_q`, built slot by
/// slot so that duplicate sums collapse as they appear.
fn sumset(field: &PrimeField, weights: &[FieldElement], widths: &[i64]) -> Vec<u64> {
    let q = field.modulus();
    let words = (q as usize).div_ceil(64);
    let mut cur = vec![0u64; words];
    cur[0] = 1;
    for (&w, &b) in weights.iter().zip(widths) {
        if b == 0 {
            continue;
        }
        let shifts: Vec<u64> = (-b..=b).map(|e| field.mul(field.from_i64(e), w).value()).collect();
        let mut next = vec![0u64; words];
        for v in 0..q {
            if cur[(v / 64) as usize] >> (v % 64) & 1 == 0 {
                continue;
            }
            for &s in &shifts {
                let t = (v + s) % q;
                next[(t / 64) as usize] |= 1 << (t % 64);
            }
        }
        cur = next;
    }
    cur
}
