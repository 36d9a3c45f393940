//! On-disk formats: parameter files (JSON) and sample files (JSON lines).
//! Residues and coefficients travel as decimal strings so that 64-bit
//! values survive any JSON reader.

use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::forge::ParameterSet;
use crate::ring::{ModulusPoly, Ring, RingElement};
use crate::sampler::Sample;

/// `{q, rho, sigma, N, f}` with `f` in ascending degree.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamsFile {
    pub q: u64,
    pub rho: u64,
    pub sigma: f64,
    #[serde(rename = "N")]
    pub n: usize,
    pub f: Vec<String>,
}

impl ParamsFile {
    pub fn from_set(ps: &ParameterSet) -> Self {
        Self {
            q: ps.q(),
            rho: ps.rho(),
            sigma: ps.sigma,
            n: ps.degree(),
            f: ps.f.coeffs().iter().map(|c| c.to_string()).collect(),
        }
    }

    pub fn modulus(&self) -> Result<ModulusPoly> {
        if self.f.len() != self.n + 1 {
            return Err(format_err("params.f", format!("expected {} coefficients for N = {}, got {}", self.n + 1, self.n, self.f.len())));
        }
        let coeffs = self
            .f
            .iter()
            .enumerate()
            .map(|(i, s)| s.trim().parse::<i64>().map_err(|e| format_err(&format!("params.f[{i}]"), format!("{s:?}: {e}"))))
            .collect::<Result<Vec<_>>>()?;
        ModulusPoly::new(coeffs)
    }

    pub fn to_set(&self) -> Result<ParameterSet> {
        ParameterSet::new(self.q, self.rho, self.modulus()?, self.sigma)
    }

    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| format_err("params", e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("params serialize")
    }
}

pub fn read_params(text: &str) -> Result<ParameterSet> {
    ParamsFile::parse(text)?.to_set()
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SampleLine {
    a: Vec<String>,
    b: Vec<String>,
}

/// One `{a, b}` object per line.
pub fn write_samples<W: Write>(mut w: W, samples: &[Sample]) -> Result<()> {
    for s in samples {
        let line = SampleLine {
            a: s.a.coeffs().iter().map(|c| c.to_string()).collect(),
            b: s.b.coeffs().iter().map(|c| c.to_string()).collect(),
        };
        writeln!(w, "{}", serde_json::to_string(&line).expect("sample serializes"))?;
    }
    Ok(())
}

/// Reads a sample file, checking every residue against the ring. Blank
/// lines are skipped; errors name the offending line and field.
pub fn read_samples<R: BufRead>(r: R, ring: &Ring) -> Result<Vec<Sample>> {
    let mut out = Vec::new();
    for (i, line) in r.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let ctx = format!("samples line {}", i + 1);
        let parsed: SampleLine = serde_json::from_str(&line).map_err(|e| format_err(&ctx, e.to_string()))?;
        let a = parse_element(ring, &parsed.a, &format!("{ctx}, field a"))?;
        let b = parse_element(ring, &parsed.b, &format!("{ctx}, field b"))?;
        out.push(Sample::new(a, b));
    }
    Ok(out)
}

fn parse_element(ring: &Ring, coeffs: &[String], ctx: &str) -> Result<RingElement> {
    if coeffs.len() != ring.degree() {
        return Err(format_err(ctx, format!("expected {} residues, got {}", ring.degree(), coeffs.len())));
    }
    let values = coeffs
        .iter()
        .enumerate()
        .map(|(j, s)| {
            let v: u64 = s.trim().parse().map_err(|e| format_err(ctx, format!("entry {j} {s:?}: {e}")))?;
            if v >= ring.q() {
                return Err(format_err(ctx, format!("entry {j} = {v} is not below q = {}", ring.q())));
            }
            Ok(ring.field().elem(v))
        })
        .collect::<Result<Vec<_>>>()?;
    ring.element(values)
}

pub(crate) fn format_err(context: &str, message: String) -> Error {
    Error::Format { context: context.to_string(), message }
}
