//! CSV and JSON artifacts.
//!
//! Floats are written with Rust's shortest round-trip formatting, so reading a
//! file back reproduces the in-memory value bit for bit.

use std::io::{Read, Write};
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::exact::{TraceKind, TraceSeries};
use crate::resolvent::{ResolventKind, ResolventScan};
use crate::roots::{RootPairing, RootSet};
use crate::specdet::{CharPolynomial, PolyMode};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceRow {
    pub l: usize,
    pub re: f64,
    pub im: f64,
    pub kind: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResolventRow {
    pub theta: f64,
    pub re: f64,
    pub im: f64,
    pub abs: f64,
    pub kind: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RootRow {
    pub index: usize,
    pub re: f64,
    pub im: f64,
    pub abs: f64,
    pub arg: f64,
    pub residual: f64,
    pub on_circle: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairRow {
    pub computed_index: usize,
    pub exact_index: usize,
    pub distance: f64,
}

/// JSON form of a [`CharPolynomial`]. `det` is `null` when no determinant was used.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolyJson {
    pub n: usize,
    pub mode: PolyMode,
    pub det: Option<[f64; 2]>,
    pub coeffs: Vec<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tails: Option<Vec<[f64; 2]>>,
}

fn pair(z: Complex64) -> [f64; 2] {
    [z.re, z.im]
}

fn unpair(p: [f64; 2]) -> Complex64 {
    Complex64::new(p[0], p[1])
}

fn write_rows<W: Write, T: Serialize>(w: W, rows: impl IntoIterator<Item = T>) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    for row in rows {
        out.serialize(row)?;
    }
    out.flush()?;
    Ok(())
}

fn read_rows<R: Read, T: for<'de> Deserialize<'de>>(r: R) -> Result<Vec<T>> {
    csv::Reader::from_reader(r).deserialize().map(|row| row.map_err(Error::from)).collect()
}

pub fn trace_rows(series: &TraceSeries) -> impl Iterator<Item = TraceRow> + '_ {
    series.values.iter().enumerate().map(|(l, z)| TraceRow {
        l,
        re: z.re,
        im: z.im,
        kind: series.kind.as_str().to_string(),
    })
}

/// Several series in one file, one block per series.
pub fn write_traces<W: Write>(w: W, series: &[&TraceSeries]) -> Result<()> {
    write_rows(w, series.iter().flat_map(|s| trace_rows(s)))
}

/// Reads a trace file back into one series per kind, in order of appearance.
pub fn read_traces<R: Read>(r: R) -> Result<Vec<TraceSeries>> {
    let rows: Vec<TraceRow> = read_rows(r)?;
    let mut out: Vec<TraceSeries> = Vec::new();
    for row in rows {
        let kind: TraceKind = row.kind.parse()?;
        let idx = match out.iter().position(|s| s.kind == kind) {
            Some(i) => i,
            None => {
                out.push(TraceSeries::new(Vec::new(), kind, ""));
                out.len() - 1
            }
        };
        let s = &mut out[idx];
        if row.l != s.values.len() {
            return Err(Error::Config(format!("trace file: {} row l = {} out of order", row.kind, row.l)));
        }
        s.values.push(Complex64::new(row.re, row.im));
    }
    Ok(out)
}

pub fn write_resolvent<W: Write>(w: W, scans: &[&ResolventScan]) -> Result<()> {
    write_rows(
        w,
        scans.iter().flat_map(|s| {
            s.theta.iter().zip(&s.values).map(|(&theta, z)| ResolventRow {
                theta,
                re: z.re,
                im: z.im,
                abs: z.norm(),
                kind: s.kind.as_str().to_string(),
            })
        }),
    )
}

pub fn read_resolvent<R: Read>(r: R) -> Result<Vec<ResolventRow>> {
    read_rows(r)
}

pub fn resolvent_kind(name: &str) -> Result<ResolventKind> {
    [ResolventKind::Exact, ResolventKind::TruncatedFourier, ResolventKind::Semiclassical]
        .into_iter()
        .find(|k| k.as_str() == name)
        .ok_or_else(|| Error::Config(format!("unknown resolvent kind `{name}`")))
}

pub fn write_roots<W: Write>(w: W, rs: &RootSet) -> Result<()> {
    write_rows(
        w,
        rs.roots.iter().enumerate().map(|(index, z)| RootRow {
            index,
            re: z.re,
            im: z.im,
            abs: z.norm(),
            arg: z.arg(),
            residual: rs.residuals[index],
            on_circle: rs.on_circle[index],
        }),
    )
}

pub fn read_roots<R: Read>(r: R) -> Result<Vec<RootRow>> {
    read_rows(r)
}

pub fn write_pairing<W: Write>(w: W, p: &RootPairing) -> Result<()> {
    write_rows(
        w,
        p.pairs.iter().map(|&(computed_index, exact_index, distance)| PairRow {
            computed_index,
            exact_index,
            distance,
        }),
    )
}

pub fn read_pairing<R: Read>(r: R) -> Result<Vec<PairRow>> {
    read_rows(r)
}

impl From<&CharPolynomial> for PolyJson {
    fn from(p: &CharPolynomial) -> Self {
        PolyJson {
            n: p.degree(),
            mode: p.mode,
            det: p.det_used.map(pair),
            coeffs: p.coeffs.iter().copied().map(pair).collect(),
            tails: p.tails.as_ref().map(|t| t.iter().copied().map(pair).collect()),
        }
    }
}

impl TryFrom<PolyJson> for CharPolynomial {
    type Error = Error;

    fn try_from(j: PolyJson) -> Result<Self> {
        if j.coeffs.len() != j.n + 1 || j.tails.as_ref().is_some_and(|t| t.len() != j.n + 1) {
            return Err(Error::Config(format!("polynomial JSON: n = {} but {} coefficients", j.n, j.coeffs.len())));
        }
        Ok(CharPolynomial {
            coeffs: j.coeffs.into_iter().map(unpair).collect(),
            tails: j.tails.map(|t| t.into_iter().map(unpair).collect()),
            det_used: j.det.map(unpair),
            mode: j.mode,
        })
    }
}

pub fn write_poly<W: Write>(mut w: W, p: &CharPolynomial) -> Result<()> {
    serde_json::to_writer_pretty(&mut w, &PolyJson::from(p))?;
    writeln!(w)?;
    Ok(())
}

pub fn read_poly<R: Read>(r: R) -> Result<CharPolynomial> {
    serde_json::from_reader::<_, PolyJson>(r)?.try_into()
}

pub fn create(path: &Path) -> Result<std::io::BufWriter<std::fs::File>> {
    let f = std::fs::File::create(path).map_err(|e| Error::from(e).context(format!("create {}", path.display())))?;
    Ok(std::io::BufWriter::new(f))
}

pub fn open(path: &Path) -> Result<std::io::BufReader<std::fs::File>> {
    let f = std::fs::File::open(path).map_err(|e| Error::from(e).context(format!("open {}", path.display())))?;
    Ok(std::io::BufReader::new(f))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specdet::PolyMode;

    #[test]
    fn traces_round_trip_bit_for_bit() {
        let a = TraceSeries::new(
            vec![Complex64::new(3.0, 0.0), Complex64::new(0.1 + 0.2, -1e-300), Complex64::new(-2.5e17, 1.0 / 3.0)],
            TraceKind::Exact,
            "x",
        );
        let b = TraceSeries::new(vec![Complex64::new(1.0, 2.0)], TraceKind::Semiclassical, "x");
        let mut buf = Vec::new();
        write_traces(&mut buf, &[&a, &b]).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("l,re,im,kind\n"));
        let back = read_traces(buf.as_slice()).unwrap();
        assert_eq!(back.len(), 2);
        assert_eq!(back[0].values, a.values);
        assert_eq!(back[1].kind, TraceKind::Semiclassical);
    }

    #[test]
    fn roots_and_pairing_headers() {
        let rs = RootSet::from_exact(vec![Complex64::new(0.0, 1.0), Complex64::new(-1.0, 0.0)]);
        let mut buf = Vec::new();
        write_roots(&mut buf, &rs).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("index,re,im,abs,arg,residual,on_circle\n"));
        let rows = read_roots(text.as_bytes()).unwrap();
        assert_eq!(rows[1].arg, std::f64::consts::PI);
        assert!(rows.iter().all(|r| r.on_circle));

        let p = RootPairing { pairs: vec![(0, 1, 0.5)], unmatched: vec![], optimality_gap: None };
        let mut buf = Vec::new();
        write_pairing(&mut buf, &p).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "computed_index,exact_index,distance\n0,1,0.5\n");
    }

    #[test]
    fn polynomial_json_round_trips() {
        let mut p = CharPolynomial::new(vec![Complex64::new(1.0, 0.0), Complex64::new(0.25, -0.5)], PolyMode::BottomUp);
        p.det_used = Some(Complex64::new(0.6, 0.8));
        let mut buf = Vec::new();
        write_poly(&mut buf, &p).unwrap();
        let v: serde_json::Value = serde_json::from_slice(&buf).unwrap();
        assert_eq!(v["n"], 1);
        assert_eq!(v["mode"], "bottom-up");
        assert_eq!(v["det"][1], 0.8);
        assert!(v.get("tails").is_none());
        assert_eq!(read_poly(buf.as_slice()).unwrap(), p);
        assert!(read_poly(&br#"{"n":3,"mode":"raw","det":null,"coeffs":[[1,0]]}"#[..]).is_err());
    }
}
