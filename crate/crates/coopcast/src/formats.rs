//! Frontier CSV, witness JSON and the audit that ties them back together.

use std::collections::BTreeMap;
use std::io::{Read, Write};

use coopcast_core::degraded::{degraded_rate_point, nocoop_rate_point, DegradedInnerPoint};
use coopcast_core::general::{cutset_polytope, marton_coop_point, marton_witness, CutsetWitness, MartonWitness};
use coopcast_core::{FrontierPoint, Kernel, Pmf, RateFrontier, RatePolytope};
use serde::{Deserialize, Serialize};

use crate::channel_file::ChannelSpecFile;
use crate::error::{CliError, CliResult};

pub const FRONTIER_HEADER: [&str; 4] = ["lambda", "r1", "r2", "witness_id"];

/// Round-trips an `f64` through text: 17 significant digits.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn write_frontier_csv<W: Write>(points: &[FrontierPoint], out: W) -> CliResult<()> {
    let mut w = csv::Writer::from_writer(out);
    let io = |e: csv::Error| CliError::Io {
        path: "stdout".into(),
        source: e.into(),
    };
    w.write_record(FRONTIER_HEADER).map_err(io)?;
    for p in points {
        w.write_record([fmt_f64(p.lambda), fmt_f64(p.r1), fmt_f64(p.r2), p.witness_id.to_string()])
            .map_err(io)?;
    }
    w.flush().map_err(|source| CliError::Io {
        path: "stdout".into(),
        source,
    })
}

pub fn read_frontier_csv<R: Read>(what: &str, input: R) -> CliResult<Vec<FrontierPoint>> {
    let mut r = csv::Reader::from_reader(input);
    let header = r.headers().map_err(|e| CliError::parse(what, e))?.clone();
    if header.iter().ne(FRONTIER_HEADER) {
        return Err(CliError::parse(what, format!("header must be {}", FRONTIER_HEADER.join(","))));
    }
    let mut pts = Vec::new();
    for (i, rec) in r.records().enumerate() {
        let rec = rec.map_err(|e| CliError::parse(what, e))?;
        let num = |k: usize| -> CliResult<f64> {
            rec[k]
                .trim()
                .parse()
                .map_err(|_| CliError::parse(what, format!("row {}: `{}` is not a number", i + 1, &rec[k])))
        };
        let witness_id = rec[3]
            .trim()
            .parse()
            .map_err(|_| CliError::parse(what, format!("row {}: bad witness id `{}`", i + 1, &rec[3])))?;
        pts.push(FrontierPoint {
            lambda: num(0)?,
            r1: num(1)?,
            r2: num(2)?,
            witness_id,
        });
    }
    Ok(pts)
}

/// Marton witness with the joint written as nested `[u][v][x]` arrays.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MartonWire {
    pub p_uvx: Vec<Vec<Vec<f64>>>,
    pub p_uhat_given_y2: Kernel,
    pub p_vhat_given_y1: Kernel,
}

impl From<&MartonWitness> for MartonWire {
    fn from(w: &MartonWitness) -> Self {
        let sizes: Vec<usize> = w.p_uvx.vars().iter().map(|v| v.size()).collect();
        let (cv, nx) = (sizes[1], sizes[2]);
        let p_uvx = w
            .p_uvx
            .probs()
            .chunks(cv * nx)
            .map(|u| u.chunks(nx).map(<[f64]>::to_vec).collect())
            .collect();
        MartonWire {
            p_uvx,
            p_uhat_given_y2: w.p_uhat_given_y2.clone(),
            p_vhat_given_y1: w.p_vhat_given_y1.clone(),
        }
    }
}

impl MartonWire {
    pub fn to_witness(&self) -> CliResult<MartonWitness> {
        let cu = self.p_uvx.len();
        let cv = self.p_uvx.first().map_or(0, Vec::len);
        let nx = self.p_uvx.first().and_then(|v| v.first()).map_or(0, Vec::len);
        let mut flat = Vec::with_capacity(cu * cv * nx);
        for (u, vs) in self.p_uvx.iter().enumerate() {
            for (v, xs) in vs.iter().enumerate() {
                if vs.len() != cv || xs.len() != nx {
                    return Err(CliError::Invariant(coopcast_core::Error::DimensionMismatch(format!(
                        "p_uvx[{u}][{v}] is ragged"
                    ))));
                }
                flat.extend_from_slice(xs);
            }
        }
        Ok(marton_witness(cu, cv, flat, self.p_uhat_given_y2.clone(), self.p_vhat_given_y1.clone())?)
    }
}

/// Degraded witness as stored: the two distributions and the rates they give.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DegradedWire {
    pub p_u: Pmf,
    pub p_x_given_u: Kernel,
    pub r1: f64,
    pub r02: f64,
}

/// Witnesses of one frontier keyed by `witness_id`, together with the
/// channel they were computed for.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum WitnessFile {
    Degraded {
        channel: ChannelSpecFile,
        witnesses: BTreeMap<String, DegradedWire>,
    },
    DegradedNocoop {
        channel: ChannelSpecFile,
        witnesses: BTreeMap<String, DegradedWire>,
    },
    Marton {
        channel: ChannelSpecFile,
        witnesses: BTreeMap<String, MartonWire>,
    },
    MartonCoop {
        channel: ChannelSpecFile,
        witnesses: BTreeMap<String, MartonWire>,
    },
    Cutset {
        channel: ChannelSpecFile,
        witnesses: BTreeMap<String, Pmf>,
    },
}

/// Witness ids are written as JSON object keys.
fn keyed<W, T>(f: &RateFrontier<W>, conv: impl Fn(&W) -> T) -> BTreeMap<String, T> {
    f.witnesses.iter().enumerate().map(|(i, w)| (i.to_string(), conv(w))).collect()
}

impl WitnessFile {
    pub fn degraded(channel: ChannelSpecFile, f: &RateFrontier<DegradedInnerPoint>, coop: bool) -> Self {
        let witnesses = keyed(f, |w| DegradedWire {
            p_u: w.p_u.clone(),
            p_x_given_u: w.p_x_given_u.clone(),
            r1: w.r1,
            r02: w.r02,
        });
        if coop {
            WitnessFile::Degraded { channel, witnesses }
        } else {
            WitnessFile::DegradedNocoop { channel, witnesses }
        }
    }

    pub fn marton(channel: ChannelSpecFile, f: &RateFrontier<MartonWitness>, coop: bool) -> Self {
        let witnesses = keyed(f, |w| MartonWire::from(w));
        if coop {
            WitnessFile::MartonCoop { channel, witnesses }
        } else {
            WitnessFile::Marton { channel, witnesses }
        }
    }

    pub fn cutset(channel: ChannelSpecFile, f: &RateFrontier<CutsetWitness>) -> Self {
        WitnessFile::Cutset {
            channel,
            witnesses: keyed(f, |w| w.p_x.clone()),
        }
    }

    fn channel(&self) -> &ChannelSpecFile {
        match self {
            WitnessFile::Degraded { channel, .. }
            | WitnessFile::DegradedNocoop { channel, .. }
            | WitnessFile::Marton { channel, .. }
            | WitnessFile::MartonCoop { channel, .. }
            | WitnessFile::Cutset { channel, .. } => channel,
        }
    }

    /// Recomputes the rate polytope of witness `id` from its distributions.
    pub fn polytope(&self, id: usize) -> CliResult<RatePolytope> {
        let ch = self.channel().to_channel()?;
        let key = id.to_string();
        let missing = || CliError::Audit(format!("no witness with id {id}"));
        Ok(match self {
            WitnessFile::Degraded { witnesses, .. } => {
                let w = witnesses.get(&key).ok_or_else(missing)?;
                let (r1, r02) = degraded_rate_point(&w.p_u, &w.p_x_given_u, &ch)?;
                RatePolytope::rectangle(r1, r02)
            }
            WitnessFile::DegradedNocoop { witnesses, .. } => {
                let w = witnesses.get(&key).ok_or_else(missing)?;
                let (r1, r02) = nocoop_rate_point(&w.p_u, &w.p_x_given_u, &ch)?;
                RatePolytope::rectangle(r1, r02)
            }
            WitnessFile::Marton { witnesses, .. } | WitnessFile::MartonCoop { witnesses, .. } => {
                let w = witnesses.get(&key).ok_or_else(missing)?.to_witness()?;
                marton_coop_point(&w, &ch)?.polytope()
            }
            WitnessFile::Cutset { witnesses, .. } => {
                let p = witnesses.get(&key).ok_or_else(missing)?;
                if p.len() != ch.x_size() {
                    return Err(CliError::Invariant(coopcast_core::Error::DimensionMismatch(format!(
                        "witness {id} has {} inputs, channel has {}",
                        p.len(),
                        ch.x_size()
                    ))));
                }
                cutset_polytope(p.probs(), &ch)
            }
        })
    }
}

/// Result of re-evaluating every frontier row.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AuditReport {
    pub rows: usize,
    pub max_deviation: f64,
    pub worst_row: Option<usize>,
    pub tol: f64,
    pub ok: bool,
}

/// Checks each row against the supporting vertex of its witness polytope.
pub fn audit(points: &[FrontierPoint], witnesses: &WitnessFile, tol: f64) -> CliResult<AuditReport> {
    let mut max_dev: f64 = 0.0;
    let mut worst = None;
    let mut cache: BTreeMap<usize, RatePolytope> = BTreeMap::new();
    for (i, p) in points.iter().enumerate() {
        let poly = match cache.get(&p.witness_id) {
            Some(q) => *q,
            None => {
                let q = witnesses.polytope(p.witness_id)?;
                cache.insert(p.witness_id, q);
                q
            }
        };
        let dev = match poly.support(p.lambda) {
            Some((r1, r2, _)) => (r1 - p.r1).abs().max((r2 - p.r2).abs()),
            None => f64::INFINITY,
        };
        if dev > max_dev || worst.is_none() {
            max_dev = max_dev.max(dev);
            worst = Some(i);
        }
    }
    Ok(AuditReport {
        rows: points.len(),
        max_deviation: max_dev,
        worst_row: worst,
        tol,
        ok: max_dev <= tol,
    })
}
