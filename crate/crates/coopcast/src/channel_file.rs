//! Channel specification files and the `builtin:` generators.

use std::fs;

use coopcast_core::BroadcastChannel;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

/// On-disk channel: `transition[x][y1][y2] = p(y1, y2 | x)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelSpecFile {
    pub x_size: usize,
    pub y1_size: usize,
    pub y2_size: usize,
    pub transition: Vec<Vec<Vec<f64>>>,
    #[serde(default)]
    pub c12: f64,
    #[serde(default)]
    pub c21: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
}

impl ChannelSpecFile {
    pub fn from_channel(ch: &BroadcastChannel, name: Option<String>) -> Self {
        let (n1, n2) = (ch.y1_size(), ch.y2_size());
        let transition = ch
            .transition()
            .chunks(n1 * n2)
            .map(|s| s.chunks(n2).map(<[f64]>::to_vec).collect())
            .collect();
        ChannelSpecFile {
            x_size: ch.x_size(),
            y1_size: n1,
            y2_size: n2,
            transition,
            c12: ch.c12(),
            c21: ch.c21(),
            name,
        }
    }

    /// Validates the declared sizes against the tensor and builds the channel.
    pub fn to_channel(&self) -> CliResult<BroadcastChannel> {
        let bad = |m: String| CliError::Invariant(coopcast_core::Error::DimensionMismatch(m));
        if self.transition.len() != self.x_size {
            return Err(bad(format!(
                "transition has {} input slices, x_size is {}",
                self.transition.len(),
                self.x_size
            )));
        }
        for (x, s) in self.transition.iter().enumerate() {
            if s.len() != self.y1_size {
                return Err(bad(format!("transition[{x}] has {} rows, y1_size is {}", s.len(), self.y1_size)));
            }
            for (a, r) in s.iter().enumerate() {
                if r.len() != self.y2_size {
                    return Err(bad(format!(
                        "transition[{x}][{a}] has {} entries, y2_size is {}",
                        r.len(),
                        self.y2_size
                    )));
                }
            }
        }
        BroadcastChannel::from_nested(&self.transition, self.c12, self.c21).map_err(CliError::Invariant)
    }
}

/// Parametric families addressed as `builtin:<family>?k=v&...`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Builtin {
    /// Degraded cascade `Y1 = X ⊕ N1`, `Y2 = Y1 ⊕ N2`.
    Bsbc { p1: f64, p2: f64 },
    /// Two independent BSCs with the same crossover.
    Bsbc2 { p: f64 },
}

#[derive(Clone, Debug, PartialEq)]
pub struct LoadedChannel {
    pub channel: BroadcastChannel,
    pub builtin: Option<Builtin>,
    pub name: Option<String>,
}

fn parse_query(spec: &str, query: &str) -> CliResult<Vec<(String, f64)>> {
    let mut out = Vec::new();
    for pair in query.split('&').filter(|s| !s.is_empty()) {
        let (k, v) = pair
            .split_once('=')
            .ok_or_else(|| CliError::parse(spec, format!("`{pair}` is not key=value")))?;
        let v: f64 = v
            .parse()
            .map_err(|_| CliError::parse(spec, format!("`{v}` is not a number")))?;
        out.push((k.to_string(), v));
    }
    Ok(out)
}

fn builtin(spec: &str, rest: &str) -> CliResult<LoadedChannel> {
    let (family, query) = rest.split_once('?').unwrap_or((rest, ""));
    let params = parse_query(spec, query)?;
    let get = |key: &str, default: Option<f64>| -> CliResult<f64> {
        params
            .iter()
            .rev()
            .find(|(k, _)| k == key)
            .map(|(_, v)| *v)
            .or(default)
            .ok_or_else(|| CliError::parse(spec, format!("missing parameter `{key}`")))
    };
    let allowed: &[&str] = match family {
        "bsbc" => &["p1", "p2", "c12", "c21"],
        "bsbc2" => &["p", "c12", "c21"],
        _ => return Err(CliError::parse(spec, format!("unknown builtin family `{family}`"))),
    };
    if let Some((k, _)) = params.iter().find(|(k, _)| !allowed.contains(&k.as_str())) {
        return Err(CliError::parse(spec, format!("unknown parameter `{k}`")));
    }
    let (c12, c21) = (get("c12", Some(0.0))?, get("c21", Some(0.0))?);
    let (ch, b) = match family {
        "bsbc" => {
            let (p1, p2) = (get("p1", None)?, get("p2", None)?);
            (BroadcastChannel::bsbc_cascade(p1, p2), Builtin::Bsbc { p1, p2 })
        }
        _ => {
            let p = get("p", None)?;
            (BroadcastChannel::bsbc_pair(p), Builtin::Bsbc2 { p })
        }
    };
    let channel = ch.and_then(|c| c.with_links(c12, c21)).map_err(CliError::Invariant)?;
    Ok(LoadedChannel {
        channel,
        builtin: Some(b),
        name: Some(spec.to_string()),
    })
}

/// Parses a channel from JSON text.
pub fn parse_channel(what: &str, text: &str) -> CliResult<LoadedChannel> {
    let spec: ChannelSpecFile = serde_json::from_str(text).map_err(|e| CliError::parse(what, e))?;
    Ok(LoadedChannel {
        channel: spec.to_channel()?,
        builtin: None,
        name: spec.name,
    })
}

/// Loads a channel file, or a generator when `path` starts with `builtin:`.
pub fn load_channel(path: &str) -> CliResult<LoadedChannel> {
    if let Some(rest) = path.strip_prefix("builtin:") {
        return builtin(path, rest);
    }
    let text = fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_string(),
        source,
    })?;
    parse_channel(path, &text)
}
