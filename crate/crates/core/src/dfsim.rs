//! Monte Carlo simulation of decode-and-forward over the degraded channel.
//!
//! Superposition codebooks `u(w2|s)`, `x(w1,w2|s)` are drawn i.i.d. for each
//! of the `M_R = ⌈2^{n C12}⌉` link messages `s`, and the messages of
//! receiver 2 are binned uniformly into `M_R` bins. Over `B` blocks the
//! transmitter sends `x(w1_i, w2_i | s_i)` with `s_i` the bin of `w2_{i-1}`.
//! Receiver 1 decodes `(w1_i, w2_i)` under its own estimate of `s_i` and
//! forwards the bin of its estimate of `w2_i` during block `i + 1`.
//! Receiver 2 then decodes `w2_i` from `y2(i)` restricted to that bin.
//! Messages are carried in blocks `1..B-1`; block `B` only completes the
//! relay of `w2_{B-1}`. Errors propagate across blocks as they would in a
//! real receiver.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::degraded::DEGRADED_TOL;
use crate::error::{Error, Result};
use crate::optim::{stream_rng, tags, Executor};
use crate::prob::{BroadcastChannel, Dense, Kernel, Pmf};

/// Default limit on stored codewords.
pub const DEFAULT_MEMORY_CAP: usize = 1 << 20;

/// Random code for one blocklength.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DfCode {
    pub n: usize,
    /// Nominal rates.
    pub r1: f64,
    pub r2: f64,
    pub c12: f64,
    /// Codebook sizes `⌈2^{n r1}⌉`, `⌈2^{n r2}⌉` and bin count `⌈2^{n c12}⌉`.
    pub m1: usize,
    pub m2: usize,
    pub m_r: usize,
    pub p_u: Pmf,
    pub p_x_given_u: Kernel,
    /// `u(w2|s)` as `[s][w2][t]`.
    pub u_book: Vec<u16>,
    /// `x(w1,w2|s)` as `[s][w2][w1][t]`.
    pub x_book: Vec<u16>,
    /// Bin of every `w2`.
    pub bins: Vec<u32>,
    pub warnings: Vec<String>,
}

impl DfCode {
    /// Rates `log2(size) / n` actually used.
    pub fn realized_rates(&self) -> (f64, f64, f64) {
        let r = |m: usize| {
            if self.n == 0 {
                0.0
            } else {
                libm::log2(m as f64) / self.n as f64
            }
        };
        (r(self.m1), r(self.m2), r(self.m_r))
    }

    fn u_word(&self, s: usize, w2: usize) -> &[u16] {
        let o = (s * self.m2 + w2) * self.n;
        &self.u_book[o..o + self.n]
    }

    fn x_word(&self, s: usize, w2: usize, w1: usize) -> &[u16] {
        let o = ((s * self.m2 + w2) * self.m1 + w1) * self.n;
        &self.x_book[o..o + self.n]
    }
}

fn book_size(n: usize, rate: f64, what: &str, warnings: &mut Vec<String>) -> Result<usize> {
    if !(rate >= 0.0) || !rate.is_finite() {
        return Err(Error::InvalidConfig(alloc::format!("{what} must be a finite nonnegative rate")));
    }
    let exact = libm::exp2(n as f64 * rate);
    if exact > u32::MAX as f64 {
        return Err(Error::MemoryCap {
            needed: exact as u128,
            cap: u32::MAX as usize,
        });
    }
    let rounded = libm::round(exact);
    if (exact - rounded).abs() > 1e-9 * exact.max(1.0) {
        let m = libm::ceil(exact) as usize;
        warnings.push(alloc::format!(
            "2^(n {what}) = {exact:.6} is not an integer at n = {n}; using {m}"
        ));
        Ok(m)
    } else {
        Ok(rounded as usize)
    }
}

fn draw<R: Rng>(cdf: &[f64], rng: &mut R) -> usize {
    let u: f64 = rng.gen();
    cdf.iter().position(|&c| u < c).unwrap_or(cdf.len() - 1)
}

fn cdf(p: &[f64]) -> Vec<f64> {
    let mut acc = 0.0;
    p.iter()
        .map(|&x| {
            acc += x;
            acc
        })
        .collect()
}

/// Draws the codebooks and the binning.
#[allow(clippy::too_many_arguments)]
pub fn generate_code(
    p_u: &Pmf,
    p_x_given_u: &Kernel,
    n: usize,
    r1: f64,
    r2: f64,
    c12: f64,
    seed: u64,
    memory_cap: usize,
) -> Result<DfCode> {
    if p_x_given_u.n_in() != p_u.len() {
        return Err(Error::DimensionMismatch(alloc::format!(
            "p(x|u) has {} rows for {} values of u",
            p_x_given_u.n_in(),
            p_u.len()
        )));
    }
    if p_u.len() > u16::MAX as usize || p_x_given_u.n_out() > u16::MAX as usize {
        return Err(Error::TooLarge(p_u.len().max(p_x_given_u.n_out())));
    }
    let mut warnings = Vec::new();
    let m1 = book_size(n, r1, "r1", &mut warnings)?;
    let m2 = book_size(n, r2, "r2", &mut warnings)?;
    let m_r = book_size(n, c12, "c12", &mut warnings)?;
    let words = (m_r as u128) * (m2 as u128) * (1 + m1 as u128);
    if words > memory_cap as u128 {
        return Err(Error::MemoryCap {
            needed: words,
            cap: memory_cap,
        });
    }
    let mut rng = stream_rng(seed, tags::DF_CODE, n as u64, 0);
    let cu = cdf(p_u.probs());
    let cx: Vec<Vec<f64>> = p_x_given_u.rows().map(cdf).collect();
    let mut u_book = Vec::with_capacity(m_r * m2 * n);
    let mut x_book = Vec::with_capacity(m_r * m2 * m1 * n);
    for _s in 0..m_r {
        for _w2 in 0..m2 {
            let start = u_book.len();
            for _ in 0..n {
                u_book.push(draw(&cu, &mut rng) as u16);
            }
            for _w1 in 0..m1 {
                for t in 0..n {
                    let u = u_book[start + t] as usize;
                    x_book.push(draw(&cx[u], &mut rng) as u16);
                }
            }
        }
    }
    let bins = (0..m2).map(|_| rng.gen_range(0..m_r as u32)).collect();
    Ok(DfCode {
        n,
        r1,
        r2,
        c12,
        m1,
        m2,
        m_r,
        p_u: p_u.clone(),
        p_x_given_u: p_x_given_u.clone(),
        u_book,
        x_book,
        bins,
        warnings,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Decoder {
    Ml,
    Typicality { epsilon: f64 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub blocks: usize,
    pub trials: usize,
    pub seed: u64,
    pub decoder: Decoder,
    /// Declare an error when several candidates survive at receiver 2
    /// instead of picking the most likely.
    pub strict: bool,
    pub n_grid: Vec<usize>,
    pub memory_cap: usize,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            blocks: 6,
            trials: 2000,
            seed: 0,
            decoder: Decoder::Ml,
            strict: false,
            n_grid: vec![4, 8, 12, 16],
            memory_cap: DEFAULT_MEMORY_CAP,
        }
    }
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        if self.blocks < 2 {
            return Err(Error::InvalidConfig("at least two blocks are needed".into()));
        }
        if self.trials == 0 {
            return Err(Error::InvalidConfig("trials must be positive".into()));
        }
        if let Decoder::Typicality { epsilon } = self.decoder {
            if !(epsilon > 0.0) {
                return Err(Error::InvalidConfig("typicality epsilon must be positive".into()));
            }
        }
        Ok(())
    }
}

/// Samples `(y1, y2)` given `x`.
#[derive(Clone, Debug)]
pub struct ChannelSampler {
    n2: usize,
    cdfs: Vec<Vec<f64>>,
}

impl ChannelSampler {
    pub fn new(ch: &BroadcastChannel) -> Self {
        let m = ch.y1_size() * ch.y2_size();
        ChannelSampler {
            n2: ch.y2_size(),
            cdfs: ch.transition().chunks(m).map(cdf).collect(),
        }
    }

    pub fn sample<R: Rng>(&self, x: usize, rng: &mut R) -> (usize, usize) {
        let k = draw(&self.cdfs[x], rng);
        (k / self.n2, k % self.n2)
    }
}

/// Per-letter statistics used by the decoders.
struct Stats {
    /// `log2 p(y1|x)`, `[x][y1]`.
    ly1_x: Vec<f64>,
    /// `log2 p(y2|x)`, `[x][y2]`.
    ly2_x: Vec<f64>,
    n1: usize,
    n2: usize,
    /// `-log2` of `p(u)`, `p(u,x)`, `p(y1)`, `p(u,y1)`, `p(x,y1)` and
    /// `p(u,x,y1)` tables with their entropies, for weak typicality at
    /// receiver 1, then `p(y2)`, `p(u,y2)` for receiver 2.
    typ: TypStats,
    i_u_y2: f64,
}

struct TypStats {
    nx: usize,
    lu: Vec<f64>,
    lux: Vec<f64>,
    ly1: Vec<f64>,
    luy1: Vec<f64>,
    lxy1: Vec<f64>,
    luxy1: Vec<f64>,
    ly2: Vec<f64>,
    luy2: Vec<f64>,
    h: [f64; 8],
}

fn neglog(p: &[f64]) -> Vec<f64> {
    p.iter()
        .map(|&q| if q > 0.0 { -libm::log2(q) } else { f64::INFINITY })
        .collect()
}

impl Stats {
    fn new(code: &DfCode, ch: &BroadcastChannel) -> Self {
        let (nx, n1, n2) = (ch.x_size(), ch.y1_size(), ch.y2_size());
        let k1 = ch.to_y1();
        let k2 = ch.to_y2();
        let log = |k: &Kernel| -> Vec<f64> {
            k.as_flat()
                .iter()
                .map(|&p| if p > 0.0 { libm::log2(p) } else { f64::NEG_INFINITY })
                .collect()
        };
        let mut d = Dense::source(code.p_u.probs());
        d.push(&[0], &[nx], code.p_x_given_u.as_flat());
        d.push(&[1], &[n1, n2], ch.transition());
        let m = |keep: &[usize]| crate::prob::dense::marginal(&d.sizes, &d.probs, keep);
        let typ = TypStats {
            nx,
            lu: neglog(&m(&[0])),
            lux: neglog(&m(&[0, 1])),
            ly1: neglog(&m(&[2])),
            luy1: neglog(&m(&[0, 2])),
            lxy1: neglog(&m(&[1, 2])),
            luxy1: neglog(&m(&[0, 1, 2])),
            ly2: neglog(&m(&[3])),
            luy2: neglog(&m(&[0, 3])),
            h: [
                d.h(&[0]),
                d.h(&[0, 1]),
                d.h(&[2]),
                d.h(&[0, 2]),
                d.h(&[1, 2]),
                d.h(&[0, 1, 2]),
                d.h(&[3]),
                d.h(&[0, 3]),
            ],
        };
        Stats {
            ly1_x: log(&k1),
            ly2_x: log(&k2),
            n1,
            n2,
            i_u_y2: d.mi(&[0], &[3], &[]),
            typ,
        }
    }

    fn ll1(&self, x: &[u16], y1: &[u16]) -> f64 {
        x.iter()
            .zip(y1)
            .map(|(&a, &b)| self.ly1_x[a as usize * self.n1 + b as usize])
            .sum()
    }

    fn ll2(&self, x: &[u16], y2: &[u16]) -> f64 {
        x.iter()
            .zip(y2)
            .map(|(&a, &b)| self.ly2_x[a as usize * self.n2 + b as usize])
            .sum()
    }

    /// Weak joint typicality of `(u, x, y1)` over every nonempty subset.
    fn typical1(&self, u: &[u16], x: &[u16], y1: &[u16], eps: f64) -> bool {
        let t = &self.typ;
        let n = u.len() as f64;
        let mut s = [0.0f64; 6];
        for i in 0..u.len() {
            let (a, b, c) = (u[i] as usize, x[i] as usize, y1[i] as usize);
            let n1 = self.n1;
            s[0] += t.lu[a];
            s[1] += t.lux[a * t.nx + b];
            s[2] += t.ly1[c];
            s[3] += t.luy1[a * n1 + c];
            s[4] += t.lxy1[b * n1 + c];
            s[5] += t.luxy1[(a * t.nx + b) * n1 + c];
        }
        // the x marginal is implied by (u, x) and u up to 2 eps
        s.iter().zip(&t.h[..6]).all(|(&v, &h)| (v / n - h).abs() < eps)
    }

    fn typical2(&self, u: &[u16], y2: &[u16], eps: f64) -> bool {
        let t = &self.typ;
        let n = u.len() as f64;
        let (mut a, mut b, mut c) = (0.0, 0.0, 0.0);
        for i in 0..u.len() {
            let (p, q) = (u[i] as usize, y2[i] as usize);
            a += t.lu[p];
            b += t.ly2[q];
            c += t.luy2[p * self.n2 + q];
        }
        (a / n - t.h[0]).abs() < eps && (b / n - t.h[6]).abs() < eps && (c / n - t.h[7]).abs() < eps
    }
}

fn logsumexp2(v: impl Iterator<Item = f64>) -> f64 {
    let v: Vec<f64> = v.collect();
    let m = v.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return m;
    }
    m + libm::log2(v.iter().map(|&x| libm::exp2(x - m)).sum::<f64>())
}

/// Decisions of one simulated transmission.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialOutcome {
    pub w1: Vec<usize>,
    pub w2: Vec<usize>,
    /// Receiver 1 estimates of `(w1, w2)` per message block.
    pub rx1: Vec<Option<(usize, usize)>>,
    /// Receiver 2 estimates of `w2` per message block.
    pub rx2: Vec<Option<usize>>,
    /// `|L(i)|` per message block (typicality decoding only).
    pub list_sizes: Vec<usize>,
}

impl TrialOutcome {
    pub fn error1(&self) -> bool {
        self.rx1.iter().zip(&self.w1).any(|(e, &w)| e.map(|e| e.0) != Some(w))
    }

    pub fn error2(&self) -> bool {
        self.rx2.iter().zip(&self.w2).any(|(e, &w)| *e != Some(w))
    }
}

fn decode_rx1(code: &DfCode, st: &Stats, s: usize, y1: &[u16], dec: Decoder) -> Option<(usize, usize)> {
    match dec {
        Decoder::Ml => {
            let mut best: Option<(usize, usize)> = None;
            let mut bv = f64::NEG_INFINITY;
            for w2 in 0..code.m2 {
                for w1 in 0..code.m1 {
                    let v = st.ll1(code.x_word(s, w2, w1), y1);
                    if v > bv {
                        bv = v;
                        best = Some((w1, w2));
                    }
                }
            }
            best
        }
        Decoder::Typicality { epsilon } => {
            let mut found = None;
            for w2 in 0..code.m2 {
                let u = code.u_word(s, w2);
                for w1 in 0..code.m1 {
                    if st.typical1(u, code.x_word(s, w2, w1), y1, epsilon) {
                        if found.is_some() {
                            return None;
                        }
                        found = Some((w1, w2));
                    }
                }
            }
            found
        }
    }
}

/// Receiver 2 decision for the message sent under link message `s_prev`,
/// restricted to bin `bin`. Returns the estimate and the list size.
fn decode_rx2(
    code: &DfCode,
    st: &Stats,
    s_prev: usize,
    bin: usize,
    y2: &[u16],
    cfg: &SimConfig,
) -> (Option<usize>, usize) {
    let score = |w2: usize| logsumexp2((0..code.m1).map(|w1| st.ll2(code.x_word(s_prev, w2, w1), y2)));
    let in_bin = |w2: &usize| code.bins[*w2] as usize == bin;
    let (cands, list): (Vec<usize>, usize) = match cfg.decoder {
        Decoder::Ml => ((0..code.m2).filter(in_bin).collect(), 0),
        Decoder::Typicality { epsilon } => {
            let list: Vec<usize> = (0..code.m2)
                .filter(|&w2| st.typical2(code.u_word(s_prev, w2), y2, epsilon))
                .collect();
            let n = list.len();
            (list.into_iter().filter(in_bin).collect(), n)
        }
    };
    let est = match cands.len() {
        0 => None,
        1 => Some(cands[0]),
        _ if cfg.strict && !matches!(cfg.decoder, Decoder::Ml) => None,
        _ => {
            let mut best = None;
            let mut bv = f64::NEG_INFINITY;
            for w2 in cands {
                let v = score(w2);
                if v > bv {
                    bv = v;
                    best = Some(w2);
                }
            }
            best
        }
    };
    (est, list)
}

fn run_trial_with(code: &DfCode, st: &Stats, sampler: &ChannelSampler, cfg: &SimConfig, trial: u64) -> TrialOutcome {
    let mut rng = stream_rng(cfg.seed, tags::DF_TRIALS, code.n as u64, trial);
    let b = cfg.blocks;
    let msgs = b - 1;
    let w1: Vec<usize> = (0..msgs).map(|_| rng.gen_range(0..code.m1)).collect();
    let w2: Vec<usize> = (0..msgs).map(|_| rng.gen_range(0..code.m2)).collect();
    let mut rx1 = Vec::with_capacity(msgs);
    let mut rx2 = Vec::with_capacity(msgs);
    let mut list_sizes = Vec::new();
    // link message used by the transmitter, by receiver 1 and as known at receiver 2
    let mut s_tx = 0usize;
    let mut s_rx1 = 0usize;
    let mut s_rx2_prev = 0usize;
    let mut y2_prev: Vec<u16> = Vec::new();
    let mut y1 = vec![0u16; code.n];
    let mut y2 = vec![0u16; code.n];
    for i in 0..b {
        let (m1, m2) = if i < msgs { (w1[i], w2[i]) } else { (0, 0) };
        let x = code.x_word(s_tx, m2, m1);
        for t in 0..code.n {
            let (a, c) = sampler.sample(x[t] as usize, &mut rng);
            y1[t] = a as u16;
            y2[t] = c as u16;
        }
        // receiver 2 resolves the previous block with the bin relayed now
        if i > 0 {
            let (est, list) = decode_rx2(code, st, s_rx2_prev, s_rx1, &y2_prev, cfg);
            rx2.push(est);
            list_sizes.push(list);
            s_rx2_prev = s_rx1;
        }
        if i < msgs {
            let est = decode_rx1(code, st, s_rx1, &y1, cfg.decoder);
            rx1.push(est);
            // undecodable blocks relay bin 0
            s_rx1 = est.map_or(0, |e| code.bins[e.1] as usize);
        }
        s_tx = code.bins[m2] as usize;
        y2_prev.clone_from(&y2);
    }
    TrialOutcome {
        w1,
        w2,
        rx1,
        rx2,
        list_sizes,
    }
}

fn check_inputs(code: &DfCode, ch: &BroadcastChannel, cfg: &SimConfig) -> Result<()> {
    cfg.validate()?;
    ch.require_degraded(DEGRADED_TOL)?;
    if code.p_x_given_u.n_out() != ch.x_size() {
        return Err(Error::DimensionMismatch(alloc::format!(
            "code input alphabet {} differs from channel input {}",
            code.p_x_given_u.n_out(),
            ch.x_size()
        )));
    }
    Ok(())
}

/// Simulates a single transmission of `B` blocks; trial `k` of
/// [`run_df`] uses the same stream.
pub fn run_trial(code: &DfCode, ch: &BroadcastChannel, cfg: &SimConfig, trial: u64) -> Result<TrialOutcome> {
    check_inputs(code, ch, cfg)?;
    Ok(run_trial_with(code, &Stats::new(code, ch), &ChannelSampler::new(ch), cfg, trial))
}

/// Two-sided 95% Wilson score interval.
pub fn wilson_interval(errors: usize, trials: usize) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let z = 1.959_963_984_540_054_f64;
    let n = trials as f64;
    let p = errors as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let centre = (p + z2 / (2.0 * n)) / denom;
    let half = z * libm::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
    let lo = if errors == 0 { 0.0 } else { (centre - half).max(0.0) };
    let hi = if errors == trials { 1.0 } else { (centre + half).min(1.0) };
    (lo, hi)
}

/// Error statistics for one blocklength.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DfSimRow {
    pub n: usize,
    pub trials: usize,
    pub blocks: usize,
    pub r1: f64,
    pub r2: f64,
    pub realized_r1: f64,
    pub realized_r2: f64,
    pub m1: usize,
    pub m2: usize,
    pub m_r: usize,
    pub errors1: usize,
    pub errors2: usize,
    pub errors: usize,
    pub pe1: f64,
    pub pe2: f64,
    pub pe: f64,
    pub pe1_ci: (f64, f64),
    pub pe2_ci: (f64, f64),
    pub pe_ci: (f64, f64),
    /// Mean `|L(i-1)|` and its analytic bound, typicality decoding only.
    pub mean_list_size: Option<f64>,
    pub list_bound: Option<f64>,
    pub warnings: Vec<String>,
}

impl DfSimRow {
    /// `max(P_e1, P_e2) <= P_e <= P_e1 + P_e2` on the counts.
    pub fn sandwich_holds(&self) -> bool {
        self.errors1.max(self.errors2) <= self.errors && self.errors <= self.errors1 + self.errors2
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DfSimReport {
    pub rows: Vec<DfSimRow>,
}

/// `1 + 2^{n (R2 - I(U;Y2) + 3 eps)}` clipped at the codebook size.
pub fn list_size_bound(n: usize, m2: usize, i_u_y2: f64, epsilon: f64) -> f64 {
    let r2 = libm::log2(m2 as f64);
    let b = 1.0 + libm::exp2(r2 - n as f64 * (i_u_y2 - 3.0 * epsilon));
    b.min(m2 as f64)
}

/// Simulates `cfg.trials` transmissions of the code.
pub fn run_df<E: Executor>(code: &DfCode, ch: &BroadcastChannel, cfg: &SimConfig, exec: &E) -> Result<DfSimRow> {
    check_inputs(code, ch, cfg)?;
    let st = Stats::new(code, ch);
    let sampler = ChannelSampler::new(ch);
    let outcomes = exec.map(cfg.trials, |k| {
        let o = run_trial_with(code, &st, &sampler, cfg, k as u64);
        let l: usize = o.list_sizes.iter().sum();
        (o.error1(), o.error2(), l, o.list_sizes.len())
    });
    let (mut e1, mut e2, mut e, mut lsum, mut lcount) = (0, 0, 0, 0usize, 0usize);
    for (a, b, l, c) in outcomes {
        e1 += a as usize;
        e2 += b as usize;
        e += (a || b) as usize;
        lsum += l;
        lcount += c;
    }
    let t = cfg.trials as f64;
    let (rr1, rr2, _) = code.realized_rates();
    let (mean_list_size, list_bound) = match cfg.decoder {
        Decoder::Typicality { epsilon } => (
            Some(lsum as f64 / lcount.max(1) as f64),
            Some(list_size_bound(code.n, code.m2, st.i_u_y2, epsilon)),
        ),
        Decoder::Ml => (None, None),
    };
    Ok(DfSimRow {
        n: code.n,
        trials: cfg.trials,
        blocks: cfg.blocks,
        r1: code.r1,
        r2: code.r2,
        realized_r1: rr1,
        realized_r2: rr2,
        m1: code.m1,
        m2: code.m2,
        m_r: code.m_r,
        errors1: e1,
        errors2: e2,
        errors: e,
        pe1: e1 as f64 / t,
        pe2: e2 as f64 / t,
        pe: e as f64 / t,
        pe1_ci: wilson_interval(e1, cfg.trials),
        pe2_ci: wilson_interval(e2, cfg.trials),
        pe_ci: wilson_interval(e, cfg.trials),
        mean_list_size,
        list_bound,
        warnings: code.warnings.clone(),
    })
}

/// Draws a code for every blocklength of the grid and simulates it. The code
/// for blocklength `n` uses the stream `(seed, n)`.
pub fn simulate<E: Executor>(
    p_u: &Pmf,
    p_x_given_u: &Kernel,
    ch: &BroadcastChannel,
    r1: f64,
    r2: f64,
    cfg: &SimConfig,
    exec: &E,
) -> Result<DfSimReport> {
    cfg.validate()?;
    let mut rows = Vec::with_capacity(cfg.n_grid.len());
    for &n in &cfg.n_grid {
        let code = generate_code(p_u, p_x_given_u, n, r1, r2, ch.c12(), cfg.seed, cfg.memory_cap)?;
        rows.push(run_df(&code, ch, cfg, exec)?);
    }
    Ok(DfSimReport { rows })
}

/// Mean list size at receiver 2 under typicality decoding with the
/// analytic bound.
pub fn list_size_diagnostic<E: Executor>(
    code: &DfCode,
    ch: &BroadcastChannel,
    cfg: &SimConfig,
    exec: &E,
) -> Result<(f64, f64)> {
    if !matches!(cfg.decoder, Decoder::Typicality { .. }) {
        return Err(Error::InvalidConfig("the list bound needs the typicality decoder".into()));
    }
    let row = run_df(code, ch, cfg, exec)?;
    Ok((row.mean_list_size.unwrap_or(0.0), row.list_bound.unwrap_or(0.0)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::optim::Sequential;

    fn bsc_code(n: usize, r1: f64, r2: f64, c12: f64, seed: u64) -> DfCode {
        generate_code(
            &Pmf::uniform(2).unwrap(),
            &Kernel::bsc(0.25).unwrap(),
            n,
            r1,
            r2,
            c12,
            seed,
            DEFAULT_MEMORY_CAP,
        )
        .unwrap()
    }

    #[test]
    fn code_sizes() {
        let c = bsc_code(8, 0.25, 0.25, 0.25, 0);
        assert_eq!((c.m1, c.m2, c.m_r), (4, 4, 4));
        assert!(c.warnings.is_empty());
        assert_eq!(c.u_book.len(), 4 * 4 * 8);
        assert_eq!(c.x_book.len(), 4 * 4 * 4 * 8);
        let z = bsc_code(8, 0.0, 0.0, 0.0, 0);
        assert_eq!((z.m1, z.m2, z.m_r), (1, 1, 1));
        let w = bsc_code(4, 0.2, 0.08, 0.3, 0);
        assert_eq!((w.m1, w.m2, w.m_r), (2, 2, 3));
        assert_eq!(w.warnings.len(), 3);
        assert_eq!(bsc_code(8, 0.25, 0.25, 0.25, 3), bsc_code(8, 0.25, 0.25, 0.25, 3));
        assert_ne!(bsc_code(8, 0.25, 0.25, 0.25, 3).x_book, bsc_code(8, 0.25, 0.25, 0.25, 4).x_book);
    }

    #[test]
    fn memory_cap_is_enforced() {
        let e = generate_code(
            &Pmf::uniform(2).unwrap(),
            &Kernel::bsc(0.25).unwrap(),
            16,
            1.0,
            1.0,
            0.5,
            0,
            DEFAULT_MEMORY_CAP,
        );
        assert!(matches!(e, Err(Error::MemoryCap { .. })));
    }

    #[test]
    fn single_message_never_fails() {
        let ch = BroadcastChannel::bsbc_cascade(0.0, 0.0).unwrap();
        let code = generate_code(
            &Pmf::uniform(2).unwrap(),
            &Kernel::identity(2).unwrap(),
            6,
            0.0,
            0.0,
            0.0,
            1,
            DEFAULT_MEMORY_CAP,
        )
        .unwrap();
        let cfg = SimConfig {
            trials: 50,
            ..SimConfig::default()
        };
        let row = run_df(&code, &ch, &cfg, &Sequential).unwrap();
        assert_eq!(row.errors, 0);
    }

    #[test]
    fn sampler_marginals() {
        let ch = BroadcastChannel::bsbc_cascade(0.1, 0.2).unwrap();
        let s = ChannelSampler::new(&ch);
        let mut rng = stream_rng(0, 0, 0, 0);
        let n = 100_000;
        for x in 0..2 {
            let mut counts = [0usize; 4];
            for _ in 0..n {
                let (a, b) = s.sample(x, &mut rng);
                counts[a * 2 + b] += 1;
            }
            for k in 0..4 {
                let p = ch.p(x, k / 2, k % 2);
                let sd = libm::sqrt(n as f64 * p * (1.0 - p));
                assert!((counts[k] as f64 - n as f64 * p).abs() <= 4.0 * sd + 1e-9);
            }
        }
    }

    #[test]
    fn wilson_values() {
        let (lo, hi) = wilson_interval(0, 100);
        assert_eq!(lo, 0.0);
        assert!((hi - 0.036_994).abs() < 1e-5);
        let (lo, hi) = wilson_interval(50, 100);
        assert!((lo - 0.403_831).abs() < 1e-5 && (hi - 0.596_169).abs() < 1e-5);
    }

    #[test]
    fn config_validation() {
        let c = SimConfig {
            blocks: 1,
            ..SimConfig::default()
        };
        assert!(c.validate().is_err());
        let c = SimConfig {
            decoder: Decoder::Typicality { epsilon: 0.0 },
            ..SimConfig::default()
        };
        assert!(c.validate().is_err());
        let pair = BroadcastChannel::bsbc_pair(0.1).unwrap();
        let code = bsc_code(4, 0.25, 0.25, 0.25, 0);
        assert!(matches!(run_df(&code, &pair, &SimConfig::default(), &Sequential), Err(Error::NotDegraded(_))));
    }

    #[test]
    fn list_bound_clips() {
        assert_eq!(list_size_bound(16, 1, 0.1, 0.05), 1.0);
        assert_eq!(list_size_bound(16, 64, 0.0, 0.05), 64.0);
        assert!(list_size_bound(64, 4, 0.5, 0.05) < 1.0 + 1e-6);
    }
}
