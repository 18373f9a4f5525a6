//! Argument parsing and dispatch.

use std::ffi::OsString;
use std::fs;
use std::io::Write;

use clap::{Args, Parser, Subcommand, ValueEnum};
use coopcast_core::common::{
    bsbc2_corollary_rate, common_upper_bound, corollary_two_step_curve, nocoop_common_capacity, optimize_common,
    strong_more_capable_check, SchemeChoice,
};
use coopcast_core::degraded::{degraded_region, nocoop_degraded_region};
use coopcast_core::dfsim::{simulate, Decoder, DfSimRow, SimConfig, DEFAULT_MEMORY_CAP};
use coopcast_core::general::{cutset_bound, marton_coop_region, marton_nocoop_region};
use coopcast_core::{Degradedness, Kernel, OptBudget, Pmf};
use serde::{Deserialize, Serialize};

use crate::channel_file::{load_channel, Builtin, ChannelSpecFile, LoadedChannel};
use crate::error::{CliError, CliResult};
use crate::exec::RayonExecutor;
use crate::formats::{audit, fmt_f64, read_frontier_csv, write_frontier_csv, WitnessFile};

#[derive(Debug, Parser)]
#[command(name = "coopcast", version, about = "Rate regions of broadcast channels with conferencing receivers")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Trace an achievable region.
    Region {
        #[command(subcommand)]
        which: RegionCmd,
    },
    /// Trace an outer bound.
    Bound {
        #[command(subcommand)]
        which: BoundCmd,
    },
    /// Optimize a single rate.
    Rate {
        #[command(subcommand)]
        which: RateCmd,
    },
    /// Rate as a function of the link capacity.
    Curve {
        #[command(subcommand)]
        which: CurveCmd,
    },
    /// Structural channel checks.
    Check {
        #[command(subcommand)]
        which: CheckCmd,
    },
    /// Monte Carlo simulation of a coding scheme.
    Simulate {
        #[command(subcommand)]
        which: SimulateCmd,
    },
    /// Re-evaluate every frontier row from its witness file.
    Audit(AuditArgs),
}

#[derive(Debug, Subcommand)]
enum RegionCmd {
    /// Degraded channel, (R1, R0+R2) plane.
    Degraded(DegradedArgs),
    /// Marton region without cooperation.
    Marton(MartonArgs),
    /// Marton region with conferencing.
    MartonCoop(MartonArgs),
}

#[derive(Debug, Subcommand)]
enum BoundCmd {
    /// Cut-set outer bound.
    Cutset(RegionArgs),
}

#[derive(Debug, Subcommand)]
enum RateCmd {
    /// Common-message rate.
    Common(RateCommonArgs),
}

#[derive(Debug, Subcommand)]
enum CurveCmd {
    /// Common-message rate against `C = C12 = C21`.
    Common(CurveCommonArgs),
}

#[derive(Debug, Subcommand)]
enum CheckCmd {
    /// Is the channel physically degraded?
    Degraded(ChannelArgs),
    /// Strong more-capable condition with the link adjustment.
    MoreCapable(CheckCapableArgs),
}

#[derive(Debug, Subcommand)]
enum SimulateCmd {
    /// Block-Markov decode-and-forward over a degraded channel.
    Df(SimArgs),
}

#[derive(Debug, Args)]
struct ChannelArgs {
    /// Channel JSON file or `builtin:bsbc?p1=..&p2=..` / `builtin:bsbc2?p=..`.
    channel: String,
    /// Override the Rx1 -> Rx2 link capacity.
    #[arg(long)]
    c12: Option<f64>,
    /// Override the Rx2 -> Rx1 link capacity.
    #[arg(long)]
    c21: Option<f64>,
}

#[derive(Debug, Args)]
struct BudgetArgs {
    /// Number of sweep weights on [0, 1].
    #[arg(long, default_value_t = 65)]
    lambda_count: usize,
    /// Lattice points per simplex edge in the seeding scan.
    #[arg(long, default_value_t = 9)]
    grid_res: usize,
    /// Ascent restarts per objective.
    #[arg(long, default_value_t = 16)]
    restarts: usize,
    /// Ascent sweeps per restart.
    #[arg(long, default_value_t = 500)]
    max_iter: usize,
    /// Convergence tolerance of the ascent.
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

impl BudgetArgs {
    fn budget(&self) -> CliResult<OptBudget> {
        if self.lambda_count == 0 || self.grid_res == 0 {
            return Err(CliError::Usage("--lambda-count and --grid-res must be positive".into()));
        }
        if !(self.tol > 0.0) {
            return Err(CliError::Usage("--tol must be positive".into()));
        }
        Ok(OptBudget {
            lambda_count: self.lambda_count,
            grid_res: self.grid_res,
            restarts: self.restarts,
            max_iter: self.max_iter,
            tol: self.tol,
            seed: self.seed,
            ..OptBudget::default()
        })
    }
}

#[derive(Debug, Args)]
struct RegionArgs {
    #[command(flatten)]
    channel: ChannelArgs,
    #[command(flatten)]
    budget: BudgetArgs,
    /// Write the witness distributions (JSON) to this path.
    #[arg(long)]
    witnesses: Option<String>,
}

#[derive(Debug, Args)]
struct DegradedArgs {
    #[command(flatten)]
    region: RegionArgs,
    /// Ignore the conference link.
    #[arg(long)]
    no_coop: bool,
}

#[derive(Debug, Args)]
struct MartonArgs {
    #[command(flatten)]
    region: RegionArgs,
    /// Alphabet size of U.
    #[arg(long, default_value_t = 2)]
    card_u: usize,
    /// Alphabet size of V.
    #[arg(long, default_value_t = 2)]
    card_v: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum RateScheme {
    /// No cooperation: min(I(X;Y1), I(X;Y2)).
    Nocoop,
    SingleStep,
    TwoStep,
    /// Cut-set style upper bound.
    Upper,
}

#[derive(Debug, Args)]
struct RateCommonArgs {
    #[command(flatten)]
    channel: ChannelArgs,
    #[command(flatten)]
    budget: BudgetArgs,
    #[arg(long, value_enum, default_value_t = RateScheme::TwoStep)]
    scheme: RateScheme,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum CurveScheme {
    TwoStep,
    /// Closed form for `builtin:bsbc2` channels.
    ClosedForm,
}

#[derive(Debug, Args)]
struct CurveCommonArgs {
    #[command(flatten)]
    channel: ChannelArgs,
    #[command(flatten)]
    budget: BudgetArgs,
    #[arg(long, value_enum, default_value_t = CurveScheme::TwoStep)]
    scheme: CurveScheme,
    /// Capacities `start:stop:step`, both ends included.
    #[arg(long)]
    c_grid: String,
}

#[derive(Debug, Args)]
struct CheckCapableArgs {
    #[command(flatten)]
    channel: ChannelArgs,
    #[command(flatten)]
    budget: BudgetArgs,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum DecoderKind {
    Ml,
    Typicality,
}

#[derive(Debug, Args)]
struct SimArgs {
    #[command(flatten)]
    channel: ChannelArgs,
    #[arg(long)]
    r1: f64,
    #[arg(long)]
    r2: f64,
    /// Superposition crossover: U uniform binary, X = U xor Bern(alpha).
    #[arg(long, default_value_t = 0.25)]
    alpha: f64,
    /// JSON file with `p_u` and `p_x_given_u`; replaces --alpha.
    #[arg(long)]
    code: Option<String>,
    #[arg(long, default_value_t = 6)]
    blocks: usize,
    #[arg(long, default_value_t = 2000)]
    trials: usize,
    /// Comma separated blocklengths.
    #[arg(long, value_delimiter = ',', default_value = "4,8,12,16")]
    n_grid: Vec<usize>,
    #[arg(long, value_enum, default_value_t = DecoderKind::Ml)]
    decoder: DecoderKind,
    #[arg(long, default_value_t = 0.05)]
    epsilon: f64,
    /// With the typicality decoder, fail when several candidates survive.
    #[arg(long)]
    strict: bool,
    /// Codebook size limit in codewords.
    #[arg(long, default_value_t = DEFAULT_MEMORY_CAP)]
    memory_cap: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Debug, Args)]
struct AuditArgs {
    /// Frontier CSV.
    frontier: String,
    /// Witness JSON written with --witnesses.
    witnesses: String,
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
}

#[derive(Debug, Deserialize, Serialize)]
struct CodeFile {
    p_u: Pmf,
    p_x_given_u: Kernel,
}

fn channel_of(args: &ChannelArgs) -> CliResult<LoadedChannel> {
    let mut lc = load_channel(&args.channel)?;
    if args.c12.is_some() || args.c21.is_some() {
        let c12 = args.c12.unwrap_or(lc.channel.c12());
        let c21 = args.c21.unwrap_or(lc.channel.c21());
        lc.channel = lc.channel.with_links(c12, c21).map_err(CliError::Invariant)?;
    }
    Ok(lc)
}

fn io_err(path: &str) -> impl FnOnce(std::io::Error) -> CliError + '_ {
    move |source| CliError::Io {
        path: path.to_string(),
        source,
    }
}

fn write_json<T: Serialize>(path: &str, v: &T) -> CliResult<()> {
    let mut text = serde_json::to_string_pretty(v).map_err(|e| CliError::parse(path, e))?;
    text.push('\n');
    fs::write(path, text).map_err(io_err(path))
}

fn print_json<T: Serialize>(out: &mut dyn Write, v: &T) -> CliResult<()> {
    let text = serde_json::to_string_pretty(v).map_err(|e| CliError::parse("output", e))?;
    writeln!(out, "{text}").map_err(io_err("stdout"))
}

fn spec_of(lc: &LoadedChannel) -> ChannelSpecFile {
    ChannelSpecFile::from_channel(&lc.channel, lc.name.clone())
}

/// Parses `start:stop:step` into an inclusive grid.
pub fn parse_grid(s: &str) -> CliResult<Vec<f64>> {
    let bad = |m: &str| CliError::Usage(format!("--c-grid `{s}`: {m}"));
    let parts: Vec<f64> = s
        .split(':')
        .map(|p| p.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|_| bad("expected start:stop:step"))?;
    let [a, b, step] = parts[..] else {
        return Err(bad("expected start:stop:step"));
    };
    if !(step > 0.0) || !(b >= a) || !a.is_finite() || !b.is_finite() {
        return Err(bad("need start <= stop and a positive step"));
    }
    let count = ((b - a) / step + 1e-9).floor() as usize + 1;
    if count > 1_000_000 {
        return Err(bad("too many points"));
    }
    Ok((0..count).map(|k| a + k as f64 * step).collect())
}

fn region(cmd: RegionCmd, exec: &RayonExecutor, out: &mut dyn Write) -> CliResult<()> {
    let (args, frontier_points, file) = match cmd {
        RegionCmd::Degraded(a) => {
            let lc = channel_of(&a.region.channel)?;
            let budget = a.region.budget.budget()?;
            let f = if a.no_coop {
                nocoop_degraded_region(&lc.channel, &budget, exec)?
            } else {
                degraded_region(&lc.channel, &budget, exec)?
            };
            let file = WitnessFile::degraded(spec_of(&lc), &f, !a.no_coop);
            (a.region, f.points, file)
        }
        RegionCmd::Marton(a) => {
            let lc = channel_of(&a.region.channel)?;
            let f = marton_nocoop_region(&lc.channel, a.card_u, a.card_v, &a.region.budget.budget()?, exec)?;
            let file = WitnessFile::marton(spec_of(&lc), &f, false);
            (a.region, f.points, file)
        }
        RegionCmd::MartonCoop(a) => {
            let lc = channel_of(&a.region.channel)?;
            let f = marton_coop_region(&lc.channel, a.card_u, a.card_v, &a.region.budget.budget()?, exec)?;
            let file = WitnessFile::marton(spec_of(&lc), &f, true);
            (a.region, f.points, file)
        }
    };
    if let Some(path) = &args.witnesses {
        write_json(path, &file)?;
    }
    write_frontier_csv(&frontier_points, out)
}

fn bound(cmd: BoundCmd, exec: &RayonExecutor, out: &mut dyn Write) -> CliResult<()> {
    let BoundCmd::Cutset(a) = cmd;
    let lc = channel_of(&a.channel)?;
    let f = cutset_bound(&lc.channel, &a.budget.budget()?, exec);
    if let Some(path) = &a.witnesses {
        write_json(path, &WitnessFile::cutset(spec_of(&lc), &f))?;
    }
    write_frontier_csv(&f.points, out)
}

fn rate(cmd: RateCmd, exec: &RayonExecutor, out: &mut dyn Write) -> CliResult<()> {
    let RateCmd::Common(a) = cmd;
    let lc = channel_of(&a.channel)?;
    let budget = a.budget.budget()?;
    let ch = &lc.channel;
    match a.scheme {
        RateScheme::Nocoop => print_json(out, &nocoop_common_capacity(ch, &budget, exec)),
        RateScheme::Upper => print_json(out, &common_upper_bound(ch, &budget, exec)),
        RateScheme::SingleStep => print_json(out, &optimize_common(ch, SchemeChoice::SingleStep, &budget, exec)?),
        RateScheme::TwoStep => print_json(out, &optimize_common(ch, SchemeChoice::TwoStep, &budget, exec)?),
    }
}

fn curve(cmd: CurveCmd, exec: &RayonExecutor, out: &mut dyn Write) -> CliResult<()> {
    let CurveCmd::Common(a) = cmd;
    let lc = channel_of(&a.channel)?;
    let grid = parse_grid(&a.c_grid)?;
    let budget = a.budget.budget()?;
    let mut w = csv::Writer::from_writer(out);
    let nx = lc.channel.x_size();
    let mut header = vec!["c".to_string(), "rate".into(), "scheme".into()];
    header.extend((0..nx).map(|x| format!("p_x{x}")));
    let mut rows: Vec<Vec<String>> = Vec::with_capacity(grid.len());
    match a.scheme {
        CurveScheme::TwoStep => {
            for p in corollary_two_step_curve(&lc.channel, &grid, &budget, exec)? {
                let mut r = vec![fmt_f64(p.c), fmt_f64(p.rate), p.scheme.name().to_string()];
                r.extend(p.p_x.probs().iter().map(|&v| fmt_f64(v)));
                rows.push(r);
            }
        }
        CurveScheme::ClosedForm => {
            let Some(Builtin::Bsbc2 { p }) = lc.builtin else {
                return Err(CliError::Usage("--scheme closed-form needs a builtin:bsbc2 channel".into()));
            };
            for &c in &grid {
                let (rate, p0) = bsbc2_corollary_rate(p, c)?;
                rows.push(vec![fmt_f64(c), fmt_f64(rate), "closed_form".into(), fmt_f64(p0), fmt_f64(1.0 - p0)]);
            }
        }
    }
    let io = |e: csv::Error| CliError::Io {
        path: "stdout".into(),
        source: e.into(),
    };
    w.write_record(&header).map_err(io)?;
    for r in rows {
        w.write_record(&r).map_err(io)?;
    }
    w.flush().map_err(io_err("stdout"))
}

fn check(cmd: CheckCmd, exec: &RayonExecutor, out: &mut dyn Write) -> CliResult<()> {
    match cmd {
        CheckCmd::Degraded(a) => {
            let lc = channel_of(&a)?;
            let line = match lc.channel.is_physically_degraded(coopcast_core::degraded::DEGRADED_TOL) {
                Degradedness::Degraded { residual, .. } => format!("degraded: yes (residual {residual:e})"),
                Degradedness::NotDegraded { residual } => format!("degraded: no (residual {residual:e})"),
            };
            writeln!(out, "{line}").map_err(io_err("stdout"))
        }
        CheckCmd::MoreCapable(a) => {
            let lc = channel_of(&a.channel)?;
            print_json(out, &strong_more_capable_check(&lc.channel, &a.budget.budget()?, exec))
        }
    }
}

const SIM_HEADER: [&str; 22] = [
    "n",
    "trials",
    "blocks",
    "m1",
    "m2",
    "m_r",
    "realized_r1",
    "realized_r2",
    "errors1",
    "errors2",
    "errors",
    "pe1",
    "pe2",
    "pe",
    "pe1_lo",
    "pe1_hi",
    "pe2_lo",
    "pe2_hi",
    "pe_lo",
    "pe_hi",
    "mean_list_size",
    "list_bound",
];

fn sim_record(r: &DfSimRow) -> Vec<String> {
    let opt = |v: Option<f64>| v.map(fmt_f64).unwrap_or_default();
    vec![
        r.n.to_string(),
        r.trials.to_string(),
        r.blocks.to_string(),
        r.m1.to_string(),
        r.m2.to_string(),
        r.m_r.to_string(),
        fmt_f64(r.realized_r1),
        fmt_f64(r.realized_r2),
        r.errors1.to_string(),
        r.errors2.to_string(),
        r.errors.to_string(),
        fmt_f64(r.pe1),
        fmt_f64(r.pe2),
        fmt_f64(r.pe),
        fmt_f64(r.pe1_ci.0),
        fmt_f64(r.pe1_ci.1),
        fmt_f64(r.pe2_ci.0),
        fmt_f64(r.pe2_ci.1),
        fmt_f64(r.pe_ci.0),
        fmt_f64(r.pe_ci.1),
        opt(r.mean_list_size),
        opt(r.list_bound),
    ]
}

fn simulate_cmd(cmd: SimulateCmd, exec: &RayonExecutor, out: &mut dyn Write, err: &mut dyn Write) -> CliResult<()> {
    let SimulateCmd::Df(a) = cmd;
    let lc = channel_of(&a.channel)?;
    let (p_u, k) = match &a.code {
        Some(path) => {
            let text = fs::read_to_string(path).map_err(io_err(path))?;
            let c: CodeFile = serde_json::from_str(&text).map_err(|e| CliError::parse(path, e))?;
            (c.p_u, c.p_x_given_u)
        }
        None => {
            if lc.channel.x_size() != 2 {
                return Err(CliError::Usage("--alpha needs a binary input; pass --code".into()));
            }
            (Pmf::uniform(2)?, Kernel::bsc(a.alpha)?)
        }
    };
    let cfg = SimConfig {
        blocks: a.blocks,
        trials: a.trials,
        seed: a.seed,
        decoder: match a.decoder {
            DecoderKind::Ml => Decoder::Ml,
            DecoderKind::Typicality => Decoder::Typicality { epsilon: a.epsilon },
        },
        strict: a.strict,
        n_grid: a.n_grid.clone(),
        memory_cap: a.memory_cap,
    };
    let rep = simulate(&p_u, &k, &lc.channel, a.r1, a.r2, &cfg, exec)?;
    let mut w = csv::Writer::from_writer(out);
    let io = |e: csv::Error| CliError::Io {
        path: "stdout".into(),
        source: e.into(),
    };
    w.write_record(SIM_HEADER).map_err(io)?;
    for r in &rep.rows {
        for m in &r.warnings {
            writeln!(err, "warning: n={}: {m}", r.n).map_err(io_err("stderr"))?;
        }
        w.write_record(sim_record(r)).map_err(io)?;
    }
    w.flush().map_err(io_err("stdout"))
}

fn audit_cmd(a: AuditArgs, out: &mut dyn Write) -> CliResult<()> {
    let csv_file = fs::File::open(&a.frontier).map_err(io_err(&a.frontier))?;
    let points = read_frontier_csv(&a.frontier, csv_file)?;
    let text = fs::read_to_string(&a.witnesses).map_err(io_err(&a.witnesses))?;
    let file: WitnessFile = serde_json::from_str(&text).map_err(|e| CliError::parse(&a.witnesses, e))?;
    let report = audit(&points, &file, a.tol)?;
    print_json(out, &report)?;
    if report.ok {
        Ok(())
    } else {
        Err(CliError::Audit(format!(
            "row {:?} deviates by {:e} (tolerance {:e})",
            report.worst_row, report.max_deviation, a.tol
        )))
    }
}

fn dispatch(cli: Cli, out: &mut dyn Write, err: &mut dyn Write) -> CliResult<()> {
    let exec = RayonExecutor::from_env();
    match cli.command {
        Command::Region { which } => region(which, &exec, out),
        Command::Bound { which } => bound(which, &exec, out),
        Command::Rate { which } => rate(which, &exec, out),
        Command::Curve { which } => curve(which, &exec, out),
        Command::Check { which } => check(which, &exec, out),
        Command::Simulate { which } => simulate_cmd(which, &exec, out, err),
        Command::Audit(a) => audit_cmd(a, out),
    }
}

/// Runs the command line `args` (program name first) and returns the exit
/// code. Results go to `out`, diagnostics to `err`.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{e}");
                    0
                }
                _ => {
                    let _ = write!(err, "{e}");
                    64
                }
            };
        }
    };
    match dispatch(cli, out, err) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_parsing() {
        let g = parse_grid("0.469:0.75:0.01").unwrap();
        assert_eq!(g.len(), 29);
        assert!((g[28] - 0.749).abs() < 1e-12);
        assert_eq!(parse_grid("0:1:0.5").unwrap(), vec![0.0, 0.5, 1.0]);
        for bad in ["1:0:0.1", "0:1", "0:1:0", "a:b:c"] {
            assert_eq!(parse_grid(bad).unwrap_err().exit_code(), 64, "{bad}");
        }
    }

    #[test]
    fn cli_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}
