use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use rdpconv::envelope::epsilon_grid;
use rdpconv::mechanisms::VIOLATION_TOL;
use rdpconv::oracle::grid_envelope_beta;
use rdpconv::{
    delta_table, envelope_beta, envelope_curve, envelope_search, gaussian_tradeoff, uniform_alphas,
    verify_witness, witness_at, Error, GaussianMechanismRef, Order, OrderSearchConfig, RdpProfile,
    SingleOrderRegion, TradeoffCurve, TradeoffSample,
};

mod output;

use output::{num, Cell, Table};

#[derive(Parser)]
#[command(
    name = "rdpconv",
    version,
    about = "Convert Renyi-DP profiles into f-DP trade-off curves"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Envelope trade-off curve of a profile.
    Tradeoff {
        #[command(flatten)]
        profile: ProfileArgs,
        #[command(flatten)]
        grid: GridArgs,
        #[command(flatten)]
        search: SearchArgs,
        /// Restrict the supremum to these orders (comma separated, `inf` allowed).
        #[arg(long, value_delimiter = ',')]
        orders: Option<Vec<f64>>,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Boundary of a single-order region.
    Region {
        #[arg(long)]
        tau: f64,
        #[arg(long)]
        rho: f64,
        #[command(flatten)]
        grid: GridArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// δ(ε) table read off the envelope curve.
    Delta {
        #[command(flatten)]
        profile: ProfileArgs,
        /// Number of uniform α samples [default: 4097].
        #[arg(long)]
        alphas: Option<usize>,
        #[command(flatten)]
        search: SearchArgs,
        #[arg(long, default_value_t = 8.0)]
        eps_max: f64,
        #[arg(long, default_value_t = 0.01)]
        eps_step: f64,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Bernoulli witness at one α with its verification report (JSON).
    Witness {
        #[command(flatten)]
        profile: ProfileArgs,
        #[arg(long)]
        alpha0: f64,
        /// Extra orders to verify against besides the searched ones.
        #[arg(long, value_delimiter = ',')]
        check_orders: Vec<f64>,
        #[command(flatten)]
        search: SearchArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Envelope of the Gaussian profile next to the exact Gaussian curve.
    CompareGaussian {
        #[arg(long)]
        sigma: f64,
        #[command(flatten)]
        grid: GridArgs,
        #[command(flatten)]
        search: SearchArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Cross-check the envelope against the grid oracle (JSON).
    Verify {
        #[command(flatten)]
        profile: ProfileArgs,
        /// Number of uniform α samples.
        #[arg(long, default_value_t = 101)]
        alphas: usize,
        /// β grid resolution of the oracle.
        #[arg(long, default_value_t = 4096)]
        grid: usize,
        #[command(flatten)]
        search: SearchArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct ProfileArgs {
    /// Profile as inline JSON, e.g. '{"type":"gaussian","sigma":1.0}'.
    #[arg(long)]
    profile: Option<String>,
    /// Path to a file holding the profile JSON.
    #[arg(long)]
    profile_file: Option<PathBuf>,
}

#[derive(Args)]
struct GridArgs {
    /// Number of uniform α samples on [0, 1].
    #[arg(long, default_value_t = 1001)]
    alphas: usize,
}

#[derive(Args)]
struct SearchArgs {
    #[arg(long)]
    tau_min: Option<f64>,
    #[arg(long)]
    tau_max: Option<f64>,
    #[arg(long)]
    coarse_grid_size: Option<usize>,
    #[arg(long)]
    refinement: Option<usize>,
    /// Force the order ∞ in or out of the search (default: when ρ(∞) is finite).
    #[arg(long)]
    include_infinite_order: Option<bool>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Args)]
struct OutputArgs {
    /// Table format [default: csv]; reports are always JSON.
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Write to this file instead of standard output.
    #[arg(long)]
    output: Option<PathBuf>,
}

enum Failure {
    Input(String),
    Verification(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Input(e.to_string())
    }
}

impl ProfileArgs {
    fn load(&self) -> Result<RdpProfile, Failure> {
        let text = match (&self.profile, &self.profile_file) {
            (Some(text), None) => text.clone(),
            (None, Some(path)) => fs::read_to_string(path)
                .map_err(|e| Failure::Input(format!("cannot read {}: {e}", path.display())))?,
            _ => {
                return Err(Failure::Input(
                    "give exactly one of --profile, --profile-file".into(),
                ))
            }
        };
        Ok(RdpProfile::from_json(&text)?)
    }
}

impl SearchArgs {
    fn config(&self) -> Result<OrderSearchConfig, Failure> {
        let mut cfg = OrderSearchConfig::default();
        if let Some(v) = self.tau_min {
            cfg.tau_min = v;
        }
        if let Some(v) = self.tau_max {
            cfg.tau_max = v;
        }
        if let Some(v) = self.coarse_grid_size {
            cfg.coarse_grid_size = v;
        }
        if let Some(v) = self.refinement {
            cfg.refinement = v;
        }
        cfg.include_infinite_order = self.include_infinite_order;
        cfg.validate()?;
        Ok(cfg)
    }
}

impl OutputArgs {
    fn emit_table(&self, table: &Table) -> Result<(), Failure> {
        let text = match self.format.unwrap_or(Format::Csv) {
            Format::Csv => table.to_csv(),
            Format::Json => table.to_json(),
        };
        self.write(&text)
    }

    fn emit_report(&self, report: &Value) -> Result<(), Failure> {
        if self.format == Some(Format::Csv) {
            return Err(Failure::Input(
                "this report is only available as JSON".into(),
            ));
        }
        self.write(&output::to_json(report))
    }

    fn write(&self, text: &str) -> Result<(), Failure> {
        match &self.output {
            Some(path) => fs::write(path, text)
                .map_err(|e| Failure::Input(format!("cannot write {}: {e}", path.display()))),
            None => {
                print!("{text}");
                Ok(())
            }
        }
    }
}

fn order_cell(tau: Option<Order>) -> Cell {
    match tau {
        Some(t) => Cell::Float(t.value()),
        None => Cell::Text(String::new()),
    }
}

fn parse_order(tau: f64) -> Result<Order, Failure> {
    Ok(Order::new(tau)?)
}

/// Supremum over an explicit order list; ties go to the smaller order.
fn restricted_curve(
    profile: &RdpProfile,
    alphas: &[f64],
    orders: &[f64],
) -> Result<TradeoffCurve, Failure> {
    let mut regions = Vec::new();
    for &t in orders {
        let tau = parse_order(t)?;
        regions.push(SingleOrderRegion::new(tau, profile.rho_at(tau)?)?);
    }
    regions.sort_by_key(|r| r.tau());
    if regions.is_empty() {
        return Err(Failure::Input("--orders is empty".into()));
    }
    let mut samples = Vec::with_capacity(alphas.len());
    for &alpha in alphas {
        let mut best: Option<(f64, &SingleOrderRegion)> = None;
        for r in &regions {
            let b = r.boundary_beta(alpha)?;
            if best.is_none_or(|(bb, _)| b > bb) {
                best = Some((b, r));
            }
        }
        let (beta, r) = best.expect("nonempty order list");
        let point = r.boundary_point(alpha)?;
        samples.push(TradeoffSample {
            alpha,
            beta,
            tau_active: Some(r.tau()),
            binding: Some(point.binding_direction),
        });
    }
    Ok(TradeoffCurve::new(samples)?)
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Tradeoff {
            profile,
            grid,
            search,
            orders,
            out,
        } => {
            let profile = profile.load()?;
            let cfg = search.config()?;
            let alphas = uniform_alphas(grid.alphas)?;
            let curve = match orders {
                Some(orders) => restricted_curve(&profile, &alphas, &orders)?,
                None => envelope_curve(&profile, &alphas, &cfg)?,
            };
            let mut table = Table::new(vec!["alpha", "beta", "tau_active"]);
            for s in curve.samples() {
                table.push(vec![
                    Cell::Float(s.alpha),
                    Cell::Float(s.beta),
                    order_cell(s.tau_active),
                ]);
            }
            out.emit_table(&table)
        }
        Command::Region {
            tau,
            rho,
            grid,
            out,
        } => {
            let region = SingleOrderRegion::new(parse_order(tau)?, rho)?;
            let mut alphas = uniform_alphas(grid.alphas)?;
            // Include the diagonal crossing so the curve passes through (α*, α*).
            if let Ok(p) = region.symmetric_point() {
                let star = 1.0 - p;
                if !alphas.contains(&star) {
                    alphas.push(star);
                    alphas.sort_by(f64::total_cmp);
                }
            }
            let curve = region.sample_curve(&alphas)?;
            let mut table = Table::new(vec!["alpha", "beta", "binding_direction"]);
            for s in curve.samples() {
                let binding = s
                    .binding
                    .map(|b| b.as_str().to_string())
                    .unwrap_or_default();
                table.push(vec![
                    Cell::Float(s.alpha),
                    Cell::Float(s.beta),
                    Cell::Text(binding),
                ]);
            }
            out.emit_table(&table)
        }
        Command::Delta {
            profile,
            alphas,
            search,
            eps_max,
            eps_step,
            out,
        } => {
            let profile = profile.load()?;
            let cfg = search.config()?;
            let alphas = uniform_alphas(alphas.unwrap_or(4097))?;
            let curve = envelope_curve(&profile, &alphas, &cfg)?;
            let eps = epsilon_grid(eps_max, eps_step)?;
            let mut table = Table::new(vec!["epsilon", "delta"]);
            for p in delta_table(&curve, &eps)? {
                table.push(vec![Cell::Float(p.epsilon), Cell::Float(p.delta)]);
            }
            out.emit_table(&table)
        }
        Command::Witness {
            profile,
            alpha0,
            check_orders,
            search,
            out,
        } => {
            let profile = profile.load()?;
            let cfg = search.config()?;
            let env = envelope_beta(&profile, alpha0, &cfg)?;
            let witness = witness_at(&profile, alpha0, &cfg)?;
            let mut tau_grid = cfg.fixed_orders(&profile);
            tau_grid.push(env.tau_active);
            for &t in &check_orders {
                tau_grid.push(parse_order(t)?);
            }
            tau_grid.sort();
            tau_grid.dedup();
            let report = verify_witness(&witness, &profile, &tau_grid);
            let checks: Vec<Value> = report
                .checks
                .iter()
                .map(|c| {
                    json!({
                        "tau": num(c.tau.value()),
                        "rho": num(c.rho),
                        "forward": num(c.forward),
                        "reverse": num(c.reverse),
                        "margin": num(c.margin()),
                    })
                })
                .collect();
            let valid = report.is_valid();
            let doc = json!({
                "profile": serde_json::from_str::<Value>(&profile.to_json()).expect("profile JSON"),
                "alpha0": num(alpha0),
                "envelope_beta": num(env.beta),
                "tau_active": num(env.tau_active.value()),
                "binding_direction": env.binding.as_str(),
                "witness": {"p": num(witness.a()), "q": num(witness.b())},
                "operating_point": {
                    "alpha": num(witness.operating_point().alpha()),
                    "beta": num(witness.operating_point().beta()),
                },
                "violation_tolerance": num(VIOLATION_TOL),
                "min_forward_margin": num(report.min_forward_margin()),
                "min_reverse_margin": num(report.min_reverse_margin()),
                "violations": report.violations.len(),
                "valid": valid,
                "checks": checks,
            });
            out.emit_report(&doc)?;
            if valid {
                Ok(())
            } else {
                Err(Failure::Verification(format!(
                    "witness violates the profile at {} orders",
                    report.violations.len()
                )))
            }
        }
        Command::CompareGaussian {
            sigma,
            grid,
            search,
            out,
        } => {
            let mech = GaussianMechanismRef::new(sigma)?;
            let cfg = search.config()?;
            let alphas = uniform_alphas(grid.alphas)?;
            let curve = envelope_curve(&mech.profile(), &alphas, &cfg)?;
            let mut table = Table::new(vec!["alpha", "envelope_beta", "gaussian_tradeoff", "gap"]);
            for s in curve.samples() {
                let exact = gaussian_tradeoff(&mech, s.alpha);
                table.push(vec![
                    Cell::Float(s.alpha),
                    Cell::Float(s.beta),
                    Cell::Float(exact),
                    Cell::Float(exact - s.beta),
                ]);
            }
            out.emit_table(&table)
        }
        Command::Verify {
            profile,
            alphas,
            grid,
            search,
            out,
        } => {
            let profile = profile.load()?;
            let cfg = search.config()?;
            let alphas = uniform_alphas(alphas)?;
            let bound = 1.0 / grid as f64;
            let mut rows = Vec::new();
            let mut failures = Vec::new();
            let (mut max_dev, mut min_dev) = (f64::NEG_INFINITY, f64::INFINITY);
            let mut samples = Vec::new();
            for &alpha in &alphas {
                let search = envelope_search(&profile, alpha, &cfg)?;
                let point = search.point;
                let mut orders = cfg.fixed_orders(&profile);
                orders.push(point.tau_active);
                let oracle = grid_envelope_beta(&profile, alpha, &orders, grid)?;
                // The oracle rounds every order's boundary up to the β grid.
                let dev = oracle - point.beta;
                max_dev = max_dev.max(dev);
                min_dev = min_dev.min(dev);
                if !(dev >= -1e-12 && dev <= bound + 1e-12) {
                    failures.push(num(alpha));
                }
                rows.push(json!({
                    "alpha": num(alpha),
                    "envelope_beta": num(point.beta),
                    "oracle_beta": num(oracle),
                    "tau_active": num(point.tau_active.value()),
                }));
                samples.push(TradeoffSample {
                    alpha,
                    beta: point.beta,
                    tau_active: Some(point.tau_active),
                    binding: Some(point.binding),
                });
            }
            let invariants = TradeoffCurve::new(samples)?.invariant_violations();
            let passed = failures.is_empty() && invariants.is_empty();
            let doc = json!({
                "profile": serde_json::from_str::<Value>(&profile.to_json()).expect("profile JSON"),
                "oracle_grid": grid,
                "bound": num(bound),
                "max_deviation": num(max_dev),
                "min_deviation": num(min_dev),
                "failed_alphas": failures,
                "curve_invariant_violations": invariants,
                "passed": passed,
                "samples": rows,
            });
            out.emit_report(&doc)?;
            if passed {
                Ok(())
            } else {
                Err(Failure::Verification(
                    "envelope disagrees with the grid oracle".into(),
                ))
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Verification(msg)) => {
            eprintln!("verification failed: {msg}");
            ExitCode::from(2)
        }
    }
}
