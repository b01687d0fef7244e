use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use schumpeter_core::io::{self, digest_hex, parse_scenario, DynamicsSection, RunRecord, Scenario};
use schumpeter_core::{
    converged_state, integrate, simulate_finite_population, sweep, AgentPopulation, Basin, Error,
    PopulationState, Protocol, Result,
};

#[derive(Debug, Parser)]
#[command(name = "schumpeter", version, about = "Innovation/imitation population games")]
struct Cli {
    /// Scenario file (JSON).
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Output file; stdout when omitted.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Diversities, dissimilarities and relevant-innovation verdicts.
    Diversity,
    /// ESS classification of the scenario's game.
    Classify,
    /// Schumpeterian state and the conditions behind it.
    State,
    /// Mean-field or finite-population trajectory as CSV.
    Simulate(SimulateArgs),
    /// Innovator rate and its gradient over an (alpha, beta) grid as CSV.
    Sweep,
}

#[derive(Debug, Args)]
struct SimulateArgs {
    #[arg(long)]
    protocol: Option<Protocol>,
    #[arg(long)]
    x0: Option<f64>,
    #[arg(long = "t-max")]
    t_max: Option<f64>,
    #[arg(long)]
    dt: Option<f64>,
    #[arg(long = "clock-rate")]
    clock_rate: Option<f64>,
    /// Finite-population simulation instead of the ODE.
    #[arg(long)]
    stochastic: bool,
    #[arg(long = "N")]
    n: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Convergence tolerance reported on stderr.
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    window: Option<f64>,
}

impl SimulateArgs {
    fn apply(&self, d: &mut DynamicsSection) {
        if let Some(p) = self.protocol {
            d.protocol = p;
        }
        if let Some(v) = self.x0 {
            d.x0 = v;
        }
        if let Some(v) = self.t_max {
            d.t_max = v;
        }
        if let Some(v) = self.dt {
            d.dt = v;
        }
        if let Some(v) = self.clock_rate {
            d.clock_rate = v;
        }
        if self.stochastic {
            d.stochastic = true;
        }
        if let Some(v) = self.n {
            d.n = v;
        }
        if let Some(v) = self.seed {
            d.seed = v;
        }
        if let Some(v) = self.tol {
            d.tol = v;
        }
        if let Some(v) = self.window {
            d.window = v;
        }
    }
}

struct Input {
    scenario: Scenario,
    digest: String,
}

fn load(cli: &Cli) -> Result<Input> {
    let path = cli
        .config
        .as_ref()
        .ok_or_else(|| Error::Validation("--config PATH is required".into()))?;
    let bytes = fs::read(path)?;
    let text = String::from_utf8(bytes.clone())
        .map_err(|e| Error::Validation(format!("scenario is not UTF-8: {e}")))?;
    let scenario = parse_scenario(&text)?;
    for w in scenario.warnings() {
        eprintln!("warning: {w}");
    }
    Ok(Input {
        scenario,
        digest: digest_hex(&bytes),
    })
}

fn emit(cli: &Cli, text: &str) -> Result<()> {
    match &cli.out {
        Some(path) => fs::write(path, text)?,
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            stdout.flush()?;
        }
    }
    Ok(())
}

fn run(cli: &Cli) -> Result<()> {
    let input = load(cli)?;
    match &cli.command {
        Command::Diversity => emit(cli, &diversity_report(&input.scenario)?),
        Command::Classify => emit(cli, &classify_report(&input.scenario)?),
        Command::State => state(cli, &input.scenario),
        Command::Simulate(args) => simulate(cli, &input, args),
        Command::Sweep => run_sweep(cli, &input),
    }
}

fn diversity_report(scenario: &Scenario) -> Result<String> {
    let model = scenario
        .diversity_model()?
        .ok_or_else(|| Error::Validation("scenario has no diversity section".into()))?;
    let fmt = io::format_float;
    let ids: Vec<&str> = model.catalog().iter().map(|t| t.id.as_str()).collect();
    let mut out = String::new();

    let relevant = model.relevant_attributes();
    let _ = writeln!(out, "relevant attributes ({}):", relevant.len());
    for a in &relevant {
        let _ = writeln!(out, "  {a}\t{}", fmt(model.weight(a).unwrap_or(0.0)));
    }
    let _ = writeln!(out, "diversity:");
    for id in &ids {
        let _ = writeln!(out, "  tau({{{id}}})\t{}", fmt(model.diversity(&[*id])?));
    }
    let _ = writeln!(out, "  tau(catalog)\t{}", fmt(model.diversity(&ids)?));
    let _ = writeln!(out, "dissimilarity delta(row, column):");
    let _ = writeln!(out, "  \t{}", ids.join("\t"));
    for yp in &ids {
        let cells = ids
            .iter()
            .map(|y| model.dissimilarity(yp, y).map(fmt))
            .collect::<Result<Vec<_>>>()?;
        let _ = writeln!(out, "  {yp}\t{}", cells.join("\t"));
    }
    let _ = writeln!(out, "relevant innovations:");
    for yp in &ids {
        for y in &ids {
            if yp != y && model.is_relevant_innovation(yp, y)? {
                let _ = writeln!(out, "  {yp} of {y}");
            }
        }
    }
    Ok(out)
}

fn classify_report(scenario: &Scenario) -> Result<String> {
    let m = scenario.matrix()?;
    let c = m.classify_ess();
    let mut out = String::new();
    let _ = writeln!(out, "matrix: {m}");
    let _ = writeln!(out, "kind: {}", c.kind);
    let states: Vec<String> = c.ess_states.iter().map(PopulationState::to_string).collect();
    let _ = writeln!(out, "ess: {}", states.join(" "));
    match c.interior_eq {
        Some(p) => {
            let _ = writeln!(out, "interior equilibrium: {}", io::format_float(p.x1()));
        }
        None => {
            let _ = writeln!(out, "interior equilibrium: none");
        }
    }
    match c.attracting {
        Basin::Global => {
            let _ = writeln!(out, "attracting: global");
        }
        Basin::SplitAt(p) => {
            let _ = writeln!(out, "attracting: split at p = {}", io::format_float(p.x1()));
        }
    }
    Ok(out)
}

fn state(cli: &Cli, scenario: &Scenario) -> Result<()> {
    let params = scenario
        .schumpeter_params()?
        .ok_or_else(|| Error::Validation("scenario has no schumpeter section".into()))?;
    let check = params.check();
    let fmt = io::format_float;
    let mut out = String::new();
    let _ = writeln!(out, "parameters: {params}");
    let _ = writeln!(out, "xi: {}", fmt(params.xi()));
    let _ = writeln!(
        out,
        "pi/2 + (alpha - beta)/2 < beta + cost: {}",
        check.innovation_self_limiting
    );
    let _ = writeln!(out, "pi/2 + alpha > beta + cost: {}", check.innovation_profitable);
    let result = params.schumpeterian_state();
    match &result {
        Ok(s) => {
            let m = params.build_game()?;
            let _ = writeln!(out, "matrix: {m}");
            let _ = writeln!(out, "schumpeterian: true");
            let _ = writeln!(out, "x_I: {}", fmt(s.innovators));
            let _ = writeln!(out, "x_R: {}", fmt(s.imitators));
        }
        Err(_) => {
            let _ = writeln!(out, "schumpeterian: false");
        }
    }
    emit(cli, &out)?;
    result.map(|_| ())
}

fn simulate(cli: &Cli, input: &Input, args: &SimulateArgs) -> Result<()> {
    let scenario = &input.scenario;
    let m = scenario.matrix()?;
    let mut dynamics = scenario.dynamics_or_default();
    args.apply(&mut dynamics);
    dynamics.validate()?;
    if dynamics.protocol == Protocol::Ppi && (dynamics.x0 == 0.0 || dynamics.x0 == 1.0) {
        eprintln!("warning: x0 = {} is monomorphic; imitation cannot leave it", dynamics.x0);
    }
    let x0 = PopulationState::new(dynamics.x0)?;
    let traj = if dynamics.stochastic {
        let pop = AgentPopulation::from_share(dynamics.n, x0, dynamics.seed)?;
        simulate_finite_population(
            dynamics.protocol,
            &m,
            pop,
            dynamics.t_max,
            dynamics.clock_rate,
            dynamics.dt,
        )?
    } else {
        integrate(dynamics.protocol, &m, x0, dynamics.t_max, dynamics.dt)?
    };
    let window = dynamics.window.min(traj.span());
    match converged_state(&traj, dynamics.tol, window) {
        Some(s) => eprintln!("converged: x_I = {}", io::format_float(s.x1())),
        None => eprintln!(
            "not converged within tol {}: final x_I = {}",
            dynamics.tol,
            io::format_float(traj.last_state().x1())
        ),
    }
    let csv = io::trajectory_csv_string(&traj, &[("input_sha256", input.digest.clone())]);
    emit(cli, &csv)?;
    if let Some(path) = &cli.out {
        let record = RunRecord {
            command: "simulate".into(),
            parameters: serde_json::json!({
                "matrix": m.entries(),
                "dynamics": dynamics,
            }),
            input_sha256: input.digest.clone(),
            outputs: vec![path.display().to_string()],
        };
        println!("{}", record.to_json());
    }
    Ok(())
}

fn run_sweep(cli: &Cli, input: &Input) -> Result<()> {
    let grid = input
        .scenario
        .sweep
        .ok_or_else(|| Error::Validation("scenario has no sweep section".into()))?;
    let res = sweep(&grid.alpha.values(), &grid.beta.values(), grid.xi)?;
    emit(cli, &io::sweep_csv_string(&res))?;
    if let Some(path) = &cli.out {
        let record = RunRecord {
            command: "sweep".into(),
            parameters: serde_json::to_value(grid).expect("sweep grid serialises"),
            input_sha256: input.digest.clone(),
            outputs: vec![path.display().to_string()],
        };
        println!("{}", record.to_json());
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
