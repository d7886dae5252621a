use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use hembed::circuits::ProductFormula;
use hembed::dynamics::{Kernel, Mode};
use hembed::embed::EncodingScheme;
use hembed::experiments::advection::{run_advection, AdvectionConfig};
use hembed::experiments::levelset::{run_levelset, LevelsetConfig};
use hembed::experiments::resources::{resource_csv, run_resources, Model, ResourceConfig};
use hembed::experiments::tfim::{run_tfim, tfim_problem, TfimConfig, TfimResult};
use hembed::{Error, Result};

#[derive(Parser, Debug)]
#[command(name = "hembed", version, about = "Embedded-Hamiltonian simulation of transport PDEs, emitting CSV")]
struct Cli {
    /// RNG seed for shot sampling.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Write CSV here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Exact expectation values (default where supported).
    #[arg(long, global = true, conflicts_with = "shots")]
    exact: bool,
    /// Estimate from this many shots.
    #[arg(long, global = true)]
    shots: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// 2D constant-velocity advection of two Gaussian peaks.
    Advection(AdvectionArgs),
    /// Nonlinear scalar law through its level-set lift.
    Levelset(LevelsetArgs),
    /// Transverse-field Ising chain with decay, both non-unitary pipelines.
    TfimCompare(TfimArgs),
    /// Two-qubit depth and gate counts per encoding and size.
    Resources(ResourceArgs),
}

fn parse_encoding(s: &str) -> std::result::Result<EncodingScheme, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

#[derive(Args, Debug)]
struct AdvectionArgs {
    /// Grid points per dimension.
    #[arg(long, default_value_t = 10)]
    n: usize,
    #[arg(long, default_value = "onehot", value_parser = parse_encoding)]
    encoding: EncodingScheme,
    /// Trotter steps per snapshot.
    #[arg(long, default_value_t = 2)]
    steps: usize,
    /// Product-formula order (1 or even).
    #[arg(long, default_value_t = 2)]
    order: usize,
    #[arg(long, value_delimiter = ',', default_values_t = [0.0, 0.05, 0.1, 0.15, 0.2])]
    times: Vec<f64>,
    #[arg(long, value_delimiter = ',', num_args = 2, default_values_t = [1.0, 1.0])]
    velocity: Vec<f64>,
}

#[derive(Args, Debug)]
struct LevelsetArgs {
    /// Qubits per spatial axis (`N_x = 2^nx`).
    #[arg(long, default_value_t = 5)]
    nx: usize,
    /// q grid points on [-1, 1].
    #[arg(long, default_value_t = 32)]
    nq: usize,
    #[arg(long, default_value_t = 0.25)]
    t: f64,
    #[arg(long, default_value = "binary", value_parser = parse_encoding)]
    encoding: EncodingScheme,
    #[arg(long, default_value_t = 1)]
    steps: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Method {
    Schrod,
    Lchs,
    Both,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum KernelArg {
    Recip,
    Beta,
}

#[derive(Args, Debug)]
struct TfimArgs {
    #[arg(long, value_enum, default_value_t = Method::Both)]
    method: Method,
    /// Chain length.
    #[arg(long, default_value_t = 4)]
    n: usize,
    #[arg(long, default_value_t = 1.0)]
    j: f64,
    #[arg(long, default_value_t = 1.0)]
    h: f64,
    #[arg(long, default_value_t = 0.1)]
    gamma: f64,
    #[arg(long, default_value_t = 0.5)]
    t: f64,
    #[arg(long, default_value_t = 20)]
    steps: usize,
    /// Auxiliary qubits of the warped-phase register.
    #[arg(long, default_value_t = 7)]
    np: usize,
    /// Truncation of both the p domain and the k integral.
    #[arg(long = "R", default_value_t = 25.0)]
    r: f64,
    #[arg(long, value_enum, default_value_t = KernelArg::Beta)]
    kernel: KernelArg,
    #[arg(long, default_value_t = 0.75)]
    beta: f64,
    /// Trapezoid nodes of the k integral.
    #[arg(long, default_value_t = 128)]
    nodes: usize,
    /// Sampled LCHS circuits per budget (default: budget / 10).
    #[arg(long)]
    samples: Option<usize>,
    /// Total circuit executions per method; `--shots k` replaces the ladder with `k`.
    #[arg(long, value_delimiter = ',', default_values_t = [100usize, 1_000, 10_000, 100_000])]
    budgets: Vec<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum ModelArg {
    Advection,
    Nonlinear,
}

#[derive(Args, Debug)]
struct ResourceArgs {
    #[arg(long, value_enum, default_value_t = ModelArg::Advection)]
    model: ModelArg,
    /// Grid sizes (N for advection, N_q for the nonlinear model).
    #[arg(long, value_delimiter = ',', default_values_t = [8usize, 16, 32])]
    sizes: Vec<usize>,
    #[arg(long, value_delimiter = ',', default_values = ["binary", "onehot", "unary"], value_parser = parse_encoding)]
    encoding: Vec<EncodingScheme>,
    /// Target Trotter error for advection.
    #[arg(long, default_value_t = 5e-2)]
    eps: f64,
    /// Final time (default 0.5 for advection, 0.25 for the nonlinear model).
    #[arg(long)]
    t: Option<f64>,
    #[arg(long, default_value_t = 6)]
    np: usize,
    #[arg(long = "R", default_value_t = 4.0)]
    r: f64,
    /// Qubits per spatial axis of the nonlinear model.
    #[arg(long, default_value_t = 5)]
    nx: usize,
}

fn mode(cli: &Cli) -> Result<Mode> {
    match cli.shots {
        Some(0) => Err(Error::invalid("--shots must be positive")),
        Some(k) => Ok(Mode::Shots(k)),
        None => Ok(Mode::Exact),
    }
}

fn exact_only(cli: &Cli, what: &str) -> Result<()> {
    if cli.shots.is_some() {
        return Err(Error::invalid(format!("{what} runs in exact mode only")));
    }
    Ok(())
}

fn advection(cli: &Cli, a: &AdvectionArgs) -> Result<String> {
    let cfg = AdvectionConfig {
        n: a.n,
        velocity: (a.velocity[0], a.velocity[1]),
        times: a.times.clone(),
        steps: a.steps,
        formula: if a.order == 1 { ProductFormula::first_order() } else { ProductFormula::suzuki(a.order)? },
        encoding: a.encoding,
        mode: mode(cli)?,
        seed: cli.seed,
        ..AdvectionConfig::default()
    };
    let r = run_advection(&cfg)?;
    eprintln!(
        "drift error {:.3} cells; per snapshot rxx preset: {} 1q / {} 2q gates",
        r.drift_error_cells(cfg.velocity),
        r.gates_rxx.count_1q,
        r.gates_rxx.count_2q
    );
    Ok(r.csv())
}

fn levelset(cli: &Cli, a: &LevelsetArgs) -> Result<String> {
    exact_only(cli, "levelset")?;
    let cfg = LevelsetConfig { n_x: a.nx, n_q: a.nq, t: a.t, encoding: a.encoding, steps: a.steps, ..LevelsetConfig::default() };
    let r = run_levelset(&cfg)?;
    eprintln!("{:.1}% of points within one q spacing of the characteristics solution", 100.0 * r.fraction_within_one_spacing());
    Ok(r.csv())
}

fn tfim(cli: &Cli, a: &TfimArgs) -> Result<String> {
    let kernel = match a.kernel {
        KernelArg::Recip => Kernel::Reciprocal,
        KernelArg::Beta => Kernel::Beta(a.beta),
    };
    let budgets = match mode(cli)? {
        Mode::Shots(k) => vec![k],
        Mode::Exact => a.budgets.clone(),
    };
    let cfg = TfimConfig {
        n: a.n,
        j: a.j,
        h: a.h,
        gamma: a.gamma,
        t: a.t,
        steps: a.steps,
        n_p: a.np,
        schrod_half_width: a.r,
        lchs_half_width: a.r,
        nodes: a.nodes,
        kernel,
        budgets,
        lchs_samples: a.samples,
        exact: cli.exact,
        seed: cli.seed,
    };
    cfg.validate()?;
    if let Some(g) = tfim_problem(&cfg)?.growth_rate().filter(|g| *g > 1e-10) {
        eprintln!("warning: Hermitian part has eigenvalue {g:.3e} > 0; the solution may grow");
    }
    let mut r = run_tfim(&cfg)?;
    match a.method {
        Method::Schrod => r.rows.retain(|row| row.method == "schrod"),
        Method::Lchs => r.rows.retain(|row| row.method == "lchs"),
        Method::Both => {}
    }
    Ok(TfimResult::csv(&r))
}

fn resources(cli: &Cli, a: &ResourceArgs) -> Result<String> {
    exact_only(cli, "resources")?;
    let base = match a.model {
        ModelArg::Advection => ResourceConfig::advection(),
        ModelArg::Nonlinear => ResourceConfig::nonlinear(),
    };
    let cfg = ResourceConfig {
        model: if a.model == ModelArg::Advection { Model::Advection } else { Model::Nonlinear },
        sizes: a.sizes.clone(),
        encodings: a.encoding.clone(),
        eps: a.eps,
        t: a.t.unwrap_or(base.t),
        n_p: a.np,
        half_width: a.r,
        n_x: a.nx,
        ..base
    };
    Ok(resource_csv(&run_resources(&cfg)?))
}

fn run(cli: &Cli) -> Result<()> {
    let csv = match &cli.command {
        Command::Advection(a) => advection(cli, a)?,
        Command::Levelset(a) => levelset(cli, a)?,
        Command::TfimCompare(a) => tfim(cli, a)?,
        Command::Resources(a) => resources(cli, a)?,
    };
    match &cli.out {
        Some(path) => fs::write(path, csv).map_err(|e| Error::invalid(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{csv}");
            Ok(())
        }
    }
}

fn exit_code(result: &Result<()>) -> u8 {
    match result {
        Ok(()) => 0,
        Err(e) if e.is_numerical() => 3,
        Err(_) => 2,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = run(&cli);
    if let Err(e) = &result {
        eprintln!("error: {e}");
    }
    ExitCode::from(exit_code(&result))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(args: &[&str]) -> Cli {
        Cli::try_parse_from(std::iter::once("hembed").chain(args.iter().copied())).expect("valid arguments")
    }

    fn csv(args: &[&str]) -> String {
        let path = std::env::temp_dir().join(format!("hembed-{}-{}.csv", std::process::id(), args.join("_").replace(['/', ','], "-")));
        let mut full: Vec<&str> = vec!["--out", path.to_str().expect("utf-8 path")];
        full.extend_from_slice(args);
        run(&parse(&full)).expect("run");
        let text = fs::read_to_string(&path).expect("csv written");
        fs::remove_file(&path).ok();
        text
    }

    #[test]
    fn subcommands_emit_their_csv_schema() {
        let cases: [(&[&str], &str); 4] = [
            (&["advection", "--n", "4", "--times", "0,0.1"], "t,x1,x2,prob"),
            (&["levelset", "--nx", "2", "--nq", "8"], "x1,x2,u_decoded,u_oracle,flag"),
            (&["--exact", "tfim-compare", "--n", "2", "--nodes", "32"], "method,value,stderr,circuits,shots,seed"),
            (&["resources", "--model", "nonlinear", "--sizes", "8", "--nx", "2"], "encoding,N,depth2q,count2q,count1q,preset"),
        ];
        for (args, want) in cases {
            assert_eq!(csv(args).lines().next(), Some(want), "{args:?}");
        }
    }

    #[test]
    fn exit_codes_separate_validation_from_numerical_guards() {
        for args in [
            &["advection", "--n", "2"][..],
            &["levelset", "--shots", "10"],
            &["tfim-compare", "--n", "11"],
            &["tfim-compare", "--beta", "1.5"],
            &["resources", "--sizes", "4"],
        ] {
            assert_eq!(exit_code(&run(&parse(args))), 2, "{args:?}");
        }
        assert_eq!(exit_code(&run(&parse(&["advection", "--n", "16"]))), 3);
        assert!(Cli::try_parse_from(["hembed", "advection", "--encoding", "ternary"]).is_err());
        assert!(Cli::try_parse_from(["hembed", "--exact", "--shots", "5", "levelset"]).is_err());
    }

    #[test]
    fn method_filter_keeps_oracle_row() {
        let text = csv(&["--exact", "tfim-compare", "--n", "2", "--nodes", "32", "--method", "lchs"]);
        let methods: Vec<&str> = text.lines().skip(1).map(|l| l.split(',').next().unwrap_or("")).collect();
        assert_eq!(methods, vec!["oracle", "lchs"]);
    }
}
