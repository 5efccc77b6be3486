use std::io::Write;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use msym_core::exact_arith::{gaussian_binomial, GaussianParams, Prime};
use msym_core::fgl::{socle_nonvanishing_check, FormalGroupLaw};
use msym_core::lattice_count::{enumerate_sublattices, lattices_json, LatticeIndexSpec, DEFAULT_BUDGET};
use msym_core::pseries::{CoeffRing, Coefficients, TruncSeries};
use msym_core::subgroup_basis::{generate_basis_kl, FamilyParams};
use msym_core::sym_rank::{enumerate_orbit_types, rank_table};
use msym_core::verify::{self, GridOptions, Suite};
use msym_core::Error;

#[derive(Parser)]
#[command(name = "msym", version, about = "Exact algebra for the Morava E-theory of symmetric groups")]
struct Cli {
    /// Output format
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Enumeration budget
    #[arg(long, global = true, default_value_t = DEFAULT_BUDGET)]
    budget: u64,
    /// Widen the verification grid
    #[arg(long, global = true)]
    extended: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Csv,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Gaussian binomial coefficient d̄(k) = #subgroups of order p^k in (Q_p/Z_p)^n
    Gbin {
        #[arg(long, value_parser = parse_prime)]
        p: Prime,
        #[arg(long)]
        n: u32,
        #[arg(long)]
        k: u32,
    },
    /// Sublattices of index p^k in Z_p^n, in Hermite normal form
    Lattices {
        #[arg(long, value_parser = parse_prime)]
        p: Prime,
        #[arg(long)]
        n: u32,
        #[arg(long)]
        k: u32,
    },
    /// Ranks d(k) of E^0 B Sigma_k for k <= kmax
    Rank {
        #[arg(long, value_parser = parse_prime)]
        p: Prime,
        #[arg(long)]
        n: u32,
        #[arg(long)]
        kmax: u32,
    },
    /// Monomial basis of the ring of subgroups of order p^m
    Basis {
        #[arg(long, value_parser = parse_prime)]
        p: Prime,
        #[arg(long)]
        n: u32,
        #[arg(long)]
        m: u32,
        /// Generate C_{kl} instead of C
        #[arg(long, num_args = 2, value_names = ["K", "L"])]
        kl: Option<Vec<u32>>,
        /// Write a_j as the Chern class c_{p^m - p^j}
        #[arg(long)]
        chern: bool,
    },
    /// Formal group law computations
    Fgl(FglArgs),
    /// Run the verification grid
    Verify {
        #[arg(value_enum, default_value_t = SuiteArg::All)]
        suite: SuiteArg,
        #[arg(long, value_parser = parse_prime)]
        p: Option<Prime>,
        #[arg(long)]
        height: Option<u32>,
        /// Include per-cell wall time
        #[arg(long)]
        timing: bool,
    },
}

#[derive(Args)]
#[command(args_conflicts_with_subcommands = true)]
struct FglArgs {
    #[command(subcommand)]
    action: Option<FglAction>,
    #[arg(long = "type", value_enum, default_value_t = FglType::Honda)]
    kind: FglType,
    #[arg(long, value_parser = parse_prime)]
    p: Option<Prime>,
    #[arg(long, default_value_t = 1)]
    height: u32,
    /// Truncation order (raised to p^n + p for Honda laws)
    #[arg(long, default_value_t = 0)]
    order: u32,
    /// Coefficients in Z/p^a for additive and multiplicative laws
    #[arg(long, default_value_t = 1)]
    exponent: u32,
    #[arg(long, value_enum, default_value_t = Emit::PSeries)]
    emit: Emit,
}

#[derive(Subcommand)]
enum FglAction {
    /// Check c^{(p^n-1)/(p-1)} != 0 in F_q[x]/x^{p^n}; exits 1 if it vanishes
    Check {
        #[arg(long, required = true)]
        socle: bool,
        #[arg(long, value_parser = parse_prime)]
        p: Prime,
        #[arg(long)]
        height: u32,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum FglType {
    Honda,
    Additive,
    Multiplicative,
}

#[derive(Clone, Copy, ValueEnum)]
enum Emit {
    PSeries,
    Sum,
    EulerU,
}

#[derive(Clone, Copy, ValueEnum)]
enum SuiteArg {
    All,
    Arith,
    Lattices,
    Ranks,
    Fgl,
    Basis,
}

impl SuiteArg {
    fn suites(self) -> Vec<Suite> {
        match self {
            SuiteArg::All => Suite::ALL.to_vec(),
            SuiteArg::Arith => vec![Suite::Arith],
            SuiteArg::Lattices => vec![Suite::Lattices],
            SuiteArg::Ranks => vec![Suite::Ranks],
            SuiteArg::Fgl => vec![Suite::Fgl],
            SuiteArg::Basis => vec![Suite::Basis],
        }
    }
}

fn parse_prime(s: &str) -> Result<Prime, String> {
    let v: u64 = s.parse().map_err(|e| format!("{e}"))?;
    Prime::new(v).map_err(|e| e.to_string())
}

/// What a command produced: text for stdout and the process status.
struct Output {
    text: String,
    status: u8,
}

impl Output {
    fn ok(text: String) -> Self {
        Output { text, status: 0 }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(out) => {
            let mut stdout = std::io::stdout().lock();
            // a closed pipe is not worth a panic
            let _ = stdout.write_all(out.text.as_bytes());
            ExitCode::from(out.status)
        }
        Err(e) => {
            eprintln!("msym: {e}");
            ExitCode::from(match e {
                Error::Domain(_) => 2,
                Error::Budget { .. } => 3,
                _ => 1,
            })
        }
    }
}

fn json_line(v: &Value) -> String {
    format!("{v}\n")
}

fn run(cli: &Cli) -> msym_core::Result<Output> {
    let format = cli.format;
    match &cli.command {
        Command::Gbin { p, n, k } => {
            let value = gaussian_binomial(GaussianParams::new(*p, *n, *k)?);
            Ok(Output::ok(match format {
                Format::Json => json_line(&json!({"p": p.get(), "n": n, "k": k, "value": value.to_string()})),
                Format::Csv => format!("p,n,k,value\n{},{n},{k},{value}\n", p.get()),
                Format::Text => format!("{value}\n"),
            }))
        }
        Command::Lattices { p, n, k } => {
            let spec = LatticeIndexSpec::new(*p, *n, *k)?;
            let lattices = enumerate_sublattices(spec, cli.budget)?;
            Ok(Output::ok(match format {
                Format::Json => json_line(&lattices_json(spec, &lattices)),
                Format::Csv => {
                    let mut s = String::from("index,entries\n");
                    for (i, l) in lattices.iter().enumerate() {
                        let flat: Vec<String> = l.flattened().iter().map(u64::to_string).collect();
                        s.push_str(&format!("{i},{}\n", flat.join(" ")));
                    }
                    s
                }
                Format::Text => lattices
                    .iter()
                    .map(|l| {
                        let rows: Vec<String> = l
                            .rows()
                            .iter()
                            .map(|r| r.iter().map(u64::to_string).collect::<Vec<_>>().join(" "))
                            .collect();
                        format!("[{}]\n", rows.join("; "))
                    })
                    .collect(),
            }))
        }
        Command::Rank { p, n, kmax } => {
            let table = rank_table(*kmax, *p, *n);
            Ok(Output::ok(match format {
                Format::Json => {
                    let mut rows = Vec::new();
                    for (k, d) in table.iter().enumerate() {
                        let types = enumerate_orbit_types(k as u32, *p, *n, cli.budget)?;
                        let witnesses: Vec<Value> = types
                            .iter()
                            .map(|t| {
                                let orbits: Vec<Value> = t
                                    .entries()
                                    .iter()
                                    .map(|&(j, c)| json!({"size_exponent": j, "stabilizer": c}))
                                    .collect();
                                Value::Array(orbits)
                            })
                            .collect();
                        rows.push(json!({"k": k, "d": d.to_string(), "orbit_types": witnesses}));
                    }
                    json_line(&json!({"p": p.get(), "n": n, "ranks": rows}))
                }
                Format::Csv => {
                    let mut s = String::from("k,d(k)\n");
                    for (k, d) in table.iter().enumerate() {
                        s.push_str(&format!("{k},{d}\n"));
                    }
                    s
                }
                Format::Text => table.iter().enumerate().map(|(k, d)| format!("d({k}) = {d}\n")).collect(),
            }))
        }
        Command::Basis { p, n, m, kl, chern } => {
            let params = match kl.as_deref() {
                Some([k, l]) => FamilyParams::new(*k, *l, *m, *n, *p)?,
                _ => FamilyParams::main(*m, *n, *p)?,
            };
            let basis = generate_basis_kl(&params)?;
            let label = |b: &msym_core::subgroup_basis::BasisMonomial| {
                if *chern {
                    b.render_chern(*p)
                } else {
                    b.render()
                }
            };
            Ok(Output::ok(match format {
                Format::Json => {
                    let items: Vec<Value> = basis
                        .iter()
                        .map(|b| {
                            let mut v = b.to_json();
                            v["string"] = json!(label(b));
                            v
                        })
                        .collect();
                    json_line(&Value::Array(items))
                }
                Format::Csv => {
                    let mut s = String::from("mu,nu,alpha,total,string\n");
                    for b in &basis {
                        let join = |v: &[u64]| v.iter().map(u64::to_string).collect::<Vec<_>>().join(" ");
                        let mu: Vec<u64> = b.pair.mu.iter().map(|&x| u64::from(x)).collect();
                        let nu: Vec<u64> = b.pair.nu.iter().map(|&x| u64::from(x)).collect();
                        s.push_str(&format!(
                            "{},{},{},{},{}\n",
                            join(&mu),
                            join(&nu),
                            join(&b.alpha),
                            join(&b.total),
                            label(b)
                        ));
                    }
                    s
                }
                Format::Text => basis.iter().map(|b| format!("{}\n", label(b))).collect(),
            }))
        }
        Command::Fgl(args) => run_fgl(args, format),
        Command::Verify { suite, p, height, timing } => {
            let opts = GridOptions { extended: cli.extended, prime: *p, height: *height, budget: cli.budget };
            let report = verify::run(&suite.suites(), &opts);
            let text = match format {
                Format::Json => json_line(&report.to_json(*timing)),
                Format::Csv => report.render_csv(*timing),
                Format::Text => report.render_text(*timing),
            };
            Ok(Output { text, status: report.exit_code() as u8 })
        }
    }
}

fn emit_series(series: &TruncSeries, format: Format) -> String {
    match format {
        Format::Json => json_line(&series.to_json()),
        Format::Csv => {
            let mut s = String::from("exp,coeff\n");
            for (e, c) in series.terms() {
                let exp: Vec<String> = e.iter().map(u32::to_string).collect();
                s.push_str(&format!("{},{}\n", exp.join(" "), series.ring().render(c)));
            }
            s
        }
        Format::Text => format!("{}\n", series.render()),
    }
}

fn run_fgl(args: &FglArgs, format: Format) -> msym_core::Result<Output> {
    if let Some(FglAction::Check { p, height, .. }) = &args.action {
        let check = socle_nonvanishing_check(*p, *height)?;
        let text = match format {
            Format::Json => json_line(&json!({
                "p": p.get(),
                "height": height,
                "exponent": check.exponent.to_string(),
                "nonzero": check.nonzero,
                "power": check.power.to_json(),
            })),
            Format::Csv => format!("p,height,exponent,nonzero\n{},{height},{},{}\n", p.get(), check.exponent, check.nonzero),
            Format::Text => format!(
                "c^{} {} in F_{}^{}[x]/x^{}\n",
                check.exponent,
                if check.nonzero { "is nonzero" } else { "vanishes" },
                p.get(),
                height,
                p.get().pow(*height)
            ),
        };
        return Ok(Output { text, status: if check.nonzero { 0 } else { 1 } });
    }
    let p = args.p.ok_or_else(|| Error::Domain("--p is required".into()))?;
    let fgl = match args.kind {
        FglType::Honda => FormalGroupLaw::honda_default(p, args.height, args.order)?,
        FglType::Additive | FglType::Multiplicative => {
            let ring = CoeffRing::cyclic(p, args.exponent)?;
            let order = args.order.max(2);
            if matches!(args.kind, FglType::Additive) {
                FormalGroupLaw::additive(&ring, order)?
            } else {
                FormalGroupLaw::multiplicative(&ring, order)?
            }
        }
    };
    let series = match args.emit {
        Emit::PSeries => fgl.r_series(p.get())?,
        Emit::Sum => fgl.series().clone(),
        Emit::EulerU => fgl.euler_class_u_minus_1()?,
    };
    Ok(Output::ok(emit_series(&series, format)))
}
