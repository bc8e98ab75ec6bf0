//! Command-line frontend: constructs the base codes, reproduces the code
//! family summary table, emits stabilizer data, runs the exact reduction
//! simulation, and bundles the whole verification suite.
//!
//! Exit codes: 0 success, 2 usage or domain error, 3 internal assertion
//! failure, 4 mismatch against the embedded reference table.

use std::fmt::Write as _;
use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use serde_json::{json, Value};

use triorth::code::{
    construct_base_code, distance_certificate, gen_matrix_binary, gen_matrix_csv, is_triorthogonal,
    is_triorthogonal_sampled, CodeError, TriorthogonalityReport,
};
use triorth::css::build_css;
use triorth::func_field::{
    check_triorthogonality_condition, divisor_of_differential, eta0_differential,
    ramification_places, Divisor,
};
use triorth::gf::QuadraticExtension;
use triorth::reduce::{
    plan_reduction, simulate_reduction, trace_identity_check, IdentityMode, OutcomeMode,
};
use triorth::tower::{
    classical_params, optimize_k, quantum_params, rate_3dp, table3, tvz_check, verify_table3,
    Table3Reference, TowerError, TowerLevel,
};

const EXIT_DOMAIN: u8 = 2;
const EXIT_INTERNAL: u8 = 3;
const EXIT_REFERENCE_MISMATCH: u8 = 4;

#[derive(Parser)]
#[command(name = "triorth", version, about = "triorthogonal code family toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum OutputFormat {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Construct the base code over GF(r^2) and write its generator matrix,
    /// triorthogonality report and distance certificate.
    Construct(ConstructArgs),
    /// Quantum code parameters: single codes, stabilizer data, or the full
    /// summary table with optional verification against the embedded
    /// reference values.
    Quantum(QuantumArgs),
    /// Run the complete verification suite.
    VerifyAll(VerifyArgs),
    /// Simulate the |CCZ> reduction circuit and report fidelities.
    ReduceSim(ReduceArgs),
    /// Plan the distill-and-reduce route to |CCZ> on a 2^n-dimensional qudit.
    Plan(PlanArgs),
}

#[derive(Args)]
struct ConstructArgs {
    /// Field parameter r = 2^m, m >= 3.
    #[arg(long)]
    r: u64,
    /// Seed for the randomized triorthogonality sampling on large codes.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value = "json")]
    format: OutputFormat,
    /// Output directory; files go to `.` when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct QuantumArgs {
    /// Emit the full (r, j) summary table.
    #[arg(long)]
    table3: bool,
    /// Compare the computed table against the reference values; any cell
    /// mismatch exits with code 4.
    #[arg(long)]
    verify_table3: bool,
    /// Override the embedded reference table (testing hook).
    #[arg(long)]
    fixture: Option<PathBuf>,
    #[arg(long)]
    r: Option<u64>,
    #[arg(long)]
    j: Option<u32>,
    /// Number of logical qudits; the gamma-optimal K is chosen when omitted.
    #[arg(long)]
    k: Option<u64>,
    /// Emit the explicit (X, Z) stabilizer matrices (level j = 0 only).
    #[arg(long)]
    emit_stabilizers: bool,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value = "json")]
    format: OutputFormat,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Override the embedded reference table (testing hook).
    #[arg(long)]
    fixture: Option<PathBuf>,
    /// Also write the full JSON report here.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ReduceArgs {
    #[arg(long)]
    r: u64,
    /// `all`, `sample`, or a fixed outcome `a,b,c` (decimal labels).
    #[arg(long, default_value = "all")]
    outcomes: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct PlanArgs {
    /// Target qudit dimension exponent: the plan reaches |CCZ> on 2^n.
    #[arg(long)]
    n: u32,
    #[arg(long)]
    out: Option<PathBuf>,
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn domain(message: impl Into<String>) -> Failure {
        Failure {
            code: EXIT_DOMAIN,
            message: message.into(),
        }
    }

    fn internal(message: impl Into<String>) -> Failure {
        Failure {
            code: EXIT_INTERNAL,
            message: message.into(),
        }
    }

    fn mismatch(message: impl Into<String>) -> Failure {
        Failure {
            code: EXIT_REFERENCE_MISMATCH,
            message: message.into(),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Construct(args) => cmd_construct(args),
        Command::Quantum(args) => cmd_quantum(args),
        Command::VerifyAll(args) => cmd_verify_all(args),
        Command::ReduceSim(args) => cmd_reduce_sim(args),
        Command::Plan(args) => cmd_plan(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            eprintln!("error: {}", failure.message);
            ExitCode::from(failure.code)
        }
    }
}

fn write_file(dir: &Option<PathBuf>, name: &str, bytes: &[u8]) -> Result<PathBuf, Failure> {
    let dir = dir.clone().unwrap_or_else(|| PathBuf::from("."));
    fs::create_dir_all(&dir)
        .map_err(|e| Failure::domain(format!("cannot create {}: {e}", dir.display())))?;
    let path = dir.join(name);
    fs::write(&path, bytes)
        .map_err(|e| Failure::domain(format!("cannot write {}: {e}", path.display())))?;
    Ok(path)
}

fn write_or_print(out: &Option<PathBuf>, content: &str) -> Result<(), Failure> {
    match out {
        Some(path) => {
            if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
                fs::create_dir_all(parent).map_err(|e| {
                    Failure::domain(format!("cannot create {}: {e}", parent.display()))
                })?;
            }
            fs::write(path, content)
                .map_err(|e| Failure::domain(format!("cannot write {}: {e}", path.display())))
        }
        None => {
            println!("{content}");
            Ok(())
        }
    }
}

fn triorthogonality_json(report: &TriorthogonalityReport) -> Value {
    json!({
        "is_triorthogonal": report.is_triorthogonal,
        "checked_triples": report.checked_triples,
        "checked_pairs": report.checked_pairs,
        "violation": report.violation.as_ref().map(|v| format!("{v:?}")),
    })
}

fn cmd_construct(args: ConstructArgs) -> Result<(), Failure> {
    let base = construct_base_code(args.r).map_err(|e| match e {
        CodeError::UnsupportedBaseParameter(_) => Failure::domain(e.to_string()),
        other => Failure::internal(other.to_string()),
    })?;
    let code = &base.ag.code;
    // Exhaustive triple scan up to k = 19 (r = 8); seeded sampling beyond.
    let report = if code.k() <= 19 {
        is_triorthogonal(code)
    } else {
        is_triorthogonal_sampled(code, 10_000, args.seed)
    };
    if !report.is_triorthogonal {
        return Err(Failure::internal(format!(
            "base code failed triorthogonality: {:?}",
            report.violation
        )));
    }
    let cert = distance_certificate(&base.ag).map_err(|e| Failure::internal(e.to_string()))?;
    let eta_json = base.eta_divisor.json(base.ext.big());
    let summary = json!({
        "r": args.r,
        "q": code.q(),
        "n": code.n(),
        "k": code.k(),
        "deg_g": base.ag.deg_g(),
        "triorthogonality": triorthogonality_json(&report),
        "distance": {
            "lower": cert.lower,
            "upper": cert.upper,
            "exact": cert.exact,
        },
        "eta_divisor": eta_json,
        "divisor_condition": check_triorthogonality_condition(
            &base.ag.g_divisor,
            &base.d_divisor,
            &base.eta_divisor,
        ),
    });
    let gen_name = format!("generator_r{}.csv", args.r);
    write_file(&args.out, &gen_name, gen_matrix_csv(code).as_bytes())?;
    let bin_name = format!("generator_r{}.bin", args.r);
    write_file(&args.out, &bin_name, &gen_matrix_binary(code))?;
    let report_body = match args.format {
        OutputFormat::Json => serde_json::to_string_pretty(&summary).unwrap(),
        OutputFormat::Csv => {
            let mut s = String::from("r,q,n,k,deg_g,triorthogonal,d_lower,d_upper,exact\n");
            let _ = writeln!(
                s,
                "{},{},{},{},{},{},{},{},{}",
                args.r,
                code.q(),
                code.n(),
                code.k(),
                base.ag.deg_g(),
                report.is_triorthogonal,
                cert.lower,
                cert.upper,
                cert.exact
            );
            s
        }
    };
    let ext = match args.format {
        OutputFormat::Json => "json",
        OutputFormat::Csv => "csv",
    };
    let report_path = write_file(
        &args.out,
        &format!("report_r{}.{ext}", args.r),
        report_body.as_bytes(),
    )?;
    println!(
        "[{}, {}, {}]_{} triorthogonal code written; report at {}",
        code.n(),
        code.k(),
        cert.lower,
        code.q(),
        report_path.display()
    );
    Ok(())
}

fn load_reference(fixture: &Option<PathBuf>) -> Result<Table3Reference, Failure> {
    match fixture {
        None => Ok(Table3Reference::embedded()),
        Some(path) => {
            let text = fs::read_to_string(path)
                .map_err(|e| Failure::domain(format!("cannot read {}: {e}", path.display())))?;
            Table3Reference::parse(&text)
                .map_err(|e| Failure::domain(format!("bad reference table: {e}")))
        }
    }
}

fn table_rows_json(rows: &[triorth::tower::TableRow]) -> Value {
    Value::Array(
        rows.iter()
            .map(|row| {
                let p = &row.params;
                json!({
                    "r": p.r,
                    "j": p.j,
                    "n_phys": p.n_phys.to_string(),
                    "k_log": p.k_log.to_string(),
                    "d_lower": p.d_lower.to_string(),
                    "d_x_lower": p.d_x_lower.to_string(),
                    "rate": rate_3dp(&p.k_log, &p.n_phys),
                    "gamma_max": format!("{:.3}", p.gamma_max),
                    "beyond_reference": row.beyond_reference,
                })
            })
            .collect(),
    )
}

fn table_rows_csv(rows: &[triorth::tower::TableRow]) -> String {
    let mut s = String::from("r,j,n_phys,k_log,d_lower,rate,gamma_max,beyond_reference\n");
    for row in rows {
        let p = &row.params;
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{:.3},{}",
            p.r,
            p.j,
            p.n_phys,
            p.k_log,
            p.d_lower,
            rate_3dp(&p.k_log, &p.n_phys),
            p.gamma_max,
            row.beyond_reference
        );
    }
    s
}

fn cmd_quantum(args: QuantumArgs) -> Result<(), Failure> {
    if args.table3 {
        let rows = table3(&[8, 16, 32], 0..=4);
        let body = match args.format {
            OutputFormat::Json => serde_json::to_string_pretty(&table_rows_json(&rows)).unwrap(),
            OutputFormat::Csv => table_rows_csv(&rows),
        };
        write_or_print(&args.out, &body)?;
        if args.verify_table3 {
            let reference = load_reference(&args.fixture)?;
            let mismatches = verify_table3(&reference);
            if mismatches.is_empty() {
                println!("table3 verified: all {} rows match", reference.rows.len());
            } else {
                let mut msg = String::from("table3 mismatches:\n");
                for m in &mismatches {
                    let _ = writeln!(
                        msg,
                        "  (r={}, j={}) {}: expected {}, computed {}",
                        m.r, m.j, m.column, m.expected, m.computed
                    );
                }
                return Err(Failure::mismatch(msg));
            }
        }
        return Ok(());
    }

    let (Some(r), Some(j)) = (args.r, args.j) else {
        return Err(Failure::domain(
            "quantum requires --table3 or both --r and --j",
        ));
    };
    let level = TowerLevel::new(r, j).map_err(|e| Failure::domain(e.to_string()))?;
    let params = match args.k {
        Some(k) => quantum_params(level, &BigInt::from(k)).map_err(|e| match e {
            TowerError::InvalidK { .. } => Failure::domain(e.to_string()),
            other => Failure::internal(other.to_string()),
        })?,
        None => optimize_k(level).ok_or_else(|| {
            Failure::domain(format!(
                "no valid K at r={r}, j={j} (levels whose parameters exceed 128 bits \
                 need an explicit --k)"
            ))
        })?,
    };
    let cp = classical_params(level).map_err(|e| Failure::internal(e.to_string()))?;
    let mut out = json!({
        "r": r,
        "j": j,
        "classical": {
            "n": cp.n.to_string(),
            "k": cp.k.to_string(),
            "d_lower": cp.d_lower.to_string(),
            "d_lower_rounded": cp.d_lower_rounded.to_string(),
        },
        "n_phys": params.n_phys.to_string(),
        "k_log": params.k_log.to_string(),
        "d_lower": params.d_lower.to_string(),
        "d_x_lower": params.d_x_lower.to_string(),
        "rate": rate_3dp(&params.k_log, &params.n_phys),
        "gamma_max": format!("{:.3}", params.gamma_max),
    });
    if args.emit_stabilizers {
        if j != 0 {
            return Err(Failure::domain(
                "explicit stabilizer matrices exist only at level j = 0",
            ));
        }
        let base = construct_base_code(r).map_err(|e| Failure::domain(e.to_string()))?;
        let k_log = params
            .k_log
            .to_string()
            .parse::<usize>()
            .map_err(|e| Failure::internal(e.to_string()))?;
        let css = build_css(&base.ag.code, k_log, base.ag.deg_g(), 0)
            .map_err(|e| Failure::internal(e.to_string()))?;
        out["css"] = css.json();
    }
    write_or_print(&args.out, &serde_json::to_string_pretty(&out).unwrap())
}

struct CheckOutcome {
    name: &'static str,
    passed: bool,
    detail: String,
    mismatch: bool,
}

fn cmd_verify_all(args: VerifyArgs) -> Result<(), Failure> {
    let mut checks: Vec<CheckOutcome> = Vec::new();

    // Canonical divisor identity and the triorthogonality condition.
    for r in [8u64, 16, 32] {
        let ext = QuadraticExtension::new(r.trailing_zeros())
            .map_err(|e| Failure::internal(e.to_string()))?;
        let eta = divisor_of_differential(ext.big(), &eta0_differential(&ext))
            .map_err(|e| Failure::internal(e.to_string()))?;
        let d0 = triorth::func_field::divisor_d0(&ext);
        let g0 = triorth::func_field::divisor_g0(&ext);
        let expected = d0.neg().add(&Divisor::from_entries(
            ramification_places(&ext)
                .into_iter()
                .map(|p| (p, (r - 2) as i64)),
        ));
        let identity = eta == expected && eta.degree() == -2;
        checks.push(CheckOutcome {
            name: "eta0-divisor",
            passed: identity,
            detail: format!("r={r}: degree {}", eta.degree()),
            mismatch: false,
        });
        let condition = check_triorthogonality_condition(&g0, &d0, &eta);
        checks.push(CheckOutcome {
            name: "divisor-condition",
            passed: condition,
            detail: format!("r={r}"),
            mismatch: false,
        });
    }

    // Exhaustive triorthogonality of the r = 8 base code.
    {
        let base = construct_base_code(8).map_err(|e| Failure::internal(e.to_string()))?;
        let report = is_triorthogonal(&base.ag.code);
        checks.push(CheckOutcome {
            name: "triorthogonality-r8",
            passed: report.is_triorthogonal && report.checked_triples == 6859,
            detail: format!("{} triples", report.checked_triples),
            mismatch: false,
        });
    }

    // Asymptotic bound comparisons.
    for r in [8u64, 16, 32] {
        let rep = tvz_check(r).map_err(|e| Failure::internal(e.to_string()))?;
        checks.push(CheckOutcome {
            name: "tvz-gv-bounds",
            passed: rep.sum_meets_closed_form && rep.exceeds_tvz && rep.exceeds_gv,
            detail: format!(
                "r={r}: tvz margin {}, gv margin {:.4}",
                rep.tvz_margin, rep.gv_margin
            ),
            mismatch: false,
        });
    }

    // Trace identity.
    for r in [2u64, 4, 8] {
        let rep = trace_identity_check(r, IdentityMode::Exhaustive)
            .map_err(|e| Failure::internal(e.to_string()))?;
        checks.push(CheckOutcome {
            name: "trace-identity-exhaustive",
            passed: rep.holds,
            detail: format!("r={r}: {} triples", rep.triples_checked),
            mismatch: false,
        });
    }
    for r in [16u64, 32] {
        let rep = trace_identity_check(
            r,
            IdentityMode::Sampled {
                samples: 1_000_000,
                seed: args.seed,
            },
        )
        .map_err(|e| Failure::internal(e.to_string()))?;
        checks.push(CheckOutcome {
            name: "trace-identity-sampled",
            passed: rep.holds,
            detail: format!("r={r}: {} samples", rep.triples_checked),
            mismatch: false,
        });
    }

    // Reduction simulation over every outcome.
    for r in [2u64, 4, 8] {
        let rep = simulate_reduction(r, OutcomeMode::All)
            .map_err(|e| Failure::internal(e.to_string()))?;
        checks.push(CheckOutcome {
            name: "reduction-simulation",
            passed: rep.all_pass,
            detail: format!(
                "r={r}: {} outcomes, variant {:?}",
                rep.outcomes.len(),
                rep.variant
            ),
            mismatch: false,
        });
    }

    // Planner budgets.
    {
        let mut ok = true;
        for n in 1..=64 {
            let p = plan_reduction(n);
            ok &= p.totals.measurements <= 9
                && p.totals.single_qudit <= 12
                && p.totals.two_qudit <= 9;
        }
        let exact = plan_reduction(1).totals
            == triorth::reduce::GateTotals {
                measurements: 9,
                single_qudit: 12,
                two_qudit: 9,
            };
        checks.push(CheckOutcome {
            name: "plan-budgets",
            passed: ok && exact,
            detail: "n in 1..=64".into(),
            mismatch: false,
        });
    }

    // Reference table.
    {
        let reference = load_reference(&args.fixture)?;
        let mismatches = verify_table3(&reference);
        checks.push(CheckOutcome {
            name: "table3",
            passed: mismatches.is_empty(),
            detail: if mismatches.is_empty() {
                format!("{} rows", reference.rows.len())
            } else {
                format!("{} mismatched cells", mismatches.len())
            },
            mismatch: !mismatches.is_empty(),
        });
    }

    let mut first_failure: Option<&CheckOutcome> = None;
    for check in &checks {
        println!(
            "{} {:<28} {}",
            if check.passed { "ok  " } else { "FAIL" },
            check.name,
            check.detail
        );
        if !check.passed && first_failure.is_none() {
            first_failure = Some(check);
        }
    }
    if let Some(path) = &args.out {
        let tvz: Vec<Value> = [8u64, 16, 32]
            .iter()
            .map(|&r| tvz_check(r).map(|rep| rep.json()))
            .collect::<Result<_, _>>()
            .map_err(|e| Failure::internal(e.to_string()))?;
        let report = json!({
            "seed": args.seed,
            "checks": checks
                .iter()
                .map(|c| json!({"name": c.name, "passed": c.passed, "detail": c.detail}))
                .collect::<Vec<_>>(),
            "bounds": tvz,
        });
        write_or_print(
            &Some(path.clone()),
            &serde_json::to_string_pretty(&report).unwrap(),
        )?;
    }
    match first_failure {
        None => Ok(()),
        Some(check) if check.mismatch => {
            Err(Failure::mismatch(format!("check failed: {}", check.name)))
        }
        Some(check) => Err(Failure::internal(format!("check failed: {}", check.name))),
    }
}

fn cmd_reduce_sim(args: ReduceArgs) -> Result<(), Failure> {
    let mode = match args.outcomes.as_str() {
        "all" => OutcomeMode::All,
        "sample" => OutcomeMode::Sample {
            seed: args.seed,
            count: 8,
        },
        fixed => {
            let labels: Vec<u32> = fixed
                .split(',')
                .map(|s| s.trim().parse::<u32>())
                .collect::<Result<_, _>>()
                .map_err(|_| {
                    Failure::domain("outcomes must be `all`, `sample`, or `a,b,c` labels")
                })?;
            if labels.len() != 3 || labels.iter().any(|&l| l as u64 >= args.r) {
                return Err(Failure::domain(
                    "fixed outcomes need exactly three labels below r",
                ));
            }
            OutcomeMode::Fixed(labels[0], labels[1], labels[2])
        }
    };
    let report = simulate_reduction(args.r, mode).map_err(|e| Failure::domain(e.to_string()))?;
    let body = serde_json::to_string_pretty(&report).unwrap();
    write_or_print(&args.out, &body)?;
    if report.all_pass {
        Ok(())
    } else {
        Err(Failure::internal(
            "reduction simulation fell below fidelity one",
        ))
    }
}

fn cmd_plan(args: PlanArgs) -> Result<(), Failure> {
    if args.n < 1 {
        return Err(Failure::domain("target exponent n must be at least 1"));
    }
    let plan = plan_reduction(args.n);
    let dim_string = |log2: u32| -> String {
        if log2 <= 127 {
            (1u128 << log2).to_string()
        } else {
            format!("2^{log2}")
        }
    };
    let body = json!({
        "n": plan.n,
        "target_dim": dim_string(plan.n),
        "distill_log2": plan.distill_log2,
        "distill_dim": dim_string(plan.distill_log2),
        "reduction_chain": plan
            .reduction_chain_log2
            .iter()
            .map(|&l| dim_string(l))
            .collect::<Vec<_>>(),
        "totals": {
            "measurements": plan.totals.measurements,
            "single_qudit": plan.totals.single_qudit,
            "two_qudit": plan.totals.two_qudit,
        },
    });
    write_or_print(&args.out, &serde_json::to_string_pretty(&body).unwrap())
}
