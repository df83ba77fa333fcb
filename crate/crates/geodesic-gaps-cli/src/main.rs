//! `geogaps`: command-line front end for the geodesic-gaps library.
//!
//! Exit codes: 0 success, 2 precondition violation, 3 certification failure,
//! 64 unknown subcommand, 65 malformed input file.

use std::io::Write;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};
use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use serde_json::json;

use geodesic_gaps::arithmetic_subgroups::{
    congruence_gap_scan, gamma_n_witness, quaternion_gap_scan, quaternion_witness,
};
use geodesic_gaps::bouquet_liouville::{
    density_demo, liouville_construct, min_gap_scan, verify_small_gaps, CertifiedPair, DigitReal,
};
use geodesic_gaps::gap_sequences::{
    limit_gap_report, AscendingSequence, LimitGapConfig, Provenance, ValueKey,
};
use geodesic_gaps::metric_graph::{
    convergence_probe, degenerate, disk_grid, enumerate_geodesics, enumerate_geodesics_by_length,
    parse_decimal, rational_gap_check, right_grid, theta_graph, to_json, trace_identity_residual,
    x_a, x_a_contraction_limit, x_a_deletion_limit, zeta_det, zeta_product, Directive, MetricGraph,
};
use geodesic_gaps::modular_spectrum::{
    count_geodesics, gap_scan, limit_gap_estimate, spectrum, subgroup_monotonicity_check,
};
use geodesic_gaps::quadratic_orders::{class_number, count_units_below, Discriminant};
use geodesic_gaps::Error;

/// Certified significant digits printed for spectrum values and gaps.
const PRINT_DIGITS: usize = 12;

#[derive(Parser)]
#[command(name = "geogaps", version, about = "Length spectra of geometric primes and their gap statistics")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Args)]
struct Common {
    /// Output format.
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
    /// Write output to this file instead of stdout.
    #[arg(long)]
    out: Option<std::path::PathBuf>,
    /// Run the module's invariant self-test suite and exit.
    #[arg(long)]
    selftest: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Modular spectrum entries ε(a) for traces 3..=max-trace.
    Spectrum {
        #[arg(long)]
        max_trace: i64,
        #[command(flatten)]
        common: Common,
    },
    /// Gap statistics of the modular spectrum with the liminf-proxy report.
    Gaps {
        #[arg(long)]
        max_trace: i64,
        #[arg(long, default_value_t = 4)]
        tail_windows: usize,
        /// Also count geodesics with multiplicity up to this norm bound.
        #[arg(long)]
        count_to: Option<String>,
        #[command(flatten)]
        common: Common,
    },
    /// Γ(N) witness matrices and the congruence-progression gap scan.
    Congruence {
        #[arg(long)]
        level: i64,
        #[arg(long)]
        c_max: i64,
        #[command(flatten)]
        common: Common,
    },
    /// Quaternion-lattice witness reports and their gap scan.
    Quaternion {
        /// Comma-separated primes, e.g. 3,5.
        #[arg(long)]
        primes: String,
        #[arg(long)]
        c_max: i64,
        #[command(flatten)]
        common: Common,
    },
    /// Class number h(D) of a real quadratic discriminant.
    Classnum {
        #[arg(long)]
        disc: i64,
        #[command(flatten)]
        common: Common,
    },
    /// Metric-graph operations.
    Graph {
        #[command(subcommand)]
        op: GraphOp,
    },
    /// Two-loop bouquet Y_a operations.
    Bouquet {
        #[command(subcommand)]
        op: BouquetOp,
    },
}

#[derive(Subcommand)]
enum GraphOp {
    /// Ihara zeta det(1 − T_s) at the given s samples.
    Zeta {
        #[arg(long)]
        input: std::path::PathBuf,
        /// Complex sample "re,im"; repeatable.
        #[arg(long = "s", required = true)]
        samples: Vec<String>,
        #[command(flatten)]
        common: Common,
    },
    /// Closed geodesics up to a combinatorial or metric length bound.
    Geodesics {
        #[arg(long)]
        input: std::path::PathBuf,
        #[arg(long, conflicts_with = "length_cutoff")]
        n_max: Option<usize>,
        #[arg(long)]
        length_cutoff: Option<String>,
        #[command(flatten)]
        common: Common,
    },
    /// Truncated Euler product over primitive geodesics.
    Product {
        #[arg(long)]
        input: std::path::PathBuf,
        #[arg(long = "s", required = true)]
        samples: Vec<String>,
        #[arg(long, default_value_t = 14)]
        cutoff: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Apply contract/delete directives to edges.
    Degenerate {
        #[arg(long)]
        input: std::path::PathBuf,
        /// Edge id to contract; repeatable.
        #[arg(long = "contract")]
        contract: Vec<String>,
        /// Edge id to delete; repeatable.
        #[arg(long = "delete")]
        delete: Vec<String>,
        #[command(flatten)]
        common: Common,
    },
    /// Built-in X_a degeneration convergence probe.
    Converge {
        /// Which boundary of moduli space to approach.
        #[arg(long, value_parser = ["contract", "delete"])]
        family: String,
        #[command(flatten)]
        common: Common,
    },
    /// Rational-graph gap divergence check N(c')−N(c) ≥ θ·e^{l(c)}.
    Ratgap {
        #[arg(long)]
        input: std::path::PathBuf,
        #[arg(long, default_value = "1")]
        theta: String,
        #[arg(long)]
        cutoff: String,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Subcommand)]
enum BouquetOp {
    /// Minimal norm-gap scan over the (m,n) box.
    Scan {
        /// Digit stream, e.g. 0.693147… (or @FILE to read from a file).
        #[arg(long)]
        a: String,
        #[arg(long, default_value_t = 5)]
        m_max: u64,
        #[arg(long, default_value_t = 5)]
        n_max: u64,
        #[command(flatten)]
        common: Common,
    },
    /// Liouville-style digit-stream construction with certified pairs.
    Construct {
        #[arg(long)]
        seed: String,
        /// Gap bound C as a decimal, e.g. 0.001.
        #[arg(long = "C", alias = "c")]
        c: String,
        #[arg(long)]
        stages: usize,
        /// Also run the density demo over these comma-separated targets.
        #[arg(long)]
        targets: Option<String>,
        #[command(flatten)]
        common: Common,
    },
    /// Re-verify small gaps directly from a digit stream.
    Verify {
        /// Digit stream (or @FILE).
        #[arg(long)]
        a: String,
        #[arg(long = "C", alias = "c")]
        c: String,
        #[arg(long)]
        count: usize,
        #[arg(long, default_value_t = 0.0)]
        scale_floor: f64,
        #[command(flatten)]
        common: Common,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::InvalidSubcommand | ErrorKind::UnknownArgument => 64,
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = e.print();
                    return ExitCode::SUCCESS;
                }
                _ => 2,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            let code = match e {
                Error::Precondition(_) => 2,
                Error::Certification(_) => 3,
                Error::Parse(_) => 65,
                Error::Internal(_) => 70,
            };
            ExitCode::from(code)
        }
    }
}

fn emit(common: &Common, text: String) -> Result<(), Error> {
    match &common.out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| Error::Parse(format!("cannot write {}: {e}", path.display()))),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .map_err(|e| Error::Parse(format!("stdout: {e}")))
        }
    }
}

fn parse_complex(s: &str) -> Result<Complex64, Error> {
    let (re, im) = s
        .split_once(',')
        .ok_or_else(|| Error::Precondition(format!("expected re,im — got {s:?}")))?;
    let re: f64 = re
        .trim()
        .parse()
        .map_err(|_| Error::Precondition(format!("bad real part {re:?}")))?;
    let im: f64 = im
        .trim()
        .parse()
        .map_err(|_| Error::Precondition(format!("bad imaginary part {im:?}")))?;
    Ok(Complex64::new(re, im))
}

fn parse_rational(s: &str) -> Result<BigRational, Error> {
    match s.split_once('/') {
        Some((p, q)) => {
            let p: BigInt = p.trim().parse().map_err(|_| Error::Precondition(format!("bad numerator {p:?}")))?;
            let q: BigInt = q.trim().parse().map_err(|_| Error::Precondition(format!("bad denominator {q:?}")))?;
            Ok(BigRational::new(p, q))
        }
        None => parse_decimal(s).map_err(|_| Error::Precondition(format!("bad rational {s:?}"))),
    }
}

fn read_graph(path: &std::path::Path) -> Result<MetricGraph, Error> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Parse(format!("cannot read {}: {e}", path.display())))?;
    geodesic_gaps::metric_graph::from_json(&text)
}

fn read_digit_stream(spec: &str) -> Result<DigitReal, Error> {
    let text = match spec.strip_prefix('@') {
        Some(path) => std::fs::read_to_string(path)
            .map_err(|e| Error::Parse(format!("cannot read {path}: {e}")))?,
        None => spec.to_string(),
    };
    DigitReal::parse(text.trim())
}

fn complex_str(z: Complex64) -> String {
    format!("{:+.12e}{:+.12e}i", z.re, z.im)
}

fn pair_json(cp: &CertifiedPair) -> serde_json::Value {
    json!({
        "m": cp.pair.m.to_string(),
        "n": cp.pair.n.to_string(),
        "k": cp.pair.k.to_string(),
        "l": cp.pair.l.to_string(),
        "gapLower": cp.gap_lower,
        "gapUpper": cp.gap_upper,
        "scaleExponent": cp.scale_exponent.to_string(),
        "scale": cp.scale,
    })
}

fn run(cmd: Command) -> Result<(), Error> {
    match cmd {
        Command::Spectrum { max_trace, common } => {
            if common.selftest {
                return selftest_spectrum();
            }
            let entries = spectrum(max_trace)?;
            let bits = geodesic_gaps::precision::working_bits();
            let mut text = String::new();
            match common.format {
                Format::Csv => {
                    text.push_str("trace,value,multiplicity,digits_certified\n");
                    for e in &entries {
                        let v = geodesic_gaps::precision::certify_digits(
                            |b| e.value_interval(b),
                            PRINT_DIGITS,
                            bits,
                        )?;
                        text.push_str(&format!(
                            "{},{},{},{}\n",
                            e.trace,
                            v.decimal(PRINT_DIGITS),
                            e.multiplicity,
                            PRINT_DIGITS
                        ));
                    }
                }
                Format::Json => {
                    let rows: Vec<_> = entries
                        .iter()
                        .map(|e| {
                            let v = geodesic_gaps::precision::certify_digits(
                                |b| e.value_interval(b),
                                PRINT_DIGITS,
                                bits,
                            )?;
                            Ok(json!({
                                "trace": e.trace,
                                "b": e.b,
                                "d0": e.d0.value(),
                                "value": v.decimal(PRINT_DIGITS),
                                "multiplicity": e.multiplicity,
                                "digitsCertified": PRINT_DIGITS,
                            }))
                        })
                        .collect::<Result<_, Error>>()?;
                    text = serde_json::to_string_pretty(&json!({"entries": rows})).unwrap();
                    text.push('\n');
                }
            }
            emit(&common, text)
        }
        Command::Gaps { max_trace, tail_windows, count_to, common } => {
            if common.selftest {
                return selftest_gaps();
            }
            let (min_gap, cert) = limit_gap_estimate(max_trace)?;
            let seq = AscendingSequence::new(
                (3..=max_trace)
                    .map(|a| (ValueKey::Unit { trace: a }, Provenance::Trace(a)))
                    .collect(),
            )?;
            let report = limit_gap_report(&seq, tail_windows, &LimitGapConfig::default())?;
            let counting = match &count_to {
                Some(x) => {
                    let x = parse_rational(x)?;
                    let (v, ratio) = count_geodesics(&x)?;
                    Some((v, ratio))
                }
                None => None,
            };
            let mut doc = json!({
                "minGap": min_gap.decimal(PRINT_DIGITS),
                "digitsCertified": PRINT_DIGITS,
                "certificate": {
                    "allGapsExceedOne": cert.all_gaps_exceed_one,
                    "strictlyDecreasing": cert.strictly_decreasing,
                    "quadraticEnvelope": cert.quadratic_envelope,
                },
                "globalMin": report.global_min,
                "windowMinima": report.window_minima,
                "trendNonincreasing": report.trend_nonincreasing,
                "verdict": format!("{:?}", report.verdict),
            });
            if let Some((v, ratio)) = counting {
                doc["count"] = json!(v);
                doc["pgtRatio"] = json!(ratio);
            }
            match common.format {
                Format::Json => {
                    emit(&common, format!("{}\n", serde_json::to_string_pretty(&doc).unwrap()))
                }
                Format::Csv => {
                    let mut text = String::from("trace,gap,digits_certified\n");
                    for (i, g) in report.gaps.iter().enumerate() {
                        text.push_str(&format!(
                            "{},{},{}\n",
                            3 + i as i64,
                            g.decimal(PRINT_DIGITS),
                            PRINT_DIGITS
                        ));
                    }
                    emit(&common, text)
                }
            }
        }
        Command::Congruence { level, c_max, common } => {
            if common.selftest {
                return selftest_congruence();
            }
            let witnesses: Vec<_> = (1..=c_max)
                .map(|c| gamma_n_witness(level, c))
                .collect::<Result<_, Error>>()?;
            let scan = if c_max >= 2 { Some(congruence_gap_scan(level, c_max)?) } else { None };
            let wjson: Vec<_> = witnesses
                .iter()
                .map(|w| {
                    json!({
                        "N": w.n, "c": w.c, "a": w.a, "b": w.b, "D": w.d,
                        "matrix": w.entries.map(|row| row.map(|x| x.to_string())),
                        "det": w.det().to_string(),
                    })
                })
                .collect();
            let gaps_json = scan.as_ref().map(|s| {
                s.gaps
                    .gaps
                    .iter()
                    .map(|g| g.decimal(PRINT_DIGITS))
                    .collect::<Vec<_>>()
            });
            match common.format {
                Format::Json => {
                    let doc = json!({
                        "witnesses": wjson,
                        "gaps": gaps_json,
                        "digitsCertified": PRINT_DIGITS,
                    });
                    emit(&common, format!("{}\n", serde_json::to_string_pretty(&doc).unwrap()))
                }
                Format::Csv => {
                    let mut text = String::from("c,a,b,D,m00,m01,m10,m11,gap_to_next\n");
                    for (i, w) in witnesses.iter().enumerate() {
                        let gap = gaps_json
                            .as_ref()
                            .and_then(|g| g.get(i))
                            .cloned()
                            .unwrap_or_default();
                        text.push_str(&format!(
                            "{},{},{},{},{},{},{},{},{}\n",
                            w.c, w.a, w.b, w.d,
                            w.entries[0][0], w.entries[0][1], w.entries[1][0], w.entries[1][1],
                            gap
                        ));
                    }
                    emit(&common, text)
                }
            }
        }
        Command::Quaternion { primes, c_max, common } => {
            if common.selftest {
                return selftest_quaternion();
            }
            let s: Vec<i64> = primes
                .split(',')
                .map(|p| {
                    p.trim()
                        .parse()
                        .map_err(|_| Error::Precondition(format!("bad prime {p:?}")))
                })
                .collect::<Result<_, Error>>()?;
            use num_integer::Integer;
            let r: i64 = s.iter().product();
            let reports: Vec<_> = (1..=c_max)
                .filter(|c| c.gcd(&(2 * r)) == 1)
                .map(|c| quaternion_witness(&s, c))
                .collect::<Result<_, Error>>()?;
            if reports.is_empty() {
                return Err(Error::Precondition(format!(
                    "no admissible c ≤ {c_max} coprime to 2R"
                )));
            }
            let scan = if reports.len() >= 2 { Some(quaternion_gap_scan(&s, c_max)?) } else { None };
            let doc = json!({
                "reports": reports,
                "gaps": scan.as_ref().map(|sc| sc.gaps.gaps.iter()
                    .map(|g| g.decimal(PRINT_DIGITS)).collect::<Vec<_>>()),
                "digitsCertified": PRINT_DIGITS,
            });
            match common.format {
                Format::Json => {
                    emit(&common, format!("{}\n", serde_json::to_string_pretty(&doc).unwrap()))
                }
                Format::Csv => {
                    let mut text = String::from("c,a,D,delta,disc,conductor\n");
                    for rep in &reports {
                        text.push_str(&format!(
                            "{},{},{},{},{},{}\n",
                            rep.c, rep.a, rep.d, rep.delta, rep.disc, rep.conductor
                        ));
                    }
                    emit(&common, text)
                }
            }
        }
        Command::Classnum { disc, common } => {
            if common.selftest {
                return selftest_classnum();
            }
            let d = Discriminant::new(disc)?;
            let h = class_number(d);
            match common.format {
                Format::Json => emit(
                    &common,
                    format!(
                        "{}\n",
                        serde_json::to_string_pretty(&json!({
                            "disc": disc,
                            "classNumber": h,
                            "fundamental": d.is_fundamental(),
                        }))
                        .unwrap()
                    ),
                ),
                Format::Csv => emit(&common, format!("disc,class_number\n{disc},{h}\n")),
            }
        }
        Command::Graph { op } => run_graph(op),
        Command::Bouquet { op } => run_bouquet(op),
    }
}

fn run_graph(op: GraphOp) -> Result<(), Error> {
    match op {
        GraphOp::Zeta { input, samples, common } => {
            if common.selftest {
                return selftest_graph();
            }
            let mg = read_graph(&input)?;
            let mut rows = Vec::new();
            for s in &samples {
                let z = parse_complex(s)?;
                rows.push((z, zeta_det(&mg, z)));
            }
            match common.format {
                Format::Csv => {
                    let mut text = String::from("s,zeta_det\n");
                    for (z, v) in &rows {
                        text.push_str(&format!("{},{}\n", complex_str(*z), complex_str(*v)));
                    }
                    emit(&common, text)
                }
                Format::Json => {
                    let vals: Vec<_> = rows
                        .iter()
                        .map(|(z, v)| json!({"s": [z.re, z.im], "value": [v.re, v.im]}))
                        .collect();
                    emit(
                        &common,
                        format!("{}\n", serde_json::to_string_pretty(&json!({"zeta": vals})).unwrap()),
                    )
                }
            }
        }
        GraphOp::Geodesics { input, n_max, length_cutoff, common } => {
            if common.selftest {
                return selftest_graph();
            }
            let mg = read_graph(&input)?;
            let gs = match (n_max, length_cutoff) {
                (Some(n), None) => enumerate_geodesics(&mg, n)?,
                (None, Some(cut)) => enumerate_geodesics_by_length(&mg, &parse_rational(&cut)?)?,
                _ => {
                    return Err(Error::Precondition(
                        "provide exactly one of --n-max or --length-cutoff".into(),
                    ))
                }
            };
            let mut text = String::from("word,combinatorial_length,metric_length,period\n");
            for g in &gs {
                text.push_str(&format!(
                    "{},{},{},{}\n",
                    g.display_word(&mg),
                    g.combinatorial_length(),
                    g.length,
                    g.period
                ));
            }
            emit(&common, text)
        }
        GraphOp::Product { input, samples, cutoff, common } => {
            if common.selftest {
                return selftest_graph();
            }
            let mg = read_graph(&input)?;
            let mut text = String::from("s,euler_product,det,residual\n");
            for s in &samples {
                let z = parse_complex(s)?;
                let prod = zeta_product(&mg, z, cutoff)?;
                let det = zeta_det(&mg, z);
                text.push_str(&format!(
                    "{},{},{},{:.3e}\n",
                    complex_str(z),
                    complex_str(prod),
                    complex_str(det),
                    (prod - det).norm()
                ));
            }
            emit(&common, text)
        }
        GraphOp::Degenerate { input, contract, delete, common } => {
            if common.selftest {
                return selftest_graph();
            }
            let mg = read_graph(&input)?;
            let directives: Vec<Directive> = mg
                .graph
                .edges
                .iter()
                .map(|e| {
                    if contract.contains(&e.id) {
                        Directive::Contract
                    } else if delete.contains(&e.id) {
                        Directive::Delete
                    } else {
                        Directive::Keep
                    }
                })
                .collect();
            for id in contract.iter().chain(&delete) {
                if !mg.graph.edges.iter().any(|e| &e.id == id) {
                    return Err(Error::Precondition(format!("no edge with id {id:?}")));
                }
            }
            let d = degenerate(&mg, &directives)?;
            let mut text = to_json(&d.metric_graph);
            text.push_str(&format!("\n// connected: {}\n", d.connected));
            emit(&common, text)
        }
        GraphOp::Converge { family, common } => {
            if common.selftest {
                return selftest_graph();
            }
            let (members, limit, grid) = if family == "contract" {
                let members: Vec<(f64, MetricGraph)> = [(1i64, 10i64), (1, 100), (1, 1000)]
                    .iter()
                    .map(|&(p, q)| {
                        let a = BigRational::new(BigInt::from(p), BigInt::from(q));
                        Ok((p as f64 / q as f64, x_a(&a)?))
                    })
                    .collect::<Result<_, Error>>()?;
                (members, x_a_contraction_limit()?.metric_graph, disk_grid())
            } else {
                let members: Vec<(f64, MetricGraph)> = [5i64, 10, 20]
                    .iter()
                    .map(|&v| Ok((v as f64, x_a(&BigRational::from(BigInt::from(v)))?)))
                    .collect::<Result<_, Error>>()?;
                (members, x_a_deletion_limit()?.metric_graph, right_grid())
            };
            let table = convergence_probe(&members, &limit, &grid)?;
            let mut text = String::from("a,max_residual\n");
            for (a, r) in table.a_values.iter().zip(&table.max_per_member) {
                text.push_str(&format!("{a},{r:.6e}\n"));
            }
            text.push_str(&format!("# strictly_decreasing: {}\n", table.strictly_decreasing));
            if family == "delete" {
                text.push_str(&format!("# envelope K (residual ≤ K·e^-a): {:.6e}\n", table.envelope_constant(1.0)));
            }
            emit(&common, text)
        }
        GraphOp::Ratgap { input, theta, cutoff, common } => {
            if common.selftest {
                return selftest_graph();
            }
            let mg = read_graph(&input)?;
            let theta = parse_rational(&theta)?;
            let cutoff = parse_rational(&cutoff)?;
            let out = rational_gap_check(&mg, &theta, &cutoff)?;
            let mut text = String::from("l,l_next,norm_gap_lower,threshold_upper,holds\n");
            for r in &out.rows {
                text.push_str(&format!(
                    "{},{},{:.6e},{:.6e},{}\n",
                    r.l, r.l_next, r.norm_gap_lower, r.threshold_upper, r.holds
                ));
            }
            text.push_str(&format!("# holds: {}\n", out.holds));
            emit(&common, text)
        }
    }
}

fn run_bouquet(op: BouquetOp) -> Result<(), Error> {
    match op {
        BouquetOp::Scan { a, m_max, n_max, common } => {
            if common.selftest {
                return selftest_bouquet();
            }
            let a = read_digit_stream(&a)?;
            let scan = min_gap_scan(&a, m_max, n_max)?;
            let doc = json!({
                "minGap": scan.min_gap.decimal(PRINT_DIGITS),
                "digitsCertified": PRINT_DIGITS,
                "argmin": {
                    "m": scan.argmin.m.to_string(),
                    "n": scan.argmin.n.to_string(),
                    "k": scan.argmin.k.to_string(),
                    "l": scan.argmin.l.to_string(),
                },
            });
            emit(&common, format!("{}\n", serde_json::to_string_pretty(&doc).unwrap()))
        }
        BouquetOp::Construct { seed, c, stages, targets, common } => {
            if common.selftest {
                return selftest_bouquet();
            }
            let seed = DigitReal::parse(&seed)?;
            let c = parse_rational(&c)?;
            let (a, pairs) = liouville_construct(&seed, &c, stages)?;
            let mut doc = json!({
                "a": a.to_string(),
                "digits": a.digit_count(),
                "pairs": pairs.iter().map(pair_json).collect::<Vec<_>>(),
            });
            if let Some(ts) = targets {
                let ts: Vec<BigRational> = ts
                    .split(',')
                    .map(|t| parse_rational(t.trim()))
                    .collect::<Result<_, Error>>()?;
                let demo = density_demo(&ts, &c, stages)?;
                doc["density"] = json!(demo
                    .iter()
                    .zip(&ts)
                    .map(|((a, dist), t)| json!({
                        "target": t.to_string(),
                        "digits": a.digit_count(),
                        "distanceUpper": dist,
                    }))
                    .collect::<Vec<_>>());
            }
            emit(&common, format!("{}\n", serde_json::to_string_pretty(&doc).unwrap()))
        }
        BouquetOp::Verify { a, c, count, scale_floor, common } => {
            if common.selftest {
                return selftest_bouquet();
            }
            let a = read_digit_stream(&a)?;
            let c = parse_rational(&c)?;
            let pairs = verify_small_gaps(&a, &c, count, scale_floor)?;
            let doc = json!({
                "verified": pairs.len(),
                "pairs": pairs.iter().map(pair_json).collect::<Vec<_>>(),
            });
            emit(&common, format!("{}\n", serde_json::to_string_pretty(&doc).unwrap()))
        }
    }
}

fn check(name: &str, ok: bool) -> Result<(), Error> {
    if ok {
        println!("selftest {name}: ok");
        Ok(())
    } else {
        Err(Error::Internal(format!("selftest {name} failed")))
    }
}

fn selftest_spectrum() -> Result<(), Error> {
    let s = spectrum(4)?;
    check("spectrum-len", s.len() == 2)?;
    check(
        "spectrum-values",
        (s[0].value_interval(128).to_f64() - 2.6180339887).abs() < 1e-9
            && (s[1].value_interval(128).to_f64() - 3.7320508076).abs() < 1e-9,
    )?;
    let x = BigRational::from(BigInt::from(10));
    check("unit-count", count_units_below(&x, false)? == 8)
}

fn selftest_gaps() -> Result<(), Error> {
    let (_, cert) = limit_gap_estimate(500)?;
    check(
        "gap-certificates",
        cert.all_gaps_exceed_one && cert.strictly_decreasing && cert.quadratic_envelope,
    )?;
    let full: Vec<i64> = (3..=100).collect();
    let sub: Vec<i64> = (1..=6).map(|c| 2 + 16 * c).collect();
    check("monotonicity", subgroup_monotonicity_check(&sub, &full)?)?;
    let entries = spectrum(10)?;
    let scan = gap_scan(&entries)?;
    check("gap-scan", scan.gaps.len() == 7)
}

fn selftest_congruence() -> Result<(), Error> {
    for n in 2..=5i64 {
        for c in 1..=10i64 {
            let w = gamma_n_witness(n, c)?;
            check(&format!("witness-{n}-{c}"), w.det() == 1 && w.b % n == 0)?;
        }
    }
    let w = gamma_n_witness(2, 1)?;
    check("witness-matrix", w.entries == [[29, -40], [8, -11]])
}

fn selftest_quaternion() -> Result<(), Error> {
    let rep = quaternion_witness(&[3, 5], 1)?;
    check("quat-3-5", rep.a == 62 && rep.disc == 60 && rep.conductor == 8)?;
    let rep = quaternion_witness(&[2, 3], 1)?;
    let p2 = rep.per_prime.iter().find(|f| f.p == 2).unwrap();
    check("quat-2-discrepancy", p2.ramified && !p2.conductor_maximal)
}

fn selftest_classnum() -> Result<(), Error> {
    for (d, h) in [(5i64, 1u64), (8, 1), (12, 2), (40, 2)] {
        check(&format!("classnum-{d}"), class_number(Discriminant::new(d)?) == h)?;
    }
    Ok(())
}

fn selftest_graph() -> Result<(), Error> {
    let theta = theta_graph();
    let s = Complex64::new(4.0, 0.0);
    let det = zeta_det(&theta, s);
    let prod = zeta_product(&theta, s, 14)?;
    check("euler-vs-det", (det - prod).norm() < 1e-8)?;
    for n in 1..=6 {
        check(
            &format!("trace-identity-{n}"),
            trace_identity_residual(&theta, Complex64::new(1.0, 1.0), n)? < 1e-10,
        )?;
    }
    let one = BigRational::from(BigInt::from(1));
    let out = rational_gap_check(&theta, &one, &BigRational::from(BigInt::from(8)))?;
    check("rational-gaps", out.holds)
}

fn selftest_bouquet() -> Result<(), Error> {
    let seed = DigitReal::parse("0.1")?;
    let one = BigRational::from(BigInt::from(1));
    let (_, pairs) = liouville_construct(&seed, &one, 1)?;
    let pr = &pairs[0].pair;
    check(
        "construct-pair",
        &pr.m - &pr.k == BigInt::from(10) && &pr.n - &pr.l == BigInt::from(-1),
    )?;
    let a = DigitReal::parse("0.693147180559945309417232121458")?;
    let scan = min_gap_scan(&a, 1, 1)?;
    check(
        "scan-ln2",
        (scan.min_gap.to_f64() - (std::f64::consts::E - 2.0)).abs() < 1e-9,
    )
}
