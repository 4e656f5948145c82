//! Command-line front end: run computations and verification suites on
//! built-in or file-loaded geometries, emitting human-readable output and a
//! deterministic JSON report.

use clap::{Parser, Subcommand};
use ncgcurv::algebra::{CheckOutcome, Mode};
use ncgcurv::curvature::{rank4_table, ricci, riemann, scalar_curvature};
use ncgcurv::deformation::{verify_theta_theorems, ThetaContext};
use ncgcurv::geometries::{builtin, builtin_names, format as geofmt, GeometrySpec};
use ncgcurv::levi_civita::{concordance_check, solve_levi_civita, solve_levi_civita_with_pi};
use ncgcurv::report::Report;
use ncgcurv::scalar::Rat;
use ncgcurv::verify::{geometry_checks, property_battery, sabotage_fixtures};
use num_bigint::BigInt;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

/// Exact curvature engine for frame-presented differential structures.
///
/// The deformation phase is treated as a formal unit-circle parameter; all
/// identity checks are exact unless `--theta p/q` selects numeric evaluation
/// at L = e^{2 pi i q} (the deformation angle is 2 pi q).
#[derive(Parser)]
#[command(name = "ncgcurv", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Built-in geometry name or a geometry file path.
    #[arg(long, global = true, default_value = "torus")]
    geometry: String,

    /// Evaluate residuals numerically at L = e^{2 pi i q} with q = p/q.
    #[arg(long, global = true, value_parser = parse_rat)]
    theta: Option<Rat>,

    /// Force exact symbolic checking (the default).
    #[arg(long, global = true)]
    symbolic: bool,

    /// Write the JSON report to this path.
    #[arg(long, global = true)]
    json: Option<PathBuf>,

    /// Seed for the randomized property samples.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Number of randomized samples per property check.
    #[arg(long, global = true, default_value_t = 40)]
    samples: usize,
}

#[derive(Subcommand)]
enum Command {
    /// List the built-in geometries.
    List,
    /// Validate a geometry's structural invariants.
    Validate,
    /// Solve for the Levi-Civita connection form and check its postconditions.
    Connection {
        /// JSON file with a rank-3 tensor added to A after projection onto
        /// the braiding-symmetric intersection.
        #[arg(long)]
        pi_component: Option<PathBuf>,
    },
    /// Full Riemann curvature of the solved connection.
    Curvature,
    /// Ricci tensor of the solved connection.
    Ricci,
    /// Scalar curvature of the solved connection.
    Scalar,
    /// Dirac conditions, connection Laplacian and the Weitzenbock residue.
    Weitzenbock,
    /// Verify the deformation identities (naturality and invariance).
    DeformVerify,
    /// Run every check suite.
    CheckAll,
}

fn parse_rat(s: &str) -> Result<Rat, String> {
    let parts: Vec<&str> = s.split('/').collect();
    let parse_int = |x: &str| x.parse::<BigInt>().map_err(|e| e.to_string());
    match parts.as_slice() {
        [p] => Ok(Rat::from_integer(parse_int(p)?)),
        [p, q] => Ok(Rat::new(parse_int(p)?, parse_int(q)?)),
        _ => Err("expected p or p/q".into()),
    }
}

fn load_geometry(name: &str) -> Result<GeometrySpec, String> {
    if let Some(g) = builtin(name) {
        return Ok(g);
    }
    let path = PathBuf::from(name);
    if path.exists() {
        return geofmt::load_path(&path).map_err(|e| e.to_string());
    }
    Err(format!("unknown geometry '{name}' (not a builtin, not a file)"))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(all_pass) => {
            if all_pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<bool, String> {
    if matches!(cli.command, Command::List) {
        for (name, desc) in builtin_names() {
            println!("{name:10} {desc}");
        }
        return Ok(true);
    }

    let geo = load_geometry(&cli.geometry)?;
    let theta_desc = match &cli.theta {
        None => "symbolic".to_string(),
        Some(q) => q.to_string(),
    };
    let mut report = Report::new(&geo.name, &theta_desc, cli.seed);
    let started = Instant::now();

    match &cli.command {
        Command::List => unreachable!(),
        Command::Validate => {
            let violations = geo.validate();
            if violations.is_empty() {
                report.push_checks([CheckOutcome::pass("validator")]);
            } else {
                report.push_checks(violations.iter().map(|v| {
                    CheckOutcome::fail(format!("validator:{}", v.check), v.detail.clone())
                }));
            }
        }
        Command::Connection { pi_component } => {
            let calc = geo.calculus(Mode::Deformed);
            let extra = match pi_component {
                None => None,
                Some(path) => {
                    let text = std::fs::read_to_string(path).map_err(|e| e.to_string())?;
                    Some(parse_tensor_json(&text, &geo)?)
                }
            };
            match solve_levi_civita_with_pi(&calc, extra.as_ref()) {
                Ok(conn) => {
                    report.push_checks([CheckOutcome::pass("levi-civita")]);
                    report.push_checks(ncgcurv::levi_civita::check_postconditions(&calc, &conn));
                    report.insert_object(
                        "connection_form",
                        serde_json::to_value(&conn.a_form).unwrap(),
                    );
                    report.insert_object(
                        "pi_ambiguity_dimensions",
                        serde_json::to_value(&conn.pi_dims).unwrap(),
                    );
                }
                Err(e) => report.push_checks([CheckOutcome::fail("levi-civita", e.to_string())]),
            }
            if let Ok(c) = concordance_check(&calc) {
                report.insert_object("concordance", serde_json::to_value(&c).unwrap());
            }
        }
        Command::Curvature | Command::Ricci | Command::Scalar => {
            let calc = geo.calculus(Mode::Deformed);
            let conn = solve_levi_civita(&calc).map_err(|e| e.to_string())?;
            let r = riemann(&calc, &conn);
            match &cli.command {
                Command::Curvature => {
                    let outputs: Vec<_> = r.outputs.iter().collect();
                    report.insert_object("riemann_outputs", serde_json::to_value(outputs).unwrap());
                    if let Some(t) = rank4_table(&calc, &r) {
                        let table: Vec<Vec<Vec<Vec<String>>>> = t
                            .iter()
                            .map(|a| {
                                a.iter()
                                    .map(|b| {
                                        b.iter()
                                            .map(|c| c.iter().map(|s| s.to_string()).collect())
                                            .collect()
                                    })
                                    .collect()
                            })
                            .collect();
                        report.insert_object("riemann_table", serde_json::to_value(table).unwrap());
                    }
                    report.push_checks([CheckOutcome::pass("curvature")]);
                }
                Command::Ricci => {
                    let ric = ricci(&calc, &r).map_err(|e| e.to_string())?;
                    report.insert_object("ricci", serde_json::to_value(&ric).unwrap());
                    report.push_checks([CheckOutcome::pass("ricci")]);
                }
                Command::Scalar => {
                    let ric = ricci(&calc, &r).map_err(|e| e.to_string())?;
                    let s = scalar_curvature(&calc, &ric).map_err(|e| e.to_string())?;
                    report.insert_object(
                        "scalar_curvature",
                        serde_json::Value::String(s.coeff_of(calc.algebra.unit_key()).to_string()),
                    );
                    report.push_checks([CheckOutcome::pass("scalar-curvature")]);
                }
                _ => unreachable!(),
            }
        }
        Command::Weitzenbock => {
            let calc = geo.calculus(Mode::Deformed);
            let dc = geo.dirac_calculus(Mode::Deformed);
            let conn = solve_levi_civita(&calc).map_err(|e| e.to_string())?;
            report.push_checks(ncgcurv::verify::check_dirac_conditions(
                &dc,
                &conn,
                cli.seed,
                cli.theta.clone(),
            ));
            report.push_checks([ncgcurv::verify::check_weitzenbock(
                &dc,
                &conn,
                geo.oracle.residue_factor.as_ref(),
                cli.seed,
                cli.samples.max(12),
                cli.theta.clone(),
            )]);
            if let Some(f) = &geo.oracle.residue_factor {
                report.insert_object(
                    "weitzenbock_residue_factor",
                    serde_json::Value::String(f.to_string()),
                );
            }
        }
        Command::DeformVerify => {
            let ctx = ThetaContext::new(&geo, cli.seed, cli.samples, cli.theta.clone())
                .map_err(|e| e.to_string())?;
            report.push_checks(verify_theta_theorems(&ctx));
        }
        Command::CheckAll => {
            for mode in [Mode::Classical, Mode::Deformed] {
                report.push_checks(geometry_checks(&geo, mode, cli.seed, cli.theta.clone()).into_iter().map(
                    |mut c| {
                        c.name = format!("{mode}:{}", c.name);
                        c
                    },
                ));
                report.push_checks(property_battery(&geo, mode, cli.seed, cli.samples.max(100)).into_iter().map(
                    |mut c| {
                        c.name = format!("{mode}:{}", c.name);
                        c
                    },
                ));
            }
            let ctx = ThetaContext::new(&geo, cli.seed, cli.samples, cli.theta.clone())
                .map_err(|e| e.to_string())?;
            report.push_checks(verify_theta_theorems(&ctx));
            let r = riemann(&ctx.th, &ctx.conn_th);
            let ric = ricci(&ctx.th, &r).map_err(|e| e.to_string())?;
            let s = scalar_curvature(&ctx.th, &ric).map_err(|e| e.to_string())?;
            report.insert_object(
                "scalar_curvature",
                serde_json::Value::String(s.coeff_of(ctx.th.algebra.unit_key()).to_string()),
            );
            report.insert_object("connection_form", serde_json::to_value(&ctx.conn_th.a_form).unwrap());
            report.insert_object("ricci", serde_json::to_value(&ric).unwrap());
            if let Some(t) = rank4_table(&ctx.th, &r) {
                let table: Vec<Vec<Vec<Vec<String>>>> = t
                    .iter()
                    .map(|a| {
                        a.iter()
                            .map(|b| {
                                b.iter()
                                    .map(|c| c.iter().map(|s| s.to_string()).collect())
                                    .collect()
                            })
                            .collect()
                    })
                    .collect();
                report.insert_object("riemann_table", serde_json::to_value(table).unwrap());
            }
            report.insert_object(
                "pi_ambiguity_dimensions",
                serde_json::to_value(&ctx.conn_th.pi_dims).unwrap(),
            );
            if let Some(f) = &geo.oracle.residue_factor {
                report.insert_object(
                    "weitzenbock_residue_factor",
                    serde_json::Value::String(f.to_string()),
                );
            }
            report.push_checks([ncgcurv::verify::frame_independence(&geo, Mode::Classical)]);
            // mutation sensitivity: every sabotage fixture must trip
            for f in sabotage_fixtures() {
                let tripped = (f.run)().iter().any(|c| !c.passed);
                report.push_checks([if tripped {
                    CheckOutcome::pass(format!("mutation-sensitivity:{}", f.name))
                } else {
                    CheckOutcome::fail(
                        format!("mutation-sensitivity:{}", f.name),
                        "fixture did not trip any check",
                    )
                }]);
            }
        }
    }

    let elapsed = started.elapsed();
    for entry in &report.checks {
        match &entry.witness {
            Some(w) => println!("{:4} {}  [{}]", entry.status.to_uppercase(), entry.name, w),
            None => println!("{:4} {}", entry.status.to_uppercase(), entry.name),
        }
    }
    for (key, value) in &report.objects {
        if let serde_json::Value::String(s) = value {
            println!("{key} = {s}");
        }
    }
    println!(
        "{} checks in {:.3}s: {}",
        report.checks.len(),
        elapsed.as_secs_f64(),
        report.status
    );
    if let Some(path) = &cli.json {
        std::fs::write(path, report.to_json()).map_err(|e| e.to_string())?;
    }
    Ok(report.all_passed())
}

/// Minimal JSON tensor reader for the --pi-component option: the same shape
/// the engine serializes: {"rank":3,"terms":[{"index":[..],"coeff":{key:scalar}}]}.
fn parse_tensor_json(text: &str, geo: &GeometrySpec) -> Result<ncgcurv::Tensor, String> {
    use ncgcurv::algebra::AlgebraElement;
    let v: serde_json::Value = serde_json::from_str(text).map_err(|e| e.to_string())?;
    let rank = v["rank"].as_u64().ok_or("missing rank")? as usize;
    let mut t = ncgcurv::Tensor::zero(rank);
    for term in v["terms"].as_array().ok_or("missing terms")? {
        let idx: Vec<u8> = term["index"]
            .as_array()
            .ok_or("missing index")?
            .iter()
            .map(|x| x.as_u64().unwrap_or(0) as u8)
            .collect();
        let mut e = AlgebraElement::zero();
        for (k, s) in term["coeff"].as_object().ok_or("missing coeff")? {
            let key = parse_key(k, geo)?;
            let sc: ncgcurv::Scalar = s
                .as_str()
                .ok_or("scalar must be a token string")?
                .parse()
                .map_err(|e: ncgcurv::scalar::ScalarError| e.to_string())?;
            e.add_term(key, sc);
        }
        t.add_term(idx, e);
    }
    Ok(t)
}

fn parse_key(k: &str, geo: &GeometrySpec) -> Result<ncgcurv::BasisKey, String> {
    use ncgcurv::algebra::AlgebraSpec;
    if k == "1" {
        return Ok(geo.algebra.unit_key());
    }
    if let Some(inner) = k.strip_prefix('(').and_then(|x| x.strip_suffix(')')) {
        let parts: Vec<&str> = inner.split(',').collect();
        if parts.len() == 2 {
            let m = parts[0].trim().parse().map_err(|_| "bad key")?;
            let n = parts[1].trim().parse().map_err(|_| "bad key")?;
            return Ok(ncgcurv::BasisKey::Mono(m, n));
        }
    }
    if let AlgebraSpec::UserTable(t) = &geo.algebra {
        if let Some(i) = t.names.iter().position(|n| n == k) {
            return Ok(ncgcurv::BasisKey::Named(i as u16));
        }
    }
    Err(format!("unknown basis key '{k}'"))
}
