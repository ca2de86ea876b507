//! Command-line surface for the library: file ingestion, solves,
//! certifications, grid probes, SVG rendering, and the regression corpus.
//!
//! Exit codes: 0 on success, 1 when a check refutes or a corpus row
//! mismatches, 2 on usage or parse errors, 3 when a required hypothesis
//! fails at the given data.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use serde_json::{json, Value};

use carvex::funcs::lsc_hull;
use carvex::json::{
    constrained_to_json, diff_set_to_json, extval_to_json, fgset_to_json, geometric_to_json,
    parse_oracle, parse_problem, rats_to_json, rows_to_json, to_canonical_string, weights_to_json,
    OracleInstance, ProblemInstance,
};
use carvex::kkt::{
    assemble_feasible_set, check_slater, kkt_certify_associated, kkt_transfer_original,
    normal_cone_sublevel, solve_constrained_capped, ConstrainedOutcome, ConstrainedProblem,
    KKTCertificate, KKTOutcome, SlaterOutcome, SlaterWitness,
};
use carvex::opt::{
    associate, check_regularity, fermat_check, solve_associated_capped, solve_original_capped,
    AssociatedOutcome, DiffSet, Problem, Regularity, SolveStatus,
};
use carvex::oracle::{
    grid_liminf, grid_local_minima, grid_min, ho_witness_test, sampled_near_convexity_check,
    Bracket, GridSpec, HoOutcome,
};
use carvex::plot::PlotScene;
use carvex::rat::{point_display, rat_display, rat_int, rat_parse};
use carvex::repro::run_corpus;
use carvex::{
    fg_sum, CarvedPolyhedron, Cell, ConvexBase, Error, FGSet, FgWeights, LinearConstraint,
    NCFunction, Polyhedron, Rat, RatVec, Relation,
};

#[derive(Parser)]
#[command(
    name = "carvex",
    version,
    about = "Exact solves and certificates for nearly convex problems over rational data"
)]
struct Cli {
    /// Print a machine-readable JSON document instead of text.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Parse a problem file and print its canonical form.
    Validate { file: PathBuf },
    /// Solve the problem and report both solution sets exactly.
    Solve {
        file: PathBuf,
        /// Bound on active sets a quadratic solve may enumerate.
        #[arg(long)]
        max_active_sets: Option<u64>,
    },
    /// Solve the associated convex problem over the closures.
    SolveAssociated {
        file: PathBuf,
        /// Bound on active sets a quadratic solve may enumerate.
        #[arg(long)]
        max_active_sets: Option<u64>,
    },
    /// Check first-order optimality of a point, with reproducing weights.
    Fermat {
        file: PathBuf,
        #[arg(long, value_name = "X1,X2,...", allow_hyphen_values = true)]
        point: String,
    },
    /// Search for exact Lagrange multipliers certifying a point.
    Kkt {
        file: PathBuf,
        #[arg(long, value_name = "X1,X2,...", allow_hyphen_values = true)]
        point: String,
    },
    /// Decide the generalized Slater condition.
    Slater {
        file: PathBuf,
        /// Candidate strictly feasible point, verified instead of searched.
        #[arg(long, value_name = "X1,X2,...", allow_hyphen_values = true)]
        hint: Option<String>,
    },
    /// Decide whether the feasible set and objective domain share
    /// relative-interior points.
    Regularity { file: PathBuf },
    /// Evaluate the objective and its lower semicontinuous hull at a point.
    LscHull {
        file: PathBuf,
        #[arg(long, value_name = "X1,X2,...", allow_hyphen_values = true)]
        point: String,
    },
    /// Compute the normal cone of the feasible set at a point.
    NormalCone {
        file: PathBuf,
        #[arg(long, value_name = "X1,X2,...", allow_hyphen_values = true)]
        point: String,
    },
    /// Compute subdifferentials of the objective and its hull at a point.
    Subdiff {
        file: PathBuf,
        #[arg(long, value_name = "X1,X2,...", allow_hyphen_values = true)]
        point: String,
    },
    /// Grid and segment probes over sets and objectives.
    Oracle {
        #[command(subcommand)]
        probe: Probe,
    },
    /// Render a 2-dimensional instance to an SVG file.
    Plot {
        file: PathBuf,
        out: PathBuf,
        /// Point to mark, colored by its optimality certificate. Repeatable.
        #[arg(long, value_name = "X1,X2,...", allow_hyphen_values = true)]
        point: Vec<String>,
    },
    /// Re-run the embedded corpus and compare against expected values.
    Repro,
}

#[derive(Subcommand)]
enum Probe {
    /// Probe dyadic witnesses along segments between member pairs.
    Ho {
        file: PathBuf,
        /// Deepest probe 2^(-levels).
        #[arg(long, default_value_t = 30)]
        levels: u32,
    },
    /// Scan member pairs for a midpoint hole refuting near convexity.
    NearConvexity {
        file: PathBuf,
        #[arg(long, value_name = "P/Q")]
        grid_step: String,
        #[arg(long, value_name = "LO:HI,LO:HI,...", allow_hyphen_values = true)]
        grid_box: String,
    },
    /// Minimize the objective over in-set grid points, with a lower bound.
    GridMin {
        file: PathBuf,
        #[arg(long, value_name = "P/Q")]
        grid_step: String,
        #[arg(long, value_name = "LO:HI,LO:HI,...", allow_hyphen_values = true)]
        grid_box: String,
    },
    /// List clusters of grid-local minimizers.
    LocalMinima {
        file: PathBuf,
        #[arg(long, value_name = "P/Q")]
        grid_step: String,
        #[arg(long, value_name = "LO:HI,LO:HI,...", allow_hyphen_values = true)]
        grid_box: String,
    },
    /// Bracket the lsc hull value at a point by shrinking grid boxes.
    Liminf {
        file: PathBuf,
        #[arg(long, value_name = "X1,X2,...", allow_hyphen_values = true)]
        point: String,
        #[arg(long, value_name = "P/Q")]
        grid_step: String,
        #[arg(long, value_name = "LO:HI,LO:HI,...", allow_hyphen_values = true)]
        grid_box: String,
    },
}

enum CliError {
    Core(Error),
    Usage(String),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Core(e)
    }
}

fn main() {
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
    let cli = Cli::parse();
    let code = match run(cli) {
        Ok(code) => code,
        Err(CliError::Core(e)) => {
            eprintln!("error: {e}");
            if e.is_hypothesis_violation() {
                3
            } else {
                2
            }
        }
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            2
        }
    };
    std::process::exit(code);
}

fn run(cli: Cli) -> Result<i32, CliError> {
    let json = cli.json;
    match cli.command {
        Cmd::Validate { file } => cmd_validate(&file, json),
        Cmd::Solve { file, max_active_sets } => cmd_solve(&file, max_active_sets, json),
        Cmd::SolveAssociated { file, max_active_sets } => {
            cmd_solve_associated(&file, max_active_sets, json)
        }
        Cmd::Fermat { file, point } => cmd_fermat(&file, &point, json),
        Cmd::Kkt { file, point } => cmd_kkt(&file, &point, json),
        Cmd::Slater { file, hint } => cmd_slater(&file, hint.as_deref(), json),
        Cmd::Regularity { file } => cmd_regularity(&file, json),
        Cmd::LscHull { file, point } => cmd_lsc_hull(&file, &point, json),
        Cmd::NormalCone { file, point } => cmd_normal_cone(&file, &point, json),
        Cmd::Subdiff { file, point } => cmd_subdiff(&file, &point, json),
        Cmd::Oracle { probe } => cmd_oracle(probe, json),
        Cmd::Plot { file, out, point } => cmd_plot(&file, &out, &point, json),
        Cmd::Repro => cmd_repro(json),
    }
}

fn read_file(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))
}

fn load_problem(path: &Path) -> Result<ProblemInstance, CliError> {
    Ok(parse_problem(&read_file(path)?)?)
}

fn load_oracle(path: &Path) -> Result<OracleInstance, CliError> {
    Ok(parse_oracle(&read_file(path)?)?)
}

fn parse_point(s: &str, dim: usize) -> Result<RatVec, CliError> {
    let coords: RatVec =
        s.split(',').map(|t| rat_parse(t.trim())).collect::<Result<_, _>>()?;
    if coords.len() != dim {
        return Err(Error::DimensionMismatch { expected: dim, found: coords.len() }.into());
    }
    Ok(coords)
}

fn parse_grid(step: &str, bounds: &str, dim: usize) -> Result<GridSpec, CliError> {
    let step = rat_parse(step.trim())?;
    let mut parsed = Vec::new();
    for part in bounds.split(',') {
        let Some((lo, hi)) = part.split_once(':') else {
            return Err(CliError::Usage(format!(
                "grid box component {part:?} is not of the form lo:hi"
            )));
        };
        parsed.push((rat_parse(lo.trim())?, rat_parse(hi.trim())?));
    }
    if parsed.len() != dim {
        return Err(Error::DimensionMismatch { expected: dim, found: parsed.len() }.into());
    }
    Ok(GridSpec::new(parsed, step, 30)?)
}

/// The instance as a purely geometric problem; piecewise affine
/// constraints are folded into the feasible set.
fn as_problem(inst: &ProblemInstance) -> Result<Problem, Error> {
    match inst {
        ProblemInstance::Geometric(p) => {
            Problem::new(p.objective().clone(), p.feasible_set().clone())
        }
        ProblemInstance::Constrained(cp) => {
            Problem::new(cp.objective().clone(), assemble_feasible_set(cp)?)
        }
    }
}

fn cmd_validate(file: &Path, json: bool) -> Result<i32, CliError> {
    let inst = load_problem(file)?;
    if json {
        let text = match &inst {
            ProblemInstance::Geometric(p) => to_canonical_string(&geometric_to_json(p))?,
            ProblemInstance::Constrained(cp) => to_canonical_string(&constrained_to_json(cp))?,
        };
        print!("{text}");
        return Ok(0);
    }
    match &inst {
        ProblemInstance::Geometric(p) => {
            println!("kind: geometric");
            println!("dimension: {}", p.objective().dim());
            println!("feasible set: {}", describe_set(p.feasible_set()));
            println!("objective: {}", describe_function(p.objective()));
        }
        ProblemInstance::Constrained(cp) => {
            println!("kind: constrained");
            println!("dimension: {}", cp.dim());
            println!("geometric set: {}", describe_set(cp.geometric_set()));
            println!("objective: {}", describe_function(cp.objective()));
            println!("functional constraints: {}", cp.constraints().len());
            for (i, g) in cp.constraints().iter().enumerate() {
                println!("  constraint {i}: {}", describe_function(g));
            }
            match cp.slater_hint() {
                Some(h) => println!("slater hint: {}", point_display(h)),
                None => println!("slater hint: none"),
            }
        }
    }
    Ok(0)
}

fn cmd_solve(file: &Path, cap: Option<u64>, json: bool) -> Result<i32, CliError> {
    let inst = load_problem(file)?;
    match &inst {
        ProblemInstance::Geometric(p) => {
            let report = solve_original_capped(p, cap)?;
            if json {
                let doc = merge(
                    json!({
                        "command": "solve",
                        "kind": "geometric",
                        "regularity": regularity_json(&report.regularity),
                    }),
                    solve_status_json(&report.status),
                );
                print_json(&doc)?;
            } else {
                print_regularity(&report.regularity);
                print_solve_status(&report.status);
            }
        }
        ProblemInstance::Constrained(cp) => {
            let report = solve_constrained_capped(cp, cap)?;
            if json {
                let doc = merge(
                    json!({
                        "command": "solve",
                        "kind": "constrained",
                        "slater": slater_witness_json(&report.witness, report.in_ri_dom_f),
                    }),
                    constrained_outcome_json(&report.outcome),
                );
                print_json(&doc)?;
            } else {
                print_slater_witness(&report.witness, report.in_ri_dom_f);
                print_constrained_outcome(&report.outcome);
            }
        }
    }
    Ok(0)
}

fn cmd_solve_associated(file: &Path, cap: Option<u64>, json: bool) -> Result<i32, CliError> {
    let inst = load_problem(file)?;
    let quadratic_constraints = match &inst {
        ProblemInstance::Constrained(cp) => cp
            .constraints()
            .iter()
            .any(|g| matches!(g.base(), ConvexBase::Quadratic { .. })),
        ProblemInstance::Geometric(_) => false,
    };
    if quadratic_constraints {
        let ProblemInstance::Constrained(cp) = &inst else { unreachable!() };
        let report = solve_constrained_capped(cp, cap)?;
        let (status, value, rows): (&str, Option<String>, Option<&Polyhedron>) =
            match &report.outcome {
                ConstrainedOutcome::Optimal { value, associated_solutions, .. } => {
                    ("optimal", Some(rat_display(value)), Some(associated_solutions))
                }
                ConstrainedOutcome::Infeasible => ("infeasible", None, None),
                ConstrainedOutcome::Unbounded => ("unbounded", None, None),
            };
        if json {
            print_json(&json!({
                "command": "solve-associated",
                "slater": slater_witness_json(&report.witness, report.in_ri_dom_f),
                "status": status,
                "value": value,
                "associated_solutions": rows.map(|p| jval(&rows_to_json(p.rows()))),
            }))?;
        } else {
            print_slater_witness(&report.witness, report.in_ri_dom_f);
            println!("status: {status}");
            if let Some(v) = value {
                println!("value: {v}");
            }
            if let Some(p) = rows {
                print_rows("associated solution set:", p.rows());
            }
        }
        return Ok(0);
    }
    let p = as_problem(&inst)?;
    let regularity = check_regularity(&p)?;
    let outcome = solve_associated_capped(&associate(&p), cap)?;
    let (status, value, rows): (&str, Option<String>, Option<&Polyhedron>) = match &outcome {
        AssociatedOutcome::Optimal { value, minimizers } => {
            ("optimal", Some(rat_display(value)), Some(minimizers))
        }
        AssociatedOutcome::Infeasible => ("infeasible", None, None),
        AssociatedOutcome::Unbounded => ("unbounded", None, None),
    };
    if json {
        print_json(&json!({
            "command": "solve-associated",
            "regularity": regularity_json(&regularity),
            "status": status,
            "value": value,
            "associated_solutions": rows.map(|p| jval(&rows_to_json(p.rows()))),
        }))?;
    } else {
        print_regularity(&regularity);
        println!("status: {status}");
        if let Some(v) = value {
            println!("value: {v}");
        }
        if let Some(p) = rows {
            print_rows("associated solution set:", p.rows());
        }
    }
    Ok(0)
}

fn cmd_fermat(file: &Path, point: &str, json: bool) -> Result<i32, CliError> {
    let inst = load_problem(file)?;
    let x = parse_point(point, inst.dim())?;
    let p = as_problem(&inst)?;
    let cert = fermat_check(&p, &x)?;
    if json {
        print_json(&json!({
            "command": "fermat",
            "point": rats_to_json(&x),
            "certified": cert.holds,
            "optimality_set": fgset_to_json(&cert.optimality_set),
            "weights": cert.weights.as_ref().map(weights_to_json),
        }))?;
    } else {
        println!("point: {}", point_display(&x));
        println!("fermat: {}", if cert.holds { "certified" } else { "refuted" });
        println!("optimality set:");
        print_fgset("  ", &cert.optimality_set);
        if let Some(w) = &cert.weights {
            println!("weights for 0: {}", fmt_fg_weights(w));
        }
    }
    Ok(if cert.holds { 0 } else { 1 })
}

fn cmd_kkt(file: &Path, point: &str, json: bool) -> Result<i32, CliError> {
    let inst = load_problem(file)?;
    let ProblemInstance::Constrained(cp) = &inst else {
        return Err(CliError::Usage(
            "multiplier certification needs a constrained problem file; use fermat for geometric files"
                .into(),
        ));
    };
    let x = parse_point(point, cp.dim())?;
    match kkt_certify_associated(cp, &x)? {
        KKTOutcome::Certified(cert) => {
            let transfer = kkt_transfer_original(cp, &cert);
            if json {
                print_json(&json!({
                    "command": "kkt",
                    "point": rats_to_json(&x),
                    "certified": true,
                    "active": cert.active,
                    "multipliers": rats_to_json(&cert.lambdas),
                    "objective_weights": weights_to_json(&cert.objective_weights),
                    "constraint_weights": cert
                        .constraint_weights
                        .iter()
                        .map(|w| w.as_ref().map(weights_to_json))
                        .collect::<Vec<_>>(),
                    "normal_weights": weights_to_json(&cert.normal_weights),
                    "transfer": match &transfer {
                        Ok(t) => json!({"transfers": true, "sufficient": t.sufficient}),
                        Err(e) => json!({"transfers": false, "reason": e.to_string()}),
                    },
                }))?;
            } else {
                print_kkt_certificate(&cert);
                match &transfer {
                    Ok(t) => {
                        println!("transfers to the original problem: yes");
                        println!("sufficient for the original problem: {}", yn(t.sufficient));
                    }
                    Err(e) => println!("transfers to the original problem: no ({e})"),
                }
            }
            Ok(0)
        }
        KKTOutcome::Refuted { multipliers } => {
            if json {
                print_json(&json!({
                    "command": "kkt",
                    "point": rats_to_json(&x),
                    "certified": false,
                    "refuting_multipliers": rats_to_json(&multipliers),
                }))?;
            } else {
                println!("point: {}", point_display(&x));
                println!("kkt: refuted");
                println!("refuting multipliers: {}", fmt_rat_list(&multipliers));
            }
            Ok(1)
        }
    }
}

fn cmd_slater(file: &Path, hint: Option<&str>, json: bool) -> Result<i32, CliError> {
    let inst = load_problem(file)?;
    let ProblemInstance::Constrained(cp) = &inst else {
        return Err(CliError::Usage(
            "the Slater condition is about functional constraints; this file has none".into(),
        ));
    };
    let with_hint;
    let cp = match hint {
        Some(s) => {
            let h = parse_point(s, cp.dim())?;
            with_hint = ConstrainedProblem::new(
                cp.objective().clone(),
                cp.geometric_set().clone(),
                cp.constraints().to_vec(),
                Some(h),
            )?;
            &with_hint
        }
        None => cp,
    };
    match check_slater(cp)? {
        SlaterOutcome::Holds { witness, in_ri_dom_f } => {
            if json {
                print_json(&merge(
                    json!({"command": "slater"}),
                    slater_witness_json(&witness, in_ri_dom_f),
                ))?;
            } else {
                print_slater_witness(&witness, in_ri_dom_f);
            }
            Ok(0)
        }
        SlaterOutcome::Fails { farkas, slack_bound } => {
            if json {
                print_json(&json!({
                    "command": "slater",
                    "holds": false,
                    "farkas": farkas.as_ref().map(|v| rats_to_json(v)),
                    "slack_bound": slack_bound.as_ref().map(|v| rats_to_json(v)),
                }))?;
            } else {
                println!("slater: FAILED");
                if let Some(m) = &farkas {
                    println!("  farkas certificate: {}", fmt_rat_list(m));
                }
                if let Some(m) = &slack_bound {
                    println!("  slack bound certificate: {}", fmt_rat_list(m));
                }
            }
            Ok(1)
        }
    }
}

fn cmd_regularity(file: &Path, json: bool) -> Result<i32, CliError> {
    let inst = load_problem(file)?;
    let p = as_problem(&inst)?;
    let regularity = check_regularity(&p)?;
    if json {
        print_json(&merge(
            json!({"command": "regularity"}),
            regularity_json(&regularity),
        ))?;
    } else {
        print_regularity(&regularity);
    }
    Ok(if regularity.holds() { 0 } else { 1 })
}

fn cmd_lsc_hull(file: &Path, point: &str, json: bool) -> Result<i32, CliError> {
    let inst = load_problem(file)?;
    let f = inst.objective();
    let x = parse_point(point, inst.dim())?;
    let value = f.evaluate(&x)?;
    let hull = lsc_hull(f);
    let hull_value = hull.evaluate(&x)?;
    let continuous = hull.continuous_at(&x)?;
    if json {
        print_json(&json!({
            "command": "lsc-hull",
            "point": rats_to_json(&x),
            "value": extval_to_json(&value),
            "hull_value": extval_to_json(&hull_value),
            "agree": value == hull_value,
            "hull_continuous_at_point": continuous,
        }))?;
    } else {
        println!("point: {}", point_display(&x));
        println!("f(point): {value}");
        println!("lsc hull value: {hull_value}");
        println!("agree: {}", yn(value == hull_value));
        println!("hull continuous at point: {}", yn(continuous));
    }
    Ok(0)
}

fn cmd_normal_cone(file: &Path, point: &str, json: bool) -> Result<i32, CliError> {
    let inst = load_problem(file)?;
    let x = parse_point(point, inst.dim())?;
    let cone = match &inst {
        ProblemInstance::Geometric(p) => p.feasible_set().normal_cone(&x)?,
        ProblemInstance::Constrained(cp) => {
            if !check_slater(cp)?.holds() {
                return Err(Error::HypothesisViolated(
                    "the generalized Slater condition fails; the normal-cone formula for the constrained feasible set needs it"
                        .into(),
                )
                .into());
            }
            let geometric = cp.geometric_set().normal_cone(&x)?;
            let sublevel = normal_cone_sublevel(cp, &x)?;
            fg_sum(&geometric, &sublevel)?
        }
    };
    if json {
        print_json(&json!({
            "command": "normal-cone",
            "point": rats_to_json(&x),
            "normal_cone": fgset_to_json(&cone),
        }))?;
    } else {
        println!("point: {}", point_display(&x));
        println!("normal cone:");
        print_fgset("  ", &cone);
    }
    Ok(0)
}

fn cmd_subdiff(file: &Path, point: &str, json: bool) -> Result<i32, CliError> {
    let inst = load_problem(file)?;
    let f = inst.objective();
    let x = parse_point(point, inst.dim())?;
    let sub = f.subdiff(&x)?;
    let hull_sub = lsc_hull(f).subdiff(&x)?;
    if json {
        print_json(&json!({
            "command": "subdiff",
            "point": rats_to_json(&x),
            "subdifferential": fgset_to_json(&sub),
            "hull_subdifferential": fgset_to_json(&hull_sub),
        }))?;
    } else {
        println!("point: {}", point_display(&x));
        println!("subdifferential of f:");
        print_fgset("  ", &sub);
        println!("subdifferential of the lsc hull:");
        print_fgset("  ", &hull_sub);
    }
    Ok(0)
}

fn cmd_oracle(probe: Probe, json: bool) -> Result<i32, CliError> {
    match probe {
        Probe::Ho { file, levels } => {
            let inst = load_oracle(&file)?;
            let mut results = Vec::new();
            for (x, y) in &inst.pairs {
                results.push((x, y, ho_witness_test(&inst.set, x, y, levels)?));
            }
            if json {
                let rows: Vec<Value> = results
                    .iter()
                    .map(|(x, y, outcome)| {
                        let verdict = match outcome {
                            HoOutcome::FoundWitness(t) => {
                                json!({"outcome": "witness", "t": rat_display(t)})
                            }
                            HoOutcome::NoneUpTo(levels) => {
                                json!({"outcome": "none", "levels": levels})
                            }
                        };
                        merge(
                            json!({"x": rats_to_json(x), "y": rats_to_json(y)}),
                            verdict,
                        )
                    })
                    .collect();
                print_json(&json!({
                    "command": "oracle",
                    "probe": "ho",
                    "levels": levels,
                    "pairs": rows,
                }))?;
            } else {
                if results.is_empty() {
                    println!("no pairs in the file");
                }
                for (x, y, outcome) in &results {
                    let verdict = match outcome {
                        HoOutcome::FoundWitness(t) => format!("witness at t = {}", rat_display(t)),
                        HoOutcome::NoneUpTo(levels) => {
                            format!("no witness down to 2^-{levels}")
                        }
                    };
                    println!("{} -> {}: {}", point_display(x), point_display(y), verdict);
                }
            }
            Ok(0)
        }
        Probe::NearConvexity { file, grid_step, grid_box } => {
            let inst = load_oracle(&file)?;
            let spec = parse_grid(&grid_step, &grid_box, inst.set.dim())?;
            let evidence = sampled_near_convexity_check(&inst.set, &spec)?;
            if json {
                print_json(&json!({
                    "command": "oracle",
                    "probe": "near-convexity",
                    "flagged": evidence.flagged,
                    "pairs_tested": evidence.pairs_tested,
                    "witness": evidence.witness.as_ref().map(|(x, y, mid)| json!({
                        "x": rats_to_json(x),
                        "y": rats_to_json(y),
                        "midpoint": rats_to_json(mid),
                    })),
                }))?;
            } else if let Some((x, y, mid)) = &evidence.witness {
                println!("near convexity refuted: the midpoint of two members sits in a hole");
                println!("  members: {} and {}", point_display(x), point_display(y));
                println!("  midpoint: {}", point_display(mid));
            } else {
                println!(
                    "no refutation over {} sampled pairs (this certifies nothing)",
                    evidence.pairs_tested
                );
            }
            Ok(if evidence.flagged { 1 } else { 0 })
        }
        Probe::GridMin { file, grid_step, grid_box } => {
            let inst = load_problem(&file)?;
            let (f, d) = objective_and_set(&inst)?;
            let spec = parse_grid(&grid_step, &grid_box, f.dim())?;
            let report = grid_min(&f, &d, &spec)?;
            if json {
                print_json(&json!({
                    "command": "oracle",
                    "probe": "grid-min",
                    "minimum": extval_to_json(&report.minimum),
                    "lower_bound": extval_to_json(&report.lower_bound),
                    "bracket": bracket_json(&report.bracket()),
                    "candidates": report.candidates.iter().map(|p| rats_to_json(p)).collect::<Vec<_>>(),
                    "tie_count": report.tie_count,
                    "covers_witness": report.covers_witness,
                }))?;
            } else {
                println!("grid minimum: {}", report.minimum);
                println!("lower bound: {}", report.lower_bound);
                println!("bracket: {}", report.bracket());
                match report.candidates.first() {
                    Some(p) if report.tie_count == 1 => {
                        println!("attained at: {}", point_display(p));
                    }
                    Some(p) => {
                        println!(
                            "attained at: {} and {} more grid point{}",
                            point_display(p),
                            report.tie_count - 1,
                            plural(report.tie_count - 1)
                        );
                    }
                    None => println!("attained at: no in-set grid point"),
                }
                println!("box covers the set witness: {}", yn(report.covers_witness));
            }
            Ok(0)
        }
        Probe::LocalMinima { file, grid_step, grid_box } => {
            let inst = load_problem(&file)?;
            let (f, d) = objective_and_set(&inst)?;
            let spec = parse_grid(&grid_step, &grid_box, f.dim())?;
            let clusters = grid_local_minima(&f, &d, &spec)?;
            if json {
                let rows: Vec<Value> = clusters
                    .iter()
                    .map(|c| {
                        json!({
                            "representative": rats_to_json(&c.representative),
                            "value": extval_to_json(&c.value),
                            "size": c.size,
                        })
                    })
                    .collect();
                print_json(&json!({
                    "command": "oracle",
                    "probe": "local-minima",
                    "clusters": rows,
                }))?;
            } else {
                if clusters.is_empty() {
                    println!("no grid-local minimizers in the box");
                }
                for (i, c) in clusters.iter().enumerate() {
                    println!(
                        "cluster {}: value {} at {}, {} point{}",
                        i + 1,
                        c.value,
                        point_display(&c.representative),
                        c.size,
                        plural(c.size)
                    );
                }
            }
            Ok(0)
        }
        Probe::Liminf { file, point, grid_step, grid_box } => {
            let inst = load_problem(&file)?;
            let f = inst.objective();
            let x = parse_point(&point, inst.dim())?;
            let spec = parse_grid(&grid_step, &grid_box, f.dim())?;
            let bracket = grid_liminf(f, &x, &spec)?;
            if json {
                print_json(&json!({
                    "command": "oracle",
                    "probe": "liminf",
                    "point": rats_to_json(&x),
                    "bracket": bracket_json(&bracket),
                }))?;
            } else {
                println!("liminf bracket at {}: {}", point_display(&x), bracket);
            }
            Ok(0)
        }
    }
}

/// The objective and a carved feasible set for grid probes; piecewise
/// affine constraints are folded in.
fn objective_and_set(inst: &ProblemInstance) -> Result<(NCFunction, CarvedPolyhedron), Error> {
    match inst {
        ProblemInstance::Geometric(p) => Ok((p.objective().clone(), p.feasible_set().clone())),
        ProblemInstance::Constrained(cp) => {
            Ok((cp.objective().clone(), assemble_feasible_set(cp)?))
        }
    }
}

fn cmd_plot(file: &Path, out: &Path, points: &[String], json: bool) -> Result<i32, CliError> {
    let inst = load_problem(file)?;
    let mut scene = PlotScene::new(inst.dim())?;
    let backdrop = match &inst {
        ProblemInstance::Geometric(p) => p.feasible_set().clone(),
        ProblemInstance::Constrained(cp) => {
            assemble_feasible_set(cp).unwrap_or_else(|_| cp.geometric_set().clone())
        }
    };
    scene.hull(backdrop.hull());
    scene.removed_cells(backdrop.removed());
    let solutions: Option<DiffSet> = match &inst {
        ProblemInstance::Geometric(p) => match solve_original_capped(p, None) {
            Ok(report) => match report.status {
                SolveStatus::Optimal { solutions, .. } => Some(solutions),
                _ => None,
            },
            Err(e) => {
                eprintln!("note: solve skipped: {e}");
                None
            }
        },
        ProblemInstance::Constrained(cp) => match solve_constrained_capped(cp, None) {
            Ok(report) => match report.outcome {
                ConstrainedOutcome::Optimal { solutions, .. } => Some(solutions),
                _ => None,
            },
            Err(e) => {
                eprintln!("note: solve skipped: {e}");
                None
            }
        },
    };
    if let Some(s) = &solutions {
        scene.solutions(s);
    }
    for spec in points {
        let x = parse_point(spec, inst.dim())?;
        let certified = match &inst {
            ProblemInstance::Geometric(p) => {
                fermat_check(p, &x).map(|c| c.holds).unwrap_or(false)
            }
            ProblemInstance::Constrained(cp) => kkt_certify_associated(cp, &x)
                .map(|o| o.is_certified())
                .unwrap_or(false),
        };
        scene.point(&x, &point_display(&x), certified);
    }
    let svg = scene.render()?;
    fs::write(out, svg)
        .map_err(|e| CliError::Usage(format!("cannot write {}: {e}", out.display())))?;
    if json {
        print_json(&json!({
            "command": "plot",
            "out": out.display().to_string(),
            "solutions_drawn": solutions.is_some(),
        }))?;
    } else {
        println!("wrote {}", out.display());
    }
    Ok(0)
}

fn cmd_repro(json: bool) -> Result<i32, CliError> {
    let report = run_corpus()?;
    if json {
        let rows: Vec<Value> = report
            .rows
            .iter()
            .map(|r| {
                json!({
                    "name": r.name,
                    "expected": r.expected,
                    "computed": r.computed,
                    "match": r.matched,
                })
            })
            .collect();
        print_json(&json!({
            "command": "repro",
            "all_match": report.all_match(),
            "rows": rows,
        }))?;
    } else {
        let width = report.rows.iter().map(|r| r.name.len()).max().unwrap_or(4);
        for r in &report.rows {
            let status = if r.matched { "ok" } else { "MISMATCH" };
            println!("{:<width$}  {status}", r.name);
            if !r.matched {
                println!("{:<width$}  expected: {}", "", r.expected);
                println!("{:<width$}  computed: {}", "", r.computed);
            }
        }
        let mismatched = report.rows.iter().filter(|r| !r.matched).count();
        if mismatched == 0 {
            println!("all {} rows match", report.rows.len());
        } else {
            println!("{mismatched} of {} rows mismatch", report.rows.len());
        }
    }
    Ok(if report.all_match() { 0 } else { 1 })
}

fn describe_set(set: &CarvedPolyhedron) -> String {
    let hull = set.hull().rows().len();
    let cells = set.removed().len();
    format!("{hull} hull row{}, {cells} removed cell{}", plural(hull as u64), plural(cells as u64))
}

fn describe_function(f: &NCFunction) -> String {
    let base = match f.base() {
        ConvexBase::MaxAffine { pieces } => {
            format!("max-affine with {} piece{}", pieces.len(), plural(pieces.len() as u64))
        }
        ConvexBase::Quadratic { .. } => "quadratic".into(),
    };
    let domain = match f.domain().carved() {
        Some(c) => format!("a carved domain ({})", describe_set(c)),
        None => "a full domain".into(),
    };
    let overrides = f.overrides().len();
    if overrides == 0 {
        format!("{base} on {domain}")
    } else {
        format!("{base} on {domain}, {overrides} override{}", plural(overrides as u64))
    }
}

fn plural(n: u64) -> &'static str {
    if n == 1 {
        ""
    } else {
        "s"
    }
}

fn yn(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

fn fmt_row(row: &LinearConstraint) -> String {
    let zero = rat_int(0);
    let one = rat_int(1);
    let minus_one = rat_int(-1);
    let mut lhs = String::new();
    for (i, c) in row.form.coeffs.iter().enumerate() {
        if *c == zero {
            continue;
        }
        let var = format!("x{}", i + 1);
        if lhs.is_empty() {
            if *c == one {
                lhs = var;
            } else if *c == minus_one {
                lhs = format!("-{var}");
            } else {
                lhs = format!("{}*{var}", rat_display(c));
            }
        } else if *c > zero {
            if *c == one {
                lhs.push_str(&format!(" + {var}"));
            } else {
                lhs.push_str(&format!(" + {}*{var}", rat_display(c)));
            }
        } else {
            let a = -c.clone();
            if a == one {
                lhs.push_str(&format!(" - {var}"));
            } else {
                lhs.push_str(&format!(" - {}*{var}", rat_display(&a)));
            }
        }
    }
    if lhs.is_empty() {
        lhs.push('0');
    }
    let rel = match row.rel {
        Relation::Le => "<=",
        Relation::Lt => "<",
        Relation::Eq => "=",
    };
    format!("{lhs} {rel} {}", rat_display(&-row.form.constant.clone()))
}

fn fmt_cell(cell: &Cell) -> String {
    let rows: Vec<String> = cell.rows().iter().map(fmt_row).collect();
    format!("{{ {} }}", rows.join("; "))
}

fn fmt_rat_list(values: &[Rat]) -> String {
    let items: Vec<String> = values.iter().map(rat_display).collect();
    format!("[{}]", items.join(", "))
}

fn fmt_fg_weights(w: &FgWeights) -> String {
    format!(
        "points {}, rays {}",
        fmt_rat_list(&w.point_weights),
        fmt_rat_list(&w.ray_weights)
    )
}

fn print_rows(title: &str, rows: &[LinearConstraint]) {
    println!("{title}");
    for row in rows {
        println!("  {}", fmt_row(row));
    }
}

fn print_fgset(indent: &str, set: &FGSet) {
    if set.points().is_empty() && set.rays().is_empty() {
        println!("{indent}empty");
        return;
    }
    if !set.points().is_empty() {
        let items: Vec<String> = set.points().iter().map(|p| point_display(p)).collect();
        println!("{indent}points: {}", items.join(", "));
    }
    if !set.rays().is_empty() {
        let items: Vec<String> = set.rays().iter().map(|p| point_display(p)).collect();
        println!("{indent}rays: {}", items.join(", "));
    }
}

fn print_regularity(reg: &Regularity) {
    match reg {
        Regularity::Holds { witness } => {
            println!("regularity: holds, witness {}", point_display(witness));
        }
        Regularity::Fails { farkas, slack_bound } => {
            println!("regularity: FAILED");
            if let Some(m) = farkas {
                println!("  farkas certificate: {}", fmt_rat_list(m));
            }
            if let Some(m) = slack_bound {
                println!("  slack bound certificate: {}", fmt_rat_list(m));
            }
        }
    }
}

fn print_slater_witness(w: &SlaterWitness, in_ri_dom_f: bool) {
    println!("slater: holds, witness {}", point_display(&w.x0));
    println!("margins: {}", fmt_rat_list(&w.margins));
    println!("witness in ri(dom f): {}", yn(in_ri_dom_f));
}

fn print_solve_status(status: &SolveStatus) {
    match status {
        SolveStatus::Optimal { value, associated_solutions, solutions } => {
            println!("status: optimal");
            println!("value: {}", rat_display(value));
            print_rows("associated solution set:", associated_solutions.rows());
            print_diff_set(solutions);
        }
        SolveStatus::Infeasible => println!("status: infeasible"),
        SolveStatus::Unbounded => println!("status: unbounded"),
    }
}

fn print_constrained_outcome(outcome: &ConstrainedOutcome) {
    match outcome {
        ConstrainedOutcome::Optimal { value, associated_solutions, solutions } => {
            println!("status: optimal");
            println!("value: {}", rat_display(value));
            print_rows("associated solution set:", associated_solutions.rows());
            print_diff_set(solutions);
        }
        ConstrainedOutcome::Infeasible => println!("status: infeasible"),
        ConstrainedOutcome::Unbounded => println!("status: unbounded"),
    }
}

fn print_diff_set(solutions: &DiffSet) {
    if solutions.removed.is_empty() {
        println!("solution set: all of the associated solution set");
    } else {
        let n = solutions.removed.len();
        println!(
            "solution set: the associated solution set minus {n} cell{}",
            plural(n as u64)
        );
        for (i, cell) in solutions.removed.iter().enumerate() {
            println!("  cell {}: {}", i + 1, fmt_cell(cell));
        }
    }
}

fn print_kkt_certificate(cert: &KKTCertificate) {
    println!("point: {}", point_display(&cert.point));
    println!("kkt: certified");
    if cert.active.is_empty() {
        println!("active constraints: none");
    } else {
        let items: Vec<String> = cert.active.iter().map(|i| i.to_string()).collect();
        println!("active constraints: {}", items.join(", "));
    }
    println!("multipliers: {}", fmt_rat_list(&cert.lambdas));
    println!("objective weights: {}", fmt_fg_weights(&cert.objective_weights));
    for (i, w) in cert.constraint_weights.iter().enumerate() {
        if let Some(w) = w {
            println!("constraint {i} weights: {}", fmt_fg_weights(w));
        }
    }
    println!("normal weights: {}", fmt_fg_weights(&cert.normal_weights));
}

fn jval<T: serde::Serialize>(value: &T) -> Value {
    serde_json::to_value(value).expect("report types serialize")
}

fn print_json(value: &Value) -> Result<(), CliError> {
    print!("{}", to_canonical_string(value)?);
    Ok(())
}

fn merge(mut base: Value, extra: Value) -> Value {
    if let (Value::Object(b), Value::Object(e)) = (&mut base, extra) {
        for (k, v) in e {
            b.insert(k, v);
        }
    }
    base
}

fn regularity_json(reg: &Regularity) -> Value {
    match reg {
        Regularity::Holds { witness } => {
            json!({"holds": true, "witness": rats_to_json(witness)})
        }
        Regularity::Fails { farkas, slack_bound } => json!({
            "holds": false,
            "farkas": farkas.as_ref().map(|v| rats_to_json(v)),
            "slack_bound": slack_bound.as_ref().map(|v| rats_to_json(v)),
        }),
    }
}

fn slater_witness_json(w: &SlaterWitness, in_ri_dom_f: bool) -> Value {
    json!({
        "holds": true,
        "witness": rats_to_json(&w.x0),
        "margins": rats_to_json(&w.margins),
        "in_ri_dom_f": in_ri_dom_f,
    })
}

fn solve_status_json(status: &SolveStatus) -> Value {
    match status {
        SolveStatus::Optimal { value, associated_solutions, solutions } => json!({
            "status": "optimal",
            "value": rat_display(value),
            "associated_solutions": jval(&rows_to_json(associated_solutions.rows())),
            "solutions": jval(&diff_set_to_json(solutions)),
        }),
        SolveStatus::Infeasible => json!({"status": "infeasible"}),
        SolveStatus::Unbounded => json!({"status": "unbounded"}),
    }
}

fn constrained_outcome_json(outcome: &ConstrainedOutcome) -> Value {
    match outcome {
        ConstrainedOutcome::Optimal { value, associated_solutions, solutions } => json!({
            "status": "optimal",
            "value": rat_display(value),
            "associated_solutions": jval(&rows_to_json(associated_solutions.rows())),
            "solutions": jval(&diff_set_to_json(solutions)),
        }),
        ConstrainedOutcome::Infeasible => json!({"status": "infeasible"}),
        ConstrainedOutcome::Unbounded => json!({"status": "unbounded"}),
    }
}


fn bracket_json(b: &Bracket) -> Value {
    json!({"lo": extval_to_json(&b.lo), "hi": extval_to_json(&b.hi)})
}
