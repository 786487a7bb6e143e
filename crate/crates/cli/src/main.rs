//! Batch CLI: reads problem files, runs engine computations with oracle
//! verification, and emits structured JSON (plus SVG decomposition plots).
//!
//! Exit codes: 0 success, 1 parse error, 2 precondition violation,
//! 3 verification failure.

mod input;
mod output;
mod plot;

use anyhow::{anyhow, Result};
use clap::{Args, Parser, Subcommand};
use serde_json::json;

use brion_core::brion::{
    brion_continuous, decomposition_check, degenerate_brion_continuous,
    degenerate_brion_discrete_general, degenerate_brion_discrete_v1, dilation_series_continuous,
    dilation_series_discrete, rel_dev,
};
use brion_core::corpus::{standard_corpus, xi_degenerate_2d};
use brion_core::decompose::{decompose_cone, DecomposeMode};
use brion_core::error::Error as CoreError;
use brion_core::euler::{ehrhart_eval, ehrhart_quasi_polynomial, mu_at_zero_exact, mu_value};
use brion_core::eval::EvalCtx;
use brion_core::lattice::Lattice;
use brion_core::levi::{levi_cone, LeviBase};
use brion_core::oracle::{ehrhart_table, lattice_enum_sum, quad_integral};
use brion_core::polytope::face_lattice;
use brion_core::rat::{rat_to_string, Rat};
use brion_core::xi::{is_adapted_point, xi_decomposition, Xi};

use input::{load_problem, parse_xi, Problem};
use output::{complex_json, margin_json, print_json, rat_json, vec_json};

#[derive(Parser)]
#[command(
    name = "brion",
    about = "Exact exponential integrals and lattice sums over rational polytopes"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Working precision in bits.
    #[arg(long, global = true, default_value_t = 256)]
    precision_bits: u32,
    /// Laurent truncation order (defaults to dim + 4).
    #[arg(long, global = true)]
    trunc: Option<i64>,
    /// Seed for the generic-direction draws.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct ProblemArgs {
    /// Problem file (JSON).
    file: String,
    /// Exponent functional, e.g. "re=[1,0];im2pi=[0,1/2]".
    #[arg(long)]
    xi: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Integral of e^{<xi, x>} over the polytope via the degenerate expansion.
    EvalIntegral(ProblemArgs),
    /// Lattice sum of e^{<xi, x>} over the polytope.
    EvalSum(ProblemArgs),
    /// Alternating Levi cones of every xi-constant face.
    LeviCone(ProblemArgs),
    /// The face-wise decomposition, optionally rendered as SVG panels.
    Decompose {
        #[command(flatten)]
        problem: ProblemArgs,
        /// Write a panel plot (2d problems only).
        #[arg(long)]
        plot: Option<String>,
    },
    /// Ehrhart quasi-polynomial values for t = 1..=tmax.
    Ehrhart {
        file: String,
        #[arg(long, default_value_t = 8)]
        tmax: u32,
    },
    /// Dilation series of the integral or sum over t-dilates.
    DilationSeries {
        #[command(flatten)]
        problem: ProblemArgs,
        /// discrete mode (continuous otherwise).
        #[arg(long)]
        discrete: bool,
        /// Probe dilation factors to evaluate.
        #[arg(long, value_delimiter = ',', default_value = "1,2,3")]
        probe: Vec<u32>,
    },
    /// Berline-Vergne mu of a cone (file with "apex"/"rays").
    Mu {
        file: String,
        /// Exact rational value at the origin.
        #[arg(long)]
        at_zero: bool,
        #[arg(long)]
        xi: Option<String>,
    },
    /// Engine-vs-oracle verification on one instance.
    Verify(ProblemArgs),
    /// Run the bundled corpus, including both planar worked examples.
    Corpus,
}

fn main() {
    let cli = Cli::parse();
    let code = match run(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e:#}");
            classify_exit(&e)
        }
    };
    std::process::exit(code);
}

fn classify_exit(e: &anyhow::Error) -> i32 {
    if let Some(core) = e.downcast_ref::<CoreError>() {
        return match core {
            CoreError::Parse(_) => 1,
            CoreError::HolomorphyViolation(_) => 3,
            _ => 2,
        };
    }
    if e.downcast_ref::<serde_json::Error>().is_some()
        || e.downcast_ref::<std::io::Error>().is_some()
    {
        return 1;
    }
    let msg = format!("{e:#}");
    if msg.contains("verification failed") {
        3
    } else if msg.contains("parse") || msg.contains("JSON") || msg.contains("reading") {
        1
    } else {
        2
    }
}

fn ctx_of(cli: &Cli, problem: &Problem) -> EvalCtx {
    EvalCtx::new(
        problem.ip.clone(),
        cli.precision_bits,
        cli.trunc.unwrap_or(problem.dim as i64 + 4),
    )
}

fn need_xi(args: &ProblemArgs, dim: usize) -> Result<Xi> {
    match &args.xi {
        Some(s) => parse_xi(s, dim),
        None => Ok(Xi::zero(dim)),
    }
}

fn run(cli: &Cli) -> Result<()> {
    match &cli.command {
        Command::EvalIntegral(args) => {
            let problem = load_problem(&args.file)?;
            let p = problem
                .polytope
                .as_ref()
                .ok_or_else(|| anyhow!("needs a polytope"))?;
            let xi = need_xi(args, problem.dim)?;
            let ctx = ctx_of(cli, &problem);
            let (total, terms) = degenerate_brion_continuous(p, &xi, &ctx, cli.seed)?;
            let term_json: Vec<_> = terms
                .iter()
                .map(|t| {
                    json!({
                        "face": t.face,
                        "normalized_face_volume": t.normalized_face_volume.to_string_radix(10, Some(30)),
                        "levi_value": complex_json(&t.levi_value),
                        "rate": complex_json(&t.rate),
                        "holomorphy_margin": margin_json(t.holomorphy_margin),
                    })
                })
                .collect();
            print_json(&json!({
                "total": complex_json(&total.value),
                "holomorphy_margin": margin_json(total.holomorphy_margin),
                "terms": term_json,
            }));
            Ok(())
        }
        Command::EvalSum(args) => {
            let problem = load_problem(&args.file)?;
            let p = problem
                .polytope
                .as_ref()
                .ok_or_else(|| anyhow!("needs a polytope"))?;
            let xi = need_xi(args, problem.dim)?;
            let ctx = ctx_of(cli, &problem);
            if is_adapted_point(&xi, &problem.lattice, &problem.ip) {
                let (total, terms) =
                    degenerate_brion_discrete_v1(p, &problem.lattice, &xi, &ctx, cli.seed)?;
                let term_json: Vec<_> = terms
                    .iter()
                    .map(|t| {
                        json!({
                            "face": t.face,
                            "value": complex_json(&t.levi_value),
                            "rate": complex_json(&t.rate),
                            "holomorphy_margin": margin_json(t.holomorphy_margin),
                            "cosets": t.coset_breakdown.iter().map(|(rep, count, v)| json!({
                                "representative": vec_json(rep),
                                "face_point_count": count.to_string(),
                                "cone_value": complex_json(v),
                            })).collect::<Vec<_>>(),
                        })
                    })
                    .collect();
                print_json(&json!({
                    "total": complex_json(&total.value),
                    "holomorphy_margin": margin_json(total.holomorphy_margin),
                    "terms": term_json,
                }));
            } else {
                let total =
                    degenerate_brion_discrete_general(p, &problem.lattice, &xi, &ctx, cli.seed)?;
                print_json(&json!({
                    "total": complex_json(&total.value),
                    "holomorphy_margin": margin_json(total.holomorphy_margin),
                    "note": "functional reduced through the finite-index sublattice",
                }));
            }
            Ok(())
        }
        Command::LeviCone(args) => {
            let problem = load_problem(&args.file)?;
            let p = problem
                .polytope
                .as_ref()
                .ok_or_else(|| anyhow!("needs a polytope"))?;
            let xi = need_xi(args, problem.dim)?;
            let fl = face_lattice(p);
            let dec = xi_decomposition(&fl, &xi, &problem.ip);
            let mut faces = Vec::new();
            for &f in &dec.constant_faces {
                let lc = levi_cone(&fl, f, &xi, &problem.ip, LeviBase::Projected)?;
                faces.push(json!({
                    "face": f,
                    "dim": fl.faces[f].dim,
                    "maximal": dec.maximal_faces.contains(&f),
                    "apex": vec_json(&lc.apex),
                    "terms": lc.terms.iter().map(|t| json!({
                        "coeff": t.coeff,
                        "rays": t.cone.rays.iter().map(|r| vec_json(r)).collect::<Vec<_>>(),
                        "flags": t.provenance,
                    })).collect::<Vec<_>>(),
                }));
            }
            print_json(&json!({ "constant_faces": faces }));
            Ok(())
        }
        Command::Decompose {
            problem: args,
            plot,
        } => {
            let problem = load_problem(&args.file)?;
            let xi = need_xi(args, problem.dim)?;
            if let Some(cone) = &problem.cone {
                let pieces = decompose_cone(cone, DecomposeMode::Discrete)?;
                print_json(&json!({
                    "pieces": pieces.iter().map(|(sign, piece)| json!({
                        "sign": sign,
                        "apex": vec_json(&piece.apex),
                        "rays": piece.rays.iter().map(|r| vec_json(r)).collect::<Vec<_>>(),
                        "open_facets": piece.open_facets,
                    })).collect::<Vec<_>>(),
                }));
                return Ok(());
            }
            let p = problem
                .polytope
                .as_ref()
                .ok_or_else(|| anyhow!("needs a polytope or cone"))?;
            let fl = face_lattice(p);
            let dec = xi_decomposition(&fl, &xi, &problem.ip);
            let faces: Vec<_> = dec
                .constant_faces
                .iter()
                .map(|&f| {
                    json!({
                        "face": f,
                        "dim": fl.faces[f].dim,
                        "vertices": fl.face_vertices(f).iter().map(|v| vec_json(v)).collect::<Vec<_>>(),
                    })
                })
                .collect();
            if let Some(path) = plot {
                plot::plot_decomposition(path, p, &xi, &problem.ip)?;
            }
            print_json(&json!({
                "constant_faces": faces,
                "maximal_faces": dec.maximal_faces,
                "good_faces": dec.good_faces,
            }));
            Ok(())
        }
        Command::Ehrhart { file, tmax } => {
            let problem = load_problem(file)?;
            let p = problem
                .polytope
                .as_ref()
                .ok_or_else(|| anyhow!("needs a polytope"))?;
            let ctx = EvalCtx::new(
                problem.ip.clone(),
                cli.precision_bits,
                problem.dim as i64 + 4,
            );
            let terms = ehrhart_quasi_polynomial(p, &problem.lattice, &ctx, cli.seed)?;
            let values: Vec<_> = (1..=*tmax)
                .map(|t| rat_json(&ehrhart_eval(&terms, t)))
                .collect();
            print_json(&json!({
                "values": values,
                "terms": terms.iter().map(|t| json!({
                    "face": t.face,
                    "degree": t.degree,
                    "period": t.period,
                    "coefficients": t.coefficients.iter().map(rat_json).collect::<Vec<_>>(),
                })).collect::<Vec<_>>(),
            }));
            Ok(())
        }
        Command::DilationSeries {
            problem: args,
            discrete,
            probe,
        } => {
            let problem = load_problem(&args.file)?;
            let p = problem
                .polytope
                .as_ref()
                .ok_or_else(|| anyhow!("needs a polytope"))?;
            let xi = need_xi(args, problem.dim)?;
            let ctx = ctx_of(cli, &problem);
            let series = if *discrete {
                dilation_series_discrete(p, &problem.lattice, &xi, &ctx, cli.seed)?
            } else {
                dilation_series_continuous(p, &xi, &ctx, cli.seed)?
            };
            let probes: Vec<_> = probe
                .iter()
                .map(|&t| json!({ "t": t, "value": complex_json(&series.eval_at(t)) }))
                .collect();
            print_json(&json!({
                "terms": series.terms.iter().map(|t| json!({
                    "face": t.face,
                    "degree": t.poly_degree,
                    "rate_re": rat_json(&t.rate.0),
                    "rate_im2pi": rat_json(&t.rate.1),
                    "period": t.period,
                    "coefficients": t.coefficients.iter().map(complex_json).collect::<Vec<_>>(),
                })).collect::<Vec<_>>(),
                "probes": probes,
            }));
            Ok(())
        }
        Command::Mu { file, at_zero, xi } => {
            let problem = load_problem(file)?;
            let cone = problem
                .cone
                .as_ref()
                .ok_or_else(|| anyhow!("mu needs \"rays\""))?;
            let ctx = EvalCtx::new(
                problem.ip.clone(),
                cli.precision_bits,
                problem.dim as i64 + 4,
            );
            if *at_zero {
                let v = mu_at_zero_exact(cone, &problem.lattice, &ctx, cli.seed)?;
                print_json(&json!({ "mu": rat_to_string(&v) }));
            } else {
                let x = match xi {
                    Some(s) => parse_xi(s, problem.dim)?,
                    None => Xi::zero(problem.dim),
                };
                let v = mu_value(cone, &problem.lattice, &x, &ctx, false, cli.seed)?;
                print_json(&json!({ "mu": complex_json(&v) }));
            }
            Ok(())
        }
        Command::Verify(args) => {
            let problem = load_problem(&args.file)?;
            let p = problem
                .polytope
                .as_ref()
                .ok_or_else(|| anyhow!("needs a polytope"))?;
            let xi = need_xi(args, problem.dim)?;
            let ctx = ctx_of(cli, &problem);
            let report = verify_instance(p, &problem, &xi, &ctx, cli.seed)?;
            let ok = report["pass"].as_bool().unwrap_or(false);
            print_json(&report);
            if !ok {
                return Err(anyhow!("verification failed"));
            }
            Ok(())
        }
        Command::Corpus => {
            let corpus = standard_corpus().map_err(anyhow::Error::from)?;
            let mut all_ok = true;
            let mut rows = Vec::new();
            for inst in &corpus {
                let ctx = EvalCtx::new(
                    inst.polytope.inner_product().clone(),
                    cli.precision_bits,
                    inst.dim as i64 + 4,
                );
                let xi = if inst.dim == 2 {
                    xi_degenerate_2d()
                } else {
                    brion_core::corpus::generic_functionals(&inst.polytope, 1, 5)[0].clone()
                };
                let problem = Problem {
                    dim: inst.dim,
                    polytope: Some(inst.polytope.clone()),
                    cone: None,
                    lattice: Lattice::standard(inst.dim),
                    ip: inst.polytope.inner_product().clone(),
                };
                let report = verify_instance(&inst.polytope, &problem, &xi, &ctx, cli.seed)?;
                let ok = report["pass"].as_bool().unwrap_or(false);
                all_ok &= ok;
                rows.push(json!({ "name": inst.name, "report": report }));
            }
            print_json(&json!({ "instances": rows, "pass": all_ok }));
            if !all_ok {
                return Err(anyhow!("verification failed on the corpus"));
            }
            Ok(())
        }
    }
}

/// One instance's engine-vs-oracle comparison: continuous total against
/// quadrature, discrete total against enumeration, the decomposition
/// identity at a few probes, and an Ehrhart spot check.
fn verify_instance(
    p: &brion_core::polytope::Polytope,
    problem: &Problem,
    xi: &Xi,
    ctx: &EvalCtx,
    seed: u64,
) -> Result<serde_json::Value> {
    let mut pass = true;
    let cont = brion_continuous(p, xi, ctx, seed)?;
    let (qre, qim) = quad_integral(p, xi, &problem.ip, 1e-12)?;
    let scale = (qre * qre + qim * qim).sqrt().max(1e-300);
    let dev_cont =
        ((cont.value.re.to_f64() - qre).powi(2) + (cont.value.im.to_f64() - qim).powi(2)).sqrt()
            / scale;
    pass &= dev_cont < 1e-10;
    let disc = degenerate_brion_discrete_general(p, &problem.lattice, xi, ctx, seed)?;
    let zero = vec![Rat::from_integer(0.into()); problem.dim];
    let (_, oracle) = lattice_enum_sum(p, &problem.lattice, &zero, xi, &problem.ip, ctx.prec)?;
    let dev_disc = rel_dev(&disc.value, &oracle);
    pass &= dev_disc < 1e-25;
    let dec = decomposition_check(p, xi, ctx, 3, Some(&problem.lattice), seed)?;
    pass &= dec.max_rel_dev_continuous < 1e-25 && dec.max_rel_dev_discrete.unwrap_or(0.0) < 1e-25;
    let terms = ehrhart_quasi_polynomial(p, &problem.lattice, ctx, seed)?;
    let table = ehrhart_table(p, &problem.lattice, 4)?;
    let mut ehrhart_ok = true;
    for t in 1..=4u32 {
        ehrhart_ok &= ehrhart_eval(&terms, t) == Rat::from_integer(table[(t - 1) as usize].clone());
    }
    pass &= ehrhart_ok;
    Ok(json!({
        "continuous": {
            "total": complex_json(&cont.value),
            "holomorphy_margin": margin_json(cont.holomorphy_margin),
            "max_deviation": dev_cont,
        },
        "discrete": {
            "total": complex_json(&disc.value),
            "holomorphy_margin": margin_json(disc.holomorphy_margin),
            "max_deviation": dev_disc,
        },
        "decomposition": {
            "probes": dec.probes,
            "max_deviation_continuous": dec.max_rel_dev_continuous,
            "max_deviation_discrete": dec.max_rel_dev_discrete,
        },
        "ehrhart_matches": ehrhart_ok,
        "pass": pass,
    }))
}
