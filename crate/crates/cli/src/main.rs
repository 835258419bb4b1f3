use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use anyhow::{anyhow, bail, Context};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::Value;

use va_core::algebra::{check_axioms, check_strong_grading, weight_shift_check, CheckConfig, VertexAlgebra};
use va_core::duality::{check_duality, check_pz_from_module, FitBounds};
use va_core::examples::{algebra_to_json, ingest_file, module_to_json, Structure};
use va_core::expr::{parse_expr, Alphabet, Env, Expr};
use va_core::grading::{Space, Vector};
use va_core::lie::{
    associativity_iso, check_intertwining, contragredient_rep, embed_inj, pentagon, same_image, sl2_spins, tensor_diag,
    Bracketing, IntertwiningMap, LieAlgebra, LieFile, LieRep,
};
use va_core::modules::{
    check_module_axioms, check_opposite_identities, compare_structures, contragredient, weight_formula_check, Module,
};
use va_core::{CheckReport, Scalar, Window};

#[derive(Parser)]
#[command(name = "va", version, about = "Exact formal calculus and vertex algebra checks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Exponent window ±N for every formal variable.
    #[arg(long, global = true, default_value_t = 8)]
    window: i64,
    /// Weight bound for sampled basis vectors.
    #[arg(long = "max-wt", global = true, default_value_t = 8)]
    max_wt: i64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    report: Format,
    /// Write the primary output here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Subcommand)]
enum Command {
    /// Expand an expression as a windowed series.
    Expand {
        expr: String,
        /// Algebra or module file giving meaning to Y, Yo and {vectors}.
        #[arg(long)]
        structure: Option<PathBuf>,
    },
    /// Take the formal residue of an expression in one variable.
    Res {
        expr: String,
        var: String,
        #[arg(long)]
        structure: Option<PathBuf>,
    },
    /// Run the axiom suite of an algebra, module or Lie file.
    Check { file: PathBuf },
    /// Build the contragredient module and verify it.
    Contragredient { file: PathBuf },
    /// Rationality, commutativity and associativity of matrix coefficients.
    Duality {
        file: PathBuf,
        /// w' v1 v2 w, or v w1 w2 with --pz.
        #[arg(long, num_args = 3..=4, required = true)]
        args: Vec<String>,
        #[arg(long, default_value = "2,2,2,4")]
        bounds: FitBounds,
        /// Check the P(z) Jacobi identity at this z instead.
        #[arg(long)]
        pz: Option<Scalar>,
    },
    /// Tensor product constructions for a Lie algebra file.
    Lie {
        #[arg(value_enum)]
        action: LieAction,
        file: PathBuf,
    },
    /// Load and validate a structure file.
    Ingest {
        file: PathBuf,
        /// Also run the check suite.
        #[arg(long)]
        check: bool,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum LieAction {
    Tensor,
    Assoc,
    Contragredient,
    Intertwine,
}

enum Outcome {
    Report(CheckReport),
    Text(String),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(Outcome::Text(s)) => match emit(&cli, &s) {
            Ok(()) => ExitCode::SUCCESS,
            Err(e) => fatal(e),
        },
        Ok(Outcome::Report(r)) => {
            let text = match cli.report {
                Format::Json => serde_json::to_string_pretty(&r.to_json()).expect("report serializes"),
                Format::Text => r.to_string(),
            };
            if let Err(e) = emit(&cli, &text) {
                return fatal(e);
            }
            if r.all_passed() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => fatal(e),
    }
}

fn fatal(e: anyhow::Error) -> ExitCode {
    eprintln!("error: {e:#}");
    ExitCode::from(2)
}

fn emit(cli: &Cli, text: &str) -> anyhow::Result<()> {
    match &cli.out {
        Some(p) if !matches!(cli.command, Command::Contragredient { .. } | Command::Ingest { .. }) => {
            fs::write(p, format!("{text}\n")).with_context(|| format!("writing {}", p.display()))
        }
        _ => {
            println!("{text}");
            Ok(())
        }
    }
}

fn run(cli: &Cli) -> anyhow::Result<Outcome> {
    if cli.window < 0 {
        bail!("--window must be nonnegative");
    }
    let cfg = CheckConfig::new(-cli.max_wt, cli.max_wt, cli.window);
    match &cli.command {
        Command::Expand { expr, structure } => {
            let e = parse_expr(expr)?;
            expand(cli, &e, structure.as_deref())
        }
        Command::Res { expr, var, structure } => {
            if !Alphabet::default().contains(var) {
                bail!("unknown variable {var:?}");
            }
            let e = Expr::Res(var.clone(), Box::new(parse_expr(expr)?));
            expand(cli, &e, structure.as_deref())
        }
        Command::Check { file } => Ok(Outcome::Report(check_structure(&load(file)?, &cfg)?)),
        Command::Contragredient { file } => contragredient_cmd(cli, file, &cfg),
        Command::Duality { file, args, bounds, pz } => {
            let m = load_module(file)?;
            let report = match pz {
                Some(z) => {
                    let [v, w1, w2] = args.as_slice() else { bail!("--pz takes three vectors: v w1 w2") };
                    let v = vector_arg(&m.algebra.space, v)?;
                    let (w1, w2) = (vector_arg(&m.space, w1)?, vector_arg(&m.space, w2)?);
                    check_pz_from_module(&m, z, &v, &w1, &w2, cli.window)
                }
                None => {
                    let [wp, v1, v2, w] = args.as_slice() else { bail!("duality takes four vectors: w' v1 v2 w") };
                    let wp = vector_arg(&m.space, wp)?;
                    let (v1, v2) = (vector_arg(&m.algebra.space, v1)?, vector_arg(&m.algebra.space, v2)?);
                    let w = vector_arg(&m.space, w)?;
                    check_duality(&m, &wp, &v1, &v2, &w, cli.window, *bounds)
                }
            };
            Ok(Outcome::Report(report))
        }
        Command::Lie { action, file } => {
            let Structure::Lie(lf) = load(file)? else { bail!("{} is not a Lie file", file.display()) };
            Ok(Outcome::Report(lie_cmd(*action, &lf)?))
        }
        Command::Ingest { file, check } => {
            let s = load(file)?;
            if let Some(p) = &cli.out {
                let v = canonical_json(&s);
                fs::write(p, serde_json::to_string_pretty(&v)? + "\n").with_context(|| format!("writing {}", p.display()))?;
            }
            if *check {
                return Ok(Outcome::Report(check_structure(&s, &cfg)?));
            }
            Ok(Outcome::Text(summary(&s)))
        }
    }
}

fn load(file: &Path) -> anyhow::Result<Structure> {
    ingest_file(file).with_context(|| format!("loading {}", file.display()))
}

fn load_module(file: &Path) -> anyhow::Result<Arc<Module>> {
    match load(file)? {
        Structure::Algebra(a) => Ok(Module::adjoint(&a)),
        Structure::Module(m) => Ok(m),
        Structure::Lie(_) => bail!("{} is a Lie file, expected an algebra or module", file.display()),
    }
}

/// A basis name, optionally with a trailing `*` marking the dual basis vector.
fn vector_arg(space: &Space, name: &str) -> anyhow::Result<Vector> {
    let bare = name.strip_suffix('*').unwrap_or(name);
    space
        .id_of(bare)
        .map(Vector::basis)
        .ok_or_else(|| anyhow!("no basis vector named {bare:?}"))
}

fn expand(cli: &Cli, e: &Expr, structure: Option<&Path>) -> anyhow::Result<Outcome> {
    let vars: Vec<String> = Alphabet::default().names().map(str::to_string).collect();
    let names: Vec<&str> = vars.iter().map(String::as_str).collect();
    let window = Window::uniform(&names, -cli.window, cli.window);
    let mut env = Env::new(window.clone());
    let module = match structure {
        Some(p) => Some(load_module(p)?),
        None => None,
    };
    if let Some(m) = &module {
        env = env.with_module(m.clone());
    }
    let value = env.eval(e)?;
    Ok(Outcome::Text(value.render(&window, module.as_deref())?))
}

fn check_algebra(alg: &Arc<VertexAlgebra>, cfg: &CheckConfig) -> CheckReport {
    let mut report = check_axioms(alg, cfg);
    if alg.kind.is_graded() {
        report.merge(check_strong_grading(alg, cfg));
        report.merge(weight_shift_check(alg, cfg));
    }
    report
}

fn check_module(m: &Module, cfg: &CheckConfig) -> CheckReport {
    let mut report = check_module_axioms(m, cfg);
    report.merge(check_opposite_identities(m, cfg));
    if m.is_graded() {
        report.merge(weight_formula_check(m, cfg));
    }
    report
}

fn check_structure(s: &Structure, cfg: &CheckConfig) -> anyhow::Result<CheckReport> {
    Ok(match s {
        Structure::Algebra(a) => check_algebra(a, cfg),
        Structure::Module(m) => check_module(m, cfg),
        Structure::Lie(lf) => lie_cmd(LieAction::Intertwine, lf)?,
    })
}

fn contragredient_cmd(cli: &Cli, file: &Path, cfg: &CheckConfig) -> anyhow::Result<Outcome> {
    let m = load_module(file)?;
    let dual = contragredient(&m)?;
    let v = module_to_json(&dual);
    let text = serde_json::to_string_pretty(&v)?;
    match &cli.out {
        Some(p) => fs::write(p, text + "\n").with_context(|| format!("writing {}", p.display()))?,
        None => eprintln!("{text}"),
    }
    let mut report = check_module(&dual, cfg);
    let double = contragredient(&dual)?;
    report.merge(compare_structures(&double, &m, cfg));
    Ok(Outcome::Report(report))
}

fn lie_cmd(action: LieAction, lf: &LieFile) -> anyhow::Result<CheckReport> {
    let need = |n: usize| -> anyhow::Result<()> {
        if lf.modules.len() < n {
            bail!("this command needs at least {n} modules, the file has {}", lf.modules.len());
        }
        Ok(())
    };
    let mods = &lf.modules;
    Ok(match action {
        LieAction::Tensor => {
            need(2)?;
            let mut report = CheckReport::new(format!("{}: tensor product", lf.algebra.name));
            let (t, _) = tensor_diag(&mods[0], &mods[1])?;
            report.pass("canonical_map", format!("dimension {}", t.dim));
            if lf.algebra.basis == LieAlgebra::sl2().basis {
                let spins = sl2_spins(&t)?;
                let listing: Vec<String> = spins.iter().map(|(j, m)| format!("spin {j} x{m}")).collect();
                report.pass("decomposition", listing.join(", "));
            }
            report
        }
        LieAction::Assoc => {
            need(3)?;
            let (a, b, c) = (&mods[0], &mods[1], &mods[2]);
            let (inj1, r1) = embed_inj(Bracketing::Inj1, a, b, c)?;
            let (inj2, r2) = embed_inj(Bracketing::Inj2, a, b, c)?;
            let mut report = CheckReport::new(format!("{}: associativity", lf.algebra.name));
            report.merge(r1);
            report.merge(r2);
            let same = same_image(&inj1, &inj2)?;
            report.record(
                "same_image",
                "inj1 and inj2 have equal images",
                Ok((!same).then(|| va_core::Witness::new("images", None, "inj1", "inj2"))),
            );
            let (_, r) = associativity_iso(a, b, c)?;
            report.merge(r);
            if mods.len() >= 4 {
                report.merge(pentagon([&mods[0], &mods[1], &mods[2], &mods[3]])?);
            }
            report
        }
        LieAction::Contragredient => {
            let mut report = CheckReport::new(format!("{}: contragredient modules", lf.algebra.name));
            for (i, w) in mods.iter().enumerate() {
                let dual = contragredient_rep(w);
                let outcome = LieRep::new(lf.algebra.clone(), dual.matrices.clone()).map(|_| None);
                report.record(&format!("module{i}_dual_is_module"), "", outcome);
                let back = contragredient_rep(&dual);
                let same = back == *w;
                report.record(
                    &format!("module{i}_double_dual"),
                    "W'' = W",
                    Ok((!same).then(|| va_core::Witness::new(format!("module {i}"), None, "W''", "W"))),
                );
            }
            report
        }
        LieAction::Intertwine => {
            let mut report = CheckReport::new(format!("{}: intertwining maps", lf.algebra.name));
            if lf.maps.is_empty() {
                report.pass("modules", format!("{} modules load as representations", mods.len()));
            }
            for spec in &lf.maps {
                let map = IntertwiningMap { matrix: spec.matrix.clone() };
                let mut r = check_intertwining(&map, &mods[spec.source.0], &mods[spec.source.1], &mods[spec.target]);
                r.checks.iter_mut().for_each(|c| c.name = format!("{}_{}", spec.name, c.name));
                report.merge(r);
            }
            report
        }
    })
}

fn canonical_json(s: &Structure) -> Value {
    match s {
        Structure::Algebra(a) => algebra_to_json(a),
        Structure::Module(m) => module_to_json(m),
        Structure::Lie(lf) => lf.to_json(),
    }
}

fn summary(s: &Structure) -> String {
    let dim = |sp: &Space| sp.dim().map_or("infinite".to_string(), |d| d.to_string());
    match s {
        Structure::Algebra(a) => format!("algebra {:?}: {} kind, dimension {}", a.name, a.kind.name(), dim(&a.space)),
        Structure::Module(m) => format!("module {:?} over {:?}: dimension {}", m.name, m.algebra.name, dim(&m.space)),
        Structure::Lie(lf) => format!(
            "Lie algebra {:?} of dimension {}: {} modules, {} maps",
            lf.algebra.name,
            lf.algebra.dim(),
            lf.modules.len(),
            lf.maps.len()
        ),
    }
}
