mod record;

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use parmint::catalog::{Catalog, IntegralFamily};
use parmint::expr::{parse, Bindings};
use parmint::quadrature::ToleranceConfig;
use parmint::verifier::{applicable_checks, run_suite, CheckKind, Selection, Verifier};

use record::{to_csv, to_json, ReportRecord};

/// ASCII names accepted on the command line and the symbols they stand for.
const ALIASES: [(&str, &str); 4] = [("l", "λ"), ("a", "α"), ("m", "μ"), ("b", "β")];

#[derive(Parser)]
#[command(name = "parmint", version, about = "Numerical verification of parametric integral families")]
struct Cli {
    /// Family file loaded after the builtins.
    #[arg(long, global = true, env = "PARMINT_USER_FAMILIES", value_name = "FILE")]
    user: Option<PathBuf>,

    #[command(flatten)]
    tol: TolFlags,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct TolFlags {
    /// Relative quadrature tolerance.
    #[arg(long, global = true)]
    rel_tol: Option<f64>,
    /// Absolute quadrature tolerance.
    #[arg(long, global = true)]
    abs_tol: Option<f64>,
    /// Bisection depth limit of the adaptive kernel.
    #[arg(long, global = true)]
    max_depth: Option<u32>,
}

#[derive(Subcommand)]
enum Command {
    /// One line per family: id, reference, parameters.
    List {
        /// Keep families whose id, alias or reference contains this text.
        filter: Option<String>,
    },
    /// Full description of a family, with the parameter name mapping.
    Show { id: String },
    /// Quadrature and closed form at one point, as a JSON record.
    Eval {
        id: String,
        /// Parameter assignment NAME=VALUE; VALUE may be an expression such as pi/4.
        #[arg(long = "param", value_name = "NAME=VALUE")]
        params: Vec<String>,
    },
    /// Run verification checks and write a JSON array of reports.
    Verify {
        /// Family ids or aliases.
        ids: Vec<String>,
        /// Every family in the catalog.
        #[arg(long, conflicts_with = "ids")]
        all: bool,
        /// Comma-separated check kinds (default: all applicable).
        #[arg(long, value_delimiter = ',')]
        checks: Vec<String>,
        /// Worker threads (0 = one per core).
        #[arg(long, default_value_t = 0)]
        jobs: usize,
        /// Report file; stdout when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Evaluate along one parameter at evenly spaced points.
    Sweep {
        id: String,
        /// Swept parameter NAME=START:STOP:COUNT.
        #[arg(long = "param", value_name = "NAME=START:STOP:COUNT")]
        param: String,
        /// Fixed parameters NAME=VALUE.
        #[arg(long, value_name = "NAME=VALUE", value_delimiter = ',')]
        fixed: Vec<String>,
        /// Output file; stdout when absent.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

/// Exit 2: the command could not run as asked.
struct Usage(String);

impl<E: std::fmt::Display> From<E> for Usage {
    fn from(e: E) -> Self {
        Usage(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Usage(msg)) => {
            eprintln!("parmint: {msg}");
            ExitCode::from(2)
        }
    }
}

/// `Ok(pass)` when the command ran.
fn run(cli: Cli) -> Result<bool, Usage> {
    let catalog = match &cli.user {
        Some(path) => Catalog::with_user_file(path)?,
        None => Catalog::builtin(),
    };
    let tol = tolerance(&cli.tol)?;
    match cli.command {
        Command::List { filter } => {
            print!("{}", list(&catalog, filter.as_deref()));
            Ok(true)
        }
        Command::Show { id } => {
            print!("{}", show(catalog.get(&id)?));
            Ok(true)
        }
        Command::Eval { id, params } => {
            let family = catalog.get(&id)?;
            let b = bindings(family, &params)?;
            family.check_bindings(&b)?;
            let rec = ReportRecord::evaluate(&Verifier::new(tol), family, &b)?;
            print!("{}", to_json(&rec));
            Ok(rec.pass)
        }
        Command::Verify { ids, all, checks, jobs, out } => {
            let selection = match (all, ids.is_empty()) {
                (true, _) => Selection::All,
                (false, false) => Selection::Ids(ids),
                (false, true) => return Err(Usage("give family ids or --all".into())),
            };
            let kinds = if checks.is_empty() {
                CheckKind::ALL.to_vec()
            } else {
                checks.iter().map(|c| c.parse()).collect::<Result<Vec<CheckKind>, _>>()?
            };
            let reports = run_suite(&catalog, &selection, &kinds, &tol, jobs)?;
            write_output(out.as_deref(), &to_json(&reports))?;
            let failed: Vec<_> = reports.iter().filter(|r| !r.pass).collect();
            let summary = out.is_some();
            for r in &failed {
                let line = format!("FAIL {} {} max_abs_dev={:e}", r.family_id, r.check_kind, r.max_abs_dev);
                if summary {
                    println!("{line}")
                } else {
                    eprintln!("{line}")
                }
            }
            let line =
                format!("{} reports: {} passed, {} failed", reports.len(), reports.len() - failed.len(), failed.len());
            if summary {
                println!("{line}")
            } else {
                eprintln!("{line}")
            }
            Ok(failed.is_empty())
        }
        Command::Sweep { id, param, fixed, out, format } => {
            let family = catalog.get(&id)?;
            let (name, values) = sweep_spec(family, &param)?;
            let base = bindings(family, &fixed)?;
            if base.contains(&name) {
                return Err(Usage(format!("`{name}` is both swept and fixed")));
            }
            let verifier = Verifier::new(tol);
            let mut records = Vec::with_capacity(values.len());
            for v in values {
                let b = base.clone().with(&name, v);
                family.check_bindings(&b)?;
                records.push(ReportRecord::evaluate(&verifier, family, &b)?);
            }
            let text = match format {
                Format::Csv => to_csv(&name, &records),
                Format::Json => to_json(&records),
            };
            write_output(out.as_deref(), &text)?;
            Ok(records.iter().all(|r| r.pass))
        }
    }
}

fn tolerance(flags: &TolFlags) -> Result<ToleranceConfig, Usage> {
    let mut tol = ToleranceConfig::default();
    if let Some(r) = flags.rel_tol {
        tol.rel_tol = r;
    }
    if let Some(a) = flags.abs_tol {
        tol.abs_tol = a;
    }
    if let Some(d) = flags.max_depth {
        tol.max_depth = d;
    }
    tol.validate()?;
    Ok(tol)
}

fn write_output(path: Option<&Path>, text: &str) -> Result<(), Usage> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| Usage(format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

/// Maps a command-line name (ASCII or the display symbol) to the family's
/// parameter name.
fn param_name(family: &IntegralFamily, name: &str) -> Result<String, Usage> {
    family
        .params
        .iter()
        .find(|p| p.name == name || p.display.as_deref() == Some(name))
        .map(|p| p.name.clone())
        .ok_or_else(|| {
            Usage(format!(
                "family `{}` has no parameter `{name}` (parameters: {})",
                family.id,
                family.param_names().join(", ")
            ))
        })
}

fn number(text: &str) -> Result<f64, Usage> {
    let v = parse(text)
        .map_err(|e| Usage(format!("bad number `{text}`: {e}")))?
        .eval(&Bindings::new())
        .map_err(|e| Usage(format!("bad number `{text}`: {e}")))?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Usage(format!("bad number `{text}`")))
    }
}

fn bindings(family: &IntegralFamily, assignments: &[String]) -> Result<Bindings, Usage> {
    let mut b = Bindings::new();
    for a in assignments {
        let (name, value) = a.split_once('=').ok_or_else(|| Usage(format!("expected NAME=VALUE, got `{a}`")))?;
        let name = param_name(family, name.trim())?;
        if b.contains(&name) {
            return Err(Usage(format!("`{name}` assigned twice")));
        }
        b.set(&name, number(value.trim())?);
    }
    Ok(b)
}

fn sweep_spec(family: &IntegralFamily, spec: &str) -> Result<(String, Vec<f64>), Usage> {
    let bad = || Usage(format!("expected NAME=START:STOP:COUNT, got `{spec}`"));
    let (name, range) = spec.split_once('=').ok_or_else(bad)?;
    let parts: Vec<&str> = range.split(':').collect();
    let [start, stop, count] = parts[..] else { return Err(bad()) };
    let (start, stop) = (number(start)?, number(stop)?);
    let count: usize = count.trim().parse().map_err(|_| bad())?;
    if count < 2 {
        return Err(Usage(format!("sweep needs at least 2 points, got {count}")));
    }
    let n = (count - 1) as f64;
    let values = (0..count).map(|i| (start * (n - i as f64) + stop * i as f64) / n).collect();
    Ok((param_name(family, name.trim())?, values))
}

fn list(catalog: &Catalog, filter: Option<&str>) -> String {
    let rows: Vec<[String; 3]> = catalog
        .families()
        .iter()
        .filter(|f| match filter {
            Some(t) => f.id.contains(t) || f.aliases.iter().any(|a| a.contains(t)) || f.paper_ref.contains(t),
            None => true,
        })
        .map(|f| [f.id.clone(), f.paper_ref.clone(), f.param_names().join(",")])
        .collect();
    let w0 = rows.iter().map(|r| r[0].chars().count()).max().unwrap_or(0);
    let w1 = rows.iter().map(|r| r[1].chars().count()).max().unwrap_or(0);
    let mut out = String::new();
    for [id, r, p] in rows {
        let line = format!("{id:<w0$}  {r:<w1$}  {p}");
        out.push_str(line.trim_end());
        out.push('\n');
    }
    out
}

fn show(f: &IntegralFamily) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "id:          {}", f.id);
    if !f.aliases.is_empty() {
        let _ = writeln!(s, "aliases:     {}", f.aliases.join(", "));
    }
    let _ = writeln!(s, "ref:         {}", f.paper_ref);
    let _ = writeln!(s, "integral:    int_{{{}}}^{{{}}} {} d{}", f.lower, f.upper, f.integrand, f.var);
    let _ = writeln!(s, "closed form: {}", f.closed_form);
    for p in &f.params {
        let grid: Vec<String> = p.grid.iter().map(|g| g.to_string()).collect();
        let _ = writeln!(s, "param:       {} ({}) in {}, grid {}", p.name, p.display_name(), p.range, grid.join(", "));
    }
    for c in &f.constraints {
        let _ = writeln!(s, "constraint:  {c}");
    }
    for p in &f.patches {
        let _ = writeln!(s, "patch:       {} -> {} (radius {:e})", p.point, p.value, p.delta);
    }
    let h = &f.hints;
    let mut hints = Vec::new();
    if h.singular_lower {
        hints.push("singular_lower".to_string());
    }
    if h.singular_upper {
        hints.push("singular_upper".to_string());
    }
    if let Some((omega, kind)) = &h.oscillatory {
        hints.push(format!("oscillatory {kind:?}, frequency {omega}").to_lowercase());
    }
    if h.decay {
        hints.push("decay".to_string());
    }
    if !hints.is_empty() {
        let _ = writeln!(s, "hints:       {}", hints.join("; "));
    }
    let checks: Vec<&str> = applicable_checks(f).into_iter().map(CheckKind::name).collect();
    let _ = writeln!(s, "checks:      {}", checks.join(", "));
    if !f.notes.is_empty() {
        let _ = writeln!(s, "notes:       {}", f.notes);
    }
    let _ = writeln!(s, "\nParameter names on the command line are ASCII; the symbol may be used too:");
    for (ascii, sym) in ALIASES {
        let _ = writeln!(s, "  {ascii} = {sym}");
    }
    s
}
