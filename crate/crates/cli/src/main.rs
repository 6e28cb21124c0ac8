use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use codeloops::analysis;
use codeloops::classify::{classify, ClassifyOptions};
use codeloops::code::{builtin_golay24, builtin_hamming734, code_to_cvs, cvs_to_code, parse_code};
use codeloops::coded_loop::{CodedLoop, ExtensionBudget};
use codeloops::module::parse_module;
use codeloops::table::LoopTable;
use codeloops::word::{caret_diagnostic, normal_form_in, normal_form_string, parse_word_with, Association, Frame};
use codeloops::{parse_cvs, Cvs, Error, FpVector, ValidationBudget};

/// Largest table written without an explicit --max-order.
const CLI_TABLE_LIMIT: usize = 1 << 12;

#[derive(Parser)]
#[command(name = "codeloops", version, about = "Coded vector spaces, code loops and Moufang loops of class 2")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check the form identities of a coded vector space or module file.
    VerifyCvs {
        file: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Analyze a Cayley table CSV.
    VerifyLoop { table: PathBuf },
    /// Build the coded extension of a space or module file.
    Build {
        file: PathBuf,
        /// Write the Cayley table here.
        #[arg(long)]
        table: Option<PathBuf>,
        /// Refuse to write tables of larger loops.
        #[arg(long, default_value_t = CLI_TABLE_LIMIT)]
        max_order: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Coded vector space of a doubly even code.
    Code2cvs {
        file: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Doubly even code realizing a coded vector space over F_2.
    Cvs2code {
        file: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Adjoint translate of a coded vector space.
    Isotope {
        file: PathBuf,
        /// Comma-separated coordinates of the translating vector.
        #[arg(long, allow_hyphen_values = true)]
        kappa: String,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Count spaces up to isomorphism and up to adjoint translation.
    Classify {
        #[arg(long)]
        p: u32,
        #[arg(long)]
        dim: usize,
        #[arg(long)]
        exponent: u32,
        /// Also keep spaces with trivial associator.
        #[arg(long)]
        include_associative: bool,
        /// Combine every associator table instead of one per orbit.
        #[arg(long)]
        no_prune: bool,
    },
    /// Evaluate a loop word and print its normal form.
    Eval {
        /// Space, module or table file.
        file: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        expr: String,
        /// Read unparenthesized chains as left-nested products (lossy).
        #[arg(long, value_enum, default_value_t = Assoc::Explicit)]
        assoc: Assoc,
    },
    /// Print a built-in code.
    Builtin {
        name: String,
        #[arg(long, conflicts_with = "as_code")]
        as_cvs: bool,
        #[arg(long)]
        as_code: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Assoc {
    Explicit,
    Left,
}

/// A failure with its exit code.
struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::InvalidCode(_) | Error::InvalidLoop(_) => 1,
            _ => 2,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

fn usage(message: impl Into<String>) -> Failure {
    Failure {
        code: 2,
        message: message.into(),
    }
}

type Outcome = Result<(String, u8), Failure>;

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| usage(format!("cannot read {}: {e}", path.display())))
}

fn write_or_print(output: &Option<PathBuf>, text: &str, out: &mut String) -> Result<(), Failure> {
    match output {
        Some(path) => fs::write(path, text).map_err(|e| usage(format!("cannot write {}: {e}", path.display()))),
        None => {
            out.push_str(text);
            Ok(())
        }
    }
}

fn with_file<T>(path: &Path, r: codeloops::Result<T>) -> Result<T, Failure> {
    r.map_err(|e| {
        let mut f = Failure::from(e);
        f.message = format!("{}: {}", path.display(), f.message);
        f
    })
}

/// A space or module file, told apart by its header.
enum Source {
    Cvs(Cvs),
    Module(codeloops::module::CodedModule),
}

fn read_source(path: &Path) -> Result<Source, Failure> {
    let text = read(path)?;
    let header = text
        .lines()
        .map(|l| l.split('#').next().unwrap_or("").trim())
        .find(|l| !l.is_empty())
        .unwrap_or("");
    if header == "module" {
        Ok(Source::Module(with_file(path, parse_module(&text))?))
    } else {
        Ok(Source::Cvs(with_file(path, parse_cvs(&text))?))
    }
}

fn read_cvs(path: &Path) -> Result<Cvs, Failure> {
    with_file(path, parse_cvs(&read(path)?))
}

fn build_loop(source: &Source) -> Result<CodedLoop, Failure> {
    Ok(match source {
        Source::Cvs(c) => CodedLoop::build(c)?,
        Source::Module(m) => m.build()?,
    })
}

fn flag(b: bool) -> &'static str {
    if b {
        "true"
    } else {
        "false"
    }
}

fn verify_cvs(file: &Path, seed: u64) -> Outcome {
    let source = read_source(file)?;
    let budget = ValidationBudget {
        seed,
        ..ValidationBudget::default()
    };
    let report = match &source {
        Source::Cvs(c) => c.validate_axioms(&budget),
        Source::Module(m) => m.validate_axioms(&ValidationBudget {
            exhaustive_limit: 64,
            ..budget
        }),
    };
    let mut out = String::new();
    match &source {
        Source::Cvs(c) => {
            writeln!(out, "# coded vector space over F_{} of dimension {}", c.prime(), c.dim()).unwrap();
            writeln!(out, "p={}", c.prime()).unwrap();
            writeln!(out, "dim={}", c.dim()).unwrap();
        }
        Source::Module(m) => {
            writeln!(out, "# coded module with basis orders {:?}", m.basis_orders()).unwrap();
            writeln!(out, "p={}", m.prime()).unwrap();
            writeln!(out, "dim={}", m.dim()).unwrap();
            writeln!(out, "zorder={}", m.z_order()).unwrap();
        }
    }
    writeln!(out, "exhaustive={}", flag(report.exhaustive)).unwrap();
    writeln!(out, "checks={}", report.tuples_checked).unwrap();
    match &report.failure {
        None => {
            writeln!(out, "valid=true").unwrap();
            Ok((out, 0))
        }
        Some(f) => {
            let w: Vec<String> = f.witness.iter().map(|v| v.to_string()).collect();
            writeln!(out, "valid=false").unwrap();
            writeln!(out, "failed={}", f.axiom).unwrap();
            writeln!(out, "witness={}", w.join(" ")).unwrap();
            Ok((out, 1))
        }
    }
}

fn verify_loop(path: &Path) -> Outcome {
    let table = with_file(path, LoopTable::parse_csv_unchecked(&read(path)?))?;
    let mut out = String::new();
    writeln!(out, "order={}", analysis_order(&table)).unwrap();
    if let Some(d) = table.defect() {
        writeln!(out, "loop=false").unwrap();
        writeln!(out, "defect={d}").unwrap();
        return Ok((out, 1));
    }
    let s = analysis::summarize(&table)?;
    let moufang = analysis::is_moufang(&table);
    writeln!(out, "# {}", if s.moufang { "Moufang loop" } else { "not a Moufang loop" }).unwrap();
    writeln!(out, "moufang={}", flag(s.moufang)).unwrap();
    if let Err(v) = &moufang {
        writeln!(out, "failed={}", v.identity).unwrap();
        let w: Vec<String> = v.witness.iter().map(|x| x.to_string()).collect();
        writeln!(out, "witness={}", w.join(" ")).unwrap();
    }
    writeln!(out, "assoc={}", flag(s.associative)).unwrap();
    match s.class {
        Some(c) => writeln!(out, "class={c}").unwrap(),
        None => writeln!(out, "class=none").unwrap(),
    }
    writeln!(out, "Z={}", s.center).unwrap();
    writeln!(out, "N={}", s.nucleus).unwrap();
    writeln!(out, "C={}", s.moufang_center).unwrap();
    writeln!(out, "Lprime={}", s.derived).unwrap();
    writeln!(out, "Lstar={}", s.associator_subloop).unwrap();
    writeln!(out, "exp_Lstar={}", s.associator_exponent).unwrap();
    match s.frattini {
        Some(f) => writeln!(out, "frattini={f}").unwrap(),
        None => writeln!(out, "frattini=unknown").unwrap(),
    }
    writeln!(out, "small_frattini={}", flag(s.small_frattini)).unwrap();
    writeln!(out, "extraspecial={}", flag(s.extraspecial)).unwrap();
    Ok((out, if s.moufang { 0 } else { 1 }))
}

fn analysis_order(t: &LoopTable) -> usize {
    use codeloops::table::FiniteLoop;
    t.order()
}

fn build(file: &Path, table: &Option<PathBuf>, max_order: usize, seed: u64) -> Outcome {
    let source = read_source(file)?;
    let l = build_loop(&source)?;
    let mut out = String::new();
    writeln!(out, "order={}", l.order()).unwrap();
    writeln!(out, "dim={}", l.dim()).unwrap();
    writeln!(out, "zorder={}", l.z_order()).unwrap();
    let report = l.verify_coded_extension(&ExtensionBudget {
        seed,
        ..ExtensionBudget::default()
    });
    writeln!(out, "extension_exhaustive={}", flag(report.exhaustive)).unwrap();
    writeln!(out, "extension_checks={}", report.checks).unwrap();
    writeln!(out, "extension_verified={}", flag(report.passed())).unwrap();
    if let Some(f) = &report.failure {
        writeln!(out, "failed={}", f.law).unwrap();
        return Ok((out, 1));
    }
    match table {
        Some(path) => {
            let t = l.to_table_with_budget(max_order).map_err(|e| usage(e.to_string()))?;
            fs::write(path, t.to_csv()).map_err(|e| usage(format!("cannot write {}: {e}", path.display())))?;
            writeln!(out, "table={}", path.display()).unwrap();
        }
        None => writeln!(out, "# no --table given, table not written").unwrap(),
    }
    Ok((out, 0))
}

fn code2cvs(file: &Path, output: &Option<PathBuf>) -> Outcome {
    let code = with_file(file, parse_code(&read(file)?))?;
    let cvs = code_to_cvs(&code)?;
    let mut out = String::new();
    write_or_print(output, &cvs.emit(), &mut out)?;
    Ok((out, 0))
}

fn cvs2code(file: &Path, output: &Option<PathBuf>) -> Outcome {
    let cvs = read_cvs(file)?;
    let code = cvs_to_code(&cvs)?;
    let mut out = String::new();
    write_or_print(output, &code.emit(), &mut out)?;
    writeln!(out, "# doubly even code of dimension {}", code.dimension()).unwrap();
    writeln!(out, "length={}", code.length()).unwrap();
    Ok((out, 0))
}

fn isotope(file: &Path, kappa: &str, output: &Option<PathBuf>) -> Outcome {
    let cvs = read_cvs(file)?;
    let coords: Vec<i64> = kappa
        .split(',')
        .map(|t| t.trim().parse::<i64>())
        .collect::<Result<_, _>>()
        .map_err(|_| usage(format!("cannot read --kappa `{kappa}` as comma-separated integers")))?;
    let coords = if coords.len() == 1 && coords[0] == 0 { vec![0; cvs.dim()] } else { coords };
    let k = FpVector::new(&coords, &cvs.moduli())?;
    let t = cvs.adjoint_translate(&k)?;
    let mut out = String::new();
    write_or_print(output, &t.emit(), &mut out)?;
    Ok((out, 0))
}

fn run_classify(p: u32, dim: usize, exponent: u32, include_associative: bool, no_prune: bool) -> Outcome {
    let c = classify(&ClassifyOptions {
        p,
        dim,
        exponent,
        nonassociative: !include_associative,
        prune_alpha: !no_prune,
    })?;
    let mut out = String::new();
    writeln!(out, "enumerated={}", c.enumerated).unwrap();
    writeln!(out, "alpha_orbits={}", c.alpha_orbits).unwrap();
    writeln!(out, "iso_classes={}", c.classes.len()).unwrap();
    writeln!(out, "isotopy_classes={}", c.isotopy_classes.len()).unwrap();
    for (i, class) in c.classes.iter().enumerate() {
        let inv = &class.invariants;
        writeln!(
            out,
            "# class {} ({} spaces): rad(chi) dim {}, rad(alpha) dim {}, rad(alpha) in rad(chi) {}",
            i + 1,
            class.members,
            inv.rad_chi_dim,
            inv.rad_alpha_dim,
            inv.rad_alpha_in_rad_chi
        )
        .unwrap();
        for line in class.representative.emit().lines() {
            writeln!(out, "#   {line}").unwrap();
        }
    }
    for (i, group) in c.isotopy_classes.iter().enumerate() {
        let ids: Vec<String> = group.iter().map(|g| (g + 1).to_string()).collect();
        writeln!(out, "isotopy_class_{}={}", i + 1, ids.join(",")).unwrap();
    }
    Ok((out, 0))
}

fn eval(file: &Path, expr: &str, assoc: Assoc) -> Outcome {
    let assoc = match assoc {
        Assoc::Explicit => Association::Explicit,
        Assoc::Left => Association::Left,
    };
    let word = parse_word_with(expr, assoc).map_err(|e| usage(format!("malformed expression\n{}", caret_diagnostic(expr, &e))))?;
    let text = read(file)?;
    let first = text.lines().map(str::trim).find(|l| !l.is_empty() && !l.starts_with('#')).unwrap_or("");
    let normal = if first.starts_with("n=") {
        let table = with_file(file, LoopTable::parse_csv(&text))?;
        let Some((p, k)) = table.meta() else {
            return Err(usage("table has no p,k header, so its generators are unknown"));
        };
        normal_form_in(&word, &table, &Frame::of_slots(&vec![p; k], p))?
    } else {
        let l = build_loop(&read_source(file)?)?;
        normal_form_string(&word, &l)?
    };
    Ok((format!("{normal}\n"), 0))
}

fn builtin(name: &str, as_cvs: bool) -> Outcome {
    let code = match name {
        "hamming" => builtin_hamming734(),
        "golay" => builtin_golay24(),
        other => return Err(usage(format!("unknown builtin `{other}`; expected hamming or golay"))),
    };
    let text = if as_cvs { code_to_cvs(&code)?.emit() } else { code.emit() };
    Ok((text, 0))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::VerifyCvs { file, seed } => verify_cvs(file, *seed),
        Command::VerifyLoop { table } => verify_loop(table),
        Command::Build {
            file,
            table,
            max_order,
            seed,
        } => build(file, table, *max_order, *seed),
        Command::Code2cvs { file, output } => code2cvs(file, output),
        Command::Cvs2code { file, output } => cvs2code(file, output),
        Command::Isotope { file, kappa, output } => isotope(file, kappa, output),
        Command::Classify {
            p,
            dim,
            exponent,
            include_associative,
            no_prune,
        } => run_classify(*p, *dim, *exponent, *include_associative, *no_prune),
        Command::Eval { file, expr, assoc } => eval(file, expr, *assoc),
        Command::Builtin { name, as_cvs, .. } => builtin(name, *as_cvs),
    };
    match outcome {
        Ok((text, code)) => {
            print!("{text}");
            ExitCode::from(code)
        }
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
