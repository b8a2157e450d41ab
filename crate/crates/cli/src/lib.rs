//! The `cyp` command: check a module, or a solution against a blueprint.
//!
//! Exit status is 0 when everything is proved, 2 when nothing is wrong but
//! holes remain, and 1 when any diagnostic was raised.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::Parser;
use cyp_core::{
    check_module, check_module_types, match_module, parse_file, render, render_machine,
    resolve_names, Diagnostic, HoleInfo, ModuleReport, Phase, ProofStatus, Sources,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_INCOMPLETE: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "cyp",
    version,
    about = "Check equational proofs about functional programs"
)]
struct Args {
    /// Match the solution against a blueprint first: `-m BLUEPRINT SOLUTION`.
    #[arg(short = 'm', long = "match")]
    blueprint: bool,

    /// Report diagnostics and holes as one `file:line:col: ...` line each.
    #[arg(long)]
    machine: bool,

    /// Exit with 0 instead of 2 when holes remain.
    #[arg(long)]
    allow_incomplete: bool,

    #[arg(value_name = "FILE", required = true)]
    files: Vec<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Invocation {
    Check(PathBuf),
    BlueprintCheck {
        blueprint: PathBuf,
        solution: PathBuf,
    },
}

struct Output<'a> {
    out: &'a mut dyn Write,
    err: &'a mut dyn Write,
    machine: bool,
    sources: Sources,
    file: String,
}

impl Output<'_> {
    fn diagnostic(&mut self, d: &Diagnostic) {
        let text = if self.machine {
            render_machine(d, &self.file) + "\n"
        } else {
            render(d, &self.sources)
        };
        let _ = self.err.write_all(text.as_bytes());
    }

    fn hole(&mut self, h: &HoleInfo) {
        let line = match (self.machine, h.span) {
            (true, Some(s)) => format!(
                "{}:{}:{}: hole: {}",
                self.file, s.start.line, s.start.column, h.kind
            ),
            (true, None) => format!("{}: hole: {}", self.file, h.kind),
            (false, Some(s)) => format!("  hole at {}:{s}: {}", self.file, h.kind),
            (false, None) => format!("  hole in {}: {}", self.file, h.kind),
        };
        let _ = writeln!(self.out, "{line}");
    }
}

fn display(p: &Path) -> String {
    p.display().to_string()
}

fn read(path: &Path) -> Result<String, Diagnostic> {
    std::fs::read_to_string(path)
        .map_err(|e| Diagnostic::new(Phase::Io, format!("cannot read `{}`: {e}", path.display())))
}

/// Run the command line `args` (including the program name) and return
/// the exit status.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let args = match Args::try_parse_from(args) {
        Ok(a) => a,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_ERROR } else { EXIT_OK };
            let target: &mut dyn Write = if e.use_stderr() { stderr } else { stdout };
            let _ = write!(target, "{}", e.render());
            return code;
        }
    };
    let invocation = match (args.blueprint, args.files.as_slice()) {
        (false, [file]) => Invocation::Check(file.clone()),
        (true, [b, s]) => Invocation::BlueprintCheck {
            blueprint: b.clone(),
            solution: s.clone(),
        },
        _ => {
            let _ = writeln!(stderr, "error: expected `cyp FILE` or `cyp -m BLUEPRINT SOLUTION`\n\nUsage: cyp [--machine] [--allow-incomplete] FILE\n       cyp [--machine] [--allow-incomplete] -m BLUEPRINT SOLUTION");
            return EXIT_ERROR;
        }
    };
    execute(
        &invocation,
        args.machine,
        args.allow_incomplete,
        stdout,
        stderr,
    )
}

pub fn execute(
    invocation: &Invocation,
    machine: bool,
    allow_incomplete: bool,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> i32 {
    let (solution, blueprint) = match invocation {
        Invocation::Check(f) => (f, None),
        Invocation::BlueprintCheck {
            blueprint,
            solution,
        } => (solution, Some(blueprint)),
    };
    let mut o = Output {
        out: stdout,
        err: stderr,
        machine,
        sources: Sources::new(),
        file: display(solution),
    };
    match pipeline(solution, blueprint, &mut o.sources) {
        Err(d) => {
            o.diagnostic(&d);
            EXIT_ERROR
        }
        Ok(report) => report_module(&report, &mut o, allow_incomplete),
    }
}

fn pipeline(
    solution: &Path,
    blueprint: Option<&PathBuf>,
    sources: &mut Sources,
) -> Result<ModuleReport, Diagnostic> {
    let name: Arc<str> = Arc::from(display(solution).as_str());
    let text = read(solution).map_err(|d| d.in_file(&name))?;
    sources.insert(&name, &text);
    let mut raw = parse_file(&name, &text)?;
    if let Some(bp) = blueprint {
        let bp_name = display(bp);
        let bp_text = read(bp)?;
        sources.insert(&bp_name, &bp_text);
        let bp_raw = parse_file(&bp_name, &bp_text)?;
        raw = match_module(&bp_raw, raw)?;
    }
    let module = resolve_names(raw).map_err(|d| d.in_file(&name))?;
    let env = check_module_types(&module).map_err(|d| d.in_file(&name))?;
    check_module(&module, &env).map_err(|d| d.in_file(&name))
}

fn report_module(report: &ModuleReport, o: &mut Output<'_>, allow_incomplete: bool) -> i32 {
    for h in &report.program_holes {
        o.hole(h);
    }
    let mut failure = None;
    for lemma in &report.lemmas {
        let verdict = match &lemma.status {
            ProofStatus::Complete => "complete",
            ProofStatus::Incomplete(_) => "incomplete",
            ProofStatus::Failed(_) => "failed",
        };
        let line = if o.machine {
            format!("{}: lemma {}: {verdict}", o.file, lemma.name)
        } else {
            format!("lemma {}: {verdict}", lemma.name)
        };
        let _ = writeln!(o.out, "{line}");
        match &lemma.status {
            ProofStatus::Incomplete(holes) => holes.iter().for_each(|h| o.hole(h)),
            ProofStatus::Failed(d) => failure = Some(d.clone()),
            ProofStatus::Complete => {}
        }
    }
    let holes = report.holes().len();
    if let Some(d) = failure {
        let name: Arc<str> = Arc::from(o.file.as_str());
        o.diagnostic(&d.in_file(&name));
        return EXIT_ERROR;
    }
    if !o.machine {
        let _ = writeln!(
            o.out,
            "{}: {} lemma(s), {} hole(s)",
            if holes == 0 { "complete" } else { "incomplete" },
            report.lemmas.len(),
            holes
        );
    }
    if holes > 0 && !allow_incomplete {
        EXIT_INCOMPLETE
    } else {
        EXIT_OK
    }
}
