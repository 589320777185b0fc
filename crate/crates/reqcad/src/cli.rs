//! Command-line front end.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use clap::{Parser, Subcommand};
use reqcad_core::cadlink::{build_bom, emit_check_rules, evaluate, parse_components, parse_rules, BomNode, CheckRule};
use reqcad_core::cg::Allocator;
use reqcad_core::pipeline::{analyze, Analysis, ResourceTexts, Resources, Severity};
use reqcad_core::project::{read_resources, requirement_schema, ExportKind, Project};
use reqcad_core::zspec::ZSchema;

/// Exit code when diagnostics, failed rules or unresolved rules are present.
pub const EXIT_DIAGNOSTICS: u8 = 1;
/// Exit code for usage errors.
pub const EXIT_USAGE: u8 = 2;

#[derive(Debug, Parser)]
#[command(name = "reqcad", version, about = "Compile controlled-English requirements into conceptual graphs, logic, Z schemas and CAD check rules")]
pub struct Cli {
    /// Grammar file replacing the built-in rules.
    #[arg(long, global = true)]
    pub grammar: Option<PathBuf>,
    /// Lexicon file replacing the built-in lexicon.
    #[arg(long, global = true)]
    pub lexicon: Option<PathBuf>,
    /// Type hierarchy file replacing the built-in hierarchy.
    #[arg(long, global = true)]
    pub hierarchy: Option<PathBuf>,
    /// Project directory (`serve`: directory holding projects).
    #[arg(long, global = true)]
    pub project: Option<PathBuf>,
    #[arg(long, global = true, default_value_t = 8080)]
    pub port: u16,
    /// Plain ASCII logic and schema boxes.
    #[arg(long, global = true)]
    pub ascii: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print every constituent tree.
    Parse { text: Vec<String> },
    /// Print the conceptual graphs in linear form.
    Cg { text: Vec<String> },
    /// Print the first-order formulas.
    Fol { text: Vec<String> },
    /// Print the Z schema.
    Z { text: Vec<String> },
    /// Print a BOM as JSON, built from a components table when given.
    Bom {
        #[arg(long)]
        components: Option<PathBuf>,
    },
    /// Evaluate check rules against a BOM. Rules come from `--rules`, from the
    /// given requirement sentences, or from the project.
    Check {
        #[arg(long)]
        bom: Option<PathBuf>,
        #[arg(long)]
        rules: Option<PathBuf>,
        /// Print the rules before the report.
        #[arg(long)]
        print_rules: bool,
        /// One requirement sentence per argument.
        sentences: Vec<String>,
    },
    /// Run the HTTP service.
    Serve,
    /// Create a project directory with the built-in resources.
    Init {
        dir: PathBuf,
        #[arg(long)]
        name: Option<String>,
    },
    /// Add a requirement to the project.
    Add { text: Vec<String> },
    /// Remove a requirement from the project.
    Remove { id: String },
    /// Print a project artifact: cg, fol, z, bom, rules or network.
    Export { kind: String },
}

fn read(path: &Path) -> anyhow::Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

impl Cli {
    fn texts(&self) -> anyhow::Result<ResourceTexts> {
        let mut texts = match &self.project {
            Some(dir) => read_resources(&dir.join("resources"))?,
            None => ResourceTexts::fixture(),
        };
        if let Some(p) = &self.grammar {
            texts.grammar = read(p)?;
        }
        if let Some(p) = &self.lexicon {
            texts.lexicon = read(p)?;
        }
        if let Some(p) = &self.hierarchy {
            texts.hierarchy = read(p)?;
        }
        Ok(texts)
    }

    fn resources(&self) -> anyhow::Result<Resources> {
        Ok(self.texts()?.compile()?)
    }

    fn project(&self) -> anyhow::Result<Project> {
        let Some(dir) = &self.project else { bail!("this command needs --project <dir>") };
        Ok(Project::open(dir)?)
    }
}

fn sentence(words: &[String]) -> anyhow::Result<String> {
    let text = words.join(" ");
    if text.trim().is_empty() {
        bail!("no requirement text given");
    }
    Ok(text)
}

fn report_diagnostics(a: &Analysis, err: &mut dyn Write) -> std::io::Result<()> {
    for d in &a.diagnostics {
        let severity = match d.severity {
            Severity::Error => "error",
            Severity::Warning => "warning",
        };
        let stage = serde_json::to_value(d.stage).ok().and_then(|v| v.as_str().map(str::to_string)).unwrap_or_default();
        match d.span {
            Some((s, e)) => writeln!(err, "{severity}[{stage}] tokens {s}..{e}: {}", d.message)?,
            None => writeln!(err, "{severity}[{stage}]: {}", d.message)?,
        }
    }
    Ok(())
}

fn exit_for(a: &Analysis) -> u8 {
    if a.has_errors() {
        EXIT_DIAGNOSTICS
    } else {
        0
    }
}

/// Runs one command and returns the process exit code.
pub fn run(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> anyhow::Result<u8> {
    match &cli.command {
        Command::Parse { text } => {
            let res = cli.resources()?;
            let text = sentence(text)?;
            let a = analyze(&text, "R1", &res, &mut Allocator::new());
            report_diagnostics(&a, err)?;
            if a.parse.is_some() {
                let tokens = reqcad_core::lexicon::segment(&text, "R1")?;
                for tree in reqcad_core::syntax::parse(&tokens, &res.lexicon, &res.grammar)? {
                    writeln!(out, "{tree}")?;
                }
            }
            Ok(exit_for(&a))
        }
        Command::Cg { text } => {
            let a = analyze(&sentence(text)?, "R1", &cli.resources()?, &mut Allocator::new());
            report_diagnostics(&a, err)?;
            for l in &a.linear {
                writeln!(out, "{l}")?;
            }
            Ok(exit_for(&a))
        }
        Command::Fol { text } => {
            let a = analyze(&sentence(text)?, "R1", &cli.resources()?, &mut Allocator::new());
            report_diagnostics(&a, err)?;
            for f in &a.formulas {
                writeln!(out, "{}", f.render(cli.ascii))?;
            }
            Ok(exit_for(&a))
        }
        Command::Z { text } => {
            let res = cli.resources()?;
            let a = analyze(&sentence(text)?, "R1", &res, &mut Allocator::new());
            report_diagnostics(&a, err)?;
            match requirement_schema(&a, &res, &mut BTreeMap::new()) {
                Ok(s) => write!(out, "{}", s.render(cli.ascii))?,
                Err(e) => {
                    writeln!(err, "error[z]: {e}")?;
                    return Ok(EXIT_DIAGNOSTICS);
                }
            }
            Ok(exit_for(&a))
        }
        Command::Bom { components } => {
            let res = cli.resources()?;
            let bom = match components {
                Some(path) => {
                    let built = build_bom(&parse_components(&read(path)?)?, &res.ontology.hierarchy)?;
                    for w in &built.warnings {
                        writeln!(err, "warning[bom]: {w}")?;
                    }
                    built.root
                }
                None => res.bom.context("no BOM in the resources")?,
            };
            writeln!(out, "{}", bom.to_json())?;
            Ok(0)
        }
        Command::Check { bom, rules, print_rules, sentences } => {
            let res = cli.resources()?;
            let bom = match bom {
                Some(path) => BomNode::from_json(&read(path)?)?,
                None => res.bom.clone().context("no BOM given and none in the resources")?,
            };
            let (rules, code) = check_rules(cli, &res, &bom, rules.as_deref(), sentences, err)?;
            if *print_rules {
                write!(out, "{}", reqcad_core::cadlink::render_rules(&rules))?;
            }
            let report = evaluate(&rules, &bom);
            write!(out, "{}", report.render())?;
            Ok(if report.all_pass() { code } else { EXIT_DIAGNOSTICS })
        }
        Command::Serve => {
            let root = cli.project.clone().unwrap_or_else(|| PathBuf::from("projects"));
            let rt = tokio::runtime::Runtime::new()?;
            rt.block_on(crate::service::serve(&root, cli.port))?;
            Ok(0)
        }
        Command::Init { dir, name } => {
            let id = dir.file_name().and_then(|s| s.to_str()).unwrap_or("project").to_string();
            let name = name.clone().unwrap_or_else(|| id.clone());
            Project::create(dir, &id, &name, cli.texts()?)?;
            writeln!(out, "created project {id} in {}", dir.display())?;
            Ok(0)
        }
        Command::Add { text } => {
            let mut p = cli.project()?;
            let added = p.add_requirement(&sentence(text)?)?;
            let r = &added.requirement;
            writeln!(out, "{}", r.id)?;
            for l in &r.analysis.linear {
                writeln!(out, "{l}")?;
            }
            for f in &r.analysis.formulas {
                writeln!(out, "{}", f.render(cli.ascii))?;
            }
            for c in &added.new_conflicts {
                writeln!(
                    out,
                    "conflict: {} / {} over {} ({})",
                    c.action_a,
                    c.action_b,
                    c.shared.join(", "),
                    c.requirements.join(", ")
                )?;
            }
            report_diagnostics(&r.analysis, err)?;
            Ok(exit_for(&r.analysis))
        }
        Command::Remove { id } => {
            let mut p = cli.project()?;
            p.remove_requirement(id)?;
            writeln!(out, "removed {id}")?;
            Ok(0)
        }
        Command::Export { kind } => {
            let kind: ExportKind = kind.parse()?;
            let p = cli.project()?;
            match p.export(kind, cli.ascii) {
                Ok(text) => {
                    write!(out, "{text}")?;
                    Ok(0)
                }
                Err(e @ reqcad_core::project::ProjectError::NothingToExport(_)) => {
                    writeln!(err, "{e}")?;
                    Ok(EXIT_DIAGNOSTICS)
                }
                Err(e) => Err(e.into()),
            }
        }
    }
}

/// Rules from a rule file, from sentences, or from the project's schemas.
fn check_rules(
    cli: &Cli,
    res: &Resources,
    bom: &BomNode,
    rules: Option<&Path>,
    sentences: &[String],
    err: &mut dyn Write,
) -> anyhow::Result<(Vec<CheckRule>, u8)> {
    if let Some(path) = rules {
        return Ok((parse_rules(&read(path)?)?, 0));
    }
    let mut code = 0;
    let schemas: Vec<ZSchema> = if sentences.is_empty() {
        cli.project()?.schemas()
    } else {
        let mut alloc = Allocator::new();
        let mut taken = BTreeMap::new();
        let mut out = Vec::new();
        for (i, s) in sentences.iter().enumerate() {
            let a = analyze(s, &format!("R{}", i + 1), res, &mut alloc);
            report_diagnostics(&a, err)?;
            code = code.max(exit_for(&a));
            match requirement_schema(&a, res, &mut taken) {
                Ok(schema) => out.push(schema),
                Err(e) => {
                    writeln!(err, "error[z]: {e}")?;
                    code = EXIT_DIAGNOSTICS;
                }
            }
        }
        out
    };
    Ok((emit_check_rules(&schemas, bom, &res.bindings)?, code))
}
