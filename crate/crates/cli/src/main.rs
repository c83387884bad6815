//! `ordspace`: checks, approximation pipelines and certificates for
//! left-orderable groups.

mod certificate;
mod grammar;
mod plot;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use certificate::{Certificate, Parameters, Run};
use ordspace::cones::{Property, SubgroupDescriptor, Verdict};
use ordspace::elements::set_default_budget;
use ordspace::{Error, Family};

#[derive(Parser)]
#[command(name = "ordspace", version, about = "Left orders on groups: checks, approximations and certificates")]
#[command(after_help = "Environment: ORDSPACE_BUDGET overrides the element budget for ball enumeration.\n\
Exit codes: 0 success, 1 refutation or certificate mismatch, 2 usage or parse error, 3 budget exceeded.\n\
Cone terms are described in docs/descriptor-grammar.md.")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Group family: f:<n>, f:inf, z:<k>, t:<n> or b:<n>
    #[arg(long)]
    group: Option<String>,
    /// Cone term (magnus:2, flag:[(1,r2)], dehornoy:3, tower:+-, @file.json, ...)
    #[arg(long)]
    cone: Option<String>,
    /// Write the run certificate (JSON) to this path
    #[arg(long)]
    emit_certificate: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Check a cone property on a ball
    Check {
        #[command(flatten)]
        common: Common,
        /// Word-length radius of the checked ball
        #[arg(long, default_value_t = 3)]
        radius: usize,
        /// axioms, conradian, bi-invariance, convex or least-positive
        #[arg(long, default_value = "axioms")]
        property: String,
        /// Subgroup descriptor (JSON) for the convex property
        #[arg(long)]
        subgroup: Option<String>,
    },
    /// Classify one element
    Classify {
        #[command(flatten)]
        common: Common,
        /// Element text: x1.x2^-1, (1,-2) or s1.s2^-1
        #[arg(long)]
        element: String,
    },
    /// Approximate a flag order on Z^k by a discrete or dense one
    Approximate {
        #[command(flatten)]
        common: Common,
        /// discrete or dense
        #[arg(long, default_value = "discrete")]
        target: String,
        /// Elements to keep positive, e.g. "(1,1);(2,1)"
        #[arg(long, default_value = "")]
        require: String,
        /// Radius of the axiom check on the output
        #[arg(long, default_value_t = 3)]
        radius: usize,
    },
    /// Approximate a free-group cone by one with a dense order type
    Densify {
        #[command(flatten)]
        common: Common,
        /// Elements to keep positive, e.g. "x1,x1.x2^-1"
        #[arg(long, default_value = "")]
        require: String,
        /// Realization depth (default: the longest required word)
        #[arg(long)]
        k: Option<usize>,
        /// Radius of the axiom and convexity checks on the output
        #[arg(long, default_value_t = 2)]
        radius: usize,
        /// Also write an SVG of f1 and f2
        #[arg(long)]
        plot: Option<PathBuf>,
    },
    /// Census of positive cones on the tower group T_n
    Tower {
        /// Rank n of T_n
        #[arg(long)]
        rank: usize,
        /// Ball radius of the partial-cone census
        #[arg(long, default_value_t = 2)]
        census_radius: usize,
        /// Ball radius of the least-element certificates
        #[arg(long, default_value_t = 6)]
        discrete_radius: usize,
        /// Write the run certificate (JSON) to this path
        #[arg(long)]
        emit_certificate: Option<PathBuf>,
    },
    /// Dehornoy classification of a braid word
    Braid {
        /// Number of strands n of B_n
        #[arg(long)]
        strands: usize,
        /// Word such as "s1.s2^-1"
        #[arg(long)]
        classify: String,
    },
    /// Re-derive every recorded value of a certificate
    Verify {
        /// Certificate JSON file
        certificate: PathBuf,
        /// SVG written by `densify --plot` to compare against the certificate
        #[arg(long)]
        plot: Option<PathBuf>,
    },
    /// Write the SVG of f1 and f2 for a densify certificate
    Plot {
        /// Certificate JSON file from `densify`
        certificate: PathBuf,
        /// SVG output path
        #[arg(long, short)]
        output: PathBuf,
    },
}

enum Outcome {
    Ok,
    Refuted,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if let Ok(v) = std::env::var("ORDSPACE_BUDGET") {
        match v.trim().parse::<usize>() {
            Ok(n) => set_default_budget(n),
            Err(_) => {
                eprintln!("error: ORDSPACE_BUDGET must be a positive integer, got `{}`", v);
                return ExitCode::from(2);
            }
        }
    }
    match run(cli.command) {
        Ok(Outcome::Ok) => ExitCode::SUCCESS,
        Ok(Outcome::Refuted) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {}", e);
            ExitCode::from(match e {
                Error::BudgetExceeded { .. } => 3,
                _ => 2,
            })
        }
    }
}

fn family(common: &Common) -> Result<Option<Family>, Error> {
    common.group.as_deref().map(grammar::parse_family).transpose()
}

fn cone(common: &Common) -> Result<ordspace::Cone, Error> {
    let term = common.cone.as_deref().ok_or_else(|| Error::Precondition("--cone is required".into()))?;
    grammar::parse_cone(term, family(common)?.as_ref())
}

fn property(s: &str) -> Result<Property, Error> {
    serde_json::from_value(serde_json::Value::String(s.to_string()))
        .map_err(|_| Error::Precondition(format!("unknown property `{}`", s)))
}

fn required(family: &Family, s: &str) -> Result<Vec<String>, Error> {
    Ok(grammar::parse_elements(family, s)?.iter().map(|g| g.to_string()).collect())
}

fn finish(run: &Run, emit: Option<&PathBuf>) -> Result<Outcome, Error> {
    let cert = &run.certificate;
    for s in &cert.stages {
        println!("{}: {}", s.name, s.value);
    }
    for c in &cert.checks {
        println!("check {} on {}: {}", format_property(c.certificate.property), c.cone, verdict_text(&c.certificate.verdict));
    }
    if let Some(d) = &cert.output {
        println!("output: {}", serde_json::to_string(d).unwrap_or_default());
    }
    println!("passed: {}", cert.passed);
    if let Some(path) = emit {
        write(path, &cert.to_json())?;
    }
    Ok(if cert.passed { Outcome::Ok } else { Outcome::Refuted })
}

fn verdict_text(v: &Verdict) -> String {
    match v {
        Verdict::VerifiedOnBall => "verified-on-ball".into(),
        Verdict::Refuted { kind, witness } => {
            let parts: Vec<String> = witness
                .iter()
                .map(|w| match w.sign {
                    Some(s) => format!("{} = {} ({})", w.role, w.element, s),
                    None => format!("{} = {}", w.role, w.element),
                })
                .collect();
            format!("refuted ({}): {}", kind, parts.join(", "))
        }
    }
}

fn format_property(p: Property) -> String {
    serde_json::to_value(p).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default()
}

fn write(path: &PathBuf, text: &str) -> Result<(), Error> {
    std::fs::write(path, text).map_err(|e| Error::Precondition(format!("cannot write {}: {}", path.display(), e)))
}

fn read(path: &PathBuf) -> Result<String, Error> {
    std::fs::read_to_string(path).map_err(|e| Error::Precondition(format!("cannot read {}: {}", path.display(), e)))
}

fn run(command: Command) -> Result<Outcome, Error> {
    match command {
        Command::Check { common, radius, property: p, subgroup } => {
            let input = cone(&common)?;
            let subgroup = subgroup
                .map(|s| {
                    serde_json::from_str::<SubgroupDescriptor>(&s)
                        .map_err(|e| Error::parse(e.column().saturating_sub(1), e.to_string()))
                })
                .transpose()?;
            let params = Parameters { radius: Some(radius), property: Some(property(&p)?), subgroup, ..Default::default() };
            finish(&certificate::run_check(input, params)?, common.emit_certificate.as_ref())
        }
        Command::Classify { common, element } => {
            let input = cone(&common)?;
            let g = input.family().parse_element(&element)?;
            println!("{}", input.classify(&g)?);
            Ok(Outcome::Ok)
        }
        Command::Approximate { common, target, require, radius } => {
            let input = cone(&common)?;
            let params = Parameters {
                radius: Some(radius),
                target: Some(target),
                required: required(input.family(), &require)?,
                ..Default::default()
            };
            finish(&certificate::run_approximate(input, params)?, common.emit_certificate.as_ref())
        }
        Command::Densify { common, require, k, radius, plot: plot_path } => {
            let input = cone(&common)?;
            let params =
                Parameters { radius: Some(radius), k, required: required(input.family(), &require)?, ..Default::default() };
            let run = certificate::run_densify(input, params)?;
            if let (Some(path), Some(bent)) = (plot_path.as_ref(), run.bent.as_ref()) {
                write(path, &plot::render(bent))?;
            }
            finish(&run, common.emit_certificate.as_ref())
        }
        Command::Tower { rank, census_radius, discrete_radius, emit_certificate } => {
            let params = Parameters {
                census_radius: Some(census_radius),
                discrete_radius: Some(discrete_radius),
                ..Default::default()
            };
            finish(&certificate::run_tower(rank, params)?, emit_certificate.as_ref())
        }
        Command::Braid { strands, classify } => {
            let g = Family::Braid(strands).parse_element(&classify)?;
            let w = g.as_braid().ok_or_else(|| Error::Precondition("not a braid".into()))?;
            let reduced = ordspace::braid::handle_reduce(w)?;
            println!("{}", ordspace::braid::sigma_class(&reduced).sign());
            println!("reduced: {}", ordspace::Element::Braid(reduced));
            Ok(Outcome::Ok)
        }
        Command::Verify { certificate: path, plot: plot_path } => {
            let cert = Certificate::from_json(&read(&path)?)?;
            let mut problems = certificate::verify(&cert)?;
            if let Some(p) = plot_path {
                let svg = read(&p)?;
                for id in ["f1", "f2"] {
                    match (plot::map_attribute(&svg, id), cert.stage(id)) {
                        (Some(a), Some(b)) if a == b => {}
                        (a, b) => problems.push(format!("plot `{}`: svg has {:?}, certificate has {:?}", id, a, b)),
                    }
                }
            }
            if problems.is_empty() {
                println!("ok: {} stages, {} oracle calls, {} checks", cert.stages.len(), cert.calls.len(), cert.checks.len());
                Ok(Outcome::Ok)
            } else {
                for p in &problems {
                    println!("mismatch: {}", p);
                }
                Ok(Outcome::Refuted)
            }
        }
        Command::Plot { certificate: path, output } => {
            let cert = Certificate::from_json(&read(&path)?)?;
            let run = certificate::rerun(&cert)?;
            let bent = run.bent.ok_or_else(|| Error::Precondition("only densify certificates carry f1 and f2".into()))?;
            write(&output, &plot::render(&bent))?;
            Ok(Outcome::Ok)
        }
    }
}
