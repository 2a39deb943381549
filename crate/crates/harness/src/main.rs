use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;
use ueq_core::{
    induce_topology, induced_class, is_connected, is_dense, is_equivalently_uniformisable_via,
    is_transverse, is_u_open_subset, product, uniformising_class, EquivRel, FiniteTopology,
    UeqClass,
};
use ueq_harness::checks::{self, Caps, DEFAULT_TRIALS};
use ueq_harness::instance::{
    parse_instance, parse_rational, Instance, InstanceDoc, InstanceError, SpaceDoc, TopologyDoc,
};
use ueq_harness::emit_dot;

#[derive(Parser)]
#[command(name = "ueq", version, about = "Finite U-equivalence spaces: constructions, predicates and property checks")]
struct Cli {
    /// Machine-readable JSON output.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse and validate instance files.
    Validate { files: Vec<PathBuf> },
    /// Meet of every generator in the given space files.
    Meet { files: Vec<PathBuf> },
    /// All members of the class generated by a space file.
    Generate { file: PathBuf },
    /// Class induced on a map's source by its target class.
    Induce { map: PathBuf },
    /// Relative class on a subset.
    Restrict { subset: PathBuf },
    /// Product of the given spaces.
    Product { files: Vec<PathBuf> },
    /// Topology of a space, metric family or topology file.
    Topology {
        file: PathBuf,
        /// Also write the specialization preorder as DOT.
        #[arg(long, value_name = "PATH")]
        dot: Option<PathBuf>,
    },
    /// Evaluate a predicate.
    Check {
        predicate: Predicate,
        #[arg(long)]
        map: Option<PathBuf>,
        #[arg(long)]
        space: Option<PathBuf>,
        #[arg(long)]
        subset: Option<PathBuf>,
        #[arg(long)]
        metric: Option<PathBuf>,
        #[arg(long)]
        topology: Option<PathBuf>,
        /// Radius for `r-transitive`, as `p/q` or an integer.
        #[arg(long)]
        radius: Option<String>,
    },
    /// Run property checks.
    Verify {
        /// Run every registered check.
        #[arg(long)]
        all: bool,
        /// Check id to run (repeatable).
        #[arg(long = "check", value_name = "ID")]
        checks: Vec<String>,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long, default_value_t = DEFAULT_TRIALS)]
        trials: u64,
        #[arg(long, default_value_t = Caps::default().max_carrier)]
        max_carrier: usize,
        /// List the registered checks and exit.
        #[arg(long)]
        list: bool,
    },
    /// Specialization preorder of a topology as DOT.
    Dot {
        file: PathBuf,
        /// Write to this path instead of stdout.
        #[arg(long, value_name = "PATH")]
        dot: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Predicate {
    Continuous,
    Open,
    USurjection,
    UEquivalence,
    Embedding,
    Transverse,
    Rich,
    Separated,
    Connected,
    UOpen,
    Dense,
    Transitive,
    RTransitive,
    Uniformisable,
}

/// Exit status classes.
enum Failure {
    /// A check failed or a characterization disagreed.
    Check(String),
    /// Bad input or usage.
    Usage(String),
}

impl From<InstanceError> for Failure {
    fn from(e: InstanceError) -> Self {
        Failure::Usage(e.to_string())
    }
}

impl From<ueq_core::Error> for Failure {
    fn from(e: ueq_core::Error) -> Self {
        match e {
            ueq_core::Error::CharacterizationMismatch(_) => Failure::Check(e.to_string()),
            other => Failure::Usage(other.to_string()),
        }
    }
}

type Outcome = Result<(), Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Check(msg)) => {
            eprintln!("{msg}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn load(path: &Path) -> Result<Instance, Failure> {
    let text = fs::read_to_string(path)
        .map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))?;
    parse_instance(&text).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn load_space(path: &Path) -> Result<UeqClass, Failure> {
    match load(path)? {
        Instance::Space(c) => Ok(c),
        other => Err(wrong_kind(path, "space", &other)),
    }
}

fn wrong_kind(path: &Path, expected: &str, found: &Instance) -> Failure {
    Failure::Usage(format!(
        "{}: expected a `{expected}` document, found `{}`",
        path.display(),
        found.kind()
    ))
}

fn required<'a>(flag: &str, value: &'a Option<PathBuf>) -> Result<&'a Path, Failure> {
    value
        .as_deref()
        .ok_or_else(|| Failure::Usage(format!("this predicate needs --{flag}")))
}

fn print_doc(doc: InstanceDoc) {
    println!("{}", doc.to_json());
}

fn write_file(path: &Path, text: &str) -> Outcome {
    fs::write(path, text).map_err(|e| Failure::Usage(format!("cannot write {}: {e}", path.display())))
}

fn run(cli: &Cli) -> Outcome {
    match &cli.command {
        Command::Validate { files } => validate(cli.json, files),
        Command::Meet { files } => meet(cli.json, files),
        Command::Generate { file } => {
            let c = load_space(file)?;
            print_doc(InstanceDoc::Space(SpaceDoc::members_of(&c)));
            Ok(())
        }
        Command::Induce { map } => {
            let f = match load(map)? {
                Instance::Map(f) => f,
                other => return Err(wrong_kind(map, "map", &other)),
            };
            let c = induced_class(f.source().carrier(), &[(f.values(), f.target())])?;
            print_doc(InstanceDoc::Space(SpaceDoc::members_of(&c)));
            Ok(())
        }
        Command::Restrict { subset } => {
            let (space, a) = match load(subset)? {
                Instance::Subset { space, subset } => (space, subset),
                other => return Err(wrong_kind(subset, "subset", &other)),
            };
            let rel = space.relative(&a)?;
            if cli.json {
                let doc = serde_json::to_value(InstanceDoc::Space(SpaceDoc::members_of(&rel.class)))
                    .expect("documents serialize");
                println!("{:#}", json!({ "space": doc, "inclusion": rel.inclusion }));
            } else {
                println!("inclusion: {:?}", rel.inclusion);
                print_doc(InstanceDoc::Space(SpaceDoc::members_of(&rel.class)));
            }
            Ok(())
        }
        Command::Product { files } => {
            let spaces = files.iter().map(|f| load_space(f)).collect::<Result<Vec<_>, _>>()?;
            let refs: Vec<&UeqClass> = spaces.iter().collect();
            let prod = product(&refs)?;
            let radices: Vec<usize> = (0..prod.shape.factor_count())
                .map(|i| prod.shape.factor(i).size())
                .collect();
            if cli.json {
                let doc = serde_json::to_value(InstanceDoc::Space(SpaceDoc::members_of(&prod.class)))
                    .expect("documents serialize");
                println!("{:#}", json!({ "space": doc, "radices": radices }));
            } else {
                println!("radices (most significant first): {radices:?}");
                print_doc(InstanceDoc::Space(SpaceDoc::members_of(&prod.class)));
            }
            Ok(())
        }
        Command::Topology { file, dot } => {
            let t = topology_of(file)?;
            if let Some(path) = dot {
                write_file(path, &emit_dot(&t))?;
            }
            if cli.json {
                print_doc(InstanceDoc::Topology(TopologyDoc::from_topology(&t)));
            } else {
                for x in t.carrier().elements() {
                    println!("N({x}) = {:?}", t.min_nbhd(x).to_vec());
                }
            }
            Ok(())
        }
        Command::Check {
            predicate,
            map,
            space,
            subset,
            metric,
            topology,
            radius,
        } => {
            let inputs = CheckInputs {
                map,
                space,
                subset,
                metric,
                topology,
                radius,
            };
            let value = evaluate(*predicate, &inputs)?;
            if cli.json {
                println!("{}", json!({ "predicate": predicate_name(*predicate), "value": value }));
            } else {
                println!("{value}");
            }
            Ok(())
        }
        Command::Verify {
            all,
            checks: ids,
            seed,
            trials,
            max_carrier,
            list,
        } => {
            if *list {
                for c in checks::registry() {
                    println!("{:<7} {}", c.id, c.title);
                }
                return Ok(());
            }
            verify(cli.json, *all, ids, *seed, *trials, *max_carrier)
        }
        Command::Dot { file, dot } => {
            let text = emit_dot(&topology_of(file)?);
            match dot {
                Some(path) => write_file(path, &text),
                None => {
                    print!("{text}");
                    Ok(())
                }
            }
        }
    }
}

fn validate(as_json: bool, files: &[PathBuf]) -> Outcome {
    let mut bad = None;
    for f in files {
        match load(f) {
            Ok(inst) => {
                if as_json {
                    println!("{}", json!({ "file": f.display().to_string(), "kind": inst.kind(), "valid": true }));
                } else {
                    println!("{}: valid {}", f.display(), inst.kind());
                }
            }
            Err(Failure::Usage(msg) | Failure::Check(msg)) => {
                if as_json {
                    println!("{}", json!({ "file": f.display().to_string(), "valid": false, "error": msg }));
                } else {
                    println!("{msg}");
                }
                bad.get_or_insert(msg);
            }
        }
    }
    match bad {
        Some(_) => Err(Failure::Usage("some files are invalid".into())),
        None => Ok(()),
    }
}

fn meet(as_json: bool, files: &[PathBuf]) -> Outcome {
    let mut acc: Option<EquivRel> = None;
    for f in files {
        let c = load_space(f)?;
        for g in c.generators() {
            acc = Some(match acc {
                None => g.clone(),
                Some(a) => a.meet(g)?,
            });
        }
    }
    let m = acc.ok_or_else(|| Failure::Usage("meet needs at least one space file".into()))?;
    if as_json {
        println!("{}", json!({ "carrier": m.size(), "blocks": m.blocks() }));
    } else {
        println!("{:?}", m.blocks());
    }
    Ok(())
}

fn topology_of(file: &Path) -> Result<FiniteTopology, Failure> {
    match load(file)? {
        Instance::Space(c) => Ok(induce_topology(&c)),
        Instance::Family(f) => Ok(f.topology()?),
        Instance::Topology(t) => Ok(t),
        other => Err(wrong_kind(file, "space, family or topology", &other)),
    }
}

struct CheckInputs<'a> {
    map: &'a Option<PathBuf>,
    space: &'a Option<PathBuf>,
    subset: &'a Option<PathBuf>,
    metric: &'a Option<PathBuf>,
    topology: &'a Option<PathBuf>,
    radius: &'a Option<String>,
}

fn predicate_name(p: Predicate) -> String {
    p.to_possible_value().expect("no skipped variants").get_name().to_string()
}

fn evaluate(p: Predicate, inputs: &CheckInputs) -> Result<bool, Failure> {
    use Predicate::*;
    match p {
        Continuous | Open | USurjection | UEquivalence | Embedding | Transverse => {
            let path = required("map", inputs.map)?;
            let f = match load(path)? {
                Instance::Map(f) => f,
                other => return Err(wrong_kind(path, "map", &other)),
            };
            Ok(match p {
                Continuous => f.is_continuous(),
                Open => f.is_open_map(),
                USurjection => f.is_u_surjection(),
                UEquivalence => f.is_u_equivalence(),
                Embedding => f.is_u_embedding()?,
                _ => is_transverse(f.source(), f.values())?,
            })
        }
        Rich | Separated | Connected => {
            let c = load_space(required("space", inputs.space)?)?;
            Ok(match p {
                Rich => c.is_rich(),
                Separated => c.is_separated(),
                _ => is_connected(&c)?,
            })
        }
        UOpen | Dense => {
            let path = required("subset", inputs.subset)?;
            let (space, a) = match load(path)? {
                Instance::Subset { space, subset } => (space, subset),
                other => return Err(wrong_kind(path, "subset", &other)),
            };
            Ok(match p {
                UOpen => is_u_open_subset(&space, &a)?,
                _ => is_dense(&space, &a)?,
            })
        }
        Transitive | RTransitive => {
            let path = required("metric", inputs.metric)?;
            let d = match load(path)? {
                Instance::Metric(d) => d,
                other => return Err(wrong_kind(path, "metric", &other)),
            };
            if let Transitive = p {
                return Ok(d.is_transitive()?);
            }
            let r = inputs
                .radius
                .as_deref()
                .ok_or_else(|| Failure::Usage("r-transitive needs --radius".into()))?;
            Ok(d.is_r_transitive(parse_rational(r, "radius")?)?)
        }
        Uniformisable => {
            let path = required("topology", inputs.topology)?;
            let t = match load(path)? {
                Instance::Topology(t) => t,
                other => return Err(wrong_kind(path, "topology", &other)),
            };
            match inputs.space {
                Some(space) => Ok(is_equivalently_uniformisable_via(&t, &load_space(space)?)?),
                None => Ok(uniformising_class(&t).is_some()),
            }
        }
    }
}

fn verify(as_json: bool, all: bool, ids: &[String], seed: u64, trials: u64, max_carrier: usize) -> Outcome {
    if max_carrier == 0 {
        return Err(Failure::Usage("--max-carrier must be at least 1".into()));
    }
    let ids = if all { checks::all_ids() } else { ids.to_vec() };
    let caps = Caps {
        max_carrier,
        ..Caps::default()
    };
    let started = Instant::now();
    let report = checks::run_checks(&ids, seed, trials, caps).map_err(|e| Failure::Usage(e.to_string()))?;
    let elapsed = started.elapsed();
    if as_json {
        println!("{}", report.to_json());
    } else {
        for c in &report.checks {
            println!(
                "{:<7} {:<8} passes {:>5}  failures {:>5}  vacuous {:>5}  {}",
                c.check_id,
                format!("{:?}", c.status).to_lowercase(),
                c.passes,
                c.failures,
                c.vacuous,
                c.title
            );
            if let Some(cx) = &c.counterexample {
                println!("  counterexample: {cx}");
            }
        }
    }
    // wall time stays out of the report so reports compare byte for byte
    eprintln!("{} checks in {:.2?}", report.checks.len(), elapsed);
    if report.all_passed() {
        Ok(())
    } else {
        Err(Failure::Check("verification failed".into()))
    }
}
