use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Map, Value};

use padyn::classify::classify;
use padyn::ergodic::{
    empirical_equidistribution, erg2_verdict, haar_measure, not_ergodic_p_odd, unit_sphere_form, SphereMeasureContext,
};
use padyn::map::ParsedMap;
use padyn::norm::{NormCase, StepOutcome};
use padyn::padic::{parse_rational, DEFAULT_PRECISION};
use padyn::report;
use padyn::suites::{run_suite, SUITES};
use padyn::{Error, LogRadius, Prime};

#[derive(Parser)]
#[command(name = "padyn", version, about = "Exact p-adic dynamics of (2,2)-rational maps")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Indent the report for reading.
    #[arg(long, global = true)]
    pretty: bool,
    /// Also write the report to FILE.
    #[arg(long, global = true, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct MapArgs {
    /// "a,b,d" for (ax²+bx)/(x²+dx+b), or "a,b,c,d,e" for (ax²+bx+c)/(x²+dx+e).
    #[arg(long, allow_hyphen_values = true)]
    map: String,
    #[arg(long)]
    prime: u64,
}

#[derive(Subcommand)]
enum Command {
    /// Fixed-point characters and Siegel disk, basin or repeller geometry.
    Classify {
        #[command(flatten)]
        m: MapArgs,
    },
    /// Exact iterates of a rational starting point.
    Orbit {
        #[command(flatten)]
        m: MapArgs,
        #[arg(long, allow_hyphen_values = true)]
        start: String,
        #[arg(long)]
        steps: usize,
    },
    /// Predicted radii |f^n(x)| from |x| alone, stopping at exceptional radii.
    NormOrbit {
        #[command(flatten)]
        m: MapArgs,
        /// "p^(e)" or "0".
        #[arg(long, allow_hyphen_values = true)]
        radius: String,
        #[arg(long)]
        steps: u64,
    },
    /// Solutions of f(x) = y in Q_p.
    Preimage {
        #[command(flatten)]
        m: MapArgs,
        #[arg(long, allow_hyphen_values = true)]
        y: String,
        #[arg(long, default_value_t = DEFAULT_PRECISION)]
        precision: u32,
    },
    /// Ergodicity of f on the sphere S_r(0).
    Ergodic {
        #[command(flatten)]
        m: MapArgs,
        #[arg(long, allow_hyphen_values = true)]
        radius: String,
        /// Also simulate an orbit and bin it by residue.
        #[arg(long)]
        empirical: bool,
        #[arg(long, default_value_t = 3)]
        depth: u32,
        #[arg(long, default_value_t = 4096)]
        steps: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = DEFAULT_PRECISION)]
        precision: u32,
    },
    /// Haar measure of a ball of radius BALL inside S_r(0).
    Measure {
        #[arg(long)]
        prime: u64,
        #[arg(long, allow_hyphen_values = true)]
        radius: String,
        #[arg(long, allow_hyphen_values = true)]
        ball: String,
    },
    /// Run a verification suite over the built-in parameter sets.
    Verify {
        #[arg(long, value_parser = SUITES)]
        suite: String,
        #[arg(long, default_value_t = 100)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

fn load(m: &MapArgs) -> padyn::Result<(ParsedMap, Map<String, Value>)> {
    let p = Prime::new(m.prime)?;
    let parsed = ParsedMap::parse(&m.map, p)?;
    let mut doc = Map::new();
    doc.insert("map".into(), report::map(parsed.canonical()));
    if let ParsedMap::General(_, rec) = &parsed {
        doc.insert("conjugacy".into(), report::conjugacy(rec));
    }
    Ok((parsed, doc))
}

fn run(cmd: &Command) -> padyn::Result<Value> {
    let mut doc = Map::new();
    match cmd {
        Command::Classify { m } => {
            let (parsed, head) = load(m)?;
            doc.extend(head);
            let f = parsed.canonical();
            doc.insert("classification".into(), report::classification(&classify(f)?, f.p()));
        }
        Command::Orbit { m, start, steps } => {
            let (parsed, head) = load(m)?;
            doc.extend(head);
            let f = parsed.canonical();
            let x = parse_rational(start)?;
            let orbit = f.orbit(&x, *steps)?;
            let rows: Vec<Value> = orbit
                .iter()
                .enumerate()
                .map(|(n, y)| json!({ "n": n, "x": report::rational(y), "norm": report::radius(&f.norm(y), f.p()) }))
                .collect();
            doc.insert("orbit".into(), Value::Array(rows));
        }
        Command::NormOrbit { m, radius, steps } => {
            let (parsed, head) = load(m)?;
            doc.extend(head);
            let f = parsed.canonical();
            let p = f.p();
            let case = NormCase::detect(f);
            let mut r = LogRadius::parse(radius, p)?;
            let mut trace = vec![json!({ "n": 0, "radius": report::radius(&r, p) })];
            let mut blocked = Value::Null;
            for n in 1..=*steps {
                match case.predict_step(&r) {
                    StepOutcome::Determined(next) => {
                        trace.push(json!({ "n": n, "radius": report::radius(&next, p) }));
                        r = next;
                    }
                    StepOutcome::DataDependent(mk) => {
                        blocked = json!({ "n": n, "marker": report::marker(&mk, p) });
                        break;
                    }
                }
            }
            doc.insert("case".into(), report::norm_case(&case, p));
            doc.insert("trace".into(), Value::Array(trace));
            doc.insert("blocked".into(), blocked);
            let r0 = LogRadius::parse(radius, p)?;
            doc.insert("limit".into(), report::limit(&case.limit_behavior(&r0), p));
            doc.insert("invariant".into(), case.invariant_set().contains(&r0).into());
        }
        Command::Preimage { m, y, precision } => {
            let (parsed, head) = load(m)?;
            doc.extend(head);
            let f = parsed.canonical();
            let y = parse_rational(y)?;
            let pre = f.solve_preimage(&y, *precision)?;
            doc.insert("y".into(), report::rational(&y));
            doc.insert("preimages".into(), pre.iter().map(|x| report::preimage(x, f.p())).collect());
        }
        Command::Ergodic { m, radius, empirical, depth, steps, seed, precision } => {
            let (parsed, head) = load(m)?;
            doc.extend(head);
            let f = parsed.canonical();
            let p = f.p();
            let r = LogRadius::parse(radius, p)?;
            doc.insert("radius".into(), report::radius(&r, p));
            if p.get() == 2 {
                doc.insert("verdict".into(), report::verdict(&erg2_verdict(f, &r)?));
                doc.insert("conjugate".into(), report::unit_sphere_map(&unit_sphere_form(f, &r)?));
            } else {
                let w = not_ergodic_p_odd(f, &r)?;
                doc.insert("verdict".into(), json!({ "ergodic": false, "invariant_ball": report::invariant_ball(&w, p) }));
            }
            if *empirical {
                if *depth == 0 || depth > precision || *depth >= 32 {
                    return Err(Error::Parse("need 1 <= depth <= precision and depth < 32".into()));
                }
                let h = empirical_equidistribution(f, &r, *depth, *steps, *precision, *seed, None)?;
                doc.insert("empirical".into(), report::histogram(&h));
            }
        }
        Command::Measure { prime, radius, ball } => {
            let p = Prime::new(*prime)?;
            let r = LogRadius::parse(radius, p)?;
            let rho = LogRadius::parse(ball, p)?;
            let mu = haar_measure(&SphereMeasureContext { p, r: r.clone() }, &rho)?;
            doc.insert("p".into(), p.get().into());
            doc.insert("radius".into(), report::radius(&r, p));
            doc.insert("ball".into(), report::radius(&rho, p));
            doc.insert("measure".into(), report::rational(&mu));
        }
        Command::Verify { suite, samples, seed } => {
            let rep = run_suite(suite, *samples, *seed)?;
            doc.insert("samples".into(), (*samples).into());
            doc.insert("seed".into(), (*seed).into());
            doc.insert("report".into(), report::suite(&rep));
        }
    }
    Ok(Value::Object(doc))
}

fn emit(doc: &Value, pretty: bool, out: Option<&PathBuf>) -> ExitCode {
    let text = if pretty { serde_json::to_string_pretty(doc) } else { serde_json::to_string(doc) }.unwrap();
    println!("{}", text);
    if let Some(path) = out {
        if let Err(e) = std::fs::write(path, format!("{}\n", text)) {
            eprintln!("padyn: cannot write {}: {}", path.display(), e);
            return ExitCode::from(1);
        }
    }
    ExitCode::SUCCESS
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli.command) {
        Ok(doc) => emit(&doc, cli.pretty, cli.out.as_ref()),
        Err(e) => {
            eprintln!("padyn: {}", e);
            let code = match e {
                Error::Parse(_) | Error::NotPrime(_) => 2,
                _ => 1,
            };
            emit(&report::error(&e), cli.pretty, cli.out.as_ref());
            ExitCode::from(code)
        }
    }
}
