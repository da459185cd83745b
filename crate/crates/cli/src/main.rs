//! Command-line front end: enumeration, subdivision and verification runs
//! with deterministic JSON, text or DOT output.

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use tropprod::complexes::{is_union_of_cones_in, SubdivisionOf};
use tropprod::curves::{build_moduli_complex, enumerate_stable_graphs, graph_label};
use tropprod::pipeline::{
    build_gamma_subdivision, dr_support, figure1_demo, run_pipeline, Report, RunOptions, SubdivisionSummary,
};
use tropprod::tropmaps::{enumerate_types, forgetful_image, image_family, ContactData, RubberMapType};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
    Dot,
}

#[derive(Parser, Debug)]
#[command(name = "tropprod", version, about = "Tropical moduli of curves and rubber maps: enumeration, subdivision and checks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Output format.
    #[arg(long, value_enum, default_value = "json", global = true)]
    format: Format,
    /// Make every cell of computed subdivisions unimodular.
    #[arg(long, global = true)]
    unimodular: bool,
    /// Only list graphs and types with at most this many edges.
    #[arg(long, global = true)]
    max_edges: Option<usize>,
    /// Seed for sampled checks.
    #[arg(long, default_value_t = 0, global = true)]
    seed: u64,
    /// Print the elapsed time to stderr.
    #[arg(long, global = true)]
    timing: bool,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Stable graphs of genus g with n legs.
    EnumerateGraphs { g: u32, n: usize },
    /// The moduli complex of curves of genus g with n markings.
    ModuliComplex { g: u32, n: usize },
    /// Realizable rubber map types; one slope vector per factor.
    EnumerateMaps {
        g: u32,
        n: usize,
        #[arg(allow_hyphen_values = true)]
        a1: String,
        #[arg(allow_hyphen_values = true)]
        a2: Option<String>,
    },
    /// Moduli cone and forgetful image of a map type read from a JSON file.
    Image {
        path: PathBuf,
        /// Number of sampled points of the moduli cone.
        #[arg(long, default_value_t = 50)]
        samples: usize,
    },
    /// Subdivision of the moduli complex making every factor's image a union of cones.
    Subdivide {
        g: u32,
        n: usize,
        #[arg(allow_hyphen_values = true)]
        a1: String,
        #[arg(allow_hyphen_values = true)]
        a2: Option<String>,
    },
    /// Full hypothesis check for one or two factors.
    Verify {
        g: u32,
        n: usize,
        #[arg(allow_hyphen_values = true)]
        a1: String,
        #[arg(allow_hyphen_values = true)]
        a2: Option<String>,
    },
    /// Full hypothesis check for two factors.
    ProductCheck {
        g: u32,
        n: usize,
        #[arg(allow_hyphen_values = true)]
        a1: String,
        #[arg(allow_hyphen_values = true)]
        a2: String,
    },
    /// Support of the double ramification locus in the moduli of curves.
    DrSupport {
        g: u32,
        n: usize,
        #[arg(allow_hyphen_values = true)]
        a: String,
    },
    /// The genus-2 degree-3 example.
    Figure1,
}

/// Result of a verb: the document to print and whether all checks passed.
struct Outcome {
    json: Value,
    text: String,
    dot: Option<String>,
    passed: bool,
}

impl Outcome {
    fn ok(json: Value, text: String) -> Self {
        Outcome { json, text, dot: None, passed: true }
    }

    fn report(r: &Report) -> Result<Self> {
        Ok(Outcome { json: serde_json::to_value(r)?, text: r.to_text(), dot: None, passed: r.passed() })
    }
}

fn parse_slopes(s: &str) -> Result<Vec<i64>> {
    s.split(',')
        .map(|x| x.trim().parse::<i64>().with_context(|| format!("bad slope {x:?} in {s:?}")))
        .collect()
}

fn contact(g: u32, n: usize, factors: &[String]) -> Result<ContactData> {
    let f = factors.iter().map(|s| parse_slopes(s)).collect::<Result<Vec<_>>>()?;
    Ok(ContactData::new(g, n, f)?)
}

fn factor_list(a1: &str, a2: &Option<String>) -> Vec<String> {
    std::iter::once(a1.to_string()).chain(a2.clone()).collect()
}

fn within(max: Option<usize>, edges: usize) -> bool {
    max.is_none_or(|m| edges <= m)
}

fn subdivision_json(s: &SubdivisionOf) -> Result<Value> {
    Ok(json!({ "summary": SubdivisionSummary::of(s), "subdivision": serde_json::to_value(s)? }))
}

/// Heights of sampled points are path independent.
fn sample_heights(t: &RubberMapType, samples: usize, seed: u64) -> bool {
    let cone = t.moduli_cone().cone;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..samples).all(|_| {
        let mut x = vec![BigRational::from_integer(BigInt::from(0)); cone.rank()];
        for r in cone.rays() {
            let c = BigRational::new(BigInt::from(rng.gen_range(0..20)), BigInt::from(rng.gen_range(1..7)));
            for (xi, ri) in x.iter_mut().zip(r.coords()) {
                *xi += &c * BigRational::from_integer(ri.clone());
            }
        }
        t.heights(&x).is_some()
    })
}

fn run(cli: &Cli) -> Result<Outcome> {
    let opts = RunOptions { unimodular: cli.unimodular };
    match &cli.command {
        Command::EnumerateGraphs { g, n } => {
            let graphs: Vec<_> =
                enumerate_stable_graphs(*g, *n)?.into_iter().filter(|h| within(cli.max_edges, h.num_edges())).collect();
            let dot = graphs.iter().enumerate().map(|(i, h)| h.to_dot(&format!("G{i}"), None)).collect();
            let text = graphs.iter().map(|h| graph_label(h) + "\n").collect::<String>() + &format!("{} graphs\n", graphs.len());
            let json = json!({ "genus": g, "markings": n, "count": graphs.len(), "graphs": graphs });
            Ok(Outcome { dot: Some(dot), ..Outcome::ok(json, text) })
        }
        Command::ModuliComplex { g, n } => {
            let m = build_moduli_complex(*g, *n)?;
            let text = format!("{} cones, dimension {}\n", m.complex.cones.len(), m.complex.max_dim());
            let json = json!({ "genus": g, "markings": n, "graphs": m.graphs, "complex": &*m.complex });
            Ok(Outcome::ok(json, text))
        }
        Command::EnumerateMaps { g, n, a1, a2 } => {
            let c = contact(*g, *n, &factor_list(a1, a2))?;
            let all: Vec<usize> = (0..c.factors.len()).collect();
            let types: Vec<_> =
                enumerate_types(&c, &all)?.into_iter().filter(|t| within(cli.max_edges, t.graph.num_edges())).collect();
            let dot = types
                .iter()
                .enumerate()
                .map(|(i, t)| t.graph.to_dot(&format!("T{i}"), Some((&t.slopes[0], &t.leg_slopes[0]))))
                .collect();
            let text = types.iter().map(|t| tropprod::tropmaps::type_label(t) + "\n").collect::<String>()
                + &format!("{} types\n", types.len());
            let json = json!({ "contact": c, "count": types.len(), "types": types });
            Ok(Outcome { dot: Some(dot), ..Outcome::ok(json, text) })
        }
        Command::Image { path, samples } => {
            let raw = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            let t: RubberMapType = serde_json::from_str(&raw).context("parsing the map type")?;
            let t = RubberMapType::new(t.graph, t.slopes, t.leg_slopes)?;
            if !t.is_balanced() {
                bail!("the map type is not balanced");
            }
            let markings = t.graph.num_legs();
            let genus = t.graph.genus()?;
            let m = build_moduli_complex(genus, markings)?;
            let piece = forgetful_image(&t, &m)?;
            let ok = sample_heights(&t, *samples, cli.seed);
            let mc = t.moduli_cone();
            let text = format!(
                "moduli cone dimension {}, image dimension {} in {} (dimension {})\nheights path independent at {} samples: {}\n",
                mc.cone.dim(),
                piece.cone.dim(),
                graph_label(m.graph(piece.host)),
                m.complex.cone(piece.host).dim(),
                samples,
                ok
            );
            let json = json!({
                "moduli_cone": mc,
                "image": piece,
                "host_label": graph_label(m.graph(piece.host)),
                "samples": { "seed": cli.seed, "count": samples, "path_independent": ok },
            });
            let dot = t.graph.to_dot("T", Some((&t.slopes[0], &t.leg_slopes[0])));
            Ok(Outcome { json, text, dot: Some(dot), passed: ok })
        }
        Command::Subdivide { g, n, a1, a2 } => {
            let c = contact(*g, *n, &factor_list(a1, a2))?;
            let m = build_moduli_complex(*g, *n)?;
            let images = (0..c.factors.len())
                .map(|i| image_family(&tropprod::tropmaps::enumerate_rubber_types(&c, i)?, &m))
                .collect::<tropprod::Result<Vec<_>>>()?;
            let s = build_gamma_subdivision(&m, &images, cli.unimodular)?;
            let passed = images.iter().all(|img| is_union_of_cones_in(&s, img).holds);
            let summary = SubdivisionSummary::of(&s);
            let text = format!(
                "cones by dimension {:?} -> {:?}, {} inserted rays\n",
                summary.before,
                summary.after,
                summary.inserted_rays.len()
            );
            let json = json!({ "contact": c, "images": images, "result": subdivision_json(&s)? });
            Ok(Outcome { passed, ..Outcome::ok(json, text) })
        }
        Command::Verify { g, n, a1, a2 } => Outcome::report(&run_pipeline(&contact(*g, *n, &factor_list(a1, a2))?, opts)?.report),
        Command::ProductCheck { g, n, a1, a2 } => {
            Outcome::report(&run_pipeline(&contact(*g, *n, &[a1.clone(), a2.clone()])?, opts)?.report)
        }
        Command::DrSupport { g, n, a } => {
            let c = contact(*g, *n, std::slice::from_ref(a))?;
            let d = dr_support(&c, 0, cli.unimodular)?;
            let passed = is_union_of_cones_in(&d.subdivision, &d.support).holds;
            let text = d
                .cones
                .iter()
                .map(|s| format!("{}: dimension {} of {}, codimension {}\n", s.host_label, s.dim, s.host_dim, s.codim))
                .collect();
            let json = json!({
                "contact": c,
                "support": d.support,
                "cones": d.cones,
                "result": subdivision_json(&d.subdivision)?,
            });
            Ok(Outcome { passed, ..Outcome::ok(json, text) })
        }
        Command::Figure1 => Outcome::report(&figure1_demo()?),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let start = Instant::now();
    let outcome = match run(&cli) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(2);
        }
    };
    let body = match cli.format {
        Format::Json => serde_json::to_string_pretty(&outcome.json).expect("serializable") + "\n",
        Format::Text => outcome.text,
        Format::Dot => match outcome.dot {
            Some(d) => d,
            None => {
                eprintln!("error: this command has no DOT output");
                return ExitCode::from(2);
            }
        },
    };
    let _ = std::io::stdout().write_all(body.as_bytes());
    if cli.timing {
        eprintln!("elapsed: {:.3}s", start.elapsed().as_secs_f64());
    }
    if outcome.passed {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
