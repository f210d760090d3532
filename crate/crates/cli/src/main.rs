mod args;
mod cache;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use mfield_core::degen::{
    is_toric_degeneration, reproduce_table, scan_family, DegenOptions, Mode, ScanParams, SigmaSource, TableOptions,
};
use mfield_core::mfpolytope::flag_polytope;
use mfield_core::mutation::{maps_from_json, mutation_sequence_to_gt, replay, ChainCache, VerifyMode};
use mfield_core::polytope::{count_lattice_points, ehrhart, normalized_volume};
use mfield_core::{EhrhartMethod, Error, Permutation, SubLattice, TableId};
use serde_json::{json, Value};

use args::{parse_c_values, parse_ks, parse_sigma, CValues, FieldArgs, Format, Ks};
use cache::DirCache;
use output::{canonical, join};

#[derive(Parser, Debug)]
#[command(name = "mfield", version, about = "Matching-field polytopes, mutations and toric degenerations")]
struct Cli {
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    format: Format,
    /// Result cache directory.
    #[arg(long, env = "MFIELD_CACHE_DIR", global = true)]
    cache_dir: Option<PathBuf>,
    /// Ignore and do not write the cache.
    #[arg(long, global = true)]
    no_cache: bool,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    workers: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum MethodArg {
    Auto,
    Dilates,
    Reciprocal,
}

impl From<MethodArg> for EhrhartMethod {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::Auto => EhrhartMethod::Auto,
            MethodArg::Dilates => EhrhartMethod::Dilates,
            MethodArg::Reciprocal => EhrhartMethod::Reciprocal,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ModeArg {
    Full,
    Fast,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Vertices and facets of the matching-field polytope.
    Polytope {
        #[command(flatten)]
        field: FieldArgs,
    },
    /// f-vector of the matching-field polytope.
    Fvector {
        #[command(flatten)]
        field: FieldArgs,
    },
    /// Ehrhart polynomial over the lattice spanned by the tuple vectors.
    Ehrhart {
        #[command(flatten)]
        field: FieldArgs,
        #[arg(long, value_enum, default_value_t = MethodArg::Auto)]
        method: MethodArg,
    },
    /// Normalized volume by triangulation.
    Volume {
        #[command(flatten)]
        field: FieldArgs,
    },
    /// Applies hand-written tropical maps `[{"w": rows, "f": rows}, ...]` in order.
    Mutate {
        #[command(flatten)]
        field: FieldArgs,
        /// JSON file with the maps.
        #[arg(long)]
        maps: PathBuf,
        /// Expected final polytope, given by its permutation (same n, K, c, p).
        #[arg(long, value_parser = parse_sigma)]
        target: Option<Permutation>,
    },
    /// Certified mutation chain from `B^σ` to the Gelfand–Tsetlin polytope.
    Chain {
        #[command(flatten)]
        field: FieldArgs,
        #[arg(long, value_enum, default_value_t = ModeArg::Full)]
        mode: ModeArg,
    },
    /// Decides whether the matching field gives a toric degeneration.
    Degen {
        #[command(flatten)]
        field: FieldArgs,
        /// Compare normalized volumes only.
        #[arg(long)]
        quick: bool,
        /// Largest dilate for the normality re-check; below 2 skips it.
        #[arg(long, default_value_t = 3)]
        kmax: u32,
        /// Exit with status 1 unless the verdict is this value.
        #[arg(long)]
        expect: Option<bool>,
    },
    /// Checks every `B_c^σ` in a family and groups them by fingerprint.
    Scan {
        #[arg(long)]
        n: usize,
        #[arg(long = "k", visible_alias = "K", value_parser = parse_ks)]
        k: Option<Ks>,
        /// Values of c, e.g. `1-4`.
        #[arg(long, value_parser = parse_c_values, default_value = "1")]
        c: CValues,
        #[arg(long)]
        p: Option<u64>,
        /// Explicit permutations, comma separated compact forms (`1234,2341`).
        #[arg(long, value_delimiter = ',', value_parser = parse_sigma, conflicts_with = "admissible")]
        sigmas: Option<Vec<Permutation>>,
        /// Only permutations avoiding the four forbidden patterns.
        #[arg(long)]
        admissible: bool,
        #[arg(long)]
        quick: bool,
        #[arg(long, default_value_t = 3)]
        kmax: u32,
    },
    /// Recomputes a shipped table and diffs it against the expected values.
    Table {
        /// gr36, fl4, gr37-row(<i>) or fl5-orbit(<i>).
        id: String,
        /// Also decide degenerations (default: only for gr36 and fl4).
        #[arg(long)]
        verdicts: Option<bool>,
        /// Override the prime the table was generated with.
        #[arg(long)]
        p: Option<u64>,
        #[arg(long, default_value_t = 3)]
        kmax: u32,
    },
    /// Runs the built-in invariant checks.
    Selfcheck,
}

enum Failure {
    Usage(String),
    Mismatch(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidArgument(_) | Error::Parse(_) | Error::NonCoherent { .. } => Failure::Usage(e.to_string()),
            other => Failure::Mismatch(other.to_string()),
        }
    }
}

type Outcome = Result<bool, Failure>;

fn usage(e: String) -> Failure {
    Failure::Usage(e)
}

fn emit(format: Format, value: &Value, text: impl FnOnce() -> String, csv: Option<String>) {
    match format {
        Format::Json => print!("{}", canonical(value)),
        Format::Text => println!("{}", text()),
        Format::Csv => match csv {
            Some(c) => print!("{c}"),
            None => println!("{}", text()),
        },
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(w) = cli.workers {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(w.max(1)).build_global() {
            eprintln!("error: --workers: {e}");
            return ExitCode::from(2);
        }
    }
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
        Err(Failure::Mismatch(m)) => {
            eprintln!("verification failed: {m}");
            ExitCode::from(1)
        }
    }
}

fn cache(cli: &Cli) -> Result<Option<DirCache>, Failure> {
    match (&cli.cache_dir, cli.no_cache) {
        (Some(dir), false) => DirCache::open(dir)
            .map(Some)
            .map_err(|e| usage(format!("--cache-dir {}: {e}", dir.display()))),
        _ => Ok(None),
    }
}

fn run(cli: &Cli) -> Outcome {
    let fmt = cli.format;
    match &cli.command {
        Command::Polytope { field } => {
            let ks = field.cardinalities().map_err(usage)?;
            let ctx = flag_polytope(&field.field().map_err(usage)?, &ks)?;
            let v = ctx.polytope.to_json(true, true);
            emit(
                fmt,
                &v,
                || {
                    let mut s = format!("dim {} vertices {}\n", ctx.polytope.dim(), ctx.polytope.num_vertices());
                    for vert in ctx.polytope.vertices() {
                        let row: Vec<String> = vert.iter().map(mfield_core::rational::to_string).collect();
                        s += &row.join(" ");
                        s.push('\n');
                    }
                    s.trim_end().to_string()
                },
                None,
            );
            Ok(true)
        }
        Command::Fvector { field } => {
            let ks = field.cardinalities().map_err(usage)?;
            let ctx = flag_polytope(&field.field().map_err(usage)?, &ks)?;
            let f = ctx.polytope.f_vector();
            emit(fmt, &json!({"f_vector": f, "dim": ctx.polytope.dim()}), || join(&f), None);
            Ok(true)
        }
        Command::Ehrhart { field, method } => {
            let ks = field.cardinalities().map_err(usage)?;
            let ctx = flag_polytope(&field.field().map_err(usage)?, &ks)?;
            let e = ehrhart(&ctx.polytope, &ctx.lattice, (*method).into())?;
            let ambient = count_lattice_points(&ctx.polytope, &SubLattice::full(ctx.polytope.ambient()), 1)?;
            let v = json!({
                "ehrhart": e,
                "polynomial": e.to_string(),
                "normalized_volume": mfield_core::rational::to_string(&e.normalized_volume()),
                "saturation_index": ctx.lattice.saturation_index().to_string(),
                "points_in_ambient_lattice": ambient.to_string(),
            });
            emit(fmt, &v, || format!("{e}\nnormalized volume {}", e.normalized_volume()), None);
            Ok(true)
        }
        Command::Volume { field } => {
            let ks = field.cardinalities().map_err(usage)?;
            let ctx = flag_polytope(&field.field().map_err(usage)?, &ks)?;
            let vol = normalized_volume(&ctx.polytope, &ctx.lattice)?;
            let v = json!({"normalized_volume": vol.to_string(), "dim": ctx.polytope.dim()});
            emit(fmt, &v, || vol.to_string(), None);
            Ok(true)
        }
        Command::Mutate { field, maps, target } => {
            let ks = field.cardinalities().map_err(usage)?;
            let ctx = flag_polytope(&field.field().map_err(usage)?, &ks)?;
            let text = std::fs::read_to_string(maps).map_err(|e| usage(format!("--maps {}: {e}", maps.display())))?;
            let parsed: Value = serde_json::from_str(&text).map_err(|e| usage(format!("--maps: {e}")))?;
            let maps = maps_from_json(&parsed, field.n)?;
            let out = replay(&ctx.polytope, &maps)?;
            let all_mutations = out.iter().all(|s| s.1);
            let last = out.last().map(|s| &s.0).unwrap_or(&ctx.polytope);
            let reached = match target {
                Some(t) => {
                    let tf = FieldArgs { sigma: Some(t.clone()), ..field.clone() };
                    Some(flag_polytope(&tf.field().map_err(usage)?, &ks)?.polytope == *last)
                }
                None => None,
            };
            let steps: Vec<Value> = out
                .iter()
                .zip(&maps)
                .map(|((p, ok), m)| {
                    json!({
                        "map": m.to_json(),
                        "is_mutation": ok,
                        "lattice_polytope": p.is_lattice_polytope(),
                        "f_vector": p.f_vector(),
                    })
                })
                .collect();
            let v = json!({"steps": steps, "reached_target": reached, "result": last.to_json(false, true)});
            emit(
                fmt,
                &v,
                || {
                    let mut s = String::new();
                    for (i, (p, ok)) in out.iter().enumerate() {
                        s += &format!(
                            "step {}: mutation {ok}, lattice {}, f-vector {}\n",
                            i + 1,
                            p.is_lattice_polytope(),
                            join(&p.f_vector())
                        );
                    }
                    if let Some(r) = reached {
                        s += &format!("reached target: {r}\n");
                    }
                    s.trim_end().to_string()
                },
                None,
            );
            Ok(all_mutations && reached != Some(false))
        }
        Command::Chain { field, mode } => {
            if field.c.is_some() {
                return Err(usage("chain works with B^σ; drop --c".into()));
            }
            let ks = field.cardinalities().map_err(usage)?;
            let sigma = field.sigma().map_err(usage)?;
            let mode = match mode {
                ModeArg::Full => VerifyMode::Full,
                ModeArg::Fast => VerifyMode::Fast,
            };
            let chain = mutation_sequence_to_gt(&sigma, &ks, mode, &ChainCache::new())?;
            emit(
                fmt,
                &chain.to_json(),
                || {
                    let mut s = String::new();
                    for st in &chain.steps {
                        s += &format!(
                            "{} -> {} (ℓ={}, λ={}, μ={}) mutation {} f-vector {} -> {}\n",
                            st.step.sigma,
                            st.step.tau,
                            st.step.ell,
                            st.step.lambda,
                            st.step.mu,
                            st.is_mutation,
                            join(&st.f_vector_before),
                            join(&st.f_vector_after)
                        );
                    }
                    s += &format!("{} steps, ends at Gelfand–Tsetlin: {}", chain.steps.len(), chain.ends_at_gt);
                    s
                },
                None,
            );
            Ok(chain.ends_at_gt)
        }
        Command::Degen { field, quick, kmax, expect } => {
            let ks = field.cardinalities().map_err(usage)?;
            let f = field.field().map_err(usage)?;
            let opts = DegenOptions {
                mode: if *quick { Mode::Quick } else { Mode::Full },
                kmax: *kmax,
                ..Default::default()
            };
            let key = format!(
                "v{}|degen|n={}|K={}|{}|{:?}|kmax={}",
                env!("CARGO_PKG_VERSION"),
                field.n,
                join(&ks),
                f.provenance().label(),
                opts.mode,
                opts.kmax
            );
            let store = cache(cli)?;
            let cached = store
                .as_ref()
                .and_then(|s| s.get(&key))
                .and_then(|v| mfield_core::DegenerationReport::from_json(&v).ok());
            let report = match cached {
                Some(r) => r,
                None => {
                    let r = is_toric_degeneration(&f, &ks, &opts)?;
                    if let Some(s) = &store {
                        if let Err(e) = s.put(&key, &r.to_json()) {
                            eprintln!("warning: cache write failed: {e}");
                        }
                    }
                    r
                }
            };
            let ev = &report.evidence;
            emit(
                fmt,
                &report.to_json(),
                || {
                    let mut s = format!(
                        "verdict {}\nnormalized volume {} (Gelfand–Tsetlin {})\nf-vector {}",
                        report.verdict,
                        ev.volume,
                        ev.volume_gt,
                        join(&ev.f_vector)
                    );
                    if let (Some(a), Some(b)) = (&ev.ehrhart, &ev.ehrhart_gt) {
                        s += &format!("\nEhrhart {a}\nGelfand–Tsetlin {b}");
                    }
                    s
                },
                None,
            );
            Ok(expect.is_none_or(|e| e == report.verdict))
        }
        Command::Scan { n, k, c, p, sigmas, admissible, quick, kmax } => {
            let ks = k.clone().map(|k| k.0).unwrap_or_else(|| (1..*n).collect());
            let params = ScanParams {
                n: *n,
                cardinalities: ks,
                c_values: c.0.clone(),
                p: *p,
                sigmas: match (sigmas, admissible) {
                    (Some(list), _) => SigmaSource::List(list.clone()),
                    (None, true) => SigmaSource::Admissible,
                    (None, false) => SigmaSource::All,
                },
            };
            let opts = DegenOptions {
                mode: if *quick { Mode::Quick } else { Mode::Full },
                kmax: *kmax,
                ..Default::default()
            };
            let store = cache(cli)?;
            let scan = scan_family(&params, &opts, store.as_ref().map(|s| s as &dyn mfield_core::degen::RowStore))?;
            let errors: Vec<String> = scan
                .rows
                .iter()
                .filter_map(|r| r.error.as_ref().map(|e| format!("{}: {e}", r.token())))
                .collect();
            emit(
                fmt,
                &scan.to_json(),
                || {
                    let mut s = String::new();
                    for (i, g) in scan.groups.iter().enumerate() {
                        s += &format!(
                            "group {} verdict {} volume {} f-vector {}\n  {}\n",
                            i + 1,
                            g.verdict,
                            g.volume,
                            join(&g.f_vector),
                            g.members.join(" ")
                        );
                    }
                    for shared in &scan.shared_f_vectors {
                        s += &format!("distinct fingerprints share an f-vector: {}\n", shared.join(", "));
                    }
                    for e in &errors {
                        s += &format!("error {e}\n");
                    }
                    s.trim_end().to_string()
                },
                Some(scan.to_csv()?),
            );
            Ok(errors.is_empty())
        }
        Command::Table { id, verdicts, p, kmax } => {
            let id: TableId = id.parse().map_err(|e: Error| usage(e.to_string()))?;
            let opts = TableOptions {
                verdicts: *verdicts,
                p: *p,
                degen: DegenOptions { kmax: *kmax, ..Default::default() },
            };
            let report = reproduce_table(&id, &opts)?;
            emit(
                fmt,
                &report.to_json(),
                || {
                    let mut s = String::new();
                    for e in &report.entries {
                        s += &format!(
                            "{} {}:{} {} {}\n",
                            e.label,
                            e.c,
                            e.sigma.one_line(),
                            e.computed.as_ref().map_or("-".into(), |f| join(f)),
                            if e.matches() { "ok" } else { "MISMATCH" }
                        );
                    }
                    for sh in &report.shared_f_vectors {
                        s += &format!(
                            "rows {} share f-vector {}: {}\n",
                            sh.labels.join(", "),
                            join(&sh.f_vector),
                            if sh.distinct { "distinct fingerprints" } else { "fingerprint collision" }
                        );
                    }
                    for d in &report.diffs {
                        s += &format!("diff {d}\n");
                    }
                    s += if report.all_match() { "all rows match" } else { "mismatch" };
                    s
                },
                Some(report.to_csv()?),
            );
            Ok(report.all_match())
        }
        Command::Selfcheck => {
            let checks = mfield_core::selfcheck::run();
            let ok = checks.iter().all(|c| c.passed);
            let v = serde_json::to_value(&checks).expect("checks serialise");
            emit(
                fmt,
                &v,
                || {
                    checks
                        .iter()
                        .map(|c| format!("{} {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail))
                        .collect::<Vec<_>>()
                        .join("\n")
                },
                None,
            );
            Ok(ok)
        }
    }
}
