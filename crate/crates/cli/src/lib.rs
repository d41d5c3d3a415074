//! Command-line front end. [`run`] executes a parsed command line, writing
//! the report to any sink, and returns the exit status.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::json;

use ilkit_core::algebra::{eval_term, translate, SetValuation};
use ilkit_core::calculus::{check_proof, derived_theorems, Proof, ProofVerdict};
use ilkit_core::checks::{load_corpus_dir, scoreboard, CheckReport, SweepConfig, SWEEP_FORMULA_SIZE};
use ilkit_core::extension::{build_ue, build_ue_model, UeOptions, DEFAULT_UE_CAP};
use ilkit_core::filters::{assuring, assuring_triples, Filter, Ultrafilter};
use ilkit_core::formula::{parse, Formula};
use ilkit_core::frame::{read_frame_file, to_dot, FrameIoError, LoadedFrame, Model, World, WorldSet};
use ilkit_core::pencil::{build_demo_pair, nondefinability_demo};
use ilkit_core::semantics::{
    check_bisim, frame_valid_bounded, max_bisim, BisimVerdict, Bisimulation, Evaluator, FrameVerdict,
    DEFAULT_VALUATION_BITS,
};

/// Environment variable naming the default corpus directory.
pub const CORPUS_ENV: &str = "ILKIT_CORPUS";

#[derive(Debug, Parser)]
#[command(name = "ilkit", version, about = "Interpretability logic toolkit: Veltman frames, extensions, proofs")]
pub struct Cli {
    #[command(flatten)]
    pub config: Config,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Text,
    Json,
}

#[derive(Debug, Clone, Args)]
pub struct Config {
    /// Emit JSON instead of text
    #[arg(long, global = true)]
    pub json: bool,
    /// Largest number of valuation bits (atoms × worlds) for frame validity
    #[arg(long, global = true, default_value_t = DEFAULT_VALUATION_BITS, value_parser = bits)]
    pub valuation_bound: usize,
    /// Largest number of extension worlds
    #[arg(long = "ue-cap", global = true, default_value_t = DEFAULT_UE_CAP, value_parser = positive)]
    pub ue_cap: usize,
    /// Modal depth of generated formula pools
    #[arg(long, global = true, default_value_t = 2)]
    pub pool_depth: usize,
    /// Connective bound of generated formula pools
    #[arg(long, global = true, default_value_t = SWEEP_FORMULA_SIZE, value_parser = positive)]
    pub pool_size: usize,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Frame corpus directory
    #[arg(long, global = true, env = CORPUS_ENV)]
    pub corpus: Option<PathBuf>,
}

fn bits(s: &str) -> Result<usize, String> {
    match s.parse::<usize>() {
        Ok(v @ 1..=62) => Ok(v),
        Ok(_) => Err("must be between 1 and 62".into()),
        Err(e) => Err(e.to_string()),
    }
}

fn positive(s: &str) -> Result<usize, String> {
    match s.parse::<usize>() {
        Ok(0) => Err("must be positive".into()),
        Ok(v) => Ok(v),
        Err(e) => Err(e.to_string()),
    }
}

impl Config {
    pub fn format(&self) -> Format {
        if self.json {
            Format::Json
        } else {
            Format::Text
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Parse a formula and print its forms and measures
    Parse { formula: String },
    /// Truth of a formula at each world of a model
    Mc {
        frame: PathBuf,
        formula: String,
        /// Only check this world (exit 1 if the formula fails there)
        #[arg(long)]
        world: Option<World>,
    },
    /// Validity of a formula on a frame under every valuation
    FrameValid { frame: PathBuf, formula: String },
    /// Check a relation between two models, or compute the largest one
    Bisim {
        left: PathBuf,
        right: PathBuf,
        /// File of `left right` pairs, one per line
        #[arg(long)]
        z: Option<PathBuf>,
    },
    /// Print the set term of a formula
    Translate {
        formula: String,
        #[arg(long)]
        simplify: bool,
    },
    /// Evaluate the set term of a formula on a frame
    Eval {
        frame: PathBuf,
        formula: String,
        /// Set variable assignment, e.g. `p=0,2`; overrides the file's valuation
        #[arg(long = "val", value_name = "ATOM=WORLDS")]
        vals: Vec<String>,
    },
    /// Decide f ≺_l g for principal ultrafilters, or list every such triple
    Assuring {
        frame: PathBuf,
        #[arg(long, requires_all = ["label", "g"])]
        f: Option<World>,
        /// Least member of the label filter, e.g. `1,2`
        #[arg(long, requires_all = ["f", "g"])]
        label: Option<String>,
        #[arg(long, requires_all = ["f", "label"])]
        g: Option<World>,
    },
    /// Build the ultrafilter extension of a frame
    Ue {
        frame: PathBuf,
        /// Lift the file's valuation as well
        #[arg(long)]
        model: bool,
        #[arg(long)]
        dot: Option<PathBuf>,
        /// Write the extension as JSON to this file
        #[arg(long = "json-out", visible_alias = "out-json")]
        json_out: Option<PathBuf>,
        #[arg(long, value_parser = positive)]
        cap: Option<usize>,
    },
    /// Two bisimilar frames on either side of the pencil condition
    PencilDemo {
        #[arg(long, default_value_t = 3, value_parser = positive)]
        fan: usize,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, default_value_t = 2)]
        depth: usize,
        /// Write `<prefix>-good.dot` and `<prefix>-bad.dot`
        #[arg(long)]
        dot_prefix: Option<String>,
    },
    /// Check a proof file, or the built-in derived theorems
    ProveCheck {
        #[arg(required_unless_present = "library")]
        file: Option<PathBuf>,
        #[arg(long, conflicts_with = "file")]
        library: bool,
    },
    /// Run every sweep over the enumerated frames and the corpus
    Corpus {
        /// Frames enumerated exhaustively up to this many worlds
        #[arg(long, default_value_t = 3, value_parser = positive)]
        max_worlds: usize,
        #[arg(long, default_value_t = 100)]
        pencil_trials: usize,
    },
}

/// Exit status of a successfully interpreted command.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail,
}

impl Status {
    pub fn code(self) -> i32 {
        match self {
            Status::Pass => 0,
            Status::Fail => 1,
        }
    }

    fn from_bool(ok: bool) -> Status {
        if ok {
            Status::Pass
        } else {
            Status::Fail
        }
    }
}

/// Errors from [`run`] are usage errors (exit 2).
pub fn run(cli: &Cli, out: &mut dyn Write) -> Result<Status> {
    let cfg = &cli.config;
    match &cli.command {
        Command::Parse { formula } => cmd_parse(cfg, formula, out),
        Command::Mc { frame, formula, world } => cmd_mc(cfg, frame, formula, *world, out),
        Command::FrameValid { frame, formula } => cmd_frame_valid(cfg, frame, formula, out),
        Command::Bisim { left, right, z } => cmd_bisim(cfg, left, right, z.as_deref(), out),
        Command::Translate { formula, simplify } => cmd_translate(cfg, formula, *simplify, out),
        Command::Eval { frame, formula, vals } => cmd_eval(cfg, frame, formula, vals, out),
        Command::Assuring { frame, f, label, g } => cmd_assuring(cfg, frame, *f, label.as_deref(), *g, out),
        Command::Ue { frame, model, dot, json_out, cap } => {
            cmd_ue(cfg, frame, *model, dot.as_deref(), json_out.as_deref(), *cap, out)
        }
        Command::PencilDemo { fan, trials, depth, dot_prefix } => {
            cmd_pencil(cfg, *fan, *trials, *depth, dot_prefix.as_deref(), out)
        }
        Command::ProveCheck { file, library } => cmd_prove_check(cfg, file.as_deref(), *library, out),
        Command::Corpus { max_worlds, pencil_trials } => cmd_corpus(cfg, *max_worlds, *pencil_trials, out),
    }
}

fn formula_arg(text: &str) -> Result<Formula> {
    parse(text).map_err(|e| anyhow!("cannot parse `{text}`: {e}"))
}

fn load(path: &Path) -> Result<LoadedFrame> {
    match read_frame_file(path) {
        Err(e @ FrameIoError::Read { .. }) => Err(e.into()),
        other => other.with_context(|| format!("in {}", path.display())),
    }
}

fn emit_json(out: &mut dyn Write, value: &impl Serialize) -> Result<()> {
    serde_json::to_writer_pretty(&mut *out, value)?;
    writeln!(out)?;
    Ok(())
}

fn world_arg(w: World, n: usize) -> Result<World> {
    if w >= n {
        bail!("world {w} out of range (frame has {n} worlds)");
    }
    Ok(w)
}

fn worlds_arg(text: &str, n: usize) -> Result<WorldSet> {
    let mut set = WorldSet::empty(n);
    for part in text.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let w: World = part.parse().with_context(|| format!("bad world `{part}`"))?;
        set.insert(world_arg(w, n)?);
    }
    Ok(set)
}

fn cmd_parse(cfg: &Config, text: &str, out: &mut dyn Write) -> Result<Status> {
    let f = formula_arg(text)?;
    let atoms: Vec<String> = f.atoms().into_iter().collect();
    match cfg.format() {
        Format::Json => emit_json(
            out,
            &json!({
                "core": f.to_string(),
                "sugared": f.to_sugared(),
                "unicode": f.to_unicode(),
                "atoms": atoms,
                "modal_depth": f.modal_depth(),
                "size": f.size(),
            }),
        )?,
        Format::Text => {
            writeln!(out, "core:     {f}")?;
            writeln!(out, "sugared:  {f:#}")?;
            writeln!(out, "unicode:  {}", f.to_unicode())?;
            writeln!(out, "atoms:    {}", atoms.join(" "))?;
            writeln!(out, "depth:    {}", f.modal_depth())?;
            writeln!(out, "size:     {}", f.size())?;
        }
    }
    Ok(Status::Pass)
}

fn cmd_mc(cfg: &Config, path: &Path, text: &str, world: Option<World>, out: &mut dyn Write) -> Result<Status> {
    let loaded = load(path)?;
    let f = formula_arg(text)?;
    let n = loaded.frame.n();
    if let Some(w) = world {
        world_arg(w, n)?;
    }
    let ext = Evaluator::new(&loaded.frame, &loaded.valuation).eval(&f);
    let shown: Vec<World> = match world {
        Some(w) => vec![w],
        None => (0..n).collect(),
    };
    match cfg.format() {
        Format::Json => {
            let rows: Vec<_> = shown.iter().map(|&w| json!({"world": w, "holds": ext.contains(w)})).collect();
            emit_json(out, &json!({"formula": f, "extension": ext, "worlds": rows}))?;
        }
        Format::Text => {
            writeln!(out, "{f:#}")?;
            for &w in &shown {
                writeln!(out, "  {w}: {}", if ext.contains(w) { "true" } else { "false" })?;
            }
        }
    }
    Ok(Status::from_bool(world.is_none_or(|w| ext.contains(w))))
}

fn cmd_frame_valid(cfg: &Config, path: &Path, text: &str, out: &mut dyn Write) -> Result<Status> {
    let loaded = load(path)?;
    let f = formula_arg(text)?;
    let verdict = frame_valid_bounded(&loaded.frame, &f, cfg.valuation_bound);
    match (cfg.format(), &verdict) {
        (Format::Json, Ok(v)) => emit_json(out, v)?,
        (Format::Json, Err(e)) => emit_json(out, &json!({"verdict": "resource", "error": e.to_string()}))?,
        (Format::Text, Ok(FrameVerdict::Valid)) => writeln!(out, "valid: {f:#}")?,
        (Format::Text, Ok(FrameVerdict::Counter { valuation, world })) => {
            writeln!(out, "not valid: {f:#} fails at world {world} under")?;
            for (atom, set) in valuation.iter() {
                writeln!(out, "  {atom} = {set}")?;
            }
        }
        (Format::Text, Err(e)) => writeln!(out, "resource bound exceeded: {e}")?,
    }
    Ok(Status::from_bool(matches!(verdict, Ok(FrameVerdict::Valid))))
}

fn read_pairs(path: &Path, nl: usize, nr: usize) -> Result<Vec<(World, World)>> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let mut pairs = Vec::new();
    for (k, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let nums: Vec<&str> = line.split(|c: char| c == ',' || c.is_whitespace()).filter(|s| !s.is_empty()).collect();
        let [a, b] = nums[..] else {
            bail!("{}: line {}: expected two worlds", path.display(), k + 1);
        };
        let parse = |s: &str| s.parse::<World>().with_context(|| format!("{}: line {}: bad world `{s}`", path.display(), k + 1));
        pairs.push((world_arg(parse(a)?, nl)?, world_arg(parse(b)?, nr)?));
    }
    Ok(pairs)
}

fn cmd_bisim(cfg: &Config, left: &Path, right: &Path, z: Option<&Path>, out: &mut dyn Write) -> Result<Status> {
    let l = load(left)?;
    let r = load(right)?;
    let lm = Model::new(l.frame.clone(), l.valuation);
    let rm = Model::new(r.frame.clone(), r.valuation);
    match z {
        Some(zp) => {
            let pairs = read_pairs(zp, lm.frame.n(), rm.frame.n())?;
            let b = Bisimulation::new(lm, rm, pairs);
            let verdict = check_bisim(&b);
            match cfg.format() {
                Format::Json => emit_json(out, &verdict)?,
                Format::Text => match &verdict {
                    BisimVerdict::Ok => writeln!(out, "bisimulation: {} pairs", b.len())?,
                    BisimVerdict::Failure(e) => writeln!(out, "not a bisimulation: {e}")?,
                },
            }
            Ok(Status::from_bool(verdict.is_ok()))
        }
        None => {
            let b = max_bisim(&lm, &rm);
            let pairs: Vec<_> = b.pairs().collect();
            match cfg.format() {
                Format::Json => emit_json(out, &json!({"largest": pairs}))?,
                Format::Text => {
                    writeln!(out, "largest bisimulation: {} pairs", pairs.len())?;
                    for (a, c) in pairs {
                        writeln!(out, "  {a} {c}")?;
                    }
                }
            }
            Ok(Status::Pass)
        }
    }
}

fn cmd_translate(cfg: &Config, text: &str, simplify: bool, out: &mut dyn Write) -> Result<Status> {
    let f = formula_arg(text)?;
    let mut t = translate(&f);
    if simplify {
        t = t.simplify();
    }
    match cfg.format() {
        Format::Json => emit_json(out, &json!({"formula": f, "term": t.to_string(), "notation": format!("{t:#}")}))?,
        Format::Text => writeln!(out, "{t:#}")?,
    }
    Ok(Status::Pass)
}

fn cmd_eval(cfg: &Config, path: &Path, text: &str, vals: &[String], out: &mut dyn Write) -> Result<Status> {
    let loaded = load(path)?;
    let f = formula_arg(text)?;
    let n = loaded.frame.n();
    let mut e = SetValuation::from_valuation(&loaded.valuation);
    for v in vals {
        let (atom, worlds) = v.split_once('=').ok_or_else(|| anyhow!("expected ATOM=WORLDS, got `{v}`"))?;
        e.bind(atom.trim(), worlds_arg(worlds, n)?);
    }
    let t = translate(&f);
    let value = eval_term(&loaded.frame, &e, &t)?;
    match cfg.format() {
        Format::Json => emit_json(out, &json!({"formula": f, "term": format!("{t:#}"), "value": value}))?,
        Format::Text => writeln!(out, "{value}")?,
    }
    Ok(Status::Pass)
}

fn cmd_assuring(
    cfg: &Config,
    path: &Path,
    f: Option<World>,
    label: Option<&str>,
    g: Option<World>,
    out: &mut dyn Write,
) -> Result<Status> {
    let loaded = load(path)?;
    let fr = &loaded.frame;
    let n = fr.n();
    if n > 12 {
        bail!("assuring enumerates subsets; frame has {n} worlds (limit 12)");
    }
    if let (Some(f), Some(label), Some(g)) = (f, label, g) {
        let fu = Ultrafilter::principal(world_arg(f, n)?);
        let gu = Ultrafilter::principal(world_arg(g, n)?);
        let l = Filter::up(worlds_arg(label, n)?).ok_or_else(|| anyhow!("label must be nonempty (improper filter)"))?;
        let holds = assuring(fr, fu, &l, gu);
        match cfg.format() {
            Format::Json => emit_json(out, &json!({"f": f, "label": l.min_set(), "g": g, "holds": holds}))?,
            Format::Text => writeln!(out, "{fu} ≺_{l} {gu}: {holds}")?,
        }
        return Ok(Status::from_bool(holds));
    }
    let triples = assuring_triples(fr);
    match cfg.format() {
        Format::Json => {
            let rows: Vec<_> = triples
                .iter()
                .map(|(f, l, g)| json!({"f": f.witness, "label": l.min_set(), "g": g.witness}))
                .collect();
            emit_json(out, &rows)?;
        }
        Format::Text => {
            for (f, l, g) in &triples {
                writeln!(out, "{f} ≺_{l} {g}")?;
            }
            writeln!(out, "{} triples", triples.len())?;
        }
    }
    Ok(Status::Pass)
}

fn cmd_ue(
    cfg: &Config,
    path: &Path,
    model: bool,
    dot: Option<&Path>,
    json_out: Option<&Path>,
    cap: Option<usize>,
    out: &mut dyn Write,
) -> Result<Status> {
    let loaded = load(path)?;
    let opts = UeOptions {
        cap: cap.unwrap_or(cfg.ue_cap),
        ..UeOptions::default()
    };
    let (ue, lifted) = if model {
        match build_ue_model(&Model::new(loaded.frame.clone(), loaded.valuation.clone()), &opts) {
            Ok(um) => (um.ue, Some(um.model.valuation)),
            Err(e) => return ue_failure(cfg, &e, out),
        }
    } else {
        match build_ue(&loaded.frame, &opts) {
            Ok(ue) => (ue, None),
            Err(e) => return ue_failure(cfg, &e, out),
        }
    };
    if let Some(p) = dot {
        std::fs::write(p, ue.to_dot(lifted.as_ref())).with_context(|| format!("writing {}", p.display()))?;
    }
    let mut doc = ue.to_json();
    if let Some(v) = &lifted {
        doc["valuation"] = serde_json::to_value(v)?;
    }
    if let Some(p) = json_out {
        let text = serde_json::to_string_pretty(&doc)?;
        std::fs::write(p, text + "\n").with_context(|| format!("writing {}", p.display()))?;
    }
    let valid = ue.frame().validate();
    match cfg.format() {
        Format::Json => emit_json(out, &doc)?,
        Format::Text => {
            writeln!(out, "{} base worlds, {} extension worlds", loaded.frame.n(), ue.len())?;
            for (i, w) in ue.worlds().iter().enumerate() {
                let succ = ue.frame().successors(i);
                if succ.len() <= 12 {
                    writeln!(out, "  {i}: {w}  R→ {succ}")?;
                } else {
                    writeln!(out, "  {i}: {w}  R→ {} worlds", succ.len())?;
                }
            }
            writeln!(out, "frame laws: {}", if valid.is_ok() { "ok" } else { "violated" })?;
        }
    }
    Ok(Status::from_bool(valid.is_ok()))
}

fn ue_failure(cfg: &Config, e: &ilkit_core::extension::UeError, out: &mut dyn Write) -> Result<Status> {
    match cfg.format() {
        Format::Json => emit_json(out, &json!({"error": e.to_string()}))?,
        Format::Text => writeln!(out, "extension failed: {e}")?,
    }
    Ok(Status::Fail)
}

fn cmd_pencil(
    cfg: &Config,
    fan: usize,
    trials: usize,
    depth: usize,
    dot_prefix: Option<&str>,
    out: &mut dyn Write,
) -> Result<Status> {
    if let Some(prefix) = dot_prefix {
        let pair = build_demo_pair(fan)?;
        for (name, fr) in [("good", &pair.good), ("bad", &pair.bad)] {
            let p = format!("{prefix}-{name}.dot");
            std::fs::write(&p, to_dot(fr, None)).with_context(|| format!("writing {p}"))?;
        }
    }
    let report = nondefinability_demo(fan, trials, depth, cfg.seed);
    match (cfg.format(), &report) {
        (Format::Json, Ok(r)) => emit_json(out, &json!({"verdict": "pass", "report": r}))?,
        (Format::Json, Err(e)) => emit_json(out, &json!({"verdict": "fail", "error": e.to_string()}))?,
        (Format::Text, Ok(r)) => {
            let w = r.bad_witness;
            writeln!(out, "good frame ({} worlds): in the pencil class", r.good_worlds)?;
            writeln!(
                out,
                "bad frame ({} worlds): outside, witness x={} y={} z={} u={} v={}",
                r.bad_worlds, w.x, w.y, w.z, w.u, w.v
            )?;
            writeln!(out, "bisimilar under all {} transferred valuations", r.bisimilar_trials)?;
            writeln!(
                out,
                "{} formulas of depth <= {} agree at every paired world ({} checks)",
                r.pool_size, r.depth, r.agreement_checks
            )?;
            if r.via_search {
                writeln!(out, "(pair found by search)")?;
            }
            writeln!(out, "PASS")?;
        }
        (Format::Text, Err(e)) => writeln!(out, "FAIL: {e}")?,
    }
    Ok(Status::from_bool(report.is_ok()))
}

fn cmd_prove_check(cfg: &Config, file: Option<&Path>, library: bool, out: &mut dyn Write) -> Result<Status> {
    if library {
        let mut ok = true;
        let mut rows = Vec::new();
        for t in derived_theorems() {
            let v = check_proof(&t.proof);
            ok &= v.is_valid();
            rows.push((t.name, t.statement, t.proof.steps.len(), v));
        }
        match cfg.format() {
            Format::Json => {
                let rows: Vec<_> = rows
                    .iter()
                    .map(|(n, s, k, v)| json!({"name": n, "statement": s, "steps": k, "result": v}))
                    .collect();
                emit_json(out, &rows)?;
            }
            Format::Text => {
                for (n, s, k, v) in &rows {
                    let mark = if v.is_valid() { "ok" } else { "FAIL" };
                    writeln!(out, "{mark:<4} {n:<18} {s:#}  ({k} steps)")?;
                }
            }
        }
        return Ok(Status::from_bool(ok));
    }
    let path = file.expect("clap requires a file without --library");
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let proof = Proof::from_json(&text).with_context(|| format!("{} is not a proof", path.display()))?;
    let verdict = check_proof(&proof);
    match cfg.format() {
        Format::Json => emit_json(out, &verdict)?,
        Format::Text => {
            write!(out, "{proof}")?;
            writeln!(out, "{verdict}")?;
        }
    }
    Ok(Status::from_bool(matches!(verdict, ProofVerdict::Valid { .. })))
}

/// Corpus directory: `--corpus`, then the environment, then `./corpus`,
/// then the one shipped with the sources.
pub fn corpus_dir(cfg: &Config) -> PathBuf {
    if let Some(d) = &cfg.corpus {
        return d.clone();
    }
    let local = PathBuf::from("corpus");
    if local.is_dir() {
        return local;
    }
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../corpus")
}

fn cmd_corpus(cfg: &Config, max_worlds: usize, pencil_trials: usize, out: &mut dyn Write) -> Result<Status> {
    let dir = corpus_dir(cfg);
    let files = load_corpus_dir(&dir).with_context(|| format!("loading corpus {}", dir.display()))?;
    let sweep = SweepConfig {
        max_worlds,
        pool_depth: cfg.pool_depth,
        pool_size: cfg.pool_size,
        seed: cfg.seed,
        pencil_trials,
        files,
        ..SweepConfig::default()
    };
    let names: Vec<String> = sweep.files.iter().map(|e| e.name.clone()).collect();
    let start = Instant::now();
    let reports: Vec<CheckReport> = scoreboard(&sweep);
    let ok = reports.iter().all(CheckReport::passed);
    match cfg.format() {
        Format::Json => emit_json(
            out,
            &json!({"corpus": names, "max_worlds": max_worlds, "seed": cfg.seed, "passed": ok, "checks": reports}),
        )?,
        Format::Text => {
            writeln!(out, "corpus {} ({} files), frames up to {max_worlds} worlds", dir.display(), names.len())?;
            for r in &reports {
                let mark = if r.passed() { "PASS" } else { "FAIL" };
                writeln!(out, "{mark}  {:<28} {:>10}  {}", r.id, r.instances, r.title)?;
                if let Some(msg) = &r.first_failure {
                    writeln!(out, "      first failure: {msg}")?;
                }
            }
            let passed = reports.iter().filter(|r| r.passed()).count();
            writeln!(out, "{passed}/{} checks passed in {:.1}s", reports.len(), start.elapsed().as_secs_f64())?;
        }
    }
    Ok(Status::from_bool(ok))
}
