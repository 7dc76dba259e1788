//! Command execution.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use num_bigint::BigInt;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::{json, Value};
use thiserror::Error;

use ybe_core::brace::{AxiomSampling, BraceData};
use ybe_core::family::FamilyParams;
use ybe_core::format::{self, FormatError, NamedParams};
use ybe_core::permgroup::{Nilpotency, PermGroupData, PermGroupError, DEFAULT_CAP};
use ybe_core::retraction::{tower_default, TowerClass, TowerResult};
use ybe_core::solution::{validate, FiniteSolution, SigmaTable};
use ybe_core::structgroup::{DecompositionMode, StructureGroup};
use ybe_core::wreath::wreath_check;

use crate::report::{GridRow, Report, Section, Verdict};

/// Random triples checked when the brace is too large for all of them.
pub const AXIOM_SAMPLES: usize = 200_000;
pub const DEFAULT_RADIUS: usize = 3;
pub const DEFAULT_SAMPLES: usize = 1000;
const SWEEP_WORD_LEN: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Build,
    Check,
    Tower,
    Group,
    Brace,
    Sg,
    Grid,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Self::Build => "build",
            Self::Check => "check",
            Self::Tower => "tower",
            Self::Group => "group",
            Self::Brace => "brace",
            Self::Sg => "sg",
            Self::Grid => "grid",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OutputFormat {
    #[default]
    Text,
    Json,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum InputSource {
    Params(PathBuf),
    Solution(PathBuf),
}

impl InputSource {
    fn path(&self) -> &Path {
        match self {
            Self::Params(p) | Self::Solution(p) => p,
        }
    }
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub command: Command,
    pub input: InputSource,
    pub cap: usize,
    pub radius: usize,
    pub seed: u64,
    pub samples: usize,
    pub probe_center: bool,
    pub word: Option<String>,
    pub dump_hnf: bool,
    pub format: OutputFormat,
    pub timings: bool,
}

impl RunConfig {
    pub fn new(command: Command, input: InputSource) -> Self {
        Self {
            command,
            input,
            cap: DEFAULT_CAP,
            radius: DEFAULT_RADIUS,
            seed: 0,
            samples: DEFAULT_SAMPLES,
            probe_center: false,
            word: None,
            dump_hnf: false,
            format: OutputFormat::Text,
            timings: true,
        }
    }
}

#[derive(Debug, Error)]
pub enum RunError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Parse {
        path: String,
        #[source]
        source: Box<FormatError>,
    },
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Cap(PermGroupError),
    #[error("{0}")]
    Math(String),
}

impl RunError {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Math(_) => 1,
            Self::Usage(_) => 2,
            Self::Cap(_) => 3,
            Self::Io { .. } | Self::Parse { .. } => 4,
        }
    }
}

enum Loaded {
    Params(Box<NamedParams>),
    Table(SigmaTable),
}

impl Loaded {
    fn params(&self) -> Option<&FamilyParams> {
        match self {
            Self::Params(p) => Some(&p.params),
            Self::Table(_) => None,
        }
    }

    fn table(&self) -> SigmaTable {
        match self {
            Self::Params(p) => p.params.sigma_table(),
            Self::Table(t) => t.clone(),
        }
    }

    fn solution(&self) -> Result<FiniteSolution, RunError> {
        match self {
            Self::Params(p) => Ok(p.params.build()),
            Self::Table(t) => FiniteSolution::new(t.clone()).map_err(|e| RunError::Math(e.to_string())),
        }
    }
}

fn read(path: &Path) -> Result<String, RunError> {
    fs::read_to_string(path).map_err(|source| RunError::Io {
        path: path.display().to_string(),
        source,
    })
}

fn parse_err(path: &Path) -> impl FnOnce(FormatError) -> RunError + '_ {
    move |source| RunError::Parse {
        path: path.display().to_string(),
        source: Box::new(source),
    }
}

fn load(input: &InputSource) -> Result<Loaded, RunError> {
    let path = input.path();
    let text = read(path)?;
    match input {
        InputSource::Params(_) => format::parse_params(&text).map(|p| Loaded::Params(Box::new(p))).map_err(parse_err(path)),
        InputSource::Solution(_) => format::parse_solution(&text).map(Loaded::Table).map_err(parse_err(path)),
    }
}

fn timed<T>(timings: bool, f: impl FnOnce() -> T) -> (T, Option<u64>) {
    let t = Instant::now();
    let out = f();
    (out, timings.then(|| t.elapsed().as_millis() as u64))
}

fn with_time(mut s: Section, ms: Option<u64>) -> Section {
    s.elapsed_ms = ms;
    s
}

fn class_text(c: Nilpotency) -> String {
    match c {
        Nilpotency::Class(k) => k.to_string(),
        Nilpotency::NotNilpotent => "not nilpotent".into(),
    }
}

pub fn run(cfg: &RunConfig) -> Result<Report, RunError> {
    let mut report = Report::new(cfg.command.name(), cfg.input.path().display().to_string(), cfg.seed);
    if cfg.command == Command::Grid {
        let InputSource::Params(path) = &cfg.input else {
            return Err(RunError::Usage("grid needs --params <grid file>".into()));
        };
        let text = read(path)?;
        let grid = format::parse_grid(&text).map_err(parse_err(path))?;
        run_grid(cfg, &grid, &mut report);
        return Ok(if cfg.timings { report } else { report.without_timings() });
    }
    let loaded = load(&cfg.input)?;
    match cfg.command {
        Command::Build => build(&loaded, &mut report)?,
        Command::Check => check(cfg, &loaded, &mut report)?,
        Command::Tower => tower_cmd(cfg, &loaded, &mut report)?,
        Command::Group => {
            group(cfg, &loaded, &mut report)?;
        }
        Command::Brace => brace(cfg, &loaded, &mut report, true)?,
        Command::Sg => sg(cfg, &loaded, &mut report)?,
        Command::Grid => unreachable!("handled above"),
    }
    Ok(if cfg.timings { report } else { report.without_timings() })
}

fn build(loaded: &Loaded, report: &mut Report) -> Result<(), RunError> {
    let Some(p) = loaded.params() else {
        return Err(RunError::Usage("build needs --params".into()));
    };
    let s = p.build();
    report.push(
        Section::new("build", Verdict::from_bool(s.report().is_solution()))
            .detail("size", s.len())
            .detail("blocks", p.i_count()),
    );
    report.output = Some(format::write_solution(&s));
    Ok(())
}

fn check(cfg: &RunConfig, loaded: &Loaded, report: &mut Report) -> Result<(), RunError> {
    let table = loaded.table();
    let (v, ms) = timed(cfg.timings, || validate(&table));
    let v = v.map_err(|e| RunError::Math(e.to_string()))?;
    let mut sec = Section::new("validation", Verdict::from_bool(v.is_solution() && v.braid_checks_agree()))
        .detail("size", v.size)
        .detail("involutive", v.involutive.holds)
        .detail("non_degenerate", v.non_degenerate.holds)
        .detail("braid", v.braid.holds)
        .detail("braid_pairwise", v.braid_pairwise.holds);
    for (name, flag) in [
        ("involutive", &v.involutive),
        ("non_degenerate", &v.non_degenerate),
        ("braid", &v.braid),
        ("braid_pairwise", &v.braid_pairwise),
    ] {
        if let Some(w) = &flag.witness {
            sec = sec.witness(format!("{name}: {w}"));
        }
    }
    report.push(with_time(sec, ms));
    if !v.is_solution() {
        return Ok(());
    }
    let s = FiniteSolution::new(table).map_err(|e| RunError::Math(e.to_string()))?;
    let p = loaded.params();
    for sec in solution_sections(cfg, &s, p)? {
        report.push(sec);
    }
    Ok(())
}

/// Square-freeness, retraction, blocks, orbits and lri.
fn solution_sections(cfg: &RunConfig, s: &FiniteSolution, p: Option<&FamilyParams>) -> Result<Vec<Section>, RunError> {
    let mut out = Vec::new();
    let pred = p.map(|p| p.predict());

    let measured = s.is_square_free();
    out.push(match pred {
        Some(pr) => Section::new("square_free", Verdict::from_bool(pr.square_free == measured))
            .detail("predicted", pr.square_free)
            .detail("measured", measured),
        None => Section::new("square_free", Verdict::Info).detail("measured", measured),
    });

    let (t, ms) = timed(cfg.timings, || tower_default(s));
    let t = t.map_err(|e| RunError::Math(e.to_string()))?;
    let irr = t.classification == TowerClass::Irretractable;
    let sec = match pred {
        Some(pr) if pr.irretractable_sufficient => {
            Section::new("retraction", Verdict::from_bool(irr)).detail("expected", "irretractable")
        }
        _ => Section::new("retraction", Verdict::Info),
    };
    out.push(with_time(
        sec.detail("classification", t.classification.to_string())
            .detail("sizes", t.sizes(s.len())),
        ms,
    ));

    if let Some(p) = p {
        let (sec, ms) = timed(cfg.timings, || blocks_section(p, s));
        out.push(with_time(sec, ms));
    }

    let sg = StructureGroup::new(s).map_err(|e| RunError::Math(e.to_string()))?;
    let orbits = sg.orbits().to_vec();
    let sizes: Vec<usize> = orbits.iter().map(Vec::len).collect();
    out.push(match p {
        Some(p) if p.predict().orbits_are_blocks_sufficient => {
            Section::new("orbits", Verdict::from_bool(orbits == p.blocks())).detail("expected", "orbits equal the blocks")
        }
        _ => Section::new("orbits", Verdict::Info),
    }
    .detail("count", orbits.len())
    .detail("sizes", sizes));

    let lri = s.check_lri();
    out.push(match p {
        Some(_) => Section::new("lri", Verdict::from_bool(lri)).detail("expected", true),
        None => Section::new("lri", Verdict::Info),
    }
    .detail("holds", lri));
    Ok(out)
}

fn blocks_section(p: &FamilyParams, s: &FiniteSolution) -> Section {
    let blocks = p.blocks();
    if let Err(e) = s.check_invariant_partition(&blocks) {
        return Section::new("blocks", Verdict::Fail).witness(e.to_string());
    }
    let exact_two = p.predict().block_level_exactly_two;
    let mut ok = true;
    let mut levels = Vec::new();
    let mut sec = Section::new("blocks", Verdict::Pass);
    for (i, b) in blocks.iter().enumerate() {
        let level = s
            .restrict(b)
            .ok()
            .and_then(|r| tower_default(&r).ok())
            .map(|t: TowerResult| t.classification);
        let good = match level {
            Some(TowerClass::MultipermutationLevel(m)) => {
                levels.push(Value::from(m));
                if exact_two { m == 2 } else { m <= 2 }
            }
            other => {
                levels.push(Value::from(format!("{other:?}")));
                false
            }
        };
        if !good {
            ok = false;
            sec = sec.witness(format!("block {} has level {:?}", i + 1, levels[i]));
        }
    }
    sec = sec.detail("levels", levels).detail("expected_exactly_two", exact_two);
    if blocks.len() >= 2 {
        let stu = s.check_strong_twisted_union(&blocks).unwrap_or(false);
        ok &= stu;
        sec = sec.detail("strong_twisted_union", stu);
    }
    sec.verdict = Verdict::from_bool(ok);
    sec
}

fn tower_cmd(cfg: &RunConfig, loaded: &Loaded, report: &mut Report) -> Result<(), RunError> {
    let s = loaded.solution()?;
    let (t, ms) = timed(cfg.timings, || tower_default(&s));
    let t = t.map_err(|e| RunError::Math(e.to_string()))?;
    let sizes = t.sizes(s.len());
    let mut text = String::new();
    for (k, n) in sizes.iter().enumerate() {
        text.push_str(&format!("step {k}: size={n}\n"));
    }
    text.push_str(&format!("classification: {}\n", t.classification));
    report.push(with_time(
        Section::new("tower", Verdict::Info)
            .detail("sizes", &sizes)
            .detail("classification", t.classification),
        ms,
    ));
    report.output = Some(text);
    Ok(())
}

fn enumerate(cfg: &RunConfig, s: &FiniteSolution) -> Result<(PermGroupData, Option<u64>), RunError> {
    let (g, ms) = timed(cfg.timings, || PermGroupData::enumerate(s, cfg.cap));
    match g {
        Ok(g) => Ok((g, ms)),
        Err(e @ PermGroupError::CapExceeded { .. }) => Err(RunError::Cap(e)),
        Err(e) => Err(RunError::Math(e.to_string())),
    }
}

fn group(cfg: &RunConfig, loaded: &Loaded, report: &mut Report) -> Result<PermGroupData, RunError> {
    let s = loaded.solution()?;
    let (g, ms) = enumerate(cfg, &s)?;
    report.push(with_time(
        Section::new("enumeration", Verdict::Info)
            .detail("order", g.order())
            .detail("cap", cfg.cap),
        ms,
    ));
    let (a, ms) = timed(cfg.timings, || g.analyze());
    report.push(with_time(
        Section::new("series", Verdict::Info)
            .detail("orbits", &a.orbits)
            .detail("derived_series", &a.derived_series)
            .detail("derived_length", a.derived_length)
            .detail("lower_central_series", &a.lower_central_series)
            .detail("nilpotency_class", class_text(a.nilpotency_class))
            .detail("center_order", a.center_order),
        ms,
    ));
    if let Some(p) = loaded.params() {
        let (w, ms) = timed(cfg.timings, || wreath_check(p, &g, &a));
        let w = w.map_err(|e| RunError::Math(e.to_string()))?;
        let mut sec = Section::new("wreath", Verdict::from_bool(w.passes()));
        if let Value::Object(m) = serde_json::to_value(&w).expect("serializes") {
            sec.details = m;
        }
        report.push(with_time(sec, ms));
    }
    Ok(g)
}

fn brace(cfg: &RunConfig, loaded: &Loaded, report: &mut Report, axioms: bool) -> Result<(), RunError> {
    let s = loaded.solution()?;
    let (g, ms) = enumerate(cfg, &s)?;
    report.push(with_time(Section::new("enumeration", Verdict::Info).detail("order", g.order()), ms));
    let (b, ms) = timed(cfg.timings, || BraceData::build(g));
    let b = b.map_err(|e| RunError::Math(e.to_string()))?;
    let quotient = b.quotient_size();
    let mut sec = Section::new(
        "lattice",
        Verdict::from_bool(quotient == BigInt::from(b.order())),
    )
    .detail("quotient_size", quotient.to_string())
    .detail("group_order", b.order())
    .detail("relations_used", b.relations_used())
    .detail("diagonal", b.hnf().diagonal());
    if cfg.dump_hnf {
        for row in b.hnf().rows() {
            let cells: Vec<String> = row.iter().map(i64::to_string).collect();
            sec = sec.witness(cells.join(" "));
        }
    }
    report.push(with_time(sec, ms));

    if axioms {
        let sampling = AxiomSampling::auto(b.order(), AXIOM_SAMPLES, cfg.seed);
        let (ax, ms) = timed(cfg.timings, || b.verify_brace_axioms(sampling));
        let mut sec = Section::new("axioms", Verdict::from_bool(ax.passes()));
        if let Value::Object(m) = serde_json::to_value(&ax).expect("serializes") {
            sec.details = m;
        }
        report.push(with_time(sec, ms));
    }

    let (soc, ms) = timed(cfg.timings, || b.socle());
    let irr = tower_default(&s)
        .map(|t| t.classification == TowerClass::Irretractable)
        .unwrap_or(false);
    let sec = if irr {
        Section::new("socle", Verdict::from_bool(soc.len() == 1)).detail("expected", "trivial")
    } else {
        Section::new("socle", Verdict::Info)
    };
    report.push(with_time(sec.detail("order", soc.len()).detail("irretractable", irr), ms));

    if let Some(p) = loaded.params() {
        let (ph, ms) = timed(cfg.timings, || b.phi_h_ideal_check(p));
        let verdict = if ph.applicable {
            Verdict::from_bool(ph.passes())
        } else {
            Verdict::Skipped
        };
        let mut sec = Section::new("phi_h", verdict);
        if let Value::Object(m) = serde_json::to_value(&ph).expect("serializes") {
            sec.details = m;
        }
        report.push(with_time(sec, ms));
    }
    Ok(())
}


fn sg(cfg: &RunConfig, loaded: &Loaded, report: &mut Report) -> Result<(), RunError> {
    let s = loaded.solution()?;
    let sg = StructureGroup::new(&s).map_err(|e| RunError::Math(e.to_string()))?;

    if let Some(w) = &cfg.word {
        let word = format::parse_word(w).map_err(|source| RunError::Parse {
            path: "--word".into(),
            source: Box::new(source),
        })?;
        let g = sg.from_word(&word).map_err(|e| RunError::Usage(e.to_string()))?;
        let factors = |mode| -> Vec<Value> {
            sg.decompose(&g, mode)
                .factors
                .iter()
                .map(|(i, f)| json!({ "orbit": i, "v": f.v }))
                .collect()
        };
        report.push(
            Section::new("word", Verdict::Info)
                .detail("word", format::write_word(&word))
                .detail("v", &g.v)
                .detail("perm", g.perm.to_string())
                .detail("deg", g.deg())
                .detail("orbit_degrees", sg.orbit_degrees(&g))
                .detail("in_h", sg.in_h(&g))
                .detail("product_factors", factors(DecompositionMode::Product))
                .detail("sum_factors", factors(DecompositionMode::Sum)),
        );
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        let (sw, ms) = timed(cfg.timings, || sg.property_sweep(&mut rng, cfg.samples, SWEEP_WORD_LEN));
        let mut sec = Section::new("properties", Verdict::from_bool(sw.passes()));
        if let Value::Object(m) = serde_json::to_value(&sw).expect("serializes") {
            sec.details = m;
        }
        report.push(with_time(sec, ms));
        let (q, ms) = timed(cfg.timings, || sg.quotient_rank_check(&mut rng, cfg.samples));
        let mut sec = Section::new("orbit_quotient", Verdict::from_bool(q.passes()));
        if let Value::Object(m) = serde_json::to_value(&q).expect("serializes") {
            sec.details = m;
        }
        report.push(with_time(sec, ms));
    }

    if cfg.probe_center {
        let Some(p) = loaded.params() else {
            return Err(RunError::Usage("--probe-center needs --params".into()));
        };
        let (pr, ms) = timed(cfg.timings, || sg.probe_center_h(p, cfg.radius));
        let verdict = if pr.applicable {
            Verdict::from_bool(pr.centralizing.is_empty())
        } else {
            Verdict::Skipped
        };
        let mut sec = Section::new("center_probe", verdict);
        if let Value::Object(m) = serde_json::to_value(&pr).expect("serializes") {
            sec.details = m;
        }
        sec = sec.detail(
            "scope",
            format!("evidence only: words of length <= {} in H", cfg.radius),
        );
        report.push(with_time(sec, ms));
    }
    Ok(())
}

fn grid_row(cfg: &RunConfig, index: usize, np: &NamedParams) -> GridRow {
    let t = Instant::now();
    let mut row = GridRow {
        index,
        name: np.name.clone(),
        size: np.params.size(),
        group_order: None,
        checks: Default::default(),
        failed: Vec::new(),
        error: None,
        cap_exceeded: false,
        elapsed_ms: None,
    };
    let loaded = Loaded::Params(Box::new(np.clone()));
    let quiet = RunConfig {
        timings: false,
        ..cfg.clone()
    };
    let mut sub = Report::new("grid", String::new(), cfg.seed);
    let outcome = check(&quiet, &loaded, &mut sub)
        .and_then(|_| group(&quiet, &loaded, &mut sub))
        .and_then(|g| {
            row.group_order = Some(g.order());
            brace(&quiet, &loaded, &mut sub, false)
        });
    if let Err(e) = outcome {
        row.cap_exceeded = matches!(e, RunError::Cap(_));
        row.error = Some(e.to_string());
    }
    for s in &sub.sections {
        match s.verdict {
            Verdict::Pass | Verdict::Fail => {
                row.checks.insert(s.name.clone(), Value::Bool(s.passed()));
                if !s.passed() {
                    row.failed.push(s.name.clone());
                }
            }
            Verdict::Info | Verdict::Skipped => {}
        }
    }
    if cfg.timings {
        row.elapsed_ms = Some(t.elapsed().as_millis() as u64);
    }
    row
}

fn run_grid(cfg: &RunConfig, grid: &[NamedParams], report: &mut Report) {
    let t = Instant::now();
    let rows: Vec<GridRow> = grid
        .par_iter()
        .enumerate()
        .map(|(i, np)| grid_row(cfg, i, np))
        .collect();
    let failed = rows.iter().filter(|r| !r.passed()).count();
    let mut sec = Section::new("grid", Verdict::from_bool(failed == 0))
        .detail("instances", rows.len())
        .detail("failed", failed);
    for r in rows.iter().filter(|r| !r.passed()) {
        sec = sec.witness(format!("instance {}: {}", r.index, r.error.clone().unwrap_or_else(|| r.failed.join(","))));
    }
    if cfg.timings {
        sec.elapsed_ms = Some(t.elapsed().as_millis() as u64);
    }
    report.push(sec);
    report.rows = rows;
}

pub fn render(report: &Report, format: OutputFormat) -> String {
    match format {
        OutputFormat::Text => report.to_text(),
        OutputFormat::Json => report.to_json() + "\n",
    }
}
