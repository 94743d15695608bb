use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;
use serde_json::{json, Value};

use schur_orbits_core::covers::{enumerate_tuples, CoverError, EnumOptions, TupleJson};
use schur_orbits_core::group::{named, GroupError};
use schur_orbits_core::homology::{h2_bgc, h2_group, m_g_c, sch_unbranched, HomologyError};
use schur_orbits_core::mcg::{level_orbits, CatalogOptions, McgError, OrbitCache};
use schur_orbits_core::schur::{SchurContext, SchurError};
use schur_orbits_core::stabilization::{
    dilate, handle_stabilize, puncture_stabilize, stable_orbits, StabError, StableOptions, TrackSelection, Verdict,
};
use schur_orbits_core::{BranchData, BranchedTuple, ClassSet, Elem, FiniteGroup, GroupSpec, Sign};

#[derive(Parser)]
#[command(name = "schur-orbits", version, about = "Orbits of branched G-covers and their Schur invariants")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    /// Group JSON file, or builtin:NAME (trivial, k4, q8, cN, sN, aN, dN, ab:2x2x2)
    #[arg(long)]
    group: String,
    /// Branch classes: selector list or a {"classes_of": [...]} JSON file
    #[arg(long)]
    classes: Option<String>,
    /// Worker threads (default: all cores)
    #[arg(long)]
    threads: Option<usize>,
    /// Write the report here instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Orbit cache directory (default: $SCHUR_ORBITS_CACHE, else ~/.cache/schur-orbits)
    #[arg(long)]
    cache_dir: Option<PathBuf>,
    #[arg(long)]
    no_cache: bool,
    /// Leave the handle-mixing moves out of the catalog
    #[arg(long)]
    no_handle_mixing: bool,
    /// Leave the puncture-pass moves out of the catalog
    #[arg(long)]
    no_puncture_pass: bool,
}

#[derive(Args, Clone)]
struct Level {
    #[arg(long, default_value_t = 0)]
    genus: usize,
    /// Branch data, e.g. "4 transpositions+, 1 transpositions-"
    #[arg(long)]
    branch: Option<String>,
    /// Unbranched covers (empty branch data, C = ∅ unless --classes is given)
    #[arg(long)]
    no_branching: bool,
    /// Upper bound on the estimated enumeration size
    #[arg(long, default_value_t = 50_000_000)]
    budget: u128,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum TrackArg {
    Auto,
    Main,
    GenusZero,
}

#[derive(Subcommand)]
enum Command {
    /// Order, generators and conjugacy classes
    GroupInfo {
        #[command(flatten)]
        common: Common,
    },
    /// List the tuples of one level
    Enumerate {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        level: Level,
        /// Keep non-surjective tuples
        #[arg(long)]
        all: bool,
    },
    /// Mapping class group orbits of one level
    Orbits {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        level: Level,
    },
    /// Invariant factors of H₂(G)
    H2 {
        #[command(flatten)]
        common: Common,
    },
    /// Invariant factors of M(G)_C
    Mgc {
        #[command(flatten)]
        common: Common,
    },
    /// H₂(BG_C) = M(G)_C ⊕ N and H₁(BG_C)
    H2bgc {
        #[command(flatten)]
        common: Common,
    },
    /// Schur class of a closed tuple in H₂(G)
    Sch {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        tuple: PathBuf,
    },
    /// sch(t) − sch(t′) in M(G)_C
    Diff {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        tuple: PathBuf,
        #[arg(long)]
        other: PathBuf,
    },
    /// Replace negatively framed punctures by positive ones
    Dilate {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        tuple: PathBuf,
    },
    /// Apply a handle or puncture stabilization
    Stabilize {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        tuple: PathBuf,
        /// Append a trivial handle
        #[arg(long)]
        handle: bool,
        /// Append a cancelling puncture pair for this class selector
        #[arg(long)]
        puncture: Option<String>,
        /// Letter for the puncture pair (default: class representative)
        #[arg(long)]
        letter: Option<Elem>,
    },
    /// Follow stabilizations until the orbit count plateaus
    StableRange {
        #[command(flatten)]
        common: Common,
        /// Seed branch data (positive)
        #[arg(long)]
        branch: Option<String>,
        #[arg(long)]
        no_branching: bool,
        #[arg(long, value_enum, default_value_t = TrackArg::Auto)]
        track: TrackArg,
        #[arg(long, default_value_t = 1)]
        start_genus: usize,
        #[arg(long, default_value_t = 500_000)]
        level_budget: u128,
        #[arg(long, default_value_t = 6)]
        max_rounds: usize,
    },
    /// Check that M(G)_C acts freely and transitively on the orbits of a level
    TorsorCheck {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        level: Level,
    },
}

struct CliError {
    kind: &'static str,
    message: String,
    code: u8,
}

impl CliError {
    fn input(message: impl Into<String>) -> Self {
        CliError { kind: "input", message: message.into(), code: 1 }
    }

    fn budget(message: impl Into<String>) -> Self {
        CliError { kind: "budget", message: message.into(), code: 2 }
    }
}

impl From<GroupError> for CliError {
    fn from(e: GroupError) -> Self {
        CliError { kind: "group", message: e.to_string(), code: 1 }
    }
}

impl From<CoverError> for CliError {
    fn from(e: CoverError) -> Self {
        match e {
            CoverError::Budget { .. } => CliError::budget(e.to_string()),
            _ => CliError { kind: "cover", message: e.to_string(), code: 1 },
        }
    }
}

impl From<HomologyError> for CliError {
    fn from(e: HomologyError) -> Self {
        let kind = if matches!(e, HomologyError::SizeCap { .. }) { "size-cap" } else { "homology" };
        CliError { kind, message: e.to_string(), code: 1 }
    }
}

impl From<McgError> for CliError {
    fn from(e: McgError) -> Self {
        match e {
            McgError::Cover(c) => c.into(),
            _ => CliError { kind: "mcg", message: e.to_string(), code: 1 },
        }
    }
}

impl From<SchurError> for CliError {
    fn from(e: SchurError) -> Self {
        match e {
            SchurError::Budget(_) => CliError::budget(e.to_string()),
            SchurError::Cover(c) => c.into(),
            SchurError::Homology(h) => h.into(),
            SchurError::Mcg(m) => m.into(),
            _ => CliError { kind: "schur", message: e.to_string(), code: 1 },
        }
    }
}

impl From<StabError> for CliError {
    fn from(e: StabError) -> Self {
        match e {
            StabError::Cover(c) => c.into(),
            StabError::Mcg(m) => m.into(),
            StabError::Homology(h) => h.into(),
            StabError::Schur(s) => s.into(),
            _ => CliError { kind: "stabilization", message: e.to_string(), code: 1 },
        }
    }
}

/// Report text plus exit status.
struct Output {
    body: String,
    code: u8,
}

impl Output {
    fn json(v: &Value) -> Self {
        Output { body: pretty(v), code: 0 }
    }
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError { kind: "io", message: format!("{}: {e}", path.display()), code: 1 })?;
    serde_json::from_str(&text).map_err(|e| CliError::input(format!("{}: {e}", path.display())))
}

fn load_group(spec: &str) -> Result<Arc<FiniteGroup>, CliError> {
    if let Some(name) = spec.strip_prefix("builtin:") {
        return named::by_name(name)
            .map(Arc::new)
            .map_err(|_| CliError::input(format!("unknown builtin group {name:?}")));
    }
    let spec: GroupSpec = read_json(Path::new(spec))?;
    Ok(Arc::new(FiniteGroup::build(&spec)?))
}

/// Cycle lengths (> 1) of a permutation, sorted.
fn cycle_type(p: &[usize]) -> Vec<usize> {
    let mut seen = vec![false; p.len()];
    let mut out = Vec::new();
    for i in 0..p.len() {
        let mut len = 0;
        let mut j = i;
        while !seen[j] {
            seen[j] = true;
            j = p[j];
            len += 1;
        }
        if len > 1 {
            out.push(len);
        }
    }
    out.sort_unstable();
    out
}

/// Class ids picked out by a single selector term.
fn select_classes(g: &FiniteGroup, term: &str) -> Result<Vec<usize>, CliError> {
    let term = term.trim();
    let by_elems = |pred: &dyn Fn(Elem) -> bool| -> Vec<usize> {
        let mut v: Vec<usize> = (1..g.order()).filter(|&x| pred(x)).map(|x| g.class_of(x)).collect();
        v.sort_unstable();
        v.dedup();
        v
    };
    let cycles = |k: usize| -> Result<Vec<usize>, CliError> {
        if g.permutation(0).is_none() {
            return Err(CliError::input(format!("selector {term:?} needs a permutation group")));
        }
        Ok(by_elems(&|x| cycle_type(g.permutation(x).expect("permutation group")) == vec![k]))
    };
    let parse = |s: &str| s.parse::<usize>().map_err(|_| CliError::input(format!("bad number in selector {term:?}")));
    let ids = match term {
        "none" => vec![],
        "all" | "all-nontrivial" => ClassSet::all_nontrivial(g).classes().to_vec(),
        "transpositions" => cycles(2)?,
        "involutions" => by_elems(&|x| g.elem_order(x) == 2),
        _ => {
            if let Some(k) = term.strip_suffix("-cycles") {
                cycles(parse(k)?)?
            } else if let Some(k) = term.strip_prefix("order:") {
                let k = parse(k)?;
                by_elems(&|x| g.elem_order(x) == k)
            } else if let Some(x) = term.strip_prefix("elem:") {
                let x = g.check_elem(parse(x)?)?;
                if x == 0 {
                    return Err(CliError::input("the identity cannot be a branch class"));
                }
                vec![g.class_of(x)]
            } else if let Some(c) = term.strip_prefix("class:") {
                let c = parse(c)?;
                if c == 0 || c >= g.num_classes() {
                    return Err(CliError::input(format!("no nontrivial class {c}")));
                }
                vec![c]
            } else {
                return Err(CliError::input(format!("unknown class selector {term:?}")));
            }
        }
    };
    Ok(ids)
}

#[derive(Deserialize)]
struct ClassesFile {
    classes_of: Vec<Elem>,
}

fn parse_class_set(g: &FiniteGroup, spec: &str) -> Result<ClassSet, CliError> {
    if spec.ends_with(".json") || Path::new(spec).is_file() {
        let f: ClassesFile = read_json(Path::new(spec))?;
        if f.classes_of.contains(&0) {
            return Err(CliError::input("the identity cannot be a branch class"));
        }
        return Ok(ClassSet::from_elements(g, &f.classes_of)?);
    }
    let mut ids = Vec::new();
    for term in spec.split(',').filter(|t| !t.trim().is_empty()) {
        ids.extend(select_classes(g, term)?);
    }
    Ok(ClassSet::from_class_ids(ids))
}

/// "4 transpositions+, 1 transpositions-" → branch data.
fn parse_branch(g: &FiniteGroup, spec: &str) -> Result<BranchData, CliError> {
    let mut v = BranchData::new();
    for term in spec.split(',').map(str::trim).filter(|t| !t.is_empty()) {
        let (count, rest) = term
            .split_once(char::is_whitespace)
            .ok_or_else(|| CliError::input(format!("branch term {term:?} should read \"COUNT SELECTOR[+|-]\"")))?;
        let count: usize = count.parse().map_err(|_| CliError::input(format!("bad count in {term:?}")))?;
        let rest = rest.trim();
        let (sel, sign) = if let Some(s) = rest.strip_suffix('-') {
            (s, Sign::Neg)
        } else {
            (rest.strip_suffix('+').unwrap_or(rest), Sign::Pos)
        };
        let ids = select_classes(g, sel)?;
        if ids.len() != 1 {
            return Err(CliError::input(format!("selector {sel:?} matches {} classes; branch terms need exactly one", ids.len())));
        }
        v.add(ids[0], sign, count);
    }
    Ok(v)
}

fn classes_and_branch(
    g: &FiniteGroup,
    common: &Common,
    branch: Option<&str>,
    no_branching: bool,
) -> Result<(ClassSet, BranchData), CliError> {
    if no_branching && branch.is_some() {
        return Err(CliError::input("--branch and --no-branching are exclusive"));
    }
    let v = match branch {
        Some(b) => parse_branch(g, b)?,
        None => BranchData::new(),
    };
    let c = match &common.classes {
        Some(s) => parse_class_set(g, s)?,
        None => ClassSet::from_class_ids(v.classes()),
    };
    Ok((c, v))
}

fn catalog(common: &Common) -> CatalogOptions {
    CatalogOptions { handle_mixing: !common.no_handle_mixing, puncture_pass: !common.no_puncture_pass }
}

fn cache(common: &Common) -> Option<OrbitCache> {
    if common.no_cache {
        return None;
    }
    let dir = common
        .cache_dir
        .clone()
        .or_else(|| std::env::var_os("SCHUR_ORBITS_CACHE").map(PathBuf::from))
        .or_else(|| std::env::var_os("HOME").map(|h| PathBuf::from(h).join(".cache").join("schur-orbits")))?;
    Some(OrbitCache::new(dir))
}

fn classes_json(g: &FiniteGroup, c: &ClassSet) -> Value {
    json!(c.classes().iter().map(|&cl| json!({"class": cl, "representative": g.class(cl).representative})).collect::<Vec<_>>())
}

fn load_tuple(g: &Arc<FiniteGroup>, path: &Path, c: Option<&ClassSet>) -> Result<BranchedTuple, CliError> {
    let j: TupleJson = read_json(path)?;
    Ok(BranchedTuple::from_json(g.clone(), &j, c)?)
}

fn run(cmd: Command) -> Result<Output, CliError> {
    match cmd {
        Command::GroupInfo { common } => {
            let g = load_group(&common.group)?;
            let classes: Vec<Value> = g
                .conjugacy_classes()
                .iter()
                .map(|cl| {
                    json!({
                        "class": cl.class_id,
                        "representative": cl.representative,
                        "size": cl.size,
                        "element_order": g.elem_order(cl.representative),
                        "centralizer_order": g.centralizer(cl.representative).len(),
                        "inner_order_on_class": g.inn_order_on_class(cl.representative),
                        "members": cl.members,
                    })
                })
                .collect();
            let elements: Vec<Value> = (0..g.order())
                .map(|x| json!({"index": x, "order": g.elem_order(x), "class": g.class_of(x), "permutation": g.permutation(x)}))
                .collect();
            Ok(Output::json(&json!({
                "order": g.order(),
                "digest": g.digest(),
                "abelian": g.is_abelian(),
                "generators": g.generators(),
                "classes": classes,
                "elements": elements,
            })))
        }
        Command::Enumerate { common, level, all } => {
            let g = load_group(&common.group)?;
            let (c, v) = classes_and_branch(&g, &common, level.branch.as_deref(), level.no_branching)?;
            let opts = EnumOptions { surjective_only: !all, budget: level.budget };
            let tuples = enumerate_tuples(&g, &c, level.genus, &v, &opts)?;
            let list: Vec<TupleJson> = tuples.iter().map(|t| t.to_json()).collect();
            Ok(Output::json(&json!({
                "genus": level.genus,
                "branch": v,
                "classes": classes_json(&g, &c),
                "surjective_only": !all,
                "count": list.len(),
                "tuples": list,
            })))
        }
        Command::Orbits { common, level } => {
            let g = load_group(&common.group)?;
            let (c, v) = classes_and_branch(&g, &common, level.branch.as_deref(), level.no_branching)?;
            let opts = EnumOptions { surjective_only: true, budget: level.budget };
            let table = level_orbits(&g, &c, level.genus, &v, &catalog(&common), &opts, cache(&common).as_ref())?;
            if common.format == Format::Csv {
                let mut s = String::from("orbit,size\n");
                for (i, o) in table.orbits.iter().enumerate() {
                    s.push_str(&format!("{i},{}\n", o.size));
                }
                return Ok(Output { body: s, code: 0 });
            }
            let mut body = serde_json::to_value(table.to_json()).expect("serializable");
            body["genus"] = json!(level.genus);
            body["branch"] = json!(v);
            body["classes"] = classes_json(&g, &c);
            body["tuples"] = json!(table.total());
            body["orbit_count"] = json!(table.num_orbits());
            Ok(Output::json(&body))
        }
        Command::H2 { common } => {
            let g = load_group(&common.group)?;
            Ok(Output::json(&json!({"H2": h2_group(&g)?.invariant_factors()})))
        }
        Command::Mgc { common } => {
            let g = load_group(&common.group)?;
            let c = parse_class_set(&g, common.classes.as_deref().unwrap_or("none"))?;
            Ok(Output::json(&json!({"MGC": m_g_c(&g, &c)?.group.torsion()})))
        }
        Command::H2bgc { common } => {
            let g = load_group(&common.group)?;
            let c = parse_class_set(&g, common.classes.as_deref().unwrap_or("none"))?;
            let h = h2_bgc(&g, &c)?;
            let h1 = schur_orbits_core::homology::h1_bgc(&g, &c)?;
            Ok(Output::json(&json!({
                "H2": h.m_part.h2.invariant_factors(),
                "MGC": h.m_part.group.torsion(),
                "N_rank": h.n_part.rank(),
                "N_basis": h.n_part.basis,
                "H1": {"torsion": h1.torsion(), "free_rank": h1.free_rank()},
                "pi1_order": schur_orbits_core::homology::pi1_bgc_order(&g, &c),
                "splitting": h.splitting,
            })))
        }
        Command::Sch { common, tuple } => {
            let g = load_group(&common.group)?;
            let t = load_tuple(&g, &tuple, None)?;
            if t.num_punctures() > 0 {
                return Err(CliError {
                    kind: "unsupported",
                    message: "absolute invariants are defined for closed tuples only; use diff for branched tuples".into(),
                    code: 1,
                });
            }
            let h2 = h2_group(&g)?;
            Ok(Output::json(&json!({
                "H2": h2.invariant_factors(),
                "class": sch_unbranched(&g, &h2, t.handles())?,
            })))
        }
        Command::Diff { common, tuple, other } => {
            let g = load_group(&common.group)?;
            let a: TupleJson = read_json(&tuple)?;
            let c = match &common.classes {
                Some(s) => parse_class_set(&g, s)?,
                None => {
                    let t = BranchedTuple::from_json(g.clone(), &a, None)?;
                    ClassSet::from_class_ids(t.branch_data().classes())
                }
            };
            let t = BranchedTuple::from_json(g.clone(), &a, Some(&c))?;
            let t2 = load_tuple(&g, &other, Some(&c))?;
            let mut ctx = SchurContext::new(g.clone(), c)?;
            ctx.catalog = catalog(&common);
            Ok(Output::json(&serde_json::to_value(ctx.schur_diff(&t, &t2)?).expect("serializable")))
        }
        Command::Dilate { common, tuple } => {
            let g = load_group(&common.group)?;
            let t = load_tuple(&g, &tuple, None)?;
            Ok(Output::json(&serde_json::to_value(dilate(&t).to_json()).expect("serializable")))
        }
        Command::Stabilize { common, tuple, handle, puncture, letter } => {
            let g = load_group(&common.group)?;
            let t = load_tuple(&g, &tuple, None)?;
            let out = match (handle, puncture) {
                (true, None) => handle_stabilize(&t),
                (false, Some(sel)) => {
                    let ids = select_classes(&g, &sel)?;
                    if ids.len() != 1 {
                        return Err(CliError::input(format!("selector {sel:?} matches {} classes", ids.len())));
                    }
                    let c = match &common.classes {
                        Some(s) => parse_class_set(&g, s)?,
                        None => {
                            let mut cl = t.branch_data().classes();
                            cl.push(ids[0]);
                            ClassSet::from_class_ids(cl)
                        }
                    };
                    puncture_stabilize(&t, ids[0], letter, &c)?
                }
                _ => return Err(CliError::input("give exactly one of --handle and --puncture")),
            };
            Ok(Output::json(&serde_json::to_value(out.to_json()).expect("serializable")))
        }
        Command::StableRange { common, branch, no_branching, track, start_genus, level_budget, max_rounds } => {
            let g = load_group(&common.group)?;
            let (c, v) = classes_and_branch(&g, &common, branch.as_deref(), no_branching)?;
            let opts = StableOptions {
                start_genus,
                level_budget,
                max_rounds,
                tracks: match track {
                    TrackArg::Auto => TrackSelection::Auto,
                    TrackArg::Main => TrackSelection::Main,
                    TrackArg::GenusZero => TrackSelection::GenusZero,
                },
                catalog: catalog(&common),
                cache: cache(&common),
            };
            let report = stable_orbits(&g, &c, &v, &opts)?;
            let code = match report.verdict {
                Verdict::CertifiedMatch | Verdict::EmpiricalMatch => 0,
                Verdict::Mismatch => 1,
                Verdict::Inconclusive => 2,
            };
            let body = match common.format {
                Format::Csv => report.grid_csv(),
                Format::Json => pretty(&serde_json::to_value(&report).expect("serializable")),
            };
            Ok(Output { body, code })
        }
        Command::TorsorCheck { common, level } => {
            let g = load_group(&common.group)?;
            let (c, v) = classes_and_branch(&g, &common, level.branch.as_deref(), level.no_branching)?;
            let opts = EnumOptions { surjective_only: true, budget: level.budget };
            let table = level_orbits(&g, &c, level.genus, &v, &catalog(&common), &opts, cache(&common).as_ref())?;
            let mut ctx = SchurContext::new(g.clone(), c)?;
            ctx.catalog = catalog(&common);
            let report = ctx.torsor_check(&table.reps(&g))?;
            let code = if report.passed { 0 } else { 2 };
            let mut body = serde_json::to_value(&report).expect("serializable");
            body["genus"] = json!(level.genus);
            body["branch"] = json!(v);
            body["move_set"] = json!(table.move_set);
            Ok(Output { body: pretty(&body), code })
        }
    }
}

fn common_of(cmd: &Command) -> &Common {
    match cmd {
        Command::GroupInfo { common }
        | Command::Enumerate { common, .. }
        | Command::Orbits { common, .. }
        | Command::H2 { common }
        | Command::Mgc { common }
        | Command::H2bgc { common }
        | Command::Sch { common, .. }
        | Command::Diff { common, .. }
        | Command::Dilate { common, .. }
        | Command::Stabilize { common, .. }
        | Command::StableRange { common, .. }
        | Command::TorsorCheck { common, .. } => common,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let common = common_of(&cli.command).clone();
    if common.format == Format::Csv && !matches!(cli.command, Command::StableRange { .. } | Command::Orbits { .. }) {
        let e = json!({"error": {"kind": "input", "message": "csv output is only available for orbit-count grids"}});
        print!("{}", pretty(&e));
        return ExitCode::from(1);
    }
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = common.threads {
        builder = builder.num_threads(n);
    }
    let pool = match builder.build() {
        Ok(p) => p,
        Err(e) => {
            print!("{}", pretty(&json!({"error": {"kind": "threads", "message": e.to_string()}})));
            return ExitCode::from(1);
        }
    };
    let result = pool.install(|| run(cli.command));
    match result {
        Ok(out) => {
            match &common.out {
                Some(path) => {
                    if let Err(e) = fs::write(path, &out.body) {
                        let msg = format!("{}: {e}", path.display());
                        print!("{}", pretty(&json!({"error": {"kind": "io", "message": msg}})));
                        return ExitCode::from(1);
                    }
                }
                None => print!("{}", out.body),
            }
            ExitCode::from(out.code)
        }
        Err(e) => {
            print!("{}", pretty(&json!({"error": {"kind": e.kind, "message": e.message}})));
            ExitCode::from(e.code)
        }
    }
}
