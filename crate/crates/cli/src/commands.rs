use std::collections::BTreeMap;
use std::fmt::Display;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use dessins::belyi::{verify, MapFile, APPROXIMATE_TOL, DEFAULT_TOL};
use dessins::catalog::{catalog, MatchTier, Recognizer, Row, SPECTRUM_TOL};
use dessins::enumerate::{enumerate, published_count, EnumerationTask, DEFAULT_MAX_INDEX};
use dessins::geometry::{induce, InducedGeometry};
use dessins::pauli::{chsh_check, count_squares, magic_check, LabeledGeometry};
use dessins::{Dessin, Mode};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::cli::{BelyiCommand, CatalogArgs, Command, EnumerateArgs, GeometryArgs, PauliCommand, SearchArgs};
use crate::expect;

/// Usage and input errors; exit code 2.
#[derive(Debug)]
pub struct CliError(pub String);

impl<E: Display> From<E> for CliError {
    fn from(e: E) -> Self {
        CliError(e.to_string())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Success,
    /// Exit code 1.
    VerificationFailed,
}

impl Status {
    fn from_pass(ok: bool) -> Self {
        if ok {
            Status::Success
        } else {
            Status::VerificationFailed
        }
    }
}

/// Where relative paths are resolved.
#[derive(Clone, Debug, Default)]
pub struct Ctx {
    pub base: Option<PathBuf>,
}

impl Ctx {
    fn resolve(&self, p: &Path) -> PathBuf {
        match &self.base {
            Some(b) if p.is_relative() => b.join(p),
            _ => p.to_path_buf(),
        }
    }

    fn read(&self, p: &Path) -> Result<String, CliError> {
        let path = self.resolve(p);
        fs::read_to_string(&path).map_err(|e| CliError(format!("cannot read {}: {e}", path.display())))
    }

    fn dessin(&self, p: &Path) -> Result<Dessin, CliError> {
        Dessin::parse_file(&self.read(p)?).map_err(|e| CliError(format!("{}: {e}", p.display())))
    }
}

/// One JSON line with a `schema` key added.
fn emit(out: &mut dyn Write, schema: &str, value: impl Serialize) -> Result<(), CliError> {
    let mut v = serde_json::to_value(value)?;
    if let Value::Object(m) = &mut v {
        m.insert("schema".into(), Value::String(schema.into()));
    }
    writeln!(out, "{v}")?;
    Ok(())
}

fn in_pool<T: Send>(workers: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T, CliError> {
    match workers {
        None => Ok(f()),
        Some(w) => Ok(rayon::ThreadPoolBuilder::new().num_threads(w).build()?.install(f)),
    }
}

fn bound(flag: Option<usize>) -> Result<usize, CliError> {
    if let Some(b) = flag {
        return Ok(b);
    }
    match std::env::var("DESSIN_MAX_INDEX") {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| CliError(format!("DESSIN_MAX_INDEX={v:?} is not a non-negative integer"))),
        Err(_) => Ok(DEFAULT_MAX_INDEX),
    }
}

pub fn run(command: Command, ctx: &Ctx, out: &mut dyn Write) -> Result<Status, CliError> {
    match command {
        Command::Enumerate(a) => run_enumerate(a, ctx, out),
        Command::Analyze { file } => {
            let d = ctx.dessin(&file)?;
            let mut v = serde_json::to_value(d.report())?;
            v["automorphisms"] = json!(d.automorphism_count());
            emit(out, "dessin/1", v)?;
            Ok(Status::Success)
        }
        Command::Geometry(a) => run_geometry(a, ctx, out),
        Command::Recognize { file } => run_recognize(&ctx.dessin(&file)?, out),
        Command::Catalog(a) if a.references => run_references(a.json, out),
        Command::Catalog(a) => run_catalog(a, out),
        Command::Search(a) => run_search(a, out),
        Command::Belyi(BelyiCommand::Verify { map, passport, tol }) => {
            let mf = MapFile::parse(&ctx.read(&map)?).map_err(|e| CliError(format!("{}: {e}", map.display())))?;
            let passport = passport
                .or(mf.passport.clone())
                .ok_or_else(|| CliError(format!("{}: no passport; add a passport = line or pass --passport", map.display())))?;
            let tol = tol.unwrap_or(if mf.map.is_approximate() { APPROXIMATE_TOL } else { DEFAULT_TOL });
            let r = verify(&mf.map, &passport, tol)?;
            let mut v = serde_json::to_value(&r)?;
            v["name"] = json!(mf.name);
            emit(out, "belyi/1", v)?;
            Ok(Status::from_pass(r.passed()))
        }
        Command::Pauli(p) => run_pauli(p, ctx, out),
        Command::Expect { file } => expect::run_file(&ctx.resolve(&file), out),
    }
}

fn run_enumerate(a: EnumerateArgs, _ctx: &Ctx, out: &mut dyn Write) -> Result<Status, CliError> {
    let mut task = EnumerationTask::new(a.index, a.mode).with_max_index(bound(a.max_index)?);
    let filtered = a.passport.is_some() || a.group_order.is_some();
    if let Some(p) = a.passport {
        task = task.with_passport(p);
    }
    if let Some(k) = a.group_order {
        task = task.with_group_order(k);
    }
    if !filtered && published_count(a.mode, a.index).is_none() {
        eprintln!("note: no published count for index {} in {} mode; output is computed only", a.index, a.mode);
    }
    let format = a.emit[0].as_str();
    match (format, a.emit.get(1)) {
        ("count", None) => {
            let n = in_pool(a.workers, || dessins::enumerate::count(&task))??;
            writeln!(out, "{n}")?;
        }
        ("jsonl", None) => {
            for d in in_pool(a.workers, || enumerate(&task))?? {
                emit(out, "dessin/1", d.report())?;
            }
        }
        ("files", Some(dir)) => {
            let classes = in_pool(a.workers, || enumerate(&task))??;
            let dir = PathBuf::from(dir);
            fs::create_dir_all(&dir).map_err(|e| CliError(format!("cannot create {}: {e}", dir.display())))?;
            for (k, d) in classes.iter().enumerate() {
                let path = dir.join(format!("{}-{:02}-{:06}.dessin", a.mode, a.index, k + 1));
                fs::write(&path, d.to_file_string()).map_err(|e| CliError(format!("cannot write {}: {e}", path.display())))?;
            }
            emit(out, "enumerate-files/1", json!({"dir": dir.display().to_string(), "written": classes.len()}))?;
        }
        ("files", None) => return Err(CliError("--emit files needs a directory".into())),
        _ => return Err(CliError(format!("unknown --emit {:?} (expected jsonl, count or files DIR)", a.emit.join(" ")))),
    }
    Ok(Status::Success)
}

#[derive(Serialize)]
struct GeometryReport<'a> {
    class: usize,
    class_fingerprint: String,
    stabilizer_order: &'a str,
    #[serde(rename = "V")]
    v: usize,
    #[serde(rename = "E")]
    e: usize,
    #[serde(rename = "T_plain")]
    t_plain: u64,
    #[serde(rename = "T_line")]
    t_line: u64,
    #[serde(rename = "S_chordless")]
    s_chordless: u64,
    #[serde(rename = "S_line")]
    s_line: u64,
    connected: bool,
    spanning: bool,
    spectrum: Option<String>,
    /// 1-based labels.
    lines: Vec<Vec<usize>>,
    recognized_as: Option<&'static str>,
    match_tier: Option<MatchTier>,
    discrepancy: Option<String>,
}

fn geometry_report<'a>(k: usize, ig: &'a InducedGeometry, rec: &Recognizer) -> GeometryReport<'a> {
    let g = &ig.geometry;
    let inv = g.invariants();
    let spectrum = g.spectrum().ok();
    let best = rec.recognize(g, &inv, spectrum.as_ref()).into_iter().next();
    GeometryReport {
        class: k + 1,
        class_fingerprint: ig.class.fingerprint.to_string(),
        stabilizer_order: &ig.class.fingerprint.order,
        v: inv.v,
        e: inv.e,
        t_plain: inv.t_plain,
        t_line: inv.t_line,
        s_chordless: inv.s_chordless,
        s_line: inv.s_line,
        connected: inv.connected,
        spanning: inv.spanning,
        spectrum: spectrum.map(|s| s.notation()),
        lines: g.lines().iter().map(|l| l.iter().map(|p| p + 1).collect()).collect(),
        recognized_as: best.as_ref().map(|m| m.name),
        match_tier: best.as_ref().map(|m| m.tier),
        discrepancy: best.and_then(|m| m.discrepancy),
    }
}

fn run_geometry(a: GeometryArgs, ctx: &Ctx, out: &mut dyn Write) -> Result<Status, CliError> {
    let d = ctx.dessin(&a.file)?;
    let classes = induce(&d)?;
    let rec = Recognizer::for_points(d.n());
    if let Some(dir) = &a.dot {
        let dir = ctx.resolve(dir);
        fs::create_dir_all(&dir).map_err(|e| CliError(format!("cannot create {}: {e}", dir.display())))?;
        for (k, ig) in classes.iter().enumerate() {
            let name = format!("class{}", k + 1);
            fs::write(dir.join(format!("{name}.dot")), ig.geometry.to_dot(&name))?;
        }
    }
    if !a.json {
        writeln!(out, "class  stabilizer             V    E  T_plain  T_line  S_chordless  lines  recognized")?;
    }
    for (k, ig) in classes.iter().enumerate() {
        let r = geometry_report(k, ig, &rec);
        if a.json {
            emit(out, "geometry/1", &r)?;
        } else {
            let tier = r.match_tier.map(|t| format!(" ({})", serde_json::to_value(t).unwrap().as_str().unwrap_or_default()));
            writeln!(
                out,
                "{:>5}  {:<20} {:>3} {:>4} {:>8} {:>7} {:>12} {:>6}  {}{}",
                r.class,
                r.class_fingerprint,
                r.v,
                r.e,
                r.t_plain,
                r.t_line,
                r.s_chordless,
                r.lines.len(),
                r.recognized_as.unwrap_or("-"),
                tier.unwrap_or_default()
            )?;
        }
    }
    Ok(Status::Success)
}

fn run_recognize(d: &Dessin, out: &mut dyn Write) -> Result<Status, CliError> {
    let rec = Recognizer::for_points(d.n());
    for (k, ig) in induce(d)?.iter().enumerate() {
        let inv = ig.geometry.invariants();
        let matches = rec.recognize(&ig.geometry, &inv, None);
        emit(
            out,
            "recognize/1",
            json!({
                "class": k + 1,
                "class_fingerprint": ig.class.fingerprint.to_string(),
                "computed": inv.row(),
                "matches": matches,
            }),
        )?;
    }
    Ok(Status::Success)
}

#[derive(Default)]
struct Tally {
    dessins: usize,
    row_classes: usize,
    isomorphic_classes: usize,
    example: Option<(usize, String, String)>,
}

#[derive(Serialize)]
struct CatalogRow<'a> {
    name: &'a str,
    table: u8,
    index: usize,
    tabulated: Row,
    /// Dessins with at least one class matching the row or the reference graph.
    dessins: usize,
    row_classes: usize,
    isomorphic_classes: usize,
    status: &'static str,
    example: Option<Value>,
}

fn run_catalog(a: CatalogArgs, out: &mut dyn Write) -> Result<Status, CliError> {
    let top = a.max_index.expect("clap requires --max-index here");
    let limit = bound(None)?;
    if top > limit {
        return Err(CliError(format!(
            "index {top} exceeds the resource bound {limit} (raise it with DESSIN_MAX_INDEX)"
        )));
    }
    let rec = Recognizer::new();
    let names: Vec<&'static str> = rec.entries().map(|e| e.name).collect();
    let mut tally: BTreeMap<usize, Tally> = BTreeMap::new();
    for n in 1..=top {
        let task = EnumerationTask::new(n, a.mode).with_max_index(limit);
        // per dessin: (entry position, row match, isomorphic) for each class
        let hits: Vec<(Dessin, Vec<(usize, bool, bool)>)> = in_pool(a.workers, || -> Result<_, CliError> {
            let classes = enumerate(&task)?;
            classes
                .into_par_iter()
                .map(|d| {
                    let mut found = Vec::new();
                    for ig in induce(&d)? {
                        let inv = ig.geometry.invariants();
                        for m in rec.recognize(&ig.geometry, &inv, None) {
                            let pos = names.iter().position(|&x| x == m.name).expect("entry from this catalog");
                            found.push((pos, m.row_matches, m.isomorphic));
                        }
                    }
                    Ok((d, found))
                })
                .collect()
        })??;
        for (d, found) in hits {
            let mut seen = Vec::new();
            for (pos, row, iso) in found {
                let t = tally.entry(pos).or_default();
                t.row_classes += row as usize;
                t.isomorphic_classes += iso as usize;
                if !seen.contains(&pos) {
                    seen.push(pos);
                    t.dessins += 1;
                    t.example.get_or_insert_with(|| (d.n(), d.alpha().to_string(), d.beta().to_string()));
                }
            }
        }
    }
    if !a.json {
        writeln!(
            out,
            "index  geometry                             V    E    T    S  dessins  row-classes  isomorphic  status           example"
        )?;
    }
    for (pos, e) in rec.entries().enumerate().filter(|(_, e)| e.index <= top) {
        let t = tally.remove(&pos).unwrap_or_default();
        let status = match (t.row_classes, t.isomorphic_classes) {
            (0, 0) => "not found",
            (0, _) => "isomorphic only",
            _ => "reproduced",
        };
        let row = CatalogRow {
            name: e.name,
            table: e.table,
            index: e.index,
            tabulated: e.row,
            dessins: t.dessins,
            row_classes: t.row_classes,
            isomorphic_classes: t.isomorphic_classes,
            status,
            example: t.example.as_ref().map(|(n, al, be)| json!({"n": n, "alpha": al, "beta": be})),
        };
        if a.json {
            emit(out, "catalog/1", &row)?;
        } else {
            let (v, ed, tr, sq) = e.row;
            let example = t.example.map(|(_, al, be)| format!("<{al}, {be}>")).unwrap_or_default();
            writeln!(
                out,
                "{:>5}  {:<33} {:>3} {:>4} {:>4} {:>4} {:>8} {:>12} {:>11}  {:<15}  {}",
                e.index, e.name, v, ed, tr, sq, t.dessins, t.row_classes, t.isomorphic_classes, status, example
            )?;
        }
    }
    Ok(Status::Success)
}

fn run_references(as_json: bool, out: &mut dyn Write) -> Result<Status, CliError> {
    let mut all_ok = true;
    for e in catalog() {
        let reference = e.reference_geometry();
        let computed = reference.as_ref().map(|g| g.invariants().row());
        let spectrum = match (&reference, &e.spectrum) {
            (Some(g), Some(_)) => Some(g.spectrum()?),
            _ => None,
        };
        let spectrum_matches = e
            .spectrum
            .as_ref()
            .and_then(|want| spectrum.as_ref().map(|s| s.matches(want, SPECTRUM_TOL)));
        let row_matches = computed.map(|c| c == e.row);
        // known discrepancies are expected to differ; anything else is a failure
        if e.known_discrepancy.is_none() && (row_matches == Some(false) || spectrum_matches == Some(false)) {
            all_ok = false;
        }
        if as_json {
            emit(
                out,
                "catalog-reference/1",
                json!({
                    "name": e.name,
                    "table": e.table,
                    "index": e.index,
                    "tabulated": e.row,
                    "computed": computed,
                    "row_matches": row_matches,
                    "tabulated_spectrum": e.spectrum,
                    "spectrum": spectrum.as_ref().map(|s| s.notation()),
                    "spectrum_matches": spectrum_matches,
                    "known_discrepancy": e.known_discrepancy,
                }),
            )?;
        } else {
            let mark = |b: Option<bool>| match b {
                Some(true) => "yes",
                Some(false) => "NO",
                None => "-",
            };
            writeln!(
                out,
                "{:<33} tabulated {:?}  computed {}  row {}  spectrum {}{}",
                e.name,
                e.row,
                computed.map(|c| format!("{c:?}")).unwrap_or_else(|| "-".into()),
                mark(row_matches),
                mark(spectrum_matches),
                e.known_discrepancy.map(|d| format!("  [{d}]")).unwrap_or_default()
            )?;
        }
    }
    Ok(Status::from_pass(all_ok))
}

fn run_search(a: SearchArgs, out: &mut dyn Write) -> Result<Status, CliError> {
    let mode = a.mode.unwrap_or_else(|| match a.passport.as_ref().and_then(|p| p.0[1].as_ref()) {
        Some(b) if b.lengths().iter().any(|&l| l > 2) => Mode::Hypermap,
        _ => Mode::Preclean,
    });
    let mut limit = bound(a.max_index)?;
    // a fixed α cycle type confines the work to one partition
    if a.passport.as_ref().is_some_and(|p| p.0[0].is_some()) {
        limit = limit.max(a.index);
    }
    let mut task = EnumerationTask::new(a.index, mode).with_max_index(limit);
    if let Some(p) = a.passport {
        task = task.with_passport(p);
    }
    if let Some(k) = a.group_order {
        task = task.with_group_order(k);
    }
    task.filters.signature = a.signature;
    let hits = in_pool(a.workers, || enumerate(&task))??;
    if hits.is_empty() {
        eprintln!("note: no class of index {} in {mode} mode matches", a.index);
    }
    let rec = Recognizer::for_points(a.index);
    for d in &hits {
        let mut v = serde_json::to_value(d.report())?;
        if a.induce {
            let geoms: Vec<Value> = induce(d)?
                .iter()
                .enumerate()
                .map(|(k, ig)| {
                    let r = geometry_report(k, ig, &rec);
                    json!({
                        "class_fingerprint": r.class_fingerprint,
                        "row": [r.v, r.e, r.t_line, r.s_chordless],
                        "lines": r.lines.len(),
                        "recognized_as": r.recognized_as,
                        "match_tier": r.match_tier,
                    })
                })
                .collect();
            v["geometries"] = Value::Array(geoms);
        }
        emit(out, "dessin/1", v)?;
    }
    Ok(Status::Success)
}

fn run_pauli(p: PauliCommand, ctx: &Ctx, out: &mut dyn Write) -> Result<Status, CliError> {
    match p {
        PauliCommand::Chsh { operators } => {
            let quad: [_; 4] = operators.try_into().map_err(|_| CliError("chsh needs four operators".into()))?;
            let r = chsh_check(&quad)?;
            let listed: Vec<f64> = r
                .eigenvalues
                .iter()
                .rev()
                .flat_map(|&(v, m)| std::iter::repeat(v).take(m))
                .collect();
            let mut v = serde_json::to_value(&r)?;
            v["c_squared_eigenvalues"] = json!(listed);
            emit(out, "pauli-chsh/1", v)?;
            Ok(Status::from_pass(r.violations.is_empty()))
        }
        PauliCommand::Magic { file } => {
            let (lg, lines) = LabeledGeometry::parse(&ctx.read(&file)?).map_err(|e| CliError(format!("{}: {e}", file.display())))?;
            let bad: Vec<[String; 2]> = lg
                .violations()
                .into_iter()
                .map(|(u, v)| [lg.operators[u].to_string(), lg.operators[v].to_string()])
                .collect();
            let verdict = magic_check(&lines)?;
            let ok = bad.is_empty() && verdict.contextual;
            emit(
                out,
                "pauli-magic/1",
                json!({
                    "points": lg.operators.iter().map(|o| o.to_string()).collect::<Vec<_>>(),
                    "row": lg.geometry.invariants().row(),
                    "anticommuting_collinear_pairs": bad,
                    "verdict": verdict,
                }),
            )?;
            Ok(Status::from_pass(ok))
        }
        PauliCommand::CountSquares { qubits } => {
            let n = count_squares(qubits)?;
            emit(out, "pauli-squares/1", json!({"qubits": qubits, "squares": n}))?;
            Ok(Status::Success)
        }
    }
}
