//! Command-line surface.
//!
//! Every command builds one structured document. `--json` prints it as
//! JSON; otherwise it is rendered as `key: value` lines, with matrices as
//! indented rows and lists of records as aligned tables.
//!
//! Exit status: 0 for a decisive answer, 2 when any answer is Unknown, 1 for
//! usage and validation errors.

use clap::{Args, Parser, Subcommand};
use num_bigint::BigInt;
use serde_json::{json, Map, Value};

use crate::catalog::{self, ManifoldModel};
use crate::degsets::{self, DegreeAnswer, DegreeOutcome};
use crate::intform::{isomorphic, IntersectionForm, IsoBasis, Isomorphism, Symmetry};
use crate::io::{self, MatrixDoc};
use crate::solver::{congruence_solve, SearchConfig, Verdict};
use crate::IntMatrix;

pub const EXIT_DECISIVE: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_UNKNOWN: i32 = 2;

#[derive(Parser, Debug)]
#[command(name = "degmap", version, about = "Degrees of maps between manifolds via integer form equations")]
struct Cli {
    #[command(flatten)]
    shared: Shared,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Shared {
    /// Print the structured document as JSON.
    #[arg(long, global = true)]
    json: bool,
    /// Max absolute entry of P in indefinite searches.
    #[arg(long, global = true)]
    radius: Option<u32>,
    /// Max backtracking nodes per search.
    #[arg(long, global = true)]
    budget: Option<u64>,
    /// Degree range K for degset and dominate.
    #[arg(long, global = true)]
    range: Option<u32>,
    /// Worker threads (results may differ from the single-worker witness).
    #[arg(long, global = true)]
    workers: Option<usize>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Invariants of a form.
    FormInfo {
        /// Form: @file or preset name.
        #[arg(long = "f")]
        f: String,
    },
    /// Isomorphism test for two forms.
    FormIso {
        #[arg(long = "f")]
        f: String,
        #[arg(long = "g")]
        g: String,
    },
    /// Solve Pᵀ·A·P = k·B.
    Solve {
        #[arg(long = "A")]
        a: String,
        #[arg(long = "B")]
        b: String,
        #[arg(long = "k", allow_negative_numbers = true)]
        k: BigInt,
    },
    /// Degree set D(M, L) on [-K, K].
    Degset {
        /// Manifold: @file or preset name.
        #[arg(long = "M")]
        m: String,
        #[arg(long = "L")]
        l: String,
    },
    /// Degree one map and complement form.
    Deg1 {
        #[arg(long = "M")]
        m: String,
        #[arg(long = "L")]
        l: String,
    },
    /// Self-map k·I of degree k².
    Selfmap {
        #[arg(long = "M")]
        m: String,
        #[arg(long = "k", allow_negative_numbers = true)]
        k: BigInt,
    },
    /// Catalog manifolds dominated by M.
    Dominate {
        #[arg(long = "M")]
        m: String,
        /// Comma-separated target names (default: the whole catalog).
        #[arg(long, value_delimiter = ',')]
        catalog: Option<Vec<String>>,
        /// Emit Graphviz DOT instead of a report.
        #[arg(long)]
        dot: bool,
    },
    /// List the preset manifolds.
    CatalogList,
}

/// Parses `argv` (program name first), runs the command and returns the exit
/// status with the text to print.
pub fn run<I, T>(argv: I) -> (i32, String)
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_ERROR } else { EXIT_DECISIVE };
            return (code, e.render().to_string());
        }
    };
    match execute(&cli) {
        Ok((code, doc)) => {
            let text = match (&doc, cli.shared.json) {
                (Output::Text(t), _) => t.clone(),
                (Output::Doc(v), true) => format!("{}\n", serde_json::to_string_pretty(v).expect("serializable")),
                (Output::Doc(v), false) => render_human(v),
            };
            (code, text)
        }
        Err(msg) => (EXIT_ERROR, format!("error: {msg}\n")),
    }
}

enum Output {
    Doc(Value),
    Text(String),
}

fn config(s: &Shared) -> Result<SearchConfig, String> {
    let mut cfg = SearchConfig::default();
    if let Some(r) = s.radius {
        cfg.radius = r;
    }
    if let Some(b) = s.budget {
        cfg.node_budget = b;
    }
    if let Some(w) = s.workers {
        cfg.workers = w;
    }
    cfg.validate().map_err(|e| e.to_string())?;
    Ok(cfg)
}

fn execute(cli: &Cli) -> Result<(i32, Output), String> {
    let cfg = config(&cli.shared)?;
    let err = |e: &dyn std::fmt::Display| e.to_string();
    match &cli.command {
        Command::FormInfo { f } => {
            let form = io::resolve_form(f).map_err(|e| err(&e))?;
            Ok((EXIT_DECISIVE, Output::Doc(form_info(&form))))
        }
        Command::FormIso { f, g } => {
            let f = io::resolve_form(f).map_err(|e| err(&e))?;
            let g = io::resolve_form(g).map_err(|e| err(&e))?;
            let iso = isomorphic(&f, &g, &cfg);
            let mut doc = Map::new();
            doc.insert("command".into(), json!("form-iso"));
            let code = match &iso {
                Isomorphism::Isomorphic { witness, basis } => {
                    doc.insert("verdict".into(), json!("Yes"));
                    let basis = match basis {
                        IsoBasis::Witness => "witness",
                        IsoBasis::Classification => "classification",
                    };
                    doc.insert("basis".into(), json!(basis));
                    doc.insert("witness".into(), witness.as_ref().map_or(Value::Null, matrix));
                    EXIT_DECISIVE
                }
                Isomorphism::NotIsomorphic(ob) => {
                    doc.insert("verdict".into(), json!("No"));
                    doc.insert("reason".into(), json!(format!("{ob:?}")));
                    EXIT_DECISIVE
                }
                Isomorphism::CapExceeded { rank } => {
                    doc.insert("verdict".into(), json!("Unknown"));
                    doc.insert("reason".into(), json!(format!("definite rank {rank} above cap {}", cfg.definite_cap)));
                    EXIT_UNKNOWN
                }
            };
            Ok((code, Output::Doc(Value::Object(doc))))
        }
        Command::Solve { a, b, k } => {
            let a = io::resolve_form(a).map_err(|e| err(&e))?;
            let b = io::resolve_form(b).map_err(|e| err(&e))?;
            let v = congruence_solve(&a, &b, k, &cfg).map_err(|e| err(&e))?;
            let mut doc = Map::new();
            doc.insert("command".into(), json!("solve"));
            doc.insert("k".into(), int(k));
            verdict_fields(&v, &mut doc);
            let code = if v.is_unknown() { EXIT_UNKNOWN } else { EXIT_DECISIVE };
            Ok((code, Output::Doc(Value::Object(doc))))
        }
        Command::Degset { m, l } => {
            let m = io::resolve_manifold(m).map_err(|e| err(&e))?;
            let l = io::resolve_manifold(l).map_err(|e| err(&e))?;
            let range = cli.shared.range.unwrap_or(4);
            let r = degsets::degree_set(&m, &l, range, &cfg).map_err(|e| err(&e))?;
            let regime = degsets::regime(&m, &l);
            let list = |v: Vec<BigInt>| Value::Array(v.iter().map(int).collect());
            let doc = json!({
                "command": "degset",
                "source": r.source,
                "target": r.target,
                "range": r.range,
                "regime": regime.label(),
                "always_contains_zero": r.always_contains_zero(),
                "yes": list(r.yes()),
                "no": list(r.no()),
                "unknown": list(r.unknown()),
                "necessary": list(r.necessary()),
                "entries": r.entries.iter().map(degree_row).collect::<Vec<_>>(),
            });
            let code = if r.unknown().is_empty() { EXIT_DECISIVE } else { EXIT_UNKNOWN };
            Ok((code, Output::Doc(doc)))
        }
        Command::Deg1 { m, l } => {
            let m = io::resolve_manifold(m).map_err(|e| err(&e))?;
            let l = io::resolve_manifold(l).map_err(|e| err(&e))?;
            let rep = degsets::degree_one_summand(&m, &l, &cfg).map_err(|e| err(&e))?;
            let mut doc = Map::new();
            doc.insert("command".into(), json!("deg1"));
            doc.insert("source".into(), json!(m.name()));
            doc.insert("target".into(), json!(l.name()));
            doc.insert("regime".into(), json!(rep.answer.regime.label()));
            answer_fields(&rep.answer, &mut doc);
            if let Some(c) = &rep.complement {
                doc.insert("complement".into(), matrix(c.form.matrix()));
                if let Ok(sig) = c.form.signature() {
                    doc.insert("complement_signature".into(), json!(sig.to_string()));
                    doc.insert("complement_parity".into(), json!(c.form.parity().to_string()));
                }
            }
            let code = if rep.answer.is_unknown() { EXIT_UNKNOWN } else { EXIT_DECISIVE };
            Ok((code, Output::Doc(Value::Object(doc))))
        }
        Command::Selfmap { m, k } => {
            let m = io::resolve_manifold(m).map_err(|e| err(&e))?;
            let r = degsets::selfmap_square(&m, k).map_err(|e| err(&e))?;
            let doc = json!({
                "command": "selfmap",
                "manifold": m.name(),
                "k": int(&r.k),
                "degree": int(&r.degree),
                "condition_holds": r.condition.holds(),
                "failing": r.condition.failing,
                "witness": matrix(&r.witness),
            });
            Ok((EXIT_DECISIVE, Output::Doc(doc)))
        }
        Command::Dominate { m, catalog: names, dot } => {
            let m = io::resolve_manifold(m).map_err(|e| err(&e))?;
            let pool: Vec<ManifoldModel> = match names {
                Some(ns) => ns.iter().map(|n| io::resolve_manifold(n)).collect::<Result<_, _>>().map_err(|e| err(&e))?,
                None => catalog::catalog(),
            };
            let range = cli.shared.range.unwrap_or(3);
            let found = degsets::dominated_candidates(&m, &pool, range, &cfg).map_err(|e| err(&e))?;
            if *dot {
                return Ok((EXIT_DECISIVE, Output::Text(degsets::dominance_dot(m.name(), &found))));
            }
            let rows: Vec<Value> = found
                .iter()
                .map(|d| {
                    json!({
                        "target": d.target,
                        "degree": int(&d.degree),
                        "sufficient": d.sufficient,
                        "witness": matrix(&d.witness),
                    })
                })
                .collect();
            let doc = json!({ "command": "dominate", "source": m.name(), "range": range, "candidates": rows });
            Ok((EXIT_DECISIVE, Output::Doc(doc)))
        }
        Command::CatalogList => {
            let rows: Vec<Value> = catalog::catalog()
                .iter()
                .map(|m| {
                    let f = m.form();
                    json!({
                        "name": m.name(),
                        "n": m.n(),
                        "rank": f.rank(),
                        "signature": f.signature().map(|s| s.to_string()).unwrap_or_default(),
                        "parity": f.parity().to_string(),
                        "simply_connected": m.simply_connected(),
                    })
                })
                .collect();
            Ok((EXIT_DECISIVE, Output::Doc(json!({ "command": "catalog-list", "manifolds": rows }))))
        }
    }
}

fn int(v: &BigInt) -> Value {
    serde_json::to_value(io::big::to_repr(v)).expect("serializable")
}

fn matrix(m: &IntMatrix) -> Value {
    serde_json::to_value(MatrixDoc::from_matrix(m, None)).expect("serializable")
}

fn form_info(form: &IntersectionForm) -> Value {
    let mut doc = Map::new();
    doc.insert("command".into(), json!("form-info"));
    doc.insert("matrix".into(), matrix(form.matrix()));
    doc.insert("symmetry".into(), json!(form.symmetry().to_string()));
    doc.insert("rank".into(), json!(form.rank()));
    doc.insert("det".into(), int(form.det()));
    if form.symmetry() == Symmetry::Symmetric {
        doc.insert("signature".into(), json!(form.signature().expect("symmetric").to_string()));
        doc.insert("parity".into(), json!(form.parity().to_string()));
        doc.insert("definite".into(), json!(form.is_definite()));
    }
    Value::Object(doc)
}

fn verdict_fields(v: &Verdict, doc: &mut Map<String, Value>) {
    doc.insert("verdict".into(), json!(v.kind()));
    match v {
        Verdict::Yes(w) => {
            doc.insert("parallel".into(), json!(w.from_parallel_search()));
            doc.insert("witness".into(), matrix(w.matrix()));
        }
        Verdict::No(r) => {
            doc.insert("reason".into(), json!(r.to_string()));
        }
        Verdict::Unknown(u) => {
            doc.insert("radius".into(), json!(u.radius));
            doc.insert("budget_exhausted".into(), json!(u.budget_exhausted));
            doc.insert("definite_cap_exceeded".into(), json!(u.definite_cap_exceeded));
        }
    }
}

fn answer_fields(a: &DegreeAnswer, doc: &mut Map<String, Value>) {
    doc.insert("verdict".into(), json!(a.kind()));
    match &a.outcome {
        DegreeOutcome::Yes(w) | DegreeOutcome::NecessaryConditionsPass(w) => {
            doc.insert("parallel".into(), json!(w.from_parallel_search()));
            doc.insert("witness".into(), matrix(w.matrix()));
        }
        DegreeOutcome::No(r) => {
            doc.insert("reason".into(), json!(r.to_string()));
        }
        DegreeOutcome::Unknown(u) => {
            doc.insert("radius".into(), json!(u.radius));
            doc.insert("budget_exhausted".into(), json!(u.budget_exhausted));
        }
    }
}

fn degree_row(a: &DegreeAnswer) -> Value {
    let detail = match &a.outcome {
        DegreeOutcome::Yes(w) | DegreeOutcome::NecessaryConditionsPass(w) => format!("{:?}", w.matrix()),
        DegreeOutcome::No(r) => r.to_string(),
        DegreeOutcome::Unknown(u) if u.budget_exhausted => "budget exhausted".to_string(),
        DegreeOutcome::Unknown(u) => format!("radius {} exhausted", u.radius),
    };
    json!({ "k": int(&a.k), "verdict": a.kind(), "detail": detail })
}

fn is_matrix(v: &Value) -> Option<(usize, usize, &Vec<Value>)> {
    let o = v.as_object()?;
    let rows = o.get("rows")?.as_u64()? as usize;
    let cols = o.get("cols")?.as_u64()? as usize;
    let entries = o.get("entries")?.as_array()?;
    Some((rows, cols, entries))
}

fn scalar(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Null => "none".into(),
        Value::Array(items) => items.iter().map(scalar).collect::<Vec<_>>().join(" "),
        _ => {
            if let Some((r, c, e)) = is_matrix(v) {
                let rows: Vec<String> =
                    (0..r).map(|i| e[i * c..(i + 1) * c].iter().map(scalar).collect::<Vec<_>>().join(" ")).collect();
                format!("[{}]", rows.join("; "))
            } else {
                v.to_string()
            }
        }
    }
}

/// Human rendering of a structured document, field by field.
pub fn render_human(doc: &Value) -> String {
    let mut out = String::new();
    let Some(obj) = doc.as_object() else {
        return format!("{}\n", scalar(doc));
    };
    for (key, v) in obj {
        if let Some((r, c, e)) = is_matrix(v) {
            out.push_str(&format!("{key}: {r}x{c}\n"));
            for i in 0..r {
                let row: Vec<String> = e[i * c..(i + 1) * c].iter().map(scalar).collect();
                out.push_str(&format!("  {}\n", row.join(" ")));
            }
        } else if let Some(items) = v.as_array().filter(|a| a.first().is_some_and(Value::is_object)) {
            out.push_str(&format!("{key}:\n"));
            out.push_str(&table(items));
        } else if let Value::Array(items) = v {
            out.push_str(&format!("{key}: [{}]\n", items.iter().map(scalar).collect::<Vec<_>>().join(", ")));
        } else {
            out.push_str(&format!("{key}: {}\n", scalar(v)));
        }
    }
    out
}

fn table(rows: &[Value]) -> String {
    let header: Vec<String> = rows[0].as_object().expect("record").keys().cloned().collect();
    let cells: Vec<Vec<String>> = rows
        .iter()
        .map(|r| header.iter().map(|h| r.get(h).map(scalar).unwrap_or_default()).collect())
        .collect();
    let widths: Vec<usize> = (0..header.len())
        .map(|i| cells.iter().map(|r| r[i].chars().count()).chain([header[i].len()]).max().unwrap_or(0))
        .collect();
    let line = |vals: &[String]| {
        let padded: Vec<String> = vals.iter().zip(&widths).map(|(v, w)| format!("{v:<w$}")).collect();
        format!("  {}\n", padded.join("  ").trim_end())
    };
    let mut s = line(&header);
    for r in &cells {
        s.push_str(&line(r));
    }
    s
}
