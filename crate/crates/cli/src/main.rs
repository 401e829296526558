//! `pfb`: exact billiards on prefractal tables from the command line.
//!
//! Emits exact-rational JSON and deterministic SVG; all numeric inputs are
//! parsed as exact rationals.  Exit codes: 0 success, 2 usage error,
//! 3 geometric error (corner hit / singular orbit / bad geometry),
//! 4 bounce or depth budget exhausted.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use num_rational::BigRational;
use num_traits::Zero;

use prefractal_billiards::billiard::{
    run_orbit, CornerPolicy, InitialCondition, Orbit, OrbitStatus,
};
use prefractal_billiards::carpet::{segment_avoids_peripherals, slope_sets, SegmentQuery};
use prefractal_billiards::compat::{
    build_sequence, detect_constancy, ks_nontrivial_path, t_nontrivial_path, CompatSequence,
    Constancy,
};
use prefractal_billiards::geom::{Point2, Vec2};
use prefractal_billiards::json;
use prefractal_billiards::qsqrt3::QSqrt3;
use prefractal_billiards::scalar::{parse_rational, Scalar};
use prefractal_billiards::svg;
use prefractal_billiards::tables::{build_carpet, build_koch_snowflake, build_t_fractal, Table};
use prefractal_billiards::unfold::unfold_orbit;

#[derive(Parser)]
#[command(name = "pfb", about = "exact billiards on prefractal tables", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a prefractal table and emit it as JSON and/or SVG.
    Table {
        /// Family: koch | t | carpet
        family: String,
        /// Level for koch/t; "<a> <n>" for carpet
        params: Vec<u32>,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Run one billiard orbit from a basepoint on the bottom side.
    Orbit {
        /// Family: koch | t | carpet | square
        family: String,
        /// Level for koch/t, none for square; "<a> <n>" for carpet
        params: Vec<u32>,
        /// Basepoint abscissa on the base, an exact rational like 7/12
        #[arg(long)]
        x0: String,
        /// Direction: pi/6 | pi/4 | pi/3 | pi/2 | 3pi/4 | slope=p/q
        #[arg(long)]
        dir: String,
        #[arg(long, default_value_t = 4096)]
        budget: usize,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Build the sequence of compatible orbits across levels.
    Compat {
        /// Family: koch | t | carpet
        family: String,
        /// Carpet parameter a (odd), carpet only
        #[arg(long)]
        a: Option<u32>,
        #[arg(long)]
        x0: String,
        #[arg(long)]
        dir: String,
        /// Finest level to compute
        #[arg(long)]
        depth: u32,
        #[arg(long, default_value_t = 0)]
        start_level: u32,
        #[arg(long, default_value_t = 16384)]
        budget: usize,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Twin nontrivial paths from a seed (koch or t family).
    Path {
        /// Family: koch | t
        family: String,
        #[arg(long)]
        x0: String,
        #[arg(long)]
        dir: String,
        #[arg(long, default_value_t = 6)]
        depth: u32,
        #[arg(long, default_value_t = 32768)]
        budget: usize,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Slope sets A_a and B_a of the carpet S_a.
    Slopes {
        a: u32,
        /// Also classify this slope's maximal segment from (1/2, 0)
        #[arg(long)]
        check: Option<String>,
        #[arg(long, default_value_t = 4)]
        depth: u32,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Unfold a periodic orbit into a straight chain of table copies.
    Unfold {
        /// Family: koch | t | carpet | square
        family: String,
        params: Vec<u32>,
        #[arg(long)]
        x0: String,
        #[arg(long)]
        dir: String,
        #[arg(long, default_value_t = 4096)]
        budget: usize,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Regenerate the golden fixture files.
    SeedFixtures {
        /// Directory for the fixtures (defaults to ./fixtures under the
        /// output directory)
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct OutputArgs {
    /// Write JSON here (or to a default name in the output directory)
    #[arg(long, value_name = "PATH", num_args = 0..=1, default_missing_value = "")]
    json: Option<String>,
    /// Write SVG here (or to a default name in the output directory)
    #[arg(long, value_name = "PATH", num_args = 0..=1, default_missing_value = "")]
    svg: Option<String>,
}

/// Output directory: the only environment knob.
fn out_dir() -> PathBuf {
    std::env::var_os("PFB_OUT_DIR")
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from("."))
}

fn resolve(arg: &Option<String>, default_name: &str) -> Option<PathBuf> {
    match arg {
        None => None,
        Some(s) if s.is_empty() => Some(out_dir().join(default_name)),
        Some(s) => Some(PathBuf::from(s)),
    }
}

#[derive(Debug)]
enum CmdError {
    Usage(String),
    Geometry(String),
    Budget(String),
    Io(std::io::Error),
}

impl From<std::io::Error> for CmdError {
    fn from(e: std::io::Error) -> Self {
        CmdError::Io(e)
    }
}

type CmdResult = Result<(), CmdError>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Table {
            family,
            params,
            out,
        } => cmd_table(&family, &params, &out),
        Command::Orbit {
            family,
            params,
            x0,
            dir,
            budget,
            out,
        } => cmd_orbit(&family, &params, &x0, &dir, budget, &out),
        Command::Compat {
            family,
            a,
            x0,
            dir,
            depth,
            start_level,
            budget,
            out,
        } => cmd_compat(&family, a, &x0, &dir, depth, start_level, budget, &out),
        Command::Path {
            family,
            x0,
            dir,
            depth,
            budget,
            out,
        } => cmd_path(&family, &x0, &dir, depth, budget, &out),
        Command::Slopes {
            a,
            check,
            depth,
            out,
        } => cmd_slopes(a, check.as_deref(), depth, &out),
        Command::Unfold {
            family,
            params,
            x0,
            dir,
            budget,
            out,
        } => cmd_unfold(&family, &params, &x0, &dir, budget, &out),
        Command::SeedFixtures { out } => cmd_seed_fixtures(out),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(CmdError::Usage(msg)) => {
            eprintln!("usage error: {msg}");
            ExitCode::from(2)
        }
        Err(CmdError::Geometry(msg)) => {
            eprintln!("geometric error: {msg}");
            ExitCode::from(3)
        }
        Err(CmdError::Budget(msg)) => {
            eprintln!("budget exhausted: {msg}");
            ExitCode::from(4)
        }
        Err(CmdError::Io(e)) => {
            eprintln!("io error: {e}");
            ExitCode::from(1)
        }
    }
}

fn rational(s: &str) -> Result<BigRational, CmdError> {
    parse_rational(s).ok_or_else(|| CmdError::Usage(format!("not a rational: {s}")))
}

/// Exact direction vector for a named angle or a rational slope, in the
/// scalar field of the family.
fn direction<T: Scalar>(spec: &str) -> Result<Vec2<T>, CmdError> {
    if let Some(slope) = spec.strip_prefix("slope=") {
        let s = rational(slope)?;
        return Ok(Vec2::new(T::one(), T::from_rational(s)));
    }
    let sqrt3 = T::sqrt3();
    let needs_sqrt3 = |v: Result<Vec2<T>, CmdError>| v;
    match spec {
        "pi/4" => Ok(Vec2::new(T::one(), T::one())),
        "pi/2" => Ok(Vec2::new(T::zero(), T::one())),
        "3pi/4" => Ok(Vec2::new(-T::one(), T::one())),
        "pi/6" => needs_sqrt3(match &sqrt3 {
            Some(r3) => Ok(Vec2::new(r3.clone(), T::one())),
            None => Err(CmdError::Usage(
                "pi/6 needs the Koch coordinate field; use the koch family".into(),
            )),
        }),
        "pi/3" => needs_sqrt3(match &sqrt3 {
            Some(r3) => Ok(Vec2::new(T::one(), r3.clone())),
            None => Err(CmdError::Usage(
                "pi/3 needs the Koch coordinate field; use the koch family".into(),
            )),
        }),
        other => Err(CmdError::Usage(format!(
            "unknown direction {other}; use pi/6, pi/4, pi/3, pi/2, 3pi/4 or slope=p/q"
        ))),
    }
}

enum AnyTable {
    Koch(Table<QSqrt3>),
    Rect(Table<BigRational>),
}

fn build_table(family: &str, params: &[u32]) -> Result<AnyTable, CmdError> {
    match family {
        "koch" | "ks" => {
            let n = *params
                .first()
                .ok_or_else(|| CmdError::Usage("missing level".into()))?;
            Ok(AnyTable::Koch(build_koch_snowflake(n)))
        }
        "t" => {
            let n = *params
                .first()
                .ok_or_else(|| CmdError::Usage("missing level".into()))?;
            Ok(AnyTable::Rect(build_t_fractal(n)))
        }
        "carpet" => {
            let [a, n] = params else {
                return Err(CmdError::Usage("carpet takes <a> <n>".into()));
            };
            build_carpet(*a, *n)
                .map(AnyTable::Rect)
                .map_err(|e| CmdError::Usage(e.to_string()))
        }
        "square" => Ok(AnyTable::Rect(build_carpet(3, 0).expect("unit square"))),
        other => Err(CmdError::Usage(format!("unknown family {other}"))),
    }
}

fn write_out(path: &Path, contents: &str) -> CmdResult {
    if let Some(dir) = path.parent() {
        if !dir.as_os_str().is_empty() {
            std::fs::create_dir_all(dir)?;
        }
    }
    std::fs::write(path, contents)?;
    println!("wrote {}", path.display());
    Ok(())
}

fn emit_json<S: serde::Serialize>(value: &S, target: Option<PathBuf>) -> CmdResult {
    let text = serde_json::to_string_pretty(value).expect("serializable");
    match target {
        Some(path) => write_out(&path, &text),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

fn cmd_table(family: &str, params: &[u32], out: &OutputArgs) -> CmdResult {
    let name = format!(
        "table-{}-{}",
        family,
        params
            .iter()
            .map(|p| p.to_string())
            .collect::<Vec<_>>()
            .join("-")
    );
    match build_table(family, params)? {
        AnyTable::Koch(t) => {
            if let Some(p) = resolve(&out.svg, &format!("{name}.svg")) {
                write_out(&p, &svg::table_svg(&t))?;
            }
            emit_json(
                &json::table_to_json(&t),
                resolve(&out.json, &format!("{name}.json")),
            )
        }
        AnyTable::Rect(t) => {
            if let Some(p) = resolve(&out.svg, &format!("{name}.svg")) {
                write_out(&p, &svg::table_svg(&t))?;
            }
            emit_json(
                &json::table_to_json(&t),
                resolve(&out.json, &format!("{name}.json")),
            )
        }
    }
}

fn base_init<T: Scalar>(
    table: &Table<T>,
    x0: &BigRational,
    dir_spec: &str,
) -> Result<InitialCondition<T>, CmdError> {
    let dir = direction::<T>(dir_spec)?;
    let point = Point2::new(T::from_rational(x0.clone()), T::zero());
    if table.locate(&point).is_none() {
        return Err(CmdError::Geometry(format!(
            "({x0}, 0) is not on the table boundary"
        )));
    }
    Ok(InitialCondition { point, dir })
}

fn orbit_exit(status: &OrbitStatus) -> CmdResult {
    match status {
        OrbitStatus::Periodic { .. } => Ok(()),
        OrbitStatus::ClosedSingular | OrbitStatus::SaddleConnection => Err(CmdError::Geometry(
            "orbit terminated at a nonremovable corner".into(),
        )),
        OrbitStatus::BudgetExhausted => Err(CmdError::Budget(
            "orbit did not close within the bounce budget".into(),
        )),
    }
}

fn run_one<T: Scalar>(
    table: &Table<T>,
    x0: &BigRational,
    dir_spec: &str,
    budget: usize,
) -> Result<Orbit<T>, CmdError> {
    let init = base_init(table, x0, dir_spec)?;
    run_orbit(table, &init, budget, CornerPolicy::ResolveRemovable)
        .map_err(|e| CmdError::Geometry(e.to_string()))
}

fn cmd_orbit(
    family: &str,
    params: &[u32],
    x0: &str,
    dir: &str,
    budget: usize,
    out: &OutputArgs,
) -> CmdResult {
    let x0 = rational(x0)?;
    let name = format!("orbit-{family}");
    match build_table(family, params)? {
        AnyTable::Koch(t) => {
            let orbit = run_one(&t, &x0, dir, budget)?;
            if let Some(p) = resolve(&out.svg, &format!("{name}.svg")) {
                write_out(&p, &svg::orbit_svg(&t, &orbit))?;
            }
            emit_json(
                &json::orbit_to_json(&orbit),
                resolve(&out.json, &format!("{name}.json")),
            )?;
            orbit_exit(&orbit.status)
        }
        AnyTable::Rect(t) => {
            let orbit = run_one(&t, &x0, dir, budget)?;
            if let Some(p) = resolve(&out.svg, &format!("{name}.svg")) {
                write_out(&p, &svg::orbit_svg(&t, &orbit))?;
            }
            emit_json(
                &json::orbit_to_json(&orbit),
                resolve(&out.json, &format!("{name}.json")),
            )?;
            orbit_exit(&orbit.status)
        }
    }
}

fn sequence_exit<T: Scalar>(seq: &CompatSequence<T>) -> CmdResult {
    if seq.truncated.is_some() {
        return Err(CmdError::Geometry(
            "no compatible lift (corner in the way)".into(),
        ));
    }
    let mut budget_hit = false;
    for run in &seq.levels {
        match run.orbit.status {
            OrbitStatus::ClosedSingular | OrbitStatus::SaddleConnection => {
                return Err(CmdError::Geometry(format!(
                    "orbit at level {} is singular",
                    run.level
                )));
            }
            OrbitStatus::BudgetExhausted => budget_hit = true,
            OrbitStatus::Periodic { .. } => {}
        }
    }
    if budget_hit {
        return Err(CmdError::Budget(
            "some level did not close within the budget".into(),
        ));
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn cmd_compat(
    family: &str,
    a: Option<u32>,
    x0: &str,
    dir: &str,
    depth: u32,
    start_level: u32,
    budget: usize,
    out: &OutputArgs,
) -> CmdResult {
    if depth < start_level {
        return Err(CmdError::Usage(
            "depth must be at least the start level".into(),
        ));
    }
    let x0 = rational(x0)?;
    let name = format!("compat-{family}");
    match family {
        "koch" | "ks" => {
            let tables: Vec<Table<QSqrt3>> =
                (start_level..=depth).map(build_koch_snowflake).collect();
            let init = base_init(&tables[0], &x0, dir)?;
            let seq = build_sequence(&tables, &init, budget)
                .map_err(|e| CmdError::Geometry(e.to_string()))?;
            let constancy = detect_constancy(&seq);
            report_constancy(&constancy);
            if let Some(p) = resolve(&out.svg, &format!("{name}.svg")) {
                write_out(&p, &svg::sequence_svg(&tables, &seq))?;
            }
            emit_json(
                &json::sequence_to_json(&seq, constancy),
                resolve(&out.json, &format!("{name}.json")),
            )?;
            sequence_exit(&seq)
        }
        "t" | "carpet" => {
            let tables: Vec<Table<BigRational>> = if family == "t" {
                (start_level..=depth).map(build_t_fractal).collect()
            } else {
                let a = a.ok_or_else(|| CmdError::Usage("carpet needs --a".into()))?;
                (start_level..=depth)
                    .map(|n| build_carpet(a, n))
                    .collect::<Result<_, _>>()
                    .map_err(|e| CmdError::Geometry(e.to_string()))?
            };
            let init = base_init(&tables[0], &x0, dir)?;
            let seq = build_sequence(&tables, &init, budget)
                .map_err(|e| CmdError::Geometry(e.to_string()))?;
            let constancy = detect_constancy(&seq);
            report_constancy(&constancy);
            if let Some(p) = resolve(&out.svg, &format!("{name}.svg")) {
                write_out(&p, &svg::sequence_svg(&tables, &seq))?;
            }
            emit_json(
                &json::sequence_to_json(&seq, constancy),
                resolve(&out.json, &format!("{name}.json")),
            )?;
            sequence_exit(&seq)
        }
        other => Err(CmdError::Usage(format!("unknown family {other}"))),
    }
}

fn report_constancy(c: &Constancy) {
    match c {
        Constancy::ConstantFrom(n) => eprintln!("constant from level {n}"),
        Constancy::NotConstantWithinDepth => eprintln!("not constant within the computed depth"),
    }
}

fn cmd_path(
    family: &str,
    x0: &str,
    dir: &str,
    depth: u32,
    budget: usize,
    out: &OutputArgs,
) -> CmdResult {
    let x0 = rational(x0)?;
    let name = format!("path-{family}");
    match family {
        "koch" | "ks" => {
            let tables: Vec<Table<QSqrt3>> = (0..=depth).map(build_koch_snowflake).collect();
            let init = base_init(&tables[0], &x0, dir)?;
            let (main, twin) = ks_nontrivial_path(&tables, &init, budget)
                .map_err(|e| CmdError::Geometry(e.to_string()))?;
            emit_json(
                &vec![json::path_to_json(&main), json::path_to_json(&twin)],
                resolve(&out.json, &format!("{name}.json")),
            )
        }
        "t" => {
            let tables: Vec<Table<BigRational>> = (0..=depth).map(build_t_fractal).collect();
            let init = base_init(&tables[0], &x0, dir)?;
            let (main, twin) = t_nontrivial_path(&tables, &init, budget)
                .map_err(|e| CmdError::Geometry(e.to_string()))?;
            emit_json(
                &vec![json::path_to_json(&main), json::path_to_json(&twin)],
                resolve(&out.json, &format!("{name}.json")),
            )
        }
        other => Err(CmdError::Usage(format!(
            "paths exist for koch and t, not {other}"
        ))),
    }
}

fn cmd_slopes(a: u32, check: Option<&str>, depth: u32, out: &OutputArgs) -> CmdResult {
    let sets = slope_sets(a).map_err(|e| CmdError::Geometry(e.to_string()))?;
    if let Some(spec) = check {
        let slope = rational(spec)?;
        let query = SegmentQuery {
            start: Point2::new(BigRational::new(1.into(), 2.into()), BigRational::zero()),
            slope,
            depth,
        };
        let report =
            segment_avoids_peripherals(&query, a).map_err(|e| CmdError::Geometry(e.to_string()))?;
        let cert = json::avoidance_to_json(a, &query, &report);
        emit_json(&cert, resolve(&out.json, &format!("avoidance-{a}.json")))?;
        return Ok(());
    }
    emit_json(
        &json::slope_sets_to_json(&sets),
        resolve(&out.json, &format!("slopes-{a}.json")),
    )
}

fn cmd_unfold(
    family: &str,
    params: &[u32],
    x0: &str,
    dir: &str,
    budget: usize,
    out: &OutputArgs,
) -> CmdResult {
    let x0 = rational(x0)?;
    let name = format!("unfold-{family}");
    match build_table(family, params)? {
        AnyTable::Koch(t) => {
            let orbit = run_one(&t, &x0, dir, budget)?;
            orbit_exit(&orbit.status)?;
            let unfolded =
                unfold_orbit(&t, &orbit).map_err(|e| CmdError::Geometry(e.to_string()))?;
            if let Some(p) = resolve(&out.svg, &format!("{name}.svg")) {
                write_out(&p, &svg::unfolded_svg(&t, &unfolded))?;
            }
            emit_json(
                &json::unfolded_to_json(&unfolded),
                resolve(&out.json, &format!("{name}.json")),
            )
        }
        AnyTable::Rect(t) => {
            let orbit = run_one(&t, &x0, dir, budget)?;
            orbit_exit(&orbit.status)?;
            let unfolded =
                unfold_orbit(&t, &orbit).map_err(|e| CmdError::Geometry(e.to_string()))?;
            if let Some(p) = resolve(&out.svg, &format!("{name}.svg")) {
                write_out(&p, &svg::unfolded_svg(&t, &unfolded))?;
            }
            emit_json(
                &json::unfolded_to_json(&unfolded),
                resolve(&out.json, &format!("{name}.json")),
            )
        }
    }
}

fn cmd_seed_fixtures(target: Option<PathBuf>) -> CmdResult {
    let dir = target.unwrap_or_else(|| out_dir().join("fixtures"));
    std::fs::create_dir_all(&dir)?;
    fn save<S: serde::Serialize>(dir: &Path, name: &str, value: &S) -> CmdResult {
        let text = serde_json::to_string_pretty(value).expect("serializable");
        write_out(&dir.join(name), &text)
    }
    // tables
    save(
        &dir,
        "table-koch-2.json",
        &json::table_to_json(&build_koch_snowflake(2)),
    )?;
    save(
        &dir,
        "table-t-1.json",
        &json::table_to_json(&build_t_fractal(1)),
    )?;
    save(
        &dir,
        "table-carpet-3-1.json",
        &json::table_to_json(&build_carpet(3, 1).expect("valid")),
    )?;
    // orbits
    let square = build_carpet(3, 0).expect("unit square");
    let diamond = run_one(
        &square,
        &BigRational::new(1.into(), 4.into()),
        "slope=1",
        64,
    )?;
    save(
        &dir,
        "orbit-square-quarter.json",
        &json::orbit_to_json(&diamond),
    )?;
    let tri = build_koch_snowflake(0);
    let fagnano = run_one(&tri, &BigRational::new(1.into(), 2.into()), "pi/3", 64)?;
    save(&dir, "orbit-fagnano.json", &json::orbit_to_json(&fagnano))?;
    // slopes
    save(
        &dir,
        "slopes-7.json",
        &json::slope_sets_to_json(&slope_sets(7).expect("odd")),
    )?;
    // the constant-from-one sequence
    let tables: Vec<Table<QSqrt3>> = (0..=3).map(build_koch_snowflake).collect();
    let init = base_init(&tables[0], &BigRational::new(7.into(), 12.into()), "pi/3")?;
    let seq = build_sequence(&tables, &init, 512).map_err(|e| CmdError::Geometry(e.to_string()))?;
    let constancy = detect_constancy(&seq);
    save(
        &dir,
        "compat-koch-7-12.json",
        &json::sequence_to_json(&seq, constancy),
    )?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn named_angles_resolve_to_exact_vectors() {
        let d: Vec2<QSqrt3> = direction("pi/3").unwrap();
        assert_eq!(d, Vec2::new(QSqrt3::from_int(1), QSqrt3::sqrt3()));
        let d: Vec2<QSqrt3> = direction("pi/6").unwrap();
        assert_eq!(d, Vec2::new(QSqrt3::sqrt3(), QSqrt3::from_int(1)));
        let d: Vec2<BigRational> = direction("3pi/4").unwrap();
        assert_eq!(d.x, -d.y);
        // pi/3 is outside the rational field
        assert!(direction::<BigRational>("pi/3").is_err());
        assert!(direction::<BigRational>("pi/5").is_err());
    }

    #[test]
    fn slope_syntax_parses_exactly() {
        let d: Vec2<BigRational> = direction("slope=2/3").unwrap();
        assert_eq!(d.y, BigRational::new(2.into(), 3.into()));
        assert!(direction::<BigRational>("slope=1/0").is_err());
    }

    #[test]
    fn family_parsing() {
        assert!(matches!(build_table("koch", &[1]), Ok(AnyTable::Koch(_))));
        assert!(matches!(build_table("t", &[0]), Ok(AnyTable::Rect(_))));
        assert!(matches!(
            build_table("carpet", &[3, 1]),
            Ok(AnyTable::Rect(_))
        ));
        assert!(matches!(
            build_table("carpet", &[4, 1]),
            Err(CmdError::Usage(_))
        ));
        assert!(matches!(
            build_table("carpet", &[3]),
            Err(CmdError::Usage(_))
        ));
        assert!(matches!(
            build_table("pentagon", &[1]),
            Err(CmdError::Usage(_))
        ));
    }
}
