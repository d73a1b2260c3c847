use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use koch_billiards::billiard::{footprint_types, is_hybrid, run_orbit, Direction, InitialCondition, DEFAULT_MAX_STEPS};
use koch_billiards::compat::{
    build_sequence, compatible_point, detect_constant, dichotomy_check, family_grid, family_sweep, hook_seed,
    Constancy, Tower,
};
use koch_billiards::exact::{fmt_rational, parse_rational, Rational};
use koch_billiards::paths::{
    alternation_probe, concatenate, extract_path, limit_off_all_levels, midpoint_seed, reverse_seed,
};
use koch_billiards::prefractal::{build_prefractal_capped, BoundaryPoint, DEFAULT_LEVEL_CAP};
use koch_billiards::surface::{cover_consistency, hex_tiling, surface_census, SurfaceCensus};
use koch_billiards::svg;
use koch_billiards::{Error, Result};

const AFTER_HELP: &str = "\
Directions: a lattice pair A,B meaning A*u1 + B*u2 with u1 = (1,0) and
u2 = (1/2, sqrt(3)/2), or one of the named angles
  pi/6  -> 1,1
  pi/3  -> 0,1
  pi/2  -> -1,2
  5pi/6 -> -2,1
or irrational:<radians> for a symbolic irrational direction.

Exit codes: 0 ok, 1 i/o error, 2 domain error, 3 verification failure,
4 resource cap exceeded.";

#[derive(Parser)]
#[command(name = "koch-billiards", version, about = "Exact billiards in prefractal Koch snowflakes", after_help = AFTER_HELP)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a prefractal and emit its vertices.
    Build {
        #[arg(long)]
        level: u32,
        #[command(flatten)]
        out: Outputs,
        #[arg(long, default_value_t = DEFAULT_LEVEL_CAP)]
        cap: u32,
    },
    /// Trace one orbit.
    Orbit {
        #[arg(long)]
        level: u32,
        /// Level whose sides --side and --t refer to; the seed is carried up
        /// to --level through compatible points.
        #[arg(long, default_value_t = 0)]
        seed_level: u32,
        #[command(flatten)]
        seed: SeedArgs,
        #[arg(long, default_value_t = DEFAULT_MAX_STEPS)]
        max_steps: usize,
        #[command(flatten)]
        out: Outputs,
    },
    /// Build a sequence of compatible orbits and report on it.
    Sequence {
        /// Level range `a..b`, inclusive.
        #[arg(long, value_parser = parse_levels)]
        levels: (u32, u32),
        #[command(flatten)]
        seed: SeedArgs,
        #[arg(long, default_value_t = DEFAULT_MAX_STEPS)]
        max_steps: usize,
        #[command(flatten)]
        out: Outputs,
    },
    /// Euler characteristic, genus, cone points and cover degree.
    Surface {
        #[arg(long, conflicts_with = "levels")]
        level: Option<u32>,
        /// Level range `a..b`, inclusive.
        #[arg(long, value_parser = parse_levels)]
        levels: Option<(u32, u32)>,
        /// Also tile by hexagons of this scale (must exceed every level).
        #[arg(long)]
        tiling: Option<u32>,
        #[command(flatten)]
        out: Outputs,
    },
    /// Polygonal path through Cantor-point basepoints.
    Path {
        /// Level range `a..b`, inclusive.
        #[arg(long, value_parser = parse_levels)]
        levels: (u32, u32),
        #[command(flatten)]
        seed: SeedArgs,
        /// Also build the path of the reversed seed and join the two.
        #[arg(long)]
        both: bool,
        #[arg(long, default_value_t = DEFAULT_MAX_STEPS)]
        max_steps: usize,
        #[command(flatten)]
        out: Outputs,
    },
    /// Sweep the odd-`b` seed families over a level range.
    Sweep {
        /// Level range `a..b`, inclusive.
        #[arg(long, value_parser = parse_levels, default_value = "0..3")]
        levels: (u32, u32),
        /// Values of `a` and `b`.
        #[arg(long, value_delimiter = ',', default_value = "1,3,5")]
        values: Vec<u64>,
        #[arg(long, default_value_t = 2)]
        s_max: u32,
        #[arg(long, default_value_t = 0)]
        threads: usize,
        #[arg(long, default_value_t = DEFAULT_MAX_STEPS)]
        max_steps: usize,
        #[command(flatten)]
        out: Outputs,
    },
}

#[derive(Args, Clone)]
struct SeedArgs {
    /// Named seed, replacing --t and --dir.
    #[arg(long, value_enum, conflicts_with_all = ["t", "dir"])]
    seed: Option<NamedSeed>,
    /// Position on the side as a fraction in (0, 1).
    #[arg(long)]
    t: Option<String>,
    /// Direction: A,B or a named angle.
    #[arg(long, allow_hyphen_values = true)]
    dir: Option<String>,
    /// 1-based side index.
    #[arg(long, default_value_t = 1)]
    side: usize,
    /// Measure t from the far end of the side.
    #[arg(long)]
    mirror: bool,
}

#[derive(ValueEnum, Clone, Copy)]
enum NamedSeed {
    /// t = 1/2 toward the midpoint of the lower third of side 2.
    Midpoint,
    /// 3/4 from the far end of the base, at pi/6.
    Hook,
    /// t = 7/12 at pi/3.
    SevenTwelfths,
}

#[derive(Args, Clone, Default)]
struct Outputs {
    #[arg(long)]
    json: Option<PathBuf>,
    #[arg(long)]
    svg: Option<PathBuf>,
    #[arg(long)]
    csv: Option<PathBuf>,
}

fn parse_levels(s: &str) -> std::result::Result<(u32, u32), String> {
    let (a, b) = s.split_once("..").ok_or_else(|| format!("expected a..b, got {s:?}"))?;
    let a: u32 = a.trim().parse().map_err(|_| format!("bad level {a:?}"))?;
    let b: u32 = b.trim().parse().map_err(|_| format!("bad level {b:?}"))?;
    if a > b {
        return Err(format!("empty range {s}"));
    }
    Ok((a, b))
}

impl SeedArgs {
    fn initial(&self, tower: &Tower, level: u32) -> Result<InitialCondition> {
        let p = tower.get(level);
        if let Some(named) = self.seed {
            if level != 0 {
                return Err(Error::Domain("named seeds live on level 0".into()));
            }
            return match named {
                NamedSeed::Midpoint => midpoint_seed(tower),
                NamedSeed::Hook => hook_seed(p),
                NamedSeed::SevenTwelfths => InitialCondition::new(
                    p,
                    BoundaryPoint::new(0, Rational::new(7.into(), 12.into())),
                    Direction::exact(0, 1)?,
                ),
            };
        }
        let t = self.t.as_deref().ok_or_else(|| Error::Domain("--t is required".into()))?;
        let dir = self.dir.as_deref().ok_or_else(|| Error::Domain("--dir is required".into()))?;
        let mut t = parse_rational(t).ok_or_else(|| Error::Domain(format!("bad fraction {t:?}")))?;
        if self.mirror {
            t = Rational::from_integer(1.into()) - t;
        }
        if self.side == 0 || self.side > p.num_sides() {
            return Err(Error::Domain(format!("side {} out of range 1..={}", self.side, p.num_sides())));
        }
        InitialCondition::new(p, BoundaryPoint::new(self.side - 1, t), Direction::parse(dir)?)
    }
}

/// Moves a seed on `KS_from` to its compatible point on `KS_to`.
fn carry(tower: &Tower, init: InitialCondition, from: u32, to: u32) -> Result<InitialCondition> {
    if from == to {
        return Ok(init);
    }
    let dir = init
        .direction
        .as_exact()
        .ok_or_else(|| Error::Domain("irrational seeds cannot be carried to finer levels".into()))?;
    let mut bp = init.point;
    for j in from + 1..=to {
        bp = compatible_point(tower, j - 1, &bp, dir, j)?;
    }
    InitialCondition::new(tower.get(to), bp, init.direction)
}

fn emit(out: &Outputs, report: &Value) -> Result<()> {
    let text = serde_json::to_string_pretty(report).map_err(|e| Error::Io(e.to_string()))? + "\n";
    match &out.json {
        Some(path) => fs::write(path, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn write_svg(out: &Outputs, render: impl FnOnce() -> String) -> Result<()> {
    if let Some(path) = &out.svg {
        fs::write(path, render())?;
    }
    Ok(())
}

fn csv_writer(path: &PathBuf) -> Result<csv::Writer<fs::File>> {
    csv::Writer::from_path(path).map_err(|e| Error::Io(e.to_string()))
}

fn csv_err(e: csv::Error) -> Error {
    Error::Io(e.to_string())
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Build { level, out, cap } => {
            let p = build_prefractal_capped(level, cap)?;
            let mut report = p.to_json();
            report["sides"] = json!(p.num_sides());
            report["perimeter"] = json!(fmt_rational(&p.perimeter()));
            report["area_ratio"] = json!(fmt_rational(&p.area_ratio()));
            emit(&out, &report)?;
            write_svg(&out, || svg::render_prefractal(&p))
        }
        Command::Orbit { level, seed_level, seed, max_steps, out } => {
            if seed_level > level {
                return Err(Error::Domain(format!("seed level {seed_level} is above level {level}")));
            }
            let tower = Tower::new(level)?;
            let init = carry(&tower, seed.initial(&tower, seed_level)?, seed_level, level)?;
            let p = tower.get(level);
            let orbit = run_orbit(p, &init, max_steps)?;
            let mut report = orbit.to_json();
            report["hybrid"] = json!(is_hybrid(&orbit).ok());
            report["degenerate"] = json!(orbit.is_degenerate());
            emit(&out, &report)?;
            if let Some(path) = &out.csv {
                let mut w = csv_writer(path)?;
                w.write_record(["index", "side", "t", "dir_a", "dir_b", "type"]).map_err(csv_err)?;
                for (i, (s, ty)) in orbit.footprint.iter().zip(footprint_types(&orbit)).enumerate() {
                    w.write_record([
                        i.to_string(),
                        s.point.nu().to_string(),
                        fmt_rational(&s.point.t),
                        s.dir.a.to_string(),
                        s.dir.b.to_string(),
                        ty.to_string(),
                    ])
                    .map_err(csv_err)?;
                }
                w.flush()?;
            }
            write_svg(&out, || svg::render_orbit(p, &orbit))
        }
        Command::Sequence { levels: (lo, hi), seed, max_steps, out } => {
            let tower = Tower::new(hi)?;
            let init = seed.initial(&tower, lo)?;
            let seq = build_sequence(&tower, lo, &init, hi, max_steps)?;
            let mut report = seq.to_json();
            let dichotomy = dichotomy_check(&seq);
            report["dichotomy"] = match &dichotomy {
                Ok(d) => json!(format!("{d:?}")),
                Err(e) => json!({ "error": e.to_string() }),
            };
            report["constant"] = match detect_constant(&tower, &seq) {
                Ok(c) => json!({
                    "verdict": match c.verdict {
                        Constancy::StabilizesAt(n) => format!("StabilizesAt({n})"),
                        Constancy::NotConstant => "NotConstant".to_string(),
                    },
                    "hypothesis": c.hypothesis,
                    "max_c_prefix": c.max_c_prefix,
                }),
                Err(e) => json!({ "skipped": e.to_string() }),
            };
            emit(&out, &report)?;
            write_svg(&out, || svg::render_sequence(&tower, &seq))?;
            dichotomy.map(|_| ())
        }
        Command::Surface { level, levels, tiling, out } => {
            let (lo, hi) = match (level, levels) {
                (Some(n), _) => (n, n),
                (None, Some(r)) => r,
                (None, None) => return Err(Error::Domain("--level or --levels is required".into())),
            };
            let mut rows = Vec::new();
            let mut table = vec![SurfaceCensus::TABLE_HEADER.to_string()];
            for n in lo..=hi {
                let c = surface_census(n)?;
                if c.gauss_bonnet_chi() != c.euler_characteristic {
                    return Err(Error::Verification(format!("cone census disagrees with chi at level {n}")));
                }
                table.push(c.table_row());
                let mut v = c.to_json();
                if n >= 1 {
                    v["cover"] = cover_consistency(n)?.to_json();
                }
                if let Some(k) = tiling {
                    let t = hex_tiling(n, k)?;
                    if !t.area_ok || !t.all_singularities_centered() {
                        return Err(Error::Verification(format!("hexagonal tiling fails at level {n}, scale {k}")));
                    }
                    v["tiling"] = t.to_json();
                }
                rows.push(v);
            }
            if out.json.is_some() {
                emit(&out, &json!(rows))?;
            }
            if let Some(path) = &out.csv {
                fs::write(path, table.join("\n").replace('\t', ",") + "\n")?;
            }
            println!("{}", table.join("\n"));
            Ok(())
        }
        Command::Path { levels: (lo, hi), seed, both, max_steps, out } => {
            let tower = Tower::new(hi)?;
            let init = seed.initial(&tower, lo)?;
            let seq = build_sequence(&tower, lo, &init, hi, max_steps)?;
            let path = extract_path(&tower, &seq)?;
            let mut report = json!({
                "path": path.to_json(),
                "limit_off_boundary": limit_off_all_levels(&tower, &path),
                "probe": alternation_probe(&tower, &seq, hi - lo).to_json(),
            });
            if both {
                let rseed = reverse_seed(&tower, &seq)?;
                let rseq = build_sequence(&tower, lo, &rseed, hi, max_steps)?;
                let rpath = extract_path(&tower, &rseq)?;
                report["reversed"] = rpath.to_json();
                report["combined"] = concatenate(&path, &rpath)?.to_json();
            }
            emit(&out, &report)?;
            write_svg(&out, || svg::render_path(&tower, &path))
        }
        Command::Sweep { levels: (lo, hi), values, s_max, threads, max_steps, out } => {
            if lo != 0 {
                return Err(Error::Domain("the seed families live on level 0".into()));
            }
            let tower = Tower::new(hi)?;
            let threads =
                if threads == 0 { std::thread::available_parallelism().map_or(1, |n| n.get()) } else { threads };
            let seeds = family_grid(&values, s_max);
            let rows = family_sweep(&tower, &seeds, hi, max_steps, threads);
            let failed = rows.iter().filter(|r| !r.passed()).count();
            let report = json!({
                "levels": [lo, hi],
                "seeds": rows.len(),
                "failed": failed,
                "rows": rows.iter().map(|r| r.to_json()).collect::<Vec<_>>(),
            });
            emit(&out, &report)?;
            if let Some(path) = &out.csv {
                let mut w = csv_writer(path)?;
                w.write_record(["case", "a", "b", "r", "s", "passed", "first_failure", "avoidance", "error"])
                    .map_err(csv_err)?;
                for r in &rows {
                    let j = r.to_json();
                    w.write_record([
                        j["case"].to_string(),
                        j["a"].to_string().trim_matches('"').to_string(),
                        j["b"].to_string(),
                        r.r.to_string(),
                        r.s.to_string(),
                        r.passed().to_string(),
                        r.first_failure().map_or(String::new(), |l| l.to_string()),
                        r.avoidance.map_or(String::new(), |a| a.to_string()),
                        r.error.clone().unwrap_or_default(),
                    ])
                    .map_err(csv_err)?;
                }
                w.flush()?;
            }
            if failed > 0 {
                return Err(Error::Verification(format!("{failed} of {} seeds failed", rows.len())));
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
