use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use sr_dirichlet::pipeline::{corner_slice, evaluate_many, solve_timed, table1, SolveReport};
use sr_dirichlet::{Point3, Solution};

mod config;

use config::Config;

const EXIT_INVALID: u8 = 2;
const EXIT_NUMERICAL: u8 = 3;
const EXIT_ROW_ERROR: u8 = 4;
const EXIT_BAND: u8 = 5;

#[derive(Parser)]
#[command(version, about = "Harmonic Dirichlet problem on the unit cube")]
struct Cli {
    /// Worker threads (default: all cores)
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Reserved; every computation is deterministic
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve the problem described by a JSON config
    Solve {
        #[arg(long)]
        config: PathBuf,
    },
    /// Evaluate a solution at points read from a CSV of x,y,z rows
    Eval {
        #[arg(long)]
        solution: PathBuf,
        #[arg(long)]
        points: PathBuf,
        /// Output CSV (default: stdout)
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Condition numbers and approximation errors for the u1/u2 test functions
    Table1 {
        /// Collocation points per face edge
        #[arg(long, default_value_t = 5)]
        n: usize,
        /// Print JSON rows
        #[arg(long)]
        json: bool,
    },
    /// Sample a solution on a triangular slice near a cube vertex
    Corner {
        #[arg(long)]
        solution: PathBuf,
        #[arg(long, default_value_t = 0.0866)]
        distance: f64,
        #[arg(long, default_value_t = 60)]
        resolution: usize,
        /// Vertex as x,y,z with coordinates 0 or 1
        #[arg(long, default_value = "0,0,1")]
        corner: String,
        /// Output CSV (default: stdout)
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

struct Failure {
    code: u8,
    message: String,
}

fn invalid(message: impl ToString) -> Failure {
    Failure {
        code: EXIT_INVALID,
        message: message.to_string(),
    }
}

fn numerical(message: impl ToString) -> Failure {
    Failure {
        code: EXIT_NUMERICAL,
        message: message.to_string(),
    }
}

fn io_failure(path: &Path, e: impl std::fmt::Display) -> Failure {
    Failure {
        code: 1,
        message: format!("{}: {e}", path.display()),
    }
}

fn float(v: f64) -> String {
    format!("{v:.16e}")
}

fn sink(path: Option<&Path>) -> Result<Box<dyn Write>, Failure> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p).map_err(|e| io_failure(p, e))?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn write_points<'a>(
    out: Box<dyn Write>,
    rows: impl Iterator<Item = (Point3, Result<f64, String>)> + 'a,
) -> Result<usize, Failure> {
    let mut w = csv::Writer::from_writer(out);
    let fail = |e: csv::Error| Failure {
        code: 1,
        message: e.to_string(),
    };
    w.write_record(["x", "y", "z", "value"]).map_err(fail)?;
    let mut errors = 0;
    for (p, v) in rows {
        let value = match v {
            Ok(v) => float(v),
            Err(e) => {
                errors += 1;
                format!("ERROR: {e}")
            }
        };
        w.write_record([float(p.x), float(p.y), float(p.z), value]).map_err(fail)?;
    }
    w.flush().map_err(|e| Failure {
        code: 1,
        message: e.to_string(),
    })?;
    Ok(errors)
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<(), Failure> {
    std::fs::write(path, bytes).map_err(|e| io_failure(path, e))
}

fn cmd_solve(path: &Path) -> Result<(), Failure> {
    let config = Config::load(path).map_err(invalid)?;
    let spec = config.problem_spec();
    let (mut sol, timings) = solve_timed(&spec).map_err(|e| {
        if e.is_numerical() {
            numerical(e)
        } else {
            invalid(e)
        }
    })?;
    sol.provenance.created_unix = std::env::var("SOURCE_DATE_EPOCH").ok().and_then(|s| s.parse().ok());

    // everything is computed before the first file is written
    let evaluations = config.evaluations.as_ref().map(|ev| {
        let points = config.evaluation_points();
        let values = evaluate_many(&sol, &points);
        (ev.output.clone(), points, values)
    });
    let mut solution_text = Vec::new();
    sr_dirichlet::pipeline::save_solution(&sol, &mut solution_text).map_err(numerical)?;
    let report = serde_json::to_string_pretty(&SolveReport::new(&sol, timings)).map_err(numerical)?;

    write_file(&config.outputs.solution, &solution_text)?;
    if let Some(p) = &config.outputs.report {
        write_file(p, format!("{report}\n").as_bytes())?;
    }
    if let Some((output, points, values)) = evaluations {
        let rows = points.into_iter().zip(values.into_iter().map(|v| v.map_err(|e| e.to_string())));
        let errors = write_points(sink(Some(&output))?, rows)?;
        if errors > 0 {
            return Err(Failure {
                code: EXIT_ROW_ERROR,
                message: format!("{errors} evaluation points failed"),
            });
        }
    }
    eprintln!("{report}");
    Ok(())
}

fn load_solution(path: &Path) -> Result<Solution, Failure> {
    Solution::load(path).map_err(|e| invalid(format!("{}: {e}", path.display())))
}

fn read_points(path: &Path) -> Result<Vec<Result<Point3, String>>, Failure> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .flexible(true)
        .from_path(path)
        .map_err(|e| invalid(format!("{}: {e}", path.display())))?;
    let mut rows = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record = record.map_err(|e| invalid(format!("{}: {e}", path.display())))?;
        let coords: Vec<Option<f64>> = record.iter().map(|f| f.parse().ok()).collect();
        match coords.as_slice() {
            [Some(x), Some(y), Some(z)] => rows.push(Ok(Point3::new(*x, *y, *z))),
            _ if i == 0 => {} // header
            _ => rows.push(Err(format!("row {} is not three numbers", i + 1))),
        }
    }
    Ok(rows)
}

fn cmd_eval(solution: &Path, points: &Path, output: Option<&Path>) -> Result<(), Failure> {
    let sol = load_solution(solution)?;
    let rows = read_points(points)?;
    let valid: Vec<Point3> = rows.iter().filter_map(|r| r.as_ref().ok().copied()).collect();
    let mut values = evaluate_many(&sol, &valid).into_iter();
    let nan = Point3::new(f64::NAN, f64::NAN, f64::NAN);
    let out: Vec<(Point3, Result<f64, String>)> = rows
        .into_iter()
        .map(|r| match r {
            Ok(p) => (p, values.next().expect("one value per point").map_err(|e| e.to_string())),
            Err(e) => (nan, Err(e)),
        })
        .collect();
    let errors = write_points(sink(output)?, out.into_iter())?;
    if errors > 0 {
        return Err(Failure {
            code: EXIT_ROW_ERROR,
            message: format!("{errors} rows could not be evaluated"),
        });
    }
    Ok(())
}

fn band(b: Option<sr_dirichlet::pipeline::Band>) -> String {
    match b {
        None => "-".into(),
        Some(b) => format!(
            "[{}, {}]",
            b.low.map_or("-".into(), |v| format!("{v:.0e}")),
            b.high.map_or("-".into(), |v| format!("{v:.0e}"))
        ),
    }
}

fn cmd_table1(n: usize, json: bool) -> Result<(), Failure> {
    let rows = table1(n).map_err(|e| {
        if e.is_numerical() {
            numerical(e)
        } else {
            invalid(e)
        }
    })?;
    let mut out = io::stdout().lock();
    let result: io::Result<()> = (|| {
        if json {
            writeln!(out, "{}", serde_json::to_string_pretty(&rows)?)?;
        } else {
            writeln!(
                out,
                "{:<6} {:<6} {:>5} {:>12} {:>16} {:>12} {:>16} {}",
                "method", "target", "N", "condition", "band", "error", "band", "status"
            )?;
            for r in &rows {
                writeln!(
                    out,
                    "{:<6} {:<6} {:>5} {:>12.3e} {:>16} {:>12.3e} {:>16} {}",
                    r.row.backend.name(),
                    r.row.target.name(),
                    r.row.points,
                    r.row.condition,
                    band(r.condition_band),
                    r.row.error,
                    band(r.error_band),
                    if r.pass { "ok" } else { "OUT OF BAND" }
                )?;
            }
        }
        Ok(())
    })();
    result.map_err(|e| Failure {
        code: 1,
        message: e.to_string(),
    })?;
    if rows.iter().any(|r| !r.pass) {
        return Err(Failure {
            code: EXIT_BAND,
            message: "some cells are outside their acceptance bands".into(),
        });
    }
    Ok(())
}

fn parse_corner(s: &str) -> Result<Point3, Failure> {
    let c: Vec<f64> = s
        .split(',')
        .map(|v| v.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|_| invalid(format!("corner `{s}` is not x,y,z")))?;
    match c.as_slice() {
        [x, y, z] => Ok(Point3::new(*x, *y, *z)),
        _ => Err(invalid(format!("corner `{s}` is not x,y,z"))),
    }
}

fn cmd_corner(
    solution: &Path,
    distance: f64,
    resolution: usize,
    corner: &str,
    output: Option<&Path>,
) -> Result<(), Failure> {
    let sol = load_solution(solution)?;
    let corner = parse_corner(corner)?;
    let samples = corner_slice(&sol, corner, distance, resolution).map_err(|e| match e {
        sr_dirichlet::PipelineError::Slice(m) => invalid(m),
        e => numerical(e),
    })?;
    write_points(sink(output)?, samples.into_iter().map(|s| (s.point, Ok(s.value))))?;
    Ok(())
}

fn run(cli: Cli) -> Result<(), Failure> {
    if let Some(threads) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(invalid)?;
    }
    let _ = cli.seed;
    match cli.command {
        Command::Solve { config } => cmd_solve(&config),
        Command::Eval {
            solution,
            points,
            output,
        } => cmd_eval(&solution, &points, output.as_deref()),
        Command::Table1 { n, json } => cmd_table1(n, json),
        Command::Corner {
            solution,
            distance,
            resolution,
            corner,
            output,
        } => cmd_corner(&solution, distance, resolution, &corner, output.as_deref()),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
