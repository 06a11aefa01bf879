//! Plain-text solution files.
//!
//! ```text
//! sr-dirichlet-solution 1
//! spec <ProblemSpec as one line of JSON>
//! version <crate version>
//! created <unix seconds | none>
//! diagnostics <backend> <n> <condition> <condition_l1 | none> <residual> <rank | none>
//! error <e_max> <e_r> <j> <x> <y> <z>        or   error none
//! backend mfs <alpha> <count>                 then count lines "x y z c"
//! backend poly <degree> <cx> <cy> <cz> <count> then count lines "c"
//! backend cheb <order> <count>                then count lines "v"
//! ```
//!
//! Floats use 17 significant digits, so loading restores every value exactly.

use std::io::{BufRead, Write};

use super::{PipelineError, ProblemSpec, Provenance, Solution};
use crate::error_estimation::ErrorReport;
use crate::geometry::Point3;
use crate::regular_phase::{BackendKind, HarmonicApproximant, SolveDiagnostics};

pub const SOLUTION_MAGIC: &str = "sr-dirichlet-solution 1";

fn float(v: f64) -> String {
    format!("{v:.16e}")
}

fn opt<T>(v: Option<T>, f: impl Fn(T) -> String) -> String {
    v.map(f).unwrap_or_else(|| "none".into())
}

pub fn save_solution(sol: &Solution, mut w: impl Write) -> Result<(), PipelineError> {
    let spec = serde_json::to_string(&sol.spec).map_err(|e| PipelineError::Format {
        line: 2,
        message: e.to_string(),
    })?;
    writeln!(w, "{SOLUTION_MAGIC}")?;
    writeln!(w, "spec {spec}")?;
    writeln!(w, "version {}", sol.provenance.version)?;
    writeln!(w, "created {}", opt(sol.provenance.created_unix, |t| t.to_string()))?;
    let d = &sol.diagnostics;
    writeln!(
        w,
        "diagnostics {} {} {} {} {} {}",
        d.backend.name(),
        d.n,
        float(d.condition),
        opt(d.condition_l1, float),
        float(d.residual),
        opt(d.rank, |r| r.to_string())
    )?;
    match &sol.error {
        Some(e) => {
            let q = e.worst.unwrap_or(Point3::new(f64::NAN, f64::NAN, f64::NAN));
            writeln!(
                w,
                "error {} {} {} {} {} {}",
                float(e.e_max),
                float(e.e_r),
                e.j,
                float(q.x),
                float(q.y),
                float(q.z)
            )?;
        }
        None => writeln!(w, "error none")?,
    }
    match &sol.approximant {
        HarmonicApproximant::Mfs {
            alpha,
            sources,
            coefficients,
        } => {
            writeln!(w, "backend mfs {} {}", float(*alpha), sources.len())?;
            for (p, c) in sources.iter().zip(coefficients) {
                writeln!(w, "{} {} {} {}", float(p.x), float(p.y), float(p.z), float(*c))?;
            }
        }
        HarmonicApproximant::Poly {
            degree,
            center,
            coefficients,
        } => {
            writeln!(
                w,
                "backend poly {degree} {} {} {} {}",
                float(center.x),
                float(center.y),
                float(center.z),
                coefficients.len()
            )?;
            for c in coefficients {
                writeln!(w, "{}", float(*c))?;
            }
        }
        HarmonicApproximant::Cheb { order, values } => {
            writeln!(w, "backend cheb {order} {}", values.len())?;
            for v in values {
                writeln!(w, "{}", float(*v))?;
            }
        }
    }
    Ok(())
}

struct Lines<R> {
    inner: std::io::Lines<R>,
    number: usize,
}

impl<R: BufRead> Lines<R> {
    fn fail<T>(&self, message: impl Into<String>) -> Result<T, PipelineError> {
        Err(PipelineError::Format {
            line: self.number,
            message: message.into(),
        })
    }

    fn next(&mut self) -> Result<String, PipelineError> {
        self.number += 1;
        match self.inner.next() {
            Some(line) => Ok(line?),
            None => self.fail("unexpected end of file"),
        }
    }

    /// The rest of a line starting with `key `.
    fn keyed(&mut self, key: &str) -> Result<String, PipelineError> {
        let line = self.next()?;
        match line.strip_prefix(key).and_then(|r| r.strip_prefix(' ')) {
            Some(rest) => Ok(rest.to_string()),
            None => self.fail(format!("expected `{key}`")),
        }
    }

    fn parse<T: std::str::FromStr>(&self, field: &str) -> Result<T, PipelineError> {
        match field.parse() {
            Ok(v) => Ok(v),
            Err(_) => self.fail(format!("cannot parse `{field}`")),
        }
    }

    fn parse_opt<T: std::str::FromStr>(&self, field: &str) -> Result<Option<T>, PipelineError> {
        if field == "none" {
            Ok(None)
        } else {
            self.parse(field).map(Some)
        }
    }

    fn floats(&mut self, count: usize) -> Result<Vec<f64>, PipelineError> {
        let line = self.next()?;
        let v = line
            .split_whitespace()
            .map(|f| self.parse(f))
            .collect::<Result<Vec<f64>, _>>()?;
        if v.len() != count {
            return self.fail(format!("expected {count} numbers, got {}", v.len()));
        }
        Ok(v)
    }
}

pub fn load_solution(r: impl BufRead) -> Result<Solution, PipelineError> {
    let mut lines = Lines {
        inner: r.lines(),
        number: 0,
    };
    if lines.next()? != SOLUTION_MAGIC {
        return lines.fail("not a solution file");
    }
    let spec_json = lines.keyed("spec")?;
    let spec: ProblemSpec = match serde_json::from_str(&spec_json) {
        Ok(s) => s,
        Err(e) => return lines.fail(e.to_string()),
    };
    let version = lines.keyed("version")?;
    let created = lines.keyed("created")?;
    let provenance = Provenance {
        version,
        created_unix: lines.parse_opt(&created)?,
    };

    let diag = lines.keyed("diagnostics")?;
    let f: Vec<&str> = diag.split_whitespace().collect();
    if f.len() != 6 {
        return lines.fail("diagnostics need 6 fields");
    }
    let backend = match f[0] {
        "mfs" => BackendKind::Mfs,
        "poly" => BackendKind::Poly,
        "cheb" => BackendKind::Cheb,
        other => return lines.fail(format!("unknown backend `{other}`")),
    };
    let diagnostics = SolveDiagnostics {
        backend,
        n: lines.parse(f[1])?,
        condition: lines.parse(f[2])?,
        condition_l1: lines.parse_opt(f[3])?,
        residual: lines.parse(f[4])?,
        rank: lines.parse_opt(f[5])?,
    };

    let err = lines.keyed("error")?;
    let error = if err == "none" {
        None
    } else {
        let f: Vec<&str> = err.split_whitespace().collect();
        if f.len() != 6 {
            return lines.fail("error needs 6 fields");
        }
        let worst = Point3::new(lines.parse(f[3])?, lines.parse(f[4])?, lines.parse(f[5])?);
        Some(ErrorReport {
            e_max: lines.parse(f[0])?,
            e_r: lines.parse(f[1])?,
            j: lines.parse(f[2])?,
            worst: worst.is_finite().then_some(worst),
        })
    };

    let head = lines.keyed("backend")?;
    let f: Vec<&str> = head.split_whitespace().collect();
    let approximant = match f.as_slice() {
        ["mfs", alpha, count] => {
            let alpha = lines.parse(alpha)?;
            let count: usize = lines.parse(count)?;
            let mut sources = Vec::with_capacity(count);
            let mut coefficients = Vec::with_capacity(count);
            for _ in 0..count {
                let v = lines.floats(4)?;
                sources.push(Point3::new(v[0], v[1], v[2]));
                coefficients.push(v[3]);
            }
            HarmonicApproximant::Mfs {
                alpha,
                sources,
                coefficients,
            }
        }
        ["poly", degree, cx, cy, cz, count] => {
            let degree = lines.parse(degree)?;
            let center = Point3::new(lines.parse(cx)?, lines.parse(cy)?, lines.parse(cz)?);
            let count: usize = lines.parse(count)?;
            if count != (degree + 1) * (degree + 1) {
                return lines.fail("coefficient count does not match the degree");
            }
            let coefficients = (0..count).map(|_| lines.floats(1).map(|v| v[0])).collect::<Result<_, _>>()?;
            HarmonicApproximant::Poly {
                degree,
                center,
                coefficients,
            }
        }
        ["cheb", order, count] => {
            let order: usize = lines.parse(order)?;
            let count: usize = lines.parse(count)?;
            if count != (order + 1).pow(3) {
                return lines.fail("value count does not match the order");
            }
            let values = (0..count).map(|_| lines.floats(1).map(|v| v[0])).collect::<Result<_, _>>()?;
            HarmonicApproximant::Cheb { order, values }
        }
        _ => return lines.fail("malformed backend header"),
    };
    if approximant.kind() != diagnostics.backend || approximant.kind() != spec.backend.kind() {
        return lines.fail("backend mismatch between sections");
    }
    Ok(Solution {
        spec,
        approximant,
        diagnostics,
        error,
        provenance,
    })
}

impl Solution {
    pub fn save(&self, path: impl AsRef<std::path::Path>) -> Result<(), PipelineError> {
        let mut w = std::io::BufWriter::new(std::fs::File::create(path)?);
        save_solution(self, &mut w)?;
        w.flush()?;
        Ok(())
    }

    pub fn load(path: impl AsRef<std::path::Path>) -> Result<Self, PipelineError> {
        load_solution(std::io::BufReader::new(std::fs::File::open(path)?))
    }
}
