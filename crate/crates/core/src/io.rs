//! The CONEPROB 1 problem format and the CSV trace format.
//!
//! A problem file is line-oriented text:
//!
//! ```text
//! CONEPROB 1
//! cone product(orthant(2),soc(3))
//! a <rows> <cols>
//! <one row of A per line>
//! b <m numbers>
//! c <n numbers>
//! ystart <m numbers>
//! optimum            # optional block
//! ystar <m numbers>
//! sstar <n numbers>
//! xstar <n numbers>  # optional
//! fstar <number>
//! end
//! ```
//!
//! Blank lines and `#` comments are skipped. Floats are written with 17
//! significant digits so write → parse → write is byte-identical.

use crate::cones::parse_descriptor;
use crate::geometry::{ConicProblem, GeometryError, KnownOptimum};
use crate::linalg::{LinearMap, Mat64, Vec64};
use crate::solver::{ConvergenceTrace, IterateRecord};
use std::path::Path;

#[derive(Debug, thiserror::Error)]
pub enum ParseError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("line {line}: dimension mismatch: {message}")]
    DimensionMismatch { line: usize, message: String },
    #[error("start point is not strictly dual feasible")]
    InfeasibleStart,
    #[error("invalid problem data: {0}")]
    Invalid(GeometryError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl From<GeometryError> for ParseError {
    fn from(e: GeometryError) -> Self {
        match e {
            GeometryError::InfeasibleStart => ParseError::InfeasibleStart,
            other => ParseError::Invalid(other),
        }
    }
}

/// Formats a float with 17 significant digits (round-trips exactly in f64).
pub fn fmt_float(v: f64) -> String {
    format!("{v:.16e}")
}

struct Lines<'a> {
    lines: Vec<(usize, &'a str)>,
    pos: usize,
}

impl<'a> Lines<'a> {
    fn new(text: &'a str) -> Self {
        let lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
            .collect();
        Lines { lines, pos: 0 }
    }

    fn next(&mut self) -> Option<(usize, &'a str)> {
        let item = self.lines.get(self.pos).copied();
        self.pos += 1;
        item
    }

    fn peek(&self) -> Option<(usize, &'a str)> {
        self.lines.get(self.pos).copied()
    }

    fn expect(&mut self, what: &str) -> Result<(usize, &'a str), ParseError> {
        self.next().ok_or_else(|| ParseError::Syntax {
            line: self.lines.last().map_or(0, |(n, _)| *n) + 1,
            message: format!("unexpected end of file, expected {what}"),
        })
    }
}

fn parse_floats(line: usize, text: &str, expected: usize) -> Result<Vec64, ParseError> {
    let vals: Result<Vec<f64>, _> = text.split_whitespace().map(str::parse::<f64>).collect();
    let vals = vals.map_err(|e| ParseError::Syntax {
        line,
        message: format!("bad number: {e}"),
    })?;
    if vals.len() != expected {
        return Err(ParseError::DimensionMismatch {
            line,
            message: format!("expected {expected} values, got {}", vals.len()),
        });
    }
    Ok(Vec64::from_vec(vals))
}

fn keyword_line<'a>(
    lines: &mut Lines<'a>,
    keyword: &str,
) -> Result<(usize, &'a str), ParseError> {
    let (n, l) = lines.expect(keyword)?;
    match l.strip_prefix(keyword) {
        Some(rest) if l.len() == keyword.len() || rest.starts_with(char::is_whitespace) => {
            Ok((n, rest.trim()))
        }
        _ => Err(ParseError::Syntax {
            line: n,
            message: format!("expected '{keyword}', found '{l}'"),
        }),
    }
}

/// Parses a CONEPROB document; verifies strict feasibility of the start
/// point through [`ConicProblem::new`].
pub fn parse_problem(text: &str) -> Result<(ConicProblem, Option<KnownOptimum>), ParseError> {
    let mut lines = Lines::new(text);
    let (n0, header) = lines.expect("CONEPROB 1 header")?;
    if header != "CONEPROB 1" {
        return Err(ParseError::Syntax {
            line: n0,
            message: format!("expected 'CONEPROB 1' header, found '{header}'"),
        });
    }
    let (nc, cone_text) = keyword_line(&mut lines, "cone")?;
    let cone = parse_descriptor(cone_text).map_err(|m| ParseError::Syntax {
        line: nc,
        message: m,
    })?;
    let (na, dims) = keyword_line(&mut lines, "a")?;
    let dims: Vec<usize> = dims
        .split_whitespace()
        .map(|t| t.parse())
        .collect::<Result<_, _>>()
        .map_err(|e| ParseError::Syntax {
            line: na,
            message: format!("bad matrix dimensions: {e}"),
        })?;
    let [m, n] = dims[..] else {
        return Err(ParseError::Syntax {
            line: na,
            message: "expected 'a <rows> <cols>'".into(),
        });
    };
    if cone.dim() != n {
        return Err(ParseError::DimensionMismatch {
            line: na,
            message: format!("cone dimension {} does not match cols {n}", cone.dim()),
        });
    }
    let mut a = Mat64::zeros(m, n);
    for i in 0..m {
        let (nr, row) = lines.expect("matrix row")?;
        a.row_mut(i).copy_from(&parse_floats(nr, row, n)?.transpose());
    }
    let (nb, b_text) = keyword_line(&mut lines, "b")?;
    let b = parse_floats(nb, b_text, m)?;
    let (ncv, c_text) = keyword_line(&mut lines, "c")?;
    let c = parse_floats(ncv, c_text, n)?;
    let (ny, y_text) = keyword_line(&mut lines, "ystart")?;
    let y_start = parse_floats(ny, y_text, m)?;

    let mut optimum = None;
    if let Some((no, l)) = lines.peek() {
        if l == "optimum" {
            lines.next();
            let mut y_star = None;
            let mut s_star = None;
            let mut x_star = None;
            let mut f_star = None;
            loop {
                let (nl, l) = lines.expect("optimum entry or 'end'")?;
                if l == "end" {
                    break;
                }
                let (key, rest) = l.split_once(char::is_whitespace).ok_or_else(|| {
                    ParseError::Syntax {
                        line: nl,
                        message: format!("expected 'key values', found '{l}'"),
                    }
                })?;
                match key {
                    "ystar" => y_star = Some(parse_floats(nl, rest, m)?),
                    "sstar" => s_star = Some(parse_floats(nl, rest, n)?),
                    "xstar" => x_star = Some(parse_floats(nl, rest, n)?),
                    "fstar" => f_star = Some(parse_floats(nl, rest, 1)?[0]),
                    other => {
                        return Err(ParseError::Syntax {
                            line: nl,
                            message: format!("unknown optimum key '{other}'"),
                        })
                    }
                }
            }
            let y_star = y_star.ok_or(ParseError::Syntax {
                line: no,
                message: "optimum block requires 'ystar'".into(),
            })?;
            let f_star = f_star.unwrap_or_else(|| b.dot(&y_star));
            let s_star = s_star.unwrap_or_else(|| &c - a.transpose() * &y_star);
            optimum = Some(KnownOptimum {
                y_star,
                s_star,
                x_star,
                f_star,
            });
        }
    }
    if let Some((nl, l)) = lines.next() {
        return Err(ParseError::Syntax {
            line: nl,
            message: format!("unexpected trailing content '{l}'"),
        });
    }
    let problem = ConicProblem::new(LinearMap::new(a), b, c, cone, y_start)?;
    Ok((problem, optimum))
}

/// Serializes a problem (plus optional optimum) in the CONEPROB format.
pub fn write_problem(problem: &ConicProblem, optimum: Option<&KnownOptimum>) -> String {
    let mut out = String::new();
    out.push_str("CONEPROB 1\n");
    out.push_str(&format!("cone {}\n", problem.cone()));
    let a = problem.a().matrix();
    out.push_str(&format!("a {} {}\n", a.nrows(), a.ncols()));
    for i in 0..a.nrows() {
        let row: Vec<String> = (0..a.ncols()).map(|j| fmt_float(a[(i, j)])).collect();
        out.push_str(&row.join(" "));
        out.push('\n');
    }
    out.push_str(&format!("b {}\n", join_floats(problem.b())));
    out.push_str(&format!("c {}\n", join_floats(problem.c())));
    out.push_str(&format!("ystart {}\n", join_floats(problem.y_start())));
    if let Some(opt) = optimum {
        out.push_str("optimum\n");
        out.push_str(&format!("ystar {}\n", join_floats(&opt.y_star)));
        out.push_str(&format!("sstar {}\n", join_floats(&opt.s_star)));
        if let Some(x) = &opt.x_star {
            out.push_str(&format!("xstar {}\n", join_floats(x)));
        }
        out.push_str(&format!("fstar {}\n", fmt_float(opt.f_star)));
        out.push_str("end\n");
    }
    out
}

fn join_floats(v: &Vec64) -> String {
    v.iter()
        .map(|x| fmt_float(*x))
        .collect::<Vec<_>>()
        .join(" ")
}

/// Atomic write: temp file in the target directory, then rename.
pub fn write_file_atomic(path: &Path, contents: &str) -> std::io::Result<()> {
    let dir = path.parent().unwrap_or_else(|| Path::new("."));
    let tmp = dir.join(format!(
        ".{}.tmp",
        path.file_name().map_or("out".into(), |n| n.to_string_lossy())
    ));
    std::fs::write(&tmp, contents)?;
    std::fs::rename(&tmp, path)
}

pub const TRACE_HEADER: &str =
    "k,mu,alpha_bar,alpha,i_k,gamma_pre,gamma_post,corrector_steps,dual_obj,gap_bound";

/// One CSV row of a trace file.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceRow {
    pub k: usize,
    pub mu: f64,
    pub alpha_bar: f64,
    pub alpha: f64,
    pub i_k: usize,
    pub gamma_pre: f64,
    pub gamma_post: f64,
    pub corrector_steps: usize,
    pub dual_obj: f64,
    pub gap_bound: f64,
}

impl From<&IterateRecord> for TraceRow {
    fn from(r: &IterateRecord) -> Self {
        TraceRow {
            k: r.k,
            mu: r.mu,
            alpha_bar: r.alpha_bar,
            alpha: r.alpha,
            i_k: r.trial_index,
            gamma_pre: r.gamma_pre,
            gamma_post: r.gamma_post,
            corrector_steps: r.corrector_steps,
            dual_obj: r.dual_objective,
            gap_bound: r.gap_bound,
        }
    }
}

pub fn write_trace_csv(trace: &ConvergenceTrace) -> String {
    let mut out = String::from(TRACE_HEADER);
    out.push('\n');
    for r in &trace.records {
        let row = TraceRow::from(r);
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{}\n",
            row.k,
            fmt_float(row.mu),
            fmt_float(row.alpha_bar),
            fmt_float(row.alpha),
            row.i_k,
            fmt_float(row.gamma_pre),
            fmt_float(row.gamma_post),
            row.corrector_steps,
            fmt_float(row.dual_obj),
            fmt_float(row.gap_bound),
        ));
    }
    out
}

pub fn parse_trace_csv(text: &str) -> Result<Vec<TraceRow>, ParseError> {
    let mut rows = Vec::new();
    let mut lines = text.lines().enumerate();
    let (_, header) = lines.next().ok_or(ParseError::Syntax {
        line: 1,
        message: "empty trace file".into(),
    })?;
    if header.trim() != TRACE_HEADER {
        return Err(ParseError::Syntax {
            line: 1,
            message: format!("bad trace header '{header}'"),
        });
    }
    for (i, line) in lines {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 10 {
            return Err(ParseError::Syntax {
                line: i + 1,
                message: format!("expected 10 fields, got {}", fields.len()),
            });
        }
        let pu = |s: &str| -> Result<usize, ParseError> {
            s.parse().map_err(|e| ParseError::Syntax {
                line: i + 1,
                message: format!("bad integer: {e}"),
            })
        };
        let pf = |s: &str| -> Result<f64, ParseError> {
            s.parse().map_err(|e| ParseError::Syntax {
                line: i + 1,
                message: format!("bad float: {e}"),
            })
        };
        rows.push(TraceRow {
            k: pu(fields[0])?,
            mu: pf(fields[1])?,
            alpha_bar: pf(fields[2])?,
            alpha: pf(fields[3])?,
            i_k: pu(fields[4])?,
            gamma_pre: pf(fields[5])?,
            gamma_post: pf(fields[6])?,
            corrector_steps: pu(fields[7])?,
            dual_obj: pf(fields[8])?,
            gap_bound: pf(fields[9])?,
        });
    }
    Ok(rows)
}
