//! Cone descriptions and barrier oracles.
//!
//! Every supported cone carries a logarithmically homogeneous self-concordant
//! barrier with parameter ν. Oracles expose value, gradient, Hessian, third
//! directional derivative, the relative measure σ_x(h), and the maximal
//! feasible step, all in a flat vector embedding (symmetric matrices are
//! stored in scaled svec coordinates so the vector dot product equals the
//! trace inner product).
//!
//! The two 2D example sets (`Disc2d`, `Parabola2d`) are not cones; they carry
//! self-concordant barriers for bounded regions and are only meant to be used
//! as slack-side barriers in the reduced dual geometry.

mod hankel;
mod orthant;
pub mod psd;
mod region2d;
pub mod sampling;
mod soc;

use crate::linalg::{LinalgError, Mat64, SymOperator, Vec64};
use std::fmt;

/// Relative interior margin: a point is treated as strictly interior when its
/// cone margin exceeds this factor times `1 + ‖x‖`. Chosen small enough that
/// slacks of order `μ ≈ 1e-13` (the f64 floor of the solver's superlinear
/// tail) still pass.
pub const INTERIOR_MARGIN_REL: f64 = 1e-14;

/// Relative tolerance of the bisection fallbacks for σ and the maximal step.
pub const BISECTION_REL_TOL: f64 = 1e-10;

/// Margin used by the bisection fallbacks when testing cone membership.
pub const BISECTION_MEMBERSHIP_MARGIN: f64 = 1e-12;

#[derive(Debug, Clone, thiserror::Error, PartialEq)]
pub enum ConeError {
    #[error("point is outside the cone interior")]
    OutsideCone,
    #[error("barrier side {side:?} is not available for {kind}")]
    UnsupportedSide { kind: String, side: Side },
    #[error("no explicit conjugate barrier for {kind}")]
    NoExplicitConjugate { kind: String },
    #[error("σ is undefined: no feasible multiple exists")]
    SigmaUndefined,
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// Which barrier an oracle evaluates: `F` on K or the conjugate `F_*` on K*.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Primal,
    Dual,
}

/// Result of a maximal-step query: the exact boundary parameter, or +∞ when
/// the direction is a recession direction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StepLimit {
    Finite(f64),
    Unbounded,
}

impl StepLimit {
    pub fn finite(self) -> Option<f64> {
        match self {
            StepLimit::Finite(a) => Some(a),
            StepLimit::Unbounded => None,
        }
    }
}

/// Description of a regular cone (or 2D barrier region) in its flat embedding.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ConeDescriptor {
    /// Nonnegative orthant of the given dimension.
    Orthant(usize),
    /// n×n symmetric PSD matrices in scaled svec coordinates (dim n(n+1)/2).
    Psd(usize),
    /// Second-order cone x₀ ≥ ‖x̄‖ in embedding dimension n ≥ 2.
    Soc(usize),
    /// Direct product; embedding is the concatenation of the parts.
    Product(Vec<ConeDescriptor>),
    /// Nonnegative polynomials of the given even degree 2n; the dual cone is
    /// the PSD Hankel matrices of order n+1 and the barrier lives there.
    HankelPoly(usize),
    /// The region y₂ ≥ 0, y₁ ≥ y₂² with barrier −ln(y₁−y₂²) − ln y₂.
    Parabola2d,
    /// The unit disc with barrier −ln(1−‖y‖²).
    Disc2d,
}

impl ConeDescriptor {
    pub fn dim(&self) -> usize {
        match self {
            ConeDescriptor::Orthant(n) => *n,
            ConeDescriptor::Psd(n) => n * (n + 1) / 2,
            ConeDescriptor::Soc(n) => *n,
            ConeDescriptor::Product(parts) => parts.iter().map(|p| p.dim()).sum(),
            ConeDescriptor::HankelPoly(deg) => deg + 1,
            ConeDescriptor::Parabola2d | ConeDescriptor::Disc2d => 2,
        }
    }

    /// Barrier parameter ν (additive over products).
    pub fn barrier_parameter(&self) -> f64 {
        match self {
            ConeDescriptor::Orthant(n) => *n as f64,
            ConeDescriptor::Psd(n) => *n as f64,
            ConeDescriptor::Soc(_) => 2.0,
            ConeDescriptor::Product(parts) => {
                parts.iter().map(|p| p.barrier_parameter()).sum()
            }
            ConeDescriptor::HankelPoly(deg) => (deg / 2 + 1) as f64,
            ConeDescriptor::Parabola2d | ConeDescriptor::Disc2d => 2.0,
        }
    }

    /// True for actual convex cones; the 2D example regions are not cones.
    pub fn is_cone(&self) -> bool {
        match self {
            ConeDescriptor::Parabola2d | ConeDescriptor::Disc2d => false,
            ConeDescriptor::Product(parts) => parts.iter().all(|p| p.is_cone()),
            _ => true,
        }
    }

    pub fn validate(&self) -> Result<(), ConeError> {
        match self {
            ConeDescriptor::Orthant(n) if *n == 0 => Err(ConeError::DimensionMismatch {
                expected: 1,
                got: 0,
            }),
            ConeDescriptor::Psd(n) if *n == 0 => Err(ConeError::DimensionMismatch {
                expected: 1,
                got: 0,
            }),
            ConeDescriptor::Soc(n) if *n < 2 => Err(ConeError::DimensionMismatch {
                expected: 2,
                got: *n,
            }),
            ConeDescriptor::HankelPoly(deg) if *deg == 0 || deg % 2 != 0 => {
                Err(ConeError::DimensionMismatch {
                    expected: 2,
                    got: *deg,
                })
            }
            ConeDescriptor::Product(parts) => {
                if parts.is_empty() {
                    return Err(ConeError::DimensionMismatch {
                        expected: 1,
                        got: 0,
                    });
                }
                parts.iter().try_for_each(|p| p.validate())
            }
            _ => Ok(()),
        }
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            ConeDescriptor::Orthant(_) => "orthant",
            ConeDescriptor::Psd(_) => "psd",
            ConeDescriptor::Soc(_) => "soc",
            ConeDescriptor::Product(_) => "product",
            ConeDescriptor::HankelPoly(_) => "hankel",
            ConeDescriptor::Parabola2d => "parabola2d",
            ConeDescriptor::Disc2d => "disc2d",
        }
    }

    /// Margin to the boundary in the cone's natural measure (min component,
    /// min eigenvalue, SOC slack, ...). Negative outside.
    pub fn margin(&self, x: &Vec64) -> f64 {
        match self {
            ConeDescriptor::Orthant(_) => orthant::margin(x),
            ConeDescriptor::Psd(n) => psd::margin(*n, x),
            ConeDescriptor::Soc(_) => soc::margin(x),
            ConeDescriptor::HankelPoly(deg) => hankel::margin(*deg, x),
            ConeDescriptor::Parabola2d => region2d::parabola_margin(x),
            ConeDescriptor::Disc2d => region2d::disc_margin(x),
            ConeDescriptor::Product(parts) => {
                let mut m = f64::INFINITY;
                let mut off = 0;
                for p in parts {
                    let d = p.dim();
                    m = m.min(p.margin(&x.rows(off, d).into_owned()));
                    off += d;
                }
                m
            }
        }
    }

    /// Strict interior test with the relative margin [`INTERIOR_MARGIN_REL`].
    pub fn is_interior(&self, x: &Vec64) -> bool {
        if x.len() != self.dim() {
            return false;
        }
        match self {
            ConeDescriptor::Product(parts) => {
                let mut off = 0;
                parts.iter().all(|p| {
                    let d = p.dim();
                    let part = x.rows(off, d).into_owned();
                    off += d;
                    p.is_interior(&part)
                })
            }
            _ => self.margin(x) > INTERIOR_MARGIN_REL * (1.0 + x.norm()),
        }
    }

    /// Membership in the closed cone, with an absolute slack for boundary
    /// queries (bisection, Dikin containment tests).
    pub fn contains(&self, x: &Vec64, slack: f64) -> bool {
        if x.len() != self.dim() {
            return false;
        }
        match self {
            ConeDescriptor::Product(parts) => {
                let mut off = 0;
                parts.iter().all(|p| {
                    let d = p.dim();
                    let part = x.rows(off, d).into_owned();
                    off += d;
                    p.contains(&part, slack)
                })
            }
            _ => self.margin(x) >= -slack * (1.0 + x.norm()),
        }
    }
}

impl fmt::Display for ConeDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConeDescriptor::Orthant(n) => write!(f, "orthant({n})"),
            ConeDescriptor::Psd(n) => write!(f, "psd({n})"),
            ConeDescriptor::Soc(n) => write!(f, "soc({n})"),
            ConeDescriptor::HankelPoly(deg) => write!(f, "hankel({deg})"),
            ConeDescriptor::Parabola2d => write!(f, "parabola2d"),
            ConeDescriptor::Disc2d => write!(f, "disc2d"),
            ConeDescriptor::Product(parts) => {
                write!(f, "product(")?;
                for (i, p) in parts.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{p}")?;
                }
                write!(f, ")")
            }
        }
    }
}

/// Parses the textual form produced by `Display`, e.g.
/// `product(orthant(2),soc(3))`. Also accepts compact forms like `psd3`.
pub fn parse_descriptor(text: &str) -> Result<ConeDescriptor, String> {
    let mut p = DescriptorParser {
        chars: text.trim().as_bytes(),
        pos: 0,
    };
    let d = p.parse()?;
    p.skip_ws();
    if p.pos != p.chars.len() {
        return Err(format!("trailing input at byte {}", p.pos));
    }
    d.validate().map_err(|e| e.to_string())?;
    Ok(d)
}

struct DescriptorParser<'a> {
    chars: &'a [u8],
    pos: usize,
}

impl<'a> DescriptorParser<'a> {
    fn skip_ws(&mut self) {
        while self.pos < self.chars.len() && (self.chars[self.pos] as char).is_whitespace() {
            self.pos += 1;
        }
    }

    fn parse(&mut self) -> Result<ConeDescriptor, String> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.chars.len() && (self.chars[self.pos] as char).is_ascii_alphabetic()
        {
            self.pos += 1;
        }
        let name = std::str::from_utf8(&self.chars[start..self.pos]).unwrap();
        if name.is_empty() {
            return Err(format!("expected cone name at byte {start}"));
        }
        // the 2D region names end in a digit, which the name scan stops at
        if matches!(name, "parabola" | "disc") && self.chars[self.pos..].starts_with(b"2d") {
            self.pos += 2;
            return Ok(match name {
                "parabola" => ConeDescriptor::Parabola2d,
                _ => ConeDescriptor::Disc2d,
            });
        }
        if name == "product" {
            self.expect(b'(')?;
            let mut parts = Vec::new();
            loop {
                parts.push(self.parse()?);
                self.skip_ws();
                match self.chars.get(self.pos) {
                    Some(b',') => self.pos += 1,
                    Some(b')') => {
                        self.pos += 1;
                        break;
                    }
                    _ => return Err(format!("expected ',' or ')' at byte {}", self.pos)),
                }
            }
            return Ok(ConeDescriptor::Product(parts));
        }
        let n = self.parse_size()?;
        let d = match name {
            "orthant" => ConeDescriptor::Orthant(n),
            "psd" => ConeDescriptor::Psd(n),
            "soc" => ConeDescriptor::Soc(n),
            "hankel" => ConeDescriptor::HankelPoly(n),
            other => return Err(format!("unknown cone kind '{other}'")),
        };
        Ok(d)
    }

    fn parse_size(&mut self) -> Result<usize, String> {
        self.skip_ws();
        let paren = self.chars.get(self.pos) == Some(&b'(');
        if paren {
            self.pos += 1;
            self.skip_ws();
        }
        let start = self.pos;
        while self.pos < self.chars.len() && (self.chars[self.pos] as char).is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(format!("expected a dimension at byte {start}"));
        }
        let n: usize = std::str::from_utf8(&self.chars[start..self.pos])
            .unwrap()
            .parse()
            .map_err(|e| format!("bad dimension: {e}"))?;
        if paren {
            self.skip_ws();
            self.expect(b')')?;
        }
        Ok(n)
    }

    fn expect(&mut self, ch: u8) -> Result<(), String> {
        self.skip_ws();
        if self.chars.get(self.pos) == Some(&ch) {
            self.pos += 1;
            Ok(())
        } else {
            Err(format!("expected '{}' at byte {}", ch as char, self.pos))
        }
    }
}

/// Evaluator for a ν-normal barrier (or a 2D region barrier) on one side of
/// the cone. Stateless after construction.
#[derive(Debug, Clone)]
pub struct BarrierOracle {
    cone: ConeDescriptor,
    side: Side,
    nu: f64,
}

impl BarrierOracle {
    pub fn new(cone: ConeDescriptor, side: Side) -> Result<Self, ConeError> {
        cone.validate()?;
        if side == Side::Primal && !has_primal_barrier(&cone) {
            return Err(ConeError::UnsupportedSide {
                kind: cone.kind_name().to_string(),
                side,
            });
        }
        let nu = cone.barrier_parameter();
        Ok(BarrierOracle { cone, side, nu })
    }

    /// Oracle for the slack side of a conic problem: the barrier for K*.
    pub fn dual_for(cone: ConeDescriptor) -> Result<Self, ConeError> {
        Self::new(cone, Side::Dual)
    }

    pub fn cone(&self) -> &ConeDescriptor {
        &self.cone
    }

    pub fn side(&self) -> Side {
        self.side
    }

    pub fn nu(&self) -> f64 {
        self.nu
    }

    pub fn dim(&self) -> usize {
        self.cone.dim()
    }

    pub fn is_interior(&self, x: &Vec64) -> bool {
        self.cone.is_interior(x)
    }

    fn require_interior(&self, x: &Vec64) -> Result<(), ConeError> {
        if x.len() != self.dim() {
            return Err(ConeError::DimensionMismatch {
                expected: self.dim(),
                got: x.len(),
            });
        }
        if !self.cone.is_interior(x) {
            return Err(ConeError::OutsideCone);
        }
        Ok(())
    }

    /// Barrier value. For self-dual cones the dual barrier differs from the
    /// primal by the additive constant of the Legendre transform.
    pub fn value(&self, x: &Vec64) -> Result<f64, ConeError> {
        self.require_interior(x)?;
        let v = value_rec(&self.cone, x)?;
        Ok(match self.side {
            Side::Primal => v,
            Side::Dual => v + dual_constant(&self.cone),
        })
    }

    pub fn gradient(&self, x: &Vec64) -> Result<Vec64, ConeError> {
        self.require_interior(x)?;
        gradient_rec(&self.cone, x)
    }

    pub fn hessian(&self, x: &Vec64) -> Result<SymOperator, ConeError> {
        self.require_interior(x)?;
        Ok(SymOperator::from_symmetric(hessian_rec(&self.cone, x)?))
    }

    /// The symmetric operator ∇³F(x)[h].
    pub fn third_directional(&self, x: &Vec64, h: &Vec64) -> Result<SymOperator, ConeError> {
        self.require_interior(x)?;
        if h.len() != self.dim() {
            return Err(ConeError::DimensionMismatch {
                expected: self.dim(),
                got: h.len(),
            });
        }
        Ok(SymOperator::from_symmetric(third_rec(&self.cone, x, h)?))
    }

    /// σ_x(h) = min{ρ ≥ 0 : ρx − h ∈ K}.
    pub fn sigma_measure(&self, x: &Vec64, h: &Vec64) -> Result<f64, ConeError> {
        self.require_interior(x)?;
        if h.len() != self.dim() {
            return Err(ConeError::DimensionMismatch {
                expected: self.dim(),
                got: h.len(),
            });
        }
        sigma_rec(&self.cone, x, h)
    }

    /// sup{α ≥ 0 : x + αd ∈ K}.
    pub fn max_step(&self, x: &Vec64, d: &Vec64) -> Result<StepLimit, ConeError> {
        self.require_interior(x)?;
        if d.len() != self.dim() {
            return Err(ConeError::DimensionMismatch {
                expected: self.dim(),
                got: d.len(),
            });
        }
        max_step_rec(&self.cone, x, d)
    }

    /// −∇F_*(s): the primal point paired with a dual-interior s. Only for
    /// cones with an explicit conjugate barrier.
    pub fn conjugate_point(&self, s: &Vec64) -> Result<Vec64, ConeError> {
        self.require_interior(s)?;
        conjugate_rec(&self.cone, s)
    }
}

fn has_primal_barrier(cone: &ConeDescriptor) -> bool {
    match cone {
        ConeDescriptor::HankelPoly(_) | ConeDescriptor::Parabola2d | ConeDescriptor::Disc2d => {
            false
        }
        ConeDescriptor::Product(parts) => parts.iter().all(has_primal_barrier),
        _ => true,
    }
}

fn dual_constant(cone: &ConeDescriptor) -> f64 {
    match cone {
        ConeDescriptor::Orthant(n) | ConeDescriptor::Psd(n) => -(*n as f64),
        ConeDescriptor::Soc(_) => 2.0 * std::f64::consts::LN_2 - 2.0,
        ConeDescriptor::Product(parts) => parts.iter().map(dual_constant).sum(),
        // The barrier for these is defined directly on the dual-side set.
        ConeDescriptor::HankelPoly(_) | ConeDescriptor::Parabola2d | ConeDescriptor::Disc2d => {
            0.0
        }
    }
}

fn for_each_part<T>(
    parts: &[ConeDescriptor],
    x: &Vec64,
    mut f: impl FnMut(&ConeDescriptor, Vec64, usize) -> Result<T, ConeError>,
) -> Result<Vec<T>, ConeError> {
    let mut out = Vec::with_capacity(parts.len());
    let mut off = 0;
    for p in parts {
        let d = p.dim();
        out.push(f(p, x.rows(off, d).into_owned(), off)?);
        off += d;
    }
    Ok(out)
}

fn value_rec(cone: &ConeDescriptor, x: &Vec64) -> Result<f64, ConeError> {
    match cone {
        ConeDescriptor::Orthant(_) => orthant::value(x),
        ConeDescriptor::Psd(n) => psd::value(*n, x),
        ConeDescriptor::Soc(_) => soc::value(x),
        ConeDescriptor::HankelPoly(deg) => hankel::value(*deg, x),
        ConeDescriptor::Parabola2d => region2d::parabola_value(x),
        ConeDescriptor::Disc2d => region2d::disc_value(x),
        ConeDescriptor::Product(parts) => {
            Ok(for_each_part(parts, x, |p, part, _| value_rec(p, &part))?
                .into_iter()
                .sum())
        }
    }
}

fn gradient_rec(cone: &ConeDescriptor, x: &Vec64) -> Result<Vec64, ConeError> {
    match cone {
        ConeDescriptor::Orthant(_) => orthant::gradient(x),
        ConeDescriptor::Psd(n) => psd::gradient(*n, x),
        ConeDescriptor::Soc(_) => soc::gradient(x),
        ConeDescriptor::HankelPoly(deg) => hankel::gradient(*deg, x),
        ConeDescriptor::Parabola2d => region2d::parabola_gradient(x),
        ConeDescriptor::Disc2d => region2d::disc_gradient(x),
        ConeDescriptor::Product(parts) => {
            let mut g = Vec64::zeros(x.len());
            for_each_part(parts, x, |p, part, off| {
                let gp = gradient_rec(p, &part)?;
                g.rows_mut(off, p.dim()).copy_from(&gp);
                Ok(())
            })?;
            Ok(g)
        }
    }
}

fn hessian_rec(cone: &ConeDescriptor, x: &Vec64) -> Result<Mat64, ConeError> {
    match cone {
        ConeDescriptor::Orthant(_) => orthant::hessian(x),
        ConeDescriptor::Psd(n) => psd::hessian(*n, x),
        ConeDescriptor::Soc(_) => soc::hessian(x),
        ConeDescriptor::HankelPoly(deg) => hankel::hessian(*deg, x),
        ConeDescriptor::Parabola2d => region2d::parabola_hessian(x),
        ConeDescriptor::Disc2d => region2d::disc_hessian(x),
        ConeDescriptor::Product(parts) => {
            let mut h = Mat64::zeros(x.len(), x.len());
            for_each_part(parts, x, |p, part, off| {
                let hp = hessian_rec(p, &part)?;
                h.view_mut((off, off), (p.dim(), p.dim())).copy_from(&hp);
                Ok(())
            })?;
            Ok(h)
        }
    }
}

fn third_rec(cone: &ConeDescriptor, x: &Vec64, h: &Vec64) -> Result<Mat64, ConeError> {
    match cone {
        ConeDescriptor::Orthant(_) => orthant::third(x, h),
        ConeDescriptor::Psd(n) => psd::third(*n, x, h),
        ConeDescriptor::Soc(_) => soc::third(x, h),
        ConeDescriptor::HankelPoly(deg) => hankel::third(*deg, x, h),
        // Only diagnostics consume the region-barrier third derivatives;
        // Richardson-extrapolated differences of the Hessian suffice there.
        ConeDescriptor::Parabola2d => fd_third(region2d::parabola_hessian, x, h),
        ConeDescriptor::Disc2d => fd_third(region2d::disc_hessian, x, h),
        ConeDescriptor::Product(parts) => {
            let mut m = Mat64::zeros(x.len(), x.len());
            for_each_part(parts, x, |p, part, off| {
                let hp = h.rows(off, p.dim()).into_owned();
                let t = third_rec(p, &part, &hp)?;
                m.view_mut((off, off), (p.dim(), p.dim())).copy_from(&t);
                Ok(())
            })?;
            Ok(m)
        }
    }
}

fn sigma_rec(cone: &ConeDescriptor, x: &Vec64, h: &Vec64) -> Result<f64, ConeError> {
    match cone {
        ConeDescriptor::Orthant(_) => orthant::sigma(x, h),
        ConeDescriptor::Psd(n) => psd::sigma(*n, x, h),
        ConeDescriptor::Soc(_) => soc::sigma(x, h),
        ConeDescriptor::HankelPoly(deg) => hankel::sigma(*deg, x, h),
        ConeDescriptor::Disc2d => region2d::disc_sigma(x, h),
        ConeDescriptor::Parabola2d => region2d::parabola_sigma(x, h),
        ConeDescriptor::Product(parts) => {
            let sigmas = for_each_part(parts, x, |p, part, off| {
                let hp = h.rows(off, p.dim()).into_owned();
                sigma_rec(p, &part, &hp)
            })?;
            Ok(sigmas.into_iter().fold(0.0f64, f64::max))
        }
    }
}

fn max_step_rec(cone: &ConeDescriptor, x: &Vec64, d: &Vec64) -> Result<StepLimit, ConeError> {
    match cone {
        ConeDescriptor::Orthant(_) => orthant::max_step(x, d),
        ConeDescriptor::Psd(n) => psd::max_step(*n, x, d),
        ConeDescriptor::Soc(_) => soc::max_step(x, d),
        ConeDescriptor::HankelPoly(deg) => hankel::max_step(*deg, x, d),
        ConeDescriptor::Disc2d => region2d::disc_max_step(x, d),
        ConeDescriptor::Parabola2d => region2d::parabola_max_step(x, d),
        ConeDescriptor::Product(parts) => {
            let steps = for_each_part(parts, x, |p, part, off| {
                let dp = d.rows(off, p.dim()).into_owned();
                max_step_rec(p, &part, &dp)
            })?;
            let mut best = StepLimit::Unbounded;
            for s in steps {
                best = match (best, s) {
                    (StepLimit::Unbounded, s) => s,
                    (b, StepLimit::Unbounded) => b,
                    (StepLimit::Finite(a), StepLimit::Finite(c)) => StepLimit::Finite(a.min(c)),
                };
            }
            Ok(best)
        }
    }
}

fn conjugate_rec(cone: &ConeDescriptor, s: &Vec64) -> Result<Vec64, ConeError> {
    match cone {
        ConeDescriptor::Orthant(_) => orthant::conjugate(s),
        ConeDescriptor::Psd(n) => psd::conjugate(*n, s),
        ConeDescriptor::Soc(_) => soc::conjugate(s),
        ConeDescriptor::Product(parts) => {
            let mut out = Vec64::zeros(s.len());
            for_each_part(parts, s, |p, part, off| {
                let c = conjugate_rec(p, &part)?;
                out.rows_mut(off, p.dim()).copy_from(&c);
                Ok(())
            })?;
            Ok(out)
        }
        other => Err(ConeError::NoExplicitConjugate {
            kind: other.kind_name().to_string(),
        }),
    }
}

/// Richardson-extrapolated central finite difference of the Hessian along h,
/// with base step 1e-4·(1+‖x‖).
fn fd_third(
    hess: impl Fn(&Vec64) -> Result<Mat64, ConeError>,
    x: &Vec64,
    h: &Vec64,
) -> Result<Mat64, ConeError> {
    let hnorm = h.norm();
    if hnorm == 0.0 {
        return Ok(Mat64::zeros(x.len(), x.len()));
    }
    let dir = h / hnorm;
    let mut t = 1e-4 * (1.0 + x.norm());
    let diff = |step: f64| -> Result<Mat64, ConeError> {
        let plus = hess(&(x + &dir * step))?;
        let minus = hess(&(x - &dir * step))?;
        Ok((plus - minus) / (2.0 * step))
    };
    // shrink the step if it reaches past the boundary
    for _ in 0..8 {
        match (diff(t), diff(0.5 * t)) {
            (Ok(d1), Ok(d2)) => {
                // (4 D(t/2) − D(t))/3 cancels the O(t²) term
                return Ok((d2 * 4.0 - d1) * (hnorm / 3.0));
            }
            _ => t *= 0.25,
        }
    }
    Err(ConeError::OutsideCone)
}

/// Bisection fallback for the maximal step; valid for any convex set.
pub fn bisection_max_step(
    contains: impl Fn(&Vec64) -> bool,
    x: &Vec64,
    d: &Vec64,
) -> StepLimit {
    const HUGE: f64 = 1e18;
    let at = |a: f64| x + d * a;
    let mut hi = 1.0;
    while contains(&at(hi)) {
        hi *= 2.0;
        if hi > HUGE {
            return StepLimit::Unbounded;
        }
    }
    let mut lo = 0.0;
    while hi - lo > BISECTION_REL_TOL * (1.0 + hi) {
        let mid = 0.5 * (lo + hi);
        if contains(&at(mid)) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    StepLimit::Finite(0.5 * (lo + hi))
}

/// Bisection fallback for σ on a cone, where feasibility in ρ is upward
/// closed.
pub fn bisection_sigma(
    contains: impl Fn(&Vec64) -> bool,
    x: &Vec64,
    h: &Vec64,
) -> Result<f64, ConeError> {
    let at = |rho: f64| x * rho - h;
    if contains(&at(0.0)) {
        return Ok(0.0);
    }
    let mut hi = 1.0;
    while !contains(&at(hi)) {
        hi *= 2.0;
        if hi > 1e18 {
            return Err(ConeError::SigmaUndefined);
        }
    }
    let mut lo = 0.0;
    while hi - lo > BISECTION_REL_TOL * (1.0 + hi) {
        let mid = 0.5 * (lo + hi);
        if contains(&at(mid)) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Smallest positive root of aα² + bα + c = 0, if any; numerically stable.
pub(crate) fn smallest_positive_root(a: f64, b: f64, c: f64) -> Option<f64> {
    if a.abs() < 1e-300 {
        if b.abs() < 1e-300 {
            return None;
        }
        let r = -c / b;
        return (r > 0.0).then_some(r);
    }
    let disc = b * b - 4.0 * a * c;
    if disc < 0.0 {
        return None;
    }
    let sq = disc.sqrt();
    // q-form avoids cancellation between -b and the square root
    let q = -0.5 * (b + b.signum() * sq);
    let mut roots = [q / a, if q.abs() > 1e-300 { c / q } else { f64::NAN }];
    roots.sort_by(|p, r| p.partial_cmp(r).unwrap_or(std::cmp::Ordering::Equal));
    roots
        .into_iter()
        .find(|r| r.is_finite() && *r > 0.0)
}
