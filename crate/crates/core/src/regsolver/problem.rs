use crate::affine::AffineMap;
use crate::cones::{BlockPoint, ConeSpec};
use crate::error::{Error, Result};

/// Standard-form linear conic program
///
/// ```text
/// min ⟨c, x⟩  s.t.  Ax = b,  x ∈ K
/// max bᵀy     s.t.  Aᵀy − u = c,  u ∈ K°
/// ```
///
/// `b` lives in `a.rhs`.
#[derive(Debug, Clone)]
pub struct LinearConicProblem {
    pub c: BlockPoint,
    pub a: AffineMap,
    pub cone: ConeSpec,
}

impl LinearConicProblem {
    pub fn new(c: BlockPoint, a: AffineMap, cone: ConeSpec) -> Result<Self> {
        cone.validate()?;
        if c.len() != cone.ambient_dim() || a.dim() != cone.ambient_dim() {
            return Err(Error::Shape(format!(
                "objective length {} and constraint width {} must equal the cone dimension {}",
                c.len(),
                a.dim(),
                cone.ambient_dim()
            )));
        }
        if a.nrows() == 0 {
            return Err(Error::Input(
                "linear conic problem needs at least one constraint".into(),
            ));
        }
        if c.data.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("objective"));
        }
        a.validate(&cone)?;
        Ok(LinearConicProblem { c, a, cone })
    }

    pub fn b(&self) -> &[f64] {
        &self.a.rhs
    }

    pub fn m(&self) -> usize {
        self.a.nrows()
    }

    /// Primal objective `⟨c, x⟩`.
    pub fn objective(&self, x: &BlockPoint) -> f64 {
        self.c.dot(x)
    }

    /// Dual objective `bᵀy`.
    pub fn dual_objective(&self, y: &[f64]) -> f64 {
        crate::linalg::dot(self.b(), y)
    }
}
