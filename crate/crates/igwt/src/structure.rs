//! Parametric mean and variance structures and the full model
//! specification.
//!
//! A structure maps a generation index to a non-negative real. The same
//! kinds serve as mean structures (parameter vector phi) and variance
//! structures (parameter vector psi).

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::offspring::{MomentPair, NativeParams, OffspringFamily};

/// The closed set of structure kinds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StructureKind {
    /// `a` for every generation.
    Constant,
    /// `a * r^n`.
    Exp,
    /// `a0` at generation 0, `a * r^n` afterwards.
    AnchoredExp,
    /// `a0` at generation 0, `a * r^n + c` afterwards.
    AnchoredExpConst,
}

impl StructureKind {
    /// Number of parameters the kind takes.
    pub fn arity(&self) -> usize {
        match self {
            StructureKind::Constant => 1,
            StructureKind::Exp => 2,
            StructureKind::AnchoredExp => 3,
            StructureKind::AnchoredExpConst => 4,
        }
    }
}

/// A generation-indexed structure: a kind plus its non-negative parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawStructureSpec", into = "RawStructureSpec")]
pub struct StructureSpec {
    kind: StructureKind,
    params: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct RawStructureSpec {
    kind: StructureKind,
    params: Vec<f64>,
}

impl TryFrom<RawStructureSpec> for StructureSpec {
    type Error = Error;

    fn try_from(raw: RawStructureSpec) -> Result<Self> {
        StructureSpec::new(raw.kind, raw.params)
    }
}

impl From<StructureSpec> for RawStructureSpec {
    fn from(spec: StructureSpec) -> Self {
        RawStructureSpec { kind: spec.kind, params: spec.params }
    }
}

impl StructureSpec {
    /// Validates parameter count and non-negativity.
    pub fn new(kind: StructureKind, params: Vec<f64>) -> Result<Self> {
        if params.len() != kind.arity() {
            return Err(Error::InvalidParameter(format!(
                "{kind:?} takes {} parameters, got {}",
                kind.arity(),
                params.len()
            )));
        }
        if let Some(bad) = params.iter().find(|p| !(**p >= 0.0 && p.is_finite())) {
            return Err(Error::InvalidParameter(format!(
                "structure parameters must be finite and non-negative, got {bad}"
            )));
        }
        Ok(StructureSpec { kind, params })
    }

    pub fn constant(a: f64) -> Result<Self> {
        Self::new(StructureKind::Constant, vec![a])
    }

    pub fn exp(a: f64, r: f64) -> Result<Self> {
        Self::new(StructureKind::Exp, vec![a, r])
    }

    pub fn anchored_exp(a0: f64, a: f64, r: f64) -> Result<Self> {
        Self::new(StructureKind::AnchoredExp, vec![a0, a, r])
    }

    pub fn anchored_exp_const(a0: f64, a: f64, r: f64, c: f64) -> Result<Self> {
        Self::new(StructureKind::AnchoredExpConst, vec![a0, a, r, c])
    }

    pub fn kind(&self) -> StructureKind {
        self.kind
    }

    pub fn params(&self) -> &[f64] {
        &self.params
    }

    /// Value at generation `n`.
    pub fn eval(&self, n: u32) -> f64 {
        let p = &self.params;
        match self.kind {
            StructureKind::Constant => p[0],
            StructureKind::Exp => p[0] * p[1].powi(n as i32),
            StructureKind::AnchoredExp => {
                if n == 0 {
                    p[0]
                } else {
                    p[1] * p[2].powi(n as i32)
                }
            }
            StructureKind::AnchoredExpConst => {
                if n == 0 {
                    p[0]
                } else {
                    p[1] * p[2].powi(n as i32) + p[3]
                }
            }
        }
    }

    /// Certifies that, used as a mean structure, the tree is finite with
    /// probability one: some `c < 1` eventually dominates every
    /// generation mean. The condition is sufficient, not necessary, so
    /// `false` means "not certified", never "infinite".
    pub fn certifies_finite(&self) -> bool {
        let p = &self.params;
        match self.kind {
            StructureKind::Constant => p[0] < 1.0,
            StructureKind::Exp => geometric_tail_certified(p[0], p[1]),
            StructureKind::AnchoredExp => geometric_tail_certified(p[1], p[2]),
            StructureKind::AnchoredExpConst => {
                let (a, r, c) = (p[1], p[2], p[3]);
                if a == 0.0 || r < 1.0 {
                    c < 1.0
                } else if r == 1.0 {
                    a + c < 1.0
                } else {
                    false
                }
            }
        }
    }

    /// `sup_{j >= n} eval(j)`; `inf` when the tail is unbounded. Used to
    /// certify geometric tail bounds when truncating infinite sums.
    pub(crate) fn tail_sup(&self, n: u32) -> f64 {
        let p = &self.params;
        match self.kind {
            StructureKind::Constant => p[0],
            StructureKind::Exp => exp_tail_sup(p[0], p[1], n),
            StructureKind::AnchoredExp => {
                let tail = exp_tail_sup(p[1], p[2], n.max(1));
                if n == 0 {
                    p[0].max(tail)
                } else {
                    tail
                }
            }
            StructureKind::AnchoredExpConst => {
                let tail = exp_tail_sup(p[1], p[2], n.max(1)) + p[3];
                if n == 0 {
                    p[0].max(tail)
                } else {
                    tail
                }
            }
        }
    }
}

fn geometric_tail_certified(a: f64, r: f64) -> bool {
    a == 0.0 || r < 1.0 || (r == 1.0 && a < 1.0)
}

fn exp_tail_sup(a: f64, r: f64, n: u32) -> f64 {
    if a == 0.0 {
        0.0
    } else if r > 1.0 {
        f64::INFINITY
    } else {
        a * r.powi(n as i32)
    }
}

/// A full model: per-generation family assignment plus mean and variance
/// structures.
///
/// Feasibility of each generation's (mean, variance) pair for its family
/// is checked lazily, at evaluation or fitting time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelSpec {
    pub default_family: OffspringFamily,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub family_overrides: BTreeMap<u32, OffspringFamily>,
    pub mean: StructureSpec,
    pub variance: StructureSpec,
}

impl ModelSpec {
    /// Offspring family used at generation `n`.
    pub fn family_at(&self, n: u32) -> OffspringFamily {
        self.family_overrides
            .get(&n)
            .copied()
            .unwrap_or(self.default_family)
    }

    /// Offspring mean at generation `n`.
    pub fn mean_at(&self, n: u32) -> f64 {
        self.mean.eval(n)
    }

    /// Offspring variance at generation `n`.
    pub fn variance_at(&self, n: u32) -> f64 {
        self.variance.eval(n)
    }

    /// The (mean, variance) pair at generation `n`.
    pub fn moments_at(&self, n: u32) -> MomentPair {
        MomentPair::new(self.mean_at(n), self.variance_at(n))
    }

    /// Native offspring parameters at generation `n`; fails when the
    /// generation's moments are infeasible for its family.
    pub fn native_at(&self, n: u32) -> Result<NativeParams> {
        let moments = self.moments_at(n);
        self.family_at(n)
            .from_moments(moments)
            .map_err(|_| Error::InfeasibleGeneration {
                generation: n,
                family: self.family_at(n),
                mean: moments.mean,
                variance: moments.variance,
            })
    }

    /// Whether the mean structure certifies an almost-surely finite tree.
    pub fn certifies_finite(&self) -> bool {
        self.mean.certifies_finite()
    }

    /// The built-in six-parameter reference model for low-voltage
    /// distribution-grid topologies: Poisson-zero offspring at the root
    /// generation, geometric-zero elsewhere, mean `1.16 * 0.654^n + 0.613`
    /// (anchored at 3.94) and variance `3.35 * 0.958^n`.
    pub fn reference() -> Self {
        let mut family_overrides = BTreeMap::new();
        family_overrides.insert(0, OffspringFamily::PoissonZero);
        ModelSpec {
            default_family: OffspringFamily::GeometricZero,
            family_overrides,
            mean: StructureSpec::anchored_exp_const(3.94, 1.16, 0.654, 0.613)
                .expect("reference parameters are valid"),
            variance: StructureSpec::exp(3.35, 0.958).expect("reference parameters are valid"),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("model serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eval_examples() {
        let e = StructureSpec::exp(1.0, 0.5).unwrap();
        assert!((e.eval(3) - 0.125).abs() < 1e-15);
        let m = StructureSpec::anchored_exp_const(3.94, 1.16, 0.654, 0.613).unwrap();
        assert!((m.eval(0) - 3.94).abs() < 1e-15);
        assert!((m.eval(1) - 1.37164).abs() < 1e-12); // 1.16 * 0.654 + 0.613
    }

    #[test]
    fn arity_and_negativity_enforced() {
        assert!(StructureSpec::new(StructureKind::Exp, vec![1.0]).is_err());
        assert!(StructureSpec::new(StructureKind::Exp, vec![1.0, -0.5]).is_err());
        assert!(StructureSpec::new(StructureKind::Constant, vec![f64::NAN]).is_err());
    }

    #[test]
    fn finiteness_examples() {
        assert!(StructureSpec::exp(5.0, 0.9).unwrap().certifies_finite());
        // the boundary mu_n = 1 is not certified
        assert!(!StructureSpec::constant(1.0).unwrap().certifies_finite());
        assert!(StructureSpec::constant(0.99).unwrap().certifies_finite());
        assert!(StructureSpec::anchored_exp_const(3.94, 1.16, 0.654, 0.613)
            .unwrap()
            .certifies_finite());
        assert!(!StructureSpec::anchored_exp_const(1.0, 0.5, 1.0, 0.6)
            .unwrap()
            .certifies_finite()); // r = 1 and a + c >= 1
        assert!(StructureSpec::anchored_exp_const(1.0, 0.0, 2.0, 0.5)
            .unwrap()
            .certifies_finite()); // a = 0 hides the growing ratio
        assert!(StructureSpec::exp(0.5, 1.0).unwrap().certifies_finite());
        assert!(!StructureSpec::exp(1.5, 1.0).unwrap().certifies_finite());
        assert!(StructureSpec::exp(0.0, 3.0).unwrap().certifies_finite());
    }

    #[test]
    fn anchor_never_affects_the_tail() {
        for (a, r) in [(0.5, 0.9), (2.0, 1.0), (0.0, 3.0), (1.0, 1.2), (3.0, 0.4)] {
            let plain = StructureSpec::exp(a, r).unwrap();
            for anchor in [0.0, 1.0, 10.0] {
                let anchored = StructureSpec::anchored_exp(anchor, a, r).unwrap();
                assert_eq!(plain.certifies_finite(), anchored.certifies_finite());
            }
        }
    }

    #[test]
    fn eval_is_monotone_in_multiplicative_parameters() {
        let base = StructureSpec::anchored_exp_const(3.0, 1.2, 0.7, 0.5).unwrap();
        for d in 0..4 {
            for n in 0..10 {
                let mut bumped = base.params().to_vec();
                bumped[d] *= 1.1;
                let spec = StructureSpec::new(StructureKind::AnchoredExpConst, bumped).unwrap();
                assert!(spec.eval(n) >= base.eval(n));
            }
        }
        let exp = StructureSpec::exp(2.0, 0.8).unwrap();
        assert!(StructureSpec::exp(2.5, 0.8).unwrap().eval(4) >= exp.eval(4));
        assert!(StructureSpec::exp(2.0, 0.9).unwrap().eval(4) >= exp.eval(4));
    }

    #[test]
    fn tail_sup_bounds_evaluations() {
        let specs = [
            StructureSpec::constant(0.7).unwrap(),
            StructureSpec::exp(2.0, 0.8).unwrap(),
            StructureSpec::anchored_exp(5.0, 1.5, 0.6).unwrap(),
            StructureSpec::anchored_exp_const(3.94, 1.16, 0.654, 0.613).unwrap(),
        ];
        for spec in &specs {
            for n in 0..20 {
                let sup = spec.tail_sup(n);
                for j in n..n + 30 {
                    assert!(spec.eval(j) <= sup + 1e-12, "{spec:?} at {j}");
                }
            }
        }
        assert!(StructureSpec::exp(1.0, 1.1).unwrap().tail_sup(5).is_infinite());
    }

    #[test]
    fn family_assignment() {
        let model = ModelSpec::reference();
        assert_eq!(model.family_at(0), OffspringFamily::PoissonZero);
        assert_eq!(model.family_at(7), OffspringFamily::GeometricZero);
        let uniform = ModelSpec {
            family_overrides: BTreeMap::new(),
            ..ModelSpec::reference()
        };
        assert_eq!(uniform.family_at(0), OffspringFamily::GeometricZero);
    }

    #[test]
    fn reference_model_moments() {
        let model = ModelSpec::reference();
        let m0 = model.moments_at(0);
        assert!((m0.mean - 3.94).abs() < 1e-15);
        assert!((m0.variance - 3.35).abs() < 1e-15);
        let m1 = model.moments_at(1);
        assert!((m1.mean - 1.37164).abs() < 1e-12);
        assert!((m1.variance - 3.2093).abs() < 1e-12);
    }

    #[test]
    fn json_round_trip() {
        let model = ModelSpec::reference();
        let text = model.to_json();
        let back = ModelSpec::from_json(&text).unwrap();
        assert_eq!(model, back);
        // invalid parameters are rejected on the way in
        let bad = r#"{"default_family":"poisson-zero","mean":{"kind":"exp","params":[1.0]},"variance":{"kind":"constant","params":[1.0]}}"#;
        assert!(ModelSpec::from_json(bad).is_err());
    }

    #[test]
    fn zero_mean_structure() {
        let model = ModelSpec {
            default_family: OffspringFamily::PoissonZero,
            family_overrides: BTreeMap::new(),
            mean: StructureSpec::exp(0.0, 0.5).unwrap(),
            variance: StructureSpec::constant(0.0).unwrap(),
        };
        assert_eq!(model.mean_at(1), 0.0);
        assert_eq!(model.mean_at(5), 0.0);
    }
}
