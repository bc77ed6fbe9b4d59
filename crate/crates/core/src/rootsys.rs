//! Root systems, their reflection groups and multiplicity functions.
//!
//! Three concrete families are supported: the rank-one system `{e_1}` in R,
//! the product group Z₂^d with roots `e_i`, and the symmetric group acting on
//! R^d with roots `e_i − e_j` (i < j). Roots and multiplicities are stored as
//! exact rationals; floating copies are cached for numeric evaluation.

use std::fmt;
use std::str::FromStr;

use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::rational::{self, Rational};

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum GroupKind {
    Rank1,
    Z2Power(usize),
    SymmetricGroup(usize),
}

impl GroupKind {
    pub fn dimension(&self) -> usize {
        match self {
            GroupKind::Rank1 => 1,
            GroupKind::Z2Power(d) | GroupKind::SymmetricGroup(d) => *d,
        }
    }

    /// Number of independent multiplicity parameters (one per root orbit).
    pub fn orbit_count(&self) -> usize {
        match self {
            GroupKind::Rank1 | GroupKind::SymmetricGroup(_) => 1,
            GroupKind::Z2Power(d) => *d,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Capabilities {
    pub symbolic: bool,
    /// A closed-form kernel E_k (and hence K, Q, m_k quadrature) is available.
    pub kernel_numeric: bool,
}

#[derive(Clone, Debug)]
pub struct Root {
    pub vector: Vec<Rational>,
    pub norm_sq: Rational,
    pub multiplicity: Rational,
    vector_f64: Vec<f64>,
    norm_sq_f64: f64,
    multiplicity_f64: f64,
}

impl Root {
    fn new(vector: Vec<Rational>, multiplicity: Rational) -> Self {
        let norm_sq = vector.iter().map(|c| c * c).fold(Rational::zero(), |a, b| a + b);
        let vector_f64 = vector.iter().map(rational::to_f64).collect();
        let norm_sq_f64 = rational::to_f64(&norm_sq);
        let multiplicity_f64 = rational::to_f64(&multiplicity);
        Root { vector, norm_sq, multiplicity, vector_f64, norm_sq_f64, multiplicity_f64 }
    }

    pub fn vector_f64(&self) -> &[f64] {
        &self.vector_f64
    }

    pub fn norm_sq_f64(&self) -> f64 {
        self.norm_sq_f64
    }

    pub fn multiplicity_f64(&self) -> f64 {
        self.multiplicity_f64
    }

    /// α*(x) = ⟨α, x⟩.
    pub fn pair(&self, x: &[f64]) -> f64 {
        self.vector_f64.iter().zip(x).map(|(a, b)| a * b).sum()
    }

    pub fn pair_exact(&self, x: &[Rational]) -> Rational {
        self.vector.iter().zip(x).fold(Rational::zero(), |acc, (a, b)| acc + a * b)
    }
}

/// Immutable after construction.
#[derive(Clone, Debug)]
pub struct RootSystem {
    kind: GroupKind,
    dim: usize,
    roots: Vec<Root>,
    orbit_multiplicities: Vec<Rational>,
    capabilities: Capabilities,
}

impl RootSystem {
    pub fn build(kind: GroupKind, multiplicities: &[Rational]) -> Result<Self> {
        let dim = kind.dimension();
        if dim == 0 {
            return Err(Error::InvalidDimension("dimension must be positive".into()));
        }
        if let GroupKind::SymmetricGroup(d) = kind {
            if d < 2 {
                return Err(Error::UnsupportedGroup(format!(
                    "symmetric group on R^{d} has no roots; need d >= 2"
                )));
            }
        }
        if multiplicities.len() != kind.orbit_count() {
            return Err(Error::InvalidMultiplicity(format!(
                "{kind:?} takes {} multiplicities, got {}",
                kind.orbit_count(),
                multiplicities.len()
            )));
        }
        if let Some(k) = multiplicities.iter().find(|k| k.is_negative()) {
            return Err(Error::InvalidMultiplicity(format!(
                "multiplicities must be nonnegative, got {}",
                rational::format(k)
            )));
        }

        let unit = |i: usize| -> Vec<Rational> {
            (0..dim).map(|j| if i == j { Rational::one() } else { Rational::zero() }).collect()
        };
        let roots: Vec<Root> = match kind {
            GroupKind::Rank1 => vec![Root::new(unit(0), multiplicities[0].clone())],
            GroupKind::Z2Power(d) => {
                (0..d).map(|i| Root::new(unit(i), multiplicities[i].clone())).collect()
            }
            GroupKind::SymmetricGroup(d) => {
                let mut out = Vec::new();
                for i in 0..d {
                    for j in i + 1..d {
                        let v: Vec<Rational> = (0..d)
                            .map(|l| {
                                if l == i {
                                    Rational::one()
                                } else if l == j {
                                    -Rational::one()
                                } else {
                                    Rational::zero()
                                }
                            })
                            .collect();
                        out.push(Root::new(v, multiplicities[0].clone()));
                    }
                }
                out
            }
        };
        let capabilities = Capabilities {
            symbolic: true,
            kernel_numeric: matches!(kind, GroupKind::Rank1 | GroupKind::Z2Power(_)),
        };
        let rs = RootSystem {
            kind,
            dim,
            roots,
            orbit_multiplicities: multiplicities.to_vec(),
            capabilities,
        };
        rs.validate()?;
        Ok(rs)
    }

    fn validate(&self) -> Result<()> {
        for (i, a) in self.roots.iter().enumerate() {
            if a.norm_sq.is_zero() {
                return Err(Error::UnsupportedGroup(format!("root {i} is zero")));
            }
            for b in &self.roots[i + 1..] {
                if parallel(&a.vector, &b.vector) {
                    return Err(Error::UnsupportedGroup("parallel positive roots".into()));
                }
            }
        }
        Ok(())
    }

    pub fn kind(&self) -> &GroupKind {
        &self.kind
    }

    pub fn dimension(&self) -> usize {
        self.dim
    }

    pub fn roots(&self) -> &[Root] {
        &self.roots
    }

    pub fn root(&self, index: usize) -> Result<&Root> {
        self.roots.get(index).ok_or(Error::RootIndex { index, count: self.roots.len() })
    }

    pub fn num_positive_roots(&self) -> usize {
        self.roots.len()
    }

    pub fn capabilities(&self) -> Capabilities {
        self.capabilities
    }

    pub fn orbit_multiplicities(&self) -> &[Rational] {
        &self.orbit_multiplicities
    }

    /// γ = Σ_{α∈R₊} k(α).
    pub fn gamma(&self) -> Rational {
        self.roots.iter().fold(Rational::zero(), |acc, r| acc + &r.multiplicity)
    }

    pub fn gamma_f64(&self) -> f64 {
        rational::to_f64(&self.gamma())
    }

    /// The comparison constant 1 + 2γ|R₊| between ‖Tf‖² and Γ_k(f).
    pub fn gradient_constant(&self) -> Rational {
        Rational::one()
            + Rational::from_integer(2.into()) * self.gamma() * Rational::from_integer(self.roots.len().into())
    }

    /// Per-axis multiplicities for the product families (rank one and Z₂^d).
    pub fn axis_multiplicities(&self) -> Result<Vec<Rational>> {
        match self.kind {
            GroupKind::Rank1 | GroupKind::Z2Power(_) => {
                Ok(self.roots.iter().map(|r| r.multiplicity.clone()).collect())
            }
            GroupKind::SymmetricGroup(_) => Err(Error::Capability(
                "per-axis multiplicities exist only for product groups".into(),
            )),
        }
    }

    pub fn require_kernel(&self) -> Result<()> {
        if self.capabilities.kernel_numeric {
            Ok(())
        } else {
            Err(Error::Capability(format!(
                "{} has no closed-form Dunkl kernel; only the symbolic path is available",
                self.label()
            )))
        }
    }

    /// σ_α x = x − 2⟨α,x⟩/⟨α,α⟩ α.
    pub fn reflect(&self, index: usize, x: &[f64]) -> Result<Vec<f64>> {
        let root = self.root(index)?;
        self.check_point(x.len())?;
        let c = 2.0 * root.pair(x) / root.norm_sq_f64;
        Ok(x.iter().zip(root.vector_f64()).map(|(xi, ai)| xi - c * ai).collect())
    }

    pub fn reflect_exact(&self, index: usize, x: &[Rational]) -> Result<Vec<Rational>> {
        let root = self.root(index)?;
        self.check_point(x.len())?;
        let c = Rational::from_integer(2.into()) * root.pair_exact(x) / &root.norm_sq;
        Ok(x.iter().zip(&root.vector).map(|(xi, ai)| xi - &c * ai).collect())
    }

    /// ω_k(x) = Π |⟨α,x⟩|^{2k(α)}.
    pub fn weight(&self, x: &[f64]) -> f64 {
        self.roots
            .iter()
            .map(|r| {
                if r.multiplicity.is_zero() {
                    1.0
                } else {
                    r.pair(x).abs().powf(2.0 * r.multiplicity_f64)
                }
            })
            .product()
    }

    /// Partition of the positive roots into orbits of the generated reflection group.
    pub fn orbits(&self) -> Vec<Vec<usize>> {
        let n = self.roots.len();
        let mut label: Vec<Option<usize>> = vec![None; n];
        let mut orbits = Vec::new();
        for start in 0..n {
            if label[start].is_some() {
                continue;
            }
            let id = orbits.len();
            let mut members = vec![start];
            label[start] = Some(id);
            let mut queue = vec![start];
            while let Some(i) = queue.pop() {
                for s in 0..n {
                    let image = self
                        .reflect_exact(s, &self.roots[i].vector)
                        .expect("indices in range");
                    if let Some(j) = self.find_root_up_to_sign(&image) {
                        if label[j].is_none() {
                            label[j] = Some(id);
                            members.push(j);
                            queue.push(j);
                        }
                    }
                }
            }
            members.sort_unstable();
            orbits.push(members);
        }
        orbits
    }

    /// True when every reflection maps ±R₊ into itself and k is constant on orbits.
    pub fn is_reflection_invariant(&self) -> bool {
        for s in 0..self.roots.len() {
            for r in &self.roots {
                let image = self.reflect_exact(s, &r.vector).expect("indices in range");
                if self.find_root_up_to_sign(&image).is_none() {
                    return false;
                }
            }
        }
        self.orbits().iter().all(|orbit| {
            orbit.iter().all(|&i| self.roots[i].multiplicity == self.roots[orbit[0]].multiplicity)
        })
    }

    fn find_root_up_to_sign(&self, v: &[Rational]) -> Option<usize> {
        self.roots.iter().position(|r| {
            r.vector.iter().zip(v).all(|(a, b)| a == b) || r.vector.iter().zip(v).all(|(a, b)| *a == -b)
        })
    }

    /// Same system with root `i` replaced by `factors[i]·α_i`. Every operator
    /// depends only on k(α)⟨α,ξ⟩/α*, so the result must act identically.
    pub fn rescaled(&self, factors: &[Rational]) -> Result<Self> {
        if factors.len() != self.roots.len() {
            return Err(Error::InvalidArgument("one scale factor per positive root".into()));
        }
        if factors.iter().any(|f| f.is_zero()) {
            return Err(Error::InvalidArgument("scale factors must be nonzero".into()));
        }
        let roots = self
            .roots
            .iter()
            .zip(factors)
            .map(|(r, f)| Root::new(r.vector.iter().map(|c| c * f).collect(), r.multiplicity.clone()))
            .collect();
        Ok(RootSystem { roots, ..self.clone() })
    }

    /// Same group with every multiplicity multiplied by `factor`.
    pub fn with_scaled_multiplicities(&self, factor: &Rational) -> Result<Self> {
        let ks: Vec<Rational> = self.orbit_multiplicities.iter().map(|k| k * factor).collect();
        RootSystem::build(self.kind.clone(), &ks)
    }

    pub fn spec(&self) -> GroupSpec {
        GroupSpec { kind: self.kind.clone(), multiplicities: self.orbit_multiplicities.clone() }
    }

    /// Canonical group string, e.g. `z2:2:k=1,1/2`.
    pub fn label(&self) -> String {
        self.spec().to_string()
    }

    fn check_point(&self, len: usize) -> Result<()> {
        if len == self.dim {
            Ok(())
        } else {
            Err(Error::DimensionMismatch { expected: self.dim, found: len })
        }
    }
}

fn parallel(a: &[Rational], b: &[Rational]) -> bool {
    // a ∥ b iff all 2x2 minors vanish
    for i in 0..a.len() {
        for j in i + 1..a.len() {
            if &a[i] * &b[j] != &a[j] * &b[i] {
                return false;
            }
        }
    }
    true
}

/// Group specification as used on the command line:
/// `rank1:k=1`, `z2:2:k=1,0.5`, `sym:3:k=1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupSpec {
    pub kind: GroupKind,
    pub multiplicities: Vec<Rational>,
}

impl GroupSpec {
    pub fn build(&self) -> Result<RootSystem> {
        RootSystem::build(self.kind.clone(), &self.multiplicities)
    }

    /// Same family, every multiplicity set to `k`.
    pub fn with_uniform_multiplicity(&self, k: &Rational) -> GroupSpec {
        GroupSpec { kind: self.kind.clone(), multiplicities: vec![k.clone(); self.kind.orbit_count()] }
    }
}

impl FromStr for GroupSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = |why: &str| Error::Parse(format!("group spec {s:?}: {why}"));
        let parts: Vec<&str> = s.trim().split(':').collect();
        let (kind, kpart) = match parts.as_slice() {
            ["rank1", k] => (GroupKind::Rank1, *k),
            [family @ ("z2" | "sym"), d, k] => {
                let d: usize = d.parse().map_err(|_| bad("dimension is not an integer"))?;
                if d == 0 {
                    return Err(bad("dimension must be positive"));
                }
                let kind = if *family == "z2" { GroupKind::Z2Power(d) } else { GroupKind::SymmetricGroup(d) };
                (kind, *k)
            }
            _ => return Err(bad("expected rank1:k=.., z2:<d>:k=.. or sym:<d>:k=..")),
        };
        let values = kpart.strip_prefix("k=").ok_or_else(|| bad("missing k="))?;
        let multiplicities = values
            .split(',')
            .map(rational::parse)
            .collect::<Result<Vec<_>>>()
            .map_err(|e| bad(&e.to_string()))?;
        if multiplicities.len() != kind.orbit_count() {
            return Err(bad(&format!(
                "expected {} multiplicities, got {}",
                kind.orbit_count(),
                multiplicities.len()
            )));
        }
        Ok(GroupSpec { kind, multiplicities })
    }
}

impl fmt::Display for GroupSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let ks: Vec<String> = self.multiplicities.iter().map(rational::format).collect();
        match self.kind {
            GroupKind::Rank1 => write!(f, "rank1:k={}", ks.join(",")),
            GroupKind::Z2Power(d) => write!(f, "z2:{d}:k={}", ks.join(",")),
            GroupKind::SymmetricGroup(d) => write!(f, "sym:{d}:k={}", ks.join(",")),
        }
    }
}
