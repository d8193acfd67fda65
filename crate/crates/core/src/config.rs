//! JSON problem-instance configuration.
//!
//! A configuration file describes one Siegel domain together with the
//! optional data the command-line tools consume: a real form, a canonical
//! multiplier parameter with an optional coboundary twist, functionals,
//! evaluation points, quadrature settings, and an RNG seed. Complex
//! numbers are encoded as `[re, im]`, matrices as row-major nested
//! arrays.
//!
//! Invariants:
//! * [`SiegelConfig::validate`] collects every violation, each tagged
//!   with the JSON path of the offending field, instead of stopping at
//!   the first;
//! * a configuration that validates normalizes deterministically to
//!   runtime objects, with documented defaults for the optional fields
//!   (standard real form, `c = 0`, 64 quadrature nodes, seed 0);
//! * serializing and re-parsing a configuration is the identity.

use serde::{Deserialize, Serialize};

use crate::bergman;
use crate::cone::{Cone, Functional};
use crate::error::{Result, SiegelError};
use crate::group::{DomainPoint, SiegelDomain};
use crate::hermitian::{HermitianMap, RealForm};
use crate::multiplier::{CoboundaryTwist, MultiplierSpec};
use crate::{linalg, C64, CMat, CVec, RMat, RVec};

/// Raw JSON shape of a problem instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SiegelConfig {
    #[serde(rename = "N")]
    pub n: usize,
    #[serde(rename = "M")]
    pub m: usize,
    pub cone: ConeSpec,
    /// `N` matrices, each `M × M`, entries `[re, im]`.
    #[serde(rename = "Q")]
    pub q: Vec<Vec<Vec<[f64; 2]>>>,
    /// Real-form basis: `M` complex vectors of length `M`.
    #[serde(rename = "W", default, skip_serializing_if = "Option::is_none")]
    pub w: Option<Vec<Vec<[f64; 2]>>>,
    /// Canonical multiplier parameter, length `M`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c: Option<Vec<[f64; 2]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub twist: Option<TwistSpec>,
    /// Functionals on the base, each of length `N`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub xi: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub points: Option<Vec<PointSpec>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub quadrature: Option<QuadratureSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

/// Cone description: the nonnegative orthant or a simplicial cone with
/// explicit generator columns.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
pub enum ConeSpec {
    Orthant { n: usize },
    /// Row-major `N × N` matrix whose columns generate the cone.
    Simplicial { generators: Vec<Vec<f64>> },
}

/// Coboundary twist `exp(⟨a, z⟩ + ⟨b, u⟩ + const)`; `a` has length `N`,
/// `b` length `M`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TwistSpec {
    pub a: Vec<[f64; 2]>,
    pub b: Vec<[f64; 2]>,
    #[serde(rename = "const")]
    pub constant: [f64; 2],
}

/// Evaluation point `(z, u)` with `z` of length `N` and `u` of length `M`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PointSpec {
    pub z: Vec<[f64; 2]>,
    pub u: Vec<[f64; 2]>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuadratureSpec {
    pub nodes: usize,
}

/// One validation failure, locating the offending field by JSON path.
#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub path: String,
    pub message: String,
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}: {}", self.path, self.message)
    }
}

/// Runtime objects built from a validated configuration.
#[derive(Debug, Clone)]
pub struct NormalizedConfig {
    pub domain: SiegelDomain,
    pub w: RealForm,
    pub c: CVec,
    pub multiplier: MultiplierSpec,
    pub xi: Vec<Functional>,
    pub points: Vec<DomainPoint>,
    pub nodes: usize,
    pub seed: u64,
}

impl NormalizedConfig {
    /// Interior dual functional `A^{−T}·1`, the default when the
    /// configuration lists none.
    pub fn default_xi(&self) -> Functional {
        self.domain.cone().inverse_matrix().transpose() * RVec::from_element(self.domain.n(), 1.0)
    }
}

fn complex(pair: [f64; 2]) -> C64 {
    C64::new(pair[0], pair[1])
}

fn cvec(pairs: &[[f64; 2]]) -> CVec {
    CVec::from_iterator(pairs.len(), pairs.iter().map(|p| complex(*p)))
}

impl SiegelConfig {
    /// Parse a configuration from JSON text.
    pub fn from_json(text: &str) -> Result<SiegelConfig> {
        serde_json::from_str(text)
            .map_err(|e| SiegelError::InvalidInput(format!("configuration parse: {e}")))
    }

    /// The canonical JSON encoding (pretty-printed, stable field order).
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("configuration serializes")
    }

    /// Check every invariant, collecting all violations with their JSON
    /// paths; on success build the runtime objects.
    pub fn validate(&self) -> std::result::Result<NormalizedConfig, Vec<Violation>> {
        let mut violations = Vec::new();
        let mut fail = |path: &str, message: String| {
            violations.push(Violation {
                path: path.to_string(),
                message,
            });
        };

        if self.n == 0 {
            fail("N", "the base dimension must be at least 1".into());
        }

        let cone = match &self.cone {
            ConeSpec::Orthant { n } => {
                if *n != self.n {
                    fail("cone.n", format!("orthant rank {n} does not match N = {}", self.n));
                    None
                } else {
                    Cone::orthant(*n).ok()
                }
            }
            ConeSpec::Simplicial { generators } => {
                let rows = generators.len();
                if rows != self.n || generators.iter().any(|r| r.len() != self.n) {
                    fail(
                        "cone.generators",
                        format!("expected an {0} x {0} row-major matrix", self.n),
                    );
                    None
                } else {
                    let a = RMat::from_fn(self.n, self.n, |i, j| generators[i][j]);
                    match Cone::simplicial(a) {
                        Ok(c) => Some(c),
                        Err(e) => {
                            fail("cone.generators", e.to_string());
                            None
                        }
                    }
                }
            }
        };

        // Component matrices: accept an empty list when M = 0.
        let mut components = Vec::with_capacity(self.q.len());
        if self.q.len() != self.n && !(self.m == 0 && self.q.is_empty()) {
            fail(
                "Q",
                format!("expected {} component matrices, got {}", self.n, self.q.len()),
            );
        } else {
            for (k, rows) in self.q.iter().enumerate() {
                let path = format!("Q[{k}]");
                if rows.len() != self.m || rows.iter().any(|r| r.len() != self.m) {
                    fail(&path, format!("expected an {0} x {0} row-major matrix", self.m));
                    continue;
                }
                let h = CMat::from_fn(self.m, self.m, |i, j| complex(rows[i][j]));
                let defect = linalg::hermitian_defect(&h);
                if defect > 1e-12 * (1.0 + linalg::max_abs(&h)) {
                    fail(&path, format!("matrix is not Hermitian (defect {defect:.3e})"));
                    continue;
                }
                components.push(h);
            }
        }

        let w = match &self.w {
            None => Some(RealForm::standard(self.m)),
            Some(vectors) => {
                if vectors.len() != self.m || vectors.iter().any(|v| v.len() != self.m) {
                    fail(
                        "W",
                        format!("expected {0} basis vectors of length {0}", self.m),
                    );
                    None
                } else {
                    let basis = CMat::from_fn(self.m, self.m, |i, j| complex(vectors[j][i]));
                    match RealForm::new(basis) {
                        Ok(w) => Some(w),
                        Err(e) => {
                            fail("W", e.to_string());
                            None
                        }
                    }
                }
            }
        };

        let c = match &self.c {
            None => Some(CVec::zeros(self.m)),
            Some(values) => {
                if values.len() != self.m {
                    fail("c", format!("expected length {}, got {}", self.m, values.len()));
                    None
                } else {
                    Some(cvec(values))
                }
            }
        };

        let twist = match &self.twist {
            None => None,
            Some(t) => {
                let mut ok = true;
                if t.a.len() != self.n {
                    fail("twist.a", format!("expected length {}, got {}", self.n, t.a.len()));
                    ok = false;
                }
                if t.b.len() != self.m {
                    fail("twist.b", format!("expected length {}, got {}", self.m, t.b.len()));
                    ok = false;
                }
                ok.then(|| CoboundaryTwist::new(cvec(&t.a), cvec(&t.b), complex(t.constant)))
            }
        };

        let mut xi = Vec::new();
        if let Some(list) = &self.xi {
            for (j, v) in list.iter().enumerate() {
                if v.len() != self.n {
                    fail(
                        &format!("xi[{j}]"),
                        format!("expected length {}, got {}", self.n, v.len()),
                    );
                } else {
                    xi.push(RVec::from_vec(v.clone()));
                }
            }
        }

        let mut points = Vec::new();
        if let Some(list) = &self.points {
            for (j, p) in list.iter().enumerate() {
                if p.z.len() != self.n {
                    fail(
                        &format!("points[{j}].z"),
                        format!("expected length {}, got {}", self.n, p.z.len()),
                    );
                } else if p.u.len() != self.m {
                    fail(
                        &format!("points[{j}].u"),
                        format!("expected length {}, got {}", self.m, p.u.len()),
                    );
                } else {
                    points.push(DomainPoint::new(cvec(&p.z), cvec(&p.u)));
                }
            }
        }

        let nodes = match &self.quadrature {
            None => bergman::DEFAULT_NODES,
            Some(q) => {
                if q.nodes < bergman::MIN_NODES {
                    fail(
                        "quadrature.nodes",
                        format!("at least {} nodes required, got {}", bergman::MIN_NODES, q.nodes),
                    );
                }
                q.nodes
            }
        };

        if !violations.is_empty() {
            return Err(violations);
        }

        let cone = cone.expect("violations were empty");
        let q = match HermitianMap::new(self.n, self.m, components) {
            Ok(q) => q,
            Err(e) => {
                return Err(vec![Violation {
                    path: "Q".into(),
                    message: e.to_string(),
                }])
            }
        };
        let domain = match SiegelDomain::new(cone, q) {
            Ok(d) => d,
            Err(e) => {
                return Err(vec![Violation {
                    path: "cone".into(),
                    message: e.to_string(),
                }])
            }
        };
        let c = c.expect("violations were empty");
        let multiplier = match twist {
            None => MultiplierSpec::canonical(c.clone()),
            Some(t) => MultiplierSpec::twisted(c.clone(), t),
        };
        Ok(NormalizedConfig {
            domain,
            w: w.expect("violations were empty"),
            c,
            multiplier,
            xi,
            points,
            nodes,
            seed: self.seed.unwrap_or(0),
        })
    }
}
