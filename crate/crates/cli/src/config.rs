//! Experiment configuration: one JSON document, validated against module
//! preconditions before any computation runs.

use anyhow::{anyhow, bail, Context, Result};
use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use wco_core::{Automorphism, MultiIndex, Point, SiegelPoint, SpaceParams, Symbol};

/// Complex number as a `[re, im]` pair in JSON.
pub type Cx = (f64, f64);

pub fn cx(v: Cx) -> Complex64 {
    Complex64::new(v.0, v.1)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SpaceConfig {
    pub n: usize,
    pub gamma: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum AutomorphismConfig {
    /// phi(z) = ((z1+s)/(1+s z1), U sqrt(1-s^2) z'/(1+s z1)).
    Canonical { s: f64, unitary: Option<Vec<Vec<Cx>>> },
    /// Canonical map conjugated by the involution exchanging 0 and `a`.
    InvolutionConjugated { s: f64, a: Vec<Cx>, unitary: Option<Vec<Vec<Cx>>> },
    /// Parabolic map fixing e1: Cayley conjugate of the Siegel translation
    /// by the boundary point `a` with rotation part `unitary`.
    ParabolicTranslation { a: Vec<Cx>, unitary: Option<Vec<Vec<Cx>>> },
    /// z -> U z.
    Unitary { matrix: Vec<Vec<Cx>> },
    /// Raw projective (N+1)x(N+1) matrix, validated for ball preservation.
    Matrix { matrix: Vec<Vec<Cx>> },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SymbolTerm {
    pub exponents: Vec<usize>,
    pub coeff: Cx,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub space: SpaceConfig,
    pub automorphism: AutomorphismConfig,
    /// Polynomial weight symbol as sparse monomial terms (default: 1).
    pub symbol: Option<Vec<SymbolTerm>>,
    /// Truncation degree for matrix/series commands.
    pub degree: Option<usize>,
    /// Iteration depth for cocycle-limit.
    pub n_max: Option<usize>,
    /// Sphere sample count.
    pub samples: Option<usize>,
    /// Window length for witness-parabolic.
    pub m: Option<usize>,
    /// Spectral parameter for witness commands.
    pub lambda: Option<Cx>,
    /// Two-sided term count for witness-forward / witness-adjoint.
    pub k_terms: Option<usize>,
    pub seed: Option<u64>,
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).context("failed to parse the experiment configuration")
    }

    pub fn space(&self) -> Result<SpaceParams> {
        SpaceParams::new(self.space.n, self.space.gamma).map_err(|e| anyhow!("{e}"))
    }

    pub fn symbol(&self) -> Result<Symbol> {
        let n = self.space.n;
        match &self.symbol {
            None => Ok(Symbol::constant(n, Complex64::ONE)),
            Some(terms) => {
                let parsed: Vec<(MultiIndex, Complex64)> = terms
                    .iter()
                    .map(|t| {
                        if t.exponents.len() != n {
                            bail!(
                                "symbol term has {} exponents, expected {n}",
                                t.exponents.len()
                            );
                        }
                        Ok((MultiIndex::new(t.exponents.clone()), cx(t.coeff)))
                    })
                    .collect::<Result<_>>()?;
                Symbol::from_terms(n, &parsed).map_err(|e| anyhow!("{e}"))
            }
        }
    }

    pub fn automorphism(&self) -> Result<Automorphism> {
        let n = self.space.n;
        let unitary_block = |u: &Option<Vec<Vec<Cx>>>| -> Result<Option<DMatrix<Complex64>>> {
            match u {
                None => Ok(None),
                Some(rows) => Ok(Some(parse_matrix(rows, n - 1)?)),
            }
        };
        let phi = match &self.automorphism {
            AutomorphismConfig::Canonical { s, unitary } => {
                let u = unitary_block(unitary)?;
                Automorphism::canonical_hyperbolic(n, *s, u.as_ref())
                    .map_err(|e| anyhow!("{e}"))?
            }
            AutomorphismConfig::InvolutionConjugated { s, a, unitary } => {
                if a.len() != n {
                    bail!("conjugation point has dimension {}, expected {n}", a.len());
                }
                let u = unitary_block(unitary)?;
                let base = Automorphism::canonical_hyperbolic(n, *s, u.as_ref())
                    .map_err(|e| anyhow!("{e}"))?;
                let point = Point::new(a.iter().map(|v| cx(*v)).collect());
                let invol = Automorphism::involution(&point).map_err(|e| anyhow!("{e}"))?;
                invol
                    .compose(&base)
                    .and_then(|x| x.compose(&invol.inverse()))
                    .map_err(|e| anyhow!("{e}"))?
            }
            AutomorphismConfig::ParabolicTranslation { a, unitary } => {
                if a.len() != n {
                    bail!("translation parameter has dimension {}, expected {n}", a.len());
                }
                let u = unitary_block(unitary)?;
                let sp = SiegelPoint::new(a.iter().map(|v| cx(*v)).collect());
                Automorphism::heisenberg_translation(&sp, u.as_ref()).map_err(|e| anyhow!("{e}"))?
            }
            AutomorphismConfig::Unitary { matrix } => {
                let u = parse_matrix(matrix, n)?;
                Automorphism::unitary(u).map_err(|e| anyhow!("{e}"))?
            }
            AutomorphismConfig::Matrix { matrix } => {
                let m = parse_matrix(matrix, n + 1)?;
                Automorphism::from_matrix(m).map_err(|e| anyhow!("{e}"))?
            }
        };
        Ok(phi)
    }

    pub fn degree_or(&self, flag: Option<usize>, default: usize) -> usize {
        flag.or(self.degree).unwrap_or(default)
    }

    pub fn seed_or(&self, flag: Option<u64>) -> u64 {
        flag.or(self.seed).unwrap_or(0)
    }

    pub fn lambda(&self) -> Result<Complex64> {
        self.lambda
            .map(cx)
            .ok_or_else(|| anyhow!("this command requires a \"lambda\": [re, im] field"))
    }
}

fn parse_matrix(rows: &[Vec<Cx>], expected: usize) -> Result<DMatrix<Complex64>> {
    if rows.len() != expected || rows.iter().any(|r| r.len() != expected) {
        bail!("matrix must be {expected}x{expected}");
    }
    Ok(DMatrix::from_fn(expected, expected, |i, j| cx(rows[i][j])))
}
