//! Gram matrices of the normalized invariant and their spectra.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::forest::GroupElement;
use crate::homfly::{evaluate, EvalParams, HomflyEngine};
use crate::signs;
use crate::tangle::{Convention, Tangle};

pub const DEFAULT_FAMILY_CAP: usize = 12;
pub const DEFAULT_TOL: f64 = 1e-8;
const HERMITIAN_TOL: f64 = 1e-8;
const OFF_DIAGONAL_TOL: f64 = 1e-12;
const MAX_SWEEPS: usize = 100;

pub const FLAG_OUT_OF_RANGE: &str = "out_of_guaranteed_range";

#[derive(Clone, Debug)]
pub struct GramMatrix {
    pub entries: Vec<Vec<Complex64>>,
    pub description: String,
    pub params: EvalParams,
}

impl GramMatrix {
    pub fn size(&self) -> usize {
        self.entries.len()
    }

    /// `max |M[i][j] − conj(M[j][i])|`.
    pub fn hermitian_defect(&self) -> f64 {
        hermitian_defect(&self.entries)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.entries
            .iter()
            .flatten()
            .map(|x| x.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    pub fn trace(&self) -> f64 {
        (0..self.size()).map(|i| self.entries[i][i].re).sum()
    }

    pub fn eigenvalues(&self) -> Result<Eigen> {
        hermitian_eigenvalues(&self.entries)
    }

    pub fn spectrum(&self, tol: f64) -> Result<SpectrumReport> {
        let eig = self.eigenvalues()?;
        Ok(SpectrumReport::new(self.params, eig, tol))
    }
}

fn hermitian_defect(m: &[Vec<Complex64>]) -> f64 {
    let n = m.len();
    let mut d: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            d = d.max((m[i][j] - m[j][i].conj()).norm());
        }
    }
    d
}

#[derive(Clone, Debug, PartialEq)]
pub struct Eigen {
    /// Ascending.
    pub values: Vec<f64>,
    pub sweeps: usize,
    pub off_norm: f64,
}

/// Eigenvalues of a Hermitian matrix by cyclic complex Jacobi rotations.
pub fn hermitian_eigenvalues(m: &[Vec<Complex64>]) -> Result<Eigen> {
    let n = m.len();
    if m.iter().any(|row| row.len() != n) {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: m.iter().map(Vec::len).max().unwrap_or(0),
        });
    }
    let norm = m.iter().flatten().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
    let defect = hermitian_defect(m);
    if defect > HERMITIAN_TOL * norm.max(1.0) {
        return Err(Error::NonHermitian(defect));
    }
    // symmetrize away rounding noise
    let mut a: Vec<Vec<Complex64>> = (0..n)
        .map(|i| (0..n).map(|j| (m[i][j] + m[j][i].conj()) * 0.5).collect())
        .collect();
    let off = |a: &Vec<Vec<Complex64>>| -> f64 {
        let mut s = 0.0;
        for (i, row) in a.iter().enumerate() {
            for (j, x) in row.iter().enumerate() {
                if i != j {
                    s += x.norm_sqr();
                }
            }
        }
        s.sqrt()
    };
    let target = OFF_DIAGONAL_TOL * norm.max(1.0);
    let mut sweeps = 0;
    while off(&a) >= target {
        if sweeps == MAX_SWEEPS {
            return Err(Error::NoConvergence(MAX_SWEEPS));
        }
        sweeps += 1;
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[p][q];
                let b = apq.norm();
                if b == 0.0 {
                    continue;
                }
                let phase = Complex64::from_polar(1.0, -apq.arg());
                let tau = (a[q][q].re - a[p][p].re) / (2.0 * b);
                let t = if tau == 0.0 {
                    1.0
                } else {
                    tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                // U = [[c, s], [−s·e^{−iφ}, c·e^{−iφ}]] on coordinates (p, q)
                for row in a.iter_mut() {
                    let (x, y) = (row[p], row[q]);
                    row[p] = x * c - y * phase * s;
                    row[q] = x * s + y * phase * c;
                }
                let conj = phase.conj();
                for k in 0..n {
                    let (x, y) = (a[p][k], a[q][k]);
                    a[p][k] = x * c - y * conj * s;
                    a[q][k] = x * s + y * conj * c;
                }
                a[p][q] = Complex64::new(0.0, 0.0);
                a[q][p] = Complex64::new(0.0, 0.0);
                a[p][p].im = 0.0;
                a[q][q].im = 0.0;
            }
        }
    }
    let mut values: Vec<f64> = (0..n).map(|i| a[i][i].re).collect();
    values.sort_by(|x, y| x.total_cmp(y));
    Ok(Eigen {
        values,
        sweeps,
        off_norm: off(&a),
    })
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Psd,
    Indefinite,
}

/// Report JSON: `{"params":{"r":6,"k":2},"min_eig":…,"eigs":[…],"verdict":"psd","flags":[…]}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectrumReport {
    pub params: EvalParams,
    pub min_eig: f64,
    pub eigs: Vec<f64>,
    pub verdict: Verdict,
    pub flags: Vec<String>,
    pub tol: f64,
    pub sweeps: usize,
}

impl SpectrumReport {
    /// Verdict `psd` iff the smallest eigenvalue is at least `−tol·max(1, ρ)`
    /// with `ρ` the spectral radius.
    pub fn new(params: EvalParams, eig: Eigen, tol: f64) -> SpectrumReport {
        let min_eig = eig.values.first().copied().unwrap_or(0.0);
        let radius = eig.values.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        let verdict = if min_eig >= -tol * radius.max(1.0) {
            Verdict::Psd
        } else {
            Verdict::Indefinite
        };
        let mut flags = Vec::new();
        if !params.in_range() {
            flags.push(FLAG_OUT_OF_RANGE.to_string());
        }
        SpectrumReport {
            params,
            min_eig,
            eigs: eig.values,
            verdict,
            flags,
            tol,
            sweeps: eig.sweeps,
        }
    }

    pub fn is_psd(&self) -> bool {
        self.verdict == Verdict::Psd
    }

    /// Indefinite where positivity is guaranteed.
    pub fn violates_guarantee(&self) -> bool {
        !self.is_psd() && self.params.in_range()
    }
}

/// `M[i][j] = φ(g_i⁻¹ g_j)`, entries computed independently in parallel.
pub fn element_gram(
    engine: &HomflyEngine,
    family: &[GroupElement],
    p: EvalParams,
    conv: Convention,
) -> Result<GramMatrix> {
    element_gram_with_cap(engine, family, p, conv, DEFAULT_FAMILY_CAP)
}

pub fn element_gram_with_cap(
    engine: &HomflyEngine,
    family: &[GroupElement],
    p: EvalParams,
    conv: Convention,
    cap: usize,
) -> Result<GramMatrix> {
    if family.len() > cap {
        return Err(Error::InvalidParams(format!(
            "family of {} exceeds the cap of {cap}",
            family.len()
        )));
    }
    if let Some(g) = family.iter().find(|g| !signs::is_oriented(g)) {
        return Err(Error::NotOriented(g.to_string()));
    }
    let m = family.len();
    let inverses: Vec<GroupElement> = family.iter().map(GroupElement::invert).collect();
    let flat: Vec<Complex64> = (0..m * m)
        .into_par_iter()
        .map(|ij| engine.phi(&inverses[ij / m].multiply(&family[ij % m]), p, conv))
        .collect::<Result<_>>()?;
    Ok(GramMatrix {
        entries: flat.chunks(m).map(<[Complex64]>::to_vec).collect(),
        description: format!("element family of {m}"),
        params: p,
    })
}

/// Same Gram matrix built from the given unreduced representatives: each
/// product is formed without reduction and normalized by its own leaf count.
pub fn element_gram_unreduced(
    engine: &HomflyEngine,
    family: &[GroupElement],
    p: EvalParams,
    conv: Convention,
) -> Result<GramMatrix> {
    let m = family.len();
    let delta = p.nonzero_delta()?;
    let flat: Vec<Complex64> = (0..m * m)
        .into_par_iter()
        .map(|ij| {
            let g = family[ij / m].invert().multiply_unreduced(&family[ij % m]);
            let poly = engine.link_poly(&g, conv)?;
            Ok(evaluate(&poly, p) / delta.powi(g.leaf_count() as i32 - 1))
        })
        .collect::<Result<_>>()?;
    Ok(GramMatrix {
        entries: flat.chunks(m).map(<[Complex64]>::to_vec).collect(),
        description: format!("unreduced element family of {m}"),
        params: p,
    })
}

/// `M[i][j] = ⟨t_i, t_j⟩` evaluated at `p`.
pub fn tangle_gram(engine: &HomflyEngine, tangles: &[Tangle], p: EvalParams) -> Result<GramMatrix> {
    let m = tangles.len();
    let flat: Vec<Complex64> = (0..m * m)
        .into_par_iter()
        .map(|ij| {
            Ok(evaluate(
                &engine.tangle_inner(&tangles[ij / m], &tangles[ij % m])?,
                p,
            ))
        })
        .collect::<Result<_>>()?;
    Ok(GramMatrix {
        entries: flat.chunks(m).map(<[Complex64]>::to_vec).collect(),
        description: format!("tangle family of {m}"),
        params: p,
    })
}

/// Element Gram spectra across parameter points.
pub fn sweep(
    engine: &HomflyEngine,
    family: &[GroupElement],
    params: &[EvalParams],
    conv: Convention,
    tol: f64,
) -> Result<Vec<SpectrumReport>> {
    params
        .iter()
        .map(|&p| element_gram(engine, family, p, conv)?.spectrum(tol))
        .collect()
}
