//! Comparison means of Laplacian sets: arithmetic, harmonic, power and
//! geometric (Karcher), plus a uniform dispatcher that also routes to the
//! Bures-Wasserstein mean.

use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use crate::barycenter::{bw_mean, bw_mean_general, BarycenterProblem, FixedPointConfig, Weights};
use crate::embedding::{embed_general, SpectralFilter};
use crate::error::{Error, Result};
use crate::graphs::LaplacianMatrix;
use crate::spectral::{psd_pinv, psd_pinv_rel, psd_pow, spd_log, sym_exp, SymMatrix};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MeanKind {
    BuresWasserstein(SpectralFilter),
    Arithmetic,
    Harmonic,
    /// `(Σ λ_j L_j^p)^{1/p}`; `p = 1` is arithmetic, `p = −1` harmonic.
    Power(f64),
    Karcher,
}

impl Default for MeanKind {
    fn default() -> Self {
        Self::BuresWasserstein(SpectralFilter::default())
    }
}

impl fmt::Display for MeanKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::BuresWasserstein(SpectralFilter::PinvSqrt) => f.write_str("bw"),
            Self::BuresWasserstein(filter) => write!(f, "bw:{filter}"),
            Self::Arithmetic => f.write_str("arithmetic"),
            Self::Harmonic => f.write_str("harmonic"),
            Self::Power(p) => write!(f, "power:{p}"),
            Self::Karcher => f.write_str("karcher"),
        }
    }
}

impl FromStr for MeanKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "bw" => return Ok(Self::default()),
            "arithmetic" => return Ok(Self::Arithmetic),
            "harmonic" => return Ok(Self::Harmonic),
            "karcher" | "geometric" => return Ok(Self::Karcher),
            _ => {}
        }
        if let Some(filter) = s.strip_prefix("bw:") {
            return Ok(Self::BuresWasserstein(filter.parse()?));
        }
        if let Some(p) = s.strip_prefix("power:") {
            let p: f64 = p.parse().map_err(|_| Error::UnknownName(s.to_string()))?;
            if p == 0.0 || !p.is_finite() {
                return Err(Error::InvalidParameter(format!("power mean exponent must be finite and nonzero, got {p}")));
            }
            return Ok(Self::Power(p));
        }
        Err(Error::UnknownName(s.to_string()))
    }
}

/// Which null space the inputs share.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum NullSpace {
    /// Combinatorial Laplacians: every input annihilates the ones vector.
    #[default]
    Ones,
    /// Each input has its own one-dimensional null space (normalized Laplacians).
    PerMatrix,
}

#[derive(Debug, Clone, PartialEq)]
pub struct KarcherConfig {
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for KarcherConfig {
    fn default() -> Self {
        Self { tol: 1e-9, max_iter: 200 }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct MeanConfig {
    pub fixed_point: FixedPointConfig,
    pub karcher: KarcherConfig,
    /// Diagonal shift for power means; `None` picks [`default_power_shift`].
    pub power_shift: Option<f64>,
    pub null_space: NullSpace,
}

/// `ln(1 + |p|)` for negative exponents, zero otherwise. A tiny shift such as
/// 1e-6 raised to p = −10 gives 1e60, which swamps every other eigenvalue in
/// double precision.
pub fn default_power_shift(p: f64) -> f64 {
    if p < 0.0 {
        (1.0 + p.abs()).ln()
    } else {
        0.0
    }
}

fn common_dim<'a>(ms: impl IntoIterator<Item = &'a SymMatrix>, weights: &Weights) -> Result<usize> {
    let mut n = None;
    let mut count = 0;
    for m in ms {
        count += 1;
        match n {
            None => n = Some(m.dim()),
            Some(n) if n != m.dim() => return Err(Error::DimensionMismatch { expected: n, found: m.dim() }),
            _ => {}
        }
    }
    if count != weights.len() {
        return Err(Error::LengthMismatch(count, weights.len()));
    }
    n.ok_or(Error::InvalidParameter("no matrices to average".into()))
}

fn weighted_sum(ms: &[SymMatrix], weights: &Weights) -> SymMatrix {
    let n = ms[0].dim();
    let mut total = DMatrix::zeros(n, n);
    for (m, w) in ms.iter().zip(weights.as_slice()) {
        total += m.as_matrix() * *w;
    }
    SymMatrix::symmetrize(total)
}

fn matrices(ls: &[LaplacianMatrix]) -> Vec<SymMatrix> {
    ls.iter().map(|l| l.matrix().clone()).collect()
}

pub fn arithmetic_mean(ls: &[LaplacianMatrix], weights: &Weights) -> Result<LaplacianMatrix> {
    let ms = matrices(ls);
    common_dim(&ms, weights)?;
    Ok(LaplacianMatrix::from_matrix_unchecked(weighted_sum(&ms, weights)))
}

/// `pinv(Σ λ_j pinv(L_j))`, i.e. the harmonic mean on span{1}⊥.
pub fn harmonic_mean(ls: &[LaplacianMatrix], weights: &Weights) -> Result<LaplacianMatrix> {
    common_dim(ls.iter().map(LaplacianMatrix::matrix), weights)?;
    let inverses = ls
        .par_iter()
        .map(|l| psd_pinv(l.clone().validated(None)?.matrix()))
        .collect::<Result<Vec<_>>>()?;
    Ok(LaplacianMatrix::from_matrix_unchecked(psd_pinv_rel(&weighted_sum(&inverses, weights))?))
}

/// `(Σ λ_j (M_j + shift·I)^p)^{1/p}` for PSD inputs. Zero eigenvalues left
/// after the shift are treated as pseudo-powers.
pub fn power_mean(ms: &[SymMatrix], weights: &Weights, p: f64, shift: f64) -> Result<SymMatrix> {
    if p == 0.0 || !p.is_finite() {
        return Err(Error::InvalidParameter(format!("power mean exponent must be finite and nonzero, got {p}")));
    }
    if !(shift >= 0.0 && shift.is_finite()) {
        return Err(Error::InvalidParameter(format!("power mean shift must be nonnegative, got {shift}")));
    }
    let n = common_dim(ms, weights)?;
    let shifted_id = SymMatrix::identity(n).scaled(shift);
    let powers = ms
        .par_iter()
        .map(|m| psd_pow(&m.add(&shifted_id), p))
        .collect::<Result<Vec<_>>>()?;
    psd_pow(&weighted_sum(&powers, weights), 1.0 / p)
}

/// Affine-invariant geometric mean of SPD matrices by the fixed point
/// `X ← X^{1/2} exp(Σ λ_j log(X^{-1/2} A_j X^{-1/2})) X^{1/2}`, started at the
/// arithmetic mean. Returns the mean and the number of updates.
pub fn karcher_spd(mats: &[SymMatrix], weights: &Weights, cfg: &KarcherConfig) -> Result<(SymMatrix, usize)> {
    common_dim(mats, weights)?;
    let mut x = weighted_sum(mats, weights);
    let mut step = f64::INFINITY;
    for it in 1..=cfg.max_iter {
        let eig = x.eig();
        if eig.min_eigenvalue() <= 0.0 {
            return Err(Error::NotSpd { min_eigenvalue: eig.min_eigenvalue() });
        }
        let x_half = eig.map(f64::sqrt, Some(0.0))?;
        let x_inv_half = eig.map(|v| 1.0 / v.sqrt(), Some(0.0))?;
        let logs = mats
            .par_iter()
            .map(|a| spd_log(&a.congruence(&x_inv_half)))
            .collect::<Result<Vec<_>>>()?;
        let next = sym_exp(&weighted_sum(&logs, weights)).congruence(&x_half);
        step = next.frobenius_distance(&x);
        x = next;
        if step <= cfg.tol {
            return Ok((x, it));
        }
    }
    Err(Error::NotConverged { iterations: cfg.max_iter, final_step: step })
}

/// Karcher mean of Laplacians computed on the shifted cone `L_j + J/N`.
pub fn karcher_mean(ls: &[LaplacianMatrix], weights: &Weights, cfg: &KarcherConfig) -> Result<LaplacianMatrix> {
    let n = common_dim(ls.iter().map(LaplacianMatrix::matrix), weights)?;
    let shift = SymMatrix::ones_projector(n);
    let shifted = ls
        .iter()
        .map(|l| Ok(l.clone().validated(None)?.matrix().add(&shift)))
        .collect::<Result<Vec<_>>>()?;
    let (x, _) = karcher_spd(&shifted, weights, cfg)?;
    Ok(LaplacianMatrix::from_matrix_unchecked(x.sub(&shift)))
}

fn psd_part(m: &SymMatrix) -> Result<SymMatrix> {
    m.eig().map(|x| x.max(0.0), Some(0.0))
}

/// Null directions of operators with one-dimensional null spaces, sign-aligned.
fn null_directions(ms: &[SymMatrix]) -> Result<Vec<DVector<f64>>> {
    ms.par_iter()
        .map(|m| Ok(embed_general(m, SpectralFilter::Identity)?.null_vector().clone()))
        .collect()
}

fn karcher_general(ms: &[SymMatrix], weights: &Weights, cfg: &KarcherConfig) -> Result<SymMatrix> {
    let vs = null_directions(ms)?;
    let shifted: Vec<SymMatrix> = ms.iter().zip(&vs).map(|(m, v)| m.add(&SymMatrix::outer(v))).collect();
    let (x, _) = karcher_spd(&shifted, weights, cfg)?;
    let mut v_bar = DVector::zeros(x.dim());
    for (v, w) in vs.iter().zip(weights.as_slice()) {
        v_bar += v * *w;
    }
    psd_part(&x.sub(&SymMatrix::outer(&v_bar.normalize())))
}

/// Uniform entry point used by the experiments.
pub fn mean_of(ms: &[SymMatrix], weights: &Weights, kind: MeanKind, cfg: &MeanConfig) -> Result<SymMatrix> {
    common_dim(ms, weights)?;
    if let MeanKind::Power(p) = kind {
        return power_mean(ms, weights, p, cfg.power_shift.unwrap_or_else(|| default_power_shift(p)));
    }
    match cfg.null_space {
        NullSpace::Ones => {
            let ls = ms.iter().map(|m| LaplacianMatrix::from_matrix(m.clone())).collect::<Result<Vec<_>>>()?;
            let mean = match kind {
                MeanKind::BuresWasserstein(filter) => {
                    let problem = BarycenterProblem::new(ls, weights.clone(), filter)?;
                    bw_mean(&problem, &cfg.fixed_point)?.mean_laplacian
                }
                MeanKind::Arithmetic => arithmetic_mean(&ls, weights)?,
                MeanKind::Harmonic => harmonic_mean(&ls, weights)?,
                MeanKind::Karcher => karcher_mean(&ls, weights, &cfg.karcher)?,
                MeanKind::Power(_) => unreachable!("handled above"),
            };
            Ok(mean.into_matrix())
        }
        NullSpace::PerMatrix => match kind {
            MeanKind::BuresWasserstein(filter) => Ok(bw_mean_general(ms, weights, filter, &cfg.fixed_point)?.mean),
            MeanKind::Arithmetic => Ok(weighted_sum(ms, weights)),
            MeanKind::Harmonic => {
                let inverses = ms.par_iter().map(psd_pinv_rel).collect::<Result<Vec<_>>>()?;
                psd_pinv_rel(&weighted_sum(&inverses, weights))
            }
            MeanKind::Karcher => karcher_general(ms, weights, &cfg.karcher),
            MeanKind::Power(_) => unreachable!("handled above"),
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphs::Graph;
    use crate::spectral::spd_inv;

    fn path2(w: f64) -> LaplacianMatrix {
        Graph::new(2, [(0, 1, w)]).unwrap().laplacian()
    }

    fn half() -> Weights {
        Weights::uniform(2).unwrap()
    }

    fn edge_weight(l: &LaplacianMatrix) -> f64 {
        -l.matrix()[(0, 1)]
    }

    #[test]
    fn path2_scalar_means() {
        let ls = [path2(1.0), path2(4.0)];
        assert!((edge_weight(&arithmetic_mean(&ls, &half()).unwrap()) - 2.5).abs() < 1e-12);
        assert!((edge_weight(&harmonic_mean(&ls, &half()).unwrap()) - 1.6).abs() < 1e-12);
        let k = karcher_mean(&ls, &half(), &KarcherConfig::default()).unwrap();
        assert!((edge_weight(&k) - 2.0).abs() < 1e-9);
        assert!(k.max_row_sum() < 1e-9);
    }

    #[test]
    fn single_input_is_returned() {
        let g = Graph::new(3, [(0, 1, 1.0), (1, 2, 3.0)]).unwrap().laplacian();
        let one = Weights::uniform(1).unwrap();
        let ls = std::slice::from_ref(&g);
        for kind in [MeanKind::default(), MeanKind::Arithmetic, MeanKind::Harmonic, MeanKind::Karcher] {
            let m = mean_of(&[g.matrix().clone()], &one, kind, &MeanConfig::default()).unwrap();
            assert!(m.frobenius_distance(g.matrix()) < 1e-9, "{kind}");
        }
        assert!(harmonic_mean(ls, &one).unwrap().matrix().frobenius_distance(g.matrix()) < 1e-9);
    }

    #[test]
    fn power_mean_limits() {
        let a = SymMatrix::from_row_slice(2, &[2.0, 0.5, 0.5, 1.0]).unwrap();
        let b = SymMatrix::from_row_slice(2, &[1.0, -0.3, -0.3, 3.0]).unwrap();
        let ms = [a.clone(), b.clone()];
        let arith = a.scaled(0.5).add(&b.scaled(0.5));
        assert!(power_mean(&ms, &half(), 1.0, 0.0).unwrap().frobenius_distance(&arith) < 1e-12);
        let harm = spd_inv(&spd_inv(&a).unwrap().scaled(0.5).add(&spd_inv(&b).unwrap().scaled(0.5))).unwrap();
        assert!(power_mean(&ms, &half(), -1.0, 0.0).unwrap().frobenius_distance(&harm) < 1e-12);
    }

    #[test]
    fn power_mean_on_commuting_diagonals() {
        let a = SymMatrix::from_row_slice(2, &[1.0, 0.0, 0.0, 2.0]).unwrap();
        let b = SymMatrix::from_row_slice(2, &[2.0, 0.0, 0.0, 1.0]).unwrap();
        let m = power_mean(&[a, b], &half(), -10.0, 0.0).unwrap();
        let want = (0.5 * (1.0 + 2f64.powi(-10))).powf(-0.1);
        assert!((m[(0, 0)] - want).abs() < 1e-12 && (m[(1, 1)] - want).abs() < 1e-12);
        assert!(m[(0, 1)].abs() < 1e-14);
    }

    #[test]
    fn power_minus_one_is_harmonic_on_shifted_inputs() {
        let g0 = Graph::new(3, [(0, 1, 1.0), (1, 2, 2.0)]).unwrap().laplacian();
        let g1 = Graph::new(3, [(0, 1, 3.0), (0, 2, 0.5), (1, 2, 1.0)]).unwrap().laplacian();
        let j = SymMatrix::ones_projector(3);
        let shifted = [g0.matrix().add(&j), g1.matrix().add(&j)];
        let cfg = MeanConfig { power_shift: Some(0.0), null_space: NullSpace::PerMatrix, ..Default::default() };
        let power = mean_of(&shifted, &half(), MeanKind::Power(-1.0), &cfg).unwrap();
        let harmonic = mean_of(&shifted, &half(), MeanKind::Harmonic, &cfg).unwrap();
        assert!(power.frobenius_distance(&harmonic) < 1e-8);
    }

    #[test]
    fn laplacian_means_keep_zero_row_sums() {
        let g0 = Graph::new(4, [(0, 1, 1.0), (1, 2, 2.0), (2, 3, 1.0)]).unwrap().laplacian();
        let g1 = Graph::new(4, [(0, 2, 1.0), (1, 3, 2.0), (0, 3, 1.0)]).unwrap().laplacian();
        let ls = [g0, g1];
        assert!(arithmetic_mean(&ls, &half()).unwrap().max_row_sum() < 1e-9);
        assert!(harmonic_mean(&ls, &half()).unwrap().max_row_sum() < 1e-9);
    }

    #[test]
    fn general_null_space_matches_ones_case() {
        let g0 = Graph::new(3, [(0, 1, 1.0), (1, 2, 2.0)]).unwrap().laplacian();
        let g1 = Graph::new(3, [(0, 1, 3.0), (0, 2, 0.5)]).unwrap().laplacian();
        let ms = [g0.matrix().clone(), g1.matrix().clone()];
        let per = MeanConfig { null_space: NullSpace::PerMatrix, ..Default::default() };
        for kind in [MeanKind::default(), MeanKind::Arithmetic, MeanKind::Harmonic, MeanKind::Karcher] {
            let a = mean_of(&ms, &half(), kind, &MeanConfig::default()).unwrap();
            let b = mean_of(&ms, &half(), kind, &per).unwrap();
            assert!(a.frobenius_distance(&b) < 1e-8, "{kind}");
        }
    }

    #[test]
    fn kind_names() {
        for s in ["bw", "bw:sqrt", "arithmetic", "harmonic", "power:-10", "power:0.5", "karcher"] {
            assert_eq!(s.parse::<MeanKind>().unwrap().to_string(), s);
        }
        assert_eq!("bw:pinv_sqrt".parse::<MeanKind>().unwrap(), MeanKind::default());
        assert!("power:0".parse::<MeanKind>().is_err());
        assert!("median".parse::<MeanKind>().is_err());
    }

    #[test]
    fn mismatched_inputs() {
        let ls = [path2(1.0), Graph::new(3, [(0, 1, 1.0), (1, 2, 1.0)]).unwrap().laplacian()];
        assert!(matches!(arithmetic_mean(&ls, &half()), Err(Error::DimensionMismatch { .. })));
        assert!(matches!(arithmetic_mean(&ls[..1], &half()), Err(Error::LengthMismatch(1, 2))));
        let disconnected = Graph::new(3, [(0, 1, 1.0)]).unwrap().laplacian();
        assert!(matches!(
            harmonic_mean(&[disconnected], &Weights::uniform(1).unwrap()),
            Err(Error::AssumptionViolated(_))
        ));
    }
}
