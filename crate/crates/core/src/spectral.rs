//! Eigenstructure ground truth: the classical stability verdict, real Jordan
//! block structure by rank sequences of each cluster's nilpotent part, structural `V_2` degeneracy, and
//! closed-form limit predictions for `κ_i` and `τ`.

use nalgebra::DMatrix;
use serde::Serialize;

use crate::discriminance::{Provenance, StabilityVerdict, Verdict};
use crate::error::{Error, Result};
use crate::linalg::schur::{move_to_front, ComplexSchur};
use crate::linalg::{eigenvalues, ComplexScalar, RealMatrix, ZERO_SNAP};

/// Eigenvalues closer than this (relative to `max(‖A‖_F, 1)`) form one
/// cluster. Wide enough to gather the `ε^{1/p}` spread of a defective block.
const CLUSTER_TOL: f64 = 1e-5;
/// Cluster spread (relative) that a semisimple eigenvalue cannot produce.
const SEPARATION_TOL: f64 = 1e-7;
/// Singular values of `N^j` below this times `max(‖A‖_F, 1)^j` count as zero.
const RANK_TOL: f64 = 1e-9;
/// Relative tolerance for ties in the curvature trichotomy.
const TIE_TOL: f64 = 1e-9;
/// Relative tolerance when reading canonical blocks off a matrix.
const CANONICAL_TOL: f64 = 1e-12;

/// A distinct eigenvalue with its algebraic multiplicity. Complex pairs are
/// listed as two conjugate entries.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Eigenvalue {
    pub value: ComplexScalar,
    pub multiplicity: usize,
    /// Largest distance between the raw eigenvalues merged into this entry.
    pub spread: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectralSummary {
    pub eigs: Vec<Eigenvalue>,
    /// Spectral abscissa: largest real part.
    pub m: f64,
    /// Largest real part strictly below `m`, ignoring semisimple zeros.
    pub n_reduced: Option<f64>,
    /// Distinct nonzero eigenvalues in decreasing order. Empty unless
    /// `diagonalizable_real`.
    pub lambda_order: Vec<f64>,
    pub invertible: bool,
    pub determinant: f64,
    /// Every eigenvalue on the imaginary axis is semisimple.
    pub semisimple_critical: bool,
    /// Real spectrum and every eigenvalue semisimple.
    pub diagonalizable_real: bool,
    pub notes: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RealBlocks {
    pub lambda: f64,
    /// Block sizes, non-increasing.
    pub sizes: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComplexBlocks {
    pub a: f64,
    /// Positive imaginary part; the conjugate is implied.
    pub b: f64,
    pub sizes: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct JordanStructure {
    pub real_blocks: Vec<RealBlocks>,
    pub complex_blocks: Vec<ComplexBlocks>,
}

impl JordanStructure {
    pub fn dim(&self) -> usize {
        self.real_blocks.iter().flat_map(|r| &r.sizes).sum::<usize>()
            + 2 * self.complex_blocks.iter().flat_map(|c| &c.sizes).sum::<usize>()
    }

    /// All blocks real and of size one.
    pub fn diagonalizable_real(&self) -> bool {
        self.complex_blocks.is_empty()
            && self.real_blocks.iter().all(|r| r.sizes.iter().all(|&p| p == 1))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum PredictedLimit {
    TendsToZero,
    TendsToPositiveConst,
    TendsToInfinity,
    NoLimitBounded,
    NotPredicted,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LimitPrediction {
    pub class: PredictedLimit,
    /// The limit when it is a computable positive constant.
    pub value: Option<f64>,
    pub applicable: bool,
    pub reason: String,
}

impl LimitPrediction {
    fn new(class: PredictedLimit, reason: &str) -> Self {
        Self {
            class,
            value: None,
            applicable: true,
            reason: reason.to_string(),
        }
    }

    fn inapplicable(reason: &str) -> Self {
        Self {
            applicable: false,
            ..Self::new(PredictedLimit::NotPredicted, reason)
        }
    }
}

fn scale_of(a: &RealMatrix) -> f64 {
    a.frobenius_norm().max(1.0)
}

type C64 = nalgebra::Complex<f64>;

fn rank_above(m: &DMatrix<C64>, threshold: f64) -> usize {
    m.clone()
        .svd(false, false)
        .singular_values
        .iter()
        .filter(|&&s| s > threshold)
        .count()
}

/// `rank(N^j)` for `j = 0 ..= upto`; singular values below
/// `RANK_TOL · scale^j` count as zero.
fn rank_sequence(b: &DMatrix<C64>, upto: usize, scale: f64) -> Vec<usize> {
    let n = b.nrows();
    let mut ranks = vec![n];
    let mut power = DMatrix::<C64>::identity(n, n);
    for j in 1..=upto {
        power = &power * b;
        ranks.push(rank_above(&power, RANK_TOL * scale.powi(j as i32)));
    }
    ranks
}

fn complex_schur(a: &RealMatrix) -> Result<ComplexSchur> {
    crate::linalg::schur::complex_schur(&a.to_complex())
}

/// Nilpotent part of one cluster: the cluster's leading block in a reordered
/// Schur form with its diagonal removed. Other eigenvalues never enter the
/// rank counts, however close they sit.
fn cluster_nilpotent(schur: &ComplexSchur, e: &Eigenvalue, scale: f64) -> Option<DMatrix<C64>> {
    let z = C64::new(e.value.re, e.value.im);
    let reach = e.spread + 0.5 * CLUSTER_TOL * scale;
    let n = schur.t.nrows();
    let selected: Vec<bool> = (0..n).map(|i| (schur.t[(i, i)] - z).norm() <= reach).collect();
    if selected.iter().filter(|&&x| x).count() != e.multiplicity {
        return None;
    }
    let mut s = schur.clone();
    let p = move_to_front(&mut s, &selected);
    let mut nil = s.t.view((0, 0), (p, p)).into_owned();
    for i in 0..p {
        for j in 0..=i {
            nil[(i, j)] = C64::new(0.0, 0.0);
        }
    }
    Some(nil)
}

/// Jordan block sizes of one eigenvalue (for a pair, of `a + ib`) from the
/// rank sequence of its nilpotent part. `None` when the counts do not add up.
fn block_sizes(schur: &ComplexSchur, e: &Eigenvalue, scale: f64) -> Option<Vec<usize>> {
    if e.multiplicity == 1 {
        return Some(vec![1]);
    }
    let mult = e.multiplicity;
    let ranks = rank_sequence(&cluster_nilpotent(schur, e, scale)?, mult + 1, scale);
    // at_least[j] = number of blocks of size >= j.
    let at_least: Vec<usize> = (1..=mult + 1)
        .map(|j| ranks[j - 1].saturating_sub(ranks[j]))
        .collect();
    let mut sizes = Vec::new();
    for j in (1..=mult).rev() {
        let exactly = at_least[j - 1].checked_sub(at_least[j])?;
        sizes.extend(std::iter::repeat_n(j, exactly));
    }
    (sizes.iter().sum::<usize>() == mult).then_some(sizes)
}

fn cluster(raw: &[ComplexScalar], tol: f64) -> Vec<Eigenvalue> {
    let mut groups: Vec<Vec<ComplexScalar>> = Vec::new();
    for z in raw {
        match groups
            .iter_mut()
            .find(|g| g.iter().any(|w| w.distance(z) <= tol))
        {
            Some(g) => g.push(*z),
            None => groups.push(vec![*z]),
        }
    }
    groups
        .into_iter()
        .map(|g| {
            let k = g.len() as f64;
            let re = g.iter().map(|z| z.re).sum::<f64>() / k;
            let im = g.iter().map(|z| z.im).sum::<f64>() / k;
            let spread = g
                .iter()
                .flat_map(|x| g.iter().map(move |y| x.distance(y)))
                .fold(0.0, f64::max);
            Eigenvalue {
                value: ComplexScalar::new(re, im),
                multiplicity: g.len(),
                spread,
            }
        })
        .collect()
}

fn snap(eigs: &mut [Eigenvalue], scale: f64) {
    for e in eigs {
        if e.value.re.abs() < ZERO_SNAP * scale {
            e.value.re = 0.0;
        }
        if e.value.im.abs() < ZERO_SNAP * scale {
            e.value.im = 0.0;
        }
    }
}

/// Eigenvalues, spectral abscissa, invertibility and semisimplicity.
pub fn summarize(a: &RealMatrix) -> Result<SpectralSummary> {
    let n = a.dim();
    let scale = scale_of(a);
    let mut eigs = cluster(&eigenvalues(a)?, CLUSTER_TOL * scale);
    snap(&mut eigs, scale);
    let schur = complex_schur(a)?;
    let mut notes = Vec::new();

    let m = eigs.iter().map(|e| e.value.re).fold(f64::NEG_INFINITY, f64::max);
    let mut semisimple_critical = true;
    let mut all_semisimple = true;
    for e in &eigs {
        let semisimple = e.multiplicity == 1
            || cluster_nilpotent(&schur, e, scale).is_some_and(|nil| {
                let ranks = rank_sequence(&nil, 2, scale);
                ranks[1] == ranks[2]
            });
        all_semisimple &= semisimple;
        if e.value.re == 0.0 && !semisimple {
            semisimple_critical = false;
        }
    }
    let real_spectrum = eigs.iter().all(|e| e.value.im == 0.0);
    let diagonalizable_real = real_spectrum && all_semisimple;

    let n_reduced = eigs
        .iter()
        .filter(|e| e.value.re < m)
        .filter(|e| !(e.value.re == 0.0 && e.value.im == 0.0 && semisimple_critical))
        .map(|e| e.value.re)
        .fold(None, |acc: Option<f64>, x| Some(acc.map_or(x, |y| y.max(x))));

    let lambda_order = if diagonalizable_real {
        let mut l: Vec<f64> = eigs.iter().map(|e| e.value.re).filter(|&x| x != 0.0).collect();
        l.sort_by(|x, y| y.total_cmp(x));
        l.dedup();
        l
    } else {
        Vec::new()
    };

    let determinant = a.determinant();
    let invertible = eigs.iter().all(|e| e.value.modulus() != 0.0);
    let det_nonzero = determinant.abs() > 1e-12 * scale.powi(n as i32);
    if invertible != det_nonzero {
        notes.push(format!(
            "eigenvalue snapping and det A = {determinant:e} disagree on invertibility"
        ));
    }

    Ok(SpectralSummary {
        eigs,
        m,
        n_reduced,
        lambda_order,
        invertible,
        determinant,
        semisimple_critical,
        diagonalizable_real,
        notes,
    })
}

/// Lyapunov stability from the spectrum alone.
pub fn classify_eigen_stability(s: &SpectralSummary) -> StabilityVerdict {
    let verdict = if s.m < 0.0 {
        Verdict::AsymptoticallyStable
    } else if s.m <= 0.0 && s.semisimple_critical {
        Verdict::Stable
    } else {
        Verdict::Unstable
    };
    StabilityVerdict::new(verdict, Provenance::EigenvalueOracle)
}

/// Real Jordan block sizes for every distinct eigenvalue.
pub fn jordan_structure(a: &RealMatrix, s: &SpectralSummary) -> Result<JordanStructure> {
    let scale = scale_of(a);
    let schur = complex_schur(a)?;
    let mut real_blocks = Vec::new();
    let mut complex_blocks = Vec::new();
    for e in &s.eigs {
        if e.value.im < 0.0 {
            continue;
        }
        let ill = || Error::IllConditionedSpectrum {
            first: format!("{:.6}", e.value),
            second: format!("{:.6} (multiplicity {})", e.value, e.multiplicity),
        };
        let sizes = block_sizes(&schur, e, scale).ok_or_else(ill)?;
        // A semisimple cluster whose members disagree was never one eigenvalue.
        if sizes.iter().all(|&p| p == 1) && e.spread > SEPARATION_TOL * scale {
            return Err(ill());
        }
        if e.value.im == 0.0 {
            real_blocks.push(RealBlocks {
                lambda: e.value.re,
                sizes,
            });
        } else {
            complex_blocks.push(ComplexBlocks {
                a: e.value.re,
                b: e.value.im,
                sizes,
            });
        }
    }
    for pair in s.eigs.windows(2) {
        if pair[0].value.distance(&pair[1].value) <= 1e-6 * scale {
            return Err(Error::IllConditionedSpectrum {
                first: format!("{:.6}", pair[0].value),
                second: format!("{:.6}", pair[1].value),
            });
        }
    }
    Ok(JordanStructure {
        real_blocks,
        complex_blocks,
    })
}

/// `V_2(t) ≡ 0` for every initial condition: `A` is `λI ⊕ 0`, or a sum of
/// `J_2(0)` blocks and zero `1 × 1` blocks.
pub fn v2_degenerate(j: &JordanStructure) -> bool {
    if !j.complex_blocks.is_empty() {
        return false;
    }
    let scalar = j.real_blocks.iter().all(|r| r.sizes.iter().all(|&p| p == 1))
        && j.real_blocks.iter().filter(|r| r.lambda != 0.0).count() <= 1;
    let nilpotent_pairs = j
        .real_blocks
        .iter()
        .all(|r| r.lambda == 0.0 && r.sizes.iter().all(|&p| p <= 2));
    scalar || nilpotent_pairs
}

/// Limit of `κ_i` for a real diagonalizable matrix from the ordering of its
/// distinct nonzero eigenvalues `λ_(1) > λ_(2) > …`:
/// `λ_(1) + λ_(i)` above, equal to, or below `λ_(i+1)` gives zero, a positive
/// constant, or infinity.
pub fn predict_kappa_limit_diagonal(s: &SpectralSummary, i: usize) -> LimitPrediction {
    assert!(i >= 1, "curvature index starts at 1");
    if !s.diagonalizable_real {
        return LimitPrediction::inapplicable("not diagonalizable over the reals");
    }
    let l = &s.lambda_order;
    if l.len() < i + 1 {
        return LimitPrediction::new(
            PredictedLimit::TendsToZero,
            "curve confined to lower-dimensional span",
        );
    }
    let gap = l[0] + l[i - 1] - l[i];
    let scale = l.iter().map(|x| x.abs()).fold(1.0, f64::max);
    let (class, reason) = if gap.abs() <= TIE_TOL * scale {
        (PredictedLimit::TendsToPositiveConst, "exponent tie")
    } else if gap > 0.0 {
        (PredictedLimit::TendsToZero, "leading exponent dominates")
    } else {
        (PredictedLimit::TendsToInfinity, "trailing exponent dominates")
    };
    LimitPrediction::new(class, reason)
}

/// Asymptotic growth rate of `log κ_i` for a real diagonalizable matrix:
/// `λ_(i+1) − λ_(1) − λ_(i)`. `None` when the prediction is not a trichotomy case.
pub fn kappa_log_slope(s: &SpectralSummary, i: usize) -> Option<f64> {
    let l = &s.lambda_order;
    (s.diagonalizable_real && i >= 1 && l.len() > i).then(|| l[i] - l[0] - l[i - 1])
}

/// A diagonal block of a real canonical form.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum CanonicalBlock {
    /// `J_p(λ)` starting at row `offset`.
    Real { lambda: f64, p: usize, offset: usize },
    /// `C_m(a, b)` starting at row `offset`; occupies `2m` rows.
    Complex { a: f64, b: f64, m: usize, offset: usize },
}

impl CanonicalBlock {
    pub fn offset(&self) -> usize {
        match *self {
            CanonicalBlock::Real { offset, .. } | CanonicalBlock::Complex { offset, .. } => offset,
        }
    }

    pub fn size(&self) -> usize {
        match *self {
            CanonicalBlock::Real { p, .. } => p,
            CanonicalBlock::Complex { m, .. } => 2 * m,
        }
    }

    pub fn real_part(&self) -> f64 {
        match *self {
            CanonicalBlock::Real { lambda, .. } => lambda,
            CanonicalBlock::Complex { a, .. } => a,
        }
    }
}

/// Reads `A` as a direct sum of `J_p(λ)` and `C_m(a, b)` blocks, where
/// `C_m(a, b)` has `[[a, b], [−b, a]]` on its diagonal and `I_2` above it.
/// `None` when `A` is not in that form.
pub fn canonical_blocks(a: &RealMatrix) -> Option<Vec<CanonicalBlock>> {
    let n = a.dim();
    let tol = CANONICAL_TOL * scale_of(a);
    let eq = |x: f64, y: f64| (x - y).abs() <= tol;
    let g = |i: usize, j: usize| a.get(i, j);
    let is_rotation = |i: usize| i + 1 < n && g(i + 1, i).abs() > tol;
    let same_rotation = |i: usize, k: usize| {
        eq(g(k, k), g(i, i))
            && eq(g(k + 1, k + 1), g(i, i))
            && eq(g(k, k + 1), g(i, i + 1))
            && eq(g(k + 1, k), g(i + 1, i))
    };

    let mut blocks = Vec::new();
    let mut i = 0;
    while i < n {
        if is_rotation(i) {
            let (re, b) = (g(i, i), g(i, i + 1));
            if !(eq(g(i + 1, i + 1), re) && eq(g(i + 1, i), -b)) {
                return None;
            }
            let mut m = 1;
            while i + 2 * m + 1 < n
                && is_rotation(i + 2 * m)
                && same_rotation(i, i + 2 * m)
                && eq(g(i + 2 * m - 2, i + 2 * m), 1.0)
                && eq(g(i + 2 * m - 1, i + 2 * m + 1), 1.0)
            {
                m += 1;
            }
            blocks.push(CanonicalBlock::Complex {
                a: re,
                b: b.abs(),
                m,
                offset: i,
            });
            i += 2 * m;
        } else {
            let lambda = g(i, i);
            let mut p = 1;
            while i + p < n
                && !is_rotation(i + p)
                && eq(g(i + p, i + p), lambda)
                && eq(g(i + p - 1, i + p), 1.0)
            {
                p += 1;
            }
            blocks.push(CanonicalBlock::Real { lambda, p, offset: i });
            i += p;
        }
    }

    // Everything outside the recognised blocks must vanish.
    let mut rebuilt = DMatrix::<f64>::zeros(n, n);
    for blk in &blocks {
        let o = blk.offset();
        match *blk {
            CanonicalBlock::Real { lambda, p, .. } => {
                for k in 0..p {
                    rebuilt[(o + k, o + k)] = lambda;
                    if k + 1 < p {
                        rebuilt[(o + k, o + k + 1)] = 1.0;
                    }
                }
            }
            CanonicalBlock::Complex { m, .. } => {
                for r in o..o + 2 * m {
                    for c in o..o + 2 * m {
                        rebuilt[(r, c)] = g(r, c);
                    }
                }
            }
        }
    }
    let residual = (a.as_matrix() - rebuilt).amax();
    (residual <= tol).then_some(blocks)
}

/// `τ²` limit for critical blocks that are all `C_1(0, b_k)` with weights
/// `ρ_k = r_{k;1}² + r_{k;2}²`:
/// `(P_2 P_6 − P_4²) / (P_2² P_4)` with `P_j = Σ b_k^j ρ_k`.
pub fn simple_rotation_tau_squared(b: &[f64], rho: &[f64]) -> f64 {
    let p = |j: i32| b.iter().zip(rho).map(|(b, r)| b.powi(j) * r).sum::<f64>();
    let (p2, p4, p6) = (p(2), p(4), p(6));
    (p2 * p6 - p4 * p4) / (p2 * p2 * p4)
}

/// Limit of `τ` from the spectral abscissa and the critical blocks, for `A`
/// given in real canonical form and `r0` in the same coordinates.
pub fn predict_tau_limit(
    s: &SpectralSummary,
    a: &RealMatrix,
    r0: &[f64],
) -> Result<LimitPrediction> {
    if r0.len() != a.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            found: r0.len(),
        });
    }
    let Some(blocks) = canonical_blocks(a) else {
        return Ok(LimitPrediction::inapplicable("not in real canonical form"));
    };
    for blk in &blocks {
        let o = blk.offset();
        if r0[o..o + blk.size()].iter().all(|&x| x == 0.0) {
            return Err(Error::Precondition(format!(
                "r0 has no component in the block at rows {}..{}; it lies outside the generic set S",
                o,
                o + blk.size()
            )));
        }
    }
    if !s.invertible {
        return Ok(LimitPrediction::inapplicable("det A = 0"));
    }
    if a.dim() < 3 {
        return Ok(LimitPrediction::new(PredictedLimit::TendsToZero, "planar curve"));
    }
    let m = blocks.iter().map(|b| b.real_part()).fold(f64::NEG_INFINITY, f64::max);
    let tol = ZERO_SNAP * scale_of(a);
    if m > tol {
        return Ok(LimitPrediction::new(
            PredictedLimit::TendsToZero,
            "positive spectral abscissa",
        ));
    }
    if m < -tol {
        return Ok(LimitPrediction::new(
            PredictedLimit::NotPredicted,
            "negative spectral abscissa",
        ));
    }
    let critical: Vec<&CanonicalBlock> =
        blocks.iter().filter(|b| b.real_part().abs() <= tol).collect();
    let mut rotations = Vec::new();
    for blk in &critical {
        match **blk {
            CanonicalBlock::Real { .. } => {
                return Ok(LimitPrediction::new(
                    PredictedLimit::NotPredicted,
                    "real critical block",
                ))
            }
            CanonicalBlock::Complex { m, .. } if m >= 2 => {
                return Ok(LimitPrediction::new(
                    PredictedLimit::TendsToZero,
                    "critical rotation chain of length >= 2",
                ))
            }
            CanonicalBlock::Complex { b, offset, .. } => {
                rotations.push((b, r0[offset].powi(2) + r0[offset + 1].powi(2)))
            }
        }
    }
    let b0 = rotations[0].0;
    if rotations.iter().all(|(b, _)| eq_rel(*b, b0)) {
        return Ok(LimitPrediction::new(
            PredictedLimit::TendsToZero,
            "single critical frequency",
        ));
    }
    let (b, rho): (Vec<f64>, Vec<f64>) = rotations.into_iter().unzip();
    Ok(LimitPrediction {
        value: Some(simple_rotation_tau_squared(&b, &rho).sqrt()),
        ..LimitPrediction::new(
            PredictedLimit::TendsToPositiveConst,
            "simple critical rotations with distinct frequencies",
        )
    })
}

fn eq_rel(x: f64, y: f64) -> bool {
    (x - y).abs() <= CANONICAL_TOL * x.abs().max(y.abs()).max(1.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;

    fn m(rows: &[&[f64]]) -> RealMatrix {
        RealMatrix::from_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    fn diag(v: &[f64]) -> RealMatrix {
        RealMatrix::diagonal(v).unwrap()
    }

    #[test]
    fn nilpotent_pair_summary() {
        let s = summarize(&m(&[&[0.0, 1.0], &[0.0, 0.0]])).unwrap();
        assert_eq!(s.m, 0.0);
        assert!(!s.invertible);
        assert!(!s.semisimple_critical);
        assert_eq!(classify_eigen_stability(&s).verdict, Verdict::Unstable);
    }

    #[test]
    fn rotation_summary() {
        let s = summarize(&m(&[&[0.0, 1.0], &[-1.0, 0.0]])).unwrap();
        assert_eq!(s.m, 0.0);
        assert!(s.invertible);
        assert!(s.semisimple_critical);
        assert!(!s.diagonalizable_real);
        assert_eq!(classify_eigen_stability(&s).verdict, Verdict::Stable);
    }

    #[test]
    fn diagonal_summary() {
        let s = summarize(&diag(&[-1.0, -2.0, -2.5])).unwrap();
        assert_eq!(s.m, -1.0);
        assert_eq!(s.lambda_order, vec![-1.0, -2.0, -2.5]);
        assert_eq!(s.n_reduced, Some(-2.0));
        assert!(s.invertible);
        assert_eq!(
            classify_eigen_stability(&s).verdict,
            Verdict::AsymptoticallyStable
        );
    }

    #[test]
    fn coupled_oscillator_is_stable() {
        let s = summarize(&catalog::coupled_oscillator()).unwrap();
        assert_eq!(classify_eigen_stability(&s).verdict, Verdict::Stable);
    }

    #[test]
    fn sign_patterns_decide_asymptotic_stability() {
        for mask in 0u32..16 {
            let v: Vec<f64> = (0..4)
                .map(|k| if mask >> k & 1 == 1 { 0.5 + k as f64 } else { -0.5 - k as f64 })
                .collect();
            let s = summarize(&diag(&v)).unwrap();
            let asym = classify_eigen_stability(&s).verdict == Verdict::AsymptoticallyStable;
            assert_eq!(asym, mask == 0);
        }
    }

    #[test]
    fn singular_system_structures() {
        let a = catalog::nilpotent_with_decay();
        let j = jordan_structure(&a, &summarize(&a).unwrap()).unwrap();
        assert_eq!(j.real_blocks, vec![RealBlocks { lambda: 0.0, sizes: vec![2] }]);
        assert_eq!(j.complex_blocks.len(), 1);
        let c = &j.complex_blocks[0];
        assert!((c.a + 1.0).abs() < 1e-12 && (c.b - 1.0).abs() < 1e-12 && c.sizes == vec![1]);

        let a = catalog::triple_decay_with_zero();
        let s = summarize(&a).unwrap();
        let j = jordan_structure(&a, &s).unwrap();
        assert_eq!(
            j.real_blocks,
            vec![
                RealBlocks { lambda: 0.0, sizes: vec![1] },
                RealBlocks { lambda: -1.0, sizes: vec![3] },
            ]
        );
        assert_eq!(classify_eigen_stability(&s).verdict, Verdict::Stable);
        assert_eq!(classify_eigen_stability(&summarize(&catalog::nilpotent_with_decay()).unwrap()).verdict, Verdict::Unstable);
    }

    #[test]
    fn diagonal_structure() {
        let a = diag(&[-1.0, -2.0, -3.0]);
        let j = jordan_structure(&a, &summarize(&a).unwrap()).unwrap();
        assert_eq!(j.dim(), 3);
        assert!(j.diagonalizable_real());
        assert_eq!(j.real_blocks.len(), 3);
    }

    #[test]
    fn hidden_structure_after_similarity() {
        // P J P^-1 with J = J_2(-1) ⊕ C_2(0.5, 2) ⊕ J_1(-1).
        let j = RealMatrix::block_diagonal(&[
            catalog::jordan_block(-1.0, 2),
            catalog::rotation_block(0.5, 2.0, 2),
            catalog::jordan_block(-1.0, 1),
        ])
        .unwrap();
        let p = m(&[
            &[1.0, 0.2, 0.0, 0.1, 0.0, 0.0, 0.3],
            &[0.0, 1.0, 0.3, 0.0, 0.0, 0.1, 0.0],
            &[0.1, 0.0, 1.0, 0.0, 0.2, 0.0, 0.0],
            &[0.0, 0.0, 0.1, 1.0, 0.0, 0.0, 0.2],
            &[0.2, 0.0, 0.0, 0.0, 1.0, 0.3, 0.0],
            &[0.0, 0.1, 0.0, 0.2, 0.0, 1.0, 0.0],
            &[0.0, 0.0, 0.2, 0.0, 0.1, 0.0, 1.0],
        ]);
        let a = &(&p * &j) * &p.try_inverse().unwrap();
        let s = summarize(&a).unwrap();
        let js = jordan_structure(&a, &s).unwrap();
        assert_eq!(js.real_blocks.len(), 1);
        assert_eq!(js.real_blocks[0].sizes, vec![2, 1]);
        assert_eq!(js.complex_blocks.len(), 1);
        assert_eq!(js.complex_blocks[0].sizes, vec![2]);
        assert!((s.m - 0.5).abs() < 1e-9);
    }

    #[test]
    fn close_distinct_eigenvalues_are_rejected() {
        let a = diag(&[-1.0, -1.0 - 5e-7, -3.0]);
        let err = jordan_structure(&a, &summarize(&a).unwrap()).unwrap_err();
        assert!(matches!(err, Error::IllConditionedSpectrum { .. }));
    }

    #[test]
    fn nearby_defective_blocks_keep_their_sizes() {
        use crate::catalog::{jordan_block, rotation_block};
        let a = RealMatrix::block_diagonal(&[
            jordan_block(0.45257, 2),
            jordan_block(0.45663, 3),
            rotation_block(-0.5, 1.0, 2),
            rotation_block(-0.503, 1.0, 1),
        ])
        .unwrap();
        let j = jordan_structure(&a, &summarize(&a).unwrap()).unwrap();
        let mut real: Vec<_> = j.real_blocks.iter().map(|b| b.sizes.clone()).collect();
        real.sort();
        assert_eq!(real, vec![vec![2], vec![3]]);
        let mut complex: Vec<_> = j.complex_blocks.iter().map(|b| b.sizes.clone()).collect();
        complex.sort();
        assert_eq!(complex, vec![vec![1], vec![2]]);
    }

    #[test]
    fn v2_degenerate_families() {
        let check = |a: RealMatrix| v2_degenerate(&jordan_structure(&a, &summarize(&a).unwrap()).unwrap());
        assert!(check(diag(&[3.0; 4])));
        assert!(check(
            RealMatrix::block_diagonal(&[catalog::jordan_block(0.0, 2), catalog::jordan_block(0.0, 2)]).unwrap()
        ));
        assert!(check(diag(&[3.0, 3.0, 0.0])));
        assert!(!check(diag(&[-1.0, -2.0])));
        assert!(!check(catalog::jordan_block(0.0, 3)));
        assert!(!check(catalog::rotation_block(0.0, 1.0, 1)));
    }

    #[test]
    fn kappa_trichotomy() {
        let p = |v: &[f64], i| predict_kappa_limit_diagonal(&summarize(&diag(v)).unwrap(), i).class;
        assert_eq!(p(&[-1.0, -2.0, -2.5], 2), PredictedLimit::TendsToInfinity);
        assert_eq!(p(&[-1.0, -2.0, -3.0], 1), PredictedLimit::TendsToPositiveConst);
        for i in 1..=2 {
            assert_eq!(p(&[1.0, -1.0, -2.0], i), PredictedLimit::TendsToZero);
        }
        assert_eq!(p(&[-1.0, -1.0, -2.0], 2), PredictedLimit::TendsToZero);
        let rot = summarize(&catalog::rotation_block(0.0, 1.0, 1)).unwrap();
        assert!(!predict_kappa_limit_diagonal(&rot, 1).applicable);
    }

    #[test]
    fn reads_canonical_blocks() {
        let a = RealMatrix::block_diagonal(&[
            catalog::rotation_block(0.0, 1.0, 2),
            catalog::jordan_block(-1.0, 1),
            catalog::jordan_block(2.0, 2),
        ])
        .unwrap();
        assert_eq!(
            canonical_blocks(&a).unwrap(),
            vec![
                CanonicalBlock::Complex { a: 0.0, b: 1.0, m: 2, offset: 0 },
                CanonicalBlock::Real { lambda: -1.0, p: 1, offset: 4 },
                CanonicalBlock::Real { lambda: 2.0, p: 2, offset: 5 },
            ]
        );
        assert!(canonical_blocks(&catalog::four_mode_decay()).is_none());
    }

    #[test]
    fn tau_limit_cases() {
        let predict = |a: &RealMatrix, r0: &[f64]| {
            predict_tau_limit(&summarize(a).unwrap(), a, r0).unwrap()
        };
        let growing = RealMatrix::block_diagonal(&[
            catalog::jordan_block(1.0, 1),
            catalog::rotation_block(-1.0, 2.0, 1),
        ])
        .unwrap();
        assert_eq!(predict(&growing, &[1.0; 3]).class, PredictedLimit::TendsToZero);

        let chain = RealMatrix::block_diagonal(&[
            catalog::rotation_block(0.0, 1.0, 2),
            catalog::jordan_block(-1.0, 1),
        ])
        .unwrap();
        assert_eq!(predict(&chain, &[1.0; 5]).class, PredictedLimit::TendsToZero);

        let p = predict(&catalog::two_frequency_rotation(), &[1.0, 0.0, 1.0, 0.0]);
        assert_eq!(p.class, PredictedLimit::TendsToPositiveConst);
        let want = (36.0f64 / 425.0).sqrt();
        assert!((p.value.unwrap() - want).abs() < 1e-15);
        assert!((want - 0.291043).abs() < 1e-6);

        let same = RealMatrix::block_diagonal(&[
            catalog::rotation_block(0.0, 2.0, 1),
            catalog::rotation_block(0.0, 2.0, 1),
        ])
        .unwrap();
        assert_eq!(predict(&same, &[1.0, 0.5, 0.2, 1.0]).class, PredictedLimit::TendsToZero);

        assert!(!predict(&catalog::four_mode_decay(), &[1.0; 4]).applicable);
        assert!(!predict(&catalog::nilpotent_with_decay(), &[1.0; 4]).applicable);
        assert_eq!(
            predict(&diag(&[-1.0, -2.0, -3.0]), &[1.0; 3]).class,
            PredictedLimit::NotPredicted
        );
    }

    #[test]
    fn tau_limit_rejects_empty_blocks() {
        let a = catalog::two_frequency_rotation();
        let err = predict_tau_limit(&summarize(&a).unwrap(), &a, &[1.0, 1.0, 0.0, 0.0]).unwrap_err();
        assert!(matches!(err, Error::Precondition(_)));
    }
}
