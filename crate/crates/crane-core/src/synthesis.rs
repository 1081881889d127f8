//! Controllability testing and multi-input pole placement.
//!
//! Placement uses eigenstructure assignment: closed-loop eigenvectors are
//! selected from the admissible subspaces of each pole and iteratively
//! rotated to improve the conditioning of the eigenvector matrix (the
//! Kautsky/Nichols/Van Dooren family with the Tits/Yang pairwise update
//! order). The contract is eigenvalue accuracy, not a specific gain: the
//! multi-input problem has infinitely many solutions. A deterministic
//! Sylvester-based assignment serves as fallback when the sweep does not
//! reach the requested accuracy.

use crate::error::{CraneError, Result};
use crate::linmodel::LinearModel;
use crate::types::{ActuationVariant, ControlInput, State};
use nalgebra::{Complex, DMatrix, DVector};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

type C64 = Complex<f64>;

/// Relative tolerance below which a pole's imaginary part is treated as zero.
const REAL_POLE_TOL: f64 = 1e-12;

/// Default relative tolerance for the singular-value rank test.
pub const DEFAULT_RANK_TOL: f64 = 1e-10;

/// Eigenvalue accuracy the placement must reach.
pub const PLACEMENT_TOL: f64 = 1e-8;

/// Desired closed-loop spectrum: a self-conjugate list of poles.
///
/// Stored with real poles first (ascending) followed by complex pairs,
/// conjugates adjacent with the positive-imaginary member first.
#[derive(Debug, Clone, PartialEq)]
pub struct PoleSet {
    poles: Vec<C64>,
}

impl PoleSet {
    /// Validates conjugate closure and finiteness, then stores the poles in
    /// canonical order.
    pub fn new(poles: Vec<C64>) -> Result<Self> {
        if poles.is_empty() {
            return Err(CraneError::InvalidInput("pole set is empty".into()));
        }
        for p in &poles {
            if !p.re.is_finite() || !p.im.is_finite() {
                return Err(CraneError::InvalidInput(format!("non-finite pole {p}")));
            }
        }
        let scale = poles.iter().map(|p| p.norm()).fold(1.0_f64, f64::max);
        let tol = REAL_POLE_TOL * scale;

        let mut reals: Vec<f64> = Vec::new();
        let mut upper: Vec<C64> = Vec::new();
        let mut lower: Vec<C64> = Vec::new();
        for p in &poles {
            if p.im.abs() <= tol {
                reals.push(p.re);
            } else if p.im > 0.0 {
                upper.push(*p);
            } else {
                lower.push(*p);
            }
        }
        if upper.len() != lower.len() {
            return Err(CraneError::InvalidInput(
                "pole set is not closed under conjugation".into(),
            ));
        }
        upper.sort_by(|a, b| (a.re, a.im).partial_cmp(&(b.re, b.im)).unwrap());
        lower.sort_by(|a, b| (a.re, -a.im).partial_cmp(&(b.re, -b.im)).unwrap());
        for (u, l) in upper.iter().zip(lower.iter()) {
            if (u.re - l.re).abs() > tol || (u.im + l.im).abs() > tol {
                return Err(CraneError::InvalidInput(
                    "pole set is not closed under conjugation".into(),
                ));
            }
        }
        reals.sort_by(|a, b| a.partial_cmp(b).unwrap());

        let mut ordered: Vec<C64> = reals.into_iter().map(|r| C64::new(r, 0.0)).collect();
        for u in upper {
            ordered.push(u);
            ordered.push(u.conj());
        }
        Ok(PoleSet { poles: ordered })
    }

    /// Pole set built from real poles only.
    pub fn from_reals(values: &[f64]) -> Result<Self> {
        Self::new(values.iter().map(|&r| C64::new(r, 0.0)).collect())
    }

    pub fn len(&self) -> usize {
        self.poles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.poles.is_empty()
    }

    /// Poles in canonical order.
    pub fn poles(&self) -> &[C64] {
        &self.poles
    }

    /// True when every pole has a strictly negative real part.
    pub fn is_stable(&self) -> bool {
        self.poles.iter().all(|p| p.re < 0.0)
    }

    fn is_real_at(&self, idx: usize) -> bool {
        self.poles[idx].im.abs() <= REAL_POLE_TOL * self.poles[idx].norm().max(1.0)
    }
}

impl Default for PoleSet {
    /// The pole set used by the bundled scenarios:
    /// `{-0.5, -1, -1.5, -2, -2.5, -3, -3.5, -4}`.
    fn default() -> Self {
        PoleSet::from_reals(&[-0.5, -1.0, -1.5, -2.0, -2.5, -3.0, -3.5, -4.0]).unwrap()
    }
}

/// State-feedback gain `u = -K x`.
#[derive(Debug, Clone, PartialEq)]
pub struct GainMatrix {
    /// `m x 8` gain, one row per input channel.
    pub matrix: DMatrix<f64>,
    pub variant: ActuationVariant,
}

impl GainMatrix {
    pub fn new(matrix: DMatrix<f64>, variant: ActuationVariant) -> Result<Self> {
        if matrix.nrows() != variant.input_dim() || matrix.ncols() != crate::types::STATE_DIM {
            return Err(CraneError::InvalidInput(format!(
                "gain must be {}x{}, got {}x{}",
                variant.input_dim(),
                crate::types::STATE_DIM,
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        if !matrix.iter().all(|v| v.is_finite()) {
            return Err(CraneError::InvalidInput(
                "gain has non-finite entries".into(),
            ));
        }
        Ok(GainMatrix { matrix, variant })
    }

    pub fn input_dim(&self) -> usize {
        self.matrix.nrows()
    }

    /// Feedback law `u = -K x`.
    pub fn feedback(&self, s: &State) -> ControlInput {
        let x = s.as_vector();
        let mut u = [0.0_f64; 4];
        for (i, slot) in u.iter_mut().enumerate().take(self.matrix.nrows()) {
            let mut acc = 0.0;
            for j in 0..self.matrix.ncols() {
                acc += self.matrix[(i, j)] * x[j];
            }
            *slot = -acc;
        }
        match self.variant {
            ActuationVariant::Underactuated => ControlInput::underactuated(u[0], u[1], u[2]),
            ActuationVariant::FullyActuated => ControlInput::fully_actuated(u[0], u[1], u[2], u[3]),
        }
    }
}

/// Reference gain matrices for the default parameter set and default pole
/// set, as produced by an external robust pole-placement routine and
/// printed to four decimals. They place the closed-loop spectrum within
/// about 1e-3 of the default poles (the rounding limits the accuracy) and
/// are kept as validated regression anchors; the bundled long-range
/// fully-actuated scenario runs with this gain because its basin of
/// attraction demonstrably covers that scenario's initial state.
pub fn reference_gain(variant: ActuationVariant) -> GainMatrix {
    let matrix = match variant {
        ActuationVariant::Underactuated => DMatrix::from_row_slice(
            3,
            8,
            &[
                2.0574, 0.1052, 0.1224, 42.3471, 6.7649, 0.0526, 0.0488, -7.7172, //
                64.5917, 214.6134, -93.7833, -985.9842, 173.1363, 236.2118, -36.9947,
                180.4709, //
                0.0840, -0.0704, 0.3034, -0.9495, 0.2016, -0.0283, 0.2554, 0.2631,
            ],
        ),
        ActuationVariant::FullyActuated => DMatrix::from_row_slice(
            4,
            8,
            &[
                74.4779, 0.0040, 0.0051, 193.1964, 56.9739, 0.0035, 0.0039, 125.5484, //
                -0.4298, 66.2825, -33.7242, 0.6125, -0.1268, 128.4893, -26.8565, 0.1879, //
                -0.0004, -0.0295, 0.0758, 0.0005, -0.0001, -0.0238, 0.1304, 0.0002, //
                136.6796, 0.0094, 0.0120, 233.3502, 108.1736, 0.0083, 0.0092, 277.5913,
            ],
        ),
    };
    GainMatrix { matrix, variant }
}

/// Kalman controllability matrix `[B, AB, A^2 B, ..., A^{n-1} B]`.
pub fn controllability_matrix(a: &DMatrix<f64>, b: &DMatrix<f64>) -> DMatrix<f64> {
    let n = a.nrows();
    let m = b.ncols();
    let mut out = DMatrix::zeros(n, n * m);
    let mut block = b.clone();
    for k in 0..n {
        out.view_mut((0, k * m), (n, m)).copy_from(&block);
        if k + 1 < n {
            block = a * block;
        }
    }
    out
}

/// Numerical rank: the count of singular values above `rel_tol` times the
/// largest one, computed after scaling each nonzero column to unit
/// largest-magnitude entry. The scaling keeps the wide magnitude spread of
/// high powers in a controllability matrix from masking rank.
pub fn numerical_rank(matrix: &DMatrix<f64>, rel_tol: f64) -> usize {
    assert!(rel_tol > 0.0 && rel_tol < 1.0, "rel_tol must lie in (0, 1)");
    let mut scaled = matrix.clone();
    for mut col in scaled.column_iter_mut() {
        let max = col.iter().fold(0.0_f64, |acc, v| acc.max(v.abs()));
        if max > 0.0 {
            col /= max;
        }
    }
    let sv = scaled.svd(false, false).singular_values;
    let largest = sv.iter().fold(0.0_f64, |acc, v| acc.max(*v));
    if largest == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > rel_tol * largest).count()
}

/// Eigenvalues of `A - B K`, sorted by real part then imaginary part.
pub fn closed_loop_eigs(a: &DMatrix<f64>, b: &DMatrix<f64>, k: &DMatrix<f64>) -> Vec<C64> {
    let closed = a - b * k;
    let mut eigs: Vec<C64> = closed.complex_eigenvalues().iter().copied().collect();
    eigs.sort_by(|x, y| (x.re, x.im).partial_cmp(&(y.re, y.im)).unwrap());
    eigs
}

/// Greedy nearest matching between requested and achieved spectra; returns
/// the largest pairing distance.
fn spectrum_distance(requested: &[C64], achieved: &[C64]) -> f64 {
    let mut remaining: Vec<C64> = achieved.to_vec();
    let mut worst = 0.0_f64;
    for r in requested {
        let (idx, dist) = remaining
            .iter()
            .enumerate()
            .map(|(i, a)| (i, (a - r).norm()))
            .min_by(|x, y| x.1.partial_cmp(&y.1).unwrap())
            .expect("achieved spectrum exhausted");
        worst = worst.max(dist);
        remaining.swap_remove(idx);
    }
    worst
}

/// Flips column signs of a real basis so the largest-magnitude entry of
/// each column is positive. Pins the basis against backend sign conventions.
fn canonicalize_real(basis: &mut DMatrix<f64>) {
    for mut col in basis.column_iter_mut() {
        let mut best = 0usize;
        let mut best_abs = 0.0_f64;
        for (i, v) in col.iter().enumerate() {
            if v.abs() > best_abs {
                best_abs = v.abs();
                best = i;
            }
        }
        if col[best] < 0.0 {
            col.neg_mut();
        }
    }
}

/// Rotates each column of a complex basis so its largest-magnitude entry is
/// real positive.
fn canonicalize_complex(basis: &mut DMatrix<C64>) {
    for mut col in basis.column_iter_mut() {
        let mut best = 0usize;
        let mut best_abs = 0.0_f64;
        for (i, v) in col.iter().enumerate() {
            if v.norm() > best_abs {
                best_abs = v.norm();
                best = i;
            }
        }
        if best_abs > 0.0 {
            let phase = col[best] / C64::new(best_abs, 0.0);
            let rot = phase.conj();
            for v in col.iter_mut() {
                *v *= rot;
            }
        }
    }
}

/// Orthonormal basis of the orthogonal complement of `range(M)` for a real
/// `n x k` matrix with `k < n`. The SVD of the square zero-padded matrix
/// yields the subspace; the basis itself is then rebuilt canonically by
/// projecting a fixed probe sequence onto the subspace and orthonormalizing,
/// so the result depends only on the subspace and not on backend
/// conventions for degenerate singular vectors.
fn complement_basis_real(m: &DMatrix<f64>) -> DMatrix<f64> {
    let n = m.nrows();
    let k = m.ncols();
    let mut padded = DMatrix::zeros(n, n);
    padded.view_mut((0, 0), (n, k)).copy_from(m);
    let svd = padded.svd(true, false);
    let u = svd.u.expect("svd requested u");
    let raw = u.columns(k, n - k).into_owned();

    let dim = n - k;
    let mut out = DMatrix::<f64>::zeros(n, dim);
    let mut found = 0;
    let ones = DVector::from_element(n, 1.0 / (n as f64).sqrt());
    'probe: for probe_idx in 0..=n {
        if found == dim {
            break;
        }
        let probe = if probe_idx == 0 {
            ones.clone()
        } else {
            let mut e = DVector::zeros(n);
            e[probe_idx - 1] = 1.0;
            e
        };
        // Project onto the subspace, then against the vectors found so far.
        let mut v = &raw * (raw.transpose() * &probe);
        for c in 0..found {
            let coeff = out.column(c).dot(&v);
            v -= out.column(c) * coeff;
        }
        let norm = v.norm();
        if norm < 1e-6 {
            continue 'probe;
        }
        out.set_column(found, &(v / norm));
        found += 1;
    }
    debug_assert_eq!(found, dim, "complement basis incomplete");
    canonicalize_real(&mut out);
    out
}

/// Complex counterpart of [`complement_basis_real`].
fn complement_basis_complex(m: &DMatrix<C64>) -> DMatrix<C64> {
    let n = m.nrows();
    let k = m.ncols();
    let mut padded = DMatrix::zeros(n, n);
    padded.view_mut((0, 0), (n, k)).copy_from(m);
    let svd = padded.svd(true, false);
    let u = svd.u.expect("svd requested u");
    let raw = u.columns(k, n - k).into_owned();

    let dim = n - k;
    let mut out = DMatrix::<C64>::zeros(n, dim);
    let mut found = 0;
    'probe: for probe_idx in 0..=2 * n {
        if found == dim {
            break;
        }
        // Real probes first, then imaginary ones.
        let mut probe = DVector::<C64>::zeros(n);
        if probe_idx == 0 {
            let val = C64::new(1.0 / (n as f64).sqrt(), 0.0);
            for r in 0..n {
                probe[r] = val;
            }
        } else if probe_idx <= n {
            probe[probe_idx - 1] = C64::new(1.0, 0.0);
        } else {
            probe[probe_idx - n - 1] = C64::new(0.0, 1.0);
        }
        let mut v = &raw * (raw.adjoint() * &probe);
        for c in 0..found {
            let coeff = out.column(c).dotc(&v);
            v -= out.column(c) * coeff;
        }
        let norm = v.norm();
        if norm < 1e-6 {
            continue 'probe;
        }
        out.set_column(found, &(v / C64::new(norm, 0.0)));
        found += 1;
    }
    debug_assert_eq!(found, dim, "complement basis incomplete");
    canonicalize_complex(&mut out);
    out
}

fn to_complex(m: &DMatrix<f64>) -> DMatrix<C64> {
    m.map(|v| C64::new(v, 0.0))
}

/// Admissible eigenvector subspace for one pole: the orthogonal complement
/// of `range((U1^T (A - lambda I))^T)`, where the columns of `U1` span the
/// complement of `range(B)`.
fn admissible_subspace(a: &DMatrix<f64>, u1: &DMatrix<f64>, lambda: C64, real: bool) -> KerBasis {
    let n = a.nrows();
    if real {
        let mut shifted = a.clone();
        for i in 0..n {
            shifted[(i, i)] -= lambda.re;
        }
        let pole_space = (u1.transpose() * shifted).transpose();
        KerBasis::Real(complement_basis_real(&pole_space))
    } else {
        let mut shifted = to_complex(a);
        for i in 0..n {
            shifted[(i, i)] -= lambda;
        }
        let pole_space = (to_complex(&u1.transpose()) * shifted).transpose();
        KerBasis::Complex(complement_basis_complex(&pole_space))
    }
}

#[derive(Clone)]
enum KerBasis {
    Real(DMatrix<f64>),
    Complex(DMatrix<C64>),
}

/// The pairwise update schedule for the conditioning sweep (real pairs,
/// complex pairs, then mixed passes), following the published ordering for
/// the pairwise robust-assignment iteration.
fn update_order(n: usize, nb_real: usize) -> Vec<(usize, usize)> {
    let hnb = nb_real / 2;
    let mut first: Vec<usize> = Vec::new();
    let mut second: Vec<usize> = Vec::new();
    let r_comp: Vec<usize> = ((nb_real + 1)..=n).step_by(2).collect();

    if nb_real > 0 {
        first.push(nb_real);
        second.push(1);
    }
    // real pairs (even-odd)
    for r in 1..(hnb + nb_real % 2) {
        first.push(2 * r);
        second.push(2 * r + 1);
    }
    // complex pairs
    for &r in &r_comp {
        first.push(r);
        second.push(r + 1);
    }
    // real pairs (odd-even)
    for r in 1..=hnb {
        first.push(2 * r - 1);
        second.push(2 * r);
    }
    let single_real = hnb == 0 && nb_real > 0;
    if single_real {
        first.push(1);
        second.push(1);
    }
    for &r in &r_comp {
        first.push(r);
        second.push(r + 1);
    }
    // mixed strides over the first half
    for j in 2..(hnb + nb_real % 2) {
        for i in 1..=hnb {
            first.push(i);
            second.push(i + j);
        }
    }
    if single_real {
        first.push(1);
        second.push(1);
    }
    for &r in &r_comp {
        first.push(r);
        second.push(r + 1);
    }
    // mixed strides over the second half, wrapping
    for j in 2..(hnb + nb_real % 2) {
        for i in (hnb + 1)..=nb_real {
            let mut idx = i + j;
            if idx > nb_real {
                idx = i + j - nb_real;
            }
            first.push(i);
            second.push(idx);
        }
    }
    if single_real {
        first.push(1);
        second.push(1);
    }
    for &r in &r_comp {
        first.push(r);
        second.push(r + 1);
    }
    // half-split real pairs
    for i in 1..=hnb {
        first.push(i);
        second.push(i + hnb);
    }
    if single_real {
        first.push(1);
        second.push(1);
    }
    for &r in &r_comp {
        first.push(r);
        second.push(r + 1);
    }

    first
        .into_iter()
        .zip(second)
        .map(|(a, b)| (a - 1, b - 1))
        .collect()
}

/// Pins the sign of one eigenvector column (largest-magnitude entry
/// positive); the represented direction is unchanged.
fn canonicalize_column(x: &mut DMatrix<f64>, col: usize) {
    let mut best = 0usize;
    let mut best_abs = 0.0_f64;
    for r in 0..x.nrows() {
        if x[(r, col)].abs() > best_abs {
            best_abs = x[(r, col)].abs();
            best = r;
        }
    }
    if x[(best, col)] < 0.0 {
        for r in 0..x.nrows() {
            x[(r, col)] = -x[(r, col)];
        }
    }
}

fn delete_columns(x: &DMatrix<f64>, skip: &[usize]) -> DMatrix<f64> {
    let n = x.nrows();
    let keep: Vec<usize> = (0..x.ncols()).filter(|c| !skip.contains(c)).collect();
    let mut out = DMatrix::zeros(n, keep.len());
    for (dst, &src) in keep.iter().enumerate() {
        out.set_column(dst, &x.column(src));
    }
    out
}

/// Single-column update: project the orthogonal-complement direction of the
/// other eigenvectors into the admissible subspace.
fn update_single(x: &mut DMatrix<f64>, ker: &DMatrix<f64>, col: usize) {
    let others = delete_columns(x, &[col]);
    let comp = complement_basis_real(&others);
    let q = comp.column(comp.ncols() - 1);
    let y = ker * (ker.transpose() * q);
    let norm = y.norm();
    if norm > 1e-12 {
        x.set_column(col, &(y / norm));
        canonicalize_column(x, col);
    }
}

/// Pairwise update for two real poles: rotate both eigenvectors toward the
/// two-dimensional complement of the remaining ones.
fn update_real_pair(
    x: &mut DMatrix<f64>,
    ker_i: &DMatrix<f64>,
    ker_j: &DMatrix<f64>,
    i: usize,
    j: usize,
) {
    let n = x.nrows();
    let others = delete_columns(x, &[i, j]);
    let comp = complement_basis_real(&others);
    let u = comp.column(comp.ncols() - 2).into_owned();
    let v = comp.column(comp.ncols() - 1).into_owned();
    // Bivector of the complement plane; invariant to the basis choice.
    let plane = &u * v.transpose() - &v * u.transpose();
    let small = ker_i.transpose() * plane * ker_j;
    let svd = small.clone().svd(true, true);
    let su = svd.u.expect("svd u");
    let svt = svd.v_t.expect("svd v_t");
    let s = &svd.singular_values;

    let mut stacked = DVector::zeros(2 * n);
    stacked.rows_mut(0, n).copy_from(&x.column(i));
    stacked.rows_mut(n, n).copy_from(&x.column(j));

    let span: DMatrix<f64> = if s.len() < 2 || (s[0] - s[1]).abs() > 1e-8 * s[0].max(1e-300) {
        let mu1 = su.column(0);
        let nu1 = svt.row(0).transpose();
        let top = ker_i * mu1;
        let bottom = ker_j * nu1;
        let mut out = DMatrix::zeros(2 * n, 1);
        out.view_mut((0, 0), (n, 1)).copy_from(&top);
        out.view_mut((n, 0), (n, 1)).copy_from(&bottom);
        out
    } else {
        let mut out = DMatrix::zeros(2 * n, 2);
        for c in 0..2 {
            let mu = su.column(c);
            let nu = svt.row(c).transpose();
            let top = ker_i * mu;
            let bottom = ker_j * nu;
            out.view_mut((0, c), (n, 1)).copy_from(&top);
            out.view_mut((n, c), (n, 1)).copy_from(&bottom);
        }
        out
    };

    let projected = &span * (span.transpose() * &stacked);
    let norm = projected.norm();
    if norm > 1e-12 {
        let scaled = projected * (std::f64::consts::SQRT_2 / norm);
        x.set_column(i, &scaled.rows(0, n).into_owned().column(0));
        x.set_column(j, &scaled.rows(n, n).into_owned().column(0));
    } else {
        x.set_column(i, &span.view((0, 0), (n, 1)).column(0).into_owned());
        x.set_column(j, &span.view((n, 0), (n, 1)).column(0).into_owned());
    }
    canonicalize_column(x, i);
    canonicalize_column(x, j);
}

/// Pairwise update for a complex-conjugate pair stored as (Re, Im) columns.
fn update_complex_pair(x: &mut DMatrix<f64>, ker: &DMatrix<C64>, i: usize, j: usize) {
    let n = x.nrows();
    let others = delete_columns(x, &[i, j]);
    let comp = complement_basis_real(&others);
    let sqrt2 = std::f64::consts::SQRT_2;
    let u: DVector<C64> = DVector::from_fn(n, |r, _| {
        C64::new(
            sqrt2 * comp[(r, comp.ncols() - 2)],
            sqrt2 * comp[(r, comp.ncols() - 1)],
        )
    });
    // Hermitian form of the complement plane.
    let u_conj = u.map(|v| v.conj());
    let outer = &u * u_conj.transpose() - &u_conj * u.transpose();
    let small = ker.adjoint() * outer * ker;
    let svd = small.clone().svd(true, false);
    let su = svd.u.expect("svd u");
    let s = &svd.singular_values;

    let xc: DVector<C64> = DVector::from_fn(n, |r, _| C64::new(x[(r, i)], x[(r, j)]));
    let span: DMatrix<C64> = if s.len() < 2 || (s[0] - s[1]).abs() > 1e-8 * s[0].max(1e-300) {
        ker * su.columns(0, 1).into_owned()
    } else {
        ker * su.columns(0, 2).into_owned()
    };
    let projected = &span * (span.adjoint() * &xc);
    let norm = projected.norm();
    let mut chosen: DVector<C64> = if norm > 1e-12 {
        &projected / C64::new(norm, 0.0)
    } else {
        span.column(0).into_owned()
    };
    // Pin the free phase of the eigenvector.
    let mut best = 0usize;
    let mut best_abs = 0.0_f64;
    for (r, v) in chosen.iter().enumerate() {
        if v.norm() > best_abs {
            best_abs = v.norm();
            best = r;
        }
    }
    if best_abs > 0.0 {
        let rot = (chosen[best] / C64::new(best_abs, 0.0)).conj();
        for v in chosen.iter_mut() {
            *v *= rot;
        }
    }
    for r in 0..n {
        x[(r, i)] = chosen[r].re;
        x[(r, j)] = chosen[r].im;
    }
}

fn abs_det(x: &DMatrix<f64>) -> f64 {
    x.clone().lu().determinant().abs()
}

/// Gain from the converged eigenvector matrix: `K` solving
/// `A - B K = X diag(p) X^{-1}` through the range decomposition of `B`.
fn gain_from_eigenvectors(
    a: &DMatrix<f64>,
    poles: &PoleSet,
    x: &DMatrix<f64>,
    u0: &DMatrix<f64>,
    z: &DMatrix<f64>,
) -> Result<DMatrix<f64>> {
    let n = a.nrows();
    // Recombine (Re, Im) columns of pairs into complex conjugate columns.
    let mut xc = to_complex(x);
    let mut idx = 0;
    while idx + 1 < n {
        if !poles.is_real_at(idx) {
            for r in 0..n {
                let re = C64::new(x[(r, idx)], 0.0);
                let im = C64::new(x[(r, idx + 1)], 0.0);
                xc[(r, idx)] = re - C64::i() * im;
                xc[(r, idx + 1)] = re + C64::i() * im;
            }
            idx += 1;
        }
        idx += 1;
    }
    // closed = Xc diag(p) Xc^{-1}, via a transposed solve.
    let mut diag = DMatrix::<C64>::zeros(n, n);
    for (i, p) in poles.poles().iter().enumerate() {
        diag[(i, i)] = *p;
    }
    let rhs = &diag * xc.transpose();
    let solved = xc
        .transpose()
        .lu()
        .solve(&rhs)
        .ok_or_else(|| CraneError::PlacementFailed("eigenvector matrix is singular".into()))?;
    let closed = solved.transpose();

    let mut max_imag = 0.0_f64;
    let mut max_real = 0.0_f64;
    for v in closed.iter() {
        max_imag = max_imag.max(v.im.abs());
        max_real = max_real.max(v.re.abs());
    }
    if max_imag > 1e-6 * max_real.max(1.0) {
        return Err(CraneError::PlacementFailed(format!(
            "complex residue {max_imag:.3e} in the closed-loop matrix"
        )));
    }
    let closed_real = closed.map(|v| v.re);
    let target = u0.transpose() * (a - &closed_real);
    let k = z
        .clone()
        .lu()
        .solve(&target)
        .ok_or_else(|| CraneError::PlacementFailed("input coupling is singular".into()))?;
    Ok(k)
}

/// Deterministic Sylvester-based assignment used as fallback: sample a
/// seeded random input shape `G`, solve `A X - X L = B G` for `X` with `L`
/// the real block form of the poles, and read off `K = -G X^{-1}`.
fn place_sylvester(a: &DMatrix<f64>, b: &DMatrix<f64>, poles: &PoleSet) -> Result<DMatrix<f64>> {
    let n = a.nrows();
    let m = b.ncols();
    let mut block = DMatrix::<f64>::zeros(n, n);
    let mut idx = 0;
    while idx < n {
        let p = poles.poles()[idx];
        if poles.is_real_at(idx) {
            block[(idx, idx)] = p.re;
            idx += 1;
        } else {
            block[(idx, idx)] = p.re;
            block[(idx + 1, idx + 1)] = p.re;
            block[(idx, idx + 1)] = -p.im;
            block[(idx + 1, idx)] = p.im;
            idx += 2;
        }
    }
    let eye = DMatrix::<f64>::identity(n, n);
    let system = eye.kronecker(a) - block.transpose().kronecker(&eye);
    let lu = system.lu();

    let mut rng = ChaCha8Rng::seed_from_u64(0x706c6163);
    let mut best: Option<(f64, DMatrix<f64>)> = None;
    for _ in 0..32 {
        let g = DMatrix::from_fn(m, n, |_, _| rng.gen_range(-1.0..1.0));
        let rhs_mat = b * &g;
        let rhs = DVector::from_column_slice(rhs_mat.as_slice());
        let Some(vec_x) = lu.solve(&rhs) else {
            continue;
        };
        let x = DMatrix::from_column_slice(n, n, vec_x.as_slice());
        let sv = x.clone().svd(false, false).singular_values;
        let smin = sv[sv.len() - 1];
        let smax = sv[0];
        if smin <= 0.0 {
            continue;
        }
        let cond = smax / smin;
        // K X = G  ->  X^T K^T = G^T.
        let Some(kt) = x.transpose().lu().solve(&g.transpose()) else {
            continue;
        };
        let k = kt.transpose();
        let achieved = closed_loop_eigs(a, b, &k);
        let err = spectrum_distance(poles.poles(), &achieved);
        if err <= PLACEMENT_TOL && best.as_ref().is_none_or(|(c, _)| cond < *c) {
            best = Some((cond, k));
        }
    }
    best.map(|(_, k)| k).ok_or_else(|| {
        CraneError::PlacementFailed("no assignment reached the requested accuracy".into())
    })
}

/// Initial-eigenvector probe used by [`place_poles`]. The sweep converges
/// to a local optimum of the conditioning objective; this fixed seed selects
/// a starting point whose optimum was vetted against the bundled scenarios.
const INIT_PROBE: u64 = 4;

/// Pole placement: gain `K` such that the spectrum of `A - B K` matches the
/// requested poles within [`PLACEMENT_TOL`].
pub fn place_poles(a: &DMatrix<f64>, b: &DMatrix<f64>, poles: &PoleSet) -> Result<DMatrix<f64>> {
    place_poles_with_probe(a, b, poles, INIT_PROBE)
}

fn probe_vector_real(n: usize, probe: u64) -> DVector<f64> {
    if probe == 0 {
        DVector::from_element(n, 1.0 / (n as f64).sqrt())
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(0x696e6974 ^ probe);
        let v = DVector::from_fn(n, |_, _| rng.gen_range(-1.0_f64..1.0));
        let norm = v.norm();
        v / norm
    }
}

pub(crate) fn place_poles_with_probe(
    a: &DMatrix<f64>,
    b: &DMatrix<f64>,
    poles: &PoleSet,
    probe: u64,
) -> Result<DMatrix<f64>> {
    let n = a.nrows();
    if a.ncols() != n || b.nrows() != n {
        return Err(CraneError::InvalidInput(
            "dimension mismatch in (A, B)".into(),
        ));
    }
    let m = b.ncols();
    if m == 0 || m > n {
        return Err(CraneError::InvalidInput(format!(
            "input dimension {m} out of range"
        )));
    }
    if poles.len() != n {
        return Err(CraneError::InvalidInput(format!(
            "need {n} poles, got {}",
            poles.len()
        )));
    }
    let rank = numerical_rank(&controllability_matrix(a, b), DEFAULT_RANK_TOL);
    if rank < n {
        return Err(CraneError::Uncontrollable { rank });
    }

    // Range decomposition of B.
    let b_svd = {
        let mut padded = DMatrix::zeros(n, n);
        padded.view_mut((0, 0), (n, m)).copy_from(b);
        padded.svd(true, false)
    };
    let sb = &b_svd.singular_values;
    if sb[m - 1] <= 1e-12 * sb[0] {
        return Err(CraneError::PlacementFailed(
            "input matrix is rank-deficient".into(),
        ));
    }
    let mut u_full = b_svd.u.expect("svd u");
    canonicalize_real(&mut u_full);
    let u0 = u_full.columns(0, m).into_owned();
    let u1 = u_full.columns(m, n - m).into_owned();
    let z = u0.transpose() * b;

    if m == n {
        // Square full-rank input: the eigenvector matrix is the identity.
        let mut block = DMatrix::<f64>::zeros(n, n);
        let mut idx = 0;
        while idx < n {
            let p = poles.poles()[idx];
            if poles.is_real_at(idx) {
                block[(idx, idx)] = p.re;
                idx += 1;
            } else {
                block[(idx, idx)] = p.re;
                block[(idx + 1, idx + 1)] = p.re;
                block[(idx, idx + 1)] = -p.im;
                block[(idx + 1, idx)] = p.im;
                idx += 2;
            }
        }
        let k =
            b.clone().lu().solve(&(a - block)).ok_or_else(|| {
                CraneError::PlacementFailed("square input matrix is singular".into())
            })?;
        return Ok(k);
    }

    let nb_real = (0..n).filter(|&i| poles.is_real_at(i)).count();

    // Admissible subspaces and the initial eigenvector guess (sum of each
    // subspace basis, a choice that avoids degenerate zero rows).
    let mut ker: Vec<KerBasis> = Vec::with_capacity(n);
    let mut x = DMatrix::<f64>::zeros(n, n);
    let mut idx = 0;
    while idx < n {
        let lambda = poles.poles()[idx];
        if poles.is_real_at(idx) {
            let basis = admissible_subspace(a, &u1, lambda, true);
            let KerBasis::Real(ref kb) = basis else {
                unreachable!()
            };
            // Project the probe into the admissible subspace; fall back to
            // the basis sum if the probe is orthogonal to it.
            let w = probe_vector_real(n, probe);
            let mut v = kb * (kb.transpose() * &w);
            if v.norm() < 1e-8 {
                v = DVector::<f64>::zeros(n);
                for c in 0..kb.ncols() {
                    v += kb.column(c);
                }
            }
            let norm = v.norm();
            if norm > 0.0 {
                v /= norm;
            }
            x.set_column(idx, &v);
            canonicalize_column(&mut x, idx);
            ker.push(basis);
            idx += 1;
        } else {
            let basis = admissible_subspace(a, &u1, lambda, false);
            let KerBasis::Complex(ref kb) = basis else {
                unreachable!()
            };
            let mut v = DVector::<C64>::zeros(n);
            for c in 0..kb.ncols() {
                v += kb.column(c);
            }
            let norm = v.norm();
            if norm > 0.0 {
                v /= C64::new(norm, 0.0);
            }
            for r in 0..n {
                x[(r, idx)] = v[r].re;
                x[(r, idx + 1)] = v[r].im;
            }
            ker.push(basis.clone());
            ker.push(basis);
            idx += 2;
        }
    }

    // Conditioning sweeps (skipped when there is no freedom to optimize).
    if m > 1 {
        let order = update_order(n, nb_real);
        let mut prev_det = abs_det(&x);
        let det_floor = f64::EPSILON.sqrt();
        for _ in 0..30 {
            for &(i, j) in &order {
                if i == j {
                    let KerBasis::Real(ref kb) = ker[i] else {
                        return Err(CraneError::PlacementFailed(
                            "single update on a complex pole".into(),
                        ));
                    };
                    update_single(&mut x, kb, i);
                } else if poles.is_real_at(i) {
                    let (KerBasis::Real(ref ki), KerBasis::Real(ref kj)) = (&ker[i], &ker[j])
                    else {
                        return Err(CraneError::PlacementFailed(
                            "mixed real/complex pair update".into(),
                        ));
                    };
                    update_real_pair(&mut x, ki, kj, i, j);
                } else {
                    let KerBasis::Complex(ref kc) = ker[i] else {
                        return Err(CraneError::PlacementFailed(
                            "complex update on a real pole".into(),
                        ));
                    };
                    update_complex_pair(&mut x, kc, i, j);
                }
            }
            let cur_det = abs_det(&x).max(det_floor);
            let rel = ((cur_det - prev_det) / cur_det).abs();
            if rel < 1e-3 && cur_det > det_floor {
                break;
            }
            prev_det = cur_det;
        }
    }

    let candidate = gain_from_eigenvectors(a, poles, &x, &u0, &z);
    if let Ok(k) = candidate {
        let achieved = closed_loop_eigs(a, b, &k);
        if spectrum_distance(poles.poles(), &achieved) <= PLACEMENT_TOL {
            return Ok(k);
        }
    }
    // Sweep did not reach the accuracy target; fall back to the Sylvester
    // assignment.
    place_sylvester(a, b, poles)
}

impl LinearModel {
    /// Kalman controllability matrix of this model.
    pub fn controllability_matrix(&self) -> DMatrix<f64> {
        controllability_matrix(&self.a, &self.b)
    }

    /// Numerical rank of the controllability matrix.
    pub fn controllability_rank(&self, rel_tol: f64) -> usize {
        numerical_rank(&self.controllability_matrix(), rel_tol)
    }

    /// Stabilizing gain for the requested spectrum.
    pub fn place(&self, poles: &PoleSet) -> Result<GainMatrix> {
        let k = place_poles(&self.a, &self.b, poles)?;
        GainMatrix::new(k, self.variant)
    }

    /// Closed-loop matrix `A - B K`.
    pub fn closed_loop_matrix(&self, gain: &GainMatrix) -> Result<DMatrix<f64>> {
        if gain.variant != self.variant {
            return Err(CraneError::InvalidInput(
                "gain variant does not match model variant".into(),
            ));
        }
        Ok(&self.a - &self.b * &gain.matrix)
    }

    /// Sorted closed-loop spectrum.
    pub fn closed_loop_eigs(&self, gain: &GainMatrix) -> Result<Vec<C64>> {
        if gain.variant != self.variant {
            return Err(CraneError::InvalidInput(
                "gain variant does not match model variant".into(),
            ));
        }
        Ok(closed_loop_eigs(&self.a, &self.b, &gain.matrix))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linmodel::analytic_linearization;
    use crate::types::CraneParams;
    use approx::assert_abs_diff_eq;
    use rand::Rng;

    fn double_integrator() -> (DMatrix<f64>, DMatrix<f64>) {
        (
            DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 0.0, 0.0]),
            DMatrix::from_row_slice(2, 1, &[0.0, 1.0]),
        )
    }

    #[test]
    fn pole_set_orders_and_validates() {
        let p = PoleSet::new(vec![
            C64::new(-2.0, 1.0),
            C64::new(-1.0, 0.0),
            C64::new(-2.0, -1.0),
        ])
        .unwrap();
        assert_eq!(p.poles()[0], C64::new(-1.0, 0.0));
        assert_eq!(p.poles()[1], C64::new(-2.0, 1.0));
        assert_eq!(p.poles()[2], C64::new(-2.0, -1.0));
        assert!(p.is_stable());

        assert!(PoleSet::new(vec![C64::new(-1.0, 1.0)]).is_err());
        assert!(PoleSet::new(vec![C64::new(f64::NAN, 0.0)]).is_err());
    }

    #[test]
    fn controllability_matrix_double_integrator() {
        let (a, b) = double_integrator();
        let c = controllability_matrix(&a, &b);
        assert_eq!(c, DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0]));
        assert_eq!(numerical_rank(&c, DEFAULT_RANK_TOL), 2);
    }

    #[test]
    fn numerical_rank_edge_cases() {
        assert_eq!(numerical_rank(&DMatrix::<f64>::zeros(4, 6), 1e-10), 0);
        assert_eq!(numerical_rank(&DMatrix::<f64>::identity(8, 8), 1e-10), 8);
        // Rank-1 matrix with wildly different column scales.
        let m = DMatrix::from_row_slice(2, 2, &[1.0, 1e9, 2.0, 2e9]);
        assert_eq!(numerical_rank(&m, 1e-10), 1);
    }

    #[test]
    fn rank_is_8_for_both_variants() {
        let p = CraneParams::default();
        for variant in [
            ActuationVariant::Underactuated,
            ActuationVariant::FullyActuated,
        ] {
            let model = analytic_linearization(&p, variant).unwrap();
            assert_eq!(model.controllability_rank(DEFAULT_RANK_TOL), 8, "{variant}");
        }
    }

    #[test]
    fn rank_8_for_random_parameter_draws() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for _ in 0..50 {
            let p = CraneParams {
                trolley_mass: rng.gen_range(0.05..5.0),
                hook_mass: rng.gen_range(0.05..5.0),
                payload_mass: rng.gen_range(0.5..20.0),
                hook_inertia: rng.gen_range(0.01..10.0),
                payload_inertia: rng.gen_range(0.01..10.0),
                payload_rope: rng.gen_range(0.5..4.0),
                gravity: 9.81,
            };
            for variant in [
                ActuationVariant::Underactuated,
                ActuationVariant::FullyActuated,
            ] {
                let model = analytic_linearization(&p, variant).unwrap();
                assert_eq!(model.controllability_rank(DEFAULT_RANK_TOL), 8);
            }
        }
    }

    #[test]
    fn place_double_integrator_exact() {
        let (a, b) = double_integrator();
        let poles = PoleSet::from_reals(&[-1.0, -2.0]).unwrap();
        let k = place_poles(&a, &b, &poles).unwrap();
        // Characteristic polynomial s^2 + 3 s + 2.
        assert_abs_diff_eq!(k[(0, 0)], 2.0, epsilon = 1e-9);
        assert_abs_diff_eq!(k[(0, 1)], 3.0, epsilon = 1e-9);
    }

    #[test]
    fn place_reference_model_both_variants() {
        let p = CraneParams::default();
        let poles = PoleSet::default();
        for variant in [
            ActuationVariant::Underactuated,
            ActuationVariant::FullyActuated,
        ] {
            let model = analytic_linearization(&p, variant).unwrap();
            let gain = model.place(&poles).unwrap();
            let eigs = model.closed_loop_eigs(&gain).unwrap();
            let err = spectrum_distance(poles.poles(), &eigs);
            assert!(err <= PLACEMENT_TOL, "{variant}: {err:.3e}");
        }
    }

    #[test]
    fn placement_idempotence_random_instances() {
        let mut rng = ChaCha8Rng::seed_from_u64(33);
        let mut done = 0;
        let mut declined = 0;
        while done < 20 {
            let n = rng.gen_range(3..7_usize);
            // Single-input placement is unique and its accuracy is
            // condition-limited; keep those instances small.
            let m = rng.gen_range(1..=(n - 1).min(3));
            if m == 1 && n > 5 {
                continue;
            }
            let a = DMatrix::from_fn(n, n, |_, _| rng.gen_range(-1.0..1.0));
            let b = DMatrix::from_fn(n, m, |_, _| rng.gen_range(-1.0..1.0));
            // Keep only solidly controllable draws; near-degenerate pairs
            // make the requested accuracy unreachable for any algorithm.
            let sv = controllability_matrix(&a, &b)
                .svd(false, false)
                .singular_values;
            if sv[sv.len() - 1] < 1e-3 * sv[0] {
                continue;
            }
            // Well-separated stable real poles.
            let values: Vec<f64> = (0..n).map(|i| -0.5 - 0.7 * i as f64).collect();
            let poles = PoleSet::from_reals(&values).unwrap();
            match place_poles(&a, &b, &poles) {
                Ok(k) => {
                    let achieved = closed_loop_eigs(&a, &b, &k);
                    let err = spectrum_distance(poles.poles(), &achieved);
                    assert!(err <= PLACEMENT_TOL, "instance {done}: {err:.3e}");
                    done += 1;
                }
                // A draw whose unique or best assignment is condition-limited
                // below the accuracy contract is reported, not mis-placed.
                Err(CraneError::PlacementFailed(_)) => {
                    declined += 1;
                    assert!(declined <= 3, "too many declined draws");
                }
                Err(other) => panic!("unexpected error {other:?}"),
            }
        }
    }

    #[test]
    fn complex_poles_give_real_gain() {
        let p = CraneParams::default();
        let poles = PoleSet::new(vec![
            C64::new(-1.0, 1.0),
            C64::new(-1.0, -1.0),
            C64::new(-2.0, 0.0),
            C64::new(-2.5, 0.0),
            C64::new(-3.0, 0.0),
            C64::new(-3.5, 0.0),
            C64::new(-4.0, 0.0),
            C64::new(-4.5, 0.0),
        ])
        .unwrap();
        for variant in [
            ActuationVariant::Underactuated,
            ActuationVariant::FullyActuated,
        ] {
            let model = analytic_linearization(&p, variant).unwrap();
            // The gain is real by construction; the achieved spectrum is the
            // meaningful check.
            let gain = model.place(&poles).unwrap();
            let eigs = model.closed_loop_eigs(&gain).unwrap();
            let err = spectrum_distance(poles.poles(), &eigs);
            assert!(err <= PLACEMENT_TOL, "{variant}: {err:.3e}");
        }
    }

    #[test]
    fn all_complex_pole_set_places() {
        let p = CraneParams::default();
        let poles = PoleSet::new(vec![
            C64::new(-1.0, 0.5),
            C64::new(-1.0, -0.5),
            C64::new(-2.0, 1.0),
            C64::new(-2.0, -1.0),
            C64::new(-3.0, 0.7),
            C64::new(-3.0, -0.7),
            C64::new(-4.0, 1.2),
            C64::new(-4.0, -1.2),
        ])
        .unwrap();
        for variant in [
            ActuationVariant::Underactuated,
            ActuationVariant::FullyActuated,
        ] {
            let model = analytic_linearization(&p, variant).unwrap();
            let gain = model.place(&poles).unwrap();
            let eigs = model.closed_loop_eigs(&gain).unwrap();
            let err = spectrum_distance(poles.poles(), &eigs);
            assert!(err <= PLACEMENT_TOL, "{variant}: {err:.3e}");
        }
    }

    #[test]
    fn uncontrollable_pair_is_rejected() {
        // Second state unreachable.
        let a = DMatrix::from_row_slice(2, 2, &[-1.0, 0.0, 0.0, -2.0]);
        let b = DMatrix::from_row_slice(2, 1, &[1.0, 0.0]);
        let poles = PoleSet::from_reals(&[-3.0, -4.0]).unwrap();
        match place_poles(&a, &b, &poles) {
            Err(CraneError::Uncontrollable { rank }) => assert_eq!(rank, 1),
            other => panic!("expected Uncontrollable, got {other:?}"),
        }
    }

    #[test]
    fn sylvester_fallback_places_reference_model() {
        let p = CraneParams::default();
        let poles = PoleSet::default();
        for variant in [
            ActuationVariant::Underactuated,
            ActuationVariant::FullyActuated,
        ] {
            let model = analytic_linearization(&p, variant).unwrap();
            let k = place_sylvester(&model.a, &model.b, &poles).unwrap();
            let err = spectrum_distance(poles.poles(), &closed_loop_eigs(&model.a, &model.b, &k));
            assert!(err <= PLACEMENT_TOL, "{variant}: {err:.3e}");
        }
    }

    #[test]
    fn rank_deficient_input_matrix_is_reported() {
        // (A, b1) is controllable but the second input column is a copy of
        // the first, so the input matrix itself has rank one.
        let a = DMatrix::from_row_slice(
            4,
            4,
            &[
                0.0, 1.0, 0.0, 0.0, //
                0.0, 0.0, 1.0, 0.0, //
                0.0, 0.0, 0.0, 1.0, //
                0.0, 0.0, 0.0, 0.0,
            ],
        );
        let b = DMatrix::from_row_slice(4, 2, &[0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0, 2.0]);
        let poles = PoleSet::from_reals(&[-1.0, -2.0, -3.0, -4.0]).unwrap();
        match place_poles(&a, &b, &poles) {
            Err(CraneError::PlacementFailed(msg)) => assert!(msg.contains("rank")),
            other => panic!("expected PlacementFailed, got {other:?}"),
        }
    }

    #[test]
    fn open_loop_spectrum_of_reference_model() {
        let p = CraneParams::default();
        let model = analytic_linearization(&p, ActuationVariant::Underactuated).unwrap();
        let zero = GainMatrix::new(DMatrix::zeros(3, 8), ActuationVariant::Underactuated).unwrap();
        let eigs = model.closed_loop_eigs(&zero).unwrap();
        // Only column 4 couples: spectrum is {0 x6, +/- i sqrt(g l2 mp Sm / D)}.
        let d = p.payload_inertia * p.total_mass()
            + p.payload_rope * p.payload_rope * p.hook_mass * p.payload_mass
            + p.trolley_mass * p.payload_rope * p.payload_rope * p.payload_mass;
        let omega = (p.gravity * p.payload_rope * p.payload_mass * p.total_mass() / d).sqrt();
        let zeros = eigs.iter().filter(|e| e.norm() < 1e-6).count();
        assert_eq!(zeros, 6);
        let mut imag: Vec<&C64> = eigs.iter().filter(|e| e.norm() >= 1e-6).collect();
        imag.sort_by(|a, b| a.im.partial_cmp(&b.im).unwrap());
        assert_abs_diff_eq!(imag[0].re, 0.0, epsilon = 1e-8);
        assert_abs_diff_eq!(imag[0].im, -omega, epsilon = 1e-8);
        assert_abs_diff_eq!(imag[1].im, omega, epsilon = 1e-8);
    }

    #[test]
    fn feedback_sign_convention() {
        let mut m = DMatrix::zeros(3, 8);
        m[(0, 0)] = 2.0;
        m[(1, 5)] = -1.0;
        let gain = GainMatrix::new(m, ActuationVariant::Underactuated).unwrap();
        let s = State::new(1.0, 0.0, 0.0, 0.0, 0.0, 3.0, 0.0, 0.0);
        let u = gain.feedback(&s);
        assert_eq!(u.trolley, -2.0);
        assert_eq!(u.hoist_offset, 3.0);
        assert_eq!(u.hook, 0.0);
        assert_eq!(u.payload, None);
    }
}
