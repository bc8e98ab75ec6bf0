//! Linear codes over GF(q) as dense generator matrices, plus the evaluation
//! codes built from Riemann-Roch spaces and their triorthogonality and
//! distance certificates.
//!
//! Generator matrices export as CSV of hex field elements and as a compact
//! binary format: three little-endian u64 words `q`, `n`, `k` followed by the
//! `k*n` row-major elements as little-endian u32 coefficient words.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::func_field::{
    check_triorthogonality_condition, divisor_d0, divisor_g0, divisor_of_differential,
    eta0_differential, riemann_roch_basis, splitting_places, Divisor, FuncFieldError, Place,
    RationalFunction,
};
use crate::gf::{FieldElem, FieldSpec, QuadraticExtension};
use crate::poly::Poly;

#[derive(Debug, Error)]
pub enum CodeError {
    #[error("evaluation point {0} hits a pole (D and G must be disjoint)")]
    PoleAtEvaluationPoint(String),
    #[error("degenerate divisor: evaluation matrix has rank {rank}, expected {expected}")]
    RankDeficient { rank: usize, expected: usize },
    #[error("codeword length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("evaluation points must be finite places")]
    InfiniteEvaluationPoint,
    #[error("base code requires r = 2^m with m >= 3: {0}")]
    UnsupportedBaseParameter(String),
    #[error("no distance bound: deg G = {deg_g} is not below n = {n}")]
    NoDistanceBound { deg_g: i64, n: usize },
    #[error(transparent)]
    FuncField(#[from] FuncFieldError),
    #[error(transparent)]
    Field(#[from] crate::gf::FieldError),
}

/// Dense row-major matrix over a binary field.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<FieldElem>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Matrix {
        Matrix {
            rows,
            cols,
            data: vec![FieldElem::ZERO; rows * cols],
        }
    }

    pub fn from_rows(rows: Vec<Vec<FieldElem>>) -> Matrix {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        assert!(rows.iter().all(|row| row.len() == c));
        Matrix {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> FieldElem {
        self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: FieldElem) {
        self.data[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[FieldElem] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn row_iter(&self) -> impl Iterator<Item = &[FieldElem]> {
        self.data.chunks(self.cols)
    }

    /// Stack `other` below `self`.
    pub fn stack(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.cols);
        let mut data = self.data.clone();
        data.extend_from_slice(&other.data);
        Matrix {
            rows: self.rows + other.rows,
            cols: self.cols,
            data,
        }
    }

    pub fn permute_cols(&self, perm: &[usize]) -> Matrix {
        assert_eq!(perm.len(), self.cols);
        let mut out = Matrix::zeros(self.rows, self.cols);
        for r in 0..self.rows {
            for (new_c, &old_c) in perm.iter().enumerate() {
                out.set(r, new_c, self.get(r, old_c));
            }
        }
        out
    }

    /// In-place reduced row echelon form with deterministic pivoting: the
    /// pivot of each step is the first nonzero entry scanning columns left to
    /// right and rows top to bottom. Returns the pivot columns.
    pub fn rref(&mut self, f: &FieldSpec) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut rank = 0;
        for col in 0..self.cols {
            let Some(pr) = (rank..self.rows).find(|&r| !self.get(r, col).is_zero()) else {
                continue;
            };
            self.swap_rows(rank, pr);
            let inv = f.inv(self.get(rank, col)).expect("nonzero pivot");
            self.scale_row(f, rank, inv);
            for r in 0..self.rows {
                if r != rank {
                    let factor = self.get(r, col);
                    if !factor.is_zero() {
                        self.add_scaled_row(f, r, rank, factor);
                    }
                }
            }
            pivots.push(col);
            rank += 1;
            if rank == self.rows {
                break;
            }
        }
        pivots
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for c in 0..self.cols {
            self.data.swap(a * self.cols + c, b * self.cols + c);
        }
    }

    fn scale_row(&mut self, f: &FieldSpec, r: usize, by: FieldElem) {
        for c in 0..self.cols {
            let v = self.get(r, c);
            self.set(r, c, f.mul(v, by));
        }
    }

    /// row[r] += factor * row[src]
    fn add_scaled_row(&mut self, f: &FieldSpec, r: usize, src: usize, factor: FieldElem) {
        for c in 0..self.cols {
            let v = f.add(self.get(r, c), f.mul(factor, self.get(src, c)));
            self.set(r, c, v);
        }
    }

    pub fn rank(&self, f: &FieldSpec) -> usize {
        let mut work = self.clone();
        work.rref(f).len()
    }

    /// Basis (as rows) of the right kernel { v : self * v^T = 0 }.
    pub fn kernel_basis(&self, f: &FieldSpec) -> Matrix {
        let mut work = self.clone();
        let pivots = work.rref(f);
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        let mut rows = Vec::with_capacity(free.len());
        for &fc in &free {
            let mut v = vec![FieldElem::ZERO; self.cols];
            v[fc] = FieldElem::ONE;
            for (pr, &pc) in pivots.iter().enumerate() {
                // pivot entry is 1, so v[pc] = -work[pr][fc] = work[pr][fc].
                v[pc] = work.get(pr, fc);
            }
            rows.push(v);
        }
        Matrix::from_rows(rows)
    }

    /// Reduce `v` against an RREF matrix; the result is zero iff `v` lies in
    /// the row space.
    pub fn reduce_against_rref(
        &self,
        f: &FieldSpec,
        pivots: &[usize],
        v: &[FieldElem],
    ) -> Vec<FieldElem> {
        let mut v = v.to_vec();
        for (pr, &pc) in pivots.iter().enumerate() {
            let factor = v[pc];
            if !factor.is_zero() {
                for c in 0..self.cols {
                    v[c] = f.add(v[c], f.mul(factor, self.get(pr, c)));
                }
            }
        }
        v
    }

    pub fn dot(&self, f: &FieldSpec, a: &[FieldElem], b: &[FieldElem]) -> FieldElem {
        debug_assert_eq!(a.len(), b.len());
        let mut acc = FieldElem::ZERO;
        for (&x, &y) in a.iter().zip(b) {
            acc = f.add(acc, f.mul(x, y));
        }
        acc
    }
}

/// A linear [n, k] code over GF(q), held as a full-rank generator matrix.
#[derive(Clone, Debug)]
pub struct LinearCode {
    pub field: FieldSpec,
    pub gen: Matrix,
}

impl LinearCode {
    pub fn new(field: FieldSpec, gen: Matrix) -> LinearCode {
        LinearCode { field, gen }
    }

    pub fn n(&self) -> usize {
        self.gen.cols()
    }

    pub fn k(&self) -> usize {
        self.gen.rows()
    }

    pub fn q(&self) -> u64 {
        self.field.order()
    }

    /// Membership of a word in the row space.
    pub fn contains(&self, word: &[FieldElem]) -> bool {
        let mut work = self.gen.clone();
        let pivots = work.rref(&self.field);
        work.reduce_against_rref(&self.field, &pivots, word)
            .iter()
            .all(|c| c.is_zero())
    }

    pub fn contains_all_ones(&self) -> bool {
        self.contains(&vec![FieldElem::ONE; self.n()])
    }
}

/// Evaluation data: distinct finite places and the functions to evaluate.
#[derive(Clone, Debug)]
pub struct EvaluationSpec {
    pub eval_points: Vec<Place>,
    pub rr_basis: Vec<RationalFunction>,
}

/// Evaluate the Riemann-Roch basis at the evaluation points:
/// gen[i][j] = basis[i](P_j). Fails if a point hits a pole or the matrix is
/// rank deficient.
pub fn evaluate_code(f: &FieldSpec, spec: &EvaluationSpec) -> Result<LinearCode, CodeError> {
    let k = spec.rr_basis.len();
    let n = spec.eval_points.len();
    let mut gen = Matrix::zeros(k, n);
    for (j, place) in spec.eval_points.iter().enumerate() {
        let Place::Finite(alpha) = place else {
            return Err(CodeError::InfiniteEvaluationPoint);
        };
        for (i, func) in spec.rr_basis.iter().enumerate() {
            let v = func
                .eval(f, *alpha)
                .map_err(|_| CodeError::PoleAtEvaluationPoint(alpha.hex()))?;
            gen.set(i, j, v);
        }
    }
    let rank = gen.rank(f);
    if rank != k {
        return Err(CodeError::RankDeficient { rank, expected: k });
    }
    Ok(LinearCode::new(f.clone(), gen))
}

/// An evaluation code together with the divisor data that produced it.
pub struct AgCode {
    pub code: LinearCode,
    pub eval: EvaluationSpec,
    pub g_divisor: Divisor,
}

impl AgCode {
    pub fn deg_g(&self) -> i64 {
        self.g_divisor.degree()
    }
}

/// The base triorthogonal code together with its divisors.
pub struct BaseCode {
    pub ext: QuadraticExtension,
    pub ag: AgCode,
    pub d_divisor: Divisor,
    pub eta_divisor: Divisor,
    pub r: u64,
}

/// Construct the base code over GF(r^2) for r = 2^m, m >= 3: evaluation
/// points are the splitting locus in documented order, and the divisor G
/// puts floor((r-2)/3) on every ramified place. The result is an
/// [r(r-1), (r+1)*floor((r-2)/3) + 1] code satisfying the triorthogonality
/// divisor condition.
pub fn construct_base_code(r: u64) -> Result<BaseCode, CodeError> {
    if !r.is_power_of_two() || r < 8 {
        return Err(CodeError::UnsupportedBaseParameter(format!(
            "r = {r}: the divisor condition 3*floor((r-2)/3) <= r-2 only leaves room \
             for a nontrivial G when r >= 8"
        )));
    }
    let m = r.trailing_zeros();
    let ext = QuadraticExtension::new(m)?;
    let f = ext.big().clone();
    let d0 = divisor_d0(&ext);
    let g0 = divisor_g0(&ext);
    let eta_div = divisor_of_differential(&f, &eta0_differential(&ext))?;
    assert!(
        check_triorthogonality_condition(&g0, &d0, &eta_div),
        "base divisors must satisfy G >= 0 and 3G <= D + (eta)"
    );
    let basis = riemann_roch_basis(&f, &g0)?;
    let spec = EvaluationSpec {
        eval_points: splitting_places(&ext),
        rr_basis: basis,
    };
    let code = evaluate_code(&f, &spec)?;
    Ok(BaseCode {
        ext,
        ag: AgCode {
            code,
            eval: spec,
            g_divisor: g0,
        },
        d_divisor: d0,
        eta_divisor: eta_div,
        r,
    })
}

/// Dual code: a full-rank (n-k) x n basis of { v : sum_i c_i v_i = 0 for all c }.
pub fn dual_code(c: &LinearCode) -> LinearCode {
    let kernel = c.gen.kernel_basis(&c.field);
    LinearCode::new(c.field.clone(), kernel)
}

/// Pointwise product of two codewords.
pub fn star_product(
    f: &FieldSpec,
    a: &[FieldElem],
    b: &[FieldElem],
) -> Result<Vec<FieldElem>, CodeError> {
    if a.len() != b.len() {
        return Err(CodeError::LengthMismatch(a.len(), b.len()));
    }
    Ok(a.iter().zip(b).map(|(&x, &y)| f.mul(x, y)).collect())
}

/// Why a triorthogonality check failed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TriorthogonalityViolation {
    AllOnesNotInRowSpace,
    PairSum {
        rows: (usize, usize),
        value: FieldElem,
    },
    TripleSum {
        rows: (usize, usize, usize),
        value: FieldElem,
    },
}

#[derive(Clone, Debug)]
pub struct TriorthogonalityReport {
    pub is_triorthogonal: bool,
    pub checked_triples: u64,
    pub checked_pairs: u64,
    pub violation: Option<TriorthogonalityViolation>,
}

impl TriorthogonalityReport {
    fn pass(triples: u64, pairs: u64) -> Self {
        TriorthogonalityReport {
            is_triorthogonal: true,
            checked_triples: triples,
            checked_pairs: pairs,
            violation: None,
        }
    }

    fn fail(triples: u64, pairs: u64, violation: TriorthogonalityViolation) -> Self {
        TriorthogonalityReport {
            is_triorthogonal: false,
            checked_triples: triples,
            checked_pairs: pairs,
            violation: Some(violation),
        }
    }
}

fn triple_sum(f: &FieldSpec, a: &[FieldElem], b: &[FieldElem], c: &[FieldElem]) -> FieldElem {
    let mut acc = FieldElem::ZERO;
    for i in 0..a.len() {
        acc = f.add(acc, f.mul(f.mul(a[i], b[i]), c[i]));
    }
    acc
}

/// Exhaustive triorthogonality: the all-ones word lies in the row space,
/// every pair of basis rows is orthogonal, and every ordered triple of basis
/// rows has vanishing pointwise-product sum (linearity extends both to the
/// whole code). Returns the first violation as a witness.
pub fn is_triorthogonal(c: &LinearCode) -> TriorthogonalityReport {
    let f = &c.field;
    let k = c.k();
    if !c.contains_all_ones() {
        return TriorthogonalityReport::fail(0, 0, TriorthogonalityViolation::AllOnesNotInRowSpace);
    }
    let mut pairs = 0;
    for a in 0..k {
        for b in a..k {
            pairs += 1;
            let s = c.gen.dot(f, c.gen.row(a), c.gen.row(b));
            if !s.is_zero() {
                return TriorthogonalityReport::fail(
                    0,
                    pairs,
                    TriorthogonalityViolation::PairSum {
                        rows: (a, b),
                        value: s,
                    },
                );
            }
        }
    }
    let mut triples = 0;
    for a in 0..k {
        for b in 0..k {
            let ab = star_product(f, c.gen.row(a), c.gen.row(b)).expect("equal lengths");
            for cc in 0..k {
                triples += 1;
                let s = c.gen.dot(f, &ab, c.gen.row(cc));
                if !s.is_zero() {
                    return TriorthogonalityReport::fail(
                        triples,
                        pairs,
                        TriorthogonalityViolation::TripleSum {
                            rows: (a, b, cc),
                            value: s,
                        },
                    );
                }
            }
        }
    }
    TriorthogonalityReport::pass(triples, pairs)
}

/// Seeded randomized triorthogonality check for large codes: all-ones
/// membership, all pairs, and `trials` random basis triples.
pub fn is_triorthogonal_sampled(c: &LinearCode, trials: u64, seed: u64) -> TriorthogonalityReport {
    let f = &c.field;
    let k = c.k();
    if !c.contains_all_ones() {
        return TriorthogonalityReport::fail(0, 0, TriorthogonalityViolation::AllOnesNotInRowSpace);
    }
    let mut pairs = 0;
    for a in 0..k {
        for b in a..k {
            pairs += 1;
            let s = c.gen.dot(f, c.gen.row(a), c.gen.row(b));
            if !s.is_zero() {
                return TriorthogonalityReport::fail(
                    0,
                    pairs,
                    TriorthogonalityViolation::PairSum {
                        rows: (a, b),
                        value: s,
                    },
                );
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for t in 0..trials {
        let a = rng.random_range(0..k);
        let b = rng.random_range(0..k);
        let cc = rng.random_range(0..k);
        let s = triple_sum(f, c.gen.row(a), c.gen.row(b), c.gen.row(cc));
        if !s.is_zero() {
            return TriorthogonalityReport::fail(
                t + 1,
                pairs,
                TriorthogonalityViolation::TripleSum {
                    rows: (a, b, cc),
                    value: s,
                },
            );
        }
    }
    TriorthogonalityReport::pass(trials, pairs)
}

#[derive(Clone, Debug)]
pub struct DistanceCertificate {
    pub lower: usize,
    pub upper: usize,
    /// True when lower = n - k + 1 pins the distance exactly (Singleton).
    pub exact: bool,
    pub witness: Vec<FieldElem>,
}

/// Distance certificate for an evaluation code with deg G < n: the designed
/// lower bound n - deg G, and a constructed codeword vanishing at exactly the
/// first deg G evaluation points, whose weight n - deg G matches it from
/// above whenever the code is MDS.
pub fn distance_certificate(ag: &AgCode) -> Result<DistanceCertificate, CodeError> {
    let f = &ag.code.field;
    let n = ag.code.n();
    let deg_g = ag.deg_g();
    if deg_g < 0 || deg_g >= n as i64 {
        return Err(CodeError::NoDistanceBound { deg_g, n });
    }
    let lower = n - deg_g as usize;

    // Numerator: product of (x + alpha_i) over the first deg_g points, times
    // the forced-zero part shared by the whole Riemann-Roch space.
    let mut num = Poly::one();
    for place in ag.eval.eval_points.iter().take(deg_g as usize) {
        let Place::Finite(alpha) = place else {
            return Err(CodeError::InfiniteEvaluationPoint);
        };
        num = num.mul(f, &Poly::linear(*alpha));
    }
    let mut h = Poly::one();
    for (place, &c) in ag.g_divisor.support() {
        if let Place::Finite(alpha) = place {
            if c > 0 {
                h = h.mul(f, &Poly::linear(*alpha).pow(f, c as u64));
            } else {
                num = num.mul(f, &Poly::linear(*alpha).pow(f, (-c) as u64));
            }
        }
    }
    let func = RationalFunction::new(f, num, h)?;
    let mut witness = Vec::with_capacity(n);
    for place in &ag.eval.eval_points {
        let Place::Finite(alpha) = place else {
            return Err(CodeError::InfiniteEvaluationPoint);
        };
        witness.push(
            func.eval(f, *alpha)
                .map_err(|_| CodeError::PoleAtEvaluationPoint(alpha.hex()))?,
        );
    }
    let upper = witness.iter().filter(|v| !v.is_zero()).count();
    assert_eq!(upper, lower, "witness weight must equal n - deg G");
    assert!(ag.code.contains(&witness), "witness must lie in the code");
    let exact = lower == n - ag.code.k() + 1;
    Ok(DistanceCertificate {
        lower,
        upper,
        exact,
        witness,
    })
}

/// CSV export: one row per generator row, lowercase hex elements.
pub fn gen_matrix_csv(c: &LinearCode) -> String {
    let mut out = String::new();
    for row in c.gen.row_iter() {
        let cells: Vec<String> = row.iter().map(|e| e.hex()).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

/// Compact binary export: u64-le q, n, k then row-major u32-le element words.
pub fn gen_matrix_binary(c: &LinearCode) -> Vec<u8> {
    let mut out = Vec::with_capacity(24 + 4 * c.n() * c.k());
    out.extend_from_slice(&c.q().to_le_bytes());
    out.extend_from_slice(&(c.n() as u64).to_le_bytes());
    out.extend_from_slice(&(c.k() as u64).to_le_bytes());
    for row in c.gen.row_iter() {
        for e in row {
            out.extend_from_slice(&e.0.to_le_bytes());
        }
    }
    out
}
