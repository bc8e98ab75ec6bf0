//! Exact verification of the |CCZ> state-reduction protocol: the
//! trace-decomposition identity over GF(r^2), the outcome-parameterized
//! Clifford correction circuit, dense statevector simulation of every
//! measurement outcome, and the constant-depth reduction planner with its
//! gate budgets.
//!
//! All amplitudes are real (every phase is +-1), so states are dense `f64`
//! vectors. Tolerances: 1e-12 on norms and probabilities, 1e-10 on
//! fidelities.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::gf::{FieldElem, FieldError, FieldSpec, NormalBasisPair, QuadraticExtension};

pub const NORM_TOL: f64 = 1e-12;
pub const FIDELITY_TOL: f64 = 1e-10;

/// Memory guard: dense states are capped at 2^24 amplitudes.
pub const MAX_AMPLITUDES: usize = 1 << 24;

#[derive(Debug, Error)]
pub enum ReduceError {
    #[error("state of {0} amplitudes exceeds the dense-simulation guard of 2^24")]
    MemoryGuard(u128),
    #[error("reduction simulation supports r <= 8, got r = {0}")]
    UnsupportedRadix(u64),
    #[error("r must be a power of two >= 2, got {0}")]
    InvalidRadix(u64),
    #[error("protocol violation: {0}")]
    ProtocolViolation(String),
    #[error(transparent)]
    Field(#[from] FieldError),
}

/// Dense real statevector over a tensor product of field-labeled registers.
/// Register 0 is the most significant index; basis labels are the raw
/// coefficient bits of the field elements.
#[derive(Clone, Debug)]
pub struct QuditState {
    dims: Vec<usize>,
    amps: Vec<f64>,
}

impl QuditState {
    pub fn from_amplitudes(dims: Vec<usize>, amps: Vec<f64>) -> QuditState {
        assert_eq!(dims.iter().product::<usize>(), amps.len());
        QuditState { dims, amps }
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn amplitudes(&self) -> &[f64] {
        &self.amps
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a * a).sum::<f64>().sqrt()
    }

    /// |<self|other>| for real unit vectors.
    pub fn overlap(&self, other: &QuditState) -> f64 {
        assert_eq!(self.dims, other.dims);
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a * b)
            .sum::<f64>()
            .abs()
    }

    fn stride(&self, register: usize) -> usize {
        self.dims[register + 1..].iter().product()
    }

    fn label_of(&self, index: usize, register: usize) -> u32 {
        (index / self.stride(register) % self.dims[register]) as u32
    }

    /// Diagonal phase (-1)^(Tr(beta * u)) on one register.
    pub fn apply_zpow(&mut self, f: &FieldSpec, target: usize, beta: FieldElem) {
        if beta.is_zero() {
            return;
        }
        for idx in 0..self.amps.len() {
            let u = f.elem(self.label_of(idx, target));
            if f.trace_bit(f.mul(beta, u)) == 1 {
                self.amps[idx] = -self.amps[idx];
            }
        }
    }

    /// Diagonal phase (-1)^(Tr(beta * u * v)) on a register pair.
    pub fn apply_czpow(&mut self, f: &FieldSpec, targets: (usize, usize), beta: FieldElem) {
        if beta.is_zero() {
            return;
        }
        for idx in 0..self.amps.len() {
            let u = f.elem(self.label_of(idx, targets.0));
            let v = f.elem(self.label_of(idx, targets.1));
            if f.trace_bit(f.mul(f.mul(beta, u), v)) == 1 {
                self.amps[idx] = -self.amps[idx];
            }
        }
    }

    /// Basis relabeling |v> -> |gamma v> with gamma nonzero.
    pub fn apply_mmul(&mut self, f: &FieldSpec, target: usize, gamma: FieldElem) {
        assert!(!gamma.is_zero(), "Mmul requires an invertible scalar");
        let mut out = vec![0.0; self.amps.len()];
        let stride = self.stride(target);
        for (idx, &a) in self.amps.iter().enumerate() {
            if a == 0.0 {
                continue;
            }
            let u = f.elem(self.label_of(idx, target));
            let gu = f.mul(gamma, u).0 as usize;
            let base = idx - (u.0 as usize) * stride;
            out[base + gu * stride] = a;
        }
        self.amps = out;
    }

    /// Pauli shift |v> -> |v + alpha> on one register.
    pub fn apply_xshift(&mut self, f: &FieldSpec, target: usize, alpha: FieldElem) {
        if alpha.is_zero() {
            return;
        }
        let mut out = vec![0.0; self.amps.len()];
        let stride = self.stride(target);
        for (idx, &a) in self.amps.iter().enumerate() {
            if a == 0.0 {
                continue;
            }
            let u = f.elem(self.label_of(idx, target));
            let shifted = f.add(u, alpha).0 as usize;
            let base = idx - (u.0 as usize) * stride;
            out[base + shifted * stride] = a;
        }
        self.amps = out;
    }

    /// Project one register onto a basis label; returns the outcome
    /// probability and leaves the state renormalized (all-zero if p = 0).
    pub fn project(&mut self, target: usize, label: u32) -> f64 {
        let mut p = 0.0;
        for idx in 0..self.amps.len() {
            if self.label_of(idx, target) == label {
                p += self.amps[idx] * self.amps[idx];
            } else {
                self.amps[idx] = 0.0;
            }
        }
        if p > 0.0 {
            let s = 1.0 / p.sqrt();
            for a in &mut self.amps {
                *a *= s;
            }
        }
        p
    }

    /// After projecting `fixed` registers, pull out the state on `kept`
    /// registers (in the given order), verifying the tensor factorization.
    pub fn factor_out(
        &self,
        fixed: &[(usize, u32)],
        kept: &[usize],
    ) -> Result<QuditState, ReduceError> {
        let kept_dims: Vec<usize> = kept.iter().map(|&r| self.dims[r]).collect();
        let total: usize = kept_dims.iter().product();
        let mut amps = vec![0.0; total];
        for (idx, &a) in self.amps.iter().enumerate() {
            let matches = fixed
                .iter()
                .all(|&(reg, label)| self.label_of(idx, reg) == label);
            if !matches {
                if a.abs() > NORM_TOL {
                    return Err(ReduceError::ProtocolViolation(
                        "state does not factorize over the measured registers".into(),
                    ));
                }
                continue;
            }
            let mut out_idx = 0usize;
            for &r in kept {
                out_idx = out_idx * self.dims[r] + self.label_of(idx, r) as usize;
            }
            amps[out_idx] = a;
        }
        let state = QuditState {
            dims: kept_dims,
            amps,
        };
        if (state.norm() - 1.0).abs() > 1e-9 {
            return Err(ReduceError::ProtocolViolation(format!(
                "factored state has norm {}",
                state.norm()
            )));
        }
        Ok(state)
    }
}

/// The Clifford gates used by the reduction circuit. Zpow applies
/// (-1)^(Tr(beta u)), CZpow applies (-1)^(Tr(beta u v)), Mmul relabels
/// |v> -> |gamma v> (gamma != 0), MeasureZ is a computational-basis
/// measurement.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CliffordGate {
    Zpow {
        beta: FieldElem,
        target: usize,
    },
    CZpow {
        beta: FieldElem,
        targets: (usize, usize),
    },
    Mmul {
        gamma: FieldElem,
        target: usize,
    },
    MeasureZ {
        target: usize,
    },
}

impl CliffordGate {
    pub fn is_single_qudit(&self) -> bool {
        matches!(self, CliffordGate::Zpow { .. } | CliffordGate::Mmul { .. })
    }

    pub fn is_two_qudit(&self) -> bool {
        matches!(self, CliffordGate::CZpow { .. })
    }
}

/// Build |CCZ> over GF(q) on three registers:
/// amplitude q^(-3/2) * (-1)^(Tr(x y z)).
pub fn build_ccz_state(f: &FieldSpec) -> Result<QuditState, ReduceError> {
    build_ccz_power_state(f, FieldElem::ONE)
}

/// |CCZ^c>: amplitude proportional to (-1)^(Tr(c x y z)); c = 1 is |CCZ>
/// and c = 0 the bare |+++>.
pub fn build_ccz_power_state(f: &FieldSpec, c: FieldElem) -> Result<QuditState, ReduceError> {
    let q = f.order() as usize;
    let total = (q as u128).pow(3);
    if total > MAX_AMPLITUDES as u128 {
        return Err(ReduceError::MemoryGuard(total));
    }
    let total = total as usize;
    let scale = 1.0 / (total as f64).sqrt();
    let mut amps = vec![scale; total];
    for x in 0..q as u32 {
        for y in 0..q as u32 {
            let xy = f.mul(f.mul(c, f.elem(x)), f.elem(y));
            if xy.is_zero() {
                continue;
            }
            for z in 0..q as u32 {
                if f.trace_bit(f.mul(xy, f.elem(z))) == 1 {
                    amps[(x as usize * q + y as usize) * q + z as usize] = -scale;
                }
            }
        }
    }
    Ok(QuditState {
        dims: vec![q; 3],
        amps,
    })
}

/// |CCZ> over GF(r^2) stored as six GF(r) registers via the normal-basis
/// split |x>_(r^2) -> |x0>_r |x1>_r; register order (x0, x1, y0, y1, z0, z1).
pub fn build_ccz_state_pairs(
    ext: &QuadraticExtension,
    basis: &NormalBasisPair,
) -> Result<QuditState, ReduceError> {
    let r = ext.r() as usize;
    let big = ext.big();
    let total = (r as u128).pow(6);
    if total > MAX_AMPLITUDES as u128 {
        return Err(ReduceError::MemoryGuard(total));
    }
    let total = total as usize;
    let scale = 1.0 / (total as f64).sqrt();
    // Precompose the r^2 element for every (hi, lo) label pair.
    let q = r * r;
    let mut composed = vec![FieldElem::ZERO; q];
    for hi in 0..r as u32 {
        for lo in 0..r as u32 {
            composed[(hi as usize) * r + lo as usize] =
                ext.compose(FieldElem(hi), FieldElem(lo), basis);
        }
    }
    let mut amps = vec![scale; total];
    for xp in 0..q {
        for yp in 0..q {
            let xy = big.mul(composed[xp], composed[yp]);
            if xy.is_zero() {
                continue;
            }
            for zp in 0..q {
                if big.trace_bit(big.mul(xy, composed[zp])) == 1 {
                    amps[(xp * q + yp) * q + zp] = -scale;
                }
            }
        }
    }
    Ok(QuditState {
        dims: vec![r; 6],
        amps,
    })
}

/// Which three of the six split registers the protocol measures.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum ProtocolVariant {
    /// Measure (x0, y0, z0), keep (x1, y1, z1); the residual phase carries
    /// gamma = 1 + theta^(r+1) and the final gate is M_gamma. Requires a
    /// normal basis with gamma != 0, which exists for every r >= 4.
    Symmetric,
    /// Measure (x0, y0, z1), keep (x1, y1, z0); the residual phase carries
    /// eta = theta^(r+1) (never zero) and the final gate is M_eta. This is
    /// the only workable choice at r = 2, where every normalized basis has
    /// gamma = 0 and the symmetric circuit bottoms out in |+++>.
    ConjugateThird,
}

/// The outcome-parameterized reduction circuit for one step r^2 -> r.
pub struct ReductionProtocol {
    pub ext: QuadraticExtension,
    pub basis: NormalBasisPair,
    pub variant: ProtocolVariant,
    /// eta and gamma as GF(r) elements in small-field coordinates.
    pub eta_small: FieldElem,
    pub gamma_small: FieldElem,
}

impl ReductionProtocol {
    pub fn new(r: u64) -> Result<ReductionProtocol, ReduceError> {
        if !r.is_power_of_two() || r < 2 {
            return Err(ReduceError::InvalidRadix(r));
        }
        let m = r.trailing_zeros();
        let ext = QuadraticExtension::new(m)?;
        let (basis, variant) = match ext.find_normal_basis_with_invertible_gamma() {
            Some(basis) => (basis, ProtocolVariant::Symmetric),
            None => (ext.find_normal_basis(), ProtocolVariant::ConjugateThird),
        };
        Self::from_parts(ext, basis, variant)
    }

    /// Force a variant; the symmetric circuit needs an invertible gamma.
    pub fn with_variant(
        r: u64,
        variant: ProtocolVariant,
    ) -> Result<ReductionProtocol, ReduceError> {
        if !r.is_power_of_two() || r < 2 {
            return Err(ReduceError::InvalidRadix(r));
        }
        let ext = QuadraticExtension::new(r.trailing_zeros())?;
        let basis = match variant {
            ProtocolVariant::Symmetric => ext
                .find_normal_basis_with_invertible_gamma()
                .ok_or_else(|| {
                    ReduceError::ProtocolViolation(
                        "no normalized basis with invertible gamma exists".into(),
                    )
                })?,
            ProtocolVariant::ConjugateThird => ext.find_normal_basis(),
        };
        Self::from_parts(ext, basis, variant)
    }

    fn from_parts(
        ext: QuadraticExtension,
        basis: NormalBasisPair,
        variant: ProtocolVariant,
    ) -> Result<ReductionProtocol, ReduceError> {
        let eta_small = ext.embedding().project(basis.eta)?;
        let gamma_small = ext.embedding().project(basis.gamma)?;
        Ok(ReductionProtocol {
            ext,
            basis,
            variant,
            eta_small,
            gamma_small,
        })
    }

    /// Absolute indices (into the 6-register split state) of the measured
    /// registers, in outcome order (a, b, c).
    pub fn measured_registers(&self) -> [usize; 3] {
        match self.variant {
            ProtocolVariant::Symmetric => [0, 2, 4],
            ProtocolVariant::ConjugateThird => [0, 2, 5],
        }
    }

    /// Absolute indices of the kept registers; the reduced |CCZ> lives on
    /// these, in this order.
    pub fn kept_registers(&self) -> [usize; 3] {
        match self.variant {
            ProtocolVariant::Symmetric => [1, 3, 5],
            ProtocolVariant::ConjugateThird => [1, 3, 4],
        }
    }

    /// The scalar c of the |CCZ^c> state produced before the final Mmul.
    pub fn residual_coefficient(&self) -> FieldElem {
        match self.variant {
            ProtocolVariant::Symmetric => self.gamma_small,
            ProtocolVariant::ConjugateThird => self.eta_small,
        }
    }

    pub fn measurement_gates(&self) -> Vec<CliffordGate> {
        self.measured_registers()
            .iter()
            .map(|&target| CliffordGate::MeasureZ { target })
            .collect()
    }

    /// Correction gates for measured outcome (a, b, c), acting on the kept
    /// registers in local indices 0, 1, 2 = kept_registers(). Always exactly
    /// three Zpow, three CZpow and one Mmul (four single-qudit plus three
    /// two-qudit Clifford gates), with exponents that may vanish.
    pub fn correction_gates(
        &self,
        outcome: (FieldElem, FieldElem, FieldElem),
    ) -> Vec<CliffordGate> {
        let f = self.ext.small();
        let (a, b, c) = outcome;
        let eta = self.eta_small;
        let mul3 = |x: FieldElem, y: FieldElem, z: FieldElem| f.mul(f.mul(x, y), z);
        match self.variant {
            ProtocolVariant::Symmetric => vec![
                // Phases eta*(bc x1 + ac y1 + ab z1) from the measured block.
                CliffordGate::Zpow {
                    beta: mul3(eta, b, c),
                    target: 0,
                },
                CliffordGate::Zpow {
                    beta: mul3(eta, a, c),
                    target: 1,
                },
                CliffordGate::Zpow {
                    beta: mul3(eta, a, b),
                    target: 2,
                },
                // Phases eta*(c x1 y1 + b x1 z1 + a y1 z1).
                CliffordGate::CZpow {
                    beta: f.mul(eta, c),
                    targets: (0, 1),
                },
                CliffordGate::CZpow {
                    beta: f.mul(eta, b),
                    targets: (0, 2),
                },
                CliffordGate::CZpow {
                    beta: f.mul(eta, a),
                    targets: (1, 2),
                },
                // |CCZ^gamma> -> |CCZ>.
                CliffordGate::Mmul {
                    gamma: self.gamma_small,
                    target: 0,
                },
            ],
            // Kept registers (x1, y1, z0); measured (a, b, c) = (x0, y0, z1).
            ProtocolVariant::ConjugateThird => vec![
                CliffordGate::Zpow {
                    beta: mul3(eta, b, c),
                    target: 0,
                },
                CliffordGate::Zpow {
                    beta: mul3(eta, a, c),
                    target: 1,
                },
                CliffordGate::Zpow {
                    beta: mul3(self.gamma_small, a, b),
                    target: 2,
                },
                CliffordGate::CZpow {
                    beta: f.mul(self.gamma_small, c),
                    targets: (0, 1),
                },
                CliffordGate::CZpow {
                    beta: f.mul(eta, b),
                    targets: (0, 2),
                },
                CliffordGate::CZpow {
                    beta: f.mul(eta, a),
                    targets: (1, 2),
                },
                CliffordGate::Mmul {
                    gamma: self.eta_small,
                    target: 0,
                },
            ],
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub enum OutcomeMode {
    Fixed(u32, u32, u32),
    Sample { seed: u64, count: u32 },
    All,
}

#[derive(Clone, Debug, Serialize)]
pub struct OutcomeReport {
    pub outcome: [String; 3],
    pub probability: f64,
    /// Overlap of the post-correction kept state with |CCZ^c>,
    /// c the protocol's residual coefficient.
    pub fidelity_residual: f64,
    /// Overlap with |CCZ> after the final Mmul.
    pub fidelity_ccz: f64,
    pub single_qudit_gates: usize,
    pub two_qudit_gates: usize,
    pub measurements: usize,
}

#[derive(Debug, Serialize)]
pub struct ReductionReport {
    pub r: u64,
    pub variant: ProtocolVariant,
    pub residual_coefficient: String,
    pub outcomes: Vec<OutcomeReport>,
    pub all_pass: bool,
}

/// Simulate the reduction for the requested outcomes: build the split
/// |CCZ>_(r^2), project the measured registers, verify the factorization and
/// the exact outcome probability r^-3, apply the corrections and final Mmul,
/// and report both fidelities.
pub fn simulate_reduction(r: u64, mode: OutcomeMode) -> Result<ReductionReport, ReduceError> {
    if r > 8 {
        return Err(ReduceError::UnsupportedRadix(r));
    }
    simulate_reduction_with(&ReductionProtocol::new(r)?, mode)
}

/// Same simulation against an explicitly chosen protocol.
pub fn simulate_reduction_with(
    protocol: &ReductionProtocol,
    mode: OutcomeMode,
) -> Result<ReductionReport, ReduceError> {
    let r = protocol.ext.r();
    if r > 8 {
        return Err(ReduceError::UnsupportedRadix(r));
    }
    let small = protocol.ext.small().clone();
    let initial = build_ccz_state_pairs(&protocol.ext, &protocol.basis)?;
    let residual = protocol.residual_coefficient();
    let target_residual = build_ccz_power_state(&small, residual)?;
    let target_ccz = build_ccz_state(&small)?;

    let outcomes: Vec<(u32, u32, u32)> = match mode {
        OutcomeMode::Fixed(a, b, c) => vec![(a, b, c)],
        OutcomeMode::Sample { seed, count } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (0..count)
                .map(|_| {
                    (
                        rng.random_range(0..r as u32),
                        rng.random_range(0..r as u32),
                        rng.random_range(0..r as u32),
                    )
                })
                .collect()
        }
        OutcomeMode::All => {
            let mut v = Vec::with_capacity((r * r * r) as usize);
            for a in 0..r as u32 {
                for b in 0..r as u32 {
                    for c in 0..r as u32 {
                        v.push((a, b, c));
                    }
                }
            }
            v
        }
    };

    let measured = protocol.measured_registers();
    let kept = protocol.kept_registers();
    let expected_p = 1.0 / (r as f64).powi(3);
    let mut reports = Vec::with_capacity(outcomes.len());
    let mut all_pass = true;
    for (a, b, c) in outcomes {
        let mut state = initial.clone();
        let mut probability = 1.0;
        for (&reg, label) in measured.iter().zip([a, b, c]) {
            probability *= state.project(reg, label);
        }
        if (probability - expected_p).abs() > NORM_TOL {
            return Err(ReduceError::ProtocolViolation(format!(
                "outcome ({a},{b},{c}) has probability {probability}, expected {expected_p}"
            )));
        }
        let fixed: Vec<(usize, u32)> = measured.iter().copied().zip([a, b, c]).collect();
        let mut reduced = state.factor_out(&fixed, &kept)?;

        let gates = protocol.correction_gates((FieldElem(a), FieldElem(b), FieldElem(c)));
        let singles = gates.iter().filter(|g| g.is_single_qudit()).count();
        let twos = gates.iter().filter(|g| g.is_two_qudit()).count();
        let mut fidelity_residual = 0.0;
        for gate in &gates {
            match *gate {
                CliffordGate::Zpow { beta, target } => reduced.apply_zpow(&small, target, beta),
                CliffordGate::CZpow { beta, targets } => reduced.apply_czpow(&small, targets, beta),
                CliffordGate::Mmul { gamma, target } => {
                    // Post-correction, pre-Mmul snapshot.
                    fidelity_residual = reduced.overlap(&target_residual);
                    reduced.apply_mmul(&small, target, gamma);
                }
                CliffordGate::MeasureZ { .. } => unreachable!("corrections contain no measurement"),
            }
        }
        let fidelity_ccz = reduced.overlap(&target_ccz);
        let pass = (fidelity_residual - 1.0).abs() < FIDELITY_TOL
            && (fidelity_ccz - 1.0).abs() < FIDELITY_TOL;
        all_pass &= pass;
        reports.push(OutcomeReport {
            outcome: [FieldElem(a).hex(), FieldElem(b).hex(), FieldElem(c).hex()],
            probability,
            fidelity_residual,
            fidelity_ccz,
            single_qudit_gates: singles,
            two_qudit_gates: twos,
            measurements: 3,
        });
    }
    Ok(ReductionReport {
        r,
        variant: protocol.variant,
        residual_coefficient: residual.hex(),
        outcomes: reports,
        all_pass,
    })
}

// ---------------------------------------------------------------------------
// The trace-decomposition identity.
// ---------------------------------------------------------------------------

#[derive(Clone, Copy, Debug)]
pub enum IdentityMode {
    Exhaustive,
    Sampled { samples: u64, seed: u64 },
}

#[derive(Clone, Debug)]
pub struct IdentityReport {
    pub holds: bool,
    pub triples_checked: u64,
    pub counterexample: Option<(FieldElem, FieldElem, FieldElem)>,
}

/// Verify Tr_{GF(r^2)/GF(r)}(xyz) =
/// gamma (x0 y0 z0 + x1 y1 z1) + eta * sum_{i+j+k in {1,2}} x_i y_j z_k
/// with gamma = 1 + theta^(r+1), eta = theta^(r+1), for the default
/// normalized basis. Exhaustive over all (r^2)^3 triples, or seeded samples.
pub fn trace_identity_check(r: u64, mode: IdentityMode) -> Result<IdentityReport, ReduceError> {
    if !r.is_power_of_two() || r < 2 {
        return Err(ReduceError::InvalidRadix(r));
    }
    let ext = QuadraticExtension::new(r.trailing_zeros())?;
    let basis = ext.find_normal_basis();
    let big = ext.big();
    let q = big.order() as u32;

    // Components in big-field coordinates: x = comp0 * theta + comp1 * theta^r.
    let comp: Vec<(FieldElem, FieldElem)> = (0..q)
        .map(|bits| {
            let x = FieldElem(bits);
            (
                ext.relative_trace(big.mul(x, basis.theta)),
                ext.relative_trace(big.mul(x, basis.theta_conj)),
            )
        })
        .collect();

    let check_one = |x: u32, y: u32, z: u32| -> bool {
        let (x0, x1) = comp[x as usize];
        let (y0, y1) = comp[y as usize];
        let (z0, z1) = comp[z as usize];
        let lhs = ext.relative_trace(big.mul(big.mul(FieldElem(x), FieldElem(y)), FieldElem(z)));
        let diag = big.add(big.mul(big.mul(x0, y0), z0), big.mul(big.mul(x1, y1), z1));
        let mut mixed = FieldElem::ZERO;
        for (xi, i) in [(x0, 0u32), (x1, 1)] {
            for (yj, j) in [(y0, 0u32), (y1, 1)] {
                for (zk, k) in [(z0, 0u32), (z1, 1)] {
                    if i + j + k == 1 || i + j + k == 2 {
                        mixed = big.add(mixed, big.mul(big.mul(xi, yj), zk));
                    }
                }
            }
        }
        let rhs = big.add(big.mul(basis.gamma, diag), big.mul(basis.eta, mixed));
        lhs == rhs
    };

    match mode {
        IdentityMode::Exhaustive => {
            let mut checked = 0;
            for x in 0..q {
                for y in 0..q {
                    for z in 0..q {
                        checked += 1;
                        if !check_one(x, y, z) {
                            return Ok(IdentityReport {
                                holds: false,
                                triples_checked: checked,
                                counterexample: Some((FieldElem(x), FieldElem(y), FieldElem(z))),
                            });
                        }
                    }
                }
            }
            Ok(IdentityReport {
                holds: true,
                triples_checked: checked,
                counterexample: None,
            })
        }
        IdentityMode::Sampled { samples, seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for t in 0..samples {
                let x = rng.random_range(0..q);
                let y = rng.random_range(0..q);
                let z = rng.random_range(0..q);
                if !check_one(x, y, z) {
                    return Ok(IdentityReport {
                        holds: false,
                        triples_checked: t + 1,
                        counterexample: Some((FieldElem(x), FieldElem(y), FieldElem(z))),
                    });
                }
            }
            Ok(IdentityReport {
                holds: true,
                triples_checked: samples,
                counterexample: None,
            })
        }
    }
}

// ---------------------------------------------------------------------------
// The reduction planner.
// ---------------------------------------------------------------------------

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct GateTotals {
    pub measurements: u32,
    pub single_qudit: u32,
    pub two_qudit: u32,
}

/// Plan for reaching |CCZ>_(2^n): where to distill and how many reduction
/// steps to apply. Dimensions are carried as log2 exponents (they reach
/// 2^126 for odd n near 64).
#[derive(Clone, Debug, Serialize)]
pub struct ReductionPlan {
    pub n: u32,
    /// log2 of the dimension the distillation runs at.
    pub distill_log2: u32,
    /// log2 of the dimension after each successive reduction step.
    pub reduction_chain_log2: Vec<u32>,
    pub totals: GateTotals,
}

/// Case split on the target exponent n: even n >= 6 distills directly;
/// odd n > 2 and n = 4 distill at 2^(2n) and reduce once; n <= 2 distills at
/// 2^8 and walks 256 -> 16 -> 4 (-> 2). Each reduction step costs exactly
/// 3 measurements, 4 single-qudit and 3 two-qudit Clifford gates, so the
/// totals never exceed (9, 12, 9).
pub fn plan_reduction(n: u32) -> ReductionPlan {
    assert!(n >= 1, "target exponent must be at least 1");
    let (distill_log2, chain): (u32, Vec<u32>) = if n >= 6 && n % 2 == 0 {
        (n, vec![])
    } else if n > 2 {
        // odd n > 2, or n = 4
        (2 * n, vec![n])
    } else if n == 2 {
        (8, vec![4, 2])
    } else {
        (8, vec![4, 2, 1])
    };
    let steps = chain.len() as u32;
    let totals = GateTotals {
        measurements: 3 * steps,
        single_qudit: 4 * steps,
        two_qudit: 3 * steps,
    };
    assert!(totals.measurements <= 9 && totals.single_qudit <= 12 && totals.two_qudit <= 9);
    ReductionPlan {
        n,
        distill_log2,
        reduction_chain_log2: chain,
        totals,
    }
}
