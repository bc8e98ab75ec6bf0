//! Arithmetic in the binary fields GF(2^m) and their quadratic extensions.
//!
//! Elements are stored in polynomial-basis coordinates: bit `i` of a
//! [`FieldElem`] holds the coefficient of `x^i`. Each degree has one fixed
//! modulus (the Conway polynomial, see [`MODULUS_TABLE`]), so every matrix and
//! table produced downstream is bit-reproducible.
//!
//! Elements serialize as lowercase hex strings of the coefficient bits; a
//! [`FieldSpec`] serializes as `{m, modulus-hex}`.

use std::fmt;
use std::sync::Arc;

use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};
use thiserror::Error;

/// Largest supported extension degree over GF(2).
pub const MAX_DEGREE: u32 = 16;

/// Conway polynomials over GF(2) for degrees 1..=16, bit `i` = coefficient of `x^i`.
///
/// All entries are irreducible and primitive, so `x` generates the
/// multiplicative group of every supported field.
pub const MODULUS_TABLE: [u32; MAX_DEGREE as usize] = [
    0x3,     // x + 1
    0x7,     // x^2 + x + 1
    0xb,     // x^3 + x + 1
    0x13,    // x^4 + x + 1
    0x25,    // x^5 + x^2 + 1
    0x5b,    // x^6 + x^4 + x^3 + x + 1
    0x83,    // x^7 + x + 1
    0x11d,   // x^8 + x^4 + x^3 + x^2 + 1
    0x211,   // x^9 + x^4 + 1
    0x46f,   // x^10 + x^6 + x^5 + x^3 + x^2 + x + 1
    0x805,   // x^11 + x^2 + 1
    0x10eb,  // x^12 + x^7 + x^6 + x^5 + x^3 + x + 1
    0x201b,  // x^13 + x^4 + x^3 + x + 1
    0x40a9,  // x^14 + x^7 + x^5 + x^3 + 1
    0x8035,  // x^15 + x^5 + x^4 + x^2 + 1
    0x1002d, // x^16 + x^5 + x^3 + x^2 + 1
];

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FieldError {
    #[error("unsupported field degree {0} (supported range is 1..={MAX_DEGREE})")]
    UnsupportedDegree(u32),
    #[error("element bits {bits:#x} out of range for GF(2^{m})")]
    ElementOutOfRange { bits: u32, m: u32 },
    #[error("division by zero in GF(2^{0})")]
    DivisionByZero(u32),
    #[error("degree {sub} does not divide degree {sup}: no such subfield")]
    NoSuchSubfield { sub: u32, sup: u32 },
    #[error("element {0} does not lie in the requested subfield")]
    NotInSubfield(String),
    #[error("invalid hex element encoding {0:?}")]
    InvalidHex(String),
}

/// An element of a binary field, in polynomial-basis coordinates.
///
/// The owning [`FieldSpec`] is passed to every operation; an element on its
/// own is just a bit pattern. The derived `Ord` compares raw bit patterns and
/// is used only for map keys; the documented deterministic element order is
/// [`FieldSpec::order_key`].
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct FieldElem(pub u32);

impl FieldElem {
    pub const ZERO: FieldElem = FieldElem(0);
    pub const ONE: FieldElem = FieldElem(1);

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }

    /// Lowercase hex encoding of the coefficient bits.
    pub fn hex(self) -> String {
        format!("{:x}", self.0)
    }

    pub fn from_hex(s: &str) -> Result<FieldElem, FieldError> {
        u32::from_str_radix(s, 16)
            .map(FieldElem)
            .map_err(|_| FieldError::InvalidHex(s.to_string()))
    }
}

impl fmt::Debug for FieldElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:x}", self.0)
    }
}

impl fmt::Display for FieldElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:x}", self.0)
    }
}

impl Serialize for FieldElem {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.hex())
    }
}

struct LogTables {
    /// exp[i] = x^i for i in 0..order-1
    exp: Vec<u32>,
    /// log[bits] = discrete log of the nonzero element; log[0] is unused
    log: Vec<u32>,
}

/// A fixed binary field GF(2^m). Cheap to clone and safe to share across
/// threads; all operations are pure.
#[derive(Clone)]
pub struct FieldSpec {
    m: u32,
    modulus: u32,
    tables: Arc<LogTables>,
}

impl PartialEq for FieldSpec {
    fn eq(&self, other: &Self) -> bool {
        self.m == other.m && self.modulus == other.modulus
    }
}
impl Eq for FieldSpec {}

impl fmt::Debug for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GF(2^{}; modulus {:#x})", self.m, self.modulus)
    }
}

impl Serialize for FieldSpec {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut s = serializer.serialize_struct("FieldSpec", 2)?;
        s.serialize_field("m", &self.m)?;
        s.serialize_field("modulus", &format!("{:x}", self.modulus))?;
        s.end()
    }
}

/// Carryless (polynomial) product of two bit-polynomials, reduced mod `modulus`.
fn clmul_reduce(mut a: u64, mut b: u64, modulus: u64, m: u32) -> u64 {
    let mut acc = 0u64;
    while b != 0 {
        if b & 1 == 1 {
            acc ^= a;
        }
        b >>= 1;
        a <<= 1;
        if (a >> m) & 1 == 1 {
            a ^= modulus;
        }
    }
    acc
}

impl FieldSpec {
    /// Build GF(2^m) with the fixed modulus from [`MODULUS_TABLE`].
    pub fn new(m: u32) -> Result<FieldSpec, FieldError> {
        if m == 0 || m > MAX_DEGREE {
            return Err(FieldError::UnsupportedDegree(m));
        }
        let modulus = MODULUS_TABLE[(m - 1) as usize];
        let order = 1usize << m;
        let mut exp = vec![0u32; order - 1];
        let mut log = vec![0u32; order];
        let mut cur = 1u64;
        for (i, e) in exp.iter_mut().enumerate() {
            *e = cur as u32;
            log[cur as usize] = i as u32;
            cur = clmul_reduce(cur, 2, modulus as u64, m);
        }
        // x is primitive for every table entry, so the powers sweep all
        // nonzero elements and close back at 1.
        assert_eq!(cur, 1, "modulus {modulus:#x} is not primitive");
        Ok(FieldSpec {
            m,
            modulus,
            tables: Arc::new(LogTables { exp, log }),
        })
    }

    pub fn degree(&self) -> u32 {
        self.m
    }

    /// Field order 2^m.
    pub fn order(&self) -> u64 {
        1u64 << self.m
    }

    pub fn modulus(&self) -> u32 {
        self.modulus
    }

    pub fn zero(&self) -> FieldElem {
        FieldElem::ZERO
    }

    pub fn one(&self) -> FieldElem {
        FieldElem::ONE
    }

    /// The class of `x` itself (a multiplicative generator for every table modulus).
    pub fn generator(&self) -> FieldElem {
        if self.m == 1 {
            FieldElem::ONE
        } else {
            FieldElem(2)
        }
    }

    pub fn elem(&self, bits: u32) -> FieldElem {
        debug_assert!(
            (bits as u64) < self.order(),
            "bits {bits:#x} out of range for GF(2^{})",
            self.m
        );
        FieldElem(bits)
    }

    pub fn try_elem(&self, bits: u32) -> Result<FieldElem, FieldError> {
        if (bits as u64) < self.order() {
            Ok(FieldElem(bits))
        } else {
            Err(FieldError::ElementOutOfRange { bits, m: self.m })
        }
    }

    pub fn contains(&self, a: FieldElem) -> bool {
        (a.0 as u64) < self.order()
    }

    pub fn add(&self, a: FieldElem, b: FieldElem) -> FieldElem {
        FieldElem(a.0 ^ b.0)
    }

    pub fn mul(&self, a: FieldElem, b: FieldElem) -> FieldElem {
        if a.is_zero() || b.is_zero() {
            return FieldElem::ZERO;
        }
        let t = &self.tables;
        let n = self.order() as u32 - 1;
        let mut s = t.log[a.0 as usize] + t.log[b.0 as usize];
        if s >= n {
            s -= n;
        }
        FieldElem(t.exp[s as usize])
    }

    pub fn inv(&self, a: FieldElem) -> Result<FieldElem, FieldError> {
        if a.is_zero() {
            return Err(FieldError::DivisionByZero(self.m));
        }
        let t = &self.tables;
        let n = self.order() as u32 - 1;
        let l = t.log[a.0 as usize];
        Ok(FieldElem(t.exp[((n - l) % n) as usize]))
    }

    pub fn div(&self, a: FieldElem, b: FieldElem) -> Result<FieldElem, FieldError> {
        Ok(self.mul(a, self.inv(b)?))
    }

    pub fn pow(&self, a: FieldElem, e: u64) -> FieldElem {
        if e == 0 {
            return FieldElem::ONE;
        }
        if a.is_zero() {
            return FieldElem::ZERO;
        }
        let t = &self.tables;
        let n = (self.order() - 1) as u64;
        let l = t.log[a.0 as usize] as u64;
        let s = (l % n * (e % n)) % n;
        FieldElem(t.exp[s as usize])
    }

    /// `a^(2^k)`: k-fold Frobenius.
    pub fn frobenius_iter(&self, a: FieldElem, k: u32) -> FieldElem {
        self.pow(a, 1u64 << (k % self.m))
    }

    /// Total ordering key used everywhere a deterministic element order is
    /// needed: coefficient sequences (c0, c1, ...) compared lexicographically,
    /// least-significant coefficient first.
    pub fn order_key(&self, a: FieldElem) -> u32 {
        a.0.reverse_bits() >> (32 - self.m)
    }

    /// All field elements in the documented deterministic order.
    pub fn elements(&self) -> impl Iterator<Item = FieldElem> + '_ {
        (0..self.order() as u32).map(|key| FieldElem(key.reverse_bits() >> (32 - self.m)))
    }

    /// True if `a` lies in the subfield GF(2^sub_m), i.e. is fixed by x -> x^(2^sub_m).
    pub fn in_subfield(&self, a: FieldElem, sub_m: u32) -> bool {
        self.m % sub_m == 0 && self.pow(a, 1u64 << sub_m) == a
    }

    /// Relative field trace onto the subfield of degree `target_m`:
    /// `x + x^s + x^(s^2) + ...` with `s = 2^target_m`. The result lies in the
    /// subfield but is returned in the coordinates of this field.
    pub fn trace_to_degree(&self, a: FieldElem, target_m: u32) -> Result<FieldElem, FieldError> {
        if target_m == 0 || self.m % target_m != 0 {
            return Err(FieldError::NoSuchSubfield {
                sub: target_m,
                sup: self.m,
            });
        }
        let steps = self.m / target_m;
        let mut acc = FieldElem::ZERO;
        let mut cur = a;
        for _ in 0..steps {
            acc = self.add(acc, cur);
            cur = self.pow(cur, 1u64 << target_m);
        }
        debug_assert!(self.in_subfield(acc, target_m));
        Ok(acc)
    }

    /// Absolute trace onto GF(2), as a bit.
    pub fn trace_bit(&self, a: FieldElem) -> u8 {
        let t = self.trace_to_degree(a, 1).expect("degree 1 always divides");
        t.0 as u8
    }
}

/// Construct GF(2^m) with the fixed modulus table.
pub fn make_field(m: u32) -> Result<FieldSpec, FieldError> {
    FieldSpec::new(m)
}

/// Identification of GF(2^sub) with the subfield of GF(2^sup), `sub | sup`.
///
/// The generator of the small field maps to the smallest root (in the
/// documented element order) of the small modulus inside the big field, which
/// keeps the identification deterministic.
pub struct SubfieldEmbedding {
    sub: FieldSpec,
    sup: FieldSpec,
    gen_image: FieldElem,
    /// gen_image^i for i in 0..sub.m
    powers: Vec<FieldElem>,
    /// Row-reduced solver for projecting back: rows of the GF(2) system.
    solve_rows: Vec<SolveRow>,
}

struct SolveRow {
    pivot_small_bit: u32,
    /// Mask over big-field coordinate bits whose XOR gives this small bit.
    big_mask: u32,
}

impl SubfieldEmbedding {
    pub fn new(sub: &FieldSpec, sup: &FieldSpec) -> Result<SubfieldEmbedding, FieldError> {
        if sup.degree() % sub.degree() != 0 {
            return Err(FieldError::NoSuchSubfield {
                sub: sub.degree(),
                sup: sup.degree(),
            });
        }
        let gen_image = Self::smallest_modulus_root(sub, sup)?;
        let mut powers = Vec::with_capacity(sub.degree() as usize);
        let mut cur = FieldElem::ONE;
        for _ in 0..sub.degree() {
            powers.push(cur);
            cur = sup.mul(cur, gen_image);
        }
        let solve_rows = Self::build_solver(sub, sup, &powers);
        Ok(SubfieldEmbedding {
            sub: sub.clone(),
            sup: sup.clone(),
            gen_image,
            powers,
            solve_rows,
        })
    }

    fn smallest_modulus_root(sub: &FieldSpec, sup: &FieldSpec) -> Result<FieldElem, FieldError> {
        let modulus = sub.modulus();
        for cand in sup.elements() {
            // Evaluate the small modulus at cand by Horner over the big field.
            let mut acc = FieldElem::ZERO;
            for i in (0..=sub.degree()).rev() {
                acc = sup.mul(acc, cand);
                if (modulus >> i) & 1 == 1 {
                    acc = sup.add(acc, FieldElem::ONE);
                }
            }
            if acc.is_zero() {
                return Ok(cand);
            }
        }
        Err(FieldError::NoSuchSubfield {
            sub: sub.degree(),
            sup: sup.degree(),
        })
    }

    /// Gauss-Jordan over GF(2) on the (sup.m x sub.m) coordinate matrix of the
    /// powers, keeping an augmented identity so projection is a mask-XOR.
    fn build_solver(sub: &FieldSpec, sup: &FieldSpec, powers: &[FieldElem]) -> Vec<SolveRow> {
        let rows = sup.degree() as usize;
        let cols = sub.degree() as usize;
        // Each row: cols coefficient bits | rows augmented bits.
        let mut mat: Vec<u64> = (0..rows)
            .map(|r| {
                let mut bits = 0u64;
                for (c, p) in powers.iter().enumerate() {
                    if (p.0 >> r) & 1 == 1 {
                        bits |= 1 << c;
                    }
                }
                bits | (1u64 << (cols + r))
            })
            .collect();
        let mut solve = Vec::with_capacity(cols);
        let mut rank = 0usize;
        for c in 0..cols {
            let piv = (rank..rows).find(|&r| (mat[r] >> c) & 1 == 1);
            let piv = piv.expect("powers of the generator image are GF(2)-independent");
            mat.swap(rank, piv);
            let prow = mat[rank];
            for (r, row) in mat.iter_mut().enumerate() {
                if r != rank && (*row >> c) & 1 == 1 {
                    *row ^= prow;
                }
            }
            rank += 1;
        }
        for c in 0..cols {
            let row = mat[c];
            solve.push(SolveRow {
                pivot_small_bit: c as u32,
                big_mask: (row >> cols) as u32,
            });
        }
        let _ = sub;
        solve
    }

    pub fn small_field(&self) -> &FieldSpec {
        &self.sub
    }

    pub fn big_field(&self) -> &FieldSpec {
        &self.sup
    }

    pub fn generator_image(&self) -> FieldElem {
        self.gen_image
    }

    /// Map a small-field element into the big field.
    pub fn embed(&self, a: FieldElem) -> FieldElem {
        let mut acc = FieldElem::ZERO;
        let mut bits = a.0;
        while bits != 0 {
            let i = bits.trailing_zeros();
            acc = self.sup.add(acc, self.powers[i as usize]);
            bits &= bits - 1;
        }
        acc
    }

    /// Express a big-field element in small-field coordinates; errors if it
    /// does not lie in the embedded subfield.
    pub fn project(&self, a: FieldElem) -> Result<FieldElem, FieldError> {
        let mut small = 0u32;
        for row in &self.solve_rows {
            if (a.0 & row.big_mask).count_ones() & 1 == 1 {
                small |= 1 << row.pivot_small_bit;
            }
        }
        let candidate = FieldElem(small);
        if self.embed(candidate) == a {
            Ok(candidate)
        } else {
            Err(FieldError::NotInSubfield(a.hex()))
        }
    }
}

/// A normal basis {theta, theta^r} of GF(r^2) over GF(r), normalized so that
/// theta + theta^r = 1. Carries the derived scalars eta = theta^(r+1) and
/// gamma = 1 + eta (both elements of GF(r), stored in big-field coordinates).
#[derive(Clone, Copy, Debug)]
pub struct NormalBasisPair {
    pub theta: FieldElem,
    pub theta_conj: FieldElem,
    pub eta: FieldElem,
    pub gamma: FieldElem,
}

/// GF(r^2) together with its index-2 subfield GF(r), r = 2^m.
///
/// One arithmetic core (the degree-2m field) with two views: the subfield is
/// the fixed field of x -> x^r, and [`QuadraticExtension::decompose`] bridges
/// to normal-basis coordinates over GF(r).
pub struct QuadraticExtension {
    big: FieldSpec,
    small: FieldSpec,
    embedding: SubfieldEmbedding,
    r: u64,
}

impl QuadraticExtension {
    /// Build GF(2^m) inside GF(2^2m).
    pub fn new(m: u32) -> Result<QuadraticExtension, FieldError> {
        let small = FieldSpec::new(m)?;
        let big = FieldSpec::new(2 * m)?;
        let embedding = SubfieldEmbedding::new(&small, &big)?;
        Ok(QuadraticExtension {
            big,
            small,
            embedding,
            r: 1u64 << m,
        })
    }

    pub fn r(&self) -> u64 {
        self.r
    }

    pub fn big(&self) -> &FieldSpec {
        &self.big
    }

    pub fn small(&self) -> &FieldSpec {
        &self.small
    }

    pub fn embedding(&self) -> &SubfieldEmbedding {
        &self.embedding
    }

    /// x^r, the nontrivial Galois conjugate.
    pub fn conjugate(&self, a: FieldElem) -> FieldElem {
        self.big.pow(a, self.r)
    }

    /// Tr_{GF(r^2)/GF(r)}(x) = x + x^r, in big-field coordinates.
    pub fn relative_trace(&self, a: FieldElem) -> FieldElem {
        self.big.add(a, self.conjugate(a))
    }

    /// N_{GF(r^2)/GF(r)}(x) = x^(r+1), in big-field coordinates.
    pub fn relative_norm(&self, a: FieldElem) -> FieldElem {
        self.big.pow(a, self.r + 1)
    }

    fn basis_from_theta(&self, theta: FieldElem) -> NormalBasisPair {
        let eta = self.relative_norm(theta);
        NormalBasisPair {
            theta,
            theta_conj: self.conjugate(theta),
            eta,
            gamma: self.big.add(FieldElem::ONE, eta),
        }
    }

    /// Smallest theta (documented element order) with theta + theta^r = 1.
    /// Such a theta always exists and automatically lies outside GF(r).
    pub fn find_normal_basis(&self) -> NormalBasisPair {
        for theta in self.big.elements() {
            if self.relative_trace(theta) == FieldElem::ONE {
                return self.basis_from_theta(theta);
            }
        }
        unreachable!("the relative trace is surjective onto GF(r)")
    }

    /// Smallest trace-1 theta whose norm differs from 1, so that
    /// gamma = 1 + theta^(r+1) is invertible. No such theta exists for r = 2,
    /// where every trace-1 element is a cube root of unity.
    pub fn find_normal_basis_with_invertible_gamma(&self) -> Option<NormalBasisPair> {
        for theta in self.big.elements() {
            if self.relative_trace(theta) == FieldElem::ONE
                && self.relative_norm(theta) != FieldElem::ONE
            {
                return Some(self.basis_from_theta(theta));
            }
        }
        None
    }

    /// Write x = x0*theta + x1*theta^r and return (x0, x1) as GF(r) elements
    /// in small-field coordinates. Uses x0 = Tr(x*theta), x1 = Tr(x*theta^r).
    pub fn decompose(&self, x: FieldElem, basis: &NormalBasisPair) -> (FieldElem, FieldElem) {
        let x0 = self.relative_trace(self.big.mul(x, basis.theta));
        let x1 = self.relative_trace(self.big.mul(x, basis.theta_conj));
        let x0 = self.embedding.project(x0).expect("trace lies in GF(r)");
        let x1 = self.embedding.project(x1).expect("trace lies in GF(r)");
        (x0, x1)
    }

    /// Inverse of [`QuadraticExtension::decompose`].
    pub fn compose(&self, x0: FieldElem, x1: FieldElem, basis: &NormalBasisPair) -> FieldElem {
        let a = self.big.mul(self.embedding.embed(x0), basis.theta);
        let b = self.big.mul(self.embedding.embed(x1), basis.theta_conj);
        self.big.add(a, b)
    }
}
