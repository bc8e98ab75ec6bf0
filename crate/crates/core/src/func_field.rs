//! Divisor calculus on the rational function field GF(q)(x).
//!
//! Places are the finite points `x = alpha` plus the place at infinity (all
//! rational for the full constant field). Divisors are integer combinations of
//! places; differentials are written `u dx` with `(dx) = -2 * infinity`.

use std::collections::BTreeMap;

use serde_json::{json, Value};
use thiserror::Error;

use crate::gf::{FieldElem, FieldSpec, QuadraticExtension};
use crate::poly::{Poly, PolyError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FuncFieldError {
    #[error("the zero function has no divisor")]
    ZeroFunction,
    #[error("zero denominator")]
    ZeroDenominator,
    #[error("unsupported factorization: {0}")]
    UnsupportedFactorization(PolyError),
    #[error("pole at evaluation point {0}")]
    PoleAtPoint(String),
}

/// A rational place of GF(q)(x).
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Place {
    Finite(FieldElem),
    Infinity,
}

impl Place {
    pub fn json(&self) -> Value {
        match self {
            Place::Finite(alpha) => json!({ "alpha": alpha.hex() }),
            Place::Infinity => json!({ "inf": true }),
        }
    }
}

/// Valuation of a function at a place; the zero function gets the
/// distinguished +infinity marker.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Valuation {
    Finite(i64),
    PlusInfinity,
}

impl Valuation {
    pub fn expect_finite(self) -> i64 {
        match self {
            Valuation::Finite(v) => v,
            Valuation::PlusInfinity => panic!("valuation of the zero function"),
        }
    }
}

/// A formal integer combination of places, with zero coefficients dropped.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct Divisor {
    coeffs: BTreeMap<Place, i64>,
}

impl Divisor {
    pub fn zero() -> Divisor {
        Divisor::default()
    }

    pub fn single(place: Place, coeff: i64) -> Divisor {
        let mut d = Divisor::zero();
        d.set(place, coeff);
        d
    }

    pub fn from_entries<I: IntoIterator<Item = (Place, i64)>>(entries: I) -> Divisor {
        let mut d = Divisor::zero();
        for (p, c) in entries {
            d.set(p, d.coeff(&p) + c);
        }
        d
    }

    fn set(&mut self, place: Place, coeff: i64) {
        if coeff == 0 {
            self.coeffs.remove(&place);
        } else {
            self.coeffs.insert(place, coeff);
        }
    }

    pub fn coeff(&self, place: &Place) -> i64 {
        self.coeffs.get(place).copied().unwrap_or(0)
    }

    pub fn support(&self) -> impl Iterator<Item = (&Place, &i64)> {
        self.coeffs.iter()
    }

    pub fn support_len(&self) -> usize {
        self.coeffs.len()
    }

    /// Sum of coefficients (all places here are rational, so this is the degree).
    pub fn degree(&self) -> i64 {
        self.coeffs.values().sum()
    }

    pub fn add(&self, other: &Divisor) -> Divisor {
        let mut out = self.clone();
        for (p, c) in &other.coeffs {
            out.set(*p, out.coeff(p) + c);
        }
        out
    }

    pub fn neg(&self) -> Divisor {
        Divisor {
            coeffs: self.coeffs.iter().map(|(p, c)| (*p, -c)).collect(),
        }
    }

    pub fn sub(&self, other: &Divisor) -> Divisor {
        self.add(&other.neg())
    }

    pub fn scale(&self, k: i64) -> Divisor {
        if k == 0 {
            return Divisor::zero();
        }
        Divisor {
            coeffs: self.coeffs.iter().map(|(p, c)| (*p, k * c)).collect(),
        }
    }

    /// Coefficientwise >= 0.
    pub fn is_effective(&self) -> bool {
        self.coeffs.values().all(|&c| c >= 0)
    }

    /// Coefficientwise self <= other, over the union of supports.
    pub fn leq(&self, other: &Divisor) -> bool {
        let places: std::collections::BTreeSet<Place> = self
            .coeffs
            .keys()
            .chain(other.coeffs.keys())
            .copied()
            .collect();
        places.iter().all(|p| self.coeff(p) <= other.coeff(p))
    }

    /// JSON list of `{place, coeff}` with finite places in the documented
    /// element order and infinity last.
    pub fn json(&self, f: &FieldSpec) -> Value {
        let mut entries: Vec<(&Place, &i64)> = self.coeffs.iter().collect();
        entries.sort_by_key(|(p, _)| match p {
            Place::Finite(alpha) => (0u8, f.order_key(*alpha)),
            Place::Infinity => (1u8, 0),
        });
        Value::Array(
            entries
                .into_iter()
                .map(|(p, c)| json!({ "place": p.json(), "coeff": c }))
                .collect(),
        )
    }
}

/// A fraction of polynomials kept in reduced form with a monic denominator.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct RationalFunction {
    num: Poly,
    den: Poly,
}

impl RationalFunction {
    pub fn new(f: &FieldSpec, num: Poly, den: Poly) -> Result<RationalFunction, FuncFieldError> {
        if den.is_zero() {
            return Err(FuncFieldError::ZeroDenominator);
        }
        if num.is_zero() {
            return Ok(RationalFunction {
                num: Poly::zero(),
                den: Poly::one(),
            });
        }
        let g = num.gcd(f, &den);
        let num = num.div_exact(f, &g);
        let den = den.div_exact(f, &g);
        let lead_inv = f.inv(den.leading_coeff()).expect("nonzero denominator");
        Ok(RationalFunction {
            num: num.scale(f, lead_inv),
            den: den.scale(f, lead_inv),
        })
    }

    pub fn from_poly(p: Poly) -> RationalFunction {
        RationalFunction {
            num: p,
            den: Poly::one(),
        }
    }

    pub fn one() -> RationalFunction {
        RationalFunction::from_poly(Poly::one())
    }

    pub fn numerator(&self) -> &Poly {
        &self.num
    }

    pub fn denominator(&self) -> &Poly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn mul(&self, f: &FieldSpec, other: &RationalFunction) -> RationalFunction {
        RationalFunction::new(f, self.num.mul(f, &other.num), self.den.mul(f, &other.den))
            .expect("nonzero denominators")
    }

    /// Evaluate at a finite point; the reduced form guarantees a genuine pole
    /// whenever the denominator vanishes.
    pub fn eval(&self, f: &FieldSpec, at: FieldElem) -> Result<FieldElem, FuncFieldError> {
        let d = self.den.eval(f, at);
        if d.is_zero() {
            return Err(FuncFieldError::PoleAtPoint(at.hex()));
        }
        let n = self.num.eval(f, at);
        Ok(f.mul(n, f.inv(d).expect("nonzero")))
    }
}

/// The valuation v_P(f): at a finite place the multiplicity of (x + alpha) in
/// the numerator minus the denominator; at infinity deg(den) - deg(num).
pub fn valuation(f: &FieldSpec, place: Place, func: &RationalFunction) -> Valuation {
    if func.is_zero() {
        return Valuation::PlusInfinity;
    }
    match place {
        Place::Finite(alpha) => {
            let up = func.num.root_multiplicity(f, alpha) as i64;
            let down = func.den.root_multiplicity(f, alpha) as i64;
            Valuation::Finite(up - down)
        }
        Place::Infinity => Valuation::Finite(func.den.degree() - func.num.degree()),
    }
}

/// The principal divisor (f); requires numerator and denominator to split
/// into linear factors over GF(q). Always has degree zero.
pub fn divisor_of_function(
    f: &FieldSpec,
    func: &RationalFunction,
) -> Result<Divisor, FuncFieldError> {
    if func.is_zero() {
        return Err(FuncFieldError::ZeroFunction);
    }
    let (_, num_roots) = func
        .num
        .split_into_roots(f)
        .map_err(FuncFieldError::UnsupportedFactorization)?;
    let (_, den_roots) = func
        .den
        .split_into_roots(f)
        .map_err(FuncFieldError::UnsupportedFactorization)?;
    let mut div = Divisor::zero();
    for (alpha, mult) in num_roots {
        div = div.add(&Divisor::single(Place::Finite(alpha), mult as i64));
    }
    for (alpha, mult) in den_roots {
        div = div.add(&Divisor::single(Place::Finite(alpha), -(mult as i64)));
    }
    div = div.add(&Divisor::single(
        Place::Infinity,
        func.den.degree() - func.num.degree(),
    ));
    debug_assert_eq!(div.degree(), 0);
    Ok(div)
}

/// A differential u dx.
#[derive(Clone, Debug)]
pub struct DifferentialForm {
    pub coefficient: RationalFunction,
}

/// (u dx) = (u) - 2 * infinity; the canonical class has degree -2 here.
pub fn divisor_of_differential(
    f: &FieldSpec,
    w: &DifferentialForm,
) -> Result<Divisor, FuncFieldError> {
    let base = divisor_of_function(f, &w.coefficient)?;
    Ok(base.add(&Divisor::single(Place::Infinity, -2)))
}

/// Canonical basis of the Riemann-Roch space L(G) for deg(G) >= 0:
/// `{ z * x^i / h : 0 <= i <= deg G }` where `h` collects the positive finite
/// coefficients of G and `z` the negated negative ones. Empty for deg(G) < 0.
///
/// Every returned function is checked to satisfy (f) + G >= 0 at the places
/// that could violate it (the support of G and infinity; elsewhere the basis
/// functions only have zeros).
pub fn riemann_roch_basis(
    f: &FieldSpec,
    g_div: &Divisor,
) -> Result<Vec<RationalFunction>, FuncFieldError> {
    let deg = g_div.degree();
    if deg < 0 {
        return Ok(Vec::new());
    }
    let mut h = Poly::one();
    let mut z = Poly::one();
    for (place, &c) in g_div.support() {
        if let Place::Finite(alpha) = place {
            if c > 0 {
                h = h.mul(f, &Poly::linear(*alpha).pow(f, c as u64));
            } else {
                z = z.mul(f, &Poly::linear(*alpha).pow(f, (-c) as u64));
            }
        }
    }
    let mut basis = Vec::with_capacity(deg as usize + 1);
    for i in 0..=deg as usize {
        let num = z.mul(f, &Poly::monomial(i));
        let func = RationalFunction::new(f, num, h.clone())?;
        for (place, &c) in g_div.support() {
            let v = valuation(f, *place, &func).expect_finite();
            assert!(v + c >= 0, "basis function violates (f) + G >= 0");
        }
        if g_div.coeff(&Place::Infinity) == 0 {
            let v = valuation(f, Place::Infinity, &func).expect_finite();
            assert!(v >= 0, "basis function has an unaccounted pole at infinity");
        }
        basis.push(func);
    }
    Ok(basis)
}

/// The sufficient condition for a triorthogonal evaluation code:
/// G >= 0 and 3G <= D + (eta), both coefficientwise.
pub fn check_triorthogonality_condition(
    g_div: &Divisor,
    d_div: &Divisor,
    eta_div: &Divisor,
) -> bool {
    g_div.is_effective() && g_div.scale(3).leq(&d_div.add(eta_div))
}

/// The splitting locus Z: finite places with alpha in GF(r^2) \ GF(r), in the
/// documented element order. These are the evaluation points of the base code
/// and fix the column order of every derived matrix.
pub fn splitting_places(ext: &QuadraticExtension) -> Vec<Place> {
    let f = ext.big();
    f.elements()
        .filter(|&a| !f.in_subfield(a, f.degree() / 2))
        .map(Place::Finite)
        .collect()
}

/// The ramification locus V: finite places with alpha in GF(r), plus infinity.
pub fn ramification_places(ext: &QuadraticExtension) -> Vec<Place> {
    let f = ext.big();
    let mut v: Vec<Place> = f
        .elements()
        .filter(|&a| f.in_subfield(a, f.degree() / 2))
        .map(Place::Finite)
        .collect();
    v.push(Place::Infinity);
    v
}

/// The logarithmic differential eta0 = dt0/t0 for t0 the product of
/// (x + alpha) over the splitting locus. In closed form the coefficient of dx
/// is `(x^r + x)^(r-2) / prod_{alpha in Z} (x + alpha)`, which has simple
/// poles with residue one at every splitting place.
pub fn eta0_differential(ext: &QuadraticExtension) -> DifferentialForm {
    let f = ext.big();
    let m = f.degree() / 2;
    let r = ext.r();
    let small_span = Poly::additive_span(m); // x^r + x
    let big_span = Poly::additive_span(2 * m); // x^(r^2) + x
    let num = small_span.pow(f, r - 2);
    let den = big_span.div_exact(f, &small_span);
    DifferentialForm {
        coefficient: RationalFunction::new(f, num, den).expect("nonzero denominator"),
    }
}

/// Residue of `w` at a simple pole `alpha`: evaluate (x + alpha) * u there.
pub fn residue_at(
    f: &FieldSpec,
    w: &DifferentialForm,
    alpha: FieldElem,
) -> Result<FieldElem, FuncFieldError> {
    let u = &w.coefficient;
    let deflated = u.den.div_exact(f, &Poly::linear(alpha));
    let d = deflated.eval(f, alpha);
    if d.is_zero() {
        return Err(FuncFieldError::PoleAtPoint(alpha.hex()));
    }
    Ok(f.mul(u.num.eval(f, alpha), f.inv(d).expect("nonzero")))
}

/// D0 = sum of the splitting places with coefficient one.
pub fn divisor_d0(ext: &QuadraticExtension) -> Divisor {
    Divisor::from_entries(splitting_places(ext).into_iter().map(|p| (p, 1)))
}

/// G0 = floor((r-2)/3) * sum of the ramification places.
pub fn divisor_g0(ext: &QuadraticExtension) -> Divisor {
    let a = ((ext.r() - 2) / 3) as i64;
    Divisor::from_entries(ramification_places(ext).into_iter().map(|p| (p, a)))
}
