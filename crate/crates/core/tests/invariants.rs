//! Cross-module invariants: the symbolic parameter calculus must agree with
//! the explicitly constructed matrices, divisor bookkeeping must agree with
//! the evaluation layer, and the documented orderings must be observable.

use num_bigint::BigInt;
use num_traits::ToPrimitive;

use triorth::code::{construct_base_code, distance_certificate, dual_code, star_product};
use triorth::func_field::{divisor_of_function, splitting_places, Place, Valuation};
use triorth::gf::{make_field, FieldElem, QuadraticExtension};
use triorth::tower::{classical_params, quantum_params, Table3Reference, TowerLevel};

#[test]
fn tower_formulas_match_constructed_matrices() {
    for r in [8u64, 16, 32] {
        let base = construct_base_code(r).unwrap();
        let level = TowerLevel::new(r, 0).unwrap();
        let cp = classical_params(level).unwrap();
        assert_eq!(cp.n, BigInt::from(base.ag.code.n()));
        assert_eq!(cp.k, BigInt::from(base.ag.code.k()));
        let cert = distance_certificate(&base.ag).unwrap();
        assert_eq!(cp.d_lower, BigInt::from(cert.lower));
        assert_eq!(base.ag.deg_g() as u64, (r + 1) * ((r - 2) / 3));
    }
}

#[test]
fn rr_basis_divisors_dominate_g_everywhere() {
    // Full principal-divisor check for every basis element at r = 8:
    // (f) + G >= 0 at all places and deg (f) = 0.
    let base = construct_base_code(8).unwrap();
    let f = base.ext.big();
    for func in &base.ag.eval.rr_basis {
        let div = divisor_of_function(f, func).unwrap();
        assert_eq!(div.degree(), 0);
        assert!(base.ag.g_divisor.neg().leq(&div));
    }
}

#[test]
fn evaluation_columns_follow_documented_order() {
    let base = construct_base_code(8).unwrap();
    let ext = &base.ext;
    let f = ext.big();
    let points = splitting_places(ext);
    assert_eq!(base.ag.eval.eval_points, points);
    // Ascending in the documented order, and exactly the non-subfield elements.
    let mut prev = None;
    for place in &points {
        let Place::Finite(alpha) = place else {
            panic!()
        };
        assert!(!f.in_subfield(*alpha, 3));
        let key = f.order_key(*alpha);
        if let Some(p) = prev {
            assert!(key > p);
        }
        prev = Some(key);
    }
    // The distance witness vanishes exactly on the first deg G points.
    let cert = distance_certificate(&base.ag).unwrap();
    for (j, v) in cert.witness.iter().enumerate() {
        assert_eq!(v.is_zero(), j < base.ag.deg_g() as usize);
    }
}

#[test]
fn star_square_lands_in_dual_r8() {
    let base = construct_base_code(8).unwrap();
    let code = &base.ag.code;
    let f = &code.field;
    let dual = dual_code(code);
    for a in 0..code.k() {
        for b in a..code.k() {
            let sp = star_product(f, code.gen.row(a), code.gen.row(b)).unwrap();
            assert!(
                dual.contains(&sp),
                "star product ({a},{b}) escaped the dual"
            );
        }
    }
}

#[test]
fn z_bound_strictly_below_x_bound_on_reference_grid() {
    let reference = Table3Reference::embedded();
    for row in &reference.rows {
        let level = TowerLevel::new(row.r, row.j).unwrap();
        let qp = quantum_params(level, &BigInt::from(row.k_log)).unwrap();
        assert!(
            qp.d_lower < qp.d_x_lower,
            "Z bound must bind at r={}, j={}",
            row.r,
            row.j
        );
        assert_eq!(qp.n_phys.to_u64().unwrap(), row.n_phys);
    }
}

#[test]
fn valuations_sum_to_zero_for_structured_functions() {
    // Principal divisors of the functions the construction actually uses.
    let ext = QuadraticExtension::new(3).unwrap();
    let f = ext.big();
    let z0 = triorth::func_field::RationalFunction::new(
        f,
        triorth::poly::Poly::additive_span(6),
        triorth::poly::Poly::additive_span(3),
    )
    .unwrap();
    let places: Vec<Place> = f
        .elements()
        .map(Place::Finite)
        .chain(std::iter::once(Place::Infinity))
        .collect();
    let mut total = 0i64;
    for place in places {
        match triorth::func_field::valuation(f, place, &z0) {
            Valuation::Finite(v) => total += v,
            Valuation::PlusInfinity => panic!("z0 is nonzero"),
        }
    }
    assert_eq!(total, 0);
}

#[test]
fn css_builds_match_reference_bounds_r16_r32() {
    // [[188, 52, >=18]] and [[708, 284, >=48]] from the explicit matrices.
    for (r, k_log, d_z, d_x) in [(16u64, 52usize, 18i64, 120i64), (32, 284, 48, 378)] {
        let base = construct_base_code(r).unwrap();
        let css = triorth::css::build_css(&base.ag.code, k_log, base.ag.deg_g(), 0).unwrap();
        assert_eq!(css.n_phys, base.ag.code.n() - k_log);
        assert_eq!(css.d_z_lower, d_z);
        assert_eq!(css.d_x_lower, d_x);
        assert!(css.d_z_lower < css.d_x_lower);
        // Stabilizer dimension accounting again, from the actual ranks.
        let f = &css.field;
        assert_eq!(
            css.x_stabilizers.rank(f) + css.z_stabilizers.rows(),
            css.n_phys - css.k_log
        );
    }
}

#[test]
fn field_serialization_shapes() {
    let f = make_field(6).unwrap();
    assert_eq!(
        serde_json::to_value(&f).unwrap(),
        serde_json::json!({"m": 6, "modulus": "5b"})
    );
    assert_eq!(
        serde_json::to_value(FieldElem(0x2d)).unwrap(),
        serde_json::json!("2d")
    );
}
