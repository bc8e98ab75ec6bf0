//! Acceptance suite: one test per release criterion, each printing a
//! PASS/FAIL line (visible with `cargo test -- --nocapture`). Heavy criteria
//! serialize on a shared lock so wall-clock budgets are measured unshared.

use std::process::Command;
use std::sync::Mutex;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_traits::Zero;

use triorth::code::{
    construct_base_code, distance_certificate, is_triorthogonal, is_triorthogonal_sampled,
};
use triorth::css::{
    build_css, heuristic_distance_upper, standard_form, transversal_ccz_phase_check,
};
use triorth::func_field::{
    check_triorthogonality_condition, divisor_d0, divisor_g0, divisor_of_differential,
    eta0_differential, ramification_places, Divisor,
};
use triorth::gf::QuadraticExtension;
use triorth::reduce::{
    plan_reduction, simulate_reduction, trace_identity_check, GateTotals, IdentityMode,
    OutcomeMode, FIDELITY_TOL,
};
use triorth::tower::{
    classical_params, quantum_params, tvz_check, verify_table3, Table3Reference, TowerLevel,
};

static TIMING_LOCK: Mutex<()> = Mutex::new(());

fn timed<T>(budget: Duration, label: &str, body: impl FnOnce() -> T) -> T {
    let _guard = TIMING_LOCK.lock().unwrap();
    let start = Instant::now();
    let out = body();
    let elapsed = start.elapsed();
    assert!(
        elapsed < budget,
        "{label}: took {elapsed:?}, budget {budget:?}"
    );
    out
}

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_triorth"))
}

#[test]
fn criterion_01_base_code_r8_exact() {
    timed(Duration::from_secs(10), "criterion 1", || {
        let dir = std::env::temp_dir().join("triorth-acceptance-c1");
        let status = bin()
            .args(["construct", "--r", "8", "--out"])
            .arg(&dir)
            .status()
            .expect("spawn construct");
        assert!(status.success(), "construct --r 8 must succeed");
        let report: serde_json::Value = serde_json::from_str(
            &std::fs::read_to_string(dir.join("report_r8.json")).expect("report exists"),
        )
        .unwrap();
        assert_eq!(report["n"], 56);
        assert_eq!(report["k"], 19);
        assert_eq!(report["q"], 64);
        assert_eq!(report["distance"]["lower"], 38);
        assert_eq!(report["distance"]["upper"], 38);
        assert_eq!(report["distance"]["exact"], true);
        assert_eq!(report["triorthogonality"]["is_triorthogonal"], true);
        assert_eq!(report["triorthogonality"]["checked_triples"], 6859);

        // Library-level cross-check including the explicit witness.
        let base = construct_base_code(8).unwrap();
        let tri = is_triorthogonal(&base.ag.code);
        assert!(tri.is_triorthogonal);
        assert_eq!(tri.checked_triples, 6859);
        assert!(base.ag.code.contains_all_ones());
        let cert = distance_certificate(&base.ag).unwrap();
        assert_eq!((cert.lower, cert.upper, cert.exact), (38, 38, true));
        assert_eq!(cert.witness.iter().filter(|v| !v.is_zero()).count(), 38);
    });
    println!("criterion 1: PASS - [56, 19, 38]_64, exhaustive triorthogonality, exact distance");
}

#[test]
fn criterion_02_base_codes_r16_r32() {
    timed(Duration::from_secs(120), "criterion 2", || {
        let base16 = construct_base_code(16).unwrap();
        assert_eq!((base16.ag.code.n(), base16.ag.code.k()), (240, 69));
        assert_eq!(base16.ag.code.q(), 256);
        let cert16 = distance_certificate(&base16.ag).unwrap();
        assert_eq!((cert16.lower, cert16.exact), (172, true));
        let tri16 = is_triorthogonal_sampled(&base16.ag.code, 10_000, 2024);
        assert!(tri16.is_triorthogonal);
        assert_eq!(tri16.checked_triples, 10_000);

        let base32 = construct_base_code(32).unwrap();
        assert_eq!((base32.ag.code.n(), base32.ag.code.k()), (992, 331));
        assert_eq!(base32.ag.code.q(), 1024);
        let cert32 = distance_certificate(&base32.ag).unwrap();
        assert_eq!((cert32.lower, cert32.exact), (662, true));
        let tri32 = is_triorthogonal_sampled(&base32.ag.code, 10_000, 2024);
        assert!(tri32.is_triorthogonal);
        assert_eq!(tri32.checked_triples, 10_000);
    });
    println!("criterion 2: PASS - [240, 69, 172]_256 and [992, 331, 662]_1024");
}

#[test]
fn criterion_03_canonical_divisor_identity() {
    timed(Duration::from_secs(1), "criterion 3", || {
        for r in [8u64, 16, 32] {
            let ext = QuadraticExtension::new(r.trailing_zeros()).unwrap();
            let eta = divisor_of_differential(ext.big(), &eta0_differential(&ext)).unwrap();
            let expected = divisor_d0(&ext).neg().add(&Divisor::from_entries(
                ramification_places(&ext)
                    .into_iter()
                    .map(|p| (p, (r - 2) as i64)),
            ));
            assert_eq!(eta, expected, "divisor identity fails at r={r}");
            assert_eq!(eta.degree(), -2);
            assert!(check_triorthogonality_condition(
                &divisor_g0(&ext),
                &divisor_d0(&ext),
                &eta
            ));
        }
    });
    println!("criterion 3: PASS - (eta0) = -D0 + (r-2) sum_V Q, degree -2, r in {{8, 16, 32}}");
}

#[test]
fn criterion_04_summary_table_cell_for_cell() {
    timed(Duration::from_secs(60), "criterion 4", || {
        let reference = Table3Reference::embedded();
        assert_eq!(reference.rows.len(), 15);
        let mismatches = verify_table3(&reference);
        assert!(
            mismatches.is_empty(),
            "cells out of agreement: {mismatches:?}"
        );
        // The largest row, verbatim.
        let big = reference
            .rows
            .iter()
            .find(|row| row.r == 32 && row.j == 4)
            .unwrap();
        assert_eq!(
            (big.n_phys, big.k_log, big.d_lower),
            (774_113_521, 266_073_871, 12_914_929)
        );
        let status = bin()
            .args(["quantum", "--table3", "--verify-table3", "--out"])
            .arg(std::env::temp_dir().join("triorth-acceptance-c4.json"))
            .status()
            .expect("spawn quantum");
        assert!(status.success());
    });
    println!(
        "criterion 4: PASS - 15 rows match (integers exact; gamma to 3 decimals; rate to 3 \
         decimals against each row's own K/N, two reference cells carrying a known rate \
         misprint)"
    );
}

#[test]
fn criterion_05_tvz_margins() {
    for r in [8u64, 16, 32] {
        let rep = tvz_check(r).unwrap();
        assert!(
            rep.sum >= rep.sum_closed_form,
            "reported sum falls below its closed form at r={r}"
        );
        assert!(
            rep.exceeds_tvz,
            "sum must strictly exceed the TVZ threshold"
        );
        assert!(
            rep.tvz_margin > num_rational_zero(),
            "margin must be positive"
        );
        assert!(rep.exceeds_gv && rep.gv_margin > 0.0);
    }
    let rep8 = tvz_check(8).unwrap();
    assert_eq!(
        rep8.sum,
        big_ratio(149, 168),
        "r=8 reported sum is 1 - 19/168"
    );
    assert_eq!(rep8.tvz_threshold, big_ratio(144, 168));
    println!("criterion 5: PASS - exact rational margins over the TVZ threshold and above GV");
}

fn num_rational_zero() -> num_rational::BigRational {
    num_rational::BigRational::zero()
}

fn big_ratio(n: i64, d: i64) -> num_rational::BigRational {
    num_rational::BigRational::new(BigInt::from(n), BigInt::from(d))
}

#[test]
fn criterion_06_css_42_14_6() {
    timed(Duration::from_secs(120), "criterion 6", || {
        let base = construct_base_code(8).unwrap();
        let form = standard_form(&base.ag.code, 14).unwrap();
        // Orthogonality of the split is re-verified explicitly.
        let f = &form.field;
        for r0 in form.h0.row_iter() {
            for r1 in form.h1.row_iter() {
                assert!(form.h0.dot(f, r0, r1).is_zero());
            }
        }
        let css = build_css(&base.ag.code, 14, base.ag.deg_g(), 0).unwrap();
        assert_eq!((css.n_phys, css.k_log), (42, 14));
        assert_eq!(css.d_z_lower, 6);
        assert_eq!(css.d_x_lower, 24);
        assert!(css.d_z_lower < css.d_x_lower);

        let phases = transversal_ccz_phase_check(&form, 1_000, 7);
        assert!(phases.passed, "{:?}", phases.counterexample);
        assert_eq!(phases.samples, 1_000);

        let upper = heuristic_distance_upper(&css, 100_000, 7);
        assert!(upper.min_found() >= 6, "heuristic reported {upper:?}");
        assert!(upper.z_upper >= 6 && upper.x_upper >= 24);
    });
    println!("criterion 6: PASS - [[42, 14, 6]]_64 split, phases, and 1e5-trial upper bounds");
}

#[test]
fn criterion_07_trace_identity() {
    timed(Duration::from_secs(60), "criterion 7", || {
        for r in [2u64, 4, 8] {
            let rep = trace_identity_check(r, IdentityMode::Exhaustive).unwrap();
            assert!(rep.holds, "identity fails at r={r}");
            let q = r * r;
            assert_eq!(rep.triples_checked, q * q * q);
        }
        for r in [16u64, 32] {
            let rep = trace_identity_check(
                r,
                IdentityMode::Sampled {
                    samples: 1_000_000,
                    seed: 7,
                },
            )
            .unwrap();
            assert!(rep.holds, "identity fails at r={r}");
            assert_eq!(rep.triples_checked, 1_000_000);
        }
    });
    println!("criterion 7: PASS - exhaustive r in {{2, 4, 8}}, 1e6 samples r in {{16, 32}}");
}

#[test]
fn criterion_08_reduction_simulation() {
    timed(Duration::from_secs(180), "criterion 8", || {
        for r in [2u64, 4, 8] {
            let rep = simulate_reduction(r, OutcomeMode::All).unwrap();
            assert_eq!(rep.outcomes.len(), (r * r * r) as usize);
            for o in &rep.outcomes {
                assert!(
                    (o.fidelity_residual - 1.0).abs() < FIDELITY_TOL,
                    "r={r}: post-correction state missed |CCZ^c> at outcome {:?}",
                    o.outcome
                );
                assert!(
                    (o.fidelity_ccz - 1.0).abs() < FIDELITY_TOL,
                    "r={r}: final state missed |CCZ> at outcome {:?}",
                    o.outcome
                );
                assert_eq!(
                    (o.single_qudit_gates, o.two_qudit_gates, o.measurements),
                    (4, 3, 3)
                );
                assert!((o.probability - (r as f64).powi(-3)).abs() < 1e-12);
            }
            assert!(rep.all_pass);
        }
    });
    println!(
        "criterion 8: PASS - fidelity 1 for every outcome at r in {{2, 4, 8}} with 4+3 gates \
         (r = 2 runs the conjugate-third variant: its residual scalar is eta, since every \
         normalized basis there has gamma = 0)"
    );
}

#[test]
fn criterion_09_planner_budgets() {
    for n in 1..=64u32 {
        let p = plan_reduction(n);
        assert!(p.totals.measurements <= 9);
        assert!(p.totals.single_qudit <= 12);
        assert!(p.totals.two_qudit <= 9);
    }
    assert_eq!(
        plan_reduction(1).totals,
        GateTotals {
            measurements: 9,
            single_qudit: 12,
            two_qudit: 9
        }
    );
    println!("criterion 9: PASS - budgets hold for n in 1..=64; n = 1 hits (9, 12, 9) exactly");
}

#[test]
fn criterion_10_declared_parameter_level_coverage() {
    // Exact quantum distances for j >= 1, explicit lifted generator matrices,
    // and distillation noise thresholds are declared out of desk-scale reach;
    // the family is covered at parameter level instead. Spot-check that the
    // parameter layer indeed covers j >= 1.
    let level = TowerLevel::new(8, 1).unwrap();
    let cp = classical_params(level).unwrap();
    assert_eq!(
        (cp.n, cp.k, cp.d_lower),
        (BigInt::from(448), BigInt::from(96), BigInt::from(304))
    );
    let qp = quantum_params(level, &BigInt::from(26)).unwrap();
    assert_eq!(qp.n_phys, BigInt::from(422));
    assert_eq!(qp.d_lower, BigInt::from(22));
    println!(
        "criterion 10: PASS (declared) - lifted codes are verified at parameter level; exact \
         j >= 1 distances, explicit lifted matrices, and noise thresholds are out of scope"
    );
}
