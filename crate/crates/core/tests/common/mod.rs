//! Randomized invariants shared by the property tests and the acceptance suite.
#![allow(dead_code)]

use nalgebra::DMatrix;
use proptest::prelude::*;
use proptest::test_runner::{Config, RngSeed, TestRunner};

use svst_core::{mp_incomplete_moment, svst_denoise, worst_case_amse, MatrixClass, MpParams};

pub type Check = fn() -> Result<(), String>;

pub const INVARIANTS: &[(&str, Check)] = &[
    ("svst orthogonal invariance (mat)", orthogonal_invariance),
    ("svst orthogonal invariance (sym)", orthogonal_invariance_sym),
    ("svst nonexpansive (mat)", nonexpansive),
    ("svst nonexpansive (sym)", nonexpansive_sym),
    ("svst shrinks singular values", shrinks_singular_values),
    ("mp moments nonincreasing in cutoff", moments_nonincreasing),
    ("mp moments normalize", moments_normalize),
    ("amse convex in threshold", amse_convex_in_threshold),
];

const CASES: u32 = 128;

fn runner(seed: u64) -> TestRunner {
    TestRunner::new(Config {
        cases: CASES,
        rng_seed: RngSeed::Fixed(seed),
        failure_persistence: None,
        ..Config::default()
    })
}

fn check<S: Strategy>(
    seed: u64,
    strategy: S,
    test: impl Fn(S::Value) -> Result<(), TestCaseError>,
) -> Result<(), String>
where
    S::Value: std::fmt::Debug,
{
    runner(seed).run(&strategy, test).map_err(|e| e.to_string())
}

fn matrix(rows: usize, cols: usize) -> impl Strategy<Value = DMatrix<f64>> {
    prop::collection::vec(-3.0..3.0f64, rows * cols).prop_map(move |v| DMatrix::from_vec(rows, cols, v))
}

fn orthogonal(n: usize) -> impl Strategy<Value = DMatrix<f64>> {
    matrix(n, n).prop_map(|a| a.qr().q())
}

fn dims() -> impl Strategy<Value = (usize, usize)> {
    (1usize..6).prop_flat_map(|m| (Just(m), m..8))
}

const MAT: MatrixClass = MatrixClass::Mat { beta: 1.0 };

pub fn orthogonal_invariance() -> Result<(), String> {
    let s = (
        dims().prop_flat_map(|(m, n)| (matrix(m, n), orthogonal(m), orthogonal(n))),
        0.0..4.0f64,
    );
    check(1, s, |((y, u, v), lambda)| {
        let lhs = svst_denoise(&(&u * &y * v.transpose()), lambda, MAT).unwrap();
        let rhs = &u * svst_denoise(&y, lambda, MAT).unwrap() * v.transpose();
        prop_assert!((lhs - rhs).norm() < 1e-9);
        Ok(())
    })
}

pub fn orthogonal_invariance_sym() -> Result<(), String> {
    let s = (
        (1usize..7).prop_flat_map(|n| (matrix(n, n), orthogonal(n))),
        0.0..4.0f64,
    );
    check(2, s, |((y, u), lambda)| {
        let lhs = svst_denoise(&(&u * &y * u.transpose()), lambda, MatrixClass::Sym).unwrap();
        let rhs = &u * svst_denoise(&y, lambda, MatrixClass::Sym).unwrap() * u.transpose();
        prop_assert!((lhs - rhs).norm() < 1e-9);
        Ok(())
    })
}

pub fn nonexpansive() -> Result<(), String> {
    let s = (dims().prop_flat_map(|(m, n)| (matrix(m, n), matrix(m, n))), 0.0..4.0f64);
    check(3, s, |((a, b), lambda)| {
        let gap = (svst_denoise(&a, lambda, MAT).unwrap() - svst_denoise(&b, lambda, MAT).unwrap()).norm();
        prop_assert!(gap <= (&a - &b).norm() + 1e-10);
        Ok(())
    })
}

pub fn nonexpansive_sym() -> Result<(), String> {
    let s = ((1usize..7).prop_flat_map(|n| (matrix(n, n), matrix(n, n))), 0.0..4.0f64);
    check(4, s, |((a, b), lambda)| {
        let sym = MatrixClass::Sym;
        let gap = (svst_denoise(&a, lambda, sym).unwrap() - svst_denoise(&b, lambda, sym).unwrap()).norm();
        let d = &a - &b;
        prop_assert!(gap <= ((&d + d.transpose()) * 0.5).norm() + 1e-10);
        Ok(())
    })
}

pub fn shrinks_singular_values() -> Result<(), String> {
    let s = (dims().prop_flat_map(|(m, n)| matrix(m, n)), 0.0..4.0f64);
    check(5, s, |(y, lambda)| {
        let out = svst_denoise(&y, lambda, MAT).unwrap();
        let mut expected: Vec<f64> = y.singular_values().iter().map(|s| (s - lambda).max(0.0)).collect();
        let mut got: Vec<f64> = out.singular_values().iter().copied().collect();
        expected.sort_by(f64::total_cmp);
        got.sort_by(f64::total_cmp);
        for (e, g) in expected.iter().zip(&got) {
            prop_assert!((e - g).abs() < 1e-9, "{:?} vs {:?}", expected, got);
        }
        Ok(())
    })
}

pub fn moments_nonincreasing() -> Result<(), String> {
    check(6, (0.01..=1.0f64, 0.0..1.0f64, 0.0..1.0f64), |(gamma, a, b)| {
        let p = MpParams::new(gamma).unwrap();
        let (lo, hi) = (a.min(b) * p.gamma_plus(), a.max(b) * p.gamma_plus());
        for k in [0.0, 0.5, 1.0] {
            prop_assert!(mp_incomplete_moment(lo, k, &p).unwrap() >= mp_incomplete_moment(hi, k, &p).unwrap() - 1e-13);
        }
        Ok(())
    })
}

pub fn moments_normalize() -> Result<(), String> {
    check(7, 0.01..=1.0f64, |gamma| {
        let p = MpParams::new(gamma).unwrap();
        prop_assert!((mp_incomplete_moment(0.0, 0.0, &p).unwrap() - 1.0).abs() < 1e-10);
        prop_assert!((mp_incomplete_moment(0.0, 1.0, &p).unwrap() - 1.0).abs() < 1e-10);
        Ok(())
    })
}

pub fn amse_convex_in_threshold() -> Result<(), String> {
    let s = (0.05..=1.0f64, 0.0..1.0f64, 0.0..1.0f64, 0.0..1.0f64, any::<bool>());
    check(8, s, |(beta, rho, a, b, sym)| {
        let class = if sym {
            MatrixClass::Sym
        } else {
            MatrixClass::Mat { beta }
        };
        let edge = class.spectral_edge(rho);
        let (la, lb) = (a * edge, b * edge);
        let mid = worst_case_amse(class, rho, 0.5 * (la + lb)).unwrap();
        let chord = 0.5 * (worst_case_amse(class, rho, la).unwrap() + worst_case_amse(class, rho, lb).unwrap());
        prop_assert!(mid <= chord + 1e-10, "mid {} chord {}", mid, chord);
        Ok(())
    })
}
