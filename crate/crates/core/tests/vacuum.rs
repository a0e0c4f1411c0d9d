mod common;

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use nuosc::linalg::{CMat3, C64};
use nuosc::vacuum::{probability_closed_form, probability_table, probability_via_propagation};
use nuosc::{build_pmns, Baseline, Flavor, OscParams};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn rotation(i: usize, j: usize, theta: f64, delta: f64) -> CMat3 {
    let mut m = CMat3::identity();
    let (s, c) = theta.sin_cos();
    m[(i, i)] = C64::new(c, 0.0);
    m[(j, j)] = C64::new(c, 0.0);
    m[(i, j)] = C64::from_polar(s, -delta);
    m[(j, i)] = -C64::from_polar(s, delta);
    m
}

/// Standard parameterization as a literal product of three rotations.
fn pmns_oracle(p: &OscParams) -> CMat3 {
    let d = if p.antineutrino { -p.delta } else { p.delta };
    rotation(1, 2, p.theta23, 0.0) * rotation(0, 2, p.theta13, d) * rotation(0, 1, p.theta12, 0.0)
}

/// `δαβ − 4 Σ Re(W) sin²Δ + 2 Σ Im(W) sin 2Δ` with `Δ = 1.27 Δm² L/E`.
fn textbook_probability(p: &OscParams, l_over_e: f64, a: usize, b: usize) -> f64 {
    let u = pmns_oracle(p);
    let m2 = [0.0, p.dm2_21, p.dm2_31];
    let mut prob = if a == b { 1.0 } else { 0.0 };
    for i in 0..3 {
        for j in 0..i {
            let w = u[(a, i)].conj() * u[(b, i)] * u[(a, j)] * u[(b, j)].conj();
            let delta = 1.27 * (m2[i] - m2[j]) * l_over_e;
            prob += -4.0 * w.re * delta.sin().powi(2) + 2.0 * w.im * (2.0 * delta).sin();
        }
    }
    prob
}

#[test]
fn both_paths_match_textbook_formula() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut worst: f64 = 0.0;
    for _ in 0..300 {
        let p = common::random_params(&mut rng);
        let l_over_e = rand::Rng::random_range(&mut rng, 0.0..5000.0);
        let b = Baseline::from_l_over_e(l_over_e).unwrap();
        for a in Flavor::ACTIVE {
            for c in Flavor::ACTIVE {
                let want = textbook_probability(&p, l_over_e, a.index(), c.index());
                let cf = probability_closed_form(&p, &b, a, c).unwrap();
                let pr = probability_via_propagation(&p, &b, a, c).unwrap();
                worst = worst.max((cf - want).abs()).max((pr - want).abs());
            }
        }
    }
    assert!(worst < 1e-12, "max deviation {worst:e}");
}

#[test]
fn pmns_matches_rotation_product() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for _ in 0..200 {
        let p = common::random_params(&mut rng);
        let diff = build_pmns(&p).matrix() - pmns_oracle(&p);
        assert!(diff.iter().all(|z| z.norm() < 1e-14));
    }
}

#[test]
fn two_flavor_limit() {
    let p = OscParams {
        theta13: 0.0,
        delta: 0.0,
        ..OscParams::reference()
    };
    let s2 = (2.0 * p.theta12).sin().powi(2);
    for k in 0..100 {
        let l_over_e = 40_000.0 * k as f64 / 99.0;
        let b = Baseline::from_l_over_e(l_over_e).unwrap();
        let want = 1.0 - s2 * (1.27 * p.dm2_21 * l_over_e).sin().powi(2);
        let got = probability_closed_form(&p, &b, Flavor::Electron, Flavor::Electron).unwrap();
        assert!(
            (got - want).abs() < 1e-12,
            "L/E={l_over_e}: {got} vs {want}"
        );
    }
}

#[test]
fn all_cp_phases_coincide_when_both_phases_are_full_turns() {
    // Δm²31 = 30 Δm²21, so φ21 = 2π implies φ31 = 60π.
    let base = OscParams {
        dm2_31: 30.0 * 7.42e-5,
        ..OscParams::reference()
    };
    let energy = 2.54 * base.dm2_21 * 1285.0 / TAU;
    let b = Baseline::new(1285.0, energy).unwrap();
    let curves: Vec<f64> = [0.0, FRAC_PI_2, PI, -FRAC_PI_2]
        .iter()
        .map(|&d| {
            probability_closed_form(&base.with_delta(d), &b, Flavor::Muon, Flavor::Electron)
                .unwrap()
        })
        .collect();
    for c in &curves {
        assert!((c - curves[0]).abs() < 1e-12, "{curves:?}");
    }
    // And away from that energy they do not.
    let off = Baseline::new(1285.0, 0.8 * energy).unwrap();
    let a = probability_closed_form(
        &base.with_delta(FRAC_PI_2),
        &off,
        Flavor::Muon,
        Flavor::Electron,
    )
    .unwrap();
    let c = probability_closed_form(
        &base.with_delta(-FRAC_PI_2),
        &off,
        Flavor::Muon,
        Flavor::Electron,
    )
    .unwrap();
    assert!((a - c).abs() > 1e-3);
}

#[test]
fn antineutrino_relations() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for _ in 0..100 {
        let p = common::random_params(&mut rng).with_antineutrino(false);
        let b = Baseline::from_l_over_e(rand::Rng::random_range(&mut rng, 0.0..3000.0)).unwrap();
        let nu = probability_table(&p, &b).unwrap();
        let anti = probability_table(&p.with_antineutrino(true), &b).unwrap();
        let flipped = probability_table(&p.with_delta(-p.delta), &b).unwrap();
        for a in 0..3 {
            for c in 0..3 {
                // CPT: P̄(α→β) = P(β→α).
                assert!((anti[a][c] - nu[c][a]).abs() < 1e-12);
                assert!((anti[a][c] - flipped[a][c]).abs() < 1e-12);
            }
        }
    }
}

#[test]
fn dune_cp_curves_separate() {
    let p = OscParams::reference();
    let prob = |d: f64, e: f64| {
        let b = Baseline::new(1285.0, e).unwrap();
        probability_closed_form(&p.with_delta(d), &b, Flavor::Muon, Flavor::Electron).unwrap()
    };
    let grid: Vec<f64> = (0..200).map(|k| 0.5 + 7.5 * k as f64 / 199.0).collect();
    let gap = |d1: f64, d2: f64| {
        grid.iter()
            .map(|&e| (prob(d1, e) - prob(d2, e)).abs())
            .fold(0.0, f64::max)
    };
    assert!(gap(0.0, PI) > 0.01);
    assert!(gap(FRAC_PI_2, -FRAC_PI_2) > 0.01);
    let peak = |d: f64| grid.iter().map(|&e| prob(d, e)).fold(0.0, f64::max);
    assert!(peak(-FRAC_PI_2) > peak(FRAC_PI_2));
}
