mod common;

use nuosc::linalg::{CMat3, C64};
use nuosc::matter::{
    approx_effective_params, approx_splittings, exact_splittings, matter_hamiltonian,
    matter_probability, ApproxQuality, MatterContext, MatterMode,
};
use nuosc::vacuum::probability_closed_form;
use nuosc::{build_pmns, Baseline, Flavor, OscParams};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Flavor Hamiltonian built from scratch, in eV²/GeV.
fn hamiltonian_oracle(p: &OscParams, e: f64, v: f64) -> CMat3 {
    let u = *build_pmns(p).matrix();
    let mut m = CMat3::zeros();
    m[(1, 1)] = C64::new(p.dm2_21, 0.0);
    m[(2, 2)] = C64::new(p.dm2_31, 0.0);
    let mut h = u * m * u.adjoint();
    let a = v * e * if p.antineutrino { -1.0 } else { 1.0 };
    h[(0, 0)] += a;
    h / C64::new(2.0 * e, 0.0)
}

/// `|<β| exp(−i 2·1.27·2 L H) |α>|²`.
fn expm_probability(p: &OscParams, e: f64, v: f64, l: f64, a: usize, b: usize) -> f64 {
    let s = common::expm_i(&hamiltonian_oracle(p, e, v), 2.0 * 1.27 * 2.0 * l);
    s[(b, a)].norm_sqr()
}

#[test]
fn hamiltonian_matches_oracle() {
    let p = OscParams::reference().with_delta(0.8);
    let ctx = MatterContext::new(2.0, 1e-4).unwrap();
    let d = matter_hamiltonian(&p, &ctx) - hamiltonian_oracle(&p, 2.0, 1e-4);
    assert!(d.iter().all(|z| z.norm() < 1e-18));
}

#[test]
fn exact_mode_matches_matrix_exponential() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let mut worst: f64 = 0.0;
    for _ in 0..200 {
        let p = OscParams::reference()
            .with_delta(rng.random_range(-3.2..3.2))
            .with_antineutrino(rng.random_bool(0.5));
        let e = rng.random_range(0.1..10.0);
        let v = rng.random_range(0.0..2e-4);
        let l = rng.random_range(0.0..3000.0);
        let ctx = MatterContext::new(e, v).unwrap();
        for a in Flavor::ACTIVE {
            for b in Flavor::ACTIVE {
                let got = matter_probability(&p, &ctx, l, a, b, MatterMode::Exact).unwrap();
                let want = expm_probability(&p, e, v, l, a.index(), b.index());
                worst = worst.max((got - want).abs());
            }
        }
    }
    assert!(worst < 1e-10, "max deviation {worst:e}");
}

#[test]
fn zero_potential_reduces_to_vacuum() {
    let p = OscParams::reference().with_delta(1.3);
    let e = 0.5;
    for mode in [MatterMode::Exact, MatterMode::Approx] {
        let ctx = MatterContext::new(e, 0.0).unwrap();
        for k in 0..200 {
            let l = 1600.0 * k as f64 / 199.0 * e;
            let b = Baseline::new(l, e).unwrap();
            for a in Flavor::ACTIVE {
                for c in Flavor::ACTIVE {
                    let m = matter_probability(&p, &ctx, l, a, c, mode).unwrap();
                    let v = probability_closed_form(&p, &b, a, c).unwrap();
                    assert!((m - v).abs() < 1e-10, "{mode} L={l}: {m} vs {v}");
                }
            }
        }
    }
}

#[test]
fn effective_parameters_approach_vacuum() {
    let p = OscParams::reference();
    for v in [0.0, 1e-12] {
        let eff = approx_effective_params(&p, &MatterContext::new(1.0, v).unwrap()).unwrap();
        let rel = |x: f64, y: f64| ((x - y) / y).abs();
        assert!(rel(eff.theta12, p.theta12) < 1e-6);
        assert!(rel(eff.theta13, p.theta13) < 1e-6);
        assert!(rel(eff.dm2_21, p.dm2_21) < 1e-6);
        assert!(rel(eff.dm2_31, p.dm2_31) < 1e-6);
        assert!(eff.phi13.abs() < 1e-8);
        assert_eq!(eff.theta23, p.theta23);
    }
}

#[test]
fn approximation_tracks_exact_at_low_energy() {
    let p = OscParams::reference();
    let e = 0.5;
    let mut worst: f64 = 0.0;
    for v in [5e-5, 1e-4] {
        let ctx = MatterContext::new(e, v).unwrap();
        for k in 0..200 {
            let l = 1600.0 * k as f64 / 199.0 * e;
            for a in Flavor::ACTIVE {
                for c in Flavor::ACTIVE {
                    let x = matter_probability(&p, &ctx, l, a, c, MatterMode::Exact).unwrap();
                    let y = matter_probability(&p, &ctx, l, a, c, MatterMode::Approx).unwrap();
                    worst = worst.max((x - y).abs());
                }
            }
        }
    }
    assert!(worst < 1e-4, "max deviation {worst:e}");
}

#[test]
fn theta13_grows_with_potential() {
    let p = OscParams::reference();
    for i in 0..40 {
        let e = 0.1 + 9.9 * i as f64 / 39.0;
        for j in 1..=20 {
            let v = 1e-4 * j as f64 / 20.0;
            let eff = approx_effective_params(&p, &MatterContext::new(e, v).unwrap()).unwrap();
            assert!(eff.theta13 >= p.theta13, "E={e} V={v}");
        }
    }
}

#[test]
fn splittings_agree_across_range() {
    let p = OscParams::reference();
    let mut worst: f64 = 0.0;
    for i in 0..40 {
        let e = 0.1 + 9.9 * i as f64 / 39.0;
        for j in 0..=20 {
            let v = 1e-4 * j as f64 / 20.0;
            let ctx = MatterContext::new(e, v).unwrap();
            let x = exact_splittings(&p, &ctx).unwrap();
            let y = approx_splittings(&p, &ctx).unwrap();
            for k in 0..2 {
                worst = worst.max(((x[k] - y[k]) / x[k]).abs());
            }
        }
    }
    assert!(worst < 5e-3, "max relative deviation {worst:e}");
}

#[test]
fn exact_mode_conserves_probability() {
    let mut rng = ChaCha8Rng::seed_from_u64(22);
    for _ in 0..300 {
        let p = common::random_params(&mut rng);
        let ctx =
            MatterContext::new(rng.random_range(0.05..20.0), rng.random_range(0.0..1e-3)).unwrap();
        let l = rng.random_range(0.0..1e4);
        for a in Flavor::ACTIVE {
            let s: f64 = Flavor::ACTIVE
                .iter()
                .map(|&b| matter_probability(&p, &ctx, l, a, b, MatterMode::Exact).unwrap())
                .sum();
            assert!((s - 1.0).abs() < 1e-12);
        }
    }
}

#[test]
fn resonance_crossing_is_flagged() {
    let p = OscParams::reference();
    let low = approx_effective_params(&p, &MatterContext::new(0.5, 1e-4).unwrap()).unwrap();
    assert_eq!(low.quality, ApproxQuality::Perturbative);
    let high = approx_effective_params(&p, &MatterContext::new(50.0, 1e-4).unwrap()).unwrap();
    assert_eq!(high.quality, ApproxQuality::ResonanceCrossing);
}
