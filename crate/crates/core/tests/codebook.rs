//! Distributional and structural invariants of the random codebook and
//! the exhaustive encoder, checked by Monte Carlo over matrix seeds.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use sparc_core::chi2::chi2_upper_tail;
use sparc_core::experiments::sweep_geometry;
use sparc_core::sparc::{
    derive_dimensions, encode, mean_square, mean_square_distance, min_distance_search, quantizer_level,
    scalar_quantize, synthesize_codeword, CodecSettings,
};
use sparc_core::{BetaIndex, DesignMatrix, EncodeStatus, SparcParams};

fn normal_vec(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.sample(StandardNormal)).collect()
}

#[test]
fn matrix_entries_are_standard_normal_and_uncorrelated() {
    let params = SparcParams::from_geometry(4000, 3, 5).unwrap();
    let a = DesignMatrix::sample(&params, 17).unwrap();
    let entries = a.entries();
    let count = entries.len() as f64;
    let mean = entries.iter().sum::<f64>() / count;
    let var = entries.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / count;
    let m4 = entries.iter().map(|v| (v - mean).powi(4)).sum::<f64>() / count;
    assert!(mean.abs() < 4.0 / count.sqrt(), "mean {mean}");
    assert!((var - 1.0).abs() < 4.0 * (2.0 / count).sqrt(), "variance {var}");
    assert!((m4 / (var * var) - 3.0).abs() < 0.15, "kurtosis {}", m4 / (var * var));
    let n = params.n as f64;
    for (l1, m1, l2, m2) in [(0, 0, 0, 1), (0, 2, 1, 2), (1, 4, 2, 0), (2, 3, 2, 4)] {
        let (c1, c2) = (a.column(l1, m1), a.column(l2, m2));
        let corr = c1.iter().zip(c2).map(|(x, y)| x * y).sum::<f64>() / n;
        assert!(corr.abs() < 4.0 / n.sqrt(), "corr({l1},{m1};{l2},{m2}) = {corr}");
    }
}

#[test]
fn codeword_norm_follows_scaled_chi_square() {
    // n·|Aβ|²/(L·c²) ~ χ²_n, checked with a Kolmogorov–Smirnov statistic
    // over independent matrices.
    let (n, l, coeff) = (10usize, 3usize, 0.7);
    let params = SparcParams::from_geometry(n, l, 2).unwrap();
    let beta = BetaIndex::new(vec![1, 0, 1]);
    let trials = 4000;
    let mut stats: Vec<f64> = (0..trials)
        .map(|seed| {
            let a = DesignMatrix::sample(&params, seed).unwrap();
            let c = synthesize_codeword(&a, &beta, coeff).unwrap();
            n as f64 * mean_square(&c) / (l as f64 * coeff * coeff)
        })
        .collect();
    let mean = stats.iter().sum::<f64>() / trials as f64;
    assert!((mean - n as f64).abs() < 4.0 * (2.0 * n as f64 / trials as f64).sqrt(), "mean {mean}");
    stats.sort_by(f64::total_cmp);
    let ks = stats
        .iter()
        .enumerate()
        .map(|(i, &t)| {
            let cdf = 1.0 - chi2_upper_tail(n as u32, t).unwrap().ln().exp();
            let lo = i as f64 / trials as f64;
            let hi = (i + 1) as f64 / trials as f64;
            (cdf - lo).abs().max((hi - cdf).abs())
        })
        .fold(0.0f64, f64::max);
    // 0.1% critical value of the one-sample KS statistic
    assert!(ks < 1.95 / (trials as f64).sqrt(), "KS statistic {ks}");
}

#[test]
fn solution_indicators_are_exchangeable() {
    // Over the matrix ensemble every codeword is a solution with the same
    // probability.
    let (n, l, m) = (8usize, 2usize, 4usize);
    let params = SparcParams::from_geometry(n, l, m).unwrap();
    let target = vec![1.0; n];
    let (d, coeff) = (0.75, (0.25f64 / l as f64).sqrt());
    let trials = 4000u64;
    let mut hits = vec![0u64; m * m];
    for seed in 0..trials {
        let a = DesignMatrix::sample(&params, seed).unwrap();
        for (k, hit) in hits.iter_mut().enumerate() {
            let beta = BetaIndex::from_rank(k as u128, l, m);
            let c = synthesize_codeword(&a, &beta, coeff).unwrap();
            *hit += (mean_square_distance(&target, &c) <= d) as u64;
        }
    }
    let total: u64 = hits.iter().sum();
    let p = total as f64 / (trials as f64 * hits.len() as f64);
    assert!(p > 0.05 && p < 0.95, "solution probability {p} too extreme for the test");
    let sd = (trials as f64 * p * (1.0 - p)).sqrt();
    for (k, &h) in hits.iter().enumerate() {
        let z = (h as f64 - trials as f64 * p) / sd;
        assert!(z.abs() < 4.0, "codeword {k}: {h} hits, z = {z}");
    }
}

/// Householder reflection `I − 2vvᵀ/|v|²`.
fn reflect(v: &[f64], s: &[f64]) -> Vec<f64> {
    let vv: f64 = v.iter().map(|x| x * x).sum();
    let vs: f64 = v.iter().zip(s).map(|(a, b)| a * b).sum();
    s.iter().zip(v).map(|(si, vi)| si - 2.0 * vs / vv * vi).collect()
}

#[test]
fn minimum_distance_law_is_rotation_invariant() {
    let (n, l, m) = (12usize, 2usize, 6usize);
    let params = SparcParams::from_geometry(n, l, m).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let source = normal_vec(&mut rng, n);
    let axis = normal_vec(&mut rng, n);
    let rotated = reflect(&axis, &source);
    assert!((mean_square(&rotated) - mean_square(&source)).abs() < 1e-12);
    let coeff = 0.5;
    let trials = 3000u64;
    let run = |target: &[f64], offset: u64| -> Vec<f64> {
        (0..trials)
            .map(|t| {
                let a = DesignMatrix::sample(&params, offset + t).unwrap();
                min_distance_search(target, &a, coeff, 1 << 20).unwrap().d2
            })
            .collect()
    };
    let plain = run(&source, 0);
    let turned = run(&rotated, 1_000_000);
    let stats = |v: &[f64]| {
        let mean = v.iter().sum::<f64>() / v.len() as f64;
        let var = v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (v.len() - 1) as f64;
        (mean, var)
    };
    let ((m1, v1), (m2, v2)) = (stats(&plain), stats(&turned));
    let z = (m1 - m2) / ((v1 + v2) / trials as f64).sqrt();
    assert!(z.abs() < 4.0, "means {m1} vs {m2}, z = {z}");
}

#[test]
fn section_permutation_preserves_distances() {
    let (n, l, m) = (16usize, 3usize, 5usize);
    let params = SparcParams::from_geometry(n, l, m).unwrap();
    let a = DesignMatrix::sample(&params, 23).unwrap();
    let order = [2usize, 0, 1];
    let permuted = a.permute_sections(&order).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let target = normal_vec(&mut rng, n);
    let coeff = 0.6;
    for k in 0..(m * m * m) as u128 {
        let beta = BetaIndex::from_rank(k, l, m);
        let moved = BetaIndex::new(order.iter().map(|&src| beta.sections[src]).collect());
        let d1 = mean_square_distance(&target, &synthesize_codeword(&a, &beta, coeff).unwrap());
        let d2 = mean_square_distance(&target, &synthesize_codeword(&permuted, &moved, coeff).unwrap());
        assert!((d1 - d2).abs() <= 1e-12 * d1.max(1.0), "beta {beta:?}: {d1} vs {d2}");
    }
    let best = min_distance_search(&target, &a, coeff, 1 << 20).unwrap().d2;
    let best_permuted = min_distance_search(&target, &permuted, coeff, 1 << 20).unwrap().d2;
    assert!((best - best_permuted).abs() <= 1e-12 * best.max(1.0));
}

#[test]
fn quantizer_error_is_at_most_half_a_cell() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for _ in 0..100_000 {
        let d = rng.random_range(0.1..2.0);
        let gamma2 = d + rng.random_range(0.1..3.0);
        let levels = rng.random_range(1..200usize);
        let x = d + (gamma2 - d) * rng.random_range(1e-9..=1.0);
        let (i, q) = scalar_quantize(x, d, gamma2, levels).unwrap();
        assert!(i >= 1 && i as usize <= levels);
        assert_eq!(q, quantizer_level(i, d, gamma2, levels));
        let half = (gamma2 - d) / (2.0 * levels as f64);
        assert!((q - x).abs() <= half * (1.0 + 1e-12), "x = {x}, Q = {q}, half cell {half}");
        assert!(q > d);
    }
}

#[test]
fn derived_dimensions_track_the_rate() {
    for n in [8usize, 16, 32, 64, 128] {
        for rate in [0.25, 0.5, 1.0, 2.0] {
            for b in [1.5, 2.0, 3.0] {
                let Ok(p) = derive_dimensions(n, rate, b) else { continue };
                assert!(p.sections >= 2);
                assert!(p.columns >= 2);
                let target = n as f64 * rate / b;
                let l = p.sections as f64;
                // L·ln L is the closest integer fit to nR/b
                for other in [l - 1.0, l + 1.0] {
                    if other >= 2.0 {
                        assert!((l * l.ln() - target).abs() <= (other * other.ln() - target).abs() + 1e-12);
                    }
                }
                assert_eq!(p.columns as f64, l.powf(b).round().max(2.0));
                assert!(p.rate_actual * n as f64 >= n as f64 * rate / 2.0);
                assert!((p.rate_actual - p.ln_codewords() / n as f64).abs() < 1e-12);
            }
        }
    }
    assert!(derive_dimensions(4, 1.0, 2.0).is_err());
    assert!(derive_dimensions(16, 1.0, 1.0).is_err());
}

#[test]
fn zero_rate_is_a_single_codeword() {
    let (n, l) = (10usize, 2usize);
    let params = sweep_geometry(n, l, 0.0).unwrap();
    assert_eq!(params.columns, 1);
    assert_eq!(params.codeword_count(), Some(1));
    let a = DesignMatrix::sample(&params, 4).unwrap();
    let settings = CodecSettings::new(0.5, 3.0).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let mut coded = 0;
    for _ in 0..50 {
        let source = normal_vec(&mut rng, n);
        let out = encode(&source, &a, &params, &settings).unwrap();
        if out.status != EncodeStatus::Coded {
            continue;
        }
        coded += 1;
        assert_eq!(out.beta_hat, Some(BetaIndex::new(vec![0, 0])));
        let only = synthesize_codeword(&a, &BetaIndex::new(vec![0, 0]), out.coeff).unwrap();
        let direct = mean_square_distance(&source, &only);
        assert!((out.distortion_total.unwrap() - direct).abs() < 1e-12);
    }
    assert!(coded > 10);
}
