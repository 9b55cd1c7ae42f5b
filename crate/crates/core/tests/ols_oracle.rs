//! Least-squares fits checked against an SVD pseudo-inverse from nalgebra.

use headline_scorer_core::features::FeatureMatrix;
use headline_scorer_core::linalg::lstsq;
use headline_scorer_core::model::fit;
use headline_scorer_core::rng::XorShift64Star;
use nalgebra::DMatrix;

fn uniform(rng: &mut XorShift64Star) -> f64 {
    (rng.next_u64() >> 11) as f64 / (1u64 << 53) as f64 * 2.0 - 1.0
}

fn random_matrix(rng: &mut XorShift64Star, rows: usize, cols: usize) -> Vec<Vec<f64>> {
    (0..rows)
        .map(|_| (0..cols).map(|_| uniform(rng)).collect())
        .collect()
}

/// `pinv([X | 1]) y`, split into weights and intercept.
fn oracle(x: &[Vec<f64>], y: &[f64]) -> (Vec<f64>, f64) {
    let n = x.len();
    let d = x[0].len();
    let a = DMatrix::from_fn(n, d + 1, |i, j| if j < d { x[i][j] } else { 1.0 });
    let pinv = a.pseudo_inverse(1e-10).unwrap();
    let theta = pinv * DMatrix::from_column_slice(n, 1, y);
    let mut w: Vec<f64> = theta.iter().copied().collect();
    let b = w.pop().unwrap();
    (w, b)
}

#[test]
fn random_systems_match_pseudo_inverse() {
    let mut rng = XorShift64Star::new(2024);
    for case in 0..200 {
        let n = 1 + rng.below(20) as usize;
        let d = 1 + rng.below(8) as usize;
        let x = random_matrix(&mut rng, n, d);
        let y: Vec<f64> = (0..n).map(|_| uniform(&mut rng)).collect();
        let model = fit(&FeatureMatrix::from_rows(d, &x).unwrap(), &y).unwrap();
        let (w, b) = oracle(&x, &y);
        for (got, want) in model.weights.iter().zip(&w) {
            assert!((got - want).abs() <= 1e-6, "case {case} ({n}x{d}): {got} vs {want}");
        }
        assert!((model.intercept - b).abs() <= 1e-6, "case {case}");
    }
}

#[test]
fn duplicated_columns_match_pseudo_inverse() {
    let mut rng = XorShift64Star::new(77);
    for _ in 0..50 {
        let n = 6 + rng.below(14) as usize;
        let mut x = random_matrix(&mut rng, n, 3);
        for row in &mut x {
            row.push(row[0]);
        }
        let y: Vec<f64> = x.iter().map(|r| 0.7 * r[0] - 0.2 * r[1] + 0.1).collect();
        let model = fit(&FeatureMatrix::from_rows(4, &x).unwrap(), &y).unwrap();
        let (w, b) = oracle(&x, &y);
        assert!((model.weights[0] - model.weights[3]).abs() <= 1e-6);
        assert!((model.weights[0] - 0.35).abs() <= 1e-6);
        for (got, want) in model.weights.iter().zip(&w) {
            assert!((got - want).abs() <= 1e-6);
        }
        assert!((model.intercept - b).abs() <= 1e-6);
    }
}

#[test]
fn normal_equation_residual_is_small() {
    let mut rng = XorShift64Star::new(5);
    for _ in 0..30 {
        let n = 30 + rng.below(50) as usize;
        let d = 1 + rng.below(10) as usize;
        let x = random_matrix(&mut rng, n, d);
        let y: Vec<f64> = (0..n).map(|_| uniform(&mut rng).abs()).collect();
        let model = fit(&FeatureMatrix::from_rows(d, &x).unwrap(), &y).unwrap();
        let resid: Vec<f64> = x
            .iter()
            .zip(&y)
            .map(|(r, t)| r.iter().zip(&model.weights).map(|(a, w)| a * w).sum::<f64>() + model.intercept - t)
            .collect();
        let y_inf = y.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        for j in 0..=d {
            let g: f64 = x
                .iter()
                .zip(&resid)
                .map(|(r, e)| if j < d { r[j] * e } else { *e })
                .sum();
            assert!(g.abs() <= 1e-6 * (1.0 + y_inf), "gradient {g}");
        }
        let mse = resid.iter().map(|e| e * e).sum::<f64>() / n as f64;
        let mean = y.iter().sum::<f64>() / n as f64;
        let var = y.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n as f64;
        assert!(mse <= var + 1e-9);
    }
}

#[test]
fn row_order_does_not_matter() {
    let mut rng = XorShift64Star::new(11);
    let x = random_matrix(&mut rng, 40, 6);
    let y: Vec<f64> = (0..40).map(|_| uniform(&mut rng)).collect();
    let a = fit(&FeatureMatrix::from_rows(6, &x).unwrap(), &y).unwrap();

    let mut order: Vec<usize> = (0..40).collect();
    rng.shuffle(&mut order);
    let xs: Vec<Vec<f64>> = order.iter().map(|&i| x[i].clone()).collect();
    let ys: Vec<f64> = order.iter().map(|&i| y[i]).collect();
    let b = fit(&FeatureMatrix::from_rows(6, &xs).unwrap(), &ys).unwrap();
    for (p, q) in a.weights.iter().zip(&b.weights) {
        assert!((p - q).abs() <= 1e-8);
    }
    assert!((a.intercept - b.intercept).abs() <= 1e-8);
}

#[test]
fn wide_correlated_system_is_stable() {
    // Columns share a common component, as averaged word vectors do.
    let mut rng = XorShift64Star::new(99);
    let (n, d) = (400, 60);
    let x: Vec<Vec<f64>> = (0..n)
        .map(|_| {
            let common = uniform(&mut rng);
            (0..d).map(|_| common + 0.05 * uniform(&mut rng)).collect()
        })
        .collect();
    let y: Vec<f64> = (0..n).map(|_| uniform(&mut rng).abs()).collect();
    let flat: Vec<f64> = x.iter().flat_map(|r| r.iter().copied().chain([1.0])).collect();
    let ours = lstsq(&flat, n, d + 1, &y).unwrap();
    let (w, b) = oracle(&x, &y);
    for (got, want) in ours.x.iter().zip(w.iter().chain([&b])) {
        assert!((got - want).abs() <= 1e-6 * (1.0 + want.abs()));
    }
}
