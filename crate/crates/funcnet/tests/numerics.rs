use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use spli_funcnet::matrix::{Adjacency, Mat};
use spli_funcnet::model::{flatten, LayerParams, Rgcn};
use spli_funcnet::synth::planted_partition;
use spli_funcnet::train::{fit, train, TrainParams};

const STEP: f64 = 1e-5;
/// Relative error uses max(|analytic|, |numeric|, FLOOR) as denominator so
/// parameters with vanishing gradient are judged on absolute error.
const FLOOR: f64 = 1e-6;

fn random_graph(rng: &mut ChaCha8Rng, n: usize, f: usize) -> (Mat, Vec<Adjacency>) {
    let x = Mat {
        rows: n,
        cols: f,
        data: (0..n * f).map(|_| rng.gen_range(-1.5..1.5)).collect(),
    };
    let rel = (0..2)
        .map(|_| {
            let edges: Vec<(usize, usize)> = (0..n)
                .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
                .filter(|_| rng.gen_bool(0.4))
                .collect();
            Adjacency::from_edges(n, edges)
        })
        .collect();
    (x, rel)
}

/// Hidden pre-activations, used to detect finite-difference steps that cross a ReLU kink.
fn kink_signs(m: &Rgcn, x: &Mat, rel: &[Adjacency], seed: u64) -> Vec<bool> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut h = x.clone();
    let mut signs = Vec::new();
    for layer in m.layers.iter().take(m.layers.len() - 1) {
        let mut z = h.matmul(&layer.w_self);
        for (a, w) in rel.iter().zip(&layer.w_rel) {
            z.add_assign(&a.aggregate(&h).matmul(w));
        }
        signs.extend(z.data.iter().map(|v| *v > 0.0));
        z.map_inplace(|v| v.max(0.0));
        let keep = 1.0 - m.dropout;
        for v in &mut z.data {
            *v *= if rng.gen::<f64>() < keep { 1.0 / keep } else { 0.0 };
        }
        h = z;
    }
    signs
}

#[test]
fn analytic_gradients_match_finite_differences() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut worst: f64 = 0.0;
    let mut checked = 0;
    let mut kinks = 0;
    for trial in 0..20 {
        let n = rng.gen_range(2..=8);
        let (x, rel) = random_graph(&mut rng, n, 3);
        let classes = 3;
        let targets: Vec<(usize, usize)> = (0..n).map(|i| (i, rng.gen_range(0..classes))).collect();
        let mut m = Rgcn::new(3, 4, classes, 2, 2, 0.3, trial);
        let seed = Some(1000 + trial);
        let (_, grads) = m.loss_and_grad(&x, &rel, &targets, seed).unwrap();
        let analytic = flatten(&grads);
        let base = m.params();
        let signs = kink_signs(&m, &x, &rel, 1000 + trial);
        for k in 0..base.len() {
            m.set_param(k, base[k] + STEP);
            let up = m.loss(&x, &rel, &targets, seed).unwrap();
            let up_signs = kink_signs(&m, &x, &rel, 1000 + trial);
            m.set_param(k, base[k] - STEP);
            let down = m.loss(&x, &rel, &targets, seed).unwrap();
            let down_signs = kink_signs(&m, &x, &rel, 1000 + trial);
            m.set_param(k, base[k]);
            if up_signs != signs || down_signs != signs {
                kinks += 1;
                continue;
            }
            let numeric = (up - down) / (2.0 * STEP);
            let rel_err = (analytic[k] - numeric).abs() / analytic[k].abs().max(numeric.abs()).max(FLOOR);
            worst = worst.max(rel_err);
            checked += 1;
            assert!(rel_err <= 1e-4, "trial {trial} param {k}: analytic {} numeric {numeric}", analytic[k]);
        }
    }
    println!("checked {checked} parameters, worst relative error {worst:e}, {kinks} skipped at ReLU kinks");
    assert_eq!(kinks, 0);
}

#[test]
fn hand_example_identity_weights() {
    let m = Rgcn {
        layers: vec![LayerParams {
            w_self: Mat::identity(2),
            w_rel: vec![Mat::identity(2)],
        }],
        dropout: 0.5,
        seed: 0,
    };
    let out = m.forward(&Mat::identity(2), &[Adjacency::from_edges(2, [(0, 1)])], None).unwrap();
    assert_eq!(out.row(0), &[1.0, 1.0]);
}

#[test]
fn permutation_equivariance_is_exact() {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    for trial in 0..20 {
        let n = rng.gen_range(3..=12);
        let (x, rel) = random_graph(&mut rng, n, 5);
        let m = Rgcn::new(5, 8, 4, 3, 2, 0.5, trial);
        let out = m.forward(&x, &rel, None).unwrap();
        let mut perm: Vec<usize> = (0..n).collect();
        for i in (1..n).rev() {
            perm.swap(i, rng.gen_range(0..=i));
        }
        let mut px = Mat::zeros(n, 5);
        for i in 0..n {
            px.row_mut(perm[i]).copy_from_slice(x.row(i));
        }
        let prel: Vec<Adjacency> = rel.iter().map(|a| a.permuted(&perm)).collect();
        let pout = m.forward(&px, &prel, None).unwrap();
        for i in 0..n {
            assert_eq!(pout.row(perm[i]), out.row(i), "trial {trial} node {i}");
        }
    }
}

fn params(epochs: usize, seed: u64) -> TrainParams {
    TrainParams {
        layers: 2,
        hidden: 32,
        dropout: 0.5,
        learning_rate: 0.01,
        epochs,
        folds: 5,
        seed,
    }
}

#[test]
fn fixed_seed_is_bitwise_reproducible() {
    let g = planted_partition(3, 20, 6, 1.0, 0.15, 0.02, 5);
    let (m1, r1) = train(&g, &params(40, 9)).unwrap();
    let (m2, r2) = train(&g, &params(40, 9)).unwrap();
    assert_eq!(m1, m2);
    assert_eq!(r1, r2);
    let bits = |v: &[f64]| v.iter().map(|x| x.to_bits()).collect::<Vec<_>>();
    assert_eq!(bits(&r1.losses), bits(&r2.losses));
    let (m3, _) = train(&g, &params(40, 10)).unwrap();
    assert_ne!(m1, m3);
}

#[test]
fn loss_decreases_on_separable_data() {
    let g = planted_partition(2, 30, 4, 1.5, 0.2, 0.02, 1);
    let targets: Vec<(usize, usize)> = g.labels.iter().enumerate().map(|(i, l)| (i, l.unwrap())).collect();
    let (_, losses) = fit(&g, &targets, &params(200, 3), 3, None).unwrap();
    assert!(losses.iter().all(|l| l.is_finite()));
    assert!(losses.last().unwrap() < losses.first().unwrap());
}

#[test]
fn planted_three_class_cross_validation() {
    let g = planted_partition(3, 50, 8, 1.0, 0.1, 0.01, 42);
    let start = std::time::Instant::now();
    let (_, report) = train(&g, &params(500, 42)).unwrap();
    println!(
        "cv accuracy {:.3}, majority {:.3}, folds {:?}, {:?}",
        report.cv_accuracy,
        report.majority_baseline,
        report.fold_accuracies,
        start.elapsed()
    );
    assert!((report.majority_baseline - 1.0 / 3.0).abs() < 1e-12);
    assert!(report.cv_accuracy >= 0.90);
    assert_eq!(report.confusion.iter().flatten().sum::<usize>(), 150);
    assert!(report.fold_accuracies.iter().all(|a| (0.0..=1.0).contains(a)));
}
