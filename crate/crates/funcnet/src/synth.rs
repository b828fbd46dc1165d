//! Planted-partition graphs with class-informative features.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::graph::{Normalizer, RelGraph};
use crate::matrix::{Adjacency, Mat};

/// `classes × per_class` nodes. Each class has a random feature centroid
/// at distance `separation` scale; features are centroid plus unit Gaussian
/// noise. Relation 0 links same-class pairs with probability `p_in` and
/// cross-class pairs with `p_out`; relation 1 is an independent sparse
/// random graph.
pub fn planted_partition(classes: usize, per_class: usize, features: usize, separation: f64, p_in: f64, p_out: f64, seed: u64) -> RelGraph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = classes * per_class;
    let centroids: Vec<Vec<f64>> = (0..classes)
        .map(|_| (0..features).map(|_| separation * gaussian(&mut rng)).collect())
        .collect();
    let label: Vec<usize> = (0..n).map(|i| i % classes).collect();
    let mut x = Mat::zeros(n, features);
    for i in 0..n {
        for (v, c) in x.row_mut(i).iter_mut().zip(&centroids[label[i]]) {
            *v = c + gaussian(&mut rng);
        }
    }
    Normalizer::fit(&x).apply(&mut x);
    let mut planted = Vec::new();
    let mut noise = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            let p = if label[i] == label[j] { p_in } else { p_out };
            if rng.gen::<f64>() < p {
                planted.push((i, j));
            }
            if rng.gen::<f64>() < p_out {
                noise.push((i, j));
            }
        }
    }
    RelGraph {
        ids: (0..n).map(|i| format!("n{i}")).collect(),
        features: x,
        feature_names: (0..features).map(|k| format!("f{k}")).collect(),
        relations: vec![Adjacency::from_edges(n, planted), Adjacency::from_edges(n, noise)],
        labels: label.into_iter().map(Some).collect(),
        classes: (0..classes).map(|c| format!("class{c}")).collect(),
    }
}

/// Standard normal draw by Box-Muller.
fn gaussian(rng: &mut ChaCha8Rng) -> f64 {
    let u: f64 = 1.0 - rng.gen::<f64>();
    let v: f64 = rng.gen();
    (-2.0 * u.ln()).sqrt() * (std::f64::consts::TAU * v).cos()
}
