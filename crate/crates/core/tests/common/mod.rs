#![allow(dead_code)]

use chain_strength::{seed, IsingModel};
use rand::seq::IndexedRandom;
use rand::Rng as _;

/// Dense 10-spin model with dyadic coefficients, `max|J| = 1` and `|h| ≤ 1/2`.
pub fn benchmark_model() -> IsingModel {
    let mut rng = seed::rng(2024);
    let mut m = IsingModel::new(10);
    for i in 0..10 {
        m.set_linear(i, (rng.random_range(-2i32..=2) as f64) * 0.25)
            .unwrap();
        for j in i + 1..10 {
            m.set_quadratic(i, j, *[-1.0, -0.5, 0.5, 1.0].choose(&mut rng).unwrap())
                .unwrap();
        }
    }
    m
}
