// SPDX-License-Identifier: Apache-2.0

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use dkg_core::dleq;
use dkg_core::group_math::{aux_generator, keccak256, G1Point, Scalar};
use dkg_core::share_channel::{derive_pad, derive_shared_key, encrypt_share, KeyPair};
use dkg_core::vss::{verify_share, Share, SharePolynomial};
use dkg_sim::scenario::{run_scenario, ScenarioConfig};
use rand_chacha::ChaCha20Rng;
use rand_core::SeedableRng;

fn bench_group_ops(c: &mut Criterion) {
    let mut rng = ChaCha20Rng::seed_from_u64(1);
    let g = G1Point::generator();
    let k = Scalar::random(&mut rng);
    let p = g.mul_scalar(&Scalar::random(&mut rng));
    let q = g.mul_scalar(&Scalar::random(&mut rng));

    let mut group = c.benchmark_group("group");
    group.bench_function("point_mul", |b| {
        b.iter(|| black_box(p).mul_scalar(black_box(&k)))
    });
    group.bench_function("point_add", |b| b.iter(|| black_box(p) + black_box(q)));
    group.bench_function("keccak256_challenge_input", |b| {
        let data = vec![0xabu8; 384]; // 12 packed words
        b.iter(|| keccak256(black_box(&data)))
    });
    group.finish();
}

fn bench_dleq(c: &mut Criterion) {
    let mut rng = ChaCha20Rng::seed_from_u64(2);
    let alpha = Scalar::random(&mut rng);
    let x1 = G1Point::generator();
    let x2 = aux_generator();
    let y1 = x1.mul_scalar(&alpha);
    let y2 = x2.mul_scalar(&alpha);
    let proof = dleq::prove(&x1, &y1, &x2, &y2, &alpha, &mut rng).unwrap();

    let mut group = c.benchmark_group("dleq");
    group.bench_function("prove", |b| {
        b.iter(|| dleq::prove(&x1, &y1, &x2, &y2, black_box(&alpha), &mut rng).unwrap())
    });
    group.bench_function("verify", |b| {
        b.iter(|| dleq::verify(&x1, &y1, &x2, &y2, black_box(&proof)))
    });
    group.finish();
}

fn bench_shares(c: &mut Criterion) {
    let mut rng = ChaCha20Rng::seed_from_u64(3);
    let poly = SharePolynomial::generate(2, &mut rng).unwrap();
    let commitments = poly.commit();
    let share_value = poly.evaluate(3);

    let issuer = KeyPair::generate(&mut rng);
    let receiver = KeyPair::generate(&mut rng);
    let key = derive_shared_key(&issuer.secret(), &receiver.public()).unwrap();
    let share = Share {
        issuer: 1,
        receiver: 3,
        value: share_value,
    };

    let mut group = c.benchmark_group("shares");
    group.bench_function("verify_share_t2", |b| {
        b.iter(|| verify_share(black_box(&share_value), &commitments, 3))
    });
    group.bench_function("derive_pad", |b| b.iter(|| derive_pad(black_box(&key), 3)));
    group.bench_function("encrypt_share", |b| {
        b.iter(|| encrypt_share(black_box(&share), &key))
    });
    group.finish();
}

fn bench_scenario(c: &mut Criterion) {
    let config = ScenarioConfig::honest(4, 2, 1);
    c.bench_function("honest_scenario_n4_t2", |b| {
        b.iter(|| run_scenario(black_box(&config)).unwrap())
    });
}

criterion_group!(
    benches,
    bench_group_ops,
    bench_dleq,
    bench_shares,
    bench_scenario
);
criterion_main!(benches);
