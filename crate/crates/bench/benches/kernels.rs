use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use mobius_core::action::{self, MobiusElement};
use mobius_core::geodesic::{Chart, KineticGeometry};
use mobius_core::groups;
use mobius_core::metric::{self, SampleSet};
use mobius_core::GroupId;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const GROUPS: [&str; 4] = ["SU(1,1)", "Sp(1,1)", "O0(3,3)", "SU(2,2)"];

fn element(id: &GroupId, rng: &mut ChaCha8Rng) -> MobiusElement {
    MobiusElement::new(*id, groups::random_split_element(id, 1.0, rng).unwrap()).unwrap()
}

fn act(c: &mut Criterion) {
    let mut g = c.benchmark_group("act");
    for name in GROUPS {
        let id: GroupId = name.parse().unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let e = element(&id, &mut rng);
        let u = groups::haar_sample(&id.compact_part(), &mut rng).unwrap();
        g.bench_with_input(BenchmarkId::from_parameter(name), &(e, u), |b, (e, u)| {
            b.iter(|| action::act(e, u).unwrap())
        });
    }
    g.finish();
}

fn gram(c: &mut Criterion) {
    let mut g = c.benchmark_group("gram_1024_samples");
    g.sample_size(20);
    for name in GROUPS {
        let id: GroupId = name.parse().unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let e = element(&id, &mut rng);
        let basis = groups::lie_basis(&id);
        let samples = SampleSet::haar(&id.compact_part(), 1024, 3).unwrap();
        g.bench_function(name, |b| {
            b.iter(|| metric::gram_trivialized(&e, &basis, &samples).unwrap())
        });
    }
    g.finish();
}

fn christoffel(c: &mut Criterion) {
    let mut g = c.benchmark_group("christoffel_contracted_64_samples");
    g.sample_size(10);
    for name in GROUPS {
        let id: GroupId = name.parse().unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let geo = KineticGeometry::new(SampleSet::haar(&id.compact_part(), 64, 5).unwrap());
        let chart = Chart::new(element(&id, &mut rng), 1.0);
        let x = vec![0.01; chart.dim()];
        let v = vec![1.0; chart.dim()];
        g.bench_function(name, |b| {
            b.iter(|| geo.christoffel_contracted(&chart, &x, &v).unwrap())
        });
    }
    g.finish();
}

criterion_group!(kernels, act, gram, christoffel);
criterion_main!(kernels);
