use std::hint::black_box;
use std::sync::Arc;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use morphosim_core::benchmarks::builtin_scenario;
use morphosim_core::fem::assembly::{assemble_scalar_operator, ScalarLoads};
use morphosim_core::fem::sparse::solve_sparse;
use morphosim_core::{
    build_rectangle_mesh, solve_nutrient, EquilibriumProblem, GrowthSampler, MatD, MatrixField,
    Mesh, Method, NutrientProblem, Rect, TagRule, Triangulation, VectorField,
};

fn square(n: usize) -> Arc<Mesh> {
    Arc::new(
        build_rectangle_mesh(
            n,
            n,
            Rect::UNIT,
            Triangulation::Crossed,
            &TagRule::all_dirichlet(),
        )
        .unwrap(),
    )
}

fn laplace(c: &mut Criterion) {
    let mut group = c.benchmark_group("laplace");
    for n in [16, 32, 64] {
        let mesh = square(n);
        let coeff = |_: usize, _: usize, _: &[f64; 2]| Ok((MatD::identity(2), 1.0));
        let dirichlet: Vec<(usize, f64)> = mesh
            .nutrient_dirichlet_nodes()
            .iter()
            .map(|&v| (v, 1.0))
            .collect();
        group.bench_with_input(BenchmarkId::new("assemble", n), &n, |b, _| {
            b.iter(|| {
                assemble_scalar_operator(
                    &mesh,
                    &coeff,
                    &ScalarLoads::default(),
                    dirichlet.clone(),
                    None,
                )
                .unwrap()
            })
        });
        let sys = assemble_scalar_operator(
            &mesh,
            &coeff,
            &ScalarLoads::default(),
            dirichlet.clone(),
            None,
        )
        .unwrap();
        group.bench_with_input(BenchmarkId::new("solve", n), &n, |b, _| {
            b.iter(|| solve_sparse(black_box(&sys), 1e-12).unwrap())
        });
    }
    group.finish();
}

fn equilibrium(c: &mut Criterion) {
    let s = builtin_scenario("compatible_growth").unwrap();
    let mut group = c.benchmark_group("equilibrium");
    group.sample_size(10);
    for n in [8, 16] {
        let mesh = square(n);
        let sampler = s.g0_analytic_sampler().unwrap();
        for method in [Method::FixedPoint, Method::Newton] {
            let mut options = s.solver.clone();
            options.method = method;
            let problem = EquilibriumProblem::new(
                mesh.clone(),
                s.energy_model(),
                &sampler,
                &s.dirichlet_at(0.0),
                None,
                options,
            )
            .unwrap();
            group.bench_with_input(BenchmarkId::new(format!("{method:?}"), n), &n, |b, _| {
                b.iter(|| problem.solve(None).unwrap())
            });
        }
    }
    group.finish();
}

fn nutrient(c: &mut Criterion) {
    let s = builtin_scenario("nutrient_cosh").unwrap();
    let mesh = square(32);
    let problem = NutrientProblem {
        mesh: mesh.clone(),
        model: s.nutrient_model(),
        growth: GrowthSampler::Nodal(MatrixField::uniform(mesh.num_vertices(), MatD::identity(2))),
        deformation: VectorField(mesh.vertices().to_vec()),
        dirichlet: s.nutrient_dirichlet_at(0.0),
        flux: s.nutrient_flux_at(0.0),
    };
    c.bench_function("nutrient/32", |b| {
        b.iter(|| solve_nutrient(&problem).unwrap())
    });
}

criterion_group!(benches, laplace, equilibrium, nutrient);
criterion_main!(benches);
