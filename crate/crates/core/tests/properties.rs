use std::sync::Arc;

use morphosim_core::fem::fields::MatrixField;
use morphosim_core::integrator::ode_step_rk4;
use morphosim_core::mesh::{ElasticTag, NutrientTag};
use morphosim_core::models::growth::{GrowthLaw, ProductGrowth};
use morphosim_core::tensor::dist_so_squared;
use morphosim_core::{
    build_rectangle_mesh, parse_scenario, read_mesh, solve_nutrient, write_mesh, DetRatioNutrient,
    DistanceVolumetricEnergy, EnergyModel, GrowthSampler, MatD, NutrientProblem, Rect, TagRule,
    Triangulation, VectorField,
};
use proptest::prelude::*;

fn mat2() -> impl Strategy<Value = MatD> {
    prop::array::uniform4(-0.3f64..0.3).prop_map(|e| MatD::identity(2) + MatD::from_row_slice(&e))
}

fn triangulation() -> impl Strategy<Value = Triangulation> {
    prop_oneof![Just(Triangulation::Crossed), Just(Triangulation::Diagonal)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn rk4_is_nodewise(gs in prop::collection::vec(mat2(), 2..12), ys in prop::collection::vec(mat2(), 12), shift in 0usize..12) {
        let n = gs.len();
        let y = &ys[..n];
        let law = ProductGrowth;
        let step = |g: &MatrixField, y: &[MatD]| {
            ode_step_rk4(g, 0.0, 0.05, None, &|i, _, gi| law.evaluate(gi, &y[i], 0.0, &[0.0, 0.0])).unwrap()
        };
        let direct = step(&MatrixField(gs.clone()), y);
        let perm: Vec<usize> = (0..n).map(|i| (i + shift) % n).collect();
        let permuted = step(
            &MatrixField(perm.iter().map(|&p| gs[p]).collect()),
            &perm.iter().map(|&p| y[p]).collect::<Vec<_>>(),
        );
        for (k, &p) in perm.iter().enumerate() {
            prop_assert_eq!(permuted.0[k], direct.0[p]);
        }
    }

    #[test]
    fn energy_is_nonnegative_and_rotation_invariant(f in mat2(), angle in -3.1f64..3.1) {
        let w = DistanceVolumetricEnergy::new(2);
        let e = w.energy(&[0.5, 0.5], &f).unwrap();
        prop_assert!(e >= -1e-14);
        let q = MatD::rotation2(angle);
        let eq = w.energy(&[0.5, 0.5], &(q * f)).unwrap();
        prop_assert!((e - eq).abs() <= 1e-10 * (1.0 + e));
        prop_assert!((dist_so_squared(&(q * f)).unwrap() - dist_so_squared(&f).unwrap()).abs() <= 1e-12);
    }

    #[test]
    fn mesh_round_trip(nx in 1usize..7, ny in 1usize..7, mode in triangulation(), left in any::<bool>(), top in any::<bool>()) {
        let mut rule = TagRule::all_dirichlet();
        if left {
            rule = TagRule::left_clamped();
        }
        if top {
            rule.nutrient[3] = NutrientTag::Neumann;
        }
        let rect = Rect { x0: -0.5, x1: 1.25, y0: 0.1, y1: 0.7 };
        let mesh = build_rectangle_mesh(nx, ny, rect, mode, &rule).unwrap();
        prop_assert!((mesh.total_area() - 1.75 * 0.6).abs() < 1e-12);
        let mut buf = Vec::new();
        write_mesh(&mesh, &mut buf).unwrap();
        let back = read_mesh(&buf[..]).unwrap();
        prop_assert_eq!(back.vertices(), mesh.vertices());
        prop_assert_eq!(back.cells(), mesh.cells());
        prop_assert_eq!(back.facets().len(), mesh.facets().len());
        prop_assert!(back.facets().iter().any(|f| f.elastic == ElasticTag::Dirichlet));
    }

    #[test]
    fn nutrient_is_linear_in_boundary_data(a in 0.1f64..3.0, b in 0.0f64..2.0, beta in 0.0f64..4.0) {
        let mesh = Arc::new(build_rectangle_mesh(4, 4, Rect::UNIT, Triangulation::Crossed, &TagRule::all_dirichlet()).unwrap());
        let solve = |scale: f64| {
            solve_nutrient(&NutrientProblem {
                mesh: mesh.clone(),
                model: Arc::new(DetRatioNutrient::constant(MatD::identity(2), beta, 0.1)),
                growth: GrowthSampler::Nodal(MatrixField::uniform(mesh.num_vertices(), MatD::identity(2))),
                deformation: VectorField(mesh.vertices().to_vec()),
                dirichlet: Arc::new(move |x| scale * (1.0 + b * x[0] * x[1])),
                flux: Arc::new(|_| 0.0),
            })
            .unwrap()
        };
        let one = solve(1.0);
        let scaled = solve(a);
        for (u, v) in one.values.0.iter().zip(&scaled.values.0) {
            prop_assert!((a * u - v).abs() <= 1e-12 * (1.0 + v.abs()));
        }
        prop_assert!(one.min_value >= 0.0);
    }

    #[test]
    fn scenario_numbers_parse_back(nx in 1usize..40, dt in 1e-4f64..0.5, det_min in 0.01f64..0.5, nu in 0.01f64..0.3) {
        let text = format!("[mesh]\nnx = {nx}\n[time]\ndt = {dt:e}\n[guards]\ndet_min = {det_min}\n[nutrient]\nnu = {nu}\n");
        let s = parse_scenario(&text, "p").unwrap();
        prop_assert_eq!(s.time.dt, dt);
        prop_assert_eq!(s.guards.det_min, det_min);
        prop_assert_eq!(s.nutrient.nu, nu);
        prop_assert_eq!(s.build_mesh().unwrap().num_cells(), 4 * nx * nx);
    }
}
