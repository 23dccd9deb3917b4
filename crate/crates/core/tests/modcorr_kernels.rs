use opkernel_core::kernels::{default_labels, universal_isometry, Decomposition, OpKernel};
use opkernel_core::modcorr::{gram_element, submodule_from_generators, tensor, Dual, ModVector};
use opkernel_core::numerics::{block_diag, identity, kron, max_abs, CMatrix};
use opkernel_core::random::{index, seeded};
use opkernel_core::samples::{correspondence, element, module, pd_kernel, shape_up_to, shape_with_dim, vectors};
use opkernel_core::Tolerance;
use proptest::prelude::*;

fn rank_of(h: &CMatrix, tol: &Tolerance) -> usize {
    let ev = h.clone().symmetric_eigenvalues();
    let norm = ev.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    ev.iter().filter(|&&x| x > tol.threshold(norm)).count()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(120))]

    #[test]
    fn gram_of_any_family_is_positive(seed in any::<u64>()) {
        let mut rng = seeded(seed);
        let tol = Tolerance::default();
        let shape = shape_up_to(&mut rng, (3, 2));
        let m = module(&mut rng, &shape, 4);
        let count = index(&mut rng, 1, 5);
        let xs = vectors(&mut rng, &m, count);
        let g = gram_element(&xs).unwrap();
        let w = g.is_positive(&tol);
        prop_assert!(w.positive, "min eigenvalue {}", w.min_eigenvalue);
    }

    #[test]
    fn tensor_inner_product_identity(seed in any::<u64>()) {
        let mut rng = seeded(seed);
        let tol = Tolerance::default();
        let a = shape_with_dim(&mut rng, 5);
        let b = shape_with_dim(&mut rng, 5);
        let c = shape_with_dim(&mut rng, 5);
        let e = correspondence(&mut rng, &a, &b, 2).unwrap();
        let f = correspondence(&mut rng, &b, &c, 2).unwrap();
        let (ef, map) = tensor(&e, &f, &tol).unwrap();
        let xs = vectors(&mut rng, e.module(), 2);
        let ys = vectors(&mut rng, f.module(), 2);
        let z0 = map.embed(&xs[0], &ys[0]).unwrap();
        let z1 = map.embed(&xs[1], &ys[1]).unwrap();
        let lhs = z0.inner(&z1).unwrap();
        let rhs = ys[0].inner(&f.apply(&xs[0].inner(&xs[1]).unwrap(), &ys[1]).unwrap()).unwrap();
        prop_assert!(lhs.max_diff(&rhs).unwrap() <= 1e-10 * (1.0 + rhs.norm()));
        // left action on the product acts on the first factor
        let g = element(&mut rng, &a);
        let moved = ef.apply(&g, &z0).unwrap();
        let expect = map.embed(&e.apply(&g, &xs[0]).unwrap(), &ys[0]).unwrap();
        prop_assert!(moved.max_diff(&expect).unwrap() <= 1e-10 * (1.0 + expect.norm()));
    }

    #[test]
    fn decompose_brings_representation_to_standard_form(seed in any::<u64>()) {
        let mut rng = seeded(seed);
        let tol = Tolerance::default();
        let a = shape_with_dim(&mut rng, 9);
        let b = shape_with_dim(&mut rng, 4);
        let e = correspondence(&mut rng, &a, &b, 3).unwrap();
        for rep in e.reps() {
            let d = rep.decompose(&tol).unwrap();
            let w = &d.unitary;
            prop_assert!(max_abs(&(w * w.adjoint() - identity(rep.dim()))) < 1e-10);
            let x = element(&mut rng, &a);
            let got = w * rep.act(&x).unwrap() * w.adjoint();
            let parts: Vec<CMatrix> = x.blocks().iter().zip(&d.multiplicities).map(|(xj, &m)| kron(xj, &identity(m))).collect();
            let expect = block_diag(&parts);
            prop_assert!(max_abs(&(got - expect)) <= 1e-10 * (1.0 + x.norm()));
        }
    }

    #[test]
    fn dual_pairs_to_rank_one_operators(seed in any::<u64>()) {
        let mut rng = seeded(seed);
        let shape = shape_up_to(&mut rng, (3, 2));
        let m = module(&mut rng, &shape, 3);
        let dual = Dual::new(&m).unwrap();
        let xs = vectors(&mut rng, &m, 3);
        let over = dual.module_over_compacts().unwrap();
        for x in &xs {
            for y in &xs {
                let pair = dual.dual_vector(x).unwrap().inner(&dual.dual_vector(y).unwrap()).unwrap();
                let theta = dual.rank_one(x, y).unwrap();
                prop_assert!(pair.max_diff(&theta).unwrap() < 1e-12 * (1.0 + theta.norm()));
                let flipped = dual.rank_one(y, x).unwrap().adjoint();
                prop_assert!(flipped.max_diff(&theta).unwrap() < 1e-12 * (1.0 + theta.norm()));
                // θ_{x,y} z = x ⟨y, z⟩
                let z = &xs[2];
                let got = over.apply(&theta, z).unwrap();
                let expect = x.right_mul(&y.inner(z).unwrap()).unwrap();
                prop_assert!(got.max_diff(&expect).unwrap() < 1e-10 * (1.0 + expect.norm()));
            }
        }
    }

    #[test]
    fn kolmogorov_reconstructs_minimally(seed in any::<u64>()) {
        let mut rng = seeded(seed);
        let tol = Tolerance::default();
        let shape = shape_up_to(&mut rng, (3, 2));
        let n = index(&mut rng, 1, 5);
        let (k, _) = pd_kernel(&mut rng, &shape, n, 4, &tol).unwrap();
        let d = k.kolmogorov(&tol).unwrap();
        // oracle: entrywise inner products
        let mut worst = 0.0f64;
        for s in 0..n {
            for t in 0..n {
                let g = d.point_map[s].inner(&d.point_map[t]).unwrap();
                for b in 0..shape.num_blocks() {
                    worst = worst.max(max_abs(&(g.block(b) - k.entry(s, t).block(b))));
                }
            }
        }
        prop_assert!(worst <= 1e-10 * (1.0 + k.norm()));
        for b in 0..shape.num_blocks() {
            prop_assert_eq!(d.module.ambient()[b], rank_of(&k.gram_block(b), &tol));
        }
    }

    #[test]
    fn universal_isometry_between_independent_decompositions(seed in any::<u64>()) {
        let mut rng = seeded(seed);
        let tol = Tolerance::default();
        let shape = shape_up_to(&mut rng, (3, 2));
        let n = index(&mut rng, 1, 4);
        let (k, xs) = pd_kernel(&mut rng, &shape, n, 4, &tol).unwrap();
        let first = k.kolmogorov(&tol).unwrap();
        let sub = submodule_from_generators(xs[0].module(), &xs, &tol).unwrap();
        let second = Decomposition::new(sub.module.clone(), sub.coordinates.clone(), true).unwrap();
        let v = universal_isometry(&first, &second, &tol).unwrap();
        let back = universal_isometry(&second, &first, &tol).unwrap();
        for s in 0..n {
            let there = v.apply(&first.point_map[s]).unwrap();
            prop_assert!(there.max_diff(&second.point_map[s]).unwrap() <= 1e-9 * (1.0 + k.norm()));
            let home = back.apply(&second.point_map[s]).unwrap();
            prop_assert!(home.max_diff(&first.point_map[s]).unwrap() <= 1e-9 * (1.0 + k.norm()));
        }
        prop_assert!(v.isometry_residual() < 1e-9);
        prop_assert!(v.coisometry_residual() < 1e-9);
        // into the ambient, non-minimal module: still an isometry
        let raw = Decomposition::new(xs[0].module().clone(), xs.clone(), false).unwrap();
        let w = universal_isometry(&first, &raw, &tol).unwrap();
        prop_assert!(w.isometry_residual() < 1e-9);
    }

    #[test]
    fn one_point_square_root(seed in any::<u64>()) {
        let mut rng = seeded(seed);
        let tol = Tolerance::default();
        let shape = shape_up_to(&mut rng, (3, 3));
        let a = element(&mut rng, &shape);
        let b = a.adjoint().mul(&a).unwrap();
        let k = OpKernel::new(default_labels(1), shape.clone(), vec![b.clone()], &tol).unwrap();
        let d = k.kolmogorov(&tol).unwrap();
        for j in 0..shape.num_blocks() {
            prop_assert_eq!(d.module.ambient()[j], rank_of(b.block(j), &tol));
        }
        let x: &ModVector = &d.point_map[0];
        prop_assert!(x.inner(x).unwrap().max_diff(&b).unwrap() <= 1e-10 * (1.0 + b.norm()));
    }
}
