//! Temporary calibration probe; deleted before commit.

use caloric::assemble::Load;
use caloric::barrier::{barrier_heat, barrier_search};
use caloric::coeffs::{regularize_coeffs, CoefficientSet, Form, GammaProfile, MatrixProfile, OperatorSource, ScalarProfile, VectorProfile};
use caloric::dirichlet::solve_dirichlet;
use caloric::domain::{make_domain, Generator};
use caloric::estimates::{pointwise_bound_check, BoundData};
use caloric::geom::Point;
use caloric::grid::Grid;
use caloric::heatball::{heat_ball_bbox, heat_ball_contains};
use caloric::lab::example_1d;
use caloric::mask::{classify, distance_field, rasterize};
use caloric::sampling::qmc_volume;

#[test]
fn probe2() {
    let t0 = std::time::Instant::now();

    // --- criterion 1 at 1e6 samples
    for n in [1usize, 2] {
        let mut scaled = Vec::new();
        for (i, r) in [0.25, 0.5, 1.0, 2.0, 4.0].into_iter().enumerate() {
            let bb = heat_ball_bbox(n, r);
            let box_vol = (2.0 * bb.x_max).powi(n as i32) * (-bb.t_min);
            let (v, _) = qmc_volume(n + 1, 1_000_000, 7 ^ ((n as u64) << 8 | i as u64), box_vol, |u| {
                let mut x = [0.0; 3];
                for (k, xi) in x.iter_mut().enumerate().take(n) {
                    *xi = (2.0 * u[k] - 1.0) * bb.x_max;
                }
                heat_ball_contains(&x[..n], bb.t_min * u[n], r, n)
            });
            scaled.push(v * r.powf(1.0 + 2.0 / n as f64));
        }
        let base = scaled[2];
        let spread = scaled.iter().map(|s| (s / base - 1.0).abs()).fold(0.0f64, f64::max);
        println!("C1 n={n}: scaled {scaled:?} spread {spread:.5}");
    }
    println!("C1 t = {:?}", t0.elapsed());

    // --- criterion 10: barrier on shrinking cubes
    let cubes = make_domain(&Generator::ShrinkingCubes { levels: 4 }).unwrap();
    let h = 1.0 / 64.0;
    let grid = Grid::cover_default(cubes.n, h, &cubes.bbox).unwrap();
    let cl = classify(&rasterize(&cubes, &grid));
    let dist = distance_field(&cl);
    let w = barrier_heat(&cl, &dist).unwrap();
    let heat = CoefficientSet::heat(Form::NonDivergence);
    for k in [2u32, 4] {
        let reg = regularize_coeffs(&heat, &cl, &dist, 1.0, 1.0 / k as f64).unwrap();
        let src = OperatorSource::Regularized(&reg);
        let eps = 0.05 * h * h;
        match barrier_search(&w, &cl, &dist, &src, k, eps, 0.9) {
            Ok((pair, rep)) => println!(
                "C10 k={k}: mu {} lam {:.3} min_lpsi {:.4} psi_min {:.2e} bmax {:.2e} (eps/2 {:.2e})",
                pair.mu, pair.lambda_scale, rep.min_lpsi, rep.psi_min, rep.psi_boundary_max, eps / 2.0
            ),
            Err(e) => println!("C10 k={k}: ERR {e}"),
        }
    }
    println!("C10 t = {:?}", t0.elapsed());

    // --- criterion 9: restricted sup + node-sampled f at two meshes
    for (x_min, ratio) in [(1e-6, 1.1), (1e-7, 1.05)] {
        let rep = example_1d(x_min, ratio).unwrap();
        let mut sup = 0.0f64;
        for j in 0..rep.xs.len() {
            if rep.xs[j] >= 1e-4 && rep.xs[j] <= 1.0 / 3.0 {
                sup = sup.max((rep.u_closed[j] - rep.u_solved[j]).abs());
            }
        }
        let node_f = rep
            .xs
            .iter()
            .map(|&x| caloric::lab::one_d::f(x).abs())
            .fold(0.0f64, f64::max);
        println!(
            "C9 ({x_min},{ratio}): restricted sup {sup:.3e} node_f {node_f:.4} nodes {}",
            rep.xs.len(),
        );
        println!("C9 sup_f {:.4} inner {:.2e}", rep.sup_f, rep.sup_f_inner);
    }
    println!("C9 t = {:?}", t0.elapsed());

    // --- criterion 6b: comparison pairs
    let slab = make_domain(&Generator::HalfSpaceSlab { n: 1, width: 2.0, t_end: 1.0 }).unwrap();
    let sg = Grid::cover_default(1, 1.0 / 16.0, &slab.bbox).unwrap();
    let scl = classify(&rasterize(&slab, &sg));
    let sdist = distance_field(&scl);
    let mut ordered = 0usize;
    let mut clean = 0usize;
    for trial in 0..20u32 {
        let amp = 0.1 + 0.03 * trial as f64;
        let cs = CoefficientSet {
            form: Form::NonDivergence,
            nu: 0.4,
            a: MatrixProfile::Smooth { amp: (amp).min(0.7) },
            b: VectorProfile::Const { v: [1.5 - 0.1 * trial as f64, 0.0, 0.0] },
            c: VectorProfile::Zero,
            c0: ScalarProfile::Const { v: 0.2 },
            gamma: GammaProfile::Sqrt,
        };
        let k = 1.0 + 0.3 * trial as f64;
        let f1 = move |p: &Point| (k * p.x[0] + p.t).sin();
        let bump = move |p: &Point| 0.5 + 0.5 * (k * p.t).cos().abs();
        let f2 = move |p: &Point| f1(p) + bump(p);
        let src = OperatorSource::Plain { coeffs: &cs, dist: &sdist };
        let u1 = solve_dirichlet(&src, &scl, &Load::Scalar(&f1)).unwrap();
        let u2 = solve_dirichlet(&src, &scl, &Load::Scalar(&f2)).unwrap();
        if u1.meta.monotone && u2.meta.monotone {
            clean += 1;
            let scale = u1.sup_norm().max(u2.sup_norm());
            let ok = (0..sg.node_count()).all(|m| {
                !(u1.u[m].is_finite() && u2.u[m].is_finite())
                    || u2.u[m] >= u1.u[m] - 1e-10 * (1.0 + scale)
            });
            if ok {
                ordered += 1;
            }
        }
    }
    println!("C6b comparison: ordered {ordered}/{clean} clean of 20");
    println!("C6b t = {:?}", t0.elapsed());

    // --- criterion 11 with a flux component
    let cyl = make_domain(&Generator::StraightCylinder { n: 1, r: 1.0, t_end: 1.0 }).unwrap();
    let mut ratios = Vec::new();
    for h in [1.0 / 16.0, 1.0 / 32.0, 1.0 / 64.0] {
        let grid = Grid::cover_default(1, h, &cyl.bbox).unwrap();
        let cl = classify(&rasterize(&cyl, &grid));
        let dist = distance_field(&cl);
        let cs = CoefficientSet::heat(Form::Divergence);
        let src = OperatorSource::Plain { coeffs: &cs, dist: &dist };
        let f0 = |p: &Point| 1.0 + 0.5 * (3.0 * p.x[0]).sin() * (2.0 * p.t).cos();
        let f1 = |p: &Point| 0.4 * (2.0 * p.x[0]).cos();
        let df1 = |p: &Point| -0.8 * (2.0 * p.x[0]).sin();
        let f = move |p: &Point| f0(p) + df1(p);
        let sol = solve_dirichlet(&src, &cl, &Load::Scalar(&f)).unwrap();
        let r = pointwise_bound_check(&sol, &BoundData::Divergence { f0: &f0, fi: vec![&f1] }, 2.0).unwrap();
        ratios.push(r.ratio);
    }
    let spread = ratios.iter().cloned().fold(f64::MIN, f64::max)
        / ratios.iter().cloned().fold(f64::MAX, f64::min)
        - 1.0;
    println!("C11b divergence+flux: ratios {ratios:?} spread {spread:.4}");
    println!("total t = {:?}", t0.elapsed());
}
