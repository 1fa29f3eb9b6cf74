//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Run with `cargo test -p sspec --test acceptance`.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::Rng;
use sspec::cli::{shift_boundary_suite, verify_suite, Algebra, Suite};
use sspec::fredholm::{
    self, AlgebraElement, BlockDiagonalHom, BlockTriangular, ExactSpectrum, Homomorphism,
};
use sspec::shiftlab::{self, CalkinHom, Domain, ShiftOp};
use sspec::sresolvent;
use sspec::{random, spheres, GridSpec, ImaginaryUnit, QMatrix, Quaternion as Q, Sphere};

type Check = Result<String, String>;

fn ensure(ok: bool, msg: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn timed(limit: Duration, f: impl FnOnce() -> Check) -> Check {
    let t = Instant::now();
    let detail = f()?;
    let took = t.elapsed();
    ensure(took < limit, format!("took {took:?}, limit {limit:?}"))?;
    Ok(format!("{detail}; {took:.2?}"))
}

fn example_b() -> QMatrix {
    QMatrix::from_rows(vec![
        vec![Q::ZERO, Q::ZERO, Q::I],
        vec![Q::ZERO, Q::J, Q::ZERO],
        vec![Q::K, Q::ZERO, Q::ZERO],
    ])
    .unwrap()
}

fn c1_example_a() -> Check {
    timed(Duration::from_secs(1), || {
        let s = QMatrix::diag(&[Q::I, Q::J])
            .s_spectrum_exact()
            .map_err(|e| e.to_string())?;
        let d = spheres::hausdorff(&s, &[Sphere::new(0.0, 1.0)]);
        ensure(s.len() == 1 && d <= 1e-9, format!("got {s:?}"))?;
        Ok(format!("σ_S = {{[0,1]}}, distance {d:.1e}"))
    })
}

fn c2_example_b() -> Check {
    timed(Duration::from_secs(5), || {
        let b = example_b();
        let s = b.s_spectrum_exact().map_err(|e| e.to_string())?;
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let expected = [Sphere::new(0.0, 1.0), Sphere::new(h, h), Sphere::new(-h, h)];
        let d = spheres::hausdorff(&s, &expected);
        ensure(s.len() == 3 && d <= 1e-7, format!("got {s:?}"))?;
        // scan oracle: zoomed minima reach every sphere
        let located = b
            .locate_spectrum_by_scan(&GridSpec::new(-1.5, 1.5, 1.5, 0.05).unwrap(), 1e-6)
            .unwrap();
        for e in &expected {
            let hit = located
                .iter()
                .any(|p| p.sigma_min < 1e-6 && Sphere::new(p.u, p.r).distance(*e) <= 0.05);
            ensure(hit, format!("scan found no minimum near {e}"))?;
            for p in e.sample(6) {
                let v = b.char_elem(p).sigma_min();
                ensure(v < 1e-6, format!("σ_min = {v:e} at {p}"))?;
            }
        }
        let mut rng = random::seeded(2);
        let mut worst_off = f64::INFINITY;
        let mut count = 0;
        while count < 100 {
            let cand = Sphere::new(rng.gen_range(-2.0..2.0), rng.gen_range(0.0..2.0));
            if expected.iter().any(|e| e.distance(cand) < 0.05) {
                continue;
            }
            count += 1;
            worst_off = worst_off.min(b.char_elem(cand.representative()).sigma_min());
        }
        ensure(
            worst_off > 1e-3,
            format!("off-spectrum σ_min {worst_off:e}"),
        )?;
        Ok(format!(
            "distance {d:.1e}, min off-spectrum σ_min {worst_off:.2e}"
        ))
    })
}

fn c3_cauchy_series() -> Check {
    let mut rng = random::seeded(3);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let a = random::matrix_with_norm_at_most(&mut rng, 3, 1.0);
        let d = random::quaternion(&mut rng);
        let q = d * (rng.gen_range(2.0..4.0) / d.norm());
        let s = sresolvent::series_inverse_identity(&a, q, 60).map_err(|e| e.to_string())?;
        let c = sresolvent::coefficient_inverse(&a, q, 60).map_err(|e| e.to_string())?;
        worst = worst.max(s).max(c);
    }
    ensure(worst < 1e-9, format!("worst residual {worst:e}"))?;
    Ok(format!("100 matrices, worst residual {worst:.1e}"))
}

fn suite_check(suite: Suite, trials: usize, algebra: Algebra) -> Check {
    let mut worst: f64 = 0.0;
    let mut total = 0;
    for seed in 1..=5 {
        let r = verify_suite(suite, trials, seed, algebra, 3).map_err(|e| e.to_string())?;
        if !r.pass {
            let bad = r.instances.iter().find(|i| !i.pass).unwrap();
            return Err(format!("seed {seed}: {bad:?}"));
        }
        total += r.instances.len();
        worst = r
            .instances
            .iter()
            .filter_map(|i| i.residual)
            .fold(worst, f64::max);
    }
    Ok(format!(
        "{total} instances over seeds 1..5, worst {worst:.1e}"
    ))
}

fn c4_sum_identity() -> Check {
    suite_check(Suite::IdentityE1, 1000, Algebra::Both)
}

fn c5_union_law() -> Check {
    let mut rng = random::seeded(5);
    for _ in 0..50 {
        let (a, b) = fredholm::annihilating_pair(&mut rng, 3);
        let r =
            fredholm::theorem_sum_spectra(&BlockDiagonalHom, &a, &b).map_err(|e| e.to_string())?;
        ensure(r.weyl.is_some(), "Weyl variant missing")?;
        ensure(r.pass(), format!("{r:?}"))?;
    }
    suite_check(Suite::Sum, 50, Algebra::Block)
}

fn c6_inverse_map() -> Check {
    suite_check(Suite::Inverse, 50, Algebra::Matrix)
}

fn c7_product() -> Check {
    suite_check(Suite::Product, 50, Algebra::Matrix)
}

fn c8_shift_norm_index() -> Check {
    let r = ShiftOp::named("R").unwrap();
    let rt = ShiftOp::named("RT").unwrap();
    let su = ShiftOp::named("Su").unwrap();
    let norm = shiftlab::op_norm_estimate(&r, 20).unwrap().value;
    ensure((norm - 1.0).abs() <= 1e-9, format!("‖R‖ ≈ {norm}"))?;
    let ir = shiftlab::index(&r).map_err(|e| e.to_string())?;
    ensure(
        (ir.index, ir.dim_ker, ir.dim_coker) == (0, 1, 1),
        format!("R: {ir:?}"),
    )?;
    let irt = shiftlab::index(&rt).map_err(|e| e.to_string())?;
    ensure(
        (irt.index, irt.dim_ker, irt.dim_coker) == (0, 0, 0),
        format!("R+T: {irt:?}"),
    )?;
    let i1 = shiftlab::index(&su).map_err(|e| e.to_string())?.index;
    let i2 = shiftlab::index(&su.powi(2))
        .map_err(|e| e.to_string())?
        .index;
    ensure(i1 == -1 && i2 == -2, format!("S_u: {i1}, S_u²: {i2}"))?;
    Ok(format!(
        "‖R‖ = {norm:.12}, ind R = 0 (1,1), ind(R+T) = 0 (0,0), ind S_u = -1, ind S_u² = -2"
    ))
}

fn c9_separation() -> Check {
    let r0 = ShiftOp::named("R").unwrap().char_elem(Q::ZERO);
    let s0 = ShiftOp::named("Su").unwrap().char_elem(Q::ZERO);
    ensure(
        fredholm::is_weyl_element(&CalkinHom, &r0).unwrap(),
        "0 ∈ Weyl spectrum of R",
    )?;
    ensure(
        fredholm::is_fredholm_element(&CalkinHom, &s0),
        "0 ∈ Fredholm spectrum of S_u",
    )?;
    ensure(
        !fredholm::is_weyl_element(&CalkinHom, &s0).unwrap(),
        "0 ∉ Weyl spectrum of S_u",
    )?;
    let i = shiftlab::index(&s0).map_err(|e| e.to_string())?.index;
    Ok(format!("R_0(R) Weyl; R_0(S_u) Fredholm with index {i}"))
}

fn c10_boundary() -> Check {
    let r = shift_boundary_suite(Q::real(0.5), 10, 10).map_err(|e| e.to_string())?;
    ensure(r.pass, format!("{r:?}"))?;
    let last = r.instances[9].residual.unwrap();
    Ok(format!(
        "n = 1..10 within bound, decreasing, ‖R_10 − R²‖ = {last:.2e}"
    ))
}

fn axioms<E: AlgebraElement>(a: &E, b: &E, c: &E, p: Q, q: Q) -> Result<(), String> {
    let s = (1.0 + a.norm() + b.norm() + c.norm() + p.norm() + q.norm()).powi(3);
    let close = |x: &E, y: &E, what: &str| {
        let d = x.minus(y).norm();
        ensure(d <= 1e-12 * s, format!("{what}: {d:e}"))
    };
    close(&a.times(b).times(c), &a.times(&b.times(c)), "associativity")?;
    close(
        &a.times(&b.plus(c)),
        &a.times(b).plus(&a.times(c)),
        "left distributivity",
    )?;
    close(
        &b.plus(c).times(a),
        &b.times(a).plus(&c.times(a)),
        "right distributivity",
    )?;
    close(&a.lscale(p).times(b), &a.times(b).lscale(p), "left scalars")?;
    close(
        &a.times(&b.rscale(q)),
        &a.times(b).rscale(q),
        "right scalars",
    )?;
    close(&a.lscale(p).rscale(q), &a.rscale(q).lscale(p), "bimodule")?;
    close(&a.times(&a.unit()), a, "unit")?;
    ensure(
        a.times(b).norm() <= a.norm() * b.norm() * (1.0 + 1e-9) + 1e-12,
        "submultiplicativity",
    )
}

fn random_shift(rng: &mut impl Rng) -> ShiftOp {
    let mut op = ShiftOp::shift(
        Domain::Bilateral,
        random::quaternion(rng),
        rng.gen_range(-2..=2),
    );
    op = op.plus_term(rng.gen_range(-2..=2), random::quaternion(rng));
    &op + &ShiftOp::rank_one(
        Domain::Bilateral,
        rng.gen_range(-2..=2),
        rng.gen_range(-2..=2),
        random::quaternion(rng),
    )
    .unwrap()
}

fn property_suites(seed: u64) -> Result<(), String> {
    let mut rng = random::seeded(seed);
    let p = random::quaternion(&mut rng);
    let q = random::quaternion(&mut rng);

    // algebra axioms in all three algebras
    let m: Vec<QMatrix> = (0..3).map(|_| random::matrix(&mut rng, 3, 1.0)).collect();
    axioms(&m[0], &m[1], &m[2], p, q)?;
    let b: Vec<BlockTriangular> = (0..3)
        .map(|_| BlockTriangular::random(&mut rng, 2))
        .collect();
    axioms(&b[0], &b[1], &b[2], p, q)?;
    let s: Vec<ShiftOp> = (0..3).map(|_| random_shift(&mut rng)).collect();
    let sa = &s[0].compose(&s[1]).compose(&s[2]) - &s[0].compose(&s[1].compose(&s[2]));
    ensure(
        sa.terms()
            .values()
            .chain(sa.fin().values())
            .all(|x| x.norm() < 1e-12),
        "shift associativity",
    )?;
    let h = BlockDiagonalHom;
    let hab = h.apply(&b[0].times(&b[1]));
    ensure(
        hab.minus(&h.apply(&b[0]).times(&h.apply(&b[1]))).norm() < 1e-12,
        "homomorphism",
    )?;

    // sandwich σ^Φ ⊆ σ^{Φ⁰} ⊆ σ_S and axial symmetry
    for v in &b {
        let f = fredholm::fredholm_s_spectrum(&h, v)
            .map_err(|e| e.to_string())?
            .spheres;
        let w = fredholm::weyl_s_spectrum(&h, v)
            .map_err(|e| e.to_string())?
            .spheres;
        let full = v.s_spectrum().map_err(|e| e.to_string())?;
        ensure(
            spheres::is_subset(&f, &w, 1e-7) && spheres::is_subset(&w, &full, 1e-7),
            "block sandwich",
        )?;
        let dense = v.to_matrix();
        let tol = 1e-6 * dense.op_norm().max(1.0).powi(2);
        for sp in &full {
            for member in sp.sample(8) {
                let sm = dense.char_elem(member).sigma_min();
                ensure(
                    sm <= tol,
                    format!("axial symmetry: σ_min {sm:e} at {member}"),
                )?;
            }
        }
    }
    for op in [ShiftOp::named("Su").unwrap(), ShiftOp::named("R").unwrap()] {
        let grid = GridSpec::new(-1.5, 1.5, 1.5, 0.25).unwrap();
        let sp = shiftlab::shift_spectrum(&op, &grid, 10).map_err(|e| e.to_string())?;
        ensure(
            spheres::is_subset(&sp.fredholm_spheres(), &sp.weyl_spheres(), 0.0),
            "shift sandwich",
        )?;
        // σ_S of R and S_u is the closed unit ball
        for pt in sp.points.iter().filter(|pt| pt.in_weyl) {
            ensure(
                pt.u * pt.u + pt.r * pt.r <= 1.0 + 1e-12,
                "Weyl point outside σ_S",
            )?;
        }
    }
    let a = random::matrix(&mut rng, 3, 1.0);
    for sp in a.s_spectrum_exact().map_err(|e| e.to_string())? {
        let vals: Vec<f64> = sp
            .sample(10)
            .into_iter()
            .map(|x| a.char_elem(x).sigma_min())
            .collect();
        ensure(
            vals.iter()
                .all(|&x| x < 1e-6 * a.op_norm().max(1.0).powi(2)),
            "matrix axial symmetry",
        )?;
    }

    // O(h²) slice regularity at 10 random points
    for _ in 0..10 {
        let a = random::matrix_with_norm_at_most(&mut rng, 3, 1.0);
        let axis = ImaginaryUnit::new(random::quaternion(&mut rng)).map_err(|e| e.to_string())?;
        let (q0, q1) = (rng.gen_range(-3.0..3.0), rng.gen_range(2.0..3.0));
        let r1 = sresolvent::slice_regularity_residual(&a, q0, q1, axis, 1e-2)
            .map_err(|e| e.to_string())?;
        let r2 = sresolvent::slice_regularity_residual(&a, q0, q1, axis, 1e-3)
            .map_err(|e| e.to_string())?;
        ensure(
            r2 < 1e-6 && r2 <= r1 / 30.0 + 1e-10,
            format!("slice regularity {r1:e} → {r2:e}"),
        )?;
    }

    // approximate null sequences at spectral points
    let a = random::matrix(&mut rng, 3, 1.0);
    let sp = a.s_spectrum_exact().map_err(|e| e.to_string())?;
    let q = sp[0].representative();
    let qs: Vec<Q> = (1..=8)
        .map(|n| q + Q::new(0.5f64.powi(n), 0.0, 0.0, 0.0))
        .collect();
    let steps = fredholm::approx_null_sequence(&a, q, &qs).map_err(|e| e.to_string())?;
    let decreasing = steps.windows(2).all(|w| w[1].shifted < w[0].shifted);
    let bounded = steps.iter().all(|st| st.left <= st.bound * (1.0 + 1e-9));
    let decayed = steps[7].left < 0.02 * steps[0].left;
    ensure(
        decreasing && bounded && decayed,
        format!("null sequence {steps:?}"),
    )?;

    // index constancy along Fredholm paths
    let ops = [
        ShiftOp::named("Su").unwrap(),
        ShiftOp::named("Su").unwrap().powi(2),
        ShiftOp::named("R").unwrap(),
    ];
    for k in 0..10 {
        let op = &ops[k % 3];
        let d = random::quaternion(&mut rng);
        let dir = d / d.norm();
        let (r0, r1) = if rng.gen_bool(0.5) {
            (rng.gen_range(0.05..0.8), rng.gen_range(0.05..0.8))
        } else {
            (rng.gen_range(1.25..2.5), rng.gen_range(1.25..2.5))
        };
        let path: Vec<Q> = (0..=40)
            .map(|t| dir * (r0 + (r1 - r0) * t as f64 / 40.0))
            .collect();
        let rep = shiftlab::index_constancy_probe(op, &path).map_err(|e| e.to_string())?;
        ensure(rep.constant, format!("index changes along {path:?}"))?;
        let ends = [path[0], path[40]];
        for e in ends {
            let w = shiftlab::index(&op.char_elem(e))
                .map_err(|x| x.to_string())?
                .index;
            ensure(
                w == rep.points[0].index,
                "windowed and symbol index disagree",
            )?;
        }
    }
    Ok(())
}

fn c11_properties() -> Check {
    timed(Duration::from_secs(120), || {
        for seed in 1..=5 {
            property_suites(seed).map_err(|e| format!("seed {seed}: {e}"))?;
        }
        Ok("axioms, sandwich, axial symmetry, slice regularity, null sequences, index constancy; seeds 1..5".into())
    })
}

type Criterion = (&'static str, fn() -> Check);

fn main() -> ExitCode {
    let criteria: [Criterion; 11] = [
        ("Example A reproduction", c1_example_a),
        ("Example B reproduction", c2_example_b),
        ("Cauchy-series identity", c3_cauchy_series),
        ("Characteristic-element sum identity", c4_sum_identity),
        ("Union law for annihilating sums", c5_union_law),
        ("Inverse spectral map", c6_inverse_map),
        ("Product spectra off imaginary axis", c7_product),
        ("Shift norm and index", c8_shift_norm_index),
        ("Weyl/Fredholm separation", c9_separation),
        ("Boundary witness for R", c10_boundary),
        ("Property suites", c11_properties),
    ];
    let start = Instant::now();
    let mut failed = 0;
    for (k, (name, f)) in criteria.iter().enumerate() {
        let res = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|_| Err("panicked".into()));
        match res {
            Ok(detail) => println!("PASS {:>2} {name}: {detail}", k + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {why}", k + 1);
            }
        }
    }
    println!(
        "acceptance: {} passed, {failed} failed in {:.1?}",
        criteria.len() - failed,
        start.elapsed()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
