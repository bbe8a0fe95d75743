//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;
use std::panic::{self, AssertUnwindSafe};
use std::path::PathBuf;
use std::process::Command;
use std::time::{Duration, Instant};
use steklov_core::boxspec::{BoxCylinder, SpectralFamily};
use steklov_core::cli::table::Table;
use steklov_core::counting::{
    count_lattice, counting_function, ellipsoid_volume_bound, mu_from_lambda, mu_from_mu_star,
    LatticeQuery,
};
use steklov_core::fd::{BoundaryPartition, Grid2D, SteklovProblem, SteklovSpectrum};
use steklov_core::profile::{h_inverse, t_profile, BoundaryProfile, ProfileKind};

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

// 1. Profile kernel

/// Largest `|Y'''' - 2 eta^2 Y'' + eta^4 Y|` over interior points, relative to
/// the largest sum of the magnitudes of the three terms.
fn ode_residual(eta: f64, l: f64) -> f64 {
    let p = BoundaryProfile::new(eta, l, ProfileKind::Y).unwrap();
    let y = |x: f64| p.eval(x).unwrap();
    let h = l.min(1.0 / eta) / 40.0;
    let (mut worst, mut scale) = (0.0f64, 0.0f64);
    for i in 0..=20 {
        let x = 0.1 * l + 0.8 * l * i as f64 / 20.0;
        let f = |k: f64| y(x + k * h);
        let d2 = (-f(2.0) + 16.0 * f(1.0) - 30.0 * f(0.0) + 16.0 * f(-1.0) - f(-2.0)) / (12.0 * h * h);
        let d4 = (-f(3.0) + 12.0 * f(2.0) - 39.0 * f(1.0) + 56.0 * f(0.0) - 39.0 * f(-1.0)
            + 12.0 * f(-2.0)
            - f(-3.0))
            / (6.0 * h.powi(4));
        let terms = [d4, -2.0 * eta * eta * d2, eta.powi(4) * f(0.0)];
        worst = worst.max(terms.iter().sum::<f64>().abs());
        scale = scale.max(terms.iter().map(|t| t.abs()).sum());
    }
    worst / scale
}

fn criterion_1() -> Outcome {
    let samples: Vec<f64> = (0..10_000)
        .map(|i| t_profile(1.0 + 199.0 * i as f64 / 9_999.0).unwrap())
        .collect();
    ensure(samples.windows(2).all(|w| w[0] < w[1]), || {
        "t is not strictly increasing on the sample grid".into()
    })?;
    let mut worst_asym = 0.0f64;
    for s in [20.0, 30.0, 50.0, 100.0] {
        worst_asym = worst_asym.max((t_profile(s).unwrap() / (2.0 * s) - 1.0).abs());
    }
    ensure(worst_asym <= 1e-12, || format!("|t(s)/2s - 1| = {worst_asym:e}"))?;
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst_rt = 0.0f64;
    for _ in 0..100 {
        let s: f64 = rng.gen_range(1.0..100.0);
        worst_rt = worst_rt.max((h_inverse(t_profile(s).unwrap()).unwrap() - s).abs() / s);
    }
    ensure(worst_rt <= 1e-9, || format!("h(t(s)) round trip error {worst_rt:e}"))?;
    let mut worst_ode = 0.0f64;
    for (eta, l) in [(2.0, 1.5), (0.7, 1.0), (5.0, 2.0), (1.0, 0.4)] {
        let p = BoundaryProfile::new(eta, l, ProfileKind::Y).unwrap();
        ensure(p.eval(0.0).unwrap() == 0.0 && p.eval(l).unwrap() == 0.0, || {
            format!("Y endpoints not exact for eta {eta}, l {l}")
        })?;
        worst_ode = worst_ode.max(ode_residual(eta, l));
    }
    ensure(worst_ode <= 1e-5, || format!("scaled ODE residual {worst_ode:e}"))?;
    Ok(format!(
        "asymptote {worst_asym:.1e}, round trip {worst_rt:.1e}, ODE residual {worst_ode:.1e}"
    ))
}

// 2. Y''(0) = -t(eta l)/l

fn criterion_2() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let l: f64 = rng.gen_range(0.2..5.0);
        let b = (rng.gen_range(0.5f64.ln()..300.0f64.ln())).exp();
        let eta = b / l;
        let p = BoundaryProfile::new(eta, l, ProfileKind::Y).unwrap();
        let want = -t_profile(eta * l).unwrap() / l;
        let rel = (p.second_derivative_at_zero() - want).abs() / want.abs();
        worst = worst.max(rel);
    }
    ensure(worst <= 1e-12, || format!("largest relative mismatch {worst:e}"))?;
    Ok(format!("largest relative mismatch {worst:.1e}"))
}

// 3. Lattice counts against brute force

fn naive_count(sides: &[f64], radius: f64, family: SpectralFamily) -> u64 {
    let lo = match family {
        SpectralFamily::DirichletLateral => 1u32,
        SpectralFamily::NeumannLateral => 0,
    };
    let upper: Vec<u32> = sides.iter().map(|l| (l * radius).floor() as u32).collect();
    let r2 = radius * radius;
    let range = |i: usize| lo..=upper.get(i).copied().unwrap_or(0);
    let mut count = 0;
    for a in range(0) {
        for b in if sides.len() > 1 { range(1) } else { 0..=0 } {
            for c in if sides.len() > 2 { range(2) } else { 0..=0 } {
                let m = [a, b, c];
                let m = &m[..sides.len()];
                let q = m
                    .iter()
                    .zip(sides)
                    .fold(0.0, |acc, (&mi, &li)| acc + (mi as f64 / li) * (mi as f64 / li));
                if q <= r2 && m.iter().any(|&x| x > 0) {
                    count += 1;
                }
            }
        }
    }
    count
}

fn criterion_3() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for case in 0..200 {
        let d = rng.gen_range(1..=3);
        let sides: Vec<f64> = (0..d)
            .map(|_| rng.gen_range(1..=6) as f64 / rng.gen_range(1..=4) as f64)
            .collect();
        let mut radius: f64 = rng.gen_range(0.0..10.0);
        if case % 2 == 0 {
            radius = (radius * sides[0]).round() / sides[0];
        }
        let family = if rng.gen_bool(0.5) {
            SpectralFamily::DirichletLateral
        } else {
            SpectralFamily::NeumannLateral
        };
        let q = LatticeQuery {
            sides: sides.clone(),
            radius,
            family,
        };
        let got = count_lattice(&q).unwrap();
        let want = naive_count(&sides, radius, family);
        ensure(got == want, || {
            format!("sides {sides:?}, R {radius}, {family}: {got} vs {want}")
        })?;
    }
    Ok("200 random queries agree".into())
}

// 4. Sandwich bound

fn criterion_4() -> Outcome {
    let mut violations = Vec::new();
    let mut checked = 0;
    for d in 1..=3usize {
        let bx = BoxCylinder::new(vec![1.0; d], 1.0, 1.0).unwrap();
        for i in 0..50 {
            let r = 100f64.powf(i as f64 / 49.0);
            let (v, upper) = ellipsoid_volume_bound(&bx, r).unwrap();
            let q = LatticeQuery {
                sides: vec![1.0; d],
                radius: r,
                family: SpectralFamily::NeumannLateral,
            };
            let af1 = count_lattice(&q).unwrap() as f64 + 1.0;
            checked += 1;
            if !(v <= af1 && af1 <= upper) {
                violations.push(format!("d={d} R={r:.3}: V={v:.3} A^f+1={af1} bound={upper:.3}"));
            }
        }
    }
    ensure(violations.is_empty(), || {
        format!(
            "{} of {checked} radii violate the bound, first: {}",
            violations.len(),
            violations[0]
        )
    })?;
    Ok(format!("{checked} radii within the bound"))
}

// 5. Weyl constant on the 1x1x2 box

fn criterion_5() -> Outcome {
    let bx = BoxCylinder::new(vec![1.0, 1.0], 2.0, 1.0).unwrap();
    let weyl = |tau: f64| tau * tau / (16.0 * PI);
    let ratio = |fam, tau| counting_function(&bx, fam, tau).unwrap() as f64 / weyl(tau);
    let rf500 = ratio(SpectralFamily::NeumannLateral, 500.0);
    let rf200 = ratio(SpectralFamily::NeumannLateral, 200.0);
    let r0500 = ratio(SpectralFamily::DirichletLateral, 500.0);
    let detail = format!(
        "ratio_f(500) = {rf500:.5}, ratio_f(200) = {rf200:.5}, ratio_0(500) = {r0500:.5}, gap {:.4}",
        (rf500 - r0500).abs()
    );
    ensure((rf500 - 1.0).abs() <= 0.05, || detail.clone())?;
    ensure((rf200 - 1.0).abs() <= 0.10, || detail.clone())?;
    ensure((rf500 - r0500).abs() <= 0.02, || {
        format!("family gap exceeds 0.02: {detail}")
    })?;
    Ok(detail)
}

// 6. Bracket

fn criterion_6() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for _ in 0..1000 {
        let d = rng.gen_range(1..=3usize);
        let sides: Vec<f64> = (0..d).map(|_| rng.gen_range(0.5..2.0)).collect();
        let bx = BoxCylinder::new(sides, rng.gen_range(0.3..3.0), rng.gen_range(0.5..2.0)).unwrap();
        let tau = rng.gen_range(1.0..[0.0, 800.0, 200.0, 50.0][d]);
        let a0 = counting_function(&bx, SpectralFamily::DirichletLateral, tau).unwrap();
        let af = counting_function(&bx, SpectralFamily::NeumannLateral, tau).unwrap();
        ensure(a0 <= af, || format!("{bx:?} tau {tau}: A0 {a0} > Af {af}"))?;
    }
    Ok("1000 random cases bracketed".into())
}

// 7. FD solver against closed form

fn mixed_spectrum(n: usize, k: usize) -> SteklovSpectrum {
    let grid = Grid2D::with_short_side_cells(1.0, 2.0, n).unwrap();
    let part: BoundaryPartition = "bottom=steklov:1,top=hardnu,left=softfree,right=softfree"
        .parse()
        .unwrap();
    SteklovProblem::new(grid, part).unwrap().spectrum(k).unwrap()
}

fn criterion_7() -> Outcome {
    let exact: Vec<f64> = (1..=5).map(|k| t_profile(k as f64 * PI * 2.0).unwrap() / 2.0).collect();
    let specs: Vec<SteklovSpectrum> = [32, 64, 128].iter().map(|&n| mixed_spectrum(n, 5)).collect();
    let errors: Vec<Vec<f64>> = specs
        .iter()
        .map(|s| {
            s.eigenvalues
                .iter()
                .zip(&exact)
                .map(|(a, e)| (a - e).abs() / e)
                .collect()
        })
        .collect();
    let orders: Vec<f64> = (0..5)
        .map(|k| {
            let fine = (errors[0][k] / errors[1][k]).log2();
            let finer = (errors[1][k] / errors[2][k]).log2();
            fine.min(finer)
        })
        .collect();
    let min_order = orders.iter().cloned().fold(f64::INFINITY, f64::min);
    let worst_rayleigh = specs
        .iter()
        .flat_map(|s| s.rayleigh_residuals.iter().copied())
        .fold(0.0, f64::max);
    let worst_orth = specs.iter().map(|s| s.orthogonality_defect).fold(0.0, f64::max);
    let e64: Vec<String> = errors[1].iter().map(|e| format!("{:.2}%", 100.0 * e)).collect();
    let detail = format!(
        "N=64 errors [{}], order {min_order:.2}, Rayleigh {worst_rayleigh:.1e}, orthogonality {worst_orth:.1e}",
        e64.join(", ")
    );
    ensure(errors[1].iter().all(|&e| e <= 0.02), || {
        format!("N=64 error above 2%: {detail}")
    })?;
    ensure(min_order >= 1.5, || format!("order below 1.5: {detail}"))?;
    ensure(worst_rayleigh <= 1e-8, || detail.clone())?;
    ensure(worst_orth <= 1e-8, || detail.clone())?;
    Ok(detail)
}

// 8. All-Steklov unit square

fn criterion_8() -> Outcome {
    let grid = Grid2D::new(1.0, 1.0, 96, 96).unwrap();
    let part = BoundaryPartition::all_steklov(1.0).unwrap();
    let spec = SteklovProblem::new(grid, part).unwrap().spectrum(20).unwrap();
    let swapped = SteklovProblem::new(grid.transposed(), part.transposed())
        .unwrap()
        .spectrum(20)
        .unwrap();
    ensure(spec.eigenvalues.iter().all(|&l| l > 0.0), || "non-positive eigenvalue".into())?;
    ensure(spec.eigenvalues == swapped.eigenvalues, || {
        "spectrum changes under x <-> y".into()
    })?;
    let ratio = |k: usize| spec.eigenvalues[k - 1] / (PI * k as f64 / 2.0);
    let band: Vec<f64> = (10..=20).map(ratio).collect();
    let (lo, hi) = band
        .iter()
        .fold((f64::INFINITY, 0.0f64), |(a, b), &r| (a.min(r), b.max(r)));
    ensure(lo >= 0.7 && hi <= 1.3, || format!("ratios in [{lo:.3}, {hi:.3}]"))?;
    let decile = |d: usize| ((2 * d - 1)..=(2 * d)).map(|k| (ratio(k) - 1.0).abs()).sum::<f64>() / 2.0;
    let (d1, d2) = (decile(1), decile(2));
    ensure(d2 < d1, || format!("mean |ratio - 1| grows: decile 1 {d1:.3}, decile 2 {d2:.3}"))?;
    Ok(format!(
        "ratios for k in 10..=20 within [{lo:.3}, {hi:.3}], decile means {d1:.3} -> {d2:.3}"
    ))
}

// 9. mu conversions

fn criterion_9() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut lambdas: Vec<f64> = (0..100).map(|_| rng.gen_range(-3.0f64..6.0).exp()).collect();
    lambdas.sort_by(f64::total_cmp);
    let mut prev: Option<f64> = None;
    for &l in &lambdas {
        let a = mu_from_lambda(l).unwrap();
        let b = mu_from_mu_star(1.0 / l).unwrap();
        ensure((a - b).abs() <= 4.0 * f64::EPSILON * a, || format!("lambda {l}: {a} vs {b}"))?;
        ensure(a > 0.0 && a < 1.0, || format!("mu({l}) = {a} outside (0, 1)"))?;
        if let Some(p) = prev {
            ensure(a < p, || format!("mu not decreasing at lambda {l}"))?;
        }
        prev = Some(a);
    }
    Ok("100 random lambdas consistent".into())
}

// 10. CLI determinism and cross-command oracle

const CONFIG: &str = r#"
[profile]
s = "0.5:20:0.5"

[box-spectrum]
sides = [1.0]
height = 2.0
rho = 1.0
family = "dirichlet"
K = 5

[count]
sides = [1.0, 1.0]
height = 2.0
rho = 1.0
family = "neumann"
tau-grid = "50:500:50"

[weyl-check]
sides = [1.0, 1.0]
height = 2.0
tau-grid = "100:500:100"

[solve2d]
rect = "1x2"
grid = "64"
faces = "bottom=steklov:1,top=hardnu,left=softfree,right=softfree"
K = 5
"#;

fn run_cli(args: &[&str]) -> Result<Vec<u8>, String> {
    let out = Command::new(env!("CARGO_BIN_EXE_steklov"))
        .args(args)
        .output()
        .map_err(|e| e.to_string())?;
    if !out.status.success() {
        return Err(format!(
            "{args:?} exited with {:?}: {}",
            out.status.code(),
            String::from_utf8_lossy(&out.stderr)
        ));
    }
    Ok(out.stdout)
}

fn criterion_10() -> Outcome {
    let dir = std::env::temp_dir().join(format!("steklov-acceptance-{}", std::process::id()));
    std::fs::create_dir_all(&dir).map_err(|e| e.to_string())?;
    let cfg: PathBuf = dir.join("run.toml");
    std::fs::write(&cfg, CONFIG).map_err(|e| e.to_string())?;
    let cfg = cfg.to_str().unwrap();
    let mut outputs = std::collections::HashMap::new();
    for sub in ["profile", "box-spectrum", "count", "weyl-check", "solve2d"] {
        for format in ["csv", "json"] {
            let a = run_cli(&[sub, "--config", cfg, "--format", format])?;
            let b = run_cli(&[sub, "--config", cfg, "--format", format])?;
            ensure(a == b, || format!("{sub} --format {format} is not reproducible"))?;
            if format == "csv" {
                outputs.insert(sub, String::from_utf8(a).unwrap());
            }
        }
    }
    let lambda = |sub: &str| -> Vec<f64> {
        Table::read_csv(&outputs[sub])
            .unwrap()
            .column("lambda")
            .unwrap()
            .into_iter()
            .map(|c| c.as_f64().unwrap())
            .collect()
    };
    let fd = lambda("solve2d");
    let closed = lambda("box-spectrum");
    let errs: Vec<f64> = fd.iter().zip(&closed).map(|(a, b)| (a - b).abs() / b).collect();
    let shown: Vec<String> = errs.iter().map(|e| format!("{:.2}%", 100.0 * e)).collect();
    ensure(errs.iter().all(|&e| e <= 0.02), || {
        format!("outputs reproducible; solve2d vs box-spectrum [{}]", shown.join(", "))
    })?;
    Ok(format!(
        "10 invocations reproducible; solve2d vs box-spectrum [{}]",
        shown.join(", ")
    ))
}

fn main() {
    let criteria: [(u32, &str, fn() -> Outcome, Duration); 10] = [
        (1, "profile kernel", criterion_1, Duration::from_secs(1)),
        (2, "second-derivative identity", criterion_2, Duration::from_secs(1)),
        (3, "lattice counting vs brute force", criterion_3, Duration::from_secs(5)),
        (4, "sandwich bound", criterion_4, Duration::from_secs(10)),
        (5, "Weyl law on the 1x1x2 box", criterion_5, Duration::from_secs(10)),
        (6, "Dirichlet/Neumann bracket", criterion_6, Duration::from_secs(10)),
        (7, "FD solver vs closed form", criterion_7, Duration::from_secs(120)),
        (8, "FD all-Steklov unit square", criterion_8, Duration::from_secs(120)),
        (9, "mu conversions", criterion_9, Duration::from_secs(1)),
        (10, "CLI determinism and cross-command oracle", criterion_10, Duration::from_secs(180)),
    ];
    panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (n, name, f, budget) in criteria {
        let start = Instant::now();
        let result = panic::catch_unwind(AssertUnwindSafe(f))
            .unwrap_or_else(|p| {
                let msg = p
                    .downcast_ref::<String>()
                    .cloned()
                    .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                    .unwrap_or_else(|| "panic".into());
                Err(format!("panicked: {msg}"))
            });
        let elapsed = start.elapsed();
        let result = match result {
            Ok(d) if elapsed > budget => Err(format!("{d}; took {elapsed:.2?}, budget {budget:?}")),
            other => other,
        };
        match result {
            Ok(detail) => println!("criterion {n:>2} PASS  {name}: {detail} ({elapsed:.2?})"),
            Err(why) => {
                failed += 1;
                println!("criterion {n:>2} FAIL  {name}: {why} ({elapsed:.2?})");
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", 10 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
