use std::fs;
use std::path::Path;

use serde::Serialize;
use serde_json::{json, Value};

use rotset_core::acceptance;
use rotset_core::construct2d::{self, BoundarySpec};
use rotset_core::gallery::{self, Example2Spec, GalleryPotential, SuiteOptions};
use rotset_core::geometry::direction_grid;
use rotset_core::perorbit::{self, CountMode, CountOptions, GrowthEstimate};
use rotset_core::potential::{parse_potential, Potential, PotentialSpec, SkeletonPotential, TablePotential};
use rotset_core::rotgeom::{self, PolytopeOptions, RotationPolytope};
use rotset_core::sft::{format_word, Sft, SystemSpec};
use rotset_core::thermo::{self, PressureEngine, RotationSolver, SolveOptions};
use rotset_core::Error;

use crate::artifacts::Run;
use crate::failure::{At, Failure};
use crate::svg::Figure;
use crate::{Cli, Command, Counting, Estimator, GalleryCommand, Inputs, Mode, Newton, PerorbitCommand};

pub fn run(cli: &Cli) -> anyhow::Result<()> {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Failure::new("cli", "configure_threads", "BadSpec", e.to_string()))?;
    }
    let config = serde_json::to_value(cli).at("cli", "record_config")?;
    let mut run = Run::new(cli.out.clone(), config)?;
    match &cli.command {
        Command::Rotset {
            inputs,
            cycle_cap,
            directions,
        } => rotset(&mut run, inputs, *cycle_cap, *directions)?,
        Command::Support { inputs, u, grid } => support(&mut run, inputs, u, *grid)?,
        Command::Pressure { inputs, t, hessian } => pressure(&mut run, inputs, t, *hessian)?,
        Command::Entropy { inputs, w, newton } => entropy(&mut run, inputs, w, newton)?,
        Command::Profile { inputs, grid, newton } => profile(&mut run, inputs, *grid, newton)?,
        Command::Levels {
            inputs,
            radii,
            samples,
        } => levels(&mut run, inputs, radii, *samples)?,
        Command::Perorbit(p) => perorbit_cmd(&mut run, p)?,
        Command::Construct { boundary, stages } => construct(&mut run, boundary, *stages)?,
        Command::Gallery(g) => gallery_cmd(&mut run, g)?,
        Command::Verify { quick, only } => {
            // The table is written even when criteria fail.
            let outcome = verify(&mut run, *quick, only);
            run.finish()?;
            return outcome;
        }
    }
    run.finish()
}

fn read(path: &Path, operation: &'static str) -> anyhow::Result<String> {
    fs::read_to_string(path).map_err(|e| Failure::new("cli", operation, "Io", format!("{}: {e}", path.display())).into())
}

fn load_system(path: &Path) -> anyhow::Result<Sft> {
    let spec: SystemSpec = serde_json::from_str(&read(path, "load_system")?).at("sft", "parse_system")?;
    spec.build().at("sft", "make_sft")
}

fn load(inputs: &Inputs) -> anyhow::Result<(Sft, Potential)> {
    let sft = load_system(&inputs.system)?;
    let doc: Value = serde_json::from_str(&read(&inputs.potential, "load_potential")?).at("potential", "parse_potential")?;
    let p = parse_potential(&doc, &sft).at("potential", "parse_potential")?;
    Ok((sft, p))
}

fn load_table(inputs: &Inputs) -> anyhow::Result<(Sft, TablePotential)> {
    let (sft, p) = load(inputs)?;
    let t = p.table().at("potential", "table")?.into_owned();
    Ok((sft, t))
}

/// Shortest round-trip decimal, without a negative zero.
fn num(x: f64) -> String {
    format!("{}", x + 0.0)
}

fn row(xs: &[f64]) -> String {
    xs.iter().map(|&x| num(x)).collect::<Vec<_>>().join(",")
}

fn header(prefix: &str, m: usize) -> Vec<String> {
    (1..=m).map(|i| format!("{prefix}_{i}")).collect()
}

fn emit(run: &mut Run, name: &str, text: &str) -> anyhow::Result<()> {
    print!("{text}");
    run.write(name, text.as_bytes())
}

fn emit_json<T: Serialize>(run: &mut Run, name: &str, value: &T) -> anyhow::Result<()> {
    let mut s = serde_json::to_string_pretty(value).at("cli", "write_artifact")?;
    s.push('\n');
    emit(run, name, &s)
}

fn check_dim(expected: usize, found: usize, module: &'static str, op: &'static str) -> anyhow::Result<()> {
    if expected != found {
        return Err(Error::DimensionMismatch { expected, found }).at(module, op);
    }
    Ok(())
}

fn sorted_vertices(poly: &RotationPolytope) -> Vec<Vec<f64>> {
    let mut v = poly.vertices.clone();
    if poly.m == 1 {
        v.sort_by(|a, b| a[0].total_cmp(&b[0]));
    }
    v
}

fn polytope_figure(title: &str, poly: &RotationPolytope) -> Figure {
    let mut f = Figure::new(title);
    f.polygon(&poly.vertices, "black", "#eef2f8");
    if let Some(outer) = &poly.outer {
        f.polygon(outer, "#999999", "none");
    }
    f
}

fn rotset(run: &mut Run, inputs: &Inputs, cycle_cap: usize, directions: usize) -> anyhow::Result<()> {
    let (sft, t) = load_table(inputs)?;
    let opts = PolytopeOptions {
        cycle_cap,
        fallback: true,
        directions,
        ..PolytopeOptions::default()
    };
    let poly = rotgeom::rotation_polytope_with(&sft, &t, &opts).at("rotgeom", "rotation_polytope")?;
    let csv: String = sorted_vertices(&poly).iter().map(|v| row(v) + "\n").collect();
    emit(run, "rotset.csv", &csv)?;
    run.write_json("rotset.json", &poly)?;
    if poly.m == 2 {
        let mut f = polytope_figure("rotation set", &poly);
        f.dots(&poly.vertices, "black", 2.5);
        run.write("rotset.svg", f.render().as_bytes())?;
    }
    Ok(())
}

fn support(run: &mut Run, inputs: &Inputs, u: &[f64], grid: Option<usize>) -> anyhow::Result<()> {
    let (sft, t) = load_table(inputs)?;
    let m = t.dim();
    let dirs: Vec<Vec<f64>> = match grid {
        Some(g) => direction_grid(m, g),
        None => {
            if u.is_empty() {
                return Err(Error::BadSpec("give --u or --grid".into())).at("rotgeom", "support");
            }
            if u.len() % m != 0 {
                check_dim(m, u.len(), "rotgeom", "support")?;
            }
            u.chunks(m).map(|c| c.to_vec()).collect()
        }
    };
    let sp = SkeletonPotential::new(&sft, &t).at("potential", "edge_weights")?;
    let queries = dirs
        .iter()
        .map(|d| rotgeom::support_on(&sp, d))
        .collect::<rotset_core::Result<Vec<_>>>()
        .at("rotgeom", "support")?;
    let mut cols = header("u", m);
    cols.push("value".into());
    cols.push("witness".into());
    cols.extend(header("mean", m));
    let mut csv = cols.join(",") + "\n";
    for q in &queries {
        csv += &format!(
            "{},{},{},{}\n",
            row(&q.direction),
            num(q.value),
            format_word(&q.witness.symbols, sft.alphabet()),
            row(&q.witness_mean)
        );
    }
    emit(run, "support.csv", &csv)?;
    run.write_json("support.json", &queries)
}

fn pressure(run: &mut Run, inputs: &Inputs, t: &[f64], hessian: bool) -> anyhow::Result<()> {
    let (sft, table) = load_table(inputs)?;
    check_dim(table.dim(), t.len(), "thermo", "pressure")?;
    let engine = PressureEngine::new(&sft, &table).at("thermo", "pressure")?;
    let (pe, g) = engine.gradient(t).at("thermo", "grad_pressure")?;
    let h = if hessian {
        Some(engine.hessian(t).at("thermo", "hessian_pressure")?)
    } else {
        None
    };
    let out = json!({
        "T": t,
        "Q": pe.q,
        "gradient": g,
        "residual": pe.residual,
        "iterations": pe.iterations,
        "reducible": pe.reducible,
        "hessian": h,
    });
    emit_json(run, "pressure.json", &out)
}

fn solve_options(n: &Newton) -> SolveOptions {
    SolveOptions {
        tol: n.tol,
        max_iter: n.max_iter,
        margin: n.margin,
        ..SolveOptions::default()
    }
}

fn entropy(run: &mut Run, inputs: &Inputs, w: &[f64], newton: &Newton) -> anyhow::Result<()> {
    let (sft, t) = load_table(inputs)?;
    check_dim(t.dim(), w.len(), "thermo", "solve_rotation")?;
    let solver = RotationSolver::new(&sft, &t).at("thermo", "solve_rotation")?;
    let sol = solver.solve(w, &solve_options(newton)).at("thermo", "solve_rotation")?;
    let out = json!({
        "w": sol.w,
        "H": sol.h,
        "T_star": sol.t_star,
        "Q_star": sol.q_star,
        "rv": sol.rv,
        "iterations": sol.iterations,
        "converged": sol.converged,
        "grad_norm": sol.grad_norm,
        "margin": solver.polytope.interior_margin(w),
    });
    emit_json(run, "entropy.json", &out)
}

/// `n` points per axis strictly inside the bounding box, kept when they are
/// at least `margin` inside the polytope.
fn interior_grid(poly: &RotationPolytope, n: usize, margin: f64) -> anyhow::Result<Vec<Vec<f64>>> {
    if poly.m > 2 {
        return Err(Error::BadDimension(format!("profile grids are built for m <= 2, got m = {}", poly.m)))
            .at("thermo", "entropy_profile");
    }
    let axis = |k: usize| -> Vec<f64> {
        let lo = poly.vertices.iter().map(|v| v[k]).fold(f64::INFINITY, f64::min);
        let hi = poly.vertices.iter().map(|v| v[k]).fold(f64::NEG_INFINITY, f64::max);
        (1..=n).map(|i| lo + (hi - lo) * i as f64 / (n + 1) as f64).collect()
    };
    let pts: Vec<Vec<f64>> = if poly.m == 1 {
        axis(0).into_iter().map(|x| vec![x]).collect()
    } else {
        let (xs, ys) = (axis(0), axis(1));
        ys.iter().flat_map(|&y| xs.iter().map(move |&x| vec![x, y])).collect()
    };
    Ok(pts.into_iter().filter(|w| poly.interior_margin(w) > margin).collect())
}

fn profile(run: &mut Run, inputs: &Inputs, grid: usize, newton: &Newton) -> anyhow::Result<()> {
    let (sft, t) = load_table(inputs)?;
    let solver = RotationSolver::new(&sft, &t).at("thermo", "entropy_profile")?;
    let opts = solve_options(newton);
    let pts = interior_grid(&solver.polytope, grid, opts.margin)?;
    let prof = thermo::entropy_profile(&solver, &pts, &opts);
    let m = t.dim();
    let mut cols = header("w", m);
    cols.push("H".into());
    cols.extend(header("T", m));
    cols.push("iterations".into());
    cols.push("status".into());
    let mut csv = cols.join(",") + "\n";
    for p in &prof {
        match &p.solution {
            Some(s) => {
                csv += &format!("{},{},{},{},ok\n", row(&p.w), num(s.h), row(&s.t_star), s.iterations);
            }
            None => {
                let kind = p.error.as_deref().and_then(|e| e.split(':').next()).unwrap_or("error");
                csv += &format!("{},,{},,{kind}\n", row(&p.w), vec![""; m].join(","));
            }
        }
    }
    emit(run, "profile.csv", &csv)?;
    run.write_json("profile.json", &prof)
}

fn levels(run: &mut Run, inputs: &Inputs, radii: &[f64], samples: usize) -> anyhow::Result<()> {
    let (sft, t) = load_table(inputs)?;
    let solver = RotationSolver::new(&sft, &t).at("thermo", "level_curve")?;
    let m = t.dim();
    let mut cols = vec!["R".to_string(), "index".to_string()];
    cols.extend(header("rv", m));
    let mut csv = cols.join(",") + "\n";
    let mut fig = polytope_figure("level curves", &solver.polytope);
    for &r in radii {
        let curve = thermo::level_curve(&solver.engine, r, samples).at("thermo", "level_curve")?;
        for (i, p) in curve.iter().enumerate() {
            csv += &format!("{},{i},{}\n", num(r), row(p));
        }
        if m == 2 {
            let mut closed = curve.clone();
            closed.extend(curve.first().cloned());
            fig.polyline(&closed, "#c0392b");
        }
    }
    emit(run, "levels.csv", &csv)?;
    if m == 2 {
        run.write("levels.svg", fig.render().as_bytes())?;
    }
    Ok(())
}

fn count_options(c: &Counting) -> CountOptions {
    CountOptions {
        mode: match c.mode {
            Mode::Auto => CountMode::Auto,
            Mode::Enumerate => CountMode::Enumerate,
            Mode::Dp => CountMode::Dp,
        },
        q: c.q,
        enum_budget: c.enum_budget,
        dp_budget: c.dp_budget,
    }
}

fn rate(count: u128, n: usize) -> String {
    if count == 0 {
        String::new()
    } else {
        num((count as f64).ln() / n as f64)
    }
}

fn perorbit_cmd(run: &mut Run, cmd: &PerorbitCommand) -> anyhow::Result<()> {
    match cmd {
        PerorbitCommand::Census { inputs, n, counting } => {
            let (sft, t) = load_table(inputs)?;
            let q = counting.q.unwrap_or(0.25);
            let c = perorbit::census(&sft, &t, *n, q, &count_options(counting)).at("perorbit", "census")?;
            let mut cols = vec!["n".to_string()];
            cols.extend(header("rv", t.dim()));
            cols.push("count".into());
            let mut csv = cols.join(",") + "\n";
            for (idx, count) in &c.bins {
                csv += &format!("{n},{},{count}\n", row(&c.center(idx)));
            }
            emit(run, "census.csv", &csv)?;
            run.write_json("census.json", &c)
        }
        PerorbitCommand::Ball {
            inputs,
            w,
            r,
            n,
            counting,
        } => {
            let (sft, t) = load_table(inputs)?;
            check_dim(t.dim(), w.len(), "perorbit", "count_in_ball")?;
            let opts = count_options(counting);
            let mut csv = "n,lower,upper,rate\n".to_string();
            let mut rows = Vec::new();
            for &k in n {
                let b = perorbit::count_in_ball(&sft, &t, w, *r, k, &opts).at("perorbit", "count_in_ball")?;
                csv += &format!("{k},{},{},{}\n", b.lower, b.upper, rate(b.lower, k));
                rows.push(json!({"n": k, "lower": b.lower.to_string(), "upper": b.upper.to_string()}));
            }
            emit(run, "ball.csv", &csv)?;
            run.write_json("ball.json", &json!({"w": w, "r": r, "counts": rows}))
        }
        PerorbitCommand::Growth {
            inputs,
            w,
            r,
            n_max,
            estimator,
            counting,
        } => {
            let (sft, t) = load_table(inputs)?;
            check_dim(t.dim(), w.len(), "perorbit", "h_per")?;
            let opts = count_options(counting);
            let ns: Vec<usize> = (1..=*n_max).collect();
            let mut fits: Vec<(&str, GrowthEstimate)> = Vec::new();
            if matches!(estimator, Estimator::Per | Estimator::Both) {
                fits.push(("per", perorbit::h_per(&sft, &t, w, *r, &ns, &opts).at("perorbit", "h_per")?));
            }
            if matches!(estimator, Estimator::Word | Estimator::Both) {
                fits.push(("word", perorbit::h_word(&sft, &t, w, *r, &ns, &opts).at("perorbit", "h_word")?));
            }
            let mut csv = "estimator,n,count,upper,rate\n".to_string();
            let mut summary = serde_json::Map::new();
            for (name, g) in &fits {
                for p in &g.values {
                    csv += &format!("{name},{},{},{},{}\n", p.n, p.count, p.upper, rate(p.count, p.n));
                }
                summary.insert(
                    name.to_string(),
                    json!({
                        "estimate": g.estimate,
                        "estimate_upper": g.estimate_upper,
                        "window": [g.window.0, g.window.1],
                        "residual": g.residual,
                    }),
                );
            }
            run.write("growth.csv", csv.as_bytes())?;
            emit_json(run, "growth.json", &json!({"w": w, "r": r, "estimators": summary}))
        }
    }
}

fn construct(run: &mut Run, boundary: &Path, stages: usize) -> anyhow::Result<()> {
    if stages == 0 {
        return Err(Error::BadSpec("at least one stage is needed to export a potential".into()))
            .at("construct2d", "advance");
    }
    let spec: BoundarySpec =
        serde_json::from_str(&read(boundary, "load_boundary")?).at("construct2d", "make_boundary")?;
    let b = spec.build().at("construct2d", "make_boundary")?;
    let mut state = construct2d::stage0(&b);
    let mut certs = Vec::with_capacity(stages);
    let mut phi1 = None;
    for _ in 0..stages {
        let (next, cert) = construct2d::advance(&state).at("construct2d", "advance")?;
        state = next;
        certs.push(cert);
        if phi1.is_none() {
            phi1 = Some(construct2d::export_stage(&state).at("construct2d", "export_stage")?);
        }
    }
    let phi1 = phi1.expect("at least one stage ran");
    let full2 = Sft::full(2);
    let poly = rotgeom::rotation_polytope_with(
        &full2,
        &phi1,
        &PolytopeOptions {
            fallback: true,
            ..PolytopeOptions::default()
        },
    )
    .at("rotgeom", "rotation_polytope")?;

    run.write_json("system.json", &full2.to_spec())?;
    run.write_json("potential.json", &phi1.to_spec())?;
    run.write_json("certificates.json", &certs)?;

    let k: Vec<Vec<f64>> = b.hull(256).vertices;
    let pts: Vec<Vec<f64>> = state.points().iter().map(|p| p.to_vec()).collect();
    let star: Vec<Vec<f64>> = state.star_points().iter().map(|p| p.to_vec()).collect();
    let mut f = Figure::new("staged construction");
    f.polygon(&k, "black", "none")
        .polygon(&poly.vertices, "#2c7bb6", "#e6f0f8")
        .dots(&pts, "#d7191c", 2.0)
        .dots(&star, "#1a9641", 1.5);
    run.write("construct.svg", f.render().as_bytes())?;

    let out = json!({
        "stages": stages,
        "certificates": certs,
        "stage1_rotation_set": poly.vertices,
    });
    emit_json(run, "construct.json", &out)
}

fn gallery_cmd(run: &mut Run, cmd: &GalleryCommand) -> anyhow::Result<()> {
    let GalleryCommand::Example2 {
        spec,
        d,
        depth,
        alpha,
        rho,
        radii,
        samples,
        lipschitz_pairs,
        seed,
        max_period,
    } = cmd;
    let mut s = match spec {
        Some(p) => serde_json::from_str::<Example2Spec>(&read(p, "load_spec")?).at("gallery", "build_example2")?,
        None => Example2Spec::new(d.unwrap_or(6)),
    };
    if let Some(d) = d {
        s.d = *d;
    }
    if let Some(k) = depth {
        s.depth = *k;
    }
    if let Some(a) = alpha {
        s.alpha = *a;
    }
    if let Some(r) = rho {
        s.rho = *r;
    }
    let s = s.resolved().at("gallery", "build_example2")?;
    let g = GalleryPotential::build(s.clone()).at("gallery", "build_example2")?;
    let sft = g.sft();
    run.write_json("system.json", &sft.to_spec())?;
    run.write_json("potential.json", &PotentialSpec::Example2(s.clone()))?;

    let opts = SuiteOptions {
        max_period: *max_period,
        ..SuiteOptions::default()
    };
    let report = gallery::example2_entropy_suite(&s, &opts).at("gallery", "example2_entropy_suite")?;

    let lipschitz = if *lipschitz_pairs > 0 {
        let seed = seed.expect("clap enforces --seed");
        let pairs = gallery::sample_pairs(&s, s.depth + 2, *lipschitz_pairs, seed);
        let rep = gallery::check_lipschitz(&g, &pairs);
        run.write_json("lipschitz.json", &rep)?;
        Some(rep)
    } else {
        None
    };

    let engine = PressureEngine::new(&sft, g.table()).at("thermo", "level_curve")?;
    let k: Vec<Vec<f64>> = s.vertices().iter().map(|v| v.to_vec()).collect();
    let mut f = Figure::new("gallery system");
    f.polygon(&k, "black", "none")
        .polygon(&report.polytope_vertices, "#2c7bb6", "none")
        .dots(&[s.w0().to_vec()], "black", 2.5);
    for (i, v) in s.vertices().iter().enumerate() {
        f.label(*v, &format!("w{}", i + 1));
    }
    for &r in radii {
        let mut curve = thermo::level_curve(&engine, r, *samples).at("thermo", "level_curve")?;
        curve.extend(curve.first().cloned());
        f.polyline(&curve, "#c0392b");
    }
    run.write("gallery.svg", f.render().as_bytes())?;

    let out = json!({"suite": report, "lipschitz": lipschitz});
    emit_json(run, "suite.json", &out)
}

fn verify(run: &mut Run, quick: bool, only: &[usize]) -> anyhow::Result<()> {
    let ids: Vec<usize> = if only.is_empty() {
        (1..=acceptance::criterion_count()).collect()
    } else {
        only.to_vec()
    };
    if let Some(&bad) = ids.iter().find(|&&i| i == 0 || i > acceptance::criterion_count()) {
        return Err(Error::BadSpec(format!("no criterion {bad}"))).at("acceptance", "verify");
    }
    let mut table = String::new();
    let mut reports = Vec::new();
    for id in ids {
        let r = acceptance::run(id, quick);
        let line = acceptance::format_line(&r);
        println!("{line}");
        table += &line;
        table.push('\n');
        reports.push(r);
    }
    let failed: Vec<String> = reports.iter().filter(|r| !r.passed).map(|r| r.id.to_string()).collect();
    let summary = format!("{} of {} criteria passed", reports.len() - failed.len(), reports.len());
    println!("{summary}");
    table += &summary;
    table.push('\n');
    run.write("verify.txt", table.as_bytes())?;
    run.write_json("verify.json", &reports)?;
    if failed.is_empty() {
        Ok(())
    } else {
        Err(Failure::new(
            "acceptance",
            "verify",
            "CriteriaFailed",
            format!("criteria {} failed", failed.join(", ")),
        )
        .into())
    }
}
