use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{bail, Context};
use multipack_core::bounds::{
    curve_rows, exponent_e, geometric_grid, lambda_n_threshold, lambda_star, render_curve_csv,
};
use multipack_core::construction::{
    achieved_rate, default_half_width, expurgate, find_bad_lists, sample_code, tile, verify_code, verify_packing,
    Constellation, FiniteCode, SampleParams, Verdict, WindowPoint,
};
use multipack_core::deviation::{laplace_check, mc_tail, rate_function, TailParams, TAIL_CSV_HEADER};
use multipack_core::geometry::{
    avg_sq_radius, chebyshev_radius, default_max_iters, parse_point_file, rad_p, read_point_list, render_point_file,
    AvgRadiusFormula,
};
use multipack_core::{BoundQuery, Error, ExponentQuery};

use crate::manifest::write_manifests;
use crate::{BoundsArgs, ConstructArgs, RadiusArgs, RadiusMode, RatefnArgs, TailArgs, VerifyArgs};

fn per_list_path(out: &Path, list_len: usize) -> PathBuf {
    let stem = out.file_stem().unwrap_or_default().to_string_lossy();
    let name = match out.extension() {
        Some(ext) => format!("{stem}_L{list_len}.{}", ext.to_string_lossy()),
        None => format!("{stem}_L{list_len}"),
    };
    out.with_file_name(name)
}

pub fn bounds(args: &BoundsArgs) -> anyhow::Result<ExitCode> {
    let started = Instant::now();
    let grid = geometric_grid(args.noise_min, args.noise_max, args.steps)?;
    let jobs: Vec<(usize, PathBuf)> = match args.list_len {
        Some(l) => vec![(l, args.out.clone())],
        None => args.multi_l.iter().map(|&l| (l, per_list_path(&args.out, l))).collect(),
    };
    let mut outputs = Vec::new();
    for (l, path) in jobs {
        let csv = render_curve_csv(&curve_rows(l, &grid)?);
        std::fs::write(&path, csv).with_context(|| format!("writing {}", path.display()))?;
        println!("L={l}: {} rows -> {}", grid.len(), path.display());
        outputs.push(path);
    }
    write_manifests("bounds", args, None, started, &outputs)?;
    Ok(ExitCode::SUCCESS)
}

pub fn radius(args: &RadiusArgs) -> anyhow::Result<ExitCode> {
    let list = read_point_list(&args.input).with_context(|| format!("reading {}", args.input.display()))?;
    println!("L = {}, n = {}", list.len(), list.dim());
    match args.mode {
        RadiusMode::Avg => {
            let values: Vec<f64> = AvgRadiusFormula::ALL.iter().map(|&f| avg_sq_radius(&list, f)).collect();
            for (f, v) in AvgRadiusFormula::ALL.iter().zip(&values) {
                println!("{:<18} {v}", f.name());
            }
            let lo = values.iter().cloned().fold(f64::INFINITY, f64::min);
            let hi = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            println!("max discrepancy    {:e}", hi - lo);
        }
        RadiusMode::Cheb => {
            let r = chebyshev_radius(&list, args.tol, default_max_iters(list.len(), args.tol))?;
            println!("cheb_sq    {}", r.radius_sq);
            println!("lower      {}", r.lower);
            println!("upper      {}", r.upper);
            println!("gap        {:e}", r.gap);
            println!("iterations {}", r.iterations);
            println!("converged  {}", r.converged);
            println!("center     {}", fmt_point(&r.center));
        }
        RadiusMode::P => {
            let r = rad_p(&list, args.p, args.tol)?;
            println!("rad_p      {}", r.value);
            println!("p          {}", args.p);
            println!("iterations {}", r.iterations);
            println!("converged  {}", r.converged);
            println!("center     {}", fmt_point(&r.center));
        }
    }
    Ok(ExitCode::SUCCESS)
}

pub fn construct(args: &ConstructArgs) -> anyhow::Result<ExitCode> {
    let started = Instant::now();
    let half_width = args.half_width.unwrap_or_else(|| default_half_width(args.n, args.noise));
    let params = SampleParams {
        dim: args.n,
        list_len: args.list_len,
        noise: args.noise,
        half_width,
        rate_margin: args.rate_margin,
        seed: args.seed,
        size: args.size,
    };
    let code = sample_code(params)?;
    let bad = find_bad_lists(&code)?;
    let clean = if args.no_expurgate { code.clone() } else { expurgate(&code, &bad)? };
    let q = ExponentQuery::new(BoundQuery::new(args.noise, args.list_len)?, half_width)?;
    let n = args.n as f64;
    let lambda_n = lambda_n_threshold(q, args.n);
    println!("K                      {half_width}");
    println!("M                      {}", code.len());
    println!("bad lists              {}", bad.len());
    println!("removed                {}", clean.expurgated_count);
    println!("kept                   {}", clean.len());
    println!("achieved rate          {}", achieved_rate(&clean));
    println!("(1/n) ln(lambda_n/2)   {}", (lambda_n / 2.0).ln() / n);
    println!("with margin            {}", (lambda_n * (n * args.rate_margin).exp() / 2.0).ln() / n);
    let file = if args.tile {
        let c = match args.gap {
            Some(g) => tile(clean, g)?,
            None => Constellation::with_default_gap(clean)?,
        };
        println!("gap                    {}", c.gap);
        println!("period                 {}", c.period);
        println!("constellation nld      {}", c.nld());
        c.to_point_file()
    } else {
        clean.to_point_file()
    };
    std::fs::write(&args.out, render_point_file(&file)).with_context(|| format!("writing {}", args.out.display()))?;
    write_manifests("construct", args, Some(args.seed), started, std::slice::from_ref(&args.out))?;
    Ok(ExitCode::SUCCESS)
}

pub fn verify(args: &VerifyArgs) -> anyhow::Result<ExitCode> {
    let text = std::fs::read_to_string(&args.code).with_context(|| format!("reading {}", args.code.display()))?;
    let file = parse_point_file(&text)?;
    let verdict = if args.as_constellation {
        let c = if file.get("gap").is_some() {
            Constellation::from_point_file(&file)?
        } else {
            Constellation::with_default_gap(FiniteCode::from_point_file(&file)?)?
        };
        let window = args.window.unwrap_or_else(|| c.default_window_radius());
        println!("gap {} period {} window radius {window}", c.gap, c.period);
        verify_packing(&c, window)?
    } else {
        verify_code(&FiniteCode::from_point_file(&file)?)?
    };
    print!("{}", report_verdict(&verdict));
    Ok(if verdict.pass { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn report_verdict(v: &Verdict) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "points checked   {}", v.window_points);
    let _ = writeln!(s, "threshold nN     {}", v.threshold);
    let _ = writeln!(s, "violations       {}", v.violations);
    match v.min_avg_sq_radius {
        Some(m) => {
            let _ = writeln!(s, "min avg_sq_rad   {m}");
        }
        None => {
            let _ = writeln!(s, "min avg_sq_rad   > {}", 4.0 * v.threshold);
        }
    }
    if let Some(list) = &v.min_list {
        let _ = writeln!(s, "min list");
        write_list(&mut s, list);
    }
    if let Some(list) = &v.violating_list {
        let _ = writeln!(s, "first violating list");
        write_list(&mut s, list);
    }
    let _ = writeln!(s, "{}", if v.pass { "PASS" } else { "FAIL" });
    s
}

fn write_list(s: &mut String, list: &[WindowPoint]) {
    for w in list {
        let tile: Vec<String> = w.tile.iter().map(i64::to_string).collect();
        let _ = writeln!(s, "  #{} tile [{}] {}", w.base_index, tile.join(","), fmt_point(&w.coords));
    }
}

fn fmt_point(p: &[f64]) -> String {
    let parts: Vec<String> = p.iter().map(|v| v.to_string()).collect();
    format!("({})", parts.join(", "))
}

pub fn tail(args: &TailArgs) -> anyhow::Result<ExitCode> {
    let started = Instant::now();
    let t = mc_tail(TailParams {
        list_len: args.list_len,
        dim: args.n,
        half_width: args.half_width,
        noise: args.noise,
        samples: args.samples,
        seed: args.seed,
    })?;
    let row = t.to_csv_row();
    println!("{TAIL_CSV_HEADER}");
    println!("{row}");
    println!();
    let (lo, hi) = t.exponent_ci();
    let bound_note = if t.exponent_is_lower_bound { " (no hits: lower bound)" } else { "" };
    println!("exponent_hat    {}{bound_note}", t.exponent_hat);
    println!("exponent CI     [{lo}, {hi}]");
    match rate_function(args.list_len, args.half_width, args.noise, args.quad_order) {
        Ok(r) => println!("rate_function   {}", r.rate),
        Err(e @ Error::Regime { .. }) => println!("rate_function   n/a ({e})"),
        Err(e) => return Err(e.into()),
    }
    let q = ExponentQuery::new(BoundQuery::new(args.noise, args.list_len)?, args.half_width)?;
    println!("exponent_E      {}", exponent_e(q));
    if let Some(out) = &args.out {
        std::fs::write(out, format!("{TAIL_CSV_HEADER}\n{row}\n"))
            .with_context(|| format!("writing {}", out.display()))?;
        write_manifests("tail", args, Some(args.seed), started, std::slice::from_ref(out))?;
    }
    Ok(ExitCode::SUCCESS)
}

pub fn ratefn(args: &RatefnArgs) -> anyhow::Result<ExitCode> {
    let q = BoundQuery::new(args.noise, args.list_len)?;
    let e = exponent_e(ExponentQuery::new(q, args.half_width)?);
    let r = rate_function(args.list_len, args.half_width, args.noise, args.quad_order)?;
    println!("rate            {}", r.rate);
    println!("lambda_opt      {}", r.lambda_opt);
    println!("lambda_star     {}", lambda_star(q));
    println!("exponent_E      {e}");
    println!("quadrature ok   {}", r.quadrature_converged);
    if r.lambda_opt > 0.0 {
        let lc = laplace_check(args.list_len, args.half_width, r.lambda_opt)?;
        println!("laplace ratio   {}", lc.ratio);
    } else {
        println!("laplace ratio   n/a (zero tilt)");
    }
    if !r.quadrature_converged {
        bail!("quadrature did not converge at order {}; raise --quad-order", args.quad_order);
    }
    Ok(ExitCode::SUCCESS)
}
