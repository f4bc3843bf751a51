use genmaxent::document::{InstanceDoc, ResultDoc};
use genmaxent::escort::{escort, geometry_report};
use genmaxent::percolation::{
    build_instance, enumerate_1d, enumerate_2d, merge_rotations, percolation_as_solver_instance,
    percolation_entropy, q_of_theta, verify_family_identity, Lattice,
};
use genmaxent::solver::{solve_for_energies_with, EnergySolverOptions};
use genmaxent::thermo::{thermo_report, DEFAULT_STEP};
use genmaxent::{
    distribution_for_theta, entropy, verify_equilibrium, EnergyTarget, Error, ProblemInstance,
    SolveResult,
};
use rayon::prelude::*;

use crate::docs::{
    FisherOutput, PercolationOutput, PointRequest, ScanRequest, ShapeRow, SolveReport,
    SolveRequest, ThermoOutput, VerifyOutput, VerifyRequest,
};
use crate::format::{csv_line, float, to_json};
use crate::{
    Cli, Failure, LatticeArg, OutputFormat, PercolationArgs, Report, Verb, EXIT_NUMERICAL,
};

/// Largest number of scan points.
pub const MAX_SCAN_POINTS: usize = 1_000_000;

/// Default violation threshold for `verify`.
pub const VERIFY_TOLERANCE: f64 = 1e-10;

fn ok(text: String) -> Result<Report, Failure> {
    Ok(Report { text, code: 0 })
}

fn output_format(
    cli: &Cli,
    default: OutputFormat,
    allowed: &[OutputFormat],
) -> Result<OutputFormat, Failure> {
    let f = cli.format.unwrap_or(default);
    if allowed.contains(&f) {
        Ok(f)
    } else {
        Err(Failure::usage(format!(
            "format {f:?} is not available for this command"
        )))
    }
}

/// Rejects a `--format` the verb cannot produce, before any input is read.
pub(crate) fn check_format(cli: &Cli) -> Result<(), Failure> {
    use OutputFormat::{Csv, Json};
    let (default, allowed): (OutputFormat, &[OutputFormat]) = match cli.verb {
        Verb::Solve => (Json, &[Json, Csv]),
        Verb::Scan => (Csv, &[Csv]),
        Verb::Percolation(_) => (Csv, &[Json, Csv]),
        Verb::Thermo | Verb::Fisher | Verb::Verify => (Json, &[Json]),
    };
    output_format(cli, default, allowed).map(|_| ())
}

fn instance_of(doc: &InstanceDoc) -> Result<ProblemInstance, Failure> {
    doc.to_instance()
        .map_err(|e| Failure::from_library(e, "instance"))
}

fn solve_any(
    cli: &Cli,
    instance: &ProblemInstance,
    theta: Option<&Vec<f64>>,
    energies: Option<&Vec<f64>>,
) -> Result<SolveResult, Failure> {
    match (theta, energies) {
        (Some(t), None) => Ok(distribution_for_theta(instance, t)?),
        (None, Some(u)) => {
            let mut opts = EnergySolverOptions::default();
            if let Some(tol) = cli.tolerance {
                opts.tolerance = tol;
            }
            Ok(solve_for_energies_with(
                instance,
                &EnergyTarget(u.clone()),
                &opts,
            )?)
        }
        _ => Err(Failure::schema(
            "schema",
            Some(String::new()),
            "exactly one of `theta` and `energies` is required",
        )),
    }
}

pub(crate) fn solve(cli: &Cli, req: &SolveRequest) -> Result<Report, Failure> {
    let format = output_format(
        cli,
        OutputFormat::Json,
        &[OutputFormat::Json, OutputFormat::Csv],
    )?;
    let instance = instance_of(&req.instance)?;
    let r = solve_any(cli, &instance, req.theta.as_ref(), req.energies.as_ref())?;
    match format {
        OutputFormat::Json => ok(to_json(&SolveReport {
            instance: InstanceDoc::from_instance(&instance),
            result: ResultDoc::from(&r),
            energies: instance.energies(&r.distribution),
        })),
        OutputFormat::Csv => {
            let mut out = csv_line(["index", "label", "probability", "cutoff"]);
            for (a, (label, &p)) in instance
                .labels()
                .iter()
                .zip(r.distribution.probs())
                .enumerate()
            {
                let cut = if r.cutoff_set.contains(&a) { "1" } else { "0" };
                out.push_str(&csv_line([
                    a.to_string(),
                    label.clone(),
                    float(p),
                    cut.into(),
                ]));
            }
            ok(out)
        }
    }
}

fn scan_row(instance: &ProblemInstance, theta: &[f64]) -> Vec<String> {
    let solved = distribution_for_theta(instance, theta).and_then(|r| {
        let (_, z) = escort(instance, &r)?;
        let s = entropy(instance.model(), &r.distribution)?;
        Ok((r, z, s))
    });
    let mut row: Vec<String> = theta.iter().map(|&t| float(t)).collect();
    match solved {
        Ok((r, z, s)) => {
            row.push(float(r.massieu));
            row.extend(instance.energies(&r.distribution).into_iter().map(float));
            row.push(float(s));
            row.push(float(z));
            row.push(r.cutoff_set.len().to_string());
            row.push("ok".into());
        }
        Err(e) => {
            row.extend(std::iter::repeat_n(String::new(), instance.dimension() + 4));
            row.push(e.kind().into());
        }
    }
    row
}

pub(crate) fn scan(cli: &Cli, req: &ScanRequest, workers: usize) -> Result<Report, Failure> {
    output_format(cli, OutputFormat::Csv, &[OutputFormat::Csv])?;
    let instance = instance_of(&req.instance)?;
    let n = instance.dimension();
    if req.grid.len() != n {
        return Err(Failure::schema(
            "invalid",
            Some("grid".into()),
            format!("expected {n} axes, got {}", req.grid.len()),
        ));
    }
    let mut total: usize = 1;
    for (j, axis) in req.grid.iter().enumerate() {
        if !(axis.start.is_finite() && axis.stop.is_finite()) {
            return Err(Failure::schema(
                "invalid",
                Some(format!("grid[{j}]")),
                "start and stop must be finite",
            ));
        }
        total = total.saturating_mul(axis.steps);
    }
    if total > MAX_SCAN_POINTS {
        return Err(Error::CapExceeded {
            requested: total,
            max: MAX_SCAN_POINTS,
        }
        .into());
    }

    let mut header: Vec<String> = (0..n).map(|j| format!("theta_{j}")).collect();
    header.push("massieu".into());
    header.extend((0..n).map(|j| format!("U_{j}")));
    header.extend(["entropy", "z", "cutoff_size", "status"].map(String::from));
    let mut out = csv_line(&header);

    // row-major: the last axis varies fastest
    let points: Vec<Vec<f64>> = (0..total)
        .map(|mut flat| {
            let mut theta = vec![0.0; n];
            for j in (0..n).rev() {
                let steps = req.grid[j].steps;
                theta[j] = req.grid[j].point(flat % steps);
                flat /= steps;
            }
            theta
        })
        .collect();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Failure::usage(format!("cannot start worker pool: {e}")))?;
    let rows: Vec<Vec<String>> =
        pool.install(|| points.par_iter().map(|t| scan_row(&instance, t)).collect());
    for row in rows {
        out.push_str(&csv_line(row));
    }
    ok(out)
}

pub(crate) fn thermo(cli: &Cli, req: &PointRequest) -> Result<Report, Failure> {
    output_format(cli, OutputFormat::Json, &[OutputFormat::Json])?;
    let instance = instance_of(&req.instance)?;
    let report = thermo_report(&instance, &req.theta, cli.step.unwrap_or(DEFAULT_STEP))?;
    ok(to_json(&ThermoOutput {
        instance: InstanceDoc::from_instance(&instance),
        theta: req.theta.clone(),
        report,
    }))
}

pub(crate) fn fisher(cli: &Cli, req: &PointRequest) -> Result<Report, Failure> {
    output_format(cli, OutputFormat::Json, &[OutputFormat::Json])?;
    let instance = instance_of(&req.instance)?;
    let report = geometry_report(&instance, &req.theta, cli.step.unwrap_or(DEFAULT_STEP))?;
    ok(to_json(&FisherOutput {
        instance: InstanceDoc::from_instance(&instance),
        theta: req.theta.clone(),
        report,
    }))
}

pub(crate) fn verify(cli: &Cli, req: &VerifyRequest) -> Result<Report, Failure> {
    output_format(cli, OutputFormat::Json, &[OutputFormat::Json])?;
    let instance = instance_of(&req.instance)?;
    let result = match &req.result {
        Some(doc) => SolveResult::try_from(doc).map_err(|e| Failure::from_library(e, "result"))?,
        None => solve_any(cli, &instance, req.theta.as_ref(), req.energies.as_ref())?,
    };
    let verification = verify_equilibrium(&instance, &result, cli.trials, cli.seed)
        .map_err(|e| Failure::from_library(e, "result"))?;
    let tolerance = cli.tolerance.unwrap_or(VERIFY_TOLERANCE);
    let passed = verification.certificate_ok && verification.max_violation <= tolerance;
    let text = to_json(&VerifyOutput {
        instance: InstanceDoc::from_instance(&instance),
        result: ResultDoc::from(&result),
        verification,
        tolerance,
        passed,
    });
    Ok(Report {
        text,
        code: if passed { 0 } else { EXIT_NUMERICAL },
    })
}

pub(crate) fn percolation(cli: &Cli, args: &PercolationArgs) -> Result<Report, Failure> {
    let format = output_format(
        cli,
        OutputFormat::Csv,
        &[OutputFormat::Json, OutputFormat::Csv],
    )?;
    let q = match (args.q, args.theta) {
        (Some(q), _) => q,
        (None, Some(t)) if t.is_finite() => q_of_theta(t),
        (None, t) => {
            return Err(Failure::schema(
                "invalid",
                Some("--theta".into()),
                format!("must be finite, got {t:?}"),
            ))
        }
    };
    let (lattice, shapes) = match args.lattice {
        LatticeArg::Chain => (Lattice::Chain, enumerate_1d(args.max_size)?),
        LatticeArg::Square => (Lattice::Square, enumerate_2d(args.max_size)?),
    };
    if args.merge_rotations && lattice == Lattice::Chain {
        return Err(Failure::usage(
            "--merge-rotations applies to the 2d lattice only",
        ));
    }
    let shapes = if args.merge_rotations {
        merge_rotations(&shapes)
    } else {
        shapes
    };
    let inst = build_instance(shapes, q).map_err(|e| Failure::from_library(e, ""))?;
    match format {
        OutputFormat::Csv => {
            let mut out = csv_line(["id", "s", "t", "c", "p"]);
            for (sh, &p) in inst.shapes.iter().zip(&inst.probabilities) {
                out.push_str(&csv_line([
                    sh.id.clone(),
                    sh.s.to_string(),
                    sh.t.to_string(),
                    sh.c.to_string(),
                    float(p),
                ]));
            }
            ok(out)
        }
        OutputFormat::Json => {
            let emb = percolation_as_solver_instance(&inst)?;
            let solved = distribution_for_theta(&emb.instance, &emb.theta)?;
            ok(to_json(&PercolationOutput {
                lattice,
                max_size: args.max_size,
                merged_rotations: args.merge_rotations,
                q: inst.q,
                theta: emb.theta.clone(),
                alpha: inst.alpha,
                tail_mass: inst.tail_mass,
                identity_residual: verify_family_identity(&inst),
                entropy: percolation_entropy(&inst),
                embedding_residual: solved.distribution.sup_distance(&emb.target),
                shapes: inst
                    .shapes
                    .iter()
                    .zip(&inst.probabilities)
                    .map(|(sh, &p)| ShapeRow {
                        id: sh.id.clone(),
                        s: sh.s,
                        t: sh.t,
                        c: sh.c,
                        p,
                    })
                    .collect(),
                instance: InstanceDoc::from_instance(&emb.instance),
            }))
        }
    }
}
