//! One function per subcommand. Each returns the report lines and whether
//! every check passed; CSVs are written as a side effect.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use frontspeed::dispersion::{
    convexity_check, lambda_for_speed, minimal_speed, regularized_minimal_speed, sample_curve,
    SpeedProblem, SpeedResult,
};
use frontspeed::eigensolver::{principal_eigenvalue, random_trial, rayleigh_upper_bound};
use frontspeed::fields::{divergence_residual, mean_residual};
use frontspeed::reactions::{heinze_lower_bound, kpp_bound_check};
use frontspeed::simulator::{
    decay_speed_sweep, estimate_speed, evolve, make_initial, spreading_interval, SimulationOutput,
    SpeedFit,
};
use frontspeed::ReactionSpec;

use crate::config::{linspace, InitialName, RunConfig};
use crate::output::{out_dir, provenance, sha256_hex, write_atomic};
use crate::{CliError, Command};

#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub name: &'static str,
    pub lines: Vec<String>,
    pub passed: bool,
}

impl Outcome {
    fn new(name: &'static str) -> Self {
        Self {
            name,
            lines: Vec::new(),
            passed: true,
        }
    }

    fn check(&mut self, ok: bool, line: String) {
        self.passed &= ok;
        self.lines
            .push(format!("{line} {}", if ok { "PASS" } else { "FAIL" }));
    }

    fn info(&mut self, line: String) {
        self.lines.push(line);
    }
}

pub fn dispatch(command: Command, config: &RunConfig) -> Result<Outcome, CliError> {
    match command {
        Command::Validate => cmd_validate(config),
        Command::Dispersion => cmd_dispersion(config),
        Command::Speed => cmd_speed(config),
        Command::Simulate => cmd_simulate(config),
        Command::Compare => cmd_compare(config),
    }
}

fn fmt_vec(v: &[f64]) -> String {
    let parts: Vec<String> = v.iter().map(|x| format!("{x}")).collect();
    format!("({})", parts.join(","))
}

fn speed_problem(config: &RunConfig) -> Result<SpeedProblem, CliError> {
    let field = config.field_spec()?;
    let reaction = config.reaction_spec()?;
    reaction.validate()?;
    let eigen = config.eigen();
    Ok(SpeedProblem::new(
        field,
        reaction.slope_at_zero(),
        &config.direction()?,
        config.cell_grid()?,
    )?
    .with_max_iter(eigen.max_iter))
}

fn cell_details(config: &RunConfig, problem: &SpeedProblem) -> String {
    let k = problem.direction();
    format!(
        "cell={} eigen_tol={:e} k={} field={}",
        problem.grid(),
        config.eigen().tol,
        fmt_vec(&k[..problem.grid().dim()]),
        field_label(config)
    )
}

fn field_label(config: &RunConfig) -> String {
    match &config.field {
        Some(b) => format!("{:?}(A={},eps_t={})", b.kind, b.amplitude, b.eps_t).to_lowercase(),
        None => "none".into(),
    }
}

pub fn cmd_validate(config: &RunConfig) -> Result<Outcome, CliError> {
    let mut out = Outcome::new("validate");
    let settings = config.validate();
    let k = config.direction()?;
    let norm = k.iter().map(|c| c * c).sum::<f64>().sqrt();
    if (norm - 1.0).abs() > 1e-12 {
        out.check(false, format!("direction not unit: |k| = {norm:.6}"));
    } else {
        out.check(true, format!("direction k = {}", fmt_vec(&k)));
    }

    let field = config.field_spec()?;
    field.validate()?;
    let grid = config.cell_grid()?;
    let div = divergence_residual(&field, &grid);
    out.check(
        div <= settings.divergence_tol,
        format!(
            "divergence_residual={div:.6e} tol={:e}",
            settings.divergence_tol
        ),
    );
    let mean = mean_residual(&field, &grid);
    let worst = mean.iter().fold(0.0f64, |a, b| a.max(b.abs()));
    out.check(
        worst <= settings.mean_tol,
        format!("mean_residual={worst:.6e} tol={:e}", settings.mean_tol),
    );

    let reaction = config.reaction_spec()?;
    reaction.validate()?;
    classify(&reaction, settings.kpp_samples, &mut out)?;

    if settings.trials > 0 && (norm - 1.0).abs() <= 1e-12 {
        let problem = speed_problem(config)?.eigenproblem(1.0);
        let eigen = config.eigen();
        let mu = principal_eigenvalue(&problem, eigen.tol, eigen.max_iter)?.mu;
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed.unwrap_or(0));
        let mut lowest = f64::INFINITY;
        for _ in 0..settings.trials {
            let psi = random_trial(&grid, &mut rng, 3, 0.5);
            lowest = lowest.min(rayleigh_upper_bound(&problem, &psi)?);
        }
        out.check(
            lowest >= mu - 1e-8,
            format!(
                "minmax_bound trials={} mu={mu:.10} min_bound={lowest:.10}",
                settings.trials
            ),
        );
    }
    Ok(out)
}

fn classify(reaction: &ReactionSpec, samples: usize, out: &mut Outcome) -> Result<(), CliError> {
    let slope = reaction.slope_at_zero();
    out.info(format!("f_prime_zero={slope:.6}"));
    if slope > 0.0 {
        let check = kpp_bound_check(reaction, samples)?;
        out.check(
            check.holds,
            format!(
                "kpp_bound f(u) <= u f'(0): worst={:.6e} at u={:.6}",
                check.worst_violation, check.at
            ),
        );
        out.info("classification=kpp".into());
    } else if reaction.is_ignition() {
        out.info("classification=ignition".into());
    } else {
        out.info("classification=positive".into());
    }
    out.info(format!(
        "heinze_lower_bound={:.6}",
        heinze_lower_bound(reaction)
    ));
    Ok(())
}

pub fn cmd_dispersion(config: &RunConfig) -> Result<Outcome, CliError> {
    let mut out = Outcome::new("dispersion");
    let problem = speed_problem(config)?;
    let block = config.dispersion();
    let lambdas = block
        .lambdas
        .clone()
        .unwrap_or_else(|| linspace(block.lambda_min, block.lambda_max, block.points));
    let tol = config.eigen().tol;
    let curve = sample_curve(&problem, &lambdas, tol)?;
    let mut csv = Vec::new();
    curve.write_csv(
        &mut csv,
        &[provenance(config, &cell_details(config, &problem))],
    )?;
    write_atomic(&out_dir(config).join("dispersion.csv"), &csv)?;
    out.info(format!("points={}", curve.points.len()));
    for p in curve.points.iter().filter(|p| !p.converged) {
        out.check(
            false,
            format!(
                "eigensolver did not converge at lambda={} after {} iterations",
                p.lambda, p.iterations
            ),
        );
    }
    if curve.all_converged() {
        out.check(true, format!("all points converged to tol={tol:e}"));
    }
    let report = convexity_check(&curve);
    out.check(
        report.passes(block.convexity_tol),
        format!(
            "convexity worst_violation={:.6e} at lambda={:.6} triples={} tol={:e}",
            report.worst_violation, report.at_lambda, report.triples, block.convexity_tol
        ),
    );
    out.info(format!("dispersion_csv_sha256={}", sha256_hex(&csv)));
    Ok(out)
}

fn speed_line(label: &str, res: &SpeedResult) -> String {
    format!(
        "{label}={:.6} lambda_star={:.6}",
        res.c_star, res.lambda_star
    )
}

pub fn cmd_speed(config: &RunConfig) -> Result<Outcome, CliError> {
    let mut out = Outcome::new("speed");
    let problem = speed_problem(config)?;
    let block = config.speed();
    let res = minimal_speed(&problem, block.tol)?;
    out.info(speed_line("c_star", &res));
    out.info(format!(
        "speed_tol={:.3e} eigen_tol={:.3e} evaluations={}",
        res.speed_tol, res.eigen_tol, res.evaluations
    ));
    if block.reverse {
        let back = minimal_speed(&problem.reversed(), block.tol)?;
        out.info(speed_line("c_star_reverse", &back));
    }
    for &eps in &block.epsilon {
        let reg = regularized_minimal_speed(&problem, eps, block.tol)?;
        out.info(format!(
            "c_star_eps[{eps}]={:.6} lambda_star_eps={:.6}",
            reg.c_star, reg.lambda_star
        ));
    }
    for &c in &block.speeds {
        let lambda = lambda_for_speed(&problem, &res, c)?;
        out.info(format!("lambda_c[{c}]={lambda:.6}"));
    }
    let stamp = match std::fs::read(out_dir(config).join("dispersion.csv")) {
        Ok(bytes) => sha256_hex(&bytes),
        Err(_) => "none".into(),
    };
    out.info(format!("dispersion_csv_sha256={stamp}"));
    Ok(out)
}

fn fit_line(label: &str, fit: &SpeedFit) -> String {
    format!(
        "{label}={:.6}±{:.6} window=[{},{}] samples={} drift={:.3e}",
        fit.speed, fit.stderr, fit.window.0, fit.window.1, fit.samples, fit.drift
    )
}

/// Result of a single (non-sweep) simulation run.
pub struct SimulationSummary {
    pub output: SimulationOutput,
    /// Leading-edge fit.
    pub right: SpeedFit,
    /// Trailing-edge fit (speed towards `−k`) for bump runs.
    pub left: Option<SpeedFit>,
}

fn simulate_once(config: &RunConfig) -> Result<SimulationSummary, CliError> {
    let block = config.simulate_block()?;
    let channel = config.channel_grid()?;
    let field = config.field_spec()?;
    let reaction = config.reaction_spec()?;
    let init = make_initial(block.initial_data(None)?, &channel)?;
    let output = evolve(
        &init,
        &field,
        &reaction,
        &channel,
        block.t_end,
        block.sample_every,
    )?;
    let (left, right) = if block.initial == InitialName::Bump {
        let (l, r) = spreading_interval(&output.trace)?;
        (Some(l), r)
    } else {
        let window = block
            .window
            .map(|w| (w[0], w[1]))
            .unwrap_or_else(|| frontspeed::simulator::default_window(&output.trace));
        (None, estimate_speed(&output.trace, window)?)
    };
    Ok(SimulationSummary {
        output,
        right,
        left,
    })
}

fn channel_details(config: &RunConfig, dt: f64) -> Result<String, CliError> {
    let ch = config.channel_grid()?;
    Ok(format!(
        "channel={}x{} per_unit={} dt={dt:.6e} k={} field={} moving_window={}",
        ch.length(),
        ch.dim(),
        ch.per_unit(),
        fmt_vec(&ch.direction()[..ch.dim()]),
        field_label(config),
        ch.moving_window
    ))
}

pub fn cmd_simulate(config: &RunConfig) -> Result<Outcome, CliError> {
    let mut out = Outcome::new("simulate");
    let block = config.simulate_block()?;
    if let (InitialName::Decay, Some(rates)) = (block.initial, &block.rates) {
        return decay_sweep(config, rates, out);
    }
    let run = simulate_once(config)?;
    let details = channel_details(config, run.output.dt)?;
    let mut csv = Vec::new();
    run.output
        .trace
        .write_csv(&mut csv, &[provenance(config, &details)])?;
    write_atomic(&out_dir(config).join("trace.csv"), &csv)?;
    let channel = config.channel_grid()?;
    let mut state = Vec::new();
    run.output.write_state_csv(&channel, &mut state)?;
    write_atomic(&out_dir(config).join("state.csv"), &state)?;

    out.info(fit_line("c_obs", &run.right));
    if let Some(left) = &run.left {
        out.info(format!(
            "(c_left, c_right) = ({:.6}, {:.6})",
            left.speed, run.right.speed
        ));
        out.info(fit_line("c_left", left));
    }
    let trace = &run.output.trace;
    let lo = trace.u_min.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = trace
        .u_max
        .iter()
        .cloned()
        .fold(f64::NEG_INFINITY, f64::max);
    out.check(
        lo >= -1e-12 && hi <= 1.0 + 1e-12,
        format!("u_range=[{lo:.3e}, {hi:.12}]"),
    );
    out.info(format!("trace_csv_sha256={}", sha256_hex(&csv)));
    Ok(out)
}

fn decay_sweep(config: &RunConfig, rates: &[f64], mut out: Outcome) -> Result<Outcome, CliError> {
    let block = config.simulate_block()?;
    let channel = config.channel_grid()?;
    let field = config.field_spec()?;
    let reaction = config.reaction_spec()?;
    let rows = decay_speed_sweep(
        &field,
        &reaction,
        &channel,
        rates,
        block.x0,
        block.t_end,
        block.sample_every,
    )?;
    let problem = speed_problem(config)?;
    let tol = config.eigen().tol;
    let speed = minimal_speed(&problem, config.speed().tol)?;
    let mut csv = Vec::new();
    let details = format!(
        "{} {}",
        cell_details(config, &problem),
        channel_details(config, 0.0)?
    );
    csv.extend_from_slice(format!("# {}\n", provenance(config, &details)).as_bytes());
    csv.extend_from_slice(b"lambda0,c_obs,stderr,c_pred\n");
    for (rate, fit) in &rows {
        let c_pred = if *rate < speed.lambda_star {
            problem.mu(*rate, tol)? / rate
        } else {
            speed.c_star
        };
        csv.extend_from_slice(
            format!(
                "{rate:.10e},{:.10e},{:.10e},{c_pred:.10e}\n",
                fit.speed, fit.stderr
            )
            .as_bytes(),
        );
        out.info(format!(
            "lambda0={rate} c_obs={:.6} c_pred={c_pred:.6}",
            fit.speed
        ));
    }
    write_atomic(&out_dir(config).join("decay_sweep.csv"), &csv)?;
    Ok(out)
}

pub fn cmd_compare(config: &RunConfig) -> Result<Outcome, CliError> {
    let mut out = Outcome::new("compare");
    if config.speed.is_none() || config.simulate.is_none() {
        return Err(CliError::Usage(
            "compare needs both [speed] and [simulate] blocks".into(),
        ));
    }
    if config.simulate_block()?.initial == InitialName::Decay {
        return Err(CliError::Usage("compare needs step or bump data".into()));
    }
    let problem = speed_problem(config)?;
    let block = config.speed();
    let problem = if block.reverse {
        problem.reversed()
    } else {
        problem
    };
    let res = minimal_speed(&problem, block.tol)?;
    let run = simulate_once(config)?;
    let gap = (run.right.speed - res.c_star).abs() / res.c_star;
    let tolerance = config.compare().tolerance;
    out.info(speed_line("c_star", &res));
    out.info(fit_line("c_obs", &run.right));
    out.check(
        gap <= tolerance,
        format!("gap={gap:.6} tolerance={tolerance}"),
    );
    Ok(out)
}
