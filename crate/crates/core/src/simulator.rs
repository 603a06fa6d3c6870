//! Direct simulation of `u_t = Δu + b(x,t)·∇u + f(u)` in a channel aligned
//! with the propagation direction `k`, with level-set front tracking.
//!
//! The channel coordinate `s = k·x` runs over `[0, L]` with homogeneous
//! Neumann ends, except that exponential data `e^{−λ₀s}` keep that decay
//! rate as the right-end condition (the linearized solution ahead of the
//! front is exactly exponential); the transverse coordinate spans one spatial period and is
//! periodic. Space is discretized with second-order central differences,
//! time with Heun's method (a convex combination of forward Euler steps).
//! Under the step bound of [`ChannelGrid::max_dt`] every Euler step is
//! monotone, so the discrete maximum principle holds.

use std::io::Write;

use rayon::prelude::*;

use crate::error::{param, Error, Result};
use crate::fields::FieldSpec;
use crate::reactions::ReactionSpec;

/// Bound on `u` excursions outside `[0, 1]` before a run is rejected.
pub const MAX_PRINCIPLE_SLACK: f64 = 1e-6;
const CLAMP_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct ChannelGrid {
    dim: usize,
    length: usize,
    per_unit: usize,
    direction: [f64; 2],
    dt: Option<f64>,
    /// Minimum distance (in units) kept between a tracked edge and a channel end.
    pub buffer: f64,
    pub moving_window: bool,
}

impl ChannelGrid {
    /// `direction` must be a coordinate axis (`±e₁` or `±e₂`) so that the
    /// channel cross-section is exactly one period of the flow.
    pub fn new(dim: usize, length: usize, per_unit: usize, direction: &[f64]) -> Result<Self> {
        if dim != 1 && dim != 2 {
            return Err(param("dim", "channel dimension must be 1 or 2"));
        }
        if direction.len() != dim {
            return Err(param("direction", "dimension mismatch"));
        }
        let mut k = [0.0; 2];
        k[..dim].copy_from_slice(direction);
        let axis_aligned = k.iter().filter(|c| c.abs() == 1.0).count() == 1
            && k.iter().filter(|c| **c == 0.0).count() == 1;
        if !axis_aligned && !(dim == 1 && k[0].abs() == 1.0) {
            return Err(param(
                "direction",
                format!("channel needs an axis-aligned unit direction, got {k:?}"),
            ));
        }
        if length < 2 {
            return Err(param("length", "channel must be at least 2 units long"));
        }
        if per_unit < 4 {
            return Err(param("per_unit", "need at least 4 points per unit length"));
        }
        Ok(Self {
            dim,
            length,
            per_unit,
            direction: k,
            dt: None,
            buffer: 10.0,
            moving_window: false,
        })
    }

    pub fn with_dt(mut self, dt: f64) -> Self {
        self.dt = Some(dt);
        self
    }

    pub fn with_moving_window(mut self, on: bool) -> Self {
        self.moving_window = on;
        self
    }

    pub fn with_buffer(mut self, buffer: f64) -> Self {
        self.buffer = buffer;
        self
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn length(&self) -> f64 {
        self.length as f64
    }

    pub fn per_unit(&self) -> usize {
        self.per_unit
    }

    pub fn h(&self) -> f64 {
        1.0 / self.per_unit as f64
    }

    pub fn direction(&self) -> [f64; 2] {
        self.direction
    }

    /// Nodes along the channel, both ends included.
    pub fn n_long(&self) -> usize {
        self.length * self.per_unit + 1
    }

    pub fn n_trans(&self) -> usize {
        if self.dim == 2 {
            self.per_unit
        } else {
            1
        }
    }

    pub fn len(&self) -> usize {
        self.n_long() * self.n_trans()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn s(&self, i: usize) -> f64 {
        i as f64 * self.h()
    }

    /// Largest stable step: monotone Euler steps for diffusion plus
    /// reaction, and `dt ≤ min(h/(‖b‖ + c_est), 0.5/L_f)`.
    pub fn max_dt(&self, field_sup: f64, reaction: &ReactionSpec) -> f64 {
        let h = self.h();
        let lip = reaction.lipschitz_bound().max(1e-12);
        let c_est = 2.0 * lip.sqrt() + field_sup;
        let diffusion = 1.0 / (2.0 * self.dim as f64 / (h * h) + lip);
        diffusion.min(h / (field_sup + c_est)).min(0.5 / lip)
    }

    pub fn requested_dt(&self) -> Option<f64> {
        self.dt
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum InitialData {
    /// 1 behind `x0`, 0 ahead, mollified over two cells.
    Step { x0: f64 },
    /// `min(1, e^{−rate(s − x0)})`
    ExpDecay { rate: f64, x0: f64 },
    /// Plateau of height `(1 + m)/2 > m` on `[a1, a2]`, smooth unit-width ramps, zero outside.
    Bump { a1: f64, a2: f64, m: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct InitialState {
    pub values: Vec<f64>,
    pub kind: InitialData,
}

impl InitialState {
    fn two_sided(&self) -> bool {
        matches!(self.kind, InitialData::Bump { .. })
    }
}

fn smoothstep(w: f64) -> f64 {
    let w = w.clamp(0.0, 1.0);
    w * w * w * (w * (6.0 * w - 15.0) + 10.0)
}

pub fn make_initial(kind: InitialData, channel: &ChannelGrid) -> Result<InitialState> {
    let len = channel.length();
    let h = channel.h();
    let profile: Box<dyn Fn(f64) -> f64> = match kind {
        InitialData::Step { x0 } => {
            if !(x0 > 0.0 && x0 < len) {
                return Err(Error::Geometry(format!(
                    "step position {x0} outside channel [0, {len}]"
                )));
            }
            Box::new(move |s| ((x0 + h - s) / (2.0 * h)).clamp(0.0, 1.0))
        }
        InitialData::ExpDecay { rate, x0 } => {
            if !(x0 > 0.0 && x0 < len) {
                return Err(Error::Geometry(format!(
                    "decay origin {x0} outside channel [0, {len}]"
                )));
            }
            if !(rate > 0.0) {
                return Err(param("rate", "decay rate must be positive"));
            }
            Box::new(move |s| (-rate * (s - x0)).exp().min(1.0))
        }
        InitialData::Bump { a1, a2, m } => {
            if !(a1 - 1.0 > 0.0 && a2 + 1.0 < len && a1 < a2) {
                return Err(Error::Geometry(format!(
                    "bump [{a1}, {a2}] plus ramps does not fit in [0, {len}]"
                )));
            }
            if !(m > 0.0 && m < 1.0) {
                return Err(param("m", "plateau threshold must lie in (0, 1)"));
            }
            let height = 0.5 * (1.0 + m);
            Box::new(move |s| height * smoothstep(s - (a1 - 1.0)) * smoothstep(a2 + 1.0 - s))
        }
    };
    let row: Vec<f64> = (0..channel.n_long())
        .map(|i| profile(channel.s(i)))
        .collect();
    let mut values = Vec::with_capacity(channel.len());
    for _ in 0..channel.n_trans() {
        values.extend_from_slice(&row);
    }
    Ok(InitialState { values, kind })
}

/// Transverse mean of a channel state.
pub fn transverse_mean(state: &[f64], channel: &ChannelGrid) -> Vec<f64> {
    let (nl, nt) = (channel.n_long(), channel.n_trans());
    let mut mean = vec![0.0; nl];
    for row in state.chunks(nl) {
        for (m, v) in mean.iter_mut().zip(row) {
            *m += v;
        }
    }
    for m in &mut mean {
        *m /= nt as f64;
    }
    mean
}

/// Largest `s` with transverse mean `ū(s) ≥ level`, linearly interpolated,
/// in channel coordinates.
pub fn front_position(state: &[f64], channel: &ChannelGrid, level: f64) -> Result<f64> {
    let mean = transverse_mean(state, channel);
    let i = mean
        .iter()
        .rposition(|&v| v >= level)
        .ok_or(Error::FrontAbsent { level })?;
    if i + 1 == mean.len() {
        return Ok(channel.s(i));
    }
    let (a, b) = (mean[i], mean[i + 1]);
    Ok(channel.s(i) + channel.h() * (a - level) / (a - b))
}

/// Smallest `s` with `ū(s) ≥ level` (the trailing edge of a bump).
pub fn rear_position(state: &[f64], channel: &ChannelGrid, level: f64) -> Result<f64> {
    let mean = transverse_mean(state, channel);
    let i = mean
        .iter()
        .position(|&v| v >= level)
        .ok_or(Error::FrontAbsent { level })?;
    if i == 0 {
        return Ok(0.0);
    }
    let (a, b) = (mean[i - 1], mean[i]);
    Ok(channel.s(i) - channel.h() * (b - level) / (b - a))
}

/// Time stepper for one channel run.
#[derive(Debug)]
pub struct Simulator {
    field: FieldSpec,
    reaction: ReactionSpec,
    channel: ChannelGrid,
    initial: InitialData,
    state: Vec<f64>,
    stage: Vec<f64>,
    rhs: Vec<f64>,
    /// Velocity components along and across the channel on one unit cell.
    cell_s: Vec<f64>,
    cell_y: Vec<f64>,
    cell_time: f64,
    time: f64,
    dt: f64,
    /// Whole periods the window has been shifted by.
    offset: usize,
    u_min: f64,
    u_max: f64,
}

impl Simulator {
    pub fn new(
        initial: &InitialState,
        field: &FieldSpec,
        reaction: &ReactionSpec,
        channel: &ChannelGrid,
    ) -> Result<Self> {
        field.validate()?;
        reaction.validate()?;
        if channel.dim() == 1 && !field.is_zero() {
            return Err(param(
                "field",
                "only the zero field is admissible in one dimension",
            ));
        }
        if initial.values.len() != channel.len() {
            return Err(Error::Shape {
                expected: channel.len(),
                actual: initial.values.len(),
            });
        }
        let cell = crate::grid::CellGrid::new(2, 8, 16).expect("fixed grid");
        let field_sup = if field.is_zero() {
            0.0
        } else {
            field.sup_norm(&cell) * 1.1
        };
        let max_dt = channel.max_dt(field_sup, reaction);
        let dt = match channel.requested_dt() {
            Some(dt) if dt > max_dt => {
                return Err(Error::Stability {
                    reason: format!("dt = {dt} exceeds the monotonicity bound"),
                    suggested_dt: max_dt,
                })
            }
            Some(dt) => dt,
            None => 0.9 * max_dt,
        };
        let n_cell = channel.per_unit() * channel.n_trans();
        let mut sim = Self {
            field: field.clone(),
            reaction: reaction.clone(),
            channel: channel.clone(),
            initial: initial.kind,
            state: initial.values.clone(),
            stage: vec![0.0; channel.len()],
            rhs: vec![0.0; channel.len()],
            cell_s: vec![0.0; n_cell],
            cell_y: vec![0.0; n_cell],
            cell_time: f64::NAN,
            time: 0.0,
            dt,
            offset: 0,
            u_min: f64::INFINITY,
            u_max: f64::NEG_INFINITY,
        };
        sim.track_range();
        Ok(sim)
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn state(&self) -> &[f64] {
        &self.state
    }

    pub fn channel(&self) -> &ChannelGrid {
        &self.channel
    }

    /// Channel-coordinate origin in the unbounded direction, in units.
    pub fn offset(&self) -> f64 {
        self.offset as f64
    }

    /// Extremes of `u` (before clamping) since the last call.
    pub fn take_range(&mut self) -> (f64, f64) {
        let out = (self.u_min, self.u_max);
        self.u_min = f64::INFINITY;
        self.u_max = f64::NEG_INFINITY;
        out
    }

    fn track_range(&mut self) {
        for &v in &self.state {
            self.u_min = self.u_min.min(v);
            self.u_max = self.u_max.max(v);
        }
    }

    fn sample_cell(&mut self, t: f64) {
        if t == self.cell_time {
            return;
        }
        let [k1, k2] = self.channel.direction();
        let perp = [-k2, k1];
        let (n, nt) = (self.channel.per_unit(), self.channel.n_trans());
        let h = self.channel.h();
        for j in 0..nt {
            for i in 0..n {
                let (s, y) = (i as f64 * h, j as f64 * h);
                let x = [s * k1 + y * perp[0], s * k2 + y * perp[1]];
                let b = self.field.evaluate(x, t);
                self.cell_s[j * n + i] = b[0] * k1 + b[1] * k2;
                self.cell_y[j * n + i] = b[0] * perp[0] + b[1] * perp[1];
            }
        }
        self.cell_time = t;
    }

    /// `rhs = Δu + b·∇u + f(u)` for `u = src` at time `t`.
    fn evaluate_rhs(&mut self, from_stage: bool, t: f64) {
        self.sample_cell(t);
        let (nl, nt) = (self.channel.n_long(), self.channel.n_trans());
        let per_unit = self.channel.per_unit();
        let h = self.channel.h();
        let inv_h2 = 1.0 / (h * h);
        let inv_2h = 0.5 / h;
        let src = if from_stage { &self.stage } else { &self.state };
        let advected = !self.field.is_zero();
        let (cell_s, cell_y) = (&self.cell_s, &self.cell_y);
        let reaction = &self.reaction;
        let tail_ghost = match self.initial {
            InitialData::ExpDecay { rate, .. } => (-2.0 * rate * h).exp(),
            _ => 1.0,
        };
        self.rhs
            .par_chunks_mut(nl)
            .enumerate()
            .for_each(|(j, out)| {
                let row = &src[j * nl..(j + 1) * nl];
                let (up, down) = if nt > 1 {
                    let jp = (j + 1) % nt;
                    let jm = (j + nt - 1) % nt;
                    (
                        Some(&src[jp * nl..(jp + 1) * nl]),
                        Some(&src[jm * nl..(jm + 1) * nl]),
                    )
                } else {
                    (None, None)
                };
                for i in 0..nl {
                    let u = row[i];
                    let left = if i == 0 { row[1] } else { row[i - 1] };
                    let right = if i + 1 == nl {
                        row[nl - 2] * tail_ghost
                    } else {
                        row[i + 1]
                    };
                    let mut value = (left - 2.0 * u + right) * inv_h2 + reaction.eval(u);
                    if let (Some(up), Some(down)) = (up, down) {
                        value += (up[i] - 2.0 * u + down[i]) * inv_h2;
                        if advected {
                            let c = j * per_unit + i % per_unit;
                            value += cell_s[c] * (right - left) * inv_2h
                                + cell_y[c] * (up[i] - down[i]) * inv_2h;
                        }
                    } else if advected {
                        value += cell_s[i % per_unit] * (right - left) * inv_2h;
                    }
                    out[i] = value;
                }
            });
    }

    fn step(&mut self) -> Result<()> {
        let dt = self.dt;
        let t = self.time;
        self.evaluate_rhs(false, t);
        for ((s, u), f) in self.stage.iter_mut().zip(&self.state).zip(&self.rhs) {
            *s = u + dt * f;
        }
        self.evaluate_rhs(true, t + dt);
        for ((u, s), f) in self.state.iter_mut().zip(&self.stage).zip(&self.rhs) {
            *u = 0.5 * (*u + s + dt * f);
        }
        self.time += dt;
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for u in &mut self.state {
            lo = lo.min(*u);
            hi = hi.max(*u);
            *u = u.clamp(-CLAMP_SLACK, 1.0 + CLAMP_SLACK);
        }
        self.u_min = self.u_min.min(lo);
        self.u_max = self.u_max.max(hi);
        if lo < -MAX_PRINCIPLE_SLACK
            || hi > 1.0 + MAX_PRINCIPLE_SLACK
            || !lo.is_finite()
            || !hi.is_finite()
        {
            return Err(Error::Stability {
                reason: format!(
                    "maximum principle violated at t = {:.4}: u in [{lo:.3e}, {hi:.6}]",
                    self.time
                ),
                suggested_dt: 0.5 * dt,
            });
        }
        Ok(())
    }

    /// Advances by `steps` time steps.
    pub fn advance(&mut self, steps: usize) -> Result<()> {
        for _ in 0..steps {
            self.step()?;
        }
        Ok(())
    }

    /// Shifts the window by whole periods so the front sits a third of the
    /// way along, leaving room for the leading edge; returns the number of
    /// units shifted.
    fn recenter(&mut self, front: f64) -> usize {
        let shift = (front - self.channel.length() / 3.0).floor();
        if shift < 1.0 {
            return 0;
        }
        let p = shift as usize;
        let (nl, per_unit) = (self.channel.n_long(), self.channel.per_unit());
        let cut = p * per_unit;
        let tail = self.tail_factor();
        for row in self.state.chunks_mut(nl) {
            row.copy_within(cut.., 0);
            for i in nl - cut..nl {
                // One period ahead of a period-periodic exponential tail.
                row[i] = row[i - per_unit] * tail;
            }
        }
        self.offset += p;
        p
    }

    fn tail_factor(&self) -> f64 {
        match self.initial {
            InitialData::ExpDecay { rate, .. } => (-rate).exp(),
            _ => 0.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpeedFit {
    pub speed: f64,
    pub stderr: f64,
    pub window: (f64, f64),
    pub samples: usize,
    /// Slope over the later half of the window minus the earlier half.
    pub drift: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct FrontTrace {
    pub times: Vec<f64>,
    /// Level-1/2 crossing of the leading edge, in absolute coordinates along `k`.
    pub right: Vec<f64>,
    /// Trailing edge for bump runs.
    pub left: Option<Vec<f64>>,
    pub u_min: Vec<f64>,
    pub u_max: Vec<f64>,
    /// Fit over the default window, when enough samples exist.
    pub fit: Option<SpeedFit>,
}

impl FrontTrace {
    pub fn write_csv<W: Write>(&self, mut out: W, comments: &[String]) -> Result<()> {
        for c in comments {
            writeln!(out, "# {c}")?;
        }
        match &self.left {
            Some(_) => writeln!(out, "t,x_front_right,x_front_left,u_min,u_max")?,
            None => writeln!(out, "t,x_front_right,u_min,u_max")?,
        }
        for k in 0..self.times.len() {
            write!(out, "{:.10e},{:.10e}", self.times[k], self.right[k])?;
            if let Some(left) = &self.left {
                write!(out, ",{:.10e}", left[k])?;
            }
            writeln!(out, ",{:.10e},{:.10e}", self.u_min[k], self.u_max[k])?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct SimulationOutput {
    pub trace: FrontTrace,
    pub state: Vec<f64>,
    /// Absolute coordinate of channel node 0.
    pub offset: f64,
    pub dt: f64,
}

impl SimulationOutput {
    /// `s,y,u` rows of the final state (`s,u` in one dimension).
    pub fn write_state_csv<W: Write>(&self, channel: &ChannelGrid, mut out: W) -> Result<()> {
        let nl = channel.n_long();
        if channel.dim() == 1 {
            writeln!(out, "s,u")?;
        } else {
            writeln!(out, "s,y,u")?;
        }
        for (j, row) in self.state.chunks(nl).enumerate() {
            for (i, u) in row.iter().enumerate() {
                let s = self.offset + channel.s(i);
                if channel.dim() == 1 {
                    writeln!(out, "{s:.10e},{u:.10e}")?;
                } else {
                    writeln!(out, "{s:.10e},{:.10e},{u:.10e}", j as f64 * channel.h())?;
                }
            }
        }
        Ok(())
    }
}

/// Runs to `t_end`, sampling the front every `sample_every` time units.
/// The time step is shrunk so that samples fall exactly on step boundaries.
pub fn evolve(
    initial: &InitialState,
    field: &FieldSpec,
    reaction: &ReactionSpec,
    channel: &ChannelGrid,
    t_end: f64,
    sample_every: f64,
) -> Result<SimulationOutput> {
    if !(t_end > 0.0 && sample_every > 0.0 && sample_every <= t_end) {
        return Err(param("t_end", "need 0 < sample_every <= t_end"));
    }
    let mut sim = Simulator::new(initial, field, reaction, channel)?;
    let steps_per_sample = (sample_every / sim.dt).ceil() as usize;
    sim.dt = sample_every / steps_per_sample as f64;
    let samples = (t_end / sample_every).round() as usize;
    let two_sided = initial.two_sided();
    let length = channel.length();
    let mut trace = FrontTrace {
        left: two_sided.then(Vec::new),
        ..FrontTrace::default()
    };
    let record = |sim: &mut Simulator, trace: &mut FrontTrace, k: usize| -> Result<()> {
        let mut right = front_position(sim.state(), channel, 0.5)?;
        if channel.moving_window && !two_sided && sim.recenter(right) > 0 {
            right = front_position(sim.state(), channel, 0.5)?;
        }
        if right > length - channel.buffer {
            return Err(Error::Geometry(format!(
                "leading edge at {right:.3} entered the end buffer at sample {k} (t = {:.3})",
                sim.time()
            )));
        }
        if let Some(left) = trace.left.as_mut() {
            let rear = rear_position(sim.state(), channel, 0.5)?;
            if rear < channel.buffer {
                return Err(Error::Geometry(format!(
                    "trailing edge at {rear:.3} entered the end buffer at sample {k} (t = {:.3})",
                    sim.time()
                )));
            }
            left.push(sim.offset() + rear);
        }
        let (lo, hi) = sim.take_range();
        trace.times.push(sim.time());
        trace.right.push(sim.offset() + right);
        trace.u_min.push(lo);
        trace.u_max.push(hi);
        Ok(())
    };
    record(&mut sim, &mut trace, 0)?;
    for k in 1..=samples {
        sim.advance(steps_per_sample)?;
        sim.time = k as f64 * sample_every;
        record(&mut sim, &mut trace, k)?;
    }
    trace.fit = estimate_speed(&trace, default_window(&trace)).ok();
    Ok(SimulationOutput {
        trace,
        offset: sim.offset(),
        dt: sim.dt,
        state: sim.state,
    })
}

/// The last half of the run, aligned to whole time periods when possible.
pub fn default_window(trace: &FrontTrace) -> (f64, f64) {
    let (first, last) = match (trace.times.first(), trace.times.last()) {
        (Some(&a), Some(&b)) => (a, b),
        _ => return (0.0, 0.0),
    };
    let end = (last + 1e-9).floor();
    let span = ((end - first) / 2.0).floor();
    if span >= 1.0 {
        (end - span, end)
    } else {
        (0.5 * (first + last), last)
    }
}

fn least_squares(points: &[(f64, f64)]) -> (f64, f64) {
    let n = points.len() as f64;
    let tm = points.iter().map(|p| p.0).sum::<f64>() / n;
    let xm = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - tm).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - tm) * (p.1 - xm)).sum();
    let slope = sxy / sxx;
    let ssr: f64 = points
        .iter()
        .map(|p| (p.1 - xm - slope * (p.0 - tm)).powi(2))
        .sum();
    let stderr = if points.len() > 2 {
        (ssr / (n - 2.0) / sxx).sqrt()
    } else {
        0.0
    };
    (slope, stderr)
}

fn fit_series(times: &[f64], positions: &[f64], window: (f64, f64)) -> Result<SpeedFit> {
    let eps = 1e-9;
    let points: Vec<(f64, f64)> = times
        .iter()
        .zip(positions)
        .filter(|(t, _)| **t >= window.0 - eps && **t <= window.1 + eps)
        .map(|(&t, &x)| (t, x))
        .collect();
    if points.len() < 10 {
        return Err(Error::InsufficientData {
            needed: 10,
            found: points.len(),
        });
    }
    let (speed, stderr) = least_squares(&points);
    let half = points.len() / 2;
    let drift = if half >= 3 {
        least_squares(&points[half..]).0 - least_squares(&points[..=half]).0
    } else {
        0.0
    };
    Ok(SpeedFit {
        speed,
        stderr,
        window,
        samples: points.len(),
        drift,
    })
}

/// Least-squares slope of the leading-edge positions over `window`.
pub fn estimate_speed(trace: &FrontTrace, window: (f64, f64)) -> Result<SpeedFit> {
    fit_series(&trace.times, &trace.right, window)
}

/// `(c_left, c_right)`: speeds of the trailing edge (towards `−k`) and the
/// leading edge (towards `k`) of a bump run over the default window.
pub fn spreading_interval(trace: &FrontTrace) -> Result<(SpeedFit, SpeedFit)> {
    let left = trace
        .left
        .as_ref()
        .ok_or_else(|| param("trace", "spreading interval needs a two-sided (bump) run"))?;
    let window = default_window(trace);
    let negated: Vec<f64> = left.iter().map(|x| -x).collect();
    Ok((
        fit_series(&trace.times, &negated, window)?,
        estimate_speed(trace, window)?,
    ))
}

/// One exponential-data run per decay rate, concurrently.
pub fn decay_speed_sweep(
    field: &FieldSpec,
    reaction: &ReactionSpec,
    channel: &ChannelGrid,
    rates: &[f64],
    x0: f64,
    t_end: f64,
    sample_every: f64,
) -> Result<Vec<(f64, SpeedFit)>> {
    if rates.iter().any(|&r| !(r > 0.0)) {
        return Err(param("rates", "decay rates must be positive"));
    }
    rates
        .par_iter()
        .map(|&rate| {
            let init = make_initial(InitialData::ExpDecay { rate, x0 }, channel)?;
            let out = evolve(&init, field, reaction, channel, t_end, sample_every)?;
            let fit = out.trace.fit.ok_or(Error::InsufficientData {
                needed: 10,
                found: out.trace.times.len(),
            })?;
            Ok((rate, fit))
        })
        .collect()
}
