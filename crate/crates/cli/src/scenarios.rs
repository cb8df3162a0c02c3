//! Turns a validated config into a packet, a grid and a result table.

use toa_core::asymptotics::{
    asym_current, asym_positive_current, interference_period, negative_flux_condition,
    semiclassical_scan, TwoPacketParams,
};
use toa_core::observables::{
    arrival_distribution, current_expectation, current_series, mean_time_ab_operator,
    mean_time_current, mean_time_grt_operator, mean_time_spectral, wigner_current_check,
};
use toa_core::oscquad::{choose_grid_with, GridOptions};
use toa_core::packets::{
    build_amplitude, Direction, GaussianComponent, MomentumAmplitude, PhysicalConstants,
    WavePacketSpec,
};
use toa_core::scattering::TransmissionModel;

use crate::config::{Barrier, Config, ScenarioKind};
use crate::error::CliError;
use crate::output::{Table, Value};

/// A config with every default and derived grid setting filled in.
pub struct Prepared {
    pub config: Config,
    pub constants: PhysicalConstants,
    pub amplitude: MomentumAmplitude,
}

impl Prepared {
    pub fn resolved_toml(&self) -> Result<String, CliError> {
        toml::to_string(&self.config)
            .map_err(|e| CliError::Compute(format!("serializing config: {e}")))
    }
}

fn default_tau_max(cfg: &Config) -> f64 {
    match cfg.kind {
        ScenarioKind::Semiclassical => cfg.semiclassical.as_ref().map_or(0.0, |s| s.tau.abs()),
        ScenarioKind::WignerCheck => cfg
            .wigner
            .as_ref()
            .map_or(0.0, |w| w.taus.iter().fold(0.0, |m, t| m.max(t.abs()))),
        _ => cfg.tau.map_or(0.0, |t| t.start.abs().max(t.end.abs())),
    }
}

pub fn prepare(cfg: &Config) -> Result<Prepared, CliError> {
    let mut config = cfg.clone();
    config.output = Some(cfg.output_name());
    let constants = PhysicalConstants::new(cfg.constants.hbar, cfg.constants.mass)
        .map_err(|e| CliError::from_setup("constants", e))?;
    let components = cfg
        .packet
        .component
        .iter()
        .enumerate()
        .map(|(i, c)| {
            GaussianComponent::new(c.weight, c.center, c.spread, c.origin)
                .map_err(|e| CliError::from_setup(&format!("packet.component[{i}]"), e))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let direction = Direction::from_sign(cfg.packet.direction)
        .ok_or_else(|| CliError::Config("packet.direction: must be 1 or -1".into()))?;
    let spec = WavePacketSpec::with_tail_tol(components, direction, cfg.tolerances.tail)
        .map_err(|e| CliError::from_setup("packet", e))?;

    let tau_max = cfg.grid.tau_max.unwrap_or_else(|| default_tau_max(cfg));
    // a smaller effective hbar makes every phase proportionally steeper
    let grid_constants = match (&cfg.kind, &cfg.semiclassical) {
        (ScenarioKind::Semiclassical, Some(s)) => {
            let s_min = s.scales.iter().copied().fold(1.0, f64::min);
            PhysicalConstants::new(constants.hbar() * s_min, constants.mass())
                .map_err(|e| CliError::from_setup("semiclassical.scales", e))?
        }
        _ => constants,
    };
    let defaults = GridOptions::default();
    let opts = GridOptions {
        n_min: cfg.grid.nodes.unwrap_or(defaults.n_min),
        n_max: cfg.grid.max_nodes.unwrap_or(defaults.n_max),
    };
    let grid = choose_grid_with(&spec, tau_max, cfg.detector, grid_constants, opts)
        .map_err(|e| CliError::from_setup("grid", e))?;
    config.grid.nodes = Some(grid.len());
    config.grid.max_nodes = Some(opts.n_max);
    config.grid.tau_max = Some(tau_max);
    if cfg.kind == ScenarioKind::NegativeFlux && config.negative_flux.is_none() {
        config.negative_flux = Some(Default::default());
    }

    let amplitude =
        build_amplitude(&spec, &grid, constants).map_err(|e| CliError::from_setup("packet", e))?;
    if !amplitude.satisfies_edge_decay(cfg.tolerances.edge) {
        return Err(CliError::Config(format!(
            "tolerances.edge: packet edge ratio {:e} on the grid exceeds {:e}",
            amplitude.edge_ratio(),
            cfg.tolerances.edge
        )));
    }
    Ok(Prepared {
        config,
        constants,
        amplitude,
    })
}

fn grid_diagnostics(t: &mut Table, a: &MomentumAmplitude) {
    let g = a.grid();
    t.diag("grid_p_min", g.p_min());
    t.diag("grid_p_max", g.p_max());
    t.diag("grid_nodes", g.len());
}

pub fn run(p: &Prepared) -> Result<Table, CliError> {
    run_kind(p).map_err(|e| match e {
        CliError::Compute(msg) => {
            CliError::Compute(format!("{} scenario: {msg}", p.config.kind.name()))
        }
        other => other,
    })
}

fn run_kind(p: &Prepared) -> Result<Table, CliError> {
    let cfg = &p.config;
    let mut table = match cfg.kind {
        ScenarioKind::Density => density(&p.amplitude, cfg)?,
        ScenarioKind::Currents => currents(&p.amplitude, cfg)?,
        ScenarioKind::Means => means(&p.amplitude, cfg)?,
        ScenarioKind::NegativeFlux => negative_flux(p)?,
        ScenarioKind::Semiclassical => semiclassical(&p.amplitude, cfg)?,
        ScenarioKind::Barrier => barrier(p)?,
        ScenarioKind::WignerCheck => wigner_check(&p.amplitude, cfg)?,
    };
    let mut diags = Vec::new();
    std::mem::swap(&mut diags, &mut table.diagnostics);
    grid_diagnostics(&mut table, &p.amplitude);
    table.diagnostics.extend(diags);
    Ok(table)
}

fn window(cfg: &Config) -> ((f64, f64), usize) {
    let t = cfg.tau.expect("validated: tau window present");
    ((t.start, t.end), t.count)
}

fn density_table(a: &MomentumAmplitude, cfg: &Config) -> Result<Table, CliError> {
    let (w, n) = window(cfg);
    let d = arrival_distribution(a, w, n, cfg.detector).map_err(CliError::compute)?;
    let mut t = Table::new(&["tau", "re_amplitude", "im_amplitude", "density"]);
    t.diag("integral", d.integral());
    for ((tau, z), rho) in d.tau_nodes.iter().zip(&d.amplitudes).zip(&d.densities) {
        t.row(vec![(*tau).into(), z.re.into(), z.im.into(), (*rho).into()]);
    }
    Ok(t)
}

fn density(a: &MomentumAmplitude, cfg: &Config) -> Result<Table, CliError> {
    density_table(a, cfg)
}

fn currents(a: &MomentumAmplitude, cfg: &Config) -> Result<Table, CliError> {
    let (w, n) = window(cfg);
    let s = current_series(a, w, n, cfg.detector).map_err(CliError::compute)?;
    let h = s.spacing();
    let trap = |v: &[f64]| {
        let inner: f64 = v[1..v.len() - 1].iter().sum();
        h * (inner + 0.5 * (v[0] + v[v.len() - 1]))
    };
    let mut t = Table::new(&["tau", "j", "j_plus"]);
    t.diag("j_total", trap(&s.j_values));
    t.diag("j_plus_total", trap(&s.jplus_values));
    t.diag(
        "j_min",
        s.j_values.iter().copied().fold(f64::INFINITY, f64::min),
    );
    for ((tau, j), jp) in s.tau_nodes.iter().zip(&s.j_values).zip(&s.jplus_values) {
        t.row(vec![(*tau).into(), (*j).into(), (*jp).into()]);
    }
    Ok(t)
}

fn means(a: &MomentumAmplitude, cfg: &Config) -> Result<Table, CliError> {
    let (w, n) = window(cfg);
    let x = cfg.detector;
    let d = arrival_distribution(a, w, n, x).map_err(CliError::compute)?;
    let spectral = mean_time_spectral(&d).map_err(CliError::compute)?;
    let current = mean_time_current(a, w, n, x).map_err(CliError::compute)?;
    let ab = mean_time_ab_operator(a, x).map_err(CliError::compute)?;
    let grt = mean_time_grt_operator(a, x).map_err(CliError::compute)?;
    let mut t = Table::new(&["route", "value", "deviation_from_spectral"]);
    t.diag("ab_imag_residue", ab.imag_residue);
    t.diag("grt_imag_residue", grt.imag_residue);
    for (route, v) in [
        ("spectral", spectral),
        ("current", current),
        ("ab_operator", ab.value),
        ("grt_operator", grt.value),
    ] {
        t.row(vec![
            route.into(),
            v.into(),
            ((v - spectral) / spectral).into(),
        ]);
    }
    Ok(t)
}

fn two_packet_params(p: &Prepared) -> Result<TwoPacketParams, CliError> {
    let mut comps = p.config.packet.component.clone();
    comps.sort_by(|a, b| a.center.total_cmp(&b.center));
    let norm = comps[0].weight.hypot(comps[1].weight);
    TwoPacketParams::new(
        comps[0].weight / norm,
        comps[1].weight / norm,
        comps[0].center,
        comps[1].center,
        comps[0].spread,
        comps[0].origin,
        p.constants,
    )
    .map_err(|e| CliError::from_setup("packet.component", e))
}

fn negative_flux(p: &Prepared) -> Result<Table, CliError> {
    let cfg = &p.config;
    let params = two_packet_params(p)?;
    let margin = cfg.negative_flux.unwrap_or_default().margin;
    let d = negative_flux_condition(&params, margin).map_err(CliError::compute)?;
    let (w, n) = window(cfg);
    let x = cfg.detector;
    let s = current_series(&p.amplitude, w, n, x).map_err(CliError::compute)?;

    let mut t = Table::new(&["tau", "j", "j_plus", "j_asym", "j_plus_asym"]);
    t.diag("alpha1", params.alpha1());
    t.diag("alpha2", params.alpha2());
    t.diag("ratio1", d.ratio1);
    t.diag("ratio2", d.ratio2);
    t.diag("margin", d.margin);
    t.diag("condition_satisfied", d.satisfied);
    t.diag("min_current_estimate", d.min_current_estimate);
    t.diag("interference_period", interference_period(&params));
    t.diag(
        "j_min",
        s.j_values.iter().copied().fold(f64::INFINITY, f64::min),
    );
    t.diag(
        "j_plus_min",
        s.jplus_values.iter().copied().fold(f64::INFINITY, f64::min),
    );
    for ((tau, j), jp) in s.tau_nodes.iter().zip(&s.j_values).zip(&s.jplus_values) {
        t.row(vec![
            (*tau).into(),
            (*j).into(),
            (*jp).into(),
            asym_current(&params, *tau, x).into(),
            asym_positive_current(&params, *tau, x).into(),
        ]);
    }
    Ok(t)
}

fn semiclassical(a: &MomentumAmplitude, cfg: &Config) -> Result<Table, CliError> {
    let s = cfg
        .semiclassical
        .as_ref()
        .expect("validated: semiclassical section present");
    let rows = semiclassical_scan(a, s.tau, cfg.detector, &s.scales).map_err(CliError::compute)?;
    let mut t = Table::new(&[
        "scale",
        "p0",
        "exact_density",
        "asym_density",
        "abs_error",
        "rel_error",
    ]);
    for (i, r) in rows.iter().enumerate() {
        match &r.outcome {
            Ok(pt) => t.row(vec![
                r.scale.into(),
                pt.p0.into(),
                pt.exact_density.into(),
                pt.asym_density.into(),
                pt.abs_error.into(),
                (pt.abs_error / pt.exact_density).into(),
            ]),
            Err(e) => t.diag(format!("scale[{i}].error"), e.to_string()),
        }
    }
    if t.rows.is_empty() {
        return Err(CliError::Compute(
            "semiclassical scan failed at every scale".into(),
        ));
    }
    Ok(t)
}

fn barrier(p: &Prepared) -> Result<Table, CliError> {
    let cfg = &p.config;
    let c = p.constants;
    let model = match cfg.barrier.expect("validated: barrier section present") {
        Barrier::Free => Ok(TransmissionModel::free(c)),
        Barrier::Delta { strength } => TransmissionModel::delta_barrier(strength, c),
        Barrier::Rectangular { height, width } => {
            TransmissionModel::rectangular_barrier(height, width, c)
        }
    }
    .map_err(|e| CliError::from_setup("barrier", e))?;
    let (transmitted, norm) = model.transmit(&p.amplitude).map_err(CliError::compute)?;
    let mut t = density_table(&transmitted, cfg)?;
    t.diagnostics
        .insert(0, ("transmitted_norm".into(), Value::Num(norm)));
    Ok(t)
}

fn wigner_check(a: &MomentumAmplitude, cfg: &Config) -> Result<Table, CliError> {
    let w = cfg
        .wigner
        .as_ref()
        .expect("validated: wigner section present");
    let x = cfg.detector;
    let mut t = Table::new(&["tau", "current_direct", "current_wigner", "abs_diff"]);
    let mut worst: f64 = 0.0;
    for &tau in &w.taus {
        let direct = current_expectation(a, tau, x).map_err(CliError::compute)?;
        let wigner = wigner_current_check(a, tau, x).map_err(CliError::compute)?;
        let diff = (direct - wigner).abs();
        worst = worst.max(diff);
        t.row(vec![tau.into(), direct.into(), wigner.into(), diff.into()]);
    }
    t.diag("max_abs_diff", worst);
    Ok(t)
}
