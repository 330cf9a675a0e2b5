//! One runner per task. Grid points are evaluated on a worker pool and
//! collected in grid order, so the output never depends on the thread count.

use hybrid_plane::lead_green::LeadPoint;
use hybrid_plane::plane_green::{renormalized_scalar, spin_orbit_green, PlanePoint};
use hybrid_plane::scattering::{reflection_amplitude, ScatteringMomentum, ScatteringSolution};
use hybrid_plane::specfun::SpectralPoint;
use hybrid_plane::spectrum::{find_bound_states, reality_report, RootKind};
use num_complex::Complex64;
use rayon::prelude::*;
use rayon::ThreadPool;
use serde_json::{json, Map, Value};

use crate::config::{RunConfig, Task};
use crate::diagnostics::run_diagnostics;
use crate::error::{CliError, CliResult};
use crate::output::{json_float, Cell, Report, Table};

/// Energy on the grid as a spectral point: a zero imaginary offset means the
/// limit from the upper half-plane.
fn spectral_point(e: f64, imag: f64) -> SpectralPoint {
    if imag == 0.0 {
        SpectralPoint::above(e)
    } else {
        SpectralPoint::new(Complex64::new(e, imag))
    }
}

/// Maps `f` over `items` on `pool`; the first failure in grid order wins.
fn rows<T: Sync>(pool: &ThreadPool, items: &[T], f: impl Fn(&T) -> CliResult<Vec<Cell>> + Sync) -> CliResult<Vec<Vec<Cell>>> {
    let results: Vec<CliResult<Vec<Cell>>> = pool.install(|| items.par_iter().map(&f).collect());
    results.into_iter().collect()
}

fn complex_json(z: Complex64) -> Value {
    json!([json_float(z.re), json_float(z.im)])
}

pub fn run_task(cfg: &RunConfig, pool: &ThreadPool, seed: u64) -> CliResult<Report> {
    match cfg.task {
        Task::GreenPlane => green_plane(cfg, pool),
        Task::GreenRenorm => green_renorm(cfg, pool),
        Task::BoundStates => bound_states(cfg),
        Task::ReflectSweep => reflect_sweep(cfg, pool),
        Task::StateDump => state_dump(cfg, pool),
        Task::Diagnostics => run_diagnostics(pool, seed),
    }
}

fn green_plane(cfg: &RunConfig, pool: &ThreadPool) -> CliResult<Report> {
    let (energies, x1s, x2s) = (cfg.grid("energy")?, cfg.grid("plane_x1")?, cfg.grid("plane_x2")?);
    let mut points = Vec::with_capacity(energies.len() * x1s.len() * x2s.len());
    for &e in energies {
        for &x1 in x1s {
            for &x2 in x2s {
                points.push((e, x1, x2));
            }
        }
    }
    let mut table = Table::new(vec![
        "re_z", "im_z", "x1", "x2", "re_g11", "im_g11", "re_g12", "im_g12", "re_g21", "im_g21", "re_g22", "im_g22",
    ]);
    table.rows = rows(pool, &points, |&(e, x1, x2)| {
        let z = spectral_point(e, cfg.grids.energy_imag);
        let g = spin_orbit_green(PlanePoint::new(x1, x2), PlanePoint::ORIGIN, z, &cfg.spin_orbit)?;
        let mut row: Vec<Cell> = vec![z.z().re.into(), z.z().im.into(), x1.into(), x2.into()];
        for (i, j) in [(0, 0), (0, 1), (1, 0), (1, 1)] {
            row.push(g.get(i, j).re.into());
            row.push(g.get(i, j).im.into());
        }
        Ok(row)
    })?;
    let mut metadata = Map::new();
    metadata.insert("source".into(), json!([json_float(0.0), json_float(0.0)]));
    Ok(Report { table, metadata, passed: true })
}

fn green_renorm(cfg: &RunConfig, pool: &ThreadPool) -> CliResult<Report> {
    let mut table = Table::new(vec!["re_z", "im_z", "re_g", "im_g"]);
    table.rows = rows(pool, cfg.grid("energy")?, |&e| {
        let z = spectral_point(e, cfg.grids.energy_imag);
        let g = renormalized_scalar(z, &cfg.spin_orbit)?;
        Ok(vec![z.z().re.into(), z.z().im.into(), g.re.into(), g.im.into()])
    })?;
    Ok(Report {
        table,
        metadata: Map::new(),
        passed: true,
    })
}

fn bound_states(cfg: &RunConfig) -> CliResult<Report> {
    let c = cfg.coupling()?.spin_independent(cfg.task)?;
    let p = &cfg.spin_orbit;
    let states = find_bound_states(&c, p, &cfg.search)?;
    let mut table = Table::new(vec!["energy", "kappa_b", "residual", "det_check", "abs_det", "root_kind"]);
    for s in &states {
        table.rows.push(vec![
            s.energy.into(),
            s.kappa_b.into(),
            s.residual.into(),
            s.singular_ratio.into(),
            s.determinant.into(),
            match s.kind {
                RootKind::Simple => "simple",
                RootKind::Tangent => "tangent",
            }
            .into(),
        ]);
    }
    let report = reality_report(p, &cfg.search, cfg.reality_samples)?;
    let kappa = p.kappa();
    let mut metadata = Map::new();
    metadata.insert("search_interval".into(), json!([json_float(cfg.search.lo), json_float(cfg.search.hi)]));
    metadata.insert(
        "duality_check_passed".into(),
        json!(states.iter().all(|s| s.passes_duality())),
    );
    metadata.insert(
        "reality_region".into(),
        json!({
            "measured": {
                "description": "G_ren(-kappa_b^2) real for kappa_b above this edge (sampled)",
                "kappa_b_lower_edge": json_float(report.measured_lower_edge),
                "energy_upper_edge": json_float(-report.measured_lower_edge * report.measured_lower_edge),
                "max_abs_imag_on_search_interval": json_float(report.search_max_imag),
            },
            "alternative_claim": {
                "description": "G_ren real for energies in (-kappa^2, 0), i.e. 0 < kappa_b < kappa",
                "energy_interval": [json_float(-kappa * kappa), json_float(0.0)],
                "consistent_with_samples": report.real_below_kappa,
            },
            "exploratory_samples": report.exploratory.iter().map(|&(kb, im)| json!([json_float(kb), json_float(im)])).collect::<Vec<_>>(),
        }),
    );
    Ok(Report { table, metadata, passed: true })
}

fn reflect_sweep(cfg: &RunConfig, pool: &ThreadPool) -> CliResult<Report> {
    let c = cfg.coupling()?.spin_independent(cfg.task)?;
    let mut table = Table::new(vec!["k", "re_r", "im_r", "abs_r2", "transmission"]);
    table.rows = rows(pool, cfg.grid("k")?, |&k| {
        let r = reflection_amplitude(ScatteringMomentum::new(k)?, &c, &cfg.spin_orbit)?;
        Ok(vec![k.into(), r.r.re.into(), r.r.im.into(), r.probability.into(), r.transmission.into()])
    })?;
    Ok(Report {
        table,
        metadata: Map::new(),
        passed: true,
    })
}

fn state_dump(cfg: &RunConfig, pool: &ThreadPool) -> CliResult<Report> {
    let c = cfg.coupling()?.spin_independent(cfg.task)?;
    let state = cfg
        .state
        .ok_or_else(|| CliError::Schema("task state-dump needs a [state] section".into()))?;
    let k = ScatteringMomentum::new(state.k)?;
    let sol = ScatteringSolution::new(k, state.spin, &c, &cfg.spin_orbit)?;

    let mut samples: Vec<(bool, f64, f64)> = Vec::new();
    if let Some(lead) = &cfg.grids.lead {
        samples.extend(lead.iter().map(|&x| (true, x, 0.0)));
    }
    if let (Some(x1s), Some(x2s)) = (&cfg.grids.plane_x1, &cfg.grids.plane_x2) {
        for &x1 in x1s {
            for &x2 in x2s {
                samples.push((false, x1, x2));
            }
        }
    }
    let mut table = Table::new(vec!["region", "x1", "x2", "re_up", "im_up", "re_down", "im_down"]);
    table.rows = rows(pool, &samples, |&(on_lead, x1, x2)| {
        let v = if on_lead {
            sol.lead_value(LeadPoint::new(x1)?)?
        } else {
            sol.plane_value(PlanePoint::new(x1, x2))?
        };
        Ok(vec![
            if on_lead { "lead" } else { "plane" }.into(),
            x1.into(),
            x2.into(),
            v[0].re.into(),
            v[0].im.into(),
            v[1].re.into(),
            v[1].im.into(),
        ])
    })?;
    let r = reflection_amplitude(k, &c, &cfg.spin_orbit)?;
    let w = sol.weights();
    let mut metadata = Map::new();
    metadata.insert("k".into(), json_float(state.k));
    metadata.insert("incident_spin".into(), json!([complex_json(state.spin[0]), complex_json(state.spin[1])]));
    metadata.insert("reflection_amplitude".into(), complex_json(r.r));
    metadata.insert("junction_weights".into(), json!(w.iter().map(|&x| complex_json(x)).collect::<Vec<_>>()));
    Ok(Report { table, metadata, passed: true })
}
