//! Where the large coefficients of a function with line singularities sit:
//! directions near the singular normal, and lattice points near the lines.

use std::path::Path;

use ridgelab_core::geometry::{angle_shell, direction, loc_space_frame, num_directions, Direction, FrameIndex};
use ridgelab_core::xform::analyze;
use serde::Serialize;

use super::{build_bank, RunError};
use crate::config::ExperimentConfig;
use crate::io::{write_coefficients_csv, write_json, write_table};
use crate::report::{Check, Report};
use crate::source;

const MAX_DISTANCE: u32 = 1;

#[derive(Serialize)]
struct DistanceRow {
    distance: u32,
    count: usize,
}

#[derive(Serialize)]
struct ShellRow {
    j: u32,
    r: u32,
    members: usize,
    energy: f64,
}

/// Index distance from `l` to the direction nearest `±n` at scale `j`.
fn direction_distance(j: u32, l: u32, n: &Direction) -> u32 {
    if j == 0 {
        return 0;
    }
    let count = num_directions(j) as u32;
    let dot = |l: u32| direction(j, l).dot(&n.components());
    // first maximum wins ties
    let best = (0..count).fold(0, |b, m| if dot(m).abs() > dot(b).abs() { m } else { b });
    let cyc = |a: u32, b: u32| {
        let d = a.abs_diff(b);
        d.min(count - d)
    };
    cyc(l, best).min(cyc(l, (best + count / 2) % count))
}

pub fn run(cfg: &ExperimentConfig, out: &Path) -> Result<Report, RunError> {
    let mut rep = Report::new("angle-loc");
    let bank = build_bank(cfg)?;
    write_json(&out.join("bank.json"), &bank.describe())?;
    let f = source::sample(cfg).swap_remove(0);
    let c = analyze(&f, &bank)?;
    let (n, offsets) = source::singularity(cfg);
    rep.metric("normal_angle", n.angle());
    rep.metric("offsets", &offsets);

    let top: Vec<(FrameIndex, _)> =
        c.sorted().into_iter().filter(|(lam, _)| lam.j >= cfg.angle.j_min).take(cfg.angle.top_k).collect();
    write_coefficients_csv(&out.join("top_coefficients.csv"), &top)?;
    let dists: Vec<u32> = top.iter().map(|(lam, _)| direction_distance(lam.j, lam.l, &n)).collect();
    let hist_len = dists.iter().max().map_or(1, |m| m + 1) as usize;
    let mut hist = vec![0usize; hist_len];
    for &d in &dists {
        hist[d as usize] += 1;
    }
    let rows: Vec<_> = hist.iter().enumerate().map(|(d, &count)| DistanceRow { distance: d as u32, count }).collect();
    write_table(&out.join("data.csv"), &rows)?;
    let near = dists.iter().filter(|&&d| d <= MAX_DISTANCE).count();
    let frac = near as f64 / top.len().max(1) as f64;
    rep.check(Check::at_least(10, "fraction_within_one_direction", frac, 0.95));
    rep.metric("selected", top.len());

    // fraction of the selected coefficients in the tail set of every line
    let in_tail = top
        .iter()
        .filter(|(lam, _)| lam.j > 0)
        .filter(|(lam, _)| {
            let w = bank.window(lam.j, lam.l).expect("coefficient of this bank");
            let kk = [w.sigma[0] * lam.k[0] as f64, w.sigma[1] * lam.k[1] as f64];
            offsets.iter().all(|&v| {
                let fr = loc_space_frame(lam.j, lam.l, &n, v);
                fr.in_tail_at(fr.t_at(kk), cfg.delta)
            })
        })
        .count();
    rep.metric("tail_fraction", in_tail as f64 / top.len().max(1) as f64);

    // coefficient energy per angular shell around n
    let mut shells = Vec::new();
    for j in 1..=cfg.bank.j_max {
        let dirs: Vec<Direction> = (0..num_directions(j) as u32).map(|l| direction(j, l)).collect();
        let mut energy = vec![0.0f64; dirs.len()];
        for (lam, v) in c.iter().filter(|(lam, _)| lam.j == j) {
            energy[lam.l as usize] += v.norm_sqr();
        }
        for r in 1..=j {
            let sh = angle_shell(j, r, &n, &dirs).expect("1 <= r <= j");
            let e = sh.members.iter().map(|&l| energy[l as usize]).sum();
            shells.push(ShellRow { j, r, members: sh.members.len(), energy: e });
        }
    }
    write_table(&out.join("shells.csv"), &shells)?;
    Ok(rep)
}
