//! Newton search for critical points and hypothesis validation.

use serde::{Deserialize, Serialize};

use super::{sym_eigenvalues, CriticalPoint, Potential, PotentialError};

const MAX_NEWTON_ITERS: usize = 80;

/// Per-run diagnostics of the seed sweep; non-convergence is not fatal.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct NewtonReport {
    pub seeds: usize,
    pub converged: usize,
    pub diverged: usize,
    pub escaped_domain: usize,
}

fn solve_newton_step(g: &[f64; 2], h: &[[f64; 2]; 2], dim: usize) -> Option<[f64; 2]> {
    if dim == 1 {
        if h[0][0] == 0.0 {
            return None;
        }
        Some([g[0] / h[0][0], 0.0])
    } else {
        let det = h[0][0] * h[1][1] - h[0][1] * h[1][0];
        if det == 0.0 {
            return None;
        }
        Some([
            (h[1][1] * g[0] - h[0][1] * g[1]) / det,
            (h[0][0] * g[1] - h[1][0] * g[0]) / det,
        ])
    }
}

fn grad_norm(g: &[f64; 2], dim: usize) -> f64 {
    g[..dim].iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Newton iteration on `grad W = 0` from a uniform seed grid.
///
/// Scale-invariant tolerances:
/// `tol_grad = 1e-10 * (1 + max |grad W|)` over the seeds,
/// `tol_dedup = 1e-6 * domain width`,
/// `tol_morse = 1e-8 * max |Hessian entry|` over the converged points.
pub fn find_critical_points(
    potential: &Potential,
    seeds_per_axis: usize,
    tol_grad_rel: f64,
) -> Result<(Vec<CriticalPoint>, NewtonReport), PotentialError> {
    assert!(seeds_per_axis >= 16, "seeds_per_axis must be >= 16");
    let dim = potential.dimension();
    let domain = potential.domain().clone();

    let mut seeds: Vec<[f64; 2]> = Vec::new();
    let axis_coords = |axis: usize| -> Vec<f64> {
        // seeds strictly inside the domain
        (0..seeds_per_axis)
            .map(|i| {
                domain.bounds[axis][0]
                    + domain.width(axis) * (i as f64 + 0.5) / seeds_per_axis as f64
            })
            .collect()
    };
    let xs = axis_coords(0);
    if dim == 1 {
        for &x in &xs {
            seeds.push([x, 0.0]);
        }
    } else {
        let ys = axis_coords(1);
        for &x in &xs {
            for &y in &ys {
                seeds.push([x, y]);
            }
        }
    }

    let mut max_grad: f64 = 0.0;
    for s in &seeds {
        if let Ok(r) = potential.eval_unchecked(s) {
            max_grad = max_grad.max(grad_norm(&r.gradient, dim));
        }
    }
    let tol_grad = tol_grad_rel * (1.0 + max_grad);
    let tol_dedup = 1e-6 * domain.max_width();

    let mut report = NewtonReport {
        seeds: seeds.len(),
        ..Default::default()
    };
    let mut found: Vec<([f64; 2], super::EvalResult)> = Vec::new();

    'seed: for seed in seeds {
        let mut p = seed;
        for _ in 0..MAX_NEWTON_ITERS {
            let r = match potential.eval_unchecked(&p) {
                Ok(r) => r,
                Err(_) => {
                    report.diverged += 1;
                    continue 'seed;
                }
            };
            if grad_norm(&r.gradient, dim) <= tol_grad {
                if !domain.contains(&p[..dim]) {
                    report.escaped_domain += 1;
                    continue 'seed;
                }
                report.converged += 1;
                if !found.iter().any(|(q, _)| {
                    q[..dim]
                        .iter()
                        .zip(&p[..dim])
                        .map(|(a, b)| (a - b) * (a - b))
                        .sum::<f64>()
                        .sqrt()
                        <= tol_dedup
                }) {
                    found.push((p, r));
                }
                continue 'seed;
            }
            let step = match solve_newton_step(&r.gradient, &r.hessian, dim) {
                Some(s) => s,
                None => {
                    report.diverged += 1;
                    continue 'seed;
                }
            };
            // keep iterates from flying far outside the domain
            let max_step = domain.max_width();
            let sn = grad_norm(&step, dim);
            let scale = if sn > max_step { max_step / sn } else { 1.0 };
            for a in 0..dim {
                p[a] -= scale * step[a];
            }
            let margin = 0.5 * domain.max_width();
            if (0..dim).any(|a| {
                p[a] < domain.bounds[a][0] - margin || p[a] > domain.bounds[a][1] + margin
            }) {
                report.escaped_domain += 1;
                continue 'seed;
            }
        }
        report.diverged += 1;
    }

    let max_hess_entry = found
        .iter()
        .flat_map(|(_, r)| r.hessian.iter().flatten())
        .fold(0.0f64, |m, &x| m.max(x.abs()));
    let tol_morse = 1e-8 * max_hess_entry.max(f64::MIN_POSITIVE);

    let mut points = Vec::with_capacity(found.len());
    for (p, r) in found {
        let eigs = sym_eigenvalues(&r.hessian, dim);
        if let Some(&bad) = eigs.iter().find(|e| e.abs() <= tol_morse) {
            return Err(PotentialError::MorseViolation {
                location: p[..dim].to_vec(),
                eigenvalue: bad,
                tol: tol_morse,
            });
        }
        let index = eigs.iter().filter(|&&e| e < 0.0).count();
        let det = if dim == 1 {
            r.hessian[0][0]
        } else {
            r.hessian[0][0] * r.hessian[1][1] - r.hessian[0][1] * r.hessian[1][0]
        };
        points.push(CriticalPoint {
            location: p[..dim].to_vec(),
            value: r.value,
            index,
            hessian_eigenvalues: eigs,
            hessian_det: det,
            hessian: r.hessian,
        });
    }

    points.sort_by(|a, b| {
        a.value
            .partial_cmp(&b.value)
            .unwrap()
            .then_with(|| lex_cmp(&a.location, &b.location))
    });
    Ok((points, report))
}

/// Lexicographic comparison of coordinate tuples; total for finite inputs.
pub fn lex_cmp(a: &[f64], b: &[f64]) -> std::cmp::Ordering {
    for (x, y) in a.iter().zip(b) {
        match x.partial_cmp(y).unwrap() {
            std::cmp::Ordering::Equal => continue,
            o => return o,
        }
    }
    std::cmp::Ordering::Equal
}

/// Outcome of the standing-hypothesis checks; failures are carried, not thrown.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ValidationReport {
    pub n0: usize,
    pub passed: bool,
    pub violations: Vec<String>,
    /// Groups of critical points (indices into the input list) whose values
    /// coincide within `tol_value`.
    pub equal_value_groups: Vec<Vec<usize>>,
    pub tol_value: f64,
    pub boundary_min: f64,
    pub max_critical_value: f64,
}

/// Checks `n0 >= 2`, the boundary-margin confinement proxy, and flags
/// equal critical values (relative tolerance `1e-9 *` value spread).
pub fn validate_hypotheses(
    potential: &Potential,
    points: &[CriticalPoint],
    boundary_margin: Option<f64>,
) -> Result<ValidationReport, PotentialError> {
    let n0 = points.iter().filter(|p| p.is_minimum()).count();
    let mut violations = Vec::new();
    if n0 < 2 {
        violations.push(format!("n0 = {n0} < 2: fewer than two local minima"));
    }

    let (vmin, vmax) = points.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| {
        (lo.min(p.value), hi.max(p.value))
    });
    let spread = (vmax - vmin).max(0.0);
    let tol_value = 1e-9 * spread.max(f64::MIN_POSITIVE);
    let margin = boundary_margin.unwrap_or(0.2 * spread.max(1e-12));

    // confinement proxy: W on the boundary exceeds every critical value
    let boundary_min = boundary_minimum(potential)?;
    if !points.is_empty() && boundary_min < vmax + margin {
        violations.push(format!(
            "confinement proxy failed: min W on boundary = {boundary_min:.6} < max critical value {vmax:.6} + margin {margin:.6}"
        ));
    }

    // group equal values
    let mut order: Vec<usize> = (0..points.len()).collect();
    order.sort_by(|&a, &b| points[a].value.partial_cmp(&points[b].value).unwrap());
    let mut equal_value_groups = Vec::new();
    let mut i = 0;
    while i < order.len() {
        let mut j = i + 1;
        while j < order.len()
            && (points[order[j]].value - points[order[j - 1]].value).abs() <= tol_value
        {
            j += 1;
        }
        if j - i > 1 {
            equal_value_groups.push(order[i..j].to_vec());
        }
        i = j;
    }

    Ok(ValidationReport {
        n0,
        passed: violations.is_empty(),
        violations,
        equal_value_groups,
        tol_value,
        boundary_min,
        max_critical_value: vmax,
    })
}

fn boundary_minimum(potential: &Potential) -> Result<f64, PotentialError> {
    let dim = potential.dimension();
    let d = potential.domain().clone();
    let mut min = f64::INFINITY;
    if dim == 1 {
        for x in [d.bounds[0][0], d.bounds[0][1]] {
            min = min.min(potential.value(&[x, 0.0])?);
        }
    } else {
        let samples = 256;
        for i in 0..=samples {
            let tx = d.bounds[0][0] + d.width(0) * i as f64 / samples as f64;
            let ty = d.bounds[1][0] + d.width(1) * i as f64 / samples as f64;
            min = min.min(potential.value(&[tx, d.bounds[1][0]])?);
            min = min.min(potential.value(&[tx, d.bounds[1][1]])?);
            min = min.min(potential.value(&[d.bounds[0][0], ty])?);
            min = min.min(potential.value(&[d.bounds[0][1], ty])?);
        }
    }
    Ok(min)
}
