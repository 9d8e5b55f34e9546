//! Acceptance gate: one test per criterion A1-A8, each printing a
//! pass/fail line (run with `--nocapture` to see them).

use std::panic::{catch_unwind, resume_unwind, UnwindSafe};
use std::time::Instant;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use metastable::operator::{
    build_random_walk_matrix, build_witten_matrix, row_stochastic_matrix, OperatorKind,
};
use metastable::potential::{find_critical_points, validate_hypotheses, Domain, Potential};
use metastable::report::{
    analyze_pipeline, fit_prefactor, run_verify, verify_with, RunConfig, VerificationRow,
};
use metastable::spectral::{assemble_class_matrix, graded_schur_spectrum, predict_spectrum};
use metastable::topology::{
    build_landscape, build_landscape_oracle, Filtration, LabeledLandscape, TieBreak,
    TopologyParams,
};

fn criterion<F: FnOnce() + UnwindSafe>(name: &str, f: F) {
    match catch_unwind(f) {
        Ok(()) => println!("{name}: pass"),
        Err(e) => {
            println!("{name}: FAIL");
            resume_unwind(e);
        }
    }
}

fn config(expr: &str, dim: usize, domain: &str, topo_nodes: usize, op_nodes: usize) -> RunConfig {
    RunConfig::from_str(&format!(
        r#"
schema_version = 1
[potential]
expression = "{expr}"
dimension = {dim}
domain = {domain}
[grid]
nodes_per_axis = {op_nodes}
topology_nodes_per_axis = {topo_nodes}
"#
    ))
    .unwrap()
}

fn rel_err(got: f64, want: f64) -> f64 {
    (got - want).abs() / want.abs()
}

/// Witten double well: extrapolated prefactor within 5% of 0.36013,
/// per-h ratio within 10% at h = 0.02.
#[test]
fn a1_witten_double_well_prefactor() {
    criterion("A1", || {
        let cfg = config("0.1*(x^2-1)^2", 1, "[[-2.5, 2.5]]", 1025, 4001);
        let art = analyze_pipeline(&cfg).unwrap();
        let mut rows: Vec<VerificationRow> = Vec::new();
        for h in [0.02, 0.025, 0.03, 0.035, 0.04] {
            let rep = verify_with(&art, &cfg, OperatorKind::Witten, h, None, None).unwrap();
            assert_eq!(rep.window_count, 2);
            rows.extend(rep.rows);
        }
        let expect = 0.36013;
        let pts: Vec<(f64, f64)> = rows.iter().map(|r| (r.h, r.ratio)).collect();
        let (c0, _, _) = fit_prefactor(&pts).unwrap();
        assert!(rel_err(c0, expect) < 0.05, "C0 = {c0}");
        let at_002 = rows.iter().find(|r| r.h == 0.02).unwrap();
        assert!(rel_err(at_002.ratio, expect) < 0.10, "ratio = {}", at_002.ratio);
        assert!((at_002.prefactor - expect).abs() < 1e-4);
    });
}

/// Ball walk on the same well (rho = 1/6): extrapolated prefactor within
/// 10% of 0.060021, per-h ratio within 20% at h = 0.05. The node counts
/// realize delta = h / 20.496.. (non-integer ball radius).
#[test]
fn a2_walk_double_well_prefactor() {
    criterion("A2", || {
        let cfg = config("0.1*(x^2-1)^2", 1, "[[-2.5, 2.5]]", 1025, 4001);
        let art = analyze_pipeline(&cfg).unwrap();
        let mut rows: Vec<VerificationRow> = Vec::new();
        for (h, nodes) in [(0.03, 3417), (0.04, 2563), (0.05, 2051)] {
            let rep =
                verify_with(&art, &cfg, OperatorKind::RandomWalk, h, Some(nodes), None).unwrap();
            assert_eq!(rep.window_count, 2);
            rows.extend(rep.rows);
        }
        let expect = 0.060021;
        let pts: Vec<(f64, f64)> = rows.iter().map(|r| (r.h, r.ratio)).collect();
        let (c0, _, _) = fit_prefactor(&pts).unwrap();
        assert!(rel_err(c0, expect) < 0.10, "C0 = {c0}");
        let at_005 = rows.iter().find(|r| r.h == 0.05).unwrap();
        assert!(rel_err(at_005.ratio, expect) < 0.20, "ratio = {}", at_005.ratio);
    });
}

/// Tilted triple well: two barrier levels, exactly 3 window eigenvalues,
/// per-level extrapolated prefactor within 10% of the pipeline's
/// prediction, with every h obeying 2 S_max / h <= 30.
#[test]
fn a3_triple_well_graded_levels() {
    criterion("A3", || {
        let cfg = config(
            "0.02*((x+2.2)*(x+0.2)*(x-1.8))^2 + 0.01*x",
            1,
            "[[-3.5, 3.5]]",
            2049,
            4001,
        );
        let art = analyze_pipeline(&cfg).unwrap();
        let s_max = art
            .landscape
            .minima
            .iter()
            .filter(|m| m.s_value.is_finite())
            .map(|m| m.s_value)
            .fold(0.0f64, f64::max);

        // the two barrier depths are only 0.003 apart, so each level gets
        // its own h-window: the shallow level needs larger h before its
        // extrapolation stabilizes, the deep one smaller h
        let h_low = [0.028, 0.032, 0.036, 0.04, 0.045, 0.05, 0.056, 0.063];
        let h_high = [0.018, 0.02, 0.022, 0.025, 0.028, 0.032, 0.036, 0.04];
        let mut all_h: Vec<f64> = h_low.iter().chain(&h_high).copied().collect();
        all_h.sort_by(|a, b| a.partial_cmp(b).unwrap());
        all_h.dedup();

        let mut rows: Vec<VerificationRow> = Vec::new();
        for &h in &all_h {
            assert!(2.0 * s_max / h <= 30.0);
            let rep = verify_with(&art, &cfg, OperatorKind::Witten, h, None, None).unwrap();
            // exactly n0 = 3 eigenvalues in the window
            assert_eq!(rep.window_count, 3);
            assert_eq!(rep.rows.len(), 2);
            rows.extend(rep.rows);
        }

        let mut levels: Vec<f64> = rows.iter().map(|r| r.level).collect();
        levels.sort_by(|a, b| a.partial_cmp(b).unwrap());
        levels.dedup();
        assert_eq!(levels.len(), 2, "expected two barrier levels");
        for (level, window) in levels.iter().zip([&h_low[..], &h_high[..]]) {
            let pts: Vec<(f64, f64)> = rows
                .iter()
                .filter(|r| r.level == *level && window.contains(&r.h))
                .map(|r| (r.h, r.ratio))
                .collect();
            assert_eq!(pts.len(), window.len());
            let predicted = rows
                .iter()
                .find(|r| r.level == *level)
                .unwrap()
                .prefactor;
            let (c0, _, _) = fit_prefactor(&pts).unwrap();
            assert!(
                rel_err(c0, predicted) < 0.10,
                "level {level}: C0 = {c0}, predicted {predicted}"
            );
        }
    });
}

/// Exact structural identities: the walk's invariant vector is killed by
/// P to 1e-13, the twisted Laplacian kills its Boltzmann kernel to
/// 1e-13 relative, and the conjugated walk spectrum matches the
/// un-conjugated stochastic matrix to 1e-10 on 200-node instances.
#[test]
fn a4_exact_identities() {
    criterion("A4", || {
        let p = Potential::parse("0.1*(x^2-1)^2", 1, Domain::new(vec![[-2.5, 2.5]]).unwrap())
            .unwrap();

        // invariant vector of the walk
        let walk = build_random_walk_matrix(&p, 1025, 0.1).unwrap();
        let mut pv = vec![0.0; walk.matrix.n];
        walk.matrix.matvec(&walk.kernel, &mut pv);
        let num = pv.iter().map(|x| x * x).sum::<f64>().sqrt();
        assert!(num <= 1e-13, "|P v| = {num:e}");

        // exact kernel of the twisted Laplacian
        let witten = build_witten_matrix(&p, 4001, 0.02).unwrap();
        let mut av = vec![0.0; witten.matrix.n];
        witten.matrix.matvec(&witten.kernel, &mut av);
        let an = av.iter().map(|x| x * x).sum::<f64>().sqrt();
        let bound = 1e-13 * witten.matrix.norm_estimate();
        assert!(an <= bound, "|A u| = {an:e} > {bound:e}");

        // similarity: eigenvalues of P = I - G match 1 - eig(T)
        // 201 nodes -> delta = 0.025; each h keeps h/delta >= 16, non-integer
        for h in [0.41, 0.44, 0.47] {
            let op = build_random_walk_matrix(&p, 201, h).unwrap();
            let t = row_stochastic_matrix(&p, 201, h).unwrap();
            let mut sym: Vec<f64> = op
                .matrix
                .to_dense()
                .symmetric_eigen()
                .eigenvalues
                .iter()
                .copied()
                .collect();
            sym.sort_by(|a, b| a.partial_cmp(b).unwrap());
            let ct = t.complex_eigenvalues();
            let mut uncon: Vec<f64> = ct
                .iter()
                .map(|z| {
                    assert!(z.im.abs() < 1e-10, "complex eigenvalue {z}");
                    1.0 - z.re
                })
                .collect();
            uncon.sort_by(|a, b| a.partial_cmp(b).unwrap());
            for (a, b) in sym.iter().zip(&uncon) {
                assert!(
                    (a - b).abs() <= 1e-10 * a.abs().max(1.0),
                    "h = {h}: {a:e} vs {b:e}"
                );
            }
        }
    });
}

fn random_confining_octic(rng: &mut ChaCha8Rng) -> String {
    let c8: f64 = rng.gen_range(0.05..0.3);
    let mut expr = format!("{c8:.17}*x^8");
    for k in (0..8).rev() {
        // taper the higher-order coefficients to keep the interesting
        // landscape inside the domain
        let amp = match k {
            7 => 0.2,
            6 => 0.4,
            5 => 0.6,
            _ => 1.0,
        };
        let c: f64 = rng.gen_range(-amp..amp);
        let term = match k {
            0 => format!("{:.17}", c.abs()),
            1 => format!("{:.17}*x", c.abs()),
            _ => format!("{:.17}*x^{k}", c.abs()),
        };
        let sign = if c < 0.0 { " - " } else { " + " };
        expr.push_str(sign);
        expr.push_str(&term);
    }
    expr
}

fn landscape_fingerprint(land: &LabeledLandscape) -> String {
    use std::fmt::Write;
    let mut s = String::new();
    for m in &land.minima {
        writeln!(
            s,
            "min crit={} level={} j={} sigma={} s={} hat={:?} type_ii={}",
            m.crit_idx,
            m.level,
            m.j_index,
            m.sigma.to_bits(),
            m.s_value.to_bits(),
            m.hat.map(|id| land.minima[id].crit_idx),
            m.type_ii
        )
        .unwrap();
    }
    let mut classes: Vec<String> = land
        .classes
        .iter()
        .map(|c| {
            let mut members: Vec<usize> =
                c.members.iter().map(|&id| land.minima[id].crit_idx).collect();
            members.sort();
            format!(
                "class level={} sigma={} members={:?} hat={}",
                c.level,
                c.sigma.to_bits(),
                members,
                land.minima[c.hat].crit_idx
            )
        })
        .collect();
    classes.sort();
    for c in classes {
        s.push_str(&c);
        s.push('\n');
    }
    s
}

/// Topology oracle: on 200 random confining degree-8 polynomials, the
/// union-find sweep and the flood-fill oracle produce identical labels,
/// depths, hats, types, and classes; total runtime under 2 minutes.
#[test]
fn a5_topology_oracle_agreement() {
    criterion("A5", || {
        let start = Instant::now();
        let mut rng = ChaCha8Rng::seed_from_u64(12345);
        let domain = Domain::new(vec![[-2.4, 2.4]]).unwrap();
        let params = TopologyParams::default();
        let mut accepted = 0;
        let mut attempts = 0;
        while accepted < 200 {
            attempts += 1;
            assert!(attempts < 4000, "too many rejected polynomials");
            let expr = random_confining_octic(&mut rng);
            let p = match Potential::parse(&expr, 1, domain.clone()) {
                Ok(p) => p,
                Err(_) => continue,
            };
            let Ok((points, _)) = find_critical_points(&p, 48, 1e-10) else {
                continue;
            };
            let Ok(validation) = validate_hypotheses(&p, &points, None) else {
                continue;
            };
            if !validation.passed || !validation.equal_value_groups.is_empty() {
                continue;
            }
            let Ok(filt) = Filtration::build(&p, 513, None) else {
                continue;
            };
            let swept = match build_landscape(&p, &filt, &points, &params) {
                Ok(l) => l,
                Err(_) => continue, // under-resolved landscape at this grid
            };
            let oracle = build_landscape_oracle(&p, &filt, &points, &params)
                .unwrap_or_else(|e| panic!("oracle failed where sweep passed ({expr}): {e}"));
            assert_eq!(
                landscape_fingerprint(&swept),
                landscape_fingerprint(&oracle),
                "disagreement on {expr}"
            );
            accepted += 1;
        }
        let elapsed = start.elapsed();
        assert!(
            elapsed.as_secs_f64() < 120.0,
            "took {:.1}s for 200 polynomials",
            elapsed.as_secs_f64()
        );
    });
}

/// Graded Schur property: eigenvalues of Omega M Omega match the union
/// of the per-block Schur spectra to O(pw^2) on 100 random SPD matrices;
/// the worked 2x2 case returns 2.5e-6 within 1%.
#[test]
fn a6_graded_schur_property() {
    criterion("A6", || {
        let pw = 1e-3;
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        for trial in 0..100 {
            let nblocks = rng.gen_range(1..=3usize);
            let blocks: Vec<usize> = (0..nblocks).map(|_| rng.gen_range(1..=3usize)).collect();
            let n: usize = blocks.iter().sum();
            let a = DMatrix::from_fn(n, n, |_, _| rng.gen_range(-1.0..1.0));
            let m = &a * a.transpose() + DMatrix::identity(n, n) * 0.5;

            let mut eps = Vec::new();
            let mut e = 1.0;
            for &k in &blocks {
                eps.extend(std::iter::repeat(e).take(k));
                e *= pw;
            }
            let omega = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(eps));
            let scaled = &omega * &m * &omega;
            let mut lam: Vec<f64> = scaled.symmetric_eigen().eigenvalues.iter().copied().collect();
            lam.sort_by(|a, b| b.partial_cmp(a).unwrap());

            let spectra = graded_schur_spectrum(&m, &blocks).unwrap();
            let norm = m.norm();
            let mut pos = 0;
            let mut scale2 = 1.0f64;
            for eigs in &spectra {
                let mut pred: Vec<f64> = eigs.iter().map(|x| x * scale2).collect();
                pred.sort_by(|a, b| b.partial_cmp(a).unwrap());
                for p in pred {
                    let got = lam[pos];
                    // relative O(pw^2) bound with a machine-epsilon floor
                    let tol = 100.0 * pw * pw * p + 1e3 * f64::EPSILON * norm;
                    assert!(
                        (got - p).abs() <= tol,
                        "trial {trial}: got {got:e}, predicted {p:e}"
                    );
                    pos += 1;
                }
                scale2 *= pw * pw;
            }
        }

        // worked 2x2 case
        let m = nalgebra::dmatrix![2.0, 1.0; 1.0, 3.0];
        let omega = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![1.0, pw]));
        let scaled = &omega * &m * &omega;
        let mut lam: Vec<f64> = scaled.symmetric_eigen().eigenvalues.iter().copied().collect();
        lam.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert!(rel_err(lam[0], 2.5e-6) < 0.01, "lambda_2 = {:e}", lam[0]);
        let schur = graded_schur_spectrum(&m, &[1, 1]).unwrap();
        assert!((schur[1][0] - 2.5).abs() < 1e-14);
    });
}

/// Invariance suite: tie-break and basis independence of the predicted
/// spectrum at 1e-10 relative.
#[test]
fn a7_invariance_suite() {
    criterion("A7", || {
        let cases: [(&str, Vec<[f64; 2]>, usize); 2] = [
            ("0.1*(x^2-1)^2", vec![[-2.5, 2.5]], 1025),
            (
                "(x^2-1)^2 + (y^2-1)^2",
                vec![[-2.2, 2.2], [-2.2, 2.2]],
                257,
            ),
        ];
        for (src, bounds, nodes) in cases {
            let dim = bounds.len();
            let p = Potential::parse(src, dim, Domain::new(bounds).unwrap()).unwrap();
            let filt = Filtration::build(&p, nodes, None).unwrap();
            let (pts, _) = find_critical_points(&p, 48, 1e-10).unwrap();
            let make = |tie| {
                let params = TopologyParams {
                    tie_break: tie,
                    ..Default::default()
                };
                build_landscape(&p, &filt, &pts, &params).unwrap()
            };
            let a = make(TieBreak::LexMin);
            let b = make(TieBreak::LexMax);
            let pa = predict_spectrum(&a, 1.0, 0.05).unwrap().all_eigenvalues();
            let pb = predict_spectrum(&b, 1.0, 0.05).unwrap().all_eigenvalues();
            assert_eq!(pa.len(), pb.len());
            for (x, y) in pa.iter().zip(&pb) {
                assert!((x - y).abs() <= 1e-10 * x.abs().max(1e-300), "{src}");
            }

            // basis independence: orthogonal mixes of the type-II columns
            // leave each class spectrum unchanged
            let mut rng = ChaCha8Rng::seed_from_u64(9);
            for ci in 0..a.classes.len() {
                let k = a.classes[ci]
                    .members
                    .iter()
                    .filter(|&&id| a.minima[id].type_ii)
                    .count();
                if k < 2 {
                    continue;
                }
                let base = assemble_class_matrix(&a, ci, 1.0, None).unwrap();
                for _ in 0..3 {
                    let g = DMatrix::from_fn(k, k, |_, _| rng.gen_range(-1.0..1.0));
                    let q = g.qr().q();
                    let mixed = assemble_class_matrix(&a, ci, 1.0, Some(&q)).unwrap();
                    let mut e1: Vec<f64> =
                        base.m0.clone().symmetric_eigen().eigenvalues.iter().copied().collect();
                    let mut e2: Vec<f64> =
                        mixed.m0.clone().symmetric_eigen().eigenvalues.iter().copied().collect();
                    e1.sort_by(|a, b| a.partial_cmp(b).unwrap());
                    e2.sort_by(|a, b| a.partial_cmp(b).unwrap());
                    for (x, y) in e1.iter().zip(&e2) {
                        assert!((x - y).abs() <= 1e-10 * x.abs().max(1e-300));
                    }
                }
            }
        }
    });
}

/// 2D smoke test: (x^2-1)^2 + 2 y^2, twisted Laplacian on 257^2 nodes at
/// h = 0.1 via the banded path: exactly 2 window eigenvalues, prefactor
/// within 25% of the prediction, under 10 minutes.
#[test]
fn a8_two_dimensional_smoke() {
    criterion("A8", || {
        let start = Instant::now();
        let cfg = config(
            "(x^2-1)^2 + 2*y^2",
            2,
            "[[-2.5, 2.5], [-2.0, 2.0]]",
            257,
            257,
        );
        let rep = run_verify(&cfg, OperatorKind::Witten, 0.1, None, None).unwrap();
        assert_eq!(rep.window_count, 2);
        assert_eq!(rep.rows.len(), 1);
        let row = &rep.rows[0];
        assert!((row.level - 1.0).abs() < 1e-8, "S = {}", row.level);
        assert!(
            rel_err(row.ratio, row.prefactor) < 0.25,
            "ratio {} vs prefactor {}",
            row.ratio,
            row.prefactor
        );
        let elapsed = start.elapsed();
        assert!(
            elapsed.as_secs_f64() < 600.0,
            "took {:.1}s",
            elapsed.as_secs_f64()
        );
    });
}
