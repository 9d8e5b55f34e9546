//! Separating saddles, adapted labeling of minima, hat-map, type I/II
//! classification and the equivalence classes of communicating minima.

use serde::{Deserialize, Serialize};

use crate::potential::{CriticalPoint, Potential};

use super::filtration::Filtration;
use super::union_find::DisjointSet;
use super::TopologyError;

/// Two previously distinct sublevel components joined at this node.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MergeEvent {
    pub node: usize,
    pub value: f64,
}

/// An index-1 critical point whose two descending sides lie in different
/// global sublevel components.
#[derive(Clone, Debug)]
pub struct SeparatingSaddle {
    pub point: CriticalPoint,
    /// Level index `k` (1-based) into [`LabeledLandscape::levels`].
    pub level: usize,
    /// Representative in-domain points of the two local components just
    /// below the saddle, reached by marching down the unstable direction.
    pub descent: [[f64; 2]; 2],
}

/// Label-choice among exactly equal minima. The spectrum must not depend
/// on this; tests flip it to check.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum TieBreak {
    #[default]
    LexMin,
    LexMax,
}

#[derive(Clone, Debug)]
pub struct TopologyParams {
    pub tie_break: TieBreak,
    /// Merge-event-to-saddle matching radius, in grid cells.
    pub match_cells: f64,
}

impl Default for TopologyParams {
    fn default() -> Self {
        TopologyParams {
            tie_break: TieBreak::LexMin,
            match_cells: 10.0,
        }
    }
}

/// A labeled minimum `m_{k,j}` together with its maps.
#[derive(Clone, Debug)]
pub struct MinimumLabel {
    /// Index into [`LabeledLandscape::critical_points`].
    pub crit_idx: usize,
    pub location: Vec<f64>,
    pub value: f64,
    /// Level `k` of the label (1-based).
    pub level: usize,
    /// Index `j` within the level (1-based).
    pub j_index: usize,
    /// `sigma(m)`; `+inf` for the global label.
    pub sigma: f64,
    /// `S(m) = sigma(m) - W(m)`; `+inf` for the global label.
    pub s_value: f64,
    /// Representative node of the component `E(m)` at level `k`.
    pub component: usize,
    /// Saddles on the boundary of `E(m)` (indices into `saddles`);
    /// empty for the global label, whose saddle is fictive.
    pub j_saddles: Vec<usize>,
    /// Minimum id of the hat; `None` only for the global label.
    pub hat: Option<usize>,
    pub type_ii: bool,
}

/// One equivalence class of communicating minima.
#[derive(Clone, Debug)]
pub struct Class {
    pub level: usize,
    pub sigma: f64,
    /// Minimum ids, sorted by increasing `S` then label order.
    pub members: Vec<usize>,
    /// Minimum id of the common hat.
    pub hat: usize,
    /// Per entry of `members ++ [hat]`: saddle indices adjacent to
    /// `E^alpha(m)` at the class level.
    pub j_sets: Vec<Vec<usize>>,
    /// Per entry of `members ++ [hat]`: minimum ids inside `E^alpha(m)`
    /// with the same value as `m` (the sets `H^alpha`).
    pub h_groups: Vec<Vec<usize>>,
}

impl Class {
    /// `members ++ [hat]` — the index set of the extended family.
    pub fn extended(&self) -> Vec<usize> {
        let mut v = self.members.clone();
        v.push(self.hat);
        v
    }
}

#[derive(Clone, Debug)]
pub struct LabeledLandscape {
    pub critical_points: Vec<CriticalPoint>,
    /// Minimum id -> label; sorted by `(level, j_index)` so the global
    /// label is id 0.
    pub minima: Vec<MinimumLabel>,
    pub saddles: Vec<SeparatingSaddle>,
    /// `levels[0] = +inf`, then the separating saddle values descending.
    pub levels: Vec<f64>,
    pub classes: Vec<Class>,
    pub merge_events: Vec<MergeEvent>,
    pub tol_value: f64,
    pub eps_level: f64,
}

impl LabeledLandscape {
    pub fn global_label(&self) -> &MinimumLabel {
        &self.minima[0]
    }

    pub fn n0(&self) -> usize {
        self.minima.len()
    }

    pub fn minimum_point(&self, id: usize) -> &CriticalPoint {
        &self.critical_points[self.minima[id].crit_idx]
    }
}

/// Value-comparison scales derived from the critical values:
/// `tol_value` for equality flags and `eps_level` for safely probing
/// just below a level without crossing another critical value.
pub fn value_scales(points: &[CriticalPoint]) -> Result<(f64, f64), TopologyError> {
    let mut values: Vec<f64> = points.iter().map(|p| p.value).collect();
    values.sort_by(|a, b| a.partial_cmp(b).unwrap());
    if values.is_empty() {
        return Err(TopologyError::NoCriticalPoints);
    }
    let spread = values[values.len() - 1] - values[0];
    let tol_value = 1e-9 * spread.max(f64::MIN_POSITIVE);
    let mut min_gap = f64::INFINITY;
    for w in values.windows(2) {
        let gap = w[1] - w[0];
        if gap > tol_value {
            min_gap = min_gap.min(gap);
        }
    }
    if !min_gap.is_finite() {
        return Err(TopologyError::NoDistinctValues);
    }
    Ok((tol_value, min_gap / 10.0))
}

fn lex_before(a: &[f64], b: &[f64], tie: TieBreak) -> bool {
    let ord = crate::potential::lex_cmp(a, b);
    match tie {
        TieBreak::LexMin => ord == std::cmp::Ordering::Less,
        TieBreak::LexMax => ord == std::cmp::Ordering::Greater,
    }
}

/// March from a saddle down both sides of its unstable direction until the
/// potential has dropped by several `eps_level` and the nearest grid node
/// is safely below the saddle value too.
pub fn descend_two_sides(
    potential: &Potential,
    filtration: &Filtration,
    saddle: &CriticalPoint,
    eps_level: f64,
) -> Result<[[f64; 2]; 2], TopologyError> {
    let dim = potential.dimension();
    let grid = &filtration.grid;
    let delta = grid.max_spacing();
    let sv = saddle.value;

    let dir = unstable_direction(saddle, dim);
    let mut out = [[0.0; 2]; 2];
    for (side, sign) in [1.0f64, -1.0].iter().enumerate() {
        let mut p = [0.0; 2];
        for a in 0..dim {
            p[a] = saddle.location[a] + sign * delta * dir[a];
        }
        clamp(&mut p, potential, dim);
        let mut w = potential
            .value(&p)
            .map_err(|e| TopologyError::Evaluation(e.to_string()))?;
        let mut step = delta;
        let mut iters = 0usize;
        loop {
            let node = grid.nearest_node(&p);
            if w < sv - 4.0 * eps_level && filtration.values[node] < sv - 1.5 * eps_level {
                out[side] = p;
                break;
            }
            iters += 1;
            if iters > 200_000 || step < 1e-18 * delta {
                return Err(TopologyError::Resolution(format!(
                    "descent from saddle at {:?} stalled; refine the topology grid",
                    saddle.location
                )));
            }
            let r = potential
                .eval_unchecked(&p)
                .map_err(|e| TopologyError::Evaluation(e.to_string()))?;
            let gn = r.gradient[..dim]
                .iter()
                .map(|x| x * x)
                .sum::<f64>()
                .sqrt();
            if gn == 0.0 {
                return Err(TopologyError::Resolution(format!(
                    "vanishing gradient during descent from saddle at {:?}",
                    saddle.location
                )));
            }
            let mut cand = p;
            for a in 0..dim {
                cand[a] -= step * r.gradient[a] / gn;
            }
            clamp(&mut cand, potential, dim);
            let wc = potential
                .value(&cand)
                .map_err(|e| TopologyError::Evaluation(e.to_string()))?;
            if wc < w {
                p = cand;
                w = wc;
                step = (step * 1.2).min(4.0 * delta);
            } else {
                step *= 0.5;
            }
        }
    }
    Ok(out)
}

fn unstable_direction(saddle: &CriticalPoint, dim: usize) -> [f64; 2] {
    if dim == 1 {
        return [1.0, 0.0];
    }
    // eigenvector of the 2x2 Hessian for the negative eigenvalue
    let lam = saddle.hessian_eigenvalues[0];
    let h = saddle.hessian;
    let (a, b, c) = (h[0][0], h[0][1], h[1][1]);
    let mut v = if b.abs() > 1e-14 * (a.abs() + c.abs()).max(1e-300) {
        [b, lam - a]
    } else if a < c {
        [1.0, 0.0]
    } else {
        [0.0, 1.0]
    };
    let n = (v[0] * v[0] + v[1] * v[1]).sqrt();
    v[0] /= n;
    v[1] /= n;
    [v[0], v[1]]
}

fn clamp(p: &mut [f64; 2], potential: &Potential, dim: usize) {
    let d = potential.domain();
    for a in 0..dim {
        p[a] = p[a].clamp(d.bounds[a][0], d.bounds[a][1]);
    }
}

/// Union-find sweep in increasing value order; records a merge event each
/// time two previously distinct components join.
pub fn sweep_merge_events(filtration: &Filtration) -> Vec<MergeEvent> {
    let n = filtration.values.len();
    let mut ds = DisjointSet::new(n);
    let mut active = vec![false; n];
    let mut events = Vec::new();
    let mut nb = [0usize; 4];
    for &u in &filtration.order {
        active[u] = true;
        let cnt = filtration.grid.neighbors(u, &mut nb);
        let mut roots: Vec<usize> = Vec::with_capacity(4);
        for &v in &nb[..cnt] {
            if active[v] {
                let r = ds.find(v);
                if !roots.contains(&r) {
                    roots.push(r);
                }
            }
        }
        for _ in 1..roots.len().max(1) {
            events.push(MergeEvent {
                node: u,
                value: filtration.values[u],
            });
        }
        for &r in &roots {
            ds.union(u, r);
        }
    }
    events
}

/// Find the separating saddles: the sweep supplies merge events, the
/// direct two-sided descent test supplies the classification, and the two
/// are cross-checked against each other.
pub fn separating_saddles(
    potential: &Potential,
    filtration: &Filtration,
    points: &[CriticalPoint],
    params: &TopologyParams,
) -> Result<(Vec<SeparatingSaddle>, Vec<MergeEvent>, f64, f64), TopologyError> {
    let (tol_value, eps_level) = value_scales(points)?;
    let events = sweep_merge_events(filtration);
    let grid = &filtration.grid;
    let dim = potential.dimension();

    // classify every index-1 point by the two-component test just below
    // its own value (the local 2-CC picture of a Morse saddle)
    let mut candidates: Vec<(usize, [[f64; 2]; 2], bool)> = Vec::new();
    for (i, p) in points.iter().enumerate() {
        if !p.is_saddle() {
            continue;
        }
        let descent = descend_two_sides(potential, filtration, p, eps_level)?;
        let comps = filtration.components_below(p.value - eps_level);
        let c0 = comps[grid.nearest_node(&descent[0])];
        let c1 = comps[grid.nearest_node(&descent[1])];
        if c0 == usize::MAX || c1 == usize::MAX {
            return Err(TopologyError::Resolution(format!(
                "descent targets of saddle at {:?} not resolved on the grid",
                p.location
            )));
        }
        candidates.push((i, descent, c0 != c1));
    }

    // every merge event must sit at a separating saddle
    let tol_match = params.match_cells * grid.max_spacing();
    let mut match_count = vec![0usize; points.len()];
    for ev in &events {
        let at = grid.coords(ev.node);
        let mut best: Option<(usize, f64)> = None;
        for (i, _, separating) in &candidates {
            if !separating {
                continue;
            }
            let p = &points[*i];
            if (p.value - ev.value).abs() > eps_level.max(tol_value) {
                continue;
            }
            let dist = p.location[..dim]
                .iter()
                .zip(&at[..dim])
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
                .sqrt();
            if dist <= tol_match && best.map_or(true, |(_, d)| dist < d) {
                best = Some((*i, dist));
            }
        }
        match best {
            Some((i, _)) => {
                match_count[i] += 1;
                if match_count[i] > 1 {
                    return Err(TopologyError::Consistency(format!(
                        "two merge events matched to the saddle at {:?}",
                        points[i].location
                    )));
                }
            }
            None => {
                return Err(TopologyError::Resolution(format!(
                    "merge event at node {} (value {:.6}) matched no index-1 critical point; grid too coarse",
                    ev.node, ev.value
                )))
            }
        }
    }

    let saddles: Vec<SeparatingSaddle> = candidates
        .into_iter()
        .filter(|(_, _, sep)| *sep)
        .map(|(i, descent, _)| SeparatingSaddle {
            point: points[i].clone(),
            level: 0, // assigned by the labeling pass
            descent,
        })
        .collect();
    if saddles.is_empty() {
        return Err(TopologyError::NoSeparatingSaddles);
    }
    Ok((saddles, events, tol_value, eps_level))
}

/// Full labeling pipeline: levels, adapted labels, maps E / j / sigma / S,
/// hat-map, types, and equivalence classes.
pub fn build_landscape(
    potential: &Potential,
    filtration: &Filtration,
    points: &[CriticalPoint],
    params: &TopologyParams,
) -> Result<LabeledLandscape, TopologyError> {
    let (mut saddles, events, tol_value, eps_level) =
        separating_saddles(potential, filtration, points, params)?;
    build_landscape_from_saddles(
        filtration, points, &mut saddles, events, tol_value, eps_level, params,
    )
}

/// Labeling given an already-computed separating saddle set. Shared by the
/// union-find path and the flood-fill oracle (which passes components it
/// computed itself through `comp_fn`).
pub(super) fn build_landscape_from_saddles(
    filtration: &Filtration,
    points: &[CriticalPoint],
    saddles: &mut [SeparatingSaddle],
    events: Vec<MergeEvent>,
    tol_value: f64,
    eps_level: f64,
    params: &TopologyParams,
) -> Result<LabeledLandscape, TopologyError> {
    let comp_fn = |threshold: f64| filtration.components_below(threshold);
    label_with_components(
        filtration, points, saddles, events, tol_value, eps_level, params, &comp_fn,
    )
}

#[allow(clippy::too_many_arguments)]
pub(super) fn label_with_components(
    filtration: &Filtration,
    points: &[CriticalPoint],
    saddles: &mut [SeparatingSaddle],
    events: Vec<MergeEvent>,
    tol_value: f64,
    eps_level: f64,
    params: &TopologyParams,
    comp_fn: &dyn Fn(f64) -> Vec<usize>,
) -> Result<LabeledLandscape, TopologyError> {
    let grid = &filtration.grid;

    // levels: sigma_1 = +inf, then distinct separating values descending
    let mut sig_values: Vec<f64> = saddles.iter().map(|s| s.point.value).collect();
    sig_values.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let mut levels = vec![f64::INFINITY];
    for v in sig_values {
        if levels.len() == 1 || (levels[levels.len() - 1] - v) > tol_value {
            levels.push(v);
        }
    }
    for s in saddles.iter_mut() {
        s.level = levels
            .iter()
            .position(|&l| (l - s.point.value).abs() <= tol_value)
            .ok_or_else(|| TopologyError::Consistency("saddle value missing from levels".into()))?;
        s.level += 1; // 1-based
    }

    // components per level (threshold just below the level value)
    let comps_at: Vec<Vec<usize>> = levels
        .iter()
        .map(|&sig| {
            if sig.is_infinite() {
                comp_fn(f64::INFINITY)
            } else {
                comp_fn(sig - eps_level)
            }
        })
        .collect();

    let minima_idx: Vec<usize> = (0..points.len())
        .filter(|&i| points[i].is_minimum())
        .collect();
    let min_node: Vec<usize> = minima_idx
        .iter()
        .map(|&i| grid.nearest_node(&points[i].location))
        .collect();

    // adapted labels, level by level
    let n_levels = levels.len();
    let mut label_of: Vec<Option<(usize, usize)>> = vec![None; minima_idx.len()]; // (k, j)
    let mut comp_of_label: Vec<usize> = vec![usize::MAX; minima_idx.len()];
    for k in 1..=n_levels {
        let comps = &comps_at[k - 1];
        let sigma = levels[k - 1];
        // group in-sublevel minima by component
        let mut by_comp: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
        for (mi, (&ci, &node)) in minima_idx.iter().zip(&min_node).enumerate() {
            if points[ci].value < sigma && comps[node] != usize::MAX {
                by_comp.entry(comps[node]).or_default().push(mi);
            } else if points[ci].value < sigma - eps_level {
                return Err(TopologyError::Resolution(format!(
                    "minimum at {:?} not resolved inside its sublevel component",
                    points[ci].location
                )));
            }
        }
        let mut new_labels: Vec<(usize, usize)> = Vec::new(); // (min id, comp rep)
        for (&comp, members) in &by_comp {
            let labeled: Vec<usize> = members
                .iter()
                .copied()
                .filter(|&mi| label_of[mi].is_some())
                .collect();
            match labeled.len() {
                0 => {
                    // new component: label its global minimum
                    let mut best = members[0];
                    for &mi in &members[1..] {
                        let (pa, pb) = (&points[minima_idx[best]], &points[minima_idx[mi]]);
                        let better = pb.value < pa.value - tol_value
                            || ((pb.value - pa.value).abs() <= tol_value
                                && lex_before(&pb.location, &pa.location, params.tie_break));
                        if better {
                            best = mi;
                        }
                    }
                    new_labels.push((best, comp));
                }
                1 => {} // component already owned by an earlier label
                _ => {
                    return Err(TopologyError::Bijectivity(format!(
                        "component at level {k} contains {} previously labeled minima",
                        labeled.len()
                    )))
                }
            }
        }
        // deterministic j assignment within the level
        new_labels.sort_by(|a, b| {
            let (pa, pb) = (&points[minima_idx[a.0]], &points[minima_idx[b.0]]);
            pa.value
                .partial_cmp(&pb.value)
                .unwrap()
                .then_with(|| crate::potential::lex_cmp(&pa.location, &pb.location))
        });
        for (j, (mi, comp)) in new_labels.into_iter().enumerate() {
            label_of[mi] = Some((k, j + 1));
            comp_of_label[mi] = comp;
        }
    }
    if label_of.iter().any(|l| l.is_none()) {
        return Err(TopologyError::Bijectivity(
            "some minima received no label; grid too coarse".into(),
        ));
    }

    // assemble minima sorted by (level, j)
    let mut id_order: Vec<usize> = (0..minima_idx.len()).collect();
    id_order.sort_by_key(|&mi| label_of[mi].unwrap());
    let mut id_of_mi = vec![0usize; minima_idx.len()];
    for (id, &mi) in id_order.iter().enumerate() {
        id_of_mi[mi] = id;
    }

    // saddle adjacency per level via descent representatives
    let saddle_comps: Vec<[usize; 2]> = saddles
        .iter()
        .map(|s| {
            let comps = &comps_at[s.level - 1];
            [
                comps[grid.nearest_node(&s.descent[0])],
                comps[grid.nearest_node(&s.descent[1])],
            ]
        })
        .collect();

    let mut minima: Vec<MinimumLabel> = Vec::with_capacity(minima_idx.len());
    for &mi in &id_order {
        let (k, j) = label_of[mi].unwrap();
        let ci = minima_idx[mi];
        let p = &points[ci];
        let sigma = levels[k - 1];
        let comp = comp_of_label[mi];
        let j_saddles: Vec<usize> = if k == 1 {
            Vec::new()
        } else {
            (0..saddles.len())
                .filter(|&si| saddles[si].level == k && saddle_comps[si].contains(&comp))
                .collect()
        };
        if k > 1 && j_saddles.is_empty() {
            return Err(TopologyError::Consistency(format!(
                "label ({k},{j}) has an empty saddle set"
            )));
        }
        minima.push(MinimumLabel {
            crit_idx: ci,
            location: p.location.clone(),
            value: p.value,
            level: k,
            j_index: j,
            sigma,
            s_value: if sigma.is_infinite() {
                f64::INFINITY
            } else {
                sigma - p.value
            },
            component: comp,
            j_saddles,
            hat: None,
            type_ii: false,
        });
    }

    // hat-map and types
    for id in 0..minima.len() {
        let k = minima[id].level;
        if k == 1 && minima[id].j_index == 1 {
            continue; // global label
        }
        let comps_prev = &comps_at[k - 2];
        let node = grid.nearest_node(&minima[id].location);
        let comp = comps_prev[node];
        if comp == usize::MAX {
            return Err(TopologyError::Resolution(format!(
                "minimum {id} not inside any component one level up"
            )));
        }
        // the unique label of level <= k-1 inside this component
        let mut owner: Option<usize> = None;
        for (oid, other) in minima.iter().enumerate() {
            if other.level <= k - 1 {
                let onode = grid.nearest_node(&other.location);
                if comps_prev[onode] == comp {
                    if owner.is_some() {
                        return Err(TopologyError::Bijectivity(format!(
                            "two labels of level <= {} share a component",
                            k - 1
                        )));
                    }
                    owner = Some(oid);
                }
            }
        }
        let hat = owner.ok_or_else(|| {
            TopologyError::Bijectivity(format!("no label of level <= {} owns E_-(m)", k - 1))
        })?;
        let type_ii = (minima[hat].value - minima[id].value).abs() <= tol_value;
        if minima[hat].value > minima[id].value + tol_value {
            return Err(TopologyError::Consistency(
                "hat has larger value than its minimum".into(),
            ));
        }
        minima[id].hat = Some(hat);
        minima[id].type_ii = type_ii;
    }

    // equivalence classes, level by level
    let mut classes: Vec<Class> = Vec::new();
    for k in 2..=n_levels {
        let level_labels: Vec<usize> = (0..minima.len())
            .filter(|&id| minima[id].level == k)
            .collect();
        if level_labels.is_empty() {
            continue;
        }
        let comps = &comps_at[k - 1];
        // chain node set: level-k labels plus hats of its type-II labels
        let mut chain: Vec<usize> = level_labels.clone();
        for &id in &level_labels {
            if minima[id].type_ii {
                let h = minima[id].hat.unwrap();
                if !chain.contains(&h) {
                    chain.push(h);
                }
            }
        }
        let chain_comp: Vec<usize> = chain
            .iter()
            .map(|&id| comps[grid.nearest_node(&minima[id].location)])
            .collect();
        let mut ds = DisjointSet::new(chain.len());
        // same component, or components bridged by a level-k saddle
        for a in 0..chain.len() {
            for b in a + 1..chain.len() {
                let (ca, cb) = (chain_comp[a], chain_comp[b]);
                let touching = ca == cb
                    || (0..saddles.len()).any(|si| {
                        saddles[si].level == k
                            && ((saddle_comps[si][0] == ca && saddle_comps[si][1] == cb)
                                || (saddle_comps[si][0] == cb && saddle_comps[si][1] == ca))
                    });
                if touching {
                    ds.union(a, b);
                }
            }
        }
        let mut groups: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
        for (ci, &id) in chain.iter().enumerate() {
            if minima[id].level == k {
                groups.entry(ds.find(ci)).or_default().push(id);
            }
        }
        let mut level_classes: Vec<Vec<usize>> = groups.into_values().collect();
        level_classes.sort_by_key(|g| g.iter().map(|&id| minima[id].j_index).min());
        for mut members in level_classes {
            members.sort_by(|&a, &b| {
                minima[a]
                    .s_value
                    .partial_cmp(&minima[b].s_value)
                    .unwrap()
                    .then_with(|| (minima[a].level, minima[a].j_index)
                        .cmp(&(minima[b].level, minima[b].j_index)))
            });
            let hats: Vec<usize> = members
                .iter()
                .map(|&id| minima[id].hat.unwrap())
                .collect();
            if hats.windows(2).any(|w| w[0] != w[1]) {
                return Err(TopologyError::Consistency(
                    "hat not constant on an equivalence class".into(),
                ));
            }
            let hat = hats[0];
            let sigma = levels[k - 1];
            let extended: Vec<usize> = members.iter().copied().chain([hat]).collect();
            let mut j_sets = Vec::new();
            let mut h_groups = Vec::new();
            for &id in &extended {
                let comp = comps[grid.nearest_node(&minima[id].location)];
                let js: Vec<usize> = (0..saddles.len())
                    .filter(|&si| saddles[si].level == k && saddle_comps[si].contains(&comp))
                    .collect();
                if js.is_empty() {
                    return Err(TopologyError::Consistency(format!(
                        "empty j-set in class at level {k}"
                    )));
                }
                for &si in &js {
                    if (saddles[si].point.value - sigma).abs() > tol_value {
                        return Err(TopologyError::Consistency(
                            "saddle in a j-set off the class level".into(),
                        ));
                    }
                }
                let hg: Vec<usize> = (0..minima.len())
                    .filter(|&oid| {
                        comps[grid.nearest_node(&minima[oid].location)] == comp
                            && (minima[oid].value - minima[id].value).abs() <= tol_value
                    })
                    .collect();
                j_sets.push(js);
                h_groups.push(hg);
            }
            classes.push(Class {
                level: k,
                sigma,
                members,
                hat,
                j_sets,
                h_groups,
            });
        }
    }

    // partition check: classes cover all minima except the global label
    let covered: usize = classes.iter().map(|c| c.members.len()).sum();
    if covered + 1 != minima.len() {
        return Err(TopologyError::Consistency(format!(
            "classes cover {covered} minima, expected {}",
            minima.len() - 1
        )));
    }
    if minima.iter().filter(|m| m.s_value.is_infinite()).count() != 1 {
        return Err(TopologyError::Consistency(
            "expected exactly one minimum with S = +inf".into(),
        ));
    }

    Ok(LabeledLandscape {
        critical_points: points.to_vec(),
        minima,
        saddles: saddles.to_vec(),
        levels,
        classes,
        merge_events: events,
        tol_value,
        eps_level,
    })
}
