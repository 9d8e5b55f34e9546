//! Breadth-first flood-fill reimplementation of the sublevel-component
//! queries. Slower than the sweep but independent of it; used to
//! cross-check the labeling on randomized inputs.

use std::collections::VecDeque;

use crate::potential::{CriticalPoint, Potential};

use super::filtration::Filtration;
use super::labeling::{
    descend_two_sides, label_with_components, value_scales, LabeledLandscape, SeparatingSaddle,
    TopologyParams,
};
use super::TopologyError;

/// Components of `{W < threshold}` by BFS; same output convention as
/// [`Filtration::components_below`] (minimal node index as representative,
/// `usize::MAX` above the threshold).
pub fn flood_components(filtration: &Filtration, threshold: f64) -> Vec<usize> {
    let n = filtration.values.len();
    let mut out = vec![usize::MAX; n];
    let mut visited = vec![false; n];
    let mut nb = [0usize; 4];
    let mut queue = VecDeque::new();
    for start in 0..n {
        if visited[start] || filtration.values[start] >= threshold {
            continue;
        }
        // `start` is the smallest unvisited node index in its component
        visited[start] = true;
        queue.push_back(start);
        while let Some(u) = queue.pop_front() {
            out[u] = start;
            let cnt = filtration.grid.neighbors(u, &mut nb);
            for &v in &nb[..cnt] {
                if !visited[v] && filtration.values[v] < threshold {
                    visited[v] = true;
                    queue.push_back(v);
                }
            }
        }
    }
    out
}

/// Full landscape labeling with every component query answered by BFS and
/// no reliance on the merge-event sweep.
pub fn build_landscape_oracle(
    potential: &Potential,
    filtration: &Filtration,
    points: &[CriticalPoint],
    params: &TopologyParams,
) -> Result<LabeledLandscape, TopologyError> {
    let (tol_value, eps_level) = value_scales(points)?;
    let grid = &filtration.grid;

    let mut saddles: Vec<SeparatingSaddle> = Vec::new();
    for p in points.iter().filter(|p| p.is_saddle()) {
        let descent = descend_two_sides(potential, filtration, p, eps_level)?;
        let comps = flood_components(filtration, p.value - eps_level);
        let c0 = comps[grid.nearest_node(&descent[0])];
        let c1 = comps[grid.nearest_node(&descent[1])];
        if c0 == usize::MAX || c1 == usize::MAX {
            return Err(TopologyError::Resolution(format!(
                "descent targets of saddle at {:?} not resolved on the grid",
                p.location
            )));
        }
        if c0 != c1 {
            saddles.push(SeparatingSaddle {
                point: p.clone(),
                level: 0,
                descent,
            });
        }
    }
    if saddles.is_empty() {
        return Err(TopologyError::NoSeparatingSaddles);
    }

    let comp_fn = |threshold: f64| flood_components(filtration, threshold);
    label_with_components(
        filtration,
        points,
        &mut saddles,
        Vec::new(),
        tol_value,
        eps_level,
        params,
        &comp_fn,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potential::Domain;

    #[test]
    fn flood_matches_union_find() {
        let p = Potential::parse(
            "(x^2-1)^2",
            1,
            Domain::new(vec![[-2.5, 2.5]]).unwrap(),
        )
        .unwrap();
        let f = Filtration::build(&p, 257, None).unwrap();
        for t in [0.1, 0.5, 0.999, 1.5] {
            assert_eq!(flood_components(&f, t), f.components_below(t), "t={t}");
        }
    }
}
