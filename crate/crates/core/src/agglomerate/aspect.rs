//! Aspect-ratio driven agglomeration: greedy growth followed by local
//! refinement of the surface-to-volume objective.

use super::cleanup::cleanup;
use super::greedy::greedy_coarsen;
use super::Assignment;
use crate::error::Result;
use crate::mesh::LevelTopology;

/// Maximum number of refinement passes.
pub const MAX_PASSES: usize = 10;

/// Allowed agglomerate sizes `[max(2, s/2), 2s]` during refinement.
pub fn size_band(s: usize) -> (usize, usize) {
    ((s / 2).max(2), 2 * s)
}

/// Per-agglomerate external surface (domain boundary included) and volume.
pub(super) fn surfaces_and_volumes(level: &LevelTopology, labels: &[usize]) -> (Vec<f64>, Vec<f64>) {
    let k = labels.iter().max().map_or(0, |m| m + 1);
    let mut area = vec![0.0; k];
    let mut volume = vec![0.0; k];
    for (e, &a) in labels.iter().enumerate() {
        volume[a] += level.element_volumes[e];
    }
    for face in &level.faces {
        let a = labels[face.left];
        match face.right.map(|r| labels[r]) {
            None => area[a] += face.area,
            Some(b) if b != a => {
                area[a] += face.area;
                area[b] += face.area;
            }
            _ => {}
        }
    }
    (area, volume)
}

/// Sum over agglomerates of squared external surface divided by volume.
pub fn aspect_objective(level: &LevelTopology, labels: &[usize]) -> f64 {
    let (area, volume) = surfaces_and_volumes(level, labels);
    area.iter().zip(&volume).filter(|(_, v)| **v > 0.0).map(|(a, v)| a * a / v).sum()
}

/// Greedy agglomeration of size `s`, cleaned up and then refined.
pub fn aspect_ratio_coarsen(level: &LevelTopology, s: usize, seed: u64) -> Result<Assignment> {
    let raw = greedy_coarsen(level, s, seed)?;
    let (initial, _) = cleanup(level, &raw);
    let mut labels = initial.element_to_agg().to_vec();
    refine_aspect(level, &mut labels, s);
    Ok(labels.into_iter().map(Some).collect())
}

/// Moves single elements to adjacent agglomerates while that strictly lowers
/// [`aspect_objective`], keeping sizes inside [`size_band`] and every source
/// agglomerate connected. Returns the number of moves made.
pub fn refine_aspect(level: &LevelTopology, labels: &mut [usize], s: usize) -> usize {
    let (lo, hi) = size_band(s);
    let (mut area, mut volume) = surfaces_and_volumes(level, labels);
    let mut sizes = vec![0usize; area.len()];
    for &a in labels.iter() {
        sizes[a] += 1;
    }
    let mut members: Vec<Vec<usize>> = vec![Vec::new(); area.len()];
    for (e, &a) in labels.iter().enumerate() {
        members[a].push(e);
    }
    let term = |ar: f64, v: f64| if v > 0.0 { ar * ar / v } else { 0.0 };
    let mut moves = 0;
    let mut toward: Vec<(usize, f64)> = Vec::new();
    for _ in 0..MAX_PASSES {
        let mut moved = false;
        for e in 0..labels.len() {
            let a = labels[e];
            if sizes[a] <= lo {
                continue;
            }
            // Face area of e toward each agglomerate; usize::MAX collects boundary faces.
            toward.clear();
            let mut total = 0.0;
            for &f in &level.element_faces[e] {
                let face = &level.faces[f];
                total += face.area;
                let key = match face.right {
                    None => usize::MAX,
                    Some(r) => labels[if face.left == e { r } else { face.left }],
                };
                match toward.iter_mut().find(|t| t.0 == key) {
                    Some(t) => t.1 += face.area,
                    None => toward.push((key, face.area)),
                }
            }
            let s_a = toward.iter().find(|t| t.0 == a).map_or(0.0, |t| t.1);
            let v_e = level.element_volumes[e];
            let before_a = term(area[a], volume[a]);
            let mut best: Option<(usize, f64, f64, f64)> = None;
            for &(b, s_b) in &toward {
                if b == a || b == usize::MAX || sizes[b] >= hi {
                    continue;
                }
                let new_a = area[a] - (total - s_a) + s_a;
                let new_b = area[b] - s_b + (total - s_b);
                let delta = term(new_a, volume[a] - v_e) + term(new_b, volume[b] + v_e) - before_a - term(area[b], volume[b]);
                let scale = before_a + term(area[b], volume[b]);
                if delta < -1e-12 * scale && best.map_or(true, |x| delta < x.1) {
                    best = Some((b, delta, new_a, new_b));
                }
            }
            let Some((b, _, new_a, new_b)) = best else { continue };
            if !stays_connected(level, labels, &members[a], e) {
                continue;
            }
            labels[e] = b;
            area[a] = new_a;
            area[b] = new_b;
            volume[a] -= v_e;
            volume[b] += v_e;
            sizes[a] -= 1;
            sizes[b] += 1;
            members[a].retain(|&x| x != e);
            members[b].push(e);
            moves += 1;
            moved = true;
        }
        if !moved {
            break;
        }
    }
    moves
}

/// Whether `members` minus `removed` is still connected.
fn stays_connected(level: &LevelTopology, labels: &[usize], members: &[usize], removed: usize) -> bool {
    let a = labels[removed];
    let Some(&start) = members.iter().find(|&&x| x != removed) else { return true };
    let mut seen = vec![start];
    let mut i = 0;
    while i < seen.len() {
        let x = seen[i];
        i += 1;
        for &u in level.dual.neighbors(x) {
            if u != removed && labels[u] == a && !seen.contains(&u) {
                seen.push(u);
            }
        }
    }
    seen.len() == members.len() - 1
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::agglomerate::testing;

    #[test]
    fn band() {
        assert_eq!(size_band(2), (2, 4));
        assert_eq!(size_band(8), (4, 16));
        assert_eq!(size_band(25), (12, 50));
    }

    #[test]
    fn objective_of_unit_square_agglomerate() {
        let l = testing::square(4);
        let one = vec![0; l.num_elements()];
        assert!((aspect_objective(&l, &one) - 16.0).abs() < 1e-12);
    }

    #[test]
    fn single_agglomerate_unchanged() {
        let l = testing::square(4);
        let mut labels = vec![0; l.num_elements()];
        assert_eq!(refine_aspect(&l, &mut labels, 8), 0);
        assert!(labels.iter().all(|&x| x == 0));
    }

    #[test]
    fn refinement_does_not_increase_objective() {
        let l = testing::square(16);
        for seed in 0..5 {
            let raw = greedy_coarsen(&l, 8, seed).unwrap();
            let (agg, _) = cleanup(&l, &raw);
            let mut labels = agg.element_to_agg().to_vec();
            let before = aspect_objective(&l, &labels);
            refine_aspect(&l, &mut labels, 8);
            assert!(aspect_objective(&l, &labels) <= before);
        }
    }
}
