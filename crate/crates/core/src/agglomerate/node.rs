//! Node-centred agglomeration.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::Assignment;
use crate::mesh::LevelTopology;

/// Interior nodes are visited in seeded random order, then boundary nodes.
/// Each unused node claims every element containing it as a new
/// agglomerate, and all nodes of those elements become used.
pub fn node_coarsen(level: &LevelTopology, seed: u64) -> Assignment {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let nn = level.num_nodes();
    let mut interior: Vec<usize> = (0..nn).filter(|&n| !level.node_on_boundary[n]).collect();
    let mut boundary: Vec<usize> = (0..nn).filter(|&n| level.node_on_boundary[n]).collect();
    interior.shuffle(&mut rng);
    boundary.shuffle(&mut rng);

    let mut used = vec![false; nn];
    let mut assign: Assignment = vec![None; level.num_elements()];
    let mut next_id = 0;
    for n in interior.into_iter().chain(boundary) {
        if used[n] {
            continue;
        }
        let id = next_id;
        let mut claimed = false;
        for &e in &level.node_elements[n] {
            if assign[e].is_none() {
                assign[e] = Some(id);
                claimed = true;
                for &m in &level.element_nodes[e] {
                    used[m] = true;
                }
            }
        }
        used[n] = true;
        if claimed {
            next_id += 1;
        }
    }
    assign
}
