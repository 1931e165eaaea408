//! Greedy breadth-first agglomeration.

use std::collections::VecDeque;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::Assignment;
use crate::error::{Error, Result};
use crate::mesh::LevelTopology;

/// Seeds are unused elements in seeded random order; unused neighbours are
/// absorbed first-in first-out until the agglomerate holds `s` elements.
pub fn greedy_coarsen(level: &LevelTopology, s: usize, seed: u64) -> Result<Assignment> {
    if s < 2 {
        return Err(Error::Config(format!("greedy needs a desired size of at least 2, got {s}")));
    }
    let n = level.num_elements();
    let dual = &level.dual;
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));

    let mut assign: Assignment = vec![None; n];
    let mut queued = vec![false; n];
    let mut frontier = VecDeque::new();
    let mut next_id = 0;
    for &e in &order {
        if assign[e].is_some() {
            continue;
        }
        let id = next_id;
        next_id += 1;
        assign[e] = Some(id);
        let mut size = 1;
        let push_unused = |x: usize, assign: &Assignment, queued: &mut Vec<bool>, frontier: &mut VecDeque<usize>| {
            for &u in dual.neighbors(x) {
                if assign[u].is_none() && !queued[u] {
                    queued[u] = true;
                    frontier.push_back(u);
                }
            }
        };
        push_unused(e, &assign, &mut queued, &mut frontier);
        while let Some(x) = frontier.pop_front() {
            queued[x] = false;
            assign[x] = Some(id);
            size += 1;
            if size == s {
                break;
            }
            push_unused(x, &assign, &mut queued, &mut frontier);
        }
        for x in frontier.drain(..) {
            queued[x] = false;
        }
    }
    Ok(assign)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::agglomerate::{count_agglomerates, testing};

    #[test]
    fn rejects_size_one() {
        assert!(greedy_coarsen(&testing::square(2), 1, 0).is_err());
    }

    #[test]
    fn large_size_gives_one_agglomerate() {
        let l = testing::square(4);
        let a = greedy_coarsen(&l, 1000, 3).unwrap();
        assert!(a.iter().all(|&x| x == Some(0)));
    }

    #[test]
    fn sizes_bounded_by_s() {
        let l = testing::level(&crate::mesh::MeshSpec::reference(2, 12));
        for s in [2, 5, 9] {
            let a = greedy_coarsen(&l, s, 1).unwrap();
            let k = count_agglomerates(&a);
            let mut sizes = vec![0; k];
            for x in a.iter().flatten() {
                sizes[*x] += 1;
            }
            assert!(sizes.iter().all(|&z| z <= s && z >= 1));
        }
    }
}
