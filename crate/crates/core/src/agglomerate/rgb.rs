//! Red-grey-black colouring agglomeration, after Wabro.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::Assignment;
use crate::mesh::LevelTopology;

#[derive(Clone, Copy, PartialEq, Eq)]
enum Colour {
    None,
    Black,
    Red,
    Grey,
}

/// Black seeds are picked in seeded random order; each black element and the
/// neighbours it turned red form one agglomerate. Grey elements then join the
/// neighbouring agglomerate they share most faces with, ties going to the
/// smaller agglomerate and then the lower id.
pub fn rgb_coarsen(level: &LevelTopology, seed: u64) -> Assignment {
    let n = level.num_elements();
    let dual = &level.dual;
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));

    let mut colour = vec![Colour::None; n];
    let mut assign: Assignment = vec![None; n];
    let mut sizes: Vec<usize> = Vec::new();
    for &e in &order {
        if colour[e] != Colour::None {
            continue;
        }
        let id = sizes.len();
        colour[e] = Colour::Black;
        assign[e] = Some(id);
        let mut size = 1;
        let mut reds = Vec::new();
        for &u in dual.neighbors(e) {
            if matches!(colour[u], Colour::None | Colour::Grey) {
                colour[u] = Colour::Red;
                assign[u] = Some(id);
                size += 1;
                reds.push(u);
            }
        }
        for &r in &reds {
            for &u in dual.neighbors(r) {
                if colour[u] == Colour::None {
                    colour[u] = Colour::Grey;
                }
            }
        }
        sizes.push(size);
    }

    let mut links: Vec<(usize, usize)> = Vec::new();
    for e in 0..n {
        if colour[e] != Colour::Grey {
            continue;
        }
        links.clear();
        for (u, count) in shared_faces(level, e) {
            if let Some(a) = assign[u] {
                match links.iter_mut().find(|l| l.0 == a) {
                    Some(l) => l.1 += count,
                    None => links.push((a, count)),
                }
            }
        }
        let best = links
            .iter()
            .max_by(|x, y| x.1.cmp(&y.1).then(sizes[y.0].cmp(&sizes[x.0])).then(y.0.cmp(&x.0)));
        if let Some(&(a, _)) = best {
            assign[e] = Some(a);
            sizes[a] += 1;
        }
    }
    assign
}

/// `(neighbour, number of shared level faces)` for element `e`.
pub(super) fn shared_faces(level: &LevelTopology, e: usize) -> Vec<(usize, usize)> {
    let mut counts: Vec<(usize, usize)> = Vec::new();
    for &f in &level.element_faces[e] {
        let face = &level.faces[f];
        if let Some(r) = face.right {
            let other = if face.left == e { r } else { face.left };
            match counts.iter_mut().find(|c| c.0 == other) {
                Some(c) => c.1 += 1,
                None => counts.push((other, 1)),
            }
        }
    }
    counts
}
