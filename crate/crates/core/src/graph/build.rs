use super::{Family, Graph};
use crate::error::{invalid, Error, Result};

/// Default vertex cap, overridable by callers (the CLI reads it from the
/// environment).
pub const DEFAULT_MAX_VERTICES: usize = 2_000_000;

pub const LAMPLIGHTER_MAX_LENGTH: usize = 20;

fn check_cap(requested: u128, cap: usize) -> Result<usize> {
    if requested > cap as u128 {
        Err(Error::CapExceeded { requested, cap })
    } else {
        Ok(requested as usize)
    }
}

/// Product of cycles with side lengths `dims`.
///
/// Coordinates are row-major: `id = sum_i c_i * stride_i` with the last
/// coordinate varying fastest.
pub(super) fn torus(dims: &[usize], cap: usize) -> Result<Graph> {
    if dims.is_empty() || dims.len() > 4 {
        return Err(invalid(format!("torus needs 1 to 4 dimensions, got {}", dims.len())));
    }
    if let Some(side) = dims.iter().find(|&&s| s < 3) {
        return Err(invalid(format!("torus side {side} < 3 would create multi-edges")));
    }
    let n = check_cap(dims.iter().map(|&s| s as u128).product(), cap)?;

    let mut strides = vec![1usize; dims.len()];
    for i in (0..dims.len() - 1).rev() {
        strides[i] = strides[i + 1] * dims[i + 1];
    }
    let mut edges = Vec::with_capacity(n * dims.len());
    for v in 0..n {
        for (&side, &stride) in dims.iter().zip(&strides) {
            let coord = (v / stride) % side;
            let next = if coord + 1 == side { v - coord * stride } else { v + stride };
            edges.push((v, next));
        }
    }
    Graph::from_edges(n, &edges, Family::Torus { dims: dims.to_vec() })
}

pub(super) fn cycle(length: usize, cap: usize) -> Result<Graph> {
    if length < 3 {
        return Err(invalid(format!("cycle length {length} < 3")));
    }
    let n = check_cap(length as u128, cap)?;
    let edges: Vec<_> = (0..n).map(|v| (v, (v + 1) % n)).collect();
    Graph::from_edges(n, &edges, Family::Cycle { length })
}

/// Number of vertices of the radius-`r` ball in the `d`-regular tree.
pub(crate) fn tree_ball_size(degree: usize, radius: usize) -> u128 {
    let mut total: u128 = 1;
    let mut level: u128 = degree as u128;
    for _ in 0..radius {
        total = total.saturating_add(level);
        level = level.saturating_mul(degree as u128 - 1);
    }
    total
}

/// Depth of vertex `v` in breadth-first numbering.
pub(crate) fn tree_depth(degree: usize, v: usize) -> usize {
    let mut start = 1usize;
    let mut level = degree;
    let mut depth = 0;
    while v >= start {
        start += level;
        level *= degree - 1;
        depth += 1;
    }
    depth
}

/// Rooted ball of radius `radius` in the `degree`-regular tree.
///
/// Vertices are numbered breadth-first: the root is 0, its children are
/// `1..=degree`, and children of each level follow in parent order.
/// Leaves at depth `radius` have degree 1.
pub(super) fn tree_ball(degree: usize, radius: usize, cap: usize) -> Result<Graph> {
    if degree < 3 {
        return Err(invalid(format!("tree degree {degree} < 3")));
    }
    if radius < 1 {
        return Err(invalid("tree radius must be at least 1"));
    }
    let n = check_cap(tree_ball_size(degree, radius), cap)?;
    let mut edges = Vec::with_capacity(n - 1);
    let mut next_id = 1usize;
    // parents in BFS order; the root has `degree` children, others `degree - 1`
    for parent in 0..n {
        let children = if parent == 0 { degree } else { degree - 1 };
        if next_id >= n {
            break;
        }
        for _ in 0..children {
            edges.push((parent, next_id));
            next_id += 1;
        }
    }
    debug_assert_eq!(next_id, n);
    Graph::from_edges(
        n,
        &edges,
        Family::TreeBall { degree, radius },
    )
}

/// Lamplighter window of length `L`.
///
/// Vertex `(lamps, position)` has id `lamps * L + position`, with lamp `i`
/// stored in bit `i`. Edges toggle the lamp under the lighter or move it one
/// step; moves stop at the ends of the window.
pub(super) fn lamplighter_segment(length: usize, cap: usize) -> Result<Graph> {
    if length == 0 || length > LAMPLIGHTER_MAX_LENGTH {
        return Err(invalid(format!(
            "lamplighter length must be in 1..={LAMPLIGHTER_MAX_LENGTH}, got {length}"
        )));
    }
    let n = check_cap((1u128 << length) * length as u128, cap)?;
    let mut edges = Vec::with_capacity(n * 3 / 2);
    for lamps in 0..(1usize << length) {
        for pos in 0..length {
            let v = lamps * length + pos;
            if lamps & (1 << pos) == 0 {
                edges.push((v, (lamps | (1 << pos)) * length + pos));
            }
            if pos + 1 < length {
                edges.push((v, v + 1));
            }
        }
    }
    Graph::from_edges(n, &edges, Family::LamplighterSegment { length })
}
