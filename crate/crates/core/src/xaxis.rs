//! Closed paths on the x-axis, their corner sequences, and splicing.
//!
//! Slot `i` of a rotation-`n` x-axis path covers `(pi/2 + i pi, pi/2 + (i+1) pi)`
//! and carries at most one edge: pointing west for even `i`, east for odd `i`.
//! The corner sequence lists the x-coordinates at `pi/2 + i pi`.

use crate::chain::Chain;
use crate::error::{domain, Result};
use crate::generator::{Generator, Label};
use crate::lattice::{Direction, GenericAngle};
use crate::path::{x_axis_path, x_slot_angle, AdmissiblePath};

/// Corner sequence `a_0, ..., a_{2n-1}` of a closed x-axis path.
pub fn corner_sequence(p: &AdmissiblePath) -> Result<Vec<i64>> {
    let Some(n) = p.rotation() else {
        return domain("corner sequences need a closed path");
    };
    if !p.on_x_axis() || !p.kind().gamma().is_zero() {
        return domain("path is not a closed x-axis path");
    }
    Ok((0..2 * n)
        .map(|i| {
            let d = if i % 2 == 0 { Direction::NORTH } else { Direction::SOUTH };
            p.value_at(GenericAngle::new(i / 2, d)).x
        })
        .collect())
}

/// Labels per slot; empty slots read as e.
pub fn slot_labels(g: &Generator) -> Result<Vec<Label>> {
    let p = g.path();
    let n = p.rotation().unwrap_or(0);
    let mut out = vec![Label::E; 2 * n as usize];
    for (k, e) in p.edges().iter().enumerate() {
        let slot = (0..out.len()).find(|&i| x_slot_angle(i) == e.angle);
        match slot {
            Some(i) if g.is_h(k) => out[i] = Label::H,
            Some(_) => {}
            None => return domain("edge does not fit an x-axis slot"),
        }
    }
    Ok(out)
}

/// Generator from a corner sequence and per-slot labels, h edges in slot order.
/// Returns `None` when an h label sits on an empty slot.
pub fn x_generator(seq: &[i64], labels: &[Label]) -> Result<Option<Generator>> {
    if !seq.len().is_multiple_of(2) || seq.is_empty() || labels.len() != seq.len() {
        return domain("x-axis generator needs 2n corners and 2n labels");
    }
    let n = (seq.len() / 2) as i64;
    let p = x_axis_path(seq, n)?;
    let mut h = 0u64;
    let mut k = 0;
    for i in 0..seq.len() {
        let empty = seq[i] == seq[(i + 1) % seq.len()];
        if empty {
            if labels[i] == Label::H {
                return Ok(None);
            }
            continue;
        }
        if labels[i] == Label::H {
            h |= 1 << k;
        }
        k += 1;
    }
    Ok(Some(Generator::new(p, h)?))
}

/// Splicing `S: CX(n) -> CX(n+1)`, inserting two h edges between the last two slots.
pub fn splice(g: &Generator) -> Result<Chain> {
    let seq = corner_sequence(g.path())?;
    let labels = slot_labels(g)?;
    let len = seq.len();
    let (a, b, c) = (seq[len - 2], seq[len - 1], seq[0]);
    let (l1, l2) = (labels[len - 2], labels[len - 1]);
    let i_hi = if l1 == Label::H { a - 1 } else { a };
    let j_hi = if l2 == Label::H { c - 1 } else { c };
    let mut out = Chain::zero();
    for i in b..=i_hi {
        for j in b..=j_hi {
            let m = i + j - b + 1;
            let mut s = seq[..len - 1].to_vec();
            s.extend([i, m, j]);
            let mut ls = labels[..len - 2].to_vec();
            ls.extend([l1, Label::H, Label::H, l2]);
            if let Some(x) = x_generator(&s, &ls)? {
                out.add_term(x, 1);
            }
        }
    }
    Ok(out)
}

/// Alternating corner sequences in `[0, m]^{2n}` with total length at most `max_len`.
pub fn corner_sequences(n: usize, m: i64, max_len: i64) -> Vec<Vec<i64>> {
    fn rec(n2: usize, m: i64, budget: i64, cur: &mut Vec<i64>, out: &mut Vec<Vec<i64>>) {
        let i = cur.len();
        if i == n2 {
            let close = cur[n2 - 1].abs_diff(cur[0]) as i64;
            if cur[n2 - 1] <= cur[0] && close <= budget {
                out.push(cur.clone());
            }
            return;
        }
        let range: Vec<i64> = if i == 0 {
            (0..=m).collect()
        } else if i % 2 == 1 {
            (0..=cur[i - 1]).collect()
        } else {
            (cur[i - 1]..=m).collect()
        };
        for x in range {
            let cost = if i == 0 { 0 } else { (x - cur[i - 1]).abs() };
            if cost > budget {
                continue;
            }
            cur.push(x);
            rec(n2, m, budget - cost, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(2 * n, m, max_len, &mut Vec::new(), &mut out);
    out
}

/// All generators of rotation `n` on the x-axis with corners in `[0, m]`
/// and total length at most `max_len`.
pub fn x_axis_generators(n: usize, m: i64, max_len: i64) -> Result<Vec<Generator>> {
    let mut out = Vec::new();
    for s in corner_sequences(n, m, max_len) {
        let p = x_axis_path(&s, n as i64)?;
        let k = p.num_edges();
        for h in 0..1u64 << k {
            out.push(Generator::new(p.clone(), h)?);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generator::Label::{E, H};

    #[test]
    fn corner_sequence_round_trip() {
        let s = vec![3, 1, 4, 0];
        let p = x_axis_path(&s, 2).unwrap();
        assert_eq!(corner_sequence(&p).unwrap(), s);
        let g = x_generator(&s, &[H, E, E, H]).unwrap().unwrap();
        assert_eq!(slot_labels(&g).unwrap(), vec![H, E, E, H]);
        assert!(x_generator(&[1, 1], &[H, E]).unwrap().is_none());
    }

    #[test]
    fn splice_two_gon() {
        // e_1^0 e_0^1 splices to four terms.
        let g = x_generator(&[1, 0], &[E, E]).unwrap().unwrap();
        let s = splice(&g).unwrap();
        assert_eq!(s.len(), 4);
        for (x, &c) in s.iter() {
            assert_eq!(c, 1);
            assert_eq!(x.num_h(), 2);
            assert_eq!(x.index().unwrap(), g.index().unwrap());
        }
    }

    #[test]
    fn sequence_count() {
        // n = 1: pairs a0 >= a1 in [0,2].
        assert_eq!(corner_sequences(1, 2, 100).len(), 6);
        assert!(corner_sequences(2, 3, 2).iter().all(|s| s.len() == 4));
    }
}
