//! Multi-indices as 7-bit masks. Bit `i` stands for basis index `i + 1`.

use std::sync::OnceLock;

pub const FULL: u8 = 0x7f;

pub fn degree(m: u8) -> usize {
    m.count_ones() as usize
}

/// Zero-based positions of the set bits, ascending.
pub fn indices(m: u8) -> Vec<usize> {
    (0..7).filter(|i| m >> i & 1 == 1).collect()
}

fn tables() -> &'static ([Vec<u8>; 8], [usize; 128]) {
    static T: OnceLock<([Vec<u8>; 8], [usize; 128])> = OnceLock::new();
    T.get_or_init(|| {
        let mut by_deg: [Vec<u8>; 8] = Default::default();
        // lexicographic order of the sorted index lists
        let mut all: Vec<u8> = (0..128u8).collect();
        all.sort_by_key(|&m| indices(m));
        for m in all {
            by_deg[degree(m)].push(m);
        }
        let mut pos = [0usize; 128];
        for list in &by_deg {
            for (k, &m) in list.iter().enumerate() {
                pos[m as usize] = k;
            }
        }
        (by_deg, pos)
    })
}

/// All masks of degree `p` in lexicographic order of their index lists.
pub fn masks_of_degree(p: usize) -> &'static [u8] {
    &tables().0[p]
}

/// Position of `m` inside [`masks_of_degree`] for its degree.
pub fn position(m: u8) -> usize {
    tables().1[m as usize]
}

/// Sign of e^A ∧ e^B relative to e^{A∪B}; zero if the sets meet.
pub fn merge_sign(a: u8, b: u8) -> i32 {
    if a & b != 0 {
        return 0;
    }
    let mut s = 0u32;
    let mut bb = b;
    while bb != 0 {
        let i = bb.trailing_zeros();
        s += (a >> (i + 1)).count_ones();
        bb &= bb - 1;
    }
    if s % 2 == 0 {
        1
    } else {
        -1
    }
}

/// Mask and reordering sign of a list of one-based indices, `None` on a repeat or
/// an out-of-range entry.
pub fn from_indices(idx: &[usize]) -> Option<(u8, i32)> {
    let mut m = 0u8;
    let mut sign = 1;
    for (k, &i) in idx.iter().enumerate() {
        if !(1..=7).contains(&i) {
            return None;
        }
        let bit = 1u8 << (i - 1);
        if m & bit != 0 {
            return None;
        }
        m |= bit;
        for &j in &idx[k + 1..] {
            if j < i {
                sign = -sign;
            }
        }
    }
    Some((m, sign))
}

/// One-based indices of a mask.
pub fn to_one_based(m: u8) -> Vec<usize> {
    indices(m).into_iter().map(|i| i + 1).collect()
}
