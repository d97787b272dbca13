//! Small dense GF(2) helpers on packed `u64` rows.

/// Number of `u64` words needed for `bits` bits.
pub fn words(bits: usize) -> usize {
    bits.div_ceil(64)
}

#[inline]
pub fn get(row: &[u64], i: usize) -> bool {
    (row[i / 64] >> (i % 64)) & 1 == 1
}

#[inline]
pub fn set(row: &mut [u64], i: usize, v: bool) {
    let m = 1u64 << (i % 64);
    if v {
        row[i / 64] |= m;
    } else {
        row[i / 64] &= !m;
    }
}

#[inline]
pub fn xor_into(dst: &mut [u64], src: &[u64]) {
    for (d, s) in dst.iter_mut().zip(src) {
        *d ^= s;
    }
}

/// Rank of a set of packed rows of width `bits`. Consumes the rows.
pub fn rank(mut rows: Vec<Vec<u64>>, bits: usize) -> usize {
    let mut r = 0;
    for col in 0..bits {
        let Some(p) = (r..rows.len()).find(|&i| get(&rows[i], col)) else {
            continue;
        };
        rows.swap(r, p);
        let pivot = rows[r].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i != r && get(row, col) {
                xor_into(row, &pivot);
            }
        }
        r += 1;
        if r == rows.len() {
            break;
        }
    }
    r
}
