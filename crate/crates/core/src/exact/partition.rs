//! Packed connectivity states over a bag.
//!
//! A state assigns each bag position a label: 0 if the vertex is outside the
//! partial solution, otherwise its block number. Labels are canonical when
//! blocks are numbered 1, 2, ... in order of first occurrence. Each label
//! takes five bits of a `u128`.

pub(crate) const MAX_BAG: usize = 25;
const BITS: u32 = 5;
const MASK: u128 = (1 << BITS) - 1;

pub(crate) type Labels = [u8; MAX_BAG];

pub(crate) fn decode(key: u128, len: usize) -> Labels {
    let mut out = [0u8; MAX_BAG];
    for (p, slot) in out.iter_mut().enumerate().take(len) {
        *slot = ((key >> (BITS * p as u32)) & MASK) as u8;
    }
    out
}

/// Canonicalises `labels[..len]` in place and packs it.
pub(crate) fn encode_canonical(labels: &mut Labels, len: usize) -> u128 {
    let mut remap = [0u8; 2 * MAX_BAG + 2];
    let mut next = 0u8;
    let mut key = 0u128;
    for (p, l) in labels.iter_mut().enumerate().take(len) {
        if *l != 0 {
            let slot = &mut remap[*l as usize];
            if *slot == 0 {
                next += 1;
                *slot = next;
            }
            *l = *slot;
            key |= (*l as u128) << (BITS * p as u32);
        }
    }
    key
}

/// Positions holding a vertex of the partial solution, as a bitmask.
pub(crate) fn support(key: u128, len: usize) -> u32 {
    let mut m = 0u32;
    for p in 0..len {
        if (key >> (BITS * p as u32)) & MASK != 0 {
            m |= 1 << p;
        }
    }
    m
}

/// Bell numbers, used for table-size sanity bounds.
pub fn bell(n: usize) -> u128 {
    let mut row = vec![1u128];
    for _ in 0..n {
        let mut next = vec![*row.last().unwrap()];
        for &x in &row {
            let last = *next.last().unwrap();
            next.push(last + x);
        }
        row = next;
    }
    row[0]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bell_numbers() {
        let expected = [1u128, 1, 2, 5, 15, 52, 203, 877, 4140, 21147];
        for (n, &b) in expected.iter().enumerate() {
            assert_eq!(bell(n), b);
        }
    }

    #[test]
    fn canonical_form_is_first_occurrence() {
        let mut l = [0u8; MAX_BAG];
        l[..5].copy_from_slice(&[3, 0, 1, 3, 7]);
        let key = encode_canonical(&mut l, 5);
        assert_eq!(&l[..5], &[1, 0, 2, 1, 3]);
        assert_eq!(&decode(key, 5)[..5], &[1, 0, 2, 1, 3]);
        assert_eq!(support(key, 5), 0b11101);
    }

    #[test]
    fn equal_partitions_share_a_key() {
        let mut a = [0u8; MAX_BAG];
        let mut b = [0u8; MAX_BAG];
        a[..4].copy_from_slice(&[2, 2, 5, 0]);
        b[..4].copy_from_slice(&[9, 9, 1, 0]);
        assert_eq!(encode_canonical(&mut a, 4), encode_canonical(&mut b, 4));
    }

    #[test]
    fn full_bag_fits() {
        let mut l = [0u8; MAX_BAG];
        for (i, x) in l.iter_mut().enumerate() {
            *x = (i + 1) as u8;
        }
        let key = encode_canonical(&mut l, MAX_BAG);
        assert_eq!(decode(key, MAX_BAG), l);
    }
}
