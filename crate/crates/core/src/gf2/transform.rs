use super::BitVec;
use crate::error::{Error, Result};

const STAGE_MASKS: [u64; 6] = [
    0x5555_5555_5555_5555,
    0x3333_3333_3333_3333,
    0x0F0F_0F0F_0F0F_0F0F,
    0x00FF_00FF_00FF_00FF,
    0x0000_FFFF_0000_FFFF,
    0x0000_0000_FFFF_FFFF,
];

pub(crate) fn check_length(n: usize) -> Result<u32> {
    if n == 0 || !n.is_power_of_two() {
        return Err(Error::InvalidDimension(format!(
            "length {n} is not a power of two"
        )));
    }
    Ok(n.trailing_zeros())
}

/// `x = u * G_N` with `G_N` the n-fold Kronecker power of `[[1,0],[1,1]]`,
/// natural index order. Self-inverse.
pub fn polar_transform(u: &BitVec) -> Result<BitVec> {
    check_length(u.len())?;
    let mut x = u.clone();
    transform_in_place(&mut x);
    Ok(x)
}

pub(crate) fn transform_in_place(x: &mut BitVec) {
    let n = x.len();
    let words = x.words_mut();
    // in-word stages
    let inner = n.min(64);
    let mut h = 1;
    let mut s = 0;
    while h < inner {
        let m = STAGE_MASKS[s];
        for w in words.iter_mut() {
            *w ^= (*w >> h) & m;
        }
        h <<= 1;
        s += 1;
    }
    // word-level stages
    let nw = words.len();
    let mut hw = 1;
    while hw < nw {
        for k in 0..nw {
            if k & hw == 0 {
                words[k] ^= words[k + hw];
            }
        }
        hw <<= 1;
    }
}

/// Polar transform of a length-`n` vector packed in a single word (`n <= 64`).
#[inline]
pub fn polar_transform_u64(mut w: u64, n: usize) -> u64 {
    let mut h = 1;
    let mut s = 0;
    while h < n {
        w ^= (w >> h) & STAGE_MASKS[s];
        h <<= 1;
        s += 1;
    }
    w
}

/// Row `g_i` of `G_N`: ones exactly at the indices `j` whose binary
/// expansion is contained in that of `i`.
pub fn row(i: usize, n: usize) -> Result<BitVec> {
    check_length(n)?;
    if i >= n {
        return Err(Error::IndexOutOfRange { index: i, len: n });
    }
    let mut g = BitVec::unit(n, i);
    transform_in_place(&mut g);
    Ok(g)
}

/// Weight of `g_i`, which is `2^popcount(i)`.
#[inline]
pub fn row_weight(i: usize) -> usize {
    1usize << i.count_ones()
}

/// XOR of the rows of `G_N` selected by `indices`.
pub fn combine_rows(indices: &[usize], n: usize) -> Result<BitVec> {
    check_length(n)?;
    let u = BitVec::from_indices(n, indices.iter().copied())?;
    polar_transform(&u)
}

/// `|supp(bin(j)) \ supp(bin(i))|`
#[inline]
pub fn support_excess(j: usize, i: usize) -> u32 {
    (j & !i).count_ones()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn naive_transform(u: &BitVec) -> BitVec {
        let n = u.len();
        let mut x = BitVec::zeros(n);
        for i in u.support() {
            for j in 0..n {
                if j & i == j {
                    x.flip(j);
                }
            }
        }
        x
    }

    #[test]
    fn zero_maps_to_zero() {
        assert!(polar_transform(&BitVec::zeros(8)).unwrap().is_zero());
    }

    #[test]
    fn second_row_of_kernel() {
        let x = polar_transform(&BitVec::parse_bits("01").unwrap()).unwrap();
        assert_eq!(x.to_string(), "11");
    }

    #[test]
    fn rejects_non_power_of_two() {
        assert!(matches!(
            polar_transform(&BitVec::zeros(12)),
            Err(Error::InvalidDimension(_))
        ));
        assert!(row(3, 6).is_err());
        assert!(matches!(row(8, 8), Err(Error::IndexOutOfRange { .. })));
    }

    #[test]
    fn first_and_last_rows() {
        for n in [2, 8, 64, 256] {
            assert_eq!(row(0, n).unwrap().weight(), 1);
            assert_eq!(row(n - 1, n).unwrap(), BitVec::ones(n));
        }
    }

    #[test]
    fn row_24_of_32() {
        assert_eq!(row(24, 32).unwrap().weight(), 4);
    }

    #[test]
    fn combined_rows_of_32() {
        assert_eq!(combine_rows(&[24, 25], 32).unwrap().weight(), 4);
        assert_eq!(combine_rows(&[24, 25, 27, 31], 32).unwrap().weight(), 20);
        assert!(combine_rows(&[], 32).unwrap().is_zero());
    }

    #[test]
    fn row_weight_law_exhaustive() {
        let mut n = 2;
        while n <= 1024 {
            for i in 0..n {
                assert_eq!(row(i, n).unwrap().weight(), row_weight(i), "n={n} i={i}");
            }
            n <<= 1;
        }
    }

    #[test]
    fn word_transform_matches_bitvec() {
        for n in [1usize, 2, 4, 8, 16, 32, 64] {
            for seed in 0..50u64 {
                let w = seed.wrapping_mul(0x9E37_79B9_7F4A_7C15)
                    & if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
                let v = BitVec::from_u64(w, n);
                assert_eq!(polar_transform(&v).unwrap().as_u64(), polar_transform_u64(w, n));
            }
        }
    }

    proptest! {
        #[test]
        fn matches_naive(bits in proptest::collection::vec(0u8..2, 128)) {
            let u = BitVec::from_bits(&bits);
            prop_assert_eq!(polar_transform(&u).unwrap(), naive_transform(&u));
        }

        #[test]
        fn involution(exp in 0u32..11, seed in any::<u64>()) {
            let n = 1usize << exp;
            let mut u = BitVec::zeros(n);
            let mut s = seed | 1;
            for i in 0..n {
                s ^= s << 13; s ^= s >> 7; s ^= s << 17;
                if s & 1 == 1 { u.set(i, true); }
            }
            let x = polar_transform(&u).unwrap();
            prop_assert_eq!(polar_transform(&x).unwrap(), u);
        }

        #[test]
        fn linearity(a in proptest::collection::vec(0u8..2, 256), b in proptest::collection::vec(0u8..2, 256)) {
            let a = BitVec::from_bits(&a);
            let b = BitVec::from_bits(&b);
            let lhs = polar_transform(&a.xor(&b)).unwrap();
            let rhs = polar_transform(&a).unwrap().xor(&polar_transform(&b).unwrap());
            prop_assert_eq!(lhs, rhs);
        }
    }
}
