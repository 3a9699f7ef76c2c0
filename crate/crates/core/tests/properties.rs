use polarlab::construction::{build_profile, RateProfile, ReliabilityOrder, Scheme};
use polarlab::gf2::{poly_divmod, poly_mul, polar_transform, row, BitVec, Gf2Poly};
use polarlab::precoding::{conv_deprecode, conv_precode, ConvSpec, CrcSpec, Encoder};
use polarlab::scl::scl_decode;
use proptest::prelude::*;

fn profile(scheme: Scheme, n: usize, k: usize) -> RateProfile {
    let o = ReliabilityOrder::reference(n).unwrap();
    let crc = scheme.uses_crc().then(|| CrcSpec::parse("111000100001").unwrap());
    let conv = scheme
        .uses_conv()
        .then(|| ConvSpec::from_msb_str("1011011011").unwrap());
    let alpha = if scheme == Scheme::PsPac { 8 } else { 0 };
    build_profile(scheme, n, k, &o, crc, conv, alpha).unwrap()
}

fn bits(len: usize) -> impl Strategy<Value = BitVec> {
    prop::collection::vec(any::<bool>(), len).prop_map(|v| BitVec::from_bools(&v))
}

#[test]
fn row_weight_law() {
    for n in [2usize, 8, 64, 1024] {
        for i in 0..n {
            let r = row(i, n).unwrap();
            assert_eq!(r.weight(), 1 << i.count_ones(), "row {i} of {n}");
        }
    }
}

proptest! {
    #[test]
    fn transform_is_involution(
        (n, u) in (1u32..=10).prop_flat_map(|e| (Just(1usize << e), prop::collection::vec(any::<bool>(), 1usize << e)))
    ) {
        let u = BitVec::from_bools(&u);
        prop_assert_eq!(u.len(), n);
        prop_assert_eq!(polar_transform(&polar_transform(&u).unwrap()).unwrap(), u);
    }

    #[test]
    fn encoders_are_linear(a in bits(32), b in bits(32), s in 0usize..5) {
        let p = profile(Scheme::ALL[s], 64, 32);
        let enc = Encoder::new(&p);
        let x = enc.codeword(&a.xor(&b)).unwrap();
        prop_assert_eq!(x, enc.codeword(&a).unwrap().xor(&enc.codeword(&b).unwrap()));
    }

    #[test]
    fn noiseless_round_trip(d in bits(48), s in 0usize..5) {
        let p = profile(Scheme::ALL[s], 64, 48);
        let x = Encoder::new(&p).codeword(&d).unwrap();
        let llr: Vec<f64> = x.iter().map(|b| if b { -2.0 } else { 2.0 }).collect();
        let out = scl_decode(&llr, &p, 4).unwrap();
        prop_assert_eq!(out.data, d);
        prop_assert_eq!(out.codeword, x);
    }

    #[test]
    fn convolution_inverts(v in bits(128)) {
        let c = ConvSpec::from_msb_str("1011011011").unwrap();
        prop_assert_eq!(conv_deprecode(&conv_precode(&v, &c), &c), v);
    }

    #[test]
    fn division_identity(a in bits(40)) {
        let q = Gf2Poly::parse("111000100001").unwrap();
        let (quot, rem) = poly_divmod(&a, &q).unwrap();
        let mut back = poly_mul(&quot, q.coeffs());
        let r = rem.concat(&BitVec::zeros(back.len() - rem.len()));
        back.xor_assign(&r);
        prop_assert_eq!(back.slice(0, a.len()), a.clone());
        prop_assert!(back.slice(a.len(), back.len()).is_zero());
    }
}
