//! Property tests for the structural invariants.

use nbldpc_core::channel::quantize_i8;
use nbldpc_core::code::{build_tanner, format_code, gen_regular_code, parse_code};
use nbldpc_core::fft_spa::{fft_gf, ifft_gf, permute_vector};
use nbldpc_core::gf::{build_field, GfSym};
use proptest::prelude::*;

proptest! {
    /// Barrel shifts by h and then h^-1 restore the vector, for every field
    /// and coefficient.
    #[test]
    fn permute_round_trip(q in 2u32..=8, hraw in 1usize..256, v in prop::collection::vec(0.0f64..1.0, 256)) {
        let field = build_field(q, None).unwrap();
        let g = field.order();
        let h = GfSym((1 + hraw % (g - 1)) as u8);
        let hinv = field.inv(h).unwrap();
        let v = &v[..g];
        let mut a = vec![0.0; g];
        let mut b = vec![0.0; g];
        permute_vector(&field, &mut a, v, h);
        permute_vector(&field, &mut b, &a, hinv);
        prop_assert_eq!(&b[..], v);
        // index 0 never moves
        prop_assert_eq!(a[0], v[0]);
    }

    /// The inverse transform undoes the transform exactly up to float
    /// rounding.
    #[test]
    fn transform_round_trip(q in 2u32..=8, v in prop::collection::vec(0.0f64..1.0, 256)) {
        let g = 1usize << q;
        let v = &v[..g];
        let mut w = v.to_vec();
        fft_gf(&mut w);
        ifft_gf(&mut w);
        for x in 0..g {
            prop_assert!((w[x] - v[x]).abs() < 1e-10);
        }
    }

    /// The saturating quantizer is monotone.
    #[test]
    fn quantize_monotone(mut vals in prop::collection::vec(-400.0f64..400.0, 1..64), scale in 0.1f64..50.0) {
        vals.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let q = quantize_i8(&vals, scale);
        for w in q.windows(2) {
            prop_assert!(w[0] <= w[1]);
        }
    }

    /// Generated codes rebuild identically from their file form.
    #[test]
    fn code_file_round_trip(q in 2u32..=8, seed in 0u64..500) {
        let field = build_field(q, None).unwrap();
        let pcm = gen_regular_code(12, 6, 4, 2, field, seed).unwrap();
        let back = parse_code(&format_code(&pcm)).unwrap();
        prop_assert_eq!(&pcm, &back);
        let g = build_tanner(&pcm);
        prop_assert_eq!(g.edges(), 24);
    }
}
