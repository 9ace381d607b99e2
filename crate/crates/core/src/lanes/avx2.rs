//! AVX2 lane vectors: 32 x u8, 16 x i16 and 8 x i32 in one 256-bit register.
//!
//! These types must only be used after `avx2_available()` returned true. The
//! kernel entry points that instantiate them carry
//! `#[target_feature(enable = "avx2")]` so the wrappers below inline into
//! AVX2 code.

use std::arch::x86_64::*;

use super::LaneVector;
use crate::alphabet::MAX_CODES;

pub(crate) fn avx2_available() -> bool {
    is_x86_feature_detected!("avx2")
}

macro_rules! avx2_vector {
    ($name:ident, $elem:ty, $lanes:expr, $set1:ident, $adds:ident, $subs:ident, $max:ident $(, $extra:item)*) => {
        #[derive(Clone, Copy)]
        pub(crate) struct $name(__m256i);

        impl LaneVector for $name {
            type Elem = $elem;
            const LANES: usize = $lanes;

            #[inline(always)]
            fn splat(x: $elem) -> Self {
                // SAFETY: only instantiated on hosts with AVX2 (see module docs).
                unsafe { $name($set1(x as _)) }
            }

            #[inline(always)]
            fn load(src: &[$elem]) -> Self {
                let src = &src[..$lanes];
                // SAFETY: `src` holds a full register; unaligned load.
                unsafe { $name(_mm256_loadu_si256(src.as_ptr().cast())) }
            }

            #[inline(always)]
            fn store(self, dst: &mut [$elem]) {
                let dst = &mut dst[..$lanes];
                // SAFETY: `dst` holds a full register; unaligned store.
                unsafe { _mm256_storeu_si256(dst.as_mut_ptr().cast(), self.0) }
            }

            #[inline(always)]
            fn adds(self, rhs: Self) -> Self {
                // SAFETY: AVX2 present.
                unsafe { $name($adds(self.0, rhs.0)) }
            }

            #[inline(always)]
            fn subs(self, rhs: Self) -> Self {
                // SAFETY: AVX2 present.
                unsafe { $name($subs(self.0, rhs.0)) }
            }

            #[inline(always)]
            fn max(self, rhs: Self) -> Self {
                // SAFETY: AVX2 present.
                unsafe { $name($max(self.0, rhs.0)) }
            }

            $($extra)*
        }
    };
}

avx2_vector!(
    U8x32,
    u8,
    32,
    _mm256_set1_epi8,
    _mm256_adds_epu8,
    _mm256_subs_epu8,
    _mm256_max_epu8,
    #[inline(always)]
    fn lookup(table: &[u8; MAX_CODES], idx: &[u8]) -> Self {
        let idx = &idx[..32];
        // SAFETY: AVX2 present; both loads read exactly 32 bytes.
        unsafe {
            let idx = _mm256_loadu_si256(idx.as_ptr().cast());
            // Each 128-bit half of the shuffle sees its own copy of a
            // 16-entry table; bit 4 of the index picks the table half.
            let low = _mm256_broadcastsi128_si256(_mm_loadu_si128(table.as_ptr().cast()));
            let high = _mm256_broadcastsi128_si256(_mm_loadu_si128(table[16..].as_ptr().cast()));
            let pick_high = _mm256_slli_epi16(idx, 3);
            U8x32(_mm256_blendv_epi8(
                _mm256_shuffle_epi8(low, idx),
                _mm256_shuffle_epi8(high, idx),
                pick_high,
            ))
        }
    }
);
avx2_vector!(
    I16x16,
    i16,
    16,
    _mm256_set1_epi16,
    _mm256_adds_epi16,
    _mm256_subs_epi16,
    _mm256_max_epi16
);
avx2_vector!(
    I32x8,
    i32,
    8,
    _mm256_set1_epi32,
    adds_epi32,
    subs_epi32,
    _mm256_max_epi32
);

// AVX2 has no saturating 32-bit arithmetic; detect signed overflow from the
// operand and result signs and substitute the saturated bound.

#[inline(always)]
unsafe fn saturate_bound(a: __m256i) -> __m256i {
    // i32::MAX when a >= 0, i32::MIN when a < 0
    _mm256_xor_si256(_mm256_srai_epi32(a, 31), _mm256_set1_epi32(i32::MAX))
}

#[inline(always)]
unsafe fn select_on_sign(value: __m256i, bound: __m256i, mask: __m256i) -> __m256i {
    _mm256_castps_si256(_mm256_blendv_ps(
        _mm256_castsi256_ps(value),
        _mm256_castsi256_ps(bound),
        _mm256_castsi256_ps(mask),
    ))
}

#[inline(always)]
unsafe fn adds_epi32(a: __m256i, b: __m256i) -> __m256i {
    let sum = _mm256_add_epi32(a, b);
    let overflow = _mm256_and_si256(_mm256_xor_si256(a, sum), _mm256_xor_si256(b, sum));
    select_on_sign(sum, saturate_bound(a), overflow)
}

#[inline(always)]
unsafe fn subs_epi32(a: __m256i, b: __m256i) -> __m256i {
    let diff = _mm256_sub_epi32(a, b);
    let overflow = _mm256_and_si256(_mm256_xor_si256(a, b), _mm256_xor_si256(a, diff));
    select_on_sign(diff, saturate_bound(a), overflow)
}
