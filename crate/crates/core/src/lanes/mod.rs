//! Lane-vector abstraction used by the alignment kernel.
//!
//! [`LaneElement`] describes how scores are represented at one integer range
//! and [`LaneVector`] is a fixed group of such elements processed in
//! lockstep. Two backends exist: [`Portable`], plain arrays of any lane
//! count, and (on x86-64) AVX2 registers selected at run time.

use std::fmt::Debug;

use crate::alphabet::MAX_CODES;
use crate::preprocess::ElementWidth;

#[cfg(target_arch = "x86_64")]
pub(crate) mod avx2;

/// Integer type of one lane.
///
/// The 8-bit range is unsigned with substitution scores stored as
/// `score + bias`; wider ranges are signed and unbiased. All arithmetic
/// saturates.
pub trait LaneElement: Copy + Default + Ord + Debug + Send + Sync + 'static {
    const WIDTH: ElementWidth;
    const BIASED: bool;
    const ZERO: Self;
    const MAX: Self;

    fn sat_add(self, rhs: Self) -> Self;
    fn sat_sub(self, rhs: Self) -> Self;

    /// Stored form of substitution score `s`, clamped to the range.
    fn encode_score(s: i32, bias: i32) -> Self;

    /// Lowest stored substitution value; what the dummy code scores.
    fn dummy() -> Self;

    fn decode_score(self, bias: i32) -> i32;

    /// A gap penalty as a lane value, if representable.
    fn from_penalty(p: i32) -> Option<Self>;

    /// A DP score (never biased) as a wide integer.
    fn to_i64(self) -> i64;

    /// Whether a final lane score signals overflow. Biased lanes overflow
    /// once `score + bias` reaches the maximum, because the biased
    /// substitution add is the step that saturates.
    fn is_saturated(score: Self, bias: Self) -> bool {
        if Self::BIASED {
            score.sat_add(bias) == Self::MAX
        } else {
            score == Self::MAX
        }
    }
}

impl LaneElement for u8 {
    const WIDTH: ElementWidth = ElementWidth::W8;
    const BIASED: bool = true;
    const ZERO: Self = 0;
    const MAX: Self = u8::MAX;

    #[inline(always)]
    fn sat_add(self, rhs: Self) -> Self {
        self.saturating_add(rhs)
    }

    #[inline(always)]
    fn sat_sub(self, rhs: Self) -> Self {
        self.saturating_sub(rhs)
    }

    fn encode_score(s: i32, bias: i32) -> Self {
        (s + bias).clamp(0, 255) as u8
    }

    fn dummy() -> Self {
        0
    }

    fn decode_score(self, bias: i32) -> i32 {
        i32::from(self) - bias
    }

    fn from_penalty(p: i32) -> Option<Self> {
        u8::try_from(p).ok()
    }

    fn to_i64(self) -> i64 {
        i64::from(self)
    }
}

macro_rules! signed_element {
    ($t:ty, $width:expr) => {
        impl LaneElement for $t {
            const WIDTH: ElementWidth = $width;
            const BIASED: bool = false;
            const ZERO: Self = 0;
            const MAX: Self = <$t>::MAX;

            #[inline(always)]
            fn sat_add(self, rhs: Self) -> Self {
                self.saturating_add(rhs)
            }

            #[inline(always)]
            fn sat_sub(self, rhs: Self) -> Self {
                self.saturating_sub(rhs)
            }

            fn encode_score(s: i32, _bias: i32) -> Self {
                s.clamp(<$t>::MIN as i32, <$t>::MAX as i32) as $t
            }

            fn dummy() -> Self {
                <$t>::MIN
            }

            fn decode_score(self, _bias: i32) -> i32 {
                self as i32
            }

            fn from_penalty(p: i32) -> Option<Self> {
                <$t>::try_from(p).ok()
            }

            fn to_i64(self) -> i64 {
                self as i64
            }
        }
    };
}

signed_element!(i16, ElementWidth::W16);
signed_element!(i32, ElementWidth::W32);

/// `LANES` elements processed in lockstep.
pub trait LaneVector: Copy {
    type Elem: LaneElement;
    const LANES: usize;

    fn splat(x: Self::Elem) -> Self;

    /// Loads the first `LANES` elements of `src`.
    fn load(src: &[Self::Elem]) -> Self;

    /// Stores into the first `LANES` elements of `dst`.
    fn store(self, dst: &mut [Self::Elem]);

    fn adds(self, rhs: Self) -> Self;
    fn subs(self, rhs: Self) -> Self;
    fn max(self, rhs: Self) -> Self;

    #[inline(always)]
    fn zero() -> Self {
        Self::splat(Self::Elem::ZERO)
    }

    /// `self + sub`, where `sub` is a stored substitution score.
    #[inline(always)]
    fn add_substitution(self, sub: Self, bias: Self) -> Self {
        if Self::Elem::BIASED {
            self.adds(sub).subs(bias)
        } else {
            self.adds(sub)
        }
    }

    /// Per-lane table lookup: lane `k` receives `table[idx[k] & 31]`.
    #[inline(always)]
    fn lookup(table: &[Self::Elem; MAX_CODES], idx: &[u8]) -> Self {
        let mut gathered = [Self::Elem::ZERO; 64];
        for (slot, &r) in gathered.iter_mut().zip(&idx[..Self::LANES]) {
            *slot = table[usize::from(r) & (MAX_CODES - 1)];
        }
        Self::load(&gathered)
    }

    fn to_vec(self) -> Vec<Self::Elem> {
        let mut out = vec![Self::Elem::ZERO; Self::LANES];
        self.store(&mut out);
        out
    }

    fn hmax(self) -> Self::Elem {
        self.to_vec().into_iter().max().unwrap_or(Self::Elem::ZERO)
    }
}

/// Array-backed lane vector; runs on any host with any lane count.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Portable<T, const L: usize>(pub [T; L]);

impl<T: LaneElement, const L: usize> LaneVector for Portable<T, L> {
    type Elem = T;
    const LANES: usize = L;

    #[inline(always)]
    fn splat(x: T) -> Self {
        Portable([x; L])
    }

    #[inline(always)]
    fn load(src: &[T]) -> Self {
        let mut out = [T::ZERO; L];
        out.copy_from_slice(&src[..L]);
        Portable(out)
    }

    #[inline(always)]
    fn store(self, dst: &mut [T]) {
        dst[..L].copy_from_slice(&self.0);
    }

    #[inline(always)]
    fn adds(self, rhs: Self) -> Self {
        let mut out = self.0;
        for (o, r) in out.iter_mut().zip(rhs.0) {
            *o = o.sat_add(r);
        }
        Portable(out)
    }

    #[inline(always)]
    fn subs(self, rhs: Self) -> Self {
        let mut out = self.0;
        for (o, r) in out.iter_mut().zip(rhs.0) {
            *o = o.sat_sub(r);
        }
        Portable(out)
    }

    #[inline(always)]
    fn max(self, rhs: Self) -> Self {
        let mut out = self.0;
        for (o, r) in out.iter_mut().zip(rhs.0) {
            *o = (*o).max(r);
        }
        Portable(out)
    }
}
