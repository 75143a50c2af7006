use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};
use std::fmt::{Debug, Display};
use std::iter::Sum;

/// Floating point scalar used by the linear algebra, entropy and divergence layers.
pub trait Real:
    Float + FloatConst + FromPrimitive + ToPrimitive + Debug + Display + Default + Sum + Send + Sync + 'static
{
    /// Converts an `f64` literal.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("representable literal")
    }

    /// A tolerance of `x`, floored at a small multiple of the machine epsilon so that
    /// tolerances tuned for `f64` stay meaningful in single precision.
    #[inline]
    fn tol(x: f64) -> Self {
        let t = Self::lit(x);
        let floor = Self::epsilon() * Self::lit(64.0);
        if t > floor {
            t
        } else {
            floor
        }
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f32 {}
impl Real for f64 {}

pub type Complex<T> = num_complex::Complex<T>;

/// Shorthand for `Complex::new`.
#[inline]
pub fn cplx<T: Real>(re: T, im: T) -> Complex<T> {
    Complex::new(re, im)
}

/// `e^{i theta}`.
#[inline]
pub(crate) fn expi<T: Real>(theta: T) -> Complex<T> {
    Complex::new(theta.cos(), theta.sin())
}
