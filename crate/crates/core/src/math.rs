//! Thin wrappers over `libm` so the crate builds without `std`.

pub(crate) const SQRT_2PI: f64 = 2.506_628_274_631_000_2;
pub(crate) const PI: f64 = core::f64::consts::PI;

#[inline]
pub(crate) fn sqrt(x: f64) -> f64 {
    libm::sqrt(x)
}

#[inline]
pub(crate) fn exp(x: f64) -> f64 {
    libm::exp(x)
}

#[inline]
pub(crate) fn abs(x: f64) -> f64 {
    libm::fabs(x)
}
