//! Float math shim: inherent std methods when available, libm otherwise.

#[cfg(all(not(feature = "std"), not(feature = "libm")))]
compile_error!("cineloop-core requires either the `std` or the `libm` feature");

#[cfg(feature = "std")]
mod imp {
    #[inline]
    pub fn floor64(v: f64) -> f64 {
        v.floor()
    }
    #[inline]
    pub fn sqrt64(v: f64) -> f64 {
        v.sqrt()
    }
    #[inline]
    pub fn exp64(v: f64) -> f64 {
        v.exp()
    }
    #[inline]
    pub fn pow64(base: f64, exp: f64) -> f64 {
        base.powf(exp)
    }
}

#[cfg(all(not(feature = "std"), feature = "libm"))]
mod imp {
    #[inline]
    pub fn floor64(v: f64) -> f64 {
        libm::floor(v)
    }
    #[inline]
    pub fn sqrt64(v: f64) -> f64 {
        libm::sqrt(v)
    }
    #[inline]
    pub fn exp64(v: f64) -> f64 {
        libm::exp(v)
    }
    #[inline]
    pub fn pow64(base: f64, exp: f64) -> f64 {
        libm::pow(base, exp)
    }
}

pub use imp::*;
