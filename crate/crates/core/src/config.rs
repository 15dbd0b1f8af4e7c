//! Engine-wide numeric configuration: the zero tolerance and the big-float precision.

use std::cell::Cell;
use std::sync::atomic::{AtomicU64, AtomicUsize, Ordering};

pub const DEFAULT_EPS: f64 = 1e-9;
pub const DEFAULT_BIG_PRECISION: usize = 200;

static EPS_BITS: AtomicU64 = AtomicU64::new(0x3E11_2E0B_E826_D695); // 1e-9
static BIG_PRECISION: AtomicUsize = AtomicUsize::new(DEFAULT_BIG_PRECISION);

thread_local! {
    static EPS_OVERRIDE: Cell<Option<f64>> = const { Cell::new(None) };
}

/// Current zero tolerance. A scalar `x` is numerically zero iff `|x| <= eps()`.
pub fn eps() -> f64 {
    EPS_OVERRIDE
        .with(|c| c.get())
        .unwrap_or_else(|| f64::from_bits(EPS_BITS.load(Ordering::Relaxed)))
}

/// Sets the process-wide tolerance.
pub fn set_eps(v: f64) {
    assert!(v.is_finite() && v >= 0.0, "tolerance must be finite and nonnegative");
    EPS_BITS.store(v.to_bits(), Ordering::Relaxed);
}

/// Runs `f` with a tolerance override visible only on the current thread.
pub fn with_eps<R>(v: f64, f: impl FnOnce() -> R) -> R {
    struct Restore(Option<f64>);
    impl Drop for Restore {
        fn drop(&mut self) {
            EPS_OVERRIDE.with(|c| c.set(self.0));
        }
    }
    let prev = EPS_OVERRIDE.with(|c| c.replace(Some(v)));
    let _guard = Restore(prev);
    f()
}

/// Working precision in bits for [`crate::scalar::BigComplex`].
pub fn big_precision() -> usize {
    BIG_PRECISION.load(Ordering::Relaxed)
}

pub fn set_big_precision(bits: usize) {
    assert!(bits >= 53, "big precision below double precision makes no sense");
    BIG_PRECISION.store(bits, Ordering::Relaxed);
}
