//! Wall-clock measurement around solver calls. On wasm32 there is no
//! monotonic clock in `std`, so durations report as zero there.

#[cfg(not(target_arch = "wasm32"))]
pub(crate) fn measure<T>(f: impl FnOnce() -> T) -> (T, f64) {
    let start = std::time::Instant::now();
    let out = f();
    (out, start.elapsed().as_secs_f64())
}

#[cfg(target_arch = "wasm32")]
pub(crate) fn measure<T>(f: impl FnOnce() -> T) -> (T, f64) {
    (f(), 0.0)
}
