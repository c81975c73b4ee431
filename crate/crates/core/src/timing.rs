use std::time::Duration;

/// CPU time consumed by the calling thread, so a timed solve is not charged
/// for work running on other threads.
#[cfg(target_os = "linux")]
pub fn thread_cpu_time() -> Duration {
    let mut ts = libc::timespec { tv_sec: 0, tv_nsec: 0 };
    // SAFETY: `ts` is a valid, writable timespec and the clock id is a constant.
    let rc = unsafe { libc::clock_gettime(libc::CLOCK_THREAD_CPUTIME_ID, &mut ts) };
    if rc != 0 {
        return fallback();
    }
    Duration::new(ts.tv_sec as u64, ts.tv_nsec as u32)
}

#[cfg(not(target_os = "linux"))]
pub fn thread_cpu_time() -> Duration {
    fallback()
}

// Monotonic wall clock measured from the first call.
fn fallback() -> Duration {
    use std::sync::OnceLock;
    use std::time::Instant;
    static START: OnceLock<Instant> = OnceLock::new();
    START.get_or_init(Instant::now).elapsed()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cpu_clock_is_monotone() {
        let a = thread_cpu_time();
        let mut s = 0.0_f64;
        for i in 0..200_000 {
            s += (i as f64).sqrt();
        }
        assert!(s > 0.0);
        assert!(thread_cpu_time() >= a);
    }
}
