//! Simulated time. All timestamps are integer milliseconds since the start
//! of the run, which keeps schedules exact and run logs byte-stable.

/// Simulated time in milliseconds.
pub type TimeMs = u64;

/// Converts seconds (as used in configuration files) to milliseconds,
/// rounding to the nearest millisecond.
pub fn secs_to_ms(secs: f64) -> TimeMs {
    (secs * 1000.0).round() as TimeMs
}

/// Formats a millisecond timestamp as fractional seconds for diagnostics.
pub fn ms_to_secs(ms: TimeMs) -> f64 {
    ms as f64 / 1000.0
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn test_conversion_round_trips_common_periods() {
        assert_eq!(secs_to_ms(15.0), 15_000);
        assert_eq!(secs_to_ms(0.001), 1);
        assert_eq!(secs_to_ms(2.5), 2_500);
        assert_eq!(ms_to_secs(80_000), 80.0);
    }
}
