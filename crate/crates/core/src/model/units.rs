//! Decibel conversions. Everything inside the crate is linear; these are
//! only used at the config and CLI boundary.

/// Speed of light in vacuum, m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn linear_to_db(linear: f64) -> f64 {
    10.0 * linear.log10()
}

pub fn dbw_to_watts(dbw: f64) -> f64 {
    db_to_linear(dbw)
}

pub fn watts_to_dbw(watts: f64) -> f64 {
    linear_to_db(watts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn known_values() {
        assert!((db_to_linear(52.0) - 158_489.319_246_111_35).abs() < 1e-6);
        assert_eq!(watts_to_dbw(10.0), 10.0);
        assert_eq!(dbw_to_watts(0.0), 1.0);
    }

    proptest! {
        #[test]
        fn dbw_round_trip(dbw in -60.0f64..200.0) {
            let back = watts_to_dbw(dbw_to_watts(dbw));
            prop_assert!((back - dbw).abs() <= 1e-12 * dbw.abs().max(1.0));
            let w = dbw_to_watts(dbw);
            prop_assert!((dbw_to_watts(watts_to_dbw(w)) - w).abs() <= 1e-12 * w);
        }
    }
}
