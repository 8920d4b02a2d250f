use num_complex::Complex64;

use crate::error::{Error, Result};

/// Highest Hermite order accepted; the recurrence overflows `f64` on the
/// supported chains not far beyond this.
pub const MAX_HERMITE_ORDER: usize = 60;

/// Physicists' Hermite polynomial `H_m(z)` from the three-term recurrence
/// `H_{m+1} = 2z H_m - 2m H_{m-1}`.
pub fn hermite_polynomial(m: usize, z: Complex64) -> Result<Complex64> {
    if m > MAX_HERMITE_ORDER {
        return Err(Error::HermiteOrder {
            order: m,
            max: MAX_HERMITE_ORDER,
        });
    }
    let mut prev = Complex64::new(1.0, 0.0);
    if m == 0 {
        return Ok(prev);
    }
    let mut cur = 2.0 * z;
    for k in 1..m {
        let next = 2.0 * z * cur - 2.0 * k as f64 * prev;
        prev = cur;
        cur = next;
    }
    Ok(cur)
}
