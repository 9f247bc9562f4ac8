use crate::scalar::Real;

/// Normalisation of the RMS curvature.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum RmsConvention {
    /// `√(κ1² + κ2²) / 2`.
    #[default]
    HalfRootSum,
    /// `√((κ1² + κ2²) / 2)`.
    RootMeanSquare,
}

/// Convention used by [`crate::curvature::curvature_field`].
pub const RMS_CONVENTION: RmsConvention = RmsConvention::HalfRootSum;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Principal<T> {
    pub k1: T,
    pub k2: T,
    /// `H² − K` was negative and treated as zero.
    pub clamped: bool,
}

/// Principal curvatures from mean and Gaussian curvature.
///
/// The discriminant `H² − K` is clamped at zero. `(κ1 + κ2)/2` reproduces
/// `H` exactly whenever the two magnitudes allow it in floating point.
pub fn principal_from_hk<T: Real>(h: T, k: T) -> Principal<T> {
    let d = h * h - k;
    let clamped = d < T::zero();
    let s = if clamped { T::zero() } else { d.sqrt() };
    // The curvature of larger magnitude is formed directly and the other as
    // the residual `2H − κ`, which is exact whenever it is representable.
    let two_h = T::two() * h;
    let (k1, k2) = if h >= T::zero() {
        let k1 = h + s;
        (k1, two_h - k1)
    } else {
        let k2 = h - s;
        (two_h - k2, k2)
    };
    // The residual can cross the other value only when s is below one ulp
    // of H.
    if k2 > k1 {
        return Principal { k1: h, k2: h, clamped };
    }
    Principal { k1, k2, clamped }
}

/// `(K_abs, K_rms)` from the principal curvatures.
pub fn derived_fields<T: Real>(k1: T, k2: T, convention: RmsConvention) -> (T, T) {
    let abs = k1.abs() + k2.abs();
    let sq = k1 * k1 + k2 * k2;
    let rms = match convention {
        RmsConvention::HalfRootSum => sq.sqrt() / T::two(),
        RmsConvention::RootMeanSquare => (sq / T::two()).sqrt(),
    };
    (abs, rms)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn umbilic() {
        let p = principal_from_hk(1.0f64, 1.0);
        assert_eq!((p.k1, p.k2, p.clamped), (1.0, 1.0, false));
    }

    #[test]
    fn saddle() {
        let p = principal_from_hk(0.0f64, -1.0);
        assert_eq!((p.k1, p.k2, p.clamped), (1.0, -1.0, false));
    }

    #[test]
    fn clamps() {
        let p = principal_from_hk(0.5f64, 1.0);
        assert_eq!((p.k1, p.k2, p.clamped), (0.5, 0.5, true));
    }

    #[test]
    fn derived_examples() {
        let (a, r) = derived_fields(1.0f64, -1.0, RmsConvention::HalfRootSum);
        assert_eq!(a, 2.0);
        assert_eq!(r, 2f64.sqrt() / 2.0);
        assert_eq!(derived_fields(0.0f64, 0.0, RMS_CONVENTION), (0.0, 0.0));
        assert_eq!(derived_fields(3.0f64, 4.0, RMS_CONVENTION), (7.0, 2.5));
        let (_, conventional) = derived_fields(3.0f64, 4.0, RmsConvention::RootMeanSquare);
        assert!((conventional - 12.5f64.sqrt()).abs() < 1e-15);
    }
}
