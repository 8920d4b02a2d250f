use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::chain::{ChainParams, SiteState};
use crate::error::{invalid, Result};

fn default_width() -> f64 {
    10.0
}

/// Initial amplitude profiles. Every generated state is Dirac-normalized.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum InitialProfile {
    /// Unit amplitude at `center`.
    Point {
        #[serde(default)]
        center: i64,
    },
    /// `exp(-(l - center)^2 / (2 width^2))`.
    Gaussian {
        #[serde(default)]
        center: i64,
        #[serde(default = "default_width")]
        width: f64,
    },
    /// Constant on `|l - center| <= width`.
    Tophat {
        #[serde(default)]
        center: i64,
        #[serde(default = "default_width")]
        width: f64,
    },
    /// Independent uniform `[0, 1)` real amplitudes on every site, drawn from
    /// a ChaCha8 stream seeded with the run seed.
    Random,
}

impl InitialProfile {
    pub fn name(&self) -> &'static str {
        match self {
            InitialProfile::Point { .. } => "point",
            InitialProfile::Gaussian { .. } => "gaussian",
            InitialProfile::Tophat { .. } => "tophat",
            InitialProfile::Random => "random",
        }
    }

    /// The four profiles of the convergence study with default shapes.
    pub fn standard_set() -> Vec<InitialProfile> {
        vec![
            InitialProfile::Point { center: 0 },
            InitialProfile::Gaussian { center: 0, width: 10.0 },
            InitialProfile::Tophat { center: 0, width: 10.0 },
            InitialProfile::Random,
        ]
    }

    pub fn validate(&self, params: &ChainParams) -> Result<()> {
        let m = params.half_width() as i64;
        let (center, width) = match *self {
            InitialProfile::Point { center } => (center, None),
            InitialProfile::Gaussian { center, width } | InitialProfile::Tophat { center, width } => {
                (center, Some(width))
            }
            InitialProfile::Random => (0, None),
        };
        if center.abs() > m {
            return Err(invalid("center", format!("|{center}| exceeds half-width {m}")));
        }
        if let Some(w) = width {
            if !(w > 0.0 && w.is_finite()) {
                return Err(invalid("width", format!("must be finite and > 0, got {w}")));
            }
        }
        Ok(())
    }
}

pub fn make_initial_state(
    profile: &InitialProfile,
    seed: u64,
    params: &ChainParams,
) -> Result<SiteState> {
    profile.validate(params)?;
    let m = params.half_width();
    let real = |x: f64| Complex64::new(x, 0.0);
    let raw = match *profile {
        InitialProfile::Point { center } => {
            SiteState::from_fn(m, "", |l| real(if l == center { 1.0 } else { 0.0 }))
        }
        InitialProfile::Gaussian { center, width } => SiteState::from_fn(m, "", |l| {
            let d = (l - center) as f64;
            real((-d * d / (2.0 * width * width)).exp())
        }),
        InitialProfile::Tophat { center, width } => {
            SiteState::from_fn(m, "", |l| real(if ((l - center) as f64).abs() <= width { 1.0 } else { 0.0 }))
        }
        InitialProfile::Random => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let amps = (0..params.dim()).map(|_| real(rng.gen::<f64>())).collect();
            SiteState::new(m, amps, "")?
        }
    };
    Ok(raw.normalized()?.with_label(profile.name()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params() -> ChainParams {
        ChainParams::new(1.0, 2e-4, 100).unwrap()
    }

    #[test]
    fn point_is_unit_vector() {
        let s = make_initial_state(&InitialProfile::Point { center: 0 }, 0, &params()).unwrap();
        for (l, a) in s.sites() {
            assert_eq!(a, Complex64::new(if l == 0 { 1.0 } else { 0.0 }, 0.0));
        }
    }

    #[test]
    fn tophat_has_21_equal_amplitudes() {
        let s = make_initial_state(&InitialProfile::Tophat { center: 0, width: 10.0 }, 0, &params())
            .unwrap();
        let nonzero: Vec<_> = s.amplitudes().iter().filter(|a| a.norm() > 0.0).collect();
        assert_eq!(nonzero.len(), 21);
        for a in nonzero {
            assert!((a.re - 1.0 / 21f64.sqrt()).abs() < 1e-15);
        }
    }

    #[test]
    fn random_is_reproducible() {
        let a = make_initial_state(&InitialProfile::Random, 7, &params()).unwrap();
        let b = make_initial_state(&InitialProfile::Random, 7, &params()).unwrap();
        let c = make_initial_state(&InitialProfile::Random, 8, &params()).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
        assert!(a.is_normalized());
    }

    #[test]
    fn rejects_bad_shapes() {
        let p = params();
        assert!(make_initial_state(&InitialProfile::Point { center: 101 }, 0, &p).is_err());
        assert!(make_initial_state(&InitialProfile::Gaussian { center: 0, width: 0.0 }, 0, &p).is_err());
        assert!(make_initial_state(&InitialProfile::Tophat { center: 0, width: -1.0 }, 0, &p).is_err());
    }

    #[test]
    fn profiles_parse_from_json() {
        let p: InitialProfile = serde_json::from_str(r#"{"kind":"gaussian","width":4}"#).unwrap();
        assert_eq!(p, InitialProfile::Gaussian { center: 0, width: 4.0 });
        assert!(serde_json::from_str::<InitialProfile>(r#"{"kind":"point","centre":1}"#).is_err());
    }
}
