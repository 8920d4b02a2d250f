//! Analytic ladder, numeric eigenmodes and orthogonality diagnostics.

mod analytic;
mod eigen;
mod hermite;

use std::cmp::Ordering;
use std::fmt::Write as _;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

pub use analytic::{
    analytic_energy, analytic_residual, analytic_wavefunction, ground_normalization,
    normalization, normalization_integral, oscillator_scale, AnalyticModeParams, Branch,
};
pub use hermite::{hermite_polynomial, MAX_HERMITE_ORDER};

use crate::chain::{anti_pt_residual, ChainParams, Hamiltonian, SiteState};
use crate::error::{invalid, Error, Result};

/// Default residual tolerance for numeric eigenmodes.
pub const DEFAULT_SOLVER_TOL: f64 = 1e-9;

/// Position of a numeric mode on the analytic ladder.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LadderLabel {
    pub m: usize,
    pub branch: Branch,
}

#[derive(Debug, Clone)]
pub struct EigenMode {
    /// `None` when no analytic level lies within `omega / 2`, or when the
    /// mode sits in a degenerate cluster.
    pub label: Option<LadderLabel>,
    pub energy: Complex64,
    /// Unit Dirac norm; the largest component is real and positive.
    pub right: SiteState,
    /// Scaled so that `<left|right> = 1`.
    pub left: Option<SiteState>,
    /// `||H v - E v|| / ||v||` of the right vector.
    pub residual: f64,
    /// `||H* u - E* u|| / ||u||` of the left vector.
    pub left_residual: f64,
    pub tolerance: f64,
    /// Another eigenvalue lies within `10 * tolerance`.
    pub degenerate: bool,
}

#[derive(Debug, Clone)]
pub struct Spectrum {
    pub modes: Vec<EigenMode>,
    pub params: Option<ChainParams>,
}

/// Descending imaginary part, then ascending real part.
pub fn spectral_order(a: &Complex64, b: &Complex64) -> Ordering {
    b.im.total_cmp(&a.im).then(a.re.total_cmp(&b.re))
}

/// Every eigenvalue of the chain Hamiltonian, in spectral order.
///
/// Only operators in the anti-PT-symmetric family (purely imaginary
/// diagonal, real hopping) are supported.
pub fn eigenvalues(h: &Hamiltonian) -> Result<Vec<Complex64>> {
    let residual = anti_pt_residual(h);
    if residual != 0.0 {
        return Err(Error::UnsupportedHamiltonian { residual });
    }
    let mut ev = eigen::paired_eigenvalues(h)?;
    ev.sort_by(spectral_order);
    Ok(ev)
}

/// The `count` slowest-decaying eigenmodes of `h` with biorthonormal left
/// vectors.
///
/// If `count` would split an `E <-> -E*` pair, the partner is included and
/// one extra mode is returned.
pub fn numeric_spectrum(h: &Hamiltonian, count: usize, tol: f64) -> Result<Spectrum> {
    if count == 0 || count > h.dim() {
        return Err(invalid(
            "count",
            format!("must be in 1..={}, got {count}", h.dim()),
        ));
    }
    if !(tol > 0.0) {
        return Err(invalid("tol", format!("must be > 0, got {tol}")));
    }
    let all = eigenvalues(h)?;
    let mut take = count;
    if take < all.len() && is_pair(all[take - 1], all[take]) {
        take += 1;
    }

    let conj_h = h.conj();
    let mut modes = Vec::with_capacity(take);
    let mut worst: f64 = 0.0;
    for (i, &energy) in all[..take].iter().enumerate() {
        let (mut right, residual) = eigen::inverse_iteration(h, energy, tol);
        fix_phase(&mut right);
        let (left_raw, left_residual) = eigen::inverse_iteration(&conj_h, energy.conj(), tol);
        worst = worst.max(residual).max(left_residual);

        // <left|right> = 1 by scaling the left vector only
        let pairing: Complex64 = left_raw
            .iter()
            .zip(&right)
            .map(|(u, v)| u.conj() * v)
            .sum();
        let scale = (Complex64::new(1.0, 0.0) / pairing).conj();
        let left: Vec<Complex64> = left_raw.iter().map(|u| u * scale).collect();

        let degenerate = all
            .iter()
            .enumerate()
            .any(|(j, &other)| j != i && (other - energy).norm() <= 10.0 * tol);
        let label = match (&h.params(), degenerate) {
            (Some(p), false) => ladder_label(energy, p),
            _ => None,
        };
        let m = h.half_width();
        modes.push(EigenMode {
            label,
            energy,
            right: SiteState::new(m, right, format!("mode {i}"))?,
            left: Some(SiteState::new(m, left, format!("left {i}"))?),
            residual,
            left_residual,
            tolerance: tol,
            degenerate,
        });
    }
    if worst > tol {
        return Err(Error::NoConvergence {
            worst_residual: worst,
        });
    }
    Ok(Spectrum {
        modes,
        params: h.params().copied(),
    })
}

fn is_pair(a: Complex64, b: Complex64) -> bool {
    a.im == b.im && a.re == -b.re && a.re != 0.0
}

fn fix_phase(v: &mut [Complex64]) {
    let mut best = 0;
    for (k, x) in v.iter().enumerate() {
        // strictly greater keeps the first of equal-magnitude components
        if x.norm() > v[best].norm() * (1.0 + 1e-12) {
            best = k;
        }
    }
    let pivot = v[best];
    if pivot.norm() == 0.0 {
        return;
    }
    let phase = pivot.conj() / pivot.norm();
    for x in v.iter_mut() {
        *x *= phase;
    }
}

/// Nearest analytic level within `omega / 2`, if any.
pub fn ladder_label(energy: Complex64, params: &ChainParams) -> Option<LadderLabel> {
    let mut best: Option<(f64, LadderLabel)> = None;
    for m in 0..=MAX_HERMITE_ORDER {
        for branch in [Branch::Plus, Branch::Minus] {
            let d = (analytic_energy(m, branch, params) - energy).norm();
            if best.is_none_or(|(bd, _)| d < bd) {
                best = Some((d, LadderLabel { m, branch }));
            }
        }
    }
    best.filter(|(d, _)| *d <= params.omega() / 2.0)
        .map(|(_, label)| label)
}

impl Spectrum {
    pub fn len(&self) -> usize {
        self.modes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.modes.is_empty()
    }

    pub fn energies(&self) -> Vec<Complex64> {
        self.modes.iter().map(|m| m.energy).collect()
    }

    /// Mode carrying the given ladder label.
    pub fn find(&self, m: usize, branch: Branch) -> Option<&EigenMode> {
        self.modes
            .iter()
            .find(|mode| mode.label == Some(LadderLabel { m, branch }))
    }

    /// The two stable modes: ground `|g> = psi_0^+` and excited
    /// `|e> = psi_0^-`, i.e. the two leading modes in spectral order.
    pub fn stable_pair(&self) -> Result<(&EigenMode, &EigenMode)> {
        if self.modes.len() < 2 {
            return Err(invalid("spectrum", "needs at least two modes for |g>, |e>"));
        }
        let (a, b) = (&self.modes[0], &self.modes[1]);
        // spectral order puts the negative real part (the + branch) first
        Ok(if a.energy.re <= b.energy.re { (a, b) } else { (b, a) })
    }

    /// Plain-text table, one mode per row: `m,branch,re_E,im_E,residual`.
    /// Unassigned labels are written as `*`.
    pub fn to_table(&self) -> String {
        let mut out = String::from("m,branch,re_E,im_E,residual\n");
        for mode in &self.modes {
            let (m, b) = match mode.label {
                Some(l) => (l.m.to_string(), l.branch.symbol().to_string()),
                None => ("*".into(), "*".into()),
            };
            let _ = writeln!(
                out,
                "{m},{b},{:.16e},{:.16e},{:.16e}",
                mode.energy.re, mode.energy.im, mode.residual
            );
        }
        out
    }
}

/// `|<left_a|right_b>|` for all mode pairs.
pub fn biorthogonality_matrix(spec: &Spectrum) -> Result<Vec<Vec<f64>>> {
    let lefts = spec
        .modes
        .iter()
        .enumerate()
        .map(|(i, m)| m.left.as_ref().ok_or(Error::MissingLeftVector { index: i }))
        .collect::<Result<Vec<_>>>()?;
    lefts
        .iter()
        .map(|left| {
            spec.modes
                .iter()
                .map(|mode| dirac_overlap(left, &mode.right).map(|z| z.norm()))
                .collect()
        })
        .collect()
}

/// `sum_l conj(a(l)) b(l)`.
pub fn dirac_overlap(a: &SiteState, b: &SiteState) -> Result<Complex64> {
    a.check_same_len(b)?;
    Ok(a
        .amplitudes()
        .iter()
        .zip(b.amplitudes())
        .map(|(x, y)| x.conj() * y)
        .sum())
}

/// Right vectors of the analytic ladder for `m < levels`, both branches,
/// with no left vectors attached.
pub fn analytic_spectrum(params: &ChainParams, levels: usize) -> Result<Spectrum> {
    let h = crate::chain::build_hamiltonian(params);
    let mut modes = Vec::with_capacity(2 * levels);
    for m in 0..levels {
        for branch in [Branch::Plus, Branch::Minus] {
            let energy = analytic_energy(m, branch, params);
            let right = analytic_wavefunction(m, branch, params)?;
            let residual = h.residual(energy, right.amplitudes());
            modes.push(EigenMode {
                label: Some(LadderLabel { m, branch }),
                energy,
                right,
                left: None,
                residual,
                left_residual: f64::NAN,
                tolerance: f64::NAN,
                degenerate: false,
            });
        }
    }
    modes.sort_by(|a, b| spectral_order(&a.energy, &b.energy));
    Ok(Spectrum {
        modes,
        params: Some(*params),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chain::{build_hamiltonian, ChainParams};

    fn spectrum(v: f64, m: usize, count: usize) -> Spectrum {
        let p = ChainParams::new(1.0, v, m).unwrap();
        numeric_spectrum(&build_hamiltonian(&p), count, DEFAULT_SOLVER_TOL).unwrap()
    }

    #[test]
    fn leading_pair_is_the_real_pair() {
        let s = spectrum(2e-4, 100, 2);
        let (g, e) = s.stable_pair().unwrap();
        assert!((g.energy.re + 1.99).abs() < 1e-6);
        assert!((e.energy.re - 1.99).abs() < 1e-6);
        assert_eq!(g.label, Some(LadderLabel { m: 0, branch: Branch::Plus }));
        assert_eq!(e.label, Some(LadderLabel { m: 0, branch: Branch::Minus }));
        assert!(g.residual <= DEFAULT_SOLVER_TOL && e.left_residual <= DEFAULT_SOLVER_TOL);
    }

    #[test]
    fn single_mode_biorthogonality_is_one() {
        // count = 1 on a self-paired leading mode stays a single mode
        let s = spectrum(0.32, 30, 6);
        let purely_imaginary = s.modes.iter().position(|m| m.energy.re == 0.0).unwrap();
        let one = Spectrum {
            modes: vec![s.modes[purely_imaginary].clone()],
            params: s.params,
        };
        let b = biorthogonality_matrix(&one).unwrap();
        assert_eq!(b.len(), 1);
        assert!((b[0][0] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn split_pairs_are_completed() {
        let s = spectrum(2e-4, 20, 3);
        assert_eq!(s.len(), 4);
        assert_eq!(s.modes[2].energy.im, s.modes[3].energy.im);
        assert_eq!(s.modes[2].energy.re, -s.modes[3].energy.re);
    }

    #[test]
    fn spectrum_is_sorted() {
        let s = spectrum(0.02, 30, 16);
        for w in s.modes.windows(2) {
            assert_ne!(spectral_order(&w[0].energy, &w[1].energy), Ordering::Greater);
        }
    }

    #[test]
    fn perturbed_hamiltonian_is_rejected() {
        let p = ChainParams::new(1.0, 2e-4, 10).unwrap();
        let h = build_hamiltonian(&p).with_diagonal_shift(|l| Complex64::new(0.1 * l as f64, 0.0));
        assert!(matches!(
            numeric_spectrum(&h, 2, 1e-9),
            Err(Error::UnsupportedHamiltonian { .. })
        ));
    }

    #[test]
    fn missing_left_vectors_are_reported() {
        let p = ChainParams::new(1.0, 2e-4, 30).unwrap();
        let s = analytic_spectrum(&p, 2).unwrap();
        assert_eq!(
            biorthogonality_matrix(&s),
            Err(Error::MissingLeftVector { index: 0 })
        );
    }

    #[test]
    fn overlap_length_mismatch() {
        let a = SiteState::zeros(2, "a");
        let b = SiteState::zeros(3, "b");
        assert!(matches!(dirac_overlap(&a, &b), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn table_has_fixed_columns() {
        let s = spectrum(2e-4, 40, 2);
        let table = s.to_table();
        let mut lines = table.lines();
        assert_eq!(lines.next(), Some("m,branch,re_E,im_E,residual"));
        let row: Vec<&str> = lines.next().unwrap().split(',').collect();
        assert_eq!(&row[..2], &["0", "+"]);
        assert_eq!(row.len(), 5);
    }
}
