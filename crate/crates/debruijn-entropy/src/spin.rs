//! Finite circular Ising chains through the order-1 binary density of
//! states.
//!
//! A binary cyclic word is a spin configuration via `sigma_j = 2 w_j - 1`,
//! and its energy depends only on the gram counts `(x00, x*)`. Partition
//! functions over all `2^ell` configurations therefore reduce to a sum over
//! the `(x00, x*)` grid weighted by the exact number of configurations per
//! cell, computed in log domain.
//!
//! The local potential is `-cJ sigma_j sigma_{j+1} - K sigma_j`, where the
//! prefactor `c` is a selectable convention: the closed-form energy
//! expression implies `c = 1`, while the potential as usually written has
//! `c = 2`; direct summation shows the two disagree by that factor in the
//! J-dependence, so both are kept and `c = 1` is the default.

use crate::alphabet::CyclicWord;
use crate::entropy::binary_w1_closed_form;
use crate::error::{Error, Result};
use crate::numeric::{log_sum_exp, LogFactorials};

/// Which J-prefactor the local potential uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CouplingConvention {
    /// `c = 1`: consistent with the closed-form energy and the quoted
    /// thermodynamic limit.
    #[default]
    Eq12Consistent,
    /// `c = 2`: the potential as written, `-2J sigma sigma' - K sigma`.
    TextPotential,
}

impl CouplingConvention {
    pub fn coupling_prefactor(self) -> f64 {
        match self {
            CouplingConvention::Eq12Consistent => 1.0,
            CouplingConvention::TextPotential => 2.0,
        }
    }
}

/// Parameters of a circular spin-1/2 chain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpinParams {
    /// Dipole-dipole coupling `J` (energy units).
    pub coupling: f64,
    /// External field `K` (energy units).
    pub field: f64,
    /// Inverse temperature `beta` (1/energy).
    pub beta: f64,
    /// Chain length `ell`.
    pub ell: u64,
    pub convention: CouplingConvention,
}

impl SpinParams {
    pub fn new(
        coupling: f64,
        field: f64,
        beta: f64,
        ell: u64,
        convention: CouplingConvention,
    ) -> Result<Self> {
        if ell < 2 {
            return Err(Error::InvalidSpinParams("chain length must be at least 2"));
        }
        if beta.is_nan() || beta < 0.0 {
            return Err(Error::InvalidSpinParams(
                "inverse temperature must be nonnegative",
            ));
        }
        if !coupling.is_finite() || !field.is_finite() {
            return Err(Error::InvalidSpinParams("couplings must be finite"));
        }
        Ok(SpinParams {
            coupling,
            field,
            beta,
            ell,
            convention,
        })
    }

    fn effective_coupling(&self) -> f64 {
        self.convention.coupling_prefactor() * self.coupling
    }
}

/// Energy of a binary cyclic word by direct summation of the local
/// potential over all cyclic positions.
pub fn word_energy(word: &CyclicWord, params: &SpinParams) -> Result<f64> {
    let n = word.alphabet().size();
    if n != 2 {
        return Err(Error::NotBinaryAlphabet(n));
    }
    let c_j = params.effective_coupling();
    let k = params.field;
    let ell = word.len();
    let mut energy = 0.0;
    for j in 0..ell {
        let s0 = 2.0 * word.index_at(j) as f64 - 1.0;
        let s1 = 2.0 * word.index_at(j + 1) as f64 - 1.0;
        energy += -c_j * s0 * s1 - k * s0;
    }
    Ok(energy)
}

/// Closed-form energy of the `(x00, x*)` cell:
/// `2 K x00 + (4 cJ + 2K) x* - (cJ + K) ell`.
pub fn closed_form_energy(x00: u64, xstar: u64, params: &SpinParams) -> Result<f64> {
    validate_cell(x00, xstar, params.ell)?;
    Ok(cell_energy(x00, xstar, params))
}

fn cell_energy(x00: u64, xstar: u64, params: &SpinParams) -> f64 {
    let c_j = params.effective_coupling();
    let k = params.field;
    let ell = params.ell as f64;
    2.0 * k * x00 as f64 + (4.0 * c_j + 2.0 * k) * xstar as f64 - (c_j + k) * ell
}

fn validate_cell(x00: u64, xstar: u64, ell: u64) -> Result<()> {
    if x00 + 2 * xstar > ell || (xstar == 0 && x00 != 0 && x00 != ell) {
        return Err(Error::InvalidBinaryCell { x00, xstar, ell });
    }
    Ok(())
}

/// `log Z` over all `2^ell` spin configurations, as a log-sum-exp over the
/// `(x00, x*)` grid plus the two constant words.
///
/// The per-cell weight is the exact number of length-`ell` configurations
/// with those gram counts, `ell * c(A) / A!` (the dominant divisor term of
/// the class count, scaled by `ell`): summed over the grid at `beta = 0`
/// this reproduces `2^ell` exactly, so the partition function matches the
/// brute-force sum over configurations rather than over necklaces.
pub fn partition_function(params: &SpinParams) -> f64 {
    let ell = params.ell;
    let lf = LogFactorials::up_to(ell);
    let mut terms = Vec::new();
    for xstar in 1..=ell / 2 {
        for x00 in 0..=ell - 2 * xstar {
            let x11 = ell - x00 - 2 * xstar;
            let log_count = (ell as f64).ln()
                + (xstar as f64).ln()
                + lf.lf(x00 + xstar - 1)
                + lf.lf(xstar + x11 - 1)
                - lf.lf(x00)
                - 2.0 * lf.lf(xstar)
                - lf.lf(x11);
            terms.push(log_count - params.beta * cell_energy(x00, xstar, params));
        }
    }
    // the two constant words, one configuration each
    terms.push(-params.beta * cell_energy(0, 0, params));
    terms.push(-params.beta * cell_energy(ell, 0, params));
    log_sum_exp(&terms)
}

/// `lim Z^(1/ell)` of the chain:
/// `e^(b Je) cosh(b K) + sqrt(e^(2 b Je) sinh^2(b K) + e^(-2 b Je))`
/// with `Je` the effective coupling of the selected convention.
pub fn thermodynamic_limit(params: &SpinParams) -> f64 {
    let bj = params.beta * params.effective_coupling();
    let bk = params.beta * params.field;
    bj.exp() * bk.cosh() + ((2.0 * bj).exp() * bk.sinh().powi(2) + (-2.0 * bj).exp()).sqrt()
}

/// One cell of the density-of-states grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SpinGridCell {
    pub x00: u64,
    pub xstar: u64,
    /// Order-1 de Bruijn entropy of the cell (log of the necklace count).
    pub h1_nats: f64,
    pub energy: f64,
    /// `exp(-beta * energy)`.
    pub boltzmann_weight: f64,
}

/// The full `(x00, x*)` grid including the two constant words, for CSV
/// emission.
pub fn boltzmann_grid(params: &SpinParams) -> Result<Vec<SpinGridCell>> {
    let ell = params.ell;
    let mut cells = Vec::new();
    let mut push = |x00: u64, xstar: u64| -> Result<()> {
        let h1 = binary_w1_closed_form(x00, xstar, ell)?;
        let energy = cell_energy(x00, xstar, params);
        cells.push(SpinGridCell {
            x00,
            xstar,
            h1_nats: h1,
            energy,
            boltzmann_weight: (-params.beta * energy).exp(),
        });
        Ok(())
    };
    push(0, 0)?;
    push(ell, 0)?;
    for xstar in 1..=ell / 2 {
        for x00 in 0..=ell - 2 * xstar {
            push(x00, xstar)?;
        }
    }
    Ok(cells)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::alphabet::Alphabet;
    use std::sync::Arc;

    fn binary_word(bits: u64, ell: usize) -> CyclicWord {
        let a = Arc::new(Alphabet::from_str("01").unwrap());
        let indices: Vec<u32> = (0..ell).map(|j| ((bits >> j) & 1) as u32).collect();
        CyclicWord::from_indices(indices, &a).unwrap()
    }

    fn gram_counts(w: &CyclicWord) -> (u64, u64) {
        let ell = w.len();
        let mut x00 = 0u64;
        let mut xstar = 0u64;
        for j in 0..ell {
            match (w.index_at(j), w.index_at(j + 1)) {
                (0, 0) => x00 += 1,
                (0, 1) => xstar += 1,
                _ => {}
            }
        }
        (x00, xstar)
    }

    fn params(convention: CouplingConvention, ell: u64) -> SpinParams {
        SpinParams::new(0.37, -0.21, 0.8, ell, convention).unwrap()
    }

    #[test]
    fn parameter_validation() {
        assert!(SpinParams::new(1.0, 0.0, 1.0, 1, CouplingConvention::default()).is_err());
        assert!(SpinParams::new(1.0, 0.0, -0.5, 8, CouplingConvention::default()).is_err());
        assert!(SpinParams::new(f64::NAN, 0.0, 1.0, 8, CouplingConvention::default()).is_err());
    }

    #[test]
    fn zero_couplings_zero_energy() {
        let p = SpinParams::new(0.0, 0.0, 2.0, 8, CouplingConvention::default()).unwrap();
        for bits in [0u64, 1, 0b1010_1010, 0b1100_0101] {
            assert_eq!(word_energy(&binary_word(bits, 8), &p).unwrap(), 0.0);
            assert!((partition_function(&p) - 8.0 * 2.0f64.ln()).abs() < 1e-9);
        }
    }

    #[test]
    fn word_energy_requires_binary() {
        let a = Arc::new(Alphabet::from_str("ACGT").unwrap());
        let w = CyclicWord::from_text("ACGT", &a).unwrap();
        let p = params(CouplingConvention::default(), 4);
        assert!(matches!(
            word_energy(&w, &p),
            Err(Error::NotBinaryAlphabet(4))
        ));
    }

    #[test]
    fn closed_form_matches_direct_sum_exhaustively() {
        // agreement must hold under either convention, for all ell = 8 words
        for convention in [
            CouplingConvention::Eq12Consistent,
            CouplingConvention::TextPotential,
        ] {
            let p = params(convention, 8);
            for bits in 0..256u64 {
                let w = binary_word(bits, 8);
                let (x00, xstar) = gram_counts(&w);
                let direct = word_energy(&w, &p).unwrap();
                let closed = closed_form_energy(x00, xstar, &p).unwrap();
                assert!(
                    (direct - closed).abs() < 1e-9,
                    "bits {bits:b}: {direct} vs {closed} ({convention:?})"
                );
            }
        }
    }

    #[test]
    fn constant_word_energies() {
        let p = params(CouplingConvention::Eq12Consistent, 10);
        // Eq12 convention: E(0^l) = (K - J) l
        let expected = (p.field - p.coupling) * 10.0;
        assert!((closed_form_energy(10, 0, &p).unwrap() - expected).abs() < 1e-12);
        assert!(closed_form_energy(4, 0, &p).is_err());
        assert!(closed_form_energy(9, 1, &p).is_err());
    }

    #[test]
    fn partition_function_matches_brute_force() {
        for convention in [
            CouplingConvention::Eq12Consistent,
            CouplingConvention::TextPotential,
        ] {
            let p = params(convention, 8);
            let mut z = 0.0f64;
            for bits in 0..256u64 {
                let w = binary_word(bits, 8);
                z += (-p.beta * word_energy(&w, &p).unwrap()).exp();
            }
            let log_z = partition_function(&p);
            assert!(
                (log_z - z.ln()).abs() < 1e-9,
                "{convention:?}: {log_z} vs {}",
                z.ln()
            );
        }
    }

    #[test]
    fn thermodynamic_limit_special_cases() {
        let p = SpinParams::new(0.7, 0.0, 1.3, 16, CouplingConvention::Eq12Consistent).unwrap();
        assert!((thermodynamic_limit(&p) - 2.0 * (1.3f64 * 0.7).cosh()).abs() < 1e-12);
        let p = SpinParams::new(0.7, 0.4, 0.0, 16, CouplingConvention::Eq12Consistent).unwrap();
        assert!((thermodynamic_limit(&p) - 2.0).abs() < 1e-12);
    }

    #[test]
    fn finite_chains_converge_to_the_limit() {
        for convention in [
            CouplingConvention::Eq12Consistent,
            CouplingConvention::TextPotential,
        ] {
            let mut previous_gap = f64::INFINITY;
            for ell in [16u64, 32, 64, 128, 256] {
                let p = SpinParams::new(0.5, 0.2, 1.0, ell, convention).unwrap();
                let per_site = (partition_function(&p) / ell as f64).exp();
                let gap = (per_site - thermodynamic_limit(&p)).abs();
                // monotone until the gap reaches floating-point noise
                assert!(
                    gap < previous_gap + 1e-12,
                    "ell {ell}: {gap} vs {previous_gap}"
                );
                previous_gap = gap;
            }
            assert!(
                previous_gap
                    / thermodynamic_limit(
                        &SpinParams::new(0.5, 0.2, 1.0, 256, convention).unwrap()
                    )
                    < 0.01
            );
        }
    }

    #[test]
    fn grid_covers_every_cell_once() {
        let p = params(CouplingConvention::Eq12Consistent, 12);
        let grid = boltzmann_grid(&p).unwrap();
        // 2 degenerate cells + sum over xstar of (ell - 2 xstar + 1)
        let expected: u64 = 2 + (1..=6u64).map(|x| 12 - 2 * x + 1).sum::<u64>();
        assert_eq!(grid.len() as u64, expected);
        // necklace counts over the grid total the Burnside count
        let total: f64 = grid.iter().map(|c| c.h1_nats.exp()).sum();
        assert!((total - 352.0).abs() < 1e-6);
    }
}
