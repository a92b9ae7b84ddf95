//! Circuit-level stochastic Pauli noise and the Monte Carlo experiment
//! driver.
//!
//! Noise enters as discrete post-location Pauli faults (depolarizing per
//! gate/idle, preparation flips) plus asymmetric readout misassignment, so
//! Monte Carlo runs stay on the fast tableau backend and remain exact for
//! Clifford circuits. Shots are parallelized with per-shot generators
//! derived from (seed, shot index); results are independent of the worker
//! count.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::circuit::{Circuit, Op};
use crate::faults::{Fault, FaultKind};
use crate::metrics::{mc_fidelity, FidelityMode, FidelityReport};
use crate::pauli::{Letter, PauliString};
use crate::protocols::{
    classify_coset, ideal_logical_minus, run_encoding, run_flagged_s1, Policy, Toolkit,
};
use crate::tableau::StabilizerState;
use crate::Result;

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct NoiseModel {
    /// Depolarizing rate per two-qubit gate.
    pub p2: f64,
    /// Depolarizing rate per single-qubit gate.
    pub p1: f64,
    /// Depolarizing rate per idle location.
    pub p_idle: f64,
    /// Preparation flip rate.
    pub p_prep: f64,
    /// P(record -1 | state gives +1), i.e. 1 - F0.
    pub eps0: f64,
    /// P(record +1 | state gives -1), i.e. 1 - F1.
    pub eps1: f64,
    /// Optional extra ancilla flip after readout, default off.
    pub p_reset_flip: f64,
}

impl Default for NoiseModel {
    fn default() -> Self {
        NoiseModel::zero()
    }
}

impl NoiseModel {
    pub fn zero() -> NoiseModel {
        NoiseModel {
            p2: 0.0,
            p1: 0.0,
            p_idle: 0.0,
            p_prep: 0.0,
            eps0: 0.0,
            eps1: 0.0,
            p_reset_flip: 0.0,
        }
    }

    /// Gate rates with the conventional defaults p1 = p_idle = p2/10.
    pub fn depolarizing(p2: f64) -> NoiseModel {
        NoiseModel {
            p2,
            p1: p2 / 10.0,
            p_idle: p2 / 10.0,
            ..NoiseModel::zero()
        }
    }

    /// The single-shot readout asymmetry of the reference hardware:
    /// F0 = 90.5%, F1 = 98.6%.
    pub fn with_hardware_readout(mut self) -> NoiseModel {
        self.eps0 = 1.0 - 0.905;
        self.eps1 = 1.0 - 0.986;
        self
    }

    pub fn is_zero(&self) -> bool {
        self.p2 == 0.0
            && self.p1 == 0.0
            && self.p_idle == 0.0
            && self.p_prep == 0.0
            && self.eps0 == 0.0
            && self.eps1 == 0.0
            && self.p_reset_flip == 0.0
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("p2", self.p2),
            ("p1", self.p1),
            ("p_idle", self.p_idle),
            ("p_prep", self.p_prep),
            ("eps0", self.eps0),
            ("eps1", self.eps1),
            ("p_reset_flip", self.p_reset_flip),
        ] {
            if !(0.0..=1.0).contains(&v) {
                return Err(crate::Error::TableInconsistency(format!(
                    "noise rate {name}={v} outside [0,1]"
                )));
            }
        }
        Ok(())
    }
}

/// Independent Bernoulli draws per location; uniform non-identity Pauli on
/// firing. Measurement misassignment is outcome-dependent and handled at
/// run time, not here.
pub fn sample_faults(circuit: &Circuit, nm: &NoiseModel, rng: &mut ChaCha8Rng) -> Vec<Fault> {
    let mut faults = Vec::new();
    for loc in circuit.enumerate_locations() {
        let (rate, arity) = match &loc.op {
            Op::Gate { gate, .. } => {
                if gate.is_two_qubit() {
                    (nm.p2, 2)
                } else {
                    (nm.p1, 1)
                }
            }
            Op::Idle { .. } => (nm.p_idle, 1),
            Op::Prepare { .. } => (nm.p_prep, 0),
            Op::MeasureReset { .. } => (0.0, 0),
        };
        if rate <= 0.0 || rng.random::<f64>() >= rate {
            continue;
        }
        let kind = match (&loc.op, arity) {
            (Op::Prepare { basis, .. }, _) => {
                // a preparation fault flips to the orthogonal state
                let letter = match basis {
                    crate::tableau::Basis::Zero | crate::tableau::Basis::One => Letter::X,
                    _ => Letter::Z,
                };
                FaultKind::Pauli(PauliString::single(1, 0, letter))
            }
            (_, n_q) => {
                let count = 4u32.pow(n_q as u32) - 1;
                let pick = rng.random_range(1..=count);
                let mut p = PauliString::identity(n_q);
                let mut v = pick;
                for q in 0..n_q {
                    let letter = match v & 3 {
                        0 => Letter::I,
                        1 => Letter::X,
                        2 => Letter::Y,
                        _ => Letter::Z,
                    };
                    p.set_letter(q, letter);
                    v >>= 2;
                }
                FaultKind::Pauli(p)
            }
        };
        faults.push(Fault {
            location_index: loc.index,
            kind,
        });
    }
    faults
}

/// Which protocol a Monte Carlo experiment drives.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ProtocolKind {
    Encoding { ft: bool, policy: Policy },
    FlaggedS1 { inject_y: bool },
}

/// Aggregate result of a Monte Carlo experiment.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub protocol: String,
    pub shots: usize,
    pub accepted_shots: usize,
    pub acceptance_rate: f64,
    pub fidelity: FidelityReport,
    pub seed: u64,
}

fn shot_rng(seed: u64, shot: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(shot.wrapping_add(1));
    rng
}

/// Run `shots` noisy protocol executions on the tableau backend and
/// aggregate the per-shot residual classification into fidelity estimates.
pub fn run_experiment(
    toolkit: &Toolkit,
    protocol: ProtocolKind,
    nm: &NoiseModel,
    shots: usize,
    seed: u64,
) -> Result<ExperimentReport> {
    nm.validate()?;
    #[derive(Default, Clone)]
    struct Tally {
        accepted: usize,
        success_flags: Vec<(bool, bool)>, // (flag_raised, no logical error after decode)
    }
    let tally = (0..shots as u64)
        .into_par_iter()
        .try_fold(Tally::default, |mut acc, shot| -> Result<Tally> {
            let mut rng = shot_rng(seed, shot);
            let inner_seed = rng.random::<u64>();
            match protocol {
                ProtocolKind::Encoding { ft, policy } => {
                    let (record, state) = run_encoding::<StabilizerState>(
                        toolkit,
                        ft,
                        policy,
                        None,
                        Some(nm),
                        None,
                        inner_seed,
                    )?;
                    if record.accepted {
                        acc.accepted += 1;
                        let c = classify_coset(toolkit, &state, &record.pauli_frame)?;
                        acc.success_flags.push((false, !c.logical_flip));
                    }
                }
                ProtocolKind::FlaggedS1 { inject_y } => {
                    let state: StabilizerState = ideal_logical_minus(toolkit, 7)?;
                    let (record, after) =
                        run_flagged_s1(state, inject_y, None, Some(nm), inner_seed)?;
                    acc.accepted += 1;
                    // hypothetical perfect correction with flag information
                    let syndrome: Vec<i8> = toolkit
                        .code
                        .stabilizers
                        .iter()
                        .map(|s| after.expectation_sign(&toolkit.on_register(s, 7)))
                        .collect::<Result<Vec<_>>>()?;
                    let recovery = toolkit
                        .tables
                        .decode(syndrome.try_into().unwrap(), record.flag_raised);
                    let mut fixed = after;
                    use crate::backend::Backend;
                    fixed.apply_pauli(&toolkit.on_register(&recovery, 7))?;
                    let c = classify_coset(toolkit, &fixed, &PauliString::identity(5))?;
                    acc.success_flags
                        .push((record.flag_raised, !c.logical_flip));
                }
            }
            Ok(acc)
        })
        .try_reduce(Tally::default, |mut a, b| {
            a.accepted += b.accepted;
            a.success_flags.extend(b.success_flags);
            Ok(a)
        })?;

    let successes: Vec<bool> = tally.success_flags.iter().map(|(_, ok)| *ok).collect();
    let (f_l, stderr) = mc_fidelity(&successes);
    let raised: Vec<bool> = tally
        .success_flags
        .iter()
        .filter(|(fl, _)| *fl)
        .map(|(_, ok)| *ok)
        .collect();
    let not_raised: Vec<bool> = tally
        .success_flags
        .iter()
        .filter(|(fl, _)| !*fl)
        .map(|(_, ok)| *ok)
        .collect();
    let p_flag = if successes.is_empty() {
        0.0
    } else {
        raised.len() as f64 / successes.len() as f64
    };
    let fidelity = FidelityReport {
        f_l,
        f_l_raised: (!raised.is_empty()).then(|| mc_fidelity(&raised).0),
        f_l_not_raised: (!not_raised.is_empty()).then(|| mc_fidelity(&not_raised).0),
        p_flag,
        p0_minus: None,
        p1_minus: None,
        p0_plus: None,
        p1_plus: None,
        mode: FidelityMode::McEstimate {
            shots: successes.len(),
            stderr,
        },
    };
    Ok(ExperimentReport {
        protocol: format!("{protocol:?}"),
        shots,
        accepted_shots: tally.accepted,
        acceptance_rate: tally.accepted as f64 / shots.max(1) as f64,
        fidelity,
        seed,
    })
}

/// One row of a parameter sweep.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepRow {
    pub rate: f64,
    pub f_l: f64,
    pub stderr: f64,
    pub acceptance: f64,
    pub shots: usize,
}

/// Sweep the two-qubit depolarizing rate over a grid (p1 = p_idle = p2/10),
/// returning one row per grid point.
pub fn sweep(
    toolkit: &Toolkit,
    protocol: ProtocolKind,
    grid: &[f64],
    shots: usize,
    seed: u64,
) -> Result<Vec<SweepRow>> {
    let mut rows = Vec::with_capacity(grid.len());
    for (i, &rate) in grid.iter().enumerate() {
        let nm = NoiseModel::depolarizing(rate);
        let report = run_experiment(toolkit, protocol, &nm, shots, seed.wrapping_add(i as u64))?;
        let stderr = match report.fidelity.mode {
            FidelityMode::McEstimate { stderr, .. } => stderr,
            _ => 0.0,
        };
        rows.push(SweepRow {
            rate,
            f_l: report.fidelity.f_l,
            stderr,
            acceptance: report.acceptance_rate,
            shots: report.shots,
        });
    }
    Ok(rows)
}
