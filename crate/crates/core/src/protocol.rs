//! Entanglement-based circuits for the two-way, one-way and floodlight
//! protocols, producing the covariance matrix held by the honest parties
//! just before heterodyne detection.
//!
//! Measurement-device-independent CV-QKD has no circuit of its own here:
//! once the relay's announced Bell outcome is absorbed into the state
//! distribution, Alice and Bob share a bipartite two-mode state and the
//! protocol is analysed exactly as the one-way protocol ([`build_mdi`]).

use crate::channel::{apply_channel, ChannelParams};
use crate::error::{check_range, Error, Result};
use crate::state::CovarianceMatrix;
use crate::symplectic::{ModeTag, SymplecticTransform};

use ModeTag::{Ubar, U};

/// Tunable parameters of the two-way circuit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoWayParams {
    /// Variance of Alice's TMSS.
    pub va: f64,
    /// Variance of Bob's TMSS.
    pub vb: f64,
    /// Transmittance of Bob's displacement beamsplitter.
    pub t: f64,
    /// Gain of Alice's final two-mode squeezer.
    pub g: f64,
}

impl TwoWayParams {
    pub fn new(va: f64, vb: f64, t: f64, g: f64) -> Result<Self> {
        let p = Self { va, vb, t, g };
        p.validate()?;
        Ok(p)
    }

    /// The point of the two-way parameter space that reduces to the one-way
    /// protocol: Alice sends vacuum, Bob reflects his own mode, no squeezer.
    pub fn one_way(vb: f64) -> Self {
        Self {
            va: 1.0,
            vb,
            t: 0.0,
            g: 1.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        check_range("va", self.va, 1.0, f64::INFINITY, "variance >= 1")?;
        check_range("vb", self.vb, 1.0, f64::INFINITY, "variance >= 1")?;
        check_range("t", self.t, 0.0, 1.0, "transmittance in [0, 1]")?;
        check_range("g", self.g, 1.0, f64::INFINITY, "gain >= 1")
    }
}

/// Floodlight circuit parameters. The defaults are illustrative only.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FloodlightParams {
    pub va: f64,
    pub vb: f64,
    /// Alice's attenuating beamsplitter (fraction sent to the channel).
    pub t_alice: f64,
    /// Bob's displacement beamsplitter.
    pub t_bob: f64,
    /// Gain of Bob's amplifying two-mode squeezer.
    pub g_bob: f64,
}

impl Default for FloodlightParams {
    fn default() -> Self {
        Self {
            va: 5.0,
            vb: 5.0,
            t_alice: 0.1,
            t_bob: 0.5,
            g_bob: 2.0,
        }
    }
}

impl FloodlightParams {
    pub fn validate(&self) -> Result<()> {
        check_range("va", self.va, 1.0, f64::INFINITY, "variance >= 1")?;
        check_range("vb", self.vb, 1.0, f64::INFINITY, "variance >= 1")?;
        check_range("t_alice", self.t_alice, 0.0, 1.0, "transmittance in [0, 1]")?;
        check_range("t_bob", self.t_bob, 0.0, 1.0, "transmittance in [0, 1]")?;
        check_range("g_bob", self.g_bob, 1.0, f64::INFINITY, "gain >= 1")
    }
}

/// How the one-way rate is normalized.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OneWayNormalization {
    /// Evaluate the two-way rate formula, including its factor ½, at the
    /// one-way point of parameter space. Makes the two protocols directly
    /// comparable on one plot.
    #[default]
    TwoWayReduction,
    /// One key per single channel use (factor 1).
    PerChannelUse,
}

impl OneWayNormalization {
    pub fn factor(self) -> f64 {
        match self {
            OneWayNormalization::TwoWayReduction => 0.5,
            OneWayNormalization::PerChannelUse => 1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProtocolKind {
    TwoWay,
    OneWay,
    Floodlight,
}

/// A classical variable held by the reconciling party, with the factor its
/// heterodyne outcome is rescaled by. A zero scale drops the variable.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Witness {
    pub mode: usize,
    pub scale: f64,
}

/// Which outcome is the raw key and what the rate is normalized to.
#[derive(Debug, Clone, PartialEq)]
pub struct KeyMap {
    pub key_mode: usize,
    pub witnesses: Vec<Witness>,
    /// Multiplies `βI − χ`: ½ when each round uses the channel twice.
    pub rate_factor: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProtocolState {
    kind: ProtocolKind,
    gamma: CovarianceMatrix,
    mode_names: Vec<&'static str>,
    key_map: Option<KeyMap>,
    params: Option<TwoWayParams>,
    channels: Vec<ChannelParams>,
}

impl ProtocolState {
    pub fn kind(&self) -> ProtocolKind {
        self.kind
    }

    pub fn gamma(&self) -> &CovarianceMatrix {
        &self.gamma
    }

    pub fn mode_names(&self) -> &[&'static str] {
        &self.mode_names
    }

    pub fn mode_index(&self, name: &str) -> Option<usize> {
        self.mode_names.iter().position(|&n| n == name)
    }

    pub fn key_map(&self) -> Option<&KeyMap> {
        self.key_map.as_ref()
    }

    /// The circuit parameters, for two-way and one-way states.
    pub fn params(&self) -> Option<&TwoWayParams> {
        self.params.as_ref()
    }

    /// Channels in the order the signal traverses them.
    pub fn channels(&self) -> &[ChannelParams] {
        &self.channels
    }

    /// Replaces the covariance matrix, keeping names and key map. Used to
    /// feed externally modified states (e.g. mis-tagged controls) through
    /// the same pipelines.
    pub fn with_gamma(mut self, gamma: CovarianceMatrix) -> Result<Self> {
        if gamma.num_modes() != self.mode_names.len() {
            return Err(Error::Dimension {
                expected: self.mode_names.len(),
                found: gamma.num_modes(),
            });
        }
        self.gamma = gamma;
        Ok(self)
    }

    pub fn with_rate_factor(mut self, factor: f64) -> Self {
        if let Some(k) = self.key_map.as_mut() {
            k.rate_factor = factor;
        }
        self
    }
}

/// Rescaling of Bob's `Y₁` that turns it into an estimate of the mode he
/// sent: `√(2(V_B − 1)/(V_B + 1))`.
pub fn bob_rescale(vb: f64) -> f64 {
    (2.0 * (vb - 1.0) / (vb + 1.0)).max(0.0).sqrt()
}

/// Two-way circuit. Output modes `(A₁, A₂, B₂, B₁)`, tagged `(U, Ū, Ū, U)`;
/// the raw key is Alice's heterodyne outcome on `A₂`.
pub fn build_two_way(
    p: &TwoWayParams,
    forward: ChannelParams,
    backward: ChannelParams,
) -> Result<ProtocolState> {
    p.validate()?;
    // Working slots: 0 = A₁″, 1 = A₁′ → C₁ → C₂ → C₂′ → A₂, 2 = B₁, 3 = B₁′ → B₂.
    let alice = CovarianceMatrix::tmss(p.va, (U, Ubar))?;
    let bob = CovarianceMatrix::tmss(p.vb, (U, Ubar))?;
    let mut gamma = alice.tensor(&bob);
    gamma = apply_channel(&gamma, 1, forward)?;
    // B(T) on (B₁′, C₁): its first output is B₂, its second is C₂.
    gamma = gamma.apply(&SymplecticTransform::beamsplitter(p.t, (3, 1), 4)?)?;
    gamma = apply_channel(&gamma, 1, backward)?;
    gamma = gamma.apply(&SymplecticTransform::two_mode_squeezer_neg(p.g, (0, 1), 4)?)?;
    let gamma = gamma.select(&[0, 1, 3, 2])?;

    Ok(ProtocolState {
        kind: ProtocolKind::TwoWay,
        gamma,
        mode_names: vec!["A1", "A2", "B2", "B1"],
        key_map: Some(KeyMap {
            key_mode: 1,
            witnesses: vec![
                Witness {
                    mode: 3,
                    scale: bob_rescale(p.vb),
                },
                Witness { mode: 2, scale: 1.0 },
            ],
            rate_factor: 0.5,
        }),
        params: Some(*p),
        channels: vec![forward, backward],
    })
}

/// One-way (no-switching) protocol: Bob's TMSS with one mode sent through
/// `channel` to Alice, whose heterodyne outcome is the raw key. Output modes
/// `(B₁, A₂)`, tagged `(U, Ū)`.
///
/// Equals [`build_two_way`] at [`TwoWayParams::one_way`] restricted to the
/// correlated modes.
pub fn build_one_way(
    vb: f64,
    channel: ChannelParams,
    normalization: OneWayNormalization,
) -> Result<ProtocolState> {
    let bob = CovarianceMatrix::tmss(vb, (U, Ubar))?;
    let gamma = apply_channel(&bob, 1, channel)?;
    Ok(ProtocolState {
        kind: ProtocolKind::OneWay,
        gamma,
        mode_names: vec!["B1", "A2"],
        key_map: Some(KeyMap {
            key_mode: 1,
            witnesses: vec![Witness {
                mode: 0,
                scale: bob_rescale(vb),
            }],
            rate_factor: normalization.factor(),
        }),
        params: Some(TwoWayParams::one_way(vb)),
        channels: vec![channel],
    })
}

/// MDI CV-QKD, analysed as the one-way protocol on the post-relay state.
pub fn build_mdi(
    vb: f64,
    channel: ChannelParams,
    normalization: OneWayNormalization,
) -> Result<ProtocolState> {
    build_one_way(vb, channel, normalization)
}

/// Gaussian floodlight circuit. Output modes `(A₁, A₂, A₃, B₁, B₂, B₃)`,
/// tagged `(U, Ū, Ū, U, Ū, U)`:
///
/// * Alice's TMSS on `(A₁, A₁′)`; `A₁′` is attenuated by a beamsplitter
///   whose tapped port is kept as `A₃`.
/// * Forward channel, then Bob mixes the received mode with his TMSS
///   partner `B₁′` on a beamsplitter, keeping `B₂`.
/// * Bob amplifies the outgoing mode with a two-mode squeezer fed by
///   vacuum, keeping the idler `B₃`.
/// * Backward channel to Alice's `A₂`.
///
/// No raw-key assignment is defined for this protocol.
pub fn build_floodlight(
    p: &FloodlightParams,
    forward: ChannelParams,
    backward: ChannelParams,
) -> Result<ProtocolState> {
    p.validate()?;
    // Slots: 0 A₁, 1 signal path, 2 A₃ (tap), 3 B₁, 4 B₁′ → B₂, 5 B₃ (idler).
    let alice = CovarianceMatrix::tmss(p.va, (U, Ubar))?;
    let tap = CovarianceMatrix::vacuum(1).with_tags(vec![Ubar])?;
    let bob = CovarianceMatrix::tmss(p.vb, (U, Ubar))?;
    let idler = CovarianceMatrix::vacuum(1);
    let mut gamma = alice.tensor(&tap).tensor(&bob).tensor(&idler);

    gamma = gamma.apply(&SymplecticTransform::beamsplitter(p.t_alice, (1, 2), 6)?)?;
    gamma = apply_channel(&gamma, 1, forward)?;
    gamma = gamma.apply(&SymplecticTransform::beamsplitter(p.t_bob, (1, 4), 6)?)?;
    gamma = gamma.apply(&SymplecticTransform::two_mode_squeezer(p.g_bob, (1, 5), 6)?)?;
    gamma = apply_channel(&gamma, 1, backward)?;

    Ok(ProtocolState {
        kind: ProtocolKind::Floodlight,
        gamma,
        mode_names: vec!["A1", "A2", "A3", "B1", "B2", "B3"],
        key_map: None,
        params: None,
        channels: vec![forward, backward],
    })
}
