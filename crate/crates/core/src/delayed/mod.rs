//! Delayed-choice swapping harness.
//!
//! Each shot draws a joint outcome for Alice (qubit 0), Bob (qubit 3) and
//! Victor (qubits 1, 2) from the Born distribution of the four-qubit state.
//! Timestamps are attached afterwards and never influence the statistics.
//! Victor's records always come later than Alice's and Bob's, and sorting the
//! earlier records by Victor's outcome recovers the conditional correlations.

use std::collections::BTreeMap;
use std::io::{Read, Write};

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::chsh::{self, combine, Settings};
use crate::error::{Error, Result};
use crate::infometrics::Method;
use crate::output::sig12;
use crate::qstate::{born_distribution, Direction, ProjectiveBasis, PureState};
use crate::rng::RngStream;
use crate::swapkit::{self, ALICE, BOB, OUTCOME_NAMES, VICTOR};

const SHARD: usize = 1 << 14;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum VictorMode {
    /// Measure in the family with the configured `α`.
    GeneralizedBasis,
    /// Measure each spin along z, i.e. the family at `α = 1`.
    SeparableZ,
}

impl std::str::FromStr for VictorMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "generalized-basis" | "generalized" => Ok(Self::GeneralizedBasis),
            "separable-z" => Ok(Self::SeparableZ),
            _ => Err(Error::InvalidParameter(format!(
                "unknown victor mode {s:?}"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimingModel {
    pub source_to_ab_ns: f64,
    pub victor_delay_ns: f64,
    pub ab_to_victor_separation_ns: f64,
}

impl Default for TimingModel {
    fn default() -> Self {
        Self {
            source_to_ab_ns: 20.0,
            victor_delay_ns: 50.0,
            ab_to_victor_separation_ns: 8.0,
        }
    }
}

impl TimingModel {
    pub fn ab_time_ns(&self) -> f64 {
        self.source_to_ab_ns
    }

    pub fn victor_time_ns(&self) -> f64 {
        self.source_to_ab_ns + self.victor_delay_ns
    }

    /// Victor's detection minus the latest time a light signal from Alice's or
    /// Bob's detection could reach him. Positive when Victor measures inside
    /// their future light cone.
    pub fn light_cone_margin_ns(&self) -> f64 {
        self.victor_time_ns() - self.ab_time_ns() - self.ab_to_victor_separation_ns
    }

    fn validate(&self) -> Result<()> {
        let fields = [
            ("source_to_ab_ns", self.source_to_ab_ns),
            ("victor_delay_ns", self.victor_delay_ns),
            (
                "ab_to_victor_separation_ns",
                self.ab_to_victor_separation_ns,
            ),
        ];
        for (name, v) in fields {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::InvalidParameter(format!(
                    "{name} must be >= 0, got {v}"
                )));
            }
        }
        if self.victor_delay_ns <= 0.0 {
            return Err(Error::InvalidParameter(
                "victor_delay_ns must be positive so Victor measures last".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub victor_alpha: f64,
    pub victor_mode: VictorMode,
    pub alice_dir: Direction,
    pub bob_dir: Direction,
    pub shots: u64,
    pub seed: u64,
    pub timing: TimingModel,
}

impl ExperimentConfig {
    pub fn new(victor_alpha: f64, shots: u64, seed: u64) -> Self {
        Self {
            victor_alpha,
            victor_mode: VictorMode::GeneralizedBasis,
            alice_dir: Direction::z(),
            bob_dir: Direction::z(),
            shots,
            seed,
            timing: TimingModel::default(),
        }
    }

    pub fn with_directions(mut self, alice: Direction, bob: Direction) -> Self {
        self.alice_dir = alice;
        self.bob_dir = bob;
        self
    }

    pub fn with_mode(mut self, mode: VictorMode) -> Self {
        self.victor_mode = mode;
        self
    }

    /// The family parameter Victor actually measures with.
    pub fn effective_alpha(&self) -> f64 {
        match self.victor_mode {
            VictorMode::GeneralizedBasis => self.victor_alpha,
            VictorMode::SeparableZ => 1.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.shots == 0 {
            return Err(Error::InvalidParameter("shots must be at least 1".into()));
        }
        swapkit::Alpha::new(self.victor_alpha)?;
        self.timing.validate()
    }

    fn victor_tag(&self) -> String {
        match self.victor_mode {
            VictorMode::GeneralizedBasis => format!("alpha={}", sig12(self.victor_alpha)),
            VictorMode::SeparableZ => "separable-z".to_string(),
        }
    }

    fn bases(&self) -> Result<(ProjectiveBasis, ProjectiveBasis, ProjectiveBasis)> {
        let victor = swapkit::make_alpha_basis(self.effective_alpha(), VICTOR.0, VICTOR.1)?;
        Ok((
            self.alice_dir.eigenbasis(ALICE),
            self.bob_dir.eigenbasis(BOB),
            victor.projective().clone(),
        ))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Party {
    Alice,
    Bob,
    Victor,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EventRecord {
    pub shot_id: u64,
    pub party: Party,
    pub time_ns: f64,
    pub setting_tag: String,
    /// ±1 for Alice and Bob, outcome index 0..=3 for Victor.
    pub outcome: i8,
}

/// One shot's joint outcome `(alice ±1, bob ±1, victor 0..=3)`.
pub type JointOutcome = (i8, i8, usize);

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunLog {
    pub config: ExperimentConfig,
    pub events: Vec<EventRecord>,
}

fn spin(outcome_index: usize) -> i8 {
    if outcome_index == 0 {
        1
    } else {
        -1
    }
}

/// Joint distribution keyed `[alice, bob, victor]` outcome indices.
pub fn joint_distribution(config: &ExperimentConfig) -> Result<BTreeMap<Vec<usize>, f64>> {
    let (a, b, v) = config.bases()?;
    born_distribution(&swapkit::make_total_state(), &[&a, &b, &v])
}

/// Samples `config.shots` joint outcomes from RNG streams `(seed, major, shard)`.
fn sample_outcomes(config: &ExperimentConfig, major: u32) -> Result<Vec<JointOutcome>> {
    config.validate()?;
    let dist = joint_distribution(config)?;
    let keys: Vec<&Vec<usize>> = dist.keys().collect();
    let weights: Vec<f64> = dist.values().copied().collect();
    let sampler = WeightedIndex::new(&weights)
        .map_err(|e| Error::InvalidParameter(format!("degenerate distribution: {e}")))?;
    let shots = usize::try_from(config.shots)
        .map_err(|_| Error::InvalidParameter("too many shots".into()))?;
    let shards = shots.div_ceil(SHARD);
    let parts: Vec<Vec<JointOutcome>> = (0..shards)
        .into_par_iter()
        .map(|shard| {
            let mut rng = RngStream::keyed(config.seed, major, shard as u32);
            let count = SHARD.min(shots - shard * SHARD);
            (0..count)
                .map(|_| {
                    let k = keys[sampler.sample(&mut rng)];
                    (spin(k[0]), spin(k[1]), k[2])
                })
                .collect()
        })
        .collect();
    Ok(parts.concat())
}

pub fn run_experiment(config: &ExperimentConfig) -> Result<RunLog> {
    let outcomes = sample_outcomes(config, 0)?;
    let (ab_t, v_t) = (config.timing.ab_time_ns(), config.timing.victor_time_ns());
    let (a_tag, b_tag, v_tag) = (
        config.alice_dir.tag(),
        config.bob_dir.tag(),
        config.victor_tag(),
    );
    let mut events = Vec::with_capacity(outcomes.len() * 3);
    for (shot, (a, b, v)) in outcomes.into_iter().enumerate() {
        let shot_id = shot as u64;
        events.push(EventRecord {
            shot_id,
            party: Party::Alice,
            time_ns: ab_t,
            setting_tag: a_tag.clone(),
            outcome: a,
        });
        events.push(EventRecord {
            shot_id,
            party: Party::Bob,
            time_ns: ab_t,
            setting_tag: b_tag.clone(),
            outcome: b,
        });
        events.push(EventRecord {
            shot_id,
            party: Party::Victor,
            time_ns: v_t,
            setting_tag: v_tag.clone(),
            outcome: v as i8,
        });
    }
    Ok(RunLog {
        config: *config,
        events,
    })
}

const CSV_HEADER: [&str; 5] = ["shot_id", "party", "time_ns", "setting_tag", "outcome"];

impl RunLog {
    /// Joint outcome of every shot, ordered by shot id.
    pub fn shots(&self) -> Result<Vec<JointOutcome>> {
        let mut per_shot: BTreeMap<u64, [Option<i8>; 3]> = BTreeMap::new();
        for e in &self.events {
            let slot = &mut per_shot.entry(e.shot_id).or_default()[e.party as usize];
            if slot.replace(e.outcome).is_some() {
                return Err(Error::InvalidParameter(format!(
                    "shot {} has two {:?} events",
                    e.shot_id, e.party
                )));
            }
        }
        per_shot
            .into_iter()
            .map(|(id, rec)| match rec {
                [Some(a), Some(b), Some(v)] if (0..4).contains(&v) => Ok((a, b, v as usize)),
                _ => Err(Error::InvalidParameter(format!("shot {id} is incomplete"))),
            })
            .collect()
    }

    pub fn counts(&self) -> Result<[u64; 4]> {
        let mut c = [0u64; 4];
        for (_, _, v) in self.shots()? {
            c[v] += 1;
        }
        Ok(c)
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(CSV_HEADER)?;
        for e in &self.events {
            let party = match e.party {
                Party::Alice => "alice",
                Party::Bob => "bob",
                Party::Victor => "victor",
            };
            w.write_record([
                e.shot_id.to_string(),
                party.to_string(),
                sig12(e.time_ns),
                e.setting_tag.clone(),
                e.outcome.to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn summary(&self) -> Result<RunSummary> {
        let counts = self.counts()?;
        let conditional_estimates = (0..4)
            .map(|k| {
                let estimate = match conditional_correlation(self, k) {
                    Ok(e) => Some(e),
                    Err(Error::InsufficientData(_)) => None,
                    Err(e) => return Err(e),
                };
                Ok(ConditionalSummary {
                    outcome: k,
                    name: OUTCOME_NAMES[k].to_string(),
                    expected: expected_conditional_correlation(&self.config, k)?,
                    estimate,
                })
            })
            .collect::<Result<_>>()?;
        Ok(RunSummary {
            config: self.config,
            counts,
            conditional_estimates,
            chsh: Vec::new(),
        })
    }
}

pub fn read_events_csv<R: Read>(input: R) -> Result<Vec<EventRecord>> {
    let mut r = csv::Reader::from_reader(input);
    let header: Vec<String> = r.headers()?.iter().map(str::to_string).collect();
    if header != CSV_HEADER {
        return Err(Error::InvalidParameter(format!(
            "unexpected header {header:?}"
        )));
    }
    r.deserialize()
        .map(|row| row.map_err(Error::from))
        .collect()
}

/// Alice/Bob outcome pairs grouped by Victor's later outcome; all four keys present.
pub fn sort_by_victor(log: &RunLog) -> Result<BTreeMap<usize, Vec<(i8, i8)>>> {
    let mut groups: BTreeMap<usize, Vec<(i8, i8)>> = (0..4).map(|k| (k, Vec::new())).collect();
    for (a, b, v) in log.shots()? {
        groups.entry(v).or_default().push((a, b));
    }
    Ok(groups)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CorrelationEstimate {
    pub e_hat: f64,
    pub stderr: f64,
    pub n: u64,
}

impl CorrelationEstimate {
    /// Mean of `x·y` with normal-approximation error `√((1-ê²)/N)`.
    pub fn from_pairs<'a, I>(pairs: I) -> Result<Self>
    where
        I: IntoIterator<Item = &'a (i8, i8)>,
    {
        let (mut sum, mut n) = (0i64, 0u64);
        for (a, b) in pairs {
            sum += i64::from(a * b);
            n += 1;
        }
        if n == 0 {
            return Err(Error::InsufficientData("no records in subset".into()));
        }
        let e_hat = sum as f64 / n as f64;
        Ok(Self {
            e_hat,
            stderr: ((1.0 - e_hat * e_hat).max(0.0) / n as f64).sqrt(),
            n,
        })
    }
}

pub fn conditional_correlation(log: &RunLog, victor_outcome: usize) -> Result<CorrelationEstimate> {
    if victor_outcome > 3 {
        return Err(Error::OutcomeOutOfRange {
            outcome: victor_outcome,
            count: 4,
        });
    }
    let groups = sort_by_victor(log)?;
    CorrelationEstimate::from_pairs(&groups[&victor_outcome]).map_err(|_| {
        Error::InsufficientData(format!("no shots with victor outcome {victor_outcome}"))
    })
}

/// Alice–Bob correlation over all shots, ignoring Victor.
pub fn unconditioned_correlation(log: &RunLog) -> Result<CorrelationEstimate> {
    let pairs: Vec<(i8, i8)> = log.shots()?.into_iter().map(|(a, b, _)| (a, b)).collect();
    CorrelationEstimate::from_pairs(&pairs)
}

/// Mean of Alice's outcomes over all shots with its standard error.
pub fn alice_marginal(log: &RunLog) -> Result<CorrelationEstimate> {
    let pairs: Vec<(i8, i8)> = log.shots()?.into_iter().map(|(a, _, _)| (a, 1)).collect();
    CorrelationEstimate::from_pairs(&pairs)
}

/// `<alice_dir·σ ⊗ bob_dir·σ>` in the 0–3 state selected by `victor_outcome`.
pub fn expected_conditional_correlation(
    config: &ExperimentConfig,
    victor_outcome: usize,
) -> Result<f64> {
    let state = swapkit::conditional_state(config.effective_alpha(), victor_outcome)?;
    state.expectation(&[(ALICE, config.alice_dir), (BOB, config.bob_dir)])
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChshEstimate {
    pub outcome: usize,
    pub s_hat: f64,
    pub stderr: f64,
    /// Correlation estimates in setting-pair order `(a,b), (a,b'), (a',b), (a',b')`.
    pub correlations: [CorrelationEstimate; 4],
}

fn delayed_chsh_streams(
    config: &ExperimentConfig,
    settings: &Settings,
    first_major: u32,
) -> Result<Vec<ChshEstimate>> {
    let mut per_pair: Vec<BTreeMap<usize, Vec<(i8, i8)>>> = Vec::with_capacity(4);
    for (i, (a, b)) in settings.pairs().into_iter().enumerate() {
        let cfg = config.with_directions(a, b);
        let mut groups: BTreeMap<usize, Vec<(i8, i8)>> = (0..4).map(|k| (k, Vec::new())).collect();
        for (x, y, v) in sample_outcomes(&cfg, first_major + i as u32)? {
            groups.entry(v).or_default().push((x, y));
        }
        per_pair.push(groups);
    }
    (0..4)
        .map(|k| {
            let mut correlations = [CorrelationEstimate {
                e_hat: 0.0,
                stderr: 0.0,
                n: 0,
            }; 4];
            for (slot, groups) in correlations.iter_mut().zip(&per_pair) {
                *slot = CorrelationEstimate::from_pairs(&groups[&k]).map_err(|_| {
                    Error::InsufficientData(format!("no shots with victor outcome {k}"))
                })?;
            }
            let s_hat = combine(correlations.map(|c| c.e_hat));
            let stderr = correlations
                .iter()
                .map(|c| c.stderr.powi(2))
                .sum::<f64>()
                .sqrt();
            Ok(ChshEstimate {
                outcome: k,
                s_hat,
                stderr,
                correlations,
            })
        })
        .collect()
}

/// Runs one sub-experiment per setting pair (same Victor configuration, `shots`
/// each) and estimates `S` separately for every Victor outcome.
pub fn delayed_chsh(config: &ExperimentConfig, settings: &Settings) -> Result<Vec<ChshEstimate>> {
    delayed_chsh_streams(config, settings, 1)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutcomeChsh {
    pub outcome: usize,
    pub name: String,
    pub settings: Settings,
    pub s_expected: f64,
    pub s_hat: f64,
    pub stderr: f64,
}

/// For each Victor outcome, estimates `S` with the settings that are optimal
/// for that outcome's conditional 0–3 state.
pub fn chsh_per_outcome(config: &ExperimentConfig) -> Result<Vec<OutcomeChsh>> {
    (0..4)
        .map(|k| {
            let state = swapkit::conditional_state(config.effective_alpha(), k)?;
            let best = chsh::chsh_max(&state, Method::Analytic)?;
            let est = delayed_chsh_streams(config, &best.settings, 1 + 4 * (k as u32 + 1))?;
            Ok(OutcomeChsh {
                outcome: k,
                name: OUTCOME_NAMES[k].to_string(),
                settings: best.settings,
                s_expected: best.s_value,
                s_hat: est[k].s_hat,
                stderr: est[k].stderr,
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionalSummary {
    pub outcome: usize,
    pub name: String,
    pub expected: f64,
    pub estimate: Option<CorrelationEstimate>,
}

/// JSON summary of a run: `{config, counts, conditional_estimates, chsh}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub config: ExperimentConfig,
    pub counts: [u64; 4],
    pub conditional_estimates: Vec<ConditionalSummary>,
    #[serde(default)]
    pub chsh: Vec<OutcomeChsh>,
}

/// Joint distributions computed with Victor's projection first and with
/// Alice's and Bob's first, keyed `[alice, bob, victor]`.
#[derive(Debug, Clone, PartialEq)]
pub struct OrderReport {
    pub victor_first: BTreeMap<Vec<usize>, f64>,
    pub parties_first: BTreeMap<Vec<usize>, f64>,
    pub max_abs_diff: f64,
}

fn project_or_zero(
    state: &PureState,
    basis: &ProjectiveBasis,
    k: usize,
) -> Result<Option<(f64, Option<PureState>)>> {
    match state.project(basis, k) {
        Ok(p) => Ok(Some((p.probability, p.remainder))),
        Err(Error::ImpossibleOutcome { .. }) => Ok(None),
        Err(e) => Err(e),
    }
}

pub fn order_independence_check(config: &ExperimentConfig) -> Result<OrderReport> {
    let (alice, bob, victor) = config.bases()?;
    let total = swapkit::make_total_state();

    let mut victor_first = BTreeMap::new();
    for v in 0..4 {
        let Some((pv, rem)) = project_or_zero(&total, &victor, v)? else {
            for (a, b) in [(0, 0), (0, 1), (1, 0), (1, 1)] {
                victor_first.insert(vec![a, b, v], 0.0);
            }
            continue;
        };
        let pair = rem.expect("qubits 0 and 3 remain");
        for (k, p) in born_distribution(&pair, &[&alice, &bob])? {
            victor_first.insert(vec![k[0], k[1], v], pv * p);
        }
    }

    let mut parties_first = BTreeMap::new();
    for a in 0..2 {
        for b in 0..2 {
            for v in 0..4 {
                parties_first.insert(vec![a, b, v], 0.0);
            }
            let Some((pa, rem_a)) = project_or_zero(&total, &alice, a)? else {
                continue;
            };
            let rem_a = rem_a.expect("qubits 1-3 remain");
            let Some((pb, rem_b)) = project_or_zero(&rem_a, &bob, b)? else {
                continue;
            };
            let rem_b = rem_b.expect("qubits 1-2 remain");
            for v in 0..4 {
                if let Some((pv, _)) = project_or_zero(&rem_b, &victor, v)? {
                    parties_first.insert(vec![a, b, v], pa * pb * pv);
                }
            }
        }
    }

    let max_abs_diff = victor_first
        .iter()
        .map(|(k, p)| (p - parties_first[k]).abs())
        .fold(0.0, f64::max);
    Ok(OrderReport {
        victor_first,
        parties_first,
        max_abs_diff,
    })
}

#[cfg(test)]
mod tests;
