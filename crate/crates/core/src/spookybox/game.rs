use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashMap, HashSet};

use serde::{Deserialize, Serialize};

use super::params::{derive_parameters, log_sum_exp, BoxGameConfig, Parameters};
use super::transcript::BoxEvent;
use super::{DEFICIT_TOLERANCE, MONOTONE_TOLERANCE};
use crate::error::{Error, Result};

/// Candidates kept per selection scan; haunted proposals are served from it.
const CANDIDATE_BATCH: usize = 64;
/// Rescale cached weights once a box's log-potential drifts this far from the shift.
const RESCALE_DRIFT: f64 = 300.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Owner {
    Free,
    Maker,
    Breaker,
    Haunted,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Phase {
    GhostGrow,
    MakerMove,
    BreakerMove,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum GhostDecision {
    Allow,
    /// Haunt the proposal and, in addition, these vertices.
    Haunt(Vec<u32>),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ProposalOutcome {
    Claimed(u32),
    Haunted(u32),
}

/// Fair-share violation: `m·c/(m+b) − x − ℓ` exceeded the tolerance.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub round: u64,
    pub box_id: u32,
    pub deficit: f64,
}

/// State after the Breaker phase closed a round.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RoundRecord {
    pub round: u64,
    pub log_potential: f64,
    pub max_deficit: f64,
}

/// A SpookyBox game position together with Maker's potential strategy.
#[derive(Clone, Debug)]
pub struct BoxGame {
    cfg: BoxGameConfig,
    params: Parameters,
    ln_keep: f64,
    ln_grow: f64,

    boxes: Vec<Vec<u32>>,
    incidence: Vec<Vec<u32>>,
    owner: Vec<Owner>,
    free_count: usize,
    x_count: Vec<u32>,
    y_count: Vec<u32>,
    log_pot: Vec<f64>,

    // exp(log_pot - shift) per box, and per-vertex sums of it over incidence.
    weight: Vec<f64>,
    shift: f64,
    effect: Vec<f64>,
    dirty_boxes: Vec<u32>,
    box_dirty: Vec<bool>,
    dirty_vertices: Vec<u32>,
    stamp: Vec<u32>,
    stamp_now: u32,
    candidates: Vec<u32>,
    candidate_pos: usize,
    candidates_complete: bool,
    candidates_valid: bool,

    round: u64,
    phase: Phase,
    claims_this_round: u32,
    pending: Option<u32>,
    started: bool,

    events: Option<Vec<BoxEvent>>,
    initial: Vec<Vec<u32>>,
    baseline_log_potential: f64,
    rounds: Vec<RoundRecord>,
    monotone_breaks: Vec<u64>,
    violations: Vec<Violation>,
    violation_count: u64,
    max_deficit: f64,
}

impl BoxGame {
    pub fn new(cfg: BoxGameConfig, initial: Vec<Vec<u32>>) -> Result<Self> {
        let params = derive_parameters(&cfg)?;
        if initial.len() != cfg.e as usize {
            return Err(Error::Config(format!(
                "e = {} but {} initial boxes were given",
                cfg.e,
                initial.len()
            )));
        }
        let nv = cfg.vertex_count as usize;
        let mut incidence = vec![Vec::new(); nv];
        for (s, members) in initial.iter().enumerate() {
            if members.len() > cfg.max_box as usize {
                return Err(Error::Config(format!(
                    "initial box {s} has {} vertices, more than M = {}",
                    members.len(),
                    cfg.max_box
                )));
            }
            for &v in members {
                let inc: &mut Vec<u32> = incidence
                    .get_mut(v as usize)
                    .ok_or_else(|| Error::Config(format!("box {s} contains vertex {v} >= |V|")))?;
                if inc.last() == Some(&(s as u32)) {
                    return Err(Error::Config(format!("box {s} contains vertex {v} twice")));
                }
                inc.push(s as u32);
            }
        }
        let e = cfg.e as usize;
        let effect = incidence.iter().map(|l| l.len() as f64).collect();
        Ok(BoxGame {
            ln_keep: (-params.lambda).ln_1p(),
            ln_grow: params.tau.ln_1p(),
            params,
            boxes: initial.clone(),
            incidence,
            owner: vec![Owner::Free; nv],
            free_count: nv,
            x_count: vec![0; e],
            y_count: vec![0; e],
            log_pot: vec![0.0; e],
            weight: vec![1.0; e],
            shift: 0.0,
            effect,
            dirty_boxes: Vec::new(),
            box_dirty: vec![false; e],
            dirty_vertices: Vec::new(),
            stamp: vec![0; nv],
            stamp_now: 0,
            candidates: Vec::new(),
            candidate_pos: 0,
            candidates_complete: false,
            candidates_valid: false,
            round: 1,
            phase: Phase::GhostGrow,
            claims_this_round: 0,
            pending: None,
            started: false,
            events: Some(Vec::new()),
            initial,
            baseline_log_potential: (e as f64).ln(),
            rounds: Vec::new(),
            monotone_breaks: Vec::new(),
            violations: Vec::new(),
            violation_count: 0,
            max_deficit: f64::NEG_INFINITY,
            cfg,
        })
    }

    /// `e` empty boxes over `vertex_count` vertices.
    pub fn with_empty_boxes(cfg: BoxGameConfig) -> Result<Self> {
        let e = cfg.e as usize;
        BoxGame::new(cfg, vec![Vec::new(); e])
    }

    /// Stops recording events; embedded games are reconstructed from the
    /// enclosing game's transcript instead.
    pub fn without_events(mut self) -> Self {
        self.events = None;
        self
    }

    pub fn config(&self) -> &BoxGameConfig {
        &self.cfg
    }

    pub fn params(&self) -> &Parameters {
        &self.params
    }

    pub fn round(&self) -> u64 {
        self.round
    }

    pub fn phase(&self) -> Phase {
        self.phase
    }

    pub fn boxes(&self) -> &[Vec<u32>] {
        &self.boxes
    }

    pub fn initial_boxes(&self) -> &[Vec<u32>] {
        &self.initial
    }

    pub fn incidence(&self, v: u32) -> &[u32] {
        &self.incidence[v as usize]
    }

    #[inline]
    pub fn owner(&self, v: u32) -> Owner {
        self.owner[v as usize]
    }

    #[inline]
    pub fn is_free(&self, v: u32) -> bool {
        self.owner[v as usize] == Owner::Free
    }

    pub fn free_count(&self) -> usize {
        self.free_count
    }

    pub fn free_vertices(&self) -> impl Iterator<Item = u32> + '_ {
        self.owner
            .iter()
            .enumerate()
            .filter(|(_, o)| **o == Owner::Free)
            .map(|(v, _)| v as u32)
    }

    pub fn x_count(&self, s: u32) -> u32 {
        self.x_count[s as usize]
    }

    pub fn y_count(&self, s: u32) -> u32 {
        self.y_count[s as usize]
    }

    pub fn box_log_potential(&self, s: u32) -> f64 {
        self.log_pot[s as usize]
    }

    pub fn is_finished(&self) -> bool {
        self.free_count == 0
    }

    pub fn pending_proposal(&self) -> Option<u32> {
        self.pending
    }

    pub fn events(&self) -> Option<&[BoxEvent]> {
        self.events.as_deref()
    }

    pub(crate) fn take_events(&mut self) -> Vec<BoxEvent> {
        self.events.take().unwrap_or_default()
    }

    /// `ln Φ(H, X, Y)` from the cached per-box values.
    pub fn total_log_potential(&self) -> f64 {
        log_sum_exp(&self.log_pot)
    }

    pub fn total_potential(&self) -> f64 {
        self.total_log_potential().exp()
    }

    /// Per-box log-potentials recounted from box contents and ownership.
    pub fn recompute_log_potentials(&self) -> Vec<f64> {
        self.boxes
            .iter()
            .map(|members| {
                let (mut x, mut y) = (0u64, 0u64);
                for &v in members {
                    match self.owner[v as usize] {
                        Owner::Maker => x += 1,
                        Owner::Breaker => y += 1,
                        _ => {}
                    }
                }
                super::box_log_potential(x, y, self.params.lambda, self.params.tau)
            })
            .collect()
    }

    /// `Φ(H,X,Y) − Φ(H,X∪{v},Y) = λ·Σ_{S∋v} Φ(S)`.
    pub fn maker_effect(&self, v: u32) -> Result<f64> {
        Ok(self.maker_effect_log(v)?.exp())
    }

    /// Natural log of [`maker_effect`](Self::maker_effect); `-∞` for a
    /// vertex in no box.
    pub fn maker_effect_log(&self, v: u32) -> Result<f64> {
        match self.owner.get(v as usize) {
            None => Err(Error::InvalidArgument(format!("vertex {v} out of range"))),
            Some(Owner::Free) => {
                let logs: Vec<f64> = self.incidence[v as usize]
                    .iter()
                    .map(|&s| self.log_pot[s as usize])
                    .collect();
                Ok(self.params.lambda.ln() + log_sum_exp(&logs))
            }
            Some(o) => Err(Error::InvalidArgument(format!(
                "vertex {v} is not free ({o:?})"
            ))),
        }
    }

    /// `m·c/(m+b) − x − ℓ` for every box, `c` the claimed vertices in it.
    pub fn fair_share_deficits(&self) -> Vec<f64> {
        let share = self.cfg.m as f64 / (self.cfg.m + self.cfg.b) as f64;
        self.x_count
            .iter()
            .zip(&self.y_count)
            .map(|(&x, &y)| share * (x + y) as f64 - x as f64 - self.cfg.ell)
            .collect()
    }

    /// Log-potential at the start and after each completed round.
    pub fn baseline_log_potential(&self) -> f64 {
        self.baseline_log_potential
    }

    pub fn round_records(&self) -> &[RoundRecord] {
        &self.rounds
    }

    /// Rounds in which the total potential grew beyond tolerance.
    pub fn monotone_breaks(&self) -> &[u64] {
        &self.monotone_breaks
    }

    /// First recorded violations (at most 64) and the total count.
    pub fn violations(&self) -> (&[Violation], u64) {
        (&self.violations, self.violation_count)
    }

    /// Largest deficit observed at any round end; `-∞` before the first.
    pub fn max_deficit(&self) -> f64 {
        self.max_deficit
    }

    fn expect_phase(&self, want: Phase, action: &str) -> Result<()> {
        if self.phase != want {
            return Err(Error::protocol(
                self.round,
                format!("{action} requires phase {want:?}, game is in {:?}", self.phase),
            ));
        }
        Ok(())
    }

    fn record(&mut self, ev: BoxEvent) {
        if let Some(evs) = self.events.as_mut() {
            evs.push(ev);
        }
    }

    // ---- potential bookkeeping -------------------------------------------------

    fn set_weight(&mut self, s: usize) {
        let rel = self.log_pot[s] - self.shift;
        if rel > RESCALE_DRIFT {
            self.rescale();
            return;
        }
        self.weight[s] = rel.exp();
        if !self.box_dirty[s] {
            self.box_dirty[s] = true;
            self.dirty_boxes.push(s as u32);
        }
    }

    fn rescale(&mut self) {
        let max = self.log_pot.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        self.shift = if max.is_finite() { max } else { 0.0 };
        for (w, l) in self.weight.iter_mut().zip(&self.log_pot) {
            *w = (l - self.shift).exp();
        }
        for v in 0..self.effect.len() {
            self.effect[v] = self.incidence[v]
                .iter()
                .map(|&s| self.weight[s as usize])
                .sum();
        }
        for &s in &self.dirty_boxes {
            self.box_dirty[s as usize] = false;
        }
        self.dirty_boxes.clear();
        self.dirty_vertices.clear();
        self.candidates_valid = false;
    }

    fn flush(&mut self) {
        if self.dirty_boxes.is_empty() && self.dirty_vertices.is_empty() {
            return;
        }
        self.stamp_now = self.stamp_now.wrapping_add(1);
        if self.stamp_now == 0 {
            self.stamp.iter_mut().for_each(|s| *s = 0);
            self.stamp_now = 1;
        }
        let now = self.stamp_now;
        let dirty_boxes = std::mem::take(&mut self.dirty_boxes);
        for &s in &dirty_boxes {
            self.box_dirty[s as usize] = false;
            for &v in &self.boxes[s as usize] {
                let vi = v as usize;
                if self.owner[vi] == Owner::Free && self.stamp[vi] != now {
                    self.stamp[vi] = now;
                    self.effect[vi] = self.incidence[vi]
                        .iter()
                        .map(|&t| self.weight[t as usize])
                        .sum();
                }
            }
        }
        self.dirty_boxes = dirty_boxes;
        self.dirty_boxes.clear();
        for i in 0..self.dirty_vertices.len() {
            let vi = self.dirty_vertices[i] as usize;
            if self.owner[vi] == Owner::Free && self.stamp[vi] != now {
                self.stamp[vi] = now;
                self.effect[vi] = self.incidence[vi]
                    .iter()
                    .map(|&t| self.weight[t as usize])
                    .sum();
            }
        }
        self.dirty_vertices.clear();
        self.candidates_valid = false;
    }

    fn rebuild_candidates(&mut self) {
        // Key: effect bits (monotone for non-negative floats), then lower index first.
        let mut heap: BinaryHeap<Reverse<u128>> = BinaryHeap::with_capacity(CANDIDATE_BATCH + 1);
        let mut seen = 0usize;
        for (v, &o) in self.owner.iter().enumerate() {
            if o != Owner::Free {
                continue;
            }
            seen += 1;
            let key = ((self.effect[v].to_bits() as u128) << 32) | (u32::MAX - v as u32) as u128;
            if heap.len() < CANDIDATE_BATCH {
                heap.push(Reverse(key));
            } else if key > heap.peek().expect("non-empty").0 {
                heap.pop();
                heap.push(Reverse(key));
            }
        }
        let mut keys: Vec<u128> = heap.into_iter().map(|r| r.0).collect();
        keys.sort_unstable_by(|a, b| b.cmp(a));
        self.candidates.clear();
        self.candidates
            .extend(keys.into_iter().map(|k| u32::MAX - (k & 0xffff_ffff) as u32));
        self.candidate_pos = 0;
        self.candidates_complete = seen <= CANDIDATE_BATCH;
        self.candidates_valid = true;
    }

    /// The free vertex of maximum effect, smallest index on ties.
    pub fn select_maker_vertex(&mut self) -> Option<u32> {
        if self.free_count == 0 {
            return None;
        }
        self.flush();
        loop {
            if self.candidates_valid {
                while self.candidate_pos < self.candidates.len() {
                    let v = self.candidates[self.candidate_pos];
                    if self.owner[v as usize] == Owner::Free {
                        return Some(v);
                    }
                    self.candidate_pos += 1;
                }
                if self.candidates_complete {
                    return None;
                }
            }
            self.rebuild_candidates();
        }
    }

    // ---- protocol --------------------------------------------------------------

    /// Breaker claims made before Maker's first move (the real game lets
    /// Breaker open, and the neighbourhood game first moves on turn two).
    pub fn opening_breaker_claim(&mut self, vertices: &[u32]) -> Result<()> {
        if self.started || self.round != 1 || self.phase != Phase::GhostGrow {
            return Err(Error::protocol(
                self.round,
                "opening Breaker claims are only allowed before the first round",
            ));
        }
        self.validate_breaker_set(vertices)?;
        for &v in vertices {
            self.claim_breaker(v);
        }
        self.started = true;
        self.record(BoxEvent::Breaker {
            v: vertices.to_vec(),
        });
        self.baseline_log_potential = self.total_log_potential();
        Ok(())
    }

    /// Ghost phase: adds free vertices to boxes. All additions are checked
    /// before any is applied.
    pub fn ghost_grow(&mut self, additions: &[(u32, Vec<u32>)]) -> Result<()> {
        self.expect_phase(Phase::GhostGrow, "ghost grow")?;
        let mut extra: HashMap<u32, usize> = HashMap::new();
        let mut seen: HashSet<(u32, u32)> = HashSet::new();
        for (s, add) in additions {
            let si = *s as usize;
            if si >= self.boxes.len() {
                return Err(Error::protocol(self.round, format!("ghost grew unknown box {s}")));
            }
            for &v in add {
                match self.owner.get(v as usize) {
                    None => {
                        return Err(Error::protocol(
                            self.round,
                            format!("ghost added out-of-range vertex {v} to box {s}"),
                        ))
                    }
                    Some(Owner::Free) => {}
                    Some(o) => {
                        return Err(Error::protocol(
                            self.round,
                            format!("ghost added {o:?} vertex {v} to box {s}"),
                        ))
                    }
                }
                if !seen.insert((*s, v)) {
                    return Err(Error::protocol(
                        self.round,
                        format!("ghost added vertex {v} to box {s} twice"),
                    ));
                }
                if self.incidence[v as usize].contains(s) {
                    return Err(Error::protocol(
                        self.round,
                        format!("vertex {v} is already in box {s}"),
                    ));
                }
            }
            let total = extra.entry(*s).or_insert(self.boxes[si].len());
            *total += add.len();
            if *total > self.cfg.max_box as usize {
                return Err(Error::protocol(
                    self.round,
                    format!(
                        "box {s} would hold {} vertices, more than M = {}",
                        total, self.cfg.max_box
                    ),
                ));
            }
        }
        for (s, add) in additions {
            let si = *s as usize;
            if add.is_empty() {
                continue;
            }
            for &v in add {
                self.boxes[si].push(v);
                self.incidence[v as usize].push(*s);
                self.effect[v as usize] += self.weight[si];
                self.dirty_vertices.push(v);
            }
            self.record(BoxEvent::Grow {
                box_id: *s,
                add: add.clone(),
                size: self.boxes[si].len() as u32,
            });
        }
        if !self.dirty_vertices.is_empty() {
            self.candidates_valid = false;
        }
        self.started = true;
        self.phase = Phase::MakerMove;
        Ok(())
    }

    /// Maker proposes her best vertex. `None` ends her phase (no free vertex).
    pub fn propose(&mut self) -> Result<Option<u32>> {
        self.expect_phase(Phase::MakerMove, "maker proposal")?;
        if let Some(p) = self.pending {
            return Err(Error::protocol(
                self.round,
                format!("proposal {p} is still unresolved"),
            ));
        }
        match self.select_maker_vertex() {
            Some(v) => {
                self.pending = Some(v);
                self.record(BoxEvent::Propose { v });
                Ok(Some(v))
            }
            None => {
                self.phase = Phase::BreakerMove;
                Ok(None)
            }
        }
    }

    /// Ghost's answer to the pending proposal.
    pub fn resolve_maker_proposal(&mut self, decision: GhostDecision) -> Result<ProposalOutcome> {
        self.expect_phase(Phase::MakerMove, "ghost decision")?;
        let v = self
            .pending
            .ok_or_else(|| Error::protocol(self.round, "no pending Maker proposal"))?;
        match decision {
            GhostDecision::Allow => {
                self.pending = None;
                self.claim_maker(v);
                self.record(BoxEvent::Claim { v });
                self.claims_this_round += 1;
                if self.claims_this_round >= self.cfg.m {
                    self.phase = Phase::BreakerMove;
                }
                Ok(ProposalOutcome::Claimed(v))
            }
            GhostDecision::Haunt(extra) => {
                for &u in &extra {
                    match self.owner.get(u as usize) {
                        None => {
                            return Err(Error::protocol(
                                self.round,
                                format!("ghost haunted out-of-range vertex {u}"),
                            ))
                        }
                        Some(Owner::Maker) | Some(Owner::Breaker) => {
                            return Err(Error::protocol(
                                self.round,
                                format!("ghost haunted claimed vertex {u}"),
                            ))
                        }
                        _ => {}
                    }
                }
                self.pending = None;
                let mut all = Vec::with_capacity(extra.len() + 1);
                all.push(v);
                for u in std::iter::once(v).chain(extra) {
                    if self.owner[u as usize] == Owner::Free {
                        self.owner[u as usize] = Owner::Haunted;
                        self.free_count -= 1;
                        if u != v {
                            all.push(u);
                        }
                    }
                }
                self.record(BoxEvent::Haunt { v: all });
                Ok(ProposalOutcome::Haunted(v))
            }
        }
    }

    /// Maker passes the rest of her phase; only valid when nothing is free.
    pub fn end_maker_phase(&mut self) -> Result<()> {
        self.expect_phase(Phase::MakerMove, "end of Maker phase")?;
        if self.pending.is_some() || self.free_count > 0 {
            return Err(Error::protocol(
                self.round,
                "Maker must keep proposing while free vertices remain",
            ));
        }
        self.phase = Phase::BreakerMove;
        Ok(())
    }

    fn validate_breaker_set(&self, vertices: &[u32]) -> Result<()> {
        if vertices.len() > self.cfg.b as usize {
            return Err(Error::protocol(
                self.round,
                format!("Breaker claimed {} vertices with bias {}", vertices.len(), self.cfg.b),
            ));
        }
        let mut sorted = vertices.to_vec();
        sorted.sort_unstable();
        if let Some(w) = sorted.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::protocol(self.round, format!("Breaker claimed {} twice", w[0])));
        }
        for &v in vertices {
            match self.owner.get(v as usize) {
                None => {
                    return Err(Error::protocol(
                        self.round,
                        format!("Breaker claimed out-of-range vertex {v}"),
                    ))
                }
                Some(Owner::Free) => {}
                Some(o) => {
                    return Err(Error::protocol(
                        self.round,
                        format!("Breaker claimed {o:?} vertex {v}"),
                    ))
                }
            }
        }
        Ok(())
    }

    /// Breaker phase; closes the round.
    pub fn breaker_claim(&mut self, vertices: &[u32]) -> Result<()> {
        self.expect_phase(Phase::BreakerMove, "Breaker claim")?;
        self.validate_breaker_set(vertices)?;
        for &v in vertices {
            self.claim_breaker(v);
        }
        self.record(BoxEvent::Breaker {
            v: vertices.to_vec(),
        });
        self.close_round();
        Ok(())
    }

    fn claim_maker(&mut self, v: u32) {
        self.owner[v as usize] = Owner::Maker;
        self.free_count -= 1;
        for i in 0..self.incidence[v as usize].len() {
            let s = self.incidence[v as usize][i] as usize;
            self.x_count[s] += 1;
            self.log_pot[s] += self.ln_keep;
            self.set_weight(s);
        }
    }

    fn claim_breaker(&mut self, v: u32) {
        self.owner[v as usize] = Owner::Breaker;
        self.free_count -= 1;
        for i in 0..self.incidence[v as usize].len() {
            let s = self.incidence[v as usize][i] as usize;
            self.y_count[s] += 1;
            self.log_pot[s] += self.ln_grow;
            self.set_weight(s);
        }
    }

    fn close_round(&mut self) {
        let log_potential = self.total_log_potential();
        let prev = self
            .rounds
            .last()
            .map_or(self.baseline_log_potential, |r| r.log_potential);
        if log_potential > prev + MONOTONE_TOLERANCE.ln_1p() {
            self.monotone_breaks.push(self.round);
        }
        let deficits = self.fair_share_deficits();
        let mut max_deficit = f64::NEG_INFINITY;
        for (s, &d) in deficits.iter().enumerate() {
            max_deficit = max_deficit.max(d);
            if d > DEFICIT_TOLERANCE {
                self.violation_count += 1;
                if self.violations.len() < 64 {
                    self.violations.push(Violation {
                        round: self.round,
                        box_id: s as u32,
                        deficit: d,
                    });
                }
            }
        }
        self.max_deficit = self.max_deficit.max(max_deficit);
        self.rounds.push(RoundRecord {
            round: self.round,
            log_potential,
            max_deficit,
        });
        let max_log = self.log_pot.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if max_log.is_finite() && (max_log - self.shift).abs() > RESCALE_DRIFT {
            self.rescale();
        }
        self.round += 1;
        self.claims_this_round = 0;
        self.phase = Phase::GhostGrow;
    }

    /// Full recount of every cached quantity.
    pub fn check_invariants(&self) -> Result<()> {
        let free = self.owner.iter().filter(|o| **o == Owner::Free).count();
        if free != self.free_count {
            return Err(Error::Invariant(format!(
                "free count {} but {free} free vertices",
                self.free_count
            )));
        }
        for (s, members) in self.boxes.iter().enumerate() {
            if members.len() > self.cfg.max_box as usize {
                return Err(Error::Invariant(format!("box {s} exceeds M")));
            }
            let x = members.iter().filter(|&&v| self.owner[v as usize] == Owner::Maker).count();
            let y = members.iter().filter(|&&v| self.owner[v as usize] == Owner::Breaker).count();
            if x != self.x_count[s] as usize || y != self.y_count[s] as usize {
                return Err(Error::Invariant(format!("box {s} counters out of sync")));
            }
            for &v in members {
                if !self.incidence[v as usize].contains(&(s as u32)) {
                    return Err(Error::Invariant(format!("incidence of {v} misses box {s}")));
                }
            }
        }
        let total_inc: usize = self.incidence.iter().map(Vec::len).sum();
        let total_mem: usize = self.boxes.iter().map(Vec::len).sum();
        if total_inc != total_mem {
            return Err(Error::Invariant("incidence and box sizes disagree".into()));
        }
        let fresh = self.recompute_log_potentials();
        for (s, (a, b)) in fresh.iter().zip(&self.log_pot).enumerate() {
            if (a - b).abs() > 1e-9 * a.abs().max(1.0) {
                return Err(Error::Invariant(format!(
                    "box {s} log-potential {b} differs from recount {a}"
                )));
            }
        }
        Ok(())
    }
}
