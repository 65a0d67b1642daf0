//! Transcript verification from the event list alone.
//!
//! Box games are replayed with plain per-box counters; nothing from the
//! engine's incremental caches is used.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::engine::{GameEvent, GameId, RealGameParams, RealTranscript, MAX_N};
use crate::error::{Error, Result};
use crate::graph::{edge_count, raw_edge_index, raw_endpoints, EdgeId, EdgeStatus};
use crate::oracle::in_gamma;
use crate::spookybox::{
    derive_parameters, log_sum_exp, BoxEvent, BoxGameConfig, BoxGameTranscript, DEFICIT_TOLERANCE,
    MONOTONE_TOLERANCE,
};

/// Work bound (incidences × proposals) for re-deriving Maker's choices.
const CHOICE_BUDGET: u64 = 400_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CheckStatus {
    Pass,
    Fail,
    Skipped,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Failure {
    /// Index into the event list, if the failure is tied to one event.
    pub event: Option<usize>,
    pub round: Option<u64>,
    pub message: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: String,
    pub status: CheckStatus,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub failure: Option<Failure>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InvariantReport {
    pub kind: String,
    pub verifier: String,
    pub transcript_hash: String,
    pub checks: Vec<CheckResult>,
    pub pass: bool,
}

impl InvariantReport {
    pub fn check(&self, name: &str) -> Option<&CheckResult> {
        self.checks.iter().find(|c| c.name == name)
    }

    /// The first failing check, in check order.
    pub fn first_failure(&self) -> Option<&CheckResult> {
        self.checks.iter().find(|c| c.status == CheckStatus::Fail)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialises")
    }
}

struct Checks {
    list: Vec<CheckResult>,
}

impl Checks {
    fn new(names: &[&str]) -> Self {
        Checks {
            list: names
                .iter()
                .map(|n| CheckResult {
                    name: n.to_string(),
                    status: CheckStatus::Pass,
                    failure: None,
                    note: None,
                })
                .collect(),
        }
    }

    fn get(&mut self, name: &str) -> &mut CheckResult {
        self.list
            .iter_mut()
            .find(|c| c.name == name)
            .expect("registered check")
    }

    fn fail(&mut self, name: &str, event: Option<usize>, round: Option<u64>, message: impl Into<String>) {
        let c = self.get(name);
        if c.status != CheckStatus::Fail {
            c.status = CheckStatus::Fail;
            c.failure = Some(Failure {
                event,
                round,
                message: message.into(),
            });
        }
    }

    fn skip(&mut self, name: &str, note: impl Into<String>) {
        let c = self.get(name);
        if c.status == CheckStatus::Pass {
            c.status = CheckStatus::Skipped;
        }
        c.note = Some(note.into());
    }

    fn note(&mut self, name: &str, note: impl Into<String>) {
        self.get(name).note = Some(note.into());
    }

    fn finish(self, kind: &str, hash: &str) -> InvariantReport {
        let pass = self.list.iter().all(|c| c.status != CheckStatus::Fail);
        InvariantReport {
            kind: kind.into(),
            verifier: crate::CODE_VERSION.into(),
            transcript_hash: hash.into(),
            checks: self.list,
            pass,
        }
    }
}

const FREE: u8 = 0;
const X: u8 = 1;
const Y: u8 = 2;
const Z: u8 = 3;

/// A box game rebuilt from counts.
struct BoxReplay {
    m: u32,
    b: u32,
    cap: usize,
    ell: f64,
    ln_keep: f64,
    ln_grow: f64,
    lambda: f64,
    guaranteed: bool,
    members: Vec<Vec<u32>>,
    incidence: Vec<Vec<u32>>,
    owner: Vec<u8>,
    x: Vec<u32>,
    y: Vec<u32>,
    last_total: f64,
    rounds: u64,
    max_deficit: f64,
    violations: u64,
}

impl BoxReplay {
    fn new(cfg: &BoxGameConfig, initial: Vec<Vec<u32>>) -> Result<Self> {
        let par = derive_parameters(&BoxGameConfig {
            strict_preconditions: false,
            ..cfg.clone()
        })?;
        let mut incidence = vec![Vec::new(); cfg.vertex_count as usize];
        for (s, list) in initial.iter().enumerate() {
            for &v in list {
                let inc: &mut Vec<u32> = incidence
                    .get_mut(v as usize)
                    .ok_or_else(|| Error::Config(format!("box {s} holds unknown vertex {v}")))?;
                if inc.contains(&(s as u32)) {
                    return Err(Error::Config(format!("box {s} holds vertex {v} twice")));
                }
                inc.push(s as u32);
            }
        }
        let e = initial.len();
        Ok(BoxReplay {
            m: cfg.m,
            b: cfg.b,
            cap: cfg.max_box as usize,
            ell: cfg.ell,
            ln_keep: (-par.lambda).ln_1p(),
            ln_grow: par.tau.ln_1p(),
            lambda: par.lambda,
            guaranteed: par.preconditions_ok,
            members: initial,
            incidence,
            owner: vec![FREE; cfg.vertex_count as usize],
            x: vec![0; e],
            y: vec![0; e],
            last_total: (e as f64).ln(),
            rounds: 0,
            max_deficit: f64::NEG_INFINITY,
            violations: 0,
        })
    }

    fn log_pot(&self, s: usize) -> f64 {
        let mut acc = 0.0;
        if self.x[s] > 0 {
            acc += self.x[s] as f64 * self.ln_keep;
        }
        if self.y[s] > 0 {
            acc += self.y[s] as f64 * self.ln_grow;
        }
        acc
    }

    fn total(&self) -> f64 {
        let logs: Vec<f64> = (0..self.members.len()).map(|s| self.log_pot(s)).collect();
        log_sum_exp(&logs)
    }

    fn is_free(&self, v: u32) -> bool {
        self.owner.get(v as usize) == Some(&FREE)
    }

    fn take(&mut self, v: u32, who: u8) {
        self.owner[v as usize] = who;
        for &s in &self.incidence[v as usize] {
            match who {
                X => self.x[s as usize] += 1,
                Y => self.y[s as usize] += 1,
                _ => {}
            }
        }
    }

    fn free_count(&self) -> usize {
        self.owner.iter().filter(|&&o| o == FREE).count()
    }

    /// Largest deficit and its box.
    fn worst_deficit(&self) -> (f64, usize) {
        let share = self.m as f64 / (self.m + self.b) as f64;
        (0..self.members.len())
            .map(|s| (share * (self.x[s] + self.y[s]) as f64 - self.x[s] as f64 - self.ell, s))
            .fold((f64::NEG_INFINITY, 0), |a, c| if c.0 > a.0 { c } else { a })
    }

    /// Ends a round; returns `(monotone, worst deficit, box)`.
    fn close_round(&mut self) -> (bool, f64, usize) {
        let total = self.total();
        let monotone = total <= self.last_total + MONOTONE_TOLERANCE.ln_1p();
        self.last_total = total;
        self.rounds += 1;
        let (d, s) = self.worst_deficit();
        self.max_deficit = self.max_deficit.max(d);
        let share = self.m as f64 / (self.m + self.b) as f64;
        self.violations += (0..self.members.len())
            .filter(|&s| {
                share * (self.x[s] + self.y[s]) as f64 - self.x[s] as f64 - self.ell
                    > DEFICIT_TOLERANCE
            })
            .count() as u64;
        (monotone, d, s)
    }

    fn effect_log(&self, v: u32) -> f64 {
        let logs: Vec<f64> = self.incidence[v as usize]
            .iter()
            .map(|&s| self.log_pot(s as usize))
            .collect();
        self.lambda.ln() + log_sum_exp(&logs)
    }
}

fn parse_error(text: &str, e: &serde_json::Error) -> Error {
    Error::from_json(text, e)
}

/// Detects the transcript kind and verifies it. Malformed input is a parse
/// error carrying a byte offset.
pub fn verify_transcript_json(text: &str) -> Result<InvariantReport> {
    let value: serde_json::Value = serde_json::from_str(text).map_err(|e| parse_error(text, &e))?;
    let kind = value.get("kind").and_then(|k| k.as_str()).unwrap_or("");
    match kind {
        "real" => verify_real_transcript(&RealTranscript::from_json(text)?),
        "box" => verify_box_transcript(&BoxGameTranscript::from_json(text)?),
        other => Err(Error::Parse {
            offset: 0,
            message: format!("unknown transcript kind {other:?}"),
        }),
    }
}

const REAL_CHECKS: &[&str] = &[
    "hash",
    "header",
    "turn_structure",
    "turn_parity",
    "claim_legality",
    "gamma_membership",
    "breaker_never_revealed_out",
    "bias_bound",
    "bias_2b_feed",
    "box_growth",
    "box_partition",
    "potential_monotone",
    "fair_share",
    "ledger_trichotomy",
];

struct RealState<'a> {
    t: &'a RealTranscript,
    n: u32,
    ledger: Vec<EdgeStatus>,
    maker_adj: Vec<Vec<u32>>,
    games: Option<[BoxReplay; 2]>,
    pending: [Vec<u32>; 2],
    stepped: [bool; 2],
    grow_queue: Vec<(u32, u32)>,
    basis: Vec<Vec<u32>>,
    checks: Checks,
}

impl RealState<'_> {
    fn status(&self, e: u32) -> Option<EdgeStatus> {
        self.ledger.get(e as usize).copied()
    }

    /// Feeds accumulated Breaker claims to game `g` before its Maker step.
    fn flush(&mut self, g: GameId, event: Option<usize>, turn: u64) {
        let i = g.index();
        let feed = std::mem::take(&mut self.pending[i]);
        let stepped = self.stepped[i];
        let limit = 2 * self.t.params.b as usize;
        let Some(games) = self.games.as_mut() else { return };
        if feed.len() > limit {
            self.checks.fail(
                "bias_2b_feed",
                event,
                Some(turn),
                format!("{g:?} game fed {} Breaker claims, more than 2b = {limit}", feed.len()),
            );
        }
        let game = &mut games[i];
        for &e in &feed {
            if game.is_free(e) {
                game.take(e, Y);
            } else {
                self.checks.fail(
                    "box_partition",
                    event,
                    Some(turn),
                    format!("Breaker edge {e} is not free in the {g:?} game"),
                );
            }
        }
        if !stepped {
            game.last_total = game.total();
            return;
        }
        let (monotone, d, s) = game.close_round();
        if !monotone {
            self.checks.fail(
                "potential_monotone",
                event,
                Some(turn),
                format!("{g:?} game potential increased in round {}", game.rounds),
            );
        }
        if game.guaranteed && d > DEFICIT_TOLERANCE {
            self.checks.fail(
                "fair_share",
                event,
                Some(turn),
                format!("{g:?} game box {s} deficit {d:.6} in round {}", game.rounds),
            );
        }
    }

    /// Additions the neighbourhood ghost must make now.
    fn expected_growth(&mut self) -> BTreeMap<u32, (Vec<u32>, u32)> {
        let n = self.n;
        let queue = std::mem::take(&mut self.grow_queue);
        let mut adds: BTreeMap<u32, Vec<u32>> = BTreeMap::new();
        for (a, b) in queue {
            for (v, y) in [(a, b), (b, a)] {
                for &w in &self.basis[v as usize] {
                    let e = raw_edge_index(y, w, n);
                    if self.ledger[e as usize] == EdgeStatus::Unclaimed {
                        adds.entry(v).or_default().push(e);
                    }
                }
                self.basis[v as usize].push(y);
            }
        }
        let games = self.games.as_ref().expect("potential Maker");
        adds.into_iter()
            .map(|(v, mut list)| {
                list.sort_unstable();
                let room = games[1].cap.saturating_sub(games[1].members[v as usize].len());
                let dropped = list.len().saturating_sub(room);
                list.truncate(room);
                (v, (list, dropped as u32))
            })
            .collect()
    }
}

/// Replays a real-game transcript and checks every invariant.
pub fn verify_real_transcript(t: &RealTranscript) -> Result<InvariantReport> {
    let mut checks = Checks::new(REAL_CHECKS);
    if t.params.n > MAX_N {
        return Err(Error::Size {
            what: "n",
            got: t.params.n as usize,
            limit: MAX_N as usize,
        });
    }
    if t.recompute_hash() != t.hash {
        checks.fail("hash", None, None, format!("header hash {} does not match events", t.hash));
    }
    if t.kind != "real" {
        checks.fail("header", None, None, format!("kind {:?}", t.kind));
    }
    if let Err(e) = t.params.validate() {
        checks.fail("header", None, None, e.to_string());
        return Ok(checks.finish("real", &t.hash));
    }
    let potential = t.params.maker == crate::engine::MakerKind::Potential;
    let n = t.params.n;
    let total_edges = edge_count(n as usize);
    let games = if potential {
        match header_games(&t.params, t) {
            Ok(g) => Some(g),
            Err(msg) => {
                checks.fail("header", None, None, msg);
                return Ok(checks.finish("real", &t.hash));
            }
        }
    } else {
        if t.degree_game.is_some() || t.nbhd_game.is_some() {
            checks.fail("header", None, None, "box game headers on a non-potential Maker");
        }
        for c in ["bias_2b_feed", "box_growth", "box_partition", "potential_monotone", "fair_share"] {
            checks.skip(c, "no auxiliary games for this Maker");
        }
        None
    };
    if let Some(g) = &games {
        let unguaranteed: Vec<&str> = [("degree", &g[0]), ("neighbourhood", &g[1])]
            .iter()
            .filter(|(_, r)| !r.guaranteed)
            .map(|(name, _)| *name)
            .collect();
        if unguaranteed.len() == 2 {
            checks.skip("fair_share", "neither game meets the slack and box-size conditions");
        } else if !unguaranteed.is_empty() {
            checks.note("fair_share", format!("{} game not guaranteed; not checked", unguaranteed[0]));
        }
    }
    let mut st = RealState {
        t,
        n,
        ledger: vec![EdgeStatus::Unclaimed; total_edges],
        maker_adj: vec![Vec::new(); n as usize],
        games,
        pending: [Vec::new(), Vec::new()],
        stepped: [false, false],
        grow_queue: Vec::new(),
        basis: vec![Vec::new(); n as usize],
        checks,
    };
    let (seed, p, b) = (t.params.seed, t.params.p, t.params.b as usize);

    let mut expect_breaker = t.params.breaker_first;
    let mut in_turn = false;
    let mut turn_claimed = false;
    let mut turn: u64 = 0;
    let mut seg_game = GameId::Deg;
    let mut growth: Option<BTreeMap<u32, (Vec<u32>, u32)>> = None;

    fn close_growth(st: &mut RealState, growth: &mut Option<BTreeMap<u32, (Vec<u32>, u32)>>, i: usize, turn: u64) {
        if let Some(rest) = growth.take() {
            if let Some((v, _)) = rest.iter().find(|(_, (l, d))| !l.is_empty() || *d > 0) {
                st.checks.fail("box_growth", Some(i), Some(turn), format!("box {v}: required growth missing"));
            }
        }
    }

    fn end_turn(st: &mut RealState, claimed: bool, i: usize, turn: u64) {
        let unclaimed = st.ledger.iter().filter(|s| **s == EdgeStatus::Unclaimed).count();
        if !claimed && unclaimed > 0 {
            st.checks.fail(
                "turn_structure",
                Some(i),
                Some(turn),
                format!("Maker turn {turn} ended without a claim with {unclaimed} edges left"),
            );
        }
    }

    for (i, ev) in t.events.iter().enumerate() {
        if let GameEvent::Breaker { e } = ev {
            if !expect_breaker {
                if in_turn {
                    close_growth(&mut st, &mut growth, i, turn);
                    end_turn(&mut st, turn_claimed, i, turn);
                } else {
                    st.checks.fail("turn_structure", Some(i), Some(turn), "Breaker moved without a Maker turn in between");
                }
            }
            in_turn = false;
            expect_breaker = false;
            if e.len() > b {
                st.checks.fail("bias_bound", Some(i), Some(turn), format!("Breaker claimed {} edges with bias {b}", e.len()));
            }
            for (k, &x) in e.iter().enumerate() {
                if e[..k].contains(&x) {
                    st.checks.fail("claim_legality", Some(i), Some(turn), format!("Breaker claimed edge {x} twice"));
                    continue;
                }
                match st.status(x) {
                    None => st.checks.fail("claim_legality", Some(i), Some(turn), format!("edge {x} does not exist")),
                    Some(EdgeStatus::RevealedOut) => st.checks.fail(
                        "breaker_never_revealed_out",
                        Some(i),
                        Some(turn),
                        format!("Breaker claimed revealed non-edge {x}"),
                    ),
                    Some(EdgeStatus::Unclaimed) => {
                        st.ledger[x as usize] = EdgeStatus::Breaker;
                        if st.games.is_some() {
                            st.pending[0].push(x);
                            st.pending[1].push(x);
                        }
                    }
                    Some(s) => st.checks.fail("claim_legality", Some(i), Some(turn), format!("Breaker claimed {s:?} edge {x}")),
                }
            }
            continue;
        }

        if expect_breaker {
            st.checks.fail("turn_structure", Some(i), Some(turn), "Maker acted twice without a Breaker turn");
            expect_breaker = false;
        }
        if !in_turn {
            in_turn = true;
            turn_claimed = false;
            turn += 1;
            seg_game = GameId::for_turn(turn);
            if st.games.is_some() {
                st.flush(seg_game, Some(i), turn);
                st.stepped[seg_game.index()] = true;
                if seg_game == GameId::Nbh {
                    growth = Some(st.expected_growth());
                }
            }
        }
        let event_game = match ev {
            GameEvent::Grow { g, .. } => Some(*g),
            GameEvent::Haunt { g, .. } | GameEvent::Claim { g, .. } => *g,
            GameEvent::Breaker { .. } => unreachable!(),
        };
        if potential && event_game != Some(seg_game) {
            st.checks.fail(
                "turn_parity",
                Some(i),
                Some(turn),
                format!("event in {event_game:?} game during Maker turn {turn} ({seg_game:?} game)"),
            );
        }
        if !potential && event_game.is_some() {
            st.checks.fail("turn_parity", Some(i), Some(turn), "box game tag on a non-potential Maker event");
        }
        let gi = seg_game.index();

        match ev {
            GameEvent::Grow { box_id, add, size, drop, .. } => {
                let Some(expected) = growth.as_mut() else {
                    st.checks.fail("box_growth", Some(i), Some(turn), format!("box {box_id}: growth outside the neighbourhood ghost phase"));
                    continue;
                };
                let want = expected.remove(box_id).unwrap_or_default();
                let games = st.games.as_mut().expect("growth implies box games");
                let game = &mut games[1];
                let Some(current) = game.members.get(*box_id as usize).map(Vec::len) else {
                    st.checks.fail("box_growth", Some(i), Some(turn), format!("box {box_id} does not exist"));
                    continue;
                };
                if (*size as usize) < current {
                    st.checks.fail("box_growth", Some(i), Some(turn), format!("box {box_id} shrank from {current} to {size}"));
                } else if *size as usize != current + add.len() {
                    st.checks.fail("box_growth", Some(i), Some(turn), format!("box {box_id} size {size} does not match {current} + {}", add.len()));
                }
                if current + add.len() > game.cap {
                    st.checks.fail("box_growth", Some(i), Some(turn), format!("box {box_id} exceeds M = {}", game.cap));
                }
                if (add, *drop) != (&want.0, want.1) {
                    st.checks.fail("box_growth", Some(i), Some(turn), format!("box {box_id}: growth differs from the ghost rule"));
                }
                for &e in add {
                    let ok_edge = (e as usize) < total_edges && st.ledger[e as usize] == EdgeStatus::Unclaimed;
                    if !ok_edge {
                        st.checks.fail("box_growth", Some(i), Some(turn), format!("box {box_id}: added edge {e} is not unclaimed"));
                        continue;
                    }
                    let (x, y) = raw_endpoints(e, n);
                    let v = *box_id;
                    let joined = |a: u32| st.maker_adj[v as usize].contains(&a);
                    if !(joined(x) && joined(y)) {
                        st.checks.fail("box_growth", Some(i), Some(turn), format!("box {box_id}: edge {e} is not inside Maker's neighbourhood"));
                    }
                    let games = st.games.as_mut().expect("box games");
                    let game = &mut games[1];
                    if game.incidence[e as usize].contains(box_id) {
                        st.checks.fail("box_growth", Some(i), Some(turn), format!("box {box_id}: edge {e} added twice"));
                        continue;
                    }
                    if !game.is_free(e) {
                        st.checks.fail("box_partition", Some(i), Some(turn), format!("box {box_id}: added edge {e} is not free"));
                    }
                    game.members[*box_id as usize].push(e);
                    game.incidence[e as usize].push(*box_id);
                }
            }
            GameEvent::Haunt { e, out, .. } => {
                close_growth(&mut st, &mut growth, i, turn);
                let Some(s) = st.status(*e) else {
                    st.checks.fail("claim_legality", Some(i), Some(turn), format!("edge {e} does not exist"));
                    continue;
                };
                if *out {
                    if in_gamma(seed, p, EdgeId(*e)) {
                        st.checks.fail("gamma_membership", Some(i), Some(turn), format!("edge {e} reported outside Γ but is in Γ"));
                    }
                    match s {
                        EdgeStatus::Unclaimed => st.ledger[*e as usize] = EdgeStatus::RevealedOut,
                        EdgeStatus::RevealedOut if potential => {}
                        other => st.checks.fail("claim_legality", Some(i), Some(turn), format!("revealed edge {e} was {other:?}")),
                    }
                } else if !potential || s != EdgeStatus::Maker {
                    st.checks.fail("claim_legality", Some(i), Some(turn), format!("edge {e} haunted as Maker's but is {s:?}"));
                }
                if let Some(games) = st.games.as_mut() {
                    if games[gi].is_free(*e) {
                        games[gi].take(*e, Z);
                    } else {
                        st.checks.fail("box_partition", Some(i), Some(turn), format!("haunted edge {e} is not free in the {seg_game:?} game"));
                    }
                }
            }
            GameEvent::Claim { e, .. } => {
                close_growth(&mut st, &mut growth, i, turn);
                match st.status(*e) {
                    Some(EdgeStatus::Unclaimed) => {}
                    Some(s) => {
                        st.checks.fail("claim_legality", Some(i), Some(turn), format!("Maker claimed {s:?} edge {e}"));
                        continue;
                    }
                    None => {
                        st.checks.fail("claim_legality", Some(i), Some(turn), format!("edge {e} does not exist"));
                        continue;
                    }
                }
                if !in_gamma(seed, p, EdgeId(*e)) {
                    st.checks.fail("gamma_membership", Some(i), Some(turn), format!("Maker edge {e} is not in Γ"));
                }
                if let Some(games) = st.games.as_mut() {
                    if games[gi].is_free(*e) {
                        games[gi].take(*e, X);
                    } else {
                        st.checks.fail("box_partition", Some(i), Some(turn), format!("claimed edge {e} is not free in the {seg_game:?} game"));
                    }
                }
                st.ledger[*e as usize] = EdgeStatus::Maker;
                let (u, v) = raw_endpoints(*e, n);
                st.maker_adj[u as usize].push(v);
                st.maker_adj[v as usize].push(u);
                st.grow_queue.push((u, v));
                in_turn = false;
                turn_claimed = true;
                expect_breaker = true;
            }
            GameEvent::Breaker { .. } => unreachable!(),
        }
    }
    let last = t.events.len();
    if in_turn {
        close_growth(&mut st, &mut growth, last, turn);
        end_turn(&mut st, turn_claimed, last, turn);
    }
    if st.games.is_some() {
        st.flush(GameId::Deg, None, turn);
        st.flush(GameId::Nbh, None, turn);
        let games = st.games.as_ref().expect("box games");
        let summary = format!(
            "max deficit: degree {:.6}, neighbourhood {:.6}",
            games[0].max_deficit, games[1].max_deficit
        );
        let c = st.checks.get("fair_share");
        c.note = Some(match c.note.take() {
            Some(prev) => format!("{prev}; {summary}"),
            None => summary,
        });
    }
    let unclaimed = st.ledger.iter().filter(|s| **s == EdgeStatus::Unclaimed).count();
    if unclaimed > 0 {
        st.checks.fail("ledger_trichotomy", None, Some(turn), format!("{unclaimed} edges still unclaimed"));
    }
    Ok(st.checks.finish("real", &t.hash))
}

fn header_games(params: &RealGameParams, t: &RealTranscript) -> std::result::Result<[BoxReplay; 2], String> {
    let dcfg = params.degree_config().map_err(|e| e.to_string())?;
    let ncfg = params.nbhd_config().map_err(|e| e.to_string())?;
    for (g, cfg) in [(GameId::Deg, &dcfg), (GameId::Nbh, &ncfg)] {
        let h = t.box_header(g).ok_or_else(|| format!("{g:?} game header missing"))?;
        if &h.config != cfg {
            return Err(format!("{g:?} game config does not follow from the parameters"));
        }
        let par = derive_parameters(&BoxGameConfig {
            strict_preconditions: false,
            ..cfg.clone()
        })
        .map_err(|e| e.to_string())?;
        if (par.lambda - h.params.lambda).abs() > 1e-12 || (par.tau - h.params.tau).abs() > 1e-12 {
            return Err(format!("{g:?} game lambda/tau do not match the config"));
        }
        if h.guaranteed != par.preconditions_ok {
            return Err(format!("{g:?} game guarantee flag is wrong"));
        }
    }
    let n = params.n;
    let degree_boxes: Vec<Vec<u32>> = (0..n)
        .map(|v| (0..n).filter(|&u| u != v).map(|u| raw_edge_index(u, v, n)).collect())
        .collect();
    let deg = BoxReplay::new(&dcfg, degree_boxes).map_err(|e| e.to_string())?;
    let nbh = BoxReplay::new(&ncfg, vec![Vec::new(); n as usize]).map_err(|e| e.to_string())?;
    Ok([deg, nbh])
}

const BOX_CHECKS: &[&str] = &[
    "hash",
    "header",
    "turn_structure",
    "claim_legality",
    "bias_bound",
    "box_growth",
    "box_partition",
    "maker_choice",
    "potential_monotone",
    "fair_share",
    "termination",
];

#[derive(PartialEq, Eq, Clone, Copy)]
enum BoxPhase {
    Grow,
    Maker,
    Breaker,
}

/// Replays a standalone box-game transcript.
pub fn verify_box_transcript(t: &BoxGameTranscript) -> Result<InvariantReport> {
    let mut checks = Checks::new(BOX_CHECKS);
    if t.recompute_hash() != t.hash {
        checks.fail("hash", None, None, format!("header hash {} does not match events", t.hash));
    }
    let cfg = &t.config;
    if cfg.vertex_count as usize > edge_count(MAX_N as usize) {
        return Err(Error::Size {
            what: "vertex_count",
            got: cfg.vertex_count as usize,
            limit: edge_count(MAX_N as usize),
        });
    }
    if t.kind != "box" {
        checks.fail("header", None, None, format!("kind {:?}", t.kind));
    }
    if t.initial.len() != cfg.e as usize {
        checks.fail("header", None, None, format!("{} initial boxes for e = {}", t.initial.len(), cfg.e));
        return Ok(checks.finish("box", &t.hash));
    }
    if let Some((s, _)) = t.initial.iter().enumerate().find(|(_, b)| b.len() > cfg.max_box as usize) {
        checks.fail("header", None, None, format!("initial box {s} exceeds M"));
    }
    let mut g = match BoxReplay::new(cfg, t.initial.clone()) {
        Ok(g) => g,
        Err(e) => {
            checks.fail("header", None, None, e.to_string());
            return Ok(checks.finish("box", &t.hash));
        }
    };
    let par = derive_parameters(&BoxGameConfig {
        strict_preconditions: false,
        ..cfg.clone()
    })?;
    if (par.lambda - t.params.lambda).abs() > 1e-12 || (par.tau - t.params.tau).abs() > 1e-12 {
        checks.fail("header", None, None, "lambda/tau do not match the config");
    }
    if t.guaranteed != par.preconditions_ok {
        checks.fail("header", None, None, "guarantee flag is wrong");
    }
    if !par.preconditions_ok {
        checks.skip("fair_share", "slack or box-size condition fails; fair share not guaranteed");
    }
    let proposals = t.events.iter().filter(|e| matches!(e, BoxEvent::Propose { .. })).count() as u64;
    let incidences = t.initial.iter().map(Vec::len).sum::<usize>() as u64
        + t.events
            .iter()
            .map(|e| match e {
                BoxEvent::Grow { add, .. } => add.len() as u64,
                _ => 0,
            })
            .sum::<u64>();
    let check_choice = (incidences + cfg.vertex_count as u64).saturating_mul(proposals) <= CHOICE_BUDGET;
    if !check_choice {
        checks.skip("maker_choice", "instance too large for a full re-derivation");
    }

    let mut phase = BoxPhase::Grow;
    let mut round: u64 = 1;
    let mut pending: Option<u32> = None;
    let mut claims = 0u32;
    let mut started = false;
    let nv = cfg.vertex_count;
    for (i, ev) in t.events.iter().enumerate() {
        let r = Some(round);
        match ev {
            BoxEvent::Breaker { v } if i == 0 && phase == BoxPhase::Grow && !started => {
                if v.len() > cfg.b as usize {
                    checks.fail("bias_bound", Some(i), r, format!("opening claims {} > b", v.len()));
                }
                for &u in v {
                    if g.is_free(u) {
                        g.take(u, Y);
                    } else {
                        checks.fail("claim_legality", Some(i), r, format!("Breaker claimed unavailable vertex {u}"));
                    }
                }
                g.last_total = g.total();
                started = true;
            }
            BoxEvent::Grow { box_id, add, size } => {
                started = true;
                if phase != BoxPhase::Grow {
                    checks.fail("turn_structure", Some(i), r, "box growth outside the ghost phase");
                }
                let Some(current) = g.members.get(*box_id as usize).map(Vec::len) else {
                    checks.fail("box_growth", Some(i), r, format!("box {box_id} does not exist"));
                    continue;
                };
                if (*size as usize) < current {
                    checks.fail("box_growth", Some(i), r, format!("box {box_id} shrank from {current} to {size}"));
                } else if *size as usize != current + add.len() {
                    checks.fail("box_growth", Some(i), r, format!("box {box_id} size {size} does not match"));
                }
                if current + add.len() > g.cap {
                    checks.fail("box_growth", Some(i), r, format!("box {box_id} exceeds M = {}", g.cap));
                }
                for &u in add {
                    if u >= nv || !g.is_free(u) {
                        checks.fail("box_growth", Some(i), r, format!("box {box_id}: added vertex {u} is not free"));
                        continue;
                    }
                    if g.incidence[u as usize].contains(box_id) {
                        checks.fail("box_growth", Some(i), r, format!("box {box_id}: vertex {u} added twice"));
                        continue;
                    }
                    g.members[*box_id as usize].push(u);
                    g.incidence[u as usize].push(*box_id);
                }
            }
            BoxEvent::Propose { v } => {
                started = true;
                if phase == BoxPhase::Grow {
                    phase = BoxPhase::Maker;
                }
                if phase != BoxPhase::Maker || pending.is_some() {
                    checks.fail("turn_structure", Some(i), r, "proposal out of turn");
                }
                if !g.is_free(*v) {
                    checks.fail("claim_legality", Some(i), r, format!("proposal {v} is not free"));
                    continue;
                }
                if check_choice {
                    let mine = g.effect_log(*v);
                    let best = (0..nv)
                        .filter(|&u| g.is_free(u))
                        .map(|u| g.effect_log(u))
                        .fold(f64::NEG_INFINITY, f64::max);
                    if best.is_finite() && mine < best + (1.0 - 1e-9f64).ln() {
                        checks.fail("maker_choice", Some(i), r, format!("proposal {v} does not maximise the potential drop"));
                    }
                }
                pending = Some(*v);
            }
            BoxEvent::Claim { v } => {
                if pending != Some(*v) {
                    checks.fail("turn_structure", Some(i), r, format!("claim of {v} without its proposal"));
                    continue;
                }
                pending = None;
                g.take(*v, X);
                claims += 1;
                if claims >= cfg.m {
                    phase = BoxPhase::Breaker;
                }
            }
            BoxEvent::Haunt { v } => {
                if v.first().copied() != pending || pending.is_none() {
                    checks.fail("turn_structure", Some(i), r, "haunt without its proposal");
                    continue;
                }
                pending = None;
                for &u in v {
                    if g.is_free(u) {
                        g.take(u, Z);
                    } else {
                        checks.fail("box_partition", Some(i), r, format!("haunted vertex {u} is not free"));
                    }
                }
            }
            BoxEvent::Breaker { v } => {
                if pending.is_some() {
                    checks.fail("turn_structure", Some(i), r, "Breaker moved during an open proposal");
                    pending = None;
                }
                if phase != BoxPhase::Breaker && g.free_count() > 0 {
                    checks.fail("turn_structure", Some(i), r, "Maker stopped while free vertices remained");
                }
                if v.len() > cfg.b as usize {
                    checks.fail("bias_bound", Some(i), r, format!("Breaker claimed {} > b = {}", v.len(), cfg.b));
                }
                for (k, &u) in v.iter().enumerate() {
                    if v[..k].contains(&u) || !g.is_free(u) {
                        checks.fail("claim_legality", Some(i), r, format!("Breaker claimed unavailable vertex {u}"));
                        continue;
                    }
                    g.take(u, Y);
                }
                let (monotone, d, s) = g.close_round();
                if !monotone {
                    checks.fail("potential_monotone", Some(i), r, format!("potential increased in round {round}"));
                }
                if par.preconditions_ok && d > DEFICIT_TOLERANCE {
                    checks.fail("fair_share", Some(i), r, format!("box {s} deficit {d:.6} in round {round}"));
                }
                round += 1;
                claims = 0;
                phase = BoxPhase::Grow;
                started = true;
            }
        }
    }
    if phase != BoxPhase::Grow || g.free_count() > 0 {
        checks.fail("termination", None, Some(round), "transcript ends before every vertex is claimed or haunted");
    }
    checks.note("fair_share", format!("max deficit {:.6}, {} violations", g.max_deficit, g.violations));
    Ok(checks.finish("box", &t.hash))
}
