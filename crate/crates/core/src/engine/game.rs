use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::params::{MakerKind, RealGameParams};
use super::transcript::{BoxHeader, GameEvent, GameId, RealTranscript};
use crate::breaker::{BreakerSpec, BreakerStrategy, BreakerView};
use crate::error::{Error, Result};
use crate::graph::{raw_edge_index, raw_endpoints, ClaimLedger, EdgeId, EdgeStatus, SimpleGraph};
use crate::hash::{digest_lines, hex16};
use crate::oracle::{mix64, GammaOracle, Membership};
use crate::spookybox::{derive_parameters, BoxGame, GhostDecision, Phase};

/// Ledger, graphs and auxiliary box games of one real game.
pub struct RealGame {
    params: RealGameParams,
    n: u32,
    ledger: ClaimLedger,
    maker: SimpleGraph,
    breaker: SimpleGraph,
    oracle: GammaOracle,
    boxes: Option<[BoxGame; 2]>,
    headers: [Option<BoxHeader>; 2],
    pending: [Vec<u32>; 2],
    stepped: [bool; 2],
    /// Maker edges not yet seen by the neighbourhood ghost.
    grow_queue: Vec<(u32, u32)>,
    /// Per vertex, the Maker neighbours already accounted for in its box.
    basis: Vec<Vec<u32>>,
    maker_turns: u64,
    breaker_turns: u64,
    last_maker_edge: Option<(u32, u32)>,
    last_breaker_claims: Vec<EdgeId>,
    maker_rng: ChaCha8Rng,
    events: Vec<GameEvent>,
    warnings: Vec<String>,
    overflow_dropped: u64,
    max_feed: usize,
    finished: bool,
}

impl RealGame {
    pub fn new(params: RealGameParams) -> Result<Self> {
        params.validate()?;
        let n = params.n;
        let mut warnings = Vec::new();
        let mut headers = [None, None];
        let boxes = if params.maker == MakerKind::Potential {
            let dcfg = params.degree_config()?;
            let ncfg = params.nbhd_config()?;
            let dpar = derive_parameters(&dcfg)?;
            let npar = derive_parameters(&ncfg)?;
            for (name, cfg, par) in [("degree", &dcfg, &dpar), ("neighbourhood", &ncfg, &npar)] {
                if !par.box_size_ok {
                    warnings.push(format!(
                        "{name} game: M = {} is below 9(m+b) ln e; fair share not guaranteed",
                        cfg.max_box
                    ));
                }
                if !par.slack_ok {
                    warnings.push(format!(
                        "{name} game: ell = {:.6e} is below ell_min = {:.6e}; fair share not guaranteed",
                        cfg.ell, par.ell_min
                    ));
                }
            }
            let degree_boxes: Vec<Vec<u32>> = (0..n)
                .map(|v| {
                    (0..n)
                        .filter(|&u| u != v)
                        .map(|u| raw_edge_index(u, v, n))
                        .collect()
                })
                .collect();
            let deg = BoxGame::new(dcfg.clone(), degree_boxes)?.without_events();
            let nbh = BoxGame::with_empty_boxes(ncfg.clone())?.without_events();
            headers = [Some(BoxHeader::new(dcfg, dpar)), Some(BoxHeader::new(ncfg, npar))];
            Some([deg, nbh])
        } else {
            None
        };
        Ok(RealGame {
            ledger: ClaimLedger::new(n as usize),
            maker: SimpleGraph::new(n as usize),
            breaker: SimpleGraph::new(n as usize),
            oracle: GammaOracle::new(n as usize, params.p, params.seed),
            boxes,
            headers,
            pending: [Vec::new(), Vec::new()],
            stepped: [false, false],
            grow_queue: Vec::new(),
            basis: vec![Vec::new(); n as usize],
            maker_turns: 0,
            breaker_turns: 0,
            last_maker_edge: None,
            last_breaker_claims: Vec::new(),
            maker_rng: ChaCha8Rng::seed_from_u64(mix64(params.seed, u64::MAX)),
            events: Vec::new(),
            warnings,
            overflow_dropped: 0,
            max_feed: 0,
            finished: false,
            n,
            params,
        })
    }

    pub fn params(&self) -> &RealGameParams {
        &self.params
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn ledger(&self) -> &ClaimLedger {
        &self.ledger
    }

    pub fn maker_graph(&self) -> &SimpleGraph {
        &self.maker
    }

    pub fn breaker_graph(&self) -> &SimpleGraph {
        &self.breaker
    }

    pub fn oracle(&self) -> &GammaOracle {
        &self.oracle
    }

    pub fn box_game(&self, g: GameId) -> Option<&BoxGame> {
        self.boxes.as_ref().map(|b| &b[g.index()])
    }

    pub fn maker_turns(&self) -> u64 {
        self.maker_turns
    }

    pub fn breaker_turns(&self) -> u64 {
        self.breaker_turns
    }

    pub fn last_maker_edge(&self) -> Option<(u32, u32)> {
        self.last_maker_edge
    }

    pub fn last_breaker_claims(&self) -> &[EdgeId] {
        &self.last_breaker_claims
    }

    pub fn events(&self) -> &[GameEvent] {
        &self.events
    }

    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }

    /// Neighbourhood-box additions discarded because of the size cap.
    pub fn overflow_dropped(&self) -> u64 {
        self.overflow_dropped
    }

    /// Largest Breaker move fed to a box game.
    pub fn max_feed(&self) -> usize {
        self.max_feed
    }

    pub fn is_over(&self) -> bool {
        self.ledger.unclaimed() == 0
    }

    fn edge(&self, u: u32, v: u32) -> u32 {
        raw_edge_index(u, v, self.n)
    }

    fn record_claim(&mut self, g: Option<GameId>, e: u32) -> Result<()> {
        self.ledger.set(EdgeId(e), EdgeStatus::Maker)?;
        let (u, v) = raw_endpoints(e, self.n);
        self.maker.add_edge(u, v)?;
        self.grow_queue.push((u, v));
        self.last_maker_edge = Some((u, v));
        self.events.push(GameEvent::Claim { g, e });
        Ok(())
    }

    /// Feeds the Breaker claims accumulated since game `g` last moved.
    fn flush(&mut self, g: GameId) -> Result<()> {
        let i = g.index();
        let feed = std::mem::take(&mut self.pending[i]);
        let stepped = self.stepped[i];
        let Some(games) = self.boxes.as_mut() else {
            return Ok(());
        };
        let limit = 2 * self.params.b as usize;
        if feed.len() > limit {
            return Err(Error::Invariant(format!(
                "{g:?} game would receive {} Breaker claims, more than 2b = {limit}",
                feed.len()
            )));
        }
        self.max_feed = self.max_feed.max(feed.len());
        let game = &mut games[i];
        if game.phase() == Phase::BreakerMove {
            game.breaker_claim(&feed)
        } else if !stepped && !feed.is_empty() {
            game.opening_breaker_claim(&feed)
        } else if feed.is_empty() {
            Ok(())
        } else {
            Err(Error::Invariant(format!(
                "{g:?} game in phase {:?} cannot take a Breaker move",
                game.phase()
            )))
        }
    }

    /// Ghost additions to neighbourhood boxes for the Maker edges claimed
    /// since the last neighbourhood turn, lowest edge ids kept under the cap.
    fn nbhd_additions(&mut self) -> Vec<(u32, Vec<u32>)> {
        let queue = std::mem::take(&mut self.grow_queue);
        let mut adds: Vec<Vec<u32>> = vec![Vec::new(); self.n as usize];
        let mut touched: Vec<u32> = Vec::new();
        for (a, b) in queue {
            for (v, y) in [(a, b), (b, a)] {
                for i in 0..self.basis[v as usize].len() {
                    let w = self.basis[v as usize][i];
                    let e = self.edge(y, w);
                    if self.ledger.is_unclaimed(EdgeId(e)) {
                        if adds[v as usize].is_empty() {
                            touched.push(v);
                        }
                        adds[v as usize].push(e);
                    }
                }
                self.basis[v as usize].push(y);
            }
        }
        touched.sort_unstable();
        let cap = self.headers[1].as_ref().map_or(0, |h| h.config.max_box) as usize;
        let games = self.boxes.as_ref().expect("potential Maker");
        let mut out = Vec::with_capacity(touched.len());
        for v in touched {
            let mut list = std::mem::take(&mut adds[v as usize]);
            list.sort_unstable();
            let room = cap.saturating_sub(games[1].boxes()[v as usize].len());
            let dropped = list.len().saturating_sub(room);
            if dropped > 0 {
                list.truncate(room);
                self.overflow_dropped += dropped as u64;
            }
            let size = games[1].boxes()[v as usize].len() + list.len();
            self.events.push(GameEvent::Grow {
                g: GameId::Nbh,
                box_id: v,
                add: list.clone(),
                size: size as u32,
                drop: dropped as u32,
            });
            if !list.is_empty() {
                out.push((v, list));
            }
        }
        out
    }

    fn potential_step(&mut self, g: GameId) -> Result<Option<EdgeId>> {
        let i = g.index();
        self.flush(g)?;
        self.stepped[i] = true;
        let adds = if g == GameId::Nbh {
            self.nbhd_additions()
        } else {
            Vec::new()
        };
        self.boxes.as_mut().expect("potential Maker")[i].ghost_grow(&adds)?;
        loop {
            let game = &mut self.boxes.as_mut().expect("potential Maker")[i];
            if game.phase() != Phase::MakerMove {
                return Ok(None);
            }
            let Some(e) = game.propose()? else {
                return Ok(None);
            };
            let id = EdgeId(e);
            let haunt_out = match self.ledger.status(id) {
                EdgeStatus::Maker => Some(false),
                EdgeStatus::RevealedOut => Some(true),
                EdgeStatus::Breaker => {
                    return Err(Error::Invariant(format!(
                        "{g:?} game proposed Breaker edge {e}"
                    )))
                }
                EdgeStatus::Unclaimed => match self.oracle.query(id) {
                    Membership::NotInGamma => {
                        self.ledger.set(id, EdgeStatus::RevealedOut)?;
                        Some(true)
                    }
                    Membership::InGamma => None,
                },
            };
            let games = self.boxes.as_mut().expect("potential Maker");
            match haunt_out {
                Some(out) => {
                    games[i].resolve_maker_proposal(GhostDecision::Haunt(Vec::new()))?;
                    self.events.push(GameEvent::Haunt { g: Some(g), e, out });
                }
                None => {
                    games[i].resolve_maker_proposal(GhostDecision::Allow)?;
                    self.record_claim(Some(g), e)?;
                    return Ok(Some(id));
                }
            }
        }
    }

    /// Queries `e` and claims it if it is in Γ.
    fn try_direct(&mut self, e: u32) -> Result<bool> {
        let id = EdgeId(e);
        match self.oracle.query(id) {
            Membership::InGamma => {
                self.record_claim(None, e)?;
                Ok(true)
            }
            Membership::NotInGamma => {
                self.ledger.set(id, EdgeStatus::RevealedOut)?;
                self.events.push(GameEvent::Haunt { g: None, e, out: true });
                Ok(false)
            }
        }
    }

    fn random_step(&mut self) -> Result<Option<EdgeId>> {
        while self.ledger.unclaimed() > 0 {
            let total = self.ledger.len() as u32;
            let e = if self.ledger.unclaimed() * 8 >= self.ledger.len() {
                loop {
                    let e = self.maker_rng.gen_range(0..total);
                    if self.ledger.is_unclaimed(EdgeId(e)) {
                        break e;
                    }
                }
            } else {
                let k = self.maker_rng.gen_range(0..self.ledger.unclaimed());
                self.ledger
                    .iter()
                    .filter(|(_, s)| *s == EdgeStatus::Unclaimed)
                    .nth(k)
                    .expect("k below unclaimed count")
                    .0
                     .0
            };
            if self.try_direct(e)? {
                return Ok(Some(EdgeId(e)));
            }
        }
        Ok(None)
    }

    fn greedy_step(&mut self) -> Result<Option<EdgeId>> {
        while self.ledger.unclaimed() > 0 {
            let mut best: Option<(usize, u32)> = None;
            for (id, s) in self.ledger.iter() {
                if s != EdgeStatus::Unclaimed {
                    continue;
                }
                let (u, v) = raw_endpoints(id.0, self.n);
                let score = self.maker.degree(u) + self.maker.degree(v);
                if best.map_or(true, |(b, _)| score > b) {
                    best = Some((score, id.0));
                }
            }
            let (_, e) = best.expect("an unclaimed edge exists");
            if self.try_direct(e)? {
                return Ok(Some(EdgeId(e)));
            }
        }
        Ok(None)
    }

    /// One Maker turn; returns the claimed edge.
    pub fn maker_turn(&mut self) -> Result<Option<EdgeId>> {
        if self.finished {
            return Err(Error::InvalidArgument("game already finished".into()));
        }
        self.maker_turns += 1;
        self.last_maker_edge = None;
        match self.params.maker {
            MakerKind::Potential => self.potential_step(GameId::for_turn(self.maker_turns)),
            MakerKind::Random => self.random_step(),
            MakerKind::Greedy => self.greedy_step(),
        }
    }

    /// One Breaker turn with `strategy`; its claims are checked and queued
    /// for both box games.
    pub fn breaker_turn(&mut self, strategy: &mut dyn BreakerStrategy) -> Result<Vec<EdgeId>> {
        if self.finished {
            return Err(Error::InvalidArgument("game already finished".into()));
        }
        self.breaker_turns += 1;
        let view = BreakerView {
            n: self.n,
            b: self.params.b,
            round: self.breaker_turns,
            ledger: &self.ledger,
            maker: &self.maker,
            breaker: &self.breaker,
            last_maker_edge: self.last_maker_edge,
        };
        let claims = strategy.claim(&view);
        let fault = |message: String| Error::StrategyFault {
            strategy: strategy.spec().name().to_string(),
            message,
        };
        if claims.len() > self.params.b as usize {
            return Err(fault(format!(
                "turn {}: {} edges claimed with bias {}",
                self.breaker_turns,
                claims.len(),
                self.params.b
            )));
        }
        for (k, e) in claims.iter().enumerate() {
            if e.index() >= self.ledger.len() {
                return Err(fault(format!("edge {} does not exist", e.0)));
            }
            if claims[..k].contains(e) {
                return Err(fault(format!("edge {} claimed twice", e.0)));
            }
            let s = self.ledger.status(*e);
            if s != EdgeStatus::Unclaimed {
                return Err(fault(format!("edge {} is {s:?}", e.0)));
            }
        }
        for e in &claims {
            self.ledger.set(*e, EdgeStatus::Breaker)?;
            let (u, v) = raw_endpoints(e.0, self.n);
            self.breaker.add_edge(u, v)?;
            if self.boxes.is_some() {
                self.pending[0].push(e.0);
                self.pending[1].push(e.0);
            }
        }
        self.events.push(GameEvent::Breaker {
            e: claims.iter().map(|e| e.0).collect(),
        });
        self.last_breaker_claims = claims.clone();
        Ok(claims)
    }

    /// Closes both box games with the outstanding Breaker claims.
    pub fn finish(&mut self) -> Result<()> {
        if self.finished {
            return Ok(());
        }
        if self.boxes.is_some() {
            self.flush(GameId::Deg)?;
            self.flush(GameId::Nbh)?;
        }
        self.finished = true;
        Ok(())
    }

    pub fn transcript(&self, breaker: BreakerSpec, extra_warnings: &[String]) -> RealTranscript {
        let mut warnings = self.warnings.clone();
        warnings.extend_from_slice(extra_warnings);
        if self.overflow_dropped > 0 {
            warnings.push(format!(
                "neighbourhood boxes overflowed: {} additions dropped",
                self.overflow_dropped
            ));
        }
        RealTranscript {
            kind: "real".into(),
            code_version: crate::CODE_VERSION.into(),
            params: self.params.clone(),
            breaker,
            degree_game: self.headers[0].clone(),
            nbhd_game: self.headers[1].clone(),
            hypotheses: self.params.theorem_hypotheses(),
            warnings,
            events: self.events.clone(),
            hash: hex16(digest_lines(&self.events)),
        }
    }
}
