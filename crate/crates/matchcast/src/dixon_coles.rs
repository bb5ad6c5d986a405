//! Dixon-Coles goal model: independent Poissons with team attack/defense
//! strengths, a home-advantage multiplier, the four-cell low-score
//! correction tau and exponential time-decay weighting, fitted by
//! maximum likelihood.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::BufReader;
use std::path::Path;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::corpus::MatchRecord;
use crate::error::{Error, Result};
use crate::odds::OutcomeProbs;

pub const DEFAULT_XI: f64 = 0.0065;
pub const DEFAULT_MAX_GOALS: usize = 10;
pub const ARTIFACT_TYPE: &str = "dixon_coles";
pub const ARTIFACT_VERSION: u32 = 1;

const HALF_WEEK_DAYS: f64 = 3.5;
const TAU_FLOOR: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TeamStrength {
    pub attack: f64,
    pub defense: f64,
}

/// Fitted model parameters. `home_adv` is the gamma multiplier on the
/// home scoring rate; `rho` controls the low-score correction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DcParams {
    pub teams: BTreeMap<String, TeamStrength>,
    pub home_adv: f64,
    pub rho: f64,
    pub xi: f64,
}

#[derive(Debug, Clone, Copy)]
pub struct FitOptions {
    pub xi: f64,
    pub rho_min: f64,
    pub rho_max: f64,
    pub max_iterations: usize,
    /// Convergence threshold on the gradient max-norm.
    pub grad_tol: f64,
}

impl Default for FitOptions {
    fn default() -> Self {
        FitOptions {
            xi: DEFAULT_XI,
            rho_min: -0.5,
            rho_max: 0.5,
            max_iterations: 500,
            grad_tol: 1e-6,
        }
    }
}

/// Four-cell low-score correction. Identity outside {0,1} x {0,1}.
pub fn tau(x: u32, y: u32, lambda: f64, kappa: f64, rho: f64) -> f64 {
    match (x, y) {
        (0, 0) => 1.0 - lambda * kappa * rho,
        (0, 1) => 1.0 + lambda * rho,
        (1, 0) => 1.0 + kappa * rho,
        (1, 1) => 1.0 - rho,
        _ => 1.0,
    }
}

fn ln_poisson(k: u32, mean: f64) -> f64 {
    let mut ln_fact = 0.0;
    for i in 2..=k {
        ln_fact += (i as f64).ln();
    }
    k as f64 * mean.ln() - mean - ln_fact
}

fn poisson_pmf(k: u32, mean: f64) -> f64 {
    ln_poisson(k, mean).exp()
}

/// Exponential time-decay weight, measured in half-weeks back from `as_of`.
pub fn time_weight(xi: f64, match_date: NaiveDate, as_of: NaiveDate) -> f64 {
    let days = (as_of - match_date).num_days().max(0) as f64;
    (-xi * days / HALF_WEEK_DAYS).exp()
}

// Flat parameter vector layout: [log_attack; n] [log_defense; n] log_gamma rho.
struct Objective<'a> {
    teams: Vec<String>,
    home_idx: Vec<usize>,
    away_idx: Vec<usize>,
    matches: &'a [MatchRecord],
    weights: Vec<f64>,
    rho_min: f64,
    rho_max: f64,
}

impl<'a> Objective<'a> {
    fn n_teams(&self) -> usize {
        self.teams.len()
    }

    fn dim(&self) -> usize {
        2 * self.n_teams() + 2
    }

    fn rates(&self, params: &[f64], match_idx: usize) -> (f64, f64) {
        let n = self.n_teams();
        let h = self.home_idx[match_idx];
        let a = self.away_idx[match_idx];
        let gamma = params[2 * n].exp();
        let lambda = (params[h] + params[n + a]).exp() * gamma;
        let kappa = (params[a] + params[n + h]).exp();
        (lambda, kappa)
    }

    // value and gradient are divided by the total weight so both stay on a
    // per-match scale; otherwise the achievable gradient precision grows
    // with the training-set size and a fixed tolerance becomes unreachable
    fn weight_norm(&self) -> f64 {
        1.0 / self.weights.iter().sum::<f64>().max(f64::MIN_POSITIVE)
    }

    /// Normalized negative weighted log-likelihood; +inf when rho leaves
    /// its box or any tau cell goes non-positive on the training set.
    fn value(&self, params: &[f64]) -> f64 {
        let n = self.n_teams();
        let rho = params[2 * n + 1];
        if rho < self.rho_min || rho > self.rho_max {
            return f64::INFINITY;
        }
        let mut nll = 0.0;
        for (i, m) in self.matches.iter().enumerate() {
            let (lambda, kappa) = self.rates(params, i);
            // all four corrected cells must stay positive, not just the
            // observed one
            for (x, y) in [(0, 0), (0, 1), (1, 0), (1, 1)] {
                if tau(x, y, lambda, kappa, rho) <= TAU_FLOOR {
                    return f64::INFINITY;
                }
            }
            let t = tau(m.home_goals, m.away_goals, lambda, kappa, rho);
            let ll = t.ln()
                + ln_poisson(m.home_goals, lambda)
                + ln_poisson(m.away_goals, kappa);
            nll -= self.weights[i] * ll;
        }
        nll * self.weight_norm()
    }

    fn gradient(&self, params: &[f64]) -> Vec<f64> {
        let n = self.n_teams();
        let rho = params[2 * n + 1];
        let mut grad = vec![0.0; self.dim()];
        for (i, m) in self.matches.iter().enumerate() {
            let w = self.weights[i];
            let (lambda, kappa) = self.rates(params, i);
            let (x, y) = (m.home_goals, m.away_goals);
            let t = tau(x, y, lambda, kappa, rho);

            // d log tau / d {lambda, kappa, rho}
            let (dt_dl, dt_dk, dt_dr) = match (x, y) {
                (0, 0) => (-kappa * rho / t, -lambda * rho / t, -lambda * kappa / t),
                (0, 1) => (rho / t, 0.0, lambda / t),
                (1, 0) => (0.0, rho / t, kappa / t),
                (1, 1) => (0.0, 0.0, -1.0 / t),
                _ => (0.0, 0.0, 0.0),
            };
            // d logL / d log(lambda), d log(kappa)
            let d_ll = x as f64 - lambda + lambda * dt_dl;
            let d_lk = y as f64 - kappa + kappa * dt_dk;

            let h = self.home_idx[i];
            let a = self.away_idx[i];
            // minimizing the negative log-likelihood
            grad[h] -= w * d_ll; // log attack home
            grad[n + a] -= w * d_ll; // log defense away
            grad[2 * n] -= w * d_ll; // log gamma
            grad[a] -= w * d_lk; // log attack away
            grad[n + h] -= w * d_lk; // log defense home
            grad[2 * n + 1] -= w * dt_dr;
        }
        let norm = self.weight_norm();
        for g in grad.iter_mut() {
            *g *= norm;
        }
        grad
    }
}

fn recenter(params: &mut [f64], n: usize) {
    // gauge freedom: scaling all attacks by c and defenses by 1/c leaves
    // every rate unchanged, so shift mass without touching the likelihood
    let mean: f64 = params[..n].iter().sum::<f64>() / n as f64;
    for p in params[..n].iter_mut() {
        *p -= mean;
    }
    for p in params[n..2 * n].iter_mut() {
        *p += mean;
    }
}

/// Fits the model by time-weighted maximum likelihood (BFGS on
/// log-parameters with Armijo backtracking; infeasible steps rejected).
pub fn fit(train: &[MatchRecord], options: &FitOptions, as_of: NaiveDate) -> Result<DcParams> {
    if train.is_empty() {
        return Err(Error::Model("cannot fit Dixon-Coles on zero matches".into()));
    }
    let mut teams: Vec<String> = train
        .iter()
        .flat_map(|m| [m.home_team.clone(), m.away_team.clone()])
        .collect();
    teams.sort();
    teams.dedup();
    let team_idx: BTreeMap<&str, usize> = teams
        .iter()
        .enumerate()
        .map(|(i, t)| (t.as_str(), i))
        .collect();

    // every team needs at least one home and one away appearance
    let mut home_count = vec![0u32; teams.len()];
    let mut away_count = vec![0u32; teams.len()];
    for m in train {
        home_count[team_idx[m.home_team.as_str()]] += 1;
        away_count[team_idx[m.away_team.as_str()]] += 1;
    }
    for (i, t) in teams.iter().enumerate() {
        if home_count[i] == 0 || away_count[i] == 0 {
            return Err(Error::Model(format!(
                "team {t} lacks home or away matches in the training set"
            )));
        }
    }

    let weights: Vec<f64> = train
        .iter()
        .map(|m| time_weight(options.xi, m.date, as_of))
        .collect();
    let obj = Objective {
        home_idx: train
            .iter()
            .map(|m| team_idx[m.home_team.as_str()])
            .collect(),
        away_idx: train
            .iter()
            .map(|m| team_idx[m.away_team.as_str()])
            .collect(),
        teams,
        matches: train,
        weights,
        rho_min: options.rho_min,
        rho_max: options.rho_max,
    };

    let n = obj.n_teams();
    let dim = obj.dim();
    let total_w: f64 = obj.weights.iter().sum();
    let mean_home: f64 = train
        .iter()
        .zip(&obj.weights)
        .map(|(m, w)| w * m.home_goals as f64)
        .sum::<f64>()
        / total_w;
    let mean_away: f64 = train
        .iter()
        .zip(&obj.weights)
        .map(|(m, w)| w * m.away_goals as f64)
        .sum::<f64>()
        / total_w;

    let mut params = vec![0.0; dim];
    let base_defense = mean_away.max(0.2);
    for p in params[n..2 * n].iter_mut() {
        *p = base_defense.ln();
    }
    params[2 * n] = (mean_home.max(0.2) / base_defense).ln();
    params[2 * n + 1] = 0.0;

    let mut h_inv = identity(dim);
    let mut f = obj.value(&params);
    if !f.is_finite() {
        return Err(Error::Model("infeasible initial Dixon-Coles state".into()));
    }
    let mut grad = obj.gradient(&params);

    let mut converged = false;
    let mut iterations = 0;
    for iter in 0..options.max_iterations {
        iterations = iter + 1;
        let gnorm = grad.iter().fold(0.0f64, |acc, g| acc.max(g.abs()));
        if gnorm < options.grad_tol {
            converged = true;
            break;
        }

        let mut direction = mat_vec(&h_inv, &grad);
        for d in direction.iter_mut() {
            *d = -*d;
        }
        let slope: f64 = direction.iter().zip(&grad).map(|(d, g)| d * g).sum();
        if slope >= 0.0 {
            // lost curvature; restart from steepest descent
            h_inv = identity(dim);
            direction = grad.iter().map(|g| -g).collect();
        }
        let slope: f64 = direction.iter().zip(&grad).map(|(d, g)| d * g).sum();

        // Armijo backtracking; infeasible trial points (tau <= 0, rho out
        // of box) evaluate to +inf and shrink the step
        let mut step = 1.0;
        let mut accepted = false;
        let mut trial = params.clone();
        let mut f_new = f;
        for _ in 0..60 {
            for (t, (p, d)) in trial.iter_mut().zip(params.iter().zip(&direction)) {
                *t = p + step * d;
            }
            f_new = obj.value(&trial);
            if f_new.is_finite() && f_new <= f + 1e-4 * step * slope {
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if !accepted {
            break;
        }

        let grad_new = obj.gradient(&trial);
        let s: Vec<f64> = trial.iter().zip(&params).map(|(a, b)| a - b).collect();
        let yv: Vec<f64> = grad_new.iter().zip(&grad).map(|(a, b)| a - b).collect();
        bfgs_update(&mut h_inv, &s, &yv);

        params = trial;
        recenter(&mut params, n);
        f = f_new;
        grad = obj.gradient(&params);
    }

    if !converged {
        let gnorm = grad.iter().fold(0.0f64, |acc, g| acc.max(g.abs()));
        if gnorm >= options.grad_tol {
            return Err(Error::NonConvergence {
                grad_norm: gnorm,
                iterations,
            });
        }
    }

    recenter(&mut params, n);
    let teams_map = obj
        .teams
        .iter()
        .enumerate()
        .map(|(i, t)| {
            (
                t.clone(),
                TeamStrength {
                    attack: params[i].exp(),
                    defense: params[n + i].exp(),
                },
            )
        })
        .collect();
    Ok(DcParams {
        teams: teams_map,
        home_adv: params[2 * n].exp(),
        rho: params[2 * n + 1],
        xi: options.xi,
    })
}

fn identity(dim: usize) -> Vec<Vec<f64>> {
    let mut m = vec![vec![0.0; dim]; dim];
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = 1.0;
    }
    m
}

fn mat_vec(m: &[Vec<f64>], v: &[f64]) -> Vec<f64> {
    m.iter()
        .map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum())
        .collect()
}

fn bfgs_update(h: &mut [Vec<f64>], s: &[f64], y: &[f64]) {
    let sy: f64 = s.iter().zip(y).map(|(a, b)| a * b).sum();
    if sy <= 1e-10 {
        return;
    }
    let dim = s.len();
    let hy = mat_vec(h, y);
    let yhy: f64 = y.iter().zip(&hy).map(|(a, b)| a * b).sum();
    let c1 = (sy + yhy) / (sy * sy);
    for i in 0..dim {
        for j in 0..dim {
            h[i][j] += c1 * s[i] * s[j] - (hy[i] * s[j] + s[i] * hy[j]) / sy;
        }
    }
}

/// Truncated scoreline probability grid, renormalized over the grid.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoreGrid {
    pub max_goals: usize,
    pub probs: Vec<Vec<f64>>,
}

impl ScoreGrid {
    /// Builds a grid directly from scoring rates (the model-free core of
    /// [`score_grid`]).
    pub fn from_rates(lambda: f64, kappa: f64, rho: f64, max_goals: usize) -> Result<ScoreGrid> {
        if max_goals < 5 {
            return Err(Error::Model(format!("max_goals must be >= 5, got {max_goals}")));
        }
        let mut probs = vec![vec![0.0; max_goals + 1]; max_goals + 1];
        let mut raw_sum = 0.0;
        for (x, row) in probs.iter_mut().enumerate() {
            for (y, cell) in row.iter_mut().enumerate() {
                let t = tau(x as u32, y as u32, lambda, kappa, rho);
                if t <= 0.0 {
                    return Err(Error::Model(format!(
                        "tau({x},{y}) non-positive for rho={rho}, lambda={lambda}, kappa={kappa}"
                    )));
                }
                *cell = t * poisson_pmf(x as u32, lambda) * poisson_pmf(y as u32, kappa);
                raw_sum += *cell;
            }
        }
        if raw_sum < 0.999 {
            return Err(Error::Model(format!(
                "score grid truncated too aggressively (mass {raw_sum:.6}); raise max_goals"
            )));
        }
        for row in probs.iter_mut() {
            for cell in row.iter_mut() {
                *cell /= raw_sum;
            }
        }
        Ok(ScoreGrid { max_goals, probs })
    }

    /// (home, draw, away) as lower-triangle, diagonal and upper-triangle sums.
    pub fn outcome_probs(&self) -> OutcomeProbs {
        let mut home = 0.0;
        let mut draw = 0.0;
        let mut away = 0.0;
        for (x, row) in self.probs.iter().enumerate() {
            for (y, &p) in row.iter().enumerate() {
                match x.cmp(&y) {
                    std::cmp::Ordering::Greater => home += p,
                    std::cmp::Ordering::Equal => draw += p,
                    std::cmp::Ordering::Less => away += p,
                }
            }
        }
        OutcomeProbs { home, draw, away }
    }
}

impl DcParams {
    pub fn strength(&self, team: &str) -> Result<&TeamStrength> {
        self.teams
            .get(team)
            .ok_or_else(|| Error::Model(format!("unknown team {team}")))
    }

    /// League-mean strength used for promoted/new teams.
    pub fn league_mean_strength(&self) -> TeamStrength {
        let n = self.teams.len().max(1) as f64;
        TeamStrength {
            attack: self.teams.values().map(|s| s.attack).sum::<f64>() / n,
            defense: self.teams.values().map(|s| s.defense).sum::<f64>() / n,
        }
    }

    fn rates_for(&self, home: &str, away: &str, allow_fallback: bool) -> Result<(f64, f64, bool)> {
        let mean = self.league_mean_strength();
        let mut fallback = false;
        let mut get = |team: &str| -> Result<TeamStrength> {
            match self.teams.get(team) {
                Some(s) => Ok(*s),
                None if allow_fallback => {
                    fallback = true;
                    Ok(mean)
                }
                None => Err(Error::Model(format!("unknown team {team}"))),
            }
        };
        let h = get(home)?;
        let a = get(away)?;
        let lambda = h.attack * a.defense * self.home_adv;
        let kappa = a.attack * h.defense;
        Ok((lambda, kappa, fallback))
    }
}

pub fn score_grid(
    params: &DcParams,
    home: &str,
    away: &str,
    max_goals: usize,
) -> Result<ScoreGrid> {
    let (lambda, kappa, _) = params.rates_for(home, away, false)?;
    ScoreGrid::from_rates(lambda, kappa, params.rho, max_goals)
}

/// Outcome probabilities for a fixture. Errors on unknown teams.
pub fn predict(params: &DcParams, home: &str, away: &str) -> Result<OutcomeProbs> {
    Ok(score_grid(params, home, away, DEFAULT_MAX_GOALS)?.outcome_probs())
}

/// As [`predict`] but unknown teams fall back to league-mean strength;
/// the flag reports whether the fallback fired.
pub fn predict_with_fallback(
    params: &DcParams,
    home: &str,
    away: &str,
) -> Result<(OutcomeProbs, bool)> {
    let (lambda, kappa, fallback) = params.rates_for(home, away, true)?;
    let grid = ScoreGrid::from_rates(lambda, kappa, params.rho, DEFAULT_MAX_GOALS)?;
    Ok((grid.outcome_probs(), fallback))
}

// ---- artifact ----

#[derive(Serialize, Deserialize)]
struct DcArtifact {
    #[serde(rename = "type")]
    kind: String,
    version: u32,
    xi: f64,
    gamma: f64,
    rho: f64,
    teams: BTreeMap<String, TeamStrength>,
}

pub fn save_artifact(params: &DcParams, path: &Path) -> Result<()> {
    let artifact = DcArtifact {
        kind: ARTIFACT_TYPE.to_string(),
        version: ARTIFACT_VERSION,
        xi: params.xi,
        gamma: params.home_adv,
        rho: params.rho,
        teams: params.teams.clone(),
    };
    let bytes = serde_json::to_vec_pretty(&artifact)
        .map_err(|e| Error::Model(format!("artifact serialization failed: {e}")))?;
    crate::corpus::write_atomic(path, &bytes)
}

pub fn load_artifact(path: &Path) -> Result<DcParams> {
    let file = File::open(path).map_err(|e| Error::Io {
        path: path.display().to_string(),
        source: e,
    })?;
    let artifact: DcArtifact = serde_json::from_reader(BufReader::new(file))
        .map_err(|e| Error::Model(format!("{}: invalid artifact: {e}", path.display())))?;
    if artifact.kind != ARTIFACT_TYPE {
        return Err(Error::Model(format!(
            "artifact type {} is not {ARTIFACT_TYPE}",
            artifact.kind
        )));
    }
    if artifact.version != ARTIFACT_VERSION {
        return Err(Error::Model(format!(
            "artifact version {} unsupported",
            artifact.version
        )));
    }
    Ok(DcParams {
        teams: artifact.teams,
        home_adv: artifact.gamma,
        rho: artifact.rho,
        xi: artifact.xi,
    })
}

/// Synthetic-league generation used by simulate-then-refit tests.
#[doc(hidden)]
pub mod test_support {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    pub fn date(s: &str) -> NaiveDate {
        NaiveDate::parse_from_str(s, "%Y-%m-%d").unwrap()
    }

    pub fn record(id: usize, d: NaiveDate, home: &str, away: &str, hg: u32, ag: u32) -> MatchRecord {
        MatchRecord {
            match_id: format!("m{id}"),
            date: d,
            season: "s".into(),
            home_team: home.into(),
            away_team: away.into(),
            home_goals: hg,
            away_goals: ag,
            odds: None,
        }
    }

    pub fn sample_poisson(rng: &mut impl Rng, mean: f64) -> u32 {
        // inverse-transform; means here are small
        let l = (-mean).exp();
        let mut k = 0u32;
        let mut p = 1.0;
        loop {
            p *= rng.gen::<f64>();
            if p <= l {
                return k;
            }
            k += 1;
            if k > 50 {
                return 50;
            }
        }
    }

    pub fn simulate_league(
        attacks: &[f64],
        defenses: &[f64],
        gamma: f64,
        rho: f64,
        n_matches: usize,
        seed: u64,
    ) -> Vec<MatchRecord> {
        let n = attacks.len();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut matches = Vec::with_capacity(n_matches);
        let start = date("2015-08-01");
        let mut id = 0;
        'outer: loop {
            for h in 0..n {
                for a in 0..n {
                    if h == a {
                        continue;
                    }
                    if matches.len() >= n_matches {
                        break 'outer;
                    }
                    let lambda = attacks[h] * defenses[a] * gamma;
                    let kappa = attacks[a] * defenses[h];
                    // rejection sampling against the tau correction
                    let (hg, ag) = loop {
                        let x = sample_poisson(&mut rng, lambda);
                        let y = sample_poisson(&mut rng, kappa);
                        let t = tau(x, y, lambda, kappa, rho);
                        if rng.gen::<f64>() < (t / 1.5).clamp(0.0, 1.0) {
                            break (x, y);
                        }
                    };
                    let d = start + chrono::Duration::days((id / 10) as i64 * 7);
                    matches.push(record(
                        id,
                        d,
                        &format!("T{h}"),
                        &format!("T{a}"),
                        hg,
                        ag,
                    ));
                    id += 1;
                }
            }
        }
        matches
    }

    /// Stratified league: each fixture's scorelines are allocated in
    /// proportion to the exact corrected pmf (largest-remainder rounding,
    /// seeded tie order), so recovery error is O(1/matches) instead of
    /// O(1/sqrt(matches)). Use this when asserting tight parameter bounds.
    pub fn simulate_league_stratified(
        attacks: &[f64],
        defenses: &[f64],
        gamma: f64,
        rho: f64,
        n_matches: usize,
        seed: u64,
    ) -> Vec<MatchRecord> {
        const MAX_GOALS: u32 = 12;
        let n = attacks.len();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let pairs: Vec<(usize, usize)> = (0..n)
            .flat_map(|h| (0..n).filter(move |&a| a != h).map(move |a| (h, a)))
            .collect();
        let base = n_matches / pairs.len();
        let extra = n_matches % pairs.len();

        let mut scorelines: Vec<(usize, usize, u32, u32)> = Vec::with_capacity(n_matches);
        for (k, &(h, a)) in pairs.iter().enumerate() {
            let m = base + usize::from(k < extra);
            let lambda = attacks[h] * defenses[a] * gamma;
            let kappa = attacks[a] * defenses[h];
            let mut cells: Vec<(u32, u32, f64)> = Vec::new();
            let mut total = 0.0;
            for x in 0..=MAX_GOALS {
                for y in 0..=MAX_GOALS {
                    let p = tau(x, y, lambda, kappa, rho)
                        * poisson_pmf(x, lambda)
                        * poisson_pmf(y, kappa);
                    total += p;
                    cells.push((x, y, p));
                }
            }
            let mut assigned = 0usize;
            let mut remainders: Vec<(f64, u64, usize)> = Vec::with_capacity(cells.len());
            for (ci, &(x, y, p)) in cells.iter().enumerate() {
                let exact = m as f64 * p / total;
                let count = exact.floor() as usize;
                for _ in 0..count {
                    scorelines.push((h, a, x, y));
                }
                assigned += count;
                remainders.push((exact - count as f64, rng.gen(), ci));
            }
            // hand the leftover matches to the largest remainders; the seed
            // only perturbs ties and the final ordering
            remainders.sort_by(|l, r| {
                r.0.partial_cmp(&l.0).unwrap().then_with(|| l.1.cmp(&r.1))
            });
            for &(_, _, ci) in remainders.iter().take(m - assigned) {
                let (x, y, _) = cells[ci];
                scorelines.push((h, a, x, y));
            }
        }

        // seeded shuffle, then dates in blocks like the iid generator
        for i in (1..scorelines.len()).rev() {
            let j = rng.gen_range(0..=i);
            scorelines.swap(i, j);
        }
        let start = date("2015-08-01");
        scorelines
            .into_iter()
            .enumerate()
            .map(|(id, (h, a, x, y))| {
                let d = start + chrono::Duration::days((id / 10) as i64 * 7);
                record(id, d, &format!("T{h}"), &format!("T{a}"), x, y)
            })
            .collect()
    }
}
