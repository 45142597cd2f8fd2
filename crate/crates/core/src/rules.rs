//! Winner determination and score computation on complete profiles for the
//! supported voting rules: positional scoring (plurality, veto, k-approval,
//! k-veto, Borda, arbitrary vectors), Bucklin, maximin, and Copeland.
//!
//! Bucklin uses the strictly-more-than-half majority convention throughout,
//! and lower Bucklin scores are better. All rules are evaluated in the
//! unique-winner model: `unique_winner` returns a candidate only when it is
//! strictly best.

use crate::error::{Error, Result};
use crate::prefs::{LinearVote, Profile};

/// A positional score vector α_1 ≥ α_2 ≥ … ≥ α_m.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScoreVector {
    alphas: Vec<i64>,
}

impl ScoreVector {
    pub fn new(alphas: Vec<i64>) -> Result<Self> {
        if alphas.is_empty() {
            return Err(Error::Parameter("score vector must be non-empty".into()));
        }
        if alphas.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::Parameter(
                "score vector must be non-increasing".into(),
            ));
        }
        if alphas.len() > 1 && alphas[0] == alphas[alphas.len() - 1] {
            return Err(Error::Parameter(
                "score vector must satisfy α_1 > α_m".into(),
            ));
        }
        Ok(ScoreVector { alphas })
    }

    pub fn plurality(m: usize) -> Self {
        Self::k_approval(m, 1)
    }

    pub fn veto(m: usize) -> Self {
        Self::k_veto(m, 1)
    }

    /// α_i = 1 for i ≤ k, else 0.
    pub fn k_approval(m: usize, k: usize) -> Self {
        assert!(k >= 1 && k < m.max(2), "k-approval needs 1 <= k < m");
        let alphas = (0..m).map(|i| if i < k { 1 } else { 0 }).collect();
        ScoreVector { alphas }
    }

    /// α_i = 0 for i ≤ m−k, else −1.
    pub fn k_veto(m: usize, k: usize) -> Self {
        assert!(k >= 1 && k < m.max(2), "k-veto needs 1 <= k < m");
        let alphas = (0..m).map(|i| if i < m - k { 0 } else { -1 }).collect();
        ScoreVector { alphas }
    }

    pub fn borda(m: usize) -> Self {
        ScoreVector {
            alphas: (0..m).map(|i| (m - 1 - i) as i64).collect(),
        }
    }

    pub fn alphas(&self) -> &[i64] {
        &self.alphas
    }

    pub fn m(&self) -> usize {
        self.alphas.len()
    }

    /// Some unit gap followed by zeros, per the normalized-vector convention.
    pub fn is_normalized(&self) -> bool {
        let m = self.alphas.len();
        (0..m - 1).any(|j| {
            self.alphas[j] - self.alphas[j + 1] == 1
                && self.alphas.iter().skip(j + 1).all(|&a| a == 0)
        })
    }
}

/// A voting rule plus its parameters.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Rule {
    Plurality,
    Veto,
    KApproval(usize),
    KVeto(usize),
    Borda,
    Scoring(ScoreVector),
    Bucklin,
    Maximin,
    Copeland,
}

impl Rule {
    /// The positional vector realizing this rule for `m` candidates, if it is
    /// a positional rule.
    pub fn score_vector(&self, m: usize) -> Result<Option<ScoreVector>> {
        let sv = match self {
            Rule::Plurality => Some(ScoreVector::plurality(m)),
            Rule::Veto => Some(ScoreVector::veto(m)),
            Rule::KApproval(k) => {
                if *k < 1 || *k >= m {
                    return Err(Error::Parameter(format!(
                        "k-approval needs 1 <= k < m, got k={k}, m={m}"
                    )));
                }
                Some(ScoreVector::k_approval(m, *k))
            }
            Rule::KVeto(k) => {
                if *k < 1 || *k >= m {
                    return Err(Error::Parameter(format!(
                        "k-veto needs 1 <= k < m, got k={k}, m={m}"
                    )));
                }
                Some(ScoreVector::k_veto(m, *k))
            }
            Rule::Borda => Some(ScoreVector::borda(m)),
            Rule::Scoring(sv) => {
                if sv.m() != m {
                    return Err(Error::Dimension {
                        expected: m,
                        got: sv.m(),
                    });
                }
                Some(sv.clone())
            }
            Rule::Bucklin | Rule::Maximin | Rule::Copeland => None,
        };
        Ok(sv)
    }

    /// Whether larger scores are better under this rule.
    pub fn higher_is_better(&self) -> bool {
        !matches!(self, Rule::Bucklin)
    }

    pub fn name(&self) -> &'static str {
        match self {
            Rule::Plurality => "plurality",
            Rule::Veto => "veto",
            Rule::KApproval(_) => "k-approval",
            Rule::KVeto(_) => "k-veto",
            Rule::Borda => "borda",
            Rule::Scoring(_) => "scoring",
            Rule::Bucklin => "bucklin",
            Rule::Maximin => "maximin",
            Rule::Copeland => "copeland",
        }
    }
}

/// Pairwise victory margins D(x, y) over a complete profile.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MarginMatrix {
    pub d: Vec<Vec<i64>>,
    pub n: usize,
}

impl MarginMatrix {
    pub fn get(&self, x: usize, y: usize) -> i64 {
        self.d[x][y]
    }

    pub fn m(&self) -> usize {
        self.d.len()
    }
}

/// Incremental tally: per-candidate position counts plus pairwise margins.
///
/// Supports winner evaluation for every rule without rescanning votes, which
/// keeps the oracle's extension enumeration cheap.
#[derive(Debug, Clone)]
pub struct Tally {
    m: usize,
    n: usize,
    /// pos_counts[c][p] = number of votes ranking c at 0-based position p.
    pos_counts: Vec<Vec<u32>>,
    /// margins[x][y] = D(x, y).
    margins: Vec<Vec<i64>>,
}

impl Tally {
    pub fn new(m: usize) -> Self {
        Tally {
            m,
            n: 0,
            pos_counts: vec![vec![0; m]; m],
            margins: vec![vec![0; m]; m],
        }
    }

    pub fn from_votes(m: usize, votes: &[LinearVote]) -> Self {
        let mut t = Tally::new(m);
        for v in votes {
            t.add_vote(v);
        }
        t
    }

    pub fn add_vote(&mut self, v: &LinearVote) {
        debug_assert_eq!(v.m(), self.m);
        self.n += 1;
        let r = v.ranking();
        for (p, &c) in r.iter().enumerate() {
            self.pos_counts[c][p] += 1;
            for &d in r.iter().skip(p + 1) {
                self.margins[c][d] += 1;
                self.margins[d][c] -= 1;
            }
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn margins(&self) -> MarginMatrix {
        MarginMatrix {
            d: self.margins.clone(),
            n: self.n,
        }
    }

    pub fn positional_scores(&self, sv: &ScoreVector) -> Result<Vec<i64>> {
        if sv.m() != self.m {
            return Err(Error::Dimension {
                expected: self.m,
                got: sv.m(),
            });
        }
        let alphas = sv.alphas();
        Ok((0..self.m)
            .map(|c| {
                (0..self.m)
                    .map(|p| alphas[p] * i64::from(self.pos_counts[c][p]))
                    .sum()
            })
            .collect())
    }

    /// Least level at which the candidate is ranked in the top positions by a
    /// strict majority; `m` is an upper bound whenever n ≥ 1.
    pub fn bucklin_scores(&self) -> Vec<i64> {
        let n = self.n as u64;
        (0..self.m)
            .map(|c| {
                let mut cum = 0u64;
                for l in 0..self.m {
                    cum += u64::from(self.pos_counts[c][l]);
                    if 2 * cum > n {
                        return (l + 1) as i64;
                    }
                }
                // No majority at any level (possible only when n = 0).
                (self.m + 1) as i64
            })
            .collect()
    }

    pub fn maximin_scores(&self) -> Vec<i64> {
        (0..self.m)
            .map(|x| {
                (0..self.m)
                    .filter(|&y| y != x)
                    .map(|y| self.margins[x][y])
                    .min()
                    .unwrap_or(0)
            })
            .collect()
    }

    pub fn copeland_scores(&self) -> Vec<i64> {
        (0..self.m)
            .map(|x| {
                (0..self.m)
                    .filter(|&y| y != x && self.margins[x][y] > 0)
                    .count() as i64
            })
            .collect()
    }

    pub fn rule_scores(&self, rule: &Rule) -> Result<Vec<i64>> {
        match rule.score_vector(self.m)? {
            Some(sv) => self.positional_scores(&sv),
            None => Ok(match rule {
                Rule::Bucklin => self.bucklin_scores(),
                Rule::Maximin => self.maximin_scores(),
                Rule::Copeland => self.copeland_scores(),
                _ => unreachable!("positional rules handled above"),
            }),
        }
    }

    /// The strictly best candidate under the rule, or `None` on a tie or an
    /// empty profile.
    pub fn unique_winner(&self, rule: &Rule) -> Result<Option<usize>> {
        if self.n == 0 {
            return Ok(None);
        }
        if self.m == 1 {
            return Ok(Some(0));
        }
        let scores = self.rule_scores(rule)?;
        let better = |a: i64, b: i64| {
            if rule.higher_is_better() {
                a > b
            } else {
                a < b
            }
        };
        let mut best = 0usize;
        for c in 1..self.m {
            if better(scores[c], scores[best]) {
                best = c;
            }
        }
        for c in 0..self.m {
            if c != best && !better(scores[best], scores[c]) {
                return Ok(None);
            }
        }
        Ok(Some(best))
    }
}

/// Positional scores of a complete profile under `sv`.
pub fn positional_scores(sv: &ScoreVector, p: &Profile) -> Result<Vec<i64>> {
    Tally::from_votes(p.m(), &p.votes).positional_scores(sv)
}

/// Pairwise victory margins of a complete profile.
pub fn margins(p: &Profile) -> MarginMatrix {
    Tally::from_votes(p.m(), &p.votes).margins()
}

/// Scores of every candidate under `rule`.
pub fn rule_scores(rule: &Rule, p: &Profile) -> Result<Vec<i64>> {
    Tally::from_votes(p.m(), &p.votes).rule_scores(rule)
}

/// The unique winner of a complete profile, if any.
pub fn unique_winner(rule: &Rule, p: &Profile) -> Result<Option<usize>> {
    Tally::from_votes(p.m(), &p.votes).unique_winner(rule)
}
