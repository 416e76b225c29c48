//! Brute-force reference implementations, compiled only with the `oracles`
//! feature. They share no code with the production paths they check.

use rand::Rng;

use crate::aiml::{Category, PatternExpr, PatternToken};

type Step = (u8, usize);
type Span = (usize, usize);

/// Every way `pattern` can cover `input` exactly, as (priority key, spans).
/// Key steps are (rank, length): `_`=0, word=1, `*`=2.
pub fn alignments(pattern: &[PatternToken], input: &[String]) -> Vec<(Vec<Step>, Vec<Span>)> {
    fn go(
        pattern: &[PatternToken],
        input: &[String],
        pos: usize,
        key: &mut Vec<Step>,
        spans: &mut Vec<Span>,
        out: &mut Vec<(Vec<Step>, Vec<Span>)>,
    ) {
        let Some((head, rest)) = pattern.split_first() else {
            if pos == input.len() {
                out.push((key.clone(), spans.clone()));
            }
            return;
        };
        match head {
            PatternToken::Word(w) => {
                if input.get(pos) == Some(w) {
                    key.push((1, 1));
                    go(rest, input, pos + 1, key, spans, out);
                    key.pop();
                }
            }
            PatternToken::Underscore | PatternToken::Star => {
                let rank = if *head == PatternToken::Underscore { 0 } else { 2 };
                for len in 1..=input.len().saturating_sub(pos) {
                    key.push((rank, len));
                    spans.push((pos, pos + len));
                    go(rest, input, pos + len, key, spans, out);
                    spans.pop();
                    key.pop();
                }
            }
        }
    }
    let mut out = Vec::new();
    go(pattern, input, 0, &mut Vec::new(), &mut Vec::new(), &mut out);
    out
}

fn best(mut all: Vec<(Vec<Step>, Vec<Span>)>) -> Option<(Vec<Step>, Vec<Span>)> {
    all.sort();
    all.into_iter().next()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleMatch {
    pub rank: usize,
    pub stars: Vec<String>,
    pub that_stars: Vec<String>,
}

/// Tries every category (in file order) against the input and picks the
/// minimum of (pattern key, has-no-that, that key, file rank).
pub fn brute_force_match(categories: &[Category], input: &[String], that: &[String]) -> Option<OracleMatch> {
    let join = |toks: &[String], spans: &[Span]| -> Vec<String> {
        spans.iter().map(|&(s, e)| toks[s..e].join(" ")).collect()
    };
    let mut candidates = Vec::new();
    for (rank, cat) in categories.iter().enumerate() {
        let Some((pkey, pspans)) = best(alignments(cat.pattern.tokens(), input)) else {
            continue;
        };
        let (class, tkey, tspans) = match &cat.that {
            None => (1u8, Vec::new(), Vec::new()),
            Some(tp) => {
                if that.is_empty() {
                    continue;
                }
                match best(alignments(tp.tokens(), that)) {
                    Some((k, s)) => (0u8, k, s),
                    None => continue,
                }
            }
        };
        candidates.push(((pkey, class, tkey, rank), (pspans, tspans)));
    }
    candidates.sort_by(|a, b| a.0.cmp(&b.0));
    candidates.into_iter().next().map(|((_, _, _, rank), (ps, ts))| OracleMatch {
        rank,
        stars: join(input, &ps),
        that_stars: join(that, &ts),
    })
}

/// Least squares via the 2x2 normal equations solved by Cramer's rule:
/// returns (slope, intercept, mse, r2).
pub fn normal_equations_fit(points: &[(f64, f64)]) -> (f64, f64, f64, f64) {
    let n = points.len() as f64;
    let sx: f64 = points.iter().map(|p| p.0).sum();
    let sy: f64 = points.iter().map(|p| p.1).sum();
    let sxx: f64 = points.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = points.iter().map(|p| p.0 * p.1).sum();
    // [n  sx ] [b]   [sy ]
    // [sx sxx] [m] = [sxy]
    let det = n * sxx - sx * sx;
    let intercept = (sy * sxx - sx * sxy) / det;
    let slope = (n * sxy - sx * sy) / det;
    let mean_y = sy / n;
    let mut ss_res = 0.0;
    let mut ss_tot = 0.0;
    for &(x, y) in points {
        let r = y - (intercept + slope * x);
        ss_res += r * r;
        ss_tot += (y - mean_y) * (y - mean_y);
    }
    let r2 = if ss_tot == 0.0 { 1.0 } else { 1.0 - ss_res / ss_tot };
    (slope, intercept, ss_res / n, r2)
}

fn sample_variance(values: &[f64]) -> f64 {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0)
}

/// Cronbach's alpha the way a spreadsheet computes it: VAR.S of each item
/// column, VAR.S of the row totals, then k/(k-1) * (1 - sum/total).
pub fn cronbach_direct(rows: &[Vec<f64>]) -> f64 {
    let k = rows[0].len();
    let item_var_sum: f64 = (0..k)
        .map(|j| sample_variance(&rows.iter().map(|r| r[j]).collect::<Vec<_>>()))
        .sum();
    let totals: Vec<f64> = rows.iter().map(|r| r.iter().sum()).collect();
    let kf = k as f64;
    kf / (kf - 1.0) * (1.0 - item_var_sum / sample_variance(&totals))
}

/// A random matcher test case: a small corpus over a tiny vocabulary (so
/// patterns collide often), an input and a that-context.
#[derive(Debug, Clone)]
pub struct MatchCase {
    pub categories: Vec<Category>,
    pub input: Vec<String>,
    pub that: Vec<String>,
}

const VOCAB: [&str; 3] = ["A", "B", "C"];

fn random_words<R: Rng>(rng: &mut R, len: usize) -> Vec<String> {
    (0..len).map(|_| VOCAB[rng.random_range(0..VOCAB.len())].to_string()).collect()
}

fn random_pattern<R: Rng>(rng: &mut R, max_len: usize) -> PatternExpr {
    let len = rng.random_range(1..=max_len);
    let tokens = (0..len)
        .map(|_| match rng.random_range(0..6) {
            0 => PatternToken::Underscore,
            1 | 2 => PatternToken::Star,
            _ => PatternToken::Word(VOCAB[rng.random_range(0..VOCAB.len())].to_string()),
        })
        .collect();
    PatternExpr::from_tokens(tokens).expect("non-empty")
}

pub fn random_match_case<R: Rng>(rng: &mut R) -> MatchCase {
    let n = rng.random_range(1..=50);
    let categories = (0..n)
        .map(|_| Category {
            pattern: random_pattern(rng, 4),
            that: rng.random_bool(0.5).then(|| random_pattern(rng, 3)),
            template: Default::default(),
        })
        .collect();
    let input_len = rng.random_range(1..=6);
    let that_len = rng.random_range(0..=4);
    MatchCase {
        categories,
        input: random_words(rng, input_len),
        that: random_words(rng, that_len),
    }
}
