//! Deterministic sequences with known autocorrelations: iterated
//! substitution rules, the sign sequences they generate, and the exact
//! rational recursions for their correlation coefficients.

use crate::comb::WeightedComb;
use crate::error::{invalid, Result};
use num_rational::Ratio;
use std::collections::{BTreeMap, HashMap};

type Rational = Ratio<i128>;

/// Symbol-to-word rule over a finite alphabet of chars.
#[derive(Debug, Clone)]
pub struct SubstitutionRule {
    images: BTreeMap<char, String>,
}

impl SubstitutionRule {
    pub fn new(images: &[(char, &str)]) -> Result<Self> {
        let map: BTreeMap<char, String> = images
            .iter()
            .map(|&(c, w)| (c, w.to_string()))
            .collect();
        if map.is_empty() {
            return Err(invalid("rule needs a nonempty alphabet"));
        }
        for (c, w) in &map {
            if w.is_empty() {
                return Err(invalid(format!("image of '{c}' is empty")));
            }
            if let Some(bad) = w.chars().find(|s| !map.contains_key(s)) {
                return Err(invalid(format!("image of '{c}' uses unknown symbol '{bad}'")));
            }
        }
        Ok(SubstitutionRule { images: map })
    }

    /// Doubling rule on signs: + maps to +-, - maps to -+.
    pub fn thue_morse() -> Self {
        SubstitutionRule::new(&[('+', "+-"), ('-', "-+")]).unwrap()
    }

    pub fn period_doubling() -> Self {
        SubstitutionRule::new(&[('a', "ab"), ('b', "aa")]).unwrap()
    }

    pub fn fibonacci() -> Self {
        SubstitutionRule::new(&[('a', "ab"), ('b', "a")]).unwrap()
    }

    /// Four-letter rule whose two-letter reduction (a, c positive) gives the
    /// same sequence as `rs_value` on the nonnegative half-line.
    pub fn rudin_shapiro_quaternary() -> Self {
        SubstitutionRule::new(&[('a', "ac"), ('b', "dc"), ('c', "ab"), ('d', "db")]).unwrap()
    }

    pub fn alphabet(&self) -> impl Iterator<Item = char> + '_ {
        self.images.keys().copied()
    }

    pub fn apply(&self, word: &str) -> Result<String> {
        let mut out = String::with_capacity(2 * word.len());
        for c in word.chars() {
            match self.images.get(&c) {
                Some(w) => out.push_str(w),
                None => return Err(invalid(format!("symbol '{c}' outside alphabet"))),
            }
        }
        Ok(out)
    }

    pub fn substitute(&self, seed: &str, steps: usize) -> Result<String> {
        if let Some(bad) = seed.chars().find(|s| !self.images.contains_key(s)) {
            return Err(invalid(format!("symbol '{bad}' outside alphabet")));
        }
        let mut word = seed.to_string();
        for _ in 0..steps {
            word = self.apply(&word)?;
        }
        Ok(word)
    }

    /// Primitivity via positivity of a power of the substitution matrix
    /// (Wielandt exponent (d-1)^2 + 1 suffices for a d-letter alphabet).
    pub fn is_primitive(&self) -> bool {
        let letters: Vec<char> = self.alphabet().collect();
        let d = letters.len();
        let index: BTreeMap<char, usize> = letters.iter().enumerate().map(|(i, &c)| (c, i)).collect();
        let mut m = vec![vec![0u64; d]; d];
        for (j, &c) in letters.iter().enumerate() {
            for s in self.images[&c].chars() {
                m[index[&s]][j] += 1;
            }
        }
        // Track positivity only, so the powers cannot overflow.
        let mut power = m.clone();
        for _ in 0..(d - 1) * (d - 1) + 1 {
            if power.iter().all(|row| row.iter().all(|&e| e > 0)) {
                return true;
            }
            let mut next = vec![vec![0u64; d]; d];
            for i in 0..d {
                for l in 0..d {
                    if power[i][l] > 0 {
                        for j in 0..d {
                            next[i][j] |= m[l][j].min(1);
                        }
                    }
                }
            }
            power = next;
        }
        false
    }
}

/// Map a word to signs: symbols in `positive` become +1, the rest -1.
pub fn reduce_signs(word: &str, positive: &str) -> Vec<i8> {
    word.chars()
        .map(|c| if positive.contains(c) { 1 } else { -1 })
        .collect()
}

/// Parity of the binary digit sum of i.
pub fn tm_value(i: u64) -> i8 {
    if i.count_ones() % 2 == 0 {
        1
    } else {
        -1
    }
}

/// Two-sided extension mirrored at -1/2, the fixed point of the squared
/// doubling rule with legal seed value 1 at both -1 and 0.
pub fn tm_two_sided(i: i64) -> i8 {
    if i >= 0 {
        tm_value(i as u64)
    } else {
        tm_value((-i - 1) as u64)
    }
}

/// Autocorrelation coefficients of the balanced doubling sequence as exact
/// rationals, from the pair of scaling relations
/// eta(2m) = eta(m), eta(2m+1) = -(eta(m) + eta(m+1))/2 with eta(0) = 1.
#[derive(Debug, Default)]
pub struct TmAutocorrelation {
    memo: HashMap<u64, Rational>,
}

impl TmAutocorrelation {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn eta(&mut self, m: i64) -> Rational {
        // Coefficients of a real sequence are even in the lag.
        self.eta_abs(m.unsigned_abs())
    }

    fn eta_abs(&mut self, m: u64) -> Rational {
        if m == 0 {
            return Rational::from_integer(1);
        }
        if m == 1 {
            // The odd relation at m = 0 references eta(1) on both sides;
            // solving (1 + 1/2) eta(1) = -1/2 gives -1/3.
            return Rational::new(-1, 3);
        }
        if let Some(&v) = self.memo.get(&m) {
            return v;
        }
        let v = if m % 2 == 0 {
            self.eta_abs(m / 2)
        } else {
            let half = (m - 1) / 2;
            -(self.eta_abs(half) + self.eta_abs(half + 1)) / 2
        };
        self.memo.insert(m, v);
        v
    }

    pub fn eta_f64(&mut self, m: i64) -> f64 {
        let r = self.eta(m);
        *r.numer() as f64 / *r.denom() as f64
    }

    /// Exact quadratic sum over lags |m| <= n.
    pub fn sigma(&mut self, n: u64) -> Rational {
        let mut acc = Rational::from_integer(1);
        for m in 1..=n {
            let e = self.eta_abs(m);
            acc += e * e * 2;
        }
        acc
    }

    pub fn coefficients(&mut self, max_lag: u64) -> Vec<f64> {
        (0..=max_lag).map(|m| self.eta_f64(m as i64)).collect()
    }
}

/// The sign at n of the doubly infinite sequence fixed by
/// w(4n) = w(4n+1) = w(n), w(4n+l) = (-1)^(n+l) w(n) for l in {2, 3},
/// with w(-1) = -1 and w(0) = 1. Euclidean division keeps the remainder in
/// {0..3} for negative n, and the reduced index shrinks toward the bases.
pub fn rs_value(n: i64) -> i8 {
    match n {
        0 => 1,
        -1 => -1,
        _ => {
            let q = n.div_euclid(4);
            let l = n.rem_euclid(4);
            let w = rs_value(q);
            if l < 2 {
                w
            } else if (q + l) % 2 == 0 {
                w
            } else {
                -w
            }
        }
    }
}

/// Plain and sign-twisted correlation coefficients of `rs_value`, evaluated
/// jointly through their closed recursion system in exact rationals.
/// The system forces eta(m) = 1 at m = 0 and 0 elsewhere, and theta = 0
/// everywhere; callers get the computed values, not that conclusion.
#[derive(Debug, Default)]
pub struct RsCorrelations {
    memo: HashMap<i64, (Rational, Rational)>,
}

impl RsCorrelations {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn eta_theta(&mut self, m: i64) -> (Rational, Rational) {
        if let Some(&v) = self.memo.get(&m) {
            return v;
        }
        let value = self.evaluate(m);
        self.memo.insert(m, value);
        value
    }

    fn evaluate(&mut self, m: i64) -> (Rational, Rational) {
        let zero = || Rational::from_integer(0);
        if m == 0 {
            return (Rational::from_integer(1), zero());
        }
        if m == 1 || m == -1 {
            // Both rows at the reduced index reference theta(m) itself with
            // coefficient 1/4; eliminating it leaves (3/4) theta(m) = 0, and
            // the eta row then evaluates to zero as well.
            return (zero(), zero());
        }
        let q = m.div_euclid(4);
        let l = m.rem_euclid(4);
        let s = if q % 2 == 0 { 1i128 } else { -1 };
        let sign = Rational::from_integer(s);
        let quarter = Rational::new(1, 4);
        let (eta_q, theta_q) = self.eta_theta(q);
        let (eta_q1, theta_q1) = self.eta_theta(q + 1);
        match l {
            0 => (
                Rational::new(1 + s, 2) * eta_q,
                zero(),
            ),
            1 => (
                Rational::new(1 - s, 4) * eta_q + sign * quarter * theta_q - quarter * theta_q1,
                Rational::new(1 - s, 4) * eta_q - sign * quarter * theta_q + quarter * theta_q1,
            ),
            2 => (
                zero(),
                sign * Rational::new(1, 2) * theta_q + Rational::new(1, 2) * theta_q1,
            ),
            _ => (
                Rational::new(1 + s, 4) * eta_q1 - sign * quarter * theta_q + quarter * theta_q1,
                -Rational::new(1 + s, 4) * eta_q1 - sign * quarter * theta_q + quarter * theta_q1,
            ),
        }
    }
}

/// Two-letter recoding that halves the fibre: unequal neighbours map to 'a',
/// equal neighbours to 'b'. Output is one shorter than the input.
pub fn pd_block_map(signs: &[i8]) -> Result<String> {
    if signs.len() < 2 {
        return Err(invalid("block map needs at least two symbols"));
    }
    Ok(signs
        .windows(2)
        .map(|p| if p[0] != p[1] { 'a' } else { 'b' })
        .collect())
}

pub const GOLDEN_RATIO: f64 = 1.618033988749894848;
pub const SQRT5: f64 = 2.23606797749978969;

/// Geometric realization of the two-interval chain: 'a' spans the golden
/// ratio, 'b' spans 1, left endpoints from 0.
#[derive(Debug, Clone)]
pub struct FibonacciChain {
    word: String,
    endpoints: Vec<f64>,
    total_length: f64,
}

impl FibonacciChain {
    pub fn new(steps: usize) -> Result<Self> {
        if steps == 0 {
            return Err(invalid("need at least one substitution step"));
        }
        let word = SubstitutionRule::fibonacci().substitute("a", steps)?;
        Ok(FibonacciChain::from_word(word))
    }

    pub fn from_word(word: String) -> Self {
        let mut endpoints = Vec::with_capacity(word.len());
        // Endpoints as integer combinations of the two lengths, so each is
        // one rounding away from exact no matter how long the chain gets.
        let (mut na, mut nb) = (0u64, 0u64);
        for c in word.chars() {
            endpoints.push(na as f64 * GOLDEN_RATIO + nb as f64);
            if c == 'a' {
                na += 1;
            } else {
                nb += 1;
            }
        }
        let total_length = na as f64 * GOLDEN_RATIO + nb as f64;
        FibonacciChain {
            word,
            endpoints,
            total_length,
        }
    }

    pub fn word(&self) -> &str {
        &self.word
    }

    pub fn endpoints(&self) -> &[f64] {
        &self.endpoints
    }

    pub fn point_count(&self) -> usize {
        self.endpoints.len()
    }

    pub fn total_length(&self) -> f64 {
        self.total_length
    }

    pub fn density(&self) -> f64 {
        self.point_count() as f64 / self.total_length
    }

    /// Unit-weight comb recentered so the window is symmetric around 0.
    pub fn to_comb(&self) -> Result<WeightedComb> {
        let half = self.total_length / 2.0;
        let positions = self.endpoints.iter().map(|&x| x - half).collect();
        WeightedComb::unit(positions, half)
    }
}

/// Bragg peak of the perfect chain indexed by integers (a, b):
/// position k = (a + b tau) / sqrt(5), intensity from the sinc-squared
/// closed form in the conjugate coordinate k* = -(a + b (1 - tau)) / sqrt(5).
pub fn fibonacci_bragg(a: i64, b: i64) -> (f64, f64) {
    let tau = GOLDEN_RATIO;
    let k = (a as f64 + b as f64 * tau) / SQRT5;
    let k_star = -(a as f64 + b as f64 * (1.0 - tau)) / SQRT5;
    let amp = tau / SQRT5;
    let x = std::f64::consts::PI * tau * k_star;
    let sinc = if x.abs() < 1e-12 { 1.0 } else { x.sin() / x };
    (k, (amp * sinc) * (amp * sinc))
}
