//! Brute-force supremum oracles over refining grids of full-support priors.
//!
//! At depth `d` the grid holds every prior with masses in multiples of
//! `1/2^d`, blended with the uniform prior at weight `16^-d` so that every
//! point has full support. Values are computed directly from the
//! definitions, without the closed forms under test.

#![allow(dead_code)]

use qif::{Channel, Label, Prior, Rational};

/// All ways to write `total` as an ordered sum of `parts` non-negative
/// integers.
pub fn compositions(total: u32, parts: usize) -> Vec<Vec<u32>> {
    if parts == 1 {
        return vec![vec![total]];
    }
    let mut out = Vec::new();
    for first in 0..=total {
        for mut rest in compositions(total - first, parts - 1) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

/// A small exact fraction. Grid values have bounded denominators, so
/// checked `i128` arithmetic is enough and keeps the oracle independent of
/// the crate's own rational type.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Frac {
    n: i128,
    d: i128,
}

fn gcd(mut a: i128, mut b: i128) -> i128 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a.abs()
}

impl Frac {
    pub fn new(n: i128, d: i128) -> Frac {
        assert!(d > 0);
        let g = gcd(n, d).max(1);
        Frac { n: n / g, d: d / g }
    }

    pub fn from_rational(r: &Rational) -> Frac {
        let (n, d) = r.to_string().split_once('/').map_or_else(
            || (r.to_string(), "1".to_string()),
            |(n, d)| (n.to_string(), d.to_string()),
        );
        Frac::new(n.parse().unwrap(), d.parse().unwrap())
    }

    pub fn to_rational(self) -> Rational {
        Rational::new(self.n.try_into().unwrap(), self.d.try_into().unwrap())
    }

    pub fn add(self, o: Frac) -> Frac {
        let n = self
            .n
            .checked_mul(o.d)
            .and_then(|a| o.n.checked_mul(self.d).and_then(|b| a.checked_add(b)));
        Frac::new(
            n.expect("grid overflow"),
            self.d.checked_mul(o.d).expect("grid overflow"),
        )
    }

    pub fn mul(self, o: Frac) -> Frac {
        let a = Frac::new(self.n, o.d);
        let b = Frac::new(o.n, self.d);
        Frac::new(
            a.n.checked_mul(b.n).expect("grid overflow"),
            a.d.checked_mul(b.d).expect("grid overflow"),
        )
    }

    pub fn div(self, o: Frac) -> Frac {
        assert!(o.n > 0);
        self.mul(Frac::new(o.d, o.n))
    }

    pub fn is_positive(self) -> bool {
        self.n > 0
    }
}

impl PartialOrd for Frac {
    fn partial_cmp(&self, o: &Frac) -> Option<std::cmp::Ordering> {
        Some(self.cmp(o))
    }
}

impl Ord for Frac {
    fn cmp(&self, o: &Frac) -> std::cmp::Ordering {
        let l = self.n.checked_mul(o.d).expect("grid overflow");
        let r = o.n.checked_mul(self.d).expect("grid overflow");
        l.cmp(&r)
    }
}

const ZERO: Frac = Frac { n: 0, d: 1 };

/// Masses of every grid prior of depth `depth` on `n` secrets.
pub fn grid_masses(n: usize, depth: u32) -> Vec<Vec<Frac>> {
    let steps = 1i128 << depth;
    let blend = Frac::new(1, 16i128.pow(depth));
    let keep = Frac::new(blend.d - 1, blend.d);
    let uniform_part = blend.div(Frac::new(n as i128, 1));
    compositions(steps as u32, n)
        .into_iter()
        .map(|point| {
            point
                .iter()
                .map(|&k| keep.mul(Frac::new(k as i128, steps)).add(uniform_part))
                .collect()
        })
        .collect()
}

pub fn grid_priors(labels: &[Label], depth: u32) -> Vec<Prior> {
    grid_masses(labels.len(), depth)
        .into_iter()
        .map(|m| {
            let masses = m.into_iter().map(Frac::to_rational).collect();
            Prior::new(labels.to_vec(), masses).expect("grid point is a distribution")
        })
        .collect()
}

pub fn matrix(c: &Channel) -> Vec<Vec<Frac>> {
    c.rows()
        .iter()
        .map(|r| r.iter().map(Frac::from_rational).collect())
        .collect()
}

/// `max δ^y_x / π_x` over `J[x][y] > 0`, straight from the definition.
pub fn lift_by_definition(pi: &[Frac], c: &[Vec<Frac>]) -> Frac {
    let cols = c[0].len();
    let p: Vec<Frac> = (0..cols)
        .map(|y| {
            pi.iter()
                .zip(c)
                .fold(ZERO, |acc, (m, row)| acc.add(m.mul(row[y])))
        })
        .collect();
    let mut best = ZERO;
    for (x, row) in c.iter().enumerate() {
        for (y, p_y) in p.iter().enumerate() {
            let joint = pi[x].mul(row[y]);
            if joint.is_positive() {
                let ratio = joint.div(*p_y).div(pi[x]);
                best = best.max(ratio);
            }
        }
    }
    best
}

/// `Σ_y max_x π_x C[x][y] / max_x π_x`, the identity-gain leakage.
pub fn gid_leakage_by_definition(pi: &[Frac], c: &[Vec<Frac>]) -> Frac {
    let cols = c[0].len();
    let posterior = (0..cols)
        .map(|y| {
            pi.iter()
                .zip(c)
                .map(|(m, row)| m.mul(row[y]))
                .max()
                .unwrap()
        })
        .fold(ZERO, Frac::add);
    posterior.div(*pi.iter().max().unwrap())
}

pub fn lift_grid_sup(c: &Channel, depth: u32) -> Rational {
    let m = matrix(c);
    grid_masses(c.n_secrets(), depth)
        .iter()
        .map(|pi| lift_by_definition(pi, &m))
        .max()
        .unwrap()
        .to_rational()
}

pub fn gid_leakage_grid_sup(c: &Channel, depth: u32) -> Rational {
    let m = matrix(c);
    grid_masses(c.n_secrets(), depth)
        .iter()
        .map(|pi| gid_leakage_by_definition(pi, &m))
        .max()
        .unwrap()
        .to_rational()
}
