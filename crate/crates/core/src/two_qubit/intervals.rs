//! Closed subsets of the real line cut out by univariate quadratic inequalities.

/// `c2 x² + c1 x + c0 ≥ 0`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Quadratic {
    pub c2: f64,
    pub c1: f64,
    pub c0: f64,
}

impl Quadratic {
    pub fn new(c2: f64, c1: f64, c0: f64) -> Self {
        Quadratic { c2, c1, c0 }
    }

    /// `sign · (u + v x) ≤ 0`, rewritten as `-sign·v x - sign·u ≥ 0`.
    pub fn linear_nonpositive(sign: f64, u: f64, v: f64) -> Self {
        Quadratic::new(0.0, -sign * v, -sign * u)
    }

    pub fn eval(&self, x: f64) -> f64 {
        (self.c2 * x + self.c1) * x + self.c0
    }

    fn magnitude(&self) -> f64 {
        self.c2.abs() + self.c1.abs() + self.c0.abs()
    }

    /// Real roots of the boundary `q(x) = -slack`, ascending.
    pub fn boundary_roots(&self, slack: f64) -> Vec<f64> {
        let (a, b, c) = (self.c2, self.c1, self.c0 + slack);
        let mag = self.magnitude().max(f64::MIN_POSITIVE);
        if a.abs() <= 1e-14 * mag {
            if b.abs() <= 1e-14 * mag {
                return Vec::new();
            }
            return vec![-c / b];
        }
        let mut disc = b * b - 4.0 * a * c;
        // a double root perturbed by rounding stays a double root
        if disc < 0.0 {
            if disc < -1e-12 * (b * b + (4.0 * a * c).abs()) {
                return Vec::new();
            }
            disc = 0.0;
        }
        let sq = disc.sqrt();
        // stable form avoiding cancellation
        let q = -0.5 * (b + b.signum() * sq);
        let (r1, r2) = if q == 0.0 { (0.0, 0.0) } else { (q / a, c / q) };
        if r1 <= r2 {
            vec![r1, r2]
        } else {
            vec![r2, r1]
        }
    }

    /// The slack used when solving: a relative `1e-12` of the coefficient size.
    pub fn default_slack(&self) -> f64 {
        1e-12 * (1.0 + self.magnitude())
    }

    /// `{x : q(x) ≥ -slack}`.
    pub fn solution_set(&self, slack: f64) -> IntervalSet {
        let mag = self.magnitude().max(f64::MIN_POSITIVE);
        let (a, b, c) = (self.c2, self.c1, self.c0 + slack);
        if a.abs() <= 1e-14 * mag {
            if b.abs() <= 1e-14 * mag {
                return if c >= 0.0 { IntervalSet::all() } else { IntervalSet::empty() };
            }
            let root = -c / b;
            return if b > 0.0 {
                IntervalSet::single(root, f64::INFINITY)
            } else {
                IntervalSet::single(f64::NEG_INFINITY, root)
            };
        }
        let roots = self.boundary_roots(slack);
        match (a > 0.0, roots.as_slice()) {
            (true, [r1, r2]) => IntervalSet::from_sorted(vec![
                (f64::NEG_INFINITY, *r1),
                (*r2, f64::INFINITY),
            ]),
            (true, _) => IntervalSet::all(),
            (false, [r1, r2]) => IntervalSet::single(*r1, *r2),
            (false, _) => IntervalSet::empty(),
        }
    }
}

/// A finite union of disjoint closed intervals, sorted, endpoints may be infinite.
#[derive(Clone, Debug, PartialEq)]
pub struct IntervalSet(Vec<(f64, f64)>);

impl IntervalSet {
    pub fn all() -> Self {
        IntervalSet(vec![(f64::NEG_INFINITY, f64::INFINITY)])
    }

    pub fn empty() -> Self {
        IntervalSet(Vec::new())
    }

    pub fn single(lo: f64, hi: f64) -> Self {
        if lo <= hi {
            IntervalSet(vec![(lo, hi)])
        } else {
            IntervalSet::empty()
        }
    }

    fn from_sorted(mut parts: Vec<(f64, f64)>) -> Self {
        parts.retain(|(lo, hi)| lo <= hi);
        let mut merged: Vec<(f64, f64)> = Vec::with_capacity(parts.len());
        for (lo, hi) in parts {
            match merged.last_mut() {
                Some(last) if lo <= last.1 => last.1 = last.1.max(hi),
                _ => merged.push((lo, hi)),
            }
        }
        IntervalSet(merged)
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn intervals(&self) -> &[(f64, f64)] {
        &self.0
    }

    pub fn contains(&self, x: f64) -> bool {
        self.0.iter().any(|&(lo, hi)| lo <= x && x <= hi)
    }

    pub fn intersect(&self, other: &IntervalSet) -> IntervalSet {
        let mut out = Vec::new();
        let (mut i, mut j) = (0, 0);
        while i < self.0.len() && j < other.0.len() {
            let (a_lo, a_hi) = self.0[i];
            let (b_lo, b_hi) = other.0[j];
            let lo = a_lo.max(b_lo);
            let hi = a_hi.min(b_hi);
            if lo <= hi {
                out.push((lo, hi));
            }
            if a_hi < b_hi {
                i += 1;
            } else {
                j += 1;
            }
        }
        IntervalSet(out)
    }

    /// One representative point per interval: the midpoint when finite,
    /// otherwise a point one unit inside the finite end (or `0` for the line).
    pub fn representatives(&self) -> Vec<f64> {
        self.0
            .iter()
            .map(|&(lo, hi)| match (lo.is_finite(), hi.is_finite()) {
                (true, true) => 0.5 * (lo + hi),
                (true, false) => lo + 1.0,
                (false, true) => hi - 1.0,
                (false, false) => 0.0,
            })
            .collect()
    }

    /// Representatives followed by the finite interval endpoints, where
    /// tangent constraints leave the only feasible points.
    pub fn candidates(&self) -> Vec<f64> {
        let mut out = self.representatives();
        for &(lo, hi) in &self.0 {
            out.extend([lo, hi].into_iter().filter(|v| v.is_finite()));
        }
        out
    }
}

/// Intersection of the solution sets of all `constraints`.
pub fn feasible_set(constraints: &[Quadratic]) -> IntervalSet {
    let mut set = IntervalSet::all();
    for q in constraints {
        set = set.intersect(&q.solution_set(q.default_slack()));
        if set.is_empty() {
            break;
        }
    }
    set
}
