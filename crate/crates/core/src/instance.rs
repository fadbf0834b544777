//! Instances, the Euclidean metric, and the radius-guessing loop.
//!
//! Every solver works at a fixed guessed radius `B`: distances are divided by
//! `B` so that the guess becomes 1, and the solver either returns a solution
//! whose scaled objective is at most `1 + √3` or certifies that the optimum
//! exceeds `B`. [`guess_loop`] binary-searches the finite candidate list.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// √3, the well-separation threshold and the ball radius used for absorbing clients.
pub const SQRT_3: f64 = 1.732_050_807_568_877_2;

/// Approximation factor guaranteed by both main solvers.
pub const APPROX_RATIO: f64 = 1.0 + SQRT_3;

/// Relative tolerance used for every threshold comparison.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tolerance(pub f64);

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance(1e-9)
    }
}

impl Tolerance {
    /// `value ≤ threshold`, up to a relative slack.
    #[inline]
    pub fn le(self, value: f64, threshold: f64) -> bool {
        value <= threshold + self.0 * threshold.abs()
    }

    /// `value > threshold`, strictly beyond the relative slack.
    #[inline]
    pub fn gt(self, value: f64, threshold: f64) -> bool {
        !self.le(value, threshold)
    }
}

/// A point in ℝ^s.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Point(pub Vec<f64>);

impl Point {
    pub fn new(coords: Vec<f64>) -> Self {
        Point(coords)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }
}

impl From<Vec<f64>> for Point {
    fn from(v: Vec<f64>) -> Self {
        Point(v)
    }
}

impl<const N: usize> From<[f64; N]> for Point {
    fn from(v: [f64; N]) -> Self {
        Point(v.to_vec())
    }
}

/// Euclidean distance between two points of equal dimension.
pub fn dist(a: &Point, b: &Point) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(Error::input(format!(
            "dimension mismatch: {} vs {}",
            a.dim(),
            b.dim()
        )));
    }
    Ok(euclid(a, b))
}

#[inline]
pub(crate) fn euclid(a: &Point, b: &Point) -> f64 {
    a.0.iter()
        .zip(&b.0)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// A k-supplier instance. Priorities default to 1 and `ell` (outlier budget) to 0.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Instance {
    pub suppliers: Vec<Point>,
    pub clients: Vec<Point>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub priorities: Option<Vec<f64>>,
    pub k: usize,
    #[serde(default)]
    pub ell: usize,
}

impl Instance {
    pub fn new(
        suppliers: Vec<Point>,
        clients: Vec<Point>,
        priorities: Option<Vec<f64>>,
        k: usize,
        ell: usize,
    ) -> Result<Self> {
        let inst = Instance {
            suppliers,
            clients,
            priorities,
            k,
            ell,
        };
        inst.validate()?;
        Ok(inst)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let inst: Instance =
            serde_json::from_str(text).map_err(|e| Error::input(format!("bad instance JSON: {e}")))?;
        inst.validate()?;
        Ok(inst)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("instance serializes")
    }

    /// Checks the structural invariants. `k = 0` is accepted here; the
    /// priority pipeline rejects it separately.
    pub fn validate(&self) -> Result<()> {
        let dim = self
            .suppliers
            .first()
            .or_else(|| self.clients.first())
            .map(Point::dim);
        if let Some(dim) = dim {
            if dim == 0 {
                return Err(Error::input("points must have dimension at least 1"));
            }
            for p in self.suppliers.iter().chain(&self.clients) {
                if p.dim() != dim {
                    return Err(Error::input(format!(
                        "dimension mismatch: expected {dim}, found {}",
                        p.dim()
                    )));
                }
                if p.0.iter().any(|c| !c.is_finite()) {
                    return Err(Error::input("non-finite coordinate"));
                }
            }
        }
        if let Some(p) = &self.priorities {
            if p.len() != self.clients.len() {
                return Err(Error::input(format!(
                    "{} priorities for {} clients",
                    p.len(),
                    self.clients.len()
                )));
            }
            if p.iter().any(|&x| !(x.is_finite() && x > 0.0)) {
                return Err(Error::input("priorities must be finite and positive"));
            }
        }
        if self.ell > self.clients.len() {
            return Err(Error::input(format!(
                "ell = {} exceeds the number of clients {}",
                self.ell,
                self.clients.len()
            )));
        }
        Ok(())
    }

    pub fn num_suppliers(&self) -> usize {
        self.suppliers.len()
    }

    pub fn num_clients(&self) -> usize {
        self.clients.len()
    }

    pub fn dim(&self) -> Option<usize> {
        self.suppliers
            .first()
            .or_else(|| self.clients.first())
            .map(Point::dim)
    }

    #[inline]
    pub fn priority(&self, client: usize) -> f64 {
        self.priorities.as_ref().map_or(1.0, |p| p[client])
    }

    /// Distance between client `j` and supplier `i`.
    #[inline]
    pub fn cs_dist(&self, j: usize, i: usize) -> f64 {
        euclid(&self.clients[j], &self.suppliers[i])
    }

    /// Distance between clients `a` and `b`.
    #[inline]
    pub fn cc_dist(&self, a: usize, b: usize) -> f64 {
        euclid(&self.clients[a], &self.clients[b])
    }

    /// Copy with every priority set to 1.
    pub fn without_priorities(&self) -> Instance {
        Instance {
            priorities: None,
            ..self.clone()
        }
    }

    /// `max_j p(j)·d(j, C)` over all clients; `∞` when `C` is empty and clients exist.
    pub fn priority_objective(&self, chosen: &[usize]) -> f64 {
        (0..self.num_clients())
            .map(|j| self.priority(j) * self.dist_to_set(j, chosen))
            .fold(0.0, f64::max)
    }

    /// `max_{j ∉ O} d(j, C)`, ignoring priorities.
    pub fn outlier_objective(&self, chosen: &[usize], outliers: &[usize]) -> f64 {
        let mut is_out = vec![false; self.num_clients()];
        for &o in outliers {
            is_out[o] = true;
        }
        (0..self.num_clients())
            .filter(|&j| !is_out[j])
            .map(|j| self.dist_to_set(j, chosen))
            .fold(0.0, f64::max)
    }

    /// `d(j, C)`, with `∞` for an empty set.
    pub fn dist_to_set(&self, j: usize, chosen: &[usize]) -> f64 {
        chosen
            .iter()
            .map(|&i| self.cs_dist(j, i))
            .fold(f64::INFINITY, f64::min)
    }
}

impl fmt::Display for Instance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "instance(|I|={}, |J|={}, k={}, ell={})",
            self.num_suppliers(),
            self.num_clients(),
            self.k,
            self.ell
        )
    }
}

/// An instance viewed at a guessed radius `B`: every distance query returns `d/B`.
///
/// `B = 0` is allowed so that instances with optimum 0 are solved exactly; in
/// that case the scaled distance is 0 for coincident points and `∞` otherwise.
#[derive(Clone, Copy, Debug)]
pub struct ScaledInstance<'a> {
    pub base: &'a Instance,
    pub radius: f64,
    pub tol: Tolerance,
}

impl<'a> ScaledInstance<'a> {
    pub fn new(base: &'a Instance, radius: f64, tol: Tolerance) -> Result<Self> {
        if !(radius.is_finite() && radius >= 0.0) {
            return Err(Error::input(format!("radius must be finite and >= 0, got {radius}")));
        }
        Ok(ScaledInstance { base, radius, tol })
    }

    #[inline]
    fn scale(&self, d: f64) -> f64 {
        if self.radius > 0.0 {
            d / self.radius
        } else if d == 0.0 {
            0.0
        } else {
            f64::INFINITY
        }
    }

    /// Scaled client–supplier distance.
    #[inline]
    pub fn cs(&self, j: usize, i: usize) -> f64 {
        self.scale(self.base.cs_dist(j, i))
    }

    /// Scaled client–client distance.
    #[inline]
    pub fn cc(&self, a: usize, b: usize) -> f64 {
        self.scale(self.base.cc_dist(a, b))
    }

    #[inline]
    pub fn priority(&self, j: usize) -> f64 {
        self.base.priority(j)
    }

    /// Supplier `i` can serve client `j` within scaled distance 1 (the `i ∼ j` relation).
    #[inline]
    pub fn serves(&self, i: usize, j: usize) -> bool {
        self.tol.le(self.cs(j, i), 1.0)
    }

    pub fn num_suppliers(&self) -> usize {
        self.base.num_suppliers()
    }

    pub fn num_clients(&self) -> usize {
        self.base.num_clients()
    }

    pub fn k(&self) -> usize {
        self.base.k
    }

    pub fn ell(&self) -> usize {
        self.base.ell
    }
}

/// All distinct values `p(v)·d(v, i)` (or `d(v, i)`), ascending.
///
/// The optimum of the priority problem is always one of these values. The
/// list contains 0 when some client coincides with a supplier.
pub fn candidate_radii(inst: &Instance, priority_weighted: bool) -> Result<Vec<f64>> {
    if inst.suppliers.is_empty() || inst.clients.is_empty() {
        return Err(Error::input("candidate radii need at least one supplier and one client"));
    }
    let mut out = Vec::with_capacity(inst.num_clients() * inst.num_suppliers());
    for j in 0..inst.num_clients() {
        let p = if priority_weighted { inst.priority(j) } else { 1.0 };
        for i in 0..inst.num_suppliers() {
            out.push(p * inst.cs_dist(j, i));
        }
    }
    out.sort_by(f64::total_cmp);
    out.dedup();
    Ok(out)
}

/// Result of [`guess_loop`].
#[derive(Clone, Debug)]
pub struct Guess<S> {
    /// The smallest radius at which the solver succeeded (for a monotone solver).
    pub radius: f64,
    pub solution: S,
    /// Every radius probed, with the solver verdict, in probing order.
    pub probes: Vec<(f64, bool)>,
}

/// Binary search over `radii` (ascending) for the smallest guess the solver accepts.
///
/// The returned radius `r` is accepted and, unless it is the first candidate, its
/// predecessor was rejected. As solvers of this crate never reject a radius at
/// least the optimum, `r ≤ OPT` whenever the optimum is in `radii`, even if
/// the solver is not monotone below the optimum.
pub fn guess_loop<S, F>(inst: &Instance, radii: &[f64], tol: Tolerance, mut solver: F) -> Result<Guess<S>>
where
    F: FnMut(&ScaledInstance<'_>) -> Result<Option<S>>,
{
    if radii.is_empty() {
        return Err(Error::input("no candidate radii"));
    }
    let mut probes = Vec::new();
    let mut run = |idx: usize, probes: &mut Vec<(f64, bool)>| -> Result<Option<S>> {
        let scaled = ScaledInstance::new(inst, radii[idx], tol)?;
        let out = solver(&scaled)?;
        probes.push((radii[idx], out.is_some()));
        Ok(out)
    };

    let last = radii.len() - 1;
    let Some(mut best) = run(last, &mut probes)? else {
        return Err(Error::Infeasible(format!(
            "solver rejects the largest candidate radius {}",
            radii[last]
        )));
    };
    // Invariant: radii[hi] accepted; every index < lo known rejected or lo == 0.
    let (mut lo, mut hi) = (0usize, last);
    while lo < hi {
        let mid = lo + (hi - lo) / 2;
        match run(mid, &mut probes)? {
            Some(sol) => {
                best = sol;
                hi = mid;
            }
            None => lo = mid + 1,
        }
    }
    Ok(Guess {
        radius: radii[hi],
        solution: best,
        probes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn pts(v: &[&[f64]]) -> Vec<Point> {
        v.iter().map(|c| Point(c.to_vec())).collect()
    }

    #[test]
    fn dist_examples() {
        assert_eq!(dist(&Point::from([0.0, 0.0]), &Point::from([3.0, 4.0])).unwrap(), 5.0);
        assert_eq!(dist(&Point::from([1.0, 1.0]), &Point::from([1.0, 1.0])).unwrap(), 0.0);
        assert!(dist(&Point::from([1.0]), &Point::from([1.0, 2.0])).is_err());
    }

    #[test]
    fn adjacent_polygon_vertices_at_unit_side() {
        for n in 3..20 {
            let r = 1.0 / (2.0 * (std::f64::consts::PI / n as f64).sin());
            let v = |t: usize| {
                let a = 2.0 * std::f64::consts::PI * t as f64 / n as f64;
                Point::from([r * a.cos(), r * a.sin()])
            };
            for t in 0..n {
                let d = dist(&v(t), &v((t + 1) % n)).unwrap();
                assert!((d - 1.0).abs() < 1e-12, "n={n} t={t} d={d}");
            }
        }
    }

    #[test]
    fn dist_is_symmetric() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..100 {
            let a = Point((0..3).map(|_| rng.gen_range(-5.0..5.0)).collect());
            let b = Point((0..3).map(|_| rng.gen_range(-5.0..5.0)).collect());
            assert_eq!(dist(&a, &b).unwrap(), dist(&b, &a).unwrap());
        }
    }

    #[test]
    fn candidate_radii_examples() {
        let inst = Instance::new(
            pts(&[&[0.0, 0.0]]),
            pts(&[&[1.0, 0.0], &[2.0, 0.0]]),
            Some(vec![1.0, 1.0]),
            1,
            0,
        )
        .unwrap();
        assert_eq!(candidate_radii(&inst, true).unwrap(), vec![1.0, 2.0]);
        let inst = Instance {
            priorities: Some(vec![2.0, 1.0]),
            ..inst
        };
        assert_eq!(candidate_radii(&inst, true).unwrap(), vec![2.0]);
        assert_eq!(candidate_radii(&inst, false).unwrap(), vec![1.0, 2.0]);
    }

    #[test]
    fn candidate_radii_matches_enumeration() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let inst = crate::generate::InstanceGenerator::new(5, 5)
            .with_priorities(0.5, 3.0)
            .generate(&mut rng);
        let mut expect = Vec::new();
        for j in 0..5 {
            for i in 0..5 {
                let (c, s) = (&inst.clients[j].0, &inst.suppliers[i].0);
                let d = ((c[0] - s[0]).powi(2) + (c[1] - s[1]).powi(2)).sqrt();
                expect.push(inst.priorities.as_ref().unwrap()[j] * d);
            }
        }
        let got = candidate_radii(&inst, true).unwrap();
        assert_eq!(got.len(), 25);
        expect.sort_by(f64::total_cmp);
        for (g, e) in got.iter().zip(&expect) {
            assert!((g - e).abs() <= 1e-12 * e.max(1.0));
        }
    }

    #[test]
    fn candidate_radii_rejects_empty_sides() {
        let inst = Instance::new(vec![], pts(&[&[0.0]]), None, 1, 0).unwrap();
        assert!(matches!(candidate_radii(&inst, false), Err(Error::Input(_))));
    }

    #[test]
    fn guess_loop_binary_search_contract() {
        let inst = Instance::new(pts(&[&[0.0]]), pts(&[&[1.0]]), None, 1, 0).unwrap();
        let radii = [1.0, 3.0, 7.0, 9.0];
        let g = guess_loop(&inst, &radii, Tolerance::default(), |s| {
            Ok((s.radius >= 7.0).then_some(s.radius))
        })
        .unwrap();
        assert_eq!(g.radius, 7.0);
        assert_eq!(g.solution, 7.0);
        let err = guess_loop(&inst, &radii, Tolerance::default(), |_| Ok(None::<()>));
        assert!(matches!(err, Err(Error::Infeasible(_))));
    }

    #[test]
    fn scaled_distances() {
        let inst = Instance::new(pts(&[&[0.0, 0.0]]), pts(&[&[3.0, 4.0], &[0.0, 0.0]]), None, 1, 0).unwrap();
        let s = ScaledInstance::new(&inst, 2.5, Tolerance::default()).unwrap();
        assert_eq!(s.cs(0, 0), 2.0);
        assert_eq!(s.cc(0, 1), 2.0);
        let z = ScaledInstance::new(&inst, 0.0, Tolerance::default()).unwrap();
        assert_eq!(z.cs(1, 0), 0.0);
        assert!(z.cs(0, 0).is_infinite());
        assert!(z.serves(0, 1) && !z.serves(0, 0));
        assert!(ScaledInstance::new(&inst, -1.0, Tolerance::default()).is_err());
    }

    #[test]
    fn validation_errors() {
        assert!(Instance::new(pts(&[&[0.0]]), pts(&[&[0.0, 1.0]]), None, 1, 0).is_err());
        assert!(Instance::new(pts(&[&[0.0]]), pts(&[&[0.0]]), Some(vec![]), 1, 0).is_err());
        assert!(Instance::new(pts(&[&[0.0]]), pts(&[&[0.0]]), Some(vec![-1.0]), 1, 0).is_err());
        assert!(Instance::new(pts(&[&[0.0]]), pts(&[&[0.0]]), None, 1, 2).is_err());
        assert!(Instance::new(pts(&[&[f64::NAN]]), pts(&[&[0.0]]), None, 1, 0).is_err());
    }

    #[test]
    fn json_round_trip() {
        let text = r#"{"suppliers": [[0, 0]], "clients": [[1, 0], [0, 2]], "priorities": [1, 2], "k": 1}"#;
        let inst = Instance::from_json(text).unwrap();
        assert_eq!(inst.ell, 0);
        assert_eq!(inst.priority(1), 2.0);
        assert_eq!(Instance::from_json(&inst.to_json()).unwrap(), inst);
        assert!(Instance::from_json(r#"{"suppliers": [], "k": 1}"#).is_err());
    }

    #[test]
    fn tolerance_comparisons() {
        let t = Tolerance::default();
        assert!(t.le(SQRT_3 * (1.0 + 1e-10), SQRT_3));
        assert!(t.gt(SQRT_3 * (1.0 + 1e-8), SQRT_3));
        assert!(t.le(0.0, 0.0) && t.gt(1e-300, 0.0));
        assert_eq!(SQRT_3, 3f64.sqrt());
    }
}
