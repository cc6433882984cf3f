use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linsolve::{LpSession, LpStatus};
use crate::rng;

/// Convex compact uncertainty sets.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum UncertaintySet {
    /// `{ζ : ‖ζ − center‖∞ ≤ radius}`
    Box { center: Vec<f64>, radius: f64 },
    /// `{ζ : ‖ζ − center‖₂ ≤ radius}`
    Ellipsoid { center: Vec<f64>, radius: f64 },
    /// `{ζ ≥ 0 : ‖ζ − center‖₂ ≤ radius}` with `center ≥ 0`.
    TruncatedEllipsoid { center: Vec<f64>, radius: f64 },
    /// Convex hull of the listed points.
    VPolytope { vertices: Vec<Vec<f64>> },
    /// `{ζ : aζ ≤ b}`, required to be bounded.
    HPolytope { a: Vec<Vec<f64>>, b: Vec<f64> },
    /// `{ζ : ‖ζ_{1:i}‖₁ ≤ budgets[i] for all i, ‖ζ‖∞ ≤ 1}`
    Budgeted { budgets: Vec<f64> },
    /// ζ split into consecutive blocks, each in a standard simplex.
    SimplexProduct { blocks: Vec<usize> },
}

/// `ζ = offset + map·η` with η ranging over a polyhedron
/// `{aη ≤ b, eη = f, lower ≤ η ≤ upper}`.
#[derive(Debug, Clone)]
pub struct LinearRepr {
    pub n_eta: usize,
    /// One row per ζ component.
    pub map: Vec<Vec<f64>>,
    pub offset: Vec<f64>,
    pub a: Vec<Vec<f64>>,
    pub b: Vec<f64>,
    pub e: Vec<Vec<f64>>,
    pub f: Vec<f64>,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

impl LinearRepr {
    fn identity(dim: usize, lower: Vec<f64>, upper: Vec<f64>) -> Self {
        let map = (0..dim)
            .map(|l| {
                let mut r = vec![0.0; dim];
                r[l] = 1.0;
                r
            })
            .collect();
        LinearRepr {
            n_eta: dim,
            map,
            offset: vec![0.0; dim],
            a: Vec::new(),
            b: Vec::new(),
            e: Vec::new(),
            f: Vec::new(),
            lower,
            upper,
        }
    }

    pub fn zeta(&self, eta: &[f64]) -> Vec<f64> {
        self.map
            .iter()
            .zip(&self.offset)
            .map(|(row, o)| o + row.iter().zip(eta).map(|(a, b)| a * b).sum::<f64>())
            .collect()
    }

    /// Loads the polyhedron into `s` as variables starting at the returned
    /// index, with objective coefficients `obj` over η.
    pub fn load_into(&self, s: &mut LpSession, obj: &[f64]) -> usize {
        let vars: Vec<(f64, f64, f64)> =
            (0..self.n_eta).map(|k| (obj[k], self.lower[k], self.upper[k])).collect();
        let first = s.add_vars(&vars);
        for (row, rhs) in self.a.iter().zip(&self.b) {
            let coefs: Vec<(usize, f64)> =
                row.iter().enumerate().filter(|(_, v)| **v != 0.0).map(|(k, v)| (first + k, *v)).collect();
            s.add_le(&coefs, *rhs);
        }
        for (row, rhs) in self.e.iter().zip(&self.f) {
            let coefs: Vec<(usize, f64)> =
                row.iter().enumerate().filter(|(_, v)| **v != 0.0).map(|(k, v)| (first + k, *v)).collect();
            s.add_eq(&coefs, *rhs);
        }
        first
    }

    /// Coefficients over η of the ζ-linear function `c·ζ` (offset excluded).
    pub fn pull_back(&self, c: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.n_eta];
        for (cl, row) in c.iter().zip(&self.map) {
            if *cl != 0.0 {
                for (o, m) in out.iter_mut().zip(row) {
                    *o += cl * m;
                }
            }
        }
        out
    }

    /// Maximizes `c·ζ` by LP. Returns the value (offset included) and ζ.
    pub fn lp_max(&self, c: &[f64]) -> Result<(f64, Vec<f64>)> {
        let obj: Vec<f64> = self.pull_back(c).into_iter().map(|v| -v).collect();
        let mut s = LpSession::new();
        self.load_into(&mut s, &obj);
        let r = s.solve()?;
        match r.status {
            LpStatus::Optimal => {
                let zeta = self.zeta(&r.x);
                let v = c.iter().zip(&zeta).map(|(a, b)| a * b).sum();
                Ok((v, zeta))
            }
            LpStatus::Infeasible => Err(Error::EmptySet),
            _ => Err(Error::Unbounded),
        }
    }
}

impl UncertaintySet {
    pub fn dim(&self) -> usize {
        match self {
            Self::Box { center, .. } | Self::Ellipsoid { center, .. } | Self::TruncatedEllipsoid { center, .. } => {
                center.len()
            }
            Self::VPolytope { vertices } => vertices.first().map_or(0, |v| v.len()),
            Self::HPolytope { a, .. } => a.first().map_or(0, |r| r.len()),
            Self::Budgeted { budgets } => budgets.len(),
            Self::SimplexProduct { blocks } => blocks.iter().sum(),
        }
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            Self::Box { .. } => "box",
            Self::Ellipsoid { .. } => "ellipsoid",
            Self::TruncatedEllipsoid { .. } => "truncated_ellipsoid",
            Self::VPolytope { .. } => "v_polytope",
            Self::HPolytope { .. } => "h_polytope",
            Self::Budgeted { .. } => "budgeted",
            Self::SimplexProduct { .. } => "simplex_product",
        }
    }

    pub fn box_set(center: Vec<f64>, radius: f64) -> Self {
        Self::Box { center, radius }
    }

    pub fn unit_box(dim: usize) -> Self {
        Self::Box { center: vec![0.0; dim], radius: 1.0 }
    }

    pub fn ellipsoid(center: Vec<f64>, radius: f64) -> Self {
        Self::Ellipsoid { center, radius }
    }

    /// Checks nonemptiness, boundedness and dimensional consistency.
    pub fn validate(&self) -> Result<()> {
        let finite = |v: &[f64], what: &str| {
            if v.iter().all(|x| x.is_finite()) {
                Ok(())
            } else {
                Err(Error::NonFinite(format!("uncertainty set {what}")))
            }
        };
        if self.dim() == 0 {
            return Err(Error::Invalid("uncertainty set has dimension 0".into()));
        }
        match self {
            Self::Box { center, radius } | Self::Ellipsoid { center, radius } => {
                finite(center, "center")?;
                if !(radius.is_finite() && *radius >= 0.0) {
                    return Err(Error::Invalid("radius must be finite and nonnegative".into()));
                }
            }
            Self::TruncatedEllipsoid { center, radius } => {
                finite(center, "center")?;
                if !(radius.is_finite() && *radius >= 0.0) {
                    return Err(Error::Invalid("radius must be finite and nonnegative".into()));
                }
                if center.iter().any(|c| *c < 0.0) {
                    return Err(Error::Invalid("truncated ellipsoid center must be nonnegative".into()));
                }
            }
            Self::VPolytope { vertices } => {
                let l = self.dim();
                for v in vertices {
                    if v.len() != l {
                        return Err(Error::Dimension("vertices of different lengths".into()));
                    }
                    finite(v, "vertex")?;
                }
            }
            Self::HPolytope { a, b } => {
                let l = self.dim();
                if a.len() != b.len() {
                    return Err(Error::Dimension("h_polytope rows and right-hand sides differ".into()));
                }
                for r in a {
                    if r.len() != l {
                        return Err(Error::Dimension("ragged h_polytope matrix".into()));
                    }
                    finite(r, "matrix")?;
                }
                finite(b, "right-hand side")?;
                let repr = self.linear_repr()?;
                for i in 0..l {
                    for s in [1.0, -1.0] {
                        let mut c = vec![0.0; l];
                        c[i] = s;
                        match repr.lp_max(&c) {
                            Ok(_) => {}
                            Err(Error::Unbounded) => return Err(Error::UnboundedSet(i)),
                            Err(e) => return Err(e),
                        }
                    }
                }
            }
            Self::Budgeted { budgets } => {
                finite(budgets, "budgets")?;
                if budgets.iter().any(|g| *g < 0.0) {
                    return Err(Error::Invalid("budgets must be nonnegative".into()));
                }
            }
            Self::SimplexProduct { blocks } => {
                if blocks.iter().any(|k| *k == 0) {
                    return Err(Error::Invalid("simplex blocks must be nonempty".into()));
                }
            }
        }
        Ok(())
    }

    /// The nominal point: center, first vertex, barycenter, or (for
    /// H-polytopes) the average of the coordinate-extreme points.
    pub fn nominal(&self) -> Vec<f64> {
        match self {
            Self::Box { center, .. } | Self::Ellipsoid { center, .. } | Self::TruncatedEllipsoid { center, .. } => {
                center.clone()
            }
            Self::VPolytope { vertices } => vertices[0].clone(),
            Self::Budgeted { budgets } => vec![0.0; budgets.len()],
            Self::SimplexProduct { blocks } => {
                blocks.iter().flat_map(|&k| std::iter::repeat_n(1.0 / k as f64, k)).collect()
            }
            Self::HPolytope { .. } => {
                let pts = self.extreme_points().unwrap_or_default();
                let l = self.dim();
                let mut c = vec![0.0; l];
                for p in &pts {
                    for (a, b) in c.iter_mut().zip(p) {
                        *a += b / pts.len() as f64;
                    }
                }
                c
            }
        }
    }

    /// Minimizers and maximizers of each coordinate (H-polytopes only).
    fn extreme_points(&self) -> Result<Vec<Vec<f64>>> {
        let repr = self.linear_repr()?;
        let l = self.dim();
        let mut pts = Vec::with_capacity(2 * l);
        for i in 0..l {
            for s in [1.0, -1.0] {
                let mut c = vec![0.0; l];
                c[i] = s;
                pts.push(repr.lp_max(&c)?.1);
            }
        }
        Ok(pts)
    }

    /// Largest violation of the set's defining inequalities at ζ
    /// (zero or negative inside).
    pub fn residual(&self, z: &[f64]) -> f64 {
        if z.len() != self.dim() {
            return f64::INFINITY;
        }
        let norm2 = |c: &[f64]| z.iter().zip(c).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
        match self {
            Self::Box { center, radius } => {
                z.iter().zip(center).map(|(a, c)| (a - c).abs() - radius).fold(f64::NEG_INFINITY, f64::max)
            }
            Self::Ellipsoid { center, radius } => norm2(center) - radius,
            Self::TruncatedEllipsoid { center, radius } => {
                let neg = z.iter().map(|v| -v).fold(f64::NEG_INFINITY, f64::max);
                (norm2(center) - radius).max(neg)
            }
            Self::HPolytope { a, b } => a
                .iter()
                .zip(b)
                .map(|(r, bi)| r.iter().zip(z).map(|(x, y)| x * y).sum::<f64>() - bi)
                .fold(f64::NEG_INFINITY, f64::max),
            Self::Budgeted { budgets } => {
                let mut worst = z.iter().map(|v| v.abs() - 1.0).fold(f64::NEG_INFINITY, f64::max);
                let mut s = 0.0;
                for (v, g) in z.iter().zip(budgets) {
                    s += v.abs();
                    worst = worst.max(s - g);
                }
                worst
            }
            Self::SimplexProduct { blocks } => {
                let mut worst = z.iter().map(|v| -v).fold(f64::NEG_INFINITY, f64::max);
                let mut at = 0;
                for &k in blocks {
                    let s: f64 = z[at..at + k].iter().sum();
                    worst = worst.max((s - 1.0).abs());
                    at += k;
                }
                worst
            }
            Self::VPolytope { vertices } => {
                // Distance-free test: solve the convex-combination LP.
                let l = z.len();
                let mut s = LpSession::new();
                let n = vertices.len();
                s.add_vars(&vec![(0.0, 0.0, f64::INFINITY); n]);
                // slack t ≥ |Σλv − z| componentwise, minimize t
                let t = s.add_var(1.0, 0.0, f64::INFINITY);
                for i in 0..l {
                    let mut row: Vec<(usize, f64)> = (0..n).map(|k| (k, vertices[k][i])).collect();
                    row.push((t, -1.0));
                    s.add_le(&row, z[i]);
                    let mut row: Vec<(usize, f64)> = (0..n).map(|k| (k, -vertices[k][i])).collect();
                    row.push((t, -1.0));
                    s.add_le(&row, -z[i]);
                }
                let ones: Vec<(usize, f64)> = (0..n).map(|k| (k, 1.0)).collect();
                s.add_eq(&ones, 1.0);
                match s.solve() {
                    Ok(r) if r.status == LpStatus::Optimal => r.value,
                    _ => f64::INFINITY,
                }
            }
        }
    }

    pub fn contains(&self, z: &[f64], tol: f64) -> bool {
        self.residual(z) <= tol
    }

    /// Axis-aligned bounding box `(lower, upper)`.
    pub fn bounding_box(&self) -> Result<(Vec<f64>, Vec<f64>)> {
        Ok(match self {
            Self::Box { center, radius } | Self::Ellipsoid { center, radius } => (
                center.iter().map(|c| c - radius).collect(),
                center.iter().map(|c| c + radius).collect(),
            ),
            Self::TruncatedEllipsoid { center, radius } => (
                center.iter().map(|c| (c - radius).max(0.0)).collect(),
                center.iter().map(|c| c + radius).collect(),
            ),
            Self::VPolytope { vertices } => {
                let l = self.dim();
                let mut lo = vec![f64::INFINITY; l];
                let mut hi = vec![f64::NEG_INFINITY; l];
                for v in vertices {
                    for i in 0..l {
                        lo[i] = lo[i].min(v[i]);
                        hi[i] = hi[i].max(v[i]);
                    }
                }
                (lo, hi)
            }
            Self::HPolytope { .. } => {
                let pts = self.extreme_points()?;
                let l = self.dim();
                let lo = (0..l).map(|i| pts[2 * i + 1][i]).collect();
                let hi = (0..l).map(|i| pts[2 * i][i]).collect();
                (lo, hi)
            }
            Self::Budgeted { budgets } => {
                let l = budgets.len();
                let mut cap = vec![1.0f64; l];
                let mut suffix_min = f64::INFINITY;
                for i in (0..l).rev() {
                    suffix_min = suffix_min.min(budgets[i]);
                    cap[i] = cap[i].min(suffix_min);
                }
                (cap.iter().map(|c| -c).collect(), cap)
            }
            Self::SimplexProduct { blocks } => {
                let l: usize = blocks.iter().sum();
                let mut lo = vec![0.0; l];
                let mut at = 0;
                for &k in blocks {
                    if k == 1 {
                        lo[at] = 1.0;
                    }
                    at += k;
                }
                (lo, vec![1.0; l])
            }
        })
    }

    /// Number of extreme points for sets with a finite list, `None` otherwise.
    pub fn vertex_count(&self) -> Option<f64> {
        match self {
            Self::Box { radius, .. } if *radius == 0.0 => Some(1.0),
            Self::Box { center, .. } => Some(2f64.powi(center.len() as i32)),
            Self::VPolytope { vertices } => Some(vertices.len() as f64),
            Self::SimplexProduct { blocks } => Some(blocks.iter().map(|k| *k as f64).product()),
            _ => None,
        }
    }

    /// All extreme points (for finite-vertex sets), at most `cap` of them.
    pub fn vertices(&self, cap: usize) -> Result<Vec<Vec<f64>>> {
        let count = self
            .vertex_count()
            .ok_or_else(|| Error::Unsupported(format!("{} set has no finite vertex list", self.kind_name())))?;
        if count > cap as f64 {
            return Err(Error::CapExceeded { count, cap });
        }
        Ok(match self {
            Self::Box { center, radius } if *radius == 0.0 => vec![center.clone()],
            Self::Box { center, radius } => {
                let l = center.len();
                (0..(1usize << l))
                    .map(|mask| {
                        (0..l)
                            .map(|i| if mask >> i & 1 == 1 { center[i] - radius } else { center[i] + radius })
                            .collect()
                    })
                    .collect()
            }
            Self::VPolytope { vertices } => vertices.clone(),
            Self::SimplexProduct { blocks } => {
                let l: usize = blocks.iter().sum();
                let mut out = Vec::with_capacity(count as usize);
                let mut idx = vec![0usize; blocks.len()];
                loop {
                    let mut z = vec![0.0; l];
                    let mut at = 0;
                    for (k, &b) in blocks.iter().enumerate() {
                        z[at + idx[k]] = 1.0;
                        at += b;
                    }
                    out.push(z);
                    let mut k = blocks.len();
                    loop {
                        if k == 0 {
                            return Ok(out);
                        }
                        k -= 1;
                        idx[k] += 1;
                        if idx[k] < blocks[k] {
                            break;
                        }
                        idx[k] = 0;
                    }
                }
            }
            _ => unreachable!(),
        })
    }

    /// Polyhedral description, unavailable for the ellipsoidal variants.
    pub fn linear_repr(&self) -> Result<LinearRepr> {
        let l = self.dim();
        match self {
            Self::Box { center, radius } => Ok(LinearRepr::identity(
                l,
                center.iter().map(|c| c - radius).collect(),
                center.iter().map(|c| c + radius).collect(),
            )),
            Self::HPolytope { a, b } => {
                let mut r = LinearRepr::identity(l, vec![f64::NEG_INFINITY; l], vec![f64::INFINITY; l]);
                r.a = a.clone();
                r.b = b.clone();
                Ok(r)
            }
            Self::Budgeted { budgets } => {
                // η = (ζ, u): -u ≤ ζ ≤ u, Σ_{j≤i} u_j ≤ Γ_i, 0 ≤ u ≤ 1.
                let n = 2 * l;
                let map = (0..l)
                    .map(|i| {
                        let mut r = vec![0.0; n];
                        r[i] = 1.0;
                        r
                    })
                    .collect();
                let mut a = Vec::new();
                let mut b = Vec::new();
                for i in 0..l {
                    let mut r = vec![0.0; n];
                    r[i] = 1.0;
                    r[l + i] = -1.0;
                    a.push(r);
                    let mut r = vec![0.0; n];
                    r[i] = -1.0;
                    r[l + i] = -1.0;
                    a.push(r);
                    let mut r = vec![0.0; n];
                    for j in 0..=i {
                        r[l + j] = 1.0;
                    }
                    a.push(r);
                    b.extend([0.0, 0.0, budgets[i]]);
                }
                let mut lower = vec![-1.0; l];
                lower.extend(vec![0.0; l]);
                Ok(LinearRepr {
                    n_eta: n,
                    map,
                    offset: vec![0.0; l],
                    a,
                    b,
                    e: Vec::new(),
                    f: Vec::new(),
                    lower,
                    upper: vec![1.0; n],
                })
            }
            Self::VPolytope { vertices } => {
                let n = vertices.len();
                let map = (0..l).map(|i| vertices.iter().map(|v| v[i]).collect()).collect();
                Ok(LinearRepr {
                    n_eta: n,
                    map,
                    offset: vec![0.0; l],
                    a: Vec::new(),
                    b: Vec::new(),
                    e: vec![vec![1.0; n]],
                    f: vec![1.0],
                    lower: vec![0.0; n],
                    upper: vec![1.0; n],
                })
            }
            Self::SimplexProduct { blocks } => {
                let mut r = LinearRepr::identity(l, vec![0.0; l], vec![1.0; l]);
                let mut at = 0;
                for &k in blocks {
                    let mut row = vec![0.0; l];
                    for v in &mut row[at..at + k] {
                        *v = 1.0;
                    }
                    r.e.push(row);
                    r.f.push(1.0);
                    at += k;
                }
                Ok(r)
            }
            Self::Ellipsoid { .. } | Self::TruncatedEllipsoid { .. } => Err(Error::Unsupported(format!(
                "{} set has no linear representation",
                self.kind_name()
            ))),
        }
    }

    pub fn is_polyhedral(&self) -> bool {
        !matches!(self, Self::Ellipsoid { .. } | Self::TruncatedEllipsoid { .. })
    }

    /// A random member of the set (not necessarily uniform).
    pub fn sample(&self, r: &mut impl Rng) -> Vec<f64> {
        match self {
            Self::Box { center, radius } => center.iter().map(|c| rng::uniform(r, c - radius, c + radius)).collect(),
            Self::Ellipsoid { center, radius } => rng::in_ball(r, center, *radius),
            Self::TruncatedEllipsoid { center, radius } => {
                // Clipping at zero is nonexpansive toward a nonnegative center.
                rng::in_ball(r, center, *radius).into_iter().map(|v| v.max(0.0)).collect()
            }
            Self::VPolytope { vertices } => {
                let w = rng::on_simplex(r, vertices.len());
                let mut z = vec![0.0; self.dim()];
                for (wk, v) in w.iter().zip(vertices) {
                    for (a, b) in z.iter_mut().zip(v) {
                        *a += wk * b;
                    }
                }
                z
            }
            Self::HPolytope { .. } => {
                let pts = self.extreme_points().unwrap_or_default();
                let w = rng::on_simplex(r, pts.len());
                let mut z = vec![0.0; self.dim()];
                for (wk, p) in w.iter().zip(&pts) {
                    for (a, b) in z.iter_mut().zip(p) {
                        *a += wk * b;
                    }
                }
                z
            }
            Self::Budgeted { budgets } => {
                let mut z: Vec<f64> = budgets.iter().map(|_| rng::uniform(r, -1.0, 1.0)).collect();
                let mut scale = 1.0f64;
                let mut s = 0.0;
                for (v, g) in z.iter().zip(budgets) {
                    s += v.abs();
                    if s > 0.0 {
                        scale = scale.min(g / s);
                    }
                }
                for v in &mut z {
                    *v *= scale;
                }
                z
            }
            Self::SimplexProduct { blocks } => blocks.iter().flat_map(|&k| rng::on_simplex(r, k)).collect(),
        }
    }
}
