//! Interior-point solver for linear programs with second-order cone
//! constraints: homogeneous self-dual embedding, Nesterov-Todd scaling and
//! Mehrotra predictor-corrector steps.

use super::dense::Lu;

/// Sparse row `Σ coef·x`.
pub type SparseRow = Vec<(usize, f64)>;

/// `min cᵀx  s.t.  eq: a·x = b,  lin: g·x ≤ h,
/// soc: (h₀ − g₀·x, …, h_m − g_m·x) ∈ {u₀ ≥ ‖u₁..‖}`.
#[derive(Debug, Clone, Default)]
pub struct ConeProgram {
    pub n: usize,
    pub c: Vec<f64>,
    pub eq: Vec<(SparseRow, f64)>,
    pub lin: Vec<(SparseRow, f64)>,
    pub soc: Vec<Vec<(SparseRow, f64)>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConeStatus {
    Optimal,
    Infeasible,
    Unbounded,
    /// Ran out of iterations or step length before reaching the tolerances.
    Stalled,
}

#[derive(Debug, Clone)]
pub struct ConeResult {
    pub status: ConeStatus,
    pub x: Vec<f64>,
    pub value: f64,
    pub iterations: usize,
}

const MAX_ITER: usize = 120;
const FEAS_TOL: f64 = 1e-10;
const GAP_TOL: f64 = 1e-10;
const LOOSE_TOL: f64 = 1e-6;

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

fn axpy(y: &mut [f64], a: f64, x: &[f64]) {
    for (u, v) in y.iter_mut().zip(x) {
        *u += a * v;
    }
}

/// Layout of the cone: `nl` orthant coordinates, then the SOC blocks.
struct Cones {
    nl: usize,
    socs: Vec<(usize, usize)>,
    m: usize,
}

impl Cones {
    fn degree(&self) -> usize {
        self.nl + self.socs.len()
    }

    fn identity(&self) -> Vec<f64> {
        let mut e = vec![0.0; self.m];
        e[..self.nl].iter_mut().for_each(|v| *v = 1.0);
        for &(o, _) in &self.socs {
            e[o] = 1.0;
        }
        e
    }

    fn min_eig(&self, u: &[f64]) -> f64 {
        let mut m = f64::INFINITY;
        for v in &u[..self.nl] {
            m = m.min(*v);
        }
        for &(o, k) in &self.socs {
            m = m.min(u[o] - norm(&u[o + 1..o + k]));
        }
        m
    }

    /// Jordan product `u ∘ v`.
    fn prod(&self, u: &[f64], v: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.m];
        for i in 0..self.nl {
            out[i] = u[i] * v[i];
        }
        for &(o, k) in &self.socs {
            out[o] = dot(&u[o..o + k], &v[o..o + k]);
            for i in o + 1..o + k {
                out[i] = u[o] * v[i] + v[o] * u[i];
            }
        }
        out
    }

    /// Solves `l ∘ x = d` for `x`.
    fn div(&self, l: &[f64], d: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.m];
        for i in 0..self.nl {
            out[i] = d[i] / l[i];
        }
        for &(o, k) in &self.socs {
            let l1 = &l[o + 1..o + k];
            let d1 = &d[o + 1..o + k];
            let det = l[o] * l[o] - dot(l1, l1);
            let x0 = (l[o] * d[o] - dot(l1, d1)) / det;
            out[o] = x0;
            for i in 1..k {
                out[o + i] = (d[o + i] - x0 * l[o + i]) / l[o];
            }
        }
        out
    }

    /// Largest `α` with `u + α du` in the cone (infinite when unlimited).
    fn max_step(&self, u: &[f64], du: &[f64]) -> f64 {
        let mut alpha = f64::INFINITY;
        for i in 0..self.nl {
            if du[i] < 0.0 {
                alpha = alpha.min(-u[i] / du[i]);
            }
        }
        for &(o, k) in &self.socs {
            let (u0, u1) = (u[o], &u[o + 1..o + k]);
            let (d0, d1) = (du[o], &du[o + 1..o + k]);
            let c0 = (u0 * u0 - dot(u1, u1)).max(0.0);
            let b = u0 * d0 - dot(u1, d1);
            let a = d0 * d0 - dot(d1, d1);
            let step = if a.abs() <= 1e-14 * (d0 * d0 + dot(d1, d1)) {
                if b < 0.0 {
                    -c0 / (2.0 * b)
                } else {
                    f64::INFINITY
                }
            } else {
                let disc = b * b - a * c0;
                if disc < 0.0 {
                    f64::INFINITY
                } else if b < 0.0 {
                    c0 / (disc.sqrt() - b)
                } else if a < 0.0 {
                    (b + disc.sqrt()) / -a
                } else {
                    f64::INFINITY
                }
            };
            alpha = alpha.min(step);
        }
        alpha
    }
}

struct SocScale {
    eta: f64,
    w0: f64,
    w1: Vec<f64>,
}

/// Nesterov-Todd scaling `W` with `W z = W⁻¹ s = λ`.
struct Scaling {
    d: Vec<f64>,
    soc: Vec<SocScale>,
    lambda: Vec<f64>,
}

impl Scaling {
    fn identity(cones: &Cones) -> Scaling {
        Scaling {
            d: vec![1.0; cones.nl],
            soc: cones.socs.iter().map(|&(_, k)| SocScale { eta: 1.0, w0: 1.0, w1: vec![0.0; k - 1] }).collect(),
            lambda: cones.identity(),
        }
    }

    fn new(cones: &Cones, s: &[f64], z: &[f64]) -> Scaling {
        let d: Vec<f64> = (0..cones.nl).map(|i| (s[i] / z[i]).sqrt()).collect();
        let mut soc = Vec::with_capacity(cones.socs.len());
        for &(o, k) in &cones.socs {
            let (sv, zv) = (&s[o..o + k], &z[o..o + k]);
            let sn = (sv[0] * sv[0] - dot(&sv[1..], &sv[1..])).max(1e-300).sqrt();
            let zn = (zv[0] * zv[0] - dot(&zv[1..], &zv[1..])).max(1e-300).sqrt();
            let sb: Vec<f64> = sv.iter().map(|v| v / sn).collect();
            let zb: Vec<f64> = zv.iter().map(|v| v / zn).collect();
            let gamma = ((1.0 + dot(&sb, &zb)) / 2.0).max(1e-300).sqrt();
            let w0 = (sb[0] + zb[0]) / (2.0 * gamma);
            let w1: Vec<f64> = (1..k).map(|i| (sb[i] - zb[i]) / (2.0 * gamma)).collect();
            soc.push(SocScale { eta: (sn / zn).sqrt(), w0, w1 });
        }
        let mut sc = Scaling { d, soc, lambda: Vec::new() };
        let mut l = z.to_vec();
        sc.apply(cones, &mut l, false);
        sc.lambda = l;
        sc
    }

    /// `v ← W v` or `v ← W⁻¹ v`.
    fn apply(&self, cones: &Cones, v: &mut [f64], inverse: bool) {
        for (x, d) in v[..cones.nl].iter_mut().zip(&self.d) {
            if inverse {
                *x /= d;
            } else {
                *x *= d;
            }
        }
        for (sc, &(o, k)) in self.soc.iter().zip(&cones.socs) {
            let u = &mut v[o..o + k];
            let sign = if inverse { -1.0 } else { 1.0 };
            let f = if inverse { 1.0 / sc.eta } else { sc.eta };
            let wu = dot(&sc.w1, &u[1..]);
            let u0 = u[0];
            u[0] = f * (sc.w0 * u0 + sign * wu);
            let coef = wu / (1.0 + sc.w0) + sign * u0;
            for (x, w) in u[1..].iter_mut().zip(&sc.w1) {
                *x = f * (*x + coef * w);
            }
        }
    }

    fn applied(&self, cones: &Cones, v: &[f64], inverse: bool) -> Vec<f64> {
        let mut out = v.to_vec();
        self.apply(cones, &mut out, inverse);
        out
    }
}

struct Data {
    n: usize,
    c: Vec<f64>,
    a: Vec<SparseRow>,
    b: Vec<f64>,
    g: Vec<SparseRow>,
    h: Vec<f64>,
    cones: Cones,
    /// Distinct variables touched by each SOC block.
    soc_cols: Vec<Vec<usize>>,
}

impl Data {
    fn g_mul(&self, x: &[f64]) -> Vec<f64> {
        self.g.iter().map(|row| row.iter().map(|&(j, v)| v * x[j]).sum()).collect()
    }

    fn gt_mul(&self, z: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.n];
        for (row, zi) in self.g.iter().zip(z) {
            for &(j, v) in row {
                out[j] += v * zi;
            }
        }
        out
    }

    fn a_mul(&self, x: &[f64]) -> Vec<f64> {
        self.a.iter().map(|row| row.iter().map(|&(j, v)| v * x[j]).sum()).collect()
    }

    fn at_mul(&self, y: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.n];
        for (row, yi) in self.a.iter().zip(y) {
            for &(j, v) in row {
                out[j] += v * yi;
            }
        }
        out
    }
}

/// Factored reduced system `[H Aᵀ; A 0]` with `H = Gᵀ W⁻² G`.
struct Kkt<'a> {
    data: &'a Data,
    scaling: &'a Scaling,
    h: Vec<f64>,
    lu: Lu,
}

impl<'a> Kkt<'a> {
    fn new(data: &'a Data, scaling: &'a Scaling) -> Option<Kkt<'a>> {
        let n = data.n;
        let mut h = vec![0.0; n * n];
        let cones = &data.cones;
        for i in 0..cones.nl {
            let w = 1.0 / (scaling.d[i] * scaling.d[i]);
            let row = &data.g[i];
            for &(j, u) in row {
                for &(k, v) in row {
                    h[j * n + k] += w * u * v;
                }
            }
        }
        for (b, &(o, k)) in cones.socs.iter().enumerate() {
            let cols = &data.soc_cols[b];
            let t = cols.len();
            let mut pos = std::collections::HashMap::with_capacity(t);
            for (p, &j) in cols.iter().enumerate() {
                pos.insert(j, p);
            }
            // column-major dense block, one column per touched variable
            let mut m = vec![0.0; t * k];
            for r in 0..k {
                for &(j, v) in &data.g[o + r] {
                    m[pos[&j] * k + r] += v;
                }
            }
            let sub = Cones { nl: 0, socs: vec![(0, k)], m: k };
            let sc = Scaling { d: Vec::new(), soc: vec![clone_soc(&scaling.soc[b])], lambda: Vec::new() };
            for p in 0..t {
                sc.apply(&sub, &mut m[p * k..(p + 1) * k], true);
            }
            for p in 0..t {
                for q in p..t {
                    let v = dot(&m[p * k..(p + 1) * k], &m[q * k..(q + 1) * k]);
                    h[cols[p] * n + cols[q]] += v;
                    if q != p {
                        h[cols[q] * n + cols[p]] += v;
                    }
                }
            }
        }
        let p = data.a.len();
        let size = n + p;
        let diag_max = (0..n).map(|j| h[j * n + j]).fold(1.0f64, f64::max);
        let factor = |reg: f64| {
            let mut k = vec![0.0; size * size];
            for j in 0..n {
                k[j * size..j * size + n].copy_from_slice(&h[j * n..(j + 1) * n]);
                k[j * size + j] += reg;
            }
            for (i, row) in data.a.iter().enumerate() {
                for &(j, v) in row {
                    k[(n + i) * size + j] += v;
                    k[j * size + n + i] += v;
                }
                k[(n + i) * size + n + i] -= reg;
            }
            Lu::factor(k, size)
        };
        let lu = [1e-15, 1e-12, 1e-9].iter().find_map(|r| factor(r * diag_max))?;
        Some(Kkt { data, scaling, h, lu })
    }

    fn reduced_mul(&self, x: &[f64], y: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let n = self.data.n;
        let mut top = self.data.at_mul(y);
        for j in 0..n {
            top[j] += dot(&self.h[j * n..(j + 1) * n], x);
        }
        (top, self.data.a_mul(x))
    }

    fn solve_once(&self, r1: &[f64], r2: &[f64], r3: &[f64]) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
        let cones = &self.data.cones;
        let n = self.data.n;
        let mut w2r3 = self.scaling.applied(cones, r3, true);
        self.scaling.apply(cones, &mut w2r3, true);
        let gt = self.data.gt_mul(&w2r3);
        let rx: Vec<f64> = r1.iter().zip(&gt).map(|(a, b)| a - b).collect();
        let ry: Vec<f64> = r2.iter().map(|v| -v).collect();
        let mut sol = [rx.clone(), ry.clone()].concat();
        self.lu.solve(&mut sol);
        let (tx, ty) = self.reduced_mul(&sol[..n], &sol[n..]);
        let mut res: Vec<f64> =
            rx.iter().zip(&tx).map(|(a, b)| a - b).chain(ry.iter().zip(&ty).map(|(a, b)| a - b)).collect();
        self.lu.solve(&mut res);
        axpy(&mut sol, 1.0, &res);
        let dx = sol[..n].to_vec();
        let dy = sol[n..].to_vec();
        let gdx = self.data.g_mul(&dx);
        let t: Vec<f64> = r3.iter().zip(&gdx).map(|(a, b)| a + b).collect();
        let mut dz = self.scaling.applied(cones, &t, true);
        self.scaling.apply(cones, &mut dz, true);
        (dx, dy, dz)
    }

    /// Solves `Aᵀdy + Gᵀdz = r1`, `−A dx = r2`, `−G dx + W² dz = r3`, with
    /// iterative refinement on the unreduced system.
    fn solve(&self, r1: &[f64], r2: &[f64], r3: &[f64]) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
        let cones = &self.data.cones;
        let (mut dx, mut dy, mut dz) = self.solve_once(r1, r2, r3);
        let scale = 1.0 + norm(r1) + norm(r2) + norm(r3);
        for _ in 0..4 {
            let mut e1 = r1.to_vec();
            axpy(&mut e1, -1.0, &self.data.at_mul(&dy));
            axpy(&mut e1, -1.0, &self.data.gt_mul(&dz));
            let mut e2 = r2.to_vec();
            axpy(&mut e2, 1.0, &self.data.a_mul(&dx));
            let mut w2dz = self.scaling.applied(cones, &dz, false);
            self.scaling.apply(cones, &mut w2dz, false);
            let mut e3 = r3.to_vec();
            axpy(&mut e3, 1.0, &self.data.g_mul(&dx));
            axpy(&mut e3, -1.0, &w2dz);
            if norm(&e1) + norm(&e2) + norm(&e3) <= 1e-14 * scale {
                break;
            }
            let (cx, cy, cz) = self.solve_once(&e1, &e2, &e3);
            axpy(&mut dx, 1.0, &cx);
            axpy(&mut dy, 1.0, &cy);
            axpy(&mut dz, 1.0, &cz);
        }
        (dx, dy, dz)
    }
}

fn clone_soc(s: &SocScale) -> SocScale {
    SocScale { eta: s.eta, w0: s.w0, w1: s.w1.clone() }
}

struct Direction {
    dx: Vec<f64>,
    dy: Vec<f64>,
    dz: Vec<f64>,
    ds: Vec<f64>,
    dtau: f64,
    dkappa: f64,
}

pub fn solve_cone(p: &ConeProgram) -> ConeResult {
    let n = p.n;
    let mut g: Vec<SparseRow> = Vec::new();
    let mut h = Vec::new();
    for (row, rhs) in &p.lin {
        g.push(row.clone());
        h.push(*rhs);
    }
    let nl = g.len();
    let mut socs = Vec::new();
    let mut soc_cols = Vec::new();
    for block in &p.soc {
        if block.is_empty() {
            continue;
        }
        socs.push((g.len(), block.len()));
        let mut cols: Vec<usize> = block.iter().flat_map(|(r, _)| r.iter().map(|&(j, _)| j)).collect();
        cols.sort_unstable();
        cols.dedup();
        soc_cols.push(cols);
        for (row, rhs) in block {
            g.push(row.clone());
            h.push(*rhs);
        }
    }
    let m = g.len();
    let data = Data {
        n,
        c: p.c.clone(),
        a: p.eq.iter().map(|(r, _)| r.clone()).collect(),
        b: p.eq.iter().map(|(_, v)| *v).collect(),
        g,
        h,
        cones: Cones { nl, socs, m },
        soc_cols,
    };
    run(&data)
}

fn run(data: &Data) -> ConeResult {
    let cones = &data.cones;
    let n = data.n;
    let p = data.a.len();
    let m = cones.m;
    let fail = |status, iterations| ConeResult { status, x: vec![0.0; n], value: f64::NAN, iterations };

    let ident = Scaling::identity(cones);
    let Some(kkt) = Kkt::new(data, &ident) else {
        return fail(ConeStatus::Stalled, 0);
    };
    let neg_b: Vec<f64> = data.b.iter().map(|v| -v).collect();
    let neg_h: Vec<f64> = data.h.iter().map(|v| -v).collect();
    let neg_c: Vec<f64> = data.c.iter().map(|v| -v).collect();
    let (mut x, _, dz) = kkt.solve(&vec![0.0; n], &neg_b, &neg_h);
    let mut s: Vec<f64> = dz.iter().map(|v| -v).collect();
    let (_, mut y, mut z) = kkt.solve(&neg_c, &vec![0.0; p], &vec![0.0; m]);
    drop(kkt);
    let e = cones.identity();
    for v in [&mut s, &mut z] {
        let me = cones.min_eig(v);
        if m > 0 && me <= 1e-8 * norm(v).max(1.0) {
            axpy(v, 1.0 - me, &e);
        }
    }
    let (mut tau, mut kappa) = (1.0, 1.0);
    let nu = cones.degree() as f64;
    let scale_c = norm(&data.c).max(1.0);
    let scale_bh = (norm(&data.b) + norm(&data.h)).max(1.0);
    let mut best: Option<(f64, Vec<f64>, f64)> = None;

    for it in 0..MAX_ITER {
        let atyz = {
            let mut v = data.at_mul(&y);
            axpy(&mut v, 1.0, &data.gt_mul(&z));
            v
        };
        let ax = data.a_mul(&x);
        let gx = data.g_mul(&x);
        let r1: Vec<f64> = (0..n).map(|j| atyz[j] + data.c[j] * tau).collect();
        let r2: Vec<f64> = (0..p).map(|i| -ax[i] + data.b[i] * tau).collect();
        let r3: Vec<f64> = (0..m).map(|i| -gx[i] + data.h[i] * tau - s[i]).collect();
        let cx = dot(&data.c, &x);
        let byhz = dot(&data.b, &y) + dot(&data.h, &z);
        let r4 = -cx - byhz - kappa;

        let pcost = cx / tau;
        let dcost = -byhz / tau;
        let pres = norm(&r2).max(norm(&r3)) / (tau * scale_bh).max(norm(&ax).max(norm(&gx)).max(norm(&s)));
        let dres = norm(&r1) / (tau * scale_c).max(norm(&atyz));
        let gap = dot(&s, &z) / (tau * tau);
        let relgap = (pcost - dcost).abs().min(gap) / pcost.abs().max(1.0);
        let score = pres.max(dres).max(relgap);
        log::trace!("it {it} pcost {pcost:e} dcost {dcost:e} pres {pres:e} dres {dres:e} gap {gap:e} tau {tau:e} kappa {kappa:e}");
        if best.as_ref().map_or(true, |b| score < b.0) {
            best = Some((score, x.iter().map(|v| v / tau).collect(), pcost));
        }
        if pres <= FEAS_TOL && dres <= FEAS_TOL && relgap <= GAP_TOL {
            return ConeResult { status: ConeStatus::Optimal, x: x.iter().map(|v| v / tau).collect(), value: pcost, iterations: it };
        }
        if byhz < 0.0 {
            let res = norm(&atyz) / scale_c / -byhz;
            if res <= FEAS_TOL && tau < 1e-6 * kappa.max(1.0) {
                return fail(ConeStatus::Infeasible, it);
            }
        }
        if cx < 0.0 {
            let ps: Vec<f64> = (0..m).map(|i| gx[i] + s[i]).collect();
            let res = norm(&ax).max(norm(&ps)) / scale_bh / -cx;
            if res <= FEAS_TOL && tau < 1e-6 * kappa.max(1.0) {
                return fail(ConeStatus::Unbounded, it);
            }
        }

        let scaling = Scaling::new(cones, &s, &z);
        let Some(kkt) = Kkt::new(data, &scaling) else {
            break;
        };
        let q_dot = |ux: &[f64], uy: &[f64], uz: &[f64]| dot(&data.c, ux) + dot(&data.b, uy) + dot(&data.h, uz);
        let (u1x, u1y, u1z) = kkt.solve(&neg_c, &neg_b, &neg_h);
        let qu1 = q_dot(&u1x, &u1y, &u1z);
        let lambda = &scaling.lambda;
        let mu = (dot(&s, &z) + tau * kappa) / (nu + 1.0);

        let direction = |eta: f64, d_s: &[f64], d_k: f64| -> Direction {
            let ld = cones.div(lambda, d_s);
            let wld = scaling.applied(cones, &ld, false);
            let r3p: Vec<f64> = (0..m).map(|i| -eta * r3[i] + wld[i]).collect();
            let r1p: Vec<f64> = r1.iter().map(|v| -eta * v).collect();
            let r2p: Vec<f64> = r2.iter().map(|v| -eta * v).collect();
            let (mut dx, mut dy, mut dz) = kkt.solve(&r1p, &r2p, &r3p);
            let t_rhs = -eta * r4 + d_k / tau;
            let dtau = (t_rhs + q_dot(&dx, &dy, &dz)) / (kappa / tau - qu1);
            axpy(&mut dx, dtau, &u1x);
            axpy(&mut dy, dtau, &u1y);
            axpy(&mut dz, dtau, &u1z);
            let wdz = scaling.applied(cones, &dz, false);
            let t: Vec<f64> = (0..m).map(|i| ld[i] - wdz[i]).collect();
            let ds = scaling.applied(cones, &t, false);
            let dkappa = (d_k - kappa * dtau) / tau;
            Direction { dx, dy, dz, ds, dtau, dkappa }
        };
        let step_len = |d: &Direction| -> f64 {
            let mut a = cones.max_step(&s, &d.ds).min(cones.max_step(&z, &d.dz));
            if d.dtau < 0.0 {
                a = a.min(-tau / d.dtau);
            }
            if d.dkappa < 0.0 {
                a = a.min(-kappa / d.dkappa);
            }
            a
        };

        let ll = cones.prod(lambda, lambda);
        let d_s_aff: Vec<f64> = ll.iter().map(|v| -v).collect();
        let aff = direction(1.0, &d_s_aff, -tau * kappa);
        let alpha_aff = step_len(&aff).min(1.0);
        let sigma = (1.0 - alpha_aff).powi(3);
        let corr = cones.prod(
            &scaling.applied(cones, &aff.ds, true),
            &scaling.applied(cones, &aff.dz, false),
        );
        let d_s: Vec<f64> = (0..m).map(|i| -ll[i] - corr[i] + sigma * mu * e[i]).collect();
        let d_k = -tau * kappa - aff.dtau * aff.dkappa + sigma * mu;
        let d = direction(1.0 - sigma, &d_s, d_k);
        let alpha = (0.99 * step_len(&d)).min(1.0);
        if !(alpha > 1e-12) {
            break;
        }
        if d.dx.iter().chain(&d.dz).chain(&d.ds).any(|v| !v.is_finite()) || !d.dtau.is_finite() {
            break;
        }
        axpy(&mut x, alpha, &d.dx);
        axpy(&mut y, alpha, &d.dy);
        axpy(&mut z, alpha, &d.dz);
        axpy(&mut s, alpha, &d.ds);
        tau += alpha * d.dtau;
        kappa += alpha * d.dkappa;
    }
    match best {
        Some((score, x, value)) if score <= LOOSE_TOL => {
            log::debug!("conic solve stopped early at accuracy {score:e}");
            ConeResult { status: ConeStatus::Optimal, x, value, iterations: MAX_ITER }
        }
        _ => fail(ConeStatus::Stalled, MAX_ITER),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scaling_is_symmetric_point() {
        let cones = Cones { nl: 1, socs: vec![(1, 3)], m: 4 };
        let s = [2.0, 3.0, 1.0, -0.5];
        let z = [0.5, 1.5, -0.2, 0.9];
        let sc = Scaling::new(&cones, &s, &z);
        let ws = sc.applied(&cones, &s, true);
        for (a, b) in ws.iter().zip(&sc.lambda) {
            assert!((a - b).abs() < 1e-12, "{ws:?} vs {:?}", sc.lambda);
        }
        let back = sc.applied(&cones, &sc.applied(&cones, &s, false), true);
        for (a, b) in back.iter().zip(&s) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn jordan_division_inverts_product() {
        let cones = Cones { nl: 1, socs: vec![(1, 3)], m: 4 };
        let l = [2.0, 3.0, 1.0, -0.5];
        let x = [0.3, -1.0, 2.0, 0.7];
        let d = cones.prod(&l, &x);
        let back = cones.div(&l, &d);
        for (a, b) in back.iter().zip(&x) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn small_socp() {
        // min −x₀ − x₁ s.t. ‖(x₀, x₁)‖ ≤ 1: optimum −√2.
        let p = ConeProgram {
            n: 2,
            c: vec![-1.0, -1.0],
            eq: Vec::new(),
            lin: Vec::new(),
            soc: vec![vec![(Vec::new(), 1.0), (vec![(0, -1.0)], 0.0), (vec![(1, -1.0)], 0.0)]],
        };
        let r = solve_cone(&p);
        assert_eq!(r.status, ConeStatus::Optimal);
        assert!((r.value + 2f64.sqrt()).abs() < 1e-8, "{}", r.value);
    }

    #[test]
    fn lp_with_equality() {
        // min x₀ + 2x₁ s.t. x₀ + x₁ = 1, x ≥ 0.
        let p = ConeProgram {
            n: 2,
            c: vec![1.0, 2.0],
            eq: vec![(vec![(0, 1.0), (1, 1.0)], 1.0)],
            lin: vec![(vec![(0, -1.0)], 0.0), (vec![(1, -1.0)], 0.0)],
            soc: Vec::new(),
        };
        let r = solve_cone(&p);
        assert_eq!(r.status, ConeStatus::Optimal);
        assert!((r.value - 1.0).abs() < 1e-8);
    }

    #[test]
    fn detects_infeasible_and_unbounded() {
        let infeasible = ConeProgram {
            n: 1,
            c: vec![1.0],
            eq: Vec::new(),
            lin: vec![(vec![(0, 1.0)], -1.0), (vec![(0, -1.0)], 0.0)],
            soc: Vec::new(),
        };
        assert_eq!(solve_cone(&infeasible).status, ConeStatus::Infeasible);
        let unbounded = ConeProgram {
            n: 1,
            c: vec![1.0],
            eq: Vec::new(),
            lin: vec![(vec![(0, 1.0)], 1.0)],
            soc: Vec::new(),
        };
        assert_eq!(solve_cone(&unbounded).status, ConeStatus::Unbounded);
    }
}
