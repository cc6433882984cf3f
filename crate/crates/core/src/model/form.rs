use crate::error::{Error, Result};

/// An affine function `constant + coef·z` of a single vector argument.
#[derive(Debug, Clone, PartialEq)]
pub struct Affine {
    pub constant: f64,
    pub coef: Vec<f64>,
}

impl Affine {
    pub fn new(constant: f64, coef: Vec<f64>) -> Self {
        Self { constant, coef }
    }

    pub fn zeros(dim: usize) -> Self {
        Self { constant: 0.0, coef: vec![0.0; dim] }
    }

    pub fn eval(&self, z: &[f64]) -> f64 {
        self.constant + dot(&self.coef, z)
    }

    pub fn add_assign(&mut self, other: &Affine) {
        self.constant += other.constant;
        for (a, b) in self.coef.iter_mut().zip(&other.coef) {
            *a += b;
        }
    }

    pub fn scaled(&self, s: f64) -> Affine {
        Affine {
            constant: s * self.constant,
            coef: self.coef.iter().map(|c| s * c).collect(),
        }
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// A scalar function that is affine in the uncertain parameter for fixed
/// decisions and affine in the decisions for a fixed parameter:
///
/// `value(ζ, x) = constant + x_linear·x + zeta_linear·ζ + ζᵀ·cross·x`
///
/// `cross` is stored row-major with one row per ζ component.
#[derive(Debug, Clone, PartialEq)]
pub struct BiaffineForm {
    constant: f64,
    x_linear: Vec<f64>,
    zeta_linear: Vec<f64>,
    cross: Vec<f64>,
}

impl BiaffineForm {
    pub fn zeros(n_x: usize, dim_zeta: usize) -> Self {
        Self {
            constant: 0.0,
            x_linear: vec![0.0; n_x],
            zeta_linear: vec![0.0; dim_zeta],
            cross: vec![0.0; n_x * dim_zeta],
        }
    }

    /// Builds a form from its parts; `cross` has one row per ζ component.
    pub fn from_parts(
        constant: f64,
        x_linear: Vec<f64>,
        zeta_linear: Vec<f64>,
        cross: Vec<Vec<f64>>,
    ) -> Result<Self> {
        let n = x_linear.len();
        if cross.len() != zeta_linear.len() {
            return Err(Error::Dimension(format!(
                "cross has {} rows but zeta_linear has {} entries",
                cross.len(),
                zeta_linear.len()
            )));
        }
        let mut flat = Vec::with_capacity(n * cross.len());
        for (l, row) in cross.into_iter().enumerate() {
            if row.len() != n {
                return Err(Error::Dimension(format!(
                    "cross row {l} has {} columns, expected {n}",
                    row.len()
                )));
            }
            flat.extend(row);
        }
        Ok(Self { constant, x_linear, zeta_linear, cross: flat })
    }

    /// A form with no ζ dependence.
    pub fn deterministic(constant: f64, x_linear: Vec<f64>, dim_zeta: usize) -> Self {
        let n = x_linear.len();
        Self {
            constant,
            x_linear,
            zeta_linear: vec![0.0; dim_zeta],
            cross: vec![0.0; n * dim_zeta],
        }
    }

    pub fn n_x(&self) -> usize {
        self.x_linear.len()
    }

    pub fn dim_zeta(&self) -> usize {
        self.zeta_linear.len()
    }

    pub fn constant(&self) -> f64 {
        self.constant
    }

    pub fn x_linear(&self) -> &[f64] {
        &self.x_linear
    }

    pub fn zeta_linear(&self) -> &[f64] {
        &self.zeta_linear
    }

    pub fn cross_row(&self, l: usize) -> &[f64] {
        let n = self.n_x();
        &self.cross[l * n..(l + 1) * n]
    }

    pub fn cross(&self, l: usize, j: usize) -> f64 {
        self.cross[l * self.n_x() + j]
    }

    pub fn cross_rows(&self) -> Vec<Vec<f64>> {
        (0..self.dim_zeta()).map(|l| self.cross_row(l).to_vec()).collect()
    }

    pub fn set_constant(&mut self, v: f64) {
        self.constant = v;
    }

    pub fn set_x(&mut self, j: usize, v: f64) {
        self.x_linear[j] = v;
    }

    pub fn add_x(&mut self, j: usize, v: f64) {
        self.x_linear[j] += v;
    }

    pub fn set_zeta(&mut self, l: usize, v: f64) {
        self.zeta_linear[l] = v;
    }

    pub fn add_zeta(&mut self, l: usize, v: f64) {
        self.zeta_linear[l] += v;
    }

    pub fn set_cross(&mut self, l: usize, j: usize, v: f64) {
        let n = self.n_x();
        self.cross[l * n + j] = v;
    }

    pub fn add_cross(&mut self, l: usize, j: usize, v: f64) {
        let n = self.n_x();
        self.cross[l * n + j] += v;
    }

    pub fn eval(&self, zeta: &[f64], x: &[f64]) -> f64 {
        let mut v = self.constant + dot(&self.x_linear, x) + dot(&self.zeta_linear, zeta);
        for (l, z) in zeta.iter().enumerate() {
            if *z != 0.0 {
                v += z * dot(self.cross_row(l), x);
            }
        }
        v
    }

    /// Checked evaluation.
    pub fn try_eval(&self, zeta: &[f64], x: &[f64]) -> Result<f64> {
        if zeta.len() != self.dim_zeta() || x.len() != self.n_x() {
            return Err(Error::Dimension(format!(
                "form expects (ζ: {}, x: {}), got ({}, {})",
                self.dim_zeta(),
                self.n_x(),
                zeta.len(),
                x.len()
            )));
        }
        Ok(self.eval(zeta, x))
    }

    /// Fixes the decisions; the result is affine in ζ. `x` may be longer than
    /// the form (extra entries are ignored).
    pub fn at_x(&self, x: &[f64]) -> Affine {
        let n = self.n_x();
        let x = &x[..n];
        let coef = (0..self.dim_zeta())
            .map(|l| self.zeta_linear[l] + dot(self.cross_row(l), x))
            .collect();
        Affine { constant: self.constant + dot(&self.x_linear, x), coef }
    }

    /// Fixes ζ; the result is affine in x.
    pub fn at_zeta(&self, zeta: &[f64]) -> Affine {
        let mut coef = self.x_linear.clone();
        for (l, z) in zeta.iter().enumerate() {
            if *z != 0.0 {
                for (c, a) in coef.iter_mut().zip(self.cross_row(l)) {
                    *c += z * a;
                }
            }
        }
        Affine { constant: self.constant + dot(&self.zeta_linear, zeta), coef }
    }

    /// True when the value does not depend on ζ.
    pub fn is_zeta_free(&self) -> bool {
        self.zeta_linear.iter().all(|v| *v == 0.0) && self.cross.iter().all(|v| *v == 0.0)
    }

    /// Coordinates of ζ the form depends on (for some x).
    pub fn zeta_support(&self) -> Vec<bool> {
        (0..self.dim_zeta())
            .map(|l| self.zeta_linear[l] != 0.0 || self.cross_row(l).iter().any(|v| *v != 0.0))
            .collect()
    }

    /// Same function over a longer decision vector (new variables get zero
    /// coefficients).
    pub fn widen(&self, n_new: usize) -> Self {
        let n = self.n_x();
        assert!(n_new >= n);
        let mut out = Self::zeros(n_new, self.dim_zeta());
        out.constant = self.constant;
        out.x_linear[..n].copy_from_slice(&self.x_linear);
        out.zeta_linear.copy_from_slice(&self.zeta_linear);
        for l in 0..self.dim_zeta() {
            out.cross[l * n_new..l * n_new + n].copy_from_slice(self.cross_row(l));
        }
        out
    }

    /// `self += s * other`; `other` may have fewer decision variables.
    pub fn add_scaled(&mut self, other: &BiaffineForm, s: f64) {
        assert_eq!(self.dim_zeta(), other.dim_zeta());
        let n = self.n_x();
        let m = other.n_x();
        assert!(m <= n);
        self.constant += s * other.constant;
        for j in 0..m {
            self.x_linear[j] += s * other.x_linear[j];
        }
        for l in 0..self.dim_zeta() {
            self.zeta_linear[l] += s * other.zeta_linear[l];
            let src = other.cross_row(l);
            let dst = &mut self.cross[l * n..l * n + m];
            for (d, v) in dst.iter_mut().zip(src) {
                *d += s * v;
            }
        }
    }

    pub fn scaled(&self, s: f64) -> Self {
        let mut out = Self::zeros(self.n_x(), self.dim_zeta());
        out.add_scaled(self, s);
        out
    }

    pub fn is_finite(&self) -> bool {
        self.constant.is_finite()
            && self.x_linear.iter().all(|v| v.is_finite())
            && self.zeta_linear.iter().all(|v| v.is_finite())
            && self.cross.iter().all(|v| v.is_finite())
    }

    /// Largest absolute coefficient difference.
    pub fn max_abs_diff(&self, other: &BiaffineForm) -> f64 {
        if self.n_x() != other.n_x() || self.dim_zeta() != other.dim_zeta() {
            return f64::INFINITY;
        }
        let mut m = (self.constant - other.constant).abs();
        let pairs = self
            .x_linear
            .iter()
            .zip(&other.x_linear)
            .chain(self.zeta_linear.iter().zip(&other.zeta_linear))
            .chain(self.cross.iter().zip(&other.cross));
        for (a, b) in pairs {
            m = m.max((a - b).abs());
        }
        m
    }

    pub(crate) fn max_abs_coef(&self) -> f64 {
        std::iter::once(self.constant)
            .chain(self.x_linear.iter().copied())
            .chain(self.zeta_linear.iter().copied())
            .chain(self.cross.iter().copied())
            .fold(0.0, |m, v| m.max(v.abs()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> BiaffineForm {
        BiaffineForm::from_parts(
            1.0,
            vec![2.0, -1.0],
            vec![0.5, 0.0, 3.0],
            vec![vec![1.0, 0.0], vec![0.0, 0.0], vec![-2.0, 4.0]],
        )
        .unwrap()
    }

    #[test]
    fn eval_matches_parts() {
        let f = sample();
        let z = [1.0, 2.0, -1.0];
        let x = [0.5, 1.5];
        // 1 + (1 - 1.5) + (0.5 - 3) + (1*0.5) + (-1)*(-1 + 6)
        assert!((f.eval(&z, &x) - (1.0 - 0.5 - 2.5 + 0.5 - 5.0)).abs() < 1e-12);
        assert!((f.at_x(&x).eval(&z) - f.eval(&z, &x)).abs() < 1e-12);
        assert!((f.at_zeta(&z).eval(&x) - f.eval(&z, &x)).abs() < 1e-12);
    }

    #[test]
    fn support_and_widen() {
        let f = sample();
        assert_eq!(f.zeta_support(), vec![true, false, true]);
        let w = f.widen(4);
        assert_eq!(w.n_x(), 4);
        let z = [0.3, -0.2, 0.9];
        assert!((w.eval(&z, &[0.1, 0.2, 7.0, 8.0]) - f.eval(&z, &[0.1, 0.2])).abs() < 1e-12);
    }

    #[test]
    fn ragged_cross_is_rejected() {
        let r = BiaffineForm::from_parts(0.0, vec![1.0], vec![1.0], vec![vec![1.0, 2.0]]);
        assert!(matches!(r, Err(Error::Dimension(_))));
    }

    #[test]
    fn add_scaled_narrow_into_wide() {
        let f = sample();
        let mut w = BiaffineForm::zeros(3, 3);
        w.add_scaled(&f, -2.0);
        let z = [0.1, 0.2, 0.3];
        assert!((w.eval(&z, &[1.0, 2.0, 5.0]) + 2.0 * f.eval(&z, &[1.0, 2.0])).abs() < 1e-12);
    }
}
