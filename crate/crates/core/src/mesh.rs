//! Uniform P1 triangulations of axis-aligned rectangles and the fields living on them.
//!
//! Nodes are numbered row by row, `node(i, j) = i + j (M + 1)`. Cell `(i, j)` is cut
//! along its lower-left to upper-right diagonal into element `2 (i + j M)` (below the
//! diagonal) and element `2 (i + j M) + 1` (above it).

use crate::error::{Error, Result};
use crate::nfunc::Tensor;

/// An axis-aligned rectangle `[x0, x1] x [y0, y1]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Rect {
    pub x0: f64,
    pub x1: f64,
    pub y0: f64,
    pub y1: f64,
}

impl Rect {
    pub fn new(x0: f64, x1: f64, y0: f64, y1: f64) -> Result<Self> {
        if !(x0.is_finite() && x1.is_finite() && y0.is_finite() && y1.is_finite() && x0 < x1 && y0 < y1) {
            return Err(Error::InvalidArgument(format!(
                "degenerate rectangle [{x0}, {x1}] x [{y0}, {y1}]"
            )));
        }
        Ok(Self { x0, x1, y0, y1 })
    }

    pub fn unit() -> Self {
        Self {
            x0: 0.0,
            x1: 1.0,
            y0: 0.0,
            y1: 1.0,
        }
    }

    pub fn width(&self) -> f64 {
        self.x1 - self.x0
    }

    pub fn height(&self) -> f64 {
        self.y1 - self.y0
    }

    pub fn area(&self) -> f64 {
        self.width() * self.height()
    }

    pub fn diameter(&self) -> f64 {
        self.width().hypot(self.height())
    }

    /// Distance from an interior point to the boundary (negative outside).
    pub fn boundary_distance(&self, x: [f64; 2]) -> f64 {
        (x[0] - self.x0)
            .min(self.x1 - x[0])
            .min(x[1] - self.y0)
            .min(self.y1 - x[1])
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Mesh {
    bounds: Rect,
    cells: usize,
    hx: f64,
    hy: f64,
}

impl Mesh {
    pub fn new(bounds: Rect, cells_per_side: usize) -> Result<Self> {
        if cells_per_side < 2 {
            return Err(Error::InvalidArgument(format!(
                "need at least 2 cells per side, got {cells_per_side}"
            )));
        }
        let m = cells_per_side as f64;
        Ok(Self {
            bounds,
            cells: cells_per_side,
            hx: bounds.width() / m,
            hy: bounds.height() / m,
        })
    }

    pub fn unit_square(cells_per_side: usize) -> Result<Self> {
        Self::new(Rect::unit(), cells_per_side)
    }

    /// The same rectangle with twice as many cells per side.
    pub fn refined(&self) -> Self {
        Self {
            bounds: self.bounds,
            cells: 2 * self.cells,
            hx: 0.5 * self.hx,
            hy: 0.5 * self.hy,
        }
    }

    #[inline]
    pub fn bounds(&self) -> Rect {
        self.bounds
    }

    #[inline]
    pub fn cells_per_side(&self) -> usize {
        self.cells
    }

    /// The cell width (the larger side length for non-square cells).
    #[inline]
    pub fn h(&self) -> f64 {
        self.hx.max(self.hy)
    }

    #[inline]
    pub fn hx(&self) -> f64 {
        self.hx
    }

    #[inline]
    pub fn hy(&self) -> f64 {
        self.hy
    }

    #[inline]
    pub fn node_count(&self) -> usize {
        (self.cells + 1) * (self.cells + 1)
    }

    #[inline]
    pub fn element_count(&self) -> usize {
        2 * self.cells * self.cells
    }

    #[inline]
    pub fn node_index(&self, i: usize, j: usize) -> usize {
        i + j * (self.cells + 1)
    }

    #[inline]
    pub fn node(&self, index: usize) -> [f64; 2] {
        let i = index % (self.cells + 1);
        let j = index / (self.cells + 1);
        [
            self.bounds.x0 + i as f64 * self.hx,
            self.bounds.y0 + j as f64 * self.hy,
        ]
    }

    /// Node indices of an element, counterclockwise.
    #[inline]
    pub fn element(&self, e: usize) -> [usize; 3] {
        let cell = e / 2;
        let (i, j) = (cell % self.cells, cell / self.cells);
        let sw = self.node_index(i, j);
        let ne = self.node_index(i + 1, j + 1);
        if e % 2 == 0 {
            [sw, self.node_index(i + 1, j), ne]
        } else {
            [sw, ne, self.node_index(i, j + 1)]
        }
    }

    #[inline]
    pub fn element_area(&self, _e: usize) -> f64 {
        0.5 * self.hx * self.hy
    }

    #[inline]
    pub fn barycenter(&self, e: usize) -> [f64; 2] {
        let cell = e / 2;
        let (i, j) = ((cell % self.cells) as f64, (cell / self.cells) as f64);
        let (fx, fy) = if e % 2 == 0 { (2.0, 1.0) } else { (1.0, 2.0) };
        [
            self.bounds.x0 + (i + fx / 3.0) * self.hx,
            self.bounds.y0 + (j + fy / 3.0) * self.hy,
        ]
    }

    pub fn is_boundary(&self, node: usize) -> bool {
        let i = node % (self.cells + 1);
        let j = node / (self.cells + 1);
        i == 0 || j == 0 || i == self.cells || j == self.cells
    }

    pub fn boundary_nodes(&self) -> Vec<usize> {
        (0..self.node_count()).filter(|&n| self.is_boundary(n)).collect()
    }

    /// Element containing `x` (ties resolved toward the lower-left element).
    pub fn locate(&self, x: [f64; 2]) -> Option<usize> {
        let b = &self.bounds;
        if x[0] < b.x0 || x[0] > b.x1 || x[1] < b.y0 || x[1] > b.y1 {
            return None;
        }
        let sx = (x[0] - b.x0) / self.hx;
        let sy = (x[1] - b.y0) / self.hy;
        let i = (sx.floor() as usize).min(self.cells - 1);
        let j = (sy.floor() as usize).min(self.cells - 1);
        let upper = (sy - j as f64) > (sx - i as f64);
        Some(2 * (i + j * self.cells) + usize::from(upper))
    }

    /// Gradient of each element's P1 hat functions `[d/dx, d/dy]` in the element's node order.
    #[inline]
    pub(crate) fn hat_gradients(&self, e: usize) -> [[f64; 2]; 3] {
        let (ix, iy) = (1.0 / self.hx, 1.0 / self.hy);
        if e % 2 == 0 {
            // (i,j), (i+1,j), (i+1,j+1)
            [[-ix, 0.0], [ix, -iy], [0.0, iy]]
        } else {
            // (i,j), (i+1,j+1), (i,j+1)
            [[0.0, -iy], [ix, 0.0], [-ix, iy]]
        }
    }

    /// Elements whose barycenter lies in the open ball `B_r(center)`.
    pub fn ball_elements(&self, center: [f64; 2], radius: f64) -> Result<Vec<usize>> {
        if !(radius > 0.0) {
            return Err(Error::InvalidArgument(format!("radius must be > 0, got {radius}")));
        }
        let mut out = Vec::new();
        self.for_each_in_ball(center, radius, |e| out.push(e));
        if out.is_empty() {
            return Err(Error::EmptyBall {
                x: center[0],
                y: center[1],
                radius,
            });
        }
        Ok(out)
    }

    pub(crate) fn for_each_in_ball(&self, center: [f64; 2], radius: f64, mut visit: impl FnMut(usize)) {
        let b = &self.bounds;
        let m = self.cells as isize;
        let span = |c: f64, lo: f64, h: f64| {
            let a = (((c - radius - lo) / h).floor() as isize).clamp(0, m - 1);
            let z = (((c + radius - lo) / h).floor() as isize).clamp(0, m - 1);
            (a as usize, z as usize)
        };
        let (i0, i1) = span(center[0], b.x0, self.hx);
        let (j0, j1) = span(center[1], b.y0, self.hy);
        let r2 = radius * radius;
        for j in j0..=j1 {
            for i in i0..=i1 {
                let cell = i + j * self.cells;
                for e in [2 * cell, 2 * cell + 1] {
                    let c = self.barycenter(e);
                    let (dx, dy) = (c[0] - center[0], c[1] - center[1]);
                    if dx * dx + dy * dy < r2 {
                        visit(e);
                    }
                }
            }
        }
    }
}

/// Gradient of the affine interpolant of `values` on a triangle.
pub fn p1_gradient(vertices: [[f64; 2]; 3], values: [f64; 3]) -> Result<[f64; 2]> {
    let (a, b, c) = (vertices[0], vertices[1], vertices[2]);
    let (e1, e2) = ([b[0] - a[0], b[1] - a[1]], [c[0] - a[0], c[1] - a[1]]);
    let det = e1[0] * e2[1] - e1[1] * e2[0];
    let scale = (e1[0].hypot(e1[1]) * e2[0].hypot(e2[1])).max(f64::MIN_POSITIVE);
    if det.abs() <= 1e-14 * scale {
        return Err(Error::InvalidArgument("degenerate triangle".into()));
    }
    let (d1, d2) = (values[1] - values[0], values[2] - values[0]);
    Ok([(d1 * e2[1] - d2 * e1[1]) / det, (d2 * e1[0] - d1 * e2[0]) / det])
}

/// A vector field with `components` values per mesh node.
#[derive(Clone, Debug, PartialEq)]
pub struct NodalField {
    components: usize,
    values: Vec<f64>,
}

impl NodalField {
    pub fn zeros(mesh: &Mesh, components: usize) -> Self {
        Self {
            components,
            values: vec![0.0; components * mesh.node_count()],
        }
    }

    pub fn from_values(mesh: &Mesh, components: usize, values: Vec<f64>) -> Result<Self> {
        if components == 0 || values.len() != components * mesh.node_count() {
            return Err(Error::ShapeMismatch(format!(
                "{} values for {} nodes with {} components",
                values.len(),
                mesh.node_count(),
                components
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument("nodal values must be finite".into()));
        }
        Ok(Self { components, values })
    }

    /// Nodal interpolant of `f`, which writes the `components` values at a point.
    pub fn interpolate(mesh: &Mesh, components: usize, f: impl Fn([f64; 2], &mut [f64])) -> Self {
        let mut values = vec![0.0; components * mesh.node_count()];
        for (n, chunk) in values.chunks_exact_mut(components).enumerate() {
            f(mesh.node(n), chunk);
        }
        Self { components, values }
    }

    #[inline]
    pub fn components(&self) -> usize {
        self.components
    }

    #[inline]
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    #[inline]
    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    #[inline]
    pub fn at(&self, node: usize) -> &[f64] {
        &self.values[node * self.components..(node + 1) * self.components]
    }

    pub fn scale(&self, factor: f64) -> Self {
        Self {
            components: self.components,
            values: self.values.iter().map(|v| v * factor).collect(),
        }
    }
}

/// One `rows x cols` tensor per element, stored row-major and contiguously.
#[derive(Clone, Debug, PartialEq)]
pub struct ElemField {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl ElemField {
    pub fn zeros(mesh: &Mesh, rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols * mesh.element_count()],
        }
    }

    pub fn from_values(mesh: &Mesh, rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 || data.len() != rows * cols * mesh.element_count() {
            return Err(Error::ShapeMismatch(format!(
                "{} values for {} elements of shape {}x{}",
                data.len(),
                mesh.element_count(),
                rows,
                cols
            )));
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument("element values must be finite".into()));
        }
        Ok(Self { rows, cols, data })
    }

    /// A scalar field, stored as `1 x 1` tensors.
    pub fn scalar(mesh: &Mesh, values: Vec<f64>) -> Result<Self> {
        Self::from_values(mesh, 1, 1, values)
    }

    /// Samples `f` at element barycenters.
    pub fn from_fn(mesh: &Mesh, rows: usize, cols: usize, f: impl Fn([f64; 2], &mut [f64])) -> Self {
        let stride = rows * cols;
        let mut data = vec![0.0; stride * mesh.element_count()];
        for (e, chunk) in data.chunks_exact_mut(stride).enumerate() {
            f(mesh.barycenter(e), chunk);
        }
        Self { rows, cols, data }
    }

    /// Same field with every tensor replaced by `map(tensor)`.
    pub fn map_in_place(&mut self, mut map: impl FnMut(&mut [f64])) {
        let stride = self.stride();
        self.data.chunks_exact_mut(stride).for_each(&mut map);
    }

    pub fn mapped(&self, map: impl FnMut(&mut [f64])) -> Self {
        let mut out = self.clone();
        out.map_in_place(map);
        out
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn stride(&self) -> usize {
        self.rows * self.cols
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.data.len() / self.stride()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    #[inline]
    pub fn values(&self) -> &[f64] {
        &self.data
    }

    #[inline]
    pub fn at(&self, e: usize) -> &[f64] {
        let s = self.stride();
        &self.data[e * s..(e + 1) * s]
    }

    pub fn tensor(&self, e: usize) -> Tensor {
        Tensor::from_slice_unchecked(self.rows, self.cols, self.at(e))
    }

    /// Per-element Frobenius norms.
    pub fn norms(&self) -> Vec<f64> {
        self.data
            .chunks_exact(self.stride())
            .map(crate::nfunc::norm)
            .collect()
    }

    pub fn scale(&self, factor: f64) -> Self {
        self.mapped(|t| t.iter_mut().for_each(|v| *v *= factor))
    }

    /// Adds the same tensor (given as a slice) to every element.
    pub fn shifted(&self, offset: &[f64]) -> Self {
        debug_assert_eq!(offset.len(), self.stride());
        self.mapped(|t| t.iter_mut().zip(offset).for_each(|(v, o)| *v += o))
    }

    pub fn sub(&self, other: &ElemField) -> Result<Self> {
        if (self.rows, self.cols, self.data.len()) != (other.rows, other.cols, other.data.len()) {
            return Err(Error::ShapeMismatch("element fields of different shapes".into()));
        }
        Ok(Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect(),
        })
    }

    /// Area-weighted mean tensor over the whole mesh.
    pub fn mean(&self, mesh: &Mesh) -> Vec<f64> {
        let all: Vec<usize> = (0..self.len()).collect();
        weighted_mean(mesh, self, &all)
    }
}

/// Exact P1 gradient of a nodal field, one `N x 2` tensor per element.
pub fn gradient(mesh: &Mesh, u: &NodalField) -> Result<ElemField> {
    if u.values.len() != u.components * mesh.node_count() {
        return Err(Error::ShapeMismatch(format!(
            "nodal field with {} values does not fit {} nodes",
            u.values.len(),
            mesh.node_count()
        )));
    }
    let n = u.components;
    let mut data = vec![0.0; 2 * n * mesh.element_count()];
    for (e, out) in data.chunks_exact_mut(2 * n).enumerate() {
        element_gradient(mesh, u, e, out);
    }
    Ok(ElemField {
        rows: n,
        cols: 2,
        data,
    })
}

#[inline]
pub(crate) fn element_gradient(mesh: &Mesh, u: &NodalField, e: usize, out: &mut [f64]) {
    let nodes = mesh.element(e);
    let grads = mesh.hat_gradients(e);
    let n = u.components;
    out.iter_mut().for_each(|v| *v = 0.0);
    for (k, &node) in nodes.iter().enumerate() {
        for c in 0..n {
            let value = u.values[node * n + c];
            out[2 * c] += value * grads[k][0];
            out[2 * c + 1] += value * grads[k][1];
        }
    }
}

/// `sum_e area(e) f(e)`.
pub fn integrate(mesh: &Mesh, f: &[f64]) -> Result<f64> {
    if f.len() != mesh.element_count() {
        return Err(Error::ShapeMismatch(format!(
            "{} values for {} elements",
            f.len(),
            mesh.element_count()
        )));
    }
    Ok(f.iter().enumerate().map(|(e, v)| mesh.element_area(e) * v).sum())
}

pub(crate) fn weighted_mean(mesh: &Mesh, f: &ElemField, elements: &[usize]) -> Vec<f64> {
    let mut mean = vec![0.0; f.stride()];
    let mut area = 0.0;
    for &e in elements {
        let w = mesh.element_area(e);
        area += w;
        mean.iter_mut().zip(f.at(e)).for_each(|(m, v)| *m += w * v);
    }
    mean.iter_mut().for_each(|m| *m /= area);
    mean
}

/// `(mean of |f - c|^q)^{1/q}` over the given elements, area weighted.
pub(crate) fn oscillation_about(mesh: &Mesh, f: &ElemField, elements: &[usize], center: &[f64], q: f64) -> f64 {
    let mut acc = 0.0;
    let mut area = 0.0;
    for &e in elements {
        let w = mesh.element_area(e);
        area += w;
        let d2: f64 = f.at(e).iter().zip(center).map(|(v, c)| (v - c) * (v - c)).sum();
        acc += w * pow_half(d2, q);
    }
    (acc / area).powf(1.0 / q)
}

/// `(x^2)^{q/2}` written to avoid a square root for `q = 2`.
#[inline]
pub(crate) fn pow_half(square: f64, q: f64) -> f64 {
    if q == 2.0 {
        square
    } else if q == 1.0 {
        square.sqrt()
    } else if square == 0.0 {
        0.0
    } else {
        (0.5 * q * square.ln()).exp()
    }
}

/// Mean tensor and q-oscillation of a field over the elements of `B_r(center)`.
pub fn ball_oscillation(mesh: &Mesh, f: &ElemField, center: [f64; 2], radius: f64, q: f64) -> Result<(Tensor, f64)> {
    check_q(q)?;
    let elements = mesh.ball_elements(center, radius)?;
    let mean = weighted_mean(mesh, f, &elements);
    let osc = oscillation_about(mesh, f, &elements, &mean, q);
    Ok((Tensor::from_slice_unchecked(f.rows(), f.cols(), &mean), osc))
}

pub(crate) fn check_q(q: f64) -> Result<()> {
    if q >= 1.0 && q.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("integrability exponent must be >= 1, got {q}")))
    }
}
