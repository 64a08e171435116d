//! Gauss–Kronrod (7, 15) quadrature: fixed-node grids and a globally
//! adaptive integrator.

use crate::error::{Error, Result};

const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
];

const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];

/// Gauss weights for the odd-indexed Kronrod nodes.
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

/// Kronrod estimate and `|Kronrod − Gauss|` on `[a, b]`.
pub fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kron = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    for j in 0..7 {
        let dx = h * XGK[j];
        let s = f(c - dx) + f(c + dx);
        kron += WGK[j] * s;
        if j % 2 == 1 {
            gauss += WG[j / 2] * s;
        }
    }
    (kron * h, ((kron - gauss) * h).abs())
}

/// Partition into cells, each carrying the 15 Kronrod nodes and weights.
#[derive(Clone, Debug, PartialEq)]
pub struct Grid1D {
    cells: Vec<(f64, f64)>,
    nodes: Vec<f64>,
    weights: Vec<f64>,
    level: usize,
}

impl Grid1D {
    /// `cells` equal cells on `[a, b]`.
    pub fn uniform(a: f64, b: f64, cells: usize) -> Result<Self> {
        if !(a < b) || cells == 0 {
            return Err(Error::Domain(format!("empty grid on [{a}, {b}] with {cells} cells")));
        }
        let edges: Vec<f64> = (0..=cells).map(|i| a + (b - a) * i as f64 / cells as f64).collect();
        Ok(Self::from_edges(&edges, 0))
    }

    fn from_edges(edges: &[f64], level: usize) -> Self {
        let cells: Vec<(f64, f64)> = edges.windows(2).map(|w| (w[0], w[1])).collect();
        let mut nodes = Vec::with_capacity(cells.len() * 15);
        let mut weights = Vec::with_capacity(cells.len() * 15);
        for &(a, b) in &cells {
            let (c, h) = (0.5 * (a + b), 0.5 * (b - a));
            for j in 0..7 {
                nodes.push(c - h * XGK[j]);
                weights.push(h * WGK[j]);
            }
            nodes.push(c);
            weights.push(h * WGK[7]);
            for j in (0..7).rev() {
                nodes.push(c + h * XGK[j]);
                weights.push(h * WGK[j]);
            }
        }
        Self { cells, nodes, weights, level }
    }

    /// Halves every cell.
    pub fn refined(&self) -> Self {
        let mut edges = vec![self.cells[0].0];
        for &(a, b) in &self.cells {
            edges.push(0.5 * (a + b));
            edges.push(b);
        }
        Self::from_edges(&edges, self.level + 1)
    }

    pub fn cells(&self) -> &[(f64, f64)] {
        &self.cells
    }

    pub fn level(&self) -> usize {
        self.level
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(&x, &w)| w * f(x)).sum()
    }
}

/// Globally adaptive integration: the interval with the largest error
/// estimate is bisected until the total estimate meets the tolerance.
pub fn integrate_adaptive<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, abs_tol: f64, rel_tol: f64) -> Result<f64> {
    const MAX_INTERVALS: usize = 4000;
    if a == b {
        return Ok(0.0);
    }
    let (v, e) = gk15(&f, a, b);
    let mut parts = vec![(a, b, v, e)];
    let mut total = v;
    let mut err = e;
    while err > abs_tol.max(rel_tol * total.abs()) {
        if !total.is_finite() {
            return Err(Error::Quadrature(format!("non-finite value on [{a}, {b}]")));
        }
        if parts.len() >= MAX_INTERVALS {
            return Err(Error::Quadrature(format!(
                "error estimate {err:e} after {MAX_INTERVALS} intervals on [{a}, {b}]"
            )));
        }
        let worst = parts
            .iter()
            .enumerate()
            .max_by(|x, y| x.1 .3.total_cmp(&y.1 .3))
            .map(|(i, _)| i)
            .expect("nonempty");
        let (l, r, pv, pe) = parts.swap_remove(worst);
        let m = 0.5 * (l + r);
        let (v1, e1) = gk15(&f, l, m);
        let (v2, e2) = gk15(&f, m, r);
        total += v1 + v2 - pv;
        err += e1 + e2 - pe;
        parts.push((l, m, v1, e1));
        parts.push((m, r, v2, e2));
        // Recompute to keep accumulated drift out of the stopping test.
        if parts.len() % 64 == 0 {
            total = parts.iter().map(|p| p.2).sum();
            err = parts.iter().map(|p| p.3).sum();
        }
    }
    Ok(parts.iter().map(|p| p.2).sum())
}
