use std::f64::consts::PI;

/// Gauss–Legendre nodes and weights on `[-1, 1]`, ascending.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1, "Gauss-Legendre rule needs at least one node");
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        // Tricomi initial guess, then Newton on P_n.
        let mut z = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre(n, z);
            dp = d;
            let step = p / d;
            z -= step;
            if step.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre(n, z);
        if d != 0.0 {
            dp = d;
        }
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    if n % 2 == 1 {
        x[n / 2] = 0.0;
    }
    (x, w)
}

/// `(P_n(z), P_n'(z))` by the three-term recurrence.
fn legendre(n: usize, z: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, z);
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * z * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (z * p1 - p0) / (z * z - 1.0);
    (p1, d)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum AxisKind {
    /// Polar angle on `(0, π)`, Gauss–Legendre.
    Polar,
    /// Periodic angle on `[0, 2π)`, trapezoid.
    Periodic,
}

/// One-dimensional rule for a chart angle.
#[derive(Debug, Clone, PartialEq)]
pub struct Axis {
    pub kind: AxisKind,
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl Axis {
    pub fn polar(n: usize) -> Self {
        let (x, w) = gauss_legendre(n);
        let nodes = x.iter().map(|t| 0.5 * PI * (t + 1.0)).collect();
        let weights = w.iter().map(|v| 0.5 * PI * v).collect();
        Self { kind: AxisKind::Polar, nodes, weights }
    }

    pub fn periodic(n: usize) -> Self {
        assert!(n >= 1, "trapezoid rule needs at least one node");
        let h = 2.0 * PI / n as f64;
        Self { kind: AxisKind::Periodic, nodes: (0..n).map(|i| i as f64 * h).collect(), weights: vec![h; n] }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Length of the parameter interval.
    pub fn span(&self) -> f64 {
        match self.kind {
            AxisKind::Polar => PI,
            AxisKind::Periodic => 2.0 * PI,
        }
    }
}

/// Tensor-product rule. The area element `√det g` is evaluated per node by
/// the caller, so the weights here are those of the bare parameter box.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureGrid {
    pub axes: Vec<Axis>,
}

impl QuadratureGrid {
    pub fn len(&self) -> usize {
        self.axes.iter().map(Axis::len).product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn total_weight(&self) -> f64 {
        self.axes.iter().map(|a| a.weights.iter().sum::<f64>()).product()
    }

    pub fn box_volume(&self) -> f64 {
        self.axes.iter().map(Axis::span).product()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_integrates_polynomials_exactly() {
        for n in [1usize, 2, 5, 16, 64] {
            let (x, w) = gauss_legendre(n);
            for deg in 0..(2 * n) {
                let exact = if deg % 2 == 1 { 0.0 } else { 2.0 / (deg as f64 + 1.0) };
                let got: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(deg as i32)).sum();
                assert!((got - exact).abs() < 1e-13, "n={n} deg={deg}: {got} vs {exact}");
            }
        }
    }

    #[test]
    fn nodes_avoid_endpoints() {
        let a = Axis::polar(64);
        assert!(a.nodes[0] > 0.0 && a.nodes[63] < PI);
        assert!((a.weights.iter().sum::<f64>() - PI).abs() < 1e-13);
    }
}
