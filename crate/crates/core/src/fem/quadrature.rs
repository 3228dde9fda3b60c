//! Quadrature rules on the reference triangle and on edges.

/// Three-point interior rule, exact for quadratics: barycentric coordinates
/// and weights relative to the cell area.
pub const TRIANGLE_RULE: [([f64; 3], f64); 3] = [
    ([2.0 / 3.0, 1.0 / 6.0, 1.0 / 6.0], 1.0 / 3.0),
    ([1.0 / 6.0, 2.0 / 3.0, 1.0 / 6.0], 1.0 / 3.0),
    ([1.0 / 6.0, 1.0 / 6.0, 2.0 / 3.0], 1.0 / 3.0),
];

pub const POINTS_PER_CELL: usize = TRIANGLE_RULE.len();

/// Two-point Gauss rule on `[0, 1]`: parameter and weight relative to edge length.
pub const EDGE_RULE: [(f64, f64); 2] = [
    (0.5 - 0.288_675_134_594_812_9, 0.5),
    (0.5 + 0.288_675_134_594_812_9, 0.5),
];

pub fn barycentric_point(p: &[[f64; 2]; 3], lambda: &[f64; 3]) -> [f64; 2] {
    [
        lambda[0] * p[0][0] + lambda[1] * p[1][0] + lambda[2] * p[2][0],
        lambda[0] * p[0][1] + lambda[1] * p[1][1] + lambda[2] * p[2][1],
    ]
}

pub fn edge_point(a: [f64; 2], b: [f64; 2], s: f64) -> [f64; 2] {
    [a[0] + s * (b[0] - a[0]), a[1] + s * (b[1] - a[1])]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn triangle_rule_integrates_quadratics() {
        // Reference triangle (0,0),(1,0),(0,1): area 1/2.
        let p = [[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]];
        let integrate = |f: &dyn Fn([f64; 2]) -> f64| {
            TRIANGLE_RULE
                .iter()
                .map(|(l, w)| 0.5 * w * f(barycentric_point(&p, l)))
                .sum::<f64>()
        };
        assert!((integrate(&|_| 1.0) - 0.5).abs() < 1e-15);
        assert!((integrate(&|x| x[0]) - 1.0 / 6.0).abs() < 1e-15);
        assert!((integrate(&|x| x[0] * x[0]) - 1.0 / 12.0).abs() < 1e-15);
        assert!((integrate(&|x| x[0] * x[1]) - 1.0 / 24.0).abs() < 1e-15);
    }

    #[test]
    fn edge_rule_integrates_cubics() {
        let int = |f: &dyn Fn(f64) -> f64| EDGE_RULE.iter().map(|(s, w)| w * f(*s)).sum::<f64>();
        assert!((int(&|s| s * s * s) - 0.25).abs() < 1e-15);
        assert!((int(&|s| s * s) - 1.0 / 3.0).abs() < 1e-15);
    }
}
