//! Small dense-vector helpers over `&[f64]`.

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub fn norm_sq(a: &[f64]) -> f64 {
    dot(a, a)
}

pub fn norm1(a: &[f64]) -> f64 {
    a.iter().map(|x| x.abs()).sum()
}

pub fn norm_inf(a: &[f64]) -> f64 {
    a.iter().fold(0.0, |m, x| m.max(x.abs()))
}

pub fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn add(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn scale(a: &[f64], s: f64) -> Vec<f64> {
    a.iter().map(|x| x * s).collect()
}

/// `y += alpha * x`
pub fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    debug_assert_eq!(x.len(), y.len());
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

pub fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

pub fn is_finite(a: &[f64]) -> bool {
    a.iter().all(|x| x.is_finite())
}

/// Euclidean projection onto the probability simplex `{x ≥ 0, Σx = radius}`
/// by sort-and-threshold.
pub fn project_simplex(v: &[f64], radius: f64) -> Vec<f64> {
    let tau = simplex_threshold(v, radius);
    v.iter().map(|x| (x - tau).max(0.0)).collect()
}

/// Threshold `τ` with `Σ max(v_i − τ, 0) = radius`.
pub fn simplex_threshold(v: &[f64], radius: f64) -> f64 {
    let mut sorted = v.to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    let mut cumsum = 0.0;
    let mut tau = 0.0;
    for (i, &s) in sorted.iter().enumerate() {
        cumsum += s;
        let t = (cumsum - radius) / (i + 1) as f64;
        if s - t > 0.0 {
            tau = t;
        }
    }
    tau
}

/// Projection onto the ℓ1 ball of the given radius.
pub fn project_l1_ball(v: &[f64], radius: f64) -> Vec<f64> {
    if norm1(v) <= radius {
        return v.to_vec();
    }
    let abs: Vec<f64> = v.iter().map(|x| x.abs()).collect();
    let tau = simplex_threshold(&abs, radius);
    v.iter()
        .map(|x| x.signum() * (x.abs() - tau).max(0.0))
        .collect()
}

/// Projection onto the Euclidean ball of the given radius.
pub fn project_l2_ball(v: &[f64], radius: f64) -> Vec<f64> {
    let n = norm(v);
    if n <= radius {
        v.to_vec()
    } else {
        scale(v, radius / n)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn simplex_projection_of_feasible_point_is_identity() {
        assert_eq!(project_simplex(&[0.3, 0.7], 1.0), vec![0.3, 0.7]);
    }

    #[test]
    fn simplex_projection_three_dims() {
        let p = project_simplex(&[1.0, 0.5, 0.5], 1.0);
        let want = [2.0 / 3.0, 1.0 / 6.0, 1.0 / 6.0];
        for (a, b) in p.iter().zip(want) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn l1_ball_projection_inside_is_identity() {
        assert_eq!(project_l1_ball(&[0.2, -0.3], 1.0), vec![0.2, -0.3]);
        let p = project_l1_ball(&[2.0, -0.0005], 1e-3);
        assert!((norm1(&p) - 1e-3).abs() < 1e-15);
    }
}
