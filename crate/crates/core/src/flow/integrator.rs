//! Classical RK4 with step-doubling error control.

/// One RK4 step from `u` with step `h`, given `k1 = f(u)`.
pub(super) fn rk4_step<F, E>(f: &F, u: &[f64], k1: &[f64], h: f64) -> Result<Vec<f64>, E>
where
    F: Fn(&[f64]) -> Result<Vec<f64>, E>,
{
    let axpy =
        |k: &[f64], s: f64| -> Vec<f64> { u.iter().zip(k).map(|(a, b)| a + s * b).collect() };
    let k2 = f(&axpy(k1, 0.5 * h))?;
    let k3 = f(&axpy(&k2, 0.5 * h))?;
    let k4 = f(&axpy(&k3, h))?;
    Ok((0..u.len())
        .map(|i| u[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]))
        .collect())
}

pub(super) struct DoubledStep {
    /// Result of two half steps; this is the value that gets accepted.
    pub next: Vec<f64>,
    /// Local error estimate `|two halves - one full|_inf / 15`.
    pub error: f64,
}

pub(super) fn doubled_step<F, E>(f: &F, u: &[f64], k1: &[f64], h: f64) -> Result<DoubledStep, E>
where
    F: Fn(&[f64]) -> Result<Vec<f64>, E>,
{
    let full = rk4_step(f, u, k1, h)?;
    let mid = rk4_step(f, u, k1, 0.5 * h)?;
    let k_mid = f(&mid)?;
    let next = rk4_step(f, &mid, &k_mid, 0.5 * h)?;
    let error = next
        .iter()
        .zip(&full)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max)
        / 15.0;
    Ok(DoubledStep { next, error })
}

/// Step-size multiplier from the error ratio, clamped to `[0.2, 5]`.
pub(super) fn step_factor(error: f64, tolerance: f64) -> f64 {
    if error == 0.0 {
        return 5.0;
    }
    (0.9 * (tolerance / error).powf(0.2)).clamp(0.2, 5.0)
}
